use std::io::{self, Write};

use super::{HeightfieldError, Heightmap, PixelRegion};

/// Triangle mesh with one vertex per texel center of the exported window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise seen from +z.
    pub faces: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Writes `v x y z` / `f i j k` lines with 1-based face indices.
    ///
    /// Coordinates use the shortest decimal form that parses back to the same
    /// `f64`, so vertex heights survive a text round-trip exactly.
    pub fn write_obj<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# {} vertices, {} faces", self.vertices.len(), self.faces.len())?;
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        out.flush()
    }

    /// Rewrites vertex heights in place from `map` without touching topology.
    /// The mesh must have been exported from `region` of a map with the same
    /// layout.
    pub fn refresh_heights(&mut self, map: &Heightmap, region: PixelRegion) {
        let mut i = 0;
        for row in region.min_row..=region.max_row {
            for col in region.min_col..=region.max_col {
                self.vertices[i][2] = map.get(col, row) as f64;
                i += 1;
            }
        }
    }
}

impl Heightmap {
    /// Exports `region` (or the whole map) as a triangle mesh: `W*H` vertices
    /// and `2(W-1)(H-1)` faces. The region is clamped to the map first.
    pub fn export_mesh(&self, region: Option<PixelRegion>) -> Result<TriangleMesh, HeightfieldError> {
        let region = match region {
            None => self.full_region(),
            Some(r) => match self.clamp_region(r) {
                Some((r, _)) => r,
                None => {
                    return Err(HeightfieldError::DegenerateRegion {
                        width: 0,
                        height: 0,
                    })
                }
            },
        };
        let (w, h) = (region.width(), region.height());
        if w < 2 || h < 2 {
            return Err(HeightfieldError::DegenerateRegion { width: w, height: h });
        }

        let mut vertices = Vec::with_capacity(w * h);
        for row in region.min_row..=region.max_row {
            for col in region.min_col..=region.max_col {
                let [x, y] = self.pixel_to_world(col as f64, row as f64);
                vertices.push([x, y, self.get(col, row) as f64]);
            }
        }

        let mut faces = Vec::with_capacity(2 * (w - 1) * (h - 1));
        for j in 0..h - 1 {
            for i in 0..w - 1 {
                let a = (j * w + i) as u32;
                let b = a + 1;
                let d = a + w as u32;
                let c = d + 1;
                // a=(i,j) b=(i+1,j) c=(i+1,j+1) d=(i,j+1); +x right, +y up
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        Ok(TriangleMesh { vertices, faces })
    }
}
