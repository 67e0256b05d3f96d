//! Elevation grid with world/pixel transforms, bilinear sampling, persistence
//! and triangle-mesh export.
//!
//! Elevations live at texel centers. `origin` is the world position of the
//! center of texel `(0, 0)`; columns grow along world +x and rows along +y.
//! Alongside the live elevations the map keeps an immutable `pristine` copy of
//! the terrain as it was constructed, which the deformation engine stamps
//! against.

mod io;
mod mesh;

pub use io::{grid_file_bytes, HEADER_BYTES, MAGIC};
pub use mesh::TriangleMesh;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeightfieldError {
    #[error("invalid grid dimensions {cols}x{rows} (need at least 2x2)")]
    InvalidDimensions { cols: usize, rows: usize },
    #[error("invalid resolution {0} (must be finite and > 0)")]
    InvalidResolution(f64),
    #[error("{what} has {got} entries, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("point ({x}, {y}) lies outside the sampled grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("region is {width}x{height} texels; a mesh needs at least 2x2")]
    DegenerateRegion { width: usize, height: usize },
    #[error("bad heightmap file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Inclusive rectangle of pixel indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PixelRegion {
    pub min_col: usize,
    pub min_row: usize,
    pub max_col: usize,
    pub max_row: usize,
}

impl PixelRegion {
    /// Builds a region from two corners given in any order.
    pub fn new(c0: usize, r0: usize, c1: usize, r1: usize) -> Self {
        Self {
            min_col: c0.min(c1),
            min_row: r0.min(r1),
            max_col: c0.max(c1),
            max_row: r0.max(r1),
        }
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }

    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, col: usize, row: usize) -> bool {
        (self.min_col..=self.max_col).contains(&col) && (self.min_row..=self.max_row).contains(&row)
    }
}

/// Fractional pixel coordinate returned by [`Heightmap::world_to_pixel`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelCoord {
    pub col: f64,
    pub row: f64,
    /// True when the coordinate lies inside the hull of texel centers,
    /// `[0, cols-1] x [0, rows-1]`.
    pub in_bounds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Heightmap {
    cols: usize,
    rows: usize,
    resolution: f64,
    origin: [f64; 2],
    elevations: Vec<f32>,
    pristine: Vec<f32>,
}

impl Heightmap {
    /// Creates a map whose pristine surface equals `elevations`.
    pub fn new(
        cols: usize,
        rows: usize,
        resolution: f64,
        origin: [f64; 2],
        elevations: Vec<f32>,
    ) -> Result<Self, HeightfieldError> {
        let pristine = elevations.clone();
        Self::from_parts(cols, rows, resolution, origin, elevations, pristine)
    }

    pub fn flat(
        cols: usize,
        rows: usize,
        resolution: f64,
        origin: [f64; 2],
        elevation: f32,
    ) -> Result<Self, HeightfieldError> {
        Self::new(cols, rows, resolution, origin, vec![elevation; cols.saturating_mul(rows)])
    }

    /// A flat square map covering `[-extent/2, extent/2]^2` with
    /// `round(extent / resolution)` texels per side.
    pub fn square(extent: f64, resolution: f64, elevation: f32) -> Result<Self, HeightfieldError> {
        let (n, origin) = square_layout(extent, resolution)?;
        Self::flat(n, n, resolution, origin, elevation)
    }

    pub fn from_parts(
        cols: usize,
        rows: usize,
        resolution: f64,
        origin: [f64; 2],
        elevations: Vec<f32>,
        pristine: Vec<f32>,
    ) -> Result<Self, HeightfieldError> {
        if cols < 2 || rows < 2 {
            return Err(HeightfieldError::InvalidDimensions { cols, rows });
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(HeightfieldError::InvalidResolution(resolution));
        }
        let expected = cols * rows;
        if elevations.len() != expected {
            return Err(HeightfieldError::SizeMismatch {
                what: "elevations",
                got: elevations.len(),
                expected,
            });
        }
        if pristine.len() != expected {
            return Err(HeightfieldError::SizeMismatch {
                what: "pristine",
                got: pristine.len(),
                expected,
            });
        }
        Ok(Self {
            cols,
            rows,
            resolution,
            origin,
            elevations,
            pristine,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn texels(&self) -> usize {
        self.cols * self.rows
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn elevations(&self) -> &[f32] {
        &self.elevations
    }

    pub fn pristine(&self) -> &[f32] {
        &self.pristine
    }

    /// The whole map as a region.
    pub fn full_region(&self) -> PixelRegion {
        PixelRegion::new(0, 0, self.cols - 1, self.rows - 1)
    }

    #[inline]
    pub fn index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.cols && row < self.rows);
        row * self.cols + col
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> f32 {
        self.elevations[self.index(col, row)]
    }

    #[inline]
    pub fn pristine_at(&self, col: usize, row: usize) -> f32 {
        self.pristine[self.index(col, row)]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, elevation: f32) {
        let i = self.index(col, row);
        self.elevations[i] = elevation;
    }

    /// Restores every texel to its pristine elevation.
    pub fn reset(&mut self) {
        self.elevations.copy_from_slice(&self.pristine);
    }

    pub fn world_to_pixel(&self, p: [f64; 2]) -> PixelCoord {
        let col = (p[0] - self.origin[0]) / self.resolution;
        let row = (p[1] - self.origin[1]) / self.resolution;
        let in_bounds = (0.0..=(self.cols - 1) as f64).contains(&col)
            && (0.0..=(self.rows - 1) as f64).contains(&row);
        PixelCoord { col, row, in_bounds }
    }

    pub fn pixel_to_world(&self, col: f64, row: f64) -> [f64; 2] {
        [
            self.origin[0] + self.resolution * col,
            self.origin[1] + self.resolution * row,
        ]
    }

    /// Bilinear interpolation of the four texel centers around `p`.
    pub fn sample_bilinear(&self, p: [f64; 2]) -> Result<f64, HeightfieldError> {
        self.interpolate(p, |i| self.elevations[i] as f64)
    }

    /// Bilinear interpolation of `elevation - pristine` at `p`.
    pub fn sample_deformation(&self, p: [f64; 2]) -> Result<f64, HeightfieldError> {
        self.interpolate(p, |i| self.elevations[i] as f64 - self.pristine[i] as f64)
    }

    fn interpolate(&self, p: [f64; 2], node: impl Fn(usize) -> f64) -> Result<f64, HeightfieldError> {
        let px = self.world_to_pixel(p);
        if !px.in_bounds {
            return Err(HeightfieldError::OutOfBounds { x: p[0], y: p[1] });
        }
        let (col, row) = (snap(px.col), snap(px.row));
        // Keep the upper neighbor inside the grid on the last row/column.
        let c0 = (col.floor() as usize).min(self.cols - 2);
        let r0 = (row.floor() as usize).min(self.rows - 2);
        let tx = col - c0 as f64;
        let ty = row - r0 as f64;

        let i00 = self.index(c0, r0);
        let z00 = node(i00);
        let z10 = node(i00 + 1);
        let z01 = node(i00 + self.cols);
        let z11 = node(i00 + self.cols + 1);
        if tx == 0.0 && ty == 0.0 {
            return Ok(z00);
        }
        let a = z00 + (z10 - z00) * tx;
        let b = z01 + (z11 - z01) * tx;
        Ok(a + (b - a) * ty)
    }

    /// Elevation at the texel nearest to `p`, if `p` is on the map.
    pub fn nearest(&self, p: [f64; 2]) -> Option<f32> {
        let px = self.world_to_pixel(p);
        let (c, r) = (px.col.round(), px.row.round());
        if c < 0.0 || r < 0.0 || c >= self.cols as f64 || r >= self.rows as f64 {
            return None;
        }
        Some(self.get(c as usize, r as usize))
    }

    /// Clamps a region to the map bounds. Returns `None` if nothing remains,
    /// and whether clamping changed the region.
    pub fn clamp_region(&self, region: PixelRegion) -> Option<(PixelRegion, bool)> {
        if region.min_col >= self.cols || region.min_row >= self.rows {
            return None;
        }
        let clamped = PixelRegion {
            max_col: region.max_col.min(self.cols - 1),
            max_row: region.max_row.min(self.rows - 1),
            ..region
        };
        Some((clamped, clamped != region))
    }

    /// Bytes held by the two elevation grids.
    pub fn grid_bytes(&self) -> usize {
        2 * self.texels() * std::mem::size_of::<f32>()
    }
}

/// Rounds pixel coordinates that are within float noise of a texel center.
#[inline]
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

/// Side length in texels and origin for a square map centered on the world
/// origin.
pub(crate) fn square_layout(extent: f64, resolution: f64) -> Result<(usize, [f64; 2]), HeightfieldError> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(HeightfieldError::InvalidResolution(resolution));
    }
    let n = (extent / resolution).round();
    if !(n.is_finite() && n >= 2.0) {
        let n = if n.is_finite() && n > 0.0 { n as usize } else { 0 };
        return Err(HeightfieldError::InvalidDimensions { cols: n, rows: n });
    }
    let n = n as usize;
    let o = -0.5 * n as f64 * resolution + 0.5 * resolution;
    Ok((n, [o, o]))
}
