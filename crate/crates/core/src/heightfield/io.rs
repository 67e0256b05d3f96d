//! Binary heightmap files.
//!
//! Layout, all little-endian:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 8    | magic `RGTRACE1`              |
//! | 8      | 8    | cols (u64)                    |
//! | 16     | 8    | rows (u64)                    |
//! | 24     | 8    | resolution, m/texel (f64)     |
//! | 32     | 8    | origin x, m (f64)             |
//! | 40     | 8    | origin y, m (f64)             |
//! | 48     | 4·n  | elevations, row-major (f32)   |
//! | 48+4n  | 4·n  | pristine, row-major (f32)     |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{HeightfieldError, Heightmap};

pub const MAGIC: &[u8; 8] = b"RGTRACE1";
pub const HEADER_BYTES: usize = 48;

/// Size in bytes of the file written for a map with `texels` texels.
pub fn grid_file_bytes(texels: usize) -> usize {
    HEADER_BYTES + 2 * 4 * texels
}

impl Heightmap {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), HeightfieldError> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.cols as u64).to_le_bytes())?;
        out.write_all(&(self.rows as u64).to_le_bytes())?;
        out.write_all(&self.resolution.to_le_bytes())?;
        out.write_all(&self.origin[0].to_le_bytes())?;
        out.write_all(&self.origin[1].to_le_bytes())?;
        let mut buf = Vec::with_capacity(4 * self.texels());
        for grid in [&self.elevations, &self.pristine] {
            buf.clear();
            buf.extend(grid.iter().flat_map(|z| z.to_le_bytes()));
            out.write_all(&buf)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self, HeightfieldError> {
        let mut header = [0u8; HEADER_BYTES];
        read_exact(&mut input, &mut header, "header")?;
        if &header[..8] != MAGIC {
            return Err(HeightfieldError::Format("bad magic".into()));
        }
        let word = |i: usize| -> [u8; 8] { header[i..i + 8].try_into().unwrap() };
        let cols = u64::from_le_bytes(word(8));
        let rows = u64::from_le_bytes(word(16));
        let resolution = f64::from_le_bytes(word(24));
        let origin = [f64::from_le_bytes(word(32)), f64::from_le_bytes(word(40))];

        let texels = cols
            .checked_mul(rows)
            .and_then(|n| usize::try_from(n).ok())
            .filter(|n| n.checked_mul(8).is_some())
            .ok_or_else(|| HeightfieldError::Format(format!("implausible size {cols}x{rows}")))?;
        if cols < 2 || rows < 2 {
            return Err(HeightfieldError::Format(format!("grid {cols}x{rows} is smaller than 2x2")));
        }

        let elevations = read_grid(&mut input, texels, "elevations")?;
        let pristine = read_grid(&mut input, texels, "pristine")?;
        let mut probe = [0u8; 1];
        if input.read(&mut probe)? != 0 {
            return Err(HeightfieldError::Format("trailing bytes after payload".into()));
        }
        Heightmap::from_parts(cols as usize, rows as usize, resolution, origin, elevations, pristine)
            .map_err(|e| HeightfieldError::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), HeightfieldError> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HeightfieldError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<(), HeightfieldError> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => HeightfieldError::Format(format!("truncated {what}")),
        _ => HeightfieldError::Io(e),
    })
}

fn read_grid<R: Read>(input: &mut R, texels: usize, what: &str) -> Result<Vec<f32>, HeightfieldError> {
    let mut bytes = vec![0u8; 4 * texels];
    read_exact(input, &mut bytes, what)?;
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(seed: u64) -> Heightmap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<f32> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut m = Heightmap::new(16, 16, 0.015, [-5.0, 3.25], z).unwrap();
        for _ in 0..20 {
            let (c, r) = (rng.gen_range(0..16), rng.gen_range(0..16));
            m.set(c, r, rng.gen());
        }
        m
    }

    fn bytes_of(m: &Heightmap) -> Vec<u8> {
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = random_map(7);
        let buf = bytes_of(&m);
        assert_eq!(buf.len(), grid_file_bytes(256));
        let back = Heightmap::read_from(&buf[..]).unwrap();
        assert_eq!(back.resolution(), 0.015);
        assert_eq!(back.origin(), m.origin());
        let bits = |v: &[f32]| v.iter().map(|z| z.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(back.elevations()), bits(m.elevations()));
        assert_eq!(bits(back.pristine()), bits(m.pristine()));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.rgt");
        let m = random_map(3);
        m.save(&path).unwrap();
        assert_eq!(Heightmap::load(&path).unwrap(), m);
    }

    #[test]
    fn truncated_payload_is_format_error() {
        let buf = bytes_of(&random_map(1));
        for cut in [10, HEADER_BYTES, buf.len() - 1] {
            assert!(matches!(
                Heightmap::read_from(&buf[..cut]),
                Err(HeightfieldError::Format(_))
            ));
        }
    }

    #[test]
    fn bad_magic_and_trailing_bytes() {
        let mut buf = bytes_of(&random_map(2));
        buf.push(0);
        assert!(matches!(Heightmap::read_from(&buf[..]), Err(HeightfieldError::Format(_))));
        buf.pop();
        buf[0] = b'X';
        assert!(matches!(Heightmap::read_from(&buf[..]), Err(HeightfieldError::Format(_))));
    }

    #[test]
    fn header_size_mismatch() {
        let mut buf = bytes_of(&random_map(2));
        buf[8..16].copy_from_slice(&17u64.to_le_bytes());
        assert!(matches!(Heightmap::read_from(&buf[..]), Err(HeightfieldError::Format(_))));
    }
}
