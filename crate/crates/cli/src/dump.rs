//! Binary field snapshots.
//!
//! Layout, little-endian throughout: the 8-byte magic `TPLFIELD`, `u32`
//! version, `u32` polarization tag (0 scalar, 1 TE, 2 TM), `u64` nx, `u64`
//! ny, then `f64` dx, dy, x0, y0 (first cell centre, um), lambda (um) and z
//! (um), then `nx * ny` pairs of `f64` (re, im) in row-major order, rows
//! running along y.

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

use taperlith_core::{FieldSlice, Grid2D, Polarization};

pub const MAGIC: &[u8; 8] = b"TPLFIELD";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 8 + 6 * 8;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("not a field dump (bad magic)")]
    Magic,
    #[error("unsupported dump version {0}")]
    Version(u32),
    #[error("unknown polarization tag {0}")]
    Polarization(u32),
    #[error("payload holds {found} bytes, header implies {expected}")]
    Length { expected: usize, found: usize },
    #[error("invalid header: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A field with the propagation distance it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub z: f64,
    pub field: FieldSlice,
}

impl FieldDump {
    pub fn new(z: f64, field: FieldSlice) -> Self {
        Self { z, field }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.field.grid();
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.field.polarization().tag().to_le_bytes());
        out.extend_from_slice(&(g.nx as u64).to_le_bytes());
        out.extend_from_slice(&(g.ny as u64).to_le_bytes());
        for v in [g.dx, g.dy, g.x0, g.y0, self.field.lambda(), self.z] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for c in self.field.values().iter() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DumpError> {
        if bytes.len() < HEADER_LEN {
            return Err(if bytes.len() >= 8 && &bytes[..8] != MAGIC {
                DumpError::Magic
            } else {
                DumpError::Length {
                    expected: HEADER_LEN,
                    found: bytes.len(),
                }
            });
        }
        if &bytes[..8] != MAGIC {
            return Err(DumpError::Magic);
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(8);
        if version != VERSION {
            return Err(DumpError::Version(version));
        }
        let tag = u32_at(12);
        let pol = Polarization::from_tag(tag).ok_or(DumpError::Polarization(tag))?;
        let (nx, ny) = (u64_at(16), u64_at(24));
        let h: Vec<f64> = (0..6).map(|k| f64_at(32 + 8 * k)).collect();
        let cells = nx
            .checked_mul(ny)
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| DumpError::Header(format!("{nx} x {ny} cells overflow")))?;
        let expected = cells
            .checked_mul(16)
            .ok_or_else(|| DumpError::Header(format!("{nx} x {ny} cells overflow")))?;
        let found = bytes.len() - HEADER_LEN;
        if found != expected {
            return Err(DumpError::Length { expected, found });
        }
        let grid = Grid2D::new(nx as usize, ny as usize, h[0], h[1], (h[2], h[3]))
            .map_err(|e| DumpError::Header(e.to_string()))?;
        let payload = &bytes[HEADER_LEN..];
        let values: Vec<Complex64> = payload
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        let values = Array2::from_shape_vec(grid.shape(), values).map_err(|e| DumpError::Header(e.to_string()))?;
        let field = FieldSlice::new(grid, values, h[4], pol).map_err(|e| DumpError::Header(e.to_string()))?;
        Ok(Self { z: h[5], field })
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), DumpError> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, DumpError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(nx: usize, ny: usize, pol: Polarization) -> FieldDump {
        let g = Grid2D::new(nx, ny, 0.1, 0.25, (-1.5, 2.0)).unwrap();
        let f = FieldSlice::from_fn(g, 1.55, pol, |x, y| Complex64::new(x.sin() * y, -x * y.cos())).unwrap();
        FieldDump::new(500.0, f)
    }

    #[test]
    fn header_layout() {
        let b = sample(3, 2, Polarization::Te).to_bytes();
        assert_eq!(&b[..8], MAGIC);
        assert_eq!(b.len(), HEADER_LEN + 6 * 16);
        assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(b[72..80].try_into().unwrap()), 500.0);
    }

    #[test]
    fn rejects_corrupt_dumps() {
        let b = sample(3, 2, Polarization::Tm).to_bytes();
        assert!(matches!(FieldDump::from_bytes(&b[..b.len() - 1]), Err(DumpError::Length { .. })));
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(FieldDump::from_bytes(&bad), Err(DumpError::Magic)));
        let mut bad = b.clone();
        bad[8] = 9;
        assert!(matches!(FieldDump::from_bytes(&bad), Err(DumpError::Version(9))));
        let mut bad = b;
        bad[12] = 7;
        assert!(matches!(FieldDump::from_bytes(&bad), Err(DumpError::Polarization(7))));
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(nx in 2usize..9, ny in 2usize..9, tag in 0u32..3, z in 0.0f64..1e3) {
            let mut d = sample(nx, ny, Polarization::from_tag(tag).unwrap());
            d.z = z;
            let back = FieldDump::from_bytes(&d.to_bytes()).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(back.to_bytes(), d.to_bytes());
        }
    }
}
