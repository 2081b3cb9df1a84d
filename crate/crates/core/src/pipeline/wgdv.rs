//! `WGDV` binary matrix files.
//!
//! Layout, all little-endian: the 4 magic bytes `WGDV`, `u32` version (1),
//! `u32` rows, `u32` cols, then `rows × cols` IEEE-754 binary32 values in
//! row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MAGIC: &[u8; 4] = b"WGDV";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct WgdvMatrix {
    pub rows: u32,
    pub cols: u32,
    pub data: Vec<f32>,
}

impl WgdvMatrix {
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let rows = u32::try_from(m.rows()).map_err(|_| Error::Input("too many rows for WGDV".into()))?;
        let cols = u32::try_from(m.cols()).map_err(|_| Error::Input("too many columns for WGDV".into()))?;
        Ok(Self { rows, cols, data: m.as_slice().iter().map(|&v| v as f32).collect() })
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.rows as usize, self.cols as usize, self.data.iter().map(|&v| v as f64).collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.rows.to_le_bytes());
        out.extend_from_slice(&self.cols.to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &Path) -> Result<Self> {
        let bad = |message: String| Error::Format { path: origin.to_path_buf(), message };
        if bytes.len() < HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("missing WGDV magic".into()));
        }
        let word = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap());
        let (version, rows, cols) = (word(0), word(1), word(2));
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let expected = (rows as usize)
            .checked_mul(cols as usize)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| bad("dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(bad(format!("expected {expected} bytes for {rows}×{cols}, found {}", bytes.len())));
        }
        let data = bytes[HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { rows, cols, data })
    }
}

pub fn write_wgdv(path: &Path, m: &WgdvMatrix) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&m.to_bytes())?;
    Ok(())
}

pub fn read_wgdv(path: &Path) -> Result<WgdvMatrix> {
    WgdvMatrix::from_bytes(&fs::read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let m = WgdvMatrix { rows: 2, cols: 1, data: vec![1.0, -0.5] };
        let b = m.to_bytes();
        assert_eq!(&b[..4], b"WGDV");
        assert_eq!(&b[4..16], &[1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&b[16..20], &1.0f32.to_le_bytes());
        assert_eq!(b.len(), 24);
    }

    #[test]
    fn rejects_truncated_and_foreign() {
        let p = Path::new("x.wgdv");
        let mut b = WgdvMatrix { rows: 2, cols: 2, data: vec![0.0; 4] }.to_bytes();
        assert!(WgdvMatrix::from_bytes(&b[..20], p).is_err());
        b[0] = b'X';
        assert!(WgdvMatrix::from_bytes(&b, p).is_err());
        assert!(WgdvMatrix::from_bytes(b"WGDV", p).is_err());
    }

    proptest! {
        #[test]
        fn bytes_round_trip(rows in 0u32..6, cols in 0u32..6, seed in any::<u32>()) {
            let data: Vec<f32> = (0..rows * cols).map(|k| f32::from_bits(seed.wrapping_mul(2654435761).wrapping_add(k * 7919) & 0x7f7f_ffff)).collect();
            let m = WgdvMatrix { rows, cols, data };
            let back = WgdvMatrix::from_bytes(&m.to_bytes(), Path::new("p")).unwrap();
            prop_assert_eq!(back.to_bytes(), m.to_bytes());
        }
    }
}
