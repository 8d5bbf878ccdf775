//! Little-endian binary field checkpoints.
//!
//! Layout: magic `FNLS`, version `u32 = 1`, `d u32`, `n u32`, `l f64`, `s f64`,
//! `p f64`, sign `u8` (0 focusing, 1 defocusing), `t f64`, then `n^d`
//! interleaved `(re f64, im f64)` pairs in row-major physical order.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Space};
use crate::grid::Grid;
use crate::params::{PhysParams, Sign};

pub const MAGIC: [u8; 4] = *b"FNLS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8 + 8 + 1 + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointMeta {
    pub d: usize,
    pub n: usize,
    pub l: f64,
    pub params: PhysParams,
    pub t: f64,
}

pub fn encode(u: &ComplexField, t: f64, params: &PhysParams) -> Vec<u8> {
    let grid = u.grid();
    let phys = u.to_physical();
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * grid.len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    buf.extend_from_slice(&grid.half_len().to_le_bytes());
    buf.extend_from_slice(&params.s.to_le_bytes());
    buf.extend_from_slice(&params.p.to_le_bytes());
    buf.push(params.sign.as_byte());
    buf.extend_from_slice(&t.to_le_bytes());
    for v in phys.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    buf
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        if end > self.bytes.len() {
            return Err(Error::SizeMismatch {
                expected: HEADER_LEN,
                found: self.bytes.len(),
            });
        }
        let mut out = [0u8; N];
        out.copy_from_slice(&self.bytes[self.pos..end]);
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode(bytes: &[u8]) -> Result<(ComplexField, CheckpointMeta)> {
    let mut rd = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = rd.take()?;
    if magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let version = rd.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: VERSION,
        });
    }
    let d = rd.u32()? as usize;
    let n = rd.u32()? as usize;
    let l = rd.f64()?;
    let s = rd.f64()?;
    let p = rd.f64()?;
    let [sign_byte] = rd.take::<1>()?;
    let t = rd.f64()?;
    let sign = Sign::from_byte(sign_byte)
        .ok_or_else(|| Error::param("sign", format!("unknown sign byte {sign_byte}")))?;
    let params = PhysParams::new(s, p, sign)?;
    let grid: Arc<Grid> = Grid::new(d, n, l)?;

    let payload = &bytes[HEADER_LEN..];
    let expected = 16 * grid.len();
    if payload.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: payload.len(),
        });
    }
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let field = ComplexField::from_values(&grid, values, Space::Physical)?;
    Ok((field, CheckpointMeta { d, n, l, params, t }))
}

pub fn write_checkpoint(
    u: &ComplexField,
    path: impl AsRef<Path>,
    t: f64,
    params: &PhysParams,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(u, t, params)).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<(ComplexField, CheckpointMeta)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
