//! `CSMAT1`: 6-byte magic, `u32` rows, `u32` cols, `f64` scaling, then
//! `rows·cols` row-major `f64` entries, all little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::ensembles::{MeasurementMatrix, Provenance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAGIC: &[u8; 6] = b"CSMAT1";

pub fn write_csmat<W: Write>(mut w: W, m: &MeasurementMatrix) -> Result<()> {
    let dims = |d: usize| {
        u32::try_from(d).map_err(|_| Error::validation(format!("dimension {d} does not fit in 32 bits")))
    };
    w.write_all(MAGIC)?;
    w.write_all(&dims(m.rows())?.to_le_bytes())?;
    w.write_all(&dims(m.cols())?.to_le_bytes())?;
    w.write_all(&m.scaling().to_le_bytes())?;
    for v in m.entries() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csmat<R: Read>(mut r: R) -> Result<MeasurementMatrix> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for CSMAT1 header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("missing CSMAT1 magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(|_| Error::Format("truncated header".into()))?;
    let rows = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4).map_err(|_| Error::Format("truncated header".into()))?;
    let cols = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8).map_err(|_| Error::Format("truncated header".into()))?;
    let scaling = f64::from_le_bytes(b8);
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() != count * 8 {
        return Err(Error::Format(format!(
            "expected {} payload bytes for {rows}x{cols}, found {}",
            count * 8,
            raw.len()
        )));
    }
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    MeasurementMatrix::new(Matrix::from_vec(rows, cols, data)?, scaling, Provenance::explicit())
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn write_csmat_file(path: impl AsRef<Path>, m: &MeasurementMatrix) -> Result<()> {
    write_csmat(BufWriter::new(File::create(path)?), m)
}

pub fn read_csmat_file(path: impl AsRef<Path>) -> Result<MeasurementMatrix> {
    read_csmat(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_exact() {
        let m = MeasurementMatrix::new(Matrix::from_vec(1, 2, vec![1.5, -2.0]).unwrap(), 0.5, Provenance::explicit())
            .unwrap();
        let mut buf = Vec::new();
        write_csmat(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 6 + 4 + 4 + 8 + 16);
        assert_eq!(&buf[..6], b"CSMAT1");
        assert_eq!(&buf[6..10], &1u32.to_le_bytes());
        assert_eq!(&buf[10..14], &2u32.to_le_bytes());
        assert_eq!(&buf[14..22], &0.5f64.to_le_bytes());
        assert_eq!(&buf[22..30], &1.5f64.to_le_bytes());
        let back = read_csmat(&buf[..]).unwrap();
        assert_eq!(back.entries(), m.entries());
        assert_eq!(back.scaling(), 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_csmat(&b"CSMAT2\0\0"[..]), Err(Error::Format(_))));
        assert!(read_csmat(&b"CS"[..]).is_err());
        let mut buf = Vec::new();
        buf.extend_from_slice(b"CSMAT1");
        buf.extend_from_slice(&2u32.to_le_bytes());
        buf.extend_from_slice(&2u32.to_le_bytes());
        buf.extend_from_slice(&1f64.to_le_bytes());
        buf.extend_from_slice(&[0u8; 24]);
        assert!(matches!(read_csmat(&buf[..]), Err(Error::Format(_))));
    }
}
