//! Binary (P5) PGM with 8-bit samples.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Grayscale image with intensities in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::validation(format!(
                "{} pixels do not fill a {height}x{width} image",
                pixels.len()
            )));
        }
        Ok(GrayImage { height, width, pixels })
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Column-major vectorization.
    pub fn to_column_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pixels.len());
        for c in 0..self.width {
            for r in 0..self.height {
                out.push(self.get(r, c));
            }
        }
        out
    }

    pub fn from_column_major(height: usize, width: usize, v: &[f64]) -> Result<Self> {
        if v.len() != height * width {
            return Err(Error::validation("vector length does not match image size"));
        }
        let mut pixels = vec![0.0; v.len()];
        for c in 0..width {
            for r in 0..height {
                pixels[r * width + c] = v[c * height + r];
            }
        }
        Ok(GrayImage { height, width, pixels })
    }

    pub fn nonzero_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p != 0.0).count()
    }
}

fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("truncated PGM header".into()));
    }
    Ok(&data[start..*pos])
}

fn header_number(data: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = next_token(data, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad PGM {what}")))
}

/// Decodes a P5 image with `maxval <= 255`, normalizing by `maxval`.
pub fn read_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    if next_token(data, &mut pos)? != b"P5" {
        return Err(Error::Format("not a binary PGM (P5)".into()));
    }
    let width = header_number(data, &mut pos, "width")?;
    let height = header_number(data, &mut pos, "height")?;
    let maxval = header_number(data, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let count = width * height;
    let raster = data
        .get(pos..pos + count)
        .ok_or_else(|| Error::Format("truncated PGM raster".into()))?;
    let scale = maxval as f64;
    GrayImage::new(height, width, raster.iter().map(|&b| f64::from(b) / scale).collect())
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    read_pgm(&fs::read(path)?)
}

/// Encodes with maxval 255 after clamping intensities to `[0, 1]`.
pub fn write_pgm<W: Write>(mut w: W, img: &GrayImage) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.width, img.height)?;
    let bytes: Vec<u8> = img
        .pixels
        .iter()
        .map(|&p| {
            let v = if p.is_nan() { 0.0 } else { (p * 255.0).round().clamp(0.0, 255.0) };
            v as u8
        })
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let mut buf = Vec::new();
    write_pgm(&mut buf, img)?;
    fs::write(path, buf)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_bit_round_trip() {
        let px: Vec<f64> = (0..12).map(|i| f64::from(i * 20) / 255.0).collect();
        let img = GrayImage::new(3, 4, px).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &img).unwrap();
        assert!(buf.starts_with(b"P5\n4 3\n255\n"));
        assert_eq!(read_pgm(&buf).unwrap(), img);
    }

    #[test]
    fn header_comments_and_clamping() {
        let data = b"P5\n# made by hand\n2 1\n# depth\n15\n\x0f\x05";
        let img = read_pgm(data).unwrap();
        assert_eq!((img.height, img.width), (1, 2));
        assert_eq!(img.pixels, vec![1.0, 5.0 / 15.0]);
        let wild = GrayImage::new(1, 3, vec![-0.2, 1.7, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_pgm(&mut buf, &wild).unwrap();
        assert_eq!(&buf[buf.len() - 3..], &[0, 255, 128]);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(read_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(read_pgm(b"P5\n2 2\n255\n\x00").is_err());
        assert!(read_pgm(b"P5\n1 1\n65535\n\x00\x00").is_err());
    }

    #[test]
    fn column_major_layout() {
        let img = GrayImage::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let v = img.to_column_major();
        assert_eq!(v, vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(GrayImage::from_column_major(2, 3, &v).unwrap(), img);
    }
}
