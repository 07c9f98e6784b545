//! Grayscale rasters, binary PGM and the rounded push-forward of images.

use std::io::{Read, Write};

use super::DiscretizedSequence;
use crate::error::{Error, Result};

pub const WHITE: u8 = 255;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Empty("raster"));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(Raster { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major pixel values.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// A deterministic pattern of rings, stripes and a gradient, with no
    /// pure-white pixels.
    pub fn test_pattern(width: usize, height: usize) -> Self {
        let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                let (dx, dy) = (c as f64 - cx, r as f64 - cy);
                let ring = ((dx * dx + dy * dy).sqrt() / 9.0) as usize % 2;
                let stripe = (c / 13 + r / 17) % 3;
                let grad = (r * 97 / height.max(1)) as u8;
                let v = 20 + grad + 60 * ring as u8 + 25 * stripe as u8;
                pixels.push(v.min(WHITE - 1));
            }
        }
        Raster { width, height, pixels }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::parse(1, msg)
}

/// Reads a binary PGM (`P5`, maxval 255).
pub fn read_pgm(mut reader: impl Read) -> Result<Raster> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(bad("truncated PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(bad("not a binary PGM (expected P5)"));
    }
    let mut number = |what: &str| -> Result<usize> {
        let t = token()?;
        t.parse().map_err(|_| bad(format!("bad {what} {t:?} in PGM header")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval != 255 {
        return Err(bad(format!("only maxval 255 is supported, got {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let data_start = pos + 1;
    let expected = width * height;
    if bytes.len() < data_start + expected {
        return Err(bad(format!(
            "PGM raster holds {} bytes, expected {expected}",
            bytes.len().saturating_sub(data_start)
        )));
    }
    Raster::new(width, height, bytes[data_start..data_start + expected].to_vec())
}

pub fn write_pgm(raster: &Raster, mut writer: impl Write) -> Result<()> {
    write!(writer, "P5\n{} {}\n255\n", raster.width, raster.height)?;
    writer.write_all(&raster.pixels)?;
    Ok(())
}

/// Pushes the image through each rounded map in turn. Pixel `(row, col)`
/// sits at `(col − w/2, row − h/2)`; only pixels still carrying content are
/// pushed, the first one (in row-major order) to land on a pixel wins, and
/// pixels nobody lands on become white and lose their content. Returns the
/// final raster and the lost fraction after each step.
pub fn degrade_trace(image: &Raster, seq: &DiscretizedSequence) -> Result<(Raster, Vec<f64>)> {
    if seq.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: seq.dim(),
        });
    }
    let (w, h) = (image.width, image.height);
    let (cx, cy) = ((w / 2) as i64, (h / 2) as i64);
    let mut values = image.pixels.clone();
    let mut alive = vec![true; w * h];
    let mut lost = Vec::with_capacity(seq.len());
    let mut out = [0i64; 2];
    for map in seq.maps() {
        let mut next_values = vec![WHITE; w * h];
        let mut next_alive = vec![false; w * h];
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                if !alive[i] {
                    continue;
                }
                map.apply_rounded(&[c as i64 - cx, r as i64 - cy], &mut out);
                let (nc, nr) = (out[0] + cx, out[1] + cy);
                if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if !next_alive[j] {
                    next_alive[j] = true;
                    next_values[j] = values[i];
                }
            }
        }
        values = next_values;
        alive = next_alive;
        lost.push(alive.iter().filter(|a| !**a).count() as f64 / (w * h) as f64);
    }
    Ok((Raster::new(w, h, values)?, lost))
}

pub fn degrade_image(image: &Raster, seq: &DiscretizedSequence) -> Result<Raster> {
    Ok(degrade_trace(image, seq)?.0)
}
