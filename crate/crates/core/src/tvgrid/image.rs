use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major image on a regular grid of square pixels.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct GridImage {
    rows: usize,
    cols: usize,
    pixel_size: f64,
    data: Vec<f64>,
}

impl GridImage {
    pub fn new(rows: usize, cols: usize, pixel_size: f64, data: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols, pixel_size)?;
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("image values must be finite".into()));
        }
        Ok(Self {
            rows,
            cols,
            pixel_size,
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize, pixel_size: f64) -> Result<Self> {
        check_dims(rows, cols, pixel_size)?;
        Ok(Self {
            rows,
            cols,
            pixel_size,
            data: vec![0.0; rows * cols],
        })
    }

    /// Fills pixel `(i, j)` with `f(x, y)` at its center, in coordinates
    /// centered on the image (`x` along columns, `y` along rows).
    pub fn from_fn(rows: usize, cols: usize, pixel_size: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut img = Self::zeros(rows, cols, pixel_size)?;
        for i in 0..rows {
            for j in 0..cols {
                let (x, y) = img.center(i, j);
                img.data[i * cols + j] = f(x, y);
            }
        }
        if img.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("image values must be finite".into()));
        }
        Ok(img)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, pixel_size: f64, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            pixel_size,
            data,
        }
    }

    /// Center of pixel `(i, j)` relative to the image center.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.pixel_size;
        (
            (j as f64 + 0.5 - 0.5 * self.cols as f64) * h,
            (i as f64 + 0.5 - 0.5 * self.rows as f64) * h,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// Header line `P_GRID rows cols pixel_size`, then little-endian f64 data.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "P_GRID {} {} {:?}", self.rows, self.cols, self.pixel_size)?;
        let mut buf = Vec::with_capacity(8 * self.data.len());
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("P_GRID") {
            return Err(Error::Format("missing P_GRID header".into()));
        }
        let mut field = |name: &str| {
            parts
                .next()
                .ok_or_else(|| Error::Format(format!("header lacks {name}")))
                .map(str::to_owned)
        };
        let rows: usize = field("rows")?.parse().map_err(|_| Error::Format("bad rows".into()))?;
        let cols: usize = field("cols")?.parse().map_err(|_| Error::Format("bad cols".into()))?;
        let pixel_size: f64 = field("pixel_size")?
            .parse()
            .map_err(|_| Error::Format("bad pixel size".into()))?;
        check_dims(rows, cols, pixel_size)?;
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * rows * cols {
            return Err(Error::Format(format!(
                "expected {} data bytes, found {}",
                8 * rows * cols,
                bytes.len()
            )));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Self::new(rows, cols, pixel_size, data)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

impl std::fmt::Debug for GridImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridImage")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("pixel_size", &self.pixel_size)
            .field("max_abs", &self.max_abs())
            .finish_non_exhaustive()
    }
}

pub(crate) fn check_dims(rows: usize, cols: usize, pixel_size: f64) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidDims(format!("{rows}x{cols}")));
    }
    if !(pixel_size > 0.0 && pixel_size.is_finite()) {
        return Err(Error::InvalidDims(format!("pixel size {pixel_size}")));
    }
    Ok(())
}
