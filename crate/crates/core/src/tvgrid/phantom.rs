use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::image::{check_dims, GridImage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhantomKind {
    /// Indicator of the centered disk of the given radius (length units).
    Disk { radius: f64 },
    /// Indicator of `inner <= |x| <= outer`.
    Annulus { inner: f64, outer: f64 },
    /// Three disjoint smooth blobs with amplitudes 1, 2 and -2.
    ThreeShapes,
}

/// Star-shaped blob `|x - c| <= r0 (1 + a2 cos(2t + p2) + a3 cos(3t + p3))`,
/// with lengths as fractions of the shorter image side.
struct Blob {
    center: (f64, f64),
    r0: f64,
    harmonics: [(f64, f64); 2],
    amplitude: f64,
}

const BLOBS: [Blob; 3] = [
    Blob {
        center: (-0.2, -0.18),
        r0: 0.14,
        harmonics: [(0.18, 0.4), (0.07, 1.9)],
        amplitude: 1.0,
    },
    Blob {
        center: (0.2, -0.15),
        r0: 0.12,
        harmonics: [(0.12, 2.3), (0.10, 0.7)],
        amplitude: 2.0,
    },
    Blob {
        center: (0.0, 0.22),
        r0: 0.10,
        harmonics: [(0.15, 1.1), (0.06, 2.8)],
        amplitude: -2.0,
    },
];

impl Blob {
    fn contains(&self, x: f64, y: f64, scale: f64) -> bool {
        let dx = x - self.center.0 * scale;
        let dy = y - self.center.1 * scale;
        let t = dy.atan2(dx);
        let [(a2, p2), (a3, p3)] = self.harmonics;
        let r = self.r0 * scale * (1.0 + a2 * (2.0 * t + p2).cos() + a3 * (3.0 * t + p3).cos());
        dx.hypot(dy) <= r
    }
}

impl PhantomKind {
    pub fn amplitudes(&self) -> Vec<f64> {
        match self {
            PhantomKind::ThreeShapes => BLOBS.iter().map(|b| b.amplitude).collect(),
            _ => vec![1.0],
        }
    }

    /// Exact area (length units squared) of each shape.
    pub fn areas(&self, rows: usize, cols: usize, pixel_size: f64) -> Vec<f64> {
        match *self {
            PhantomKind::Disk { radius } => vec![PI * radius * radius],
            PhantomKind::Annulus { inner, outer } => vec![PI * (outer * outer - inner * inner)],
            PhantomKind::ThreeShapes => {
                let s = rows.min(cols) as f64 * pixel_size;
                BLOBS
                    .iter()
                    .map(|b| {
                        let [(a2, _), (a3, _)] = b.harmonics;
                        // integral of r(t)^2 / 2 over a full turn
                        PI * (b.r0 * s).powi(2) * (1.0 + 0.5 * (a2 * a2 + a3 * a3))
                    })
                    .collect()
            }
        }
    }
}

/// Rasterizes a phantom by pixel-center membership, centered in the image.
pub fn make_phantom(kind: PhantomKind, rows: usize, cols: usize, pixel_size: f64) -> Result<GridImage> {
    check_dims(rows, cols, pixel_size)?;
    let half = 0.5 * rows.min(cols) as f64 * pixel_size;
    match kind {
        PhantomKind::Disk { radius } => {
            if !(radius > 0.0 && radius <= half) {
                return Err(Error::InvalidDims(format!(
                    "disk radius {radius} does not fit half-width {half}"
                )));
            }
            GridImage::from_fn(
                rows,
                cols,
                pixel_size,
                |x, y| if x.hypot(y) <= radius { 1.0 } else { 0.0 },
            )
        }
        PhantomKind::Annulus { inner, outer } => {
            if !(inner >= 0.0 && inner < outer && outer <= half) {
                return Err(Error::InvalidDims(format!(
                    "annulus radii {inner}, {outer} invalid for half-width {half}"
                )));
            }
            GridImage::from_fn(rows, cols, pixel_size, |x, y| {
                let r = x.hypot(y);
                if r >= inner && r <= outer {
                    1.0
                } else {
                    0.0
                }
            })
        }
        PhantomKind::ThreeShapes => {
            if rows.min(cols) < 16 {
                return Err(Error::InvalidDims(format!("{rows}x{cols} too small for three shapes")));
            }
            let scale = 2.0 * half;
            GridImage::from_fn(rows, cols, pixel_size, |x, y| {
                BLOBS
                    .iter()
                    .find(|b| b.contains(x, y, scale))
                    .map_or(0.0, |b| b.amplitude)
            })
        }
    }
}
