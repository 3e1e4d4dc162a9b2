use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::image::GridImage;
use crate::error::Result;

/// Pixels with `|u|` below this are never part of a level set, so a
/// numerically zero image has no components.
pub const ZERO_LEVEL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub row_min: usize,
    pub row_max: usize,
    pub col_min: usize,
    pub col_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Area in squared length units.
    pub area: f64,
    pub pixel_count: usize,
    pub mean_amplitude: f64,
    pub sign: i8,
    pub bounding_box: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStructure {
    pub component_count: usize,
    pub threshold: f64,
    pub components: Vec<Component>,
}

impl LevelStructure {
    pub fn signs(&self) -> Vec<i8> {
        self.components.iter().map(|c| c.sign).collect()
    }

    /// Components holding at least `fraction` of the largest area.
    pub fn significant(&self, fraction: f64) -> Vec<&Component> {
        let top = self.components.first().map_or(0.0, |c| c.area);
        self.components.iter().filter(|c| c.area >= fraction * top).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "index,sign,area,pixel_count,mean_amplitude,row_min,row_max,col_min,col_max"
        )?;
        for (k, c) in self.components.iter().enumerate() {
            let b = c.bounding_box;
            writeln!(
                out,
                "{},{},{:.16e},{},{:.16e},{},{},{},{}",
                k, c.sign, c.area, c.pixel_count, c.mean_amplitude, b.row_min, b.row_max, b.col_min, b.col_max
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("level structure serializes")
    }
}

/// 4-connected components of `{|u| >= threshold_fraction * max|u|}`, with
/// positive and negative pixels labeled separately. Sorted by area, largest
/// first; ties broken by bounding-box position.
pub fn level_structure(u: &GridImage, threshold_fraction: f64) -> LevelStructure {
    let (rows, cols) = (u.rows(), u.cols());
    let threshold = (threshold_fraction * u.max_abs()).max(ZERO_LEVEL);
    let sign_of = |k: usize| -> i8 {
        let v = u.data()[k];
        if v >= threshold {
            1
        } else if v <= -threshold {
            -1
        } else {
            0
        }
    };
    let mut seen = vec![false; rows * cols];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    let cell = u.pixel_size() * u.pixel_size();
    for start in 0..rows * cols {
        let sign = sign_of(start);
        if sign == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut count, mut sum) = (0usize, 0.0);
        let mut bb = BoundingBox {
            row_min: usize::MAX,
            row_max: 0,
            col_min: usize::MAX,
            col_max: 0,
        };
        while let Some(k) = stack.pop() {
            let (i, j) = (k / cols, k % cols);
            count += 1;
            sum += u.data()[k];
            bb.row_min = bb.row_min.min(i);
            bb.row_max = bb.row_max.max(i);
            bb.col_min = bb.col_min.min(j);
            bb.col_max = bb.col_max.max(j);
            let mut visit = |nk: usize| {
                if !seen[nk] && sign_of(nk) == sign {
                    seen[nk] = true;
                    stack.push(nk);
                }
            };
            if i > 0 {
                visit(k - cols);
            }
            if i + 1 < rows {
                visit(k + cols);
            }
            if j > 0 {
                visit(k - 1);
            }
            if j + 1 < cols {
                visit(k + 1);
            }
        }
        components.push(Component {
            area: count as f64 * cell,
            pixel_count: count,
            mean_amplitude: sum / count as f64,
            sign,
            bounding_box: bb,
        });
    }
    components.sort_by(|a, b| {
        b.pixel_count
            .cmp(&a.pixel_count)
            .then(a.bounding_box.row_min.cmp(&b.bounding_box.row_min))
            .then(a.bounding_box.col_min.cmp(&b.bounding_box.col_min))
    });
    LevelStructure {
        component_count: components.len(),
        threshold,
        components,
    }
}
