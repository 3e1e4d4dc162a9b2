use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::image::{check_dims, GridImage};
use crate::error::{Error, Result};

/// How a coarse observation pixel is read from the blurred fine image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsampling {
    /// Value at the fine pixel nearest the coarse cell center.
    #[default]
    Point,
    /// Mean over the fine pixels of the coarse cell.
    Average,
}

/// Sparse 1D operator: blur with reflection at the ends, then subsample.
#[derive(Debug, Clone)]
struct SampledBlur {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SampledBlur {
    fn new(fine: usize, factor: usize, sigma_px: f64, mode: Subsampling) -> Self {
        let radius = (4.0 * sigma_px).ceil() as isize;
        let mut taps: Vec<f64> = (-radius..=radius)
            .map(|o| (-((o * o) as f64) / (2.0 * sigma_px * sigma_px)).exp())
            .collect();
        let total: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= total);

        let blur_row = |i: usize| {
            let mut row = vec![0.0; fine];
            for (t, o) in taps.iter().zip(-radius..=radius) {
                row[reflect(i as isize + o, fine)] += t;
            }
            row
        };
        let coarse = fine / factor;
        let rows = (0..coarse)
            .map(|c| {
                let dense = match mode {
                    Subsampling::Point => blur_row(c * factor + factor / 2),
                    Subsampling::Average => {
                        let mut acc = vec![0.0; fine];
                        for i in c * factor..(c + 1) * factor {
                            for (a, b) in acc.iter_mut().zip(blur_row(i)) {
                                *a += b / factor as f64;
                            }
                        }
                        acc
                    }
                };
                dense.into_iter().enumerate().filter(|(_, w)| *w != 0.0).collect()
            })
            .collect();
        Self { rows }
    }
}

fn reflect(mut k: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if k < 0 {
            k = -k - 1;
        } else if k >= n {
            k = 2 * n - k - 1;
        } else {
            return k as usize;
        }
    }
}

/// Separable Gaussian blur (truncated at 4 sigma, unit sum, reflecting
/// boundary) followed by stride-`factor` subsampling.
#[derive(Debug, Clone)]
pub struct ForwardBlurSubsample {
    sigma_blur: f64,
    factor: usize,
    obs_rows: usize,
    obs_cols: usize,
    pixel_size: f64,
    mode: Subsampling,
    along_rows: SampledBlur,
    along_cols: SampledBlur,
}

impl ForwardBlurSubsample {
    /// `sigma_blur` is in image length units; the fine grid has
    /// `factor * obs_rows` by `factor * obs_cols` pixels of side `pixel_size`.
    pub fn new(
        sigma_blur: f64,
        factor: usize,
        obs_rows: usize,
        obs_cols: usize,
        pixel_size: f64,
        mode: Subsampling,
    ) -> Result<Self> {
        if !(sigma_blur > 0.0 && sigma_blur.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "blur width must be positive, got {sigma_blur}"
            )));
        }
        if factor == 0 {
            return Err(Error::InvalidInput("subsampling factor must be positive".into()));
        }
        check_dims(obs_rows, obs_cols, pixel_size)?;
        let sigma_px = sigma_blur / pixel_size;
        Ok(Self {
            sigma_blur,
            factor,
            obs_rows,
            obs_cols,
            pixel_size,
            mode,
            along_rows: SampledBlur::new(obs_rows * factor, factor, sigma_px, mode),
            along_cols: SampledBlur::new(obs_cols * factor, factor, sigma_px, mode),
        })
    }

    pub fn sigma_blur(&self) -> f64 {
        self.sigma_blur
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn mode(&self) -> Subsampling {
        self.mode
    }

    pub fn fine_dims(&self) -> (usize, usize) {
        (self.obs_rows * self.factor, self.obs_cols * self.factor)
    }

    pub fn obs_dims(&self) -> (usize, usize) {
        (self.obs_rows, self.obs_cols)
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    fn check_fine(&self, u: &GridImage) -> Result<()> {
        let (r, c) = self.fine_dims();
        if u.rows() != r || u.cols() != c {
            return Err(Error::dims(format!("{r}x{c}"), format!("{}x{}", u.rows(), u.cols())));
        }
        Ok(())
    }

    fn check_obs(&self, y: &GridImage) -> Result<()> {
        if y.rows() != self.obs_rows || y.cols() != self.obs_cols {
            return Err(Error::dims(
                format!("{}x{}", self.obs_rows, self.obs_cols),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        Ok(())
    }

    pub fn forward(&self, u: &GridImage) -> Result<GridImage> {
        self.check_fine(u)?;
        Ok(self.apply(u.data()))
    }

    pub fn adjoint(&self, y: &GridImage) -> Result<GridImage> {
        self.check_obs(y)?;
        Ok(self.apply_adjoint(y.data()))
    }

    pub(crate) fn apply(&self, u: &[f64]) -> GridImage {
        let (fr, fc) = self.fine_dims();
        let (or, oc) = (self.obs_rows, self.obs_cols);
        let mut tmp = vec![0.0; fr * oc];
        for i in 0..fr {
            let src = &u[i * fc..(i + 1) * fc];
            for (jc, row) in self.along_cols.rows.iter().enumerate() {
                tmp[i * oc + jc] = row.iter().map(|&(k, w)| w * src[k]).sum();
            }
        }
        let mut out = vec![0.0; or * oc];
        for (ic, row) in self.along_rows.rows.iter().enumerate() {
            let dst = &mut out[ic * oc..(ic + 1) * oc];
            for &(k, w) in row {
                for (d, s) in dst.iter_mut().zip(&tmp[k * oc..(k + 1) * oc]) {
                    *d += w * s;
                }
            }
        }
        GridImage::from_raw(or, oc, self.pixel_size * self.factor as f64, out)
    }

    pub(crate) fn apply_adjoint(&self, y: &[f64]) -> GridImage {
        let (fr, fc) = self.fine_dims();
        let oc = self.obs_cols;
        let mut tmp = vec![0.0; fr * oc];
        for (ic, row) in self.along_rows.rows.iter().enumerate() {
            let src = &y[ic * oc..(ic + 1) * oc];
            for &(k, w) in row {
                for (d, s) in tmp[k * oc..(k + 1) * oc].iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
        let mut out = vec![0.0; fr * fc];
        for i in 0..fr {
            let dst = &mut out[i * fc..(i + 1) * fc];
            for (jc, row) in self.along_cols.rows.iter().enumerate() {
                let v = tmp[i * oc + jc];
                for &(k, w) in row {
                    dst[k] += w * v;
                }
            }
        }
        GridImage::from_raw(fr, fc, self.pixel_size, out)
    }
}

/// `y + w` with `w` i.i.d. normal of standard deviation `std`, seeded.
pub fn add_gaussian_noise(y: &GridImage, std: f64, seed: u64) -> Result<GridImage> {
    if !(std >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise level must be nonnegative, got {std}"
        )));
    }
    if std == 0.0 {
        return Ok(y.clone());
    }
    let normal = Normal::new(0.0, std).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = y.data().iter().map(|v| v + normal.sample(&mut rng)).collect();
    GridImage::new(y.rows(), y.cols(), y.pixel_size(), data)
}
