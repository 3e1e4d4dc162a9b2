use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::diff::{dot, grad, grad_adjoint, GradField, PoissonSolver};
use super::forward::ForwardBlurSubsample;
use super::gnorm::{discrete_gnorm, GnormParams};
use super::image::GridImage;
use crate::error::{Error, Result};

/// Iterations discarded before the running average starts.
pub const AVERAGE_BURN_IN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    pub max_iter: usize,
    /// Bound on `(primal - dual) / (1 + |primal|)`.
    pub gap_tol: f64,
    /// Iterations between duality-gap evaluations.
    pub check_every: usize,
    pub power_iterations: usize,
    /// Keep a running average of the iterates and record its objective.
    pub track_average: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            gap_tol: 1e-6,
            check_every: 50,
            power_iterations: 60,
            track_average: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub normalized_gap: f64,
    /// Objective at the running average, when tracked and past the burn-in.
    pub averaged_primal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub u: GridImage,
    /// Observation-shaped dual variable with `forward(u) ~ y - lambda * dual_p`.
    pub dual_p: GridImage,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub history: Vec<GapRecord>,
}

impl SolveResult {
    pub fn normalized_gap(&self) -> f64 {
        self.gap / (1.0 + self.primal_value.abs())
    }
}

struct Problem<'a> {
    op: &'a ForwardBlurSubsample,
    y: &'a GridImage,
    rows: usize,
    cols: usize,
    /// TV weight per unscaled node magnitude, `lambda * pixel_size`.
    mu: f64,
}

impl Problem<'_> {
    fn primal(&self, u: &[f64], g: &mut GradField) -> f64 {
        let au = self.op.apply(u);
        let fit: f64 = au
            .data()
            .iter()
            .zip(self.y.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        grad(u, self.rows, self.cols, g);
        0.5 * fit + self.mu * g.l1()
    }
}

/// Dual lower bound from a pair `(q, p)` made exactly feasible by a
/// Poisson correction of `p` and a common rescaling.
struct DualCertifier {
    poisson: PoissonSolver,
    w: Vec<f64>,
    grad_buf: GradField,
}

impl DualCertifier {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            poisson: PoissonSolver::new(rows, cols),
            w: vec![0.0; rows * cols],
            grad_buf: GradField::zeros(rows, cols),
        }
    }

    fn value(&mut self, pb: &Problem, q: &[f64], p: &GradField, u: &[f64]) -> f64 {
        let (rows, cols) = (pb.rows, pb.cols);
        let atq = pb.op.apply_adjoint(q);
        let mut divp = vec![0.0; rows * cols];
        grad_adjoint(p, &mut divp);
        let rhs: Vec<f64> = atq.data().iter().zip(&divp).map(|(a, d)| -(a + d)).collect();
        let residual = self.poisson.solve(&rhs, &mut self.w);
        grad(&self.w, rows, cols, &mut self.grad_buf);
        let mut pp = p.clone();
        pp.axpy(1.0, &self.grad_buf);
        let m = pp.max_magnitude();
        let s = if m > pb.mu { pb.mu / m } else { 1.0 };
        let yq = dot(pb.y.data(), q);
        let qq = dot(q, q);
        // the rounding residual leaves a small equality violation; charge it
        // against the current iterate
        let unorm = dot(u, u).sqrt();
        -s * yq - 0.5 * s * s * qq - s * residual * unorm
    }
}

/// Minimizes `0.5 * |forward(u) - y|^2 + lambda * TV_h(u)`, with
/// `TV_h(u) = h * sum |grad u|` over zero-extended forward differences.
pub fn solve_tv(op: &ForwardBlurSubsample, y: &GridImage, lambda: f64, params: &SolveParams) -> Result<SolveResult> {
    if y.rows() != op.obs_dims().0 || y.cols() != op.obs_dims().1 {
        return Err(Error::dims(
            format!("{}x{}", op.obs_dims().0, op.obs_dims().1),
            format!("{}x{}", y.rows(), y.cols()),
        ));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    if params.check_every == 0 || params.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter and check_every must be positive".into()));
    }
    let (rows, cols) = op.fine_dims();
    let h = op.pixel_size();
    let pb = Problem {
        op,
        y,
        rows,
        cols,
        mu: lambda * h,
    };
    let n = rows * cols;
    let m = y.data().len();

    let norm = composite_norm(op, params.power_iterations) * 1.05;
    let (tau, sigma) = (1.0 / norm, 1.0 / norm);

    let mut u = vec![0.0; n];
    let mut u_bar = vec![0.0; n];
    let mut q = vec![0.0; m];
    let mut p = GradField::zeros(rows, cols);
    let mut g = GradField::zeros(rows, cols);
    let mut divp = vec![0.0; n];
    let mut avg = vec![0.0; n];
    let mut avg_count = 0usize;
    let mut certifier = DualCertifier::new(rows, cols);
    let mut history = Vec::new();
    let mut best_dual = f64::NEG_INFINITY;
    let mut best_q = vec![0.0; m];
    let mut last = (f64::INFINITY, f64::NEG_INFINITY);
    // the zero image competes as a primal candidate, so problems whose
    // solution is exactly zero return it instead of a small residual iterate
    let zero_primal = 0.5 * dot(y.data(), y.data());
    let mut zero_wins = false;

    for it in 1..=params.max_iter {
        let au = op.apply(&u_bar);
        for ((qk, a), yk) in q.iter_mut().zip(au.data()).zip(y.data()) {
            *qk = (*qk + sigma * (a - yk)) / (1.0 + sigma);
        }
        grad(&u_bar, rows, cols, &mut g);
        p.axpy(sigma, &g);
        p.project(pb.mu);
        let atq = op.apply_adjoint(&q);
        grad_adjoint(&p, &mut divp);
        for k in 0..n {
            let next = u[k] - tau * (atq.data()[k] + divp[k]);
            u_bar[k] = 2.0 * next - u[k];
            u[k] = next;
        }
        if params.track_average && it > AVERAGE_BURN_IN {
            avg_count += 1;
            let w = 1.0 / avg_count as f64;
            for (a, v) in avg.iter_mut().zip(&u) {
                *a += w * (v - *a);
            }
        }

        if it % params.check_every == 0 || it == params.max_iter {
            let primal_u = pb.primal(&u, &mut g);
            zero_wins = zero_primal <= primal_u;
            let primal = primal_u.min(zero_primal);
            let residual: Vec<f64> = op.apply(&u).data().iter().zip(y.data()).map(|(a, b)| a - b).collect();
            for cand in [&q, &residual] {
                let d = certifier.value(&pb, cand, &p, &u);
                if d > best_dual {
                    best_dual = d;
                    best_q.copy_from_slice(cand);
                }
            }
            let normalized_gap = (primal - best_dual) / (1.0 + primal.abs());
            let averaged_primal = (avg_count > 0).then(|| pb.primal(&avg, &mut g));
            history.push(GapRecord {
                iteration: it,
                primal,
                dual: best_dual,
                normalized_gap,
                averaged_primal,
            });
            last = (primal, best_dual);
            if normalized_gap <= params.gap_tol {
                if zero_wins {
                    u.iter_mut().for_each(|v| *v = 0.0);
                }
                return Ok(finish(&pb, u, &best_q, lambda, primal, best_dual, it, history));
            }
        }
    }
    let (primal, dual) = last;
    if zero_wins {
        u.iter_mut().for_each(|v| *v = 0.0);
    }
    let result = finish(&pb, u, &best_q, lambda, primal, dual, params.max_iter, history);
    Err(Error::NotConverged {
        gap: result.normalized_gap(),
        iterations: params.max_iter,
        last: Some(Box::new(result)),
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    pb: &Problem,
    u: Vec<f64>,
    q: &[f64],
    lambda: f64,
    primal: f64,
    dual: f64,
    iterations: usize,
    history: Vec<GapRecord>,
) -> SolveResult {
    let (orows, ocols) = (pb.y.rows(), pb.y.cols());
    SolveResult {
        u: GridImage::from_raw(pb.rows, pb.cols, pb.op.pixel_size(), u),
        dual_p: GridImage::from_raw(orows, ocols, pb.y.pixel_size(), q.iter().map(|v| -v / lambda).collect()),
        primal_value: primal,
        dual_value: dual,
        gap: primal - dual,
        iterations,
        history,
    }
}

/// Power-iteration estimate of the norm of `u -> (forward(u), grad(u))`.
pub fn composite_norm(op: &ForwardBlurSubsample, iterations: usize) -> f64 {
    let (rows, cols) = op.fine_dims();
    let n = rows * cols;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut g = GradField::zeros(rows, cols);
    let mut lap = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let nv = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let ata = op.apply_adjoint(op.apply(&v).data());
        grad(&v, rows, cols, &mut g);
        grad_adjoint(&g, &mut lap);
        let w: Vec<f64> = ata.data().iter().zip(&lap).map(|(a, b)| a + b).collect();
        estimate = dot(&v, &w);
        v = w;
    }
    estimate.sqrt()
}

/// Smallest `lambda` for which the zero image solves the problem with data `y`.
pub fn lambda_max(op: &ForwardBlurSubsample, y: &GridImage, params: &GnormParams) -> Result<f64> {
    let aty = op.adjoint(y)?;
    let h = op.pixel_size();
    Ok(discrete_gnorm(&aty, params)?.value / (h * h))
}
