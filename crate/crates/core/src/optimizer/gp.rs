//! Squared-exponential Gaussian-process regression.
//!
//! Inputs are mapped to the unit box using the objective bounds and targets
//! are standardized before fitting. Hyperparameters (length scale, signal
//! variance) are picked from a fixed 8x8 log-spaced grid by maximizing the
//! log marginal likelihood.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optimizer::search::latin_hypercube_unit;

/// Minimum noise variance added to the kernel diagonal (standardized units).
pub const NOISE_FLOOR: f64 = 1e-8;

const GRID: usize = 8;
const LENGTH_RANGE: (f64, f64) = (0.05, 5.0);
const SIGNAL_RANGE: (f64, f64) = (0.1, 10.0);
const INFLATED_NOISE: f64 = 1e-4;

fn log_grid((lo, hi): (f64, f64)) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..GRID).map(move |k| (a + (b - a) * k as f64 / (GRID - 1) as f64).exp())
}

#[derive(Debug, Clone)]
pub struct GpModel {
    bounds: Vec<(f64, f64)>,
    unit_inputs: Vec<DVector<f64>>,
    y_mean: f64,
    y_scale: f64,
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    pub log_marginal_likelihood: f64,
}

fn to_unit(x: &[f64], bounds: &[(f64, f64)]) -> DVector<f64> {
    DVector::from_iterator(
        x.len(),
        x.iter().zip(bounds).map(|(v, (lo, hi))| (v - lo) / (hi - lo)),
    )
}

fn from_unit(u: &DVector<f64>, bounds: &[(f64, f64)]) -> Vec<f64> {
    u.iter()
        .zip(bounds)
        .map(|(v, (lo, hi))| (lo + v * (hi - lo)).clamp(*lo, *hi))
        .collect()
}

fn kernel(a: &DVector<f64>, b: &DVector<f64>, length: f64, signal: f64) -> f64 {
    signal * (-(a - b).norm_squared() / (2.0 * length * length)).exp()
}

struct Candidate {
    lml: f64,
    length: f64,
    signal: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

fn try_fit(xs: &[DVector<f64>], y: &DVector<f64>, length: f64, signal: f64, noise: f64) -> Option<Candidate> {
    let n = xs.len();
    let k = DMatrix::from_fn(n, n, |i, j| {
        kernel(&xs[i], &xs[j], length, signal) + if i == j { noise } else { 0.0 }
    });
    let chol = k.cholesky()?;
    let alpha = chol.solve(y);
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    let lml = -0.5 * y.dot(&alpha) - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    lml.is_finite().then_some(Candidate {
        lml,
        length,
        signal,
        chol,
        alpha,
    })
}

/// Fits a GP to `(inputs, values)` inside `bounds`. `noise_floor` is in
/// standardized target units and is raised to at least [`NOISE_FLOOR`].
///
/// If no grid point yields a positive-definite kernel the noise is inflated
/// once; a second failure is [`Error::SingularKernel`].
pub fn gp_fit(
    inputs: &[Vec<f64>],
    values: &[f64],
    bounds: &[(f64, f64)],
    noise_floor: f64,
) -> Result<GpModel> {
    if inputs.len() < 2 || inputs.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "GP fit needs >= 2 matching points, got {} inputs / {} values",
            inputs.len(),
            values.len()
        )));
    }
    for x in inputs {
        if x.len() != bounds.len() {
            return Err(Error::Dimension(format!(
                "input of length {} for {} bounds",
                x.len(),
                bounds.len()
            )));
        }
        if x.iter().zip(bounds).any(|(v, (lo, hi))| v < lo || v > hi) {
            return Err(Error::InvalidArgument("GP training input outside bounds".into()));
        }
    }
    let n = values.len() as f64;
    let y_mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n;
    let y_scale = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    let y = DVector::from_iterator(values.len(), values.iter().map(|v| (v - y_mean) / y_scale));
    let xs: Vec<DVector<f64>> = inputs.iter().map(|x| to_unit(x, bounds)).collect();

    let mut noise = noise_floor.max(NOISE_FLOOR);
    for attempt in 0..2 {
        let best = log_grid(LENGTH_RANGE)
            .flat_map(|l| log_grid(SIGNAL_RANGE).map(move |s| (l, s)))
            .filter_map(|(l, s)| try_fit(&xs, &y, l, s, noise))
            .fold(None::<Candidate>, |acc, c| match acc {
                Some(b) if b.lml >= c.lml => Some(b),
                _ => Some(c),
            });
        if let Some(c) = best {
            return Ok(GpModel {
                bounds: bounds.to_vec(),
                unit_inputs: xs,
                y_mean,
                y_scale,
                length_scale: c.length,
                signal_variance: c.signal,
                noise,
                chol: c.chol,
                alpha: c.alpha,
                log_marginal_likelihood: c.lml,
            });
        }
        if attempt == 0 {
            noise = noise.max(INFLATED_NOISE);
        }
    }
    Err(Error::SingularKernel)
}

impl GpModel {
    pub fn n_points(&self) -> usize {
        self.unit_inputs.len()
    }

    fn k_star(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.unit_inputs.len(),
            self.unit_inputs
                .iter()
                .map(|xi| kernel(u, xi, self.length_scale, self.signal_variance)),
        )
    }

    fn mean_unit(&self, u: &DVector<f64>) -> f64 {
        self.y_mean + self.y_scale * self.k_star(u).dot(&self.alpha)
    }

    /// Posterior mean and variance of the latent function at `x`, in the
    /// objective's units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let u = to_unit(x, &self.bounds);
        let ks = self.k_star(&u);
        let mean = self.y_mean + self.y_scale * ks.dot(&self.alpha);
        let v = self.chol.solve(&ks);
        let var = (self.signal_variance - ks.dot(&v)).max(0.0);
        (mean, var * self.y_scale * self.y_scale)
    }

    fn mean_gradient_unit(&self, u: &DVector<f64>) -> DVector<f64> {
        let l2 = self.length_scale * self.length_scale;
        let mut g = DVector::zeros(u.len());
        for (xi, a) in self.unit_inputs.iter().zip(self.alpha.iter()) {
            let k = kernel(u, xi, self.length_scale, self.signal_variance);
            g += (xi - u) * (a * k / l2);
        }
        g * self.y_scale
    }

    /// Minimizes the posterior mean with projected steepest descent from
    /// several starts (the best training points plus Latin-hypercube
    /// samples). Returns local minimizers sorted by predicted mean.
    pub fn minimize_mean(&self, n_random_starts: usize, seed: u64) -> Vec<(Vec<f64>, f64)> {
        let dim = self.bounds.len();
        let mut order: Vec<usize> = (0..self.unit_inputs.len()).collect();
        let train_means: Vec<f64> = self.unit_inputs.iter().map(|u| self.mean_unit(u)).collect();
        order.sort_by(|&a, &b| train_means[a].total_cmp(&train_means[b]));
        let mut starts: Vec<DVector<f64>> = order
            .iter()
            .take(3)
            .map(|&i| self.unit_inputs[i].clone())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        starts.extend(
            latin_hypercube_unit(n_random_starts, dim, &mut rng)
                .into_iter()
                .map(DVector::from_vec),
        );
        let mut results: Vec<(Vec<f64>, f64)> = starts
            .into_iter()
            .map(|s| {
                let (u, m) = self.descend(s);
                (from_unit(&u, &self.bounds), m)
            })
            .collect();
        results.sort_by(|a, b| a.1.total_cmp(&b.1));
        results
    }

    fn descend(&self, mut u: DVector<f64>) -> (DVector<f64>, f64) {
        let mut f = self.mean_unit(&u);
        let mut step = 0.1;
        for _ in 0..200 {
            let g = self.mean_gradient_unit(&u);
            let gn = g.norm();
            if gn < 1e-12 || step < 1e-7 {
                break;
            }
            let trial = (&u - &g * (step / gn)).map(|v| v.clamp(0.0, 1.0));
            let ft = self.mean_unit(&trial);
            if ft < f {
                u = trial;
                f = ft;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        (u, f)
    }
}
