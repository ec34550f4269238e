//! Implicit filtering.
//!
//! Works in unit-box coordinates `u = (x - lo) / (hi - lo)`. At scale
//! `s = 2^-k` (k = 1..=7) it evaluates the central-difference stencil
//! `u ± s e_i` (clipped to the box), forms the stencil gradient and
//! per-coordinate curvature, and takes a projected quasi-Newton step with
//! halving backtracking. The inverse-Hessian model starts from the stencil
//! curvature and is refined by BFGS updates while the scale is unchanged.
//! A stencil failure (no stencil point beats the incumbent) halves the
//! scale.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::optimizer::{Objective, OptFailure, OptTrace, Recorder};

pub const IMFIL_LEVELS: u32 = 7;
pub const MAX_BACKTRACKS: usize = 5;

// Longest first trial step per coordinate, in unit-box lengths.
const MAX_UNIT_STEP: f64 = 0.25;

struct Box01<'b> {
    bounds: &'b [(f64, f64)],
}

impl Box01<'_> {
    fn to_x(&self, u: &DVector<f64>) -> Vec<f64> {
        u.iter()
            .zip(self.bounds)
            .map(|(v, &(lo, hi))| (lo + v * (hi - lo)).clamp(lo, hi))
            .collect()
    }

    fn to_u(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.bounds)
                .map(|(v, &(lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0)),
        )
    }
}

struct Stencil {
    grad: DVector<f64>,
    curvature: Vec<Option<f64>>,
    best: Option<(DVector<f64>, f64)>,
}

enum Flow<T> {
    Continue(T),
    OutOfBudget,
}

/// Minimizes `obj` from `x0` using at most `max_evals` evaluations.
///
/// When `f0` is given it is taken as the known value at `x0` and no
/// evaluation is spent there; otherwise `x0` is evaluated first. `seed`
/// fixes the order in which stencil directions are probed, which matters
/// only when the budget runs out mid-stencil.
pub fn imfil_minimize(
    obj: &mut Objective<'_>,
    x0: &[f64],
    f0: Option<f64>,
    max_evals: usize,
    seed: u64,
) -> Result<OptTrace, OptFailure> {
    let dim = obj.arity();
    if x0.len() != dim {
        return Err(Error::ParamCount {
            expected: dim,
            got: x0.len(),
        }
        .into());
    }
    if let Some((index, (&value, &(lo, hi)))) = x0
        .iter()
        .zip(obj.bounds())
        .enumerate()
        .find(|(_, (v, (lo, hi)))| !(*lo..=*hi).contains(*v))
    {
        return Err(Error::ParamOutOfBounds {
            index,
            value,
            lo,
            hi,
        }
        .into());
    }
    if max_evals < 2 * dim {
        return Err(Error::InsufficientBudget {
            needed: 2 * dim,
            available: max_evals,
        }
        .into());
    }
    let bounds = obj.bounds().to_vec();
    let unit = Box01 { bounds: &bounds };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = Recorder::new(obj, max_evals);

    let mut u = unit.to_u(x0);
    let mut fu = match f0 {
        Some(v) => v,
        None => match rec.eval(x0)? {
            Some(v) => v,
            None => return Ok(rec.trace),
        },
    };

    'levels: for level in 1..=IMFIL_LEVELS {
        let h = 0.5f64.powi(level as i32);
        let mut hinv: Option<DMatrix<f64>> = None;
        let mut last: Option<(DVector<f64>, DVector<f64>)> = None;
        loop {
            let st = match stencil(&mut rec, &unit, &u, fu, h, &mut rng)? {
                Flow::Continue(s) => s,
                Flow::OutOfBudget => break 'levels,
            };
            let improved = st.best.as_ref().is_some_and(|(_, v)| *v < fu);
            if !improved {
                continue 'levels;
            }

            let g = active_gradient(&u, &st.grad);
            // BFGS update from the previous accepted step at this scale.
            if let (Some(h_inv), Some((u_prev, g_prev))) = (hinv.as_mut(), last.as_ref()) {
                let s = &u - u_prev;
                let y = &g - g_prev;
                let sy = s.dot(&y);
                if sy > 1e-12 * s.norm() * y.norm() {
                    bfgs_update(h_inv, &s, &y, sy);
                }
            }
            let h_inv = hinv.get_or_insert_with(|| diagonal_model(&g, &st.curvature, h));
            let dir = -(&*h_inv * &g);

            let mut accepted = None;
            let mut lambda = 1.0;
            for _ in 0..=MAX_BACKTRACKS {
                let trial = (&u + &dir * lambda).map(|v| v.clamp(0.0, 1.0));
                if trial == u {
                    break;
                }
                match rec.eval(&unit.to_x(&trial))? {
                    None => break 'levels,
                    Some(v) if v < fu => {
                        accepted = Some((trial, v));
                        break;
                    }
                    Some(_) => lambda *= 0.5,
                }
            }

            let (best_u, best_f) = st.best.expect("improved");
            match accepted {
                Some((trial, v)) if v <= best_f => {
                    last = Some((u.clone(), g));
                    u = trial;
                    fu = v;
                }
                _ => {
                    // line search lost to the stencil: restart the model there
                    u = best_u;
                    fu = best_f;
                    hinv = None;
                    last = None;
                }
            }
        }
    }
    Ok(rec.trace)
}

fn stencil(
    rec: &mut Recorder<'_, '_>,
    unit: &Box01<'_>,
    u: &DVector<f64>,
    fu: f64,
    h: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Flow<Stencil>, OptFailure> {
    let dim = u.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut plus: Vec<Option<(f64, f64)>> = vec![None; dim];
    let mut minus: Vec<Option<(f64, f64)>> = vec![None; dim];
    let mut best: Option<(DVector<f64>, f64)> = None;
    for &i in &order {
        for sign in [1.0, -1.0] {
            let ui = (u[i] + sign * h).clamp(0.0, 1.0);
            if ui == u[i] {
                continue;
            }
            let mut p = u.clone();
            p[i] = ui;
            let Some(v) = rec.eval(&unit.to_x(&p))? else {
                return Ok(Flow::OutOfBudget);
            };
            let slot = if sign > 0.0 { &mut plus[i] } else { &mut minus[i] };
            *slot = Some((ui, v));
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((p, v));
            }
        }
    }
    let mut grad = DVector::zeros(dim);
    let mut curvature = vec![None; dim];
    for i in 0..dim {
        match (plus[i], minus[i]) {
            (Some((up, fp)), Some((um, fm))) => {
                grad[i] = (fp - fm) / (up - um);
                let (hp, hm) = (up - u[i], u[i] - um);
                // three-point second difference on a possibly uneven stencil
                curvature[i] = Some(2.0 * (hm * fp + hp * fm - (hp + hm) * fu) / (hp * hm * (hp + hm)));
            }
            (Some((up, fp)), None) => grad[i] = (fp - fu) / (up - u[i]),
            (None, Some((um, fm))) => grad[i] = (fu - fm) / (u[i] - um),
            (None, None) => {}
        }
    }
    Ok(Flow::Continue(Stencil {
        grad,
        curvature,
        best,
    }))
}

/// Zeroes gradient components that would push through an active bound.
fn active_gradient(u: &DVector<f64>, g: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        u.len(),
        u.iter().zip(g.iter()).map(|(&ui, &gi)| {
            if (ui <= 0.0 && gi > 0.0) || (ui >= 1.0 && gi < 0.0) {
                0.0
            } else {
                gi
            }
        }),
    )
}

fn diagonal_model(g: &DVector<f64>, curvature: &[Option<f64>], h: f64) -> DMatrix<f64> {
    let dim = g.len();
    let cap = MAX_UNIT_STEP.max(2.0 * h);
    DMatrix::from_fn(dim, dim, |i, j| {
        if i != j {
            return 0.0;
        }
        let floor = g[i].abs() / cap;
        let c = curvature[i].unwrap_or(0.0).max(floor);
        if c > 0.0 {
            1.0 / c
        } else {
            0.0
        }
    })
}

fn bfgs_update(h: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>, sy: f64) {
    let rho = 1.0 / sy;
    let hy = &*h * y;
    let yhy = y.dot(&hy);
    // H+ = H - rho (s hyᵀ + hy sᵀ) + (rho² yᵀHy + rho) s sᵀ
    let update = -(s * hy.transpose() + &hy * s.transpose()) * rho
        + (s * s.transpose()) * (rho * rho * yhy + rho);
    *h += update;
}
