//! Derivative-free optimization: Gaussian-process surrogate global search
//! followed by implicit filtering.
//!
//! Every objective evaluation goes through [`Objective::evaluate`] and lands
//! in an [`OptTrace`], so `trace.len()` always equals the number of
//! evaluations an optimizer consumed.

mod gp;
mod imfil;
mod search;

use std::fmt;
use std::fmt::Write as _;

pub use gp::{gp_fit, GpModel, NOISE_FLOOR};
pub use imfil::{imfil_minimize, IMFIL_LEVELS, MAX_BACKTRACKS};
pub use search::{
    global_phase_cost, gp_global_search, initial_sample_count, latin_hypercube,
    surrogate_then_local, GlobalSearchResult, RETRAINING_ROUNDS,
};

use crate::error::{Error, Result};

type ObjectiveFn<'a> = Box<dyn FnMut(&[f64]) -> Result<f64> + 'a>;

/// Bounded black-box objective with an evaluation counter.
pub struct Objective<'a> {
    bounds: Vec<(f64, f64)>,
    func: ObjectiveFn<'a>,
    evals: usize,
    noise_variance: f64,
}

impl<'a> Objective<'a> {
    pub fn new(
        bounds: Vec<(f64, f64)>,
        func: impl FnMut(&[f64]) -> Result<f64> + 'a,
    ) -> Result<Self> {
        for (slot, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBounds { slot, lo, hi });
            }
        }
        Ok(Self {
            bounds,
            func: Box::new(func),
            evals: 0,
            noise_variance: 0.0,
        })
    }

    /// Declares the variance of each evaluation (shot noise); the surrogate
    /// raises its noise floor to match.
    pub fn with_noise_variance(mut self, variance: f64) -> Self {
        self.noise_variance = variance.max(0.0);
        self
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn eval_count(&self) -> usize {
        self.evals
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Evaluates at `x`, which must lie inside the bounds.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.bounds.len() {
            return Err(Error::ParamCount {
                expected: self.bounds.len(),
                got: x.len(),
            });
        }
        for (index, (&value, &(lo, hi))) in x.iter().zip(&self.bounds).enumerate() {
            if !(lo..=hi).contains(&value) {
                return Err(Error::ParamOutOfBounds {
                    index,
                    value,
                    lo,
                    hi,
                });
            }
        }
        self.evals += 1;
        let v = (self.func)(x)?;
        if v.is_nan() {
            return Err(Error::Objective(format!("NaN at {x:?}")));
        }
        Ok(v)
    }
}

impl fmt::Debug for Objective<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("bounds", &self.bounds)
            .field("evals", &self.evals)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub index: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

/// Ordered evaluation history with its running minimum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptTrace {
    pub records: Vec<EvalRecord>,
    pub best_so_far: Vec<f64>,
    /// Set when an optimizer stopped because its evaluation budget ran out.
    pub budget_exhausted: bool,
}

impl OptTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn push(&mut self, params: Vec<f64>, value: f64) {
        let best = self.best_so_far.last().map_or(value, |&b| b.min(value));
        self.records.push(EvalRecord {
            index: self.records.len(),
            params,
            value,
        });
        self.best_so_far.push(best);
    }

    /// Appends `other`, renumbering its records after ours.
    pub fn extend(&mut self, other: OptTrace) {
        for r in other.records {
            self.push(r.params, r.value);
        }
        self.budget_exhausted |= other.budget_exhausted;
    }

    /// Earliest record attaining the minimum value.
    pub fn best(&self) -> Option<&EvalRecord> {
        self.records
            .iter()
            .fold(None, |acc: Option<&EvalRecord>, r| match acc {
                Some(b) if b.value <= r.value => Some(b),
                _ => Some(r),
            })
    }

    /// CSV with columns `eval_index,value,best_so_far,param_0..param_{k-1}`.
    pub fn to_csv(&self) -> String {
        let k = self.records.first().map_or(0, |r| r.params.len());
        let mut out = String::from("eval_index,value,best_so_far");
        for i in 0..k {
            write!(out, ",param_{i}").unwrap();
        }
        out.push('\n');
        for (r, b) in self.records.iter().zip(&self.best_so_far) {
            write!(out, "{},{},{}", r.index, r.value, b).unwrap();
            for p in &r.params {
                write!(out, ",{p}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty trace".into(),
        })?;
        if !header.starts_with("eval_index,value,best_so_far") {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected header {header:?}"),
            });
        }
        let mut trace = OptTrace::default();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let nums: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    line: i + 2,
                    msg: "bad number".into(),
                })?;
            if nums.len() < 3 {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: "too few columns".into(),
                });
            }
            trace.push(nums[3..].to_vec(), nums[1]);
        }
        Ok(trace)
    }
}

/// An optimizer error together with the evaluations completed before it.
#[derive(Debug, Clone)]
pub struct OptFailure {
    pub error: Error,
    pub partial: OptTrace,
}

impl OptFailure {
    pub fn new(error: Error, partial: OptTrace) -> Self {
        Self { error, partial }
    }
}

impl From<Error> for OptFailure {
    fn from(error: Error) -> Self {
        Self::new(error, OptTrace::default())
    }
}

impl From<OptFailure> for Error {
    fn from(f: OptFailure) -> Self {
        f.error
    }
}

impl fmt::Display for OptFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} evaluations)", self.error, self.partial.len())
    }
}

impl std::error::Error for OptFailure {}

/// Objective plus trace plus remaining budget; the single path through which
/// optimizers evaluate.
pub(crate) struct Recorder<'o, 'a> {
    pub obj: &'o mut Objective<'a>,
    pub trace: OptTrace,
    pub remaining: usize,
}

impl<'o, 'a> Recorder<'o, 'a> {
    pub fn new(obj: &'o mut Objective<'a>, budget: usize) -> Self {
        Self {
            obj,
            trace: OptTrace::default(),
            remaining: budget,
        }
    }

    /// `None` when the budget is spent.
    pub fn eval(&mut self, x: &[f64]) -> std::result::Result<Option<f64>, OptFailure> {
        if self.remaining == 0 {
            self.trace.budget_exhausted = true;
            return Ok(None);
        }
        self.remaining -= 1;
        match self.obj.evaluate(x) {
            Ok(v) => {
                self.trace.push(x.to_vec(), v);
                Ok(Some(v))
            }
            Err(e) => Err(OptFailure::new(e, std::mem::take(&mut self.trace))),
        }
    }

    pub fn fail(&mut self, e: Error) -> OptFailure {
        OptFailure::new(e, std::mem::take(&mut self.trace))
    }
}
