//! Fixed-step RK4 integration of a single-jump GKSL equation
//!
//! `dρ/dt = -i[H, ρ] + γ (2 σ⁻ ρ σ⁺ - {σ⁺σ⁻, ρ})`
//!
//! with `σ⁻ = |0><1|` acting on one site (`|1>` is the excited state). Under
//! this generator the site's excited population decays at rate `2γ` and its
//! coherence `<σ⁺>` at rate `γ` when `H` does not move excitations.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracles::diag::dense_matrix;
use crate::pauli::PauliSum;

type CMat = DMatrix<Complex64>;

/// Inputs of a Lindblad run. The decay rate is taken directly; its relation
/// to a microscopic system-bath coupling is not modelled.
#[derive(Debug, Clone)]
pub struct LindbladSpec {
    pub hamiltonian: PauliSum,
    pub jump_site: usize,
    pub gamma: f64,
    pub rho0: CMat,
}

impl LindbladSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.hamiltonian.n_qubits();
        let dim = 1usize << n;
        if self.jump_site >= n {
            return Err(Error::QubitOutOfRange {
                index: self.jump_site,
                n_qubits: n,
            });
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("decay rate {} < 0", self.gamma)));
        }
        if self.rho0.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "initial density matrix {:?} for {n} qubits",
                self.rho0.shape()
            )));
        }
        if (&self.rho0 - self.rho0.adjoint()).iter().any(|c| c.norm() > 1e-10) {
            return Err(Error::InvalidArgument("initial density matrix not Hermitian".into()));
        }
        if (self.rho0.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument("initial density matrix trace != 1".into()));
        }
        if min_eigenvalue(&self.rho0) < -1e-10 {
            return Err(Error::InvalidArgument(
                "initial density matrix is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }
}

/// `(t, ρ(t))` samples, one per integration step including `t = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, CMat)>,
}

/// Pure state `|ψ><ψ|` from amplitudes.
pub fn pure_density(amps: &[Complex64]) -> CMat {
    let dim = amps.len();
    CMat::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj())
}

pub fn lowering_operator(n_qubits: usize, site: usize) -> CMat {
    let dim = 1usize << n_qubits;
    let bit = 1usize << site;
    let mut m = CMat::zeros(dim, dim);
    for col in (0..dim).filter(|c| c & bit != 0) {
        m[(col ^ bit, col)] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn min_eigenvalue(rho: &CMat) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

struct Generator {
    h: CMat,
    lower: CMat,
    raise: CMat,
    number: CMat,
    gamma: f64,
}

impl Generator {
    fn rhs(&self, rho: &CMat) -> CMat {
        let mi = Complex64::new(0.0, -1.0);
        let comm = (&self.h * rho - rho * &self.h) * mi;
        if self.gamma == 0.0 {
            return comm;
        }
        let jump = &self.lower * rho * &self.raise * Complex64::new(2.0, 0.0);
        let anti = &self.number * rho + rho * &self.number;
        comm + (jump - anti) * Complex64::new(self.gamma, 0.0)
    }
}

/// Integrates from `t = 0` to `t_final` with fixed step `dt`.
///
/// Requires `dt <= 0.01 / max(γ, Σ|h_k|)`. Each step is re-symmetrized to
/// keep `ρ` Hermitian; a trace drift above `1e-6` aborts the run.
pub fn lindblad_evolve(spec: &LindbladSpec, dt: f64, t_final: f64) -> Result<Trajectory> {
    spec.validate()?;
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_final >= 0, got dt={dt} t_final={t_final}"
        )));
    }
    let scale = spec.gamma.max(spec.hamiltonian.coefficient_norm());
    if scale > 0.0 && dt > 0.01 / scale * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "dt={dt} exceeds the RK4 stability limit {}",
            0.01 / scale
        )));
    }
    let n = spec.hamiltonian.n_qubits();
    let lower = lowering_operator(n, spec.jump_site);
    let raise = lower.adjoint();
    let gen = Generator {
        h: dense_matrix(&spec.hamiltonian)?,
        number: &raise * &lower,
        lower,
        raise,
        gamma: spec.gamma,
    };
    let steps = (t_final / dt).round() as usize;
    let half = Complex64::new(0.5, 0.0);
    let mut rho = spec.rho0.clone();
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push((0.0, rho.clone()));
    for k in 1..=steps {
        let h = Complex64::new(dt, 0.0);
        let k1 = gen.rhs(&rho);
        let k2 = gen.rhs(&(&rho + &k1 * (h * 0.5)));
        let k3 = gen.rhs(&(&rho + &k2 * (h * 0.5)));
        let k4 = gen.rhs(&(&rho + &k3 * h));
        rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
            * (h / 6.0);
        rho = (&rho + rho.adjoint()) * half;
        let t = k as f64 * dt;
        let drift = (rho.trace().re - 1.0).abs();
        if drift > 1e-6 || !drift.is_finite() {
            return Err(Error::Unstable { t, drift });
        }
        samples.push((t, rho.clone()));
    }
    Ok(Trajectory { samples })
}

/// `<σ⁺σ⁻>` at `site`: the excited-state population.
pub fn excited_population(rho: &CMat, site: usize) -> f64 {
    let bit = 1usize << site;
    (0..rho.nrows())
        .filter(|i| i & bit != 0)
        .map(|i| rho[(i, i)].re)
        .sum()
}

/// `|<σ⁺>|` at `site`.
pub fn coherence_magnitude(rho: &CMat, site: usize) -> f64 {
    let bit = 1usize << site;
    // Tr(σ⁺ ρ) = Σ_{k: bit set} ρ[k ^ bit, k]
    (0..rho.nrows())
        .filter(|k| k & bit != 0)
        .map(|k| rho[(k ^ bit, k)])
        .sum::<Complex64>()
        .norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub population: f64,
    pub coherence: f64,
}

/// Least-squares fit of `log y = a - r t` for the population and coherence
/// series at `site`; returns both `r`.
pub fn verify_decay(trajectory: &Trajectory, site: usize) -> Result<DecayRates> {
    if trajectory.samples.len() < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 samples to fit, got {}",
            trajectory.samples.len()
        )));
    }
    let times: Vec<f64> = trajectory.samples.iter().map(|(t, _)| *t).collect();
    let pops: Vec<f64> = trajectory
        .samples
        .iter()
        .map(|(_, r)| excited_population(r, site))
        .collect();
    let cohs: Vec<f64> = trajectory
        .samples
        .iter()
        .map(|(_, r)| coherence_magnitude(r, site))
        .collect();
    Ok(DecayRates {
        population: fit_rate(&times, &pops)?,
        coherence: fit_rate(&times, &cohs)?,
    })
}

fn fit_rate(t: &[f64], y: &[f64]) -> Result<f64> {
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "non-positive value {bad} in exponential fit"
        )));
    }
    let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let lm = logs.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&logs).map(|(a, b)| (a - tm) * (b - lm)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all samples at the same time".into()));
    }
    Ok(-sxy / sxx)
}
