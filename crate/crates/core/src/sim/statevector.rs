use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sim::gate::{GateKind, GateOp};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 26;

/// Dense `2^n` amplitude vector. Qubit 0 is the least-significant bit of the
/// basis index; bitstrings are written with qubit 0 first.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Computational basis state with qubits in `ones` set to `|1>`.
    pub fn basis(n_qubits: usize, ones: &[usize]) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{n_qubits} qubits")));
        }
        let mut index = 0usize;
        for &q in ones {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            index |= 1 << q;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the vector must have length `2^n` and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm {norm} != 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability distribution over the lowest `k` qubits, tracing out the rest.
    pub fn marginal_low(&self, k: usize) -> Vec<f64> {
        let k = k.min(self.n_qubits);
        let mask = (1usize << k) - 1;
        let mut out = vec![0.0; 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            out[i & mask] += a.norm_sqr();
        }
        out
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Applies `gate` in place. Symbolic angles are resolved against `binding`.
    pub fn apply(&mut self, gate: &GateOp, binding: Option<f64>) -> Result<()> {
        for &q in gate.qubits() {
            self.check_qubit(q)?;
        }
        let theta = match gate.angle() {
            Some(a) => a.resolve(binding)?,
            None => 0.0,
        };
        let qs = gate.qubits();
        match gate.kind() {
            GateKind::X => self.apply_x(qs[0]),
            GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let m = gate.kind().matrix(theta);
                self.apply_1q([[m[0][0], m[0][1]], [m[1][0], m[1][1]]], qs[0]);
            }
            GateKind::Cx => self.apply_cx(qs[0], qs[1]),
            GateKind::Rzz => self.apply_rzz(qs[0], qs[1], theta),
            GateKind::Xy => self.apply_xy(qs[0], qs[1], theta),
        }
        Ok(())
    }

    fn apply_x(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    fn apply_1q(&mut self, m: [[Complex64; 2]; 2], q: usize) {
        let bit = 1usize << q;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + bit {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += bit << 1;
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_rzz(&mut self, a: usize, b: usize, theta: f64) {
        let (ab, bb) = (1usize << a, 1usize << b);
        let even = Complex64::from_polar(1.0, -theta / 2.0);
        let odd = Complex64::from_polar(1.0, theta / 2.0);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((i & ab) != 0) ^ ((i & bb) != 0);
            *amp *= if parity { odd } else { even };
        }
    }

    // |01> -> cos(θ/2)|01> - i sin(θ/2)|10>, and symmetrically; |00>, |11> fixed.
    fn apply_xy(&mut self, a: usize, b: usize, theta: f64) {
        let (ab, bb) = (1usize << a, 1usize << b);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let ms = Complex64::new(0.0, -s);
        for i in 0..self.amps.len() {
            if i & ab == 0 && i & bb != 0 {
                let j = (i | ab) & !bb;
                let (u, v) = (self.amps[i], self.amps[j]);
                self.amps[i] = u * c + v * ms;
                self.amps[j] = u * ms + v * c;
            }
        }
    }

    /// `<ψ|O|ψ>` for an observable on at most `n_qubits` qubits (identity on
    /// the rest). The imaginary residue is discarded.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.n_qubits() > self.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit observable on a {}-qubit state",
                observable.n_qubits(),
                self.n_qubits
            )));
        }
        if observable.is_diagonal() {
            return Ok(self.diagonal_expectation(observable));
        }
        let mut total = observable.constant_offset();
        for term in observable.terms() {
            let m = term.masks();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &amp) in self.amps.iter().enumerate() {
                let partner = self.amps[i ^ m.flip_mask];
                let v = partner.conj() * amp;
                if (i & m.phase_mask).count_ones() % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc *= i_pow(m.n_y);
            total += term.coeff * acc.re;
        }
        Ok(total)
    }

    fn diagonal_expectation(&self, observable: &PauliSum) -> f64 {
        let support = observable
            .terms()
            .iter()
            .filter_map(|t| t.max_qubit())
            .max()
            .map_or(0, |q| q + 1);
        let marginal = self.marginal_low(support);
        let mut total = observable.constant_offset();
        for term in observable.terms() {
            let mask = term.masks().phase_mask;
            let s: f64 = marginal
                .iter()
                .enumerate()
                .map(|(i, p)| if (i & mask).count_ones() % 2 == 0 { *p } else { -*p })
                .sum();
            total += term.coeff * s;
        }
        total
    }

    /// Draws `shots` computational-basis outcomes; returns counts per basis index.
    pub fn sample_indices(&self, shots: usize, seed: u64) -> Result<BTreeMap<usize, usize>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// Measurement counts keyed by bitstring (qubit 0 first).
    pub fn sample_bitstrings(&self, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        Ok(self
            .sample_indices(shots, seed)?
            .into_iter()
            .map(|(i, c)| (index_to_bitstring(i, self.n_qubits), c))
            .collect())
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Bitstring with qubit 0 as the first character.
pub fn index_to_bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn bitstring_to_index(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (q, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << q),
        other => Err(Error::InvalidArgument(format!(
            "bad bitstring character {other:?}"
        ))),
    })
}

/// Value-semantic gate application: returns the transformed copy.
pub fn apply_gate(state: &Statevector, gate: &GateOp, binding: Option<f64>) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate, binding)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use crate::sim::gate::Angle;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_states() {
        let s = Statevector::basis(1, &[]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1., 0.), c(0., 0.)]);
        let s = Statevector::basis(2, &[1]).unwrap();
        assert_eq!(s.amplitudes()[0b10], c(1., 0.));
        let s = Statevector::basis(4, &[2, 3]).unwrap();
        assert_eq!(s.amplitudes()[0b1100], c(1., 0.));
        assert!(matches!(
            Statevector::basis(2, &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn xy_swap_point() {
        let s = Statevector::basis(2, &[1]).unwrap();
        let out = apply_gate(&s, &GateOp::xy(0, 1, Angle::Fixed(PI)).unwrap(), None).unwrap();
        assert!((out.amplitudes()[0b01] - c(0., -1.)).norm() < 1e-12);
        assert!(out.amplitudes()[0b10].norm() < 1e-12);
    }

    #[test]
    fn xy_zero_is_identity() {
        let amps: Vec<_> = [0.1, 0.3, 0.5, 0.8]
            .iter()
            .map(|&x: &f64| c(x, -x / 2.0))
            .collect();
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let s = Statevector::from_amplitudes(2, amps.iter().map(|a| a / n).collect()).unwrap();
        let out = apply_gate(&s, &GateOp::xy(0, 1, Angle::Fixed(0.0)).unwrap(), None).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn unbound_and_out_of_range() {
        let mut s = Statevector::basis(2, &[]).unwrap();
        assert_eq!(
            s.apply(&GateOp::ry(0, Angle::slot(0)), None),
            Err(Error::UnboundParameter)
        );
        assert!(matches!(
            s.apply(&GateOp::x(3), None),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let mut z0 = PauliSum::new(1);
        z0.add_term(1.0, &[(0, Pauli::Z)]).unwrap();
        let s = Statevector::basis(1, &[]).unwrap();
        assert_eq!(s.expectation(&z0).unwrap(), 1.0);

        let mut zz = PauliSum::new(2);
        zz.add_term(1.0, &[(0, Pauli::Z), (1, Pauli::Z)]).unwrap();
        let s = Statevector::basis(2, &[1]).unwrap();
        assert_eq!(s.expectation(&zz).unwrap(), -1.0);

        let mut total_z = PauliSum::new(4);
        for q in 0..4 {
            total_z.add_term(1.0, &[(q, Pauli::Z)]).unwrap();
        }
        let s = Statevector::basis(4, &[2, 3]).unwrap();
        assert_eq!(s.expectation(&total_z).unwrap(), 0.0);

        // 3-qubit observable on a 2-qubit state is a dimension error
        assert!(matches!(
            Statevector::basis(2, &[]).unwrap().expectation(&PauliSum::new(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn y_expectation_on_plus_i() {
        // (|0> + i|1>)/√2 is the +1 eigenstate of Y
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = Statevector::from_amplitudes(1, vec![c(h, 0.), c(0., h)]).unwrap();
        let mut y = PauliSum::new(1);
        y.add_term(1.0, &[(0, Pauli::Y)]).unwrap();
        assert!((s.expectation(&y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_examples() {
        let s = Statevector::basis(1, &[]).unwrap();
        let counts = s.sample_bitstrings(100, 7).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts["0"], 100);
        assert!(s.sample_bitstrings(0, 7).is_err());

        let mut plus = Statevector::basis(1, &[]).unwrap();
        plus.apply(&GateOp::h(0), None).unwrap();
        let counts = plus.sample_bitstrings(20_000, 11).unwrap();
        let sigma = (20_000.0f64 * 0.25).sqrt();
        for key in ["0", "1"] {
            assert!((counts[key] as f64 - 10_000.0).abs() < 5.0 * sigma);
        }
        assert_eq!(counts.values().sum::<usize>(), 20_000);
        assert_eq!(counts, plus.sample_bitstrings(20_000, 11).unwrap());

        let mut swapped = Statevector::basis(2, &[1]).unwrap();
        swapped
            .apply(&GateOp::xy(0, 1, Angle::Fixed(PI)).unwrap(), None)
            .unwrap();
        let counts = swapped.sample_bitstrings(50, 3).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts["10"], 50);
    }

    #[test]
    fn bitstrings() {
        assert_eq!(index_to_bitstring(0b01, 2), "10");
        assert_eq!(bitstring_to_index("011").unwrap(), 0b110);
        assert!(bitstring_to_index("01x").is_err());
    }
}
