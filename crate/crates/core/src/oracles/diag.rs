use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

pub const MAX_DENSE_QUBITS: usize = 12;

/// Dense `2^n x 2^n` matrix of a Pauli sum, constant offset included.
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "dense matrix for {n} qubits (limit {MAX_DENSE_QUBITS})"
        )));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        m[(i, i)] += Complex64::new(h.constant_offset(), 0.0);
    }
    for term in h.terms() {
        let masks = term.masks();
        let phase = match masks.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        for col in 0..dim {
            let row = col ^ masks.flip_mask;
            let sign = if (col & masks.phase_mask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(row, col)] += phase * (term.coeff * sign);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<Complex64>,
}

/// Smallest eigenvalue and a unit eigenvector of the dense Hermitian matrix.
pub fn exact_ground(h: &PauliSum) -> Result<GroundState> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "exact diagonalization of {n} qubits (limit {MAX_DENSE_QUBITS})"
        )));
    }
    let dim = 1usize << n;
    if h.is_diagonal() {
        let (idx, energy) = (0..dim)
            .map(|i| (i, h.diagonal_value(i)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let mut vector = vec![Complex64::new(0.0, 0.0); dim];
        vector[idx] = Complex64::new(1.0, 0.0);
        return Ok(GroundState { energy, vector });
    }
    let m = dense_matrix(h)?;
    if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        let eig = SymmetricEigen::new(real);
        let k = argmin(eig.eigenvalues.iter().copied());
        let vector = eig
            .eigenvectors
            .column(k)
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        return Ok(GroundState {
            energy: eig.eigenvalues[k],
            vector,
        });
    }
    let eig = SymmetricEigen::new(m);
    let k = argmin(eig.eigenvalues.iter().copied());
    Ok(GroundState {
        energy: eig.eigenvalues[k],
        vector: eig.eigenvectors.column(k).iter().copied().collect(),
    })
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
        .0
}
