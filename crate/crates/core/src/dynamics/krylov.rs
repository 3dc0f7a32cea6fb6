//! Lanczos approximation of `exp(-i H t) v` for Hermitian `H`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::spin::Complex64 as C;
use crate::xx::SpinHamiltonian;

pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl HermitianOperator for SpinHamiltonian {
    fn dim(&self) -> usize {
        SpinHamiltonian::dim(self)
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec(x, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Krylov subspace dimension.
    pub subspace: usize,
    /// Target local error per step, in state norm.
    pub tolerance: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            subspace: 30,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KrylovStats {
    pub steps: usize,
    pub matvecs: usize,
    /// Sum of the per-step error estimates.
    pub error_estimate: f64,
}

struct LanczosBasis {
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Residual norm after the last vector (zero on breakdown).
    residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn lanczos<H: HermitianOperator + ?Sized>(op: &H, v0: &[Complex64], m_max: usize, scale: f64) -> LanczosBasis {
    let n = v0.len();
    let nrm = norm(v0);
    let mut vectors: Vec<Vec<Complex64>> = vec![v0.iter().map(|x| x / nrm).collect()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![C::new(0.0, 0.0); n];
    let mut residual = 0.0;
    let m_max = m_max.min(n).max(1);
    for j in 0..m_max {
        op.apply_into(&vectors[j], &mut w);
        let a = dot(&vectors[j], &w).re;
        // full re-orthogonalization, applied twice
        for _ in 0..2 {
            for v in &vectors {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        alpha.push(a);
        let b = norm(&w);
        residual = b;
        if b <= 1e-13 * scale.max(1.0) || j + 1 == m_max {
            break;
        }
        beta.push(b);
        vectors.push(w.iter().map(|x| x / b).collect());
    }
    if residual <= 1e-13 * scale.max(1.0) {
        residual = 0.0;
    }
    LanczosBasis {
        vectors,
        alpha,
        beta,
        residual,
    }
}

/// Coefficients `exp(-i T τ) e₁` in the Lanczos basis.
fn small_exp(eig: &SymmetricEigen<f64, nalgebra::Dyn>, tau: f64) -> Vec<Complex64> {
    let q = &eig.eigenvectors;
    let m = q.nrows();
    (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let ph = Complex64::from_polar(1.0, -eig.eigenvalues[k] * tau);
                    ph * q[(r, k)] * q[(0, k)]
                })
                .sum()
        })
        .collect()
}

/// `exp(-i H t) v` with adaptive sub-stepping.
pub fn expm_multiply<H: HermitianOperator + ?Sized>(
    op: &H,
    v: &[Complex64],
    t: f64,
    opts: KrylovOptions,
) -> (Vec<Complex64>, KrylovStats) {
    let mut stats = KrylovStats::default();
    let mut state = v.to_vec();
    if t == 0.0 {
        return (state, stats);
    }
    let sign = t.signum();
    let mut remaining = t.abs();
    let mut tau_guess = remaining;
    while remaining > 0.0 {
        let nrm = norm(&state);
        let basis = lanczos(op, &state, opts.subspace, nrm);
        stats.matvecs += basis.alpha.len();
        let m = basis.alpha.len();
        let t_mat = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                basis.alpha[i]
            } else if i + 1 == j {
                basis.beta[i]
            } else if j + 1 == i {
                basis.beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t_mat);
        let mut tau = tau_guess.min(remaining);
        let (coeffs, err) = loop {
            let c = small_exp(&eig, sign * tau);
            let err = basis.residual * c[m - 1].norm() * nrm;
            if err <= opts.tolerance || tau < 1e-14 * t.abs() {
                break (c, err);
            }
            tau *= 0.5;
        };
        let mut next = vec![C::new(0.0, 0.0); state.len()];
        for (c, vec) in coeffs.iter().zip(&basis.vectors) {
            let c = c * nrm;
            next.iter_mut().zip(vec).for_each(|(o, x)| *o += c * x);
        }
        state = next;
        remaining -= tau;
        if remaining < 1e-15 * t.abs() {
            remaining = 0.0;
        }
        stats.steps += 1;
        stats.error_estimate += err;
        tau_guess = if err < 0.01 * opts.tolerance { tau * 2.0 } else { tau };
    }
    (state, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{Pauli, PauliString, RegisterLayout};

    #[test]
    fn single_spin_rotation() {
        // exp(-i θ σx)|0⟩ = cos θ |0⟩ - i sin θ |1⟩
        let l = RegisterLayout::bath(1).unwrap();
        let h = SpinHamiltonian::new(l, vec![(1.0, PauliString::single(0, Pauli::X))]).unwrap();
        let v = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
        for &t in &[0.1, 1.3, -2.7, 10.0] {
            let (out, _) = expm_multiply(&h, &v, t, KrylovOptions::default());
            assert!((out[0] - C::new(t.cos(), 0.0)).norm() < 1e-12);
            assert!((out[1] - C::new(0.0, -t.sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let l = RegisterLayout::bath(2).unwrap();
        let h = SpinHamiltonian::new(l, vec![(1.0, PauliString::single(0, Pauli::Z))]).unwrap();
        let v = vec![C::new(0.5, 0.0); 4];
        let (out, stats) = expm_multiply(&h, &v, 0.0, KrylovOptions::default());
        assert_eq!(out, v);
        assert_eq!(stats.steps, 0);
    }
}
