//! Symmetric-subspace (Dicke ladder) solution for swap-invariant baths.
//!
//! `Σσˣ` maps the Dicke state `|n⟩` (all `N`-spin states with `n` flipped
//! spins, equal weights) only onto `|n±1⟩`, so a bath starting in `|G₀⟩ = |0⟩`
//! or `|G₁⟩ = |1⟩` stays in the `(N+1)`-dimensional span of Dicke states.
//! Times here are dimensionless (`d·t`).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{DensityMatrix, PureState, ReducedBasis, RegisterLayout, NORM_TOL};

/// Tridiagonal `H_eff` with `⟨n|H_eff|n-1⟩ = A⁻_n = √(n(N-n+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    n_bath: usize,
    a_minus: Vec<f64>,
}

impl EffectiveHamiltonian {
    pub fn new(n_bath: usize) -> Result<Self> {
        if n_bath == 0 {
            return Err(Error::FragmentOutOfRange { k: 0, n_bath });
        }
        let nf = n_bath as f64;
        let a_minus = (1..=n_bath)
            .map(|n| {
                let n = n as f64;
                (n * (nf - n + 1.0)).sqrt()
            })
            .collect();
        Ok(Self { n_bath, a_minus })
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    /// `A⁻_n` for `1 ≤ n ≤ N`; zero outside.
    pub fn a_minus(&self, n: usize) -> f64 {
        if n == 0 || n > self.n_bath {
            0.0
        } else {
            self.a_minus[n - 1]
        }
    }

    /// `A⁺_n = A⁻_{n+1}`.
    pub fn a_plus(&self, n: usize) -> f64 {
        self.a_minus(n + 1)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let dim = self.n_bath + 1;
        DMatrix::from_fn(dim, dim, |i, j| {
            if i == j + 1 {
                self.a_minus(i)
            } else if j == i + 1 {
                self.a_plus(i)
            } else {
                0.0
            }
        })
    }

    pub fn propagator(&self) -> MagnonPropagator {
        let eig = SymmetricEigen::new(self.matrix());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        MagnonPropagator {
            n_bath: self.n_bath,
            eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
            eigenvectors: eig.eigenvectors.select_columns(&order),
        }
    }
}

/// Eigendecomposition of `H_eff`, computed once per `N` and shared.
#[derive(Debug, Clone)]
pub struct MagnonPropagator {
    n_bath: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl MagnonPropagator {
    pub fn new(n_bath: usize) -> Result<Self> {
        Ok(EffectiveHamiltonian::new(n_bath)?.propagator())
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `exp(-i H_eff t) c0`.
    pub fn evolve(&self, c0: &MagnonState, t: f64) -> Result<MagnonState> {
        if c0.n_bath != self.n_bath {
            return Err(Error::LengthMismatch {
                expected: self.n_bath + 1,
                got: c0.coeffs.len(),
            });
        }
        let q = &self.eigenvectors;
        let dim = self.n_bath + 1;
        let proj: Vec<Complex64> = (0..dim)
            .map(|k| {
                let overlap: Complex64 = (0..dim).map(|r| c0.coeffs[r] * q[(r, k)]).sum();
                overlap * Complex64::from_polar(1.0, -self.eigenvalues[k] * t)
            })
            .collect();
        let coeffs = (0..dim).map(|r| (0..dim).map(|k| proj[k] * q[(r, k)]).sum()).collect();
        Ok(MagnonState {
            n_bath: self.n_bath,
            coeffs,
        })
    }

    /// Branch coefficients `(c(t), c(-t))`, with `c(-t) = c(t)*` for the
    /// real ladder Hamiltonian acting on real `c0`.
    pub fn branches(&self, c0: &MagnonState, t: f64) -> Result<(MagnonState, MagnonState)> {
        if !c0.is_real(1e-12) {
            return Err(Error::ComplexInitialState);
        }
        let plus = self.evolve(c0, t)?;
        let minus = plus.conj();
        Ok((plus, minus))
    }

    /// `ν(t)` from the branch coefficients.
    pub fn coherence(&self, c0: &MagnonState, t: f64) -> Result<Complex64> {
        let (p, m) = self.branches(c0, t)?;
        loschmidt_amplitude(&p, &m)
    }
}

/// Amplitudes `c_n` over the Dicke states `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnonState {
    n_bath: usize,
    coeffs: Vec<Complex64>,
}

impl MagnonState {
    pub fn new(n_bath: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != n_bath + 1 {
            return Err(Error::LengthMismatch {
                expected: n_bath + 1,
                got: coeffs.len(),
            });
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n_bath, coeffs })
    }

    /// The Dicke state `|n⟩` itself.
    pub fn dicke(n_bath: usize, n: usize) -> Result<Self> {
        if n > n_bath {
            return Err(Error::SectorOutOfRange { n, n_bath });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_bath + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(Self { n_bath, coeffs })
    }

    /// Ground state of sector `n` of the XX ring as a Dicke vector; only the
    /// swap-invariant sectors `n = 0, 1` qualify.
    pub fn sector_ground(n_bath: usize, n: usize) -> Result<Self> {
        match n {
            0 | 1 => Self::dicke(n_bath, n),
            _ => Err(Error::UnsupportedSector(n)),
        }
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    pub fn conj(&self) -> Self {
        Self {
            n_bath: self.n_bath,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Embeds into the full `2^N` bath register.
    pub fn lift(&self) -> Result<PureState> {
        let layout = RegisterLayout::bath(self.n_bath)?;
        let norms: Vec<f64> = (0..=self.n_bath)
            .map(|n| (-0.5 * ln_binomial(self.n_bath, n)).exp())
            .collect();
        let amps = (0..layout.dim())
            .map(|b| {
                let n = b.count_ones() as usize;
                self.coeffs[n] * norms[n]
            })
            .collect();
        Ok(PureState::from_parts_unchecked(layout, amps))
    }
}

/// `exp(-i H_eff t) c0`, building the propagator on the fly.
pub fn evolve_magnon(c0: &MagnonState, t: f64) -> Result<MagnonState> {
    MagnonPropagator::new(c0.n_bath)?.evolve(c0, t)
}

/// `ν = Σ_n c⁻_n* c⁺_n`, the overlap of the down branch with the up branch.
pub fn loschmidt_amplitude(c_plus: &MagnonState, c_minus: &MagnonState) -> Result<Complex64> {
    if c_plus.coeffs.len() != c_minus.coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: c_plus.coeffs.len(),
            got: c_minus.coeffs.len(),
        });
    }
    Ok(c_plus
        .coeffs
        .iter()
        .zip(&c_minus.coeffs)
        .map(|(p, m)| m.conj() * p)
        .sum())
}

/// `ln C(n, k)` by compensated summation of `ln((n-k+j)/j)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..=k {
        let term = (((n - k + j) as f64) / (j as f64)).ln() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    sum
}

/// Admissible range `[i_min, i_max]` of fragment excitations when `|n⟩_N`
/// is split into a `k`-spin fragment and the remaining `N - k` spins.
pub fn split_range(n_bath: usize, n: usize, k: usize) -> (usize, usize) {
    let i_max = k.min(n);
    let i_min = (k + n).saturating_sub(n_bath);
    (i_min, i_max)
}

/// `f_{N,n,i,k} = √(C(N-k, n-i) C(k, i) / C(N, n))`, the weight of
/// `|i⟩_k |n-i⟩_{N-k}` in `|n⟩_N`.
pub fn dicke_split_coeff(n_bath: usize, n: usize, i: usize, k: usize) -> Result<f64> {
    if n > n_bath {
        return Err(Error::SectorOutOfRange { n, n_bath });
    }
    if k > n_bath {
        return Err(Error::FragmentOutOfRange { k, n_bath });
    }
    let (min, max) = split_range(n_bath, n, k);
    if i < min || i > max {
        return Err(Error::SplitIndexOutOfRange { i, min, max });
    }
    let ln = ln_binomial(n_bath - k, n - i) + ln_binomial(k, i) - ln_binomial(n_bath, n);
    Ok((0.5 * ln).exp())
}

/// Reduced state of a `keep_k`-spin fragment (and the system qubit when
/// `with_system`) in the fragment's Dicke basis, for the global state
/// `(Σ_n c⁺_n |n⟩|↑⟩ + c⁻_n |n⟩|↓⟩)/√2`.
pub fn fragment_state_closed_form(
    c_plus: &MagnonState,
    c_minus: &MagnonState,
    keep_k: usize,
    with_system: bool,
) -> Result<DensityMatrix> {
    let n_bath = c_plus.n_bath;
    if c_minus.n_bath != n_bath {
        return Err(Error::LengthMismatch {
            expected: n_bath + 1,
            got: c_minus.coeffs.len(),
        });
    }
    if keep_k > n_bath {
        return Err(Error::FragmentOutOfRange { k: keep_k, n_bath });
    }
    let rest = n_bath - keep_k;
    let branches = [&c_plus.coeffs, &c_minus.coeffs];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let ln_rest: Vec<f64> = (0..=rest).map(|r| ln_binomial(rest, r)).collect();
    let ln_keep: Vec<f64> = (0..=keep_k).map(|i| ln_binomial(keep_k, i)).collect();
    let ln_all: Vec<f64> = (0..=n_bath).map(|n| ln_binomial(n_bath, n)).collect();
    // rows: kept factor (fragment i, system s if kept); columns: traced factor
    let sys_dim = if with_system { 2 } else { 1 };
    let dim = (keep_k + 1) * sys_dim;
    let env_dim = (rest + 1) * (3 - sys_dim);
    let amps = DMatrix::<Complex64>::from_fn(dim, env_dim, |row, col| {
        let (i, s, r) = if with_system {
            (row / 2, row % 2, col)
        } else {
            (row, col % 2, col / 2)
        };
        let n = i + r;
        let f = (0.5 * (ln_rest[r] + ln_keep[i] - ln_all[n])).exp();
        branches[s][n] * (f * half)
    });
    let rho = &amps * amps.adjoint();
    DensityMatrix::new(
        ReducedBasis::Dicke {
            fragment_size: keep_k,
            with_system,
        },
        rho,
    )
}
