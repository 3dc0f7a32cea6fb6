use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::PureState;
use super::{EIGEN_CLIP, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Basis in which a reduced density matrix is expressed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedBasis {
    /// Computational basis of the listed qubit labels (ascending); bit `j`
    /// of a row index is the state of `labels[j]`.
    Qubits(Vec<usize>),
    /// Dicke basis of a `fragment_size`-spin fragment, optionally tensored
    /// with the system qubit. Row index is `2·i + s` with the system, `i`
    /// without, where `i` counts flipped fragment spins.
    Dicke { fragment_size: usize, with_system: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: ReducedBasis,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(basis: ReducedBasis, matrix: DMatrix<Complex64>) -> Result<Self> {
        let expected = match &basis {
            ReducedBasis::Qubits(l) => 1usize << l.len(),
            ReducedBasis::Dicke {
                fragment_size,
                with_system,
            } => (fragment_size + 1) * if *with_system { 2 } else { 1 },
        };
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: matrix.nrows(),
            });
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> &ReducedBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::NotHermitian(err));
        }
        Ok(hermitian_eigenvalues(&self.matrix))
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let ev: DVector<f64> = m.clone().symmetric_eigenvalues();
    let mut out: Vec<f64> = ev.iter().copied().collect();
    out.sort_by(f64::total_cmp);
    out
}

pub(crate) fn entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p > EIGEN_CLIP)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_from_spectrum(&rho.eigenvalues()?))
}

fn sorted_unique(labels: &[usize], total: usize) -> Result<Vec<usize>> {
    if labels.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let mut keep = labels.to_vec();
    keep.sort_unstable();
    for w in keep.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateLabel(w[0]));
        }
    }
    if let Some(&last) = keep.last() {
        if last >= total {
            return Err(Error::LabelOutOfRange { label: last, total });
        }
    }
    Ok(keep)
}

/// Scatters the bits of `value` onto the positions listed in `labels`.
#[inline]
fn deposit(value: usize, labels: &[usize]) -> usize {
    labels
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((value >> j) & 1) << q))
}

/// Partial trace of `|ψ⟩⟨ψ|` over every qubit not in `keep`.
pub fn reduced_density(state: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let total = state.layout().total_qubits();
    let keep = sorted_unique(keep, total)?;
    let env: Vec<usize> = (0..total).filter(|q| keep.binary_search(q).is_err()).collect();
    let matrix = partial_trace_matrix(state.amplitudes(), &keep, &env);
    DensityMatrix::new(ReducedBasis::Qubits(keep), matrix)
}

fn partial_trace_matrix(amps: &[Complex64], keep: &[usize], env: &[usize]) -> DMatrix<Complex64> {
    let dk = 1usize << keep.len();
    let de = 1usize << env.len();
    let base: Vec<usize> = (0..dk).map(|a| deposit(a, keep)).collect();
    let mut rho = DMatrix::<Complex64>::zeros(dk, dk);
    let mut col = DVector::<Complex64>::zeros(dk);
    let one = Complex64::new(1.0, 0.0);
    for e in 0..de {
        let off = deposit(e, env);
        let mut any = false;
        for (a, &b) in base.iter().enumerate() {
            let v = amps[b | off];
            any |= v != Complex64::new(0.0, 0.0);
            col[a] = v;
        }
        if any {
            rho.gerc(one, &col, &col, one);
        }
    }
    rho
}

/// Entropy (bits) of the reduced state on `keep`, computed on whichever side
/// of the bipartition is smaller.
pub fn entanglement_entropy(state: &PureState, keep: &[usize]) -> Result<f64> {
    let total = state.layout().total_qubits();
    let keep = sorted_unique(keep, total)?;
    if keep.len() == total {
        return Ok(0.0);
    }
    let env: Vec<usize> = (0..total).filter(|q| keep.binary_search(q).is_err()).collect();
    let (small, large) = if keep.len() <= env.len() {
        (&keep, &env)
    } else {
        (&env, &keep)
    };
    let m = partial_trace_matrix(state.amplitudes(), small, large);
    Ok(entropy_from_spectrum(&hermitian_eigenvalues(&m)))
}
