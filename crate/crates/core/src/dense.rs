//! Dense reference implementations, deliberately independent of the
//! matrix-free and symmetry-reduced paths. Exponential in the register size;
//! used by the oracle harness and the test suites.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity2() -> DMatrix<C> {
    DMatrix::identity(2, 2)
}

pub fn sigma_x() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// `σ⁺ = |↑⟩⟨↓| = |0⟩⟨1|`
pub fn sigma_plus() -> DMatrix<C> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_minus() -> DMatrix<C> {
    sigma_plus().adjoint()
}

/// Tensor product over `n` qubits with `ops[q]` on qubit `q` (identity where
/// absent). Qubit `q` is bit `q` of the index, so the Kronecker factors run
/// from qubit `n-1` (leftmost) down to qubit 0.
pub fn embed(n: usize, ops: &[(usize, DMatrix<C>)]) -> DMatrix<C> {
    let mut out = DMatrix::<C>::identity(1, 1);
    for q in (0..n).rev() {
        let factor = ops
            .iter()
            .find(|(k, _)| *k == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(identity2);
        out = out.kronecker(&factor);
    }
    out
}

/// Bath ring Hamiltonian on qubits `offset..offset+n_bath` of an
/// `n_total`-qubit register.
pub fn xx_bath(n_total: usize, offset: usize, n_bath: usize, h: f64) -> DMatrix<C> {
    let dim = 1usize << n_total;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for i in 0..n_bath {
        let a = offset + i;
        let b = offset + (i + 1) % n_bath;
        m -= embed(n_total, &[(a, sigma_plus()), (b, sigma_minus())]);
        m -= embed(n_total, &[(a, sigma_minus()), (b, sigma_plus())]);
        m -= embed(n_total, &[(a, sigma_z())]) * c(h, 0.0);
    }
    m
}

/// `H_SE + λ H_B` on system (qubit 0) plus `n_bath` spins.
pub fn full_hamiltonian(n_bath: usize, d: f64, lambda: f64, h: f64) -> DMatrix<C> {
    let n_total = n_bath + 1;
    let dim = 1usize << n_total;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for i in 1..=n_bath {
        m += embed(n_total, &[(0, sigma_z()), (i, sigma_x())]) * c(d, 0.0);
    }
    if lambda != 0.0 {
        m += xx_bath(n_total, 1, n_bath, h) * c(lambda, 0.0);
    }
    m
}

/// Bath-only `± d Σσˣ + λ H_B`.
pub fn branch_hamiltonian(n_bath: usize, d: f64, sign: f64, lambda: f64, h: f64) -> DMatrix<C> {
    let dim = 1usize << n_bath;
    let mut m = DMatrix::<C>::zeros(dim, dim);
    for i in 0..n_bath {
        m += embed(n_bath, &[(i, sigma_x())]) * c(sign * d, 0.0);
    }
    if lambda != 0.0 {
        m += xx_bath(n_bath, 0, n_bath, h) * c(lambda, 0.0);
    }
    m
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ground energy of a Hermitian matrix with real entries, via the real
/// symmetric solver.
pub fn ground_energy_real(m: &DMatrix<C>) -> f64 {
    let re = m.map(|z| z.re);
    re.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `exp(-i H t) v` through the full eigendecomposition of `H`.
pub fn expm_apply(m: &DMatrix<C>, t: f64, v: &[C]) -> Vec<C> {
    let eig = m.clone().symmetric_eigen();
    let q = &eig.eigenvectors;
    let x = DVector::from_column_slice(v);
    let mut y = q.adjoint() * x;
    for (k, yk) in y.iter_mut().enumerate() {
        *yk *= C::from_polar(1.0, -eig.eigenvalues[k] * t);
    }
    (q * y).iter().copied().collect()
}

/// Partial trace by direct summation over index pairs that agree on the
/// traced-out qubits. Row index bit `j` is qubit `keep_sorted[j]`.
pub fn partial_trace(psi: &[C], n_qubits: usize, keep: &[usize]) -> DMatrix<C> {
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    let keep_mask: usize = keep_sorted.iter().map(|q| 1usize << q).sum();
    let env_mask = ((1usize << n_qubits) - 1) & !keep_mask;
    let compress = |b: usize| -> usize { keep_sorted.iter().enumerate().map(|(j, &q)| ((b >> q) & 1) << j).sum() };
    let dk = 1usize << keep_sorted.len();
    let mut rho = DMatrix::<C>::zeros(dk, dk);
    let dim = 1usize << n_qubits;
    for r in 0..dim {
        if psi[r] == C::new(0.0, 0.0) {
            continue;
        }
        let env = r & env_mask;
        for a in 0..dk {
            // reassemble the column index from env bits and keep pattern a
            let mut col = env;
            for (j, &q) in keep_sorted.iter().enumerate() {
                col |= ((a >> j) & 1) << q;
            }
            rho[(compress(r), a)] += psi[r] * psi[col].conj();
        }
    }
    rho
}

/// Von Neumann entropy (bits) from the full spectrum.
pub fn entropy(rho: &DMatrix<C>) -> f64 {
    eigenvalues(rho)
        .into_iter()
        .filter(|&p| p > 1e-12)
        .map(|p| -p * p.log2())
        .sum()
}

/// `I(S:F)` by dense partial traces; system is qubit 0, `fragment` lists
/// qubit labels.
pub fn mutual_information(psi: &[C], n_qubits: usize, fragment: &[usize]) -> f64 {
    if fragment.is_empty() {
        return 0.0;
    }
    let mut sf = vec![0];
    sf.extend_from_slice(fragment);
    entropy(&partial_trace(psi, n_qubits, &[0])) + entropy(&partial_trace(psi, n_qubits, fragment))
        - entropy(&partial_trace(psi, n_qubits, &sf))
}
