use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{Pauli, PauliString, RegisterLayout};

/// Hermitian operator `Σ c_k P_k` with real coefficients on Pauli strings,
/// applied matrix-free.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    layout: RegisterLayout,
    terms: Vec<(f64, PauliString)>,
    groups: Vec<FlipGroup>,
}

/// All terms sharing one bit-flip pattern.
#[derive(Debug, Clone)]
struct FlipGroup {
    flip: usize,
    parts: Vec<(usize, Complex64)>,
}

impl SpinHamiltonian {
    pub fn new(layout: RegisterLayout, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, p) in &terms {
            p.check(&layout)?;
        }
        let groups = compile(&terms);
        Ok(Self { layout, terms, groups })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for g in &self.groups {
            for (b, &xb) in x.iter().enumerate() {
                if xb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for &(sign, coef) in &g.parts {
                    if (b & sign).count_ones() % 2 == 1 {
                        acc -= coef;
                    } else {
                        acc += coef;
                    }
                }
                y[b ^ g.flip] += acc * xb;
            }
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.matvec(x, &mut y);
        y
    }

    /// Nonzero entries of column `b`: pairs `(row, ⟨row|H|b⟩)`.
    pub fn column(&self, b: usize) -> Vec<(usize, Complex64)> {
        let mut out = Vec::with_capacity(self.groups.len());
        for g in &self.groups {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(sign, coef) in &g.parts {
                if (b & sign).count_ones() % 2 == 1 {
                    acc -= coef;
                } else {
                    acc += coef;
                }
            }
            if acc.norm() > 1e-15 {
                out.push((b ^ g.flip, acc));
            }
        }
        out
    }

    /// `Σ w_k H_k` over Hamiltonians sharing a layout.
    pub fn weighted_sum(parts: &[(f64, &SpinHamiltonian)]) -> Result<Self> {
        let layout = parts.first().ok_or(Error::EmptyKeepSet)?.1.layout;
        let mut terms = Vec::new();
        for (w, h) in parts {
            if h.layout != layout {
                return Err(Error::RegisterMismatch);
            }
            if *w == 0.0 {
                continue;
            }
            terms.extend(h.terms.iter().map(|(c, p)| (w * c, p.clone())));
        }
        Self::new(layout, terms)
    }

    /// Moves a bath-only Hamiltonian into a register that also carries the
    /// system qubit.
    pub fn embed_with_system(&self) -> Result<Self> {
        if self.layout.has_system() {
            return Ok(self.clone());
        }
        let layout = RegisterLayout::with_system(self.layout.n_bath())?;
        let terms = self.terms.iter().map(|(c, p)| (*c, p.shifted(1))).collect();
        Self::new(layout, terms)
    }
}

fn compile(terms: &[(f64, PauliString)]) -> Vec<FlipGroup> {
    let mut by_flip: BTreeMap<usize, BTreeMap<usize, Complex64>> = BTreeMap::new();
    for (c, p) in terms {
        let m = p.masks();
        *by_flip
            .entry(m.flip)
            .or_default()
            .entry(m.sign)
            .or_insert(Complex64::new(0.0, 0.0)) += m.phase * *c;
    }
    by_flip
        .into_iter()
        .map(|(flip, parts)| FlipGroup {
            flip,
            parts: parts.into_iter().filter(|(_, c)| c.norm() > 0.0).collect(),
        })
        .filter(|g| !g.parts.is_empty())
        .collect()
}

/// XX ring with transverse field on `n_bath` spins:
/// `H_B = -Σ_i (σ⁺_i σ⁻_{i+1} + σ⁻_i σ⁺_{i+1}) - h Σ_i σ^z_i`, periodic.
pub fn build_xx_bath(n_bath: usize, h: f64) -> Result<SpinHamiltonian> {
    if n_bath < 3 {
        return Err(Error::RingTooSmall(n_bath));
    }
    let layout = RegisterLayout::bath(n_bath)?;
    let mut terms = Vec::with_capacity(3 * n_bath);
    for i in 0..n_bath {
        let j = (i + 1) % n_bath;
        // σ⁺σ⁻ + σ⁻σ⁺ = (XX + YY) / 2
        terms.push((-0.5, PauliString::pair(i, Pauli::X, j, Pauli::X)?));
        terms.push((-0.5, PauliString::pair(i, Pauli::Y, j, Pauli::Y)?));
    }
    if h != 0.0 {
        for i in 0..n_bath {
            terms.push((-h, PauliString::single(i, Pauli::Z)));
        }
    }
    SpinHamiltonian::new(layout, terms)
}

/// `H_SE = d σ^z_S ⊗ Σ_i σ^x_i`.
pub fn build_interaction(layout: RegisterLayout, d: f64) -> Result<SpinHamiltonian> {
    let sys = layout.system_qubit().ok_or(Error::MissingSystem)?;
    let terms = layout
        .bath_qubits()
        .map(|q| PauliString::pair(sys, Pauli::Z, q, Pauli::X).map(|p| (d, p)))
        .collect::<Result<Vec<_>>>()?;
    SpinHamiltonian::new(layout, terms)
}

/// Bath-only generator of one system branch:
/// `sign · d Σ σ^x_i + λ H_B`, with `sign = +1` for system spin up.
pub fn build_branch(n_bath: usize, d: f64, sign: f64, lambda: f64, h: f64) -> Result<SpinHamiltonian> {
    let layout = RegisterLayout::bath(n_bath)?;
    let mut terms: Vec<(f64, PauliString)> = (0..n_bath)
        .map(|i| (sign * d, PauliString::single(i, Pauli::X)))
        .collect();
    if lambda != 0.0 {
        let hb = build_xx_bath(n_bath, h)?;
        terms.extend(hb.terms().iter().map(|(c, p)| (lambda * c, p.clone())));
    }
    SpinHamiltonian::new(layout, terms)
}
