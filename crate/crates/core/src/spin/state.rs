use num_complex::Complex64;

use super::layout::RegisterLayout;
use super::pauli::{apply_pauli_raw, PauliString};
use super::NORM_TOL;
use crate::error::{Error, Result};

/// Unit-norm amplitude vector over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: amps.len(),
            });
        }
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { layout, amps })
    }

    /// Rescales `amps` to unit norm. Fails only on a zero vector or a
    /// length mismatch.
    pub fn normalized(layout: RegisterLayout, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: amps.len(),
            });
        }
        let norm = l2_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { layout, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: index,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub(crate) fn from_parts_unchecked(layout: RegisterLayout, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), layout.dim());
        Self { layout, amps }
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::RegisterMismatch);
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    /// Applies `phase · P` for a Pauli string `P`; `phase` must have unit
    /// modulus so the result stays normalized.
    pub fn apply_pauli(&self, string: &PauliString, phase: Complex64) -> Result<PureState> {
        if (phase.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(phase.norm()));
        }
        string.check(&self.layout)?;
        let amps = apply_pauli_raw(string, phase, &self.amps);
        Ok(Self {
            layout: self.layout,
            amps,
        })
    }

    /// Global spin flip `U_X = ⊗ σ^x` over the bath qubits only.
    pub fn flip_bath(&self) -> PureState {
        let mut mask = 0usize;
        for q in self.layout.bath_qubits() {
            mask |= 1 << q;
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            amps[b ^ mask] = *a;
        }
        Self {
            layout: self.layout,
            amps,
        }
    }
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugate-linear in the first argument.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
