use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::layout::RegisterLayout;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis on distinct qubit labels;
/// identity elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    ops: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        let mut ops = BTreeMap::new();
        ops.insert(qubit, p);
        Self { ops }
    }

    pub fn pair(a: usize, pa: Pauli, b: usize, pb: Pauli) -> Result<Self> {
        Self::from_ops([(a, pa), (b, pb)])
    }

    pub fn from_ops(ops: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (q, p) in ops {
            if map.insert(q, p).is_some() {
                return Err(Error::DuplicateLabel(q));
            }
        }
        Ok(Self { ops: map })
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.ops.iter().map(|(&q, &p)| (q, p))
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.keys().next_back().copied()
    }

    pub fn check(&self, layout: &RegisterLayout) -> Result<()> {
        match self.max_qubit() {
            Some(q) => layout.check_label(q),
            None => Ok(()),
        }
    }

    /// Relabels every qubit `q` to `q + offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            ops: self.ops.iter().map(|(&q, &p)| (q + offset, p)).collect(),
        }
    }

    /// Bit-mask form: `P|b⟩ = phase · (-1)^{popcount(b & sign)} |b ^ flip⟩`.
    pub fn masks(&self) -> PauliMasks {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u32;
        for (&q, &p) in &self.ops {
            let bit = 1usize << q;
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    n_y += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        // Y|b⟩ = i (-1)^b |b ^ 1⟩
        let phase = match n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliMasks { flip, sign, phase }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p:?}{q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub phase: Complex64,
}

impl PauliMasks {
    #[inline]
    pub fn act(&self, b: usize) -> (usize, Complex64) {
        let amp = if (b & self.sign).count_ones() % 2 == 1 {
            -self.phase
        } else {
            self.phase
        };
        (b ^ self.flip, amp)
    }
}

/// `scalar · P · v` on a raw amplitude slice; no normalization requirement.
pub fn apply_pauli_raw(string: &PauliString, scalar: Complex64, v: &[Complex64]) -> Vec<Complex64> {
    let m = string.masks();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (b, a) in v.iter().enumerate() {
        let (b2, amp) = m.act(b);
        out[b2] = scalar * amp * a;
    }
    out
}
