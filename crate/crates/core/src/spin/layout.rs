use crate::error::{Error, Result};

/// Largest register this crate will allocate dense amplitudes for.
const MAX_QUBITS: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    n_bath: usize,
    has_system: bool,
}

impl RegisterLayout {
    pub fn new(n_bath: usize, has_system: bool) -> Result<Self> {
        let total = n_bath + has_system as usize;
        if total == 0 {
            return Err(Error::EmptyKeepSet);
        }
        if total > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(total));
        }
        Ok(Self { n_bath, has_system })
    }

    pub fn bath(n_bath: usize) -> Result<Self> {
        Self::new(n_bath, false)
    }

    pub fn with_system(n_bath: usize) -> Result<Self> {
        Self::new(n_bath, true)
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn has_system(&self) -> bool {
        self.has_system
    }

    pub fn total_qubits(&self) -> usize {
        self.n_bath + self.has_system as usize
    }

    pub fn dim(&self) -> usize {
        1usize << self.total_qubits()
    }

    /// Qubit label of the system, if present.
    pub fn system_qubit(&self) -> Option<usize> {
        self.has_system.then_some(0)
    }

    /// Qubit label of bath spin `j` (0-based).
    pub fn bath_qubit(&self, j: usize) -> Result<usize> {
        if j >= self.n_bath {
            return Err(Error::LabelOutOfRange {
                label: j,
                total: self.n_bath,
            });
        }
        Ok(j + self.has_system as usize)
    }

    pub fn bath_qubits(&self) -> impl Iterator<Item = usize> {
        let off = self.has_system as usize;
        (0..self.n_bath).map(move |j| j + off)
    }

    pub fn check_label(&self, label: usize) -> Result<()> {
        if label >= self.total_qubits() {
            Err(Error::LabelOutOfRange {
                label,
                total: self.total_qubits(),
            })
        } else {
            Ok(())
        }
    }
}
