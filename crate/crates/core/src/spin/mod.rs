//! Register conventions, pure states, reduced density matrices and entropy.
//!
//! Basis convention shared by every module: bit `q` of a basis index holds
//! the state of qubit `q`, with `0` the spin-up (`σ^z = +1`) state and `1`
//! spin-down. When the register carries the central system qubit it sits at
//! qubit 0 and bath spin `j` (0-based) at qubit `j + 1`; bath-only registers
//! put bath spin `j` at qubit `j`.

mod density;
mod layout;
mod pauli;
mod state;

pub use density::{entanglement_entropy, reduced_density, von_neumann_entropy, DensityMatrix, ReducedBasis};
pub use layout::RegisterLayout;
pub use pauli::{apply_pauli_raw, Pauli, PauliString};
pub use state::PureState;

pub use num_complex::Complex64;

/// Eigenvalues below this are treated as zero before taking logarithms.
pub const EIGEN_CLIP: f64 = 1e-12;
/// Tolerance on the Hermiticity of density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on the unit norm of pure states.
pub const NORM_TOL: f64 = 1e-12;
