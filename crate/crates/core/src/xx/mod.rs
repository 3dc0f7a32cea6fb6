//! XX-ring bath Hamiltonian, system-bath coupling and magnetization-sector
//! ground states.

mod hamiltonian;
mod sectors;

pub use hamiltonian::{build_branch, build_interaction, build_xx_bath, SpinHamiltonian};
pub use sectors::{
    global_ground, sector_boundaries, sector_energies, sector_ground, sector_states, SectorBoundary, SectorGroundState,
    XxSpectrum, DEGENERACY_TOL,
};
