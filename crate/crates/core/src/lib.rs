//! Exact simulation of a central qubit dephasing into a spin bath prepared in
//! ground states of the XX ring: mutual-information profiles over bath
//! fragments, record mixing under bath self-interaction, and the BLP
//! non-Markovianity measure.

pub mod darwinism;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod magnon;
pub mod nonmarkov;
pub mod spin;
pub mod xx;

pub use error::{Error, Result};
