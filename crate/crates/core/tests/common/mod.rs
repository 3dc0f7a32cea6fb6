#![allow(dead_code)]

use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use spinbath_core::spin::{Complex64, PureState, RegisterLayout};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amplitudes(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, layout: RegisterLayout) -> PureState {
    PureState::normalized(layout, random_amplitudes(rng, layout.dim())).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// Ground energy of the `n`-excitation sector of the XX ring at zero field
/// from free fermions: periodic momenta for odd `n`, antiperiodic for even.
pub fn jordan_wigner_sector_energy(n_bath: usize, n: usize) -> f64 {
    let shift = if n % 2 == 1 { 0.0 } else { 0.5 };
    let mut eps: Vec<f64> = (0..n_bath)
        .map(|m| {
            let q = 2.0 * std::f64::consts::PI * (m as f64 + shift) / n_bath as f64;
            -2.0 * q.cos()
        })
        .collect();
    eps.sort_by(f64::total_cmp);
    eps[..n].iter().sum()
}
