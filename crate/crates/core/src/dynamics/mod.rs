//! Branch dynamics of the dephasing qubit: `|+⟩⊗|G⟩` evolves into
//! `(|↑⟩|G↑(t)⟩ + |↓⟩|G↓(t)⟩)/√2` with `|G↑↓(t)⟩ = exp(-i(±dΣσˣ + λH_B)t)|G⟩`.

mod krylov;

pub use krylov::{expm_multiply, HermitianOperator, KrylovOptions, KrylovStats};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{PureState, RegisterLayout, NORM_TOL};
use crate::xx::{build_branch, SpinHamiltonian};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    pub d: f64,
    pub lambda: f64,
    pub h: f64,
    pub n_bath: usize,
    pub time_grid: Vec<f64>,
}

impl EvolutionSpec {
    pub fn new(n_bath: usize, d: f64, lambda: f64, h: f64, time_grid: Vec<f64>) -> Result<Self> {
        let spec = Self {
            d,
            lambda,
            h,
            n_bath,
            time_grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `λ = 0`, `d = 1`: times are read as `d·t`.
    pub fn strong_coupling(n_bath: usize, h: f64, time_grid: Vec<f64>) -> Result<Self> {
        Self::new(n_bath, 1.0, 0.0, h, time_grid)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidEvolution(m.to_string()));
        if !self.d.is_finite() || !self.lambda.is_finite() || !self.h.is_finite() {
            return bad("non-finite parameter");
        }
        if self.lambda < 0.0 {
            return bad("lambda must be >= 0");
        }
        if self.n_bath == 0 {
            return bad("empty bath");
        }
        match self.time_grid.first() {
            None => return bad("empty time grid"),
            Some(&t0) if t0 != 0.0 => return bad("time grid must start at 0"),
            _ => {}
        }
        if self
            .time_grid
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return bad("time grid must be strictly increasing");
        }
        Ok(())
    }

    pub fn is_strong_coupling(&self) -> bool {
        self.lambda == 0.0
    }
}

/// Uniform grid of `points` times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPair {
    pub up: PureState,
    pub down: PureState,
    pub time: f64,
}

fn check_initial(g: &PureState, n_bath: usize) -> Result<()> {
    if g.layout() != RegisterLayout::bath(n_bath)? {
        return Err(Error::RegisterMismatch);
    }
    let norm = g.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Applies `⊗_i exp(-i θ σˣ_i)` over every qubit of `amps` in place.
pub fn rotate_all_x(amps: &mut [Complex64], theta: f64) {
    let (s, c) = theta.sin_cos();
    let mis = Complex64::new(0.0, -s);
    let n = amps.len().trailing_zeros();
    for q in 0..n {
        let bit = 1usize << q;
        for b in 0..amps.len() {
            if b & bit == 0 {
                let a0 = amps[b];
                let a1 = amps[b | bit];
                amps[b] = a0 * c + a1 * mis;
                amps[b | bit] = a1 * c + a0 * mis;
            }
        }
    }
}

/// Both branch states at time `t`.
pub fn evolve_branches(g: &PureState, spec: &EvolutionSpec, t: f64) -> Result<BranchPair> {
    spec.validate()?;
    check_initial(g, spec.n_bath)?;
    let layout = g.layout();
    if spec.is_strong_coupling() {
        let mut up = g.amplitudes().to_vec();
        let mut down = up.clone();
        rotate_all_x(&mut up, spec.d * t);
        rotate_all_x(&mut down, -spec.d * t);
        return Ok(BranchPair {
            up: PureState::from_parts_unchecked(layout, up),
            down: PureState::from_parts_unchecked(layout, down),
            time: t,
        });
    }
    let (h_up, h_down) = branch_hamiltonians(spec)?;
    let opts = KrylovOptions::default();
    let (up, _) = expm_multiply(&h_up, g.amplitudes(), t, opts);
    let (down, _) = expm_multiply(&h_down, g.amplitudes(), t, opts);
    Ok(BranchPair {
        up: PureState::from_parts_unchecked(layout, up),
        down: PureState::from_parts_unchecked(layout, down),
        time: t,
    })
}

fn branch_hamiltonians(spec: &EvolutionSpec) -> Result<(SpinHamiltonian, SpinHamiltonian)> {
    Ok((
        build_branch(spec.n_bath, spec.d, 1.0, spec.lambda, spec.h)?,
        build_branch(spec.n_bath, spec.d, -1.0, spec.lambda, spec.h)?,
    ))
}

/// Branch pairs at every time of `spec.time_grid`. At finite `λ` the states
/// are propagated sequentially from one grid time to the next.
pub fn branch_trajectory(g: &PureState, spec: &EvolutionSpec) -> Result<Vec<BranchPair>> {
    spec.validate()?;
    check_initial(g, spec.n_bath)?;
    if spec.is_strong_coupling() {
        return spec.time_grid.iter().map(|&t| evolve_branches(g, spec, t)).collect();
    }
    let layout = g.layout();
    let (h_up, h_down) = branch_hamiltonians(spec)?;
    let opts = KrylovOptions::default();
    let mut up = g.amplitudes().to_vec();
    let mut down = up.clone();
    let mut last = 0.0;
    let mut out = Vec::with_capacity(spec.time_grid.len());
    for &t in &spec.time_grid {
        let dt = t - last;
        if dt > 0.0 {
            up = expm_multiply(&h_up, &up, dt, opts).0;
            down = expm_multiply(&h_down, &down, dt, opts).0;
        }
        last = t;
        out.push(BranchPair {
            up: PureState::from_parts_unchecked(layout, up.clone()),
            down: PureState::from_parts_unchecked(layout, down.clone()),
            time: t,
        });
    }
    Ok(out)
}

/// `ν(t) = ⟨G↓(t)|G↑(t)⟩`.
pub fn coherence(pair: &BranchPair) -> Result<Complex64> {
    pair.down.inner(&pair.up)
}

/// `(|↑⟩⊗|G↑⟩ + |↓⟩⊗|G↓⟩)/√2` on the register with the system at qubit 0.
pub fn global_state(pair: &BranchPair) -> Result<PureState> {
    if pair.up.layout() != pair.down.layout() || pair.up.layout().has_system() {
        return Err(Error::RegisterMismatch);
    }
    let layout = RegisterLayout::with_system(pair.up.layout().n_bath())?;
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for (b, (u, d)) in pair.up.amplitudes().iter().zip(pair.down.amplitudes()).enumerate() {
        amps[b << 1] = u * FRAC_1_SQRT_2;
        amps[(b << 1) | 1] = d * FRAC_1_SQRT_2;
    }
    Ok(PureState::from_parts_unchecked(layout, amps))
}

/// Distribution of `|G⟩` over the eigenvalues `N - 2m` of `Σσˣ`. At `λ = 0`
/// this fixes the coherence for all times:
/// `ν(t) = ⟨G|exp(-2i d t Σσˣ)|G⟩ = Σ_m w_m exp(-2i d t (N - 2m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFlipSpectrum {
    n_bath: usize,
    weights: Vec<f64>,
}

impl SpinFlipSpectrum {
    pub fn from_state(g: &PureState) -> Result<Self> {
        if g.layout().has_system() {
            return Err(Error::RegisterMismatch);
        }
        let n_bath = g.layout().n_bath();
        let mut amps = g.amplitudes().to_vec();
        walsh_hadamard(&mut amps);
        let mut weights = vec![0.0; n_bath + 1];
        for (b, a) in amps.iter().enumerate() {
            weights[b.count_ones() as usize] += a.norm_sqr();
        }
        Ok(Self { n_bath, weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn coherence(&self, d: f64, t: f64) -> Complex64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(m, w)| {
                let eig = self.n_bath as f64 - 2.0 * m as f64;
                Complex64::from_polar(*w, -2.0 * d * t * eig)
            })
            .sum()
    }
}

/// Normalized Walsh–Hadamard transform: maps σˣ eigenbasis amplitudes onto
/// the computational basis, bit `1` ↔ eigenvalue `-1`.
fn walsh_hadamard(amps: &mut [Complex64]) {
    let n = amps.len();
    let mut len = 1;
    while len < n {
        for start in (0..n).step_by(2 * len) {
            for i in start..start + len {
                let a = amps[i];
                let b = amps[i + len];
                amps[i] = (a + b) * FRAC_1_SQRT_2;
                amps[i + len] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        len *= 2;
    }
}
