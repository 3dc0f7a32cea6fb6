use std::collections::HashMap;
use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::{build_xx_bath, SpinHamiltonian};
use crate::error::{Error, Result};
use crate::spin::{PureState, RegisterLayout};

/// Levels closer than this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Lowest eigenpair of `H_B` inside the `n`-excitation sector.
#[derive(Debug, Clone)]
pub struct SectorGroundState {
    pub n: usize,
    pub h: f64,
    pub energy: f64,
    pub vector: PureState,
    pub degenerate: bool,
    /// Distance to the next level of the same sector; infinite for
    /// one-dimensional sectors.
    pub gap: f64,
}

/// The `n`-excitation sector of an `N`-site ring, organised into orbits of
/// the cyclic translation `T` (site `i` → `i + 1`).
struct SectorOrbits {
    n_sites: usize,
    reps: Vec<usize>,
    periods: Vec<usize>,
    /// state → (orbit index, shift) with `state = T^shift(rep)`
    lookup: HashMap<usize, (usize, usize)>,
}

impl SectorOrbits {
    fn new(n_sites: usize, n: usize) -> Self {
        let mut reps = Vec::new();
        let mut periods = Vec::new();
        let mut lookup = HashMap::new();
        for s in sector_states(n_sites, n) {
            if lookup.contains_key(&s) {
                continue;
            }
            // Ascending enumeration: first member seen is the orbit minimum.
            let idx = reps.len();
            let mut cur = s;
            let mut shift = 0;
            loop {
                lookup.insert(cur, (idx, shift));
                shift += 1;
                cur = translate(cur, n_sites);
                if cur == s {
                    break;
                }
            }
            reps.push(s);
            periods.push(shift);
        }
        Self {
            n_sites,
            reps,
            periods,
            lookup,
        }
    }

    fn dim(&self) -> usize {
        self.lookup.len()
    }

    /// Orbits compatible with momentum `2π m / N`.
    fn allowed(&self, m: usize) -> Vec<usize> {
        (0..self.reps.len())
            .filter(|&r| (m * self.periods[r]).is_multiple_of(self.n_sites))
            .collect()
    }

    fn phase(&self, m: usize, shift: usize) -> Complex64 {
        let k = 2.0 * PI * (m as f64) / (self.n_sites as f64);
        Complex64::from_polar(1.0, k * shift as f64)
    }

    /// `⟨r',k|H|r,k⟩` over the allowed orbits, with
    /// `|r,k⟩ = L_r^{-1/2} Σ_j e^{ikj} T^j |r⟩`.
    fn block(&self, h: &SpinHamiltonian, m: usize) -> (Vec<usize>, DMatrix<Complex64>) {
        let allowed = self.allowed(m);
        let mut pos = vec![usize::MAX; self.reps.len()];
        for (i, &r) in allowed.iter().enumerate() {
            pos[r] = i;
        }
        let dim = allowed.len();
        let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &r) in allowed.iter().enumerate() {
            let l = self.periods[r];
            let norm = (l as f64).sqrt();
            let mut s = self.reps[r];
            for j in 0..l {
                let amp = self.phase(m, j) / norm;
                for (target, v) in h.column(s) {
                    let (r2, j2) = self.lookup[&target];
                    let row = pos[r2];
                    if row == usize::MAX {
                        continue;
                    }
                    let coef = self.phase(m, j2) / (self.periods[r2] as f64).sqrt();
                    mat[(row, col)] += coef.conj() * v * amp;
                }
                s = translate(s, self.n_sites);
            }
        }
        // symmetrize away rounding
        let herm = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        (allowed, herm)
    }

    fn lift(&self, m: usize, allowed: &[usize], coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.n_sites];
        for (&r, &c) in allowed.iter().zip(coeffs) {
            let l = self.periods[r];
            let norm = (l as f64).sqrt();
            let mut s = self.reps[r];
            for j in 0..l {
                amps[s] += c * self.phase(m, j) / norm;
                s = translate(s, self.n_sites);
            }
        }
        amps
    }
}

fn translate(b: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((b << 1) | (b >> (n - 1))) & mask
}

/// All `n`-bit-set patterns on `n_sites` bits in ascending order.
pub fn sector_states(n_sites: usize, n: usize) -> Vec<usize> {
    if n > n_sites {
        return Vec::new();
    }
    if n == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut v: usize = (1 << n) - 1;
    let limit = 1usize << n_sites;
    while v < limit {
        out.push(v);
        // Gosper's hack
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

fn sorted_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

struct SectorSpectrum {
    /// (eigenvalue, momentum index), ascending by eigenvalue then momentum
    levels: Vec<(f64, usize)>,
}

fn sector_spectrum(h: &SpinHamiltonian, orbits: &SectorOrbits) -> SectorSpectrum {
    let mut levels = Vec::with_capacity(orbits.dim());
    for m in 0..orbits.n_sites {
        let (_, block) = orbits.block(h, m);
        levels.extend(sorted_eigenvalues(&block).into_iter().map(|e| (e, m)));
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    SectorSpectrum { levels }
}

fn check_sector(n_bath: usize, n: usize) -> Result<()> {
    if n > n_bath {
        Err(Error::SectorOutOfRange { n, n_bath })
    } else {
        Ok(())
    }
}

/// Ground state of the XX ring restricted to `n` excitations.
pub fn sector_ground(n_bath: usize, h: f64, n: usize) -> Result<SectorGroundState> {
    let hb = build_xx_bath(n_bath, h)?;
    check_sector(n_bath, n)?;
    let orbits = SectorOrbits::new(n_bath, n);
    let spectrum = sector_spectrum(&hb, &orbits);
    let (energy, _) = spectrum.levels[0];
    // lowest momentum whose block reaches the ground level
    let m = spectrum
        .levels
        .iter()
        .take_while(|(e, _)| (e - energy).abs() <= DEGENERACY_TOL)
        .map(|&(_, m)| m)
        .min()
        .unwrap_or(0);
    let gap = spectrum.levels.get(1).map(|(e, _)| e - energy).unwrap_or(f64::INFINITY);
    let degenerate = gap < DEGENERACY_TOL;
    if degenerate {
        warn!("degenerate ground level in sector n={n} (N={n_bath}, h={h}, gap={gap:e})");
    }

    let (allowed, block) = orbits.block(&hb, m);
    let coeffs: Vec<Complex64> = if block.nrows() == 1 {
        vec![Complex64::new(1.0, 0.0)]
    } else {
        let eig = block.symmetric_eigen();
        let idx = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        eig.eigenvectors.column(idx).iter().copied().collect()
    };
    let mut amps = orbits.lift(m, &allowed, &coeffs);
    fix_phase(&mut amps);
    let vector = PureState::normalized(RegisterLayout::bath(n_bath)?, amps)?;
    Ok(SectorGroundState {
        n,
        h,
        energy,
        vector,
        degenerate,
        gap,
    })
}

/// Rotates the global phase so the amplitude sum (or, failing that, the
/// largest amplitude) is real and positive.
fn fix_phase(amps: &mut [Complex64]) {
    let sum: Complex64 = amps.iter().sum();
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let reference = if sum.norm() > 1e-8 * max.max(1e-300) {
        sum
    } else {
        amps.iter()
            .copied()
            .find(|a| a.norm() > 0.5 * max)
            .unwrap_or(Complex64::new(1.0, 0.0))
    };
    let rot = reference.conj() / reference.norm();
    amps.iter_mut().for_each(|a| *a *= rot);
}

/// Lowest energy of each sector `n = 0..=N` at field `h`.
pub fn sector_energies(n_bath: usize, h: f64) -> Result<Vec<f64>> {
    let hb = build_xx_bath(n_bath, h)?;
    Ok((0..=n_bath)
        .into_par_iter()
        .map(|n| {
            let orbits = SectorOrbits::new(n_bath, n);
            (0..n_bath)
                .flat_map(|m| sorted_eigenvalues(&orbits.block(&hb, m).1).into_iter().next())
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

fn argmin_low_n(energies: &[f64]) -> usize {
    let mut best = 0;
    for (n, &e) in energies.iter().enumerate().skip(1) {
        let tol = 1e-9 * energies[best].abs().max(1.0);
        if e < energies[best] - tol {
            best = n;
        }
    }
    best
}

/// Minimum-energy sector ground state; ties go to fewer excitations.
pub fn global_ground(n_bath: usize, h: f64) -> Result<SectorGroundState> {
    let energies = sector_energies(n_bath, h)?;
    sector_ground(n_bath, h, argmin_low_n(&energies))
}

/// Sector energies of the ring at zero field. Each sector energy is exactly
/// linear in the field, `E_n(h) = E_n(0) - (N - 2n) h`, so this table
/// resolves the ground sector at any field.
#[derive(Debug, Clone)]
pub struct XxSpectrum {
    n_bath: usize,
    zero_field: Vec<f64>,
}

/// A level crossing of the ground sector: below `h` the ground sector is
/// `n_below`, at and above it `n_above`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBoundary {
    pub h: f64,
    pub n_below: usize,
    pub n_above: usize,
}

impl XxSpectrum {
    pub fn new(n_bath: usize) -> Result<Self> {
        Ok(Self {
            n_bath,
            zero_field: sector_energies(n_bath, 0.0)?,
        })
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    fn slope(&self, n: usize) -> f64 {
        self.n_bath as f64 - 2.0 * n as f64
    }

    pub fn energy(&self, n: usize, h: f64) -> f64 {
        self.zero_field[n] - self.slope(n) * h
    }

    pub fn ground_sector(&self, h: f64) -> usize {
        let e: Vec<f64> = (0..=self.n_bath).map(|n| self.energy(n, h)).collect();
        argmin_low_n(&e)
    }

    /// Ground-sector crossings for `h > 0`, in decreasing `h`.
    pub fn boundaries(&self) -> Vec<SectorBoundary> {
        let mut out = Vec::new();
        let mut cur = 0usize;
        loop {
            let mut next: Option<(f64, usize)> = None;
            for m in (cur + 1)..=self.n_bath {
                let ds = self.slope(cur) - self.slope(m);
                let hx = (self.zero_field[cur] - self.zero_field[m]) / ds;
                let better = match next {
                    None => true,
                    Some((hb, _)) => hx > hb + 1e-12 || (hx - hb).abs() <= 1e-12,
                };
                if better {
                    next = Some((hx, m));
                }
            }
            match next {
                Some((hx, m)) if hx > 1e-9 => {
                    out.push(SectorBoundary {
                        h: hx,
                        n_below: m,
                        n_above: cur,
                    });
                    cur = m;
                }
                _ => break,
            }
        }
        out
    }

    /// Ground sectors over `h >= 0`, each with a field inside its range:
    /// `h_top` for `n = 0`, interval midpoints otherwise.
    pub fn representative_fields(&self, h_top: f64) -> Vec<(usize, f64)> {
        let b = self.boundaries();
        let mut out = vec![(0, h_top.max(b.first().map_or(0.0, |x| x.h)))];
        for (i, x) in b.iter().enumerate() {
            let lower = b.get(i + 1).map_or(0.0, |y| y.h);
            out.push((x.n_below, 0.5 * (x.h + lower)));
        }
        out
    }
}

/// Level crossings of the ground sector for `h > 0`.
pub fn sector_boundaries(n_bath: usize) -> Result<Vec<SectorBoundary>> {
    Ok(XxSpectrum::new(n_bath)?.boundaries())
}
