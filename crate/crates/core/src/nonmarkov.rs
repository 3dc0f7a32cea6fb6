//! Trace-distance trajectory `D(t) = |ν(t)|` of the dephasing qubit and the
//! BLP non-Markovianity measure.
//!
//! For pure dephasing the maximizing pair of initial system states is a pair
//! of antipodal equatorial states, whose trace distance is `√L(t) = |ν(t)|`.
//! No optimization over pairs is performed.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::darwinism::{initial_bath_state, InitialSector};
use crate::dynamics::{branch_trajectory, coherence, evolve_branches, uniform_grid, EvolutionSpec, SpinFlipSpectrum};
use crate::error::{Error, Result};
use crate::magnon::{MagnonPropagator, MagnonState};
use crate::spin::PureState;
use crate::xx::{sector_ground, XxSpectrum};

/// Default upper end of the integration window, in units of `1/d`.
pub const DEFAULT_WINDOW: f64 = FRAC_PI_4;
/// Default number of grid intervals on the window.
pub const DEFAULT_INTERVALS: usize = 4096;
/// Largest grid tried by the automatic refinement.
pub const MAX_INTERVALS: usize = 1 << 20;
/// Allowed change of the measure when the grid is halved.
pub const CONVERGENCE_TOL: f64 = 1e-4;
/// Increments of `D` at or below this are treated as numerical noise.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoherencePath {
    /// Dicke-ladder closed form (`λ = 0`, sectors 0 and 1).
    Magnon,
    /// σˣ-eigenbasis weights of the initial state (`λ = 0`, any sector).
    SpinFlipSpectrum,
    /// Explicit branch evolution on the full bath register.
    Branches,
}

impl CoherencePath {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Magnon => "magnon",
            Self::SpinFlipSpectrum => "spin-flip-spectrum",
            Self::Branches => "branches",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTrajectory {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub path: CoherencePath,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BLPResult {
    pub value: f64,
    pub grid_points: usize,
    /// `|𝒩(grid) - 𝒩(every other grid point)|`
    pub convergence: f64,
}

fn default_path(spec: &EvolutionSpec, sector: usize) -> CoherencePath {
    match (spec.is_strong_coupling(), sector) {
        (true, 0 | 1) => CoherencePath::Magnon,
        (true, _) => CoherencePath::SpinFlipSpectrum,
        _ => CoherencePath::Branches,
    }
}

/// Exact `D(t)` for one evolution, evaluable at any time.
enum DistanceSource {
    Magnon {
        prop: MagnonPropagator,
        c0: MagnonState,
        d: f64,
    },
    Spectrum {
        spectrum: SpinFlipSpectrum,
        d: f64,
    },
    Branches {
        g: PureState,
        spec: EvolutionSpec,
    },
}

impl DistanceSource {
    fn new(spec: &EvolutionSpec, sector: usize, g: PureState, path: CoherencePath) -> Result<Self> {
        Ok(match path {
            CoherencePath::Magnon => {
                if !spec.is_strong_coupling() {
                    return Err(Error::InvalidEvolution("closed form needs lambda = 0".into()));
                }
                Self::Magnon {
                    prop: MagnonPropagator::new(spec.n_bath)?,
                    c0: MagnonState::sector_ground(spec.n_bath, sector)?,
                    d: spec.d,
                }
            }
            CoherencePath::SpinFlipSpectrum => {
                if !spec.is_strong_coupling() {
                    return Err(Error::InvalidEvolution("spectral form needs lambda = 0".into()));
                }
                Self::Spectrum {
                    spectrum: SpinFlipSpectrum::from_state(&g)?,
                    d: spec.d,
                }
            }
            CoherencePath::Branches => Self::Branches { g, spec: spec.clone() },
        })
    }

    fn distance(&self, t: f64) -> Result<f64> {
        let nu = match self {
            Self::Magnon { prop, c0, d } => prop.coherence(c0, d * t)?,
            Self::Spectrum { spectrum, d } => spectrum.coherence(*d, t),
            Self::Branches { g, spec } => coherence(&evolve_branches(g, spec, t)?)?,
        };
        Ok(nu.norm().min(1.0))
    }

    fn trajectory(&self, grid: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Branches { g, spec } => {
                let spec = EvolutionSpec {
                    time_grid: grid.to_vec(),
                    ..spec.clone()
                };
                branch_trajectory(g, &spec)?
                    .iter()
                    .map(|p| coherence(p).map(|z| z.norm().min(1.0)))
                    .collect()
            }
            _ => grid.par_iter().map(|&t| self.distance(t)).collect(),
        }
    }
}

fn resolve(
    spec: &EvolutionSpec,
    initial: InitialSector,
    path: Option<CoherencePath>,
) -> Result<(CoherencePath, DistanceSource)> {
    spec.validate()?;
    // the closed form never needs the full register
    if let (true, InitialSector::Sector(n @ (0 | 1)), None | Some(CoherencePath::Magnon)) =
        (spec.is_strong_coupling(), initial, path)
    {
        let source = DistanceSource::Magnon {
            prop: MagnonPropagator::new(spec.n_bath)?,
            c0: MagnonState::sector_ground(spec.n_bath, n)?,
            d: spec.d,
        };
        return Ok((CoherencePath::Magnon, source));
    }
    let (sector, g) = initial_bath_state(spec, initial)?;
    let path = path.unwrap_or_else(|| default_path(spec, sector));
    Ok((path, DistanceSource::new(spec, sector, g, path)?))
}

/// `D(t_i) = |ν(t_i)|` on the spec's time grid, choosing the cheapest exact
/// path for the configuration.
pub fn distance_trajectory(spec: &EvolutionSpec, initial: InitialSector) -> Result<DistanceTrajectory> {
    distance_trajectory_via(spec, initial, None)
}

/// As [`distance_trajectory`], with an explicit path when `path` is set.
pub fn distance_trajectory_via(
    spec: &EvolutionSpec,
    initial: InitialSector,
    path: Option<CoherencePath>,
) -> Result<DistanceTrajectory> {
    let (path, source) = resolve(spec, initial, path)?;
    Ok(DistanceTrajectory {
        times: spec.time_grid.clone(),
        distances: source.trajectory(&spec.time_grid)?,
        path,
    })
}

/// `Σ_i max(0, D_{i+1} - D_i)`, ignoring increments at noise level.
pub fn positive_variation(d: &[f64]) -> f64 {
    d.windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&x| x > MONOTONE_TOL)
        .fold(0.0, |acc, x| acc + x)
}

fn convergence_check(value: f64, coarse: f64, points: usize) -> Result<BLPResult> {
    let convergence = (value - coarse).abs();
    if convergence > CONVERGENCE_TOL {
        return Err(Error::NotConverged {
            points,
            estimate: convergence,
            suggested: 2 * (points.max(2) - 1) + 1,
        });
    }
    Ok(BLPResult {
        value,
        grid_points: points,
        convergence,
    })
}

fn every_other<T: Copy>(v: &[T]) -> Vec<T> {
    v.iter().step_by(2).copied().collect()
}

/// BLP measure as the positive variation of `D` on the grid, with a
/// convergence check against the grid of every other point.
pub fn blp_measure(traj: &DistanceTrajectory) -> Result<BLPResult> {
    let value = positive_variation(&traj.distances);
    let coarse = positive_variation(&every_other(&traj.distances));
    convergence_check(value, coarse, traj.distances.len())
}

/// Golden-section search for the extremum of `f` inside `[a, b]`; `sign = 1`
/// finds a minimum, `-1` a maximum.
fn golden_extremum<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, sign: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = sign * f(x1)?;
    let mut f2 = sign * f(x2)?;
    let tol = 1e-13 * (1.0 + b.abs());
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = sign * f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = sign * f(x2)?;
        }
    }
    Ok(sign * f1.min(f2))
}

/// Grid values with each interior local extremum above noise level replaced by the exact
/// extremum of `f` between the neighbouring grid points.
fn refine_extrema<F: Fn(f64) -> Result<f64>>(times: &[f64], d: &[f64], f: &F) -> Result<Vec<f64>> {
    let mut out = d.to_vec();
    for i in 1..d.len().saturating_sub(1) {
        let (l, c, r) = (d[i - 1], d[i], d[i + 1]);
        if (l - c).abs().max((r - c).abs()) <= MONOTONE_TOL {
            continue;
        }
        if c < l && c <= r {
            out[i] = golden_extremum(f, times[i - 1], times[i + 1], 1.0)?.min(c);
        } else if c > l && c >= r {
            out[i] = golden_extremum(f, times[i - 1], times[i + 1], -1.0)?.max(c);
        }
    }
    Ok(out)
}

/// As [`blp_measure`], with every sampled local extremum of `D` resolved
/// through `distance`. The positive variation then only depends on the
/// extremum values, so cusps of `|ν|` at zeros of `ν` are captured exactly.
pub fn blp_measure_refined<F: Fn(f64) -> Result<f64>>(traj: &DistanceTrajectory, distance: F) -> Result<BLPResult> {
    let fine = refine_extrema(&traj.times, &traj.distances, &distance)?;
    let coarse = refine_extrema(&every_other(&traj.times), &every_other(&traj.distances), &distance)?;
    convergence_check(
        positive_variation(&fine),
        positive_variation(&coarse),
        traj.distances.len(),
    )
}

/// BLP measure at `λ = 0` for the given initial sector on `[0, window]`,
/// refining the grid from [`DEFAULT_INTERVALS`] until it converges.
pub fn blp_strong_coupling(n_bath: usize, h: f64, initial: InitialSector, window: f64) -> Result<BLPResult> {
    blp_strong_coupling_via(n_bath, h, initial, window, None)
}

pub fn blp_strong_coupling_via(
    n_bath: usize,
    h: f64,
    initial: InitialSector,
    window: f64,
    path: Option<CoherencePath>,
) -> Result<BLPResult> {
    let spec = EvolutionSpec::strong_coupling(n_bath, h, vec![0.0, window])?;
    let (path, source) = resolve(&spec, initial, path)?;
    blp_from_source(&source, path, window)
}

fn blp_from_source(source: &DistanceSource, path: CoherencePath, window: f64) -> Result<BLPResult> {
    let mut intervals = DEFAULT_INTERVALS;
    loop {
        let times = uniform_grid(window, intervals + 1);
        let traj = DistanceTrajectory {
            distances: source.trajectory(&times)?,
            times,
            path,
        };
        match blp_measure_refined(&traj, |t| source.distance(t)) {
            Err(Error::NotConverged { .. }) if intervals < MAX_INTERVALS => intervals *= 2,
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub h: f64,
    pub sector: usize,
    pub blp: BLPResult,
}

/// BLP measure per field value; the ground sector at each `h` is resolved
/// from the ring spectrum, and each distinct sector is evaluated once.
pub fn blp_vs_field(n_bath: usize, fields: &[f64], window: f64) -> Result<Vec<FieldPoint>> {
    let spectrum = XxSpectrum::new(n_bath)?;
    let sectors: Vec<usize> = fields.iter().map(|&h| spectrum.ground_sector(h)).collect();
    let mut unique: Vec<usize> = sectors.clone();
    unique.sort_unstable();
    unique.dedup();
    let values: BTreeMap<usize, BLPResult> = unique
        .par_iter()
        .map(|&n| {
            let g = sector_ground(n_bath, 0.0, n)?;
            blp_strong_coupling(n_bath, g.h, InitialSector::Sector(n), window).map(|r| (n, r))
        })
        .collect::<Result<_>>()?;
    Ok(fields
        .iter()
        .zip(&sectors)
        .map(|(&h, &n)| FieldPoint {
            h,
            sector: n,
            blp: values[&n],
        })
        .collect())
}

/// `𝒩(h_C⁻)` for each bath size: the single-magnon initial state through the
/// closed form.
pub fn blp_at_critical(sizes: &[usize], window: f64) -> Result<Vec<(usize, BLPResult)>> {
    sizes
        .par_iter()
        .map(|&n| {
            let source = DistanceSource::Magnon {
                prop: MagnonPropagator::new(n)?,
                c0: MagnonState::dicke(n, 1)?,
                d: 1.0,
            };
            blp_from_source(&source, CoherencePath::Magnon, window).map(|r| (n, r))
        })
        .collect()
}
