//! Mutual information between the system and bath fragments,
//! `I(S:F) = H_S + H_F - H_SF`, in bits.

use rayon::prelude::*;

use crate::dynamics::{branch_trajectory, global_state, EvolutionSpec};
use crate::error::{Error, Result};
use crate::magnon::{fragment_state_closed_form, MagnonPropagator, MagnonState};
use crate::spin::{entanglement_entropy, von_neumann_entropy, PureState};
use crate::xx::{global_ground, sector_ground};

/// Tolerance on the pure-state identities of a profile.
pub const PROFILE_TOL: f64 = 1e-8;
/// Below this system entropy the plateau ratio is not reported.
pub const MIN_SYSTEM_ENTROPY: f64 = 1e-6;
/// Half-width of the band `|I/H_S - 1| ≤ PLATEAU_BAND` defining plateau width.
pub const PLATEAU_BAND: f64 = 0.1;
/// Largest bath for which all `C(N, k)` fragments are enumerated.
pub const MAX_SUBSET_AVERAGE: usize = 12;

/// How the fragment of each size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FragmentStrategy {
    /// Bath spins `0..k`; exact for permutation-invariant states and, by
    /// translation invariance of the ring, independent of the start site.
    Contiguous,
    /// Mean over every `k`-subset of the bath.
    SubsetAverage,
    /// Dicke-basis closed form for swap-invariant states.
    SymmetricClosedForm,
}

impl FragmentStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Contiguous => "contiguous",
            Self::SubsetAverage => "subset-average",
            Self::SymmetricClosedForm => "symmetric-closed-form",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "contiguous" => Some(Self::Contiguous),
            "subset-average" => Some(Self::SubsetAverage),
            "symmetric-closed-form" => Some(Self::SymmetricClosedForm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MIProfile {
    pub n_bath: usize,
    pub time: f64,
    /// `I(#F)` for `#F = 0..=N`.
    pub entries: Vec<f64>,
    pub system_entropy: f64,
    pub strategy: FragmentStrategy,
}

impl MIProfile {
    /// `I(#F) / H_S`, or `None` when `H_S` is too small to normalize by.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        (self.system_entropy > MIN_SYSTEM_ENTROPY)
            .then(|| self.entries.iter().map(|i| i / self.system_entropy).collect())
    }

    /// Worst violation of `I(k) + I(N-k) = 2 H_S`.
    pub fn antisymmetry_error(&self) -> f64 {
        let n = self.n_bath;
        (0..=n)
            .map(|k| (self.entries[k] + self.entries[n - k] - 2.0 * self.system_entropy).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlateauReport {
    Defined {
        /// `max_{1≤#F≤N-1} |I(#F)/H_S - 1|`
        delta: f64,
        /// Size count of the largest centered `#F` interval inside the band.
        plateau_width: usize,
    },
    /// System entropy below [`MIN_SYSTEM_ENTROPY`].
    Undefined { system_entropy: f64 },
}

impl PlateauReport {
    pub fn delta(&self) -> Option<f64> {
        match self {
            Self::Defined { delta, .. } => Some(*delta),
            Self::Undefined { .. } => None,
        }
    }
}

fn check_fragment(state: &PureState, fragment: &[usize]) -> Result<Vec<usize>> {
    let layout = state.layout();
    let sys = layout.system_qubit().ok_or(Error::MissingSystem)?;
    fragment
        .iter()
        .map(|&j| {
            layout
                .bath_qubit(j)
                .map_err(|_| Error::FragmentContainsSystem)
                .and_then(|q| {
                    if q == sys {
                        Err(Error::FragmentContainsSystem)
                    } else {
                        Ok(q)
                    }
                })
        })
        .collect()
}

/// `I(S:F)` for the fragment of bath spins `fragment` (0-based bath indices).
pub fn mutual_information(state: &PureState, fragment: &[usize]) -> Result<f64> {
    let qubits = check_fragment(state, fragment)?;
    if qubits.is_empty() {
        return Ok(0.0);
    }
    let h_s = entanglement_entropy(state, &[0])?;
    mi_with_system_entropy(state, &qubits, h_s)
}

fn mi_with_system_entropy(state: &PureState, qubits: &[usize], h_s: f64) -> Result<f64> {
    if qubits.is_empty() {
        return Ok(0.0);
    }
    let h_f = entanglement_entropy(state, qubits)?;
    let mut with_sys = Vec::with_capacity(qubits.len() + 1);
    with_sys.push(0);
    with_sys.extend_from_slice(qubits);
    let h_sf = entanglement_entropy(state, &with_sys)?;
    // subadditivity makes this non-negative up to rounding
    Ok((h_s + h_f - h_sf).max(0.0))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::xx::sector_states(n, k)
        .into_iter()
        .map(|b| (0..n).filter(|j| b >> j & 1 == 1).collect())
        .collect()
}

/// Mutual-information profile over fragment sizes `0..=N` of a global pure
/// state carrying the system qubit.
pub fn mi_profile(state: &PureState, strategy: FragmentStrategy, time: f64) -> Result<MIProfile> {
    let layout = state.layout();
    if !layout.has_system() {
        return Err(Error::MissingSystem);
    }
    let n = layout.n_bath();
    let h_s = entanglement_entropy(state, &[0])?;
    let entries = match strategy {
        FragmentStrategy::Contiguous | FragmentStrategy::SymmetricClosedForm => (0..=n)
            .into_par_iter()
            .map(|k| {
                let q: Vec<usize> = (1..=k).collect();
                mi_with_system_entropy(state, &q, h_s)
            })
            .collect::<Result<Vec<_>>>()?,
        FragmentStrategy::SubsetAverage => {
            if n > MAX_SUBSET_AVERAGE {
                return Err(Error::TooManySubsets {
                    n_bath: n,
                    max: MAX_SUBSET_AVERAGE,
                });
            }
            (0..=n)
                .into_par_iter()
                .map(|k| {
                    let all = subsets(n, k);
                    let count = all.len() as f64;
                    all.iter()
                        .map(|f| {
                            let q: Vec<usize> = f.iter().map(|j| j + 1).collect();
                            mi_with_system_entropy(state, &q, h_s)
                        })
                        .sum::<Result<f64>>()
                        .map(|s| s / count)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(MIProfile {
        n_bath: n,
        time,
        entries,
        system_entropy: h_s,
        strategy,
    })
}

/// Profile from the Dicke-basis closed form, given the branch coefficients.
pub fn mi_profile_symmetric(c_plus: &MagnonState, c_minus: &MagnonState, time: f64) -> Result<MIProfile> {
    let n = c_plus.n_bath();
    let h_s = von_neumann_entropy(&fragment_state_closed_form(c_plus, c_minus, 0, true)?)?;
    // entropy of (fragment k [+ system]) via whichever side is smaller
    let entropy = |k: usize, with_system: bool| -> Result<f64> {
        let dim = (k + 1) * if with_system { 2 } else { 1 };
        let comp_dim = (n - k + 1) * if with_system { 1 } else { 2 };
        let rho = if dim <= comp_dim {
            fragment_state_closed_form(c_plus, c_minus, k, with_system)?
        } else {
            fragment_state_closed_form(c_plus, c_minus, n - k, !with_system)?
        };
        von_neumann_entropy(&rho)
    };
    let entries = (0..=n)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return Ok(0.0);
            }
            Ok((h_s + entropy(k, false)? - entropy(k, true)?).max(0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MIProfile {
        n_bath: n,
        time,
        entries,
        system_entropy: h_s,
        strategy: FragmentStrategy::SymmetricClosedForm,
    })
}

pub fn plateau_report(profile: &MIProfile) -> PlateauReport {
    let h_s = profile.system_entropy;
    if h_s <= MIN_SYSTEM_ENTROPY {
        return PlateauReport::Undefined { system_entropy: h_s };
    }
    let n = profile.n_bath;
    let dev = |k: usize| (profile.entries[k] / h_s - 1.0).abs();
    let delta = (1..n).map(dev).fold(0.0, f64::max);
    // centered intervals [lo - r, hi + r] around the middle size(s)
    let (lo, hi) = if n.is_multiple_of(2) {
        (n / 2, n / 2)
    } else {
        (n / 2, n / 2 + 1)
    };
    let mut width = 0;
    if n >= 2 {
        let mut r = 0;
        while r < lo && hi + r < n {
            let (a, b) = (lo - r, hi + r);
            if (a..=b).all(|k| dev(k) <= PLATEAU_BAND) {
                width = b - a + 1;
                r += 1;
            } else {
                break;
            }
        }
    }
    PlateauReport::Defined {
        delta,
        plateau_width: width,
    }
}

/// Which bath state starts the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialSector {
    /// Global ground state of `H_B` at the spec's field.
    Ground,
    /// Ground state of the given excitation sector.
    Sector(usize),
}

/// Resolves the initial bath state for `spec`; returns the sector index too.
pub fn initial_bath_state(spec: &EvolutionSpec, initial: InitialSector) -> Result<(usize, PureState)> {
    let g = match initial {
        InitialSector::Ground => global_ground(spec.n_bath, spec.h)?,
        InitialSector::Sector(n) => sector_ground(spec.n_bath, spec.h, n)?,
    };
    Ok((g.n, g.vector))
}

/// Profiles on every time of the spec's grid. The strong-coupling case with a
/// swap-invariant initial sector goes through the closed form; everything
/// else evolves the branch states once and reuses them for all fragments.
pub fn mi_surface(spec: &EvolutionSpec, initial: InitialSector, strategy: FragmentStrategy) -> Result<Vec<MIProfile>> {
    spec.validate()?;
    let (n, g) = initial_bath_state(spec, initial)?;
    if spec.is_strong_coupling() && strategy == FragmentStrategy::SymmetricClosedForm {
        let prop = MagnonPropagator::new(spec.n_bath)?;
        let c0 = MagnonState::sector_ground(spec.n_bath, n)?;
        return spec
            .time_grid
            .par_iter()
            .map(|&t| {
                let (p, m) = prop.branches(&c0, spec.d * t)?;
                mi_profile_symmetric(&p, &m, t)
            })
            .collect();
    }
    let strategy = match strategy {
        FragmentStrategy::SymmetricClosedForm => FragmentStrategy::Contiguous,
        s => s,
    };
    let pairs = branch_trajectory(&g, spec)?;
    pairs
        .par_iter()
        .map(|pair| mi_profile(&global_state(pair)?, strategy, pair.time))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{Complex64, RegisterLayout};
    use approx::assert_abs_diff_eq;

    /// `α|0⟩|0…0⟩ + β|1⟩|1…1⟩` over system + `n` bath spins.
    fn ghz(n: usize, alpha: f64) -> PureState {
        let l = RegisterLayout::with_system(n).unwrap();
        let beta = (1.0 - alpha * alpha).sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); l.dim()];
        amps[0] = Complex64::new(alpha, 0.0);
        amps[l.dim() - 1] = Complex64::new(beta, 0.0);
        PureState::new(l, amps).unwrap()
    }

    #[test]
    fn ghz_mutual_information() {
        let s = ghz(5, 0.6);
        let p2 = 0.36f64;
        let h_s = -(p2 * p2.log2()) - (1.0 - p2) * (1.0 - p2).log2();
        for k in 1..5 {
            let frag: Vec<usize> = (0..k).collect();
            assert_abs_diff_eq!(mutual_information(&s, &frag).unwrap(), h_s, epsilon = 1e-12);
        }
        assert_eq!(mutual_information(&s, &[]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            mutual_information(&s, &[0, 1, 2, 3, 4]).unwrap(),
            2.0 * h_s,
            epsilon = 1e-12
        );
        let profile = mi_profile(&s, FragmentStrategy::Contiguous, 0.0).unwrap();
        assert_eq!(
            plateau_report(&profile),
            PlateauReport::Defined {
                delta: plateau_report(&profile).delta().unwrap(),
                plateau_width: 4
            }
        );
        assert!(plateau_report(&profile).delta().unwrap() < 1e-12);
    }

    #[test]
    fn fragment_errors() {
        let s = ghz(3, 0.6);
        assert!(matches!(
            mutual_information(&s, &[3]),
            Err(Error::FragmentContainsSystem)
        ));
        let bath_only = PureState::basis(RegisterLayout::bath(3).unwrap(), 0).unwrap();
        assert!(matches!(
            mutual_information(&bath_only, &[0]),
            Err(Error::MissingSystem)
        ));
    }

    fn synthetic(entries: Vec<f64>, h_s: f64) -> MIProfile {
        MIProfile {
            n_bath: entries.len() - 1,
            time: 0.0,
            entries,
            system_entropy: h_s,
            strategy: FragmentStrategy::Contiguous,
        }
    }

    #[test]
    fn plateau_widths() {
        let flat = synthetic(vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0], 1.0);
        assert_eq!(
            plateau_report(&flat),
            PlateauReport::Defined {
                delta: 0.0,
                plateau_width: 5
            }
        );
        // odd N: centered pair {2, 3} then {1..4}
        let odd = synthetic(vec![0.0, 0.5, 0.95, 1.05, 1.5, 2.0], 1.0);
        match plateau_report(&odd) {
            PlateauReport::Defined { delta, plateau_width } => {
                assert_abs_diff_eq!(delta, 0.5, epsilon = 1e-15);
                assert_eq!(plateau_width, 2);
            }
            other => panic!("{other:?}"),
        }
        let broken = synthetic(vec![0.0, 0.2, 0.5, 1.8, 2.0], 1.0);
        assert_eq!(plateau_report(&broken).delta(), Some(0.8));
        assert!(matches!(
            plateau_report(&broken),
            PlateauReport::Defined { plateau_width: 0, .. }
        ));
        assert!(matches!(
            plateau_report(&synthetic(vec![0.0, 0.0, 0.0], 1e-9)),
            PlateauReport::Undefined { .. }
        ));
    }
}
