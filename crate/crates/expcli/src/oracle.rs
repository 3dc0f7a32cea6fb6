//! Brute-force verification harness: every fast path is compared against an
//! independent dense or full-space computation, one row per (check, N).

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use spinbath_core::darwinism::{mi_profile, mi_profile_symmetric, mutual_information, FragmentStrategy};
use spinbath_core::dense;
use spinbath_core::dynamics::{coherence, evolve_branches, expm_multiply, global_state, EvolutionSpec, KrylovOptions};
use spinbath_core::magnon::{fragment_state_closed_form, loschmidt_amplitude, MagnonPropagator, MagnonState};
use spinbath_core::spin::{entanglement_entropy, von_neumann_entropy, Complex64, PureState, RegisterLayout};
use spinbath_core::xx::{build_branch, global_ground, sector_ground, sector_states};

use crate::config::MAX_ORACLE_BATH;
use crate::error::{CliError, Result};
use crate::table::{Cell, ColumnKind, ResultTable};

pub const MIN_ORACLE_BATH: usize = 3;

/// Fields at which ground energies are compared.
const FIELDS: [f64; 3] = [0.0, 0.5, 1.3];
/// Evolution time of the dynamical checks.
const TIME: f64 = 0.7;
const FIELD: f64 = 0.5;
const LAMBDA: f64 = 0.5;

pub const CHECKS: [&str; 8] = [
    "sector_energy",
    "global_energy",
    "fast_vs_krylov",
    "krylov_vs_dense",
    "magnon_nu",
    "magnon_entropy",
    "magnon_mi",
    "ghz_mi",
];

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sector_energy(n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for h in FIELDS {
        let full = dense::xx_bath(n, 0, n, h);
        for s in 0..=n {
            let rows = sector_states(n, s);
            let block = DMatrix::from_fn(rows.len(), rows.len(), |a, b| full[(rows[a], rows[b])]);
            worst = worst.max((sector_ground(n, h, s)?.energy - dense::eigenvalues(&block)[0]).abs());
        }
    }
    Ok(worst)
}

fn global_energy(n: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for h in FIELDS {
        let e = dense::ground_energy_real(&dense::xx_bath(n, 0, n, h));
        worst = worst.max((global_ground(n, h)?.energy - e).abs());
    }
    Ok(worst)
}

/// Rotation fast path against Lanczos on the explicit `λ = 0` branch operators.
fn fast_vs_krylov(n: usize) -> Result<f64> {
    let g = sector_ground(n, FIELD, n / 2)?.vector;
    let spec = EvolutionSpec::new(n, 1.0, 0.0, FIELD, vec![0.0, TIME])?;
    let pair = evolve_branches(&g, &spec, TIME)?;
    let mut worst = 0.0f64;
    for (sign, fast) in [(1.0, &pair.up), (-1.0, &pair.down)] {
        let op = build_branch(n, 1.0, sign, 0.0, FIELD)?;
        let (slow, _) = expm_multiply(&op, g.amplitudes(), TIME, KrylovOptions::default());
        worst = worst.max(max_diff(fast.amplitudes(), &slow));
    }
    Ok(worst)
}

fn krylov_vs_dense(n: usize) -> Result<f64> {
    let g = sector_ground(n, FIELD, n / 2)?.vector;
    let spec = EvolutionSpec::new(n, 1.0, LAMBDA, FIELD, vec![0.0, TIME])?;
    let pair = evolve_branches(&g, &spec, TIME)?;
    let mut worst = 0.0f64;
    for (sign, fast) in [(1.0, &pair.up), (-1.0, &pair.down)] {
        let m = dense::branch_hamiltonian(n, 1.0, sign, LAMBDA, FIELD);
        worst = worst.max(max_diff(
            fast.amplitudes(),
            &dense::expm_apply(&m, TIME, g.amplitudes()),
        ));
    }
    Ok(worst)
}

/// Magnon-path branches and the matching full-space evolution.
struct MagnonCase {
    plus: MagnonState,
    minus: MagnonState,
    global: PureState,
    nu: Complex64,
}

fn magnon_cases(n: usize) -> Result<Vec<MagnonCase>> {
    let prop = MagnonPropagator::new(n)?;
    (0..=1)
        .map(|s| {
            let c0 = MagnonState::sector_ground(n, s)?;
            let (plus, minus) = prop.branches(&c0, TIME)?;
            let spec = EvolutionSpec::new(n, 1.0, 0.0, FIELD, vec![0.0, TIME])?;
            let pair = evolve_branches(&c0.lift()?, &spec, TIME)?;
            Ok(MagnonCase {
                plus,
                minus,
                global: global_state(&pair)?,
                nu: coherence(&pair)?,
            })
        })
        .collect()
}

fn magnon_nu(cases: &[MagnonCase]) -> Result<f64> {
    cases.iter().try_fold(0.0f64, |w, c| {
        Ok(w.max((loschmidt_amplitude(&c.plus, &c.minus)? - c.nu).norm()))
    })
}

fn magnon_entropy(n: usize, cases: &[MagnonCase]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in cases {
        for k in 1..=n {
            for with_system in [false, true] {
                let closed = von_neumann_entropy(&fragment_state_closed_form(&c.plus, &c.minus, k, with_system)?)?;
                let mut keep: Vec<usize> = (1..=k).collect();
                if with_system {
                    keep.push(0);
                }
                worst = worst.max((closed - entanglement_entropy(&c.global, &keep)?).abs());
            }
        }
    }
    Ok(worst)
}

fn magnon_mi(cases: &[MagnonCase]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in cases {
        let closed = mi_profile_symmetric(&c.plus, &c.minus, TIME)?;
        let full = mi_profile(&c.global, FragmentStrategy::Contiguous, TIME)?;
        let d = closed
            .entries
            .iter()
            .zip(&full.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(d).max((closed.system_entropy - full.system_entropy).abs());
    }
    Ok(worst)
}

/// GHZ branching state: every proper fragment holds the full record, `I = H_S = 1`.
fn ghz_mi(n: usize) -> Result<f64> {
    let layout = RegisterLayout::with_system(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[layout.dim() - 1] = amps[0];
    let psi = PureState::new(layout, amps)?;
    let h_s = entanglement_entropy(&psi, &[0])?;
    let mut worst = (h_s - 1.0).abs();
    for mask in 1..(1usize << n) - 1 {
        let fragment: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        worst = worst.max((mutual_information(&psi, &fragment)? - h_s).abs());
    }
    Ok(worst)
}

fn checks_for(n: usize) -> Result<Vec<(&'static str, f64)>> {
    let cases = magnon_cases(n)?;
    Ok(vec![
        ("sector_energy", sector_energy(n)?),
        ("global_energy", global_energy(n)?),
        ("fast_vs_krylov", fast_vs_krylov(n)?),
        ("krylov_vs_dense", krylov_vs_dense(n)?),
        ("magnon_nu", magnon_nu(&cases)?),
        ("magnon_entropy", magnon_entropy(n, &cases)?),
        ("magnon_mi", magnon_mi(&cases)?),
        ("ghz_mi", ghz_mi(n)?),
    ])
}

/// Deviation table for every bath size `3..=max_n`; deviations are recorded,
/// not judged (see [`verify`]).
pub fn oracle_table(max_n: usize) -> Result<ResultTable> {
    if !(MIN_ORACLE_BATH..=MAX_ORACLE_BATH).contains(&max_n) {
        return Err(CliError::Validation(format!(
            "oracle max N must lie in {MIN_ORACLE_BATH}..={MAX_ORACLE_BATH}, got {max_n}"
        )));
    }
    let start = Instant::now();
    let results = (MIN_ORACLE_BATH..=max_n)
        .into_par_iter()
        .map(|n| checks_for(n).map(|c| (n, c)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(
        "oracle",
        &[
            ("check", ColumnKind::Text),
            ("N", ColumnKind::Int),
            ("deviation", ColumnKind::Float),
        ],
    );
    for (n, checks) in results {
        for (check, dev) in checks {
            let slot = table
                .diagnostics
                .oracle_deviations
                .entry(check.to_string())
                .or_insert(0.0);
            *slot = slot.max(dev);
            table.push(vec![
                Cell::Text(check.to_string()),
                Cell::Int(n as i64),
                Cell::Float(dev),
            ])?;
        }
    }
    table.wall_time_s = start.elapsed().as_secs_f64();
    Ok(table)
}

/// First row whose deviation exceeds `tolerance`, as an error.
pub fn verify(table: &ResultTable, tolerance: f64) -> Result<()> {
    for row in &table.rows {
        let (Cell::Text(check), Cell::Int(n), Cell::Float(dev)) = (&row[0], &row[1], &row[2]) else {
            continue;
        };
        if dev.is_nan() || *dev > tolerance {
            return Err(CliError::OracleDeviation {
                check: check.clone(),
                n_bath: *n as usize,
                deviation: *dev,
                tolerance,
            });
        }
    }
    Ok(())
}

/// [`oracle_table`] followed by [`verify`].
pub fn run_oracle_suite(max_n: usize, tolerance: f64) -> Result<ResultTable> {
    let table = oracle_table(max_n)?;
    verify(&table, tolerance)?;
    Ok(table)
}
