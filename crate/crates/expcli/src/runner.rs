//! Experiment recipes: each resolved config becomes one [`ResultTable`].

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use rayon::prelude::*;
use spinbath_core::darwinism::{mi_surface, plateau_report, FragmentStrategy, InitialSector, MIProfile};
use spinbath_core::dense;
use spinbath_core::dynamics::{evolve_branches, global_state, uniform_grid, EvolutionSpec};
use spinbath_core::nonmarkov::{blp_at_critical, blp_vs_field, distance_trajectory, BLPResult};
use spinbath_core::spin::Complex64;
use spinbath_core::xx::{global_ground, sector_ground, SectorGroundState, XxSpectrum};

use crate::config::{Experiment, Plan, ResolvedConfig};
use crate::error::{CliError, Result};
use crate::table::{Cell, ColumnKind, Diagnostics, ResultTable};

/// Field of the `n = 0` row when fig1 picks one field per sector.
const FIG1_TOP_FIELD: f64 = 1.5;

fn schema(experiment: Experiment) -> Vec<(&'static str, ColumnKind)> {
    experiment
        .columns()
        .iter()
        .map(|&c| {
            let kind = match c {
                "n" | "F" | "N" => ColumnKind::Int,
                _ => ColumnKind::Float,
            };
            (c, kind)
        })
        .collect()
}

fn ratio_cell(p: &MIProfile, k: usize) -> Cell {
    p.normalized().map_or(Cell::Missing, |r| Cell::Float(r[k]))
}

fn delta_cell(p: &MIProfile) -> Cell {
    plateau_report(p).delta().map_or(Cell::Missing, Cell::Float)
}

fn note_degeneracy(diag: &mut Diagnostics, g: &SectorGroundState, n_bath: usize, strict: bool) -> Result<()> {
    if g.degenerate {
        if strict {
            return Err(CliError::Degenerate { n_bath, n: g.n });
        }
        log::warn!(
            "degenerate ground level in sector {} (N = {n_bath}, gap {:.2e})",
            g.n,
            g.gap
        );
        if !diag.degenerate_sectors.contains(&(n_bath, g.n)) {
            diag.degenerate_sectors.push((n_bath, g.n));
        }
    }
    Ok(())
}

fn note_blp(diag: &mut Diagnostics, r: &BLPResult) {
    diag.blp_convergence = Some(diag.blp_convergence.unwrap_or(0.0).max(r.convergence));
    diag.blp_grid_points = Some(diag.blp_grid_points.unwrap_or(0).max(r.grid_points));
}

/// Runs the experiment described by `config`; files are written separately
/// with [`ResultTable::write`].
pub fn run_experiment(config: &ResolvedConfig) -> Result<ResultTable> {
    let start = Instant::now();
    let mut table = ResultTable::new(config.name.clone(), &schema(config.experiment));
    match &config.plan {
        Plan::Profiles {
            n_bath,
            d,
            t,
            fields,
            strategy,
        } => profiles(&mut table, config, *n_bath, *d, *t, fields, strategy)?,
        Plan::Surface { .. } => surface(&mut table, config)?,
        Plan::FieldScan { n_bath, fields, window } => {
            let n = *n_bath;
            let sectors: BTreeSet<usize> = {
                let spectrum = XxSpectrum::new(n)?;
                fields.iter().map(|&h| spectrum.ground_sector(h)).collect()
            };
            for &s in &sectors {
                let g = sector_ground(n, 0.0, s)?;
                note_degeneracy(&mut table.diagnostics, &g, n, config.strict)?;
            }
            for p in blp_vs_field(n, fields, *window)? {
                note_blp(&mut table.diagnostics, &p.blp);
                table.push(vec![
                    Cell::Float(p.h),
                    Cell::Int(p.sector as i64),
                    Cell::Float(p.blp.value),
                ])?;
            }
        }
        Plan::SizeScan { sizes, window } => {
            for (n, r) in blp_at_critical(sizes, *window)? {
                note_blp(&mut table.diagnostics, &r);
                table.push(vec![Cell::Int(n as i64), Cell::Float(r.value)])?;
            }
        }
    }
    table.config = Some(config.clone());
    table.wall_time_s = start.elapsed().as_secs_f64();
    Ok(table)
}

fn profiles(
    table: &mut ResultTable,
    config: &ResolvedConfig,
    n_bath: usize,
    d: f64,
    t: f64,
    fields: &[f64],
    strategy: &str,
) -> Result<()> {
    let strategy = FragmentStrategy::parse(strategy).expect("validated strategy");
    let spectrum = XxSpectrum::new(n_bath)?;
    let points: Vec<(usize, f64)> = if fields.is_empty() {
        spectrum.representative_fields(FIG1_TOP_FIELD)
    } else {
        fields.iter().map(|&h| (spectrum.ground_sector(h), h)).collect()
    };
    let results = points
        .par_iter()
        .map(|&(n, h)| -> Result<(SectorGroundState, MIProfile)> {
            let g = sector_ground(n_bath, h, n)?;
            let spec = EvolutionSpec::new(n_bath, d, 0.0, h, vec![0.0, t])?;
            let psi = global_state(&evolve_branches(&g.vector, &spec, t)?)?;
            let profile = spinbath_core::darwinism::mi_profile(&psi, strategy, t)?;
            Ok((g, profile))
        })
        .collect::<Result<Vec<_>>>()?;
    for ((n, h), (g, p)) in points.iter().zip(&results) {
        note_degeneracy(&mut table.diagnostics, g, n_bath, config.strict)?;
        if p.normalized().is_none() {
            table.diagnostics.notes.push(format!(
                "h = {h}: system entropy {:.1e}, I/H_S undefined",
                p.system_entropy
            ));
        }
        for k in 0..=n_bath {
            table.push(vec![
                Cell::Float(*h),
                Cell::Int(*n as i64),
                Cell::Int(k as i64),
                Cell::Float(p.entries[k]),
                ratio_cell(p, k),
            ])?;
        }
    }
    Ok(())
}

fn surface(table: &mut ResultTable, config: &ResolvedConfig) -> Result<()> {
    let Plan::Surface {
        n_bath,
        d,
        h,
        lambdas,
        t_max,
        time_points,
        strategy,
        sector,
        oracle,
    } = &config.plan
    else {
        unreachable!("surface plan")
    };
    let n = *n_bath;
    let strategy = FragmentStrategy::parse(strategy).expect("validated strategy");
    let initial = sector.map_or(InitialSector::Ground, InitialSector::Sector);
    let g = match sector {
        Some(s) => sector_ground(n, *h, *s)?,
        None => global_ground(n, *h)?,
    };
    note_degeneracy(&mut table.diagnostics, &g, n, config.strict)?;
    let grid = if *time_points == 1 {
        vec![0.0]
    } else {
        uniform_grid(*t_max, *time_points)
    };
    let custom = config.experiment == Experiment::Custom;
    for &lambda in lambdas {
        let spec = EvolutionSpec::new(n, *d, lambda, *h, grid.clone())?;
        let surface = mi_surface(&spec, initial, strategy)?;
        let distances = if custom {
            distance_trajectory(&spec, initial)?.distances
        } else {
            Vec::new()
        };
        if *oracle {
            check_against_dense(table, config, &spec, &g, strategy, &surface, &distances)?;
        }
        for (i, p) in surface.iter().enumerate() {
            for k in 0..=n {
                let mut row = vec![
                    Cell::Float(lambda),
                    Cell::Float(p.time),
                    Cell::Int(k as i64),
                    Cell::Float(p.entries[k]),
                ];
                if custom {
                    row.push(ratio_cell(p, k));
                    row.push(Cell::Float(distances[i]));
                } else {
                    row.push(delta_cell(p));
                }
                table.push(row)?;
            }
        }
    }
    Ok(())
}

/// Recomputes the surface by dense matrix exponentials and brute-force
/// partial traces, recording the worst deviation per quantity.
fn check_against_dense(
    table: &mut ResultTable,
    config: &ResolvedConfig,
    spec: &EvolutionSpec,
    g: &SectorGroundState,
    strategy: FragmentStrategy,
    surface: &[MIProfile],
    distances: &[f64],
) -> Result<()> {
    let n = spec.n_bath;
    let full = dense::full_hamiltonian(n, spec.d, spec.lambda, spec.h);
    let mut start = vec![Complex64::new(0.0, 0.0); 2 << n];
    for (b, a) in g.vector.amplitudes().iter().enumerate() {
        start[b << 1] = a * FRAC_1_SQRT_2;
        start[(b << 1) | 1] = a * FRAC_1_SQRT_2;
    }
    let fragments = |k: usize| -> Vec<Vec<usize>> {
        match strategy {
            FragmentStrategy::SubsetAverage => spinbath_core::xx::sector_states(n, k)
                .into_iter()
                .map(|b| (0..n).filter(|j| b >> j & 1 == 1).map(|j| j + 1).collect())
                .collect(),
            _ => vec![(1..=k).collect()],
        }
    };
    let (mut mi_dev, mut d_dev) = (0.0f64, 0.0f64);
    for (p, dist) in surface.iter().zip(distances) {
        let psi = dense::expm_apply(&full, p.time, &start);
        let rho_s = dense::partial_trace(&psi, n + 1, &[0]);
        d_dev = d_dev.max(((rho_s[(0, 1)] * 2.0).norm() - dist).abs());
        for k in 0..=n {
            let frags = fragments(k);
            let avg = frags
                .iter()
                .map(|f| dense::mutual_information(&psi, n + 1, f))
                .sum::<f64>()
                / frags.len() as f64;
            mi_dev = mi_dev.max((avg - p.entries[k]).abs());
        }
    }
    let tol = config.oracle_tolerance;
    for (check, dev) in [("custom_mutual_information", mi_dev), ("custom_trace_distance", d_dev)] {
        let slot = table
            .diagnostics
            .oracle_deviations
            .entry(check.to_string())
            .or_insert(0.0);
        *slot = slot.max(dev);
        if dev > tol {
            return Err(CliError::OracleDeviation {
                check: check.to_string(),
                n_bath: n,
                deviation: dev,
                tolerance: tol,
            });
        }
    }
    Ok(())
}
