use std::f64::consts::{PI, TAU};

use qidiode_core::oracle::{build_chain_hamiltonian, otoc_exact, ExactChain, MAX_DENSE_SITES};
use qidiode_core::otoc::LatticePropagator;
use qidiode_core::rectify::max_dt;
use qidiode_core::{
    build_mode_set, dispersion_1d, group_velocity_1d, otoc_series, sweep_rectification, Branch, QuadratureSettings,
    TimeGrid,
};
use thiserror::Error;

use crate::config::RunConfig;
use crate::table::OutputTable;

/// Engine/oracle agreement required by `lattice-otoc`.
pub const LATTICE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Model(#[from] qidiode_core::Error),

    #[error("{0}")]
    Invalid(String),

    #[error("invariant violated: {0}")]
    Violation(String),
}

impl CommandError {
    /// Exit code: 1 for invariant failures, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Violation(_) => 1,
            _ => 2,
        }
    }
}

fn with_config_metadata(table: &mut OutputTable, command: &str, config: &RunConfig) {
    table.meta("command", command);
    for (key, (value, provenance)) in &config.resolved {
        table.meta(format!("param.{key}"), format!("{value} ({provenance})"));
    }
}

fn grid_for(config: &RunConfig, default_dt: f64) -> Result<(TimeGrid, f64), CommandError> {
    let dt = config.run.dt.unwrap_or(default_dt);
    let steps = (config.run.t_max / dt).round() as usize + 1;
    Ok((TimeGrid::new(dt, steps)?, dt))
}

/// `omega_+-` and `v_g+-` sampled uniformly over `ka in [-pi, pi]`.
pub fn run_dispersion(config: &RunConfig) -> Result<OutputTable, CommandError> {
    let params = &config.model;
    let points = config.run.k_points;
    let mut table = OutputTable::new(["k", "omega_plus", "omega_minus", "vg_plus", "vg_minus"]);
    with_config_metadata(&mut table, "dispersion", config);
    for i in 0..points {
        let ka = -PI + TAU * i as f64 / (points - 1) as f64;
        let k = ka / params.a;
        table.push_row(vec![
            k,
            dispersion_1d(params, k, Branch::Plus),
            dispersion_1d(params, k, Branch::Minus),
            group_velocity_1d(params, k, Branch::Plus),
            group_velocity_1d(params, k, Branch::Minus),
        ]);
    }
    Ok(table)
}

/// Left and right OTOCs at `r_sites` lattice spacings on `[0, t_max]`.
pub fn run_otoc(config: &RunConfig) -> Result<OutputTable, CommandError> {
    let params = &config.model;
    let mode_set = build_mode_set(params)?;
    let (grid, dt) = grid_for(config, qidiode_core::rectify::default_dt(&mode_set))?;
    let series = otoc_series(params, config.r(), &grid, None)?;

    let mut table = OutputTable::new(["t", "c_left", "c_right"]);
    with_config_metadata(&mut table, "otoc", config);
    table.meta("zeta", series.zeta);
    table.meta("blocked_side", format!("{:?}", series.blocked).to_lowercase());
    table.meta("modes", mode_set.len());
    table.meta("dt", dt);
    let limit = max_dt(&mode_set);
    let under_resolved = dt > limit;
    if under_resolved {
        log::warn!("dt = {dt} under-resolves the fastest mode (limit {limit})");
    }
    table.meta("under_resolved", under_resolved);

    for ((t, l), r) in series.times.iter().zip(&series.c_left).zip(&series.c_right) {
        table.push_row(vec![*t, *l, *r]);
    }
    Ok(table)
}

/// `R(D)` over `d_values()` against the analytic `zeta^4`.
pub fn run_rectify(config: &RunConfig) -> Result<OutputTable, CommandError> {
    let quad = QuadratureSettings {
        t_truncation: config.run.t_truncation,
        dt: config.run.dt,
    };
    let rows = sweep_rectification(&config.model, config.r(), &config.d_values(), &quad)?;

    let mut table = OutputTable::new(["D", "zeta", "R", "R_analytic"]);
    with_config_metadata(&mut table, "rectify", config);
    let stalled: Vec<String> = rows.iter().filter(|r| !r.converged).map(|r| r.d.to_string()).collect();
    let worst_tail = rows.iter().map(|r| r.tail_estimate).fold(0.0, f64::max);
    table.meta("tail_estimate_max", worst_tail);
    table.meta("converged", stalled.is_empty());
    if !stalled.is_empty() {
        log::warn!("rectification not converged for D in {stalled:?}");
        table.meta("non_converged_d", stalled.join(" "));
    }
    for row in rows {
        table.push_row(vec![row.d, row.zeta, row.r_coeff, row.r_analytic]);
    }
    Ok(table)
}

/// Operator-level oracle OTOC against `8 p (1 - p)` on the `n_sites` ring.
pub fn run_lattice_otoc(config: &RunConfig) -> Result<OutputTable, CommandError> {
    let n_sites = config.run.n_sites;
    if n_sites > MAX_DENSE_SITES {
        return Err(CommandError::Invalid(format!(
            "n_sites = {n_sites} exceeds the dense budget of {MAX_DENSE_SITES}"
        )));
    }
    let params = config.model.clone().with_n(n_sites);
    let displacement = config.run.displacement;
    if displacement == 0 || displacement.unsigned_abs() as usize >= n_sites {
        return Err(CommandError::Invalid(format!(
            "displacement {displacement} must be non-zero and below n_sites = {n_sites}"
        )));
    }
    let band_max = (0..n_sites)
        .map(|m| dispersion_1d(&params, TAU * m as f64 / (n_sites as f64 * params.a), Branch::Plus))
        .fold(f64::NEG_INFINITY, f64::max);
    let (grid, dt) = grid_for(config, TAU / (40.0 * band_max))?;

    let chain = ExactChain::new(build_chain_hamiltonian(&params, n_sites)?)?;
    let propagator = LatticePropagator::new(&params, displacement)?;
    let probe = displacement.rem_euclid(n_sites as i64) as usize;

    let mut table = OutputTable::new(["t", "c_exact", "c_formula", "abs_err"]);
    with_config_metadata(&mut table, "lattice-otoc", config);
    table.meta("source_site", 1);
    table.meta("probe_site", probe + 1);
    table.meta("dt", dt);

    let mut worst = 0.0f64;
    for t in grid.times() {
        let exact = otoc_exact(&chain, 0, probe, t)?;
        let p = propagator.probability(t);
        let formula = 8.0 * p * (1.0 - p);
        let err = (exact - formula).abs();
        worst = worst.max(err);
        table.push_row(vec![t, exact, formula, err]);
    }
    table.meta("max_abs_err", worst);
    if !(worst < LATTICE_TOLERANCE) {
        return Err(CommandError::Violation(format!(
            "oracle and propagator disagree by {worst:e} (tolerance {LATTICE_TOLERANCE:e})"
        )));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, resolve};

    #[test]
    fn dispersion_table() {
        let cfg = parse_config("").unwrap();
        let t = run_dispersion(&cfg).unwrap();
        assert_eq!(t.rows.len(), 201);
        // Row 150 sits at ka = pi/2.
        let row = &t.rows[150];
        assert!((row[0] * cfg.model.a - PI / 2.0).abs() < 1e-12);
        assert!((row[1] - 4.0).abs() < 1e-12 && (row[2] - 2.0).abs() < 1e-12);

        let reciprocal = run_dispersion(&parse_config("d = 0").unwrap()).unwrap();
        assert_eq!(reciprocal.column("omega_plus"), reciprocal.column("omega_minus"));
    }

    #[test]
    fn dispersion_velocity_columns_match_slopes() {
        let cfg = parse_config("k_points = 2001").unwrap();
        let t = run_dispersion(&cfg).unwrap();
        let k = t.column("k").unwrap();
        let dk = k[1] - k[0];
        for (w, v) in [("omega_plus", "vg_plus"), ("omega_minus", "vg_minus")] {
            let w = t.column(w).unwrap();
            let v = t.column(v).unwrap();
            for i in 1..k.len() - 1 {
                let slope = (w[i + 1] - w[i - 1]) / (2.0 * dk);
                // Slope error budget 2 dk, with dk measured in units of ka.
                assert!((slope - v[i]).abs() < 2.0 * dk * cfg.model.a, "i={i}");
            }
        }
    }

    #[test]
    fn otoc_table() {
        let cfg = resolve("", &["t_max=20".into()]).unwrap();
        let t = run_otoc(&cfg).unwrap();
        let left = t.column("c_left").unwrap();
        let right = t.column("c_right").unwrap();
        assert!(left[0].abs() < 1e-12);
        let z4 = (-0.8f64).exp();
        for (l, r) in left.iter().zip(&right) {
            assert!((0.0..=2.0).contains(l) && (0.0..=2.0).contains(r));
            assert!((r - z4 * l).abs() < 1e-12);
        }
        assert_eq!(t.metadata_value("modes"), Some("1000"));
        assert_eq!(t.metadata_value("under_resolved"), Some("false"));
    }

    #[test]
    fn otoc_amplitude_decreases_with_distance() {
        let peak = |sites: u32| {
            let cfg = resolve("", &[format!("r_sites={sites}")]).unwrap();
            run_otoc(&cfg)
                .unwrap()
                .column("c_left")
                .unwrap()
                .into_iter()
                .fold(0.0, f64::max)
        };
        assert!(peak(10) > peak(30));
    }

    #[test]
    fn coarse_otoc_grid_is_flagged_not_fatal() {
        let cfg = resolve("", &["dt=0.5".into(), "t_max=5".into()]).unwrap();
        let t = run_otoc(&cfg).unwrap();
        assert_eq!(t.metadata_value("under_resolved"), Some("true"));
    }

    #[test]
    fn rectify_table() {
        let cfg = resolve("d_min = 0\nd_max = 2\nd_steps = 3\nt_truncation = 40", &[]).unwrap();
        let t = run_rectify(&cfg).unwrap();
        let r = t.column("R").unwrap();
        assert_eq!(r[0], 1.0);
        assert!((r[1] - 0.449329).abs() / 0.449329 < 1e-6);
        assert!(r.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(t.metadata_value("converged"), Some("true"));
    }

    #[test]
    fn lattice_table() {
        let cfg = resolve("n_sites = 16\ndisplacement = 3\nt_max = 30", &[]).unwrap();
        let t = run_lattice_otoc(&cfg).unwrap();
        assert!(t.column("abs_err").unwrap().iter().all(|&e| e < 1e-10));
        assert_eq!(&t.rows[0][..3], &[0.0, t.rows[0][1], t.rows[0][2]]);
        assert!(t.rows[0][1].abs() < 1e-14 && t.rows[0][2].abs() < 1e-14);
    }

    #[test]
    fn lattice_reciprocal_signs_agree() {
        let run = |d: i64| {
            let cfg = resolve("n_sites = 8\nd = 0\nt_max = 20", &[format!("displacement={d}")]).unwrap();
            run_lattice_otoc(&cfg).unwrap()
        };
        let plus = run(2).column("c_exact").unwrap();
        let minus = run(-2).column("c_exact").unwrap();
        for (a, b) in plus.iter().zip(&minus) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_guards() {
        let too_big = resolve("n_sites = 200", &[]).unwrap();
        assert_eq!(run_lattice_otoc(&too_big).unwrap_err().exit_code(), 2);
        let zero = resolve("displacement = 0", &[]).unwrap();
        assert!(run_lattice_otoc(&zero).is_err());
    }
}
