//! One-shot invariant suite behind the `validate` subcommand.
//!
//! Every check is independent: a failure is recorded and the suite moves on,
//! so one run lists everything that is broken.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use qidiode_core::model::wavevector_shift;
use qidiode_core::oracle::{asymmetry_probe, build_chain_hamiltonian, cross_validate, g2_zero, ExactChain, FockState};
use qidiode_core::otoc::LatticePropagator;
use qidiode_core::rectify::default_dt;
use qidiode_core::{
    build_mode_set, dispersion_1d, dispersion_2d, group_velocity_1d, omega_sum, onset_time, otoc_series,
    suppression_rate, sweep_rectification, Branch, ModelParams, QuadratureSettings, Side, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

const SEED: u64 = 0x05ee_d0fd_10de;
const RANDOM_SAMPLES: usize = 1000;
const DERIVATIVE_TOLERANCE: f64 = 1e-8;
const MATCHING_TOLERANCE: f64 = 1e-12;
const ORACLE_TOLERANCE: f64 = 1e-10;
const RECTIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    fn record(&mut self, name: &'static str, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        log::debug!("{name}: {detail}");
        self.checks.push(Check { name, passed, detail });
    }
}

/// `PASS name: detail` / `FAIL name: detail`, one line per check, then a
/// summary line.
impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        let failed = self.failures().count();
        writeln!(f, "summary: {} checks, {failed} failed", self.checks.len())
    }
}

/// Fault injection for exercising the failure path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidationHooks {
    /// Replaces `zeta_decay` in the configured model.
    pub zeta_decay: Option<f64>,
}

pub fn run_validate(config: &RunConfig) -> ValidationReport {
    run_validate_with(config, ValidationHooks::default())
}

pub fn run_validate_with(config: &RunConfig, hooks: ValidationHooks) -> ValidationReport {
    let mut params = config.model.clone();
    if let Some(decay) = hooks.zeta_decay {
        params.zeta_decay = decay;
    }
    let r = config.r();
    let mut report = ValidationReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    report.record("model_parameters", check_params(&params));
    report.record("dispersion_mirror_2d", check_mirror(&params, &mut rng));
    report.record("dispersion_branch_gap", check_branch_gap(&params, &mut rng));
    report.record("group_velocity_derivative", check_velocity(&params, &mut rng));
    report.record("frequency_matching", check_matching(&params));
    report.record("omega_sum_identity", check_omega_identity(&params, r));
    report.record("otoc_suppression_and_bounds", check_otoc(&params, r, config.run.t_max));
    report.record("otoc_onset_ordering", check_onsets(&params, config.run.t_max));
    report.record(
        "rectification_law",
        check_rectification(&params, r, config.run.t_truncation),
    );
    for n in [8, 16, 32] {
        report.record("oracle_cross_validation", check_cross_validation(&params, n));
    }
    report.record("oracle_configured_pairs", check_configured_pairs(&params, config));
    report.record("oracle_spectrum", check_spectrum(&params));
    report.record("oracle_unitarity", check_unitarity(&params, &mut rng));
    report.record("nonreciprocity_witness", check_asymmetry(&params));
    report.record("magnon_blockade", check_blockade(&mut rng));
    report.record("spread_and_return", check_spread_and_return(&params));
    report
}

fn fail<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn check_params(params: &ModelParams) -> Result<String, String> {
    params.validate().map_err(fail)?;
    let zeta = suppression_rate(params).map_err(fail)?;
    let reversed = suppression_rate(&params.clone().with_d(-params.d)).map_err(fail)?;
    if zeta != reversed {
        return Err(format!("zeta depends on field sign: {zeta} vs {reversed}"));
    }
    Ok(format!("zeta = {zeta}"))
}

fn random_k(rng: &mut ChaCha8Rng, params: &ModelParams) -> f64 {
    rng.random_range(-PI..PI) / params.a
}

fn check_mirror(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let flipped = params.clone().with_d(-params.d);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_SAMPLES {
        let (kx, ky) = (random_k(rng, params), random_k(rng, params));
        let plus = dispersion_2d(params, kx, ky, Branch::Plus);
        worst = worst.max((plus - dispersion_2d(&flipped, -kx, ky, Branch::Plus)).abs());
        worst = worst.max((plus - dispersion_2d(params, kx, -ky, Branch::Plus)).abs());
    }
    bound("max mirror error", worst, 1e-12)
}

fn check_branch_gap(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_SAMPLES {
        let k = random_k(rng, params);
        let gap = dispersion_1d(params, k, Branch::Plus) - dispersion_1d(params, k, Branch::Minus);
        worst = worst.max((gap - 2.0 * params.d * (k * params.a).sin()).abs());
    }
    bound("max gap error", worst, 1e-12)
}

fn check_velocity(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let h = 1e-6 / params.a;
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_SAMPLES {
        let k = random_k(rng, params);
        for branch in [Branch::Plus, Branch::Minus] {
            let fd = (dispersion_1d(params, k + h, branch) - dispersion_1d(params, k - h, branch)) / (2.0 * h);
            worst = worst.max((group_velocity_1d(params, k, branch) - fd).abs());
        }
    }
    bound("max |v_g - finite difference|", worst, DERIVATIVE_TOLERANCE)
}

fn check_matching(params: &ModelParams) -> Result<String, String> {
    let set = build_mode_set(params).map_err(fail)?;
    let worst = set
        .modes
        .iter()
        .map(|m| {
            (dispersion_1d(params, m.k_plus, Branch::Plus) - dispersion_1d(params, m.k_minus, Branch::Minus)).abs()
        })
        .fold(0.0, f64::max);
    bound(
        &format!("max mismatch over {} modes", set.len()),
        worst,
        MATCHING_TOLERANCE,
    )
}

fn check_omega_identity(params: &ModelParams, r: f64) -> Result<String, String> {
    let set = build_mode_set(params).map_err(fail)?;
    let phase = Complex64::cis(-wavevector_shift(params) * r);
    let zero = omega_sum(&set, r, 0.0, Side::Right).norm() / set.len() as f64;
    let mut worst = 0.0f64;
    for i in 0..50 {
        let t = 0.6 * i as f64;
        let left = omega_sum(&set, r, t, Side::Left);
        let right = omega_sum(&set, r, t, Side::Right);
        worst = worst.max((left - phase * right).norm() / set.len() as f64);
    }
    if zero > 1e-12 {
        return Err(format!("|Omega_R(0)| / N = {zero:e}, expected 0"));
    }
    bound("max |Omega_L - e^(-i dk r) Omega_R| / N", worst, 1e-12)
}

fn check_otoc(params: &ModelParams, r: f64, t_max: f64) -> Result<String, String> {
    let grid = TimeGrid::spanning(t_max, 301).map_err(fail)?;
    let series = otoc_series(params, r, &grid, None).map_err(fail)?;
    let z4 = series.zeta.powi(4);
    let (free, blocked) = match series.blocked {
        Side::Right => (&series.c_left, &series.c_right),
        Side::Left => (&series.c_right, &series.c_left),
    };
    let mut worst = 0.0f64;
    for (f, b) in free.iter().zip(blocked) {
        for c in [f, b] {
            if !(0.0..=2.0).contains(c) {
                return Err(format!("OTOC value {c} outside [0, 2]"));
            }
        }
        worst = worst.max((b - z4 * f).abs());
    }
    bound("max |C_blocked - zeta^4 C_free|", worst, 1e-12)
}

fn check_onsets(params: &ModelParams, t_max: f64) -> Result<String, String> {
    let set = build_mode_set(params).map_err(fail)?;
    let dt = default_dt(&set);
    let grid = TimeGrid::new(dt, (t_max / dt) as usize + 1).map_err(fail)?;
    let mut onsets = Vec::new();
    let mut peaks = Vec::new();
    for sites in [10.0, 20.0, 30.0] {
        let series = otoc_series(params, sites * params.a, &grid, None).map_err(fail)?;
        let free = if series.blocked == Side::Right {
            &series.c_left
        } else {
            &series.c_right
        };
        let onset = onset_time(&series.times, free, 0.01).ok_or("OTOC never rises")?;
        onsets.push(onset);
        peaks.push(free.iter().copied().fold(0.0, f64::max));
    }
    let detail = format!("onsets {onsets:?}, peaks {peaks:?}");
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    if increasing(&onsets) && decreasing(&peaks) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn check_rectification(params: &ModelParams, r: f64, t_truncation: Option<f64>) -> Result<String, String> {
    let d = params.d.abs();
    let quad = QuadratureSettings { t_truncation, dt: None };
    let rows = sweep_rectification(params, r, &[0.0, d], &quad).map_err(fail)?;
    if rows[0].r_coeff != 1.0 {
        return Err(format!("R(0) = {}", rows[0].r_coeff));
    }
    let row = &rows[1];
    let rel = ((row.r_coeff - row.r_analytic) / row.r_analytic).abs();
    if !row.converged {
        return Err(format!("quadrature not converged (tail {:e})", row.tail_estimate));
    }
    bound(
        &format!("R({d}) = {}, relative error", row.r_coeff),
        rel,
        RECTIFY_TOLERANCE,
    )
}

fn check_cross_validation(params: &ModelParams, n: usize) -> Result<String, String> {
    let grid = TimeGrid::spanning(30.0, 200).map_err(fail)?;
    let mut pairs = Vec::new();
    for d in [1, 3, 5] {
        pairs.push((0, d));
        pairs.push((0, n - d));
    }
    let mut worst = 0.0f64;
    for d in [0.0, 0.5, params.d.abs()] {
        let report = cross_validate(&params.clone().with_d(d), n, &pairs, &grid).map_err(fail)?;
        worst = worst.max(report.max_abs_error);
    }
    bound(&format!("N = {n}, max |C_exact - 8p(1-p)|"), worst, ORACLE_TOLERANCE)
}

/// The `pairs` from the config on the `n_sites` ring.
fn check_configured_pairs(params: &ModelParams, config: &RunConfig) -> Result<String, String> {
    let n = config.run.n_sites;
    let grid = TimeGrid::spanning(config.run.t_max, 200).map_err(fail)?;
    let report = cross_validate(&params.clone().with_n(n), n, &config.run.pairs, &grid).map_err(fail)?;
    bound(
        &format!("N = {n}, {} pairs, max |C_exact - 8p(1-p)|", config.run.pairs.len()),
        report.max_abs_error,
        ORACLE_TOLERANCE,
    )
}

fn check_spectrum(params: &ModelParams) -> Result<String, String> {
    let n = 64;
    let params = params.clone().with_n(n);
    let chain = ExactChain::new(build_chain_hamiltonian(&params, n).map_err(fail)?).map_err(fail)?;
    let mut band: Vec<f64> = (0..n)
        .map(|m| dispersion_1d(&params, 2.0 * PI * m as f64 / (n as f64 * params.a), Branch::Plus))
        .collect();
    band.sort_by(f64::total_cmp);
    let worst = chain
        .spectrum()
        .eigenvalues
        .iter()
        .zip(&band)
        .map(|(e, b)| (e - b).abs())
        .fold(0.0, f64::max);
    bound("N = 64, max |eigenvalue - band|", worst, 1e-10)
}

fn check_unitarity(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let n = 16;
    let chain = ExactChain::new(build_chain_hamiltonian(&params.clone().with_n(n), n).map_err(fail)?).map_err(fail)?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = rng.random_range(0.0..100.0);
        let column: f64 = (0..n).map(|m| chain.transition_probability(0, m, t)).sum();
        worst = worst.max((column - 1.0).abs());
    }
    bound("max |sum_m p(0 -> m) - 1|", worst, 1e-12)
}

/// Odd ring: an even ring with only nearest-neighbour hopping is bipartite
/// and its forward and backward OTOCs coincide identically.
fn check_asymmetry(params: &ModelParams) -> Result<String, String> {
    let n = 33;
    let times: Vec<f64> = TimeGrid::spanning(30.0, 200).map_err(fail)?.times();
    let probe = |d: f64| -> Result<f64, String> {
        let p = params.clone().with_d(d).with_n(n);
        let chain = ExactChain::new(build_chain_hamiltonian(&p, n).map_err(fail)?).map_err(fail)?;
        Ok(asymmetry_probe(&chain, 0, 5, &times).map_err(fail)?.max_gap)
    };
    let with_dmi = probe(1.0)?;
    let without = probe(0.0)?;
    let detail = format!("N = {n}, gap {with_dmi:e} at D = 1, {without:e} at D = 0");
    if with_dmi > 1e-3 && without < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn check_blockade(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for trial in 0..10 {
        let n = rng.random_range(2..12);
        let amps: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let state = FockState::one_magnon(&amps);
        let site = rng.random_range(0..n);
        let g = g2_zero(&state, site).map_err(fail)?;
        if g.value != 0.0 {
            return Err(format!("trial {trial}: g2(0) = {}", g.value));
        }
    }
    Ok("g2(0) = 0 on 10 random one-magnon states".into())
}

fn check_spread_and_return(params: &ModelParams) -> Result<String, String> {
    let n = 32;
    let p = params.clone().with_n(n);
    let prop = LatticePropagator::new(&p, 3).map_err(fail)?;
    let c: Vec<f64> = (0..2000)
        .map(|i| {
            let q = prop.probability(0.05 * i as f64);
            8.0 * q * (1.0 - q)
        })
        .collect();
    let (peak_at, peak) = c
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let low_after = c[peak_at..].iter().copied().fold(f64::INFINITY, f64::min);
    let detail = format!("peak {peak:.3}, minimum after peak {low_after:.3}");
    if peak > 0.5 && low_after < 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bound(label: &str, value: f64, tolerance: f64) -> Result<String, String> {
    let detail = format!("{label} = {value:e} (tolerance {tolerance:e})");
    if value < tolerance {
        Ok(detail)
    } else {
        Err(detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn report_format() {
        let mut r = ValidationReport::default();
        r.record("a", Ok("fine".into()));
        r.record("b", Err("broken".into()));
        assert_eq!(
            r.to_string(),
            "PASS a: fine\nFAIL b: broken\nsummary: 2 checks, 1 failed\n"
        );
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn corrupted_zeta_model_fails() {
        let cfg = parse_config("").unwrap();
        let mut params = cfg.model.clone();
        params.zeta_decay = -1.0;
        assert!(check_params(&params).is_err());
        assert!(check_otoc(&params, cfg.r(), 5.0).is_err());
    }

    #[test]
    fn individual_checks_pass_on_defaults() {
        let cfg = parse_config("").unwrap();
        let p = &cfg.model;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(check_params(p).is_ok());
        assert!(check_mirror(p, &mut rng).is_ok());
        assert!(check_branch_gap(p, &mut rng).is_ok());
        assert!(check_velocity(p, &mut rng).is_ok());
        assert!(check_matching(p).is_ok());
        assert!(check_omega_identity(p, cfg.r()).is_ok());
        assert!(check_spectrum(p).is_ok());
        assert!(check_unitarity(p, &mut rng).is_ok());
        assert!(check_blockade(&mut rng).is_ok());
        assert!(check_spread_and_return(p).is_ok(), "{:?}", check_spread_and_return(p));
    }
}
