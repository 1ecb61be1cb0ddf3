//! Left/right OTOC time series over the Bragg mode set, and the OTOC of the
//! physical lattice propagator.
//!
//! Both reduce to `C = 8 p (1 - p)` where `p` is a one-magnon transition
//! probability. For the mode set `p = |Omega_1 / N|^2`; the conjugate sum
//! `Omega_2` is never summed separately, and `p` is formed as a squared
//! magnitude so it is real and non-negative by construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{build_mode_set, dispersion_1d, suppression_rate, Branch, ModeSet, ModelParams};

/// Relative slack when checking that a separation sits on a lattice site.
const LATTICE_SLACK: f64 = 1e-9;

/// Uniform grid `t_i = i * dt`, `i = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("at least one time point is required".into()));
        }
        Ok(Self { dt, steps })
    }

    /// `points` equally spaced times covering `[0, t_end]` inclusive.
    pub fn spanning(t_end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!("{points} points cannot span an interval")));
        }
        Self::new(t_end / (points - 1) as f64, points)
    }

    pub fn t_start(&self) -> f64 {
        0.0
    }

    pub fn t_end(&self) -> f64 {
        self.dt * (self.steps - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.steps).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Time-independent factors of the two Omega sums for a fixed separation.
struct PhaseTable {
    left: Vec<Complex64>,
    right: Vec<Complex64>,
    omegas: Vec<f64>,
}

impl PhaseTable {
    fn new(mode_set: &ModeSet, r: f64) -> Self {
        let a0 = mode_set.params.a0;
        let right = mode_set
            .modes
            .iter()
            .map(|m| Complex64::cis(-(m.m0 as f64) * PI * r / a0))
            .collect();
        let left = mode_set.modes.iter().map(|m| Complex64::cis(-m.k_minus * r)).collect();
        let omegas = mode_set.modes.iter().map(|m| m.omega).collect();
        Self { left, right, omegas }
    }

    /// `(Omega_1^L, Omega_1^R)` at time `t`.
    fn sums_at(&self, t: f64) -> (Complex64, Complex64) {
        let mut left = Complex64::new(0.0, 0.0);
        let mut right = Complex64::new(0.0, 0.0);
        for ((&w, l), r) in self.omegas.iter().zip(&self.left).zip(&self.right) {
            let evolve = Complex64::cis(w * t);
            left += l * evolve;
            right += r * evolve;
        }
        (left, right)
    }
}

/// `Omega_1` for one side: a sum over the mode set of `exp(-i k r) exp(i w t)`
/// with `k = m0 pi / a0` on the right and `k = k_minus` on the left.
/// `Omega_2` is its complex conjugate.
pub fn omega_sum(mode_set: &ModeSet, r: f64, t: f64, side: Side) -> Complex64 {
    let (left, right) = PhaseTable::new(mode_set, r).sums_at(t);
    match side {
        Side::Left => left,
        Side::Right => right,
    }
}

/// `8 p (1 - p)`, with `p` clamped into `[0, 1]` against rounding.
pub fn otoc_from_probability(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    8.0 * p * (1.0 - p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub times: Vec<f64>,
    pub c_left: Vec<f64>,
    pub c_right: Vec<f64>,
    /// Spin separation in length units.
    pub r: f64,
    /// Suppression rate applied to the blocked side.
    pub zeta: f64,
    /// The side whose magnons scatter on the gate magnons.
    pub blocked: Side,
}

impl OtocSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.c_left,
            Side::Right => &self.c_right,
        }
    }
}

fn check_separation(params: &ModelParams, r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::NegativeSeparation(r));
    }
    let sites = r / params.a;
    if (sites - sites.round()).abs() > LATTICE_SLACK * sites.abs().max(1.0) {
        return Err(Error::OffLattice { r, a: params.a });
    }
    Ok(())
}

/// Left and right OTOCs at separation `r` on `grid`.
///
/// For `d >= 0` the right movers are Bragg-blocked and `c_right` carries the
/// factor `zeta^4`. Reversing the field (`d < 0`) mirrors the chain, so the
/// two series trade places.
pub fn otoc_series(params: &ModelParams, r: f64, grid: &TimeGrid, zeta_override: Option<f64>) -> Result<OtocSeries> {
    params.validate()?;
    check_separation(params, r)?;

    let mut effective = params.clone();
    if zeta_override.is_some() {
        effective.zeta = zeta_override;
    }
    let zeta = suppression_rate(&effective)?;
    let mirrored = effective.d < 0.0;
    if mirrored {
        effective.d = -effective.d;
    }

    let mode_set = build_mode_set(&effective)?;
    let table = PhaseTable::new(&mode_set, r);
    let norm = mode_set.len() as f64;
    let scale = zeta.powi(4);
    let times = grid.times();

    let (free, blocked): (Vec<f64>, Vec<f64>) = times
        .par_iter()
        .map(|&t| {
            let (left, right) = table.sums_at(t);
            let p_left = (left / norm).norm_sqr();
            let p_right = (right / norm).norm_sqr();
            (otoc_from_probability(p_left), scale * otoc_from_probability(p_right))
        })
        .unzip();

    let (c_left, c_right, blocked_side) = if mirrored {
        (blocked, free, Side::Left)
    } else {
        (free, blocked, Side::Right)
    };
    Ok(OtocSeries {
        times,
        c_left,
        c_right,
        r,
        zeta,
        blocked: blocked_side,
    })
}

/// OTOC between two sites of the periodic chain from its Fourier propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSeries {
    pub times: Vec<f64>,
    pub c: Vec<f64>,
    pub displacement: i64,
    pub n_sites: usize,
}

/// Transition amplitude `<n + d| exp(-i H t) |n>` of the chain of
/// `params.n` sites, summed over the Brillouin zone `k_m = 2 pi m / (N a)`.
pub struct LatticePropagator {
    phases: Vec<Complex64>,
    omegas: Vec<f64>,
}

impl LatticePropagator {
    pub fn new(params: &ModelParams, displacement: i64) -> Result<Self> {
        params.validate()?;
        let n = params.n as i64;
        if displacement.abs() >= n {
            return Err(Error::InvalidParameter {
                name: "displacement",
                reason: format!("|{displacement}| must be below the chain size {n}"),
            });
        }
        let (phases, omegas) = (0..n)
            .map(|m| {
                // exp(i k_m d a) with the exponent reduced mod 2 pi exactly.
                let winding = (m * displacement).rem_euclid(n);
                let phase = Complex64::cis(2.0 * PI * winding as f64 / n as f64);
                let k = 2.0 * PI * m as f64 / (n as f64 * params.a);
                (phase, dispersion_1d(params, k, Branch::Plus))
            })
            .unzip();
        Ok(Self { phases, omegas })
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        let sum: Complex64 = self
            .phases
            .iter()
            .zip(&self.omegas)
            .map(|(phase, &w)| phase * Complex64::cis(-w * t))
            .sum();
        sum / self.phases.len() as f64
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

/// OTOC between a source and the site `displacement` steps away (signed),
/// driven by the nonreciprocal band itself; no suppression factor enters.
pub fn lattice_propagator_otoc(params: &ModelParams, displacement: i64, grid: &TimeGrid) -> Result<PropagatorSeries> {
    let propagator = LatticePropagator::new(params, displacement)?;
    let times = grid.times();
    let c = times
        .par_iter()
        .map(|&t| otoc_from_probability(propagator.probability(t)))
        .collect();
    Ok(PropagatorSeries {
        times,
        c,
        displacement,
        n_sites: params.n,
    })
}

/// First time at which `values` exceeds `fraction` of its maximum.
pub fn onset_time(times: &[f64], values: &[f64], fraction: f64) -> Option<f64> {
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    times
        .iter()
        .zip(values)
        .find(|(_, &c)| c > fraction * peak)
        .map(|(&t, _)| t)
}
