//! Rectification coefficient `R = int C_R dt / int C_L dt` and its sweep over
//! the DMI strength.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{build_mode_set, max_time, suppression_rate, Branch, ModeSet, ModelParams};
use crate::otoc::{otoc_series, TimeGrid};

/// Oversampling of the fastest mode frequency used for the default step.
pub const DEFAULT_OVERSAMPLING: f64 = 40.0;
/// Coarsest step accepted: the fastest mode must get 20 samples per period.
pub const MIN_OVERSAMPLING: f64 = 20.0;
/// Largest relative change of `R` under a doubled truncation still counted
/// as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;

/// Requested truncation time and step; `None` picks the default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadratureSettings {
    pub t_truncation: Option<f64>,
    pub dt: Option<f64>,
}

/// Fully resolved quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub t_truncation: f64,
    pub dt: f64,
}

/// Default step `2 pi / (40 max w)`.
pub fn default_dt(mode_set: &ModeSet) -> f64 {
    TAU / (DEFAULT_OVERSAMPLING * mode_set.max_omega())
}

/// Largest admissible step `2 pi / (20 max w)`.
pub fn max_dt(mode_set: &ModeSet) -> f64 {
    TAU / (MIN_OVERSAMPLING * mode_set.max_omega())
}

/// Default truncation: the wrap-around time of the fastest right mover.
pub fn default_truncation(mode_set: &ModeSet) -> Result<f64> {
    let fastest = mode_set.fastest_mode();
    max_time(&mode_set.params, fastest.k_plus, Branch::Plus)
}

impl QuadratureSettings {
    pub fn resolve(&self, mode_set: &ModeSet) -> Result<Quadrature> {
        let t_truncation = match self.t_truncation {
            Some(t) => t,
            None => default_truncation(mode_set)?,
        };
        if !(t_truncation.is_finite() && t_truncation > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "truncation time {t_truncation} must be positive"
            )));
        }
        let dt = self.dt.unwrap_or_else(|| default_dt(mode_set));
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        let limit = max_dt(mode_set);
        if dt > limit {
            return Err(Error::UnderResolved { dt, limit });
        }
        Ok(Quadrature { t_truncation, dt })
    }
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dt * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectificationResult {
    pub r_coeff: f64,
    pub integral_left: f64,
    pub integral_right: f64,
    pub t_truncation: f64,
    /// Step actually used; at most the requested one, adjusted so the grid
    /// lands on `t_truncation`.
    pub dt: f64,
    /// `|R(2T) - R(T)| / R(T)`.
    pub tail_estimate: f64,
    pub converged: bool,
}

pub fn rectification_coefficient(
    params: &ModelParams,
    r: f64,
    quad: &QuadratureSettings,
) -> Result<RectificationResult> {
    let mode_set = build_mode_set(params)?;
    let quad = quad.resolve(&mode_set)?;
    rectify_resolved(params, r, quad)
}

fn rectify_resolved(params: &ModelParams, r: f64, quad: Quadrature) -> Result<RectificationResult> {
    let intervals = (quad.t_truncation / quad.dt).ceil().max(1.0) as usize;
    let dt = quad.t_truncation / intervals as f64;
    // One evaluation over [0, 2T] serves both the result and the doubling check.
    let grid = TimeGrid::new(dt, 2 * intervals + 1)?;
    let series = otoc_series(params, r, &grid, None)?;

    let half = intervals + 1;
    let integral_left = trapezoid(&series.c_left[..half], dt);
    let integral_right = trapezoid(&series.c_right[..half], dt);
    if !(integral_left > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("left OTOC integral vanishes ({integral_left}) at r = {r}"),
        });
    }
    let r_coeff = integral_right / integral_left;
    let r_doubled = trapezoid(&series.c_right, dt) / trapezoid(&series.c_left, dt);
    let tail_estimate = ((r_doubled - r_coeff) / r_coeff).abs();

    Ok(RectificationResult {
        r_coeff,
        integral_left,
        integral_right,
        t_truncation: quad.t_truncation,
        dt,
        tail_estimate,
        converged: tail_estimate < CONVERGENCE_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub zeta: f64,
    pub r_coeff: f64,
    /// `zeta^4`, the value the integral collapses to.
    pub r_analytic: f64,
    pub tail_estimate: f64,
    pub converged: bool,
}

/// `R` for each DMI strength with one shared quadrature.
///
/// Unset quadrature fields take the finest default step and the shortest
/// default truncation over all rows.
pub fn sweep_rectification(
    params: &ModelParams,
    r: f64,
    d_values: &[f64],
    quad: &QuadratureSettings,
) -> Result<Vec<SweepRow>> {
    for &d in d_values {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "d_values",
                reason: format!("{d} must be finite and >= 0"),
            });
        }
    }

    let mut shared: Option<Quadrature> = None;
    for &d in d_values {
        let set = build_mode_set(&params.clone().with_d(d))?;
        let q = quad.resolve(&set)?;
        shared = Some(match shared {
            None => q,
            Some(s) => Quadrature {
                t_truncation: s.t_truncation.min(q.t_truncation),
                dt: s.dt.min(q.dt),
            },
        });
    }
    let Some(shared) = shared else {
        return Ok(Vec::new());
    };

    d_values
        .iter()
        .map(|&d| {
            let row_params = params.clone().with_d(d);
            let zeta = suppression_rate(&row_params)?;
            let res = rectify_resolved(&row_params, r, shared)?;
            Ok(SweepRow {
                d,
                zeta,
                r_coeff: res.r_coeff,
                r_analytic: zeta.powi(4),
                tail_estimate: res.tail_estimate,
                converged: res.converged,
            })
        })
        .collect()
}
