//! Model parameters and the single-magnon dispersion relations of the
//! DMI-coupled chain, plus the Bragg mode construction they feed.
//!
//! Conventions: hbar = 1 and energies are measured in units of the exchange
//! `j1`, so time comes out in units of `1/j1`. Wave vectors carry inverse
//! length; every trigonometric argument is `k * a`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this magnitude a group velocity is treated as zero.
pub const VELOCITY_FLOOR: f64 = 1e-12;

/// Physical couplings and geometry of the diode.
///
/// The defaults reproduce the parameter set of the reference OTOC figures:
/// `N = 1000`, `D = J1 = 2 J2 = 1`, `a = 1e-3`, `a0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Nearest-neighbour exchange.
    pub j1: f64,
    /// Next-nearest-neighbour exchange.
    pub j2: f64,
    /// DMI strength; its sign follows the applied electric field.
    pub d: f64,
    /// Unit-cell lattice constant.
    pub a: f64,
    /// Magnonic-crystal period.
    pub a0: f64,
    /// Number of spins, which is also the number of excited Bragg modes.
    pub n: usize,
    /// Magnetoelectric coupling, only used to convert a field into `d`.
    pub g_me: f64,
    /// Decay scale of the suppression model `exp(-|d| / zeta_decay)`.
    pub zeta_decay: f64,
    /// Fixed suppression rate overriding the exponential model.
    pub zeta: Option<f64>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            j1: 1.0,
            j2: 0.5,
            d: 1.0,
            a: 1e-3,
            a0: 1.0,
            n: 1000,
            g_me: 1.0,
            zeta_decay: 5.0,
            zeta: None,
        }
    }
}

impl ModelParams {
    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_lattice_constant(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_zeta(mut self, zeta: Option<f64>) -> Self {
        self.zeta = zeta;
        self
    }

    /// Checks every field invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, value: f64) -> Result<()> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{value} is not finite"),
                })
            }
        }
        fn positive(name: &'static str, value: f64) -> Result<()> {
            finite(name, value)?;
            if value > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{value} must be > 0"),
                })
            }
        }

        positive("j1", self.j1)?;
        finite("j2", self.j2)?;
        if self.j2 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "j2",
                reason: format!("{} must be >= 0", self.j2),
            });
        }
        finite("d", self.d)?;
        positive("a", self.a)?;
        positive("a0", self.a0)?;
        if self.n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("{} must be >= 2", self.n),
            });
        }
        finite("g_me", self.g_me)?;
        positive("zeta_decay", self.zeta_decay)?;
        if let Some(z) = self.zeta {
            check_suppression(z)?;
        }
        Ok(())
    }

    /// `J1 + 2 J2`, the amplitude of the cosine in the 1D band.
    pub fn band_amplitude(&self) -> f64 {
        self.j1 + 2.0 * self.j2
    }
}

/// Propagation branch: `Plus` carries `+D sin(ka)`, `Minus` carries `-D sin(ka)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// DMI strength induced by an electric field through magnetoelectric coupling.
pub fn dmi_from_field(e_y: f64, g_me: f64) -> f64 {
    e_y * g_me
}

/// Full two-dimensional band `2J1(1-g1) + 2J2(1-g2) +- D sin(kx a)`.
pub fn dispersion_2d(params: &ModelParams, kx: f64, ky: f64, branch: Branch) -> f64 {
    let a = params.a;
    let gamma1 = 0.5 * ((kx * a).cos() + (ky * a).cos());
    let gamma2 = 0.5 * (((kx + ky) * a).cos() + ((kx - ky) * a).cos());
    2.0 * params.j1 * (1.0 - gamma1) + 2.0 * params.j2 * (1.0 - gamma2) + branch.sign() * params.d * (kx * a).sin()
}

/// Band of the propagating modes along x.
///
/// Note this is *not* `dispersion_2d` at `ky = 0`: the two differ by the
/// constant `J1`. The OTOC mode frequencies use this form.
pub fn dispersion_1d(params: &ModelParams, kx: f64, branch: Branch) -> f64 {
    let ka = kx * params.a;
    let c = ka.cos();
    2.0 * params.j1 * (1.0 - 0.5 * c) + 2.0 * params.j2 * (1.0 - c) + branch.sign() * params.d * ka.sin()
}

/// Analytic `d omega / dk` of [`dispersion_1d`].
///
/// At `k = 0` the branch difference is `2 D a`; with `a` absorbed into the
/// wave vector this is the familiar `2 D` asymmetry.
pub fn group_velocity_1d(params: &ModelParams, kx: f64, branch: Branch) -> f64 {
    let ka = kx * params.a;
    params.a * (params.band_amplitude() * ka.sin() + branch.sign() * params.d * ka.cos())
}

/// Bragg-resonant wave vector `m0 pi / a0`.
pub fn bragg_wavevector(m0: i64, a0: f64) -> Result<f64> {
    if m0 < 1 {
        return Err(Error::InvalidModeIndex(m0));
    }
    Ok(m0 as f64 * PI / a0)
}

/// Wave-vector shift `(2/a) atan(D / (J1 + 2 J2))` between the two
/// counter-propagating partners of equal frequency. Independent of the mode.
pub fn wavevector_shift(params: &ModelParams) -> f64 {
    2.0 / params.a * (params.d / params.band_amplitude()).atan()
}

/// Wave vector of the left mover with the same frequency as the right mover
/// at `k_plus`, i.e. `dispersion_1d(-D, k_minus) == dispersion_1d(+D, k_plus)`.
pub fn left_wavevector(params: &ModelParams, k_plus: f64) -> f64 {
    k_plus + wavevector_shift(params)
}

fn check_suppression(z: f64) -> Result<()> {
    if z > 0.0 && z <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSuppression(z))
    }
}

/// Suppression rate of the Bragg-blocked magnon current.
///
/// An explicit override wins; otherwise `exp(-|d| / zeta_decay)`. The
/// magnitude of `d` enters because reversing the field only changes which
/// direction is blocked, not how strongly.
pub fn suppression_rate(params: &ModelParams) -> Result<f64> {
    if let Some(z) = params.zeta {
        check_suppression(z)?;
        return Ok(z);
    }
    if !(params.zeta_decay > 0.0) {
        return Err(Error::InvalidParameter {
            name: "zeta_decay",
            reason: format!("{} must be > 0", params.zeta_decay),
        });
    }
    Ok((-params.d.abs() / params.zeta_decay).exp())
}

/// Time for an excitation at `k` to traverse the whole chain, `N a / |v_g|`.
pub fn max_time(params: &ModelParams, k: f64, branch: Branch) -> Result<f64> {
    let v = group_velocity_1d(params, k, branch);
    if v.abs() < VELOCITY_FLOOR {
        return Err(Error::DegenerateVelocity { k, velocity: v });
    }
    Ok(params.n as f64 * params.a / v.abs())
}

/// One Bragg-resonant excitation: a right mover at `k_plus` and its
/// equal-frequency left-moving partner at `k_minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub m0: u32,
    pub k_plus: f64,
    pub k_minus: f64,
    pub omega: f64,
}

/// The excited modes `m0 = 1..=n`, sorted by `m0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub params: ModelParams,
    pub modes: Vec<Mode>,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_omega(&self) -> f64 {
        self.modes.iter().map(|m| m.omega).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The mode whose right mover has the largest `|v_g|`.
    pub fn fastest_mode(&self) -> Mode {
        *self
            .modes
            .iter()
            .max_by(|x, y| {
                let vx = group_velocity_1d(&self.params, x.k_plus, Branch::Plus).abs();
                let vy = group_velocity_1d(&self.params, y.k_plus, Branch::Plus).abs();
                vx.total_cmp(&vy)
            })
            .expect("mode set is never empty")
    }
}

pub fn build_mode_set(params: &ModelParams) -> Result<ModeSet> {
    params.validate()?;
    let shift = wavevector_shift(params);
    let modes = (1..=params.n as i64)
        .map(|m0| {
            let k_plus = bragg_wavevector(m0, params.a0)?;
            Ok(Mode {
                m0: m0 as u32,
                k_plus,
                k_minus: k_plus + shift,
                omega: dispersion_1d(params, k_plus, Branch::Plus),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeSet {
        params: params.clone(),
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit_lattice(d: f64) -> ModelParams {
        ModelParams {
            a: 1.0,
            ..ModelParams::default().with_d(d)
        }
    }

    #[test]
    fn field_to_dmi() {
        assert_eq!(dmi_from_field(0.0, 0.7), 0.0);
        assert_eq!(dmi_from_field(2.0, 0.5), 1.0);
        assert_eq!(dmi_from_field(-2.0, 0.5), -1.0);
    }

    #[test]
    fn dispersion_2d_hand_values() {
        let p = unit_lattice(1.0);
        assert_eq!(dispersion_2d(&p, 0.0, 0.0, Branch::Plus), 0.0);
        assert_eq!(dispersion_2d(&p, 0.0, 0.0, Branch::Minus), 0.0);

        let p0 = unit_lattice(0.0);
        assert_abs_diff_eq!(dispersion_2d(&p0, PI, 0.0, Branch::Plus), 4.0, epsilon = 1e-14);

        assert_abs_diff_eq!(
            dispersion_2d(&p, PI / 2.0, PI / 2.0, Branch::Plus),
            4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn dispersion_1d_hand_values() {
        let p = unit_lattice(1.0);
        assert_abs_diff_eq!(dispersion_1d(&p, PI / 2.0, Branch::Plus), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dispersion_1d(&p, PI / 2.0, Branch::Minus), 2.0, epsilon = 1e-14);
        for j1 in [0.3, 1.0, 2.5] {
            let p = ModelParams {
                j1,
                j2: 0.7,
                ..unit_lattice(0.4)
            };
            assert_abs_diff_eq!(dispersion_1d(&p, 0.0, Branch::Plus), j1, epsilon = 1e-14);
        }
    }

    #[test]
    fn one_and_two_dimensional_bands_differ_by_j1() {
        let p = unit_lattice(0.6);
        for &ka in &[0.0, 0.4, 1.3, 2.9] {
            let gap = dispersion_1d(&p, ka, Branch::Plus) - dispersion_2d(&p, ka, 0.0, Branch::Plus);
            assert_abs_diff_eq!(gap, p.j1, epsilon = 1e-13);
        }
    }

    #[test]
    fn group_velocity_hand_values() {
        let p = unit_lattice(1.0);
        assert_abs_diff_eq!(group_velocity_1d(&p, 0.0, Branch::Plus), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(group_velocity_1d(&p, 0.0, Branch::Minus), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(group_velocity_1d(&p, PI / 2.0, Branch::Plus), 2.0, epsilon = 1e-15);

        let p0 = unit_lattice(0.0);
        for &k in &[0.1, 1.0, 2.0] {
            assert_eq!(
                group_velocity_1d(&p0, k, Branch::Plus),
                group_velocity_1d(&p0, k, Branch::Minus)
            );
        }
    }

    #[test]
    fn bragg_values_and_guard() {
        assert_eq!(bragg_wavevector(1, 1.0).unwrap(), PI);
        assert_eq!(bragg_wavevector(3, 1.0).unwrap(), 3.0 * PI);
        assert_eq!(bragg_wavevector(2, 0.5).unwrap(), 4.0 * PI);
        assert_eq!(bragg_wavevector(0, 1.0), Err(Error::InvalidModeIndex(0)));
        assert_eq!(bragg_wavevector(-4, 1.0), Err(Error::InvalidModeIndex(-4)));
    }

    #[test]
    fn left_wavevector_values() {
        let p0 = unit_lattice(0.0);
        assert_eq!(left_wavevector(&p0, 1.7), 1.7);

        let p = unit_lattice(2.0);
        assert_abs_diff_eq!(left_wavevector(&p, PI), PI + PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn mode_set_small() {
        let p = ModelParams {
            n: 3,
            ..unit_lattice(1.0)
        };
        let set = build_mode_set(&p).unwrap();
        let ks: Vec<f64> = set.modes.iter().map(|m| m.k_plus).collect();
        assert_eq!(ks, vec![PI, 2.0 * PI, 3.0 * PI]);
        assert_eq!(set.len(), 3);

        let set0 = build_mode_set(&p.clone().with_d(0.0)).unwrap();
        assert!(set0.modes.iter().all(|m| m.k_minus == m.k_plus));
    }

    #[test]
    fn mode_set_defaults_cover_half_zone() {
        let p = ModelParams::default();
        let set = build_mode_set(&p).unwrap();
        let first = set.modes.first().unwrap().k_plus * p.a;
        let last = set.modes.last().unwrap().k_plus * p.a;
        assert_abs_diff_eq!(first, 0.001 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(last, PI, epsilon = 1e-13);
        assert!(set.modes.windows(2).all(|w| w[0].m0 < w[1].m0));
    }

    #[test]
    fn suppression_values() {
        let p = ModelParams::default();
        assert_eq!(suppression_rate(&p.clone().with_d(0.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(
            suppression_rate(&p.clone().with_d(5.0)).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            suppression_rate(&p.clone().with_d(1.0)).unwrap(),
            0.818731,
            epsilon = 1e-6
        );
        assert_eq!(suppression_rate(&p.clone().with_zeta(Some(0.6))).unwrap(), 0.6);
        assert_eq!(suppression_rate(&p.clone().with_zeta(Some(1.0))).unwrap(), 1.0);
    }

    #[test]
    fn suppression_rejects_bad_override_and_decay() {
        let p = ModelParams::default();
        for z in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(suppression_rate(&p.clone().with_zeta(Some(z))).is_err());
        }
        let bad = ModelParams { zeta_decay: 0.0, ..p };
        assert!(suppression_rate(&bad).is_err());
        assert!(bad.validate().is_err());
    }

    #[test]
    fn suppression_is_even_in_d() {
        let p = ModelParams::default();
        assert_eq!(
            suppression_rate(&p.clone().with_d(-1.5)).unwrap(),
            suppression_rate(&p.with_d(1.5)).unwrap()
        );
    }

    #[test]
    fn max_time_values() {
        // v = a (A sin ka + D cos ka); at k = 0 this is a D.
        let p = ModelParams::default();
        assert_abs_diff_eq!(max_time(&p, 0.0, Branch::Plus).unwrap(), 1000.0, epsilon = 1e-9);

        // N = 1000, a = 1e-3 and v = 1 (D = 1000 at k = 0).
        let p1 = p.clone().with_d(1000.0);
        assert_abs_diff_eq!(group_velocity_1d(&p1, 0.0, Branch::Plus), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(max_time(&p1, 0.0, Branch::Plus).unwrap(), 1.0, epsilon = 1e-12);

        let p2 = ModelParams {
            a: 1.0,
            n: 10,
            d: 0.0,
            j1: 1.0,
            j2: 0.5,
            ..p.clone()
        };
        // A = 2 at ka = pi/2 gives v = 2.
        assert_abs_diff_eq!(max_time(&p2, PI / 2.0, Branch::Plus).unwrap(), 5.0, epsilon = 1e-12);

        let p3 = p2.clone();
        assert!(matches!(
            max_time(&p3, 0.0, Branch::Plus),
            Err(Error::DegenerateVelocity { .. })
        ));
    }

    #[test]
    fn params_validation_names_field() {
        let cases = [
            (
                ModelParams {
                    j1: 0.0,
                    ..Default::default()
                },
                "j1",
            ),
            (
                ModelParams {
                    j2: -0.1,
                    ..Default::default()
                },
                "j2",
            ),
            (
                ModelParams {
                    a: -1.0,
                    ..Default::default()
                },
                "a",
            ),
            (
                ModelParams {
                    a0: 0.0,
                    ..Default::default()
                },
                "a0",
            ),
            (
                ModelParams {
                    n: 1,
                    ..Default::default()
                },
                "n",
            ),
            (
                ModelParams {
                    d: f64::NAN,
                    ..Default::default()
                },
                "d",
            ),
        ];
        for (p, field) in cases {
            match p.validate() {
                Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, field),
                other => panic!("expected error on {field}, got {other:?}"),
            }
        }
        assert!(ModelParams::default().validate().is_ok());
    }

    fn central_difference(p: &ModelParams, k: f64, branch: Branch, h: f64) -> f64 {
        (dispersion_1d(p, k + h, branch) - dispersion_1d(p, k - h, branch)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn mirror_symmetry_2d(kx in -10.0f64..10.0, ky in -10.0f64..10.0, d in -3.0f64..3.0) {
            let p = unit_lattice(d);
            let plus = dispersion_2d(&p, kx, ky, Branch::Plus);
            let mirrored = dispersion_2d(&p.clone().with_d(-d), -kx, ky, Branch::Plus);
            prop_assert!((plus - mirrored).abs() <= 1e-14);
        }

        #[test]
        fn y_axis_is_reciprocal(ky in -10.0f64..10.0, d in -3.0f64..3.0) {
            let p = unit_lattice(d);
            prop_assert_eq!(
                dispersion_2d(&p, 0.0, ky, Branch::Plus),
                dispersion_2d(&p, 0.0, ky, Branch::Minus)
            );
        }

        #[test]
        fn branch_gap(k in -10.0f64..10.0, d in -3.0f64..3.0) {
            let p = unit_lattice(d);
            let gap = dispersion_1d(&p, k, Branch::Plus) - dispersion_1d(&p, k, Branch::Minus);
            prop_assert!((gap - 2.0 * d * k.sin()).abs() <= 1e-14);
        }

        #[test]
        fn velocity_matches_finite_difference(k in -10.0f64..10.0, d in -3.0f64..3.0, j2 in 0.0f64..2.0) {
            let p = ModelParams { j2, ..unit_lattice(d) };
            for branch in [Branch::Plus, Branch::Minus] {
                let fd = central_difference(&p, k, branch, 1e-6);
                prop_assert!((group_velocity_1d(&p, k, branch) - fd).abs() < 1e-8);
            }
        }

        #[test]
        fn left_partner_matches_frequency(k in -20.0f64..20.0, d in -3.0f64..3.0, j2 in 0.0f64..2.0) {
            let p = ModelParams { j2, ..unit_lattice(d) };
            let km = left_wavevector(&p, k);
            let lhs = dispersion_1d(&p, k, Branch::Plus);
            let rhs = dispersion_1d(&p, km, Branch::Minus);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn suppression_monotone(d1 in 0.0f64..20.0, delta in 1e-6f64..5.0) {
            let p = ModelParams::default();
            let z1 = suppression_rate(&p.clone().with_d(d1)).unwrap();
            let z2 = suppression_rate(&p.with_d(d1 + delta)).unwrap();
            prop_assert!(z1 > z2);
        }
    }
}
