//! Equal-time second-order correlation `g2(0)` on truncated Fock states.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Superposition of occupation-number configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_sites: usize,
    components: BTreeMap<Vec<u32>, Complex64>,
}

impl FockState {
    /// Builds a state from `(occupations, amplitude)` pairs; repeated
    /// configurations are added together.
    pub fn new(n_sites: usize, components: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (occupations, amplitude) in components {
            if occupations.len() != n_sites {
                return Err(Error::StateShape {
                    got: occupations.len(),
                    expected: n_sites,
                });
            }
            *merged.entry(occupations).or_default() += amplitude;
        }
        merged.retain(|_, amp| amp.norm_sqr() > 0.0);
        Ok(Self {
            n_sites,
            components: merged,
        })
    }

    pub fn vacuum(n_sites: usize) -> Self {
        Self::new(n_sites, [(vec![0; n_sites], Complex64::new(1.0, 0.0))]).expect("shape is consistent")
    }

    /// `sum_j amplitudes[j] a_j^dagger |vacuum>`.
    pub fn one_magnon(amplitudes: &[Complex64]) -> Self {
        let n = amplitudes.len();
        let components = amplitudes.iter().enumerate().map(|(j, &amp)| {
            let mut occ = vec![0; n];
            occ[j] = 1;
            (occ, amp)
        });
        Self::new(n, components).expect("shape is consistent")
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_occupation(&self) -> u32 {
        self.components
            .keys()
            .map(|occ| occ.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// `<psi| (a^dagger)^p a^p |psi>` for mode `site`, unnormalized. Applies
    /// `a^p` to each configuration and takes the squared norm of the result.
    fn normal_ordered_moment(&self, site: usize, power: u32) -> f64 {
        let mut image: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (occ, &amp) in &self.components {
            let n = occ[site];
            if n < power {
                continue;
            }
            // a^p |n> = sqrt(n (n-1) ... (n-p+1)) |n-p>
            let weight: f64 = (0..power).map(|i| (n - i) as f64).product::<f64>().sqrt();
            let mut lowered = occ.clone();
            lowered[site] -= power;
            *image.entry(lowered).or_default() += amp * weight;
        }
        image.values().map(|a| a.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2 {
    pub value: f64,
    /// `<a^dagger a^dagger a a>`.
    pub numerator: f64,
    /// `<a^dagger a>^2`.
    pub denominator: f64,
    /// Both moments vanish, so there is nothing to blockade.
    pub blockade_trivial: bool,
}

/// `g2(0) = <a^dagger^2 a^2> / <a^dagger a>^2` for the magnon mode at `site`,
/// on a normalized copy of `state`.
pub fn g2_zero(state: &FockState, site: usize) -> Result<G2> {
    if site >= state.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            size: state.n_sites(),
        });
    }
    let occupation = state.max_occupation();
    if occupation > 1 {
        return Err(Error::OccupationTooHigh(occupation));
    }
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "zero vector".into(),
        });
    }
    let numerator = state.normal_ordered_moment(site, 2) / norm;
    let mean = state.normal_ordered_moment(site, 1) / norm;
    let denominator = mean * mean;
    let value = if numerator == 0.0 { 0.0 } else { numerator / denominator };
    Ok(G2 {
        value,
        numerator,
        denominator,
        blockade_trivial: numerator == 0.0 && denominator == 0.0,
    })
}
