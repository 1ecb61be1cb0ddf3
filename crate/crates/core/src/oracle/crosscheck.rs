//! Harness comparing the operator-level oracle with the Fourier propagator.

use rayon::prelude::*;

use super::exact::{otoc_exact, ExactChain};
use super::hamiltonian::build_chain_hamiltonian;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::otoc::{LatticePropagator, TimeGrid};

pub const CROSS_VALIDATION_TOLERANCE: f64 = 1e-10;
/// Dense decomposition budget.
pub const MAX_DENSE_SITES: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidationReport {
    pub n_sites: usize,
    pub pairs: Vec<(usize, usize)>,
    pub time_points: usize,
    pub max_abs_error: f64,
    /// `(source, probe, t)` where the largest disagreement occurred.
    pub worst: (usize, usize, f64),
    pub passed: bool,
}

impl CrossValidationReport {
    /// Turns a failed report into an error.
    pub fn ensure(self) -> Result<Self> {
        if self.passed {
            Ok(self)
        } else {
            let (source_site, probe, time) = self.worst;
            Err(Error::CrossValidation {
                max_abs_error: self.max_abs_error,
                source_site,
                probe,
                time,
            })
        }
    }
}

/// Builds the chain for `params` and checks `otoc_exact` against
/// `8 p (1 - p)` from the lattice propagator on every pair and time.
pub fn cross_validate(
    params: &ModelParams,
    n_sites: usize,
    pairs: &[(usize, usize)],
    grid: &TimeGrid,
) -> Result<CrossValidationReport> {
    if n_sites > MAX_DENSE_SITES {
        return Err(Error::ChainTooLong {
            got: n_sites,
            max: MAX_DENSE_SITES,
        });
    }
    let chain = ExactChain::new(build_chain_hamiltonian(params, n_sites)?)?;
    cross_validate_chain(&chain, params, pairs, grid)
}

/// Same as [`cross_validate`] against an already decomposed chain, which may
/// differ from what `params` describes (that is how a broken chain is caught).
pub fn cross_validate_chain(
    chain: &ExactChain,
    params: &ModelParams,
    pairs: &[(usize, usize)],
    grid: &TimeGrid,
) -> Result<CrossValidationReport> {
    let n_sites = chain.size();
    let reference = params.clone().with_n(n_sites);
    let times = grid.times();

    let mut max_abs_error = 0.0f64;
    let mut worst = (0, 0, 0.0);
    for &(source, probe) in pairs {
        let displacement = probe as i64 - source as i64;
        let propagator = LatticePropagator::new(&reference, displacement)?;
        let errors = times
            .par_iter()
            .map(|&t| {
                let exact = otoc_exact(chain, source, probe, t)?;
                let p = propagator.probability(t);
                Ok((exact - 8.0 * p * (1.0 - p)).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        for (&t, &err) in times.iter().zip(&errors) {
            if err > max_abs_error || err.is_nan() {
                max_abs_error = if err.is_nan() { f64::INFINITY } else { err };
                worst = (source, probe, t);
            }
        }
    }
    Ok(CrossValidationReport {
        n_sites,
        pairs: pairs.to_vec(),
        time_points: times.len(),
        max_abs_error,
        worst,
        passed: max_abs_error < CROSS_VALIDATION_TOLERANCE,
    })
}
