//! OTOC evaluated straight from its operator definition in the one-magnon
//! sector, using `eta_j = 2 a_j^dagger a_j - 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hamiltonian::{spectral_decompose, OneMagnonHamiltonian, SpectralDecomposition};
use crate::error::{Error, Result};

/// The pair of local observables `eta_n` (source) and `eta_m` (probe).
///
/// On the one-magnon sector `eta_j` acts as `-I + 2 P_j` with `P_j` the
/// projector on site `j`; on the vacuum it is the scalar `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OtocObservables {
    pub source: usize,
    pub probe: usize,
    size: usize,
}

impl OtocObservables {
    pub fn new(size: usize, source: usize, probe: usize) -> Result<Self> {
        for site in [source, probe] {
            if site >= size {
                return Err(Error::SiteOutOfRange { site, size });
            }
        }
        if source == probe {
            return Err(Error::CoincidentSites(source));
        }
        Ok(Self { source, probe, size })
    }

    pub const VACUUM_EIGENVALUE: f64 = -1.0;

    /// `eta_site psi` for a one-magnon vector.
    pub fn apply_eta(site: usize, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = -psi;
        out[site] += 2.0 * psi[site];
        out
    }

    /// Dense one-magnon matrix of `eta_site`.
    pub fn eta_matrix(&self, site: usize) -> DMatrix<Complex64> {
        let mut m = -DMatrix::<Complex64>::identity(self.size, self.size);
        m[(site, site)] = Complex64::new(1.0, 0.0);
        m
    }
}

/// A chain together with its (immutable) spectral decomposition.
#[derive(Debug, Clone)]
pub struct ExactChain {
    hamiltonian: OneMagnonHamiltonian,
    spectrum: SpectralDecomposition,
}

impl ExactChain {
    pub fn new(hamiltonian: OneMagnonHamiltonian) -> Result<Self> {
        let spectrum = spectral_decompose(&hamiltonian)?;
        Ok(Self { hamiltonian, spectrum })
    }

    pub fn size(&self) -> usize {
        self.hamiltonian.size()
    }

    pub fn hamiltonian(&self) -> &OneMagnonHamiltonian {
        &self.hamiltonian
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    fn basis(&self, site: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.size());
        v[site] = Complex64::new(1.0, 0.0);
        v
    }

    /// `eta_m(t) psi = U^dagger eta_m U psi` with `U = exp(-i H t)`.
    fn apply_heisenberg_eta(&self, site: usize, t: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let forward = self.spectrum.evolve(psi, t);
        let flipped = OtocObservables::apply_eta(site, &forward);
        self.spectrum.evolve_backward(&flipped, t)
    }

    /// `F(t) = <n| eta_m(t) eta_n eta_m(t) eta_n |n>`.
    pub fn overlap(&self, obs: &OtocObservables, t: f64) -> Complex64 {
        let start = self.basis(obs.source);
        let psi = OtocObservables::apply_eta(obs.source, &start);
        let psi = self.apply_heisenberg_eta(obs.probe, t, &psi);
        let psi = OtocObservables::apply_eta(obs.source, &psi);
        let psi = self.apply_heisenberg_eta(obs.probe, t, &psi);
        start.dotc(&psi)
    }

    /// `|<m| exp(-i H t) |n>|^2`.
    pub fn transition_probability(&self, n: usize, m: usize, t: f64) -> f64 {
        self.spectrum.amplitude(m, n, t).norm_sqr()
    }
}

/// `C(t) = 1 - Re F(t)` between source `n` and probe `m`.
pub fn otoc_exact(chain: &ExactChain, n: usize, m: usize, t: f64) -> Result<f64> {
    let obs = OtocObservables::new(chain.size(), n, m)?;
    Ok(1.0 - chain.overlap(&obs, t).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryProbe {
    pub times: Vec<f64>,
    /// Probe `d` sites ahead of the source.
    pub forward: Vec<f64>,
    /// Probe `d` sites behind the source.
    pub backward: Vec<f64>,
    pub max_gap: f64,
}

/// Compares the OTOC towards `n + d` with the one towards `n - d`.
pub fn asymmetry_probe(chain: &ExactChain, n: usize, d: usize, times: &[f64]) -> Result<AsymmetryProbe> {
    let size = chain.size();
    if n >= size {
        return Err(Error::SiteOutOfRange { site: n, size });
    }
    if d == 0 || 2 * d >= size {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: format!("separation {d} must lie in 1..{}", size.div_ceil(2)),
        });
    }
    let ahead = (n + d) % size;
    let behind = (n + size - d) % size;
    let forward = times
        .iter()
        .map(|&t| otoc_exact(chain, n, ahead, t))
        .collect::<Result<Vec<_>>>()?;
    let backward = times
        .iter()
        .map(|&t| otoc_exact(chain, n, behind, t))
        .collect::<Result<Vec<_>>>()?;
    let max_gap = forward
        .iter()
        .zip(&backward)
        .map(|(f, b)| (f - b).abs())
        .fold(0.0, f64::max);
    Ok(AsymmetryProbe {
        times: times.to_vec(),
        forward,
        backward,
        max_gap,
    })
}
