use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Smallest chain for which the neighbour structure is non-degenerate.
pub const MIN_CHAIN_SITES: usize = 4;
pub const HERMITICITY_TOLERANCE: f64 = 1e-14;
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-12;

/// The quadratic Hamiltonian restricted to the single-excitation sector of a
/// periodic chain: an `N x N` Hermitian hopping matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OneMagnonHamiltonian {
    params: ModelParams,
    matrix: DMatrix<Complex64>,
}

/// Effective chain whose band is exactly the propagating-mode dispersion.
///
/// On-site energy `2 J1 + 2 J2`; `H[j][j+1] = -(J1 + 2 J2)/2 - i D/2` and its
/// conjugate on `H[j+1][j]`, with periodic wrap. The next-nearest exchange
/// only enters through the folded amplitude `J1 + 2 J2`.
pub fn build_chain_hamiltonian(params: &ModelParams, n_sites: usize) -> Result<OneMagnonHamiltonian> {
    params.validate()?;
    if n_sites < MIN_CHAIN_SITES {
        return Err(Error::ChainTooShort {
            got: n_sites,
            min: MIN_CHAIN_SITES,
        });
    }
    let onsite = Complex64::new(2.0 * params.j1 + 2.0 * params.j2, 0.0);
    let hop = Complex64::new(-0.5 * params.band_amplitude(), -0.5 * params.d);
    let mut matrix = DMatrix::zeros(n_sites, n_sites);
    for j in 0..n_sites {
        let next = (j + 1) % n_sites;
        matrix[(j, j)] = onsite;
        matrix[(j, next)] = hop;
        matrix[(next, j)] = hop.conj();
    }
    Ok(OneMagnonHamiltonian {
        params: params.clone().with_n(n_sites),
        matrix,
    })
}

impl OneMagnonHamiltonian {
    /// Wraps an arbitrary Hermitian matrix, e.g. a deliberately perturbed chain.
    pub fn from_matrix(params: &ModelParams, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("{}x{} is not square", matrix.nrows(), matrix.ncols()),
            });
        }
        let error = hermiticity_error(&matrix);
        if error >= HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian(error));
        }
        Ok(Self {
            params: params.clone().with_n(matrix.nrows()),
            matrix,
        })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Largest deviation of any row from the cyclic shift of the first row.
    pub fn circulant_error(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expected = self.matrix[(0, (j + n - i) % n)];
                worst = worst.max((self.matrix[(i, j)] - expected).norm());
            }
        }
        worst
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0) && self.hermiticity_error() == 0.0
    }
}

fn hermiticity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `H = V diag(eigenvalues) V^dagger`, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

pub fn spectral_decompose(h: &OneMagnonHamiltonian) -> Result<SpectralDecomposition> {
    let eigen = h.matrix.clone().symmetric_eigen();
    let n = h.size();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eigen.eigenvalues[x].total_cmp(&eigen.eigenvalues[y]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eigen.eigenvectors.column(src));
    }
    let decomposition = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };

    let reconstruction = decomposition.reconstruction_error(h);
    if reconstruction >= RECONSTRUCTION_TOLERANCE {
        return Err(Error::Decomposition {
            what: "reconstruction",
            error: reconstruction,
        });
    }
    let orthonormality = decomposition.orthonormality_error();
    if orthonormality >= ORTHONORMALITY_TOLERANCE {
        return Err(Error::Decomposition {
            what: "orthonormality",
            error: orthonormality,
        });
    }
    Ok(decomposition)
}

impl SpectralDecomposition {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |H - V L V^dagger|` over all elements.
    pub fn reconstruction_error(&self, h: &OneMagnonHamiltonian) -> f64 {
        let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
            self.size(),
            self.eigenvalues.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        let rebuilt = &self.eigenvectors * lambda * self.eigenvectors.adjoint();
        (rebuilt - h.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |V^dagger V - I|` over all elements.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.apply_phases(psi, -t)
    }

    /// `exp(+i H t) psi`.
    pub fn evolve_backward(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.apply_phases(psi, t)
    }

    fn apply_phases(&self, psi: &DVector<Complex64>, signed_t: f64) -> DVector<Complex64> {
        let mut coeffs = self.eigenvectors.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::cis(e * signed_t);
        }
        &self.eigenvectors * coeffs
    }

    /// `<m| exp(-i H t) |n>`.
    pub fn amplitude(&self, m: usize, n: usize, t: f64) -> Complex64 {
        let v = &self.eigenvectors;
        (0..self.size())
            .map(|k| v[(m, k)] * Complex64::cis(-self.eigenvalues[k] * t) * v[(n, k)].conj())
            .sum()
    }
}
