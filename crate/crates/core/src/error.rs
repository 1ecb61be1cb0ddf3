use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Bragg index must be a positive integer, got {0}")]
    InvalidModeIndex(i64),

    #[error("suppression override {0} outside (0, 1]")]
    InvalidSuppression(f64),

    #[error("group velocity {velocity:e} at k = {k} is degenerate; pick a different reference wave vector")]
    DegenerateVelocity { k: f64, velocity: f64 },

    #[error("spin separation {0} must be non-negative")]
    NegativeSeparation(f64),

    #[error("spin separation {r} is not a multiple of the lattice constant {a}")]
    OffLattice { r: f64, a: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("time step {dt} under-resolves the fastest mode (need dt <= {limit})")]
    UnderResolved { dt: f64, limit: f64 },

    #[error("site index {site} out of range for a chain of {size} sites")]
    SiteOutOfRange { site: usize, size: usize },

    #[error("source and probe must be distinct sites (both {0})")]
    CoincidentSites(usize),

    #[error("chain needs at least {min} sites, got {got}")]
    ChainTooShort { got: usize, min: usize },

    #[error("chain of {got} sites exceeds the dense decomposition budget of {max}")]
    ChainTooLong { got: usize, max: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("spectral decomposition inaccurate: {what} error {error:e}")]
    Decomposition { what: &'static str, error: f64 },

    #[error("state has {0} magnons on one configuration; the model admits at most one")]
    OccupationTooHigh(u32),

    #[error("state configuration has {got} sites, expected {expected}")]
    StateShape { got: usize, expected: usize },

    #[error(
        "oracle disagrees with closed form: max |dC| = {max_abs_error:e} at pair ({source_site}, {probe}), t = {time}"
    )]
    CrossValidation {
        max_abs_error: f64,
        source_site: usize,
        probe: usize,
        time: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
