//! Error type shared across the crate.

use crate::lattice::Geometry;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice dimensions must be at least 2x2, got {n_x}x{n_y}")]
    DimensionOutOfRange { n_x: usize, n_y: usize },

    #[error("probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("coin angle must lie in [0, pi], got {0}")]
    AngleOutOfRange(f64),

    #[error("directed coin requires r >= 2, got {0}")]
    CoinRankOutOfRange(u32),

    #[error("coin parameter r must be >= 1, got {0}")]
    SelfLoopCountOutOfRange(u32),

    #[error("vertex ({x}, {y}) lies outside the {n_x}x{n_y} region")]
    VertexOutOfBounds { x: usize, y: usize, n_x: usize, n_y: usize },

    #[error("operation is not defined for geometry {0:?}")]
    GeometryMismatch(Geometry),

    #[error("field has {got} entries but the lattice has {want} vertices")]
    ShapeMismatch { got: usize, want: usize },

    #[error("edge configuration is for a {got_nx}x{got_ny} region, state is {want_nx}x{want_ny}")]
    ConfigMismatch { got_nx: usize, got_ny: usize, want_nx: usize, want_ny: usize },

    #[error("wavenumber must lie in [0, sqrt(2)], got {0}")]
    WavenumberOutOfRange(f64),

    #[error("dispersion radicand is negative ({0}) for these parameters")]
    NegativeRadicand(f64),

    #[error("dispersion relation is undefined at p = 0")]
    ZeroProbability,

    #[error("group velocity is undefined where omega_x vanishes")]
    ZeroFrequency,

    #[error("threshold must lie in (0, 1), got {0}")]
    ThresholdOutOfRange(f64),

    #[error("system size must be >= 1")]
    SizeOutOfRange,

    #[error("trial count must be >= 1")]
    NoTrials,

    #[error("probability grid is empty")]
    EmptyGrid,

    #[error("probability grid must be ascending and within [0, 1]")]
    InvalidGrid,

    #[error("mean percolation probability never reaches the threshold on the grid")]
    ThresholdNotReached,
}
