use thiserror::Error;

/// Errors raised by the spinor, jet, recovery and lattice layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gamma index {0} (expected 0, 1, 2, 3 or 5)")]
    InvalidGammaIndex(usize),

    #[error("axial current does not vanish (|j_a| = {magnitude:e})")]
    AxialCurrentNonzero { magnitude: f64 },

    #[error("spinor vanishes")]
    ZeroSpinor,

    #[error("current is not null: |J.J| = {residual:e} exceeds tolerance")]
    NotNull { residual: f64 },

    #[error("current lies on the degenerate ray J0 + J2 = 0")]
    DegenerateAxis,

    #[error("charge density J0 = {0:e} is not positive")]
    NonpositiveDensity(f64),

    #[error("spinor currents differ by {mismatch:e}")]
    CurrentMismatch { mismatch: f64 },

    #[error("constraint J.B = 0 violated (J.B = {residual:e})")]
    ConstraintViolated { residual: f64 },

    #[error("charge e must be nonzero")]
    ZeroCharge,

    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("jet order exhausted (have {have}, need {need})")]
    OrderExhausted { have: usize, need: usize },

    #[error("jet order {0} exceeds the supported maximum")]
    OrderTooHigh(usize),

    #[error("grid point {index:?} is closer than {needed} cells to the boundary")]
    BoundaryTooClose { index: [usize; 3], needed: usize },

    #[error("point outside the domain of the example frame: {0}")]
    OutOfDomain(String),

    #[error("frame vectors v, u, w are (nearly) linearly dependent (condition number {cond:e})")]
    DegenerateFrame { cond: f64 },

    #[error("phase-system determinant {det:e} does not exceed the floor {floor:e}")]
    VanishingDeterminant { det: f64, floor: f64 },

    #[error("sin^2 + cos^2 deviates from one by {residual:e}")]
    UnitCircleViolation { residual: f64 },

    #[error("matter density vanishes on the grid (min J0 = {0:e})")]
    VanishingDensity(f64),

    #[error("evolution unstable: field norm {norm:e} exceeds bound {bound:e}")]
    Instability { norm: f64, bound: f64 },

    #[error("constraint residual {residual:e} exceeds tolerance {tol:e}")]
    ConstraintResidual { residual: f64, tol: f64 },

    #[error("sign continuity broken: overlap {overlap:e} with the neighbouring point")]
    SignAmbiguous { overlap: f64 },

    #[error("zero amplitude after projection onto positive-energy modes")]
    ZeroAmplitude,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("at point {point:?}: {source}")]
    AtPoint {
        point: [f64; 4],
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, point: [f64; 4]) -> Self {
        match self {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                point,
                source: Box::new(e),
            },
        }
    }

    /// Strips any `AtPoint` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
