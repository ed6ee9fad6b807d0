use thiserror::Error;

/// Errors for the invariant computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate basis: condition estimate {0:.3e} below 1e-10")]
    DegenerateBasis(f64),

    #[error("frame is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("path is not closed: {0}")]
    NotClosed(String),

    #[error("sampling too coarse: phase step {step:.4} at sample {index} reaches pi/2")]
    Undersampled { index: usize, step: f64 },

    #[error("unwrapped winding {0:.6} is not within 0.1 of an integer")]
    NonIntegralWinding(f64),

    #[error("crossing oracle degenerate after {0} reference perturbations")]
    OracleDegenerate(usize),

    #[error("invalid loop samples: {0}")]
    InvalidPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generator is not mean zero (estimated mean {0:.3e}); recentre before building a connection")]
    NotMeanZero(f64),

    #[error("point ({x:.4}, {y:.4}) lies outside the closed unit disc")]
    OutsideDisc { x: f64, y: f64 },

    #[error("extremum refinement failed to converge within {0} iterations")]
    ExtremumConvergence(usize),

    #[error("section boundary leaves the Lagrangian loop: distance {0:.3e} exceeds 1e-8")]
    BoundaryViolation(f64),

    #[error("boundary Hamiltonian difference is not fiberwise constant (spread {0:.3e}); connections do not preserve the same loop")]
    NotSameLoop(f64),

    #[error("connection has nonzero base term c ({0:.3e}); recentre before interval bounds")]
    NonzeroC(f64),

    #[error("unsupported connection provenance for this operation: {0}")]
    UnsupportedProvenance(String),

    #[error("self-intersecting boundary: chord distance {dist:.3e} at parameters ({s:.4}, {t:.4})")]
    SelfIntersection { dist: f64, s: f64, t: f64 },

    #[error("curve does not fit in a fundamental domain (extent {0:.4} >= 1)")]
    CurveTooLarge(f64),

    #[error("invalid disc: {0}")]
    InvalidDisc(String),

    #[error("snake construction infeasible: {0}")]
    SnakeConstruction(String),

    #[error("area forms have different total mass ({0:.3e} vs {1:.3e}); no Moser isotopy exists")]
    CohomologyObstruction(f64, f64),

    #[error("flow step too large: max displacement {disp:.3e} exceeds half a grid cell; use at least {suggested} steps")]
    StepSize { disp: f64, suggested: usize },

    #[error("grid dimensions differ: {0} vs {1}")]
    GridMismatch(usize, usize),

    #[error("jacobian has nonpositive determinant ({0:.3e})")]
    Orientation(f64),

    #[error("radial profile failed positivity check: derivative {0:.3e} at r = {1:.4}")]
    ProfilePositivity(f64, f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
