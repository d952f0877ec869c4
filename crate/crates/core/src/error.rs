use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolvent (zI - A) is singular at z = {z}: {detail}")]
    SingularResolvent { z: Complex64, detail: String },

    #[error("z = {0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),

    #[error("conformal map `{map}` has a pole at s = {s}")]
    MapPole { map: &'static str, s: Complex64 },

    #[error("z = {z} has no unique preimage in the unit disk under `{map}`")]
    NotInImage { map: &'static str, z: Complex64 },

    #[error("reflection undefined: preimage of z = {0} is the disk center")]
    ReflectionAtCenter(Complex64),

    #[error("map derivative vanishes at s = {0}")]
    ZeroDerivative(Complex64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("coincident shifts: |sigma_{i} - sigma_{j}| = {dist:e}")]
    CoincidentShifts { i: usize, j: usize, dist: f64 },

    #[error("assembled realization fails to interpolate (relative mismatch {mismatch:e} at shift {index})")]
    InterpolationMismatch { index: usize, mismatch: f64 },

    #[error("E_r is singular or too ill-conditioned (condition estimate {0:e})")]
    SingularE(f64),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("repeated poles (separation {0:e}); residues are not defined")]
    RepeatedPoles(f64),

    #[error("pole lambda = {0} lies in the closed unit disk")]
    PoleInsideDisk(Complex64),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e} with {panels} panels")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64, panels: usize },

    #[error("duplicate sample point at index {0}")]
    DegenerateSamples(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("SVD failed: {0}")]
    Svd(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
