//! Transfer-function evaluators.
//!
//! Every model is a [`TransferFunction`]: a value/derivative pair for a
//! scalar function analytic on some region of the plane. Builtin models
//! are registered by name in [`ModelRegistry`].

mod convdiff;
mod heat;
pub mod mtx;
mod rational;
mod registry;
mod state_space;

pub use convdiff::{build_conv_diff, ConvDiffConfig};
pub use heat::{heat_deriv, heat_eval, HeatModel};
pub use mtx::load_matrix_market;
pub use rational::PoleResidueModel;
pub use registry::{ModelBuilder, ModelParams, ModelRegistry};
pub use state_space::{
    deriv_state_space, eval_state_space, random_stable_model, ShiftedSolver, SparseMatrix,
    StateSpaceModel, SystemMatrix,
};

use crate::error::Result;
use crate::C64;

/// Where a model is known to be analytic.
#[derive(Debug, Clone, PartialEq)]
pub enum Analyticity {
    /// Analytic for `Re z > re_min`.
    HalfPlane { re_min: f64 },
    /// Analytic off a finite set of poles.
    ExteriorOfPoles(Vec<C64>),
    /// Analytic off the (unknown) spectrum of a state matrix.
    OffSpectrum,
    /// Analytic off the cut `(-inf, 0]`.
    PlaneMinusNegativeAxis,
}

impl Analyticity {
    /// Conservative membership test; `OffSpectrum` cannot decide and
    /// answers `true`.
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Analyticity::HalfPlane { re_min } => z.re > *re_min,
            Analyticity::ExteriorOfPoles(p) => p.iter().all(|p| (z - p).norm() > 0.0),
            Analyticity::OffSpectrum => true,
            Analyticity::PlaneMinusNegativeAxis => !(z.im == 0.0 && z.re <= 0.0),
        }
    }
}

pub trait TransferFunction: Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, z: C64) -> Result<C64>;

    fn deriv(&self, z: C64) -> Result<C64>;

    /// Value and derivative together; models with an expensive resolvent
    /// override this to share one factorization.
    fn eval_with_deriv(&self, z: C64) -> Result<(C64, C64)> {
        Ok((self.eval(z)?, self.deriv(z)?))
    }

    fn domain(&self) -> Analyticity;

    /// The underlying realization, for models that have one.
    fn as_state_space(&self) -> Option<&StateSpaceModel> {
        None
    }
}
