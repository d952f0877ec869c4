use super::{Analyticity, TransferFunction};
use crate::error::{Error, Result};
use crate::C64;

/// `G(z) = exp(-sqrt(z))`: boundary-controlled heat flow in a
/// semi-infinite rod. Principal square root throughout.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeatModel;

fn on_cut(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

pub fn heat_eval(z: C64) -> Result<C64> {
    if on_cut(z) {
        return Err(Error::BranchCut(z));
    }
    Ok((-z.sqrt()).exp())
}

pub fn heat_deriv(z: C64) -> Result<C64> {
    if on_cut(z) {
        return Err(Error::BranchCut(z));
    }
    let r = z.sqrt();
    Ok(-(-r).exp() / (2.0 * r))
}

impl TransferFunction for HeatModel {
    fn name(&self) -> &str {
        "heat"
    }

    fn eval(&self, z: C64) -> Result<C64> {
        heat_eval(z)
    }

    fn deriv(&self, z: C64) -> Result<C64> {
        heat_deriv(z)
    }

    fn eval_with_deriv(&self, z: C64) -> Result<(C64, C64)> {
        if on_cut(z) {
            return Err(Error::BranchCut(z));
        }
        let r = z.sqrt();
        let g = (-r).exp();
        Ok((g, -g / (2.0 * r)))
    }

    fn domain(&self) -> Analyticity {
        Analyticity::PlaneMinusNegativeAxis
    }
}
