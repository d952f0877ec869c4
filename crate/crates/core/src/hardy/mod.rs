//! Disk-side evaluators, Hardy-space inner products and optimality checks.
//!
//! A model `G` on `A` is pulled back to the unit disk either as
//! `A_G(s) = G(phi(s)) sqrt(phi'(s))` (the E2 framework) or as `G(phi(s))`
//! (the H2(A) framework). Norms of either are ordinary H2 norms on the
//! disk and are computed by [`quadrature`].

pub mod quadrature;
pub(crate) mod residuals;

pub use quadrature::{circle_mean, integrate, Quadrature, QuadratureSpec};
pub use residuals::{interp_residuals, pole_residues, InterpResiduals, PoleResidue, ResidualRecord};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::models::TransferFunction;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Framework {
    E2,
    H2A,
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Framework::E2 => "e2",
            Framework::H2A => "h2a",
        })
    }
}

impl FromStr for Framework {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e2" => Ok(Framework::E2),
            "h2a" | "h2" => Ok(Framework::H2A),
            _ => Err(Error::Config(format!("unknown framework `{s}` (expected e2 or h2a)"))),
        }
    }
}

/// Anything that can be evaluated on the closed unit disk.
pub trait DiskApproximant: Sync {
    fn disk_eval(&self, s: C64) -> Result<C64>;
}

/// The disk function `F` of a model under a map, in one of the frameworks.
#[derive(Clone)]
pub struct DiskFunction {
    framework: Framework,
    model: Arc<dyn TransferFunction>,
    map: Arc<dyn ConformalMap>,
}

impl fmt::Debug for DiskFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskFunction")
            .field("framework", &self.framework)
            .field("model", &self.model.name())
            .field("map", &self.map)
            .finish()
    }
}

impl DiskFunction {
    pub fn new(framework: Framework, model: Arc<dyn TransferFunction>, map: Arc<dyn ConformalMap>) -> Self {
        Self { framework, model, map }
    }

    pub fn framework(&self) -> Framework {
        self.framework
    }

    pub fn model(&self) -> &Arc<dyn TransferFunction> {
        &self.model
    }

    pub fn map(&self) -> &Arc<dyn ConformalMap> {
        &self.map
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        let g = self.model.eval(self.map.phi(s)?)?;
        match self.framework {
            Framework::H2A => Ok(g),
            Framework::E2 => Ok(g * self.map.sqrt_dphi(s)?),
        }
    }

    pub fn deriv(&self, s: C64) -> Result<C64> {
        Ok(self.eval_with_deriv(s)?.1)
    }

    pub fn eval_with_deriv(&self, s: C64) -> Result<(C64, C64)> {
        let z = self.map.phi(s)?;
        let dphi = self.map.dphi(s)?;
        let (g, dg) = self.model.eval_with_deriv(z)?;
        match self.framework {
            Framework::H2A => Ok((g, dg * dphi)),
            Framework::E2 => {
                if dphi.norm() == 0.0 {
                    return Err(Error::ZeroDerivative(s));
                }
                let r = self.map.sqrt_dphi(s)?;
                let d2 = self.map.d2phi(s)?;
                Ok((g * r, dg * dphi * r + g * d2 / (2.0 * r)))
            }
        }
    }

    /// Quadrature spec with the map's singular boundary angles excluded.
    pub fn quadrature(&self, base: &QuadratureSpec) -> QuadratureSpec {
        base.clone().with_exclusions(self.map.singular_angles())
    }
}

impl DiskApproximant for DiskFunction {
    fn disk_eval(&self, s: C64) -> Result<C64> {
        self.eval(s)
    }
}

/// `<f, g>_{H2} = (1/2 pi) * integral f(e^{it}) conj(g(e^{it})) dt`.
pub fn h2_inner<F, G>(f: F, g: G, q: &QuadratureSpec) -> Result<C64>
where
    F: Fn(C64) -> Result<C64> + Sync,
    G: Fn(C64) -> Result<C64> + Sync,
{
    Ok(circle_mean(|s| Ok([f(s)? * g(s)?.conj()]), q)?.values[0])
}

pub fn h2_norm<F>(f: F, q: &QuadratureSpec) -> Result<f64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    Ok(circle_mean(|s| Ok([C64::new(f(s)?.norm_sqr(), 0.0)]), q)?.values[0].re.max(0.0).sqrt())
}

/// `(||F - R||, ||F||)` from one quadrature pass sharing the `F` samples.
pub fn error_norms(f: &DiskFunction, approx: &dyn DiskApproximant, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let spec = f.quadrature(q);
    let res = circle_mean(
        |s| {
            let v = f.eval(s)?;
            let e = v - approx.disk_eval(s)?;
            Ok([C64::new(e.norm_sqr(), 0.0), C64::new(v.norm_sqr(), 0.0)])
        },
        &spec,
    )?;
    Ok((res.values[0].re.max(0.0).sqrt(), res.values[1].re.max(0.0).sqrt()))
}

/// `||F - R|| / ||F||` in the H2 norm of the disk.
pub fn relative_error(f: &DiskFunction, approx: &dyn DiskApproximant, q: &QuadratureSpec) -> Result<f64> {
    let (e, n) = error_norms(f, approx, q)?;
    Ok(if n == 0.0 { if e == 0.0 { 0.0 } else { f64::INFINITY } } else { e / n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{Affine, ImplicitEuler, Moebius};
    use crate::models::{HeatModel, PoleResidueModel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn heat(fw: Framework) -> DiskFunction {
        DiskFunction::new(fw, Arc::new(HeatModel), Arc::new(Moebius))
    }

    #[test]
    fn heat_at_centre() {
        let e1 = (-1.0f64).exp();
        assert!((heat(Framework::H2A).eval(c(0.0, 0.0)).unwrap() - e1).norm() < 1e-15);
        let e2 = heat(Framework::E2).eval(c(0.0, 0.0)).unwrap();
        assert!((e2 - e1 * 2f64.sqrt()).norm() < 1e-15);
    }

    struct Identity;

    impl TransferFunction for Identity {
        fn name(&self) -> &str {
            "identity"
        }
        fn eval(&self, z: C64) -> Result<C64> {
            Ok(z)
        }
        fn deriv(&self, _z: C64) -> Result<C64> {
            Ok(c(1.0, 0.0))
        }
        fn domain(&self) -> crate::models::Analyticity {
            crate::models::Analyticity::HalfPlane { re_min: f64::NEG_INFINITY }
        }
    }

    #[test]
    fn implicit_euler_chain_rule() {
        let ie: Arc<dyn ConformalMap> = Arc::new(ImplicitEuler::new(1.0).unwrap());
        let f = DiskFunction::new(Framework::H2A, Arc::new(Identity), ie.clone());
        assert_eq!(f.deriv(c(0.3, -0.2)).unwrap(), c(-1.0, 0.0));
        let one = PoleResidueModel::new(vec![], vec![], c(1.0, 0.0)).unwrap();
        let g = DiskFunction::new(Framework::E2, Arc::new(one), ie);
        assert_eq!(g.deriv(c(0.3, 0.1)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn affine_identity_makes_frameworks_agree() {
        let m: Arc<dyn TransferFunction> = Arc::new(PoleResidueModel::random_outside_disk(4, 3));
        let map: Arc<dyn ConformalMap> = Arc::new(Affine::new(1.0, 0.0).unwrap());
        let e2 = DiskFunction::new(Framework::E2, m.clone(), map.clone());
        let h2 = DiskFunction::new(Framework::H2A, m, map);
        for s in [c(0.1, 0.2), c(-0.5, 0.3), c(0.0, -0.9)] {
            assert!((e2.eval(s).unwrap() - h2.eval(s).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn simple_pole_norm() {
        let f = |s: C64| Ok(C64::new(1.0, 0.0) / (s - 2.0));
        let n2 = h2_inner(f, f, &QuadratureSpec::default()).unwrap();
        assert!((n2 - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        let one = h2_inner(|_| Ok(c(1.0, 0.0)), |_| Ok(c(1.0, 0.0)), &QuadratureSpec::default()).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn framework_parsing() {
        assert_eq!("E2".parse::<Framework>().unwrap(), Framework::E2);
        assert_eq!("h2a".parse::<Framework>().unwrap(), Framework::H2A);
        assert!("h3".parse::<Framework>().is_err());
    }
}
