//! Conformal maps from the open unit disk onto a domain `A`.
//!
//! Each map kind implements [`ConformalMap`] and is registered by name in
//! [`MapRegistry`]. All builtin kinds have real coefficients, and all but
//! Möbius and midpoint are polynomials in `s`.

mod maps;
mod registry;

pub use maps::{Affine, Bdf2, Bdf4, ImplicitEuler, Midpoint, Moebius};
pub use registry::{MapBuilder, MapRegistry, MapSpec};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::C64;

/// `phi(s) = p(s) / q(s)` with `p(s) = sum_j alpha[j] s^j` and
/// `q(s) = sum_i beta[i] s^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFraction {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl PolyFraction {
    pub fn eval(&self, s: C64) -> C64 {
        horner(&self.alpha, s) / horner(&self.beta, s)
    }

    /// Denominator is the constant one, so the delay system has no input
    /// or state-matrix memory.
    pub fn is_polynomial(&self) -> bool {
        self.beta.len() == 1 && self.beta[0] == 1.0
    }
}

fn horner(c: &[f64], s: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * s + a)
}

pub trait ConformalMap: Debug + Send + Sync {
    /// Canonical kind name, as accepted by [`MapRegistry`].
    fn kind(&self) -> &'static str;

    /// Time step, for maps induced by a time integrator.
    fn h(&self) -> Option<f64> {
        None
    }

    fn spec(&self) -> MapSpec;

    fn phi(&self, s: C64) -> Result<C64>;

    fn dphi(&self, s: C64) -> Result<C64>;

    fn d2phi(&self, s: C64) -> Result<C64>;

    /// A branch of `sqrt(phi'(s))` that is analytic on the closed disk.
    fn sqrt_dphi(&self, s: C64) -> Result<C64>;

    /// The unique preimage of `z` in the unit disk.
    fn phi_inv(&self, z: C64) -> Result<C64>;

    /// Analytic continuation of `phi_inv` across the boundary, used by the
    /// reflection. Defaults to the closed-form inverse.
    fn phi_inv_continued(&self, z: C64) -> Result<C64> {
        self.phi_inv(z)
    }

    fn poly_fraction(&self) -> PolyFraction;

    /// Boundary angles where `phi` has a pole; quadrature panels break there.
    fn singular_angles(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Anti-conformal reflection across `∂A`: `a(z) = phi(1 / conj(phi^{-1}(z)))`.
///
/// For real-coefficient maps this equals `conj(phi(1/s))` with
/// `s = phi^{-1}(z)`, and it fixes every boundary point.
pub fn schwarz_reflect(map: &dyn ConformalMap, z: C64) -> Result<C64> {
    let s = map.phi_inv_continued(z)?;
    if s.norm() < 1e-300 {
        return Err(Error::ReflectionAtCenter(z));
    }
    map.phi(C64::new(1.0, 0.0) / s.conj())
}

/// Point on the boundary curve `∂A` at angle `theta`.
pub fn boundary_point(map: &dyn ConformalMap, theta: f64) -> Result<C64> {
    map.phi(C64::from_polar(1.0, theta))
}

/// Winding number of the sampled curve `phi(e^{i theta})` around `z0`.
pub fn winding_number(map: &dyn ConformalMap, z0: C64, samples: usize) -> Result<i64> {
    let mut total = 0.0;
    let mut prev = boundary_point(map, 0.0)? - z0;
    for k in 1..=samples {
        let cur = boundary_point(map, std::f64::consts::TAU * k as f64 / samples as f64)? - z0;
        total += (cur / prev).arg();
        prev = cur;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}
