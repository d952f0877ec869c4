#![allow(dead_code)]

use std::sync::Arc;

use conformal_h2::conformal::{ConformalMap, MapSpec};
use conformal_h2::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Relative distance with a unit floor on the scale.
pub fn rel(got: C64, want: C64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}

pub const KINDS: [&str; 6] = ["moebius", "implicit_euler", "midpoint", "bdf2", "bdf4", "affine"];

pub fn map(kind: &str, h: f64, a: f64, b: f64) -> Arc<dyn ConformalMap> {
    let spec = match kind {
        "affine" => MapSpec { kind: kind.into(), h: None, a: Some(a), b: Some(b) },
        "moebius" => MapSpec::new(kind),
        _ => MapSpec::new(kind).with_h(h),
    };
    spec.build().unwrap()
}
