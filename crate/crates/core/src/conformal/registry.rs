use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Affine, Bdf2, Bdf4, ConformalMap, ImplicitEuler, Midpoint, Moebius};
use crate::error::{Error, Result};

/// Serialized map selection: `{kind, h}` plus `a`, `b` for `affine`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl MapSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        Self { kind: kind.into(), h: None, a: None, b: None }
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    pub fn build(&self) -> Result<Arc<dyn ConformalMap>> {
        MapRegistry::with_builtins().build(self)
    }
}

pub type MapBuilder = Box<dyn Fn(&MapSpec) -> Result<Arc<dyn ConformalMap>> + Send + Sync>;

pub struct MapRegistry {
    builders: BTreeMap<String, MapBuilder>,
}

impl Default for MapRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl MapRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    /// Builtin kinds. Default steps: `h = 1` for implicit Euler and
    /// midpoint, `h = 0.001` for the BDF maps.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        let moebius = |_: &MapSpec| Ok(Arc::new(Moebius) as Arc<dyn ConformalMap>);
        r.register("moebius_halfplane", moebius);
        r.register("moebius", moebius);
        r.register("implicit_euler", |s| Ok(Arc::new(ImplicitEuler::new(s.h.unwrap_or(1.0))?) as _));
        r.register("midpoint", |s| Ok(Arc::new(Midpoint::new(s.h.unwrap_or(1.0))?) as _));
        r.register("bdf2", |s| Ok(Arc::new(Bdf2::new(s.h.unwrap_or(1e-3))?) as _));
        r.register("bdf4", |s| Ok(Arc::new(Bdf4::new(s.h.unwrap_or(1e-3))?) as _));
        r.register("affine", |s| Ok(Arc::new(Affine::new(s.a.unwrap_or(1.0), s.b.unwrap_or(0.0))?) as _));
        r
    }

    pub fn register<F>(&mut self, name: &str, builder: F)
    where
        F: Fn(&MapSpec) -> Result<Arc<dyn ConformalMap>> + Send + Sync + 'static,
    {
        self.builders.insert(name.to_string(), Box::new(builder));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &MapSpec) -> Result<Arc<dyn ConformalMap>> {
        let b = self.builders.get(&spec.kind).ok_or_else(|| {
            Error::Config(format!(
                "unknown map kind `{}` (known: {})",
                spec.kind,
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        b(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_spec() {
        let reg = MapRegistry::with_builtins();
        for kind in ["moebius", "implicit_euler", "midpoint", "bdf2", "bdf4", "affine"] {
            let m = reg.build(&MapSpec::new(kind)).unwrap();
            let again = reg.build(&m.spec()).unwrap();
            assert_eq!(m.spec(), again.spec());
        }
        assert_eq!(reg.build(&MapSpec::new("moebius")).unwrap().kind(), "moebius_halfplane");
        assert_eq!(reg.build(&MapSpec::new("bdf4")).unwrap().h(), Some(1e-3));
    }

    #[test]
    fn unknown_kind() {
        let err = MapRegistry::with_builtins().build(&MapSpec::new("bdf7")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
