use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    build_conv_diff, load_matrix_market, random_stable_model, ConvDiffConfig, HeatModel, PoleResidueModel,
    TransferFunction,
};
use crate::error::{Error, Result};
use crate::C64;

/// Parameters for a named model. Which fields matter depends on the model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_interval: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtx_a: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtx_b: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtx_c: Option<PathBuf>,
    /// Feedthrough as `[re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<[f64; 2]>,
    /// State dimension for `stable`, order for `rational`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ModelParams {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }
}

pub type ModelBuilder = Box<dyn Fn(&ModelParams) -> Result<Arc<dyn TransferFunction>> + Send + Sync>;

/// Name -> constructor table for transfer-function models.
pub struct ModelRegistry {
    builders: BTreeMap<String, ModelBuilder>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("heat", |_| Ok(Arc::new(HeatModel) as Arc<dyn TransferFunction>));
        r.register("convdiff", |p| {
            let def = ConvDiffConfig::default();
            let cfg = ConvDiffConfig {
                n0: p.n0.unwrap_or(def.n0),
                conv: p.conv.unwrap_or(def.conv),
                input_interval: p.input_interval.unwrap_or(def.input_interval),
                output_interval: p.output_interval.unwrap_or(def.output_interval),
            };
            Ok(Arc::new(build_conv_diff(&cfg)?) as Arc<dyn TransferFunction>)
        });
        r.register("mtx", |p| {
            let need = |f: &Option<PathBuf>, k: &str| {
                f.clone().ok_or_else(|| Error::Config(format!("model `mtx` needs `{k}`")))
            };
            let d = p.d.map_or(C64::new(0.0, 0.0), |[re, im]| C64::new(re, im));
            let m = load_matrix_market(need(&p.mtx_a, "mtx_a")?, need(&p.mtx_b, "mtx_b")?, need(&p.mtx_c, "mtx_c")?, d)?;
            Ok(Arc::new(m) as Arc<dyn TransferFunction>)
        });
        r.register("stable", |p| {
            let m = random_stable_model(p.order.unwrap_or(20), p.seed.unwrap_or(0))?;
            Ok(Arc::new(m) as Arc<dyn TransferFunction>)
        });
        r.register("rational", |p| {
            let m = PoleResidueModel::random_outside_disk(p.order.unwrap_or(4), p.seed.unwrap_or(0));
            Ok(Arc::new(m) as Arc<dyn TransferFunction>)
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, builder: F)
    where
        F: Fn(&ModelParams) -> Result<Arc<dyn TransferFunction>> + Send + Sync + 'static,
    {
        self.builders.insert(name.to_string(), Box::new(builder));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, params: &ModelParams) -> Result<Arc<dyn TransferFunction>> {
        let b = self.builders.get(&params.name).ok_or_else(|| {
            Error::Config(format!(
                "unknown model `{}` (known: {})",
                params.name,
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        b(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        let reg = ModelRegistry::with_builtins();
        let heat = reg.build(&ModelParams::named("heat")).unwrap();
        assert_eq!(heat.name(), "heat");
        let cd = reg.build(&ModelParams { n0: Some(4), ..ModelParams::named("convdiff") }).unwrap();
        assert!(cd.eval(C64::new(1.0, 0.0)).is_ok());
        assert!(matches!(reg.build(&ModelParams::named("nope")), Err(Error::Config(_))));
        assert!(matches!(reg.build(&ModelParams::named("mtx")), Err(Error::Config(_))));
    }

    #[test]
    fn custom_registration() {
        let mut reg = ModelRegistry::empty();
        reg.register("unit", |_| {
            Ok(Arc::new(PoleResidueModel::new(vec![], vec![], C64::new(1.0, 0.0))?) as Arc<dyn TransferFunction>)
        });
        let m = reg.build(&ModelParams::named("unit")).unwrap();
        assert_eq!(m.eval(C64::new(5.0, 1.0)).unwrap(), C64::new(1.0, 0.0));
    }
}
