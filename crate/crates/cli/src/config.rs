use std::path::{Path, PathBuf};

use conformal_h2::conformal::MapSpec;
use conformal_h2::hardy::{Framework, QuadratureSpec};
use conformal_h2::irka::{DUpdate, IrkaOptions, Stabilization};
use conformal_h2::models::ModelParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A run description as read from a TOML file. Command-line flags
/// override individual fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub framework: Framework,
    /// Orders to sweep.
    pub r: Vec<usize>,
    /// Number of seeds; seeds `0..seeds` are used.
    pub seeds: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub stabilization: Stabilization,
    pub d_update: DUpdate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// `verify` passes when the largest residual is at most this.
    pub threshold: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let o = IrkaOptions::default();
        Self {
            framework: Framework::H2A,
            r: Vec::new(),
            seeds: 1,
            tol: o.tol,
            max_iter: o.max_iter,
            stabilization: o.stabilization,
            d_update: o.d_update,
            out: None,
            threshold: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    #[default]
    Impulse,
    /// `+-1` with a fixed seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub input: InputKind,
    /// Impulse position.
    pub m: usize,
    /// Number of steps.
    pub k: usize,
    pub input_seed: u64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { input: InputKind::Impulse, m: 10, k: 100, input_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Log-spaced circle samples per half circle.
    pub samples_per_side: usize,
    pub theta_min: f64,
    /// Relative stopping tolerance of the greedy fit; zero runs to the
    /// requested degree.
    pub aaa_tol: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self { samples_per_side: 500, theta_min: 1e-7, aaa_tol: 0.0 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let run = &self.run;
        if !(run.tol > 0.0) {
            return Err(CliError::Config(format!("run.tol must be positive, got {}", run.tol)));
        }
        if run.max_iter == 0 {
            return Err(CliError::Config("run.max_iter must be at least 1".into()));
        }
        if run.seeds == 0 {
            return Err(CliError::Config("run.seeds must be at least 1".into()));
        }
        if !(run.threshold >= 0.0) {
            return Err(CliError::Config("run.threshold must be non-negative".into()));
        }
        self.quadrature.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.simulate.k == 0 {
            return Err(CliError::Config("simulate.k must be at least 1".into()));
        }
        if self.simulate.input == InputKind::Impulse && self.simulate.m >= self.simulate.k {
            return Err(CliError::Config(format!(
                "impulse position simulate.m = {} must be below simulate.k = {}",
                self.simulate.m, self.simulate.k
            )));
        }
        if self.compare.samples_per_side < 2 || !(self.compare.theta_min > 0.0 && self.compare.theta_min < 1.0) {
            return Err(CliError::Config("compare needs samples_per_side >= 2 and 0 < theta_min < 1".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<&ModelParams, CliError> {
        self.model.as_ref().ok_or_else(|| CliError::Config("no model given (use --model or a [model] table)".into()))
    }

    pub fn map(&self) -> Result<&MapSpec, CliError> {
        self.map.as_ref().ok_or_else(|| CliError::Config("no map given (use --map or a [map] table)".into()))
    }

    pub fn irka_options(&self, seed: u64) -> IrkaOptions {
        IrkaOptions {
            tol: self.run.tol,
            max_iter: self.run.max_iter,
            seed,
            stabilization: self.run.stabilization,
            d_update: self.run.d_update,
            initial_shifts: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_document() {
        let cfg = RunConfig::parse(
            r#"
            [model]
            name = "convdiff"
            n0 = 20

            [map]
            kind = "bdf4"
            h = 0.001

            [run]
            framework = "h2a"
            r = [4, 6]
            seeds = 3

            [quadrature]
            rel_tol = 1e-9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.model().unwrap().n0, Some(20));
        assert_eq!(cfg.run.r, vec![4, 6]);
        assert_eq!(cfg.quadrature.rel_tol, 1e-9);
        assert_eq!(cfg.simulate.m, 10);
        let back = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        for doc in ["[run]\nseed = 3\n", "[map]\nkind = \"bdf2\"\nstep = 1\n", "typo = 1\n"] {
            assert!(matches!(RunConfig::parse(doc), Err(CliError::Config(_))), "{doc}");
        }
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::parse("[run]\ntol = -1.0\n").is_err());
        assert!(RunConfig::parse("[quadrature]\nmax_panels = 3\n").is_err());
        assert!(RunConfig::parse("[run]\nframework = \"h3\"\n").is_err());
    }
}
