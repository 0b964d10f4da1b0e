//! Experiment configuration shared by every command.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::corpus::CorpusSpec;
use crate::grid::{BallFamilyConfig, Grid, GridBox};
use crate::growth::{GrowthFunction, GrowthIndices, GrowthSpec, WeightSpec};
use crate::johnnirenberg::DecayModel;
use crate::luxembourg::DEFAULT_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub res: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub q: Vec<f64>,
    pub s: usize,
    pub eps: f64,
    /// JN thresholds; `None` uses the default geometric grid.
    pub alphas: Option<Vec<f64>>,
    /// Square-transform scales; `None` uses the default dyadic levels.
    pub t_levels: Option<Vec<f64>>,
    /// Muckenhoupt sampling heights.
    pub t_grid: Vec<f64>,
    /// `[center.., radius]`
    pub ball: Option<Vec<f64>>,
    pub bracket: [f64; 2],
    pub model: DecayModel,
    /// Skip the index search and use these values.
    pub indices: Option<GrowthIndices>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            q: vec![1.0, 2.0],
            s: 0,
            eps: 1.0,
            alphas: None,
            t_levels: None,
            t_grid: vec![1.0],
            ball: None,
            bracket: [1.0 / 64.0, 64.0],
            model: DecayModel::Exponential,
            indices: None,
        }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub growth: GrowthSpec,
    #[serde(default)]
    pub balls: BallFamilyConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub function: Option<CorpusSpec>,
    #[serde(default)]
    pub params: Params,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig { lo: vec![-1.0], hi: vec![1.0], res: vec![1024] },
            growth: GrowthSpec::Power { p: 1.0 },
            balls: BallFamilyConfig::default(),
            tol: DEFAULT_TOL,
            function: None,
            params: Params::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parse JSON, reporting the failing field path with line and column.
    pub fn parse(text: &str) -> Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            format!("config field '{path}' (line {}, column {}): {inner}", inner.line(), inner.column())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), String> {
        self.grid().map_err(|e| format!("grid: {e}"))?;
        if let GrowthSpec::WeightedPower { weight: WeightSpec::Table(p), .. } = &self.growth {
            if !Path::new(p).exists() {
                return Err(format!("growth.weight.table: file '{p}' does not exist"));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if let Some(b) = &self.params.ball {
            if b.len() != self.grid.lo.len() + 1 {
                return Err(format!("params.ball needs {} numbers (center, radius)", self.grid.lo.len() + 1));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> crate::Result<Grid> {
        Grid::new(GridBox::new(self.grid.lo.clone(), self.grid.hi.clone())?, self.grid.res.clone())
    }

    pub fn growth_function(&self) -> crate::Result<GrowthFunction> {
        GrowthFunction::from_spec(&self.growth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig { function: Some(CorpusSpec::AbsPower { a: 0.5 }), ..Default::default() };
        cfg.params.ball = Some(vec![0.0, 0.5]);
        cfg.growth = GrowthSpec::WeightedPower { p: 0.5, weight: WeightSpec::AbsPower(0.5) };
        let text = cfg.to_json();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::parse(
            r#"{"grid":{"lo":[-1],"hi":[1],"res":[64]},"growth":{"kind":"power","p":0.5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.params, Params::default());
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn unknown_field_is_located() {
        let err = ExperimentConfig::parse(
            "{\"grid\":{\"lo\":[-1],\"hi\":[1],\"res\":[64]},\n\"growth\":{\"kind\":\"power\",\"p\":1},\n\"params\":{\"qq\":[1]}}",
        )
        .unwrap_err();
        assert!(err.contains("params"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn bad_grid_rejected() {
        let err = ExperimentConfig::parse(r#"{"grid":{"lo":[1],"hi":[-1],"res":[64]},"growth":{"kind":"ky_log"}}"#)
            .unwrap_err();
        assert!(err.starts_with("grid"), "{err}");
    }
}
