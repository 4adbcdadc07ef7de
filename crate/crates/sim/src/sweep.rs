//! Cartesian parameter sweeps over algorithms, min-weight thresholds, k and seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, ScenarioConfig};
use crate::metrics::RunMetrics;
use crate::scenario::{run_scenario, ScenarioError};

/// Sweep axes. An empty axis falls back to the base configuration's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepAxes {
    pub algorithms: Vec<String>,
    pub w_min: Vec<f64>,
    pub k: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axes: SweepAxes,
}

/// One cell: a configuration with exactly one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub config: ScenarioConfig,
    pub seed: u64,
}

impl SweepSpec {
    /// Parses a scenario file with an optional `[sweep]` table.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
        let axes = match table.remove("sweep") {
            Some(v) => v.try_into().map_err(|e: toml::de::Error| ConfigError::Syntax(format!("[sweep]: {}", e.message())))?,
            None => SweepAxes::default(),
        };
        let base: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
        let spec = SweepSpec { base, axes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        for cell in self.cells() {
            cell.config.validate()?;
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<SweepCell> {
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        let algorithms = if self.axes.algorithms.is_empty() { vec![self.base.algorithm.clone()] } else { self.axes.algorithms.clone() };
        let seeds = if self.axes.seeds.is_empty() { self.base.seeds.clone() } else { self.axes.seeds.clone() };
        let mut out = Vec::new();
        for a in &algorithms {
            for &w in &or(&self.axes.w_min, self.base.w_min) {
                for &k in &or(&self.axes.k, self.base.k) {
                    for &seed in &seeds {
                        let config = ScenarioConfig { algorithm: a.clone(), w_min: w, k, seeds: vec![seed], ..self.base.clone() };
                        out.push(SweepCell { config, seed });
                    }
                }
            }
        }
        out
    }

    /// Runs every cell in parallel, in cell order.
    pub fn run(&self) -> Vec<Result<RunMetrics, ScenarioError>> {
        self.cells().par_iter().map(|c| run_scenario(&c.config, c.seed)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_axes() {
        let text = "algorithm = \"ktc\"\n[sweep]\nalgorithms = [\"ktc\", \"ektc\"]\nseeds = [1, 2, 3, 4, 5]\n";
        let s = SweepSpec::from_toml(text).unwrap();
        assert_eq!(s.cells().len(), 10);
        let s = SweepSpec { axes: SweepAxes { w_min: vec![0.0, 20.0, 40.0], ..s.axes.clone() }, ..s };
        assert_eq!(s.cells().len(), 30);
    }

    #[test]
    fn bad_axis_value_is_rejected() {
        let text = "[sweep]\nalgorithms = [\"ktc\", \"nope\"]\n";
        assert!(matches!(SweepSpec::from_toml(text), Err(ConfigError::Invalid { field: "algorithm", .. })));
        assert!(SweepSpec::from_toml("[sweep]\nbogus = 1\n").is_err());
    }
}
