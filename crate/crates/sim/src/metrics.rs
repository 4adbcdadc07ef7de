//! Per-run metrics, summaries, and relative comparison against a baseline.

use std::collections::BTreeMap;
use std::io;

use ktopo::algorithms::AlgorithmSpec;
use ktopo::LifetimeRecord;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One row per TC run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub sim_time_min: f64,
    pub alive_nodes: usize,
    pub topology_size: usize,
    pub lsm_count: u64,
    pub tc_wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Canonical algorithm string, including parameters and min-weight suffix.
    pub algorithm: String,
    pub seed: u64,
    pub rows: Vec<MetricsRow>,
    /// Death times in minutes.
    pub lifetime: LifetimeRecord,
    pub initial_link_count: usize,
    pub initial_mean_out_degree: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 { 0.0 } else { sum / n as f64 }
}

impl RunMetrics {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            algorithm: self.algorithm.clone(),
            seed: self.seed,
            tc_runs: self.rows.len(),
            node_count: self.lifetime.node_count,
            initial_link_count: self.initial_link_count,
            initial_mean_out_degree: self.initial_mean_out_degree,
            l1: self.lifetime.l1(),
            l50: self.lifetime.l50(),
            l100: self.lifetime.l100(),
            mean_topology_size: mean(self.rows.iter().map(|r| r.topology_size as f64)),
            mean_lsm: mean(self.rows.iter().map(|r| r.lsm_count as f64)),
            mean_wall_ms: mean(self.rows.iter().map(|r| r.tc_wall_ms)),
            death_times: self.lifetime.death_times.iter().map(|(n, t)| (n.0, *t)).collect(),
        }
    }

    /// Rows with the wall-clock column removed, for reproducibility checks.
    pub fn deterministic_rows(&self) -> Vec<(u64, usize, usize, u64)> {
        self.rows.iter().map(|r| (r.sim_time_min.to_bits(), r.alive_nodes, r.topology_size, r.lsm_count)).collect()
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary_json<W: io::Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, &self.summary())
    }
}

/// What gets written to the summary JSON of one run. Lifetimes are `null`
/// when too few nodes died before the end of the simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub seed: u64,
    pub tc_runs: usize,
    pub node_count: usize,
    pub initial_link_count: usize,
    pub initial_mean_out_degree: f64,
    pub l1: Option<f64>,
    pub l50: Option<f64>,
    pub l100: Option<f64>,
    pub mean_topology_size: f64,
    pub mean_lsm: f64,
    pub mean_wall_ms: f64,
    pub death_times: BTreeMap<u32, f64>,
}

/// Means over seeds for one algorithm, plus ratios against the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeRow {
    pub algorithm: String,
    pub baseline: String,
    pub runs: usize,
    pub l1: Option<f64>,
    pub l50: Option<f64>,
    pub l100: Option<f64>,
    pub mean_topology_size: f64,
    pub mean_wall_ms: f64,
    pub mean_lsm: f64,
    pub rho_l1: Option<f64>,
    pub rho_l50: Option<f64>,
    pub rho_l100: Option<f64>,
    pub rho_topology_size: Option<f64>,
    pub rho_wall_time: Option<f64>,
    pub rho_lsm: Option<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CompareError {
    #[error("baseline `{0}` has no runs")]
    MissingBaseline(String),
}

#[derive(Debug, Clone, Copy)]
struct Means {
    runs: usize,
    l1: Option<f64>,
    l50: Option<f64>,
    l100: Option<f64>,
    size: f64,
    wall: f64,
    lsm: f64,
}

/// Mean of the defined values; `None` unless every run defines one.
fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let known: Option<Vec<f64>> = values.iter().copied().collect();
    known.filter(|v| !v.is_empty()).map(|v| mean(v.into_iter()))
}

fn means(runs: &[&RunSummary]) -> Means {
    let pick = |f: fn(&RunSummary) -> Option<f64>| mean_defined(&runs.iter().map(|r| f(r)).collect::<Vec<_>>());
    Means {
        runs: runs.len(),
        l1: pick(|r| r.l1),
        l50: pick(|r| r.l50),
        l100: pick(|r| r.l100),
        size: mean(runs.iter().map(|r| r.mean_topology_size)),
        wall: mean(runs.iter().map(|r| r.mean_wall_ms)),
        lsm: mean(runs.iter().map(|r| r.mean_lsm)),
    }
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if b != 0.0 => Some(a / b),
        _ => None,
    }
}

fn group(summaries: &[RunSummary]) -> BTreeMap<&str, Vec<&RunSummary>> {
    let mut by: BTreeMap<&str, Vec<&RunSummary>> = BTreeMap::new();
    for s in summaries {
        by.entry(s.algorithm.as_str()).or_default().push(s);
    }
    by
}

fn relative(name: &str, m: Means, baseline: &str, b: Means) -> RelativeRow {
    RelativeRow {
        algorithm: name.to_string(),
        baseline: baseline.to_string(),
        runs: m.runs,
        l1: m.l1,
        l50: m.l50,
        l100: m.l100,
        mean_topology_size: m.size,
        mean_wall_ms: m.wall,
        mean_lsm: m.lsm,
        rho_l1: ratio(m.l1, b.l1),
        rho_l50: ratio(m.l50, b.l50),
        rho_l100: ratio(m.l100, b.l100),
        rho_topology_size: ratio(Some(m.size), Some(b.size)),
        rho_wall_time: ratio(Some(m.wall), Some(b.wall)),
        rho_lsm: ratio(Some(m.lsm), Some(b.lsm)),
    }
}

/// Ratios of every algorithm's seed means against those of `baseline`.
pub fn compare_runs(summaries: &[RunSummary], baseline: &str) -> Result<Vec<RelativeRow>, CompareError> {
    let by = group(summaries);
    let base = by.get(baseline).ok_or_else(|| CompareError::MissingBaseline(baseline.to_string()))?;
    let b = means(base);
    Ok(by.iter().map(|(name, runs)| relative(name, means(runs), baseline, b)).collect())
}

/// Each min-weight variant relative to the same algorithm without min-weight.
/// Algorithms without such a counterpart in `summaries` are skipped.
pub fn compare_to_unrestricted(summaries: &[RunSummary]) -> Vec<RelativeRow> {
    let by = group(summaries);
    let mut out = Vec::new();
    for (name, runs) in &by {
        let Ok(spec) = name.parse::<AlgorithmSpec>() else { continue };
        let base = AlgorithmSpec { min_weight: None, ..spec }.to_string();
        if let Some(b) = by.get(base.as_str()) {
            out.push(relative(name, means(runs), &base, means(b)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(alg: &str, seed: u64, l1: Option<f64>, size: f64) -> RunSummary {
        RunSummary {
            algorithm: alg.into(),
            seed,
            tc_runs: 1,
            node_count: 10,
            initial_link_count: 0,
            initial_mean_out_degree: 0.0,
            l1,
            l50: None,
            l100: None,
            mean_topology_size: size,
            mean_lsm: 2.0,
            mean_wall_ms: 1.0,
            death_times: BTreeMap::new(),
        }
    }

    #[test]
    fn baseline_against_itself_is_one() {
        let s = vec![summary("maxpower", 1, Some(500.0), 30.0), summary("maxpower", 2, Some(300.0), 50.0)];
        let rows = compare_runs(&s, "maxpower").unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].l1, Some(400.0));
        assert_eq!(rows[0].rho_l1, Some(1.0));
        assert_eq!(rows[0].rho_topology_size, Some(1.0));
        assert_eq!(rows[0].rho_l50, None);
    }

    #[test]
    fn scaling_lifetimes_keeps_ratios() {
        let s = vec![summary("maxpower", 1, Some(500.0), 30.0), summary("ktc(k=1.41)", 1, Some(550.0), 20.0)];
        let doubled: Vec<RunSummary> = s.iter().cloned().map(|mut r| {
            r.l1 = r.l1.map(|v| v * 2.0);
            r
        }).collect();
        let a = compare_runs(&s, "maxpower").unwrap();
        let b = compare_runs(&doubled, "maxpower").unwrap();
        assert_eq!(a[0].rho_l1, b[0].rho_l1);
        assert!((a[0].rho_l1.unwrap() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn missing_baseline_is_an_error() {
        let s = vec![summary("ktc(k=1.41)", 1, None, 1.0)];
        assert_eq!(compare_runs(&s, "maxpower"), Err(CompareError::MissingBaseline("maxpower".into())));
    }

    #[test]
    fn min_weight_variants_pair_with_unrestricted_runs() {
        let s = vec![
            summary("ktc(k=1.41)", 1, Some(100.0), 40.0),
            summary("ktc(k=1.41)+minweight(w=20)", 1, Some(110.0), 30.0),
            summary("ektc(k=1.41)+minweight(w=20)", 1, Some(110.0), 30.0),
        ];
        let rows = compare_to_unrestricted(&s);
        assert_eq!(rows.len(), 2);
        let k = rows.iter().find(|r| r.algorithm.starts_with("ktc(k=1.41)+")).unwrap();
        assert_eq!(k.baseline, "ktc(k=1.41)");
        assert_eq!(k.rho_topology_size, Some(0.75));
    }
}
