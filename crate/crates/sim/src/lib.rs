//! Desk-scale wireless sensor network simulator for incremental topology control.
//!
//! A scenario places nodes uniformly, moves them with a Gauss-Markov model,
//! drains batteries according to a traffic workload, and invokes TC at a fixed
//! interval. Each TC run records one [`MetricsRow`].

pub mod config;
pub mod metrics;
pub mod scenario;
pub mod sweep;
pub mod workload;
pub mod world;

pub use config::{ConfigError, ScenarioConfig, WorkloadKind};
pub use metrics::{compare_runs, compare_to_unrestricted, MetricsRow, RelativeRow, RunMetrics, RunSummary};
pub use scenario::{run_scenario, run_scenario_with, ScenarioError};
pub use sweep::SweepSpec;
