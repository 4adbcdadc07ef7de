//! Scenario configuration. Defaults reproduce the reference evaluation setup.

use std::fmt;
use std::str::FromStr;

use ktopo::algorithms::{AlgorithmSpec, ParamDefaults};
use ktopo::energy::PowerModel;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Syntax(String),
    #[error("{field}: {msg}")]
    Invalid { field: &'static str, msg: String },
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkloadKind {
    /// Every node broadcasts once per interval at its largest active power.
    Gossip,
    /// Every node sends one message per interval to a random alive node.
    Messaging,
    /// Every node sends one message per interval to the base station.
    Collection,
}

/// Which node acts as base station for hop counts and the collection workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseStation {
    #[default]
    Center,
    Node(u32),
    None,
}

impl FromStr for BaseStation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "center" => Ok(BaseStation::Center),
            "none" => Ok(BaseStation::None),
            id => id
                .parse()
                .map(BaseStation::Node)
                .map_err(|_| format!("expected `center`, `none` or a node id, got `{id}`")),
        }
    }
}

impl fmt::Display for BaseStation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseStation::Center => write!(f, "center"),
            BaseStation::Node(n) => write!(f, "{n}"),
            BaseStation::None => write!(f, "none"),
        }
    }
}

impl Serialize for BaseStation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BaseStation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilityConfig {
    /// Gauss-Markov memory in [0, 1].
    pub alpha: f64,
    /// m/s.
    pub mean_speed: f64,
    /// Standard deviation of the speed noise; `None` means 20 % of `mean_speed`.
    pub speed_sigma: Option<f64>,
    /// Standard deviation of the direction noise, radians.
    pub direction_sigma: f64,
    /// A surviving link emits a weight event once its length drifted by more than this (m).
    pub weight_epsilon: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig { alpha: 0.2, mean_speed: 0.005, speed_sigma: None, direction_sigma: 0.5, weight_epsilon: 1.0 }
    }
}

impl MobilityConfig {
    pub fn speed_sigma(&self) -> f64 {
        self.speed_sigma.unwrap_or(0.2 * self.mean_speed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryConfig {
    /// Joules.
    pub capacity: f64,
    pub min_fraction: f64,
    pub max_fraction: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { capacity: 130.0, min_fraction: 0.3, max_fraction: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkloadConfig {
    pub kind: WorkloadKind,
    /// Seconds between messages; also the simulation step.
    pub message_interval: f64,
    pub message_bytes: u32,
    /// Radio bit rate in bit/s; airtime per message is `8 · message_bytes / bitrate`.
    pub bitrate: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig { kind: WorkloadKind::Messaging, message_interval: 30.0, message_bytes: 1000, bitrate: 1e6 }
    }
}

impl WorkloadConfig {
    pub fn airtime(&self) -> f64 {
        8.0 * f64::from(self.message_bytes) / self.bitrate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub node_count: usize,
    /// Side length of the square world, meters.
    pub world_side: f64,
    pub transmission_radius: f64,
    /// Minutes.
    pub sim_duration: u32,
    /// Minutes between TC runs.
    pub tc_interval: u32,
    pub algorithm: String,
    pub k: f64,
    pub w_min: f64,
    pub seeds: Vec<u64>,
    /// Power coefficient c in p = c · w² (W/m²).
    pub power_coefficient: f64,
    pub base_station: BaseStation,
    pub mobility: MobilityConfig,
    pub battery: BatteryConfig,
    pub workload: WorkloadConfig,
}

/// Chosen so that in the default scenario the first node dies within the 25 h run
/// (about 2.5 to 5 h under kTC) while most nodes survive to the end.
pub const DEFAULT_POWER_COEFFICIENT: f64 = 1.5e-4;

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            node_count: 100,
            world_side: 500.0,
            transmission_radius: 130.0,
            sim_duration: 25 * 60,
            tc_interval: 10,
            algorithm: "ektc".into(),
            k: 1.41,
            w_min: 0.0,
            seeds: vec![1, 2, 3, 4, 5],
            power_coefficient: DEFAULT_POWER_COEFFICIENT,
            base_station: BaseStation::Center,
            mobility: MobilityConfig::default(),
            battery: BatteryConfig::default(),
            workload: WorkloadConfig::default(),
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.node_count == 0 {
            return Err(invalid("node_count", "must be positive"));
        }
        positive("world_side", self.world_side)?;
        non_negative("transmission_radius", self.transmission_radius)?;
        if self.sim_duration == 0 {
            return Err(invalid("sim_duration", "must be positive"));
        }
        if self.tc_interval == 0 {
            return Err(invalid("tc_interval", "must be positive"));
        }
        if !self.sim_duration.is_multiple_of(self.tc_interval) {
            return Err(invalid(
                "tc_interval",
                format!("{} does not divide sim_duration {}", self.tc_interval, self.sim_duration),
            ));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "need at least one seed"));
        }
        positive("power_coefficient", self.power_coefficient)?;
        self.algorithm_spec()?;
        if let BaseStation::Node(n) = self.base_station {
            if n as usize >= self.node_count {
                return Err(invalid("base_station", format!("node {n} does not exist with node_count {}", self.node_count)));
            }
        }
        let m = &self.mobility;
        if !(0.0..=1.0).contains(&m.alpha) {
            return Err(invalid("mobility.alpha", format!("must lie in [0, 1], got {}", m.alpha)));
        }
        non_negative("mobility.mean_speed", m.mean_speed)?;
        non_negative("mobility.speed_sigma", m.speed_sigma())?;
        non_negative("mobility.direction_sigma", m.direction_sigma)?;
        non_negative("mobility.weight_epsilon", m.weight_epsilon)?;
        let b = &self.battery;
        positive("battery.capacity", b.capacity)?;
        if !(b.min_fraction > 0.0 && b.min_fraction <= b.max_fraction && b.max_fraction <= 1.0) {
            return Err(invalid(
                "battery.min_fraction",
                format!("need 0 < min_fraction ≤ max_fraction ≤ 1, got {} and {}", b.min_fraction, b.max_fraction),
            ));
        }
        let w = &self.workload;
        positive("workload.message_interval", w.message_interval)?;
        if w.message_bytes == 0 {
            return Err(invalid("workload.message_bytes", "must be positive"));
        }
        positive("workload.bitrate", w.bitrate)?;
        let interval_s = f64::from(self.tc_interval) * 60.0;
        let steps = interval_s / w.message_interval;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(invalid(
                "workload.message_interval",
                format!("{} s does not divide the TC interval of {interval_s} s", w.message_interval),
            ));
        }
        if w.kind == WorkloadKind::Collection && self.base_station == BaseStation::None {
            return Err(invalid("base_station", "the collection workload needs a base station"));
        }
        Ok(())
    }

    /// Algorithm string combined with `k`, `w_min` and the power model.
    pub fn algorithm_spec(&self) -> Result<AlgorithmSpec, ConfigError> {
        let defaults = ParamDefaults { k: self.k, ..ParamDefaults::default() };
        let mut spec = AlgorithmSpec::parse_with(&self.algorithm, &defaults).map_err(|e| invalid("algorithm", e.to_string()))?;
        non_negative("w_min", self.w_min)?;
        if self.w_min > 0.0 && spec.min_weight.is_none() {
            spec = spec.with_min_weight(self.w_min).map_err(|e| invalid("w_min", e.to_string()))?;
        }
        let power = PowerModel::new(self.power_coefficient).map_err(|e| invalid("power_coefficient", e.to_string()))?;
        Ok(spec.with_power(power))
    }

    pub fn power_model(&self) -> PowerModel {
        PowerModel::new(self.power_coefficient).expect("validated")
    }

    /// Simulation steps between two TC runs.
    pub fn steps_per_interval(&self) -> u32 {
        (f64::from(self.tc_interval) * 60.0 / self.workload.message_interval).round() as u32
    }

    pub fn tc_runs(&self) -> u32 {
        self.sim_duration / self.tc_interval
    }

    pub fn needs_hop_counts(&self) -> bool {
        self.base_station != BaseStation::None
            && (self.workload.kind == WorkloadKind::Collection
                || self.algorithm_spec().map(|s| s.node_attribute_relevant(ktopo::NodeAttribute::HopCount)).unwrap_or(false))
    }
}
