//! Transmission power, expected remaining lifetime, and battery depletion.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::topology::{LinkId, LinkState, NodeId, Topology, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("power coefficient must be finite and positive, got {0}")]
    InvalidCoefficient(f64),
    #[error("transmission power must be positive, got {0}")]
    NonPositivePower(f64),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// p(e) = c · w(e)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    coefficient: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel { coefficient: 0.01 }
    }
}

impl PowerModel {
    pub fn new(coefficient: f64) -> Result<Self, EnergyError> {
        if coefficient.is_finite() && coefficient > 0.0 {
            Ok(PowerModel { coefficient })
        } else {
            Err(EnergyError::InvalidCoefficient(coefficient))
        }
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn power_for_weight(&self, weight: f64) -> f64 {
        self.coefficient * weight * weight
    }
}

pub fn required_power(model: &PowerModel, t: &Topology, e: LinkId) -> Result<f64, EnergyError> {
    Ok(model.power_for_weight(t.link(e)?.weight))
}

pub fn expected_remaining_lifetime_link(node_energy: f64, power: f64) -> Result<f64, EnergyError> {
    if power.is_nan() || power <= 0.0 {
        return Err(EnergyError::NonPositivePower(power));
    }
    Ok(node_energy / power)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifetimeMode {
    ActiveOnly,
    AllLinks,
}

/// Minimum r(e) over the node's selected outgoing links; +inf when none qualify.
pub fn expected_remaining_lifetime_node(
    t: &Topology,
    model: &PowerModel,
    node: NodeId,
    mode: LifetimeMode,
) -> Result<f64, EnergyError> {
    let energy = t.node(node)?.energy;
    let mut best = f64::INFINITY;
    for e in t.outgoing(node)? {
        let l = t.link(e)?;
        if mode == LifetimeMode::ActiveOnly && l.state != LinkState::Active {
            continue;
        }
        best = best.min(expected_remaining_lifetime_link(energy, model.power_for_weight(l.weight))?);
    }
    Ok(best)
}

pub fn expected_remaining_lifetime_topology(t: &Topology, model: &PowerModel) -> Result<f64, EnergyError> {
    let mut best = f64::INFINITY;
    for n in t.node_ids() {
        best = best.min(expected_remaining_lifetime_node(t, model, n, LifetimeMode::ActiveOnly)?);
    }
    Ok(best)
}

/// Largest required power over the node's active outgoing links, 0 if none.
pub fn max_active_power(t: &Topology, model: &PowerModel, node: NodeId) -> Result<f64, EnergyError> {
    let mut p: f64 = 0.0;
    for e in t.outgoing(node)? {
        let l = t.link(e)?;
        if l.state == LinkState::Active {
            p = p.max(model.power_for_weight(l.weight));
        }
    }
    Ok(p)
}

/// One gossip round: every alive node pays its largest active transmission power.
/// Returns the nodes whose energy reached zero in this round.
pub fn gossip_step(t: &mut Topology, model: &PowerModel) -> Result<Vec<NodeId>, EnergyError> {
    let mut deaths = Vec::new();
    for n in t.node_ids() {
        let energy = t.node(n)?.energy;
        if energy <= 0.0 {
            continue;
        }
        let left = (energy - max_active_power(t, model, n)?).max(0.0);
        t.set_energy(n, left)?;
        if left == 0.0 {
            deaths.push(n);
        }
    }
    Ok(deaths)
}

/// Energy spent by the senders along `path` for one message of airtime `t_unit`.
pub fn messaging_cost(model: &PowerModel, t: &Topology, path: &[LinkId], t_unit: f64) -> Result<f64, EnergyError> {
    path.iter()
        .map(|&e| Ok(model.power_for_weight(t.link(e)?.weight) * t_unit))
        .sum()
}

/// Death times per node, from which d-lifetimes are read.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LifetimeRecord {
    pub node_count: usize,
    pub death_times: BTreeMap<NodeId, f64>,
}

impl LifetimeRecord {
    pub fn new(node_count: usize) -> Self {
        LifetimeRecord { node_count, death_times: BTreeMap::new() }
    }

    /// Records the first death of `node`; later calls are ignored.
    pub fn record_death(&mut self, node: NodeId, time: f64) {
        self.death_times.entry(node).or_insert(time);
    }

    /// First time at which at least `d` nodes are dead.
    pub fn lifetime(&self, d: usize) -> Option<f64> {
        if d == 0 {
            return Some(0.0);
        }
        let mut times: Vec<f64> = self.death_times.values().copied().collect();
        times.sort_by(f64::total_cmp);
        times.get(d - 1).copied()
    }

    /// L at `percent` of the node count, rounded up to whole nodes.
    pub fn lifetime_percent(&self, percent: f64) -> Option<f64> {
        let d = ((percent / 100.0) * self.node_count as f64).ceil() as usize;
        self.lifetime(d.max(1))
    }

    pub fn l1(&self) -> Option<f64> {
        self.lifetime(1)
    }

    pub fn l50(&self) -> Option<f64> {
        self.lifetime_percent(50.0)
    }

    pub fn l100(&self) -> Option<f64> {
        self.lifetime_percent(100.0)
    }
}
