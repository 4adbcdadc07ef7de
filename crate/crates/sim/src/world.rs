//! Node placement, Gauss-Markov mobility, and translation of node movement into context events.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use ktopo::events::ContextEvent;
use ktopo::{NodeAttribute, NodeId, Topology};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{MobilityConfig, ScenarioConfig};

/// (latitude, longitude) in meters.
pub type Position = (f64, f64);

/// Uniform placement in `[0, world_side]²` with links in both directions between
/// nodes at most `transmission_radius` apart, weighted by distance.
pub fn place_uniform<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Topology {
    let mut t = Topology::new();
    let b = &cfg.battery;
    let ids: Vec<NodeId> = (0..cfg.node_count)
        .map(|_| {
            let lat = rng.random_range(0.0..=cfg.world_side);
            let lon = rng.random_range(0.0..=cfg.world_side);
            let energy = b.capacity * rng.random_range(b.min_fraction..=b.max_fraction);
            t.add_node(lat, lon, energy).expect("finite attributes")
        })
        .collect();
    for &a in &ids {
        for &c in &ids {
            if a == c {
                continue;
            }
            let d = distance(position(&t, a), position(&t, c));
            if in_range(d, cfg.transmission_radius) {
                t.add_link(a, c, d).expect("fresh pair");
            }
        }
    }
    t
}

pub fn position(t: &Topology, n: NodeId) -> Position {
    let node = t.node(n).expect("known node");
    (node.latitude, node.longitude)
}

pub fn distance(a: Position, b: Position) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn in_range(d: f64, radius: f64) -> bool {
    d > 0.0 && d <= radius
}

/// Mean out-degree, i.e. links per node.
pub fn mean_out_degree(t: &Topology) -> f64 {
    if t.node_count() == 0 {
        0.0
    } else {
        t.link_count() as f64 / t.node_count() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Mover {
    pos: Position,
    speed: f64,
    /// Heading in radians, measured from the longitude axis.
    heading: f64,
    mean_heading: f64,
}

/// First-order autoregressive speed and heading per node, reflecting at the world border.
#[derive(Debug, Clone)]
pub struct GaussMarkov {
    cfg: MobilityConfig,
    side: f64,
    movers: BTreeMap<NodeId, Mover>,
}

impl GaussMarkov {
    pub fn new<R: Rng>(t: &Topology, cfg: &MobilityConfig, side: f64, rng: &mut R) -> Self {
        let movers = t
            .node_ids()
            .into_iter()
            .map(|n| {
                let heading = rng.random_range(0.0..TAU);
                (n, Mover { pos: position(t, n), speed: cfg.mean_speed, heading, mean_heading: heading })
            })
            .collect();
        GaussMarkov { cfg: cfg.clone(), side, movers }
    }

    /// Advances every node by `dt` seconds.
    pub fn step<R: Rng>(&mut self, dt: f64, rng: &mut R) {
        let a = self.cfg.alpha;
        let noise = (1.0 - a * a).sqrt();
        let (s_sigma, h_sigma) = (self.cfg.speed_sigma(), self.cfg.direction_sigma);
        for m in self.movers.values_mut() {
            let xs: f64 = StandardNormal.sample(rng);
            let xh: f64 = StandardNormal.sample(rng);
            m.speed = a * m.speed + (1.0 - a) * self.cfg.mean_speed + noise * s_sigma * xs;
            m.heading = a * m.heading + (1.0 - a) * m.mean_heading + noise * h_sigma * xh;
            let step = m.speed * dt;
            let (mut lat, mut lon) = (m.pos.0 + step * m.heading.sin(), m.pos.1 + step * m.heading.cos());
            if let Some(v) = reflect(lon, self.side) {
                lon = v;
                m.heading = PI - m.heading;
                m.mean_heading = PI - m.mean_heading;
            }
            if let Some(v) = reflect(lat, self.side) {
                lat = v;
                m.heading = -m.heading;
                m.mean_heading = -m.mean_heading;
            }
            m.pos = (lat, lon);
        }
    }

    pub fn speed(&self, n: NodeId) -> Option<f64> {
        self.movers.get(&n).map(|m| m.speed)
    }

    pub fn positions(&self) -> BTreeMap<NodeId, Position> {
        self.movers.iter().map(|(&n, m)| (n, m.pos)).collect()
    }

    pub fn remove(&mut self, n: NodeId) {
        self.movers.remove(&n);
    }
}

/// Mirrors `x` back into `[0, side]`, or `None` if it is already inside.
fn reflect(x: f64, side: f64) -> Option<f64> {
    if (0.0..=side).contains(&x) {
        return None;
    }
    let period = 2.0 * side;
    let r = x.rem_euclid(period);
    Some(if r > side { period - r } else { r })
}

/// Position events for nodes whose stored coordinates differ from `positions`.
pub fn position_events(t: &Topology, positions: &BTreeMap<NodeId, Position>) -> Vec<ContextEvent> {
    let mut out = Vec::new();
    for (&id, &(lat, lon)) in positions {
        let Ok(node) = t.node(id) else { continue };
        if node.latitude != lat {
            out.push(ContextEvent::NodeAttrMod { id, attr: NodeAttribute::Latitude, value: lat });
        }
        if node.longitude != lon {
            out.push(ContextEvent::NodeAttrMod { id, attr: NodeAttribute::Longitude, value: lon });
        }
    }
    out
}

/// Link events that bring the stored links in line with the true positions:
/// removals for pairs that left the radius, additions for pairs that entered it,
/// and weight updates for links whose length drifted by more than `epsilon`.
pub fn proximity_events(t: &Topology, positions: &BTreeMap<NodeId, Position>, radius: f64, epsilon: f64) -> Vec<ContextEvent> {
    let mut removals = Vec::new();
    let mut updates = Vec::new();
    let mut additions = Vec::new();
    for (&a, &pa) in positions.iter().filter(|(n, _)| t.contains_node(**n)) {
        for (&b, &pb) in positions.iter().filter(|(n, _)| t.contains_node(**n)) {
            if a == b {
                continue;
            }
            let d = distance(pa, pb);
            match (t.link_between(a, b), in_range(d, radius)) {
                (Some(id), false) => removals.push(ContextEvent::LinkRemove { id }),
                (Some(id), true) => {
                    if (t.link(id).expect("indexed").weight - d).abs() > epsilon {
                        updates.push(ContextEvent::LinkAttrMod { id, weight: d });
                    }
                }
                (None, true) => additions.push(ContextEvent::LinkAdd { source: a, target: b, weight: d }),
                (None, false) => {}
            }
        }
    }
    removals.extend(updates);
    removals.extend(additions);
    removals
}
