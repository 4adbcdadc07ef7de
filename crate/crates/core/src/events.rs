//! Context events and the repair handlers that keep a topology weakly consistent.
//!
//! Repair only ever unclassifies. When a link stops being a valid witness, every
//! inactive link whose last witness triangle disappeared is unclassified as well,
//! recursively.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algorithms::AlgorithmSpec;
use crate::constraints::find_witness;
use crate::topology::{LinkId, LinkState, NodeAttribute, NodeId, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq)]
pub enum ContextEvent {
    NodeAdd { latitude: f64, longitude: f64, energy: f64 },
    NodeRemove { id: NodeId },
    LinkAdd { source: NodeId, target: NodeId, weight: f64 },
    LinkRemove { id: LinkId },
    NodeAttrMod { id: NodeId, attr: NodeAttribute, value: f64 },
    LinkAttrMod { id: LinkId, weight: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HandlerReport {
    /// Links that became unclassified, including a newly added link.
    pub unclassified_links: Vec<LinkId>,
    /// Longest chain of unclassifications; 0 when nothing was unclassified.
    pub cascades: usize,
    pub added_node: Option<NodeId>,
    pub added_link: Option<LinkId>,
    pub removed_links: Vec<LinkId>,
}

impl HandlerReport {
    fn merge(&mut self, other: HandlerReport) {
        self.unclassified_links.extend(other.unclassified_links);
        self.cascades = self.cascades.max(other.cascades);
        self.removed_links.extend(other.removed_links);
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EventError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("hop count must be an integer, got {0}")]
    NonIntegerHopCount(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Sets `e` unclassified and unclassifies every inactive link that loses its last witness.
pub fn unclassify_link(t: &mut Topology, e: LinkId, spec: &AlgorithmSpec) -> Result<HandlerReport, TopologyError> {
    t.link(e)?;
    let mut report = HandlerReport::default();
    let mut stack = vec![(e, 1usize)];
    while let Some((l, depth)) = stack.pop() {
        if !t.set_state(l, LinkState::Unclassified)? {
            continue;
        }
        report.unclassified_links.push(l);
        report.cascades = report.cascades.max(depth);
        for tri in t.triangles_supported_by(l)? {
            if t.state(tri.ab)? == LinkState::Inactive && find_witness(t, spec, tri.ab)?.is_none() {
                stack.push((tri.ab, depth + 1));
            }
        }
    }
    Ok(report)
}

/// Removes a link and unclassifies inactive links that relied on it.
pub fn remove_link_with_repair(t: &mut Topology, e: LinkId, spec: &AlgorithmSpec) -> Result<HandlerReport, TopologyError> {
    let dependents: Vec<LinkId> = t.triangles_supported_by(e)?.into_iter().map(|tri| tri.ab).collect();
    t.remove_link(e)?;
    let mut report = HandlerReport { removed_links: vec![e], ..HandlerReport::default() };
    for d in dependents {
        if t.contains_link(d) && t.state(d)? == LinkState::Inactive && find_witness(t, spec, d)?.is_none() {
            report.merge(unclassify_link(t, d, spec)?);
        }
    }
    Ok(report)
}

fn validate(t: &Topology, event: &ContextEvent) -> Result<(), EventError> {
    let mut probe = Topology::new();
    match *event {
        ContextEvent::NodeAdd { latitude, longitude, energy } => {
            probe.add_node(latitude, longitude, energy)?;
        }
        ContextEvent::NodeRemove { id } => {
            t.node(id)?;
        }
        ContextEvent::LinkAdd { source, target, weight } => {
            t.node(source)?;
            t.node(target)?;
            if source == target {
                return Err(TopologyError::SelfLoop(source).into());
            }
            if t.link_between(source, target).is_some() {
                return Err(TopologyError::DuplicateLink(source, target).into());
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(TopologyError::InvalidWeight(weight).into());
            }
        }
        ContextEvent::LinkRemove { id } => {
            t.link(id)?;
        }
        ContextEvent::NodeAttrMod { id, attr, value } => {
            t.node(id)?;
            let n = probe.add_node(0.0, 0.0, 0.0)?;
            match attr {
                NodeAttribute::Energy => probe.set_energy(n, value)?,
                NodeAttribute::Latitude => probe.set_position(n, value, 0.0)?,
                NodeAttribute::Longitude => probe.set_position(n, 0.0, value)?,
                NodeAttribute::HopCount => {
                    if value.fract() != 0.0 || !value.is_finite() || value.abs() > f64::from(i32::MAX) {
                        return Err(EventError::NonIntegerHopCount(value));
                    }
                    probe.set_hop_count(n, value as i32)?
                }
            }
        }
        ContextEvent::LinkAttrMod { id, weight } => {
            t.link(id)?;
            if !(weight.is_finite() && weight > 0.0) {
                return Err(TopologyError::InvalidWeight(weight).into());
            }
        }
    }
    Ok(())
}

/// Applies one event and repairs. On error the topology is unchanged.
pub fn apply_event(t: &mut Topology, event: &ContextEvent, spec: &AlgorithmSpec) -> Result<HandlerReport, EventError> {
    validate(t, event)?;
    let mut report = HandlerReport::default();
    match *event {
        ContextEvent::NodeAdd { latitude, longitude, energy } => {
            report.added_node = Some(t.add_node(latitude, longitude, energy)?);
        }
        ContextEvent::NodeRemove { id } => {
            for e in t.incident_links(id)? {
                report.merge(remove_link_with_repair(t, e, spec)?);
            }
            t.remove_node(id)?;
        }
        ContextEvent::LinkAdd { source, target, weight } => {
            let e = t.add_link(source, target, weight)?;
            report.added_link = Some(e);
            report.unclassified_links.push(e);
        }
        ContextEvent::LinkRemove { id } => {
            report.merge(remove_link_with_repair(t, id, spec)?);
        }
        ContextEvent::NodeAttrMod { id, attr, value } => {
            match attr {
                NodeAttribute::Energy => t.set_energy(id, value)?,
                NodeAttribute::Latitude => {
                    let lon = t.node(id)?.longitude;
                    t.set_position(id, value, lon)?
                }
                NodeAttribute::Longitude => {
                    let lat = t.node(id)?.latitude;
                    t.set_position(id, lat, value)?
                }
                NodeAttribute::HopCount => t.set_hop_count(id, value as i32)?,
            }
            if spec.node_attribute_relevant(attr) {
                for e in t.incident_links(id)? {
                    report.merge(unclassify_link(t, e, spec)?);
                }
            }
        }
        ContextEvent::LinkAttrMod { id, weight } => {
            t.set_weight(id, weight)?;
            if spec.weight_relevant() {
                report.merge(unclassify_link(t, id, spec)?);
            }
        }
    }
    report.unclassified_links.retain(|&e| t.contains_link(e));
    Ok(report)
}

impl fmt::Display for ContextEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextEvent::NodeAdd { latitude, longitude, energy } => {
                write!(f, "EV node_add {latitude} {longitude} {energy}")
            }
            ContextEvent::NodeRemove { id } => write!(f, "EV node_remove {id}"),
            ContextEvent::LinkAdd { source, target, weight } => write!(f, "EV link_add {source} {target} {weight}"),
            ContextEvent::LinkRemove { id } => write!(f, "EV link_remove {id}"),
            ContextEvent::NodeAttrMod { id, attr, value } => write!(f, "EV node_mod {id} {} {value}", attr.name()),
            ContextEvent::LinkAttrMod { id, weight } => write!(f, "EV link_mod {id} {weight}"),
        }
    }
}

fn parse_event(line: &str, ln: usize) -> Result<ContextEvent, EventError> {
    let err = |msg: String| EventError::Parse { line: ln, msg };
    let tok: Vec<&str> = line.split_whitespace().collect();
    if tok.first() != Some(&"EV") || tok.len() < 2 {
        return Err(err(format!("expected `EV <type> <args>`, got `{line}`")));
    }
    let args = &tok[2..];
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(format!("`{}` takes {n} arguments, got {}", tok[1], args.len())))
        }
    };
    let num = |i: usize| args[i].parse::<f64>().map_err(|_| err(format!("bad number `{}`", args[i])));
    let int = |i: usize| args[i].parse::<u32>().map_err(|_| err(format!("bad id `{}`", args[i])));
    Ok(match tok[1] {
        "node_add" => {
            want(3)?;
            ContextEvent::NodeAdd { latitude: num(0)?, longitude: num(1)?, energy: num(2)? }
        }
        "node_remove" => {
            want(1)?;
            ContextEvent::NodeRemove { id: NodeId(int(0)?) }
        }
        "link_add" => {
            want(3)?;
            ContextEvent::LinkAdd { source: NodeId(int(0)?), target: NodeId(int(1)?), weight: num(2)? }
        }
        "link_remove" => {
            want(1)?;
            ContextEvent::LinkRemove { id: LinkId(int(0)?) }
        }
        "node_mod" => {
            want(3)?;
            let attr = NodeAttribute::from_name(args[1]).ok_or_else(|| err(format!("unknown attribute `{}`", args[1])))?;
            ContextEvent::NodeAttrMod { id: NodeId(int(0)?), attr, value: num(2)? }
        }
        "link_mod" => {
            want(2)?;
            ContextEvent::LinkAttrMod { id: LinkId(int(0)?), weight: num(1)? }
        }
        other => return Err(err(format!("unknown event type `{other}`"))),
    })
}

impl FromStr for ContextEvent {
    type Err = EventError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_event(s.trim(), 1)
    }
}

/// Parses a trace; blank lines and `#` comments are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<ContextEvent>, EventError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| parse_event(l, i))
        .collect()
}

pub fn write_trace(events: &[ContextEvent]) -> String {
    events.iter().map(|e| format!("{e}\n")).collect()
}
