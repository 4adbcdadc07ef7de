//! Attributed directed simple graph with per-link classification state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkState {
    Active,
    Inactive,
    Unclassified,
}

impl LinkState {
    pub fn is_classified(self) -> bool {
        self != LinkState::Unclassified
    }

    pub fn symbol(self) -> char {
        match self {
            LinkState::Active => 'A',
            LinkState::Inactive => 'I',
            LinkState::Unclassified => 'U',
        }
    }

    pub fn from_symbol(c: &str) -> Option<Self> {
        match c {
            "A" => Some(LinkState::Active),
            "I" => Some(LinkState::Inactive),
            "U" => Some(LinkState::Unclassified),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeAttribute {
    Energy,
    Latitude,
    Longitude,
    HopCount,
}

impl NodeAttribute {
    pub fn name(self) -> &'static str {
        match self {
            NodeAttribute::Energy => "energy",
            NodeAttribute::Latitude => "latitude",
            NodeAttribute::Longitude => "longitude",
            NodeAttribute::HopCount => "hop_count",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "energy" => Some(NodeAttribute::Energy),
            "latitude" => Some(NodeAttribute::Latitude),
            "longitude" => Some(NodeAttribute::Longitude),
            "hop_count" => Some(NodeAttribute::HopCount),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub energy: f64,
    pub latitude: f64,
    pub longitude: f64,
    pub hop_count: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
    pub state: LinkState,
}

/// Directed triangle: `ab` runs a→b, `ac` runs a→c, `cb` runs c→b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub ab: LinkId,
    pub ac: LinkId,
    pub cb: LinkId,
}

impl Triangle {
    pub fn links(&self) -> [LinkId; 3] {
        [self.ab, self.ac, self.cb]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("link {0} already exists")]
    DuplicateLinkId(LinkId),
    #[error("a link {0}->{1} already exists")]
    DuplicateLink(NodeId, NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("link weight must be finite and positive, got {0}")]
    InvalidWeight(f64),
    #[error("node energy must be finite and non-negative, got {0}")]
    InvalidEnergy(f64),
    #[error("hop count must be at least -1, got {0}")]
    InvalidHopCount(i32),
    #[error("coordinates must be finite")]
    InvalidPosition,
    #[error("link {0} has coincident endpoints")]
    CoincidentEndpoints(LinkId),
}

/// Dense id-indexed storage; ids are small monotone counters.
#[derive(Debug, Clone)]
struct Slab<T> {
    items: Vec<Option<T>>,
    len: usize,
}

impl<T> Default for Slab<T> {
    fn default() -> Self {
        Slab { items: Vec::new(), len: 0 }
    }
}

impl<T> Slab<T> {
    fn get(&self, i: u32) -> Option<&T> {
        self.items.get(i as usize).and_then(Option::as_ref)
    }

    fn get_mut(&mut self, i: u32) -> Option<&mut T> {
        self.items.get_mut(i as usize).and_then(Option::as_mut)
    }

    fn contains(&self, i: u32) -> bool {
        self.get(i).is_some()
    }

    fn insert(&mut self, i: u32, v: T) {
        let i = i as usize;
        if self.items.len() <= i {
            self.items.resize_with(i + 1, || None);
        }
        if self.items[i].replace(v).is_none() {
            self.len += 1;
        }
    }

    fn remove(&mut self, i: u32) -> Option<T> {
        let v = self.items.get_mut(i as usize)?.take();
        if v.is_some() {
            self.len -= 1;
        }
        v
    }

    fn values(&self) -> impl Iterator<Item = &T> + '_ {
        self.items.iter().flatten()
    }
}

impl<T: PartialEq> PartialEq for Slab<T> {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.values().zip(other.values()).all(|(a, b)| a == b)
    }
}

/// Neighbour lists sorted by the neighbour's node id.
#[derive(Debug, Clone, Default, PartialEq)]
struct Adjacency {
    outgoing: Vec<(NodeId, LinkId)>,
    incoming: Vec<(NodeId, LinkId)>,
}

fn sorted_insert(v: &mut Vec<(NodeId, LinkId)>, entry: (NodeId, LinkId)) {
    let at = v.partition_point(|x| x.0 < entry.0);
    v.insert(at, entry);
}

fn sorted_remove(v: &mut Vec<(NodeId, LinkId)>, n: NodeId) {
    if let Ok(at) = v.binary_search_by_key(&n, |x| x.0) {
        v.remove(at);
    }
}

/// Calls `f(x, y)` for every pair of entries with the same neighbour id.
fn intersect(a: &[(NodeId, LinkId)], b: &[(NodeId, LinkId)], mut f: impl FnMut(NodeId, LinkId, LinkId)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                f(a[i].0, a[i].1, b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Topology {
    nodes: Slab<Node>,
    adjacency: Slab<Adjacency>,
    links: Slab<Link>,
    next_node: u32,
    next_link: u32,
    lsm_count: u64,
}

fn check_weight(w: f64) -> Result<(), TopologyError> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(TopologyError::InvalidWeight(w))
    }
}

fn check_energy(e: f64) -> Result<(), TopologyError> {
    if e.is_finite() && e >= 0.0 {
        Ok(())
    } else {
        Err(TopologyError::InvalidEnergy(e))
    }
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, latitude: f64, longitude: f64, energy: f64) -> Result<NodeId, TopologyError> {
        let id = NodeId(self.next_node);
        self.insert_node(Node { id, energy, latitude, longitude, hop_count: -1 })?;
        Ok(id)
    }

    /// Inserts a node with a caller-chosen id. Used when loading snapshots.
    pub fn insert_node(&mut self, node: Node) -> Result<(), TopologyError> {
        check_energy(node.energy)?;
        if !node.latitude.is_finite() || !node.longitude.is_finite() {
            return Err(TopologyError::InvalidPosition);
        }
        if node.hop_count < -1 {
            return Err(TopologyError::InvalidHopCount(node.hop_count));
        }
        if self.nodes.contains(node.id.0) {
            return Err(TopologyError::DuplicateNode(node.id));
        }
        self.next_node = self.next_node.max(node.id.0 + 1);
        self.adjacency.insert(node.id.0, Adjacency::default());
        self.nodes.insert(node.id.0, node);
        Ok(())
    }

    /// Removes a node and every incident link, returning the removed link ids.
    pub fn remove_node(&mut self, id: NodeId) -> Result<Vec<LinkId>, TopologyError> {
        let incident = self.incident_links(id)?;
        for &l in &incident {
            self.remove_link(l)?;
        }
        self.nodes.remove(id.0);
        self.adjacency.remove(id.0);
        Ok(incident)
    }

    pub fn add_link(&mut self, source: NodeId, target: NodeId, weight: f64) -> Result<LinkId, TopologyError> {
        let id = LinkId(self.next_link);
        self.insert_link(Link { id, source, target, weight, state: LinkState::Unclassified })?;
        Ok(id)
    }

    /// Inserts a link with a caller-chosen id and state. Used when loading snapshots.
    pub fn insert_link(&mut self, link: Link) -> Result<(), TopologyError> {
        check_weight(link.weight)?;
        if link.source == link.target {
            return Err(TopologyError::SelfLoop(link.source));
        }
        for n in [link.source, link.target] {
            if !self.nodes.contains(n.0) {
                return Err(TopologyError::UnknownNode(n));
            }
        }
        if self.links.contains(link.id.0) {
            return Err(TopologyError::DuplicateLinkId(link.id));
        }
        if self.link_between(link.source, link.target).is_some() {
            return Err(TopologyError::DuplicateLink(link.source, link.target));
        }
        self.next_link = self.next_link.max(link.id.0 + 1);
        let out = &mut self.adjacency.get_mut(link.source.0).expect("source checked").outgoing;
        sorted_insert(out, (link.target, link.id));
        let inc = &mut self.adjacency.get_mut(link.target.0).expect("target checked").incoming;
        sorted_insert(inc, (link.source, link.id));
        self.links.insert(link.id.0, link);
        Ok(())
    }

    pub fn remove_link(&mut self, id: LinkId) -> Result<Link, TopologyError> {
        let link = self.links.remove(id.0).ok_or(TopologyError::UnknownLink(id))?;
        if let Some(adj) = self.adjacency.get_mut(link.source.0) {
            sorted_remove(&mut adj.outgoing, link.target);
        }
        if let Some(adj) = self.adjacency.get_mut(link.target.0) {
            sorted_remove(&mut adj.incoming, link.source);
        }
        Ok(link)
    }

    pub fn node(&self, id: NodeId) -> Result<&Node, TopologyError> {
        self.nodes.get(id.0).ok_or(TopologyError::UnknownNode(id))
    }

    pub fn link(&self, id: LinkId) -> Result<&Link, TopologyError> {
        self.links.get(id.0).ok_or(TopologyError::UnknownLink(id))
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.contains(id.0)
    }

    pub fn contains_link(&self, id: LinkId) -> bool {
        self.links.contains(id.0)
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.values()
    }

    /// Links in ascending id order.
    pub fn links(&self) -> impl Iterator<Item = &Link> + '_ {
        self.links.values()
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.values().map(|n| n.id).collect()
    }

    pub fn link_ids(&self) -> Vec<LinkId> {
        self.links.values().map(|l| l.id).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len
    }

    pub fn link_count(&self) -> usize {
        self.links.len
    }

    pub fn link_between(&self, source: NodeId, target: NodeId) -> Option<LinkId> {
        let out = &self.adjacency.get(source.0)?.outgoing;
        out.binary_search_by_key(&target, |x| x.0).ok().map(|i| out[i].1)
    }

    fn adj(&self, n: NodeId) -> Result<&Adjacency, TopologyError> {
        self.adjacency.get(n.0).ok_or(TopologyError::UnknownNode(n))
    }

    /// Outgoing links of `n`, ordered by target id.
    pub fn outgoing(&self, n: NodeId) -> Result<impl Iterator<Item = LinkId> + '_, TopologyError> {
        Ok(self.adj(n)?.outgoing.iter().map(|x| x.1))
    }

    /// Incoming links of `n`, ordered by source id.
    pub fn incoming(&self, n: NodeId) -> Result<impl Iterator<Item = LinkId> + '_, TopologyError> {
        Ok(self.adj(n)?.incoming.iter().map(|x| x.1))
    }

    /// Outgoing then incoming links of `n`.
    pub fn incident_links(&self, n: NodeId) -> Result<Vec<LinkId>, TopologyError> {
        let adj = self.adj(n)?;
        Ok(adj.outgoing.iter().chain(adj.incoming.iter()).map(|x| x.1).collect())
    }

    /// Triangles in which `e` plays the `ab` role.
    pub fn triangles_containing(&self, e: LinkId) -> Result<Vec<Triangle>, TopologyError> {
        let mut out = Vec::new();
        self.for_each_triangle_containing(e, |tri| out.push(tri))?;
        Ok(out)
    }

    /// Visits the triangles of [`Topology::triangles_containing`] without allocating.
    pub fn for_each_triangle_containing(&self, e: LinkId, mut f: impl FnMut(Triangle)) -> Result<(), TopologyError> {
        let link = self.link(e)?;
        let (a, b) = (self.adj(link.source)?, self.adj(link.target)?);
        intersect(&a.outgoing, &b.incoming, |_, ac, cb| f(Triangle { ab: e, ac, cb }));
        Ok(())
    }

    /// Triangles in which `e` plays the `ac` role.
    pub fn triangles_as_ac(&self, e: LinkId) -> Result<Vec<Triangle>, TopologyError> {
        let link = self.link(e)?;
        let (a, c) = (self.adj(link.source)?, self.adj(link.target)?);
        let mut out = Vec::new();
        intersect(&a.outgoing, &c.outgoing, |_, ab, cb| out.push(Triangle { ab, ac: e, cb }));
        Ok(out)
    }

    /// Triangles in which `e` plays the `cb` role.
    pub fn triangles_as_cb(&self, e: LinkId) -> Result<Vec<Triangle>, TopologyError> {
        let link = self.link(e)?;
        let (c, b) = (self.adj(link.source)?, self.adj(link.target)?);
        let mut out = Vec::new();
        intersect(&c.incoming, &b.incoming, |_, ac, ab| out.push(Triangle { ab, ac, cb: e }));
        Ok(out)
    }

    /// Triangles in which `e` is one of the two non-`ab` links.
    pub fn triangles_supported_by(&self, e: LinkId) -> Result<Vec<Triangle>, TopologyError> {
        let mut out = self.triangles_as_ac(e)?;
        out.extend(self.triangles_as_cb(e)?);
        Ok(out)
    }

    /// Sets a link state. Returns whether the state changed; only changes count as LSMs.
    pub fn set_state(&mut self, e: LinkId, state: LinkState) -> Result<bool, TopologyError> {
        let link = self.links.get_mut(e.0).ok_or(TopologyError::UnknownLink(e))?;
        if link.state == state {
            return Ok(false);
        }
        link.state = state;
        self.lsm_count += 1;
        Ok(true)
    }

    pub fn state(&self, e: LinkId) -> Result<LinkState, TopologyError> {
        Ok(self.link(e)?.state)
    }

    pub fn lsm_count(&self) -> u64 {
        self.lsm_count
    }

    pub fn set_weight(&mut self, e: LinkId, weight: f64) -> Result<(), TopologyError> {
        check_weight(weight)?;
        self.links.get_mut(e.0).ok_or(TopologyError::UnknownLink(e))?.weight = weight;
        Ok(())
    }

    pub fn set_energy(&mut self, n: NodeId, energy: f64) -> Result<(), TopologyError> {
        check_energy(energy)?;
        self.nodes.get_mut(n.0).ok_or(TopologyError::UnknownNode(n))?.energy = energy;
        Ok(())
    }

    pub fn set_position(&mut self, n: NodeId, latitude: f64, longitude: f64) -> Result<(), TopologyError> {
        if !latitude.is_finite() || !longitude.is_finite() {
            return Err(TopologyError::InvalidPosition);
        }
        let node = self.nodes.get_mut(n.0).ok_or(TopologyError::UnknownNode(n))?;
        node.latitude = latitude;
        node.longitude = longitude;
        Ok(())
    }

    pub fn set_hop_count(&mut self, n: NodeId, hop_count: i32) -> Result<(), TopologyError> {
        if hop_count < -1 {
            return Err(TopologyError::InvalidHopCount(hop_count));
        }
        self.nodes.get_mut(n.0).ok_or(TopologyError::UnknownNode(n))?.hop_count = hop_count;
        Ok(())
    }

    /// Angle of `e` in degrees, `atan2(Δlat, Δlon) + 180` reduced to `[0, 360)`,
    /// with Δ taken as source minus target.
    pub fn link_angle(&self, e: LinkId) -> Result<f64, TopologyError> {
        let link = self.link(e)?;
        let a = self.node(link.source)?;
        let b = self.node(link.target)?;
        let dlat = a.latitude - b.latitude;
        let dlon = a.longitude - b.longitude;
        if dlat == 0.0 && dlon == 0.0 {
            return Err(TopologyError::CoincidentEndpoints(e));
        }
        let mut deg = dlat.atan2(dlon).to_degrees() + 180.0;
        if deg >= 360.0 {
            deg -= 360.0;
        }
        Ok(deg)
    }

    pub fn all_states(&self) -> BTreeMap<LinkId, LinkState> {
        self.links.values().map(|l| (l.id, l.state)).collect()
    }

    pub fn count_state(&self, state: LinkState) -> usize {
        self.links.values().filter(|l| l.state == state).count()
    }

    /// Compares node attributes by id and links by endpoint pair, ignoring link ids and counters.
    pub fn same_structure(&self, other: &Topology) -> bool {
        if self.nodes != other.nodes || self.link_count() != other.link_count() {
            return false;
        }
        self.links.values().all(|l| {
            other
                .link_between(l.source, l.target)
                .and_then(|o| other.links.get(o.0))
                .map(|o| o.weight == l.weight && o.state == l.state)
                .unwrap_or(false)
        })
    }

    /// Rebuilds the adjacency index from the link set and compares.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut rebuilt: BTreeMap<NodeId, Adjacency> = self.nodes.values().map(|n| (n.id, Adjacency::default())).collect();
        let mut seen = BTreeSet::new();
        for l in self.links.values() {
            if l.source == l.target {
                return Err(format!("link {} is a loop", l.id));
            }
            if !self.nodes.contains(l.source.0) || !self.nodes.contains(l.target.0) {
                return Err(format!("link {} has a dangling endpoint", l.id));
            }
            if !seen.insert((l.source, l.target)) {
                return Err(format!("parallel link {}", l.id));
            }
            sorted_insert(&mut rebuilt.get_mut(&l.source).expect("checked").outgoing, (l.target, l.id));
            sorted_insert(&mut rebuilt.get_mut(&l.target).expect("checked").incoming, (l.source, l.id));
        }
        if self.adjacency.len != self.nodes.len {
            return Err("adjacency covers a different node set".into());
        }
        for (n, adj) in rebuilt {
            if self.adjacency.get(n.0) != Some(&adj) {
                return Err(format!("adjacency of node {n} out of sync"));
            }
        }
        Ok(())
    }
}
