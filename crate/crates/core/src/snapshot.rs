//! Line-oriented topology snapshots.
//!
//! ```text
//! nodes 2 links 1
//! N 0 0 0 130 -1
//! N 1 0 30 130 -1
//! L 0 0 1 30 U
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::topology::{Link, LinkId, LinkState, Node, NodeId, Topology, TopologyError};

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Topology { line: usize, source: TopologyError },
    #[error("header declares {declared} {what}, found {found}")]
    CountMismatch { what: &'static str, declared: usize, found: usize },
}

pub fn write_snapshot(t: &Topology) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "nodes {} links {}", t.node_count(), t.link_count());
    for n in t.nodes() {
        let _ = writeln!(s, "N {} {} {} {} {}", n.id, n.latitude, n.longitude, n.energy, n.hop_count);
    }
    for l in t.links() {
        let _ = writeln!(s, "L {} {} {} {} {}", l.id, l.source, l.target, l.weight, l.state.symbol());
    }
    s
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, name: &str) -> Result<T, SnapshotError> {
    let tok = tok.ok_or_else(|| SnapshotError::Syntax { line, msg: format!("missing {name}") })?;
    tok.parse()
        .map_err(|_| SnapshotError::Syntax { line, msg: format!("bad {name} `{tok}`") })
}

pub fn parse_snapshot(text: &str) -> Result<Topology, SnapshotError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or(SnapshotError::Syntax { line: 1, msg: "empty snapshot".into() })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "nodes" || h[2] != "links" {
        return Err(SnapshotError::Syntax { line: hl, msg: "expected `nodes <n> links <m>`".into() });
    }
    let n: usize = field(Some(h[1]), hl, "node count")?;
    let m: usize = field(Some(h[3]), hl, "link count")?;

    let mut t = Topology::new();
    for (ln, l) in lines {
        let mut tok = l.split_whitespace();
        match tok.next() {
            Some("N") => {
                let node = Node {
                    id: NodeId(field(tok.next(), ln, "node id")?),
                    latitude: field(tok.next(), ln, "latitude")?,
                    longitude: field(tok.next(), ln, "longitude")?,
                    energy: field(tok.next(), ln, "energy")?,
                    hop_count: field(tok.next(), ln, "hop count")?,
                };
                t.insert_node(node).map_err(|source| SnapshotError::Topology { line: ln, source })?;
            }
            Some("L") => {
                let id = LinkId(field(tok.next(), ln, "link id")?);
                let source = NodeId(field(tok.next(), ln, "source")?);
                let target = NodeId(field(tok.next(), ln, "target")?);
                let weight: f64 = field(tok.next(), ln, "weight")?;
                let st = tok.next().unwrap_or("");
                let state = LinkState::from_symbol(st)
                    .ok_or_else(|| SnapshotError::Syntax { line: ln, msg: format!("bad state `{st}`") })?;
                t.insert_link(Link { id, source, target, weight, state })
                    .map_err(|source| SnapshotError::Topology { line: ln, source })?;
            }
            _ => return Err(SnapshotError::Syntax { line: ln, msg: format!("unexpected line `{l}`") }),
        }
        if tok.next().is_some() {
            return Err(SnapshotError::Syntax { line: ln, msg: "trailing tokens".into() });
        }
    }
    if t.node_count() != n {
        return Err(SnapshotError::CountMismatch { what: "nodes", declared: n, found: t.node_count() });
    }
    if t.link_count() != m {
        return Err(SnapshotError::CountMismatch { what: "links", declared: m, found: t.link_count() });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut t = Topology::new();
        let a = t.add_node(0.1, 0.2, 130.0).unwrap();
        let b = t.add_node(1.0 / 3.0, 7.5, 39.0).unwrap();
        t.set_hop_count(b, 2).unwrap();
        let e = t.add_link(a, b, 29.999999).unwrap();
        t.add_link(b, a, 29.999999).unwrap();
        t.set_state(e, LinkState::Inactive).unwrap();
        let text = write_snapshot(&t);
        let back = parse_snapshot(&text).unwrap();
        assert!(back.same_structure(&t));
        assert_eq!(back.link_ids(), t.link_ids());
    }

    #[test]
    fn empty_topology() {
        let t = parse_snapshot("nodes 0 links 0\n").unwrap();
        assert_eq!(t.node_count(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_snapshot("").is_err());
        assert!(parse_snapshot("nodes 1 links 0\n").is_err());
        assert!(parse_snapshot("nodes 1 links 0\nN 0 0 0 -1 -1\n").is_err());
        assert!(parse_snapshot("nodes 2 links 1\nN 0 0 0 1 -1\nN 1 0 1 1 -1\nL 0 0 1 3 X\n").is_err());
        assert!(parse_snapshot("nodes 1 links 1\nN 0 0 0 1 -1\nL 0 0 0 3 A\n").is_err());
    }
}
