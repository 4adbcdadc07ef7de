//! Triangle predicates, link orders, and the algorithm selection grammar.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::energy::PowerModel;
use crate::topology::{LinkId, LinkState, NodeAttribute, Topology, TopologyError, Triangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("cannot parse algorithm `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("expected remaining lifetime must be non-negative, got {0}")]
    InvalidLifetime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkView {
    pub id: LinkId,
    pub weight: f64,
    pub state: LinkState,
    /// Only filled for algorithms that read angles.
    pub angle: Option<f64>,
    /// Expected remaining lifetime r(e) of the link.
    pub lifetime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeView {
    pub energy: f64,
    pub hop_count: i32,
}

/// Attribute snapshot of a directed triangle a→b, a→c, c→b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleView {
    pub ab: LinkView,
    pub ac: LinkView,
    pub cb: LinkView,
    pub a: NodeView,
    pub b: NodeView,
    pub c: NodeView,
}

impl TriangleView {
    /// Standalone view with ids ab=2, ac=0, cb=1, unit lifetimes and undefined hops.
    pub fn from_weights(w_ab: f64, w_ac: f64, w_cb: f64) -> Self {
        let link = |id, weight| LinkView {
            id: LinkId(id),
            weight,
            state: LinkState::Unclassified,
            angle: None,
            lifetime: 1.0,
        };
        let node = NodeView { energy: 0.0, hop_count: -1 };
        TriangleView {
            ab: link(2, w_ab),
            ac: link(0, w_ac),
            cb: link(1, w_cb),
            a: node,
            b: node,
            c: node,
        }
    }

    pub fn with_lifetimes(mut self, r_ab: f64, r_ac: f64, r_cb: f64) -> Self {
        self.ab.lifetime = r_ab;
        self.ac.lifetime = r_ac;
        self.cb.lifetime = r_cb;
        self
    }

    pub fn with_hops(mut self, h_a: i32, h_b: i32, h_c: i32) -> Self {
        self.a.hop_count = h_a;
        self.b.hop_count = h_b;
        self.c.hop_count = h_c;
        self
    }

    pub fn with_ids(mut self, ab: u32, ac: u32, cb: u32) -> Self {
        self.ab.id = LinkId(ab);
        self.ac.id = LinkId(ac);
        self.cb.id = LinkId(cb);
        self
    }

    pub fn with_angles(mut self, ab: f64, ac: f64, cb: f64) -> Self {
        self.ab.angle = Some(ab);
        self.ac.angle = Some(ac);
        self.cb.angle = Some(cb);
        self
    }
}

fn ktc_core(ab: (f64, LinkId), ac: (f64, LinkId), cb: (f64, LinkId), k: f64) -> bool {
    let (w_ab, w_ac, w_cb) = (ab.0, ac.0, cb.0);
    w_ab >= w_ac.max(w_cb)
        && w_ab >= k * w_ac.min(w_cb)
        && (w_ab != w_ac || ab.1 > ac.1)
        && (w_ab != w_cb || ab.1 > cb.1)
}

fn by_weight(l: &LinkView) -> (f64, LinkId) {
    (l.weight, l.id)
}

/// Transformed weight 1/r used by the energy-aware variant; r = 0 maps to +inf.
pub fn inverse_lifetime(r: f64) -> f64 {
    1.0 / r
}

fn by_inverse_lifetime(l: &LinkView) -> (f64, LinkId) {
    (inverse_lifetime(l.lifetime), l.id)
}

pub fn pi_maxpower(_v: &TriangleView) -> bool {
    false
}

pub fn pi_ktc(v: &TriangleView, k: f64) -> bool {
    ktc_core(by_weight(&v.ab), by_weight(&v.ac), by_weight(&v.cb), k)
}

pub fn pi_xtc(v: &TriangleView) -> bool {
    ktc_core(by_weight(&v.ab), by_weight(&v.ac), by_weight(&v.cb), 0.0)
}

pub fn pi_gg(v: &TriangleView) -> bool {
    v.ab.weight.powi(2) > v.ac.weight.powi(2) + v.cb.weight.powi(2)
}

pub fn pi_rng(v: &TriangleView) -> bool {
    v.ab.weight > v.ac.weight && v.ab.weight > v.cb.weight
}

pub fn pi_lktc(v: &TriangleView, k: f64, a: f64) -> bool {
    if !pi_ktc(v, k) {
        return false;
    }
    let (ha, hb, hc) = (v.a.hop_count, v.b.hop_count, v.c.hop_count);
    if ha.min(hb).min(hc) < 0 {
        return false;
    }
    let stretch = |far: i32| f64::from(hc + 1) / f64::from(far.max(1)) < a;
    match ha.cmp(&hb) {
        Ordering::Equal => true,
        Ordering::Greater => stretch(ha),
        Ordering::Less => stretch(hb),
    }
}

pub fn pi_yao(v: &TriangleView, cones: u32) -> bool {
    let (Some(alpha_ab), Some(alpha_ac)) = (v.ab.angle, v.ac.angle) else {
        return false;
    };
    let cone = 360.0 / f64::from(cones);
    v.ab.weight > v.ac.weight && (alpha_ab / cone).floor() == (alpha_ac / cone).floor()
}

/// kTC evaluated on w' = 1/r.
pub fn pi_ektc(v: &TriangleView, k: f64) -> Result<bool, AlgorithmError> {
    for r in [v.ab.lifetime, v.ac.lifetime, v.cb.lifetime] {
        if r.is_nan() || r < 0.0 {
            return Err(AlgorithmError::InvalidLifetime(r));
        }
    }
    Ok(ektc_unchecked(v, k))
}

fn ektc_unchecked(v: &TriangleView, k: f64) -> bool {
    ktc_core(by_inverse_lifetime(&v.ab), by_inverse_lifetime(&v.ac), by_inverse_lifetime(&v.cb), k)
}

pub fn pi_min_weight(v: &TriangleView, w_min: f64) -> bool {
    v.ab.weight.min(v.ac.weight).min(v.cb.weight) >= w_min
}

pub trait TrianglePredicate {
    fn holds(&self, v: &TriangleView) -> bool;
}

impl<P: TrianglePredicate + ?Sized> TrianglePredicate for &P {
    fn holds(&self, v: &TriangleView) -> bool {
        (**self).holds(v)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MinWeight(pub f64);

impl TrianglePredicate for MinWeight {
    fn holds(&self, v: &TriangleView) -> bool {
        pi_min_weight(v, self.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct And<P, Q>(pub P, pub Q);

impl<P: TrianglePredicate, Q: TrianglePredicate> TrianglePredicate for And<P, Q> {
    fn holds(&self, v: &TriangleView) -> bool {
        self.0.holds(v) && self.1.holds(v)
    }
}

pub fn compose_and<P: TrianglePredicate, Q: TrianglePredicate>(p: P, q: Q) -> And<P, Q> {
    And(p, q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmKind {
    Maxpower,
    Ktc { k: f64 },
    Xtc,
    Gg,
    Rng,
    Lktc { k: f64, a: f64 },
    Yao { cones: u32 },
    Ektc { k: f64 },
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Maxpower => "maxpower",
            AlgorithmKind::Ktc { .. } => "ktc",
            AlgorithmKind::Xtc => "xtc",
            AlgorithmKind::Gg => "gg",
            AlgorithmKind::Rng => "rng",
            AlgorithmKind::Lktc { .. } => "lktc",
            AlgorithmKind::Yao { .. } => "yao",
            AlgorithmKind::Ektc { .. } => "ektc",
        }
    }
}

impl TrianglePredicate for AlgorithmKind {
    fn holds(&self, v: &TriangleView) -> bool {
        match *self {
            AlgorithmKind::Maxpower => pi_maxpower(v),
            AlgorithmKind::Ktc { k } => pi_ktc(v, k),
            AlgorithmKind::Xtc => pi_xtc(v),
            AlgorithmKind::Gg => pi_gg(v),
            AlgorithmKind::Rng => pi_rng(v),
            AlgorithmKind::Lktc { k, a } => pi_lktc(v, k, a),
            AlgorithmKind::Yao { cones } => pi_yao(v, cones),
            AlgorithmKind::Ektc { k } => ektc_unchecked(v, k),
        }
    }
}

/// Sort key realizing the algorithm's total link order.
#[derive(Debug, Clone, Copy)]
pub struct OrderKey {
    pub value: f64,
    pub id: LinkId,
}

impl PartialEq for OrderKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OrderKey {}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(self.id.cmp(&other.id))
    }
}

/// A named algorithm with its optional min-weight restriction and the power model
/// used to derive link lifetimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    pub min_weight: Option<f64>,
    pub power: PowerModel,
}

impl TrianglePredicate for AlgorithmSpec {
    fn holds(&self, v: &TriangleView) -> bool {
        match self.min_weight {
            Some(w) => compose_and(self.kind, MinWeight(w)).holds(v),
            None => self.kind.holds(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDefaults {
    pub k: f64,
    pub a: f64,
    pub cones: u32,
}

impl Default for ParamDefaults {
    fn default() -> Self {
        ParamDefaults { k: 1.41, a: 1.5, cones: 6 }
    }
}

impl AlgorithmSpec {
    pub fn new(kind: AlgorithmKind) -> Result<Self, AlgorithmError> {
        let spec = AlgorithmSpec { kind, min_weight: None, power: PowerModel::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn maxpower() -> Self {
        Self::new(AlgorithmKind::Maxpower).expect("no parameters")
    }

    pub fn ktc(k: f64) -> Result<Self, AlgorithmError> {
        Self::new(AlgorithmKind::Ktc { k })
    }

    pub fn ektc(k: f64) -> Result<Self, AlgorithmError> {
        Self::new(AlgorithmKind::Ektc { k })
    }

    pub fn with_min_weight(mut self, w_min: f64) -> Result<Self, AlgorithmError> {
        self.min_weight = Some(w_min);
        self.validate()?;
        Ok(self)
    }

    pub fn with_power(mut self, power: PowerModel) -> Self {
        self.power = power;
        self
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        let bad = |name, value, reason| Err(AlgorithmError::InvalidParameter { name, value, reason });
        match self.kind {
            AlgorithmKind::Ktc { k } | AlgorithmKind::Ektc { k } | AlgorithmKind::Lktc { k, .. }
                if !(k >= 1.0 && k.is_finite()) =>
            {
                return bad("k", k, "must be finite and at least 1");
            }
            AlgorithmKind::Lktc { a, .. } if !(a > 1.0 && a.is_finite()) => {
                return bad("a", a, "must be finite and greater than 1");
            }
            AlgorithmKind::Yao { cones: 0 } => {
                return bad("cones", 0.0, "must be at least 1");
            }
            _ => {}
        }
        if let Some(w) = self.min_weight {
            if !(w >= 0.0 && w.is_finite()) {
                return bad("w", w, "must be finite and non-negative");
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Whether π(ab, ac, cb) implies ac ≺ ab and cb ≺ ab.
    pub fn strict_dominance(&self) -> bool {
        !matches!(self.kind, AlgorithmKind::Yao { .. })
    }

    pub fn uses_angles(&self) -> bool {
        matches!(self.kind, AlgorithmKind::Yao { .. })
    }

    pub fn uses_lifetimes(&self) -> bool {
        matches!(self.kind, AlgorithmKind::Ektc { .. })
    }

    pub fn weight_relevant(&self) -> bool {
        !matches!(self.kind, AlgorithmKind::Maxpower)
    }

    pub fn node_attribute_relevant(&self, attr: NodeAttribute) -> bool {
        match attr {
            NodeAttribute::Energy => matches!(self.kind, AlgorithmKind::Ektc { .. }),
            NodeAttribute::HopCount => matches!(self.kind, AlgorithmKind::Lktc { .. }),
            NodeAttribute::Latitude | NodeAttribute::Longitude => self.uses_angles(),
        }
    }

    /// r(e) = E(source) / p(e).
    pub fn link_lifetime(&self, t: &Topology, e: LinkId) -> Result<f64, TopologyError> {
        let l = t.link(e)?;
        let energy = t.node(l.source)?.energy;
        Ok(energy / self.power.power_for_weight(l.weight))
    }

    fn link_view(&self, t: &Topology, e: LinkId) -> Result<LinkView, TopologyError> {
        let l = t.link(e)?;
        let angle = if self.uses_angles() { t.link_angle(e).ok() } else { None };
        Ok(LinkView {
            id: e,
            weight: l.weight,
            state: l.state,
            angle,
            lifetime: self.link_lifetime(t, e)?,
        })
    }

    pub fn view(&self, t: &Topology, tri: &Triangle) -> Result<TriangleView, TopologyError> {
        let ab = t.link(tri.ab)?;
        let ac = t.link(tri.ac)?;
        let node = |id| {
            t.node(id).map(|n| NodeView { energy: n.energy, hop_count: n.hop_count })
        };
        Ok(TriangleView {
            ab: self.link_view(t, tri.ab)?,
            ac: self.link_view(t, tri.ac)?,
            cb: self.link_view(t, tri.cb)?,
            a: node(ab.source)?,
            b: node(ab.target)?,
            c: node(ac.target)?,
        })
    }

    pub fn holds_on(&self, t: &Topology, tri: &Triangle) -> Result<bool, TopologyError> {
        if matches!(self.kind, AlgorithmKind::Maxpower) {
            return Ok(false);
        }
        Ok(self.holds(&self.view(t, tri)?))
    }

    pub fn order_key(&self, t: &Topology, e: LinkId) -> Result<OrderKey, TopologyError> {
        let value = if self.uses_lifetimes() {
            inverse_lifetime(self.link_lifetime(t, e)?)
        } else {
            t.link(e)?.weight
        };
        Ok(OrderKey { value, id: e })
    }
}

/// Compares two links under the algorithm's total order.
pub fn link_order(spec: &AlgorithmSpec, t: &Topology, e1: LinkId, e2: LinkId) -> Result<Ordering, TopologyError> {
    Ok(spec.order_key(t, e1)?.cmp(&spec.order_key(t, e2)?))
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgorithmKind::Maxpower => write!(f, "maxpower")?,
            AlgorithmKind::Ktc { k } => write!(f, "ktc(k={k})")?,
            AlgorithmKind::Xtc => write!(f, "xtc")?,
            AlgorithmKind::Gg => write!(f, "gg")?,
            AlgorithmKind::Rng => write!(f, "rng")?,
            AlgorithmKind::Lktc { k, a } => write!(f, "lktc(k={k},a={a})")?,
            AlgorithmKind::Yao { cones } => write!(f, "yao(cones={cones})")?,
            AlgorithmKind::Ektc { k } => write!(f, "ektc(k={k})")?,
        }
        if let Some(w) = self.min_weight {
            write!(f, "+minweight(w={w})")?;
        }
        Ok(())
    }
}

fn split_call(s: &str) -> Result<(&str, Vec<(&str, &str)>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    let name = s[..open].trim();
    let rest = s[open + 1..].strip_suffix(')').ok_or("missing closing parenthesis")?;
    let mut params = Vec::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        params.push((key.trim(), value.trim()));
    }
    Ok((name, params))
}

impl AlgorithmSpec {
    /// Parses the selection grammar; parameters left out fall back to `defaults`.
    pub fn parse_with(input: &str, defaults: &ParamDefaults) -> Result<Self, AlgorithmError> {
        let err = |reason: String| AlgorithmError::Parse { input: input.to_string(), reason };
        let mut parts = input.split('+');
        let head = parts.next().unwrap_or("");
        let (name, params) = split_call(head).map_err(err)?;
        let mut allowed: &[&str] = &[];
        let (mut k, mut a, mut cones) = (defaults.k, defaults.a, defaults.cones);
        for &(key, value) in &params {
            let num = || value.parse::<f64>().map_err(|_| err(format!("bad number `{value}` for {key}")));
            match key {
                "k" => k = num()?,
                "a" => a = num()?,
                "cones" => cones = value.parse().map_err(|_| err(format!("bad cone count `{value}`")))?,
                _ => return Err(err(format!("unknown parameter `{key}`"))),
            }
        }
        let kind = match name.to_ascii_lowercase().as_str() {
            "maxpower" => AlgorithmKind::Maxpower,
            "ktc" => {
                allowed = &["k"];
                AlgorithmKind::Ktc { k }
            }
            "xtc" => AlgorithmKind::Xtc,
            "gg" => AlgorithmKind::Gg,
            "rng" => AlgorithmKind::Rng,
            "lktc" => {
                allowed = &["k", "a"];
                AlgorithmKind::Lktc { k, a }
            }
            "yao" => {
                allowed = &["cones"];
                AlgorithmKind::Yao { cones }
            }
            "ektc" => {
                allowed = &["k"];
                AlgorithmKind::Ektc { k }
            }
            other => return Err(err(format!("unknown algorithm `{other}`"))),
        };
        if let Some((key, _)) = params.iter().find(|(key, _)| !allowed.contains(key)) {
            return Err(err(format!("`{name}` takes no parameter `{key}`")));
        }
        let mut spec = AlgorithmSpec { kind, min_weight: None, power: PowerModel::default() };
        if let Some(suffix) = parts.next() {
            let (mname, mparams) = split_call(suffix).map_err(err)?;
            if mname != "minweight" {
                return Err(err(format!("unknown modifier `{mname}`")));
            }
            match mparams.as_slice() {
                [("w", v)] => {
                    spec.min_weight = Some(v.parse().map_err(|_| err(format!("bad number `{v}` for w")))?)
                }
                _ => return Err(err("minweight expects exactly `w=<meters>`".into())),
            }
        }
        if parts.next().is_some() {
            return Err(err("at most one modifier is allowed".into()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for AlgorithmSpec {
    type Err = AlgorithmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmSpec::parse_with(s, &ParamDefaults::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(ab: f64, ac: f64, cb: f64) -> TriangleView {
        TriangleView::from_weights(ab, ac, cb)
    }

    #[test]
    fn maxpower_is_false() {
        assert!(!pi_maxpower(&w(30.0, 10.0, 20.0)));
        assert!(!pi_maxpower(&w(1.0, 1.0, 1.0)));
        assert!(!pi_maxpower(&w(100.0, 1.0, 1.0)));
    }

    #[test]
    fn ktc_cases() {
        assert!(pi_ktc(&w(30.0, 10.0, 20.0), 2.0));
        assert!(!pi_ktc(&w(30.0, 20.0, 25.0), 2.0));
        assert!(pi_ktc(&w(10.0, 10.0, 5.0).with_ids(7, 3, 1), 1.0));
        assert!(!pi_ktc(&w(10.0, 10.0, 5.0).with_ids(3, 7, 1), 1.0));
    }

    #[test]
    fn xtc_gg_rng_cases() {
        assert!(pi_xtc(&w(30.0, 10.0, 20.0)));
        assert!(!pi_xtc(&w(15.0, 20.0, 10.0)));
        assert!(pi_xtc(&w(5.0, 5.0, 5.0).with_ids(9, 1, 2)));
        assert!(!pi_xtc(&w(5.0, 5.0, 5.0).with_ids(1, 9, 2)));
        assert!(!pi_gg(&w(5.0, 4.0, 3.0)));
        assert!(pi_gg(&w(6.0, 4.0, 3.0)));
        assert!(!pi_gg(&w(1.0, 1.0, 1.0)));
        assert!(pi_rng(&w(30.0, 10.0, 20.0)));
        assert!(!pi_rng(&w(20.0, 20.0, 10.0)));
        assert!(!pi_rng(&w(1.0, 2.0, 3.0)));
    }

    #[test]
    fn lktc_cases() {
        let v = w(30.0, 10.0, 20.0);
        assert!(pi_lktc(&v.with_hops(2, 2, 2), 2.0, 1.5));
        assert!(!pi_lktc(&v.with_hops(4, 2, 5), 2.0, 1.5));
        assert!(pi_lktc(&v.with_hops(4, 2, 4), 2.0, 1.5));
        assert!(!pi_lktc(&v.with_hops(2, 2, -1), 2.0, 1.5));
        assert!(!pi_lktc(&w(30.0, 20.0, 25.0).with_hops(1, 1, 1), 2.0, 1.5));
    }

    #[test]
    fn yao_cases() {
        assert!(pi_yao(&w(5.0, 3.0, 9.0).with_angles(10.0, 20.0, 0.0), 6));
        assert!(!pi_yao(&w(5.0, 3.0, 9.0).with_angles(10.0, 70.0, 0.0), 6));
        assert!(!pi_yao(&w(3.0, 3.0, 9.0).with_angles(10.0, 20.0, 0.0), 6));
        assert!(!pi_yao(&w(5.0, 3.0, 9.0), 6));
    }

    #[test]
    fn ektc_cases() {
        let v = |r: (f64, f64, f64)| w(1.0, 1.0, 1.0).with_lifetimes(r.0, r.1, r.2);
        assert!(pi_ektc(&v((4.0, 10.0, 20.0)), 2.0).unwrap());
        // 4 <= 10 / 2 holds, 6 <= 10 / 2 does not
        assert!(pi_ektc(&v((4.0, 10.0, 7.0)), 2.0).unwrap());
        assert!(!pi_ektc(&v((6.0, 10.0, 7.0)), 2.0).unwrap());
        // r_ab = r_ac: ids decide (ab=2 > ac=0)
        assert!(pi_ektc(&v((4.0, 4.0, 20.0)), 1.0).unwrap());
        assert!(!pi_ektc(&v((4.0, 4.0, 20.0)).with_ids(0, 2, 1), 1.0).unwrap());
        assert!(pi_ektc(&v((0.0, 1.0, 2.0)), 2.0).unwrap());
        assert!(pi_ektc(&v((-1.0, 1.0, 2.0)), 2.0).is_err());
    }

    #[test]
    fn min_weight_composition() {
        let v = w(30.0, 10.0, 20.0);
        assert!(pi_min_weight(&v, 10.0));
        assert!(!pi_min_weight(&v, 11.0));
        assert!(pi_min_weight(&v, 0.0));
        let ktc = AlgorithmKind::Ktc { k: 2.0 };
        assert!(!compose_and(ktc, MinWeight(15.0)).holds(&v));
        assert!(compose_and(ktc, MinWeight(0.0)).holds(&v));
        assert!(!compose_and(AlgorithmKind::Maxpower, MinWeight(0.0)).holds(&v));
    }

    #[test]
    fn grammar_round_trip() {
        for s in [
            "maxpower",
            "ktc(k=1.41)",
            "xtc",
            "gg",
            "rng",
            "lktc(k=2,a=1.5)",
            "yao(cones=6)",
            "ektc(k=1.41)",
            "ktc(k=1.41)+minweight(w=20)",
            "ektc(k=2)+minweight(w=0)",
        ] {
            let spec: AlgorithmSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("ktc".parse::<AlgorithmSpec>().unwrap().kind, AlgorithmKind::Ktc { k: 1.41 });
        for bad in ["", "foo", "ktc(k=0.5)", "ktc(x=1)", "gg(k=2)", "ktc(k=2", "yao(cones=0)", "ktc+minweight(w=-1)", "ktc+max"] {
            assert!(bad.parse::<AlgorithmSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn order_examples() {
        let mut t = Topology::new();
        let a = t.add_node(0.0, 0.0, 100.0).unwrap();
        let b = t.add_node(0.0, 10.0, 50.0).unwrap();
        let e1 = t.add_link(a, b, 10.0).unwrap();
        let e2 = t.add_link(b, a, 20.0).unwrap();
        let ktc = AlgorithmSpec::ktc(2.0).unwrap();
        assert_eq!(link_order(&ktc, &t, e1, e2).unwrap(), Ordering::Less);
        t.set_weight(e2, 10.0).unwrap();
        assert_eq!(link_order(&ktc, &t, e1, e2).unwrap(), Ordering::Less);
        // Lifetimes: e1 -> 100/1 = 100, e2 -> 50/1 = 50. Larger lifetime comes first.
        let ektc = AlgorithmSpec::ektc(2.0).unwrap();
        assert_eq!(link_order(&ektc, &t, e1, e2).unwrap(), Ordering::Less);
        assert_eq!(link_order(&ektc, &t, e2, e1).unwrap(), Ordering::Greater);
    }
}
