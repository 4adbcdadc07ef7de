//! The discrete-time scenario loop.
//!
//! Time advances in steps of one message interval. Mobility and battery drain
//! act on the true world state every step. The topology seen by TC is only
//! brought up to date at TC boundaries, where deaths, energy levels, positions,
//! link changes and hop counts are fed through the event handlers as one batch,
//! followed by an incremental TC run.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use ktopo::engine::{run_tc_incremental_with, EngineError, TcOptions};
use ktopo::events::{apply_event, EventError};
use ktopo::generate::hop_counts;
use ktopo::{ConsistencyLevel, ContextEvent, LifetimeRecord, LinkId, NodeAttribute, NodeId, Topology};
use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{BaseStation, ConfigError, ScenarioConfig};
use crate::metrics::{MetricsRow, RunMetrics};
use crate::workload::{drain, Router};
use crate::world::{distance, mean_out_degree, place_uniform, position_events, proximity_events, GaussMarkov, Position};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("event handling failed at {time} min: {source}")]
    Event { time: f64, source: EventError },
    #[error("TC failed at {time} min: {source}")]
    Engine { time: f64, source: EngineError },
    #[error("topology not strongly consistent after TC at {time} min")]
    Inconsistent { time: f64 },
}

const STREAM_PLACEMENT: u64 = 0;
const STREAM_MOBILITY: u64 = 1;
const STREAM_WORKLOAD: u64 = 2;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn resolve_base(cfg: &ScenarioConfig, t: &Topology) -> Option<NodeId> {
    match cfg.base_station {
        BaseStation::None => None,
        BaseStation::Node(n) => Some(NodeId(n)),
        BaseStation::Center => {
            let c = (cfg.world_side / 2.0, cfg.world_side / 2.0);
            t.nodes()
                .min_by(|a, b| {
                    distance((a.latitude, a.longitude), c).total_cmp(&distance((b.latitude, b.longitude), c))
                })
                .map(|n| n.id)
        }
    }
}

/// Alive nodes plus the links the TC has to store, i.e. those of at least `w_min`.
pub fn topology_size(t: &Topology, w_min: f64) -> usize {
    t.node_count() + t.links().filter(|l| l.weight >= w_min).count()
}

/// Placement only: the initial topology for `seed`.
pub fn initial_topology(cfg: &ScenarioConfig, seed: u64) -> Topology {
    place_uniform(cfg, &mut rng(seed, STREAM_PLACEMENT))
}

struct Boundary<'a> {
    cfg: &'a ScenarioConfig,
    spec: ktopo::AlgorithmSpec,
    opts: TcOptions,
    base: Option<NodeId>,
    hops: bool,
}

impl Boundary<'_> {
    fn events(&self, t: &Topology, energy: &BTreeMap<NodeId, f64>, positions: &BTreeMap<NodeId, Position>) -> Vec<ContextEvent> {
        let mut ev: Vec<ContextEvent> = Vec::new();
        for (&id, &e) in energy {
            if e <= 0.0 && t.contains_node(id) {
                ev.push(ContextEvent::NodeRemove { id });
            }
        }
        for (&id, &e) in energy {
            if e > 0.0 && t.node(id).map(|n| n.energy != e).unwrap_or(false) {
                ev.push(ContextEvent::NodeAttrMod { id, attr: NodeAttribute::Energy, value: e });
            }
        }
        let alive: BTreeMap<NodeId, Position> =
            positions.iter().filter(|(n, _)| energy.get(n).is_some_and(|&e| e > 0.0)).map(|(&n, &p)| (n, p)).collect();
        ev.extend(position_events(t, &alive));
        ev.extend(proximity_events(t, &alive, self.cfg.transmission_radius, self.cfg.mobility.weight_epsilon));
        ev
    }

    /// Applies the event batch, refreshes hop counts and runs TC. Returns the row.
    fn run(
        &self,
        t: &mut Topology,
        energy: &BTreeMap<NodeId, f64>,
        positions: &BTreeMap<NodeId, Position>,
        time: f64,
    ) -> Result<MetricsRow, ScenarioError> {
        let started = Instant::now();
        let lsm_before = t.lsm_count();
        // Links still unclassified from placement are pending work as well.
        let mut dirty: BTreeSet<LinkId> =
            t.links().filter(|l| l.state == ktopo::LinkState::Unclassified).map(|l| l.id).collect();
        // Events were computed before the batch started; skip those whose subject is already gone.
        let mut applied = 0usize;
        for ev in self.events(t, energy, positions) {
            let skip = match &ev {
                ContextEvent::NodeAttrMod { id, .. } => !t.contains_node(*id),
                ContextEvent::LinkRemove { id } | ContextEvent::LinkAttrMod { id, .. } => !t.contains_link(*id),
                ContextEvent::LinkAdd { source, target, .. } => !t.contains_node(*source) || !t.contains_node(*target),
                _ => false,
            };
            if skip {
                continue;
            }
            let r = apply_event(t, &ev, &self.spec).map_err(|source| ScenarioError::Event { time, source })?;
            dirty.extend(r.unclassified_links);
            applied += 1;
        }
        if self.hops {
            let base = self.base.filter(|b| t.contains_node(*b));
            let fresh = match base {
                Some(b) => hop_counts(t, b),
                None => t.node_ids().into_iter().map(|n| (n, -1)).collect(),
            };
            for (id, h) in fresh {
                if t.node(id).map(|n| n.hop_count != h).unwrap_or(false) {
                    let ev = ContextEvent::NodeAttrMod { id, attr: NodeAttribute::HopCount, value: f64::from(h) };
                    let r = apply_event(t, &ev, &self.spec).map_err(|source| ScenarioError::Event { time, source })?;
                    dirty.extend(r.unclassified_links);
                    applied += 1;
                }
            }
        }
        let dirty: Vec<LinkId> = dirty.into_iter().collect();
        let report = run_tc_incremental_with(t, &self.spec, &dirty, &self.opts)
            .map_err(|source| ScenarioError::Engine { time, source })?;
        if report.final_consistency != ConsistencyLevel::StronglyConsistent {
            return Err(ScenarioError::Inconsistent { time });
        }
        debug!("t={time} min: {applied} events, {} links reclassified", report.links_processed);
        Ok(MetricsRow {
            sim_time_min: time,
            alive_nodes: t.node_count(),
            topology_size: topology_size(t, self.cfg.w_min),
            lsm_count: t.lsm_count() - lsm_before,
            tc_wall_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    }
}

/// Runs one scenario for one seed.
pub fn run_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<RunMetrics, ScenarioError> {
    run_scenario_with(cfg, seed, &TcOptions::default())
}

pub fn run_scenario_with(cfg: &ScenarioConfig, seed: u64, opts: &TcOptions) -> Result<RunMetrics, ScenarioError> {
    cfg.validate()?;
    let spec = cfg.algorithm_spec()?;
    let model = cfg.power_model();
    let mut t = initial_topology(cfg, seed);
    let mut mob_rng = rng(seed, STREAM_MOBILITY);
    let mut work_rng = rng(seed, STREAM_WORKLOAD);
    let mut mobility = GaussMarkov::new(&t, &cfg.mobility, cfg.world_side, &mut mob_rng);
    let mut energy: BTreeMap<NodeId, f64> = t.nodes().map(|n| (n.id, n.energy)).collect();
    let mut lifetime = LifetimeRecord::new(t.node_count());
    let initial_link_count = t.link_count();
    let initial_mean_out_degree = mean_out_degree(&t);
    let boundary = Boundary { cfg, spec, opts: opts.clone(), base: resolve_base(cfg, &t), hops: cfg.needs_hop_counts() };
    let dt = cfg.workload.message_interval;
    let airtime = cfg.workload.airtime();
    let steps = cfg.steps_per_interval();
    let mut router = Router::default();
    let mut rows = Vec::with_capacity(cfg.tc_runs() as usize);
    let mut step: u64 = 0;

    info!("{spec} seed {seed}: {} nodes, {initial_link_count} links", t.node_count());
    for run in 0..cfg.tc_runs() {
        let time = f64::from(run * cfg.tc_interval);
        rows.push(boundary.run(&mut t, &energy, &mobility.positions(), time)?);
        router.invalidate();
        for _ in 0..steps {
            step += 1;
            mobility.step(dt, &mut mob_rng);
            let minutes = step as f64 * dt / 60.0;
            for n in drain(cfg.workload.kind, &t, &model, airtime, boundary.base, &mut energy, &mut router, &mut work_rng) {
                lifetime.record_death(n, minutes);
                mobility.remove(n);
            }
        }
    }
    Ok(RunMetrics { algorithm: spec.to_string(), seed, rows, lifetime, initial_link_count, initial_mean_out_degree })
}
