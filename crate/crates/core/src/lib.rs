//! Incremental triangle-based topology control.
//!
//! A [`Topology`] holds nodes and directed links, each link being active,
//! inactive, or unclassified. An [`AlgorithmSpec`] decides, per directed
//! triangle, whether the triangle's long side may be dropped. [`run_tc`] drives
//! unclassified links to a strongly consistent classification, and
//! [`apply_event`] repairs a classified topology after environment changes so
//! that an incremental run can pick up only what changed.

pub mod algorithms;
pub mod constraints;
pub mod energy;
pub mod engine;
pub mod events;
pub mod fixtures;
pub mod generate;
pub mod snapshot;
pub mod topology;

pub use algorithms::{AlgorithmKind, AlgorithmSpec, TriangleView};
pub use constraints::{classify_consistency, ConsistencyLevel, ConstraintViolation};
pub use energy::{LifetimeMode, LifetimeRecord, PowerModel};
pub use engine::{run_tc, run_tc_incremental, EngineError, SelectionOrder, TcOptions, TcRunReport};
pub use events::{apply_event, unclassify_link, ContextEvent, HandlerReport};
pub use topology::{Link, LinkId, LinkState, Node, NodeAttribute, NodeId, Topology, Triangle};
