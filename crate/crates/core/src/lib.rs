//! Exploration of edge-weighted rings and trees by teams of agents, where every
//! agent costs `q` to call and every traversal costs the edge weight.
//!
//! Off-line solvers ([`ring_offline()`], [`cost_expl`]) return optimal strategies;
//! on-line strategies run against hidden graphs through [`Environment`]; adaptive
//! environments build the instances that push on-line strategies to their worst
//! ratio; [`optimal_cost`] certifies small instances by exhaustive search.

pub mod dot;
pub mod env;
pub mod error;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod ring_offline;
pub mod ring_online;
pub mod strategy;
pub mod tree_offline;
pub mod tree_online;
pub mod weight;

pub use env::{Environment, Observation, OnlineTrace, PortView, RingEnvironment, TreeEnvironment};
pub use error::{
    FormatError, GenError, GraphError, LabelError, MoveError, OracleError, ProtocolError,
    StrategyError, WeightError, ZeroOptError,
};
pub use graph::{distances_from, Instance, Ring, RootedTree, Topology, VertexId};
pub use oracle::{competitive_ratio, optimal_cost, OracleConfig, OracleResult, SearchBound};
pub use ring_offline::{analyze_cuts, ring_offline, RingCutAnalysis};
pub use ring_online::{
    gen_ring_c1, gen_ring_c2, ring_adversary, ring_online, AdaptiveRingEnv, RingCase, RingSubject,
};
pub use strategy::{
    strategy_cost, validate_strategy, AgentId, CostModel, ExplorationReport, Move, Strategy,
};
pub use tree_offline::{
    compress, cost_bounds, cost_expl, set_labeling, set_strategy, CompressedTree, Label, LabelMap,
};
pub use tree_online::{
    adversary_tree_env, dfs_prime, family_t_opt_upper, gen_family_t, tree_adversary,
    AdversaryTreeEnv, FamilyTParams, TreeCase, TreeSubject,
};
pub use weight::{Rational, Weight};
