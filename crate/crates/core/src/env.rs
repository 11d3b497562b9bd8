//! Hidden-graph environments for on-line strategies.
//!
//! An agent standing on a vertex sees only its incident edges: their weights and
//! whether the vertex at the other end is already explored. Edges are addressed by
//! port number. Vertex ids never reach the strategy; they appear only in the move log.

use crate::error::ProtocolError;
use crate::graph::{Ring, RootedTree, Topology, VertexId};
use crate::strategy::{strategy_cost, AgentId, CostModel, Move, Strategy};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortView {
    pub weight: Weight,
    pub explored: bool,
}

/// What one agent can see from where it stands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub agent: AgentId,
    pub ports: Vec<PortView>,
    /// Port through which the agent arrived; `None` right after invocation.
    pub entry_port: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Observe(Observation),
    Move(Move),
}

/// Log of an on-line run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnlineTrace {
    pub events: Vec<TraceEvent>,
    pub strategy: Strategy,
    pub cost: Weight,
}

impl OnlineTrace {
    pub fn observations(&self) -> impl Iterator<Item = &Observation> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Observe(o) => Some(o),
            TraceEvent::Move(_) => None,
        })
    }
}

/// The interface on-line strategies drive.
pub trait Environment {
    fn invoke(&mut self) -> Result<AgentId, ProtocolError>;

    fn observe(&mut self, agent: AgentId) -> Result<Observation, ProtocolError>;

    fn traverse(&mut self, agent: AgentId, port: usize) -> Result<(), ProtocolError>;

    /// Snapshot of the run so far, costed under `model`.
    fn trace(&self, model: CostModel) -> OnlineTrace;
}

/// Move and observation log shared by environment implementations.
#[derive(Debug, Clone, Default)]
pub(crate) struct TraceLog {
    pub events: Vec<TraceEvent>,
    pub strategy: Strategy,
    pub distance: Weight,
}

impl TraceLog {
    pub fn record_move(&mut self, mv: Move) {
        self.strategy.push(mv);
        self.events.push(TraceEvent::Move(mv));
    }

    pub fn record_observation(&mut self, obs: &Observation) {
        self.events.push(TraceEvent::Observe(obs.clone()));
    }

    pub fn trace(&self, model: CostModel) -> OnlineTrace {
        let k = self.strategy.agent_count() as u64;
        OnlineTrace {
            events: self.events.clone(),
            strategy: self.strategy.clone(),
            cost: model.q * k + self.distance,
        }
    }

    /// Rewrites vertex ids in the logged moves.
    pub fn relabel(&mut self, map: impl Fn(VertexId) -> VertexId) {
        self.strategy = self.strategy.relabeled(&map);
        for event in &mut self.events {
            if let TraceEvent::Move(Move::Traverse { from, to, .. }) = event {
                *from = map(*from);
                *to = map(*to);
            }
        }
    }
}

/// Port numbering of a concrete graph.
pub trait PortGraph: Topology {
    /// Incident edges of `v` in port order.
    fn ports(&self, v: VertexId) -> Vec<(VertexId, Weight)>;
}

/// Port 0 runs towards `v + 1`, port 1 towards `v - 1`.
impl PortGraph for Ring {
    fn ports(&self, v: VertexId) -> Vec<(VertexId, Weight)> {
        vec![
            (self.succ(v), self.weight(v)),
            (self.pred(v), self.weight(self.pred(v))),
        ]
    }
}

/// Ports follow ascending neighbor id.
impl PortGraph for RootedTree {
    fn ports(&self, v: VertexId) -> Vec<(VertexId, Weight)> {
        self.neighbors(v)
    }
}

/// A fixed graph hidden behind the port interface.
#[derive(Debug, Clone)]
pub struct HiddenGraph<G> {
    graph: G,
    explored: Vec<bool>,
    unexplored: usize,
    positions: Vec<VertexId>,
    entry: Vec<Option<usize>>,
    log: TraceLog,
}

pub type RingEnvironment = HiddenGraph<Ring>;
pub type TreeEnvironment = HiddenGraph<RootedTree>;

impl<G: PortGraph> HiddenGraph<G> {
    pub fn new(graph: G) -> Self {
        let n = graph.order();
        let mut explored = vec![false; n];
        explored[graph.homebase()] = true;
        HiddenGraph {
            graph,
            explored,
            unexplored: n - 1,
            positions: Vec::new(),
            entry: Vec::new(),
            log: TraceLog::default(),
        }
    }

    pub fn graph(&self) -> &G {
        &self.graph
    }

    pub fn all_explored(&self) -> bool {
        self.unexplored == 0 && !self.positions.is_empty()
    }

    pub fn is_explored(&self, v: VertexId) -> bool {
        self.explored[v]
    }

    pub fn position(&self, agent: AgentId) -> Option<VertexId> {
        self.positions.get(agent.index()).copied()
    }

    pub fn strategy(&self) -> &Strategy {
        &self.log.strategy
    }

    pub(crate) fn log_mut(&mut self) -> &mut TraceLog {
        &mut self.log
    }

    fn check_agent(&self, agent: AgentId) -> Result<VertexId, ProtocolError> {
        self.position(agent)
            .ok_or(ProtocolError::UnknownAgent(agent))
    }

    /// Applies a move given in vertex ids without logging an observation.
    pub(crate) fn apply_move(&mut self, mv: Move) -> Result<(), ProtocolError> {
        match mv {
            Move::Invoke { .. } => {
                self.invoke()?;
            }
            Move::Traverse { agent, to, .. } => {
                let at = self.check_agent(agent)?;
                let port = self
                    .graph
                    .ports(at)
                    .iter()
                    .position(|&(u, _)| u == to)
                    .ok_or(ProtocolError::BadPort {
                        agent,
                        port: usize::MAX,
                    })?;
                self.traverse(agent, port)?;
            }
        }
        Ok(())
    }
}

impl<G: PortGraph> Environment for HiddenGraph<G> {
    fn invoke(&mut self) -> Result<AgentId, ProtocolError> {
        if self.all_explored() {
            return Err(ProtocolError::Exhausted);
        }
        let agent = AgentId::from_index(self.positions.len());
        self.positions.push(self.graph.homebase());
        self.entry.push(None);
        self.log.record_move(Move::Invoke { agent });
        Ok(agent)
    }

    fn observe(&mut self, agent: AgentId) -> Result<Observation, ProtocolError> {
        let at = self.check_agent(agent)?;
        let ports = self
            .graph
            .ports(at)
            .into_iter()
            .map(|(u, weight)| PortView {
                weight,
                explored: self.explored[u],
            })
            .collect();
        let obs = Observation {
            agent,
            ports,
            entry_port: self.entry[agent.index()],
        };
        self.log.record_observation(&obs);
        Ok(obs)
    }

    fn traverse(&mut self, agent: AgentId, port: usize) -> Result<(), ProtocolError> {
        if self.all_explored() {
            return Err(ProtocolError::Exhausted);
        }
        let from = self.check_agent(agent)?;
        let ports = self.graph.ports(from);
        let &(to, w) = ports
            .get(port)
            .ok_or(ProtocolError::BadPort { agent, port })?;
        self.positions[agent.index()] = to;
        self.entry[agent.index()] = self.graph.ports(to).iter().position(|&(u, _)| u == from);
        self.log.distance += w;
        if !self.explored[to] {
            self.explored[to] = true;
            self.unexplored -= 1;
        }
        self.log.record_move(Move::Traverse { agent, from, to });
        Ok(())
    }

    fn trace(&self, model: CostModel) -> OnlineTrace {
        let trace = self.log.trace(model);
        debug_assert_eq!(
            strategy_cost(&trace.strategy, model, &self.graph).ok(),
            Some(trace.cost)
        );
        trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ports_and_entry() {
        let ring = Ring::from_ints(&[1, 2, 3], 0).unwrap();
        let mut env = RingEnvironment::new(ring);
        let a = env.invoke().unwrap();
        let obs = env.observe(a).unwrap();
        assert_eq!(obs.ports[0].weight, Weight::from_int(1));
        assert_eq!(obs.ports[1].weight, Weight::from_int(3));
        assert_eq!(obs.entry_port, None);
        env.traverse(a, 0).unwrap();
        let obs = env.observe(a).unwrap();
        assert_eq!(obs.entry_port, Some(1));
        assert!(obs.ports[1].explored);
        assert!(!obs.ports[0].explored);
        env.traverse(a, 0).unwrap();
        assert!(env.all_explored());
        assert_eq!(env.traverse(a, 0), Err(ProtocolError::Exhausted));
        assert_eq!(env.invoke(), Err(ProtocolError::Exhausted));
        assert_eq!(env.trace(CostModel::from_int(2)).cost, Weight::from_int(5));
    }

    #[test]
    fn bad_queries() {
        let ring = Ring::from_ints(&[1, 1, 1], 0).unwrap();
        let mut env = RingEnvironment::new(ring);
        assert_eq!(
            env.observe(AgentId(1)),
            Err(ProtocolError::UnknownAgent(AgentId(1)))
        );
        let a = env.invoke().unwrap();
        assert!(matches!(
            env.traverse(a, 7),
            Err(ProtocolError::BadPort { .. })
        ));
    }
}
