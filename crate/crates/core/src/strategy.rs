//! Moves, strategies, the cost model, and replay-based validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MoveError, StrategyError};
use crate::graph::{Topology, VertexId};
use crate::weight::Weight;

/// Dense positive agent id, assigned in invocation order starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        AgentId(i as u32 + 1)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// A new agent appears at the homebase.
    Invoke { agent: AgentId },
    Traverse {
        agent: AgentId,
        from: VertexId,
        to: VertexId,
    },
}

impl Move {
    pub fn agent(&self) -> AgentId {
        match *self {
            Move::Invoke { agent } | Move::Traverse { agent, .. } => agent,
        }
    }
}

/// The invoking cost `q` paid once per agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub q: Weight,
}

impl CostModel {
    pub fn new(q: Weight) -> Self {
        CostModel { q }
    }

    pub fn from_int(q: u64) -> Self {
        CostModel {
            q: Weight::from_int(q),
        }
    }

    pub fn scaled(self, factor: u64) -> Self {
        CostModel {
            q: self.q.scale(factor),
        }
    }
}

/// An ordered move sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Strategy {
    moves: Vec<Move>,
}

impl Strategy {
    pub fn new() -> Self {
        Strategy::default()
    }

    pub fn from_moves(moves: Vec<Move>) -> Self {
        Strategy { moves }
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn into_moves(self) -> Vec<Move> {
        self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn push(&mut self, mv: Move) {
        self.moves.push(mv);
    }

    /// Appends an invoke for the next free id and returns that id.
    pub fn invoke(&mut self) -> AgentId {
        let agent = AgentId::from_index(self.agent_count());
        self.moves.push(Move::Invoke { agent });
        agent
    }

    pub fn traverse(&mut self, agent: AgentId, from: VertexId, to: VertexId) {
        self.moves.push(Move::Traverse { agent, from, to });
    }

    /// Walks `agent` along `path`; `path[0]` must be its current vertex.
    pub fn walk(&mut self, agent: AgentId, path: &[VertexId]) {
        for pair in path.windows(2) {
            self.traverse(agent, pair[0], pair[1]);
        }
    }

    pub fn extend(&mut self, other: &Strategy) {
        self.moves.extend_from_slice(&other.moves);
    }

    /// Number of invoke moves.
    pub fn agent_count(&self) -> usize {
        self.moves
            .iter()
            .filter(|m| matches!(m, Move::Invoke { .. }))
            .count()
    }

    /// Vertex sequence of each agent, starting at `homebase`.
    pub fn agent_walks(&self, homebase: VertexId) -> Vec<Vec<VertexId>> {
        let mut walks: Vec<Vec<VertexId>> = Vec::new();
        for mv in &self.moves {
            match *mv {
                Move::Invoke { .. } => walks.push(vec![homebase]),
                Move::Traverse { agent, to, .. } => {
                    if let Some(walk) = walks.get_mut(agent.index()) {
                        walk.push(to);
                    }
                }
            }
        }
        walks
    }

    /// Relabels every vertex through `map`.
    pub fn relabeled(&self, map: impl Fn(VertexId) -> VertexId) -> Strategy {
        let moves = self
            .moves
            .iter()
            .map(|mv| match *mv {
                Move::Invoke { agent } => Move::Invoke { agent },
                Move::Traverse { agent, from, to } => Move::Traverse {
                    agent,
                    from: map(from),
                    to: map(to),
                },
            })
            .collect();
        Strategy { moves }
    }
}

/// `k·q + Σ d_i` of a legal strategy.
pub fn strategy_cost<G: Topology + ?Sized>(
    strategy: &Strategy,
    model: CostModel,
    graph: &G,
) -> Result<Weight, StrategyError> {
    let homebase = graph.homebase();
    let mut positions: Vec<VertexId> = Vec::new();
    let mut cost = Weight::ZERO;
    for (index, mv) in strategy.moves().iter().enumerate() {
        let fail = |kind| StrategyError { index, kind };
        match *mv {
            Move::Invoke { agent } => {
                let expected = AgentId::from_index(positions.len());
                if agent != expected {
                    return Err(fail(MoveError::InvokeOrder {
                        expected,
                        got: agent,
                    }));
                }
                positions.push(homebase);
                cost += model.q;
            }
            Move::Traverse { agent, from, to } => {
                let pos = positions
                    .get_mut(agent.index())
                    .ok_or_else(|| fail(MoveError::UnknownAgent(agent)))?;
                if *pos != from {
                    return Err(fail(MoveError::WrongPosition {
                        agent,
                        claimed: from,
                        actual: *pos,
                    }));
                }
                let w = graph
                    .edge_weight(from, to)
                    .ok_or_else(|| fail(MoveError::NotAdjacent { from, to }))?;
                *pos = to;
                cost += w;
            }
        }
    }
    Ok(cost)
}

/// Replay result of a strategy on a known graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationReport {
    pub valid: bool,
    /// First illegal move, if any; replay stops there.
    pub error: Option<StrategyError>,
    pub explored: Vec<bool>,
    pub agent_distances: Vec<Weight>,
    pub total_cost: Weight,
    /// Index of the move that first reached each vertex.
    pub first_visit_step: Vec<Option<usize>>,
    pub final_positions: Vec<VertexId>,
}

impl ExplorationReport {
    pub fn agent_count(&self) -> usize {
        self.agent_distances.len()
    }

    pub fn all_explored(&self) -> bool {
        self.explored.iter().all(|&e| e)
    }
}

/// Replays `strategy` on `graph`, tracking exploration. Illegal moves are reported, never raised.
pub fn validate_strategy<G: Topology + ?Sized>(
    graph: &G,
    strategy: &Strategy,
    model: CostModel,
) -> ExplorationReport {
    let n = graph.order();
    let homebase = graph.homebase();
    let mut explored = vec![false; n];
    let mut first_visit_step = vec![None; n];
    let mut positions: Vec<VertexId> = Vec::new();
    let mut distances: Vec<Weight> = Vec::new();
    let mut error = None;

    for (index, mv) in strategy.moves().iter().enumerate() {
        let outcome = match *mv {
            Move::Invoke { agent } => {
                let expected = AgentId::from_index(positions.len());
                if agent == expected {
                    positions.push(homebase);
                    distances.push(Weight::ZERO);
                    Ok(homebase)
                } else {
                    Err(MoveError::InvokeOrder {
                        expected,
                        got: agent,
                    })
                }
            }
            Move::Traverse { agent, from, to } => match positions.get(agent.index()) {
                None => Err(MoveError::UnknownAgent(agent)),
                Some(&pos) if pos != from => Err(MoveError::WrongPosition {
                    agent,
                    claimed: from,
                    actual: pos,
                }),
                Some(_) => match graph.edge_weight(from, to) {
                    None => Err(MoveError::NotAdjacent { from, to }),
                    Some(w) => {
                        positions[agent.index()] = to;
                        distances[agent.index()] += w;
                        Ok(to)
                    }
                },
            },
        };
        match outcome {
            Ok(v) => {
                if !explored[v] {
                    explored[v] = true;
                    first_visit_step[v] = Some(index);
                }
            }
            Err(kind) => {
                error = Some(StrategyError { index, kind });
                break;
            }
        }
    }

    let k = distances.len() as u64;
    let total_cost = model.q * k + distances.iter().sum::<Weight>();
    let valid = error.is_none() && explored.iter().all(|&e| e);
    ExplorationReport {
        valid,
        error,
        explored,
        agent_distances: distances,
        total_cost,
        first_visit_step,
        final_positions: positions,
    }
}
