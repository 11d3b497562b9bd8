//! Exhaustive optimal-cost search for small instances.
//!
//! Uniform-cost search over `(explored set, agent positions)`. Agents are
//! interchangeable, so positions are kept as a sorted multiset; the witness is
//! rebuilt afterwards by always moving the lowest-id agent standing on the source
//! vertex. Costs are scaled to integers by the common denominator of all weights.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};

use num_integer::Integer;

use crate::error::{OracleError, ZeroOptError};
use crate::graph::{Instance, Ring, RootedTree, Topology, VertexId};
use crate::strategy::{AgentId, CostModel, Strategy};
use crate::tree_offline::cost_bounds;
use crate::weight::{Rational, Weight};

/// Positions are packed four bits each.
const MAX_VERTICES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub vertex_limit: usize,
    /// Drop states dearer than a known feasible strategy.
    pub prune: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            vertex_limit: 12,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub cost: Weight,
    pub witness: Strategy,
    pub expanded_states: usize,
}

/// Graphs the oracle can bound from above before searching.
pub trait SearchBound: Topology {
    /// Cost of some feasible strategy.
    fn upper_bound(&self, model: CostModel) -> Weight;

    /// Agent cap that never excludes an optimum.
    fn default_cap(&self) -> usize;
}

impl SearchBound for Ring {
    /// One agent walking around, skipping the heavier homebase edge.
    fn upper_bound(&self, model: CostModel) -> Weight {
        let h = self.homebase();
        let skip = self.weight(h).max(self.weight(self.pred(h)));
        model.q + self.total_weight() - skip
    }

    fn default_cap(&self) -> usize {
        2
    }
}

impl SearchBound for RootedTree {
    /// One agent walking depth-first and stopping at the deepest leaf.
    fn upper_bound(&self, model: CostModel) -> Weight {
        cost_bounds(self, model).1
    }

    fn default_cap(&self) -> usize {
        self.leaves().len().max(1)
    }
}

impl SearchBound for Instance {
    fn upper_bound(&self, model: CostModel) -> Weight {
        match self {
            Instance::Ring(r) => r.upper_bound(model),
            Instance::Tree(t) => t.upper_bound(model),
        }
    }

    fn default_cap(&self) -> usize {
        match self {
            Instance::Ring(r) => r.default_cap(),
            Instance::Tree(t) => t.default_cap(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct State {
    explored: u32,
    count: u8,
    /// Sorted positions, four bits each, lowest first.
    positions: u64,
}

impl State {
    fn position(self, i: usize) -> VertexId {
        ((self.positions >> (4 * i)) & 0xf) as VertexId
    }

    fn with_positions(self, explored: u32, mut list: Vec<VertexId>) -> State {
        list.sort_unstable();
        let mut packed = 0u64;
        for (i, &p) in list.iter().enumerate() {
            packed |= (p as u64) << (4 * i);
        }
        State {
            explored,
            count: list.len() as u8,
            positions: packed,
        }
    }

    fn positions_vec(self) -> Vec<VertexId> {
        (0..self.count as usize).map(|i| self.position(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Start,
    Invoke,
    Move(VertexId, VertexId),
}

#[derive(Debug, Clone, Copy)]
struct Seen {
    g: u64,
    parent: Option<State>,
    step: Step,
}

/// Adjacency lists with integer weights.
type ScaledAdjacency = Vec<Vec<(VertexId, u64)>>;

/// Common denominator of all weights and `q`, and the scaled integer values.
fn scale<G: Topology + ?Sized>(
    graph: &G,
    model: CostModel,
) -> Result<(i128, u64, ScaledAdjacency), OracleError> {
    let n = graph.order();
    let adjacency: Vec<Vec<(VertexId, Weight)>> = (0..n).map(|v| graph.neighbors(v)).collect();
    let mut lcm: i128 = model.q.denom();
    for list in &adjacency {
        for (_, w) in list {
            lcm = lcm.lcm(&w.denom());
        }
    }
    let to_int = |w: Weight| -> Result<u64, OracleError> {
        let factor = lcm / w.denom();
        let value = w.numer().checked_mul(factor).ok_or(OracleError::Overflow)?;
        u64::try_from(value).map_err(|_| OracleError::Overflow)
    };
    let q = to_int(model.q)?;
    let mut scaled = Vec::with_capacity(n);
    for list in adjacency {
        let mut row = Vec::with_capacity(list.len());
        for (u, w) in list {
            row.push((u, to_int(w)?));
        }
        scaled.push(row);
    }
    Ok((lcm, q, scaled))
}

/// Optimum over strategies with at most `cap` agents, default configuration.
pub fn optimal_cost<G: SearchBound + ?Sized>(
    graph: &G,
    model: CostModel,
    cap: usize,
) -> Result<OracleResult, OracleError> {
    optimal_cost_with(graph, model, cap, &OracleConfig::default())
}

pub fn optimal_cost_with<G: SearchBound + ?Sized>(
    graph: &G,
    model: CostModel,
    cap: usize,
    config: &OracleConfig,
) -> Result<OracleResult, OracleError> {
    let n = graph.order();
    let limit = config.vertex_limit.min(MAX_VERTICES);
    if n > limit {
        return Err(OracleError::TooLarge { n, limit });
    }
    if cap < 1 {
        return Err(OracleError::BadCap);
    }
    // more agents than non-home vertices never helps
    let cap = cap.min((n - 1).max(1));
    let (lcm, q, adjacency) = scale(graph, model)?;
    let bound = if config.prune {
        let b = graph.upper_bound(model);
        let factor = lcm / b.denom();
        let scaled = b.numer().checked_mul(factor).ok_or(OracleError::Overflow)?;
        Some(u64::try_from(scaled).map_err(|_| OracleError::Overflow)?)
    } else {
        None
    };

    let home = graph.homebase();
    let full: u32 = (1u32 << n) - 1;
    let start = State {
        explored: 1 << home,
        count: 0,
        positions: 0,
    };
    let mut seen: HashMap<State, Seen> = HashMap::new();
    seen.insert(
        start,
        Seen {
            g: 0,
            parent: None,
            step: Step::Start,
        },
    );
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, start)));
    let mut done: HashSet<State> = HashSet::new();
    let mut expanded = 0usize;

    let mut relax = |heap: &mut BinaryHeap<Reverse<(u64, State)>>,
                     from: State,
                     g: u64,
                     next: State,
                     step: Step|
     -> Result<(), OracleError> {
        if bound.is_some_and(|b| g > b) {
            return Ok(());
        }
        match seen.entry(next) {
            Entry::Occupied(mut e) => {
                if g < e.get().g {
                    e.insert(Seen {
                        g,
                        parent: Some(from),
                        step,
                    });
                    heap.push(Reverse((g, next)));
                }
            }
            Entry::Vacant(e) => {
                e.insert(Seen {
                    g,
                    parent: Some(from),
                    step,
                });
                heap.push(Reverse((g, next)));
            }
        }
        Ok(())
    };

    let mut goal = None;
    while let Some(Reverse((g, state))) = heap.pop() {
        if !done.insert(state) {
            continue;
        }
        expanded += 1;
        if state.explored == full && state.count > 0 {
            goal = Some((g, state));
            break;
        }
        let positions = state.positions_vec();
        if positions.len() < cap {
            let mut list = positions.clone();
            list.push(home);
            let g2 = g.checked_add(q).ok_or(OracleError::Overflow)?;
            relax(
                &mut heap,
                state,
                g2,
                state.with_positions(state.explored, list),
                Step::Invoke,
            )?;
        }
        for i in 0..positions.len() {
            let from = positions[i];
            if i > 0 && positions[i - 1] == from {
                continue;
            }
            for &(to, w) in &adjacency[from] {
                let mut list = positions.clone();
                list[i] = to;
                let g2 = g.checked_add(w).ok_or(OracleError::Overflow)?;
                let explored = state.explored | (1 << to);
                relax(
                    &mut heap,
                    state,
                    g2,
                    state.with_positions(explored, list),
                    Step::Move(from, to),
                )?;
            }
        }
    }

    let (g, end) = goal.ok_or(OracleError::Unreachable)?;
    let mut steps = Vec::new();
    let mut cur = end;
    loop {
        let entry = seen[&cur];
        match entry.parent {
            Some(p) => {
                steps.push(entry.step);
                cur = p;
            }
            None => break,
        }
    }
    steps.reverse();

    let mut witness = Strategy::new();
    let mut at: Vec<VertexId> = Vec::new();
    for step in steps {
        match step {
            Step::Start => {}
            Step::Invoke => {
                witness.invoke();
                at.push(home);
            }
            Step::Move(from, to) => {
                let idx = at
                    .iter()
                    .position(|&p| p == from)
                    .expect("an agent stands on the source vertex");
                witness.traverse(AgentId::from_index(idx), from, to);
                at[idx] = to;
            }
        }
    }
    let cost =
        Weight::from_rational(Rational::new(g as i128, lcm)).expect("costs are non-negative");
    Ok(OracleResult {
        cost,
        witness,
        expanded_states: expanded,
    })
}

/// Exact `online / opt`.
pub fn competitive_ratio(online: Weight, opt: Weight) -> Result<Rational, ZeroOptError> {
    online.checked_div(opt).ok_or(ZeroOptError)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::validate_strategy;

    fn w(x: u64) -> Weight {
        Weight::from_int(x)
    }

    fn check<G: SearchBound>(graph: &G, q: u64) -> OracleResult {
        let model = CostModel::from_int(q);
        let res = optimal_cost(graph, model, graph.default_cap()).unwrap();
        let report = validate_strategy(graph, &res.witness, model);
        assert!(report.valid);
        assert_eq!(report.total_cost, res.cost);
        res
    }

    #[test]
    fn single_edge() {
        let tree = RootedTree::from_edges(2, 0, &[(0, 1, w(5))]).unwrap();
        assert_eq!(check(&tree, 2).cost, w(7));
    }

    #[test]
    fn c_prime() {
        let ring = Ring::from_ints(&[1, 4, 1], 0).unwrap();
        assert_eq!(check(&ring, 4).cost, w(7));
    }

    #[test]
    fn heavy_star() {
        let tree =
            RootedTree::from_edges(4, 0, &[(0, 1, w(2)), (0, 2, w(2)), (0, 3, w(2))]).unwrap();
        let res = check(&tree, 1);
        assert_eq!(res.cost, w(9));
        assert_eq!(res.witness.agent_count(), 3);
    }

    #[test]
    fn rational_weights() {
        let ring = Ring::new(vec![w(1), w(4), w(1)], 0).unwrap();
        let res = optimal_cost(&ring, CostModel::new(Weight::new(1, 2).unwrap()), 2).unwrap();
        assert_eq!(res.cost, w(3));
        let tree = RootedTree::from_edges(2, 0, &[(0, 1, Weight::new(1, 3).unwrap())]).unwrap();
        let res = optimal_cost(&tree, CostModel::new(Weight::new(1, 2).unwrap()), 1).unwrap();
        assert_eq!(res.cost, Weight::new(5, 6).unwrap());
    }

    #[test]
    fn singleton_needs_an_agent() {
        let res = check(&RootedTree::singleton(), 3);
        assert_eq!(res.cost, w(3));
        assert_eq!(res.witness.agent_count(), 1);
    }

    #[test]
    fn prune_does_not_change_the_answer() {
        let ring = Ring::from_ints(&[3, 1, 2, 2, 1], 0).unwrap();
        let model = CostModel::from_int(1);
        let off = OracleConfig {
            prune: false,
            ..OracleConfig::default()
        };
        let a = optimal_cost(&ring, model, 2).unwrap();
        let b = optimal_cost_with(&ring, model, 2, &off).unwrap();
        assert_eq!(a.cost, b.cost);
        assert!(a.expanded_states <= b.expanded_states);
    }

    #[test]
    fn refusals() {
        let ring = Ring::from_ints(&[1; 13], 0).unwrap();
        assert_eq!(
            optimal_cost(&ring, CostModel::from_int(1), 2).unwrap_err(),
            OracleError::TooLarge { n: 13, limit: 12 }
        );
        let small = Ring::from_ints(&[1; 3], 0).unwrap();
        assert_eq!(
            optimal_cost(&small, CostModel::from_int(1), 0).unwrap_err(),
            OracleError::BadCap
        );
    }

    #[test]
    fn ratios() {
        assert_eq!(competitive_ratio(w(9), w(7)).unwrap(), Rational::new(9, 7));
        assert_eq!(
            competitive_ratio(w(5), w(5)).unwrap(),
            Rational::from_integer(1)
        );
        assert_eq!(competitive_ratio(w(1), Weight::ZERO), Err(ZeroOptError));
    }
}
