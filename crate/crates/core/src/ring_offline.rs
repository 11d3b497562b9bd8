//! Optimal exploration of a fully known ring.
//!
//! Exactly one edge of the ring is never traversed. For each candidate edge the
//! remaining path is explored either by one agent (boundary cuts, or an interior cut
//! where the agent first clears the shorter arm and walks back) or by two agents
//! walking both arms. Prefix sums keep the whole analysis linear.

use crate::graph::{Ring, Topology, VertexId};
use crate::strategy::{CostModel, Strategy};
use crate::weight::Weight;

/// Per-cut costs for a ring relabeled so that the homebase is vertex 0.
///
/// Edge and vertex indices are relative to the homebase: vertex `i` here is vertex
/// `homebase + i (mod n)` of the input ring, see [`RingCutAnalysis::to_original`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingCutAnalysis {
    pub homebase: VertexId,
    /// `costs[i]`: optimal cost when `e_i` is the omitted edge.
    pub costs: Vec<Weight>,
    /// Closer end of the path `C \ e_i` for interior cuts.
    pub near: Vec<Option<VertexId>>,
    /// Farther end of the path `C \ e_i` for interior cuts.
    pub far: Vec<Option<VertexId>>,
    /// Whether the interior cut is cheaper with two agents (strict).
    pub two_agents: Vec<bool>,
    pub best_index: usize,
}

impl RingCutAnalysis {
    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn best_cost(&self) -> Weight {
        self.costs[self.best_index]
    }

    pub fn to_original(&self, v: VertexId) -> VertexId {
        (v + self.homebase) % self.len()
    }

    /// Index in the input ring of the omitted edge.
    pub fn best_edge_original(&self) -> usize {
        self.to_original(self.best_index)
    }
}

pub fn analyze_cuts(ring: &Ring, model: CostModel) -> RingCutAnalysis {
    let rotated = ring.rotated_to_homebase();
    let w = rotated.weights();
    let n = w.len();
    let q = model.q;

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Weight::ZERO);
    for &x in w {
        let last = *prefix.last().unwrap();
        prefix.push(last + x);
    }
    let total = prefix[n];

    let mut costs = Vec::with_capacity(n);
    let mut near = vec![None; n];
    let mut far = vec![None; n];
    let mut two_agents = vec![false; n];
    for i in 0..n {
        let rest = total - w[i];
        if i == 0 || i == n - 1 {
            costs.push(q + rest);
            continue;
        }
        // clockwise arm ends at v_i, counter-clockwise arm at v_{i+1}
        let to_cw_end = prefix[i];
        let to_ccw_end = total - prefix[i + 1];
        let (close, away, d_close) = if to_cw_end <= to_ccw_end {
            (i, i + 1, to_cw_end)
        } else {
            (i + 1, i, to_ccw_end)
        };
        near[i] = Some(close);
        far[i] = Some(away);
        let two = q + q + rest;
        let one = q + d_close + rest;
        two_agents[i] = two < one;
        costs.push(two.min(one));
    }

    let best_index = costs
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .map(|(i, _)| i)
        .unwrap_or(0);

    RingCutAnalysis {
        homebase: ring.homebase(),
        costs,
        near,
        far,
        two_agents,
        best_index,
    }
}

/// Path from vertex 0 to `target` in `C \ e_cut` (relative labels).
fn arm(n: usize, cut: usize, target: VertexId) -> Vec<VertexId> {
    if target <= cut {
        (0..=target).collect()
    } else {
        std::iter::once(0).chain((target..n).rev()).collect()
    }
}

/// Emits the optimal strategy, labeled with the input ring's vertex ids.
pub fn ring_offline(ring: &Ring, model: CostModel) -> Strategy {
    let analysis = analyze_cuts(ring, model);
    let n = ring.len();
    let i = analysis.best_index;
    let mut s = Strategy::new();
    let a1 = s.invoke();
    if i == 0 {
        let path: Vec<_> = std::iter::once(0).chain((1..n).rev()).collect();
        s.walk(a1, &path);
    } else if i == n - 1 {
        let path: Vec<_> = (0..n).collect();
        s.walk(a1, &path);
    } else {
        let near = analysis.near[i].expect("interior cut has a near end");
        let far = analysis.far[i].expect("interior cut has a far end");
        let to_near = arm(n, i, near);
        let to_far = arm(n, i, far);
        s.walk(a1, &to_near);
        if analysis.two_agents[i] {
            let a2 = s.invoke();
            s.walk(a2, &to_far);
        } else {
            let back: Vec<_> = to_near.iter().rev().copied().collect();
            s.walk(a1, &back);
            s.walk(a1, &to_far);
        }
    }
    s.relabeled(|v| analysis.to_original(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::validate_strategy;

    fn w(x: u64) -> Weight {
        Weight::from_int(x)
    }

    #[test]
    fn c_prime_cut_costs() {
        let ring = Ring::from_ints(&[1, 4, 1], 0).unwrap();
        let a = analyze_cuts(&ring, CostModel::from_int(4));
        assert_eq!(a.costs, vec![w(9), w(7), w(9)]);
        assert_eq!(a.best_index, 1);
        assert_eq!(a.near[1], Some(1));
        assert!(!a.two_agents[1]);
    }

    #[test]
    fn unit_square_large_q() {
        let ring = Ring::from_ints(&[1, 1, 1, 1], 0).unwrap();
        let a = analyze_cuts(&ring, CostModel::from_int(10));
        assert_eq!(a.costs, vec![w(13), w(14), w(14), w(13)]);
        assert_eq!(a.best_index, 0);
        let s = ring_offline(&ring, CostModel::from_int(10));
        assert_eq!(s.agent_walks(0), vec![vec![0, 3, 2, 1]]);
    }

    #[test]
    fn triangle_zero_q_ties_to_first() {
        let ring = Ring::from_ints(&[1, 1, 1], 0).unwrap();
        let a = analyze_cuts(&ring, CostModel::from_int(0));
        assert_eq!(a.costs, vec![w(2), w(2), w(2)]);
        assert_eq!(a.best_index, 0);
    }

    #[test]
    fn c_prime_single_agent_doubles_back() {
        let ring = Ring::from_ints(&[1, 4, 1], 0).unwrap();
        let model = CostModel::from_int(4);
        let s = ring_offline(&ring, model);
        assert_eq!(s.agent_walks(0), vec![vec![0, 1, 0, 2]]);
        let report = validate_strategy(&ring, &s, model);
        assert!(report.valid);
        assert_eq!(report.total_cost, w(7));
    }

    #[test]
    fn cheap_agents_split_the_ring() {
        let ring = Ring::from_ints(&[1, 4, 1], 0).unwrap();
        let model = CostModel::new(Weight::new(1, 2).unwrap());
        let s = ring_offline(&ring, model);
        assert_eq!(s.agent_walks(0), vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(validate_strategy(&ring, &s, model).total_cost, w(3));
    }

    #[test]
    fn equality_keeps_one_agent() {
        // q == d(v0, v_min): one agent and two agents cost the same
        let ring = Ring::from_ints(&[2, 9, 2], 0).unwrap();
        let a = analyze_cuts(&ring, CostModel::from_int(2));
        assert_eq!(a.best_index, 1);
        assert!(!a.two_agents[1]);
    }

    #[test]
    fn homebase_is_relabeled() {
        // C' with the homebase moved to vertex 2
        let ring = Ring::from_ints(&[4, 1, 1], 2).unwrap();
        let model = CostModel::from_int(4);
        let s = ring_offline(&ring, model);
        let report = validate_strategy(&ring, &s, model);
        assert!(report.valid);
        assert_eq!(report.total_cost, w(7));
        assert_eq!(analyze_cuts(&ring, model).best_edge_original(), 0);
    }
}
