//! Optimal exploration of a fully known tree in linear time.
//!
//! Chains of single-child vertices are contracted first, since an agent entering a
//! chain always walks it to the end. A bottom-up pass then labels every vertex with
//! the number of agents its subtree needs, and a top-down pass turns the labels into
//! moves. An agent leaving a single-agent subtree walks back to reuse it only when the
//! walk is no dearer than calling a fresh agent from the root.

use crate::error::LabelError;
use crate::graph::{RootedTree, Topology, VertexId};
use crate::strategy::{AgentId, CostModel, Move, Strategy};
use crate::weight::Weight;

/// A tree without single-child vertices below the root, plus the way back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedTree {
    tree: RootedTree,
    /// Original id of each compressed vertex; ascending.
    original: Vec<VertexId>,
    /// Original path from the parent of each compressed vertex down to it.
    paths: Vec<Vec<VertexId>>,
}

impl CompressedTree {
    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn original_id(&self, v: VertexId) -> VertexId {
        self.original[v]
    }

    /// Original vertices of the compressed edge above `v`, parent end first.
    pub fn expansion(&self, v: VertexId) -> &[VertexId] {
        &self.paths[v]
    }

    /// Original path walked by a traversal of the compressed edge `{from, to}`.
    pub fn expand_edge(&self, from: VertexId, to: VertexId) -> Vec<VertexId> {
        if self.tree.parent(to) == Some(from) {
            self.paths[to].clone()
        } else {
            self.paths[from].iter().rev().copied().collect()
        }
    }

    /// Rewrites a strategy on the compressed tree into one on the original tree.
    pub fn expand_strategy(&self, strategy: &Strategy) -> Strategy {
        let mut out = Strategy::new();
        for mv in strategy.moves() {
            match *mv {
                Move::Invoke { agent } => out.push(Move::Invoke { agent }),
                Move::Traverse { agent, from, to } => {
                    out.walk(agent, &self.expand_edge(from, to));
                }
            }
        }
        out
    }
}

/// Contracts every maximal chain of single-child vertices into one edge.
pub fn compress(tree: &RootedTree) -> CompressedTree {
    let n = tree.len();
    let root = tree.root();
    let keep: Vec<bool> = (0..n)
        .map(|v| v == root || tree.children(v).len() != 1)
        .collect();
    let mut new_id = vec![usize::MAX; n];
    let mut original = Vec::new();
    for v in 0..n {
        if keep[v] {
            new_id[v] = original.len();
            original.push(v);
        }
    }
    let m = original.len();
    let mut parent = vec![None; m];
    let mut weight = vec![Weight::ZERO; m];
    let mut paths = vec![Vec::new(); m];
    for (id, &v) in original.iter().enumerate() {
        if v == root {
            continue;
        }
        let mut path = vec![v];
        let mut total = Weight::ZERO;
        let mut cur = v;
        while let Some(p) = tree.parent(cur) {
            total += tree.parent_weight(cur);
            path.push(p);
            cur = p;
            if keep[p] {
                break;
            }
        }
        path.reverse();
        parent[id] = Some(new_id[cur]);
        weight[id] = total;
        paths[id] = path;
    }
    let tree = RootedTree::from_parents(new_id[root], parent, weight)
        .expect("contraction of a tree is a tree");
    CompressedTree {
        tree,
        original,
        paths,
    }
}

/// Per-vertex labeling of the subtree below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    /// Agents needed to explore the subtree.
    pub k: usize,
    /// Furthest leaf of the subtree; smallest id on ties.
    pub u_l: VertexId,
    /// Child whose subtree holds `u_l`; `None` at leaves.
    pub u_c: Option<VertexId>,
    /// `d(v, u_l)`.
    pub reach: Weight,
}

pub type LabelMap = Vec<Label>;

pub fn set_labeling(ctree: &CompressedTree, model: CostModel) -> LabelMap {
    let tree = &ctree.tree;
    let depth = tree.depths();
    let order = tree.bfs_order();
    let mut labels = vec![
        Label {
            k: 1,
            u_l: 0,
            u_c: None,
            reach: Weight::ZERO,
        };
        tree.len()
    ];
    for &v in order.iter().rev() {
        if tree.is_leaf(v) {
            labels[v].u_l = v;
            continue;
        }
        let budget = depth[v] + model.q;
        let mut k = 0usize;
        let mut reduce = 0usize;
        let mut best: Option<(Weight, VertexId, VertexId)> = None;
        for &u in tree.children(v) {
            let lu = labels[u];
            let dist = tree.parent_weight(u) + lu.reach;
            k += lu.k;
            if lu.k == 1 && dist <= budget {
                reduce += 1;
            }
            let better = match best {
                None => true,
                Some((d, leaf, _)) => dist > d || (dist == d && lu.u_l < leaf),
            };
            if better {
                best = Some((dist, lu.u_l, u));
            }
        }
        let (reach, u_l, u_c) = best.expect("internal vertex has children");
        labels[v] = Label {
            k: k.saturating_sub(reduce).max(1),
            u_l,
            u_c: Some(u_c),
            reach,
        };
    }
    labels
}

/// Does the single agent of `child`'s subtree walk back to `v`?
fn returns(
    tree: &RootedTree,
    labels: &LabelMap,
    depth: &[Weight],
    model: CostModel,
    v: VertexId,
    child: VertexId,
) -> bool {
    let lc = labels[child];
    lc.k == 1
        && Some(child) != labels[v].u_c
        && tree.parent_weight(child) + lc.reach <= depth[v] + model.q
}

struct Frame {
    v: VertexId,
    pool: Vec<AgentId>,
    order: Vec<VertexId>,
    next: usize,
    /// Child just finished and the agents sent into it.
    pending: Option<(VertexId, Vec<AgentId>)>,
}

/// Emits moves on the compressed tree following `labels`.
pub fn set_strategy(
    ctree: &CompressedTree,
    model: CostModel,
    labels: &LabelMap,
) -> Result<Strategy, LabelError> {
    let tree = &ctree.tree;
    let n = tree.len();
    if labels.len() != n {
        return Err(LabelError::SizeMismatch {
            labels: labels.len(),
            vertices: n,
        });
    }
    let depth = tree.depths();
    let root = tree.root();
    let mut s = Strategy::new();
    let pool: Vec<AgentId> = (0..labels[root].k).map(|_| s.invoke()).collect();
    let mut position = vec![root; pool.len()];

    let frame = |v: VertexId, pool: Vec<AgentId>| -> Result<Frame, LabelError> {
        if pool.len() != labels[v].k {
            return Err(LabelError::Inconsistent(v));
        }
        let last = labels[v].u_c;
        let mut order: Vec<VertexId> = tree
            .children(v)
            .iter()
            .copied()
            .filter(|&c| Some(c) != last)
            .collect();
        order.extend(last);
        Ok(Frame {
            v,
            pool,
            order,
            next: 0,
            pending: None,
        })
    };

    let mut stack = vec![frame(root, pool)?];
    while let Some(top) = stack.last_mut() {
        let v = top.v;
        if let Some((child, group)) = top.pending.take() {
            if group.len() == 1 && returns(tree, labels, &depth, model, v, child) {
                let agent = group[0];
                let at = position[agent.index()];
                if at != labels[child].u_l {
                    return Err(LabelError::Inconsistent(child));
                }
                let mut cur = at;
                while cur != v {
                    let up = tree.parent(cur).ok_or(LabelError::Inconsistent(child))?;
                    s.traverse(agent, cur, up);
                    cur = up;
                }
                position[agent.index()] = v;
                let slot = top.pool.partition_point(|&a| a < agent);
                top.pool.insert(slot, agent);
            }
        }
        if top.next == top.order.len() {
            let done = stack.pop().expect("non-empty");
            if done.order.is_empty() && done.pool.len() != 1 {
                return Err(LabelError::Inconsistent(done.v));
            }
            if !done.order.is_empty() && !done.pool.is_empty() {
                return Err(LabelError::Inconsistent(done.v));
            }
            continue;
        }
        let child = top.order[top.next];
        top.next += 1;
        let want = labels[child].k;
        if want > top.pool.len() {
            return Err(LabelError::Inconsistent(v));
        }
        let group: Vec<AgentId> = top.pool.drain(..want).collect();
        for &agent in &group {
            s.traverse(agent, v, child);
            position[agent.index()] = child;
        }
        top.pending = Some((child, group.clone()));
        let next = frame(child, group)?;
        stack.push(next);
    }
    Ok(s)
}

/// Optimal strategy for `tree`, in original vertex ids.
pub fn cost_expl(tree: &RootedTree, model: CostModel) -> Strategy {
    cost_expl_with_labels(tree, model).0
}

/// [`cost_expl`] plus the compressed tree and labeling it was built from.
pub fn cost_expl_with_labels(
    tree: &RootedTree,
    model: CostModel,
) -> (Strategy, CompressedTree, LabelMap) {
    let ctree = compress(tree);
    let labels = set_labeling(&ctree, model);
    let strategy = set_strategy(&ctree, model, &labels).expect("labels come from set_labeling");
    (ctree.expand_strategy(&strategy), ctree, labels)
}

/// `(q + w(T), q + 2w(T) - H)`.
pub fn cost_bounds(tree: &RootedTree, model: CostModel) -> (Weight, Weight) {
    let w = tree.total_weight();
    let lower = model.q + w;
    let upper = model.q + w + w - tree.height();
    (lower, upper)
}
