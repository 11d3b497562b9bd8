//! Rings, rooted trees and the read-only view the solvers share.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::GraphError;
use crate::weight::Weight;

pub type VertexId = usize;

/// Read access to an undirected edge-weighted graph with a homebase.
pub trait Topology {
    fn order(&self) -> usize;

    fn homebase(&self) -> VertexId;

    /// Weight of the edge `{u, v}`, or `None` when they are not adjacent.
    fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight>;

    /// Incident edges of `v`, sorted by neighbor id.
    fn neighbors(&self, v: VertexId) -> Vec<(VertexId, Weight)>;

    /// Every edge once, as `(u, v, w)` with `u < v`, sorted.
    fn edge_list(&self) -> Vec<(VertexId, VertexId, Weight)>;

    fn total_weight(&self) -> Weight {
        self.edge_list().iter().map(|e| e.2).sum()
    }
}

/// A ring `v_0 … v_{n-1}` where `weights[i]` belongs to `e_i = (v_i, v_{i+1 mod n})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    weights: Vec<Weight>,
    homebase: VertexId,
}

impl Ring {
    pub fn new(weights: Vec<Weight>, homebase: VertexId) -> Result<Self, GraphError> {
        let n = weights.len();
        if n < 3 {
            return Err(GraphError::RingTooSmall(n));
        }
        if let Some(i) = weights.iter().position(|w| w.is_zero()) {
            return Err(GraphError::NonPositiveWeight(i));
        }
        if homebase >= n {
            return Err(GraphError::HomebaseOutOfRange { homebase, n });
        }
        Ok(Ring { weights, homebase })
    }

    pub fn from_ints(weights: &[u64], homebase: VertexId) -> Result<Self, GraphError> {
        Ring::new(
            weights.iter().map(|&w| Weight::from_int(w)).collect(),
            homebase,
        )
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Weight of `e_i`.
    pub fn weight(&self, edge: usize) -> Weight {
        self.weights[edge]
    }

    pub fn succ(&self, v: VertexId) -> VertexId {
        (v + 1) % self.len()
    }

    pub fn pred(&self, v: VertexId) -> VertexId {
        (v + self.len() - 1) % self.len()
    }

    /// Index `i` of the edge `e_i` joining `u` and `v`.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let n = self.len();
        if u >= n || v >= n {
            return None;
        }
        if self.succ(u) == v {
            Some(u)
        } else if self.succ(v) == u {
            Some(v)
        } else {
            None
        }
    }

    /// The same ring with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Ring {
        Ring {
            weights: self.weights.iter().map(|w| w.scale(factor)).collect(),
            homebase: self.homebase,
        }
    }

    /// The same ring seen with `homebase` as vertex 0; vertex `i` of the result is
    /// vertex `homebase + i` of `self`.
    pub fn rotated_to_homebase(&self) -> Ring {
        let n = self.len();
        let weights = (0..n)
            .map(|i| self.weights[(self.homebase + i) % n])
            .collect();
        Ring {
            weights,
            homebase: 0,
        }
    }
}

impl Topology for Ring {
    fn order(&self) -> usize {
        self.len()
    }

    fn homebase(&self) -> VertexId {
        self.homebase
    }

    fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        self.edge_between(u, v).map(|e| self.weights[e])
    }

    fn neighbors(&self, v: VertexId) -> Vec<(VertexId, Weight)> {
        let mut out = vec![
            (self.succ(v), self.weights[v]),
            (self.pred(v), self.weights[self.pred(v)]),
        ];
        out.sort_by_key(|&(u, _)| u);
        out
    }

    fn edge_list(&self) -> Vec<(VertexId, VertexId, Weight)> {
        let mut edges: Vec<_> = (0..self.len())
            .map(|i| {
                let j = self.succ(i);
                (i.min(j), i.max(j), self.weights[i])
            })
            .collect();
        edges.sort_by_key(|&(u, v, _)| (u, v));
        edges
    }

    fn total_weight(&self) -> Weight {
        self.weights.iter().sum()
    }
}

/// A tree rooted at its homebase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    parent_weight: Vec<Weight>,
    children: Vec<Vec<VertexId>>,
}

impl RootedTree {
    /// Single-vertex tree.
    pub fn singleton() -> Self {
        RootedTree {
            root: 0,
            parent: vec![None],
            parent_weight: vec![Weight::ZERO],
            children: vec![Vec::new()],
        }
    }

    /// Builds a tree on vertices `0..n` from undirected edges, oriented away from `root`.
    pub fn from_edges(
        n: usize,
        root: VertexId,
        edges: &[(VertexId, VertexId, Weight)],
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NotATree("no vertices".into()));
        }
        if root >= n {
            return Err(GraphError::HomebaseOutOfRange { homebase: root, n });
        }
        if edges.len() != n - 1 {
            return Err(GraphError::NotATree(format!(
                "{} edges for {} vertices",
                edges.len(),
                n
            )));
        }
        let mut adj: Vec<Vec<(VertexId, Weight)>> = vec![Vec::new(); n];
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n {
                return Err(GraphError::UnknownVertex(u));
            }
            if v >= n {
                return Err(GraphError::UnknownVertex(v));
            }
            if w.is_zero() {
                return Err(GraphError::NonPositiveWeight(i));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        let mut parent = vec![None; n];
        let mut parent_weight = vec![Weight::ZERO; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    parent_weight[v] = w;
                    queue.push_back(v);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(GraphError::NotATree(format!("vertex {v} is unreachable")));
        }
        Self::from_parents(root, parent, parent_weight)
    }

    /// Builds a tree from a parent array; `parent_weight[v]` is the weight of `(parent(v), v)`.
    pub fn from_parents(
        root: VertexId,
        parent: Vec<Option<VertexId>>,
        parent_weight: Vec<Weight>,
    ) -> Result<Self, GraphError> {
        let n = parent.len();
        if n == 0 {
            return Err(GraphError::NotATree("no vertices".into()));
        }
        if root >= n {
            return Err(GraphError::HomebaseOutOfRange { homebase: root, n });
        }
        if parent_weight.len() != n {
            return Err(GraphError::NotATree("weight array length mismatch".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match (*p, v == root) {
                (None, true) => {}
                (Some(_), true) => return Err(GraphError::NotATree("root has a parent".into())),
                (None, false) => {
                    return Err(GraphError::NotATree(format!("vertex {v} has no parent")))
                }
                (Some(p), false) => {
                    if p >= n {
                        return Err(GraphError::UnknownVertex(p));
                    }
                    if parent_weight[v].is_zero() {
                        return Err(GraphError::NonPositiveWeight(v));
                    }
                    children[p].push(v);
                }
            }
        }
        let tree = RootedTree {
            root,
            parent,
            parent_weight,
            children,
        };
        // every vertex must hang below the root; a cycle in the parent array breaks this
        if tree.bfs_order().len() != n {
            return Err(GraphError::NotATree("parent array contains a cycle".into()));
        }
        Ok(tree)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    /// Weight of the edge to the parent; zero at the root.
    pub fn parent_weight(&self, v: VertexId) -> Weight {
        self.parent_weight[v]
    }

    /// Children in ascending id order.
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    /// Vertices in breadth-first order from the root; parents precede children.
    pub fn bfs_order(&self) -> Vec<VertexId> {
        let mut order = Vec::with_capacity(self.len());
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(&self.children[v]);
        }
        order
    }

    /// `d(root, v)` for every vertex.
    pub fn depths(&self) -> Vec<Weight> {
        let mut depth = vec![Weight::ZERO; self.len()];
        for v in self.bfs_order() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + self.parent_weight[v];
            }
        }
        depth
    }

    /// Weighted height: the largest root-to-leaf distance.
    pub fn height(&self) -> Weight {
        self.depths().into_iter().max().unwrap_or(Weight::ZERO)
    }

    /// Vertices on the path from `v` up to the root, `v` first.
    pub fn path_to_root(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    pub fn scaled(&self, factor: u64) -> RootedTree {
        RootedTree {
            parent_weight: self.parent_weight.iter().map(|w| w.scale(factor)).collect(),
            ..self.clone()
        }
    }

    /// Is `v` inside the subtree rooted at `top`?
    pub fn in_subtree(&self, top: VertexId, v: VertexId) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == top {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }
}

impl Topology for RootedTree {
    fn order(&self) -> usize {
        self.len()
    }

    fn homebase(&self) -> VertexId {
        self.root
    }

    fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        if u >= self.len() || v >= self.len() {
            return None;
        }
        if self.parent[v] == Some(u) {
            Some(self.parent_weight[v])
        } else if self.parent[u] == Some(v) {
            Some(self.parent_weight[u])
        } else {
            None
        }
    }

    fn neighbors(&self, v: VertexId) -> Vec<(VertexId, Weight)> {
        let mut out: Vec<_> = self.children[v]
            .iter()
            .map(|&c| (c, self.parent_weight[c]))
            .collect();
        if let Some(p) = self.parent[v] {
            out.push((p, self.parent_weight[v]));
        }
        out.sort_by_key(|&(u, _)| u);
        out
    }

    fn edge_list(&self) -> Vec<(VertexId, VertexId, Weight)> {
        let mut edges: Vec<_> = (0..self.len())
            .filter_map(|v| self.parent[v].map(|p| (p.min(v), p.max(v), self.parent_weight[v])))
            .collect();
        edges.sort_by_key(|&(u, v, _)| (u, v));
        edges
    }

    fn total_weight(&self) -> Weight {
        self.parent_weight.iter().sum()
    }
}

/// Either graph class, as read from a graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Ring(Ring),
    Tree(RootedTree),
}

impl Topology for Instance {
    fn order(&self) -> usize {
        match self {
            Instance::Ring(r) => r.order(),
            Instance::Tree(t) => t.order(),
        }
    }

    fn homebase(&self) -> VertexId {
        match self {
            Instance::Ring(r) => r.homebase(),
            Instance::Tree(t) => t.homebase(),
        }
    }

    fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        match self {
            Instance::Ring(r) => r.edge_weight(u, v),
            Instance::Tree(t) => t.edge_weight(u, v),
        }
    }

    fn neighbors(&self, v: VertexId) -> Vec<(VertexId, Weight)> {
        match self {
            Instance::Ring(r) => r.neighbors(v),
            Instance::Tree(t) => t.neighbors(v),
        }
    }

    fn edge_list(&self) -> Vec<(VertexId, VertexId, Weight)> {
        match self {
            Instance::Ring(r) => r.edge_list(),
            Instance::Tree(t) => t.edge_list(),
        }
    }

    fn total_weight(&self) -> Weight {
        match self {
            Instance::Ring(r) => r.total_weight(),
            Instance::Tree(t) => t.total_weight(),
        }
    }
}

/// Exact shortest-path distances from `source` to every vertex.
pub fn distances_from<G: Topology + ?Sized>(
    graph: &G,
    source: VertexId,
) -> Result<Vec<Weight>, GraphError> {
    let n = graph.order();
    if source >= n {
        return Err(GraphError::UnknownVertex(source));
    }
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(Weight::ZERO);
    heap.push(Reverse((Weight::ZERO, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for (v, w) in graph.neighbors(u) {
            let cand = d + w;
            if dist[v].is_none_or(|cur| cand < cur) {
                dist[v] = Some(cand);
                heap.push(Reverse((cand, v)));
            }
        }
    }
    dist.into_iter()
        .enumerate()
        .map(|(v, d)| d.ok_or(GraphError::UnknownVertex(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: u64) -> Weight {
        Weight::from_int(x)
    }

    #[test]
    fn ring_rejects_small_and_zero() {
        assert_eq!(
            Ring::from_ints(&[1, 1], 0),
            Err(GraphError::RingTooSmall(2))
        );
        assert_eq!(
            Ring::from_ints(&[1, 0, 1], 0),
            Err(GraphError::NonPositiveWeight(1))
        );
        assert!(Ring::from_ints(&[1, 1, 1], 3).is_err());
    }

    #[test]
    fn ring_adjacency() {
        let ring = Ring::from_ints(&[1, 2, 3], 0).unwrap();
        assert_eq!(ring.edge_weight(2, 0), Some(w(3)));
        assert_eq!(ring.edge_weight(0, 1), Some(w(1)));
        let ring4 = Ring::from_ints(&[1, 1, 1, 1], 0).unwrap();
        assert_eq!(ring4.edge_weight(0, 2), None);
    }

    #[test]
    fn tree_distances() {
        let tree = RootedTree::from_edges(2, 0, &[(0, 1, w(3))]).unwrap();
        assert_eq!(distances_from(&tree, 0).unwrap(), vec![w(0), w(3)]);
        assert_eq!(distances_from(&tree, 5), Err(GraphError::UnknownVertex(5)));
    }

    #[test]
    fn ring_distances() {
        let ring = Ring::from_ints(&[1, 1, 1, 1], 0).unwrap();
        assert_eq!(distances_from(&ring, 0).unwrap()[2], w(2));
        // C' = (1, q, 1) with q = 5: arcs from v1 to v2 weigh 5 and 1 + 1
        let c_prime = Ring::from_ints(&[1, 5, 1], 0).unwrap();
        assert_eq!(distances_from(&c_prime, 1).unwrap()[2], w(2));
    }

    #[test]
    fn tree_validation() {
        assert!(RootedTree::from_edges(3, 0, &[(0, 1, w(1))]).is_err());
        assert!(RootedTree::from_edges(3, 0, &[(0, 1, w(1)), (0, 1, w(1))]).is_err());
        assert!(RootedTree::from_edges(2, 0, &[(0, 1, Weight::ZERO)]).is_err());
        assert!(
            RootedTree::from_parents(0, vec![None, Some(2), Some(1)], vec![w(0), w(1), w(1)])
                .is_err()
        );
    }

    #[test]
    fn tree_shape_queries() {
        // r(0) - a(1) - b(2), r - c(3)
        let tree =
            RootedTree::from_edges(4, 0, &[(0, 1, w(1)), (1, 2, w(2)), (0, 3, w(5))]).unwrap();
        assert_eq!(tree.leaves(), vec![2, 3]);
        assert_eq!(tree.height(), w(5));
        assert_eq!(tree.total_weight(), w(8));
        assert_eq!(tree.path_to_root(2), vec![2, 1, 0]);
        assert!(tree.in_subtree(1, 2));
        assert!(!tree.in_subtree(1, 3));
    }
}
