#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use teamcost::instances::{derive_seed, seeded_rng};
use teamcost::{CostModel, Move, Ring, RootedTree, Strategy, Topology, VertexId, Weight};

pub fn w(x: u64) -> Weight {
    Weight::from_int(x)
}

pub fn model(q: u64) -> CostModel {
    CostModel::from_int(q)
}

/// Canonical AHU string of the subtree below `v` in a parent array.
fn canon(children: &[Vec<usize>], v: usize) -> String {
    let mut parts: Vec<String> = children[v].iter().map(|&c| canon(children, c)).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Every rooted unlabeled tree on `n` vertices, as parent arrays with `parent[i] < i`.
pub fn tree_shapes(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, parents: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parents.len() + 1 == n {
            out.push(parents.clone());
            return;
        }
        let i = parents.len() + 1;
        for p in 0..i {
            parents.push(p);
            extend(n, parents, out);
            parents.pop();
        }
    }
    let mut all = Vec::new();
    extend(n, &mut Vec::new(), &mut all);
    let mut seen = BTreeSet::new();
    all.into_iter()
        .filter(|parents| {
            let mut children = vec![Vec::new(); n];
            for (i, &p) in parents.iter().enumerate() {
                children[p].push(i + 1);
            }
            seen.insert(canon(&children, 0))
        })
        .collect()
}

/// Tree from a shape (parents of vertices `1..n`) and the matching edge weights.
pub fn tree_from_shape(parents: &[usize], weights: &[u64]) -> RootedTree {
    let parent = std::iter::once(None)
        .chain(parents.iter().map(|&p| Some(p)))
        .collect();
    let pw = std::iter::once(Weight::ZERO)
        .chain(weights.iter().map(|&x| w(x)))
        .collect();
    RootedTree::from_parents(0, parent, pw).unwrap()
}

/// Every vector of length `len` over `alphabet`.
pub fn all_words(alphabet: &[u64], len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |&a| {
                    let mut next = prefix.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    out
}

/// Rings of order 3..=7 over weights {1, 2, 3}: exhaustive up to 5, 500 seeded draws for 6 and 7.
pub fn small_rings() -> Vec<Ring> {
    let mut rings = Vec::new();
    for n in 3..=5 {
        for ws in all_words(&[1, 2, 3], n) {
            rings.push(Ring::from_ints(&ws, 0).unwrap());
        }
    }
    for n in 6..=7u64 {
        let mut rng = seeded_rng(derive_seed(2024, n, 0));
        for _ in 0..500 {
            let ws: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            rings.push(Ring::from_ints(&ws, 0).unwrap());
        }
    }
    rings
}

/// Final vertex of every agent.
pub fn final_positions(strategy: &Strategy, homebase: VertexId) -> Vec<VertexId> {
    strategy
        .agent_walks(homebase)
        .iter()
        .map(|walk| *walk.last().unwrap())
        .collect()
}

/// Agents that stop somewhere other than a leaf.
pub fn agents_off_leaves(tree: &RootedTree, strategy: &Strategy) -> usize {
    if tree.len() == 1 {
        return 0;
    }
    final_positions(strategy, tree.root())
        .into_iter()
        .filter(|&v| !tree.is_leaf(v))
        .count()
}

/// Moves where an agent steps back into a subtree it already climbed out of.
pub fn subtree_reentries(tree: &RootedTree, strategy: &Strategy) -> usize {
    let mut left: Vec<Vec<bool>> = Vec::new();
    let mut bad = 0;
    for mv in strategy.moves() {
        match *mv {
            Move::Invoke { .. } => left.push(vec![false; tree.len()]),
            Move::Traverse { agent, from, to } => {
                let mine = &mut left[agent.index()];
                if tree.parent(from) == Some(to) {
                    mine[from] = true;
                } else if mine[to] {
                    bad += 1;
                }
            }
        }
    }
    bad
}

pub fn is_ring_edge_set(graph: &impl Topology) -> bool {
    (0..graph.order()).all(|v| graph.neighbors(v).len() == 2)
}
