//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::graph::{Topology, VertexId};
use crate::strategy::{validate_strategy, CostModel, Move, Strategy};

/// DOT rendering of `graph`. With a strategy, edges carry traversal counts and
/// vertices their exploration order.
pub fn export_dot<G: Topology + ?Sized>(graph: &G, strategy: Option<&Strategy>) -> String {
    let n = graph.order();
    let mut counts: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    let mut order: Vec<Option<usize>> = vec![None; n];
    if let Some(s) = strategy {
        for mv in s.moves() {
            if let Move::Traverse { from, to, .. } = *mv {
                *counts.entry((from.min(to), from.max(to))).or_default() += 1;
            }
        }
        let report = validate_strategy(graph, s, CostModel::from_int(0));
        let mut visited: Vec<(usize, VertexId)> = report
            .first_visit_step
            .iter()
            .enumerate()
            .filter_map(|(v, step)| step.map(|s| (s, v)))
            .collect();
        visited.sort_unstable();
        for (rank, (_, v)) in visited.into_iter().enumerate() {
            order[v] = Some(rank + 1);
        }
    }

    let mut out = String::from("graph G {\n");
    for (v, rank) in order.iter().enumerate() {
        let shape = if v == graph.homebase() {
            "doublecircle"
        } else {
            "circle"
        };
        match rank {
            Some(r) => writeln!(out, "  {v} [label=\"{v} #{r}\", shape={shape}];"),
            None => writeln!(out, "  {v} [shape={shape}];"),
        }
        .expect("writing to a string");
    }
    for (u, v, w) in graph.edge_list() {
        let label = match (strategy, counts.get(&(u, v))) {
            (None, _) => format!("{w}"),
            (Some(_), Some(c)) => format!("{w} x{c}"),
            (Some(_), None) => format!("{w} x0"),
        };
        writeln!(out, "  {u} -- {v} [label=\"{label}\"];").expect("writing to a string");
    }
    out.push_str("}\n");
    out
}
