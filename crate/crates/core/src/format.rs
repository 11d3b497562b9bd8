//! Graph documents, strategy listings and label dumps.
//!
//! A graph document is JSON:
//! `{"kind": "ring", "n": 3, "edges": [[0, 1, 1, 1], …], "homebase": 0, "q": "4/1"}`,
//! each edge being `[u, v, numerator, denominator]`. Ring edges are listed as
//! `e_0 … e_{n-1}`; tree edges with `u < v`, sorted. `q` is optional.

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, GraphError, StrategyError};
use crate::graph::{Instance, Ring, RootedTree, Topology, VertexId};
use crate::strategy::{strategy_cost, AgentId, CostModel, Move, Strategy};
use crate::tree_offline::{CompressedTree, LabelMap};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    kind: String,
    n: usize,
    edges: Vec<(VertexId, VertexId, i128, i128)>,
    homebase: VertexId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<Weight>,
}

/// An instance together with the `q` its file carries, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub instance: Instance,
    pub q: Option<Weight>,
}

impl GraphFile {
    pub fn new(instance: Instance, q: Option<Weight>) -> Self {
        GraphFile { instance, q }
    }
}

fn edge_row(u: VertexId, v: VertexId, w: Weight) -> (VertexId, VertexId, i128, i128) {
    (u, v, w.numer(), w.denom())
}

/// Serializes to the canonical document; reading it back and writing again gives
/// the same bytes.
pub fn write_graph(file: &GraphFile) -> String {
    let (kind, edges) = match &file.instance {
        Instance::Ring(r) => (
            "ring",
            (0..r.len())
                .map(|i| edge_row(i, r.succ(i), r.weight(i)))
                .collect(),
        ),
        Instance::Tree(t) => (
            "tree",
            t.edge_list()
                .into_iter()
                .map(|(u, v, w)| edge_row(u, v, w))
                .collect(),
        ),
    };
    let doc = GraphDoc {
        kind: kind.to_string(),
        n: file.instance.order(),
        edges,
        homebase: file.instance.homebase(),
        q: file.q,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph documents serialize");
    text.push('\n');
    text
}

pub fn read_graph(text: &str) -> Result<GraphFile, FormatError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let n = doc.n;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for &(u, v, num, den) in &doc.edges {
        if u >= n {
            return Err(GraphError::UnknownVertex(u).into());
        }
        if v >= n {
            return Err(GraphError::UnknownVertex(v).into());
        }
        edges.push((u, v, Weight::new(num, den)?));
    }
    let instance = match doc.kind.as_str() {
        "ring" => Instance::Ring(ring_from_edges(n, doc.homebase, &edges)?),
        "tree" => Instance::Tree(RootedTree::from_edges(n, doc.homebase, &edges)?),
        other => return Err(FormatError::UnknownKind(other.to_string())),
    };
    Ok(GraphFile { instance, q: doc.q })
}

fn ring_from_edges(
    n: usize,
    homebase: VertexId,
    edges: &[(VertexId, VertexId, Weight)],
) -> Result<Ring, GraphError> {
    if n < 3 {
        return Err(GraphError::RingTooSmall(n));
    }
    if edges.len() != n {
        return Err(GraphError::NotARing(format!(
            "{} edges for {} vertices",
            edges.len(),
            n
        )));
    }
    let mut weights: Vec<Option<Weight>> = vec![None; n];
    for &(u, v, w) in edges {
        let index = if (u + 1) % n == v {
            u
        } else if (v + 1) % n == u {
            v
        } else {
            return Err(GraphError::NotARing(format!(
                "{u} and {v} are not consecutive"
            )));
        };
        if weights[index].replace(w).is_some() {
            return Err(GraphError::NotARing(format!("edge {index} listed twice")));
        }
    }
    let weights = weights
        .into_iter()
        .map(|w| w.expect("n distinct edges"))
        .collect();
    Ring::new(weights, homebase)
}

/// `INVOKE a` / `MOVE a from to w` lines followed by `COST c`.
pub fn write_strategy<G: Topology + ?Sized>(
    strategy: &Strategy,
    graph: &G,
    model: CostModel,
) -> Result<String, StrategyError> {
    let cost = strategy_cost(strategy, model, graph)?;
    let mut out = String::new();
    for mv in strategy.moves() {
        match *mv {
            Move::Invoke { agent } => out.push_str(&format!("INVOKE {agent}\n")),
            Move::Traverse { agent, from, to } => {
                let w = graph
                    .edge_weight(from, to)
                    .expect("checked by strategy_cost");
                out.push_str(&format!("MOVE {agent} {from} {to} {w}\n"));
            }
        }
    }
    out.push_str(&format!("COST {cost}\n"));
    Ok(out)
}

/// A parsed strategy listing; `cost` is the `COST` line if present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyListing {
    pub strategy: Strategy,
    pub cost: Option<Weight>,
}

pub fn parse_strategy(text: &str) -> Result<StrategyListing, FormatError> {
    let mut strategy = Strategy::new();
    let mut cost = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let bad = |reason: &str| FormatError::StrategyLine {
            line,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("expected an integer"));
        let agent = |s: &str| -> Result<AgentId, FormatError> {
            match num(s)? {
                0 => Err(bad("agent ids start at 1")),
                a => Ok(AgentId(a as u32)),
            }
        };
        match fields.as_slice() {
            [] => {}
            ["INVOKE", a] => strategy.push(Move::Invoke { agent: agent(a)? }),
            ["MOVE", a, from, to, w] => {
                w.parse::<Weight>().map_err(|_| bad("expected a weight"))?;
                strategy.push(Move::Traverse {
                    agent: agent(a)?,
                    from: num(from)?,
                    to: num(to)?,
                });
            }
            ["COST", c] if cost.is_none() => {
                cost = Some(c.parse::<Weight>().map_err(|_| bad("expected a weight"))?);
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    Ok(StrategyListing { strategy, cost })
}

/// `LABEL v k u_l u_c` per compressed vertex, original ids, `-` for a missing `u_c`.
pub fn write_labels(ctree: &CompressedTree, labels: &LabelMap) -> String {
    let mut out = String::new();
    for (v, label) in labels.iter().enumerate() {
        let u_c = match label.u_c {
            Some(c) => ctree.original_id(c).to_string(),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "LABEL {} {} {} {}\n",
            ctree.original_id(v),
            label.k,
            ctree.original_id(label.u_l),
            u_c
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_offline::ring_offline;
    use crate::tree_offline::cost_expl_with_labels;

    const C_PRIME: &str =
        r#"{"kind":"ring","n":3,"edges":[[0,1,1,1],[1,2,4,1],[2,0,1,1]],"homebase":0,"q":"4/1"}"#;

    #[test]
    fn ring_document_round_trip() {
        let file = read_graph(C_PRIME).unwrap();
        assert_eq!(file.q, Some(Weight::from_int(4)));
        let Instance::Ring(ring) = &file.instance else {
            panic!("not a ring")
        };
        assert_eq!(
            ring.weights(),
            &[
                Weight::from_int(1),
                Weight::from_int(4),
                Weight::from_int(1)
            ]
        );
        let text = write_graph(&file);
        assert_eq!(write_graph(&read_graph(&text).unwrap()), text);
    }

    #[test]
    fn tree_document_round_trip() {
        let tree = RootedTree::from_edges(
            3,
            0,
            &[
                (0, 1, Weight::new(1, 2).unwrap()),
                (1, 2, Weight::from_int(3)),
            ],
        )
        .unwrap();
        let file = GraphFile::new(Instance::Tree(tree), None);
        let text = write_graph(&file);
        assert!(text.contains("\"kind\": \"tree\""));
        assert!(!text.contains("\"q\""));
        let back = read_graph(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(read_graph(""), Err(FormatError::Json(_))));
        let small = r#"{"kind":"ring","n":2,"edges":[[0,1,1,1],[1,0,1,1]],"homebase":0}"#;
        assert!(matches!(
            read_graph(small),
            Err(FormatError::Graph(GraphError::RingTooSmall(2)))
        ));
        let zero = r#"{"kind":"ring","n":3,"edges":[[0,1,1,0],[1,2,1,1],[2,0,1,1]],"homebase":0}"#;
        assert!(matches!(read_graph(zero), Err(FormatError::Weight(_))));
        let chord = r#"{"kind":"ring","n":4,"edges":[[0,2,1,1],[1,2,1,1],[2,3,1,1],[3,0,1,1]],"homebase":0}"#;
        assert!(read_graph(chord).is_err());
        let kind = r#"{"kind":"grid","n":1,"edges":[],"homebase":0}"#;
        assert!(matches!(read_graph(kind), Err(FormatError::UnknownKind(_))));
    }

    #[test]
    fn strategy_listing_round_trip() {
        let Instance::Ring(ring) = read_graph(C_PRIME).unwrap().instance else {
            unreachable!()
        };
        let model = CostModel::from_int(4);
        let s = ring_offline(&ring, model);
        let text = write_strategy(&s, &ring, model).unwrap();
        assert_eq!(
            text,
            "INVOKE 1\nMOVE 1 0 1 1/1\nMOVE 1 1 0 1/1\nMOVE 1 0 2 1/1\nCOST 7/1\n"
        );
        let parsed = parse_strategy(&text).unwrap();
        assert_eq!(parsed.strategy, s);
        assert_eq!(parsed.cost, Some(Weight::from_int(7)));
        assert!(parse_strategy("JUMP 1").is_err());
        assert!(parse_strategy("INVOKE 0").is_err());
    }

    #[test]
    fn label_dump_uses_original_ids() {
        let tree = RootedTree::from_edges(
            4,
            0,
            &[
                (0, 1, Weight::from_int(1)),
                (1, 2, Weight::from_int(1)),
                (1, 3, Weight::from_int(2)),
            ],
        )
        .unwrap();
        let (_, ctree, labels) = cost_expl_with_labels(&tree, CostModel::from_int(1));
        let dump = write_labels(&ctree, &labels);
        assert_eq!(
            dump,
            "LABEL 0 1 3 1\nLABEL 1 1 3 3\nLABEL 2 1 2 -\nLABEL 3 1 3 -\n"
        );
    }
}
