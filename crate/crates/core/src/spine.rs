//! Enumeration of roses below a norm bound, stars of roses as posets of
//! ideal forests, and deterministic JSON/DOT export.

use crate::complex::{build_blowup, collapse, treelike_sets, CubeComplex, EdgeLabel};
use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::partition::{relation, GwPartition};
use crate::rose::{
    is_reductive, minimal_norm0, partitions_of, rose_equal, MarkedRose, Reductivity,
};
use crate::word::Letter;
use serde_json::{json, Value};
use std::collections::HashMap;

pub struct RoseNode {
    pub rose: MarkedRose,
    pub norm0: u64,
}

pub struct RoseEdge {
    pub from: usize,
    pub to: usize,
    pub partition: GwPartition,
    pub m: Letter,
    pub delta0: i64,
}

/// The rose/move graph below a norm0 bound, grown by BFS from the identity.
pub struct RoseGraph {
    pub nodes: Vec<RoseNode>,
    pub edges: Vec<RoseEdge>,
}

pub fn enumerate_roses(g: &DefiningGraph, bound: u64) -> Result<RoseGraph, Error> {
    let id = MarkedRose::identity(g);
    if bound < id.norm0() {
        return Err(Error::Precondition(format!(
            "bound {bound} is below the minimal norm {}",
            id.norm0()
        )));
    }
    let parts = partitions_of(g);
    let mut nodes = vec![RoseNode { norm0: id.norm0(), rose: id }];
    let mut by_key: HashMap<(u64, Vec<u32>), Vec<usize>> = HashMap::new();
    by_key.insert(nodes[0].rose.key(), vec![0]);
    let mut edges = Vec::new();
    let mut frontier = std::collections::VecDeque::from([0usize]);
    while let Some(i) = frontier.pop_front() {
        let cur = nodes[i].rose.clone();
        for part in parts.iter() {
            if part.is_degenerate() {
                continue;
            }
            for m in part.move_letters(g) {
                let (next, delta) = cur.whitehead_move(part, m).expect("valid move");
                if next.norm0() > bound {
                    continue;
                }
                let key = next.key();
                let bucket = by_key.entry(key).or_default();
                let found = bucket
                    .iter()
                    .copied()
                    .find(|&j| rose_equal(&nodes[j].rose, &next));
                let j = match found {
                    Some(j) => j,
                    None => {
                        let j = nodes.len();
                        nodes.push(RoseNode { norm0: next.norm0(), rose: next });
                        by_key.get_mut(&nodes[j].rose.key()).unwrap().push(j);
                        frontier.push_back(j);
                        j
                    }
                };
                if j != i {
                    edges.push(RoseEdge {
                        from: i,
                        to: j,
                        partition: part.clone(),
                        m,
                        delta0: delta.delta0,
                    });
                }
            }
        }
    }
    Ok(RoseGraph { nodes, edges })
}

/// One element of the star poset: a pairwise compatible set of partitions.
pub struct ForestNode {
    /// Indices into the partition list used by the poset.
    pub partitions: Vec<usize>,
    pub all_reductive: bool,
}

pub struct StarPoset {
    pub partitions: Vec<GwPartition>,
    pub reductive: Vec<bool>,
    pub elements: Vec<ForestNode>,
}

pub const DEFAULT_POSET_CAP: usize = 100_000;

/// All nonempty pairwise-compatible subsets of the (optionally σ-reductive)
/// partitions, ordered by (size, indices). Aborts above the cap.
pub fn star_poset(
    g: &DefiningGraph,
    rose: &MarkedRose,
    reductive_only: bool,
    cap: usize,
) -> Result<StarPoset, Error> {
    let all = partitions_of(g);
    let mut partitions = Vec::new();
    let mut reductive = Vec::new();
    for p in all.iter() {
        if p.is_degenerate() {
            continue;
        }
        let red = is_reductive(rose, p)? != Reductivity::Not;
        if reductive_only && !red {
            continue;
        }
        partitions.push(p.clone());
        reductive.push(red);
    }
    let n = partitions.len();
    let compat: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && relation(g, &partitions[i], &partitions[j]).is_compatible())
                .collect()
        })
        .collect();
    let mut elements: Vec<ForestNode> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    stack.reverse();
    while let Some(cur) = stack.pop() {
        if elements.len() >= cap {
            return Err(Error::Other(format!(
                "star poset exceeded the element cap {cap} ({} partitions)",
                n
            )));
        }
        let all_red = cur.iter().all(|&i| reductive[i]);
        // Extend by larger indices to enumerate each subset once.
        let last = *cur.last().unwrap();
        for next in last + 1..n {
            if cur.iter().all(|&i| compat[i][next]) {
                let mut ext = cur.clone();
                ext.push(next);
                stack.push(ext);
            }
        }
        elements.push(ForestNode { partitions: cur, all_reductive: all_red });
    }
    elements.sort_by(|a, b| {
        (a.partitions.len(), &a.partitions).cmp(&(b.partitions.len(), &b.partitions))
    });
    Ok(StarPoset { partitions, reductive, elements })
}

impl StarPoset {
    /// The blowup of one element.
    pub fn blowup(&self, g: &DefiningGraph, element: usize) -> Result<CubeComplex, Error> {
        let parts: Vec<GwPartition> = self.elements[element]
            .partitions
            .iter()
            .map(|&i| self.partitions[i].clone())
            .collect();
        build_blowup(g, &parts)
    }

    /// Tree-like collapses available from one element.
    pub fn treelike_collapses(
        &self,
        g: &DefiningGraph,
        element: usize,
    ) -> Result<Vec<CubeComplex>, Error> {
        let parts: Vec<GwPartition> = self.elements[element]
            .partitions
            .iter()
            .map(|&i| self.partitions[i].clone())
            .collect();
        let x = build_blowup(g, &parts)?;
        let (_, sets) = treelike_sets(g, &parts)?;
        sets.iter()
            .map(|s| collapse(&x, &s.iter().copied().collect::<Vec<_>>()))
            .collect()
    }

    /// Hasse covers: add-one-partition inclusions.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                if b.partitions.len() == a.partitions.len() + 1
                    && a.partitions.iter().all(|p| b.partitions.contains(p))
                {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn rose_graph_json(g: &DefiningGraph, rg: &RoseGraph) -> Value {
    let nodes: Vec<Value> = rg
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            json!({
                "id": i,
                "norm0": n.norm0,
                "lengths": n.rose.short_class_lengths(),
                "marking_inverse": crate::wire::images_json(g, &n.rose.rho.images),
            })
        })
        .collect();
    let edges: Vec<Value> = rg
        .edges
        .iter()
        .map(|e| {
            json!({
                "from": e.from,
                "to": e.to,
                "partition": crate::wire::partition_json(g, &e.partition),
                "m": crate::wire::letter_json(g, e.m),
                "delta0": e.delta0,
            })
        })
        .collect();
    json!({
        "minimal_norm0": minimal_norm0(g),
        "nodes": nodes,
        "edges": edges,
    })
}

fn digest(lengths: &[u32]) -> String {
    // Small stable digest of the length profile.
    let mut h: u64 = 0xcbf29ce484222325;
    for &l in lengths {
        h ^= l as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

pub fn rose_graph_dot(rg: &RoseGraph) -> String {
    let mut s = String::from("digraph roses {\n");
    for (i, n) in rg.nodes.iter().enumerate() {
        s.push_str(&format!(
            "  n{i} [label=\"#{i} norm0={} {}\"];\n",
            n.norm0,
            digest(&n.rose.short_class_lengths())
        ));
    }
    for e in &rg.edges {
        s.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", e.from, e.to, e.delta0));
    }
    s.push_str("}\n");
    s
}

pub fn star_poset_json(g: &DefiningGraph, sp: &StarPoset) -> Value {
    json!({
        "partitions": sp.partitions.iter().map(|p| crate::wire::partition_json(g, p)).collect::<Vec<_>>(),
        "reductive": sp.reductive,
        "elements": sp.elements.iter().map(|e| json!({
            "partitions": e.partitions,
            "all_reductive": e.all_reductive,
        })).collect::<Vec<_>>(),
        "covers": sp.covers(),
    })
}

pub fn star_poset_dot(sp: &StarPoset) -> String {
    let mut s = String::from("digraph star {\n");
    for (i, e) in sp.elements.iter().enumerate() {
        let label: Vec<String> = e.partitions.iter().map(|p| format!("P{p}")).collect();
        s.push_str(&format!(
            "  f{i} [label=\"{{{}}}{}\"];\n",
            label.join(","),
            if e.all_reductive { " R" } else { "" }
        ));
    }
    for (a, b) in sp.covers() {
        s.push_str(&format!("  f{a} -> f{b};\n"));
    }
    s.push_str("}\n");
    s
}

/// The complex dump used by the CLI; deterministic field order.
pub fn complex_json(x: &CubeComplex) -> Value {
    let label = |l: EdgeLabel| match l {
        EdgeLabel::Gen(v) => json!({ "gen": v }),
        EdgeLabel::Part(i) => json!({ "partition": i }),
    };
    json!({
        "vertices": (0..x.n_vertices).collect::<Vec<_>>(),
        "edges": x.edges.iter().map(|e| json!({
            "from": e.from,
            "to": e.to,
            "label": label(e.label),
            "orientation": "+",
        })).collect::<Vec<_>>(),
        "squares": x.squares.iter().map(|s| json!(s.e)).collect::<Vec<_>>(),
    })
}

pub fn complex_dot(x: &CubeComplex) -> String {
    let mut s = String::from("digraph complex {\n");
    for v in 0..x.n_vertices {
        s.push_str(&format!("  v{v};\n"));
    }
    for e in &x.edges {
        let label = match e.label {
            EdgeLabel::Gen(v) => format!("e{v}"),
            EdgeLabel::Part(i) => format!("eP{i}"),
        };
        s.push_str(&format!("  v{} -> v{} [label=\"{}\"];\n", e.from, e.to, label));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rose::find_strongly_reductive;

    #[test]
    fn bfs_at_minimum_is_single_node() {
        for g in [fixtures::f2(), fixtures::path3()] {
            let rg = enumerate_roses(&g, minimal_norm0(&g)).unwrap();
            assert_eq!(rg.nodes.len(), 1);
        }
    }

    #[test]
    fn bfs_below_minimum_errors() {
        let g = fixtures::f2();
        assert!(enumerate_roses(&g, minimal_norm0(&g) - 1).is_err());
    }

    #[test]
    fn bfs_f2_small_bound() {
        let g = fixtures::f2();
        // The nearest roses to the identity sit at norm0 + 6, so the +4
        // graph is the single minimal node (frozen regression value).
        let rg = enumerate_roses(&g, minimal_norm0(&g) + 4).unwrap();
        assert_eq!(rg.nodes.len(), 1);
        let rg = enumerate_roses(&g, minimal_norm0(&g) + 6).unwrap();
        assert!(rg.nodes.len() > 1);
        // Every non-minimal node has a strongly reductive move.
        for n in &rg.nodes {
            if n.norm0 > minimal_norm0(&g) {
                assert!(find_strongly_reductive(&n.rose).is_some());
            }
        }
    }

    #[test]
    fn star_poset_identity() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        let sp = star_poset(&g, &id, true, DEFAULT_POSET_CAP).unwrap();
        assert!(sp.elements.is_empty());
        let sp = star_poset(&g, &id, false, DEFAULT_POSET_CAP).unwrap();
        assert!(!sp.elements.is_empty());
        // Closed under nonempty subsets.
        for e in &sp.elements {
            if e.partitions.len() > 1 {
                for drop in 0..e.partitions.len() {
                    let sub: Vec<usize> = e
                        .partitions
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != drop)
                        .map(|(_, &p)| p)
                        .collect();
                    assert!(sp.elements.iter().any(|f| f.partitions == sub));
                }
            }
        }
    }

    #[test]
    fn export_roundtrip_is_stable() {
        let g = fixtures::f2();
        let rg = enumerate_roses(&g, minimal_norm0(&g)).unwrap();
        let j1 = rose_graph_json(&g, &rg).to_string();
        let parsed: Value = serde_json::from_str(&j1).unwrap();
        assert_eq!(parsed.to_string(), j1);
        let dot = rose_graph_dot(&rg);
        assert!(dot.contains("n0"));
    }
}
