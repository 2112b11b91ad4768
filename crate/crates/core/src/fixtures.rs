//! Small graphs used across tests, benches and the verification suites.

use crate::graph::DefiningGraph;

/// The free group F₂ (two vertices, no edge).
pub fn f2() -> DefiningGraph {
    DefiningGraph::parse(r#"{"vertices":["x","y"],"edges":[]}"#).unwrap()
}

/// The path a - b - c.
pub fn path3() -> DefiningGraph {
    DefiningGraph::parse(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]]}"#).unwrap()
}

/// The 4-cycle a - b - c - d - a.
pub fn cycle4() -> DefiningGraph {
    DefiningGraph::parse(
        r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"],["c","d"],["d","a"]]}"#,
    )
    .unwrap()
}

/// ℤ²: a single edge.
pub fn z2() -> DefiningGraph {
    DefiningGraph::parse(r#"{"vertices":["v","w"],"edges":[["v","w"]]}"#).unwrap()
}

/// All simple graphs on 1..=4 vertices (every labelled edge set, so every
/// isomorphism type appears).
pub fn graphs_up_to_4() -> Vec<DefiningGraph> {
    let mut out = Vec::new();
    let names = ["a", "b", "c", "d"];
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0..(1u32 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &p)| p)
                .collect();
            let g = DefiningGraph::new(
                names[..n].iter().map(|s| s.to_string()).collect(),
                &edges,
            )
            .unwrap();
            out.push(g);
        }
    }
    out
}
