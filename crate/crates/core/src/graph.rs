//! Defining graphs and the vertex partial order `v <= w` given by
//! `lk(v) ⊆ st(w)`.

use crate::error::Error;
use serde::Deserialize;
use std::fmt;

/// Maximum number of vertices; letter sets are stored in a `u64`.
pub const MAX_VERTICES: usize = 32;

/// A finite simple graph with a fixed vertex order.
///
/// The vertex order is the declaration order of the input and is used for
/// every canonical ordering downstream (letters, words, conjugacy classes,
/// partition enumeration).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DefiningGraph {
    names: Vec<String>,
    adj: Vec<u32>,
}

#[derive(Deserialize)]
struct WireGraph {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

impl DefiningGraph {
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, Error> {
        if names.len() > MAX_VERTICES {
            return Err(Error::Parse(format!(
                "too many vertices ({}, max {})",
                names.len(),
                MAX_VERTICES
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Parse(format!("duplicate vertex {n:?}")));
            }
        }
        let mut adj = vec![0u32; names.len()];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Parse(format!("self-loop at {:?}", names[a])));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(DefiningGraph { names, adj })
    }

    /// Parse the JSON form `{"vertices":[...],"edges":[["a","b"],...]}`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let wire: WireGraph =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph json: {e}")))?;
        let mut edges = Vec::new();
        for (a, b) in &wire.edges {
            let ia = wire
                .vertices
                .iter()
                .position(|n| n == a)
                .ok_or_else(|| Error::Parse(format!("unknown endpoint {a:?}")))?;
            let ib = wire
                .vertices
                .iter()
                .position(|n| n == b)
                .ok_or_else(|| Error::Parse(format!("unknown endpoint {b:?}")))?;
            edges.push((ia, ib));
        }
        DefiningGraph::new(wire.vertices, &edges)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] & (1 << v) != 0
    }

    /// Link of `v` as a vertex bitmask.
    pub fn lk(&self, v: usize) -> u32 {
        self.adj[v]
    }

    /// Star of `v` (link plus `v`) as a vertex bitmask.
    pub fn st(&self, v: usize) -> u32 {
        self.adj[v] | (1 << v)
    }

    /// The partial order `v <= w`, i.e. `lk(v) ⊆ st(w)`.
    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.lk(v) & !self.st(w) == 0
    }

    pub fn equiv(&self, v: usize, w: usize) -> bool {
        self.leq(v, w) && self.leq(w, v)
    }

    /// Equivalence classes of `~` in vertex order.
    pub fn equiv_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.n() {
            if let Some(c) = classes.iter_mut().find(|c| self.equiv(c[0], v)) {
                c.push(v);
            } else {
                classes.push(vec![v]);
            }
        }
        classes
    }

    /// Connected components of `Γ \ st(m)`, as vertex bitmasks.
    pub fn components_without_star(&self, m: usize) -> Vec<u32> {
        let alive: u32 = (0..self.n())
            .filter(|&v| self.st(m) & (1 << v) == 0)
            .map(|v| 1u32 << v)
            .sum();
        let mut seen = 0u32;
        let mut comps = Vec::new();
        for v in 0..self.n() {
            let bit = 1u32 << v;
            if alive & bit == 0 || seen & bit != 0 {
                continue;
            }
            let mut comp = bit;
            let mut frontier = bit;
            while frontier != 0 {
                let mut next = 0u32;
                let mut f = frontier;
                while f != 0 {
                    let u = f.trailing_zeros() as usize;
                    f &= f - 1;
                    next |= self.adj[u] & alive & !comp;
                }
                comp |= next;
                frontier = next;
            }
            seen |= comp;
            comps.push(comp);
        }
        comps
    }

    /// All graph automorphisms as vertex permutations, in lexicographic order.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut out = Vec::new();
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.search_autos(0, &mut perm, &mut used, &mut out);
        out
    }

    fn search_autos(
        &self,
        v: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = self.n();
        if v == n {
            out.push(perm.clone());
            return;
        }
        for w in 0..n {
            if used[w] || self.adj[v].count_ones() != self.adj[w].count_ones() {
                continue;
            }
            let ok = (0..v).all(|u| self.adjacent(u, v) == self.adjacent(perm[u], w));
            if ok {
                perm[v] = w;
                used[w] = true;
                self.search_autos(v + 1, perm, used, out);
                used[w] = false;
                perm[v] = usize::MAX;
            }
        }
    }

    /// Stable key for memo tables.
    pub fn signature(&self) -> String {
        let mut s = self.names.join(",");
        s.push(';');
        for v in 0..self.n() {
            s.push_str(&format!("{:x},", self.adj[v]));
        }
        s
    }
}

impl fmt::Debug for DefiningGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ[{}]", self.names.join(" "))?;
        let edges: Vec<String> = (0..self.n())
            .flat_map(|u| {
                (u + 1..self.n())
                    .filter(move |&v| self.adjacent(u, v))
                    .map(move |v| format!("{}-{}", self.names[u], self.names[v]))
            })
            .collect();
        write!(f, "{{{}}}", edges.join(" "))
    }
}

/// Graph isomorphism by backtracking; returns a vertex map `g -> h` if one exists.
pub fn isomorphism(g: &DefiningGraph, h: &DefiningGraph) -> Option<Vec<usize>> {
    if g.n() != h.n() {
        return None;
    }
    let mut perm = vec![usize::MAX; g.n()];
    let mut used = vec![false; g.n()];
    fn go(
        g: &DefiningGraph,
        h: &DefiningGraph,
        v: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == g.n() {
            return true;
        }
        for w in 0..h.n() {
            if used[w] || g.lk(v).count_ones() != h.lk(w).count_ones() {
                continue;
            }
            if (0..v).all(|u| g.adjacent(u, v) == h.adjacent(perm[u], w)) {
                perm[v] = w;
                used[w] = true;
                if go(g, h, v + 1, perm, used) {
                    return true;
                }
                used[w] = false;
                perm[v] = usize::MAX;
            }
        }
        false
    }
    if go(g, h, 0, &mut perm, &mut used) {
        Some(perm)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_free_group() {
        let g = DefiningGraph::parse(r#"{"vertices":["x","y"],"edges":[]}"#).unwrap();
        assert_eq!(g.n(), 2);
        assert!(!g.adjacent(0, 1));
    }

    #[test]
    fn parse_path3() {
        let g =
            DefiningGraph::parse(r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]]}"#)
                .unwrap();
        assert!(g.adjacent(0, 1));
        assert!(g.adjacent(1, 2));
        assert!(!g.adjacent(0, 2));
    }

    #[test]
    fn parse_errors() {
        let e = DefiningGraph::parse(r#"{"vertices":["a","a"],"edges":[]}"#).unwrap_err();
        assert!(e.to_string().contains("duplicate vertex"));
        let e = DefiningGraph::parse(r#"{"vertices":["a"],"edges":[["a","b"]]}"#).unwrap_err();
        assert!(e.to_string().contains("unknown endpoint"));
        let e = DefiningGraph::parse(r#"{"vertices":["a"],"edges":[["a","a"]]}"#).unwrap_err();
        assert!(e.to_string().contains("self-loop"));
    }

    #[test]
    fn leq_path3() {
        // lk(a)={b} ⊆ st(c)={b,c} and lk(c)={b} ⊆ st(a), so a ~ c.
        let g = fixtures::path3();
        let (a, b, c) = (0, 1, 2);
        assert!(g.leq(a, c));
        assert!(g.leq(c, a));
        assert!(g.equiv(a, c));
        assert!(!g.leq(b, a));
        for v in 0..3 {
            assert!(g.leq(v, v));
        }
    }

    #[test]
    fn components() {
        let g = fixtures::path3();
        // Γ \ st(a) = {c}
        assert_eq!(g.components_without_star(0), vec![0b100]);
        // Γ \ st(b) = ∅
        assert!(g.components_without_star(1).is_empty());
    }

    #[test]
    fn automorphisms_counts() {
        assert_eq!(fixtures::f2().automorphisms().len(), 2);
        assert_eq!(fixtures::path3().automorphisms().len(), 2);
        assert_eq!(fixtures::cycle4().automorphisms().len(), 8);
    }
}
