//! Star graphs: the crossing-count record of a cyclic word relative to a
//! symmetric link set L and a decomposition of the remaining letters into
//! blocks. Each block carries its own copy of L; edges are drawn by a cyclic
//! scan that stays inside the current block's circle as long as possible.

use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::partition::{GwPartition, LetterSet};
use crate::word::{is_cyclically_reduced, Letter, Word};

/// A vertex of a star graph: a letter placed either in its block or in one
/// of the link copies.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct StarNode {
    pub block: usize,
    pub letter: Letter,
    pub in_link_copy: bool,
}

#[derive(Clone, Debug)]
pub struct StarGraph {
    pub link: LetterSet,
    pub blocks: Vec<LetterSet>,
    /// One edge per letter of the cyclic word.
    pub edges: Vec<(StarNode, StarNode)>,
}

impl StarGraph {
    /// Number of edges with endpoints in different block circles.
    pub fn cross_edges(&self, i: usize, j: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| {
                (a.block == i && b.block == j) || (a.block == j && b.block == i)
            })
            .count()
    }

    pub fn valence(&self, node_letter: Letter, block: usize, in_link_copy: bool) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| {
                usize::from(
                    a.letter == node_letter && a.block == block && a.in_link_copy == in_link_copy,
                ) + usize::from(
                    b.letter == node_letter && b.block == block && b.in_link_copy == in_link_copy,
                )
            })
            .sum()
    }
}

fn block_of(blocks: &[LetterSet], l: Letter) -> usize {
    blocks
        .iter()
        .position(|b| b.contains(l))
        .expect("letter outside link is in some block")
}

/// Build St^L_{A_1..A_k}(w) for a cyclically reduced `w`. The scan starts at
/// the first letter outside L; if every letter is in L, all edges live in the
/// first block's link copy.
pub fn build_star_graph(
    g: &DefiningGraph,
    link: LetterSet,
    blocks: &[LetterSet],
    w: &Word,
) -> Result<StarGraph, Error> {
    if !is_cyclically_reduced(g, w) {
        return Err(Error::NotCyclicallyReduced);
    }
    if !link.is_symmetric() {
        return Err(Error::BadBlocks("link set is not symmetric".into()));
    }
    let mut coverage = link;
    for (i, b) in blocks.iter().enumerate() {
        if !b.intersect(link).is_empty() {
            return Err(Error::BadBlocks(format!("block {i} meets the link")));
        }
        if !coverage.intersect(*b).minus(link).is_empty() {
            return Err(Error::BadBlocks(format!("block {i} overlaps another block")));
        }
        coverage = coverage.union(*b);
    }
    if coverage != LetterSet::full(g) {
        return Err(Error::BadBlocks("blocks miss some letters".into()));
    }

    let n = w.len();
    let mut edges = Vec::with_capacity(n);
    if n == 0 {
        return Ok(StarGraph { link, blocks: blocks.to_vec(), edges });
    }
    let start = w.0.iter().position(|l| !link.contains(*l));
    let Some(start) = start else {
        // Entire word inside L: one closed chain in the first link copy.
        for i in 0..n {
            let x = w.0[i];
            let y = w.0[(i + 1) % n];
            edges.push((
                StarNode { block: 0, letter: x, in_link_copy: true },
                StarNode { block: 0, letter: y.inverse(), in_link_copy: true },
            ));
        }
        return Ok(StarGraph { link, blocks: blocks.to_vec(), edges });
    };

    let mut cur_block = block_of(blocks, w.0[start]);
    for k in 0..n {
        let x = w.0[(start + k) % n];
        let y = w.0[(start + k + 1) % n];
        let from = if link.contains(x) {
            StarNode { block: cur_block, letter: x, in_link_copy: true }
        } else {
            cur_block = block_of(blocks, x);
            StarNode { block: cur_block, letter: x, in_link_copy: false }
        };
        let to = if link.contains(y) {
            StarNode { block: cur_block, letter: y.inverse(), in_link_copy: true }
        } else {
            let b = block_of(blocks, y.inverse());
            StarNode { block: b, letter: y.inverse(), in_link_copy: false }
        };
        edges.push((from, to));
    }
    Ok(StarGraph { link, blocks: blocks.to_vec(), edges })
}

/// |P̂|_w (crossings of the partition edge by a minimal lift) and the
/// per-vertex occurrence counts |v|_w.
pub fn crossing_counts(
    g: &DefiningGraph,
    part: &GwPartition,
    w: &Word,
) -> Result<(usize, Vec<usize>), Error> {
    let sg = build_star_graph(g, part.link, &[part.p, part.pstar], w)?;
    let crossings = sg.cross_edges(0, 1);
    let mut occ = vec![0usize; g.n()];
    for l in &w.0 {
        occ[l.v] += 1;
    }
    Ok((crossings, occ))
}

/// Occurrences of v or v⁻¹ in w.
pub fn letter_count(w: &Word, v: usize) -> usize {
    w.0.iter().filter(|l| l.v == v).count()
}

/// Dot product (A.B)^L_w: edges of St^L_{A,B,(A+B)*}(w) between the circles
/// of A and B.
pub fn dot(
    g: &DefiningGraph,
    link: LetterSet,
    a: LetterSet,
    b: LetterSet,
    w: &Word,
) -> Result<usize, Error> {
    if !a.intersect(b).is_empty() {
        return Err(Error::BadBlocks("dot product needs disjoint sets".into()));
    }
    if !a.intersect(link).is_empty() || !b.intersect(link).is_empty() {
        return Err(Error::BadBlocks("sets must avoid the link".into()));
    }
    let rest = LetterSet::full(g).minus(link).minus(a).minus(b);
    let sg = build_star_graph(g, link, &[a, b, rest], w)?;
    Ok(sg.cross_edges(0, 1))
}

/// Absolute value |A|^L_w = (A.A*)^L_w with A* the complement of A in L^c.
pub fn absval(
    g: &DefiningGraph,
    link: LetterSet,
    a: LetterSet,
    w: &Word,
) -> Result<usize, Error> {
    let astar = LetterSet::full(g).minus(link).minus(a);
    let sg = build_star_graph(g, link, &[a, astar], w)?;
    Ok(sg.cross_edges(0, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::partition::{enumerate_partitions, validate_gw_pair, make_partition};
    use crate::word::conj_canonical;

    fn letters(g: &DefiningGraph, spec: &str) -> LetterSet {
        let mut s = LetterSet::empty();
        for tok in spec.split_whitespace() {
            s.insert(Word::parse(g, tok).unwrap().0[0]);
        }
        s
    }

    fn w(g: &DefiningGraph, s: &str) -> Word {
        Word::parse(g, s).unwrap()
    }

    /// Oracle for dot products: cyclic subwords a·u·b⁻¹ or b·u·a⁻¹ with u a
    /// word in L.
    fn dot_oracle(link: LetterSet, a: LetterSet, b: LetterSet, word: &Word) -> usize {
        let n = word.len();
        let mut count = 0;
        for i in 0..n {
            let x = word.0[i];
            if link.contains(x) {
                continue;
            }
            // Walk forward over link letters to the next non-link letter.
            let mut j = (i + 1) % n;
            let mut steps = 0;
            while link.contains(word.0[j]) && steps < n {
                j = (j + 1) % n;
                steps += 1;
            }
            if steps >= n {
                continue;
            }
            let y = word.0[j].inverse();
            if (a.contains(x) && b.contains(y)) || (b.contains(x) && a.contains(y)) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn f2_examples() {
        let g = fixtures::f2();
        let xy = w(&g, "x y");
        let parts = enumerate_partitions(&g, false);
        let part = parts
            .iter()
            .find(|p| p.p == letters(&g, "x y") || p.pstar == letters(&g, "x y"))
            .unwrap();
        let (c, occ) = crossing_counts(&g, part, &xy).unwrap();
        assert_eq!(c, 2);
        assert_eq!(occ, vec![1, 1]);
        assert_eq!(crossing_counts(&g, part, &w(&g, "x")).unwrap().0, 1);
        let (c, occ) = crossing_counts(&g, part, &w(&g, "y")).unwrap();
        assert_eq!(c, 1);
        assert_eq!(occ[0], 0);
    }

    #[test]
    fn dot_examples() {
        let g = fixtures::f2();
        let xy = w(&g, "x y");
        let a = letters(&g, "x");
        assert_eq!(dot(&g, LetterSet::empty(), a, letters(&g, "y^-1"), &xy).unwrap(), 1);
        assert_eq!(dot(&g, LetterSet::empty(), a, letters(&g, "y"), &xy).unwrap(), 0);
        assert_eq!(absval(&g, LetterSet::empty(), a, &xy).unwrap(), 1);
    }

    #[test]
    fn word_inside_link() {
        let g = fixtures::path3();
        let link = letters(&g, "b b^-1");
        let blocks = [letters(&g, "a c"), letters(&g, "a^-1 c^-1")];
        let sg = build_star_graph(&g, link, &blocks, &w(&g, "b b")).unwrap();
        assert_eq!(sg.edges.len(), 2);
        assert_eq!(sg.cross_edges(0, 1), 0);
        assert!(sg.edges.iter().all(|(a, b)| a.in_link_copy && b.in_link_copy));
    }

    #[test]
    fn rejects_bad_input() {
        let g = fixtures::f2();
        assert!(build_star_graph(
            &g,
            LetterSet::empty(),
            &[letters(&g, "x x^-1 y y^-1")],
            &w(&g, "x x^-1"),
        )
        .is_err());
        let overlapping = [letters(&g, "x y"), letters(&g, "x x^-1 y^-1")];
        assert!(build_star_graph(&g, LetterSet::empty(), &overlapping, &w(&g, "x")).is_err());
    }

    #[test]
    fn degenerate_partition_counts_occurrences() {
        // For {b}|{b⁻¹} on the path, |P̂|_w = |b|_w: the stateful scan pays
        // one crossing per b even through link letters.
        let g = fixtures::path3();
        let part = crate::partition::degenerate_partition(&g, w(&g, "b").0[0]);
        for s in ["a b", "b c a", "b b a c", "a c"] {
            let word = conj_canonical(&g, &w(&g, s)).rep;
            let (c, _) = crossing_counts(&g, &part, &word).unwrap();
            assert_eq!(c, letter_count(&word, 1), "word {s}");
        }
    }

    #[test]
    fn dot_matches_subword_oracle() {
        let g = fixtures::cycle4();
        let link = letters(&g, "b b^-1");
        let a = letters(&g, "a a^-1");
        let b = letters(&g, "c d");
        for s in ["a c a d", "a b c d c", "c a c a d a^-1", "d d a c"] {
            let word = conj_canonical(&g, &w(&g, s)).rep;
            if word.is_empty() {
                continue;
            }
            assert_eq!(
                dot(&g, link, a, b, &word).unwrap(),
                dot_oracle(link, a, b, &word),
                "word {s}"
            );
        }
    }

    #[test]
    fn absval_of_side_is_partition_crossing() {
        for g in [fixtures::f2(), fixtures::path3(), fixtures::cycle4()] {
            for part in enumerate_partitions(&g, false) {
                for s in ["a", "a c", "c a c"] {
                    let Ok(word) = Word::parse(&g, s) else { continue };
                    let word = conj_canonical(&g, &word).rep;
                    if word.is_empty() {
                        continue;
                    }
                    let (c, _) = crossing_counts(&g, &part, &word).unwrap();
                    assert_eq!(absval(&g, part.link, part.p, &word).unwrap(), c);
                    assert_eq!(absval(&g, part.link, part.pstar, &word).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn shuffle_and_rotation_invariance() {
        let g = fixtures::path3();
        let pair = validate_gw_pair(&g, letters(&g, "a c"), w(&g, "a").0[0]).unwrap();
        let part = make_partition(&g, &pair);
        // a b c and its shuffles/rotations all represent the same class.
        let forms = ["a b c", "b a c", "a c b"];
        let counts: Vec<usize> = forms
            .iter()
            .map(|s| crossing_counts(&g, &part, &w(&g, s)).unwrap().0)
            .collect();
        assert!(counts.windows(2).all(|p| p[0] == p[1]), "{counts:?}");
    }
}
