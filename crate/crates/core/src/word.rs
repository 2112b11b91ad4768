//! Words in a right-angled Artin group: minimal-length (geodesic) normal
//! forms, cyclic reduction, and canonical conjugacy-class representatives.
//!
//! Two letters commute iff their vertices are adjacent in the defining graph
//! or equal. A word is reduced when no pair `x ... x⁻¹` is separated only by
//! letters commuting with `x`; reduced words of the same element differ by
//! swaps of adjacent commuting letters, so the lexicographically least
//! shuffle is a canonical form.

use crate::error::Error;
use crate::graph::DefiningGraph;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub v: usize,
    pub pos: bool,
}

impl Letter {
    pub fn new(v: usize, pos: bool) -> Self {
        Letter { v, pos }
    }

    pub fn inverse(self) -> Self {
        Letter { v: self.v, pos: !self.pos }
    }

    /// Index into letter bitmasks: positive letters on even bits.
    pub fn index(self) -> usize {
        self.v * 2 + usize::from(!self.pos)
    }

    pub fn from_index(i: usize) -> Self {
        Letter { v: i / 2, pos: i % 2 == 0 }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        // x < x⁻¹ < y < y⁻¹ under vertex order.
        self.index().cmp(&other.index())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.v, if self.pos { "" } else { "'" })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Parse whitespace-separated tokens `name` or `name^-1`.
    pub fn parse(g: &DefiningGraph, text: &str) -> Result<Word, Error> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, pos) = match tok.strip_suffix("^-1") {
                Some(base) => (base, false),
                None => (tok, true),
            };
            let v = g
                .vertex(name)
                .ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
            letters.push(Letter::new(v, pos));
        }
        Ok(Word(letters))
    }

    pub fn display(&self, g: &DefiningGraph) -> String {
        self.0
            .iter()
            .map(|l| {
                if l.pos {
                    g.name(l.v).to_string()
                } else {
                    format!("{}^-1", g.name(l.v))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[")?;
        for l in &self.0 {
            write!(f, "{l:?}")?;
        }
        write!(f, "]")
    }
}

fn commutes(g: &DefiningGraph, a: Letter, b: Letter) -> bool {
    a.v == b.v || g.adjacent(a.v, b.v)
}

/// Stack reduction: push letters left to right, cancelling `x⁻¹` against the
/// deepest `x` visible through commuting letters. One pass yields a geodesic.
fn stack_reduce(g: &DefiningGraph, w: &[Letter]) -> Vec<Letter> {
    let mut pile: Vec<Letter> = Vec::with_capacity(w.len());
    'outer: for &x in w {
        for j in (0..pile.len()).rev() {
            if pile[j] == x.inverse() {
                pile.remove(j);
                continue 'outer;
            }
            if !commutes(g, pile[j], x) {
                break;
            }
        }
        pile.push(x);
    }
    pile
}

/// Lexicographically least shuffle of a reduced word: repeatedly emit the
/// least letter whose prefix commutes with it.
fn trace_lex_min(g: &DefiningGraph, w: &[Letter]) -> Vec<Letter> {
    let mut rest: Vec<Letter> = w.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for p in 0..rest.len() {
            if (0..p).all(|i| commutes(g, rest[i], rest[p])) {
                if best.map_or(true, |b| rest[p] < rest[b]) {
                    best = Some(p);
                }
            }
        }
        out.push(rest.remove(best.expect("nonempty word has a movable letter")));
    }
    out
}

/// Minimal-length canonical form of the element represented by `w`.
pub fn reduce(g: &DefiningGraph, w: &Word) -> Word {
    Word(trace_lex_min(g, &stack_reduce(g, &w.0)))
}

pub fn is_reduced(g: &DefiningGraph, w: &Word) -> bool {
    stack_reduce(g, &w.0).len() == w.len()
}

/// True when every cyclic rotation of `w` is reduced and no conjugation by a
/// prefix shortens it.
pub fn is_cyclically_reduced(g: &DefiningGraph, w: &Word) -> bool {
    is_reduced(g, w) && find_cyclic_cancel(g, &w.0).is_none()
}

/// Look for `x` at p and `x⁻¹` at q (p < q) with the whole prefix before p
/// and suffix after q commuting with `x`; removing both is conjugation.
fn find_cyclic_cancel(g: &DefiningGraph, w: &[Letter]) -> Option<(usize, usize)> {
    let n = w.len();
    for p in 0..n {
        if !(0..p).all(|i| commutes(g, w[i], w[p])) {
            continue;
        }
        for q in (p + 1..n).rev() {
            if w[q] == w[p].inverse() && (q + 1..n).all(|i| commutes(g, w[i], w[p])) {
                return Some((p, q));
            }
        }
    }
    None
}

/// A word of minimal length in the conjugacy class of `w` (canonical shuffle).
pub fn cyclic_reduce(g: &DefiningGraph, w: &Word) -> Word {
    let mut cur = stack_reduce(g, &w.0);
    while let Some((p, q)) = find_cyclic_cancel(g, &cur) {
        cur.remove(q);
        cur.remove(p);
        cur = stack_reduce(g, &cur);
    }
    Word(trace_lex_min(g, &cur))
}

/// A conjugacy class, named by its canonical representative: the
/// lexicographically least word among all rotations of all shuffles of any
/// cyclically reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConjClass {
    pub rep: Word,
}

impl ConjClass {
    pub fn length(&self) -> usize {
        self.rep.len()
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_empty()
    }
}

/// Traverse the cyclic shuffle class of a cyclically reduced word. Nodes are
/// shuffle classes keyed by their lex-min form; moving the front letter to
/// the back steps to a neighbouring class. Rotations of every shuffle are
/// reachable this way, so the minimum over the traversal is canonical.
fn cyclic_class_min(g: &DefiningGraph, w: &[Letter]) -> Vec<Letter> {
    if w.is_empty() {
        return Vec::new();
    }
    let start = trace_lex_min(g, w);
    let mut best = start.clone();
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        // Front-movable letters: first occurrences whose prefix commutes.
        for p in 0..cur.len() {
            if !(0..p).all(|i| commutes(g, cur[i], cur[p])) {
                continue;
            }
            let mut rot = cur.clone();
            let x = rot.remove(p);
            rot.push(x);
            let key = trace_lex_min(g, &rot);
            if seen.insert(key.clone()) {
                if key < best {
                    best = key.clone();
                }
                queue.push_back(key);
            }
        }
        assert!(seen.len() < 100_000, "cyclic shuffle class exploded");
    }
    best
}

/// Canonical conjugacy-class representative of (the element of) `w`.
pub fn conj_canonical(g: &DefiningGraph, w: &Word) -> ConjClass {
    let red = cyclic_reduce(g, w);
    ConjClass { rep: Word(cyclic_class_min(g, &red.0)) }
}

pub fn conj_equal(g: &DefiningGraph, a: &Word, b: &Word) -> bool {
    conj_canonical(g, a) == conj_canonical(g, b)
}

fn class_cache() -> &'static Mutex<HashMap<(String, usize), Arc<Vec<ConjClass>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<Vec<ConjClass>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All distinct nontrivial conjugacy classes with representatives of exactly
/// `len` letters, sorted by canonical representative.
pub fn classes_of_length(g: &DefiningGraph, len: usize) -> Arc<Vec<ConjClass>> {
    let key = (g.signature(), len);
    if let Some(hit) = class_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut found: BTreeSet<ConjClass> = BTreeSet::new();
    let mut word = Vec::with_capacity(len);
    enumerate_cyclic_words(g, len, &mut word, &mut found);
    let out = Arc::new(found.into_iter().collect::<Vec<_>>());
    class_cache().lock().unwrap().insert(key, out.clone());
    out
}

fn enumerate_cyclic_words(
    g: &DefiningGraph,
    len: usize,
    word: &mut Vec<Letter>,
    found: &mut BTreeSet<ConjClass>,
) {
    if word.len() == len {
        let w = Word(word.clone());
        if is_cyclically_reduced(g, &w) {
            let class = conj_canonical(g, &w);
            if class.length() == len {
                found.insert(class);
            }
        }
        return;
    }
    for i in 0..2 * g.n() {
        let l = Letter::from_index(i);
        // Prune immediate linear cancellations.
        if word.last() == Some(&l.inverse()) {
            continue;
        }
        word.push(l);
        enumerate_cyclic_words(g, len, word, found);
        word.pop();
    }
}

/// All nontrivial classes of length ≤ `max_len`, sorted by (length, rep).
/// This order is the fixed enumeration order of the class list.
pub fn enumerate_classes(g: &DefiningGraph, max_len: usize) -> Vec<ConjClass> {
    (1..=max_len)
        .flat_map(|l| classes_of_length(g, l).iter().cloned().collect::<Vec<_>>())
        .collect()
}

/// The short classes used for the 0-coordinate of the norm: every oriented
/// nontrivial class of length at most two.
pub fn short_classes(g: &DefiningGraph) -> Vec<ConjClass> {
    enumerate_classes(g, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(g: &DefiningGraph, s: &str) -> Word {
        Word::parse(g, s).unwrap()
    }

    /// Oracle: closure of `w` under adjacent commuting swaps and adjacent
    /// cancellations; the shortest reachable words are the geodesics.
    fn rewrite_closure(g: &DefiningGraph, w: &Word) -> HashSet<Vec<Letter>> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([w.0.clone()]);
        seen.insert(w.0.clone());
        while let Some(cur) = queue.pop_front() {
            for i in 0..cur.len().saturating_sub(1) {
                if cur[i + 1] == cur[i].inverse() {
                    let mut next = cur.clone();
                    next.drain(i..=i + 1);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
                if cur[i].v != cur[i + 1].v && g.adjacent(cur[i].v, cur[i + 1].v) {
                    let mut next = cur.clone();
                    next.swap(i, i + 1);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        seen
    }

    fn oracle_min_len(g: &DefiningGraph, word: &Word) -> usize {
        rewrite_closure(g, word).iter().map(|v| v.len()).min().unwrap()
    }

    #[test]
    fn reduce_free_cancellation() {
        let g = fixtures::f2();
        assert_eq!(reduce(&g, &w(&g, "x x^-1 y")), w(&g, "y"));
    }

    #[test]
    fn reduce_commuting_cancellation() {
        // [a,b]=1 allows a b a⁻¹ -> b; a c a⁻¹ is irreducible.
        let g = fixtures::path3();
        assert_eq!(reduce(&g, &w(&g, "a b a^-1")), w(&g, "b"));
        let stuck = reduce(&g, &w(&g, "a c a^-1"));
        assert_eq!(stuck.len(), 3);
        assert_eq!(oracle_min_len(&g, &w(&g, "a c a^-1")), 3);
    }

    #[test]
    fn reduce_matches_oracle_on_small_words() {
        let g = fixtures::path3();
        let mut word = Vec::new();
        let mut count = 0usize;
        // All words of length 4 over 6 letters.
        fn rec(
            g: &DefiningGraph,
            depth: usize,
            word: &mut Vec<Letter>,
            count: &mut usize,
        ) {
            if depth == 0 {
                let wd = Word(word.clone());
                let red = reduce(g, &wd);
                let closure = rewrite_closure(g, &wd);
                let min = closure.iter().map(|v| v.len()).min().unwrap();
                assert_eq!(red.len(), min, "not geodesic for {wd:?}");
                assert!(closure.contains(&red.0), "reduce changed the element of {wd:?}");
                *count += 1;
                return;
            }
            for i in 0..2 * g.n() {
                word.push(Letter::from_index(i));
                rec(g, depth - 1, word, count);
                word.pop();
            }
        }
        rec(&g, 4, &mut word, &mut count);
        assert_eq!(count, 6usize.pow(4));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let g = fixtures::f2();
        assert_eq!(cyclic_reduce(&g, &w(&g, "x y x^-1")), w(&g, "y"));
        assert_eq!(cyclic_reduce(&g, &w(&g, "x y")), w(&g, "x y"));
        let p = fixtures::path3();
        // b commutes with a: c b a b⁻¹ c⁻¹ -> a.
        assert_eq!(cyclic_reduce(&p, &w(&p, "c b a b^-1 c^-1")), w(&p, "a"));
    }

    #[test]
    fn conjugating_by_generators_never_shortens() {
        let g = fixtures::path3();
        for base in ["a c a c", "a b c", "c c a", "b a b^-1 c"] {
            let m = cyclic_reduce(&g, &w(&g, base));
            for i in 0..2 * g.n() {
                let l = Letter::from_index(i);
                let conj = Word([vec![l], m.0.clone(), vec![l.inverse()]].concat());
                assert!(reduce(&g, &conj).len() >= m.len());
            }
        }
    }

    #[test]
    fn conj_canonical_examples() {
        let g = fixtures::f2();
        assert_eq!(conj_canonical(&g, &w(&g, "y x")).rep, w(&g, "x y"));
        let p = fixtures::path3();
        assert_eq!(conj_canonical(&p, &w(&p, "c a")).rep, w(&p, "a c"));
        assert_eq!(conj_canonical(&p, &Word::empty()).length(), 0);
    }

    #[test]
    fn conj_canonical_is_conjugation_invariant() {
        // Includes the shape that defeats naive min-over-rotations: only one
        // commuting pair, with the witness reachable through a shuffle.
        let g = DefiningGraph::parse(
            r#"{"vertices":["a","b","c","d"],"edges":[["a","b"]]}"#,
        )
        .unwrap();
        let base = w(&g, "a b c d");
        let canon = conj_canonical(&g, &base);
        for conj in ["a", "b", "c c", "d a^-1", "b c a", "a b c"] {
            let u = w(&g, conj);
            let tw = Word([u.0.clone(), base.0.clone(), u.inverse().0].concat());
            assert_eq!(conj_canonical(&g, &tw), canon, "conjugation by {conj}");
        }
        // acdb is in the cyclic class of abcd (rotate the shuffle bacd).
        assert_eq!(conj_canonical(&g, &w(&g, "a c d b")), canon);
    }

    #[test]
    fn enumerate_f2_classes() {
        let g = fixtures::f2();
        assert_eq!(enumerate_classes(&g, 0).len(), 0);
        assert_eq!(enumerate_classes(&g, 1).len(), 4);
        let c2 = enumerate_classes(&g, 2);
        assert_eq!(c2.len(), 12);
        let reps: Vec<String> = c2.iter().map(|c| c.rep.display(&g)).collect();
        assert_eq!(
            reps,
            [
                "x", "x^-1", "y", "y^-1",
                "x x", "x y", "x y^-1", "x^-1 x^-1",
                "x^-1 y", "x^-1 y^-1", "y y", "y^-1 y^-1",
            ]
        );
        // Strictly sorted and duplicate-free by construction of BTreeSet +
        // (length, rep) ordering.
        for pair in c2.windows(2) {
            assert!(
                (pair[0].length(), &pair[0].rep) < (pair[1].length(), &pair[1].rep)
            );
        }
    }

    #[test]
    fn every_short_word_canonicalizes_to_a_listed_class() {
        let g = fixtures::path3();
        let listed: HashSet<ConjClass> = enumerate_classes(&g, 3).into_iter().collect();
        let mut word = Vec::new();
        fn rec(g: &DefiningGraph, depth: usize, word: &mut Vec<Letter>, listed: &HashSet<ConjClass>) {
            if depth == 0 {
                let wd = Word(word.clone());
                let c = conj_canonical(g, &wd);
                if !c.is_identity() && c.length() <= 3 {
                    assert!(listed.contains(&c), "missing class {c:?}");
                }
                return;
            }
            for i in 0..2 * g.n() {
                word.push(Letter::from_index(i));
                rec(g, depth - 1, word, listed);
                word.pop();
            }
        }
        rec(&g, 3, &mut word, &listed);
    }
}
