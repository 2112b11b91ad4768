//! Γ-Whitehead pairs and partitions.
//!
//! A pair (P, m) with m ∈ P, m⁻¹ ∉ P, |P| ≥ 2 is Γ-Whitehead when
//!   (1) no element of P is adjacent to m,
//!   (2) every single x ∈ P satisfies x ≤ m,
//!   (3) every doubled vertex drags its whole component of Γ \ st(m).
//! The induced partition is V^± = P + lk(P) + P*.

use crate::auto::Automorphism;
use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::word::{reduce, Letter, Word};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A set of letters as a bitmask (letter `index()` numbering).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LetterSet(pub u64);

impl LetterSet {
    pub fn empty() -> Self {
        LetterSet(0)
    }

    pub fn insert(&mut self, l: Letter) {
        self.0 |= 1 << l.index();
    }

    pub fn contains(self, l: Letter) -> bool {
        self.0 & (1 << l.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 | o.0)
    }

    pub fn intersect(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & o.0)
    }

    pub fn minus(self, o: LetterSet) -> LetterSet {
        LetterSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: LetterSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Letter> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(Letter::from_index(i))
            }
        })
    }

    /// All 2n letters of a graph.
    pub fn full(g: &DefiningGraph) -> LetterSet {
        LetterSet((1u64 << (2 * g.n())) - 1)
    }

    /// lk(v)^± for a vertex set mask.
    pub fn from_vertex_mask(mask: u32) -> LetterSet {
        let mut s = LetterSet::empty();
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            s.insert(Letter::new(v, true));
            s.insert(Letter::new(v, false));
        }
        s
    }

    /// Vertices with at least one letter in the set.
    pub fn vertex_mask(self) -> u32 {
        let mut out = 0u32;
        for l in self.iter() {
            out |= 1 << l.v;
        }
        out
    }

    pub fn is_symmetric(self) -> bool {
        self.iter().all(|l| self.contains(l.inverse()))
    }

    pub fn display(self, g: &DefiningGraph) -> String {
        let items: Vec<String> = self
            .iter()
            .map(|l| {
                if l.pos {
                    g.name(l.v).into()
                } else {
                    format!("{}^-1", g.name(l.v))
                }
            })
            .collect();
        format!("{{{}}}", items.join(","))
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{{")?;
        for l in self.iter() {
            write!(f, "{l:?} ")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GwPair {
    pub side: LetterSet,
    pub m: Letter,
}

/// Why a candidate (P, m) is not a Γ-Whitehead pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairViolation {
    TooSmall,
    MNotInP,
    MInverseInP,
    /// Condition (1): these letters are adjacent to m.
    AdjacentToM(Vec<Letter>),
    /// Condition (2): these singles are not ≤ m.
    SingleNotBelowM(Vec<Letter>),
    /// Condition (3): doubled vertices whose component of Γ \ st(m) is not
    /// fully doubled.
    ComponentNotClosed(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct PairReport {
    pub violations: Vec<PairViolation>,
}

impl fmt::Display for PairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.violations)
    }
}

pub fn singles(side: LetterSet) -> impl Iterator<Item = Letter> {
    side.iter().filter(move |l| !side.contains(l.inverse()))
}

pub fn doubles_mask(side: LetterSet) -> u32 {
    let mut out = 0u32;
    for l in side.iter() {
        if side.contains(l.inverse()) {
            out |= 1 << l.v;
        }
    }
    out
}

/// Maximal elements of single(P) under ≤; for a valid pair this is the
/// equivalence class of m inside single(P).
pub fn max_letters(g: &DefiningGraph, side: LetterSet) -> LetterSet {
    let single: Vec<Letter> = singles(side).collect();
    let mut out = LetterSet::empty();
    for &x in &single {
        if single.iter().all(|&y| !g.leq(x.v, y.v) || g.leq(y.v, x.v)) {
            out.insert(x);
        }
    }
    out
}

/// Check conditions (1)-(3) and return the validated pair or a full report.
pub fn validate_gw_pair(
    g: &DefiningGraph,
    side: LetterSet,
    m: Letter,
) -> Result<GwPair, PairReport> {
    let mut violations = Vec::new();
    if side.len() < 2 {
        violations.push(PairViolation::TooSmall);
    }
    if !side.contains(m) {
        violations.push(PairViolation::MNotInP);
    }
    if side.contains(m.inverse()) {
        violations.push(PairViolation::MInverseInP);
    }
    let adjacent: Vec<Letter> =
        side.iter().filter(|l| g.adjacent(l.v, m.v)).collect();
    if !adjacent.is_empty() {
        violations.push(PairViolation::AdjacentToM(adjacent));
    }
    let bad_singles: Vec<Letter> = singles(side)
        .filter(|l| l.v != m.v && !g.leq(l.v, m.v))
        .collect();
    if !bad_singles.is_empty() {
        violations.push(PairViolation::SingleNotBelowM(bad_singles));
    }
    let dmask = doubles_mask(side);
    let mut bad_comps = Vec::new();
    if dmask != 0 {
        for comp in g.components_without_star(m.v) {
            let hit = comp & dmask;
            if hit != 0 && hit != comp {
                let mut m2 = comp & !dmask;
                while m2 != 0 {
                    bad_comps.push(m2.trailing_zeros() as usize);
                    m2 &= m2 - 1;
                }
            }
        }
        // A doubled vertex inside st(m) is impossible: it would be adjacent
        // to m (caught above) or be m itself.
    }
    if !bad_comps.is_empty() {
        violations.push(PairViolation::ComponentNotClosed(bad_comps));
    }
    if violations.is_empty() {
        Ok(GwPair { side, m })
    } else {
        Err(PairReport { violations })
    }
}

/// A Γ-Whitehead partition V^± = P + lk(P) + P*, sides unordered.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GwPartition {
    /// Lexicographically smaller side.
    pub p: LetterSet,
    /// The other side.
    pub pstar: LetterSet,
    pub link: LetterSet,
}

impl fmt::Debug for GwPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({:?}|{:?}|lk {:?})", self.p, self.pstar, self.link)
    }
}

impl GwPartition {
    fn from_sides(a: LetterSet, b: LetterSet, link: LetterSet) -> Self {
        let (p, pstar) = if a <= b { (a, b) } else { (b, a) };
        GwPartition { p, pstar, link }
    }

    pub fn sides(&self) -> [LetterSet; 2] {
        [self.p, self.pstar]
    }

    pub fn side_of(&self, l: Letter) -> Option<usize> {
        if self.p.contains(l) {
            Some(0)
        } else if self.pstar.contains(l) {
            Some(1)
        } else {
            None
        }
    }

    /// A side of size one; its move is an inversion modulo inner.
    pub fn degenerate_side(&self, side: usize) -> bool {
        self.sides()[side].len() == 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate_side(0) || self.degenerate_side(1)
    }

    /// Max letters of a side (equivalence class of any defining m).
    pub fn max_of_side(&self, g: &DefiningGraph, side: usize) -> LetterSet {
        max_letters(g, self.sides()[side])
    }

    /// Vertices v with v or v⁻¹ maximal in a side.
    pub fn max_vertices(&self, g: &DefiningGraph) -> u32 {
        self.max_of_side(g, 0).vertex_mask() | self.max_of_side(g, 1).vertex_mask()
    }

    /// Letters m on either side for which (side(m), m) is a valid pair.
    pub fn move_letters(&self, g: &DefiningGraph) -> Vec<Letter> {
        let mut out = Vec::new();
        for side in 0..2 {
            if self.degenerate_side(side) {
                continue;
            }
            for m in self.max_of_side(g, side).iter() {
                if validate_gw_pair(g, self.sides()[side], m).is_ok() {
                    out.push(m);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Vertices of Γ whose letters sit in different sides.
    pub fn single_vertices(&self) -> u32 {
        let mut out = 0u32;
        for l in self.p.iter() {
            if self.pstar.contains(l.inverse()) {
                out |= 1 << l.v;
            }
        }
        out
    }

    /// Vertices with both letters in one side.
    pub fn double_vertices(&self) -> u32 {
        doubles_mask(self.p) | doubles_mask(self.pstar)
    }

    pub fn link_vertices(&self) -> u32 {
        self.link.vertex_mask()
    }
}

/// Build the partition of a validated pair.
pub fn make_partition(g: &DefiningGraph, pair: &GwPair) -> GwPartition {
    let link = LetterSet::from_vertex_mask(g.lk(pair.m.v));
    let pstar = LetterSet::full(g).minus(pair.side).minus(link);
    GwPartition::from_sides(pair.side, pstar, link)
}

/// The degenerate partition {v} | lk(v)^± | rest.
pub fn degenerate_partition(g: &DefiningGraph, v: Letter) -> GwPartition {
    let mut p = LetterSet::empty();
    p.insert(v);
    let link = LetterSet::from_vertex_mask(g.lk(v.v));
    let pstar = LetterSet::full(g).minus(p).minus(link);
    GwPartition::from_sides(p, pstar, link)
}

/// All Γ-Whitehead partitions, each arising from some valid pair, in a fixed
/// deterministic order. With `include_degenerate`, singleton partitions
/// {v}|{v⁻¹} that admit no valid pair on either side are appended too.
pub fn enumerate_partitions(g: &DefiningGraph, include_degenerate: bool) -> Vec<GwPartition> {
    let mut seen = std::collections::BTreeSet::new();
    for mi in 0..2 * g.n() {
        let m = Letter::from_index(mi);
        let comps = g.components_without_star(m.v);
        // Components other than m's own may be doubled wholesale.
        let double_choices: Vec<u32> = comps
            .iter()
            .copied()
            .filter(|c| c & (1 << m.v) == 0)
            .collect();
        let single_candidates: Vec<usize> = (0..g.n())
            .filter(|&u| {
                u != m.v && g.st(m.v) & (1 << u) == 0 && g.leq(u, m.v)
            })
            .collect();
        for dmask_bits in 0..(1u32 << double_choices.len()) {
            let mut doubled = 0u32;
            for (k, c) in double_choices.iter().enumerate() {
                if dmask_bits & (1 << k) != 0 {
                    doubled |= c;
                }
            }
            // Per remaining candidate vertex: skip / u / u⁻¹ (3 choices).
            let free: Vec<usize> = single_candidates
                .iter()
                .copied()
                .filter(|&u| doubled & (1 << u) == 0)
                .collect();
            let mut choice = vec![0u8; free.len()];
            loop {
                let mut side = LetterSet::empty();
                side.insert(m);
                for (k, &u) in free.iter().enumerate() {
                    match choice[k] {
                        1 => side.insert(Letter::new(u, true)),
                        2 => side.insert(Letter::new(u, false)),
                        _ => {}
                    }
                }
                let mut d = doubled;
                while d != 0 {
                    let u = d.trailing_zeros() as usize;
                    d &= d - 1;
                    side.insert(Letter::new(u, true));
                    side.insert(Letter::new(u, false));
                }
                if side.len() >= 2 {
                    if let Ok(pair) = validate_gw_pair(g, side, m) {
                        seen.insert(make_partition(g, &pair));
                    }
                }
                // Advance the mixed-radix counter.
                let mut k = 0;
                loop {
                    if k == choice.len() {
                        break;
                    }
                    choice[k] += 1;
                    if choice[k] < 3 {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() {
                    break;
                }
            }
        }
    }
    if include_degenerate {
        for vi in 0..2 * g.n() {
            let part = degenerate_partition(g, Letter::from_index(vi));
            seen.insert(part);
        }
    }
    seen.into_iter().collect()
}

/// How two partitions sit with respect to each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Max classes distinct and adjacent.
    Commute,
    /// Some cross quadrant is empty; the empty quadrants are listed as
    /// (side of P̂, side of Q̂) index pairs.
    CompatibleDisjoint { empty: Vec<(usize, usize)> },
    /// All four quadrants nonempty and the partitions do not commute.
    Incompatible,
}

impl Relation {
    pub fn is_compatible(&self) -> bool {
        !matches!(self, Relation::Incompatible)
    }
}

/// Partitions commute when their max vertex sets are disjoint and pairwise
/// adjacent. (Adjacent equivalent vertices share one ~-class, so the test is
/// on the vertex sets, not the classes; members of a class behave alike.)
pub fn commute(g: &DefiningGraph, a: &GwPartition, b: &GwPartition) -> bool {
    let ma = a.max_vertices(g);
    let mb = b.max_vertices(g);
    if ma == 0 || mb == 0 || ma & mb != 0 {
        return false;
    }
    let mut bits = ma;
    while bits != 0 {
        let u = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let mut wbits = mb;
        while wbits != 0 {
            let w = wbits.trailing_zeros() as usize;
            wbits &= wbits - 1;
            if !g.adjacent(u, w) {
                return false;
            }
        }
    }
    true
}

/// The four quadrants P^× ∩ Q^×, indexed by (side of a, side of b).
pub fn quadrants(a: &GwPartition, b: &GwPartition) -> [[LetterSet; 2]; 2] {
    [
        [a.p.intersect(b.p), a.p.intersect(b.pstar)],
        [a.pstar.intersect(b.p), a.pstar.intersect(b.pstar)],
    ]
}

pub fn relation(g: &DefiningGraph, a: &GwPartition, b: &GwPartition) -> Relation {
    if a == b {
        return Relation::CompatibleDisjoint { empty: vec![(0, 1), (1, 0)] };
    }
    if commute(g, a, b) {
        return Relation::Commute;
    }
    let q = quadrants(a, b);
    let empty: Vec<(usize, usize)> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .filter(|&(i, j)| q[i][j].is_empty())
        .collect();
    if empty.is_empty() {
        Relation::Incompatible
    } else {
        Relation::CompatibleDisjoint { empty }
    }
}

/// For incompatible partitions, the opposite quadrant pairs that define
/// (possibly degenerate) partitions with a max letter among the inputs' max
/// letters. Entries come in opposite pairs.
pub struct QuadrantWitness {
    /// (side of a, side of b) of the quadrant.
    pub quadrant: (usize, usize),
    pub letters: LetterSet,
    pub partition: GwPartition,
    pub max: Letter,
}

pub fn opposite_gw_quadrants(
    g: &DefiningGraph,
    a: &GwPartition,
    b: &GwPartition,
) -> Result<Vec<QuadrantWitness>, Error> {
    if relation(g, a, b) != Relation::Incompatible {
        return Err(Error::Precondition(
            "opposite quadrants need incompatible partitions".into(),
        ));
    }
    let q = quadrants(a, b);
    let candidates = a
        .max_of_side(g, 0)
        .union(a.max_of_side(g, 1))
        .union(b.max_of_side(g, 0))
        .union(b.max_of_side(g, 1));
    let mut out = Vec::new();
    for pair in [[(0, 0), (1, 1)], [(0, 1), (1, 0)]] {
        let mut winners = Vec::new();
        for (i, j) in pair {
            let set = q[i][j];
            let mut found = None;
            if set.len() == 1 {
                let l = set.iter().next().unwrap();
                if candidates.contains(l) {
                    found = Some(QuadrantWitness {
                        quadrant: (i, j),
                        letters: set,
                        partition: degenerate_partition(g, l),
                        max: l,
                    });
                }
            } else {
                for m in candidates.intersect(set).iter() {
                    if let Ok(p) = validate_gw_pair(g, set, m) {
                        found = Some(QuadrantWitness {
                            quadrant: (i, j),
                            letters: set,
                            partition: make_partition(g, &p),
                            max: m,
                        });
                        break;
                    }
                }
            }
            match found {
                Some(w) => winners.push(w),
                None => {
                    winners.clear();
                    break;
                }
            }
        }
        out.extend(winners);
    }
    if out.is_empty() {
        return Err(Error::Other(
            "no opposite Whitehead quadrant pair found (should be impossible)".into(),
        ));
    }
    Ok(out)
}

/// The Whitehead automorphism of a valid pair: m ↦ m⁻¹; single v ∈ P ↦ vm⁻¹;
/// v with v⁻¹ ∈ P ↦ mv; doubled v ↦ mvm⁻¹; fixed otherwise. An involution.
pub fn whitehead_auto(g: &DefiningGraph, pair: &GwPair) -> Automorphism {
    let m = pair.m;
    let side = pair.side;
    let mut images = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let lv = Letter::new(v, true);
        let img = if v == m.v {
            Word(vec![lv.inverse()])
        } else if side.contains(lv) && side.contains(lv.inverse()) {
            Word(vec![m, lv, m.inverse()])
        } else if side.contains(lv) {
            Word(vec![lv, m.inverse()])
        } else if side.contains(lv.inverse()) {
            Word(vec![m, lv])
        } else {
            Word(vec![lv])
        };
        images.push(reduce(g, &img));
    }
    Automorphism { inverse_images: images.clone(), images }
}
