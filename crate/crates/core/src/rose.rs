//! Marked roses (marked Salvetti complexes), the conjugacy-length norm, and
//! Whitehead moves.
//!
//! A rose stores ρ, the inverse of its marking, as generator images: every
//! length query reads ℓ_σ(g) = ℓ(ρ(g)), and the move (P̂, m) composes as
//! ρ' = φ_{(P,m)} ∘ ρ. Two roses are equal when their markings differ by an
//! inner automorphism and a Salvetti isometry (graph symmetry × inversions);
//! equivalently — and this is how we test it — when restricting the sum
//! Σ ℓ_τ(g) over σ's short classes attains the minimal possible value.

use crate::auto::{apply_images, compose, validate_images, Automorphism};
use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::partition::{
    enumerate_partitions, quadrants, relation, validate_gw_pair, whitehead_auto, GwPartition,
    LetterSet, Relation,
};
use crate::word::{
    classes_of_length, conj_canonical, cyclic_reduce, short_classes, ConjClass, Letter, Word,
};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Tail comparisons and witness scans stay well inside this length at desk
/// scale; exceeding it means something is mathematically wrong.
const TAIL_SCAN_CAP: usize = 12;

fn n0_cache() -> &'static Mutex<HashMap<String, u64>> {
    static CACHE: OnceLock<Mutex<HashMap<String, u64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Norm-0 of the identity rose: the sum of lengths over all short classes.
pub fn minimal_norm0(g: &DefiningGraph) -> u64 {
    let key = g.signature();
    if let Some(&v) = n0_cache().lock().unwrap().get(&key) {
        return v;
    }
    let v = short_classes(g).iter().map(|c| c.length() as u64).sum();
    n0_cache().lock().unwrap().insert(key, v);
    v
}

fn partition_cache() -> &'static Mutex<HashMap<String, Arc<Vec<GwPartition>>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Vec<GwPartition>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn partitions_of(g: &DefiningGraph) -> Arc<Vec<GwPartition>> {
    let key = g.signature();
    if let Some(hit) = partition_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let v = Arc::new(enumerate_partitions(g, false));
    partition_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// Crossings |P̂|_w of a cyclically reduced word: delete link letters, then
/// count cyclic pairs whose sides disagree (side of u against side of the
/// next letter's inverse).
pub fn partition_crossings(part: &GwPartition, w: &Word) -> usize {
    let mut sides: Vec<(usize, usize)> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        if part.link.contains(l) {
            continue;
        }
        let s = part.side_of(l).expect("letter in a side");
        let si = part.side_of(l.inverse()).expect("letter in a side");
        sides.push((s, si));
    }
    let k = sides.len();
    if k == 0 {
        return 0;
    }
    (0..k).filter(|&i| sides[i].0 != sides[(i + 1) % k].1).count()
}

pub fn occurrences(w: &Word, vertex: usize) -> usize {
    w.0.iter().filter(|l| l.v == vertex).count()
}

/// |P̂|_w − |m|_w for one class word.
pub fn move_delta(part: &GwPartition, m: Letter, w: &Word) -> i64 {
    partition_crossings(part, w) as i64 - occurrences(w, m.v) as i64
}

#[derive(Clone)]
pub struct MarkedRose {
    pub graph: DefiningGraph,
    /// ρ = marking⁻¹, with its inverse (the marking itself) alongside.
    pub rho: Automorphism,
    g0: Arc<Vec<ConjClass>>,
    /// Cyclically reduced ρ-images of the short classes, in class order.
    g0_words: Vec<Word>,
    norm0: u64,
}

impl std::fmt::Debug for MarkedRose {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Rose(norm0={}, rho={:?})", self.norm0, self.rho)
    }
}

impl MarkedRose {
    pub fn from_rho(g: &DefiningGraph, rho: Automorphism) -> Self {
        let g0 = Arc::new(short_classes(g));
        let g0_words: Vec<Word> = g0
            .iter()
            .map(|c| cyclic_reduce(g, &rho.apply(g, &c.rep)))
            .collect();
        let norm0 = g0_words.iter().map(|w| w.len() as u64).sum();
        MarkedRose { graph: g.clone(), rho, g0, g0_words, norm0 }
    }

    pub fn identity(g: &DefiningGraph) -> Self {
        MarkedRose::from_rho(g, Automorphism::identity(g))
    }

    pub fn norm0(&self) -> u64 {
        self.norm0
    }

    pub fn short_class_lengths(&self) -> Vec<u32> {
        self.g0_words.iter().map(|w| w.len() as u32).collect()
    }

    /// Dedup key: equal roses have identical length functions.
    pub fn key(&self) -> (u64, Vec<u32>) {
        (self.norm0, self.short_class_lengths())
    }

    /// ℓ_σ(g) = ℓ(ρ(g)).
    pub fn length(&self, class: &ConjClass) -> usize {
        self.image_word(class).len()
    }

    pub fn image_word(&self, class: &ConjClass) -> Word {
        cyclic_reduce(&self.graph, &self.rho.apply(&self.graph, &class.rep))
    }

    /// The classes g with ℓ_σ(g) ≤ 2, i.e. ρ⁻¹ of the short classes.
    pub fn witness_classes(&self) -> Vec<ConjClass> {
        let mut out: Vec<ConjClass> = self
            .g0
            .iter()
            .map(|c| conj_canonical(&self.graph, &self.rho.apply_inverse(&self.graph, &c.rep)))
            .collect();
        out.sort_by(class_order);
        out.dedup();
        out
    }

    /// Apply the Whitehead move of (side of P̂ containing m, m); returns the
    /// new rose and the exact norm deltas, verified against recomputation.
    pub fn whitehead_move(
        &self,
        part: &GwPartition,
        m: Letter,
    ) -> Result<(MarkedRose, MoveDelta), Error> {
        let g = &self.graph;
        let side_idx = part
            .side_of(m)
            .ok_or_else(|| Error::Precondition("m is not in a side of the partition".into()))?;
        let side = part.sides()[side_idx];
        let pair = validate_gw_pair(g, side, m)
            .map_err(|r| Error::InvalidPair(format!("({:?}, {m:?}): {r}", side)))?;
        let phi = whitehead_auto(g, &pair);
        let per_class: Vec<i64> =
            self.g0_words.iter().map(|w| move_delta(part, m, w)).collect();
        let delta0: i64 = per_class.iter().sum();
        let rho = compose(g, &phi, &self.rho);
        let g0_words: Vec<Word> = self
            .g0_words
            .iter()
            .map(|w| cyclic_reduce(g, &phi.apply(g, w)))
            .collect();
        for (i, w) in g0_words.iter().enumerate() {
            let predicted = self.g0_words[i].len() as i64 + per_class[i];
            assert_eq!(
                w.len() as i64,
                predicted,
                "length-change formula failed on class {:?}",
                self.g0[i]
            );
        }
        let norm0 = (self.norm0 as i64 + delta0) as u64;
        let rose = MarkedRose {
            graph: g.clone(),
            rho,
            g0: self.g0.clone(),
            g0_words,
            norm0,
        };
        Ok((rose, MoveDelta { delta0, per_class }))
    }
}

#[derive(Clone, Debug)]
pub struct MoveDelta {
    pub delta0: i64,
    pub per_class: Vec<i64>,
}

fn class_order(a: &ConjClass, b: &ConjClass) -> Ordering {
    (a.length(), &a.rep).cmp(&(b.length(), &b.rep))
}

/// Sum over the short classes of ℓ(images(h)); equals `minimal_norm0` iff
/// the images define an inner automorphism composed with an isometry.
pub fn norm0_of_images(g: &DefiningGraph, images: &[Word]) -> u64 {
    short_classes(g)
        .iter()
        .map(|c| cyclic_reduce(g, &apply_images(g, images, &c.rep)).len() as u64)
        .sum()
}

/// Inner test: minimal norm0 and every generator image conjugate to itself.
pub fn is_inner(g: &DefiningGraph, images: &[Word]) -> bool {
    for (v, w) in images.iter().enumerate() {
        let red = cyclic_reduce(g, w);
        if red.0 != vec![Letter::new(v, true)] {
            return false;
        }
    }
    norm0_of_images(g, images) == minimal_norm0(g)
}

/// Equality modulo inner automorphisms only (no isometry slack).
pub fn outer_equal(g: &DefiningGraph, a: &Automorphism, b: &Automorphism) -> bool {
    let images: Vec<Word> = (0..g.n())
        .map(|v| a.apply(g, &b.inverse_images[v]))
        .collect();
    is_inner(g, &images)
}

/// Rose equality: ρ_τ ∘ ρ_σ⁻¹ is inner ∘ isometry.
pub fn rose_equal(sigma: &MarkedRose, tau: &MarkedRose) -> bool {
    let g = &sigma.graph;
    if sigma.key() != tau.key() {
        return false;
    }
    let psi: Vec<Word> = (0..g.n())
        .map(|v| tau.rho.apply(g, &sigma.rho.inverse_images[v]))
        .collect();
    norm0_of_images(g, &psi) == minimal_norm0(g)
}

/// The norm of a rose: an explicit 0-coordinate and a lazily compared tail
/// indexed by the conjugacy classes in canonical order.
pub struct NormVector<'a> {
    rose: &'a MarkedRose,
}

impl<'a> NormVector<'a> {
    pub fn coord0(&self) -> u64 {
        self.rose.norm0()
    }

    /// ℓ_σ of the i-th class (1-based tail coordinate).
    pub fn tail(&self, i: usize) -> usize {
        assert!(i >= 1, "tail coordinates start at 1");
        let g = &self.rose.graph;
        let mut seen = 0usize;
        for len in 1.. {
            let tier = classes_of_length(g, len);
            if seen + tier.len() >= i {
                return self.rose.length(&tier[i - 1 - seen]);
            }
            seen += tier.len();
            assert!(len <= TAIL_SCAN_CAP, "tail index beyond desk scale");
        }
        unreachable!()
    }

    pub fn cmp(&self, other: &NormVector<'_>) -> Ordering {
        norm_compare(self.rose, other.rose)
    }
}

impl MarkedRose {
    pub fn norm(&self) -> NormVector<'_> {
        NormVector { rose: self }
    }
}

/// Lexicographic comparison of the full norms.
pub fn norm_compare(sigma: &MarkedRose, tau: &MarkedRose) -> Ordering {
    match sigma.norm0.cmp(&tau.norm0) {
        Ordering::Equal => {}
        ord => return ord,
    }
    let g = &sigma.graph;
    let mut witnesses = sigma.witness_classes();
    witnesses.extend(tau.witness_classes());
    witnesses.sort_by(class_order);
    witnesses.dedup();
    let first_diff = witnesses
        .iter()
        .find(|c| sigma.length(c) != tau.length(c));
    let Some(bound_class) = first_diff else {
        // Equal witness lengths force equal roses; anything else would
        // falsify the finite-determination bound.
        assert!(rose_equal(sigma, tau), "equal witness lengths on unequal roses");
        return Ordering::Equal;
    };
    let bound = bound_class.length();
    assert!(
        bound <= TAIL_SCAN_CAP,
        "norm tail scan needs classes of length {bound}, beyond desk scale"
    );
    for len in 1..=bound {
        for class in classes_of_length(g, len).iter() {
            match sigma.length(class).cmp(&tau.length(class)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
    }
    unreachable!("witness class differed but the scan found no difference")
}

/// Shared tiers of σ-image words for the classes of each length, in the
/// canonical class order.
struct TailWords<'a> {
    rose: &'a MarkedRose,
    tiers: Vec<Vec<Word>>,
}

impl<'a> TailWords<'a> {
    fn new(rose: &'a MarkedRose) -> Self {
        TailWords { rose, tiers: Vec::new() }
    }

    fn tier(&mut self, len: usize) -> &[Word] {
        while self.tiers.len() < len {
            let l = self.tiers.len() + 1;
            let words = classes_of_length(&self.rose.graph, l)
                .iter()
                .map(|c| self.rose.image_word(c))
                .collect();
            self.tiers.push(words);
        }
        &self.tiers[len - 1]
    }
}

/// Sign of ‖σ^P̂_m‖ − ‖σ‖ decided on the first nonzero per-class delta.
fn move_ordering(tail: &mut TailWords<'_>, part: &GwPartition, m: Letter, delta0: i64) -> Ordering {
    match delta0.cmp(&0) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for len in 1..=TAIL_SCAN_CAP {
        for w in tail.tier(len) {
            match move_delta(part, m, w).cmp(&0) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
    }
    panic!("move tail scan exhausted: a Whitehead move produced an equal norm");
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reductivity {
    /// Some move strictly lowers the 0-coordinate.
    Strong(Letter),
    /// Some move lowers the full norm but not the 0-coordinate.
    Reductive(Letter),
    Not,
}

impl Reductivity {
    pub fn witness(&self) -> Option<Letter> {
        match self {
            Reductivity::Strong(m) | Reductivity::Reductive(m) => Some(*m),
            Reductivity::Not => None,
        }
    }
}

pub fn move_delta0(rose: &MarkedRose, part: &GwPartition, m: Letter) -> i64 {
    rose.g0_words.iter().map(|w| move_delta(part, m, w)).sum()
}

/// Classify a non-degenerate partition at σ, trying every valid move letter
/// on both sides.
pub fn is_reductive(rose: &MarkedRose, part: &GwPartition) -> Result<Reductivity, Error> {
    if part.is_degenerate() {
        return Err(Error::Precondition(
            "a reductive Whitehead partition cannot be degenerate".into(),
        ));
    }
    let ms = part.move_letters(&rose.graph);
    for &m in &ms {
        if move_delta0(rose, part, m) < 0 {
            return Ok(Reductivity::Strong(m));
        }
    }
    let mut tail = TailWords::new(rose);
    for &m in &ms {
        if move_delta0(rose, part, m) == 0
            && move_ordering(&mut tail, part, m, 0) == Ordering::Less
        {
            return Ok(Reductivity::Reductive(m));
        }
    }
    Ok(Reductivity::Not)
}

/// Does the specific move (P̂, m) lower the full norm?
pub fn move_reduces(rose: &MarkedRose, part: &GwPartition, m: Letter) -> bool {
    let d0 = move_delta0(rose, part, m);
    if d0 > 0 {
        return false;
    }
    if d0 < 0 {
        return true;
    }
    let mut tail = TailWords::new(rose);
    move_ordering(&mut tail, part, m, 0) == Ordering::Less
}

/// 0-reductive: some move does not raise the 0-coordinate.
pub fn is_zero_reductive(rose: &MarkedRose, part: &GwPartition) -> bool {
    part.move_letters(&rose.graph)
        .iter()
        .any(|&m| move_delta0(rose, part, m) <= 0)
}

/// First strongly reductive (P̂, m) in enumeration order.
pub fn find_strongly_reductive(rose: &MarkedRose) -> Option<(GwPartition, Letter)> {
    for part in partitions_of(&rose.graph).iter() {
        if part.is_degenerate() {
            continue;
        }
        for m in part.move_letters(&rose.graph) {
            if move_delta0(rose, part, m) < 0 {
                return Some((part.clone(), m));
            }
        }
    }
    None
}

/// First fully reductive move with a flat 0-coordinate.
fn find_flat_reductive(rose: &MarkedRose) -> Option<(GwPartition, Letter)> {
    let mut tail = TailWords::new(rose);
    for part in partitions_of(&rose.graph).iter() {
        if part.is_degenerate() {
            continue;
        }
        for m in part.move_letters(&rose.graph) {
            if move_delta0(rose, part, m) == 0
                && move_ordering(&mut tail, part, m, 0) == Ordering::Less
            {
                return Some((part.clone(), m));
            }
        }
    }
    None
}

/// Greedy norm descent: strong moves first, then full-norm moves. Returns
/// the terminal rose and the move sequence; the recomposition of the moves
/// onto the start equals the terminal exactly.
pub fn peak_reduce(rose: &MarkedRose) -> (MarkedRose, Vec<(GwPartition, Letter)>) {
    let mut cur = rose.clone();
    let mut moves = Vec::new();
    loop {
        if let Some((part, m)) = find_strongly_reductive(&cur) {
            let (next, delta) = cur.whitehead_move(&part, m).expect("scanned move is valid");
            debug_assert!(delta.delta0 < 0);
            moves.push((part, m));
            cur = next;
            continue;
        }
        if let Some((part, m)) = find_flat_reductive(&cur) {
            let (next, _) = cur.whitehead_move(&part, m).expect("scanned move is valid");
            moves.push((part, m));
            cur = next;
            continue;
        }
        break;
    }
    // Recomposition check: folding the move automorphisms over the start
    // reproduces the terminal ρ.
    let g = &rose.graph;
    let mut recomposed = rose.rho.clone();
    for (part, m) in &moves {
        let side = part.sides()[part.side_of(*m).unwrap()];
        let pair = validate_gw_pair(g, side, *m).unwrap();
        recomposed = compose(g, &whitehead_auto(g, &pair), &recomposed);
    }
    assert_eq!(recomposed.images, cur.rho.images);
    (cur, moves)
}

/// A marking built from raw generator images; ρ is recovered by descending
/// the auxiliary rose whose ρ equals the given images. Succeeds exactly when
/// the marking is recognized as long-range.
pub fn rose_from_images(g: &DefiningGraph, images: &[Word]) -> Result<MarkedRose, Error> {
    let alpha = recognized_automorphism(g, images)?;
    Ok(MarkedRose::from_rho(g, alpha.invert()))
}

pub fn rose_identity(g: &DefiningGraph) -> MarkedRose {
    MarkedRose::identity(g)
}

/// Build a full automorphism (with inverse) from images by factoring them
/// through Whitehead moves; rejects markings it cannot certify.
pub fn recognized_automorphism(
    g: &DefiningGraph,
    images: &[Word],
) -> Result<Automorphism, Error> {
    let images: Vec<Word> = images.iter().map(|w| crate::word::reduce(g, w)).collect();
    validate_images(g, &images)?;
    match factor(g, &images)? {
        Factorization::InOutL { recomposed, .. } => {
            // recomposed = images modulo inner; compose the residual
            // conjugation to make the pair exact.
            let residual: Vec<Word> = (0..g.n())
                .map(|v| recomposed.apply_inverse(g, &images[v]))
                .collect();
            let conj = extract_conjugator(g, &residual).ok_or_else(|| {
                Error::NotAutomorphism("inner residual had no conjugator".into())
            })?;
            let inner = Automorphism::inner(g, &conj);
            let exact = compose(g, &recomposed, &inner);
            for v in 0..g.n() {
                if exact.images[v] != images[v] {
                    return Err(Error::NotAutomorphism(
                        "recomposition mismatch after conjugator extraction".into(),
                    ));
                }
            }
            Ok(exact)
        }
        Factorization::NotRecognized { .. } => Err(Error::NotAutomorphism(
            "marking is not certified long-range; cannot invert".into(),
        )),
    }
}

/// Find a with images[v] = a v a⁻¹ for all v, by stripping first letters of
/// candidate conjugators. Images must already cyclically reduce to the
/// generators themselves.
fn extract_conjugator(g: &DefiningGraph, images: &[Word]) -> Option<Word> {
    if !is_inner(g, images) {
        return None;
    }
    let mut current: Vec<Word> = images.to_vec();
    let mut conj: Vec<Letter> = Vec::new();
    let total = |imgs: &[Word]| imgs.iter().map(|w| w.len()).sum::<usize>();
    loop {
        if current
            .iter()
            .enumerate()
            .all(|(v, w)| w.0 == vec![Letter::new(v, true)])
        {
            return Some(Word(conj));
        }
        let cur_total = total(&current);
        let mut best: Option<(Letter, Vec<Word>, usize)> = None;
        for i in 0..2 * g.n() {
            let x = Letter::from_index(i);
            let stripped: Vec<Word> = current
                .iter()
                .map(|w| {
                    let mut v = vec![x.inverse()];
                    v.extend_from_slice(&w.0);
                    v.push(x);
                    crate::word::reduce(g, &Word(v))
                })
                .collect();
            let t = total(&stripped);
            if t < cur_total && best.as_ref().map_or(true, |b| t < b.2) {
                best = Some((x, stripped, t));
            }
        }
        let (x, stripped, _) = best?;
        conj.push(x);
        current = stripped;
    }
}

pub enum Factorization {
    InOutL {
        /// Moves in composition order: the input equals
        /// `moves[0] ∘ moves[1] ∘ … ∘ isometry`, modulo inner.
        moves: Vec<(GwPartition, Letter)>,
        /// (vertex permutation, sign flips).
        isometry: (Vec<usize>, Vec<bool>),
        /// The recomposition, built from the primitives.
        recomposed: Automorphism,
    },
    NotRecognized {
        terminal: MarkedRose,
    },
}

/// Factor the automorphism given by `images` into Whitehead moves followed
/// by an isometry, modulo inner. Sound: a positive answer is recomposition-
/// checked; outside the long-range subgroup the terminal rose is returned.
pub fn factor(g: &DefiningGraph, images: &[Word]) -> Result<Factorization, Error> {
    validate_images(g, images)?;
    let start = MarkedRose::from_rho(
        g,
        // Descend with ρ := images; the inverse slot is filled at the end,
        // so give the descent a placeholder that is never read.
        Automorphism { images: images.to_vec(), inverse_images: images.to_vec() },
    );
    let (terminal, moves) = peak_reduce_images(&start);
    if terminal.norm0() != minimal_norm0(g) {
        return Ok(Factorization::NotRecognized { terminal });
    }
    // Terminal ρ is inner ∘ isometry; read the isometry off the images.
    let mut perm = vec![usize::MAX; g.n()];
    let mut flip = vec![false; g.n()];
    for v in 0..g.n() {
        let red = cyclic_reduce(g, &terminal.rho.images[v]);
        if red.len() != 1 {
            return Ok(Factorization::NotRecognized { terminal });
        }
        perm[v] = red.0[0].v;
        flip[v] = !red.0[0].pos;
    }
    {
        let mut seen = vec![false; g.n()];
        for &p in &perm {
            if seen[p] {
                return Ok(Factorization::NotRecognized { terminal });
            }
            seen[p] = true;
        }
    }
    let isometry = Automorphism::isometry(g, &perm, &flip);
    // images = m₁ ∘ ... ∘ m_k ∘ isometry modulo inner.
    let mut recomposed = isometry.clone();
    for (part, m) in moves.iter().rev() {
        let side = part.sides()[part.side_of(*m).unwrap()];
        let pair = validate_gw_pair(g, side, *m).unwrap();
        recomposed = compose(g, &whitehead_auto(g, &pair), &recomposed);
    }
    let check: Vec<Word> = (0..g.n())
        .map(|v| recomposed.apply_inverse(g, &images[v]))
        .collect();
    if !is_inner(g, &check) {
        return Err(Error::Other(
            "factorization recomposition check failed".into(),
        ));
    }
    Ok(Factorization::InOutL { moves, isometry: (perm, flip), recomposed })
}

/// Descent that never touches ρ⁻¹, for roses whose inverse is unknown.
fn peak_reduce_images(rose: &MarkedRose) -> (MarkedRose, Vec<(GwPartition, Letter)>) {
    let mut cur = rose.clone();
    let mut moves = Vec::new();
    loop {
        if let Some((part, m)) = find_strongly_reductive(&cur) {
            let (next, _) = cur.whitehead_move(&part, m).expect("scanned move is valid");
            moves.push((part, m));
            cur = next;
            continue;
        }
        if let Some((part, m)) = find_flat_reductive(&cur) {
            let (next, _) = cur.whitehead_move(&part, m).expect("scanned move is valid");
            moves.push((part, m));
            cur = next;
            continue;
        }
        break;
    }
    (cur, moves)
}

/// The Higgins–Lyndon combination: for incompatible reductive partitions,
/// some quadrant is a reductive partition compatible with both. Quadrants
/// are scanned in the fixed order (P∩Q, P∩Q*, P*∩Q, P*∩Q*).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HllMode {
    Reductive,
    Strong,
}

pub fn hll_combine(
    rose: &MarkedRose,
    p: &GwPartition,
    q: &GwPartition,
    mode: HllMode,
) -> Result<(GwPartition, Letter), Error> {
    let g = &rose.graph;
    if relation(g, p, q) != Relation::Incompatible {
        return Err(Error::Precondition(
            "hll_combine needs incompatible partitions".into(),
        ));
    }
    match mode {
        HllMode::Reductive => {
            for part in [p, q] {
                if is_reductive(rose, part)? == Reductivity::Not {
                    return Err(Error::Precondition(
                        "hll_combine(reductive) needs both partitions reductive".into(),
                    ));
                }
            }
        }
        HllMode::Strong => {
            if !matches!(is_reductive(rose, p)?, Reductivity::Strong(_)) {
                return Err(Error::Precondition(
                    "hll_combine(strong) needs the first partition strongly reductive".into(),
                ));
            }
            if !is_zero_reductive(rose, q) {
                return Err(Error::Precondition(
                    "hll_combine(strong) needs the second partition 0-reductive".into(),
                ));
            }
        }
    }
    let quads = quadrants(p, q);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let set = quads[i][j];
        if set.len() < 2 {
            continue;
        }
        let Some(cand) = quadrant_partition(g, set) else {
            continue;
        };
        if cand.is_degenerate() {
            continue;
        }
        debug_assert!(relation(g, &cand, p).is_compatible());
        debug_assert!(relation(g, &cand, q).is_compatible());
        match (mode, is_reductive(rose, &cand)?) {
            (HllMode::Strong, Reductivity::Strong(m)) => return Ok((cand, m)),
            (HllMode::Reductive, r) => {
                if let Some(m) = r.witness() {
                    return Ok((cand, m));
                }
            }
            _ => {}
        }
    }
    Err(Error::Other("no reductive quadrant found".into()))
}

/// The partition defined by a quadrant, when some letter of it works as m.
pub fn quadrant_partition(g: &DefiningGraph, set: LetterSet) -> Option<GwPartition> {
    for m in crate::partition::max_letters(g, set).iter() {
        if let Ok(pair) = validate_gw_pair(g, set, m) {
            return Some(crate::partition::make_partition(g, &pair));
        }
    }
    None
}

/// Witness of the pushing step: with (M, m) maximally reductive (largest
/// link, then largest reduction in its link class) and P̂ reductive and
/// incompatible with M̂, one of M∩P* or M*∩P* is reductive with link lk(P̂).
pub fn pushing_witness(
    rose: &MarkedRose,
    m_part: &GwPartition,
    m: Letter,
    p: &GwPartition,
) -> Result<(GwPartition, Letter), Error> {
    let g = &rose.graph;
    if !move_reduces(rose, m_part, m) {
        return Err(Error::Precondition("(M, m) is not reductive".into()));
    }
    if is_reductive(rose, p)? == Reductivity::Not {
        return Err(Error::Precondition("P̂ is not reductive".into()));
    }
    if relation(g, m_part, p) != Relation::Incompatible {
        return Err(Error::Precondition(
            "pushing needs incompatible partitions".into(),
        ));
    }
    // Hypothesis (1): lk(M̂) maximal among links of reductive partitions.
    let all = partitions_of(g);
    for q in all.iter() {
        if q.is_degenerate() || is_reductive(rose, q)? == Reductivity::Not {
            continue;
        }
        if m_part.link != q.link && m_part.link.is_subset(q.link) {
            return Err(Error::Precondition(
                "lk(M̂) is not maximal among reductive links".into(),
            ));
        }
    }
    // Hypothesis (2): (M, m) maximally reductive within its link class.
    let (m_moved, _) = rose.whitehead_move(m_part, m)?;
    for q in all.iter() {
        if q.is_degenerate() || q.link != m_part.link {
            continue;
        }
        for w in q.move_letters(g) {
            if !move_reduces(rose, q, w) {
                continue;
            }
            let (q_moved, _) = rose.whitehead_move(q, w)?;
            if norm_compare(&m_moved, &q_moved) == Ordering::Greater {
                return Err(Error::Precondition(
                    "(M, m) is not maximally reductive in its link class".into(),
                ));
            }
        }
    }
    let m_side_in_p = p
        .side_of(m)
        .ok_or_else(|| Error::Precondition("m lies in lk(P̂)".into()))?;
    let m_side = m_part.side_of(m).expect("m is in a side of M̂");
    let p_star = p.sides()[1 - m_side_in_p];
    for cand_set in [
        m_part.sides()[m_side].intersect(p_star),
        m_part.sides()[1 - m_side].intersect(p_star),
    ] {
        if cand_set.len() < 2 {
            continue;
        }
        let Some(cand) = quadrant_partition(g, cand_set) else {
            continue;
        };
        if cand.is_degenerate() || cand.link != p.link {
            continue;
        }
        if let Some(w) = is_reductive(rose, &cand)?.witness() {
            return Ok((cand, w));
        }
    }
    Err(Error::Other("no pushing witness found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(g: &DefiningGraph, s: &str) -> Word {
        Word::parse(g, s).unwrap()
    }

    fn part_with_side(g: &DefiningGraph, side: &str) -> GwPartition {
        let target = {
            let mut s = LetterSet::empty();
            for tok in side.split_whitespace() {
                s.insert(w(g, tok).0[0]);
            }
            s
        };
        partitions_of(g)
            .iter()
            .find(|p| p.p == target || p.pstar == target)
            .unwrap()
            .clone()
    }

    #[test]
    fn identity_norm0_f2() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        // Oriented classes of length ≤ 2: 4 of length 1, 8 of length 2.
        assert_eq!(id.norm0(), 20);
        assert_eq!(minimal_norm0(&g), 20);
        let norm = id.norm();
        assert_eq!(norm.coord0(), 20);
        // Classes in canonical order: x, x⁻¹, y, y⁻¹ then the length-2 tier.
        assert_eq!(norm.tail(1), 1);
        assert_eq!(norm.tail(4), 1);
        assert_eq!(norm.tail(5), 2);
        assert_eq!(norm.cmp(&id.norm()), Ordering::Equal);
    }

    #[test]
    fn move_deltas_match_worked_examples() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        let part = part_with_side(&g, "x y");
        let m = w(&g, "x").0[0];
        let (moved, _) = id.whitehead_move(&part, m).unwrap();
        let class_xy = conj_canonical(&g, &w(&g, "x y"));
        assert_eq!(id.length(&class_xy), 2);
        assert_eq!(moved.length(&class_xy), 3);
        let class_x = conj_canonical(&g, &w(&g, "x"));
        assert_eq!(moved.length(&class_x), 1);
        let class_y = conj_canonical(&g, &w(&g, "y"));
        assert_eq!(moved.length(&class_y), 2);
    }

    #[test]
    fn move_is_involution_on_roses() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        let part = part_with_side(&g, "x y");
        let m = w(&g, "x").0[0];
        let (moved, _) = id.whitehead_move(&part, m).unwrap();
        assert!(!rose_equal(&id, &moved));
        let (back, _) = moved.whitehead_move(&part, m).unwrap();
        assert!(rose_equal(&id, &back));
        assert_eq!(norm_compare(&id, &back), Ordering::Equal);
    }

    #[test]
    fn rose_equal_examples() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        // Composing with an inner automorphism changes nothing.
        let inner = Automorphism::inner(&g, &w(&g, "x y"));
        let twisted = MarkedRose::from_rho(&g, compose(&g, &inner, &id.rho));
        assert!(rose_equal(&id, &twisted));
        // Graph swap of the discrete graph is an isometry.
        let swap = Automorphism::graph_auto(&g, &[1, 0]);
        assert!(rose_equal(&id, &MarkedRose::from_rho(&g, swap)));
        // y ↦ yx is not equal to the identity rose.
        let part = part_with_side(&g, "x y");
        let (moved, _) = id.whitehead_move(&part, w(&g, "x").0[0]).unwrap();
        assert!(!rose_equal(&id, &moved));
        assert_eq!(norm_compare(&id, &moved), Ordering::Less);
    }

    #[test]
    fn identity_rose_has_no_reductive_partition() {
        for g in [fixtures::f2(), fixtures::path3()] {
            let id = MarkedRose::identity(&g);
            for part in partitions_of(&g).iter() {
                if part.is_degenerate() {
                    continue;
                }
                assert_eq!(is_reductive(&id, part).unwrap(), Reductivity::Not);
            }
            assert!(find_strongly_reductive(&id).is_none());
        }
    }

    #[test]
    fn degenerate_partition_rejected_by_is_reductive() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        let part = part_with_side(&g, "x y y^-1");
        assert!(is_reductive(&id, &part).is_err());
    }

    #[test]
    fn stretched_rose_is_strongly_reducible() {
        let g = fixtures::f2();
        let id = MarkedRose::identity(&g);
        let part = part_with_side(&g, "x y");
        let (moved, _) = id.whitehead_move(&part, w(&g, "x").0[0]).unwrap();
        assert!(moved.norm0() > 20);
        let (p, m) = find_strongly_reductive(&moved).expect("must find a strong move");
        let (back, _) = moved.whitehead_move(&p, m).unwrap();
        assert!(back.norm0() < moved.norm0());
    }

    #[test]
    fn peak_reduce_roundtrip() {
        let g = fixtures::path3();
        let id = MarkedRose::identity(&g);
        // Compose three moves and reduce back.
        let mut rose = id.clone();
        let parts = partitions_of(&g);
        let usable: Vec<&GwPartition> = parts.iter().filter(|p| !p.is_degenerate()).collect();
        for (i, part) in usable.iter().cycle().take(3).enumerate() {
            let m = part.move_letters(&g)[i % part.move_letters(&g).len()];
            rose = rose.whitehead_move(part, m).unwrap().0;
        }
        let (terminal, _) = peak_reduce(&rose);
        assert!(rose_equal(&terminal, &id));
    }

    #[test]
    fn factor_single_whitehead_move() {
        let g = fixtures::f2();
        let part = part_with_side(&g, "x y");
        let side = part.sides()[part.side_of(w(&g, "x").0[0]).unwrap()];
        let pair = validate_gw_pair(&g, side, w(&g, "x").0[0]).unwrap();
        let phi = whitehead_auto(&g, &pair);
        match factor(&g, &phi.images).unwrap() {
            Factorization::InOutL { moves, .. } => assert_eq!(moves.len(), 1),
            Factorization::NotRecognized { .. } => panic!("should recognize"),
        }
    }

    #[test]
    fn factor_partial_conjugation() {
        let g = fixtures::path3();
        let images = vec![w(&g, "a"), w(&g, "b"), w(&g, "a c a^-1")];
        match factor(&g, &images).unwrap() {
            Factorization::InOutL { recomposed, .. } => {
                let residual: Vec<Word> = (0..3)
                    .map(|v| recomposed.apply_inverse(&g, &images[v]))
                    .collect();
                assert!(is_inner(&g, &residual));
            }
            Factorization::NotRecognized { .. } => panic!("should recognize"),
        }
    }

    #[test]
    fn factor_rejects_adjacent_transvection() {
        let g = fixtures::path3();
        // a ↦ ab is an automorphism but not long-range.
        let images = vec![w(&g, "a b"), w(&g, "b"), w(&g, "c")];
        match factor(&g, &images).unwrap() {
            Factorization::NotRecognized { terminal } => {
                assert!(terminal.norm0() > minimal_norm0(&g));
            }
            Factorization::InOutL { .. } => panic!("adjacent transvection recognized"),
        }
    }

    #[test]
    fn rose_from_images_inverts() {
        let g = fixtures::f2();
        // marking x ↦ x, y ↦ yx has ρ: x ↦ x, y ↦ yx⁻¹.
        let images = vec![w(&g, "x"), w(&g, "y x")];
        let rose = rose_from_images(&g, &images).unwrap();
        assert_eq!(rose.rho.images[1], w(&g, "y x^-1"));
        let bad = vec![w(&g, "x"), w(&g, "x")];
        assert!(rose_from_images(&g, &bad).is_err());
    }

    #[test]
    fn is_inner_detects() {
        let g = fixtures::f2();
        let inner = Automorphism::inner(&g, &w(&g, "x y x"));
        assert!(is_inner(&g, &inner.images));
        let inv = Automorphism::inversion(&g, 0);
        assert!(!is_inner(&g, &inv.images));
        // Conjugate-of-self images with no common conjugator.
        let g3 = DefiningGraph::parse(r#"{"vertices":["a","b","c"],"edges":[]}"#).unwrap();
        let images = vec![w(&g3, "b a b^-1"), w(&g3, "b"), w(&g3, "c")];
        assert!(!is_inner(&g3, &images));
    }

    #[test]
    fn extract_conjugator_roundtrip() {
        let g = fixtures::path3();
        for c in ["a", "a c", "c b a^-1", "b c a c"] {
            let conj = w(&g, c);
            let inner = Automorphism::inner(&g, &conj);
            let found = extract_conjugator(&g, &inner.images).unwrap();
            let again = Automorphism::inner(&g, &found);
            assert_eq!(again.images, inner.images, "conjugator {c}");
        }
    }

    #[test]
    fn hll_on_f2_incompatible_pair() {
        let g = fixtures::f2();
        // Build a rose where both diagonal partitions are reductive.
        let id = MarkedRose::identity(&g);
        let p1 = part_with_side(&g, "x y");
        let p2 = part_with_side(&g, "x y^-1");
        assert_eq!(relation(&g, &p1, &p2), Relation::Incompatible);
        // Compatible inputs are a precondition error.
        let p3 = part_with_side(&g, "x y y^-1");
        assert!(matches!(
            hll_combine(&id, &p1, &p3, HllMode::Reductive),
            Err(Error::Precondition(_))
        ));
    }
}
