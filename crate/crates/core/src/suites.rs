//! Randomized and exhaustive verification suites. The acceptance test and
//! the CLI `verify` subcommand both run these; seeds make every run
//! reproducible.

use crate::auto::{compose, Automorphism};
use crate::complex::{
    build_blowup, build_salvetti, collapse, enumerate_regions, is_salvetti, min_path_lift,
    treelike_sets, verify_complex, EdgeLabel,
};
use crate::graph::DefiningGraph;
use crate::partition::{
    commute, enumerate_partitions, relation, validate_gw_pair, whitehead_auto, GwPartition,
    LetterSet, Relation,
};
use crate::rose::{
    find_strongly_reductive, hll_combine, is_inner, is_reductive, is_zero_reductive,
    minimal_norm0, move_delta0, move_reduces, norm_compare, partitions_of, peak_reduce,
    pushing_witness, rose_equal, Factorization, HllMode, MarkedRose, Reductivity,
};
use crate::stargraph::{absval, crossing_counts, dot};
use crate::word::{cyclic_reduce, Letter, Word};
use crate::{fixtures, rose};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} — {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn finish(name: &'static str, start: Instant, failures: Vec<String>, detail: String) -> SuiteOutcome {
    let passed = failures.is_empty();
    let detail = if passed {
        detail
    } else {
        format!("{detail}; first failures: {:?}", &failures[..failures.len().min(3)])
    };
    SuiteOutcome { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn random_graph(rng: &mut ChaCha8Rng, min_n: usize, max_n: usize) -> DefiningGraph {
    let names = ["a", "b", "c", "d", "e"];
    let n = rng.gen_range(min_n..=max_n);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
    }
    DefiningGraph::new(names[..n].iter().map(|s| s.to_string()).collect(), &edges).unwrap()
}

fn random_cyclic_word(rng: &mut ChaCha8Rng, g: &DefiningGraph, max_len: usize) -> Word {
    for _ in 0..64 {
        let len = rng.gen_range(1..=max_len);
        let letters: Vec<Letter> = (0..len)
            .map(|_| Letter::from_index(rng.gen_range(0..2 * g.n())))
            .collect();
        let w = cyclic_reduce(g, &Word(letters));
        if !w.is_empty() {
            return w;
        }
    }
    Word(vec![Letter::new(0, true)])
}

fn random_letterset(rng: &mut ChaCha8Rng, from: LetterSet, density: f64) -> LetterSet {
    let mut out = LetterSet::empty();
    for l in from.iter() {
        if rng.gen_bool(density) {
            out.insert(l);
        }
    }
    out
}

fn random_symmetric(rng: &mut ChaCha8Rng, g: &DefiningGraph, density: f64) -> LetterSet {
    let mut out = LetterSet::empty();
    for v in 0..g.n() {
        if rng.gen_bool(density) {
            out.insert(Letter::new(v, true));
            out.insert(Letter::new(v, false));
        }
    }
    out
}

fn random_rose(rng: &mut ChaCha8Rng, g: &DefiningGraph, moves: usize) -> MarkedRose {
    let parts = partitions_of(g);
    let usable: Vec<&GwPartition> = parts.iter().filter(|p| !p.is_degenerate()).collect();
    let mut rose = MarkedRose::identity(g);
    if usable.is_empty() {
        return rose;
    }
    for _ in 0..moves {
        let part = usable[rng.gen_range(0..usable.len())];
        let ms = part.move_letters(g);
        if ms.is_empty() {
            continue;
        }
        let m = ms[rng.gen_range(0..ms.len())];
        rose = rose.whitehead_move(part, m).unwrap().0;
    }
    rose
}

/// Criterion 1: exact length change under a Whitehead move.
pub fn suite_length_change(seed: u64, trials: usize) -> SuiteOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0usize;
    while done < trials {
        let g = random_graph(&mut rng, 2, 5);
        let parts = partitions_of(&g);
        let usable: Vec<&GwPartition> = parts.iter().filter(|p| !p.is_degenerate()).collect();
        if usable.is_empty() {
            continue;
        }
        let n_moves = rng.gen_range(0..=2);
        let rose = random_rose(&mut rng, &g, n_moves);
        let part = usable[rng.gen_range(0..usable.len())];
        let ms = part.move_letters(&g);
        if ms.is_empty() {
            continue;
        }
        let m = ms[rng.gen_range(0..ms.len())];
        let rep = random_cyclic_word(&mut rng, &g, 12);
        let w = cyclic_reduce(&g, &rose.rho.apply(&g, &rep));
        let predicted = w.len() as i64 + rose::move_delta(part, m, &w);
        let (moved, _) = rose.whitehead_move(part, m).unwrap();
        let actual = cyclic_reduce(&g, &moved.rho.apply(&g, &rep)).len() as i64;
        if predicted != actual {
            failures.push(format!(
                "{g:?} {part:?} m={m:?} rep={rep:?}: predicted {predicted}, got {actual}"
            ));
        }
        done += 1;
    }
    finish("length-change", start, failures, format!("{done} randomized trials, exact"))
}

/// Criterion 2: the four star-graph counting identities.
pub fn suite_counting(seed: u64, trials: usize) -> SuiteOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0usize;
    while done < trials {
        let g = random_graph(&mut rng, 2, 5);
        let w = random_cyclic_word(&mut rng, &g, 10);
        let full = LetterSet::full(&g);
        let link = random_symmetric(&mut rng, &g, 0.3);
        let rest = full.minus(link);

        // Linearity on disjoint A, B, C.
        let a = random_letterset(&mut rng, rest, 0.35);
        let b = random_letterset(&mut rng, rest.minus(a), 0.4);
        let c = random_letterset(&mut rng, rest.minus(a).minus(b), 0.5);
        let lhs = dot(&g, link, a, b.union(c), &w).unwrap();
        let rhs = dot(&g, link, a, b, &w).unwrap() + dot(&g, link, a, c, &w).unwrap();
        if lhs != rhs {
            failures.push(format!("linearity: {lhs} vs {rhs} on {w:?}"));
        }

        // |A∩B*| + |A*∩B| = |A| + |B| − 2(A∩B).(A*∩B*).
        let a = random_letterset(&mut rng, rest, 0.5);
        let b = random_letterset(&mut rng, rest, 0.5);
        let astar = rest.minus(a);
        let bstar = rest.minus(b);
        let lhs = absval(&g, link, a.intersect(bstar), &w).unwrap() as i64
            + absval(&g, link, astar.intersect(b), &w).unwrap() as i64;
        let rhs = absval(&g, link, a, &w).unwrap() as i64
            + absval(&g, link, b, &w).unwrap() as i64
            - 2 * dot(&g, link, a.intersect(b), astar.intersect(bstar), &w).unwrap() as i64;
        if lhs != rhs {
            failures.push(format!("quadrant identity: {lhs} vs {rhs} on {w:?}"));
        }

        // Monotone difference for L₀ ⊆ L, A ⊆ C.
        let l0 = random_symmetric_subset(&mut rng, link);
        let a = random_letterset(&mut rng, rest, 0.3);
        let c = a.union(random_letterset(&mut rng, rest.minus(a), 0.4));
        let da = absval(&g, l0, a, &w).unwrap() as i64 - absval(&g, link, a, &w).unwrap() as i64;
        let dc = absval(&g, l0, c, &w).unwrap() as i64 - absval(&g, link, c, &w).unwrap() as i64;
        if da > dc {
            failures.push(format!("difference lemma: {da} > {dc} on {w:?}"));
        }

        // Mixed links: |A∩B*|^L1 + |A*∩B|^L2 ≤ |A|^L1 + |B|^L2, L = L1∪L2.
        let l1 = random_symmetric(&mut rng, &g, 0.25);
        let l2 = random_symmetric(&mut rng, &g, 0.25);
        let l = l1.union(l2);
        let lc = full.minus(l);
        let a = random_letterset(&mut rng, lc, 0.5);
        let b = random_letterset(&mut rng, lc, 0.5);
        let astar = lc.minus(a);
        let bstar = lc.minus(b);
        let lhs = absval(&g, l1, a.intersect(bstar), &w).unwrap()
            + absval(&g, l2, astar.intersect(b), &w).unwrap();
        let rhs = absval(&g, l1, a, &w).unwrap() + absval(&g, l2, b, &w).unwrap();
        if lhs > rhs {
            failures.push(format!("mixed-link bound: {lhs} > {rhs} on {w:?}"));
        }
        done += 1;
    }
    finish("counting-lemmas", start, failures, format!("{done} trials × 4 identities, exact"))
}

fn random_symmetric_subset(rng: &mut ChaCha8Rng, link: LetterSet) -> LetterSet {
    let mut out = LetterSet::empty();
    for l in link.iter() {
        if l.pos && rng.gen_bool(0.5) {
            out.insert(l);
            out.insert(l.inverse());
        }
    }
    out
}

fn compatible_systems(g: &DefiningGraph, max_size: usize) -> Vec<Vec<GwPartition>> {
    let parts = enumerate_partitions(g, false);
    let mut out: Vec<Vec<usize>> = (0..parts.len()).map(|i| vec![i]).collect();
    let mut layer = out.clone();
    for _ in 1..max_size {
        let mut next = Vec::new();
        for sys in &layer {
            let last = *sys.last().unwrap();
            for j in last + 1..parts.len() {
                if sys
                    .iter()
                    .all(|&i| relation(g, &parts[i], &parts[j]).is_compatible())
                {
                    let mut ext = sys.clone();
                    ext.push(j);
                    next.push(ext);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.into_iter()
        .map(|sys| sys.into_iter().map(|i| parts[i].clone()).collect())
        .collect()
}

fn side_from_tokens(g: &DefiningGraph, tokens: &[&str]) -> LetterSet {
    tokens.iter().fold(LetterSet::empty(), |mut s, t| {
        s.insert(Word::parse(g, t).unwrap().0[0]);
        s
    })
}

fn partition_from_tokens(g: &DefiningGraph, tokens: &[&str], m: &str) -> GwPartition {
    let side = side_from_tokens(g, tokens);
    let pair = validate_gw_pair(g, side, Word::parse(g, m).unwrap().0[0]).unwrap();
    crate::partition::make_partition(g, &pair)
}

/// Criterion 3: blowup soundness for every compatible system of size ≤ 3
/// over F₂, the path, and the 4-cycle.
pub fn suite_blowup() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0usize;
    for g in [fixtures::f2(), fixtures::path3(), fixtures::cycle4()] {
        for sys in compatible_systems(&g, 3) {
            count += 1;
            let x = match build_blowup(&g, &sys) {
                Ok(x) => x,
                Err(e) => {
                    failures.push(format!("blowup failed on {sys:?}: {e}"));
                    continue;
                }
            };
            let report = verify_complex(&x);
            if !report.is_ok() {
                failures.push(format!("verify failed on {sys:?}: {:?}", report.failures));
                continue;
            }
            let canonical: Vec<EdgeLabel> = (0..sys.len()).map(EdgeLabel::Part).collect();
            match collapse(&x, &canonical) {
                Ok(c) => {
                    if is_salvetti(&c, &g).is_none() {
                        failures.push(format!("canonical collapse not Salvetti on {sys:?}"));
                    }
                }
                Err(e) => failures.push(format!("canonical collapse failed on {sys:?}: {e}")),
            }
        }
    }
    // Region-count fixtures.
    {
        let g = fixtures::f2();
        let p1 = partition_from_tokens(&g, &["x", "y"], "x");
        let p2 = partition_from_tokens(&g, &["x", "y", "y^-1"], "x");
        let n = enumerate_regions(&g, &[p1, p2]).unwrap().len();
        if n != 3 {
            failures.push(format!("F₂ nested pair has {n} regions, expected 3"));
        }
        let c4 = fixtures::cycle4();
        let pa = partition_from_tokens(&c4, &["a", "c"], "a");
        let pb = partition_from_tokens(&c4, &["b", "d"], "b");
        if !commute(&c4, &pa, &pb) {
            failures.push("expected commuting pair on the 4-cycle".into());
        }
        let n = enumerate_regions(&c4, &[pa, pb]).unwrap().len();
        if n != 4 {
            failures.push(format!("commuting pair has {n} regions, expected 4"));
        }
    }
    finish("blowup-soundness", start, failures, format!("{count} compatible systems, exact"))
}

/// The isomorphism types of simple graphs on 1..=4 vertices.
fn iso_reps_up_to_4() -> Vec<DefiningGraph> {
    let mut reps: Vec<DefiningGraph> = Vec::new();
    for g in fixtures::graphs_up_to_4() {
        if !reps.iter().any(|h| crate::graph::isomorphism(h, &g).is_some()) {
            reps.push(g);
        }
    }
    reps
}

/// Criterion 4: tree-like ⟺ collapses to a Salvetti, plus the exchange
/// property; exhaustive over |𝒫| ≤ 2 on all graphs with ≤ 4 vertices.
pub fn suite_treelike() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut systems = 0usize;
    let mut swaps = 0usize;
    for g in iso_reps_up_to_4() {
        for sys in compatible_systems(&g, 2) {
            systems += 1;
            let x = build_blowup(&g, &sys).unwrap();
            let report = verify_complex(&x);
            if !report.is_ok() {
                failures.push(format!("verify failed on {sys:?}: {:?}", report.failures));
                continue;
            }
            let set_list: Vec<BTreeSet<EdgeLabel>> = match treelike_sets(&g, &sys) {
                Ok((_, s)) => s,
                Err(e) => {
                    failures.push(format!("treelike_sets failed on {sys:?}: {e}"));
                    continue;
                }
            };
            let labels: Vec<EdgeLabel> = x.labels().into_iter().collect();
            for mask in 0..(1u32 << labels.len()) {
                let subset: BTreeSet<EdgeLabel> = labels
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &l)| l)
                    .collect();
                let ok = collapse(&x, &subset.iter().copied().collect::<Vec<_>>())
                    .map(|c| is_salvetti(&c, &g).is_some())
                    .unwrap_or(false);
                if ok != set_list.contains(&subset) {
                    failures.push(format!(
                        "{g:?} {sys:?}: subset {subset:?} collapses-to-Salvetti={ok}, tree-like={}",
                        set_list.contains(&subset)
                    ));
                }
            }
            // Exchange property over all (𝓗, 𝓚, K).
            for h in &set_list {
                for k_set in &set_list {
                    for &k in k_set.iter() {
                        swaps += 1;
                        let found = h.iter().any(|&hh| {
                            let mut cand = h.clone();
                            cand.remove(&hh);
                            cand.insert(k);
                            set_list.contains(&cand)
                        });
                        if !found {
                            failures.push(format!("exchange failed on {sys:?}: H={h:?} K={k:?}"));
                        }
                    }
                }
            }
        }
    }
    finish(
        "treelike-characterization",
        start,
        failures,
        format!("{systems} blowups exhausted, {swaps} exchange triples"),
    )
}

fn random_elementary(rng: &mut ChaCha8Rng, g: &DefiningGraph) -> Automorphism {
    let parts = partitions_of(g);
    let usable: Vec<&GwPartition> = parts.iter().filter(|p| !p.is_degenerate()).collect();
    let autos = g.automorphisms();
    loop {
        match rng.gen_range(0..10) {
            0..=5 if !usable.is_empty() => {
                let part = usable[rng.gen_range(0..usable.len())];
                let ms = part.move_letters(g);
                if ms.is_empty() {
                    continue;
                }
                let m = ms[rng.gen_range(0..ms.len())];
                let side = part.sides()[part.side_of(m).unwrap()];
                let pair = validate_gw_pair(g, side, m).unwrap();
                return whitehead_auto(g, &pair);
            }
            6..=7 => return Automorphism::inversion(g, rng.gen_range(0..g.n())),
            _ => {
                let perm = &autos[rng.gen_range(0..autos.len())];
                return Automorphism::graph_auto(g, perm);
            }
        }
    }
}

/// Criterion 5: peak-reduction round trips on random products of long-range
/// elementary automorphisms.
pub fn suite_peak(seed: u64, total: usize) -> SuiteOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let graphs = [fixtures::f2(), fixtures::path3(), fixtures::cycle4()];
    let per = total.div_ceil(graphs.len());
    let mut done = 0usize;
    for g in &graphs {
        for _ in 0..per {
            done += 1;
            let k = rng.gen_range(1..=8);
            let mut phi = Automorphism::identity(g);
            for _ in 0..k {
                phi = compose(g, &phi, &random_elementary(&mut rng, g));
            }
            match crate::rose::factor(g, &phi.images) {
                Ok(Factorization::InOutL { moves, recomposed, .. }) => {
                    // Recomposition equals the input modulo inner.
                    let residual: Vec<Word> = (0..g.n())
                        .map(|v| recomposed.apply_inverse(g, &phi.images[v]))
                        .collect();
                    if !is_inner(g, &residual) {
                        failures.push(format!("recomposition differs for {phi:?}"));
                    }
                    // Every descent step strictly reduces.
                    let mut cur = MarkedRose::from_rho(
                        g,
                        Automorphism {
                            images: phi.images.clone(),
                            inverse_images: phi.images.clone(),
                        },
                    );
                    for (part, m) in &moves {
                        if !move_reduces(&cur, part, *m) {
                            failures.push(format!("non-reducing descent step on {phi:?}"));
                            break;
                        }
                        cur = cur.whitehead_move(part, *m).unwrap().0;
                    }
                }
                Ok(Factorization::NotRecognized { .. }) => {
                    failures.push(format!("long-range product not recognized: {phi:?}"));
                }
                Err(e) => failures.push(format!("factor error: {e}")),
            }
        }
    }
    finish("peak-reduction", start, failures, format!("{done} random products factored"))
}

/// Criterion 6: the identity rose is the unique minimum.
pub fn suite_minimality() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut scanned = 0usize;
    for g in iso_reps_up_to_4() {
        let id = MarkedRose::identity(&g);
        for part in partitions_of(&g).iter() {
            if part.is_degenerate() {
                continue;
            }
            scanned += 1;
            if is_reductive(&id, part).unwrap() != Reductivity::Not {
                failures.push(format!("identity rose reducible on {g:?} by {part:?}"));
            }
        }
        match crate::spine::enumerate_roses(&g, minimal_norm0(&g)) {
            Ok(rg) => {
                if rg.nodes.len() != 1 {
                    failures.push(format!(
                        "{g:?}: {} roses at the minimal bound, expected 1",
                        rg.nodes.len()
                    ));
                }
            }
            Err(e) => failures.push(format!("BFS failed on {g:?}: {e}")),
        }
    }
    // Locked regression value under the oriented short-class convention.
    if minimal_norm0(&fixtures::f2()) != 20 {
        failures.push(format!(
            "F₂ minimal norm0 is {}, locked value 20",
            minimal_norm0(&fixtures::f2())
        ));
    }
    finish(
        "minimality-uniqueness",
        start,
        failures,
        format!("{scanned} partitions scanned at identity roses"),
    )
}

/// Criterion 7: Higgins–Lyndon and pushing witnesses. The rose graphs of F₂
/// and the path at minimum+6 contain no incompatible reductive pairs at all
/// — descent in those groups is essentially unique — so random roses over
/// the free group F₃ and the path-plus-isolated-vertex graph supply the
/// configurations that exercise both lemmas.
pub fn suite_hll_pushing() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut hll_checked = 0usize;
    let mut strong_checked = 0usize;
    let mut push_checked = 0usize;
    let mut fixture_roses: Vec<(DefiningGraph, MarkedRose)> = Vec::new();
    for g in [fixtures::f2(), fixtures::path3()] {
        let rg = crate::spine::enumerate_roses(&g, minimal_norm0(&g) + 6).unwrap();
        for node in &rg.nodes {
            fixture_roses.push((g.clone(), node.rose.clone()));
        }
    }
    {
        let f3 = DefiningGraph::parse(r#"{"vertices":["x","y","z"],"edges":[]}"#).unwrap();
        let path_plus = DefiningGraph::parse(
            r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"]]}"#,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for g in [f3, path_plus] {
            for _ in 0..120 {
                let n_moves = rng.gen_range(2..=5);
                let rose = random_rose(&mut rng, &g, n_moves);
                fixture_roses.push((g.clone(), rose));
            }
        }
    }
    for (g, rose) in &fixture_roses {
        let rose = rose;
        {
            let parts = partitions_of(g);
            let reductive: Vec<&GwPartition> = parts
                .iter()
                .filter(|p| {
                    !p.is_degenerate() && is_reductive(rose, p).unwrap() != Reductivity::Not
                })
                .collect();
            for (ai, a) in reductive.iter().enumerate() {
                for b in reductive.iter().skip(ai + 1) {
                    if relation(g, a, b) != Relation::Incompatible {
                        continue;
                    }
                    hll_checked += 1;
                    match hll_combine(rose, a, b, HllMode::Reductive) {
                        Ok((r, m)) => {
                            if !relation(g, &r, a).is_compatible()
                                || !relation(g, &r, b).is_compatible()
                            {
                                failures.push(format!("HLL witness incompatible: {r:?}"));
                            }
                            if !move_reduces(rose, &r, m) {
                                failures.push(format!("HLL witness not reductive: {r:?}"));
                            }
                        }
                        Err(e) => failures.push(format!("HLL failed: {e}")),
                    }
                    for (p, q) in [(a, b), (b, a)] {
                        if matches!(is_reductive(rose, p).unwrap(), Reductivity::Strong(_))
                            && is_zero_reductive(rose, q)
                        {
                            strong_checked += 1;
                            match hll_combine(rose, p, q, HllMode::Strong) {
                                Ok((r, m)) => {
                                    if move_delta0(rose, &r, m) >= 0 {
                                        failures
                                            .push(format!("strong HLL witness not strong: {r:?}"));
                                    }
                                }
                                Err(e) => failures.push(format!("strong HLL failed: {e}")),
                            }
                        }
                    }
                }
            }
            // Pushing: a maximally reductive (M, m) against every
            // incompatible reductive partner.
            if let Some((m_part, m)) = select_pushing_candidate(rose, &reductive) {
                for p in &reductive {
                    if relation(g, &m_part, p) != Relation::Incompatible
                        || p.side_of(m).is_none()
                    {
                        continue;
                    }
                    push_checked += 1;
                    match pushing_witness(rose, &m_part, m, p) {
                        Ok((r, w)) => {
                            if r.link != p.link {
                                failures.push(format!("pushing witness link mismatch: {r:?}"));
                            }
                            if !move_reduces(rose, &r, w) {
                                failures.push(format!("pushing witness not reductive: {r:?}"));
                            }
                        }
                        Err(e) => failures.push(format!("pushing failed: {e}")),
                    }
                }
            }
        }
    }
    if hll_checked == 0 || strong_checked == 0 || push_checked == 0 {
        failures.push(format!(
            "vacuous universe: hll={hll_checked} strong={strong_checked} push={push_checked}"
        ));
    }
    finish(
        "hll-pushing",
        start,
        failures,
        format!("{hll_checked} HLL pairs, {strong_checked} strong, {push_checked} pushing configs"),
    )
}

/// A reductive (M, m) with maximal link, maximally reductive in its link
/// class, or None when the rose has no reductive moves.
fn select_pushing_candidate(
    rose: &MarkedRose,
    reductive: &[&GwPartition],
) -> Option<(GwPartition, Letter)> {
    let g = &rose.graph;
    let mut pairs: Vec<(GwPartition, Letter)> = Vec::new();
    for p in reductive {
        for m in p.move_letters(g) {
            if move_reduces(rose, p, m) {
                pairs.push(((*p).clone(), m));
            }
        }
    }
    let links: Vec<LetterSet> = reductive.iter().map(|p| p.link).collect();
    pairs.retain(|(p, _)| links.iter().all(|l| p.link == *l || !p.link.is_subset(*l)));
    let (mut best, mut best_rose) = {
        let (p, m) = pairs.first()?.clone();
        let moved = rose.whitehead_move(&p, m).unwrap().0;
        ((p, m), moved)
    };
    for (p, m) in pairs.iter().skip(1) {
        if p.link != best.0.link {
            continue;
        }
        let moved = rose.whitehead_move(p, *m).unwrap().0;
        if norm_compare(&moved, &best_rose) == Ordering::Less {
            best = (p.clone(), *m);
            best_rose = moved;
        }
    }
    Some(best)
}

/// Criterion 8: star-graph crossings equal minimal-lift crossings.
pub fn suite_stargeom(seed: u64, trials: usize) -> SuiteOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut done = 0usize;
    while done < trials {
        let g = random_graph(&mut rng, 2, 4);
        let parts = partitions_of(&g);
        if parts.is_empty() {
            continue;
        }
        let part = parts[rng.gen_range(0..parts.len())].clone();
        let x = match build_blowup(&g, std::slice::from_ref(&part)) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("blowup failed: {e}"));
                continue;
            }
        };
        let w = random_cyclic_word(&mut rng, &g, 10);
        let (sg_count, _) = crossing_counts(&g, &part, &w).unwrap();
        match min_path_lift(&g, &[part.clone()], &x, &w) {
            Ok((_, counts)) => {
                let lift = counts.get(&EdgeLabel::Part(0)).copied().unwrap_or(0);
                if lift != sg_count {
                    failures.push(format!(
                        "{g:?} {part:?} {w:?}: star graph {sg_count}, lift {lift}"
                    ));
                }
            }
            Err(e) => failures.push(format!("lift failed on {g:?} {part:?} {w:?}: {e}")),
        }
        done += 1;
    }
    finish("stargraph-geometry", start, failures, format!("{done} randomized instances, exact"))
}

/// Spine spot checks: descent monotonicity, reductive stars nonempty, no
/// norm ties among distinct roses.
pub fn suite_spine() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut nodes_checked = 0usize;
    for g in [fixtures::f2(), fixtures::path3()] {
        let bound = minimal_norm0(&g) + 6;
        let rg = crate::spine::enumerate_roses(&g, bound).unwrap();
        for node in &rg.nodes {
            nodes_checked += 1;
            let (terminal, moves) = peak_reduce(&node.rose);
            if !rose_equal(&terminal, &MarkedRose::identity(&g)) {
                failures.push(format!("descent stuck at norm0 {}", terminal.norm0()));
            }
            let mut cur = node.rose.clone();
            let mut prev_norm0 = cur.norm0();
            for (part, m) in &moves {
                cur = cur.whitehead_move(part, *m).unwrap().0;
                if cur.norm0() > prev_norm0 {
                    failures.push("descent raised norm0".into());
                }
                prev_norm0 = cur.norm0();
            }
            if node.norm0 > minimal_norm0(&g) {
                if find_strongly_reductive(&node.rose).is_none() {
                    failures.push("non-minimal rose without a strong move".into());
                }
                let sp =
                    crate::spine::star_poset(&g, &node.rose, true, crate::spine::DEFAULT_POSET_CAP)
                        .unwrap();
                if sp.elements.is_empty() {
                    failures.push("non-minimal rose has an empty reductive star".into());
                }
            }
        }
        for (i, a) in rg.nodes.iter().enumerate() {
            for b in rg.nodes.iter().skip(i + 1) {
                if norm_compare(&a.rose, &b.rose) == Ordering::Equal {
                    failures.push("distinct roses with equal norm".into());
                }
            }
        }
    }
    finish("spine-descent", start, failures, format!("{nodes_checked} roses checked"))
}

/// Fixture-complex regressions.
pub fn suite_complex_regressions() -> SuiteOutcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let f2 = fixtures::f2();
    let s = build_salvetti(&f2);
    if (s.n_vertices, s.edges.len(), s.squares.len()) != (1, 2, 0) {
        failures.push("F₂ Salvetti shape".into());
    }
    let p3 = fixtures::path3();
    let s = build_salvetti(&p3);
    if s.euler_characteristic() != 0 {
        failures.push("path Salvetti Euler characteristic".into());
    }
    let z2 = fixtures::z2();
    let s = build_salvetti(&z2);
    if (s.n_vertices, s.edges.len(), s.squares.len()) != (1, 2, 1) {
        failures.push("torus shape".into());
    }
    finish("complex-regressions", start, failures, "fixture complexes".into())
}

pub fn run_suite(name: &str, seed: u64, trials: usize) -> Option<SuiteOutcome> {
    Some(match name {
        "length-change" => suite_length_change(seed, trials),
        "counting" => suite_counting(seed, trials),
        "blowup" => suite_blowup(),
        "treelike" => suite_treelike(),
        "peak" => suite_peak(seed, trials.min(500)),
        "minimality" => suite_minimality(),
        "hll-pushing" => suite_hll_pushing(),
        "stargeom" => suite_stargeom(seed, trials),
        "spine" => suite_spine(),
        "complex" => suite_complex_regressions(),
        _ => return None,
    })
}

/// Suite groups for the CLI: "lemmas" runs the counting-flavoured checks,
/// "all" everything.
pub fn suite_names(group: &str) -> Vec<&'static str> {
    match group {
        "lemmas" => vec!["counting", "length-change", "stargeom"],
        _ => vec![
            "length-change",
            "counting",
            "blowup",
            "treelike",
            "peak",
            "minimality",
            "hll-pushing",
            "stargeom",
            "spine",
            "complex",
        ],
    }
}
