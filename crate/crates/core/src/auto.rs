//! Automorphisms of A_Γ given by generator images, always carried together
//! with their inverses so that composition and inversion stay exact.

use crate::error::Error;
use crate::graph::DefiningGraph;
use crate::word::{reduce, Letter, Word};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    /// Reduced canonical image of each generator.
    pub images: Vec<Word>,
    /// Images of the inverse automorphism.
    pub inverse_images: Vec<Word>,
}

impl std::fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Auto{:?}", self.images)
    }
}

impl Automorphism {
    pub fn identity(g: &DefiningGraph) -> Self {
        let images: Vec<Word> = (0..g.n()).map(|v| Word(vec![Letter::new(v, true)])).collect();
        Automorphism { inverse_images: images.clone(), images }
    }

    /// The inversion v ↦ v⁻¹.
    pub fn inversion(g: &DefiningGraph, v: usize) -> Self {
        let mut images = Automorphism::identity(g).images;
        images[v] = Word(vec![Letter::new(v, false)]);
        Automorphism { inverse_images: images.clone(), images }
    }

    /// The graph automorphism `v ↦ perm[v]`.
    pub fn graph_auto(g: &DefiningGraph, perm: &[usize]) -> Self {
        let images: Vec<Word> =
            (0..g.n()).map(|v| Word(vec![Letter::new(perm[v], true)])).collect();
        let mut inv_perm = vec![0; g.n()];
        for v in 0..g.n() {
            inv_perm[perm[v]] = v;
        }
        let inverse_images =
            (0..g.n()).map(|v| Word(vec![Letter::new(inv_perm[v], true)])).collect();
        Automorphism { images, inverse_images }
    }

    /// Conjugation v ↦ a v a⁻¹.
    pub fn inner(g: &DefiningGraph, a: &Word) -> Self {
        let conj = |word: &Word| {
            let mut v = a.0.clone();
            v.extend_from_slice(&word.0);
            v.extend(a.inverse().0);
            reduce(g, &Word(v))
        };
        let images: Vec<Word> =
            (0..g.n()).map(|v| conj(&Word(vec![Letter::new(v, true)]))).collect();
        let a_inv = a.inverse();
        let conj_inv = |word: &Word| {
            let mut v = a_inv.0.clone();
            v.extend_from_slice(&word.0);
            v.extend(a.0.clone());
            reduce(g, &Word(v))
        };
        let inverse_images =
            (0..g.n()).map(|v| conj_inv(&Word(vec![Letter::new(v, true)]))).collect();
        Automorphism { images, inverse_images }
    }

    /// Graph automorphism composed with inversions: `v ↦ perm[v]^sign`.
    pub fn isometry(g: &DefiningGraph, perm: &[usize], flip: &[bool]) -> Self {
        let mut a = Automorphism::graph_auto(g, perm);
        for v in 0..g.n() {
            if flip[v] {
                a = compose(g, &Automorphism::inversion(g, perm[v]), &a);
            }
        }
        a
    }

    pub fn apply(&self, g: &DefiningGraph, w: &Word) -> Word {
        apply_images(g, &self.images, w)
    }

    pub fn apply_inverse(&self, g: &DefiningGraph, w: &Word) -> Word {
        apply_images(g, &self.inverse_images, w)
    }

    pub fn invert(&self) -> Self {
        Automorphism {
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    pub fn is_identity(&self, g: &DefiningGraph) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(v, w)| w.0 == vec![Letter::new(v, true)]) && g.n() == self.images.len()
    }

    /// Exponent-sum matrix determinant; ±1 is necessary for invertibility.
    pub fn abelianized_det(&self, g: &DefiningGraph) -> i64 {
        let n = g.n();
        let mut m = vec![vec![0i64; n]; n];
        for (v, w) in self.images.iter().enumerate() {
            for l in &w.0 {
                m[l.v][v] += if l.pos { 1 } else { -1 };
            }
        }
        det_bareiss(&mut m)
    }
}

pub fn apply_images(g: &DefiningGraph, images: &[Word], w: &Word) -> Word {
    let mut out = Vec::new();
    for l in &w.0 {
        if l.pos {
            out.extend_from_slice(&images[l.v].0);
        } else {
            out.extend(images[l.v].inverse().0);
        }
    }
    reduce(g, &Word(out))
}

/// (f ∘ g)(v) = f(g(v)).
pub fn compose(graph: &DefiningGraph, f: &Automorphism, g: &Automorphism) -> Automorphism {
    let images = g.images.iter().map(|w| f.apply(graph, w)).collect();
    let inverse_images = f
        .inverse_images
        .iter()
        .map(|w| g.apply_inverse(graph, w))
        .collect();
    Automorphism { images, inverse_images }
}

/// Check the defining relations are preserved by candidate images.
pub fn is_homomorphism(g: &DefiningGraph, images: &[Word]) -> bool {
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if g.adjacent(u, v) {
                let comm = Word(
                    [
                        images[u].0.clone(),
                        images[v].0.clone(),
                        images[u].inverse().0,
                        images[v].inverse().0,
                    ]
                    .concat(),
                );
                if !reduce(g, &comm).is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

/// Validate candidate images (one word per generator), without inverting.
pub fn validate_images(g: &DefiningGraph, images: &[Word]) -> Result<(), Error> {
    if images.len() != g.n() {
        return Err(Error::NotAutomorphism(format!(
            "{} images for {} generators",
            images.len(),
            g.n()
        )));
    }
    if !is_homomorphism(g, images) {
        return Err(Error::NotAutomorphism(
            "a defining relation is not preserved".into(),
        ));
    }
    let mut m = vec![vec![0i64; g.n()]; g.n()];
    for (v, w) in images.iter().enumerate() {
        for l in &w.0 {
            m[l.v][v] += if l.pos { 1 } else { -1 };
        }
    }
    let det = det_bareiss(&mut m);
    if det != 1 && det != -1 {
        return Err(Error::NotAutomorphism(format!(
            "abelianized determinant is {det}"
        )));
    }
    Ok(())
}

fn det_bareiss(m: &mut [Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_and_inversion() {
        let g = fixtures::f2();
        let id = Automorphism::identity(&g);
        let w = Word::parse(&g, "x y x^-1").unwrap();
        assert_eq!(id.apply(&g, &w), reduce(&g, &w));
        let inv = Automorphism::inversion(&g, 0);
        let twice = compose(&g, &inv, &inv);
        assert!(twice.is_identity(&g));
    }

    #[test]
    fn compose_tracks_inverses() {
        let g = fixtures::path3();
        let a = Automorphism::inner(&g, &Word::parse(&g, "a c").unwrap());
        let b = Automorphism::inversion(&g, 2);
        let ab = compose(&g, &a, &b);
        let both = compose(&g, &ab, &ab.invert());
        assert!(both.is_identity(&g));
    }

    #[test]
    fn det_check_rejects_non_injective() {
        let g = fixtures::f2();
        let images = vec![Word::parse(&g, "x").unwrap(), Word::parse(&g, "x").unwrap()];
        assert!(validate_images(&g, &images).is_err());
    }

    #[test]
    fn homomorphism_check() {
        let g = fixtures::path3();
        // a ↦ ab keeps [a,b] and leaves [b,c] alone.
        let imgs = vec![
            Word::parse(&g, "a b").unwrap(),
            Word::parse(&g, "b").unwrap(),
            Word::parse(&g, "c").unwrap(),
        ];
        assert!(is_homomorphism(&g, &imgs));
        // b ↦ ba breaks [b,c] since a and c do not commute.
        let bad = vec![
            Word::parse(&g, "a").unwrap(),
            Word::parse(&g, "b a").unwrap(),
            Word::parse(&g, "c").unwrap(),
        ];
        assert!(!is_homomorphism(&g, &bad));
    }
}
