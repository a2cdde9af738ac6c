use super::delta::dim_of;
use super::{parse_usize, Arrow, CatError, Category, HomCache, Letter, Mor, Obj};

/// The globe category 𝔾, or the reflexive globe category 𝔾_ref.
///
/// A morphism 𝔻_i → 𝔻_n is stored as (k, letter): descend from 𝔻_i to 𝔻_k
/// through κ's, then climb to 𝔻_n starting with σ or τ (letter `Id` when
/// k = n).  In 𝔾 only k = i occurs.
pub struct Globe {
    trunc: usize,
    reflexive: bool,
    cache: HomCache,
}

impl Globe {
    pub fn new(trunc: usize, reflexive: bool) -> Globe {
        Globe { trunc, reflexive, cache: HomCache::default() }
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexive
    }

    pub fn mor(i: usize, n: usize, k: usize, l: Letter) -> Mor {
        Mor::new(Obj::Dim(i), Obj::Dim(n), Arrow::Glob(k, l))
    }

    /// σ_n: 𝔻_{n−1} → 𝔻_n
    pub fn sigma(n: usize) -> Mor {
        Globe::mor(n - 1, n, n - 1, Letter::Sigma)
    }

    /// τ_n: 𝔻_{n−1} → 𝔻_n
    pub fn tau(n: usize) -> Mor {
        Globe::mor(n - 1, n, n - 1, Letter::Tau)
    }

    /// κ_n: 𝔻_{n+1} → 𝔻_n
    pub fn kappa(n: usize) -> Mor {
        Globe::mor(n + 1, n, n, Letter::Id)
    }

    fn parts(f: &Mor) -> (usize, Letter) {
        match f.arrow {
            Arrow::Glob(k, l) => (k, l),
            _ => panic!("not a globe morphism"),
        }
    }
}

impl Category for Globe {
    fn name(&self) -> String {
        if self.reflexive { "globe_ref".into() } else { "globe".into() }
    }
    fn max_dim(&self) -> usize {
        self.trunc
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        assert!(d <= self.trunc, "dimension {d} beyond truncation {}", self.trunc);
        vec![Obj::Dim(d)]
    }
    fn dim(&self, a: &Obj) -> usize {
        dim_of(a)
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (i, n) = (dim_of(a), dim_of(b));
        let ks: Vec<usize> = if self.reflexive { (0..=i.min(n)).collect() } else if i <= n { vec![i] } else { vec![] };
        let mut out = Vec::new();
        for k in ks {
            if k < n {
                out.push(Globe::mor(i, n, k, Letter::Sigma));
                out.push(Globe::mor(i, n, k, Letter::Tau));
            } else {
                out.push(Globe::mor(i, n, k, Letter::Id));
            }
        }
        out
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        let n = dim_of(a);
        Globe::mor(n, n, n, Letter::Id)
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let (k1, l1) = Globe::parts(f);
        let (k2, l2) = Globe::parts(g);
        let n = dim_of(&g.tgt);
        let (k, l) = if k2 < k1 {
            (k2, l2)
        } else if k2 > k1 {
            (k1, l1)
        } else {
            // g's descent cancels the whole climb of f
            (k1, l2)
        };
        let l = if k == n { Letter::Id } else { l };
        Globe::mor(dim_of(&f.src), n, k, l)
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let n = dim_of(a);
        let mut out = Vec::new();
        if n < self.trunc {
            out.push(Globe::sigma(n + 1));
            out.push(Globe::tau(n + 1));
        }
        if self.reflexive && n >= 1 {
            out.push(Globe::kappa(n - 1));
        }
        out
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let n = dim_of(b);
        let mut out = Vec::new();
        if n >= 1 {
            out.push(Globe::sigma(n));
            out.push(Globe::tau(n));
        }
        if self.reflexive && n < self.trunc {
            out.push(Globe::kappa(n));
        }
        out
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        let (k, l) = Globe::parts(f);
        let i = dim_of(&f.src);
        let n = dim_of(&f.tgt);
        let mut word: Vec<Mor> = (k..i).rev().map(Globe::kappa).collect();
        if k < n {
            word.push(if l == Letter::Sigma { Globe::sigma(k + 1) } else { Globe::tau(k + 1) });
            word.extend((k + 2..=n).map(Globe::sigma));
        }
        Ok(word)
    }
    fn mor_name(&self, f: &Mor) -> String {
        let (k, l) = Globe::parts(f);
        let i = dim_of(&f.src);
        let n = dim_of(&f.tgt);
        if k == i && n == i + 1 {
            return match l {
                Letter::Sigma => format!("sigma{n}"),
                _ => format!("tau{n}"),
            };
        }
        if k == n && i == n + 1 {
            return format!("kappa{n}");
        }
        let l = match l {
            Letter::Sigma => "s",
            Letter::Tau => "t",
            Letter::Id => "i",
        };
        format!("<{i}>{k}{l}<{n}>")
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let n = parse_usize(s)?;
        if n > self.trunc {
            return Err(CatError::BadObject(format!("𝔻_{n} beyond truncation {}", self.trunc)));
        }
        Ok(Obj::Dim(n))
    }
    fn is_catenary(&self) -> bool {
        true
    }
    fn mono_shortcut(&self, f: &Mor) -> Option<bool> {
        Some(Globe::parts(f).0 == dim_of(&f.src))
    }
    fn codim1_closed(&self, a: &Obj) -> Option<Vec<Mor>> {
        let n = dim_of(a);
        Some(if n == 0 { Vec::new() } else { vec![Globe::sigma(n), Globe::tau(n)] })
    }
    /// σ ↦ −1, τ ↦ +1, so that the differential reads t − s.
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        if dim_of(&f.src) + 1 != dim_of(&f.tgt) {
            return None;
        }
        match Globe::parts(f).1 {
            Letter::Sigma => Some(-1),
            Letter::Tau => Some(1),
            Letter::Id => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, check_factorizations, compose_word, is_mono};

    #[test]
    fn counts() {
        let g = Globe::new(6, false);
        let r = Globe::new(6, true);
        for i in 0..=6 {
            for n in 0..=6 {
                let a = Obj::Dim(i);
                let b = Obj::Dim(n);
                let e = if i < n { 2 } else if i == n { 1 } else { 0 };
                assert_eq!(g.hom(&a, &b).len(), e);
                let e = if i < n { 2 * i + 2 } else { 2 * n + 1 };
                assert_eq!(r.hom(&a, &b).len(), e);
            }
        }
    }

    #[test]
    fn relations() {
        let r = Globe::new(4, true);
        assert_eq!(r.compose_raw(&Globe::kappa(1), &Globe::sigma(2)), r.identity(&Obj::Dim(1)));
        assert_eq!(r.compose_raw(&Globe::kappa(1), &Globe::tau(2)), r.identity(&Obj::Dim(1)));
        let g = Globe::new(4, false);
        assert_eq!(g.compose_raw(&Globe::sigma(2), &Globe::tau(1)), g.compose_raw(&Globe::tau(2), &Globe::tau(1)));
        assert_eq!(g.compose_raw(&Globe::sigma(2), &Globe::sigma(1)), g.compose_raw(&Globe::tau(2), &Globe::sigma(1)));
        assert!(!is_mono(&r, &Globe::kappa(0), None));
        assert!(!is_mono(&r, &Globe::kappa(0), Some(1)));
        assert!(is_mono(&r, &Globe::sigma(1), Some(2)));
    }

    #[test]
    fn axioms() {
        for refl in [false, true] {
            let g = Globe::new(4, refl);
            check_axioms(&g, 3).unwrap();
            check_factorizations(&g, 4).unwrap();
        }
    }

    /// Composition agrees with composing generator words via the relations,
    /// checked against a word-rewriting oracle.
    #[test]
    fn composition_matches_word_rewriting() {
        let r = Globe::new(4, true);
        for i in 0..=4 {
            for n in 0..=4 {
                for m in 0..=4 {
                    for f in r.hom(&Obj::Dim(i), &Obj::Dim(n)).iter() {
                        for g in r.hom(&Obj::Dim(n), &Obj::Dim(m)).iter() {
                            let mut w = r.factor(f).unwrap();
                            w.extend(r.factor(g).unwrap());
                            let expect = rewrite(&w, i);
                            assert_eq!(compose_word(&r, &Obj::Dim(i), &w), expect);
                            assert_eq!(r.compose_raw(g, f), expect);
                        }
                    }
                }
            }
        }
    }

    /// Normalizes a word of σ/τ/κ letters with the globular relations:
    /// κσ = κτ = id, and a climb depends only on its first letter.
    fn rewrite(word: &[Mor], start: usize) -> Mor {
        #[derive(Clone, Copy, PartialEq)]
        enum G {
            Up(Letter),
            Down,
        }
        let mut w: Vec<G> = word
            .iter()
            .map(|f| match f.arrow {
                Arrow::Glob(_, Letter::Id) => G::Down,
                Arrow::Glob(_, l) => G::Up(l),
                _ => unreachable!(),
            })
            .collect();
        loop {
            let pos = w.windows(2).position(|p| matches!(p[0], G::Up(_)) && p[1] == G::Down);
            match pos {
                Some(p) => {
                    w.drain(p..p + 2);
                }
                None => break,
            }
        }
        let downs = w.iter().filter(|g| **g == G::Down).count();
        let k = start - downs;
        let ups: Vec<Letter> = w.iter().filter_map(|g| if let G::Up(l) = g { Some(*l) } else { None }).collect();
        let n = k + ups.len();
        let l = ups.first().copied().unwrap_or(Letter::Id);
        Globe::mor(start, n, k, l)
    }
}
