use super::{monotone_maps, parse_usize, Arrow, CatError, Category, HomCache, Mor, Obj};

/// The simplex category Δ, or its subcategory of monomorphisms Δ′.
pub struct Delta {
    trunc: usize,
    mono_only: bool,
    cache: HomCache,
}

impl Delta {
    pub fn new(trunc: usize) -> Delta {
        Delta { trunc, mono_only: false, cache: HomCache::default() }
    }

    pub fn mono(trunc: usize) -> Delta {
        Delta { trunc, mono_only: true, cache: HomCache::default() }
    }

    pub fn is_mono_only(&self) -> bool {
        self.mono_only
    }

    /// δ_i: Δ_{n−1} → Δ_n, the injection missing i.
    pub fn face(n: usize, i: usize) -> Mor {
        let v: Vec<u32> = (0..n as u32).map(|x| if x < i as u32 { x } else { x + 1 }).collect();
        Mor::new(Obj::Dim(n - 1), Obj::Dim(n), Arrow::Map(v))
    }

    /// σ_i: Δ_{n+1} → Δ_n, the surjection hitting i twice.
    pub fn degeneracy(n: usize, i: usize) -> Mor {
        let v: Vec<u32> = (0..=(n as u32 + 1)).map(|x| if x <= i as u32 { x } else { x - 1 }).collect();
        Mor::new(Obj::Dim(n + 1), Obj::Dim(n), Arrow::Map(v))
    }

    pub fn map(m: usize, n: usize, v: Vec<u32>) -> Mor {
        debug_assert_eq!(v.len(), m + 1);
        Mor::new(Obj::Dim(m), Obj::Dim(n), Arrow::Map(v))
    }
}

pub(crate) fn dim_of(a: &Obj) -> usize {
    match a {
        Obj::Dim(n) => *n,
        _ => panic!("expected a dimension object, got {a}"),
    }
}

/// Generator word for a monotone map: degeneracies (descending positions)
/// then faces (ascending missing values).
pub(crate) fn delta_word(f: &Mor) -> Vec<Mor> {
    let v = f.map();
    let n = dim_of(&f.tgt);
    let mut word = Vec::new();
    let mut cur = v.len() - 1;
    for x in (0..v.len() - 1).rev() {
        if v[x] == v[x + 1] {
            word.push(Delta::degeneracy(cur - 1, x));
            cur -= 1;
        }
    }
    let image: Vec<u32> = {
        let mut im = v.to_vec();
        im.dedup();
        im
    };
    for k in 0..=n as u32 {
        if !image.contains(&k) {
            cur += 1;
            word.push(Delta::face(cur, k as usize));
        }
    }
    word
}

pub(crate) fn delta_mor_name(f: &Mor) -> String {
    let v = f.map();
    let m = v.len() - 1;
    let n = dim_of(&f.tgt);
    if m + 1 == n {
        for i in 0..=n {
            if *f == Delta::face(n, i) {
                return format!("d{n}.{i}");
            }
        }
    }
    if m == n + 1 {
        for i in 0..=n {
            if *f == Delta::degeneracy(n, i) {
                return format!("s{n}.{i}");
            }
        }
    }
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("<{}>", parts.join(""))
}

impl Category for Delta {
    fn name(&self) -> String {
        if self.mono_only { "delta_mono".into() } else { "delta".into() }
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
        let (m, n) = (dim_of(a), dim_of(b));
        monotone_maps(m, n, self.mono_only).into_iter().map(|v| Delta::map(m, n, v)).collect()
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        let n = dim_of(a);
        Delta::map(n, n, (0..=n as u32).collect())
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let gv = g.map();
        let v = f.map().iter().map(|&x| gv[x as usize]).collect();
        Mor::new(f.src.clone(), g.tgt.clone(), Arrow::Map(v))
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let n = dim_of(a);
        let mut out = Vec::new();
        if n < self.trunc {
            out.extend((0..=n + 1).map(|i| Delta::face(n + 1, i)));
        }
        if !self.mono_only && n >= 1 {
            out.extend((0..n).map(|i| Delta::degeneracy(n - 1, i)));
        }
        out
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let n = dim_of(b);
        let mut out = Vec::new();
        if n >= 1 {
            out.extend((0..=n).map(|i| Delta::face(n, i)));
        }
        if !self.mono_only && n < self.trunc {
            out.extend((0..=n).map(|i| Delta::degeneracy(n, i)));
        }
        out
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(delta_word(f))
    }
    fn mor_name(&self, f: &Mor) -> String {
        delta_mor_name(f)
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let n = parse_usize(s)?;
        if n > self.trunc {
            return Err(CatError::BadObject(format!("Δ_{n} beyond truncation {}", self.trunc)));
        }
        Ok(Obj::Dim(n))
    }
    fn is_catenary(&self) -> bool {
        true
    }
    fn mono_shortcut(&self, f: &Mor) -> Option<bool> {
        let v = f.map();
        Some(v.windows(2).all(|w| w[0] < w[1]))
    }
    fn codim1_closed(&self, a: &Obj) -> Option<Vec<Mor>> {
        let n = dim_of(a);
        Some(if n == 0 { Vec::new() } else { (0..=n).map(|i| Delta::face(n, i)).collect() })
    }
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        let v = f.map();
        let n = dim_of(&f.tgt);
        if v.len() != n {
            return None;
        }
        let missing = (0..=n as u32).find(|k| !v.contains(k))?;
        Some(if missing % 2 == 0 { 1 } else { -1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, check_factorizations, codim1_monos, is_mono};

    #[test]
    fn hom_counts() {
        let d = Delta::new(3);
        assert_eq!(d.hom(&Obj::Dim(1), &Obj::Dim(2)).len(), 6);
        assert_eq!(d.hom(&Obj::Dim(2), &Obj::Dim(1)).len(), 4);
        let m = Delta::mono(3);
        assert_eq!(m.hom(&Obj::Dim(2), &Obj::Dim(1)).len(), 0);
        assert_eq!(m.hom(&Obj::Dim(1), &Obj::Dim(2)).len(), 3);
    }

    #[test]
    fn axioms_and_words() {
        let d = Delta::new(3);
        check_axioms(&d, 2).unwrap();
        check_factorizations(&d, 3).unwrap();
        check_factorizations(&Delta::mono(3), 3).unwrap();
    }

    #[test]
    fn monos_and_faces() {
        let d = Delta::new(3);
        assert!(is_mono(&d, &Delta::face(1, 0), None));
        assert!(!is_mono(&d, &Delta::degeneracy(0, 0), None));
        assert!(!is_mono(&d, &Delta::degeneracy(0, 0), Some(1)));
        let c = codim1_monos(&d, &Obj::Dim(2)).unwrap();
        assert_eq!(c.len(), 3);
        let signs: Vec<i64> = c.iter().map(|f| d.standard_sign(f).unwrap()).collect();
        assert_eq!(signs, vec![1, -1, 1]);
        assert_eq!(crate::shapecat::codim1_brute(&d, &Obj::Dim(2)).len(), 3);
    }

    #[test]
    fn names() {
        assert_eq!(delta_mor_name(&Delta::face(2, 1)), "d2.1");
        assert_eq!(delta_mor_name(&Delta::degeneracy(1, 0)), "s1.0");
    }
}
