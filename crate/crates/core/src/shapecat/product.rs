use super::{split_top_level, Arrow, CatError, CatRef, Category, HomCache, Mor, Obj};

/// Finite product of categories; dim is the sum of the component dimensions.
pub struct Product {
    factors: Vec<CatRef>,
    trunc: usize,
    cache: HomCache,
}

impl Product {
    pub fn new(factors: Vec<CatRef>, trunc: usize) -> Product {
        Product { factors, trunc, cache: HomCache::default() }
    }

    pub fn factors(&self) -> &[CatRef] {
        &self.factors
    }

    fn comps(a: &Obj) -> &[Obj] {
        match a {
            Obj::Tuple(v) => v,
            _ => panic!("expected a tuple object, got {a}"),
        }
    }

    pub fn mcomps(f: &Mor) -> &[Mor] {
        match &f.arrow {
            Arrow::Tuple(v) => v,
            _ => panic!("expected a tuple morphism"),
        }
    }

    pub fn tuple(parts: Vec<Mor>) -> Mor {
        let src = Obj::Tuple(parts.iter().map(|f| f.src.clone()).collect());
        let tgt = Obj::Tuple(parts.iter().map(|f| f.tgt.clone()).collect());
        Mor::new(src, tgt, Arrow::Tuple(parts))
    }

    /// Replaces component p of the identity on `a` by g.
    fn lift(&self, a: &[Obj], p: usize, g: Mor) -> Mor {
        let parts = a.iter().enumerate().map(|(q, o)| if q == p { g.clone() } else { self.factors[q].identity(o) }).collect();
        Product::tuple(parts)
    }

    fn objects_rec(&self, p: usize, d: usize) -> Vec<Vec<Obj>> {
        if p == self.factors.len() {
            return if d == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for k in 0..=d.min(self.factors[p].max_dim()) {
            let here = self.factors[p].objects_of_dim(k);
            if here.is_empty() {
                continue;
            }
            for rest in self.objects_rec(p + 1, d - k) {
                for o in &here {
                    let mut v = vec![o.clone()];
                    v.extend(rest.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }
}

impl Category for Product {
    fn name(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|c| c.name()).collect();
        format!("prod:{}", parts.join(","))
    }
    fn max_dim(&self) -> usize {
        self.trunc
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        assert!(d <= self.trunc, "dimension {d} beyond truncation {}", self.trunc);
        let mut v: Vec<Obj> = self.objects_rec(0, d).into_iter().map(Obj::Tuple).collect();
        v.sort();
        v
    }
    fn dim(&self, a: &Obj) -> usize {
        Product::comps(a).iter().zip(&self.factors).map(|(o, c)| c.dim(o)).sum()
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (ac, bc) = (Product::comps(a), Product::comps(b));
        let homs: Vec<_> = self.factors.iter().enumerate().map(|(p, c)| c.hom(&ac[p], &bc[p])).collect();
        let mut out: Vec<Vec<Mor>> = vec![vec![]];
        for h in &homs {
            let mut next = Vec::with_capacity(out.len() * h.len());
            for prefix in &out {
                for f in h.iter() {
                    let mut v = prefix.clone();
                    v.push(f.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Product::tuple).collect()
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        Product::tuple(Product::comps(a).iter().zip(&self.factors).map(|(o, c)| c.identity(o)).collect())
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let parts = Product::mcomps(g)
            .iter()
            .zip(Product::mcomps(f))
            .zip(&self.factors)
            .map(|((gp, fp), c)| c.compose_raw(gp, fp))
            .collect();
        Product::tuple(parts)
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let ac = Product::comps(a);
        let d = self.dim(a);
        let mut out = Vec::new();
        for (p, c) in self.factors.iter().enumerate() {
            for g in c.generators_from(&ac[p]) {
                let grow = c.dim(&g.tgt) as i64 - c.dim(&g.src) as i64;
                if d as i64 + grow <= self.trunc as i64 {
                    out.push(self.lift(ac, p, g));
                }
            }
        }
        out
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let bc = Product::comps(b);
        let d = self.dim(b);
        let mut out = Vec::new();
        for (p, c) in self.factors.iter().enumerate() {
            for g in c.generators_into(&bc[p]) {
                let grow = c.dim(&g.src) as i64 - c.dim(&g.tgt) as i64;
                if d as i64 + grow <= self.trunc as i64 {
                    out.push(self.lift(bc, p, g));
                }
            }
        }
        out
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        let mut cur: Vec<Obj> = Product::comps(&f.src).to_vec();
        let mut word = Vec::new();
        for (p, (fp, c)) in Product::mcomps(f).iter().zip(&self.factors).enumerate() {
            for g in c.factor(fp)? {
                word.push(self.lift(&cur, p, g));
            }
            cur[p] = fp.tgt.clone();
        }
        Ok(word)
    }
    fn mor_name(&self, f: &Mor) -> String {
        let parts: Vec<String> = Product::mcomps(f)
            .iter()
            .zip(&self.factors)
            .map(|(fp, c)| if *fp == c.identity(&fp.src) { format!("id{}", c.obj_name(&fp.src)) } else { c.mor_name(fp) })
            .collect();
        parts.join("|")
    }
    fn obj_name(&self, a: &Obj) -> String {
        let parts: Vec<String> = Product::comps(a).iter().zip(&self.factors).map(|(o, c)| c.obj_name(o)).collect();
        format!("({})", parts.join(","))
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| CatError::BadObject(format!("product objects are written (a,b), got {s:?}")))?;
        let parts = split_top_level(inner, ',');
        if parts.len() != self.factors.len() {
            return Err(CatError::BadObject(format!("expected {} components in {s:?}", self.factors.len())));
        }
        let comps = parts.iter().zip(&self.factors).map(|(p, c)| c.parse_object(p)).collect::<Result<Vec<_>, _>>()?;
        let o = Obj::Tuple(comps);
        if self.dim(&o) > self.trunc {
            return Err(CatError::BadObject(format!("{s} beyond truncation {}", self.trunc)));
        }
        Ok(o)
    }
    fn is_catenary(&self) -> bool {
        self.factors.iter().all(|c| c.is_catenary())
    }
    fn is_finite(&self) -> bool {
        self.factors.iter().all(|c| c.is_finite())
    }
    fn all_objects(&self) -> Vec<Obj> {
        if !self.is_finite() {
            return (0..=self.trunc).flat_map(|d| self.objects_of_dim(d)).collect();
        }
        let mut out: Vec<Vec<Obj>> = vec![vec![]];
        for c in &self.factors {
            let objs = c.all_objects();
            out = out.iter().flat_map(|p| objs.iter().map(move |o| [p.clone(), vec![o.clone()]].concat())).collect();
        }
        out.into_iter().map(Obj::Tuple).collect()
    }
    fn mono_shortcut(&self, f: &Mor) -> Option<bool> {
        let mut all = true;
        for (fp, c) in Product::mcomps(f).iter().zip(&self.factors) {
            all &= c.mono_shortcut(fp)?;
        }
        Some(all)
    }
    fn codim1_closed(&self, a: &Obj) -> Option<Vec<Mor>> {
        let ac = Product::comps(a);
        let mut out = Vec::new();
        for (p, c) in self.factors.iter().enumerate() {
            for g in c.codim1_closed(&ac[p])? {
                out.push(self.lift(ac, p, g));
            }
        }
        Some(out)
    }
    /// Koszul rule: the sign of a face in component p is multiplied by
    /// (−1)^(sum of the dimensions of the earlier components).
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        let parts = Product::mcomps(f);
        let mut before = 0;
        for (fp, c) in parts.iter().zip(&self.factors) {
            if *fp != c.identity(&fp.src) {
                let s = c.standard_sign(fp)?;
                return Some(if before % 2 == 0 { s } else { -s });
            }
            before += c.dim(&fp.src);
        }
        None
    }
}

/// The opposite category.
pub struct Opposite {
    base: CatRef,
    cache: HomCache,
}

impl Opposite {
    pub fn new(base: CatRef) -> Opposite {
        Opposite { base, cache: HomCache::default() }
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    /// The opposite of a base morphism.
    pub fn op(f: &Mor) -> Mor {
        Mor::new(f.tgt.clone(), f.src.clone(), Arrow::Op(Box::new(f.clone())))
    }

    /// The base morphism underlying an opposite morphism.
    pub fn unop(f: &Mor) -> &Mor {
        match &f.arrow {
            Arrow::Op(b) => b,
            _ => panic!("expected an opposite morphism"),
        }
    }
}

impl Category for Opposite {
    fn name(&self) -> String {
        format!("op:{}", self.base.name())
    }
    fn max_dim(&self) -> usize {
        self.base.max_dim()
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        self.base.objects_of_dim(d)
    }
    fn dim(&self, a: &Obj) -> usize {
        self.base.dim(a)
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        self.base.hom(b, a).iter().map(Opposite::op).collect()
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        Opposite::op(&self.base.identity(a))
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        Opposite::op(&self.base.compose_raw(Opposite::unop(f), Opposite::unop(g)))
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        self.base.generators_into(a).iter().map(Opposite::op).collect()
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        self.base.generators_from(b).iter().map(Opposite::op).collect()
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(self.base.factor(Opposite::unop(f))?.iter().rev().map(Opposite::op).collect())
    }
    fn mor_name(&self, f: &Mor) -> String {
        format!("{}^op", self.base.mor_name(Opposite::unop(f)))
    }
    fn obj_name(&self, a: &Obj) -> String {
        self.base.obj_name(a)
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        self.base.parse_object(s)
    }
    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }
    fn all_objects(&self) -> Vec<Obj> {
        self.base.all_objects()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, check_factorizations, codim1_monos, Delta};
    use std::sync::Arc;

    fn delta2(trunc: usize) -> Product {
        Product::new(vec![Arc::new(Delta::new(trunc)), Arc::new(Delta::new(trunc))], trunc)
    }

    #[test]
    fn product_basics() {
        let p = delta2(3);
        assert_eq!(p.objects_of_dim(2).len(), 3);
        let a = p.parse_object("(1,1)").unwrap();
        let b = p.parse_object("(1,2)").unwrap();
        assert_eq!(p.hom(&a, &b).len(), 3 * 6);
        check_axioms(&p, 2).unwrap();
        check_factorizations(&p, 3).unwrap();
        let c = codim1_monos(&p, &a).unwrap();
        assert_eq!(c.len(), 4);
        let signs: Vec<i64> = c.iter().map(|f| p.standard_sign(f).unwrap()).collect();
        // (δ_0,id), (δ_1,id), (id,δ_0), (id,δ_1) on Δ_1 × Δ_1
        assert_eq!(signs, vec![1, -1, -1, 1]);
    }

    #[test]
    fn opposite_basics() {
        let o = Opposite::new(Arc::new(Delta::new(3)));
        assert_eq!(o.hom(&Obj::Dim(2), &Obj::Dim(1)).len(), 6);
        check_axioms(&o, 2).unwrap();
        check_factorizations(&o, 3).unwrap();
    }
}
