//! Abelian presheaves with free finitely generated values.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parking_lot::RwLock;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chains::JsonInt;
use crate::intlinalg::{FgAbGroup, IntMatrix};
use crate::shapecat::{generator_table, make_category, CatError, CatRef, Category, Functor, Mor, Obj, SetRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a presheaf: {0}")]
    NotFunctorial(String),
    #[error("base categories differ: {0} vs {1}")]
    BaseMismatch(String, String),
    #[error("malformed presheaf: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cat(#[from] CatError),
}

type RankFn = Arc<dyn Fn(&Obj) -> usize + Send + Sync>;
type ActFn = Arc<dyn Fn(&Mor) -> IntMatrix + Send + Sync>;

/// X: A^op → Ab with X(a) = ℤ^rank(a).  For f: a → b, `act(f)` is the
/// rank(a) × rank(b) matrix of X(f): X(b) → X(a).
#[derive(Clone)]
pub struct AbPresheaf {
    base: CatRef,
    label: String,
    rank_fn: RankFn,
    act_fn: ActFn,
    cache: Arc<RwLock<HashMap<Mor, IntMatrix>>>,
}

impl std::fmt::Debug for AbPresheaf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AbPresheaf({} on {})", self.label, self.base.name())
    }
}

impl AbPresheaf {
    /// A presheaf given by closures; nothing is validated.
    pub fn from_fns(
        base: CatRef,
        label: &str,
        rank: impl Fn(&Obj) -> usize + Send + Sync + 'static,
        act: impl Fn(&Mor) -> IntMatrix + Send + Sync + 'static,
    ) -> AbPresheaf {
        AbPresheaf { base, label: label.to_string(), rank_fn: Arc::new(rank), act_fn: Arc::new(act), cache: Arc::default() }
    }

    /// A presheaf specified on generators; composites go through `factor`.
    /// Missing generators are allowed only when one side has rank 0.
    /// Functoriality is validated over objects of dimension ≤ d.
    pub fn from_generators(
        base: CatRef,
        label: &str,
        ranks: HashMap<Obj, usize>,
        gens: HashMap<Mor, IntMatrix>,
        d: usize,
    ) -> Result<AbPresheaf, PresheafError> {
        let objs = objects(base.as_ref(), d);
        for a in &objs {
            for g in base.generators_from(a) {
                if !base.is_finite() && base.dim(&g.tgt) > d {
                    continue;
                }
                let shape = (ranks.get(&g.src).copied().unwrap_or(0), ranks.get(&g.tgt).copied().unwrap_or(0));
                match gens.get(&g) {
                    Some(m) if m.shape() != shape => {
                        return Err(PresheafError::ShapeMismatch(format!(
                            "matrix of {} is {}x{}, expected {}x{}",
                            base.mor_name(&g),
                            m.rows(),
                            m.cols(),
                            shape.0,
                            shape.1
                        )))
                    }
                    None if shape.0 > 0 && shape.1 > 0 => {
                        return Err(PresheafError::Malformed(format!("no matrix for generator {}", base.mor_name(&g))))
                    }
                    _ => {}
                }
            }
        }
        let r = Arc::new(ranks);
        let r2 = r.clone();
        let cat = base.clone();
        let x = AbPresheaf::from_fns(
            base,
            label,
            move |a| r.get(a).copied().unwrap_or(0),
            move |f| {
                let word = cat.factor(f).expect("factorization within the truncation");
                let rank = |a: &Obj| r2.get(a).copied().unwrap_or(0);
                let mut m = IntMatrix::identity(rank(&f.src));
                for g in &word {
                    let gm = gens.get(g).cloned().unwrap_or_else(|| IntMatrix::zeros(rank(&g.src), rank(&g.tgt)));
                    m = m.mul(&gm);
                }
                m
            },
        );
        x.validate(d)?;
        Ok(x)
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    pub fn with_name(mut self, label: &str) -> AbPresheaf {
        self.label = label.to_string();
        self
    }

    pub fn rank(&self, a: &Obj) -> usize {
        (self.rank_fn)(a)
    }

    /// X(f), cached.
    pub fn act(&self, f: &Mor) -> IntMatrix {
        if let Some(m) = self.cache.read().get(f) {
            return m.clone();
        }
        let m = if f.src == f.tgt && *f == self.base.identity(&f.src) {
            IntMatrix::identity(self.rank(&f.src))
        } else {
            (self.act_fn)(f)
        };
        self.cache.write().insert(f.clone(), m.clone());
        m
    }

    /// Checks shapes, X(id) = id and X(g∘u) = X(u)X(g) for each generator g
    /// out of b and each u into b, over objects of dimension ≤ d.
    pub fn validate(&self, d: usize) -> Result<(), PresheafError> {
        let cat = self.base.as_ref();
        let objs = objects(cat, d);
        for a in &objs {
            let id = self.act(&cat.identity(a));
            if id != IntMatrix::identity(self.rank(a)) {
                return Err(PresheafError::NotFunctorial(format!("X(id_{}) is not the identity", cat.obj_name(a))));
            }
        }
        for b in &objs {
            for g in cat.generators_from(b) {
                if !cat.is_finite() && cat.dim(&g.tgt) > d {
                    continue;
                }
                let xg = self.act(&g);
                if xg.shape() != (self.rank(&g.src), self.rank(&g.tgt)) {
                    return Err(PresheafError::ShapeMismatch(format!("X({}) has the wrong shape", cat.mor_name(&g))));
                }
                for a in &objs {
                    for u in cat.hom(a, b).iter() {
                        let gu = cat.compose_raw(&g, u);
                        if self.act(&gu) != self.act(u).mul(&xg) {
                            return Err(PresheafError::NotFunctorial(format!(
                                "X({} ∘ {}) ≠ X({}) X({})",
                                cat.mor_name(&g),
                                cat.mor_name(u),
                                cat.mor_name(u),
                                cat.mor_name(&g)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The presheaf with all ranks 0.
    pub fn zero(cat: CatRef) -> AbPresheaf {
        AbPresheaf::from_fns(cat, "0", |_| 0, |_| IntMatrix::zeros(0, 0))
    }

    /// Levelwise direct sum, blocks in the order (X, Y).
    pub fn direct_sum(&self, other: &AbPresheaf) -> Result<AbPresheaf, PresheafError> {
        same_base(&self.base, &other.base)?;
        let (x, y) = (self.clone(), other.clone());
        let (x2, y2) = (self.clone(), other.clone());
        Ok(AbPresheaf::from_fns(
            self.base.clone(),
            &format!("{}+{}", self.label, other.label),
            move |a| x.rank(a) + y.rank(a),
            move |f| IntMatrix::block_diag(&[x2.act(f), y2.act(f)]),
        ))
    }

    /// Machine-readable form: ranks and generator matrices over dim ≤ d.
    pub fn to_json(&self, d: usize) -> Value {
        let cat = self.base.as_ref();
        let mut ranks = BTreeMap::new();
        let mut gens = BTreeMap::new();
        for a in objects(cat, d) {
            let r = self.rank(&a);
            if r > 0 {
                ranks.insert(cat.obj_name(&a), r);
            }
            for g in cat.generators_from(&a) {
                if !cat.is_finite() && cat.dim(&g.tgt) > d {
                    continue;
                }
                let m = self.act(&g);
                if m.rows() > 0 && m.cols() > 0 {
                    let rows: Vec<Vec<JsonInt>> = m.to_rows().into_iter().map(|r| r.into_iter().map(JsonInt::from).collect()).collect();
                    gens.insert(cat.mor_name(&g), rows);
                }
            }
        }
        json!({ "category": cat.name(), "truncation": d, "ranks": ranks, "generators": gens })
    }

    /// Reads `{"category","truncation","ranks":{obj:r},"generators":{name:[[…]]}}`.
    /// The category is built from its spec unless `base` is given.
    pub fn from_json(v: &Value, base: Option<CatRef>) -> Result<AbPresheaf, PresheafError> {
        let bad = |m: &str| PresheafError::Malformed(m.to_string());
        let d = v["truncation"].as_u64().ok_or_else(|| bad("missing truncation"))? as usize;
        let base = match base {
            Some(b) => b,
            None => make_category(v["category"].as_str().ok_or_else(|| bad("missing category"))?, d)?,
        };
        let mut ranks = HashMap::new();
        if let Some(obj) = v.get("ranks") {
            for (k, r) in obj.as_object().ok_or_else(|| bad("ranks must be an object"))? {
                let r = r.as_u64().ok_or_else(|| bad("ranks must be integers"))? as usize;
                ranks.insert(base.parse_object(k)?, r);
            }
        }
        let table = generator_table(base.as_ref(), d);
        let mut gens = HashMap::new();
        if let Some(obj) = v.get("generators") {
            for (k, m) in obj.as_object().ok_or_else(|| bad("generators must be an object"))? {
                let g = table.get(k).ok_or_else(|| bad(&format!("unknown generator {k}")))?;
                let rows = m.as_array().ok_or_else(|| bad("matrices are arrays of rows"))?;
                let rr = ranks.get(&g.src).copied().unwrap_or(0);
                let cc = ranks.get(&g.tgt).copied().unwrap_or(0);
                let mut mat = IntMatrix::zeros(rr, cc);
                if rows.len() != rr {
                    return Err(PresheafError::ShapeMismatch(format!("{k}: expected {rr} rows, got {}", rows.len())));
                }
                for (i, row) in rows.iter().enumerate() {
                    let row = row.as_array().ok_or_else(|| bad("matrix rows are arrays"))?;
                    if row.len() != cc {
                        return Err(PresheafError::ShapeMismatch(format!("{k}: expected {cc} columns, got {}", row.len())));
                    }
                    for (j, x) in row.iter().enumerate() {
                        let x: JsonInt = serde_json::from_value(x.clone()).map_err(|e| bad(&e.to_string()))?;
                        mat.set(i, j, x.to_big().map_err(|e| bad(&e.to_string()))?);
                    }
                }
                gens.insert(g.clone(), mat);
            }
        }
        let label = v["name"].as_str().unwrap_or("presheaf");
        AbPresheaf::from_generators(base, label, ranks, gens, d)
    }
}

pub(crate) fn objects(cat: &dyn Category, d: usize) -> Vec<Obj> {
    if cat.is_finite() {
        cat.all_objects()
    } else {
        cat.objects_upto(d)
    }
}

pub(crate) fn same_base(a: &CatRef, b: &CatRef) -> Result<(), PresheafError> {
    if Arc::ptr_eq(a, b) || a.name() == b.name() {
        Ok(())
    } else {
        Err(PresheafError::BaseMismatch(a.name(), b.name()))
    }
}

/// Wh(a): x ↦ ℤ^{Hom(x,a)}, acting by precomposition.
pub fn representable(cat: CatRef, a: &Obj) -> AbPresheaf {
    let (c1, c2) = (cat.clone(), cat.clone());
    let (a1, a2) = (a.clone(), a.clone());
    AbPresheaf::from_fns(
        cat,
        &format!("Wh({a})"),
        move |x| c1.hom(x, &a1).len(),
        move |f| {
            let src = c2.hom(&f.src, &a2);
            let tgt = c2.hom(&f.tgt, &a2);
            let idx = c2.hom_index(&f.src, &a2);
            let mut m = IntMatrix::zeros(src.len(), tgt.len());
            for (j, u) in tgt.iter().enumerate() {
                m.set_i64(idx[&c2.compose_raw(u, f)], j, 1);
            }
            m
        },
    )
}

/// The constant presheaf ℤ.
pub fn constant_z(cat: CatRef) -> AbPresheaf {
    AbPresheaf::from_fns(cat, "Z", |_| 1, |_| IntMatrix::identity(1))
}

/// ℤ^(F): free abelian group on each F(a), with the 0/1 matrices of the action.
pub fn free_abelianization(f: SetRef) -> AbPresheaf {
    let (f1, f2) = (f.clone(), f.clone());
    AbPresheaf::from_fns(
        f.base().clone(),
        &format!("Z[{}]", f.name()),
        move |a| f1.count(a),
        move |m| {
            let mut out = IntMatrix::zeros(f2.count(&m.src), f2.count(&m.tgt));
            for y in 0..f2.count(&m.tgt) {
                out.set_i64(f2.act(m, y), y, 1);
            }
            out
        },
    )
}

/// u*X for u: A → B, with (u*X)(a) = X(u a).
pub fn restrict(x: &AbPresheaf, u: Arc<dyn Functor>) -> Result<AbPresheaf, PresheafError> {
    same_base(x.base(), u.target())?;
    let (x1, x2) = (x.clone(), x.clone());
    let (u1, u2) = (u.clone(), u.clone());
    Ok(AbPresheaf::from_fns(u.source().clone(), &format!("u*{}", x.name()), move |a| x1.rank(&u1.obj(a)), move |f| x2.act(&u2.mor(f))))
}

/// A finite direct sum ⊕ᵢ Wh(aᵢ) of representables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    pub objs: Vec<Obj>,
}

impl FormalSum {
    pub fn new(objs: Vec<Obj>) -> FormalSum {
        FormalSum { objs }
    }

    pub fn len(&self) -> usize {
        self.objs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objs.is_empty()
    }
}

/// One coefficient c·φ of a map of formal sums, with φ: tgt[row] → src[col].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalEntry {
    pub row: usize,
    pub col: usize,
    pub coeff: i64,
    pub mor: Mor,
}

/// A map ⊕ Wh(src_i) → ⊕ Wh(tgt_j): a matrix of ℤ-combinations of
/// morphisms, each acting by precomposition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalMap {
    pub src: FormalSum,
    pub tgt: FormalSum,
    pub entries: Vec<FormalEntry>,
}

impl FormalMap {
    pub fn new(src: FormalSum, tgt: FormalSum) -> FormalMap {
        FormalMap { src, tgt, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, coeff: i64, mor: Mor) {
        self.entries.push(FormalEntry { row, col, coeff, mor });
    }
}

/// Addinf(X)(L) = ⊕ᵢ X(aᵢ), with the block offsets.
pub fn addinf_eval(x: &AbPresheaf, l: &FormalSum) -> (FgAbGroup, Vec<usize>) {
    let mut offs = Vec::with_capacity(l.len() + 1);
    let mut n = 0;
    for a in &l.objs {
        offs.push(n);
        n += x.rank(a);
    }
    offs.push(n);
    (FgAbGroup::free(n), offs)
}

/// Addinf(X) applied to a map of formal sums: block (j, i) is Σ c·X(φ).
pub fn addinf_map(x: &AbPresheaf, m: &FormalMap) -> Result<IntMatrix, PresheafError> {
    let (_, so) = addinf_eval(x, &m.src);
    let (_, to) = addinf_eval(x, &m.tgt);
    let mut out = IntMatrix::zeros(*to.last().unwrap(), *so.last().unwrap());
    for e in &m.entries {
        if e.row >= m.tgt.len() || e.col >= m.src.len() {
            return Err(PresheafError::ShapeMismatch(format!("entry ({}, {}) outside the formal matrix", e.row, e.col)));
        }
        if e.mor.src != m.tgt.objs[e.row] || e.mor.tgt != m.src.objs[e.col] {
            return Err(PresheafError::ShapeMismatch(format!(
                "entry ({}, {}) is a morphism {} → {}, expected {} → {}",
                e.row, e.col, e.mor.src, e.mor.tgt, m.tgt.objs[e.row], m.src.objs[e.col]
            )));
        }
        if x.rank(&e.mor.src) == 0 || x.rank(&e.mor.tgt) == 0 {
            continue;
        }
        out.add_block(to[e.row], so[e.col], &x.act(&e.mor).scale(e.coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{CircleSet, Delta, Diagonal, EmptySet, Globe, Product, TerminalSet};

    fn delta(d: usize) -> CatRef {
        Arc::new(Delta::new(d))
    }

    #[test]
    fn representables() {
        let d = delta(4);
        let w0 = representable(d.clone(), &Obj::Dim(0));
        for n in 0..=4 {
            assert_eq!(w0.rank(&Obj::Dim(n)), 1);
        }
        w0.validate(3).unwrap();
        let g: CatRef = Arc::new(Globe::new(4, false));
        let w2 = representable(g.clone(), &Obj::Dim(2));
        let ranks: Vec<usize> = (0..4).map(|n| w2.rank(&Obj::Dim(n))).collect();
        assert_eq!(ranks, vec![2, 2, 1, 0]);
        w2.validate(4).unwrap();
        let w3 = representable(d, &Obj::Dim(3));
        assert!(w3.rank(&Obj::Dim(3)) >= 1);
        w3.validate(4).unwrap();
    }

    #[test]
    fn constants_and_abelianization() {
        let d = delta(4);
        let z = constant_z(d.clone());
        z.validate(4).unwrap();
        let t = free_abelianization(Arc::new(TerminalSet::new(d.clone())));
        for a in d.objects_upto(3) {
            assert_eq!(t.rank(&a), 1);
            for b in d.objects_upto(3) {
                for f in d.hom(&a, &b).iter() {
                    assert_eq!(t.act(f), z.act(f));
                }
            }
        }
        let s = free_abelianization(Arc::new(CircleSet::new(d.clone())));
        let ranks: Vec<usize> = (0..3).map(|n| s.rank(&Obj::Dim(n))).collect();
        // S¹ = Δ_1/∂Δ_1 has n+1 simplices in degree n
        assert_eq!(ranks, vec![1, 2, 3]);
        s.validate(4).unwrap();
        let e = free_abelianization(Arc::new(EmptySet::new(d.clone())));
        assert!(d.objects_upto(4).iter().all(|a| e.rank(a) == 0));
    }

    #[test]
    fn restriction_along_the_diagonal() {
        let d = delta(3);
        let p: CatRef = Arc::new(Product::new(vec![d.clone(), d.clone()], 6));
        let a = Obj::Tuple(vec![Obj::Dim(1), Obj::Dim(1)]);
        let x = representable(p.clone(), &a);
        let u: Arc<dyn Functor> = Arc::new(Diagonal::new(d.clone(), p, 2));
        let ux = restrict(&x, u).unwrap();
        for n in 0..=3 {
            let h = d.hom(&Obj::Dim(n), &Obj::Dim(1)).len();
            assert_eq!(ux.rank(&Obj::Dim(n)), h * h);
        }
        ux.validate(3).unwrap();
    }

    #[test]
    fn broken_tables_are_rejected() {
        let d = delta(2);
        let mut ranks = HashMap::new();
        for n in 0..=2 {
            ranks.insert(Obj::Dim(n), 1);
        }
        let mut gens = HashMap::new();
        for a in d.objects_upto(2) {
            for g in d.generators_from(&a) {
                gens.insert(g, IntMatrix::identity(1));
            }
        }
        AbPresheaf::from_generators(d.clone(), "Z", ranks.clone(), gens.clone(), 2).unwrap();
        // s_0 δ_0 = id fails if X(δ_0) = 2
        gens.insert(Delta::face(1, 0), IntMatrix::from_rows(&[vec![2]]));
        let err = AbPresheaf::from_generators(d, "bad", ranks, gens, 2).unwrap_err();
        assert!(matches!(err, PresheafError::NotFunctorial(_)), "{err}");
    }

    #[test]
    fn json_roundtrip() {
        let d = delta(3);
        let s = free_abelianization(Arc::new(CircleSet::new(d.clone())));
        let v = s.to_json(3);
        let back = AbPresheaf::from_json(&v, None).unwrap();
        for a in d.objects_upto(3) {
            assert_eq!(back.rank(&a), s.rank(&a));
            for b in d.objects_upto(3) {
                for f in d.hom(&a, &b).iter() {
                    assert_eq!(back.act(f), s.act(f));
                }
            }
        }
    }

    #[test]
    fn addinf() {
        let d = delta(3);
        let z = constant_z(d.clone());
        let w = representable(d.clone(), &Obj::Dim(2));
        let l = FormalSum::new(vec![Obj::Dim(1)]);
        assert_eq!(addinf_eval(&w, &l).0, FgAbGroup::free(w.rank(&Obj::Dim(1))));
        assert_eq!(addinf_eval(&z, &FormalSum::default()).0, FgAbGroup::zero());
        // coefficients 3δ_0 − 5δ_2 in Hom(Δ_1, Δ_2) augment to −2
        let mut m = FormalMap::new(FormalSum::new(vec![Obj::Dim(2)]), FormalSum::new(vec![Obj::Dim(1)]));
        m.push(0, 0, 3, Delta::face(2, 0));
        m.push(0, 0, -5, Delta::face(2, 2));
        assert_eq!(addinf_map(&z, &m).unwrap(), IntMatrix::from_rows(&[vec![-2]]));
        let mut bad = m.clone();
        bad.push(0, 0, 1, Delta::face(1, 0));
        assert!(addinf_map(&z, &bad).is_err());
    }
}
