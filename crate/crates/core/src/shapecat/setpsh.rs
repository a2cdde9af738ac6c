use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde_json::Value;

use super::{generator_table, make_category, CatError, CatRef, Mor, Obj};

/// A presheaf of finite sets: F(a) = {0, …, count(a)−1}, and for f: a → b,
/// `act(f, y)` is F(f)(y) ∈ F(a) for y ∈ F(b).
pub trait SetPresheaf: Send + Sync {
    fn base(&self) -> &CatRef;
    fn name(&self) -> String;
    fn count(&self, a: &Obj) -> usize;
    fn act(&self, f: &Mor, y: usize) -> usize;
}

pub type SetRef = Arc<dyn SetPresheaf>;

/// Checks F(g∘u) = F(u)F(g) for every generator g out of b and every u into
/// b, over objects of dimension ≤ d.
pub fn validate_set_presheaf(f: &dyn SetPresheaf, d: usize) -> Result<(), CatError> {
    let cat = f.base();
    let objs = if cat.is_finite() { cat.all_objects() } else { cat.objects_upto(d) };
    for b in &objs {
        for g in cat.generators_from(b) {
            for a in &objs {
                for u in cat.hom(a, b).iter() {
                    let gu = cat.compose_raw(&g, u);
                    for z in 0..f.count(&g.tgt) {
                        if f.act(&gu, z) != f.act(u, f.act(&g, z)) {
                            return Err(CatError::InvalidPresentation(format!(
                                "functoriality fails for {} after {}",
                                cat.mor_name(&g),
                                cat.mor_name(u)
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub struct TerminalSet {
    base: CatRef,
}

impl TerminalSet {
    pub fn new(base: CatRef) -> TerminalSet {
        TerminalSet { base }
    }
}

impl SetPresheaf for TerminalSet {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        "terminal".into()
    }
    fn count(&self, _a: &Obj) -> usize {
        1
    }
    fn act(&self, _f: &Mor, _y: usize) -> usize {
        0
    }
}

pub struct EmptySet {
    base: CatRef,
}

impl EmptySet {
    pub fn new(base: CatRef) -> EmptySet {
        EmptySet { base }
    }
}

impl SetPresheaf for EmptySet {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        "empty".into()
    }
    fn count(&self, _a: &Obj) -> usize {
        0
    }
    fn act(&self, _f: &Mor, _y: usize) -> usize {
        unreachable!("the empty presheaf has no elements")
    }
}

/// Hom(−, a), elements listed in hom-set order.
pub struct RepresentableSet {
    base: CatRef,
    rep: Obj,
}

impl RepresentableSet {
    pub fn new(base: CatRef, rep: Obj) -> RepresentableSet {
        RepresentableSet { base, rep }
    }
}

impl SetPresheaf for RepresentableSet {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        format!("rep:{}", self.base.obj_name(&self.rep))
    }
    fn count(&self, a: &Obj) -> usize {
        self.base.hom(a, &self.rep).len()
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        let g = &self.base.hom(&f.tgt, &self.rep)[y];
        self.base.position(&self.base.compose_raw(g, f))
    }
}

/// The simplicial circle Δ_1/∂Δ_1.  Element 0 of Δ_n is the base point;
/// element j ≥ 1 is the map x ↦ [x ≥ j].
pub struct CircleSet {
    base: CatRef,
}

impl CircleSet {
    pub fn new(base: CatRef) -> CircleSet {
        CircleSet { base }
    }
}

impl SetPresheaf for CircleSet {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        "circle".into()
    }
    fn count(&self, a: &Obj) -> usize {
        self.base.dim(a) + 1
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        if y == 0 {
            return 0;
        }
        match f.map().iter().position(|&v| v as usize >= y) {
            None | Some(0) => 0,
            Some(x) => x,
        }
    }
}

type ElemIndex = Arc<(Vec<usize>, HashMap<usize, usize>)>;

/// The sub-presheaf of `ambient` generated by the given elements.
pub struct SubSet {
    ambient: SetRef,
    gens: Vec<(Obj, usize)>,
    label: String,
    elems: RwLock<HashMap<Obj, ElemIndex>>,
}

impl SubSet {
    pub fn new(ambient: SetRef, gens: Vec<(Obj, usize)>, label: &str) -> SubSet {
        SubSet { ambient, gens, label: label.to_string(), elems: RwLock::new(HashMap::new()) }
    }

    /// Elements of the ambient presheaf at `c` lying in the sub-presheaf.
    pub fn elements(&self, c: &Obj) -> ElemIndex {
        if let Some(e) = self.elems.read().get(c) {
            return e.clone();
        }
        let cat = self.ambient.base();
        let mut v: Vec<usize> = Vec::new();
        for (b, x) in &self.gens {
            for g in cat.hom(c, b).iter() {
                v.push(self.ambient.act(g, *x));
            }
        }
        v.sort_unstable();
        v.dedup();
        let idx = v.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let e = Arc::new((v, idx));
        self.elems.write().entry(c.clone()).or_insert(e).clone()
    }
}

impl SetPresheaf for SubSet {
    fn base(&self) -> &CatRef {
        self.ambient.base()
    }
    fn name(&self) -> String {
        self.label.clone()
    }
    fn count(&self, a: &Obj) -> usize {
        self.elements(a).0.len()
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        let x = self.elements(&f.tgt).0[y];
        let z = self.ambient.act(f, x);
        self.elements(&f.src).1[&z]
    }
}

/// Pointwise product; the first factor is the most significant digit.
pub struct ProductSet {
    factors: Vec<SetRef>,
}

impl ProductSet {
    pub fn new(factors: Vec<SetRef>) -> ProductSet {
        assert!(!factors.is_empty());
        ProductSet { factors }
    }

    fn digits(&self, a: &Obj, mut y: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            let c = f.count(a);
            out[i] = y % c;
            y /= c;
        }
        out
    }
}

impl SetPresheaf for ProductSet {
    fn base(&self) -> &CatRef {
        self.factors[0].base()
    }
    fn name(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| f.name()).collect();
        parts.join("×")
    }
    fn count(&self, a: &Obj) -> usize {
        self.factors.iter().map(|f| f.count(a)).product()
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        let d = self.digits(&f.tgt, y);
        let mut out = 0;
        for (i, p) in self.factors.iter().enumerate() {
            out = out * p.count(&f.src) + p.act(f, d[i]);
        }
        out
    }
}

type NerveIndex = Arc<(Vec<Vec<usize>>, HashMap<Vec<usize>, usize>)>;

/// Nerve of a finite poset as a presheaf on Δ (monotone maps [n] → P), or on
/// a cube category (monotone maps {0,1}^n → P).
pub struct PosetNerve {
    base: CatRef,
    leq: Vec<Vec<bool>>,
    cubical: bool,
    elems: RwLock<HashMap<Obj, NerveIndex>>,
}

impl PosetNerve {
    /// `leq[i][j]` must be a partial order.
    pub fn new(base: CatRef, leq: Vec<Vec<bool>>, cubical: bool) -> PosetNerve {
        PosetNerve { base, leq, cubical, elems: RwLock::new(HashMap::new()) }
    }

    fn points(&self, a: &Obj) -> usize {
        let n = self.base.dim(a);
        if self.cubical { 1 << n } else { n + 1 }
    }

    fn preds(&self, x: usize) -> Vec<usize> {
        if self.cubical {
            (0..usize::BITS as usize).filter(|b| x >> b & 1 == 1).map(|b| x & !(1 << b)).collect()
        } else if x > 0 {
            vec![x - 1]
        } else {
            vec![]
        }
    }

    fn elements(&self, a: &Obj) -> NerveIndex {
        if let Some(e) = self.elems.read().get(a) {
            return e.clone();
        }
        let np = self.points(a);
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(np);
        self.fill(np, &mut cur, &mut out);
        let idx = out.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let e = Arc::new((out, idx));
        self.elems.write().entry(a.clone()).or_insert(e).clone()
    }

    fn fill(&self, np: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let x = cur.len();
        if x == np {
            out.push(cur.clone());
            return;
        }
        let preds = self.preds(x);
        for p in 0..self.leq.len() {
            if preds.iter().all(|&q| self.leq[cur[q]][p]) {
                cur.push(p);
                self.fill(np, cur, out);
                cur.pop();
            }
        }
    }
}

impl SetPresheaf for PosetNerve {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        format!("nerve of a {}-element poset", self.leq.len())
    }
    fn count(&self, a: &Obj) -> usize {
        self.elements(a).0.len()
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        let t = self.elements(&f.tgt);
        let p = &t.0[y];
        let q: Vec<usize> = f.map().iter().map(|&x| p[x as usize]).collect();
        self.elements(&f.src).1[&q]
    }
}

/// A set presheaf given by element counts and generator actions.
pub struct TableSet {
    base: CatRef,
    label: String,
    counts: HashMap<Obj, usize>,
    actions: HashMap<Mor, Vec<usize>>,
}

impl TableSet {
    pub fn new(base: CatRef, label: &str, counts: HashMap<Obj, usize>, actions: HashMap<Mor, Vec<usize>>, d: usize) -> Result<TableSet, CatError> {
        let objs = if base.is_finite() { base.all_objects() } else { base.objects_upto(d) };
        for a in &objs {
            if !counts.contains_key(a) {
                return Err(CatError::InvalidPresentation(format!("no element count for {}", base.obj_name(a))));
            }
        }
        for (g, v) in &actions {
            if v.len() != counts[&g.tgt] || v.iter().any(|&x| x >= counts[&g.src]) {
                return Err(CatError::InvalidPresentation(format!("action of {} has the wrong shape", base.mor_name(g))));
            }
        }
        for a in &objs {
            for g in base.generators_from(a) {
                if !actions.contains_key(&g) {
                    return Err(CatError::InvalidPresentation(format!("no action for generator {}", base.mor_name(&g))));
                }
            }
        }
        let t = TableSet { base, label: label.to_string(), counts, actions };
        validate_set_presheaf(&t, d)?;
        Ok(t)
    }
}

impl SetPresheaf for TableSet {
    fn base(&self) -> &CatRef {
        &self.base
    }
    fn name(&self) -> String {
        self.label.clone()
    }
    fn count(&self, a: &Obj) -> usize {
        *self.counts.get(a).unwrap_or_else(|| panic!("object {a} outside the presheaf's truncation"))
    }
    fn act(&self, f: &Mor, y: usize) -> usize {
        let word = self.base.factor(f).expect("factorization");
        word.iter().rev().fold(y, |z, g| self.actions[g][z])
    }
}

/// Parses `{"category":…, "truncation":D, "elements":{"obj":n}, "actions":{"gen":[…]}}`.
/// The category is built from its spec unless `base` is given.
pub fn parse_set_presheaf(v: &Value, base: Option<CatRef>) -> Result<TableSet, CatError> {
    let bad = |m: &str| CatError::InvalidPresentation(m.to_string());
    let d = v["truncation"].as_u64().ok_or_else(|| bad("missing truncation"))? as usize;
    let base = match base {
        Some(b) => b,
        None => make_category(v["category"].as_str().ok_or_else(|| bad("missing category"))?, d)?,
    };
    let mut counts = HashMap::new();
    for (k, c) in v["elements"].as_object().ok_or_else(|| bad("missing elements"))? {
        let o = base.parse_object(k)?;
        counts.insert(o, c.as_u64().ok_or_else(|| bad("element counts must be integers"))? as usize);
    }
    let gens = generator_table(base.as_ref(), d);
    let mut actions = HashMap::new();
    for (k, a) in v["actions"].as_object().ok_or_else(|| bad("missing actions"))? {
        let g = gens.get(k).ok_or_else(|| bad(&format!("unknown generator {k}")))?;
        let arr: Vec<usize> = a
            .as_array()
            .ok_or_else(|| bad("actions are index arrays"))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad("indices must be integers")))
            .collect::<Result<_, _>>()?;
        actions.insert(g.clone(), arr);
    }
    TableSet::new(base, v["name"].as_str().unwrap_or("presheaf"), counts, actions, d)
}

/// Built-in set presheaves by name, or a JSON file.
pub(crate) fn builtin_or_file(base: &CatRef, name: &str) -> Result<SetRef, CatError> {
    let is_delta = base.name() == "delta";
    match name {
        "terminal" => return Ok(Arc::new(TerminalSet::new(base.clone()))),
        "empty" => return Ok(Arc::new(EmptySet::new(base.clone()))),
        "circle" if is_delta => return Ok(Arc::new(CircleSet::new(base.clone()))),
        "boundary2" if is_delta => return Ok(Arc::new(boundary_of_simplex(base.clone(), 2))),
        "circle" | "boundary2" => return Err(CatError::Unsupported(format!("{name} is a simplicial set; base is {}", base.name()))),
        _ => {}
    }
    if let Some(o) = name.strip_prefix("rep=") {
        return Ok(Arc::new(RepresentableSet::new(base.clone(), base.parse_object(o)?)));
    }
    let text = std::fs::read_to_string(name).map_err(|e| CatError::InvalidPresentation(format!("{name}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CatError::InvalidPresentation(e.to_string()))?;
    Ok(Arc::new(parse_set_presheaf(&v, Some(base.clone()))?))
}

/// ∂Δ_n: the sub-presheaf of Hom(−, Δ_n) generated by the cofaces.
pub fn boundary_of_simplex(base: CatRef, n: usize) -> SubSet {
    let rep: SetRef = Arc::new(RepresentableSet::new(base.clone(), crate::shapecat::Obj::Dim(n)));
    let gens = (0..=n).map(|i| (Obj::Dim(n - 1), base.position(&crate::shapecat::Delta::face(n, i)))).collect();
    SubSet::new(rep, gens, &format!("boundary{n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{Cube, Delta};

    #[test]
    fn circle_counts_and_functoriality() {
        let d: CatRef = Arc::new(Delta::new(4));
        let c = CircleSet::new(d.clone());
        assert_eq!(c.count(&Obj::Dim(0)), 1);
        assert_eq!(c.count(&Obj::Dim(1)), 2);
        assert_eq!(c.count(&Obj::Dim(2)), 3);
        validate_set_presheaf(&c, 4).unwrap();
        // independent oracle: maps [n] → [1] modulo the two constants
        for n in 0..4usize {
            let maps = crate::shapecat::monotone_maps(n, 1, false);
            assert_eq!(maps.len() - 1, c.count(&Obj::Dim(n)));
        }
    }

    #[test]
    fn boundary_and_representables() {
        let d: CatRef = Arc::new(Delta::new(4));
        let b = boundary_of_simplex(d.clone(), 2);
        assert_eq!(b.count(&Obj::Dim(0)), 3);
        assert_eq!(b.count(&Obj::Dim(1)), 6);
        assert_eq!(b.count(&Obj::Dim(2)), 9);
        validate_set_presheaf(&b, 3).unwrap();
        let r = RepresentableSet::new(d.clone(), Obj::Dim(1));
        validate_set_presheaf(&r, 3).unwrap();
        let p = ProductSet::new(vec![Arc::new(CircleSet::new(d.clone())), Arc::new(RepresentableSet::new(d.clone(), Obj::Dim(1)))]);
        assert_eq!(p.count(&Obj::Dim(1)), 6);
        validate_set_presheaf(&p, 3).unwrap();
    }

    #[test]
    fn poset_nerves() {
        let leq = vec![vec![true, true], vec![false, true]];
        let d: CatRef = Arc::new(Delta::new(3));
        let n = PosetNerve::new(d, leq.clone(), false);
        assert_eq!(n.count(&Obj::Dim(1)), 3);
        validate_set_presheaf(&n, 3).unwrap();
        let c: CatRef = Arc::new(Cube::new(3, Some(crate::shapecat::ConnKind::Max)));
        let n = PosetNerve::new(c, leq, true);
        assert_eq!(n.count(&Obj::Dim(1)), 3);
        assert_eq!(n.count(&Obj::Dim(2)), 6);
        validate_set_presheaf(&n, 3).unwrap();
    }

    #[test]
    fn json_tables() {
        let v = serde_json::json!({
            "category": "delta", "truncation": 2,
            "elements": {"0": 1, "1": 1, "2": 1},
            "actions": {"d1.0": [0], "d1.1": [0], "d2.0": [0], "d2.1": [0], "d2.2": [0], "s0.0": [0], "s1.0": [0], "s1.1": [0]}
        });
        let t = parse_set_presheaf(&v, None).unwrap();
        assert_eq!(t.count(&Obj::Dim(2)), 1);
        let mut bad = v.clone();
        bad["actions"].as_object_mut().unwrap().remove("s1.1");
        assert!(parse_set_presheaf(&bad, None).is_err());
    }
}
