//! Integrators: resolutions L of the constant presheaf, presented as complexes
//! of formal sums of representables, optionally divided by a degenerate part.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chains::{ChainComplex, ChainError, ChainHomotopy, ChainMap};
use crate::intlinalg::{quotient, FgAbGroup, IntMatrix, LinAlgError, Quotient};
use crate::presheaf::{addinf_eval, addinf_map, representable, AbPresheaf, FormalMap, FormalSum, PresheafError};
use crate::shapecat::{
    codim1_monos, nerve, CatError, CatRef, Category, Chain, ConnKind, Cube, Delta, Functor, Globe, Mor, Obj, Product, SetRef, Slice, Terminal,
};
use crate::wreath::{theta, DiagonalMn, XiWreath};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegratorError {
    #[error("{0} is not catenary")]
    NotCatenary(String),
    #[error("no sign for codimension-1 mono {0}")]
    MissingSign(String),
    #[error("{0} is infinite")]
    InfiniteCategory(String),
    #[error("degree {0}: the degenerate part is not a direct summand")]
    NotSaturated(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Signs on the codimension-1 monos of a catenary category, up to dimension D.
#[derive(Clone)]
pub struct Orientation {
    base: CatRef,
    top: usize,
    faces: HashMap<Obj, Vec<(Mor, i64)>>,
}

impl Orientation {
    /// Signs from a function on codim-1 monos; fails on the first unsigned one.
    pub fn from_fn(cat: CatRef, d: usize, sg: impl Fn(&Mor) -> Option<i64>) -> Result<Orientation, IntegratorError> {
        if !cat.is_catenary() {
            return Err(IntegratorError::NotCatenary(cat.name()));
        }
        let mut faces = HashMap::new();
        for a in cat.objects_upto(d) {
            let mut v = Vec::new();
            for f in codim1_monos(cat.as_ref(), &a)? {
                let s = sg(&f).ok_or_else(|| IntegratorError::MissingSign(cat.mor_name(&f)))?;
                v.push((f, s));
            }
            faces.insert(a, v);
        }
        Ok(Orientation { base: cat, top: d, faces })
    }

    /// The category's standard signs.
    pub fn standard(cat: CatRef, d: usize) -> Result<Orientation, IntegratorError> {
        let c = cat.clone();
        Orientation::from_fn(cat, d, move |f| c.standard_sign(f))
    }

    /// Signs from a JSON object mapping mono names to ±1.
    pub fn from_json(cat: CatRef, d: usize, v: &Value) -> Result<Orientation, IntegratorError> {
        let map = v.as_object().ok_or_else(|| IntegratorError::Malformed("an orientation is a JSON object".into()))?;
        let c = cat.clone();
        for (k, s) in map {
            if !matches!(s.as_i64(), Some(1) | Some(-1)) {
                return Err(IntegratorError::Malformed(format!("sign of {k} must be 1 or -1")));
            }
        }
        Orientation::from_fn(cat, d, move |f| map.get(&c.mor_name(f)).and_then(|s| s.as_i64()))
    }

    pub fn to_json(&self) -> Value {
        let mut m = std::collections::BTreeMap::new();
        for v in self.faces.values() {
            for (f, s) in v {
                m.insert(self.base.mor_name(f), *s);
            }
        }
        json!(m)
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Signed codimension-1 monos into `a`.
    pub fn faces(&self, a: &Obj) -> &[(Mor, i64)] {
        self.faces.get(a).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn sign(&self, f: &Mor) -> Option<i64> {
        self.faces(&f.tgt).iter().find(|(g, _)| g == f).map(|(_, s)| *s)
    }

    /// Overrides one sign; false if f is not a listed mono.
    pub fn set(&mut self, f: &Mor, s: i64) -> bool {
        match self.faces.get_mut(&f.tgt).and_then(|v| v.iter_mut().find(|(g, _)| g == f)) {
            Some(e) => {
                e.1 = s;
                true
            }
            None => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    FreeFromOrientation,
    Normalized,
    BousfieldKan,
    Product,
    Slice,
    Explicit,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::FreeFromOrientation => "free",
            Flavor::Normalized => "normalized",
            Flavor::BousfieldKan => "bousfield_kan",
            Flavor::Product => "product",
            Flavor::Slice => "slice",
            Flavor::Explicit => "explicit",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizedKind {
    Simplicial,
    Cubical,
    CubicalConnections,
    GlobularReflexive,
}

/// L_n = (⊕ Wh(a_i)) / (image of the degenerate part), degrees 0..=top.
/// Homology computed through it is trustworthy through degree top − 1.
#[derive(Clone)]
pub struct Integrator {
    base: CatRef,
    flavor: Flavor,
    label: String,
    top: usize,
    terms: Vec<FormalSum>,
    diffs: Vec<FormalMap>,
    degeneracies: Option<Vec<FormalMap>>,
    verified: Option<usize>,
}

/// L evaluated on a presheaf, before the d² check.
struct Evaluated {
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
    quots: Option<Vec<Quotient>>,
}

impl Integrator {
    /// Assembles an integrator from formal data; nothing is verified.
    pub fn from_parts(
        base: CatRef,
        flavor: Flavor,
        label: &str,
        terms: Vec<FormalSum>,
        diffs: Vec<FormalMap>,
        degeneracies: Option<Vec<FormalMap>>,
    ) -> Result<Integrator, IntegratorError> {
        if terms.is_empty() || diffs.len() + 1 != terms.len() {
            return Err(IntegratorError::Malformed(format!("{} terms need {} differentials", terms.len(), terms.len().saturating_sub(1))));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.src != terms[k + 1] || d.tgt != terms[k] {
                return Err(IntegratorError::Malformed(format!("d_{} does not connect the terms", k + 1)));
            }
        }
        if let Some(dg) = &degeneracies {
            if dg.len() != terms.len() || dg.iter().zip(&terms).any(|(m, t)| m.tgt != *t) {
                return Err(IntegratorError::Malformed("degenerate parts must map into the terms".into()));
            }
        }
        let top = terms.len() - 1;
        Ok(Integrator { base, flavor, label: label.to_string(), top, terms, diffs, degeneracies, verified: None })
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn terms(&self) -> &[FormalSum] {
        &self.terms
    }

    pub fn diffs(&self) -> &[FormalMap] {
        &self.diffs
    }

    pub fn is_free(&self) -> bool {
        self.degeneracies.is_none()
    }

    /// Largest object dimension on which the integrator checks passed.
    pub fn verified(&self) -> Option<usize> {
        self.verified
    }

    /// Keeps degrees 0..=top.
    pub fn truncate(&self, top: usize) -> Integrator {
        let top = top.min(self.top);
        let mut out = self.clone();
        out.terms.truncate(top + 1);
        out.diffs.truncate(top);
        if let Some(dg) = &mut out.degeneracies {
            dg.truncate(top + 1);
        }
        out.top = top;
        out
    }

    fn evaluate_parts(&self, x: &AbPresheaf) -> Result<Evaluated, IntegratorError> {
        let mut ranks: Vec<usize> = self.terms.iter().map(|t| addinf_eval(x, t).1.last().copied().unwrap_or(0)).collect();
        let mut diffs = self.diffs.iter().map(|d| addinf_map(x, d)).collect::<Result<Vec<_>, _>>()?;
        let Some(dg) = &self.degeneracies else {
            return Ok(Evaluated { ranks, diffs, quots: None });
        };
        let mut quots = Vec::with_capacity(dg.len());
        for (n, m) in dg.iter().enumerate() {
            let k = addinf_map(x, m)?;
            let q = quotient(ranks[n], &k).map_err(|e| match e {
                LinAlgError::NotSaturated => IntegratorError::NotSaturated(n),
                e => IntegratorError::Malformed(e.to_string()),
            })?;
            quots.push(q);
        }
        for n in 1..=self.top {
            diffs[n - 1] = quots[n - 1].proj.mul(&diffs[n - 1]).mul(&quots[n].sect);
        }
        for (n, q) in quots.iter().enumerate() {
            ranks[n] = q.proj.rows();
        }
        Ok(Evaluated { ranks, diffs, quots: Some(quots) })
    }

    /// X ⊙ L, truncated at `top`.  Fails if d² ≠ 0.
    pub fn evaluate(&self, x: &AbPresheaf) -> Result<ChainComplex, IntegratorError> {
        let e = self.evaluate_parts(x)?;
        Ok(ChainComplex::truncated(e.ranks, e.diffs)?)
    }

    /// η ⊙ L for a morphism of presheaves η: X → Y, given objectwise as
    /// rank Y(a) × rank X(a) matrices; one matrix per degree.
    pub fn evaluate_morphism(&self, x: &AbPresheaf, y: &AbPresheaf, eta: &dyn Fn(&Obj) -> IntMatrix) -> Result<Vec<IntMatrix>, IntegratorError> {
        let ex = self.evaluate_parts(x)?;
        let ey = self.evaluate_parts(y)?;
        let mut out = Vec::with_capacity(self.top + 1);
        for n in 0..=self.top {
            let blocks: Vec<IntMatrix> = self.terms[n].objs.iter().map(eta).collect();
            let m = IntMatrix::block_diag(&blocks);
            out.push(match (&ex.quots, &ey.quots) {
                (Some(qx), Some(qy)) => qy[n].proj.mul(&m).mul(&qx[n].sect),
                _ => m,
            });
        }
        Ok(out)
    }

    /// L(a) = Wh(a) ⊙ L.
    pub fn complex_at(&self, a: &Obj) -> Result<ChainComplex, IntegratorError> {
        self.evaluate(&representable(self.base.clone(), a))
    }

    /// Basis of L(a)_n for a free integrator: (summand, u: a_i → a).
    pub fn basis_at(&self, a: &Obj, n: usize) -> Vec<(usize, Mor)> {
        let mut out = Vec::new();
        for (i, ai) in self.terms[n].objs.iter().enumerate() {
            for u in self.base.hom(ai, a).iter() {
                out.push((i, u.clone()));
            }
        }
        out
    }

    /// Postcomposition with f: a → b on the free part in degree n.
    fn post_matrix(&self, f: &Mor, n: usize) -> IntMatrix {
        let cat = &self.base;
        let mut blocks = Vec::with_capacity(self.terms[n].len());
        for ai in &self.terms[n].objs {
            let src = cat.hom(ai, &f.src);
            let tgt_idx = cat.hom_index(ai, &f.tgt);
            let mut m = IntMatrix::zeros(tgt_idx.len(), src.len());
            for (j, u) in src.iter().enumerate() {
                m.set_i64(tgt_idx[&cat.compose_raw(f, u)], j, 1);
            }
            blocks.push(m);
        }
        IntMatrix::block_diag(&blocks)
    }

    /// The chain map L(f): L(a) → L(b).
    pub fn chain_map(&self, f: &Mor) -> Result<ChainMap, IntegratorError> {
        let ea = self.evaluate_parts(&representable(self.base.clone(), &f.src))?;
        let eb = self.evaluate_parts(&representable(self.base.clone(), &f.tgt))?;
        let mut comps = Vec::with_capacity(self.top + 1);
        for n in 0..=self.top {
            let m = self.post_matrix(f, n);
            comps.push(match (&ea.quots, &eb.quots) {
                (Some(qa), Some(qb)) => qb[n].proj.mul(&m).mul(&qa[n].sect),
                _ => m,
            });
        }
        let src = ChainComplex::truncated(ea.ranks, ea.diffs)?;
        let tgt = ChainComplex::truncated(eb.ranks, eb.diffs)?;
        Ok(ChainMap::new(src, tgt, comps)?)
    }

    fn check_objects(&self, dmax: usize) -> Vec<Obj> {
        let cat = &self.base;
        if cat.is_finite() {
            cat.all_objects()
        } else {
            cat.objects_upto(dmax.min(self.top).min(cat.max_dim()))
        }
    }

    /// d² = 0 in every L(a), dim a ≤ dmax, with a witness for each failure.
    pub fn verify_orientation(&self, dmax: usize) -> Report {
        let objs = self.check_objects(dmax);
        let checks = objs
            .par_iter()
            .map(|a| {
                let mut c = ObjectCheck::new(self.base.as_ref(), a);
                match self.evaluate_parts(&representable(self.base.clone(), a)) {
                    Err(e) => c.fail(e.to_string()),
                    Ok(e) => {
                        for n in 2..=self.top {
                            let p = e.diffs[n - 2].mul(&e.diffs[n - 1]);
                            if let Some((row, col)) = first_nonzero(&p) {
                                let who = if e.quots.is_none() {
                                    let (_, u) = &self.basis_at(a, n)[col];
                                    self.base.mor_name(u)
                                } else {
                                    format!("basis element {col}")
                                };
                                c.fail(format!("d∘d ≠ 0 on {who} in degree {n}, target degree {} (coefficient {} at {row})", n - 2, p.get(row, col)));
                                break;
                            }
                        }
                    }
                }
                c
            })
            .collect();
        Report::new("orientation", self, checks)
    }

    /// H(L(a)) = ℤ[0] through degree top − 1 for every a with dim a ≤ dmax.
    pub fn verify_asphericity(&self, dmax: usize) -> Report {
        let objs = self.check_objects(dmax);
        let through = self.top.saturating_sub(1);
        let checks = objs
            .par_iter()
            .map(|a| {
                let mut c = ObjectCheck::new(self.base.as_ref(), a);
                match self.complex_at(a).and_then(|l| Ok(l.homology_through(through)?)) {
                    Err(e) => c.fail(e.to_string()),
                    Ok(h) => {
                        let bad = h.iter().enumerate().find(|(k, g)| if *k == 0 { !g.is_z() } else { !g.is_zero() });
                        if let Some((k, g)) = bad {
                            c.fail(format!("H_{k} = {g}"));
                        }
                        c.homology = h;
                    }
                }
                c
            })
            .collect();
        Report::new("asphericity", self, checks)
    }

    /// Runs both checks on objects of dim ≤ dmax and records success.
    pub fn verify(&mut self, dmax: usize) -> (Report, Report) {
        let o = self.verify_orientation(dmax);
        let a = self.verify_asphericity(dmax);
        if o.ok() && a.ok() {
            self.verified = Some(dmax.min(self.top));
        }
        (o, a)
    }

    /// Naturality: L(f) commutes with the differentials for every generator
    /// f between objects of dim ≤ dmax.
    pub fn verify_naturality(&self, dmax: usize) -> Report {
        let objs = self.check_objects(dmax);
        let cat = self.base.clone();
        let checks = objs
            .par_iter()
            .map(|a| {
                let mut c = ObjectCheck::new(cat.as_ref(), a);
                for g in cat.generators_from(a) {
                    if !cat.is_finite() && cat.dim(&g.tgt) > dmax {
                        continue;
                    }
                    match self.chain_map(&g) {
                        Err(e) => c.fail(e.to_string()),
                        Ok(m) => {
                            if let Err(n) = crate::chains::verify_chain_map(&m) {
                                c.fail(format!("L({}) is not a chain map in degree {n}", cat.mor_name(&g)));
                            }
                        }
                    }
                    if !c.ok {
                        break;
                    }
                }
                c
            })
            .collect();
        Report::new("naturality", self, checks)
    }
}

fn first_nonzero(m: &IntMatrix) -> Option<(usize, usize)> {
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            if m.get_i64(i, j) != Some(0) {
                return Some((i, j));
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct ObjectCheck {
    pub object: String,
    pub dim: usize,
    pub ok: bool,
    pub detail: String,
    pub homology: Vec<FgAbGroup>,
}

impl ObjectCheck {
    fn new(cat: &dyn Category, a: &Obj) -> ObjectCheck {
        ObjectCheck { object: cat.obj_name(a), dim: cat.dim(a), ok: true, detail: String::new(), homology: Vec::new() }
    }

    fn fail(&mut self, why: String) {
        self.ok = false;
        self.detail = why;
    }
}

/// Per-object outcome of an integrator check.
#[derive(Clone, Debug)]
pub struct Report {
    pub check: String,
    pub category: String,
    pub integrator: String,
    pub objects: Vec<ObjectCheck>,
}

impl Report {
    fn new(check: &str, i: &Integrator, objects: Vec<ObjectCheck>) -> Report {
        Report { check: check.into(), category: i.base.name(), integrator: i.label.clone(), objects }
    }

    pub fn ok(&self) -> bool {
        self.objects.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&ObjectCheck> {
        self.objects.iter().filter(|c| !c.ok).collect()
    }

    pub fn to_json(&self) -> Value {
        let objs: Vec<Value> = self
            .objects
            .iter()
            .map(|c| {
                let mut v = json!({ "object": c.object, "dim": c.dim, "ok": c.ok });
                if !c.detail.is_empty() {
                    v["detail"] = json!(c.detail);
                }
                if !c.homology.is_empty() {
                    v["homology"] = Value::Array(c.homology.iter().map(|g| g.to_json()).collect());
                }
                v
            })
            .collect();
        json!({ "check": self.check, "category": self.category, "integrator": self.integrator, "ok": self.ok(), "objects": objs })
    }
}

// ---------------------------------------------------------------- constructions

fn index_of(terms: &FormalSum) -> HashMap<Obj, usize> {
    terms.objs.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect()
}

/// L(a)_k = ⊕_{dim a′=k} ℤ^{Hom(a′,a)}, d = Σ sg(φ) φ*.
pub fn free_integrator(cat: CatRef, orient: &Orientation, d: usize) -> Result<Integrator, IntegratorError> {
    if !cat.is_catenary() {
        return Err(IntegratorError::NotCatenary(cat.name()));
    }
    if d > orient.top() || d > cat.max_dim() {
        return Err(IntegratorError::Unsupported(format!("degree {d} beyond the truncation of {}", cat.name())));
    }
    let terms: Vec<FormalSum> = (0..=d).map(|n| FormalSum::new(cat.objects_of_dim(n))).collect();
    let mut diffs = Vec::with_capacity(d);
    for n in 1..=d {
        let idx = index_of(&terms[n - 1]);
        let mut m = FormalMap::new(terms[n].clone(), terms[n - 1].clone());
        for (col, a) in terms[n].objs.iter().enumerate() {
            for (phi, s) in orient.faces(a) {
                let row = *idx.get(&phi.src).ok_or_else(|| IntegratorError::Malformed(format!("face {} has a non-canonical source", cat.mor_name(phi))))?;
                m.push(row, col, *s, phi.clone());
            }
        }
        diffs.push(m);
    }
    Integrator::from_parts(cat.clone(), Flavor::FreeFromOrientation, &format!("L[{}]", cat.name()), terms, diffs, None)
}

/// The free integrator of the category's standard orientation.
pub fn standard_integrator(cat: CatRef, d: usize) -> Result<Integrator, IntegratorError> {
    let o = Orientation::standard(cat.clone(), d)?;
    free_integrator(cat, &o, d)
}

/// Degenerate parts: precomposition with the given epis a_n → b.
fn degenerate_part(terms: &[FormalSum], epis: impl Fn(usize) -> Vec<Mor>) -> Vec<FormalMap> {
    terms
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let es = if t.is_empty() { Vec::new() } else { epis(n) };
            let src = FormalSum::new(es.iter().map(|e| e.tgt.clone()).collect());
            let mut m = FormalMap::new(src, t.clone());
            for (j, e) in es.into_iter().enumerate() {
                m.push(0, j, 1, e);
            }
            m
        })
        .collect()
}

/// c_Δ, c_□, c_□ᶜ, c_𝔾ref: the standard free integrator divided by the
/// span of degeneracies (and connections, or the reflexivity κ).
pub fn normalized_integrator(kind: NormalizedKind, d: usize) -> Result<Integrator, IntegratorError> {
    let (cat, epis): (CatRef, Box<dyn Fn(usize) -> Vec<Mor>>) = match kind {
        NormalizedKind::Simplicial => (Arc::new(Delta::new(d)), Box::new(|n| (0..n).map(|j| Delta::degeneracy(n - 1, j)).collect())),
        NormalizedKind::Cubical => (Arc::new(Cube::new(d, None)), Box::new(|n| (1..=n).map(|i| Cube::degeneracy(n - 1, i)).collect())),
        NormalizedKind::CubicalConnections => (
            Arc::new(Cube::new(d, Some(ConnKind::Max))),
            Box::new(|n| {
                let mut v: Vec<Mor> = (1..=n).map(|i| Cube::degeneracy(n - 1, i)).collect();
                v.extend((1..n).map(|i| Cube::connection(n - 1, i, ConnKind::Max)));
                v
            }),
        ),
        NormalizedKind::GlobularReflexive => {
            (Arc::new(Globe::new(d, true)), Box::new(|n| if n == 0 { vec![] } else { vec![Globe::kappa(n - 1)] }))
        }
    };
    let free = standard_integrator(cat.clone(), d)?;
    let dg = degenerate_part(&free.terms, epis);
    Integrator::from_parts(cat.clone(), Flavor::Normalized, &format!("c[{}]", cat.name()), free.terms, free.diffs, Some(dg))
}

/// The integrator of a category with a single object and only its identity:
/// ℤ[0] everywhere.
pub fn point_integrator(cat: CatRef, d: usize) -> Result<Integrator, IntegratorError> {
    let objs = cat.all_objects();
    if objs.len() != 1 || cat.hom(&objs[0], &objs[0]).len() != 1 {
        return Err(IntegratorError::Unsupported(format!("{} is not the terminal category", cat.name())));
    }
    let mut terms = vec![FormalSum::new(objs)];
    terms.extend((1..=d).map(|_| FormalSum::default()));
    let diffs = (1..=d).map(|n| FormalMap::new(terms[n].clone(), terms[n - 1].clone())).collect();
    Integrator::from_parts(cat, Flavor::Explicit, "point", terms, diffs, None)
}

/// ℓ(a)_n = ⊕_{a_0→⋯→a_n} ℤ^{Hom(a_n, a)} with the simplicial faces of chains.
pub fn bousfield_kan(cat: CatRef, d: usize) -> Result<Integrator, IntegratorError> {
    if !cat.is_finite() {
        return Err(IntegratorError::InfiniteCategory(cat.name()));
    }
    let chains: Vec<Vec<Chain>> = (0..=d).map(|n| nerve(cat.as_ref(), n)).collect::<Result<_, _>>()?;
    let terms: Vec<FormalSum> = chains.iter().map(|cs| FormalSum::new(cs.iter().map(|c| c.objs.last().unwrap().clone()).collect())).collect();
    let mut diffs = Vec::with_capacity(d);
    for n in 1..=d {
        let idx: HashMap<&Chain, usize> = chains[n - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut m = FormalMap::new(terms[n].clone(), terms[n - 1].clone());
        for (col, c) in chains[n].iter().enumerate() {
            let last = c.objs.last().unwrap();
            for i in 0..=n {
                let f = c.face(cat.as_ref(), i);
                let row = idx[&f];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let mor = if i < n { cat.identity(last) } else { c.mors[n - 1].clone() };
                m.push(row, col, sign, mor);
            }
        }
        diffs.push(m);
    }
    Integrator::from_parts(cat.clone(), Flavor::BousfieldKan, &format!("BK[{}]", cat.name()), terms, diffs, None)
}

/// (c, d) ↦ L_C(c) ⊗ L_D(d) on C × D, for free integrators.
pub fn product_integrator(i: &Integrator, j: &Integrator) -> Result<Integrator, IntegratorError> {
    if !i.is_free() || !j.is_free() {
        return Err(IntegratorError::Unsupported("products of integrators with a degenerate part".into()));
    }
    let (ci, cj) = (i.base.clone(), j.base.clone());
    let trunc = ci.max_dim() + cj.max_dim();
    let cat: CatRef = Arc::new(Product::new(vec![ci.clone(), cj.clone()], trunc));
    let top = i.top.min(j.top);
    // degree n: blocks p = 0..=n, each I_p × J_{n−p} in row-major order
    let mut terms = Vec::with_capacity(top + 1);
    let mut pos: Vec<HashMap<(usize, usize, usize), usize>> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut objs = Vec::new();
        let mut idx = HashMap::new();
        for p in 0..=n {
            for (x, a) in i.terms[p].objs.iter().enumerate() {
                for (y, b) in j.terms[n - p].objs.iter().enumerate() {
                    idx.insert((p, x, y), objs.len());
                    objs.push(Obj::Tuple(vec![a.clone(), b.clone()]));
                }
            }
        }
        terms.push(FormalSum::new(objs));
        pos.push(idx);
    }
    let mut diffs = Vec::with_capacity(top);
    for n in 1..=top {
        let mut m = FormalMap::new(terms[n].clone(), terms[n - 1].clone());
        for p in 0..=n {
            let q = n - p;
            if p >= 1 {
                for e in &i.diffs[p - 1].entries {
                    for (y, b) in j.terms[q].objs.iter().enumerate() {
                        let col = pos[n][&(p, e.col, y)];
                        let row = pos[n - 1][&(p - 1, e.row, y)];
                        m.push(row, col, e.coeff, Product::tuple(vec![e.mor.clone(), cj.identity(b)]));
                    }
                }
            }
            if q >= 1 {
                let sign = if p % 2 == 0 { 1 } else { -1 };
                for e in &j.diffs[q - 1].entries {
                    for (x, a) in i.terms[p].objs.iter().enumerate() {
                        let col = pos[n][&(p, x, e.col)];
                        let row = pos[n - 1][&(p, x, e.row)];
                        m.push(row, col, sign * e.coeff, Product::tuple(vec![ci.identity(a), e.mor.clone()]));
                    }
                }
            }
        }
        diffs.push(m);
    }
    let label = format!("{}⊠{}", i.label, j.label);
    Integrator::from_parts(cat, Flavor::Product, &label, terms, diffs, None)
}

/// L_{A/F}(a, x) = L_A(a), with every formal coefficient lifted to A/F.
pub fn slice_integrator(i: &Integrator, f: SetRef) -> Result<Integrator, IntegratorError> {
    if f.base().name() != i.base.name() {
        return Err(PresheafError::BaseMismatch(f.base().name(), i.base.name()).into());
    }
    let slice = Arc::new(Slice::new(f.clone()));
    let cat: CatRef = slice.clone();
    let lift_sum = |t: &FormalSum| -> (FormalSum, Vec<usize>) {
        let mut objs = Vec::new();
        let mut offs = Vec::with_capacity(t.len());
        for a in &t.objs {
            offs.push(objs.len());
            for x in 0..f.count(a) {
                objs.push(Slice::elem(a.clone(), x));
            }
        }
        (FormalSum::new(objs), offs)
    };
    let lifted: Vec<(FormalSum, Vec<usize>)> = i.terms.iter().map(lift_sum).collect();
    let lift_map = |m: &FormalMap, src: &(FormalSum, Vec<usize>), tgt: &(FormalSum, Vec<usize>)| -> FormalMap {
        let mut out = FormalMap::new(src.0.clone(), tgt.0.clone());
        for e in &m.entries {
            for x in 0..f.count(&m.src.objs[e.col]) {
                let l = slice.lift(&e.mor, x);
                let y = Slice::split(&l.src).1;
                out.push(tgt.1[e.row] + y, src.1[e.col] + x, e.coeff, l);
            }
        }
        out
    };
    let diffs = i.diffs.iter().enumerate().map(|(k, m)| lift_map(m, &lifted[k + 1], &lifted[k])).collect();
    let degeneracies = i.degeneracies.as_ref().map(|dg| {
        dg.iter()
            .enumerate()
            .map(|(n, m)| {
                let src = lift_sum(&m.src);
                lift_map(m, &src, &lifted[n])
            })
            .collect()
    });
    let terms = lifted.into_iter().map(|(t, _)| t).collect();
    let label = format!("{}/{}", i.label, f.name());
    Integrator::from_parts(cat, Flavor::Slice, &label, terms, diffs, degeneracies)
}

/// L_Θn(T) = unnormalized complex of k ↦ ℤ^{Hom(m_n diag Δ_k, T)}.
pub fn theta_integrator(n: usize, d: usize) -> Result<Integrator, IntegratorError> {
    let cat = theta(n, n.max(1) * d);
    let diag = DiagonalMn::new(n, false, cat.clone(), d);
    let terms: Vec<FormalSum> = (0..=d).map(|k| FormalSum::new(vec![diag.obj(&Obj::Dim(k))])).collect();
    let mut diffs = Vec::with_capacity(d);
    for k in 1..=d {
        let mut m = FormalMap::new(terms[k].clone(), terms[k - 1].clone());
        for i in 0..=k {
            m.push(0, 0, if i % 2 == 0 { 1 } else { -1 }, diag.mor(&Delta::face(k, i)));
        }
        diffs.push(m);
    }
    Integrator::from_parts(cat, Flavor::Explicit, &format!("L[theta{n}]"), terms, diffs, None)
}

// ---------------------------------------------------------------- Ξ contraction

/// The deformation retraction of L_Ξ(T) onto its minimal vertex.
pub struct XiContraction {
    pub complex: ChainComplex,
    pub r: ChainMap,
    pub s: ChainMap,
    pub h: ChainHomotopy,
}

fn xi_level(cat: &dyn Category) -> Option<usize> {
    cat.name().strip_prefix("xi").and_then(|s| s.parse().ok())
}

/// The identity of the point one level down (the terminal map at level 0).
fn point_identity(level: usize) -> Mor {
    if level == 0 {
        Terminal::unit()
    } else {
        XiWreath::mk(Obj::point(), Obj::point(), vec![0], None)
    }
}

/// The chosen 0-face x_a: e → a of an object at `level`.
fn min_vertex(level: usize, a: &Obj) -> Mor {
    if a.is_point() {
        point_identity(level)
    } else {
        XiWreath::vertex(a, 0)
    }
}

/// h(u) for u: a′ → T at Ξ level `level`, as a signed list of morphisms
/// into T one dimension up.
fn xi_h(level: usize, u: &Mor) -> Vec<(i64, Mor)> {
    // P is treated as Δ_0≀e, so L(P) gets the cone contraction
    if level == 0 {
        return Vec::new();
    }
    let (i, a1) = XiWreath::split(&u.src);
    let (_, a) = XiWreath::split(&u.tgt);
    let (phi, psi) = XiWreath::parts(u);
    let xa = min_vertex(level - 1, &a);
    let mut hphi = vec![0u32];
    hphi.extend_from_slice(phi);
    let pm = if i % 2 == 0 { 1 } else { -1 };
    let first = |out: &mut Vec<(i64, Mor)>| {
        let src = XiWreath::stack(i + 1, Obj::point());
        out.push((1, XiWreath::mk(src, u.tgt.clone(), hphi.clone(), Some(xa.clone()))));
    };
    let second = |out: &mut Vec<(i64, Mor)>| {
        // for constant φ any ψ gives the same value; take x_a ∘ (a′ → e)
        let psi = match psi {
            Some(p) => p.clone(),
            None if a1.is_point() => xa.clone(),
            None => XiWreath::mk(a1.clone(), a.clone(), vec![0; XiWreath::split(&a1).0 + 1], None),
        };
        for (c, p2) in xi_h(level - 1, &psi) {
            let src = XiWreath::stack(i, p2.src.clone());
            out.push((pm * c, XiWreath::mk(src, u.tgt.clone(), phi.to_vec(), Some(p2))));
        }
    };
    let mut out = Vec::new();
    if i == 0 {
        first(&mut out);
    } else if !a1.is_point() {
        second(&mut out);
    } else {
        first(&mut out);
        second(&mut out);
    }
    out
}

/// r: L(T) → ℤ[0], s: ℤ[0] → L(T) at the minimal vertex, and h with
/// dh + hd = id − sr, for T in Ξ_n and L built through degree d.
pub fn xi_contraction(cat: CatRef, t: &Obj, d: usize) -> Result<XiContraction, IntegratorError> {
    let level = xi_level(cat.as_ref()).ok_or_else(|| IntegratorError::Unsupported(format!("{} is not a Ξ category", cat.name())))?;
    let l = standard_integrator(cat.clone(), d)?;
    let complex = l.complex_at(t)?;
    let bases: Vec<Vec<(usize, Mor)>> = (0..=d).map(|n| l.basis_at(t, n)).collect();
    let index: Vec<HashMap<&Mor, usize>> = bases.iter().map(|b| b.iter().enumerate().map(|(k, (_, u))| (u, k)).collect()).collect();
    let point = ChainComplex::point();
    let v0 = if t.is_point() { cat.identity(t) } else { XiWreath::vertex(t, 0) };
    let mut s0 = IntMatrix::zeros(complex.rank(0), 1);
    s0.set_i64(index[0][&v0], 0, 1);
    let mut r0 = IntMatrix::zeros(1, complex.rank(0));
    for k in 0..complex.rank(0) {
        r0.set_i64(0, k, 1);
    }
    let s = ChainMap::new(point.clone(), complex.clone(), vec![s0])?;
    let r = ChainMap::new(complex.clone(), point, vec![r0])?;
    let mut comps = Vec::with_capacity(d);
    for n in 0..d {
        let mut m = IntMatrix::zeros(complex.rank(n + 1), complex.rank(n));
        for (col, (_, u)) in bases[n].iter().enumerate() {
            for (c, v) in xi_h(level, u) {
                let row = *index[n + 1]
                    .get(&v)
                    .ok_or_else(|| IntegratorError::Malformed(format!("h({}) leaves the basis: {}", cat.mor_name(u), cat.mor_name(&v))))?;
                m.add_at(row, col, c);
            }
        }
        comps.push(m);
    }
    Ok(XiContraction { complex, r, s, h: ChainHomotopy { comps } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::verify_homotopy;
    use crate::presheaf::constant_z;
    use crate::shapecat::{make_category, CircleSet, Finite, TerminalSet};
    use crate::wreath::xi;

    fn delta(d: usize) -> CatRef {
        Arc::new(Delta::new(d))
    }

    #[test]
    fn standard_simplicial_integrator() {
        let l = standard_integrator(delta(5), 5).unwrap();
        assert!(l.verify_orientation(5).ok());
        let a = l.verify_asphericity(4);
        assert!(a.ok(), "{:?}", a.failures());
        assert!(l.verify_naturality(3).ok());
        // L(Δ_1): ranks |Hom(Δ_k, Δ_1)| = k + 2
        let c = l.complex_at(&Obj::Dim(1)).unwrap();
        assert_eq!(&c.ranks()[..4], &[2, 3, 4, 5]);
    }

    #[test]
    fn flipped_sign_breaks_d_squared() {
        let d = delta(3);
        let mut o = Orientation::standard(d.clone(), 3).unwrap();
        assert!(o.set(&Delta::face(2, 1), 1));
        let l = free_integrator(d.clone(), &o, 3).unwrap();
        let rep = l.verify_orientation(3);
        let bad = rep.objects.iter().find(|c| c.object == "2").unwrap();
        assert!(!bad.ok);
        assert!(bad.detail.contains("target degree 0"), "{}", bad.detail);
        // hand expansion: d(d(id)) = (δ0 − δ1)(δ0 + δ1 + δ2) = 2⟨2⟩ − 2⟨0⟩
        let e = l.evaluate_parts(&representable(d.clone(), &Obj::Dim(2))).unwrap();
        let dd = e.diffs[0].mul(&e.diffs[1]);
        let col = l.basis_at(&Obj::Dim(2), 2).iter().position(|(_, u)| *u == d.identity(&Obj::Dim(2))).unwrap();
        let vert = |x: u32| d.position(&Delta::map(0, 2, vec![x]));
        for v in 0..3u32 {
            let want = match v {
                0 => -2,
                2 => 2,
                _ => 0,
            };
            assert_eq!(dd.get_i64(vert(v), col), Some(want));
        }
    }

    #[test]
    fn cube_orientation_is_not_aspherical() {
        let c: CatRef = Arc::new(Cube::new(4, None));
        let l = standard_integrator(c, 4).unwrap();
        assert!(l.verify_orientation(4).ok());
        let a = l.verify_asphericity(0);
        let f = a.failures();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].homology[1], FgAbGroup::free(1));
    }

    #[test]
    fn normalized_integrators() {
        let c = normalized_integrator(NormalizedKind::Simplicial, 4).unwrap();
        let l1 = c.complex_at(&Obj::Dim(1)).unwrap();
        assert_eq!(&l1.ranks()[..3], &[2, 1, 0]);
        assert_eq!(l1.d(1), IntMatrix::from_rows(&[vec![-1], vec![1]]));
        for kind in [NormalizedKind::Simplicial, NormalizedKind::Cubical, NormalizedKind::CubicalConnections, NormalizedKind::GlobularReflexive] {
            let mut c = normalized_integrator(kind, 4).unwrap();
            let (o, a) = c.verify(3);
            assert!(o.ok() && a.ok(), "{kind:?}: {:?} {:?}", o.failures(), a.failures());
            assert!(c.verify_naturality(2).ok(), "{kind:?}");
        }
        let cc = normalized_integrator(NormalizedKind::CubicalConnections, 3).unwrap();
        assert_eq!(&cc.complex_at(&Obj::Dim(1)).unwrap().ranks()[..2], &[2, 1]);
        // c_𝔾ref(𝔻_n): ℤ² ← ⋯ ← ℤ² ← ℤ ← 0 with matrices [−1 −1; 1 1]
        let g = normalized_integrator(NormalizedKind::GlobularReflexive, 5).unwrap();
        let l3 = g.complex_at(&Obj::Dim(3)).unwrap();
        assert_eq!(&l3.ranks()[..5], &[2, 2, 2, 1, 0]);
        for n in 1..=2 {
            let m = l3.d(n);
            assert_eq!(m.rank(), 1);
            assert_eq!(m.get_i64(0, 0).map(i64::abs), Some(1));
        }
    }

    #[test]
    fn bousfield_kan_examples() {
        let t: CatRef = Arc::new(Terminal::new());
        let l = bousfield_kan(t.clone(), 4).unwrap();
        let c = l.complex_at(&Obj::point()).unwrap();
        assert_eq!(c.ranks(), &[1, 1, 1, 1, 1]);
        let ds: Vec<i64> = (1..=4).map(|n| c.d(n).get_i64(0, 0).unwrap()).collect();
        assert_eq!(ds, vec![0, 1, 0, 1]);
        let p: CatRef = Arc::new(Finite::chain_poset(2));
        let l = bousfield_kan(p.clone(), 3).unwrap();
        let one = p.parse_object("1").unwrap();
        let c = l.complex_at(&one).unwrap();
        // chains (0),(1) in degree 0; 0→0, 0→1, 1→1 in degree 1; each has one map to 1
        assert_eq!(&c.ranks()[..2], &[2, 3]);
        assert!(l.verify_asphericity(0).ok());
        assert!(bousfield_kan(delta(2), 2).is_err());
        let pp: CatRef = Arc::new(Finite::parallel_pair());
        assert!(bousfield_kan(pp, 3).unwrap().verify_asphericity(0).ok());
    }

    #[test]
    fn product_matches_the_koszul_orientation() {
        let l = standard_integrator(delta(3), 3).unwrap();
        let p = product_integrator(&l, &l).unwrap();
        let d2 = make_category("prod:delta,delta", 6).unwrap();
        let free = standard_integrator(d2, 3).unwrap();
        let table = |i: &Integrator| {
            let mut m = HashMap::new();
            for (n, d) in i.diffs.iter().enumerate() {
                for e in &d.entries {
                    let key = (n, d.tgt.objs[e.row].clone(), d.src.objs[e.col].clone(), e.mor.clone());
                    *m.entry(key).or_insert(0) += e.coeff;
                }
            }
            m
        };
        assert_eq!(table(&p), table(&free));
        let a = p.verify_asphericity(3);
        assert!(a.ok(), "{:?}", a.failures());
        // tensor with the point integrator changes nothing
        let pt = point_integrator(Arc::new(Terminal::new()), 3).unwrap();
        let q = product_integrator(&l, &pt).unwrap();
        for n in 0..=3 {
            let a = Obj::Tuple(vec![Obj::Dim(n), Obj::point()]);
            assert_eq!(q.complex_at(&a).unwrap(), l.complex_at(&Obj::Dim(n)).unwrap());
        }
    }

    #[test]
    fn slices() {
        let d = delta(4);
        let l = standard_integrator(d.clone(), 4).unwrap();
        let t = slice_integrator(&l, Arc::new(TerminalSet::new(d.clone()))).unwrap();
        for n in 0..=3 {
            assert_eq!(t.complex_at(&Slice::elem(Obj::Dim(n), 0)).unwrap(), l.complex_at(&Obj::Dim(n)).unwrap());
        }
        let s = slice_integrator(&l, Arc::new(CircleSet::new(d.clone()))).unwrap();
        let a = s.verify_asphericity(3);
        assert!(a.ok(), "{:?}", a.failures());
        // degree-n term of the constant-ℤ complex has one summand per n-simplex of S¹
        let z = s.evaluate(&constant_z(s.base().clone())).unwrap();
        assert_eq!(&z.ranks()[..4], &[1, 2, 3, 4]);
    }

    #[test]
    fn xi_orientations() {
        for n in 2..=3 {
            let x = xi(n, 4);
            let mut l = standard_integrator(x, 4).unwrap();
            let (o, a) = l.verify(4);
            assert!(o.ok(), "{:?}", o.failures());
            assert!(a.ok(), "{:?}", a.failures());
        }
    }

    #[test]
    fn xi_contractions() {
        let x = xi(2, 5);
        for t in ["1", "1;(1)", "3;(1)"] {
            let t = x.parse_object(t).unwrap();
            let c = xi_contraction(x.clone(), &t, 5).unwrap();
            assert_eq!(c.r.compose(&c.s), ChainMap::identity(&ChainComplex::point()));
            let sr = c.s.compose(&c.r);
            let id = ChainMap::identity(&c.complex);
            assert_eq!(verify_homotopy(&c.h, &id, &sr, 4), Ok(()), "{t}");
        }
        // L(P) has one constant map from every object, so h is the cone, not 0
        let p = xi_contraction(x.clone(), &Obj::point(), 4).unwrap();
        assert_eq!(p.r.compose(&p.s), ChainMap::identity(&ChainComplex::point()));
        assert_eq!(verify_homotopy(&p.h, &ChainMap::identity(&p.complex), &p.s.compose(&p.r), 3), Ok(()));
        assert!(!p.h.comps[0].is_zero());
    }

    #[test]
    fn theta_integrator_constant_complex() {
        let l = theta_integrator(2, 4).unwrap();
        let z = l.evaluate(&constant_z(l.base().clone())).unwrap();
        assert_eq!(z.ranks(), &[1, 1, 1, 1, 1]);
        assert!(z.is_point(3).unwrap());
        let a = l.verify_asphericity(2);
        assert!(a.ok(), "{:?}", a.failures());
    }
}
