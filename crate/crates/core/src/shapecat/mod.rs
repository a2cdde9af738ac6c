//! Truncated combinatorial small categories.
//!
//! Every category exposes objects per dimension up to a truncation D,
//! finite hom-sets with canonical morphism payloads (structural equality is
//! equality in the category), composition, generators with a factorization
//! into them, and, for caténaire categories, codimension-1 monomorphisms with
//! a standard sign.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use thiserror::Error;

mod cube;
mod delta;
mod finite;
mod functor;
mod globe;
mod product;
mod setpsh;
mod slice;

pub use cube::{ConnKind, Cube};
pub use delta::Delta;
pub use finite::{Finite, Terminal};
pub use functor::{verify_functor, CompositeFunctor, Diagonal, Functor, IdentityFunctor, Inclusion, Projection};
pub use globe::Globe;
pub use product::{Opposite, Product};
pub use setpsh::{
    parse_set_presheaf, boundary_of_simplex, CircleSet, EmptySet, PosetNerve, ProductSet, RepresentableSet, SetPresheaf, SetRef, SubSet, TableSet, TerminalSet,
};
pub(crate) use setpsh::builtin_or_file;
pub use slice::Slice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatError {
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("category is not caténaire: {0}")]
    NotCatenary(String),
    #[error("category is not finite: {0}")]
    InfiniteCategory(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("bad object: {0}")]
    BadObject(String),
    #[error("unknown category: {0}")]
    UnknownCategory(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Objects of all built-in categories.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Obj {
    /// Δ_n, □_n, 𝔻_n
    Dim(usize),
    /// object of an explicitly presented finite category
    Node(usize),
    /// object of a product category
    Tuple(Vec<Obj>),
    /// [Δ_n; (a_1, …, a_n)] of a wreath product; `Tree([])` is the point
    Tree(Vec<Obj>),
    /// μ′(Δ_i, a) of a restricted wreath product, i ≥ 1
    Stack(usize, Box<Obj>),
    /// (a, x) in a category of elements
    Elem(Box<Obj>, usize),
}

impl Obj {
    pub fn point() -> Obj {
        Obj::Tree(Vec::new())
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Obj::Tree(v) if v.is_empty())
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::Dim(n) => write!(f, "{n}"),
            Obj::Node(n) => write!(f, "#{n}"),
            Obj::Tuple(v) => {
                let parts: Vec<String> = v.iter().map(|o| o.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Obj::Tree(ch) => {
                if ch.iter().all(|c| c.is_point()) {
                    write!(f, "{}", ch.len())
                } else {
                    let parts: Vec<String> = ch.iter().map(|o| o.to_string()).collect();
                    write!(f, "{};({})", ch.len(), parts.join(","))
                }
            }
            Obj::Stack(i, a) => {
                if a.is_point() {
                    write!(f, "{i}")
                } else {
                    write!(f, "{i};({a})")
                }
            }
            Obj::Elem(a, x) => write!(f, "{a}@{x}"),
        }
    }
}

/// First letter of the climb in a globe morphism.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    Sigma,
    Tau,
    Id,
}

/// Canonical morphism payloads.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Arrow {
    /// Δ: image vector; cubes: function table on {0,1}^m as bitmasks
    Map(Vec<u32>),
    /// globes: drop to 𝔻_k through κ's, then climb starting with the letter
    Glob(usize, Letter),
    Tuple(Vec<Mor>),
    Op(Box<Mor>),
    /// base map and fibers f_{ji}, ordered by i then j
    Wreath(Vec<u32>, Vec<Mor>),
    /// base map and, when it is non-constant, the fiber morphism
    Xi(Vec<u32>, Option<Box<Mor>>),
    /// index into the morphism table of a finite category
    Fin(usize),
    Unit,
    Lift(Box<Mor>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mor {
    pub src: Obj,
    pub tgt: Obj,
    pub arrow: Arrow,
}

impl Mor {
    pub fn new(src: Obj, tgt: Obj, arrow: Arrow) -> Mor {
        Mor { src, tgt, arrow }
    }

    /// The Δ image vector of a `Map` payload.
    pub fn map(&self) -> &[u32] {
        match &self.arrow {
            Arrow::Map(v) => v,
            Arrow::Wreath(v, _) | Arrow::Xi(v, _) => v,
            _ => panic!("morphism has no base map"),
        }
    }
}

pub type CatRef = Arc<dyn Category>;

type HomTable = RwLock<HashMap<(Obj, Obj), Arc<Vec<Mor>>>>;
type IndexTable = RwLock<HashMap<(Obj, Obj), Arc<HashMap<Mor, usize>>>>;

/// Memoized hom-sets.  Two threads may compute the same entry; both results
/// are identical, and the first insert wins.
#[derive(Default)]
pub struct HomCache {
    homs: HomTable,
    index: IndexTable,
}

impl HomCache {
    pub fn get_or(&self, a: &Obj, b: &Obj, f: impl FnOnce() -> Vec<Mor>) -> Arc<Vec<Mor>> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.homs.read().get(&key) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.homs.write().entry(key).or_insert(v).clone()
    }

    pub fn index_or(&self, a: &Obj, b: &Obj, homs: impl FnOnce() -> Arc<Vec<Mor>>) -> Arc<HashMap<Mor, usize>> {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.index.read().get(&key) {
            return v.clone();
        }
        let h = homs();
        let m: HashMap<Mor, usize> = h.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let m = Arc::new(m);
        self.index.write().entry(key).or_insert(m).clone()
    }
}

pub trait Category: Send + Sync {
    fn name(&self) -> String;
    /// Truncation dimension D.
    fn max_dim(&self) -> usize;
    /// Objects of dimension d, for d ≤ D.
    fn objects_of_dim(&self, d: usize) -> Vec<Obj>;
    fn dim(&self, a: &Obj) -> usize;
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor>;
    fn cache(&self) -> &HomCache;
    fn identity(&self, a: &Obj) -> Mor;
    /// g ∘ f, assuming tgt f = src g.
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor;
    /// Generating morphisms with the given source, target dimension ≤ D.
    fn generators_from(&self, a: &Obj) -> Vec<Mor>;
    /// Generating morphisms with the given target, source dimension ≤ D.
    fn generators_into(&self, b: &Obj) -> Vec<Mor>;
    /// A word of generators g_1, …, g_r with f = g_r ∘ ⋯ ∘ g_1 (empty for identities).
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError>;
    /// Canonical name of a morphism (generators get their generator names).
    fn mor_name(&self, f: &Mor) -> String;
    fn parse_object(&self, s: &str) -> Result<Obj, CatError>;

    fn obj_name(&self, a: &Obj) -> String {
        a.to_string()
    }
    fn is_catenary(&self) -> bool {
        false
    }
    fn is_finite(&self) -> bool {
        false
    }
    /// Exact mono test when the representation allows it.
    fn mono_shortcut(&self, _f: &Mor) -> Option<bool> {
        None
    }
    /// Closed-form codimension-1 monos into `a`, one per subobject.
    fn codim1_closed(&self, _a: &Obj) -> Option<Vec<Mor>> {
        None
    }
    /// Sign of a codimension-1 mono under the standard orientation.
    fn standard_sign(&self, _f: &Mor) -> Option<i64> {
        None
    }
    /// All objects (finite categories only).
    fn all_objects(&self) -> Vec<Obj> {
        (0..=self.max_dim()).flat_map(|d| self.objects_of_dim(d)).collect()
    }

    fn hom(&self, a: &Obj, b: &Obj) -> Arc<Vec<Mor>> {
        self.cache().get_or(a, b, || self.compute_hom(a, b))
    }
    fn hom_index(&self, a: &Obj, b: &Obj) -> Arc<HashMap<Mor, usize>> {
        self.cache().index_or(a, b, || self.hom(a, b))
    }
    /// Position of f in its hom-set listing.
    fn position(&self, f: &Mor) -> usize {
        *self.hom_index(&f.src, &f.tgt).get(f).unwrap_or_else(|| panic!("morphism {} not in its hom-set", self.mor_name(f)))
    }
    /// Objects with dimension ≤ d.
    fn objects_upto(&self, d: usize) -> Vec<Obj> {
        (0..=d.min(self.max_dim())).flat_map(|k| self.objects_of_dim(k)).collect()
    }
}

/// Composition with a composability check.
pub fn compose(cat: &dyn Category, g: &Mor, f: &Mor) -> Result<Mor, CatError> {
    if f.tgt != g.src {
        return Err(CatError::NotComposable(format!(
            "{} ends at {} but {} starts at {}",
            cat.mor_name(f),
            f.tgt,
            cat.mor_name(g),
            g.src
        )));
    }
    Ok(cat.compose_raw(g, f))
}

/// Composite of a generator word (first element applied first).
pub fn compose_word(cat: &dyn Category, start: &Obj, word: &[Mor]) -> Mor {
    let mut acc = cat.identity(start);
    for g in word {
        acc = cat.compose_raw(g, &acc);
    }
    acc
}

/// Mono test: f is mono iff postcomposition Hom(U, S) → Hom(U, T) is injective
/// for every U with dim U ≤ bound (default dim S).  Function-table categories
/// use exact injectivity instead.
pub fn is_mono(cat: &dyn Category, f: &Mor, bound: Option<usize>) -> bool {
    if bound.is_none() {
        if let Some(b) = cat.mono_shortcut(f) {
            return b;
        }
    }
    let test: Vec<Obj> = if cat.is_finite() {
        cat.all_objects()
    } else {
        let b = bound.unwrap_or_else(|| cat.dim(&f.src));
        cat.objects_upto(b)
    };
    is_mono_against(cat, f, &test)
}

fn is_mono_against(cat: &dyn Category, f: &Mor, test: &[Obj]) -> bool {
    for u in test {
        let h = cat.hom(u, &f.src);
        let mut seen = HashSet::with_capacity(h.len());
        for g in h.iter() {
            if !seen.insert(cat.compose_raw(f, g)) {
                return false;
            }
        }
    }
    true
}

fn is_iso(cat: &dyn Category, f: &Mor) -> Option<Mor> {
    let id_src = cat.identity(&f.src);
    let id_tgt = cat.identity(&f.tgt);
    cat.hom(&f.tgt, &f.src).iter().find(|g| cat.compose_raw(g, f) == id_src && cat.compose_raw(f, g) == id_tgt).cloned()
}

/// Groups monos into subobjects: m ~ m′ iff m′ f = m for an iso f.
pub fn group_subobjects(cat: &dyn Category, monos: Vec<Mor>) -> Vec<Mor> {
    let mut classes: Vec<Mor> = Vec::new();
    let mut iso_cache: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
    for m in monos {
        let mut found = false;
        for rep in &classes {
            if cat.dim(&rep.src) != cat.dim(&m.src) {
                continue;
            }
            let isos = iso_cache
                .entry((m.src.clone(), rep.src.clone()))
                .or_insert_with(|| cat.hom(&m.src, &rep.src).iter().filter(|f| is_iso(cat, f).is_some()).cloned().collect());
            if isos.iter().any(|f| cat.compose_raw(rep, f) == m) {
                found = true;
                break;
            }
        }
        if !found {
            classes.push(m);
        }
    }
    classes
}

/// Subobjects of `a` with source dimension ≤ bound (default dim a).
pub fn subobjects(cat: &dyn Category, a: &Obj, bound: Option<usize>, mono_bound: Option<usize>) -> Vec<Mor> {
    let b = bound.unwrap_or_else(|| cat.dim(a));
    let sources = if cat.is_finite() { cat.all_objects() } else { cat.objects_upto(b) };
    let mut monos = Vec::new();
    for s in &sources {
        for f in cat.hom(s, a).iter() {
            if is_mono(cat, f, mono_bound) {
                monos.push(f.clone());
            }
        }
    }
    group_subobjects(cat, monos)
}

/// Codimension-1 monos into `a`: closed form when available, otherwise the
/// subobjects with sources of dimension dim a − 1.
pub fn codim1_monos(cat: &dyn Category, a: &Obj) -> Result<Vec<Mor>, CatError> {
    if !cat.is_catenary() {
        return Err(CatError::NotCatenary(cat.name()));
    }
    if let Some(v) = cat.codim1_closed(a) {
        return Ok(v);
    }
    Ok(codim1_brute(cat, a))
}

/// Codimension-1 subobjects found by enumeration, ignoring closed forms.
pub fn codim1_brute(cat: &dyn Category, a: &Obj) -> Vec<Mor> {
    let d = cat.dim(a);
    if d == 0 {
        return Vec::new();
    }
    let mut monos = Vec::new();
    for s in cat.objects_of_dim(d - 1) {
        for f in cat.hom(&s, a).iter() {
            if is_mono(cat, f, None) {
                monos.push(f.clone());
            }
        }
    }
    group_subobjects(cat, monos)
}

/// An n-simplex of the nerve: a_0 → a_1 → ⋯ → a_n.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Chain {
    pub objs: Vec<Obj>,
    pub mors: Vec<Mor>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.mors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mors.is_empty()
    }

    /// Face d_i: drop a_0 (i = 0), a_n (i = n), or compose at a_i.
    pub fn face(&self, cat: &dyn Category, i: usize) -> Chain {
        let n = self.len();
        assert!(n >= 1 && i <= n);
        let mut objs = self.objs.clone();
        let mut mors = self.mors.clone();
        objs.remove(i);
        if i == 0 {
            mors.remove(0);
        } else if i == n {
            mors.pop();
        } else {
            let g = mors.remove(i);
            let f = mors[i - 1].clone();
            mors[i - 1] = cat.compose_raw(&g, &f);
        }
        Chain { objs, mors }
    }

    /// Degeneracy s_i: insert the identity of a_i.
    pub fn degeneracy(&self, cat: &dyn Category, i: usize) -> Chain {
        let mut objs = self.objs.clone();
        let mut mors = self.mors.clone();
        objs.insert(i, self.objs[i].clone());
        mors.insert(i, cat.identity(&self.objs[i]));
        Chain { objs, mors }
    }

    pub fn is_degenerate(&self, cat: &dyn Category) -> bool {
        self.mors.iter().any(|f| f.src == f.tgt && *f == cat.identity(&f.src))
    }
}

/// All n-chains of a finite category (identities allowed).
pub fn nerve(cat: &dyn Category, n: usize) -> Result<Vec<Chain>, CatError> {
    if !cat.is_finite() {
        return Err(CatError::InfiniteCategory(cat.name()));
    }
    let objs = cat.all_objects();
    let mut chains: Vec<Chain> = objs.iter().map(|a| Chain { objs: vec![a.clone()], mors: vec![] }).collect();
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &chains {
            let last = c.objs.last().unwrap();
            for b in &objs {
                for f in cat.hom(last, b).iter() {
                    let mut d = c.clone();
                    d.objs.push(b.clone());
                    d.mors.push(f.clone());
                    next.push(d);
                }
            }
        }
        chains = next;
    }
    Ok(chains)
}

/// Checks identities and associativity on all composable triples among
/// objects of dimension ≤ d; returns a description of the first failure.
pub fn check_axioms(cat: &dyn Category, d: usize) -> Result<(), String> {
    let objs = if cat.is_finite() { cat.all_objects() } else { cat.objects_upto(d) };
    for a in &objs {
        for b in &objs {
            let h = cat.hom(a, b);
            let set: HashSet<&Mor> = h.iter().collect();
            if set.len() != h.len() {
                return Err(format!("duplicate morphisms in hom({a},{b})"));
            }
            for f in h.iter() {
                if cat.compose_raw(&cat.identity(b), f) != *f || cat.compose_raw(f, &cat.identity(a)) != *f {
                    return Err(format!("identity law fails for {}", cat.mor_name(f)));
                }
            }
        }
    }
    for a in &objs {
        for b in &objs {
            for f in cat.hom(a, b).iter() {
                for c in &objs {
                    for g in cat.hom(b, c).iter() {
                        let gf = cat.compose_raw(g, f);
                        if !cat.hom(a, c).contains(&gf) {
                            return Err(format!("composite {} not in hom({a},{c})", cat.mor_name(&gf)));
                        }
                        for e in &objs {
                            for h in cat.hom(c, e).iter() {
                                if cat.compose_raw(h, &gf) != cat.compose_raw(&cat.compose_raw(h, g), f) {
                                    return Err(format!("associativity fails at {},{},{}", cat.mor_name(f), cat.mor_name(g), cat.mor_name(h)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks that factor() reproduces every morphism among objects of dim ≤ d.
pub fn check_factorizations(cat: &dyn Category, d: usize) -> Result<(), String> {
    let objs = if cat.is_finite() { cat.all_objects() } else { cat.objects_upto(d) };
    for a in &objs {
        for b in &objs {
            for f in cat.hom(a, b).iter() {
                let w = cat.factor(f).map_err(|e| e.to_string())?;
                if compose_word(cat, a, &w) != *f {
                    return Err(format!("factorization of {} does not compose back", cat.mor_name(f)));
                }
            }
        }
    }
    Ok(())
}

/// Lookup table from generator names to generators, over objects of dim ≤ d.
pub fn generator_table(cat: &dyn Category, d: usize) -> HashMap<String, Mor> {
    let objs = if cat.is_finite() { cat.all_objects() } else { cat.objects_upto(d) };
    let mut out = HashMap::new();
    for a in &objs {
        for g in cat.generators_from(a) {
            out.insert(cat.mor_name(&g), g);
        }
    }
    out
}

/// Parses the compact object grammar `k` or `k;(t_1,…,t_m)` into a raw tree
/// (head, children).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub head: usize,
    pub children: Option<Vec<RawTree>>,
}

pub fn parse_raw_tree(s: &str) -> Result<RawTree, CatError> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let t = parse_tree_at(&chars, &mut pos)?;
    if pos != chars.len() {
        return Err(CatError::BadObject(format!("trailing input in {s:?}")));
    }
    Ok(t)
}

fn parse_tree_at(c: &[char], pos: &mut usize) -> Result<RawTree, CatError> {
    let start = *pos;
    while *pos < c.len() && c[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(CatError::BadObject(format!("expected a number at position {start}")));
    }
    let head: usize = c[start..*pos].iter().collect::<String>().parse().map_err(|_| CatError::BadObject("number too large".into()))?;
    if *pos < c.len() && c[*pos] == ';' {
        *pos += 1;
        if *pos >= c.len() || c[*pos] != '(' {
            return Err(CatError::BadObject("expected '(' after ';'".into()));
        }
        *pos += 1;
        let mut children = Vec::new();
        loop {
            children.push(parse_tree_at(c, pos)?);
            if *pos < c.len() && c[*pos] == ',' {
                *pos += 1;
                continue;
            }
            if *pos < c.len() && c[*pos] == ')' {
                *pos += 1;
                break;
            }
            return Err(CatError::BadObject("expected ',' or ')'".into()));
        }
        Ok(RawTree { head, children: Some(children) })
    } else {
        Ok(RawTree { head, children: None })
    }
}

pub(crate) fn parse_usize(s: &str) -> Result<usize, CatError> {
    s.trim().parse().map_err(|_| CatError::BadObject(format!("expected a dimension, got {s:?}")))
}

/// Builds a category from the command-line grammar: `delta`, `delta^N`,
/// `delta_mono`, `globe`, `globe_ref`, `cube`, `cube_c`, `cube_c_min`,
/// `theta<N>`, `xi<N>`, `terminal`, `poset<N>`, `parallel`,
/// `finite:<file>`, `op:<cat>`, `prod:<cat>,<cat>`, `slice:<cat>:<presheaf>`.
pub fn make_category(spec: &str, trunc: usize) -> Result<CatRef, CatError> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("op:") {
        return Ok(Arc::new(Opposite::new(make_category(rest, trunc)?)));
    }
    if let Some(rest) = spec.strip_prefix("prod:") {
        let parts = split_top_level(rest, ',');
        let cats = parts.iter().map(|p| make_category(p, trunc)).collect::<Result<Vec<_>, _>>()?;
        return Ok(Arc::new(Product::new(cats, trunc)));
    }
    if let Some(rest) = spec.strip_prefix("slice:") {
        let (base, psh) = match rest.rfind(':') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => return Err(CatError::UnknownCategory(format!("slice needs slice:<cat>:<presheaf>, got {spec}"))),
        };
        let base = make_category(base, trunc)?;
        let f = setpsh::builtin_or_file(&base, psh)?;
        return Ok(Arc::new(Slice::new(f)));
    }
    if let Some(rest) = spec.strip_prefix("finite:") {
        let text = std::fs::read_to_string(rest).map_err(|e| CatError::InvalidPresentation(format!("{rest}: {e}")))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CatError::InvalidPresentation(e.to_string()))?;
        return Ok(Arc::new(Finite::from_json(&v)?));
    }
    match spec {
        "delta" => return Ok(Arc::new(Delta::new(trunc))),
        "delta_mono" => return Ok(Arc::new(Delta::mono(trunc))),
        "globe" => return Ok(Arc::new(Globe::new(trunc, false))),
        "globe_ref" => return Ok(Arc::new(Globe::new(trunc, true))),
        "cube" => return Ok(Arc::new(Cube::new(trunc, None))),
        "cube_c" => return Ok(Arc::new(Cube::new(trunc, Some(ConnKind::Max)))),
        "cube_c_min" => return Ok(Arc::new(Cube::new(trunc, Some(ConnKind::Min)))),
        "terminal" => return Ok(Arc::new(Terminal::new())),
        "parallel" => return Ok(Arc::new(Finite::parallel_pair())),
        _ => {}
    }
    if let Some(n) = spec.strip_prefix("delta^") {
        let n = parse_usize(n)?;
        let cats: Vec<CatRef> = (0..n).map(|_| Arc::new(Delta::new(trunc)) as CatRef).collect();
        return Ok(Arc::new(Product::new(cats, trunc)));
    }
    if let Some(n) = spec.strip_prefix("theta") {
        return Ok(crate::wreath::theta(parse_usize(n)?, trunc));
    }
    if let Some(n) = spec.strip_prefix("xi") {
        return Ok(crate::wreath::xi(parse_usize(n)?, trunc));
    }
    if let Some(n) = spec.strip_prefix("poset") {
        let n = if n.is_empty() { 2 } else { parse_usize(n)? };
        return Ok(Arc::new(Finite::chain_poset(n)));
    }
    Err(CatError::UnknownCategory(spec.to_string()))
}

/// Splits at `sep` outside parentheses.
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

/// Enumerates monotone maps [m] → [n] in lexicographic order.
pub(crate) fn monotone_maps(m: usize, n: usize, injective: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m + 1);
    fn rec(i: usize, m: usize, n: usize, inj: bool, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i > m {
            out.push(cur.clone());
            return;
        }
        let lo = match cur.last() {
            None => 0,
            Some(&p) => p + inj as u32,
        };
        // leave room for the remaining entries when injective
        let hi = if inj { (n + i) as i64 - m as i64 } else { n as i64 };
        let mut v = lo as i64;
        while v <= hi {
            cur.push(v as u32);
            rec(i + 1, m, n, inj, cur, out);
            cur.pop();
            v += 1;
        }
    }
    rec(0, m, n, injective, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_map_counts() {
        assert_eq!(monotone_maps(1, 2, false).len(), 6);
        assert_eq!(monotone_maps(2, 1, true).len(), 0);
        assert_eq!(monotone_maps(1, 3, true).len(), 6);
        assert_eq!(monotone_maps(0, 0, false), vec![vec![0]]);
    }

    #[test]
    fn raw_tree_grammar() {
        let t = parse_raw_tree("2;(0,3;(1,0,3))").unwrap();
        assert_eq!(t.head, 2);
        let ch = t.children.unwrap();
        assert_eq!(ch[1].children.as_ref().unwrap().len(), 3);
        assert!(parse_raw_tree("2;(1").is_err());
        assert!(parse_raw_tree("x").is_err());
    }
}
