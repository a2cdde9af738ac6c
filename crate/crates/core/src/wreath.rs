//! Wreath products Δ≀A and Δ≀′A, the categories Θ_n and Ξ_n, and the
//! functors μ, μ′, m_n, m′_n out of products of Δ.

use std::sync::Arc;

use crate::shapecat::{
    monotone_maps, parse_raw_tree, Arrow, CatError, CatRef, Category, Delta, Functor, HomCache, Mor, Obj, Product, RawTree, Terminal,
};

fn is_constant(phi: &[u32]) -> bool {
    phi.iter().all(|&x| x == phi[0])
}

fn is_identity_map(phi: &[u32]) -> bool {
    phi.iter().enumerate().all(|(i, &x)| x as usize == i)
}

fn map_name(phi: &[u32]) -> String {
    let parts: Vec<String> = phi.iter().map(|x| x.to_string()).collect();
    format!("<{}>", parts.join(""))
}

fn raw_to_string(t: &RawTree) -> String {
    match &t.children {
        None => t.head.to_string(),
        Some(ch) => {
            let parts: Vec<String> = ch.iter().map(raw_to_string).collect();
            format!("{};({})", t.head, parts.join(","))
        }
    }
}

/// Θ_n = Δ≀Θ_{n−1}, Θ_0 the terminal category.
pub fn theta(n: usize, trunc: usize) -> CatRef {
    let mut c: CatRef = Arc::new(Terminal::new());
    for _ in 0..n {
        c = Arc::new(Wreath::new(c, trunc));
    }
    c
}

/// Ξ_n = Δ≀′Ξ_{n−1}, Ξ_0 the terminal category.
pub fn xi(n: usize, trunc: usize) -> CatRef {
    let mut c: CatRef = Arc::new(Terminal::new());
    for _ in 0..n {
        c = Arc::new(XiWreath::new(c, trunc));
    }
    c
}

// ---------------------------------------------------------------- Δ≀A

/// The wreath product Δ≀A.  Objects are `Tree(children)`; a morphism is a
/// base map φ with one fiber f_{ji}: a_i → b_j for each i and each j in the
/// window φ(i−1) < j ≤ φ(i), stored by i then j.  Dimensions follow
/// dim [Δ_n; (a_i)] = n + Σ dim a_i.
pub struct Wreath {
    inner: CatRef,
    trunc: usize,
    level: usize,
    cache: HomCache,
}

impl Wreath {
    pub fn new(inner: CatRef, trunc: usize) -> Wreath {
        let level = inner.name().strip_prefix("theta").and_then(|s| s.parse::<usize>().ok()).unwrap_or(0) + 1;
        Wreath { inner, trunc, level, cache: HomCache::default() }
    }

    pub fn inner(&self) -> &CatRef {
        &self.inner
    }

    pub fn children(a: &Obj) -> &[Obj] {
        match a {
            Obj::Tree(v) => v,
            _ => panic!("expected a wreath object, got {a}"),
        }
    }

    pub fn parts(f: &Mor) -> (&[u32], &[Mor]) {
        match &f.arrow {
            Arrow::Wreath(p, v) => (p, v),
            _ => panic!("expected a wreath morphism"),
        }
    }

    /// Start of the fibers for column i (1-based) in the flattened list.
    fn starts(phi: &[u32]) -> Vec<usize> {
        let mut out = vec![0; phi.len()];
        for i in 1..phi.len() {
            out[i] = if i == 1 { 0 } else { out[i - 1] + (phi[i - 1] - phi[i - 2]) as usize };
        }
        out
    }

    pub fn mk(src: Obj, tgt: Obj, phi: Vec<u32>, fibers: Vec<Mor>) -> Mor {
        Mor::new(src, tgt, Arrow::Wreath(phi, fibers))
    }
}

impl Category for Wreath {
    fn name(&self) -> String {
        if self.inner.name() == "terminal" || self.inner.name().starts_with("theta") {
            format!("theta{}", self.level)
        } else {
            format!("wreath:{}", self.inner.name())
        }
    }
    fn max_dim(&self) -> usize {
        self.trunc
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        assert!(d <= self.trunc, "dimension {d} beyond truncation {}", self.trunc);
        if d == 0 {
            return vec![Obj::point()];
        }
        let mut out = Vec::new();
        for w in 1..=d {
            let mut partial: Vec<(Vec<Obj>, usize)> = vec![(vec![], d - w)];
            for _ in 0..w {
                let mut next = Vec::new();
                for (v, rest) in &partial {
                    for k in 0..=*rest {
                        for o in self.inner.objects_of_dim(k) {
                            let mut v2 = v.clone();
                            v2.push(o);
                            next.push((v2, rest - k));
                        }
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().filter(|(_, r)| *r == 0).map(|(v, _)| Obj::Tree(v)));
        }
        out
    }
    fn dim(&self, a: &Obj) -> usize {
        let ch = Wreath::children(a);
        ch.len() + ch.iter().map(|c| self.inner.dim(c)).sum::<usize>()
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (ac, bc) = (Wreath::children(a), Wreath::children(b));
        let mut out = Vec::new();
        for phi in monotone_maps(ac.len(), bc.len(), false) {
            let mut fibers: Vec<Vec<Mor>> = vec![vec![]];
            for i in 1..phi.len() {
                for j in phi[i - 1] + 1..=phi[i] {
                    let h = self.inner.hom(&ac[i - 1], &bc[j as usize - 1]);
                    let mut next = Vec::with_capacity(fibers.len() * h.len());
                    for p in &fibers {
                        for f in h.iter() {
                            let mut q = p.clone();
                            q.push(f.clone());
                            next.push(q);
                        }
                    }
                    fibers = next;
                }
            }
            for fs in fibers {
                out.push(Wreath::mk(a.clone(), b.clone(), phi.clone(), fs));
            }
        }
        out
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        let ch = Wreath::children(a);
        let phi = (0..=ch.len() as u32).collect();
        Wreath::mk(a.clone(), a.clone(), phi, ch.iter().map(|c| self.inner.identity(c)).collect())
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let (phi, ff) = Wreath::parts(f);
        let (psi, gg) = Wreath::parts(g);
        let chi: Vec<u32> = phi.iter().map(|&x| psi[x as usize]).collect();
        let sf = Wreath::starts(phi);
        let sg = Wreath::starts(psi);
        let mut fibers = Vec::new();
        for i in 1..phi.len() {
            for j in phi[i - 1] + 1..=phi[i] {
                let j = j as usize;
                let fji = &ff[sf[i] + j - phi[i - 1] as usize - 1];
                for k in psi[j - 1] + 1..=psi[j] {
                    let gkj = &gg[sg[j] + (k - psi[j - 1]) as usize - 1];
                    fibers.push(self.inner.compose_raw(gkj, fji));
                }
            }
        }
        Wreath::mk(f.src.clone(), g.tgt.clone(), chi, fibers)
    }
    /// Every non-identity morphism is taken as a generator.
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let id = self.identity(a);
        self.objects_upto(self.trunc).iter().flat_map(|b| self.hom(a, b).to_vec()).filter(|f| *f != id).collect()
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let id = self.identity(b);
        self.objects_upto(self.trunc).iter().flat_map(|a| self.hom(a, b).to_vec()).filter(|f| *f != id).collect()
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(if *f == self.identity(&f.src) { vec![] } else { vec![f.clone()] })
    }
    fn mor_name(&self, f: &Mor) -> String {
        let (phi, ff) = Wreath::parts(f);
        let parts: Vec<String> = ff.iter().map(|g| self.inner.mor_name(g)).collect();
        format!("[{};({})]", map_name(phi), parts.join(","))
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let t = parse_raw_tree(s)?;
        let o = match &t.children {
            None => Obj::Tree(vec![self.inner.parse_object("0")?; t.head]),
            Some(ch) => {
                if ch.len() != t.head {
                    return Err(CatError::BadObject(format!("{s}: width {} but {} components", t.head, ch.len())));
                }
                Obj::Tree(ch.iter().map(|c| self.inner.parse_object(&raw_to_string(c))).collect::<Result<_, _>>()?)
            }
        };
        if self.dim(&o) > self.trunc {
            return Err(CatError::BadObject(format!("{s} beyond truncation {}", self.trunc)));
        }
        Ok(o)
    }
}

/// Dimension table of a Θ object seen as a planar tree: leaf heights, and
/// the heights where consecutive leaves meet.  The point gives the empty table.
pub fn dimension_table(a: &Obj) -> (Vec<usize>, Vec<usize>) {
    fn walk(t: &Obj, h: usize, top: &mut Vec<usize>, bottom: &mut Vec<usize>) {
        let ch = Wreath::children(t);
        if ch.is_empty() {
            top.push(h);
            return;
        }
        for (k, c) in ch.iter().enumerate() {
            if k > 0 {
                bottom.push(h);
            }
            walk(c, h + 1, top, bottom);
        }
    }
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    if !a.is_point() {
        walk(a, 0, &mut top, &mut bottom);
    }
    (top, bottom)
}

// ---------------------------------------------------------------- Δ≀′A

/// The restricted wreath product Δ≀′A.  Objects: the point P = Δ_0 and
/// `Stack(i, a)` = Δ_i≀a for i ≥ 1.  Morphisms: φ≀ψ with φ non-constant,
/// φ≀− with φ constant.  dim(Δ_i≀a) = i + dim a.
pub struct XiWreath {
    inner: CatRef,
    trunc: usize,
    level: usize,
    cache: HomCache,
}

impl XiWreath {
    pub fn new(inner: CatRef, trunc: usize) -> XiWreath {
        let level = inner.name().strip_prefix("xi").and_then(|s| s.parse::<usize>().ok()).unwrap_or(0) + 1;
        XiWreath { inner, trunc, level, cache: HomCache::default() }
    }

    pub fn inner(&self) -> &CatRef {
        &self.inner
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// (i, a) for Δ_i≀a, (0, P) for the point.
    pub fn split(a: &Obj) -> (usize, Obj) {
        match a {
            Obj::Stack(i, b) => (*i, (**b).clone()),
            Obj::Tree(v) if v.is_empty() => (0, Obj::point()),
            _ => panic!("expected a Ξ object, got {a}"),
        }
    }

    pub fn stack(i: usize, a: Obj) -> Obj {
        if i == 0 { Obj::point() } else { Obj::Stack(i, Box::new(a)) }
    }

    pub fn parts(f: &Mor) -> (&[u32], Option<&Mor>) {
        match &f.arrow {
            Arrow::Xi(p, s) => (p, s.as_deref()),
            _ => panic!("expected a Ξ morphism"),
        }
    }

    /// φ≀ψ, or φ≀− when φ is constant (ψ is then dropped).
    pub fn mk(src: Obj, tgt: Obj, phi: Vec<u32>, psi: Option<Mor>) -> Mor {
        let psi = if is_constant(&phi) { None } else { psi };
        Mor::new(src, tgt, Arrow::Xi(phi, psi.map(Box::new)))
    }

    /// The vertex x: P → T.
    pub fn vertex(t: &Obj, x: u32) -> Mor {
        XiWreath::mk(Obj::point(), t.clone(), vec![x], None)
    }

    fn base_dim(a: &Obj) -> usize {
        XiWreath::split(a).0
    }
}

impl Category for XiWreath {
    fn name(&self) -> String {
        if self.inner.name() == "terminal" || self.inner.name().starts_with("xi") {
            format!("xi{}", self.level)
        } else {
            format!("wreath_restricted:{}", self.inner.name())
        }
    }
    fn max_dim(&self) -> usize {
        self.trunc
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        assert!(d <= self.trunc, "dimension {d} beyond truncation {}", self.trunc);
        if d == 0 {
            return vec![Obj::point()];
        }
        let mut out = Vec::new();
        for i in 1..=d {
            if d - i > self.inner.max_dim() {
                continue;
            }
            for a in self.inner.objects_of_dim(d - i) {
                out.push(XiWreath::stack(i, a));
            }
        }
        out
    }
    fn dim(&self, a: &Obj) -> usize {
        let (i, b) = XiWreath::split(a);
        if i == 0 { 0 } else { i + self.inner.dim(&b) }
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (i, ai) = XiWreath::split(a);
        let (j, bj) = XiWreath::split(b);
        let mut out = Vec::new();
        let inner = if i > 0 && j > 0 { Some(self.inner.hom(&ai, &bj)) } else { None };
        for phi in monotone_maps(i, j, false) {
            if is_constant(&phi) {
                out.push(XiWreath::mk(a.clone(), b.clone(), phi, None));
            } else {
                for psi in inner.as_ref().expect("non-constant maps need positive widths").iter() {
                    out.push(XiWreath::mk(a.clone(), b.clone(), phi.clone(), Some(psi.clone())));
                }
            }
        }
        out
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        let (i, ai) = XiWreath::split(a);
        let phi: Vec<u32> = (0..=i as u32).collect();
        let psi = if i == 0 { None } else { Some(self.inner.identity(&ai)) };
        XiWreath::mk(a.clone(), a.clone(), phi, psi)
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let (phi, pf) = XiWreath::parts(f);
        let (psi, pg) = XiWreath::parts(g);
        let chi: Vec<u32> = phi.iter().map(|&x| psi[x as usize]).collect();
        let inner = match (pf, pg) {
            (Some(a), Some(b)) if !is_constant(&chi) => Some(self.inner.compose_raw(b, a)),
            _ => None,
        };
        XiWreath::mk(f.src.clone(), g.tgt.clone(), chi, inner)
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let id = self.identity(a);
        self.objects_upto(self.trunc).iter().flat_map(|b| self.hom(a, b).to_vec()).filter(|f| *f != id).collect()
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let id = self.identity(b);
        self.objects_upto(self.trunc).iter().flat_map(|a| self.hom(a, b).to_vec()).filter(|f| *f != id).collect()
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        Ok(if *f == self.identity(&f.src) { vec![] } else { vec![f.clone()] })
    }
    fn mor_name(&self, f: &Mor) -> String {
        let (phi, psi) = XiWreath::parts(f);
        match psi {
            Some(p) => format!("{}≀{}", map_name(phi), self.inner.mor_name(p)),
            None => format!("{}≀-", map_name(phi)),
        }
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let t = parse_raw_tree(s)?;
        let o = match &t.children {
            None => XiWreath::stack(t.head, self.inner.parse_object("0")?),
            Some(ch) => {
                if t.head == 0 || ch.is_empty() || !(ch.len() == 1 || ch.len() == t.head) || ch.iter().any(|c| *c != ch[0]) {
                    return Err(CatError::BadObject(format!("{s}: Ξ objects are written i;(a)")));
                }
                XiWreath::stack(t.head, self.inner.parse_object(&raw_to_string(&ch[0]))?)
            }
        };
        if self.dim(&o) > self.trunc {
            return Err(CatError::BadObject(format!("{s} beyond truncation {}", self.trunc)));
        }
        Ok(o)
    }
    fn is_catenary(&self) -> bool {
        true
    }
    fn codim1_closed(&self, t: &Obj) -> Option<Vec<Mor>> {
        let (i, a) = XiWreath::split(t);
        if i == 0 {
            return Some(Vec::new());
        }
        let id_map = |n: usize| -> Vec<u32> { (0..=n as u32).collect() };
        let mut out = Vec::new();
        if a.is_point() {
            if i == 1 {
                // δ_0 hits vertex 1, δ_1 hits vertex 0
                out.push(XiWreath::vertex(t, 1));
                out.push(XiWreath::vertex(t, 0));
            } else {
                for k in 0..=i {
                    let phi = Delta::face(i, k).map().to_vec();
                    out.push(XiWreath::mk(XiWreath::stack(i - 1, a.clone()), t.clone(), phi, Some(self.inner.identity(&a))));
                }
            }
            return Some(out);
        }
        if i >= 2 {
            for k in 0..=i {
                let phi = Delta::face(i, k).map().to_vec();
                out.push(XiWreath::mk(XiWreath::stack(i - 1, a.clone()), t.clone(), phi, Some(self.inner.identity(&a))));
            }
        }
        for psi in self.inner.codim1_closed(&a)? {
            out.push(XiWreath::mk(XiWreath::stack(i, psi.src.clone()), t.clone(), id_map(i), Some(psi)));
        }
        Some(out)
    }
    /// Cofaces of the Δ part get (−1)^k; id≀ψ gets (−1)^i sg(ψ).
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        let (i, _) = XiWreath::split(&f.tgt);
        let (phi, psi) = XiWreath::parts(f);
        let pm = |e: usize| if e % 2 == 0 { 1 } else { -1 };
        if i == 0 {
            return None;
        }
        if XiWreath::base_dim(&f.src) == 0 {
            // i = 1, vertex x ↔ δ_{1−x}
            return (i == 1).then(|| pm(1 - phi[0] as usize));
        }
        if phi.len() == i + 1 && is_identity_map(phi) {
            let s = self.inner.standard_sign(psi?)?;
            return Some(pm(i) * s);
        }
        let missing = (0..=i as u32).find(|k| !phi.contains(k))?;
        Some(pm(missing as usize))
    }
}

// ---------------------------------------------------------------- functors

/// μ_A: Δ × A → Δ≀A, (Δ_n, a) ↦ [Δ_n; (a, …, a)].
pub struct Mu {
    src: CatRef,
    tgt: CatRef,
}

impl Mu {
    /// `src` must be Δ × A and `tgt` Δ≀A.
    pub fn new(src: CatRef, tgt: CatRef) -> Mu {
        Mu { src, tgt }
    }

    pub fn on_obj(n: usize, a: &Obj) -> Obj {
        Obj::Tree(vec![a.clone(); n])
    }

    pub fn on_mor(phi: &Mor, f: &Mor) -> Mor {
        let p = phi.map().to_vec();
        let count: usize = (p[p.len() - 1] - p[0]) as usize;
        let n = p.len() - 1;
        let src = Mu::on_obj(n, &f.src);
        let tgt = Mu::on_obj(dim_of_delta(&phi.tgt), &f.tgt);
        Wreath::mk(src, tgt, p, vec![f.clone(); count])
    }
}

fn dim_of_delta(a: &Obj) -> usize {
    match a {
        Obj::Dim(n) => *n,
        _ => panic!("expected a simplex"),
    }
}

fn pair(a: &Obj) -> (&Obj, &Obj) {
    match a {
        Obj::Tuple(v) if v.len() == 2 => (&v[0], &v[1]),
        _ => panic!("expected a pair"),
    }
}

fn mpair(f: &Mor) -> (&Mor, &Mor) {
    match &f.arrow {
        Arrow::Tuple(v) if v.len() == 2 => (&v[0], &v[1]),
        _ => panic!("expected a pair"),
    }
}

impl Functor for Mu {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        let (d, b) = pair(a);
        Mu::on_obj(dim_of_delta(d), b)
    }
    fn mor(&self, f: &Mor) -> Mor {
        let (phi, g) = mpair(f);
        Mu::on_mor(phi, g)
    }
}

/// μ′_A: Δ × A → Δ≀′A.
pub struct MuPrime {
    src: CatRef,
    tgt: CatRef,
}

impl MuPrime {
    pub fn new(src: CatRef, tgt: CatRef) -> MuPrime {
        MuPrime { src, tgt }
    }

    pub fn on_obj(n: usize, a: &Obj) -> Obj {
        XiWreath::stack(n, a.clone())
    }

    pub fn on_mor(phi: &Mor, f: &Mor) -> Mor {
        let src = MuPrime::on_obj(dim_of_delta(&phi.src), &f.src);
        let tgt = MuPrime::on_obj(dim_of_delta(&phi.tgt), &f.tgt);
        XiWreath::mk(src, tgt, phi.map().to_vec(), Some(f.clone()))
    }
}

impl Functor for MuPrime {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        let (d, b) = pair(a);
        MuPrime::on_obj(dim_of_delta(d), b)
    }
    fn mor(&self, f: &Mor) -> Mor {
        let (phi, g) = mpair(f);
        MuPrime::on_mor(phi, g)
    }
}

/// m_n: Δ^n → Θ_n (restricted = false) or m′_n: Δ^n → Ξ_n (restricted = true).
pub struct Mn {
    n: usize,
    restricted: bool,
    src: CatRef,
    tgt: CatRef,
}

impl Mn {
    /// `src` is Δ^n as a product category, `tgt` is Θ_n or Ξ_n.
    pub fn new(n: usize, restricted: bool, src: CatRef, tgt: CatRef) -> Mn {
        Mn { n, restricted, src, tgt }
    }

    /// Builds Δ^n, the target and the functor for truncation D.
    pub fn build(n: usize, restricted: bool, trunc: usize) -> Mn {
        let deltas: Vec<CatRef> = (0..n).map(|_| Arc::new(Delta::new(trunc)) as CatRef).collect();
        let src: CatRef = Arc::new(Product::new(deltas, trunc * n.max(1)));
        let tgt = if restricted { xi(n, trunc * n.max(1)) } else { theta(n, trunc * n.max(1)) };
        Mn::new(n, restricted, src, tgt)
    }

    pub fn obj_of(&self, dims: &[usize]) -> Obj {
        let mut o = Obj::point();
        for &k in dims.iter().rev() {
            o = if self.restricted { MuPrime::on_obj(k, &o) } else { Mu::on_obj(k, &o) };
        }
        o
    }

    pub fn mor_of(&self, maps: &[Mor]) -> Mor {
        let mut f = Terminal::unit();
        for phi in maps.iter().rev() {
            f = if self.restricted { MuPrime::on_mor(phi, &f) } else { Mu::on_mor(phi, &f) };
        }
        f
    }
}

impl Functor for Mn {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        let dims: Vec<usize> = match a {
            Obj::Tuple(v) => v.iter().map(dim_of_delta).collect(),
            _ => panic!("expected a tuple"),
        };
        assert_eq!(dims.len(), self.n);
        self.obj_of(&dims)
    }
    fn mor(&self, f: &Mor) -> Mor {
        match &f.arrow {
            Arrow::Tuple(v) => self.mor_of(v),
            _ => panic!("expected a tuple"),
        }
    }
}

/// m_n ∘ diag (or m′_n ∘ diag): Δ → Θ_n, Δ_k ↦ Δ_k≀⋯≀Δ_k.
pub struct DiagonalMn {
    inner: Mn,
    delta: CatRef,
}

impl DiagonalMn {
    pub fn new(n: usize, restricted: bool, tgt: CatRef, trunc: usize) -> DiagonalMn {
        let deltas: Vec<CatRef> = (0..n).map(|_| Arc::new(Delta::new(trunc)) as CatRef).collect();
        let src: CatRef = Arc::new(Product::new(deltas, trunc * n.max(1)));
        DiagonalMn { inner: Mn::new(n, restricted, src, tgt), delta: Arc::new(Delta::new(trunc)) }
    }
}

impl Functor for DiagonalMn {
    fn source(&self) -> &CatRef {
        &self.delta
    }
    fn target(&self) -> &CatRef {
        &self.inner.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        self.inner.obj_of(&vec![dim_of_delta(a); self.inner.n])
    }
    fn mor(&self, f: &Mor) -> Mor {
        self.inner.mor_of(&vec![f.clone(); self.inner.n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::{check_axioms, codim1_brute, codim1_monos, is_mono, verify_functor};

    #[test]
    fn theta1_is_delta() {
        let t = theta(1, 3);
        let d = Delta::new(3);
        for m in 0..=3 {
            for n in 0..=3 {
                let a = t.parse_object(&m.to_string()).unwrap();
                let b = t.parse_object(&n.to_string()).unwrap();
                let h = t.hom(&a, &b);
                assert_eq!(h.len(), d.hom(&Obj::Dim(m), &Obj::Dim(n)).len());
                let bases: Vec<Vec<u32>> = h.iter().map(|f| Wreath::parts(f).0.to_vec()).collect();
                let dbases: Vec<Vec<u32>> = d.hom(&Obj::Dim(m), &Obj::Dim(n)).iter().map(|f| f.map().to_vec()).collect();
                assert_eq!(bases, dbases);
            }
        }
        check_axioms(t.as_ref(), 2).unwrap();
        assert_eq!(theta(0, 3).name(), "terminal");
    }

    #[test]
    fn theta2_objects_and_axioms() {
        let t = theta(2, 4);
        let counts: Vec<usize> = (0..=4).map(|d| t.objects_of_dim(d).len()).collect();
        assert_eq!(counts.iter().sum::<usize>(), 16);
        check_axioms(t.as_ref(), 2).unwrap();
        let o = t.parse_object("2;(1,1)").unwrap();
        assert_eq!(t.dim(&o), 4);
        assert_eq!(t.obj_name(&o), "2;(1,1)");
    }

    #[test]
    fn degeneracy_after_face_composes_fibers() {
        // [s_0,(f_12)] after [d_1,(f_11,f_21)] has fiber f_12 ∘ f_21
        let t = theta(2, 6);
        let a = t.parse_object("1;(2)").unwrap();
        let b = t.parse_object("2;(1,1)").unwrap();
        let c = t.parse_object("1;(0)").unwrap();
        let f11 = Mu::on_mor(&Delta::degeneracy(1, 0), &Terminal::unit());
        let f21 = Mu::on_mor(&Delta::degeneracy(1, 1), &Terminal::unit());
        let f = Wreath::mk(a.clone(), b.clone(), vec![0, 2], vec![f11, f21.clone()]);
        let f12 = Mu::on_mor(&Delta::map(1, 0, vec![0, 0]), &Terminal::unit());
        let g = Wreath::mk(b.clone(), c.clone(), vec![0, 0, 1], vec![f12.clone()]);
        assert!(t.hom(&a, &b).contains(&f));
        assert!(t.hom(&b, &c).contains(&g));
        let gf = t.compose_raw(&g, &f);
        let (base, fib) = Wreath::parts(&gf);
        assert_eq!(base, &[0, 1]);
        let inner = Wreath::new(Arc::new(Terminal::new()), 6);
        assert_eq!(fib, &[inner.compose_raw(&f12, &f21)]);
    }

    /// Independent oracle: a Θ_2 morphism acts on 1-cells (column i, cell x)
    /// by sending it to the path of cells (j, f_ji(x)); composition is path
    /// substitution.
    #[test]
    fn composition_matches_cell_substitution() {
        let t = theta(2, 3);
        let objs = t.objects_upto(3);
        type Action = (Vec<u32>, Vec<Vec<(usize, u32)>>);
        let act = |f: &Mor| -> Action {
            let (phi, fib) = Wreath::parts(f);
            let ac = Wreath::children(&f.src);
            let mut cells = Vec::new();
            let mut pos = 0;
            let mut per_col = Vec::new();
            for i in 1..phi.len() {
                let w = (phi[i] - phi[i - 1]) as usize;
                per_col.push((pos, w));
                pos += w;
            }
            for (i, a) in ac.iter().enumerate() {
                let width = Wreath::children(a).len();
                for x in 0..=width as u32 {
                    let (start, w) = per_col[i];
                    let path = (0..w).map(|t| (phi[i] as usize + t + 1, Wreath::parts(&fib[start + t]).0[x as usize])).collect();
                    cells.push(path);
                }
            }
            (phi.to_vec(), cells)
        };
        let cell_index = |a: &Obj, col: usize, x: u32| -> usize {
            let ch = Wreath::children(a);
            ch[..col - 1].iter().map(|c| Wreath::children(c).len() + 1).sum::<usize>() + x as usize
        };
        for a in &objs {
            for b in &objs {
                for f in t.hom(a, b).iter() {
                    for c in &objs {
                        for g in t.hom(b, c).iter() {
                            let (pf, cf) = act(f);
                            let (pg, cg) = act(g);
                            let base: Vec<u32> = pf.iter().map(|&x| pg[x as usize]).collect();
                            let subst: Vec<Vec<(usize, u32)>> =
                                cf.iter().map(|path| path.iter().flat_map(|&(j, y)| cg[cell_index(b, j, y)].clone()).collect()).collect();
                            let (pc, cc) = act(&t.compose_raw(g, f));
                            assert_eq!(pc, base);
                            assert_eq!(cc, subst);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tables() {
        let t = theta(3, 10);
        let o = t.parse_object("2;(0,3;(1,0,3))").unwrap();
        let (top, bottom) = dimension_table(&o);
        assert_eq!(top, vec![1, 3, 2, 3, 3, 3]);
        assert_eq!(bottom, vec![0, 1, 1, 2, 2]);
        let t1 = theta(1, 5);
        let (top, bottom) = dimension_table(&t1.parse_object("4").unwrap());
        assert_eq!(top, vec![1; 4]);
        assert_eq!(bottom, vec![0; 3]);
        assert_eq!(dimension_table(&Obj::point()), (vec![], vec![]));
    }

    #[test]
    fn mu_functors() {
        for restricted in [false, true] {
            let m = Mn::build(2, restricted, 2);
            verify_functor(&m, 2).unwrap();
            let m1 = Mn::build(1, restricted, 3);
            verify_functor(&m1, 3).unwrap();
        }
        let m = Mn::build(2, false, 3);
        assert_eq!(m.tgt.obj_name(&m.obj_of(&[3, 2])), "3;(2,2,2)");
        let x = Mn::build(2, true, 3);
        assert_eq!(x.obj_of(&[2, 0]), Mn::build(1, true, 3).obj_of(&[2]));
    }

    #[test]
    fn xi_basics() {
        let x1 = xi(1, 3);
        let x2 = xi(2, 4);
        let p = Obj::point();
        assert_eq!(x2.hom(&p, &x2.parse_object("1").unwrap()).len(), 2);
        let t = x2.parse_object("3;(1)").unwrap();
        assert_eq!(x2.dim(&t), 4);
        check_axioms(x1.as_ref(), 3).unwrap();
        check_axioms(x2.as_ref(), 2).unwrap();
        let c = codim1_monos(x2.as_ref(), &t).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(codim1_brute(x2.as_ref(), &t).len(), 6);
        let signs: Vec<i64> = c.iter().map(|f| x2.standard_sign(f).unwrap()).collect();
        assert_eq!(signs, vec![1, -1, 1, -1, -1, 1]);
        for f in &c {
            assert!(is_mono(x2.as_ref(), f, None));
        }
    }
}
