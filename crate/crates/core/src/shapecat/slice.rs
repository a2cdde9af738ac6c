use super::{Arrow, CatError, CatRef, Category, HomCache, Mor, Obj, SetRef};

/// The category of elements A/F: objects (a, x ∈ Fa), morphisms
/// φ: (a, x) → (b, y) with x = F(φ)(y).
pub struct Slice {
    base: CatRef,
    presheaf: SetRef,
    cache: HomCache,
}

impl Slice {
    pub fn new(presheaf: SetRef) -> Slice {
        Slice { base: presheaf.base().clone(), presheaf, cache: HomCache::default() }
    }

    pub fn base(&self) -> &CatRef {
        &self.base
    }

    pub fn presheaf(&self) -> &SetRef {
        &self.presheaf
    }

    pub fn split(a: &Obj) -> (&Obj, usize) {
        match a {
            Obj::Elem(o, x) => (o, *x),
            _ => panic!("expected an element object, got {a}"),
        }
    }

    pub fn under(f: &Mor) -> &Mor {
        match &f.arrow {
            Arrow::Lift(g) => g,
            _ => panic!("expected a slice morphism"),
        }
    }

    pub fn elem(a: Obj, x: usize) -> Obj {
        Obj::Elem(Box::new(a), x)
    }

    /// The unique lift of φ: a′ → a with target (a, x).
    pub fn lift(&self, phi: &Mor, x: usize) -> Mor {
        let src = Slice::elem(phi.src.clone(), self.presheaf.act(phi, x));
        Mor::new(src, Slice::elem(phi.tgt.clone(), x), Arrow::Lift(Box::new(phi.clone())))
    }
}

impl Category for Slice {
    fn name(&self) -> String {
        format!("slice:{}:{}", self.base.name(), self.presheaf.name())
    }
    fn max_dim(&self) -> usize {
        self.base.max_dim()
    }
    fn objects_of_dim(&self, d: usize) -> Vec<Obj> {
        let mut out = Vec::new();
        for a in self.base.objects_of_dim(d) {
            for x in 0..self.presheaf.count(&a) {
                out.push(Slice::elem(a.clone(), x));
            }
        }
        out
    }
    fn dim(&self, a: &Obj) -> usize {
        self.base.dim(Slice::split(a).0)
    }
    fn compute_hom(&self, a: &Obj, b: &Obj) -> Vec<Mor> {
        let (ao, x) = Slice::split(a);
        let (bo, y) = Slice::split(b);
        self.base
            .hom(ao, bo)
            .iter()
            .filter(|phi| self.presheaf.act(phi, y) == x)
            .map(|phi| Mor::new(a.clone(), b.clone(), Arrow::Lift(Box::new(phi.clone()))))
            .collect()
    }
    fn cache(&self) -> &HomCache {
        &self.cache
    }
    fn identity(&self, a: &Obj) -> Mor {
        let (ao, _) = Slice::split(a);
        Mor::new(a.clone(), a.clone(), Arrow::Lift(Box::new(self.base.identity(ao))))
    }
    fn compose_raw(&self, g: &Mor, f: &Mor) -> Mor {
        let h = self.base.compose_raw(Slice::under(g), Slice::under(f));
        Mor::new(f.src.clone(), g.tgt.clone(), Arrow::Lift(Box::new(h)))
    }
    fn generators_from(&self, a: &Obj) -> Vec<Mor> {
        let (ao, x) = Slice::split(a);
        let mut out = Vec::new();
        for g in self.base.generators_from(ao) {
            for y in 0..self.presheaf.count(&g.tgt) {
                if self.presheaf.act(&g, y) == x {
                    out.push(self.lift(&g, y));
                }
            }
        }
        out
    }
    fn generators_into(&self, b: &Obj) -> Vec<Mor> {
        let (bo, y) = Slice::split(b);
        self.base.generators_into(bo).iter().map(|g| self.lift(g, y)).collect()
    }
    fn factor(&self, f: &Mor) -> Result<Vec<Mor>, CatError> {
        let word = self.base.factor(Slice::under(f))?;
        let (_, mut y) = Slice::split(&f.tgt);
        let mut out = Vec::with_capacity(word.len());
        for g in word.iter().rev() {
            let l = self.lift(g, y);
            y = Slice::split(&l.src).1;
            out.push(l);
        }
        out.reverse();
        Ok(out)
    }
    fn mor_name(&self, f: &Mor) -> String {
        format!("{}#{}", self.base.mor_name(Slice::under(f)), Slice::split(&f.tgt).1)
    }
    fn obj_name(&self, a: &Obj) -> String {
        let (ao, x) = Slice::split(a);
        format!("{}@{x}", self.base.obj_name(ao))
    }
    fn parse_object(&self, s: &str) -> Result<Obj, CatError> {
        let (o, x) = s.rsplit_once('@').ok_or_else(|| CatError::BadObject(format!("slice objects are written obj@index, got {s:?}")))?;
        let a = self.base.parse_object(o)?;
        let x: usize = x.trim().parse().map_err(|_| CatError::BadObject(format!("bad element index in {s:?}")))?;
        if x >= self.presheaf.count(&a) {
            return Err(CatError::BadObject(format!("{s}: element index out of range")));
        }
        Ok(Slice::elem(a, x))
    }
    fn is_catenary(&self) -> bool {
        self.base.is_catenary()
    }
    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }
    fn all_objects(&self) -> Vec<Obj> {
        self.base.all_objects().into_iter().flat_map(|a| (0..self.presheaf.count(&a)).map(move |x| Slice::elem(a.clone(), x))).collect()
    }
    /// Lifts of the base's codimension-1 subobjects; the projection is a
    /// discrete fibration, so these are exactly the codimension-1 monos.
    fn codim1_closed(&self, a: &Obj) -> Option<Vec<Mor>> {
        let (ao, x) = Slice::split(a);
        let base = self.base.codim1_closed(ao)?;
        Some(base.iter().map(|g| self.lift(g, x)).collect())
    }
    fn standard_sign(&self, f: &Mor) -> Option<i64> {
        self.base.standard_sign(Slice::under(f))
    }
}
