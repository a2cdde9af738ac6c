use super::product::Product;
use super::slice::Slice;
use super::{CatRef, Mor, Obj};

/// A functor between truncated categories.
pub trait Functor: Send + Sync {
    fn source(&self) -> &CatRef;
    fn target(&self) -> &CatRef;
    fn obj(&self, a: &Obj) -> Obj;
    fn mor(&self, f: &Mor) -> Mor;
}

/// Checks F(id) = id and F(g∘u) = F(g)∘F(u) for every generator g out of b
/// and every u into b, over source objects of dimension ≤ d.
pub fn verify_functor(f: &dyn Functor, d: usize) -> Result<(), String> {
    let src = f.source();
    let tgt = f.target();
    let objs = if src.is_finite() { src.all_objects() } else { src.objects_upto(d) };
    for a in &objs {
        if f.mor(&src.identity(a)) != tgt.identity(&f.obj(a)) {
            return Err(format!("identity of {} not preserved", src.obj_name(a)));
        }
    }
    for b in &objs {
        for g in src.generators_from(b) {
            if src.dim(&g.tgt) > d && !src.is_finite() {
                continue;
            }
            let fg = f.mor(&g);
            for a in &objs {
                for u in src.hom(a, b).iter() {
                    let lhs = f.mor(&src.compose_raw(&g, u));
                    let rhs = tgt.compose_raw(&fg, &f.mor(u));
                    if lhs != rhs {
                        return Err(format!("composition {} ∘ {} not preserved", src.mor_name(&g), src.mor_name(u)));
                    }
                }
            }
        }
    }
    Ok(())
}

pub struct IdentityFunctor {
    cat: CatRef,
}

impl IdentityFunctor {
    pub fn new(cat: CatRef) -> IdentityFunctor {
        IdentityFunctor { cat }
    }
}

impl Functor for IdentityFunctor {
    fn source(&self) -> &CatRef {
        &self.cat
    }
    fn target(&self) -> &CatRef {
        &self.cat
    }
    fn obj(&self, a: &Obj) -> Obj {
        a.clone()
    }
    fn mor(&self, f: &Mor) -> Mor {
        f.clone()
    }
}

/// Inclusion of a subcategory sharing the payload representation
/// (e.g. Δ′ ⊂ Δ, □ ⊂ □ᶜ).
pub struct Inclusion {
    src: CatRef,
    tgt: CatRef,
}

impl Inclusion {
    pub fn new(src: CatRef, tgt: CatRef) -> Inclusion {
        Inclusion { src, tgt }
    }
}

impl Functor for Inclusion {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        a.clone()
    }
    fn mor(&self, f: &Mor) -> Mor {
        f.clone()
    }
}

/// The diagonal A → A^n.
pub struct Diagonal {
    src: CatRef,
    tgt: CatRef,
    n: usize,
}

impl Diagonal {
    /// `tgt` must be the n-fold product of `src`.
    pub fn new(src: CatRef, tgt: CatRef, n: usize) -> Diagonal {
        Diagonal { src, tgt, n }
    }
}

impl Functor for Diagonal {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        Obj::Tuple(vec![a.clone(); self.n])
    }
    fn mor(&self, f: &Mor) -> Mor {
        Product::tuple(vec![f.clone(); self.n])
    }
}

/// The projection A/F → A.
pub struct Projection {
    src: CatRef,
    tgt: CatRef,
}

impl Projection {
    pub fn new(slice: CatRef, base: CatRef) -> Projection {
        Projection { src: slice, tgt: base }
    }
}

impl Functor for Projection {
    fn source(&self) -> &CatRef {
        &self.src
    }
    fn target(&self) -> &CatRef {
        &self.tgt
    }
    fn obj(&self, a: &Obj) -> Obj {
        Slice::split(a).0.clone()
    }
    fn mor(&self, f: &Mor) -> Mor {
        Slice::under(f).clone()
    }
}

/// v ∘ u.
pub struct CompositeFunctor {
    u: Box<dyn Functor>,
    v: Box<dyn Functor>,
}

impl CompositeFunctor {
    pub fn new(u: Box<dyn Functor>, v: Box<dyn Functor>) -> CompositeFunctor {
        CompositeFunctor { u, v }
    }
}

impl Functor for CompositeFunctor {
    fn source(&self) -> &CatRef {
        self.u.source()
    }
    fn target(&self) -> &CatRef {
        self.v.target()
    }
    fn obj(&self, a: &Obj) -> Obj {
        self.v.obj(&self.u.obj(a))
    }
    fn mor(&self, f: &Mor) -> Mor {
        self.v.mor(&self.u.mor(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapecat::Delta;
    use std::sync::Arc;

    #[test]
    fn diagonal_and_inclusion() {
        let d: CatRef = Arc::new(Delta::new(3));
        let p: CatRef = Arc::new(Product::new(vec![d.clone(), d.clone()], 6));
        verify_functor(&Diagonal::new(d.clone(), p, 2), 3).unwrap();
        let m: CatRef = Arc::new(Delta::mono(3));
        verify_functor(&Inclusion::new(m, d), 3).unwrap();
    }
}
