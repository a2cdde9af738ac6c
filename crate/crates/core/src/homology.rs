//! Homology of presheaves and categories through integrators, plus the nerve
//! route, cohomology, hyperhomology and the right adjoint L*.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde_json::{json, Value};

use crate::chains::{chain_map_group, total_complex, ChainComplex, DoubleComplex};
use crate::integrators::{Integrator, IntegratorError};
use crate::intlinalg::{solve, FgAbGroup, IntMatrix};
use crate::presheaf::{constant_z, objects, same_base, AbPresheaf, PresheafError};
use crate::shapecat::{nerve, CatRef, Category, Chain, Mor, Obj, Opposite};

pub const RAW_LABEL: &str = "raw complex, not homology";

/// X ⊙ L, labeled raw unless the integrator has been verified.
#[derive(Clone, Debug)]
pub struct PresheafComplex {
    pub complex: ChainComplex,
    pub verified: bool,
}

impl PresheafComplex {
    pub fn label(&self) -> &'static str {
        if self.verified { "homology complex" } else { RAW_LABEL }
    }
}

pub fn presheaf_complex(i: &Integrator, x: &AbPresheaf) -> Result<PresheafComplex, IntegratorError> {
    same_base(i.base(), x.base())?;
    Ok(PresheafComplex { complex: i.evaluate(x)?, verified: i.verified().is_some() })
}

/// Homology groups with their validity window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    pub groups: Vec<FgAbGroup>,
    pub valid_through: Option<usize>,
    pub integrator_verified: bool,
}

impl HomologyTable {
    fn of(c: &ChainComplex, through: usize, verified: bool) -> Result<HomologyTable, IntegratorError> {
        let vt = match c.valid_through() {
            Some(v) => Some(v.min(through)),
            None if c.is_truncated() => None,
            None => Some(through),
        };
        let groups = match vt {
            Some(v) => c.homology_through(v)?,
            None => Vec::new(),
        };
        Ok(HomologyTable { groups, valid_through: vt, integrator_verified: verified })
    }

    /// True iff the groups are ℤ, 0, 0, … .
    pub fn is_point(&self) -> bool {
        self.groups.iter().enumerate().all(|(n, g)| if n == 0 { g.is_z() } else { g.is_zero() })
    }

    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self
            .groups
            .iter()
            .enumerate()
            .map(|(n, g)| {
                let mut v = g.to_json();
                v["n"] = json!(n);
                v
            })
            .collect();
        json!({ "degrees": degrees, "valid_through": self.valid_through, "integrator_verified": self.integrator_verified })
    }
}

impl std::fmt::Display for HomologyTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (n, g) in self.groups.iter().enumerate() {
            writeln!(f, "H_{n} = {g}")?;
        }
        match self.valid_through {
            Some(v) => write!(f, "valid through degree {v}")?,
            None => write!(f, "no degree is valid")?,
        }
        if !self.integrator_verified {
            write!(f, " ({RAW_LABEL})")?;
        }
        Ok(())
    }
}

/// H(A, X) in degrees 0..=min(d, top) − 1.
pub fn presheaf_homology(i: &Integrator, x: &AbPresheaf, d: usize) -> Result<HomologyTable, IntegratorError> {
    let pc = presheaf_complex(i, x)?;
    HomologyTable::of(&pc.complex, d.saturating_sub(1), pc.verified)
}

/// H(A, ℤ) through the integrator.
pub fn category_homology(i: &Integrator, d: usize) -> Result<HomologyTable, IntegratorError> {
    presheaf_homology(i, &constant_z(i.base().clone()), d)
}

/// Normalized chains of the nerve of a finite category, through degree d.
pub fn nerve_complex(cat: &dyn Category, d: usize) -> Result<ChainComplex, IntegratorError> {
    if !cat.is_finite() {
        return Err(IntegratorError::InfiniteCategory(cat.name()));
    }
    let chains: Vec<Vec<Chain>> = (0..=d)
        .map(|n| nerve(cat, n).map(|cs| cs.into_iter().filter(|c| !c.is_degenerate(cat)).collect()))
        .collect::<Result<_, _>>()?;
    let mut diffs = Vec::with_capacity(d);
    for n in 1..=d {
        let idx: HashMap<&Chain, usize> = chains[n - 1].iter().enumerate().map(|(k, c)| (c, k)).collect();
        let mut m = IntMatrix::zeros(chains[n - 1].len(), chains[n].len());
        for (col, c) in chains[n].iter().enumerate() {
            for k in 0..=n {
                if let Some(&row) = idx.get(&c.face(cat, k)) {
                    m.add_at(row, col, if k % 2 == 0 { 1 } else { -1 });
                }
            }
        }
        diffs.push(m);
    }
    Ok(ChainComplex::truncated(chains.iter().map(|c| c.len()).collect(), diffs)?)
}

/// H(A, ℤ) as the homology of the nerve.
pub fn nerve_homology(cat: &dyn Category, d: usize) -> Result<HomologyTable, IntegratorError> {
    HomologyTable::of(&nerve_complex(cat, d)?, d.saturating_sub(1), true)
}

/// H^n of Hom(L, Y) for Y a presheaf on B = A^op (a covariant functor on A).
/// Degree n is ⊕_{a ∈ L_n} Y(a).
pub fn cohomology(i: &Integrator, y: &AbPresheaf) -> Result<HomologyTable, IntegratorError> {
    if !i.is_free() {
        return Err(IntegratorError::Unsupported("cohomology needs a free integrator".into()));
    }
    let want = format!("op:{}", i.base().name());
    if y.base().name() != want {
        return Err(PresheafError::BaseMismatch(y.base().name(), want).into());
    }
    let top = i.top();
    let offsets = |n: usize| -> (Vec<usize>, usize) {
        let mut offs = Vec::new();
        let mut tot = 0;
        for a in &i.terms()[n].objs {
            offs.push(tot);
            tot += y.rank(a);
        }
        (offs, tot)
    };
    let dims: Vec<(Vec<usize>, usize)> = (0..=top).map(offsets).collect();
    // δ^n: C^{n−1} → C^n
    let mut deltas = Vec::with_capacity(top);
    for n in 1..=top {
        let fm = &i.diffs()[n - 1];
        let mut m = IntMatrix::zeros(dims[n].1, dims[n - 1].1);
        for e in &fm.entries {
            let block = y.act(&Opposite::op(&e.mor)).scale(e.coeff);
            m.add_block(dims[n].0[e.col], dims[n - 1].0[e.row], &block);
        }
        deltas.push(m);
    }
    // reversed: E_k = C^{top−k}
    let ranks: Vec<usize> = (0..=top).rev().map(|n| dims[n].1).collect();
    let diffs: Vec<IntMatrix> = (1..=top).map(|k| deltas[top - k].clone()).collect();
    let e = ChainComplex::new(ranks, diffs)?;
    let groups = (0..top).map(|n| e.homology(top - n)).collect::<Result<Vec<_>, _>>()?;
    Ok(HomologyTable { groups, valid_through: top.checked_sub(1), integrator_verified: i.verified().is_some() })
}

type Components = Arc<dyn Fn(&Obj) -> IntMatrix + Send + Sync>;

/// A morphism of presheaves, given objectwise.
#[derive(Clone)]
pub struct PresheafMorphism {
    pub src: AbPresheaf,
    pub tgt: AbPresheaf,
    comp: Components,
}

impl PresheafMorphism {
    /// `comp(a)` is the rank tgt(a) × rank src(a) matrix of η_a.
    pub fn new(src: AbPresheaf, tgt: AbPresheaf, comp: impl Fn(&Obj) -> IntMatrix + Send + Sync + 'static) -> PresheafMorphism {
        PresheafMorphism { src, tgt, comp: Arc::new(comp) }
    }

    pub fn identity(x: &AbPresheaf) -> PresheafMorphism {
        let x1 = x.clone();
        PresheafMorphism::new(x.clone(), x.clone(), move |a| IntMatrix::identity(x1.rank(a)))
    }

    pub fn zero(x: &AbPresheaf, y: &AbPresheaf) -> PresheafMorphism {
        let (x1, y1) = (x.clone(), y.clone());
        PresheafMorphism::new(x.clone(), y.clone(), move |a| IntMatrix::zeros(y1.rank(a), x1.rank(a)))
    }

    pub fn at(&self, a: &Obj) -> IntMatrix {
        (self.comp)(a)
    }

    /// Shapes and naturality on every generator between objects of dim ≤ d.
    pub fn validate(&self, d: usize) -> Result<(), PresheafError> {
        let cat = self.src.base().clone();
        same_base(&cat, self.tgt.base())?;
        for a in objects(cat.as_ref(), d) {
            let m = self.at(&a);
            if m.shape() != (self.tgt.rank(&a), self.src.rank(&a)) {
                return Err(PresheafError::ShapeMismatch(format!("component at {}", cat.obj_name(&a))));
            }
            for g in cat.generators_from(&a) {
                if !cat.is_finite() && cat.dim(&g.tgt) > d {
                    continue;
                }
                if self.tgt.act(&g).mul(&self.at(&g.tgt)) != m.mul(&self.src.act(&g)) {
                    return Err(PresheafError::NotFunctorial(format!("not natural along {}", cat.mor_name(&g))));
                }
            }
        }
        Ok(())
    }
}

/// X_0 ← X_1 ← ⋯ of presheaves.
#[derive(Clone)]
pub struct PresheafChain {
    pub terms: Vec<AbPresheaf>,
    pub diffs: Vec<PresheafMorphism>,
}

impl PresheafChain {
    pub fn concentrated(x: AbPresheaf) -> PresheafChain {
        PresheafChain { terms: vec![x], diffs: Vec::new() }
    }

    /// Naturality of each differential and d² = 0 at every object of dim ≤ d.
    pub fn validate(&self, d: usize) -> Result<(), PresheafError> {
        if self.diffs.len() + 1 != self.terms.len() {
            return Err(PresheafError::Malformed("a complex of n terms has n − 1 differentials".into()));
        }
        for (k, m) in self.diffs.iter().enumerate() {
            if m.src.name() != self.terms[k + 1].name() || m.tgt.name() != self.terms[k].name() {
                return Err(PresheafError::Malformed(format!("d_{} does not connect the terms", k + 1)));
            }
            m.validate(d)?;
        }
        let cat = self.terms[0].base().clone();
        for a in objects(cat.as_ref(), d) {
            for k in 1..self.diffs.len() {
                if !self.diffs[k - 1].at(&a).mul(&self.diffs[k].at(&a)).is_zero() {
                    return Err(PresheafError::NotFunctorial(format!("d∘d ≠ 0 at {}", cat.obj_name(&a))));
                }
            }
        }
        Ok(())
    }
}

/// H(A, X•) = H(Tot(X• ⊙ L)).  The complex is padded with zeros up to the
/// integrator's top degree so that only L limits the validity window.
pub fn hyperhomology(i: &Integrator, xs: &PresheafChain, d: usize) -> Result<HomologyTable, IntegratorError> {
    let cat = i.base().clone();
    for x in &xs.terms {
        same_base(&cat, x.base())?;
    }
    let mut terms = xs.terms.clone();
    let mut diffs = xs.diffs.clone();
    let z = AbPresheaf::zero(cat.clone());
    while terms.len() <= i.top() {
        diffs.push(PresheafMorphism::zero(&z, terms.last().unwrap()));
        terms.push(z.clone());
    }
    let cols: Vec<ChainComplex> = terms.iter().map(|x| i.evaluate(x)).collect::<Result<_, _>>()?;
    let verts: Vec<Vec<IntMatrix>> = diffs
        .iter()
        .map(|m| i.evaluate_morphism(&m.src, &m.tgt, &|a| m.at(a)))
        .collect::<Result<_, _>>()?;
    let ranks: Vec<Vec<usize>> = (0..=i.top()).map(|p| cols.iter().map(|c| c.rank(p)).collect()).collect();
    let dc = DoubleComplex::new(ranks, |p, q| cols[q].d(p), |p, q| verts[q - 1][p].clone(), true)?;
    let tot = total_complex(&dc)?;
    HomologyTable::of(&tot, d.saturating_sub(1), i.verified().is_some())
}

/// Degreewise comparison of H(A, X) through two integrators.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub degrees: Vec<(FgAbGroup, FgAbGroup)>,
}

impl Comparison {
    pub fn agree(&self) -> bool {
        self.degrees.iter().all(|(a, b)| a == b)
    }

    pub fn to_json(&self) -> Value {
        let ds: Vec<Value> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(n, (a, b))| json!({ "n": n, "first": a.to_json(), "second": b.to_json(), "equal": a == b }))
            .collect();
        json!({ "first": self.first, "second": self.second, "agree": self.agree(), "degrees": ds })
    }
}

pub fn compare_integrators(i1: &Integrator, i2: &Integrator, x: &AbPresheaf, d: usize) -> Result<Comparison, IntegratorError> {
    let through = d.min(i1.top()).min(i2.top()).saturating_sub(1);
    let h1 = i1.evaluate(x)?.homology_through(through)?;
    let h2 = i2.evaluate(x)?.homology_through(through)?;
    Ok(Comparison { first: i1.name().to_string(), second: i2.name().to_string(), degrees: h1.into_iter().zip(h2).collect() })
}

type MapBasis = Arc<(usize, IntMatrix)>;

/// L*(C): a ↦ Hom(L(a), C), acting by precomposition with L(f).
/// Needs L through degree top(C) + 1.
pub fn right_adjoint_presheaf(i: &Integrator, c: &ChainComplex) -> Result<AbPresheaf, IntegratorError> {
    let bound = c.top();
    if i.top() < bound + 1 {
        return Err(IntegratorError::Unsupported(format!("L*(C) needs L through degree {}", bound + 1)));
    }
    let i = Arc::new(i.clone());
    let c = Arc::new(c.clone());
    let cache: Arc<RwLock<HashMap<Obj, MapBasis>>> = Arc::default();
    // chain maps L(a) → C flattened into the columns of a matrix
    let basis = {
        let (i, c, cache) = (i.clone(), c.clone(), cache.clone());
        move |a: &Obj| -> MapBasis {
            if let Some(b) = cache.read().get(a) {
                return b.clone();
            }
            let la = i.complex_at(a).expect("L(a) within truncation");
            let (g, maps) = chain_map_group(&la, &c, bound);
            let rows: usize = (0..=bound).map(|n| c.rank(n) * la.rank(n)).sum();
            let mut m = IntMatrix::zeros(rows, maps.len());
            for (k, f) in maps.iter().enumerate() {
                m.paste(0, k, &flatten(&(0..=bound).map(|n| f.comp(n)).collect::<Vec<_>>()));
            }
            let b = Arc::new((g.free_rank, m));
            cache.write().insert(a.clone(), b.clone());
            b
        }
    };
    let basis = Arc::new(basis);
    let b1 = basis.clone();
    let name = format!("L*({})", i.name());
    let cat: CatRef = i.base().clone();
    Ok(AbPresheaf::from_fns(
        cat,
        &name,
        move |a| b1(a).0,
        move |f: &Mor| {
            let (ba, bb) = (basis(&f.src), basis(&f.tgt));
            let lf = i.chain_map(f).expect("L(f) within truncation");
            let mut out = IntMatrix::zeros(ba.0, bb.0);
            for k in 0..bb.0 {
                let mut comps = Vec::with_capacity(bound + 1);
                let mut off = 0;
                for n in 0..=bound {
                    let rows = c.rank(n);
                    let cols = lf.target.rank(n);
                    let idx: Vec<usize> = (0..rows * cols).map(|t| off + t).collect();
                    let g = IntMatrix::from_big(rows, cols, bb.1.col(k).select_rows(&idx).to_big_vec());
                    comps.push(g.mul(&lf.comp(n)));
                    off += rows * cols;
                }
                let x = solve(&ba.1, &flatten(&comps)).expect("precomposition stays in the lattice of chain maps");
                out.paste(0, k, &x);
            }
            out
        },
    ))
}

fn flatten(ms: &[IntMatrix]) -> IntMatrix {
    let mut v = Vec::new();
    for m in ms {
        v.extend(m.to_big_vec());
    }
    let n = v.len();
    IntMatrix::from_big(n, 1, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{bousfield_kan, normalized_integrator, slice_integrator, standard_integrator, theta_integrator, NormalizedKind};
    use crate::presheaf::{free_abelianization, representable};
    use crate::shapecat::{boundary_of_simplex, CircleSet, Cube, Delta, Finite, Globe, SetRef, Terminal, TerminalSet};

    fn delta(d: usize) -> CatRef {
        Arc::new(Delta::new(d))
    }

    #[test]
    fn constant_coefficients() {
        let mut l = standard_integrator(delta(5), 5).unwrap();
        let raw = presheaf_complex(&l, &constant_z(l.base().clone())).unwrap();
        assert_eq!(raw.label(), RAW_LABEL);
        l.verify(3);
        let pc = presheaf_complex(&l, &constant_z(l.base().clone())).unwrap();
        assert_eq!(pc.label(), "homology complex");
        // ℤ ←0 ℤ ←1 ℤ ←0 ℤ ←1 …
        let ds: Vec<i64> = (1..=5).map(|n| pc.complex.d(n).get_i64(0, 0).unwrap()).collect();
        assert_eq!(ds, vec![0, 1, 0, 1, 0]);
        let h = category_homology(&l, 5).unwrap();
        assert!(h.is_point());
        assert_eq!(h.valid_through, Some(4));
        assert!(h.integrator_verified);

        let mut g = standard_integrator(Arc::new(Globe::new(5, false)), 5).unwrap();
        g.verify(4);
        let h = category_homology(&g, 5).unwrap();
        assert!(h.groups.iter().all(|x| x.is_z()), "{h}");
        assert_eq!(h.groups.len(), 5);

        let c = standard_integrator(Arc::new(Cube::new(4, None)), 4).unwrap();
        let h = category_homology(&c, 4).unwrap();
        assert!(!h.integrator_verified);
        assert!(h.groups.iter().all(|x| x.is_z()));

        let t = theta_integrator(2, 4).unwrap();
        assert!(category_homology(&t, 4).unwrap().is_point());
    }

    #[test]
    fn representables_are_points() {
        for kind in [NormalizedKind::Simplicial, NormalizedKind::CubicalConnections, NormalizedKind::GlobularReflexive] {
            let c = normalized_integrator(kind, 4).unwrap();
            for a in c.base().objects_upto(3) {
                let h = presheaf_homology(&c, &representable(c.base().clone(), &a), 4).unwrap();
                assert!(h.is_point(), "{kind:?} at {a}: {h}");
            }
        }
    }

    #[test]
    fn nerves() {
        assert!(nerve_homology(&Finite::chain_poset(2), 4).unwrap().is_point());
        assert!(nerve_homology(&Terminal::new(), 4).unwrap().is_point());
        let h = nerve_homology(&Finite::parallel_pair(), 4).unwrap();
        assert_eq!(h.groups, vec![FgAbGroup::free(1), FgAbGroup::free(1), FgAbGroup::zero(), FgAbGroup::zero()]);
        assert!(nerve_homology(&Delta::new(2), 2).is_err());
        // Bousfield–Kan agrees with the nerve
        for cat in [Arc::new(Finite::chain_poset(3)) as CatRef, Arc::new(Finite::parallel_pair())] {
            let bk = bousfield_kan(cat.clone(), 4).unwrap();
            assert_eq!(category_homology(&bk, 4).unwrap().groups, nerve_homology(cat.as_ref(), 4).unwrap().groups);
        }
    }

    #[test]
    fn cohomology_of_simplices() {
        let d = delta(4);
        let l = standard_integrator(d.clone(), 4).unwrap();
        let op: CatRef = Arc::new(Opposite::new(d.clone()));
        let h = cohomology(&l, &constant_z(op.clone())).unwrap();
        assert!(h.is_point());
        // lim over Δ of the vertex functor: a compatible family is forced to vanish at Δ_0
        let h = cohomology(&l, &representable(op.clone(), &Obj::Dim(0))).unwrap();
        assert!(h.groups[0].is_zero());
        let l0 = standard_integrator(d.clone(), 0).unwrap();
        let h = cohomology(&l0, &constant_z(op)).unwrap();
        assert!(h.groups.is_empty());
        assert!(cohomology(&l, &constant_z(d)).is_err());
    }

    #[test]
    fn hyperhomology_via_tot() {
        let mut l = standard_integrator(delta(4), 4).unwrap();
        l.verify(2);
        let z = constant_z(l.base().clone());
        let one = hyperhomology(&l, &PresheafChain::concentrated(z.clone()), 4).unwrap();
        assert_eq!(one, category_homology(&l, 4).unwrap());
        let zero = hyperhomology(&l, &PresheafChain::concentrated(AbPresheaf::zero(l.base().clone())), 4).unwrap();
        assert!(zero.groups.iter().all(|g| g.is_zero()));
        let cone = PresheafChain { terms: vec![z.clone(), z.clone()], diffs: vec![PresheafMorphism::identity(&z)] };
        cone.validate(3).unwrap();
        let h = hyperhomology(&l, &cone, 4).unwrap();
        assert!(h.groups.iter().all(|g| g.is_zero()), "{h}");
        // ℤ ←2 ℤ: H_0 = ℤ/2
        let two = PresheafChain { terms: vec![z.clone(), z.clone()], diffs: vec![PresheafMorphism::new(z.clone(), z.clone(), |_| IntMatrix::from_rows(&[vec![2]]))] };
        let h = hyperhomology(&l, &two, 4).unwrap();
        assert_eq!(h.groups[0], FgAbGroup::from_cyclic(0, &[2.into()]));
        assert!(h.groups[1..].iter().all(|g| g.is_zero()));
    }

    #[test]
    fn comparisons_and_slices() {
        let d = delta(4);
        let l = standard_integrator(d.clone(), 4).unwrap();
        let c = normalized_integrator(NormalizedKind::Simplicial, 4).unwrap();
        let fs: Vec<SetRef> = vec![Arc::new(TerminalSet::new(d.clone())), Arc::new(CircleSet::new(d.clone())), Arc::new(boundary_of_simplex(d.clone(), 2))];
        for f in fs {
            let x = free_abelianization(f.clone());
            let cmp = compare_integrators(&l, &c, &x, 4).unwrap();
            assert!(cmp.agree(), "{}", cmp.to_json());
            let s = slice_integrator(&l, f.clone()).unwrap();
            let hs = category_homology(&s, 4).unwrap();
            assert_eq!(hs.groups, presheaf_homology(&c, &x, 4).unwrap().groups, "{}", f.name());
        }
        let x = free_abelianization(Arc::new(CircleSet::new(d.clone())));
        let h = presheaf_homology(&c, &x, 4).unwrap();
        assert_eq!(h.groups, vec![FgAbGroup::free(1), FgAbGroup::free(1), FgAbGroup::zero()].into_iter().chain([FgAbGroup::zero()]).collect::<Vec<_>>());
        let y = representable(d.clone(), &Obj::Dim(2));
        assert!(compare_integrators(&l, &l, &y, 4).unwrap().agree());
    }

    #[test]
    fn right_adjoint() {
        let c = normalized_integrator(NormalizedKind::Simplicial, 4).unwrap();
        let z1 = ChainComplex::concentrated(1, 1);
        let p = right_adjoint_presheaf(&c, &z1).unwrap();
        let ranks: Vec<usize> = (0..=3).map(|n| p.rank(&Obj::Dim(n))).collect();
        assert_eq!(ranks, vec![0, 1, 2, 3]);
        p.validate(3).unwrap();
        let z0 = right_adjoint_presheaf(&c, &ChainComplex::point()).unwrap();
        for n in 0..=3 {
            assert_eq!(z0.rank(&Obj::Dim(n)), 1);
        }
        for f in [Delta::face(2, 1), Delta::degeneracy(1, 0)] {
            assert_eq!(z0.act(&f), IntMatrix::identity(1));
        }
        let zero = right_adjoint_presheaf(&c, &ChainComplex::zero()).unwrap();
        assert_eq!(zero.rank(&Obj::Dim(2)), 0);
    }
}
