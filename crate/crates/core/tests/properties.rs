use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use dk_core::chains::{tensor, total_complex, ChainComplex, DoubleComplex};
use dk_core::doldkan::*;
use dk_core::homology::{presheaf_complex, presheaf_homology};
use dk_core::integrators::{normalized_integrator, standard_integrator, Integrator, NormalizedKind};
use dk_core::intlinalg::{homology_group, inverse_unimodular, smith_normal_form, FgAbGroup, IntMatrix};
use dk_core::presheaf::{addinf_eval, addinf_map, representable, restrict, FormalMap, FormalSum};
use dk_core::shapecat::{
    compose, make_category, CatRef, Category, CircleSet, CompositeFunctor, Delta, Diagonal, Functor, Inclusion, Obj, Product, SetRef, Slice,
};
use dk_core::wreath::xi;

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(-9i64..=9, r * c).prop_map(move |v| IntMatrix::from_i64(r, c, v)))
}

fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n.max(1), 0..n.max(1), -3i64..=3), 0..=2 * n).prop_map(move |ops| {
        let mut u = IntMatrix::identity(n);
        for (i, j, k) in ops {
            if i != j {
                let mut e = IntMatrix::identity(n);
                e.set_i64(i, j, k);
                u = e.mul(&u);
            }
        }
        u
    })
}

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| *x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn gcd_of_minors(m: &IntMatrix, r: usize) -> BigInt {
    let rows: Vec<Vec<i128>> = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get_i64(i, j).unwrap() as i128).collect()).collect();
    let mut g = BigInt::zero();
    for rs in subsets(m.rows(), r) {
        for cs in subsets(m.cols(), r) {
            let sub: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
            g = g.gcd(&BigInt::from(det(&sub)));
        }
    }
    g
}

fn sum_groups(a: &FgAbGroup, b: &FgAbGroup) -> FgAbGroup {
    a.direct_sum(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_diagonal_divisibility_chain(m in matrix(6)) {
        let (u, d, v) = smith_normal_form(&m);
        prop_assert!(u.is_unimodular() && v.is_unimodular());
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        let mut diag = Vec::new();
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let x = d.get(i, j);
                if i != j {
                    prop_assert!(x.is_zero());
                } else if !x.is_zero() {
                    prop_assert!(x.is_positive());
                    diag.push(x);
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        // nonzero entries come first
        let k = diag.len();
        for i in k..d.rows().min(d.cols()) {
            prop_assert!(d.get(i, i).is_zero());
        }
    }

    #[test]
    fn smith_product_is_the_gcd_of_maximal_minors(m in matrix(4)) {
        let (_, d, _) = smith_normal_form(&m);
        let diag: Vec<BigInt> = (0..d.rows().min(d.cols())).map(|i| d.get(i, i)).filter(|x| !x.is_zero()).collect();
        let r = diag.len();
        prop_assume!(r > 0);
        let prod = diag.iter().fold(BigInt::from(1), |a, b| a * b);
        prop_assert_eq!(prod, gcd_of_minors(&m, r));
    }

    #[test]
    fn homology_ignores_a_change_of_middle_basis(seed in any::<u64>(), ops in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..6)) {
        let c = random_complex(&mut seeded(seed), 2, 3);
        let n = c.rank(1);
        prop_assume!(n > 0);
        let mut u = IntMatrix::identity(n);
        for (i, j, k) in ops {
            if i < n && j < n && i != j {
                let mut e = IntMatrix::identity(n);
                e.set_i64(i, j, k);
                u = e.mul(&u);
            }
        }
        let ui = inverse_unimodular(&u);
        let h = homology_group(&c.d(1), &c.d(2)).unwrap();
        let h2 = homology_group(&c.d(1).mul(&ui), &u.mul(&c.d(2))).unwrap();
        prop_assert_eq!(h, h2);
    }

    #[test]
    fn total_complexes_square_to_zero_and_satisfy_kuenneth_in_degree_zero(s1 in any::<u64>(), s2 in any::<u64>()) {
        let c = random_complex(&mut seeded(s1), 3, 3);
        let d = random_complex(&mut seeded(s2), 3, 3);
        let dc = external_tensor(&c, &d);
        let tot = total_complex(&dc).unwrap();
        for n in 2..=tot.top() {
            prop_assert!(tot.d(n - 1).mul(&tot.d(n)).is_zero());
        }
        prop_assert_eq!(tot.homology_all(), tensor(&c, &d).homology_all());
        let (h0c, h0d) = (c.homology(0).unwrap(), d.homology(0).unwrap());
        prop_assume!(h0c.torsion.is_empty() && h0d.torsion.is_empty());
        prop_assert_eq!(tot.homology(0).unwrap(), FgAbGroup::free(h0c.free_rank * h0d.free_rank));
    }

    #[test]
    fn exact_rows_give_an_exact_total_complex(n in 1usize..=3, k in 1usize..=3, s in any::<u64>(), u in unimodular(3)) {
        // C = (ℤⁿ ← ℤⁿ, a unimodular map) is exact, so every row C ⊗ D_j is
        let u = u.select_rows(&(0..n).collect::<Vec<_>>()).select_cols(&(0..n).collect::<Vec<_>>());
        prop_assume!(u.is_unimodular());
        let c = ChainComplex::new(vec![n, n], vec![u]).unwrap();
        let d = random_complex(&mut seeded(s), k, 2);
        let tot = total_complex(&external_tensor(&c, &d)).unwrap();
        prop_assert!(tot.homology_all().iter().all(FgAbGroup::is_zero));
    }
}

fn external_tensor(c: &ChainComplex, d: &ChainComplex) -> DoubleComplex {
    let ranks: Vec<Vec<usize>> = (0..=c.top()).map(|i| (0..=d.top()).map(|j| c.rank(i) * d.rank(j)).collect()).collect();
    DoubleComplex::new(
        ranks,
        |i, j| c.d(i).kron(&IntMatrix::identity(d.rank(j))),
        |i, j| IntMatrix::identity(c.rank(i)).kron(&d.d(j)),
        false,
    )
    .unwrap()
}

const CATEGORIES: [&str; 9] = ["delta", "delta_mono", "globe", "globe_ref", "cube", "cube_c", "theta2", "xi2", "prod:delta,delta"];

fn some_morphism(cat: &dyn Category, src: &Obj, pick: usize) -> Option<dk_core::shapecat::Mor> {
    let targets: Vec<(Obj, usize)> = cat.objects_upto(2).into_iter().filter_map(|b| {
        let n = cat.hom(src, &b).len();
        (n > 0).then_some((b, n))
    }).collect();
    if targets.is_empty() {
        return None;
    }
    let (b, n) = &targets[pick % targets.len()];
    Some(cat.hom(src, b)[(pick / targets.len()) % n].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_is_associative_and_unital(ci in 0usize..CATEGORIES.len(), a in 0usize..64, p in 0usize..4096, q in 0usize..4096, r in 0usize..4096) {
        let cat = make_category(CATEGORIES[ci], 2).unwrap();
        let objs = cat.objects_upto(2);
        let a = &objs[a % objs.len()];
        let f = some_morphism(cat.as_ref(), a, p).unwrap();
        let g = some_morphism(cat.as_ref(), &f.tgt, q).unwrap();
        let h = some_morphism(cat.as_ref(), &g.tgt, r).unwrap();
        let c = cat.as_ref();
        let left = compose(c, &h, &compose(c, &g, &f).unwrap()).unwrap();
        let right = compose(c, &compose(c, &h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(compose(c, &cat.identity(&f.tgt), &f).unwrap(), f.clone());
        prop_assert_eq!(compose(c, &f, &cat.identity(&f.src)).unwrap(), f.clone());
        // composites are canonical: they are found in their hom-set listing
        prop_assert!(cat.hom_index(&left.src, &left.tgt).contains_key(&left));
    }

    #[test]
    fn hom_sets_have_no_duplicates(ci in 0usize..CATEGORIES.len(), a in 0usize..64, b in 0usize..64) {
        let cat = make_category(CATEGORIES[ci], 2).unwrap();
        let objs = cat.objects_upto(2);
        let (a, b) = (&objs[a % objs.len()], &objs[b % objs.len()]);
        let hom = cat.hom(a, b);
        let set: HashSet<_> = hom.iter().collect();
        prop_assert_eq!(set.len(), hom.len());
    }

    #[test]
    fn xi_normal_forms_are_closed_under_composition(a in 0usize..64, p in 0usize..4096, q in 0usize..4096) {
        let cat = xi(2, 4);
        let objs = cat.objects_upto(3);
        let a = &objs[a % objs.len()];
        let f = some_morphism(cat.as_ref(), a, p).unwrap();
        let g = some_morphism(cat.as_ref(), &f.tgt, q).unwrap();
        let gf = compose(cat.as_ref(), &g, &f).unwrap();
        prop_assert!(cat.hom_index(&gf.src, &gf.tgt).contains_key(&gf));
        // composing with identities leaves the normal form unchanged
        prop_assert_eq!(compose(cat.as_ref(), &cat.identity(&gf.tgt), &gf).unwrap(), gf);
    }

    #[test]
    fn slice_projection_has_unique_lifts(a in 0usize..3, x in 0usize..64, p in 0usize..64) {
        let d: CatRef = Arc::new(Delta::new(3));
        let f: SetRef = Arc::new(CircleSet::new(d.clone()));
        let s = Slice::new(f.clone());
        let a = Obj::Dim(a);
        let x = x % f.count(&a);
        let top = Slice::elem(a.clone(), x);
        let srcs: Vec<Obj> = (0..=2).map(Obj::Dim).collect();
        let a1 = &srcs[p % 3];
        let phis = d.hom(a1, &a);
        let phi = &phis[(p / 3) % phis.len()];
        let lifts: usize = (0..f.count(a1))
            .map(|y| s.hom(&Slice::elem(a1.clone(), y), &top).iter().filter(|g| Slice::under(g) == phi).count())
            .sum();
        prop_assert_eq!(lifts, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yoneda_evaluation(seed in any::<u64>(), a in 0usize..=3) {
        let x = random_simplicial_group(&mut seeded(seed), 3);
        let a = Obj::Dim(a);
        let l = FormalSum::new(vec![a.clone()]);
        let (g, offs) = addinf_eval(&x, &l);
        prop_assert_eq!(g, FgAbGroup::free(x.rank(&a)));
        prop_assert_eq!(offs, vec![0, x.rank(&a)]);
        let mut id = FormalMap::new(l.clone(), l);
        id.push(0, 0, 1, x.base().identity(&a));
        prop_assert_eq!(addinf_map(&x, &id).unwrap(), IntMatrix::identity(x.rank(&a)));
    }

    #[test]
    fn restriction_is_functorial(seed in any::<u64>()) {
        let x = random_bisimplicial_group(&mut seeded(seed), 3);
        let delta: CatRef = Arc::new(Delta::new(3));
        let mono: CatRef = Arc::new(Delta::mono(3));
        let diag = Diagonal::new(delta.clone(), x.base().clone(), 2);
        let incl = Inclusion::new(mono.clone(), delta.clone());
        let step = restrict(&restrict(&x, Arc::new(Diagonal::new(delta.clone(), x.base().clone(), 2))).unwrap(), Arc::new(Inclusion::new(mono.clone(), delta.clone()))).unwrap();
        let composite: Arc<dyn Functor> = Arc::new(CompositeFunctor::new(Box::new(incl), Box::new(diag)));
        let once = restrict(&x, composite).unwrap();
        for a in mono.objects_upto(3) {
            prop_assert_eq!(step.rank(&a), once.rank(&a));
            for b in mono.objects_upto(3) {
                for f in mono.hom(&a, &b).iter() {
                    prop_assert_eq!(step.act(f), once.act(f));
                }
            }
        }
    }

    #[test]
    fn random_presheaves_are_functorial(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        random_simplicial_group(&mut rng, 3).validate(3).unwrap();
        random_cubical_group(&mut rng, 3).validate(3).unwrap();
        random_globular_group(&mut rng, 3).validate(3).unwrap();
        random_bisimplicial_group(&mut rng, 2).validate(4).unwrap();
    }
}

fn verified(spec: &str, d: usize) -> Integrator {
    let mut l = match spec {
        "c[delta]" => normalized_integrator(NormalizedKind::Simplicial, d).unwrap(),
        "c[cube_c]" => normalized_integrator(NormalizedKind::CubicalConnections, d).unwrap(),
        "c[globe_ref]" => normalized_integrator(NormalizedKind::GlobularReflexive, d).unwrap(),
        _ => standard_integrator(make_category(spec, d).unwrap(), d).unwrap(),
    };
    let (o, a) = l.verify(d - 1);
    assert!(o.ok() && a.ok(), "{spec} does not verify");
    l
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn representables_have_point_homology(ii in 0usize..7, a in 0usize..64) {
        let specs = ["delta", "delta_mono", "globe", "xi2", "c[delta]", "c[cube_c]", "c[globe_ref]"];
        let l = verified(specs[ii], 4);
        let objs = l.base().objects_upto(3);
        let a = &objs[a % objs.len()];
        let h = presheaf_homology(&l, &representable(l.base().clone(), a), 4).unwrap();
        prop_assert!(h.is_point(), "{} at {}: {:?}", specs[ii], a, h.groups);
    }

    #[test]
    fn presheaf_complexes_are_additive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let l = standard_integrator(Arc::new(Delta::new(4)), 4).unwrap();
        let mut rng = seeded(s1);
        let x = random_simplicial_group(&mut rng, 4);
        let y = random_simplicial_group(&mut seeded(s2), 4);
        let cx = presheaf_complex(&l, &x).unwrap().complex;
        let cy = presheaf_complex(&l, &y).unwrap().complex;
        let cs = presheaf_complex(&l, &x.direct_sum(&y).unwrap()).unwrap().complex;
        for n in 0..=4 {
            prop_assert_eq!(cs.rank(n), cx.rank(n) + cy.rank(n));
            prop_assert!(cs.d(n).mul(&cs.d(n + 1)).is_zero() || n == 4);
        }
        let hs = cs.homology_through(3).unwrap();
        let hx = cx.homology_through(3).unwrap();
        let hy = cy.homology_through(3).unwrap();
        for n in 0..=3 {
            prop_assert_eq!(&hs[n], &sum_groups(&hx[n], &hy[n]));
        }
    }

    #[test]
    fn simplicial_dold_kan(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let c = random_complex(&mut rng, 4, 3);
        let n = simplicial_n(&simplicial_gamma(&c, 4), 4).unwrap();
        prop_assert_eq!(n.ranks(), c.ranks());
        for k in 1..=4 {
            prop_assert_eq!(n.d(k), c.d(k));
        }
        let x = random_simplicial_group(&mut rng, 4);
        prop_assert_eq!(simplicial_c(&x, 4).unwrap().homology_through(3).unwrap(), simplicial_cn(&x, 4).unwrap().homology_through(3).unwrap());
        prop_assert!(simplicial_n_to_cn(&x, 4).unwrap().iter().all(IntMatrix::is_unimodular));
    }

    #[test]
    fn bourn_dold_kan(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let c = random_complex(&mut rng, 4, 3);
        let b = bourn_b(&bourn_binv(&c, 4).unwrap(), 4).unwrap();
        prop_assert_eq!(b.ranks(), c.ranks());
        for k in 1..=4 {
            prop_assert_eq!(b.d(k), c.d(k));
        }
        prop_assert!(bourn_unit_check(&random_globular_group(&mut rng, 4), 4).unwrap());
    }

    #[test]
    fn cubical_rank_identity_with_the_sum(seed in any::<u64>()) {
        let x = random_cubical_group(&mut seeded(seed), 3);
        for r in brown_higgins_ranks(&x, 3).unwrap() {
            prop_assert!(r.decomposes(), "{:?}", r);
        }
        let cn = cubical_cn(&x, 3, true).unwrap().homology_through(2).unwrap();
        prop_assert_eq!(&cn, &cubical_cn(&x, 3, false).unwrap().homology_through(2).unwrap());
        prop_assert_eq!(&cn, &cubical_n(&x, 3).unwrap().homology_through(2).unwrap());
    }

    #[test]
    fn eilenberg_zilber_on_random_inputs(seed in any::<u64>()) {
        let x = random_bisimplicial_group(&mut seeded(seed), 3);
        prop_assert!(eilenberg_zilber_check(&x, 3).unwrap().agree());
    }
}

#[test]
fn product_categories_are_built_from_factors() {
    let d: CatRef = Arc::new(Delta::new(2));
    let p = Product::new(vec![d.clone(), d], 4);
    assert_eq!(p.name(), "prod:delta,delta");
}
