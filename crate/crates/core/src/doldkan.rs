//! Strict Dold–Kan correspondences over ℤ: simplicial (C, C_N, D, N, Γ),
//! cubical with connections (N, D_σ, D_γ and the two normalized quotients),
//! reflexive globular (Bourn's B and B⁻¹), and two cross-checks.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chains::{total_complex, ChainComplex, ChainError, DoubleComplex};
use crate::intlinalg::{column_hnf, inverse_unimodular, kernel_basis, quotient, solve, FgAbGroup, IntMatrix, LinAlgError, Quotient};
use crate::presheaf::{free_abelianization, representable, restrict, AbPresheaf, PresheafError};
use crate::shapecat::{
    monotone_maps, Arrow, CatRef, ConnKind, Cube, Delta, Diagonal, Globe, Mor, Obj, PosetNerve, Product, RepresentableSet, SetRef, SubSet,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DkError {
    #[error("expected a presheaf on {expected}, got one on {got}")]
    WrongBase { expected: String, got: String },
    #[error("degree {0}: not a subcomplex")]
    NotSubcomplex(usize),
    #[error("degree {0}: the degenerate part is not a direct summand")]
    NotSaturated(usize),
    #[error("window holds {0} lattice points, too many to enumerate")]
    WindowTooLarge(u128),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn check_base(x: &AbPresheaf, want: &str) -> Result<(), DkError> {
    let got = x.base().name();
    if got == want {
        Ok(())
    } else {
        Err(DkError::WrongBase { expected: want.into(), got })
    }
}

fn pm(k: usize) -> i64 {
    if k % 2 == 0 { 1 } else { -1 }
}

fn dim(k: usize) -> Obj {
    Obj::Dim(k)
}

fn dix(o: &Obj) -> usize {
    match o {
        Obj::Dim(n) => *n,
        _ => panic!("expected a dimension object, got {o}"),
    }
}

/// Σ sign · X(f) over the listed morphisms into degree n.
fn signed_sum(x: &AbPresheaf, rows: usize, cols: usize, terms: impl IntoIterator<Item = (Mor, i64)>) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for (f, s) in terms {
        m = m.add(&x.act(&f).scale(s));
    }
    m
}

/// Column span of the images of the given maps into ℤ^rows, in Hermite form.
fn span(rows: usize, maps: impl IntoIterator<Item = IntMatrix>) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, 0);
    for g in maps {
        m = m.hstack(&g);
    }
    column_hnf(&m)
}

/// The subcomplex of `c` spanned by the columns of `bases`.
pub fn subcomplex(c: &ChainComplex, bases: &[IntMatrix]) -> Result<ChainComplex, DkError> {
    let mut diffs = Vec::with_capacity(bases.len().saturating_sub(1));
    for n in 1..bases.len() {
        let img = c.d(n).mul(&bases[n]);
        diffs.push(solve(&bases[n - 1], &img).map_err(|_| DkError::NotSubcomplex(n))?);
    }
    Ok(ChainComplex::truncated(bases.iter().map(|b| b.cols()).collect(), diffs)?)
}

/// c / (subcomplex spanned by `bases`), with the chosen projections and sections.
pub fn quotient_complex(c: &ChainComplex, bases: &[IntMatrix]) -> Result<(ChainComplex, Vec<Quotient>), DkError> {
    subcomplex(c, bases)?;
    let qs = bases
        .iter()
        .enumerate()
        .map(|(n, b)| {
            quotient(c.rank(n), b).map_err(|e| match e {
                LinAlgError::NotSaturated => DkError::NotSaturated(n),
                e => DkError::Chain(ChainError::ShapeMismatch(e.to_string())),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let diffs = (1..bases.len()).map(|n| qs[n - 1].proj.mul(&c.d(n)).mul(&qs[n].sect)).collect();
    let ranks = qs.iter().map(|q| q.proj.rows()).collect();
    Ok((ChainComplex::truncated(ranks, diffs)?, qs))
}

// ---------------------------------------------------------------- simplicial

fn simplicial_faces(x: &AbPresheaf, n: usize) -> Vec<IntMatrix> {
    (0..=n).map(|i| x.act(&Delta::face(n, i))).collect()
}

/// CX: X_k with d = Σ (−1)^i d_i.
pub fn simplicial_c(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    check_base(x, "delta")?;
    let ranks = (0..=d).map(|k| x.rank(&dim(k))).collect();
    let diffs = (1..=d).map(|k| signed_sum(x, x.rank(&dim(k - 1)), x.rank(&dim(k)), (0..=k).map(|i| (Delta::face(k, i), pm(i))))).collect();
    Ok(ChainComplex::truncated(ranks, diffs)?)
}

fn degenerate_bases(x: &AbPresheaf, d: usize) -> Vec<IntMatrix> {
    (0..=d).map(|k| span(x.rank(&dim(k)), (0..k).map(|j| x.act(&Delta::degeneracy(k - 1, j))))).collect()
}

/// DX: the span of degenerate simplices.
pub fn simplicial_d(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    subcomplex(&simplicial_c(x, d)?, &degenerate_bases(x, d))
}

/// C_N X = CX / DX.  When DX is spanned by basis vectors (free abelianizations,
/// representables) the quotient basis is the nondegenerate simplices.
pub fn simplicial_cn(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    Ok(quotient_complex(&simplicial_c(x, d)?, &degenerate_bases(x, d))?.0)
}

/// NX with its basis inside CX: N_k = ⋂_{i≥1} ker d_i, differential d_0.
pub fn simplicial_n_with_basis(x: &AbPresheaf, d: usize) -> Result<(ChainComplex, Vec<IntMatrix>), DkError> {
    let c = simplicial_c(x, d)?;
    let mut bases = vec![IntMatrix::identity(c.rank(0))];
    for k in 1..=d {
        let faces = simplicial_faces(x, k);
        let mut m = IntMatrix::zeros(0, c.rank(k));
        for f in &faces[1..] {
            m = m.vstack(f);
        }
        bases.push(kernel_basis(&m));
    }
    Ok((subcomplex(&c, &bases)?, bases))
}

pub fn simplicial_n(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    Ok(simplicial_n_with_basis(x, d)?.0)
}

/// The composite N X ⊂ C X → C_N X, degreewise in the chosen bases.
pub fn simplicial_n_to_cn(x: &AbPresheaf, d: usize) -> Result<Vec<IntMatrix>, DkError> {
    let c = simplicial_c(x, d)?;
    let (_, nb) = simplicial_n_with_basis(x, d)?;
    let (_, qs) = quotient_complex(&c, &degenerate_bases(x, d))?;
    Ok(qs.iter().zip(&nb).map(|(q, b)| q.proj.mul(b)).collect())
}

/// π_n of the underlying simplicial set, computed as H_n(NX).
pub fn moore_pi(x: &AbPresheaf, n: usize) -> Result<FgAbGroup, DkError> {
    Ok(simplicial_n(x, n + 1)?.homology(n)?)
}

/// Monotone surjections [n] ↠ [i].
fn surjections(n: usize, i: usize) -> Vec<Vec<u32>> {
    monotone_maps(n, i, false).into_iter().filter(|m| m[0] == 0 && m[n] as usize == i && m.windows(2).all(|w| w[1] - w[0] <= 1)).collect()
}

struct GammaIndex {
    /// per degree n: (i, σ) in order, with offsets
    comps: Vec<Vec<(usize, Vec<u32>, usize)>>,
    at: Vec<HashMap<Vec<u32>, usize>>,
    ranks: Vec<usize>,
}

/// Γ(C)_n = ⊕_{[n] ↠ [i]} C_i.  For f: [m] → [n] and the summand of σ, write
/// σ∘f = μ∘τ; the summand goes to τ by id if μ = id, by d if μ = δ_0, else to 0.
pub fn simplicial_gamma(c: &ChainComplex, d: usize) -> AbPresheaf {
    let mut comps = Vec::with_capacity(d + 1);
    let mut at = Vec::with_capacity(d + 1);
    let mut ranks = Vec::with_capacity(d + 1);
    for n in 0..=d {
        let mut v = Vec::new();
        let mut h = HashMap::new();
        let mut off = 0;
        for i in 0..=n.min(c.top()) {
            for s in surjections(n, i) {
                h.insert(s.clone(), off);
                v.push((i, s, off));
                off += c.rank(i);
            }
        }
        comps.push(v);
        at.push(h);
        ranks.push(off);
    }
    let idx = Arc::new(GammaIndex { comps, at, ranks });
    let c = Arc::new(c.clone());
    let i1 = idx.clone();
    let base: CatRef = Arc::new(Delta::new(d));
    AbPresheaf::from_fns(
        base,
        "Gamma(C)",
        move |a| match a {
            Obj::Dim(n) => i1.ranks.get(*n).copied().unwrap_or(0),
            _ => 0,
        },
        move |f| {
            let (m, n) = (dix(&f.src), dix(&f.tgt));
            let fm = f.map();
            let mut out = IntMatrix::zeros(idx.ranks[m], idx.ranks[n]);
            for (i, s, off) in &idx.comps[n] {
                let g: Vec<u32> = fm.iter().map(|&x| s[x as usize]).collect();
                let mut image = g.clone();
                image.dedup();
                let tau: Vec<u32> = g.iter().map(|v| image.iter().position(|w| w == v).unwrap() as u32).collect();
                let j = image.len() - 1;
                let block = if j == *i {
                    IntMatrix::identity(c.rank(*i))
                } else if j + 1 == *i && image[0] == 1 {
                    c.d(*i)
                } else {
                    continue;
                };
                out.add_block(idx.at[m][&tau], *off, &block);
            }
            out
        },
    )
}

// ---------------------------------------------------------------- cubical

fn cubical_check(x: &AbPresheaf) -> Result<(), DkError> {
    check_base(x, "cube_c")
}

/// The unnormalized cubical complex: d = Σ (−1)^{i+ε} d_{i,ε}.
pub fn cubical_l(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    let name = x.base().name();
    if !name.starts_with("cube") {
        return Err(DkError::WrongBase { expected: "cube".into(), got: name });
    }
    let ranks = (0..=d).map(|k| x.rank(&dim(k))).collect();
    let diffs = (1..=d)
        .map(|n| {
            let faces = (1..=n).flat_map(|i| (0..2u32).map(move |e| (Cube::face(n, i, e), pm(i + e as usize))));
            signed_sum(x, x.rank(&dim(n - 1)), x.rank(&dim(n)), faces)
        })
        .collect();
    Ok(ChainComplex::truncated(ranks, diffs)?)
}

fn sigma_bases(x: &AbPresheaf, d: usize) -> Vec<IntMatrix> {
    (0..=d).map(|n| span(x.rank(&dim(n)), (1..=n).map(|i| x.act(&Cube::degeneracy(n - 1, i))))).collect()
}

fn gamma_bases(x: &AbPresheaf, d: usize) -> Vec<IntMatrix> {
    (0..=d).map(|n| span(x.rank(&dim(n)), (1..n).map(|i| x.act(&Cube::connection(n - 1, i, ConnKind::Max))))).collect()
}

fn sum_bases(a: &[IntMatrix], b: &[IntMatrix]) -> Vec<IntMatrix> {
    a.iter().zip(b).map(|(p, q)| column_hnf(&p.hstack(q))).collect()
}

/// N_□ᶜ X: N_n = ⋂_{(i,ε) ≠ (n,0)} ker d_{i,ε}, with its basis in X_n.
pub fn cubical_n_with_basis(x: &AbPresheaf, d: usize) -> Result<(ChainComplex, Vec<IntMatrix>), DkError> {
    cubical_check(x)?;
    let l = cubical_l(x, d)?;
    let mut bases = vec![IntMatrix::identity(l.rank(0))];
    for n in 1..=d {
        let mut m = IntMatrix::zeros(0, l.rank(n));
        for i in 1..=n {
            for e in 0..2u32 {
                if (i, e) != (n, 0) {
                    m = m.vstack(&x.act(&Cube::face(n, i, e)));
                }
            }
        }
        bases.push(kernel_basis(&m));
    }
    Ok((subcomplex(&l, &bases)?, bases))
}

pub fn cubical_n(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    Ok(cubical_n_with_basis(x, d)?.0)
}

pub fn cubical_dsigma(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    subcomplex(&cubical_l(x, d)?, &sigma_bases(x, d))
}

pub fn cubical_dgamma(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    cubical_check(x)?;
    subcomplex(&cubical_l(x, d)?, &gamma_bases(x, d))
}

/// L_□!(X)/D_σ, or L_□ᶜ!(X)/(D_σ + D_γ) when `connections` is set.
pub fn cubical_cn(x: &AbPresheaf, d: usize, connections: bool) -> Result<ChainComplex, DkError> {
    let l = cubical_l(x, d)?;
    let b = if connections {
        cubical_check(x)?;
        sum_bases(&sigma_bases(x, d), &gamma_bases(x, d))
    } else {
        sigma_bases(x, d)
    };
    Ok(quotient_complex(&l, &b)?.0)
}

/// Per degree: rank X_n, rank N_n, rank D_σ, rank D_γ, rank (D_σ + D_γ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrownHigginsRanks {
    pub total: usize,
    pub normalized: usize,
    pub sigma: usize,
    pub gamma: usize,
    pub degenerate: usize,
}

impl BrownHigginsRanks {
    /// X_n = N_n ⊕ (D_σ + D_γ) at the level of ranks.
    pub fn decomposes(&self) -> bool {
        self.total == self.normalized + self.degenerate
    }

    /// D_σ ∩ D_γ = 0.
    pub fn direct(&self) -> bool {
        self.degenerate == self.sigma + self.gamma
    }
}

pub fn brown_higgins_ranks(x: &AbPresheaf, d: usize) -> Result<Vec<BrownHigginsRanks>, DkError> {
    let (_, nb) = cubical_n_with_basis(x, d)?;
    let (s, g) = (sigma_bases(x, d), gamma_bases(x, d));
    let sg = sum_bases(&s, &g);
    Ok((0..=d)
        .map(|n| BrownHigginsRanks { total: x.rank(&dim(n)), normalized: nb[n].cols(), sigma: s[n].cols(), gamma: g[n].cols(), degenerate: sg[n].cols() })
        .collect())
}

/// The reversal automorphism of □ᶜ (coordinate i ↦ n+1−i) applied to X;
/// it exchanges the (n,0) and (1,0) conventions for N.
pub fn cubical_reverse(x: &AbPresheaf) -> AbPresheaf {
    let x1 = x.clone();
    let x2 = x.clone();
    AbPresheaf::from_fns(x.base().clone(), &format!("rev({})", x.name()), move |a| x1.rank(a), move |f| x2.act(&reverse_cube_map(f)))
}

fn reverse_bits(v: u32, k: usize) -> u32 {
    (0..k).fold(0, |acc, b| acc | (((v >> b) & 1) << (k - 1 - b)))
}

fn reverse_cube_map(f: &Mor) -> Mor {
    let (m, n) = (dix(&f.src), dix(&f.tgt));
    let t = f.map();
    let table: Vec<u32> = (0..(1u32 << m)).map(|x| reverse_bits(t[reverse_bits(x, m) as usize], n)).collect();
    Mor::new(dim(m), dim(n), Arrow::Map(table))
}

// ---------------------------------------------------------------- globular

fn globe_check(x: &AbPresheaf) -> Result<(), DkError> {
    check_base(x, "globe_ref")
}

fn kappa_bases(x: &AbPresheaf, d: usize) -> Vec<IntMatrix> {
    (0..=d).map(|n| if n == 0 { IntMatrix::zeros(x.rank(&dim(0)), 0) } else { column_hnf(&x.act(&Globe::kappa(n - 1))) }).collect()
}

/// X_0 ← X_1 ← ⋯ with d = t − s, without dividing by identities.  Not a
/// homology complex for reflexive globes.
pub fn globular_unnormalized(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    let name = x.base().name();
    if !name.starts_with("globe") {
        return Err(DkError::WrongBase { expected: "globe".into(), got: name });
    }
    let ranks = (0..=d).map(|k| x.rank(&dim(k))).collect();
    let diffs = (1..=d).map(|n| x.act(&Globe::tau(n)).sub(&x.act(&Globe::sigma(n)))).collect();
    Ok(ChainComplex::truncated(ranks, diffs)?)
}

/// B(X)_n = X_n / k(X_{n−1}) with d = t − s.
pub fn bourn_b(x: &AbPresheaf, d: usize) -> Result<ChainComplex, DkError> {
    globe_check(x)?;
    Ok(quotient_complex(&globular_unnormalized(x, d)?, &kappa_bases(x, d))?.0)
}

/// B⁻¹(C)_n = C_n ⊕ ⋯ ⊕ C_0; s drops C_n, t drops C_n after adding d(c_n),
/// k inserts a zero C_{n+1} component.
pub fn bourn_binv(c: &ChainComplex, d: usize) -> Result<AbPresheaf, DkError> {
    let r = |k: usize| if k <= c.top() { c.rank(k) } else { 0 };
    let tot: Vec<usize> = (0..=d).map(|n| (0..=n).map(r).sum()).collect();
    let base: CatRef = Arc::new(Globe::new(d, true));
    let mut ranks = HashMap::new();
    let mut gens = HashMap::new();
    for n in 0..=d {
        ranks.insert(dim(n), tot[n]);
        if n >= 1 {
            let mut s = IntMatrix::zeros(tot[n - 1], tot[n]);
            s.paste(0, r(n), &IntMatrix::identity(tot[n - 1]));
            let mut t = s.clone();
            if n <= c.top() {
                t.add_block(0, 0, &c.d(n));
            }
            gens.insert(Globe::sigma(n), s);
            gens.insert(Globe::tau(n), t);
        }
        if n < d {
            let mut k = IntMatrix::zeros(tot[n + 1], tot[n]);
            k.paste(r(n + 1), 0, &IntMatrix::identity(tot[n]));
            gens.insert(Globe::kappa(n), k);
        }
    }
    Ok(AbPresheaf::from_generators(base, "Binv(C)", ranks, gens, d)?)
}

/// The unit X → B⁻¹(B X): x ∈ X_n goes to (π_n x, π_{n−1} s x, …, π_0 s^n x).
/// Returns its components in degrees 0..=d, in the basis of `bourn_binv`.
pub fn bourn_unit(x: &AbPresheaf, d: usize) -> Result<Vec<IntMatrix>, DkError> {
    globe_check(x)?;
    let (_, qs) = quotient_complex(&globular_unnormalized(x, d)?, &kappa_bases(x, d))?;
    let mut out = Vec::with_capacity(d + 1);
    for n in 0..=d {
        let mut blocks = IntMatrix::zeros(0, x.rank(&dim(n)));
        // s^{n−k}: X_n → X_k
        let mut s = IntMatrix::identity(x.rank(&dim(n)));
        for k in (0..=n).rev() {
            blocks = blocks.vstack(&qs[k].proj.mul(&s));
            if k > 0 {
                s = x.act(&Globe::sigma(k)).mul(&s);
            }
        }
        out.push(blocks);
    }
    Ok(out)
}

/// Checks that `bourn_unit` is an isomorphism of presheaves through degree d.
pub fn bourn_unit_check(x: &AbPresheaf, d: usize) -> Result<bool, DkError> {
    let phi = bourn_unit(x, d)?;
    let y = bourn_binv(&bourn_b(x, d)?, d)?;
    let mut ok = phi.iter().all(|m| m.is_unimodular());
    for n in 1..=d {
        for f in [Globe::sigma(n), Globe::tau(n)] {
            ok &= y.act(&f).mul(&phi[n]) == phi[n - 1].mul(&x.act(&f));
        }
        let k = Globe::kappa(n - 1);
        ok &= y.act(&k).mul(&phi[n - 1]) == phi[n].mul(&x.act(&k));
    }
    Ok(ok)
}

/// The graph of 1-cells modulo 2-cells, restricted to a window of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub cycle_rank: usize,
    pub b_exact: bool,
}

impl WhiteheadGraph {
    pub fn to_json(&self) -> Value {
        json!({ "vertices": self.vertices, "edges": self.edges, "components": self.components, "cycle_rank": self.cycle_rank, "b_exact": self.b_exact })
    }
}

fn lattice_points(rank: usize, r: i64) -> Result<Vec<Vec<i64>>, DkError> {
    let side = (2 * r + 1) as u128;
    let count = side.checked_pow(rank as u32).unwrap_or(u128::MAX);
    if count > 2_000_000 {
        return Err(DkError::WindowTooLarge(count));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![-r; rank];
    loop {
        out.push(cur.clone());
        let mut k = 0;
        loop {
            if k == rank {
                return Ok(out);
            }
            if cur[k] < r {
                cur[k] += 1;
                break;
            }
            cur[k] = -r;
            k += 1;
        }
    }
}

fn apply(m: &IntMatrix, v: &[i64]) -> Vec<i64> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get_i64(i, j).unwrap() * v[j]).sum()).collect()
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let nx = p[y];
        p[y] = r;
        y = nx;
    }
    r
}

/// Vertices are the points of X_0 with coordinates in [−n, n].  Candidate
/// 1-cells and 2-cells range over coordinates in [−2n, 2n]; a 1-cell is an
/// edge when it is not an identity k(v) and both ends lie in the vertex
/// window.  Edges joined by a 2-cell (x = s u, y = t u) are identified, and
/// classes meeting an identity are dropped.  A positive cycle rank of this
/// finite subgraph is a nontrivial loop in the full graph.
pub fn whitehead_graph_check(x: &AbPresheaf, n: i64, d: usize) -> Result<WhiteheadGraph, DkError> {
    globe_check(x)?;
    let d = d.max(2);
    let (s1, t1, k0) = (x.act(&Globe::sigma(1)), x.act(&Globe::tau(1)), x.act(&Globe::kappa(0)));
    let (s2, t2) = (x.act(&Globe::sigma(2)), x.act(&Globe::tau(2)));
    let verts = lattice_points(x.rank(&dim(0)), n)?;
    let vidx: HashMap<Vec<i64>, usize> = verts.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let mut cells: Vec<(Vec<i64>, usize, usize, bool)> = Vec::new();
    for e in lattice_points(x.rank(&dim(1)), 2 * n)? {
        let (s, t) = (apply(&s1, &e), apply(&t1, &e));
        if let (Some(&a), Some(&b)) = (vidx.get(&s), vidx.get(&t)) {
            let identity = apply(&k0, &s) == e;
            cells.push((e, a, b, identity));
        }
    }
    let cidx: HashMap<Vec<i64>, usize> = cells.iter().enumerate().map(|(i, c)| (c.0.clone(), i)).collect();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    for u in lattice_points(x.rank(&dim(2)), 2 * n)? {
        if let (Some(&a), Some(&b)) = (cidx.get(&apply(&s2, &u)), cidx.get(&apply(&t2, &u))) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut degenerate = vec![false; cells.len()];
    for i in 0..cells.len() {
        if cells[i].3 {
            let r = find(&mut parent, i);
            degenerate[r] = true;
        }
    }
    let mut vparent: Vec<usize> = (0..verts.len()).collect();
    let mut edges = 0;
    for i in 0..cells.len() {
        if find(&mut parent, i) == i && !degenerate[i] {
            edges += 1;
            let (ra, rb) = (find(&mut vparent, cells[i].1), find(&mut vparent, cells[i].2));
            vparent[ra] = rb;
        }
    }
    let components = (0..verts.len()).filter(|&v| find(&mut vparent, v) == v).count();
    let b = bourn_b(x, d)?;
    let b_exact = b.homology_through(d - 1)?.iter().all(|g| g.is_zero());
    Ok(WhiteheadGraph { vertices: verts.len(), edges, components, cycle_rank: edges + components - verts.len(), b_exact })
}

// ---------------------------------------------------------------- Eilenberg–Zilber

#[derive(Clone, Debug)]
pub struct EzReport {
    pub total: Vec<FgAbGroup>,
    pub diagonal: Vec<FgAbGroup>,
}

impl EzReport {
    pub fn agree(&self) -> bool {
        self.total == self.diagonal
    }

    pub fn to_json(&self) -> Value {
        let g = |v: &[FgAbGroup]| v.iter().map(|x| x.to_json()).collect::<Vec<_>>();
        json!({ "tot": g(&self.total), "diagonal": g(&self.diagonal), "agree": self.agree() })
    }
}

fn pair(p: usize, q: usize) -> Obj {
    Obj::Tuple(vec![dim(p), dim(q)])
}

fn id_delta(n: usize) -> Mor {
    Delta::map(n, n, (0..=n as u32).collect())
}

/// H(Tot of the doubly normalized complex of X) against H(C_N diag* X) in
/// degrees < d, for X a bisimplicial abelian group.
pub fn eilenberg_zilber_check(x: &AbPresheaf, d: usize) -> Result<EzReport, DkError> {
    check_base(x, "prod:delta,delta")?;
    let h = |f: Mor, q: usize| Product::tuple(vec![f, id_delta(q)]);
    let v = |p: usize, g: Mor| Product::tuple(vec![id_delta(p), g]);
    let mut qs: Vec<Vec<Quotient>> = Vec::with_capacity(d + 1);
    for p in 0..=d {
        let mut row = Vec::with_capacity(d + 1);
        for q in 0..=d {
            let r = x.rank(&pair(p, q));
            let degs = (0..p).map(|j| x.act(&h(Delta::degeneracy(p - 1, j), q))).chain((0..q).map(|j| x.act(&v(p, Delta::degeneracy(q - 1, j)))));
            let b = span(r, degs);
            row.push(quotient(r, &b).map_err(|_| DkError::NotSaturated(p + q))?);
        }
        qs.push(row);
    }
    let ranks: Vec<Vec<usize>> = qs.iter().map(|row| row.iter().map(|q| q.proj.rows()).collect()).collect();
    let dh = |p: usize, q: usize| {
        let m = signed_sum(x, x.rank(&pair(p - 1, q)), x.rank(&pair(p, q)), (0..=p).map(|i| (h(Delta::face(p, i), q), pm(i))));
        qs[p - 1][q].proj.mul(&m).mul(&qs[p][q].sect)
    };
    let dv = |p: usize, q: usize| {
        let m = signed_sum(x, x.rank(&pair(p, q - 1)), x.rank(&pair(p, q)), (0..=q).map(|j| (v(p, Delta::face(q, j)), pm(j))));
        qs[p][q - 1].proj.mul(&m).mul(&qs[p][q].sect)
    };
    let dc = DoubleComplex::new(ranks, dh, dv, true)?;
    let tot = total_complex(&dc)?;
    let through = d.saturating_sub(1);
    let total = tot.homology_through(through)?;
    let delta: CatRef = Arc::new(Delta::new(d));
    let diag = restrict(x, Arc::new(Diagonal::new(delta, x.base().clone(), 2)))?;
    let diagonal = simplicial_cn(&diag, d)?.homology_through(through)?;
    Ok(EzReport { total, diagonal })
}

// ---------------------------------------------------------------- random inputs

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random unimodular n × n matrix with small entries.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u = u.neg();
        }
        return u;
    }
    for _ in 0..n + 1 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut e = IntMatrix::identity(n);
        e.set_i64(i, j, rng.gen_range(-2..=2));
        u = e.mul(&u);
    }
    u
}

/// A random bounded free complex in degrees 0..=top with ranks ≤ max_rank:
/// a sum of spheres ℤ[n] and discs ℤ ←k ℤ, in a random basis.
pub fn random_complex(rng: &mut ChaCha8Rng, top: usize, max_rank: usize) -> ChainComplex {
    let mut ranks = vec![0usize; top + 1];
    // discs[n] lists (row in n−1, col in n, k)
    let mut discs: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); top + 1];
    for n in (0..=top).rev() {
        while ranks[n] < max_rank && rng.gen_bool(0.6) {
            if n >= 1 && ranks[n - 1] < max_rank && rng.gen_bool(0.6) {
                let k = [1, 1, 2, 3, -1][rng.gen_range(0..5)];
                discs[n].push((ranks[n - 1], ranks[n], k));
                ranks[n - 1] += 1;
            }
            ranks[n] += 1;
        }
    }
    let us: Vec<IntMatrix> = ranks.iter().map(|&r| random_unimodular(rng, r)).collect();
    let diffs = (1..=top)
        .map(|n| {
            let mut m = IntMatrix::zeros(ranks[n - 1], ranks[n]);
            for &(r, c, k) in &discs[n] {
                m.set_i64(r, c, k);
            }
            us[n - 1].mul(&m).mul(&inverse_unimodular(&us[n]))
        })
        .collect();
    ChainComplex::new(ranks, diffs).expect("discs square to zero")
}

fn random_poset(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
        for j in i + 1..n {
            leq[i][j] = rng.gen_bool(0.5);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    leq
}

/// A random simplicial abelian group on Δ truncated at d: Γ of a random
/// complex, plus the free abelian group on a random subcomplex of Δ_2.
pub fn random_simplicial_group(rng: &mut ChaCha8Rng, d: usize) -> AbPresheaf {
    let c = random_complex(rng, d.min(3), 2);
    let mut x = simplicial_gamma(&c, d);
    if rng.gen_bool(0.7) {
        let base = x.base().clone();
        let rep: SetRef = Arc::new(RepresentableSet::new(base.clone(), dim(2)));
        let mut gens = Vec::new();
        for k in 0..=2usize {
            for u in 0..base.hom(&dim(k), &dim(2)).len() {
                if rng.gen_bool(0.2) {
                    gens.push((dim(k), u));
                }
            }
        }
        if !gens.is_empty() {
            let sub: SetRef = Arc::new(SubSet::new(rep, gens, "random"));
            x = x.direct_sum(&free_abelianization(sub)).expect("same base");
        }
    }
    x
}

/// A random cubical abelian group with connections: the free abelian group on
/// the cubical nerve of a random poset, sometimes plus a representable.
pub fn random_cubical_group(rng: &mut ChaCha8Rng, d: usize) -> AbPresheaf {
    let base: CatRef = Arc::new(Cube::new(d, Some(ConnKind::Max)));
    let n = rng.gen_range(2..=3);
    let nerve: SetRef = Arc::new(PosetNerve::new(base.clone(), random_poset(rng, n), true));
    let x = free_abelianization(nerve);
    if rng.gen_bool(0.5) {
        x.direct_sum(&representable(base, &dim(1))).expect("same base")
    } else {
        x
    }
}

/// A random reflexive globular abelian group: B⁻¹ of a random complex, plus
/// sometimes a representable, seen through random bases of each X_n.
pub fn random_globular_group(rng: &mut ChaCha8Rng, d: usize) -> AbPresheaf {
    let mut x = bourn_binv(&random_complex(rng, d.min(3), 2), d).expect("B⁻¹ is valid");
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(0..=d.min(2));
        x = x.direct_sum(&representable(x.base().clone(), &dim(k))).expect("same base");
    }
    let us: Vec<(IntMatrix, IntMatrix)> = (0..=d)
        .map(|n| {
            let u = random_unimodular(rng, x.rank(&dim(n)));
            let v = inverse_unimodular(&u);
            (u, v)
        })
        .collect();
    let us = Arc::new(us);
    let (x1, x2) = (x.clone(), x.clone());
    AbPresheaf::from_fns(x.base().clone(), "random", move |a| x1.rank(a), move |f| {
        let (m, n) = (dix(&f.src), dix(&f.tgt));
        us[m].0.mul(&x2.act(f)).mul(&us[n].1)
    })
}

/// The external product (p, q) ↦ A_p ⊗ B_q.
pub fn external_product(a: &AbPresheaf, b: &AbPresheaf, d: usize) -> AbPresheaf {
    let delta: CatRef = Arc::new(Delta::new(d));
    let base: CatRef = Arc::new(Product::new(vec![delta.clone(), delta], 2 * d));
    let (a1, b1, a2, b2) = (a.clone(), b.clone(), a.clone(), b.clone());
    let split = |o: &Obj| match o {
        Obj::Tuple(v) => (v[0].clone(), v[1].clone()),
        _ => panic!("expected a pair of simplices"),
    };
    AbPresheaf::from_fns(
        base,
        &format!("{}⊠{}", a.name(), b.name()),
        move |o| {
            let (p, q) = split(o);
            a1.rank(&p) * b1.rank(&q)
        },
        move |f| {
            let parts = Product::mcomps(f);
            a2.act(&parts[0]).kron(&b2.act(&parts[1]))
        },
    )
}

/// A random bisimplicial abelian group: a sum of external products of small
/// random simplicial groups.
pub fn random_bisimplicial_group(rng: &mut ChaCha8Rng, d: usize) -> AbPresheaf {
    let small = |rng: &mut ChaCha8Rng| simplicial_gamma(&random_complex(rng, 2, 1), d);
    let x = external_product(&small(rng), &small(rng), d);
    let y = external_product(&small(rng), &small(rng), d);
    x.direct_sum(&y).expect("same base")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{normalized_integrator, standard_integrator, NormalizedKind};
    use crate::presheaf::constant_z;

    fn delta(d: usize) -> CatRef {
        Arc::new(Delta::new(d))
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn simplicial_examples() {
        let d = delta(4);
        let w1 = representable(d.clone(), &dim(1));
        let c = simplicial_c(&w1, 4).unwrap();
        assert_eq!(c.ranks(), &[2, 3, 4, 5, 6]);
        assert!(c.is_point(3).unwrap());
        let l = standard_integrator(d.clone(), 4).unwrap();
        assert_eq!(c, l.evaluate(&w1).unwrap());
        for n in 0..=3 {
            let cn = simplicial_cn(&representable(d.clone(), &dim(n)), 4).unwrap();
            let want: Vec<usize> = (0..=4).map(|k| binom(n + 1, k + 1)).collect();
            assert_eq!(cn.ranks(), &want[..]);
        }
        let z = constant_z(d.clone());
        assert_eq!(simplicial_cn(&z, 4).unwrap().ranks(), &[1, 0, 0, 0, 0]);
        assert_eq!(simplicial_n(&z, 4).unwrap().ranks(), &[1, 0, 0, 0, 0]);
        let zero = AbPresheaf::zero(d.clone());
        assert!(simplicial_c(&zero, 3).unwrap().ranks().iter().all(|&r| r == 0));
        assert!(simplicial_c(&constant_z(Arc::new(Globe::new(2, true))), 2).is_err());
        // C_N of representables is the normalized integrator
        let cd = normalized_integrator(NormalizedKind::Simplicial, 4).unwrap();
        for n in 0..=3 {
            assert_eq!(simplicial_cn(&representable(d.clone(), &dim(n)), 4).unwrap(), cd.complex_at(&dim(n)).unwrap());
        }
    }

    #[test]
    fn gamma_examples() {
        let g0 = simplicial_gamma(&ChainComplex::point(), 4);
        g0.validate(4).unwrap();
        assert!((0..=4).all(|n| g0.rank(&dim(n)) == 1));
        let g1 = simplicial_gamma(&ChainComplex::concentrated(1, 1), 4);
        g1.validate(4).unwrap();
        assert_eq!(g1.rank(&dim(2)), 2);
        assert_eq!(simplicial_n(&g1, 4).unwrap().ranks()[..2], [0, 1]);
        assert_eq!(moore_pi(&g1, 1).unwrap(), FgAbGroup::free(1));
        assert!(moore_pi(&g1, 0).unwrap().is_zero());
        let g = simplicial_gamma(&ChainComplex::zero(), 3);
        assert_eq!(g.rank(&dim(3)), 0);
    }

    #[test]
    fn roundtrip_and_normalization_on_random_inputs() {
        let mut rng = seeded(7);
        for _ in 0..6 {
            let c = random_complex(&mut rng, 3, 3);
            let g = simplicial_gamma(&c, 4);
            g.validate(4).unwrap();
            let n = simplicial_n(&g, 4).unwrap();
            assert_eq!(&n.ranks()[..=3], c.ranks());
            for k in 1..=3 {
                assert_eq!(n.d(k), c.d(k));
            }
        }
        for _ in 0..4 {
            let x = random_simplicial_group(&mut rng, 4);
            x.validate(4).unwrap();
            let c = simplicial_c(&x, 4).unwrap();
            for (k, m) in simplicial_n_to_cn(&x, 4).unwrap().iter().enumerate() {
                assert!(m.is_unimodular(), "N → C_N not invertible in degree {k}");
            }
            assert_eq!(c.homology_through(3).unwrap(), simplicial_cn(&x, 4).unwrap().homology_through(3).unwrap());
            assert!(simplicial_d(&x, 4).unwrap().homology_through(3).unwrap().iter().all(|g| g.is_zero()));
        }
    }

    #[test]
    fn cubical_decomposition() {
        let base: CatRef = Arc::new(Cube::new(3, Some(ConnKind::Max)));
        let z = constant_z(base.clone());
        assert_eq!(cubical_n(&z, 3).unwrap().ranks(), &[1, 0, 0, 0]);
        let w = representable(base.clone(), &dim(1));
        let bh = brown_higgins_ranks(&w, 3).unwrap();
        assert!(bh.iter().all(|r| r.decomposes()), "{bh:?}");
        let mut rng = seeded(11);
        for _ in 0..3 {
            let x = random_cubical_group(&mut rng, 3);
            x.validate(3).unwrap();
            assert!(brown_higgins_ranks(&x, 3).unwrap().iter().all(|r| r.decomposes()));
            cubical_dsigma(&x, 3).unwrap();
            cubical_dgamma(&x, 3).unwrap();
            let a = cubical_cn(&x, 3, true).unwrap().homology_through(2).unwrap();
            let b = cubical_cn(&x, 3, false).unwrap().homology_through(2).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, cubical_n(&x, 3).unwrap().homology_through(2).unwrap());
        }
        // reversal exchanges the conventions but keeps ranks
        let r = cubical_reverse(&w);
        r.validate(3).unwrap();
        assert_eq!(cubical_n(&r, 3).unwrap().ranks(), cubical_n(&w, 3).unwrap().ranks());
    }

    #[test]
    fn bourn_correspondence() {
        let x = bourn_binv(&ChainComplex::point(), 4).unwrap();
        assert!((0..=4).all(|n| x.rank(&dim(n)) == 1));
        assert_eq!(bourn_b(&x, 4).unwrap().ranks(), &[1, 0, 0, 0, 0]);
        // the negative control: t − s = 0 on constant ℤ
        let z = constant_z(Arc::new(Globe::new(4, true)));
        let raw = globular_unnormalized(&z, 4).unwrap();
        assert!(raw.homology_through(3).unwrap().iter().all(|g| g.is_z()));
        assert!(bourn_b(&z, 4).unwrap().is_point(3).unwrap());
        let mut rng = seeded(3);
        for _ in 0..6 {
            let c = random_complex(&mut rng, 3, 3);
            let x = bourn_binv(&c, 4).unwrap();
            let b = bourn_b(&x, 4).unwrap();
            assert_eq!(&b.ranks()[..=3], c.ranks());
            for k in 1..=3 {
                assert_eq!(b.d(k), c.d(k));
            }
        }
        // the unit X ≅ B⁻¹B X on presheaves that are not in B⁻¹ form
        for n in 0..=2 {
            assert!(bourn_unit_check(&representable(Arc::new(Globe::new(4, true)), &dim(n)), 4).unwrap());
        }
        assert!(bourn_unit_check(&z, 4).unwrap());
        for _ in 0..4 {
            let x = random_globular_group(&mut rng, 4);
            x.validate(4).unwrap();
            assert!(bourn_unit_check(&x, 4).unwrap());
        }
        let g = normalized_integrator(NormalizedKind::GlobularReflexive, 4).unwrap();
        for n in 0..=3 {
            let w = representable(g.base().clone(), &dim(n));
            let b = bourn_b(&w, 4).unwrap();
            assert_eq!(b, g.complex_at(&dim(n)).unwrap());
            assert!(b.is_point(3).unwrap());
        }
    }

    #[test]
    fn whitehead_graph() {
        let c = ChainComplex::new(vec![1, 1], vec![IntMatrix::identity(1)]).unwrap();
        let x = bourn_binv(&c, 3).unwrap();
        // X_1 = ℤ², s = pr, t = pr + d
        assert_eq!(x.act(&Globe::sigma(1)), IntMatrix::from_rows(&[vec![0, 1]]));
        assert_eq!(x.act(&Globe::tau(1)), IntMatrix::from_rows(&[vec![1, 1]]));
        let w = whitehead_graph_check(&x, 2, 3).unwrap();
        assert_eq!((w.vertices, w.edges, w.cycle_rank), (5, 20, 16));
        assert!(w.b_exact);
        let w = whitehead_graph_check(&x, 0, 3).unwrap();
        assert_eq!(w.cycle_rank, 0);
        let z = constant_z(Arc::new(Globe::new(3, true)));
        let w = whitehead_graph_check(&z, 2, 3).unwrap();
        assert_eq!((w.edges, w.cycle_rank), (0, 0));
    }

    #[test]
    fn eilenberg_zilber() {
        let d = 3;
        let delta: CatRef = Arc::new(Delta::new(d));
        let w1 = representable(delta.clone(), &dim(1));
        let x = external_product(&w1, &w1, d);
        let r = eilenberg_zilber_check(&x, d).unwrap();
        assert!(r.agree() && r.total[0].is_z() && r.total[1..].iter().all(|g| g.is_zero()), "{}", r.to_json());
        let z = external_product(&constant_z(delta.clone()), &constant_z(delta.clone()), d);
        assert!(eilenberg_zilber_check(&z, d).unwrap().agree());
        let mut rng = seeded(5);
        for _ in 0..3 {
            let x = random_bisimplicial_group(&mut rng, d);
            let r = eilenberg_zilber_check(&x, d).unwrap();
            assert!(r.agree(), "{}", r.to_json());
        }
    }
}
