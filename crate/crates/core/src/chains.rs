//! Non-negatively graded chain complexes of free abelian groups.
//!
//! A complex is either *bounded* (zero above its top degree, so homology is
//! defined in every degree) or *truncated* at its top degree D, in which case
//! the group in degree D+1 is unknown and homology is only reported through
//! degree D−1.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{self, kernel_basis, FgAbGroup, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("not a complex: d_{degree} d_{} is nonzero at ({row},{col}), value {value}", degree + 1)]
    NotAComplex { degree: usize, row: usize, col: usize, value: BigInt },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degree {degree} out of range (homology valid through degree {valid_through:?})")]
    DegreeOutOfRange { degree: usize, valid_through: Option<usize> },
    #[error("malformed input: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
    truncated: bool,
}

fn check_d2(a: &IntMatrix, b: &IntMatrix, degree: usize) -> Result<(), ChainError> {
    let p = a.mul(b);
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            let v = p.get(i, j);
            if v != BigInt::from(0) {
                return Err(ChainError::NotAComplex { degree, row: i, col: j, value: v });
            }
        }
    }
    Ok(())
}

impl ChainComplex {
    fn build(ranks: Vec<usize>, diffs: Vec<IntMatrix>, truncated: bool) -> Result<Self, ChainError> {
        if ranks.is_empty() {
            return Err(ChainError::ShapeMismatch("a complex needs at least degree 0".into()));
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(ChainError::ShapeMismatch(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            let n = k + 1;
            if d.shape() != (ranks[n - 1], ranks[n]) {
                return Err(ChainError::ShapeMismatch(format!(
                    "d_{n} has shape {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    ranks[n - 1],
                    ranks[n]
                )));
            }
        }
        for n in 1..diffs.len() {
            check_d2(&diffs[n - 1], &diffs[n], n)?;
        }
        Ok(ChainComplex { ranks, diffs, truncated })
    }

    /// A bounded complex: zero above the last degree given.
    pub fn new(ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self, ChainError> {
        Self::build(ranks, diffs, false)
    }

    /// A complex known only through degree `ranks.len() - 1`.
    pub fn truncated(ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self, ChainError> {
        Self::build(ranks, diffs, true)
    }

    /// ℤ^r concentrated in one degree.
    pub fn concentrated(rank: usize, degree: usize) -> Self {
        let mut ranks = vec![0; degree + 1];
        ranks[degree] = rank;
        let diffs = (1..=degree).map(|n| IntMatrix::zeros(ranks[n - 1], ranks[n])).collect();
        ChainComplex { ranks, diffs, truncated: false }
    }

    /// ℤ[0].
    pub fn point() -> Self {
        Self::concentrated(1, 0)
    }

    pub fn zero() -> Self {
        Self::concentrated(0, 0)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Highest degree stored.
    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    /// The differential d_n: C_n → C_{n−1}; zero outside the stored range.
    pub fn d(&self, n: usize) -> IntMatrix {
        if n == 0 {
            return IntMatrix::zeros(0, self.rank(0));
        }
        match self.diffs.get(n - 1) {
            Some(m) => m.clone(),
            None => IntMatrix::zeros(self.rank(n - 1), self.rank(n)),
        }
    }

    pub fn diffs(&self) -> &[IntMatrix] {
        &self.diffs
    }

    /// Last degree with trustworthy homology; `None` for bounded complexes.
    pub fn valid_through(&self) -> Option<usize> {
        if self.truncated {
            self.top().checked_sub(1)
        } else {
            None
        }
    }

    pub fn degree_valid(&self, n: usize) -> bool {
        match self.valid_through() {
            None => !self.truncated,
            Some(v) => n <= v,
        }
    }

    pub fn homology(&self, n: usize) -> Result<FgAbGroup, ChainError> {
        if self.truncated && !self.degree_valid(n) {
            return Err(ChainError::DegreeOutOfRange { degree: n, valid_through: self.valid_through() });
        }
        if n > self.top() {
            return Ok(FgAbGroup::zero());
        }
        let dn = self.d(n);
        let dn1 = self.d(n + 1);
        intlinalg::homology_group(&dn, &dn1).map_err(|e| ChainError::ShapeMismatch(e.to_string()))
    }

    /// Homology in degrees 0..=through (clipped to the validity window).
    pub fn homology_through(&self, through: usize) -> Result<Vec<FgAbGroup>, ChainError> {
        (0..=through).map(|n| self.homology(n)).collect()
    }

    /// All homology groups that the complex determines.
    pub fn homology_all(&self) -> Vec<FgAbGroup> {
        let last = match self.valid_through() {
            Some(v) => v as isize,
            None if self.truncated => -1,
            None => self.top() as isize,
        };
        (0..=last).map(|n| self.homology(n as usize).expect("degree in range")).collect()
    }

    pub fn is_point(&self, through: usize) -> Result<bool, ChainError> {
        let h = self.homology_through(through)?;
        Ok(h.iter().enumerate().all(|(n, g)| if n == 0 { g.is_z() } else { g.is_zero() }))
    }

    /// Re-truncates at degree `top` (keeping only degrees ≤ top).
    pub fn truncate(&self, top: usize) -> ChainComplex {
        let top = top.min(self.top());
        ChainComplex {
            ranks: self.ranks[..=top].to_vec(),
            diffs: self.diffs[..top].to_vec(),
            truncated: self.truncated || top < self.top(),
        }
    }

    /// Declares the complex bounded (zero above its top degree).
    pub fn bounded(mut self) -> ChainComplex {
        self.truncated = false;
        self
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let top = common_top(self, other);
        let ranks: Vec<usize> = (0..=top).map(|n| self.rank(n) + other.rank(n)).collect();
        let diffs = (1..=top).map(|n| IntMatrix::block_diag(&[self.d(n), other.d(n)])).collect();
        ChainComplex { ranks, diffs, truncated: self.truncated || other.truncated }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let diffs: Vec<Vec<JsonInt>> = self.diffs.iter().map(|d| d.to_big_vec().into_iter().map(JsonInt::from).collect()).collect();
        serde_json::json!({ "ranks": self.ranks, "diffs": diffs })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ChainError> {
        let raw: RawComplex = serde_json::from_value(v.clone()).map_err(|e| ChainError::Malformed(e.to_string()))?;
        if raw.diffs.len() + 1 != raw.ranks.len() {
            return Err(ChainError::ShapeMismatch(format!("{} ranks but {} differentials", raw.ranks.len(), raw.diffs.len())));
        }
        let mut diffs = Vec::new();
        for (k, entries) in raw.diffs.into_iter().enumerate() {
            let (r, c) = (raw.ranks[k], raw.ranks[k + 1]);
            if entries.len() != r * c {
                return Err(ChainError::ShapeMismatch(format!("d_{} has {} entries, expected {}", k + 1, entries.len(), r * c)));
            }
            let vals = entries.into_iter().map(|e| e.to_big()).collect::<Result<Vec<_>, _>>()?;
            diffs.push(IntMatrix::from_big(r, c, vals));
        }
        ChainComplex::new(raw.ranks, diffs)
    }
}

fn common_top(a: &ChainComplex, b: &ChainComplex) -> usize {
    match (a.truncated, b.truncated) {
        (true, true) => a.top().min(b.top()),
        (true, false) => a.top(),
        (false, true) => b.top(),
        (false, false) => a.top().max(b.top()),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum JsonInt {
    Num(i64),
    Str(String),
}

impl From<BigInt> for JsonInt {
    fn from(x: BigInt) -> Self {
        match i64::try_from(&x) {
            Ok(v) => JsonInt::Num(v),
            Err(_) => JsonInt::Str(x.to_string()),
        }
    }
}

impl JsonInt {
    pub fn to_big(&self) -> Result<BigInt, ChainError> {
        match self {
            JsonInt::Num(v) => Ok(BigInt::from(*v)),
            JsonInt::Str(s) => s.parse().map_err(|_| ChainError::Malformed(format!("not an integer: {s}"))),
        }
    }
}

#[derive(Deserialize)]
struct RawComplex {
    ranks: Vec<usize>,
    #[serde(default)]
    diffs: Vec<Vec<JsonInt>>,
}

/// Tensor product with the Koszul sign d(x⊗y) = dx⊗y + (−1)^i x⊗dy.
///
/// Degree n is ⊕_{i+j=n} C_i ⊗ D_j, blocks ordered by increasing i, each
/// block in Kronecker order.  The result is truncated at the smallest top
/// degree among truncated factors.
pub fn tensor(c: &ChainComplex, d: &ChainComplex) -> ChainComplex {
    let top = match (c.truncated, d.truncated) {
        (true, true) => c.top().min(d.top()),
        (true, false) => c.top(),
        (false, true) => d.top(),
        (false, false) => c.top() + d.top(),
    };
    let offsets = |n: usize| -> Vec<usize> {
        let mut off = Vec::with_capacity(n + 2);
        let mut acc = 0;
        for i in 0..=n {
            off.push(acc);
            acc += c.rank(i) * d.rank(n - i);
        }
        off.push(acc);
        off
    };
    let ranks: Vec<usize> = (0..=top).map(|n| *offsets(n).last().unwrap()).collect();
    let mut diffs = Vec::new();
    for n in 1..=top {
        let src = offsets(n);
        let tgt = offsets(n - 1);
        let mut m = IntMatrix::zeros(ranks[n - 1], ranks[n]);
        for i in 0..=n {
            let j = n - i;
            if c.rank(i) * d.rank(j) == 0 {
                continue;
            }
            if i >= 1 {
                let blk = c.d(i).kron(&IntMatrix::identity(d.rank(j)));
                m.add_block(tgt[i - 1], src[i], &blk);
            }
            if j >= 1 {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let blk = IntMatrix::identity(c.rank(i)).kron(&d.d(j)).scale(sign);
                m.add_block(tgt[i], src[i], &blk);
            }
        }
        diffs.push(m);
    }
    let truncated = c.truncated || d.truncated;
    ChainComplex::build(ranks, diffs, truncated).expect("tensor product of complexes is a complex")
}

/// A first-quadrant double complex with commuting squares.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    /// ranks[i][j]
    ranks: Vec<Vec<usize>>,
    /// dh[i][j]: (i,j) → (i−1,j), defined for i ≥ 1
    dh: Vec<Vec<IntMatrix>>,
    /// dv[i][j]: (i,j) → (i,j−1), defined for j ≥ 1
    dv: Vec<Vec<IntMatrix>>,
    truncated: bool,
}

impl DoubleComplex {
    /// `dh(i, j)` and `dv(i, j)` supply the horizontal and vertical maps out of (i, j).
    /// Rows and columns are validated; commutativity is checked by [`total_complex`].
    pub fn new(
        ranks: Vec<Vec<usize>>,
        dh: impl Fn(usize, usize) -> IntMatrix,
        dv: impl Fn(usize, usize) -> IntMatrix,
        truncated: bool,
    ) -> Result<Self, ChainError> {
        let ni = ranks.len();
        let nj = ranks.first().map_or(0, |r| r.len());
        if ni == 0 || nj == 0 || ranks.iter().any(|r| r.len() != nj) {
            return Err(ChainError::ShapeMismatch("double complex ranks must form a nonempty rectangle".into()));
        }
        let mut h = vec![Vec::new(); ni];
        let mut v = vec![Vec::new(); ni];
        for i in 0..ni {
            for j in 0..nj {
                let m = if i == 0 { IntMatrix::zeros(0, ranks[0][j]) } else { dh(i, j) };
                if i > 0 && m.shape() != (ranks[i - 1][j], ranks[i][j]) {
                    return Err(ChainError::ShapeMismatch(format!("horizontal map at ({i},{j}) has wrong shape")));
                }
                h[i].push(m);
                let m = if j == 0 { IntMatrix::zeros(0, ranks[i][0]) } else { dv(i, j) };
                if j > 0 && m.shape() != (ranks[i][j - 1], ranks[i][j]) {
                    return Err(ChainError::ShapeMismatch(format!("vertical map at ({i},{j}) has wrong shape")));
                }
                v[i].push(m);
            }
        }
        for i in 2..ni {
            for j in 0..nj {
                check_d2(&h[i - 1][j], &h[i][j], i - 1)?;
            }
        }
        for i in 0..ni {
            for j in 2..nj {
                check_d2(&v[i][j - 1], &v[i][j], j - 1)?;
            }
        }
        Ok(DoubleComplex { ranks, dh: h, dv: v, truncated })
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.ranks.len() - 1, self.ranks[0].len() - 1)
    }

    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranks.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    }

    /// True iff every square d^H d^V = d^V d^H commutes.
    pub fn squares_commute(&self) -> bool {
        let (ni, nj) = self.bounds();
        for i in 1..=ni {
            for j in 1..=nj {
                let a = self.dh[i][j - 1].mul(&self.dv[i][j]);
                let b = self.dv[i - 1][j].mul(&self.dh[i][j]);
                if a != b {
                    return false;
                }
            }
        }
        true
    }

    /// Row j as a chain complex in the horizontal direction.
    pub fn row(&self, j: usize) -> ChainComplex {
        let (ni, _) = self.bounds();
        let ranks = (0..=ni).map(|i| self.ranks[i][j]).collect();
        let diffs = (1..=ni).map(|i| self.dh[i][j].clone()).collect();
        ChainComplex::build(ranks, diffs, self.truncated).expect("rows validated")
    }

    /// Column i as a chain complex in the vertical direction.
    pub fn column(&self, i: usize) -> ChainComplex {
        let (_, nj) = self.bounds();
        let ranks = (0..=nj).map(|j| self.ranks[i][j]).collect();
        let diffs = (1..=nj).map(|j| self.dv[i][j].clone()).collect();
        ChainComplex::build(ranks, diffs, self.truncated).expect("columns validated")
    }
}

/// Tot(C)_n = ⊕_{i+j=n} C_{i,j} with differential d^H + (−1)^i d^V.
///
/// Blocks in each degree are ordered by increasing i.  A truncated double
/// complex yields Tot truncated at min(I, J).
pub fn total_complex(dc: &DoubleComplex) -> Result<ChainComplex, ChainError> {
    let (ni, nj) = dc.bounds();
    let top = if dc.truncated { ni.min(nj) } else { ni + nj };
    let offsets = |n: usize| -> Vec<usize> {
        let mut off = Vec::new();
        let mut acc = 0;
        for i in 0..=n {
            off.push(acc);
            if i <= ni && n - i <= nj {
                acc += dc.rank(i, n - i);
            }
        }
        off.push(acc);
        off
    };
    let ranks: Vec<usize> = (0..=top).map(|n| *offsets(n).last().unwrap()).collect();
    let mut diffs = Vec::new();
    for n in 1..=top {
        let src = offsets(n);
        let tgt = offsets(n - 1);
        let mut m = IntMatrix::zeros(ranks[n - 1], ranks[n]);
        for i in 0..=n {
            let j = n - i;
            if i > ni || j > nj || dc.rank(i, j) == 0 {
                continue;
            }
            if i >= 1 {
                m.add_block(tgt[i - 1], src[i], &dc.dh[i][j]);
            }
            if j >= 1 {
                let blk = if i % 2 == 0 { dc.dv[i][j].clone() } else { dc.dv[i][j].neg() };
                m.add_block(tgt[i], src[i], &blk);
            }
        }
        diffs.push(m);
    }
    ChainComplex::build(ranks, diffs, dc.truncated)
}

/// Degree-0 chain map; `comps[n]` has shape target.rank(n) × source.rank(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub comps: Vec<IntMatrix>,
}

/// Components h_n: source_n → target_{n+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainHomotopy {
    pub comps: Vec<IntMatrix>,
}

impl ChainMap {
    pub fn new(source: ChainComplex, target: ChainComplex, comps: Vec<IntMatrix>) -> Result<Self, ChainError> {
        for (n, f) in comps.iter().enumerate() {
            if f.shape() != (target.rank(n), source.rank(n)) {
                return Err(ChainError::ShapeMismatch(format!("component {n} has wrong shape")));
            }
        }
        Ok(ChainMap { source, target, comps })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = (0..=c.top()).map(|n| IntMatrix::identity(c.rank(n))).collect();
        ChainMap { source: c.clone(), target: c.clone(), comps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        let top = source.top().min(target.top());
        let comps = (0..=top).map(|n| IntMatrix::zeros(target.rank(n), source.rank(n))).collect();
        ChainMap { source: source.clone(), target: target.clone(), comps }
    }

    /// Component in degree n; zero beyond the stored range.
    pub fn comp(&self, n: usize) -> IntMatrix {
        self.comps.get(n).cloned().unwrap_or_else(|| IntMatrix::zeros(self.target.rank(n), self.source.rank(n)))
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        let top = self.comps.len().min(first.comps.len());
        let comps = (0..top).map(|n| self.comps[n].mul(&first.comps[n])).collect();
        ChainMap { source: first.source.clone(), target: self.target.clone(), comps }
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        let top = self.comps.len().min(other.comps.len());
        let comps = (0..top).map(|n| self.comps[n].sub(&other.comps[n])).collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), comps }
    }
}

/// Result of a degreewise check: `Ok` or the first failing degree.
pub type CheckReport = Result<(), usize>;

/// Checks d f_n = f_{n−1} d in every degree where both sides are stored.
pub fn verify_chain_map(f: &ChainMap) -> CheckReport {
    let top = f.comps.len().saturating_sub(1).min(f.source.top()).min(f.target.top());
    for n in 1..=top {
        let lhs = f.target.d(n).mul(&f.comps[n]);
        let rhs = f.comps[n - 1].mul(&f.source.d(n));
        if lhs != rhs {
            return Err(n);
        }
    }
    Ok(())
}

/// Checks f_n − g_n = d h_n + h_{n−1} d for n = 0..=through.
pub fn verify_homotopy(h: &ChainHomotopy, f: &ChainMap, g: &ChainMap, through: usize) -> CheckReport {
    let src = &f.source;
    let tgt = &f.target;
    for n in 0..=through {
        let lhs = f.comp(n).sub(&g.comp(n));
        let hn = h.comps.get(n).cloned().unwrap_or_else(|| IntMatrix::zeros(tgt.rank(n + 1), src.rank(n)));
        let mut rhs = tgt.d(n + 1).mul(&hn);
        if n >= 1 {
            let hp = h.comps.get(n - 1).cloned().unwrap_or_else(|| IntMatrix::zeros(tgt.rank(n), src.rank(n - 1)));
            rhs = rhs.add(&hp.mul(&src.d(n)));
        }
        if lhs != rhs {
            return Err(n);
        }
    }
    Ok(())
}

/// The group of chain maps C → D vanishing above `bound`, with a basis.
///
/// Unknowns are the entries of f_0..f_bound; the constraints are
/// d f_n = f_{n−1} d for 1 ≤ n ≤ bound+1 (with f_{bound+1} = 0).
pub fn chain_map_group(c: &ChainComplex, d: &ChainComplex, bound: usize) -> (FgAbGroup, Vec<ChainMap>) {
    let mut offs = Vec::new();
    let mut nvars = 0;
    for n in 0..=bound {
        offs.push(nvars);
        nvars += d.rank(n) * c.rank(n);
    }
    let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::new();
    for n in 1..=bound + 1 {
        let dd = d.d(n);
        let dc = c.d(n);
        // entry (p, q) of d^D_n f_n − f_{n−1} d^C_n, p ∈ D_{n−1}, q ∈ C_n
        for p in 0..d.rank(n - 1) {
            for q in 0..c.rank(n) {
                let mut row = Vec::new();
                if n <= bound {
                    for t in 0..d.rank(n) {
                        let a = dd.get(p, t);
                        if a != BigInt::from(0) {
                            row.push((offs[n] + t * c.rank(n) + q, a));
                        }
                    }
                }
                for s in 0..c.rank(n - 1) {
                    let b = dc.get(s, q);
                    if b != BigInt::from(0) {
                        row.push((offs[n - 1] + p * c.rank(n - 1) + s, -b));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let mut m = IntMatrix::zeros(rows.len(), nvars);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row {
            let cur = m.get(i, *j);
            m.set(i, *j, cur + v);
        }
    }
    let k = kernel_basis(&m);
    let mut basis = Vec::new();
    for col in 0..k.cols() {
        let comps = (0..=bound)
            .map(|n| {
                let (r, cc) = (d.rank(n), c.rank(n));
                let vals = (0..r * cc).map(|t| k.get(offs[n] + t, col)).collect();
                IntMatrix::from_big(r, cc, vals)
            })
            .collect();
        basis.push(ChainMap { source: c.clone(), target: d.clone(), comps });
    }
    (FgAbGroup::free(k.cols()), basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn delta1() -> ChainComplex {
        ChainComplex::new(vec![2, 1], vec![mat(&[&[-1], &[1]])]).unwrap()
    }

    #[test]
    fn point_complex_of_the_simplex_category() {
        let c = ChainComplex::new(vec![1, 1, 1, 1], vec![mat(&[&[0]]), mat(&[&[1]]), mat(&[&[0]])]).unwrap();
        assert!(c.homology(0).unwrap().is_z());
        assert!(c.homology(1).unwrap().is_zero());
        assert!(c.homology(2).unwrap().is_zero());
        assert!(ChainComplex::point().homology(0).unwrap().is_z());
    }

    #[test]
    fn malformed_and_non_complexes() {
        assert!(matches!(ChainComplex::new(vec![1, 1], vec![mat(&[&[0], &[1]])]), Err(ChainError::ShapeMismatch(_))));
        let e = ChainComplex::new(vec![1, 1, 1], vec![mat(&[&[1]]), mat(&[&[1]])]).unwrap_err();
        assert!(matches!(e, ChainError::NotAComplex { degree: 1, .. }));
    }

    #[test]
    fn truncation_contract() {
        let c = ChainComplex::truncated(vec![1, 1, 1], vec![mat(&[&[0]]), mat(&[&[1]])]).unwrap();
        assert!(c.homology(1).is_ok());
        assert!(matches!(c.homology(2), Err(ChainError::DegreeOutOfRange { .. })));
        let two = ChainComplex::new(vec![1, 1], vec![mat(&[&[2]])]).unwrap();
        assert_eq!(two.homology(0).unwrap(), FgAbGroup::from_cyclic(0, &[BigInt::from(2)]));
    }

    #[test]
    fn tensor_examples() {
        let c = delta1();
        let t = tensor(&c, &c);
        assert_eq!(t.ranks(), &[4, 4, 1]);
        assert!(t.is_point(2).unwrap());
        assert_eq!(tensor(&ChainComplex::point(), &c), c);
        let z = tensor(&c, &ChainComplex::zero());
        assert!(z.ranks().iter().all(|&r| r == 0));
    }

    #[test]
    fn total_complex_examples() {
        let one = mat(&[&[1]]);
        let dc = DoubleComplex::new(vec![vec![1, 1], vec![1, 1]], |_, _| one.clone(), |_, _| one.clone(), false).unwrap();
        assert!(dc.squares_commute());
        let tot = total_complex(&dc).unwrap();
        assert_eq!(tot.ranks(), &[1, 2, 1]);
        assert_eq!(tot.d(1).mul(&tot.d(2)), IntMatrix::zeros(1, 1));
        let row = DoubleComplex::new(vec![vec![2], vec![1]], |_, _| mat(&[&[-1], &[1]]), |_, _| IntMatrix::zeros(0, 0), false).unwrap();
        assert_eq!(total_complex(&row).unwrap(), delta1());
        let bad = DoubleComplex::new(
            vec![vec![1, 1], vec![1, 1]],
            |_, j| if j == 0 { mat(&[&[1]]) } else { mat(&[&[2]]) },
            |_, _| mat(&[&[1]]),
            false,
        )
        .unwrap();
        assert!(matches!(total_complex(&bad), Err(ChainError::NotAComplex { .. })));
    }

    #[test]
    fn chain_map_checks() {
        let c = delta1();
        let id = ChainMap::identity(&c);
        assert_eq!(verify_chain_map(&id), Ok(()));
        let h0 = ChainHomotopy { comps: vec![IntMatrix::zeros(1, 2)] };
        assert_eq!(verify_homotopy(&h0, &id, &id, 1), Ok(()));
        let zero = ChainMap::zero(&c, &c);
        assert_eq!(verify_homotopy(&h0, &id, &zero, 1), Err(0));
    }

    #[test]
    fn chain_map_groups() {
        let (g, _) = chain_map_group(&ChainComplex::point(), &ChainComplex::point(), 0);
        assert_eq!(g, FgAbGroup::free(1));
        let (g, basis) = chain_map_group(&delta1(), &ChainComplex::point(), 0);
        assert_eq!(g, FgAbGroup::free(1));
        assert!(basis.iter().all(|f| verify_chain_map(f).is_ok()));
        let (g, _) = chain_map_group(&delta1(), &ChainComplex::zero(), 1);
        assert!(g.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let c = delta1();
        let v = c.to_json();
        assert_eq!(v, serde_json::json!({"ranks":[2,1],"diffs":[[-1,1]]}));
        assert_eq!(ChainComplex::from_json(&v).unwrap(), c);
    }
}
