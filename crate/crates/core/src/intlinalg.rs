//! Exact integer linear algebra.
//!
//! Matrices keep machine-word entries while they fit and switch to big
//! integers on overflow, so every result is exact.  The elimination
//! routines are written once over [`Scalar`] and first attempted on `i64`
//! with checked arithmetic; an overflow restarts the routine on `BigInt`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("composition of differentials is not zero")]
    CompositionNotZero,
    #[error("vector is not in the lattice spanned by the basis")]
    NotInLattice,
    #[error("sublattice is not saturated; the quotient has torsion")]
    NotSaturated,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Store {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// Dense row-major integer matrix with exact arithmetic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Store,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: Store::Small(vec![0; rows * cols]) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set_i64(i, i, 1);
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: Vec<i64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        IntMatrix { rows, cols, data: Store::Small(entries) }
    }

    pub fn from_big(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        let mut m = IntMatrix { rows, cols, data: Store::Big(entries) };
        m.compact();
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self::from_i64(r, c, rows.iter().flatten().copied().collect())
    }

    /// A column vector.
    pub fn column(v: &[i64]) -> Self {
        Self::from_i64(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match &self.data {
            Store::Small(v) => BigInt::from(v[i * self.cols + j]),
            Store::Big(v) => v[i * self.cols + j].clone(),
        }
    }

    pub fn get_i64(&self, i: usize, j: usize) -> Option<i64> {
        match &self.data {
            Store::Small(v) => Some(v[i * self.cols + j]),
            Store::Big(v) => v[i * self.cols + j].to_i64(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        let idx = i * self.cols + j;
        match &mut self.data {
            Store::Small(v) => match x.to_i64() {
                Some(s) => v[idx] = s,
                None => {
                    let mut big: Vec<BigInt> = v.iter().map(|&e| BigInt::from(e)).collect();
                    big[idx] = x;
                    self.data = Store::Big(big);
                }
            },
            Store::Big(v) => v[idx] = x,
        }
    }

    pub fn set_i64(&mut self, i: usize, j: usize, x: i64) {
        let idx = i * self.cols + j;
        match &mut self.data {
            Store::Small(v) => v[idx] = x,
            Store::Big(v) => v[idx] = BigInt::from(x),
        }
    }

    /// Adds `x` to entry (i, j).
    pub fn add_at(&mut self, i: usize, j: usize, x: i64) {
        let idx = i * self.cols + j;
        match &mut self.data {
            Store::Small(v) => match v[idx].checked_add(x) {
                Some(s) => v[idx] = s,
                None => {
                    let y = BigInt::from(v[idx]) + x;
                    self.set(i, j, y);
                }
            },
            Store::Big(v) => v[idx] += x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Store::Small(v) => v.iter().all(|&x| x == 0),
            Store::Big(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.data, Store::Small(_))
    }

    /// Entries as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        match &self.data {
            Store::Small(v) => Some(v.clone()),
            Store::Big(v) => v.iter().map(|x| x.to_i64()).collect(),
        }
    }

    pub fn to_big_vec(&self) -> Vec<BigInt> {
        match &self.data {
            Store::Small(v) => v.iter().map(|&x| BigInt::from(x)).collect(),
            Store::Big(v) => v.clone(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    fn compact(&mut self) {
        if let Store::Big(v) = &self.data {
            if let Some(s) = v.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>() {
                self.data = Store::Small(s);
            }
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let (r, c) = (self.rows, self.cols);
        match &self.data {
            Store::Small(v) => {
                let mut out = vec![0i64; r * c];
                for i in 0..r {
                    for j in 0..c {
                        out[j * r + i] = v[i * c + j];
                    }
                }
                IntMatrix::from_i64(c, r, out)
            }
            Store::Big(v) => {
                let mut out = vec![BigInt::zero(); r * c];
                for i in 0..r {
                    for j in 0..c {
                        out[j * r + i] = v[i * c + j].clone();
                    }
                }
                IntMatrix::from_big(c, r, out)
            }
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        if let (Store::Small(a), Store::Small(b)) = (&self.data, &other.data) {
            let mut out = vec![0i128; n * m];
            let mut ok = true;
            'outer: for i in 0..n {
                for l in 0..k {
                    let x = a[i * k + l];
                    if x == 0 {
                        continue;
                    }
                    let row = &b[l * m..(l + 1) * m];
                    for (j, &y) in row.iter().enumerate() {
                        if y != 0 {
                            let acc = &mut out[i * m + j];
                            match acc.checked_add(x as i128 * y as i128) {
                                Some(s) => *acc = s,
                                None => {
                                    ok = false;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            if ok {
                if let Some(v) = out.iter().map(|&x| i64::try_from(x).ok()).collect::<Option<Vec<i64>>>() {
                    return IntMatrix::from_i64(n, m, v);
                }
            }
        }
        let a = self.to_big_vec();
        let b = other.to_big_vec();
        let mut out = vec![BigInt::zero(); n * m];
        for i in 0..n {
            for l in 0..k {
                let x = &a[i * k + l];
                if x.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let y = &b[l * m + j];
                    if !y.is_zero() {
                        out[i * m + j] += x * y;
                    }
                }
            }
        }
        IntMatrix::from_big(n, m, out)
    }

    fn zip_with(&self, other: &IntMatrix, small: fn(i64, i64) -> Option<i64>, big: fn(&BigInt, &BigInt) -> BigInt) -> IntMatrix {
        assert_eq!(self.shape(), other.shape(), "elementwise shape mismatch");
        if let (Store::Small(a), Store::Small(b)) = (&self.data, &other.data) {
            if let Some(v) = a.iter().zip(b).map(|(&x, &y)| small(x, y)).collect::<Option<Vec<i64>>>() {
                return IntMatrix::from_i64(self.rows, self.cols, v);
            }
        }
        let a = self.to_big_vec();
        let b = other.to_big_vec();
        IntMatrix::from_big(self.rows, self.cols, a.iter().zip(&b).map(|(x, y)| big(x, y)).collect())
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        self.zip_with(other, |x, y| x.checked_add(y), |x, y| x + y)
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.zip_with(other, |x, y| x.checked_sub(y), |x, y| x - y)
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> IntMatrix {
        if let Store::Small(a) = &self.data {
            if let Some(v) = a.iter().map(|&x| x.checked_mul(s)).collect::<Option<Vec<i64>>>() {
                return IntMatrix::from_i64(self.rows, self.cols, v);
            }
        }
        IntMatrix::from_big(self.rows, self.cols, self.to_big_vec().into_iter().map(|x| x * s).collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        out.paste(0, 0, self);
        out.paste(0, self.cols, other);
        out
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut out = IntMatrix::zeros(self.rows + other.rows, self.cols);
        out.paste(0, 0, self);
        out.paste(self.rows, 0, other);
        out
    }

    pub fn block_diag(blocks: &[IntMatrix]) -> IntMatrix {
        let r = blocks.iter().map(|b| b.rows).sum();
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            out.paste(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        out
    }

    /// Writes `block` with its top-left corner at (i0, j0).
    pub fn paste(&mut self, i0: usize, j0: usize, block: &IntMatrix) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                match &block.data {
                    Store::Small(v) => {
                        let x = v[i * block.cols + j];
                        if x != 0 || !self.is_small() {
                            self.set_i64(i0 + i, j0 + j, x);
                        }
                    }
                    Store::Big(_) => self.set(i0 + i, j0 + j, block.get(i, j)),
                }
            }
        }
    }

    /// Adds `block` into the region with top-left corner (i0, j0).
    pub fn add_block(&mut self, i0: usize, j0: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                match block.get_i64(i, j) {
                    Some(0) => {}
                    Some(x) => self.add_at(i0 + i, j0 + j, x),
                    None => {
                        let y = self.get(i0 + i, j0 + j) + block.get(i, j);
                        self.set(i0 + i, j0 + j, y);
                    }
                }
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                match self.get_i64(i, j) {
                    Some(x) => out.set_i64(a, b, x),
                    None => out.set(a, b, self.get(i, j)),
                }
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &cols)
    }

    pub fn col(&self, j: usize) -> IntMatrix {
        self.select_cols(&[j])
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let y = other.get(k, l);
                        if !y.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, &x * y);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        invariant_factors(self).len()
    }

    /// True iff the matrix is square with determinant ±1.
    pub fn is_unimodular(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let f = invariant_factors(self);
        f.len() == self.rows && f.iter().all(|d| d.is_one())
    }

    /// Maximum absolute entry, used to size random tests.
    pub fn max_abs(&self) -> BigInt {
        self.to_big_vec().into_iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

/// Finitely generated abelian group ℤ^r ⊕ ⊕ ℤ/d_i with d_1 | d_2 | ….
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn zero() -> Self {
        FgAbGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(r: usize) -> Self {
        FgAbGroup { free_rank: r, torsion: vec![] }
    }

    /// Builds a group from arbitrary cyclic orders, normalizing to invariant factors.
    /// Orders 0 and 1 are dropped.
    pub fn from_cyclic(free_rank: usize, orders: &[BigInt]) -> Self {
        FgAbGroup { free_rank, torsion: normalize_factors(orders) }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_z(&self) -> bool {
        self.free_rank == 1 && self.torsion.is_empty()
    }

    /// `{"free_rank": r, "torsion": [...]}`; huge torsion orders are written as strings.
    pub fn to_json(&self) -> serde_json::Value {
        let t: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|d| match d.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        serde_json::json!({ "free_rank": self.free_rank, "torsion": t })
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        FgAbGroup::from_cyclic(self.free_rank + other.free_rank, &t)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Turns a list of cyclic orders into an invariant factor chain (entries ≥ 2).
pub fn normalize_factors(orders: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = orders.iter().map(|x| x.abs()).filter(|x| !x.is_zero() && !x.is_one()).collect();
    // gcd/lcm sweeps make the list a divisibility chain
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|x| !x.is_one());
    d
}

// ---------------------------------------------------------------------------
// generic scalar machinery

pub(crate) trait Scalar: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn negative(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn plus(&self, other: &Self) -> Option<Self>;
    fn times(&self, other: &Self) -> Option<Self>;
    fn negated(&self) -> Option<Self>;
    fn fdiv(&self, d: &Self) -> Self;
    fn divides(&self, x: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn negative(&self) -> bool {
        *self < 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn plus(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn times(&self, other: &Self) -> Option<Self> {
        self.checked_mul(*other)
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn fdiv(&self, d: &Self) -> Self {
        Integer::div_floor(self, d)
    }
    fn divides(&self, x: &Self) -> bool {
        *self != 0 && x % self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn negative(&self) -> bool {
        self.is_negative()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn plus(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn times(&self, other: &Self) -> Option<Self> {
        Some(self * other)
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
    fn fdiv(&self, d: &Self) -> Self {
        Integer::div_floor(self, d)
    }
    fn divides(&self, x: &Self) -> bool {
        !Zero::is_zero(self) && Zero::is_zero(&(x % self))
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Dense working matrix used inside the elimination routines.
#[derive(Clone, Debug)]
pub(crate) struct Dense<T> {
    pub r: usize,
    pub c: usize,
    pub a: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn at(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.c + j]
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![T::nil(); n * n];
        for i in 0..n {
            a[i * n + i] = T::unit();
        }
        Dense { r: n, c: n, a }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.c {
                self.a.swap(i * self.c + j, k * self.c + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j != k {
            for i in 0..self.r {
                self.a.swap(i * self.c + j, i * self.c + k);
            }
        }
    }

    /// row_i += q * row_k
    fn row_axpy(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        if q.is_nil() {
            return Some(());
        }
        for j in 0..self.c {
            let y = &self.a[k * self.c + j];
            if !y.is_nil() {
                let v = self.a[i * self.c + j].plus(&q.times(y)?)?;
                self.a[i * self.c + j] = v;
            }
        }
        Some(())
    }

    /// col_j += q * col_k
    fn col_axpy(&mut self, j: usize, k: usize, q: &T) -> Option<()> {
        if q.is_nil() {
            return Some(());
        }
        for i in 0..self.r {
            let y = &self.a[i * self.c + k];
            if !y.is_nil() {
                let v = self.a[i * self.c + j].plus(&q.times(y)?)?;
                self.a[i * self.c + j] = v;
            }
        }
        Some(())
    }

    fn neg_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.c {
            self.a[i * self.c + j] = self.a[i * self.c + j].negated()?;
        }
        Some(())
    }

    fn neg_col(&mut self, j: usize) -> Option<()> {
        for i in 0..self.r {
            self.a[i * self.c + j] = self.a[i * self.c + j].negated()?;
        }
        Some(())
    }
}


fn small_dense(m: &IntMatrix) -> Option<Dense<i64>> {
    match &m.data {
        Store::Small(v) => Some(Dense { r: m.rows, c: m.cols, a: v.clone() }),
        Store::Big(_) => None,
    }
}

fn big_dense(m: &IntMatrix) -> Dense<BigInt> {
    Dense { r: m.rows, c: m.cols, a: m.to_big_vec() }
}

fn to_matrix<T: Scalar>(d: &Dense<T>) -> IntMatrix {
    IntMatrix::from_big(d.r, d.c, d.a.iter().map(|x| x.to_big()).collect())
}

/// Runs `f` on machine integers, falling back to big integers on overflow.
fn with_fallback<R>(m: &IntMatrix, small: impl Fn(Dense<i64>) -> Option<R>, big: impl Fn(Dense<BigInt>) -> Option<R>) -> R {
    if let Some(d) = small_dense(m) {
        if let Some(r) = small(d) {
            return r;
        }
    }
    big(big_dense(m)).expect("big-integer elimination cannot overflow")
}

// ---------------------------------------------------------------------------
// Smith normal form

/// Pivot search: the nonzero entry of least absolute value in the trailing
/// block starting at (t, t).  Ties go to the first entry in row-major order,
/// and a unit ends the search at once, which keeps sparse ±1 matrices cheap.
fn min_pivot<T: Scalar>(d: &Dense<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.r {
        for j in t..d.c {
            let x = d.at(i, j);
            if x.is_nil() {
                continue;
            }
            if x.is_unit() {
                return Some((i, j));
            }
            match best {
                Some((bi, bj)) if !x.abs_lt(d.at(bi, bj)) => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

struct SnfOut<T> {
    d: Dense<T>,
    u: Option<Dense<T>>,
    v: Option<Dense<T>>,
}

fn snf_generic<T: Scalar>(mut d: Dense<T>, track: bool, chain: bool) -> Option<SnfOut<T>> {
    let mut u = if track { Some(Dense::<T>::identity(d.r)) } else { None };
    let mut v = if track { Some(Dense::<T>::identity(d.c)) } else { None };
    let n = d.r.min(d.c);
    for t in 0..n {
        loop {
            let Some((pi, pj)) = min_pivot(&d, t) else {
                return Some(SnfOut { d, u, v });
            };
            d.swap_rows(t, pi);
            d.swap_cols(t, pj);
            if let Some(u) = u.as_mut() {
                u.swap_rows(t, pi);
            }
            if let Some(v) = v.as_mut() {
                v.swap_cols(t, pj);
            }
            let p = d.at(t, t).clone();
            let mut clean = true;
            for i in t + 1..d.r {
                let x = d.at(i, t).clone();
                if x.is_nil() {
                    continue;
                }
                let q = x.fdiv(&p).negated()?;
                d.row_axpy(i, t, &q)?;
                if let Some(u) = u.as_mut() {
                    u.row_axpy(i, t, &q)?;
                }
                if !d.at(i, t).is_nil() {
                    clean = false;
                }
            }
            for j in t + 1..d.c {
                let x = d.at(t, j).clone();
                if x.is_nil() {
                    continue;
                }
                let q = x.fdiv(&p).negated()?;
                d.col_axpy(j, t, &q)?;
                if let Some(v) = v.as_mut() {
                    v.col_axpy(j, t, &q)?;
                }
                if !d.at(t, j).is_nil() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            if chain && !p.is_unit() {
                // pivot must divide the whole trailing block
                let mut bad = None;
                'scan: for i in t + 1..d.r {
                    for j in t + 1..d.c {
                        if !p.divides(d.at(i, j)) {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                if let Some(i) = bad {
                    let one = T::unit();
                    d.row_axpy(t, i, &one)?;
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(t, i, &one)?;
                    }
                    continue;
                }
            }
            break;
        }
        if d.at(t, t).negative() {
            d.neg_row(t)?;
            if let Some(u) = u.as_mut() {
                u.neg_row(t)?;
            }
        }
    }
    Some(SnfOut { d, u, v })
}

/// Smith normal form: returns (U, D, V) with U·M·V = D, U and V unimodular,
/// D diagonal with positive entries d_1 | d_2 | … followed by zeros.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    with_fallback(
        m,
        |d| snf_generic(d, true, true).map(|o| (to_matrix(&o.u.unwrap()), to_matrix(&o.d), to_matrix(&o.v.unwrap()))),
        |d| snf_generic(d, true, true).map(|o| (to_matrix(&o.u.unwrap()), to_matrix(&o.d), to_matrix(&o.v.unwrap()))),
    )
}

fn diagonal_of<T: Scalar>(d: &Dense<T>) -> Vec<BigInt> {
    (0..d.r.min(d.c)).map(|i| d.at(i, i).to_big()).filter(|x| !x.is_nil()).collect()
}

/// Nonzero invariant factors of `m` (length = rank), as a divisibility chain.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let diag = with_fallback(
        m,
        |d| snf_generic(d, false, false).map(|o| diagonal_of(&o.d)),
        |d| snf_generic(d, false, false).map(|o| diagonal_of(&o.d)),
    );
    let r = diag.len();
    let mut f = normalize_factors(&diag);
    let mut out = vec![BigInt::one(); r - f.len()];
    out.append(&mut f);
    out
}

// ---------------------------------------------------------------------------
// Hermite normal form and lattices

struct HnfOut<T> {
    h: Dense<T>,
    v: Option<Dense<T>>,
    pivots: Vec<usize>,
}

/// Column-style Hermite normal form by unimodular column operations: the
/// first `pivots.len()` columns are in echelon form with positive pivots at
/// increasing rows, entries left of a pivot reduced into [0, pivot), and the
/// remaining columns are zero.
fn hnf_generic<T: Scalar>(mut d: Dense<T>, track: bool) -> Option<HnfOut<T>> {
    let mut v = if track { Some(Dense::<T>::identity(d.c)) } else { None };
    let mut pivots = Vec::new();
    let mut pc = 0;
    for row in 0..d.r {
        if pc == d.c {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pc..d.c {
                let x = d.at(row, j);
                if x.is_nil() {
                    continue;
                }
                match best {
                    Some(b) if !x.abs_lt(d.at(row, b)) => {}
                    _ => best = Some(j),
                }
            }
            let Some(b) = best else { break };
            d.swap_cols(pc, b);
            if let Some(v) = v.as_mut() {
                v.swap_cols(pc, b);
            }
            let p = d.at(row, pc).clone();
            let mut done = true;
            for j in pc + 1..d.c {
                let x = d.at(row, j).clone();
                if x.is_nil() {
                    continue;
                }
                let q = x.fdiv(&p).negated()?;
                d.col_axpy(j, pc, &q)?;
                if let Some(v) = v.as_mut() {
                    v.col_axpy(j, pc, &q)?;
                }
                if !d.at(row, j).is_nil() {
                    done = false;
                }
            }
            if done {
                if d.at(row, pc).negative() {
                    d.neg_col(pc)?;
                    if let Some(v) = v.as_mut() {
                        v.neg_col(pc)?;
                    }
                }
                let p = d.at(row, pc).clone();
                for j in 0..pc {
                    let x = d.at(row, j).clone();
                    let q = x.fdiv(&p).negated()?;
                    d.col_axpy(j, pc, &q)?;
                    if let Some(v) = v.as_mut() {
                        v.col_axpy(j, pc, &q)?;
                    }
                }
                pivots.push(row);
                pc += 1;
                break;
            }
        }
    }
    Some(HnfOut { h: d, v, pivots })
}

/// Canonical basis (column Hermite normal form) of the lattice spanned by the columns.
pub fn column_hnf(m: &IntMatrix) -> IntMatrix {
    let (h, r) = with_fallback(
        m,
        |d| hnf_generic(d, false).map(|o| (to_matrix(&o.h), o.pivots.len())),
        |d| hnf_generic(d, false).map(|o| (to_matrix(&o.h), o.pivots.len())),
    );
    h.select_cols(&(0..r).collect::<Vec<_>>())
}

/// Canonical ℤ-basis (as columns) of the kernel {x : M x = 0}.  The kernel of an
/// integer matrix is always a saturated lattice.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (v, r) = with_fallback(
        m,
        |d| hnf_generic(d, true).map(|o| (to_matrix(&o.v.unwrap()), o.pivots.len())),
        |d| hnf_generic(d, true).map(|o| (to_matrix(&o.v.unwrap()), o.pivots.len())),
    );
    let k = v.select_cols(&(r..m.cols()).collect::<Vec<_>>());
    column_hnf(&k)
}

/// Pivot rows of the column Hermite form of a lattice basis.
pub fn hnf_pivots(basis: &IntMatrix) -> Vec<usize> {
    with_fallback(basis, |d| hnf_generic(d, false).map(|o| o.pivots), |d| hnf_generic(d, false).map(|o| o.pivots))
}

/// Canonical basis of the column span (alias of [`column_hnf`]).
pub fn image_basis(m: &IntMatrix) -> IntMatrix {
    column_hnf(m)
}

/// True iff the lattice spanned by the columns is saturated (ℤ^n / L torsion free).
pub fn is_saturated(m: &IntMatrix) -> bool {
    invariant_factors(m).iter().all(|d| d.is_one())
}

/// Solves `basis · x = v` for integer x.  `basis` must have independent columns.
pub fn solve(basis: &IntMatrix, v: &IntMatrix) -> Result<IntMatrix, LinAlgError> {
    if basis.rows() != v.rows() {
        return Err(LinAlgError::ShapeMismatch(format!("basis has {} rows, target has {}", basis.rows(), v.rows())));
    }
    let k = basis.cols();
    // reduce the basis to Hermite form while tracking the column transform
    let (h, w, piv) = with_fallback(
        basis,
        |d| hnf_generic(d, true).map(|o| (to_matrix(&o.h), to_matrix(&o.v.unwrap()), o.pivots)),
        |d| hnf_generic(d, true).map(|o| (to_matrix(&o.h), to_matrix(&o.v.unwrap()), o.pivots)),
    );
    if piv.len() != k {
        return Err(LinAlgError::ShapeMismatch("basis columns are not independent".into()));
    }
    let mut out = IntMatrix::zeros(k, v.cols());
    for col in 0..v.cols() {
        let mut rem: Vec<BigInt> = (0..v.rows()).map(|i| v.get(i, col)).collect();
        let mut y = vec![BigInt::zero(); k];
        for (j, &p) in piv.iter().enumerate() {
            let hp = h.get(p, j);
            let (q, r) = rem[p].div_rem(&hp);
            if !r.is_zero() {
                return Err(LinAlgError::NotInLattice);
            }
            if !q.is_zero() {
                for i in 0..v.rows() {
                    let hij = h.get(i, j);
                    if !hij.is_zero() {
                        rem[i] -= &q * hij;
                    }
                }
            }
            y[j] = q;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return Err(LinAlgError::NotInLattice);
        }
        let y = IntMatrix::from_big(k, 1, y);
        let x = w.select_rows(&(0..k).collect::<Vec<_>>()).mul(&y);
        out.paste(0, col, &x);
    }
    Ok(out)
}

/// A free quotient ℤ^m / K for a saturated sublattice K: projection and section.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// (m−r) × m projection.
    pub proj: IntMatrix,
    /// m × (m−r) section with proj · sect = id.
    pub sect: IntMatrix,
}

/// Quotient of ℤ^m by the lattice spanned by the columns of `k`.  When the
/// Hermite form of K has unit pivots the quotient basis is given by the
/// non-pivot coordinates, so coordinate sublattices yield coordinate quotients.
pub fn quotient(m: usize, k: &IntMatrix) -> Result<Quotient, LinAlgError> {
    if k.rows() != m {
        return Err(LinAlgError::ShapeMismatch(format!("sublattice lives in Z^{}, expected Z^{m}", k.rows())));
    }
    let h = column_hnf(k);
    let piv = hnf_pivots(&h);
    let r = piv.len();
    let unit = piv.iter().enumerate().all(|(j, &p)| h.get(p, j).is_one());
    if unit {
        let free: Vec<usize> = (0..m).filter(|i| !piv.contains(i)).collect();
        let mut sect = IntMatrix::zeros(m, free.len());
        for (a, &i) in free.iter().enumerate() {
            sect.set_i64(i, a, 1);
        }
        // proj(e_i): reduce e_i by K so that pivot coordinates vanish
        let mut proj = IntMatrix::zeros(free.len(), m);
        for i in 0..m {
            let mut vecv: Vec<BigInt> = (0..m).map(|t| if t == i { BigInt::one() } else { BigInt::zero() }).collect();
            for (j, &p) in piv.iter().enumerate() {
                let q = vecv[p].clone();
                if !q.is_zero() {
                    for t in 0..m {
                        let hv = h.get(t, j);
                        if !hv.is_zero() {
                            vecv[t] -= &q * hv;
                        }
                    }
                }
            }
            for (a, &f) in free.iter().enumerate() {
                proj.set(a, i, vecv[f].clone());
            }
        }
        return Ok(Quotient { proj, sect });
    }
    let (u, d, _v) = smith_normal_form(k);
    for i in 0..r {
        if !d.get(i, i).is_one() {
            return Err(LinAlgError::NotSaturated);
        }
    }
    let rest: Vec<usize> = (r..m).collect();
    let proj = u.select_rows(&rest);
    let uinv = inverse_unimodular(&u);
    let sect = uinv.select_cols(&rest);
    Ok(Quotient { proj, sect })
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(u: &IntMatrix) -> IntMatrix {
    let n = u.rows();
    solve(u, &IntMatrix::identity(n)).expect("matrix is not unimodular")
}

/// Homology ker(d_n)/im(d_{n+1}) of C_{n-1} ← C_n ← C_{n+1}.
pub fn homology_group(d_n: &IntMatrix, d_n1: &IntMatrix) -> Result<FgAbGroup, LinAlgError> {
    if d_n.cols() != d_n1.rows() {
        return Err(LinAlgError::ShapeMismatch(format!(
            "d_n has {} columns but d_(n+1) has {} rows",
            d_n.cols(),
            d_n1.rows()
        )));
    }
    if !d_n.mul(d_n1).is_zero() {
        return Err(LinAlgError::CompositionNotZero);
    }
    Ok(homology_from_factors(d_n.cols(), d_n.rank(), &invariant_factors(d_n1)))
}

/// Homology from the middle rank, rank of the outgoing map and invariant
/// factors of the incoming map.
pub fn homology_from_factors(middle: usize, rank_out: usize, incoming: &[BigInt]) -> FgAbGroup {
    let free = middle - rank_out - incoming.len();
    FgAbGroup { free_rank: free, torsion: incoming.iter().filter(|d| !d.is_one()).cloned().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn diag(d: &IntMatrix) -> Vec<i64> {
        (0..d.rows().min(d.cols())).map(|i| d.get_i64(i, i).unwrap()).collect()
    }

    #[test]
    fn snf_small_example() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(diag(&d), vec![2, 4]);
        assert_eq!(u.mul(&a).mul(&v), d);
        assert!(u.is_unimodular() && v.is_unimodular());
    }

    #[test]
    fn snf_identity_and_zero() {
        let i = IntMatrix::identity(3);
        let (u, d, v) = smith_normal_form(&i);
        assert_eq!((u, d.clone(), v), (IntMatrix::identity(3), IntMatrix::identity(3), IntMatrix::identity(3)));
        let z = IntMatrix::zeros(2, 3);
        let (_, d, _) = smith_normal_form(&z);
        assert!(d.is_zero());
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2 + 7;
        let a = m(&[&[big, big - 1], &[3, 5]]);
        let (u, d, v) = smith_normal_form(&a);
        assert_eq!(u.mul(&a).mul(&v), d);
        let prod = a.mul(&a);
        assert!(!prod.is_small());
        assert_eq!(prod.get(0, 0), BigInt::from(big) * big + BigInt::from(big - 1) * 3);
    }

    #[test]
    fn homology_examples() {
        let z = IntMatrix::zeros(1, 1);
        assert_eq!(homology_group(&z, &z).unwrap(), FgAbGroup::free(1));
        let two = m(&[&[2]]);
        assert_eq!(homology_group(&z, &two).unwrap(), FgAbGroup::from_cyclic(0, &[BigInt::from(2)]));
        let one = m(&[&[1]]);
        assert_eq!(homology_group(&one, &z).unwrap(), FgAbGroup::zero());
        assert_eq!(homology_group(&one, &one), Err(LinAlgError::CompositionNotZero));
        assert!(matches!(homology_group(&one, &IntMatrix::zeros(2, 1)), Err(LinAlgError::ShapeMismatch(_))));
    }

    #[test]
    fn kernel_of_coordinate_projection_is_coordinate() {
        let p = m(&[&[0, 1, 0], &[0, 0, 1]]);
        let k = kernel_basis(&p);
        assert_eq!(k, IntMatrix::column(&[1, 0, 0]));
    }

    #[test]
    fn quotient_by_coordinate_sublattice() {
        let k = m(&[&[0], &[1], &[0]]);
        let q = quotient(3, &k).unwrap();
        assert_eq!(q.proj, m(&[&[1, 0, 0], &[0, 0, 1]]));
        assert_eq!(q.proj.mul(&q.sect), IntMatrix::identity(2));
        let nonsat = m(&[&[2], &[0]]);
        assert_eq!(quotient(2, &nonsat).unwrap_err(), LinAlgError::NotSaturated);
    }

    #[test]
    fn quotient_general_saturated() {
        let k = m(&[&[2], &[3], &[0]]);
        let q = quotient(3, &k).unwrap();
        assert_eq!(q.proj.rows(), 2);
        assert!(q.proj.mul(&k).is_zero());
        assert_eq!(q.proj.mul(&q.sect), IntMatrix::identity(2));
    }

    #[test]
    fn solve_roundtrip() {
        let b = m(&[&[1, 0], &[2, 3], &[0, 1]]);
        let x = IntMatrix::column(&[4, -5]);
        let v = b.mul(&x);
        assert_eq!(solve(&b, &v).unwrap(), x);
        assert_eq!(solve(&b, &IntMatrix::column(&[0, 1, 0])), Err(LinAlgError::NotInLattice));
    }

    #[test]
    fn factor_normalization() {
        let f = normalize_factors(&[BigInt::from(2), BigInt::from(3), BigInt::from(1), BigInt::from(0)]);
        assert_eq!(f, vec![BigInt::from(6)]);
        let g = FgAbGroup::from_cyclic(1, &[BigInt::from(4), BigInt::from(6)]);
        assert_eq!(g.to_string(), "Z + Z/2 + Z/12");
    }
}
