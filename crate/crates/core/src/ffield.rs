//! Arithmetic in the prime field `F_q`, `q = 2^61 - 1`, and an incremental
//! row-echelon basis used for every rank and span-membership query.
//!
//! Random points of `F_q^{dn}` stand in for generic real embeddings. A rank
//! computed at such a point never exceeds the generic rank, and falls short of
//! it with probability at most `rank / q`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1 << 61) - 1;

/// Reduces any `x < 2^123` modulo [`MODULUS`].
#[inline(always)]
fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & MODULUS;
    let hi = (x >> 61) as u64;
    let s = lo + hi;
    let s = (s & MODULUS) + (s >> 61);
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

/// An element of `F_q`, always stored in canonical form `0 <= value < q`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    /// Reduces an arbitrary `u64` into the field.
    #[inline]
    pub fn new(value: u64) -> Self {
        Fp(reduce(value as u128))
    }

    #[inline]
    pub const fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(MODULUS - 2))
    }

    /// `self + a * b` with a single reduction.
    #[inline(always)]
    fn mul_add(self, a: Fp, b: Fp) -> Fp {
        Fp(reduce(self.0 as u128 + a.0 as u128 * b.0 as u128))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Fp {
    fn from(v: u64) -> Self {
        Fp::new(v)
    }
}

impl Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(MODULUS - self.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        Fp(reduce(self.0 as u128 * rhs.0 as u128))
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

/// A dense vector in `F_q^N`. Its length is the ambient dimension `N`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RowVector {
    entries: Vec<Fp>,
}

impl RowVector {
    pub fn zero(len: usize) -> Self {
        RowVector { entries: vec![Fp::ZERO; len] }
    }

    pub fn from_entries(entries: Vec<Fp>) -> Self {
        RowVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Fp] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Fp] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Fp> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|x| !x.is_zero()).count()
    }

    /// `self += coeff * other`.
    pub fn add_scaled(&mut self, coeff: Fp, other: &RowVector) -> Result<()> {
        check_len(self.len(), other.len())?;
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a = a.mul_add(coeff, b);
        }
        Ok(())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// Outcome of [`RowBasis::insert`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Insertion {
    Independent,
    Dependent,
}

const NO_PIVOT: u32 = u32::MAX;

/// Row-echelon basis of a subspace of `F_q^N`.
///
/// Every stored row has a distinct pivot (its first nonzero column), normalized
/// to one. Rows are kept dense; elimination fill-in makes sparse storage
/// pointless at the sizes used here.
#[derive(Clone, Debug)]
pub struct RowBasis {
    ambient_dim: usize,
    rows: Vec<Vec<Fp>>,
    pivots: Vec<usize>,
    row_of_col: Vec<u32>,
}

impl RowBasis {
    pub fn new(ambient_dim: usize) -> Self {
        RowBasis {
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
            row_of_col: vec![NO_PIVOT; ambient_dim],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Eliminates `w` against stored pivots in column order. With
    /// `stop_at_free`, stops at the first nonzero column without a pivot and
    /// returns it. Otherwise reduces fully and returns the first surviving
    /// column, or `None` when `w` became zero.
    fn eliminate(&self, w: &mut [Fp], stop_at_free: bool) -> Option<usize> {
        let mut first_free = None;
        for col in 0..self.ambient_dim {
            let c = w[col];
            if c.is_zero() {
                continue;
            }
            let r = self.row_of_col[col];
            if r == NO_PIVOT {
                if stop_at_free {
                    return Some(col);
                }
                first_free.get_or_insert(col);
                continue;
            }
            let row = &self.rows[r as usize];
            let neg = -c;
            w[col] = Fp::ZERO;
            for (x, &y) in w[col + 1..].iter_mut().zip(&row[col + 1..]) {
                *x = x.mul_add(neg, y);
            }
        }
        first_free
    }

    /// Inserts `row`; the rank grows by one exactly when `row` is outside the span.
    pub fn insert(&mut self, row: &RowVector) -> Result<Insertion> {
        check_len(self.ambient_dim, row.len())?;
        let mut w = row.entries.clone();
        Ok(self.insert_owned(&mut w))
    }

    /// Like [`RowBasis::insert`], for a raw slice.
    pub fn insert_slice(&mut self, row: &[Fp]) -> Result<Insertion> {
        check_len(self.ambient_dim, row.len())?;
        let mut w = row.to_vec();
        Ok(self.insert_owned(&mut w))
    }

    fn insert_owned(&mut self, w: &mut Vec<Fp>) -> Insertion {
        match self.eliminate(w, true) {
            None => Insertion::Dependent,
            Some(pivot) => {
                // inverse exists: w[pivot] != 0
                let scale = w[pivot].inv().expect("pivot is nonzero");
                for x in &mut w[pivot..] {
                    *x *= scale;
                }
                self.row_of_col[pivot] = self.rows.len() as u32;
                self.pivots.push(pivot);
                self.rows.push(core::mem::take(w));
                Insertion::Independent
            }
        }
    }

    /// Residual of `row` after elimination against every pivot. The residual is
    /// zero exactly when `row` lies in the span. The basis is not modified.
    pub fn reduce(&self, row: &RowVector) -> Result<RowVector> {
        check_len(self.ambient_dim, row.len())?;
        let mut w = row.entries.clone();
        self.eliminate(&mut w, false);
        Ok(RowVector { entries: w })
    }

    pub fn contains(&self, row: &RowVector) -> Result<bool> {
        Ok(self.reduce(row)?.is_zero())
    }

    /// A basis of the annihilator `{x : r . x = 0 for every stored row r}`.
    ///
    /// A vector lies in the span of the basis iff it is orthogonal to every
    /// returned vector. This holds over any field, since the span and the
    /// annihilator have complementary dimensions.
    pub fn annihilator(&self) -> Vec<Vec<Fp>> {
        let n = self.ambient_dim;
        let free: Vec<usize> = (0..n).filter(|&c| self.row_of_col[c] == NO_PIVOT).collect();
        // back-substitution, pivots in decreasing column order
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_unstable_by_key(|&r| core::cmp::Reverse(self.pivots[r]));
        free.iter()
            .map(|&f| {
                let mut x = vec![Fp::ZERO; n];
                x[f] = Fp::ONE;
                for &r in &order {
                    let p = self.pivots[r];
                    let row = &self.rows[r];
                    let mut acc = Fp::ZERO;
                    for (a, b) in row[p + 1..].iter().zip(&x[p + 1..]) {
                        if !b.is_zero() {
                            acc = acc.mul_add(*a, *b);
                        }
                    }
                    x[p] = -acc;
                }
                x
            })
            .collect()
    }
}
