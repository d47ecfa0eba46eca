//! Exact integer matrices and determinants.
//!
//! Indices are 0-based throughout: row `i` here is row `i + 1` in the usual
//! 1-based matrix notation.
//!
//! Three determinant routines are provided. [`det_berkowitz`] is the
//! production path (division free, polynomial time). [`det_cofactor`] and
//! [`det_lagrange`] are exponential-time oracles used to cross-check it and
//! carry hard dimension guards.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type ExactInt = BigInt;

/// Largest dimension accepted by [`det_cofactor`].
pub const COFACTOR_MAX_N: usize = 12;
/// Largest dimension accepted by [`det_lagrange`].
pub const LAGRANGE_MAX_N: usize = 9;

/// Dense square matrix of exact integers, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<ExactInt>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<ExactInt>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from rows of machine integers.
    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self>
    where
        T: Copy + Into<ExactInt>,
        R: AsRef<[T]>,
    {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| x.into()));
        }
        Self::new(n, entries)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![ExactInt::zero(); n * n])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.entries[i * n + i] = ExactInt::one();
        }
        Ok(m)
    }

    /// Permutation matrix with a one at `(i, perm[i])`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut m = Self::zeros(n)?;
        let mut seen = vec![false; n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n || seen[j] {
                return Err(Error::IndexOutOfRange { row: i, col: j, n });
            }
            seen[j] = true;
            m.entries[i * n + j] = ExactInt::one();
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &ExactInt {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: ExactInt) {
        self.entries[i * self.n + j] = value;
    }

    pub fn entries(&self) -> &[ExactInt] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ExactInt]> {
        self.entries.chunks(self.n)
    }

    /// Square submatrix keeping the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::ShapeMismatch {
                expected: rows.len(),
                found: cols.len(),
            });
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                if i >= self.n || j >= self.n {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: j,
                        n: self.n,
                    });
                }
                entries.push(self.get(i, j).clone());
            }
        }
        Self::new(rows.len(), entries)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            .finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.rows().enumerate() {
            if r > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    /// Rows of decimal strings, so entries of any magnitude survive JSON.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .rows()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// The (i, j)-minor: `m` with row `i` and column `j` removed.
pub fn minor(m: &IntMatrix, i: usize, j: usize) -> Result<IntMatrix> {
    let n = m.dim();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { row: i, col: j, n });
    }
    if n < 2 {
        return Err(Error::EmptyDimension);
    }
    let mut entries = Vec::with_capacity((n - 1) * (n - 1));
    for (r, row) in m.rows().enumerate() {
        if r == i {
            continue;
        }
        for (c, x) in row.iter().enumerate() {
            if c != j {
                entries.push(x.clone());
            }
        }
    }
    IntMatrix::new(n - 1, entries)
}

/// Determinant of the (i, j)-minor, with the empty minor of a 1×1 matrix
/// taken to have determinant 1.
pub fn minor_det(m: &IntMatrix, i: usize, j: usize) -> Result<ExactInt> {
    let n = m.dim();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { row: i, col: j, n });
    }
    if n == 1 {
        return Ok(ExactInt::one());
    }
    Ok(det_berkowitz(&minor(m, i, j)?))
}

/// Determinant by Berkowitz's algorithm.
///
/// Builds the characteristic polynomial of each leading principal submatrix
/// from the previous one through a lower-triangular Toeplitz matrix whose
/// first column is `1, -a, -r·c, -r·A·c, …, -r·A^{k-2}·c`. Only ring
/// operations are used, O(n⁴) multiplications in total.
pub fn det_berkowitz(m: &IntMatrix) -> ExactInt {
    let n = m.dim();
    // Characteristic polynomial coefficients of the leading k×k block,
    // highest degree first: det(xI - A_k) = poly[0] x^k + … + poly[k].
    let mut poly: Vec<ExactInt> = vec![ExactInt::one()];

    for k in 1..=n {
        let last = k - 1;
        let a = m.get(last, last);
        // Toeplitz column: t[0] = 1, t[1] = -a, t[2 + p] = -(r · A^p · c).
        let mut toeplitz = Vec::with_capacity(k + 1);
        toeplitz.push(ExactInt::one());
        toeplitz.push(-a.clone());

        // c = column entries above the corner, r = row entries left of it.
        let mut vec_c: Vec<ExactInt> = (0..last).map(|i| m.get(i, last).clone()).collect();
        for _ in 0..last {
            let dot = (0..last).fold(ExactInt::zero(), |acc, j| acc + m.get(last, j) * &vec_c[j]);
            toeplitz.push(-dot);
            vec_c = (0..last)
                .map(|i| {
                    (0..last).fold(ExactInt::zero(), |acc, j| acc + m.get(i, j) * &vec_c[j])
                })
                .collect();
        }

        // (k+1)×k Toeplitz times the length-k previous polynomial.
        let next: Vec<ExactInt> = (0..=k)
            .map(|row| {
                (0..k.min(row + 1)).fold(ExactInt::zero(), |acc, col| {
                    acc + &toeplitz[row - col] * &poly[col]
                })
            })
            .collect();
        poly = next;
    }

    let constant = poly.pop().expect("polynomial has n + 1 coefficients");
    if n.is_multiple_of(2) {
        constant
    } else {
        -constant
    }
}

/// Determinant by recursive cofactor expansion along the last row.
pub fn det_cofactor(m: &IntMatrix) -> Result<ExactInt> {
    let n = m.dim();
    if n > COFACTOR_MAX_N {
        return Err(Error::DimensionTooLarge {
            op: "det_cofactor",
            n,
            max: COFACTOR_MAX_N,
        });
    }
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    Ok(cofactor_rec(m, &rows, &cols))
}

fn cofactor_rec(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> ExactInt {
    let k = rows.len();
    if k == 0 {
        return ExactInt::one();
    }
    let last = rows[k - 1];
    let mut total = ExactInt::zero();
    let mut sub_cols = Vec::with_capacity(k - 1);
    for (pos, &c) in cols.iter().enumerate() {
        let entry = m.get(last, c);
        if entry.is_zero() {
            continue;
        }
        sub_cols.clear();
        sub_cols.extend(cols.iter().copied().filter(|&x| x != c));
        let term = entry * cofactor_rec(m, &rows[..k - 1], &sub_cols);
        // sign (-1)^{(k-1) + pos}
        if (k - 1 + pos).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Determinant as the signed sum over all n! permutations.
pub fn det_lagrange(m: &IntMatrix) -> Result<ExactInt> {
    let n = m.dim();
    if n > LAGRANGE_MAX_N {
        return Err(Error::DimensionTooLarge {
            op: "det_lagrange",
            n,
            max: LAGRANGE_MAX_N,
        });
    }
    let mut total = ExactInt::zero();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    lagrange_rec(m, &mut perm, &mut used, &mut total);
    Ok(total)
}

fn lagrange_rec(m: &IntMatrix, perm: &mut Vec<usize>, used: &mut [bool], total: &mut ExactInt) {
    let n = m.dim();
    if perm.len() == n {
        let inversions = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| perm[a] > perm[b])
            .count();
        let product = perm
            .iter()
            .enumerate()
            .fold(ExactInt::one(), |acc, (i, &j)| acc * m.get(i, j));
        if inversions % 2 == 0 {
            *total += product;
        } else {
            *total -= product;
        }
        return;
    }
    for j in 0..n {
        if !used[j] {
            used[j] = true;
            perm.push(j);
            lagrange_rec(m, perm, used, total);
            perm.pop();
            used[j] = false;
        }
    }
}

/// Position of the least significant 1-bit of `|y|`; `None` when `y = 0`.
///
/// For `y ≠ 0` this is the unique `q` with `y = ±2^q · z`, `z` odd.
pub fn numz(y: &ExactInt) -> Option<u64> {
    y.abs().trailing_zeros()
}
