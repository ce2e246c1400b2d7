//! Exact rational scalars and small symmetric-matrix arithmetic.
//!
//! Everything downstream (heights, contribution bounds, Gram matrices, witness
//! certificates) is computed over `Rat = Ratio<BigInt>`; there is no floating
//! point anywhere in the decision path. Matrices are small (rank of a
//! Mordell-Weil lattice is at most 8), so the linear algebra here is plain
//! dense arithmetic: LDL^T for positive-definiteness and enumeration pivots,
//! cofactor adjugates, exact determinants and inverses.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational scalar. Always normalized: positive denominator, reduced.
pub type Rat = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("matrix is not positive-definite (pivot {0} is not positive)")]
    NotPositiveDefinite(usize),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse rational from `{0}`")]
    BadRational(String),
}

/// Parse `p/q` or `p` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let s = s.trim();
    let bad = || ArithError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// Render a rational as `p/q` (or `p` when integral). Inverse of [`parse_rat`].
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// If `n` is a perfect square, its nonnegative root.
pub fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Is `r` the square of an integer? Returns the nonnegative root.
pub fn rat_is_integer_square(r: &Rat) -> Option<BigInt> {
    if !r.is_integer() {
        return None;
    }
    int_sqrt_exact(r.numer())
}

/// Is `r` the square of a rational? `p/q` in lowest terms is a square iff
/// both `p` and `q` are squares.
pub fn rat_is_rational_square(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let p = int_sqrt_exact(r.numer())?;
    let q = int_sqrt_exact(r.denom())?;
    Some(Rat::new(p, q))
}

/// Largest integer `x` with `x*x <= r`; requires `r >= 0`.
///
/// Exact: `floor(sqrt(p/q)) = isqrt(floor(p/q))`, since `x^2 <= floor(p/q)`
/// implies `x^2 <= p/q`, and `(x+1)^2 > floor(p/q)` forces
/// `(x+1)^2 >= floor(p/q)+1 > p/q`.
pub fn floor_sqrt_rat(r: &Rat) -> BigInt {
    assert!(!r.is_negative(), "floor_sqrt_rat of negative rational");
    isqrt(&r.floor().to_integer())
}

/// Smallest integer `x >= 0` with `x*x >= r`; requires `r >= 0`.
pub fn ceil_sqrt_rat(r: &Rat) -> BigInt {
    assert!(!r.is_negative(), "ceil_sqrt_rat of negative rational");
    let f = floor_sqrt_rat(r);
    if &Rat::from_integer(&f * &f) == r {
        f
    } else {
        f + 1
    }
}

/// A symmetric matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<Rat>, // row-major, dim*dim
}

/// Unit-lower-triangular factor and positive diagonal of an LDL^T split.
#[derive(Debug, Clone)]
pub struct Ldlt {
    pub lower: Vec<Vec<Rat>>, // lower[i][j] for j < i; implicit 1 on the diagonal
    pub diag: Vec<Rat>,
}

impl SymMatrix {
    /// Build from full row-major entries, checking symmetry.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, ArithError> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(ArithError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(ArithError::NotSymmetric(i, j));
                }
            }
        }
        let entries = rows.into_iter().flatten().collect();
        Ok(SymMatrix { dim, entries })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| rint(v)).collect())
            .collect();
        Self::from_rows(rows).expect("integer literal matrix must be symmetric")
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMatrix {
            dim,
            entries: vec![Rat::zero(); dim * dim],
        };
        for i in 0..dim {
            m.entries[i * dim + i] = Rat::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Scale every entry by `c`.
    pub fn scaled(&self, c: &Rat) -> Self {
        SymMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Block-diagonal direct sum.
    pub fn block_diag(blocks: &[SymMatrix]) -> Self {
        let dim = blocks.iter().map(|b| b.dim).sum();
        let mut entries = vec![Rat::zero(); dim * dim];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    entries[(off + i) * dim + (off + j)] = b.get(i, j).clone();
                }
            }
            off += b.dim;
        }
        SymMatrix { dim, entries }
    }

    pub fn max_diagonal(&self) -> Rat {
        (0..self.dim)
            .map(|i| self.get(i, i).clone())
            .max()
            .expect("nonempty matrix")
    }

    /// All entries integral.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    /// Even integral lattice Gram: integer entries, even diagonal.
    pub fn is_even_integral(&self) -> bool {
        if !self.is_integral() {
            return false;
        }
        (0..self.dim).all(|i| (self.get(i, i).to_integer() % 2u8).is_zero())
    }

    /// x^T M x for integer coordinates.
    pub fn eval(&self, x: &[i64]) -> Rat {
        assert_eq!(x.len(), self.dim);
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if x[j] == 0 {
                    continue;
                }
                acc += self.get(i, j) * rint(x[i]) * rint(x[j]);
            }
        }
        acc
    }

    /// x^T M y for integer coordinates.
    pub fn eval_pair(&self, x: &[i64], y: &[i64]) -> Rat {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if x[i] == 0 || y[j] == 0 {
                    continue;
                }
                acc += self.get(i, j) * rint(x[i]) * rint(y[j]);
            }
        }
        acc
    }

    /// M x as a rational vector.
    pub fn apply(&self, x: &[i64]) -> Vec<Rat> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.dim {
                    if x[j] != 0 {
                        acc += self.get(i, j) * rint(x[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Integer-matrix times integer vector, exact.
    pub fn apply_int(&self, x: &[BigInt]) -> Vec<Rat> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.dim {
                    acc += self.get(i, j) * Rat::from_integer(x[j].clone());
                }
                acc
            })
            .collect()
    }

    /// Exact LDL^T split. Fails on the first nonpositive pivot, which is also
    /// the positive-definiteness test used everywhere in this crate.
    pub fn ldlt(&self) -> Result<Ldlt, ArithError> {
        let n = self.dim;
        let mut lower = vec![vec![Rat::zero(); n]; n];
        let mut diag = vec![Rat::zero(); n];
        for j in 0..n {
            let mut d = self.get(j, j).clone();
            for k in 0..j {
                d -= &lower[j][k] * &lower[j][k] * &diag[k];
            }
            if !d.is_positive() {
                return Err(ArithError::NotPositiveDefinite(j));
            }
            diag[j] = d;
            for i in (j + 1)..n {
                let mut v = self.get(i, j).clone();
                for k in 0..j {
                    v -= &lower[i][k] * &lower[j][k] * &diag[k];
                }
                lower[i][j] = v / &diag[j];
            }
        }
        Ok(Ldlt { lower, diag })
    }

    pub fn is_positive_definite(&self) -> bool {
        self.ldlt().is_ok()
    }

    /// Exact determinant by fraction-preserving Gaussian elimination.
    pub fn det(&self) -> Rat {
        let n = self.dim;
        let mut a = self.rows();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero());
            let Some(p) = pivot else {
                return Rat::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det *= a[col][col].clone();
            let inv = a[col][col].clone();
            for r in (col + 1)..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &inv;
                for c in col..n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }

    fn minor_det(&self, skip_row: usize, skip_col: usize) -> Rat {
        let n = self.dim;
        let rows: Vec<Vec<Rat>> = (0..n)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != skip_col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        // minors are square but not symmetric in general; reuse the same
        // elimination on a plain grid
        det_general(rows)
    }

    /// Adjugate matrix: `m * adjugate(m) = det(m) * I` exactly, also for
    /// singular `m`. The 1x1 adjugate is `[[1]]`.
    pub fn adjugate(&self) -> SymMatrix {
        let n = self.dim;
        if n == 1 {
            return SymMatrix::identity(1);
        }
        let mut entries = vec![Rat::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                // adj(m)[i][j] = cofactor(j, i); cofactors of a symmetric
                // matrix are symmetric, so the transpose is free
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                entries[i * n + j] = rint(sign) * self.minor_det(j, i);
            }
        }
        SymMatrix { dim: n, entries }
    }

    /// Exact inverse: adjugate over determinant.
    pub fn inverse(&self) -> Result<SymMatrix, ArithError> {
        let d = self.det();
        if d.is_zero() {
            return Err(ArithError::SingularMatrix);
        }
        let adj = self.adjugate();
        Ok(SymMatrix {
            dim: self.dim,
            entries: adj.entries.into_iter().map(|e| e / &d).collect(),
        })
    }

    /// Full product with another symmetric matrix (result need not be
    /// symmetric; returned as rows).
    pub fn mul_rows(&self, other: &SymMatrix) -> Vec<Vec<Rat>> {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = Rat::zero();
                        for k in 0..n {
                            acc += self.get(i, k) * other.get(k, j);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// Does `self * other == identity`?
    pub fn is_inverse_of(&self, other: &SymMatrix) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let prod = self.mul_rows(other);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let want = if i == j { Rat::one() } else { Rat::zero() };
                if prod[i][j] != want {
                    return false;
                }
            }
        }
        true
    }
}

fn det_general(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return Rat::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &inv;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", fmt_rat(self.get(i, j)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> SymMatrix {
        SymMatrix::from_i64_rows(rows)
    }

    #[test]
    fn ldlt_1x1() {
        let a = m(&[&[2]]);
        let f = a.ldlt().unwrap();
        assert_eq!(f.diag, vec![rint(2)]);
    }

    #[test]
    fn ldlt_a2() {
        // hand elimination: pivot 2, multiplier -1/2, Schur complement 3/2
        let a = m(&[&[2, -1], &[-1, 2]]);
        let f = a.ldlt().unwrap();
        assert_eq!(f.diag, vec![rint(2), rat(3, 2)]);
        assert_eq!(f.lower[1][0], rat(-1, 2));
    }

    #[test]
    fn ldlt_rejects_indefinite() {
        // second leading minor is 1*1 - 2*2 = -3
        let a = m(&[&[1, 2], &[2, 1]]);
        assert_eq!(a.ldlt().unwrap_err(), ArithError::NotPositiveDefinite(1));
    }

    #[test]
    fn adjugate_2x2_swaps_diagonal() {
        let a = m(&[&[2, -1], &[-1, 2]]);
        assert_eq!(a.adjugate(), m(&[&[2, 1], &[1, 2]]));
    }

    #[test]
    fn adjugate_1x1_is_unit() {
        assert_eq!(m(&[&[2]]).adjugate(), m(&[&[1]]));
    }

    #[test]
    fn adjugate_a3_product_identity() {
        let a = m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(a.det(), rint(4));
        let adj = a.adjugate();
        let prod = a.mul_rows(&adj);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { rint(4) } else { Rat::zero() };
                assert_eq!(prod[i][j], want);
            }
        }
    }

    #[test]
    fn det_examples() {
        assert_eq!(m(&[&[2]]).det(), rint(2));
        assert_eq!(m(&[&[2, -1], &[-1, 2]]).det(), rint(3));
        assert_eq!(m(&[&[0]]).det(), rint(0));
    }

    #[test]
    fn inverse_examples() {
        let a = SymMatrix::from_rows(vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(a.inverse().unwrap(), m(&[&[2]]));

        // free Gram of a rank-2 case: (1/15)[[2,1],[1,8]]
        let b = SymMatrix::from_rows(vec![
            vec![rat(2, 15), rat(1, 15)],
            vec![rat(1, 15), rat(8, 15)],
        ])
        .unwrap();
        let inv = b.inverse().unwrap();
        assert_eq!(inv, m(&[&[8, -1], &[-1, 2]]));
        assert!(b.is_inverse_of(&inv));

        assert_eq!(m(&[&[0]]).inverse().unwrap_err(), ArithError::SingularMatrix);
    }

    #[test]
    fn rational_parsing_roundtrip() {
        for s in ["3", "-5", "1/2", "-13/6", "0"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(fmt_rat(&r), s);
        }
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn square_detection() {
        assert_eq!(rat_is_integer_square(&rint(4)), Some(BigInt::from(2)));
        assert_eq!(rat_is_integer_square(&rint(5)), None);
        assert_eq!(rat_is_integer_square(&rat(9, 4)), None);
        assert_eq!(rat_is_rational_square(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rat_is_rational_square(&rat(5, 4)), None);
    }

    #[test]
    fn sqrt_bounds() {
        assert_eq!(floor_sqrt_rat(&rat(39, 10)), BigInt::from(1));
        assert_eq!(floor_sqrt_rat(&rat(41, 10)), BigInt::from(2));
        assert_eq!(ceil_sqrt_rat(&rint(16)), BigInt::from(4));
        assert_eq!(ceil_sqrt_rat(&rat(161, 10)), BigInt::from(5));
    }

    fn arb_small_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_pd_matrix(dim: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(arb_small_rat(), dim * dim).prop_map(move |v| {
            // A^T A + dim * I is positive-definite for any A
            let a: Vec<Vec<Rat>> = (0..dim)
                .map(|i| (0..dim).map(|j| v[i * dim + j].clone()).collect())
                .collect();
            let rows: Vec<Vec<Rat>> = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let mut acc = if i == j { rint(dim as i64) } else { Rat::zero() };
                            for k in 0..dim {
                                acc += &a[k][i] * &a[k][j];
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            SymMatrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ldlt_reconstructs(mat in (1usize..=4).prop_flat_map(arb_pd_matrix)) {
            let f = mat.ldlt().unwrap();
            let n = mat.dim();
            for i in 0..n {
                for j in 0..=i {
                    // (L D L^T)[i][j]
                    let mut acc = Rat::zero();
                    for k in 0..n {
                        let li = if k < i { f.lower[i][k].clone() }
                                 else if k == i { Rat::one() } else { Rat::zero() };
                        let lj = if k < j { f.lower[j][k].clone() }
                                 else if k == j { Rat::one() } else { Rat::zero() };
                        acc += li * &f.diag[k] * lj;
                    }
                    prop_assert_eq!(&acc, mat.get(i, j));
                }
            }
        }

        #[test]
        fn adjugate_det_inverse_consistent(mat in (1usize..=4).prop_flat_map(arb_pd_matrix)) {
            let d = mat.det();
            let adj = mat.adjugate();
            let prod = mat.mul_rows(&adj);
            for i in 0..mat.dim() {
                for j in 0..mat.dim() {
                    let want = if i == j { d.clone() } else { Rat::zero() };
                    prop_assert_eq!(&prod[i][j], &want);
                }
            }
            let inv = mat.inverse().unwrap();
            prop_assert!(mat.is_inverse_of(&inv));
        }
    }
}
