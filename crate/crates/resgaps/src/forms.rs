//! Integer-valued quadratic forms: representation search, Lagrange
//! four-square decompositions, and the critical-integer universality check.
//!
//! The form attached to a surface is `Q_X = adjugate(narrow Gram)`, which has
//! an integer symmetric matrix and satisfies
//! `Q_X(x) = det(narrow) * h(x_1 P_1 + ... + x_r P_r)` exactly. The module
//! also handles integer-valued forms with half-integral matrices, such as the
//! quaternary form
//!
//! ```text
//! q(x) = x1^2 + x2^2 + x3^2 + x4^2 - x1 x2 - x2 x3 - x3 x4
//! ```
//!
//! (half the Gram form of A4) which certifies that every even height is
//! attained on a lattice with an A4 sublattice.
//!
//! All searches are deterministic: witnesses are the lexicographically
//! smallest representative with positive leading coordinate, found by an
//! exact depth-first Fincke-Pohst walk that assigns coordinates in index
//! order.

use crate::arith::{rat, rint, ArithError, Rat, SymMatrix};
use crate::catalog::SurfaceCase;
use crate::lattice::Budget;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("form is not integer-valued: {0}")]
    NotIntegerValued(String),
    #[error("form is not positive-definite")]
    NotPositiveDefinite,
    #[error("representation search exceeded the budget of {0}")]
    BudgetExceeded(u64),
    #[error("case has Mordell-Weil rank zero")]
    RankZero,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A positive-definite quadratic form with integer values on integer points.
///
/// Integer-valuedness is equivalent to an integer diagonal and half-integer
/// off-diagonal entries of the Gram matrix; forms with a fully integral
/// matrix additionally report [`IntQuadraticForm::has_integer_matrix`], the
/// hypothesis under which the critical-integer list certifies universality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntQuadraticForm {
    gram: SymMatrix,
}

impl IntQuadraticForm {
    pub fn new(gram: SymMatrix) -> Result<Self, FormError> {
        for i in 0..gram.dim() {
            if !gram.get(i, i).is_integer() {
                return Err(FormError::NotIntegerValued(format!(
                    "diagonal entry ({i},{i}) = {}",
                    crate::arith::fmt_rat(gram.get(i, i))
                )));
            }
            for j in 0..i {
                if !(gram.get(i, j) * rint(2)).is_integer() {
                    return Err(FormError::NotIntegerValued(format!(
                        "doubled off-diagonal entry ({i},{j}) = {}",
                        crate::arith::fmt_rat(gram.get(i, j))
                    )));
                }
            }
        }
        if !gram.is_positive_definite() {
            return Err(FormError::NotPositiveDefinite);
        }
        Ok(IntQuadraticForm { gram })
    }

    /// The adjugate of the narrow Gram matrix of a surface case.
    pub fn build_qx(case: &SurfaceCase) -> Result<Self, FormError> {
        let narrow = case.narrow_gram().map_err(|_| FormError::RankZero)?;
        Self::new(narrow.adjugate())
    }

    /// The quaternary form `x1^2+x2^2+x3^2+x4^2-x1x2-x2x3-x3x4`, half the A4
    /// Gram form.
    pub fn quaternary_a4_half() -> Self {
        let half = rat(-1, 2);
        let rows = vec![
            vec![rint(1), half.clone(), rint(0), rint(0)],
            vec![half.clone(), rint(1), half.clone(), rint(0)],
            vec![rint(0), half.clone(), rint(1), half.clone()],
            vec![rint(0), rint(0), half, rint(1)],
        ];
        Self::new(SymMatrix::from_rows(rows).expect("symmetric")).expect("positive-definite")
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }

    pub fn has_integer_matrix(&self) -> bool {
        self.gram.is_integral()
    }

    /// Exact integer value of the form.
    pub fn eval(&self, x: &[i64]) -> BigInt {
        let v = self.gram.eval(x);
        debug_assert!(v.is_integer());
        v.to_integer()
    }

    /// Smallest witness `x` with `Q(x) = n`, or `None` with a completeness
    /// guarantee. Witness order: positive leading coordinate, then plain
    /// lexicographic comparison.
    pub fn represents(&self, n: &BigInt, budget: &Budget) -> Result<Option<Vec<i64>>, FormError> {
        if n.is_negative() {
            return Ok(None);
        }
        if n.is_zero() {
            return Ok(Some(vec![0; self.dim()]));
        }
        let walker = ShellWalker::new(&self.gram)?;
        walker.first_exact(&Rat::from_integer(n.clone()), budget)
    }

    /// Smallest integer in `[lo, hi]` (right-open when `open_right`)
    /// represented by the form, skipping multiples of `exclude_multiples_of`
    /// when set. Returns the witness and the represented integer; `None` is
    /// exhaustive over the whole interval.
    pub fn represents_in_interval(
        &self,
        lo: &Rat,
        hi: &Rat,
        open_right: bool,
        exclude_multiples_of: Option<&BigInt>,
        budget: &Budget,
    ) -> Result<Option<(Vec<i64>, BigInt)>, FormError> {
        let mut n = lo.ceil().to_integer();
        if n.is_negative() {
            n = BigInt::zero();
        }
        loop {
            let n_rat = Rat::from_integer(n.clone());
            if &n_rat > hi || (open_right && &n_rat == hi) {
                return Ok(None);
            }
            let excluded = exclude_multiples_of
                .map(|d| (&n % d).is_zero())
                .unwrap_or(false);
            if !excluded {
                if let Some(x) = self.represents(&n, budget)? {
                    return Ok(Some((x, n)));
                }
            }
            n += 1;
        }
    }
}

/// Exact shell search: depth-first over coordinates in index order, pruning
/// with the LDL^T split of the reversed Gram so the first hit is the
/// lexicographically smallest canonical witness.
struct ShellWalker {
    gram: SymMatrix,
    rev_lower: Vec<Vec<Rat>>,
    rev_diag: Vec<Rat>,
}

impl ShellWalker {
    fn new(gram: &SymMatrix) -> Result<Self, FormError> {
        let n = gram.dim();
        let reversed = SymMatrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| gram.get(n - 1 - i, n - 1 - j).clone()).collect())
                .collect(),
        )
        .expect("reversal preserves symmetry");
        let split = reversed.ldlt().map_err(|_| FormError::NotPositiveDefinite)?;
        Ok(ShellWalker {
            gram: gram.clone(),
            rev_lower: split.lower,
            rev_diag: split.diag,
        })
    }

    /// In the reversed basis `y_i = x_{n-1-i}`, the walk assigns
    /// `y_{n-1} = x_0` first; descending levels therefore fix `x` in index
    /// order, and ascending candidate loops yield lexicographic order.
    fn first_exact(&self, target: &Rat, budget: &Budget) -> Result<Option<Vec<i64>>, FormError> {
        let n = self.gram.dim();
        let mut y = vec![0i64; n];
        let mut steps: u64 = 0;
        let hit = self.descend(n, target.clone(), target, &mut y, &mut steps, budget, false)?;
        Ok(hit.map(|y| {
            let mut x: Vec<i64> = y.into_iter().rev().collect();
            if let Some(first) = x.iter().find(|&&v| v != 0) {
                if *first < 0 {
                    for v in &mut x {
                        *v = -*v;
                    }
                }
            }
            x
        }))
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        level: usize,
        remaining: Rat,
        target: &Rat,
        y: &mut Vec<i64>,
        steps: &mut u64,
        budget: &Budget,
        nonzero_seen: bool,
    ) -> Result<Option<Vec<i64>>, FormError> {
        let i = level - 1;
        let mut center = Rat::zero();
        for j in level..y.len() {
            if y[j] != 0 {
                center += &self.rev_lower[j][i] * rint(y[j]);
            }
        }
        let d = &self.rev_diag[i];
        let radius_sq = &remaining / d;
        let s = crate::arith::floor_sqrt_rat(&radius_sq);
        let lo_big = (-&center).floor().to_integer() - &s - 1i32;
        let hi_big = (-&center).ceil().to_integer() + &s + 1i32;
        let lo = i64::try_from(&lo_big).map_err(|_| FormError::BudgetExceeded(budget.max_vectors))?;
        let hi = i64::try_from(&hi_big).map_err(|_| FormError::BudgetExceeded(budget.max_vectors))?;
        // y assigns x in reverse; the canonical-sign constraint (first nonzero
        // x-coordinate positive) is applied after reversal, so both signs are
        // explored here except that an all-zero suffix pins t >= 0
        let start = if nonzero_seen { lo } else { 0 };
        for t in start..=hi {
            *steps += 1;
            if *steps > budget.max_vectors {
                return Err(FormError::BudgetExceeded(budget.max_vectors));
            }
            let dev = rint(t) + &center;
            let used = d * &dev * &dev;
            if used > remaining {
                continue;
            }
            y[i] = t;
            let hit = if i == 0 {
                if &used == &remaining {
                    Some(y.clone())
                } else {
                    None
                }
            } else {
                let rem = &remaining - &used;
                self.descend(i, rem, target, y, steps, budget, nonzero_seen || t != 0)?
            };
            if hit.is_some() {
                y[i] = 0;
                return Ok(hit);
            }
        }
        y[i] = 0;
        Ok(None)
    }
}

/// Lagrange decomposition: the lexicographically smallest quadruple
/// `a1 >= a2 >= a3 >= a4 >= 0` with `a1^2 + a2^2 + a3^2 + a4^2 = n`.
pub fn four_square(n: u64) -> (u64, u64, u64, u64) {
    if n == 0 {
        return (0, 0, 0, 0);
    }
    let isqrt = |m: u64| -> u64 {
        let s = (m as f64).sqrt() as u64;
        // float hint, exact fix-up
        let mut s = s.saturating_sub(2);
        while (s + 1) * (s + 1) <= m {
            s += 1;
        }
        s
    };
    let ceil_sqrt_div = |m: u64, k: u64| -> u64 {
        // smallest a with a*a*k >= m
        let mut a = isqrt(m / k);
        while a * a * k < m {
            a += 1;
        }
        a
    };
    let mut a1 = ceil_sqrt_div(n, 4);
    loop {
        let r1 = n - a1 * a1;
        let mut a2 = ceil_sqrt_div(r1, 3);
        while a2 <= a1 && a2 * a2 <= r1 {
            let r2 = r1 - a2 * a2;
            let mut a3 = ceil_sqrt_div(r2, 2);
            while a3 <= a2 && a3 * a3 <= r2 {
                let r3 = r2 - a3 * a3;
                let a4 = isqrt(r3);
                if a4 * a4 == r3 && a4 <= a3 {
                    return (a1, a2, a3, a4);
                }
                a3 += 1;
            }
            a2 += 1;
        }
        a1 += 1;
        debug_assert!(a1 * a1 <= n, "four squares always exist");
    }
}

/// The 29 critical integers: an integer-valued positive-definite form
/// represents every positive integer if and only if it represents each of
/// these.
pub const CRITICAL_INTEGERS: [u32; 29] = [
    1, 2, 3, 5, 6, 7, 10, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29, 30, 31, 34, 35, 37, 42, 58, 93,
    110, 145, 203, 290,
];

/// Witness (or recorded failure) for each critical integer.
pub fn check_290_critical(
    form: &IntQuadraticForm,
    budget: &Budget,
) -> Result<Vec<(u32, Option<Vec<i64>>)>, FormError> {
    CRITICAL_INTEGERS
        .iter()
        .map(|&n| {
            let w = form.represents(&BigInt::from(n), budget)?;
            Ok((n, w))
        })
        .collect()
}
