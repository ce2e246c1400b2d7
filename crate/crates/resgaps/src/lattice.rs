//! Root-lattice constructions, duals, exact short-vector enumeration, and
//! narrow-sublattice membership.
//!
//! A [`LatticeSpec`] is a symbolic expression (`A5`, `E7*`, `<1/6>+<1/6>`,
//! `gram[[2/15,1/15],[1/15,8/15]]`, ...) that realizes deterministically to a
//! positive-definite Gram matrix in a fixed generator basis. The A/D/E leaves
//! use the standard Cartan-matrix basis (diagonal 2, off-diagonal -1 along the
//! Dynkin diagram), so witness coordinates are reproducible.
//!
//! Enumeration is an exact Fincke-Pohst walk over the LDL^T split: no
//! floating point, no missed vectors. Sections `P` and `-P` have the same
//! height, so one representative per sign pair is returned.

use crate::arith::{fmt_rat, parse_rat, ArithError, Rat, SymMatrix};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("malformed lattice spec: {0}")]
    MalformedSpec(String),
    #[error("enumeration exceeded the vector budget of {0}")]
    BoundTooLarge(u64),
    #[error("coordinate dimension {got} does not match lattice rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Symbolic description of a positive-definite lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeSpec {
    /// Root lattice A_n, n >= 1.
    RootA(u32),
    /// Root lattice D_n, n >= 4.
    RootD(u32),
    /// Root lattice E_n, n in {6, 7, 8}.
    RootE(u32),
    /// Rank-1 lattice `<q>` with Gram `[[q]]`, q > 0.
    ScaledUnit(Rat),
    /// An explicit symmetric positive-definite Gram matrix.
    ExplicitGram(SymMatrix),
    /// Orthogonal direct sum.
    DirectSum(Vec<LatticeSpec>),
    /// Dual lattice: Gram is the inverse of the child's Gram.
    Dual(Box<LatticeSpec>),
}

impl LatticeSpec {
    pub fn dual(self) -> LatticeSpec {
        LatticeSpec::Dual(Box::new(self))
    }

    /// Realize to a Gram matrix in the canonical generator basis.
    pub fn realize(&self) -> Result<SymMatrix, LatticeError> {
        let m = self.realize_unchecked()?;
        if !m.is_positive_definite() {
            return Err(LatticeError::MalformedSpec(format!(
                "realization of `{self}` is not positive-definite"
            )));
        }
        Ok(m)
    }

    fn realize_unchecked(&self) -> Result<SymMatrix, LatticeError> {
        match self {
            LatticeSpec::RootA(n) => {
                if *n < 1 {
                    return Err(LatticeError::MalformedSpec("A_n needs n >= 1".into()));
                }
                Ok(cartan_chain(*n as usize))
            }
            LatticeSpec::RootD(n) => {
                if *n < 4 {
                    return Err(LatticeError::MalformedSpec("D_n needs n >= 4".into()));
                }
                // chain 1..n-1 with node n attached to node n-2
                let n = *n as usize;
                let mut adj = chain_edges(n - 1);
                adj.push((n - 3, n - 1));
                Ok(cartan_from_edges(n, &adj))
            }
            LatticeSpec::RootE(n) => {
                if !matches!(n, 6 | 7 | 8) {
                    return Err(LatticeError::MalformedSpec("E_n needs n in {6,7,8}".into()));
                }
                // Bourbaki: chain 1-3-4-5-...-n with node 2 attached to node 4
                let n = *n as usize;
                let mut edges = vec![(0, 2), (1, 3)];
                for i in 2..(n - 1) {
                    edges.push((i, i + 1));
                }
                Ok(cartan_from_edges(n, &edges))
            }
            LatticeSpec::ScaledUnit(q) => {
                if !q.is_positive() {
                    return Err(LatticeError::MalformedSpec("<q> needs q > 0".into()));
                }
                Ok(SymMatrix::from_rows(vec![vec![q.clone()]]).expect("1x1"))
            }
            LatticeSpec::ExplicitGram(g) => Ok(g.clone()),
            LatticeSpec::DirectSum(parts) => {
                if parts.is_empty() {
                    return Err(LatticeError::MalformedSpec("empty direct sum".into()));
                }
                let blocks: Result<Vec<_>, _> =
                    parts.iter().map(|p| p.realize_unchecked()).collect();
                Ok(SymMatrix::block_diag(&blocks?))
            }
            LatticeSpec::Dual(inner) => {
                let g = inner.realize_unchecked()?;
                g.inverse().map_err(|_| {
                    LatticeError::MalformedSpec("dual of a singular Gram".into())
                })
            }
        }
    }

    /// Parse the compact textual form, e.g. `A1*+<1/4>`.
    pub fn parse(s: &str) -> Result<LatticeSpec, LatticeError> {
        let mut p = SpecParser { s, pos: 0 };
        let spec = p.parse_sum()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(LatticeError::MalformedSpec(format!(
                "trailing input at byte {} of `{}`",
                p.pos, s
            )));
        }
        Ok(spec)
    }
}

fn chain_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
}

fn cartan_chain(n: usize) -> SymMatrix {
    cartan_from_edges(n, &chain_edges(n))
}

fn cartan_from_edges(n: usize, edges: &[(usize, usize)]) -> SymMatrix {
    let mut rows = vec![vec![Rat::zero(); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = crate::arith::rint(2);
    }
    for &(a, b) in edges {
        rows[a][b] = crate::arith::rint(-1);
        rows[b][a] = crate::arith::rint(-1);
    }
    SymMatrix::from_rows(rows).expect("cartan matrices are symmetric")
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeSpec::RootA(n) => write!(f, "A{n}"),
            LatticeSpec::RootD(n) => write!(f, "D{n}"),
            LatticeSpec::RootE(n) => write!(f, "E{n}"),
            LatticeSpec::ScaledUnit(q) => write!(f, "<{}>", fmt_rat(q)),
            LatticeSpec::ExplicitGram(g) => write!(f, "gram{g}"),
            LatticeSpec::DirectSum(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if matches!(p, LatticeSpec::DirectSum(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            LatticeSpec::Dual(inner) => {
                if matches!(**inner, LatticeSpec::DirectSum(_)) {
                    write!(f, "({inner})*")
                } else {
                    write!(f, "{inner}*")
                }
            }
        }
    }
}

struct SpecParser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> SpecParser<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn fail(&self, what: &str) -> LatticeError {
        LatticeError::MalformedSpec(format!("{what} at byte {} of `{}`", self.pos, self.s))
    }

    fn parse_sum(&mut self) -> Result<LatticeSpec, LatticeError> {
        let mut parts = vec![self.parse_atom()?];
        while self.eat("+") {
            parts.push(self.parse_atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            LatticeSpec::DirectSum(parts)
        })
    }

    fn parse_atom(&mut self) -> Result<LatticeSpec, LatticeError> {
        let mut spec = self.parse_primary()?;
        while self.eat("*") {
            spec = spec.dual();
        }
        Ok(spec)
    }

    fn parse_primary(&mut self) -> Result<LatticeSpec, LatticeError> {
        self.skip_ws();
        if self.eat("(") {
            let inner = self.parse_sum()?;
            if !self.eat(")") {
                return Err(self.fail("expected `)`"));
            }
            return Ok(inner);
        }
        if self.eat("<") {
            let end = self
                .rest()
                .find('>')
                .ok_or_else(|| self.fail("expected `>`"))?;
            let q = parse_rat(&self.rest()[..end]).map_err(LatticeError::Arith)?;
            self.pos += end + 1;
            return Ok(LatticeSpec::ScaledUnit(q));
        }
        if self.eat("gram") {
            return self.parse_gram();
        }
        let family = self
            .rest()
            .chars()
            .next()
            .ok_or_else(|| self.fail("expected a lattice atom"))?;
        if matches!(family, 'A' | 'D' | 'E') {
            self.pos += 1;
            let digits: String = self
                .rest()
                .chars()
                .take_while(|c| c.is_ascii_digit())
                .collect();
            if digits.is_empty() {
                return Err(self.fail("expected a rank after the family letter"));
            }
            self.pos += digits.len();
            let n: u32 = digits
                .parse()
                .map_err(|_| self.fail("rank out of range"))?;
            return Ok(match family {
                'A' => LatticeSpec::RootA(n),
                'D' => LatticeSpec::RootD(n),
                _ => LatticeSpec::RootE(n),
            });
        }
        Err(self.fail("expected a lattice atom"))
    }

    fn parse_gram(&mut self) -> Result<LatticeSpec, LatticeError> {
        if !self.eat("[") {
            return Err(self.fail("expected `[` after gram"));
        }
        let mut rows = Vec::new();
        loop {
            if !self.eat("[") {
                return Err(self.fail("expected `[` opening a gram row"));
            }
            let mut row = Vec::new();
            loop {
                self.skip_ws();
                let end = self.rest().find([',', ']']).ok_or_else(|| {
                    self.fail("unterminated gram row")
                })?;
                row.push(parse_rat(&self.rest()[..end]).map_err(LatticeError::Arith)?);
                let sep = self.rest().as_bytes()[end];
                self.pos += end + 1;
                if sep == b']' {
                    break;
                }
            }
            rows.push(row);
            if self.eat(",") {
                continue;
            }
            if self.eat("]") {
                break;
            }
            return Err(self.fail("expected `,` or `]` after a gram row"));
        }
        let m = SymMatrix::from_rows(rows).map_err(LatticeError::Arith)?;
        Ok(LatticeSpec::ExplicitGram(m))
    }
}

/// A lattice vector in the generator basis, with its cached norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
    pub norm: Rat,
}

/// Enumeration budget; counts accepted vectors and exploration steps.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_vectors: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vectors: 10_000_000,
        }
    }
}

/// All lattice vectors `x` with `x^T G x <= bound`, one representative per
/// sign pair (first nonzero coordinate positive) plus the zero vector,
/// sorted by norm then lexicographic coordinates.
pub fn short_vectors(
    gram: &SymMatrix,
    bound: &Rat,
    budget: &Budget,
) -> Result<Vec<LatticeVector>, LatticeError> {
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let split = gram.ldlt()?;
    let n = gram.dim();
    let mut out = vec![LatticeVector {
        coords: vec![0; n],
        norm: Rat::zero(),
    }];
    let mut x = vec![0i64; n];
    let mut count: u64 = 0;
    // levels run from the last coordinate down; level i contributes
    // d_i * (x_i + sum_{j>i} L[j][i] x_j)^2
    enumerate_level(
        gram,
        &split,
        n,
        bound.clone(),
        &mut x,
        &mut out,
        &mut count,
        budget,
        false,
    )?;
    out.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coords.cmp(&b.coords)));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    gram: &SymMatrix,
    split: &crate::arith::Ldlt,
    level: usize, // coordinates level..n-1 are fixed; assigns x[level-1]
    remaining: Rat,
    x: &mut Vec<i64>,
    out: &mut Vec<LatticeVector>,
    count: &mut u64,
    budget: &Budget,
    canonical: bool, // have we fixed a positive leading coordinate yet?
) -> Result<(), LatticeError> {
    let i = level - 1;
    // center c_i = sum_{j>i} L[j][i] x_j
    let mut center = Rat::zero();
    for j in level..x.len() {
        if x[j] != 0 {
            center += &split.lower[j][i] * crate::arith::rint(x[j]);
        }
    }
    let d = &split.diag[i];
    // d * (t + c)^2 <= remaining
    let radius_sq = &remaining / d;
    let s = crate::arith::floor_sqrt_rat(&radius_sq);
    let lo_big = (-&center).floor().to_integer() - &s - 1i32;
    let hi_big = (-&center).ceil().to_integer() + &s + 1i32;
    let lo = i64::try_from(&lo_big).map_err(|_| LatticeError::BoundTooLarge(budget.max_vectors))?;
    let hi = i64::try_from(&hi_big).map_err(|_| LatticeError::BoundTooLarge(budget.max_vectors))?;
    for t in lo..=hi {
        let dev = crate::arith::rint(t) + &center;
        let used = d * &dev * &dev;
        if used > remaining {
            continue; // conservative端 points outside the exact interval
        }
        x[i] = t;
        let canonical_here = canonical || t > 0;
        if !canonical && t < 0 {
            continue; // leading coordinate of the sign representative is positive
        }
        if i == 0 {
            if x.iter().all(|&v| v == 0) {
                continue; // zero vector added up front
            }
            if !canonical_here {
                continue; // all-zero prefix never became positive
            }
            *count += 1;
            if *count > budget.max_vectors {
                return Err(LatticeError::BoundTooLarge(budget.max_vectors));
            }
            out.push(LatticeVector {
                coords: x.clone(),
                norm: gram.eval(x),
            });
        } else {
            let rem = &remaining - &used;
            enumerate_level(gram, split, i, rem, x, out, count, budget, canonical_here)?;
        }
    }
    x[i] = 0;
    Ok(())
}

/// Narrow-lattice membership: with `free_gram` the Gram matrix `B` of the
/// free part, the section with coordinates `x` lies in the narrow lattice
/// exactly when `B x` is an integer vector.
pub fn in_narrow(free_gram: &SymMatrix, coords: &[i64]) -> Result<bool, LatticeError> {
    if coords.len() != free_gram.dim() {
        return Err(LatticeError::DimensionMismatch {
            expected: free_gram.dim(),
            got: coords.len(),
        });
    }
    Ok(free_gram.apply(coords).iter().all(BigRational::is_integer))
}
