//! Kodaira fiber bookkeeping and the local contribution calculus.
//!
//! A reducible fiber of type `I_n` (n >= 2), `I*_n`, `III`, `IV`, `II*`,
//! `III*` or `IV*` carries a root lattice `T_v` (A, D or E). A section meets
//! one simple component `Theta_{v,i}` of each reducible fiber, and that choice
//! contributes an exact rational correction to the height pairing:
//!
//! ```text
//! h(P)    = 2 + 2 (P.O) - sum_v contr_v(P)
//! <P,Q>   = 1 + (P.O) + (Q.O) - (P.Q) - sum_v contr_v(P,Q)
//! ```
//!
//! The per-configuration extremes `c_max` (sum of per-fiber maxima), `c_min`
//! (least positive single-fiber contribution) and `delta = c_max - c_min`
//! control how much of the gap question is decidable from Gram data alone.

use crate::arith::{rat, rint, Rat};
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiberError {
    #[error("cannot parse Kodaira symbol `{0}`")]
    BadKodairaSymbol(String),
    #[error("cannot parse lattice label `{0}`")]
    BadAdeLabel(String),
    #[error("component index {index} is invalid for {label}")]
    InvalidComponent { label: AdeLabel, index: u32 },
    #[error("the pairing contribution is undefined for distinct nonzero components of {0}")]
    UndefinedPair(AdeLabel),
    #[error("{0} admits no positive contribution")]
    NoPositiveContribution(AdeLabel),
}

/// Kodaira type of a singular fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KodairaFiber {
    /// `I_n`, n >= 1.
    In(u32),
    /// `I*_n`, n >= 0 (written `I0*`, `I1*`, ...).
    IStar(u32),
    Ii,
    Iii,
    Iv,
    IiStar,
    IiiStar,
    IvStar,
}

impl KodairaFiber {
    /// Lattice `T_v` spanned by the non-identity components; `None` for the
    /// irreducible types `I_1` and `II`.
    pub fn reducible_lattice(&self) -> Option<AdeLabel> {
        match self {
            KodairaFiber::In(n) if *n >= 2 => Some(AdeLabel::A(n - 1)),
            KodairaFiber::In(_) => None,
            KodairaFiber::IStar(n) => Some(AdeLabel::D(n + 4)),
            KodairaFiber::Ii => None,
            KodairaFiber::Iii => Some(AdeLabel::A(1)),
            KodairaFiber::Iv => Some(AdeLabel::A(2)),
            KodairaFiber::IiStar => Some(AdeLabel::E(8)),
            KodairaFiber::IiiStar => Some(AdeLabel::E(7)),
            KodairaFiber::IvStar => Some(AdeLabel::E(6)),
        }
    }

    pub fn parse(s: &str) -> Result<KodairaFiber, FiberError> {
        let s = s.trim();
        let bad = || FiberError::BadKodairaSymbol(s.to_string());
        match s {
            "II" => return Ok(KodairaFiber::Ii),
            "III" => return Ok(KodairaFiber::Iii),
            "IV" => return Ok(KodairaFiber::Iv),
            "II*" => return Ok(KodairaFiber::IiStar),
            "III*" => return Ok(KodairaFiber::IiiStar),
            "IV*" => return Ok(KodairaFiber::IvStar),
            _ => {}
        }
        let body = s.strip_prefix('I').ok_or_else(bad)?;
        if let Some(digits) = body.strip_suffix('*') {
            let n: u32 = digits.parse().map_err(|_| bad())?;
            Ok(KodairaFiber::IStar(n))
        } else {
            let n: u32 = body.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(KodairaFiber::In(n))
        }
    }
}

impl fmt::Display for KodairaFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaFiber::In(n) => write!(f, "I{n}"),
            KodairaFiber::IStar(n) => write!(f, "I{n}*"),
            KodairaFiber::Ii => write!(f, "II"),
            KodairaFiber::Iii => write!(f, "III"),
            KodairaFiber::Iv => write!(f, "IV"),
            KodairaFiber::IiStar => write!(f, "II*"),
            KodairaFiber::IiiStar => write!(f, "III*"),
            KodairaFiber::IvStar => write!(f, "IV*"),
        }
    }
}

/// An A/D/E label: `A(n)` is the rank-n lattice A_n, `D(m)` needs m >= 4,
/// `E(m)` needs m in {6, 7, 8}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdeLabel {
    A(u32),
    D(u32),
    E(u32),
}

impl AdeLabel {
    pub fn rank(&self) -> u32 {
        match self {
            AdeLabel::A(n) | AdeLabel::D(n) | AdeLabel::E(n) => *n,
        }
    }

    /// Number of components of the underlying Kodaira fiber, i.e. the `n` of
    /// the `I_n` / `I*_n` contribution formulas.
    fn fiber_n(&self) -> Option<u32> {
        match self {
            AdeLabel::A(m) => Some(m + 1),
            AdeLabel::D(m) => Some(m - 4),
            AdeLabel::E(_) => None,
        }
    }

    /// Largest valid component index for a section.
    pub fn max_component(&self) -> u32 {
        match self {
            AdeLabel::A(m) => *m, // indices 0..n-1 on the I_{m+1} cycle
            AdeLabel::D(m) => (m - 4) + 3,
            AdeLabel::E(6) => 2,
            AdeLabel::E(7) => 1,
            AdeLabel::E(_) => 0,
        }
    }

    pub fn to_spec(self) -> crate::lattice::LatticeSpec {
        match self {
            AdeLabel::A(n) => crate::lattice::LatticeSpec::RootA(n),
            AdeLabel::D(n) => crate::lattice::LatticeSpec::RootD(n),
            AdeLabel::E(n) => crate::lattice::LatticeSpec::RootE(n),
        }
    }

    pub fn parse(s: &str) -> Result<AdeLabel, FiberError> {
        let s = s.trim();
        let bad = || FiberError::BadAdeLabel(s.to_string());
        let (family, digits) = s.split_at(1);
        let n: u32 = digits.parse().map_err(|_| bad())?;
        let label = match family {
            "A" if n >= 1 => AdeLabel::A(n),
            "D" if n >= 4 => AdeLabel::D(n),
            "E" if matches!(n, 6 | 7 | 8) => AdeLabel::E(n),
            _ => return Err(bad()),
        };
        Ok(label)
    }
}

impl fmt::Display for AdeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeLabel::A(n) => write!(f, "A{n}"),
            AdeLabel::D(n) => write!(f, "D{n}"),
            AdeLabel::E(n) => write!(f, "E{n}"),
        }
    }
}

fn check_index(t: AdeLabel, i: u32) -> Result<(), FiberError> {
    if i > t.max_component() {
        Err(FiberError::InvalidComponent { label: t, index: i })
    } else {
        Ok(())
    }
}

/// Single-section contribution `contr_v(P)` when the section meets
/// component `i` of a fiber with lattice `t`.
pub fn contr_single(t: AdeLabel, i: u32) -> Result<Rat, FiberError> {
    check_index(t, i)?;
    if i == 0 {
        return Ok(Rat::zero());
    }
    Ok(match t {
        AdeLabel::A(_) => {
            let n = i64::from(t.fiber_n().unwrap());
            rat(i64::from(i) * (n - i64::from(i)), n)
        }
        AdeLabel::D(_) => {
            let n = i64::from(t.fiber_n().unwrap());
            if i == 1 {
                rint(1)
            } else {
                rint(1) + rat(n, 4)
            }
        }
        AdeLabel::E(6) => rat(4, 3),
        AdeLabel::E(7) => rat(3, 2),
        AdeLabel::E(_) => unreachable!("E8 admits only the identity component"),
    })
}

/// Pair contribution `contr_v(P, Q)` for sections meeting components `i`
/// and `j`. Index order does not matter; equal indices reduce to
/// [`contr_single`].
pub fn contr_pair(t: AdeLabel, i: u32, j: u32) -> Result<Rat, FiberError> {
    check_index(t, i)?;
    check_index(t, j)?;
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    if i == 0 {
        return Ok(Rat::zero());
    }
    if i == j {
        return contr_single(t, i);
    }
    Ok(match t {
        AdeLabel::A(1) | AdeLabel::E(7) => return Err(FiberError::UndefinedPair(t)),
        AdeLabel::A(_) => {
            let n = i64::from(t.fiber_n().unwrap());
            rat(i64::from(i) * (n - i64::from(j)), n)
        }
        AdeLabel::D(_) => {
            // dichotomy is on the near-component index
            let n = i64::from(t.fiber_n().unwrap());
            if i == 1 || j == 1 {
                rat(1, 2)
            } else {
                rat(1, 2) + rat(n, 4)
            }
        }
        AdeLabel::E(6) => rat(2, 3),
        AdeLabel::E(_) => unreachable!("E8 admits only the identity component"),
    })
}

/// Per-fiber extreme contributions: the maximum of `contr_v(P)` and the
/// least positive value. E8 has none.
pub fn extremes(t: AdeLabel) -> Result<(Rat, Rat), FiberError> {
    Ok(match t {
        AdeLabel::A(_) => {
            let n = i64::from(t.fiber_n().unwrap());
            let l = n / 2;
            (rat(l * (n - l), n), rat(n - 1, n))
        }
        AdeLabel::D(_) => {
            let n = i64::from(t.fiber_n().unwrap());
            (rint(1) + rat(n, 4), rint(1))
        }
        AdeLabel::E(6) => (rat(4, 3), rat(4, 3)),
        AdeLabel::E(7) => (rat(3, 2), rat(3, 2)),
        AdeLabel::E(_) => return Err(FiberError::NoPositiveContribution(t)),
    })
}

/// The contribution bounds of a reducible-fiber configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionBounds {
    pub c_max: Rat,
    pub c_min: Rat,
    pub delta: Rat,
}

/// Multiset of reducible-fiber lattices `T = (+)_v T_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberConfig {
    lattices: Vec<AdeLabel>, // kept in canonical order
}

impl FiberConfig {
    pub fn from_lattices(mut lattices: Vec<AdeLabel>) -> FiberConfig {
        lattices.sort_by_key(|t| {
            let family = match t {
                AdeLabel::E(_) => 0u8,
                AdeLabel::D(_) => 1,
                AdeLabel::A(_) => 2,
            };
            (std::cmp::Reverse(t.rank()), family)
        });
        FiberConfig { lattices }
    }

    /// Reducible members of a full fiber list; `I_1` and `II` drop out.
    pub fn from_fibers(fibers: &[KodairaFiber]) -> FiberConfig {
        Self::from_lattices(
            fibers
                .iter()
                .filter_map(KodairaFiber::reducible_lattice)
                .collect(),
        )
    }

    /// Parse a comma-separated fiber list, e.g. `I4,IV,III,I1`.
    pub fn parse_fibers(s: &str) -> Result<FiberConfig, FiberError> {
        let fibers: Result<Vec<_>, _> = s.split(',').map(KodairaFiber::parse).collect();
        Ok(Self::from_fibers(&fibers?))
    }

    /// Parse a lattice multiset, e.g. `A3+A2+A1` (or `0` for empty).
    pub fn parse_t(s: &str) -> Result<FiberConfig, FiberError> {
        let s = s.trim();
        if s == "0" {
            return Ok(FiberConfig { lattices: vec![] });
        }
        let parts: Result<Vec<_>, _> = s.split('+').map(AdeLabel::parse).collect();
        Ok(Self::from_lattices(parts?))
    }

    pub fn lattices(&self) -> &[AdeLabel] {
        &self.lattices
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.lattices.iter().map(AdeLabel::rank).sum()
    }

    /// `c_max`, `c_min` and their difference. An empty configuration (and
    /// one whose only members are E8, which contribute nothing) reports all
    /// zeros by convention.
    pub fn bounds(&self) -> ContributionBounds {
        let contributing: Vec<AdeLabel> = self
            .lattices
            .iter()
            .copied()
            .filter(|t| !matches!(t, AdeLabel::E(8)))
            .collect();
        if contributing.is_empty() {
            return ContributionBounds {
                c_max: Rat::zero(),
                c_min: Rat::zero(),
                delta: Rat::zero(),
            };
        }
        let mut c_max = Rat::zero();
        let mut c_min: Option<Rat> = None;
        for t in contributing {
            let (max, min) = extremes(t).expect("E8 filtered out");
            c_max += max;
            c_min = Some(match c_min {
                None => min,
                Some(cur) => cur.min(min),
            });
        }
        let c_min = c_min.unwrap();
        let delta = &c_max - &c_min;
        ContributionBounds { c_max, c_min, delta }
    }
}

impl fmt::Display for FiberConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lattices.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.lattices.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Height of a section from its intersection with the zero section and its
/// fiber contributions: `2 + 2 (P.O) - sum contr_v(P)`.
pub fn height(p_dot_o: i64, contributions: &[Rat]) -> Rat {
    rint(2) + rint(2) * rint(p_dot_o) - contributions.iter().sum::<Rat>()
}

/// Height pairing of two sections:
/// `1 + (P.O) + (Q.O) - (P.Q) - sum contr_v(P,Q)`.
pub fn pairing(p_dot_o: i64, q_dot_o: i64, p_dot_q: i64, pair_contributions: &[Rat]) -> Rat {
    rint(1) + rint(p_dot_o) + rint(q_dot_o) - rint(p_dot_q)
        - pair_contributions.iter().sum::<Rat>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use AdeLabel::*;

    #[test]
    fn kodaira_parse_display() {
        for s in ["I1", "I4", "I0*", "I2*", "II", "III", "IV", "II*", "III*", "IV*"] {
            let f = KodairaFiber::parse(s).unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!(KodairaFiber::parse("I0").is_err());
        assert!(KodairaFiber::parse("V").is_err());
    }

    #[test]
    fn reducible_lattices() {
        assert_eq!(KodairaFiber::In(4).reducible_lattice(), Some(A(3)));
        assert_eq!(KodairaFiber::In(1).reducible_lattice(), None);
        assert_eq!(KodairaFiber::Ii.reducible_lattice(), None);
        assert_eq!(KodairaFiber::IStar(0).reducible_lattice(), Some(D(4)));
        assert_eq!(KodairaFiber::IStar(3).reducible_lattice(), Some(D(7)));
        assert_eq!(KodairaFiber::Iii.reducible_lattice(), Some(A(1)));
        assert_eq!(KodairaFiber::Iv.reducible_lattice(), Some(A(2)));
        assert_eq!(KodairaFiber::IiiStar.reducible_lattice(), Some(E(7)));
        assert_eq!(KodairaFiber::IvStar.reducible_lattice(), Some(E(6)));
        assert_eq!(KodairaFiber::IiStar.reducible_lattice(), Some(E(8)));
    }

    #[test]
    fn single_contributions() {
        assert_eq!(contr_single(A(3), 1).unwrap(), rat(3, 4));
        assert_eq!(contr_single(A(3), 2).unwrap(), rint(1));
        assert_eq!(contr_single(E(7), 0).unwrap(), Rat::zero());
        assert_eq!(contr_single(D(5), 2).unwrap(), rat(5, 4));
        assert_eq!(contr_single(D(5), 1).unwrap(), rint(1));
        assert_eq!(contr_single(A(1), 1).unwrap(), rat(1, 2));
        assert_eq!(contr_single(E(6), 2).unwrap(), rat(4, 3));
        assert!(matches!(
            contr_single(A(2), 3),
            Err(FiberError::InvalidComponent { .. })
        ));
    }

    #[test]
    fn pair_contributions() {
        assert_eq!(contr_pair(A(3), 1, 2).unwrap(), rat(1, 2));
        assert_eq!(contr_pair(A(3), 2, 1).unwrap(), rat(1, 2));
        assert_eq!(contr_pair(E(6), 1, 1).unwrap(), rat(4, 3));
        assert_eq!(contr_pair(E(6), 1, 2).unwrap(), rat(2, 3));
        assert_eq!(contr_pair(A(2), 0, 1).unwrap(), Rat::zero());
        assert_eq!(contr_pair(D(6), 1, 3).unwrap(), rat(1, 2));
        assert_eq!(contr_pair(D(6), 2, 3).unwrap(), rat(1, 2) + rat(2, 4));
    }

    #[test]
    fn extreme_values() {
        assert_eq!(extremes(A(3)).unwrap(), (rint(1), rat(3, 4)));
        assert_eq!(extremes(E(7)).unwrap(), (rat(3, 2), rat(3, 2)));
        assert_eq!(extremes(A(1)).unwrap(), (rat(1, 2), rat(1, 2)));
        assert_eq!(extremes(A(6)).unwrap(), (rat(12, 7), rat(6, 7)));
        assert_eq!(extremes(D(7)).unwrap(), (rat(7, 4), rint(1)));
        assert!(matches!(
            extremes(E(8)),
            Err(FiberError::NoPositiveContribution(_))
        ));
    }

    /// Extremes agree with a direct scan over all valid component indices.
    #[test]
    fn extremes_match_component_scan() {
        let labels = [
            A(1), A(2), A(3), A(4), A(5), A(6), A(7), A(8),
            D(4), D(5), D(6), D(7), D(8), E(6), E(7),
        ];
        for t in labels {
            let (max, min) = extremes(t).unwrap();
            let values: Vec<Rat> = (1..=t.max_component())
                .map(|i| contr_single(t, i).unwrap())
                .collect();
            assert_eq!(values.iter().max().unwrap(), &max, "{t} max");
            assert_eq!(values.iter().min().unwrap(), &min, "{t} min positive");
            assert!(values.iter().all(|v| v > &Rat::zero()));
        }
    }

    #[test]
    fn worked_configuration() {
        // reducible part of (I4, IV, III, I1) is A3 + A2 + A1
        let cfg = FiberConfig::parse_fibers("I4,IV,III,I1").unwrap();
        assert_eq!(cfg.to_string(), "A3+A2+A1");
        let b = cfg.bounds();
        assert_eq!(b.c_max, rat(13, 6));
        assert_eq!(b.c_min, rat(1, 2));
        assert_eq!(b.delta, rat(5, 3));
    }

    #[test]
    fn bounds_edge_cases() {
        let empty = FiberConfig::parse_t("0").unwrap();
        assert_eq!(empty.bounds(), ContributionBounds {
            c_max: Rat::zero(),
            c_min: Rat::zero(),
            delta: Rat::zero(),
        });

        // an E8 fiber contributes nothing at all
        let only_e8 = FiberConfig::from_lattices(vec![E(8)]);
        assert_eq!(only_e8.bounds().c_max, Rat::zero());

        let case_41 = FiberConfig::parse_t("A2+A1+A1+A1+A1").unwrap();
        assert_eq!(case_41.bounds().delta, rat(13, 6));
    }

    #[test]
    fn bounds_are_permutation_invariant() {
        let a = FiberConfig::parse_t("A3+A1+A2").unwrap();
        let b = FiberConfig::parse_t("A1+A2+A3").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bounds(), b.bounds());
    }

    #[test]
    fn height_formula() {
        // narrow section of height 2k meets every identity component
        assert_eq!(height(2, &[]), rint(6));
        assert_eq!(height(0, &[]), rint(2));
        let contrs = [rat(3, 4), rat(2, 3), rat(1, 2), rat(1, 2)];
        assert_eq!(height(1, &contrs), rat(19, 12));
    }

    #[test]
    fn pairing_formula() {
        assert_eq!(pairing(2, 0, 3, &[]), rint(0));
        assert_eq!(pairing(0, 0, 0, &[]), rint(1));
        assert_eq!(pairing(1, 0, 1, &[rat(1, 2), rat(1, 2)]), rint(0));
    }

    #[test]
    fn contribution_bounds_sandwich() {
        // 0 <= contr <= max, and positive contr >= min positive
        for t in [A(1), A(4), A(7), D(4), D(6), E(6), E(7)] {
            let (max, min) = extremes(t).unwrap();
            for i in 0..=t.max_component() {
                let v = contr_single(t, i).unwrap();
                assert!(v >= Rat::zero() && v <= max);
                if v > Rat::zero() {
                    assert!(v >= min);
                }
            }
        }
    }
}
