//! Data model, file format, loader and validator for classification rows.
//!
//! A [`SurfaceCase`] is one row of the rank >= 1 classification of
//! Mordell-Weil lattices of rational elliptic surfaces: the reducible-fiber
//! lattice `T`, the free part of `E(K)` as a lattice spec, the torsion
//! subgroup, and the minimal norm. Everything else (narrow Gram, contribution
//! bounds, rank) is recomputed, and stored values are cross-checked at load
//! time so that a bad row cannot enter the engine:
//!
//! * the narrow Gram (inverse of the free Gram) must be even integral,
//! * stored `c_max`/`c_min`/`delta` must match the recomputation from `T`,
//! * `mu` must equal the least positive norm found by enumeration,
//! * optional sublattice embeddings and section witnesses must re-validate
//!   against the Gram data and the height formula.
//!
//! The bundled default catalog covers the rows needed by the verification
//! targets; `load` accepts the same format from a user file for the rest
//! (`--catalog` or the `RESGAPS_CATALOG` environment variable).

use crate::arith::{fmt_rat, parse_rat, Rat, SymMatrix};
use crate::fibers::{contr_single, AdeLabel, ContributionBounds, FiberConfig};
use crate::lattice::{in_narrow, short_vectors, Budget, LatticeSpec};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid case {id}: {reason}")]
    Validation { id: u32, reason: String },
    #[error("case {0} not found")]
    NotFound(u32),
    #[error("io error: {0}")]
    Io(String),
}

/// Finite abelian torsion subgroup, stored as its cyclic factors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TorsionGroup {
    factors: Vec<u32>, // ascending, each >= 2; empty means trivial
}

impl TorsionGroup {
    pub fn trivial() -> Self {
        TorsionGroup::default()
    }

    pub fn cyclic(n: u32) -> Self {
        assert!(n >= 2);
        TorsionGroup { factors: vec![n] }
    }

    pub fn from_factors(mut factors: Vec<u32>) -> Self {
        factors.sort_unstable();
        TorsionGroup { factors }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|&f| u64::from(f)).product()
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut factors = Vec::new();
        for part in s.split('+') {
            let n = part
                .trim()
                .strip_prefix("Z/")
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|&n| n >= 2)
                .ok_or_else(|| format!("bad torsion factor `{part}`"))?;
            factors.push(n);
        }
        Ok(Self::from_factors(factors))
    }
}

impl fmt::Display for TorsionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "Z/{n}")?;
        }
        Ok(())
    }
}

/// Declared generators of an even-height sublattice of the narrow lattice,
/// in narrow-basis coordinates. Either four orthogonal roots or an A4 chain;
/// both give a section of height `2k` for every `k` and hence drive the
/// rank >= 5 realization route without large enumerations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NarrowEmbedding {
    A1Quad([Vec<i64>; 4]),
    A4Chain([Vec<i64>; 4]),
}

impl NarrowEmbedding {
    pub fn generators(&self) -> &[Vec<i64>; 4] {
        match self {
            NarrowEmbedding::A1Quad(g) | NarrowEmbedding::A4Chain(g) => g,
        }
    }
}

/// An explicit section given by coordinates in the free basis plus the
/// component it meets on each reducible fiber (aligned with the canonical
/// order of `T`), optionally shifted by a torsion section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentWitness {
    pub coords: Vec<i64>,
    pub add_torsion: bool,
    pub components: Vec<(AdeLabel, u32)>,
}

impl ComponentWitness {
    /// The intersection number with the zero section implied by the height
    /// formula, if it is a nonnegative integer.
    pub fn implied_p_dot_o(&self, free_gram: &SymMatrix) -> Option<i64> {
        let h = free_gram.eval(&self.coords);
        let mut contr_sum = Rat::zero();
        for &(t, i) in &self.components {
            contr_sum += contr_single(t, i).ok()?;
        }
        // h = 2 + 2x - sum  =>  x = (h - 2 + sum) / 2
        let x = (h - crate::arith::rint(2) + contr_sum) / crate::arith::rint(2);
        if !x.is_integer() || x.is_negative() {
            return None;
        }
        i64::try_from(&x.to_integer()).ok()
    }
}

/// One classification row with its validated, cached Gram data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCase {
    pub id: u32,
    pub t: FiberConfig,
    pub mw_free: Option<LatticeSpec>,
    pub torsion: TorsionGroup,
    pub mu: Option<Rat>,
    pub stored_bounds: StoredBounds,
    pub source: BTreeMap<String, String>,
    pub narrow_embed: Option<NarrowEmbedding>,
    pub witness: Option<ComponentWitness>,
    free_gram: Option<SymMatrix>,
    narrow: Option<SymMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StoredBounds {
    pub c_max: Option<Rat>,
    pub c_min: Option<Rat>,
    pub delta: Option<Rat>,
}

impl SurfaceCase {
    pub fn rank(&self) -> usize {
        self.free_gram.as_ref().map_or(0, SymMatrix::dim)
    }

    /// Gram matrix of the free part of E(K).
    pub fn free_gram(&self) -> Result<&SymMatrix, CatalogError> {
        self.free_gram.as_ref().ok_or(CatalogError::Validation {
            id: self.id,
            reason: "case has rank zero".into(),
        })
    }

    /// Gram matrix of the narrow lattice: the exact inverse of the free Gram.
    pub fn narrow_gram(&self) -> Result<&SymMatrix, CatalogError> {
        self.narrow.as_ref().ok_or(CatalogError::Validation {
            id: self.id,
            reason: "case has rank zero".into(),
        })
    }

    pub fn bounds(&self) -> ContributionBounds {
        self.t.bounds()
    }

    /// Build a case from raw fields, running the full validation.
    pub fn new(
        id: u32,
        t: FiberConfig,
        mw_free: Option<LatticeSpec>,
        torsion: TorsionGroup,
        mu: Option<Rat>,
        stored_bounds: StoredBounds,
        source: BTreeMap<String, String>,
        narrow_embed: Option<NarrowEmbedding>,
        witness: Option<ComponentWitness>,
    ) -> Result<Self, CatalogError> {
        let mut case = SurfaceCase {
            id,
            t,
            mw_free,
            torsion,
            mu,
            stored_bounds,
            source,
            narrow_embed,
            witness,
            free_gram: None,
            narrow: None,
        };
        case.validate()?;
        Ok(case)
    }

    fn invalid(&self, reason: impl Into<String>) -> CatalogError {
        CatalogError::Validation {
            id: self.id,
            reason: reason.into(),
        }
    }

    fn validate(&mut self) -> Result<(), CatalogError> {
        if let Some(spec) = &self.mw_free {
            let free = spec
                .realize()
                .map_err(|e| self.invalid(format!("free Gram does not realize: {e}")))?;
            let narrow = free
                .inverse()
                .map_err(|e| self.invalid(format!("free Gram is singular: {e}")))?;
            if !narrow.is_even_integral() {
                return Err(self.invalid(format!(
                    "narrow Gram {narrow} is not an even integral matrix"
                )));
            }
            if !free.is_inverse_of(&narrow) {
                return Err(self.invalid("free and narrow Grams are not inverse"));
            }
            let mu = self
                .mu
                .as_ref()
                .ok_or_else(|| self.invalid("mu is required for positive rank"))?;
            let enumerated = short_vectors(&free, &free.max_diagonal(), &Budget::default())
                .map_err(|e| self.invalid(format!("mu enumeration failed: {e}")))?;
            let min_norm = enumerated
                .iter()
                .map(|v| &v.norm)
                .filter(|n| n.is_positive())
                .min()
                .ok_or_else(|| self.invalid("no positive norms below the diagonal bound"))?;
            if min_norm != mu {
                return Err(self.invalid(format!(
                    "stored mu {} but least positive norm is {}",
                    fmt_rat(mu),
                    fmt_rat(min_norm)
                )));
            }
            self.free_gram = Some(free);
            self.narrow = Some(narrow);
        } else if self.mu.is_some() {
            return Err(self.invalid("mu given for a rank-zero case"));
        }

        let recomputed = self.t.bounds();
        for (name, stored, computed) in [
            ("c_max", &self.stored_bounds.c_max, &recomputed.c_max),
            ("c_min", &self.stored_bounds.c_min, &recomputed.c_min),
            ("delta", &self.stored_bounds.delta, &recomputed.delta),
        ] {
            if let Some(stored) = stored {
                if stored != computed {
                    return Err(self.invalid(format!(
                        "stored {name} = {} but recomputed {}",
                        fmt_rat(stored),
                        fmt_rat(computed)
                    )));
                }
            }
        }
        if recomputed.delta >= crate::arith::rint(2) && self.torsion.is_trivial() {
            return Err(self.invalid("delta >= 2 requires nontrivial torsion"));
        }

        if let Some(embed) = &self.narrow_embed {
            self.validate_embedding(embed.clone())?;
        }
        if let Some(w) = &self.witness {
            self.validate_witness(&w.clone())?;
        }
        Ok(())
    }

    fn validate_embedding(&self, embed: NarrowEmbedding) -> Result<(), CatalogError> {
        let narrow = self
            .narrow
            .as_ref()
            .ok_or_else(|| self.invalid("embedding on a rank-zero case"))?;
        let gens = embed.generators();
        for g in gens {
            if g.len() != narrow.dim() {
                return Err(self.invalid("embedding generator has wrong dimension"));
            }
        }
        let want_pairing = |i: usize, j: usize| -> Rat {
            match (&embed, i == j) {
                (_, true) => crate::arith::rint(2),
                (NarrowEmbedding::A1Quad(_), false) => Rat::zero(),
                (NarrowEmbedding::A4Chain(_), false) => {
                    if i.abs_diff(j) == 1 {
                        crate::arith::rint(-1)
                    } else {
                        Rat::zero()
                    }
                }
            }
        };
        for i in 0..4 {
            for j in 0..4 {
                let got = narrow.eval_pair(&gens[i], &gens[j]);
                if got != want_pairing(i, j) {
                    return Err(self.invalid(format!(
                        "embedding Gram mismatch at ({i},{j}): got {}",
                        fmt_rat(&got)
                    )));
                }
            }
        }
        Ok(())
    }

    fn validate_witness(&self, w: &ComponentWitness) -> Result<(), CatalogError> {
        let free = self
            .free_gram
            .as_ref()
            .ok_or_else(|| self.invalid("witness on a rank-zero case"))?;
        if w.coords.len() != free.dim() {
            return Err(self.invalid("witness coordinate dimension mismatch"));
        }
        if w.components.len() != self.t.lattices().len() {
            return Err(self.invalid("witness must choose a component on every reducible fiber"));
        }
        for (&(label, index), &expected) in w.components.iter().zip(self.t.lattices()) {
            if label != expected {
                return Err(self.invalid(format!(
                    "witness component label {label} does not match fiber {expected}"
                )));
            }
            contr_single(label, index)
                .map_err(|e| self.invalid(format!("witness component invalid: {e}")))?;
        }
        if w.add_torsion && self.torsion.is_trivial() {
            return Err(self.invalid("witness adds a torsion section but torsion is trivial"));
        }
        let meets_nonzero = w.components.iter().any(|&(_, i)| i != 0);
        let narrow_member = in_narrow(free, &w.coords)
            .map_err(|e| self.invalid(format!("witness membership test failed: {e}")))?;
        if meets_nonzero && narrow_member {
            return Err(self.invalid(
                "witness meets a non-identity component but its coordinates are narrow",
            ));
        }
        if w.implied_p_dot_o(free).is_none() {
            return Err(self.invalid(
                "witness height and components do not give an integral intersection number",
            ));
        }
        Ok(())
    }
}

/// The validated case table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    pub version: u32,
    cases: BTreeMap<u32, SurfaceCase>,
}

impl Catalog {
    /// The catalog bundled with the crate.
    pub fn embedded() -> Catalog {
        static DATA: &str = include_str!("../data/catalog.rsg");
        Catalog::parse(DATA).expect("bundled catalog must validate")
    }

    pub fn load_path(path: &Path) -> Result<Catalog, CatalogError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CatalogError::Io(format!("{}: {e}", path.display())))?;
        Catalog::parse(&text)
    }

    /// Parse and validate; fails atomically on the first bad row.
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let mut version: Option<u32> = None;
        let mut cases: BTreeMap<u32, SurfaceCase> = BTreeMap::new();
        let mut pending: Option<(usize, RawCase)> = None;

        let mut flush = |pending: Option<(usize, RawCase)>,
                         cases: &mut BTreeMap<u32, SurfaceCase>|
         -> Result<(), CatalogError> {
            if let Some((line, raw)) = pending {
                let case = raw.build(line)?;
                if cases.insert(case.id, case.clone()).is_some() {
                    return Err(CatalogError::Validation {
                        id: case.id,
                        reason: "duplicate id".into(),
                    });
                }
            }
            Ok(())
        };

        for (idx, rawline) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = rawline.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "[case]" {
                flush(pending.take(), &mut cases)?;
                pending = Some((lineno, RawCase::default()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(CatalogError::Parse {
                line: lineno,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            match &mut pending {
                None => {
                    if key == "version" {
                        version = Some(value.parse().map_err(|_| CatalogError::Parse {
                            line: lineno,
                            msg: "bad version".into(),
                        })?);
                    } else {
                        return Err(CatalogError::Parse {
                            line: lineno,
                            msg: format!("unexpected key `{key}` outside a [case] block"),
                        });
                    }
                }
                Some((_, raw)) => raw.set(key, value, lineno)?,
            }
        }
        flush(pending.take(), &mut cases)?;

        Ok(Catalog {
            version: version.unwrap_or(1),
            cases,
        })
    }

    /// Canonical serialization; `parse(save(c)) == c`.
    pub fn save(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("version = {}\n", self.version));
        for case in self.cases.values() {
            out.push_str("\n[case]\n");
            out.push_str(&format!("id = {}\n", case.id));
            out.push_str(&format!("t = {}\n", case.t));
            if let Some(spec) = &case.mw_free {
                out.push_str(&format!("mw_free = {spec}\n"));
            }
            out.push_str(&format!("torsion = {}\n", case.torsion));
            if let Some(mu) = &case.mu {
                out.push_str(&format!("mu = {}\n", fmt_rat(mu)));
            }
            for (name, v) in [
                ("c_max", &case.stored_bounds.c_max),
                ("c_min", &case.stored_bounds.c_min),
                ("delta", &case.stored_bounds.delta),
            ] {
                if let Some(v) = v {
                    out.push_str(&format!("{name} = {}\n", fmt_rat(v)));
                }
            }
            if !case.source.is_empty() {
                let tags: Vec<String> = case
                    .source
                    .iter()
                    .map(|(k, v)| format!("{k}:{v}"))
                    .collect();
                out.push_str(&format!("source = {}\n", tags.join(" ")));
            }
            if let Some(embed) = &case.narrow_embed {
                let (key, gens) = match embed {
                    NarrowEmbedding::A1Quad(g) => ("narrow_a1x4", g),
                    NarrowEmbedding::A4Chain(g) => ("narrow_a4", g),
                };
                let vs: Vec<String> = gens.iter().map(|g| fmt_vec(g)).collect();
                out.push_str(&format!("{key} = {}\n", vs.join(";")));
            }
            if let Some(w) = &case.witness {
                let comps: Vec<String> = w
                    .components
                    .iter()
                    .map(|(t, i)| format!("{t}@{i}"))
                    .collect();
                out.push_str(&format!(
                    "witness = coords:{} torsion:{} components:{}\n",
                    fmt_vec(&w.coords),
                    if w.add_torsion { "yes" } else { "no" },
                    comps.join(",")
                ));
            }
        }
        out
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.cases.keys().copied()
    }

    pub fn cases(&self) -> impl Iterator<Item = &SurfaceCase> {
        self.cases.values()
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn get(&self, id: u32) -> Result<&SurfaceCase, CatalogError> {
        self.cases.get(&id).ok_or(CatalogError::NotFound(id))
    }

    /// All cases whose `T` multiset matches the reducible part of the given
    /// fiber configuration.
    pub fn lookup_by_config(&self, config: &FiberConfig) -> Vec<&SurfaceCase> {
        self.cases.values().filter(|c| &c.t == config).collect()
    }
}

fn fmt_vec(v: &[i64]) -> String {
    let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", body.join(","))
}

fn parse_vec(s: &str) -> Result<Vec<i64>, String> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("bad vector `{s}`"))?;
    inner
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| format!("bad vector `{s}`")))
        .collect()
}

#[derive(Default)]
struct RawCase {
    id: Option<u32>,
    t: Option<FiberConfig>,
    mw_free: Option<LatticeSpec>,
    torsion: Option<TorsionGroup>,
    mu: Option<Rat>,
    bounds: StoredBounds,
    source: BTreeMap<String, String>,
    embed: Option<NarrowEmbedding>,
    witness: Option<ComponentWitness>,
}

impl RawCase {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), CatalogError> {
        let parse_err = |msg: String| CatalogError::Parse { line, msg };
        match key {
            "id" => {
                self.id = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(format!("bad id `{value}`")))?,
                )
            }
            "t" => {
                self.t = Some(
                    FiberConfig::parse_t(value).map_err(|e| parse_err(e.to_string()))?,
                )
            }
            "mw_free" => {
                self.mw_free =
                    Some(LatticeSpec::parse(value).map_err(|e| parse_err(e.to_string()))?)
            }
            "torsion" => self.torsion = Some(TorsionGroup::parse(value).map_err(parse_err)?),
            "mu" => self.mu = Some(parse_rat(value).map_err(|e| parse_err(e.to_string()))?),
            "c_max" => {
                self.bounds.c_max =
                    Some(parse_rat(value).map_err(|e| parse_err(e.to_string()))?)
            }
            "c_min" => {
                self.bounds.c_min =
                    Some(parse_rat(value).map_err(|e| parse_err(e.to_string()))?)
            }
            "delta" => {
                self.bounds.delta =
                    Some(parse_rat(value).map_err(|e| parse_err(e.to_string()))?)
            }
            "source" => {
                for tag in value.split_whitespace() {
                    let (k, v) = tag
                        .split_once(':')
                        .ok_or_else(|| parse_err(format!("bad source tag `{tag}`")))?;
                    self.source.insert(k.to_string(), v.to_string());
                }
            }
            "narrow_a4" | "narrow_a1x4" => {
                let gens: Result<Vec<Vec<i64>>, String> =
                    value.split(';').map(parse_vec).collect();
                let gens = gens.map_err(parse_err)?;
                let gens: [Vec<i64>; 4] = gens
                    .try_into()
                    .map_err(|_| parse_err("embedding needs exactly 4 generators".into()))?;
                self.embed = Some(if key == "narrow_a4" {
                    NarrowEmbedding::A4Chain(gens)
                } else {
                    NarrowEmbedding::A1Quad(gens)
                });
            }
            "witness" => {
                let mut coords = None;
                let mut add_torsion = false;
                let mut components = Vec::new();
                for field in value.split_whitespace() {
                    let (k, v) = field
                        .split_once(':')
                        .ok_or_else(|| parse_err(format!("bad witness field `{field}`")))?;
                    match k {
                        "coords" => coords = Some(parse_vec(v).map_err(parse_err)?),
                        "torsion" => add_torsion = v == "yes",
                        "components" => {
                            for comp in v.split(',') {
                                let (label, idx) = comp.split_once('@').ok_or_else(|| {
                                    parse_err(format!("bad component `{comp}`"))
                                })?;
                                let label = AdeLabel::parse(label)
                                    .map_err(|e| parse_err(e.to_string()))?;
                                let idx: u32 = idx
                                    .parse()
                                    .map_err(|_| parse_err(format!("bad index `{idx}`")))?;
                                components.push((label, idx));
                            }
                        }
                        _ => return Err(parse_err(format!("unknown witness field `{k}`"))),
                    }
                }
                self.witness = Some(ComponentWitness {
                    coords: coords
                        .ok_or_else(|| parse_err("witness needs coords".into()))?,
                    add_torsion,
                    components,
                });
            }
            _ => return Err(parse_err(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn build(self, line: usize) -> Result<SurfaceCase, CatalogError> {
        let parse_err = |msg: &str| CatalogError::Parse {
            line,
            msg: msg.into(),
        };
        SurfaceCase::new(
            self.id.ok_or_else(|| parse_err("case is missing `id`"))?,
            self.t.ok_or_else(|| parse_err("case is missing `t`"))?,
            self.mw_free,
            self.torsion
                .ok_or_else(|| parse_err("case is missing `torsion`"))?,
            self.mu,
            self.bounds,
            self.source,
            self.embed,
            self.witness,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};

    #[test]
    fn embedded_catalog_has_required_rows() {
        let cat = Catalog::embedded();
        let mut want: Vec<u32> = (1..=7).collect();
        want.extend([20, 24, 27, 28, 29, 31, 37, 38, 39, 40, 41, 42]);
        want.extend(43..=61);
        for id in want {
            assert!(cat.get(id).is_ok(), "missing case {id}");
        }
    }

    #[test]
    fn case_53_fields() {
        let cat = Catalog::embedded();
        let c = cat.get(53).unwrap();
        assert_eq!(c.t.to_string(), "A5+A1+A1");
        assert_eq!(c.torsion, TorsionGroup::cyclic(2));
        let b = c.bounds();
        assert_eq!(b.c_max, rat(5, 2));
        assert_eq!(b.c_min, rat(1, 2));
        assert_eq!(c.mu, Some(rat(1, 6)));
    }

    #[test]
    fn narrow_grams() {
        let cat = Catalog::embedded();
        assert_eq!(
            cat.get(43).unwrap().narrow_gram().unwrap(),
            &SymMatrix::from_i64_rows(&[&[2]])
        );
        assert_eq!(
            cat.get(31).unwrap().narrow_gram().unwrap(),
            &SymMatrix::from_i64_rows(&[&[8, -1], &[-1, 2]])
        );
        // dual of a dual: narrow of A2* is the A2 Gram
        assert_eq!(
            cat.get(27).unwrap().narrow_gram().unwrap(),
            &SymMatrix::from_i64_rows(&[&[2, -1], &[-1, 2]])
        );
        assert!(matches!(
            cat.get(62).unwrap().narrow_gram(),
            Err(CatalogError::Validation { .. })
        ));
    }

    #[test]
    fn duality_identity_all_cases() {
        let cat = Catalog::embedded();
        for case in cat.cases() {
            if case.rank() == 0 {
                continue;
            }
            assert!(
                case.free_gram().unwrap().is_inverse_of(case.narrow_gram().unwrap()),
                "case {}",
                case.id
            );
        }
    }

    #[test]
    fn lookup_by_id_and_config() {
        let cat = Catalog::embedded();
        assert_eq!(
            cat.get(43).unwrap().t,
            FiberConfig::parse_t("E7").unwrap()
        );
        assert!(matches!(cat.get(999), Err(CatalogError::NotFound(999))));

        let cfg = FiberConfig::parse_fibers("I4,IV,III,I1").unwrap();
        let hits = cat.lookup_by_config(&cfg);
        assert_eq!(hits.iter().map(|c| c.id).collect::<Vec<_>>(), vec![37]);

        // same T with two embeddings: both rows come back
        let cfg = FiberConfig::parse_t("A5+A1").unwrap();
        let hits = cat.lookup_by_config(&cfg);
        assert_eq!(hits.iter().map(|c| c.id).collect::<Vec<_>>(), vec![28, 29]);
    }

    #[test]
    fn rejects_odd_narrow_diagonal() {
        // <1/3> has narrow Gram [[3]], which is not even
        let text = "version = 1\n[case]\nid = 901\nt = A1\nmw_free = <1/3>\ntorsion = 0\nmu = 1/3\n";
        let err = Catalog::parse(text).unwrap_err();
        assert!(matches!(err, CatalogError::Validation { id: 901, .. }));
    }

    #[test]
    fn rejects_wrong_mu() {
        let text = "version = 1\n[case]\nid = 902\nt = E7\nmw_free = A1*\ntorsion = 0\nmu = 2\n";
        let err = Catalog::parse(text).unwrap_err();
        let CatalogError::Validation { id, reason } = err else {
            panic!("expected validation error")
        };
        assert_eq!(id, 902);
        assert!(reason.contains("mu"));
    }

    #[test]
    fn rejects_bounds_mismatch() {
        let text =
            "version = 1\n[case]\nid = 903\nt = E7\nmw_free = A1*\ntorsion = 0\nmu = 1/2\nc_max = 2\n";
        assert!(matches!(
            Catalog::parse(text),
            Err(CatalogError::Validation { id: 903, .. })
        ));
    }

    #[test]
    fn rejects_delta_two_without_torsion() {
        // A1 x 5 configuration has delta = 2; torsion must be nontrivial
        let text = "version = 1\n[case]\nid = 904\nt = A1+A1+A1+A1+A1\nmw_free = A1*+A1*+A1*\ntorsion = 0\nmu = 1/2\n";
        assert!(matches!(
            Catalog::parse(text),
            Err(CatalogError::Validation { id: 904, .. })
        ));
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "version = 1\n[case]\nid = 1\nnonsense\n";
        let err = Catalog::parse(text).unwrap_err();
        assert!(matches!(err, CatalogError::Parse { line: 4, .. }));
    }

    #[test]
    fn save_load_roundtrip() {
        let cat = Catalog::embedded();
        let text = cat.save();
        let reloaded = Catalog::parse(&text).unwrap();
        assert_eq!(cat, reloaded);
    }

    #[test]
    fn witness_row_59_validates() {
        let cat = Catalog::embedded();
        let c = cat.get(59).unwrap();
        let w = c.witness.as_ref().unwrap();
        assert_eq!(w.coords, vec![4]);
        assert!(w.add_torsion);
        assert_eq!(w.implied_p_dot_o(c.free_gram().unwrap()), Some(1));
    }

    #[test]
    fn mu_values_match_tables() {
        let cat = Catalog::embedded();
        for (id, mu) in [
            (20, rat(1, 6)),
            (27, rat(2, 3)),
            (29, rat(1, 6)),
            (31, rat(2, 15)),
            (37, rat(1, 12)),
            (40, rat(1, 6)),
            (53, rat(1, 6)),
            (55, rat(1, 20)),
            (59, rat(1, 12)),
            (61, rat(1, 6)),
            (1, rint(2)),
        ] {
            assert_eq!(cat.get(id).unwrap().mu, Some(mu), "case {id}");
        }
    }

    #[test]
    fn narrow_dets_match_mu_reciprocals_rank1() {
        // torsion-free rank 1: narrow Gram is [[1/mu]]
        let cat = Catalog::embedded();
        for id in [43, 45, 46, 47, 49, 50, 55, 56] {
            let c = cat.get(id).unwrap();
            let mu = c.mu.clone().unwrap();
            let narrow = c.narrow_gram().unwrap();
            assert_eq!(narrow.get(0, 0), &(rint(1) / mu), "case {id}");
        }
        // the No. 55 narrow determinant drives the d = 20 scaling
        assert_eq!(cat.get(55).unwrap().narrow_gram().unwrap().det(), rint(20));
    }
}
