//! Finite generalized metric spaces and their axiom families.
//!
//! A space is a [`DistanceTable`] over the points `0..n`. Which axioms it is
//! expected to satisfy is described by an [`AxiomProfile`]: the family
//! ([`Kind`]), the polygon order `v`, and either a constant coefficient `s`
//! or a pointwise [`ThetaTable`].

mod chains;
mod example;
mod verify;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub(crate) use chains::ChainWalker;
pub(crate) use verify::basic_axiom_violations;
pub use example::{build_paper_example, combine_spaces, combine_spaces_in_regime, CombineError};
pub use verify::{
    polygon_slack, verify_axioms, verify_axioms_with, zero_offdiag_check, AxiomId, Outcome,
    VerificationReport, VerifyOptions, ViolationWitness,
};

/// Relative tolerance used for every inequality and equality check unless a
/// caller overrides it.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// `lhs <= rhs` up to `rel * max(1, |lhs|, |rhs|)`.
#[inline]
pub fn approx_le(lhs: f64, rhs: f64, rel: f64) -> bool {
    lhs <= rhs + tolerance(lhs, rhs, rel)
}

/// `a == b` up to `rel * max(1, |a|, |b|)`.
#[inline]
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= tolerance(a, b, rel)
}

#[inline]
pub fn tolerance(lhs: f64, rhs: f64, rel: f64) -> f64 {
    rel * 1f64.max(lhs.abs()).max(rhs.abs())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("table is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("table is empty")]
    Empty,
    #[error("entry ({i},{j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("entry ({i},{j}) = {value} is negative")]
    Negative { i: usize, j: usize, value: f64 },
    #[error("theta entry ({i},{j}) = {value} is below 1")]
    ThetaBelowOne { i: usize, j: usize, value: f64 },
    #[error("dimension mismatch: space has {space} points, {what} has {found}")]
    DimensionMismatch { space: usize, what: &'static str, found: usize },
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("tuple has {found} entries, expected {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("tuple {0:?} is not admissible under the distinct-chain regime")]
    InadmissibleTuple(Vec<usize>),
    #[error("example needs at least 7 points, got {0}")]
    ExampleTooSmall(usize),
}

/// Symmetric-by-contract table of nonnegative reals, `d[i][j] = ρ(i, j)`.
///
/// Construction enforces squareness, finiteness and nonnegativity. Symmetry
/// is left to [`verify_axioms`] so that asymmetric tables can be reported with
/// a witness instead of rejected outright; the file parser rejects them.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    n: usize,
    d: Vec<f64>,
}

impl DistanceTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let (n, d) = flatten(rows)?;
        for i in 0..n {
            for j in 0..n {
                let x = d[i * n + j];
                if !x.is_finite() {
                    return Err(SpaceError::NonFinite { i, j });
                }
                if x < 0.0 {
                    return Err(SpaceError::Negative { i, j, value: x });
                }
            }
        }
        Ok(Self { n, d })
    }

    /// Builds a table from a function of the index pair.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, SpaceError> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// First `(i, j)` with `i < j` whose mirrored entries differ beyond `rel`.
    pub fn first_asymmetry(&self, rel: f64) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !approx_eq(self.get(i, j), self.get(j, i), rel) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Entrywise sum of two tables of equal size.
    pub fn add(&self, other: &DistanceTable) -> Result<DistanceTable, SpaceError> {
        if self.n != other.n {
            return Err(SpaceError::DimensionMismatch {
                space: self.n,
                what: "second table",
                found: other.n,
            });
        }
        Ok(DistanceTable {
            n: self.n,
            d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Pointwise coefficient table `t[i][j] = θ(i, j) ≥ 1`. Not required to be
/// symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaTable {
    n: usize,
    t: Vec<f64>,
}

impl ThetaTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let (n, t) = flatten(rows)?;
        for i in 0..n {
            for j in 0..n {
                let x = t[i * n + j];
                if !x.is_finite() {
                    return Err(SpaceError::NonFinite { i, j });
                }
                if x < 1.0 {
                    return Err(SpaceError::ThetaBelowOne { i, j, value: x });
                }
            }
        }
        Ok(Self { n, t })
    }

    pub fn constant(n: usize, s: f64) -> Result<Self, SpaceError> {
        Self::new(vec![vec![s; n]; n])
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, SpaceError> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.t[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.t.iter().copied().fold(1.0, f64::max)
    }
}

fn flatten(rows: Vec<Vec<f64>>) -> Result<(usize, Vec<f64>), SpaceError> {
    let n = rows.len();
    if n == 0 {
        return Err(SpaceError::Empty);
    }
    let mut d = Vec::with_capacity(n * n);
    for (row, r) in rows.into_iter().enumerate() {
        if r.len() != n {
            return Err(SpaceError::NotSquare { row, expected: n, found: r.len() });
        }
        d.extend(r);
    }
    Ok((n, d))
}

/// The axiom families that can be claimed for a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Metric,
    BMetric,
    Rectangular,
    VGeneralized,
    Bvs,
    PartialMetric,
    PartialB,
    PartialRectB,
    PartialVGeneralized,
    PartialBvs,
    ExtendedB,
    BvTheta,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::Metric,
        Kind::BMetric,
        Kind::Rectangular,
        Kind::VGeneralized,
        Kind::Bvs,
        Kind::PartialMetric,
        Kind::PartialB,
        Kind::PartialRectB,
        Kind::PartialVGeneralized,
        Kind::PartialBvs,
        Kind::ExtendedB,
        Kind::BvTheta,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Kind::Metric => "metric",
            Kind::BMetric => "b_metric",
            Kind::Rectangular => "rectangular",
            Kind::VGeneralized => "v_generalized",
            Kind::Bvs => "bvs",
            Kind::PartialMetric => "partial_metric",
            Kind::PartialB => "partial_b",
            Kind::PartialRectB => "partial_rect_b",
            Kind::PartialVGeneralized => "partial_v_generalized",
            Kind::PartialBvs => "partial_bvs",
            Kind::ExtendedB => "extended_b",
            Kind::BvTheta => "bv_theta",
        }
    }

    /// Self-distances may be nonzero and are subtracted in the polygon axiom.
    pub fn is_partial(self) -> bool {
        matches!(
            self,
            Kind::PartialMetric
                | Kind::PartialB
                | Kind::PartialRectB
                | Kind::PartialVGeneralized
                | Kind::PartialBvs
        )
    }

    /// Coefficient is a θ table rather than a constant.
    pub fn uses_theta(self) -> bool {
        matches!(self, Kind::ExtendedB | Kind::BvTheta)
    }

    pub fn forced_v(self) -> Option<usize> {
        match self {
            Kind::Metric | Kind::PartialMetric | Kind::PartialB | Kind::BMetric | Kind::ExtendedB => {
                Some(1)
            }
            Kind::Rectangular | Kind::PartialRectB => Some(2),
            _ => None,
        }
    }

    pub fn forced_s(self) -> Option<f64> {
        match self {
            Kind::Metric
            | Kind::Rectangular
            | Kind::PartialMetric
            | Kind::VGeneralized
            | Kind::PartialVGeneralized => Some(1.0),
            _ => None,
        }
    }

    /// Whether chain points must be pairwise distinct and differ from the
    /// endpoints unless the profile says otherwise.
    pub fn default_distinct_chain(self) -> bool {
        !self.is_partial()
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .iter()
            .copied()
            .find(|k| k.token() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// Polygon coefficient: a constant `s ≥ 1` or a θ table.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    Theta(ThetaTable),
}

impl Coefficient {
    #[inline]
    pub fn at(&self, u: usize, w: usize) -> f64 {
        match self {
            Coefficient::Constant(s) => *s,
            Coefficient::Theta(t) => t.get(u, w),
        }
    }
}

/// Which space family is claimed, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomProfile {
    kind: Kind,
    v: usize,
    coefficient: Coefficient,
    distinct_chain: bool,
}

impl AxiomProfile {
    /// Profile with a constant coefficient. Rejects θ kinds and parameters
    /// that contradict the kind.
    pub fn new(kind: Kind, v: usize, s: f64) -> Result<Self, SpaceError> {
        if kind.uses_theta() {
            return Err(SpaceError::Profile(format!("{kind} needs a theta table")));
        }
        if !(s.is_finite() && s >= 1.0) {
            return Err(SpaceError::Profile(format!("coefficient s = {s} must be a finite real ≥ 1")));
        }
        if let Some(forced) = kind.forced_s() {
            if s != forced {
                return Err(SpaceError::Profile(format!("{kind} forces s = {forced}, got {s}")));
            }
        }
        Self::build(kind, v, Coefficient::Constant(s))
    }

    pub fn with_theta(kind: Kind, v: usize, theta: ThetaTable) -> Result<Self, SpaceError> {
        if !kind.uses_theta() {
            return Err(SpaceError::Profile(format!("{kind} takes a constant coefficient")));
        }
        Self::build(kind, v, Coefficient::Theta(theta))
    }

    fn build(kind: Kind, v: usize, coefficient: Coefficient) -> Result<Self, SpaceError> {
        if v == 0 {
            return Err(SpaceError::Profile("order v must be positive".into()));
        }
        if let Some(forced) = kind.forced_v() {
            if v != forced {
                return Err(SpaceError::Profile(format!("{kind} forces v = {forced}, got {v}")));
            }
        }
        Ok(Self { kind, v, coefficient, distinct_chain: kind.default_distinct_chain() })
    }

    pub fn with_distinct_chain(mut self, distinct: bool) -> Self {
        self.distinct_chain = distinct;
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }

    /// Constant coefficient, if the profile has one.
    pub fn s(&self) -> Option<f64> {
        match self.coefficient {
            Coefficient::Constant(s) => Some(s),
            Coefficient::Theta(_) => None,
        }
    }

    pub fn theta(&self) -> Option<&ThetaTable> {
        match &self.coefficient {
            Coefficient::Theta(t) => Some(t),
            Coefficient::Constant(_) => None,
        }
    }

    pub fn distinct_chain(&self) -> bool {
        self.distinct_chain
    }

    pub fn is_partial(&self) -> bool {
        self.kind.is_partial()
    }
}

impl fmt::Display for AxiomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={} v={} ", self.kind, self.v)?;
        match &self.coefficient {
            Coefficient::Constant(s) => write!(f, "s={s}")?,
            Coefficient::Theta(t) => write!(f, "theta=table(max={})", t.max_entry())?,
        }
        write!(f, " distinct={}", self.distinct_chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rejects_bad_input() {
        assert_eq!(DistanceTable::new(vec![]), Err(SpaceError::Empty));
        assert!(matches!(
            DistanceTable::new(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(SpaceError::NotSquare { row: 1, .. })
        ));
        assert_eq!(
            DistanceTable::new(vec![vec![0.0, f64::NAN], vec![1.0, 0.0]]),
            Err(SpaceError::NonFinite { i: 0, j: 1 })
        );
        assert!(matches!(
            DistanceTable::new(vec![vec![-1.0]]),
            Err(SpaceError::Negative { i: 0, j: 0, .. })
        ));
        assert!(matches!(
            ThetaTable::new(vec![vec![0.5]]),
            Err(SpaceError::ThetaBelowOne { .. })
        ));
    }

    #[test]
    fn asymmetry_is_located() {
        let t = DistanceTable::new(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.5, 0.0]])
            .unwrap();
        assert_eq!(t.first_asymmetry(DEFAULT_REL_TOL), Some((1, 2)));
    }

    #[test]
    fn kind_tokens_round_trip() {
        for k in Kind::ALL {
            assert_eq!(k.token().parse::<Kind>().unwrap(), k);
        }
        assert!("hilbert".parse::<Kind>().is_err());
    }

    #[test]
    fn forced_parameters() {
        assert!(AxiomProfile::new(Kind::Metric, 1, 1.0).is_ok());
        assert!(AxiomProfile::new(Kind::Metric, 2, 1.0).is_err());
        assert!(AxiomProfile::new(Kind::Metric, 1, 2.0).is_err());
        assert!(AxiomProfile::new(Kind::Rectangular, 2, 1.0).is_ok());
        assert!(AxiomProfile::new(Kind::PartialRectB, 3, 2.0).is_err());
        assert!(AxiomProfile::new(Kind::PartialB, 1, 3.0).is_ok());
        assert!(AxiomProfile::new(Kind::VGeneralized, 4, 1.5).is_err());
        assert!(AxiomProfile::new(Kind::Bvs, 0, 1.0).is_err());
        assert!(AxiomProfile::new(Kind::Bvs, 3, 0.5).is_err());
        assert!(AxiomProfile::new(Kind::BvTheta, 3, 1.0).is_err());
        let theta = ThetaTable::constant(3, 2.0).unwrap();
        assert!(AxiomProfile::with_theta(Kind::ExtendedB, 2, theta.clone()).is_err());
        assert!(AxiomProfile::with_theta(Kind::Bvs, 2, theta.clone()).is_err());
        assert!(AxiomProfile::with_theta(Kind::BvTheta, 5, theta).is_ok());
    }

    #[test]
    fn distinct_chain_defaults() {
        for k in Kind::ALL {
            let p = if k.uses_theta() {
                AxiomProfile::with_theta(k, k.forced_v().unwrap_or(2), ThetaTable::constant(1, 1.0).unwrap())
            } else {
                AxiomProfile::new(k, k.forced_v().unwrap_or(2), k.forced_s().unwrap_or(2.0))
            }
            .unwrap();
            assert_eq!(p.distinct_chain(), !k.is_partial(), "{k}");
        }
    }
}
