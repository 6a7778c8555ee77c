//! Minimal parameters and class memberships of a distance table.
//!
//! The polygon inequality `ρ(u,w) ≤ s·path − selfsum` is linear in `s`, so the
//! smallest admissible coefficient is the largest ratio
//! `(ρ(u,w) + selfsum) / path` over admissible tuples, clamped to 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::space::{
    approx_le, basic_axiom_violations, verify_axioms, AxiomProfile, ChainWalker, DistanceTable, Kind, Outcome, SpaceError,
    ThetaTable, ViolationWitness, DEFAULT_REL_TOL,
};

/// Plain kinds have zero self-distance; partial kinds subtract it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Plain,
    Partial,
}

impl Family {
    fn is_partial(self) -> bool {
        matches!(self, Family::Partial)
    }

    /// The general kind of the family at order `v`.
    pub fn general_kind(self) -> Kind {
        match self {
            Family::Plain => Kind::Bvs,
            Family::Partial => Kind::PartialBvs,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("table fails axioms 1-3 ({} violations, first: {})", .0.len(), .0[0])]
    Axioms(Vec<ViolationWitness>),
    #[error("infeasible: tuple {tuple:?} has zero path sum but left side {lhs}")]
    Infeasible { tuple: Vec<usize>, lhs: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn require_basic_axioms(space: &DistanceTable, partial: bool) -> Result<(), ClassifyError> {
    let bad = basic_axiom_violations(space, partial, DEFAULT_REL_TOL);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(ClassifyError::Axioms(bad))
    }
}

/// Outcome of scanning tuples for the worst ratio.
enum Worst {
    Ratio(f64),
    Infeasible(Vec<usize>, f64),
}

/// Ratios this close above 1 are equalities lost to rounding.
const ROUNDING_SLACK: f64 = 8.0 * f64::EPSILON;

fn snap(r: f64) -> f64 {
    if r <= 1.0 + ROUNDING_SLACK {
        1.0
    } else {
        r
    }
}

/// Smallest `s ≥ 1` for which the polygon axiom of the family holds at order
/// `v`.
pub fn min_coefficient(
    space: &DistanceTable,
    v: usize,
    family: Family,
    distinct_chain: bool,
) -> Result<f64, ClassifyError> {
    if v == 0 {
        return Err(SpaceError::Profile("order v must be positive".into()).into());
    }
    require_basic_axioms(space, family.is_partial())?;
    let partial = family.is_partial();
    let walker = ChainWalker::new(space, v, distinct_chain);
    let per_start = walker.par_per_start(|u| {
        let mut worst = Worst::Ratio(1.0);
        walker.walk_from(u, &mut |tuple, path, selfsum| {
            if let Worst::Infeasible(..) = worst {
                return;
            }
            let lhs = space.get(tuple[0], tuple[1]) + if partial { selfsum } else { 0.0 };
            if path == 0.0 {
                if !approx_le(lhs, 0.0, DEFAULT_REL_TOL) {
                    worst = Worst::Infeasible(tuple.to_vec(), lhs);
                }
                return;
            }
            if let Worst::Ratio(r) = &mut worst {
                *r = r.max(lhs / path);
            }
        });
        worst
    });
    let mut s_min = 1.0f64;
    for w in per_start {
        match w {
            Worst::Ratio(r) => s_min = s_min.max(r),
            Worst::Infeasible(tuple, lhs) => return Err(ClassifyError::Infeasible { tuple, lhs }),
        }
    }
    Ok(snap(s_min))
}

/// Pointwise smallest θ table for which the table is a `b_v(θ)` metric:
/// `θ(u,w) = max(1, max ρ(u,w)/path)` over distinct chains from `u` to `w`.
pub fn min_theta(space: &DistanceTable, v: usize) -> Result<ThetaTable, ClassifyError> {
    if v == 0 {
        return Err(SpaceError::Profile("order v must be positive".into()).into());
    }
    require_basic_axioms(space, false)?;
    let n = space.n();
    let walker = ChainWalker::new(space, v, true);
    let rows = walker.par_per_start(|u| {
        let mut row = vec![1.0f64; n];
        let mut infeasible = None;
        walker.walk_from(u, &mut |tuple, path, _| {
            if infeasible.is_some() {
                return;
            }
            let w = tuple[1];
            let lhs = space.get(u, w);
            if path == 0.0 {
                if !approx_le(lhs, 0.0, DEFAULT_REL_TOL) {
                    infeasible = Some((tuple.to_vec(), lhs));
                }
                return;
            }
            row[w] = row[w].max(lhs / path);
        });
        (row, infeasible)
    });
    let mut table = Vec::with_capacity(n);
    for (row, infeasible) in rows {
        if let Some((tuple, lhs)) = infeasible {
            return Err(ClassifyError::Infeasible { tuple, lhs });
        }
        table.push(row.into_iter().map(snap).collect());
    }
    Ok(ThetaTable::new(table)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinOrder {
    Found(usize),
    /// First passing order only passes because no admissible tuple exists.
    FoundVacuous(usize),
    NoneUpTo(usize),
}

impl fmt::Display for MinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinOrder::Found(v) => write!(f, "{v}"),
            MinOrder::FoundVacuous(v) => write!(f, "{v}(vacuous)"),
            MinOrder::NoneUpTo(v) => write!(f, "none<={v}"),
        }
    }
}

/// Smallest `v ≤ v_max` at which the family's general kind verifies with
/// coefficient `s`.
pub fn min_order(
    space: &DistanceTable,
    s: f64,
    v_max: usize,
    family: Family,
) -> Result<MinOrder, ClassifyError> {
    for v in 1..=v_max {
        let profile = AxiomProfile::new(family.general_kind(), v, s)?;
        match verify_axioms(space, &profile)?.outcome() {
            Outcome::Pass => return Ok(MinOrder::Found(v)),
            Outcome::Vacuous => return Ok(MinOrder::FoundVacuous(v)),
            Outcome::Fail => {}
        }
    }
    Ok(MinOrder::NoneUpTo(v_max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub profile: AxiomProfile,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyProfile {
    pub memberships: Vec<Membership>,
    /// `v ↦ s_min` for plain kinds (`None` when axioms 1–3 fail or infeasible).
    pub minimal_s: BTreeMap<usize, Option<f64>>,
    pub minimal_s_partial: BTreeMap<usize, Option<f64>>,
    /// `(s, smallest passing v)` for plain kinds, in `s_grid` order.
    pub minimal_v: Vec<(f64, MinOrder)>,
    pub minimal_v_partial: Vec<(f64, MinOrder)>,
}

impl HierarchyProfile {
    pub fn outcome_of(&self, kind: Kind, v: usize, s: f64) -> Option<Outcome> {
        self.memberships
            .iter()
            .find(|m| m.profile.kind() == kind && m.profile.v() == v && coefficient_value(&m.profile) == s)
            .map(|m| m.outcome)
    }
}

fn coefficient_value(p: &AxiomProfile) -> f64 {
    p.s().unwrap_or_else(|| p.theta().map_or(1.0, |t| t.get(0, 0)))
}

/// Membership of every kind of the reduction lattice at each `(v, s)` with
/// `1 ≤ v ≤ v_max` and `s ∈ s_grid`. θ kinds use the constant table `θ ≡ s`.
pub fn hierarchy_profile(
    space: &DistanceTable,
    v_max: usize,
    s_grid: &[f64],
) -> Result<HierarchyProfile, ClassifyError> {
    let n = space.n();
    let mut cache: HashMap<(bool, bool, usize, u64), Outcome> = HashMap::new();
    let mut memberships = Vec::new();
    for v in 1..=v_max {
        for &s in s_grid {
            for kind in Kind::ALL {
                if kind.forced_v().is_some_and(|fv| fv != v) || kind.forced_s().is_some_and(|fs| fs != s) {
                    continue;
                }
                let profile = if kind.uses_theta() {
                    AxiomProfile::with_theta(kind, v, ThetaTable::constant(n, s)?)?
                } else {
                    AxiomProfile::new(kind, v, s)?
                };
                let key = (kind.is_partial(), kind.uses_theta(), v, s.to_bits());
                let outcome = match cache.get(&key) {
                    Some(o) => *o,
                    None => {
                        let o = verify_axioms(space, &profile)?.outcome();
                        cache.insert(key, o);
                        o
                    }
                };
                memberships.push(Membership { profile, outcome });
            }
        }
    }

    let mut minimal_s = BTreeMap::new();
    let mut minimal_s_partial = BTreeMap::new();
    for v in 1..=v_max {
        minimal_s.insert(v, min_coefficient(space, v, Family::Plain, true).ok());
        minimal_s_partial.insert(v, min_coefficient(space, v, Family::Partial, false).ok());
    }
    let mut minimal_v = Vec::new();
    let mut minimal_v_partial = Vec::new();
    for &s in s_grid {
        minimal_v.push((s, min_order(space, s, v_max, Family::Plain)?));
        minimal_v_partial.push((s, min_order(space, s, v_max, Family::Partial)?));
    }
    Ok(HierarchyProfile { memberships, minimal_s, minimal_s_partial, minimal_v, minimal_v_partial })
}
