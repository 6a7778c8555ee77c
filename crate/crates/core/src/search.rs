//! Seeded instance generation and separation-witness search.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`; search attempt `i` uses stream `i` of that seed, so
//! attempts are independent and the reported witness (smallest attempt
//! index) does not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::classify::{min_coefficient, min_theta, Family};
use crate::solvers::{
    check_hypotheses, estimate_constants, limit_set, picard_orbit, Constants, ContractionProfile, Estimate,
    IterOptions, Point, Problem, PsiFunction, Scale, SolverError, Theorem,
};
use crate::space::{verify_axioms, AxiomProfile, DistanceTable, Kind, SpaceError, ThetaTable, VerificationReport};

/// Regeneration attempts before [`random_space`] gives up.
pub const RETRY_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("no valid {kind} table generated after {RETRY_CAP} attempts")]
    GenerationFailed { kind: Kind },
    #[error("space has no point with zero self-distance")]
    NoZeroSelfPoint,
    #[error("no {0} instance found within budget")]
    NoInstance(Theorem),
    #[error("invalid search target: {0}")]
    BadTarget(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Shortest-path closure of a random symmetric table with weights in
/// `[1, 10)`.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> DistanceTable {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1.0..10.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    DistanceTable::new(d).expect("closure of a valid table")
}

/// Symmetric multiplicative noise factors in `[0, 2s)`.
fn noise<R: Rng>(rng: &mut R, n: usize, s: f64) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.gen::<f64>() * 2.0 * s;
            g[i][j] = x;
            g[j][i] = x;
        }
    }
    g
}

/// Blend weights tried in order: `1, 1/2, …, 2⁻⁸, 0`.
fn blends() -> impl Iterator<Item = f64> {
    (0..=8).map(|k| 0.5f64.powi(k)).chain(std::iter::once(0.0))
}

fn perturb(d: &DistanceTable, g: &[Vec<f64>], t: f64) -> DistanceTable {
    DistanceTable::from_fn(d.n(), |i, j| d.get(i, j) * (1.0 + t * g[i][j])).expect("scaled metric")
}

/// Partial metric `(d(x,y) + a_x + a_y)/2` with `a_x = τ·d(x,r)`: zero
/// self-distance at the root `r`; `τ = 1` with probability 1/4.
fn random_partial_metric<R: Rng>(rng: &mut R, n: usize) -> DistanceTable {
    let d = random_metric(rng, n);
    let root = rng.gen_range(0..n);
    let tau = if rng.gen_bool(0.25) { 1.0 } else { rng.gen::<f64>() };
    let a: Vec<f64> = (0..n).map(|x| tau * d.get(x, root)).collect();
    DistanceTable::from_fn(n, |x, y| {
        let (x, y) = (x.min(y), x.max(y));
        if x == y {
            a[x]
        } else {
            (d.get(x, y) + a[x] + a[y]) / 2.0
        }
    })
        .expect("partial metric")
}

fn random_theta<R: Rng>(rng: &mut R, floor: &ThetaTable, s: f64) -> ThetaTable {
    let n = floor.n();
    let mut t = vec![vec![1.0; n]; n];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            if i != j {
                *x = floor.get(i, j).max(1.0 + rng.gen::<f64>() * (s - 1.0));
            }
        }
    }
    ThetaTable::new(t).expect("entries at least 1")
}

fn generate<R: Rng>(rng: &mut R, kind: Kind, n: usize, v: usize, s: f64) -> Option<(DistanceTable, AxiomProfile)> {
    let v = kind.forced_v().unwrap_or(v);
    let s = kind.forced_s().unwrap_or(s);
    if kind.uses_theta() {
        let d = random_metric(rng, n);
        let g = noise(rng, n, s);
        for t in blends() {
            let e = perturb(&d, &g, t);
            let Ok(floor) = min_theta(&e, v) else { continue };
            if floor.max_entry() <= s {
                let theta = random_theta(rng, &floor, s);
                return Some((e, AxiomProfile::with_theta(kind, v, theta).ok()?));
            }
        }
        return None;
    }
    let profile = AxiomProfile::new(kind, v, s).ok()?;
    if kind.is_partial() {
        let p = random_partial_metric(rng, n);
        if rng.gen_bool(0.25) {
            return Some((p, profile));
        }
        let d = random_metric(rng, n);
        let g = noise(rng, n, s);
        for t in blends() {
            let sum = p.add(&perturb(&d, &g, t)).ok()?;
            if min_coefficient(&sum, v, Family::Partial, profile.distinct_chain()).is_ok_and(|m| m <= s) {
                return Some((sum, profile));
            }
        }
        None
    } else {
        let d = random_metric(rng, n);
        let g = noise(rng, n, s);
        for t in blends() {
            let e = perturb(&d, &g, t);
            if min_coefficient(&e, v, Family::Plain, profile.distinct_chain()).is_ok_and(|m| m <= s) {
                return Some((e, profile));
            }
        }
        None
    }
}

fn random_space_from<R: Rng>(
    rng: &mut R,
    kind: Kind,
    n: usize,
    v: usize,
    s: f64,
) -> Result<(DistanceTable, AxiomProfile), SearchError> {
    if n == 0 {
        return Err(SpaceError::Empty.into());
    }
    if kind.uses_theta() {
        AxiomProfile::with_theta(kind, kind.forced_v().unwrap_or(v), ThetaTable::constant(n, s)?)?;
    } else {
        AxiomProfile::new(kind, kind.forced_v().unwrap_or(v), kind.forced_s().unwrap_or(s))?;
    }
    for _ in 0..RETRY_CAP {
        if let Some((table, profile)) = generate(rng, kind, n, v, s) {
            if verify_axioms(&table, &profile)?.passed() {
                return Ok((table, profile));
            }
        }
    }
    Err(SearchError::GenerationFailed { kind })
}

/// A random table passing `kind` at order `v` with coefficient `s` (for θ
/// kinds, a random θ with entries in `[1, s]` where possible). Forced
/// parameters of the kind override `v` and `s`.
pub fn random_space(kind: Kind, n: usize, v: usize, s: f64, seed: u64) -> Result<(DistanceTable, AxiomProfile), SearchError> {
    random_space_from(&mut ChaCha8Rng::seed_from_u64(seed), kind, n, v, s)
}

/// A generated map with its fitted, hypothesis-checked constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    pub problem: Problem,
    pub profile: ContractionProfile,
    /// `None` when the constant-map fallback was used.
    pub attempt: Option<usize>,
}

fn zero_self_points(space: &DistanceTable) -> Vec<usize> {
    (0..space.n()).filter(|&x| space.get(x, x) == 0.0).collect()
}

/// Random map fixing a zero-self point `b` and sending every other point to
/// `b` or one of its `k` nearest neighbours.
fn random_map<R: Rng>(rng: &mut R, space: &DistanceTable, zero: &[usize]) -> Vec<usize> {
    let n = space.n();
    let b = zero[rng.gen_range(0..zero.len())];
    let mut others: Vec<usize> = (0..n).filter(|&x| x != b).collect();
    others.sort_by(|&x, &y| space.get(b, x).total_cmp(&space.get(b, y)).then(x.cmp(&y)));
    let k = if others.is_empty() { 0 } else { rng.gen_range(1..=others.len()) };
    let mut candidates = vec![b];
    candidates.extend_from_slice(&others[..k]);
    (0..n)
        .map(|x| {
            if x == b || rng.gen_bool(0.5) {
                b
            } else {
                candidates[rng.gen_range(0..candidates.len())]
            }
        })
        .collect()
}

/// Turns fitted constants into a randomized admissible profile: a random
/// ψ below the linear bound for the weak theorem, and extra slack on one of
/// β, γ for the Reich kinds so that `β ≠ γ`.
fn randomize_profile<R: Rng>(rng: &mut R, problem: &Problem, fitted: ContractionProfile) -> ContractionProfile {
    match (fitted.theorem(), fitted.constants()) {
        (Theorem::WeakTheta, Constants::Psi(psi)) => {
            let cap = psi.final_slope();
            let max_d = problem.space().map_or(1.0, |d| d.max_entry()).max(f64::MIN_POSITIVE);
            let t1 = max_d * rng.gen_range(0.05..1.0);
            let c1 = cap * rng.gen_range(0.1..=1.0);
            let c2 = cap * rng.gen_range(0.1..=1.0);
            ContractionProfile::weak(PsiFunction::new(vec![(0.0, 0.0), (t1, c1 * t1)], c2))
        }
        (theorem, &Constants::Reich { alpha, beta, gamma }) => {
            let room = (1.0 - alpha - beta - gamma).max(0.0) * rng.gen::<f64>() * 0.5;
            let (beta, gamma) = if rng.gen_bool(0.5) { (beta + room, gamma) } else { (beta, gamma + room) };
            if theorem == Theorem::KannanTheta {
                ContractionProfile::kannan_theta(beta, gamma)
            } else {
                ContractionProfile::reich(alpha, beta, gamma)
            }
        }
        _ => fitted,
    }
}

/// Rejection-samples maps ranked by [`estimate_constants`] until one passes
/// [`check_hypotheses`]; falls back to the constant map onto the first
/// zero-self point.
pub fn random_contraction(
    space: &DistanceTable,
    v: usize,
    scale: Scale,
    theorem: Theorem,
    seed: u64,
    budget: usize,
) -> Result<Contraction, SearchError> {
    let zero = zero_self_points(space);
    if zero.is_empty() {
        return Err(SearchError::NoZeroSelfPoint);
    }
    let accept = |problem: Problem, rng: Option<&mut ChaCha8Rng>| -> Option<(Problem, ContractionProfile)> {
        let Estimate::Admissible(fitted) = estimate_constants(&problem, theorem) else { return None };
        let profile = match rng {
            Some(rng) => randomize_profile(rng, &problem, fitted),
            None => fitted,
        };
        check_hypotheses(&problem, &profile).ok().then_some((problem, profile))
    };
    for attempt in 0..budget {
        let mut rng = rng_for(seed, attempt as u64);
        let map = random_map(&mut rng, space, &zero);
        let problem = Problem::finite(space.clone(), map, v, scale.clone())?;
        if let Some((problem, profile)) = accept(problem, Some(&mut rng)) {
            return Ok(Contraction { problem, profile, attempt: Some(attempt) });
        }
    }
    let problem = Problem::finite(space.clone(), vec![zero[0]; space.n()], v, scale)?;
    match accept(problem, None) {
        Some((problem, profile)) => Ok(Contraction { problem, profile, attempt: None }),
        None => Err(SearchError::NoInstance(theorem)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchGoal {
    PartialBvsNotBvs,
    PartialBNotPartialMetric,
    BvThetaNotBvsConst,
    NonuniqueLimit,
    KannanNotBanach,
    /// Inclusion guard: must never find anything.
    BvsNotPartialBvs,
}

impl SearchGoal {
    pub const ALL: [SearchGoal; 6] = [
        SearchGoal::PartialBvsNotBvs,
        SearchGoal::PartialBNotPartialMetric,
        SearchGoal::BvThetaNotBvsConst,
        SearchGoal::NonuniqueLimit,
        SearchGoal::KannanNotBanach,
        SearchGoal::BvsNotPartialBvs,
    ];

    pub fn token(self) -> &'static str {
        match self {
            SearchGoal::PartialBvsNotBvs => "partial_bvs_not_bvs",
            SearchGoal::PartialBNotPartialMetric => "partial_b_not_partial_metric",
            SearchGoal::BvThetaNotBvsConst => "bv_theta_not_bvs_const",
            SearchGoal::NonuniqueLimit => "nonunique_limit",
            SearchGoal::KannanNotBanach => "kannan_not_banach",
            SearchGoal::BvsNotPartialBvs => "bvs_not_partial_bvs",
        }
    }
}

impl fmt::Display for SearchGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SearchGoal {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SearchGoal::ALL
            .into_iter()
            .find(|g| g.token() == s)
            .ok_or_else(|| SearchError::BadTarget(format!("unknown goal `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchTarget {
    pub goal: SearchGoal,
    pub n: usize,
    pub v: usize,
    pub s: f64,
    pub budget: usize,
    pub seed: u64,
}

/// A separating instance with the evidence for both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub attempt: usize,
    pub space: DistanceTable,
    /// Verification of the class the witness belongs to.
    pub member: VerificationReport,
    /// Verification of the class it fails, when the separation is between
    /// two space classes.
    pub non_member: Option<VerificationReport>,
    pub map: Option<Vec<usize>>,
    pub orbit: Option<Vec<usize>>,
    pub limit_set: Option<Vec<usize>>,
    /// Constant fits for map separations: (holding theorem, failing theorem).
    pub estimates: Option<(Estimate, Estimate)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Box<Witness>),
    NoneFound { budget: usize },
}

fn index_list(points: &[Point]) -> Vec<usize> {
    points
        .iter()
        .map(|p| match p {
            Point::Index(i) => *i,
            Point::Real(_) => unreachable!("finite orbit"),
        })
        .collect()
}

fn class_pair(
    attempt: usize,
    space: DistanceTable,
    member: &AxiomProfile,
    other: &AxiomProfile,
) -> Result<Option<Witness>, SearchError> {
    let first = verify_axioms(&space, member)?;
    if !first.passed() {
        return Ok(None);
    }
    let second = verify_axioms(&space, other)?;
    if second.passed() {
        return Ok(None);
    }
    Ok(Some(Witness {
        attempt,
        space,
        member: first,
        non_member: Some(second),
        map: None,
        orbit: None,
        limit_set: None,
        estimates: None,
    }))
}

fn attempt(target: &SearchTarget, i: usize) -> Result<Option<Witness>, SearchError> {
    let SearchTarget { goal, n, v, s, seed, .. } = *target;
    let mut rng = rng_for(seed, i as u64);
    match goal {
        SearchGoal::PartialBvsNotBvs => {
            let (space, profile) = random_space_from(&mut rng, Kind::PartialBvs, n, v, s)?;
            class_pair(i, space, &profile, &AxiomProfile::new(Kind::Bvs, v, s)?)
        }
        SearchGoal::PartialBNotPartialMetric => {
            let (space, profile) = random_space_from(&mut rng, Kind::PartialB, n, 1, s)?;
            class_pair(i, space, &profile, &AxiomProfile::new(Kind::PartialMetric, 1, 1.0)?)
        }
        SearchGoal::BvsNotPartialBvs => {
            let (space, profile) = random_space_from(&mut rng, Kind::Bvs, n, v, s)?;
            let other = AxiomProfile::new(Kind::PartialBvs, v, s)?.with_distinct_chain(true);
            class_pair(i, space, &profile, &other)
        }
        SearchGoal::BvThetaNotBvsConst => {
            let d = random_metric(&mut rng, n);
            let g = noise(&mut rng, n, 2.0 * s);
            let space = perturb(&d, &g, 1.0);
            let theta = match min_theta(&space, v) {
                Ok(t) => t,
                Err(_) => return Ok(None),
            };
            let off: Vec<f64> =
                (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).map(|(a, b)| theta.get(a, b)).collect();
            let mean = off.iter().sum::<f64>() / off.len().max(1) as f64;
            if mean > s {
                return Ok(None);
            }
            class_pair(i, space, &AxiomProfile::with_theta(Kind::BvTheta, v, theta)?, &AxiomProfile::new(Kind::Bvs, v, s)?)
        }
        SearchGoal::NonuniqueLimit => {
            let (space, profile) = random_space_from(&mut rng, Kind::PartialBvs, n, v, s)?;
            let zero = zero_self_points(&space);
            let Some(&r) = zero.first() else { return Ok(None) };
            let u0 = (0..n).rev().find(|&x| x != r).unwrap_or(r);
            let problem = Problem::finite(space.clone(), vec![r; n], v, Scale::Constant(s))?;
            let trace = picard_orbit(&problem, Point::Index(u0), &IterOptions::default())?;
            let limits = limit_set(&problem, &trace, IterOptions::default().tol)?;
            if limits.points.len() < 2 {
                return Ok(None);
            }
            Ok(Some(Witness {
                attempt: i,
                member: verify_axioms(&space, &profile)?,
                space,
                non_member: None,
                map: Some(vec![r; n]),
                orbit: Some(index_list(&trace.orbit)),
                limit_set: Some(limits.points),
                estimates: None,
            }))
        }
        SearchGoal::KannanNotBanach => {
            let (space, profile) = random_space_from(&mut rng, Kind::PartialBvs, n, v, s)?;
            let zero = zero_self_points(&space);
            if zero.is_empty() {
                return Ok(None);
            }
            let map = random_map(&mut rng, &space, &zero);
            let problem = Problem::finite(space.clone(), map.clone(), v, Scale::Constant(s))?;
            let kannan = estimate_constants(&problem, Theorem::KannanPartial);
            let Some(kp) = kannan.admissible() else { return Ok(None) };
            if !check_hypotheses(&problem, kp).ok() {
                return Ok(None);
            }
            let banach = estimate_constants(&problem, Theorem::BanachPartial);
            if banach.admissible().is_some() {
                return Ok(None);
            }
            Ok(Some(Witness {
                attempt: i,
                member: verify_axioms(&space, &profile)?,
                space,
                non_member: None,
                map: Some(map),
                orbit: None,
                limit_set: None,
                estimates: Some((kannan, banach)),
            }))
        }
    }
}

/// Runs up to `budget` independent attempts in parallel and returns the
/// witness with the smallest attempt index.
pub fn search_separation(target: &SearchTarget) -> Result<SearchOutcome, SearchError> {
    if target.budget == 0 {
        return Err(SearchError::BadTarget("budget must be at least 1".into()));
    }
    if target.n < 2 {
        return Err(SearchError::BadTarget("n must be at least 2".into()));
    }
    if target.v == 0 || !(target.s.is_finite() && target.s >= 1.0) {
        return Err(SearchError::BadTarget("v must be positive and s at least 1".into()));
    }
    let found = (0..target.budget).into_par_iter().map(|i| attempt(target, i)).find_map_first(|r| match r {
        Ok(Some(w)) => Some(Ok(w)),
        Ok(None) | Err(SearchError::GenerationFailed { .. }) => None,
        Err(e) => Some(Err(e)),
    });
    match found {
        Some(Ok(w)) => Ok(SearchOutcome::Found(Box::new(w))),
        Some(Err(e)) => Err(e),
        None => Ok(SearchOutcome::NoneFound { budget: target.budget }),
    }
}
