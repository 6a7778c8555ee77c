use std::fmt;

use super::{
    approx_eq, approx_le, tolerance, AxiomProfile, ChainWalker, Coefficient, DistanceTable,
    SpaceError, DEFAULT_REL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    /// Axiom 1: identity of indiscernibles (plain) or `u=w ⇔ ρ(u,u)=ρ(u,w)=ρ(w,w)` (partial).
    T0Indistancy,
    /// Axiom 2 of partial kinds: `ρ(u,u) ≤ ρ(u,w)`.
    T1SmallSelf,
    T2Symmetry,
    T3Polygon,
    ZeroOffdiag,
}

impl AxiomId {
    pub fn token(self) -> &'static str {
        match self {
            AxiomId::T0Indistancy => "T0_indistancy",
            AxiomId::T1SmallSelf => "T1_small_self",
            AxiomId::T2Symmetry => "T2_symmetry",
            AxiomId::T3Polygon => "T3_polygon",
            AxiomId::ZeroOffdiag => "zero_offdiag",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A concrete tuple on which an axiom fails.
///
/// For the polygon axiom `lhs = ρ(u,w)` and `rhs` is the coefficient-weighted
/// path sum minus the self-distance sum. For axiom 1 on partial kinds
/// `lhs = ρ(u,w)` and `rhs = ρ(u,u)` (found equal to each other and to
/// `ρ(w,w)` although `u ≠ w`); on plain kinds `lhs` is the offending entry and
/// `rhs = 0`. For symmetry the two mirrored entries are recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationWitness {
    pub axiom: AxiomId,
    pub tuple: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for ViolationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple: Vec<String> = self.tuple.iter().map(usize::to_string).collect();
        write!(f, "{} tuple=({}) lhs={} rhs={}", self.axiom, tuple.join(","), self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Passed, but the polygon axiom had no admissible tuple.
    Vacuous,
    Fail,
}

impl Outcome {
    pub fn token(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Vacuous => "vacuous",
            Outcome::Fail => "fail",
        }
    }

    pub fn passed(self) -> bool {
        !matches!(self, Outcome::Fail)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Relative tolerance; `0.0` gives exact comparisons.
    pub rel_tol: f64,
    /// Maximum number of witnesses kept in the report.
    pub report_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_REL_TOL, report_cap: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub profile: AxiomProfile,
    /// First `report_cap` witnesses, grouped by axiom and in lexicographic
    /// tuple order within each axiom.
    pub violations: Vec<ViolationWitness>,
    /// Total number of violations found, including those not kept.
    pub violation_count: usize,
    /// Number of polygon tuples evaluated.
    pub tuples_checked: u64,
    /// The polygon axiom had no admissible tuple.
    pub vacuous: bool,
}

impl VerificationReport {
    pub fn outcome(&self) -> Outcome {
        if self.violation_count > 0 {
            Outcome::Fail
        } else if self.vacuous {
            Outcome::Vacuous
        } else {
            Outcome::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn first_violation(&self, axiom: AxiomId) -> Option<&ViolationWitness> {
        self.violations.iter().find(|w| w.axiom == axiom)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "report {} verdict={} tuples={} violations={}",
            self.profile,
            self.outcome(),
            self.tuples_checked,
            self.violation_count
        )?;
        if self.vacuous {
            write!(f, " warning=vacuous-polygon-axiom")?;
        }
        for w in &self.violations {
            write!(f, "\n  violation {w}")?;
        }
        Ok(())
    }
}

struct Collector {
    cap: usize,
    kept: Vec<ViolationWitness>,
    count: usize,
}

impl Collector {
    fn new(cap: usize) -> Self {
        Self { cap, kept: Vec::new(), count: 0 }
    }

    fn push(&mut self, w: ViolationWitness) {
        self.count += 1;
        if self.kept.len() < self.cap {
            self.kept.push(w);
        }
    }

    fn absorb(&mut self, other: Collector) {
        self.count += other.count;
        for w in other.kept {
            if self.kept.len() >= self.cap {
                break;
            }
            self.kept.push(w);
        }
    }
}

pub fn verify_axioms(
    space: &DistanceTable,
    profile: &AxiomProfile,
) -> Result<VerificationReport, SpaceError> {
    verify_axioms_with(space, profile, &VerifyOptions::default())
}

/// Exhaustively checks every axiom of `profile` on `space`.
pub fn verify_axioms_with(
    space: &DistanceTable,
    profile: &AxiomProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, SpaceError> {
    check_theta_dims(space, profile)?;
    let rel = opts.rel_tol;
    let mut out = Collector::new(opts.report_cap);
    basic_axioms(space, profile.is_partial(), rel, &mut out);

    let walker = ChainWalker::new(space, profile.v(), profile.distinct_chain());
    let partial = profile.is_partial();
    let coefficient = profile.coefficient();
    let per_start = walker.par_per_start(|u| {
        let mut local = Collector::new(opts.report_cap);
        let mut checked = 0u64;
        walker.walk_from(u, &mut |tuple, path, selfsum| {
            checked += 1;
            let (lhs, rhs) = polygon_sides(space, coefficient, partial, tuple[0], tuple[1], path, selfsum);
            if rhs - lhs < -tolerance(lhs, rhs, rel) {
                local.push(ViolationWitness { axiom: AxiomId::T3Polygon, tuple: tuple.to_vec(), lhs, rhs });
            }
        });
        (local, checked)
    });
    let mut tuples_checked = 0;
    for (local, checked) in per_start {
        tuples_checked += checked;
        out.absorb(local);
    }

    Ok(VerificationReport {
        profile: profile.clone(),
        violations: out.kept,
        violation_count: out.count,
        tuples_checked,
        vacuous: walker.is_vacuous(),
    })
}

fn check_theta_dims(space: &DistanceTable, profile: &AxiomProfile) -> Result<(), SpaceError> {
    if let Some(t) = profile.theta() {
        if t.n() != space.n() {
            return Err(SpaceError::DimensionMismatch { space: space.n(), what: "theta table", found: t.n() });
        }
    }
    Ok(())
}

/// Axioms 1–3: indiscernibility, small self-distance (partial only), symmetry.
fn basic_axioms(space: &DistanceTable, partial: bool, rel: f64, out: &mut Collector) {
    let n = space.n();
    for u in 0..n {
        for w in u..n {
            let (duu, duw, dww) = (space.get(u, u), space.get(u, w), space.get(w, w));
            if partial {
                if u != w && approx_eq(duu, duw, rel) && approx_eq(duw, dww, rel) && approx_eq(duu, dww, rel) {
                    out.push(ViolationWitness { axiom: AxiomId::T0Indistancy, tuple: vec![u, w], lhs: duw, rhs: duu });
                }
            } else if u == w {
                if !approx_eq(duu, 0.0, rel) {
                    out.push(ViolationWitness { axiom: AxiomId::T0Indistancy, tuple: vec![u, u], lhs: duu, rhs: 0.0 });
                }
            } else if approx_eq(duw, 0.0, rel) {
                out.push(ViolationWitness { axiom: AxiomId::T0Indistancy, tuple: vec![u, w], lhs: duw, rhs: 0.0 });
            }
        }
    }
    if partial {
        for u in 0..n {
            for w in 0..n {
                if u != w && !approx_le(space.get(u, u), space.get(u, w), rel) {
                    out.push(ViolationWitness {
                        axiom: AxiomId::T1SmallSelf,
                        tuple: vec![u, w],
                        lhs: space.get(u, u),
                        rhs: space.get(u, w),
                    });
                }
            }
        }
    }
    for u in 0..n {
        for w in u + 1..n {
            if !approx_eq(space.get(u, w), space.get(w, u), rel) {
                out.push(ViolationWitness {
                    axiom: AxiomId::T2Symmetry,
                    tuple: vec![u, w],
                    lhs: space.get(u, w),
                    rhs: space.get(w, u),
                });
            }
        }
    }
}

/// Violations of axioms 1–3 only, used by the classifier as a precondition.
pub(crate) fn basic_axiom_violations(space: &DistanceTable, partial: bool, rel: f64) -> Vec<ViolationWitness> {
    let mut out = Collector::new(usize::MAX);
    basic_axioms(space, partial, rel, &mut out);
    out.kept
}

#[inline]
fn polygon_sides(
    space: &DistanceTable,
    coefficient: &Coefficient,
    partial: bool,
    u: usize,
    w: usize,
    path: f64,
    selfsum: f64,
) -> (f64, f64) {
    let scaled = coefficient.at(u, w) * path;
    let rhs = if partial { scaled - selfsum } else { scaled };
    (space.get(u, w), rhs)
}

/// `rhs − lhs` of the polygon inequality at one tuple `(u, w, z_1, …, z_v)`;
/// nonnegative iff the tuple satisfies it.
pub fn polygon_slack(
    space: &DistanceTable,
    profile: &AxiomProfile,
    tuple: &[usize],
) -> Result<f64, SpaceError> {
    check_theta_dims(space, profile)?;
    let v = profile.v();
    if tuple.len() != v + 2 {
        return Err(SpaceError::TupleLength { expected: v + 2, found: tuple.len() });
    }
    let n = space.n();
    if let Some(&bad) = tuple.iter().find(|&&i| i >= n) {
        return Err(SpaceError::IndexOutOfRange { index: bad, n });
    }
    if profile.distinct_chain() {
        let mut seen = vec![false; n];
        for &i in tuple {
            if seen[i] {
                return Err(SpaceError::InadmissibleTuple(tuple.to_vec()));
            }
            seen[i] = true;
        }
    }
    let (u, w) = (tuple[0], tuple[1]);
    let mut path = 0.0;
    let mut selfsum = 0.0;
    let mut prev = u;
    for &z in &tuple[2..] {
        path += space.get(prev, z);
        selfsum += space.get(z, z);
        prev = z;
    }
    path += space.get(prev, w);
    let (lhs, rhs) = polygon_sides(space, profile.coefficient(), profile.is_partial(), u, w, path, selfsum);
    Ok(rhs - lhs)
}

/// Passes iff every off-diagonal entry is strictly positive; otherwise the
/// first zero in row-major order over `i < j`.
pub fn zero_offdiag_check(space: &DistanceTable) -> Result<(), ViolationWitness> {
    let n = space.n();
    for i in 0..n {
        for j in i + 1..n {
            let x = space.get(i, j).min(space.get(j, i));
            if x <= 0.0 {
                return Err(ViolationWitness { axiom: AxiomId::ZeroOffdiag, tuple: vec![i, j], lhs: x, rhs: 0.0 });
            }
        }
    }
    Ok(())
}
