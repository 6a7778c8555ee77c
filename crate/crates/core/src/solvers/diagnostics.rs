use std::fmt;

use super::{ContractionProfile, IterationTrace, Point, Problem, SolverError, StopReason};

/// Absolute slack added to every recorded-sequence bound.
pub const TRACE_ABS_TOL: f64 = 1e-12;
/// Relative slack added to every recorded-sequence bound.
pub const TRACE_REL_TOL: f64 = 1e-9;

fn within(observed: f64, bound: f64) -> bool {
    observed <= bound + TRACE_ABS_TOL + TRACE_REL_TOL * bound.abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateVerdict {
    /// Every recorded index satisfies the bound; `r` is the per-step ratio
    /// (absent for the weak theorem, which checks its lagged sequence).
    Ok { r: Option<f64> },
    Violated { index: usize, observed: f64, bound: f64 },
}

impl RateVerdict {
    pub fn ok(&self) -> bool {
        matches!(self, RateVerdict::Ok { .. })
    }

    pub fn token(&self) -> &'static str {
        if self.ok() {
            "ok"
        } else {
            "violated"
        }
    }
}

impl fmt::Display for RateVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateVerdict::Ok { r: Some(r) } => write!(f, "ok r={r}"),
            RateVerdict::Ok { r: None } => write!(f, "ok monotone"),
            RateVerdict::Violated { index, observed, bound } => {
                write!(f, "violated index={index} observed={observed} bound={bound}")
            }
        }
    }
}

/// `σ_n ≤ rⁿ σ_0` at every index for the ratio theorems; for the weak
/// theorem `α_{n+1} ≤ α_n − ψ(α_n) ≤ α_n` on the lagged sequence (the step
/// sequence when no lag was recorded).
pub fn rate_certificate(trace: &IterationTrace, profile: &ContractionProfile) -> RateVerdict {
    if let Some(psi) = profile.psi() {
        let seq = trace.alpha.as_ref().map_or(&trace.sigma, |s| &s.values);
        for n in 0..seq.len().saturating_sub(1) {
            let bound = (seq[n] - psi.eval(seq[n])).min(seq[n]);
            if !within(seq[n + 1], bound) {
                return RateVerdict::Violated { index: n + 1, observed: seq[n + 1], bound };
            }
        }
        return RateVerdict::Ok { r: None };
    }
    let r = profile.rate().expect("ratio theorem");
    let Some(&s0) = trace.sigma.first() else {
        return RateVerdict::Ok { r: Some(r) };
    };
    let mut scale = 1.0f64;
    for (n, &s) in trace.sigma.iter().enumerate() {
        let bound = scale * s0;
        if !within(s, bound) {
            return RateVerdict::Violated { index: n, observed: s, bound };
        }
        scale *= r;
    }
    RateVerdict::Ok { r: Some(r) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticMode {
    /// Distances approach the limit self-distance.
    Partial,
    /// Distances approach zero.
    Theta,
}

/// Finite-window evidence about Cauchy behaviour; not a proof.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyDiagnostic {
    pub mode: DiagnosticMode,
    pub window_start: usize,
    /// `ρ(u_N, u_N)` for the last orbit point (partial mode).
    pub limit_estimate: Option<f64>,
    /// For each window index `n`: `max_{m ≥ n} |ρ(u_n,u_m) − L|` (partial) or
    /// `max_{m > n} ρ(u_n,u_m)` (theta).
    pub tail_sup: Vec<f64>,
    pub consistent: bool,
}

impl fmt::Display for CauchyDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            DiagnosticMode::Partial => "partial",
            DiagnosticMode::Theta => "theta",
        };
        write!(f, "cauchy-diagnostic (finite window) mode={mode} window_start={}", self.window_start)?;
        if let Some(l) = self.limit_estimate {
            write!(f, " limit={l}")?;
        }
        write!(
            f,
            " head_sup={} consistent={}",
            self.tail_sup.first().copied().unwrap_or(0.0),
            self.consistent
        )
    }
}

/// Window start for diagnostics: the later of `len − 256` and `len / 2`.
pub fn window_start(len: usize) -> usize {
    len.saturating_sub(256).max(len / 2)
}

/// Consistent when the tail suprema are nonincreasing (within `tol`) and the
/// last one before the end is below `tol`.
pub fn cauchy_diagnostic(problem: &Problem, trace: &IterationTrace, mode: DiagnosticMode, tol: f64) -> CauchyDiagnostic {
    let orbit = &trace.orbit;
    let len = orbit.len();
    let start = window_start(len);
    let limit = match mode {
        DiagnosticMode::Partial => Some(problem.dist(trace.last(), trace.last())),
        DiagnosticMode::Theta => None,
    };
    let target = limit.unwrap_or(0.0);
    let tail_sup: Vec<f64> = (start..len)
        .map(|n| {
            let from = if mode == DiagnosticMode::Partial { n } else { n + 1 };
            (from..len).map(|m| (problem.dist(orbit[n], orbit[m]) - target).abs()).fold(0.0, f64::max)
        })
        .collect();
    let monotone = tail_sup.windows(2).all(|w| w[1] <= w[0] + tol);
    let last = if tail_sup.len() >= 2 { tail_sup[tail_sup.len() - 2] } else { tail_sup.first().copied().unwrap_or(0.0) };
    CauchyDiagnostic { mode, window_start: start, limit_estimate: limit, tail_sup, consistent: len >= 2 && monotone && last <= tol }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitSet {
    pub settled: bool,
    pub points: Vec<usize>,
}

/// Points `u` with `ρ(c,u) = ρ(u,u)` (within `tol`) for every point `c` of
/// the orbit's terminal fixed point or cycle. Finite spaces only.
pub fn limit_set(problem: &Problem, trace: &IterationTrace, tol: f64) -> Result<LimitSet, SolverError> {
    let Some(space) = problem.space() else {
        return Err(SolverError::NeedsFiniteSpace("limit_set"));
    };
    if trace.stop == StopReason::MaxIter {
        return Ok(LimitSet { settled: false, points: Vec::new() });
    }
    let idx = |p: Point| match p {
        Point::Index(i) => i,
        Point::Real(_) => unreachable!("finite space"),
    };
    let last = idx(trace.last());
    let first = trace.orbit.iter().position(|&p| idx(p) == last).expect("last point is on the orbit");
    let mut tail: Vec<usize> = trace.orbit[first..].iter().map(|&p| idx(p)).collect();
    tail.sort_unstable();
    tail.dedup();
    let points = (0..space.n())
        .filter(|&u| tail.iter().all(|&c| (space.get(c, u) - space.get(u, u)).abs() <= tol))
        .collect();
    Ok(LimitSet { settled: true, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitDistinctness {
    /// `σ_{n+1} ≤ c σ_n` fails at this index.
    PremiseNotMet { index: usize },
    /// Points before the settling index are pairwise distinct.
    Ok { settled: Option<usize> },
    Coincidence { n: usize, m: usize },
}

impl fmt::Display for OrbitDistinctness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitDistinctness::PremiseNotMet { index } => write!(f, "premise-not-met index={index}"),
            OrbitDistinctness::Ok { settled: Some(s) } => write!(f, "ok settled={s}"),
            OrbitDistinctness::Ok { settled: None } => write!(f, "ok"),
            OrbitDistinctness::Coincidence { n, m } => write!(f, "coincidence u_{n}=u_{m}"),
        }
    }
}

/// Under `σ_{n+1} ≤ c σ_n`, orbit points are pairwise distinct until the
/// orbit settles (first `n` with `σ_n ≤ tol`).
pub fn distinct_orbit_check(trace: &IterationTrace, c: f64, tol: f64) -> OrbitDistinctness {
    for n in 1..trace.sigma.len() {
        if !within(trace.sigma[n], c * trace.sigma[n - 1]) {
            return OrbitDistinctness::PremiseNotMet { index: n };
        }
    }
    let settled = trace.sigma.iter().position(|&s| s <= tol);
    let end = settled.unwrap_or(trace.orbit.len() - 1);
    for m in 0..=end {
        for n in 0..m {
            if trace.orbit[n] == trace.orbit[m] {
                return OrbitDistinctness::Coincidence { n, m };
            }
        }
    }
    OrbitDistinctness::Ok { settled }
}

/// Which exponent multiplies `k_2`: `c^m` as printed, or `c^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    Printed,
    Corrected,
}

impl std::str::FromStr for BoundMode {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(BoundMode::Printed),
            "corrected" => Ok(BoundMode::Corrected),
            _ => Err(SolverError::BadMode(s.to_string())),
        }
    }
}

/// Constants of the pairwise recurrence
/// `ρ(u_m,u_n) ≤ c ρ(u_{m−1},u_{n−1}) + k_1 c^m + k_2 c^{m or n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyBoundParams {
    pub c: f64,
    pub k1: f64,
    pub k2: f64,
    /// Smallest `n0` with `c^{n0} · max θ < 1`.
    pub n0: usize,
}

impl CauchyBoundParams {
    pub fn new(c: f64, k1: f64, k2: f64, theta_max: f64) -> Result<Self, SolverError> {
        if !(0.0..1.0).contains(&c) || !(k1 >= 0.0 && k2 >= 0.0) || !theta_max.is_finite() {
            return Err(SolverError::BadBoundParams { c, k1, k2 });
        }
        let mut n0 = 1;
        while c.powi(n0 as i32) * theta_max >= 1.0 {
            n0 += 1;
        }
        Ok(Self { c, k1, k2, n0 })
    }

    /// The constants of the Reich orbit estimate: `c = max(α, r)` with
    /// `r = (α+γ)/(1−β)`, `k_1 = β σ_0 / c`, `k_2 = γ σ_0 / c`. Pairs with
    /// [`BoundMode::Corrected`].
    pub fn for_reich(alpha: f64, beta: f64, gamma: f64, sigma0: f64, theta_max: f64) -> Result<Self, SolverError> {
        let r = (alpha + gamma) / (1.0 - beta);
        let c = alpha.max(r);
        if c == 0.0 {
            return Self::new(0.0, 0.0, 0.0, theta_max);
        }
        Self::new(c, beta * sigma0 / c, gamma * sigma0 / c, theta_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundViolation {
    pub m: usize,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// `ρ(u_i, u_j)` for the first `limit` orbit points.
pub fn pair_distances(problem: &Problem, trace: &IterationTrace, limit: usize) -> Vec<Vec<f64>> {
    let pts = &trace.orbit[..trace.orbit.len().min(limit)];
    pts.iter().map(|&p| pts.iter().map(|&q| problem.dist(p, q)).collect()).collect()
}

/// Checks the recurrence at every recorded `m, n ≥ 1`; returns the first
/// violation in `(m, n)` order.
pub fn cauchy_bound_check(pairs: &[Vec<f64>], params: &CauchyBoundParams, mode: BoundMode) -> Result<(), BoundViolation> {
    let c = params.c;
    for m in 1..pairs.len() {
        for n in 1..pairs.len() {
            let e2 = match mode {
                BoundMode::Printed => m,
                BoundMode::Corrected => n,
            };
            let rhs = c * pairs[m - 1][n - 1] + params.k1 * c.powi(m as i32) + params.k2 * c.powi(e2 as i32);
            let lhs = pairs[m][n];
            if !within(lhs, rhs) {
                return Err(BoundViolation { m, n, lhs, rhs });
            }
        }
    }
    Ok(())
}
