use std::fmt;

use super::{
    check_hypotheses, distinct_orbit_check, rate_certificate, ContractionProfile, HypothesisReport, OrbitDistinctness,
    Point, Problem, RateVerdict, SelfMap, SolverError, Theorem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Residual,
    MaxIter,
    CycleDetected,
}

impl StopReason {
    pub fn token(self) -> &'static str {
        match self {
            StopReason::Residual => "residual",
            StopReason::MaxIter => "max_iter",
            StopReason::CycleDetected => "cycle_detected",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Record `α_n = ρ(u_n, u_{n+lag})`.
    pub lag: Option<usize>,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self { max_iter: 100_000, tol: 1e-12, lag: None }
    }
}

/// Lagged distances `α_n = ρ(u_n, u_{n+lag})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagSeries {
    pub lag: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// `u_0, u_1, …, u_N`
    pub orbit: Vec<Point>,
    /// `σ_n = ρ(u_n, u_{n+1})`, one shorter than the orbit.
    pub sigma: Vec<f64>,
    pub alpha: Option<LagSeries>,
    pub stop: StopReason,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.orbit.len() - 1
    }

    pub fn last(&self) -> Point {
        *self.orbit.last().expect("orbit is never empty")
    }
}

/// Iterates `u_{n+1} = S u_n` until `σ_n ≤ tol` (and the latest lagged
/// distance, if recorded, is also `≤ tol`), a finite orbit revisits a point
/// without having settled, or `max_iter` steps.
pub fn picard_orbit(problem: &Problem, u0: Point, opts: &IterOptions) -> Result<IterationTrace, SolverError> {
    if !problem.contains(u0) {
        return Err(SolverError::BadPoint(u0.to_string()));
    }
    if opts.lag == Some(0) {
        return Err(SolverError::BadLag);
    }
    let mut orbit = vec![u0];
    let mut sigma = Vec::new();
    let mut alpha = opts.lag.map(|lag| LagSeries { lag, values: Vec::new() });
    let mut visited = problem.space().map(|d| {
        let mut seen = vec![false; d.n()];
        if let Point::Index(i) = u0 {
            seen[i] = true;
        }
        seen
    });
    let mut stop = StopReason::MaxIter;
    for k in 0..opts.max_iter {
        let current = orbit[k];
        let next = problem.apply(current);
        let step = problem.dist(current, next);
        sigma.push(step);
        orbit.push(next);
        if let Some(series) = alpha.as_mut() {
            if orbit.len() > series.lag {
                let n = orbit.len() - 1 - series.lag;
                series.values.push(problem.dist(orbit[n], next));
            }
        }
        let lag_settled = alpha.as_ref().is_none_or(|s| s.values.last().is_some_and(|&a| a <= opts.tol));
        if step <= opts.tol && lag_settled {
            stop = StopReason::Residual;
            break;
        }
        if let (Some(seen), Point::Index(i)) = (visited.as_mut(), next) {
            if seen[i] && step > opts.tol {
                stop = StopReason::CycleDetected;
                break;
            }
            seen[i] = true;
        }
    }
    Ok(IterationTrace { orbit, sigma, alpha, stop })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Uniqueness {
    /// Every point scanned: points with `ρ(x,Sx) ≤ tol` and points with
    /// `Sx = x`.
    Exhaustive { near_fixed: Vec<usize>, exact_fixed: Vec<usize> },
    /// Affine demo map: the unique root of `x = a·x + b`.
    ClosedForm { root: f64 },
    /// Affine map with `a = 1`: no isolated root.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointCertificate {
    pub profile: ContractionProfile,
    pub hypotheses: HypothesisReport,
    pub overridden: bool,
    pub fixed_point: Point,
    pub residual: f64,
    pub self_distance: f64,
    pub unique: bool,
    pub uniqueness: Uniqueness,
    pub rate: RateVerdict,
    pub orbit_distinctness: Option<OrbitDistinctness>,
    pub tol: f64,
    pub trace: IterationTrace,
    pub failures: Vec<String>,
}

impl FixedPointCertificate {
    pub fn certified(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.trace.iterations()
    }

    /// One `key=value` record.
    pub fn machine_line(&self) -> String {
        format!(
            "certificate theorem={} fixed_point={} residual={} self_distance={} unique={} rate={} iterations={} stop={} hypotheses={} verdict={}",
            self.profile.theorem(),
            self.fixed_point,
            self.residual,
            self.self_distance,
            self.unique,
            self.rate.token(),
            self.iterations(),
            self.trace.stop,
            if self.overridden { "overridden" } else { "verified" },
            if self.certified() { "certified" } else { "failed" },
        )
    }
}

impl fmt::Display for FixedPointCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate {}", self.profile)?;
        writeln!(f, "  hypotheses={}", if self.overridden { "overridden" } else { "verified" })?;
        for w in &self.hypotheses.warnings {
            writeln!(f, "  warning {w}")?;
        }
        writeln!(f, "  fixed_point={}", self.fixed_point)?;
        writeln!(f, "  iterations={} stop={}", self.iterations(), self.trace.stop)?;
        writeln!(f, "  residual={} tol={}", self.residual, self.tol)?;
        writeln!(f, "  self_distance={}", self.self_distance)?;
        match &self.uniqueness {
            Uniqueness::Exhaustive { near_fixed, exact_fixed } => writeln!(
                f,
                "  unique={} evidence=exhaustive near_fixed={near_fixed:?} exact_fixed={exact_fixed:?}",
                self.unique
            )?,
            Uniqueness::ClosedForm { root } => writeln!(f, "  unique={} evidence=closed-form root={root}", self.unique)?,
            Uniqueness::Degenerate => writeln!(f, "  unique={} evidence=degenerate", self.unique)?,
        }
        writeln!(f, "  rate={}", self.rate)?;
        if let Some(d) = &self.orbit_distinctness {
            writeln!(f, "  orbit_distinct={d}")?;
        }
        if self.certified() {
            write!(f, "  verdict=certified")
        } else {
            write!(f, "  verdict=FAILED")?;
            for reason in &self.failures {
                write!(f, "\n  failure {reason}")?;
            }
            Ok(())
        }
    }
}

/// Checks the hypotheses, runs the Picard orbit from `u0` and certifies the
/// theorem's conclusion. With `allow_override` a rejected hypothesis check
/// is recorded instead of returned as an error.
pub fn solve(
    problem: &Problem,
    profile: &ContractionProfile,
    u0: Point,
    opts: &IterOptions,
    allow_override: bool,
) -> Result<FixedPointCertificate, SolverError> {
    let hypotheses = check_hypotheses(problem, profile);
    let overridden = !hypotheses.ok();
    if overridden && !allow_override {
        return Err(SolverError::HypothesesRejected(Box::new(hypotheses)));
    }
    let theorem = profile.theorem();
    let mut opts = *opts;
    if theorem == Theorem::WeakTheta && opts.lag.is_none() {
        opts.lag = Some(1);
    }
    let trace = picard_orbit(problem, u0, &opts)?;
    let b = trace.last();
    let residual = problem.dist(b, problem.apply(b));
    let self_distance = problem.dist(b, b);

    let (unique, uniqueness) = match problem.map() {
        SelfMap::Table(m) => {
            let near_fixed: Vec<usize> =
                (0..m.len()).filter(|&x| problem.dist(Point::Index(x), Point::Index(m[x])) <= opts.tol).collect();
            let exact_fixed: Vec<usize> = (0..m.len()).filter(|&x| m[x] == x).collect();
            let unique = matches!(b, Point::Index(i) if near_fixed == [i] && exact_fixed == [i]);
            (unique, Uniqueness::Exhaustive { near_fixed, exact_fixed })
        }
        SelfMap::Affine(a) => match a.fixed_point() {
            Some(root) => (true, Uniqueness::ClosedForm { root }),
            None => (false, Uniqueness::Degenerate),
        },
    };

    let rate = rate_certificate(&trace, profile);
    let orbit_distinctness = match profile.rate() {
        Some(c) if !theorem.is_partial() && c < 1.0 => Some(distinct_orbit_check(&trace, c, opts.tol)),
        _ => None,
    };

    let mut failures = Vec::new();
    if trace.stop != StopReason::Residual {
        failures.push(format!("no convergence: stop={} after {} iterations", trace.stop, trace.iterations()));
    }
    if !(residual <= opts.tol) {
        failures.push(format!("residual {residual} > tol {}", opts.tol));
    }
    if theorem.is_partial() && !(self_distance <= opts.tol) {
        failures.push(format!("self_distance {self_distance} > tol {}", opts.tol));
    }
    if !unique {
        failures.push("fixed point not unique".to_string());
    }
    if let (SelfMap::Affine(map), Uniqueness::ClosedForm { root }, Point::Real(x)) = (problem.map(), &uniqueness, b) {
        // |x − root| ≤ ρ(x,Sx)/(1−|a|)
        let bound = residual / (1.0 - map.a().abs()).max(f64::EPSILON) + 1e-12 * (1.0 + root.abs());
        if (x - root).abs() > bound {
            failures.push(format!("limit {x} differs from root {root}"));
        }
    }
    if let RateVerdict::Violated { index, .. } = rate {
        failures.push(format!("rate bound violated at index {index}"));
    }
    if let Some(OrbitDistinctness::Coincidence { n, m }) = orbit_distinctness {
        failures.push(format!("orbit coincidence u_{n} = u_{m} before settling"));
    }
    Ok(FixedPointCertificate {
        profile: profile.clone(),
        hypotheses,
        overridden,
        fixed_point: b,
        residual,
        self_distance,
        unique,
        uniqueness,
        rate,
        orbit_distinctness,
        tol: opts.tol,
        trace,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{AffineMap, PsiFunction, Scale};
    use crate::space::DistanceTable;

    fn two_point(map: Vec<usize>) -> Problem {
        let d = DistanceTable::new(vec![vec![1.0, 2.0], vec![2.0, 0.0]]).unwrap();
        Problem::finite(d, map, 1, Scale::Constant(1.0)).unwrap()
    }

    fn halving() -> Problem {
        Problem::affine(AffineMap::new(0.5, 0.0, 0.0, 1.0).unwrap())
    }

    #[test]
    fn finite_orbit_stops_on_residual() {
        let t = picard_orbit(&two_point(vec![1, 1]), Point::Index(0), &IterOptions::default()).unwrap();
        assert_eq!(t.orbit, vec![Point::Index(0), Point::Index(1), Point::Index(1)]);
        assert_eq!(t.sigma, vec![2.0, 0.0]);
        assert_eq!(t.stop, StopReason::Residual);
    }

    #[test]
    fn constant_map_settles_after_one_step() {
        let t = picard_orbit(&two_point(vec![1, 1]), Point::Index(1), &IterOptions::default()).unwrap();
        assert_eq!((t.orbit.len(), t.sigma[0]), (2, 0.0));
    }

    #[test]
    fn halving_decays_geometrically() {
        let t = picard_orbit(&halving(), Point::Real(1.0), &IterOptions::default()).unwrap();
        assert_eq!(t.stop, StopReason::Residual);
        assert!((38..=42).contains(&t.iterations()));
        for (n, s) in t.sigma.iter().enumerate() {
            assert_eq!(*s, 0.5f64.powi(n as i32 + 1));
        }
    }

    #[test]
    fn self_loop_with_positive_self_distance_is_a_cycle() {
        // 0 ↦ 0 but ρ(0,0) = 1
        let t = picard_orbit(&two_point(vec![0, 1]), Point::Index(0), &IterOptions::default()).unwrap();
        assert_eq!(t.stop, StopReason::CycleDetected);
        assert_eq!(t.orbit.len(), 2);
    }

    #[test]
    fn solve_two_point_banach() {
        let p = two_point(vec![1, 1]);
        let prof = ContractionProfile::lambda(Theorem::BanachPartial, 0.0).unwrap();
        let c = solve(&p, &prof, Point::Index(0), &IterOptions::default(), false).unwrap();
        assert!(c.certified(), "{c}");
        assert_eq!((c.fixed_point, c.residual, c.self_distance, c.unique), (Point::Index(1), 0.0, 0.0, true));
    }

    #[test]
    fn solve_halving_banach_and_weak() {
        let p = halving();
        let prof = ContractionProfile::lambda(Theorem::BanachPartial, 0.5).unwrap();
        let c = solve(&p, &prof, Point::Real(1.0), &IterOptions::default(), false).unwrap();
        assert!(c.certified(), "{c}");
        assert!(matches!(c.fixed_point, Point::Real(x) if x.abs() <= 1e-12));
        let weak = ContractionProfile::weak(PsiFunction::linear(0.5));
        let c = solve(&p, &weak, Point::Real(1.0), &IterOptions::default(), false).unwrap();
        assert!(c.certified(), "{c}");
    }

    #[test]
    fn rejected_hypotheses_are_errors_unless_overridden() {
        let prof = ContractionProfile::lambda(Theorem::KannanPartial, 0.6).unwrap();
        assert!(matches!(
            solve(&halving(), &prof, Point::Real(1.0), &IterOptions::default(), false),
            Err(SolverError::HypothesesRejected(_))
        ));
        let c = solve(&halving(), &prof, Point::Real(1.0), &IterOptions::default(), true).unwrap();
        assert!(c.overridden);
    }

    #[test]
    fn nonconvergence_is_a_failed_certificate() {
        let d = DistanceTable::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = Problem::finite(d, vec![1, 0], 1, Scale::Constant(1.0)).unwrap();
        let prof = ContractionProfile::lambda(Theorem::BanachPartial, 0.5).unwrap();
        let c = solve(&p, &prof, Point::Index(0), &IterOptions::default(), true).unwrap();
        assert!(!c.certified());
        assert!(c.failures[0].starts_with("no convergence"));
    }
}
