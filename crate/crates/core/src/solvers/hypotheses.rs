use std::fmt;

use rayon::prelude::*;

use crate::space::{approx_le, verify_axioms, AxiomProfile, Kind, ThetaTable, VerificationReport, DEFAULT_REL_TOL};

use super::{validate_psi, Constants, ContractionProfile, Point, Problem, PsiFunction, Scale, Theorem};

/// The four distances entering every contraction condition at an ordered
/// pair `(u, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms {
    pub u: Point,
    pub w: Point,
    /// `ρ(Su, Sw)`
    pub image: f64,
    /// `ρ(u, w)`
    pub base: f64,
    /// `ρ(u, Su)`
    pub left: f64,
    /// `ρ(w, Sw)`
    pub right: f64,
}

/// All ordered pairs, `u = w` included, in lexicographic order.
pub fn pair_terms(problem: &Problem) -> Vec<PairTerms> {
    let points = problem.points();
    let images: Vec<Point> = points.iter().map(|&p| problem.apply(p)).collect();
    let moves: Vec<f64> = points.iter().zip(&images).map(|(&p, &q)| problem.dist(p, q)).collect();
    (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (points, images, moves) = (&points, &images, &moves);
            (0..points.len()).map(move |j| PairTerms {
                u: points[i],
                w: points[j],
                image: problem.dist(images[i], images[j]),
                base: problem.dist(points[i], points[j]),
                left: moves[i],
                right: moves[j],
            })
        })
        .collect()
}

/// Right-hand side of the theorem's contraction condition at one pair.
pub fn contraction_bound(profile: &ContractionProfile, t: &PairTerms) -> f64 {
    match (profile.theorem(), profile.constants()) {
        (Theorem::KannanPartial, Constants::Lambda(l)) => l * (t.left + t.right),
        (Theorem::QuasiPartial, Constants::Lambda(l)) => l * t.base.max(t.left).max(t.right),
        (_, Constants::Lambda(l)) => l * t.base,
        (_, Constants::Reich { alpha, beta, gamma }) => alpha * t.base + beta * t.left + gamma * t.right,
        (_, Constants::Psi(psi)) => t.base - psi.eval(t.base),
    }
}

/// `Γ2 = max over points u of max{θ(u,Su), θ(Su,u)}`, with the per-point
/// values (empty on the line, where the coefficient is constant).
pub fn gamma2(problem: &Problem) -> (f64, Vec<f64>) {
    match (problem.scale(), problem.images()) {
        (Scale::Theta(t), Some(m)) => {
            let per: Vec<f64> = m.iter().enumerate().map(|(u, &su)| t.get(u, su).max(t.get(su, u))).collect();
            (per.iter().cloned().fold(1.0, f64::max), per)
        }
        (Scale::Constant(s), Some(m)) => (*s, vec![*s; m.len()]),
        (scale, None) => (
            match scale {
                Scale::Constant(s) => *s,
                Scale::Theta(t) => t.max_entry(),
            },
            Vec::new(),
        ),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionViolation {
    pub condition: String,
    pub detail: String,
    pub witness: Option<(Point, Point)>,
}

impl ConditionViolation {
    fn new(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { condition: condition.into(), detail: detail.into(), witness: None }
    }
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "violated {}: {}", self.condition, self.detail)?;
        if let Some((u, w)) = self.witness {
            write!(f, " at ({u},{w})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub profile: ContractionProfile,
    pub violations: Vec<ConditionViolation>,
    pub warnings: Vec<String>,
    pub gamma2: f64,
    pub gamma2_per_point: Vec<f64>,
    pub space: Option<VerificationReport>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "ok" } else { "rejected" };
        write!(f, "hypotheses {} verdict={verdict}", self.profile)?;
        if self.profile.theorem().uses_reich() {
            write!(f, " gamma2={}", self.gamma2)?;
        }
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        for w in &self.warnings {
            write!(f, "\n  warning {w}")?;
        }
        Ok(())
    }
}

fn space_profile(problem: &Problem, theorem: Theorem) -> Result<AxiomProfile, String> {
    let n = problem.space().map_or(0, |d| d.n());
    let v = problem.v();
    let built = match (theorem.is_partial(), problem.scale()) {
        (true, Scale::Constant(s)) => AxiomProfile::new(Kind::PartialBvs, v, *s),
        (true, Scale::Theta(_)) => return Err("partial theorems need a constant coefficient s".into()),
        (false, Scale::Theta(t)) => AxiomProfile::with_theta(Kind::BvTheta, v, t.clone()),
        (false, Scale::Constant(s)) => {
            ThetaTable::constant(n, *s).and_then(|t| AxiomProfile::with_theta(Kind::BvTheta, v, t))
        }
    };
    built.map_err(|e| e.to_string())
}

/// Relative margin by which strict upper bounds on constants must hold.
pub const STRICT_MARGIN: f64 = 1e-9;

/// `x < bound` with [`STRICT_MARGIN`] to spare.
fn below(x: f64, bound: f64) -> bool {
    x < bound - STRICT_MARGIN * bound.abs().max(1.0)
}

fn in_half_open(x: f64, hi: f64) -> bool {
    x >= 0.0 && below(x, hi)
}

/// Side conditions on the constants alone (plus `s` and `Γ2`).
pub fn scalar_violations(problem: &Problem, profile: &ContractionProfile) -> (Vec<ConditionViolation>, Vec<String>) {
    let mut bad = Vec::new();
    let mut warnings = Vec::new();
    let theorem = profile.theorem();
    let s = problem.constant_scale().unwrap_or(1.0);
    match (theorem, profile.constants()) {
        (Theorem::BanachPartial, Constants::Lambda(l)) => {
            if !in_half_open(*l, 1.0) {
                bad.push(ConditionViolation::new("λ ∈ [0,1)", format!("λ={l}")));
            }
        }
        (Theorem::BanachTheta, Constants::Lambda(l)) => {
            if !in_half_open(*l, 1.0) {
                bad.push(ConditionViolation::new("c ∈ [0,1)", format!("c={l}")));
            }
        }
        (Theorem::KannanPartial, Constants::Lambda(l)) => {
            if !in_half_open(*l, 0.5) {
                bad.push(ConditionViolation::new("λ ∈ [0,1/2)", format!("λ={l}")));
            }
            if (l - 1.0 / s).abs() <= STRICT_MARGIN {
                bad.push(ConditionViolation::new("λ ≠ 1/s", format!("λ={l} s={s}")));
            }
            if s * l >= 1.0 {
                warnings.push(format!("s·λ={} ≥ 1: the factor s/(1−sλ) is not positive", s * l));
            }
        }
        (Theorem::QuasiPartial, Constants::Lambda(l)) => {
            if !in_half_open(*l, 1.0 / s) {
                bad.push(ConditionViolation::new("λ ∈ [0,1/s)", format!("λ={l} 1/s={}", 1.0 / s)));
            }
        }
        (Theorem::WeakTheta, Constants::Psi(psi)) => {
            if let Err(names) = validate_psi(psi) {
                for name in names {
                    bad.push(ConditionViolation::new(name, format!("ψ={psi}")));
                }
            }
        }
        (Theorem::ReichTheta | Theorem::KannanTheta, Constants::Reich { alpha, beta, gamma }) => {
            let kannan = theorem == Theorem::KannanTheta;
            if kannan && *alpha != 0.0 {
                bad.push(ConditionViolation::new("α = 0", format!("α={alpha}")));
            }
            if !(*alpha >= 0.0 && *beta >= 0.0 && *gamma >= 0.0) {
                let name = if kannan { "β,γ ≥ 0" } else { "α,β,γ ≥ 0" };
                bad.push(ConditionViolation::new(name, format!("α={alpha} β={beta} γ={gamma}")));
            }
            let sum = alpha + beta + gamma;
            if !below(sum, 1.0) {
                let name = if kannan { "β+γ < 1" } else { "α+β+γ < 1" };
                bad.push(ConditionViolation::new(name, format!("sum={sum}")));
            }
            let g1 = beta.min(*gamma);
            let (g2, _) = gamma2(problem);
            if !below(g1, 1.0 / g2) {
                bad.push(ConditionViolation::new("Γ1 < 1/Γ2", format!("Γ1={g1} Γ2={g2}")));
            }
        }
        _ => bad.push(ConditionViolation::new("constants match theorem", format!("{profile}"))),
    }
    (bad, warnings)
}

/// Verifies the ambient space, the scalar side conditions and the
/// contraction inequality over every ordered pair (grid pairs on the line).
pub fn check_hypotheses(problem: &Problem, profile: &ContractionProfile) -> HypothesisReport {
    let (g2, per) = gamma2(problem);
    let (mut violations, warnings) = scalar_violations(problem, profile);
    let mut space = None;
    if let Some(d) = problem.space() {
        match space_profile(problem, profile.theorem()) {
            Ok(ap) => match verify_axioms(d, &ap) {
                Ok(report) => {
                    if !report.passed() {
                        let detail = report.violations.first().map_or("fails".to_string(), |w| w.to_string());
                        violations.insert(0, ConditionViolation::new(format!("space is {ap}"), detail));
                    }
                    space = Some(report);
                }
                Err(e) => violations.insert(0, ConditionViolation::new(format!("space is {ap}"), e.to_string())),
            },
            Err(e) => violations.insert(0, ConditionViolation::new("space profile", e)),
        }
    }
    let terms = pair_terms(problem);
    if let Some(t) = terms.iter().find(|t| !approx_le(t.image, contraction_bound(profile, t), DEFAULT_REL_TOL)) {
        violations.push(ConditionViolation {
            condition: "contraction inequality".into(),
            detail: format!("ρ(Su,Sw)={} > {}", t.image, contraction_bound(profile, t)),
            witness: Some((t.u, t.w)),
        });
    }
    HypothesisReport { profile: profile.clone(), violations, warnings, gamma2: g2, gamma2_per_point: per, space }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Admissible(ContractionProfile),
    NoAdmissible { reason: String, witness: Option<(Point, Point)>, fitted: Option<ContractionProfile> },
}

impl Estimate {
    pub fn admissible(&self) -> Option<&ContractionProfile> {
        match self {
            Estimate::Admissible(p) => Some(p),
            Estimate::NoAdmissible { .. } => None,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Admissible(p) => write!(f, "estimate {p} admissible=true"),
            Estimate::NoAdmissible { reason, witness, fitted } => {
                write!(f, "estimate admissible=false reason={reason}")?;
                if let Some(p) = fitted {
                    write!(f, " fitted=({p})")?;
                }
                if let Some((u, w)) = witness {
                    write!(f, " witness=({u},{w})")?;
                }
                Ok(())
            }
        }
    }
}

/// Supremum of `image / denom` over pairs with positive denominator; a pair
/// with zero denominator and positive image is returned as a witness.
fn sup_ratio(terms: &[PairTerms], denom: impl Fn(&PairTerms) -> f64) -> Result<f64, (Point, Point)> {
    let mut sup = 0.0f64;
    for t in terms {
        let d = denom(t);
        if d > 0.0 {
            sup = sup.max(t.image / d);
        } else if t.image > 0.0 {
            return Err((t.u, t.w));
        }
    }
    Ok(sup)
}

pub const REICH_GRID_STEP: f64 = 0.01;

/// Smallest `α ≥ 0` making the Reich inequality hold at `(β, γ)`, or `None`
/// when a pair cannot be fixed by `α` (zero base distance, or `α` pinned at
/// zero).
pub fn reich_alpha(terms: &[PairTerms], beta: f64, gamma: f64, alpha_zero: bool) -> Option<f64> {
    let mut alpha = 0.0f64;
    for t in terms {
        let covered = beta * t.left + gamma * t.right;
        if alpha_zero || t.base == 0.0 {
            if !approx_le(t.image, covered, DEFAULT_REL_TOL) {
                return None;
            }
        } else {
            alpha = alpha.max((t.image - covered) / t.base);
        }
    }
    Some(alpha)
}

/// Minimizes `α+β+γ` over a `(β, γ)` grid of step 0.01 with exact `α`, then
/// once more on a ten times finer grid around the best cell.
pub fn fit_reich(terms: &[PairTerms], alpha_zero: bool) -> Option<(f64, f64, f64)> {
    type Best = Option<(f64, (f64, f64, f64))>;
    let consider = |best: &mut Best, beta: f64, gamma: f64| {
        if beta < 0.0 || gamma < 0.0 {
            return;
        }
        if let Some(alpha) = reich_alpha(terms, beta, gamma, alpha_zero) {
            let sum = alpha + beta + gamma;
            if best.is_none_or(|(b, _)| sum < b) {
                *best = Some((sum, (alpha, beta, gamma)));
            }
        }
    };
    let steps = (1.0 / REICH_GRID_STEP).round() as i64;
    let mut best: Best = None;
    for i in 0..=steps {
        for j in 0..=steps - i {
            consider(&mut best, i as f64 / steps as f64, j as f64 / steps as f64);
        }
    }
    let (_, (_, b0, g0)) = best?;
    let fine = 10 * steps;
    let (bi, gi) = ((b0 * fine as f64).round() as i64, (g0 * fine as f64).round() as i64);
    for i in -10..=10 {
        for j in -10..=10 {
            consider(&mut best, (bi + i) as f64 / fine as f64, (gi + j) as f64 / fine as f64);
        }
    }
    best.map(|(_, c)| c)
}

/// Tightest constants for which the theorem's inequality holds over all
/// pairs, with a verdict on their admissibility.
pub fn estimate_constants(problem: &Problem, theorem: Theorem) -> Estimate {
    let terms = pair_terms(problem);
    let witness_fail = |w| Estimate::NoAdmissible {
        reason: "zero denominator with positive ρ(Su,Sw)".into(),
        witness: Some(w),
        fitted: None,
    };
    let fitted = match theorem {
        Theorem::BanachPartial | Theorem::BanachTheta | Theorem::KannanPartial | Theorem::QuasiPartial => {
            let lambda = match theorem {
                Theorem::KannanPartial => sup_ratio(&terms, |t| t.left + t.right),
                Theorem::QuasiPartial => sup_ratio(&terms, |t| t.base.max(t.left).max(t.right)),
                _ => sup_ratio(&terms, |t| t.base),
            };
            match lambda {
                Ok(l) => ContractionProfile::lambda(theorem, l).expect("lambda theorem"),
                Err(w) => return witness_fail(w),
            }
        }
        Theorem::WeakTheta => match sup_ratio(&terms, |t| t.base) {
            Ok(l) => ContractionProfile::weak(PsiFunction::linear(1.0 - l)),
            Err(w) => return witness_fail(w),
        },
        Theorem::ReichTheta | Theorem::KannanTheta => {
            let alpha_zero = theorem == Theorem::KannanTheta;
            match fit_reich(&terms, alpha_zero) {
                Some((_, b, g)) if alpha_zero => ContractionProfile::kannan_theta(b, g),
                Some((a, b, g)) => ContractionProfile::reich(a, b, g),
                None => {
                    return Estimate::NoAdmissible {
                        reason: "no feasible constants on the grid".into(),
                        witness: None,
                        fitted: None,
                    }
                }
            }
        }
    };
    let (bad, _) = scalar_violations(problem, &fitted);
    if bad.is_empty() {
        Estimate::Admissible(fitted)
    } else {
        let reason = bad.iter().map(|v| format!("{} ({})", v.condition, v.detail)).collect::<Vec<_>>().join("; ");
        Estimate::NoAdmissible { reason, witness: None, fitted: Some(fitted) }
    }
}
