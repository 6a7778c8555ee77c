use std::fmt;
use std::str::FromStr;

use super::SolverError;

/// The fixed-point theorems: three in partial `b_v(s)` spaces, four in
/// `b_v(θ)` spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    BanachPartial,
    KannanPartial,
    QuasiPartial,
    BanachTheta,
    WeakTheta,
    ReichTheta,
    KannanTheta,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::BanachPartial,
        Theorem::KannanPartial,
        Theorem::QuasiPartial,
        Theorem::BanachTheta,
        Theorem::WeakTheta,
        Theorem::ReichTheta,
        Theorem::KannanTheta,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Theorem::BanachPartial => "banach",
            Theorem::KannanPartial => "kannan",
            Theorem::QuasiPartial => "quasi",
            Theorem::BanachTheta => "banach-theta",
            Theorem::WeakTheta => "weak",
            Theorem::ReichTheta => "reich",
            Theorem::KannanTheta => "kannan-theta",
        }
    }

    /// Set in a partial `b_v(s)` space (as opposed to a `b_v(θ)` space).
    pub fn is_partial(self) -> bool {
        matches!(self, Theorem::BanachPartial | Theorem::KannanPartial | Theorem::QuasiPartial)
    }

    pub fn uses_lambda(self) -> bool {
        matches!(self, Theorem::BanachPartial | Theorem::KannanPartial | Theorem::QuasiPartial | Theorem::BanachTheta)
    }

    pub fn uses_reich(self) -> bool {
        matches!(self, Theorem::ReichTheta | Theorem::KannanTheta)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Theorem {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.token() == s)
            .ok_or_else(|| SolverError::UnknownTheorem(s.to_string()))
    }
}

/// Piecewise-linear `ψ` through `breakpoints`, continued past the last one
/// with `final_slope`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFunction {
    breakpoints: Vec<(f64, f64)>,
    final_slope: f64,
}

impl PsiFunction {
    pub fn new(breakpoints: Vec<(f64, f64)>, final_slope: f64) -> Self {
        Self { breakpoints, final_slope }
    }

    /// `ψ(t) = c·t`.
    pub fn linear(c: f64) -> Self {
        Self::new(vec![(0.0, 0.0)], c)
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn final_slope(&self) -> f64 {
        self.final_slope
    }

    pub fn eval(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        let Some(&(t_last, y_last)) = bp.last() else {
            return self.final_slope * t;
        };
        if t >= t_last {
            return y_last + self.final_slope * (t - t_last);
        }
        if t <= bp[0].0 {
            return bp[0].1;
        }
        let k = bp.partition_point(|&(x, _)| x <= t);
        let (t0, y0) = bp[k - 1];
        let (t1, y1) = bp[k];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, y) in &self.breakpoints {
            write!(f, "{t}:{y},")?;
        }
        write!(f, "slope:{}", self.final_slope)
    }
}

impl FromStr for PsiFunction {
    type Err = SolverError;

    /// `t0:v0,t1:v1,…,slope:r`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SolverError::BadPsi(s.to_string());
        let mut breakpoints = Vec::new();
        let mut slope = None;
        for part in s.split(',') {
            let (a, b) = part.split_once(':').ok_or_else(bad)?;
            let y: f64 = b.trim().parse().map_err(|_| bad())?;
            if a.trim() == "slope" {
                if slope.replace(y).is_some() {
                    return Err(bad());
                }
            } else {
                if slope.is_some() {
                    return Err(bad());
                }
                breakpoints.push((a.trim().parse().map_err(|_| bad())?, y));
            }
        }
        let slope = slope.ok_or_else(bad)?;
        if breakpoints.is_empty() {
            breakpoints.push((0.0, 0.0));
        }
        Ok(Self::new(breakpoints, slope))
    }
}

/// Checks `ψ(0)=0`, monotonicity and unbounded growth. Each failed property
/// is named.
pub fn validate_psi(psi: &PsiFunction) -> Result<(), Vec<&'static str>> {
    let mut bad = Vec::new();
    let bp = psi.breakpoints();
    if bp.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) || !psi.final_slope().is_finite() {
        bad.push("finite");
    }
    if bp.first() != Some(&(0.0, 0.0)) {
        bad.push("ψ(0)=0");
    }
    if bp.windows(2).any(|w| w[1].0 <= w[0].0) {
        bad.push("increasing breakpoints");
    }
    if bp.windows(2).any(|w| w[1].1 < w[0].1) || psi.final_slope() < 0.0 {
        bad.push("nondecreasing");
    }
    if psi.final_slope() <= 0.0 {
        bad.push("ψ(t)→∞");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constants {
    Lambda(f64),
    Reich { alpha: f64, beta: f64, gamma: f64 },
    Psi(PsiFunction),
}

/// A theorem together with the constants of its contraction condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionProfile {
    theorem: Theorem,
    constants: Constants,
}

impl ContractionProfile {
    pub fn lambda(theorem: Theorem, lambda: f64) -> Result<Self, SolverError> {
        if !theorem.uses_lambda() {
            return Err(SolverError::ConstantsMismatch(theorem));
        }
        Ok(Self { theorem, constants: Constants::Lambda(lambda) })
    }

    pub fn reich(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { theorem: Theorem::ReichTheta, constants: Constants::Reich { alpha, beta, gamma } }
    }

    pub fn kannan_theta(beta: f64, gamma: f64) -> Self {
        Self { theorem: Theorem::KannanTheta, constants: Constants::Reich { alpha: 0.0, beta, gamma } }
    }

    pub fn weak(psi: PsiFunction) -> Self {
        Self { theorem: Theorem::WeakTheta, constants: Constants::Psi(psi) }
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn lambda_value(&self) -> Option<f64> {
        match self.constants {
            Constants::Lambda(l) => Some(l),
            _ => None,
        }
    }

    pub fn psi(&self) -> Option<&PsiFunction> {
        match &self.constants {
            Constants::Psi(p) => Some(p),
            _ => None,
        }
    }

    /// Per-step ratio `r` with `σ_n ≤ rⁿ σ_0`; `None` for the weak theorem.
    pub fn rate(&self) -> Option<f64> {
        match (self.theorem, &self.constants) {
            (Theorem::KannanPartial, Constants::Lambda(l)) => Some(l / (1.0 - l)),
            (_, Constants::Lambda(l)) => Some(*l),
            (_, Constants::Reich { alpha, beta, gamma }) => Some((alpha + gamma) / (1.0 - beta)),
            (_, Constants::Psi(_)) => None,
        }
    }
}

impl fmt::Display for ContractionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "theorem={}", self.theorem)?;
        match &self.constants {
            Constants::Lambda(l) => write!(f, " lambda={l}"),
            Constants::Reich { alpha, beta, gamma } => write!(f, " alpha={alpha} beta={beta} gamma={gamma}"),
            Constants::Psi(p) => write!(f, " psi={p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_tokens() {
        for t in Theorem::ALL {
            assert_eq!(t.token().parse::<Theorem>().unwrap(), t);
        }
        assert!("nope".parse::<Theorem>().is_err());
    }

    #[test]
    fn psi_evaluation() {
        let psi: PsiFunction = "0:0,1:0.5,3:0.5,slope:2".parse().unwrap();
        assert_eq!(psi.eval(0.5), 0.25);
        assert_eq!(psi.eval(2.0), 0.5);
        assert_eq!(psi.eval(4.0), 2.5);
        assert_eq!(psi.to_string(), "0:0,1:0.5,3:0.5,slope:2");
        assert_eq!("slope:0.5".parse::<PsiFunction>().unwrap(), PsiFunction::linear(0.5));
    }

    #[test]
    fn psi_validation() {
        assert!(validate_psi(&PsiFunction::linear(0.5)).is_ok());
        assert_eq!(validate_psi(&PsiFunction::linear(0.0)), Err(vec!["ψ(t)→∞"]));
        let shifted = PsiFunction::new(vec![(0.0, 0.1)], 1.0);
        assert_eq!(validate_psi(&shifted), Err(vec!["ψ(0)=0"]));
        let dip = PsiFunction::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)], 1.0);
        assert_eq!(validate_psi(&dip), Err(vec!["nondecreasing"]));
    }

    #[test]
    fn rates() {
        let k = ContractionProfile::lambda(Theorem::KannanPartial, 0.25).unwrap();
        assert!((k.rate().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((ContractionProfile::reich(0.2, 0.5, 0.1).rate().unwrap() - 0.6).abs() < 1e-15);
        assert!(ContractionProfile::lambda(Theorem::ReichTheta, 0.1).is_err());
    }
}
