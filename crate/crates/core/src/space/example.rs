use thiserror::Error;

use super::{verify_axioms, AxiomProfile, DistanceTable, Kind, SpaceError, ThetaTable, VerificationReport};

/// The worked example over the points `1..=n_max` (stored at indices
/// `0..n_max`): `ρ(u,w) = 6` for the pair `{1,2}`, `1` for every other
/// distinct pair, `0` on the diagonal, and `θ(u,w) = 3 + u + w`.
pub fn build_paper_example(n_max: usize) -> Result<(DistanceTable, ThetaTable), SpaceError> {
    if n_max < 7 {
        return Err(SpaceError::ExampleTooSmall(n_max));
    }
    let label = |i: usize| i + 1;
    let rho = DistanceTable::from_fn(n_max, |i, j| {
        let (u, w) = (label(i), label(j));
        if u == w {
            0.0
        } else if u <= 2 && w <= 2 {
            6.0
        } else {
            1.0
        }
    })?;
    let theta = ThetaTable::from_fn(n_max, |i, j| (3 + label(i) + label(j)) as f64)?;
    Ok((rho, theta))
}

#[derive(Debug, Error)]
pub enum CombineError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("first summand is not a partial metric:\n{0}")]
    NotPartialMetric(Box<VerificationReport>),
    #[error("second summand is not a b_v(s) metric:\n{0}")]
    NotBvs(Box<VerificationReport>),
    #[error("sum failed re-verification as a partial b_v(s) metric:\n{0}")]
    SumRejected(Box<VerificationReport>),
}

/// Entrywise sum of a partial metric `p` and a `b_v(s)` metric `b`, checked
/// to be a partial `b_v(s)` metric.
///
/// `b` is accepted and the sum re-verified under the distinct-chain regime
/// of `b_v(s)`. Use [`combine_spaces_in_regime`] to demand the all-tuples
/// regime of both.
pub fn combine_spaces(
    p: &DistanceTable,
    b: &DistanceTable,
    v: usize,
    s: f64,
) -> Result<DistanceTable, CombineError> {
    combine_spaces_in_regime(p, b, v, s, true)
}

pub fn combine_spaces_in_regime(
    p: &DistanceTable,
    b: &DistanceTable,
    v: usize,
    s: f64,
    distinct_chain: bool,
) -> Result<DistanceTable, CombineError> {
    let pm = verify_axioms(p, &AxiomProfile::new(Kind::PartialMetric, 1, 1.0)?)?;
    if !pm.passed() {
        return Err(CombineError::NotPartialMetric(Box::new(pm)));
    }
    let bvs = AxiomProfile::new(Kind::Bvs, v, s)?.with_distinct_chain(distinct_chain);
    let br = verify_axioms(b, &bvs)?;
    if !br.passed() {
        return Err(CombineError::NotBvs(Box::new(br)));
    }
    let sum = p.add(b)?;
    let target = AxiomProfile::new(Kind::PartialBvs, v, s)?.with_distinct_chain(distinct_chain);
    let sr = verify_axioms(&sum, &target)?;
    if !sr.passed() {
        return Err(CombineError::SumRejected(Box::new(sr)));
    }
    Ok(sum)
}
