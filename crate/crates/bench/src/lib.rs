//! Fixtures shared by the benchmarks.

use gms_core::space::Kind;
use gms_core::{
    build_paper_example, random_contraction, random_space, AxiomProfile, Contraction, DistanceTable, Scale, Theorem,
};

/// The twelve-point θ example with its order-5 profile.
pub fn worked_example(n: usize, v: usize) -> (DistanceTable, AxiomProfile) {
    let (d, theta) = build_paper_example(n).expect("n ≥ 7");
    (d, AxiomProfile::with_theta(Kind::BvTheta, v, theta).expect("valid θ"))
}

pub fn partial_space(n: usize, v: usize, s: f64, seed: u64) -> (DistanceTable, AxiomProfile) {
    random_space(Kind::PartialBvs, n, v, s, seed).expect("generation succeeds")
}

pub fn contraction(theorem: Theorem, n: usize, seed: u64) -> Contraction {
    if theorem.is_partial() {
        let (d, _) = partial_space(n, 2, 2.0, seed);
        random_contraction(&d, 2, Scale::Constant(2.0), theorem, seed, 64).expect("instance")
    } else {
        let (d, p) = random_space(Kind::BvTheta, n, 2, 3.0, seed).expect("generation succeeds");
        random_contraction(&d, 2, Scale::Theta(p.theta().unwrap().clone()), theorem, seed, 64).expect("instance")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(worked_example(8, 2).0.n(), 8);
        assert_eq!(contraction(Theorem::ReichTheta, 5, 1).problem.images().unwrap().len(), 5);
    }
}
