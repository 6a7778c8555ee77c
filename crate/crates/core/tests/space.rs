mod common;

use common::{naive_polygon, table};
use gms_core::space::Kind;
use gms_core::{
    build_paper_example, combine_spaces, min_coefficient, min_order, min_theta, polygon_slack,
    verify_axioms, verify_axioms_with, zero_offdiag_check, AxiomId, AxiomProfile,
    Family, MinOrder, Outcome, ThetaTable, VerifyOptions,
};

#[test]
fn two_point_partial_metric() {
    let d = table(&[&[1.0, 2.0], &[2.0, 0.0]]);
    let r = verify_axioms(&d, &AxiomProfile::new(Kind::PartialMetric, 1, 1.0).unwrap()).unwrap();
    assert_eq!(r.outcome(), Outcome::Pass);
    assert_eq!(r.tuples_checked, 8);
    assert_eq!(naive_polygon(&d, 1, |_, _| 1.0, true, false), (0, 8));
    assert_eq!(polygon_slack(&d, &r.profile, &[0, 1, 0]).unwrap(), 0.0);
    assert!(zero_offdiag_check(&d).is_ok());
    let metric = verify_axioms(&d, &AxiomProfile::new(Kind::Metric, 1, 1.0).unwrap()).unwrap();
    assert_eq!(metric.outcome(), Outcome::Fail);
}

#[test]
fn asymmetry_witness() {
    let d = table(&[&[0.0, 1.0, 2.0], &[1.5, 0.0, 1.0], &[2.0, 1.0, 0.0]]);
    let r = verify_axioms(&d, &AxiomProfile::new(Kind::Metric, 1, 1.0).unwrap()).unwrap();
    assert_eq!(r.first_violation(AxiomId::T2Symmetry).unwrap().tuple, vec![0, 1]);
}

#[test]
fn single_point_is_vacuous() {
    let d = table(&[&[0.0]]);
    let r = verify_axioms(&d, &AxiomProfile::new(Kind::Metric, 1, 1.0).unwrap()).unwrap();
    assert_eq!(r.outcome(), Outcome::Vacuous);
    assert_eq!(r.tuples_checked, 0);
}

#[test]
fn zero_offdiag_witness() {
    let w = zero_offdiag_check(&table(&[&[0.0, 0.0], &[0.0, 0.0]])).unwrap_err();
    assert_eq!(w.tuple, vec![0, 1]);
}

#[test]
fn collapsed_tuple_slack() {
    let d = table(&[&[1.0, 2.0, 3.0], &[2.0, 0.5, 2.0], &[3.0, 2.0, 2.0]]);
    for (v, s) in [(1, 1.0), (2, 1.5), (3, 2.0)] {
        let p = AxiomProfile::new(Kind::PartialBvs, v, s).unwrap();
        for u in 0..3 {
            let slack = polygon_slack(&d, &p, &vec![u; v + 2]).unwrap();
            let r = d.get(u, u);
            let expected = (v + 1) as f64 * s * r - v as f64 * r - r;
            assert!((slack - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn combined_examples() {
    let m = table(&[&[0.0, 1.0], &[1.0, 0.0]]);
    assert_eq!(combine_spaces(&m, &m, 1, 1.0).unwrap(), table(&[&[0.0, 2.0], &[2.0, 0.0]]));
    let p = table(&[&[1.0, 2.0], &[2.0, 0.0]]);
    let b = table(&[&[0.0, 3.0], &[3.0, 0.0]]);
    let sum = combine_spaces(&p, &b, 1, 2.0).unwrap();
    assert_eq!(sum, table(&[&[1.0, 5.0], &[5.0, 0.0]]));
    assert_eq!(naive_polygon(&sum, 1, |_, _| 2.0, true, false).0, 0);
}

#[test]
fn worked_example_entries() {
    let (d, theta) = build_paper_example(12).unwrap();
    assert_eq!((d.get(0, 1), d.get(0, 2), d.get(6, 6), theta.get(0, 1)), (6.0, 1.0, 0.0, 6.0));
    assert!(build_paper_example(6).is_err());
}

#[test]
fn worked_example_verifies_exactly_at_order_five() {
    let (d, theta) = build_paper_example(12).unwrap();
    let p = AxiomProfile::with_theta(Kind::BvTheta, 5, theta).unwrap();
    let opts = VerifyOptions { rel_tol: 0.0, ..VerifyOptions::default() };
    let r = verify_axioms_with(&d, &p, &opts).unwrap();
    assert_eq!(r.outcome(), Outcome::Pass);
    // ordered endpoint pairs times ordered distinct 5-chains of the other ten points
    assert_eq!(r.tuples_checked, 12 * 11 * 10 * 9 * 8 * 7 * 6);
    assert_eq!(polygon_slack(&d, &p, &[0, 1, 2, 3, 4, 5, 6]).unwrap(), 30.0);
}

#[test]
fn worked_example_lower_orders_match_brute_force() {
    let (d, theta) = build_paper_example(12).unwrap();
    for v in 1..=4 {
        let p = AxiomProfile::with_theta(Kind::BvTheta, v, theta.clone()).unwrap();
        let r = verify_axioms(&d, &p).unwrap();
        let (bad, seen) = naive_polygon(&d, v, |u, w| theta.get(u, w), false, true);
        assert_eq!((r.violation_count, r.tuples_checked), (bad, seen as u64), "v={v}");
        assert_eq!(r.outcome(), Outcome::Pass, "v={v}");
    }
}

#[test]
fn worked_example_minimal_theta() {
    let (d, theta) = build_paper_example(12).unwrap();
    for v in 1..=5 {
        let t = min_theta(&d, v).unwrap();
        // the {1,2} pair is reached only through v+1 unit edges
        assert_eq!(t.get(0, 1), 6.0 / (v + 1) as f64, "v={v}");
        for u in 0..12 {
            for w in 0..12 {
                assert!(t.get(u, w) <= theta.get(u, w));
            }
        }
    }
}

#[test]
fn worked_example_constant_coefficient() {
    let (d, _) = build_paper_example(12).unwrap();
    assert_eq!(min_order(&d, 1.0, 6, Family::Plain).unwrap(), MinOrder::Found(5));
    for v in 1..=5 {
        let s = min_coefficient(&d, v, Family::Plain, true).unwrap();
        assert_eq!(s, (6.0 / (v + 1) as f64).max(1.0));
        let p = AxiomProfile::with_theta(Kind::BvTheta, v, ThetaTable::constant(12, s).unwrap()).unwrap();
        assert!(verify_axioms(&d, &p).unwrap().passed());
    }
}

#[test]
fn classifier_examples() {
    let d = table(&[&[0.0, 4.0, 1.0], &[4.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
    assert_eq!(min_coefficient(&d, 1, Family::Plain, true).unwrap(), 2.0);
    let p = table(&[&[1.0, 2.0], &[2.0, 0.0]]);
    assert_eq!(min_order(&p, 1.0, 3, Family::Partial).unwrap(), MinOrder::Found(1));
}
