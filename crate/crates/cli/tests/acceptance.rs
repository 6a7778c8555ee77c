//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

#[path = "../../core/tests/common/lp.rs"]
mod lp;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gms_core::solvers::{fit_reich, pair_terms, rate_certificate, Uniqueness};
use gms_core::space::Kind;
use gms_core::{
    build_paper_example, combine_spaces, min_coefficient, random_contraction, random_space, search_separation, solve,
    verify_axioms, verify_axioms_with, zero_offdiag_check, AffineMap, AxiomProfile, Contraction, DistanceTable, Family,
    FixedPointCertificate, IterOptions, Outcome, Point, Problem, Scale, SearchGoal, SearchOutcome, SearchTarget,
    Theorem, VerifyOptions,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

const PAIRS: [(usize, f64); 3] = [(1, 1.0), (1, 2.0), (2, 2.0)];

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn worked_example() -> Verdict {
    let start = Instant::now();
    let (d, theta) = build_paper_example(12).map_err(|e| e.to_string())?;
    let p = AxiomProfile::with_theta(Kind::BvTheta, 5, theta).map_err(|e| e.to_string())?;
    let opts = VerifyOptions { rel_tol: 0.0, ..VerifyOptions::default() };
    let r = verify_axioms_with(&d, &p, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(r.outcome() == Outcome::Pass, format!("verdict {}", r.outcome()))?;
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("exact verification pass, {} tuples in {elapsed:.2?}", r.tuples_checked))
}

/// Valid partial-kind tables seen by earlier criteria, for the positivity check.
struct Seen {
    partial_tables: Vec<DistanceTable>,
}

fn combined_sums(seen: &mut Seen) -> Verdict {
    let mut all_tuples = 0;
    for &(v, s) in &PAIRS {
        for seed in 0..200u64 {
            let (p, _) = random_space(Kind::PartialMetric, 6, 1, 1.0, seed).map_err(|e| e.to_string())?;
            let (b, _) = random_space(Kind::Bvs, 6, v, s, seed ^ 0x5eed).map_err(|e| e.to_string())?;
            let sum = combine_spaces(&p, &b, v, s).map_err(|e| format!("(v={v}, s={s}) seed {seed}: {e}"))?;
            let strict = AxiomProfile::new(Kind::PartialBvs, v, s).unwrap();
            all_tuples += usize::from(verify_axioms(&sum, &strict).unwrap().passed());
            seen.partial_tables.push(sum);
        }
    }
    Ok(format!("600/600 sums pass (all-tuples regime: {all_tuples}/600)"))
}

fn inclusion() -> Verdict {
    for &(v, s) in &PAIRS {
        for seed in 0..200u64 / 3 + 1 {
            let (d, _) = random_space(Kind::Bvs, 6, v, s, 1000 + seed).map_err(|e| e.to_string())?;
            let p = AxiomProfile::new(Kind::PartialBvs, v, s).unwrap().with_distinct_chain(true);
            check(verify_axioms(&d, &p).unwrap().passed(), format!("(v={v}, s={s}) seed {seed} not partial"))?;
        }
    }
    for &(v, s) in &PAIRS {
        let t = SearchTarget { goal: SearchGoal::BvsNotPartialBvs, n: 6, v, s, budget: 500, seed: 42 };
        check(
            matches!(search_separation(&t), Ok(SearchOutcome::NoneFound { .. })),
            format!("guard search found a witness at (v={v}, s={s})"),
        )?;
    }
    Ok("201 tables pass; guard search none found".into())
}

fn positive_offdiagonal(seen: &mut Seen) -> Verdict {
    let kinds = [Kind::PartialMetric, Kind::PartialB, Kind::PartialRectB, Kind::PartialVGeneralized, Kind::PartialBvs];
    for kind in kinds {
        for seed in 0..40 {
            let (d, p) = random_space(kind, 6, 2, 2.0, seed).map_err(|e| e.to_string())?;
            check(verify_axioms(&d, &p).unwrap().passed(), format!("{kind} seed {seed} invalid"))?;
            seen.partial_tables.push(d);
        }
    }
    let n = seen.partial_tables.len();
    for d in &seen.partial_tables {
        if let Err(w) = zero_offdiag_check(d) {
            return Err(format!("zero off-diagonal entry at {:?}", w.tuple));
        }
    }
    Ok(format!("{n} valid partial tables, all off-diagonal entries positive"))
}

fn instance(theorem: Theorem, seed: u64) -> Result<Contraction, String> {
    let v = 1 + (seed % 2) as usize;
    let s = if seed % 3 == 0 { 1.0 } else { 2.0 };
    let c = if theorem.is_partial() {
        let (space, _) = random_space(Kind::PartialBvs, 6, v, s, seed).map_err(|e| e.to_string())?;
        random_contraction(&space, v, Scale::Constant(s), theorem, seed, 64)
    } else {
        let (space, p) = random_space(Kind::BvTheta, 6, v, s + 1.0, seed).map_err(|e| e.to_string())?;
        random_contraction(&space, v, Scale::Theta(p.theta().unwrap().clone()), theorem, seed, 64)
    };
    c.map_err(|e| format!("{theorem} seed {seed}: {e}"))
}

struct Run {
    theorem: Theorem,
    contraction: Contraction,
    cert: FixedPointCertificate,
}

fn theorem_suite(runs: &mut Vec<Run>) -> Verdict {
    let start = Instant::now();
    let mut sampled = 0;
    for theorem in Theorem::ALL {
        for seed in 0..200u64 {
            let c = instance(theorem, seed)?;
            sampled += usize::from(c.attempt.is_some());
            let u0 = Point::Index(seed as usize % 6);
            let cert = solve(&c.problem, &c.profile, u0, &IterOptions::default(), false)
                .map_err(|e| format!("{theorem} seed {seed}: {e}"))?;
            let ctx = format!("{theorem} seed {seed}");
            check(cert.certified(), format!("{ctx}: {}", cert.failures.join("; ")))?;
            check(cert.residual <= 1e-12, format!("{ctx}: residual {}", cert.residual))?;
            check(cert.unique, format!("{ctx}: not unique"))?;
            check(!theorem.is_partial() || cert.self_distance <= 1e-12, format!("{ctx}: self-distance"))?;
            let Uniqueness::Exhaustive { exact_fixed, .. } = &cert.uniqueness else {
                return Err(format!("{ctx}: no exhaustive scan"));
            };
            let images = c.problem.images().unwrap();
            let fixed: Vec<usize> = (0..images.len()).filter(|&x| images[x] == x).collect();
            check(exact_fixed == &fixed && cert.fixed_point == Point::Index(fixed[0]), format!("{ctx}: scan mismatch"))?;
            runs.push(Run { theorem, contraction: c, cert });
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("7×200 certified ({sampled} sampled maps, rest constant fallback) in {elapsed:.2?}"))
}

fn rate_bounds(runs: &[Run]) -> Verdict {
    for r in runs {
        let verdict = rate_certificate(&r.cert.trace, &r.contraction.profile);
        check(verdict.ok(), format!("{}: {verdict}", r.theorem))?;
    }
    let problem = Problem::affine(AffineMap::new(0.5, 0.0, 0.0, 1.0).unwrap());
    let profile = gms_core::ContractionProfile::lambda(Theorem::BanachPartial, 0.5).unwrap();
    let cert = solve(&problem, &profile, Point::Real(1.0), &IterOptions::default(), false).map_err(|e| e.to_string())?;
    let sigma = &cert.trace.sigma;
    let worst = sigma.iter().enumerate().map(|(n, s)| (s - 0.5f64.powi(n as i32) * sigma[0]).abs()).fold(0.0, f64::max);
    check(worst <= 1e-12, format!("halving bound gap {worst}"))?;
    Ok(format!("{} traces within bound; halving gap {worst:e} over {} steps", runs.len(), sigma.len()))
}

fn weak_monotone(runs: &[Run]) -> Verdict {
    let weak: Vec<&Run> = runs.iter().filter(|r| r.theorem == Theorem::WeakTheta).take(100).collect();
    check(weak.len() == 100, "fewer than 100 weak runs")?;
    for r in &weak {
        let psi = r.contraction.profile.psi().unwrap();
        let alpha = &r.cert.trace.alpha.as_ref().ok_or("no lagged sequence")?.values;
        for n in 0..alpha.len().saturating_sub(1) {
            let bound = alpha[n] - psi.eval(alpha[n]);
            check(alpha[n + 1] <= bound + 1e-12, format!("index {}: {} > {bound}", n + 1, alpha[n + 1]))?;
        }
        check(alpha.last().is_some_and(|&a| a <= 1e-12), "final alpha above 1e-12")?;
    }
    Ok("100 runs monotone, final alpha ≤ 1e-12".into())
}

fn classifier_exact() -> Verdict {
    let mut tight = 0;
    for seed in 0..100u64 {
        let v = 1 + (seed % 2) as usize;
        let (kind, family) = if seed % 4 < 2 { (Kind::Bvs, Family::Plain) } else { (Kind::PartialBvs, Family::Partial) };
        let (d, _) = random_space(kind, 5, v, 3.0, 2000 + seed).map_err(|e| e.to_string())?;
        let s = min_coefficient(&d, v, family, kind.default_distinct_chain()).map_err(|e| e.to_string())?;
        let at = |s| verify_axioms(&d, &AxiomProfile::new(kind, v, s).unwrap()).unwrap().outcome();
        check(at(s).passed(), format!("seed {seed}: s_min={s} fails"))?;
        if s > 1.0 {
            tight += 1;
            check(at(s * (1.0 - 1e-6)) == Outcome::Fail, format!("seed {seed}: below s_min={s} passes"))?;
        }
    }
    for seed in 0..20u64 {
        let (d, _) = random_space(Kind::Metric, 6, 1, 1.0, seed).map_err(|e| e.to_string())?;
        let s = min_coefficient(&d, 1, Family::Plain, true).map_err(|e| e.to_string())?;
        check(s == 1.0, format!("metric seed {seed}: s_min={s}"))?;
    }
    Ok(format!("100 tables exact ({tight} with s_min > 1); metrics give 1"))
}

fn reich_oracle() -> Verdict {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for seed in 0..1000u64 {
        if checked == 50 {
            break;
        }
        let alpha_zero = seed % 2 == 1;
        let n = 3 + (seed % 4) as usize;
        let (space, p) = random_space(Kind::BvTheta, n, 1, 3.0, seed).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let images = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let problem = Problem::finite(space, images, 1, Scale::Theta(p.theta().unwrap().clone())).unwrap();
        let terms = pair_terms(&problem);
        let rows: Vec<_> = terms.iter().map(|t| (t.base, t.left, t.right, t.image)).collect();
        let Some(opt) = lp::reich_optimum(&rows, alpha_zero) else { continue };
        if opt[1] + opt[2] > 1.0 || opt.iter().sum::<f64>() < 1e-9 {
            continue;
        }
        let (a, b, g) = fit_reich(&terms, alpha_zero).ok_or(format!("seed {seed}: no fit"))?;
        for t in &terms {
            check(t.image <= a * t.base + b * t.left + g * t.right + 1e-9 * t.image.max(1.0), format!("seed {seed}: infeasible fit"))?;
        }
        let gap = a + b + g - opt.iter().sum::<f64>();
        check((-1e-9..=0.02).contains(&gap), format!("seed {seed}: gap {gap}"))?;
        worst = worst.max(gap);
        checked += 1;
    }
    check(checked == 50, format!("only {checked} instances"))?;
    Ok(format!("50 instances feasible, worst gap {worst:.5}"))
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let space = path("s.gms");
    std::fs::write(&space, "gms v1\npoints 3\nkind partial_bvs\nv 1\ns 2\nd 1 2 3\nd 2 0 2\nd 3 2 1\n").unwrap();
    let map = path("m.map");
    std::fs::write(&map, "gms-map v1\npoints 3\nm 1 1 1\n").unwrap();
    let (w1, w2) = (path("w1.gms"), path("w2.gms"));
    let runs: Vec<Vec<String>> = vec![
        vec!["demo".into(), "paper-example".into(), "--N".into(), "12".into()],
        vec!["verify".into(), space.clone(), "--machine".into()],
        vec!["classify".into(), space.clone(), "--max-v".into(), "2".into()],
        vec!["solve".into(), space.clone(), map.clone(), "--theorem".into(), "kannan".into()],
        vec!["solve".into(), "--demo".into(), "affine".into(), "--theorem".into(), "weak".into(), "--x0".into(), "1".into()],
        vec!["search".into(), "--target".into(), "nonunique_limit".into(), "--n".into(), "4".into(), "--budget".into(), "2000".into(), "--seed".into(), "42".into()],
    ];
    let exe = env!("CARGO_BIN_EXE_gms");
    let run = |args: &[String]| Command::new(exe).args(args).output().unwrap();
    for args in &runs {
        let (a, b) = (run(args), run(args));
        check(a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status, format!("differs: gms {}", args.join(" ")))?;
    }
    let search = |out: &str| {
        let args = ["search", "--target", "partial_bvs_not_bvs", "--n", "5", "--v", "2", "--budget", "3000", "--seed", "7", "--out", out];
        Command::new(exe).args(args).output().unwrap()
    };
    let (a, b) = (search(&w1), search(&w2));
    check(a.stdout == b.stdout && a.status.success(), "search output differs")?;
    check(std::fs::read(&w1).unwrap() == std::fs::read(&w2).unwrap(), "witness files differ")?;
    Ok(format!("{} invocations byte-identical", runs.len() + 1))
}

fn main() -> ExitCode {
    let mut seen = Seen { partial_tables: Vec::new() };
    let mut runs = Vec::new();
    let results: Vec<(&str, Verdict)> = vec![
        ("worked example", worked_example()),
        ("combined sums", combined_sums(&mut seen)),
        ("inclusion", inclusion()),
        ("positive off-diagonal", positive_offdiagonal(&mut seen)),
        ("theorem conclusions", theorem_suite(&mut runs)),
        ("rate bounds", rate_bounds(&runs)),
        ("weak monotonicity", weak_monotone(&runs)),
        ("classifier exactness", classifier_exact()),
        ("reich fit vs exact optimum", reich_oracle()),
        ("cli determinism", cli_determinism()),
    ];
    let mut failed = 0;
    for (i, (name, verdict)) in results.iter().enumerate() {
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
