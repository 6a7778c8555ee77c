use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gms_core::classify::ClassifyError;
use gms_core::format::{parse_map, parse_space, write_space, ParseError, SpaceFile};
use gms_core::search::{search_separation, SearchError, SearchGoal, SearchOutcome, SearchTarget, Witness};
use gms_core::solvers::{
    cauchy_bound_check, cauchy_diagnostic, estimate_constants, limit_set, pair_distances, solve, AffineMap,
    BoundMode, CauchyBoundParams, Constants, ContractionProfile, DiagnosticMode, Estimate, FixedPointCertificate,
    IterOptions, Problem, PsiFunction, Scale, SolverError, Theorem,
};
use gms_core::space::{
    build_paper_example, verify_axioms_with, zero_offdiag_check, AxiomProfile, Coefficient, Kind,
    SpaceError, ThetaTable, VerificationReport, VerifyOptions,
};
use gms_core::{hierarchy_profile, min_theta};
use thiserror::Error;

use crate::{ClassifyArgs, Cli, Command, Demo, DemoMap, LemmaMode, SearchArgs, SolveArgs, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_UNCERTIFIED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// Longest orbit prefix fed to the pairwise orbit-bound check.
const BOUND_WINDOW: usize = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

type Output = Result<(String, u8), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_space(path: &Path) -> Result<SpaceFile, CliError> {
    parse_space(&read(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

pub fn run(cli: &Cli) -> Output {
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        return Err(usage(format!("--tolerance must be a finite nonnegative number, got {}", cli.tolerance)));
    }
    let opts = VerifyOptions { rel_tol: cli.tolerance, report_cap: cli.report_cap };
    match &cli.command {
        Command::Verify(args) => verify(args, &opts, cli.machine),
        Command::Classify(args) => classify(args, cli.machine),
        Command::Solve(args) => solve_cmd(args, cli.machine),
        Command::Search(args) => search(args, cli.machine),
        Command::Demo { demo: Demo::PaperExample { n, v } } => demo_example(*n, *v, &opts, cli.machine),
    }
}

fn joined<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn coefficient_field(profile: &AxiomProfile) -> String {
    match profile.coefficient() {
        Coefficient::Constant(s) => format!("s={s}"),
        Coefficient::Theta(t) => format!("theta_max={}", t.max_entry()),
    }
}

fn write_report(out: &mut String, label: &str, report: &VerificationReport, machine: bool) {
    if !machine {
        let _ = writeln!(out, "{label}{report}");
        return;
    }
    let p = &report.profile;
    let _ = writeln!(
        out,
        "{label}report kind={} v={} {} distinct={} verdict={} tuples={} violations={}",
        p.kind(),
        p.v(),
        coefficient_field(p),
        p.distinct_chain(),
        report.outcome(),
        report.tuples_checked,
        report.violation_count
    );
    for w in &report.violations {
        let _ = writeln!(out, "violation axiom={} tuple={} lhs={} rhs={}", w.axiom, joined(&w.tuple), w.lhs, w.rhs);
    }
}

fn verify(args: &VerifyArgs, opts: &VerifyOptions, machine: bool) -> Output {
    let file = load_space(&args.space)?;
    let declared = &file.profile;
    let n = file.space.n();
    let kind = match &args.kind {
        Some(k) => k.parse::<Kind>().map_err(usage)?,
        None => declared.kind(),
    };
    let v = kind.forced_v().or(args.v).unwrap_or(declared.v());
    let mut profile = if kind.uses_theta() {
        let theta = match (args.s, declared.coefficient()) {
            (Some(s), _) | (None, &Coefficient::Constant(s)) => ThetaTable::constant(n, s)?,
            (None, Coefficient::Theta(t)) => t.clone(),
        };
        AxiomProfile::with_theta(kind, v, theta)?
    } else {
        let s = match (kind.forced_s(), args.s, declared.s()) {
            (Some(s), _, _) | (None, Some(s), _) | (None, None, Some(s)) => s,
            (None, None, None) => return Err(usage(format!("kind {kind} needs a constant coefficient: pass --s"))),
        };
        AxiomProfile::new(kind, v, s)?
    };
    let distinct = match args.distinct {
        Some(d) => d,
        None if kind == declared.kind() => declared.distinct_chain(),
        None => kind.default_distinct_chain(),
    };
    profile = profile.with_distinct_chain(distinct);
    let report = verify_axioms_with(&file.space, &profile, opts)?;
    let mut out = String::new();
    write_report(&mut out, "", &report, machine);
    if kind.is_partial() {
        match zero_offdiag_check(&file.space) {
            Ok(()) => out.push_str("zero_offdiag verdict=pass\n"),
            Err(w) => {
                let _ = writeln!(out, "zero_offdiag verdict=fail tuple={}", joined(&w.tuple));
            }
        }
    }
    Ok((out, if report.passed() { EXIT_OK } else { EXIT_FAIL }))
}

fn classify(args: &ClassifyArgs, machine: bool) -> Output {
    if args.max_v == 0 {
        return Err(usage("--max-v must be at least 1"));
    }
    if args.s_grid.is_empty() || args.s_grid.iter().any(|s| !(s.is_finite() && *s >= 1.0)) {
        return Err(usage("--s-grid entries must be finite and at least 1"));
    }
    let file = load_space(&args.space)?;
    let hp = hierarchy_profile(&file.space, args.max_v, &args.s_grid)?;
    let mut out = String::new();
    if !machine {
        let _ = writeln!(out, "classify n={} max_v={} s_grid={}", file.space.n(), args.max_v, joined(&args.s_grid));
        let _ = writeln!(out, "{:<22} {:>3} {:>6}  verdict", "kind", "v", "s");
    }
    for m in &hp.memberships {
        let p = &m.profile;
        let s = p.s().unwrap_or_else(|| p.theta().map_or(1.0, |t| t.get(0, 0)));
        if machine {
            let _ = writeln!(out, "verdict kind={} v={} s={} {}", p.kind(), p.v(), s, m.outcome);
        } else {
            let _ = writeln!(out, "{:<22} {:>3} {:>6}  {}", p.kind().token(), p.v(), s, m.outcome);
        }
    }
    let families = [("plain", &hp.minimal_s, &hp.minimal_v), ("partial", &hp.minimal_s_partial, &hp.minimal_v_partial)];
    for (family, min_s, _) in families {
        for (v, s) in min_s {
            let s = s.map_or_else(|| "none".to_string(), |s| s.to_string());
            let _ = writeln!(out, "min_s family={family} v={v} s={s}");
        }
    }
    for (family, _, min_v) in families {
        for (s, v) in min_v {
            let _ = writeln!(out, "min_v family={family} s={s} v={v}");
        }
    }
    Ok((out, EXIT_OK))
}

fn build_problem(args: &SolveArgs) -> Result<Problem, CliError> {
    match args.demo {
        Some(DemoMap::Affine) => {
            if !args.files.is_empty() {
                return Err(usage("--demo takes no space or map file"));
            }
            let (lo, hi) = (args.interval[0], args.interval[1]);
            Ok(Problem::affine(AffineMap::new(args.a, args.b, lo, hi)?))
        }
        None => {
            let [space_path, map_path] = args.files.as_slice() else {
                return Err(usage("solve needs a space file and a map file, or --demo affine"));
            };
            let file = load_space(space_path)?;
            let map = parse_map(&read(map_path)?).map_err(|source| CliError::Parse { path: map_path.clone(), source })?;
            let scale = match file.profile.coefficient() {
                Coefficient::Constant(s) => Scale::Constant(*s),
                Coefficient::Theta(t) => Scale::Theta(t.clone()),
            };
            Ok(Problem::finite(file.space, map.images, file.profile.v(), scale)?)
        }
    }
}

/// Constants given on the command line, or `None` when they are to be
/// estimated.
fn explicit_profile(args: &SolveArgs, theorem: Theorem) -> Result<Option<ContractionProfile>, CliError> {
    let reject = |flag: &str, given: bool| {
        if given {
            Err(usage(format!("{flag} does not apply to theorem {theorem}")))
        } else {
            Ok(())
        }
    };
    let reich_given = args.alpha.is_some() || args.beta.is_some() || args.gamma.is_some();
    if theorem.uses_lambda() {
        reject("--psi", args.psi.is_some())?;
        reject("--alpha/--beta/--gamma", reich_given)?;
        return args.lambda.map(|l| ContractionProfile::lambda(theorem, l).map_err(Into::into)).transpose();
    }
    reject("--lambda", args.lambda.is_some())?;
    match theorem {
        Theorem::WeakTheta => {
            reject("--alpha/--beta/--gamma", reich_given)?;
            let psi = args.psi.as_deref().map(str::parse::<PsiFunction>).transpose()?;
            Ok(psi.map(ContractionProfile::weak))
        }
        _ => {
            reject("--psi", args.psi.is_some())?;
            if !reich_given {
                return Ok(None);
            }
            let (Some(beta), Some(gamma)) = (args.beta, args.gamma) else {
                return Err(usage(format!("theorem {theorem} needs both --beta and --gamma")));
            };
            if theorem == Theorem::KannanTheta {
                if args.alpha.is_some_and(|a| a != 0.0) {
                    return Err(usage("theorem kannan-theta has alpha fixed at 0"));
                }
                return Ok(Some(ContractionProfile::kannan_theta(beta, gamma)));
            }
            let Some(alpha) = args.alpha else {
                return Err(usage("theorem reich needs --alpha, --beta and --gamma"));
            };
            Ok(Some(ContractionProfile::reich(alpha, beta, gamma)))
        }
    }
}

fn solve_cmd(args: &SolveArgs, machine: bool) -> Output {
    let theorem: Theorem = args.theorem.parse().map_err(|e: SolverError| usage(e.to_string()))?;
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if args.max_iter == 0 {
        return Err(usage("--max-iter must be at least 1"));
    }
    let explicit = explicit_profile(args, theorem)?;
    let problem = build_problem(args)?;
    let x0 = match &args.x0 {
        Some(text) => problem.parse_point(text)?,
        None => problem.points()[if problem.is_finite() { 0 } else { problem.points().len() - 1 }],
    };
    let mut out = String::new();
    let profile = match explicit {
        Some(p) => p,
        None => {
            let estimate = estimate_constants(&problem, theorem);
            let _ = writeln!(out, "{estimate}");
            match estimate {
                Estimate::Admissible(p) => p,
                Estimate::NoAdmissible { .. } => return Ok((out, EXIT_REJECTED)),
            }
        }
    };
    let opts = IterOptions { max_iter: args.max_iter, tol: args.tol, lag: None };
    let cert = match solve(&problem, &profile, x0, &opts, args.allow_override) {
        Ok(cert) => cert,
        Err(SolverError::HypothesesRejected(report)) => {
            let _ = writeln!(out, "{report}");
            return Ok((out, EXIT_REJECTED));
        }
        Err(e) => return Err(e.into()),
    };
    if machine {
        let _ = writeln!(out, "{}", cert.machine_line());
    } else {
        let _ = writeln!(out, "{}", cert.hypotheses);
        let _ = writeln!(out, "{cert}");
    }
    write_diagnostics(&mut out, &problem, &cert, args);
    Ok((out, if cert.certified() { EXIT_OK } else { EXIT_UNCERTIFIED }))
}

fn write_diagnostics(out: &mut String, problem: &Problem, cert: &FixedPointCertificate, args: &SolveArgs) {
    let theorem = cert.profile.theorem();
    let mode = if theorem.is_partial() { DiagnosticMode::Partial } else { DiagnosticMode::Theta };
    let _ = writeln!(out, "{}", cauchy_diagnostic(problem, &cert.trace, mode, cert.tol));
    if let Ok(set) = limit_set(problem, &cert.trace, cert.tol) {
        let _ = writeln!(out, "limit_set settled={} points={}", set.settled, joined(&set.points));
    }
    if theorem.is_partial() {
        return;
    }
    let sigma0 = cert.trace.sigma.first().copied().unwrap_or(0.0);
    let theta_max = problem.coefficient_max();
    let params = match *cert.profile.constants() {
        Constants::Lambda(l) => CauchyBoundParams::new(l, 0.0, 0.0, theta_max),
        Constants::Reich { alpha, beta, gamma } => CauchyBoundParams::for_reich(alpha, beta, gamma, sigma0, theta_max),
        Constants::Psi(_) => return,
    };
    let (mode, token) = match args.lemma_a2_mode {
        LemmaMode::Printed => (BoundMode::Printed, "printed"),
        LemmaMode::Corrected => (BoundMode::Corrected, "corrected"),
    };
    let Ok(params) = params else {
        out.push_str("orbit_bound verdict=skipped reason=constants-out-of-range\n");
        return;
    };
    let pairs = pair_distances(problem, &cert.trace, BOUND_WINDOW);
    let _ = write!(out, "orbit_bound mode={token} c={} k1={} k2={} n0={}", params.c, params.k1, params.k2, params.n0);
    let _ = match cauchy_bound_check(&pairs, &params, mode) {
        Ok(()) => writeln!(out, " verdict=ok"),
        Err(v) => writeln!(out, " verdict=violated m={} n={} lhs={} rhs={}", v.m, v.n, v.lhs, v.rhs),
    };
}

fn write_witness(out: &mut String, w: &Witness, machine: bool) {
    write_report(out, "member ", &w.member, machine);
    if let Some(r) = &w.non_member {
        write_report(out, "non_member ", r, machine);
    }
    if let Some(m) = &w.map {
        let _ = writeln!(out, "map images={}", joined(m));
    }
    if let Some(o) = &w.orbit {
        let _ = writeln!(out, "orbit points={}", joined(o));
    }
    if let Some(l) = &w.limit_set {
        let _ = writeln!(out, "limit_set points={}", joined(l));
    }
    if let Some((holds, fails)) = &w.estimates {
        let _ = writeln!(out, "holds {holds}");
        let _ = writeln!(out, "fails {fails}");
    }
    if !machine {
        out.push_str("witness\n");
        out.push_str(&write_space(&w.space, &w.member.profile));
    }
}

fn search(args: &SearchArgs, machine: bool) -> Output {
    let goal: SearchGoal = args.target.parse().map_err(|e: SearchError| usage(e.to_string()))?;
    let target = SearchTarget { goal, n: args.n, v: args.v, s: args.s, budget: args.budget, seed: args.seed };
    let outcome = search_separation(&target).map_err(|e| match e {
        SearchError::BadTarget(m) => usage(m),
        e => e.into(),
    })?;
    let mut out = String::new();
    let _ = write!(
        out,
        "search goal={goal} n={} v={} s={} budget={} seed={}",
        args.n, args.v, args.s, args.budget, args.seed
    );
    match outcome {
        SearchOutcome::Found(w) => {
            let _ = writeln!(out, " result=found attempt={}", w.attempt);
            write_witness(&mut out, &w, machine);
            if let Some(path) = &args.out {
                fs::write(path, write_space(&w.space, &w.member.profile))
                    .map_err(|source| CliError::Io { path: path.clone(), source })?;
            }
            Ok((out, EXIT_OK))
        }
        SearchOutcome::NoneFound { budget } => {
            let _ = writeln!(out, " result=none-found attempts={budget}");
            Ok((out, EXIT_FAIL))
        }
    }
}

fn demo_example(n: usize, v: usize, opts: &VerifyOptions, machine: bool) -> Output {
    let (space, theta) = build_paper_example(n)?;
    let profile = AxiomProfile::with_theta(Kind::BvTheta, v, theta.clone())?;
    let exact = VerifyOptions { rel_tol: 0.0, ..*opts };
    let report = verify_axioms_with(&space, &profile, &exact)?;
    let tight = min_theta(&space, v)?;
    let mut out = String::new();
    let _ = writeln!(out, "demo example points=1..{n} v={v} theta=3+u+w comparison=exact");
    write_report(&mut out, "", &report, machine);
    let _ = writeln!(out, "min_theta u=1 w=2 value={} declared={}", tight.get(0, 1), theta.get(0, 1));
    Ok((out, if report.passed() { EXIT_OK } else { EXIT_FAIL }))
}
