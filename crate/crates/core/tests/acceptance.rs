//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use aluthge_lab::aluthge::{phase_homogeneity_check, Lambda};
use aluthge_lab::ensembles::{sample_matrix, splitmix64, trial_seed, EnsembleKind, EnsembleSpec, Sampler};
use aluthge_lab::linalg::{self, ComplexMatrix};
use aluthge_lab::shadowing::{hyperbolic_splitting, shadow_orbit, OrbitMode, PseudoOrbit};
use aluthge_lab::spectral::{check_exponent, SearchBudget};
use aluthge_lab::suites::{homogeneity_samples, run_suite, ExperimentReport, Suite, SuiteSettings};
use num_complex::Complex64;

const SEED: u64 = 1;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn rate(report: &ExperimentReport, check: &str) -> f64 {
    report.check_rates.get(check).copied().unwrap_or(0.0)
}

fn first_failure(report: &ExperimentReport) -> String {
    report
        .failures
        .first()
        .map(|f| format!("; first failure trial {} seed {}: {}", f.trial, f.seed, f.diagnostic))
        .unwrap_or_default()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn spectral_invariance() -> Verdict {
    let (report, elapsed) =
        timed(|| run_suite(Suite::Spectral, &SuiteSettings::standard(Suite::Spectral), 200, SEED, true));
    let ok = rate(&report, "spectrum_preserved") == 1.0 && elapsed < Duration::from_secs(30);
    verdict(
        ok,
        format!(
            "{}/200 spectra matched, worst distance/(1+|T|) {:.2e}, {:.1}s{}",
            report.passes,
            report.metrics.get("max_match_distance_rel").copied().unwrap_or(f64::NAN),
            elapsed.as_secs_f64(),
            first_failure(&report)
        ),
    )
}

fn quasi_hyperbolicity_preservation() -> Verdict {
    let mut settings = SuiteSettings::standard(Suite::Quasihyp);
    settings.gap = 0.2;
    let report = run_suite(Suite::Quasihyp, &settings, 200, SEED, true);
    let r = rate(&report, "spectral_preserved");
    verdict(r == 1.0, format!("spectral verdicts agreed in {:.1}% of 200 trials", 100.0 * r))
}

fn definitional_consistency() -> Verdict {
    let t = ComplexMatrix::from_real_diagonal(&[2.0, 0.5]);
    let n1 = check_exponent(&t, 1, SearchBudget::STANDARD, SEED).ok().flatten();
    let n2 = check_exponent(&t, 2, SearchBudget::STANDARD, SEED).ok().flatten();
    let diag_ok = matches!((&n1, &n2), (Some(a), Some(b)) if a.falsified && a.min_margin < 0.0 && !b.falsified);

    let mut settings = SuiteSettings::standard(Suite::Quasihyp);
    settings.kinds = vec![EnsembleKind::Hyperbolic];
    settings.gap = 0.3;
    settings.n_max = 20;
    let hyper = run_suite(Suite::Quasihyp, &settings, 50, SEED, true);
    let hyper_rate = rate(&hyper, "definitional_agrees");

    let mut unitary_falsified = 0;
    for index in 0..20u64 {
        let seed = trial_seed(SEED, index);
        let dim = Sampler::new(splitmix64(seed)).integer_in(2, 6);
        let Ok(u) = sample_matrix(&EnsembleSpec::new(EnsembleKind::Unitary, dim, seed)) else {
            continue;
        };
        let every_n = (1..=20).all(
            |n| matches!(check_exponent(&u, n, SearchBudget::STANDARD, seed ^ n as u64), Ok(Some(c)) if c.falsified),
        );
        unitary_falsified += usize::from(every_n);
    }
    verdict(
        diag_ok && hyper_rate == 1.0 && unitary_falsified == 20,
        format!(
            "diag(2,1/2): n=1 margin {:.4}, n=2 margin {:.4}; hyperbolic agreement {:.0}% of 50{}; unitary falsified at every n in {unitary_falsified}/20",
            n1.as_ref().map_or(f64::NAN, |c| c.min_margin),
            n2.as_ref().map_or(f64::NAN, |c| c.min_margin),
            100.0 * hyper_rate,
            first_failure(&hyper)
        ),
    )
}

fn fixed_point() -> Verdict {
    let report = run_suite(Suite::Fixedpoint, &SuiteSettings::standard(Suite::Fixedpoint), 50, SEED, true);
    verdict(
        rate(&report, "fixed_point") == 1.0,
        format!(
            "{}/50 normal samples fixed, worst |Delta(T)-T|/|T| {:.2e}",
            report.passes,
            report.metrics.get("max_fixed_point_error_rel").copied().unwrap_or(f64::NAN)
        ),
    )
}

fn homogeneity() -> Verdict {
    let samples = match homogeneity_samples(50, SEED) {
        Ok(samples) => samples,
        Err(err) => return verdict(false, format!("error: {err}")),
    };
    let within = samples.iter().filter(|(_, defect, tol)| defect <= tol).count();
    let worst = samples.iter().map(|(_, d, tol)| d / tol).fold(0.0, f64::max);

    // Same trials against Delta(alpha T) = alpha Delta(T).
    let mut phase_worst = 0.0f64;
    for index in 0..50u64 {
        let seed = trial_seed(SEED, index);
        let mut aux = Sampler::new(splitmix64(seed));
        let dim = aux.integer_in(2, 8);
        let t = sample_matrix(&EnsembleSpec::new(EnsembleKind::Invertible, dim, seed)).expect("sample");
        let alpha = aux.complex_normal().scale(2.0);
        let lambda = Lambda::new(aluthge_lab::aluthge::STANDARD_LAMBDAS[index as usize % 5]).expect("lambda");
        let tol = 1e-10 * (1.0 + alpha.norm() * linalg::operator_norm(&t).expect("norm"));
        phase_worst = phase_worst.max(phase_homogeneity_check(&t, alpha, lambda).expect("transform") / tol);
    }
    verdict(
        within == samples.len(),
        format!(
            "|Delta(aT) - |a|Delta(T)| within tolerance in {within}/50, worst ratio to tolerance {worst:.2e}; \
             |Delta(aT) - a Delta(T)| worst ratio {phase_worst:.2e}"
        ),
    )
}

fn iterate_behaviour() -> Verdict {
    let (report, elapsed) =
        timed(|| run_suite(Suite::Iterates, &SuiteSettings::standard(Suite::Iterates), 50, SEED, true));
    let monotone = rate(&report, "monotone");
    let converged = rate(&report, "converged");
    verdict(
        monotone == 1.0 && converged >= 0.95 && elapsed < Duration::from_secs(120),
        format!(
            "monotone {:.0}%, converged {:.0}% of 50, {:.1}s",
            100.0 * monotone,
            100.0 * converged,
            elapsed.as_secs_f64()
        ),
    )
}

fn scalar_orbit(value: f64, delta: f64, len: usize) -> PseudoOrbit {
    PseudoOrbit {
        points: vec![vec![Complex64::new(value, 0.0)]; len + 1],
        delta,
        bound: value.abs(),
        mode: OrbitMode::Noisy,
        unbounded_risk: false,
    }
}

fn shadowing_analytics() -> Verdict {
    let mut worst = 0.0f64;
    let mut failed = None;
    for (a, c) in [(0.5, 0.02), (0.25, 1.3), (0.1, -0.7), (2.0, 0.3), (3.0, 0.05), (5.0, -2.0)] {
        let t = ComplexMatrix::from_real_diagonal(&[a]);
        let delta = ((1.0 - a) * c).abs();
        let expected = if a < 1.0 { delta / (1.0 - a) } else { delta / (a - 1.0) };
        let result = hyperbolic_splitting(&t).and_then(|s| shadow_orbit(&t, &s, &scalar_orbit(c, delta, 200)));
        match result {
            Ok(r) => {
                let err = (r.epsilon - expected).abs();
                worst = worst.max(err);
                if err > 1e-12 && failed.is_none() {
                    failed = Some(a);
                }
            }
            Err(_) => failed = Some(a),
        }
    }
    verdict(
        failed.is_none(),
        format!(
            "worst |epsilon - delta/|1-|a||| = {worst:.2e}{}",
            failed.map_or(String::new(), |a| format!(", failed at a = {a}"))
        ),
    )
}

fn constructive_shadowing() -> Verdict {
    let report = run_suite(Suite::Shadowing, &SuiteSettings::standard(Suite::Shadowing), 100, SEED, true);
    verdict(
        report.passed && report.passes == 100,
        format!(
            "true orbit {:.0}%, bound {:.0}%, halving {:.0}% of 100; worst epsilon/delta {:.2}, halving deviation {:.2e}{}",
            100.0 * rate(&report, "true_orbit"),
            100.0 * rate(&report, "distance_bound"),
            100.0 * rate(&report, "halving"),
            report.metrics.get("max_epsilon_over_delta").copied().unwrap_or(f64::NAN),
            report.metrics.get("max_halving_deviation").copied().unwrap_or(f64::NAN),
            first_failure(&report)
        ),
    )
}

fn transfer() -> Verdict {
    let report = run_suite(Suite::Transfer, &SuiteSettings::standard(Suite::Transfer), 100, SEED, true);
    verdict(
        report.passed && report.passes == 100,
        format!(
            "{}/100 trials, both directions; worst epsilon/bound to {:.2e}, from {:.2e}{}",
            report.passes,
            report.metrics.get("to_transform_max_epsilon_over_bound").copied().unwrap_or(f64::NAN),
            report.metrics.get("from_transform_max_epsilon_over_bound").copied().unwrap_or(f64::NAN),
            first_failure(&report)
        ),
    )
}

fn end_to_end() -> Verdict {
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_aluthge-lab"))
        .args(["verify", "--suite", "all", "--trials", "100", "--seed", "1"])
        .output();
    let elapsed = start.elapsed();
    match output {
        Ok(out) => verdict(
            out.status.code() == Some(0) && elapsed < Duration::from_secs(300),
            format!("exit {:?} in {:.1}s", out.status.code(), elapsed.as_secs_f64()),
        ),
        Err(err) => verdict(false, format!("could not launch binary: {err}")),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("spectral invariance", spectral_invariance),
        ("quasi-hyperbolicity preservation", quasi_hyperbolicity_preservation),
        ("definitional/spectral consistency", definitional_consistency),
        ("fixed point", fixed_point),
        ("homogeneity", homogeneity),
        ("iterate behaviour", iterate_behaviour),
        ("shadowing analytics", shadowing_analytics),
        ("constructive shadowing", constructive_shadowing),
        ("transfer", transfer),
        ("end-to-end", end_to_end),
    ];
    let mut failures = 0;
    for (index, (name, check)) in criteria.into_iter().enumerate() {
        let result = check();
        failures += usize::from(!result.passed);
        println!(
            "criterion {:>2} {:<36} {}  {}",
            index + 1,
            name,
            if result.passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
