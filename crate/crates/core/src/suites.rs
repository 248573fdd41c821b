//! Property suites run over seeded ensembles, producing self-contained reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aluthge::{aluthge_iterates, aluthge_transform, conjugator, Lambda, STANDARD_LAMBDAS};
use crate::ensembles::{
    sample_matrix, splitmix64, trial_seed, EnsembleKind, EnsembleSpec, Sampler, DEFAULT_COND_CAP, RNG_ALGORITHM,
};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::shadowing::{
    generate_pseudo_orbit, hyperbolic_splitting, shadow_orbit, transfer_shadowing, transfer_shadowing_back,
    true_orbit_tolerance,
};
use crate::spectral::{is_quasi_hyperbolic_spectral, multiset_match, quasi_hyperbolic_definitional, SearchBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spectral,
    Fixedpoint,
    Iterates,
    Shadowing,
    Transfer,
    Quasihyp,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Spectral, Suite::Fixedpoint, Suite::Iterates, Suite::Shadowing, Suite::Transfer, Suite::Quasihyp];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spectral => "spectral",
            Suite::Fixedpoint => "fixedpoint",
            Suite::Iterates => "iterates",
            Suite::Shadowing => "shadowing",
            Suite::Transfer => "transfer",
            Suite::Quasihyp => "quasihyp",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown suite '{s}'")))
    }
}

/// Every parameter a suite run depends on besides the trial count and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSettings {
    pub kinds: Vec<EnsembleKind>,
    /// Inclusive dimension range.
    pub dims: (usize, usize),
    pub gap: f64,
    pub cond_cap: f64,
    /// Shift weights are drawn uniformly from this range.
    pub shift_weights: (f64, f64),
    pub lambdas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub orbit_len: usize,
    pub iterate_steps: usize,
    pub n_max: usize,
    pub budget: SearchBudget,
    pub tolerances: BTreeMap<String, f64>,
    /// Minimum fraction of trials that must pass each named check.
    pub required_rates: BTreeMap<String, f64>,
}

fn named(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl SuiteSettings {
    pub fn standard(suite: Suite) -> Self {
        let base = SuiteSettings {
            kinds: vec![EnsembleKind::Hyperbolic],
            dims: (2, 8),
            gap: 0.2,
            cond_cap: DEFAULT_COND_CAP,
            shift_weights: (0.5, 2.0),
            lambdas: STANDARD_LAMBDAS.to_vec(),
            deltas: vec![1e-2, 1e-3],
            orbit_len: 200,
            iterate_steps: 500,
            n_max: 20,
            budget: SearchBudget::STANDARD,
            tolerances: BTreeMap::new(),
            required_rates: BTreeMap::new(),
        };
        match suite {
            Suite::Spectral => SuiteSettings {
                kinds: vec![EnsembleKind::Invertible, EnsembleKind::Normal, EnsembleKind::Shift],
                dims: (2, 12),
                tolerances: named(&[("eigenvalue_match_rel", 1e-7)]),
                required_rates: named(&[("spectrum_preserved", 1.0)]),
                ..base
            },
            Suite::Fixedpoint => SuiteSettings {
                kinds: vec![EnsembleKind::Normal],
                dims: (2, 10),
                tolerances: named(&[("fixed_point_rel", 1e-9)]),
                required_rates: named(&[("fixed_point", 1.0)]),
                ..base
            },
            Suite::Iterates => SuiteSettings {
                kinds: vec![EnsembleKind::Invertible],
                dims: (2, 6),
                lambdas: vec![0.5],
                tolerances: named(&[
                    ("monotone_slack", 1e-10),
                    ("norm_limit_rel", 1e-2),
                    ("normality_defect_rel", 1e-6),
                ]),
                required_rates: named(&[("monotone", 1.0), ("converged", 0.95)]),
                ..base
            },
            Suite::Shadowing => SuiteSettings {
                tolerances: named(&[("true_orbit_rel", crate::shadowing::TRUE_ORBIT_REL_TOL), ("halving_rel", 0.1)]),
                required_rates: named(&[("true_orbit", 1.0), ("distance_bound", 1.0), ("halving", 1.0)]),
                ..base
            },
            Suite::Transfer => SuiteSettings {
                tolerances: named(&[("true_orbit_rel", crate::shadowing::TRUE_ORBIT_REL_TOL)]),
                required_rates: named(&[
                    ("to_transform_true_orbit", 1.0),
                    ("to_transform_bound", 1.0),
                    ("from_transform_true_orbit", 1.0),
                    ("from_transform_bound", 1.0),
                ]),
                ..base
            },
            Suite::Quasihyp => SuiteSettings {
                kinds: vec![EnsembleKind::Hyperbolic, EnsembleKind::Unitary],
                dims: (2, 6),
                gap: 0.3,
                required_rates: named(&[("spectral_preserved", 1.0), ("definitional_agrees", 1.0)]),
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: Suite,
    pub rng_algorithm: String,
    pub base_seed: u64,
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<TrialFailure>,
    pub settings: SuiteSettings,
    /// Fraction of trials passing each named check.
    pub check_rates: BTreeMap<String, f64>,
    /// Largest value of each recorded metric across trials.
    pub metrics: BTreeMap<String, f64>,
    pub ensemble: Vec<EnsembleSpec>,
    pub passed: bool,
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl ExperimentReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} trials passed, {}",
            self.suite,
            self.passes,
            self.trials,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Reports for several suites run with the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRun {
    pub reports: Vec<ExperimentReport>,
    pub passed: bool,
}

#[derive(Debug, Default)]
struct TrialOutcome {
    checks: Vec<(String, bool)>,
    metrics: Vec<(String, f64)>,
    notes: Vec<String>,
}

impl TrialOutcome {
    fn check(&mut self, name: &str, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.notes.push(format!("{name}: {}", note()));
        }
        self.checks.push((name.to_string(), ok));
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), value));
    }
}

struct Trial {
    index: usize,
    seed: u64,
    spec: Option<EnsembleSpec>,
    outcome: Result<TrialOutcome>,
}

/// Ensemble spec for one trial; auxiliary draws use an independent stream.
fn trial_spec(settings: &SuiteSettings, index: usize, seed: u64, aux: &mut Sampler) -> EnsembleSpec {
    let kind = settings.kinds[index % settings.kinds.len()];
    let dim = aux.integer_in(settings.dims.0, settings.dims.1);
    let mut spec = EnsembleSpec::new(kind, dim, seed).with_gap(settings.gap).with_cond_cap(settings.cond_cap);
    if kind == EnsembleKind::Shift {
        let (lo, hi) = settings.shift_weights;
        spec = spec.with_weights((1..dim).map(|_| aux.uniform_in(lo, hi)).collect());
    }
    spec
}

fn lambdas(settings: &SuiteSettings) -> Result<Vec<Lambda>> {
    settings.lambdas.iter().map(|&l| Lambda::new(l)).collect()
}

fn tol(settings: &SuiteSettings, name: &str) -> f64 {
    settings.tolerances.get(name).copied().unwrap_or(0.0)
}

pub fn run_suite(
    suite: Suite,
    settings: &SuiteSettings,
    trials: usize,
    seed: u64,
    stable_output: bool,
) -> ExperimentReport {
    let start = Instant::now();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(seed, index as u64);
            let mut aux = Sampler::new(splitmix64(seed));
            let spec = trial_spec(settings, index, seed, &mut aux);
            let outcome = run_trial(suite, settings, &spec, &mut aux);
            Trial { index, seed, spec: Some(spec), outcome }
        })
        .collect();

    let mut passes = 0;
    let mut failures = Vec::new();
    let mut check_counts: BTreeMap<String, usize> = settings.required_rates.keys().map(|k| (k.clone(), 0)).collect();
    let mut metrics: BTreeMap<String, f64> = BTreeMap::new();
    let mut ensemble = Vec::with_capacity(trials);
    for trial in results {
        ensemble.extend(trial.spec);
        match trial.outcome {
            Ok(outcome) => {
                for (name, ok) in &outcome.checks {
                    *check_counts.entry(name.clone()).or_default() += usize::from(*ok);
                }
                for (name, value) in outcome.metrics {
                    let slot = metrics.entry(name).or_insert(f64::NEG_INFINITY);
                    *slot = slot.max(value);
                }
                if outcome.checks.iter().all(|(_, ok)| *ok) {
                    passes += 1;
                } else {
                    failures.push(TrialFailure {
                        trial: trial.index,
                        seed: trial.seed,
                        diagnostic: outcome.notes.join("; "),
                    });
                }
            }
            Err(err) => failures.push(TrialFailure {
                trial: trial.index,
                seed: trial.seed,
                diagnostic: format!("error: {err}"),
            }),
        }
    }

    let check_rates: BTreeMap<String, f64> = check_counts
        .into_iter()
        .map(|(name, count)| (name, if trials == 0 { 1.0 } else { count as f64 / trials as f64 }))
        .collect();
    let passed = settings
        .required_rates
        .iter()
        .all(|(name, required)| check_rates.get(name).is_some_and(|rate| rate >= required));

    ExperimentReport {
        suite,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        base_seed: seed,
        trials,
        passes,
        failures,
        settings: settings.clone(),
        check_rates,
        metrics,
        ensemble,
        passed,
        wall_time: if stable_output { 0.0 } else { start.elapsed().as_secs_f64() },
        timestamp: if stable_output {
            None
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
        },
    }
}

/// Runs the given suites with their standard settings.
pub fn run_suites(suites: &[Suite], trials: usize, seed: u64, stable_output: bool) -> VerificationRun {
    let reports: Vec<ExperimentReport> = suites
        .iter()
        .map(|&suite| run_suite(suite, &SuiteSettings::standard(suite), trials, seed, stable_output))
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    VerificationRun { reports, passed }
}

fn run_trial(suite: Suite, settings: &SuiteSettings, spec: &EnsembleSpec, aux: &mut Sampler) -> Result<TrialOutcome> {
    let t = sample_matrix(spec)?;
    match suite {
        Suite::Spectral => spectral_trial(settings, &t),
        Suite::Fixedpoint => fixedpoint_trial(settings, &t),
        Suite::Iterates => iterates_trial(settings, &t),
        Suite::Shadowing => shadowing_trial(settings, &t, aux),
        Suite::Transfer => transfer_trial(settings, &t, aux),
        Suite::Quasihyp => quasihyp_trial(settings, spec.kind, &t, aux),
    }
}

fn spectral_trial(settings: &SuiteSettings, t: &ComplexMatrix) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let t_norm = linalg::operator_norm(t)?;
    let tolerance = tol(settings, "eigenvalue_match_rel") * (1.0 + t_norm);
    let original = linalg::eigenvalues(t)?;
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut failed_lambda = None;
    for lambda in lambdas(settings)? {
        let transformed = linalg::eigenvalues(&aluthge_transform(t, lambda)?)?;
        let outcome = multiset_match(&original, &transformed, tolerance)?;
        worst = worst.max(outcome.max_distance);
        if !outcome.matched && ok {
            ok = false;
            failed_lambda = Some(lambda.value());
        }
    }
    out.metric("max_match_distance_rel", worst / (1.0 + t_norm));
    out.check("spectrum_preserved", ok, || {
        format!("lambda {:?}: distance {worst:.3e} > {tolerance:.3e}", failed_lambda)
    });
    Ok(out)
}

fn fixedpoint_trial(settings: &SuiteSettings, t: &ComplexMatrix) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let t_norm = linalg::operator_norm(t)?;
    let tolerance = tol(settings, "fixed_point_rel") * t_norm;
    let mut worst = 0.0f64;
    for lambda in lambdas(settings)? {
        let d = aluthge_transform(t, lambda)?;
        worst = worst.max(linalg::operator_norm(&(&d - t))?);
    }
    out.metric("max_fixed_point_error_rel", worst / t_norm.max(f64::MIN_POSITIVE));
    out.check("fixed_point", worst <= tolerance, || format!("{worst:.3e} > {tolerance:.3e}"));
    Ok(out)
}

fn iterates_trial(settings: &SuiteSettings, t: &ComplexMatrix) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let t_norm = linalg::operator_norm(t)?;
    let slack = tol(settings, "monotone_slack");
    let mut converged = true;
    let mut monotone = true;
    let mut notes = Vec::new();
    for lambda in lambdas(settings)? {
        let trace = aluthge_iterates(t, lambda, settings.iterate_steps)?;
        let r = trace.spectral_radius;
        let increase = trace.max_norm_increase();
        let gap = (trace.final_norm() - r).abs();
        let defect = trace.final_defect();
        out.metric("max_norm_increase", increase);
        out.metric("max_norm_limit_error_rel", gap / (1.0 + r));
        out.metric("max_normality_defect_rel", defect / (t_norm * t_norm));
        if increase > slack {
            monotone = false;
            notes.push(format!("norm increased by {increase:.3e}"));
        }
        let gap_tol = tol(settings, "norm_limit_rel") * (1.0 + r);
        let defect_tol = tol(settings, "normality_defect_rel") * t_norm * t_norm;
        if gap > gap_tol || defect > defect_tol {
            converged = false;
            notes.push(format!(
                "after {} steps: |norm - r| = {gap:.3e} (tol {gap_tol:.3e}), defect {defect:.3e} (tol {defect_tol:.3e})",
                trace.len() - 1
            ));
        }
    }
    let note = notes.join(", ");
    out.check("monotone", monotone, || note.clone());
    out.check("converged", converged, || note.clone());
    Ok(out)
}

fn shadowing_trial(settings: &SuiteSettings, t: &ComplexMatrix, aux: &mut Sampler) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let t_norm = linalg::operator_norm(t)?;
    let splitting = hyperbolic_splitting(t)?;
    let halving_tol = tol(settings, "halving_rel");
    let (mut true_orbit, mut bounded, mut halving) = (true, true, true);
    let mut notes = Vec::new();
    for &delta in &settings.deltas {
        let orbit_seed = aux.integer_in(0, usize::MAX >> 1) as u64;
        let mut eps = [0.0; 2];
        for (slot, d) in [delta, delta / 2.0].into_iter().enumerate() {
            let orbit = generate_pseudo_orbit(t, d, settings.orbit_len, orbit_seed)?;
            let shadow = shadow_orbit(t, &splitting, &orbit)?;
            let res_tol = true_orbit_tolerance(t_norm, orbit.bound);
            out.metric("max_residual_rel", shadow.orbit_residual / res_tol.max(f64::MIN_POSITIVE));
            out.metric("max_epsilon_over_delta", shadow.epsilon / d);
            if shadow.orbit_residual > res_tol {
                true_orbit = false;
                notes.push(format!("delta {d:e}: residual {:.3e} > {res_tol:.3e}", shadow.orbit_residual));
            }
            if !shadow.within_bound() {
                bounded = false;
                notes.push(format!(
                    "delta {d:e}: epsilon {:.3e} > C delta + slack = {:.3e}",
                    shadow.epsilon,
                    shadow.constant_bound * d + shadow.slack
                ));
            }
            eps[slot] = shadow.epsilon;
        }
        let ratio = if eps[0] > 0.0 { eps[1] / eps[0] } else { 0.5 };
        out.metric("max_halving_deviation", (ratio / 0.5 - 1.0).abs());
        if (ratio / 0.5 - 1.0).abs() > halving_tol {
            halving = false;
            notes.push(format!("delta {delta:e}: halving ratio {ratio:.4}"));
        }
    }
    let note = notes.join(", ");
    out.check("true_orbit", true_orbit, || note.clone());
    out.check("distance_bound", bounded, || note.clone());
    out.check("halving", halving, || note.clone());
    Ok(out)
}

fn transfer_trial(settings: &SuiteSettings, t: &ComplexMatrix, aux: &mut Sampler) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let all = lambdas(settings)?;
    let lambda = all[aux.integer_in(0, all.len() - 1)];
    let transformed = aluthge_transform(t, lambda)?;
    let conj = conjugator(t, lambda)?;
    let c_t = hyperbolic_splitting(t)?.shadowing_constant();
    let c_d = hyperbolic_splitting(&transformed)?.shadowing_constant();
    let mut notes = Vec::new();
    let mut flags = [true; 4];
    for &delta in &settings.deltas {
        let orbit_seed = aux.integer_in(0, usize::MAX >> 1) as u64;
        let directions = [
            (
                &transformed,
                transfer_shadowing(
                    t,
                    lambda,
                    &generate_pseudo_orbit(&transformed, delta, settings.orbit_len, orbit_seed)?,
                ),
                conj.condition() * c_t,
                "to_transform",
            ),
            (
                t,
                transfer_shadowing_back(t, lambda, &generate_pseudo_orbit(t, delta, settings.orbit_len, orbit_seed)?),
                conj.condition() * c_d,
                "from_transform",
            ),
        ];
        for (slot, (target, result, constant, label)) in directions.into_iter().enumerate() {
            let result = result?;
            let res_tol = true_orbit_tolerance(linalg::operator_norm(target)?, result.bound);
            let claim = constant * delta + result.slack;
            out.metric(&format!("{label}_max_residual_rel"), result.orbit_residual / res_tol.max(f64::MIN_POSITIVE));
            out.metric(&format!("{label}_max_epsilon_over_bound"), result.epsilon / claim);
            if result.orbit_residual > res_tol {
                flags[2 * slot] = false;
                notes.push(format!("{label} delta {delta:e}: residual {:.3e} > {res_tol:.3e}", result.orbit_residual));
            }
            if result.epsilon > claim {
                flags[2 * slot + 1] = false;
                notes.push(format!("{label} delta {delta:e}: epsilon {:.3e} > {claim:.3e}", result.epsilon));
            }
        }
    }
    let note = notes.join(", ");
    for (name, ok) in
        ["to_transform_true_orbit", "to_transform_bound", "from_transform_true_orbit", "from_transform_bound"]
            .into_iter()
            .zip(flags)
    {
        out.check(name, ok, || note.clone());
    }
    Ok(out)
}

fn quasihyp_trial(
    settings: &SuiteSettings,
    kind: EnsembleKind,
    t: &ComplexMatrix,
    aux: &mut Sampler,
) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let spectral = is_quasi_hyperbolic_spectral(t)?.verdict;
    let expected = kind != EnsembleKind::Unitary;
    let mut preserved = spectral == expected;
    let mut notes = Vec::new();
    if !preserved {
        notes.push(format!("spectral verdict {spectral} for a {kind:?} sample"));
    }
    for lambda in lambdas(settings)? {
        let transformed = is_quasi_hyperbolic_spectral(&aluthge_transform(t, lambda)?)?.verdict;
        if transformed != spectral {
            preserved = false;
            notes.push(format!("lambda {}: transform verdict {transformed}", lambda.value()));
        }
    }
    let search_seed = aux.integer_in(0, usize::MAX >> 1) as u64;
    let definitional = quasi_hyperbolic_definitional(t, settings.n_max, settings.budget, search_seed)?;
    let agrees = definitional.verdict == spectral;
    if !agrees {
        notes.push(format!(
            "definitional verdict {} (margin {:.3e}) disagrees with spectral {spectral}",
            definitional.verdict, definitional.margin
        ));
    }
    if let Some(n) = definitional.exponent {
        out.metric("max_exponent", n as f64);
    }
    let half = aluthge_transform(t, Lambda::HALF)?;
    let transform_definitional = quasi_hyperbolic_definitional(&half, settings.n_max, settings.budget, search_seed)?;
    if let Some(n) = transform_definitional.exponent {
        out.metric("max_transform_exponent", n as f64);
    }
    if let (Some(a), Some(b)) = (definitional.exponent, transform_definitional.exponent) {
        out.metric("max_exponent_shift", (a as f64 - b as f64).abs());
    }
    let note = notes.join(", ");
    out.check("spectral_preserved", preserved, || note.clone());
    out.check("definitional_agrees", agrees, || note.clone());
    Ok(out)
}

/// Homogeneity defects `||Delta(alpha T) - |alpha| Delta(T)||` for random
/// complex `alpha`, each paired with its tolerance `1e-10 (1 + |alpha| ||T||)`.
pub fn homogeneity_samples(trials: usize, seed: u64) -> Result<Vec<(Complex64, f64, f64)>> {
    (0..trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(seed, index as u64);
            let mut aux = Sampler::new(splitmix64(seed));
            let dim = aux.integer_in(2, 8);
            let t = sample_matrix(&EnsembleSpec::new(EnsembleKind::Invertible, dim, seed))?;
            let alpha = aux.complex_normal().scale(2.0);
            let lambda = Lambda::new(STANDARD_LAMBDAS[index % STANDARD_LAMBDAS.len()])?;
            let defect = crate::aluthge::scale_homogeneity_check(&t, alpha, lambda)?;
            let tolerance = 1e-10 * (1.0 + alpha.norm() * linalg::operator_norm(&t)?);
            Ok((alpha, defect, tolerance))
        })
        .collect()
}
