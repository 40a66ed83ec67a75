//! The commands. Each case builds one or more [`ResultRecord`]s from the
//! core library; the per-case builders are shared with `sweep` so every
//! sweep record can be replayed by the single-case command in its `rerun`.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use tensordiag::diagonal::DiagonalTensor;
use tensordiag::numerics::{lq_norm, relative_deviation};
use tensordiag::oapoly::{
    diagonal_of_multilinear, extend_diagonal_functional, is_orthogonally_additive,
    multilinear_norm_ascent, multilinear_norm_grid, AdditivityTolerances, MultilinearForm,
    OrthAddPolynomial,
};
use tensordiag::rademacher::{integrate_product, integrate_product_by_pieces};
use tensordiag::sampling::{
    gaussian_vector, random_symmetric_form, random_unit_vector, stream_rng,
};
use tensordiag::{Error, Field, LpParams, Regime};

use crate::args::{CommandConfig, Config, FieldArg, Tolerances};
use crate::literal::format_scalar_list;
use crate::report::{Check, Report, ResultRecord};

/// Level tuples enumerated by `verify-rademacher` at most.
pub const TUPLE_BUDGET: u64 = 1_000_000;

/// Relative size of the oracle perturbation used by `--inject-failure`.
pub const INJECTED_PERTURBATION: f64 = 1e-3;

#[derive(Debug)]
pub enum RunError {
    /// Invalid settings or inputs (exit code 2).
    Config(String),
    /// A resource budget would be exceeded (exit code 3).
    Budget(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "invalid configuration: {m}"),
            RunError::Budget(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => RunError::Budget(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, RunError>;

pub fn execute(config: &Config) -> Outcome<Report> {
    let records = match &config.command {
        CommandConfig::VerifyRademacher { depth } => verify_rademacher(config.k, *depth)?,
        CommandConfig::PiNorm { coeffs } => {
            let coeffs = coeffs_or_random(coeffs, config);
            vec![pi_norm_record(&coeffs, config.params(), &config.tol, 1.0)?]
        }
        CommandConfig::OaNorm {
            coeffs,
            restarts,
            iters,
            field,
            samples,
        } => {
            let coeffs = coeffs_or_random(coeffs, config);
            let settings = OaSettings {
                field: *field,
                restarts: *restarts,
                iters: *iters,
                samples: *samples,
                seed: config.seed,
            };
            vec![oa_norm_record(
                &coeffs,
                config.params(),
                &settings,
                &config.tol,
            )?]
        }
        CommandConfig::AdditivityTest {
            coeffs,
            samples,
            only_case,
        } => match coeffs {
            Some(c) => vec![additivity_record(
                &extend_diagonal_functional(c, config.params())?,
                Some(c),
                true,
                *samples,
                config.seed,
                &config.tol,
            )],
            None => random_cases(config, *only_case, |case| {
                additivity_case(config, *samples, case)
            })?,
        },
        CommandConfig::ZalduendoCheck {
            restarts,
            iters,
            grid_points,
            only_case,
        } => random_cases(config, *only_case, |case| {
            zalduendo_case(config, *restarts, *iters, *grid_points, case)
        })?,
        CommandConfig::Sweep { .. } => sweep(config)?,
    };
    Ok(Report::new(config.to_json(), records))
}

fn coeffs_or_random(coeffs: &Option<Vec<Complex64>>, config: &Config) -> Vec<Complex64> {
    match coeffs {
        Some(c) => c.clone(),
        None => gaussian_vector(&mut stream_rng(config.seed, 0), config.n, Field::Complex),
    }
}

fn random_cases<F>(config: &Config, only: Option<usize>, run: F) -> Outcome<Vec<ResultRecord>>
where
    F: Fn(usize) -> Outcome<ResultRecord> + Sync,
{
    let cases: Vec<usize> = match only {
        Some(c) => vec![c],
        None => (0..config.trials).collect(),
    };
    let timed = |case: usize| -> Outcome<ResultRecord> {
        let start = Instant::now();
        let mut r = run(case)?;
        r.parameters.insert("case".into(), json!(case));
        if config.timings {
            r.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok(r)
    };
    in_pool(config.workers, || {
        cases
            .par_iter()
            .map(|&c| timed(c))
            .collect::<Outcome<Vec<_>>>()
    })?
}

fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Outcome<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn fmt_p(params: LpParams) -> String {
    format!("{}", params.p())
}

fn regime_name(params: LpParams) -> &'static str {
    match params.regime() {
        Regime::HighExponent => "k<p",
        Regime::LowExponent => "p<=k",
    }
}

/// All k-tuples of levels `1..=depth`, integrated by the multiplicity rule
/// and by brute force over pieces.
pub fn verify_rademacher(k: u32, depth: u32) -> Outcome<Vec<ResultRecord>> {
    if k < 2 {
        return Err(RunError::Config("Rademacher functions need k >= 2".into()));
    }
    if depth == 0 {
        return Err(RunError::Config("depth must be at least 1".into()));
    }
    let tuples = u64::from(depth)
        .checked_pow(k)
        .filter(|&t| t <= TUPLE_BUDGET)
        .ok_or_else(|| {
            RunError::Budget(format!(
                "{depth}^{k} level tuples exceed the limit of {TUPLE_BUDGET}"
            ))
        })?;
    let mut records = Vec::with_capacity(tuples as usize);
    let mut levels = vec![1u32; k as usize];
    loop {
        let rule = integrate_product(&levels, k)?;
        let pieces = integrate_product_by_pieces(&levels, k)?;
        let expected = u8::from(levels.iter().all(|&l| l == levels[0]));
        let mut r = ResultRecord::new("verify-rademacher", "rademacher")
            .param("k", k)
            .param("depth", depth)
            .param("levels", levels.clone())
            .param(
                "rerun",
                format!("tensordiag verify-rademacher --k {k} --depth {depth}"),
            );
        let brute = pieces.to_complex();
        r.value("multiplicity_rule", f64::from(rule));
        r.value("by_pieces_re", brute.re);
        r.value("by_pieces_im", brute.im);
        r.check(Check::exact("equal_levels_rule", rule == expected));
        r.check(Check::exact(
            "brute_force",
            pieces.as_integer() == Some(i64::from(rule)),
        ));
        records.push(r);

        let mut pos = 0;
        while pos < levels.len() {
            levels[pos] += 1;
            if levels[pos] <= depth {
                break;
            }
            levels[pos] = 1;
            pos += 1;
        }
        if pos == levels.len() {
            break;
        }
    }
    Ok(records)
}

/// Closed form of the projective norm against the representation upper
/// bound and the norming-form lower bound. `oracle_scale` multiplies the
/// closed form (1 except for injected failures).
pub fn pi_norm_record(
    coeffs: &[Complex64],
    params: LpParams,
    tol: &Tolerances,
    oracle_scale: f64,
) -> Outcome<ResultRecord> {
    let u = DiagonalTensor::new(coeffs.to_vec(), params)?;
    let closed = u.pi_norm_closed_form() * oracle_scale;
    let upper = u.pi_upper_bound()?;
    let lower = u.pi_lower_bound();
    let literal = format_scalar_list(coeffs);
    let mut r = ResultRecord::new("pi-norm", "sandwich")
        .param("k", params.k())
        .param("p", params.p())
        .param("n", coeffs.len())
        .param("regime", regime_name(params))
        .param("coeffs", literal.clone())
        .param(
            "rerun",
            format!(
                "tensordiag pi-norm --k {} --p {} --coeffs={literal}",
                params.k(),
                fmt_p(params)
            ),
        );
    r.value("closed_form", closed);
    r.value("upper_bound", upper);
    r.value("lower_bound", lower);
    match params.regime() {
        Regime::HighExponent => {
            let spread = relative_deviation(lower, closed)
                .max(relative_deviation(upper, closed))
                .max(relative_deviation(lower, upper));
            r.check(Check::new("sandwich", spread, tol.get("sandwich")));
            let scale = closed.max(f64::MIN_POSITIVE);
            let order = ((lower - closed) / scale)
                .max((closed - upper) / scale)
                .max(0.0);
            r.check(Check::new("ordering", order, tol.get("ordering")));
        }
        Regime::LowExponent => {
            // a * conj(phase(a)) only reproduces |a| bit for bit on real input
            if coeffs.iter().all(|c| c.im == 0.0) {
                r.check(Check::exact("lower_exact", lower == closed));
            } else {
                r.check(Check::new(
                    "lower_low",
                    relative_deviation(lower, closed),
                    tol.get("upper_low"),
                ));
            }
            r.check(Check::new(
                "upper_low",
                relative_deviation(upper, closed),
                tol.get("upper_low"),
            ));
        }
    }
    if oracle_scale != 1.0 {
        r.note = Some(format!(
            "injected failure: closed form scaled by {oracle_scale}"
        ));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy)]
pub struct OaSettings {
    pub field: FieldArg,
    pub restarts: usize,
    pub iters: usize,
    /// Unit vectors drawn for the sup bound when `p <= k`.
    pub samples: usize,
    pub seed: u64,
}

/// Closed-form norm of an orthogonally additive polynomial against its
/// witness and numerical ascent; below the degree also a sampled sup bound.
pub fn oa_norm_record(
    coeffs: &[Complex64],
    params: LpParams,
    s: &OaSettings,
    tol: &Tolerances,
) -> Outcome<ResultRecord> {
    let poly = OrthAddPolynomial::new(coeffs.to_vec(), params)?;
    let closed = poly.norm_closed_form();
    let numeric = poly.norm_numeric_in(s.field.into(), s.restarts, s.iters, s.seed);
    let literal = format_scalar_list(coeffs);
    let low = params.regime() == Regime::LowExponent;
    let suite = if low { "sup-bound" } else { "isometry" };
    let mut r = ResultRecord::new("oa-norm", suite)
        .param("k", params.k())
        .param("p", params.p())
        .param("n", coeffs.len())
        .param("regime", regime_name(params))
        .param("field", s.field.as_str())
        .param("coeffs", literal.clone())
        .param("restarts", s.restarts)
        .param("iters", s.iters)
        .param("samples", s.samples)
        .param("seed", s.seed)
        .param(
            "rerun",
            format!(
                "tensordiag oa-norm --k {} --p {} --coeffs={literal} --restarts {} --iters {} --field {} --samples {} --seed {}",
                params.k(),
                fmt_p(params),
                s.restarts,
                s.iters,
                s.field.as_str(),
                s.samples,
                s.seed
            ),
        );
    r.value("closed_form", closed);
    r.value("numeric", numeric);
    r.check(Check::new(
        "numeric",
        relative_deviation(numeric, closed),
        tol.get("numeric"),
    ));

    match poly.norm_witness() {
        Ok(w) => {
            let unit = lq_norm(&w.point, params.p())?;
            r.value("witness_value", w.value);
            r.value("witness_norm", unit);
            let dev = relative_deviation(w.value, closed).max((unit - 1.0).abs());
            r.check(Check::new("witness", dev, tol.get("witness")));
            r.artifacts.insert(
                "witness".into(),
                Value::String(format_scalar_list(&w.point)),
            );
        }
        Err(Error::ZeroPolynomial) => {
            r.note = Some("zero polynomial: norm 0, no norming vector".into());
        }
        Err(e) => return Err(e.into()),
    }

    if low && s.samples > 0 {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut rng = stream_rng(s.seed, u64::MAX);
        let mut worst = 0.0_f64;
        for _ in 0..s.samples {
            let x = random_unit_vector(&mut rng, coeffs.len(), params.p(), s.field.into());
            worst = worst.max(poly.evaluate(&x)?.norm());
        }
        r.value("sampled_max", worst);
        let excess = (worst - max).max(0.0) / max.max(1.0);
        r.check(Check::new("sup_bound", excess, tol.get("sup_bound")));
    }
    Ok(r)
}

/// Structural and behavioral additivity of `form`, compared with what the
/// construction predicts.
pub fn additivity_record(
    form: &MultilinearForm,
    coeffs: Option<&[Complex64]>,
    expected: bool,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> ResultRecord {
    let params = form.params();
    let tols = AdditivityTolerances {
        structural: tol.get("structural"),
        behavioral: tol.get("additivity"),
    };
    let report = is_orthogonally_additive(form, tols, samples, seed);
    let mut r = ResultRecord::new("additivity-test", "additivity")
        .param("k", params.k())
        .param("p", params.p())
        .param("n", form.dim())
        .param("samples", samples)
        .param("seed", seed)
        .param("expected_additive", expected);
    if let Some(c) = coeffs {
        let literal = format_scalar_list(c);
        r = r.param("coeffs", literal.clone()).param(
            "rerun",
            format!(
                "tensordiag additivity-test --k {} --p {} --coeffs={literal} --samples {samples} --seed {seed}",
                params.k(),
                fmt_p(params)
            ),
        );
    }
    r.value("worst_off_diagonal_ratio", report.worst_ratio);
    r.value("worst_defect", report.worst_defect);
    r.value("structural", f64::from(u8::from(report.structural)));
    r.value("behavioral", f64::from(u8::from(report.behavioral)));
    if let Some(idx) = &report.worst_index {
        let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        r.artifacts.insert("worst_index".into(), json!(one_based));
    }
    r.check(Check::exact("checks_agree", report.checks_agree()));
    r.check(Check::exact(
        "expected_verdict",
        report.is_additive() == expected,
    ));
    if expected {
        r.check(Check::new(
            "additivity",
            report.worst_defect,
            tol.get("additivity"),
        ));
    }
    r
}

/// Even cases: orthogonally additive polynomial from random coefficients.
/// Odd cases: a random symmetric form, additive only when it is trivially
/// diagonal (`n = 1` or `k = 1`).
fn additivity_case(config: &Config, samples: usize, case: usize) -> Outcome<ResultRecord> {
    let params = config.params();
    MultilinearForm::zeros(config.n, params)?;
    let mut rng = stream_rng(config.seed, case as u64);
    let seed: u64 = rng.random();
    let mut r = if case.is_multiple_of(2) {
        let c = gaussian_vector(&mut rng, config.n, Field::Complex);
        let form = extend_diagonal_functional(&c, params)?;
        additivity_record(&form, Some(&c), true, samples, seed, &config.tol)
    } else {
        let form = random_symmetric_form(&mut rng, config.n, params, Field::Complex)?;
        let expected = config.n <= 1 || params.k() <= 1;
        additivity_record(&form, None, expected, samples, seed, &config.tol)
    };
    if !r.parameters.contains_key("rerun") {
        r.parameters.insert(
            "rerun".into(),
            json!(format!(
                "tensordiag additivity-test --k {} --p {} --n {} --seed {} --samples {samples} --only-case {case}",
                config.k,
                fmt_p(params),
                config.n,
                config.seed
            )),
        );
    }
    Ok(r)
}

/// Diagonal norm of a random real symmetric form against the estimated form
/// norm; for `n <= 3` the ascent is cross-checked by grid search.
fn zalduendo_case(
    config: &Config,
    restarts: usize,
    iters: usize,
    grid_points: usize,
    case: usize,
) -> Outcome<ResultRecord> {
    let params = config.params();
    MultilinearForm::zeros(config.n, params)?;
    let mut rng = stream_rng(config.seed, case as u64);
    let form = random_symmetric_form(&mut rng, config.n, params, Field::Real)?;
    let seed: u64 = rng.random();
    let (_, diag) = diagonal_of_multilinear(&form);
    let ascent = multilinear_norm_ascent(&form, Field::Real, restarts, iters, seed)?;
    let grid = if form.dim() <= 3 {
        Some(multilinear_norm_grid(&form, grid_points)?)
    } else {
        None
    };
    let estimate = grid.map_or(ascent, |g| g.max(ascent));

    let mut r = ResultRecord::new("zalduendo-check", "zalduendo")
        .param("k", params.k())
        .param("p", params.p())
        .param("n", config.n)
        .param("seed", config.seed)
        .param("restarts", restarts)
        .param("iters", iters)
        .param("grid_points", grid_points)
        .param(
            "rerun",
            format!(
                "tensordiag zalduendo-check --k {} --p {} --n {} --seed {} --restarts {restarts} --iters {iters} --grid-points {grid_points} --only-case {case}",
                config.k,
                fmt_p(params),
                config.n,
                config.seed
            ),
        );
    r.value("diagonal_norm", diag);
    r.value("ascent", ascent);
    r.value("estimate", estimate);
    r.value("ratio", if estimate > 0.0 { diag / estimate } else { 0.0 });
    if let Some(g) = grid {
        r.value("grid", g);
        r.check(Check::new(
            "grid",
            relative_deviation(ascent, g),
            config.tol.get("grid"),
        ));
    }
    r.check(Check::new(
        "zalduendo",
        diag - estimate,
        config.tol.get("zalduendo"),
    ));
    Ok(r)
}

/// Extension by zero followed by diagonal extraction, and the norm of the
/// induced polynomial against the dual sequence norm.
pub fn extension_record(
    coeffs: &[Complex64],
    params: LpParams,
    tol: &Tolerances,
) -> Outcome<ResultRecord> {
    let form = extend_diagonal_functional(coeffs, params)?;
    let (diag, diag_norm) = diagonal_of_multilinear(&form);
    let dual = lq_norm(coeffs, params.dual_exponent())?;
    let literal = format_scalar_list(coeffs);
    let mut r = ResultRecord::new("sweep", "extension")
        .param("k", params.k())
        .param("p", params.p())
        .param("n", coeffs.len())
        .param("coeffs", literal);
    r.value("dual_norm", dual);
    r.value("diagonal_norm", diag_norm);
    r.check(Check::exact("round_trip", diag == coeffs));
    let poly = OrthAddPolynomial::new(diag, params)?;
    match poly.norm_witness() {
        Ok(w) => {
            let attained = form.evaluate_diagonal(&w.point)?.norm();
            r.value("attained", attained);
            r.check(Check::new(
                "extension",
                relative_deviation(attained, dual),
                tol.get("extension"),
            ));
        }
        Err(Error::ZeroPolynomial) => r.check(Check::exact("extension", dual == 0.0)),
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

/// One random coefficient vector per (k, p, n, trial); every suite runs on it.
fn sweep(config: &Config) -> Outcome<Vec<ResultRecord>> {
    let CommandConfig::Sweep {
        ks,
        ps,
        ns,
        restarts,
        iters,
        inject_failure,
    } = &config.command
    else {
        unreachable!("sweep called with another command");
    };
    let mut cases = Vec::new();
    for &k in ks {
        for p in ps {
            let params = LpParams::new(p.resolve(k), k)?;
            for &n in ns {
                for trial in 0..config.trials {
                    cases.push((params, n, trial));
                }
            }
        }
    }
    let run_case = |index: usize,
                    (params, n, trial): (LpParams, usize, usize)|
     -> Outcome<Vec<ResultRecord>> {
        let start = Instant::now();
        let mut rng = stream_rng(config.seed, index as u64);
        let field = if trial % 2 == 0 {
            Field::Complex
        } else {
            Field::Real
        };
        let coeffs = gaussian_vector(&mut rng, n, field);
        let oa_seed: u64 = rng.random();
        let add_seed: u64 = rng.random();
        let scale = if *inject_failure == Some(index) {
            1.0 + INJECTED_PERTURBATION
        } else {
            1.0
        };
        let settings = OaSettings {
            field: FieldArg::Complex,
            restarts: *restarts,
            iters: *iters,
            samples: 10_000,
            seed: oa_seed,
        };
        let form = extend_diagonal_functional(&coeffs, params)?;
        let mut out = vec![
            pi_norm_record(&coeffs, params, &config.tol, scale)?,
            oa_norm_record(&coeffs, params, &settings, &config.tol)?,
            additivity_record(&form, Some(&coeffs), true, 16, add_seed, &config.tol),
            extension_record(&coeffs, params, &config.tol)?,
        ];
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        for r in &mut out {
            r.command = "sweep".into();
            r.parameters.insert("sweep_case".into(), json!(index));
            r.parameters.insert("trial".into(), json!(trial));
            if config.timings {
                r.wall_time_ms = Some(elapsed);
            }
        }
        Ok(out)
    };
    let nested: Outcome<Vec<Vec<ResultRecord>>> = in_pool(config.workers, || {
        cases
            .par_iter()
            .enumerate()
            .map(|(i, &c)| run_case(i, c))
            .collect()
    })?;
    Ok(nested?.into_iter().flatten().collect())
}
