//! Experiment runner: validate a config, dispatch to the experiment
//! operations, and emit CSV + JSON artifacts. A config plus the library
//! version determines every output byte; nothing time- or path-dependent
//! goes into the files.

use crate::circle::{CirclePoint, TorusPoint};
use crate::config::{
    default_checkpoints, parse_point, parse_rational, AngleSpec, BackendConfig,
    ClassifySupportConfig, DenjoyCounterexampleConfig, ExperimentConfig, KgsVerifyConfig,
    MstpExpandingConfig, OracleSuiteConfig, RotationCounterexampleConfig, SimultExpandingConfig,
    TSequenceConfig,
};
use crate::denjoy::{DenjoyParams, DenjoySystem};
use crate::error::{Error, Result};
use crate::experiment::{
    self, counting_profile, fraction_hitting_at_least, kgs_trial, oracle_check, KgsTrial,
    OracleCheck, OracleReport, SampleSpec, Stats,
};
use crate::measure::{CircleMeasure, SupportKind};
use crate::numeric::{self, Backend};
use crate::radius::{PolynomialSpec, RadiusSequence};
use crate::report::{
    self, fmt_f64, fmt_rational, COUNTING_CSV_HEADER, TAIL_CSV_HEADER, T_SEQUENCE_CSV_HEADER,
};
use crate::system::{golden_bits_for, RecurrenceTimes, SystemSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::sync::Arc as StdArc;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a run produced. `partial` marks budget-limited results (exit 3).
#[derive(Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub partial: bool,
    /// One-line human summary for stdout.
    pub summary: String,
}

/// Process exit code for an error, per the CLI contract: 2 for config and
/// validation problems, 3 for precision/budget exhaustion, 1 otherwise.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::InvalidPolynomial(_)
        | Error::ProfileNotDecreasing { .. }
        | Error::UnsupportedSequence(_)
        | Error::DimensionMismatch { .. }
        | Error::BackendMismatch
        | Error::IndexNotPositive(_)
        | Error::NotInvertible
        | Error::NotInSupport { .. } => 2,
        Error::PrecisionExhausted { .. }
        | Error::BisectionBudget { .. }
        | Error::ScanBudget { .. }
        | Error::TolUnachievable { .. }
        | Error::AmbiguousAtResolution { .. } => 3,
        Error::Io(_) => 1,
    }
}

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    match config {
        ExperimentConfig::KgsVerify(c) => run_kgs(config, c, out_dir),
        ExperimentConfig::MstpExpanding(c) => run_mstp(config, c, out_dir),
        ExperimentConfig::SimultExpanding(c) => run_simult(config, c, out_dir),
        ExperimentConfig::RotationCounterexample(c) => run_rotation_cex(config, c, out_dir),
        ExperimentConfig::DenjoyCounterexample(c) => run_denjoy_cex(config, c, out_dir),
        ExperimentConfig::ClassifySupport(c) => run_classify(config, c, out_dir),
        ExperimentConfig::TSequence(c) => run_t_sequence(config, c, out_dir),
        ExperimentConfig::OracleSuite(c) => run_oracle_suite(config, c, out_dir),
    }
}

fn backend_of(cfg: BackendConfig, bits: u32) -> Backend {
    match cfg {
        BackendConfig::Rational => Backend::Rational,
        BackendConfig::Fixed => Backend::Fixed { bits },
    }
}

fn checkpoints_of(explicit: &[u64], horizon: u64) -> Result<Vec<u64>> {
    if explicit.is_empty() {
        return Ok(default_checkpoints(horizon));
    }
    if *explicit.last().expect("nonempty") != horizon {
        return Err(Error::Config(
            "the last checkpoint must equal the horizon".into(),
        ));
    }
    Ok(explicit.to_vec())
}

fn counting_rows(trial: &KgsTrial) -> Vec<String> {
    let mut rows = Vec::with_capacity(trial.per_sample.len() * trial.checkpoints.len());
    for sample in &trial.per_sample {
        for ((h, n), psi) in trial.checkpoints.iter().zip(&sample.counts).zip(&trial.psi) {
            let ratio = if *psi > 0.0 {
                *n as f64 / psi
            } else {
                f64::NAN
            };
            rows.push(format!(
                "{h},{idx},{n},{psi},{ratio}",
                idx = sample.index,
                psi = fmt_f64(*psi),
                ratio = fmt_f64(ratio)
            ));
        }
    }
    rows
}

#[derive(Serialize)]
struct TrialStats {
    checkpoints: Vec<u64>,
    psi: Vec<String>,
    ratio: Stats,
    normalized_error: Stats,
    slope_median: Option<f64>,
    underpowered: bool,
}

fn trial_stats(trial: &KgsTrial) -> TrialStats {
    TrialStats {
        checkpoints: trial.checkpoints.clone(),
        psi: trial.psi.iter().map(|p| fmt_f64(*p)).collect(),
        ratio: trial.ratio,
        normalized_error: trial.normalized_error,
        slope_median: trial.slope_median,
        underpowered: trial.underpowered,
    }
}

#[derive(Serialize)]
struct KgsSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    master_seed: u64,
    sample_seeds_are: &'a str,
    stats: TrialStats,
    error_bounds: ErrorBounds<'a>,
}

#[derive(Serialize)]
struct ErrorBounds<'a> {
    orbit_arithmetic: &'a str,
    psi: &'a str,
}

fn run_kgs(full: &ExperimentConfig, c: &KgsVerifyConfig, out: &Path) -> Result<RunReport> {
    let checkpoints = checkpoints_of(&c.checkpoints, c.horizon)?;
    let backend = backend_of(c.backend, c.bits);
    let x = parse_point(&c.x, backend)?;
    let seq = RadiusSequence::monotone(c.profile.build()?)?;
    let samples = SampleSpec {
        samples: c.samples,
        bits: c.bits,
        master_seed: c.seed,
    };
    let trial = kgs_trial(&SystemSpec::MultExpanding, &x, &seq, &checkpoints, &samples)?;

    let csv = report::write_csv(
        &out.join("kgs_verify.csv"),
        COUNTING_CSV_HEADER,
        &counting_rows(&trial),
    )?;
    let summary = KgsSummary {
        config: full,
        version: VERSION,
        master_seed: c.seed,
        sample_seeds_are: "splitmix64(master_seed xor splitmix64(index + 1))",
        stats: trial_stats(&trial),
        error_bounds: ErrorBounds {
            orbit_arithmetic: "exact dyadic mod 1 at the configured bit budget",
            psi: "f64 rounding of exact per-step measures (|rel err| <= 1e-12)",
        },
    };
    let json = report::write_json(&out.join("kgs_verify.json"), &summary)?;
    Ok(RunReport {
        files: vec![csv, json],
        partial: false,
        summary: format!(
            "kgs-verify: mean N/Psi = {:.4}, median error exponent = {:?}",
            trial.ratio.mean, trial.slope_median
        ),
    })
}

#[derive(Serialize)]
struct MstpSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    master_seed: u64,
    stats: TrialStats,
    repeat_threshold: u64,
    repeat_fraction: f64,
    error_bounds: ErrorBounds<'a>,
}

fn run_mstp(full: &ExperimentConfig, c: &MstpExpandingConfig, out: &Path) -> Result<RunReport> {
    let checkpoints = checkpoints_of(&c.checkpoints, c.horizon)?;
    let backend = backend_of(c.backend, c.bits);
    let x = parse_point(&c.x, backend)?;
    let seq = RadiusSequence::monotone(c.profile.build()?)?;
    let samples = SampleSpec {
        samples: c.samples,
        bits: c.bits,
        master_seed: c.seed,
    };
    let trial = kgs_trial(&SystemSpec::MultExpanding, &x, &seq, &checkpoints, &samples)?;
    let repeat_fraction = fraction_hitting_at_least(&trial, c.repeat_threshold);

    let csv = report::write_csv(
        &out.join("mstp_expanding.csv"),
        COUNTING_CSV_HEADER,
        &counting_rows(&trial),
    )?;
    let summary = MstpSummary {
        config: full,
        version: VERSION,
        master_seed: c.seed,
        stats: trial_stats(&trial),
        repeat_threshold: c.repeat_threshold,
        repeat_fraction,
        error_bounds: ErrorBounds {
            orbit_arithmetic: "exact dyadic mod 1 at the configured bit budget",
            psi: "f64 rounding of exact per-step measures (|rel err| <= 1e-12)",
        },
    };
    let json = report::write_json(&out.join("mstp_expanding.json"), &summary)?;
    Ok(RunReport {
        files: vec![csv, json],
        partial: false,
        summary: format!(
            "mstp-expanding: mean N/Psi = {:.4}, fraction hitting >= {} times = {:.3}",
            trial.ratio.mean, c.repeat_threshold, repeat_fraction
        ),
    })
}

#[derive(Serialize)]
struct SimultSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    master_seed: u64,
    per_c: Vec<SimultCEntry<'a>>,
    error_bounds: ErrorBounds<'a>,
}

#[derive(Serialize)]
struct SimultCEntry<'a> {
    c: &'a str,
    stats: TrialStats,
}

fn run_simult(full: &ExperimentConfig, c: &SimultExpandingConfig, out: &Path) -> Result<RunReport> {
    let backend = backend_of(c.backend, c.bits);
    let x = parse_point(&c.x, backend)?;
    let dim = c.polynomials.len();
    if x.dim() != dim {
        return Err(Error::Config(format!(
            "x has {} coordinates but there are {dim} polynomials",
            x.dim()
        )));
    }
    let coeffs: Vec<Vec<BigInt>> = c
        .polynomials
        .iter()
        .map(|p| p.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let spec = PolynomialSpec::new(coeffs, c.start)?;
    let base_seq = RadiusSequence::polynomial_supported(spec, c.profile.build()?)?;
    let samples = SampleSpec {
        samples: c.samples,
        bits: c.bits,
        master_seed: c.seed,
    };
    let system = SystemSpec::SimultExpanding { dim };

    let mut files = Vec::new();
    let mut per_c = Vec::new();
    let mut lines = Vec::new();
    for (i, c_str) in c.c_grid.iter().enumerate() {
        let factor = parse_rational(c_str)?;
        let seq = base_seq.scaled(&factor)?;
        let trial = kgs_trial(&system, &x, &seq, &[c.horizon], &samples)?;
        files.push(report::write_csv(
            &out.join(format!("simult_expanding_c{i}.csv")),
            COUNTING_CSV_HEADER,
            &counting_rows(&trial),
        )?);
        lines.push(format!(
            "C = {c_str}: mean N/Psi = {:.4} (Psi = {:.3}{})",
            trial.ratio.mean,
            trial.psi[0],
            if trial.underpowered {
                ", underpowered"
            } else {
                ""
            }
        ));
        per_c.push(SimultCEntry {
            c: c_str,
            stats: trial_stats(&trial),
        });
    }
    let summary = SimultSummary {
        config: full,
        version: VERSION,
        master_seed: c.seed,
        per_c,
        error_bounds: ErrorBounds {
            orbit_arithmetic: "exact dyadic mod 1 at the configured bit budget",
            psi: "f64 rounding of exact per-step measures (|rel err| <= 1e-12)",
        },
    };
    files.push(report::write_json(
        &out.join("simult_expanding.json"),
        &summary,
    )?);
    Ok(RunReport {
        files,
        partial: false,
        summary: lines.join("; "),
    })
}

#[derive(Serialize)]
struct TailEntry {
    l: u64,
    measure: String,
    measure_f64: f64,
    upper_bound: String,
    arcs: usize,
}

#[derive(Serialize)]
struct RotationCexSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    angle_bits: u32,
    times: TimesMeta,
    partial_measure_sum: String,
    partial_measure_sum_f64: f64,
    harmonic_number: String,
    harmonic_number_f64: f64,
    divergence_shadow_holds: bool,
    tail_unions: Vec<TailEntry>,
    exact: &'a str,
}

#[derive(Serialize)]
struct TimesMeta {
    count: usize,
    complete: bool,
    max_time_bits: u64,
    distances_strictly_decreasing: bool,
}

fn harmonic_number(k: u64) -> BigRational {
    numeric::sum_rationals(
        (1..=k)
            .map(|i| BigRational::new(BigInt::one(), BigInt::from(i)))
            .collect(),
    )
}

fn times_for_angle(angle: &AngleSpec, count: u64, bits: u32) -> Result<(RecurrenceTimes, u32)> {
    match angle {
        AngleSpec::Golden => {
            let bits = if bits == 0 {
                golden_bits_for(count as usize)
            } else {
                bits
            };
            Ok((
                RecurrenceTimes::golden_fibonacci(bits, count as usize)?,
                bits,
            ))
        }
        AngleSpec::Rational(s) => {
            let theta = CirclePoint::from_rational(parse_rational(s)?);
            let times = RecurrenceTimes::rotation_convergents(&theta, count as usize)?;
            Ok((times, 0))
        }
    }
}

fn theta_for_angle(angle: &AngleSpec, bits: u32) -> Result<CirclePoint> {
    match angle {
        AngleSpec::Golden => Ok(CirclePoint::golden(bits)),
        AngleSpec::Rational(s) => Ok(CirclePoint::from_rational(parse_rational(s)?)),
    }
}

fn tail_rows(tails: &[experiment::TailUnionResult]) -> Vec<String> {
    tails
        .iter()
        .map(|t| {
            format!(
                "{},{},{},{},{}",
                t.tail_start,
                t.horizon,
                fmt_rational(&t.measure),
                fmt_rational(&t.upper_bound),
                t.arcs
            )
        })
        .collect()
}

fn tail_entries(tails: &[experiment::TailUnionResult]) -> Vec<TailEntry> {
    tails
        .iter()
        .map(|t| TailEntry {
            l: t.tail_start,
            measure: fmt_rational(&t.measure),
            measure_f64: numeric::rational_to_f64(&t.measure),
            upper_bound: fmt_rational(&t.upper_bound),
            arcs: t.arcs,
        })
        .collect()
}

fn run_rotation_cex(
    full: &ExperimentConfig,
    c: &RotationCounterexampleConfig,
    out: &Path,
) -> Result<RunReport> {
    let (times, bits) = times_for_angle(&c.angle, c.count, c.bits)?;
    let theta = theta_for_angle(&c.angle, bits.max(256))?;
    let system = SystemSpec::rotation(theta.clone());
    let x = CirclePoint::zero(theta.backend());
    let lebesgue = CircleMeasure::lebesgue();
    let tol = parse_rational(&c.t_tolerance)?;
    let seq = RadiusSequence::counterexample(&lebesgue, &x, &times, &tol)?;
    let horizon = times.len() as u64;

    let (sum, _tag) = seq.partial_measure_sum(
        std::slice::from_ref(&lebesgue),
        &TorusPoint::scalar(x.clone()),
        &BigRational::one(),
        horizon,
    )?;
    let h_k = harmonic_number(horizon);
    let diverges = sum >= h_k;

    let tail_starts: Vec<u64> = c
        .tail_starts
        .iter()
        .copied()
        .filter(|l| *l <= horizon)
        .collect();
    let tails =
        experiment::tail_union_schedule(&system, &x, &seq, &tail_starts, horizon, &lebesgue)?;

    let decreasing = times.distances.windows(2).all(|w| w[1] < w[0]);
    let summary = RotationCexSummary {
        config: full,
        version: VERSION,
        angle_bits: bits,
        times: TimesMeta {
            count: times.len(),
            complete: times.complete,
            max_time_bits: times.max_time_bits(),
            distances_strictly_decreasing: decreasing,
        },
        partial_measure_sum: fmt_rational(&sum),
        partial_measure_sum_f64: numeric::rational_to_f64(&sum),
        harmonic_number: fmt_rational(&h_k),
        harmonic_number_f64: numeric::rational_to_f64(&h_k),
        divergence_shadow_holds: diverges,
        tail_unions: tail_entries(&tails),
        exact: "partial sums and tail-union measures are exact rationals",
    };
    let csv = report::write_csv(
        &out.join("rotation_counterexample.csv"),
        TAIL_CSV_HEADER,
        &tail_rows(&tails),
    )?;
    let json = report::write_json(&out.join("rotation_counterexample.json"), &summary)?;
    let partial = !times.complete;
    Ok(RunReport {
        files: vec![csv, json],
        partial,
        summary: format!(
            "rotation-counterexample: sum = {:.3} (H_K = {:.3}), U_{} = {:.5}",
            numeric::rational_to_f64(&sum),
            numeric::rational_to_f64(&h_k),
            tails.last().map_or(0, |t| t.tail_start),
            tails
                .last()
                .map_or(f64::NAN, |t| numeric::rational_to_f64(&t.measure)),
        ),
    })
}

#[derive(Serialize)]
struct DenjoyCexSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    angle_bits: u32,
    truncation_tail: String,
    edge_gap: String,
    semiconjugacy_defect_sup: String,
    embedding_round_trip_defect_sup: String,
    rotation_number_error: String,
    rotation_number_error_f64: f64,
    times: TimesMeta,
    partial_measure_sum: String,
    partial_measure_sum_f64: f64,
    harmonic_number_f64: f64,
    divergence_shadow_holds: bool,
    tail_unions: Vec<TailEntry>,
    exact: &'a str,
}

fn run_denjoy_cex(
    full: &ExperimentConfig,
    c: &DenjoyCounterexampleConfig,
    out: &Path,
) -> Result<RunReport> {
    let (times, auto_bits) = times_for_angle(&c.angle, c.count, c.bits)?;
    let bits = if auto_bits == 0 { 4096 } else { auto_bits };
    let theta = theta_for_angle(&c.angle, bits)?;
    let params = DenjoyParams {
        theta: theta.clone(),
        gap_scale: parse_rational(&c.gap_scale)?,
        gap_ratio: parse_rational(&c.gap_ratio)?,
        n_max: c.n_max,
        tol: parse_rational(&c.tol)?,
    };
    let sys = StdArc::new(DenjoySystem::build(params)?);
    let system = SystemSpec::denjoy(sys.clone());
    let nu = CircleMeasure::denjoy_invariant(sys.clone());
    let x = CirclePoint::from_rational(BigRational::zero());

    // Construction integrity: semiconjugacy and embedding round trip on a
    // uniform grid, plus the rotation-number estimate.
    let theta_rat = sys.theta_rational().clone();
    let mut semiconj_sup = BigRational::zero();
    let mut round_trip_sup = BigRational::zero();
    for i in 0..c.grid {
        let u = BigRational::new(BigInt::from(i), BigInt::from(c.grid));
        let f_u = sys.apply(1, &u);
        let lhs = sys.collapse_value(&f_u);
        let rhs = numeric::frac_mod_one(&(sys.collapse_value(&u) + &theta_rat));
        let defect = circle_gap(&lhs, &rhs);
        if defect > semiconj_sup {
            semiconj_sup = defect;
        }
        let y = BigRational::new(BigInt::from(i), BigInt::from(c.grid));
        let rt = circle_gap(&sys.collapse_value(&sys.embed(&y)), &y);
        if rt > round_trip_sup {
            round_trip_sup = rt;
        }
    }
    let rho = system.rotation_number_estimate(c.rotation_iterations, &x)?;
    let rho_err = (rho - &theta_rat).abs();

    let t_tol = parse_rational(&c.t_tolerance)?;
    let seq = RadiusSequence::counterexample(&nu, &x, &times, &t_tol)?;
    let horizon = times.len() as u64;
    let (sum, _tag) = seq.partial_measure_sum(
        std::slice::from_ref(&nu),
        &TorusPoint::scalar(x.clone()),
        &BigRational::one(),
        horizon,
    )?;
    let h_k = harmonic_number(horizon);
    let diverges = sum >= h_k;

    let tail_starts: Vec<u64> = c
        .tail_starts
        .iter()
        .copied()
        .filter(|l| *l <= horizon)
        .collect();
    let tails = experiment::tail_union_schedule(&system, &x, &seq, &tail_starts, horizon, &nu)?;

    let decreasing = times.distances.windows(2).all(|w| w[1] < w[0]);
    let summary = DenjoyCexSummary {
        config: full,
        version: VERSION,
        angle_bits: bits,
        truncation_tail: fmt_rational(sys.tail_bound()),
        edge_gap: fmt_rational(sys.edge_gap()),
        semiconjugacy_defect_sup: fmt_rational(&semiconj_sup),
        embedding_round_trip_defect_sup: fmt_rational(&round_trip_sup),
        rotation_number_error: fmt_rational(&rho_err),
        rotation_number_error_f64: numeric::rational_to_f64(&rho_err),
        times: TimesMeta {
            count: times.len(),
            complete: times.complete,
            max_time_bits: times.max_time_bits(),
            distances_strictly_decreasing: decreasing,
        },
        partial_measure_sum: fmt_rational(&sum),
        partial_measure_sum_f64: numeric::rational_to_f64(&sum),
        harmonic_number_f64: numeric::rational_to_f64(&h_k),
        divergence_shadow_holds: diverges,
        tail_unions: tail_entries(&tails),
        exact: "all reported quantities are exact rationals for the truncated system",
    };
    let csv = report::write_csv(
        &out.join("denjoy_counterexample.csv"),
        TAIL_CSV_HEADER,
        &tail_rows(&tails),
    )?;
    let json = report::write_json(&out.join("denjoy_counterexample.json"), &summary)?;
    Ok(RunReport {
        files: vec![csv, json],
        partial: !times.complete,
        summary: format!(
            "denjoy-counterexample: sum = {:.3}, rho error = {:.2e}, U_{} = {:.5}",
            numeric::rational_to_f64(&sum),
            numeric::rational_to_f64(&rho_err),
            tails.last().map_or(0, |t| t.tail_start),
            tails
                .last()
                .map_or(f64::NAN, |t| numeric::rational_to_f64(&t.measure)),
        ),
    })
}

fn circle_gap(a: &BigRational, b: &BigRational) -> BigRational {
    let d = numeric::frac_mod_one(&(a - b));
    let c = BigRational::one() - &d;
    if d <= c {
        d
    } else {
        c
    }
}

#[derive(Serialize)]
struct ClassifySummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    kind: &'a str,
    y: Option<String>,
    s_x: Option<String>,
    resolution: String,
}

fn run_classify(
    full: &ExperimentConfig,
    c: &ClassifySupportConfig,
    out: &Path,
) -> Result<RunReport> {
    let measure = c.measure.build();
    let x = CirclePoint::from_rational(parse_rational(&c.point)?);
    let tol = parse_rational(&c.tol)?;
    let class = measure.classify_support_point(&x, &tol)?;
    let kind = match class.kind {
        SupportKind::BothSides => "BothSides",
        SupportKind::IsolatedLeft => "IsolatedLeft",
        SupportKind::IsolatedRight => "IsolatedRight",
    };
    let summary = ClassifySummary {
        config: full,
        version: VERSION,
        kind,
        y: class
            .gap_partner
            .as_ref()
            .map(|p| fmt_rational(&p.to_rational())),
        s_x: class.gap_size.as_ref().map(fmt_rational),
        resolution: fmt_rational(&class.resolution),
    };
    let json = report::write_json(&out.join("classify_support.json"), &summary)?;
    Ok(RunReport {
        files: vec![json],
        partial: false,
        summary: format!(
            "classify-support: {kind}{}",
            summary
                .y
                .as_ref()
                .map(|y| format!(", y = {y}, s_x = {}", summary.s_x.as_deref().unwrap_or("?")))
                .unwrap_or_default()
        ),
    })
}

#[derive(Serialize)]
struct TSequenceSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    monotone_nonincreasing: bool,
    t_values: Vec<String>,
    tolerance: String,
}

fn run_t_sequence(full: &ExperimentConfig, c: &TSequenceConfig, out: &Path) -> Result<RunReport> {
    let measure = c.measure.build();
    let x = CirclePoint::from_rational(parse_rational(&c.point)?);
    let tol = parse_rational(&c.tol)?;
    let mut rows = Vec::with_capacity(c.n_max as usize);
    let mut values = Vec::with_capacity(c.n_max as usize);
    for n in 1..=c.n_max {
        let t = measure.t_sequence(&x, n, &tol)?;
        rows.push(format!("{n},{}", fmt_rational(&t)));
        values.push(t);
    }
    let two_tol = &tol + &tol;
    let monotone = values.windows(2).all(|w| w[1] <= &w[0] + &two_tol);
    let summary = TSequenceSummary {
        config: full,
        version: VERSION,
        monotone_nonincreasing: monotone,
        t_values: values.iter().map(fmt_rational).collect(),
        tolerance: fmt_rational(&tol),
    };
    let csv = report::write_csv(&out.join("t_sequence.csv"), T_SEQUENCE_CSV_HEADER, &rows)?;
    let json = report::write_json(&out.join("t_sequence.json"), &summary)?;
    Ok(RunReport {
        files: vec![csv, json],
        partial: false,
        summary: format!(
            "t-sequence: {} values, monotone nonincreasing = {monotone}",
            values.len()
        ),
    })
}

#[derive(Serialize)]
struct OracleSuiteSummary<'a> {
    config: &'a ExperimentConfig,
    version: &'a str,
    reports: Vec<OracleReport>,
    profile_identity_exact: bool,
    all_pass: bool,
}

fn run_oracle_suite(
    full: &ExperimentConfig,
    c: &OracleSuiteConfig,
    out: &Path,
) -> Result<RunReport> {
    let spec = SampleSpec {
        samples: 4,
        bits: c.bits,
        master_seed: c.seed,
    };
    let grid_resolution = parse_rational(&c.grid_resolution)?;
    let mut reports = Vec::new();

    // hit_count vs literal enumeration on the three counting systems.
    let harmonic = RadiusSequence::monotone(crate::radius::Profile::Harmonic {
        scale: BigRational::new(BigInt::one(), BigInt::from(2)),
    })?;
    reports.push(oracle_check(OracleCheck::HitCount {
        system: SystemSpec::MultExpanding,
        alpha: spec.sample_point(0, 1),
        x: parse_point(&["0".into()], Backend::Fixed { bits: c.bits })?,
        seq: harmonic.clone(),
        horizon: c.hit_horizon,
    })?);
    let curve = PolynomialSpec::new(
        vec![
            vec![BigInt::zero(), BigInt::one()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
        ],
        1,
    )?;
    let torus_seq = RadiusSequence::polynomial_supported(
        curve,
        crate::radius::Profile::InverseRoot {
            scale: BigRational::new(BigInt::one(), BigInt::from(2)),
            root: 2,
            precision_bits: 128,
        },
    )?;
    reports.push(oracle_check(OracleCheck::HitCount {
        system: SystemSpec::SimultExpanding { dim: 2 },
        alpha: spec.sample_point(1, 2),
        x: parse_point(&["0".into(), "0".into()], Backend::Fixed { bits: c.bits })?,
        seq: torus_seq,
        horizon: c.hit_horizon.min(1000),
    })?);
    reports.push(oracle_check(OracleCheck::HitCount {
        system: SystemSpec::rotation(CirclePoint::golden(c.bits)),
        alpha: spec.sample_point(2, 1),
        x: parse_point(&["0".into()], Backend::Fixed { bits: c.bits })?,
        seq: harmonic.clone(),
        horizon: c.hit_horizon,
    })?);

    // union_measure vs Monte Carlo sampling.
    let arcs = vec![
        crate::circle::Arc::new(
            CirclePoint::from_fraction(1, 10),
            BigRational::new(BigInt::one(), BigInt::from(7)),
        ),
        crate::circle::Arc::new(
            CirclePoint::from_fraction(1, 2),
            BigRational::new(BigInt::one(), BigInt::from(9)),
        ),
        crate::circle::Arc::new(
            CirclePoint::from_fraction(9, 10),
            BigRational::new(BigInt::one(), BigInt::from(5)),
        ),
    ];
    reports.push(oracle_check(OracleCheck::UnionMeasure {
        arcs,
        points: c.union_points,
        seed: c.seed,
    })?);

    // t_sequence bisection vs dense grid scan.
    reports.push(oracle_check(OracleCheck::TSequence {
        measure: CircleMeasure::lebesgue(),
        x: CirclePoint::from_fraction(0, 1),
        n: 7,
        tol: BigRational::new(BigInt::one(), BigInt::one() << 30),
        grid_resolution: grid_resolution.clone(),
    })?);
    reports.push(oracle_check(OracleCheck::TSequence {
        measure: CircleMeasure::cantor(crate::measure::CANTOR_DEFAULT_DEPTH),
        x: CirclePoint::from_fraction(1, 3),
        n: 2,
        tol: BigRational::new(BigInt::one(), BigInt::one() << 30),
        grid_resolution,
    })?);

    // The cross-module identity: counting_profile total equals the
    // partial measure sum with s = 1, exactly, in rational mode.
    let leb = CircleMeasure::lebesgue();
    let x = parse_point(&["0".into()], Backend::Rational)?;
    let profile = counting_profile(
        std::slice::from_ref(&leb),
        &x,
        &harmonic,
        c.hit_horizon.min(1000),
    )?;
    let (psum, _) = harmonic.partial_measure_sum(
        std::slice::from_ref(&leb),
        &x,
        &BigRational::one(),
        c.hit_horizon.min(1000),
    )?;
    let identity = profile.total == psum;

    let all_pass = identity && reports.iter().all(|r| r.pass);
    let rows: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{},{},{}",
                r.component,
                r.pass,
                r.witness.as_deref().unwrap_or("")
            )
        })
        .chain(std::iter::once(format!(
            "counting_profile_identity,{identity},"
        )))
        .collect();
    let summary = OracleSuiteSummary {
        config: full,
        version: VERSION,
        reports,
        profile_identity_exact: identity,
        all_pass,
    };
    let csv = report::write_csv(
        &out.join("oracle_suite.csv"),
        "component,pass,witness",
        &rows,
    )?;
    let json = report::write_json(&out.join("oracle_suite.json"), &summary)?;
    Ok(RunReport {
        files: vec![csv, json],
        partial: false,
        summary: format!("oracle-suite: all_pass = {all_pass}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MeasureConfig;

    #[test]
    fn classify_support_run_writes_expected_json() {
        let dir = std::env::temp_dir().join("stplab-runner-classify");
        std::fs::remove_dir_all(&dir).ok();
        let cfg = ExperimentConfig::ClassifySupport(ClassifySupportConfig {
            measure: MeasureConfig::Cantor { depth: 60 },
            point: "1/3".into(),
            tol: "1/1099511627776".into(),
        });
        let report = run(&cfg, &dir).unwrap();
        assert!(!report.partial);
        let text = std::fs::read_to_string(&report.files[0]).unwrap();
        assert!(text.contains("\"kind\": \"IsolatedRight\""));
        assert!(text.contains("\"y\": \"2/3\""));
        assert!(text.contains("\"s_x\": \"1/3\""));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn outputs_are_byte_identical_across_runs() {
        let dir1 = std::env::temp_dir().join("stplab-runner-det1");
        let dir2 = std::env::temp_dir().join("stplab-runner-det2");
        std::fs::remove_dir_all(&dir1).ok();
        std::fs::remove_dir_all(&dir2).ok();
        let mut kgs = KgsVerifyConfig::default();
        kgs.horizon = 2000;
        kgs.checkpoints = vec![200, 400, 800, 1400, 2000];
        kgs.samples = 12;
        let cfg = ExperimentConfig::KgsVerify(kgs);
        let r1 = run(&cfg, &dir1).unwrap();
        let r2 = run(&cfg, &dir2).unwrap();
        for (a, b) in r1.files.iter().zip(&r2.files) {
            let ba = std::fs::read(a).unwrap();
            let bb = std::fs::read(b).unwrap();
            assert_eq!(ba, bb, "{a:?} vs {b:?} differ");
        }
        std::fs::remove_dir_all(&dir1).ok();
        std::fs::remove_dir_all(&dir2).ok();
    }
}
