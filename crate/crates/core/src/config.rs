//! Experiment configuration: one JSON document per run. Command-line flags
//! override the matching config fields, so a config file plus the software
//! version pins every output byte.

use crate::error::{Error, Result};
use crate::numeric::Backend;
use crate::radius::Profile;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Parse an exact rational from `p/q`, an integer, or a finite decimal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |detail: &str| Error::Config(format!("cannot parse rational {s:?}: {detail}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad("bad integer part"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("bad fractional part"));
        }
        let digits: BigInt = frac.parse().map_err(|_| bad("bad fractional part"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = BigRational::new(whole.magnitude().clone().into(), BigInt::one())
            + BigRational::new(digits, scale);
        return Ok(BigRational::from_integer(sign) * magnitude);
    }
    let n: BigInt = s.parse().map_err(|_| bad("not an integer"))?;
    Ok(BigRational::from_integer(n))
}

/// A rotation angle: the golden mean or an explicit rational.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum AngleSpec {
    Golden,
    Rational(String),
}

impl AngleSpec {
    pub fn is_golden(&self) -> bool {
        matches!(self, AngleSpec::Golden)
    }
}

/// Serializable radius-profile description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// `scale / q`.
    Harmonic {
        scale: String,
    },
    /// `scale / q^power`.
    InversePower {
        scale: String,
        power: u32,
    },
    /// `scale * q^(-1/root)` rounded down to `precision_bits` bits.
    InverseRoot {
        scale: String,
        root: u32,
        #[serde(default = "default_root_precision")]
        precision_bits: u32,
    },
    Constant {
        value: String,
    },
}

fn default_root_precision() -> u32 {
    128
}

impl ProfileConfig {
    pub fn build(&self) -> Result<Profile> {
        Ok(match self {
            ProfileConfig::Harmonic { scale } => Profile::Harmonic {
                scale: parse_rational(scale)?,
            },
            ProfileConfig::InversePower { scale, power } => Profile::InversePower {
                scale: parse_rational(scale)?,
                power: *power,
            },
            ProfileConfig::InverseRoot {
                scale,
                root,
                precision_bits,
            } => Profile::InverseRoot {
                scale: parse_rational(scale)?,
                root: *root,
                precision_bits: *precision_bits,
            },
            ProfileConfig::Constant { value } => Profile::Constant {
                value: parse_rational(value)?,
            },
        })
    }
}

/// Serializable measure description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    Lebesgue,
    Cantor {
        #[serde(default = "default_cantor_depth")]
        depth: u32,
    },
}

fn default_cantor_depth() -> u32 {
    crate::measure::CANTOR_DEFAULT_DEPTH
}

impl MeasureConfig {
    pub fn build(&self) -> crate::measure::CircleMeasure {
        match self {
            MeasureConfig::Lebesgue => crate::measure::CircleMeasure::lebesgue(),
            MeasureConfig::Cantor { depth } => crate::measure::CircleMeasure::cantor(*depth),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BackendConfig {
    Rational,
    Fixed,
}

/// Quantitative counting study against the counting profile (the ratio and
/// error-exponent experiment over the multiplicative expanding map).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KgsVerifyConfig {
    pub horizon: u64,
    /// Checkpoints for the exponent fit; when empty, five log-spaced points
    /// from `horizon / 100` to `horizon` are used.
    pub checkpoints: Vec<u64>,
    pub samples: u32,
    pub seed: u64,
    pub bits: u32,
    pub backend: BackendConfig,
    pub profile: ProfileConfig,
    /// Target center, one rational per coordinate.
    pub x: Vec<String>,
}

impl Default for KgsVerifyConfig {
    fn default() -> Self {
        KgsVerifyConfig {
            horizon: 100_000,
            checkpoints: Vec::new(),
            samples: 200,
            seed: 8,
            bits: 128,
            backend: BackendConfig::Fixed,
            profile: ProfileConfig::Harmonic {
                scale: "1/2".into(),
            },
            x: vec!["0".into()],
        }
    }
}

/// Monotone shrinking-target study on the expanding map, reporting the
/// repeat-hit fraction alongside the ratio statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MstpExpandingConfig {
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub samples: u32,
    pub seed: u64,
    pub bits: u32,
    pub backend: BackendConfig,
    pub profile: ProfileConfig,
    pub x: Vec<String>,
    /// A sample "hits infinitely often" at desk scale when its count
    /// reaches this threshold before the horizon.
    pub repeat_threshold: u64,
}

impl Default for MstpExpandingConfig {
    fn default() -> Self {
        MstpExpandingConfig {
            horizon: 100_000,
            checkpoints: Vec::new(),
            samples: 200,
            seed: 11,
            bits: 128,
            backend: BackendConfig::Fixed,
            profile: ProfileConfig::Harmonic {
                scale: "1/2".into(),
            },
            x: vec!["0".into()],
            repeat_threshold: 10,
        }
    }
}

/// Simultaneous expanding action on `T^n` along a polynomial curve, swept
/// over a grid of scale factors `C`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimultExpandingConfig {
    /// Polynomial coefficients (ascending degree) per coordinate.
    pub polynomials: Vec<Vec<i64>>,
    pub start: u64,
    pub horizon: u64,
    pub samples: u32,
    pub seed: u64,
    pub bits: u32,
    pub backend: BackendConfig,
    pub profile: ProfileConfig,
    pub c_grid: Vec<String>,
    pub x: Vec<String>,
}

impl Default for SimultExpandingConfig {
    fn default() -> Self {
        SimultExpandingConfig {
            polynomials: vec![vec![0, 1], vec![0, 0, 1]],
            start: 1,
            horizon: 10_000,
            samples: 100,
            seed: 21,
            bits: 128,
            backend: BackendConfig::Fixed,
            profile: ProfileConfig::InverseRoot {
                scale: "1/2".into(),
                root: 2,
                precision_bits: 128,
            },
            c_grid: vec!["1/4".into(), "1".into(), "4".into()],
            x: vec!["0".into(), "0".into()],
        }
    }
}

/// Rotation counterexample: divergent measure sum with collapsing exact
/// tail unions over the recurrence times.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotationCounterexampleConfig {
    pub angle: AngleSpec,
    /// Number of recurrence times `K`.
    pub count: u64,
    /// Tail starts `l` to sweep; values beyond `count` are dropped.
    pub tail_starts: Vec<u64>,
    /// Bisection tolerance for `t_k`, as a rational.
    pub t_tolerance: String,
    /// Fixed-point budget; 0 means auto from the largest recurrence time.
    pub bits: u32,
}

impl Default for RotationCounterexampleConfig {
    fn default() -> Self {
        RotationCounterexampleConfig {
            angle: AngleSpec::Golden,
            count: 10_000,
            tail_starts: default_tail_starts(),
            t_tolerance: "1/1099511627776".into(), // 2^-40
            bits: 0,
        }
    }
}

pub fn default_tail_starts() -> Vec<u64> {
    vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000]
}

/// Denjoy counterexample: the criterion-3 protocol under the Denjoy
/// invariant measure, plus construction integrity checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenjoyCounterexampleConfig {
    pub angle: AngleSpec,
    pub gap_scale: String,
    pub gap_ratio: String,
    pub n_max: u32,
    /// Truncation tolerance (bounds the untracked tail mass).
    pub tol: String,
    pub count: u64,
    pub tail_starts: Vec<u64>,
    pub t_tolerance: String,
    /// Grid size for the semiconjugacy-defect sweep.
    pub grid: u32,
    /// Iterations for the rotation-number estimate.
    pub rotation_iterations: u64,
    pub bits: u32,
}

impl Default for DenjoyCounterexampleConfig {
    fn default() -> Self {
        DenjoyCounterexampleConfig {
            angle: AngleSpec::Golden,
            gap_scale: "1/6".into(),
            gap_ratio: "1/2".into(),
            n_max: 64,
            tol: "1/1000000000000000000".into(),
            count: 10_000,
            tail_starts: default_tail_starts(),
            t_tolerance: "1/1152921504606846976".into(), // 2^-60
            grid: 1000,
            rotation_iterations: 10_000,
            bits: 0,
        }
    }
}

/// Support-point classification through the measures module.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySupportConfig {
    pub measure: MeasureConfig,
    pub point: String,
    pub tol: String,
}

impl Default for ClassifySupportConfig {
    fn default() -> Self {
        ClassifySupportConfig {
            measure: MeasureConfig::Cantor {
                depth: default_cantor_depth(),
            },
            point: "1/3".into(),
            tol: "1/1099511627776".into(), // 2^-40
        }
    }
}

/// The `t_n` radius sequence of a point under a measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TSequenceConfig {
    pub measure: MeasureConfig,
    pub point: String,
    pub n_max: u64,
    pub tol: String,
}

impl Default for TSequenceConfig {
    fn default() -> Self {
        TSequenceConfig {
            measure: MeasureConfig::Lebesgue,
            point: "0".into(),
            n_max: 100,
            tol: "1/1000000000000".into(),
        }
    }
}

/// The brute-force oracle suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSuiteConfig {
    pub seed: u64,
    pub bits: u32,
    pub hit_horizon: u64,
    pub union_points: u64,
    pub grid_resolution: String,
}

impl Default for OracleSuiteConfig {
    fn default() -> Self {
        OracleSuiteConfig {
            seed: 4242,
            bits: 128,
            hit_horizon: 1000,
            union_points: 1_000_000,
            grid_resolution: "1/1000000".into(),
        }
    }
}

/// A full experiment description: subcommand plus its parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentConfig {
    KgsVerify(KgsVerifyConfig),
    MstpExpanding(MstpExpandingConfig),
    SimultExpanding(SimultExpandingConfig),
    RotationCounterexample(RotationCounterexampleConfig),
    DenjoyCounterexample(DenjoyCounterexampleConfig),
    ClassifySupport(ClassifySupportConfig),
    TSequence(TSequenceConfig),
    OracleSuite(OracleSuiteConfig),
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::KgsVerify(_) => "kgs-verify",
            ExperimentConfig::MstpExpanding(_) => "mstp-expanding",
            ExperimentConfig::SimultExpanding(_) => "simult-expanding",
            ExperimentConfig::RotationCounterexample(_) => "rotation-counterexample",
            ExperimentConfig::DenjoyCounterexample(_) => "denjoy-counterexample",
            ExperimentConfig::ClassifySupport(_) => "classify-support",
            ExperimentConfig::TSequence(_) => "t-sequence",
            ExperimentConfig::OracleSuite(_) => "oracle-suite",
        }
    }
}

/// Flag-level overrides applied on top of a loaded config; flag names
/// mirror the config field paths.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub samples: Option<u32>,
    pub seed: Option<u64>,
    pub bits: Option<u32>,
    pub backend: Option<BackendConfig>,
}

impl ExperimentConfig {
    pub fn apply_overrides(&mut self, o: &Overrides) {
        match self {
            ExperimentConfig::KgsVerify(c) => {
                if let Some(v) = o.horizon {
                    c.horizon = v;
                    c.checkpoints.clear();
                }
                if let Some(v) = o.samples {
                    c.samples = v;
                }
                if let Some(v) = o.seed {
                    c.seed = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
                if let Some(v) = o.backend {
                    c.backend = v;
                }
            }
            ExperimentConfig::MstpExpanding(c) => {
                if let Some(v) = o.horizon {
                    c.horizon = v;
                    c.checkpoints.clear();
                }
                if let Some(v) = o.samples {
                    c.samples = v;
                }
                if let Some(v) = o.seed {
                    c.seed = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
                if let Some(v) = o.backend {
                    c.backend = v;
                }
            }
            ExperimentConfig::SimultExpanding(c) => {
                if let Some(v) = o.horizon {
                    c.horizon = v;
                }
                if let Some(v) = o.samples {
                    c.samples = v;
                }
                if let Some(v) = o.seed {
                    c.seed = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
                if let Some(v) = o.backend {
                    c.backend = v;
                }
            }
            ExperimentConfig::RotationCounterexample(c) => {
                if let Some(v) = o.horizon {
                    c.count = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
            }
            ExperimentConfig::DenjoyCounterexample(c) => {
                if let Some(v) = o.horizon {
                    c.count = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
            }
            ExperimentConfig::ClassifySupport(_) | ExperimentConfig::TSequence(_) => {}
            ExperimentConfig::OracleSuite(c) => {
                if let Some(v) = o.seed {
                    c.seed = v;
                }
                if let Some(v) = o.bits {
                    c.bits = v;
                }
                if let Some(v) = o.horizon {
                    c.hit_horizon = v;
                }
            }
        }
    }
}

/// Five log-spaced checkpoints from `horizon / 100` up to `horizon`.
pub fn default_checkpoints(horizon: u64) -> Vec<u64> {
    let lo = (horizon / 100).max(10) as f64;
    let hi = horizon as f64;
    let mut out: Vec<u64> = (0..5)
        .map(|i| (lo * (hi / lo).powf(i as f64 / 4.0)).round() as u64)
        .collect();
    out.dedup();
    if *out.last().expect("five points") != horizon {
        *out.last_mut().expect("five points") = horizon;
    }
    out
}

/// Parse a point given per-coordinate rational strings.
pub fn parse_point(coords: &[String], backend: Backend) -> Result<crate::circle::TorusPoint> {
    let mut pts = Vec::with_capacity(coords.len());
    for c in coords {
        let r = parse_rational(c)?;
        if r.is_negative() {
            return Err(Error::Config(format!("point coordinate {c} is negative")));
        }
        pts.push(match backend {
            Backend::Rational => crate::circle::CirclePoint::from_rational(r),
            Backend::Fixed { bits } => crate::circle::CirclePoint::fixed_from_rational(&r, bits),
        });
    }
    crate::circle::TorusPoint::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_forms() {
        assert_eq!(parse_rational("1/3").unwrap().to_string(), "1/3");
        assert_eq!(parse_rational("0.25").unwrap().to_string(), "1/4");
        assert_eq!(parse_rational("-0.5").unwrap().to_string(), "-1/2");
        assert_eq!(parse_rational("7").unwrap().to_string(), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::KgsVerify(KgsVerifyConfig::default());
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{ "experiment": "kgs-verify", "horizon": 10, "bogus": 1 }"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }

    #[test]
    fn checkpoints_cover_the_named_decades() {
        assert_eq!(
            default_checkpoints(100_000),
            vec![1000, 3162, 10_000, 31_623, 100_000]
        );
    }
}
