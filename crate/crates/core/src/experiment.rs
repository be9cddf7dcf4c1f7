//! The empirical verdicts: hit counting `N(h; alpha)` against the counting
//! profile `Psi(h)`, Monte Carlo ratio statistics over seeded samples, exact
//! tail-union measures of pulled-back ball sequences, the error-exponent
//! regression, and brute-force cross-checks.
//!
//! Hot loops run on the fixed backend with incremental finite-difference
//! orbits (exact in the dyadic domain); the independent oracle path
//! recomputes every orbit point from scratch through the public action.

use crate::circle::{
    ball_contains, merge_pieces, union_pieces, Arc as Ball, CirclePoint, TorusPoint,
};
use crate::error::{Error, Result};
use crate::measure::CircleMeasure;
use crate::numeric::{self, Backend};
use crate::radius::{eval_poly, RadiusSequence};
use crate::system::SystemSpec;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// Reproducible sampling plan: per-sample seeds are a pure function of the
/// master seed and the sample index.
#[derive(Clone, Copy, Debug)]
pub struct SampleSpec {
    pub samples: u32,
    /// Random bits per coordinate (also the fixed-point budget).
    pub bits: u32,
    pub master_seed: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SampleSpec {
    pub fn seed_for(&self, index: u32) -> u64 {
        splitmix64(self.master_seed ^ splitmix64(u64::from(index).wrapping_add(1)))
    }

    fn rng_for(&self, index: u32) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(self.seed_for(index))
    }

    /// Uniform point on `T^dim` with `bits` random bits per coordinate.
    /// Dyadics that reduce to a denominator at or below 10^6 are resampled;
    /// they sit in the measure-zero exceptional set of the equidistribution
    /// statements and must never be drawn.
    pub fn sample_point(&self, index: u32, dim: usize) -> TorusPoint {
        let mut rng = self.rng_for(index);
        let coords = (0..dim)
            .map(|_| loop {
                let v = random_bits(&mut rng, self.bits);
                if v.is_zero() {
                    continue;
                }
                let reduced_denom_bits = u64::from(self.bits)
                    - v.trailing_zeros().unwrap_or(0).min(u64::from(self.bits));
                if reduced_denom_bits < 21 {
                    continue;
                }
                return CirclePoint::fixed_from_bits(v, self.bits);
            })
            .collect();
        TorusPoint::new(coords).expect("dim >= 1")
    }
}

fn random_bits(rng: &mut ChaCha12Rng, bits: u32) -> BigUint {
    let words = bits.div_ceil(32);
    let mut digits = Vec::with_capacity(words as usize);
    for _ in 0..words {
        digits.push(rng.next_u32());
    }
    let mut v = BigUint::new(digits);
    let excess = u64::from(words) * 32 - u64::from(bits);
    if excess > 0 {
        v >>= excess;
    }
    v
}

/// The quantitative counting profile: `psi(q)` is the product over
/// coordinates of the ball measures at the curve's radius, `Psi(h)` the
/// partial sum. Exact rational arithmetic.
#[derive(Clone, Debug)]
pub struct CountingProfile {
    pub psi: Vec<BigRational>,
    pub total: BigRational,
}

/// `psi(q) = prod_j mu(B(x_j, r at curve point q))` for `q <= h`, under the
/// product of the given per-coordinate measures.
pub fn counting_profile(
    measures: &[CircleMeasure],
    x: &TorusPoint,
    seq: &RadiusSequence,
    horizon: u64,
) -> Result<CountingProfile> {
    if measures.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: measures.len(),
        });
    }
    require_counting_sequence(seq)?;
    let mut psi = Vec::new();
    for entry in seq.support(horizon) {
        let mut mass = BigRational::one();
        for (j, m) in measures.iter().enumerate() {
            mass *= m.ball_measure(x.coord(j), &entry.radius);
        }
        psi.push(mass);
    }
    let total = numeric::sum_rationals(psi.clone());
    Ok(CountingProfile { psi, total })
}

fn require_counting_sequence(seq: &RadiusSequence) -> Result<()> {
    if seq.polynomial_spec().is_some() || seq.is_monotone_class() {
        Ok(())
    } else {
        Err(Error::UnsupportedSequence(
            "counting runs need a polynomial-supported or monotone sequence".into(),
        ))
    }
}

/// Result of one hit-counting run.
#[derive(Clone, Debug)]
pub struct HitCountResult {
    pub horizon: u64,
    pub count: u64,
    /// `Psi(h)` as f64 (the exact value is available via `counting_profile`).
    pub psi: f64,
    pub ratio: f64,
    /// Ordinals `q` of the hits, when requested.
    pub hits: Option<Vec<u64>>,
}

/// Count the `q <= h` with `T^{g(q)}(alpha)` inside the product ball of
/// radius `r(q)` around `x`. For rotations the event is
/// `alpha + n theta in B(x, r_n)` over `n <= h`.
pub fn hit_count(
    system: &SystemSpec,
    alpha: &TorusPoint,
    x: &TorusPoint,
    seq: &RadiusSequence,
    horizon: u64,
    want_hits: bool,
) -> Result<HitCountResult> {
    let plan = CountPlan::build(system, x, seq, &[horizon])?;
    let out = plan.run(alpha, want_hits)?;
    Ok(HitCountResult {
        horizon,
        count: out.counts[0],
        psi: plan.psi_at[0],
        ratio: if plan.psi_at[0] > 0.0 {
            out.counts[0] as f64 / plan.psi_at[0]
        } else {
            f64::NAN
        },
        hits: out.hits,
    })
}

/// Independent oracle: literal double loop over support entries, computing
/// each orbit point from scratch through the public semigroup action.
/// Capped because it is quadratic-ish in spirit and meant for cross-checks.
pub fn naive_hit_count(
    system: &SystemSpec,
    alpha: &TorusPoint,
    x: &TorusPoint,
    seq: &RadiusSequence,
    horizon: u64,
) -> Result<u64> {
    const NAIVE_CAP: u64 = 2_000;
    if horizon > NAIVE_CAP {
        return Err(Error::InvalidParameter(format!(
            "naive enumeration is capped at horizon {NAIVE_CAP}"
        )));
    }
    let mut count = 0u64;
    for entry in seq.support(horizon) {
        let image = system.forward(&entry.index, alpha)?;
        let mut inside = true;
        for j in 0..x.dim() {
            let ball = Ball::new(x.coord(j).clone(), entry.radius.clone());
            if !ball_contains(&ball, image.coord(j)) {
                inside = false;
                break;
            }
        }
        if inside {
            count += 1;
        }
    }
    Ok(count)
}

/// Shared, alpha-independent part of a counting run: per-ordinal radius
/// thresholds in the dyadic domain, the f64 profile at each checkpoint, and
/// the orbit recipe.
struct CountPlan {
    checkpoints: Vec<u64>,
    psi_at: Vec<f64>,
    start: u64,
    /// Membership thresholds per ordinal: dist < num/den tested as
    /// `d * den < num << bits`. `None` marks radius zero.
    thresholds: Vec<Option<(BigUint, BigUint)>>,
    orbit: OrbitRecipe,
    targets: Vec<BigRational>,
    dim: usize,
}

enum OrbitRecipe {
    /// Expanding action along polynomial curves (identity for the scalar
    /// multiplicative case): one polynomial per coordinate.
    Poly(Vec<Vec<BigInt>>),
    /// Additive rotation orbit.
    Rotation(CirclePoint),
}

struct CountOutcome {
    counts: Vec<u64>,
    hits: Option<Vec<u64>>,
}

impl CountPlan {
    fn build(
        system: &SystemSpec,
        x: &TorusPoint,
        seq: &RadiusSequence,
        checkpoints: &[u64],
    ) -> Result<CountPlan> {
        if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "checkpoints must be strictly increasing and nonempty".into(),
            ));
        }
        let horizon = *checkpoints.last().expect("nonempty");
        if x.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                got: x.dim(),
            });
        }

        let (orbit, start) = match system {
            SystemSpec::MultExpanding => {
                require_counting_sequence(seq)?;
                if seq.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: seq.dim(),
                    });
                }
                let (polys, start) = match seq.polynomial_spec() {
                    Some(spec) => (spec.coefficients().to_vec(), spec.start()),
                    None => (vec![vec![BigInt::zero(), BigInt::one()]], 1),
                };
                (OrbitRecipe::Poly(polys), start)
            }
            SystemSpec::SimultExpanding { dim } => {
                let spec = seq.polynomial_spec().ok_or_else(|| {
                    Error::UnsupportedSequence(
                        "the simultaneous action needs a polynomial-supported sequence".into(),
                    )
                })?;
                if spec.dim() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: spec.dim(),
                    });
                }
                (
                    OrbitRecipe::Poly(spec.coefficients().to_vec()),
                    spec.start(),
                )
            }
            SystemSpec::Rotation { theta } => {
                require_counting_sequence(seq)?;
                (OrbitRecipe::Rotation(theta.clone()), 1)
            }
            SystemSpec::Denjoy(_) => {
                return Err(Error::UnsupportedSequence(
                    "hit counting over Denjoy maps is not part of the counting experiments".into(),
                ))
            }
        };

        // Per-ordinal thresholds and the cumulative f64 profile.
        let entries = seq.support(horizon);
        let mut thresholds: Vec<Option<(BigUint, BigUint)>> =
            vec![None; (horizon - start + 1) as usize];
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut psi_at = Vec::with_capacity(checkpoints.len());
        let mut cumulative = 0.0f64;
        let mut cp_iter = checkpoints.iter().peekable();
        let mut last_ordinal = start.saturating_sub(1);
        let push_until =
            |ordinal: u64,
             cumulative: f64,
             psi_at: &mut Vec<f64>,
             cp_iter: &mut std::iter::Peekable<std::slice::Iter<u64>>| {
                while let Some(&&cp) = cp_iter.peek() {
                    if cp < ordinal {
                        psi_at.push(cumulative);
                        cp_iter.next();
                    } else {
                        break;
                    }
                }
            };
        for entry in &entries {
            push_until(entry.ordinal, cumulative, &mut psi_at, &mut cp_iter);
            let r = if entry.radius > half {
                half.clone()
            } else {
                entry.radius.clone()
            };
            let slot = (entry.ordinal - start) as usize;
            thresholds[slot] = Some((r.denom().magnitude().clone(), r.numer().magnitude().clone()));
            let mu = (2.0 * numeric::rational_to_f64(&r)).min(1.0);
            cumulative += mu.powi(x.dim() as i32);
            last_ordinal = entry.ordinal;
        }
        push_until(u64::MAX, cumulative, &mut psi_at, &mut cp_iter);
        let _ = last_ordinal;

        Ok(CountPlan {
            checkpoints: checkpoints.to_vec(),
            psi_at,
            start,
            thresholds,
            orbit,
            targets: x.coords().iter().map(|c| c.to_rational()).collect(),
            dim: x.dim(),
        })
    }

    fn run(&self, alpha: &TorusPoint, want_hits: bool) -> Result<CountOutcome> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: alpha.dim(),
            });
        }
        match alpha.backend() {
            Backend::Fixed { bits } => self.run_fixed(alpha, bits, want_hits),
            Backend::Rational => self.run_rational(alpha, want_hits),
        }
    }

    /// Exact dyadic kernel: finite-difference orbit registers mod `2^bits`,
    /// one threshold comparison per coordinate per ordinal.
    fn run_fixed(&self, alpha: &TorusPoint, bits: u32, want_hits: bool) -> Result<CountOutcome> {
        let modulus = BigUint::one() << bits;
        let mask = &modulus - BigUint::one();
        let horizon = *self.checkpoints.last().expect("nonempty");

        // Orbit state per coordinate.
        let mut orbits: Vec<Vec<BigUint>> = Vec::with_capacity(self.dim);
        match &self.orbit {
            OrbitRecipe::Poly(polys) => {
                for (j, poly) in polys.iter().enumerate() {
                    let a = alpha_numer(alpha, j, bits)?;
                    // Registers der finite differences of f(q) = a P(q) mod 2^bits,
                    // initialized from the first deg+1 curve values.
                    let deg = poly.len().saturating_sub(1).max(1);
                    let mut values: Vec<BigUint> = (0..=deg as u64)
                        .map(|offset| {
                            let p = eval_poly(poly, &BigUint::from(self.start + offset));
                            let p = p.to_biguint().expect("positive on the curve");
                            (&a * p) & &mask
                        })
                        .collect();
                    let mut regs = Vec::with_capacity(values.len());
                    // Iterated wrapping differences: regs[i] = Delta^i f(start).
                    while !values.is_empty() {
                        regs.push(values[0].clone());
                        values = values
                            .windows(2)
                            .map(|w| (&modulus + &w[1] - &w[0]) & &mask)
                            .collect();
                    }
                    orbits.push(regs);
                }
            }
            OrbitRecipe::Rotation(theta) => {
                let a = alpha_numer(alpha, 0, bits)?;
                let t = match theta.backend() {
                    Backend::Fixed { bits: tb } if tb == bits => {
                        numeric::quantize(&theta.to_rational(), bits)
                    }
                    Backend::Rational => numeric::quantize(&theta.to_rational(), bits),
                    _ => {
                        return Err(Error::BackendMismatch);
                    }
                };
                // regs = [current, step]: plain additive orbit.
                orbits.push(vec![(&a + &t) & &mask, t]);
            }
        }

        let targets: Vec<BigUint> = self
            .targets
            .iter()
            .map(|t| numeric::quantize(t, bits))
            .collect();

        let mut counts = Vec::with_capacity(self.checkpoints.len());
        let mut count = 0u64;
        let mut hits = want_hits.then(Vec::new);
        let mut cp_iter = self.checkpoints.iter().peekable();
        for q in self.start..=horizon {
            while let Some(&&cp) = cp_iter.peek() {
                if cp < q {
                    counts.push(count);
                    cp_iter.next();
                } else {
                    break;
                }
            }
            if let Some(Some((den, num))) = self.thresholds.get((q - self.start) as usize) {
                let mut inside = true;
                for (j, regs) in orbits.iter().enumerate() {
                    let v = &regs[0];
                    let t = &targets[j];
                    let d_raw = if v >= t { v - t } else { &modulus + v - t };
                    let d = (&d_raw).min(&(&modulus - &d_raw)).clone();
                    // dist < r  <=>  d * den < num << bits (exact integers).
                    if d * den >= (num.clone() << bits) {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    count += 1;
                    if let Some(h) = hits.as_mut() {
                        h.push(q);
                    }
                }
            }
            // Advance every orbit to ordinal q + 1.
            for regs in orbits.iter_mut() {
                for i in 0..regs.len() - 1 {
                    let next = (&regs[i] + &regs[i + 1]) & &mask;
                    regs[i] = next;
                }
            }
        }
        while cp_iter.next().is_some() {
            counts.push(count);
        }
        Ok(CountOutcome { counts, hits })
    }

    /// Exact rational fallback used with the rational backend; recomputes
    /// each orbit point through the public action.
    fn run_rational(&self, alpha: &TorusPoint, want_hits: bool) -> Result<CountOutcome> {
        let horizon = *self.checkpoints.last().expect("nonempty");
        let mut counts = Vec::with_capacity(self.checkpoints.len());
        let mut count = 0u64;
        let mut hits = want_hits.then(Vec::new);
        let mut cp_iter = self.checkpoints.iter().peekable();
        for q in self.start..=horizon {
            while let Some(&&cp) = cp_iter.peek() {
                if cp < q {
                    counts.push(count);
                    cp_iter.next();
                } else {
                    break;
                }
            }
            if let Some(Some((den, num))) = self.thresholds.get((q - self.start) as usize) {
                let radius = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
                let image: Vec<BigRational> = match &self.orbit {
                    OrbitRecipe::Poly(polys) => polys
                        .iter()
                        .enumerate()
                        .map(|(j, poly)| {
                            let p = eval_poly(poly, &BigUint::from(q));
                            numeric::frac_mod_one(
                                &(alpha.coord(j).to_rational() * BigRational::from_integer(p)),
                            )
                        })
                        .collect(),
                    OrbitRecipe::Rotation(theta) => {
                        let shift =
                            theta.to_rational() * BigRational::from_integer(BigInt::from(q));
                        vec![numeric::frac_mod_one(
                            &(alpha.coord(0).to_rational() + shift),
                        )]
                    }
                };
                let inside = image.iter().zip(&self.targets).all(|(p, t)| {
                    let d = circle_dist_rat(p, t);
                    d < radius
                });
                if inside {
                    count += 1;
                    if let Some(h) = hits.as_mut() {
                        h.push(q);
                    }
                }
            }
        }
        while cp_iter.next().is_some() {
            counts.push(count);
        }
        Ok(CountOutcome { counts, hits })
    }
}

fn alpha_numer(alpha: &TorusPoint, j: usize, bits: u32) -> Result<BigUint> {
    match alpha.coord(j).backend() {
        Backend::Fixed { bits: b } if b == bits => {
            Ok(numeric::quantize(&alpha.coord(j).to_rational(), bits))
        }
        _ => Err(Error::BackendMismatch),
    }
}

fn circle_dist_rat(a: &BigRational, b: &BigRational) -> BigRational {
    let d = numeric::frac_mod_one(&(a - b));
    let c = BigRational::one() - &d;
    if d <= c {
        d
    } else {
        c
    }
}

/// Order statistics of a sample, computed on the index-sorted values so the
/// output is identical under any parallel evaluation order.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
    pub min: f64,
    pub max: f64,
}

pub fn stats_of(values: &[f64]) -> Stats {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let pick = |p: f64| -> f64 {
        let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
        sorted[idx]
    };
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    } else {
        sorted[sorted.len() / 2]
    };
    Stats {
        mean,
        median,
        q10: pick(0.1),
        q90: pick(0.9),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    }
}

/// One sample of a Monte Carlo counting trial.
#[derive(Clone, Debug)]
pub struct KgsSample {
    pub index: u32,
    pub seed: u64,
    /// Hit counts at each checkpoint.
    pub counts: Vec<u64>,
    /// Per-sample fitted error exponent, when the fit is nondegenerate.
    pub slope: Option<f64>,
}

/// Monte Carlo verdict data for the quantitative counting law.
#[derive(Clone, Debug)]
pub struct KgsTrial {
    pub checkpoints: Vec<u64>,
    /// `Psi` at each checkpoint (f64; the windows tested are O(10%)).
    pub psi: Vec<f64>,
    pub per_sample: Vec<KgsSample>,
    /// `N / Psi` at the final checkpoint.
    pub ratio: Stats,
    /// `(N - Psi) / sqrt(Psi)` at the final checkpoint.
    pub normalized_error: Stats,
    /// Median of the per-sample fitted error exponents.
    pub slope_median: Option<f64>,
    /// True when `Psi(h) < 5`: statistics are reported but carry no verdict.
    pub underpowered: bool,
}

/// Seeded Monte Carlo trial: draw `samples.samples` uniform base points,
/// count hits along each orbit at every checkpoint, and aggregate ratio and
/// error statistics. Deterministic for a fixed master seed, including under
/// parallel evaluation (samples are reduced in index order).
pub fn kgs_trial(
    system: &SystemSpec,
    x: &TorusPoint,
    seq: &RadiusSequence,
    checkpoints: &[u64],
    samples: &SampleSpec,
) -> Result<KgsTrial> {
    if samples.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let plan = CountPlan::build(system, x, seq, checkpoints)?;
    let psi = plan.psi_at.clone();
    let final_psi = *psi.last().expect("nonempty checkpoints");

    let outcomes: Vec<KgsSample> = (0..samples.samples)
        .into_par_iter()
        .map(|i| {
            let alpha = samples.sample_point(i, plan.dim);
            let out = plan.run(&alpha, false)?;
            let data: Vec<(u64, f64, f64)> = plan
                .checkpoints
                .iter()
                .zip(&out.counts)
                .zip(&psi)
                .map(|((h, n), p)| (*h, *n as f64, *p))
                .collect();
            let slope = match error_exponent_fit(&data) {
                FitOutcome::Fit(f) => Some(f.slope),
                FitOutcome::Degenerate { .. } => None,
            };
            Ok(KgsSample {
                index: i,
                seed: samples.seed_for(i),
                counts: out.counts,
                slope,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ratios: Vec<f64> = outcomes
        .iter()
        .map(|s| *s.counts.last().expect("counts per checkpoint") as f64 / final_psi)
        .collect();
    let norm_errors: Vec<f64> = outcomes
        .iter()
        .map(|s| (*s.counts.last().expect("nonempty") as f64 - final_psi) / final_psi.sqrt())
        .collect();
    let slopes: Vec<f64> = outcomes.iter().filter_map(|s| s.slope).collect();
    let slope_median = if slopes.is_empty() {
        None
    } else {
        Some(stats_of(&slopes).median)
    };

    Ok(KgsTrial {
        checkpoints: plan.checkpoints.clone(),
        psi,
        ratio: stats_of(&ratios),
        normalized_error: stats_of(&norm_errors),
        per_sample: outcomes,
        slope_median,
        underpowered: final_psi < 5.0,
    })
}

/// Fraction of samples whose final hit count reaches `threshold`: the
/// finite-horizon proxy for "hits infinitely often".
pub fn fraction_hitting_at_least(trial: &KgsTrial, threshold: u64) -> f64 {
    let hits = trial
        .per_sample
        .iter()
        .filter(|s| *s.counts.last().expect("nonempty") >= threshold)
        .count();
    hits as f64 / trial.per_sample.len() as f64
}

/// Exact measure of a finite tail union `union_{k=l}^{K} f^{-n_k} B(x, r_k)`
/// under a reference measure.
#[derive(Clone, Debug)]
pub struct TailUnionResult {
    pub tail_start: u64,
    pub horizon: u64,
    /// Measure of the union (exact rational).
    pub measure: BigRational,
    /// Subadditive upper bound: the sum of the member measures.
    pub upper_bound: BigRational,
    pub arcs: usize,
}

/// Compute tail-union measures for every `l` in the schedule at a fixed
/// horizon `K`. Preimage intervals are computed once; each tail is an exact
/// sweep over the surviving pieces.
///
/// Rotations with a fixed-point angle under the Lebesgue reference, and
/// Denjoy systems under their own invariant measure, run on the keyed
/// integer sweep (exact and far faster at large horizons); everything else
/// takes the generic rational path with per-endpoint CDF caching.
pub fn tail_union_schedule(
    system: &SystemSpec,
    x: &CirclePoint,
    seq: &RadiusSequence,
    tail_starts: &[u64],
    horizon: u64,
    reference: &CircleMeasure,
) -> Result<Vec<TailUnionResult>> {
    if !system.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let entries = seq.support(horizon);
    for &l in tail_starts {
        if l > horizon {
            return Err(Error::InvalidParameter(format!(
                "tail start {l} exceeds horizon {horizon}"
            )));
        }
    }
    if let Some(results) = tail_union_fast(system, x, &entries, tail_starts, horizon, reference)? {
        return Ok(results);
    }
    // Preimage pieces and per-arc masses, indexed by ordinal.
    let mut pieces_by_k: Vec<(u64, Vec<(BigRational, BigRational)>)> = Vec::new();
    for entry in &entries {
        let ball = Ball::new(x.clone(), entry.radius.clone());
        let pre = system.preimage_ball(entry.index.scalar_value(), &ball)?;
        pieces_by_k.push((entry.ordinal, pre.pieces()));
    }
    let mut cdf_cache: HashMap<BigRational, BigRational> = HashMap::new();
    let mut cached_cdf = |m: &CircleMeasure, v: &BigRational| -> BigRational {
        if let Some(hit) = cdf_cache.get(v) {
            return hit.clone();
        }
        let out = m.cdf(v);
        cdf_cache.insert(v.clone(), out.clone());
        out
    };

    let mut results = Vec::with_capacity(tail_starts.len());
    for &l in tail_starts {
        let mut pieces = Vec::new();
        let mut upper = BigRational::zero();
        let mut arcs = 0usize;
        for (ordinal, ps) in &pieces_by_k {
            if *ordinal < l {
                continue;
            }
            arcs += 1;
            for (lo, hi) in ps {
                upper += cached_cdf(reference, hi) - cached_cdf(reference, lo);
                pieces.push((lo.clone(), hi.clone()));
            }
        }
        let merged = merge_pieces(pieces);
        let mut measure = BigRational::zero();
        for (lo, hi) in &merged {
            measure += cached_cdf(reference, hi) - cached_cdf(reference, lo);
        }
        results.push(TailUnionResult {
            tail_start: l,
            horizon,
            measure,
            upper_bound: upper,
            arcs,
        });
    }
    Ok(results)
}

/// Keyed integer sweep for the two reference setups; `None` when the
/// inputs do not fit a fast path.
fn tail_union_fast(
    system: &SystemSpec,
    x: &CirclePoint,
    entries: &[crate::radius::SupportEntry],
    tail_starts: &[u64],
    horizon: u64,
    reference: &CircleMeasure,
) -> Result<Option<Vec<TailUnionResult>>> {
    use crate::sweep;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    let arcs: Vec<(u64, Vec<sweep::SweepPiece>)>;
    let bits;
    match system {
        SystemSpec::Rotation { theta } => {
            let Some((_, b)) = theta.fixed_parts() else {
                return Ok(None);
            };
            if !reference.is_lebesgue() {
                return Ok(None);
            }
            let Some((_, xb)) = x.fixed_parts() else {
                return Ok(None);
            };
            if xb != b {
                return Ok(None);
            }
            bits = b;
            let mut out = Vec::with_capacity(entries.len());
            for e in entries {
                let shift = theta.mul_int(e.index.scalar_value())?;
                let center = x.sub(&shift)?;
                let (v, _) = center.fixed_parts().expect("fixed backend");
                out.push((e.ordinal, sweep::rotation_arc_pieces(v, bits, &e.radius)));
            }
            arcs = out;
        }
        SystemSpec::Denjoy(sys) => {
            if !sys.has_fixed_backend() {
                return Ok(None);
            }
            let Some(ref_sys) = reference.denjoy_system() else {
                return Ok(None);
            };
            if !std::sync::Arc::ptr_eq(ref_sys, sys) {
                return Ok(None);
            }
            let Backend::Rational = x.backend() else {
                return Ok(None);
            };
            let xr = x.to_rational();
            if xr.denom().bits() > 64 {
                return Ok(None);
            }
            let (_, b) = sys.theta().fixed_parts().expect("fixed backend");
            bits = b;
            let mut out = Vec::with_capacity(entries.len());
            for e in entries {
                let r = &e.radius;
                let pieces = if r.is_zero() {
                    Vec::new()
                } else if *r >= half {
                    sweep::full_circle_piece(bits)
                } else {
                    let back = e.index.scalar_value();
                    let u_lo = numeric::frac_mod_one(&(&xr - r));
                    let u_hi = numeric::frac_mod_one(&(&xr + r));
                    let lo = sys.sweep_endpoint(&u_lo, back).expect("fixed backend");
                    let hi = sys.sweep_endpoint(&u_hi, back).expect("fixed backend");
                    sweep::arc_pieces(lo, hi, bits)
                };
                out.push((e.ordinal, pieces));
            }
            arcs = out;
        }
        _ => return Ok(None),
    }

    let mut results = Vec::with_capacity(tail_starts.len());
    for &l in tail_starts {
        let refs: Vec<&sweep::SweepPiece> = arcs
            .iter()
            .filter(|(ordinal, _)| *ordinal >= l)
            .flat_map(|(_, pieces)| pieces.iter())
            .collect();
        let count = arcs.iter().filter(|(ordinal, _)| *ordinal >= l).count();
        let (measure, upper_bound) = sweep::measure_union(&refs, bits);
        results.push(TailUnionResult {
            tail_start: l,
            horizon,
            measure,
            upper_bound,
            arcs: count,
        });
    }
    Ok(Some(results))
}

/// Single tail union (see [`tail_union_schedule`]).
pub fn tail_union_measure(
    system: &SystemSpec,
    x: &CirclePoint,
    seq: &RadiusSequence,
    tail_start: u64,
    horizon: u64,
    reference: &CircleMeasure,
) -> Result<TailUnionResult> {
    Ok(
        tail_union_schedule(system, x, seq, &[tail_start], horizon, reference)?
            .into_iter()
            .next()
            .expect("one schedule entry"),
    )
}

/// Least-squares fit of `log |N - Psi|` against `log Psi`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug)]
pub enum FitOutcome {
    Fit(ExponentFit),
    Degenerate { reason: String },
}

/// Fit the error exponent from `(h, N, Psi)` triples. Points need `Psi > 1`
/// and `N != Psi`; fewer than 5 usable points is a degenerate report, not a
/// fit.
pub fn error_exponent_fit(data: &[(u64, f64, f64)]) -> FitOutcome {
    let usable: Vec<(f64, f64)> = data
        .iter()
        .filter(|(_, n, psi)| *psi > 1.0 && (n - psi).abs() > 0.0)
        .map(|(_, n, psi)| (psi.ln(), (n - psi).abs().ln()))
        .collect();
    if usable.len() < 5 {
        return FitOutcome::Degenerate {
            reason: format!(
                "{} usable points (need 5): requires Psi > 1 and N != Psi",
                usable.len()
            ),
        };
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return FitOutcome::Degenerate {
            reason: "all abscissae coincide".into(),
        };
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (usable
        .iter()
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    FitOutcome::Fit(ExponentFit {
        slope,
        intercept,
        residual,
        points: usable.len(),
    })
}

/// Brute-force cross-checks, each comparing a production path against an
/// independent method on a desk-scale instance.
pub enum OracleCheck {
    /// `hit_count` against the literal double-loop enumeration (h <= 1000).
    HitCount {
        system: SystemSpec,
        alpha: TorusPoint,
        x: TorusPoint,
        seq: RadiusSequence,
        horizon: u64,
    },
    /// `union_measure` against Monte Carlo point sampling within 3 sigma.
    UnionMeasure {
        arcs: Vec<Ball>,
        points: u64,
        seed: u64,
    },
    /// `t_sequence` bisection against a dense grid scan.
    TSequence {
        measure: CircleMeasure,
        x: CirclePoint,
        n: u64,
        tol: BigRational,
        grid_resolution: BigRational,
    },
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct OracleReport {
    pub component: String,
    pub pass: bool,
    pub witness: Option<String>,
}

pub fn oracle_check(check: OracleCheck) -> Result<OracleReport> {
    match check {
        OracleCheck::HitCount {
            system,
            alpha,
            x,
            seq,
            horizon,
        } => {
            let fast = hit_count(&system, &alpha, &x, &seq, horizon, false)?;
            let naive = naive_hit_count(&system, &alpha, &x, &seq, horizon)?;
            let pass = fast.count == naive;
            Ok(OracleReport {
                component: "hit_count".into(),
                pass,
                witness: (!pass).then(|| {
                    format!(
                        "fast path counted {}, naive enumeration {}",
                        fast.count, naive
                    )
                }),
            })
        }
        OracleCheck::UnionMeasure { arcs, points, seed } => {
            let exact = crate::circle::union_measure(&arcs);
            let pieces = union_pieces(&arcs);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut inside = 0u64;
            for _ in 0..points {
                let v = BigRational::new(BigInt::from(rng.next_u64()), BigInt::one() << 64);
                let hit = pieces
                    .binary_search_by(|(lo, hi)| {
                        if *hi <= v {
                            std::cmp::Ordering::Less
                        } else if *lo > v {
                            std::cmp::Ordering::Greater
                        } else {
                            std::cmp::Ordering::Equal
                        }
                    })
                    .is_ok();
                if hit {
                    inside += 1;
                }
            }
            let p_hat = inside as f64 / points as f64;
            let mu = numeric::rational_to_f64(&exact);
            let sigma = (mu * (1.0 - mu) / points as f64).sqrt();
            let pass = (p_hat - mu).abs() <= 3.0 * sigma + 1e-9;
            Ok(OracleReport {
                component: "union_measure".into(),
                pass,
                witness: (!pass)
                    .then(|| format!("exact {mu}, sampled {p_hat}, 3 sigma {}", 3.0 * sigma)),
            })
        }
        OracleCheck::TSequence {
            measure,
            x,
            n,
            tol,
            grid_resolution,
        } => {
            let bisected = measure.t_sequence(&x, n, &tol)?;
            // Grid scan: first multiple of the resolution whose ball reaches
            // mass 1/n.
            let target = BigRational::new(BigInt::one(), BigInt::from(n));
            let mut r = BigRational::zero();
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let grid = loop {
                if measure.ball_measure(&x, &r) >= target {
                    break r.clone();
                }
                r += &grid_resolution;
                if r > &half + &grid_resolution {
                    return Err(Error::InvalidParameter(
                        "grid scan ran past radius 1/2 without reaching the target".into(),
                    ));
                }
            };
            let err = (&bisected - &grid).abs();
            let bound = {
                let t2 = &tol + &tol;
                let g2 = &grid_resolution + &grid_resolution;
                if t2 > g2 {
                    t2
                } else {
                    g2
                }
            };
            let pass = err <= bound;
            Ok(OracleReport {
                component: "t_sequence".into(),
                pass,
                witness: (!pass).then(|| format!("bisected {bisected}, grid {grid}")),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::Profile;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_fraction(n, d)
    }

    #[test]
    fn hit_count_mult_expanding_frozen_example() {
        // alpha = 1/3, x = 0, r = 0.1 constant, h = 10: hits at k = 3, 6, 9.
        let sys = SystemSpec::MultExpanding;
        let seq = RadiusSequence::monotone(Profile::Constant { value: rat(1, 10) }).unwrap();
        let out = hit_count(
            &sys,
            &TorusPoint::scalar(pt(1, 3)),
            &TorusPoint::scalar(pt(0, 1)),
            &seq,
            10,
            true,
        )
        .unwrap();
        assert_eq!(out.count, 3);
        assert_eq!(out.hits.unwrap(), vec![3, 6, 9]);
    }

    #[test]
    fn hit_count_rotation_frozen_example() {
        // theta = 1/4, alpha = 0, x = 0, r = 0.1, h = 8: hits at n = 4, 8.
        let sys = SystemSpec::rotation(pt(1, 4));
        let seq = RadiusSequence::monotone(Profile::Constant { value: rat(1, 10) }).unwrap();
        let out = hit_count(
            &sys,
            &TorusPoint::scalar(pt(0, 1)),
            &TorusPoint::scalar(pt(0, 1)),
            &seq,
            8,
            true,
        )
        .unwrap();
        assert_eq!(out.count, 2);
        assert_eq!(out.hits.unwrap(), vec![4, 8]);
    }

    #[test]
    fn zero_radius_never_hits() {
        let sys = SystemSpec::MultExpanding;
        let seq = RadiusSequence::monotone(Profile::Constant { value: rat(0, 1) }).unwrap();
        let out = hit_count(
            &sys,
            &TorusPoint::scalar(pt(1, 3)),
            &TorusPoint::scalar(pt(0, 1)),
            &seq,
            50,
            false,
        )
        .unwrap();
        assert_eq!(out.count, 0);
    }

    #[test]
    fn fixed_kernel_matches_naive_enumeration() {
        let samples = SampleSpec {
            samples: 4,
            bits: 128,
            master_seed: 99,
        };
        let sys = SystemSpec::MultExpanding;
        let seq = RadiusSequence::monotone(Profile::Harmonic { scale: rat(1, 2) }).unwrap();
        let x = TorusPoint::scalar(pt(0, 1));
        for i in 0..4 {
            let alpha = samples.sample_point(i, 1);
            let fast = hit_count(&sys, &alpha, &x, &seq, 500, false).unwrap();
            let naive = naive_hit_count(&sys, &alpha, &x, &seq, 500).unwrap();
            assert_eq!(fast.count, naive, "sample {i}");
        }
    }

    #[test]
    fn fixed_kernel_matches_naive_on_torus_curve() {
        let samples = SampleSpec {
            samples: 3,
            bits: 128,
            master_seed: 7,
        };
        let spec = crate::radius::PolynomialSpec::new(
            vec![
                vec![BigInt::zero(), BigInt::one()],
                vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
            ],
            1,
        )
        .unwrap();
        let seq = RadiusSequence::polynomial_supported(
            spec,
            Profile::InverseRoot {
                scale: rat(1, 2),
                root: 2,
                precision_bits: 128,
            },
        )
        .unwrap();
        let sys = SystemSpec::SimultExpanding { dim: 2 };
        let x = TorusPoint::new(vec![pt(0, 1), pt(0, 1)]).unwrap();
        for i in 0..3 {
            let alpha = samples.sample_point(i, 2);
            let fast = hit_count(&sys, &alpha, &x, &seq, 300, false).unwrap();
            let naive = naive_hit_count(&sys, &alpha, &x, &seq, 300).unwrap();
            assert_eq!(fast.count, naive, "sample {i}");
        }
    }

    #[test]
    fn counting_profile_hand_values() {
        let leb = CircleMeasure::lebesgue();
        let seq = RadiusSequence::monotone(Profile::Harmonic { scale: rat(1, 2) }).unwrap();
        let x = TorusPoint::scalar(pt(0, 1));
        let profile = counting_profile(std::slice::from_ref(&leb), &x, &seq, 4).unwrap();
        assert_eq!(profile.total, rat(25, 12));
        assert_eq!(profile.psi[0], rat(1, 1));
        assert_eq!(profile.psi[3], rat(1, 4));
    }

    #[test]
    fn counting_profile_equals_partial_measure_sum() {
        let leb = CircleMeasure::lebesgue();
        let seq = RadiusSequence::monotone(Profile::Harmonic { scale: rat(1, 3) }).unwrap();
        let x = TorusPoint::scalar(pt(1, 7));
        let profile = counting_profile(std::slice::from_ref(&leb), &x, &seq, 200).unwrap();
        let (sum, _) = seq
            .partial_measure_sum(std::slice::from_ref(&leb), &x, &rat(1, 1), 200)
            .unwrap();
        assert_eq!(profile.total, sum);
    }

    #[test]
    fn exponent_fit_recovers_synthetic_half() {
        let data: Vec<(u64, f64, f64)> = (1..=12)
            .map(|i| {
                let psi = (i as f64) * 25.0;
                (i, psi + psi.sqrt(), psi)
            })
            .collect();
        match error_exponent_fit(&data) {
            FitOutcome::Fit(fit) => {
                assert!((fit.slope - 0.5).abs() < 0.01, "slope {}", fit.slope);
            }
            FitOutcome::Degenerate { reason } => panic!("degenerate: {reason}"),
        }
    }

    #[test]
    fn exponent_fit_degenerates_on_exact_data() {
        let data: Vec<(u64, f64, f64)> = (1..=10).map(|i| (i, i as f64, i as f64)).collect();
        assert!(matches!(
            error_exponent_fit(&data),
            FitOutcome::Degenerate { .. }
        ));
    }

    #[test]
    fn kgs_trial_is_deterministic_and_flags_power() {
        let sys = SystemSpec::MultExpanding;
        let seq = RadiusSequence::monotone(Profile::Harmonic { scale: rat(1, 2) }).unwrap();
        let x = TorusPoint::scalar(pt(0, 1));
        let spec = SampleSpec {
            samples: 8,
            bits: 128,
            master_seed: 12345,
        };
        let a = kgs_trial(&sys, &x, &seq, &[50, 100, 200, 400, 800], &spec).unwrap();
        let b = kgs_trial(&sys, &x, &seq, &[50, 100, 200, 400, 800], &spec).unwrap();
        assert_eq!(a.ratio.mean.to_bits(), b.ratio.mean.to_bits());
        for (sa, sb) in a.per_sample.iter().zip(&b.per_sample) {
            assert_eq!(sa.counts, sb.counts);
        }
        assert!(!a.underpowered);

        // Tiny horizon: Psi < 5 must be flagged underpowered.
        let tiny = kgs_trial(&sys, &x, &seq, &[2, 3, 4, 5, 6], &spec).unwrap();
        assert!(tiny.underpowered);
    }

    #[test]
    fn synthetic_always_hit_ratio_is_h_over_psi() {
        // Constant radius 1/2 covers everything except the antipode, so a
        // generic orbit hits at every index: N = h exactly.
        let sys = SystemSpec::MultExpanding;
        let seq = RadiusSequence::monotone(Profile::Constant { value: rat(1, 2) }).unwrap();
        let x = TorusPoint::scalar(pt(0, 1));
        let spec = SampleSpec {
            samples: 3,
            bits: 128,
            master_seed: 5,
        };
        let trial = kgs_trial(&sys, &x, &seq, &[64], &spec).unwrap();
        for s in &trial.per_sample {
            assert_eq!(*s.counts.last().unwrap(), 64);
        }
        let expect = 64.0 / trial.psi[0];
        assert!((trial.ratio.mean - expect).abs() < 1e-12);
    }

    #[test]
    fn tail_union_is_nonincreasing_and_subadditive() {
        let theta = CirclePoint::golden(256);
        let sys = SystemSpec::rotation(theta.clone());
        let x = CirclePoint::zero(theta.backend());
        let leb = CircleMeasure::lebesgue();
        let times = crate::system::RecurrenceTimes::rotation_convergents(&theta, 20).unwrap();
        let seq = RadiusSequence::counterexample(&leb, &x, &times, &rat(1, 1 << 40)).unwrap();
        let res = tail_union_schedule(&sys, &x, &seq, &[1, 3, 5, 10, 20], 20, &leb).unwrap();
        for pair in res.windows(2) {
            assert!(pair[1].measure <= pair[0].measure);
        }
        for r in &res {
            assert!(r.measure <= r.upper_bound);
        }
        // Single-arc tail: the measure is min(2 r_K, 1).
        let last = res.last().unwrap();
        assert_eq!(last.arcs, 1);
        assert_eq!(last.measure, rat(2, 20));
    }

    #[test]
    fn tail_union_cdf_route_matches_lebesgue_route() {
        let theta = CirclePoint::golden(192);
        let sys = SystemSpec::rotation(theta.clone());
        let x = CirclePoint::zero(theta.backend());
        let leb = CircleMeasure::lebesgue();
        let times = crate::system::RecurrenceTimes::rotation_convergents(&theta, 12).unwrap();
        let seq = RadiusSequence::counterexample(&leb, &x, &times, &rat(1, 1 << 40)).unwrap();
        // Direct-length route.
        let entries = seq.support(12);
        let mut pieces = Vec::new();
        for e in &entries {
            let ball = Ball::new(x.clone(), e.radius.clone());
            let pre = sys.preimage_ball(e.index.scalar_value(), &ball).unwrap();
            pieces.extend(pre.pieces());
        }
        let merged = merge_pieces(pieces);
        let direct: BigRational = merged
            .iter()
            .fold(BigRational::zero(), |acc, (lo, hi)| acc + (hi - lo));
        // CDF route through the experiment op.
        let via_cdf = tail_union_measure(&sys, &x, &seq, 1, 12, &leb).unwrap();
        assert_eq!(via_cdf.measure, direct);
    }

    #[test]
    fn fast_and_generic_tail_sweeps_agree_exactly() {
        // Rotation: the keyed integer sweep (fixed-point x) against the
        // generic rational sweep (rational x at the same value).
        let theta = CirclePoint::golden(256);
        let sys = SystemSpec::rotation(theta.clone());
        let leb = CircleMeasure::lebesgue();
        let times = crate::system::RecurrenceTimes::rotation_convergents(&theta, 15).unwrap();
        let x_fixed = CirclePoint::zero(theta.backend());
        let seq = RadiusSequence::counterexample(&leb, &x_fixed, &times, &rat(1, 1 << 40)).unwrap();
        let ls = [1u64, 4, 9, 15];
        let fast = tail_union_schedule(&sys, &x_fixed, &seq, &ls, 15, &leb).unwrap();
        let x_rat = pt(0, 1);
        let generic = tail_union_schedule(&sys, &x_rat, &seq, &ls, 15, &leb).unwrap();
        for (a, b) in fast.iter().zip(&generic) {
            assert_eq!(a.measure, b.measure, "tail {}", a.tail_start);
            assert_eq!(a.upper_bound, b.upper_bound);
        }
    }

    #[test]
    fn denjoy_fast_sweep_matches_generic() {
        use crate::denjoy::{DenjoyParams, DenjoySystem};
        let bits = 512;
        let sys = std::sync::Arc::new(
            DenjoySystem::build(DenjoyParams {
                theta: CirclePoint::golden(bits),
                gap_scale: rat(1, 6),
                gap_ratio: rat(1, 2),
                n_max: 24,
                tol: rat(1, 1_000_000),
            })
            .unwrap(),
        );
        let system = SystemSpec::denjoy(sys.clone());
        let nu = CircleMeasure::denjoy_invariant(sys.clone());
        let x = pt(0, 1);
        let times = crate::system::RecurrenceTimes::golden_fibonacci(bits, 12).unwrap();
        let seq = RadiusSequence::counterexample(&nu, &x, &times, &rat(1, 1 << 50)).unwrap();
        let ls = [1u64, 3, 7, 12];
        let fast = tail_union_schedule(&system, &x, &seq, &ls, 12, &nu).unwrap();
        // Generic path: a second measure handle to the same system defeats
        // the pointer-equality gate.
        let nu_other = CircleMeasure::custom(
            {
                let sys = sys.clone();
                move |u: &BigRational| sys.collapse_value(u)
            },
            BigRational::zero(),
        );
        let generic = tail_union_schedule(&system, &x, &seq, &ls, 12, &nu_other).unwrap();
        for (a, b) in fast.iter().zip(&generic) {
            assert_eq!(a.measure, b.measure, "tail {}", a.tail_start);
            assert_eq!(a.upper_bound, b.upper_bound);
        }
    }

    #[test]
    fn oracle_union_measure_within_three_sigma() {
        let arcs = vec![
            Ball::new(pt(1, 10), rat(1, 7)),
            Ball::new(pt(1, 2), rat(1, 9)),
            Ball::new(pt(9, 10), rat(1, 5)),
        ];
        let report = oracle_check(OracleCheck::UnionMeasure {
            arcs,
            points: 200_000,
            seed: 42,
        })
        .unwrap();
        assert!(report.pass, "witness: {:?}", report.witness);
    }

    #[test]
    fn oracle_t_sequence_grid_agrees() {
        let report = oracle_check(OracleCheck::TSequence {
            measure: CircleMeasure::lebesgue(),
            x: pt(0, 1),
            n: 7,
            tol: rat(1, 1 << 30),
            grid_resolution: rat(1, 1_000_000),
        })
        .unwrap();
        assert!(report.pass, "witness: {:?}", report.witness);
    }

    #[test]
    fn sample_points_are_reproducible() {
        let spec = SampleSpec {
            samples: 2,
            bits: 128,
            master_seed: 7,
        };
        let a = spec.sample_point(0, 2);
        let b = spec.sample_point(0, 2);
        assert_eq!(a, b);
        let c = spec.sample_point(1, 2);
        assert_ne!(a, c);
    }
}
