//! Radius sequences `r: G -> R_{>=0}` over the acting semigroup, with the
//! constructors the experiments need: weakly decreasing profiles on all of
//! `N`, polynomial-supported sequences on `N^n` (zero off the curve
//! `q -> (P_1(q), ..., P_n(q))`), the counterexample sequence `r_{n_k} = 2 t_k`
//! supported on recurrence times, and scalar multiples.
//!
//! Divergence of the measure-sum condition is never decided numerically:
//! built-in profiles carry an analytic tag, everything else reports partial
//! sums only.

use crate::circle::{CirclePoint, SemigroupIndex, TorusPoint};
use crate::error::{Error, Result};
use crate::measure::CircleMeasure;
use crate::system::RecurrenceTimes;
use num_bigint::{BigInt, BigUint};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A weakly decreasing radius profile `q -> R_q`.
#[derive(Clone, Debug)]
pub enum Profile {
    /// `scale / q`.
    Harmonic { scale: BigRational },
    /// `scale / q^power`.
    InversePower { scale: BigRational, power: u32 },
    /// `scale * q^(-1/root)`, rounded down to `precision_bits` fractional
    /// bits so the value stays rational; rounding down preserves weak
    /// monotonicity.
    InverseRoot {
        scale: BigRational,
        root: u32,
        precision_bits: u32,
    },
    /// Constant radius.
    Constant { value: BigRational },
    /// Explicit table `r(q) = values[q - 1]`, zero past the end.
    Table { values: Vec<BigRational> },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: &BigRational, what: &str| {
            if v.is_negative() {
                Err(Error::InvalidParameter(format!("{what} must be >= 0")))
            } else {
                Ok(())
            }
        };
        match self {
            Profile::Harmonic { scale } => nonneg(scale, "profile scale"),
            Profile::InversePower { scale, power } => {
                if *power == 0 {
                    return Err(Error::InvalidParameter(
                        "inverse-power profile needs power >= 1".into(),
                    ));
                }
                nonneg(scale, "profile scale")
            }
            Profile::InverseRoot { scale, root, .. } => {
                if *root == 0 {
                    return Err(Error::InvalidParameter(
                        "inverse-root profile needs root >= 1".into(),
                    ));
                }
                nonneg(scale, "profile scale")
            }
            Profile::Constant { value } => nonneg(value, "profile value"),
            Profile::Table { values } => {
                for (i, pair) in values.windows(2).enumerate() {
                    if pair[1] > pair[0] {
                        return Err(Error::ProfileNotDecreasing { at: i as u64 + 2 });
                    }
                }
                if let Some(v) = values.iter().find(|v| v.is_negative()) {
                    return Err(Error::InvalidParameter(format!("negative radius {v}")));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, q: &BigUint) -> BigRational {
        if q.is_zero() {
            return BigRational::zero();
        }
        let q_int = BigInt::from(q.clone());
        match self {
            Profile::Harmonic { scale } => scale / BigRational::from_integer(q_int),
            Profile::InversePower { scale, power } => {
                scale / BigRational::from_integer(q_int.pow(*power))
            }
            Profile::InverseRoot {
                scale,
                root,
                precision_bits,
            } => {
                // floor((scale * q^(-1/root)) * 2^p) / 2^p via an integer
                // root: floor of the root-th root of a^root 2^(p root) / (b^root q).
                let a = scale.numer().magnitude();
                let b = scale.denom().magnitude();
                let p = *precision_bits;
                let r = *root;
                let numer = a.pow(r) << (p as u64 * u64::from(r));
                let denom = b.pow(r) * q;
                let inner = numer / denom;
                let v = inner.nth_root(r);
                BigRational::new(BigInt::from(v), BigInt::one() << p)
            }
            Profile::Constant { value } => value.clone(),
            Profile::Table { values } => q
                .to_usize()
                .and_then(|i| values.get(i - 1))
                .cloned()
                .unwrap_or_else(BigRational::zero),
        }
    }

    /// Decay exponent `e` with `R_q ~ q^(-e)`, when the family has one.
    fn decay_exponent(&self) -> Option<BigRational> {
        match self {
            Profile::Harmonic { .. } => Some(BigRational::one()),
            Profile::InversePower { power, .. } => {
                Some(BigRational::from_integer(BigInt::from(*power)))
            }
            Profile::InverseRoot { root, .. } => {
                Some(BigRational::new(BigInt::one(), BigInt::from(*root)))
            }
            Profile::Constant { .. } => Some(BigRational::zero()),
            Profile::Table { .. } => None,
        }
    }
}

/// Integer polynomials `P_1, ..., P_n` and the start index `N_0` of the
/// supported curve.
#[derive(Clone, Debug)]
pub struct PolynomialSpec {
    /// Coefficients per polynomial, ascending degree.
    coeffs: Vec<Vec<BigInt>>,
    start: u64,
}

impl PolynomialSpec {
    /// Validate that every polynomial is nonconstant with positive leading
    /// coefficient, and is `>= 1` and strictly increasing on `q >= start`.
    /// Strict growth is scanned up to the Cauchy root bound of the
    /// derivative and is guaranteed beyond it by derivative positivity.
    pub fn new(coeffs: Vec<Vec<BigInt>>, start: u64) -> Result<PolynomialSpec> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("no polynomials given".into()));
        }
        if start == 0 {
            return Err(Error::InvalidPolynomial("start index must be >= 1".into()));
        }
        let spec = PolynomialSpec { coeffs, start };
        for (j, poly) in spec.coeffs.iter().enumerate() {
            let trimmed = trim_leading_zeros(poly);
            if trimmed.len() < 2 {
                return Err(Error::InvalidPolynomial(format!("P_{} is constant", j + 1)));
            }
            let lead = trimmed.last().expect("nonempty");
            if !lead.is_positive() {
                return Err(Error::InvalidPolynomial(format!(
                    "P_{} has non-positive leading coefficient",
                    j + 1
                )));
            }
            // Cauchy bound for the real roots of P'.
            let deriv: Vec<BigInt> = trimmed
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect();
            let dlead = deriv.last().expect("degree >= 1");
            let max_abs = deriv
                .iter()
                .take(deriv.len() - 1)
                .map(|c| c.magnitude().clone())
                .max()
                .unwrap_or_default();
            let bound = (BigRational::new(BigInt::from(max_abs), dlead.clone())
                + BigRational::from_integer(BigInt::from(2)))
            .ceil()
            .to_integer();
            let scan_to = bound
                .to_u64()
                .ok_or_else(|| Error::InvalidPolynomial("derivative bound overflows".into()))?
                .max(spec.start)
                + 1;
            if scan_to > 10_000_000 {
                return Err(Error::InvalidPolynomial(
                    "derivative root bound too large to certify by scan".into(),
                ));
            }
            let mut prev = eval_poly(poly, &BigUint::from(spec.start));
            if prev < BigInt::one() {
                return Err(Error::InvalidPolynomial(format!(
                    "P_{}({}) = {prev} < 1",
                    j + 1,
                    spec.start
                )));
            }
            for q in spec.start..=scan_to {
                let next = eval_poly(poly, &BigUint::from(q + 1));
                if next <= prev {
                    return Err(Error::InvalidPolynomial(format!(
                        "P_{} is not strictly increasing at q = {q}",
                        j + 1
                    )));
                }
                prev = next;
            }
        }
        Ok(spec)
    }

    /// Identity curve `P(q) = q` starting at 1 (the scalar monotone case).
    pub fn identity() -> PolynomialSpec {
        PolynomialSpec {
            coeffs: vec![vec![BigInt::zero(), BigInt::one()]],
            start: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn coefficients(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    /// The curve point `(P_1(q), ..., P_n(q))`.
    pub fn eval_point(&self, q: u64) -> SemigroupIndex {
        let qb = BigUint::from(q);
        let comps = self
            .coeffs
            .iter()
            .map(|poly| {
                eval_poly(poly, &qb)
                    .to_biguint()
                    .expect("validated positive on the curve")
            })
            .collect();
        SemigroupIndex::new(comps).expect("validated >= 1")
    }

    /// Invert the first coordinate by binary search: the curve parameter `q`
    /// with `eval_point(q) == g`, if any, within `start <= q <= horizon`.
    fn locate(&self, g: &SemigroupIndex, horizon: u64) -> Option<u64> {
        if g.dim() != self.dim() {
            return None;
        }
        let target = BigInt::from(g.components()[0].clone());
        let (mut lo, mut hi) = (self.start, horizon);
        if lo > hi {
            return None;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if eval_poly(&self.coeffs[0], &BigUint::from(mid)) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let q = lo;
        if &self.eval_point(q) == g {
            Some(q)
        } else {
            None
        }
    }
}

fn trim_leading_zeros(poly: &[BigInt]) -> Vec<BigInt> {
    let mut out = poly.to_vec();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

pub(crate) fn eval_poly(poly: &[BigInt], q: &BigUint) -> BigInt {
    let q = BigInt::from(q.clone());
    let mut acc = BigInt::zero();
    for c in poly.iter().rev() {
        acc = acc * &q + c;
    }
    acc
}

/// Analytic divergence tag for the measure-sum condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivergenceTag {
    Divergent,
    Convergent,
    Unknown,
}

#[derive(Clone, Debug)]
enum Variant {
    /// Weakly decreasing on all of `N` (the monotone class `DR(N)`).
    Monotone { profile: Profile },
    /// Supported on explicit times with values tending to zero (`SR(S)`).
    ShrinkingOnSubset {
        entries: Vec<(BigUint, BigRational)>,
        divergent_by_construction: bool,
    },
    /// Supported on a polynomial curve in `N^n`.
    PolynomialSupported {
        spec: PolynomialSpec,
        profile: Profile,
    },
}

/// A radius sequence with a support iterator in canonical order.
#[derive(Clone, Debug)]
pub struct RadiusSequence {
    variant: Variant,
    scale: BigRational,
}

/// One supported index with its (scaled) radius.
#[derive(Clone, Debug)]
pub struct SupportEntry {
    /// Position in the canonical enumeration (the 1-based `q` or `k`).
    pub ordinal: u64,
    pub index: SemigroupIndex,
    pub radius: BigRational,
}

impl RadiusSequence {
    /// A weakly decreasing sequence on all of `N`.
    pub fn monotone(profile: Profile) -> Result<RadiusSequence> {
        profile.validate()?;
        Ok(RadiusSequence {
            variant: Variant::Monotone { profile },
            scale: BigRational::one(),
        })
    }

    /// The sequence of the simultaneous-action construction: the profile on
    /// the curve `(P_1(q), ..., P_n(q))` for `q >= N_0`, zero elsewhere.
    pub fn polynomial_supported(spec: PolynomialSpec, profile: Profile) -> Result<RadiusSequence> {
        profile.validate()?;
        Ok(RadiusSequence {
            variant: Variant::PolynomialSupported { spec, profile },
            scale: BigRational::one(),
        })
    }

    /// The counterexample sequence: `r_{n_k} = 2 t_k` on the recurrence
    /// times, zero elsewhere. Divergence `sum_k nu(B(x, r_{n_k})) >= sum 1/k`
    /// holds by the infimum property of `t_k`.
    pub fn counterexample(
        measure: &CircleMeasure,
        x: &CirclePoint,
        times: &RecurrenceTimes,
        tol: &BigRational,
    ) -> Result<RadiusSequence> {
        if !measure.support_contains(x, tol) {
            return Err(Error::NotInSupport {
                resolution: tol.to_string(),
            });
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let mut entries = Vec::with_capacity(times.len());
        for (k, time) in times.times.iter().enumerate() {
            let t_k = measure.t_sequence(x, k as u64 + 1, tol)?;
            entries.push((time.clone(), &two * t_k));
        }
        Ok(RadiusSequence {
            variant: Variant::ShrinkingOnSubset {
                entries,
                divergent_by_construction: true,
            },
            scale: BigRational::one(),
        })
    }

    /// Explicit support times and radii (strictly increasing times, weakly
    /// decreasing radii).
    pub fn on_times(entries: Vec<(BigUint, BigRational)>) -> Result<RadiusSequence> {
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidParameter(
                    "support times must strictly increase".into(),
                ));
            }
        }
        for (i, pair) in entries.windows(2).enumerate() {
            if pair[1].1 > pair[0].1 {
                return Err(Error::ProfileNotDecreasing { at: i as u64 + 2 });
            }
        }
        Ok(RadiusSequence {
            variant: Variant::ShrinkingOnSubset {
                entries,
                divergent_by_construction: false,
            },
            scale: BigRational::one(),
        })
    }

    /// The scalar multiple `C r`.
    pub fn scaled(&self, factor: &BigRational) -> Result<RadiusSequence> {
        if !factor.is_positive() {
            return Err(Error::InvalidParameter("scale factor must be > 0".into()));
        }
        Ok(RadiusSequence {
            variant: self.variant.clone(),
            scale: &self.scale * factor,
        })
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    /// Dimension of the acting semigroup index.
    pub fn dim(&self) -> usize {
        match &self.variant {
            Variant::PolynomialSupported { spec, .. } => spec.dim(),
            _ => 1,
        }
    }

    pub fn polynomial_spec(&self) -> Option<&PolynomialSpec> {
        match &self.variant {
            Variant::PolynomialSupported { spec, .. } => Some(spec),
            _ => None,
        }
    }

    pub fn is_monotone_class(&self) -> bool {
        matches!(self.variant, Variant::Monotone { .. })
    }

    /// Total evaluation: the radius assigned to `g` (zero off the support).
    /// For polynomial support the curve is searched within `horizon`.
    pub fn eval(&self, g: &SemigroupIndex, horizon: u64) -> BigRational {
        let raw = match &self.variant {
            Variant::Monotone { profile } => {
                if g.dim() != 1 {
                    BigRational::zero()
                } else {
                    profile.eval(g.scalar_value())
                }
            }
            Variant::ShrinkingOnSubset { entries, .. } => {
                if g.dim() != 1 {
                    BigRational::zero()
                } else {
                    let t = g.scalar_value();
                    entries
                        .binary_search_by(|(time, _)| time.cmp(t))
                        .map(|i| entries[i].1.clone())
                        .unwrap_or_else(|_| BigRational::zero())
                }
            }
            Variant::PolynomialSupported { spec, profile } => match spec.locate(g, horizon) {
                Some(q) => profile.eval(&BigUint::from(q)),
                None => BigRational::zero(),
            },
        };
        raw * &self.scale
    }

    /// Enumerate the support within the horizon, in canonical order.
    /// The horizon bounds the canonical parameter: the index itself for
    /// monotone sequences, the curve parameter `q` for polynomial support,
    /// and the entry count `k` for sequences on explicit times.
    pub fn support(&self, horizon: u64) -> Vec<SupportEntry> {
        let mut out = Vec::new();
        match &self.variant {
            Variant::Monotone { profile } => {
                for q in 1..=horizon {
                    let r = profile.eval(&BigUint::from(q)) * &self.scale;
                    if r.is_positive() {
                        out.push(SupportEntry {
                            ordinal: q,
                            index: SemigroupIndex::scalar(q),
                            radius: r,
                        });
                    }
                }
            }
            Variant::ShrinkingOnSubset { entries, .. } => {
                for (k, (time, r)) in entries.iter().take(horizon as usize).enumerate() {
                    let r = r * &self.scale;
                    if r.is_positive() {
                        out.push(SupportEntry {
                            ordinal: k as u64 + 1,
                            index: SemigroupIndex::new(vec![time.clone()])
                                .expect("times validated positive"),
                            radius: r,
                        });
                    }
                }
            }
            Variant::PolynomialSupported { spec, profile } => {
                for q in spec.start()..=horizon {
                    let r = profile.eval(&BigUint::from(q)) * &self.scale;
                    if r.is_positive() {
                        out.push(SupportEntry {
                            ordinal: q,
                            index: spec.eval_point(q),
                            radius: r,
                        });
                    }
                }
            }
        }
        out
    }

    /// Analytic divergence tag of `sum (mu(B(x, r_g)))^s` for product
    /// Haar-like measures with `mu(B) ~ r`; `Unknown` when the family has
    /// no closed form.
    pub fn divergence_tag(&self, dim: usize, s: &BigRational) -> DivergenceTag {
        match &self.variant {
            Variant::ShrinkingOnSubset {
                divergent_by_construction,
                ..
            } => {
                if *divergent_by_construction && s == &BigRational::one() {
                    DivergenceTag::Divergent
                } else {
                    DivergenceTag::Unknown
                }
            }
            Variant::Monotone { profile } | Variant::PolynomialSupported { profile, .. } => {
                match profile.decay_exponent() {
                    None => DivergenceTag::Unknown,
                    Some(e) => {
                        let total = e * BigRational::from_integer(BigInt::from(dim)) * s;
                        if total <= BigRational::one() {
                            DivergenceTag::Divergent
                        } else {
                            DivergenceTag::Convergent
                        }
                    }
                }
            }
        }
    }

    /// Partial sum `sum_{g in support, within horizon} (mu(B(x, r_g)))^s`,
    /// exact for integer `s` (dyadic lower bound at 128 bits otherwise),
    /// together with the analytic tag.
    pub fn partial_measure_sum(
        &self,
        measures: &[CircleMeasure],
        x: &TorusPoint,
        s: &BigRational,
        horizon: u64,
    ) -> Result<(BigRational, DivergenceTag)> {
        if measures.len() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: measures.len(),
            });
        }
        if s < &BigRational::one() {
            return Err(Error::InvalidParameter("exponent s must be >= 1".into()));
        }
        let mut terms = Vec::new();
        for entry in self.support(horizon) {
            if entry.index.dim() != x.dim() {
                return Err(Error::DimensionMismatch {
                    expected: x.dim(),
                    got: entry.index.dim(),
                });
            }
            let mut mass = BigRational::one();
            for (j, m) in measures.iter().enumerate() {
                mass *= m.ball_measure(x.coord(j), &entry.radius);
            }
            terms.push(rational_pow(&mass, s));
        }
        let sum = crate::numeric::sum_rationals(terms);
        Ok((sum, self.divergence_tag(x.dim(), s)))
    }

    /// Decide `C_1 s(k) <= r(k) <= C_2 s(k)` over the common support within
    /// a horizon, ignoring a finite prefix ("all but finitely many").
    pub fn equivalence_check(
        &self,
        other: &RadiusSequence,
        horizon: u64,
        ignore_prefix: usize,
        ratio_threshold: &BigRational,
    ) -> EquivalenceOutcome {
        let mine = self.support(horizon);
        let theirs = other.support(horizon);
        if mine.len() != theirs.len() {
            return EquivalenceOutcome::SupportMismatch {
                detail: format!(
                    "support sizes differ within horizon: {} vs {}",
                    mine.len(),
                    theirs.len()
                ),
            };
        }
        let mut c1: Option<BigRational> = None;
        let mut c2: Option<BigRational> = None;
        for (a, b) in mine.iter().zip(&theirs).skip(ignore_prefix) {
            if a.index != b.index {
                return EquivalenceOutcome::SupportMismatch {
                    detail: format!("support differs at ordinal {}", a.ordinal),
                };
            }
            let ratio = &a.radius / &b.radius;
            if &ratio > ratio_threshold || ratio < ratio_threshold.recip() {
                return EquivalenceOutcome::Unbounded {
                    witness: a.ordinal,
                    ratio,
                };
            }
            c1 = Some(match c1 {
                Some(c) if c <= ratio => c,
                _ => ratio.clone(),
            });
            c2 = Some(match c2 {
                Some(c) if c >= ratio => c,
                _ => ratio.clone(),
            });
        }
        match (c1, c2) {
            (Some(c1), Some(c2)) => EquivalenceOutcome::Equivalent { c1, c2 },
            _ => EquivalenceOutcome::SupportMismatch {
                detail: "no support indices beyond the ignored prefix".into(),
            },
        }
    }
}

/// Default finite prefix ignored by the horizon-relative equivalence
/// check (standing in for "all but finitely many").
pub const DEFAULT_EQUIVALENCE_PREFIX: usize = 10;

/// Default threshold past which a radius ratio counts as unbounded;
/// separates constant-ratio pairs from polynomially diverging ones at
/// desk horizons.
pub fn default_ratio_threshold() -> BigRational {
    BigRational::from_integer(BigInt::from(1_000_000))
}

/// Outcome of a horizon-relative equivalence check.
#[derive(Clone, Debug)]
pub enum EquivalenceOutcome {
    Equivalent { c1: BigRational, c2: BigRational },
    Unbounded { witness: u64, ratio: BigRational },
    SupportMismatch { detail: String },
}

/// `x^s` for rational `s = p/q`: exact for integer `s`, a dyadic lower
/// bound at 128 fractional bits otherwise.
fn rational_pow(x: &BigRational, s: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let p = s.numer().to_u32().expect("exponent numerator fits in u32");
    let q = s
        .denom()
        .to_u32()
        .expect("exponent denominator fits in u32");
    let powered_num = x.numer().magnitude().pow(p);
    let powered_den = x.denom().magnitude().pow(p);
    if q == 1 {
        return BigRational::new(BigInt::from(powered_num), BigInt::from(powered_den));
    }
    const BITS: u32 = 128;
    let scaled = (powered_num << (BITS as u64 * u64::from(q))) / powered_den;
    BigRational::new(BigInt::from(scaled.nth_root(q)), BigInt::one() << BITS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_fraction(n, d)
    }

    fn harmonic_half() -> RadiusSequence {
        RadiusSequence::monotone(Profile::Harmonic { scale: rat(1, 2) }).unwrap()
    }

    #[test]
    fn monotone_harmonic_eval() {
        let r = harmonic_half();
        assert_eq!(r.eval(&SemigroupIndex::scalar(1), 100), rat(1, 2));
        assert_eq!(r.eval(&SemigroupIndex::scalar(10), 100), rat(1, 20));
    }

    #[test]
    fn polynomial_support_on_and_off_curve() {
        // P = (q, q^2): r((2,4)) = R_2, r((2,3)) = 0.
        let spec = PolynomialSpec::new(
            vec![
                vec![BigInt::zero(), BigInt::one()],
                vec![BigInt::zero(), BigInt::zero(), BigInt::one()],
            ],
            1,
        )
        .unwrap();
        let r = RadiusSequence::polynomial_supported(spec, Profile::Harmonic { scale: rat(1, 2) })
            .unwrap();
        let on = SemigroupIndex::new(vec![BigUint::from(2u32), BigUint::from(4u32)]).unwrap();
        let off = SemigroupIndex::new(vec![BigUint::from(2u32), BigUint::from(3u32)]).unwrap();
        assert_eq!(r.eval(&on, 100), rat(1, 4));
        assert_eq!(r.eval(&off, 100), rat(0, 1));

        let support = r.support(50);
        assert_eq!(support.len(), 50);
        // No duplicate indices: the curve is injective on the scanned range.
        for pair in support.windows(2) {
            assert_ne!(pair[0].index, pair[1].index);
            assert!(pair[0].radius >= pair[1].radius);
        }
    }

    #[test]
    fn scaled_copies_stay_admissible() {
        let r = harmonic_half();
        for c in [rat(1, 4), rat(1, 1), rat(4, 1)] {
            let cr = r.scaled(&c).unwrap();
            let v = cr.eval(&SemigroupIndex::scalar(6), 100);
            assert_eq!(v, rat(1, 12) * &c);
            let support = cr.support(32);
            for pair in support.windows(2) {
                assert!(pair[0].radius >= pair[1].radius);
            }
        }
    }

    #[test]
    fn polynomial_validation_rejects_bad_specs() {
        // Constant polynomial.
        assert!(PolynomialSpec::new(vec![vec![BigInt::from(3)]], 1).is_err());
        // Negative leading coefficient.
        assert!(PolynomialSpec::new(vec![vec![BigInt::zero(), BigInt::from(-1)]], 1).is_err());
        // q^2 - 10q is not injective-from-1; fails the scan at start = 1.
        assert!(PolynomialSpec::new(
            vec![vec![BigInt::zero(), BigInt::from(-10), BigInt::one()]],
            1
        )
        .is_err());
        // The same polynomial is fine once the start index clears the dip.
        assert!(PolynomialSpec::new(
            vec![vec![BigInt::zero(), BigInt::from(-10), BigInt::one()]],
            11
        )
        .is_ok());
    }

    #[test]
    fn counterexample_radii_are_two_t_k() {
        let leb = CircleMeasure::lebesgue();
        let theta = CirclePoint::golden(192);
        let times = RecurrenceTimes::rotation_convergents(&theta, 8).unwrap();
        let tol = rat(1, 1_000_000_000_000);
        let r = RadiusSequence::counterexample(&leb, &pt(0, 1), &times, &tol).unwrap();
        // Lebesgue: t_k = 1/(2k), so r_{n_k} = 1/k exactly after snapping.
        for (k, entry) in r.support(8).iter().enumerate() {
            assert_eq!(entry.radius, rat(1, k as i64 + 1));
            assert_eq!(entry.index.scalar_value(), &times.times[k]);
        }
        // Off-support indices evaluate to zero.
        assert_eq!(r.eval(&SemigroupIndex::scalar(4), 100), rat(0, 1));
        assert_eq!(r.divergence_tag(1, &rat(1, 1)), DivergenceTag::Divergent);
    }

    #[test]
    fn partial_sums_match_hand_computation() {
        let leb = CircleMeasure::lebesgue();
        let r = harmonic_half();
        let x = TorusPoint::scalar(pt(0, 1));
        // s = 1: sum of 1/k for k <= 4 = 25/12.
        let (sum, tag) = r
            .partial_measure_sum(std::slice::from_ref(&leb), &x, &rat(1, 1), 4)
            .unwrap();
        assert_eq!(sum, rat(25, 12));
        assert_eq!(tag, DivergenceTag::Divergent);
        // s = 2: sum of 1/k^2 for k <= 4 = 205/144.
        let (sum, tag) = r
            .partial_measure_sum(std::slice::from_ref(&leb), &x, &rat(2, 1), 4)
            .unwrap();
        assert_eq!(sum, rat(205, 144));
        assert_eq!(tag, DivergenceTag::Convergent);
    }

    #[test]
    fn partial_sum_of_zero_sequence_is_zero() {
        let leb = CircleMeasure::lebesgue();
        let r = RadiusSequence::on_times(vec![]).unwrap();
        let x = TorusPoint::scalar(pt(0, 1));
        let (sum, _) = r
            .partial_measure_sum(std::slice::from_ref(&leb), &x, &rat(1, 1), 10)
            .unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn equivalence_examples() {
        let r = harmonic_half();
        let threshold = rat(1_000_000, 1);
        match r.equivalence_check(&r, 200, 10, &threshold) {
            EquivalenceOutcome::Equivalent { c1, c2 } => {
                assert_eq!(c1, rat(1, 1));
                assert_eq!(c2, rat(1, 1));
            }
            other => panic!("expected reflexive equivalence, got {other:?}"),
        }

        let doubled = r.scaled(&rat(2, 1)).unwrap();
        match r.equivalence_check(&doubled, 200, 10, &threshold) {
            EquivalenceOutcome::Equivalent { c1, c2 } => {
                assert_eq!(c1, rat(1, 2));
                assert_eq!(c2, rat(1, 2));
            }
            other => panic!("expected constant ratio 1/2, got {other:?}"),
        }

        // 1/k vs 1/k^2: the ratio k is unbounded; with a threshold of 100 it
        // trips before the horizon.
        let quadratic = RadiusSequence::monotone(Profile::InversePower {
            scale: rat(1, 2),
            power: 2,
        })
        .unwrap();
        match r.equivalence_check(&quadratic, 200, 10, &rat(100, 1)) {
            EquivalenceOutcome::Unbounded { witness, .. } => assert!(witness > 100),
            other => panic!("expected unbounded ratio, got {other:?}"),
        }
    }

    #[test]
    fn equivalence_is_transitive_with_multiplied_constants() {
        let r = harmonic_half();
        let s = r.scaled(&rat(3, 2)).unwrap();
        let t = s.scaled(&rat(5, 4)).unwrap();
        let threshold = rat(1_000_000, 1);
        let get = |a: &RadiusSequence, b: &RadiusSequence| match a
            .equivalence_check(b, 100, 5, &threshold)
        {
            EquivalenceOutcome::Equivalent { c1, c2 } => (c1, c2),
            other => panic!("unexpected {other:?}"),
        };
        let (ab1, ab2) = get(&r, &s);
        let (bc1, bc2) = get(&s, &t);
        let (ac1, ac2) = get(&r, &t);
        // The composed constants bound the direct ones.
        assert!(&ab1 * &bc1 <= ac1);
        assert!(ac2 <= &ab2 * &bc2);
    }

    #[test]
    fn equivalence_symmetry_inverts_constants() {
        let r = harmonic_half();
        let s = r.scaled(&rat(3, 1)).unwrap();
        let threshold = rat(1_000_000, 1);
        let (c1, c2) = match r.equivalence_check(&s, 100, 5, &threshold) {
            EquivalenceOutcome::Equivalent { c1, c2 } => (c1, c2),
            other => panic!("unexpected {other:?}"),
        };
        let (d1, d2) = match s.equivalence_check(&r, 100, 5, &threshold) {
            EquivalenceOutcome::Equivalent { c1, c2 } => (c1, c2),
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(d1, c2.recip());
        assert_eq!(d2, c1.recip());
    }

    #[test]
    fn inverse_root_profile_is_decreasing_and_close() {
        let p = Profile::InverseRoot {
            scale: rat(1, 2),
            root: 2,
            precision_bits: 128,
        };
        let mut prev: Option<BigRational> = None;
        for q in 1..200u32 {
            let v = p.eval(&BigUint::from(q));
            let target = 0.5 / f64::from(q).sqrt();
            let got = numeric::rational_to_f64(&v);
            assert!((got - target).abs() < 1e-12, "q={q}: {got} vs {target}");
            if let Some(pv) = prev {
                assert!(v <= pv);
            }
            prev = Some(v);
        }
    }
}
