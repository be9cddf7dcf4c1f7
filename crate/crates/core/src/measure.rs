//! Non-atomic Borel probability measures on `T^1` represented by their CDFs,
//! plus the support analysis used by the counterexample machinery: the
//! `t_n` radius sequence of a point, support membership at a declared
//! resolution, and isolated-left/right/both-sides classification with the
//! unique gap partner and the gap's Haar length.
//!
//! Measures are CDFs rather than densities so that singular measures (the
//! Cantor staircase, the Denjoy invariant measure) are first-class.

use crate::circle::{Arc as Ball, CirclePoint};
use crate::denjoy::DenjoySystem;
use crate::error::{Error, Result};
use crate::numeric::{self, simplest_in_interval};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

type CustomCdf = dyn Fn(&BigRational) -> BigRational + Send + Sync;

/// A Borel probability measure on the circle, held as its CDF
/// `F(x) = nu([0, x))` with `F(0) = 0`, `F(1) = 1`.
#[derive(Clone)]
pub struct CircleMeasure {
    kind: MeasureKind,
}

#[derive(Clone)]
enum MeasureKind {
    Lebesgue,
    /// Devil's staircase CDF of the middle-thirds Cantor measure, evaluated
    /// by base-3 digit recursion to `depth` digits (exact for points whose
    /// walk terminates, error `<= 2^-depth` otherwise).
    CantorStaircase {
        depth: u32,
    },
    /// Pullback of Lebesgue under the collapsing map of a built Denjoy
    /// system; the CDF is the collapsing map itself, evaluated exactly.
    DenjoyInvariant(Arc<DenjoySystem>),
    Custom {
        cdf: Arc<CustomCdf>,
        error_bound: BigRational,
    },
}

impl fmt::Debug for CircleMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasureKind::Lebesgue => write!(f, "CircleMeasure::Lebesgue"),
            MeasureKind::CantorStaircase { depth } => {
                write!(f, "CircleMeasure::CantorStaircase(depth={depth})")
            }
            MeasureKind::DenjoyInvariant(_) => write!(f, "CircleMeasure::DenjoyInvariant"),
            MeasureKind::Custom { .. } => write!(f, "CircleMeasure::Custom"),
        }
    }
}

/// Default digit depth for the Cantor staircase.
pub const CANTOR_DEFAULT_DEPTH: u32 = 60;

impl CircleMeasure {
    pub fn lebesgue() -> CircleMeasure {
        CircleMeasure {
            kind: MeasureKind::Lebesgue,
        }
    }

    pub fn cantor(depth: u32) -> CircleMeasure {
        CircleMeasure {
            kind: MeasureKind::CantorStaircase { depth },
        }
    }

    pub fn denjoy_invariant(system: Arc<DenjoySystem>) -> CircleMeasure {
        CircleMeasure {
            kind: MeasureKind::DenjoyInvariant(system),
        }
    }

    /// Custom CDF with a declared evaluation error bound (0 for exact).
    pub fn custom(
        cdf: impl Fn(&BigRational) -> BigRational + Send + Sync + 'static,
        error_bound: BigRational,
    ) -> CircleMeasure {
        CircleMeasure {
            kind: MeasureKind::Custom {
                cdf: Arc::new(cdf),
                error_bound,
            },
        }
    }

    /// Evaluate the CDF at `x` in `[0, 1]`.
    pub fn cdf(&self, x: &BigRational) -> BigRational {
        if x <= &BigRational::zero() {
            return BigRational::zero();
        }
        if x >= &BigRational::one() {
            return BigRational::one();
        }
        match &self.kind {
            MeasureKind::Lebesgue => x.clone(),
            MeasureKind::CantorStaircase { depth } => cantor_cdf(x, *depth),
            MeasureKind::DenjoyInvariant(sys) => sys.collapse_value(x),
            MeasureKind::Custom { cdf, .. } => cdf(x),
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.kind, MeasureKind::Lebesgue)
    }

    pub fn denjoy_system(&self) -> Option<&Arc<DenjoySystem>> {
        match &self.kind {
            MeasureKind::DenjoyInvariant(sys) => Some(sys),
            _ => None,
        }
    }

    /// Bound on the evaluation error of a single CDF value.
    pub fn cdf_error_bound(&self) -> BigRational {
        match &self.kind {
            MeasureKind::Lebesgue | MeasureKind::DenjoyInvariant(_) => BigRational::zero(),
            MeasureKind::CantorStaircase { depth } => {
                BigRational::new(BigInt::one(), BigInt::one() << *depth)
            }
            MeasureKind::Custom { error_bound, .. } => error_bound.clone(),
        }
    }

    /// Mass of the open interval `(a, b)` read counterclockwise. Exact up to
    /// twice the CDF error bound.
    pub fn interval_measure(&self, a: &CirclePoint, b: &CirclePoint) -> BigRational {
        self.interval_measure_rat(&a.to_rational(), &b.to_rational())
    }

    pub fn interval_measure_rat(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let a = numeric::frac_mod_one(a);
        let b = numeric::frac_mod_one(b);
        if a <= b {
            self.cdf(&b) - self.cdf(&a)
        } else {
            BigRational::one() - self.cdf(&a) + self.cdf(&b)
        }
    }

    /// Mass of the open ball `B(x, r)`; radii at or above 1/2 give measure 1
    /// (the ball is the circle minus the antipode, and the measure is
    /// non-atomic).
    pub fn ball_measure(&self, center: &CirclePoint, radius: &BigRational) -> BigRational {
        if radius.is_zero() {
            return BigRational::zero();
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if *radius >= half {
            return BigRational::one();
        }
        let c = center.to_rational();
        self.interval_measure_rat(&(&c - radius), &(&c + radius))
    }

    pub fn ball(&self, b: &Ball) -> BigRational {
        self.ball_measure(b.center(), b.radius())
    }

    /// `t_n = inf { r >= 0 : nu(B(x, r)) >= 1/n }`, located by bisection to
    /// within `tol` and snapped to the simplest rational inside the final
    /// bracket. The returned value is within `tol` of the infimum.
    pub fn t_sequence(&self, x: &CirclePoint, n: u64, tol: &BigRational) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::InvalidParameter("t_sequence needs n >= 1".into()));
        }
        if !tol.is_positive() {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        let target = BigRational::new(BigInt::one(), BigInt::from(n));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        // nu(B(x, 1/2)) = 1 >= 1/n always; nu(B(x, 0)) = 0 < 1/n.
        let mut lo = BigRational::zero();
        let mut hi = half;
        let mut iterations = 0u32;
        let two = BigRational::from_integer(BigInt::from(2));
        while &hi - &lo > *tol {
            iterations += 1;
            if iterations > 4096 {
                return Err(Error::BisectionBudget { iterations });
            }
            let mid = (&lo + &hi) / &two;
            if self.ball_measure(x, &mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(simplest_in_interval(&lo, &hi))
    }

    /// Non-atomicity proxy: the largest mass `F(x + delta) - F(x - delta)`
    /// over a uniform grid of `grid_points` centers. For a non-atomic
    /// measure this tends to 0 as `delta` does; a declared modulus can be
    /// checked against it.
    pub fn non_atomicity_modulus(&self, grid_points: u32, delta: &BigRational) -> BigRational {
        let mut worst = BigRational::zero();
        for i in 0..grid_points {
            let x = BigRational::new(BigInt::from(i), BigInt::from(grid_points));
            let mass = self.interval_measure_rat(&(&x - delta), &(&x + delta));
            if mass > worst {
                worst = mass;
            }
        }
        worst
    }

    /// Declared-resolution support membership: true iff every ball down to
    /// radius `tol` has mass certifiably above the evaluation margin.
    pub fn support_contains(&self, x: &CirclePoint, tol: &BigRational) -> bool {
        let margin = self.positivity_margin();
        for r in resolution_schedule(tol) {
            if self.ball_measure(x, &r) <= margin {
                return false;
            }
        }
        true
    }

    /// One-sided masses `nu((x, x+e))` and `nu((x-e, x))`.
    fn side_mass(&self, x: &BigRational, e: &BigRational, right: bool) -> BigRational {
        if right {
            self.interval_measure_rat(x, &(x + e))
        } else {
            self.interval_measure_rat(&(x - e), x)
        }
    }

    fn positivity_margin(&self) -> BigRational {
        self.cdf_error_bound() * BigRational::from_integer(BigInt::from(4))
    }

    /// Classify a support point as approached from both sides or isolated
    /// from one side, locating the unique gap partner `y` by bisection to
    /// the boundary of the null gap and reporting the gap's Haar length.
    ///
    /// Answers are certified only down to `tol`; a one-sided mass that is
    /// positive but below the CDF evaluation margin is refused rather than
    /// guessed.
    pub fn classify_support_point(
        &self,
        x: &CirclePoint,
        tol: &BigRational,
    ) -> Result<SupportClassification> {
        if !self.support_contains(x, tol) {
            return Err(Error::NotInSupport {
                resolution: tol.to_string(),
            });
        }
        let margin = self.positivity_margin();
        let xr = x.to_rational();
        let finest = finest_scale(tol);

        let probe = |right: bool| -> SideProbe {
            let mass = self.side_mass(&xr, &finest, right);
            if mass <= margin && mass.is_zero() {
                SideProbe::Null
            } else if mass <= margin {
                SideProbe::Ambiguous(mass)
            } else {
                SideProbe::Positive
            }
        };

        let right = probe(true);
        let left = probe(false);
        if let SideProbe::Ambiguous(mass) = &right {
            return Err(Error::AmbiguousAtResolution {
                resolution: tol.to_string(),
                mass: mass.to_string(),
            });
        }
        if let SideProbe::Ambiguous(mass) = &left {
            return Err(Error::AmbiguousAtResolution {
                resolution: tol.to_string(),
                mass: mass.to_string(),
            });
        }

        match (left, right) {
            (SideProbe::Positive, SideProbe::Positive) => Ok(SupportClassification {
                kind: SupportKind::BothSides,
                gap_partner: None,
                gap_size: None,
                resolution: tol.clone(),
            }),
            (SideProbe::Positive, SideProbe::Null) => {
                let extent = self.null_gap_extent(&xr, true, &finest, &margin)?;
                Ok(SupportClassification {
                    kind: SupportKind::IsolatedRight,
                    gap_partner: Some(CirclePoint::from_rational(&xr + &extent)),
                    gap_size: Some(extent),
                    resolution: tol.clone(),
                })
            }
            (SideProbe::Null, SideProbe::Positive) => {
                let extent = self.null_gap_extent(&xr, false, &finest, &margin)?;
                Ok(SupportClassification {
                    kind: SupportKind::IsolatedLeft,
                    gap_partner: Some(CirclePoint::from_rational(&xr - &extent)),
                    gap_size: Some(extent),
                    resolution: tol.clone(),
                })
            }
            _ => Err(Error::AmbiguousAtResolution {
                resolution: tol.to_string(),
                mass: "0".into(),
            }),
        }
    }

    /// Largest `e` with `nu` vanishing on the one-sided interval of length
    /// `e`, by bisection with an exact bracket, snapped to the simplest
    /// rational in the bracket and verified.
    fn null_gap_extent(
        &self,
        x: &BigRational,
        right: bool,
        finest: &BigRational,
        margin: &BigRational,
    ) -> Result<BigRational> {
        let one = BigRational::one();
        // Invariant: mass at lo is zero, mass at hi is positive.
        let mut lo = finest.clone();
        let mut hi = &one - finest;
        let top_mass = self.side_mass(x, &hi, right);
        if top_mass <= *margin {
            return Err(Error::AmbiguousAtResolution {
                resolution: finest.to_string(),
                mass: top_mass.to_string(),
            });
        }
        let two = BigRational::from_integer(BigInt::from(2));
        while &hi - &lo > *finest {
            let mid = (&lo + &hi) / &two;
            let mass = self.side_mass(x, &mid, right);
            if mass.is_zero() {
                lo = mid;
            } else if mass > *margin {
                hi = mid;
            } else {
                return Err(Error::AmbiguousAtResolution {
                    resolution: finest.to_string(),
                    mass: mass.to_string(),
                });
            }
        }
        let snapped = simplest_in_interval(&lo, &hi);
        // The snap must preserve the bracket's certificate.
        let at_snap = self.side_mass(x, &snapped, right);
        if at_snap.is_zero() {
            Ok(snapped)
        } else {
            Ok(lo)
        }
    }
}

enum SideProbe {
    Positive,
    Null,
    Ambiguous(BigRational),
}

/// Geometric resolution schedule `2^-j` from 1/4 down to `tol`.
fn resolution_schedule(tol: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::new();
    let mut r = BigRational::new(BigInt::one(), BigInt::from(4));
    let two = BigRational::from_integer(BigInt::from(2));
    while r >= *tol {
        out.push(r.clone());
        r /= &two;
    }
    out.push(r);
    out
}

fn finest_scale(tol: &BigRational) -> BigRational {
    resolution_schedule(tol).pop().expect("nonempty schedule")
}

/// How a support point is approached by the rest of the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportKind {
    BothSides,
    IsolatedLeft,
    IsolatedRight,
}

/// Classification of a support point, with the unique gap partner and the
/// Haar length of the one-sided null gap when the point is isolated.
#[derive(Clone, Debug)]
pub struct SupportClassification {
    pub kind: SupportKind,
    pub gap_partner: Option<CirclePoint>,
    pub gap_size: Option<BigRational>,
    /// The resolution down to which the answer is certified.
    pub resolution: BigRational,
}

/// Devil's staircase CDF by base-3 digit walk. Exact (early return) when a
/// digit 1 is reached or the remainder hits zero; otherwise truncated after
/// `depth` digits with error below `2^-depth`.
fn cantor_cdf(x: &BigRational, depth: u32) -> BigRational {
    let three = BigRational::from_integer(BigInt::from(3));
    let two = BigInt::from(2);
    let mut w = x.clone();
    let mut acc = BigRational::zero();
    let mut scale = BigRational::new(BigInt::one(), two.clone());
    for _ in 0..depth {
        if w.is_zero() {
            return acc;
        }
        w *= &three;
        let digit = w.floor();
        w -= &digit;
        match digit.to_integer().try_into().unwrap_or(0u8) {
            0 => {}
            1 => {
                // Inside (or at the left edge of) a removed middle third:
                // the staircase is flat there, so the value is exact.
                return acc + scale;
            }
            _ => {
                acc += &scale;
            }
        }
        scale /= BigRational::from_integer(two.clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_fraction(n, d)
    }

    /// Independent oracle: evaluate the Cantor function by self-similar
    /// interval subdivision, F(x) = F(3x)/2 on [0,1/3], 1/2 on [1/3,2/3],
    /// 1/2 + F(3x-2)/2 on [2/3,1].
    fn cantor_oracle(x: &BigRational, depth: u32) -> BigRational {
        if depth == 0 || x.is_zero() {
            return BigRational::zero();
        }
        if *x >= BigRational::one() {
            return BigRational::one();
        }
        let third = rat(1, 3);
        let two_thirds = rat(2, 3);
        let half = rat(1, 2);
        let three = BigRational::from_integer(BigInt::from(3));
        if *x <= third {
            cantor_oracle(&(x * &three), depth - 1) / BigRational::from_integer(BigInt::from(2))
        } else if *x < two_thirds {
            half
        } else {
            &half
                + cantor_oracle(
                    &(x * &three - BigRational::from_integer(BigInt::from(2))),
                    depth - 1,
                ) / BigRational::from_integer(BigInt::from(2))
        }
    }

    #[test]
    fn cantor_cdf_matches_recursive_oracle() {
        let depth = 60;
        let m = CircleMeasure::cantor(depth);
        for i in 0..=81 {
            let x = rat(i, 81);
            let walk = m.cdf(&x);
            let oracle = cantor_oracle(&x, depth);
            let diff = (walk - oracle).abs();
            assert!(
                diff <= rat(1, 1 << 50),
                "digit walk vs recursion differ at {x}"
            );
        }
    }

    #[test]
    fn cantor_interval_masses() {
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        // Frozen from the recursive oracle: F(1/3) = 1/2, F(2/3) = 1/2.
        assert_eq!(m.interval_measure(&pt(1, 3), &pt(2, 3)), rat(0, 1));
        assert_eq!(m.interval_measure(&pt(0, 1), &pt(1, 3)), rat(1, 2));
        let leb = CircleMeasure::lebesgue();
        assert_eq!(m.cdf(&rat(1, 3)), rat(1, 2));
        assert_eq!(leb.interval_measure(&pt(2, 10), &pt(5, 10)), rat(3, 10));
    }

    #[test]
    fn interval_measure_is_additive() {
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        let (a, b, c) = (pt(1, 10), pt(4, 10), pt(9, 10));
        let ab = m.interval_measure(&a, &b);
        let bc = m.interval_measure(&b, &c);
        let ac = m.interval_measure(&a, &c);
        let err = (ab + bc - ac).abs();
        assert!(err <= m.cdf_error_bound() * rat(2, 1));
    }

    #[test]
    fn lebesgue_t_sequence_is_exact() {
        let m = CircleMeasure::lebesgue();
        let tol = rat(1, 1_000_000_000_000);
        for n in [1u64, 2, 3, 7, 100] {
            let t = m.t_sequence(&pt(3, 10), n, &tol).unwrap();
            assert_eq!(t, rat(1, 2 * n as i64), "t_{n} should snap to 1/(2n)");
        }
    }

    #[test]
    fn cantor_t2_is_one_third() {
        // Frozen from a grid scan of r -> nu(B(1/3, r)) at resolution 1e-6:
        // the first ball with mass >= 1/2 is (0 - eps, 2/3 - eps), r = 1/3.
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        let t = m.t_sequence(&pt(1, 3), 2, &rat(1, 1_000_000_000)).unwrap();
        assert_eq!(t, rat(1, 3));
    }

    #[test]
    fn t_sequence_is_monotone_nonincreasing() {
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        let tol = rat(1, 1 << 40);
        let mut prev: Option<BigRational> = None;
        for n in 1..=12 {
            let t = m.t_sequence(&pt(1, 3), n, &tol).unwrap();
            if let Some(p) = prev {
                assert!(t <= p + &tol * rat(2, 1));
            }
            prev = Some(t);
        }
    }

    #[test]
    fn t_sequence_infimum_property() {
        let m = CircleMeasure::lebesgue();
        let tol = rat(1, 1 << 30);
        for n in [2u64, 5, 9] {
            let t = m.t_sequence(&pt(0, 1), n, &tol).unwrap();
            let delta = &tol * rat(4, 1);
            let mass = m.ball_measure(&pt(0, 1), &(t + delta));
            assert!(mass >= rat(1, n as i64));
        }
    }

    #[test]
    fn support_membership() {
        let tol = rat(1, 1 << 40);
        let leb = CircleMeasure::lebesgue();
        assert!(leb.support_contains(&pt(37, 100), &tol));
        let cantor = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        assert!(!cantor.support_contains(&pt(1, 2), &tol));
        assert!(cantor.support_contains(&pt(1, 3), &tol));
        assert!(cantor.support_contains(&pt(0, 1), &tol));
    }

    #[test]
    fn classify_lebesgue_is_both_sides() {
        let tol = rat(1, 1 << 40);
        let leb = CircleMeasure::lebesgue();
        let c = leb.classify_support_point(&pt(41, 97), &tol).unwrap();
        assert_eq!(c.kind, SupportKind::BothSides);
        assert!(c.gap_partner.is_none());
    }

    #[test]
    fn classify_cantor_gap_endpoints() {
        let tol = rat(1, 1 << 40);
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        let c = m.classify_support_point(&pt(1, 3), &tol).unwrap();
        assert_eq!(c.kind, SupportKind::IsolatedRight);
        assert_eq!(c.gap_partner.unwrap().to_rational(), rat(2, 3));
        assert_eq!(c.gap_size.unwrap(), rat(1, 3));

        let c = m.classify_support_point(&pt(2, 3), &tol).unwrap();
        assert_eq!(c.kind, SupportKind::IsolatedLeft);
        assert_eq!(c.gap_partner.unwrap().to_rational(), rat(1, 3));
        assert_eq!(c.gap_size.unwrap(), rat(1, 3));
    }

    #[test]
    fn classify_rejects_non_support_points() {
        let tol = rat(1, 1 << 40);
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        assert!(matches!(
            m.classify_support_point(&pt(1, 2), &tol),
            Err(Error::NotInSupport { .. })
        ));
    }

    #[test]
    fn non_atomicity_modulus_decays() {
        for m in [
            CircleMeasure::lebesgue(),
            CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH),
        ] {
            let coarse = m.non_atomicity_modulus(64, &rat(1, 64));
            let fine = m.non_atomicity_modulus(64, &rat(1, 4096));
            assert!(fine < coarse);
            // Declared modulus for these measures: mass of a 2 delta window
            // is below (2 delta)^(1/2) at the tested scales.
            assert!(fine < rat(1, 32));
        }
    }

    #[test]
    fn gap_partner_is_maximal() {
        // The returned y satisfies nu((x, y)) = 0 while every strictly larger
        // interval on that side has positive mass.
        let tol = rat(1, 1 << 40);
        let m = CircleMeasure::cantor(CANTOR_DEFAULT_DEPTH);
        let c = m.classify_support_point(&pt(1, 3), &tol).unwrap();
        let y = c.gap_partner.unwrap().to_rational();
        assert!(m.interval_measure_rat(&rat(1, 3), &y).is_zero());
        for extra in [rat(1, 100), rat(1, 10_000)] {
            let mass = m.interval_measure_rat(&rat(1, 3), &(&y + extra));
            assert!(mass > m.cdf_error_bound() * rat(4, 1));
        }
    }
}
