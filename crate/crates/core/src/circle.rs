//! Exact arithmetic on the circle `T^1 = R/Z` and torus `T^n`: points,
//! distance, open balls, the half-interval ordering around a center, and
//! exact Lebesgue measure of finite unions of arcs.
//!
//! Points carry one of two backends (see [`Backend`]): exact rationals, or
//! dyadic fixed point with a bit budget. Predicates (distance, membership,
//! ordering, measure) are total across backends because a fixed-point value
//! denotes an exact rational; operations that *produce* points require both
//! operands on the same backend.

use crate::error::{Error, Result};
use crate::numeric::{self, Backend};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A point on `T^1`, canonically represented in `[0, 1)`.
#[derive(Clone, PartialEq, Eq)]
pub struct CirclePoint {
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Rat(BigRational),
    Fixed { value: BigUint, bits: u32 },
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rat(r) => write!(f, "CirclePoint({r})"),
            Repr::Fixed { value, bits } => write!(f, "CirclePoint({value}/2^{bits})"),
        }
    }
}

impl CirclePoint {
    /// Exact rational point; the value is reduced mod 1.
    pub fn from_rational(x: BigRational) -> CirclePoint {
        CirclePoint {
            repr: Repr::Rat(numeric::frac_mod_one(&x)),
        }
    }

    /// Convenience constructor for small fractions.
    pub fn from_fraction(numer: i64, denom: i64) -> CirclePoint {
        CirclePoint::from_rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Quantize a rational onto the dyadic grid with `bits` fractional bits
    /// (round toward zero after reduction mod 1).
    pub fn fixed_from_rational(x: &BigRational, bits: u32) -> CirclePoint {
        let reduced = numeric::frac_mod_one(x);
        CirclePoint {
            repr: Repr::Fixed {
                value: numeric::quantize(&reduced, bits),
                bits,
            },
        }
    }

    /// Fixed-point value from a raw dyadic numerator (must be `< 2^bits`).
    pub fn fixed_from_bits(value: BigUint, bits: u32) -> CirclePoint {
        assert!(value.bits() <= u64::from(bits), "dyadic numerator too wide");
        CirclePoint {
            repr: Repr::Fixed { value, bits },
        }
    }

    /// The golden rotation angle `(sqrt(5) - 1) / 2` on the fixed backend.
    pub fn golden(bits: u32) -> CirclePoint {
        CirclePoint::fixed_from_bits(numeric::golden_angle_bits(bits), bits)
    }

    pub fn zero(backend: Backend) -> CirclePoint {
        match backend {
            Backend::Rational => CirclePoint::from_rational(BigRational::zero()),
            Backend::Fixed { bits } => CirclePoint::fixed_from_bits(BigUint::zero(), bits),
        }
    }

    pub fn backend(&self) -> Backend {
        match &self.repr {
            Repr::Rat(_) => Backend::Rational,
            Repr::Fixed { bits, .. } => Backend::Fixed { bits: *bits },
        }
    }

    /// Raw dyadic numerator and bit budget of a fixed-point value.
    pub(crate) fn fixed_parts(&self) -> Option<(&BigUint, u32)> {
        match &self.repr {
            Repr::Fixed { value, bits } => Some((value, *bits)),
            Repr::Rat(_) => None,
        }
    }

    /// The exact rational this point denotes, in `[0, 1)`.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Rat(r) => r.clone(),
            Repr::Fixed { value, bits } => numeric::dyadic(value, *bits),
        }
    }

    fn same_backend(&self, other: &CirclePoint) -> Result<()> {
        match (&self.repr, &other.repr) {
            (Repr::Rat(_), Repr::Rat(_)) => Ok(()),
            (Repr::Fixed { bits: a, .. }, Repr::Fixed { bits: b, .. }) if a == b => Ok(()),
            _ => Err(Error::BackendMismatch),
        }
    }

    /// `self + other` mod 1. Exact on both backends; requires matching
    /// backends because the result is a point.
    pub fn add(&self, other: &CirclePoint) -> Result<CirclePoint> {
        self.same_backend(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => CirclePoint::from_rational(a + b),
            (Repr::Fixed { value: a, bits }, Repr::Fixed { value: b, .. }) => {
                let mut sum = a + b;
                if sum.bits() > u64::from(*bits) {
                    sum -= numeric::pow2(*bits);
                }
                CirclePoint::fixed_from_bits(sum, *bits)
            }
            _ => unreachable!(),
        })
    }

    /// `self - other` mod 1.
    pub fn sub(&self, other: &CirclePoint) -> Result<CirclePoint> {
        self.same_backend(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rat(a), Repr::Rat(b)) => CirclePoint::from_rational(a - b),
            (Repr::Fixed { value: a, bits }, Repr::Fixed { value: b, .. }) => {
                let diff = if a >= b {
                    a - b
                } else {
                    numeric::pow2(*bits) + a - b
                };
                CirclePoint::fixed_from_bits(diff, *bits)
            }
            _ => unreachable!(),
        })
    }

    /// `k * self` mod 1. Exact on the dyadic grid; on the fixed backend the
    /// deviation from the intended real grows by the factor `k`, so the call
    /// fails once `log2(k)` eats into the reserved headroom.
    pub fn mul_int(&self, k: &BigUint) -> Result<CirclePoint> {
        match &self.repr {
            Repr::Rat(r) => Ok(CirclePoint::from_rational(
                r * BigRational::from_integer(BigInt::from(k.clone())),
            )),
            Repr::Fixed { value, bits } => {
                let needed = k.bits() + u64::from(Backend::MIN_HEADROOM_BITS);
                if needed > u64::from(*bits) {
                    return Err(Error::PrecisionExhausted {
                        needed,
                        available: u64::from(*bits),
                    });
                }
                // Keeping the low `bits` bits is exactly multiplication mod 1.
                let mask = numeric::pow2(*bits) - BigUint::one();
                let prod = (value * k) & mask;
                Ok(CirclePoint::fixed_from_bits(prod, *bits))
            }
        }
    }

    /// Antipode `self + 1/2`; only meaningful verbatim on backends that can
    /// represent 1/2 (both can).
    pub fn antipode(&self) -> CirclePoint {
        match &self.repr {
            Repr::Rat(r) => {
                CirclePoint::from_rational(r + BigRational::new(BigInt::one(), BigInt::from(2)))
            }
            Repr::Fixed { value: _, bits } => {
                let half = CirclePoint::fixed_from_bits(BigUint::one() << (bits - 1), *bits);
                self.add(&half).expect("same backend by construction")
            }
        }
    }
}

/// Distance on `T^1`: `min(|x - y|, 1 - |x - y|)`, always in `[0, 1/2]`.
/// Total across backends (computed on denoted rationals, exactly).
pub fn dist(x: &CirclePoint, y: &CirclePoint) -> BigRational {
    let a = x.to_rational();
    let b = y.to_rational();
    let d = numeric::frac_mod_one(&(a - b));
    let complement = BigRational::one() - &d;
    if d <= complement {
        d
    } else {
        complement
    }
}

/// A point on `T^n`: an ordered list of circle points sharing one backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    coords: Vec<CirclePoint>,
}

impl TorusPoint {
    pub fn new(coords: Vec<CirclePoint>) -> Result<TorusPoint> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter(
                "torus point needs dimension >= 1".into(),
            ));
        }
        for c in &coords[1..] {
            coords[0].same_backend(c)?;
        }
        Ok(TorusPoint { coords })
    }

    pub fn scalar(p: CirclePoint) -> TorusPoint {
        TorusPoint { coords: vec![p] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[CirclePoint] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> &CirclePoint {
        &self.coords[j]
    }

    pub fn backend(&self) -> Backend {
        self.coords[0].backend()
    }
}

/// An index in the acting semigroup `N^n` under componentwise
/// multiplication, with identity `(1, ..., 1)`. A scalar index doubles as
/// the additive exponent for rotation-like systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupIndex {
    components: Vec<BigUint>,
}

impl SemigroupIndex {
    pub fn new(components: Vec<BigUint>) -> Result<SemigroupIndex> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "semigroup index needs dimension >= 1".into(),
            ));
        }
        for c in &components {
            if c.is_zero() {
                return Err(Error::IndexNotPositive(c.clone()));
            }
        }
        Ok(SemigroupIndex { components })
    }

    pub fn scalar(k: u64) -> SemigroupIndex {
        SemigroupIndex::new(vec![BigUint::from(k)]).expect("positive scalar")
    }

    pub fn identity(dim: usize) -> SemigroupIndex {
        SemigroupIndex {
            components: vec![BigUint::one(); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[BigUint] {
        &self.components
    }

    /// Scalar value of a one-dimensional index.
    pub fn scalar_value(&self) -> &BigUint {
        assert_eq!(self.components.len(), 1, "scalar_value needs dim 1");
        &self.components[0]
    }
}

/// Componentwise product `(k_1 l_1, ..., k_n l_n)`.
pub fn compose(k: &SemigroupIndex, l: &SemigroupIndex) -> Result<SemigroupIndex> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: l.dim(),
        });
    }
    SemigroupIndex::new(
        k.components()
            .iter()
            .zip(l.components())
            .map(|(a, b)| a * b)
            .collect(),
    )
}

/// The semigroup action `alpha -> (alpha_1 k_1, ..., alpha_n k_n)` mod 1.
pub fn act(k: &SemigroupIndex, alpha: &TorusPoint) -> Result<TorusPoint> {
    if k.dim() != alpha.dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            got: k.dim(),
        });
    }
    let coords = alpha
        .coords()
        .iter()
        .zip(k.components())
        .map(|(a, ki)| a.mul_int(ki))
        .collect::<Result<Vec<_>>>()?;
    TorusPoint::new(coords)
}

/// An open ball `B(center, radius)` on `T^1`. Radius 0 is the empty set;
/// radii above 1/2 are clamped to 1/2, which is all of the circle except
/// the antipode of the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    center: CirclePoint,
    radius: BigRational,
}

impl Arc {
    pub fn new(center: CirclePoint, radius: BigRational) -> Arc {
        assert!(!radius.is_negative(), "arc radius must be nonnegative");
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let radius = if radius > half { half } else { radius };
        Arc { center, radius }
    }

    /// Reconstruct an arc from open endpoints `(a, b)` read counterclockwise.
    pub fn from_endpoints(a: &BigRational, b: &BigRational) -> Arc {
        let a = numeric::frac_mod_one(a);
        let len = numeric::frac_mod_one(&(b - &a));
        let radius = &len / BigRational::from_integer(BigInt::from(2));
        let center = CirclePoint::from_rational(a + &radius);
        Arc { center, radius }
    }

    pub fn center(&self) -> &CirclePoint {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.radius.is_zero()
    }

    /// Open endpoints `(a, b)` read counterclockwise, as exact rationals.
    pub fn endpoints(&self) -> (BigRational, BigRational) {
        let c = self.center.to_rational();
        let a = numeric::frac_mod_one(&(&c - &self.radius));
        let b = numeric::frac_mod_one(&(&c + &self.radius));
        (a, b)
    }

    /// Arc length `min(2 radius, 1)`, which is also its Lebesgue measure.
    pub fn length(&self) -> BigRational {
        let two_r = &self.radius * BigRational::from_integer(BigInt::from(2));
        if two_r > BigRational::one() {
            BigRational::one()
        } else {
            two_r
        }
    }

    /// Metric diameter: `length` capped at the circle diameter 1/2.
    pub fn diameter(&self) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let len = self.length();
        if len > half {
            half
        } else {
            len
        }
    }
}

/// Open-ball membership: true iff `dist(center, y) < radius` (strict).
pub fn ball_contains(b: &Arc, y: &CirclePoint) -> bool {
    dist(&b.center, y) < b.radius
}

/// Split an arc into non-wrapping open pieces `(lo, hi)` with
/// `0 <= lo < hi <= 1`.
fn arc_pieces(arc: &Arc, out: &mut Vec<(BigRational, BigRational)>) {
    if arc.is_empty() {
        return;
    }
    let (a, _) = arc.endpoints();
    let len = arc.length();
    let end = &a + &len;
    if end <= BigRational::one() {
        out.push((a, end));
    } else {
        out.push((a, BigRational::one()));
        out.push((BigRational::zero(), end - BigRational::one()));
    }
}

/// Merge non-wrapping pieces into disjoint intervals, sorted by start.
/// Pieces that merely touch at an endpoint are merged; the shared endpoint
/// has measure zero, so this changes nothing downstream.
pub fn merge_pieces(
    mut pieces: Vec<(BigRational, BigRational)>,
) -> Vec<(BigRational, BigRational)> {
    pieces.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let mut merged: Vec<(BigRational, BigRational)> = Vec::new();
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Disjoint sorted intervals covering the union of the arcs (wrap split at 0).
pub fn union_pieces(arcs: &[Arc]) -> Vec<(BigRational, BigRational)> {
    let mut pieces = Vec::with_capacity(arcs.len() + 4);
    for arc in arcs {
        arc_pieces(arc, &mut pieces);
    }
    merge_pieces(pieces)
}

/// Exact Lebesgue measure of a finite union of arcs, in `[0, 1]`.
pub fn union_measure(arcs: &[Arc]) -> BigRational {
    union_pieces(arcs)
        .into_iter()
        .fold(BigRational::zero(), |acc, (lo, hi)| acc + (hi - lo))
}

/// Position of `y` relative to `center` under the lifted ordering of the
/// half-interval decomposition `B(x,1/2) = B_- ⊔ B_+ ⊔ {x}`. The antipode
/// is outside `B(x, 1/2)`, where the ordering is undefined; it gets its own
/// tag rather than a guess.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Center,
    Antipode,
}

pub fn half_interval_side(center: &CirclePoint, y: &CirclePoint) -> Side {
    let delta = numeric::frac_mod_one(&(y.to_rational() - center.to_rational()));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if delta.is_zero() {
        Side::Center
    } else if delta == half {
        Side::Antipode
    } else if delta < half {
        Side::Right
    } else {
        Side::Left
    }
}

/// Lift of `p` into the fundamental domain `[center - 1/2, center + 1/2)`,
/// expressed as the signed offset from the center.
pub fn lift_offset(center: &CirclePoint, p: &CirclePoint) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    numeric::frac_mod_one(&(p.to_rational() - center.to_rational() + &half)) - half
}

/// `a < b` in the ordering of `B(center, 1/2)` lifted to a common
/// fundamental domain around the center.
pub fn ordered_less(center: &CirclePoint, a: &CirclePoint, b: &CirclePoint) -> bool {
    lift_offset(center, a) < lift_offset(center, b)
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

    #[test]
    fn dist_wraps_and_caps() {
        assert_eq!(dist(&pt(1, 10), &pt(9, 10)), rat(2, 10));
        assert_eq!(dist(&pt(3, 7), &pt(3, 7)), rat(0, 1));
        assert_eq!(dist(&pt(0, 1), &pt(1, 2)), rat(1, 2));
    }

    #[test]
    fn act_on_exact_rationals() {
        let k = SemigroupIndex::scalar(3);
        let alpha = TorusPoint::scalar(pt(1, 7));
        let out = act(&k, &alpha).unwrap();
        assert_eq!(out.coord(0).to_rational(), rat(3, 7));
    }

    #[test]
    fn compose_is_componentwise_product() {
        let k = SemigroupIndex::new(vec![BigUint::from(2u32), BigUint::from(3u32)]).unwrap();
        let l = SemigroupIndex::new(vec![BigUint::from(4u32), BigUint::from(5u32)]).unwrap();
        let kl = compose(&k, &l).unwrap();
        assert_eq!(
            kl.components(),
            &[BigUint::from(8u32), BigUint::from(15u32)]
        );
    }

    #[test]
    fn identity_acts_trivially() {
        let alpha = TorusPoint::new(vec![pt(2, 5), pt(1, 3)]).unwrap();
        let id = SemigroupIndex::identity(2);
        assert_eq!(act(&id, &alpha).unwrap(), alpha);
    }

    #[test]
    fn semigroup_action_law_small_grid() {
        // act(compose(k, l), a) == act(k, act(l, a)) on a small exact grid.
        for k1 in 1u64..5 {
            for l1 in 1u64..5 {
                for num in 0i64..7 {
                    let k = SemigroupIndex::scalar(k1);
                    let l = SemigroupIndex::scalar(l1);
                    let alpha = TorusPoint::scalar(pt(num, 7));
                    let lhs = act(&compose(&k, &l).unwrap(), &alpha).unwrap();
                    let rhs = act(&k, &act(&l, &alpha).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn ball_membership_is_open_and_wraps() {
        let b = Arc::new(pt(0, 1), rat(1, 5));
        assert!(ball_contains(&b, &pt(9, 10)));
        let b2 = Arc::new(pt(1, 2), rat(1, 10));
        assert!(!ball_contains(&b2, &pt(61, 100)));
        // The antipode is never inside B(x, 1/2).
        let b3 = Arc::new(pt(3, 10), rat(1, 2));
        assert!(!ball_contains(&b3, &pt(8, 10)));
        // Membership at exact distance = radius is false (open ball).
        let b4 = Arc::new(pt(0, 1), rat(1, 4));
        assert!(!ball_contains(&b4, &pt(1, 4)));
    }

    #[test]
    fn union_measure_examples() {
        let overlapping = vec![
            Arc::from_endpoints(&rat(0, 1), &rat(2, 10)),
            Arc::from_endpoints(&rat(1, 10), &rat(3, 10)),
        ];
        assert_eq!(union_measure(&overlapping), rat(3, 10));

        let disjoint = vec![
            Arc::from_endpoints(&rat(0, 1), &rat(1, 10)),
            Arc::from_endpoints(&rat(5, 10), &rat(6, 10)),
        ];
        assert_eq!(union_measure(&disjoint), rat(2, 10));

        let wrapping = vec![Arc::from_endpoints(&rat(9, 10), &rat(1, 10))];
        assert_eq!(union_measure(&wrapping), rat(2, 10));

        assert_eq!(union_measure(&[]), rat(0, 1));
        let full = vec![Arc::new(pt(1, 3), rat(1, 2))];
        assert_eq!(union_measure(&full), rat(1, 1));
    }

    #[test]
    fn arc_round_trips_between_forms() {
        let arc = Arc::new(pt(1, 3), rat(1, 7));
        let (a, b) = arc.endpoints();
        let back = Arc::from_endpoints(&a, &b);
        assert_eq!(back.center().to_rational(), arc.center().to_rational());
        assert_eq!(back.radius(), arc.radius());

        // Wrapping arc.
        let arc = Arc::new(pt(99, 100), rat(1, 25));
        let (a, b) = arc.endpoints();
        let back = Arc::from_endpoints(&a, &b);
        assert_eq!(back.center().to_rational(), arc.center().to_rational());
        assert_eq!(back.radius(), arc.radius());
    }

    #[test]
    fn half_interval_classification() {
        let c = pt(0, 1);
        assert_eq!(half_interval_side(&c, &pt(3, 4)), Side::Left);
        assert_eq!(half_interval_side(&c, &pt(0, 1)), Side::Center);
        assert_eq!(half_interval_side(&c, &pt(1, 2)), Side::Antipode);
        assert_eq!(half_interval_side(&c, &pt(1, 4)), Side::Right);
        assert!(ordered_less(&c, &pt(8, 10), &pt(9, 10)));
        assert!(!ordered_less(&c, &pt(9, 10), &pt(8, 10)));
    }

    #[test]
    fn fixed_backend_matches_rational_on_dyadics() {
        let bits = 96;
        let a = CirclePoint::fixed_from_rational(&rat(5, 8), bits);
        let b = CirclePoint::fixed_from_rational(&rat(7, 8), bits);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.to_rational(), rat(1, 2));
        let diff = a.sub(&b).unwrap();
        assert_eq!(diff.to_rational(), rat(3, 4));
        let tripled = a.mul_int(&BigUint::from(3u32)).unwrap();
        assert_eq!(tripled.to_rational(), rat(7, 8));
    }

    #[test]
    fn fixed_precision_budget_is_enforced() {
        let p = CirclePoint::fixed_from_rational(&rat(1, 3), 64);
        let huge = BigUint::one() << 40;
        assert!(matches!(
            p.mul_int(&huge),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn backend_mixing_is_rejected_for_point_ops() {
        let a = pt(1, 3);
        let b = CirclePoint::fixed_from_rational(&rat(1, 4), 64);
        assert!(matches!(a.add(&b), Err(Error::BackendMismatch)));
        // Predicates stay total.
        assert_eq!(dist(&a, &b), rat(1, 12));
    }
}
