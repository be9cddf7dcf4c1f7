//! Shared exact-arithmetic helpers: dyadic fixed-point values, rational
//! reduction mod 1, Stern-Brocot rational reconstruction, and integer roots.
//!
//! Everything here is exact. The fixed-point backend represents a circle
//! point as an integer `v < 2^bits` standing for `v / 2^bits`; addition and
//! integer multiplication mod 1 are then exact on the dyadic grid, and the
//! only approximation happens once, when an input is quantized.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Numeric backend for circle points. Chosen at construction time and never
/// mixed inside one experiment: expanding maps amplify representation error
/// by the multiplier, so precision has to be budgeted up front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Backend {
    /// Arbitrary exact rationals. Default for oracles and small horizons.
    Rational,
    /// Dyadic fixed point with `bits` fractional bits. Default for Monte
    /// Carlo runs at large horizons.
    Fixed { bits: u32 },
}

impl Backend {
    /// Headroom kept in reserve when multiplying a fixed-point value by an
    /// integer: after losing `log2(k)` bits to the multiplier, at least this
    /// many bits of the result must remain meaningful.
    pub const MIN_HEADROOM_BITS: u32 = 32;

    /// Smallest fixed backend that can absorb multipliers up to
    /// `max_multiplier_bits` bits while keeping `result_bits` of output
    /// precision. Rounded up to a whole number of 64-bit limbs.
    pub fn fixed_for(max_multiplier_bits: u64, result_bits: u32) -> Backend {
        let raw = max_multiplier_bits + u64::from(result_bits) + u64::from(Self::MIN_HEADROOM_BITS);
        let bits = raw.div_ceil(64) * 64;
        Backend::Fixed {
            bits: bits.try_into().expect("precision request overflows u32"),
        }
    }
}

/// Reduce a rational to its canonical representative in `[0, 1)`.
pub fn frac_mod_one(x: &BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

/// `2^bits` as a big integer.
pub fn pow2(bits: u32) -> BigUint {
    BigUint::one() << bits
}

/// The dyadic rational `value / 2^bits`.
pub fn dyadic(value: &BigUint, bits: u32) -> BigRational {
    BigRational::new(
        BigInt::from(value.clone()),
        BigInt::from(BigUint::one() << bits),
    )
}

/// Quantize `x` (already reduced mod 1) to the dyadic grid, rounding down.
pub fn quantize(x: &BigRational, bits: u32) -> BigUint {
    let scaled = x * BigRational::from_integer(BigInt::from(BigUint::one() << bits));
    scaled
        .floor()
        .to_integer()
        .to_biguint()
        .expect("quantize expects a value in [0, 1)")
}

/// The simplest rational (smallest denominator, then smallest numerator) in
/// the closed interval `[lo, hi]`. Stern-Brocot descent; used to snap
/// bisection brackets onto the exact rational they straddle.
pub fn simplest_in_interval(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "simplest_in_interval needs lo <= hi");
    if lo.is_negative() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_in_interval(&-hi.clone(), &-lo.clone());
    }
    simplest_nonneg(lo, hi)
}

fn simplest_nonneg(lo: &BigRational, hi: &BigRational) -> BigRational {
    // Invariant: 0 <= lo <= hi.
    let lo_floor = lo.floor().to_integer();
    let ceil_lo = lo.ceil().to_integer();
    if BigRational::from_integer(ceil_lo.clone()) <= *hi {
        return BigRational::from_integer(ceil_lo);
    }
    // lo and hi share the integer part and neither is an integer.
    let frac_lo = lo - BigRational::from_integer(lo_floor.clone());
    let frac_hi = hi - BigRational::from_integer(lo_floor.clone());
    let inner = simplest_nonneg(&frac_hi.recip(), &frac_lo.recip());
    BigRational::from_integer(lo_floor) + inner.recip()
}

/// Floor of `sqrt(n)`.
pub fn isqrt(n: &BigUint) -> BigUint {
    num_integer::Roots::sqrt(n)
}

/// The golden rotation angle `(sqrt(5) - 1) / 2` truncated to `bits`
/// fractional bits, returned as the dyadic numerator.
pub fn golden_angle_bits(bits: u32) -> BigUint {
    // floor(((sqrt(5) - 1) / 2) * 2^bits) = floor((isqrt(5 * 2^(2k)) - 2^k) / 2)
    // with k = bits + 1 guard bit to keep the final halving exact enough.
    let k = bits + 2;
    let five_shifted = BigUint::from(5u32) << (2 * k);
    let root = isqrt(&five_shifted);
    let numer = root - (BigUint::one() << k);
    numer >> (k - bits + 1)
}

/// Continued-fraction expansion of a nonnegative rational, as partial
/// quotients `[a0; a1, a2, ...]`. Terminates because the input is rational.
pub fn continued_fraction(x: &BigRational, max_terms: usize) -> Vec<BigUint> {
    let mut p = x.numer().to_biguint().expect("nonnegative rational");
    let mut q = x.denom().to_biguint().expect("positive denominator");
    let mut out = Vec::new();
    while !q.is_zero() && out.len() < max_terms {
        let (a, r) = p.div_rem(&q);
        out.push(a);
        p = q;
        q = r;
    }
    out
}

/// Denominators of the continued-fraction convergents of `x`, starting at
/// `q_0 = 1` and skipping duplicates (for noble numbers the 1 repeats).
pub fn convergent_denominators(x: &BigRational, count: usize, max_terms: usize) -> Vec<BigUint> {
    let quotients = continued_fraction(x, max_terms);
    let mut denoms: Vec<BigUint> = vec![BigUint::one()];
    let mut q_prev = BigUint::zero();
    let mut q_cur = BigUint::one();
    for a in quotients.iter().skip(1) {
        let q_next = a * &q_cur + &q_prev;
        q_prev = std::mem::replace(&mut q_cur, q_next);
        if denoms.last() != Some(&q_cur) {
            denoms.push(q_cur.clone());
        }
        if denoms.len() >= count {
            break;
        }
    }
    denoms.truncate(count);
    denoms
}

/// Convert an exact rational to `f64` (nearest), for reporting only.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Pairwise (tree) sum. Keeps operand sizes balanced so the gcd reductions
/// inside rational addition stay near the output size instead of being paid
/// on every term; a left fold over 10^4 harmonic terms is orders of
/// magnitude slower.
pub fn sum_rationals(mut terms: Vec<BigRational>) -> BigRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut iter = terms.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().expect("nonempty")
}
