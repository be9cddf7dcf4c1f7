//! Fast exact tail-union sweeps.
//!
//! Preimage-arc endpoints under a rotation (or a Denjoy map) all share the
//! denominator structure `2^B * G * small` with a common dyadic budget `B`,
//! a structured factor `G`, and a small cofactor, so two distinct endpoints
//! differ by more than `2^-(B + GAP_GUARD_BITS)`. Scaling every endpoint to
//! the integer key `floor(u * 2^P)` with `P = B + GAP_GUARD_BITS` therefore
//! preserves the exact order (key equality implies value equality), and the
//! whole sort-and-merge runs on plain big integers with no gcd
//! normalization.
//!
//! Measures stay exact through a split representation of CDF values:
//! `coarse / 2^B + fine` with a big dyadic part and a small rational part.
//! Sums accumulate the coarse parts as integers and tree-sum the fines.

use crate::numeric;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Euclid, One, Zero};

/// Bits of key resolution beyond the dyadic budget. Generous for the worst
/// pairwise cofactor product that can arise from snapped radii and the
/// Denjoy gap family.
pub const GAP_GUARD_BITS: u32 = 1024;

/// An exact value `coarse / 2^bits + fine`, with `fine` kept small.
#[derive(Clone, Debug)]
pub struct SplitValue {
    pub coarse: BigInt,
    pub fine: BigRational,
}

impl SplitValue {
    pub fn zero() -> SplitValue {
        SplitValue {
            coarse: BigInt::zero(),
            fine: BigRational::zero(),
        }
    }

    pub fn one(bits: u32) -> SplitValue {
        SplitValue {
            coarse: BigInt::one() << bits,
            fine: BigRational::zero(),
        }
    }

    #[cfg(test)]
    pub fn from_fine(fine: BigRational) -> SplitValue {
        SplitValue {
            coarse: BigInt::zero(),
            fine,
        }
    }

    pub fn from_coarse(coarse: BigInt) -> SplitValue {
        SplitValue {
            coarse,
            fine: BigRational::zero(),
        }
    }

    #[cfg(test)]
    pub fn to_rational(&self, bits: u32) -> BigRational {
        BigRational::new(self.coarse.clone(), BigInt::one() << bits) + &self.fine
    }

    /// Reduce into `[0, 1)` exactly (adjusting only the coarse part).
    pub fn reduced_mod_one(&self, bits: u32) -> SplitValue {
        let denom_fine = self.fine.denom().clone();
        let total_num = &self.coarse * &denom_fine + self.fine.numer() * (BigInt::one() << bits);
        let total_den = denom_fine * (BigInt::one() << bits);
        let floor = Euclid::div_euclid(&total_num, &total_den);
        SplitValue {
            coarse: &self.coarse - floor * (BigInt::one() << bits),
            fine: self.fine.clone(),
        }
    }
}

/// An exact position `num / (2^B * small)` in `[0, 1]` (`B` is the shared
/// dyadic budget of the sweep), not necessarily reduced.
#[derive(Clone, Debug)]
pub struct RawPos {
    pub num: BigInt,
    pub small: BigInt,
}

impl RawPos {
    /// Order-faithful integer key `floor(u * 2^(pow2 + GAP_GUARD_BITS))`.
    pub fn key(&self) -> BigUint {
        let shifted = &self.num << GAP_GUARD_BITS;
        (shifted / &self.small)
            .to_biguint()
            .expect("position in [0, 1]")
    }

    pub fn from_split(v: &SplitValue, bits: u32) -> RawPos {
        RawPos {
            num: &v.coarse * v.fine.denom() + v.fine.numer() * (BigInt::one() << bits),
            small: v.fine.denom().clone(),
        }
    }
}

/// One non-wrapping open piece of a preimage arc, keyed for sorting, with
/// exact CDF values at its endpoints.
#[derive(Clone, Debug)]
pub struct SweepPiece {
    pub key_lo: BigUint,
    pub key_hi: BigUint,
    pub f_lo: SplitValue,
    pub f_hi: SplitValue,
}

/// Pieces of a counterclockwise arc from `lo` to `hi` given transported
/// endpoint data, split at the wrap point. Equal keys mean the arc
/// degenerated (a collapsed preimage); that yields no pieces.
pub fn arc_pieces(
    lo: (RawPos, SplitValue),
    hi: (RawPos, SplitValue),
    bits: u32,
) -> Vec<SweepPiece> {
    let key_lo = lo.0.key();
    let key_hi = hi.0.key();
    match key_lo.cmp(&key_hi) {
        std::cmp::Ordering::Less => vec![SweepPiece {
            key_lo,
            key_hi,
            f_lo: lo.1,
            f_hi: hi.1,
        }],
        std::cmp::Ordering::Equal => Vec::new(),
        std::cmp::Ordering::Greater => {
            let full = BigUint::one() << (bits + GAP_GUARD_BITS);
            vec![
                SweepPiece {
                    key_lo,
                    key_hi: full,
                    f_lo: lo.1,
                    f_hi: SplitValue::one(bits),
                },
                SweepPiece {
                    key_lo: BigUint::zero(),
                    key_hi,
                    f_lo: SplitValue::zero(),
                    f_hi: hi.1,
                },
            ]
        }
    }
}

/// The full circle as a single piece (radius at or above 1/2).
pub fn full_circle_piece(bits: u32) -> Vec<SweepPiece> {
    vec![SweepPiece {
        key_lo: BigUint::zero(),
        key_hi: BigUint::one() << (bits + GAP_GUARD_BITS),
        f_lo: SplitValue::zero(),
        f_hi: SplitValue::one(bits),
    }]
}

/// Pieces of the ball `B(center, radius)` translated so its center sits at
/// the dyadic `center_numer / 2^bits`, under the Lebesgue reference (the
/// CDF is the identity, so endpoint values double as CDF values).
pub fn rotation_arc_pieces(
    center_numer: &BigUint,
    bits: u32,
    radius: &BigRational,
) -> Vec<SweepPiece> {
    if radius.is_zero() {
        return Vec::new();
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if *radius >= half {
        return full_circle_piece(bits);
    }
    // Wrap decisions without building (and reducing) any big rational:
    // v/2^B < r  <=>  v rd < rn 2^B, and
    // v/2^B + r >= 1  <=>  v rd >= (rd - rn) 2^B.
    let rn = radius.numer();
    let rd = radius.denom();
    let v = BigInt::from(center_numer.clone());
    let v_rd = &v * rd;
    let lo_wraps = v_rd < (rn << bits);
    let hi_wraps = v_rd >= ((rd - rn) << bits);
    let one = BigRational::one();
    let lo = SplitValue {
        coarse: v.clone(),
        fine: if lo_wraps {
            &one - radius
        } else {
            -radius.clone()
        },
    };
    let hi = SplitValue {
        coarse: if hi_wraps {
            &v - (BigInt::one() << bits)
        } else {
            v
        },
        fine: radius.clone(),
    };
    let lo_raw = RawPos::from_split(&lo, bits);
    let hi_raw = RawPos::from_split(&hi, bits);
    arc_pieces((lo_raw, lo), (hi_raw, hi), bits)
}

/// Exact tail-union measure over the pieces: merge by key order, then sum
/// the CDF increments of the surviving intervals.
///
/// Returns `(measure, upper_bound)` where the upper bound is the plain sum
/// of the per-piece masses.
pub fn measure_union(pieces: &[&SweepPiece], bits: u32) -> (BigRational, BigRational) {
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&a, &b| {
        pieces[a]
            .key_lo
            .cmp(&pieces[b].key_lo)
            .then_with(|| pieces[a].key_hi.cmp(&pieces[b].key_hi))
    });

    // Upper bound: subadditive sum of all piece masses.
    let mut ub_coarse = BigInt::zero();
    let mut ub_fines = Vec::with_capacity(pieces.len() * 2);
    for p in pieces {
        ub_coarse += &p.f_hi.coarse - &p.f_lo.coarse;
        ub_fines.push(p.f_hi.fine.clone() - &p.f_lo.fine);
    }
    let upper =
        BigRational::new(ub_coarse, BigInt::one() << bits) + numeric::sum_rationals(ub_fines);

    // Merge and accumulate the union measure.
    let mut m_coarse = BigInt::zero();
    let mut m_fines: Vec<BigRational> = Vec::new();
    let mut current: Option<(usize, usize)> = None; // (lo piece, hi piece)
    let flush = |lo: usize, hi: usize, coarse: &mut BigInt, fines: &mut Vec<BigRational>| {
        *coarse += &pieces[hi].f_hi.coarse - &pieces[lo].f_lo.coarse;
        fines.push(pieces[hi].f_hi.fine.clone() - &pieces[lo].f_lo.fine);
    };
    for &i in &order {
        match current {
            None => current = Some((i, i)),
            Some((lo, hi)) => {
                if pieces[i].key_lo <= pieces[hi].key_hi {
                    if pieces[i].key_hi > pieces[hi].key_hi {
                        current = Some((lo, i));
                    }
                } else {
                    flush(lo, hi, &mut m_coarse, &mut m_fines);
                    current = Some((i, i));
                }
            }
        }
    }
    if let Some((lo, hi)) = current {
        flush(lo, hi, &mut m_coarse, &mut m_fines);
    }
    let measure =
        BigRational::new(m_coarse, BigInt::one() << bits) + numeric::sum_rationals(m_fines);
    (measure, upper)
}
