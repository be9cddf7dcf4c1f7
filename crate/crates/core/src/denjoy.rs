//! Truncated Denjoy homeomorphism: blow up the orbit `{n theta}` of 0 under
//! an irrational rotation into inserted intervals `I_n` of geometric length
//! `l_n = c * lambda^|n|`, for `|n| <= n_max`.
//!
//! The embedding sends a base-circle point `y` to
//! `Phi(y) = (1 - L) y + sum_{n : {n theta} < y} l_n`, where `L` is the total
//! tracked gap length, so the new circle has length exactly 1. The map `f`
//! acts affinely `I_n -> I_{n+1}` and by transport of the rotation on the
//! complement; the collapsing map `h` (with `h(Phi(y)) = y`) intertwines
//! `h ∘ f = R_theta ∘ h` exactly. The invariant measure is the pullback of
//! Lebesgue under `h`, i.e. its CDF *is* `h`.
//!
//! Truncation: gaps with `|n| > n_max` are simply never inserted, and an
//! orbit index walking past `±n_max` collapses that gap to its base point.
//! The untracked gap mass (the geometric tail) bounds the distance to the
//! untruncated construction and must sit below the requested tolerance.

use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::numeric::{self, Backend};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Parameters of the gap family and truncation.
#[derive(Clone, Debug)]
pub struct DenjoyParams {
    /// Rotation angle; must be irrational at the working precision.
    pub theta: CirclePoint,
    /// Gap length scale `c` (length of the central gap `I_0`).
    pub gap_scale: BigRational,
    /// Geometric ratio `lambda` in `(0, 1)`.
    pub gap_ratio: BigRational,
    /// Orbit indices `|n| <= n_max` get inserted gaps.
    pub n_max: u32,
    /// Upper bound the untracked tail mass must satisfy.
    pub tol: BigRational,
}

#[derive(Clone, Debug)]
struct Gap {
    /// Orbit index `n` of the blown-up point `{n theta}`.
    index: i64,
    /// Base-circle position `{n theta}`.
    base: BigRational,
    /// Left endpoint of the inserted interval on the new circle.
    start: BigRational,
    /// Inserted length `l_n`.
    len: BigRational,
    /// Dyadic numerator of `base` at the theta bit budget (fixed backend).
    base_numer: Option<BigUint>,
    /// `start * 2^bits * g0` and `len * 2^bits * g0`, exact integers.
    start_scaled: BigInt,
    len_scaled: BigInt,
}

/// A built Denjoy system; immutable after construction.
#[derive(Debug)]
pub struct DenjoySystem {
    theta: CirclePoint,
    theta_rat: BigRational,
    n_max: u32,
    /// Gaps sorted by base-circle position.
    gaps: Vec<Gap>,
    /// `1 - L` where `L` is the tracked inserted length.
    base_scale: BigRational,
    /// Exact untracked tail mass `sum_{|n| > n_max} l_n`.
    tail: BigRational,
    /// Length of the outermost tracked gap, `c * lambda^n_max`.
    edge_gap: BigRational,
    /// Common small denominator of the gap-length family (lcm of the
    /// denominators of scale, lengths, and prefixes), for integer-scaled
    /// sweep arithmetic.
    g0: BigInt,
    /// `base_scale * g0`, an exact integer.
    scale_scaled: BigInt,
    /// `cum_len * g0` per sorted slot (one trailing total entry).
    cum_scaled: Vec<BigInt>,
    /// `2^bits * g0`: the common denominator of every `start_scaled`.
    pow2_g0: BigInt,
    /// Theta bits (0 on the rational backend).
    bits: u32,
    /// `floor(start * 2^KEY_BITS)` per gap: a coarse search key; candidate
    /// slots are fixed up with exact cross-multiplication comparisons.
    start_keys: Vec<BigUint>,
    params: DenjoyParams,
}

/// Resolution of the coarse gap-search keys.
const KEY_BITS: u32 = 256;

/// Where a point of the Denjoy circle lives after collapsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DenjoyPosition {
    /// Point of the base circle (Cantor remainder or untracked orbit point).
    Base { y: BigRational },
    /// Inside (or at the left endpoint of) the inserted interval `I_index`,
    /// at relative offset `t` in `[0, 1)`.
    Gap {
        index: i64,
        y: BigRational,
        t: BigRational,
    },
}

impl DenjoyPosition {
    pub fn base_point(&self) -> &BigRational {
        match self {
            DenjoyPosition::Base { y } => y,
            DenjoyPosition::Gap { y, .. } => y,
        }
    }
}

impl DenjoySystem {
    pub fn build(params: DenjoyParams) -> Result<DenjoySystem> {
        let one = BigRational::one();
        let two = BigRational::from_integer(BigInt::from(2));
        let c = &params.gap_scale;
        let lam = &params.gap_ratio;
        if !c.is_positive() {
            return Err(Error::InvalidParameter("gap scale c must be > 0".into()));
        }
        if !lam.is_positive() || lam >= &one {
            return Err(Error::InvalidParameter(
                "gap ratio lambda must lie in (0, 1)".into(),
            ));
        }
        // Total untruncated insertion L = c (1 + 2 lambda / (1 - lambda)).
        let full_mass = c * (&one + &two * lam / (&one - lam));
        if full_mass >= one {
            return Err(Error::InvalidParameter(format!(
                "total inserted length {full_mass} must be < 1"
            )));
        }
        if let Backend::Rational = params.theta.backend() {
            let denom = params.theta.to_rational().denom().clone();
            if denom <= BigInt::from(1_000_000u64) {
                return Err(Error::InvalidParameter(
                    "rotation angle must be irrational to working precision \
                     (rational with denominator <= 10^6 rejected)"
                        .into(),
                ));
            }
        }

        let n_max = params.n_max;
        // Geometric tail sum_{|n| > N} l_n = 2 c lambda^{N+1} / (1 - lambda).
        let lam_pow_next = pow_rational(lam, n_max as i64 + 1);
        let tail = &two * c * &lam_pow_next / (&one - lam);
        if tail > params.tol {
            return Err(Error::TolUnachievable {
                tail: tail.to_string(),
                tol: params.tol.to_string(),
                n_max,
            });
        }

        // Orbit points {n theta} for |n| <= N with their gap lengths.
        let theta = params.theta.clone();
        let zero_pt = CirclePoint::zero(theta.backend());
        let mut gaps: Vec<Gap> = Vec::with_capacity(2 * n_max as usize + 1);
        for n in -(n_max as i64)..=(n_max as i64) {
            let mag = BigUint::from(n.unsigned_abs());
            let y = if n == 0 {
                zero_pt.clone()
            } else {
                let pos = theta.mul_int(&mag)?;
                if n > 0 {
                    pos
                } else {
                    zero_pt.sub(&pos)?
                }
            };
            let len = c * pow_rational(lam, n.abs());
            gaps.push(Gap {
                index: n,
                base_numer: y.fixed_parts().map(|(v, _)| v.clone()),
                base: y.to_rational(),
                start: BigRational::zero(),
                len,
                start_scaled: BigInt::zero(),
                len_scaled: BigInt::zero(),
            });
        }
        gaps.sort_by(|a, b| a.base.cmp(&b.base));
        for pair in gaps.windows(2) {
            if pair[0].base == pair[1].base {
                return Err(Error::InvalidParameter(format!(
                    "orbit points {n1} theta and {n2} theta collide; \
                     theta is not irrational at this precision",
                    n1 = pair[0].index,
                    n2 = pair[1].index
                )));
            }
        }

        let tracked: BigRational = gaps.iter().fold(BigRational::zero(), |acc, g| acc + &g.len);
        let base_scale = &one - &tracked;
        let mut cum_len = Vec::with_capacity(gaps.len() + 1);
        let mut acc = BigRational::zero();
        for g in gaps.iter_mut() {
            cum_len.push(acc.clone());
            g.start = &base_scale * &g.base + &acc;
            acc += &g.len;
        }
        cum_len.push(acc);

        // Integer-scaled tables for the sweep fast path: g0 clears every
        // small denominator in the gap-length family.
        let mut g0 = base_scale.denom().clone();
        for g in &gaps {
            g0 = num_integer::Integer::lcm(&g0, g.len.denom());
        }
        for clen in &cum_len {
            g0 = num_integer::Integer::lcm(&g0, clen.denom());
        }
        let bits = theta.fixed_parts().map(|(_, b)| b).unwrap_or(0);
        let pow2_g0 = (BigInt::one() << bits) * &g0;
        let to_scaled = |x: &BigRational| -> BigInt {
            let v = x * BigRational::from_integer(pow2_g0.clone());
            debug_assert!(v.is_integer());
            v.to_integer()
        };
        for g in gaps.iter_mut() {
            g.start_scaled = to_scaled(&g.start);
            g.len_scaled = to_scaled(&g.len);
        }
        let scale_scaled = {
            let v = &base_scale * BigRational::from_integer(g0.clone());
            debug_assert!(v.is_integer());
            v.to_integer()
        };
        let cum_scaled = cum_len
            .iter()
            .map(|x| {
                let v = x * BigRational::from_integer(g0.clone());
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect();

        let pow2_g0 = (BigInt::one() << bits) * &g0;
        let start_keys = gaps
            .iter()
            .map(|g| {
                ((&g.start_scaled << KEY_BITS) / &pow2_g0)
                    .to_biguint()
                    .expect("start in [0, 1)")
            })
            .collect();

        let edge_gap = c * pow_rational(lam, n_max as i64);
        Ok(DenjoySystem {
            theta_rat: theta.to_rational(),
            theta,
            n_max,
            gaps,
            base_scale,
            tail,
            edge_gap,
            g0,
            scale_scaled,
            cum_scaled,
            pow2_g0,
            bits,
            start_keys,
            params,
        })
    }

    pub fn theta(&self) -> &CirclePoint {
        &self.theta
    }

    pub fn theta_rational(&self) -> &BigRational {
        &self.theta_rat
    }

    pub fn params(&self) -> &DenjoyParams {
        &self.params
    }

    /// Exact untracked gap mass; every evaluation of the system is within
    /// this bound of the untruncated construction.
    pub fn tail_bound(&self) -> &BigRational {
        &self.tail
    }

    /// `1 - L`: the factor by which the base circle was rescaled to make
    /// room for the inserted gaps.
    pub fn base_scale(&self) -> &BigRational {
        &self.base_scale
    }

    /// Length of the outermost tracked gap (collapse defect of one step).
    pub fn edge_gap(&self) -> &BigRational {
        &self.edge_gap
    }

    /// Clone-or-reduce into `[0, 1)`; cheap when already there.
    fn reduce_unit(u: &BigRational) -> BigRational {
        if !u.is_negative() && u.numer().magnitude() < u.denom().magnitude() {
            u.clone()
        } else {
            numeric::frac_mod_one(u)
        }
    }

    /// The embedding `Phi`: base-circle `y` to its position on the new
    /// circle. Orbit points map to the left endpoint of their gap.
    ///
    /// Comparisons and the affine step run on precomputed scaled integers;
    /// the default `Ord` on big rationals recurses through continued
    /// fractions and its divisions dominate everything at large bit budgets.
    pub fn embed(&self, y: &BigRational) -> BigRational {
        let y = Self::reduce_unit(y);
        let (yn, yd) = (y.numer(), y.denom());
        // Inserted mass strictly below y.
        let idx = if self.bits > 0 {
            let rhs = yn << self.bits;
            self.gaps.partition_point(|g| {
                let v = g.base_numer.as_ref().expect("fixed backend");
                BigInt::from(v.clone()) * yd < rhs
            })
        } else {
            self.gaps.partition_point(|g| g.base < y)
        };
        // (scale * y + prefix) over the common denominator g0 * yd.
        BigRational::new(
            &self.scale_scaled * yn + &self.cum_scaled[idx] * yd,
            &self.g0 * yd,
        )
    }

    /// Decompose a point `u` of the new circle: which gap it lies in, if
    /// any, and the base-circle point `h(u)` it collapses to. The gap slot
    /// is located through coarse integer keys and fixed up with exact
    /// cross-multiplication comparisons against the scaled gap table.
    ///
    /// The offset `t` of a gap point is returned unreduced; only its value
    /// matters downstream.
    pub fn collapse(&self, u: &BigRational) -> DenjoyPosition {
        let u = Self::reduce_unit(u);
        let (un, ud) = (u.numer(), u.denom());
        let u_key = ((un << KEY_BITS) / ud).to_biguint().expect("u in [0, 1)");
        // Number of gaps with start <= u.
        let mut idx = self.start_keys.partition_point(|k| *k <= u_key);
        let lhs_u = un * &self.pow2_g0;
        while idx > 0 && &self.gaps[idx - 1].start_scaled * ud > lhs_u {
            idx -= 1;
        }
        while idx < self.gaps.len() && &self.gaps[idx].start_scaled * ud <= lhs_u {
            idx += 1;
        }
        if idx > 0 {
            let g = &self.gaps[idx - 1];
            // Inside the gap iff u < start + len.
            let end_scaled = (&g.start_scaled + &g.len_scaled) * ud;
            if lhs_u < end_scaled {
                let t_num = &lhs_u - &g.start_scaled * ud;
                let t_den = &g.len_scaled * ud;
                return DenjoyPosition::Gap {
                    index: g.index,
                    y: g.base.clone(),
                    t: BigRational::new_raw(t_num, t_den),
                };
            }
            // Mass of gaps 0..idx lies entirely below u:
            // y = (u - below) / scale = (un g0 - below_scaled ud) / (ud scale_scaled).
            let below = &self.cum_scaled[idx];
            return DenjoyPosition::Base {
                y: BigRational::new(un * &self.g0 - below * ud, ud * &self.scale_scaled),
            };
        }
        DenjoyPosition::Base {
            y: BigRational::new(un * &self.g0, ud * &self.scale_scaled),
        }
    }

    /// The collapsing semiconjugacy `h` (also the CDF of the invariant
    /// measure): monotone, `h(0) = 0`, constant across each gap.
    pub fn collapse_value(&self, u: &BigRational) -> BigRational {
        if *u >= BigRational::one() {
            return BigRational::one();
        }
        self.collapse(u).base_point().clone()
    }

    fn position_of_index(&self, index: i64) -> &Gap {
        // Gap table is small; sorted by base, so look up by linear scan of
        // indices would also do. Binary search over a precomputed order is
        // not worth it for 2 n_max + 1 entries.
        self.gaps
            .iter()
            .find(|g| g.index == index)
            .expect("tracked index")
    }

    /// `f^n(u)` for signed `n`, computed in one shot: exact composition of
    /// the truncated single-step map, because an orbit index that leaves the
    /// tracked window never re-enters while stepping in one direction.
    pub fn apply_steps(&self, u: &BigRational, n: &BigInt) -> BigRational {
        match self.collapse(u) {
            DenjoyPosition::Gap { index, y, t } => {
                let new_index = BigInt::from(index) + n;
                if new_index.magnitude() <= &BigUint::from(self.n_max) {
                    let idx = i64::try_from(&new_index).expect("within tracked window");
                    let g = self.position_of_index(idx);
                    // start' + t * len' over pow2_g0 * t_den.
                    BigRational::new(
                        &g.start_scaled * t.denom() + t.numer() * &g.len_scaled,
                        &self.pow2_g0 * t.denom(),
                    )
                } else {
                    // The target gap was never inserted: collapse to its
                    // base orbit point. Defect <= edge_gap.
                    let y_new = y + BigRational::from_integer(n.clone()) * &self.theta_rat;
                    self.embed(&y_new)
                }
            }
            DenjoyPosition::Base { y } => {
                let y_new = y + BigRational::from_integer(n.clone()) * &self.theta_rat;
                self.embed(&y_new)
            }
        }
    }

    /// Averaged lift displacement over `iterations` forward steps, exactly:
    /// `(u_n - u_0 + wraps) / n`. Each per-step displacement representative
    /// lies in `(0, 1)` (the map has no fixed point), so the integer part of
    /// the lift displacement is exactly the number of passes of the base
    /// orbit through 0, which an integer-scaled orbit walk counts without
    /// ever embedding intermediate points.
    pub fn rotation_number_mean(&self, iterations: u64, from: &BigRational) -> BigRational {
        let u0 = Self::reduce_unit(from);
        let (y0, gap0) = match self.collapse(&u0) {
            DenjoyPosition::Base { y } => (y, None),
            DenjoyPosition::Gap { index, y, t } => (y, Some((index, t))),
        };
        let n_rat = BigRational::from_integer(BigInt::from(iterations));
        let (wraps, y_n) = match self.theta.fixed_parts() {
            Some((tv, bits)) => {
                // Track s_j = y_j scaled by 2^bits * fd as a plain integer.
                let fd = y0.denom();
                let modulus = (BigInt::one() << bits) * fd;
                let step = BigInt::from(tv.clone()) * fd;
                let mut s = y0.numer() << bits;
                let mut wraps = 0u64;
                for _ in 0..iterations {
                    s += &step;
                    if s >= modulus {
                        s -= &modulus;
                        wraps += 1;
                    }
                }
                (wraps, BigRational::new(s, modulus))
            }
            None => {
                let mut y = y0.clone();
                let mut wraps = 0u64;
                for _ in 0..iterations {
                    y += &self.theta_rat;
                    if y >= BigRational::one() {
                        y -= BigRational::one();
                        wraps += 1;
                    }
                }
                (wraps, y)
            }
        };
        let u_n = match gap0 {
            Some((m0, t)) => {
                let m_n = BigInt::from(m0) + BigInt::from(iterations);
                if m_n.magnitude() <= &BigUint::from(self.n_max) {
                    let idx = i64::try_from(&m_n).expect("within tracked window");
                    let g = self.position_of_index(idx);
                    BigRational::new(
                        &g.start_scaled * t.denom() + t.numer() * &g.len_scaled,
                        &self.pow2_g0 * t.denom(),
                    )
                } else {
                    self.embed(&y_n)
                }
            }
            None => self.embed(&y_n),
        };
        (u_n - u0 + BigRational::from_integer(BigInt::from(wraps))) / n_rat
    }

    /// Single forward (`+1`) or inverse (`-1`) application.
    pub fn apply(&self, direction: i8, u: &BigRational) -> BigRational {
        self.apply_steps(u, &BigInt::from(direction))
    }

    /// Transported endpoint for the exact sweep fast path: the position of
    /// `f^{-back}(u)` as an unreduced scaled fraction plus the CDF value
    /// there in split form. Available on the fixed theta backend only.
    ///
    /// Every returned position has denominator `2^bits * g0 * small` with a
    /// small cofactor, which is what makes integer position keys faithful.
    pub(crate) fn sweep_endpoint(
        &self,
        u: &BigRational,
        back: &BigUint,
    ) -> Option<(crate::sweep::RawPos, crate::sweep::SplitValue)> {
        use crate::sweep::{RawPos, SplitValue};
        let (tv, bits) = self.theta.fixed_parts()?;
        let mask = (BigUint::one() << bits) - BigUint::one();
        match self.collapse(u) {
            DenjoyPosition::Gap { index, y: _, t: _ } => {
                let target = BigInt::from(index) - BigInt::from(back.clone());
                if target.magnitude() <= &BigUint::from(self.n_max) {
                    // Affine transport I_m -> I_{m'}: the offset rescales by
                    // len_{m'} / len_m = lambda^(|m'| - |m|), so the position
                    // is start_{m'} + (u - start_m) * lambda^diff, with every
                    // factor of c cancelled.
                    let idx = i64::try_from(&target).expect("inside the tracked window");
                    let src = self.position_of_index(index);
                    let dst = self.position_of_index(idx);
                    let lam = &self.params.gap_ratio;
                    let diff = idx.abs() - index.abs();
                    let (r_num, r_den) = if diff >= 0 {
                        let p = pow_rational(lam, diff);
                        (p.numer().clone(), p.denom().clone())
                    } else {
                        let p = pow_rational(lam, -diff);
                        (p.denom().clone(), p.numer().clone())
                    };
                    let u_den = u.denom();
                    let u_num = u.numer();
                    // offset * (2^bits * g0 * u_den) as an integer:
                    let pow2_g0 = (BigInt::one() << bits) * &self.g0;
                    let off_scaled = u_num * &pow2_g0 - &src.start_scaled * u_den;
                    debug_assert!(!off_scaled.is_negative());
                    let num = &dst.start_scaled * u_den * &r_den + off_scaled * &r_num;
                    let pos = RawPos {
                        num,
                        small: &self.g0 * u_den * &r_den,
                    };
                    let f = SplitValue::from_coarse(BigInt::from(
                        dst.base_numer.clone().expect("fixed backend"),
                    ));
                    Some((pos, f))
                } else {
                    // Target gap never inserted: collapse to the orbit point.
                    let v = (target.magnitude() * tv) & &mask;
                    let coarse = if target.is_negative() && !v.is_zero() {
                        BigInt::from((BigUint::one() << bits) - v)
                    } else {
                        BigInt::from(v)
                    };
                    Some(self.embed_split(SplitValue::from_coarse(coarse), bits))
                }
            }
            DenjoyPosition::Base { y } => {
                let shift = (back * tv) & &mask;
                let split = SplitValue {
                    coarse: -BigInt::from(shift),
                    fine: y,
                }
                .reduced_mod_one(bits);
                Some(self.embed_split(split, bits))
            }
        }
    }

    /// Embed a split base point: the new-circle position in raw scaled form
    /// and the CDF value there (the base point itself).
    fn embed_split(
        &self,
        y: crate::sweep::SplitValue,
        bits: u32,
    ) -> (crate::sweep::RawPos, crate::sweep::SplitValue) {
        use crate::sweep::RawPos;
        let fd = y.fine.denom().clone();
        // y as the integer y * (2^bits * fd).
        let y_scaled = &y.coarse * &fd + y.fine.numer() * (BigInt::one() << bits);
        debug_assert!(!y_scaled.is_negative());
        // Inserted mass strictly below y.
        let idx = self.gaps.partition_point(|g| {
            let v = g.base_numer.as_ref().expect("fixed backend");
            BigInt::from(v.clone()) * &fd < y_scaled
        });
        // position * (2^bits * g0 * fd) = scale_scaled * y_scaled
        //                               + cum_scaled[idx] * 2^bits * fd.
        let num = &self.scale_scaled * &y_scaled
            + &self.cum_scaled[idx] * ((BigInt::one() << bits) * &fd);
        (
            RawPos {
                num,
                small: &self.g0 * fd,
            },
            y,
        )
    }

    pub(crate) fn has_fixed_backend(&self) -> bool {
        self.theta.fixed_parts().is_some()
    }
}

fn pow_rational(x: &BigRational, n: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn golden_params(bits: u32) -> DenjoyParams {
        DenjoyParams {
            theta: CirclePoint::golden(bits),
            gap_scale: rat(1, 6),
            gap_ratio: rat(1, 2),
            n_max: 24,
            tol: rat(1, 1_000_000),
        }
    }

    #[test]
    fn total_gap_mass_is_half_for_reference_parameters() {
        // c = 1/6, lambda = 1/2: c (1 + 2 lambda / (1 - lambda)) = 1/2.
        let sys = DenjoySystem::build(golden_params(192)).unwrap();
        let tracked = BigRational::one() - sys.base_scale();
        let expected_full = rat(1, 2);
        assert_eq!(tracked + sys.tail_bound().clone(), expected_full);
    }

    #[test]
    fn embedding_is_strictly_increasing() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        let mut prev = sys.embed(&rat(0, 1));
        for i in 1..200 {
            let y = rat(i, 200);
            let cur = sys.embed(&y);
            assert!(cur > prev, "Phi not increasing at {y}");
            prev = cur;
        }
    }

    #[test]
    fn collapse_inverts_embedding() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        for i in 0..500 {
            let y = rat(i, 500);
            let u = sys.embed(&y);
            assert_eq!(sys.collapse_value(&u), y);
        }
    }

    #[test]
    fn gap_endpoints_map_to_next_gap() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        let g0 = sys.position_of_index(0);
        let g1 = sys.position_of_index(1);
        let image = sys.apply(1, &g0.start.clone());
        assert_eq!(image, g1.start);
        // Interior point at relative offset t keeps its offset.
        let mid = &g0.start + rat(1, 3) * &g0.len;
        let image_mid = sys.apply(1, &mid);
        assert_eq!(image_mid, &g1.start + rat(1, 3) * &g1.len);
    }

    #[test]
    fn semiconjugacy_is_exact_on_a_grid() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        let theta = sys.theta_rational().clone();
        for i in 0..200 {
            let u = rat(i, 200);
            let lhs = sys.collapse_value(&sys.apply(1, &u));
            let rhs = numeric::frac_mod_one(&(sys.collapse_value(&u) + &theta));
            assert_eq!(lhs, rhs, "semiconjugacy defect at {u}");
        }
    }

    #[test]
    fn inverse_round_trips() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        for i in 0..100 {
            let u = rat(i, 100);
            let back = sys.apply(-1, &sys.apply(1, &u));
            assert_eq!(back, u);
        }
    }

    #[test]
    fn multi_step_matches_single_steps() {
        let sys = DenjoySystem::build(golden_params(128)).unwrap();
        let mut u = rat(7, 10);
        for _ in 0..17 {
            u = sys.apply(1, &u);
        }
        assert_eq!(sys.apply_steps(&rat(7, 10), &BigInt::from(17)), u);
    }

    #[test]
    fn rejects_rational_angles_and_bad_tolerances() {
        let mut p = golden_params(128);
        p.theta = CirclePoint::from_fraction(1, 4);
        assert!(DenjoySystem::build(p).is_err());

        let mut p = golden_params(128);
        p.tol = rat(1, 10_000_000_000_000_000);
        assert!(matches!(
            DenjoySystem::build(p),
            Err(Error::TolUnachievable { .. })
        ));
    }
}
