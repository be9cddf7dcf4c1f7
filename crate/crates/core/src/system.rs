//! The dynamical systems under study, as executable actions: multiplicative
//! expanding maps `alpha -> k alpha` on `T^1`, the simultaneous `N^n` action
//! on `T^n`, rigid rotations, and the truncated Denjoy homeomorphism.
//!
//! Expanding variants expose the forward action only (they are k-to-1, so
//! experiments count forward hits instead of constructing preimage sets);
//! rotations and Denjoy maps additionally expose inverse-map access, ball
//! preimages, best-return recurrence times, and rotation-number estimates.

use crate::circle::{act, dist, Arc as Ball, CirclePoint, SemigroupIndex, TorusPoint};
use crate::denjoy::DenjoySystem;
use crate::error::{Error, Result};
use crate::numeric::{self, convergent_denominators, Backend};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Default best-return scan budget: covers convergent denominators well
/// past desk-scale horizons.
pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

/// A measure-preserving action `(G, T)`.
#[derive(Clone, Debug)]
pub enum SystemSpec {
    /// `G = (N, *)`, `T^k alpha = k alpha` on `T^1`.
    MultExpanding,
    /// `G = N^n` under componentwise multiplication on `T^n`.
    SimultExpanding { dim: usize },
    /// `G = (N, +)`, `T^n alpha = alpha + n theta`; a nu-preserving isometry.
    Rotation { theta: CirclePoint },
    /// `G = (N, +)`, the built Denjoy homeomorphism.
    Denjoy(Arc<DenjoySystem>),
}

/// The open arc `f^{-n} B(x, r) = (a_n, b_n)`, endpoints read
/// counterclockwise, with its exact length.
#[derive(Clone, Debug)]
pub struct PreimageInterval {
    pub a: BigRational,
    pub b: BigRational,
    pub step: BigUint,
    pub length: BigRational,
}

impl PreimageInterval {
    /// Non-wrapping open pieces `(lo, hi)` with `0 <= lo < hi <= 1`.
    pub fn pieces(&self) -> Vec<(BigRational, BigRational)> {
        if self.length.is_zero() {
            return Vec::new();
        }
        if self.length == BigRational::one() {
            return vec![(BigRational::zero(), BigRational::one())];
        }
        let end = &self.a + &self.length;
        if end <= BigRational::one() {
            vec![(self.a.clone(), end)]
        } else {
            vec![
                (self.a.clone(), BigRational::one()),
                (BigRational::zero(), end - BigRational::one()),
            ]
        }
    }

    /// Metric diameter: length capped at the circle diameter 1/2.
    pub fn diameter(&self) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if self.length > half {
            half
        } else {
            self.length.clone()
        }
    }
}

/// Best-return times of the inverse map at a base point: `n` is recorded iff
/// `d(f^{-n}(x), x)` strictly beats every earlier distance (and the trivial
/// bound 1/2). Distances are strictly decreasing by construction.
#[derive(Clone, Debug)]
pub struct RecurrenceTimes {
    pub base: CirclePoint,
    pub times: Vec<BigUint>,
    pub distances: Vec<BigRational>,
    /// Last scanned exponent (0 when constructed from convergents).
    pub scanned_to: u64,
    /// False when the scan budget ran out before `requested` entries.
    pub complete: bool,
    pub requested: usize,
}

impl RecurrenceTimes {
    /// Best-return times of a rotation computed from an independent
    /// continued-fraction expansion of the angle. For the golden angle the
    /// times are the Fibonacci numbers. Also serves as the cross-oracle for
    /// the brute-force scan.
    pub fn rotation_convergents(theta: &CirclePoint, count: usize) -> Result<RecurrenceTimes> {
        let theta_rat = theta.to_rational();
        if theta_rat.is_zero() {
            return Err(Error::InvalidParameter(
                "rotation by zero never returns closer than it starts".into(),
            ));
        }
        let denoms = convergent_denominators(&theta_rat, count + 4, count + 64);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut times = Vec::with_capacity(count);
        let mut distances: Vec<BigRational> = Vec::with_capacity(count);
        for q in denoms {
            let pos = numeric::frac_mod_one(
                &(&theta_rat * BigRational::from_integer(BigInt::from(q.clone()))),
            );
            let d = {
                let complement = BigRational::one() - &pos;
                if pos <= complement {
                    pos
                } else {
                    complement
                }
            };
            if d >= half {
                continue;
            }
            if let Some(last) = distances.last() {
                if d >= *last {
                    continue;
                }
            }
            times.push(q);
            distances.push(d.clone());
            if times.len() >= count || d.is_zero() {
                break;
            }
        }
        let complete = times.len() >= count;
        Ok(RecurrenceTimes {
            base: CirclePoint::zero(theta.backend()),
            times,
            distances,
            scanned_to: 0,
            complete,
            requested: count,
        })
    }

    /// Recurrence times of the golden rotation generated directly as the
    /// Fibonacci numbers (its convergent denominators), for counts far past
    /// what a scan or a dyadic continued-fraction read-off can certify. The
    /// angle must carry enough bits for the largest time: strict decrease of
    /// the exact distances is validated and fails loudly otherwise.
    pub fn golden_fibonacci(bits: u32, count: usize) -> Result<RecurrenceTimes> {
        let theta = CirclePoint::golden(bits);
        let zero = CirclePoint::zero(theta.backend());
        let mut times = Vec::with_capacity(count);
        let (mut a, mut b) = (BigUint::from(1u32), BigUint::from(2u32));
        for _ in 0..count {
            times.push(a.clone());
            let next = &a + &b;
            a = std::mem::replace(&mut b, next);
        }
        let mut distances = Vec::with_capacity(count);
        let modulus = BigUint::one() << bits;
        for q in &times {
            let p = theta.mul_int(q)?;
            let (v, _) = p.fixed_parts().expect("fixed backend");
            // Distance on the dyadic grid, kept unreduced: comparisons and
            // reporting never need the gcd.
            let complement = &modulus - v;
            let d_num = if v <= &complement {
                v.clone()
            } else {
                complement
            };
            let d = BigRational::new_raw(BigInt::from(d_num), BigInt::from(modulus.clone()));
            if let Some(last) = distances.last() {
                if &d >= last {
                    return Err(Error::PrecisionExhausted {
                        needed: q.bits() + u64::from(Backend::MIN_HEADROOM_BITS),
                        available: u64::from(bits),
                    });
                }
            }
            distances.push(d);
        }
        Ok(RecurrenceTimes {
            base: zero,
            times,
            distances,
            scanned_to: 0,
            complete: true,
            requested: count,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest recurrence time, in bits (for precision budgeting).
    pub fn max_time_bits(&self) -> u64 {
        self.times.last().map_or(0, |t| t.bits())
    }
}

/// Fixed-point budget adequate for transporting balls along every time in a
/// Fibonacci family of the given length. The budget must absorb the
/// multiplier (log2(F_k) ~ 0.6943 k bits) *and* still resolve the return
/// distance, which shrinks at the same exponential rate; hence the factor
/// two.
pub fn golden_bits_for(count: usize) -> u32 {
    let needed = (count as f64 * 2.0 * 0.69424191 + 192.0).ceil() as u64;
    (needed.div_ceil(64) * 64) as u32
}

impl SystemSpec {
    pub fn rotation(theta: CirclePoint) -> SystemSpec {
        SystemSpec::Rotation { theta }
    }

    pub fn denjoy(system: Arc<DenjoySystem>) -> SystemSpec {
        SystemSpec::Denjoy(system)
    }

    /// Phase-space dimension.
    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::SimultExpanding { dim } => *dim,
            _ => 1,
        }
    }

    pub fn is_invertible(&self) -> bool {
        matches!(self, SystemSpec::Rotation { .. } | SystemSpec::Denjoy(_))
    }

    pub fn is_isometry(&self) -> bool {
        matches!(self, SystemSpec::Rotation { .. })
    }

    /// Forward action. For the expanding variants `g` is a multiplicative
    /// index (n-dimensional for the simultaneous action); for rotation-like
    /// systems a scalar `g` is the additive exponent.
    pub fn forward(&self, g: &SemigroupIndex, alpha: &TorusPoint) -> Result<TorusPoint> {
        match self {
            SystemSpec::MultExpanding => {
                if alpha.dim() != 1 || g.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: alpha.dim().max(g.dim()),
                    });
                }
                act(g, alpha)
            }
            SystemSpec::SimultExpanding { dim } => {
                if alpha.dim() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: alpha.dim(),
                    });
                }
                act(g, alpha)
            }
            SystemSpec::Rotation { theta } => {
                if alpha.dim() != 1 || g.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: alpha.dim().max(g.dim()),
                    });
                }
                let step = theta.mul_int(g.scalar_value())?;
                Ok(TorusPoint::scalar(alpha.coord(0).add(&step)?))
            }
            SystemSpec::Denjoy(sys) => {
                if alpha.dim() != 1 || g.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: alpha.dim().max(g.dim()),
                    });
                }
                let n = BigInt::from(g.scalar_value().clone());
                let u = alpha.coord(0).to_rational();
                Ok(TorusPoint::scalar(CirclePoint::from_rational(
                    sys.apply_steps(&u, &n),
                )))
            }
        }
    }

    /// `f^{-n}(x)` for invertible systems; `n = 0` is the identity.
    pub fn backward_point(&self, n: &BigUint, x: &CirclePoint) -> Result<CirclePoint> {
        match self {
            SystemSpec::Rotation { theta } => {
                let shift =
                    &theta.to_rational() * BigRational::from_integer(BigInt::from(n.clone()));
                Ok(CirclePoint::from_rational(x.to_rational() - shift))
            }
            SystemSpec::Denjoy(sys) => {
                let steps = -BigInt::from(n.clone());
                Ok(CirclePoint::from_rational(
                    sys.apply_steps(&x.to_rational(), &steps),
                ))
            }
            _ => Err(Error::NotInvertible),
        }
    }

    /// The open arc `f^{-n} B(x, r)`, exact for rotations and within the
    /// truncation tolerance for Denjoy systems. An orientation-preserving
    /// homeomorphism takes open balls to open arcs, so transporting the two
    /// endpoints suffices; `f^{-n}(x)` lying inside the result is checked.
    pub fn preimage_ball(&self, n: &BigUint, ball: &Ball) -> Result<PreimageInterval> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let (a, b) = ball.endpoints();
        let length = ball.length();
        match self {
            SystemSpec::Rotation { theta } => {
                let shift =
                    &theta.to_rational() * BigRational::from_integer(BigInt::from(n.clone()));
                let a_n = numeric::frac_mod_one(&(a - &shift));
                let b_n = numeric::frac_mod_one(&(b - &shift));
                Ok(PreimageInterval {
                    a: a_n,
                    b: b_n,
                    step: n.clone(),
                    length,
                })
            }
            SystemSpec::Denjoy(sys) => {
                if length.is_zero() {
                    let c = self.backward_point(n, ball.center())?.to_rational();
                    return Ok(PreimageInterval {
                        a: c.clone(),
                        b: c,
                        step: n.clone(),
                        length: BigRational::zero(),
                    });
                }
                let steps = -BigInt::from(n.clone());
                let a_n = sys.apply_steps(&a, &steps);
                let b_n = sys.apply_steps(&b, &steps);
                let pre_len = if length == BigRational::one() {
                    BigRational::one()
                } else {
                    numeric::frac_mod_one(&(&b_n - &a_n))
                };
                let result = PreimageInterval {
                    a: a_n.clone(),
                    b: b_n,
                    step: n.clone(),
                    length: pre_len,
                };
                if result.length.is_positive() && result.length < BigRational::one() {
                    let c_n = self.backward_point(n, ball.center())?.to_rational();
                    let offset = numeric::frac_mod_one(&(&c_n - &a_n));
                    // Closed containment: truncation can collapse the center
                    // preimage onto an endpoint (defect below the tracked
                    // tail), never outside.
                    assert!(
                        offset <= result.length,
                        "preimage interval must contain the center preimage"
                    );
                }
                Ok(result)
            }
            _ => unreachable!("guarded by is_invertible"),
        }
    }

    /// First `count` best-return times of `f^{-1}` at `x`, found by a
    /// forward scan of `n <= budget`. Stops early once an exact return
    /// (distance zero) is found, since no later time can improve on it.
    /// An exhausted budget is reported through `complete = false` with the
    /// partial results kept.
    pub fn recurrence_times(
        &self,
        x: &CirclePoint,
        count: usize,
        budget: u64,
    ) -> Result<RecurrenceTimes> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut best = half;
        let mut times = Vec::with_capacity(count);
        let mut distances = Vec::with_capacity(count);
        let mut scanned = 0u64;

        match self {
            SystemSpec::Rotation { theta } => {
                let mut p = x.clone();
                for n in 1..=budget {
                    scanned = n;
                    p = p.sub(theta)?;
                    let d = dist(&p, x);
                    if d < best {
                        best = d.clone();
                        times.push(BigUint::from(n));
                        let is_zero = d.is_zero();
                        distances.push(d);
                        if times.len() >= count || is_zero {
                            break;
                        }
                    }
                }
            }
            SystemSpec::Denjoy(sys) => {
                let xr = x.to_rational();
                let minus_one = BigInt::from(-1);
                let mut u = xr.clone();
                for n in 1..=budget {
                    scanned = n;
                    u = sys.apply_steps(&u, &minus_one);
                    let diff = numeric::frac_mod_one(&(&u - &xr));
                    let complement = BigRational::one() - &diff;
                    let d = if diff <= complement { diff } else { complement };
                    if d < best {
                        best = d.clone();
                        times.push(BigUint::from(n));
                        let is_zero = d.is_zero();
                        distances.push(d);
                        if times.len() >= count || is_zero {
                            break;
                        }
                    }
                }
            }
            _ => unreachable!("guarded by is_invertible"),
        }

        let complete = times.len() >= count || distances.last().is_some_and(|d| d.is_zero());
        Ok(RecurrenceTimes {
            base: x.clone(),
            times,
            distances,
            scanned_to: scanned,
            complete,
            requested: count,
        })
    }

    /// Rotation-number estimate after `iterations` steps: the averaged lift
    /// displacement. Exact for rotations; for Denjoy maps the estimate is
    /// within `1/iterations` of the rotation number of the homeomorphism.
    pub fn rotation_number_estimate(
        &self,
        iterations: u64,
        from: &CirclePoint,
    ) -> Result<BigRational> {
        if iterations == 0 {
            return Err(Error::InvalidParameter(
                "rotation number estimate needs iterations >= 1".into(),
            ));
        }
        match self {
            SystemSpec::Rotation { theta } => {
                // The lift displacement after n steps is exactly n theta.
                Ok(theta.to_rational())
            }
            SystemSpec::Denjoy(sys) => {
                Ok(sys.rotation_number_mean(iterations, &from.to_rational()))
            }
            _ => Err(Error::NotInvertible),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denjoy::DenjoyParams;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_fraction(n, d)
    }

    #[test]
    fn forward_examples() {
        let mult = SystemSpec::MultExpanding;
        let out = mult
            .forward(&SemigroupIndex::scalar(4), &TorusPoint::scalar(pt(3, 10)))
            .unwrap();
        assert_eq!(out.coord(0).to_rational(), rat(2, 10));

        let rot = SystemSpec::rotation(pt(1, 4));
        let out = rot
            .forward(&SemigroupIndex::scalar(3), &TorusPoint::scalar(pt(9, 10)))
            .unwrap();
        assert_eq!(out.coord(0).to_rational(), rat(65, 100));

        let simult = SystemSpec::SimultExpanding { dim: 2 };
        let k = SemigroupIndex::new(vec![BigUint::from(2u32), BigUint::from(3u32)]).unwrap();
        let alpha = TorusPoint::new(vec![pt(4, 10), pt(5, 10)]).unwrap();
        let out = simult.forward(&k, &alpha).unwrap();
        assert_eq!(out.coord(0).to_rational(), rat(8, 10));
        assert_eq!(out.coord(1).to_rational(), rat(5, 10));
    }

    #[test]
    fn expanding_maps_are_not_invertible() {
        let mult = SystemSpec::MultExpanding;
        let ball = Ball::new(pt(0, 1), rat(1, 10));
        assert!(matches!(
            mult.preimage_ball(&BigUint::from(3u32), &ball),
            Err(Error::NotInvertible)
        ));
        assert!(matches!(
            mult.recurrence_times(&pt(0, 1), 3, 100),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn rotation_preimage_is_translation() {
        let rot = SystemSpec::rotation(pt(1, 8));
        let ball = Ball::new(pt(1, 2), rat(1, 10));
        let pre = rot.preimage_ball(&BigUint::from(3u32), &ball).unwrap();
        // B(1/2 - 3/8, 1/10) = B(1/8, 1/10).
        assert_eq!(pre.length, ball.length());
        assert_eq!(pre.a, rat(1, 8) - rat(1, 10));
        // n = 0 keeps the ball.
        let same = rot.preimage_ball(&BigUint::zero(), &ball).unwrap();
        let (a, b) = ball.endpoints();
        assert_eq!((same.a, same.b), (a, b));
    }

    #[test]
    fn rotation_preimage_preserves_measure_and_diameter() {
        let rot = SystemSpec::rotation(pt(13, 97));
        let leb = crate::measure::CircleMeasure::lebesgue();
        for i in 1..20 {
            let ball = Ball::new(pt(i, 23), rat(1, (i + 2) as i64 * 7));
            let pre = rot.preimage_ball(&BigUint::from(i as u32), &ball).unwrap();
            let mass = leb.interval_measure_rat(&pre.a, &pre.b);
            assert_eq!(mass, leb.ball(&ball));
            assert_eq!(pre.diameter(), ball.diameter());
        }
    }

    #[test]
    fn golden_recurrence_times_are_fibonacci() {
        let theta = CirclePoint::golden(256);
        let rot = SystemSpec::rotation(theta.clone());
        let x = CirclePoint::zero(theta.backend());
        let scan = rot.recurrence_times(&x, 6, 10_000).unwrap();
        let expect: Vec<BigUint> = [1u32, 2, 3, 5, 8, 13]
            .iter()
            .map(|&k| BigUint::from(k))
            .collect();
        assert!(scan.complete);
        assert_eq!(scan.times, expect);
        for pair in scan.distances.windows(2) {
            assert!(pair[1] < pair[0], "distances must strictly decrease");
        }
        // Cross-oracle: independent continued-fraction expansion.
        let cf = RecurrenceTimes::rotation_convergents(&theta, 6).unwrap();
        assert_eq!(cf.times, scan.times);
        assert_eq!(cf.distances, scan.distances);
    }

    #[test]
    fn rational_rotation_returns_exactly() {
        let rot = SystemSpec::rotation(pt(1, 2));
        let scan = rot.recurrence_times(&pt(0, 1), 5, 100).unwrap();
        assert_eq!(scan.times, vec![BigUint::from(2u32)]);
        assert!(scan.distances[0].is_zero());
        assert!(scan.complete);
    }

    #[test]
    fn scan_budget_reports_partial_results() {
        let theta = CirclePoint::golden(256);
        let rot = SystemSpec::rotation(theta.clone());
        let x = CirclePoint::zero(theta.backend());
        let scan = rot.recurrence_times(&x, 30, 100).unwrap();
        assert!(!scan.complete);
        assert!(scan.len() < 30);
        assert_eq!(scan.scanned_to, 100);
    }

    #[test]
    fn preimage_half_pieces_derive_from_the_ordering() {
        // A preimage interval containing the base point splits into its two
        // half-pieces along the half-interval classification, and the piece
        // lengths recover the whole interval.
        let rot = SystemSpec::rotation(pt(2, 11));
        let x = pt(0, 1);
        // Center chosen so the 4-step preimage ball is centered at x.
        let ball = Ball::new(pt(8, 11), rat(1, 7));
        let pre = rot.preimage_ball(&BigUint::from(4u32), &ball).unwrap();
        let a = CirclePoint::from_rational(pre.a.clone());
        let b = CirclePoint::from_rational(pre.b.clone());
        use crate::circle::{half_interval_side, lift_offset, Side};
        assert_eq!(half_interval_side(&x, &a), Side::Left);
        assert_eq!(half_interval_side(&x, &b), Side::Right);
        let minus_len = -lift_offset(&x, &a);
        let plus_len = lift_offset(&x, &b);
        assert_eq!(minus_len, rat(1, 7));
        assert_eq!(plus_len, rat(1, 7));
        assert_eq!(minus_len + plus_len, pre.length);
    }

    #[test]
    fn rotation_number_of_rotation_is_theta() {
        let rot = SystemSpec::rotation(pt(2, 7));
        let rho = rot.rotation_number_estimate(100, &pt(0, 1)).unwrap();
        assert_eq!(rho, rat(2, 7));
        let ident = SystemSpec::rotation(pt(0, 1));
        assert_eq!(
            ident.rotation_number_estimate(10, &pt(1, 3)).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn denjoy_rotation_number_tracks_theta() {
        let bits = 192;
        let sys = Arc::new(
            DenjoySystem::build(DenjoyParams {
                theta: CirclePoint::golden(bits),
                gap_scale: rat(1, 6),
                gap_ratio: rat(1, 2),
                n_max: 24,
                tol: rat(1, 1_000_000),
            })
            .unwrap(),
        );
        let theta = sys.theta_rational().clone();
        let denjoy = SystemSpec::denjoy(sys);
        let n = 3000u64;
        let rho = denjoy
            .rotation_number_estimate(n, &CirclePoint::from_fraction(0, 1))
            .unwrap();
        let err = (rho - theta).abs();
        assert!(err <= rat(2, n as i64), "estimate off by {err}");
    }

    #[test]
    fn denjoy_preimage_contains_center_preimage() {
        let sys = Arc::new(
            DenjoySystem::build(DenjoyParams {
                theta: CirclePoint::golden(192),
                gap_scale: rat(1, 6),
                gap_ratio: rat(1, 2),
                n_max: 24,
                tol: rat(1, 1_000_000),
            })
            .unwrap(),
        );
        let denjoy = SystemSpec::denjoy(sys.clone());
        let nu = crate::measure::CircleMeasure::denjoy_invariant(sys.clone());
        let ball = Ball::new(CirclePoint::from_fraction(0, 1), rat(1, 20));
        let mass = nu.ball(&ball);
        for n in [1u32, 2, 5, 13] {
            let pre = denjoy.preimage_ball(&BigUint::from(n), &ball).unwrap();
            // nu-preservation holds up to the truncation defect.
            let pre_mass = {
                let pieces = pre.pieces();
                pieces.iter().fold(BigRational::zero(), |acc, (lo, hi)| {
                    acc + nu.cdf(hi) - nu.cdf(lo)
                })
            };
            let err = (pre_mass - &mass).abs();
            let bound = sys.tail_bound() * rat(4, 1) + sys.edge_gap() * rat(4, 1);
            assert!(err <= bound, "nu defect {err} exceeds {bound}");
        }
    }
}
