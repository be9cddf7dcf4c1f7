//! A numerical laboratory for shrinking-target properties of
//! measure-preserving circle and torus dynamics.
//!
//! The crate builds the standard cast of systems (multiplicative expanding
//! maps, simultaneous `N^n` expanding actions, rotations, and a truncated
//! Denjoy homeomorphism), radius sequences over their acting semigroups, and
//! non-atomic measures represented by CDFs, then runs two families of
//! experiments on top:
//!
//! * hit counting `N(h; alpha)` against the counting profile `Psi(h)`, with
//!   an error-exponent regression, for systems expected to hit shrinking
//!   targets with the predicted frequency;
//! * exact tail-union measures of pulled-back ball sequences, for rotations
//!   and Denjoy maps where divergent-sum targets are nevertheless almost
//!   never hit infinitely often.
//!
//! Arithmetic is exact throughout: either arbitrary rationals or dyadic
//! fixed point with an explicit bit budget (see [`numeric::Backend`]).

pub mod circle;
pub mod config;
pub mod denjoy;
pub mod error;
pub mod experiment;
pub mod measure;
pub mod numeric;
pub mod radius;
pub mod report;
pub mod runner;
mod sweep;
pub mod system;

pub use circle::{
    act, ball_contains, compose, dist, half_interval_side, ordered_less, union_measure, Arc,
    CirclePoint, SemigroupIndex, Side, TorusPoint,
};
pub use error::{Error, Result};
pub use measure::{CircleMeasure, SupportClassification, SupportKind};
pub use numeric::Backend;
pub use system::{PreimageInterval, RecurrenceTimes, SystemSpec};
