//! Closed real intervals `[lo, hi]` used as probability values.
//!
//! An interval generalizes a single probability: the lower end measures the
//! strength of evidence for an event, `1 - hi` the strength of evidence
//! against it. The arithmetic here is deliberately minimal — addition, scalar
//! multiplication, the dual (complement) interval, and the inclusion order —
//! because those are the only operations the measure axioms use.
//!
//! Intermediates outside `[0, 1]` are legal (e.g. `[0.2, 0.3] + [0.7, 0.8]`
//! gives `[0.9, 1.1]`); probability-validity is only enforced where a measure
//! is constructed.

use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Library default tolerance for interval comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A closed interval `[lo, hi]` with `lo <= hi`.
///
/// Serialized in JSON as a two-element array `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// The impossible event: `[0, 0]`.
    pub const F: Interval = Interval { lo: 0.0, hi: 0.0 };
    /// The certain event: `[1, 1]`.
    pub const T: Interval = Interval { lo: 1.0, hi: 1.0 };
    /// The unknown interval: `[0, 1]`.
    pub const U: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The sharp interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        debug_assert!(x.is_finite());
        Interval { lo: x, hi: x }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    /// Scalar multiplication; a negative scalar swaps the endpoints.
    pub fn scale(self, x: f64) -> Self {
        if x >= 0.0 {
            Interval { lo: x * self.lo, hi: x * self.hi }
        } else {
            Interval { lo: x * self.hi, hi: x * self.lo }
        }
    }

    /// The interval of the complementary event: `[1 - hi, 1 - lo]`.
    pub fn dual(self) -> Self {
        Interval { lo: 1.0 - self.hi, hi: 1.0 - self.lo }
    }

    /// Inclusion `self ⊆ other`, slackened by `tol` on both ends.
    pub fn subset(self, other: Interval, tol: f64) -> bool {
        other.lo - tol <= self.lo && self.hi <= other.hi + tol
    }

    /// Membership `x ∈ self`, slackened by `tol` on both ends.
    pub fn contains(self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    /// Endpoint-wise equality within `tol`.
    pub fn approx_eq(self, other: Interval, tol: f64) -> bool {
        (self.lo - other.lo).abs() <= tol && (self.hi - other.hi).abs() <= tol
    }

    /// Whether `0 <= lo <= hi <= 1` within `tol`.
    pub fn is_probability(self, tol: f64) -> bool {
        self.lo >= -tol && self.hi <= 1.0 + tol
    }

    /// Clamp both endpoints into `[0, 1]`.
    pub(crate) fn clamp_unit(self) -> Self {
        Interval {
            lo: self.lo.clamp(0.0, 1.0),
            hi: self.hi.clamp(0.0, 1.0),
        }
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(v: Interval) -> Self {
        [v.lo, v.hi]
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
