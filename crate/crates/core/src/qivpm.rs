//! Interval-valued probability measures over finite event spaces: axiom
//! validation, delta-determinism, measure constructors (Born, counts,
//! interval-map composition) and ultramodularity checking.
//!
//! A measure assigns a probability interval to every member of an
//! [`EventSpace`], subject to
//!
//! * sharp boundaries: the empty event maps to `[0, 0]` and the certain
//!   event to `[1, 1]`;
//! * complement duality: `mu(1 - P) = [1, 1] - mu(P)`;
//! * convexity: for every commuting pair,
//!   `mu(P0 + P1 - P0 P1) + mu(P0 P1) ⊆ mu(P0) + mu(P1)`.
//!
//! The first two boundary constraints are enforced at construction; duality
//! and convexity are checked by [`Qivpm::validate`], which reports every
//! violation rather than stopping at the first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventSpace;
use crate::hilbert::{
    basis_ket, born_probability, expectation, ComplexMatrix, DensityMatrix, Observable, Projector,
};
use crate::interval::{Interval, DEFAULT_TOL};

const ORTHOGONALITY_TOL: f64 = 1e-9;
const SHARP_TOL: f64 = 1e-12;

/// Identifies which axiom a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// The empty event must map to `[0, 0]`.
    ZeroEvent,
    /// The certain event must map to `[1, 1]`.
    UnitEvent,
    /// `mu(1 - P) = [1, 1] - mu(P)`.
    Complement,
    /// Interval inclusion for commuting pairs.
    Convexity,
    /// Equality `mu(P0 + P1) = mu(P0) + mu(P1)` on orthogonal pairs.
    OrthogonalAdditivity,
    /// An interval map must send 0 to `[0, 0]`.
    MapZero,
    /// An interval map must send 1 to `[1, 1]`.
    MapUnit,
    /// An interval map must satisfy `f(1 - x) = [1, 1] - f(x)`.
    MapSymmetry,
    /// The three-point inclusion that makes a map compose soundly.
    Ultramodularity,
}

/// What a violation points at: a member, a pair of members, or grid points
/// of an interval map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subject {
    Member { index: usize },
    Pair { indices: [usize; 2] },
    Point { x: f64 },
    Triple { x: [f64; 3] },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub subject: Subject,
    /// The intervals that witnessed the violation, in rule-specific order.
    pub computed: Vec<Interval>,
    pub message: String,
}

/// Outcome of a validation pass; `valid` iff no violations were found.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(violations: Vec<Violation>) -> Self {
        ValidationReport { valid: violations.is_empty(), violations }
    }
}

/// Experiment counts for one event: runs that supported it, refuted it, or
/// could not be decided either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub support: u64,
    pub refute: u64,
    pub uncertain: u64,
}

impl CountRecord {
    pub fn new(support: u64, refute: u64, uncertain: u64) -> Self {
        CountRecord { support, refute, uncertain }
    }

    pub fn total(&self) -> u64 {
        self.support + self.refute + self.uncertain
    }
}

/// A map from exact probabilities to intervals containing them. Composing
/// such a map with a sharp measure blurs it by at most `max_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMap {
    /// `x -> [x, x]`; no blur at all.
    Sharp,
    /// `0 -> [0, 0]`, `1 -> [1, 1]`, everything else to `[0, 1]`.
    ThreeValued,
    /// A window of total width `alpha` around `x`, clipped to `[0, 1]`,
    /// with sharp endpoints at 0 and 1.
    Clamp { width: f64 },
    /// Piecewise constant on half-open cells `[b_i, b_{i+1})`, with explicit
    /// sharp values at 0 and 1.
    Table { breakpoints: Vec<f64>, values: Vec<Interval> },
}

impl IntervalMap {
    pub fn clamp(width: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&width) || !width.is_finite() {
            return Err(Error::InvalidWidth { width });
        }
        Ok(IntervalMap::Clamp { width })
    }

    /// Build a table map. Breakpoints must start at 0, end at 1 and be
    /// strictly increasing; each cell's value must contain the whole cell.
    pub fn table(breakpoints: Vec<f64>, values: Vec<Interval>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidTable { detail: "need at least two breakpoints".into() });
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidTable {
                detail: "breakpoints must start at 0 and end at 1".into(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTable {
                detail: "breakpoints must be strictly increasing".into(),
            });
        }
        if values.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidTable {
                detail: format!(
                    "{} cells require {} values, got {}",
                    breakpoints.len() - 1,
                    breakpoints.len() - 1,
                    values.len()
                ),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_probability(0.0) {
                return Err(Error::NotProbabilityInterval { lo: v.lo(), hi: v.hi() });
            }
            if v.lo() > breakpoints[i] || v.hi() < breakpoints[i + 1] {
                return Err(Error::InvalidTable {
                    detail: format!("cell {i} is not contained in its value interval"),
                });
            }
        }
        Ok(IntervalMap::Table { breakpoints, values })
    }

    /// The interval assigned to probability `x` (clamped into `[0, 1]`).
    pub fn value_at(&self, x: f64) -> Interval {
        let x = x.clamp(0.0, 1.0);
        if x == 0.0 {
            return Interval::F;
        }
        if x == 1.0 {
            return Interval::T;
        }
        match self {
            IntervalMap::Sharp => Interval::point(x),
            IntervalMap::ThreeValued => Interval::U,
            IntervalMap::Clamp { width } => Interval::new(
                (x - width / 2.0).max(0.0),
                (x + width / 2.0).min(1.0),
            )
            .expect("clamp window is well-formed"),
            IntervalMap::Table { breakpoints, values } => {
                let cell = breakpoints
                    .windows(2)
                    .position(|w| w[0] <= x && x < w[1])
                    .unwrap_or(values.len() - 1);
                values[cell]
            }
        }
    }

    /// Supremum of interval widths over the whole domain.
    pub fn max_width(&self) -> f64 {
        match self {
            IntervalMap::Sharp => 0.0,
            IntervalMap::ThreeValued => 1.0,
            IntervalMap::Clamp { width } => *width,
            IntervalMap::Table { values, .. } => {
                values.iter().map(|v| v.width()).fold(0.0, f64::max)
            }
        }
    }
}

/// An interval-valued measure: a total assignment from the members of an
/// event space to probability intervals, with sharp boundary values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "QivpmJson", into = "QivpmJson")]
pub struct Qivpm {
    space: EventSpace,
    intervals: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct QivpmJson {
    space: EventSpace,
    assignment: Vec<AssignmentJson>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    projector: ComplexMatrix,
    interval: Interval,
}

impl Qivpm {
    /// Wrap a total assignment. Every interval must be a probability
    /// interval; the empty and certain events must carry `[0, 0]` and
    /// `[1, 1]` (snapped exactly when within `1e-9`).
    pub fn new(space: EventSpace, mut intervals: Vec<Interval>) -> Result<Self> {
        if intervals.len() != space.len() {
            return Err(Error::AssignmentNotTotal {
                expected: space.len(),
                got: intervals.len(),
            });
        }
        for v in intervals.iter_mut() {
            if !v.is_probability(DEFAULT_TOL) {
                return Err(Error::NotProbabilityInterval { lo: v.lo(), hi: v.hi() });
            }
            *v = v.clamp_unit();
        }
        for (idx, v) in intervals.iter_mut().enumerate() {
            let rank = space.member(idx).rank();
            if rank == 0 {
                if !v.approx_eq(Interval::F, DEFAULT_TOL) {
                    return Err(Error::BadBoundaryAssignment {
                        which: "empty",
                        lo: v.lo(),
                        hi: v.hi(),
                    });
                }
                *v = Interval::F;
            } else if rank == space.dim() {
                if !v.approx_eq(Interval::T, DEFAULT_TOL) {
                    return Err(Error::BadBoundaryAssignment {
                        which: "certain",
                        lo: v.lo(),
                        hi: v.hi(),
                    });
                }
                *v = Interval::T;
            }
        }
        Ok(Qivpm { space, intervals })
    }

    /// The sharp measure induced by a state through the Born rule.
    pub fn born(rho: &DensityMatrix, space: &EventSpace) -> Result<Self> {
        if rho.dim() != space.dim() {
            return Err(Error::DimensionMismatch { left: rho.dim(), right: space.dim() });
        }
        let intervals = space
            .members()
            .iter()
            .map(|p| Ok(Interval::point(born_probability(rho, p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space.clone(), intervals)
    }

    /// Interval measure read off from experiment counts, one record per
    /// member in member order: `[support/m, (support + uncertain)/m]`.
    /// Every uncertain run may count as evidence either way, so this is the
    /// widest interval consistent with the data.
    pub fn from_counts(space: &EventSpace, records: &[CountRecord]) -> Result<Self> {
        if records.len() != space.len() {
            return Err(Error::AssignmentNotTotal { expected: space.len(), got: records.len() });
        }
        let m = records[0].total();
        for (index, r) in records.iter().enumerate() {
            if r.total() == 0 {
                return Err(Error::EmptyRecord { index });
            }
            if r.total() != m {
                return Err(Error::InconsistentTotals { index, expected: m, got: r.total() });
            }
        }
        for (index, r) in records.iter().enumerate() {
            let c = &records[space.complement_index(index)];
            if r.support != c.refute || r.uncertain != c.uncertain {
                return Err(Error::ComplementMismatch { index });
            }
        }
        let intervals = records
            .iter()
            .map(|r| {
                Interval::new(
                    r.support as f64 / m as f64,
                    (r.support + r.uncertain) as f64 / m as f64,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space.clone(), intervals)
    }

    /// Blur a sharp measure through an interval map, pointwise. The result
    /// is a valid measure whenever the map is ultramodular, and may fail
    /// validation otherwise.
    pub fn compose(map: &IntervalMap, sharp: &Qivpm) -> Result<Self> {
        for (index, v) in sharp.intervals.iter().enumerate() {
            if v.width() > SHARP_TOL {
                return Err(Error::NotSharp { index });
            }
        }
        let intervals = sharp
            .intervals
            .iter()
            .map(|v| map.value_at(v.lo()))
            .collect();
        Self::new(sharp.space.clone(), intervals)
    }

    pub fn space(&self) -> &EventSpace {
        &self.space
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval_at(&self, idx: usize) -> Interval {
        self.intervals[idx]
    }

    /// Check the boundary, duality and convexity axioms, reporting every
    /// violation. Interval comparisons are slackened by `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        for (idx, p) in self.space.members().iter().enumerate() {
            let v = self.intervals[idx];
            if p.rank() == 0 && !v.approx_eq(Interval::F, tol) {
                violations.push(Violation {
                    rule: Rule::ZeroEvent,
                    subject: Subject::Member { index: idx },
                    computed: vec![v],
                    message: format!("empty event carries {v}, expected [0, 0]"),
                });
            }
            if p.rank() == self.space.dim() && !v.approx_eq(Interval::T, tol) {
                violations.push(Violation {
                    rule: Rule::UnitEvent,
                    subject: Subject::Member { index: idx },
                    computed: vec![v],
                    message: format!("certain event carries {v}, expected [1, 1]"),
                });
            }
            let cidx = self.space.complement_index(idx);
            if cidx >= idx {
                let cv = self.intervals[cidx];
                if !cv.approx_eq(v.dual(), tol) {
                    violations.push(Violation {
                        rule: Rule::Complement,
                        subject: Subject::Pair { indices: [idx, cidx] },
                        computed: vec![v, cv],
                        message: format!(
                            "complement of member {idx} carries {cv}, expected {}",
                            v.dual()
                        ),
                    });
                }
            }
        }
        for i in 0..self.space.len() {
            for j in (i + 1)..self.space.len() {
                let (a, b) = (self.space.member(i), self.space.member(j));
                if !a.commutes_with(b, crate::events::COMMUTE_TOL) {
                    continue;
                }
                let prod = a.matrix().matmul(b.matrix());
                let union = a.matrix().add(b.matrix()).sub(&prod);
                let pi = self.space.find(&prod).expect("space is closed under products");
                let ui = self.space.find(&union).expect("space is closed under unions");
                let lhs = self.intervals[ui] + self.intervals[pi];
                let rhs = self.intervals[i] + self.intervals[j];
                if !lhs.subset(rhs, tol) {
                    violations.push(Violation {
                        rule: Rule::Convexity,
                        subject: Subject::Pair { indices: [i, j] },
                        computed: vec![lhs, rhs],
                        message: format!(
                            "members {i} and {j}: union+product gives {lhs}, not within {rhs}"
                        ),
                    });
                }
            }
        }
        ValidationReport::new(violations)
    }

    /// The additivity equality `mu(P0 + P1) = mu(P0) + mu(P1)` on all
    /// orthogonal pairs. Passing certifies convexity; failing does not
    /// refute it (the equality is sufficient, not necessary).
    pub fn check_orthogonal_additivity(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        for i in 0..self.space.len() {
            for j in (i + 1)..self.space.len() {
                let (a, b) = (self.space.member(i), self.space.member(j));
                if !a.is_orthogonal_to(b, ORTHOGONALITY_TOL) {
                    continue;
                }
                let sum = a.matrix().add(b.matrix());
                let si = self.space.find(&sum).expect("space is closed under orthogonal sums");
                let lhs = self.intervals[si];
                let rhs = self.intervals[i] + self.intervals[j];
                if !lhs.approx_eq(rhs, tol) {
                    violations.push(Violation {
                        rule: Rule::OrthogonalAdditivity,
                        subject: Subject::Pair { indices: [i, j] },
                        computed: vec![lhs, rhs],
                        message: format!(
                            "orthogonal members {i} and {j}: sum carries {lhs}, not {rhs}"
                        ),
                    });
                }
            }
        }
        ValidationReport::new(violations)
    }

    /// The least `delta` for which the measure is delta-deterministic:
    /// `max_P min(hi(P), 1 - lo(P))`.
    pub fn delta_classify(&self) -> f64 {
        self.intervals
            .iter()
            .map(|v| v.hi().min(1.0 - v.lo()))
            .fold(0.0, f64::max)
    }

    /// Whether every member's interval lies within `[0, delta]` or
    /// `[1 - delta, 1]`.
    pub fn is_delta_deterministic(&self, delta: f64) -> bool {
        self.first_indeterminate_member(delta).is_none()
    }

    fn first_indeterminate_member(&self, delta: f64) -> Option<usize> {
        let low = Interval::new(0.0, delta).expect("delta >= 0");
        let high = Interval::new(1.0 - delta, 1.0).expect("delta <= 1");
        self.intervals
            .iter()
            .position(|v| !v.subset(low, DEFAULT_TOL) && !v.subset(high, DEFAULT_TOL))
    }

    /// Round a delta-deterministic measure (delta < 1/3) to the two-valued
    /// candidate sending near-impossible events to `[0, 0]` and near-certain
    /// ones to `[1, 1]`. The result is total but its validity is not
    /// asserted; on spaces of dimension >= 3 it is where rounding breaks.
    pub fn round_to_deterministic(&self, delta: f64) -> Result<Qivpm> {
        if !(0.0..1.0 / 3.0).contains(&delta) {
            return Err(Error::DeltaTooLarge { delta });
        }
        if let Some(index) = self.first_indeterminate_member(delta) {
            return Err(Error::NotDeltaDeterministic { delta, index });
        }
        let low = Interval::new(0.0, delta).expect("delta in range");
        let intervals = self
            .intervals
            .iter()
            .map(|v| {
                if v.subset(low, DEFAULT_TOL) {
                    Interval::F
                } else {
                    Interval::T
                }
            })
            .collect();
        Qivpm::new(self.space.clone(), intervals)
    }

    /// Choquet expectation of an observable against the lower and upper
    /// envelopes of a measure on a commuting space. The spectral projectors
    /// (and hence their partial sums) must be members.
    pub fn choquet_expectation(&self, o: &Observable) -> Result<Interval> {
        if let Some((i, j)) = self.space.first_non_commuting_pair() {
            return Err(Error::NonCommutingPair { i, j });
        }
        let mut spectrum: Vec<(f64, &Projector)> =
            o.spectrum().iter().map(|(l, p)| (*l, p)).collect();
        for (index, (_, p)) in spectrum.iter().enumerate() {
            if self.space.find(p.matrix()).is_none() {
                return Err(Error::ProjectorNotInSpace { index });
            }
        }
        // descending eigenvalues; telescoping over upper sets
        spectrum.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut lower = 0.0;
        let mut upper = 0.0;
        let mut partial = ComplexMatrix::zeros(self.space.dim());
        let (mut prev_lo, mut prev_hi) = (0.0, 0.0);
        for (lambda, p) in spectrum {
            partial = partial.add(p.matrix());
            let idx = self
                .space
                .find(&partial)
                .ok_or_else(|| Error::SpaceNotClosed {
                    detail: "partial spectral sum is not a member".into(),
                })?;
            let v = self.intervals[idx];
            lower += lambda * (v.lo() - prev_lo);
            upper += lambda * (v.hi() - prev_hi);
            prev_lo = v.lo();
            prev_hi = v.hi();
        }
        Interval::new(lower, upper)
    }
}

impl TryFrom<QivpmJson> for Qivpm {
    type Error = Error;

    fn try_from(j: QivpmJson) -> Result<Self> {
        let mut intervals: Vec<Option<Interval>> = vec![None; j.space.len()];
        for (k, a) in j.assignment.iter().enumerate() {
            let idx = j
                .space
                .find(&a.projector)
                .ok_or(Error::ProjectorNotInSpace { index: k })?;
            if intervals[idx].is_some() {
                return Err(Error::DuplicateProjector { i: idx, j: k });
            }
            intervals[idx] = Some(a.interval);
        }
        let total = intervals.iter().flatten().count();
        if total != j.space.len() {
            return Err(Error::AssignmentNotTotal { expected: j.space.len(), got: total });
        }
        Qivpm::new(j.space, intervals.into_iter().flatten().collect())
    }
}

impl From<Qivpm> for QivpmJson {
    fn from(m: Qivpm) -> Self {
        let assignment = m
            .space
            .members()
            .iter()
            .zip(&m.intervals)
            .map(|(p, v)| AssignmentJson { projector: p.matrix().clone(), interval: *v })
            .collect();
        QivpmJson { space: m.space, assignment }
    }
}

/// Verify the interval-map axioms on a grid: endpoint sharpness and
/// symmetry at every grid point, and the three-point inclusion
/// `f(x0+x1+x2) + f(x2) ⊆ f(x0+x2) + f(x1+x2)` for every grid triple with
/// sum at most one. The grid scan is a semi-decision: passing certifies the
/// map only at the grid resolution. The first violating triple is reported.
pub fn ultramodular_check(map: &IntervalMap, step: f64, tol: f64) -> Result<ValidationReport> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidStep { step });
    }
    let mut grid: Vec<f64> = Vec::new();
    let mut x = 0.0;
    while x < 1.0 - step / 2.0 {
        grid.push(x);
        x += step;
    }
    grid.push(1.0);

    let mut violations = Vec::new();
    if map.value_at(0.0) != Interval::F {
        violations.push(Violation {
            rule: Rule::MapZero,
            subject: Subject::Point { x: 0.0 },
            computed: vec![map.value_at(0.0)],
            message: "map does not send 0 to [0, 0]".into(),
        });
    }
    if map.value_at(1.0) != Interval::T {
        violations.push(Violation {
            rule: Rule::MapUnit,
            subject: Subject::Point { x: 1.0 },
            computed: vec![map.value_at(1.0)],
            message: "map does not send 1 to [1, 1]".into(),
        });
    }
    for &x in &grid {
        let lhs = map.value_at(1.0 - x);
        let rhs = map.value_at(x).dual();
        if !lhs.approx_eq(rhs, tol) {
            violations.push(Violation {
                rule: Rule::MapSymmetry,
                subject: Subject::Point { x },
                computed: vec![lhs, rhs],
                message: format!("f(1 - {x}) = {lhs} differs from dual {rhs}"),
            });
        }
    }
    'outer: for (i, &x0) in grid.iter().enumerate() {
        for &x1 in &grid[i..] {
            if x0 + x1 > 1.0 + tol {
                break;
            }
            for &x2 in &grid {
                let y = x0 + x1 + x2;
                if y > 1.0 + tol {
                    break;
                }
                let lhs = map.value_at(y) + map.value_at(x2);
                let rhs = map.value_at(x0 + x2) + map.value_at(x1 + x2);
                if !lhs.subset(rhs, tol) {
                    violations.push(Violation {
                        rule: Rule::Ultramodularity,
                        subject: Subject::Triple { x: [x0, x1, x2] },
                        computed: vec![lhs, rhs],
                        message: format!(
                            "triple ({x0}, {x1}, {x2}): f(y)+f(x2) = {lhs} not within {rhs}"
                        ),
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(ValidationReport::new(violations))
}

/// From a triple violating the ultramodularity inclusion, build the
/// four-dimensional state and the pair of events on which the composed
/// measure provably breaks convexity: the diagonal state with weights
/// `(x0, x1, x2, 1-y)` with `P0 = |0><0| + |2><2|`, `P1 = |1><1| + |2><2|`.
pub fn ultramodular_counterexample(
    map: &IntervalMap,
    triple: [f64; 3],
) -> Result<(DensityMatrix, Projector, Projector)> {
    let [x0, x1, x2] = triple;
    let y = x0 + x1 + x2;
    let lhs = map.value_at(y) + map.value_at(x2);
    let rhs = map.value_at(x0 + x2) + map.value_at(x1 + x2);
    if y > 1.0 || lhs.subset(rhs, DEFAULT_TOL) {
        return Err(Error::TripleNotViolating { triple });
    }
    let kets: Vec<_> = (0..4).map(|i| basis_ket(4, i)).collect();
    let rho = DensityMatrix::mixture(&[x0, x1, x2, 1.0 - y], &kets)?;
    let p0 = Projector::from_kets(&[kets[0].clone(), kets[2].clone()])?;
    let p1 = Projector::from_kets(&[kets[1].clone(), kets[2].clone()])?;
    Ok((rho, p0, p1))
}

/// Interval expectation of an observable sharpened to a point when the
/// measure is a sharp Born measure: convenience used in tests and demos.
pub fn sharp_expectation(rho: &DensityMatrix, o: &Observable) -> Result<Interval> {
    Ok(Interval::point(expectation(rho, o)?))
}
