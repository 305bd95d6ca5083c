//! Feasibility and optimization over density matrices: finding states
//! consistent with a measure (core members), detecting empty cores,
//! expectation intervals, and the finite-precision distance bound between a
//! blurred Born measure and its generating state.
//!
//! The workhorse is cyclic Dykstra alternation between the set of density
//! matrices and one slab `{H : lo <= Tr(H P) <= hi}` per constrained event.
//! Plain alternating projections can cycle on slab intersections; Dykstra's
//! correction terms restore convergence to the nearest feasible point.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventSpace;
use crate::hilbert::{
    hermitian_eigensystem, spectral_norm, ComplexMatrix, DensityMatrix, Ket, Observable,
};
use crate::interval::{Interval, DEFAULT_TOL};
use crate::qivpm::{IntervalMap, Qivpm};

/// Residual above which a fully stalled search is declared empty rather
/// than inconclusive.
const EMPTINESS_RESIDUAL: f64 = 1e-4;
/// Stall = the best residual improved by less than 1e-12 per iteration
/// over the last `STALL_WINDOW` iterations.
const STALL_WINDOW: usize = 1000;
const STALL_DECREASE: f64 = 1e-12;
/// A projection run may stop once the iterate moves less than this per
/// cycle; the gradient crawl only needs projections at this resolution.
const SETTLE_MOVEMENT: f64 = 1e-8;
/// Cycle cap for a single projection inside the gradient crawl.
const PROJECTION_CYCLE_CAP: usize = 2000;
/// Rank test threshold for the span of the certainly-impossible events.
const SPAN_TOL: f64 = 1e-8;

/// A feasibility query: which states are consistent with `measure` on every
/// member of `subspace`?
#[derive(Debug, Clone)]
pub struct CoreQuery {
    pub measure: Qivpm,
    pub subspace: EventSpace,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl CoreQuery {
    /// Query over the measure's whole space.
    pub fn new(measure: Qivpm) -> Self {
        let subspace = measure.space().clone();
        CoreQuery {
            measure,
            subspace,
            tolerance: 1e-8,
            max_iterations: 20_000,
            restarts: 8,
            seed: 42,
        }
    }

    /// Query over a subspace; every subspace member must be a member of the
    /// measure's space.
    pub fn with_subspace(measure: Qivpm, subspace: EventSpace) -> Result<Self> {
        for (index, p) in subspace.members().iter().enumerate() {
            if measure.space().find(p.matrix()).is_none() {
                return Err(Error::ProjectorNotInSpace { index });
            }
        }
        Ok(CoreQuery { subspace, ..CoreQuery::new(measure) })
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn restarts(mut self, n: usize) -> Self {
        self.restarts = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreStatus {
    /// A state consistent with every constrained event within tolerance.
    Witness { rho: DensityMatrix, residual: f64 },
    /// All restarts stalled well away from feasibility (or the impossible
    /// events span the space).
    Empty { residual: f64 },
    Inconclusive { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoreResultJson", into = "CoreResultJson")]
pub struct CoreResult {
    pub status: CoreStatus,
    pub iterations: usize,
}

impl CoreResult {
    pub fn residual(&self) -> f64 {
        match &self.status {
            CoreStatus::Witness { residual, .. }
            | CoreStatus::Empty { residual }
            | CoreStatus::Inconclusive { residual } => *residual,
        }
    }

    pub fn witness(&self) -> Option<&DensityMatrix> {
        match &self.status {
            CoreStatus::Witness { rho, .. } => Some(rho),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CoreResultJson {
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<DensityMatrix>,
    residual: f64,
    iterations: usize,
}

impl From<CoreResult> for CoreResultJson {
    fn from(r: CoreResult) -> Self {
        let (status, rho, residual) = match r.status {
            CoreStatus::Witness { rho, residual } => ("witness", Some(rho), residual),
            CoreStatus::Empty { residual } => ("empty", None, residual),
            CoreStatus::Inconclusive { residual } => ("inconclusive", None, residual),
        };
        CoreResultJson { status: status.into(), rho, residual, iterations: r.iterations }
    }
}

impl TryFrom<CoreResultJson> for CoreResult {
    type Error = Error;

    fn try_from(j: CoreResultJson) -> Result<Self> {
        let status = match (j.status.as_str(), j.rho) {
            ("witness", Some(rho)) => CoreStatus::Witness { rho, residual: j.residual },
            ("empty", None) => CoreStatus::Empty { residual: j.residual },
            ("inconclusive", None) => CoreStatus::Inconclusive { residual: j.residual },
            _ => {
                return Err(Error::Integrity {
                    detail: format!("malformed core result status `{}`", j.status),
                })
            }
        };
        Ok(CoreResult { status, iterations: j.iterations })
    }
}

/// Shared solver knobs for the optimization entry points.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub cap: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            tolerance: 1e-8,
            max_iterations: 20_000,
            restarts: 8,
            seed: 42,
            cap: crate::events::DEFAULT_CAP,
        }
    }
}

struct Slab {
    p: ComplexMatrix,
    norm_sqr: f64,
    lo: f64,
    hi: f64,
}

/// `Re <A, B>` in the Frobenius inner product.
fn frob_inner_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a.get(i, j).conj() * b.get(i, j)).re;
        }
    }
    acc
}

fn slabs_for(query: &CoreQuery) -> Result<Vec<Slab>> {
    let mut slabs = Vec::new();
    for (index, p) in query.subspace.members().iter().enumerate() {
        if p.rank() == 0 {
            continue; // Tr(rho 0) = 0 holds identically
        }
        let idx = query
            .measure
            .space()
            .find(p.matrix())
            .ok_or(Error::ProjectorNotInSpace { index })?;
        let v = query.measure.interval_at(idx);
        slabs.push(Slab {
            p: p.matrix().clone(),
            norm_sqr: p.rank() as f64,
            lo: v.lo(),
            hi: v.hi(),
        });
    }
    Ok(slabs)
}

fn max_violation(x: &ComplexMatrix, slabs: &[Slab]) -> f64 {
    slabs
        .iter()
        .map(|s| {
            let t = frob_inner_re(&s.p, x);
            (s.lo - t).max(t - s.hi).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// Euclidean projection of the eigenvalue vector onto the probability
/// simplex (sort, threshold, clip).
fn simplex_project(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Frobenius-nearest density matrix: eigendecompose, project the spectrum
/// onto the simplex, reassemble. Idempotent.
pub fn project_to_states(h: &ComplexMatrix) -> Result<DensityMatrix> {
    let m = project_to_states_raw(h)?;
    DensityMatrix::new(m)
}

fn project_to_states_raw(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sys = hermitian_eigensystem(h)?;
    let projected = simplex_project(&sys.values);
    let mut m = ComplexMatrix::zeros(h.dim());
    for (w, v) in projected.iter().zip(&sys.vectors) {
        if *w > 0.0 {
            m = m.add(&ComplexMatrix::outer(v, v).scale_re(*w));
        }
    }
    Ok(m)
}

struct DykstraRun {
    best: ComplexMatrix,
    best_residual: f64,
    cycles: usize,
    stalled: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum StopRule {
    /// Stop at the first iterate within tolerance of every slab.
    Feasible,
    /// Keep cycling until the iterate also settles, approximating the
    /// metric projection of the start onto the intersection.
    Projection,
}

/// Cyclic Dykstra between the slabs and the state set, starting at `start`.
/// Every cycle ends on the state set, so the iterate (and the returned best
/// point) is always a valid state.
fn dykstra(
    start: &ComplexMatrix,
    slabs: &[Slab],
    tol: f64,
    max_cycles: usize,
    stop: StopRule,
) -> Result<DykstraRun> {
    let dim = start.dim();
    let mut x = start.clone();
    let mut corrections: Vec<ComplexMatrix> =
        (0..slabs.len() + 1).map(|_| ComplexMatrix::zeros(dim)).collect();
    let mut best: Option<ComplexMatrix> = None;
    let mut best_residual = f64::INFINITY;
    let mut history: Vec<f64> = Vec::with_capacity(max_cycles.min(4096));
    let mut stalled = false;
    let mut cycles = 0;
    let mut prev: Option<ComplexMatrix> = None;
    // Corrections accumulated from a distant start can dominate the slow
    // tail. Re-anchoring at the best point with fresh corrections un-sticks
    // such runs; once re-anchoring stops lowering the residual the stall is
    // genuine.
    let mut resets = 0;
    let mut best_at_last_reset = f64::INFINITY;

    for cycle in 0..max_cycles {
        cycles = cycle + 1;
        for (k, slab) in slabs.iter().enumerate() {
            let y = x.add(&corrections[k]);
            let t = frob_inner_re(&slab.p, &y);
            let shift = if t > slab.hi {
                (slab.hi - t) / slab.norm_sqr
            } else if t < slab.lo {
                (slab.lo - t) / slab.norm_sqr
            } else {
                0.0
            };
            let projected = if shift == 0.0 { y.clone() } else { y.add(&slab.p.scale_re(shift)) };
            corrections[k] = y.sub(&projected);
            x = projected;
        }
        let k = slabs.len();
        let y = x.add(&corrections[k]);
        let projected = project_to_states_raw(&y)?;
        corrections[k] = y.sub(&projected);
        x = projected;

        let residual = max_violation(&x, slabs);
        if residual < best_residual {
            best_residual = residual;
            best = Some(x.clone());
        }
        if best_residual <= tol {
            match stop {
                StopRule::Feasible => {
                    return Ok(DykstraRun {
                        best: best.expect("set above"),
                        best_residual,
                        cycles,
                        stalled,
                    })
                }
                StopRule::Projection => {
                    if let Some(p) = &prev {
                        if residual <= tol && p.max_abs_diff(&x) < SETTLE_MOVEMENT {
                            return Ok(DykstraRun { best: x.clone(), best_residual: residual, cycles, stalled });
                        }
                    }
                }
            }
        }
        prev = Some(x.clone());
        history.push(best_residual);
        if history.len() > STALL_WINDOW {
            let then = history[history.len() - 1 - STALL_WINDOW];
            if then - best_residual < STALL_DECREASE * STALL_WINDOW as f64 {
                let progressed = best_residual < best_at_last_reset - STALL_DECREASE;
                if stop == StopRule::Feasible && resets < 50 && progressed {
                    resets += 1;
                    best_at_last_reset = best_residual;
                    x = best.clone().expect("a best point exists after a full window");
                    for c in corrections.iter_mut() {
                        *c = ComplexMatrix::zeros(dim);
                    }
                    history.clear();
                } else {
                    stalled = true;
                    break;
                }
            }
        }
    }
    // in projection mode prefer the final settled iterate when feasible
    if stop == StopRule::Projection {
        let final_residual = max_violation(&x, slabs);
        if final_residual <= tol {
            return Ok(DykstraRun { best: x, best_residual: final_residual, cycles, stalled });
        }
    }
    Ok(DykstraRun {
        best: best.unwrap_or(x),
        best_residual,
        cycles,
        stalled,
    })
}

fn random_ket(rng: &mut ChaCha8Rng, dim: usize) -> Ket {
    let mut k: Ket = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = crate::hilbert::ket_norm(&k);
    for z in k.iter_mut() {
        *z /= n;
    }
    k
}

fn random_start(rng: &mut ChaCha8Rng, dim: usize, pure: bool) -> ComplexMatrix {
    if pure {
        let k = random_ket(rng, dim);
        ComplexMatrix::outer(&k, &k)
    } else {
        // G G^dagger / Tr, a generic full-rank mixed state
        let g = ComplexMatrix::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let w = g.matmul(&g.adjoint());
        let t = w.trace().re;
        w.scale_re(1.0 / t)
    }
}

/// True when the ranges of all events assigned exactly `[0, 0]` jointly
/// span the Hilbert space. Any consistent state would then have to vanish,
/// so the core is certainly empty. Sound but incomplete.
pub fn analytic_empty_check(query: &CoreQuery) -> Result<bool> {
    let dim = query.subspace.dim();
    let mut frame = ComplexMatrix::zeros(dim);
    let mut saw_zero = false;
    for (index, p) in query.subspace.members().iter().enumerate() {
        if p.rank() == 0 {
            continue;
        }
        let idx = query
            .measure
            .space()
            .find(p.matrix())
            .ok_or(Error::ProjectorNotInSpace { index })?;
        let v = query.measure.interval_at(idx);
        if v.hi().abs() <= 1e-12 {
            saw_zero = true;
            for ket in p.range_basis()? {
                frame = frame.add(&ComplexMatrix::outer(&ket, &ket));
            }
        }
    }
    if !saw_zero {
        return Ok(false);
    }
    let sys = hermitian_eigensystem(&frame)?;
    let rank = sys.values.iter().filter(|v| **v > SPAN_TOL).count();
    Ok(rank == dim)
}

/// Search for a core member by seeded multi-start Dykstra alternation.
///
/// Outcomes: a witness whose worst constraint violation is at most the
/// query tolerance; `Empty` when the impossible events span the space or
/// every restart stalls with a residual above `1e-4`; `Inconclusive`
/// otherwise. Deterministic for a fixed seed.
pub fn find_core_member(query: &CoreQuery) -> Result<CoreResult> {
    let slabs = slabs_for(query)?;
    let dim = query.subspace.dim();
    let mut total_cycles = 0;
    let mut best_residual = f64::INFINITY;
    let mut all_stalled = true;

    for r in 0..query.restarts.max(1) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(query.seed.wrapping_add(r as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let start = random_start(&mut rng, dim, r % 2 == 0);
        let run = dykstra(&start, &slabs, query.tolerance, query.max_iterations, StopRule::Feasible)?;
        total_cycles += run.cycles;
        if run.best_residual <= query.tolerance {
            return Ok(CoreResult {
                status: CoreStatus::Witness {
                    rho: DensityMatrix::new(run.best)?,
                    residual: run.best_residual,
                },
                iterations: total_cycles,
            });
        }
        best_residual = best_residual.min(run.best_residual);
        all_stalled &= run.stalled;
    }

    let analytically_empty = analytic_empty_check(query)?;
    if analytically_empty || (all_stalled && best_residual > EMPTINESS_RESIDUAL) {
        Ok(CoreResult {
            status: CoreStatus::Empty { residual: best_residual },
            iterations: total_cycles,
        })
    } else {
        Ok(CoreResult {
            status: CoreStatus::Inconclusive { residual: best_residual },
            iterations: total_cycles,
        })
    }
}

/// `[min, max]` of `Tr(rho O)` over the core of `m` restricted to the
/// least subspace containing the spectral projectors of `o`. Projected
/// gradient in both directions with the Dykstra feasibility projection;
/// only improving steps are accepted.
pub fn expectation_interval(
    m: &Qivpm,
    o: &Observable,
    params: &SolverParams,
) -> Result<Interval> {
    let dim = m.space().dim();
    if o.dim() != dim {
        return Err(Error::DimensionMismatch { left: dim, right: o.dim() });
    }
    let gens: Vec<_> = o.spectrum().iter().map(|(_, p)| p.clone()).collect();
    let minimal = EventSpace::generate(dim, &gens, params.cap)?;
    let query = CoreQuery::with_subspace(m.clone(), minimal)?
        .tolerance(params.tolerance)
        .max_iterations(params.max_iterations)
        .restarts(params.restarts)
        .seed(params.seed);
    let feasible = find_core_member(&query)?;
    let witness = match feasible.witness() {
        Some(w) => w.clone(),
        None => return Err(Error::CoreUnavailable { result: Box::new(feasible) }),
    };

    let slabs = slabs_for(&query)?;
    let norm = spectral_norm(o.matrix())?;
    let base_step = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    let mut ends = [0.0_f64; 2];
    for (e, sense) in [(0usize, -1.0_f64), (1usize, 1.0_f64)] {
        let mut x = witness.matrix().clone();
        let mut best = frob_inner_re(o.matrix(), &x);
        let mut step = base_step;
        for _ in 0..5000 {
            let y = x.add(&o.matrix().scale_re(sense * step));
            let cap = params.max_iterations.min(PROJECTION_CYCLE_CAP);
            let run = dykstra(&y, &slabs, params.tolerance, cap, StopRule::Projection)?;
            let val = frob_inner_re(o.matrix(), &run.best);
            // only improving steps are accepted; shrink the step a few
            // times before concluding the end has been reached
            if sense * (val - best) > 1e-10 {
                best = val;
                x = run.best;
            } else if step > base_step * 1e-4 {
                step *= 0.5;
            } else {
                break;
            }
        }
        ends[e] = best;
    }
    Interval::new(ends[0].min(ends[1]), ends[0].max(ends[1]))
}

/// Distance bound report for a blurred Born measure: every core member
/// found must lie within `max_width + 1e-6` of the generating state in
/// spectral norm.
#[derive(Debug, Clone, Serialize)]
pub struct GleasonReport {
    /// Maximum interval width of the map.
    pub alpha: f64,
    /// `alpha + 1e-6`, the asserted distance bound.
    pub bound: f64,
    pub starts: usize,
    pub witnesses_found: usize,
    /// Largest observed `||rho - rho'||` over the found witnesses.
    pub max_norm: f64,
    pub holds: bool,
    /// True when `alpha >= 1`, where the bound is satisfied by any pair of
    /// states.
    pub vacuous: bool,
}

pub fn gleason_bound_check(
    rho: &DensityMatrix,
    map: &IntervalMap,
    space: &EventSpace,
    n_starts: usize,
    seed: u64,
) -> Result<GleasonReport> {
    let born = Qivpm::born(rho, space)?;
    let composed = Qivpm::compose(map, &born)?;
    let report = composed.validate(DEFAULT_TOL);
    if !report.valid {
        return Err(Error::MeasureInvalid { violations: report.violations.len() });
    }
    let alpha = map.max_width();
    let bound = alpha + 1e-6;
    let mut max_norm = 0.0_f64;
    let mut witnesses_found = 0;
    for s in 0..n_starts {
        let query = CoreQuery::new(composed.clone())
            .restarts(1)
            .seed(seed.wrapping_add(s as u64));
        let result = find_core_member(&query)?;
        if let Some(w) = result.witness() {
            witnesses_found += 1;
            let diff = rho.matrix().sub(w.matrix());
            max_norm = max_norm.max(spectral_norm(&diff)?);
        }
    }
    Ok(GleasonReport {
        alpha,
        bound,
        starts: n_starts,
        witnesses_found,
        max_norm,
        holds: max_norm <= bound,
        vacuous: alpha >= 1.0,
    })
}

/// A witness state for a measure restricted to a commuting subspace, found
/// by Dykstra alternation over diagonal states in the joint eigenbasis.
/// Such a core is never empty, so a stall signals a bug rather than a
/// mathematical possibility.
pub fn commuting_core_witness(m: &Qivpm, subspace: &EventSpace) -> Result<DensityMatrix> {
    let basis = subspace.simultaneous_diagonalize()?;
    let dim = subspace.dim();

    struct VecSlab {
        support: Vec<usize>,
        lo: f64,
        hi: f64,
    }
    let mut slabs = Vec::new();
    for (index, p) in subspace.members().iter().enumerate() {
        let idx = m
            .space()
            .find(p.matrix())
            .ok_or(Error::ProjectorNotInSpace { index })?;
        let v = m.interval_at(idx);
        let support: Vec<usize> = basis
            .iter()
            .enumerate()
            .filter(|(_, b)| p.matrix().sandwich(b, b).re > 0.5)
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() {
            continue;
        }
        slabs.push(VecSlab { support, lo: v.lo(), hi: v.hi() });
    }

    let violation = |p: &[f64], slabs: &[VecSlab]| -> f64 {
        slabs
            .iter()
            .map(|s| {
                let t: f64 = s.support.iter().map(|&i| p[i]).sum();
                (s.lo - t).max(t - s.hi).max(0.0)
            })
            .fold(0.0, f64::max)
    };

    let mut p = vec![1.0 / dim as f64; dim];
    let mut corrections = vec![vec![0.0; dim]; slabs.len() + 1];
    let tol = 1e-8;
    let mut best = p.clone();
    let mut best_residual = violation(&p, &slabs);
    for _cycle in 0..20_000 {
        if best_residual <= tol {
            break;
        }
        for (k, slab) in slabs.iter().enumerate() {
            let y: Vec<f64> = p.iter().zip(&corrections[k]).map(|(a, b)| a + b).collect();
            let t: f64 = slab.support.iter().map(|&i| y[i]).sum();
            let shift = if t > slab.hi {
                (slab.hi - t) / slab.support.len() as f64
            } else if t < slab.lo {
                (slab.lo - t) / slab.support.len() as f64
            } else {
                0.0
            };
            let mut projected = y.clone();
            for &i in &slab.support {
                projected[i] += shift;
            }
            for i in 0..dim {
                corrections[k][i] = y[i] - projected[i];
            }
            p = projected;
        }
        let k = slabs.len();
        let y: Vec<f64> = p.iter().zip(&corrections[k]).map(|(a, b)| a + b).collect();
        let projected = simplex_project(&y);
        for i in 0..dim {
            corrections[k][i] = y[i] - projected[i];
        }
        p = projected;
        let r = violation(&p, &slabs);
        if r < best_residual {
            best_residual = r;
            best = p.clone();
        }
    }
    if best_residual > tol {
        return Err(Error::Integrity {
            detail: format!(
                "commuting-core search stalled at residual {best_residual:.3e}; \
                 the core of a valid measure on a commuting space is never empty"
            ),
        });
    }
    DensityMatrix::mixture(&best, &basis)
}
