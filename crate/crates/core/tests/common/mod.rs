//! Shared randomized generators for the integration suites.
#![allow(dead_code)] // each test binary uses a different subset

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qivpm_core::hilbert::{basis_ket, inner, ket_norm};
use qivpm_core::{
    ComplexMatrix, DensityMatrix, EventSpace, Interval, IntervalMap, Ket, Projector, Qivpm,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ket(rng: &mut ChaCha8Rng, dim: usize) -> Ket {
    let mut k: Ket = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = ket_norm(&k);
    for z in k.iter_mut() {
        *z /= n;
    }
    k
}

/// Random orthonormal basis by Gram-Schmidt on random kets.
pub fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Ket> {
    let mut basis: Vec<Ket> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = random_ket(rng, dim);
        for b in &basis {
            let c = inner(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = ket_norm(&v);
        if n > 1e-3 {
            for z in v.iter_mut() {
                *z /= n;
            }
            basis.push(v);
        }
    }
    basis
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.add(&g.adjoint()).scale_re(0.5)
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = g.matmul(&g.adjoint());
    let t = w.trace().re;
    DensityMatrix::new(w.scale_re(1.0 / t)).expect("Wishart-normalized matrix is a state")
}

/// Boolean algebra (2^dim members) on a random orthonormal basis.
pub fn random_boolean_algebra(rng: &mut ChaCha8Rng, dim: usize) -> EventSpace {
    let basis = random_basis(rng, dim);
    let atoms: Vec<Projector> = basis
        .iter()
        .map(|k| Projector::onto_ket(k).expect("unit ket"))
        .collect();
    EventSpace::generate(dim, &atoms, 1 << (dim + 1)).expect("boolean algebra fits the cap")
}

/// A valid measure: the Born measure of a random state, optionally blurred
/// through a width-respecting map (which preserves validity).
pub fn random_valid_measure(rng: &mut ChaCha8Rng, space: &EventSpace) -> Qivpm {
    let rho = random_state(rng, space.dim());
    let born = Qivpm::born(&rho, space).expect("dimensions match");
    match rng.gen_range(0..3u8) {
        0 => born,
        1 => {
            let alpha = rng.gen_range(0.05..0.8);
            let map = IntervalMap::clamp(alpha).expect("alpha in range");
            Qivpm::compose(&map, &born).expect("born measures are sharp")
        }
        _ => Qivpm::compose(&IntervalMap::ThreeValued, &born).expect("born measures are sharp"),
    }
}

pub fn d3_computational_algebra() -> EventSpace {
    let atoms: Vec<Projector> = (0..3)
        .map(|i| Projector::onto_ket(&basis_ket(3, i)).expect("unit ket"))
        .collect();
    EventSpace::generate(3, &atoms, 64).expect("boolean algebra fits")
}

/// Assign intervals by rank on a Boolean algebra.
pub fn rank_measure(space: &EventSpace, rank1: Interval, rank2: Interval) -> Qivpm {
    let dim = space.dim();
    let intervals = space
        .members()
        .iter()
        .map(|p| {
            if p.rank() == 0 {
                Interval::F
            } else if p.rank() == dim {
                Interval::T
            } else if p.rank() == 1 {
                rank1
            } else {
                rank2
            }
        })
        .collect();
    Qivpm::new(space.clone(), intervals).expect("rank assignment is a probability assignment")
}
