//! Finite event spaces: sets of projectors containing the empty and certain
//! events and closed under complement and under products/unions of commuting
//! pairs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    basis_ket, hermitian_eigensystem, inner, ket_norm, ComplexMatrix, Ket, Projector,
};

/// Two projectors closer than this in the entrywise infinity norm are the
/// same member.
pub const DEDUP_TOL: f64 = 1e-8;
/// Commutator norm below which a pair counts as commuting.
pub const COMMUTE_TOL: f64 = 1e-9;
/// Default cap on the size of a generated closure.
pub const DEFAULT_CAP: usize = 4096;

const DIAG_TOL: f64 = 1e-8;
const DIAG_ATTEMPTS: usize = 5;

/// A finite, deduplicated, closed set of projectors on one Hilbert space.
/// Members keep their insertion order, so generation is reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct EventSpace {
    dim: usize,
    projectors: Vec<Projector>,
    complements: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    dim: usize,
    projectors: Vec<Projector>,
}

impl EventSpace {
    /// Least closed superset of `generators` together with the empty and
    /// certain events. Fails if the closure would exceed `cap` members (the
    /// full projector lattice is infinite; only finitely generated subspaces
    /// are representable).
    pub fn generate(dim: usize, generators: &[Projector], cap: usize) -> Result<Self> {
        let mut members: Vec<Projector> = vec![Projector::zero(dim), Projector::identity(dim)];
        let find = |members: &[Projector], m: &ComplexMatrix| -> Option<usize> {
            members
                .iter()
                .position(|p| p.matrix().max_abs_diff(m) <= DEDUP_TOL)
        };
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: g.dim() });
            }
            if find(&members, g.matrix()).is_none() {
                members.push(g.clone());
            }
        }
        // Worklist pass: every member appended here is reached by the outer
        // index later, so one pass computes the fixed point.
        let mut i = 0;
        while i < members.len() {
            if members.len() > cap {
                return Err(Error::ClosureCapExceeded { reached: members.len(), cap });
            }
            let comp = members[i].complement();
            if find(&members, comp.matrix()).is_none() {
                members.push(comp);
            }
            for j in 0..=i {
                let a = members[i].matrix();
                let b = members[j].matrix();
                if a.commutator_norm(b) > COMMUTE_TOL {
                    continue;
                }
                let prod = a.matmul(b);
                let union = a.add(b).sub(&prod);
                for m in [prod, union] {
                    if find(&members, &m).is_none() {
                        members.push(Projector::new(m)?);
                        if members.len() > cap {
                            return Err(Error::ClosureCapExceeded {
                                reached: members.len(),
                                cap,
                            });
                        }
                    }
                }
            }
            i += 1;
        }
        Self::assemble(dim, members)
    }

    /// Wrap an explicit member list, verifying deduplication and closure.
    pub fn from_parts(dim: usize, projectors: Vec<Projector>) -> Result<Self> {
        let find = |m: &ComplexMatrix| -> Option<usize> {
            projectors
                .iter()
                .position(|p| p.matrix().max_abs_diff(m) <= DEDUP_TOL)
        };
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
            }
            if let Some(j) = find(p.matrix()) {
                if j != i {
                    return Err(Error::DuplicateProjector { i: j, j: i });
                }
            }
        }
        if find(Projector::zero(dim).matrix()).is_none()
            || find(Projector::identity(dim).matrix()).is_none()
        {
            return Err(Error::SpaceNotClosed {
                detail: "missing the empty or the certain event".into(),
            });
        }
        for (i, p) in projectors.iter().enumerate() {
            if find(p.complement().matrix()).is_none() {
                return Err(Error::SpaceNotClosed {
                    detail: format!("complement of member {i} is missing"),
                });
            }
            for (j, q) in projectors.iter().enumerate().skip(i) {
                if p.matrix().commutator_norm(q.matrix()) > COMMUTE_TOL {
                    continue;
                }
                let prod = p.matrix().matmul(q.matrix());
                let union = p.matrix().add(q.matrix()).sub(&prod);
                if find(&prod).is_none() || find(&union).is_none() {
                    return Err(Error::SpaceNotClosed {
                        detail: format!("product or union of members {i} and {j} is missing"),
                    });
                }
            }
        }
        Self::assemble(dim, projectors)
    }

    fn assemble(dim: usize, projectors: Vec<Projector>) -> Result<Self> {
        let mut complements = Vec::with_capacity(projectors.len());
        for p in &projectors {
            let c = p.complement();
            let idx = projectors
                .iter()
                .position(|q| q.matrix().max_abs_diff(c.matrix()) <= DEDUP_TOL)
                .ok_or_else(|| Error::SpaceNotClosed {
                    detail: "complement lookup failed".into(),
                })?;
            complements.push(idx);
        }
        Ok(EventSpace { dim, projectors, complements })
    }

    /// The full Boolean algebra (2^d members) on an orthonormal basis.
    pub fn boolean_algebra(basis: &[Ket]) -> Result<Self> {
        let dim = basis.len();
        let atoms: Vec<Projector> = basis
            .iter()
            .map(Projector::onto_ket)
            .collect::<Result<_>>()?;
        Self::generate(dim, &atoms, 1 << (dim + 1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn members(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn member(&self, idx: usize) -> &Projector {
        &self.projectors[idx]
    }

    /// Index of the member matching `m` within the deduplication tolerance.
    pub fn find(&self, m: &ComplexMatrix) -> Option<usize> {
        self.projectors
            .iter()
            .position(|p| p.matrix().max_abs_diff(m) <= DEDUP_TOL)
    }

    pub fn complement_index(&self, idx: usize) -> usize {
        self.complements[idx]
    }

    /// True when every pair of members commutes.
    pub fn is_commuting(&self) -> bool {
        self.first_non_commuting_pair().is_none()
    }

    pub fn first_non_commuting_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.projectors.len() {
            for j in (i + 1)..self.projectors.len() {
                if self.projectors[i]
                    .matrix()
                    .commutator_norm(self.projectors[j].matrix())
                    > COMMUTE_TOL
                {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// An orthonormal basis in which every member is diagonal with entries
    /// in {0, 1}. Uses a random linear combination of the members with
    /// seeded coefficients, retrying on eigenvalue collisions.
    pub fn simultaneous_diagonalize(&self) -> Result<Vec<Ket>> {
        if let Some((i, j)) = self.first_non_commuting_pair() {
            return Err(Error::NonCommutingPair { i, j });
        }
        simultaneous_diagonalize_projectors(self.dim, &self.projectors)
    }
}

/// Joint eigenbasis of a family of mutually commuting projectors.
pub fn simultaneous_diagonalize_projectors(dim: usize, members: &[Projector]) -> Result<Vec<Ket>> {
    for attempt in 0..DIAG_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51D1A6 + attempt as u64);
        let mut combo = ComplexMatrix::zeros(dim);
        for p in members {
            let c: f64 = rng.gen_range(1.0..2.0);
            combo = combo.add(&p.matrix().scale_re(c));
        }
        let sys = hermitian_eigensystem(&combo)?;
        let basis = sys.vectors;
        if members.iter().all(|p| is_diagonal_zero_one(p, &basis)) {
            return Ok(basis);
        }
        // eigenvalue collision across distinct joint eigenspaces: retry
    }
    Err(Error::DiagonalizationFailed { attempts: DIAG_ATTEMPTS })
}

fn is_diagonal_zero_one(p: &Projector, basis: &[Ket]) -> bool {
    let d = basis.len();
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate().take(d) {
            let v = p.matrix().sandwich(bi, bj);
            if i == j {
                if v.re.min(1.0 - v.re).abs() > DIAG_TOL || v.im.abs() > DIAG_TOL {
                    return false;
                }
            } else if v.norm() > DIAG_TOL {
                return false;
            }
        }
    }
    true
}

/// Extend a partial orthonormal family to a full orthonormal basis by
/// Gram-Schmidt against the canonical basis vectors.
pub fn complete_basis(partial: &[Ket], dim: usize) -> Result<Vec<Ket>> {
    for (i, a) in partial.iter().enumerate() {
        if a.len() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: a.len() });
        }
        for (j, b) in partial.iter().enumerate() {
            let g = inner(a, b);
            let target = if i == j { 1.0 } else { 0.0 };
            if (g - Complex64::new(target, 0.0)).norm() > 1e-9 {
                return Err(Error::NotOrthonormal { i, j });
            }
        }
    }
    let mut basis: Vec<Ket> = partial.to_vec();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = basis_ket(dim, i);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let n = ket_norm(&v);
        if n > 1e-6 {
            for z in v.iter_mut() {
                *z /= n;
            }
            basis.push(v);
        }
    }
    if basis.len() != dim {
        return Err(Error::Integrity {
            detail: "basis completion ran out of canonical directions".into(),
        });
    }
    Ok(basis)
}

/// The four mutually unbiased bases of a three-dimensional space: the
/// computational basis plus the three quadratic Fourier bases.
pub fn mub_bases_d3() -> Vec<Vec<Ket>> {
    let omega = Complex64::new(-0.5, 3.0_f64.sqrt() / 2.0);
    let mut bases = vec![(0..3).map(|i| basis_ket(3, i)).collect::<Vec<_>>()];
    for k in 0..3u32 {
        let mut basis = Vec::new();
        for j in 0..3u32 {
            let ket: Ket = (0..3u32)
                .map(|m| omega.powu((k * m * m + j * m) % 3) / 3.0_f64.sqrt())
                .collect();
            basis.push(ket);
        }
        bases.push(basis);
    }
    bases
}

/// 26-event space generated by the four mutually unbiased bases at d = 3.
/// Its sharp Born measures pin the generating state uniquely.
pub fn mub_space_d3() -> Result<EventSpace> {
    let mut gens = Vec::new();
    for basis in mub_bases_d3() {
        for ket in &basis {
            gens.push(Projector::onto_ket(ket)?);
        }
    }
    EventSpace::generate(3, &gens, 64)
}

/// Nineteen unit kets chosen to cover state space well together with the
/// twelve mutually unbiased directions. With these, consistency of Born
/// probabilities on the space members within a window of width w forces two
/// states to agree within spectral norm w.
const SPREAD_KETS: [[[f64; 2]; 3]; 19] = [
    [[4.15953985952638272e-01, 0.0], [-2.75585668392238359e-01, 2.29422642181790287e-01], [-7.67420607334124316e-01, 3.30855986254089296e-01]],
    [[8.33337868015287420e-01, 0.0], [-3.49188720394063845e-02, -9.23891164750307581e-02], [-5.20334482609626003e-01, -1.58255955564292283e-01]],
    [[3.13824879194733009e-01, 0.0], [-2.43903157926198294e-01, -7.26225376731862604e-01], [5.38669004671934792e-01, -1.56389259057169494e-01]],
    [[7.27809147517067601e-01, 0.0], [-5.57742040492231611e-02, -2.29655389494579643e-01], [-3.88000037458871017e-02, 6.42600999640186576e-01]],
    [[6.38788380111235843e-01, 0.0], [7.17237281193638054e-01, -3.13867753162954954e-02], [-2.48686129014182716e-01, 1.21203001084986370e-01]],
    [[6.23111580860065795e-01, 0.0], [1.87575751929118323e-01, 4.10791403574407243e-01], [6.38586475283939858e-01, 2.24308272215317144e-03]],
    [[1.54589879725175516e-01, 0.0], [-2.16123985958282860e-01, 7.37884142137532617e-01], [-5.98634577473725171e-01, 1.62960201321892595e-01]],
    [[7.93393870131755219e-01, 0.0], [1.38005584486183858e-01, -5.85013937733181444e-01], [9.35142770336443857e-02, 2.22350654771853104e-02]],
    [[7.92074381303418562e-01, 0.0], [9.67471407361555763e-02, 3.55682431377819935e-02], [1.17138043712568626e-01, -5.90145527846707707e-01]],
    [[2.56923086160405933e-01, 0.0], [-2.25064455189757318e-01, -1.47574065377874986e-01], [8.77760861271407178e-01, -3.01818297085969411e-01]],
    [[8.40053404920810265e-01, 0.0], [1.69656883023203420e-01, 2.58428480148064910e-01], [1.70671612763622860e-01, 4.11840673281342162e-01]],
    [[1.81453577685022654e-01, 0.0], [-5.48470622901374785e-02, -4.72938071347881961e-01], [-7.95368131496084430e-01, 3.28307043746582483e-01]],
    [[1.77249216720513775e-01, 0.0], [4.93013449269490645e-01, -6.25648575250495997e-01], [-4.70553605715881701e-02, -5.76081684607197220e-01]],
    [[3.65591887424343898e-01, 0.0], [-8.95856165203446242e-01, -2.50858586925560359e-02], [1.81416088367779005e-01, 1.73905737948674949e-01]],
    [[4.08437819086015508e-01, 0.0], [1.30066959267908733e-01, 4.82867304738663627e-01], [-3.55400304483312890e-01, -6.75863095334141351e-01]],
    [[2.58591692872550571e-01, 0.0], [1.14474745076246706e-01, 2.37333750768937340e-01], [4.91104318344637247e-01, 7.88996266382949285e-01]],
    [[8.09919089724819741e-01, 0.0], [-5.65065056287366918e-01, 1.41183320998613332e-01], [-4.57513640728742718e-02, -5.20253094132872435e-02]],
    [[4.47796786325730833e-01, 0.0], [-4.63103168944359600e-02, -8.03320484020445869e-01], [-2.55484351448530093e-02, 3.89046102821105966e-01]],
    [[6.46333492775771457e-01, 0.0], [2.82540860877408040e-01, 6.99208340699376207e-01], [-3.05615026998518856e-02, 1.12238001140776533e-01]],
];

/// 64-event probe space at d = 3: the four mutually unbiased bases plus
/// nineteen spread directions (each contributing itself and its complement).
pub fn spread_probe_space() -> Result<EventSpace> {
    let mut gens = Vec::new();
    for basis in mub_bases_d3() {
        for ket in &basis {
            gens.push(Projector::onto_ket(ket)?);
        }
    }
    for entry in SPREAD_KETS {
        let mut ket: Ket = entry
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let n = ket_norm(&ket);
        for z in ket.iter_mut() {
            *z /= n;
        }
        gens.push(Projector::onto_ket(&ket)?);
    }
    EventSpace::generate(3, &gens, 128)
}

impl TryFrom<SpaceJson> for EventSpace {
    type Error = Error;

    fn try_from(j: SpaceJson) -> Result<Self> {
        EventSpace::from_parts(j.dim, j.projectors)
    }
}

impl From<EventSpace> for SpaceJson {
    fn from(s: EventSpace) -> Self {
        SpaceJson { dim: s.dim, projectors: s.projectors }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::superposition;

    #[test]
    fn qubit_closure_has_four_members() {
        let p0 = Projector::onto_ket(&basis_ket(2, 0)).unwrap();
        let space = EventSpace::generate(2, &[p0], 16).unwrap();
        assert_eq!(space.len(), 4);
        assert!(space.is_commuting());
        // members: 0, identity, |0><0|, |1><1|
        let p1 = Projector::onto_ket(&basis_ket(2, 1)).unwrap();
        assert!(space.find(p1.matrix()).is_some());
    }

    #[test]
    fn two_atoms_at_d3_generate_the_boolean_algebra() {
        let p0 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let p1 = Projector::onto_ket(&basis_ket(3, 1)).unwrap();
        let space = EventSpace::generate(3, &[p0, p1], 64).unwrap();
        assert_eq!(space.len(), 8);
    }

    #[test]
    fn non_commuting_generators_are_kept() {
        let p0 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let plus = Projector::onto_ket(&superposition(3, &[(0, 1.0), (1, 1.0)])).unwrap();
        let space = EventSpace::generate(3, &[p0.clone(), plus.clone()], 64).unwrap();
        assert!(!space.is_commuting());
        assert!(p0.matrix().commutator_norm(plus.matrix()) > 0.1);
    }

    #[test]
    fn cap_is_enforced() {
        let p0 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let p1 = Projector::onto_ket(&basis_ket(3, 1)).unwrap();
        assert!(matches!(
            EventSpace::generate(3, &[p0, p1], 4),
            Err(Error::ClosureCapExceeded { .. })
        ));
    }

    #[test]
    fn regeneration_is_idempotent() {
        let p0 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let p1 = Projector::onto_ket(&basis_ket(3, 1)).unwrap();
        let space = EventSpace::generate(3, &[p0, p1], 64).unwrap();
        let again = EventSpace::generate(3, space.members(), 64).unwrap();
        assert_eq!(space.len(), again.len());
        for p in space.members() {
            assert!(again.find(p.matrix()).is_some());
        }
    }

    #[test]
    fn diagonalization_of_a_nested_chain() {
        let p1 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let p2 = Projector::from_kets(&[basis_ket(3, 0), basis_ket(3, 1)]).unwrap();
        let space = EventSpace::generate(3, &[p1, p2], 64).unwrap();
        let basis = space.simultaneous_diagonalize().unwrap();
        assert_eq!(basis.len(), 3);
        for p in space.members() {
            assert!(is_diagonal_zero_one(p, &basis));
        }
    }

    #[test]
    fn diagonalization_rejects_non_commuting() {
        let p0 = Projector::onto_ket(&basis_ket(3, 0)).unwrap();
        let plus = Projector::onto_ket(&superposition(3, &[(0, 1.0), (1, 1.0)])).unwrap();
        let space = EventSpace::generate(3, &[p0, plus], 64).unwrap();
        assert!(matches!(
            space.simultaneous_diagonalize(),
            Err(Error::NonCommutingPair { .. })
        ));
    }

    #[test]
    fn trivial_space_diagonalizes_in_any_basis() {
        let space = EventSpace::generate(3, &[], 16).unwrap();
        assert_eq!(space.len(), 2);
        let basis = space.simultaneous_diagonalize().unwrap();
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn complete_basis_from_empty_is_canonical() {
        let basis = complete_basis(&[], 3).unwrap();
        for (i, b) in basis.iter().enumerate() {
            assert!((b[i].re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_basis_extends_plus_state() {
        let plus = superposition(2, &[(0, 1.0), (1, 1.0)]);
        let basis = complete_basis(&[plus.clone()], 2).unwrap();
        assert_eq!(basis.len(), 2);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-10);
        // second vector is (|0> - |1>)/sqrt(2) up to phase
        let minus = superposition(2, &[(0, 1.0), (1, -1.0)]);
        assert!((inner(&minus, &basis[1]).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn complete_basis_checks_gram_matrix() {
        let partial = vec![basis_ket(3, 2)];
        let basis = complete_basis(&partial, 3).unwrap();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = inner(a, b).norm();
                if i == j {
                    assert!((g - 1.0).abs() < 1e-10);
                } else {
                    assert!(g < 1e-10);
                }
            }
        }
        let bad = vec![basis_ket(3, 0), basis_ket(3, 0)];
        assert!(matches!(
            complete_basis(&bad, 3),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn mub_bases_are_unbiased() {
        let bases = mub_bases_d3();
        assert_eq!(bases.len(), 4);
        for (a, ba) in bases.iter().enumerate() {
            for (b, bb) in bases.iter().enumerate() {
                for ka in ba {
                    for kb in bb {
                        let ov = inner(ka, kb).norm_sqr();
                        if a == b {
                            assert!(ov < 1e-12 || (ov - 1.0).abs() < 1e-12);
                        } else {
                            assert!((ov - 1.0 / 3.0).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn probe_spaces_have_expected_sizes() {
        assert_eq!(mub_space_d3().unwrap().len(), 26);
        assert_eq!(spread_probe_space().unwrap().len(), 64);
    }
}
