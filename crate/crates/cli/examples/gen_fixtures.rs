//! Regenerate the bundled fixture files. Run from the repository root:
//!
//! ```text
//! cargo run -p qivpm-cli --example gen_fixtures
//! ```
//!
//! Fixtures are derived entirely from the library, so this is the single
//! source of truth for their contents.

use std::fs;
use std::path::PathBuf;

use qivpm_core::hilbert::{basis_ket, superposition, Complex64};
use qivpm_core::{
    ComplexMatrix, DensityMatrix, EventSpace, Interval, Projector, Qivpm,
};

fn rank_measure(space: &EventSpace, rank1: Interval, rank2: Interval) -> Qivpm {
    let intervals = space
        .members()
        .iter()
        .map(|p| match p.rank() {
            0 => Interval::F,
            1 => rank1,
            2 => rank2,
            _ => Interval::T,
        })
        .collect();
    Qivpm::new(space.clone(), intervals).expect("rank assignment is well-formed")
}

fn write_json<T: serde::Serialize>(dir: &PathBuf, name: &str, value: &T) {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    let path = dir.join(name);
    fs::write(&path, text).expect("fixture written");
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir).expect("fixtures dir");

    // the five rank-assigned measures on the d = 3 computational algebra
    let atoms: Vec<Projector> = (0..3)
        .map(|i| Projector::onto_ket(&basis_ket(3, i)).unwrap())
        .collect();
    let algebra = EventSpace::generate(3, &atoms, 64).unwrap();
    let third = 1.0 / 3.0;
    write_json(&dir, "mu0.json", &rank_measure(&algebra, Interval::F, Interval::T));
    write_json(
        &dir,
        "mu1.json",
        &rank_measure(
            &algebra,
            Interval::new(0.0, 0.25).unwrap(),
            Interval::new(0.75, 1.0).unwrap(),
        ),
    );
    write_json(
        &dir,
        "mu2.json",
        &rank_measure(
            &algebra,
            Interval::new(0.0, third).unwrap(),
            Interval::new(2.0 * third, 1.0).unwrap(),
        ),
    );
    write_json(
        &dir,
        "mu2prime.json",
        &rank_measure(&algebra, Interval::point(third), Interval::point(2.0 * third)),
    );
    write_json(
        &dir,
        "mu3.json",
        &rank_measure(
            &algebra,
            Interval::new(0.0, 0.5).unwrap(),
            Interval::new(0.5, 1.0).unwrap(),
        ),
    );

    // the empty-core fixture: impossible on three spanning directions
    let k0 = basis_ket(3, 0);
    let plus = superposition(3, &[(0, 1.0), (1, 1.0)]);
    let plus_prime = superposition(3, &[(0, 1.0), (2, 1.0)]);
    let gens: Vec<Projector> = [&k0, &plus, &plus_prime]
        .iter()
        .map(|k| Projector::onto_ket(k).unwrap())
        .collect();
    let span_space = EventSpace::generate(3, &gens, 64).unwrap();
    let intervals = span_space
        .members()
        .iter()
        .map(|p| if p.rank() <= 1 { Interval::F } else { Interval::T })
        .collect();
    let table_nonborn = Qivpm::new(span_space, intervals).unwrap();
    write_json(&dir, "table_nonborn.json", &table_nonborn);

    // a sharp Born measure whose core pins the generating state: the
    // four unbiased bases give full-rank constraints
    let mub = qivpm_core::events::mub_space_d3().unwrap();
    let rho = DensityMatrix::mixture(
        &[0.5, 0.3, 0.2],
        &[basis_ket(3, 0), basis_ket(3, 1), basis_ket(3, 2)],
    )
    .unwrap();
    write_json(&dir, "born_sharp.json", &Qivpm::born(&rho, &mub).unwrap());
    write_json(&dir, "born_sharp_rho.json", &rho);

    // position-like observable 0*P0 + 1*P1 + 2*P2 as a raw matrix
    let mut o = ComplexMatrix::zeros(3);
    for i in 0..3 {
        o.set(i, i, Complex64::new(i as f64, 0.0));
    }
    write_json(&dir, "observable_position.json", &o);

    // the uniform state, for the distance-bound command
    write_json(&dir, "rho_uniform.json", &DensityMatrix::maximally_mixed(3));

    // a table map that fails the ultramodularity grid check
    #[derive(serde::Serialize)]
    struct TableMapFile {
        breakpoints: Vec<f64>,
        values: Vec<Interval>,
    }
    write_json(
        &dir,
        "table_broken_map.json",
        &TableMapFile {
            breakpoints: vec![0.0, 24.0 / 64.0, 41.0 / 64.0, 1.0],
            values: vec![
                Interval::U,
                Interval::new(0.25, 0.75).unwrap(),
                Interval::U,
            ],
        },
    );
}
