//! Reference complexes and catalogs used across the test and CLI surface.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::complex::{Complex, FaceCap};
use crate::nerve;
use crate::surface::CurveCatalog;

/// Antipodal label pairs of the octahedron fixture.
pub const OCTAHEDRON_ANTIPODES: [(&str, &str); 3] = [("a", "d"), ("b", "e"), ("c", "f")];

/// Hollow triangle: maximal simplices ab, bc, ca.
pub fn triangle_boundary() -> Complex {
    Complex::build(&[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]], false).unwrap()
}

/// Two edges sharing a vertex: ab, bc. Separation fails at (a, b).
pub fn path_complex() -> Complex {
    Complex::build(&[vec!["a", "b"], vec!["b", "c"]], false).unwrap()
}

/// One simplex on the first `n` lowercase labels.
pub fn single_simplex(n: usize) -> Complex {
    assert!(n >= 1 && n <= 26);
    let labels: Vec<String> = (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    Complex::build(&[labels], false).unwrap()
}

/// Octahedron boundary as a flag complex: vertices a..f, edges all pairs
/// except the three antipodal ones, eight triangles.
pub fn octahedron() -> Complex {
    let labels = ["a", "b", "c", "d", "e", "f"];
    let antipodal = |u: &str, v: &str| {
        OCTAHEDRON_ANTIPODES
            .iter()
            .any(|(x, y)| (*x == u && *y == v) || (*x == v && *y == u))
    };
    let mut gens: Vec<Vec<&str>> = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if !antipodal(labels[i], labels[j]) {
                gens.push(vec![labels[i], labels[j]]);
            }
        }
    }
    Complex::build(&gens, true).unwrap()
}

/// Icosahedron 1-skeleton, flag completion: 12 vertices, 30 edges,
/// 20 triangles, automorphism group of order 120.
pub fn icosahedron() -> Complex {
    // Top vertex 0, upper ring 1..=5, lower ring 6..=10, bottom vertex 11.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for k in 0..5 {
        edges.push((0, 1 + k));
        edges.push((11, 6 + k));
        edges.push((1 + k, 1 + (k + 1) % 5));
        edges.push((6 + k, 6 + (k + 1) % 5));
        edges.push((1 + k, 6 + k));
        edges.push((1 + k, 6 + (k + 1) % 5));
    }
    let label = |i: usize| format!("v{:02}", i);
    let gens: Vec<Vec<String>> = edges
        .into_iter()
        .map(|(u, v)| vec![label(u), label(v)])
        .collect();
    Complex::build(&gens, true).unwrap()
}

/// The designed extension-condition counterexample {12, 13, 14, 234}.
pub fn spoke_counterexample() -> Complex {
    Complex::build(
        &[
            vec!["1", "2"],
            vec!["1", "3"],
            vec!["1", "4"],
            vec!["2", "3", "4"],
        ],
        false,
    )
    .unwrap()
}

/// Minimal 6-vertex triangulation of the projective plane: betti (1, 0),
/// torsion (2) in degree 1.
pub fn projective_plane() -> Complex {
    let faces = [
        "123", "134", "145", "156", "126", "235", "346", "245", "356", "246",
    ];
    let gens: Vec<Vec<String>> = faces
        .iter()
        .map(|f| f.chars().map(|c| c.to_string()).collect())
        .collect();
    Complex::build(&gens, false).unwrap()
}

/// Genus-2 chain catalog: curves c1..c5, consecutive curves meet once.
pub fn chain_catalog() -> CurveCatalog {
    let curves: Vec<String> = (1..=5).map(|i| format!("c{i}")).collect();
    let inter: Vec<Vec<u64>> = (0..5)
        .map(|i| {
            (0..5)
                .map(|j| if (i as i64 - j as i64).abs() == 1 { 1 } else { 0 })
                .collect()
        })
        .collect();
    CurveCatalog::new(2, curves, inter).unwrap()
}

/// Erdos-Renyi flag complex on `n` vertices with edge probability `p`.
/// Isolated vertices stay as rank-1 maximal simplices.
pub fn random_flag_complex(n: usize, p: f64, rng: &mut ChaCha20Rng) -> Complex {
    let label = |i: usize| format!("v{:02}", i);
    let mut gens: Vec<Vec<String>> = (0..n).map(|i| vec![label(i)]).collect();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                gens.push(vec![label(i), label(j)]);
            }
        }
    }
    Complex::build(&gens, true).unwrap()
}

/// Random non-flag complex from a handful of random generator simplices.
pub fn random_complex(n: usize, gens: usize, rng: &mut ChaCha20Rng) -> Complex {
    let label = |i: usize| format!("v{:02}", i);
    let mut out: Vec<Vec<String>> = Vec::new();
    for _ in 0..gens {
        let size = rng.gen_range(1..=n.min(4));
        let mut picked = std::collections::BTreeSet::new();
        while picked.len() < size {
            picked.insert(rng.gen_range(0..n));
        }
        out.push(picked.into_iter().map(label).collect());
    }
    for i in 0..n {
        out.push(vec![label(i)]);
    }
    Complex::build(&out, false).unwrap()
}

/// Deterministic stream of random flag complexes that satisfy the
/// separation condition; `seed` fixes the stream.
pub fn separated_flag_fixtures(count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(4..=10);
        let p = rng.gen_range(0.35..0.75);
        let x = random_flag_complex(n, p, &mut rng);
        let report = nerve::check_conditions(&x, FaceCap::default()).unwrap();
        if report.separation.is_none() {
            out.push(x);
        }
    }
    out
}

/// Deterministic stream of random flag complexes satisfying both nerve
/// conditions.
pub fn two_condition_flag_fixtures(count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(4..=10);
        let p = rng.gen_range(0.35..0.75);
        let x = random_flag_complex(n, p, &mut rng);
        let report = nerve::check_conditions(&x, FaceCap::default()).unwrap();
        if report.separation.is_none() && report.extension_holds() {
            out.push(x);
        }
    }
    out
}

/// Plain random flag complexes, no filtering.
pub fn flag_fixtures(count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(4..=10);
            let p = rng.gen_range(0.35..0.75);
            random_flag_complex(n, p, &mut rng)
        })
        .collect()
}
