//! Barycentric subdivision, unit-edge graph metrics, and the barycentre
//! comparison map between a nerve and the subdivision of its base.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::complex::{Complex, FaceCap, Simplex};
use crate::error::{Error, Result};
use crate::nerve;

/// Undirected simple graph with unit edge lengths and BFS distances.
pub struct MetricGraph {
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
}

impl MetricGraph {
    pub fn new(labels: Vec<String>, edges: &[(u32, u32)]) -> MetricGraph {
        let mut adj = vec![Vec::new(); labels.len()];
        for &(u, v) in edges {
            if u != v && !adj[u as usize].contains(&v) {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        MetricGraph { labels, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
    }

    /// Unit-edge shortest path length; `None` across components.
    pub fn distance(&self, u: u32, v: u32) -> Option<usize> {
        self.distances_from(u)[v as usize]
    }

    pub fn distances_from(&self, u: u32) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[u as usize] = Some(0);
        let mut queue = VecDeque::from([u]);
        while let Some(p) = queue.pop_front() {
            let d = dist[p as usize].unwrap();
            for &q in &self.adj[p as usize] {
                if dist[q as usize].is_none() {
                    dist[q as usize] = Some(d + 1);
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        self.distances_from(0).iter().all(|d| d.is_some())
    }
}

/// 1-skeleton of a complex as a metric graph; node order follows vertex ids.
pub fn skeleton_graph(x: &Complex) -> MetricGraph {
    let labels = x.labels().to_vec();
    let edges: Vec<(u32, u32)> = x.edges().into_iter().map(|(u, v)| (u.0, v.0)).collect();
    MetricGraph::new(labels, &edges)
}

/// Barycentric subdivision: one vertex per face of `x`, one simplex per
/// chain of faces under strict inclusion.
pub struct BsdComplex {
    pub complex: Complex,
    /// face of x -> label of the corresponding bsd vertex
    pub dictionary: Vec<(Simplex, String)>,
}

pub fn barycentric_subdivision(x: &Complex, cap: FaceCap) -> Result<BsdComplex> {
    let faces = x.all_faces(cap)?;
    let dictionary: Vec<(Simplex, String)> = faces
        .iter()
        .map(|f| (f.clone(), x.render_simplex(f)))
        .collect();
    // Maximal chains: orderings of a maximal simplex, one face per rank.
    let mut budget = 0usize;
    let mut gens: Vec<Vec<String>> = Vec::new();
    for m in x.maximal_simplices() {
        let verts = m.vertices();
        let mut stack: Vec<(Vec<usize>, Vec<String>)> = vec![(Vec::new(), Vec::new())];
        while let Some((picked, chain)) = stack.pop() {
            if picked.len() == verts.len() {
                budget += 1;
                if budget > cap.0 {
                    return Err(Error::FaceCapExceeded { cap: cap.0 });
                }
                gens.push(chain);
                continue;
            }
            for (i, v) in verts.iter().enumerate() {
                if picked.contains(&i) {
                    continue;
                }
                let mut p = picked.clone();
                p.push(i);
                let mut sorted: Vec<_> = p.iter().map(|&k| verts[k]).collect();
                sorted.sort_unstable();
                let face = Simplex::from_sorted(sorted);
                let mut c = chain.clone();
                c.push(x.render_simplex(&face));
                stack.push((p, c));
                let _ = v;
            }
        }
    }
    let complex = Complex::build(&gens, false)?;
    Ok(BsdComplex {
        complex,
        dictionary,
    })
}

/// Only the 1-skeleton of the subdivision: nodes are faces, edges are
/// strict containments. Distances never need the higher bsd simplices.
pub fn bsd_skeleton_graph(x: &Complex, cap: FaceCap) -> Result<(MetricGraph, BTreeMap<Simplex, u32>)> {
    let faces = x.all_faces(cap)?;
    let index: BTreeMap<Simplex, u32> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i as u32))
        .collect();
    let mut edges = Vec::new();
    for (i, a) in faces.iter().enumerate() {
        for (j, b) in faces.iter().enumerate().skip(i + 1) {
            if a.is_face_of(b) || b.is_face_of(a) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let labels: Vec<String> = faces.iter().map(|f| x.render_simplex(f)).collect();
    Ok((MetricGraph::new(labels, &edges), index))
}

/// The four checkable properties of the barycentre map from nerve vertices
/// to subdivision vertices. Each failure carries a witness; all four hold
/// on every finite complex, so any failure is a hard error upstream.
#[derive(Clone, Debug)]
pub struct PhiReport {
    pub injective: bool,
    pub one_dense: bool,
    pub adjacency_to_dist2: bool,
    pub dist2_to_adjacency: bool,
    pub counterexamples: Vec<String>,
}

impl PhiReport {
    pub fn all_hold(&self) -> bool {
        self.injective && self.one_dense && self.adjacency_to_dist2 && self.dist2_to_adjacency
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "injective": self.injective,
            "one_dense": self.one_dense,
            "adjacency_to_dist2": self.adjacency_to_dist2,
            "dist2_to_adjacency": self.dist2_to_adjacency,
            "counterexamples": self.counterexamples,
        })
    }
}

pub fn phi_check(x: &Complex, cap: FaceCap) -> Result<PhiReport> {
    let (graph, index) = bsd_skeleton_graph(x, cap)?;
    let maximal = x.maximal_simplices();
    let image: Vec<u32> = maximal.iter().map(|m| index[m]).collect();
    let mut counterexamples = Vec::new();

    // (1) Distinct maximal simplices have distinct barycentres.
    let mut sorted = image.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let injective = sorted.len() == image.len();
    if !injective {
        counterexamples.push("barycentre map collides".to_string());
    }

    // (2) Every subdivision vertex lies within distance one of the image.
    let mut one_dense = true;
    for (face, &node) in &index {
        let close = image
            .iter()
            .any(|&b| matches!(graph.distance(node, b), Some(d) if d <= 1));
        if !close {
            one_dense = false;
            counterexamples.push(format!(
                "face {} is not within distance 1 of a barycentre",
                x.render_simplex(face)
            ));
        }
    }

    // (3) Nerve-adjacent barycentres lie at distance at most two.
    // (4) Barycentres at distance at most two are nerve-adjacent.
    let mut adjacency_to_dist2 = true;
    let mut dist2_to_adjacency = true;
    for i in 0..maximal.len() {
        let dist = graph.distances_from(image[i]);
        for j in i + 1..maximal.len() {
            let adjacent = !maximal[i].intersect(&maximal[j]).is_empty();
            let d = dist[image[j] as usize];
            if adjacent && !matches!(d, Some(d) if d <= 2) {
                adjacency_to_dist2 = false;
                counterexamples.push(format!(
                    "adjacent pair ({}, {}) at bsd distance {:?}",
                    x.render_simplex(&maximal[i]),
                    x.render_simplex(&maximal[j]),
                    d
                ));
            }
            if !adjacent && matches!(d, Some(d) if d <= 2) {
                dist2_to_adjacency = false;
                counterexamples.push(format!(
                    "non-adjacent pair ({}, {}) at bsd distance {:?}",
                    x.render_simplex(&maximal[i]),
                    x.render_simplex(&maximal[j]),
                    d
                ));
            }
        }
    }

    Ok(PhiReport {
        injective,
        one_dense,
        adjacency_to_dist2,
        dist2_to_adjacency,
        counterexamples,
    })
}

/// Pair selection for the quasi-isometry constant estimate.
pub enum PairSelection {
    All,
    /// Pairs of nerve vertex labels.
    List(Vec<(String, String)>),
}

/// Empirical quasi-isometry constants of the barycentre map on a finite
/// patch: lambda is the tightest multiplicative distortion over the sampled
/// pairs, mu the smallest additive slack that then closes both bounds.
pub struct QiReport {
    pub lambda: BigRational,
    pub mu: BigRational,
    pub sampled_pairs: usize,
    /// Pairs with infinite nerve distance; reported, excluded from bounds.
    pub infinite_pairs: usize,
}

impl QiReport {
    pub fn to_json_value(&self) -> Value {
        json!({
            "lambda": self.lambda.to_string(),
            "mu": self.mu.to_string(),
            "sampled_pairs": self.sampled_pairs,
            "infinite_pairs": self.infinite_pairs,
        })
    }
}

pub fn qi_constants(x: &Complex, selection: &PairSelection, cap: FaceCap) -> Result<QiReport> {
    let n = nerve::nerve_of_maximal(x, cap)?;
    let nerve_graph = skeleton_graph(&n.nerve);
    let (bsd_graph, index) = bsd_skeleton_graph(x, cap)?;

    let pairs: Vec<(u32, u32)> = match selection {
        PairSelection::All => {
            let count = n.nerve.vertex_count() as u32;
            (0..count)
                .flat_map(|i| (i + 1..count).map(move |j| (i, j)))
                .collect()
        }
        PairSelection::List(list) => {
            let mut out = Vec::new();
            for (a, b) in list {
                let u = nerve_graph
                    .index_of(a)
                    .ok_or_else(|| Error::UnknownVertex { label: a.clone() })?;
                let v = nerve_graph
                    .index_of(b)
                    .ok_or_else(|| Error::UnknownVertex { label: b.clone() })?;
                out.push((u, v));
            }
            out
        }
    };

    let mut lambda = BigRational::one();
    let mut infinite_pairs = 0usize;
    let mut sampled = Vec::new();
    for &(u, v) in &pairs {
        if u == v {
            continue;
        }
        let d_nerve = nerve_graph.distance(u, v);
        let base_u = n.base_of(crate::complex::VertexId(u));
        let base_v = n.base_of(crate::complex::VertexId(v));
        let d_bsd = bsd_graph.distance(index[base_u], index[base_v]);
        match (d_nerve, d_bsd) {
            (Some(dn), Some(db)) => {
                let dn = BigRational::from(BigInt::from(dn));
                let db = BigRational::from(BigInt::from(db));
                if !dn.is_zero() {
                    lambda = lambda.max(&db / &dn);
                }
                if !db.is_zero() {
                    lambda = lambda.max(&dn / &db);
                }
                sampled.push((dn, db));
            }
            _ => infinite_pairs += 1,
        }
    }
    let mut mu = BigRational::zero();
    for (dn, db) in &sampled {
        mu = mu.max(db - &lambda * dn);
        mu = mu.max(dn / &lambda - db);
    }
    Ok(QiReport {
        lambda,
        mu,
        sampled_pairs: sampled.len(),
        infinite_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bsd_examples() {
        let cap = FaceCap::default();
        let edge = Complex::build(&[vec!["a", "b"]], false).unwrap();
        let bsd = barycentric_subdivision(&edge, cap).unwrap();
        assert_eq!(bsd.complex.vertex_count(), 3);
        assert_eq!(bsd.complex.maximal_simplices().len(), 2);

        let tri_full = fixtures::single_simplex(3);
        let bsd = barycentric_subdivision(&tri_full, cap).unwrap();
        assert_eq!(bsd.complex.vertex_count(), 7);
        assert_eq!(bsd.complex.edges().len(), 12);
        assert_eq!(bsd.complex.maximal_simplices().len(), 6);
        assert!(bsd.complex.maximal_simplices().iter().all(|m| m.rank() == 3));

        let tri = fixtures::triangle_boundary();
        let bsd = barycentric_subdivision(&tri, cap).unwrap();
        assert_eq!(bsd.complex.vertex_count(), 6);
        assert_eq!(bsd.complex.edges().len(), 6);
    }

    #[test]
    fn bsd_chain_count_matches_brute_force() {
        // Oracle: enumerate chains in the face poset directly.
        let cap = FaceCap::default();
        let x = fixtures::octahedron();
        let faces = x.all_faces(cap).unwrap();
        let mut chains = 0usize;
        // Count maximal chains: strictly increasing sequences hitting every
        // rank from 1 to the rank of a maximal simplex.
        fn extend(faces: &[Simplex], current: &Simplex, x: &Complex) -> usize {
            let longer: Vec<&Simplex> = faces
                .iter()
                .filter(|f| f.rank() == current.rank() + 1 && current.is_face_of(f))
                .collect();
            if longer.is_empty() {
                usize::from(x.maximal_simplices().contains(current))
            } else {
                longer.iter().map(|f| extend(faces, f, x)).sum()
            }
        }
        for f in &faces {
            if f.rank() == 1 {
                chains += extend(&faces, f, &x);
            }
        }
        let bsd = barycentric_subdivision(&x, cap).unwrap();
        assert_eq!(bsd.complex.maximal_simplices().len(), chains);
        assert_eq!(chains, 48);
    }

    #[test]
    fn graph_distance_examples() {
        let cap = FaceCap::default();
        let tri = fixtures::triangle_boundary();
        let bsd = barycentric_subdivision(&tri, cap).unwrap();
        let g = skeleton_graph(&bsd.complex);
        // Hexagon: antipodal pairs at distance 3.
        let a = g.index_of("{a}").unwrap();
        let bc = g.index_of("{b,c}").unwrap();
        assert_eq!(g.distance(a, bc), Some(3));
        assert_eq!(g.distance(a, a), Some(0));

        let two = Complex::build(&[vec!["a", "b"], vec!["c", "d"]], false).unwrap();
        let bsd = barycentric_subdivision(&two, cap).unwrap();
        let g = skeleton_graph(&bsd.complex);
        let u = g.index_of("{a}").unwrap();
        let v = g.index_of("{c,d}").unwrap();
        assert_eq!(g.distance(u, v), None);
    }

    #[test]
    fn graph_distance_matches_floyd_warshall() {
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(31);
        for _ in 0..8 {
            let x = fixtures::random_flag_complex(9, 0.4, &mut rng);
            let g = skeleton_graph(&x);
            let n = g.vertex_count();
            let inf = usize::MAX / 2;
            let mut d = vec![vec![inf; n]; n];
            for i in 0..n {
                d[i][i] = 0;
            }
            for (u, v) in x.edges() {
                d[u.index()][v.index()] = 1;
                d[v.index()][u.index()] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let expected = if d[i][j] >= inf { None } else { Some(d[i][j]) };
                    assert_eq!(g.distance(i as u32, j as u32), expected);
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let cap = FaceCap::default();
        for x in [
            fixtures::triangle_boundary(),
            fixtures::octahedron(),
            fixtures::single_simplex(3),
            fixtures::path_complex(),
            fixtures::spoke_counterexample(),
            fixtures::projective_plane(),
        ] {
            let report = phi_check(&x, cap).unwrap();
            assert!(report.all_hold(), "{:?}", report.counterexamples);
        }
    }

    #[test]
    fn octahedron_barycentre_distances() {
        // Triangles sharing a vertex sit at bsd distance exactly two.
        let cap = FaceCap::default();
        let x = fixtures::octahedron();
        let (g, index) = bsd_skeleton_graph(&x, cap).unwrap();
        let maximal = x.maximal_simplices();
        for i in 0..maximal.len() {
            for j in i + 1..maximal.len() {
                let d = g.distance(index[&maximal[i]], index[&maximal[j]]);
                if maximal[i].intersect(&maximal[j]).is_empty() {
                    assert_eq!(d, Some(4));
                } else {
                    assert_eq!(d, Some(2));
                }
            }
        }
    }

    #[test]
    fn qi_examples() {
        let cap = FaceCap::default();
        let tri = fixtures::triangle_boundary();
        let r = qi_constants(&tri, &PairSelection::All, cap).unwrap();
        assert_eq!(r.lambda, BigRational::from(BigInt::from(2)));
        assert!(r.mu.is_zero());

        let single = fixtures::single_simplex(4);
        let r = qi_constants(&single, &PairSelection::All, cap).unwrap();
        assert_eq!(r.lambda, BigRational::one());
        assert!(r.mu.is_zero());

        let oct = fixtures::octahedron();
        let r = qi_constants(&oct, &PairSelection::All, cap).unwrap();
        assert_eq!(r.lambda, BigRational::from(BigInt::from(2)));
        assert!(r.mu.is_zero());
        assert_eq!(r.sampled_pairs, 28);
    }

    #[test]
    fn triangle_exact_doubling() {
        // On the triangle boundary the subdivision distance is exactly twice
        // the nerve distance for every pair.
        let cap = FaceCap::default();
        let tri = fixtures::triangle_boundary();
        let n = nerve::nerve_of_maximal(&tri, cap).unwrap();
        let ng = skeleton_graph(&n.nerve);
        let (bg, index) = bsd_skeleton_graph(&tri, cap).unwrap();
        for u in 0..3u32 {
            for v in 0..3u32 {
                let dn = ng.distance(u, v).unwrap();
                let db = bg
                    .distance(
                        index[n.base_of(crate::complex::VertexId(u))],
                        index[n.base_of(crate::complex::VertexId(v))],
                    )
                    .unwrap();
                assert_eq!(db, 2 * dn);
            }
        }
    }

    #[test]
    fn bsd_connectivity_tracks_base() {
        let cap = FaceCap::default();
        let connected = fixtures::octahedron();
        let bsd = barycentric_subdivision(&connected, cap).unwrap();
        assert!(skeleton_graph(&bsd.complex).is_connected());

        let split = Complex::build(&[vec!["a", "b"], vec!["c", "d"]], false).unwrap();
        let bsd = barycentric_subdivision(&split, cap).unwrap();
        assert!(!skeleton_graph(&bsd.complex).is_connected());
    }
}
