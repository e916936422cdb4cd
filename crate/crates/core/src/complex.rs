//! Finite abstract simplicial complexes stored by their maximal simplices.
//!
//! A complex is built once from a generator family and is immutable after
//! that. Faces are never stored; they are enumerated on demand under a
//! configurable cap. All outputs are canonically ordered: vertex labels
//! sorted lexicographically, simplices sorted as their sorted id lists.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Dense vertex index inside one complex. Ids are assigned in sorted label
/// order, so equal label sets always receive equal ids.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A non-empty, strictly sorted vertex set.
///
/// `rank` is the cardinality; the topological dimension is `rank - 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Simplex {
    verts: Vec<VertexId>,
}

impl Simplex {
    /// Sorts the vertices; rejects empty input and duplicates.
    pub fn new(mut verts: Vec<VertexId>) -> Option<Simplex> {
        if verts.is_empty() {
            return None;
        }
        verts.sort_unstable();
        if verts.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex { verts })
    }

    /// The input must already be strictly sorted.
    pub fn from_sorted(verts: Vec<VertexId>) -> Simplex {
        debug_assert!(!verts.is_empty());
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        Simplex { verts }
    }

    pub fn rank(&self) -> usize {
        self.verts.len()
    }

    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.verts
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.verts.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.verts.len() > other.verts.len() {
            return false;
        }
        let mut it = other.verts.iter();
        self.verts
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }

    /// Sorted intersection of two simplices; may be empty.
    pub fn intersect(&self, other: &Simplex) -> Vec<VertexId> {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.verts.len() && j < other.verts.len() {
            match self.verts[i].cmp(&other.verts[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.verts[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

/// Guard for operations that enumerate faces. Default is one million.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceCap(pub usize);

impl Default for FaceCap {
    fn default() -> Self {
        FaceCap(1_000_000)
    }
}

/// A finite abstract simplicial complex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex {
    labels: Vec<String>,
    generators: Vec<Simplex>,
    maximal: Vec<Simplex>,
    flag: bool,
}

impl Complex {
    /// Builds a complex from generator simplices given as label lists.
    ///
    /// With `flag_mode` the maximal simplices are the maximal cliques of
    /// the union graph of the generators; otherwise the generators are
    /// absorbed into an inclusion-maximal antichain.
    pub fn build<S: AsRef<str>>(generators: &[Vec<S>], flag_mode: bool) -> Result<Complex> {
        if generators.is_empty() {
            return Err(Error::EmptyGeneratorList);
        }
        let mut label_set = BTreeSet::new();
        for (index, g) in generators.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::EmptySimplex { index });
            }
            let mut seen = BTreeSet::new();
            for l in g {
                if !seen.insert(l.as_ref()) {
                    return Err(Error::DuplicateVertexInGenerator {
                        label: l.as_ref().to_string(),
                    });
                }
                label_set.insert(l.as_ref().to_string());
            }
        }
        let labels: Vec<String> = label_set.into_iter().collect();
        let index_of: BTreeMap<&str, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let ids: Vec<VertexId> = g
                .iter()
                .map(|l| VertexId(index_of[l.as_ref()]))
                .collect();
            gens.push(Simplex::new(ids).expect("validated above"));
        }
        gens.sort();
        gens.dedup();

        let maximal = if flag_mode {
            maximal_cliques(labels.len(), &gens)
        } else {
            absorb(&gens)
        };
        let complex = Complex {
            labels,
            generators: gens,
            maximal,
            flag: flag_mode,
        };
        complex.assert_antichain()?;
        Ok(complex)
    }

    /// Rebuilds a complex directly from simplices of `self` (no label pass).
    pub fn from_simplices(&self, simplices: &[Simplex], flag: bool) -> Result<Complex> {
        let gens: Vec<Vec<&str>> = simplices
            .iter()
            .map(|s| s.vertices().iter().map(|v| self.label(*v)).collect())
            .collect();
        Complex::build(&gens, flag)
    }

    fn assert_antichain(&self) -> Result<()> {
        for (i, a) in self.maximal.iter().enumerate() {
            for (j, b) in self.maximal.iter().enumerate() {
                if i != j && a.is_face_of(b) {
                    return Err(Error::Internal(format!(
                        "maximal simplices are not an antichain: {} inside {}",
                        self.render_simplex(a),
                        self.render_simplex(b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        self.labels.as_slice()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| VertexId(i as u32))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len() as u32).map(VertexId)
    }

    pub fn is_flag(&self) -> bool {
        self.flag
    }

    pub fn generators(&self) -> &[Simplex] {
        &self.generators
    }

    /// The canonical antichain of maximal simplices, sorted.
    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    /// Indices into `maximal_simplices` of the maximal simplices containing `v`.
    pub fn maximal_containing(&self, v: VertexId) -> Vec<usize> {
        self.maximal
            .iter()
            .enumerate()
            .filter(|(_, m)| m.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// True iff `s` is a face of some maximal simplex.
    pub fn is_simplex(&self, s: &Simplex) -> bool {
        self.maximal.iter().any(|m| s.is_face_of(m))
    }

    /// Resolves labels to a simplex of this complex's vertex set.
    pub fn simplex_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Simplex> {
        let mut ids = Vec::with_capacity(labels.len());
        for l in labels {
            let v = self.vertex(l.as_ref()).ok_or_else(|| Error::UnknownVertex {
                label: l.as_ref().to_string(),
            })?;
            ids.push(v);
        }
        Simplex::new(ids).ok_or_else(|| Error::Malformed("empty or duplicated simplex".into()))
    }

    /// Label-level membership test; errors on unknown labels.
    pub fn is_simplex_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<bool> {
        let s = self.simplex_from_labels(labels)?;
        Ok(self.is_simplex(&s))
    }

    /// All faces with rank at most `r`, each exactly once, in canonical order.
    pub fn skeleton(&self, r: usize, cap: FaceCap) -> Result<Vec<Simplex>> {
        if r < 1 {
            return Err(Error::InvalidRank);
        }
        self.faces_up_to(Some(r), cap)
    }

    /// Every face of the complex, in canonical order.
    pub fn all_faces(&self, cap: FaceCap) -> Result<Vec<Simplex>> {
        self.faces_up_to(None, cap)
    }

    fn faces_up_to(&self, r: Option<usize>, cap: FaceCap) -> Result<Vec<Simplex>> {
        let mut out: BTreeSet<Simplex> = BTreeSet::new();
        for m in &self.maximal {
            let verts = m.vertices();
            let top = r.map_or(verts.len(), |r| r.min(verts.len()));
            let mut stack: Vec<(usize, Vec<VertexId>)> = vec![(0, Vec::new())];
            while let Some((start, prefix)) = stack.pop() {
                for i in start..verts.len() {
                    let mut next = prefix.clone();
                    next.push(verts[i]);
                    if out.insert(Simplex::from_sorted(next.clone())) && out.len() > cap.0 {
                        return Err(Error::FaceCapExceeded { cap: cap.0 });
                    }
                    if next.len() < top {
                        stack.push((i + 1, next));
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Edges of the 1-skeleton as sorted id pairs.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = BTreeSet::new();
        for m in &self.maximal {
            let vs = m.vertices();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    out.insert((vs[i], vs[j]));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Adjacency matrix of the 1-skeleton.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in self.edges() {
            adj[u.index()][v.index()] = true;
            adj[v.index()][u.index()] = true;
        }
        adj
    }

    /// Renders a simplex as `{a,b,c}` over its sorted labels.
    pub fn render_simplex(&self, s: &Simplex) -> String {
        let mut out = String::from("{");
        for (i, v) in s.vertices().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(self.label(*v));
        }
        out.push('}');
        out
    }

    /// Applies a bijective relabeling and rebuilds the canonical form.
    pub fn relabel(&self, mapping: &BTreeMap<String, String>) -> Result<Complex> {
        let mut gens: Vec<Vec<String>> = Vec::new();
        for m in &self.maximal {
            let mut g = Vec::new();
            for v in m.vertices() {
                let old = self.label(*v);
                let new = mapping.get(old).ok_or_else(|| Error::UnknownVertex {
                    label: old.to_string(),
                })?;
                g.push(new.clone());
            }
            gens.push(g);
        }
        let images: BTreeSet<&String> = mapping.values().collect();
        if images.len() != mapping.len() {
            return Err(Error::Malformed("relabeling is not injective".into()));
        }
        Complex::build(&gens, self.flag)
    }

    /// Serializes to the on-disk form:
    /// `{"flag": bool, "maximal_simplices": [["a","b"], ...]}`.
    pub fn to_json_value(&self) -> Value {
        let mut sims: Vec<Vec<String>> = self
            .maximal
            .iter()
            .map(|m| {
                m.vertices()
                    .iter()
                    .map(|v| self.label(*v).to_string())
                    .collect()
            })
            .collect();
        sims.sort();
        let mut map = Map::new();
        map.insert("flag".into(), Value::Bool(self.flag));
        map.insert(
            "maximal_simplices".into(),
            Value::Array(
                sims.into_iter()
                    .map(|s| Value::Array(s.into_iter().map(Value::String).collect()))
                    .collect(),
            ),
        );
        Value::Object(map)
    }

    pub fn from_json_value(value: &Value) -> Result<Complex> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("complex file must be a JSON object".into()))?;
        let flag = obj
            .get("flag")
            .and_then(Value::as_bool)
            .ok_or_else(|| Error::Malformed("missing boolean field `flag`".into()))?;
        let sims = obj
            .get("maximal_simplices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing array field `maximal_simplices`".into()))?;
        let mut gens: Vec<Vec<String>> = Vec::with_capacity(sims.len());
        for s in sims {
            let arr = s
                .as_array()
                .ok_or_else(|| Error::Malformed("simplex entries must be arrays".into()))?;
            let mut g = Vec::with_capacity(arr.len());
            for l in arr {
                g.push(
                    l.as_str()
                        .ok_or_else(|| Error::Malformed("vertex labels must be strings".into()))?
                        .to_string(),
                );
            }
            gens.push(g);
        }
        Complex::build(&gens, flag)
    }

    pub fn from_json_str(text: &str) -> Result<Complex> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))?;
        Complex::from_json_value(&value)
    }
}

/// Inclusion-maximal members of a sorted, deduplicated simplex family.
fn absorb(gens: &[Simplex]) -> Vec<Simplex> {
    let mut by_size: Vec<&Simplex> = gens.iter().collect();
    by_size.sort_by(|a, b| b.rank().cmp(&a.rank()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Simplex> = Vec::new();
    for g in by_size {
        if !kept.iter().any(|k| g.is_face_of(k)) {
            kept.push(g.clone());
        }
    }
    kept.sort();
    kept
}

/// Maximal cliques of the union graph of the generators, via Bron-Kerbosch
/// with pivoting. Isolated vertices come out as rank-1 cliques.
fn maximal_cliques(n: usize, gens: &[Simplex]) -> Vec<Simplex> {
    let mut adj = vec![vec![false; n]; n];
    for g in gens {
        let vs = g.vertices();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                adj[vs[i].index()][vs[j].index()] = true;
                adj[vs[j].index()][vs[i].index()] = true;
            }
        }
    }
    let mut cliques = Vec::new();
    let mut r = Vec::new();
    let p: BTreeSet<u32> = (0..n as u32).collect();
    let x = BTreeSet::new();
    bron_kerbosch(&adj, &mut r, p, x, &mut cliques);
    let mut out: Vec<Simplex> = cliques
        .into_iter()
        .map(|c| Simplex::new(c.into_iter().map(VertexId).collect()).expect("cliques non-empty"))
        .collect();
    out.sort();
    out
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<u32>,
    p: BTreeSet<u32>,
    x: BTreeSet<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&&u| {
            let row = &adj[u as usize];
            let deg = p.iter().filter(|&&v| row[v as usize]).count();
            (deg, std::cmp::Reverse(u))
        })
        .copied();
    let candidates: Vec<u32> = match pivot {
        Some(u) => p
            .iter()
            .filter(|&&v| !adj[u as usize][v as usize])
            .copied()
            .collect(),
        None => p.iter().copied().collect(),
    };
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let row = &adj[v as usize];
        let np: BTreeSet<u32> = p.iter().filter(|&&w| row[w as usize]).copied().collect();
        let nx: BTreeSet<u32> = x.iter().filter(|&&w| row[w as usize]).copied().collect();
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(ls: &[&str]) -> Vec<Vec<String>> {
        ls.iter()
            .map(|s| s.chars().map(|c| c.to_string()).collect())
            .collect()
    }

    /// Brute-force clique enumeration over all vertex subsets.
    fn brute_cliques(x: &Complex) -> Vec<Simplex> {
        let n = x.vertex_count();
        let adj = x.adjacency();
        let mut cliques: Vec<Vec<u32>> = Vec::new();
        for mask in 1u32..(1 << n) {
            let verts: Vec<u32> = (0..n as u32).filter(|v| mask & (1 << v) != 0).collect();
            let is_clique = verts.iter().enumerate().all(|(i, &u)| {
                verts[i + 1..].iter().all(|&v| adj[u as usize][v as usize])
            });
            if is_clique {
                cliques.push(verts);
            }
        }
        let maximal: Vec<Vec<u32>> = cliques
            .iter()
            .filter(|c| {
                !cliques
                    .iter()
                    .any(|d| d.len() > c.len() && c.iter().all(|v| d.contains(v)))
            })
            .cloned()
            .collect();
        let mut out: Vec<Simplex> = maximal
            .into_iter()
            .map(|c| Simplex::new(c.into_iter().map(VertexId).collect()).unwrap())
            .collect();
        out.sort();
        out
    }

    /// Brute-force face enumeration over subsets of maximal simplices.
    fn brute_faces(x: &Complex, r: usize) -> BTreeSet<Simplex> {
        let mut out = BTreeSet::new();
        for m in x.maximal_simplices() {
            let vs = m.vertices();
            for mask in 1u32..(1 << vs.len()) {
                let sub: Vec<VertexId> = (0..vs.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| vs[i])
                    .collect();
                if sub.len() <= r {
                    out.insert(Simplex::from_sorted(sub));
                }
            }
        }
        out
    }

    #[test]
    fn build_antichain_kept() {
        let x = Complex::build(&labels(&["ab", "bc", "ca"]), false).unwrap();
        assert_eq!(x.maximal_simplices().len(), 3);
        assert_eq!(x.vertex_count(), 3);
    }

    #[test]
    fn build_absorbs_faces() {
        let x = Complex::build(&labels(&["ab", "abc"]), false).unwrap();
        assert_eq!(x.maximal_simplices().len(), 1);
        assert_eq!(x.maximal_simplices()[0].rank(), 3);
    }

    #[test]
    fn build_octahedron_flag_cliques() {
        let x = crate::fixtures::octahedron();
        assert_eq!(x.maximal_simplices().len(), 8);
        assert!(x.maximal_simplices().iter().all(|m| m.rank() == 3));
        assert_eq!(x.maximal_simplices(), brute_cliques(&x).as_slice());
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Complex::build::<&str>(&[], false).unwrap_err(),
            Error::EmptyGeneratorList
        );
        assert_eq!(
            Complex::build(&[Vec::<&str>::new()], false).unwrap_err(),
            Error::EmptySimplex { index: 0 }
        );
        assert!(matches!(
            Complex::build(&[vec!["a", "a"]], false).unwrap_err(),
            Error::DuplicateVertexInGenerator { .. }
        ));
    }

    #[test]
    fn is_simplex_examples() {
        let tri = crate::fixtures::triangle_boundary();
        assert!(tri.is_simplex_labels(&["a", "b"]).unwrap());
        assert!(!tri.is_simplex_labels(&["a", "b", "c"]).unwrap());
        assert!(matches!(
            tri.is_simplex_labels(&["a", "z"]).unwrap_err(),
            Error::UnknownVertex { .. }
        ));

        let oct = crate::fixtures::octahedron();
        for (u, v) in crate::fixtures::OCTAHEDRON_ANTIPODES {
            assert!(!oct.is_simplex_labels(&[u, v]).unwrap());
        }
    }

    #[test]
    fn skeleton_counts() {
        let x = Complex::build(&labels(&["abc"]), false).unwrap();
        assert_eq!(x.skeleton(1, FaceCap::default()).unwrap().len(), 3);
        assert_eq!(x.skeleton(2, FaceCap::default()).unwrap().len(), 6);
        assert!(x.skeleton(0, FaceCap::default()).is_err());

        let oct = crate::fixtures::octahedron();
        let sk = oct.skeleton(3, FaceCap::default()).unwrap();
        assert_eq!(sk.len(), 26);
        let brute = brute_faces(&oct, 3);
        assert_eq!(sk.into_iter().collect::<BTreeSet<_>>(), brute);
    }

    #[test]
    fn skeleton_cap_refuses() {
        let oct = crate::fixtures::octahedron();
        assert!(matches!(
            oct.skeleton(3, FaceCap(10)),
            Err(Error::FaceCapExceeded { cap: 10 })
        ));
    }

    #[test]
    fn maximal_simplices_examples() {
        let path = crate::fixtures::path_complex();
        assert_eq!(path.maximal_simplices().len(), 2);

        let cone = Complex::build(&labels(&["ab", "ac", "ad"]), false).unwrap();
        assert_eq!(cone.maximal_simplices().len(), 3);

        // Genus-2 chain disjointness graph; the oracle fixes the clique list.
        let cat = crate::fixtures::chain_catalog();
        let patch = crate::surface::curve_patch(&cat).unwrap().patch;
        let got: Vec<String> = patch
            .maximal_simplices()
            .iter()
            .map(|m| patch.render_simplex(m))
            .collect();
        assert_eq!(patch.maximal_simplices(), brute_cliques(&patch).as_slice());
        assert_eq!(
            got,
            vec!["{c1,c3,c5}", "{c1,c4}", "{c2,c4}", "{c2,c5}"]
        );
    }

    #[test]
    fn absorption_idempotent() {
        for x in [
            crate::fixtures::triangle_boundary(),
            crate::fixtures::octahedron(),
            crate::fixtures::spoke_counterexample(),
        ] {
            let rebuilt = x.from_simplices(x.maximal_simplices(), false).unwrap();
            assert_eq!(rebuilt.maximal_simplices(), x.maximal_simplices());
            assert_eq!(rebuilt.labels(), x.labels());
        }
    }

    #[test]
    fn downward_closure() {
        let x = crate::fixtures::octahedron();
        for f in x.all_faces(FaceCap::default()).unwrap() {
            let vs = f.vertices();
            for mask in 1u32..(1 << vs.len()) {
                let sub: Vec<VertexId> = (0..vs.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| vs[i])
                    .collect();
                assert!(x.is_simplex(&Simplex::from_sorted(sub)));
            }
        }
    }

    #[test]
    fn flag_consistency() {
        let x = crate::fixtures::octahedron();
        let adj = x.adjacency();
        for m in x.maximal_simplices() {
            let vs = m.vertices();
            for mask in 1u32..(1 << vs.len()) {
                let sub: Vec<VertexId> = (0..vs.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| vs[i])
                    .collect();
                let pairwise = sub.iter().enumerate().all(|(i, &u)| {
                    sub[i + 1..]
                        .iter()
                        .all(|&v| adj[u.index()][v.index()])
                });
                assert!(pairwise);
                assert!(x.is_simplex(&Simplex::from_sorted(sub)));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let x = crate::fixtures::octahedron();
        let v = x.to_json_value();
        let y = Complex::from_json_value(&v).unwrap();
        assert_eq!(x, y);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(text, serde_json::to_string(&y.to_json_value()).unwrap());
    }
}
