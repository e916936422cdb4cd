//! Certified curve catalogs, curve-complex patches, the pants census over
//! trivalent multigraphs, and the vertex-level coset embedding of a patch.
//!
//! Geometric intersection numbers are catalog data, never computed from
//! topology: the fixture author certifies each entry by drawing the curves
//! and counting minimal-position crossings.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::complex::{Complex, FaceCap, Simplex};
use crate::error::{Error, Result};
use crate::nerve::{self, ConditionReport};

/// Finite set of curve labels with a symmetric geometric-intersection
/// matrix over a genus-g surface, g at least 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveCatalog {
    genus: u32,
    curves: Vec<String>,
    inter: Vec<Vec<u64>>,
}

impl CurveCatalog {
    pub fn new(genus: u32, curves: Vec<String>, inter: Vec<Vec<u64>>) -> Result<CurveCatalog> {
        if genus < 2 {
            return Err(Error::GenusTooSmall(genus));
        }
        let n = curves.len();
        if n == 0 {
            return Err(Error::Malformed("catalog has no curves".into()));
        }
        let unique: BTreeSet<&String> = curves.iter().collect();
        if unique.len() != n {
            return Err(Error::Malformed("curve labels must be unique".into()));
        }
        if inter.len() != n || inter.iter().any(|row| row.len() != n) {
            return Err(Error::Malformed(
                "intersection matrix shape does not match the curve count".into(),
            ));
        }
        for i in 0..n {
            if inter[i][i] != 0 {
                return Err(Error::NonzeroDiagonal(curves[i].clone()));
            }
            for j in i + 1..n {
                if inter[i][j] != inter[j][i] {
                    return Err(Error::AsymmetricMatrix {
                        a: curves[i].clone(),
                        b: curves[j].clone(),
                    });
                }
            }
        }
        Ok(CurveCatalog {
            genus,
            curves,
            inter,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn curves(&self) -> &[String] {
        &self.curves
    }

    /// Rank of a pants decomposition on this surface: 3g - 3.
    pub fn pants_rank(&self) -> usize {
        (3 * self.genus - 3) as usize
    }

    pub fn curve_index(&self, label: &str) -> Option<usize> {
        self.curves.iter().position(|c| c == label)
    }

    pub fn intersection(&self, a: usize, b: usize) -> u64 {
        self.inter[a][b]
    }

    pub fn intersection_by_label(&self, a: &str, b: &str) -> Result<u64> {
        let ia = self
            .curve_index(a)
            .ok_or_else(|| Error::UnknownVertex { label: a.into() })?;
        let ib = self
            .curve_index(b)
            .ok_or_else(|| Error::UnknownVertex { label: b.into() })?;
        Ok(self.inter[ia][ib])
    }

    pub fn to_json_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("genus".into(), json!(self.genus));
        map.insert("curves".into(), json!(self.curves));
        map.insert("intersection".into(), json!(self.inter));
        Value::Object(map)
    }

    pub fn from_json_value(value: &Value) -> Result<CurveCatalog> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Malformed("catalog file must be a JSON object".into()))?;
        let genus = obj
            .get("genus")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Malformed("missing natural field `genus`".into()))?;
        let curves: Vec<String> = obj
            .get("curves")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing array field `curves`".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Malformed("curve labels must be strings".into()))
            })
            .collect::<Result<_>>()?;
        let inter: Vec<Vec<u64>> = obj
            .get("intersection")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Malformed("missing array field `intersection`".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Malformed("intersection rows must be arrays".into()))?
                    .iter()
                    .map(|e| {
                        e.as_u64().ok_or_else(|| {
                            Error::Malformed("intersection entries must be naturals".into())
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        CurveCatalog::new(genus as u32, curves, inter)
    }

    pub fn from_json_str(text: &str) -> Result<CurveCatalog> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))?;
        CurveCatalog::from_json_value(&value)
    }
}

/// Flag patch of the curve complex seen by a catalog, with the saturation
/// verdict: saturated means every maximal clique is a full pants
/// decomposition of rank 3g - 3.
pub struct PatchReport {
    pub patch: Complex,
    pub saturated: bool,
    pub expected_rank: usize,
    pub warnings: Vec<String>,
}

pub fn curve_patch(cat: &CurveCatalog) -> Result<PatchReport> {
    let n = cat.curves.len();
    let mut gens: Vec<Vec<String>> = cat.curves.iter().map(|c| vec![c.clone()]).collect();
    for i in 0..n {
        for j in i + 1..n {
            if cat.inter[i][j] == 0 {
                gens.push(vec![cat.curves[i].clone(), cat.curves[j].clone()]);
            }
        }
    }
    let patch = Complex::build(&gens, true)?;
    let expected_rank = cat.pants_rank();
    let saturated = patch
        .maximal_simplices()
        .iter()
        .all(|m| m.rank() == expected_rank);
    let mut warnings = Vec::new();
    if !saturated {
        warnings.push(format!(
            "patch is unsaturated: some maximal cliques have rank below {expected_rank}; \
             patch-level condition failures do not refute statements about the full complex"
        ));
    }
    Ok(PatchReport {
        patch,
        saturated,
        expected_rank,
        warnings,
    })
}

/// Witness search for elementary moves: for a simplex C and a pivot t in C,
/// a witness is a catalog curve meeting t but disjoint from the rest of C.
/// Witnesses can only be found, never manufactured, so a missing one is a
/// coverage warning rather than a failure.
pub struct MoveAuditEntry {
    pub simplex: Vec<String>,
    pub pivot: String,
    pub witness: Option<String>,
}

pub struct MoveAuditReport {
    pub entries: Vec<MoveAuditEntry>,
    pub missing: usize,
}

pub fn elementary_move_audit(cat: &CurveCatalog, cap: FaceCap) -> Result<MoveAuditReport> {
    let patch = curve_patch(cat)?.patch;
    let faces = patch.all_faces(cap)?;
    let mut entries = Vec::new();
    let mut missing = 0;
    for face in &faces {
        let labels: Vec<String> = face
            .vertices()
            .iter()
            .map(|v| patch.label(*v).to_string())
            .collect();
        for pivot in &labels {
            let witness = cat
                .curves
                .iter()
                .find(|b| {
                    let meets_pivot = cat.intersection_by_label(b, pivot).unwrap() > 0;
                    let misses_rest = labels
                        .iter()
                        .filter(|a| a != &pivot)
                        .all(|a| cat.intersection_by_label(b, a).unwrap() == 0);
                    meets_pivot && misses_rest
                })
                .cloned();
            if witness.is_none() {
                missing += 1;
            }
            entries.push(MoveAuditEntry {
                simplex: labels.clone(),
                pivot: pivot.clone(),
                witness,
            });
        }
    }
    Ok(MoveAuditReport { entries, missing })
}

/// Condition check on the patch, prefixed with the saturation caveat.
pub struct PatchConditionReport {
    pub saturated: bool,
    pub warnings: Vec<String>,
    pub conditions: ConditionReport,
}

pub fn condition_audit_on_patch(cat: &CurveCatalog, cap: FaceCap) -> Result<PatchConditionReport> {
    let report = curve_patch(cat)?;
    let conditions = nerve::check_conditions(&report.patch, cap);
    Ok(PatchConditionReport {
        saturated: report.saturated,
        warnings: report.warnings,
        conditions,
    })
}

/// Connected trivalent multigraph with loops; vertices are pairs of pants,
/// edges are decomposition curves. Loops count twice towards the degree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PantsGraph {
    vertices: usize,
    /// multiplicity per unordered vertex pair (u <= v); loops at (v, v)
    edges: BTreeMap<(usize, usize), u32>,
}

impl PantsGraph {
    pub fn new(vertices: usize, edges: BTreeMap<(usize, usize), u32>) -> Result<PantsGraph> {
        let g = PantsGraph { vertices, edges };
        for v in 0..vertices {
            if g.degree(v) != 3 {
                return Err(Error::Malformed(format!(
                    "vertex {v} has degree {} in a pants graph",
                    g.degree(v)
                )));
            }
        }
        if !g.is_connected() {
            return Err(Error::Malformed("pants graph must be connected".into()));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.values().sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn degree(&self, v: usize) -> u32 {
        (0..self.vertices)
            .map(|u| {
                if u == v {
                    2 * self.multiplicity(v, v)
                } else {
                    self.multiplicity(u, v)
                }
            })
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for u in 0..self.vertices {
                if !seen[u] && self.multiplicity(u, v) > 0 {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Flattened multiplicity matrix, minimised over all vertex
    /// permutations.
    pub fn canonical_form(&self) -> Vec<u32> {
        let n = self.vertices;
        let mut best: Option<Vec<u32>> = None;
        for perm in permutations(n) {
            let mut flat = Vec::with_capacity(n * (n + 1) / 2);
            for u in 0..n {
                for v in u..n {
                    flat.push(self.multiplicity(perm[u], perm[v]));
                }
            }
            best = Some(match best {
                None => flat,
                Some(b) if flat < b => flat,
                Some(b) => b,
            });
        }
        best.expect("pants graphs are non-empty")
    }

    /// Order of the multigraph automorphism group: vertex permutations
    /// preserving multiplicities, times the interchanges of parallel edges.
    pub fn aut_order(&self) -> u64 {
        let n = self.vertices;
        let vertex_auts = permutations(n)
            .into_iter()
            .filter(|perm| {
                (0..n).all(|u| {
                    (u..n).all(|v| self.multiplicity(u, v) == self.multiplicity(perm[u], perm[v]))
                })
            })
            .count() as u64;
        let edge_factor: u64 = self
            .edges
            .values()
            .map(|&m| (1..=m as u64).product::<u64>())
            .product();
        vertex_auts * edge_factor
    }

    pub fn to_json_value(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .filter(|(_, &m)| m > 0)
            .map(|(&(u, v), &m)| json!({ "ends": [u, v], "multiplicity": m }))
            .collect();
        json!({ "vertices": self.vertices, "edges": edges })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// All connected trivalent multigraphs with loops on 2g - 2 vertices, up to
/// isomorphism, by exhaustive generation with canonical-form deduplication.
/// The count models the number of stabiliser orbit classes.
pub fn pants_census(genus: u32) -> Result<Vec<PantsGraph>> {
    if !(2..=4).contains(&genus) {
        return Err(Error::GenusOutOfRange(genus));
    }
    let n = (2 * genus - 2) as usize;
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u..n).map(move |v| (u, v)))
        .collect();
    let mut found: BTreeMap<Vec<u32>, PantsGraph> = BTreeMap::new();
    let mut degrees = vec![0u32; n];
    let mut edges: BTreeMap<(usize, usize), u32> = BTreeMap::new();

    fn assign(
        slot: usize,
        slots: &[(usize, usize)],
        degrees: &mut Vec<u32>,
        edges: &mut BTreeMap<(usize, usize), u32>,
        n: usize,
        found: &mut BTreeMap<Vec<u32>, PantsGraph>,
    ) {
        if slot == slots.len() {
            if degrees.iter().all(|&d| d == 3) {
                let g = PantsGraph {
                    vertices: n,
                    edges: edges.clone(),
                };
                if g.is_connected() {
                    found.entry(g.canonical_form()).or_insert(g);
                }
            }
            return;
        }
        let (u, v) = slots[slot];
        let weight = if u == v { 2 } else { 1 };
        let room = (3 - degrees[u]).min(3 - degrees[v]) / weight;
        for m in 0..=room {
            if m > 0 {
                edges.insert((u, v), m);
                degrees[u] += weight * m;
                if u != v {
                    degrees[v] += m;
                }
            }
            assign(slot + 1, slots, degrees, edges, n, found);
            if m > 0 {
                edges.remove(&(u, v));
                degrees[u] -= weight * m;
                if u != v {
                    degrees[v] -= m;
                }
            }
        }
    }

    assign(0, &slots, &mut degrees, &mut edges, n, &mut found);
    Ok(found.into_values().collect())
}

/// Verdict for one curve pair under the sufficient target predicate of the
/// coset embedding.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PairVerdict {
    /// Already disjoint: a patch edge, hence a target edge.
    PatchEdge,
    /// Meets positively but a common disjoint curve gives a target edge
    /// anyway; this is the non-isomorphism phenomenon.
    ExtraTargetEdge { witness: String },
    /// Meets positively with no catalog witness; the sufficient predicate
    /// stays silent.
    Undetermined,
}

pub struct Embed6Report {
    /// Every simplex of the patch enumerated and checked to be a target
    /// simplex via pairwise disjointness.
    pub patch_simplices_checked: usize,
    pub pairs: Vec<(String, String, PairVerdict)>,
}

impl Embed6Report {
    pub fn extra_target_edges(&self) -> Vec<(&str, &str, &str)> {
        self.pairs
            .iter()
            .filter_map(|(a, b, v)| match v {
                PairVerdict::ExtraTargetEdge { witness } => {
                    Some((a.as_str(), b.as_str(), witness.as_str()))
                }
                _ => None,
            })
            .collect()
    }

    pub fn undetermined_pairs(&self) -> Vec<(&str, &str)> {
        self.pairs
            .iter()
            .filter_map(|(a, b, v)| match v {
                PairVerdict::Undetermined => Some((a.as_str(), b.as_str())),
                _ => None,
            })
            .collect()
    }
}

/// Vertex-level embedding of the patch into the twist-commensurator coset
/// complex. Curves map to themselves; the target simplex predicate is the
/// sufficient condition from the construction: a curve set is a target
/// simplex when it is pairwise disjoint, or when some catalog curve is
/// disjoint from all of it. The report lists every target edge absent from
/// the patch, witnessing that the embedding is not an isomorphism.
pub fn section6_embedding(cat: &CurveCatalog, cap: FaceCap) -> Result<Embed6Report> {
    let patch = curve_patch(cat)?.patch;
    let faces = patch.all_faces(cap)?;
    for face in &faces {
        let labels: Vec<&str> = face.vertices().iter().map(|v| patch.label(*v)).collect();
        for (i, a) in labels.iter().enumerate() {
            for b in labels.iter().skip(i + 1) {
                if cat.intersection_by_label(a, b)? != 0 {
                    return Err(Error::Internal(format!(
                        "patch simplex {} is not pairwise disjoint",
                        patch.render_simplex(face)
                    )));
                }
            }
        }
    }

    let n = cat.curves.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = &cat.curves[i];
            let b = &cat.curves[j];
            let verdict = if cat.inter[i][j] == 0 {
                PairVerdict::PatchEdge
            } else {
                let witness = cat
                    .curves
                    .iter()
                    .find(|z| {
                        cat.intersection_by_label(z, a).unwrap() == 0
                            && cat.intersection_by_label(z, b).unwrap() == 0
                    })
                    .cloned();
                match witness {
                    Some(witness) => PairVerdict::ExtraTargetEdge { witness },
                    None => PairVerdict::Undetermined,
                }
            };
            pairs.push((a.clone(), b.clone(), verdict));
        }
    }
    Ok(Embed6Report {
        patch_simplices_checked: faces.len(),
        pairs,
    })
}
