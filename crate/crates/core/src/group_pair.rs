//! Coset intersection complexes over pluggable computable backends.
//!
//! A backend models a group pair (G, A): it enumerates coset vertices,
//! decides coset equality, and decides whether the intersection of the
//! conjugates behind a vertex set is infinite. Shipped backends:
//!
//! * `abelian` - G = Z^m with lattice subgroups; conjugation is trivial and
//!   "infinite" means the intersection lattice has rank at least one.
//! * `multitwist` - cosets are curve-set images of the pants decompositions
//!   of a catalog patch; "infinite" means non-empty support intersection,
//!   backed by the uniqueness of supported twist decompositions.
//! * `nerve` - cosets are the maximal simplices of a finite reference
//!   complex with their stabiliser orbit class; "infinite" means a common
//!   base vertex exists.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::aut;
use crate::complex::{Complex, FaceCap, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::lattice::LatticeSubgroup;
use crate::matrix::Mat;
use crate::surface::{curve_patch, CurveCatalog};
use crate::{Int, IntMatrix};

/// Commensuration metadata a backend reports about its group pair.
#[derive(Clone, Debug)]
pub struct PairAnnotations {
    pub reduced: bool,
    pub reducible: bool,
    pub note: String,
}

impl PairAnnotations {
    pub fn to_json_value(&self) -> Value {
        json!({
            "reduced": self.reduced,
            "reducible": self.reducible,
            "note": self.note,
        })
    }
}

/// One coset vertex, in backend-specific shape.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CosetVertex {
    /// Translation coset of a lattice subgroup.
    Lattice { subgroup: usize, rep: Vec<Int> },
    /// Image of a reference maximal simplex, with its orbit class.
    SimplexImage { orbit: usize, simplex: Simplex },
}

/// A computable model of a group pair.
pub trait GroupPairBackend {
    fn name(&self) -> &'static str;
    /// Distinct subgroup (orbit) classes in the pair.
    fn class_count(&self) -> usize;
    fn enumerate_vertices(&self, radius: u32) -> Result<Vec<CosetVertex>>;
    fn same_coset(&self, a: &CosetVertex, b: &CosetVertex) -> Result<bool>;
    /// Canonical representative of the coset of `v`.
    fn canonical(&self, v: &CosetVertex) -> Result<CosetVertex>;
    fn label(&self, v: &CosetVertex) -> Result<String>;
    /// Whether the intersection of the conjugated subgroups behind the
    /// given distinct cosets is infinite.
    fn infinite_intersection(&self, verts: &[CosetVertex]) -> Result<bool>;
    fn annotations(&self) -> PairAnnotations;
}

/// G = Z^m with a finite family of sublattices of rank at least one.
pub struct AbelianBackend {
    ambient: usize,
    subgroups: Vec<LatticeSubgroup>,
}

impl AbelianBackend {
    pub fn new(subgroups: Vec<LatticeSubgroup>) -> Result<AbelianBackend> {
        let Some(first) = subgroups.first() else {
            return Err(Error::Backend("at least one subgroup is required".into()));
        };
        let ambient = first.ambient();
        for s in &subgroups {
            if s.ambient() != ambient {
                return Err(Error::RankMismatch {
                    left: ambient,
                    right: s.ambient(),
                });
            }
            if s.rank() == 0 {
                return Err(Error::Backend(
                    "subgroups must be infinite: lattice rank must be at least 1".into(),
                ));
            }
        }
        Ok(AbelianBackend { ambient, subgroups })
    }

    pub fn subgroups(&self) -> &[LatticeSubgroup] {
        &self.subgroups
    }

    fn expect_lattice<'a>(&self, v: &'a CosetVertex) -> Result<(usize, &'a Vec<Int>)> {
        match v {
            CosetVertex::Lattice { subgroup, rep } if *subgroup < self.subgroups.len() => {
                Ok((*subgroup, rep))
            }
            _ => Err(Error::Backend("vertex does not belong to this backend".into())),
        }
    }
}

impl GroupPairBackend for AbelianBackend {
    fn name(&self) -> &'static str {
        "abelian"
    }

    fn class_count(&self) -> usize {
        self.subgroups.len()
    }

    fn enumerate_vertices(&self, radius: u32) -> Result<Vec<CosetVertex>> {
        let r = radius as i64;
        let mut out = Vec::new();
        for (i, _) in self.subgroups.iter().enumerate() {
            let mut point = vec![-r; self.ambient];
            'grid: loop {
                let rep: Vec<Int> = point.iter().map(|&c| BigInt::from(c)).collect();
                out.push(CosetVertex::Lattice { subgroup: i, rep });
                let mut axis = 0;
                loop {
                    if axis == self.ambient {
                        break 'grid;
                    }
                    point[axis] += 1;
                    if point[axis] > r {
                        point[axis] = -r;
                        axis += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    fn same_coset(&self, a: &CosetVertex, b: &CosetVertex) -> Result<bool> {
        let (ia, ra) = self.expect_lattice(a)?;
        let (ib, rb) = self.expect_lattice(b)?;
        if ia != ib {
            return Ok(false);
        }
        crate::lattice::coset_equal(ra, rb, &self.subgroups[ia])
    }

    fn canonical(&self, v: &CosetVertex) -> Result<CosetVertex> {
        let (i, rep) = self.expect_lattice(v)?;
        Ok(CosetVertex::Lattice {
            subgroup: i,
            rep: self.subgroups[i].reduce(rep)?,
        })
    }

    fn label(&self, v: &CosetVertex) -> Result<String> {
        let (i, rep) = self.expect_lattice(v)?;
        let coords: Vec<String> = rep.iter().map(|c| c.to_string()).collect();
        Ok(format!("A{}+({})", i, coords.join(",")))
    }

    fn infinite_intersection(&self, verts: &[CosetVertex]) -> Result<bool> {
        // Conjugation is trivial, so only the subgroup indices matter.
        let mut indices = BTreeSet::new();
        for v in verts {
            indices.insert(self.expect_lattice(v)?.0);
        }
        let mut indices = indices.into_iter();
        let first = indices
            .next()
            .ok_or_else(|| Error::Backend("empty vertex tuple".into()))?;
        let mut common = self.subgroups[first].clone();
        for i in indices {
            common = common.intersect(&self.subgroups[i])?;
        }
        Ok(common.rank() >= 1)
    }

    fn annotations(&self) -> PairAnnotations {
        PairAnnotations {
            reduced: false,
            reducible: true,
            note: "abelian: every conjugate equals the subgroup, Comm_G(A) = G".into(),
        }
    }
}

/// Shared shape of the two simplex-image backends.
struct SimplexModel {
    reference: Complex,
    orbit_of: Vec<usize>,
}

impl SimplexModel {
    fn new(reference: Complex) -> Result<SimplexModel> {
        let orbit_of = maximal_orbits(&reference)?;
        Ok(SimplexModel {
            reference,
            orbit_of,
        })
    }

    fn class_count(&self) -> usize {
        self.orbit_of.iter().copied().max().map_or(0, |m| m + 1)
    }

    fn enumerate(&self) -> Vec<CosetVertex> {
        self.reference
            .maximal_simplices()
            .iter()
            .enumerate()
            .map(|(i, m)| CosetVertex::SimplexImage {
                orbit: self.orbit_of[i],
                simplex: m.clone(),
            })
            .collect()
    }

    fn expect_simplex<'a>(&self, v: &'a CosetVertex) -> Result<&'a Simplex> {
        match v {
            CosetVertex::SimplexImage { simplex, .. } => Ok(simplex),
            _ => Err(Error::Backend("vertex does not belong to this backend".into())),
        }
    }
}

/// Orbit class of each maximal simplex under the automorphism group,
/// numbered by first appearance in canonical order.
pub fn maximal_orbits(x: &Complex) -> Result<Vec<usize>> {
    let group = aut::automorphism_group(x)?;
    let maximal = x.maximal_simplices();
    let index: BTreeMap<&Simplex, usize> =
        maximal.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut orbit_of = vec![usize::MAX; maximal.len()];
    let mut next_orbit = 0;
    for start in 0..maximal.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let mut frontier = vec![start];
        orbit_of[start] = next_orbit;
        while let Some(i) = frontier.pop() {
            for g in &group.generators {
                let image = g.apply_simplex(&maximal[i]);
                let j = index[&image];
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = next_orbit;
                    frontier.push(j);
                }
            }
        }
        next_orbit += 1;
    }
    Ok(orbit_of)
}

/// Formal multitwist model over a curve catalog patch.
pub struct MultiTwistBackend {
    catalog: CurveCatalog,
    model: SimplexModel,
}

impl MultiTwistBackend {
    pub fn new(catalog: CurveCatalog) -> Result<MultiTwistBackend> {
        let patch = curve_patch(&catalog)?.patch;
        Ok(MultiTwistBackend {
            catalog,
            model: SimplexModel::new(patch)?,
        })
    }

    pub fn patch(&self) -> &Complex {
        &self.model.reference
    }

    pub fn catalog(&self) -> &CurveCatalog {
        &self.catalog
    }
}

impl GroupPairBackend for MultiTwistBackend {
    fn name(&self) -> &'static str {
        "multitwist"
    }

    fn class_count(&self) -> usize {
        self.model.class_count()
    }

    fn enumerate_vertices(&self, _radius: u32) -> Result<Vec<CosetVertex>> {
        Ok(self.model.enumerate())
    }

    fn same_coset(&self, a: &CosetVertex, b: &CosetVertex) -> Result<bool> {
        Ok(self.model.expect_simplex(a)? == self.model.expect_simplex(b)?)
    }

    fn canonical(&self, v: &CosetVertex) -> Result<CosetVertex> {
        self.model.expect_simplex(v)?;
        Ok(v.clone())
    }

    fn label(&self, v: &CosetVertex) -> Result<String> {
        Ok(self
            .model
            .reference
            .render_simplex(self.model.expect_simplex(v)?))
    }

    fn infinite_intersection(&self, verts: &[CosetVertex]) -> Result<bool> {
        // Unique supported decompositions: the twist subgroup intersection
        // is generated by the common support, so infinite means non-empty.
        let mut common: Option<Vec<VertexId>> = None;
        for v in verts {
            let s = self.model.expect_simplex(v)?;
            common = Some(match common {
                None => s.vertices().to_vec(),
                Some(mut c) => {
                    c.retain(|u| s.contains(*u));
                    c
                }
            });
        }
        Ok(!common.unwrap_or_default().is_empty())
    }

    fn annotations(&self) -> PairAnnotations {
        PairAnnotations {
            reduced: false,
            reducible: true,
            note: "multitwist pair: twist subgroups are finite-index in the \
                   pants stabilisers, commensurators are the stabilisers"
                .into(),
        }
    }
}

/// Stabiliser model over the maximal simplices of any finite complex.
pub struct NerveBackend {
    model: SimplexModel,
}

impl NerveBackend {
    pub fn new(reference: Complex) -> Result<NerveBackend> {
        Ok(NerveBackend {
            model: SimplexModel::new(reference)?,
        })
    }

    pub fn reference(&self) -> &Complex {
        &self.model.reference
    }
}

impl GroupPairBackend for NerveBackend {
    fn name(&self) -> &'static str {
        "nerve"
    }

    fn class_count(&self) -> usize {
        self.model.class_count()
    }

    fn enumerate_vertices(&self, _radius: u32) -> Result<Vec<CosetVertex>> {
        Ok(self.model.enumerate())
    }

    fn same_coset(&self, a: &CosetVertex, b: &CosetVertex) -> Result<bool> {
        Ok(self.model.expect_simplex(a)? == self.model.expect_simplex(b)?)
    }

    fn canonical(&self, v: &CosetVertex) -> Result<CosetVertex> {
        self.model.expect_simplex(v)?;
        Ok(v.clone())
    }

    fn label(&self, v: &CosetVertex) -> Result<String> {
        Ok(self
            .model
            .reference
            .render_simplex(self.model.expect_simplex(v)?))
    }

    fn infinite_intersection(&self, verts: &[CosetVertex]) -> Result<bool> {
        // Stabiliser route: some reference vertex lies in every member.
        let simplices: Vec<&Simplex> = verts
            .iter()
            .map(|v| self.model.expect_simplex(v))
            .collect::<Result<_>>()?;
        Ok(self
            .model
            .reference
            .vertices()
            .any(|x| simplices.iter().all(|s| s.contains(x))))
    }

    fn annotations(&self) -> PairAnnotations {
        PairAnnotations {
            reduced: true,
            reducible: true,
            note: "stabiliser pair: commensurators equal the setwise \
                   stabilisers, subgroups pairwise non-conjugate per orbit"
                .into(),
        }
    }
}

/// How a CIC simplex was admitted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SimplexRule {
    PredicateChecked,
    FlagInferred,
}

pub struct CicReport {
    pub backend: &'static str,
    pub radius: u32,
    pub max_arity: usize,
    pub vertex_count: usize,
    pub class_count: usize,
    pub simplex_count: usize,
    pub maximal_count: usize,
    pub predicate_checked: usize,
    pub flag_inferred: usize,
    pub annotations: PairAnnotations,
}

impl CicReport {
    pub fn to_json_value(&self) -> Value {
        json!({
            "backend": self.backend,
            "radius": self.radius,
            "max_arity": self.max_arity,
            "vertex_count": self.vertex_count,
            "class_count": self.class_count,
            "simplex_count": self.simplex_count,
            "maximal_count": self.maximal_count,
            "predicate_checked": self.predicate_checked,
            "flag_inferred": self.flag_inferred,
            "annotations": self.annotations.to_json_value(),
        })
    }
}

/// Default ceiling on enumerated coset vertices.
pub const DEFAULT_VERTEX_CAP: usize = 4096;

/// Builds the coset intersection complex over a backend.
///
/// Vertices are deduplicated by coset and canonicalised. Tuples are grown
/// breadth-first under the monotone predicate; tuples up to `max_arity` are
/// predicate-checked, larger ones are inferred from the flag rule (all
/// facets present). `max_arity = 0` means every tuple is predicate-checked.
pub fn build_cic(
    backend: &dyn GroupPairBackend,
    radius: u32,
    max_arity: usize,
    vertex_cap: usize,
    cap: FaceCap,
) -> Result<(Complex, CicReport)> {
    let raw = backend.enumerate_vertices(radius)?;
    let mut vertices: Vec<CosetVertex> = Vec::new();
    for v in &raw {
        let mut known = false;
        for u in &vertices {
            if backend.same_coset(u, v)? {
                known = true;
                break;
            }
        }
        if !known {
            vertices.push(backend.canonical(v)?);
            if vertices.len() > vertex_cap {
                return Err(Error::VertexCapExceeded { cap: vertex_cap });
            }
        }
    }
    let mut labelled: Vec<(String, CosetVertex)> = vertices
        .into_iter()
        .map(|v| Ok((backend.label(&v)?, v)))
        .collect::<Result<_>>()?;
    labelled.sort_by(|a, b| a.0.cmp(&b.0));
    let labels: Vec<String> = labelled.iter().map(|(l, _)| l.clone()).collect();
    let vertices: Vec<CosetVertex> = labelled.into_iter().map(|(_, v)| v).collect();

    for v in &vertices {
        if !backend.infinite_intersection(std::slice::from_ref(v))? {
            return Err(Error::Backend(
                "a subgroup conjugate fails to be infinite on its own coset".into(),
            ));
        }
    }

    let mut all: Vec<(Vec<usize>, SimplexRule)> = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..vertices.len()).map(|i| vec![i]).collect();
    let mut predicate_checked = layer.len();
    while !layer.is_empty() {
        let known: HashSet<Vec<usize>> = layer.iter().cloned().collect();
        let mut next = Vec::new();
        for tuple in &layer {
            let rule = if max_arity == 0 || tuple.len() <= max_arity {
                SimplexRule::PredicateChecked
            } else {
                SimplexRule::FlagInferred
            };
            all.push((tuple.clone(), rule));
            if all.len() > cap.0 {
                return Err(Error::FaceCapExceeded { cap: cap.0 });
            }
            let start = tuple.last().unwrap() + 1;
            'next_vertex: for j in start..vertices.len() {
                let mut candidate = tuple.clone();
                candidate.push(j);
                // Monotone pruning: every facet must already be a simplex.
                for drop in 0..candidate.len() - 1 {
                    let facet: Vec<usize> = candidate
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    if !known.contains(&facet) {
                        continue 'next_vertex;
                    }
                }
                let admit = if max_arity == 0 || candidate.len() <= max_arity {
                    predicate_checked += 1;
                    let members: Vec<CosetVertex> = candidate
                        .iter()
                        .map(|&i| vertices[i].clone())
                        .collect();
                    backend.infinite_intersection(&members)?
                } else {
                    true
                };
                if admit {
                    next.push(candidate);
                }
            }
        }
        layer = next;
    }

    let gens: Vec<Vec<String>> = all
        .iter()
        .map(|(tuple, _)| tuple.iter().map(|&i| labels[i].clone()).collect())
        .collect();
    let complex = Complex::build(&gens, false)?;
    let report = CicReport {
        backend: backend.name(),
        radius,
        max_arity,
        vertex_count: vertices.len(),
        class_count: backend.class_count(),
        simplex_count: all.len(),
        maximal_count: complex.maximal_simplices().len(),
        predicate_checked,
        flag_inferred: all
            .iter()
            .filter(|(_, r)| *r == SimplexRule::FlagInferred)
            .count(),
        annotations: backend.annotations(),
    };
    Ok((complex, report))
}

/// A formal product of twists with non-zero exponents supported on a
/// pairwise-disjoint curve set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiTwist {
    pub exponents: BTreeMap<String, Int>,
}

impl MultiTwist {
    pub fn new(catalog: &CurveCatalog, exponents: BTreeMap<String, Int>) -> Result<MultiTwist> {
        if exponents.is_empty() {
            return Err(Error::Malformed("multitwist support is empty".into()));
        }
        for (curve, e) in &exponents {
            if catalog.curve_index(curve).is_none() {
                return Err(Error::UnknownVertex {
                    label: curve.clone(),
                });
            }
            if e.is_zero() {
                return Err(Error::ZeroExponent(curve.clone()));
            }
        }
        let support: Vec<&String> = exponents.keys().collect();
        for (i, a) in support.iter().enumerate() {
            for b in support.iter().skip(i + 1) {
                if catalog.intersection_by_label(a, b)? != 0 {
                    return Err(Error::NotASimplex(format!(
                        "support curves {a} and {b} intersect"
                    )));
                }
            }
        }
        Ok(MultiTwist { exponents })
    }

    pub fn support(&self) -> Vec<String> {
        self.exponents.keys().cloned().collect()
    }
}

/// Conjugation by an intersection-preserving relabeling carries twists
/// along curve images: the support is relabelled, exponents are kept.
pub fn multitwist_conjugate(
    catalog: &CurveCatalog,
    relabeling: &BTreeMap<String, String>,
    w: &MultiTwist,
) -> Result<MultiTwist> {
    let curves = catalog.curves();
    if relabeling.len() != curves.len() {
        return Err(Error::Malformed(
            "relabeling must be total on the catalog curves".into(),
        ));
    }
    let images: BTreeSet<&String> = relabeling.values().collect();
    if images.len() != curves.len() || !curves.iter().all(|c| images.contains(c)) {
        return Err(Error::Malformed(
            "relabeling must be a bijection of the catalog curves".into(),
        ));
    }
    for a in curves {
        for b in curves {
            if catalog.intersection_by_label(a, b)?
                != catalog.intersection_by_label(&relabeling[a], &relabeling[b])?
            {
                return Err(Error::NotIntersectionPreserving {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    let exponents = w
        .exponents
        .iter()
        .map(|(c, e)| (relabeling[c].clone(), e.clone()))
        .collect();
    MultiTwist::new(catalog, exponents)
}

/// Coordinate sublattice of Z^n spanned by the unit vectors of a support.
fn coordinate_lattice(n: usize, support: &Simplex) -> LatticeSubgroup {
    let rows: Vec<Vec<Int>> = support
        .vertices()
        .iter()
        .map(|v| {
            let mut row = vec![BigInt::zero(); n];
            row[v.index()] = BigInt::from(1);
            row
        })
        .collect();
    LatticeSubgroup::from_generators(Mat::from_rows(rows, n))
}

fn unit_support(n: usize, l: &LatticeSubgroup) -> Option<Vec<VertexId>> {
    let basis: &IntMatrix = l.basis();
    let mut support = Vec::with_capacity(basis.rows());
    for i in 0..basis.rows() {
        let mut hit = None;
        for j in 0..n {
            let e = &basis[(i, j)];
            if e.is_zero() {
                continue;
            }
            if *e != BigInt::from(1) || hit.is_some() {
                return None;
            }
            hit = Some(VertexId(j as u32));
        }
        support.push(hit?);
    }
    support.sort_unstable();
    Some(support)
}

/// The support of the intersection of the twist subgroups generated along
/// the given supports, computed through the lattice realisation and checked
/// against the plain set intersection. Empty output means the formal
/// subgroup intersection is finite.
pub fn multitwist_subgroup_intersection(
    reference: &Complex,
    supports: &[Simplex],
) -> Result<Vec<VertexId>> {
    if supports.is_empty() {
        return Err(Error::Malformed("no supports given".into()));
    }
    for s in supports {
        if !reference.is_simplex(s) {
            return Err(Error::NotASimplex(reference.render_simplex(s)));
        }
    }
    let n = reference.vertex_count();
    let mut lattice = coordinate_lattice(n, &supports[0]);
    for s in &supports[1..] {
        lattice = lattice.intersect(&coordinate_lattice(n, s))?;
    }
    let via_lattice = unit_support(n, &lattice).ok_or_else(|| {
        Error::Internal("twist subgroup intersection is not a coordinate lattice".into())
    })?;

    let mut direct: Vec<VertexId> = supports[0].vertices().to_vec();
    for s in &supports[1..] {
        direct.retain(|v| s.contains(*v));
    }
    if via_lattice != direct {
        return Err(Error::Internal(
            "lattice route and set route disagree on the twist intersection".into(),
        ));
    }
    Ok(via_lattice)
}

/// Exhaustive three-route agreement check over the maximal simplices of a
/// finite complex: the stabiliser route, the twist subgroup route, and the
/// plain intersection route must name exactly the same simplex tuples.
pub struct EquivalenceReport {
    pub tuples_checked: usize,
    pub max_arity: usize,
    pub witness: Option<Vec<String>>,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "tuples_checked": self.tuples_checked,
            "max_arity": self.max_arity,
            "agree": self.agree(),
            "witness": self.witness,
        })
    }
}

pub fn equivalence_audit(x: &Complex, max_arity: usize) -> Result<EquivalenceReport> {
    let maximal = x.maximal_simplices();
    let n = x.vertex_count();
    let mut tuples_checked = 0usize;
    let mut witness = None;

    let mut stack: Vec<Vec<usize>> = (0..maximal.len()).map(|i| vec![i]).collect();
    'outer: while let Some(tuple) = stack.pop() {
        tuples_checked += 1;
        let members: Vec<&Simplex> = tuple.iter().map(|&i| &maximal[i]).collect();

        // (1) stabiliser route: a common vertex exists.
        let stabiliser = x
            .vertices()
            .any(|v| members.iter().all(|m| m.contains(v)));

        // (2) twist subgroup route: coordinate lattice intersection.
        let mut lattice = coordinate_lattice(n, members[0]);
        for m in &members[1..] {
            lattice = lattice.intersect(&coordinate_lattice(n, m))?;
        }
        let twist = lattice.rank() >= 1;

        // (3) plain intersection route.
        let mut common: Vec<VertexId> = members[0].vertices().to_vec();
        for m in &members[1..] {
            common.retain(|v| m.contains(*v));
        }
        let direct = !common.is_empty();

        if stabiliser != twist || twist != direct {
            witness = Some(
                members
                    .iter()
                    .map(|m| x.render_simplex(m))
                    .collect::<Vec<_>>(),
            );
            break 'outer;
        }
        if tuple.len() < max_arity {
            for next in tuple.last().unwrap() + 1..maximal.len() {
                let mut t = tuple.clone();
                t.push(next);
                stack.push(t);
            }
        }
    }

    Ok(EquivalenceReport {
        tuples_checked,
        max_arity,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn two_axis_backend() -> AbelianBackend {
        AbelianBackend::new(vec![
            LatticeSubgroup::from_rows(vec![vec![1, 0]], 2),
            LatticeSubgroup::from_rows(vec![vec![0, 1]], 2),
        ])
        .unwrap()
    }

    #[test]
    fn two_axis_cic() {
        let backend = two_axis_backend();
        let (complex, report) =
            build_cic(&backend, 1, 4, DEFAULT_VERTEX_CAP, FaceCap::default()).unwrap();
        assert_eq!(report.vertex_count, 6);
        assert_eq!(complex.maximal_simplices().len(), 2);
        assert!(complex.maximal_simplices().iter().all(|m| m.rank() == 3));
        // The two maximal simplices are disjoint.
        let inter = complex.maximal_simplices()[0].intersect(&complex.maximal_simplices()[1]);
        assert!(inter.is_empty());
    }

    #[test]
    fn abelian_predicate_ignores_translations() {
        let backend = two_axis_backend();
        let verts = backend.enumerate_vertices(1).unwrap();
        for a in &verts {
            for b in &verts {
                let expected = match (a, b) {
                    (
                        CosetVertex::Lattice { subgroup: i, .. },
                        CosetVertex::Lattice { subgroup: j, .. },
                    ) => i == j,
                    _ => unreachable!(),
                };
                assert_eq!(
                    backend
                        .infinite_intersection(&[a.clone(), b.clone()])
                        .unwrap(),
                    expected
                );
            }
        }
    }

    #[test]
    fn representative_independence() {
        let backend = two_axis_backend();
        let v = CosetVertex::Lattice {
            subgroup: 0,
            rep: vec![BigInt::from(3), BigInt::from(-2)],
        };
        let shifted = CosetVertex::Lattice {
            subgroup: 0,
            rep: vec![BigInt::from(-7), BigInt::from(-2)],
        };
        assert!(backend.same_coset(&v, &shifted).unwrap());
        assert_eq!(
            backend.canonical(&v).unwrap(),
            backend.canonical(&shifted).unwrap()
        );
        assert_eq!(
            backend.label(&backend.canonical(&v).unwrap()).unwrap(),
            backend
                .label(&backend.canonical(&shifted).unwrap())
                .unwrap()
        );
    }

    #[test]
    fn multitwist_cic_is_nerve_of_patch() {
        let backend = MultiTwistBackend::new(fixtures::chain_catalog()).unwrap();
        let (complex, _) =
            build_cic(&backend, 0, 0, DEFAULT_VERTEX_CAP, FaceCap::default()).unwrap();
        let nerve = crate::nerve::nerve_of_maximal(backend.patch(), FaceCap::default())
            .unwrap()
            .nerve;
        assert_eq!(complex, nerve);
    }

    #[test]
    fn nerve_backend_equals_nerve() {
        for x in [fixtures::octahedron(), fixtures::triangle_boundary()] {
            let backend = NerveBackend::new(x.clone()).unwrap();
            let (complex, report) =
                build_cic(&backend, 0, 0, DEFAULT_VERTEX_CAP, FaceCap::default()).unwrap();
            let nerve = crate::nerve::nerve_of_maximal(&x, FaceCap::default())
                .unwrap()
                .nerve;
            assert_eq!(complex, nerve);
            assert_eq!(report.flag_inferred, 0);
        }
    }

    #[test]
    fn octahedron_multitwist_isomorphic_to_nerve() {
        // The octahedron read as a synthetic saturated catalog.
        let oct = fixtures::octahedron();
        let labels = oct.labels().to_vec();
        let n = labels.len();
        let mut inter = vec![vec![0u64; n]; n];
        let adj = oct.adjacency();
        for i in 0..n {
            for j in 0..n {
                if i != j && !adj[i][j] {
                    inter[i][j] = 1;
                }
            }
        }
        let catalog = CurveCatalog::new(2, labels, inter).unwrap();
        let backend = MultiTwistBackend::new(catalog).unwrap();
        let (complex, _) =
            build_cic(&backend, 0, 0, DEFAULT_VERTEX_CAP, FaceCap::default()).unwrap();
        let nerve = crate::nerve::nerve_of_maximal(&oct, FaceCap::default())
            .unwrap()
            .nerve;
        assert!(crate::aut::are_isomorphic(&complex, &nerve));
    }

    #[test]
    fn multitwist_examples() {
        let cat = fixtures::chain_catalog();
        let w = MultiTwist::new(
            &cat,
            [("c1".to_string(), BigInt::from(2))].into_iter().collect(),
        )
        .unwrap();

        // Identity conjugation.
        let id: BTreeMap<String, String> = cat
            .curves()
            .iter()
            .map(|c| (c.clone(), c.clone()))
            .collect();
        assert_eq!(multitwist_conjugate(&cat, &id, &w).unwrap(), w);

        // Chain reversal c_i -> c_{6-i} preserves the intersection matrix.
        let rev: BTreeMap<String, String> = (1..=5)
            .map(|i| (format!("c{i}"), format!("c{}", 6 - i)))
            .collect();
        let image = multitwist_conjugate(&cat, &rev, &w).unwrap();
        assert_eq!(image.support(), vec!["c5".to_string()]);
        assert_eq!(image.exponents["c5"], BigInt::from(2));

        // A non-preserving relabeling is rejected.
        let swap: BTreeMap<String, String> = [
            ("c1", "c2"),
            ("c2", "c1"),
            ("c3", "c3"),
            ("c4", "c4"),
            ("c5", "c5"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        assert!(matches!(
            multitwist_conjugate(&cat, &swap, &w),
            Err(Error::NotIntersectionPreserving { .. })
        ));

        // Zero exponents and intersecting supports are rejected.
        assert!(MultiTwist::new(
            &cat,
            [("c1".to_string(), BigInt::from(0))].into_iter().collect()
        )
        .is_err());
        assert!(MultiTwist::new(
            &cat,
            [
                ("c1".to_string(), BigInt::from(1)),
                ("c2".to_string(), BigInt::from(1))
            ]
            .into_iter()
            .collect()
        )
        .is_err());
    }

    #[test]
    fn subgroup_intersection_examples() {
        let cat = fixtures::chain_catalog();
        let patch = curve_patch(&cat).unwrap().patch;
        let q0 = patch.simplex_from_labels(&["c1", "c3", "c5"]).unwrap();
        let q1 = patch.simplex_from_labels(&["c3", "c5"]).unwrap();
        let got = multitwist_subgroup_intersection(&patch, &[q0.clone(), q0.clone()]).unwrap();
        assert_eq!(got, q0.vertices().to_vec());
        let got = multitwist_subgroup_intersection(&patch, &[q0.clone(), q1]).unwrap();
        let expected = patch.simplex_from_labels(&["c3", "c5"]).unwrap();
        assert_eq!(got, expected.vertices().to_vec());

        let c1c4 = patch.simplex_from_labels(&["c1", "c4"]).unwrap();
        let c2c5 = patch.simplex_from_labels(&["c2", "c5"]).unwrap();
        let got = multitwist_subgroup_intersection(&patch, &[c1c4, c2c5]).unwrap();
        assert!(got.is_empty());

        let not_simplex = patch.simplex_from_labels(&["c1", "c2"]).unwrap();
        assert!(matches!(
            multitwist_subgroup_intersection(&patch, &[not_simplex]),
            Err(Error::NotASimplex(_))
        ));
    }

    #[test]
    fn equivalence_audit_examples() {
        for x in [
            fixtures::octahedron(),
            fixtures::triangle_boundary(),
            curve_patch(&fixtures::chain_catalog()).unwrap().patch,
        ] {
            let report = equivalence_audit(&x, 4).unwrap();
            assert!(report.agree(), "witness {:?}", report.witness);
        }
    }

    #[test]
    fn cic_downward_closure() {
        let backend = two_axis_backend();
        let (complex, _) =
            build_cic(&backend, 1, 4, DEFAULT_VERTEX_CAP, FaceCap::default()).unwrap();
        for f in complex.all_faces(FaceCap::default()).unwrap() {
            assert!(complex.is_simplex(&f));
        }
    }
}
