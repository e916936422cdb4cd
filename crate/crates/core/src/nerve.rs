//! The nerve operator, the sigma machinery, the two reconstruction
//! conditions, and the double-nerve map.
//!
//! For a vertex x, `sigma(x)` is the family of maximal simplices containing
//! x. A complex satisfies *separation* when sigma(x) inside sigma(y) forces
//! x = y, and *extension* when every simplex K and vertex x outside K admit
//! a maximal simplex containing K but not x. Under separation the map
//! x -> sigma(x) is a simplicial isomorphism onto the nerve of the nerve.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::complex::{Complex, FaceCap, Simplex, VertexId};
use crate::error::{Error, Result};

/// The family of maximal simplices of a complex containing one vertex,
/// stored as indices into `Complex::maximal_simplices`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaStar {
    pub vertex: VertexId,
    pub members: BTreeSet<usize>,
}

impl SigmaStar {
    pub fn simplices<'a>(&self, x: &'a Complex) -> Vec<&'a Simplex> {
        self.members
            .iter()
            .map(|&i| &x.maximal_simplices()[i])
            .collect()
    }
}

/// Maximal simplices containing the vertex `v`.
pub fn sigma(x: &Complex, v: VertexId) -> SigmaStar {
    SigmaStar {
        vertex: v,
        members: x.maximal_containing(v).into_iter().collect(),
    }
}

pub fn sigma_by_label(x: &Complex, label: &str) -> Result<SigmaStar> {
    let v = x.vertex(label).ok_or_else(|| Error::UnknownVertex {
        label: label.to_string(),
    })?;
    Ok(sigma(x, v))
}

/// Incidence sets of all vertices at once: entry v lists the indices of the
/// maximal simplices containing v.
pub fn sigma_table(x: &Complex) -> Vec<BTreeSet<usize>> {
    let mut table = vec![BTreeSet::new(); x.vertex_count()];
    for (i, m) in x.maximal_simplices().iter().enumerate() {
        for v in m.vertices() {
            table[v.index()].insert(i);
        }
    }
    table
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// All nerve simplices of a family of sorted element lists, as index sets.
/// Breadth-first growth: a family is extended only while its running
/// intersection stays non-empty, so sparse nerves never see a powerset.
fn nerve_simplices(sets: &[Vec<u32>], cap: FaceCap) -> Result<Vec<Vec<usize>>> {
    let mut all: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<(Vec<usize>, Vec<u32>)> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (vec![i], s.clone()))
        .collect();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (family, inter) in &layer {
            all.push(family.clone());
            if all.len() > cap.0 {
                return Err(Error::FaceCapExceeded { cap: cap.0 });
            }
            let start = family.last().unwrap() + 1;
            for j in start..sets.len() {
                let ni = intersect_sorted(inter, &sets[j]);
                if !ni.is_empty() {
                    let mut f = family.clone();
                    f.push(j);
                    next.push((f, ni));
                }
            }
        }
        layer = next;
    }
    Ok(all)
}

/// Nerve of an arbitrary family of non-empty sets. The i-th set becomes the
/// vertex `U<i>`; a family of vertices spans a simplex exactly when the
/// corresponding sets intersect.
pub fn nerve_of_cover(sets: &[Vec<String>], cap: FaceCap) -> Result<Complex> {
    if sets.is_empty() {
        return Err(Error::EmptyGeneratorList);
    }
    let mut universe: BTreeMap<&str, u32> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySimplex { index: i });
        }
        for e in s {
            let next = universe.len() as u32;
            universe.entry(e.as_str()).or_insert(next);
        }
    }
    let encoded: Vec<Vec<u32>> = sets
        .iter()
        .map(|s| {
            let mut ids: Vec<u32> = s.iter().map(|e| universe[e.as_str()]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();
    let width = sets.len().saturating_sub(1).to_string().len();
    let label = |i: usize| format!("U{:0width$}", i, width = width);
    let simplices = nerve_simplices(&encoded, cap)?;
    let gens: Vec<Vec<String>> = simplices
        .iter()
        .map(|f| f.iter().map(|&i| label(i)).collect())
        .collect();
    Complex::build(&gens, false)
}

/// The nerve of the maximal simplices of a complex, with the dictionary
/// between base maximal simplices and nerve vertex labels.
#[derive(Clone, Debug)]
pub struct NerveComplex {
    pub nerve: Complex,
    dictionary: Vec<(Simplex, String)>,
    base_by_label: BTreeMap<String, Simplex>,
}

impl NerveComplex {
    /// Pairs (base maximal simplex, nerve vertex label), sorted by base.
    pub fn dictionary(&self) -> &[(Simplex, String)] {
        &self.dictionary
    }

    pub fn nerve_vertex(&self, base: &Simplex) -> Option<VertexId> {
        self.dictionary
            .binary_search_by(|(s, _)| s.cmp(base))
            .ok()
            .and_then(|i| self.nerve.vertex(&self.dictionary[i].1))
    }

    /// The base maximal simplex behind a nerve vertex.
    pub fn base_of(&self, v: VertexId) -> &Simplex {
        &self.base_by_label[self.nerve.label(v)]
    }
}

/// `N(X)`: one nerve vertex per maximal simplex of `x`, labelled by the
/// rendering of that simplex.
pub fn nerve_of_maximal(x: &Complex, cap: FaceCap) -> Result<NerveComplex> {
    let maximal = x.maximal_simplices();
    let sets: Vec<Vec<u32>> = maximal
        .iter()
        .map(|m| m.vertices().iter().map(|v| v.0).collect())
        .collect();
    let labels: Vec<String> = maximal.iter().map(|m| x.render_simplex(m)).collect();
    let distinct: BTreeSet<&String> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(Error::Malformed(
            "nerve vertex labels collide; avoid commas and braces inside vertex labels".into(),
        ));
    }
    let simplices = nerve_simplices(&sets, cap)?;
    let gens: Vec<Vec<String>> = simplices
        .iter()
        .map(|f| f.iter().map(|&i| labels[i].clone()).collect())
        .collect();
    let nerve = Complex::build(&gens, false)?;
    let mut dictionary: Vec<(Simplex, String)> = maximal
        .iter()
        .cloned()
        .zip(labels.iter().cloned())
        .collect();
    dictionary.sort_by(|a, b| a.0.cmp(&b.0));
    let base_by_label = dictionary
        .iter()
        .map(|(s, l)| (l.clone(), s.clone()))
        .collect();
    Ok(NerveComplex {
        nerve,
        dictionary,
        base_by_label,
    })
}

/// Outcome of the extension-condition check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtensionCheck {
    Holds,
    /// First failing pair: a simplex K and a vertex x outside K such that
    /// every maximal simplex containing K also contains x.
    Fails { simplex: Vec<String>, vertex: String },
    /// Face enumeration exceeded the cap; the check was refused.
    Refused { cap: usize },
}

/// Report of the two reconstruction conditions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionReport {
    /// First ordered pair (x, y) with sigma(x) inside sigma(y), if any.
    pub separation: Option<(String, String)>,
    pub extension: ExtensionCheck,
}

impl ConditionReport {
    pub fn separation_holds(&self) -> bool {
        self.separation.is_none()
    }

    pub fn extension_holds(&self) -> bool {
        matches!(self.extension, ExtensionCheck::Holds)
    }

    pub fn both_hold(&self) -> bool {
        self.separation_holds() && self.extension_holds()
    }

    pub fn to_json_value(&self) -> Value {
        let separation = match &self.separation {
            None => json!({ "holds": true }),
            Some((x, y)) => json!({ "holds": false, "counterexample": { "x": x, "y": y } }),
        };
        let extension = match &self.extension {
            ExtensionCheck::Holds => json!({ "holds": true }),
            ExtensionCheck::Fails { simplex, vertex } => json!({
                "holds": false,
                "counterexample": { "simplex": simplex, "vertex": vertex }
            }),
            ExtensionCheck::Refused { cap } => json!({ "refused": true, "face_cap": cap }),
        };
        json!({ "separation": separation, "extension": extension })
    }
}

/// Checks both conditions exhaustively. Separation is always checked; the
/// extension check is refused (not failed) when the face cap is hit.
pub fn check_conditions(x: &Complex, cap: FaceCap) -> ConditionReport {
    let table = sigma_table(x);
    let n = x.vertex_count();
    let mut separation = None;
    'outer: for a in 0..n {
        for b in 0..n {
            if a != b && table[a].is_subset(&table[b]) {
                separation = Some((x.labels()[a].clone(), x.labels()[b].clone()));
                break 'outer;
            }
        }
    }

    let extension = match x.all_faces(cap) {
        Err(Error::FaceCapExceeded { cap }) => ExtensionCheck::Refused { cap },
        Err(_) => unreachable!("face enumeration only fails on the cap"),
        Ok(faces) => {
            let mut failure = None;
            'faces: for k in &faces {
                let hull = sigma_intersection(x, &table, k);
                for v in &hull {
                    if !k.contains(*v) {
                        failure = Some((k.clone(), *v));
                        break 'faces;
                    }
                }
            }
            match failure {
                None => ExtensionCheck::Holds,
                Some((k, v)) => ExtensionCheck::Fails {
                    simplex: k
                        .vertices()
                        .iter()
                        .map(|u| x.label(*u).to_string())
                        .collect(),
                    vertex: x.label(v).to_string(),
                },
            }
        }
    };

    ConditionReport {
        separation,
        extension,
    }
}

/// Intersection of all maximal simplices containing `tau`, as sorted ids.
fn sigma_intersection(x: &Complex, table: &[BTreeSet<usize>], tau: &Simplex) -> Vec<VertexId> {
    let mut members = table[tau.vertices()[0].index()].clone();
    for v in &tau.vertices()[1..] {
        members = members
            .intersection(&table[v.index()])
            .copied()
            .collect();
    }
    let mut iter = members.iter();
    let first = iter
        .next()
        .expect("every simplex lies in a maximal simplex");
    let mut inter: Vec<VertexId> = x.maximal_simplices()[*first].vertices().to_vec();
    for &i in iter {
        let s = &x.maximal_simplices()[i];
        inter.retain(|v| s.contains(*v));
    }
    inter
}

/// Result of `sigma_tau_intersection`: `exact` is false when the
/// intersection strictly exceeds tau, witnessing an extension failure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaTauReport {
    pub tau: Vec<String>,
    pub intersection: Vec<String>,
    pub exact: bool,
}

pub fn sigma_tau_intersection(x: &Complex, tau: &Simplex) -> Result<SigmaTauReport> {
    if !x.is_simplex(tau) {
        return Err(Error::NotASimplex(x.render_simplex(tau)));
    }
    let table = sigma_table(x);
    let inter = sigma_intersection(x, &table, tau);
    let exact = inter.len() == tau.rank();
    Ok(SigmaTauReport {
        tau: tau
            .vertices()
            .iter()
            .map(|v| x.label(*v).to_string())
            .collect(),
        intersection: inter.iter().map(|v| x.label(*v).to_string()).collect(),
        exact,
    })
}

/// The double-nerve reconstruction map x -> sigma(x), verified as a
/// simplicial isomorphism in both directions.
#[derive(Clone, Debug)]
pub struct BetaReport {
    /// Vertex label of X paired with its image vertex label in N(N(X)).
    pub map: Vec<(String, String)>,
    pub nn_vertex_count: usize,
}

pub fn beta_map(x: &Complex, cap: FaceCap) -> Result<BetaReport> {
    let report = check_conditions(x, cap);
    if let Some((a, b)) = report.separation {
        return Err(Error::SeparationFails { x: a, y: b });
    }
    let n1 = nerve_of_maximal(x, cap)?;
    let n2 = nerve_of_maximal(&n1.nerve, cap)?;

    // beta(v) = sigma(v), read as a maximal simplex of N(X), then as a
    // vertex of N(N(X)).
    let mut forward: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for v in x.vertices() {
        let members = sigma(x, v).members;
        let nerve_ids: Vec<VertexId> = members
            .iter()
            .map(|&i| {
                n1.nerve_vertex(&x.maximal_simplices()[i])
                    .expect("every maximal simplex is a nerve vertex")
            })
            .collect();
        let sigma_simplex = Simplex::new(nerve_ids).expect("sigma is non-empty");
        let image = n2.nerve_vertex(&sigma_simplex).ok_or_else(|| {
            Error::Internal(format!(
                "sigma({}) is not maximal in the nerve despite separation",
                x.label(v)
            ))
        })?;
        forward.insert(v, image);
    }

    let images: BTreeSet<VertexId> = forward.values().copied().collect();
    if images.len() != forward.len() || images.len() != n2.nerve.vertex_count() {
        return Err(Error::Internal(
            "beta is not a bijection onto the double nerve vertices".into(),
        ));
    }

    // Both directions simplicial, checked on every face.
    let backward: BTreeMap<VertexId, VertexId> =
        forward.iter().map(|(k, v)| (*v, *k)).collect();
    for f in x.all_faces(cap)? {
        let image: Vec<VertexId> = f.vertices().iter().map(|v| forward[v]).collect();
        let s = Simplex::new(image).expect("bijective image");
        if !n2.nerve.is_simplex(&s) {
            return Err(Error::TheoremViolation(format!(
                "beta image of {} is not a simplex of the double nerve",
                x.render_simplex(&f)
            )));
        }
    }
    for f in n2.nerve.all_faces(cap)? {
        let pre: Vec<VertexId> = f.vertices().iter().map(|v| backward[v]).collect();
        let s = Simplex::new(pre).expect("bijective preimage");
        if !x.is_simplex(&s) {
            return Err(Error::TheoremViolation(format!(
                "beta preimage of {} is not a simplex of the base",
                n2.nerve.render_simplex(&f)
            )));
        }
    }

    Ok(BetaReport {
        map: forward
            .iter()
            .map(|(v, w)| (x.label(*v).to_string(), n2.nerve.label(*w).to_string()))
            .collect(),
        nn_vertex_count: n2.nerve.vertex_count(),
    })
}

/// N(N(X)) itself, computed without any condition on X.
pub fn nn_complex(x: &Complex, cap: FaceCap) -> Result<Complex> {
    let n1 = nerve_of_maximal(x, cap)?;
    Ok(nerve_of_maximal(&n1.nerve, cap)?.nerve)
}

/// Witness for a maximal nerve simplex: the vertex x with sigma(x) equal to
/// the given family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessReport {
    pub witness: String,
    pub unique: bool,
    /// Observed status of "every sigma(y) is maximal in the nerve".
    /// This is a theorem only under separation.
    pub all_sigma_maximal_observed: bool,
    pub separation_holds: bool,
}

pub fn max_simplex_witness(
    x: &Complex,
    nerve: &NerveComplex,
    sigma_members: &[Simplex],
) -> Result<WitnessReport> {
    let ids: Vec<VertexId> = sigma_members
        .iter()
        .map(|m| {
            nerve
                .nerve_vertex(m)
                .ok_or_else(|| Error::NotMaximalInNerve(x.render_simplex(m)))
        })
        .collect::<Result<_>>()?;
    let as_simplex = Simplex::new(ids).ok_or_else(|| {
        Error::Malformed("sigma family is empty or has repeated members".into())
    })?;
    if !nerve.nerve.maximal_simplices().contains(&as_simplex) {
        return Err(Error::NotMaximalInNerve(
            nerve.nerve.render_simplex(&as_simplex),
        ));
    }

    let mut common: Vec<VertexId> = sigma_members[0].vertices().to_vec();
    for m in &sigma_members[1..] {
        common.retain(|v| m.contains(*v));
    }
    let witness = *common.first().ok_or_else(|| {
        Error::Internal("maximal nerve simplex with empty common intersection".into())
    })?;

    let table = sigma_table(x);
    let n = x.vertex_count();
    let separation_holds = !(0..n)
        .any(|a| (0..n).any(|b| a != b && table[a].is_subset(&table[b])));
    let all_sigma_maximal_observed = x.vertices().all(|v| {
        let ids: Vec<VertexId> = sigma(x, v)
            .members
            .iter()
            .map(|&i| nerve.nerve_vertex(&x.maximal_simplices()[i]).unwrap())
            .collect();
        let s = Simplex::new(ids).unwrap();
        nerve.nerve.maximal_simplices().contains(&s)
    });
    if separation_holds && !all_sigma_maximal_observed {
        return Err(Error::TheoremViolation(
            "under separation every sigma(y) must be maximal in the nerve".into(),
        ));
    }

    Ok(WitnessReport {
        witness: x.label(witness).to_string(),
        unique: common.len() == 1,
        all_sigma_maximal_observed,
        separation_holds,
    })
}

/// Exhaustive check that vertex tuples up to `max_arity` span a simplex
/// exactly when their sigma families intersect. Returns the first violating
/// tuple, if any.
pub fn lemma_simplex_iff_sigma(x: &Complex, max_arity: usize) -> Option<Vec<String>> {
    let table = sigma_table(x);
    let n = x.vertex_count();
    let mut stack: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while let Some(tuple) = stack.pop() {
        let mut inter = table[tuple[0]].clone();
        for &v in &tuple[1..] {
            inter = inter.intersection(&table[v]).copied().collect();
        }
        let simplex = Simplex::from_sorted(
            tuple.iter().map(|&v| VertexId(v as u32)).collect(),
        );
        if x.is_simplex(&simplex) != !inter.is_empty() {
            return Some(
                tuple
                    .iter()
                    .map(|&v| x.labels()[v].clone())
                    .collect(),
            );
        }
        if tuple.len() < max_arity {
            for next in tuple.last().unwrap() + 1..n {
                let mut t = tuple.clone();
                t.push(next);
                stack.push(t);
            }
        }
    }
    None
}
