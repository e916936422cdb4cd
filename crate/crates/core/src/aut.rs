//! Simplicial automorphism groups and the nerve transfer.
//!
//! The search is a backtracking assignment over vertices with iterated
//! partition refinement by (1-skeleton degree, multiset of incident
//! maximal-simplex ranks); refinement only prunes, correctness comes from
//! the leaf check that every maximal simplex maps onto a maximal simplex.
//! Groups are held as a stabilizer chain so that membership and order stay
//! polynomial-space even when the group is large.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::complex::{Complex, FaceCap, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::nerve::{self, NerveComplex};

/// A vertex bijection of one complex, stored as the image table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexPermutation {
    map: Vec<u32>,
}

impl VertexPermutation {
    pub fn identity(n: usize) -> Self {
        VertexPermutation {
            map: (0..n as u32).collect(),
        }
    }

    pub fn from_images(map: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if (v as usize) >= map.len() || seen[v as usize] {
                return None;
            }
            seen[v as usize] = true;
        }
        Some(VertexPermutation { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        VertexId(self.map[v.index()])
    }

    pub fn images(&self) -> &[u32] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// (self . other): apply `other` first.
    pub fn compose(&self, other: &VertexPermutation) -> VertexPermutation {
        VertexPermutation {
            map: other.map.iter().map(|&v| self.map[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        VertexPermutation { map: inv }
    }

    pub fn apply_simplex(&self, s: &Simplex) -> Simplex {
        Simplex::new(s.vertices().iter().map(|&v| self.apply(v)).collect())
            .expect("bijections preserve cardinality")
    }

    /// True iff the image of every maximal simplex is again maximal. For a
    /// vertex bijection of a finite complex this characterises simplicial
    /// automorphisms in both directions.
    pub fn is_automorphism(&self, x: &Complex) -> bool {
        self.map.len() == x.vertex_count()
            && x.maximal_simplices().iter().all(|m| {
                x.maximal_simplices()
                    .binary_search(&self.apply_simplex(m))
                    .is_ok()
            })
    }

    /// Render as label pairs of `x`.
    pub fn as_label_pairs(&self, x: &Complex) -> Vec<(String, String)> {
        (0..self.map.len())
            .map(|i| {
                (
                    x.label(VertexId(i as u32)).to_string(),
                    x.label(VertexId(self.map[i])).to_string(),
                )
            })
            .collect()
    }
}

struct ChainLevel {
    base: u32,
    /// point -> representative mapping base to that point
    transversal: BTreeMap<u32, VertexPermutation>,
}

/// Stabilizer chain over the base 0, 1, ..., n-1, built by coset
/// decomposition of the full element list the search produced. Membership
/// and order are exact by construction: an element sifts exactly when it is
/// a product of transversal representatives, and those products are in
/// bijection with the group.
pub struct StabChain {
    degree: usize,
    levels: Vec<ChainLevel>,
}

impl StabChain {
    fn from_elements(degree: usize, elements: Vec<VertexPermutation>) -> Self {
        let mut levels = Vec::with_capacity(degree);
        // Invariant: everything in `current` fixes the bases handled so far.
        let mut current: Vec<VertexPermutation> = elements;
        for b in 0..degree as u32 {
            let mut transversal: BTreeMap<u32, VertexPermutation> = BTreeMap::new();
            for g in &current {
                let p = g.apply(VertexId(b)).0;
                transversal.entry(p).or_insert_with(|| g.clone());
            }
            let mut residues: BTreeSet<VertexPermutation> = BTreeSet::new();
            for g in current {
                let p = g.apply(VertexId(b)).0;
                residues.insert(transversal[&p].inverse().compose(&g));
            }
            levels.push(ChainLevel { base: b, transversal });
            current = residues.into_iter().collect();
        }
        debug_assert!(current.iter().all(|g| g.is_identity()));
        StabChain { degree, levels }
    }

    fn sift(&self, g: &VertexPermutation) -> bool {
        let mut g = g.clone();
        for level in &self.levels {
            let p = g.apply(VertexId(level.base)).0;
            match level.transversal.get(&p) {
                None => return false,
                Some(rep) => g = rep.inverse().compose(&g),
            }
        }
        g.is_identity()
    }

    pub fn contains(&self, g: &VertexPermutation) -> bool {
        g.degree() == self.degree && self.sift(g)
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| {
                acc * BigUint::from(l.transversal.len())
            })
    }

    /// Non-identity transversal representatives; a strong generating set.
    pub fn strong_generators(&self) -> Vec<VertexPermutation> {
        self.levels
            .iter()
            .flat_map(|l| l.transversal.values())
            .filter(|g| !g.is_identity())
            .cloned()
            .collect()
    }

    /// Every group element, as transversal products. Only call on groups of
    /// modest order.
    pub fn elements(&self) -> Vec<VertexPermutation> {
        let mut out = vec![VertexPermutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.transversal.len());
            for rep in level.transversal.values() {
                for tail in &out {
                    next.push(rep.compose(tail));
                }
            }
            out = next;
        }
        out
    }
}

/// A permutation group given by generators plus its stabilizer chain.
pub struct PermutationGroup {
    pub generators: Vec<VertexPermutation>,
    chain: StabChain,
}

impl PermutationGroup {
    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    pub fn contains(&self, g: &VertexPermutation) -> bool {
        self.chain.contains(g)
    }

    pub fn elements(&self) -> Vec<VertexPermutation> {
        self.chain.elements()
    }
}

/// Joint color refinement of two complexes; returns per-vertex colors with
/// a shared palette. Colors start from (degree, incident maximal rank
/// multiset) and are refined by neighbor color multisets until stable.
fn joint_colors(a: &Complex, b: &Complex) -> (Vec<usize>, Vec<usize>) {
    fn initial(x: &Complex) -> Vec<(usize, Vec<usize>)> {
        let adj = x.adjacency();
        x.vertices()
            .map(|v| {
                let deg = adj[v.index()].iter().filter(|&&e| e).count();
                let mut ranks: Vec<usize> = x
                    .maximal_simplices()
                    .iter()
                    .filter(|m| m.contains(v))
                    .map(|m| m.rank())
                    .collect();
                ranks.sort_unstable();
                (deg, ranks)
            })
            .collect()
    }
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();
    let sig_a = initial(a);
    let sig_b = initial(b);
    let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    for sig in sig_a.iter().chain(sig_b.iter()) {
        let next = palette.len();
        palette.entry(sig.clone()).or_insert(next);
    }
    let mut ca: Vec<usize> = sig_a.iter().map(|s| palette[s]).collect();
    let mut cb: Vec<usize> = sig_b.iter().map(|s| palette[s]).collect();

    loop {
        let refine = |colors: &[usize], adj: &[Vec<bool>]| -> Vec<(usize, Vec<usize>)> {
            colors
                .iter()
                .enumerate()
                .map(|(v, &c)| {
                    let mut around: Vec<usize> = adj[v]
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e)
                        .map(|(u, _)| colors[u])
                        .collect();
                    around.sort_unstable();
                    (c, around)
                })
                .collect()
        };
        let ra = refine(&ca, &adj_a);
        let rb = refine(&cb, &adj_b);
        let mut palette: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        for sig in ra.iter().chain(rb.iter()) {
            let next = palette.len();
            palette.entry(sig.clone()).or_insert(next);
        }
        let na: Vec<usize> = ra.iter().map(|s| palette[s]).collect();
        let nb: Vec<usize> = rb.iter().map(|s| palette[s]).collect();
        if na == ca && nb == cb {
            return (ca, cb);
        }
        ca = na;
        cb = nb;
    }
}

/// Enumerates simplicial bijections from `src` onto `dst`, invoking the
/// callback on each one. With `first_only` the search stops at the first
/// hit.
fn search_bijections(
    src: &Complex,
    dst: &Complex,
    first_only: bool,
    mut on_found: impl FnMut(&VertexPermutation),
) {
    if src.vertex_count() != dst.vertex_count()
        || src.maximal_simplices().len() != dst.maximal_simplices().len()
    {
        return;
    }
    let mut src_ranks: Vec<usize> = src.maximal_simplices().iter().map(|m| m.rank()).collect();
    let mut dst_ranks: Vec<usize> = dst.maximal_simplices().iter().map(|m| m.rank()).collect();
    src_ranks.sort_unstable();
    dst_ranks.sort_unstable();
    if src_ranks != dst_ranks {
        return;
    }
    let (colors_src, colors_dst) = joint_colors(src, dst);
    let mut sorted_src = colors_src.clone();
    let mut sorted_dst = colors_dst.clone();
    sorted_src.sort_unstable();
    sorted_dst.sort_unstable();
    if sorted_src != sorted_dst {
        return;
    }

    let n = src.vertex_count();
    let adj_src = src.adjacency();
    let adj_dst = dst.adjacency();
    let mut image = vec![u32::MAX; n];
    let mut used = vec![false; n];
    let mut found = false;

    fn rec(
        v: usize,
        n: usize,
        src: &Complex,
        dst: &Complex,
        adj_src: &[Vec<bool>],
        adj_dst: &[Vec<bool>],
        colors_src: &[usize],
        colors_dst: &[usize],
        image: &mut Vec<u32>,
        used: &mut Vec<bool>,
        first_only: bool,
        found: &mut bool,
        on_found: &mut impl FnMut(&VertexPermutation),
    ) {
        if *found && first_only {
            return;
        }
        if v == n {
            let perm = VertexPermutation::from_images(image.clone()).expect("bijection");
            let ok = src.maximal_simplices().iter().all(|m| {
                dst.maximal_simplices()
                    .binary_search(&perm.apply_simplex(m))
                    .is_ok()
            });
            if ok {
                *found = true;
                on_found(&perm);
            }
            return;
        }
        for w in 0..n {
            if used[w] || colors_dst[w] != colors_src[v] {
                continue;
            }
            let consistent = (0..v).all(|u| adj_src[u][v] == adj_dst[image[u] as usize][w]);
            if !consistent {
                continue;
            }
            image[v] = w as u32;
            used[w] = true;
            rec(
                v + 1,
                n,
                src,
                dst,
                adj_src,
                adj_dst,
                colors_src,
                colors_dst,
                image,
                used,
                first_only,
                found,
                on_found,
            );
            image[v] = u32::MAX;
            used[w] = false;
            if *found && first_only {
                return;
            }
        }
    }

    rec(
        0,
        n,
        src,
        dst,
        &adj_src,
        &adj_dst,
        &colors_src,
        &colors_dst,
        &mut image,
        &mut used,
        first_only,
        &mut found,
        &mut on_found,
    );
}

/// Default ceiling on the vertex count of the automorphism search.
pub const AUT_VERTEX_CAP: usize = 256;

/// The full simplicial automorphism group of `x`.
pub fn automorphism_group(x: &Complex) -> Result<PermutationGroup> {
    if x.vertex_count() > AUT_VERTEX_CAP {
        return Err(Error::VertexCapExceeded {
            cap: AUT_VERTEX_CAP,
        });
    }
    let mut elements = Vec::new();
    search_bijections(x, x, false, |perm| elements.push(perm.clone()));
    let chain = StabChain::from_elements(x.vertex_count(), elements);
    let generators = chain.strong_generators();
    Ok(PermutationGroup { generators, chain })
}

/// First simplicial isomorphism from `x` onto `y`, as label pairs.
pub fn isomorphism(x: &Complex, y: &Complex) -> Option<Vec<(String, String)>> {
    let mut hit: Option<VertexPermutation> = None;
    search_bijections(x, y, true, |perm| {
        if hit.is_none() {
            hit = Some(perm.clone());
        }
    });
    hit.map(|perm| {
        (0..x.vertex_count())
            .map(|i| {
                (
                    x.label(VertexId(i as u32)).to_string(),
                    y.label(VertexId(perm.images()[i])).to_string(),
                )
            })
            .collect()
    })
}

pub fn are_isomorphic(x: &Complex, y: &Complex) -> bool {
    isomorphism(x, y).is_some()
}

/// The transfer of an automorphism of `x` to its nerve: the nerve vertex of
/// a maximal simplex K goes to the nerve vertex of phi(K).
pub fn omega(
    x: &Complex,
    nerve: &NerveComplex,
    phi: &VertexPermutation,
) -> Result<VertexPermutation> {
    if !phi.is_automorphism(x) {
        return Err(Error::NotAnAutomorphism {
            reason: "the map does not permute the maximal simplices".into(),
        });
    }
    let n = nerve.nerve.vertex_count();
    let mut map = vec![0u32; n];
    for v in nerve.nerve.vertices() {
        let base = nerve.base_of(v);
        let image = phi.apply_simplex(base);
        let w = nerve.nerve_vertex(&image).ok_or_else(|| {
            Error::Internal("automorphism image of a maximal simplex is not maximal".into())
        })?;
        map[v.index()] = w.0;
    }
    let transferred = VertexPermutation::from_images(map)
        .ok_or_else(|| Error::Internal("transferred map is not a bijection".into()))?;
    if !transferred.is_automorphism(&nerve.nerve) {
        return Err(Error::Internal(
            "transferred map is not simplicial on the nerve".into(),
        ));
    }
    Ok(transferred)
}

/// Inverse transfer: resolves g(sigma(x)) = sigma(y) and maps x to y. Needs
/// both reconstruction conditions; verifies the round trip on every nerve
/// vertex before returning.
pub fn omega_inverse(
    x: &Complex,
    nerve: &NerveComplex,
    g: &VertexPermutation,
    cap: FaceCap,
) -> Result<VertexPermutation> {
    let report = nerve::check_conditions(x, cap);
    if !report.both_hold() {
        return Err(Error::ConditionsFail {
            reason: format!("{:?}", report),
        });
    }
    if !g.is_automorphism(&nerve.nerve) {
        return Err(Error::NotAnAutomorphism {
            reason: "the given map is not an automorphism of the nerve".into(),
        });
    }
    let mut map = vec![0u32; x.vertex_count()];
    for v in x.vertices() {
        let members = nerve::sigma(x, v).members;
        // g(sigma(v)) is a family of maximal simplices; its intersection is
        // a single vertex once both conditions hold.
        let mut common: Option<Vec<VertexId>> = None;
        for &i in &members {
            let nerve_v = nerve
                .nerve_vertex(&x.maximal_simplices()[i])
                .expect("maximal simplices are nerve vertices");
            let image_base = nerve.base_of(g.apply(nerve_v));
            common = Some(match common {
                None => image_base.vertices().to_vec(),
                Some(mut c) => {
                    c.retain(|u| image_base.contains(*u));
                    c
                }
            });
        }
        let common = common.expect("sigma is non-empty");
        if common.len() != 1 {
            return Err(Error::Internal(format!(
                "g(sigma({})) does not resolve to a single vertex",
                x.label(v)
            )));
        }
        map[v.index()] = common[0].0;
    }
    let phi = VertexPermutation::from_images(map).ok_or_else(|| {
        Error::Internal("resolved inverse transfer is not a bijection".into())
    })?;
    if !phi.is_automorphism(x) {
        return Err(Error::Internal(
            "resolved inverse transfer is not simplicial".into(),
        ));
    }
    let back = omega(x, nerve, &phi)?;
    if &back != g {
        return Err(Error::Internal(
            "round trip omega(omega_inverse(g)) differs from g".into(),
        ));
    }
    Ok(phi)
}

/// Side-by-side report on Aut(X) and Aut(N(X)).
pub struct CompareAutReport {
    pub aut_order: BigUint,
    pub nerve_aut_order: BigUint,
    pub conditions: nerve::ConditionReport,
    /// Under both conditions: transfer is a verified order-preserving
    /// bijection on generators.
    pub omega_bijective: Option<bool>,
    /// Under separation only: transfer verified injective by enumeration.
    pub omega_injective: Option<bool>,
    pub orders_match: bool,
}

const ENUMERATION_LIMIT: u64 = 100_000;

pub fn compare_aut(x: &Complex, cap: FaceCap) -> Result<CompareAutReport> {
    let conditions = nerve::check_conditions(x, cap);
    let nerve = nerve::nerve_of_maximal(x, cap)?;
    let aut = automorphism_group(x)?;
    let nerve_aut = automorphism_group(&nerve.nerve)?;
    let orders_match = aut.order() == nerve_aut.order();

    let mut omega_bijective = None;
    let mut omega_injective = None;
    if conditions.both_hold() {
        let mut ok = orders_match;
        for gen in &aut.generators {
            let image = omega(x, &nerve, gen)?;
            if !nerve_aut.contains(&image) {
                ok = false;
                break;
            }
            let back = omega_inverse(x, &nerve, &image, cap)?;
            if &back != gen {
                ok = false;
                break;
            }
        }
        for gen in &nerve_aut.generators {
            let pre = omega_inverse(x, &nerve, gen, cap)?;
            let image = omega(x, &nerve, &pre)?;
            if &image != gen {
                ok = false;
                break;
            }
        }
        omega_bijective = Some(ok);
    } else if conditions.separation_holds()
        && aut.order() <= BigUint::from(ENUMERATION_LIMIT)
    {
        let mut images = BTreeSet::new();
        let mut injective = true;
        for e in aut.elements() {
            let image = omega(x, &nerve, &e)?;
            if !images.insert(image.images().to_vec()) {
                injective = false;
                break;
            }
        }
        omega_injective = Some(injective);
    }

    Ok(CompareAutReport {
        aut_order: aut.order(),
        nerve_aut_order: nerve_aut.order(),
        conditions,
        omega_bijective,
        omega_injective,
        orders_match,
    })
}
