//! Integer simplicial homology via Smith normal form.
//!
//! Unreduced homology over the integers: betti_0 counts connected
//! components and torsion is read off the invariant factors of the next
//! boundary map. Everything runs over `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::complex::{Complex, FaceCap, Simplex};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::nerve;
use crate::IntMatrix;

/// Canonically ordered simplices per topological dimension plus the
/// boundary maps between consecutive chain groups.
pub struct ChainData {
    /// `simplices[d]` lists the rank d+1 simplices in canonical order.
    pub simplices: Vec<Vec<Simplex>>,
    /// `boundaries[d]` is the matrix of the boundary map from dimension
    /// d+1 chains to dimension d chains: rows index dimension-d simplices,
    /// columns index dimension-(d+1) simplices.
    pub boundaries: Vec<IntMatrix>,
}

/// Builds every boundary matrix of the complex and asserts that composing
/// consecutive ones gives zero.
pub fn boundary_matrices(x: &Complex, cap: FaceCap) -> Result<ChainData> {
    let faces = x.all_faces(cap)?;
    let top = faces.iter().map(|f| f.rank()).max().unwrap_or(0);
    let mut simplices: Vec<Vec<Simplex>> = vec![Vec::new(); top];
    for f in faces {
        simplices[f.dim()].push(f);
    }
    // Canonical order within each dimension comes from the sorted face set.
    let mut boundaries = Vec::new();
    for d in 1..top {
        let rows = simplices[d - 1].len();
        let cols = simplices[d].len();
        let mut m = Mat::zeros(rows, cols);
        for (j, s) in simplices[d].iter().enumerate() {
            for (drop, _) in s.vertices().iter().enumerate() {
                let face: Vec<_> = s
                    .vertices()
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != drop)
                    .map(|(_, v)| *v)
                    .collect();
                let face = Simplex::from_sorted(face);
                let i = simplices[d - 1]
                    .binary_search(&face)
                    .expect("faces are downward closed");
                let sign = if drop % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                m[(i, j)] = sign;
            }
        }
        boundaries.push(m);
    }
    for w in boundaries.windows(2) {
        if !w[0].mul(&w[1]).is_zero() {
            return Err(Error::Internal(
                "boundary composition is not zero".into(),
            ));
        }
    }
    Ok(ChainData {
        simplices,
        boundaries,
    })
}

/// Betti number and torsion coefficients in one degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

/// Homology in every degree up to the dimension of the complex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomologyProfile {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    /// Equality with zero-padding: degrees above either top dimension count
    /// as zero groups.
    pub fn same_as(&self, other: &HomologyProfile) -> bool {
        let top = self.groups.len().max(other.groups.len());
        let zero = HomologyGroup {
            betti: 0,
            torsion: Vec::new(),
        };
        (0..top).all(|d| {
            self.groups.get(d).unwrap_or(&zero) == other.groups.get(d).unwrap_or(&zero)
        })
    }

    pub fn betti_vector(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.betti).collect()
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.groups
                .iter()
                .enumerate()
                .map(|(d, g)| {
                    json!({
                        "degree": d,
                        "betti": g.betti,
                        "torsion": g.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

pub fn homology_profile(x: &Complex, cap: FaceCap) -> Result<HomologyProfile> {
    let chain = boundary_matrices(x, cap)?;
    let top = chain.simplices.len();
    let factors: Vec<Vec<BigInt>> = chain
        .boundaries
        .iter()
        .map(|m| m.smith_invariant_factors())
        .collect();
    let rank = |d: usize| -> usize {
        // rank of the boundary map leaving dimension d
        if d == 0 || d > factors.len() {
            0
        } else {
            factors[d - 1].len()
        }
    };
    let mut groups = Vec::with_capacity(top);
    for d in 0..top {
        let n_d = chain.simplices[d].len();
        let betti = n_d - rank(d) - rank(d + 1);
        let torsion: Vec<BigInt> = if d < factors.len() {
            factors[d]
                .iter()
                .filter(|f| **f > BigInt::one())
                .cloned()
                .collect()
        } else {
            Vec::new()
        };
        groups.push(HomologyGroup { betti, torsion });
    }
    Ok(HomologyProfile { groups })
}

/// Outcome of the nerve homology certificate.
pub struct CertificateReport {
    pub good_cover_checked_pairs: usize,
    pub x_profile: HomologyProfile,
    pub nerve_profile: HomologyProfile,
}

/// Certifies the homology consequence of the nerve theorem on a finite
/// complex: the cover by maximal simplices is a good cover (every non-empty
/// intersection is a simplex, hence contractible), so X and N(X) must have
/// identical homology. A mismatch is a hard failure.
pub fn nerve_homology_certificate(x: &Complex, cap: FaceCap) -> Result<CertificateReport> {
    let maximal = x.maximal_simplices();
    let mut checked = 0;
    for (i, a) in maximal.iter().enumerate() {
        for b in maximal.iter().skip(i + 1) {
            let common = a.intersect(b);
            if !common.is_empty() {
                let s = Simplex::from_sorted(common);
                if !x.is_simplex(&s) {
                    return Err(Error::TheoremViolation(format!(
                        "intersection {} of two maximal simplices is not a simplex",
                        x.render_simplex(&s)
                    )));
                }
            }
            checked += 1;
        }
    }

    let x_profile = homology_profile(x, cap)?;
    let n = nerve::nerve_of_maximal(x, cap)?;
    let nerve_profile = homology_profile(&n.nerve, cap)?;
    if !x_profile.same_as(&nerve_profile) {
        return Err(Error::TheoremViolation(format!(
            "homology profiles differ: X has betti {:?}, N(X) has betti {:?}",
            x_profile.betti_vector(),
            nerve_profile.betti_vector()
        )));
    }
    Ok(CertificateReport {
        good_cover_checked_pairs: checked,
        x_profile,
        nerve_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn boundary_examples() {
        let cap = FaceCap::default();
        let edge = Complex::build(&[vec!["a", "b"]], false).unwrap();
        let chain = boundary_matrices(&edge, cap).unwrap();
        assert_eq!(chain.boundaries.len(), 1);
        let d1 = &chain.boundaries[0];
        assert_eq!((d1.rows(), d1.cols()), (2, 1));
        assert_eq!(d1[(0, 0)], big(-1));
        assert_eq!(d1[(1, 0)], big(1));

        let tri = fixtures::triangle_boundary();
        let chain = boundary_matrices(&tri, cap).unwrap();
        let d1 = &chain.boundaries[0];
        assert_eq!((d1.rows(), d1.cols()), (3, 3));
        for j in 0..3 {
            let col_sum: BigInt = (0..3).map(|i| d1[(i, j)].clone()).sum();
            assert_eq!(col_sum, big(0));
        }

        let oct = fixtures::octahedron();
        let chain = boundary_matrices(&oct, cap).unwrap();
        let d2 = &chain.boundaries[1];
        assert_eq!((d2.rows(), d2.cols()), (12, 8));
        assert!(chain.boundaries[0].mul(d2).is_zero());
    }

    #[test]
    fn profile_examples() {
        let cap = FaceCap::default();
        let tri = fixtures::triangle_boundary();
        let p = homology_profile(&tri, cap).unwrap();
        assert_eq!(p.betti_vector(), vec![1, 1]);
        assert!(p.groups.iter().all(|g| g.torsion.is_empty()));

        let oct = fixtures::octahedron();
        let p = homology_profile(&oct, cap).unwrap();
        assert_eq!(p.betti_vector(), vec![1, 0, 1]);

        let single = fixtures::single_simplex(3);
        let p = homology_profile(&single, cap).unwrap();
        assert_eq!(p.betti_vector(), vec![1, 0, 0]);
        assert!(p.groups.iter().all(|g| g.torsion.is_empty()));
    }

    #[test]
    fn projective_plane_torsion() {
        let cap = FaceCap::default();
        let rp2 = fixtures::projective_plane();
        let p = homology_profile(&rp2, cap).unwrap();
        assert_eq!(p.betti_vector(), vec![1, 0, 0]);
        assert_eq!(p.groups[1].torsion, vec![big(2)]);
        assert!(p.groups[0].torsion.is_empty());
        assert!(p.groups[2].torsion.is_empty());
    }

    #[test]
    fn certificate_examples() {
        let cap = FaceCap::default();
        for x in [
            fixtures::triangle_boundary(),
            fixtures::octahedron(),
            fixtures::path_complex(),
            fixtures::projective_plane(),
            fixtures::spoke_counterexample(),
        ] {
            let report = nerve_homology_certificate(&x, cap).unwrap();
            assert!(report.x_profile.same_as(&report.nerve_profile));
        }

        let path = fixtures::path_complex();
        let report = nerve_homology_certificate(&path, cap).unwrap();
        assert_eq!(report.x_profile.betti_vector(), vec![1, 0]);
    }

    #[test]
    fn homology_is_relabeling_invariant() {
        let cap = FaceCap::default();
        let oct = fixtures::octahedron();
        let mapping = [
            ("a", "z1"),
            ("b", "z2"),
            ("c", "z3"),
            ("d", "z4"),
            ("e", "z5"),
            ("f", "z6"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        let relabeled = oct.relabel(&mapping).unwrap();
        let p1 = homology_profile(&oct, cap).unwrap();
        let p2 = homology_profile(&relabeled, cap).unwrap();
        assert!(p1.same_as(&p2));
    }
}
