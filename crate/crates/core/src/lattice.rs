//! Sublattices of the rank-m integer lattice: canonical Hermite bases,
//! membership, canonical coset representatives, and exact intersections.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::{Int, IntMatrix};

/// A sublattice of Z^ambient, held by its canonical Hermite basis (no zero
/// rows, positive pivots, reduced entries above pivots). Two lattices are
/// equal iff their bases are equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LatticeSubgroup {
    ambient: usize,
    basis: IntMatrix,
}

impl LatticeSubgroup {
    pub fn from_generators(generators: IntMatrix) -> LatticeSubgroup {
        LatticeSubgroup {
            ambient: generators.cols(),
            basis: generators.hermite(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>, ambient: usize) -> LatticeSubgroup {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        LatticeSubgroup::from_generators(Mat::from_rows(rows, ambient))
    }

    pub fn zero(ambient: usize) -> LatticeSubgroup {
        LatticeSubgroup {
            ambient,
            basis: Mat::from_rows(Vec::new(), ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    fn pivot_cols(&self) -> Vec<usize> {
        (0..self.basis.rows())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .position(|e| !e.is_zero())
                    .expect("canonical basis has no zero rows")
            })
            .collect()
    }

    /// Membership via back-substitution on the Hermite basis.
    pub fn contains(&self, v: &[Int]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let mut rest = v.to_vec();
        for (i, col) in self.pivot_cols().into_iter().enumerate() {
            let pivot = &self.basis[(i, col)];
            let (q, r) = rest[col].div_rem(pivot);
            if !r.is_zero() {
                return Ok(false);
            }
            for j in 0..self.ambient {
                let delta = &q * &self.basis[(i, j)];
                rest[j] -= delta;
            }
        }
        Ok(rest.iter().all(|e| e.is_zero()))
    }

    /// Canonical coset representative: pivot coordinates reduced into
    /// `[0, pivot)`. Two vectors get the same representative exactly when
    /// they differ by a lattice element.
    pub fn reduce(&self, v: &[Int]) -> Result<Vec<Int>> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let mut rest = v.to_vec();
        for (i, col) in self.pivot_cols().into_iter().enumerate() {
            let pivot = &self.basis[(i, col)];
            let q = rest[col].div_floor(pivot);
            for j in 0..self.ambient {
                let delta = &q * &self.basis[(i, j)];
                rest[j] -= delta;
            }
        }
        Ok(rest)
    }

    /// Exact intersection: kernel of the stacked bases picks out the
    /// coefficient rows whose combinations agree in both lattices.
    pub fn intersect(&self, other: &LatticeSubgroup) -> Result<LatticeSubgroup> {
        if self.ambient != other.ambient {
            return Err(Error::RankMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        let ra = self.basis.rows();
        let rb = other.basis.rows();
        if ra == 0 || rb == 0 {
            return Ok(LatticeSubgroup::zero(self.ambient));
        }
        let mut stacked = Vec::with_capacity(ra + rb);
        for i in 0..ra {
            stacked.push(self.basis.row(i).to_vec());
        }
        for i in 0..rb {
            stacked.push(other.basis.row(i).iter().map(|e| -e.clone()).collect());
        }
        let stacked = Mat::from_rows(stacked, self.ambient);
        let kernel = stacked.left_kernel();
        let mut points = Vec::with_capacity(kernel.rows());
        for k in 0..kernel.rows() {
            let coeffs = &kernel.row(k)[..ra];
            let mut point = vec![BigInt::zero(); self.ambient];
            for (c, i) in coeffs.iter().zip(0..ra) {
                for j in 0..self.ambient {
                    let delta = c * &self.basis[(i, j)];
                    point[j] += delta;
                }
            }
            points.push(point);
        }
        Ok(LatticeSubgroup::from_generators(Mat::from_rows(
            points,
            self.ambient,
        )))
    }
}

/// gA = hA exactly when g - h lies in A.
pub fn coset_equal(g: &[Int], h: &[Int], a: &LatticeSubgroup) -> Result<bool> {
    if g.len() != h.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: h.len(),
        });
    }
    let diff: Vec<Int> = g.iter().zip(h).map(|(x, y)| x - y).collect();
    a.contains(&diff)
}
