//! Dense integer matrices, generic over the scalar, with Hermite and Smith
//! normal forms.
//!
//! The scalar only needs the `num` integer traits, so the same code runs on
//! `i64` for small tests and on `BigInt` wherever entries can grow. The
//! shipped alias is [`crate::IntMatrix`] over [`crate::Int`]; arbitrary
//! precision is mandatory for homology and lattice work because elimination
//! intermediates grow quickly.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Scalar bound for all matrix algorithms in this crate.
pub trait Scalar: Integer + Signed + Clone + fmt::Debug + fmt::Display {}

impl<T: Integer + Signed + Clone + fmt::Debug + fmt::Display> Scalar for T {}

/// Row-major dense matrix. `rows == 0` is allowed and keeps `cols` as the
/// ambient width.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: (0..rows * cols).map(|_| T::zero()).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged rows");
        }
        Mat {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + add;
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }

    /// row[dst] -= q * row[src]
    fn sub_scaled_row(&mut self, dst: usize, src: usize, q: &T) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = q.clone() * self[(src, j)].clone();
            self[(dst, j)] = self[(dst, j)].clone() - delta;
        }
    }

    /// Canonical row-style Hermite normal form together with a unimodular
    /// transform U with `U * self == H`. Zero rows of H sink to the bottom.
    /// Pivots are positive and entries above each pivot are reduced into
    /// `[0, pivot)`.
    pub fn hermite_with_transform(&self) -> (Mat<T>, Mat<T>) {
        let mut h = self.clone();
        let mut u = Mat::identity(self.rows);
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == h.rows {
                break;
            }
            loop {
                let best = (pivot_row..h.rows)
                    .filter(|&i| !h[(i, col)].is_zero())
                    .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()).then(a.cmp(&b)));
                let Some(best) = best else { break };
                h.swap_rows(pivot_row, best);
                u.swap_rows(pivot_row, best);
                if h[(pivot_row, col)].is_negative() {
                    h.negate_row(pivot_row);
                    u.negate_row(pivot_row);
                }
                let pivot = h[(pivot_row, col)].clone();
                let mut clean = true;
                for i in pivot_row + 1..h.rows {
                    let q = h[(i, col)].div_floor(&pivot);
                    h.sub_scaled_row(i, pivot_row, &q);
                    u.sub_scaled_row(i, pivot_row, &q);
                    if !h[(i, col)].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    // Reduce entries above the pivot into [0, pivot).
                    for i in 0..pivot_row {
                        let q = h[(i, col)].div_floor(&pivot);
                        h.sub_scaled_row(i, pivot_row, &q);
                        u.sub_scaled_row(i, pivot_row, &q);
                    }
                    pivot_row += 1;
                    break;
                }
            }
        }
        (h, u)
    }

    /// Canonical Hermite normal form with zero rows dropped.
    pub fn hermite(&self) -> Mat<T> {
        let (h, _) = self.hermite_with_transform();
        let rows: Vec<Vec<T>> = (0..h.rows)
            .filter(|&i| h.row(i).iter().any(|e| !e.is_zero()))
            .map(|i| h.row(i).to_vec())
            .collect();
        Mat::from_rows(rows, self.cols)
    }

    /// Basis of the left kernel: all integer rows u with `u * self == 0`.
    pub fn left_kernel(&self) -> Mat<T> {
        let (h, u) = self.hermite_with_transform();
        let rows: Vec<Vec<T>> = (0..h.rows)
            .filter(|&i| h.row(i).iter().all(|e| e.is_zero()))
            .map(|i| u.row(i).to_vec())
            .collect();
        Mat::from_rows(rows, self.rows)
    }

    pub fn rank(&self) -> usize {
        self.hermite().rows
    }

    /// Invariant factors d_1 | d_2 | ... | d_r of the Smith normal form.
    /// Pivoting always picks a minimal non-zero absolute value, tie-broken
    /// by (row, col), to limit entry growth.
    pub fn smith_invariant_factors(&self) -> Vec<T> {
        let mut m = self.clone();
        let bound = m.rows.min(m.cols);
        let mut factors = Vec::new();
        let mut k = 0;
        while k < bound {
            let Some((pi, pj)) = min_abs_entry(&m, k) else {
                break;
            };
            m.swap_rows(k, pi);
            swap_cols(&mut m, k, pj);
            loop {
                // Euclidean descent on column k, then on row k. Every swap
                // strictly shrinks the pivot, so this terminates.
                loop {
                    let pivot = m[(k, k)].clone();
                    let mut residue = None;
                    for i in k + 1..m.rows {
                        if !m[(i, k)].is_zero() {
                            let q = m[(i, k)].div_floor(&pivot);
                            m.sub_scaled_row(i, k, &q);
                            if !m[(i, k)].is_zero() {
                                residue = Some(i);
                            }
                        }
                    }
                    match residue {
                        Some(i) => m.swap_rows(k, i),
                        None => break,
                    }
                }
                loop {
                    let pivot = m[(k, k)].clone();
                    let mut residue = None;
                    for j in k + 1..m.cols {
                        if !m[(k, j)].is_zero() {
                            let q = m[(k, j)].div_floor(&pivot);
                            sub_scaled_col(&mut m, j, k, &q);
                            if !m[(k, j)].is_zero() {
                                residue = Some(j);
                            }
                        }
                    }
                    match residue {
                        Some(j) => swap_cols(&mut m, k, j),
                        None => break,
                    }
                }
                let col_clear = (k + 1..m.rows).all(|i| m[(i, k)].is_zero());
                let row_clear = (k + 1..m.cols).all(|j| m[(k, j)].is_zero());
                if col_clear && row_clear {
                    break;
                }
            }
            if m[(k, k)].is_negative() {
                m.negate_row(k);
            }
            // Enforce the divisibility chain into the remaining block.
            let pivot = m[(k, k)].clone();
            let offender = (k + 1..m.rows)
                .flat_map(|i| (k + 1..m.cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[(i, j)].mod_floor(&pivot).is_zero());
            match offender {
                Some((i, _)) => {
                    // Fold the offending row into row k and redo the step.
                    for j in 0..m.cols {
                        let add = m[(i, j)].clone();
                        m[(k, j)] = m[(k, j)].clone() + add;
                    }
                }
                None => {
                    factors.push(m[(k, k)].clone());
                    k += 1;
                }
            }
        }
        factors
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Display for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar + From<i64>> Mat<T> {
    /// Convenience constructor from literal rows.
    pub fn from_i64(rows: &[&[i64]], cols: usize) -> Self {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&e| T::from(e)).collect())
                .collect(),
            cols,
        )
    }
}

fn min_abs_entry<T: Scalar>(m: &Mat<T>, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..m.rows() {
        for j in k..m.cols() {
            if m[(i, j)].is_zero() {
                continue;
            }
            best = match best {
                None => Some((i, j)),
                Some((bi, bj)) => {
                    if m[(i, j)].abs() < m[(bi, bj)].abs() {
                        Some((i, j))
                    } else {
                        Some((bi, bj))
                    }
                }
            };
        }
    }
    best
}

fn swap_cols<T: Scalar>(m: &mut Mat<T>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = x;
    }
}

/// col[dst] -= q * col[src]
fn sub_scaled_col<T: Scalar>(m: &mut Mat<T>, dst: usize, src: usize, q: &T) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let delta = q.clone() * m[(i, src)].clone();
        m[(i, dst)] = m[(i, dst)].clone() - delta;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type M = Mat<BigInt>;

    /// Independent oracle: invariant factors via determinant divisors,
    /// d_k = gcd of all k-by-k minors, f_k = d_k / d_{k-1}.
    pub fn minor_gcd_factors(m: &M) -> Vec<BigInt> {
        fn minors(m: &M, k: usize) -> Vec<BigInt> {
            fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
                let mut out = Vec::new();
                let mut cur = Vec::new();
                fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                    if cur.len() == k {
                        out.push(cur.clone());
                        return;
                    }
                    for i in start..n {
                        cur.push(i);
                        rec(i + 1, n, k, cur, out);
                        cur.pop();
                    }
                }
                rec(0, n, k, &mut cur, &mut out);
                out
            }
            fn det(rows: &[Vec<BigInt>]) -> BigInt {
                let n = rows.len();
                if n == 1 {
                    return rows[0][0].clone();
                }
                let mut total = BigInt::from(0);
                for j in 0..n {
                    let sub: Vec<Vec<BigInt>> = rows[1..]
                        .iter()
                        .map(|r| {
                            r.iter()
                                .enumerate()
                                .filter(|(c, _)| *c != j)
                                .map(|(_, e)| e.clone())
                                .collect()
                        })
                        .collect();
                    let term = &rows[0][j] * det(&sub);
                    if j % 2 == 0 {
                        total += term;
                    } else {
                        total -= term;
                    }
                }
                total
            }
            let mut out = Vec::new();
            for ri in combos(m.rows(), k) {
                for ci in combos(m.cols(), k) {
                    let sub: Vec<Vec<BigInt>> = ri
                        .iter()
                        .map(|&i| ci.iter().map(|&j| m[(i, j)].clone()).collect())
                        .collect();
                    out.push(det(&sub));
                }
            }
            out
        }
        use num_integer::Integer as _;
        let mut factors = Vec::new();
        let mut prev = BigInt::from(1);
        for k in 1..=m.rows().min(m.cols()) {
            let g = minors(m, k)
                .into_iter()
                .fold(BigInt::from(0), |acc, d| acc.gcd(&d));
            if g == BigInt::from(0) {
                break;
            }
            factors.push(&g / &prev);
            prev = g;
        }
        factors
    }

    #[test]
    fn snf_examples() {
        let m = M::from_i64(&[&[2, 0], &[0, 3]], 2);
        assert_eq!(m.smith_invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(minor_gcd_factors(&m), vec![BigInt::from(1), BigInt::from(6)]);

        let m = M::from_i64(&[&[1, 2], &[3, 4]], 2);
        assert_eq!(m.smith_invariant_factors(), vec![BigInt::from(1), BigInt::from(2)]);
        assert_eq!(minor_gcd_factors(&m), vec![BigInt::from(1), BigInt::from(2)]);

        let m = M::zeros(3, 2);
        assert_eq!(m.smith_invariant_factors(), Vec::<BigInt>::new());
    }

    #[test]
    fn snf_matches_minor_oracle_randomly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let rows_data: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-6i64..=6))).collect())
                .collect();
            let m = M::from_rows(rows_data, cols);
            assert_eq!(m.smith_invariant_factors(), minor_gcd_factors(&m), "{m}");
        }
    }

    #[test]
    fn snf_divisibility_chain() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..30 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect())
                .collect();
            let m = M::from_rows(data, cols);
            let f = m.smith_invariant_factors();
            for w in f.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "{:?}", f);
            }
            assert!(f.iter().all(|d| d > &BigInt::from(0)));
        }
    }

    #[test]
    fn hnf_examples() {
        let m = M::from_i64(&[&[2, 0], &[0, 3]], 2);
        assert_eq!(m.hermite(), m);

        let m = M::from_i64(&[&[1, 2], &[3, 4]], 2);
        assert_eq!(m.hermite(), M::from_i64(&[&[1, 0], &[0, 2]], 2));

        let m = M::from_i64(&[&[0, 0]], 2);
        assert_eq!(m.hermite().rows(), 0);
    }

    #[test]
    fn hnf_idempotent_and_span_canonical() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..30 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let data: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-5i64..=5))).collect())
                .collect();
            let m = M::from_rows(data, cols);
            let h = m.hermite();
            assert_eq!(h.hermite(), h);

            // Unimodular row operations keep the HNF.
            let mut shuffled = m.clone();
            if shuffled.rows() >= 2 {
                let q = BigInt::from(rng.gen_range(-3i64..=3));
                shuffled.sub_scaled_row(0, shuffled.rows() - 1, &q);
                shuffled.swap_rows(0, shuffled.rows() - 1);
            }
            assert_eq!(shuffled.hermite(), h);
        }
    }

    #[test]
    fn transform_reproduces_hnf() {
        let m = M::from_i64(&[&[4, 6, 2], &[6, 9, 3], &[2, 3, 5]], 3);
        let (h, u) = m.hermite_with_transform();
        assert_eq!(u.mul(&m), h);
    }

    #[test]
    fn kernel_annihilates() {
        let m = M::from_i64(&[&[1, 2], &[2, 4], &[3, 6]], 2);
        let k = m.left_kernel();
        assert_eq!(k.rows(), 2);
        assert!(k.mul(&m).is_zero());
    }

    #[test]
    fn generic_over_i64() {
        let m: Mat<i64> = Mat::from_i64(&[&[1, 2], &[3, 4]], 2);
        assert_eq!(m.smith_invariant_factors(), vec![1, 2]);
        assert_eq!(m.rank(), 2);
    }
}
