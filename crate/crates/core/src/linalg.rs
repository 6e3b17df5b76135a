//! Exact linear algebra over Z_q (q prime) and over the integers, plus the
//! floating-point Gram-Schmidt data the samplers consume.
//!
//! Mod-q paths use exact residue arithmetic with modular inverses; no
//! floating point enters elimination, rank, or particular solutions.
//! Gram-Schmidt runs in binary64 with explicit tolerances (an exact
//! rational mode for tiny dimensions sits behind the `exact-gs` feature).


use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_core::RngCore;

use crate::error::Error;
use crate::kernel::{axpy_sub, dot, mulmod, norm2, reduce_i64};

/// Matrix over Z_q, entries stored row-major as residues in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZqMatrix {
    rows: usize,
    cols: usize,
    q: u64,
    data: Vec<u64>,
}

impl ZqMatrix {
    pub fn zero(rows: usize, cols: usize, q: u64) -> Self {
        ZqMatrix {
            rows,
            cols,
            q,
            data: vec![0; rows * cols],
        }
    }

    /// Build from row-major entries, reducing mod q.
    pub fn from_rows(rows: usize, cols: usize, q: u64, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        ZqMatrix {
            rows,
            cols,
            q,
            data: entries.iter().map(|&e| reduce_i64(e, q)).collect(),
        }
    }

    /// Uniformly random matrix (rejection-sampled unbiased residues).
    pub fn uniform(rows: usize, cols: usize, q: u64, rng: &mut dyn RngCore) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(uniform_residue(q, rng));
        }
        ZqMatrix { rows, cols, q, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.q);
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.entry(r, c)).collect()
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn transpose(&self) -> ZqMatrix {
        let mut out = ZqMatrix::zero(self.cols, self.rows, self.q);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.entry(r, c));
            }
        }
        out
    }

    /// Negate column `c` mod q in place.
    pub fn negate_column(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = self.entry(r, c);
            let nv = if v == 0 { 0 } else { self.q - v };
            self.set(r, c, nv);
        }
    }

    /// `self * x mod q` for an integer vector `x`.
    pub fn mul_int_vec(&self, x: &[i64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let xr: Vec<u64> = x.iter().map(|&v| reduce_i64(v, self.q)).collect();
        self.mul_residue_vec(&xr)
    }

    /// `self * x mod q` for a residue vector `x`.
    pub fn mul_residue_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let q = self.q;
        let fast = (q as u128 - 1).pow(2).checked_mul(self.cols as u128)
            .map(|m| m < u64::MAX as u128)
            .unwrap_or(false);
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            if fast {
                let mut acc: u64 = 0;
                for (a, b) in row.iter().zip(x) {
                    acc += a * b;
                }
                out.push(acc % q);
            } else {
                let mut acc: u128 = 0;
                for (a, b) in row.iter().zip(x) {
                    acc = (acc + *a as u128 * *b as u128) % q as u128;
                }
                out.push(acc as u64);
            }
        }
        out
    }

    /// `self * t mod q` for an integer matrix `t` (column-major).
    pub fn mul_int_matrix(&self, t: &IntMatrix) -> ZqMatrix {
        assert_eq!(self.cols, t.rows());
        let mut out = ZqMatrix::zero(self.rows, t.cols(), self.q);
        let mut col_mod = vec![0u64; t.rows()];
        for c in 0..t.cols() {
            for (dst, src) in col_mod.iter_mut().zip(t.col(c)) {
                *dst = reduce_i64(*src, self.q);
            }
            let prod = self.mul_residue_vec(&col_mod);
            for (r, v) in prod.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Gaussian-elimination rank over Z_q (q prime).
    pub fn rank_mod_q(&self) -> usize {
        let mut work = self.data.clone();
        elimination_rank(&mut work, self.rows, self.cols, self.q)
    }

    /// Any integer vector `t` in `[0, q)^cols` with `self * t = u (mod q)`.
    pub fn solve_particular(&self, u: &[u64]) -> Result<Vec<u64>, Error> {
        if u.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: u.len(),
            });
        }
        let q = self.q;
        let acols = self.cols;
        let width = acols + 1;
        let mut aug = vec![0u64; self.rows * width];
        for r in 0..self.rows {
            aug[r * width..r * width + acols].copy_from_slice(self.row(r));
            aug[r * width + acols] = u[r] % q;
        }
        // reduced row echelon form
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0usize;
        for c in 0..acols {
            let Some(p) = (rank..self.rows).find(|&r| aug[r * width + c] != 0) else {
                continue;
            };
            if p != rank {
                for j in 0..width {
                    aug.swap(rank * width + j, p * width + j);
                }
            }
            let inv = mod_inverse(aug[rank * width + c], q);
            for j in c..width {
                aug[rank * width + j] = mulmod(aug[rank * width + j], inv, q);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = aug[r * width + c];
                if f == 0 {
                    continue;
                }
                for j in c..width {
                    let sub = mulmod(f, aug[rank * width + j], q);
                    let cur = aug[r * width + j];
                    aug[r * width + j] = (cur + q - sub) % q;
                }
            }
            pivots.push((rank, c));
            rank += 1;
        }
        for r in rank..self.rows {
            if aug[r * width + acols] != 0 {
                return Err(Error::NoSolution);
            }
        }
        let mut t = vec![0u64; acols];
        for (r, c) in pivots {
            t[c] = aug[r * width + acols];
        }
        Ok(t)
    }
}

fn elimination_rank(data: &mut [u64], rows: usize, cols: usize, q: u64) -> usize {
    let mut rank = 0usize;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| data[r * cols + c] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                data.swap(rank * cols + j, p * cols + j);
            }
        }
        let inv = mod_inverse(data[rank * cols + c], q);
        for j in c..cols {
            data[rank * cols + j] = mulmod(data[rank * cols + j], inv, q);
        }
        for r in rank + 1..rows {
            let f = data[r * cols + c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let sub = mulmod(f, data[rank * cols + j], q);
                let cur = data[r * cols + j];
                data[r * cols + j] = (cur + q - sub) % q;
            }
        }
        rank += 1;
    }
    rank
}

/// Modular inverse for `a != 0` mod prime `q` (extended Euclid).
pub fn mod_inverse(a: u64, q: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (q as i128, (a % q) as i128);
    while new_r != 0 {
        let quo = r / new_r;
        (t, new_t) = (new_t, t - quo * new_t);
        (r, new_r) = (new_r, r - quo * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of non-unit");
    (((t % q as i128) + q as i128) % q as i128) as u64
}

/// Unbiased uniform residue below `q`.
pub fn uniform_residue(q: u64, rng: &mut dyn RngCore) -> u64 {
    let zone = u64::MAX - (u64::MAX % q);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % q;
        }
    }
}

/// True iff the given vectors in Z_q^h are linearly independent.
pub fn is_linearly_independent(vectors: &[Vec<u64>], q: u64) -> bool {
    if vectors.is_empty() {
        return true;
    }
    let h = vectors[0].len();
    if vectors.iter().any(|v| v.len() != h) || vectors.len() > h {
        return false;
    }
    let rows = vectors.len();
    let mut data: Vec<u64> = Vec::with_capacity(rows * h);
    for v in vectors {
        data.extend(v.iter().map(|&e| e % q));
    }
    elimination_rank(&mut data, rows, h, q) == rows
}

/// Integer matrix, entries stored column-major (columns contiguous).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_columns(columns: &[Vec<i64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows);
            data.extend_from_slice(c);
        }
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[i64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, c: usize) -> &mut [i64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> i64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[c * self.rows + r] = v;
    }

    /// Max over columns of the Euclidean norm.
    pub fn matrix_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| {
                let s: f64 = self.col(c).iter().map(|&v| (v as f64) * (v as f64)).sum();
                libm::sqrt(s)
            })
            .fold(0.0, f64::max)
    }

    pub fn column_norm(&self, c: usize) -> f64 {
        libm::sqrt(self.col(c).iter().map(|&v| (v as f64) * (v as f64)).sum())
    }

    /// Plain integer product (checked arithmetic; intended for small sizes).
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for c in 0..other.cols {
            let oc = other.col(c);
            for r in 0..self.rows {
                let mut acc: i64 = 0;
                for t in 0..self.cols {
                    acc = acc
                        .checked_add(
                            self.entry(r, t)
                                .checked_mul(oc[t])
                                .expect("integer matrix product overflowed"),
                        )
                        .expect("integer matrix product overflowed");
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    pub fn det_bareiss(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<BigInt> = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                m.push(BigInt::from(self.entry(r, c)));
            }
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for kstep in 0..n - 1 {
            if m[kstep * n + kstep].is_zero() {
                let Some(p) = (kstep + 1..n).find(|&r| !m[r * n + kstep].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    m.swap(kstep * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in kstep + 1..n {
                for j in kstep + 1..n {
                    let num = &m[i * n + j] * &m[kstep * n + kstep]
                        - &m[i * n + kstep] * &m[kstep * n + j];
                    m[i * n + j] = num / &prev;
                }
                m[i * n + kstep] = BigInt::zero();
            }
            prev = m[kstep * n + kstep].clone();
        }
        let det = m[(n - 1) * n + (n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    /// If the matrix is orthogonal over the integers it is a signed
    /// permutation; returns `perm[c] = (row, sign)` per column, or None.
    pub fn signed_permutation(&self) -> Option<Vec<(usize, i64)>> {
        if self.rows != self.cols {
            return None;
        }
        let mut seen = vec![false; self.rows];
        let mut perm = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            let mut hit: Option<(usize, i64)> = None;
            for r in 0..self.rows {
                let v = self.entry(r, c);
                if v == 0 {
                    continue;
                }
                if v.abs() != 1 || hit.is_some() {
                    return None;
                }
                hit = Some((r, v));
            }
            let (r, s) = hit?;
            if seen[r] {
                return None;
            }
            seen[r] = true;
            perm.push((r, s));
        }
        Some(perm)
    }
}

/// Gram-Schmidt data: orthogonalized columns in binary64 plus their norms.
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    rows: usize,
    ncols: usize,
    /// Orthogonalized columns, column-major.
    cols: Vec<f64>,
    norms2: Vec<f64>,
}

impl GramSchmidt {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[f64] {
        &self.cols[c * self.rows..(c + 1) * self.rows]
    }

    pub fn norm2(&self, c: usize) -> f64 {
        self.norms2[c]
    }

    pub fn norm(&self, c: usize) -> f64 {
        libm::sqrt(self.norms2[c])
    }

    /// Max orthogonalized column norm.
    pub fn max_norm(&self) -> f64 {
        self.norms2
            .iter()
            .fold(0.0f64, |m, &v| m.max(v))
            .max(0.0)
            .sqrt_libm()
    }

    /// Flip row signs in place; a sign-diagonal acting from the left
    /// commutes with column-wise orthogonalization.
    pub fn flip_rows(&mut self, signs: &[i64]) {
        assert_eq!(signs.len(), self.rows);
        for c in 0..self.ncols {
            let col = &mut self.cols[c * self.rows..(c + 1) * self.rows];
            for (v, &s) in col.iter_mut().zip(signs) {
                if s < 0 {
                    *v = -*v;
                }
            }
        }
    }
}

trait SqrtLibm {
    fn sqrt_libm(self) -> f64;
}

impl SqrtLibm for f64 {
    fn sqrt_libm(self) -> f64 {
        libm::sqrt(self)
    }
}

/// Column-wise modified Gram-Schmidt in binary64.
pub fn gram_schmidt(b: &IntMatrix) -> Result<GramSchmidt, Error> {
    let rows = b.rows();
    let ncols = b.cols();
    let mut cols: Vec<f64> = Vec::with_capacity(rows * ncols);
    for c in 0..ncols {
        cols.extend(b.col(c).iter().map(|&v| v as f64));
    }
    let norms2 = mgs_in_place(&mut cols, rows, ncols)?;
    Ok(GramSchmidt {
        rows,
        ncols,
        cols,
        norms2,
    })
}

pub(crate) fn mgs_in_place(cols: &mut [f64], rows: usize, ncols: usize) -> Result<Vec<f64>, Error> {
    let mut norms2 = vec![0.0f64; ncols];
    for i in 0..ncols {
        let (head, tail) = cols.split_at_mut(i * rows);
        let ci = &mut tail[..rows];
        for j in 0..i {
            let qj = &head[j * rows..(j + 1) * rows];
            let mu = dot(ci, qj) / norms2[j];
            axpy_sub(ci, mu, qj);
        }
        norms2[i] = norm2(ci);
        if norms2[i] < 1e-18 {
            return Err(Error::RankDeficient { column: i });
        }
    }
    Ok(norms2)
}

/// Exact Gram-Schmidt over the rationals for tiny dimensions.
#[cfg(feature = "exact-gs")]
pub mod exact {
    use alloc::vec::Vec;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    use super::IntMatrix;
    use crate::error::Error;

    /// Orthogonalized columns and squared norms as exact rationals.
    pub struct ExactGramSchmidt {
        pub cols: Vec<Vec<BigRational>>,
        pub norms2: Vec<BigRational>,
    }

    pub fn gram_schmidt_exact(b: &IntMatrix) -> Result<ExactGramSchmidt, Error> {
        let rows = b.rows();
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(b.cols());
        let mut norms2: Vec<BigRational> = Vec::with_capacity(b.cols());
        for i in 0..b.cols() {
            let mut v: Vec<BigRational> = b
                .col(i)
                .iter()
                .map(|&e| BigRational::from(BigInt::from(e)))
                .collect();
            for j in 0..i {
                let num: BigRational = v
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a * b)
                    .fold(BigRational::zero(), |acc, x| acc + x);
                let mu = num / &norms2[j];
                for (ve, qe) in v.iter_mut().zip(&cols[j]) {
                    *ve -= &mu * qe;
                }
            }
            let n2: BigRational = v
                .iter()
                .map(|a| a * a)
                .fold(BigRational::zero(), |acc, x| acc + x);
            if n2.is_zero() {
                return Err(Error::RankDeficient { column: i });
            }
            let _ = rows;
            cols.push(v);
            norms2.push(n2);
        }
        Ok(ExactGramSchmidt { cols, norms2 })
    }
}
