//! Discrete Gaussian sampling over Z, over Z^n, and over q-ary lattice
//! cosets via the randomized nearest-plane walk.
//!
//! Every sampler takes an explicit random stream; fixed seed means fixed
//! output sequence. One-dimensional samples are rejection-sampled against
//! the Gaussian envelope on the finite support `[c - t*s, c + t*s]`, so all
//! outputs are support-bounded by construction.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::Error;
use crate::kernel::dot;
use crate::linalg::{gram_schmidt, GramSchmidt, IntMatrix, ZqMatrix};

/// Retry cap for the one-dimensional rejection loop.
const REJECTION_CAP: usize = 1_000_000;

/// Uniform double in [0, 1) with 53 random bits.
#[inline]
pub(crate) fn uniform_f64(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Unbiased uniform integer in `[lo, hi]`.
fn uniform_in_range(lo: i64, hi: i64, rng: &mut dyn RngCore) -> i64 {
    debug_assert!(lo <= hi);
    let range = (hi - lo) as u64 + 1;
    let zone = u64::MAX - (u64::MAX % range);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return lo + (x % range) as i64;
        }
    }
}

/// Discrete Gaussian on Z with width `s` and center `c`, truncated to
/// `|z - c| <= tail_cut * s`.
pub fn sample_z(s: f64, c: f64, tail_cut: u32, rng: &mut dyn RngCore) -> Result<i64, Error> {
    debug_assert!(s > 0.0);
    let spread = tail_cut as f64 * s;
    let lo = libm::ceil(c - spread) as i64;
    let hi = libm::floor(c + spread) as i64;
    if lo > hi {
        return Err(Error::SamplerStuck);
    }
    for _ in 0..REJECTION_CAP {
        let z = uniform_in_range(lo, hi, rng);
        let d = z as f64 - c;
        let accept = libm::exp(-core::f64::consts::PI * d * d / (s * s));
        if uniform_f64(rng) < accept {
            return Ok(z);
        }
    }
    Err(Error::SamplerStuck)
}

/// `n` independent one-dimensional draws at width `s`, center 0.
pub fn sample_dom(
    n: usize,
    s: f64,
    tail_cut: u32,
    rng: &mut dyn RngCore,
) -> Result<Vec<i64>, Error> {
    if s < libm::sqrt(libm::log2(n.max(2) as f64)) {
        log::warn!("sample_dom width {s} is below sqrt(log2 n) for n = {n}");
    }
    (0..n).map(|_| sample_z(s, 0.0, tail_cut, rng)).collect()
}

/// Randomized nearest-plane walk: a lattice point of `L(basis)` distributed
/// statistically close to the discrete Gaussian with width `s` centered at
/// `center`. Walks the basis columns in reverse order; step `i` draws a
/// one-dimensional sample at width `s / ||b~_i||`.
pub(crate) fn nearest_plane_walk(
    basis: &IntMatrix,
    gs: &GramSchmidt,
    s: f64,
    center: &[f64],
    tail_cut: u32,
    rng: &mut dyn RngCore,
) -> Result<Vec<i64>, Error> {
    let rows = basis.rows();
    let ncols = basis.cols();
    debug_assert_eq!(center.len(), rows);
    let mut c: Vec<f64> = center.to_vec();
    let mut v = vec![0i64; rows];
    for i in (0..ncols).rev() {
        let c_i = dot(&c, gs.col(i)) / gs.norm2(i);
        let s_i = s / gs.norm(i);
        let z = sample_z(s_i, c_i, tail_cut, rng)?;
        if z != 0 {
            let b_i = basis.col(i);
            let zf = z as f64;
            for ((cv, vv), &bv) in c.iter_mut().zip(v.iter_mut()).zip(b_i) {
                *cv -= zf * bv as f64;
                *vv += z * bv;
            }
        }
    }
    Ok(v)
}

/// Preimage sampler bound to one `(A, T)` pair; precomputes the
/// Gram-Schmidt data once so repeated sampling is cheap.
pub struct PreimageSampler {
    a: ZqMatrix,
    basis: IntMatrix,
    gs: GramSchmidt,
}

impl PreimageSampler {
    /// Requires `T` to be a basis of the kernel lattice of `A`; the
    /// congruence `A * T = 0 (mod q)` is checked here, the basis property
    /// is the caller's responsibility.
    pub fn new(a: ZqMatrix, basis: IntMatrix) -> Result<Self, Error> {
        if basis.rows() != a.cols() || basis.rows() != basis.cols() {
            return Err(Error::InvalidBasis(alloc::format!(
                "basis is {}x{}, expected {}x{}",
                basis.rows(),
                basis.cols(),
                a.cols(),
                a.cols()
            )));
        }
        if !a.mul_int_matrix(&basis).is_zero() {
            return Err(Error::InvalidBasis(alloc::string::String::from(
                "columns are not kernel vectors",
            )));
        }
        let gs = gram_schmidt(&basis)?;
        Ok(PreimageSampler { a, basis, gs })
    }

    pub fn gram_schmidt_norm(&self) -> f64 {
        self.gs.max_norm()
    }

    /// `x` with `A x = u (mod q)`, statistically close to the width-`s`
    /// discrete Gaussian on that coset.
    pub fn sample_pre(
        &self,
        u: &[u64],
        s: f64,
        tail_cut: u32,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<i64>, Error> {
        warn_below_width_floor(s, self.gs.max_norm(), self.basis.rows());
        let t = self.a.solve_particular(u)?;
        let center: Vec<f64> = t.iter().map(|&v| -(v as f64)).collect();
        let walk = nearest_plane_walk(&self.basis, &self.gs, s, &center, tail_cut, rng)?;
        Ok(walk
            .into_iter()
            .zip(&t)
            .map(|(w, &tv)| w + tv as i64)
            .collect())
    }

    /// Kernel-lattice point statistically close to the width-`s` discrete
    /// Gaussian centered at `c`.
    pub fn sample_gaussian(
        &self,
        s: f64,
        c: &[f64],
        tail_cut: u32,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<i64>, Error> {
        if c.len() != self.basis.rows() {
            return Err(Error::LengthMismatch {
                expected: self.basis.rows(),
                got: c.len(),
            });
        }
        warn_below_width_floor(s, self.gs.max_norm(), self.basis.rows());
        nearest_plane_walk(&self.basis, &self.gs, s, c, tail_cut, rng)
    }
}

fn warn_below_width_floor(s: f64, gs_norm: f64, n: usize) {
    let floor = gs_norm * libm::sqrt(libm::log2(n.max(2) as f64));
    if s < floor {
        log::warn!("sampling width {s} is below ||T~|| * sqrt(log2 n) = {floor}");
    }
}

/// One-shot preimage sampling; builds the Gram-Schmidt data internally.
/// Use [`PreimageSampler`] when sampling repeatedly under one key.
pub fn sample_pre(
    a: &ZqMatrix,
    basis: &IntMatrix,
    u: &[u64],
    s: f64,
    tail_cut: u32,
    rng: &mut dyn RngCore,
) -> Result<Vec<i64>, Error> {
    PreimageSampler::new(a.clone(), basis.clone())?.sample_pre(u, s, tail_cut, rng)
}

/// One-shot kernel-lattice Gaussian centered at `c`.
pub fn sample_gaussian(
    a: &ZqMatrix,
    basis: &IntMatrix,
    s: f64,
    c: &[f64],
    tail_cut: u32,
    rng: &mut dyn RngCore,
) -> Result<Vec<i64>, Error> {
    PreimageSampler::new(a.clone(), basis.clone())?.sample_gaussian(s, c, tail_cut, rng)
}

/// Exact (truncated) Gaussian pmf on the integer support of `sample_z`;
/// oracle shared by the distribution checks.
pub fn exact_pmf_z(s: f64, c: f64, tail_cut: u32) -> Vec<(i64, f64)> {
    let spread = tail_cut as f64 * s;
    let lo = libm::ceil(c - spread) as i64;
    let hi = libm::floor(c + spread) as i64;
    let mut mass: Vec<(i64, f64)> = (lo..=hi)
        .map(|z| {
            let d = z as f64 - c;
            (z, libm::exp(-core::f64::consts::PI * d * d / (s * s)))
        })
        .collect();
    let total: f64 = mass.iter().map(|(_, m)| m).sum();
    for (_, m) in mass.iter_mut() {
        *m /= total;
    }
    mass
}
