//! Small numeric kernels shared by the linear-algebra and sampler paths.

/// Dot product with eight independent accumulator lanes so the loop
/// vectorizes without reassociating a single serial reduction.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut lanes = [0.0f64; 8];
    for (ca, cb) in a.chunks_exact(8).zip(b.chunks_exact(8)) {
        for l in 0..8 {
            lanes[l] += ca[l] * cb[l];
        }
    }
    let mut acc: f64 = lanes.iter().sum();
    for t in (n - n % 8)..n {
        acc += a[t] * b[t];
    }
    acc
}

/// `dst -= mu * src`
#[inline]
pub(crate) fn axpy_sub(dst: &mut [f64], mu: f64, src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= mu * s;
    }
}

/// Squared Euclidean norm.
#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

/// `(a * b) mod q` for residues below `q`.
#[inline]
pub(crate) fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Reduce a signed integer into `[0, q)`.
#[inline]
pub(crate) fn reduce_i64(x: i64, q: u64) -> u64 {
    let q = q as i64;
    let r = x % q;
    if r < 0 {
        (r + q) as u64
    } else {
        r as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..37).map(|i| i as f64 * 0.25 - 3.0).collect();
        let b: Vec<f64> = (0..37).map(|i| (i * i % 11) as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
    }

    #[test]
    fn reduce_i64_covers_negatives() {
        assert_eq!(reduce_i64(-1, 5), 4);
        assert_eq!(reduce_i64(-5, 5), 0);
        assert_eq!(reduce_i64(7, 5), 2);
        assert_eq!(reduce_i64(0, 5), 0);
    }
}
