//! Chi-square helpers for the uniformity and sampler-distribution checks.

use alloc::vec::Vec;

/// Pearson chi-square statistic of observed counts against a uniform
/// expectation over `cells` categories.
pub fn chi_square_uniform_stat(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let cells = counts.len();
    if cells == 0 || total == 0 {
        return 0.0;
    }
    let expected = total as f64 / cells as f64;
    counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Chi-square statistic against arbitrary expected counts.
pub fn chi_square_stat(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Upper-tail p-value of the chi-square distribution with `dof` degrees of
/// freedom: `Q(dof/2, stat/2)`.
pub fn chi_square_pvalue(stat: f64, dof: f64) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    gamma_q(dof / 2.0, stat / 2.0)
}

/// Regularized upper incomplete gamma function Q(a, x): series expansion
/// for x < a + 1, Lentz continued fraction otherwise.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x < 0.0 || a <= 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let gln = libm::lgamma(a);
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if libm::fabs(del) < libm::fabs(sum) * 1e-15 {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - gln)
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let gln = libm::lgamma(a);
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if libm::fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < 1e-15 {
            break;
        }
    }
    libm::exp(-x + a * libm::log(x) - gln) * h
}

/// Bucket counts for values in `[0, cells)`; out-of-range values panic.
pub fn tally(values: impl IntoIterator<Item = usize>, cells: usize) -> Vec<u64> {
    let mut counts = alloc::vec![0u64; cells];
    for v in values {
        counts[v] += 1;
    }
    counts
}
