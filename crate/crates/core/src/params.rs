//! Public scheme parameters: derivation, validation, and the fixed binary
//! record they serialize to.
//!
//! All logarithms are base 2. Derivation is deterministic: identical inputs
//! produce bit-identical [`Params`], including the derived floating-point
//! widths (transcendentals go through `libm`, not platform intrinsics).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use sha3::{Digest, Sha3_256};

use crate::error::Error;

/// Record magic for serialized parameters.
pub const PARAMS_MAGIC: [u8; 4] = *b"SGSP";
/// Current record version.
pub const PARAMS_VERSION: u16 = 1;
/// Default one-dimensional tail cut `t`: samples outside `c ± t*s` are
/// rejected, leaving per-sample tail mass below 2^-100 at the widths in use.
pub const DEFAULT_TAIL_CUT: u32 = 13;
/// Exact byte length of the serialized parameter record.
pub const PARAMS_RECORD_LEN: usize = 4 + 2 + 8 * 4 + 8 * 2 + 4 + 1;

/// Whether the asymptotic modulus bound is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Enforce `q >= (k*n)^2` on top of q being an odd prime.
    PaperStrict,
    /// Waive the `(k*n)^2` bound so desk-scale moduli are usable; q must
    /// still be an odd prime and k <= h.
    Relaxed,
}

impl Strictness {
    pub fn as_u8(self) -> u8 {
        match self {
            Strictness::PaperStrict => 0,
            Strictness::Relaxed => 1,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self, Error> {
        match v {
            0 => Ok(Strictness::PaperStrict),
            1 => Ok(Strictness::Relaxed),
            other => Err(Error::InvalidDimension(format!(
                "unknown strictness byte {other}"
            ))),
        }
    }
}

/// All public parameters of both schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Security parameter; lattice dimension and tag length.
    pub n: usize,
    /// Odd prime modulus.
    pub q: u64,
    /// Hash output length in bits; number of public syndrome vectors.
    pub k: usize,
    /// Row count of the public matrix: `floor(n / (6 log2 q))`.
    pub h: usize,
    /// Gaussian width used by preimage sampling: `k sqrt(2 n log2 q) log2 n`.
    pub v: f64,
    /// Simulator width `v / sqrt(k)`.
    pub s_sim: f64,
    /// One-dimensional support cut in units of the width.
    pub tail_cut: u32,
    pub strictness: Strictness,
}

/// `ceil(log2 q)` for `q >= 2`.
pub(crate) fn ceil_log2(q: u64) -> usize {
    (64 - (q - 1).leading_zeros()) as usize
}

fn log2f(x: f64) -> f64 {
    libm::log2(x)
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let pow = |mut base: u64, mut exp: u64| -> u64 {
        let mut acc: u64 = 1;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = ((acc as u128 * base as u128) % n as u128) as u64;
            }
            base = ((base as u128 * base as u128) % n as u128) as u64;
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Derive and validate parameters from `(n, k, q)`.
pub fn derive_params(n: usize, k: usize, q: u64, strictness: Strictness) -> Result<Params, Error> {
    if n < 8 {
        return Err(Error::InvalidDimension(format!("n = {n} is below 8")));
    }
    if k < 1 {
        return Err(Error::InvalidDimension(String::from("k must be positive")));
    }
    if q < 3 || q % 2 == 0 {
        return Err(Error::InvalidModulus(format!("q = {q} must be odd and >= 3")));
    }
    if !is_prime_u64(q) {
        return Err(Error::InvalidModulus(format!("q = {q} is composite")));
    }
    if strictness == Strictness::PaperStrict {
        let kn = (k as u128) * (n as u128);
        let bound = kn * kn;
        if (q as u128) < bound {
            return Err(Error::StrictViolation(format!(
                "q = {q} is below (k*n)^2 = {bound}"
            )));
        }
    }
    let log2q = log2f(q as f64);
    let h = libm::floor(n as f64 / (6.0 * log2q)) as usize;
    if h < 1 {
        return Err(Error::InvalidDimension(format!(
            "h = floor(n / (6 log2 q)) vanishes for n = {n}, q = {q}"
        )));
    }
    if k > h {
        return Err(Error::KExceedsH { k, h });
    }
    let v = k as f64 * libm::sqrt(2.0 * n as f64 * log2q) * log2f(n as f64);
    let s_sim = v / libm::sqrt(k as f64);
    Ok(Params {
        n,
        q,
        k,
        h,
        v,
        s_sim,
        tail_cut: DEFAULT_TAIL_CUT,
        strictness,
    })
}

impl Params {
    /// Desk-scale preset: n = 1536, q = 257, k = 8, relaxed mode.
    pub fn toy() -> Params {
        derive_params(1536, 8, 257, Strictness::Relaxed).expect("toy preset is valid")
    }

    /// Smallest workable strict-mode preset: n = 512, k = 1 and the first
    /// prime at or above `(k*n)^2`.
    pub fn paper_strict() -> Params {
        let n = 512usize;
        let k = 1usize;
        let mut q = ((k * n) as u64).pow(2) | 1;
        while !is_prime_u64(q) {
            q += 2;
        }
        derive_params(n, k, q, Strictness::PaperStrict).expect("strict preset is valid")
    }

    /// Width of one gadget digit vector: `ceil(log2 q)`.
    pub fn gadget_digits(&self) -> usize {
        ceil_log2(self.q)
    }

    /// Number of gadget columns in the trapdoor: `h * ceil(log2 q)`.
    pub fn gadget_block(&self) -> usize {
        self.h * self.gadget_digits()
    }

    /// Verification norm bound `v * sqrt(k * n)`.
    pub fn verify_norm_bound(&self) -> f64 {
        self.v * libm::sqrt((self.k * self.n) as f64)
    }

    /// Threshold standing in for the super-logarithmic width factor.
    pub fn width_floor(&self) -> f64 {
        libm::sqrt(log2f(self.n as f64))
    }

    /// Serialize to the fixed-order binary record.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 2 + 8 * 4 + 8 * 2 + 4 + 1);
        out.extend_from_slice(&PARAMS_MAGIC);
        out.extend_from_slice(&PARAMS_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.q.to_le_bytes());
        out.extend_from_slice(&(self.k as u64).to_le_bytes());
        out.extend_from_slice(&(self.h as u64).to_le_bytes());
        out.extend_from_slice(&self.v.to_le_bytes());
        out.extend_from_slice(&self.s_sim.to_le_bytes());
        out.extend_from_slice(&self.tail_cut.to_le_bytes());
        out.push(self.strictness.as_u8());
        out
    }

    /// Parse the fixed-order binary record, revalidating the derivation.
    pub fn decode(bytes: &[u8]) -> Result<Params, Error> {
        if bytes.len() != PARAMS_RECORD_LEN {
            return Err(Error::Truncated);
        }
        if bytes[0..4] != PARAMS_MAGIC {
            let mut m = [0u8; 4];
            m.copy_from_slice(&bytes[0..4]);
            return Err(Error::BadMagic(m));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != PARAMS_VERSION {
            return Err(Error::VersionUnsupported(version));
        }
        let rd_u64 = |off: usize| {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[off..off + 8]);
            u64::from_le_bytes(b)
        };
        let n = rd_u64(6) as usize;
        let q = rd_u64(14);
        let k = rd_u64(22) as usize;
        let h = rd_u64(30) as usize;
        let v = f64::from_le_bytes(bytes[38..46].try_into().unwrap());
        let s_sim = f64::from_le_bytes(bytes[46..54].try_into().unwrap());
        let tail_cut = u32::from_le_bytes(bytes[54..58].try_into().unwrap());
        let strictness = Strictness::from_u8(bytes[58])?;
        let mut params = derive_params(n, k, q, strictness)?;
        params.tail_cut = tail_cut;
        if params.h != h || params.v.to_bits() != v.to_bits() || params.s_sim.to_bits() != s_sim.to_bits()
        {
            return Err(Error::ParamsMismatch);
        }
        Ok(params)
    }

    /// SHA3-256 digest of the canonical record; ties keys, signatures,
    /// messages, and tags to the parameter set they were built under.
    pub fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha3_256::new();
        hasher.update(self.encode());
        hasher.finalize().into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_preset_matches_hand_derivation() {
        // h = floor(1536 / (6 log2 257)) with log2 257 ~ 8.00562 gives 31.
        let p = Params::toy();
        assert_eq!(p.h, 31);
        assert_eq!(p.k, 8);
        let log2q = libm::log2(257.0);
        let v = 8.0 * libm::sqrt(2.0 * 1536.0 * log2q) * libm::log2(1536.0);
        assert_eq!(p.v.to_bits(), v.to_bits());
        assert!((p.v - 13279.0).abs() < 10.0);
        assert_eq!(p.s_sim.to_bits(), (v / libm::sqrt(8.0)).to_bits());
    }

    #[test]
    fn even_modulus_rejected() {
        assert!(matches!(
            derive_params(8, 1, 2, Strictness::Relaxed),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(matches!(
            derive_params(128, 1, 255, Strictness::Relaxed),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn k_exceeding_h_rejected() {
        // h = floor(128 / (6 log2 65537)) = 1 < 4.
        assert!(matches!(
            derive_params(128, 4, 65537, Strictness::Relaxed),
            Err(Error::KExceedsH { k: 4, h: 1 })
        ));
    }

    #[test]
    fn strict_bound_enforced() {
        assert!(matches!(
            derive_params(1536, 8, 257, Strictness::PaperStrict),
            Err(Error::StrictViolation(_))
        ));
        let p = Params::paper_strict();
        assert!(p.q as u128 >= ((p.k * p.n) as u128).pow(2));
        assert!(is_prime_u64(p.q));
    }

    #[test]
    fn derivation_is_deterministic() {
        let a = derive_params(1536, 8, 257, Strictness::Relaxed).unwrap();
        let b = derive_params(1536, 8, 257, Strictness::Relaxed).unwrap();
        assert_eq!(a.encode(), b.encode());
    }

    #[test]
    fn record_round_trips() {
        for p in [Params::toy(), Params::paper_strict()] {
            let bytes = p.encode();
            let back = Params::decode(&bytes).unwrap();
            assert_eq!(p, back);
            assert_eq!(p.digest(), back.digest());
        }
    }

    #[test]
    fn truncated_record_rejected() {
        let bytes = Params::toy().encode();
        assert_eq!(Params::decode(&bytes[..bytes.len() - 1]), Err(Error::Truncated));
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime_u64(257));
        assert!(is_prime_u64(65537));
        assert!(!is_prime_u64(65535));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64((1u64 << 61) - 1));
        assert!(!is_prime_u64((1u64 << 59) - 1));
    }

    #[test]
    fn gadget_dimensions_fit() {
        for p in [Params::toy(), Params::paper_strict()] {
            assert!(p.gadget_block() < p.n);
            assert_eq!(p.gadget_digits(), super::ceil_log2(p.q));
        }
        assert_eq!(ceil_log2(257), 9);
        assert_eq!(ceil_log2(3), 2);
    }
}
