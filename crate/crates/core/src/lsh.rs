//! The tagged linear scheme: setup, tagged signing, unkeyed combination,
//! and tagged verification.
//!
//! Each data set is bound to a tag `tau` in {0,1}^n. Signing delegates the
//! public matrix to `B = A H^T` with `H = diag(2 tau_i - 1)` and samples
//! preimages under the delegated basis `H T_A`; because `H` is a sign
//! diagonal, sampling under `(B, H T_A)` is the sign-flipped image of
//! sampling under `(A, T_A)`, which is how the signer computes it.
//! Combination is the deterministic coefficient-weighted concatenation; it
//! needs no key material.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::encode::{Message, Signature};
use crate::error::Error;
use crate::params::Params;
use crate::sh::{self, PublicKey, SecretKey, SignPolicy};
use crate::trapdoor::delegate_public;

/// A data-set tag: `n` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tag(Vec<bool>);

impl Tag {
    pub fn new(bits: Vec<bool>) -> Self {
        Tag(bits)
    }

    /// Uniform tag, as the security game's challenger draws them.
    pub fn uniform(n: usize, rng: &mut dyn RngCore) -> Self {
        let mut bits = Vec::with_capacity(n);
        let mut word = 0u64;
        for i in 0..n {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            bits.push((word >> (i % 64)) & 1 == 1);
        }
        Tag(bits)
    }

    pub fn all_ones(n: usize) -> Self {
        Tag(alloc::vec![true; n])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pack little-endian into bytes, zero-padded to a byte boundary.
    pub fn pack(&self) -> Vec<u8> {
        let mut out = alloc::vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    pub fn unpack(bytes: &[u8], n: usize) -> Result<Self, Error> {
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::LengthMismatch {
                expected: n.div_ceil(8),
                got: bytes.len(),
            });
        }
        Ok(Tag((0..n).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect()))
    }
}

/// Key generation is shared with the plain scheme.
pub fn setup(params: &Params, rng: &mut dyn RngCore) -> Result<(PublicKey, SecretKey), Error> {
    sh::gen(params, rng)
}

/// Sign a message under a tag.
pub fn lsh_sign(
    pk: &PublicKey,
    sk: &SecretKey,
    tau: &Tag,
    v: &Message,
    policy: SignPolicy,
    rng: &mut dyn RngCore,
) -> Result<Signature, Error> {
    if tau.len() != pk.params.n {
        return Err(Error::LengthMismatch {
            expected: pk.params.n,
            got: tau.len(),
        });
    }
    if v.is_empty() {
        return Ok(Signature::empty());
    }
    if policy == SignPolicy::SingleSymbolOnly && v.len() > 1 {
        return Err(Error::PolicyViolation);
    }
    let betas = sh::message_syndromes(pk, v)?;
    let mut columns = Vec::with_capacity(betas.len());
    for beta in &betas {
        // preimage under (B, H T_A) = sign-flipped preimage under (A, T_A)
        let mut col = sk
            .sampler()
            .sample_coset(beta, pk.params.v, pk.params.tail_cut, rng)?;
        for (value, &bit) in col.iter_mut().zip(tau.bits()) {
            if !bit {
                *value = -*value;
            }
        }
        columns.push(col);
    }
    Ok(Signature::from_columns(columns))
}

/// Deterministic combination `c_1 sigma_1 || ... || c_l sigma_l`; the
/// intended message is the same combination of the underlying messages.
/// Unkeyed: the tag is part of the claim, not of the computation.
pub fn combine(
    _pk: &PublicKey,
    _tau: &Tag,
    pairs: &[(u64, Signature)],
    p: u64,
) -> Result<Signature, Error> {
    let mut out = Signature::empty();
    for (c, sigma) in pairs {
        out = out.concat(&sigma.scalar_mul(*c, p)?);
    }
    Ok(out)
}

/// Verify a signature under a tag; malformed input yields 0.
pub fn lsh_verify(pk: &PublicKey, tau: &Tag, y: &Message, sigma: &Signature) -> bool {
    if tau.len() != pk.params.n {
        return false;
    }
    let Ok(b) = delegate_public(&pk.a, tau.bits()) else {
        return false;
    };
    sh::verify_with_matrix(pk, &b, y, sigma)
}
