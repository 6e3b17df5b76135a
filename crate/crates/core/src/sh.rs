//! The plain semigroup-homomorphic scheme: key generation, signing,
//! verification, and signature concatenation.
//!
//! A signature on a symbol sequence is the sequence of discrete-Gaussian
//! preimages of the per-symbol syndromes. Verification checks the matrix
//! norm bound `||sigma|| <= v sqrt(k n)` and the column congruences
//! `A sigma_i = beta_i (mod q)` exactly; concatenating two verifying
//! signatures therefore verifies for the concatenated message.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::encode::{hash_symbol, syndrome, HashId, Message, Signature};
use crate::error::Error;
use crate::linalg::{is_linearly_independent, uniform_residue, ZqMatrix};
use crate::params::Params;
use crate::trapdoor::{trap_gen, BasisCertificate, Trapdoor, TrapdoorSampler};

/// Retry cap for resampling the syndrome vectors until independent.
const ALPHA_RETRY_CAP: usize = 64;

/// Relative slack applied to the verification norm bound so boundary
/// comparisons are deterministic in binary64.
pub(crate) const NORM_BOUNDARY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PublicKey {
    pub params: Params,
    pub a: ZqMatrix,
    pub alphas: Vec<Vec<u64>>,
    pub hash_id: HashId,
}

/// Secret key: the trapdoor basis, its factorization witness, and the
/// prepared coset sampler.
pub struct SecretKey {
    cert: BasisCertificate,
    sampler: TrapdoorSampler,
}

impl SecretKey {
    pub fn from_trapdoor(params: &Params, trapdoor: &Trapdoor) -> Result<Self, Error> {
        Ok(SecretKey {
            cert: trapdoor.cert.clone(),
            sampler: TrapdoorSampler::new(params, trapdoor)?,
        })
    }

    pub fn basis(&self) -> &crate::linalg::IntMatrix {
        self.sampler.basis()
    }

    pub fn certificate(&self) -> &BasisCertificate {
        &self.cert
    }

    pub fn sampler(&self) -> &TrapdoorSampler {
        &self.sampler
    }

    pub fn gram_schmidt_norm(&self) -> f64 {
        self.sampler.gram_schmidt_norm()
    }
}

/// Whether the private key may sign multi-symbol messages directly or is
/// restricted to single symbols (longer messages then arise only through
/// the homomorphic operation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignPolicy {
    SingleSymbolOnly,
    #[default]
    AnyMessage,
}

/// Uniform syndrome vectors, resampled until linearly independent.
/// Returns the vectors and the number of sampling rounds used.
pub fn sample_independent_alphas(
    params: &Params,
    rng: &mut dyn RngCore,
) -> Result<(Vec<Vec<u64>>, usize), Error> {
    for round in 1..=ALPHA_RETRY_CAP {
        let alphas: Vec<Vec<u64>> = (0..params.k)
            .map(|_| {
                (0..params.h)
                    .map(|_| uniform_residue(params.q, rng))
                    .collect()
            })
            .collect();
        if is_linearly_independent(&alphas, params.q) {
            return Ok((alphas, round));
        }
    }
    Err(Error::GenerationFailed(alloc::string::String::from(
        "syndrome vectors stayed dependent",
    )))
}

/// Generate a key pair.
pub fn gen(params: &Params, rng: &mut dyn RngCore) -> Result<(PublicKey, SecretKey), Error> {
    let trapdoor = trap_gen(params, rng)?;
    let (alphas, _rounds) = sample_independent_alphas(params, rng)?;
    let sk = SecretKey::from_trapdoor(params, &trapdoor)?;
    let pk = PublicKey {
        params: params.clone(),
        a: trapdoor.a,
        alphas,
        hash_id: HashId::Shake256,
    };
    Ok((pk, sk))
}

/// Per-symbol syndromes of a message under a public key.
pub(crate) fn message_syndromes(pk: &PublicKey, x: &Message) -> Result<Vec<Vec<u64>>, Error> {
    x.symbols()
        .iter()
        .map(|sym| {
            let bits = hash_symbol(sym, pk.params.k, pk.hash_id)?;
            syndrome(&bits, &pk.alphas, pk.params.q)
        })
        .collect()
}

/// Sign a message; the empty message gets the empty signature without
/// touching the sampler.
pub fn sign(
    pk: &PublicKey,
    sk: &SecretKey,
    x: &Message,
    policy: SignPolicy,
    rng: &mut dyn RngCore,
) -> Result<Signature, Error> {
    if x.is_empty() {
        return Ok(Signature::empty());
    }
    if policy == SignPolicy::SingleSymbolOnly && x.len() > 1 {
        return Err(Error::PolicyViolation);
    }
    let betas = message_syndromes(pk, x)?;
    let mut columns = Vec::with_capacity(betas.len());
    for beta in &betas {
        columns.push(
            sk.sampler()
                .sample_coset(beta, pk.params.v, pk.params.tail_cut, rng)?,
        );
    }
    Ok(Signature::from_columns(columns))
}

/// Verification against an explicit public matrix (the tagged scheme
/// passes the delegated matrix here).
pub(crate) fn verify_with_matrix(
    pk: &PublicKey,
    matrix: &ZqMatrix,
    x: &Message,
    sigma: &Signature,
) -> bool {
    if sigma.len() != x.len() {
        return false;
    }
    if sigma.is_empty() {
        return true;
    }
    if sigma.dim() != pk.params.n {
        return false;
    }
    let bound = pk.params.verify_norm_bound() * (1.0 + NORM_BOUNDARY_SLACK);
    if sigma.matrix_norm() > bound {
        return false;
    }
    let Ok(betas) = message_syndromes(pk, x) else {
        return false;
    };
    sigma
        .columns()
        .iter()
        .zip(&betas)
        .all(|(col, beta)| &matrix.mul_int_vec(col) == beta)
}

/// Verify a signature; malformed input yields 0, never an error.
pub fn verify(pk: &PublicKey, x: &Message, sigma: &Signature) -> bool {
    verify_with_matrix(pk, &pk.a, x, sigma)
}

/// The homomorphic operation on signatures: concatenation. If both inputs
/// verify for their messages under one key, the output verifies for the
/// concatenated message.
pub fn hom_concat(a: &Signature, b: &Signature) -> Signature {
    a.concat(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Symbol;
    use crate::params::derive_params;
    use crate::params::Strictness;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn test_params() -> Params {
        // q = 17: h = 2, k <= 2; small enough for fast unit tests
        derive_params(64, 2, 17, Strictness::Relaxed).unwrap()
    }

    fn random_symbol(rng: &mut ChaCha20Rng) -> Symbol {
        let mut b = [0u8; 12];
        rng.fill_bytes(&mut b);
        Symbol::new(b.to_vec())
    }

    #[test]
    fn keygen_satisfies_secret_key_invariants() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        assert!(pk.a.mul_int_matrix(sk.basis()).is_zero());
        assert!(is_linearly_independent(&pk.alphas, params.q));
        assert_eq!(pk.alphas.len(), params.k);
        crate::trapdoor::verify_basis_certificate(&params, &pk.a, sk.basis(), sk.certificate())
            .unwrap();
    }

    #[test]
    fn sign_verify_round_trip() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        for _ in 0..50 {
            let x = Message::single(random_symbol(&mut rng));
            let sigma = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
            assert!(verify(&pk, &x, &sigma));
        }
    }

    #[test]
    fn empty_message_conventions() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let sigma = sign(&pk, &sk, &Message::empty(), SignPolicy::AnyMessage, &mut rng).unwrap();
        assert!(sigma.is_empty());
        assert!(verify(&pk, &Message::empty(), &sigma));
    }

    #[test]
    fn policy_restricts_multi_symbol_signing() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(44);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let two = Message::from_symbols(vec![random_symbol(&mut rng), random_symbol(&mut rng)]);
        assert!(matches!(
            sign(&pk, &sk, &two, SignPolicy::SingleSymbolOnly, &mut rng),
            Err(Error::PolicyViolation)
        ));
        assert!(sign(&pk, &sk, &two, SignPolicy::AnyMessage, &mut rng).is_ok());
    }

    #[test]
    fn repeated_signing_is_randomized() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(45);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let x = Message::single(random_symbol(&mut rng));
        let mut distinct = 0;
        let base = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
        for _ in 0..20 {
            let again = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
            assert!(verify(&pk, &x, &again));
            if again != base {
                distinct += 1;
            }
        }
        assert!(distinct >= 19, "sampler looks deterministic: {distinct}/20");
    }

    #[test]
    fn tampered_signature_rejected() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(46);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let mut rejected = 0;
        let trials = 50;
        for _ in 0..trials {
            let x = Message::single(random_symbol(&mut rng));
            let sigma = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
            let mut cols: Vec<Vec<i64>> = sigma.columns().to_vec();
            let pos = (rng.next_u64() % params.n as u64) as usize;
            cols[0][pos] += 1;
            if !verify(&pk, &x, &Signature::from_columns(cols)) {
                rejected += 1;
            }
        }
        assert!(rejected >= trials - 1, "tampering slipped through: {rejected}/{trials}");
    }

    #[test]
    fn congruent_but_long_signature_fails_norm_check() {
        // scale an honest signature by q+1 entrywise: congruences survive,
        // the norm bound does not
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(47);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let x = Message::single(random_symbol(&mut rng));
        let sigma = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
        let factor = params.q as i64 + 1;
        let mut scaled: Vec<Vec<i64>> = sigma.columns().to_vec();
        // keep scaling until the norm bound is exceeded
        let bound = pk.params.verify_norm_bound();
        let mut s = Signature::from_columns(scaled.clone());
        while s.matrix_norm() <= bound {
            for col in scaled.iter_mut() {
                for v in col.iter_mut() {
                    *v *= factor;
                }
            }
            s = Signature::from_columns(scaled.clone());
        }
        let beta = message_syndromes(&pk, &x).unwrap();
        assert_eq!(pk.a.mul_int_vec(&s.columns()[0]), beta[0]);
        assert!(!verify(&pk, &x, &s));
    }

    #[test]
    fn shape_mismatches_reject() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(48);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        let x = Message::single(random_symbol(&mut rng));
        let sigma = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
        // wrong message length
        let xx = x.concat(&x);
        assert!(!verify(&pk, &xx, &sigma));
        // wrong column dimension
        let short = Signature::from_columns(vec![vec![0i64; params.n - 1]]);
        assert!(!verify(&pk, &x, &short));
        // empty signature against nonempty message
        assert!(!verify(&pk, &x, &Signature::empty()));
    }

    #[test]
    fn homomorphic_concatenation_verifies() {
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(49);
        let (pk, sk) = gen(&params, &mut rng).unwrap();
        for _ in 0..20 {
            let x = Message::single(random_symbol(&mut rng));
            let y = Message::single(random_symbol(&mut rng));
            let sx = sign(&pk, &sk, &x, SignPolicy::AnyMessage, &mut rng).unwrap();
            let sy = sign(&pk, &sk, &y, SignPolicy::AnyMessage, &mut rng).unwrap();
            assert!(verify(&pk, &x, &sx) && verify(&pk, &y, &sy));
            let joined = hom_concat(&sx, &sy);
            assert!(verify(&pk, &x.concat(&y), &joined));
            // identity behavior
            assert_eq!(hom_concat(&sx, &Signature::empty()), sx);
            // associativity mirrors message concatenation
            let z = Message::single(random_symbol(&mut rng));
            let sz = sign(&pk, &sk, &z, SignPolicy::AnyMessage, &mut rng).unwrap();
            assert_eq!(
                hom_concat(&hom_concat(&sx, &sy), &sz),
                hom_concat(&sx, &hom_concat(&sy, &sz))
            );
        }
    }

    #[test]
    fn random_signatures_verify_at_the_q_to_minus_h_rate() {
        // a random well-shaped column passes the congruence with
        // probability q^-h; at h = 2, q = 17 that is ~1/289, so a strict
        // zero-accept check belongs to larger parameter sets
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(50);
        let (pk, _sk) = gen(&params, &mut rng).unwrap();
        let x = Message::single(random_symbol(&mut rng));
        let reach = (params.v / 2.0) as i64;
        let trials = 2000;
        let mut accepts = 0;
        for _ in 0..trials {
            let col: Vec<i64> = (0..params.n)
                .map(|_| (rng.next_u64() % (2 * reach as u64)) as i64 - reach)
                .collect();
            if verify(&pk, &x, &Signature::from_columns(vec![col])) {
                accepts += 1;
            }
        }
        let expected = trials as f64 / (params.q as f64).powi(params.h as i32);
        assert!(
            (accepts as f64) < expected * 4.0 + 10.0,
            "accepts {accepts} vs expected {expected:.1}"
        );
    }

    #[test]
    fn width_condition_holds_per_key() {
        // v / ||T~|| >= sqrt(log2 n) whenever ||T~|| <= sqrt(2 h log2 q)
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(51);
        for _ in 0..5 {
            let (_pk, sk) = gen(&params, &mut rng).unwrap();
            let gs_norm = sk.gram_schmidt_norm();
            let cap = libm::sqrt(2.0 * params.h as f64 * libm::log2(params.q as f64));
            if gs_norm <= cap {
                assert!(params.v / gs_norm >= params.width_floor());
            }
        }
    }

    #[test]
    fn alpha_resampling_rounds_stay_low() {
        // at h = k = 2, q = 17 dependence is rare; the expected number of
        // rounds stays below 2 by a wide margin
        let params = test_params();
        let mut rng = ChaCha20Rng::seed_from_u64(52);
        let mut total_rounds = 0usize;
        let keys = 200;
        for _ in 0..keys {
            let (_, rounds) = sample_independent_alphas(&params, &mut rng).unwrap();
            total_rounds += rounds;
        }
        assert!((total_rounds as f64) / (keys as f64) <= 2.0);
    }
}
