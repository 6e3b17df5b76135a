//! The semigroup algebra on messages and signatures: symbol hashing,
//! syndrome maps, concatenation, scalar multiplication by repetition,
//! linear functionals, and span membership.
//!
//! Messages are finite sequences of symbols (arbitrary byte strings);
//! signatures are finite sequences of integer vectors. Both form free
//! semigroups under concatenation with a distinguished empty element.
//! The empty byte string is a valid symbol, distinct from the empty
//! message.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::Error;

/// Default coefficient-ring bound for scalar multiplication.
pub const DEFAULT_P: u64 = 16;

/// One message symbol: a finite byte string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub Vec<u8>);

impl Symbol {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Self {
        Symbol(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// A finite symbol sequence; the empty sequence is the identity for
/// concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Message {
    symbols: Vec<Symbol>,
}

impl Message {
    pub fn empty() -> Self {
        Message::default()
    }

    pub fn from_symbols(symbols: impl Into<Vec<Symbol>>) -> Self {
        Message {
            symbols: symbols.into(),
        }
    }

    pub fn single(symbol: Symbol) -> Self {
        Message {
            symbols: vec![symbol],
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn concat(&self, other: &Message) -> Message {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Message { symbols }
    }

    /// `c`-fold self-concatenation; `c = 0` yields the empty message.
    pub fn scalar_mul(&self, c: u64, p: u64) -> Result<Message, Error> {
        check_coefficient(c, p)?;
        let mut symbols = Vec::with_capacity(self.symbols.len() * c as usize);
        for _ in 0..c {
            symbols.extend_from_slice(&self.symbols);
        }
        Ok(Message { symbols })
    }
}

/// A finite sequence of integer vectors; viewed as an n x len matrix when
/// verified. The empty sequence is the identity for concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Signature {
    columns: Vec<Vec<i64>>,
}

impl Signature {
    /// The distinguished empty signature.
    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn from_columns(columns: Vec<Vec<i64>>) -> Self {
        if let Some(first) = columns.first() {
            debug_assert!(columns.iter().all(|c| c.len() == first.len()));
        }
        Signature { columns }
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Dimension of the column vectors (0 for the empty signature).
    pub fn dim(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn concat(&self, other: &Signature) -> Signature {
        let mut columns = self.columns.clone();
        columns.extend_from_slice(&other.columns);
        Signature { columns }
    }

    pub fn scalar_mul(&self, c: u64, p: u64) -> Result<Signature, Error> {
        check_coefficient(c, p)?;
        let mut columns = Vec::with_capacity(self.columns.len() * c as usize);
        for _ in 0..c {
            columns.extend_from_slice(&self.columns);
        }
        Ok(Signature { columns })
    }

    /// Max column norm (the matrix norm of the column-matrix view).
    pub fn matrix_norm(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| libm::sqrt(c.iter().map(|&v| v as f64 * v as f64).sum()))
            .fold(0.0, f64::max)
    }
}

fn check_coefficient(c: u64, p: u64) -> Result<(), Error> {
    if c >= p {
        return Err(Error::CoefficientOutOfRange { coefficient: c, p });
    }
    Ok(())
}

/// Coefficients of a linear functional over Z_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunctional {
    coefficients: Vec<u64>,
    p: u64,
}

impl LinearFunctional {
    pub fn new(coefficients: Vec<u64>, p: u64) -> Result<Self, Error> {
        for &c in &coefficients {
            check_coefficient(c, p)?;
        }
        Ok(LinearFunctional { coefficients, p })
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `c_1 v_1 || ... || c_l v_l` on messages.
    pub fn apply_messages(&self, items: &[Message]) -> Result<Message, Error> {
        if items.len() != self.coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: self.coefficients.len(),
                got: items.len(),
            });
        }
        let mut out = Message::empty();
        for (&c, item) in self.coefficients.iter().zip(items) {
            out = out.concat(&item.scalar_mul(c, self.p)?);
        }
        Ok(out)
    }

    /// `c_1 s_1 || ... || c_l s_l` on signatures.
    pub fn apply_signatures(&self, items: &[Signature]) -> Result<Signature, Error> {
        if items.len() != self.coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: self.coefficients.len(),
                got: items.len(),
            });
        }
        let mut out = Signature::empty();
        for (&c, item) in self.coefficients.iter().zip(items) {
            out = out.concat(&item.scalar_mul(c, self.p)?);
        }
        Ok(out)
    }
}

/// Identifier of the symbol hash recorded in public keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashId {
    /// SHAKE-256 with domain tag 0x01 and a length prefix.
    Shake256 = 1,
}

impl HashId {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Result<Self, Error> {
        match v {
            1 => Ok(HashId::Shake256),
            other => Err(Error::UnknownHashId(other)),
        }
    }
}

/// First `k` bits of the domain-separated digest of a symbol. Bits are
/// read least-significant first within each squeezed byte.
pub fn hash_symbol(symbol: &Symbol, k: usize, hash_id: HashId) -> Result<Vec<bool>, Error> {
    debug_assert!(k >= 1);
    match hash_id {
        HashId::Shake256 => {
            let mut xof = Shake256::default();
            xof.update(&[0x01]);
            xof.update(&(symbol.0.len() as u64).to_le_bytes());
            xof.update(&symbol.0);
            let mut reader = xof.finalize_xof();
            let mut bytes = vec![0u8; k.div_ceil(8)];
            reader.read(&mut bytes);
            Ok((0..k).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect())
        }
    }
}

/// Subset sum of the public syndrome vectors selected by the hash bits,
/// mod q.
pub fn syndrome(bits: &[bool], alphas: &[Vec<u64>], q: u64) -> Result<Vec<u64>, Error> {
    if bits.len() != alphas.len() {
        return Err(Error::LengthMismatch {
            expected: alphas.len(),
            got: bits.len(),
        });
    }
    let h = alphas.first().map_or(0, Vec::len);
    let mut beta = vec![0u64; h];
    for (&bit, alpha) in bits.iter().zip(alphas) {
        if !bit {
            continue;
        }
        debug_assert_eq!(alpha.len(), h);
        for (b, &a) in beta.iter_mut().zip(alpha) {
            *b = (*b + a) % q;
        }
    }
    Ok(beta)
}

/// Membership in the concatenation span of single symbols: every finite
/// nonempty sequence over the queried set. The empty message is not in
/// the span (it is the identity added separately by the schemes, not a
/// concatenation of queried symbols).
pub fn span_contains(queried: &[Symbol], candidate: &Message) -> bool {
    if candidate.is_empty() {
        return false;
    }
    let set: BTreeSet<&[u8]> = queried.iter().map(|s| s.as_bytes()).collect();
    candidate
        .symbols()
        .iter()
        .all(|s| set.contains(s.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn sym(b: &[u8]) -> Symbol {
        Symbol::new(b.to_vec())
    }

    #[test]
    fn hash_is_deterministic_with_exact_length() {
        let x = sym(b"hello");
        for k in [8usize, 31, 64] {
            let a = hash_symbol(&x, k, HashId::Shake256).unwrap();
            let b = hash_symbol(&x, k, HashId::Shake256).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), k);
        }
    }

    #[test]
    fn hash_collisions_absent_over_a_million_symbols() {
        // all-pairs collision search over 10^6 distinct random 32-byte
        // symbols at k = 64 (expected collisions ~ 3e-8)
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let k = 64;
        let mut seen = std::collections::HashSet::with_capacity(1 << 20);
        for _ in 0..1_000_000u32 {
            let mut sym = vec![0u8; 32];
            rng.fill_bytes(&mut sym);
            let bits = hash_symbol(&Symbol::new(sym), k, HashId::Shake256).unwrap();
            let mut word = 0u64;
            for (i, &b) in bits.iter().enumerate() {
                if b {
                    word |= 1 << i;
                }
            }
            assert!(seen.insert(word), "collision found");
        }
    }

    #[test]
    fn hash_id_round_trip_and_unknown() {
        assert_eq!(HashId::from_u8(1).unwrap(), HashId::Shake256);
        assert!(matches!(HashId::from_u8(9), Err(Error::UnknownHashId(9))));
    }

    #[test]
    fn empty_symbol_is_a_valid_symbol() {
        let empty_sym = Message::single(sym(b""));
        assert_eq!(empty_sym.len(), 1);
        assert!(!empty_sym.is_empty());
        assert_ne!(empty_sym, Message::empty());
    }

    #[test]
    fn syndrome_examples() {
        let q = 7u64;
        let alphas = vec![vec![1, 2], vec![3, 4], vec![5, 6]];
        // all-zero bits
        assert_eq!(
            syndrome(&[false, false, false], &alphas, q).unwrap(),
            vec![0, 0]
        );
        // unit bit selects one alpha
        assert_eq!(
            syndrome(&[false, true, false], &alphas, q).unwrap(),
            vec![3, 4]
        );
        // subset sum mod q
        assert_eq!(
            syndrome(&[true, false, true], &alphas, q).unwrap(),
            vec![6, 1]
        );
        assert!(matches!(
            syndrome(&[true], &alphas, q),
            Err(Error::LengthMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn syndrome_injective_on_hash_cube_for_independent_alphas() {
        // with linearly independent alphas and k <= h, distinct bit
        // vectors give distinct subset sums: all 2^k values enumerated
        let q = 257u64;
        let k = 10usize;
        let h = 12usize;
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let alphas: Vec<Vec<u64>> = loop {
            let cand: Vec<Vec<u64>> = (0..k)
                .map(|_| {
                    (0..h)
                        .map(|_| crate::linalg::uniform_residue(q, &mut rng))
                        .collect()
                })
                .collect();
            if crate::linalg::is_linearly_independent(&cand, q) {
                break cand;
            }
        };
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..1 << k {
            let bits: Vec<bool> = (0..k).map(|i| (mask >> i) & 1 == 1).collect();
            let beta = syndrome(&bits, &alphas, q).unwrap();
            assert!(seen.insert(beta), "collision at mask {mask}");
        }
    }

    #[test]
    fn concat_identity_and_length() {
        let x = Message::from_symbols(vec![sym(b"a"), sym(b"b")]);
        assert_eq!(x.concat(&Message::empty()), x);
        assert_eq!(Message::empty().concat(&x), x);
        let y = Message::single(sym(b"c"));
        assert_eq!(x.concat(&y).len(), x.len() + y.len());
    }

    #[test]
    fn scalar_mul_examples() {
        let x = Message::from_symbols(vec![sym(b"a"), sym(b"b")]);
        assert_eq!(x.scalar_mul(0, 16).unwrap(), Message::empty());
        assert_eq!(x.scalar_mul(1, 16).unwrap(), x);
        assert_eq!(x.scalar_mul(3, 16).unwrap().len(), 3 * x.len());
        assert!(matches!(
            x.scalar_mul(16, 16),
            Err(Error::CoefficientOutOfRange { coefficient: 16, p: 16 })
        ));
        let s = Signature::from_columns(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(s.scalar_mul(0, 16).unwrap(), Signature::empty());
        assert_eq!(s.scalar_mul(2, 16).unwrap().len(), 4);
    }

    #[test]
    fn functional_examples() {
        let x = Message::single(sym(b"x"));
        let y = Message::single(sym(b"y"));
        let zero = LinearFunctional::new(vec![0, 0], 16).unwrap();
        assert_eq!(zero.apply_messages(&[x.clone(), y.clone()]).unwrap(), Message::empty());
        let pick = LinearFunctional::new(vec![1, 0], 16).unwrap();
        assert_eq!(pick.apply_messages(&[x.clone(), y.clone()]).unwrap(), x);
        let f = LinearFunctional::new(vec![2, 1], 16).unwrap();
        let out = f.apply_messages(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(out.len(), 2 * x.len() + y.len());
        assert_eq!(
            out,
            Message::from_symbols(vec![sym(b"x"), sym(b"x"), sym(b"y")])
        );
        assert!(matches!(
            f.apply_messages(&[x]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
        assert!(LinearFunctional::new(vec![16], 16).is_err());
    }

    #[test]
    fn functional_symbol_multiset_matches_weights() {
        // exhaustive over small coefficient tuples: the output symbol
        // counts equal the coefficient-weighted counts
        let items = [Message::single(sym(b"u")), Message::single(sym(b"v"))];
        for c0 in 0..4u64 {
            for c1 in 0..4u64 {
                let f = LinearFunctional::new(vec![c0, c1], 16).unwrap();
                let out = f.apply_messages(&items).unwrap();
                let us = out.symbols().iter().filter(|s| s.as_bytes() == b"u").count();
                let vs = out.symbols().iter().filter(|s| s.as_bytes() == b"v").count();
                assert_eq!((us as u64, vs as u64), (c0, c1));
            }
        }
    }

    #[test]
    fn span_examples() {
        let a = sym(b"a");
        let b = sym(b"b");
        let queried = vec![a.clone(), b.clone()];
        let aba = Message::from_symbols(vec![a.clone(), b.clone(), a.clone()]);
        assert!(span_contains(&queried, &aba));
        assert!(!span_contains(&[a.clone()], &Message::single(b.clone())));
        assert!(!span_contains(&[], &Message::single(a.clone())));
        // the identity element is not a concatenation of queried symbols
        assert!(!span_contains(&queried, &Message::empty()));
    }

    proptest! {
        #[test]
        fn message_concat_is_associative(
            a in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..4), 0..4),
            b in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..4), 0..4),
            c in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..4), 0..4),
        ) {
            let m = |v: &Vec<Vec<u8>>| Message::from_symbols(
                v.iter().map(|s| Symbol::new(s.clone())).collect::<Vec<_>>());
            let (ma, mb, mc) = (m(&a), m(&b), m(&c));
            prop_assert_eq!(ma.concat(&mb).concat(&mc), ma.concat(&mb.concat(&mc)));
            prop_assert_eq!(ma.concat(&Message::empty()), ma.clone());
            prop_assert_eq!(Message::empty().concat(&ma), ma);
        }

        #[test]
        fn signature_concat_is_associative(
            a in proptest::collection::vec(proptest::collection::vec(-100i64..100, 3), 0..4),
            b in proptest::collection::vec(proptest::collection::vec(-100i64..100, 3), 0..4),
            c in proptest::collection::vec(proptest::collection::vec(-100i64..100, 3), 0..4),
        ) {
            let (sa, sb, sc) = (
                Signature::from_columns(a),
                Signature::from_columns(b),
                Signature::from_columns(c),
            );
            prop_assert_eq!(sa.concat(&sb).concat(&sc), sa.concat(&sb.concat(&sc)));
            prop_assert_eq!(sa.concat(&Signature::empty()), sa.clone());
            prop_assert_eq!(Signature::empty().concat(&sa), sa);
        }

        #[test]
        fn syndrome_depends_only_on_symbol(sym_bytes in proptest::collection::vec(any::<u8>(), 0..16)) {
            // per-symbol hashing has no positional state
            let s = Symbol::new(sym_bytes);
            let h1 = hash_symbol(&s, 16, HashId::Shake256).unwrap();
            let h2 = hash_symbol(&s, 16, HashId::Shake256).unwrap();
            prop_assert_eq!(h1, h2);
        }
    }
}
