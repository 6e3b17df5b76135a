//! Canonical binary envelopes for keys, signatures, messages, and tags.
//!
//! Every envelope is `magic (4) || version u16 || params digest (32) ||
//! body`; the digest ties the object to the parameter record it was built
//! under, and any two objects used together must carry the same digest.
//! Parameter records themselves use the fixed-order layout defined next to
//! the parameter type (magic `SGSP`, no digest). All integers are
//! little-endian; matrix entries over Z_q are `u64`, signature entries are
//! signed 64-bit, and an entry that cannot be represented is a hard error,
//! never a wraparound.

use sgsig_core::encode::{HashId, Message, Signature, Symbol};
use sgsig_core::linalg::{IntMatrix, ZqMatrix};
use sgsig_core::lsh::Tag;
use sgsig_core::sh::{PublicKey, SecretKey};
use sgsig_core::trapdoor::{BasisCertificate, Trapdoor};
use sgsig_core::params::PARAMS_RECORD_LEN;
use sgsig_core::{Error, Params};

pub const MAGIC_PUBLIC_KEY: [u8; 4] = *b"SGPK";
pub const MAGIC_SECRET_KEY: [u8; 4] = *b"SGSK";
pub const MAGIC_SIGNATURE: [u8; 4] = *b"SGSG";
pub const MAGIC_MESSAGE: [u8; 4] = *b"SGMS";
pub const MAGIC_TAG: [u8; 4] = *b"SGTG";

pub const FORMAT_VERSION: u16 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], Error> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Truncated);
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, Error> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, Error> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, Error> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64, Error> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn finish(&self) -> Result<(), Error> {
        if self.pos != self.bytes.len() {
            return Err(Error::Truncated);
        }
        Ok(())
    }
}

fn header(magic: [u8; 4], params: &Params, out: &mut Vec<u8>) {
    out.extend_from_slice(&magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&params.digest());
}

fn read_header(r: &mut Reader<'_>, magic: [u8; 4]) -> Result<[u8; 32], Error> {
    let got: [u8; 4] = r.take(4)?.try_into().unwrap();
    if got != magic {
        return Err(Error::BadMagic(got));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionUnsupported(version));
    }
    Ok(r.take(32)?.try_into().unwrap())
}

fn check_digest(digest: [u8; 32], params: &Params) -> Result<(), Error> {
    if digest != params.digest() {
        return Err(Error::ParamsMismatch);
    }
    Ok(())
}

// --- public keys -----------------------------------------------------------

fn push_pk_body(pk: &PublicKey, out: &mut Vec<u8>) {
    let params = &pk.params;
    for r in 0..params.h {
        for c in 0..params.n {
            out.extend_from_slice(&pk.a.entry(r, c).to_le_bytes());
        }
    }
    for alpha in &pk.alphas {
        for &v in alpha {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.push(pk.hash_id.as_u8());
}

fn read_pk_body(r: &mut Reader<'_>, params: &Params) -> Result<PublicKey, Error> {
    let mut entries = Vec::with_capacity(params.h * params.n);
    for _ in 0..params.h * params.n {
        let v = r.u64()?;
        if v >= params.q {
            return Err(Error::CoefficientOverflow);
        }
        entries.push(v as i64);
    }
    let a = ZqMatrix::from_rows(params.h, params.n, params.q, &entries);
    let mut alphas = Vec::with_capacity(params.k);
    for _ in 0..params.k {
        let mut alpha = Vec::with_capacity(params.h);
        for _ in 0..params.h {
            let v = r.u64()?;
            if v >= params.q {
                return Err(Error::CoefficientOverflow);
            }
            alpha.push(v);
        }
        alphas.push(alpha);
    }
    let hash_id = HashId::from_u8(r.u8()?)?;
    Ok(PublicKey {
        params: params.clone(),
        a,
        alphas,
        hash_id,
    })
}

/// `SGPK`: params record, then the public matrix row-major, the syndrome
/// vectors, and the hash id.
pub fn encode_public_key(pk: &PublicKey) -> Vec<u8> {
    let mut out = Vec::new();
    header(MAGIC_PUBLIC_KEY, &pk.params, &mut out);
    out.extend_from_slice(&pk.params.encode());
    push_pk_body(pk, &mut out);
    out
}

pub fn decode_public_key(bytes: &[u8]) -> Result<PublicKey, Error> {
    let mut r = Reader::new(bytes);
    let digest = read_header(&mut r, MAGIC_PUBLIC_KEY)?;
    let params = Params::decode(r.take(PARAMS_RECORD_LEN)?)?;
    check_digest(digest, &params)?;
    let pk = read_pk_body(&mut r, &params)?;
    r.finish()?;
    Ok(pk)
}

// --- secret keys -----------------------------------------------------------

/// `SGSK`: the full keypair. Body: params record, public-key body, the
/// trapdoor basis (i64, column-major), the narrow matrix R (i8), and the
/// gadget digits W (bit-packed). R and W let the loader rebuild the
/// structured sampler and re-verify the basis certificate.
pub fn encode_secret_key(pk: &PublicKey, sk: &SecretKey) -> Vec<u8> {
    let params = &pk.params;
    let mut out = Vec::new();
    header(MAGIC_SECRET_KEY, params, &mut out);
    out.extend_from_slice(&params.encode());
    push_pk_body(pk, &mut out);
    let t_a = sk.basis();
    for c in 0..t_a.cols() {
        for &v in t_a.col(c) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let cert = sk.certificate();
    for c in 0..cert.r.cols() {
        for &v in cert.r.col(c) {
            out.push(v as i8 as u8);
        }
    }
    let w = &cert.w_digits;
    let mut packed = vec![0u8; (w.rows() * w.cols()).div_ceil(8)];
    let mut idx = 0usize;
    for c in 0..w.cols() {
        for &v in w.col(c) {
            if v == 1 {
                packed[idx / 8] |= 1 << (idx % 8);
            }
            idx += 1;
        }
    }
    out.extend_from_slice(&packed);
    out
}

pub fn decode_secret_key(bytes: &[u8]) -> Result<(PublicKey, SecretKey), Error> {
    let mut r = Reader::new(bytes);
    let digest = read_header(&mut r, MAGIC_SECRET_KEY)?;
    let params = Params::decode(r.take(PARAMS_RECORD_LEN)?)?;
    check_digest(digest, &params)?;
    let pk = read_pk_body(&mut r, &params)?;

    let n = params.n;
    let mut t_a = IntMatrix::zero(n, n);
    for c in 0..n {
        for row in 0..n {
            t_a.set(row, c, r.i64()?);
        }
    }
    let w = params.gadget_block();
    let mbar = n - w;
    let mut rm = IntMatrix::zero(mbar, w);
    for c in 0..w {
        for row in 0..mbar {
            let v = r.u8()? as i8 as i64;
            if !(-1..=1).contains(&v) {
                return Err(Error::CoefficientOverflow);
            }
            rm.set(row, c, v);
        }
    }
    let packed = r.take((w * mbar).div_ceil(8))?;
    let mut wd = IntMatrix::zero(w, mbar);
    let mut idx = 0usize;
    for c in 0..mbar {
        for row in 0..w {
            if (packed[idx / 8] >> (idx % 8)) & 1 == 1 {
                wd.set(row, c, 1);
            }
            idx += 1;
        }
    }
    r.finish()?;

    let cert = BasisCertificate {
        r: rm,
        w_digits: wd,
    };
    sgsig_core::trapdoor::verify_basis_certificate(&params, &pk.a, &t_a, &cert)?;
    let trapdoor = Trapdoor {
        a: pk.a.clone(),
        t_a,
        cert,
    };
    let sk = SecretKey::from_trapdoor(&params, &trapdoor)?;
    Ok((pk, sk))
}

// --- signatures ------------------------------------------------------------

/// `SGSG`: `u32` vector count, `u32` n, then `n * count` signed 64-bit
/// entries, column-major. The empty signature has count 0 and n 0.
pub fn encode_signature(sig: &Signature, params: &Params) -> Vec<u8> {
    let mut out = Vec::new();
    header(MAGIC_SIGNATURE, params, &mut out);
    out.extend_from_slice(&(sig.len() as u32).to_le_bytes());
    out.extend_from_slice(&(sig.dim() as u32).to_le_bytes());
    for col in sig.columns() {
        for &v in col {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_signature(bytes: &[u8], params: &Params) -> Result<Signature, Error> {
    let mut r = Reader::new(bytes);
    let digest = read_header(&mut r, MAGIC_SIGNATURE)?;
    check_digest(digest, params)?;
    let count = r.u32()? as usize;
    let n = r.u32()? as usize;
    let mut columns = Vec::with_capacity(count);
    for _ in 0..count {
        let mut col = Vec::with_capacity(n);
        for _ in 0..n {
            col.push(r.i64()?);
        }
        columns.push(col);
    }
    r.finish()?;
    Ok(Signature::from_columns(columns))
}

// --- messages --------------------------------------------------------------

/// `SGMS`: `u32` symbol count, then per symbol `u32` length and raw bytes.
pub fn encode_message(msg: &Message, params: &Params) -> Vec<u8> {
    let mut out = Vec::new();
    header(MAGIC_MESSAGE, params, &mut out);
    out.extend_from_slice(&(msg.len() as u32).to_le_bytes());
    for sym in msg.symbols() {
        out.extend_from_slice(&(sym.as_bytes().len() as u32).to_le_bytes());
        out.extend_from_slice(sym.as_bytes());
    }
    out
}

pub fn decode_message(bytes: &[u8], params: &Params) -> Result<Message, Error> {
    let mut r = Reader::new(bytes);
    let digest = read_header(&mut r, MAGIC_MESSAGE)?;
    check_digest(digest, params)?;
    let count = r.u32()? as usize;
    let mut symbols = Vec::with_capacity(count);
    for _ in 0..count {
        let len = r.u32()? as usize;
        symbols.push(Symbol::new(r.take(len)?.to_vec()));
    }
    r.finish()?;
    Ok(Message::from_symbols(symbols))
}

// --- tags --------------------------------------------------------------

/// `SGTG`: n bits packed little-endian, zero-padded to a byte boundary;
/// n comes from the parameter set.
pub fn encode_tag(tag: &Tag, params: &Params) -> Vec<u8> {
    let mut out = Vec::new();
    header(MAGIC_TAG, params, &mut out);
    out.extend_from_slice(&tag.pack());
    out
}

pub fn decode_tag(bytes: &[u8], params: &Params) -> Result<Tag, Error> {
    let mut r = Reader::new(bytes);
    let digest = read_header(&mut r, MAGIC_TAG)?;
    check_digest(digest, params)?;
    let packed = r.take(params.n.div_ceil(8))?;
    r.finish()?;
    Tag::unpack(packed, params.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use sgsig_core::params::{derive_params, Strictness};

    fn small() -> Params {
        derive_params(30, 2, 3, Strictness::Relaxed).unwrap()
    }

    #[test]
    fn signature_and_message_round_trip() {
        let params = small();
        let sig = Signature::from_columns(vec![vec![1i64; 30], vec![-5i64; 30]]);
        let bytes = encode_signature(&sig, &params);
        assert_eq!(decode_signature(&bytes, &params).unwrap(), sig);

        let empty = Signature::empty();
        let bytes = encode_signature(&empty, &params);
        // the empty signature's body is a zero vector count
        assert_eq!(decode_signature(&bytes, &params).unwrap(), empty);

        let msg = Message::from_symbols(vec![Symbol::new(b"ab".to_vec()), Symbol::new(vec![])]);
        let bytes = encode_message(&msg, &params);
        assert_eq!(decode_message(&bytes, &params).unwrap(), msg);
    }

    #[test]
    fn key_round_trip() {
        let params = small();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (pk, sk) = sgsig_core::sh::gen(&params, &mut rng).unwrap();
        let pk_bytes = encode_public_key(&pk);
        let pk2 = decode_public_key(&pk_bytes).unwrap();
        assert_eq!(pk2.alphas, pk.alphas);
        assert_eq!(pk2.a, pk.a);
        assert_eq!(pk2.params, pk.params);

        let sk_bytes = encode_secret_key(&pk, &sk);
        let (pk3, sk2) = decode_secret_key(&sk_bytes).unwrap();
        assert_eq!(pk3.alphas, pk.alphas);
        assert_eq!(sk2.basis(), sk.basis());
        assert_eq!(sk2.certificate(), sk.certificate());
    }

    #[test]
    fn wrong_params_digest_is_rejected() {
        let params = small();
        let other = derive_params(30, 1, 3, Strictness::Relaxed).unwrap();
        let sig = Signature::empty();
        let bytes = encode_signature(&sig, &params);
        assert_eq!(
            decode_signature(&bytes, &other),
            Err(Error::ParamsMismatch)
        );
    }

    #[test]
    fn header_errors() {
        let params = small();
        let bytes = encode_signature(&Signature::empty(), &params);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode_signature(&bad, &params),
            Err(Error::BadMagic(_))
        ));
        let mut vbad = bytes.clone();
        vbad[4] = 0xff;
        assert!(matches!(
            decode_signature(&vbad, &params),
            Err(Error::VersionUnsupported(_))
        ));
        assert_eq!(
            decode_signature(&bytes[..bytes.len() - 1], &params),
            Err(Error::Truncated)
        );
        let mut extended = bytes.clone();
        extended.push(0);
        assert_eq!(
            decode_signature(&extended, &params),
            Err(Error::Truncated)
        );
    }

    #[test]
    fn tag_round_trip() {
        let params = small();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let tag = Tag::uniform(params.n, &mut rng);
        let bytes = encode_tag(&tag, &params);
        assert_eq!(decode_tag(&bytes, &params).unwrap(), tag);
    }

    #[test]
    fn out_of_range_residue_is_coefficient_overflow() {
        let params = small();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pk, _) = sgsig_core::sh::gen(&params, &mut rng).unwrap();
        let mut bytes = encode_public_key(&pk);
        // first matrix entry sits right after header + params record
        let off = 4 + 2 + 32 + sgsig_core::params::PARAMS_RECORD_LEN;
        bytes[off..off + 8].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(
            decode_public_key(&bytes),
            Err(Error::CoefficientOverflow)
        ));
    }
}
