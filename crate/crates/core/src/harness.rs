//! Executable form of the security arguments: simulated keygen and
//! signing for both schemes, extraction of short integer solutions from
//! forgeries, the unforgeability game runner, the weak-context-hiding
//! experiment, and empirical statistical distance.
//!
//! The simulators treat the public matrix as a problem instance: syndrome
//! vectors are images of secret short vectors, and simulated signatures
//! are the matching short combinations, so a verifying forgery outside the
//! query span collides with the simulator's secret preimages and the
//! difference is a short kernel vector.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::encode::{hash_symbol, LinearFunctional, Message, Signature, Symbol};
use crate::error::Error;
use crate::linalg::{is_linearly_independent, ZqMatrix};
use crate::lsh::{self, Tag};
use crate::params::Params;
use crate::sampler::sample_dom;
use crate::sh::{self, PublicKey, SecretKey, SignPolicy};
use crate::trapdoor::{tag_signs, trap_gen};
use crate::Clock;

/// Retry caps for the simulator loops.
const SIM_ALPHA_ROUNDS_CAP: usize = 64;
const GAMMA_TAIL_RESAMPLE_CAP: usize = 1024;

/// The reduction's secret: short preimages of the published syndrome
/// vectors, sampled at width `s_sim = v / sqrt(k)`.
#[derive(Debug, Clone)]
pub struct SimTrapdoor {
    pub gammas: Vec<Vec<i64>>,
}

/// A checked short integer solution for the public matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SisSolution {
    pub z: Vec<i64>,
    pub norm: f64,
}

impl SisSolution {
    /// `A z = 0 (mod q)`, `z != 0`, and `||z|| <= bound`.
    pub fn check(&self, a: &ZqMatrix, bound: f64) -> bool {
        self.z.iter().any(|&v| v != 0)
            && self.norm <= bound
            && a.mul_int_vec(&self.z).iter().all(|&r| r == 0)
    }
}

/// Simulated key generation on a given (uniform) instance matrix.
/// Returns the public key, the simulator secret, and the number of
/// resampling rounds the independence loop used.
pub fn sim_keygen(
    params: &Params,
    a: &ZqMatrix,
    rng: &mut dyn RngCore,
) -> Result<(PublicKey, SimTrapdoor, usize), Error> {
    if a.rows() != params.h || a.cols() != params.n {
        return Err(Error::InvalidDimension(format!(
            "instance is {}x{}, expected {}x{}",
            a.rows(),
            a.cols(),
            params.h,
            params.n
        )));
    }
    let tail_bound = params.s_sim * libm::sqrt(params.n as f64);
    for round in 1..=SIM_ALPHA_ROUNDS_CAP {
        let mut gammas = Vec::with_capacity(params.k);
        for _ in 0..params.k {
            let mut tries = 0;
            let gamma = loop {
                let g = sample_dom(params.n, params.s_sim, params.tail_cut, rng)?;
                let norm2: f64 = g.iter().map(|&v| v as f64 * v as f64).sum();
                if libm::sqrt(norm2) <= tail_bound {
                    break g;
                }
                tries += 1;
                if tries > GAMMA_TAIL_RESAMPLE_CAP {
                    return Err(Error::GenerationFailed(String::from(
                        "short-vector tail resampling stalled",
                    )));
                }
            };
            gammas.push(gamma);
        }
        let alphas: Vec<Vec<u64>> = gammas.iter().map(|g| a.mul_int_vec(g)).collect();
        if is_linearly_independent(&alphas, params.q) {
            let pk = PublicKey {
                params: params.clone(),
                a: a.clone(),
                alphas,
                hash_id: crate::encode::HashId::Shake256,
            };
            return Ok((pk, SimTrapdoor { gammas }, round));
        }
    }
    Err(Error::GenerationFailed(String::from(
        "simulated syndromes stayed dependent",
    )))
}

/// Deterministic simulated signature: each column is the hash-selected
/// combination of the simulator's secret short vectors.
pub fn sim_sign(pk: &PublicKey, trap: &SimTrapdoor, x: &Message) -> Result<Signature, Error> {
    let mut columns = Vec::with_capacity(x.len());
    for sym in x.symbols() {
        let bits = hash_symbol(sym, pk.params.k, pk.hash_id)?;
        columns.push(gamma_combination(&bits, &trap.gammas, pk.params.n));
    }
    Ok(Signature::from_columns(columns))
}

/// Tagged simulated signature: the sign-diagonal image of the untagged
/// combination.
pub fn lsh_sim_sign(
    pk: &PublicKey,
    trap: &SimTrapdoor,
    tau: &Tag,
    v: &Message,
) -> Result<Signature, Error> {
    if tau.len() != pk.params.n {
        return Err(Error::LengthMismatch {
            expected: pk.params.n,
            got: tau.len(),
        });
    }
    let signs = tag_signs(tau.bits());
    let mut columns = Vec::with_capacity(v.len());
    for sym in v.symbols() {
        let bits = hash_symbol(sym, pk.params.k, pk.hash_id)?;
        let mut col = gamma_combination(&bits, &trap.gammas, pk.params.n);
        for (value, &s) in col.iter_mut().zip(&signs) {
            *value *= s;
        }
        columns.push(col);
    }
    Ok(Signature::from_columns(columns))
}

fn gamma_combination(bits: &[bool], gammas: &[Vec<i64>], n: usize) -> Vec<i64> {
    let mut col = alloc::vec![0i64; n];
    for (&bit, gamma) in bits.iter().zip(gammas) {
        if !bit {
            continue;
        }
        for (c, &g) in col.iter_mut().zip(gamma) {
            *c += g;
        }
    }
    col
}

/// Extract a short kernel vector from a verifying forgery against a
/// simulated key. Returns `Ok(None)` when every forged column equals the
/// simulator's own combination (the negligible-probability blind spot).
pub fn extract_sis(
    pk: &PublicKey,
    trap: &SimTrapdoor,
    message: &Message,
    signature: &Signature,
    tag: Option<&Tag>,
) -> Result<Option<SisSolution>, Error> {
    let verified = match tag {
        Some(tau) => lsh::lsh_verify(pk, tau, message, signature),
        None => sh::verify(pk, message, signature),
    };
    if !verified {
        return Err(Error::NotAForgery);
    }
    let signs = tag.map(|t| tag_signs(t.bits()));
    for (sym, col) in message.symbols().iter().zip(signature.columns()) {
        let bits = hash_symbol(sym, pk.params.k, pk.hash_id)?;
        let expected = gamma_combination(&bits, &trap.gammas, pk.params.n);
        // H^T sigma_i for tagged forgeries (H is its own transpose)
        let mut z: Vec<i64> = match &signs {
            Some(s) => col.iter().zip(s).map(|(&v, &sg)| v * sg).collect(),
            None => col.clone(),
        };
        for (zv, &e) in z.iter_mut().zip(&expected) {
            *zv -= e;
        }
        if z.iter().any(|&v| v != 0) {
            let norm = libm::sqrt(z.iter().map(|&v| v as f64 * v as f64).sum());
            return Ok(Some(SisSolution { z, norm }));
        }
    }
    Ok(None)
}

/// Empirical statistical distance between two multisets over a binned
/// integer domain: half the l1 distance of the empirical frequencies.
pub fn statistical_distance(xs: &[i64], ys: &[i64]) -> Result<f64, Error> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut freq: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
    for &x in xs {
        freq.entry(x).or_default().0 += 1;
    }
    for &y in ys {
        freq.entry(y).or_default().1 += 1;
    }
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let sum: f64 = freq
        .values()
        .map(|&(cx, cy)| libm::fabs(cx as f64 / nx - cy as f64 / ny))
        .sum();
    Ok(sum / 2.0)
}

/// Bin a real value to an integer key of the given width.
pub fn bin_value(value: f64, width: f64) -> i64 {
    libm::floor(value / width) as i64
}

// ---------------------------------------------------------------------------
// unforgeability game
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Sh,
    Lsh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignerMode {
    Real,
    Simulated,
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub scheme: SchemeKind,
    pub mode: SignerMode,
    pub query_budget: usize,
    /// Answer repeated queries from a cache. The simulated signer is
    /// deterministic per symbol while the real one is randomized, so
    /// uncached repeats would distinguish the two; the games deduplicate
    /// by default and the transcript records cache hits.
    pub dedupe_queries: bool,
}

impl GameConfig {
    pub fn new(scheme: SchemeKind, mode: SignerMode, query_budget: usize) -> Self {
        GameConfig {
            scheme,
            mode,
            query_budget,
            dedupe_queries: true,
        }
    }
}

/// Key material for one game instance.
pub struct GameKeys {
    pub pk: PublicKey,
    /// Real secret key (real mode), or the instance trapdoor behind the
    /// simulated key (available to leakage-style adversaries only).
    pub sk: Option<SecretKey>,
    pub trap: Option<SimTrapdoor>,
    /// Rounds the simulated-keygen independence loop used.
    pub sim_rounds: usize,
}

impl GameKeys {
    pub fn generate(
        config: &GameConfig,
        params: &Params,
        rng: &mut dyn RngCore,
    ) -> Result<Self, Error> {
        match config.mode {
            SignerMode::Real => {
                let (pk, sk) = sh::gen(params, rng)?;
                Ok(GameKeys {
                    pk,
                    sk: Some(sk),
                    trap: None,
                    sim_rounds: 0,
                })
            }
            SignerMode::Simulated => {
                // the instance matrix comes from the trapdoor generator so
                // that leakage adversaries can forge against it; its
                // distribution is statistically close to uniform
                let td = trap_gen(params, rng)?;
                let (pk, trap, rounds) = sim_keygen(params, &td.a, rng)?;
                let sk = SecretKey::from_trapdoor(params, &td)?;
                Ok(GameKeys {
                    pk,
                    sk: Some(sk),
                    trap: Some(trap),
                    sim_rounds: rounds,
                })
            }
        }
    }
}

/// Transcript events, exportable as line-delimited text with hex payloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameEvent {
    Start {
        scheme: SchemeKind,
        mode: SignerMode,
        params_digest: String,
    },
    Query {
        index: usize,
        symbol: String,
        cached: bool,
    },
    Response {
        index: usize,
        signature: String,
    },
    TagIssued {
        index: usize,
        tag: String,
    },
    ForgeryClaimed {
        message: String,
        tag: Option<String>,
    },
    Verdict {
        verified: bool,
        win: bool,
        class: Option<ForgeryClass>,
        note: Option<String>,
    },
    Extraction {
        outcome: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForgeryClass {
    /// Plain-scheme forgery outside the concatenation span of the queries.
    Fresh,
    /// Tag never issued by the challenger.
    TypeI,
    /// Issued tag, message outside that data set's span.
    TypeII,
}

#[derive(Debug, Clone, Default)]
pub struct Transcript {
    pub events: Vec<GameEvent>,
}

impl Transcript {
    pub fn export_lines(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            match ev {
                GameEvent::Start {
                    scheme,
                    mode,
                    params_digest,
                } => {
                    out += &format!(
                        "start scheme={scheme:?} mode={mode:?} params={params_digest}\n"
                    );
                }
                GameEvent::Query {
                    index,
                    symbol,
                    cached,
                } => out += &format!("query {index} symbol={symbol} cached={cached}\n"),
                GameEvent::Response { index, signature } => {
                    out += &format!("response {index} sig={signature}\n")
                }
                GameEvent::TagIssued { index, tag } => {
                    out += &format!("tag {index} tau={tag}\n")
                }
                GameEvent::ForgeryClaimed { message, tag } => match tag {
                    Some(t) => out += &format!("forgery msg={message} tau={t}\n"),
                    None => out += &format!("forgery msg={message}\n"),
                },
                GameEvent::Verdict {
                    verified,
                    win,
                    class,
                    note,
                } => {
                    out += &format!("verdict verified={verified} win={win} class={class:?}");
                    if let Some(n) = note {
                        out += &format!(" note={n}");
                    }
                    out += "\n";
                }
                GameEvent::Extraction { outcome } => {
                    out += &format!("extraction {outcome}\n")
                }
            }
        }
        out
    }
}

fn short_hex(data: &[u8]) -> String {
    let mut xof = Shake256::default();
    xof.update(data);
    let mut reader = xof.finalize_xof();
    let mut bytes = [0u8; 8];
    reader.read(&mut bytes);
    let mut s = String::with_capacity(16);
    for b in bytes {
        s += &format!("{b:02x}");
    }
    s
}

fn signature_digest(sig: &Signature) -> String {
    let mut bytes = Vec::new();
    for col in sig.columns() {
        for &v in col {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    short_hex(&bytes)
}

fn message_digest(msg: &Message) -> String {
    let mut bytes = Vec::new();
    for s in msg.symbols() {
        bytes.extend_from_slice(&(s.as_bytes().len() as u64).to_le_bytes());
        bytes.extend_from_slice(s.as_bytes());
    }
    short_hex(&bytes)
}

/// The signing oracle handed to adversaries. Plain-scheme games answer
/// per-symbol queries; tagged games answer per-subset queries under a
/// fresh uniform tag.
pub struct Oracle<'a> {
    scheme: SchemeKind,
    pk: &'a PublicKey,
    sk: Option<&'a SecretKey>,
    trap: Option<&'a SimTrapdoor>,
    rng: &'a mut dyn RngCore,
    clock: &'a mut dyn Clock,
    budget: usize,
    used: usize,
    dedupe: bool,
    cache: BTreeMap<Vec<u8>, Signature>,
    queried: Vec<Symbol>,
    issued: Vec<(Tag, Vec<Symbol>)>,
    events: Vec<GameEvent>,
    oracle_nanos: u64,
}

impl<'a> Oracle<'a> {
    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn queries_used(&self) -> usize {
        self.used
    }

    /// The shared random stream; adversaries draw their randomness here so
    /// a fixed game seed fixes the whole transcript.
    pub fn rng(&mut self) -> &mut dyn RngCore {
        self.rng
    }

    fn charge(&mut self) -> Result<(), Error> {
        if self.used >= self.budget {
            return Err(Error::QueryBudgetExceeded {
                budget: self.budget,
            });
        }
        self.used += 1;
        Ok(())
    }

    fn sign_symbol(&mut self, x: &Symbol) -> Result<Signature, Error> {
        let msg = Message::single(x.clone());
        match (self.sk, self.trap) {
            (_, Some(trap)) => sim_sign(self.pk, trap, &msg),
            (Some(sk), None) => sh::sign(self.pk, sk, &msg, SignPolicy::SingleSymbolOnly, self.rng),
            (None, None) => Err(Error::GenerationFailed(String::from("oracle has no signer"))),
        }
    }

    /// Plain-scheme query on a single symbol.
    pub fn query_symbol(&mut self, x: &Symbol) -> Result<Signature, Error> {
        if self.scheme != SchemeKind::Sh {
            return Err(Error::MalformedAdversaryOutput(String::from(
                "symbol query in a tagged game",
            )));
        }
        let t0 = self.clock.nanos();
        let cached = self.dedupe && self.cache.contains_key(x.as_bytes());
        let index = self.events.len();
        self.events.push(GameEvent::Query {
            index,
            symbol: short_hex(x.as_bytes()),
            cached,
        });
        let sig = if cached {
            self.cache[x.as_bytes()].clone()
        } else {
            self.charge()?;
            let sig = self.sign_symbol(x)?;
            if self.dedupe {
                self.cache.insert(x.as_bytes().to_vec(), sig.clone());
            }
            self.queried.push(x.clone());
            sig
        };
        self.events.push(GameEvent::Response {
            index,
            signature: signature_digest(&sig),
        });
        self.oracle_nanos += self.clock.nanos().saturating_sub(t0);
        Ok(sig)
    }

    /// Tagged-scheme query: the challenger draws a fresh uniform tag and
    /// signs every symbol of the subset under it.
    pub fn query_subset(&mut self, symbols: &[Symbol]) -> Result<(Tag, Vec<Signature>), Error> {
        if self.scheme != SchemeKind::Lsh {
            return Err(Error::MalformedAdversaryOutput(String::from(
                "subset query in an untagged game",
            )));
        }
        if symbols.is_empty() {
            return Err(Error::MalformedAdversaryOutput(String::from(
                "empty query subset",
            )));
        }
        let t0 = self.clock.nanos();
        self.charge()?;
        let tau = Tag::uniform(self.pk.params.n, self.rng);
        let index = self.events.len();
        self.events.push(GameEvent::TagIssued {
            index,
            tag: short_hex(&tau.pack()),
        });
        let mut sigs = Vec::with_capacity(symbols.len());
        for sym in symbols {
            let msg = Message::single(sym.clone());
            let sig = match (self.sk, self.trap) {
                (_, Some(trap)) => lsh_sim_sign(self.pk, trap, &tau, &msg)?,
                (Some(sk), None) => {
                    lsh::lsh_sign(self.pk, sk, &tau, &msg, SignPolicy::SingleSymbolOnly, self.rng)?
                }
                (None, None) => {
                    return Err(Error::GenerationFailed(String::from("oracle has no signer")))
                }
            };
            self.events.push(GameEvent::Response {
                index,
                signature: signature_digest(&sig),
            });
            sigs.push(sig);
        }
        self.issued.push((tau.clone(), symbols.to_vec()));
        self.oracle_nanos += self.clock.nanos().saturating_sub(t0);
        Ok((tau, sigs))
    }
}

/// An adversary's claimed forgery.
#[derive(Debug, Clone)]
pub enum Forgery {
    Sh {
        message: Message,
        signature: Signature,
    },
    Lsh {
        tag: Tag,
        message: Message,
        signature: Signature,
    },
}

/// Adversary callback: receives the public key and a signing oracle and
/// returns a claimed forgery.
pub trait Adversary {
    fn forge(&mut self, pk: &PublicKey, oracle: &mut Oracle<'_>) -> Result<Forgery, Error>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtractionOutcome {
    Solution,
    Bot,
}

#[derive(Debug, Clone, Default)]
pub struct TimingReport {
    pub total_nanos: u64,
    pub adversary_nanos: u64,
    pub oracle_nanos: u64,
    /// Simulator work outside the adversary's own time: oracle answers
    /// plus classification and extraction.
    pub reduction_overhead_nanos: u64,
}

#[derive(Debug)]
pub struct GameOutcome {
    pub verified: bool,
    pub win: bool,
    pub forgery_class: Option<ForgeryClass>,
    pub extraction: Option<ExtractionOutcome>,
    pub solution: Option<SisSolution>,
    pub queries_used: usize,
    pub transcript: Transcript,
    pub timing: TimingReport,
}

/// Run one unforgeability game round: hand the adversary the public key
/// and oracle, then verify and classify its output; in simulated mode a
/// winning forgery additionally goes through extraction.
pub fn run_euf_cma_fmr(
    config: &GameConfig,
    keys: &GameKeys,
    adversary: &mut dyn Adversary,
    rng: &mut dyn RngCore,
    clock: &mut dyn Clock,
) -> Result<GameOutcome, Error> {
    let t_start = clock.nanos();
    let mut events = Vec::new();
    events.push(GameEvent::Start {
        scheme: config.scheme,
        mode: config.mode,
        params_digest: short_hex(&keys.pk.params.digest()),
    });

    let mut oracle = Oracle {
        scheme: config.scheme,
        pk: &keys.pk,
        sk: match config.mode {
            SignerMode::Real => keys.sk.as_ref(),
            SignerMode::Simulated => None,
        },
        trap: keys.trap.as_ref(),
        rng,
        clock,
        budget: config.query_budget,
        used: 0,
        dedupe: config.dedupe_queries,
        cache: BTreeMap::new(),
        queried: Vec::new(),
        issued: Vec::new(),
        events: Vec::new(),
        oracle_nanos: 0,
    };
    let forgery = adversary.forge(&keys.pk, &mut oracle)?;
    let Oracle {
        queried,
        issued,
        events: oracle_events,
        oracle_nanos,
        used,
        clock,
        ..
    } = oracle;
    let t_after_forge = clock.nanos();
    events.extend(oracle_events);

    let mut note = None;
    let (verified, class, tag_for_extract, message, signature) = match &forgery {
        Forgery::Sh { message, signature } => {
            if config.scheme != SchemeKind::Sh {
                return Err(Error::MalformedAdversaryOutput(String::from(
                    "untagged forgery in a tagged game",
                )));
            }
            events.push(GameEvent::ForgeryClaimed {
                message: message_digest(message),
                tag: None,
            });
            let verified = sh::verify(&keys.pk, message, signature);
            let class = if !verified {
                None
            } else if message.is_empty() {
                // the identity verifies under the empty signature by
                // convention; it is excluded as a trivial forgery
                note = Some(String::from("identity forgery excluded"));
                None
            } else if crate::encode::span_contains(&queried, message) {
                None
            } else {
                Some(ForgeryClass::Fresh)
            };
            (verified, class, None, message, signature)
        }
        Forgery::Lsh {
            tag,
            message,
            signature,
        } => {
            if config.scheme != SchemeKind::Lsh {
                return Err(Error::MalformedAdversaryOutput(String::from(
                    "tagged forgery in an untagged game",
                )));
            }
            events.push(GameEvent::ForgeryClaimed {
                message: message_digest(message),
                tag: Some(short_hex(&tag.pack())),
            });
            let verified = lsh::lsh_verify(&keys.pk, tag, message, signature);
            let class = if !verified {
                None
            } else if message.is_empty() {
                note = Some(String::from("identity forgery excluded"));
                None
            } else {
                let matching: Vec<&Vec<Symbol>> = issued
                    .iter()
                    .filter(|(t, _)| t == tag)
                    .map(|(_, syms)| syms)
                    .collect();
                if matching.is_empty() {
                    Some(ForgeryClass::TypeI)
                } else if matching
                    .iter()
                    .all(|syms| !crate::encode::span_contains(syms, message))
                {
                    Some(ForgeryClass::TypeII)
                } else {
                    None
                }
            };
            (verified, class, Some(tag), message, signature)
        }
    };
    let win = class.is_some();
    events.push(GameEvent::Verdict {
        verified,
        win,
        class,
        note,
    });

    let (extraction, solution) = if win && config.mode == SignerMode::Simulated {
        let trap = keys.trap.as_ref().expect("simulated game carries a trapdoor");
        match extract_sis(&keys.pk, trap, message, signature, tag_for_extract)? {
            Some(sol) => {
                events.push(GameEvent::Extraction {
                    outcome: format!("solution norm={:.1}", sol.norm),
                });
                (Some(ExtractionOutcome::Solution), Some(sol))
            }
            None => {
                events.push(GameEvent::Extraction {
                    outcome: String::from("bot"),
                });
                (Some(ExtractionOutcome::Bot), None)
            }
        }
    } else {
        (None, None)
    };

    let t_end = clock.nanos();
    let total = t_end.saturating_sub(t_start);
    let adversary_nanos = t_after_forge
        .saturating_sub(t_start)
        .saturating_sub(oracle_nanos);
    let timing = TimingReport {
        total_nanos: total,
        adversary_nanos,
        oracle_nanos,
        reduction_overhead_nanos: total.saturating_sub(adversary_nanos),
    };

    Ok(GameOutcome {
        verified,
        win,
        forgery_class: class,
        extraction,
        solution,
        queries_used: used,
        transcript: Transcript { events },
        timing,
    })
}

// ---------------------------------------------------------------------------
// reference adversaries
// ---------------------------------------------------------------------------

/// Replays a queried pair verbatim; always loses (in span).
pub struct ReplayAdversary {
    pub symbol: Symbol,
}

impl Adversary for ReplayAdversary {
    fn forge(&mut self, _pk: &PublicKey, oracle: &mut Oracle<'_>) -> Result<Forgery, Error> {
        match oracle.scheme() {
            SchemeKind::Sh => {
                let sig = oracle.query_symbol(&self.symbol)?;
                Ok(Forgery::Sh {
                    message: Message::single(self.symbol.clone()),
                    signature: sig,
                })
            }
            SchemeKind::Lsh => {
                let (tag, sigs) = oracle.query_subset(core::slice::from_ref(&self.symbol))?;
                Ok(Forgery::Lsh {
                    tag,
                    message: Message::single(self.symbol.clone()),
                    signature: sigs.into_iter().next().unwrap(),
                })
            }
        }
    }
}

/// Concatenates two query answers; always loses (homomorphic derivations
/// stay inside the span).
pub struct ConcatAdversary {
    pub first: Symbol,
    pub second: Symbol,
}

impl Adversary for ConcatAdversary {
    fn forge(&mut self, _pk: &PublicKey, oracle: &mut Oracle<'_>) -> Result<Forgery, Error> {
        match oracle.scheme() {
            SchemeKind::Sh => {
                let s1 = oracle.query_symbol(&self.first)?;
                let s2 = oracle.query_symbol(&self.second)?;
                Ok(Forgery::Sh {
                    message: Message::from_symbols(alloc::vec![
                        self.first.clone(),
                        self.second.clone()
                    ]),
                    signature: s1.concat(&s2),
                })
            }
            SchemeKind::Lsh => {
                let (tag, sigs) =
                    oracle.query_subset(&[self.first.clone(), self.second.clone()])?;
                Ok(Forgery::Lsh {
                    tag,
                    message: Message::from_symbols(alloc::vec![
                        self.first.clone(),
                        self.second.clone()
                    ]),
                    signature: sigs[0].concat(&sigs[1]),
                })
            }
        }
    }
}

/// Claims a uniformly random short-ish vector as the signature of a fresh
/// symbol; verification rejects it (a soundness smoke test).
pub struct RandomSignatureAdversary {
    pub fresh: Symbol,
}

impl Adversary for RandomSignatureAdversary {
    fn forge(&mut self, pk: &PublicKey, oracle: &mut Oracle<'_>) -> Result<Forgery, Error> {
        let n = pk.params.n;
        let reach = (pk.params.v as i64).max(1);
        let col: Vec<i64> = (0..n)
            .map(|_| (oracle.rng().next_u64() % (2 * reach as u64 + 1)) as i64 - reach)
            .collect();
        let signature = Signature::from_columns(alloc::vec![col]);
        let message = Message::single(self.fresh.clone());
        match oracle.scheme() {
            SchemeKind::Sh => Ok(Forgery::Sh { message, signature }),
            SchemeKind::Lsh => Ok(Forgery::Lsh {
                tag: Tag::uniform(n, oracle.rng()),
                message,
                signature,
            }),
        }
    }
}

/// Signs a fresh symbol with leaked real key material after a few honest
/// queries; wins the game, and in simulated mode feeds extraction.
pub struct TrapdoorLeakAdversary<'k> {
    pub leaked: &'k SecretKey,
    pub warmup: Vec<Symbol>,
    pub fresh: Symbol,
}

impl Adversary for TrapdoorLeakAdversary<'_> {
    fn forge(&mut self, pk: &PublicKey, oracle: &mut Oracle<'_>) -> Result<Forgery, Error> {
        match oracle.scheme() {
            SchemeKind::Sh => {
                for sym in &self.warmup {
                    oracle.query_symbol(sym)?;
                }
                let message = Message::single(self.fresh.clone());
                let signature = sh::sign(
                    pk,
                    self.leaked,
                    &message,
                    SignPolicy::SingleSymbolOnly,
                    oracle.rng(),
                )?;
                Ok(Forgery::Sh { message, signature })
            }
            SchemeKind::Lsh => {
                if !self.warmup.is_empty() {
                    oracle.query_subset(&self.warmup)?;
                }
                // a fresh tag makes this a type I forgery
                let tag = Tag::uniform(pk.params.n, oracle.rng());
                let message = Message::single(self.fresh.clone());
                let signature = lsh::lsh_sign(
                    pk,
                    self.leaked,
                    &tag,
                    &message,
                    SignPolicy::SingleSymbolOnly,
                    oracle.rng(),
                )?;
                Ok(Forgery::Lsh {
                    tag,
                    message,
                    signature,
                })
            }
        }
    }
}

/// Boxed reference adversary by name, for the command-line front end.
pub fn reference_adversary<'k>(
    name: &str,
    leaked: Option<&'k SecretKey>,
) -> Option<Box<dyn Adversary + 'k>> {
    let sym = |tag: u8| Symbol::new(alloc::vec![tag, 0x5a, tag ^ 0x33]);
    match name {
        "replay" => Some(Box::new(ReplayAdversary { symbol: sym(1) })),
        "concat" => Some(Box::new(ConcatAdversary {
            first: sym(2),
            second: sym(3),
        })),
        "random" => Some(Box::new(RandomSignatureAdversary { fresh: sym(4) })),
        "trapdoor-leak" => leaked.map(|sk| {
            Box::new(TrapdoorLeakAdversary {
                leaked: sk,
                warmup: alloc::vec![sym(5), sym(6)],
                fresh: sym(7),
            }) as Box<dyn Adversary + 'k>
        }),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// privacy experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PrivacyReport {
    /// Statistical distance of the projected combined-signature
    /// distributions, one entry per functional.
    pub distances: Vec<f64>,
    pub rounds: usize,
    pub bin_width: f64,
}

/// The weak-context-hiding experiment. For each side `b` and each round:
/// fresh uniform tag, sign the tuple `v_b`, combine per functional, and
/// bin the first coordinate of every combined column. The per-functional
/// distance between the two sides is returned.
///
/// Every functional must map both tuples to the same message; otherwise
/// the distributions differ trivially and the experiment refuses to run.
pub fn run_privacy_experiment(
    params: &Params,
    v0: &[Symbol],
    v1: &[Symbol],
    functionals: &[LinearFunctional],
    rounds: usize,
    rng: &mut dyn RngCore,
) -> Result<PrivacyReport, Error> {
    if v0.len() != v1.len() {
        return Err(Error::LengthMismatch {
            expected: v0.len(),
            got: v1.len(),
        });
    }
    let msgs0: Vec<Message> = v0.iter().cloned().map(Message::single).collect();
    let msgs1: Vec<Message> = v1.iter().cloned().map(Message::single).collect();
    for (i, f) in functionals.iter().enumerate() {
        if f.len() != v0.len() {
            return Err(Error::LengthMismatch {
                expected: v0.len(),
                got: f.len(),
            });
        }
        if f.apply_messages(&msgs0)? != f.apply_messages(&msgs1)? {
            return Err(Error::FunctionalMismatch { functional: i });
        }
    }

    let (pk, sk) = sh::gen(params, rng)?;
    let bin_width = libm::fmax(1.0, libm::round(params.v / 4.0));
    let p = functionals.iter().map(|f| f.p()).max().unwrap_or(crate::encode::DEFAULT_P);

    let mut bins: Vec<[Vec<i64>; 2]> = functionals
        .iter()
        .map(|_| [Vec::new(), Vec::new()])
        .collect();
    for _ in 0..rounds {
        for (side, tuple) in [&msgs0, &msgs1].into_iter().enumerate() {
            let tau = Tag::uniform(params.n, rng);
            let sigs: Vec<Signature> = tuple
                .iter()
                .map(|m| lsh::lsh_sign(&pk, &sk, &tau, m, SignPolicy::SingleSymbolOnly, rng))
                .collect::<Result<_, _>>()?;
            for (f_idx, f) in functionals.iter().enumerate() {
                let pairs: Vec<(u64, Signature)> = f
                    .coefficients()
                    .iter()
                    .cloned()
                    .zip(sigs.iter().cloned())
                    .collect();
                let combined = lsh::combine(&pk, &tau, &pairs, p)?;
                for col in combined.columns() {
                    bins[f_idx][side].push(bin_value(col[0] as f64, bin_width));
                }
            }
        }
    }

    let mut distances = Vec::with_capacity(functionals.len());
    for b in &bins {
        distances.push(statistical_distance(&b[0], &b[1])?);
    }
    Ok(PrivacyReport {
        distances,
        rounds,
        bin_width,
    })
}

/// Real-versus-simulated closeness on the column-norm projection: one real
/// key signing a fixed symbol repeatedly, against fresh simulator keys
/// producing one signature each. Returns the binned statistical distance.
pub fn run_closeness_experiment(
    params: &Params,
    symbol: &Symbol,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<f64, Error> {
    let bin_width = libm::fmax(1.0, libm::round(params.v / 4.0));
    let msg = Message::single(symbol.clone());

    let (pk, sk) = sh::gen(params, rng)?;
    let mut real_bins = Vec::with_capacity(samples);
    for _ in 0..samples {
        let sig = sh::sign(&pk, &sk, &msg, SignPolicy::SingleSymbolOnly, rng)?;
        real_bins.push(bin_value(sig.matrix_norm(), bin_width));
    }

    let mut sim_bins = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a = ZqMatrix::uniform(params.h, params.n, params.q, rng);
        let (pk_sim, trap, _) = sim_keygen(params, &a, rng)?;
        let sig = sim_sign(&pk_sim, &trap, &msg)?;
        sim_bins.push(bin_value(sig.matrix_norm(), bin_width));
    }

    statistical_distance(&real_bins, &sim_bins)
}
