//! Command-line front end: key generation, signing, verification,
//! homomorphic concatenation, the tagged scheme, and the security-harness
//! experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or IO error,
//! 3 internal invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::ChaCha20Rng;
use rand_core::{OsRng, RngCore, SeedableRng};

use sgsig_cli::codec;
use sgsig_cli::StdClock;
use sgsig_core::encode::{Message, Signature, Symbol, DEFAULT_P};
use sgsig_core::harness::{
    reference_adversary, run_privacy_experiment, GameConfig, GameKeys, SchemeKind, SignerMode,
};
use sgsig_core::lsh::Tag;
use sgsig_core::params::derive_params;
use sgsig_core::sh::SignPolicy;
use sgsig_core::{Error, Params, Strictness};

#[derive(Parser)]
#[command(name = "sgsig", about = "Semigroup-homomorphic signatures over q-ary lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Toy,
    PaperStrict,
}

#[derive(Args)]
struct ParamsSource {
    /// Load parameters from a serialized record.
    #[arg(long)]
    params_file: Option<PathBuf>,
    /// Built-in parameter preset.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Subcommand)]
enum Command {
    /// Derive parameters and write the binary record.
    Params {
        #[command(flatten)]
        source: ParamsSource,
        /// Explicit dimension (alternative to a preset).
        #[arg(long)]
        n: Option<usize>,
        /// Explicit hash length.
        #[arg(long)]
        k: Option<usize>,
        /// Explicit modulus.
        #[arg(long)]
        q: Option<u64>,
        /// Enforce the strict modulus bound for explicit parameters.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a key pair; writes BASE.pk and BASE.sk.
    Keygen {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long)]
        seed: Option<String>,
        /// Output path base.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a message with a secret key.
    Sign {
        /// Secret-key file (.sk).
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        msg: MessageSource,
        #[arg(long)]
        seed: Option<String>,
        /// Restrict signing to single-symbol messages.
        #[arg(long)]
        policy_single_symbol: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also write the parsed message in binary form.
        #[arg(long)]
        msg_out: Option<PathBuf>,
    },
    /// Verify a signature; prints ACCEPT or REJECT.
    Verify {
        /// Public-key file (.pk).
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        msg: MessageSource,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Concatenate two signatures or two messages (detected by magic).
    Concat {
        /// Public-key file used for the parameter digest.
        #[arg(long)]
        key: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a message under a data-set tag.
    LshSign {
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        msg: MessageSource,
        /// Tag file; a fresh uniform tag is drawn when absent.
        #[arg(long)]
        tag: Option<PathBuf>,
        /// Where to write the tag that was used.
        #[arg(long)]
        tag_out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        policy_single_symbol: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine tagged signatures with coefficients.
    LshCombine {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        tag: PathBuf,
        /// Comma-separated coefficients, one per signature.
        #[arg(long)]
        coeffs: String,
        /// Signature files, in coefficient order.
        #[arg(long, num_args = 1..)]
        sigs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a tagged signature; prints ACCEPT or REJECT.
    LshVerify {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        tag: PathBuf,
        #[command(flatten)]
        msg: MessageSource,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Run one unforgeability game round with a reference adversary.
    Game {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long, value_enum, default_value = "sh")]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "sim")]
        mode: ModeArg,
        /// replay | concat | random | trapdoor-leak
        #[arg(long, default_value = "trapdoor-leak")]
        adversary: String,
        #[arg(long, default_value_t = 8)]
        queries: usize,
        #[arg(long)]
        seed: Option<String>,
        /// Write the line-delimited transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run the weak-context-hiding experiment.
    Privacy {
        #[command(flatten)]
        source: ParamsSource,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        #[arg(long)]
        seed: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Sh,
    Lsh,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Real,
    Sim,
}

#[derive(Args)]
struct MessageSource {
    /// Binary message file.
    #[arg(long)]
    msg_file: Option<PathBuf>,
    /// Text file; each line becomes one symbol.
    #[arg(long)]
    msg_text: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::GenerationFailed(_) | Error::SamplerStuck | Error::RankDeficient { .. } => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_params(source: &ParamsSource) -> Result<Params, CliError> {
    match (&source.params_file, source.preset) {
        (Some(path), _) => Ok(Params::decode(&fs::read(path)?)?),
        (None, Some(Preset::Toy)) => Ok(Params::toy()),
        (None, Some(Preset::PaperStrict)) => Ok(Params::paper_strict()),
        (None, None) => Err(CliError::Usage(String::from(
            "need --params-file or --preset",
        ))),
    }
}

fn make_rng(seed: &Option<String>) -> Result<ChaCha20Rng, CliError> {
    let mut bytes = [0u8; 32];
    match seed {
        Some(hexstr) => {
            let decoded = hex::decode(hexstr)
                .map_err(|e| CliError::Usage(format!("bad --seed hex: {e}")))?;
            if decoded.len() > 32 {
                return Err(CliError::Usage(String::from("--seed longer than 32 bytes")));
            }
            bytes[..decoded.len()].copy_from_slice(&decoded);
        }
        None => {
            OsRng.fill_bytes(&mut bytes);
            eprintln!("seed: {}", hex::encode(bytes));
        }
    }
    Ok(ChaCha20Rng::from_seed(bytes))
}

fn read_message(src: &MessageSource, params: &Params) -> Result<Message, CliError> {
    match (&src.msg_file, &src.msg_text) {
        (Some(path), None) => Ok(codec::decode_message(&fs::read(path)?, params)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            let symbols: Vec<Symbol> = text
                .lines()
                .map(|line| Symbol::new(line.as_bytes().to_vec()))
                .collect();
            Ok(Message::from_symbols(symbols))
        }
        _ => Err(CliError::Usage(String::from(
            "need exactly one of --msg-file or --msg-text",
        ))),
    }
}

fn load_public_key(path: &Path) -> Result<sgsig_core::sh::PublicKey, CliError> {
    Ok(codec::decode_public_key(&fs::read(path)?)?)
}

fn load_secret_key(
    path: &Path,
) -> Result<(sgsig_core::sh::PublicKey, sgsig_core::sh::SecretKey), CliError> {
    Ok(codec::decode_secret_key(&fs::read(path)?)?)
}

fn policy(single: bool) -> SignPolicy {
    if single {
        SignPolicy::SingleSymbolOnly
    } else {
        SignPolicy::AnyMessage
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Params {
            source,
            n,
            k,
            q,
            strict,
            out,
        } => {
            let params = match (n, k, q) {
                (Some(n), Some(k), Some(q)) => derive_params(
                    n,
                    k,
                    q,
                    if strict {
                        Strictness::PaperStrict
                    } else {
                        Strictness::Relaxed
                    },
                )?,
                (None, None, None) => load_params(&source)?,
                _ => {
                    return Err(CliError::Usage(String::from(
                        "give all of --n, --k, --q or none",
                    )))
                }
            };
            println!(
                "n={} q={} k={} h={} v={:.3} s_sim={:.3} tail_cut={} mode={:?}",
                params.n,
                params.q,
                params.k,
                params.h,
                params.v,
                params.s_sim,
                params.tail_cut,
                params.strictness
            );
            if let Some(path) = out {
                fs::write(path, params.encode())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Keygen { source, seed, out } => {
            let params = load_params(&source)?;
            let mut rng = make_rng(&seed)?;
            let (pk, sk) = sgsig_core::sh::gen(&params, &mut rng)?;
            let pk_path = out.with_extension("pk");
            let sk_path = out.with_extension("sk");
            fs::write(&pk_path, codec::encode_public_key(&pk))?;
            fs::write(&sk_path, codec::encode_secret_key(&pk, &sk))?;
            println!(
                "wrote {} and {} (gs-norm {:.3})",
                pk_path.display(),
                sk_path.display(),
                sk.gram_schmidt_norm()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sign {
            key,
            msg,
            seed,
            policy_single_symbol,
            out,
            msg_out,
        } => {
            let (pk, sk) = load_secret_key(&key)?;
            let message = read_message(&msg, &pk.params)?;
            let mut rng = make_rng(&seed)?;
            let sig = sgsig_core::sh::sign(
                &pk,
                &sk,
                &message,
                policy(policy_single_symbol),
                &mut rng,
            )?;
            fs::write(&out, codec::encode_signature(&sig, &pk.params))?;
            if let Some(mpath) = msg_out {
                fs::write(mpath, codec::encode_message(&message, &pk.params))?;
            }
            println!("signed {} symbol(s)", message.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { key, msg, sig } => {
            let pk = load_public_key(&key)?;
            let message = read_message(&msg, &pk.params)?;
            let signature = codec::decode_signature(&fs::read(sig)?, &pk.params)?;
            if sgsig_core::sh::verify(&pk, &message, &signature) {
                println!("ACCEPT");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("REJECT");
                Ok(ExitCode::from(1))
            }
        }
        Command::Concat {
            key,
            first,
            second,
            out,
        } => {
            let pk = load_public_key(&key)?;
            let a = fs::read(&first)?;
            let b = fs::read(&second)?;
            if a.get(..4) == Some(&codec::MAGIC_SIGNATURE[..]) {
                let sa = codec::decode_signature(&a, &pk.params)?;
                let sb = codec::decode_signature(&b, &pk.params)?;
                let joined = sgsig_core::sh::hom_concat(&sa, &sb);
                fs::write(&out, codec::encode_signature(&joined, &pk.params))?;
            } else if a.get(..4) == Some(&codec::MAGIC_MESSAGE[..]) {
                let ma = codec::decode_message(&a, &pk.params)?;
                let mb = codec::decode_message(&b, &pk.params)?;
                fs::write(&out, codec::encode_message(&ma.concat(&mb), &pk.params))?;
            } else {
                return Err(CliError::Usage(String::from(
                    "inputs must both be signatures or both be messages",
                )));
            }
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::LshSign {
            key,
            msg,
            tag,
            tag_out,
            seed,
            policy_single_symbol,
            out,
        } => {
            let (pk, sk) = load_secret_key(&key)?;
            let message = read_message(&msg, &pk.params)?;
            let mut rng = make_rng(&seed)?;
            let tau = match tag {
                Some(path) => codec::decode_tag(&fs::read(path)?, &pk.params)?,
                None => Tag::uniform(pk.params.n, &mut rng),
            };
            let sig = sgsig_core::lsh::lsh_sign(
                &pk,
                &sk,
                &tau,
                &message,
                policy(policy_single_symbol),
                &mut rng,
            )?;
            fs::write(&out, codec::encode_signature(&sig, &pk.params))?;
            if let Some(tpath) = tag_out {
                fs::write(tpath, codec::encode_tag(&tau, &pk.params))?;
            }
            println!("signed {} symbol(s) under tag", message.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::LshCombine {
            key,
            tag,
            coeffs,
            sigs,
            out,
        } => {
            let pk = load_public_key(&key)?;
            let tau = codec::decode_tag(&fs::read(tag)?, &pk.params)?;
            let coefficients: Vec<u64> = coeffs
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<u64>()
                        .map_err(|e| CliError::Usage(format!("bad coefficient {c:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if coefficients.len() != sigs.len() {
                return Err(CliError::Usage(format!(
                    "{} coefficients for {} signatures",
                    coefficients.len(),
                    sigs.len()
                )));
            }
            let mut pairs: Vec<(u64, Signature)> = Vec::new();
            for (c, path) in coefficients.into_iter().zip(&sigs) {
                let sig = codec::decode_signature(&fs::read(path)?, &pk.params)?;
                pairs.push((c, sig));
            }
            let combined = sgsig_core::lsh::combine(&pk, &tau, &pairs, DEFAULT_P)?;
            fs::write(&out, codec::encode_signature(&combined, &pk.params))?;
            println!("combined {} signature(s)", pairs.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::LshVerify { key, tag, msg, sig } => {
            let pk = load_public_key(&key)?;
            let tau = codec::decode_tag(&fs::read(tag)?, &pk.params)?;
            let message = read_message(&msg, &pk.params)?;
            let signature = codec::decode_signature(&fs::read(sig)?, &pk.params)?;
            if sgsig_core::lsh::lsh_verify(&pk, &tau, &message, &signature) {
                println!("ACCEPT");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("REJECT");
                Ok(ExitCode::from(1))
            }
        }
        Command::Game {
            source,
            scheme,
            mode,
            adversary,
            queries,
            seed,
            transcript,
        } => {
            let params = load_params(&source)?;
            let mut rng = make_rng(&seed)?;
            let config = GameConfig::new(
                match scheme {
                    SchemeArg::Sh => SchemeKind::Sh,
                    SchemeArg::Lsh => SchemeKind::Lsh,
                },
                match mode {
                    ModeArg::Real => SignerMode::Real,
                    ModeArg::Sim => SignerMode::Simulated,
                },
                queries,
            );
            let keys = GameKeys::generate(&config, &params, &mut rng)?;
            let mut adv = reference_adversary(&adversary, keys.sk.as_ref()).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown adversary {adversary:?} (replay, concat, random, trapdoor-leak)"
                ))
            })?;
            let mut clock = StdClock::new();
            let outcome = sgsig_core::harness::run_euf_cma_fmr(
                &config,
                &keys,
                adv.as_mut(),
                &mut rng,
                &mut clock,
            )?;
            println!(
                "verified={} win={} class={:?} queries={}",
                outcome.verified, outcome.win, outcome.forgery_class, outcome.queries_used
            );
            if outcome.extraction.is_some() {
                match &outcome.solution {
                    Some(sol) => println!(
                        "extraction: solution norm={:.1} bound={:.1}",
                        sol.norm,
                        2.0 * params.verify_norm_bound()
                    ),
                    None => println!("extraction: bot"),
                }
            }
            let t = &outcome.timing;
            println!(
                "timing: total={}ns adversary={}ns oracle={}ns reduction-overhead={}ns",
                t.total_nanos, t.adversary_nanos, t.oracle_nanos, t.reduction_overhead_nanos
            );
            if let Some(path) = transcript {
                fs::write(path, outcome.transcript.export_lines())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Privacy {
            source,
            rounds,
            seed,
        } => {
            let params = load_params(&source)?;
            let mut rng = make_rng(&seed)?;
            let shared = Symbol::new(b"shared".to_vec());
            let v0 = vec![shared.clone(), Symbol::new(b"left".to_vec())];
            let v1 = vec![shared, Symbol::new(b"right".to_vec())];
            let functionals = vec![
                sgsig_core::encode::LinearFunctional::new(vec![1, 0], DEFAULT_P)?,
                sgsig_core::encode::LinearFunctional::new(vec![3, 0], DEFAULT_P)?,
            ];
            let report =
                run_privacy_experiment(&params, &v0, &v1, &functionals, rounds, &mut rng)?;
            for (i, d) in report.distances.iter().enumerate() {
                println!(
                    "functional {i}: statistical distance {d:.4} over {} rounds (bin width {})",
                    report.rounds, report.bin_width
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
