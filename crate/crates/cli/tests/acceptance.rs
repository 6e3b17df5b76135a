//! Acceptance suite for the file formats and the command-line pipeline:
//! round-trip laws for every envelope type, corruption handling, and
//! byte-identical seeded runs end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sgsig_cli::codec;
use sgsig_core::encode::{Message, Signature, Symbol};
use sgsig_core::lsh::Tag;
use sgsig_core::params::{derive_params, Strictness};
use sgsig_core::Params;

fn small_params() -> Params {
    derive_params(64, 2, 17, Strictness::Relaxed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signature_round_trip(cols in proptest::collection::vec(
        proptest::collection::vec(-1_000_000i64..1_000_000, 64), 0..5)) {
        let params = small_params();
        let sig = Signature::from_columns(cols);
        let bytes = codec::encode_signature(&sig, &params);
        prop_assert_eq!(codec::decode_signature(&bytes, &params).unwrap(), sig);
    }

    #[test]
    fn message_round_trip(syms in proptest::collection::vec(
        proptest::collection::vec(any::<u8>(), 0..32), 0..6)) {
        let params = small_params();
        let msg = Message::from_symbols(
            syms.into_iter().map(Symbol::new).collect::<Vec<_>>());
        let bytes = codec::encode_message(&msg, &params);
        prop_assert_eq!(codec::decode_message(&bytes, &params).unwrap(), msg);
    }

    #[test]
    fn tag_round_trip(bits in proptest::collection::vec(any::<bool>(), 64)) {
        let params = small_params();
        let tag = Tag::new(bits);
        let bytes = codec::encode_tag(&tag, &params);
        prop_assert_eq!(codec::decode_tag(&bytes, &params).unwrap(), tag);
    }

    #[test]
    fn params_record_round_trip(n in 0usize..6, k in 1usize..3) {
        // a handful of valid derivations; decode must reproduce bit-exactly
        let dims = [30usize, 48, 64, 96, 128, 256];
        let qs = [3u64, 5, 17, 257];
        for &q in &qs {
            if let Ok(p) = derive_params(dims[n], k, q, Strictness::Relaxed) {
                let bytes = p.encode();
                prop_assert_eq!(Params::decode(&bytes).unwrap(), p);
            }
        }
    }
}

#[test]
fn key_files_round_trip() {
    let params = small_params();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (pk, sk) = sgsig_core::sh::gen(&params, &mut rng).unwrap();
    let pk_bytes = codec::encode_public_key(&pk);
    let decoded_pk = codec::decode_public_key(&pk_bytes).unwrap();
    assert_eq!(decoded_pk.a, pk.a);
    assert_eq!(decoded_pk.alphas, pk.alphas);
    // canonical: re-encoding reproduces the same bytes
    assert_eq!(codec::encode_public_key(&decoded_pk), pk_bytes);

    let sk_bytes = codec::encode_secret_key(&pk, &sk);
    let (pk2, sk2) = codec::decode_secret_key(&sk_bytes).unwrap();
    assert_eq!(codec::encode_secret_key(&pk2, &sk2), sk_bytes);
    assert_eq!(sk2.basis(), sk.basis());
}

#[test]
fn corrupted_payloads_never_pass() {
    // flipping any single body byte must yield a decode error or a
    // signature that no longer verifies
    let params = small_params();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let (pk, sk) = sgsig_core::sh::gen(&params, &mut rng).unwrap();
    let msg = Message::single(Symbol::new(b"payload".to_vec()));
    let sig = sgsig_core::sh::sign(
        &pk,
        &sk,
        &msg,
        sgsig_core::sh::SignPolicy::AnyMessage,
        &mut rng,
    )
    .unwrap();
    assert!(sgsig_core::sh::verify(&pk, &msg, &sig));
    let bytes = codec::encode_signature(&sig, &params);

    let mut survived = 0u32;
    for trial in 0..1000 {
        let pos = (rng.next_u64() as usize) % bytes.len();
        let mut bit = 1u8 << (rng.next_u64() % 8);
        if bit == 0 {
            bit = 1;
        }
        let mut corrupted = bytes.clone();
        corrupted[pos] ^= bit;
        match codec::decode_signature(&corrupted, &params) {
            Err(_) => {}
            Ok(decoded) => {
                if sgsig_core::sh::verify(&pk, &msg, &decoded) {
                    survived += 1;
                    eprintln!("trial {trial}: flip at {pos} survived");
                }
            }
        }
    }
    assert_eq!(survived, 0, "{survived} corruptions passed verification");
}

// --- end-to-end pipeline through the binary --------------------------------

fn sgsig() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgsig"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn sgsig");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// One full keygen/sign/verify/concat pipeline into `dir`, fully seeded.
fn run_pipeline(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fs::create_dir_all(dir).unwrap();
    let p = |name: &str| dir.join(name);
    run_ok(sgsig()
        .args(["params", "--n", "64", "--k", "2", "--q", "17", "--out"])
        .arg(p("params.sgsp")));
    run_ok(sgsig()
        .args(["keygen", "--params-file"])
        .arg(p("params.sgsp"))
        .args(["--seed", "0102030405", "--out"])
        .arg(p("key")));
    fs::write(p("msg.txt"), "first symbol\nsecond symbol\n").unwrap();
    run_ok(sgsig()
        .args(["sign", "--key"])
        .arg(p("key.sk"))
        .args(["--msg-text"])
        .arg(p("msg.txt"))
        .args(["--seed", "a1b2c3", "--out"])
        .arg(p("sig.sgsg"))
        .args(["--msg-out"])
        .arg(p("msg.sgms")));
    let verdict = run_ok(sgsig()
        .args(["verify", "--key"])
        .arg(p("key.pk"))
        .args(["--msg-file"])
        .arg(p("msg.sgms"))
        .args(["--sig"])
        .arg(p("sig.sgsg")));
    assert_eq!(String::from_utf8_lossy(&verdict.stdout).trim(), "ACCEPT");

    // homomorphic path: concatenated signature verifies the concatenated
    // message
    run_ok(sgsig()
        .args(["concat", "--key"])
        .arg(p("key.pk"))
        .arg(p("sig.sgsg"))
        .arg(p("sig.sgsg"))
        .args(["--out"])
        .arg(p("sig2.sgsg")));
    run_ok(sgsig()
        .args(["concat", "--key"])
        .arg(p("key.pk"))
        .arg(p("msg.sgms"))
        .arg(p("msg.sgms"))
        .args(["--out"])
        .arg(p("msg2.sgms")));
    let verdict = run_ok(sgsig()
        .args(["verify", "--key"])
        .arg(p("key.pk"))
        .args(["--msg-file"])
        .arg(p("msg2.sgms"))
        .args(["--sig"])
        .arg(p("sig2.sgsg")));
    assert_eq!(String::from_utf8_lossy(&verdict.stdout).trim(), "ACCEPT");

    // tagged path with a pinned tag
    run_ok(sgsig()
        .args(["lsh-sign", "--key"])
        .arg(p("key.sk"))
        .args(["--msg-file"])
        .arg(p("msg.sgms"))
        .args(["--seed", "0990", "--tag-out"])
        .arg(p("tag.sgtg"))
        .args(["--out"])
        .arg(p("lsig.sgsg")));
    let verdict = run_ok(sgsig()
        .args(["lsh-verify", "--key"])
        .arg(p("key.pk"))
        .args(["--tag"])
        .arg(p("tag.sgtg"))
        .args(["--msg-file"])
        .arg(p("msg.sgms"))
        .args(["--sig"])
        .arg(p("lsig.sgsg")));
    assert_eq!(String::from_utf8_lossy(&verdict.stdout).trim(), "ACCEPT");

    // game transcript, seeded
    run_ok(sgsig()
        .args(["game", "--params-file"])
        .arg(p("params.sgsp"))
        .args([
            "--scheme",
            "lsh",
            "--mode",
            "sim",
            "--adversary",
            "trapdoor-leak",
            "--seed",
            "77",
            "--transcript",
        ])
        .arg(p("transcript.txt")));

    let mut files: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path.file_name().unwrap().into(), bytes)
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_11_seeded_pipeline_is_byte_identical() {
    let base = tempfile::tempdir().unwrap();
    let first = run_pipeline(&base.path().join("run1"));
    let second = run_pipeline(&base.path().join("run2"));
    assert_eq!(first.len(), second.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(name_a, name_b);
        assert_eq!(
            bytes_a, bytes_b,
            "file {} differs between seeded runs",
            name_a.display()
        );
    }
    println!(
        "ACCEPTANCE 11 serialization/CLI: PASS {} artifacts byte-identical across seeded runs",
        first.len()
    );
}

#[test]
fn rejects_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    run_ok(sgsig()
        .args(["keygen", "--preset", "toy", "--seed", "11", "--out"])
        .arg(p("key")));
    fs::write(p("msg.txt"), "one\n").unwrap();
    run_ok(sgsig()
        .args(["sign", "--key"])
        .arg(p("key.sk"))
        .args(["--msg-text"])
        .arg(p("msg.txt"))
        .args(["--seed", "22", "--out"])
        .arg(p("sig.sgsg")));
    fs::write(p("other.txt"), "two\n").unwrap();
    let out = sgsig()
        .args(["verify", "--key"])
        .arg(p("key.pk"))
        .args(["--msg-text"])
        .arg(p("other.txt"))
        .args(["--sig"])
        .arg(p("sig.sgsg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "REJECT");
}

#[test]
fn params_mismatch_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    // key under one parameter set, signature under another
    run_ok(sgsig()
        .args(["params", "--n", "64", "--k", "2", "--q", "17", "--out"])
        .arg(p("pa.sgsp")));
    run_ok(sgsig()
        .args(["params", "--n", "64", "--k", "1", "--q", "17", "--out"])
        .arg(p("pb.sgsp")));
    run_ok(sgsig()
        .args(["keygen", "--params-file"])
        .arg(p("pa.sgsp"))
        .args(["--seed", "31", "--out"])
        .arg(p("ka")));
    run_ok(sgsig()
        .args(["keygen", "--params-file"])
        .arg(p("pb.sgsp"))
        .args(["--seed", "32", "--out"])
        .arg(p("kb")));
    fs::write(p("msg.txt"), "x\n").unwrap();
    run_ok(sgsig()
        .args(["sign", "--key"])
        .arg(p("kb.sk"))
        .args(["--msg-text"])
        .arg(p("msg.txt"))
        .args(["--seed", "33", "--out"])
        .arg(p("sig.sgsg")));
    let out = sgsig()
        .args(["verify", "--key"])
        .arg(p("ka.pk"))
        .args(["--msg-text"])
        .arg(p("msg.txt"))
        .args(["--sig"])
        .arg(p("sig.sgsg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("different parameters"), "stderr: {err}");
}
