//! Acceptance suite. Each test covers one numbered criterion, prints a single
//! PASS/FAIL line, and asserts it. Run with:
//!
//! ```text
//! cargo test -p deloop-cli --test acceptance -- --nocapture
//! ```

use std::process::Command as Process;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deloop_core::dsl::{self, QuiverDocument};
use deloop_core::invariants::{
    certificate_is_sound, dell_simple, dell_support_oracle_all, full_report, s_invariant,
};
use deloop_core::syzygy::{
    pdim_simple, syzygy_power, syzygy_power_oracle, ExtendedNat, Side, SyzygyError,
};
use deloop_core::verify::{
    check_main_theorem, enumerate_digraphs, fuzz, random_quiver, FuzzConfig, FuzzReport,
};
use deloop_core::{Arrow, Valuation, ValuedQuiver, VertexId};

fn v(i: usize) -> VertexId {
    VertexId::new(i)
}

fn q_a3() -> ValuedQuiver {
    ValuedQuiver::new(3, vec![Arrow::new(v(1), v(2)), Arrow::new(v(2), v(3))])
}

fn q_looptail() -> ValuedQuiver {
    ValuedQuiver::new(
        3,
        vec![
            Arrow::new(v(1), v(1)),
            Arrow::new(v(1), v(2)),
            Arrow::new(v(2), v(3)),
        ],
    )
}

fn q_point() -> ValuedQuiver {
    ValuedQuiver::new(1, vec![])
}

fn q_2cycle() -> ValuedQuiver {
    ValuedQuiver::new(2, vec![Arrow::new(v(1), v(2)), Arrow::new(v(2), v(1))])
}

fn chain(n: usize) -> ValuedQuiver {
    ValuedQuiver::new(n, (1..n).map(|i| Arrow::new(v(i), v(i + 1))))
}

/// The randomized family shared by criteria 2, 3, and 8.
fn acceptance_config() -> FuzzConfig {
    FuzzConfig {
        min_vertices: 1,
        max_vertices: 8,
        arrow_prob: 0.3,
        loop_prob: 0.15,
        max_valuation: 3,
        count: 10_000,
        seed: 42,
    }
}

fn shared_fuzz() -> &'static FuzzReport {
    static REPORT: OnceLock<FuzzReport> = OnceLock::new();
    REPORT.get_or_init(|| fuzz(&acceptance_config()).expect("acceptance config is valid"))
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn deloop(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_deloop"))
        .args(args)
        .output()
        .expect("binary invocation succeeds")
}

fn exit_code(output: &std::process::Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn criterion_1_main_theorem_exhaustive_small_digraphs() {
    let started = Instant::now();
    let mut cases = 0usize;
    let mut failures = 0usize;
    for n in 1..=3 {
        for q in enumerate_digraphs(n).expect("within guard") {
            cases += 1;
            if !check_main_theorem(&q).passed() {
                failures += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = cases == 530 && failures == 0 && elapsed < Duration::from_secs(1);
    println!(
        "criterion 1, findim = dell on all {cases} digraphs with <= 3 vertices: {} ({failures} failures, {} ms)",
        status(pass),
        elapsed.as_millis()
    );
    assert!(pass, "cases {cases}, failures {failures}, elapsed {elapsed:?}");
}

#[test]
fn criterion_2_theorem_and_chain_on_random_quivers() {
    let report = shared_fuzz();
    let theorem = report.pass_counts["main_theorem"];
    let chain = report.pass_counts["inequality_chain"];
    let pass = theorem == report.cases_run
        && chain == report.cases_run
        && report.counterexample_free()
        && report.elapsed < Duration::from_secs(30);
    println!(
        "criterion 2, findim = dell and s <= findim <= dell <= s+1 on {} random quivers (<= 8 vertices, valuations <= 3): {} ({} counterexamples, {} ms)",
        report.cases_run,
        status(pass),
        report.failures.len(),
        report.elapsed.as_millis()
    );
    assert!(pass, "failures: {:#?}, elapsed {:?}", report.failures, report.elapsed);
}

#[test]
fn criterion_3_oracle_equivalence() {
    // Exhaustive: every digraph with at most 4 vertices, trivial valuations.
    let mut cases = 0usize;
    let mut disagreements = 0usize;
    for n in 1..=4 {
        for q in enumerate_digraphs(n).expect("within guard") {
            cases += 1;
            let oracle_levels = dell_support_oracle_all(&q);
            for u in q.vertices() {
                if dell_simple(&q, u).expect("in range").level != oracle_levels[u.get() - 1] {
                    disagreements += 1;
                }
                for side in [Side::Right, Side::Left] {
                    for exponent in 0..=5 {
                        match syzygy_power_oracle(&q, side, u, exponent) {
                            Ok(slow) => {
                                let fast =
                                    syzygy_power(&q, side, u, exponent).expect("in range");
                                if fast != slow {
                                    disagreements += 1;
                                }
                            }
                            Err(SyzygyError::PathBudgetExceeded { .. }) => break,
                            Err(err) => panic!("unexpected oracle error: {err}"),
                        }
                    }
                }
            }
        }
    }
    // Randomized: both oracle checks ran inside every shared fuzz case.
    let report = shared_fuzz();
    let fuzz_ok = report.pass_counts["dell_oracle"] == report.cases_run
        && report.pass_counts["syzygy_oracle"] == report.cases_run;
    let pass = cases == 66_066 && disagreements == 0 && fuzz_ok;
    println!(
        "criterion 3, oracle equivalence on {cases} exhaustive quivers and {} fuzz cases: {} ({disagreements} disagreements)",
        report.cases_run,
        status(pass)
    );
    assert!(pass, "cases {cases}, disagreements {disagreements}, fuzz_ok {fuzz_ok}");
}

#[test]
fn criterion_4_hand_derived_fixtures() {
    let mut bad: Vec<String> = Vec::new();
    let mut expect = |name: &str, q: &ValuedQuiver, s: Option<usize>, findim: usize, dell: usize| {
        let report = full_report(q);
        let got = (
            report.s.value,
            report.findim_left_big,
            report.dell_algebra,
        );
        if got != (s, findim, ExtendedNat::Finite(dell)) {
            bad.push(format!("{name}: expected ({s:?}, {findim}, {dell}), got {got:?}"));
        }
    };
    expect("Q_A3", &q_a3(), Some(2), 2, 2);
    expect("Q_LOOPTAIL", &q_looptail(), Some(1), 2, 2);
    expect("Q_POINT", &q_point(), Some(0), 0, 0);
    expect("Q_2CYCLE", &q_2cycle(), None, 0, 0);
    for n in 2..=6 {
        expect(&format!("A_{n}"), &chain(n), Some(n - 1), n - 1, n - 1);
    }
    // Q_LOOPTAIL is the findim = s + 1 branch.
    let looptail = full_report(&q_looptail());
    if looptail.findim_left_big != looptail.s.value.expect("defined") + 1 {
        bad.push("Q_LOOPTAIL: expected the findim = s+1 branch".into());
    }
    let pass = bad.is_empty();
    println!(
        "criterion 4, hand-derived fixture values (chains up to A_6 included): {}",
        status(pass)
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn criterion_5_valuation_independence() {
    let cfg = FuzzConfig {
        count: 100,
        seed: 20_240_817,
        max_vertices: 7,
        ..acceptance_config()
    };
    let mut changed = 0usize;
    for index in 0..cfg.count as u64 {
        let q = random_quiver(&cfg, index);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED ^ index);
        let revalued = ValuedQuiver::new(
            q.vertex_count(),
            q.arrows().iter().map(|a| {
                Arrow::with_valuation(
                    a.tail,
                    a.head,
                    Valuation::new(rng.gen_range(1..=5), rng.gen_range(1..=5)),
                )
            }),
        );
        let before = full_report(&q);
        let after = full_report(&revalued);
        let same = before.s.value == after.s.value
            && before.findim_left_big == after.findim_left_big
            && before.dell_algebra == after.dell_algebra
            && q.vertices().all(|u| {
                before.dell_per_simple[&u].level == after.dell_per_simple[&u].level
            });
        if !same {
            changed += 1;
        }
    }
    let pass = changed == 0;
    println!(
        "criterion 5, (s, findim, dell) unchanged under revaluation on 100 fuzzed quivers: {} ({changed} changed)",
        status(pass)
    );
    assert_eq!(changed, 0);
}

#[test]
fn criterion_6_graph_s_equals_syzygy_s() {
    let mut tested = 0usize;
    let mut mismatches = 0usize;
    let mut check = |q: &ValuedQuiver| {
        tested += 1;
        let graph_side = s_invariant(q).value;
        let syzygy_side = q
            .vertices()
            .filter_map(|j| {
                pdim_simple(q, Side::Left, j)
                    .expect("vertex from iterator")
                    .finite()
            })
            .max();
        if graph_side != syzygy_side {
            mismatches += 1;
        }
    };
    for n in 1..=3 {
        for q in enumerate_digraphs(n).expect("within guard") {
            check(&q);
        }
    }
    let cfg = acceptance_config();
    for index in 0..500 {
        check(&random_quiver(&cfg, index));
    }
    let pass = mismatches == 0;
    println!(
        "criterion 6, graph-side s equals syzygy-iteration s on {tested} quivers: {} ({mismatches} mismatches)",
        status(pass)
    );
    assert_eq!(mismatches, 0);
}

#[test]
fn criterion_7_multiplicities_are_exact_at_high_powers() {
    let q = ValuedQuiver::new(
        1,
        vec![Arrow::with_valuation(v(1), v(1), Valuation::new(2, 2))],
    );
    let omega100 = syzygy_power(&q, Side::Right, v(1), 100).expect("in range");
    let expected = BigUint::from(2u32).pow(100);
    let pass = omega100.total() == expected && omega100.count(v(1)) == expected;
    println!(
        "criterion 7, |syzygy^100| of the doubled loop equals 2^100 exactly: {} (got {})",
        status(pass),
        omega100.total()
    );
    assert!(pass);
}

#[test]
fn criterion_8_certificates_revalidate_on_fuzz_cases() {
    let report = shared_fuzz();
    let harness_ok = report.pass_counts["certificates"] == report.cases_run;
    // Direct re-validation on a sample of the same family.
    let cfg = acceptance_config();
    let mut unsound = 0usize;
    for index in 0..500 {
        let q = random_quiver(&cfg, index);
        for u in q.vertices() {
            let cert = dell_simple(&q, u).expect("vertex from iterator");
            if !certificate_is_sound(&q, &cert) {
                unsound += 1;
            }
        }
    }
    let pass = harness_ok && unsound == 0;
    println!(
        "criterion 8, every delooping certificate re-validates ({} fuzz cases plus 500 direct): {} ({unsound} unsound)",
        report.cases_run,
        status(pass)
    );
    assert!(pass, "harness_ok {harness_ok}, unsound {unsound}");
}

#[test]
fn criterion_9_roundtrip_and_cli_golden() {
    let mut bad: Vec<String> = Vec::new();

    // Parser round-trip over the randomized family.
    let cfg = acceptance_config();
    for index in 0..500 {
        let q = random_quiver(&cfg, index);
        let text = dsl::serialize(&QuiverDocument::from_quiver(q.clone()));
        match dsl::parse(&text) {
            Ok(doc) if doc.quiver == q => {}
            other => bad.push(format!("round-trip failed at index {index}: {other:?}")),
        }
    }

    // CLI golden exit codes and outputs.
    let dir = tempfile::tempdir().expect("tempdir");
    let path = |name: &str| dir.path().join(name).display().to_string();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).expect("write");
    write("a3.quiver", "vertices 3\n1 -> 2\n2 -> 3\n");
    write("looptail.quiver", "vertices 3\n1 -> 1\n1 -> 2\n2 -> 3\n");
    write("broken.quiver", "vertices 2\n1 => 2\n");
    write("zeroval.quiver", "vertices 2\n1 -> 2 (0,1)\n");

    let compute = deloop(&["compute", &path("a3.quiver"), "--json"]);
    if exit_code(&compute) != 0 {
        bad.push(format!("compute exit {}", exit_code(&compute)));
    }
    let stdout = String::from_utf8_lossy(&compute.stdout).to_string();
    for needle in ["\"s\": 2", "\"findim_left_big\": 2", "\"dell_algebra\": 2"] {
        if !stdout.contains(needle) {
            bad.push(format!("compute JSON missing {needle}: {stdout}"));
        }
    }

    let verify = deloop(&["verify", &path("looptail.quiver")]);
    if exit_code(&verify) != 0
        || !String::from_utf8_lossy(&verify.stdout).contains("main_theorem: PASS (2 = 2)")
    {
        bad.push(format!(
            "verify: exit {}, stdout {}",
            exit_code(&verify),
            String::from_utf8_lossy(&verify.stdout)
        ));
    }

    for (args, expected) in [
        (vec!["compute", &path("broken.quiver")], 2),
        (vec!["compute", &path("zeroval.quiver")], 3),
        (vec!["explain", &path("a3.quiver"), "dell", "9"], 4),
        (vec!["enumerate", "--vertices", "9"], 2),
        (vec!["fuzz", "--count", "0"], 0),
    ] {
        let out = deloop(&args);
        if exit_code(&out) != expected {
            bad.push(format!("{args:?}: expected exit {expected}, got {}", exit_code(&out)));
        }
    }

    // Identical seeds produce byte-identical JSON fuzz reports.
    let fuzz_args = [
        "fuzz",
        "--count",
        "300",
        "--max-vertices",
        "6",
        "--seed",
        "7",
        "--json",
    ];
    let first = deloop(&fuzz_args);
    let second = deloop(&fuzz_args);
    if exit_code(&first) != 0 || first.stdout != second.stdout {
        bad.push("fuzz JSON reports are not byte-identical across runs".into());
    }

    let pass = bad.is_empty();
    println!(
        "criterion 9, parser round-trip, CLI exit codes, and byte-identical fuzz JSON: {}",
        status(pass)
    );
    assert!(pass, "{bad:#?}");
}
