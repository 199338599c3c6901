//! Theorem-checking harness: exhaustive enumeration of small digraphs,
//! seeded random quiver generation, and cross-validation of the computed
//! invariants, with counterexample reporting.
//!
//! The headline check is the equality between the big left finitistic
//! dimension and the delooping level; around it run the inequality chain
//! `s <= findim <= dell <= s+1`, the same equality on the opposite quiver,
//! monotonicity of the level condition, both independent oracles, and
//! certificate re-validation. None of the checks assume the statements they
//! test: in particular the delooping search never truncates at `s+1`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dsl::{self, QuiverDocument};
use crate::invariants::{
    big_findim_left, certificate_is_sound, dell_algebra, dell_condition, dell_simple,
    dell_support_oracle_all, embeds_in_radical, full_report, s_invariant, simple_dual_nonzero,
    InvariantReport,
};
use crate::quiver::{Arrow, Valuation, ValuedQuiver, VertexId};
use crate::syzygy::{syzygy_power, syzygy_power_oracle, ExtendedNat, Side, SyzygyError};

/// Names of the checks run per quiver by [`run_all_checks`].
pub const CHECK_NAMES: [&str; 8] = [
    "main_theorem",
    "inequality_chain",
    "duality",
    "dell_monotone",
    "dell_oracle",
    "syzygy_oracle",
    "certificates",
    "findim_criteria",
];

/// Largest syzygy exponent compared against the path-enumeration oracle per
/// case.
const SYZYGY_ORACLE_MAX_POWER: usize = 4;

/// Enumeration guard: `2^(n^2)` digraphs.
pub const MAX_ENUMERATED_VERTICES: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("invalid fuzz configuration: {message}")]
    InvalidConfig { message: String },
    #[error("enumeration guard: {vertices} vertices exceeds the maximum {max} (2^(n*n) cases)")]
    EnumerationTooLarge { vertices: usize, max: usize },
}

/// Outcome of one named check. A failure's `detail` carries both sides of the
/// violated (in)equality; theorem failures also embed the full invariant
/// report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InvariantReport>,
}

impl CheckOutcome {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            passed: true,
            detail: detail.into(),
            report: None,
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self {
            passed: false,
            detail: detail.into(),
            report: None,
        }
    }
}

/// Results of the checks run on one quiver. `quiver` holds the canonical
/// text form, directly re-runnable through the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub quiver: String,
    pub checks: BTreeMap<String, CheckOutcome>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }
}

/// Canonical serialized form used to identify and order counterexamples.
pub fn canonical_text(q: &ValuedQuiver) -> String {
    dsl::serialize(&QuiverDocument::from_quiver(q.clone()))
}

fn single_check(
    q: &ValuedQuiver,
    name: &str,
    outcome: CheckOutcome,
    started: Instant,
) -> CheckResult {
    CheckResult {
        quiver: canonical_text(q),
        checks: BTreeMap::from([(name.to_string(), outcome)]),
        elapsed: started.elapsed(),
    }
}

/// Checks `findim_left_big = dell_algebra`; a failure embeds the full
/// invariant report.
pub fn check_main_theorem(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let findim = big_findim_left(q);
    let dell = dell_algebra(q);
    let outcome = if dell == ExtendedNat::Finite(findim) {
        CheckOutcome::pass(format!("{findim} = {dell}"))
    } else {
        CheckOutcome {
            passed: false,
            detail: format!("{findim} != {dell}"),
            report: Some(full_report(q)),
        }
    };
    single_check(q, "main_theorem", outcome, started)
}

/// Checks the chain `s <= findim <= dell <= s+1` when `s` is defined, and
/// `findim = dell = 0` when it is not.
pub fn check_inequality_chain(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let s = s_invariant(q);
    let findim = big_findim_left(q);
    let dell = dell_algebra(q);
    let outcome = match s.value {
        Some(s_val) => {
            let holds = s_val <= findim
                && ExtendedNat::Finite(findim) <= dell
                && dell <= ExtendedNat::Finite(s_val + 1);
            let detail = format!("{s_val} <= {findim} <= {dell} <= {}", s_val + 1);
            if holds {
                CheckOutcome::pass(detail)
            } else {
                CheckOutcome::fail(format!("chain violated: {detail}"))
            }
        }
        None => {
            if findim == 0 && dell == ExtendedNat::Finite(0) {
                CheckOutcome::pass("s undefined, findim 0, dell 0")
            } else {
                CheckOutcome::fail(format!(
                    "s undefined but findim {findim}, dell {dell} (both must be 0)"
                ))
            }
        }
    };
    single_check(q, "inequality_chain", outcome, started)
}

/// Checks the main equality on the opposite quiver, which reads as the same
/// theorem with the sides of the algebra exchanged.
pub fn check_duality(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let op = q.opposite();
    let findim = big_findim_left(&op);
    let dell = dell_algebra(&op);
    let outcome = if dell == ExtendedNat::Finite(findim) {
        CheckOutcome::pass(format!("opposite: {findim} = {dell}"))
    } else {
        CheckOutcome {
            passed: false,
            detail: format!("opposite: {findim} != {dell}"),
            report: Some(full_report(&op)),
        }
    };
    single_check(q, "duality", outcome, started)
}

/// Checks that the source-or-escape condition, once satisfied at the achieved
/// level, keeps holding at every level up to the orbit horizon.
pub fn check_dell_monotone(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let orbit = q.bool_power_orbit();
    let mut outcome = CheckOutcome::pass("condition monotone above the achieved level");
    'scan: for v in q.vertices() {
        let level = dell_simple(q, v).expect("vertex from iterator").level;
        if let ExtendedNat::Finite(level) = level {
            for n in level..=orbit.horizon() {
                if !dell_condition(q, &orbit, v, n).expect("vertex from iterator") {
                    outcome = CheckOutcome::fail(format!(
                        "vertex {v}: condition holds at level {level} but fails at level {n}"
                    ));
                    break 'scan;
                }
            }
        }
    }
    single_check(q, "dell_monotone", outcome, started)
}

/// Compares the matrix-power delooping search against the syzygy-support
/// oracle on every vertex.
pub fn check_dell_oracle(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let oracle_levels = dell_support_oracle_all(q);
    let mut outcome = CheckOutcome::pass("dell agrees with the support oracle");
    for v in q.vertices() {
        let level = dell_simple(q, v).expect("vertex from iterator").level;
        let oracle = oracle_levels[v.get() - 1];
        if level != oracle {
            outcome = CheckOutcome::fail(format!(
                "vertex {v}: dell {level} != support oracle {oracle}"
            ));
            break;
        }
    }
    single_check(q, "dell_oracle", outcome, started)
}

/// Compares iterated syzygy multiplicities against explicit path enumeration
/// on every vertex and side, exponents `0..=4` (dropping exponents whose path
/// count blows the oracle budget).
pub fn check_syzygy_oracle(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let mut outcome = CheckOutcome::pass("syzygy_power agrees with path enumeration");
    'scan: for v in q.vertices() {
        for side in [Side::Right, Side::Left] {
            for n in 0..=SYZYGY_ORACLE_MAX_POWER {
                let fast = syzygy_power(q, side, v, n).expect("vertex from iterator");
                match syzygy_power_oracle(q, side, v, n) {
                    Ok(slow) => {
                        if fast != slow {
                            outcome = CheckOutcome::fail(format!(
                                "syzygy_power({v}, {side:?}, {n}): {fast:?} != oracle {slow:?}"
                            ));
                            break 'scan;
                        }
                    }
                    Err(SyzygyError::PathBudgetExceeded { .. }) => break,
                    Err(err) => unreachable!("vertex from iterator: {err}"),
                }
            }
        }
    }
    single_check(q, "syzygy_oracle", outcome, started)
}

/// Recomputes every delooping certificate and re-validates it path by path.
pub fn check_certificates(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let mut outcome = CheckOutcome::pass("all certificates re-validate");
    for v in q.vertices() {
        let cert = dell_simple(q, v).expect("vertex from iterator");
        if !certificate_is_sound(q, &cert) {
            outcome = CheckOutcome::fail(format!("certificate for vertex {v} does not re-validate"));
            break;
        }
    }
    single_check(q, "certificates", outcome, started)
}

/// Compares the two decision rules for the `findim = s+1` bump on the
/// witnesses of `s`: the simple-dual-nonzero test and the radical-embedding
/// test the computation actually uses. The rules may part ways only when the
/// bump claim rests entirely on isolated witnesses (projective simples whose
/// embeddings into the algebra all split); any other disagreement is flagged.
pub fn check_findim_criteria(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let s = s_invariant(q);
    let mut outcome = CheckOutcome::pass("decision rules agree");
    if s.value.is_some() {
        let dual_rule = s
            .witnesses
            .iter()
            .any(|&(j, _)| simple_dual_nonzero(q, Side::Left, j).expect("witness in range"));
        let radical_rule = s
            .witnesses
            .iter()
            .any(|&(j, _)| embeds_in_radical(q, Side::Left, j).expect("witness in range"));
        if dual_rule != radical_rule {
            let isolated_witness = s.witnesses.iter().any(|&(j, _)| {
                let class = q.classify_vertex(j).expect("witness in range");
                class.is_source && class.is_sink
            });
            outcome = if dual_rule && !radical_rule && isolated_witness {
                CheckOutcome::pass("rules part ways only at an isolated witness (split corner)")
            } else {
                CheckOutcome::fail(format!(
                    "dual-nonzero rule says bump={dual_rule}, radical-embedding rule says bump={radical_rule}, no isolated witness"
                ))
            };
        }
    }
    single_check(q, "findim_criteria", outcome, started)
}

/// Runs every check on one quiver.
pub fn run_all_checks(q: &ValuedQuiver) -> CheckResult {
    let started = Instant::now();
    let mut checks = BTreeMap::new();
    for result in [
        check_main_theorem(q),
        check_inequality_chain(q),
        check_duality(q),
        check_dell_monotone(q),
        check_dell_oracle(q),
        check_syzygy_oracle(q),
        check_certificates(q),
        check_findim_criteria(q),
    ] {
        checks.extend(result.checks);
    }
    CheckResult {
        quiver: canonical_text(q),
        checks,
        elapsed: started.elapsed(),
    }
}

/// Configuration of the randomized harness. Everything a run does is a
/// deterministic function of this value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzConfig {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Probability of each non-loop ordered pair carrying an arrow.
    #[serde(serialize_with = "ser_prob")]
    pub arrow_prob: f64,
    /// Probability of a loop at each vertex.
    #[serde(serialize_with = "ser_prob")]
    pub loop_prob: f64,
    /// Valuation components are drawn uniformly from `1..=max_valuation`.
    pub max_valuation: u64,
    pub count: usize,
    pub seed: u64,
}

// Probabilities echo back as strings: the JSON reports promise stable,
// float-free output.
fn ser_prob<S: Serializer>(p: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format!("{p}"))
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            min_vertices: 1,
            max_vertices: 6,
            arrow_prob: 0.3,
            loop_prob: 0.15,
            max_valuation: 3,
            count: 1000,
            seed: 0,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.min_vertices == 0 {
            return Err(VerifyError::InvalidConfig {
                message: "min_vertices must be at least 1".into(),
            });
        }
        if self.min_vertices > self.max_vertices {
            return Err(VerifyError::InvalidConfig {
                message: format!(
                    "min_vertices {} exceeds max_vertices {}",
                    self.min_vertices, self.max_vertices
                ),
            });
        }
        for (name, p) in [("arrow_prob", self.arrow_prob), ("loop_prob", self.loop_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(VerifyError::InvalidConfig {
                    message: format!("{name} {p} outside [0, 1]"),
                });
            }
        }
        if self.max_valuation == 0 {
            return Err(VerifyError::InvalidConfig {
                message: "max_valuation must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// The `index`-th quiver of a run: a deterministic function of
/// `(config.seed, index)`. Every ordered pair (loops included) independently
/// receives an arrow with its configured probability; valuation components
/// are uniform in range.
pub fn random_quiver(cfg: &FuzzConfig, index: u64) -> ValuedQuiver {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let n = rng.gen_range(cfg.min_vertices..=cfg.max_vertices);
    let mut arrows = Vec::new();
    for tail in 1..=n {
        for head in 1..=n {
            let p = if tail == head {
                cfg.loop_prob
            } else {
                cfg.arrow_prob
            };
            if rng.gen_bool(p) {
                let val = Valuation::new(
                    rng.gen_range(1..=cfg.max_valuation),
                    rng.gen_range(1..=cfg.max_valuation),
                );
                arrows.push(Arrow::with_valuation(
                    VertexId::new(tail),
                    VertexId::new(head),
                    val,
                ));
            }
        }
    }
    ValuedQuiver::new(n, arrows)
}

/// All `2^(n^2)` digraphs on `n` labeled vertices (loops included), with all
/// valuations `(1,1)`, in adjacency-mask order.
pub fn enumerate_digraphs(
    n: usize,
) -> Result<impl Iterator<Item = ValuedQuiver>, VerifyError> {
    if n > MAX_ENUMERATED_VERTICES {
        return Err(VerifyError::EnumerationTooLarge {
            vertices: n,
            max: MAX_ENUMERATED_VERTICES,
        });
    }
    let bits = n * n;
    Ok((0u64..1 << bits).map(move |mask| {
        let arrows = (0..bits)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| Arrow::new(VertexId::new(i / n + 1), VertexId::new(i % n + 1)));
        ValuedQuiver::new(n, arrows)
    }))
}

/// One failed check, ready for the report.
#[derive(Clone, Debug, Serialize)]
pub struct FailureCase {
    pub quiver: String,
    pub check: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<InvariantReport>,
}

/// Summary of a randomized run.
///
/// The JSON rendering is a deterministic function of the config: pass counts
/// and failures, no timing. Elapsed time is carried separately and appears
/// only in the text rendering.
#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub schema_version: u32,
    pub config: FuzzConfig,
    pub cases_run: usize,
    pub pass_counts: BTreeMap<String, usize>,
    pub failures: Vec<FailureCase>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FuzzReport {
    pub fn counterexample_free(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "fuzz: {} cases, vertices {}..={}, seed {}\n",
            self.cases_run, self.config.min_vertices, self.config.max_vertices, self.config.seed
        );
        render_counts_and_failures(
            &mut out,
            self.cases_run,
            &self.pass_counts,
            &self.failures,
            self.elapsed,
        );
        out
    }
}

/// Summary of an exhaustive run over all digraphs of one size.
#[derive(Clone, Debug, Serialize)]
pub struct EnumerationReport {
    pub schema_version: u32,
    pub vertex_count: usize,
    pub cases_run: usize,
    pub pass_counts: BTreeMap<String, usize>,
    pub failures: Vec<FailureCase>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl EnumerationReport {
    pub fn counterexample_free(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_text(&self) -> String {
        let passing = self
            .cases_run
            .saturating_sub(failing_case_count(&self.failures));
        let mut out = format!("{} quivers, {} pass\n", self.cases_run, passing);
        render_counts_and_failures(
            &mut out,
            self.cases_run,
            &self.pass_counts,
            &self.failures,
            self.elapsed,
        );
        out
    }
}

fn failing_case_count(failures: &[FailureCase]) -> usize {
    let mut quivers: Vec<&str> = failures.iter().map(|f| f.quiver.as_str()).collect();
    quivers.sort_unstable();
    quivers.dedup();
    quivers.len()
}

fn render_counts_and_failures(
    out: &mut String,
    cases: usize,
    pass_counts: &BTreeMap<String, usize>,
    failures: &[FailureCase],
    elapsed: Duration,
) {
    use std::fmt::Write as _;
    for (name, passed) in pass_counts {
        writeln!(out, "  {name}: {passed}/{cases} pass").expect("writing to String cannot fail");
    }
    writeln!(out, "counterexamples: {}", failures.len()).expect("writing to String cannot fail");
    for f in failures {
        writeln!(out, "  {} on:\n{}    ({})", f.check, indent(&f.quiver), f.detail)
            .expect("writing to String cannot fail");
    }
    writeln!(out, "elapsed: {} ms", elapsed.as_millis()).expect("writing to String cannot fail");
}

fn indent(text: &str) -> String {
    text.lines()
        .map(|l| format!("    {l}\n"))
        .collect::<String>()
}

fn collect_case(
    result: CheckResult,
    pass_counts: &mut BTreeMap<String, usize>,
    failures: &mut Vec<FailureCase>,
) {
    for (name, outcome) in result.checks {
        if outcome.passed {
            *pass_counts.entry(name).or_insert(0) += 1;
        } else {
            failures.push(FailureCase {
                quiver: result.quiver.clone(),
                check: name,
                detail: outcome.detail,
                report: outcome.report,
            });
        }
    }
}

fn new_pass_counts() -> BTreeMap<String, usize> {
    CHECK_NAMES.iter().map(|n| (n.to_string(), 0)).collect()
}

// Failures sort by (canonical text, check name): the aggregate is independent
// of evaluation order, and the lexicographically smallest counterexample
// comes first.
fn sort_failures(failures: &mut [FailureCase]) {
    failures.sort_by(|a, b| (&a.quiver, &a.check).cmp(&(&b.quiver, &b.check)));
}

/// Runs [`run_all_checks`] on `count` seeded random quivers. Identical config
/// and seed reproduce the identical report.
pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzReport, VerifyError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut pass_counts = new_pass_counts();
    let mut failures = Vec::new();
    for index in 0..cfg.count {
        let q = random_quiver(cfg, index as u64);
        collect_case(run_all_checks(&q), &mut pass_counts, &mut failures);
    }
    sort_failures(&mut failures);
    Ok(FuzzReport {
        schema_version: 1,
        config: cfg.clone(),
        cases_run: cfg.count,
        pass_counts,
        failures,
        elapsed: started.elapsed(),
    })
}

/// Runs [`run_all_checks`] on every digraph with `n` vertices.
pub fn check_all_digraphs(n: usize) -> Result<EnumerationReport, VerifyError> {
    let started = Instant::now();
    let mut pass_counts = new_pass_counts();
    let mut failures = Vec::new();
    let mut cases_run = 0;
    for q in enumerate_digraphs(n)? {
        cases_run += 1;
        collect_case(run_all_checks(&q), &mut pass_counts, &mut failures);
    }
    sort_failures(&mut failures);
    Ok(EnumerationReport {
        schema_version: 1,
        vertex_count: n,
        cases_run,
        pass_counts,
        failures,
        elapsed: started.elapsed(),
    })
}
