//! Command-line front end: compute, verify, fuzz, enumerate, export-dot, and
//! explain over `.quiver` files.
//!
//! Exit codes: 0 success, 1 check failure or counterexample, 2 parse/flag
//! error, 3 validation defect, 4 domain error (e.g. vertex out of range).

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Serialize, Serializer};

use deloop_core::dsl::{self, QuiverDocument};
use deloop_core::invariants::{DellCertificate, DellJustification, InvariantReport};
use deloop_core::verify::{
    check_all_digraphs, fuzz, run_all_checks, CheckResult, FuzzConfig, CHECK_NAMES,
};
use deloop_core::{full_report, ExtendedNat, VertexId};

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DEFECTS: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

#[derive(Parser)]
#[command(
    name = "deloop",
    version,
    about = "Homological invariants of radical-square-zero algebras from valued quivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the invariant report (s, findim, dell with certificates).
    Compute {
        /// Path to a .quiver file, or '-' for stdin.
        file: String,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run every consistency check on one quiver.
    Verify {
        /// Path to a .quiver file, or '-' for stdin.
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the checks on seeded random quivers; exit 1 on any counterexample.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        min_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        /// Probability of each non-loop ordered pair carrying an arrow.
        #[arg(long, default_value_t = 0.3)]
        arrow_prob: f64,
        /// Probability of a loop at each vertex.
        #[arg(long, default_value_t = 0.15)]
        loop_prob: f64,
        /// Valuation components are uniform in 1..=max-val.
        #[arg(long = "max-val", default_value_t = 3)]
        max_val: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run the checks on every digraph with the given number of vertices.
    Enumerate {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write Graphviz DOT for a quiver.
    ExportDot {
        /// Path to a .quiver file, or '-' for stdin.
        file: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the certificate justifying one invariant value.
    Explain {
        /// Path to a .quiver file, or '-' for stdin.
        file: String,
        /// Invariant name; only 'dell' is certificate-backed.
        invariant: String,
        /// 1-based vertex index.
        vertex: usize,
    },
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Compute { file, json } => cmd_compute(&file, json),
        Command::Verify { file, json } => cmd_verify(&file, json),
        Command::Fuzz {
            count,
            min_vertices,
            max_vertices,
            arrow_prob,
            loop_prob,
            max_val,
            seed,
            json,
        } => cmd_fuzz(
            FuzzConfig {
                min_vertices,
                max_vertices,
                arrow_prob,
                loop_prob,
                max_valuation: max_val,
                count,
                seed,
            },
            json,
        ),
        Command::Enumerate { vertices, json } => cmd_enumerate(vertices, json),
        Command::ExportDot { file, out } => cmd_export_dot(&file, out),
        Command::Explain {
            file,
            invariant,
            vertex,
        } => cmd_explain(&file, &invariant, vertex),
    }
}

/// Reads, parses, and validates the input; maps failures to exit codes 2/3.
fn load_document(path: &str) -> Result<QuiverDocument, u8> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|err| {
            eprintln!("error: cannot read stdin: {err}");
            EXIT_PARSE
        })?;
        buf
    } else {
        fs::read_to_string(path).map_err(|err| {
            eprintln!("error: cannot read {path}: {err}");
            EXIT_PARSE
        })?
    };
    let doc = dsl::parse(&text).map_err(|err| {
        eprintln!("error: {err}");
        EXIT_PARSE
    })?;
    let defects = doc.quiver.validate();
    if !defects.is_empty() {
        for defect in &defects {
            eprintln!("defect: {defect}");
        }
        return Err(EXIT_DEFECTS);
    }
    Ok(doc)
}

/// `dell_per_simple` keyed by the vertex index, in numeric order.
struct CertMap(BTreeMap<VertexId, DellCertificate>);

impl Serialize for CertMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(Some(self.0.len()))?;
        for (v, cert) in &self.0 {
            m.serialize_entry(&v.get().to_string(), cert)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct ComputeJson {
    schema_version: u32,
    s: Option<usize>,
    s_witnesses: Vec<(VertexId, usize)>,
    findim_left_big: usize,
    dell_algebra: ExtendedNat,
    dell_per_simple: CertMap,
}

impl ComputeJson {
    fn from_report(report: InvariantReport) -> Self {
        Self {
            schema_version: 1,
            s: report.s.value,
            s_witnesses: report.s.witnesses,
            findim_left_big: report.findim_left_big,
            dell_algebra: report.dell_algebra,
            dell_per_simple: CertMap(report.dell_per_simple),
        }
    }
}

fn cmd_compute(file: &str, json: bool) -> u8 {
    let doc = match load_document(file) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let report = full_report(&doc.quiver);
    if json {
        let out = ComputeJson::from_report(report);
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report is serializable")
        );
    } else {
        println!(
            "vertices: {}, arrows: {}",
            doc.quiver.vertex_count(),
            doc.quiver.arrows().len()
        );
        match report.s.value {
            Some(s) => {
                let witnesses: Vec<String> = report
                    .s
                    .witnesses
                    .iter()
                    .map(|(v, _)| v.to_string())
                    .collect();
                println!("s = {s} (witnesses: {})", witnesses.join(", "));
            }
            None => println!("s = undefined (no left simple has finite projective dimension)"),
        }
        println!("findim_left_big = {}", report.findim_left_big);
        println!("dell_algebra = {}", report.dell_algebra);
        for (v, cert) in &report.dell_per_simple {
            println!("dell(S_{v}) = {}", cert.level);
        }
    }
    EXIT_OK
}

#[derive(Serialize)]
struct VerifyJson {
    schema_version: u32,
    #[serde(flatten)]
    result: CheckResult,
}

fn cmd_verify(file: &str, json: bool) -> u8 {
    let doc = match load_document(file) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let result = run_all_checks(&doc.quiver);
    let passed = result.passed();
    if json {
        let out = VerifyJson {
            schema_version: 1,
            result,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("result is serializable")
        );
    } else {
        for name in CHECK_NAMES {
            let outcome = &result.checks[name];
            println!(
                "{name}: {} ({})",
                if outcome.passed { "PASS" } else { "FAIL" },
                outcome.detail
            );
        }
    }
    if passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_fuzz(cfg: FuzzConfig, json: bool) -> u8 {
    let report = match fuzz(&cfg) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_PARSE;
        }
    };
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.counterexample_free() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_enumerate(vertices: usize, json: bool) -> u8 {
    let report = match check_all_digraphs(vertices) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_PARSE;
        }
    };
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.counterexample_free() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn cmd_export_dot(file: &str, out: Option<PathBuf>) -> u8 {
    let doc = match load_document(file) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    let dot = dsl::export_dot(&doc);
    match out {
        None => print!("{dot}"),
        Some(path) => {
            if let Err(err) = fs::write(&path, dot) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return EXIT_PARSE;
            }
        }
    }
    EXIT_OK
}

fn render_justification(level: usize, just: &DellJustification) -> String {
    match just {
        DellJustification::Source { vertex } if level == 0 => {
            format!("vertex {vertex} is a source")
        }
        DellJustification::Escape { vertex, .. } if level == 0 => {
            format!("vertex {vertex} is not a sink")
        }
        DellJustification::Source { vertex } => format!("n={level}: j={vertex} is a source"),
        DellJustification::Escape { vertex, path } => {
            let rendered: Vec<String> = path.iter().map(ToString::to_string).collect();
            let end = path.last().expect("nonempty path");
            format!(
                "n={level}: j={vertex} escapes via {} ({end} not a sink)",
                rendered.join("->")
            )
        }
    }
}

fn cmd_explain(file: &str, invariant: &str, vertex: usize) -> u8 {
    let doc = match load_document(file) {
        Ok(doc) => doc,
        Err(code) => return code,
    };
    if invariant != "dell" {
        eprintln!("error: unknown invariant {invariant:?} (expected 'dell')");
        return EXIT_PARSE;
    }
    if vertex == 0 || vertex > doc.quiver.vertex_count() {
        eprintln!(
            "error: vertex {vertex} out of range 1..={}",
            doc.quiver.vertex_count()
        );
        return EXIT_DOMAIN;
    }
    let cert = deloop_core::dell_simple(&doc.quiver, VertexId::new(vertex))
        .expect("vertex range checked above");
    println!("dell(S_{}) = {}", cert.vertex, cert.level);
    for failure in &cert.failures {
        println!("n={} fails at j={}", failure.level, failure.vertex);
    }
    if let ExtendedNat::Finite(level) = cert.level {
        for just in &cert.justifications {
            println!("{}", render_justification(level, just));
        }
    }
    EXIT_OK
}
