//! Batch command-line interface: build measurement-operator bases, audit
//! them, partition into mutually unbiased families, emit change-of-basis
//! matrices, classify gates, and run Monte Carlo fidelity estimates.
//!
//! All numerical work lives in the library; every subcommand is a thin
//! wrapper that parses arguments, calls one library entry point, and renders
//! the report as JSON (`--json`) or text. Identical command lines (including
//! seeds) produce byte-identical output.
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage error.

mod gates;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qudit_mub::classify::{classify, cycle_degree_histogram, is_mub_preserving};
use qudit_mub::fidelity::{mc_estimate, relevance_distribution};
use qudit_mub::mub::{
    count_knight_unitaries, knight_unitary, partition_basis, verify_diagonal_property, verify_mub,
    KnightResult, CENSUS_LIMIT,
};
use qudit_mub::pauli::OperatorBasis;
use qudit_mub::zd::Dimension;

use output::{
    BasisReport, ClassifyCommandReport, EstimateCommandReport, KnightCommandReport, KnightEntry,
    PartitionReport,
};

#[derive(Parser)]
#[command(
    name = "qudit-mub",
    version,
    about = "Optimal measurement-operator bases for qudits: construction, MUB partitions, gate classification, Monte Carlo fidelity estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Unitarity tolerance for gates loaded from dense-matrix files.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the labelled operator basis for the given dimensions.
    Basis(DimsArgs),
    /// Audit a basis file (or a freshly built basis): counts, unitarity,
    /// orthonormality, traces, spectra.
    Verify(VerifyArgs),
    /// Partition a prime-dimension basis into Abelian families and verify
    /// that their eigenbases are mutually unbiased.
    Partition(DimsArgs),
    /// Emit change-of-basis matrices with one entry per cyclic diagonal;
    /// composite dimensions demonstrate the collisions instead.
    Knight(KnightArgs),
    /// Decide whether a gate maps the basis onto itself, with cycle
    /// structure and partition preservation.
    Classify(ClassifyArgs),
    /// Monte Carlo estimate of the average gate fidelity with an exact
    /// reference value.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct DimsArgs {
    /// Comma-separated subsystem dimensions; composite entries are
    /// factorized into primes (6 becomes 2,3).
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Basis JSON file to audit; omit to build from --dims and audit that.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
}

#[derive(Args)]
struct KnightArgs {
    /// Matrix dimension.
    #[arg(long)]
    d: usize,
    /// Step width; omit to emit all b in [2, d-1].
    #[arg(long)]
    b: Option<usize>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Gate spec: I | X | Z | F | pauli:a,b | csum | tensor:S;S;… |
    /// random:SEED | path to a dense-matrix JSON file.
    #[arg(long)]
    gate: String,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    gate: String,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Channel spec: none | depolarizing:p | local-depolarizing:p |
    /// dephasing:g (noise composed after the gate) | path to a Kraus JSON
    /// file (used as the complete noisy implementation).
    #[arg(long)]
    channel: String,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulate finite measurement statistics with this many shots per
    /// sampled expectation value instead of exact evaluation.
    #[arg(long)]
    shots: Option<u32>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// `QUDIT_MUB_THREADS` caps internal parallelism.
fn init_thread_pool() {
    if let Some(n) = std::env::var("QUDIT_MUB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

struct Rendered {
    json: serde_json::Value,
    text: String,
    exit: u8,
}

fn run(cli: Cli) -> Result<u8> {
    let rendered = match &cli.command {
        Command::Basis(args) => cmd_basis(args)?,
        Command::Verify(args) => cmd_verify(args)?,
        Command::Partition(args) => cmd_partition(args)?,
        Command::Knight(args) => cmd_knight(args)?,
        Command::Classify(args) => cmd_classify(args, cli.tol)?,
        Command::Estimate(args) => cmd_estimate(args, cli.tol)?,
    };

    let body = if cli.json {
        let mut s = serde_json::to_string_pretty(&rendered.json)?;
        s.push('\n');
        s
    } else {
        rendered.text.clone()
    };
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            f.write_all(body.as_bytes())?;
        }
        None => {
            print!("{body}");
        }
    }
    Ok(rendered.exit)
}

fn build_basis(raw_dims: &[usize]) -> Result<OperatorBasis> {
    let dims = gates::normalize_dims(raw_dims)?;
    Ok(OperatorBasis::build_tensor(&dims)?)
}

fn cmd_basis(args: &DimsArgs) -> Result<Rendered> {
    let basis = build_basis(&args.dims)?;
    let report = BasisReport { basis };
    Ok(Rendered {
        json: serde_json::to_value(&report)?,
        text: report.text(),
        exit: 0,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Rendered> {
    let basis = match (&args.input, &args.dims) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("malformed basis file {}", path.display()))?
        }
        (None, Some(dims)) => build_basis(dims)?,
        (None, None) => bail!("verify needs --input or --dims"),
    };
    let report = output::verify_basis(&basis);
    let exit = u8::from(!report.pass);
    Ok(Rendered {
        json: serde_json::to_value(&report)?,
        text: report.text(),
        exit,
    })
}

fn cmd_partition(args: &DimsArgs) -> Result<Rendered> {
    let dims = gates::normalize_dims(&args.dims)?;
    let [d] = dims.as_slice() else {
        bail!(
            "partition expects a single prime dimension, got {:?}",
            args.dims
        );
    };
    let basis = OperatorBasis::build(*d)?;
    let collection = partition_basis(&basis)?;
    let verification = verify_mub(&collection);
    let report = PartitionReport {
        d: d.get(),
        families: serde_json::to_value(&collection)?,
        verification,
    };
    let exit = u8::from(!report.verification.pass);
    Ok(Rendered {
        json: serde_json::to_value(&report)?,
        text: report.text(),
        exit,
    })
}

fn cmd_knight(args: &KnightArgs) -> Result<Rendered> {
    let d = Dimension::new(args.d)?;
    let widths: Vec<usize> = match args.b {
        Some(b) => vec![b],
        None => (2..args.d).collect(),
    };
    let mut results = Vec::new();
    for b in widths {
        let outcome = knight_unitary(d, b)?;
        let (diagonal, unitary) = match &outcome {
            KnightResult::Matrix(m) => (Some(verify_diagonal_property(m)), true),
            KnightResult::Violation(_) => (None, false),
        };
        results.push(KnightEntry {
            b,
            outcome,
            diagonal,
            unitary,
        });
    }
    let census = (d.is_prime() && d.get() <= CENSUS_LIMIT)
        .then(|| count_knight_unitaries(d))
        .transpose()?;
    let report = KnightCommandReport {
        d: args.d,
        prime: d.is_prime(),
        results,
        census,
    };
    Ok(Rendered {
        json: serde_json::to_value(&report)?,
        text: report.text(),
        exit: 0,
    })
}

fn cmd_classify(args: &ClassifyArgs, tol: f64) -> Result<Rendered> {
    let dims = gates::normalize_dims(&args.dims)?;
    let basis = OperatorBasis::build_tensor(&dims)?;
    let gate = gates::parse_gate(&args.gate, &dims, tol)?;
    let mut report = classify(&gate, &basis)?;
    if let [d] = dims.as_slice() {
        let collection = partition_basis(&OperatorBasis::build(*d)?)?;
        report.mub_preserving = Some(is_mub_preserving(&gate, &collection)?);
    }
    let cycle_histogram = report
        .characterizable
        .then(|| cycle_degree_histogram(&report))
        .transpose()?;
    let command_report = ClassifyCommandReport {
        gate: args.gate.clone(),
        dims: dims.iter().map(|d| d.get()).collect(),
        report,
        cycle_histogram,
    };
    Ok(Rendered {
        json: serde_json::to_value(&command_report)?,
        text: command_report.text(),
        exit: 0,
    })
}

fn cmd_estimate(args: &EstimateArgs, tol: f64) -> Result<Rendered> {
    let dims = gates::normalize_dims(&args.dims)?;
    let basis = OperatorBasis::build_tensor(&dims)?;
    let gate = gates::parse_gate(&args.gate, &dims, tol)?;
    let channel = gates::parse_channel(&args.channel, &dims, &gate)?;
    let relevance = relevance_distribution(&gate, &basis)?.summary();
    let estimate = mc_estimate(&gate, &channel, &basis, args.samples, args.seed, args.shots)?;
    let report = EstimateCommandReport {
        gate: args.gate.clone(),
        channel: args.channel.clone(),
        dims: dims.iter().map(|d| d.get()).collect(),
        shots: args.shots,
        relevance,
        estimate,
    };
    Ok(Rendered {
        json: serde_json::to_value(&report)?,
        text: report.text(),
        exit: 0,
    })
}
