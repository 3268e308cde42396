//! `derlab certify | reconstruct | extend-measure | blocks`.
//!
//! Every subcommand prints a short summary and, with `--out`, writes the full
//! JSON report. Exit status: 0 when every check passes, 1 when a check fails
//! or is inconclusive, 2 on usage or I/O errors.

mod report;
mod source;

pub use report::RunReport;
pub use source::{load, Loaded};

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::blockalg::{check_block_additivity, check_block_preservation, reconstruct_blockwise, BlockAlgebra, BlockError};
use crate::derlab::{certify_weak_2_local, CertifyConfig, Family, Oracle, SampleSet, Strategy};
use crate::matlin::{eps, matrix_to_json, matrix_units, set_eps, Matrix, Projection, Scalar, C64, CQ};
use crate::measure::{
    check_finite_additivity, estimate_bound, gleason_extend, verify_extension, verify_extension_on, MeasureError,
    ProjectionMeasure, NO_GLEASON_GUARANTEE,
};
use crate::reconstruct::{
    inner_samples, reconstruct_least_squares, reconstruct_m2, reconstruct_mn_constructive, verify_inner, InnerResidual,
    ReconstructError,
};
use crate::report::{CheckBuilder, CheckOutcome, Citation, Status};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(name = "derlab", version, about = "Certify, reconstruct and linearize weak-2-local derivations on matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the two-point batteries and the identity suite against an oracle
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
        strategy: StrategyArg,
        /// Random identity-suite instances of each kind
        #[arg(long, default_value_t = 6)]
        samples: usize,
        /// Random two-point triples
        #[arg(long, default_value_t = 200)]
        triples: usize,
    },
    /// Recover z with Δ = [z,·] and check it on fresh samples
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// m2 on M_2, constructive otherwise
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, default_value_t = 8)]
        verify_samples: usize,
    },
    /// Extend the projection measure μ(p) = Δ(p) to a linear map
    ExtendMeasure {
        #[command(flatten)]
        common: Common,
        /// Table of projection values, instead of --oracle
        #[arg(long, conflicts_with = "oracle")]
        table: Option<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Block preservation, additivity across blocks and blockwise reconstruction
    Blocks {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    /// Block sizes of M_{n_1} ⊕ … ⊕ M_{n_m}, comma separated
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// builtin:<name> or a JSON oracle file
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Float comparison tolerance
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Where to write the JSON report
    #[arg(long, visible_alias = "report")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Work with *-derivations
    #[arg(long)]
    star: bool,
}

impl Common {
    fn oracle_spec(&self) -> &str {
        self.oracle.as_deref().unwrap_or("builtin:inner")
    }

    fn settings(&self) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("n".into(), json!(self.n));
        m.insert("dims".into(), json!(self.dims));
        m.insert("oracle".into(), json!(self.oracle_spec()));
        m.insert("backend".into(), json!(self.backend.name()));
        m.insert("eps".into(), json!(eps()));
        m.insert("seed".into(), json!(self.seed));
        m.insert("threads".into(), json!(self.threads));
        m.insert("star".into(), json!(self.star));
        m
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl BackendArg {
    fn name(self) -> &'static str {
        match self {
            BackendArg::Exact => "exact",
            BackendArg::Float => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Structured,
    Randomized,
    Both,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Structured => Strategy::Structured,
            StrategyArg::Randomized => Strategy::Randomized,
            StrategyArg::Both => Strategy::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    M2,
    Constructive,
    Lsq,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::M2 => "m2",
            Method::Constructive => "constructive",
            Method::Lsq => "lsq",
        }
    }
}

/// Parse `args` (program name first), run, print the summary and write the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, echo(&args)) {
        Ok((report, out)) => {
            print!("{}", report.summary());
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, report.to_pretty()) {
                    eprintln!("error: {}: {e}", path.display());
                    return 2;
                }
                println!("report: {}", path.display());
            }
            match report.status() {
                Status::Pass => 0,
                _ => 1,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// The arguments after the program name, minus the report path.
fn echo(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let a = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--report" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--report=") {
            continue;
        }
        out.push(a);
    }
    out
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn execute(command: Command, argv: Vec<String>) -> Result<(RunReport, Option<PathBuf>), CliError> {
    let common = match &command {
        Command::Certify { common, .. }
        | Command::Reconstruct { common, .. }
        | Command::ExtendMeasure { common, .. }
        | Command::Blocks { common, .. } => common.clone(),
    };
    if let Some(e) = common.eps {
        if !(e > 0.0 && e.is_finite()) {
            return Err(CliError::Usage(format!("--eps must be positive, got {e}")));
        }
        set_eps(e);
    }
    if common.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let mut report = match common.backend {
        BackendArg::Exact => dispatch::<CQ>(&command, &common)?,
        BackendArg::Float => dispatch::<C64>(&command, &common)?,
    };
    report.argv = argv;
    Ok((report, common.out))
}

fn dispatch<S: Scalar>(command: &Command, common: &Common) -> Result<RunReport, CliError> {
    match command {
        Command::Certify { strategy, samples, triples, .. } => certify::<S>(common, (*strategy).into(), *samples, *triples),
        Command::Reconstruct { method, verify_samples, .. } => reconstruct::<S>(common, *method, *verify_samples),
        Command::ExtendMeasure { table, samples, .. } => extend_measure::<S>(common, table.as_deref(), *samples),
        Command::Blocks { samples, .. } => blocks::<S>(common, *samples),
    }
}

fn certify_config(common: &Common, strategy: Strategy, samples: usize, triples: usize) -> CertifyConfig {
    CertifyConfig {
        strategy,
        star: common.star,
        seed: common.seed,
        random_triples: triples,
        random_samples: samples,
        threads: common.threads,
    }
}

fn new_report(command: &str, common: &Common, oracle: String, mut settings: serde_json::Map<String, Value>) -> RunReport {
    let mut base = common.settings();
    base.append(&mut settings);
    RunReport {
        command: command.into(),
        argv: Vec::new(),
        settings: Value::Object(base),
        oracle,
        checks: Vec::new(),
        result: Value::Null,
        flags: Vec::new(),
    }
}

fn certify<S: Scalar>(common: &Common, strategy: Strategy, samples: usize, triples: usize) -> Result<RunReport, CliError> {
    let config = certify_config(common, strategy, samples, triples);
    let dims = source::requested_dims(common.n, &common.dims)?;
    let loaded = load::<S>(common.oracle_spec(), dims, common.seed, &config)?;
    let mut settings = serde_json::Map::new();
    settings.insert("strategy".into(), json!(strategy.to_string()));
    settings.insert("samples".into(), json!(samples));
    settings.insert("triples".into(), json!(triples));
    let mut report = new_report("certify", common, loaded.label.clone(), settings);

    let cert = certify_weak_2_local(&loaded.oracle, &config);
    report.checks = cert.checks;
    if loaded.dims.len() > 1 {
        let alg = BlockAlgebra::new(loaded.dims.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut rng = rng_stream(common.seed, 2);
        report.checks.push(check_block_preservation(&loaded.oracle, &alg, samples, &mut rng));
        report.checks.push(check_block_additivity(&loaded.oracle, &alg, samples, &mut rng));
    }
    let instances: usize = report.checks.iter().map(|c| c.instances).sum();
    report.result = json!({
        "n": loaded.n(),
        "dims": loaded.dims,
        "mode": if common.star { "star" } else { "plain" },
        "instances": instances,
    });
    Ok(report)
}

/// A reconstruction error as a check: shape violations fail with their
/// citation, missing table data is inconclusive, misuse is a usage error.
fn reconstruction_failure(name: &str, err: ReconstructError) -> Result<CheckOutcome, CliError> {
    match err {
        ReconstructError::Violation { citation, point, detail } => {
            let mut b = CheckBuilder::new(name, citation);
            b.record(false, 0.0, || format!("{point}: {detail}"));
            Ok(b.finish())
        }
        ReconstructError::Oracle(e) => {
            let mut b = CheckBuilder::new(name, Citation::InnerResidual);
            b.inconclusive(|| e.to_string());
            Ok(b.finish())
        }
        ReconstructError::RankDeficient { rank, expected } => {
            let mut b = CheckBuilder::new(name, Citation::InnerResidual);
            b.inconclusive(|| format!("the sample points determine only {rank} of {expected} parameters"));
            Ok(b.finish())
        }
        e @ (ReconstructError::Dimension { .. } | ReconstructError::NeedsStar) => Err(CliError::Usage(e.to_string())),
    }
}

fn labelled<S: Scalar>(points: Vec<Matrix<S>>) -> Vec<(String, Matrix<S>)> {
    points.into_iter().map(|x| (x.to_string(), x)).collect()
}

fn reconstruct<S: Scalar>(common: &Common, method: Option<Method>, verify_samples: usize) -> Result<RunReport, CliError> {
    let config = certify_config(common, Strategy::Both, 6, 200);
    let dims = source::requested_dims(common.n, &common.dims)?;
    let loaded = load::<S>(common.oracle_spec(), dims, common.seed, &config)?;
    if loaded.dims.len() > 1 {
        return Err(CliError::Usage("reconstruct works on a single block; use `blocks` for direct sums".into()));
    }
    let n = loaded.n();
    let method = method.unwrap_or(if n == 2 { Method::M2 } else { Method::Constructive });
    if method == Method::Constructive && !common.star && n != 2 {
        return Err(CliError::Usage(
            "constructive reconstruction on M_n needs --star; use --method lsq for plain derivations".into(),
        ));
    }
    let mut settings = serde_json::Map::new();
    settings.insert("method".into(), json!(method.name()));
    settings.insert("verify_samples".into(), json!(verify_samples));
    let mut report = new_report("reconstruct", common, loaded.label.clone(), settings);
    let name = format!("reconstruct_{}", method.name());
    let oracle = &loaded.oracle;

    let outcome = match method {
        Method::M2 => reconstruct_m2(oracle).map(|(z, trace)| (z, trace.to_json())),
        Method::Constructive => reconstruct_mn_constructive(oracle, true).map(|(z, trace)| (z, trace.to_json())),
        Method::Lsq => {
            let basis = loaded.table_inputs().unwrap_or_else(|| matrix_units(n));
            reconstruct_least_squares(oracle, &basis, common.star)
                .map(|ls| (ls.z, json!({"method": "lsq", "residual": ls.residual, "points": ls.points})))
        }
    };
    let (z, trace) = match outcome {
        Ok(v) => v,
        Err(e) => {
            report.checks.push(reconstruction_failure(&name, e)?);
            report.result = json!({"method": method.name(), "z": null});
            return Ok(report);
        }
    };

    let samples = match loaded.table_inputs() {
        Some(inputs) => labelled(inputs),
        None => inner_samples::<S, _>(n, verify_samples, &mut rng_stream(common.seed, 2)),
    };
    let verification = verify_inner(oracle, &z, &samples).map_err(|e| CliError::Usage(e.to_string()))?;
    let tol = InnerResidual::default_tolerance::<S>();
    report.checks.push(verification.check("verify_inner", tol));
    report.result = json!({
        "method": method.name(),
        "z": matrix_to_json(&z),
        "z_display": z.to_string(),
        "trace": trace,
        "verification": {
            "residual": verification.residual,
            "worst": verification.worst,
            "samples": verification.samples.len(),
            "tolerance": tol,
        },
    });
    Ok(report)
}

/// Orthogonal pairs `p, q` of listed projections whose sum is listed too.
fn table_families<S: Scalar>(points: &[Matrix<S>]) -> Vec<Family<S>> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let (Ok(p), Ok(q)) = (Projection::new(points[i].clone()), Projection::new(points[j].clone())) else {
                continue;
            };
            if !p.is_orthogonal_to(&q) {
                continue;
            }
            let sum = &points[i] + &points[j];
            if points.iter().any(|x| x.approx_eq(&sum)) {
                out.push(Family {
                    label: format!("listed #{} + #{}", i + 1, j + 1),
                    parts: vec![p, q],
                    coeffs: vec![S::one(), S::one()],
                });
            }
        }
    }
    out
}

fn measure_error(e: MeasureError) -> CliError {
    CliError::Usage(e.to_string())
}

fn extend_measure<S: Scalar>(common: &Common, table: Option<&str>, samples: usize) -> Result<RunReport, CliError> {
    let config = certify_config(common, Strategy::Both, 6, 200);
    let dims = source::requested_dims(common.n, &common.dims)?;
    let spec = table.unwrap_or(common.oracle_spec());
    let loaded = load::<S>(spec, dims, common.seed, &config)?;
    if loaded.dims.len() > 1 {
        return Err(CliError::Usage("extend-measure works on a single block M_n".into()));
    }
    let n = loaded.n();
    let listed = loaded.table_inputs();
    let mu = match (&listed, &loaded.oracle) {
        (Some(_), crate::derlab::MapOracle::Table(t)) if table.is_some() => {
            ProjectionMeasure::from_table(n, t.entries().to_vec()).map_err(measure_error)?
        }
        _ if table.is_some() => return Err(CliError::Usage(format!("{spec}: --table needs a table of projections"))),
        _ => ProjectionMeasure::from_oracle(Arc::new(loaded.oracle.clone()) as Arc<dyn Oracle<S>>),
    };
    let mut settings = serde_json::Map::new();
    settings.insert("samples".into(), json!(samples));
    settings.insert("table".into(), json!(table));
    let mut report = new_report("extend-measure", common, loaded.label.clone(), settings);
    if n == 2 {
        report.flags.push(NO_GLEASON_GUARANTEE.to_string());
    }
    let mut rng = rng_stream(common.seed, 2);

    let families = match &listed {
        Some(points) => table_families(points),
        None => {
            let mut set = SampleSet::<S>::structured(n);
            set.extend(SampleSet::random(n, 4, &mut rng));
            set.families
        }
    };
    let additivity = check_finite_additivity(&mu, &families).map_err(measure_error)?;
    report.checks.push(additivity.outcome.clone());

    let ext = match gleason_extend(&mu) {
        Ok(ext) => ext,
        Err(MeasureError::Oracle(e)) => {
            let mut b = CheckBuilder::new("gleason_extension", Citation::GleasonExtension);
            b.inconclusive(|| format!("the spanning projections are not all available: {e}"));
            report.checks.push(b.finish());
            report.result = json!({"G": null, "additivity": additivity.families});
            return Ok(report);
        }
        Err(e) => return Err(measure_error(e)),
    };
    let check = match &listed {
        Some(points) => verify_extension_on(&ext, &mu, &labelled(points.clone())),
        None => verify_extension(&ext, &mu, samples, &mut rng),
    }
    .map_err(measure_error)?;
    report.checks.push(check.outcome.clone());

    let bound = match &listed {
        Some(points) => {
            let mut best = (0.0_f64, String::from("0"));
            for p in points {
                let norm = mu.value(p).map_err(|e| CliError::Usage(e.to_string()))?.spectral_norm();
                if norm > best.0 {
                    best = (norm, p.to_string());
                }
            }
            json!({"estimate": best.0, "argmax": best.1, "samples": points.len()})
        }
        None => json!(estimate_bound(&mu, samples, &mut rng).map_err(|e| CliError::Usage(e.to_string()))?),
    };
    for f in &ext.flags {
        if !report.flags.contains(f) {
            report.flags.push(f.clone());
        }
    }
    report.result = json!({
        "G": ext.to_json(),
        "additivity": additivity.families,
        "extension": {"residual": check.residual(), "structured": check.structured, "random": check.random},
        "bound": bound,
    });
    Ok(report)
}

fn blocks<S: Scalar>(common: &Common, samples: usize) -> Result<RunReport, CliError> {
    let config = certify_config(common, Strategy::Both, 6, 200);
    let dims = source::requested_dims(common.n, &common.dims)?;
    let loaded = load::<S>(common.oracle_spec(), dims, common.seed, &config)?;
    let alg = BlockAlgebra::new(loaded.dims.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut settings = serde_json::Map::new();
    settings.insert("samples".into(), json!(samples));
    let mut report = new_report("blocks", common, loaded.label.clone(), settings);
    let mut rng = rng_stream(common.seed, 2);
    report.checks.push(check_block_preservation(&loaded.oracle, &alg, samples, &mut rng));
    report.checks.push(check_block_additivity(&loaded.oracle, &alg, samples, &mut rng));
    report.result = json!({"dims": alg.dims, "blocks": null, "z": null});
    if !common.star {
        report.checks.push(CheckBuilder::skipped(
            "blockwise_reconstruction",
            Citation::InnerResidual,
            "blockwise reconstruction needs --star",
        ));
        return Ok(report);
    }
    if report.checks[0].status != Status::Pass {
        return Ok(report);
    }
    let oracle: Arc<dyn Oracle<S>> = Arc::new(loaded.oracle.clone());
    match reconstruct_blockwise(oracle, &alg, true, samples, &mut rng) {
        Ok(rec) => {
            let tol = InnerResidual::default_tolerance::<S>();
            report.checks.push(rec.verification.check("verify_inner", tol));
            report.result = json!({
                "dims": alg.dims,
                "blocks": rec.blocks.iter().map(matrix_to_json).collect::<Vec<_>>(),
                "z": matrix_to_json(&rec.z),
                "verification": {"residual": rec.verification.residual, "worst": rec.verification.worst},
            });
        }
        Err(BlockError::Block { index, source }) => {
            let mut check = reconstruction_failure(&format!("reconstruct_block_{index}"), source)?;
            if let Some(cx) = check.counterexample.take() {
                check.counterexample = Some(format!("block {index}, {cx}"));
            }
            report.checks.push(check);
        }
        Err(BlockError::Oracle(e)) => {
            let mut b = CheckBuilder::new("verify_inner", Citation::InnerResidual);
            b.inconclusive(|| e.to_string());
            report.checks.push(b.finish());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    }
    Ok(report)
}
