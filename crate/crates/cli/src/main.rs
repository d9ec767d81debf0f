use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cover_core::error::Error;
use cover_core::instances::{GraphFormat, InstanceSpec};
use cover_core::kernel::RuleSet;
use cover_core::metrics::{aggregate_by_depth, depth_rows_csv, depth_sweep};
use cover_core::model::{build_ising, build_qubo};
use cover_core::oracle::min_vertex_cover_exact;
use cover_core::pipeline::{
    batch, batch_csv, report_csv_row, run_detailed, PipelineConfig, Problem, SolverKind, CSV_HEADER,
};
use cover_core::qaoa::{TrainConfig, DEFAULT_MAX_QUBITS};

#[derive(Parser, Debug)]
#[command(
    name = "cover",
    version,
    about = "Vertex cover, independent set and clique via kernelization and simulated QAOA",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every configuration in a JSON array of pipeline configs.
    Batch {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        out: OutFormat,
    },
    /// Train once per instance on the full graph and report metrics per depth.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct Source {
    /// Graph file (edge list, DIMACS or MatrixMarket).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generated instance, e.g. `er:n=12,p=0.3` or `regular:n=10,d=3,seed=2`.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, default_value = "minvc")]
    problem: String,
    #[command(flatten)]
    source: Source,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `all`, `none` or a comma list of sr,pr,d2r,hdr,lpr.
    #[arg(long, default_value = "all")]
    rules: String,
    #[arg(long, default_value = "qaoa")]
    solver: String,
    #[arg(long, default_value_t = DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
    #[arg(long)]
    skip_preprocess: bool,
    /// Also try reduction rules on the uncovered part when repairing samples.
    #[arg(long)]
    refine_rules: bool,
    /// Free-text note on a known result, copied into the report.
    #[arg(long)]
    reference: Option<String>,
    /// Include wall-clock timings (the report is then no longer reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,
    #[arg(long)]
    emit_kernel: Option<PathBuf>,
    #[arg(long)]
    emit_distribution: Option<PathBuf>,
    #[arg(long)]
    emit_schedule: Option<PathBuf>,
    /// QUBO of the residual graph as JSON.
    #[arg(long)]
    emit_qubo: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long)]
    gen: Vec<String>,
    /// Comma-separated depths.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8")]
    layers: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    out: OutFormat,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        // Unreadable or malformed input.
        Error::Parse { .. } | Error::Json(_) | Error::Io(_) => 2,
        Error::Capacity { .. } => 3,
        Error::Infeasible(_) => 4,
        _ => 1,
    }
}

/// Parses `er:n=12,p=0.3[,seed=1]` and `regular:n=10,d=3[,seed=1]`.
fn parse_gen(spec: &str, default_seed: u64) -> Result<InstanceSpec, Error> {
    let bad = |msg: String| Error::Parse { line: 0, message: msg };
    let (kind, params) = spec.split_once(':').ok_or_else(|| bad(format!("generator '{spec}' needs kind:params")))?;
    let mut n = None;
    let mut p = None;
    let mut d = None;
    let mut seed = default_seed;
    for kv in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{kv}'")))?;
        match k {
            "n" => n = Some(number(k, v)?),
            "d" => d = Some(number(k, v)?),
            "p" => p = Some(number(k, v)?),
            "seed" => seed = number(k, v)?,
            other => return Err(bad(format!("unknown generator parameter '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| bad("generator needs n".into()))?;
    match kind {
        "er" | "erdos_renyi" => Ok(InstanceSpec::ErdosRenyi { n, p: p.ok_or_else(|| bad("er needs p".into()))?, seed }),
        "regular" | "reg" => Ok(InstanceSpec::Regular { n, d: d.ok_or_else(|| bad("regular needs d".into()))?, seed }),
        other => Err(bad(format!("unknown generator '{other}'"))),
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Error> {
    value.parse().map_err(|_| Error::Parse { line: 0, message: format!("invalid value for {key}: '{value}'") })
}

fn parse_arg<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Error> {
    s.parse::<T>().map_err(|e| Error::Parse { line: 0, message: e.to_string() })
}

fn file_spec(path: &Path, format: Option<&str>) -> Result<InstanceSpec, Error> {
    Ok(InstanceSpec::File { path: path.to_path_buf(), format: format.map(parse_arg::<GraphFormat>).transpose()? })
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn run_single(a: RunArgs) -> Result<(), Error> {
    let instance = match (&a.source.input, &a.source.gen) {
        (Some(path), _) => file_spec(path, a.format.as_deref())?,
        (None, Some(g)) => parse_gen(g, a.seed)?,
        (None, None) => {
            return Err(Error::Parse { line: 0, message: "one of --input or --gen is required".into() })
        }
    };
    let problem: Problem = parse_arg(&a.problem)?;
    let mut cfg = PipelineConfig::new(problem, instance);
    cfg.layers = a.layers;
    cfg.shots = a.shots;
    cfg.seed = a.seed;
    cfg.rules = parse_arg::<RuleSet>(&a.rules)?;
    cfg.solver = parse_arg::<SolverKind>(&a.solver)?;
    cfg.max_qubits = a.max_qubits;
    cfg.skip_preprocess = a.skip_preprocess;
    cfg.refine_with_rules = a.refine_rules;
    cfg.reference = a.reference;
    cfg.record_timings = a.timings;

    let out = run_detailed(&cfg)?;
    if let Some(path) = &a.emit_kernel {
        write_json(path, &out.kernel.dump())?;
    }
    if let Some(path) = &a.emit_distribution {
        if let Some(d) = &out.distribution {
            std::fs::write(path, d.to_json()? + "\n")?;
        }
    }
    if let Some(path) = &a.emit_schedule {
        if let Some(s) = &out.schedule {
            write_json(path, s)?;
        }
    }
    if let Some(path) = &a.emit_qubo {
        if !out.kernel.reduced.is_empty() {
            std::fs::write(path, build_qubo(&out.kernel.reduced)?.to_json()? + "\n")?;
        }
    }
    match a.out {
        OutFormat::Json => println!("{}", serde_json::to_string_pretty(&out.report)?),
        OutFormat::Csv => println!("{CSV_HEADER}\n{}", report_csv_row(&out.report)),
    }
    Ok(())
}

fn run_batch(config: &Path, out: OutFormat) -> Result<(), Error> {
    let text = std::fs::read_to_string(config)?;
    let configs: Vec<PipelineConfig> = serde_json::from_str(&text)?;
    let rows = batch(&configs);
    match out {
        OutFormat::Csv => print!("{}", batch_csv(&rows)),
        OutFormat::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
    }
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Result<(), Error> {
    let mut specs = Vec::new();
    for p in &a.input {
        specs.push(file_spec(p, None)?);
    }
    for g in &a.gen {
        specs.push(parse_gen(g, a.seed)?);
    }
    if specs.is_empty() {
        return Err(Error::Parse { line: 0, message: "sweep needs at least one --input or --gen".into() });
    }
    let cfg = TrainConfig { max_qubits: a.max_qubits, ..TrainConfig::default() };
    let mut rows = Vec::new();
    for spec in &specs {
        let g = spec.build()?;
        let model = build_ising(&g)?;
        let opt = min_vertex_cover_exact(&g)?.opt_profit;
        rows.extend(depth_sweep(&spec.name(), &model, &a.layers, &cfg, a.shots, a.seed, opt)?);
    }
    match a.out {
        OutFormat::Csv => print!("{}", depth_rows_csv(&rows)),
        OutFormat::Json => {
            let value = serde_json::json!({ "rows": rows, "aggregate": aggregate_by_depth(&rows) });
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Batch { config, out }) => run_batch(&config, out),
        Some(Command::Sweep(args)) => run_sweep(args),
        None => run_single(cli.run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
