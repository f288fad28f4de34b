//! `mutagen`: list operators, scan a project for injection points, generate
//! mutants, evaluate a mutant corpus and compare corpora.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mutagen_core::exec::{default_workers, Execution};
use mutagen_core::harness::{
    compare_tables, compute_metrics, evaluate_corpus, render_percent, CompileOracle, MetricsRow, MetricsTable,
    SmokeVerdict,
};
use mutagen_core::mutagen::{
    generate_mutants, read_mutation_log, records_from_log, GenerationOptions, LogFormat, MutantStatus,
    MUTATION_LOG_JSONL,
};
use mutagen_core::operators::{domain_label, list_operators};
use mutagen_core::pfp::derive_pfp;
use mutagen_core::{ingest_project, SubjectProject};

const METRICS_REPORT: &str = "metrics-report.json";
const METRICS_CSV: &str = "metrics.csv";

#[derive(Parser, Debug)]
#[command(name = "mutagen", version, about = "Mutation testing for Android-style projects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the operator catalog.
    Operators {
        #[arg(long, value_enum, default_value_t = CatalogFormat::Table)]
        format: CatalogFormat,
    },
    /// Derive the potential fault profile and print it as JSON Lines.
    Scan {
        #[command(flatten)]
        target: Target,
        /// Write the profile here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one mutant project per profile entry.
    Mutate {
        #[command(flatten)]
        target: Target,
        /// Directory for the mutants and the mutation log; must be empty or
        /// absent, and outside the project.
        #[arg(long)]
        out: PathBuf,
        /// Seed for operators that draw random replacements.
        #[arg(long, env = "MUTAGEN_SEED", default_value_t = 0)]
        seed: u64,
        /// Skip injection points in the launcher activity's source file.
        #[arg(long)]
        exclude_main_activity: bool,
        #[arg(long, value_enum, default_value_t = LogFormatArg::Jsonl)]
        log_format: LogFormatArg,
    },
    /// Run compile and smoke oracles over a generated corpus.
    Evaluate(EvaluateArgs),
    /// Compare metrics tables: the first is the baseline.
    Compare {
        /// `metrics.csv` files, one per tool; the tool is named after the
        /// file stem.
        #[arg(required = true, num_args = 2..)]
        tables: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Write the comparison here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Root directory of the project to mutate.
    #[arg(long)]
    project: PathBuf,
    /// Comma-separated operator ids, or `all`.
    #[arg(long, default_value = "all")]
    operators: String,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallel: Option<u64>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("oracle").required(true).args(["build_cmd", "proxy_compile"])))]
struct EvaluateArgs {
    /// Directory written by `mutate`.
    #[arg(long)]
    mutants: PathBuf,
    /// Build command run in each mutant; exit code 0 means it compiles.
    #[arg(long)]
    build_cmd: Option<String>,
    /// Judge compilability by re-indexing every source and XML file.
    #[arg(long)]
    proxy_compile: bool,
    /// Smoke command run in each compiled mutant; a failure or crash marks
    /// the mutant trivial.
    #[arg(long)]
    run_cmd: Option<String>,
    #[arg(long, default_value_t = 60_000)]
    timeout_ms: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallel: Option<u64>,
    /// Where to write the report; defaults to the mutants directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// App name for the metrics row; defaults to the mutants directory name.
    #[arg(long)]
    app: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CatalogFormat {
    Table,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LogFormatArg {
    Jsonl,
    Csv,
}

/// A command-line mistake: reported with exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed stdout (`mutagen operators | head`) is not a failure.
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Operators { format } => print_operators(format),
        Command::Scan { target, out } => scan(target, out),
        Command::Mutate {
            target,
            out,
            seed,
            exclude_main_activity,
            log_format,
        } => mutate(target, out, seed, exclude_main_activity, log_format),
        Command::Evaluate(args) => evaluate(args),
        Command::Compare { tables, format, out } => compare(tables, format, out),
    }
}

/// Parses `all` or a comma-separated list, reporting every unknown token.
fn parse_selection(spec: &str) -> Result<BTreeSet<String>> {
    let known: BTreeSet<&str> = list_operators().iter().map(|d| d.id).collect();
    if spec.trim() == "all" {
        return Ok(known.iter().map(|s| s.to_string()).collect());
    }
    let tokens: Vec<&str> = spec.split(',').map(str::trim).collect();
    if tokens.iter().any(|t| t.is_empty()) {
        return Err(UsageError(format!("empty operator name in `{spec}`")).into());
    }
    let unknown: Vec<&str> = tokens.iter().copied().filter(|t| !known.contains(t)).collect();
    if !unknown.is_empty() {
        return Err(UsageError(format!(
            "unknown operator(s): {} (see `mutagen operators`)",
            unknown.join(", ")
        ))
        .into());
    }
    Ok(tokens.into_iter().map(str::to_string).collect())
}

fn workers(parallel: Option<u64>) -> usize {
    parallel.map(|n| n as usize).unwrap_or_else(default_workers)
}

fn load_project(path: &Path) -> Result<SubjectProject> {
    let project = ingest_project(path).with_context(|| format!("reading project {}", path.display()))?;
    for w in project.warnings() {
        log::warn!("{}: {}", w.path, w.message);
    }
    Ok(project)
}

fn print_operators(format: CatalogFormat) -> Result<()> {
    let mut out = io::stdout().lock();
    match format {
        CatalogFormat::Json => {
            serde_json::to_writer_pretty(&mut out, list_operators())?;
            writeln!(out)?;
        }
        CatalogFormat::Table => {
            writeln!(out, "{:<28} {:<22} {:<13} SUMMARY", "ID", "CATEGORY", "TARGET")?;
            for d in list_operators() {
                writeln!(
                    out,
                    "{:<28} {:<22} {:<13} {}",
                    d.id,
                    d.category.label(),
                    domain_label(d.target_domain),
                    d.summary
                )?;
            }
        }
    }
    Ok(())
}

fn scan(target: Target, out: Option<PathBuf>) -> Result<()> {
    let selection = parse_selection(&target.operators)?;
    let project = load_project(&target.project)?;
    let pfp = derive_pfp(&project, &selection, Execution::with_workers(workers(target.parallel)))?;
    for d in &pfp.diagnostics {
        log::warn!("{d}");
    }
    match out {
        Some(path) => {
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            pfp.write_jsonl(io::BufWriter::new(file))?;
        }
        None => pfp.write_jsonl(io::stdout().lock())?,
    }
    eprintln!("{} injection point(s) in {}", pfp.len(), target.project.display());
    Ok(())
}

fn mutate(
    target: Target,
    out: PathBuf,
    seed: u64,
    exclude_main_activity: bool,
    log_format: LogFormatArg,
) -> Result<()> {
    let selection = parse_selection(&target.operators)?;
    let parallelism = workers(target.parallel);
    let project = load_project(&target.project)?;
    let pfp = derive_pfp(&project, &selection, Execution::with_workers(parallelism))?;
    for d in &pfp.diagnostics {
        log::warn!("{d}");
    }
    let options = GenerationOptions {
        output_dir: out.clone(),
        parallelism,
        seed,
        exclude_main_activity,
        operator_selection: selection,
        log_format: match log_format {
            LogFormatArg::Jsonl => LogFormat::Jsonl,
            LogFormatArg::Csv => LogFormat::Csv,
        },
    };
    let report = generate_mutants(&project, &pfp, &options)?;
    eprintln!(
        "{} mutant(s) generated, {} skipped, {} failed; log at {}",
        report.count(MutantStatus::Generated),
        report.count(MutantStatus::Skipped),
        report.count(MutantStatus::TransformationFailed),
        report.log_path.display()
    );
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let log_path = args.mutants.join(MUTATION_LOG_JSONL);
    let entries = read_mutation_log(&log_path).with_context(|| format!("reading {}", log_path.display()))?;
    let records = records_from_log(&entries);
    let timeout = Duration::from_millis(args.timeout_ms);
    let oracle = match &args.build_cmd {
        Some(command) => CompileOracle::External {
            command: command.clone(),
            timeout,
        },
        None => CompileOracle::Proxy,
    };
    let smoke = args.run_cmd.as_deref().map(|c| (c, timeout));
    let evaluation = evaluate_corpus(
        &records,
        &args.mutants,
        &oracle,
        smoke,
        Execution::with_workers(workers(args.parallel)),
    );
    let report = compute_metrics(&records, &evaluation.compile, evaluation.smoke.as_deref())?;
    let app = args.app.clone().unwrap_or_else(|| {
        args.mutants
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "app".to_string())
    });

    let mut json = report.to_json(Some(&app));
    let mutants: Vec<serde_json::Value> = evaluation
        .compile
        .iter()
        .map(|c| {
            let smoke = evaluation
                .smoke
                .as_ref()
                .and_then(|s| s.iter().find(|s| s.mutant_id == c.mutant_id));
            serde_json::json!({
                "mutant_id": c.mutant_id,
                "compiles": c.passed,
                "compile_reason": c.reason,
                "smoke": smoke.map(|s| s.verdict),
                "smoke_reason": smoke.and_then(|s| s.reason.clone()),
            })
        })
        .collect();
    json["mutants"] = serde_json::Value::Array(mutants);

    let out_dir = args.out.clone().unwrap_or_else(|| args.mutants.clone());
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let report_path = out_dir.join(METRICS_REPORT);
    fs::write(&report_path, serde_json::to_string_pretty(&json)? + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    let csv_path = out_dir.join(METRICS_CSV);
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
    w.serialize(report.csv_row(&app))?;
    w.flush()?;

    let skipped = evaluation
        .smoke
        .iter()
        .flatten()
        .filter(|s| s.verdict == SmokeVerdict::Skipped)
        .count();
    if skipped > 0 {
        log::warn!("{skipped} smoke run(s) could not be performed; triviality unknown for those mutants");
    }
    eprintln!(
        "tngm={} ncm={} ({}%) tm={} ({}%); report at {}",
        report.tngm,
        report.ncm_count,
        render_percent(report.ncm_percent()),
        report.tm_count,
        render_percent(report.tm_percent()),
        report_path.display()
    );
    Ok(())
}

fn read_table(path: &Path) -> Result<MetricsTable> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = reader
        .deserialize::<MetricsRow>()
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    let tool = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(MetricsTable { tool, rows })
}

fn compare(paths: Vec<PathBuf>, format: TableFormat, out: Option<PathBuf>) -> Result<()> {
    let tables = paths.iter().map(|p| read_table(p)).collect::<Result<Vec<_>>>()?;
    let rows = compare_tables(&tables);
    if rows.is_empty() {
        bail!("no app appears in both the baseline and another table");
    }
    let mut buf = Vec::new();
    match format {
        TableFormat::Json => {
            serde_json::to_writer_pretty(&mut buf, &rows)?;
            buf.push(b'\n');
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    match out {
        Some(path) => fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}
