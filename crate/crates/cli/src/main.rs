use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use pocketbench_cli::commands::{build_tasks, matrix_from_reports, parse_weights, rank};
use pocketbench_cli::config::Config;
use pocketbench_cli::eval::{read_manifest, run_eval, write_outcome, EvalSettings};
use pocketbench_core::metrics::chem::PropertyProvider;
use pocketbench_core::metrics::interaction::{DockCommand, EnergySource, ScoreTable};
use pocketbench_core::ranking::Aspect;
use pocketbench_core::taskbuilder::TaskKind;

#[derive(Parser)]
#[command(name = "pocketbench", version, about = "Evaluate structure-based drug design outputs")]
struct Cli {
    /// TOML config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate generated molecules for every pocket of a manifest.
    Eval(EvalArgs),
    /// Build linker/fragment/sidechain/scaffold/denovo task manifests.
    BuildTasks(TaskArgs),
    /// Rank methods from a metric matrix CSV.
    Rank(RankArgs),
    /// Combine aggregate reports into a metric matrix CSV.
    Report(ReportArgs),
}

#[derive(clap::Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Label for the aggregate report (default: manifest file stem).
    #[arg(long)]
    method: Option<String>,
    #[arg(long, value_delimiter = ',')]
    aspects: Option<Vec<Aspect>>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Docking command template with {receptor}, {ligand} and {mode}.
    #[arg(long)]
    vina_cmd: Option<String>,
    /// Precomputed energies: pocket_id,ordinal,mode,energy.
    #[arg(long)]
    scores_file: Option<PathBuf>,
    /// Precomputed QED/SA: [pocket_id,]ordinal,qed,sa.
    #[arg(long)]
    props_file: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct TaskArgs {
    /// JSON lines with pocket, ligand and optional split.
    #[arg(long)]
    complexes: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    kinds: Vec<TaskKind>,
    /// Emit every valid decomposition instead of one per ligand.
    #[arg(long)]
    all_candidates: bool,
    #[arg(long, default_value = "tasks")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RankArgs {
    matrix: PathBuf,
    /// Tie handling profile: default or published.
    #[arg(long)]
    profile: Option<String>,
    /// Aspect weights, e.g. interaction=0.4,geometry=0.2.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    n_methods: Option<usize>,
    /// Share averaged positions between in-range and out-of-range LogP.
    #[arg(long)]
    range_tie_averaged: bool,
    #[arg(long, default_value = "ranking")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ReportArgs {
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn settings(cfg: &Config, args: &EvalArgs, manifest: &std::path::Path) -> Result<EvalSettings> {
    let aspects: BTreeSet<Aspect> = args.aspects.clone().unwrap_or_else(|| cfg.aspects()).into_iter().collect();
    if aspects.is_empty() {
        bail!("at least one aspect must be enabled");
    }
    let timeout = cfg.docking.timeout();
    let scores = |p: &PathBuf| -> Result<EnergySource> {
        Ok(EnergySource::Precomputed(
            ScoreTable::from_path(p).with_context(|| format!("loading scores {}", p.display()))?,
        ))
    };
    // flags, then the environment, then the config file
    let energy = if let Some(p) = &args.scores_file {
        Some(scores(p)?)
    } else if let Some(c) = &args.vina_cmd {
        Some(EnergySource::Program(DockCommand::parse(c, timeout)))
    } else if let Some(c) = DockCommand::from_env(timeout) {
        Some(EnergySource::Program(c))
    } else if let Some(c) = &cfg.docking.command {
        Some(EnergySource::Program(DockCommand::parse(c, timeout)))
    } else if let Some(p) = &cfg.docking.scores_file {
        Some(scores(p)?)
    } else {
        None
    };
    let properties = if let Some(p) = args.props_file.clone().or_else(|| cfg.properties.file.clone()) {
        if !p.exists() {
            bail!("property file {} does not exist", p.display());
        }
        PropertyProvider::Sidecar(p)
    } else if let Some(c) = &cfg.properties.command {
        PropertyProvider::Program {
            argv: c.split_whitespace().map(String::from).collect(),
            timeout: std::time::Duration::from_secs(cfg.properties.timeout_secs),
        }
    } else {
        PropertyProvider::Disabled
    };
    let method = args
        .method
        .clone()
        .or_else(|| cfg.method.clone())
        .unwrap_or_else(|| manifest.file_stem().map_or("method".into(), |s| s.to_string_lossy().into_owned()));
    let t = &cfg.thresholds;
    Ok(EvalSettings {
        method,
        aspects,
        jobs: args.jobs.or(cfg.jobs).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        convention: cfg.metrics.jsd,
        mae_mode: cfg.metrics.mae,
        validity: t.validity_options(),
        clash_overlap: t.clash_overlap,
        profiler: t.profiler,
        bins: t.bins,
        energy,
        modes: cfg.docking.modes.clone(),
        dock_jobs: cfg.docking.jobs,
        properties,
    })
}

fn eval(cfg: &Config, args: &EvalArgs) -> Result<ExitCode> {
    let Some(manifest) = args.manifest.clone().or_else(|| cfg.manifest.clone()) else {
        bail!("no manifest given (--manifest or `manifest` in the config)");
    };
    if args.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let entries = read_manifest(&manifest)?;
    let s = settings(cfg, args, &manifest)?;
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("pocketbench_out"));
    let outcome = run_eval(&entries, &s)?;
    write_outcome(&outcome, &out)?;
    eprintln!(
        "{} of {} pockets evaluated; reports in {}",
        outcome.succeeded,
        entries.len(),
        out.display()
    );
    for e in &outcome.aggregate.errors {
        eprintln!("error: {e}");
    }
    Ok(if outcome.succeeded == 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.cmd {
        Cmd::Eval(args) => eval(&cfg, &args),
        Cmd::BuildTasks(args) => {
            for (kind, n, skipped) in build_tasks(&args.complexes, &args.kinds, &cfg.thresholds.tasks, args.all_candidates, &args.out)? {
                eprintln!("{kind}: {n} instances, {skipped} skipped");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Rank(args) => {
            let mut ranking = cfg.ranking.clone();
            if let Some(p) = args.profile {
                ranking.profile = p;
            }
            let mut opts = ranking.options()?;
            if let Some(w) = &args.weights {
                parse_weights(w, &mut opts)?;
            }
            if args.n_methods.is_some() {
                opts.n_methods = args.n_methods;
            }
            opts.range_tie_averaged |= args.range_tie_averaged;
            let table = rank(&args.matrix, &opts, &args.out)?;
            print!("{}", table.leaderboard_csv());
            for w in &table.warnings {
                eprintln!("warning: {w}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Report(args) => {
            let csv = matrix_from_reports(&args.reports)?;
            match args.out {
                Some(p) => std::fs::write(&p, csv).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
