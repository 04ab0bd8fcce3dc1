use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seqfed::bounds::{crossover_threshold, render_csv, render_markdown, sfl_upper_bound, table2};
use seqfed::data::read_libsvm_file;
use seqfed::harness::{
    figure2, grid_search, render_summary, run_experiment, write_csv, ExperimentConfig,
    ExperimentResult, Figure2Options,
};
use seqfed::lemma_oracles::run_suite;
use seqfed::{BoundParams, ConvexityCase};

#[derive(Parser)]
#[command(
    name = "seqfed",
    version,
    about = "Sequential vs parallel federated learning: simulator and bound checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (method, lr, seed) cell of an experiment manifest.
    Run(ExperimentArgs),
    /// Grid-search the learning rate of each method.
    Grid(ExperimentArgs),
    /// Print the upper-bound comparison table for the given parameters.
    Bounds(BoundsArgs),
    /// Run the exact combinatorial oracle suite.
    Lemmas,
    /// Validate a LIBSVM file.
    Parse { path: PathBuf },
    /// Quadratic-group comparison: per-group CSVs, summary and SVG plot.
    Figure2(Figure2Args),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Manifest in `key = value` form.
    config: PathBuf,
    /// Override a manifest entry, e.g. `--set rounds=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Metrics CSV destination (default: the manifest's `output`, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the Markdown summary here instead of stderr.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    zeta_star: f64,
    #[arg(long, default_value_t = 0.0)]
    zeta: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    zeta_hat: f64,
    /// Initial distance to the optimum.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Initial optimality gap.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Also evaluate the SFL theorem (explicit constants) at this effective lr.
    #[arg(long)]
    eff_lr: Option<f64>,
    /// Also report the PFL/SFL crossover heterogeneity for (M, K, R).
    #[arg(long)]
    crossover: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Markdown)]
    format: TableFormat,
}

#[derive(Args)]
struct Figure2Args {
    /// Output directory.
    #[arg(long, default_value = "figure2-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 10)]
    local_steps: usize,
    /// Number of seeds (0..N).
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Starting point x⁽⁰⁾.
    #[arg(long, default_value_t = 0.0)]
    init: f64,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(result: &ExperimentResult, cfg: &ExperimentConfig, args: &ExperimentArgs) -> Result<()> {
    let csv_path = args.out.as_deref().or(cfg.output.as_deref());
    write_csv(&result.rows, open_out(csv_path)?)?;
    let summary = render_summary(
        &result.task,
        result.fstar.value,
        result.fstar.exact,
        &result.cells,
    );
    match &args.summary {
        Some(p) => {
            std::fs::write(p, summary).with_context(|| format!("writing {}", p.display()))?
        }
        None => eprint!("{summary}"),
    }
    Ok(())
}

fn load(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig::from_file(&args.config, &args.overrides)?)
}

fn cmd_run(args: &ExperimentArgs) -> Result<()> {
    let cfg = load(args)?;
    let result = run_experiment(&cfg)?;
    emit(&result, &cfg, args)
}

fn cmd_grid(args: &ExperimentArgs) -> Result<()> {
    let cfg = load(args)?;
    let out = grid_search(&cfg)?;
    for (method, lr) in &out.best {
        eprintln!("best lr for {method}: {lr}");
    }
    emit(&out.result, &cfg, args)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<()> {
    let p = BoundParams {
        mu: a.mu,
        l: a.l,
        sigma: a.sigma,
        zeta_star: a.zeta_star,
        zeta: a.zeta,
        beta: a.beta,
        zeta_hat: a.zeta_hat,
        d: a.d,
        a: a.a,
        m: a.m,
        k: a.k,
        r: a.r,
        s: a.m,
        eff_lr: a.eff_lr,
        gamma: 1.0,
    };
    p.validate()?;
    let rows = table2(&p);
    match a.format {
        TableFormat::Markdown => print!("{}", render_markdown(&rows)),
        TableFormat::Csv => print!("{}", render_csv(&rows)),
    }
    if a.eff_lr.is_some() {
        println!();
        for case in [
            ConvexityCase::StronglyConvex,
            ConvexityCase::Convex,
            ConvexityCase::NonConvex,
        ] {
            match sfl_upper_bound(case, &p) {
                Ok(b) => {
                    let terms: Vec<String> = b
                        .terms
                        .iter()
                        .map(|(k, v)| format!("{k} = {v:.4e}"))
                        .collect();
                    println!(
                        "SFL theorem, {case}: {:.6e} ({})",
                        b.total,
                        terms.join(", ")
                    );
                }
                Err(e) => println!("SFL theorem, {case}: {e}"),
            }
        }
    }
    if a.crossover {
        match crossover_threshold(a.m, a.k, a.r) {
            Ok(t) => println!("crossover heterogeneity (σ = 0, μ = L = D = 1): {t:.6e}"),
            Err(e) => println!("crossover: {e}"),
        }
    }
    Ok(())
}

fn cmd_lemmas() -> Result<bool> {
    let checks = run_suite();
    for c in &checks {
        println!("{c}");
    }
    Ok(checks.iter().all(|c| c.passed()))
}

fn cmd_parse(path: &Path) -> Result<bool> {
    match read_libsvm_file(path) {
        Ok(ds) => {
            let mut counts = [0usize; 2];
            for s in &ds.samples {
                counts[usize::from(s.label)] += 1;
            }
            println!(
                "{}: {} samples, dimension {}, {} positive / {} non-positive",
                path.display(),
                ds.len(),
                ds.dim,
                counts[1],
                counts[0]
            );
            Ok(true)
        }
        Err(e) => {
            println!("{}: {e}", path.display());
            Ok(false)
        }
    }
}

fn cmd_figure2(a: &Figure2Args) -> Result<()> {
    if a.seeds == 0 {
        bail!("need at least one seed");
    }
    let opts = Figure2Options {
        rounds: a.rounds,
        local_steps: a.local_steps,
        seeds: (0..a.seeds).collect(),
        init: a.init,
        ..Default::default()
    };
    let out = figure2(&opts)?;
    out.write_to(&a.out)?;
    print!("{}", out.summary_markdown());
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Grid(a) => cmd_grid(a).map(|_| true),
        Command::Bounds(a) => cmd_bounds(a).map(|_| true),
        Command::Lemmas => cmd_lemmas(),
        Command::Parse { path } => cmd_parse(path),
        Command::Figure2(a) => cmd_figure2(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
