use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use improper_lms::experiment::{emit_csv, load_config, preset, run_experiment, ExperimentConfig, ModelKind, ModelOutcome, PRESETS};
use improper_lms::statistics::{stats_for, wiener_solution};
use improper_lms::theory::step_bounds;
use improper_lms::LmsError;

/// Complex LMS on improper Gaussian signals: Monte Carlo vs MSE models.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write `<prefix>_curves.csv` and `<prefix>_report.csv`.
    Run {
        /// Config file, or the name of a shipped preset.
        config: String,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output prefix (defaults to the config's `outputs`).
        #[arg(long)]
        out: Option<String>,
        /// Comma-separated model list, e.g. `proposed,independence`.
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        /// Worker threads for the Monte Carlo ensemble (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print step-size bounds and time constants.
    Bounds { config: String },
    /// List the shipped presets.
    Presets,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_UNSTABLE: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(err: &LmsError) -> u8 {
    match err {
        LmsError::Io { .. } => EXIT_IO,
        LmsError::Unstable { .. } | LmsError::AllDiverged { .. } | LmsError::NoConvergence { .. } | LmsError::Rank { .. } => {
            EXIT_UNSTABLE
        }
        _ => EXIT_CONFIG,
    }
}

fn resolve(config: &str) -> Result<ExperimentConfig, LmsError> {
    let path = Path::new(config);
    if !path.exists() {
        if let Some(cfg) = preset(config) {
            return cfg;
        }
    }
    load_config(path)
}

fn run(
    config: &str,
    runs: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
    models: Option<Vec<String>>,
    threads: Option<usize>,
) -> Result<u8, LmsError> {
    let mut cfg = resolve(config)?;
    if let Some(r) = runs {
        if r == 0 {
            return Err(LmsError::Config { path: "--runs".into(), message: "must be at least 1".into() });
        }
        cfg.runs = r;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(list) = models {
        cfg.models = list
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                ModelKind::parse(s)
                    .ok_or_else(|| LmsError::Config { path: "--models".into(), message: format!("unknown model `{s}`") })
            })
            .collect::<Result<_, _>>()?;
    }
    let prefix = out.unwrap_or_else(|| cfg.outputs.clone());

    let results = match threads {
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| LmsError::InvalidParameter(e.to_string()))?
            .install(|| run_experiment(&cfg))?,
        _ => run_experiment(&cfg)?,
    };
    let (curves, report) = emit_csv(&results, &prefix)?;

    let rep = &results.report;
    println!("k^H k          {:.6}", rep.k_norm2);
    println!("J_min          {:.6}", rep.j_min);
    println!("monte carlo    {:.6} (stderr {:.2e}, {} runs, {} diverged)", rep.mc_tail, rep.mc_tail_stderr, results.ensemble.curve.runs, results.ensemble.curve.diverged_runs);
    println!("sample @{:<6} {:.6}", cfg.tail_from, rep.mc_sample);
    let mut status = 0;
    for row in &rep.rows {
        match &row.outcome {
            ModelOutcome::Value(v) => println!("{:<22} {:.6}  ({:+.3}%)", row.model.name(), v, row.rel_err_pct.unwrap_or(f64::NAN)),
            ModelOutcome::NotApplicable(why) => {
                println!("{:<22} not applicable: {why}", row.model.name());
                status = status.max(EXIT_CONFIG);
            }
            ModelOutcome::Unstable { bound } => {
                println!("{:<22} unstable (mu = {} exceeds {bound:.6})", row.model.name(), cfg.mu);
                status = EXIT_UNSTABLE;
            }
        }
    }
    println!("wrote {} and {}", curves.display(), report.display());
    Ok(status)
}

fn bounds(config: &str) -> Result<u8, LmsError> {
    let cfg = resolve(config)?;
    let stats = stats_for(&cfg.scenario)?;
    let wiener = wiener_solution(&stats)?;
    let b = step_bounds(&stats)?;
    println!("lambda_max     {:.6}", b.lambda_max);
    println!("trace R        {:.6}", b.trace_r);
    println!("mean bound     {:.6}   (2 / lambda_max)", b.mean_bound);
    println!("mse bound      {:.6}   (2 / tr R)", b.mse_bound);
    match b.case_bound {
        Some(v) => println!("case bound     {v:.6}"),
        None => println!("case bound     n/a"),
    }
    println!("J_min          {:.6}", wiener.j_min);
    println!("k^H k          {:.6}", wiener.k_norm2());
    let taus: Vec<String> = b.time_constants_at(cfg.mu).iter().map(|t| format!("{t:.3}")).collect();
    println!("tau at mu={}   [{}]", cfg.mu, taus.join(", "));
    Ok(if cfg.mu >= b.mse_bound { EXIT_UNSTABLE } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, runs, seed, out, models, threads } => run(&config, runs, seed, out, models, threads),
        Command::Bounds { config } => bounds(&config),
        Command::Presets => {
            for (name, _) in PRESETS {
                let cfg = preset(name).expect("shipped preset").expect("shipped presets parse");
                println!("{name:<6} {}", cfg.description.unwrap_or_default());
            }
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
