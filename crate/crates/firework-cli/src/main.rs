//! `firework`: simulate the firework / reverse-firework rumour processes,
//! evaluate the analytic survival criteria and bounds, sweep parameters,
//! and emit brute-force golden files.

mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use firework::analytics;
use firework::config::{ExperimentDoc, SweepParam};
use firework::error::Error as LibError;
use firework::experiment::{
    self, ExperimentConfig, ProcessKind, SweepConfig, SweepSpec,
};
use firework::oracle::{
    brute_force_firework_reach, brute_force_reverse_reach, golden_rows_to_csv,
    random_small_instance, GoldenRow, TruncatedSchedule,
};
use firework::processes::VertexLayout;

#[derive(Parser)]
#[command(
    name = "firework",
    about = "Rumour-process simulator and survival-criteria engine on the nonnegative integers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file (see README for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the config's trial count.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Override the config's horizon.
    #[arg(long, global = true)]
    horizon: Option<u64>,

    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: available parallelism; env
    /// RUMOUR_SIM_WORKERS as fallback). Never affects results.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Sweep parameter name (alpha | q | horizon | b_scale).
    #[arg(long, global = true)]
    param: Option<String>,

    /// Sweep grid start.
    #[arg(long, global = true)]
    from: Option<f64>,

    /// Sweep grid end (inclusive).
    #[arg(long, global = true)]
    to: Option<f64>,

    /// Sweep grid step.
    #[arg(long, global = true)]
    step: Option<f64>,

    /// Output format for result tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Diagnostic only: dump per-trial traces (generation, activated
    /// indices) as line-delimited records to this path. Off by default.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo survival estimate for the configured process.
    Simulate,
    /// Analytic survival criteria with the rule that fired.
    Criteria,
    /// Lower/upper survival bounds with truncation bookkeeping.
    Bounds,
    /// One estimate per grid point, with verdict and bound columns.
    Sweep,
    /// Brute-force golden file for small instances.
    Oracle,
    /// Run the built-in invariant suite (exit 2 on failure).
    Selftest,
}

enum AppError {
    Config(String),
    Invariant(String),
}

impl From<LibError> for AppError {
    fn from(e: LibError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    init_workers(cli.workers)?;
    match cli.command {
        Command::Simulate => cmd_simulate(&cli),
        Command::Criteria => cmd_criteria(&cli),
        Command::Bounds => cmd_bounds(&cli),
        Command::Sweep => cmd_sweep(&cli),
        Command::Oracle => cmd_oracle(&cli),
        Command::Selftest => selftest::run(&cli.out).map_err(AppError::Invariant),
    }
}

fn init_workers(flag: Option<usize>) -> Result<(), AppError> {
    let workers = match flag {
        Some(w) => Some(w),
        None => match std::env::var("RUMOUR_SIM_WORKERS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                AppError::Config(format!("RUMOUR_SIM_WORKERS must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(AppError::Config("--workers must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| AppError::Config(e.to_string()))?;
    }
    Ok(())
}

/// Loads the config document and applies flag overrides.
fn load_doc(cli: &Cli) -> Result<ExperimentDoc, AppError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| AppError::Config("--config is required for this subcommand".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
    let mut doc = ExperimentDoc::from_json(&text)?;
    if let Some(t) = cli.trials {
        doc.trials = t;
    }
    if let Some(h) = cli.horizon {
        doc.horizon = h;
    }
    if let Some(s) = cli.seed {
        doc.seed = s;
    }
    Ok(doc)
}

fn experiment_config(doc: &ExperimentDoc) -> Result<ExperimentConfig, AppError> {
    let config = ExperimentConfig {
        process: doc.process.into(),
        schedule: doc.distribution.build()?,
        layout: doc.layout.build()?,
        horizon: doc.horizon,
        trials: doc.trials,
        seed: doc.seed,
        generation_cap: doc.generation_cap,
        label: doc.label(),
    };
    config.validate()?;
    Ok(config)
}

/// Grid from --param/--from/--to/--step flags, or the config's sweep block.
fn sweep_spec(cli: &Cli, doc: &ExperimentDoc) -> Result<SweepSpec, AppError> {
    if let Some(name) = &cli.param {
        let param = SweepParam::parse(name)?;
        let (from, to, step) = match (cli.from, cli.to, cli.step) {
            (Some(f), Some(t), Some(s)) => (f, t, s),
            _ => {
                return Err(AppError::Config(
                    "--param requires --from, --to, and --step".into(),
                ))
            }
        };
        if step <= 0.0 || to < from {
            return Err(AppError::Config(
                "sweep needs step > 0 and to ≥ from".into(),
            ));
        }
        let count = ((to - from) / step + 1e-9).floor() as usize + 1;
        let grid = (0..count).map(|i| from + i as f64 * step).collect();
        return Ok(SweepSpec { param, grid });
    }
    if let Some(sweep) = &doc.sweep {
        return Ok(SweepSpec {
            param: sweep.param,
            grid: sweep.grid.clone(),
        });
    }
    Err(AppError::Config(
        "sweep needs either a config `sweep` block or --param/--from/--to/--step".into(),
    ))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_simulate(cli: &Cli) -> Result<(), AppError> {
    let doc = load_doc(cli)?;
    let config = experiment_config(&doc)?;
    if let Some(path) = &cli.trace {
        dump_traces(&config, path)?;
    }
    let start = Instant::now();
    let (estimate, rows) = experiment::run_single(&config)?;
    let content = match cli.format {
        Format::Csv => experiment::rows_to_csv(&rows),
        Format::Json => {
            let body = json!({
                "config": doc,
                "rows": rows,
                "estimate": estimate,
                "duration_ms": start.elapsed().as_millis() as u64,
                "metadata": metadata_for(config.process),
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable"))
        }
    };
    write_output(&cli.out, &content)
}

/// Line-delimited trace records: `trial,generation,activated indices`
/// (indices space-separated), one line per generation per trial.
fn dump_traces(config: &ExperimentConfig, path: &PathBuf) -> Result<(), AppError> {
    use firework::processes::{simulate_firework_traced, simulate_reverse_traced};
    use firework::stream::UniformStream;

    let mut out = String::from("trial,generation,activated_indices\n");
    for i in 0..config.trials {
        let mut stream = UniformStream::for_trial(config.seed, i);
        let trace = match config.process {
            ProcessKind::Firework => {
                simulate_firework_traced(&config.layout, &config.schedule, config.horizon, &mut stream)?
                    .1
            }
            ProcessKind::Reverse => {
                simulate_reverse_traced(
                    &config.schedule,
                    config.horizon,
                    config.generation_cap,
                    &mut stream,
                )?
                .1
            }
        };
        for (g, indices) in trace.generations.iter().enumerate() {
            let joined: Vec<String> = indices.iter().map(u64::to_string).collect();
            out.push_str(&format!("{i},{g},{}\n", joined.join(" ")));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn metadata_for(process: ProcessKind) -> serde_json::Value {
    match process {
        ProcessKind::Reverse => json!({
            "window_convention":
                "vertices beyond the horizon never participate; survival-to-horizon is biased downward (conservative)",
        }),
        ProcessKind::Firework => json!({}),
    }
}

fn cmd_criteria(cli: &Cli) -> Result<(), AppError> {
    let doc = load_doc(cli)?;
    let config = experiment_config(&doc)?;
    let schedule = &config.schedule;
    let m = config.layout.effective_gap_bound(config.horizon);

    let mut results: Vec<serde_json::Value> = Vec::new();
    let mut text = String::new();
    let mut push = |process: &str, variant: &str, v: &analytics::Verdict| {
        text.push_str(&format!(
            "{process} ({variant}): {:?} [{:?}] rule={}\n",
            v.classification,
            v.tier,
            if v.rule_name().is_empty() { "-" } else { v.rule_name() }
        ));
        for note in &v.notes {
            text.push_str(&format!("    note: {note}\n"));
        }
        for (k, val) in &v.evidence {
            text.push_str(&format!("    {k} = {val}\n"));
        }
        results.push(json!({
            "process": process,
            "variant": variant,
            "verdict": v.classification,
            "rule": v.rule,
            "tier": v.tier,
            "evidence": v.evidence,
            "notes": v.notes,
            "truncation": { "depth": v.truncation_depth },
        }));
    };

    if let Some(dist) = schedule.homogeneous_law() {
        if m == 1 {
            push(
                "firework",
                "homogeneous",
                &analytics::classify_firework_homogeneous(dist),
            );
        }
        push(
            "reverse",
            "homogeneous",
            &analytics::classify_reverse_homogeneous(dist),
        );
    }
    push(
        "firework",
        "heterogeneous",
        &analytics::classify_firework_heterogeneous(schedule, m, 1, None)?,
    );
    push(
        "reverse",
        "heterogeneous",
        &analytics::classify_reverse_heterogeneous(schedule, &analytics::ReverseProbe::default()),
    );

    let content = match cli.format {
        Format::Csv => text,
        Format::Json => {
            let body = json!({ "config": doc, "results": results });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable"))
        }
    };
    write_output(&cli.out, &content)
}

fn cmd_bounds(cli: &Cli) -> Result<(), AppError> {
    let doc = load_doc(cli)?;
    let config = experiment_config(&doc)?;
    let verdict = experiment::verdict_for(&config)?;
    let bounds = experiment::bounds_for(&config)?;
    let body = json!({
        "config": doc,
        "verdict": verdict.classification,
        "rule": verdict.rule,
        "evidence": verdict.evidence,
        "bounds": bounds,
        "truncation": {
            "lower_depth": bounds.lower.as_ref().map(|b| b.truncation_depth),
            "lower_inner_depth": bounds.lower.as_ref().and_then(|b| b.inner_depth),
            "lower_rigor": bounds.lower.as_ref().map(|b| b.rigor),
            "upper_depth": bounds.upper.as_ref().map(|b| b.truncation_depth),
            "upper_rigor": bounds.upper.as_ref().map(|b| b.rigor),
        },
    });
    let content = format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable"));
    write_output(&cli.out, &content)
}

fn cmd_sweep(cli: &Cli) -> Result<(), AppError> {
    let doc = load_doc(cli)?;
    let sweep = sweep_spec(cli, &doc)?;
    let config = SweepConfig {
        process: doc.process.into(),
        distribution: doc.distribution.clone(),
        layout: doc.layout.build()?,
        horizon: doc.horizon,
        trials: doc.trials,
        seed: doc.seed,
        generation_cap: doc.generation_cap,
        sweep,
    };
    let start = Instant::now();
    let rows = experiment::run_sweep(&config)?;
    let content = match cli.format {
        Format::Csv => experiment::rows_to_csv(&rows),
        Format::Json => {
            let body = json!({
                "config": doc,
                "rows": rows,
                "duration_ms": start.elapsed().as_millis() as u64,
                "metadata": metadata_for(config.process),
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("serializable"))
        }
    };
    write_output(&cli.out, &content)
}

fn cmd_oracle(cli: &Cli) -> Result<(), AppError> {
    let mut rows: Vec<GoldenRow> = Vec::new();
    let identity = VertexLayout::identity();

    // Named catalog instances.
    let half = firework::distributions::DistributionSchedule::homogeneous(
        firework::distributions::RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)])
            .expect("valid"),
    );
    let ts = TruncatedSchedule::from_schedule(&half, 7);
    for n in 1..=6u64 {
        let iv = brute_force_firework_reach(&ts, &identity, n)?;
        rows.push(GoldenRow {
            instance_id: format!("half_half_n{n}"),
            process: "firework",
            n,
            lo: iv.lo,
            hi: iv.hi,
            truncated_mass: iv.truncated_mass,
        });
        let iv = brute_force_reverse_reach(&ts, n)?;
        rows.push(GoldenRow {
            instance_id: format!("half_half_n{n}"),
            process: "reverse",
            n,
            lo: iv.lo,
            hi: iv.hi,
            truncated_mass: iv.truncated_mass,
        });
    }

    let zero_two = firework::distributions::DistributionSchedule::homogeneous(
        firework::distributions::RadiusDistribution::finite_table(&[(0, 0.5), (2, 0.5)])
            .expect("valid"),
    );
    let ts = TruncatedSchedule::from_schedule(&zero_two, 3);
    let iv = brute_force_firework_reach(&ts, &identity, 2)?;
    rows.push(GoldenRow {
        instance_id: "zero_or_two_n2".into(),
        process: "firework",
        n: 2,
        lo: iv.lo,
        hi: iv.hi,
        truncated_mass: iv.truncated_mass,
    });

    let point_one = firework::distributions::DistributionSchedule::homogeneous(
        firework::distributions::RadiusDistribution::point_mass(1),
    );
    let ts = TruncatedSchedule::from_schedule(&point_one, 4);
    let iv = brute_force_firework_reach(&ts, &identity, 3)?;
    rows.push(GoldenRow {
        instance_id: "point_mass_one_n3".into(),
        process: "firework",
        n: 3,
        lo: iv.lo,
        hi: iv.hi,
        truncated_mass: iv.truncated_mass,
    });

    // Randomized battery (seed fixed unless overridden with --seed).
    let battery_seed = cli.seed.unwrap_or(2026);
    for idx in 0..20u64 {
        let inst = random_small_instance(battery_seed, idx);
        let iv = brute_force_firework_reach(&inst.truncated, &identity, inst.n)?;
        rows.push(GoldenRow {
            instance_id: format!("random_{battery_seed}_{idx}"),
            process: "firework",
            n: inst.n,
            lo: iv.lo,
            hi: iv.hi,
            truncated_mass: iv.truncated_mass,
        });
        let iv = brute_force_reverse_reach(&inst.truncated, inst.n)?;
        rows.push(GoldenRow {
            instance_id: format!("random_{battery_seed}_{idx}"),
            process: "reverse",
            n: inst.n,
            lo: iv.lo,
            hi: iv.hi,
            truncated_mass: iv.truncated_mass,
        });
    }

    // Config-derived instance, when a config is supplied.
    if cli.config.is_some() {
        let doc = load_doc(cli)?;
        let schedule = doc.distribution.build()?;
        let n = doc.horizon.clamp(1, 8);
        let ts = TruncatedSchedule::from_schedule_with_eps(&schedule, n + 1, 1e-3);
        let layout = doc.layout.build()?;
        match doc.process.into() {
            ProcessKind::Firework => {
                let iv = brute_force_firework_reach(&ts, &layout, n)?;
                rows.push(GoldenRow {
                    instance_id: format!("config_{}", doc.label()),
                    process: "firework",
                    n,
                    lo: iv.lo,
                    hi: iv.hi,
                    truncated_mass: iv.truncated_mass,
                });
            }
            ProcessKind::Reverse => {
                let iv = brute_force_reverse_reach(&ts, n)?;
                rows.push(GoldenRow {
                    instance_id: format!("config_{}", doc.label()),
                    process: "reverse",
                    n,
                    lo: iv.lo,
                    hi: iv.hi,
                    truncated_mass: iv.truncated_mass,
                });
            }
        }
    }

    write_output(&cli.out, &golden_rows_to_csv(&rows))
}
