//! Reproducible Monte Carlo experiments: trial orchestration, seeding
//! discipline, Wilson-interval survival estimates, parameter sweeps, and
//! CSV/JSON result tables.
//!
//! Determinism contract: trial i of a run with master seed s uses the
//! uniform stream seeded with s XOR i (see [`crate::stream`]); sweep grid
//! point g first derives its own master via [`crate::stream::lane_seed`].
//! Survivor counts are integer sums, so results are byte-identical across
//! worker counts and execution orders.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{
    self, BoundsReport, RaabeOptions, ReverseProbe, Verdict,
};
use crate::config::{DistributionSpec, SweepParam};
use crate::distributions::DistributionSchedule;
use crate::error::{Error, Result};
use crate::processes::{self, VertexLayout};
use crate::stream::{lane_seed, UniformStream};

/// z for the 95% Wilson score interval.
const WILSON_Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Firework,
    Reverse,
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Firework => "firework",
            ProcessKind::Reverse => "reverse",
        }
    }
}

/// One Monte Carlo run: process, schedule, layout, horizon, trial count,
/// master seed.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub process: ProcessKind,
    pub schedule: DistributionSchedule,
    pub layout: VertexLayout,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    /// Reverse process only; defaults to the horizon.
    pub generation_cap: Option<u64>,
    pub label: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig {
                field: "trials".into(),
                message: "must be ≥ 1".into(),
            });
        }
        if self.horizon < 1 {
            return Err(Error::InvalidConfig {
                field: "horizon".into(),
                message: "must be ≥ 1".into(),
            });
        }
        if let Some(cap) = self.generation_cap {
            if cap < 1 {
                return Err(Error::InvalidConfig {
                    field: "generation_cap".into(),
                    message: "must be ≥ 1".into(),
                });
            }
        }
        if self.process == ProcessKind::Firework {
            self.layout
                .validate_to(self.horizon)
                .map_err(|e| Error::InvalidConfig {
                    field: "layout".into(),
                    message: e.to_string(),
                })?;
        }
        Ok(())
    }
}

/// Survival-to-horizon estimate with its 95% Wilson interval.
#[derive(Clone, Debug, Serialize)]
pub struct SurvivalEstimate {
    pub trials: u64,
    pub survivors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub horizon: u64,
    #[serde(skip)]
    pub duration: Duration,
}

/// 95% Wilson score interval for `survivors` successes in `trials`.
pub fn wilson_interval(survivors: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = survivors as f64 / n;
    let z = WILSON_Z95;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let radius = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - radius).max(0.0), (center + radius).min(1.0))
}

/// Runs `config.trials` independent trials and aggregates survivors.
/// The result is a deterministic function of the config, independent of
/// worker count and execution order.
pub fn run_trials(config: &ExperimentConfig) -> Result<SurvivalEstimate> {
    config.validate()?;
    let start = Instant::now();
    let survivors = match config.process {
        ProcessKind::Firework => (0..config.trials)
            .into_par_iter()
            .map(|i| {
                let mut stream = UniformStream::for_trial(config.seed, i);
                let survived =
                    processes::simulate_firework(&config.layout, &config.schedule, config.horizon, &mut stream)
                        .expect("config validated")
                        .survived_to_horizon;
                survived as u64
            })
            .sum(),
        ProcessKind::Reverse => match config.generation_cap {
            // With the default cap (≥ horizon) the fast closure decides
            // survival; an explicit lower cap needs the generation loop.
            Some(cap) if cap < config.horizon => (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let mut stream = UniformStream::for_trial(config.seed, i);
                    let survived =
                        processes::simulate_reverse(&config.schedule, config.horizon, Some(cap), &mut stream)
                            .expect("config validated")
                            .survived_to_horizon;
                    survived as u64
                })
                .sum(),
            _ => (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let mut stream = UniformStream::for_trial(config.seed, i);
                    processes::reverse_survives(&config.schedule, config.horizon, &mut stream)
                        .expect("config validated") as u64
                })
                .sum(),
        },
    };
    let (ci_lo, ci_hi) = wilson_interval(survivors, config.trials);
    Ok(SurvivalEstimate {
        trials: config.trials,
        survivors,
        p_hat: survivors as f64 / config.trials as f64,
        ci_lo,
        ci_hi,
        horizon: config.horizon,
        duration: start.elapsed(),
    })
}

/// One row of a sweep (or single-run) result table: the estimate plus the
/// criterion verdict and bound values for the same parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub process: String,
    pub schedule_label: String,
    pub param_name: String,
    pub param_value: String,
    pub horizon: u64,
    pub trials: u64,
    pub survivors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub verdict: String,
    pub rule: String,
    pub lower_bound: String,
    pub upper_bound: String,
    pub seed: u64,
}

pub const SWEEP_CSV_HEADER: &str = "process,schedule_label,param_name,param_value,horizon,trials,survivors,p_hat,ci_lo,ci_hi,verdict,rule,lower_bound,upper_bound,seed";

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.process,
            r.schedule_label,
            r.param_name,
            r.param_value,
            r.horizon,
            r.trials,
            r.survivors,
            r.p_hat,
            r.ci_lo,
            r.ci_hi,
            r.verdict,
            r.rule,
            r.lower_bound,
            r.upper_bound,
            r.seed
        ));
    }
    out
}

/// Classifier verdict for a configuration: the homogeneous criterion for
/// constant schedules on unit layouts, the heterogeneous ones otherwise.
pub fn verdict_for(config: &ExperimentConfig) -> Result<Verdict> {
    let m = config.layout.effective_gap_bound(config.horizon);
    match config.process {
        ProcessKind::Firework => match config.schedule.homogeneous_law() {
            Some(dist) if m == 1 => Ok(analytics::classify_firework_homogeneous(dist)),
            _ => analytics::classify_firework_heterogeneous(&config.schedule, m, 1, None),
        },
        ProcessKind::Reverse => match config.schedule.homogeneous_law() {
            Some(dist) => Ok(analytics::classify_reverse_homogeneous(dist)),
            _ => Ok(analytics::classify_reverse_heterogeneous(
                &config.schedule,
                &ReverseProbe::default(),
            )),
        },
    }
}

/// Bound pair for a configuration, at depths tied to the horizon (capped
/// so sweep rows stay cheap).
pub fn bounds_for(config: &ExperimentConfig) -> Result<BoundsReport> {
    let m = config.layout.effective_gap_bound(config.horizon);
    let depth = config.horizon.clamp(1, 1000);
    match config.process {
        ProcessKind::Firework => {
            let lower = analytics::lower_bound_firework(&config.schedule, m, depth);
            let upper = match config.schedule.homogeneous_law() {
                Some(dist) => Some(analytics::upper_bound_firework_homogeneous(dist, depth)?),
                None => {
                    // The heterogeneous reach bound applies to unit-gap
                    // layouts; report it at the horizon itself.
                    let value =
                        analytics::upper_bound_reach_heterogeneous(&config.schedule, config.horizon);
                    Some(analytics::BoundEntry {
                        value,
                        rigor: analytics::Rigor::Rigorous,
                        truncated_value: value,
                        truncation_depth: config.horizon,
                        inner_depth: None,
                        tail_certificate: None,
                    })
                }
            };
            Ok(BoundsReport {
                lower: Some(lower),
                upper,
            })
        }
        ProcessKind::Reverse => {
            let lower = analytics::lower_bound_reverse(&config.schedule, depth, depth.min(200))?;
            Ok(BoundsReport {
                lower: Some(lower),
                upper: None,
            })
        }
    }
}

/// Sweep descriptor: a parameter name and its grid.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
}

/// Base configuration for a sweep: the distribution spec is re-derived at
/// every grid point.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub process: ProcessKind,
    pub distribution: DistributionSpec,
    pub layout: VertexLayout,
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub generation_cap: Option<u64>,
    pub sweep: SweepSpec,
}

/// Runs one estimate per grid point, each on its own seed lane, and
/// attaches the analytics verdict and bounds to every row.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.sweep.grid.is_empty() {
        return Err(Error::InvalidConfig {
            field: "sweep.grid".into(),
            message: "grid must be nonempty".into(),
        });
    }
    let mut rows = Vec::with_capacity(config.sweep.grid.len());
    for (g, &value) in config.sweep.grid.iter().enumerate() {
        let (dist_spec, horizon) = config.sweep.param.apply(&config.distribution, config.horizon, value)?;
        let schedule = dist_spec.build()?;
        let run = ExperimentConfig {
            process: config.process,
            schedule,
            layout: config.layout.clone(),
            horizon,
            trials: config.trials,
            seed: lane_seed(config.seed, g as u64),
            generation_cap: config.generation_cap,
            label: dist_spec.label(),
        };
        let estimate = run_trials(&run)?;
        let verdict = verdict_for(&run)?;
        let bounds = bounds_for(&run)?;
        rows.push(row_from(
            &run,
            &estimate,
            &verdict,
            &bounds,
            config.sweep.param.name(),
            format_param(value),
        ));
    }
    Ok(rows)
}

/// A single-run result as a one-row table.
pub fn run_single(config: &ExperimentConfig) -> Result<(SurvivalEstimate, Vec<SweepRow>)> {
    let estimate = run_trials(config)?;
    let verdict = verdict_for(config)?;
    let bounds = bounds_for(config)?;
    let row = row_from(config, &estimate, &verdict, &bounds, "", String::new());
    Ok((estimate, vec![row]))
}

fn row_from(
    config: &ExperimentConfig,
    estimate: &SurvivalEstimate,
    verdict: &Verdict,
    bounds: &BoundsReport,
    param_name: &str,
    param_value: String,
) -> SweepRow {
    SweepRow {
        process: config.process.name().to_string(),
        schedule_label: config.label.clone(),
        param_name: param_name.to_string(),
        param_value,
        horizon: config.horizon,
        trials: estimate.trials,
        survivors: estimate.survivors,
        p_hat: estimate.p_hat,
        ci_lo: estimate.ci_lo,
        ci_hi: estimate.ci_hi,
        verdict: format!("{:?}", verdict.classification),
        rule: verdict.rule_name().to_string(),
        lower_bound: bounds
            .lower
            .as_ref()
            .map(|b| b.value.to_string())
            .unwrap_or_default(),
        upper_bound: bounds
            .upper
            .as_ref()
            .map(|b| b.value.to_string())
            .unwrap_or_default(),
        seed: config.seed,
    }
}

fn format_param(v: f64) -> String {
    v.to_string()
}

/// The RaabeOptions used by default across the CLI surface.
pub fn default_raabe_options() -> RaabeOptions {
    RaabeOptions::default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::RadiusDistribution;

    fn half_half_config(process: ProcessKind, horizon: u64, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            process,
            schedule: DistributionSchedule::homogeneous(
                RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).unwrap(),
            ),
            layout: VertexLayout::identity(),
            horizon,
            trials,
            seed: 0xFEED,
            generation_cap: None,
            label: "half-half".into(),
        }
    }

    #[test]
    fn wilson_interval_shape() {
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo < 1e-12);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(hi > 1.0 - 1e-12);
        assert!(lo > 0.95);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        // Known value: 7/10 → [0.3968, 0.8922] (Wilson, z=1.96).
        let (lo, hi) = wilson_interval(7, 10);
        assert!((lo - 0.3967).abs() < 1e-3, "lo={lo}");
        assert!((hi - 0.8922).abs() < 1e-3, "hi={hi}");
    }

    #[test]
    fn point_mass_one_survives_every_trial() {
        let mut cfg = half_half_config(ProcessKind::Firework, 100, 1000);
        cfg.schedule = DistributionSchedule::homogeneous(RadiusDistribution::point_mass(1));
        let est = run_trials(&cfg).unwrap();
        assert_eq!(est.survivors, 1000);
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.ci_hi, 1.0);
    }

    #[test]
    fn firework_estimate_matches_oracle() {
        let cfg = half_half_config(ProcessKind::Firework, 3, 100_000);
        let est = run_trials(&cfg).unwrap();
        let sigma = (0.125_f64 * 0.875 / 1e5).sqrt();
        assert!((est.p_hat - 0.125).abs() < 4.0 * sigma, "{}", est.p_hat);
    }

    #[test]
    fn reverse_estimate_matches_oracle() {
        let cfg = half_half_config(ProcessKind::Reverse, 2, 100_000);
        let est = run_trials(&cfg).unwrap();
        let sigma = (0.25_f64 * 0.75 / 1e5).sqrt();
        assert!((est.p_hat - 0.25).abs() < 4.0 * sigma, "{}", est.p_hat);
    }

    #[test]
    fn results_independent_of_worker_count() {
        let cfg = half_half_config(ProcessKind::Firework, 5, 20_000);
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| run_trials(&cfg)).unwrap();
        let b = pool4.install(|| run_trials(&cfg)).unwrap();
        assert_eq!(a.survivors, b.survivors);
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
    }

    #[test]
    fn survival_indicators_nested_across_horizons() {
        // Exact set inclusion of surviving trial indices, firework.
        let trials = 3000u64;
        for dist in [
            RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).unwrap(),
            RadiusDistribution::power_law(1.5).unwrap(),
        ] {
            let schedule = DistributionSchedule::homogeneous(dist);
            let survivors_at = |horizon: u64| -> Vec<bool> {
                (0..trials)
                    .map(|i| {
                        let mut stream = UniformStream::for_trial(31, i);
                        processes::simulate_firework(
                            &VertexLayout::identity(),
                            &schedule,
                            horizon,
                            &mut stream,
                        )
                        .unwrap()
                        .survived_to_horizon
                    })
                    .collect()
            };
            let h10 = survivors_at(10);
            let h100 = survivors_at(100);
            for i in 0..trials as usize {
                assert!(!h100[i] || h10[i], "trial {i} survives 100 but not 10");
            }
        }
    }

    #[test]
    fn sweep_produces_row_per_grid_point() {
        let cfg = SweepConfig {
            process: ProcessKind::Firework,
            distribution: DistributionSpec::PowerLaw { alpha: 2.0 },
            layout: VertexLayout::identity(),
            horizon: 20,
            trials: 500,
            seed: 7,
            generation_cap: None,
            sweep: SweepSpec {
                param: SweepParam::Alpha,
                grid: vec![1.5, 2.0, 2.5],
            },
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].verdict, "Survives");
        assert_eq!(rows[1].verdict, "Dies");
        assert_eq!(rows[2].verdict, "Dies");
        // Each grid point runs on its own seed lane.
        assert_ne!(rows[0].seed, rows[1].seed);
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with(SWEEP_CSV_HEADER));
    }

    #[test]
    fn empty_grid_rejected() {
        let cfg = SweepConfig {
            process: ProcessKind::Firework,
            distribution: DistributionSpec::PowerLaw { alpha: 2.0 },
            layout: VertexLayout::identity(),
            horizon: 20,
            trials: 10,
            seed: 7,
            generation_cap: None,
            sweep: SweepSpec {
                param: SweepParam::Alpha,
                grid: vec![],
            },
        };
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = half_half_config(ProcessKind::Firework, 5, 0);
        assert!(run_trials(&cfg).is_err());
        cfg.trials = 10;
        cfg.horizon = 0;
        assert!(run_trials(&cfg).is_err());
    }

    #[test]
    fn horizon_grid_estimates_nonincreasing() {
        let mut prev = f64::INFINITY;
        for horizon in [10u64, 100, 1000] {
            let mut cfg = half_half_config(ProcessKind::Firework, horizon, 5000);
            cfg.schedule =
                DistributionSchedule::homogeneous(RadiusDistribution::power_law(1.5).unwrap());
            let est = run_trials(&cfg).unwrap();
            assert!(
                est.p_hat <= prev,
                "horizon {horizon}: {} > {prev}",
                est.p_hat
            );
            prev = est.p_hat;
        }
    }
}
