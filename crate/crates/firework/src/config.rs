//! JSON config schema: distribution sub-documents, layouts, and the
//! experiment document consumed by the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{BSequence, DistributionSchedule, ExampleKind, RadiusDistribution};
use crate::error::{Error, Result};
use crate::experiment::ProcessKind;
use crate::processes::VertexLayout;

/// Distribution sub-document:
/// `{"kind":"power_law","alpha":2.0}` | `{"kind":"geometric","q":0.5}` |
/// `{"kind":"finite","pmf":{"0":0.5,"1":0.5}}` | `{"kind":"critical_tail"}` |
/// `{"kind":"schedule","example":"ex41","b":{"family":"log_harmonic","c":1.0}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    PowerLaw {
        alpha: f64,
    },
    Geometric {
        q: f64,
    },
    Finite {
        /// Keys are nonnegative integers as strings (JSON object keys).
        pmf: BTreeMap<String, f64>,
    },
    CriticalTail,
    Schedule {
        example: ExampleName,
        b: BSpec,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    Ex41,
    Ex42,
    Ex43,
}

impl From<ExampleName> for ExampleKind {
    fn from(e: ExampleName) -> Self {
        match e {
            ExampleName::Ex41 => ExampleKind::Ex41,
            ExampleName::Ex42 => ExampleKind::Ex42,
            ExampleName::Ex43 => ExampleKind::Ex43,
        }
    }
}

/// b-sequence sub-document: `{"family":"log_harmonic","c":1.0}` |
/// `{"family":"inverse_square","c":1.0}` | `{"family":"table","values":[...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BSpec {
    LogHarmonic {
        #[serde(default = "default_scale")]
        c: f64,
    },
    InverseSquare {
        #[serde(default = "default_scale")]
        c: f64,
    },
    Table {
        values: Vec<f64>,
    },
}

fn default_scale() -> f64 {
    1.0
}

impl BSpec {
    pub fn build(&self) -> Result<BSequence> {
        match self {
            BSpec::LogHarmonic { c } => BSequence::log_harmonic(*c),
            BSpec::InverseSquare { c } => BSequence::inverse_square(*c),
            BSpec::Table { values } => BSequence::table(values.clone()),
        }
    }
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DistributionSchedule> {
        match self {
            DistributionSpec::PowerLaw { alpha } => Ok(DistributionSchedule::homogeneous(
                RadiusDistribution::power_law(*alpha)?,
            )),
            DistributionSpec::Geometric { q } => Ok(DistributionSchedule::homogeneous(
                RadiusDistribution::geometric(*q)?,
            )),
            DistributionSpec::Finite { pmf } => {
                let entries = pmf
                    .iter()
                    .map(|(k, &p)| {
                        let v = k.parse::<u64>().map_err(|_| Error::InvalidConfig {
                            field: "distribution.pmf".into(),
                            message: format!("key `{k}` is not a nonnegative integer"),
                        })?;
                        Ok((v, p))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DistributionSchedule::homogeneous(
                    RadiusDistribution::finite_table(&entries)?,
                ))
            }
            DistributionSpec::CriticalTail => Ok(DistributionSchedule::homogeneous(
                RadiusDistribution::critical_tail(),
            )),
            DistributionSpec::Schedule { example, b } => Ok(DistributionSchedule::example(
                (*example).into(),
                b.build()?,
            )),
        }
    }

    pub fn label(&self) -> String {
        match self {
            DistributionSpec::PowerLaw { alpha } => format!("power_law(alpha={alpha})"),
            DistributionSpec::Geometric { q } => format!("geometric(q={q})"),
            DistributionSpec::Finite { pmf } => {
                let body: Vec<String> = pmf.iter().map(|(k, p)| format!("{k}:{p}")).collect();
                format!("finite{{{}}}", body.join(","))
            }
            DistributionSpec::CriticalTail => "critical_tail".into(),
            DistributionSpec::Schedule { example, b } => {
                let fam = match b {
                    BSpec::LogHarmonic { c } => format!("log_harmonic(c={c})"),
                    BSpec::InverseSquare { c } => format!("inverse_square(c={c})"),
                    BSpec::Table { values } => format!("table[{}]", values.len()),
                };
                let name = match example {
                    ExampleName::Ex41 => "ex41",
                    ExampleName::Ex42 => "ex42",
                    ExampleName::Ex43 => "ex43",
                };
                format!("{name}({fam})")
            }
        }
    }
}

/// Layout sub-document: `{"kind":"identity"}` |
/// `{"kind":"arithmetic","m":2}` |
/// `{"kind":"table","positions":[0,1,3],"gap_bound":2}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayoutSpec {
    #[default]
    Identity,
    Arithmetic {
        m: u64,
    },
    Table {
        positions: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap_bound: Option<u64>,
    },
}

impl LayoutSpec {
    pub fn build(&self) -> Result<VertexLayout> {
        match self {
            LayoutSpec::Identity => Ok(VertexLayout::identity()),
            LayoutSpec::Arithmetic { m } => VertexLayout::arithmetic(*m),
            LayoutSpec::Table {
                positions,
                gap_bound,
            } => VertexLayout::from_positions(positions.clone(), *gap_bound),
        }
    }
}

/// Sweepable parameters. `apply` derives the per-grid-point distribution
/// spec (or horizon), rejecting grids that do not fit the schedule kind.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    Q,
    Horizon,
    BScale,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Q => "q",
            SweepParam::Horizon => "horizon",
            SweepParam::BScale => "b_scale",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "alpha" => Ok(SweepParam::Alpha),
            "q" => Ok(SweepParam::Q),
            "horizon" => Ok(SweepParam::Horizon),
            "b_scale" => Ok(SweepParam::BScale),
            other => Err(Error::InvalidConfig {
                field: "sweep.param".into(),
                message: format!(
                    "unknown parameter `{other}` (expected alpha, q, horizon, or b_scale)"
                ),
            }),
        }
    }

    /// Applies a grid value, returning the distribution spec and horizon
    /// for that grid point.
    pub fn apply(
        &self,
        base: &DistributionSpec,
        horizon: u64,
        value: f64,
    ) -> Result<(DistributionSpec, u64)> {
        match self {
            SweepParam::Alpha => match base {
                DistributionSpec::PowerLaw { .. } => {
                    Ok((DistributionSpec::PowerLaw { alpha: value }, horizon))
                }
                _ => Err(Error::InvalidConfig {
                    field: "sweep.param".into(),
                    message: "alpha sweeps require a power_law distribution".into(),
                }),
            },
            SweepParam::Q => match base {
                DistributionSpec::Geometric { .. } => {
                    Ok((DistributionSpec::Geometric { q: value }, horizon))
                }
                _ => Err(Error::InvalidConfig {
                    field: "sweep.param".into(),
                    message: "q sweeps require a geometric distribution".into(),
                }),
            },
            SweepParam::Horizon => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidConfig {
                        field: "sweep.grid".into(),
                        message: format!("horizon grid values must be positive integers, got {value}"),
                    });
                }
                Ok((base.clone(), value as u64))
            }
            SweepParam::BScale => match base {
                DistributionSpec::Schedule { example, b } => {
                    let b = match b {
                        BSpec::LogHarmonic { .. } => BSpec::LogHarmonic { c: value },
                        BSpec::InverseSquare { .. } => BSpec::InverseSquare { c: value },
                        BSpec::Table { .. } => {
                            return Err(Error::InvalidConfig {
                                field: "sweep.param".into(),
                                message: "b_scale sweeps require a parametric b family".into(),
                            })
                        }
                    };
                    Ok((
                        DistributionSpec::Schedule {
                            example: *example,
                            b,
                        },
                        horizon,
                    ))
                }
                _ => Err(Error::InvalidConfig {
                    field: "sweep.param".into(),
                    message: "b_scale sweeps require a schedule distribution".into(),
                }),
            },
        }
    }
}

/// Sweep sub-document: `{"param":"alpha","grid":[1.2,1.5,2.0]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub param: SweepParam,
    pub grid: Vec<f64>,
}

/// Top-level experiment document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDoc {
    pub process: ProcessName,
    pub distribution: DistributionSpec,
    #[serde(default)]
    pub layout: LayoutSpec,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDoc>,
}

fn default_horizon() -> u64 {
    1000
}

fn default_trials() -> u64 {
    10_000
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProcessName {
    Firework,
    Reverse,
}

impl From<ProcessName> for ProcessKind {
    fn from(p: ProcessName) -> Self {
        match p {
            ProcessName::Firework => ProcessKind::Firework,
            ProcessName::Reverse => ProcessKind::Reverse,
        }
    }
}

impl ExperimentDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig {
            field: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.distribution.label())
    }
}
