//! Closed-form survival criteria and bounds: a-sequences, the n·P(R ≥ n)
//! limit classifier, verdicts for all four process variants, and the
//! truncation-audited product bounds.

mod firework;
mod raabe;
mod reverse;

pub use firework::{
    classify_firework_heterogeneous, classify_firework_homogeneous, lower_bound_firework,
    upper_bound_firework_homogeneous, upper_bound_reach_heterogeneous, Domination,
};
pub use raabe::{raabe_classify, raabe_classify_fn, RaabeOptions};
pub use reverse::{
    classify_reverse_by_domination, classify_reverse_heterogeneous, classify_reverse_homogeneous,
    lower_bound_reverse, DominationSide, ReverseProbe,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distributions::DistributionSchedule;
use crate::error::{Error, Result};
use crate::numeric::clamp_prob;

/// Survival classification of a process under a radius schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Positive survival probability.
    Survives,
    /// Survival probability zero.
    Dies,
    /// Survival probability one.
    SurvivesAlmostSurely,
    Inconclusive,
}

/// Whether a verdict is exact (analytic certificate) or produced by the
/// numeric probe tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Analytic,
    Heuristic,
}

/// The decision rule that produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    /// Finite mean radius kills the homogeneous firework.
    FiniteMean,
    /// lim n·P(R ≥ n) > 1: positive survival probability.
    RaabeLimitAboveOne,
    /// lim n·P(R ≥ n) < 1: extinction.
    RaabeLimitBelowOne,
    /// Limit equals 1 but P(R ≥ n) ≤ 1/(n-1) eventually: extinction.
    CriticalTailRefinement,
    /// P(R < 1) = 0: every vertex reaches its neighbour, certain spread.
    DegenerateFullReach,
    /// P(R < 1) = 1: radii are all zero, nothing ever spreads.
    DegenerateNoReach,
    /// The origin's radius is 0 almost surely: the firework never starts.
    OriginNeverReaches,
    /// Σ [P(R_n < t·m)]^t < ∞: heterogeneous firework survives.
    SummablePowerSeries,
    /// Gap-bounded tail domination with limit above the layout step:
    /// heterogeneous firework survives.
    DominatedTailGap,
    /// Coupled below a law with limit above 1: survives.
    CoupledBelowSurvives,
    /// Coupled above a law that dies: extinction.
    CoupledAboveDies,
    /// The reach upper bound vanishes along the horizon: extinction.
    VanishingReachBound,
    /// Infinite mean radius: reverse process survives almost surely.
    ReverseInfiniteMean,
    /// Finite mean radius: reverse process dies.
    ReverseFiniteMean,
    /// Σ_k P(R_{n+k} ≥ k) = ∞ for every offset n: reverse survives a.s.
    TailSumDiverges,
    /// ρ = Σ_n Π_k P(R_{n+k} < k) < ∞: reverse survives with positive
    /// probability.
    RhoFinite,
    /// Reverse coupling above a finite-mean law: extinction.
    ReverseCoupledAboveDies,
    /// Reverse coupling below an infinite-mean law: survives a.s.
    ReverseCoupledBelowSurvives,
}

impl RuleTag {
    pub fn name(&self) -> &'static str {
        match self {
            RuleTag::FiniteMean => "finite-mean",
            RuleTag::RaabeLimitAboveOne => "raabe-limit-above-one",
            RuleTag::RaabeLimitBelowOne => "raabe-limit-below-one",
            RuleTag::CriticalTailRefinement => "critical-tail-refinement",
            RuleTag::DegenerateFullReach => "degenerate-full-reach",
            RuleTag::DegenerateNoReach => "degenerate-no-reach",
            RuleTag::OriginNeverReaches => "origin-never-reaches",
            RuleTag::SummablePowerSeries => "summable-power-series",
            RuleTag::DominatedTailGap => "dominated-tail-gap",
            RuleTag::CoupledBelowSurvives => "coupled-below-survives",
            RuleTag::CoupledAboveDies => "coupled-above-dies",
            RuleTag::VanishingReachBound => "vanishing-reach-bound",
            RuleTag::ReverseInfiniteMean => "reverse-infinite-mean",
            RuleTag::ReverseFiniteMean => "reverse-finite-mean",
            RuleTag::TailSumDiverges => "tail-sum-diverges",
            RuleTag::RhoFinite => "rho-finite",
            RuleTag::ReverseCoupledAboveDies => "reverse-coupled-above-dies",
            RuleTag::ReverseCoupledBelowSurvives => "reverse-coupled-below-survives",
        }
    }
}

/// Criterion outcome with the rule that fired and its numeric evidence.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub classification: Classification,
    /// Present whenever the classification is not `Inconclusive`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleTag>,
    pub tier: Tier,
    /// Limit estimates, partial sums and similar numerics.
    pub evidence: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_depth: Option<u64>,
}

impl Verdict {
    pub fn new(classification: Classification, rule: RuleTag, tier: Tier) -> Self {
        Verdict {
            classification,
            rule: Some(rule),
            tier,
            evidence: BTreeMap::new(),
            notes: Vec::new(),
            truncation_depth: None,
        }
    }

    pub fn inconclusive(tier: Tier) -> Self {
        Verdict {
            classification: Classification::Inconclusive,
            rule: None,
            tier,
            evidence: BTreeMap::new(),
            notes: Vec::new(),
            truncation_depth: None,
        }
    }

    pub fn with_evidence(mut self, key: &str, value: f64) -> Self {
        self.evidence.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_depth(mut self, depth: u64) -> Self {
        self.truncation_depth = Some(depth);
        self
    }

    pub fn rule_name(&self) -> &'static str {
        self.rule.map(|r| r.name()).unwrap_or("")
    }
}

/// Whether a bound value carries a certified tail or only truncates the
/// defining infinite product/sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rigor {
    Rigorous,
    TruncatedEstimate,
}

/// One bound value with its truncation bookkeeping.
#[derive(Clone, Debug, Serialize)]
pub struct BoundEntry {
    /// The bound: tail-adjusted when rigorous, the plain truncation
    /// otherwise.
    pub value: f64,
    pub rigor: Rigor,
    /// The raw truncated product/sum before any tail adjustment. For lower
    /// bounds this is nonincreasing in the truncation depth, while the
    /// rigorous `value` tightens (grows) with depth.
    pub truncated_value: f64,
    pub truncation_depth: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_depth: Option<u64>,
    /// Certified bound on the discarded tail sum, when rigorous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_certificate: Option<f64>,
}

/// Lower/upper bound pair for one process configuration.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<BoundEntry>,
}

/// ln a_n for n = 0..=n_max, where
/// a_n = Π_{i=0}^{n} P(R_{n-i} < (i+1)·m).
///
/// Homogeneous schedules use the running recurrence
/// a_n = a_{n-1}·P(R < (n+1)m); heterogeneous ones rebuild each product
/// (the factors shift with n). Accumulation is in log space throughout.
pub fn a_sequence_log(schedule: &DistributionSchedule, m: u64, n_max: u64) -> Vec<f64> {
    assert!(m >= 1, "gap bound m must be ≥ 1");
    let count = n_max as usize + 1;
    let mut out = Vec::with_capacity(count);
    if let Some(dist) = schedule.homogeneous_law() {
        let mut acc = 0.0f64;
        for n in 0..count as u64 {
            acc += dist.strict_cdf(((n + 1) * m) as f64).ln();
            out.push(acc);
        }
    } else {
        let laws: Vec<_> = (0..count as u64).map(|j| schedule.law(j)).collect();
        for n in 0..count {
            let mut acc = 0.0f64;
            for (j, law) in laws.iter().enumerate().take(n + 1) {
                // i = n - j, factor P(R_j < (n-j+1)m)
                let threshold = ((n - j + 1) as u64 * m) as f64;
                acc += law.strict_cdf(threshold).ln();
            }
            out.push(acc);
        }
    }
    out
}

/// a_0..a_{n_max} in linear space.
pub fn a_sequence(schedule: &DistributionSchedule, m: u64, n_max: u64) -> Vec<f64> {
    a_sequence_log(schedule, m, n_max)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// P(V_n) = Π_{j=0}^{n-1} (1 - a_j): exact for layouts u_i = m·i.
pub fn exact_reach_prob(schedule: &DistributionSchedule, m: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ln_a = a_sequence_log(schedule, m, n - 1);
    let mut acc = 0.0f64;
    for la in ln_a {
        let a = la.exp();
        if a >= 1.0 {
            return 0.0;
        }
        acc += (-a).ln_1p();
    }
    clamp_prob(acc.exp())
}

/// As [`exact_reach_prob`], but taking the layout and rejecting
/// non-arithmetic ones (the product is only a lower bound there).
pub fn exact_reach_prob_for_layout(
    schedule: &DistributionSchedule,
    layout: &crate::processes::VertexLayout,
    n: u64,
) -> Result<f64> {
    match layout.arithmetic_step() {
        Some(m) => Ok(exact_reach_prob(schedule, m, n)),
        None => Err(Error::Unsupported(
            "exact reach probability requires an arithmetic layout u_i = m·i".into(),
        )),
    }
}
