//! Classifier for the limit L = lim n·P(R ≥ n).
//!
//! L > 1 means the homogeneous firework survives with positive
//! probability, L < 1 means extinction, and at L = 1 extinction follows
//! when P(R ≥ n) ≤ 1/(n-1) for all large n. Catalog laws carry their
//! limit analytically and classify exactly; arbitrary tail functions go
//! through geometric probes with convergence detection, and near-threshold
//! readings stay `Inconclusive` rather than being forced into a verdict.

use super::{Classification, RuleTag, Tier, Verdict};
use crate::distributions::{RadiusDistribution, RaabeLimit};

/// Probe schedule and thresholds for the numeric tier.
#[derive(Clone, Debug)]
pub struct RaabeOptions {
    /// Probes run at n = 2^i for i = min_exponent..=max_exponent.
    pub min_exponent: u32,
    pub max_exponent: u32,
    /// Successive estimates within this tolerance count as stabilized.
    pub stabilization_tol: f64,
    /// Classification margin around L = 1.
    pub margin: f64,
}

impl Default for RaabeOptions {
    fn default() -> Self {
        RaabeOptions {
            min_exponent: 4,
            max_exponent: 24,
            stabilization_tol: 1e-4,
            margin: 1e-3,
        }
    }
}

/// Exact classification for laws whose limit is known in closed form,
/// falling back to the numeric probe tier otherwise.
pub fn raabe_classify(dist: &RadiusDistribution, opts: &RaabeOptions) -> Verdict {
    match dist.raabe_limit() {
        Some(RaabeLimit::Infinite) => Verdict::new(
            Classification::Survives,
            RuleTag::RaabeLimitAboveOne,
            Tier::Analytic,
        )
        .with_evidence("raabe_limit_infinite", 1.0),
        Some(RaabeLimit::Finite(l)) => {
            if l > 1.0 + opts.margin {
                Verdict::new(
                    Classification::Survives,
                    RuleTag::RaabeLimitAboveOne,
                    Tier::Analytic,
                )
                .with_evidence("raabe_limit", l)
            } else if l < 1.0 - opts.margin {
                Verdict::new(
                    Classification::Dies,
                    RuleTag::RaabeLimitBelowOne,
                    Tier::Analytic,
                )
                .with_evidence("raabe_limit", l)
            } else {
                match dist.critical_refinement_holds() {
                    Some(true) => Verdict::new(
                        Classification::Dies,
                        RuleTag::CriticalTailRefinement,
                        Tier::Analytic,
                    )
                    .with_evidence("raabe_limit", l),
                    Some(false) => Verdict::inconclusive(Tier::Analytic)
                        .with_evidence("raabe_limit", l)
                        .with_note("limit at threshold; refinement hypothesis fails"),
                    None => {
                        let v = classify_part_three(&|n| dist.tail(n), opts);
                        v.with_evidence("raabe_limit", l)
                    }
                }
            }
        }
        None => raabe_classify_fn(&|n| dist.tail(n), opts),
    }
}

/// Numeric-tier classification of an arbitrary tail function.
pub fn raabe_classify_fn(tail_at: &dyn Fn(u64) -> f64, opts: &RaabeOptions) -> Verdict {
    let estimates: Vec<(u64, f64)> = (opts.min_exponent..=opts.max_exponent)
        .map(|i| {
            let n = 1u64 << i;
            (n, n as f64 * tail_at(n))
        })
        .collect();
    let last = estimates[estimates.len() - 1].1;
    let prev = estimates[estimates.len() - 2].1;
    let delta = (last - prev).abs();
    let stabilized = delta <= opts.stabilization_tol * last.abs().max(1.0);

    if stabilized {
        let l = last;
        if l > 1.0 + opts.margin {
            Verdict::new(
                Classification::Survives,
                RuleTag::RaabeLimitAboveOne,
                Tier::Heuristic,
            )
            .with_evidence("raabe_limit_estimate", l)
            .with_evidence("last_delta", delta)
        } else if l < 1.0 - opts.margin {
            Verdict::new(
                Classification::Dies,
                RuleTag::RaabeLimitBelowOne,
                Tier::Heuristic,
            )
            .with_evidence("raabe_limit_estimate", l)
            .with_evidence("last_delta", delta)
        } else {
            classify_part_three(tail_at, opts).with_evidence("raabe_limit_estimate", l)
        }
    } else {
        // No stabilization: monotone growth far past 1 is still decisive.
        let increasing = estimates.windows(2).all(|w| w[1].1 >= w[0].1);
        if increasing && last > 10.0 {
            Verdict::new(
                Classification::Survives,
                RuleTag::RaabeLimitAboveOne,
                Tier::Heuristic,
            )
            .with_evidence("raabe_limit_estimate", last)
            .with_note("estimates diverge upward without stabilizing")
        } else {
            Verdict::inconclusive(Tier::Heuristic)
                .with_evidence("raabe_limit_estimate", last)
                .with_evidence("last_delta", delta)
                .with_note("limit estimates did not stabilize")
        }
    }
}

/// Refinement at L ≈ 1: extinction if P(R ≥ n) ≤ 1/(n-1) on every probe.
/// Only a probe range is checkable numerically, so this stays heuristic.
fn classify_part_three(tail_at: &dyn Fn(u64) -> f64, opts: &RaabeOptions) -> Verdict {
    let holds = (opts.min_exponent..=opts.max_exponent).all(|i| {
        let n = 1u64 << i;
        tail_at(n) <= 1.0 / (n - 1) as f64
    });
    if holds {
        Verdict::new(
            Classification::Dies,
            RuleTag::CriticalTailRefinement,
            Tier::Heuristic,
        )
        .with_note("refinement hypothesis verified on probe range only")
    } else {
        Verdict::inconclusive(Tier::Heuristic)
            .with_note("limit at threshold; refinement hypothesis fails on probes")
    }
}
