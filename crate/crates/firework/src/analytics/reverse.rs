//! Survival criteria and the lower bound for the reverse firework process.

use super::{BoundEntry, Classification, Rigor, RuleTag, Tier, Verdict};
use crate::distributions::{DistributionSchedule, ExampleKind, Mean, RadiusDistribution};
use crate::error::{Error, Result};
use crate::numeric::{clamp_prob, KahanSum};

/// Probe depths for the numeric evidence of the heterogeneous criteria.
#[derive(Clone, Debug)]
pub struct ReverseProbe {
    /// Offsets n at which Σ_k P(R_{n+k} ≥ k) partial sums are reported.
    pub offsets: Vec<u64>,
    /// Terms per partial sum.
    pub depth: u64,
}

impl Default for ReverseProbe {
    fn default() -> Self {
        ReverseProbe {
            offsets: vec![0, 1, 2, 4, 8, 16],
            depth: 4096,
        }
    }
}

/// Direction of a caller-supplied homogeneous coupling law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominationSide {
    /// P(R_n ≥ k) ≤ P(law ≥ k) for all n, k.
    Above,
    /// P(R_n ≥ k) ≥ P(law ≥ k) for all n, k.
    Below,
}

/// Homogeneous reverse dichotomy: almost-sure survival iff `E[R] = ∞`,
/// after the degenerate cases excluded by the standing assumption
/// P(R < 1) ∈ (0, 1).
pub fn classify_reverse_homogeneous(dist: &RadiusDistribution) -> Verdict {
    let p_below_one = dist.strict_cdf(1.0);
    if p_below_one == 0.0 {
        // R ≥ 1 almost surely: vertex k always hears vertex k-1.
        return Verdict::new(
            Classification::SurvivesAlmostSurely,
            RuleTag::DegenerateFullReach,
            Tier::Analytic,
        )
        .with_note("degenerate case: P(R < 1) = 0");
    }
    if p_below_one == 1.0 {
        return Verdict::new(
            Classification::Dies,
            RuleTag::DegenerateNoReach,
            Tier::Analytic,
        )
        .with_note("degenerate case: P(R < 1) = 1");
    }
    match dist.mean() {
        Mean::Infinite => Verdict::new(
            Classification::SurvivesAlmostSurely,
            RuleTag::ReverseInfiniteMean,
            Tier::Analytic,
        ),
        Mean::Finite(mean) => Verdict::new(
            Classification::Dies,
            RuleTag::ReverseFiniteMean,
            Tier::Analytic,
        )
        .with_evidence("mean", mean),
    }
}

/// Heterogeneous reverse criteria: the offset tail-sum dichotomy
/// (Σ_k P(R_{n+k} ≥ k) = ∞ for all n ⟺ almost-sure survival), the
/// ρ = Σ_n Π_k P(R_{n+k} < k) summability route, and analytic coupling
/// for the built-in families; `Inconclusive` otherwise.
pub fn classify_reverse_heterogeneous(
    schedule: &DistributionSchedule,
    probe: &ReverseProbe,
) -> Verdict {
    if let Some(dist) = schedule.homogeneous_law() {
        return classify_reverse_homogeneous(dist)
            .with_note("constant schedule: homogeneous dichotomy applies");
    }

    if let Some((kind, b)) = schedule.example_family() {
        // Offset tail sums per family:
        //   ex41: Σ_k b_{n+2k-1} — diverges iff Σ b_n does;
        //   ex42: 1 - b_{n+1} — always finite;
        //   ex43: Σ_k b_{n+k} — diverges iff Σ b_n does.
        match kind {
            ExampleKind::Ex41 | ExampleKind::Ex43 => {
                if b.sum_diverges() {
                    return Verdict::new(
                        Classification::SurvivesAlmostSurely,
                        RuleTag::TailSumDiverges,
                        Tier::Analytic,
                    )
                    .with_evidence(
                        "tail_sum_at_offset_0_depth_4096",
                        offset_tail_partial_sum(schedule, 0, 4096),
                    )
                    .with_note("Σ_k P(R_{n+k} ≥ k) inherits the divergence of Σ b_n");
                }
                // Convergent b: dominated above by the homogeneous law with
                // tails T(k) = sup_n P(R_{n+k} ≥ k) = b_{k-1} (ex41) or b_k
                // (ex43); its mean Σ T(k) is finite, so the process dies.
                let mean_bound = match kind {
                    ExampleKind::Ex41 => {
                        b.partial_sum(0, 4096) + b.tail_sum_upper(4096).unwrap_or(f64::INFINITY)
                    }
                    _ => b.partial_sum(1, 4096) + b.tail_sum_upper(4096).unwrap_or(f64::INFINITY),
                };
                if mean_bound.is_finite() {
                    return Verdict::new(
                        Classification::Dies,
                        RuleTag::ReverseCoupledAboveDies,
                        Tier::Analytic,
                    )
                    .with_evidence("dominating_mean_upper", mean_bound)
                    .with_note("tails dominated by a finite-mean homogeneous law");
                }
            }
            ExampleKind::Ex42 => {
                // The offset tail sums are finite everywhere, so survival
                // is not almost sure; ρ = Σ_n b_{n+1} decides positivity.
                if !b.sum_diverges() {
                    let rho =
                        b.partial_sum(1, 4096) + b.tail_sum_upper(4096).unwrap_or(f64::INFINITY);
                    if rho.is_finite() {
                        return Verdict::new(
                            Classification::Survives,
                            RuleTag::RhoFinite,
                            Tier::Analytic,
                        )
                        .with_evidence("rho_upper", rho)
                        .with_note("survival probability is positive but below one");
                    }
                }
                return Verdict::inconclusive(Tier::Analytic)
                    .with_evidence("tail_sum_offset_0", 1.0 - b.value(1))
                    .with_note("offset tail sums finite (survival not a.s.); ρ diverges");
            }
        }
    }

    // Generic schedules: report partial sums and ρ estimates, but never
    // promote them to a verdict without a certificate.
    let mut v = Verdict::inconclusive(Tier::Heuristic)
        .with_note("no family certificate; partial sums reported as evidence");
    for &n in &probe.offsets {
        let s = offset_tail_partial_sum(schedule, n, probe.depth);
        v = v.with_evidence(&format!("tail_sum_offset_{n}"), s);
    }
    v = v.with_evidence("rho_partial_64", rho_partial_sum(schedule, 64, 64));
    v.with_depth(probe.depth)
}

/// Partial sums of ρ = Σ_n Π_k P(R_{n+k} < k), inner products in log
/// space, both truncations explicit.
fn rho_partial_sum(schedule: &DistributionSchedule, outer: u64, inner: u64) -> f64 {
    let mut acc = KahanSum::new();
    for n in 1..=outer {
        let mut ln_inner = 0.0f64;
        for k in 1..=inner {
            let t = schedule.law(n + k).tail(k);
            if t >= 1.0 {
                ln_inner = f64::NEG_INFINITY;
                break;
            }
            ln_inner += (-t).ln_1p();
        }
        acc.add(ln_inner.exp());
    }
    acc.value()
}

/// Σ_{k=1}^{depth} P(R_{n+k} ≥ k).
fn offset_tail_partial_sum(schedule: &DistributionSchedule, n: u64, depth: u64) -> f64 {
    let mut acc = KahanSum::new();
    for k in 1..=depth {
        acc.add(schedule.law(n + k).tail(k));
    }
    acc.value()
}

/// Coupling against a caller-supplied homogeneous law: above a finite-mean
/// law the reverse process dies, below an infinite-mean law it survives
/// almost surely. The law must satisfy the standing assumption
/// P(R < 1) ∈ (0, 1); the pointwise bounds are spot-checked on probes.
pub fn classify_reverse_by_domination(
    schedule: &DistributionSchedule,
    law: &RadiusDistribution,
    side: DominationSide,
    certified: bool,
) -> Result<Verdict> {
    let p_below_one = law.strict_cdf(1.0);
    if !(p_below_one > 0.0 && p_below_one < 1.0) {
        return Err(Error::invalid_parameter(
            "law",
            "coupling law must satisfy P(R < 1) ∈ (0,1)",
        ));
    }
    let tier = if certified {
        Tier::Analytic
    } else {
        Tier::Heuristic
    };
    let indices: Vec<u64> = (0..32).chain([64, 128, 256, 512, 1024]).collect();
    let ks: Vec<u64> = (1..=32).chain([64, 128, 256, 512]).collect();
    for &n in &indices {
        let rn = schedule.law(n);
        for &k in &ks {
            let ok = match side {
                DominationSide::Above => rn.tail(k) <= law.tail(k) + 1e-12,
                DominationSide::Below => rn.tail(k) >= law.tail(k) - 1e-12,
            };
            if !ok {
                return Ok(Verdict::inconclusive(Tier::Heuristic)
                    .with_note("claimed domination fails on the probe grid"));
            }
        }
    }
    Ok(match (side, law.mean()) {
        (DominationSide::Above, Mean::Finite(mean)) => Verdict::new(
            Classification::Dies,
            RuleTag::ReverseCoupledAboveDies,
            tier,
        )
        .with_evidence("dominating_mean", mean),
        (DominationSide::Below, Mean::Infinite) => Verdict::new(
            Classification::SurvivesAlmostSurely,
            RuleTag::ReverseCoupledBelowSurvives,
            tier,
        ),
        _ => Verdict::inconclusive(tier)
            .with_note("coupling direction and mean finiteness give no conclusion"),
    })
}

/// Doubly-truncated lower bound for P(S):
/// Π_{n=0}^{N} [1 - Π_{j=1}^{K} (1 - P(R_{n+j} ≥ j))], in log space.
///
/// Truncating the inner product at K overestimates it and so
/// underestimates every factor; the result is a valid lower bound of the
/// outer-truncated expression. The outer truncation is rigorous only with
/// a certified bound on Σ_{n>N} Π_k P(R_{n+k} < k).
pub fn lower_bound_reverse(
    schedule: &DistributionSchedule,
    outer_depth: u64,
    inner_depth: u64,
) -> Result<BoundEntry> {
    if outer_depth < 1 || inner_depth < 1 {
        return Err(Error::invalid_parameter(
            "depths",
            "outer and inner truncation depths must be ≥ 1",
        ));
    }
    let mut ln_total = 0.0f64;
    for n in 0..=outer_depth {
        let mut ln_inner = 0.0f64;
        for j in 1..=inner_depth {
            let t = schedule.law(n + j).tail(j);
            if t >= 1.0 {
                ln_inner = f64::NEG_INFINITY;
                break;
            }
            ln_inner += (-t).ln_1p();
        }
        // factor = 1 - exp(ln_inner)
        let factor = -ln_inner.exp_m1();
        if factor <= 0.0 {
            ln_total = f64::NEG_INFINITY;
            break;
        }
        ln_total += factor.ln();
    }
    let value = clamp_prob(ln_total.exp());

    let certificate = outer_tail_certificate(schedule, outer_depth);
    Ok(match certificate {
        Some((eps, max_inner)) if max_inner < 1.0 => {
            let adjusted = value * (-eps / (1.0 - max_inner)).exp();
            BoundEntry {
                value: clamp_prob(adjusted),
                rigor: Rigor::Rigorous,
                truncated_value: value,
                truncation_depth: outer_depth,
                inner_depth: Some(inner_depth),
                tail_certificate: Some(eps),
            }
        }
        _ => BoundEntry {
            value,
            rigor: Rigor::TruncatedEstimate,
            truncated_value: value,
            truncation_depth: outer_depth,
            inner_depth: Some(inner_depth),
            tail_certificate: None,
        },
    })
}

/// Certified (bound on Σ_{n>N} Π_k P(R_{n+k} < k), sup of inner products),
/// where the family admits one.
fn outer_tail_certificate(schedule: &DistributionSchedule, n_depth: u64) -> Option<(f64, f64)> {
    if let Some(dist) = schedule.homogeneous_law() {
        // Infinite mean ⟺ Σ_k P(R ≥ k) = ∞ ⟺ every true inner product is 0.
        return match dist.mean() {
            Mean::Infinite => Some((0.0, 0.0)),
            Mean::Finite(_) => None,
        };
    }
    if let Some((kind, b)) = schedule.example_family() {
        match kind {
            ExampleKind::Ex41 | ExampleKind::Ex43 => {
                if b.sum_diverges() {
                    // Σ_k P(R_{n+k} ≥ k) = ∞ for all n: true inners vanish.
                    return Some((0.0, 0.0));
                }
                None
            }
            ExampleKind::Ex42 => {
                // Inner product at offset n is exactly b_{n+1}.
                let eps = b.tail_sum_upper(n_depth + 2)?;
                Some((eps, b.value(n_depth + 2)))
            }
        }
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::BSequence;

    fn half_half() -> RadiusDistribution {
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).unwrap()
    }

    #[test]
    fn homogeneous_dichotomy() {
        let v = classify_reverse_homogeneous(&RadiusDistribution::power_law(2.0).unwrap());
        assert_eq!(v.classification, Classification::SurvivesAlmostSurely);
        assert_eq!(v.rule, Some(RuleTag::ReverseInfiniteMean));
        assert_eq!(v.tier, Tier::Analytic);

        let v = classify_reverse_homogeneous(&RadiusDistribution::power_law(3.0).unwrap());
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::ReverseFiniteMean));

        let v = classify_reverse_homogeneous(&half_half());
        assert_eq!(v.classification, Classification::Dies);
    }

    #[test]
    fn homogeneous_degenerate_guard() {
        // R ≡ 1 has finite mean but P(R < 1) = 0: the chain is certain.
        let v = classify_reverse_homogeneous(&RadiusDistribution::point_mass(1));
        assert_eq!(v.classification, Classification::SurvivesAlmostSurely);
        assert_eq!(v.rule, Some(RuleTag::DegenerateFullReach));

        let v = classify_reverse_homogeneous(&RadiusDistribution::point_mass(0));
        assert_eq!(v.classification, Classification::Dies);
    }

    #[test]
    fn ex43_log_harmonic_survives_almost_surely() {
        let b = BSequence::log_harmonic(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex43, b);
        let v = classify_reverse_heterogeneous(&s, &ReverseProbe::default());
        assert_eq!(v.classification, Classification::SurvivesAlmostSurely);
        assert_eq!(v.rule, Some(RuleTag::TailSumDiverges));
        assert_eq!(v.tier, Tier::Analytic);
    }

    #[test]
    fn ex41_inverse_square_dies_by_coupling() {
        let b = BSequence::inverse_square(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex41, b);
        let v = classify_reverse_heterogeneous(&s, &ReverseProbe::default());
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::ReverseCoupledAboveDies));
    }

    #[test]
    fn ex42_inverse_square_survives_with_positive_probability() {
        let b = BSequence::inverse_square(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex42, b);
        let v = classify_reverse_heterogeneous(&s, &ReverseProbe::default());
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::RhoFinite));
    }

    #[test]
    fn ex42_log_harmonic_stays_inconclusive() {
        let b = BSequence::log_harmonic(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex42, b);
        let v = classify_reverse_heterogeneous(&s, &ReverseProbe::default());
        assert_eq!(v.classification, Classification::Inconclusive);
    }

    #[test]
    fn constant_schedule_matches_homogeneous_classifier() {
        for dist in [
            half_half(),
            RadiusDistribution::power_law(2.0).unwrap(),
            RadiusDistribution::power_law(2.5).unwrap(),
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::critical_tail(),
        ] {
            let s = DistributionSchedule::homogeneous(dist.clone());
            let het = classify_reverse_heterogeneous(&s, &ReverseProbe::default());
            let hom = classify_reverse_homogeneous(&dist);
            assert_eq!(het.classification, hom.classification, "{}", dist.describe());
        }
    }

    #[test]
    fn domination_helper_routes() {
        // Schedule with shrinking spread dominated by {0:1/2, 1:1/2}.
        let s = DistributionSchedule::from_fn("shrinking", |n| {
            let p = 1.0 / (n as f64 + 2.0);
            RadiusDistribution::finite_table(&[(0, 1.0 - p), (1, p)]).unwrap()
        });
        let v =
            classify_reverse_by_domination(&s, &half_half(), DominationSide::Above, true).unwrap();
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.tier, Tier::Analytic);

        // Dominated below by an infinite-mean law.
        let base = RadiusDistribution::power_law(1.5).unwrap();
        let inner = base.clone();
        let s = DistributionSchedule::from_fn("wide", move |_| inner.clone());
        let v = classify_reverse_by_domination(&s, &base, DominationSide::Below, true).unwrap();
        assert_eq!(v.classification, Classification::SurvivesAlmostSurely);

        // Degenerate coupling law rejected.
        let s = DistributionSchedule::homogeneous(half_half());
        assert!(classify_reverse_by_domination(
            &s,
            &RadiusDistribution::point_mass(1),
            DominationSide::Above,
            true
        )
        .is_err());
    }

    #[test]
    fn lower_bound_examples() {
        // All tails zero → bound 0.
        let s = DistributionSchedule::homogeneous(RadiusDistribution::point_mass(0));
        let e = lower_bound_reverse(&s, 10, 10).unwrap();
        assert_eq!(e.value, 0.0);

        // {0:1/2, 1:1/2} with K=1: each factor is 1/2, bound 0.5^{N+1}.
        let s = DistributionSchedule::homogeneous(half_half());
        let e = lower_bound_reverse(&s, 9, 1).unwrap();
        assert!((e.value - 0.5f64.powi(10)).abs() < 1e-15);
        assert_eq!(e.rigor, Rigor::TruncatedEstimate);

        // Power law α = 2: value in (0, 1], rigorous (true inners vanish).
        let s = DistributionSchedule::homogeneous(RadiusDistribution::power_law(2.0).unwrap());
        let e = lower_bound_reverse(&s, 200, 200).unwrap();
        assert!(e.value > 0.0 && e.value <= 1.0, "value={}", e.value);
        assert_eq!(e.rigor, Rigor::Rigorous);
    }

    #[test]
    fn lower_bound_ex42_rigorous() {
        let b = BSequence::inverse_square(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex42, b);
        let e = lower_bound_reverse(&s, 500, 4).unwrap();
        assert_eq!(e.rigor, Rigor::Rigorous);
        assert!(e.value > 0.0 && e.value < 1.0);
        // P(S) for ex42 is Π_{k≥1}(1 - b_k); the bound must sit below it.
        let exact: f64 = (1..100_000u64)
            .map(|k| (1.0 - 1.0 / (((k + 2) * (k + 2)) as f64)).ln())
            .sum::<f64>()
            .exp();
        assert!(e.value <= exact + 1e-9, "{} > {exact}", e.value);
    }

    #[test]
    fn lower_bound_rejects_zero_depths() {
        let s = DistributionSchedule::homogeneous(half_half());
        assert!(lower_bound_reverse(&s, 0, 5).is_err());
        assert!(lower_bound_reverse(&s, 5, 0).is_err());
    }
}
