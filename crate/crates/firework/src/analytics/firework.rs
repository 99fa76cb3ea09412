//! Survival criteria and bounds for the firework process.

use super::raabe::{raabe_classify, RaabeOptions};
use super::{
    a_sequence_log, BoundEntry, Classification, Rigor, RuleTag, Tier, Verdict,
};
use crate::distributions::{
    BSequence, DistributionSchedule, ExampleKind, Mean, RadiusDistribution, RaabeLimit,
};
use crate::error::{Error, Result};
use crate::numeric::{clamp_prob, KahanSum};

/// Caller-supplied coupling data for the heterogeneous classifier: a
/// homogeneous law bounding the schedule's tails pointwise, optionally up
/// to a vanishing gap sequence. `certified` records that the caller
/// guarantees the pointwise bounds for all indices (they are additionally
/// spot-checked on a probe grid here).
#[derive(Clone, Debug)]
pub enum Domination {
    /// P(R_n ≥ k) ≤ P(law ≥ k) for all n, k.
    Above {
        law: RadiusDistribution,
        certified: bool,
    },
    /// P(R_n ≥ k) ≥ P(law ≥ k) for all n, k.
    Below {
        law: RadiusDistribution,
        certified: bool,
    },
    /// P(law ≥ k) - P(R_n ≥ k) ≤ gap_k for all n, k, with gap_k → 0.
    BelowWithGap {
        law: RadiusDistribution,
        gap: BSequence,
        certified: bool,
    },
}

/// Criterion for the homogeneous firework (u_i = i): trivial verdicts for
/// degenerate laws, the finite-mean shortcut, then the limit classifier.
pub fn classify_firework_homogeneous(dist: &RadiusDistribution) -> Verdict {
    let p_below_one = dist.strict_cdf(1.0);
    if p_below_one == 0.0 {
        // R ≥ 1 almost surely: every vertex reaches its right neighbour.
        return Verdict::new(
            Classification::Survives,
            RuleTag::DegenerateFullReach,
            Tier::Analytic,
        )
        .with_evidence("p_radius_below_one", 0.0)
        .with_note("degenerate case: P(R < 1) = 0");
    }
    if p_below_one == 1.0 {
        return Verdict::new(
            Classification::Dies,
            RuleTag::DegenerateNoReach,
            Tier::Analytic,
        )
        .with_evidence("p_radius_below_one", 1.0)
        .with_note("degenerate case: P(R < 1) = 1");
    }
    let verdict = match dist.mean() {
        Mean::Finite(mean) => Verdict::new(
            Classification::Dies,
            RuleTag::FiniteMean,
            Tier::Analytic,
        )
        .with_evidence("mean", mean),
        Mean::Infinite => raabe_classify(dist, &RaabeOptions::default()),
    };
    // Partial sums of a_n as supporting evidence for the criterion.
    let schedule = DistributionSchedule::homogeneous(dist.clone());
    let depth = 512u64;
    let sum: f64 = a_sequence_log(&schedule, 1, depth)
        .into_iter()
        .map(f64::exp)
        .sum();
    verdict
        .with_evidence(&format!("a_partial_sum_{depth}"), sum)
        .with_depth(depth)
}

/// Criterion for the heterogeneous firework on layouts with gap bound m.
///
/// Routes, in order: delegation for constant schedules on unit layouts; a
/// degenerate-origin check; summability of [P(R_n < t·m)]^t; the
/// caller-supplied domination routes; the vanishing reach upper bound.
pub fn classify_firework_heterogeneous(
    schedule: &DistributionSchedule,
    m: u64,
    t: u64,
    domination: Option<&Domination>,
) -> Result<Verdict> {
    if m < 1 {
        return Err(Error::invalid_parameter("m", "gap bound must be ≥ 1"));
    }
    if t < 1 {
        return Err(Error::invalid_parameter("t", "exponent must be ≥ 1"));
    }

    if m == 1 {
        if let Some(dist) = schedule.homogeneous_law() {
            return Ok(classify_firework_homogeneous(dist)
                .with_note("constant schedule: homogeneous criterion applies"));
        }
    }

    // The origin never reaching any vertex kills the process outright
    // (u_1 ≥ 1 for every layout).
    if schedule.law(0).strict_cdf(1.0) == 1.0 {
        return Ok(Verdict::new(
            Classification::Dies,
            RuleTag::OriginNeverReaches,
            Tier::Analytic,
        )
        .with_note("P(R_0 = 0) = 1: no vertex beyond the origin is ever activated"));
    }

    if let Some(v) = part_one_summability(schedule, m, t) {
        return Ok(v);
    }

    if let Some(dom) = domination {
        if let Some(v) = domination_route(schedule, m, dom) {
            return Ok(v);
        }
    }

    if let Some(v) = vanishing_upper_bound_route(schedule) {
        return Ok(v);
    }

    Ok(Verdict::inconclusive(Tier::Heuristic)
        .with_evidence("upper_bound_at_4096", upper_bound_reach_heterogeneous(schedule, 4096))
        .with_note("no summability certificate, domination data, or vanishing bound"))
}

/// Survives when Σ_n [P(R_n < t·m)]^t < ∞, certified per schedule family.
fn part_one_summability(schedule: &DistributionSchedule, m: u64, t: u64) -> Option<Verdict> {
    let threshold = t.checked_mul(m)?;
    if let Some((kind, b)) = schedule.example_family() {
        match kind {
            ExampleKind::Ex42 => {
                // P(R_n < 1) = b_n; P(R_n < k) = 1 for k ≥ 2. Only the
                // threshold 1 (t = m = 1) can give a summable series, and
                // then it is Σ b_n.
                if threshold == 1 && !b.sum_diverges() {
                    let partial = b.partial_sum(0, 4096);
                    let bound = partial + b.tail_sum_upper(4096).unwrap_or(f64::INFINITY);
                    return Some(
                        Verdict::new(
                            Classification::Survives,
                            RuleTag::SummablePowerSeries,
                            Tier::Analytic,
                        )
                        .with_evidence("series_sum_upper", bound)
                        .with_note("Σ [P(R_n < t·m)]^t = Σ b_n, convergent by family"),
                    );
                }
                None
            }
            // Ex41/Ex43 terms tend to 1: never summable.
            ExampleKind::Ex41 | ExampleKind::Ex43 => None,
        }
    } else if let Some(dist) = schedule.homogeneous_law() {
        // Constant schedule on a coarser layout: terms are constant, so
        // the series converges only when they vanish entirely.
        if dist.strict_cdf(threshold as f64) == 0.0 {
            return Some(
                Verdict::new(
                    Classification::Survives,
                    RuleTag::SummablePowerSeries,
                    Tier::Analytic,
                )
                .with_note("P(R < t·m) = 0: all series terms vanish"),
            );
        }
        None
    } else {
        None
    }
}

fn domination_route(
    schedule: &DistributionSchedule,
    m: u64,
    dom: &Domination,
) -> Option<Verdict> {
    let opts = RaabeOptions::default();
    match dom {
        Domination::Above { law, certified } => {
            if !probe_domination(schedule, law, None, true) {
                return Some(
                    Verdict::inconclusive(Tier::Heuristic)
                        .with_note("claimed upper domination fails on the probe grid"),
                );
            }
            let inner = raabe_classify(law, &opts);
            if inner.classification == Classification::Dies {
                let tier = tier_for(*certified, inner.tier);
                return Some(
                    Verdict::new(Classification::Dies, RuleTag::CoupledAboveDies, tier)
                        .with_note(format!(
                            "dominating law dies under rule {}",
                            inner.rule_name()
                        )),
                );
            }
            None
        }
        Domination::Below { law, certified } => {
            if !probe_domination(schedule, law, None, false) {
                return Some(
                    Verdict::inconclusive(Tier::Heuristic)
                        .with_note("claimed lower domination fails on the probe grid"),
                );
            }
            let inner = raabe_classify(law, &opts);
            if inner.classification == Classification::Survives && m == 1 {
                let tier = tier_for(*certified, inner.tier);
                return Some(Verdict::new(
                    Classification::Survives,
                    RuleTag::CoupledBelowSurvives,
                    tier,
                ));
            }
            None
        }
        Domination::BelowWithGap {
            law,
            gap,
            certified,
        } => {
            if !probe_domination(schedule, law, Some(gap), false) {
                return Some(
                    Verdict::inconclusive(Tier::Heuristic)
                        .with_note("claimed gap domination fails on the probe grid"),
                );
            }
            // Needs lim n·[P(law ≥ n) - gap_n] > m; with gap_n → 0 this is
            // the law's limit against the layout step.
            if !gap.n_times_b_vanishes() {
                return None;
            }
            let (exceeds, limit_tier) = match law.raabe_limit() {
                Some(RaabeLimit::Infinite) => (true, Tier::Analytic),
                Some(RaabeLimit::Finite(l)) => (l > m as f64, Tier::Analytic),
                None => {
                    // Probe n·[P(law ≥ n) - gap_n] at geometric n.
                    let probes: Vec<f64> = (4..=22)
                        .map(|i| {
                            let n = 1u64 << i;
                            n as f64 * (law.tail(n) - gap.value(n))
                        })
                        .collect();
                    let last = probes[probes.len() - 1];
                    let prev = probes[probes.len() - 2];
                    let stabilized = (last - prev).abs() <= 1e-3 * last.abs().max(1.0);
                    let diverging = probes.windows(2).all(|w| w[1] >= w[0]) && last > 10.0;
                    (
                        (stabilized || diverging) && last > m as f64 + 1e-3,
                        Tier::Heuristic,
                    )
                }
            };
            if exceeds {
                let tier = tier_for(*certified, limit_tier);
                return Some(Verdict::new(
                    Classification::Survives,
                    RuleTag::DominatedTailGap,
                    tier,
                ));
            }
            None
        }
    }
}

fn tier_for(certified: bool, inner: Tier) -> Tier {
    if certified && inner == Tier::Analytic {
        Tier::Analytic
    } else {
        Tier::Heuristic
    }
}

/// Spot-check of the claimed pointwise tail bounds on a probe grid.
fn probe_domination(
    schedule: &DistributionSchedule,
    law: &RadiusDistribution,
    gap: Option<&BSequence>,
    above: bool,
) -> bool {
    let indices: Vec<u64> = (0..32).chain([64, 128, 256, 512, 1024, 2048, 4096]).collect();
    let ks: Vec<u64> = (1..=32).chain([64, 128, 256, 512, 1024]).collect();
    for &n in &indices {
        let rn = schedule.law(n);
        for &k in &ks {
            let lhs = rn.tail(k);
            let rhs = law.tail(k);
            let ok = if above {
                lhs <= rhs + 1e-12
            } else {
                match gap {
                    Some(g) => rhs - lhs <= g.value(k) + 1e-12,
                    None => lhs >= rhs - 1e-12,
                }
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Dies when the reach upper bound Σ_k P(R_k ≥ n-k) vanishes along the
/// horizon; certified for the built-in families with lim n·b_n = 0.
fn vanishing_upper_bound_route(schedule: &DistributionSchedule) -> Option<Verdict> {
    if let Some((kind, b)) = schedule.example_family() {
        let certified = match kind {
            // bound_n = n·b_{n-1} → 0 exactly when n·b_n → 0.
            ExampleKind::Ex41 => b.n_times_b_vanishes(),
            // bound_n = Σ_{k≥⌈n/2⌉}^{n-1} b_k ≤ (n/2+1)·b_{n/2} → 0 likewise.
            ExampleKind::Ex43 => b.n_times_b_vanishes(),
            // bound_n → 1 for ex42.
            ExampleKind::Ex42 => false,
        };
        if certified {
            let probe = 1u64 << 14;
            return Some(
                Verdict::new(
                    Classification::Dies,
                    RuleTag::VanishingReachBound,
                    Tier::Analytic,
                )
                .with_evidence(
                    "upper_bound_at_16384",
                    upper_bound_reach_heterogeneous(schedule, probe),
                )
                .with_note("P(V_n) upper bound vanishes: n·b_n → 0 for the family"),
            );
        }
        return None;
    }
    // Generic schedules: probe the bound at geometric depths.
    let probes: Vec<f64> = (4..=14)
        .map(|i| upper_bound_reach_heterogeneous(schedule, 1u64 << i))
        .collect();
    let decreasing = probes.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let last = *probes.last().expect("nonempty");
    if decreasing && last < 1e-3 {
        return Some(
            Verdict::new(
                Classification::Dies,
                RuleTag::VanishingReachBound,
                Tier::Heuristic,
            )
            .with_evidence("upper_bound_at_16384", last)
            .with_note("reach upper bound decays to ~0 on probes"),
        );
    }
    None
}

/// Π_{j=0}^{J} [1 - a_j], a lower bound for P(V) once the discarded tail
/// Σ_{j>J} a_j is certified; flagged `TruncatedEstimate` otherwise.
pub fn lower_bound_firework(schedule: &DistributionSchedule, m: u64, j_depth: u64) -> BoundEntry {
    let ln_a = a_sequence_log(schedule, m, j_depth);
    let mut ln_value = 0.0f64;
    for &la in &ln_a {
        let a = la.exp();
        if a >= 1.0 {
            ln_value = f64::NEG_INFINITY;
            break;
        }
        ln_value += (-a).ln_1p();
    }
    let value = clamp_prob(ln_value.exp());
    let a_last = ln_a[j_depth as usize].exp();

    // Tail certificates: homogeneous schedules only (a_j is monotone).
    if schedule.is_homogeneous() {
        if a_last == 0.0 {
            // Once a_J = 0 every later a_j = a_J·(…) = 0: nothing discarded.
            return BoundEntry {
                value,
                rigor: Rigor::Rigorous,
                truncated_value: value,
                truncation_depth: j_depth,
                inner_depth: None,
                tail_certificate: Some(0.0),
            };
        }
        if let Some(dist) = schedule.homogeneous_law() {
            if let Some(alpha) = dist.power_law_alpha() {
                if alpha < 2.0 {
                    if let Some(eps) = power_law_a_tail_bound(dist, alpha, m, j_depth, a_last) {
                        let adjusted = value * (-eps / (1.0 - a_last)).exp();
                        return BoundEntry {
                            value: clamp_prob(adjusted),
                            rigor: Rigor::Rigorous,
                            truncated_value: value,
                            truncation_depth: j_depth,
                            inner_depth: None,
                            tail_certificate: Some(eps),
                        };
                    }
                }
            }
        }
    }
    BoundEntry {
        value,
        rigor: Rigor::TruncatedEstimate,
        truncated_value: value,
        truncation_depth: j_depth,
        inner_depth: None,
        tail_certificate: None,
    }
}

/// Certified bound on Σ_{j>J} a_j for homogeneous power laws with α < 2.
///
/// The rigorous lower bracket tail(n) ≥ Z/((α-1)(n+1)^{α-1}) gives
/// j·tail((j+2)m) ≥ 2 for all j ≥ J once it holds at J (the left side is
/// increasing in j for α < 2). Then a_{j+1}/a_j = 1 - tail((j+2)m)
/// ≤ (j/(j+1))², so a_j ≤ a_J (J/j)² and Σ_{j>J} a_j ≤ a_J·J.
fn power_law_a_tail_bound(
    dist: &RadiusDistribution,
    alpha: f64,
    m: u64,
    j_depth: u64,
    a_last: f64,
) -> Option<f64> {
    let z = dist.power_law_z()?;
    if j_depth < 4 {
        return None;
    }
    let j = j_depth as f64;
    let (bracket_lo, _) = crate::distributions::zeta::tail_sum_bracket(alpha, (j_depth + 2) * m);
    let tail_lower = z * bracket_lo;
    if j * tail_lower < 2.0 {
        return None;
    }
    Some(a_last * j)
}

/// 1 - P(R=0) - Σ_{k=1}^{n} P(R=k)·Π_{j=0}^{k-1} P(R ≤ j): an upper bound
/// for P(V) of the homogeneous firework, nonincreasing in n.
pub fn upper_bound_firework_homogeneous(
    dist: &RadiusDistribution,
    depth: u64,
) -> Result<BoundEntry> {
    if depth < 1 {
        return Err(Error::invalid_parameter("depth", "must be ≥ 1"));
    }
    let mut acc = KahanSum::new();
    acc.add(1.0 - dist.pmf(0));
    let mut prod = 1.0f64;
    for k in 1..=depth {
        // Π_{j=0}^{k-1} P(R ≤ j); extend by P(R ≤ k-1) = 1 - tail(k).
        prod *= 1.0 - dist.tail(k);
        if prod == 0.0 {
            break;
        }
        acc.add(-(dist.pmf(k) * prod));
    }
    let value = clamp_prob(acc.value());
    Ok(BoundEntry {
        value,
        rigor: Rigor::Rigorous,
        truncated_value: value,
        truncation_depth: depth,
        inner_depth: None,
        tail_certificate: None,
    })
}

/// min(1, Σ_{k=0}^{n-1} P(R_k ≥ n-k)): upper bound for P(V_n) on any
/// layout with unit gaps.
pub fn upper_bound_reach_heterogeneous(schedule: &DistributionSchedule, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut acc = KahanSum::new();
    for k in 0..n {
        acc.add(schedule.law(k).tail(n - k));
        if acc.value() >= 1.0 {
            return 1.0;
        }
    }
    clamp_prob(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{BSequence, ExampleKind};

    fn half_half() -> RadiusDistribution {
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).unwrap()
    }

    #[test]
    fn homogeneous_verdicts_match_theory() {
        // Finite mean dies.
        let v = classify_firework_homogeneous(&half_half());
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::FiniteMean));
        assert_eq!(v.tier, Tier::Analytic);

        // α = 1.5 survives; α = 2.5 dies.
        let v = classify_firework_homogeneous(&RadiusDistribution::power_law(1.5).unwrap());
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.tier, Tier::Analytic);
        let v = classify_firework_homogeneous(&RadiusDistribution::power_law(2.5).unwrap());
        assert_eq!(v.classification, Classification::Dies);

        // α = 2: infinite mean but the limit 6/π² < 1 kills it.
        let v = classify_firework_homogeneous(&RadiusDistribution::power_law(2.0).unwrap());
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::RaabeLimitBelowOne));
    }

    #[test]
    fn homogeneous_degenerate_cases() {
        let v = classify_firework_homogeneous(&RadiusDistribution::point_mass(0));
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::DegenerateNoReach));

        let v = classify_firework_homogeneous(&RadiusDistribution::point_mass(1));
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::DegenerateFullReach));

        // critical tail: P(R < 1) = 0, so the chain reaction is certain.
        let v = classify_firework_homogeneous(&RadiusDistribution::critical_tail());
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::DegenerateFullReach));
    }

    #[test]
    fn ex42_survives_by_summability() {
        let b = BSequence::inverse_square(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex42, b);
        let v = classify_firework_heterogeneous(&s, 1, 1, None).unwrap();
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::SummablePowerSeries));
        assert_eq!(v.tier, Tier::Analytic);
    }

    #[test]
    fn ex41_dies_by_vanishing_bound() {
        let b = BSequence::log_harmonic(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex41, b);
        let v = classify_firework_heterogeneous(&s, 1, 1, None).unwrap();
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::VanishingReachBound));
        assert_eq!(v.tier, Tier::Analytic);
    }

    #[test]
    fn ex43_dies_at_the_origin() {
        let b = BSequence::log_harmonic(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex43, b);
        let v = classify_firework_heterogeneous(&s, 1, 1, None).unwrap();
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::OriginNeverReaches));
    }

    #[test]
    fn domination_above_kills() {
        // Per-index laws with P(R_n = 1) = 1/(n+2) ≤ 1/2, dominated above
        // by the finite table {0:1/2, 1:1/2}.
        let s = DistributionSchedule::from_fn("shrinking", |n| {
            let p = 1.0 / (n as f64 + 2.0);
            RadiusDistribution::finite_table(&[(0, 1.0 - p), (1, p)]).unwrap()
        });
        let dom = Domination::Above {
            law: half_half(),
            certified: true,
        };
        let v = classify_firework_heterogeneous(&s, 1, 1, Some(&dom)).unwrap();
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::CoupledAboveDies));
    }

    #[test]
    fn domination_below_survives() {
        // Laws at least as spread-out as power law α = 1.5.
        let base = RadiusDistribution::power_law(1.5).unwrap();
        let inner = base.clone();
        let s = DistributionSchedule::from_fn("boosted", move |_| inner.clone());
        let dom = Domination::Below {
            law: base,
            certified: true,
        };
        let v = classify_firework_heterogeneous(&s, 1, 1, Some(&dom)).unwrap();
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::CoupledBelowSurvives));
    }

    #[test]
    fn gap_domination_survives() {
        // Schedule tails equal to the α = 1.5 power law, within a
        // vanishing gap of it; the law's limit is infinite, above any m.
        let base = RadiusDistribution::power_law(1.5).unwrap();
        let inner = base.clone();
        let s = DistributionSchedule::from_fn("near-power", move |_| inner.clone());
        let dom = Domination::BelowWithGap {
            law: base,
            gap: BSequence::inverse_square(1.0).unwrap(),
            certified: true,
        };
        let v = classify_firework_heterogeneous(&s, 1, 1, Some(&dom)).unwrap();
        assert_eq!(v.classification, Classification::Survives);
        assert_eq!(v.rule, Some(RuleTag::DominatedTailGap));
        assert_eq!(v.tier, Tier::Analytic);
    }

    #[test]
    fn false_domination_claim_is_caught() {
        let s = DistributionSchedule::from_fn("wide", |_| {
            RadiusDistribution::finite_table(&[(0, 0.5), (3, 0.5)]).unwrap()
        });
        let dom = Domination::Above {
            law: half_half(),
            certified: true,
        };
        let v = classify_firework_heterogeneous(&s, 1, 1, Some(&dom)).unwrap();
        assert_eq!(v.classification, Classification::Inconclusive);
    }

    #[test]
    fn constant_schedule_delegates_to_homogeneous() {
        let s = DistributionSchedule::homogeneous(half_half());
        let v = classify_firework_heterogeneous(&s, 1, 1, None).unwrap();
        assert_eq!(v.classification, Classification::Dies);
        assert_eq!(v.rule, Some(RuleTag::FiniteMean));
    }

    #[test]
    fn verdicts_consistent_on_constant_schedules_for_catalog() {
        for dist in [
            half_half(),
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::power_law(1.5).unwrap(),
            RadiusDistribution::power_law(2.0).unwrap(),
            RadiusDistribution::power_law(2.5).unwrap(),
            RadiusDistribution::critical_tail(),
        ] {
            let s = DistributionSchedule::homogeneous(dist.clone());
            let het = classify_firework_heterogeneous(&s, 1, 1, None).unwrap();
            let hom = classify_firework_homogeneous(&dist);
            assert_eq!(
                het.classification,
                hom.classification,
                "{}",
                dist.describe()
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = DistributionSchedule::homogeneous(half_half());
        assert!(classify_firework_heterogeneous(&s, 0, 1, None).is_err());
        assert!(classify_firework_heterogeneous(&s, 1, 0, None).is_err());
    }

    #[test]
    fn lower_bound_half_half_collapses() {
        let s = DistributionSchedule::homogeneous(half_half());
        let e = lower_bound_firework(&s, 1, 200);
        // Π (1 - 1/2) = 2^-201 ≈ 0.
        assert!(e.value < 1e-60);
        assert_eq!(e.rigor, Rigor::TruncatedEstimate);
    }

    #[test]
    fn lower_bound_certain_survival() {
        let s = DistributionSchedule::homogeneous(RadiusDistribution::critical_tail());
        let e = lower_bound_firework(&s, 1, 50);
        assert_eq!(e.value, 1.0);
        assert_eq!(e.rigor, Rigor::Rigorous);
        assert_eq!(e.tail_certificate, Some(0.0));
    }

    #[test]
    fn lower_bound_power_law_rigorous_and_positive() {
        let s = DistributionSchedule::homogeneous(RadiusDistribution::power_law(1.5).unwrap());
        let e = lower_bound_firework(&s, 1, 10_000);
        assert!(e.value > 0.0 && e.value < 1.0, "value {}", e.value);
        assert_eq!(e.rigor, Rigor::Rigorous);
        assert!(e.tail_certificate.unwrap() < 1e-9);
    }

    #[test]
    fn lower_bound_monotone_in_depth() {
        // The raw truncated product shrinks with depth; the certified
        // value tightens (grows) toward P(V).
        let s = DistributionSchedule::homogeneous(RadiusDistribution::power_law(1.5).unwrap());
        let mut prev_raw = f64::INFINITY;
        let mut prev_certified = 0.0;
        for depth in [10u64, 100, 1000] {
            let e = lower_bound_firework(&s, 1, depth);
            assert!(e.truncated_value <= prev_raw + 1e-15);
            prev_raw = e.truncated_value;
            if e.rigor == Rigor::Rigorous {
                assert!(e.value + 1e-15 >= prev_certified);
                prev_certified = e.value;
            }
        }
    }

    #[test]
    fn upper_bound_examples() {
        // {0:1/2, 1:1/2} at depth 1: 1 - 1/2 - 1/2·1/2 = 1/4.
        let e = upper_bound_firework_homogeneous(&half_half(), 1).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);

        let e = upper_bound_firework_homogeneous(&RadiusDistribution::point_mass(0), 1).unwrap();
        assert_eq!(e.value, 0.0);

        // power law α=2 at depth 1: 1 - Z - (Z/4)·Z, frozen from the
        // numeric oracle.
        let e =
            upper_bound_firework_homogeneous(&RadiusDistribution::power_law(2.0).unwrap(), 1)
                .unwrap();
        assert!((e.value - 0.2996790578538143).abs() < 1e-9);
    }

    #[test]
    fn upper_bound_monotone_in_depth() {
        for dist in [half_half(), RadiusDistribution::power_law(2.0).unwrap()] {
            let mut prev = f64::INFINITY;
            for depth in [1u64, 2, 5, 10, 100, 1000] {
                let e = upper_bound_firework_homogeneous(&dist, depth).unwrap();
                assert!(e.value <= prev + 1e-15);
                prev = e.value;
            }
        }
    }

    #[test]
    fn heterogeneous_upper_bound_examples() {
        // ex41: every summand is b_{n-1}, so the bound is n·b_{n-1}.
        let b = BSequence::log_harmonic(1.0).unwrap();
        let s = DistributionSchedule::example(ExampleKind::Ex41, b.clone());
        for n in [1u64, 2, 5, 17, 120] {
            let got = upper_bound_reach_heterogeneous(&s, n);
            let want = (n as f64 * b.value(n - 1)).min(1.0);
            assert!((got - want).abs() < 1e-12, "n={n}: {got} vs {want}");
        }

        // ex43: the sum collapses to Σ_{k=⌈n/2⌉}^{n-1} b_k.
        let s = DistributionSchedule::example(ExampleKind::Ex43, b.clone());
        for n in [2u64, 3, 8, 41, 200] {
            let got = upper_bound_reach_heterogeneous(&s, n);
            let lo = n.div_ceil(2);
            let want: f64 = (lo..n).map(|k| b.value(k)).sum();
            assert!((got - want.min(1.0)).abs() < 1e-12, "n={n}");
        }

        // n=1 is just P(R_0 ≥ 1).
        let s = DistributionSchedule::homogeneous(half_half());
        assert!((upper_bound_reach_heterogeneous(&s, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sandwich_upper_vs_exact_reach() {
        // upper bound at depth 50 dominates the reach product at n = 50
        // (reference values: α=1.5 gives 0.5393 vs 0.3300).
        for dist in [
            half_half(),
            RadiusDistribution::geometric(0.5).unwrap(),
            RadiusDistribution::power_law(2.0).unwrap(),
            RadiusDistribution::power_law(1.5).unwrap(),
        ] {
            let s = DistributionSchedule::homogeneous(dist.clone());
            let upper = upper_bound_firework_homogeneous(&dist, 50).unwrap().value;
            let reach = super::super::exact_reach_prob(&s, 1, 50);
            assert!(upper >= reach, "{}: {upper} < {reach}", dist.describe());
        }
    }
}
