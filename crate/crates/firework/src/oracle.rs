//! Exact brute-force reach probabilities on small truncated instances:
//! ground truth for the simulators and the closed forms.
//!
//! Infinite-support laws are cut to finite supports with the discarded
//! mass tracked per index; results come back as intervals [lo, hi] that
//! bracket the true probability, never as silently truncated points.

use crate::distributions::DistributionSchedule;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::processes::VertexLayout;

/// State-space budget for one enumeration.
const ENUMERATION_BUDGET: u128 = 10_000_000;

/// Per-index tail mass kept when truncating an infinite-support law.
const TRUNCATION_EPS: f64 = 1e-6;

/// A schedule cut to finite per-index supports, with the discarded tail
/// mass recorded.
#[derive(Clone, Debug)]
pub struct TruncatedSchedule {
    supports: Vec<IndexSupport>,
}

#[derive(Clone, Debug)]
pub struct IndexSupport {
    pub values: Vec<u64>,
    pub probs: Vec<f64>,
    pub truncated_mass: f64,
}

impl TruncatedSchedule {
    /// Truncates `schedule` for vertex indices 0..count. Finite-support
    /// laws keep their exact support (zero truncated mass); others keep
    /// values until the remaining tail drops below 1e-6.
    pub fn from_schedule(schedule: &DistributionSchedule, count: u64) -> Self {
        Self::from_schedule_with_eps(schedule, count, TRUNCATION_EPS)
    }

    /// As [`TruncatedSchedule::from_schedule`] with an explicit per-index
    /// tail cutoff (heavy-tailed laws need a coarser cutoff to fit the
    /// enumeration budget; the wider bracket stays honest).
    pub fn from_schedule_with_eps(
        schedule: &DistributionSchedule,
        count: u64,
        tail_eps: f64,
    ) -> Self {
        let supports = (0..count)
            .map(|i| {
                let law = schedule.law(i);
                let mut values = Vec::new();
                let mut probs = Vec::new();
                if let Some(support) = law.finite_support() {
                    for (v, p) in support {
                        if p > 0.0 {
                            values.push(v);
                            probs.push(p);
                        }
                    }
                    IndexSupport {
                        values,
                        probs,
                        truncated_mass: 0.0,
                    }
                } else {
                    let mut k = 0u64;
                    while law.tail(k) > tail_eps {
                        let p = law.pmf(k);
                        if p > 0.0 {
                            values.push(k);
                            probs.push(p);
                        }
                        k += 1;
                    }
                    IndexSupport {
                        values,
                        probs,
                        truncated_mass: law.tail(k),
                    }
                }
            })
            .collect();
        TruncatedSchedule { supports }
    }

    /// Builds directly from per-index (value, prob) lists; probabilities at
    /// each index must sum to 1 (exact instances for the oracle battery).
    pub fn from_supports(supports: Vec<Vec<(u64, f64)>>) -> Result<Self> {
        let supports = supports
            .into_iter()
            .enumerate()
            .map(|(i, entries)| {
                let total: f64 = entries.iter().map(|e| e.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidDistribution(format!(
                        "support {i} sums to {total}"
                    )));
                }
                let (values, probs) = entries.into_iter().filter(|e| e.1 > 0.0).unzip();
                Ok(IndexSupport {
                    values,
                    probs,
                    truncated_mass: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSchedule { supports })
    }

    pub fn index_count(&self) -> u64 {
        self.supports.len() as u64
    }

    pub fn support(&self, i: u64) -> &IndexSupport {
        &self.supports[i as usize]
    }

    /// Probability that at least one radius falls outside its kept
    /// support: 1 - Π (1 - tm_i).
    pub fn total_truncated_mass(&self) -> f64 {
        let mut ln = 0.0f64;
        for s in &self.supports {
            ln += (-s.truncated_mass).ln_1p();
        }
        (-ln.exp_m1()).max(0.0)
    }

    fn state_count(&self, indices: std::ops::Range<u64>) -> u128 {
        indices
            .map(|i| self.supports[i as usize].values.len().max(1) as u128)
            .product()
    }
}

/// Interval bracketing a true probability, with the truncated mass that
/// widens it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityInterval {
    pub lo: f64,
    pub hi: f64,
    pub truncated_mass: f64,
}

impl ProbabilityInterval {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Mixed-radix odometer over per-index supports; no recursion, assignment
/// probabilities accumulated by compensated summation in the callers.
struct Odometer<'a> {
    ts: &'a TruncatedSchedule,
    start: u64,
    digits: Vec<usize>,
    radii: Vec<u64>,
    done: bool,
}

impl<'a> Odometer<'a> {
    fn new(ts: &'a TruncatedSchedule, start: u64, end: u64) -> Self {
        let n = (end - start) as usize;
        let radii = (start..end)
            .map(|i| {
                let s = ts.support(i);
                *s.values.first().expect("nonempty support")
            })
            .collect();
        Odometer {
            ts,
            start,
            digits: vec![0; n],
            radii,
            done: false,
        }
    }

    fn probability(&self) -> f64 {
        let mut p = 1.0f64;
        for (off, &d) in self.digits.iter().enumerate() {
            p *= self.ts.support(self.start + off as u64).probs[d];
        }
        p
    }

    fn advance(&mut self) {
        for off in 0..self.digits.len() {
            let s = self.ts.support(self.start + off as u64);
            if self.digits[off] + 1 < s.values.len() {
                self.digits[off] += 1;
                self.radii[off] = s.values[self.digits[off]];
                return;
            }
            self.digits[off] = 0;
            self.radii[off] = s.values[0];
        }
        self.done = true;
    }
}

fn check_empty_supports(ts: &TruncatedSchedule, indices: std::ops::Range<u64>) -> Result<()> {
    for i in indices {
        if ts.support(i).values.is_empty() {
            return Err(Error::InvalidDistribution(format!(
                "support at index {i} is empty after truncation"
            )));
        }
    }
    Ok(())
}

/// Exact P(vertex n activated) for the firework process, bracketed by the
/// truncated mass. Enumerates all radius assignments for vertices 0..n.
pub fn brute_force_firework_reach(
    ts: &TruncatedSchedule,
    layout: &VertexLayout,
    n: u64,
) -> Result<ProbabilityInterval> {
    if n < 1 {
        return Err(Error::invalid_parameter("n", "must be ≥ 1"));
    }
    if ts.index_count() < n {
        return Err(Error::invalid_parameter(
            "n",
            format!("schedule truncated to {} indices", ts.index_count()),
        ));
    }
    layout.validate_to(n)?;
    let required = ts.state_count(0..n);
    if required > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    check_empty_supports(ts, 0..n)?;

    let un = layout.position(n).expect("validated");
    let mut reached = KahanSum::new();
    let mut odo = Odometer::new(ts, 0, n);
    while !odo.done {
        // Frontier recursion over vertices 0..n-1.
        let mut reach = layout.position(0).unwrap().saturating_add(odo.radii[0]);
        let mut i = 1u64;
        while i < n {
            let ui = layout.position(i).expect("validated");
            if ui > reach {
                break;
            }
            reach = reach.max(ui.saturating_add(odo.radii[i as usize]));
            i += 1;
        }
        if un <= reach {
            reached.add(odo.probability());
        }
        odo.advance();
    }
    let truncated = ts_partial_truncated_mass(ts, 0..n);
    let lo = reached.value().clamp(0.0, 1.0);
    Ok(ProbabilityInterval {
        lo,
        hi: (lo + truncated).min(1.0),
        truncated_mass: truncated,
    })
}

/// Exact P(vertex n activated) for the reverse process on [0, n],
/// enumerating radii of vertices 1..=n. The schedule truncation must
/// cover indices 1..=n (index 0 of `ts` is vertex 1).
pub fn brute_force_reverse_reach(ts: &TruncatedSchedule, n: u64) -> Result<ProbabilityInterval> {
    if n < 1 {
        return Err(Error::invalid_parameter("n", "must be ≥ 1"));
    }
    if ts.index_count() < n + 1 {
        return Err(Error::invalid_parameter(
            "n",
            format!(
                "need supports for vertices 1..={n}, schedule truncated to {}",
                ts.index_count()
            ),
        ));
    }
    let required = ts.state_count(1..n + 1);
    if required > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    check_empty_supports(ts, 1..n + 1)?;

    let mut reached = KahanSum::new();
    let mut odo = Odometer::new(ts, 1, n + 1);
    while !odo.done {
        // Left-to-right closure: vertex k active iff some active vertex
        // lies in [k - R_k, k).
        let mut rightmost = 0u64;
        let mut active_n = false;
        for k in 1..=n {
            if rightmost.saturating_add(odo.radii[(k - 1) as usize]) >= k {
                rightmost = k;
                if k == n {
                    active_n = true;
                }
            }
        }
        if active_n {
            reached.add(odo.probability());
        }
        odo.advance();
    }
    let truncated = ts_partial_truncated_mass(ts, 1..n + 1);
    let lo = reached.value().clamp(0.0, 1.0);
    Ok(ProbabilityInterval {
        lo,
        hi: (lo + truncated).min(1.0),
        truncated_mass: truncated,
    })
}

fn ts_partial_truncated_mass(ts: &TruncatedSchedule, indices: std::ops::Range<u64>) -> f64 {
    let mut ln = 0.0f64;
    for i in indices {
        ln += (-ts.support(i).truncated_mass).ln_1p();
    }
    (-ln.exp_m1()).max(0.0)
}

/// A randomized small instance: per-index finite supports over {0..3}
/// with a reach target n ≤ 6, derived deterministically from a seed.
#[derive(Clone, Debug)]
pub struct SmallInstance {
    pub truncated: TruncatedSchedule,
    pub schedule: DistributionSchedule,
    pub n: u64,
}

/// Deterministic generator for the randomized oracle battery.
pub fn random_small_instance(master_seed: u64, index: u64) -> SmallInstance {
    use crate::distributions::RadiusDistribution;
    use crate::stream::UniformStream;

    let mut stream = UniformStream::new(crate::stream::lane_seed(master_seed, index));
    let n = 2 + (stream.next_u64() % 5); // 2..=6
    let mut supports = Vec::new();
    let mut laws = Vec::new();
    for _ in 0..=n {
        // Dirichlet-style weights over {0,1,2,3}, floored away from zero so
        // every value stays in the support.
        let raw: Vec<f64> = (0..4).map(|_| 0.05 + stream.next_unit()).collect();
        let total: f64 = raw.iter().sum();
        let entries: Vec<(u64, f64)> = raw
            .iter()
            .enumerate()
            .map(|(v, w)| (v as u64, w / total))
            .collect();
        laws.push(RadiusDistribution::finite_table(&entries).expect("valid pmf"));
        supports.push(entries);
    }
    SmallInstance {
        truncated: TruncatedSchedule::from_supports(supports).expect("valid supports"),
        schedule: DistributionSchedule::from_laws(laws).expect("nonempty"),
        n,
    }
}

/// One golden-file row: an oracle value for a named small instance.
#[derive(Clone, Debug)]
pub struct GoldenRow {
    pub instance_id: String,
    pub process: &'static str,
    pub n: u64,
    pub lo: f64,
    pub hi: f64,
    pub truncated_mass: f64,
}

pub fn golden_rows_to_csv(rows: &[GoldenRow]) -> String {
    let mut out = String::from("instance_id,process,n,lo,hi,truncated_mass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.instance_id, r.process, r.n, r.lo, r.hi, r.truncated_mass
        ));
    }
    out
}
