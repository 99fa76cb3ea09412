//! Radius-of-influence laws: exact tail/pmf/mean arithmetic and
//! inverse-CDF sampling for the catalog distributions and the
//! heterogeneous schedule families.
//!
//! All built-in laws take values in the nonnegative integers. Queries are
//! exact to 1e-12 absolute error; sampling is a deterministic function of
//! the uniform variate (smallest k with P(R ≤ k) ≥ u).

mod bsequence;
mod schedule;
pub(crate) mod zeta;

pub use bsequence::BSequence;
pub use schedule::{DistributionSchedule, ExampleKind};

use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::numeric::{clamp_prob, KahanSum};

/// Largest k served by the power-law prefix-sum cache; deeper tail queries
/// switch to the closed tail expansion.
const POWER_LAW_CACHE_CAP: u64 = 1 << 21;

/// Sampled radii saturate here; beyond this the residual tail probability
/// is below any uniform variate the stream can produce.
const RADIUS_SATURATION: u64 = u64::MAX;

/// Mean of a radius law: finite value or +∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mean {
    Finite(f64),
    Infinite,
}

impl Mean {
    pub fn is_finite(&self) -> bool {
        matches!(self, Mean::Finite(_))
    }
}

/// Analytic value of lim n·P(R ≥ n), where known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RaabeLimit {
    Finite(f64),
    Infinite,
}

#[derive(Clone, Debug)]
struct PowerLaw {
    alpha: f64,
    zeta_alpha: f64,
    /// Normalizer Z_α = 1/ζ(α).
    z: f64,
    /// prefix[k] = Σ_{j=1}^{k} j^{-α}; prefix[0] = 0. Extended lazily.
    prefix: Arc<RwLock<Vec<f64>>>,
}

impl PowerLaw {
    fn new(alpha: f64) -> Self {
        let zeta_alpha = zeta::zeta(alpha);
        PowerLaw {
            alpha,
            zeta_alpha,
            z: 1.0 / zeta_alpha,
            prefix: Arc::new(RwLock::new(vec![0.0])),
        }
    }

    /// Runs `f` on the prefix array, extended to at least `min_len` entries
    /// (capped at the cache limit). Readers never block each other.
    fn with_prefix<T>(&self, min_len: usize, f: impl FnOnce(&[f64]) -> T) -> T {
        let min_len = min_len.min(POWER_LAW_CACHE_CAP as usize + 1);
        {
            let guard = self.prefix.read().expect("power-law cache poisoned");
            if guard.len() >= min_len {
                return f(&guard);
            }
        }
        let mut guard = self.prefix.write().expect("power-law cache poisoned");
        if guard.len() < min_len {
            let target = (guard.len() * 2)
                .max(min_len)
                .max(1024)
                .min(POWER_LAW_CACHE_CAP as usize + 1);
            let mut acc = KahanSum::new();
            acc.add(*guard.last().expect("cache never empty"));
            for j in guard.len()..target {
                acc.add((j as f64).powf(-self.alpha));
                guard.push(acc.value());
            }
        }
        f(&guard)
    }

    fn tail(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        if k <= POWER_LAW_CACHE_CAP {
            self.with_prefix(k as usize + 1, |p| clamp_prob(1.0 - self.z * p[k as usize]))
        } else {
            clamp_prob(self.z * zeta::tail_sum_from(self.alpha, k + 1))
        }
    }

    fn pmf(&self, k: u64) -> f64 {
        self.z / ((k + 1) as f64).powf(self.alpha)
    }

    fn mean(&self) -> Mean {
        if self.alpha > 2.0 {
            // E[R] = Σ_{k≥1} P(R ≥ k) = Z_α (ζ(α-1) - ζ(α)).
            Mean::Finite(self.z * (zeta::zeta(self.alpha - 1.0) - self.zeta_alpha))
        } else {
            Mean::Infinite
        }
    }

    fn sample(&self, u: f64) -> u64 {
        // Smallest k with P(R ≤ k) = 1 - tail(k+1) ≥ u; search on m = k+1.
        let ok = |m: u64| 1.0 - self.tail(m) >= u;
        if ok(1) {
            return 0;
        }
        // Gallop inside the cached range first.
        let mut lo = 1u64; // !ok(lo)
        let mut hi = 2u64;
        while hi <= POWER_LAW_CACHE_CAP && !ok(hi) {
            lo = hi;
            hi *= 2;
        }
        if hi <= POWER_LAW_CACHE_CAP {
            // Answer in (lo, hi]: smallest m with ok(m).
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi - 1;
        }
        // Deep tail: jump-start the bracket from the integral estimate
        // tail(m) ≈ Z/((α-1) m^(α-1)).
        let up = 1.0 - u;
        let est = (self.z / ((self.alpha - 1.0) * up)).powf(1.0 / (self.alpha - 1.0));
        if !est.is_finite() || est >= 1e18 {
            return RADIUS_SATURATION;
        }
        let mut lo = POWER_LAW_CACHE_CAP; // !ok(lo) by the gallop above
        let mut hi = (est as u64).saturating_mul(2).max(lo + 1);
        while !ok(hi) {
            lo = hi;
            match hi.checked_mul(2) {
                Some(next) if next < 4_000_000_000_000_000_000 => hi = next,
                _ => return RADIUS_SATURATION,
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi - 1
    }
}

#[derive(Clone, Debug)]
struct FiniteTable {
    values: Vec<u64>,
    pmf: Vec<f64>,
    /// cdf[i] = P(R ≤ values[i]), expressed as 1 - tails[i+1] so that
    /// sampling and tail queries agree bit for bit.
    cdf: Vec<f64>,
    /// tail[i] = P(R ≥ values[i]) = pmf[i] + pmf[i+1] + ...
    tails: Vec<f64>,
    mean: f64,
}

impl FiniteTable {
    fn new(entries: &[(u64, f64)]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution(
                "finite table must have at least one entry".into(),
            ));
        }
        let mut sorted: Vec<(u64, f64)> = entries.to_vec();
        sorted.sort_by_key(|e| e.0);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate support value {}",
                    w[0].0
                )));
            }
        }
        let mut total = KahanSum::new();
        for &(v, p) in &sorted {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability of value {v} is {p}"
                )));
            }
            total.add(p);
        }
        let total = total.value();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let values: Vec<u64> = sorted.iter().map(|e| e.0).collect();
        let pmf: Vec<f64> = sorted.iter().map(|e| e.1 / total).collect();
        let n = pmf.len();
        let mut tails = vec![0.0; n];
        let mut acc = KahanSum::new();
        for i in (0..n).rev() {
            acc.add(pmf[i]);
            tails[i] = clamp_prob(acc.value());
        }
        let cdf: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    1.0 - tails[i + 1]
                } else {
                    1.0
                }
            })
            .collect();
        let mean = values
            .iter()
            .zip(&pmf)
            .map(|(&v, &p)| v as f64 * p)
            .sum::<f64>();
        Ok(FiniteTable {
            values,
            pmf,
            cdf,
            tails,
            mean,
        })
    }

    fn tail(&self, k: u64) -> f64 {
        // P(R >= k): all mass sits at or above the smallest value.
        if k <= self.values[0] {
            return 1.0;
        }
        match self.values.binary_search(&k) {
            Ok(i) => self.tails[i],
            Err(i) if i < self.values.len() => self.tails[i],
            Err(_) => 0.0,
        }
    }

    fn pmf_at(&self, k: u64) -> f64 {
        match self.values.binary_search(&k) {
            Ok(i) => self.pmf[i],
            Err(_) => 0.0,
        }
    }

    fn sample(&self, u: f64) -> u64 {
        let i = self.cdf.partition_point(|&c| c < u);
        self.values[i.min(self.values.len() - 1)]
    }

    fn max_value(&self) -> u64 {
        *self.values.last().expect("nonempty")
    }
}

#[derive(Clone, Debug)]
enum Law {
    PowerLaw(PowerLaw),
    Geometric { q: f64 },
    FiniteTable(FiniteTable),
    CriticalTail,
    Ex41 { b: BSequence, index: u64 },
    Ex42 { b: BSequence, index: u64 },
    Ex43 { b: BSequence, index: u64 },
}

/// A probability law on the nonnegative integers with exact tail queries
/// and inverse-CDF sampling.
#[derive(Clone, Debug)]
pub struct RadiusDistribution {
    law: Law,
}

impl RadiusDistribution {
    /// Power law P(R = k) = Z_α/(k+1)^α. Requires α > 1.
    pub fn power_law(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::invalid_parameter(
                "alpha",
                format!("power law requires alpha > 1, got {alpha}"),
            ));
        }
        Ok(RadiusDistribution {
            law: Law::PowerLaw(PowerLaw::new(alpha)),
        })
    }

    /// Geometric-tailed law with P(R ≥ k) = q^k. Requires q ∈ (0, 1).
    pub fn geometric(q: f64) -> Result<Self> {
        if q.is_nan() || q <= 0.0 || q >= 1.0 {
            return Err(Error::invalid_parameter(
                "q",
                format!("geometric requires q in (0,1), got {q}"),
            ));
        }
        Ok(RadiusDistribution {
            law: Law::Geometric { q },
        })
    }

    /// Finite-support law from (value, probability) pairs.
    pub fn finite_table(entries: &[(u64, f64)]) -> Result<Self> {
        Ok(RadiusDistribution {
            law: Law::FiniteTable(FiniteTable::new(entries)?),
        })
    }

    /// Point mass at `k`.
    pub fn point_mass(k: u64) -> Self {
        RadiusDistribution {
            law: Law::FiniteTable(FiniteTable::new(&[(k, 1.0)]).expect("valid")),
        }
    }

    /// The law with P(R ≥ n) = 1/n for n ≥ 1 (so lim n·P(R ≥ n) = 1).
    pub fn critical_tail() -> Self {
        RadiusDistribution {
            law: Law::CriticalTail,
        }
    }

    pub(crate) fn ex41_member(b: BSequence, index: u64) -> Self {
        RadiusDistribution {
            law: Law::Ex41 { b, index },
        }
    }

    pub(crate) fn ex42_member(b: BSequence, index: u64) -> Self {
        RadiusDistribution {
            law: Law::Ex42 { b, index },
        }
    }

    pub(crate) fn ex43_member(b: BSequence, index: u64) -> Self {
        RadiusDistribution {
            law: Law::Ex43 { b, index },
        }
    }

    /// P(R ≥ k).
    pub fn tail(&self, k: u64) -> f64 {
        match &self.law {
            Law::PowerLaw(pl) => pl.tail(k),
            Law::Geometric { q } => {
                if k == 0 {
                    1.0
                } else {
                    q.powf(k as f64)
                }
            }
            Law::FiniteTable(ft) => ft.tail(k),
            Law::CriticalTail => {
                if k == 0 {
                    1.0
                } else {
                    1.0 / k as f64
                }
            }
            Law::Ex41 { b, index } => {
                if k == 0 {
                    1.0
                } else {
                    b.value(index + k - 1)
                }
            }
            Law::Ex42 { b, index } => match k {
                0 => 1.0,
                1 => 1.0 - b.value(*index),
                _ => 0.0,
            },
            Law::Ex43 { b, index } => {
                if k == 0 {
                    1.0
                } else if *index >= 1 && k <= *index {
                    b.value(*index)
                } else {
                    0.0
                }
            }
        }
    }

    /// P(R < x) for real x; at integer k this is 1 - tail(k).
    pub fn strict_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let k = x.ceil();
        if k >= u64::MAX as f64 {
            return 1.0;
        }
        clamp_prob(1.0 - self.tail(k as u64))
    }

    /// P(R = k).
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.law {
            Law::PowerLaw(pl) => pl.pmf(k),
            Law::Geometric { q } => q.powf(k as f64) * (1.0 - q),
            Law::FiniteTable(ft) => ft.pmf_at(k),
            Law::CriticalTail => {
                if k == 0 {
                    0.0
                } else {
                    let k = k as f64;
                    1.0 / k - 1.0 / (k + 1.0)
                }
            }
            _ => clamp_prob(self.tail(k) - self.tail(k + 1)),
        }
    }

    /// `E[R]`, analytically finite or infinite per kind; finite values to 1e-9.
    pub fn mean(&self) -> Mean {
        match &self.law {
            Law::PowerLaw(pl) => pl.mean(),
            Law::Geometric { q } => Mean::Finite(q / (1.0 - q)),
            Law::FiniteTable(ft) => Mean::Finite(ft.mean),
            Law::CriticalTail => Mean::Infinite,
            Law::Ex41 { b, index } => {
                if b.sum_diverges() {
                    Mean::Infinite
                } else {
                    // E[R] = Σ_{j≥1} tail(j) = Σ_{m≥index} b_m.
                    let far = index + 200_000;
                    let head = b.partial_sum(*index, far);
                    let rest = b.tail_sum_upper(far).unwrap_or(0.0);
                    Mean::Finite(head + rest)
                }
            }
            Law::Ex42 { b, index } => Mean::Finite(1.0 - b.value(*index)),
            Law::Ex43 { b, index } => Mean::Finite(*index as f64 * b.value(*index)),
        }
    }

    /// Inverse-CDF sample: the smallest k with P(R ≤ k) ≥ u. Deterministic
    /// in u. Rejects u outside the open interval (0, 1).
    pub fn sample(&self, u: f64) -> Result<u64> {
        if u.is_nan() || u <= 0.0 || u >= 1.0 {
            return Err(Error::invalid_parameter(
                "u",
                format!("uniform variate must lie in (0,1), got {u}"),
            ));
        }
        let up = 1.0 - u; // for closed-form candidate estimates only
        Ok(match &self.law {
            Law::PowerLaw(pl) => pl.sample(u),
            Law::Geometric { q } => {
                let cand = (up.ln() / q.ln()).ceil() - 1.0;
                let cand = if cand.is_finite() && cand > 0.0 {
                    cand as u64
                } else {
                    0
                };
                self.refine_sample(cand, u)
            }
            Law::FiniteTable(ft) => ft.sample(u),
            Law::CriticalTail => {
                let cand = (1.0 / up).ceil() - 1.0;
                let cand = if cand.is_finite() && cand > 0.0 {
                    if cand >= 1e18 {
                        return Ok(RADIUS_SATURATION);
                    }
                    cand as u64
                } else {
                    0
                };
                self.refine_sample(cand, u)
            }
            Law::Ex41 { b, index } => {
                // P(R ≤ k) = 1 - b(index + k).
                let ok = |k: u64| 1.0 - b.value(index + k) >= u;
                if ok(0) {
                    0
                } else {
                    let mut lo = 0u64; // !ok(lo)
                    let mut hi = 1u64;
                    while !ok(hi) {
                        lo = hi;
                        match hi.checked_mul(2) {
                            Some(next) if next < (1 << 62) => hi = next,
                            _ => return Ok(RADIUS_SATURATION),
                        }
                    }
                    while hi - lo > 1 {
                        let mid = lo + (hi - lo) / 2;
                        if ok(mid) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    hi
                }
            }
            Law::Ex42 { .. } => {
                if 1.0 - self.tail(1) >= u {
                    0
                } else {
                    1
                }
            }
            Law::Ex43 { index, .. } => {
                if *index == 0 || 1.0 - self.tail(1) >= u {
                    0
                } else {
                    *index
                }
            }
        })
    }

    /// Moves a closed-form candidate to the exact smallest k with
    /// P(R ≤ k) ≥ u, fixing off-by-a-few rounding in the candidate.
    fn refine_sample(&self, mut cand: u64, u: f64) -> u64 {
        while cand > 0 && 1.0 - self.tail(cand) >= u {
            cand -= 1;
        }
        while 1.0 - self.tail(cand + 1) < u {
            cand += 1;
        }
        cand
    }

    /// Analytic lim n·P(R ≥ n), where the kind admits one.
    pub fn raabe_limit(&self) -> Option<RaabeLimit> {
        match &self.law {
            Law::PowerLaw(pl) => Some(if pl.alpha < 2.0 {
                RaabeLimit::Infinite
            } else if pl.alpha == 2.0 {
                RaabeLimit::Finite(pl.z)
            } else {
                RaabeLimit::Finite(0.0)
            }),
            Law::Geometric { .. } | Law::FiniteTable(_) | Law::Ex42 { .. } | Law::Ex43 { .. } => {
                Some(RaabeLimit::Finite(0.0))
            }
            Law::CriticalTail => Some(RaabeLimit::Finite(1.0)),
            Law::Ex41 { b, .. } => {
                if b.n_times_b_vanishes() {
                    Some(RaabeLimit::Finite(0.0))
                } else {
                    None
                }
            }
        }
    }

    /// Whether P(R ≥ n) ≤ 1/(n-1) holds for all large n, known analytically.
    /// Only consulted when the limit above equals 1.
    pub fn critical_refinement_holds(&self) -> Option<bool> {
        match &self.law {
            Law::CriticalTail => Some(true),
            _ => None,
        }
    }

    /// Upper end of the support for finite-support laws.
    pub fn finite_support_max(&self) -> Option<u64> {
        match &self.law {
            Law::FiniteTable(ft) => Some(ft.max_value()),
            Law::Ex42 { .. } => Some(1),
            Law::Ex43 { index, .. } => Some(*index),
            _ => None,
        }
    }

    /// Full (value, probability) list for finite-support laws.
    pub fn finite_support(&self) -> Option<Vec<(u64, f64)>> {
        match &self.law {
            Law::FiniteTable(ft) => Some(
                ft.values
                    .iter()
                    .copied()
                    .zip(ft.pmf.iter().copied())
                    .collect(),
            ),
            Law::Ex42 { b, index } => {
                let p0 = b.value(*index);
                Some(vec![(0, p0), (1, 1.0 - p0)])
            }
            Law::Ex43 { b, index } => {
                if *index == 0 {
                    Some(vec![(0, 1.0)])
                } else {
                    let p = b.value(*index);
                    Some(vec![(0, 1.0 - p), (*index, p)])
                }
            }
            _ => None,
        }
    }

    /// Power-law exponent, when the law is a power law.
    pub fn power_law_alpha(&self) -> Option<f64> {
        match &self.law {
            Law::PowerLaw(pl) => Some(pl.alpha),
            _ => None,
        }
    }

    /// Normalizer Z_α for power laws.
    pub fn power_law_z(&self) -> Option<f64> {
        match &self.law {
            Law::PowerLaw(pl) => Some(pl.z),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.law {
            Law::PowerLaw(_) => "power_law",
            Law::Geometric { .. } => "geometric",
            Law::FiniteTable(_) => "finite",
            Law::CriticalTail => "critical_tail",
            Law::Ex41 { .. } => "ex41_member",
            Law::Ex42 { .. } => "ex42_member",
            Law::Ex43 { .. } => "ex43_member",
        }
    }

    pub fn describe(&self) -> String {
        match &self.law {
            Law::PowerLaw(pl) => format!("power_law(alpha={})", pl.alpha),
            Law::Geometric { q } => format!("geometric(q={q})"),
            Law::FiniteTable(ft) => {
                let body: Vec<String> = ft
                    .values
                    .iter()
                    .zip(&ft.pmf)
                    .map(|(v, p)| format!("{v}:{p}"))
                    .collect();
                format!("finite{{{}}}", body.join(","))
            }
            Law::CriticalTail => "critical_tail".into(),
            Law::Ex41 { index, .. } => format!("ex41[{index}]"),
            Law::Ex42 { index, .. } => format!("ex42[{index}]"),
            Law::Ex43 { index, .. } => format!("ex43[{index}]"),
        }
    }
}
