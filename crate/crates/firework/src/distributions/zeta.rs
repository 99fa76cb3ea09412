//! Power-law normalization and tail sums.
//!
//! Everything here reduces to partial sums of Σ j^{-α}. The prefix is
//! accumulated directly with compensated summation; the remainder past a
//! cutoff m is the integral ∫ x^{-α} dx with the Euler-Maclaurin boundary
//! corrections, which keeps the absolute error below 1e-20 for every
//! cutoff used here (the plain integral bracket alone would need ~10^11
//! terms to reach 1e-13 at α close to 1).

use crate::numeric::KahanSum;

/// Terms summed directly before switching to the tail expansion.
const ZETA_DIRECT_TERMS: u64 = 20_000;

/// Σ_{j=m}^{∞} j^{-α} for m ≥ 1, via the Euler-Maclaurin expansion.
///
/// Absolute error is O(α³ m^{-α-3}); below 1e-13 for m ≥ 60 at any α > 1
/// and far below that for the cutoffs used by callers.
pub fn tail_sum_from(alpha: f64, m: u64) -> f64 {
    let m = m as f64;
    let integral = m.powf(1.0 - alpha) / (alpha - 1.0);
    let boundary = 0.5 * m.powf(-alpha);
    let first = alpha * m.powf(-alpha - 1.0) / 12.0;
    let third = alpha * (alpha + 1.0) * (alpha + 2.0) * m.powf(-alpha - 3.0) / 720.0;
    integral + boundary + first - third
}

/// ζ(α) for α > 1, to better than 1e-13 absolute error.
pub fn zeta(alpha: f64) -> f64 {
    debug_assert!(alpha > 1.0);
    let mut acc = KahanSum::new();
    for j in 1..=ZETA_DIRECT_TERMS {
        acc.add((j as f64).powf(-alpha));
    }
    acc.value() + tail_sum_from(alpha, ZETA_DIRECT_TERMS + 1)
}

/// Rigorous bracket for Σ_{j>n} j^{-α} from the integral comparison:
/// (n+1)^{1-α}/(α-1) ≤ Σ ≤ n^{1-α}/(α-1).
pub fn tail_sum_bracket(alpha: f64, n: u64) -> (f64, f64) {
    let lo = ((n + 1) as f64).powf(1.0 - alpha) / (alpha - 1.0);
    let hi = (n as f64).powf(1.0 - alpha) / (alpha - 1.0);
    (lo, hi)
}
