//! Nonincreasing null sequences b_0 > b_1 > ... → 0 with b_0 < 1, used to
//! parameterize the heterogeneous schedule families.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Terms probed when validating a user-supplied table.
const TABLE_PROBE: usize = 100_000;

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Clone, Debug)]
enum Family {
    /// b_n = c / ((n+2) ln(n+2)); Σ b_n diverges, n·b_n → 0.
    LogHarmonic { c: f64 },
    /// b_n = c / (n+2)^2; Σ b_n converges, n·b_n → 0.
    InverseSquare { c: f64 },
    /// Explicit table, zero beyond the last entry.
    Table(Arc<Vec<f64>>),
}

/// A nonincreasing sequence convergent to 0 with b_0 < 1.
#[derive(Clone, Debug)]
pub struct BSequence {
    family: Family,
}

impl BSequence {
    /// b_n = c / ((n+2) ln(n+2)). Requires 0 < c < 2 ln 2 so that b_0 < 1.
    pub fn log_harmonic(c: f64) -> Result<Self> {
        if c.is_nan() || c <= 0.0 || c >= 2.0 * LN2 {
            return Err(Error::invalid_parameter(
                "c",
                format!("log-harmonic scale must lie in (0, 2 ln 2 ≈ 1.3863), got {c}"),
            ));
        }
        Ok(BSequence {
            family: Family::LogHarmonic { c },
        })
    }

    /// b_n = c / (n+2)^2. Requires 0 < c < 4 so that b_0 < 1.
    pub fn inverse_square(c: f64) -> Result<Self> {
        if c.is_nan() || c <= 0.0 || c >= 4.0 {
            return Err(Error::invalid_parameter(
                "c",
                format!("inverse-square scale must lie in (0, 4), got {c}"),
            ));
        }
        Ok(BSequence {
            family: Family::InverseSquare { c },
        })
    }

    /// Explicit values; b_n = 0 past the end of the table. Validated over
    /// the table (nonincreasing, nonnegative, b_0 < 1) up to the probe cap.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid_parameter("values", "table must be nonempty"));
        }
        if values[0].is_nan() || values[0] >= 1.0 {
            return Err(Error::invalid_parameter(
                "values",
                format!("b_0 must be < 1, got {}", values[0]),
            ));
        }
        let probe = values.len().min(TABLE_PROBE);
        for i in 0..probe {
            let v = values[i];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid_parameter(
                    "values",
                    format!("b_{i} = {v} is not a finite nonnegative value"),
                ));
            }
            if i > 0 && v > values[i - 1] {
                return Err(Error::invalid_parameter(
                    "values",
                    format!("sequence increases at index {i}: {} -> {v}", values[i - 1]),
                ));
            }
        }
        Ok(BSequence {
            family: Family::Table(Arc::new(values)),
        })
    }

    pub fn value(&self, n: u64) -> f64 {
        match &self.family {
            Family::LogHarmonic { c } => {
                let x = (n + 2) as f64;
                c / (x * x.ln())
            }
            Family::InverseSquare { c } => {
                let x = (n + 2) as f64;
                c / (x * x)
            }
            Family::Table(values) => {
                if (n as usize) < values.len() {
                    values[n as usize]
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether Σ b_n = ∞, known analytically per family.
    pub fn sum_diverges(&self) -> bool {
        match &self.family {
            Family::LogHarmonic { .. } => true,
            Family::InverseSquare { .. } => false,
            Family::Table(_) => false,
        }
    }

    /// Whether lim n·b_n = 0, known analytically per family. True for all
    /// built-in families and for finite tables.
    pub fn n_times_b_vanishes(&self) -> bool {
        true
    }

    /// Σ_{n=lo}^{hi-1} b_n (compensated).
    pub fn partial_sum(&self, lo: u64, hi: u64) -> f64 {
        let mut acc = KahanSum::new();
        for n in lo..hi {
            acc.add(self.value(n));
        }
        acc.value()
    }

    /// Certified upper bound on Σ_{n≥from} b_n, when the family admits one.
    /// Inverse-square: Σ_{n≥from} c/(n+2)² ≤ c·∫_{from-1}^{∞} (x+2)^{-2} dx
    /// = c/(from+1). Absent for divergent families.
    pub fn tail_sum_upper(&self, from: u64) -> Option<f64> {
        match &self.family {
            Family::LogHarmonic { .. } => None,
            Family::InverseSquare { c } => Some(c / (from as f64 + 1.0)),
            Family::Table(values) => {
                let mut acc = KahanSum::new();
                for i in (from as usize)..values.len() {
                    acc.add(values[i]);
                }
                Some(acc.value().max(0.0))
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::LogHarmonic { .. } => "log_harmonic",
            Family::InverseSquare { .. } => "inverse_square",
            Family::Table(_) => "table",
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match &self.family {
            Family::LogHarmonic { c } | Family::InverseSquare { c } => Some(*c),
            Family::Table(_) => None,
        }
    }
}
