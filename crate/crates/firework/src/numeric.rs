//! Small numeric primitives shared across modules: compensated summation
//! and log-space product accumulation.

/// Neumaier-compensated accumulator for long sums of f64 terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// ln Π (1 - a_j) accumulated as Σ ln1p(-a_j). An a_j of 1 yields -inf,
/// i.e. a product of exactly zero.
pub fn ln_product_one_minus<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = 0.0f64;
    for a in values {
        debug_assert!((0.0..=1.0).contains(&a), "factor outside [0,1]: {a}");
        if a >= 1.0 {
            return f64::NEG_INFINITY;
        }
        acc += (-a).ln_1p();
    }
    acc
}

/// Clamps a probability-valued expression into [0, 1] to absorb rounding.
pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}
