//! Index-to-law schedules: constant (homogeneous) or index-dependent
//! (heterogeneous) assignments n ↦ law of R_n.

use std::fmt;
use std::sync::Arc;

use super::{BSequence, RadiusDistribution};
use crate::error::{Error, Result};

/// The three built-in heterogeneous families.
///
/// With a nonincreasing null sequence b (b_0 < 1):
/// * `Ex41`: P(R_n = 0) = 1 - b_n, P(R_n = k) = b_{n+k-1} - b_{n+k};
///   tails P(R_n ≥ j) = b_{n+j-1}.
/// * `Ex42`: P(R_n = 0) = b_n, P(R_n = 1) = 1 - b_n.
/// * `Ex43`: P(R_n = 0) = 1 - b_n, P(R_n = n) = b_n; the index-0 law
///   collapses to the point mass at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleKind {
    Ex41,
    Ex42,
    Ex43,
}

impl ExampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleKind::Ex41 => "ex41",
            ExampleKind::Ex42 => "ex42",
            ExampleKind::Ex43 => "ex43",
        }
    }
}

#[derive(Clone)]
enum Inner {
    Homogeneous(RadiusDistribution),
    Example { kind: ExampleKind, b: BSequence },
    Table(Arc<Vec<RadiusDistribution>>),
    Custom(Arc<dyn Fn(u64) -> RadiusDistribution + Send + Sync>),
}

/// Deterministic map n ↦ law of R_n, immutable and shareable across
/// trial workers.
#[derive(Clone)]
pub struct DistributionSchedule {
    inner: Inner,
    label: String,
}

impl fmt::Debug for DistributionSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionSchedule")
            .field("label", &self.label)
            .finish()
    }
}

impl DistributionSchedule {
    /// Constant schedule: every index gets the same law.
    pub fn homogeneous(dist: RadiusDistribution) -> Self {
        let label = dist.describe();
        DistributionSchedule {
            inner: Inner::Homogeneous(dist),
            label,
        }
    }

    /// One of the built-in heterogeneous families over a validated
    /// b-sequence.
    pub fn example(kind: ExampleKind, b: BSequence) -> Self {
        let label = format!("{}({},c={:?})", kind.name(), b.family_name(), b.scale());
        DistributionSchedule {
            inner: Inner::Example { kind, b },
            label,
        }
    }

    /// Explicit per-index laws; indices past the end repeat the last law.
    pub fn from_laws(laws: Vec<RadiusDistribution>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::invalid_parameter(
                "laws",
                "schedule table must be nonempty",
            ));
        }
        Ok(DistributionSchedule {
            label: format!("table[{}]", laws.len()),
            inner: Inner::Table(Arc::new(laws)),
        })
    }

    /// Arbitrary generator; `f` must be deterministic in `n`.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> RadiusDistribution + Send + Sync + 'static,
    {
        DistributionSchedule {
            inner: Inner::Custom(Arc::new(f)),
            label: label.into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The law of R_n.
    pub fn law(&self, n: u64) -> RadiusDistribution {
        match &self.inner {
            Inner::Homogeneous(d) => d.clone(),
            Inner::Example { kind, b } => match kind {
                ExampleKind::Ex41 => RadiusDistribution::ex41_member(b.clone(), n),
                ExampleKind::Ex42 => RadiusDistribution::ex42_member(b.clone(), n),
                ExampleKind::Ex43 => RadiusDistribution::ex43_member(b.clone(), n),
            },
            Inner::Table(laws) => laws[(n as usize).min(laws.len() - 1)].clone(),
            Inner::Custom(f) => f(n),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.inner, Inner::Homogeneous(_))
    }

    pub fn homogeneous_law(&self) -> Option<&RadiusDistribution> {
        match &self.inner {
            Inner::Homogeneous(d) => Some(d),
            _ => None,
        }
    }

    /// Family and b-sequence for the built-in heterogeneous schedules.
    pub fn example_family(&self) -> Option<(ExampleKind, &BSequence)> {
        match &self.inner {
            Inner::Example { kind, b } => Some((*kind, b)),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}
