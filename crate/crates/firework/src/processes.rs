//! Generation-by-generation simulation of the firework and reverse
//! firework processes on a finite window [0, horizon].
//!
//! Randomness discipline: vertex i always consumes uniform-stream slot i,
//! one variate per vertex index. For the firework this works because the
//! activated set is always a contiguous prefix of the actionable vertices
//! (an explosion covers every vertex between its source and its reach), so
//! draws happen in increasing vertex order with no gaps. The reverse
//! simulator draws slots 0..=horizon up front (slot 0 is burnt: vertex 0
//! never explodes rightward). Identical streams therefore produce
//! identical trials in every mode, and survival indicators of the same
//! trial are exactly nested across horizons for the firework.

use std::sync::Arc;

use crate::distributions::DistributionSchedule;
use crate::error::{Error, Result};
use crate::stream::UniformStream;

/// Actionable vertex positions u_0 = 0 < u_1 < u_2 < ...
#[derive(Clone, Debug)]
pub struct VertexLayout {
    kind: LayoutKind,
    gap_bound: Option<u64>,
}

#[derive(Clone, Debug)]
enum LayoutKind {
    /// u_n = n.
    Identity,
    /// u_n = m·n.
    Arithmetic { m: u64 },
    /// Explicit positions.
    Table(Arc<Vec<u64>>),
}

impl VertexLayout {
    /// The homogeneous layout u_n = n.
    pub fn identity() -> Self {
        VertexLayout {
            kind: LayoutKind::Identity,
            gap_bound: Some(1),
        }
    }

    /// u_n = m·n for m ≥ 1.
    pub fn arithmetic(m: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidLayout("arithmetic step must be ≥ 1".into()));
        }
        Ok(VertexLayout {
            kind: LayoutKind::Arithmetic { m },
            gap_bound: Some(m),
        })
    }

    /// Explicit positions with an optional declared gap bound
    /// u_{n+1} - u_n ≤ m (checked up to the horizon at simulation time).
    pub fn from_positions(positions: Vec<u64>, gap_bound: Option<u64>) -> Result<Self> {
        if positions.first() != Some(&0) {
            return Err(Error::InvalidLayout("u_0 must be 0".into()));
        }
        for w in positions.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidLayout(format!(
                    "positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(VertexLayout {
            kind: LayoutKind::Table(Arc::new(positions)),
            gap_bound,
        })
    }

    /// Position of vertex n, if defined (tables are finite).
    pub fn position(&self, n: u64) -> Option<u64> {
        match &self.kind {
            LayoutKind::Identity => Some(n),
            LayoutKind::Arithmetic { m } => m.checked_mul(n),
            LayoutKind::Table(p) => p.get(n as usize).copied(),
        }
    }

    /// Checks the layout is defined up to `horizon` and obeys the declared
    /// gap bound there.
    pub fn validate_to(&self, horizon: u64) -> Result<()> {
        if self.position(horizon).is_none() {
            return Err(Error::InvalidLayout(format!(
                "layout undefined at index {horizon}"
            )));
        }
        if let Some(m) = self.gap_bound {
            if let LayoutKind::Table(p) = &self.kind {
                let end = (horizon as usize).min(p.len() - 1);
                for i in 0..end {
                    if p[i + 1] - p[i] > m {
                        return Err(Error::InvalidLayout(format!(
                            "gap bound {m} violated between vertices {i} and {}: {} -> {}",
                            i + 1,
                            p[i],
                            p[i + 1]
                        )));
                    }
                }
            }
            if let LayoutKind::Arithmetic { m: step } = &self.kind {
                if *step > m {
                    return Err(Error::InvalidLayout(format!(
                        "declared gap bound {m} below arithmetic step {step}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn gap_bound(&self) -> Option<u64> {
        self.gap_bound
    }

    /// The declared gap bound, or the actual maximum gap observed up to
    /// `horizon` (tables without a declared bound).
    pub fn effective_gap_bound(&self, horizon: u64) -> u64 {
        if let Some(m) = self.gap_bound {
            return m;
        }
        match &self.kind {
            LayoutKind::Identity => 1,
            LayoutKind::Arithmetic { m } => *m,
            LayoutKind::Table(p) => {
                let end = (horizon as usize + 1).min(p.len());
                p[..end]
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .max()
                    .unwrap_or(1)
            }
        }
    }

    /// Some(m) when u_n = m·n exactly (the equality case of the analytic
    /// reach product).
    pub fn arithmetic_step(&self) -> Option<u64> {
        match &self.kind {
            LayoutKind::Identity => Some(1),
            LayoutKind::Arithmetic { m } => Some(*m),
            LayoutKind::Table(_) => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            LayoutKind::Identity => "identity",
            LayoutKind::Arithmetic { .. } => "arithmetic",
            LayoutKind::Table(_) => "table",
        }
    }
}

/// Result of one simulated trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub survived_to_horizon: bool,
    pub rightmost_activated_index: u64,
    /// Present exactly when the trial did not survive; for a reverse trial
    /// stopped by the generation cap this holds the cap and
    /// `generation_cap_hit` is set.
    pub extinction_generation: Option<u64>,
    pub activated_count: u64,
    pub generation_cap_hit: bool,
}

/// Diagnostic record of one trial: per-generation activations and the
/// sampled radii for every vertex touched (every vertex, in full mode).
#[derive(Clone, Debug)]
pub struct TrialTrace {
    /// `generations[t]` = vertex indices newly activated at time t;
    /// `generations[0] = [0]`.
    pub generations: Vec<Vec<u64>>,
    /// `radii[i]` = sampled radius of vertex i, if drawn.
    pub radii: Vec<Option<u64>>,
    /// Whether radii were drawn for every vertex index regardless of
    /// activation (diagnostic mode).
    pub full_radii: bool,
    pub generation_cap_hit: bool,
}

impl TrialTrace {
    fn with_capacity(horizon: u64) -> Self {
        TrialTrace {
            generations: Vec::new(),
            radii: vec![None; horizon as usize + 1],
            full_radii: false,
            generation_cap_hit: false,
        }
    }
}

fn draw_radius(schedule: &DistributionSchedule, i: u64, stream: &mut UniformStream) -> u64 {
    schedule
        .law(i)
        .sample(stream.next_unit())
        .expect("uniform stream variates lie in (0,1)")
}

/// One firework trial. Generation 0 activates vertex 0; each newly
/// activated vertex explodes once, activating every not-yet-activated
/// vertex within its rightward reach. Ends on extinction (no new
/// activation) or when vertex `horizon` activates.
pub fn simulate_firework(
    layout: &VertexLayout,
    schedule: &DistributionSchedule,
    horizon: u64,
    stream: &mut UniformStream,
) -> Result<TrialOutcome> {
    check_horizon(horizon)?;
    layout.validate_to(horizon)?;
    let mut radius_of = |i: u64| draw_radius(schedule, i, stream);
    Ok(run_firework(layout, horizon, &mut radius_of, None))
}

/// As [`simulate_firework`], also returning the trace of generations and
/// the radii of activated vertices.
pub fn simulate_firework_traced(
    layout: &VertexLayout,
    schedule: &DistributionSchedule,
    horizon: u64,
    stream: &mut UniformStream,
) -> Result<(TrialOutcome, TrialTrace)> {
    check_horizon(horizon)?;
    layout.validate_to(horizon)?;
    let mut trace = TrialTrace::with_capacity(horizon);
    let mut radius_of = |i: u64| draw_radius(schedule, i, stream);
    let outcome = run_firework(layout, horizon, &mut radius_of, Some(&mut trace));
    Ok((outcome, trace))
}

/// Diagnostic firework trial: radii are drawn for **every** vertex
/// 0..=horizon (slot i for vertex i) before the dynamics run. The outcome
/// is identical to the non-diagnostic modes on the same stream; the trace
/// additionally supports renewal-event queries.
pub fn simulate_firework_diagnostic(
    layout: &VertexLayout,
    schedule: &DistributionSchedule,
    horizon: u64,
    stream: &mut UniformStream,
) -> Result<(TrialOutcome, TrialTrace)> {
    check_horizon(horizon)?;
    layout.validate_to(horizon)?;
    let radii: Vec<u64> = (0..=horizon)
        .map(|i| draw_radius(schedule, i, stream))
        .collect();
    let mut trace = TrialTrace::with_capacity(horizon);
    trace.radii = radii.iter().map(|&r| Some(r)).collect();
    trace.full_radii = true;
    let mut radius_of = |i: u64| radii[i as usize];
    let outcome = run_firework(layout, horizon, &mut radius_of, Some(&mut trace));
    Ok((outcome, trace))
}

fn check_horizon(horizon: u64) -> Result<()> {
    if horizon < 1 {
        return Err(Error::invalid_parameter("horizon", "must be ≥ 1"));
    }
    Ok(())
}

/// Core firework dynamics. `radius_of` is called once per activated vertex
/// in strictly increasing vertex order (slot discipline).
fn run_firework(
    layout: &VertexLayout,
    horizon: u64,
    radius_of: &mut dyn FnMut(u64) -> u64,
    mut trace: Option<&mut TrialTrace>,
) -> TrialOutcome {
    let r0 = radius_of(0);
    if let Some(t) = trace.as_deref_mut() {
        t.radii[0] = Some(r0);
        t.generations.push(vec![0]);
    }
    let u0 = layout.position(0).expect("validated");
    let mut reach = u0.saturating_add(r0);
    let mut last = 0u64;
    let mut count = 1u64;
    let mut gen = 0u64;
    loop {
        // Explosions through generation `gen` reach up to `reach`; collect
        // the next generation against that fixed threshold. The new
        // generation is the contiguous index range (gen_start, last].
        let gen_start = last;
        let mut new_reach = reach;
        let mut i = last + 1;
        let mut survived = false;
        while i <= horizon {
            let ui = layout.position(i).expect("validated to horizon");
            if ui > reach {
                break;
            }
            count += 1;
            last = i;
            if i >= horizon {
                survived = true;
                break;
            }
            let ri = radius_of(i);
            if let Some(t) = trace.as_deref_mut() {
                t.radii[i as usize] = Some(ri);
            }
            new_reach = new_reach.max(ui.saturating_add(ri));
            i += 1;
        }
        if survived {
            if let Some(t) = trace.as_deref_mut() {
                t.generations.push((gen_start + 1..=last).collect());
            }
            return TrialOutcome {
                survived_to_horizon: true,
                rightmost_activated_index: last,
                extinction_generation: None,
                activated_count: count,
                generation_cap_hit: false,
            };
        }
        if last == gen_start {
            return TrialOutcome {
                survived_to_horizon: false,
                rightmost_activated_index: last,
                extinction_generation: Some(gen),
                activated_count: count,
                generation_cap_hit: false,
            };
        }
        if let Some(t) = trace.as_deref_mut() {
            t.generations.push((gen_start + 1..=last).collect());
        }
        gen += 1;
        reach = new_reach;
    }
}

/// One-pass frontier recursion M ← max(M, u_i + R_i) over the same radii;
/// returns the rightmost activated index. Must agree with the
/// generation-faithful dynamics (equivalence property).
pub fn firework_rightmost_from_radii(layout: &VertexLayout, radii: &[u64], horizon: u64) -> u64 {
    let mut reach = layout.position(0).expect("u_0").saturating_add(radii[0]);
    let mut last = 0u64;
    let mut i = 1u64;
    while i <= horizon {
        let ui = layout.position(i).expect("within horizon");
        if ui > reach {
            break;
        }
        last = i;
        reach = reach.max(ui.saturating_add(radii[i as usize]));
        i += 1;
    }
    last
}

/// Fixpoint active set of the reverse process on [0, len-1] given radii
/// (`radii[0]` is ignored: vertex 0 starts active). Vertex k activates iff
/// some active vertex lies in [k - R_k, k); computed in one left-to-right
/// pass, which is exact because activation of k depends only on vertices
/// below k.
pub fn reverse_closure(radii: &[u64]) -> Vec<bool> {
    let mut active = vec![false; radii.len()];
    active[0] = true;
    let mut rightmost = 0u64;
    for k in 1..radii.len() as u64 {
        if rightmost.saturating_add(radii[k as usize]) >= k {
            active[k as usize] = true;
            rightmost = k;
        }
    }
    active
}

/// One reverse-firework trial on the window [0, horizon]. Radii for
/// vertices 1..=horizon are drawn up front (slot k for vertex k; slot 0 is
/// burnt). At each generation every inactive k ≤ horizon with an active
/// vertex in [k - R_k, k) activates. Ends at a fixpoint (extinction), when
/// vertex `horizon` activates (survival), or at `generation_cap` (default:
/// horizon), reported via `generation_cap_hit`.
///
/// Vertices beyond the horizon never participate, which biases
/// survival-to-horizon downward (conservative window convention).
pub fn simulate_reverse(
    schedule: &DistributionSchedule,
    horizon: u64,
    generation_cap: Option<u64>,
    stream: &mut UniformStream,
) -> Result<TrialOutcome> {
    let (outcome, _) = reverse_trial(schedule, horizon, generation_cap, stream, false)?;
    Ok(outcome)
}

/// As [`simulate_reverse`], returning the full trace (reverse radii are
/// always drawn for every vertex, so the trace has full radii).
pub fn simulate_reverse_traced(
    schedule: &DistributionSchedule,
    horizon: u64,
    generation_cap: Option<u64>,
    stream: &mut UniformStream,
) -> Result<(TrialOutcome, TrialTrace)> {
    let (outcome, trace) = reverse_trial(schedule, horizon, generation_cap, stream, true)?;
    Ok((outcome, trace.expect("trace requested")))
}

/// Survival indicator only; skips the generation replay. Agrees exactly
/// with [`simulate_reverse`] on the same stream (closure equivalence).
pub fn reverse_survives(
    schedule: &DistributionSchedule,
    horizon: u64,
    stream: &mut UniformStream,
) -> Result<bool> {
    check_horizon(horizon)?;
    let radii = draw_reverse_radii(schedule, horizon, stream);
    Ok(reverse_closure(&radii)[horizon as usize])
}

fn draw_reverse_radii(
    schedule: &DistributionSchedule,
    horizon: u64,
    stream: &mut UniformStream,
) -> Vec<u64> {
    let _burnt = stream.next_unit(); // slot 0: vertex 0 has no rightward role
    let mut radii = Vec::with_capacity(horizon as usize + 1);
    radii.push(0);
    for k in 1..=horizon {
        radii.push(draw_radius(schedule, k, stream));
    }
    radii
}

fn reverse_trial(
    schedule: &DistributionSchedule,
    horizon: u64,
    generation_cap: Option<u64>,
    stream: &mut UniformStream,
    want_trace: bool,
) -> Result<(TrialOutcome, Option<TrialTrace>)> {
    check_horizon(horizon)?;
    let cap = generation_cap.unwrap_or(horizon);
    if cap < 1 {
        return Err(Error::invalid_parameter("generation_cap", "must be ≥ 1"));
    }
    let radii = draw_reverse_radii(schedule, horizon, stream);

    // A closure on [0, horizon] stabilizes within horizon generations, so
    // the cap can only bind when it is below the horizon.
    let closure = reverse_closure(&radii);
    let candidates: Vec<u64> = (1..=horizon).filter(|&k| closure[k as usize]).collect();

    let mut active_count = 1u64;
    let mut rightmost = 0u64;
    let mut newly: Vec<u64> = vec![0];
    let mut gens: Vec<Vec<u64>> = vec![vec![0]];
    let mut remaining = candidates;
    let mut survived = false;
    let mut extinction: Option<u64> = None;
    let mut cap_hit = false;
    let mut t = 0u64;
    loop {
        if t == cap {
            // Stopped before observing a fixpoint or a horizon activation.
            // Unreachable for caps ≥ horizon: a dead closure on [0, horizon]
            // goes quiet within horizon generations.
            cap_hit = true;
            extinction = Some(cap);
            break;
        }
        t += 1;
        let mut next: Vec<u64> = Vec::new();
        remaining.retain(|&k| {
            let idx = newly.partition_point(|&v| v < k);
            if idx > 0 {
                let v = newly[idx - 1];
                if v.saturating_add(radii[k as usize]) >= k {
                    next.push(k);
                    return false;
                }
            }
            true
        });
        if next.is_empty() {
            extinction = Some(t);
            break;
        }
        active_count += next.len() as u64;
        rightmost = rightmost.max(*next.last().expect("nonempty"));
        gens.push(next.clone());
        if rightmost >= horizon {
            survived = true;
            break;
        }
        newly = next;
    }

    let outcome = TrialOutcome {
        survived_to_horizon: survived,
        rightmost_activated_index: rightmost,
        extinction_generation: if survived { None } else { extinction },
        activated_count: active_count,
        generation_cap_hit: cap_hit,
    };
    let trace = want_trace.then(|| TrialTrace {
        generations: gens,
        radii: radii
            .iter()
            .enumerate()
            .map(|(i, &r)| (i > 0).then_some(r))
            .collect(),
        full_radii: true,
        generation_cap_hit: cap_hit,
    });
    Ok((outcome, trace))
}

/// Whether the renewal event B_n = {u_n > u_x + R_x for all x < n} holds
/// in a trial. Requires a diagnostic trace (full radii).
pub fn renewal_event_indicator(trace: &TrialTrace, layout: &VertexLayout, n: u64) -> Result<bool> {
    if !trace.full_radii {
        return Err(Error::Unsupported(
            "renewal event queries need a diagnostic trace with full radii".into(),
        ));
    }
    if (n as usize) > trace.radii.len() {
        return Err(Error::invalid_parameter(
            "n",
            format!("trace holds radii for {} vertices", trace.radii.len()),
        ));
    }
    let un = layout
        .position(n)
        .ok_or_else(|| Error::InvalidLayout(format!("no position for vertex {n}")))?;
    for x in 0..n {
        let ux = layout.position(x).expect("below n");
        let rx = trace.radii[x as usize].ok_or_else(|| {
            Error::Unsupported(format!("radius of vertex {x} missing from trace"))
        })?;
        if ux.saturating_add(rx) >= un {
            return Ok(false);
        }
    }
    Ok(true)
}
