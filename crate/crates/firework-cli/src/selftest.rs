//! Built-in invariant suite behind `firework selftest`: quick versions of
//! the library's structural checks, one pass/fail line per check.

use std::path::PathBuf;

use firework::analytics;
use firework::distributions::{DistributionSchedule, RadiusDistribution};
use firework::experiment::{self, ExperimentConfig, ProcessKind};
use firework::oracle::{brute_force_firework_reach, TruncatedSchedule};
use firework::processes::{self, VertexLayout};
use firework::stream::UniformStream;

type Check = (&'static str, fn() -> Result<(), String>);

pub fn run(out: &Option<PathBuf>) -> Result<(), String> {
    let checks: &[Check] = &[
        ("stream-test-vectors", stream_vectors),
        ("pmf-tail-consistency", pmf_tail_consistency),
        ("power-law-bracket", power_law_bracket),
        ("alpha2-limit-anchor", alpha2_anchor),
        ("sampling-consistency", sampling_consistency),
        ("frontier-equivalence", frontier_equivalence),
        ("reverse-scan-invariance", reverse_scan_invariance),
        ("run-determinism", run_determinism),
        ("oracle-vs-product", oracle_vs_product),
        ("power-law-verdict-table", verdict_table),
    ];
    let mut report = String::new();
    let mut failed = 0usize;
    for (name, check) in checks {
        match check() {
            Ok(()) => report.push_str(&format!("ok    {name}\n")),
            Err(msg) => {
                failed += 1;
                report.push_str(&format!("FAIL  {name}: {msg}\n"));
            }
        }
    }
    report.push_str(&format!(
        "selftest: {}/{} checks passed\n",
        checks.len() - failed,
        checks.len()
    ));
    match out {
        Some(path) => std::fs::write(path, &report).map_err(|e| e.to_string())?,
        None => print!("{report}"),
    }
    if failed > 0 {
        Err(format!("{failed} selftest check(s) failed"))
    } else {
        Ok(())
    }
}

fn catalog() -> Vec<RadiusDistribution> {
    vec![
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).expect("valid"),
        RadiusDistribution::geometric(0.5).expect("valid"),
        RadiusDistribution::power_law(1.5).expect("valid"),
        RadiusDistribution::power_law(2.0).expect("valid"),
        RadiusDistribution::power_law(2.5).expect("valid"),
        RadiusDistribution::critical_tail(),
    ]
}

fn stream_vectors() -> Result<(), String> {
    let mut s = UniformStream::new(0);
    let got = s.next_u64();
    if got != 0x53175d61490b23df {
        return Err(format!("xoshiro256++ vector mismatch: {got:#x}"));
    }
    let mut s = UniformStream::new(42);
    let u = s.next_unit();
    if (u - 0.81430514512291).abs() > 1e-15 {
        return Err(format!("unit variate mismatch: {u}"));
    }
    Ok(())
}

fn pmf_tail_consistency() -> Result<(), String> {
    for d in catalog() {
        for k in 0..=2000u64 {
            let diff = d.tail(k) - d.tail(k + 1);
            if (d.pmf(k) - diff).abs() > 1e-12 {
                return Err(format!("{} at k={k}", d.describe()));
            }
        }
    }
    Ok(())
}

fn power_law_bracket() -> Result<(), String> {
    for alpha in [1.5, 2.0, 2.5] {
        let d = RadiusDistribution::power_law(alpha).expect("valid");
        let z = d.power_law_z().expect("power law");
        for n in 1..=2000u64 {
            let t = d.tail(n);
            let lo = z / ((alpha - 1.0) * ((n + 1) as f64).powf(alpha - 1.0));
            let hi = z / ((alpha - 1.0) * (n as f64).powf(alpha - 1.0));
            if !(lo <= t + 1e-15 && t <= hi + 1e-15) {
                return Err(format!("alpha={alpha} n={n}: {t} outside [{lo}, {hi}]"));
            }
        }
    }
    Ok(())
}

fn alpha2_anchor() -> Result<(), String> {
    let d = RadiusDistribution::power_law(2.0).expect("valid");
    let n = 10_000u64;
    let got = n as f64 * d.tail(n);
    let want = 0.6079271018540267;
    if (got - want).abs() > 1e-3 {
        return Err(format!("n·tail(n) = {got}, want {want} ± 1e-3"));
    }
    Ok(())
}

fn sampling_consistency() -> Result<(), String> {
    for d in [
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).expect("valid"),
        RadiusDistribution::power_law(2.0).expect("valid"),
    ] {
        let trials = 100_000u64;
        let mut counts = [0u64; 3];
        let ks = [1u64, 2, 5];
        let mut stream = UniformStream::new(0xA5A5);
        for _ in 0..trials {
            let r = d.sample(stream.next_unit()).expect("valid u");
            for (i, &k) in ks.iter().enumerate() {
                if r >= k {
                    counts[i] += 1;
                }
            }
        }
        for (i, &k) in ks.iter().enumerate() {
            let p = d.tail(k);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let got = counts[i] as f64 / trials as f64;
            if (got - p).abs() > 4.0 * sigma.max(1e-6) {
                return Err(format!("{} k={k}: {got} vs {p}", d.describe()));
            }
        }
    }
    Ok(())
}

fn frontier_equivalence() -> Result<(), String> {
    let layout = VertexLayout::identity();
    let sched = DistributionSchedule::homogeneous(
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.3), (2, 0.2)]).expect("valid"),
    );
    for trial in 0..2000u64 {
        let mut stream = UniformStream::for_trial(91, trial);
        let (out, trace) = processes::simulate_firework_diagnostic(&layout, &sched, 30, &mut stream)
            .expect("valid config");
        let radii: Vec<u64> = trace.radii.iter().map(|r| r.expect("full")).collect();
        let rightmost = processes::firework_rightmost_from_radii(&layout, &radii, 30);
        if rightmost != out.rightmost_activated_index {
            return Err(format!("trial {trial}: {rightmost} vs {:?}", out));
        }
    }
    Ok(())
}

fn reverse_scan_invariance() -> Result<(), String> {
    let sched = DistributionSchedule::homogeneous(
        RadiusDistribution::power_law(2.0).expect("valid"),
    );
    for trial in 0..200u64 {
        let mut s1 = UniformStream::for_trial(92, trial);
        let mut s2 = UniformStream::for_trial(92, trial);
        let full = processes::simulate_reverse(&sched, 40, None, &mut s1).expect("valid");
        let fast = processes::reverse_survives(&sched, 40, &mut s2).expect("valid");
        if full.survived_to_horizon != fast {
            return Err(format!("trial {trial}: closure and generations disagree"));
        }
    }
    Ok(())
}

fn run_determinism() -> Result<(), String> {
    let cfg = ExperimentConfig {
        process: ProcessKind::Firework,
        schedule: DistributionSchedule::homogeneous(
            RadiusDistribution::power_law(1.5).expect("valid"),
        ),
        layout: VertexLayout::identity(),
        horizon: 50,
        trials: 5000,
        seed: 1234,
        generation_cap: None,
        label: "selftest".into(),
    };
    let a = experiment::run_trials(&cfg).map_err(|e| e.to_string())?;
    let b = experiment::run_trials(&cfg).map_err(|e| e.to_string())?;
    if a.survivors != b.survivors {
        return Err(format!("{} vs {}", a.survivors, b.survivors));
    }
    Ok(())
}

fn oracle_vs_product() -> Result<(), String> {
    let s = DistributionSchedule::homogeneous(
        RadiusDistribution::finite_table(&[(0, 0.5), (1, 0.5)]).expect("valid"),
    );
    let ts = TruncatedSchedule::from_schedule(&s, 7);
    for n in 1..=6u64 {
        let iv = brute_force_firework_reach(&ts, &VertexLayout::identity(), n)
            .map_err(|e| e.to_string())?;
        let product = analytics::exact_reach_prob(&s, 1, n);
        if (iv.lo - product).abs() > 1e-10 {
            return Err(format!("n={n}: oracle {} vs product {product}", iv.lo));
        }
    }
    Ok(())
}

fn verdict_table() -> Result<(), String> {
    use analytics::Classification;
    for (alpha, want) in [
        (1.2, Classification::Survives),
        (1.5, Classification::Survives),
        (1.8, Classification::Survives),
        (2.0, Classification::Dies),
        (2.5, Classification::Dies),
        (3.0, Classification::Dies),
    ] {
        let d = RadiusDistribution::power_law(alpha).expect("valid");
        let v = analytics::classify_firework_homogeneous(&d);
        if v.classification != want {
            return Err(format!("firework alpha={alpha}: {:?}", v.classification));
        }
    }
    for (alpha, want) in [
        (1.5, Classification::SurvivesAlmostSurely),
        (2.0, Classification::SurvivesAlmostSurely),
        (2.5, Classification::Dies),
        (3.0, Classification::Dies),
    ] {
        let d = RadiusDistribution::power_law(alpha).expect("valid");
        let v = analytics::classify_reverse_homogeneous(&d);
        if v.classification != want {
            return Err(format!("reverse alpha={alpha}: {:?}", v.classification));
        }
    }
    Ok(())
}
