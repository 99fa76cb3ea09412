//! Cross-validation battery: drives the simulators, oracle, and bounds
//! against each other at larger scale than the test suite.
//!
//! Run with: cargo run -p firework --example cross_validate --release
use firework::analytics::{self, Rigor};
use firework::distributions::{BSequence, DistributionSchedule, ExampleKind, RadiusDistribution};
use firework::experiment::{self, ExperimentConfig, ProcessKind};
use firework::oracle::{brute_force_firework_reach, brute_force_reverse_reach, random_small_instance};
use firework::processes::VertexLayout;

fn main() {
    println!("cross-validation battery");
    // 1. Rigorous lower bound vs MC at depth 10^4 for alpha = 1.5.
    let dist = RadiusDistribution::power_law(1.5).unwrap();
    let schedule = DistributionSchedule::homogeneous(dist.clone());
    let lower = analytics::lower_bound_firework(&schedule, 1, 10_000);
    let cfg = ExperimentConfig {
        process: ProcessKind::Firework,
        schedule: schedule.clone(),
        layout: VertexLayout::identity(),
        horizon: 10_000,
        trials: 4000,
        seed: 99,
        generation_cap: None,
        label: "deep".into(),
    };
    let est = experiment::run_trials(&cfg).unwrap();
    println!("alpha=1.5: rigorous lower {} ({:?}) vs MC(h=1e4) {} [{}, {}]",
        lower.value, lower.rigor, est.p_hat, est.ci_lo, est.ci_hi);
    assert_eq!(lower.rigor, Rigor::Rigorous);
    assert!(lower.value <= est.ci_hi, "rigorous lower bound above CI");

    // 2. 60 extra random instances, both processes, 30k trials each.
    let mut worst = 0.0f64;
    for idx in 0..60u64 {
        let inst = random_small_instance(777, idx);
        let fw = brute_force_firework_reach(&inst.truncated, &VertexLayout::identity(), inst.n).unwrap();
        let cfg = ExperimentConfig {
            process: ProcessKind::Firework,
            schedule: inst.schedule.clone(),
            layout: VertexLayout::identity(),
            horizon: inst.n,
            trials: 30_000,
            seed: 1000 + idx,
            generation_cap: None,
            label: "b".into(),
        };
        let p = experiment::run_trials(&cfg).unwrap().p_hat;
        let sigma = (fw.lo * (1.0 - fw.lo) / 30_000.0).sqrt().max(1e-5);
        let dev = (p - fw.lo).abs() / sigma;
        worst = worst.max(dev);
        assert!(dev <= 4.5, "firework idx={idx}: {p} vs {} ({dev:.2}σ)", fw.lo);

        let rv = brute_force_reverse_reach(&inst.truncated, inst.n).unwrap();
        let cfg = ExperimentConfig { process: ProcessKind::Reverse, ..cfg };
        let p = experiment::run_trials(&cfg).unwrap().p_hat;
        let sigma = (rv.lo * (1.0 - rv.lo) / 30_000.0).sqrt().max(1e-5);
        let dev = (p - rv.lo).abs() / sigma;
        worst = worst.max(dev);
        assert!(dev <= 4.5, "reverse idx={idx}: {p} vs {} ({dev:.2}σ)", rv.lo);
    }
    println!("60-instance battery: worst deviation {:.2}σ", worst);

    // 3. Reverse MC for ex41 log-harmonic: vertex H active iff some k with
    //    R_k >= k - something... cross-check against oracle at n=6.
    let b = BSequence::log_harmonic(1.0).unwrap();
    let s41 = DistributionSchedule::example(ExampleKind::Ex41, b.clone());
    let ts = firework::oracle::TruncatedSchedule::from_schedule_with_eps(&s41, 7, 0.05);
    let rv = brute_force_reverse_reach(&ts, 6).unwrap();
    let cfg = ExperimentConfig {
        process: ProcessKind::Reverse,
        schedule: s41.clone(),
        layout: VertexLayout::identity(),
        horizon: 6,
        trials: 200_000,
        seed: 4141,
        generation_cap: None,
        label: "ex41".into(),
    };
    let p = experiment::run_trials(&cfg).unwrap().p_hat;
    println!("ex41 reverse n=6: MC {} vs oracle [{}, {}] (trunc {})", p, rv.lo, rv.hi, rv.truncated_mass);
    let sigma = (rv.lo * (1.0 - rv.lo) / 200_000.0).sqrt();
    assert!(p >= rv.lo - 4.0 * sigma && p <= rv.hi + 4.0 * sigma);

    // 4. Firework MC for ex42 inverse-square vs its exact chain product:
    //    support {0,1} laws: P(V_n) = Π_{k=1..n} P(R_{k-1} = 1)? No - the
    //    chain needs every consecutive step: P(V_n) = Π_{k=0}^{n-1} (1-b_k).
    let s42 = DistributionSchedule::example(ExampleKind::Ex42, BSequence::inverse_square(1.0).unwrap());
    let n = 30u64;
    let exact: f64 = (0..n).map(|k| (1.0 - 1.0 / (((k + 2) * (k + 2)) as f64)).ln()).sum::<f64>().exp();
    let cfg = ExperimentConfig {
        process: ProcessKind::Firework,
        schedule: s42,
        layout: VertexLayout::identity(),
        horizon: n,
        trials: 200_000,
        seed: 4242,
        generation_cap: None,
        label: "ex42".into(),
    };
    let p = experiment::run_trials(&cfg).unwrap().p_hat;
    let sigma = (exact * (1.0 - exact) / 200_000.0).sqrt();
    println!("ex42 firework n=30: MC {} vs exact chain {}", p, exact);
    assert!((p - exact).abs() <= 4.0 * sigma);

    // 5. Geometric law: reverse survival at growing horizons should decay
    //    toward 0 (finite mean => P(S) = 0).
    let geo = DistributionSchedule::homogeneous(RadiusDistribution::geometric(0.5).unwrap());
    let mut prev = 1.0f64;
    for h in [10u64, 50, 250] {
        let cfg = ExperimentConfig {
            process: ProcessKind::Reverse,
            schedule: geo.clone(),
            layout: VertexLayout::identity(),
            horizon: h,
            trials: 50_000,
            seed: 555,
            generation_cap: None,
            label: "geo".into(),
        };
        let p = experiment::run_trials(&cfg).unwrap().p_hat;
        println!("geometric reverse h={h}: {p}");
        assert!(p <= prev + 0.01);
        prev = p;
    }

    // 6. Power law alpha=1.2 deep horizon: classifier says survive; MC
    //    survival should stay bounded away from 0 as horizon grows.
    let pl = DistributionSchedule::homogeneous(RadiusDistribution::power_law(1.2).unwrap());
    for h in [100u64, 1000] {
        let cfg = ExperimentConfig {
            process: ProcessKind::Firework,
            schedule: pl.clone(),
            layout: VertexLayout::identity(),
            horizon: h,
            trials: 10_000,
            seed: 1212,
            generation_cap: None,
            label: "pl12".into(),
        };
        let est = experiment::run_trials(&cfg).unwrap();
        let lower = analytics::lower_bound_firework(&pl, 1, h);
        println!("alpha=1.2 firework h={h}: p={} (lower bound {} {:?})", est.p_hat, lower.value, lower.rigor);
        assert!(est.p_hat >= lower.value - 4.0 * (est.p_hat * (1.0 - est.p_hat) / 10_000.0).sqrt());
    }
    println!("cross-validate: all assertions passed");
}
