use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vtslab_core::bounds::*;
use vtslab_core::grover::CostProfile;
use vtslab_core::loops::*;
use vtslab_core::vts::{profile_moments, random_subroutine, stopping_profile, RandomSubroutineParams, StoppingProfile};
use vtslab_core::TolerancePolicy;

fn staircase() -> CostProfile {
    CostProfile::deterministic(&[1.0, 2.0, 3.0, 4.0]).unwrap()
}

/// A pmf on `{1..t_max}` with random support and weights.
fn random_pmf(rng: &mut ChaCha8Rng, t_max: usize) -> StoppingProfile {
    let mut pmf = vec![0.0; t_max + 1];
    for p in pmf.iter_mut().skip(1) {
        if rng.random::<f64>() < 0.6 {
            *p = rng.random::<f64>();
        }
    }
    let k = rng.random_range(1..=t_max);
    pmf[k] += 0.05;
    let total: f64 = pmf.iter().sum();
    StoppingProfile::from_pmf(pmf.into_iter().map(|p| p / total).collect()).unwrap()
}

#[test]
fn table_spot_values() {
    let t = compare_table(&staircase(), &PromiseDescriptor::unique_marked(4.0)).unwrap();
    assert!((t.l2 - 30f64.sqrt()).abs() < 1e-12);
    assert!((t.l1 - 40f64.sqrt()).abs() < 1e-12);
    assert!((t.l0 - 8.0).abs() < 1e-12);
    assert!((t.straight_line - 13.0).abs() < 1e-12);
    assert!(t.ordering_holds && t.am_gm_holds);
}

#[test]
fn constant_times_collapse_the_table() {
    for (n, c) in [(4usize, 3.0), (9, 1.0), (16, 7.5)] {
        let p = CostProfile::deterministic(&vec![c; n]).unwrap();
        let t = compare_table(&p, &PromiseDescriptor::unique_marked(c)).unwrap();
        let want = (n as f64).sqrt() * c;
        for v in [t.l2, t.l1, t.l0] {
            assert!((v - want).abs() < 1e-12 * want);
        }
    }
}

#[test]
fn ordering_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for run in 0..100 {
        let n = if run % 2 == 0 { 8 } else { 64 };
        let t_max = rng.random_range(1..=12usize);
        let profiles: Vec<_> = (0..n).map(|_| random_pmf(&mut rng, t_max)).collect();
        let p = CostProfile::from_profiles(&profiles).unwrap();
        let t = compare_table(&p, &PromiseDescriptor::unique_marked(t_max as f64)).unwrap();
        assert!(t.ordering_holds, "run {run}: {t:?}");
        assert!(t.am_gm_holds, "run {run}: {t:?}");
    }
}

#[test]
fn expected_time_above_cap_rejected() {
    assert!(compare_table(&staircase(), &PromiseDescriptor::unique_marked(3.0)).is_err());
}

#[test]
fn naive_dominates_l2_for_fixed_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let times: Vec<f64> = (0..8).map(|_| rng.random_range(1.0..20.0)).collect();
        let p = CostProfile::deterministic(&times).unwrap();
        let promise = PromiseDescriptor::explicit(vec![rng.random_range(0..8)]);
        assert!(bound(BoundKind::Naive, &p, &promise).unwrap() >= bound(BoundKind::L2, &p, &promise).unwrap());
    }
}

#[test]
fn naive_can_undercut_l2_for_heavy_tails() {
    let mut pmf = vec![0.0; 101];
    pmf[1] = 0.9;
    pmf[100] = 0.1;
    let heavy = StoppingProfile::from_pmf(pmf).unwrap();
    let p = CostProfile::from_profiles(&vec![heavy; 4]).unwrap();
    let promise = PromiseDescriptor::explicit(vec![0]);
    let naive = bound(BoundKind::Naive, &p, &promise).unwrap();
    let l2 = bound(BoundKind::L2, &p, &promise).unwrap();
    assert!((naive - 2.0 * 10.9).abs() < 1e-12);
    assert!((l2 - 2.0 * 1000.9f64.sqrt()).abs() < 1e-12);
    assert!(naive < l2);
}

#[test]
fn report_covers_every_kind() {
    let mut promise = PromiseDescriptor::unique_marked(4.0);
    promise.mu = Some(1.0);
    let r = cost_report(&staircase(), &promise).unwrap();
    for k in BoundKind::ALL {
        let v = r.get(k).unwrap_or_else(|| panic!("{} missing", k.name()));
        assert!(v.is_finite() && v > 0.0);
    }
    let explicit = cost_report(&staircase(), &PromiseDescriptor::explicit(vec![1])).unwrap();
    assert!(explicit.straight_line.is_none());
    assert!((explicit.regime_i_a.unwrap() - 30f64.sqrt()).abs() < 1e-12);
}

/// Regime bounds against `√(c₊ 𝒞₋)` of the built negative instance, with
/// `c₊` the regime's nominal constant.
#[test]
fn regime_bounds_track_witness_sizes() {
    let tol = TolerancePolicy::default();
    let mut worst: f64 = 1.0;
    for seed in 0..10u64 {
        let (n, steps) = (3, 3);
        let spec = random_subroutine(seed, &RandomSubroutineParams::new(n, steps, 3).with_outputs(vec![false; n])).unwrap();
        let profiles: Vec<_> = (0..n).map(|i| stopping_profile(&spec, i).unwrap()).collect();
        let moments: Vec<_> = profiles.iter().map(profile_moments).collect();
        let profile = CostProfile::from_profiles(&profiles).unwrap();
        let min_by = |g: &dyn Fn(usize) -> f64| (0..n).map(g).fold(f64::INFINITY, f64::min);
        for (regime, kind) in [
            (Regime::IA, BoundKind::RegimeIA),
            (Regime::IB, BoundKind::RegimeIB),
            (Regime::IIA, BoundKind::RegimeIIA),
            (Regime::IIB, BoundKind::RegimeIIB),
            (Regime::IIC, BoundKind::RegimeIIC),
        ] {
            // promise: a single marked element, the cheapest to miss
            let k = match regime {
                Regime::IB => min_by(&|j| 1.0 / moments[j].mean.powi(2)),
                Regime::IIB => min_by(&|j| 1.0 / moments[j].mean),
                Regime::IIC => min_by(&|j| 1.0 / moments[j].second),
                _ => 1.0,
            };
            let inputs = RegimeInputs { n, steps, moments: &moments, marked: &[], mu: Some(1.0), k: Some(k) };
            let inst = build_general_instance(&spec, &regime_parameters(regime, &inputs).unwrap(), &tol).unwrap();
            let report = verify_witnesses(&inst, &general_witness(&inst).unwrap(), &tol).unwrap();
            let c_minus = report.c_minus_effective.unwrap();
            let mut promise = PromiseDescriptor::explicit(vec![0]);
            promise.mu = Some(1.0);
            promise.k_i_b = Some(k);
            promise.k_ii_b = Some(k);
            promise.k_ii_c = Some(k);
            let b = bound(kind, &profile, &promise).unwrap();
            let ratio = b / (regime.nominal_c_plus() * c_minus).sqrt();
            worst = worst.max(ratio).max(1.0 / ratio);
            assert!((1.0 / 8.0..=8.0).contains(&ratio), "seed {seed}, {}: ratio {ratio}", regime.name());
        }
    }
    eprintln!("largest factor between bound and √(c₊𝒞₋): {worst:.3}");
}
