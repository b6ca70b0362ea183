use vtslab_core::grover::OracleSpec;
use vtslab_core::linalg::{CMatrix, CVector, Projector, TolerancePolicy, C64};
use vtslab_core::loops::*;
use vtslab_core::vts::{profile_moments, random_subroutine, stopping_profile, RandomSubroutineParams, SubroutineSpec};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

/// Every label halts at `steps`; inputs in `marked` flip the answer at step 1.
fn fixed_time_spec(n: usize, steps: usize, z: usize, marked: &[usize]) -> SubroutineSpec {
    let id = CMatrix::identity(2 * z, 2 * z);
    let mut flip = CMatrix::zeros(2 * z, 2 * z);
    for k in 0..z {
        flip[(k, z + k)] = C64::new(1.0, 0.0);
        flip[(z + k, k)] = C64::new(1.0, 0.0);
    }
    let unitaries = (1..=steps)
        .map(|t| (0..n).map(|i| if t == 1 && marked.contains(&i) { flip.clone() } else { id.clone() }).collect())
        .collect();
    let outputs = (0..n).map(|i| marked.contains(&i)).collect();
    SubroutineSpec::new(n, steps, z, vec![steps; z], unitaries, outputs).unwrap()
}

/// Halting probabilities by explicitly measuring after every step and
/// renormalizing: `Pr[T = t] = Pr[survive to t−1] · ‖Π_t ψ‖²`.
fn measured_pmf(spec: &SubroutineSpec, i: usize) -> Vec<f64> {
    let mut psi = CVector::zeros(spec.local_dim());
    psi[0] = C64::new(1.0, 0.0);
    let mut alive = 1.0;
    let mut pmf = vec![0.0];
    for t in 1..=spec.steps() {
        psi = spec.unitary(t, i) * psi;
        let halted = spec.project_halted(&psi, t);
        let p = halted.norm_squared();
        pmf.push(alive * p);
        alive *= 1.0 - p;
        if 1.0 - p > 1e-300 {
            psi = (psi - halted) / C64::new((1.0 - p).sqrt(), 0.0);
        }
    }
    pmf
}

fn project(p: &Projector, inst: &PEInstance, v: &CVector) -> f64 {
    let (inner, _) = inst.compress(v).unwrap();
    p.apply(&inner).norm()
}

fn complement(p: &Projector, inst: &PEInstance, v: &CVector) -> f64 {
    let (inner, outside) = inst.compress(v).unwrap();
    (p.complement(&inner).norm_squared() + outside * outside).sqrt()
}

#[test]
fn simple_counts_and_norms() {
    let inst = build_simple_instance(&OracleSpec::unmarked(2).unwrap(), 2.0, &tol()).unwrap();
    assert_eq!(inst.dim(), 16);
    assert_eq!(inst.group("star").unwrap().vectors.len(), 2);

    let inst = build_simple_instance(&OracleSpec::unmarked(4).unwrap(), 4.0, &tol()).unwrap();
    assert_eq!(inst.group("bullet").unwrap().vectors[0].norm_sqr(), 5.0);
    let wf = inst.well_formedness();
    assert_eq!(wf.psi0_b, 0.0);
    assert!(wf.max() < 1e-12, "{wf:?}");
    assert_eq!(inst.pa().rank(), 9);
}

#[test]
fn simple_witness_examples() {
    let oracle = OracleSpec::unique(4, 1).unwrap();
    let inst = build_simple_instance(&oracle, 4.0, &tol()).unwrap();
    let w = simple_witnesses(&oracle, 4.0).unwrap();
    let r = verify_witnesses(&inst, &w, &tol()).unwrap();
    assert!(r.passed, "{r:?}");
    assert!((r.norm_sq - 4.0).abs() < 1e-12);
    assert!((r.c_plus_effective.unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(r.overlap, Some([1.0, 0.0]));

    let oracle = OracleSpec::unmarked(4).unwrap();
    let inst = build_simple_instance(&oracle, 4.0, &tol()).unwrap();
    let r = verify_witnesses(&inst, &simple_witnesses(&oracle, 4.0).unwrap(), &tol()).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.decomposition_residual, Some(0.0));
    assert!((r.norm_sq - 13.0).abs() < 1e-12);

    let oracle = OracleSpec::new(16, vec![0, 3, 5, 9]).unwrap();
    let inst = build_simple_instance(&oracle, 4.0, &tol()).unwrap();
    let r = verify_witnesses(&inst, &simple_witnesses(&oracle, 4.0).unwrap(), &tol()).unwrap();
    assert!(r.passed && (r.norm_sq - 4.0).abs() < 1e-12, "{r:?}");
}

#[test]
fn mismatched_witness_fails() {
    let marked = OracleSpec::unique(4, 2).unwrap();
    let other = OracleSpec::unique(4, 1).unwrap();
    let inst = build_simple_instance(&other, 4.0, &tol()).unwrap();
    let r = verify_witnesses(&inst, &simple_witnesses(&marked, 4.0).unwrap(), &tol()).unwrap();
    assert!(!r.passed);
    assert!(r.residual_b > 0.1);
}

#[test]
fn history_norms_for_fixed_time() {
    let spec = fixed_time_spec(2, 2, 2, &[]);
    let h = history_states(&spec, 0, &[1.0, 1.0, 1.0], &tol()).unwrap();
    assert!((h.w_plus.norm_squared() - 6.0).abs() < 1e-12);
    assert!((h.w_minus.norm_squared() - 6.0).abs() < 1e-12);
    let h = history_states(&spec, 1, &[1.0, 2.0, 3.0], &tol()).unwrap();
    assert!((h.w_minus.norm_squared() - 12.0).abs() < 1e-12);
    assert!((h.w_plus.norm_squared() - 11.0 / 3.0).abs() < 1e-12);
    assert!(history_states(&spec, 0, &[2.0, 1.0, 1.0], &tol()).is_err());
}

#[test]
fn general_dimension_and_wellformedness() {
    let spec = fixed_time_spec(2, 2, 2, &[1]);
    let ms: Vec<_> = (0..2).map(|j| profile_moments(&stopping_profile(&spec, j).unwrap())).collect();
    let w = regime_parameters(Regime::IA, &RegimeInputs { n: 2, steps: 2, moments: &ms, marked: &[1], mu: None, k: None }).unwrap();
    let inst = build_general_instance(&spec, &w, &tol()).unwrap();
    assert_eq!(inst.dim(), 504);
    assert_eq!(inst.marked(), &[1]);
    let wf = inst.well_formedness();
    assert!(wf.max() < 1e-10, "{wf:?}");
    assert_eq!(inst.unused_tags(), vec![Tag::Zero, Tag::Both]);
}

#[test]
fn general_fixed_time_closed_forms() {
    // T = 2 everywhere, α ≡ 1, ω_i = 4, N = 4: ‖w_A‖² = 1 + (1/4)·4·4·(3 + 6) = 37
    let spec = fixed_time_spec(4, 2, 1, &[]);
    let w = Weights { omega: vec![4.0; 4], alpha: vec![1.0; 3], beta: None, regime: Regime::Custom, mu: None, k: None };
    let inst = build_general_instance(&spec, &w, &tol()).unwrap();
    let r = verify_witnesses(&inst, &general_negative_witness(&inst).unwrap(), &tol()).unwrap();
    assert!(r.passed, "{r:?}");
    assert!((r.norm_sq - 37.0).abs() < 1e-10);

    // regime i-a, N = 4, one marked input, T = 2: ‖w₊‖² = 1 + 4·(1/ω_m)(3 + 2·3), ω_m = 4·2
    let spec = fixed_time_spec(4, 2, 1, &[2]);
    let ms: Vec<_> = (0..4).map(|j| profile_moments(&stopping_profile(&spec, j).unwrap())).collect();
    let w = regime_parameters(Regime::IA, &RegimeInputs { n: 4, steps: 2, moments: &ms, marked: &[2], mu: Some(1.0), k: None }).unwrap();
    let inst = build_general_instance(&spec, &w, &tol()).unwrap();
    let r = verify_witnesses(&inst, &general_witness(&inst).unwrap(), &tol()).unwrap();
    assert!(r.passed, "{r:?}");
    assert!((r.norm_sq - (1.0 + 4.0 / 8.0 * 9.0)).abs() < 1e-10);
    assert!(matches!(general_negative_witness(&inst), Err(vtslab_core::Error::MarkedElementPresent(2))));
}

fn random_spec(seed: u64, n: usize, steps: usize, z: usize) -> SubroutineSpec {
    random_subroutine(seed, &RandomSubroutineParams::new(n, steps, z)).unwrap()
}

#[test]
fn history_identities_on_random_subroutines() {
    for seed in 0..12u64 {
        let (n, steps, z) = (1 + seed as usize % 3, 1 + seed as usize % 4, 1 + (seed as usize / 3) % 4);
        let spec = random_spec(seed, n, steps, z);
        for regime in Regime::GENERAL {
            let alpha: Vec<f64> = (0..=steps).map(|t| regime.alpha(t)).collect();
            let w = Weights { omega: vec![1.0; n], alpha: alpha.clone(), beta: None, regime: Regime::Custom, mu: None, k: None };
            let inst = build_general_instance(&spec, &w, &tol()).unwrap();
            let even = Projector::from_orthonormal(
                inst.active_dim(),
                &vtslab_core::linalg::orthonormalize(&inst.group_generators("even"), &tol()).unwrap(),
            );
            let odd = Projector::from_orthonormal(
                inst.active_dim(),
                &vtslab_core::linalg::orthonormalize(&inst.group_generators("odd"), &tol()).unwrap(),
            );
            for j in 0..n {
                let h = history_states(&spec, j, &alpha, &tol()).unwrap();
                let pmf = measured_pmf(&spec, j);
                let cum = |g: &dyn Fn(usize) -> f64| -> f64 {
                    (0..=steps).map(|t| pmf[t] * (0..=t).map(|s| g(s)).sum::<f64>()).sum()
                };
                let plus = 2.0 * cum(&|t| 1.0 / alpha[t]);
                let minus = 2.0 * cum(&|t| alpha[t]);
                assert!((h.w_plus.norm_squared() - plus).abs() < 1e-8, "seed {seed} {regime:?}");
                assert!((h.w_minus.norm_squared() - minus).abs() < 1e-8, "seed {seed} {regime:?}");
                assert!(project(&even, &inst, &h.w_plus) < 1e-8);
                assert!(project(&odd, &inst, &h.w_plus) < 1e-8);
                assert!(complement(&even, &inst, &h.w_minus) < 1e-8, "seed {seed} {regime:?}");
                assert!(complement(&odd, &inst, &h.w_minus_prime) < 1e-8, "seed {seed} {regime:?}");
            }
        }
    }
}

#[test]
fn general_witnesses_all_regimes() {
    for seed in 100..110u64 {
        let (n, steps, z) = (2 + seed as usize % 3, 1 + seed as usize % 4, 1 + seed as usize % 4);
        let spec = random_spec(seed, n, steps, z);
        let ms: Vec<_> = (0..n).map(|j| profile_moments(&stopping_profile(&spec, j).unwrap())).collect();
        let marked = spec.marked();
        for regime in Regime::GENERAL {
            let inputs = RegimeInputs { n, steps, moments: &ms, marked: &marked, mu: Some(1.0), k: Some(0.5) };
            let w = regime_parameters(regime, &inputs).unwrap();
            let inst = build_general_instance(&spec, &w, &tol()).unwrap();
            assert!(inst.well_formedness().max() < 1e-10);
            let r = verify_witnesses(&inst, &general_witness(&inst).unwrap(), &tol()).unwrap();
            assert!(r.passed, "seed {seed} {regime:?} {r:?}");
        }
    }
}

#[test]
fn instance_and_witness_text_roundtrip() {
    let spec = random_spec(7, 2, 2, 2);
    let w = Weights { omega: vec![1.5, 2.5], alpha: vec![1.0, 0.5, 1.0 / 3.0], beta: None, regime: Regime::Custom, mu: None, k: None };
    let inst = build_general_instance(&spec, &w, &tol()).unwrap();
    let back = PEInstance::from_text(&inst.to_text(), &tol()).unwrap();
    assert_eq!(back.groups(), inst.groups());
    assert_eq!(back.weights(), inst.weights());
    assert_eq!(back.marked(), inst.marked());
    assert!(back.source().is_none());
    let wit = general_witness(&inst).unwrap();
    assert_eq!(Witness::from_text(&wit.to_text()).unwrap(), wit);
}

#[test]
fn history_report_is_clean_on_random_subroutines() {
    for seed in 20..26u64 {
        let spec = random_spec(seed, 3, 3, 3);
        for regime in Regime::GENERAL {
            let alpha: Vec<f64> = (0..=3).map(|t| regime.alpha(t)).collect();
            let w = Weights { omega: vec![1.0; 3], alpha, beta: None, regime: Regime::Custom, mu: None, k: None };
            let inst = build_general_instance(&spec, &w, &tol()).unwrap();
            assert!(history_report(&inst).unwrap().max() < 1e-8);
        }
    }
}
