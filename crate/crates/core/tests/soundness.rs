use fockwit::criteria::{criterion_three_mode, CriterionId, EvalConfig, DEFAULT_TOLERANCE};
use fockwit::ppt::max_single_mode_negativity;
use fockwit::sampler::*;
use fockwit::states::{gen_bell01, gen_mixed_s};
use fockwit::sweep::soundness_sweep;
use fockwit::{Complex64, FockState, HermitianCombination};

fn all_two_mode_ids(mn_max: u32) -> Vec<CriterionId> {
    CriterionId::defaults_for(
        2,
        &EvalConfig {
            mn_max,
            ..EvalConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn separable_samples_are_never_detected() {
    let ids = all_two_mode_ids(3);
    let small: Vec<u64> = (0..1000).collect();
    let r = soundness_sweep(
        &small,
        &[1, 2, 5, 10],
        &[3, 3],
        &ids,
        &EvalConfig::default(),
    )
    .unwrap();
    assert!(r.failures.is_empty(), "{:?}", r.failures);
    assert!(r.detections.is_empty(), "{:?}", r.detections);
    assert_eq!(r.evaluations, 1000 * ids.len());

    let large: Vec<u64> = (1000..1500).collect();
    let r = soundness_sweep(
        &large,
        &[1, 2, 5, 10],
        &[5, 5],
        &ids,
        &EvalConfig::default(),
    )
    .unwrap();
    assert!(
        r.failures.is_empty() && r.detections.is_empty(),
        "{:?}",
        r.detections
    );
}

#[test]
fn separable_three_mode_samples_are_never_detected() {
    for seed in 0..300 {
        let state = sample_separable_mixture(seed, 1 + (seed % 4) as usize, &[3, 2, 3])
            .unwrap()
            .to_state()
            .unwrap();
        let r = criterion_three_mode(&state, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.detected && r.margin <= r.tol, "seed {seed}: {r:?}");
    }
}

#[test]
fn mixture_variance_inequality_holds() {
    let ops = [
        HermitianCombination::l1(),
        HermitianCombination::l2(),
        HermitianCombination::k_phi(0.0),
    ];
    for seed in 0..100 {
        let e =
            sample_separable_mixture(seed, [2, 3, 5, 10][(seed % 4) as usize], &[4, 4]).unwrap();
        for op in &ops {
            let c = e.check_mixture_variance(op).unwrap();
            assert!(c.holds, "seed {seed}: {c:?}");
            assert!(c.lhs >= c.rhs - 1e-9);
        }
    }
}

#[test]
fn mixture_variance_on_explicit_mixed_s_decomposition() {
    // s|ψ⟩⟨ψ| + (1−s)/4 Σ |ij⟩⟨ij| written as five pure components
    let s = 0.7;
    let one = Complex64::new(1.0, 0.0);
    let mut parts = vec![(s, gen_bell01(&[2, 2]).unwrap())];
    for occ in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        parts.push((
            (1.0 - s) / 4.0,
            FockState::new_pure(&[2, 2], [(occ, one)]).unwrap(),
        ));
    }
    let assembled = {
        let refs: Vec<(f64, &FockState)> = parts.iter().map(|(p, st)| (*p, st)).collect();
        FockState::convex_mixture(&refs).unwrap()
    };
    let target = gen_mixed_s(s, &[2, 2]).unwrap();
    assert!((assembled.density_matrix() - target.density_matrix())
        .iter()
        .all(|z| z.norm() < 1e-15));
    for op in [HermitianCombination::l1(), HermitianCombination::l2()] {
        assert!(check_mixture_variance(&parts, &op).unwrap().holds);
    }
}

#[test]
fn single_component_is_exact() {
    for seed in 0..20 {
        let e = sample_separable_mixture(seed, 1, &[3, 5]).unwrap();
        let c = e
            .check_mixture_variance(&HermitianCombination::l1())
            .unwrap();
        assert_eq!(c.lhs, c.rhs);
    }
}

#[test]
fn separable_samples_are_ppt() {
    for seed in 0..200 {
        let state = sample_separable_mixture(seed, [1, 2, 5, 10][(seed % 4) as usize], &[3, 3])
            .unwrap()
            .to_state()
            .unwrap();
        assert!(
            max_single_mode_negativity(&state).unwrap() <= 1e-10,
            "seed {seed}"
        );
    }
}

#[test]
fn sampling_is_deterministic() {
    for seed in [0, 42, u64::MAX] {
        let a = sample_separable_mixture(seed, 5, &[3, 4])
            .unwrap()
            .to_state()
            .unwrap();
        let b = sample_separable_mixture(seed, 5, &[3, 4])
            .unwrap()
            .to_state()
            .unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
    }
}
