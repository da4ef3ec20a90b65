use fockwit::criteria::{evaluate_all, EvalConfig};
use fockwit::ppt::{max_single_mode_negativity, partial_transpose, ppt_check};
use fockwit::sampler::{sample_product_pure, sample_random_mixed, sample_random_pure};
use fockwit::states::*;
use fockwit::{Complex64, FockBasisIndex, FockState};

/// Partial-transpose spectrum of the mixed-s family, worked out by hand:
/// the {00, 11} block is [[(1−s)/4, s/2], [s/2, (1−s)/4]] and the {01, 10}
/// block is diagonal with (1+s)/4.
fn mixed_s_pt_spectrum(s: f64) -> [f64; 4] {
    let d = (1.0 - s) / 4.0;
    [d + s / 2.0, d - s / 2.0, (1.0 + s) / 4.0, (1.0 + s) / 4.0]
}

#[test]
fn mixed_s_is_npt_exactly_above_one_third() {
    for i in 0..=300 {
        let s = i as f64 / 300.0;
        let r = ppt_check(&gen_mixed_s(s, &[2, 2]).unwrap(), &[1]).unwrap();
        let oracle = mixed_s_pt_spectrum(s)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!((r.min_eigenvalue - oracle).abs() < 1e-12, "s={s}");
        assert!((r.min_eigenvalue - analytic_mixed_s(s).unwrap().pt_min_eigenvalue).abs() < 1e-12);
        if (s - 1.0 / 3.0).abs() > 1e-9 {
            assert_eq!(r.negativity > 1e-10, s > 1.0 / 3.0, "s={s}");
        }
    }
}

#[test]
fn product_state_transpose_keeps_spectrum_positive() {
    for seed in 0..20 {
        let st = sample_product_pure(seed, &[3, 3])
            .unwrap()
            .to_state()
            .unwrap();
        let r = ppt_check(&st, &[0]).unwrap();
        assert!(r.min_eigenvalue >= -1e-12 && r.negativity <= 1e-10);
        let twice = {
            let pt = partial_transpose(&st, &[0]).unwrap();
            let back = FockState::from_density(&[3, 3], pt).unwrap();
            partial_transpose(&back, &[0]).unwrap()
        };
        assert!((twice - st.density_matrix())
            .iter()
            .all(|z| z.norm() < 1e-14));
    }
}

#[test]
fn tmsv_at_cutoff_twelve_is_npt() {
    // built by hand: the generator rejects this cutoff for its tail
    let x: f64 = 0.5;
    let amps = (0..12).map(|n| {
        (
            FockBasisIndex(vec![n, n]),
            Complex64::new(x.powi(n as i32), 0.0),
        )
    });
    let st = FockState::new_pure(&[12, 12], amps).unwrap();
    let r = ppt_check(&st, &[1]).unwrap();
    assert!(r.negativity > 0.1 && r.min_eigenvalue < 0.0);
}

fn corpus() -> Vec<(String, FockState)> {
    let mut out: Vec<(String, FockState)> = vec![
        ("bell".into(), gen_bell01(&[2, 2]).unwrap()),
        ("bell-padded".into(), gen_bell01(&[3, 3]).unwrap()),
        ("ghz".into(), gen_ghz_like(&[2, 2, 2]).unwrap()),
    ];
    for i in 0..=20 {
        let s = i as f64 / 20.0;
        out.push((format!("mixed-s {s}"), gen_mixed_s(s, &[2, 2]).unwrap()));
    }
    for x in [0.1, 0.3, 0.5, 0.7] {
        out.push((
            format!("tmsv {x}"),
            gen_tmsv(x, tmsv_cutoff(x).unwrap()).unwrap(),
        ));
    }
    for x in [0.02, 0.05, 0.1, 0.2, 0.3] {
        out.push((
            format!("alt-even {x}"),
            gen_alternating_even(x, alternating_even_cutoff(x).unwrap()).unwrap(),
        ));
    }
    for seed in 0..40 {
        out.push((
            format!("random pure {seed}"),
            sample_random_pure(seed, &[3, 3]).unwrap(),
        ));
        out.push((
            format!("random mixed {seed}"),
            sample_random_mixed(seed, &[3, 3], 2).unwrap(),
        ));
    }
    out
}

#[test]
fn every_detection_is_npt() {
    let mut detections = 0;
    for (name, state) in corpus() {
        assert!(state.dim() <= 4096);
        let evals = evaluate_all(&state, &EvalConfig::default()).unwrap();
        let detected: Vec<String> = evals
            .iter()
            .filter_map(|e| e.outcome.as_ref().ok())
            .filter(|r| r.detected)
            .map(|r| r.name.clone())
            .collect();
        if detected.is_empty() {
            continue;
        }
        detections += detected.len();
        let neg = max_single_mode_negativity(&state).unwrap();
        assert!(
            neg > 1e-10,
            "{name}: {detected:?} detected but negativity {neg}"
        );
    }
    assert!(
        detections > 20,
        "corpus should exercise detections, got {detections}"
    );
}
