use bbk_core::geometry::{v_alpha, BallPoint};
use bbk_core::integral_ops::{
    adjoint_check, apply_s_pointwise, apply_t_radial, apply_t_zonal_mode, composition_check, mode_leakage, project,
    push_through_check, t_zonal_mode_quadrature, OperatorParams, RadialProfile, TestFunction, ZonalModeInput,
};
use bbk_core::kernel::random_point;
use bbk_core::radial_ops::{apply_d, apply_i, verify_additivity, verify_inverse, verify_kernel_shift, Expansion};
use bbk_core::special::gamma_k;
use bbk_core::zonal::zonal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

#[test]
fn radial_operator_inverse_and_additivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [2, 3, 5] {
        for _ in 0..10 {
            let f = Expansion::random(n, 16, &mut rng).unwrap();
            assert!(verify_inverse(0.0, 2.0, &f) < 1e-12);
            assert!(verify_inverse(-1.5, 0.5, &f) < 1e-12);
            assert!(verify_additivity(0.0, 1.0, 1.0, &f) < 1e-12);
            let nf = -(n as f64);
            assert!(verify_additivity(nf, 0.5, -0.5, &f) < 1e-12);
            let back = apply_d(nf, 0.0, &f);
            assert_eq!(back, f);
        }
    }
}

#[test]
fn apply_i_composes_the_planar_example() {
    let f = Expansion::on_axis(2, vec![0.0, 1.0]).unwrap();
    let x = BallPoint::on_axis(2, 0.5).unwrap();
    let expected = 0.75 * 1.5 * zonal(1, &x, &[1.0, 0.0]);
    assert!((apply_i(0.0, 1.0, &f, &x).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn kernel_shift_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (s, t) in [(-1.0, 1.0), (0.0, 2.5), (-4.0, 1.5), (1.0, -0.5)] {
        for _ in 0..5 {
            let rx = rng.gen_range(0.0..0.8);
            let ry = rng.gen_range(0.0..0.8);
            let x = random_point(&mut rng, 3, rx).unwrap();
            let y = random_point(&mut rng, 3, ry).unwrap();
            let report = verify_kernel_shift(s, t, &x, &y).unwrap();
            assert!(
                report.deviation < 1e-6 * report.direct.abs().max(1.0),
                "{s} {t} {report:?}"
            );
        }
    }
}

#[test]
fn radial_operator_agrees_with_pointwise_s_at_origin() {
    let o = BallPoint::origin(4).unwrap();
    for (b, u, v) in [(0.5, 0.0, 0.0), (1.0, -0.5, 2.0), (-0.5, 0.2, -1.0)] {
        let params = OperatorParams::new(4, b, -2.0).unwrap();
        let t = apply_t_radial(params, u, v).unwrap().value().unwrap();
        let s = apply_s_pointwise(params, TestFunction::new(u, v), &o)
            .unwrap()
            .value()
            .unwrap();
        assert!((s - t).abs() < 1e-8 * t.abs(), "{s} vs {t}");
    }
}

#[test]
fn zonal_mode_formula_matches_quadrature() {
    let anchor = unit(&[0.3, -0.2, 0.9]);
    for (m, b, c) in [(0usize, 0.0, 0.0), (2, 0.5, -1.0), (3, 1.0, 2.0)] {
        let profile = RadialProfile {
            power: 0.0,
            u: 0.5,
            v: 0.0,
        };
        let f = ZonalModeInput::new(m, anchor.clone(), profile).unwrap();
        let params = OperatorParams::new(3, b, c).unwrap();
        let x = BallPoint::new(vec![0.2, 0.3, 0.4]).unwrap();
        let formula = apply_t_zonal_mode(params, &f, &x).unwrap();
        let quad = t_zonal_mode_quadrature(params, &f, &x).unwrap();
        assert!(
            (formula - quad).abs() < 1e-7 * formula.abs().max(1e-3),
            "m={m}: {formula} vs {quad}"
        );
    }
}

#[test]
fn zonal_mode_example_value() {
    let f = ZonalModeInput::new(1, vec![1.0, 0.0, 0.0], RadialProfile::constant()).unwrap();
    let x = BallPoint::on_axis(3, 0.5).unwrap();
    let params = OperatorParams::new(3, 0.0, 0.0).unwrap();
    let expected = gamma_k(3, 0.0, 1) * zonal(1, &x, &[1.0, 0.0, 0.0]) * 0.75;
    assert!((apply_t_zonal_mode(params, &f, &x).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn modes_do_not_leak() {
    let anchor = unit(&[1.0, 1.0, 0.0]);
    let f = ZonalModeInput::new(2, anchor, RadialProfile::constant()).unwrap();
    let params = OperatorParams::new(3, 0.0, 0.5).unwrap();
    let leakage = mode_leakage(params, &f, 0.6, &[0, 1, 2, 3, 4]).unwrap();
    let own = leakage.iter().find(|(k, _)| *k == 2).unwrap().1;
    assert!(own.abs() > 1e-3);
    for (k, value) in leakage {
        if k != 2 {
            assert!(value.abs() < 1e-8 * own.abs(), "mode {k} leaks {value}");
        }
    }
}

#[test]
fn projection_reproduces_harmonic_modes() {
    let anchor = unit(&[0.0, 1.0, 0.0, 1.0]);
    for s in [0.0, 1.5, -0.5] {
        let f = ZonalModeInput::new(
            3,
            anchor.clone(),
            RadialProfile {
                power: 3.0,
                u: 0.0,
                v: 0.0,
            },
        )
        .unwrap();
        let x = BallPoint::new(vec![0.1, 0.4, -0.2, 0.3]).unwrap();
        let value = project(s, &f, &x).unwrap();
        let expected = zonal(3, &x, &anchor);
        assert!((value - expected).abs() < 1e-10, "s={s}: {value} vs {expected}");
    }
}

#[test]
fn adjoint_identity_on_mode_sums() {
    let f = vec![
        ZonalModeInput::new(0, vec![1.0, 0.0, 0.0], RadialProfile::constant()).unwrap(),
        ZonalModeInput::new(
            2,
            unit(&[0.2, 0.5, 0.8]),
            RadialProfile {
                power: 0.0,
                u: 0.3,
                v: 0.0,
            },
        )
        .unwrap(),
    ];
    let g = vec![
        ZonalModeInput::new(
            2,
            unit(&[1.0, 0.0, 1.0]),
            RadialProfile {
                power: 2.0,
                u: 0.0,
                v: 0.0,
            },
        )
        .unwrap(),
        ZonalModeInput::new(
            0,
            vec![0.0, 1.0, 0.0],
            RadialProfile {
                power: 0.0,
                u: 0.5,
                v: 0.0,
            },
        )
        .unwrap(),
    ];
    for (b, c, alpha, beta) in [(0.0, 0.0, 0.0, 0.0), (1.0, -0.5, 0.5, 0.25)] {
        let params = OperatorParams::new(3, b, c).unwrap();
        let report = adjoint_check(params, 2.0, 3.0, alpha, beta, &f, &g).unwrap();
        assert!(report.deviation < 1e-9 * report.lhs.abs().max(1.0), "{report:?}");
    }
}

#[test]
fn adjoint_of_radial_constants_factors() {
    let f = vec![ZonalModeInput::radial(3, RadialProfile::constant()).unwrap()];
    let g = vec![ZonalModeInput::radial(3, RadialProfile::constant()).unwrap()];
    let (b, beta, alpha) = (0.5, 1.0, 0.0);
    let params = OperatorParams::new(3, b, 0.0).unwrap();
    let report = adjoint_check(params, 2.0, 2.0, alpha, beta, &f, &g).unwrap();
    let expected = apply_t_radial(params, 0.0, 0.0).unwrap().value().unwrap() * v_alpha(3, beta).unwrap();
    assert!((report.lhs - expected).abs() < 1e-10, "{report:?} vs {expected}");
    assert!(report.deviation < 1e-10);
}

#[test]
fn composition_and_push_through() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let h = Expansion::random(3, 3, &mut rng).unwrap();
    let x = BallPoint::new(vec![0.2, -0.1, 0.3]).unwrap();
    for (b, c, t) in [(0.0, 0.0, 1.0), (0.5, -1.0, 0.5), (-0.5, 1.0, 2.0)] {
        let params = OperatorParams::new(3, b, c).unwrap();
        let report = composition_check(params, t, &h, &x).unwrap();
        assert!(report.deviation < 1e-6, "{b} {c} {t}: {report:?}");
    }
    let f = ZonalModeInput::new(
        2,
        unit(&[0.0, 0.6, 0.8]),
        RadialProfile {
            power: 0.0,
            u: 0.5,
            v: 0.0,
        },
    )
    .unwrap();
    for (b, t) in [(0.0, 1.0), (1.0, -0.5)] {
        let report = push_through_check(3, b, t, &f, &x).unwrap();
        assert!(
            report.deviation < 1e-7 * report.coefficient.abs().max(1e-3),
            "{report:?}"
        );
    }
}
