use approx::assert_relative_eq;
use bbk_core::geometry::{bracket, BallPoint};
use bbk_core::integral_ops::{bracket_power_integral, kernel_power_integral, QuadLevel};
use bbk_core::kernel::{extended_poisson, kernel_eval, random_point, KernelSpec};
use bbk_core::special::gamma_k;
use bbk_core::zonal::zonal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..20_000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = f(a) + f(b);
    for i in 1..panels {
        total += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    total * h / 3.0
}

#[test]
fn poisson_closed_form_examples() {
    let spec = KernelSpec::with_defaults(3, -1.0).unwrap();
    let x = BallPoint::on_axis(3, 0.5).unwrap();
    let y = BallPoint::on_axis(3, 0.6).unwrap();
    assert_relative_eq!(kernel_eval(&spec, &x, &y).unwrap(), 0.91 / 0.343, max_relative = 1e-8);
    let y = BallPoint::on_axis(3, -0.6).unwrap();
    assert_relative_eq!(
        kernel_eval(&spec, &x, &y).unwrap(),
        0.91 / 1.3f64.powi(3),
        max_relative = 1e-8
    );
}

#[test]
fn truncated_series_matches_brute_force_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2, 3, 5] {
        for alpha in [-2.5, 0.0, 1.5] {
            let spec = KernelSpec::with_defaults(n, alpha).unwrap();
            for _ in 0..5 {
                let norm_x = rng.gen_range(0.0..0.9);
                let x = random_point(&mut rng, n, norm_x).unwrap();
                let norm_y = rng.gen_range(0.0..0.9);
                let y = random_point(&mut rng, n, norm_y).unwrap();
                let brute: f64 = (0..3000).map(|k| gamma_k(n, alpha, k) * zonal(k, &x, &y)).sum();
                assert_relative_eq!(
                    kernel_eval(&spec, &x, &y).unwrap(),
                    brute,
                    max_relative = 1e-8,
                    epsilon = 1e-9
                );
            }
        }
    }
}

#[test]
fn poisson_kernel_from_series_at_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [2, 3, 4] {
        let spec = KernelSpec::with_defaults(n, -1.0).unwrap();
        for _ in 0..50 {
            let norm_x = rng.gen_range(0.0..0.9);
            let x = random_point(&mut rng, n, norm_x).unwrap();
            let norm_y = rng.gen_range(0.0..0.9);
            let y = random_point(&mut rng, n, norm_y).unwrap();
            let rho = x.norm() * y.norm();
            let t = if rho == 0.0 {
                1.0
            } else {
                x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum::<f64>() / rho
            };
            let br = bracket(&x, &y).unwrap();
            let direct = (1.0 - rho * rho) / br.powi(n as i32);
            assert_relative_eq!(extended_poisson(n, rho, t), direct, max_relative = 1e-12);
            assert!((kernel_eval(&spec, &x, &y).unwrap() - direct).abs() < 1e-6);
        }
    }
}

#[test]
fn bracket_integral_matches_hypergeometric_sphere_means() {
    for (n, d, s, r) in [
        (3, 1.0, 0.5, 0.6),
        (2, 2.0, -0.5, 0.8),
        (4, 1.0, 1.0, 0.7),
        (5, 2.0, 0.0, 0.5),
    ] {
        let nf = n as f64;
        let lambda = 0.5 * (nf + d + s);
        let oracle = simpson(
            |rho| {
                nf * rho.powf(nf - 1.0)
                    * (1.0 - rho * rho).powf(d)
                    * hyp2f1(lambda, lambda - nf / 2.0 + 1.0, nf / 2.0, r * r * rho * rho)
            },
            0.0,
            1.0,
            4000,
        );
        let value = bracket_power_integral(n, d, s, r, QuadLevel::FINE.per_panel).unwrap();
        assert_relative_eq!(value, oracle, max_relative = 1e-7);
    }
}

#[test]
fn kernel_power_integral_at_the_origin_is_the_weight_mass() {
    for (n, d) in [(3, 0.0), (2, 1.0), (4, 2.0)] {
        let mass = simpson(
            |r| n as f64 * r.powi(n as i32 - 1) * (1.0 - r * r).powf(d),
            0.0,
            1.0,
            2000,
        );
        let value = kernel_power_integral(n, 1.0, 1.0, d, 0.0, QuadLevel::FINE.per_panel).unwrap();
        assert_relative_eq!(value, mass, max_relative = 1e-8);
    }
}

#[test]
fn monte_carlo_agrees_with_weighted_kernel_integral() {
    let (n, alpha, d, r) = (3usize, 0.0, 0.5, 0.5);
    let quad = kernel_power_integral(n, alpha, 1.0, d, r, QuadLevel::FINE.per_panel).unwrap();
    let spec = KernelSpec::with_defaults(n, alpha).unwrap();
    let x = BallPoint::on_axis(n, r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let samples = 40_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let radius = rng.gen::<f64>().powf(1.0 / n as f64);
        let y = random_point(&mut rng, n, radius).unwrap();
        let v = kernel_eval(&spec, &x, &y).unwrap().abs() * (1.0 - radius * radius).powf(d);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / samples as f64;
    let sd = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
    assert!((mean - quad).abs() < 5.0 * sd, "mc {mean} ± {sd}, quadrature {quad}");
}
