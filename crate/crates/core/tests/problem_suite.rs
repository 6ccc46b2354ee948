use lam_core::problems::{self, TestProblem, ROSENBROCK_BOX_LIPSCHITZ, ROSENBROCK_BOX_RADIUS};
use lam_core::types::norm2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-radius..=radius)).collect()
}

fn central_difference(p: &TestProblem, x: &[f64], i: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += h;
    minus[i] -= h;
    (p.value(&plus) - p.value(&minus)) / (2.0 * h)
}

#[test]
fn gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in problems::suite() {
        for _ in 0..100 {
            let x = random_point(&mut rng, p.dim, 10.0);
            let g = p.grad(&x).unwrap();
            for i in 0..p.dim {
                let h = 1e-5 * x[i].abs().max(1.0);
                let fd = central_difference(&p, &x, i, h);
                let err = (g[i] - fd).abs() / g[i].abs().max(1.0);
                assert!(err <= 1e-6, "{} at {x:?}: analytic {} vs fd {fd}", p.name, g[i]);
            }
        }
    }
}

#[test]
fn lipschitz_constants_hold_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in problems::suite() {
        let Some(lipschitz) = p.lipschitz else { continue };
        let radius = p.lipschitz_box.unwrap_or(10.0);
        for _ in 0..2000 {
            let x = random_point(&mut rng, p.dim, radius);
            let y = if rng.gen_bool(0.5) {
                random_point(&mut rng, p.dim, radius)
            } else {
                // nearby pairs probe the local curvature
                x.iter()
                    .map(|v| (v + rng.gen_range(-1e-3..1e-3)).clamp(-radius, radius))
                    .collect()
            };
            let gx = p.grad(&x).unwrap();
            let gy = p.grad(&y).unwrap();
            let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
            let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            assert!(
                norm2(&dg) <= lipschitz * norm2(&dx) * (1.0 + 1e-9) + 1e-9,
                "{}: L = {lipschitz} violated",
                p.name
            );
        }
    }
}

#[test]
fn declared_minimum_is_a_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in problems::suite() {
        let f_min = p.f_min.unwrap();
        for _ in 0..1000 {
            let x = random_point(&mut rng, p.dim, 10.0);
            assert!(p.value(&x) >= f_min, "{}", p.name);
        }
    }
}

#[test]
fn rosenbrock_box_constant_covers_dense_hessian_grid() {
    // spectral norm of the 2x2 Hessian on a 601 x 601 grid over the box
    let steps = 600;
    let mut worst: f64 = 0.0;
    for a in 0..=steps {
        for b in 0..=steps {
            let x = -ROSENBROCK_BOX_RADIUS + 2.0 * ROSENBROCK_BOX_RADIUS * a as f64 / steps as f64;
            let y = -ROSENBROCK_BOX_RADIUS + 2.0 * ROSENBROCK_BOX_RADIUS * b as f64 / steps as f64;
            let h11 = 1200.0 * x * x - 400.0 * y + 2.0;
            let h12 = -400.0 * x;
            let h22 = 200.0;
            let mid = 0.5 * (h11 + h22);
            let rad = (0.25 * (h11 - h22).powi(2) + h12 * h12).sqrt();
            worst = worst.max((mid + rad).abs()).max((mid - rad).abs());
        }
    }
    assert!(worst <= ROSENBROCK_BOX_LIPSCHITZ);
    assert!(ROSENBROCK_BOX_LIPSCHITZ - worst < 1.0);
}

#[test]
fn suite_contents() {
    let names: Vec<String> = problems::suite().into_iter().map(|p| p.name).collect();
    for required in [
        "sphere-1",
        "sphere-2",
        "sphere-4",
        "sphere-10",
        "diagquad-2",
        "diagquad-5",
        "rosenbrock",
        "pseudohuber",
    ] {
        assert!(names.iter().any(|n| n == required), "missing {required}");
    }
}
