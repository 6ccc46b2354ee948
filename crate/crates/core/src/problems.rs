//! Built-in smooth test problems with analytic gradients.

use std::fmt;
use std::sync::Arc;

use crate::types::Vector;

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Gradient-Lipschitz constant of the 2-D Rosenbrock function on the box
/// `||x||_inf <= 3`. The Hessian spectral norm peaks at the corner
/// `(-3, -3)` (and `(3, -3)`) at about 12122.78.
pub const ROSENBROCK_BOX_LIPSCHITZ: f64 = 12123.0;
pub const ROSENBROCK_BOX_RADIUS: f64 = 3.0;

/// Per-coordinate weights of the pseudo-Huber problem.
pub const PSEUDOHUBER_WEIGHTS: [f64; 2] = [1.0, 10.0];

#[derive(Clone)]
pub struct TestProblem {
    pub name: String,
    pub dim: usize,
    pub objective: ObjectiveFn,
    pub gradient: Option<GradientFn>,
    /// Gradient-Lipschitz constant, global unless `lipschitz_box` is set.
    pub lipschitz: Option<f64>,
    /// When set, `lipschitz` is only valid on `||x||_inf <= lipschitz_box`.
    pub lipschitz_box: Option<f64>,
    pub f_min: Option<f64>,
    pub x0: Vector,
}

impl fmt::Debug for TestProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("lipschitz_box", &self.lipschitz_box)
            .field("f_min", &self.f_min)
            .field("x0", &self.x0)
            .finish()
    }
}

impl TestProblem {
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }

    /// Whether the declared Lipschitz constant applies at `x`.
    pub fn lipschitz_valid_at(&self, x: &[f64]) -> bool {
        match self.lipschitz_box {
            None => true,
            Some(r) => x.iter().all(|v| v.abs() <= r),
        }
    }

    /// Everything the theory checkers need is known.
    pub fn is_verifiable(&self) -> bool {
        self.gradient.is_some() && self.lipschitz.is_some() && self.f_min.is_some()
    }
}

/// `f(x) = ||x||^2`.
pub fn sphere(n: usize) -> TestProblem {
    TestProblem {
        name: format!("sphere-{n}"),
        dim: n,
        objective: Arc::new(|x| x.iter().map(|v| v * v).sum()),
        gradient: Some(Arc::new(|x| x.iter().map(|v| 2.0 * v).collect())),
        lipschitz: Some(2.0),
        lipschitz_box: None,
        f_min: Some(0.0),
        x0: Vector::filled(n, 1.0).expect("n >= 1"),
    }
}

/// `f(x) = 1/2 sum_i i x_i^2` with 1-based weights, i.e. `A = diag(1..n)`.
pub fn diag_quadratic(n: usize) -> TestProblem {
    TestProblem {
        name: format!("diagquad-{n}"),
        dim: n,
        objective: Arc::new(|x| 0.5 * x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum::<f64>()),
        gradient: Some(Arc::new(|x| {
            x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).collect()
        })),
        lipschitz: Some(n as f64),
        lipschitz_box: None,
        f_min: Some(0.0),
        x0: Vector::filled(n, 1.0).expect("n >= 1"),
    }
}

pub fn rosenbrock() -> TestProblem {
    TestProblem {
        name: "rosenbrock".into(),
        dim: 2,
        objective: Arc::new(|x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)),
        gradient: Some(Arc::new(|x| {
            let r = x[1] - x[0] * x[0];
            vec![-400.0 * x[0] * r - 2.0 * (1.0 - x[0]), 200.0 * r]
        })),
        lipschitz: Some(ROSENBROCK_BOX_LIPSCHITZ),
        lipschitz_box: Some(ROSENBROCK_BOX_RADIUS),
        f_min: Some(0.0),
        x0: Vector::new(vec![-1.2, 1.0]).expect("finite"),
    }
}

/// Weighted pseudo-Huber `sum_i w_i (sqrt(1 + x_i^2) - 1)`: quadratic near
/// the origin, like `|x_i|` far away. Hessian entries are `w_i (1 + x_i^2)^(-3/2)`.
pub fn pseudohuber() -> TestProblem {
    let w = PSEUDOHUBER_WEIGHTS;
    TestProblem {
        name: "pseudohuber".into(),
        dim: 2,
        objective: Arc::new(move |x| x.iter().zip(w).map(|(v, wi)| wi * ((1.0 + v * v).sqrt() - 1.0)).sum()),
        gradient: Some(Arc::new(move |x| {
            x.iter().zip(w).map(|(v, wi)| wi * v / (1.0 + v * v).sqrt()).collect()
        })),
        lipschitz: Some(w.iter().copied().fold(0.0, f64::max)),
        lipschitz_box: None,
        f_min: Some(0.0),
        x0: Vector::new(vec![3.0, -2.0]).expect("finite"),
    }
}

/// `f(x) = sum_i x_i^4`. Smooth, but its gradient has no global Lipschitz
/// constant, so the checkers cannot be applied.
pub fn quartic(n: usize) -> TestProblem {
    TestProblem {
        name: format!("quartic-{n}"),
        dim: n,
        objective: Arc::new(|x| x.iter().map(|v| v.powi(4)).sum()),
        gradient: Some(Arc::new(|x| x.iter().map(|v| 4.0 * v.powi(3)).collect())),
        lipschitz: None,
        lipschitz_box: None,
        f_min: Some(0.0),
        x0: Vector::filled(n, 1.0).expect("n >= 1"),
    }
}

pub fn suite() -> Vec<TestProblem> {
    let mut problems: Vec<TestProblem> = [1, 2, 4, 10].into_iter().map(sphere).collect();
    problems.extend([2, 3, 5].into_iter().map(diag_quadratic));
    problems.push(rosenbrock());
    problems.push(pseudohuber());
    problems.push(quartic(2));
    problems
}

/// Look a problem up by name. Besides the suite entries, `sphere-N`,
/// `diagquad-N` and `quartic-N` accept any `N >= 1`.
pub fn by_name(name: &str) -> Option<TestProblem> {
    if let Some(p) = suite().into_iter().find(|p| p.name == name) {
        return Some(p);
    }
    let (family, n) = name.rsplit_once('-')?;
    let n: usize = n.parse().ok().filter(|&n| n >= 1)?;
    match family {
        "sphere" => Some(sphere(n)),
        "diagquad" => Some(diag_quadratic(n)),
        "quartic" => Some(quartic(n)),
        _ => None,
    }
}
