use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Constraint, DifferentiableFn, GameSpec, SharedFn, StrategyProfile, StrategySet};

/// Shared utility `u(x) = (x1 + x2) - a (x1 - x2)^2 - b (x1^2 + x2^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdenticalInterestUtility {
    pub a: f64,
    pub b: f64,
}

impl DifferentiableFn for IdenticalInterestUtility {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        let (x1, x2) = (x.as_slice()[0], x.as_slice()[1]);
        let d = x1 - x2;
        x1 + x2 - self.a * d * d - self.b * (x1 * x1 + x2 * x2)
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        let (x1, x2) = (x.as_slice()[0], x.as_slice()[1]);
        let d = x1 - x2;
        vec![
            1.0 - 2.0 * self.a * d - 2.0 * self.b * x1,
            1.0 + 2.0 * self.a * d - 2.0 * self.b * x2,
        ]
    }
}

/// `x1 * x2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductFn;

impl DifferentiableFn for ProductFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        x.as_slice()[0] * x.as_slice()[1]
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        vec![x.as_slice()[1], x.as_slice()[0]]
    }
}

/// Two-player identical-interest game on `[0,1]^2` with the joint
/// constraint `1 - x1 x2 >= alpha`.
///
/// `L` is the largest gradient norm over the box: the utility gradient is
/// affine, so its norm peaks at a vertex, and the constraint gradient has
/// norm at most `sqrt(2)`. `M` is the spectral norm of the utility Hessian,
/// `4a + 2b`, against `1` for the constraint.
pub fn identical_interest_game(a: f64, b: f64, alpha: f64) -> Result<GameSpec> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("a and b must be positive, got a = {a}, b = {b}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let u = IdenticalInterestUtility { a, b };
    let vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
    let grad_bound = vertices
        .iter()
        .map(|v| {
            let g = u.grad(&StrategyProfile::from_blocks(&[[v[0]], [v[1]]]));
            g[0].hypot(g[1])
        })
        .fold(2f64.sqrt(), f64::max);
    let smoothness = (4.0 * a + 2.0 * b).max(1.0);
    let u: SharedFn = Arc::new(u);
    // 1 - x1 x2 >= alpha  <=>  x1 x2 <= 1 - alpha
    let c = Constraint::at_most(Arc::new(ProductFn), 1.0 - alpha);
    GameSpec::builder("identical-interest")
        .player(StrategySet::unit_box(1)?, u.clone())
        .player(StrategySet::unit_box(1)?, u.clone())
        .constraint(c)
        .regularity(grad_bound, smoothness)
        .potential(u)
        .build()
}
