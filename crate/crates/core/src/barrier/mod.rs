//! Log-barrier regularization, adaptive stepsizes and the simultaneous
//! projected gradient update.

mod solver;
mod trajectory;

pub use solver::{solve, BarrierConfig, SolveResult, Termination, VerificationLog};
pub use trajectory::{write_csv, TrajectoryRecord};

use crate::error::{Error, Result};
use crate::model::strategy::norm;
use crate::model::{GameSpec, Margins, StrategyProfile, StrategySet};

/// Margins of `x`, failing unless every one is strictly positive.
pub fn strict_margins(spec: &GameSpec, x: &StrategyProfile) -> Result<Margins> {
    let margins = spec.feasibility_margins(x);
    if let Some((constraint, margin)) = margins.first_violation() {
        return Err(Error::NonStrictlyFeasible { constraint, margin });
    }
    if margins.per_constraint.iter().any(|m| m.is_nan()) {
        return Err(Error::NonStrictlyFeasible {
            constraint: margins.per_constraint.iter().position(|m| m.is_nan()).unwrap_or(0),
            margin: f64::NAN,
        });
    }
    Ok(margins)
}

fn log_barrier(margins: &Margins) -> f64 {
    margins.per_constraint.iter().map(|m| m.ln()).sum()
}

/// `B_i(x) = u_i(x) + eta * sum_j log(c_j(x) - alpha_j)` for every player.
pub fn barrier_values(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<Vec<f64>> {
    let margins = strict_margins(spec, x)?;
    let reg = if eta == 0.0 { 0.0 } else { eta * log_barrier(&margins) };
    Ok(spec.utilities().iter().map(|u| u.eval(x) + reg).collect())
}

fn partial_grad_with_margins(
    spec: &GameSpec,
    x: &StrategyProfile,
    eta: f64,
    player: usize,
    margins: &Margins,
) -> Vec<f64> {
    let mut g = spec.utility(player).partial_grad(x, player);
    if eta != 0.0 {
        for (c, m) in spec.constraints().iter().zip(&margins.per_constraint) {
            let gc = c.function().partial_grad(x, player);
            for (gk, ck) in g.iter_mut().zip(&gc) {
                *gk += eta * ck / m;
            }
        }
    }
    g
}

/// `grad_{x_i} u_i(x) + eta * sum_j grad_{x_i} c_j(x) / (c_j(x) - alpha_j)`.
pub fn barrier_partial_grad(
    spec: &GameSpec,
    x: &StrategyProfile,
    eta: f64,
    player: usize,
) -> Result<Vec<f64>> {
    let margins = strict_margins(spec, x)?;
    Ok(partial_grad_with_margins(spec, x, eta, player, &margins))
}

/// Barrier partial gradients of all players, in player order.
pub fn barrier_gradients(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<Vec<Vec<f64>>> {
    let margins = strict_margins(spec, x)?;
    Ok((0..spec.players())
        .map(|i| partial_grad_with_margins(spec, x, eta, i, &margins))
        .collect())
}

fn require_potential(spec: &GameSpec) -> Result<&crate::model::SharedFn> {
    spec.potential()
        .ok_or_else(|| Error::InvalidGame(format!("game '{}' has no potential", spec.name())))
}

/// `Phi^eta(x) = Phi(x) + eta * sum_j log(c_j(x) - alpha_j)`.
pub fn regularized_potential(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<f64> {
    let phi = require_potential(spec)?;
    let margins = strict_margins(spec, x)?;
    let reg = if eta == 0.0 { 0.0 } else { eta * log_barrier(&margins) };
    Ok(phi.eval(x) + reg)
}

/// Full gradient of `Phi^eta`.
pub fn regularized_potential_grad(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<Vec<f64>> {
    let phi = require_potential(spec)?;
    let margins = strict_margins(spec, x)?;
    let mut g = phi.grad(x);
    if eta != 0.0 {
        for (c, m) in spec.constraints().iter().zip(&margins.per_constraint) {
            for (gk, ck) in g.iter_mut().zip(c.function().grad(x)) {
                *gk += eta * ck / m;
            }
        }
    }
    Ok(g)
}

/// Largest coordinatewise difference between the barrier partial gradients
/// and the matching blocks of `grad Phi^eta`.
///
/// On simplex blocks both gradients are only determined up to multiples of
/// the all-ones vector, which the projection ignores, so the difference is
/// compared after removing its mean.
pub fn gradient_alignment_error(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<f64> {
    let full = regularized_potential_grad(spec, x, eta)?;
    let partials = barrier_gradients(spec, x, eta)?;
    let mut worst: f64 = 0.0;
    for (i, gi) in partials.iter().enumerate() {
        let diff: Vec<f64> = gi.iter().zip(&full[x.block_range(i)]).map(|(a, b)| a - b).collect();
        let shift = match spec.strategy_set(i) {
            StrategySet::Simplex { .. } => diff.iter().sum::<f64>() / diff.len() as f64,
            StrategySet::Box { .. } => 0.0,
        };
        for d in diff {
            worst = worst.max((d - shift).abs());
        }
    }
    Ok(worst)
}

/// Bound on the Hessian norm of `Phi^eta` over `beta`-feasible profiles:
/// `M sqrt(m) + eta M b / beta + eta L^2 b / beta^2`.
pub fn hessian_norm_bound(spec: &GameSpec, eta: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::NonPositiveMargin(beta));
    }
    let m = spec.players() as f64;
    let b = spec.constraint_count() as f64;
    let (l, big_m) = (spec.lipschitz(), spec.smoothness());
    let base = big_m * m.sqrt();
    if b == 0.0 || eta == 0.0 {
        return Ok(base);
    }
    Ok(base + eta * big_m * b / beta + eta * l * l * b / (beta * beta))
}

/// Stepsize rules.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum StepsizeRule {
    /// `min{ beta^2 / (2 m L^2 (beta + eta b)), 1 / M_Phi(eta, beta/2) }`.
    #[default]
    Appendix,
    /// `min{ beta / (2 m L^2), 1 / M_Phi(eta, beta/2) }`.
    MainText,
    Fixed(f64),
}

impl std::fmt::Display for StepsizeRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepsizeRule::Appendix => f.write_str("appendix"),
            StepsizeRule::MainText => f.write_str("main-text"),
            StepsizeRule::Fixed(g) => write!(f, "fixed:{g:e}"),
        }
    }
}

impl std::str::FromStr for StepsizeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "appendix" => Ok(StepsizeRule::Appendix),
            "main-text" => Ok(StepsizeRule::MainText),
            _ => {
                let g = s
                    .strip_prefix("fixed:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown stepsize rule '{s}'")))?;
                if !(g > 0.0 && g.is_finite()) {
                    return Err(Error::InvalidParameter(format!("fixed stepsize must be positive, got {g}")));
                }
                Ok(StepsizeRule::Fixed(g))
            }
        }
    }
}

/// Stepsize for the current minimum margin `beta`.
///
/// Without constraints the first argument is `+inf`, so the rule reduces to
/// `1 / (M sqrt(m))`.
pub fn adaptive_stepsize(spec: &GameSpec, eta: f64, beta: f64, rule: StepsizeRule) -> Result<f64> {
    if let StepsizeRule::Fixed(g) = rule {
        return Ok(g);
    }
    if !(beta > 0.0) {
        return Err(Error::NonPositiveMargin(beta));
    }
    let m = spec.players() as f64;
    let b = spec.constraint_count() as f64;
    let l2 = spec.lipschitz() * spec.lipschitz();
    let second = if b == 0.0 {
        1.0 / hessian_norm_bound(spec, eta, 1.0)?
    } else {
        1.0 / hessian_norm_bound(spec, eta, beta / 2.0)?
    };
    let first = if b == 0.0 {
        f64::INFINITY
    } else {
        match rule {
            StepsizeRule::Appendix => beta * beta / (2.0 * m * l2 * (beta + eta * b)),
            StepsizeRule::MainText => beta / (2.0 * m * l2),
            StepsizeRule::Fixed(_) => unreachable!(),
        }
    };
    Ok(first.min(second))
}

/// Projected ascent step of every player from the gradients `grads`, all
/// evaluated at the same profile `x`.
pub fn step_from_gradients(
    spec: &GameSpec,
    x: &StrategyProfile,
    grads: &[Vec<f64>],
    gamma: f64,
) -> Result<StrategyProfile> {
    let mut next = x.clone();
    for (i, (set, g)) in spec.strategy_sets().iter().zip(grads).enumerate() {
        let moved: Vec<f64> = x.block(i).iter().zip(g).map(|(xi, gi)| xi + gamma * gi).collect();
        let p = set.project(&moved)?;
        next.block_mut(i).copy_from_slice(&p);
    }
    Ok(next)
}

/// `x_i <- P_i[x_i + gamma * grad_{x_i} B_i(x)]` for every player simultaneously.
pub fn step(spec: &GameSpec, x: &StrategyProfile, eta: f64, gamma: f64) -> Result<StrategyProfile> {
    spec.check_layout(x)?;
    let grads = barrier_gradients(spec, x, eta)?;
    step_from_gradients(spec, x, &grads, gamma)
}

/// Per-player Euclidean norms.
pub fn block_norms(grads: &[Vec<f64>]) -> Vec<f64> {
    grads.iter().map(|g| norm(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, LinearFn, StrategySet};
    use std::sync::Arc;

    /// m = 2, b = 1, L = 1, M = 1.
    fn toy() -> GameSpec {
        GameSpec::builder("toy")
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(LinearFn::new(vec![1.0, 0.0], 0.0)))
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(LinearFn::new(vec![0.0, 1.0], 0.0)))
            .constraint(Constraint::at_most(Arc::new(LinearFn::new(vec![1.0, 1.0], 0.0)), 1.5))
            .regularity(1.0, 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn hessian_bound_formula() {
        let g = toy();
        let expected = 2f64.sqrt() + 0.1 / 0.5 + 0.1 / 0.25;
        assert!((hessian_norm_bound(&g, 0.1, 0.5).unwrap() - expected).abs() < 1e-14);
        assert!((hessian_norm_bound(&g, 0.1, 0.5).unwrap() - 2.01421).abs() < 1e-5);
        assert_eq!(hessian_norm_bound(&g, 0.0, 0.5).unwrap(), 2f64.sqrt());
        assert!(hessian_norm_bound(&g, 0.1, 0.0).is_err());
    }

    #[test]
    fn stepsize_formula() {
        let g = toy();
        let gamma = adaptive_stepsize(&g, 0.1, 0.5, StepsizeRule::Appendix).unwrap();
        let first: f64 = 0.25 / (2.0 * 2.0 * 1.0 * 0.6);
        let second = 1.0 / (2f64.sqrt() + 0.4 + 1.6);
        assert!((first - 0.10417).abs() < 1e-5);
        // 1 / 3.41421...
        assert!((second - 0.292893).abs() < 1e-6);
        assert_eq!(gamma, first.min(second));
        assert_eq!(adaptive_stepsize(&g, 0.1, 0.5, StepsizeRule::Fixed(0.3)).unwrap(), 0.3);
        let main = adaptive_stepsize(&g, 0.1, 0.5, StepsizeRule::MainText).unwrap();
        assert_eq!(main, (0.5f64 / 4.0).min(second));
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("appendix".parse::<StepsizeRule>().unwrap(), StepsizeRule::Appendix);
        assert_eq!("main-text".parse::<StepsizeRule>().unwrap(), StepsizeRule::MainText);
        assert_eq!("fixed:0.25".parse::<StepsizeRule>().unwrap(), StepsizeRule::Fixed(0.25));
        assert!("fixed:-1".parse::<StepsizeRule>().is_err());
        assert!("newton".parse::<StepsizeRule>().is_err());
        let r = StepsizeRule::Fixed(1e-3);
        assert_eq!(r.to_string().parse::<StepsizeRule>().unwrap(), r);
    }

    #[test]
    fn zero_stepsize_is_identity() {
        let g = toy();
        let x = g.profile(vec![0.3, 0.2]).unwrap();
        assert_eq!(step(&g, &x, 0.1, 0.0).unwrap(), x);
    }

    #[test]
    fn margin_one_contributes_nothing() {
        let g = toy();
        // margin = 1.5 - 0.5 = 1
        let x = g.profile(vec![0.25, 0.25]).unwrap();
        let b = barrier_values(&g, &x, 0.7).unwrap();
        assert!((b[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let g = toy();
        let x = g.profile(vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            barrier_values(&g, &x, 0.1),
            Err(Error::NonStrictlyFeasible { constraint: 0, .. })
        ));
        assert!(step(&g, &x, 0.1, 0.1).is_err());
    }
}
