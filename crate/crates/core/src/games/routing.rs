use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Constraint, DifferentiableFn, GameSpec, LinearFn, Polynomial, StrategyProfile, StrategySet};

/// Network routing game data.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingTopology {
    /// `incidence[i][k]` is true when player `i`'s path uses link `k`.
    pub incidence: Vec<Vec<bool>>,
    /// Cost `P_k` of each link as a function of its load.
    pub link_costs: Vec<Polynomial>,
    /// Profit `p` per unit of routed flow.
    pub profit: f64,
    /// `(link index, cap)`: the load on the link may not exceed the cap.
    pub caps: Vec<(usize, f64)>,
    /// Every player routes a flow in `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    /// Lipschitz constant to use instead of the box bound.
    pub lipschitz: Option<f64>,
    /// Smoothness constant to use instead of the computed bound.
    pub smoothness: Option<f64>,
}

/// Lipschitz constant shipped with the default topology.
///
/// The box bound over `[0,10]^5` is about 1165 and makes the stepsize rule
/// impractically small. Iterates started at `0.5 * 1` never leave the
/// superlevel set of the regularized potential (`eta = 1e-2`) through their
/// starting point, where the largest utility-gradient norm is about 140.1;
/// the shipped value adds a 10% margin.
pub const DEFAULT_ROUTING_LIPSCHITZ: f64 = 155.0;

impl Default for RoutingTopology {
    fn default() -> Self {
        let paths: [&[usize]; 5] = [&[1, 3], &[2, 3], &[0, 2, 4], &[1, 2, 3], &[2, 3, 4]];
        let incidence = paths
            .iter()
            .map(|p| (0..5).map(|k| p.contains(&k)).collect())
            .collect();
        RoutingTopology {
            incidence,
            link_costs: vec![
                Polynomial::new(vec![0.0, 1.0, 5.0]),
                Polynomial::new(vec![1.0, 2.0, 4.0]),
                Polynomial::new(vec![0.0, 0.0, 5.0]),
                Polynomial::new(vec![0.0, 1.0, 2.0]),
                Polynomial::new(vec![0.0, 10.0]),
            ],
            profit: 42.0,
            caps: vec![(1, 2.7), (4, 7.0)],
            lower: 0.0,
            upper: 10.0,
            lipschitz: Some(DEFAULT_ROUTING_LIPSCHITZ),
            smoothness: None,
        }
    }
}

impl RoutingTopology {
    pub fn players(&self) -> usize {
        self.incidence.len()
    }

    pub fn links(&self) -> usize {
        self.link_costs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGame(msg));
        if self.incidence.is_empty() {
            return bad("routing game needs at least one player".into());
        }
        for (i, row) in self.incidence.iter().enumerate() {
            if row.len() != self.links() {
                return bad(format!("incidence row {} has {} entries, expected {}", i + 1, row.len(), self.links()));
            }
            if !row.iter().any(|u| *u) {
                return bad(format!("path of player {} uses no link", i + 1));
            }
        }
        for &(k, cap) in &self.caps {
            if k >= self.links() {
                return bad(format!("cap on link {} which does not exist", k + 1));
            }
            if !self.incidence.iter().any(|row| row[k]) {
                return bad(format!("capped link {} is used by no player", k + 1));
            }
            if !cap.is_finite() {
                return bad(format!("cap on link {} is not finite", k + 1));
            }
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return bad(format!("invalid flow bounds [{}, {}]", self.lower, self.upper));
        }
        if !self.profit.is_finite() {
            return bad("profit must be finite".into());
        }
        Ok(())
    }

    fn users(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.players()).filter(move |&i| self.incidence[i][k])
    }

    fn column(&self, k: usize) -> Vec<f64> {
        self.incidence.iter().map(|row| if row[k] { 1.0 } else { 0.0 }).collect()
    }

    fn loads(&self, x: &[f64]) -> Vec<f64> {
        (0..self.links()).map(|k| self.users(k).map(|i| x[i]).sum()).collect()
    }

    /// Bound on `|grad u_i|` over the box. Each gradient entry is monotone in
    /// every flow when the link costs have non-decreasing derivatives, so it
    /// is extremal at the all-lower or all-upper corner; other costs fall back
    /// to a coefficient bound on `|P'_k|`.
    pub fn box_lipschitz_bound(&self) -> f64 {
        let n = self.players();
        let max_load = |k: usize| self.users(k).count() as f64 * self.lower.abs().max(self.upper.abs());
        let convex = self.link_costs.iter().all(|p| {
            p.coeffs().iter().skip(2).all(|c| *c >= 0.0) && self.lower >= 0.0
        });
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut sq = 0.0;
            for j in 0..n {
                let entry = |x: &[f64]| -> f64 {
                    let loads = self.loads(x);
                    let own = if i == j { self.profit } else { 0.0 };
                    own - (0..self.links())
                        .filter(|&k| self.incidence[i][k] && self.incidence[j][k])
                        .map(|k| self.link_costs[k].derivative().eval(loads[k]))
                        .sum::<f64>()
                };
                let bound = if convex {
                    entry(&vec![self.lower; n]).abs().max(entry(&vec![self.upper; n]).abs())
                } else {
                    let own = if i == j { self.profit.abs() } else { 0.0 };
                    own + (0..self.links())
                        .filter(|&k| self.incidence[i][k] && self.incidence[j][k])
                        .map(|k| coefficient_bound(&self.link_costs[k].derivative(), max_load(k)))
                        .sum::<f64>()
                };
                sq += bound * bound;
            }
            best = best.max(sq.sqrt());
        }
        // Constraint gradients are incidence columns.
        let widest = (0..self.links()).map(|k| (self.users(k).count() as f64).sqrt()).fold(0.0, f64::max);
        best.max(widest)
    }

    /// Bound on the spectral norm of the utility Hessians
    /// `-sum_{k in R_i} P''_k(load_k) a_k a_k^T` over the box.
    pub fn smoothness_bound(&self) -> f64 {
        let n = self.players();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut h = vec![vec![0.0; n]; n];
            for k in (0..self.links()).filter(|&k| self.incidence[i][k]) {
                let max_load = self.users(k).count() as f64 * self.lower.abs().max(self.upper.abs());
                let w = coefficient_bound(&self.link_costs[k].derivative().derivative(), max_load);
                let col = self.column(k);
                for r in 0..n {
                    for c in 0..n {
                        h[r][c] += w * col[r] * col[c];
                    }
                }
            }
            best = best.max(psd_spectral_norm(&h));
        }
        best
    }
}

/// `sum_n |c_n| r^n`, an upper bound on `|P(z)|` for `|z| <= r`.
fn coefficient_bound(p: &Polynomial, r: f64) -> f64 {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.abs() * r.powi(n as i32))
        .sum()
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration, inflated slightly to stay an upper bound.
fn psd_spectral_norm(h: &[Vec<f64>]) -> f64 {
    let n = h.len();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w: Vec<f64> = h.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm;
        v = w.into_iter().map(|a| a / norm).collect();
        if (next - lambda).abs() <= 1e-14 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda * (1.0 + 1e-9)
}

/// `u_i(x) = p x_i - sum_{k in R_i} P_k(load_k)`.
#[derive(Clone, Debug)]
pub struct RoutingUtility {
    topology: Arc<RoutingTopology>,
    player: usize,
}

impl DifferentiableFn for RoutingUtility {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        let t = &self.topology;
        let loads = t.loads(x.as_slice());
        let cost: f64 = (0..t.links())
            .filter(|&k| t.incidence[self.player][k])
            .map(|k| t.link_costs[k].eval(loads[k]))
            .sum();
        t.profit * x.as_slice()[self.player] - cost
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        let t = &self.topology;
        let loads = t.loads(x.as_slice());
        let mut g = vec![0.0; t.players()];
        g[self.player] = t.profit;
        for k in (0..t.links()).filter(|&k| t.incidence[self.player][k]) {
            let d = t.link_costs[k].derivative().eval(loads[k]);
            for j in t.users(k) {
                g[j] -= d;
            }
        }
        g
    }

    fn partial_grad(&self, x: &StrategyProfile, player: usize) -> Vec<f64> {
        let t = &self.topology;
        let loads = t.loads(x.as_slice());
        let mut g = if player == self.player { t.profit } else { 0.0 };
        for k in (0..t.links()).filter(|&k| t.incidence[self.player][k] && t.incidence[player][k]) {
            g -= t.link_costs[k].derivative().eval(loads[k]);
        }
        vec![g]
    }
}

/// `Phi(x) = p sum_i x_i - sum_{k used} P_k(load_k)`.
///
/// `Phi - u_i` does not depend on `x_i`, which makes `Phi` an exact potential.
#[derive(Clone, Debug)]
pub struct RoutingPotential {
    topology: Arc<RoutingTopology>,
}

impl DifferentiableFn for RoutingPotential {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        let t = &self.topology;
        let loads = t.loads(x.as_slice());
        let cost: f64 = (0..t.links())
            .filter(|&k| t.users(k).next().is_some())
            .map(|k| t.link_costs[k].eval(loads[k]))
            .sum();
        t.profit * x.as_slice().iter().sum::<f64>() - cost
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        let t = &self.topology;
        let loads = t.loads(x.as_slice());
        let mut g = vec![t.profit; t.players()];
        for k in 0..t.links() {
            let d = t.link_costs[k].derivative().eval(loads[k]);
            for j in t.users(k) {
                g[j] -= d;
            }
        }
        g
    }
}

const POTENTIAL_PAIRS: usize = 1000;
const POTENTIAL_TOL: f64 = 1e-8;
const POTENTIAL_SEED: u64 = 0x5eed;

/// Routing game over `topology`, with link caps as shared constraints.
///
/// The potential is checked on random feasible unilateral deviations before
/// the game is returned.
pub fn routing_game(topology: &RoutingTopology) -> Result<GameSpec> {
    topology.validate()?;
    let lipschitz = topology.lipschitz.unwrap_or_else(|| topology.box_lipschitz_bound());
    let smoothness = topology.smoothness.unwrap_or_else(|| topology.smoothness_bound()).max(1e-12);
    let topo = Arc::new(topology.clone());
    let mut builder = GameSpec::builder("routing");
    for i in 0..topo.players() {
        builder = builder.player(
            StrategySet::interval(topo.lower, topo.upper)?,
            Arc::new(RoutingUtility {
                topology: topo.clone(),
                player: i,
            }),
        );
    }
    for &(k, cap) in &topo.caps {
        builder = builder.constraint(Constraint::at_most(Arc::new(LinearFn::new(topo.column(k), 0.0)), cap));
    }
    let spec = builder
        .regularity(lipschitz, smoothness)
        .potential(Arc::new(RoutingPotential { topology: topo }))
        .build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(POTENTIAL_SEED);
    let deviation = spec.potential_deviation(&mut rng, POTENTIAL_PAIRS).unwrap_or(0.0);
    if !(deviation <= POTENTIAL_TOL) {
        return Err(Error::PotentialIdentityFailed {
            deviation,
            tolerance: POTENTIAL_TOL,
        });
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_topology_is_valid() {
        let t = RoutingTopology::default();
        t.validate().unwrap();
        assert_eq!(t.players(), 5);
        assert_eq!(t.links(), 5);
        assert_eq!(t.link_costs[1].eval(0.0), 1.0);
    }

    #[test]
    fn smoothness_bound_matches_quadratic_costs() {
        // Player 4 uses links 2, 3, 4 with P'' = 8, 10, 4.
        let t = RoutingTopology::default();
        let m = t.smoothness_bound();
        assert!(m > 40.0 && m < 70.0, "{m}");
    }

    #[test]
    fn broken_topologies_are_rejected() {
        let mut t = RoutingTopology::default();
        t.incidence[0] = vec![false; 5];
        assert!(routing_game(&t).is_err());
        let mut t = RoutingTopology::default();
        t.caps.push((9, 1.0));
        assert!(routing_game(&t).is_err());
    }
}
