//! Games with shared coupling constraints.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::function::{Negated, SharedFn};
use super::strategy::{StrategyProfile, StrategySet};
use crate::error::{Error, Result};

/// Whether a constraint was entered as a lower or an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSense {
    Lower,
    Upper,
}

/// Shared constraint `c(x) >= threshold`.
///
/// Upper bounds `g(x) <= cap` are stored as `-g(x) >= -cap`.
#[derive(Clone)]
pub struct Constraint {
    function: SharedFn,
    threshold: f64,
    sense: BoundSense,
    original: SharedFn,
}

impl Constraint {
    pub fn at_least(function: SharedFn, threshold: f64) -> Self {
        Constraint {
            original: function.clone(),
            function,
            threshold,
            sense: BoundSense::Lower,
        }
    }

    pub fn at_most(function: SharedFn, cap: f64) -> Self {
        Constraint {
            function: Arc::new(Negated(function.clone())),
            threshold: -cap,
            sense: BoundSense::Upper,
            original: function,
        }
    }

    /// Canonical (lower-bound form) function.
    pub fn function(&self) -> &SharedFn {
        &self.function
    }

    /// Canonical threshold `alpha_j`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn sense(&self) -> BoundSense {
        self.sense
    }

    /// `c_j(x) - alpha_j`.
    pub fn margin(&self, x: &StrategyProfile) -> f64 {
        self.function.eval(x) - self.threshold
    }

    /// Value of the function as the user entered it.
    pub fn user_value(&self, x: &StrategyProfile) -> f64 {
        self.original.eval(x)
    }

    /// Bound as the user entered it.
    pub fn user_bound(&self) -> f64 {
        match self.sense {
            BoundSense::Lower => self.threshold,
            BoundSense::Upper => -self.threshold,
        }
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("threshold", &self.threshold)
            .field("sense", &self.sense)
            .finish()
    }
}

/// Per-constraint margins `beta_j = c_j(x) - alpha_j` and their minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Margins {
    pub per_constraint: Vec<f64>,
    /// `min_j beta_j`; `+inf` when there are no constraints.
    pub min: f64,
}

impl Margins {
    pub fn is_strictly_feasible(&self) -> bool {
        self.min > 0.0
    }

    pub fn is_feasible(&self) -> bool {
        self.min >= 0.0
    }

    /// First constraint with a non-positive margin, if any.
    pub fn first_violation(&self) -> Option<(usize, f64)> {
        self.per_constraint
            .iter()
            .copied()
            .enumerate()
            .find(|(_, m)| *m <= 0.0)
    }
}

/// A continuous game with shared coupling constraints.
#[derive(Clone)]
pub struct GameSpec {
    name: String,
    strategy_sets: Vec<StrategySet>,
    utilities: Vec<SharedFn>,
    constraints: Vec<Constraint>,
    lipschitz: f64,
    smoothness: f64,
    potential: Option<SharedFn>,
}

impl fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSpec")
            .field("name", &self.name)
            .field("strategy_sets", &self.strategy_sets)
            .field("constraints", &self.constraints.len())
            .field("lipschitz", &self.lipschitz)
            .field("smoothness", &self.smoothness)
            .field("potential", &self.potential.is_some())
            .finish()
    }
}

/// Builder for [`GameSpec`].
#[derive(Default)]
pub struct GameSpecBuilder {
    name: String,
    strategy_sets: Vec<StrategySet>,
    utilities: Vec<SharedFn>,
    constraints: Vec<Constraint>,
    regularity: Option<(f64, f64)>,
    potential: Option<SharedFn>,
}

impl GameSpecBuilder {
    pub fn player(mut self, set: StrategySet, utility: SharedFn) -> Self {
        self.strategy_sets.push(set);
        self.utilities.push(utility);
        self
    }

    pub fn constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn constraints(mut self, cs: impl IntoIterator<Item = Constraint>) -> Self {
        self.constraints.extend(cs);
        self
    }

    /// Lipschitz constant `L` and smoothness constant `M`.
    pub fn regularity(mut self, lipschitz: f64, smoothness: f64) -> Self {
        self.regularity = Some((lipschitz, smoothness));
        self
    }

    pub fn potential(mut self, potential: SharedFn) -> Self {
        self.potential = Some(potential);
        self
    }

    pub fn build(self) -> Result<GameSpec> {
        if self.strategy_sets.is_empty() {
            return Err(Error::InvalidGame("game needs at least one player".into()));
        }
        let (lipschitz, smoothness) = self
            .regularity
            .ok_or_else(|| Error::InvalidGame("regularity constants L and M are required".into()))?;
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidGame(format!("L must be positive, got {lipschitz}")));
        }
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(Error::InvalidGame(format!("M must be positive, got {smoothness}")));
        }
        Ok(GameSpec {
            name: self.name,
            strategy_sets: self.strategy_sets,
            utilities: self.utilities,
            constraints: self.constraints,
            lipschitz,
            smoothness,
            potential: self.potential,
        })
    }
}

impl GameSpec {
    pub fn builder(name: impl Into<String>) -> GameSpecBuilder {
        GameSpecBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of players `m`.
    pub fn players(&self) -> usize {
        self.strategy_sets.len()
    }

    /// Number of shared constraints `b`.
    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn strategy_set(&self, player: usize) -> &StrategySet {
        &self.strategy_sets[player]
    }

    pub fn strategy_sets(&self) -> &[StrategySet] {
        &self.strategy_sets
    }

    pub fn utility(&self, player: usize) -> &SharedFn {
        &self.utilities[player]
    }

    pub fn utilities(&self) -> &[SharedFn] {
        &self.utilities
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn potential(&self) -> Option<&SharedFn> {
        self.potential.as_ref()
    }

    pub fn is_potential(&self) -> bool {
        self.potential.is_some()
    }

    /// Copy of the game with different regularity constants.
    pub fn with_regularity(&self, lipschitz: f64, smoothness: f64) -> Result<GameSpec> {
        if !(lipschitz > 0.0 && smoothness > 0.0) {
            return Err(Error::InvalidGame("L and M must be positive".into()));
        }
        let mut g = self.clone();
        g.lipschitz = lipschitz;
        g.smoothness = smoothness;
        Ok(g)
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.strategy_sets.iter().map(StrategySet::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.strategy_sets.iter().map(StrategySet::dim).sum()
    }

    /// Builds a profile with this game's layout from a flat vector.
    pub fn profile(&self, values: Vec<f64>) -> Result<StrategyProfile> {
        StrategyProfile::from_flat(&self.block_dims(), values)
    }

    pub fn check_layout(&self, x: &StrategyProfile) -> Result<()> {
        if x.block_dims() != self.block_dims() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Whether every block lies in its strategy set.
    pub fn in_strategy_space(&self, x: &StrategyProfile, tol: f64) -> bool {
        x.players() == self.players()
            && self
                .strategy_sets
                .iter()
                .enumerate()
                .all(|(i, s)| s.contains(x.block(i), tol))
    }

    pub fn feasibility_margins(&self, x: &StrategyProfile) -> Margins {
        let per_constraint: Vec<f64> = self.constraints.iter().map(|c| c.margin(x)).collect();
        let min = per_constraint.iter().copied().fold(f64::INFINITY, f64::min);
        Margins { per_constraint, min }
    }

    /// Projects every block onto its strategy set.
    pub fn project(&self, x: &StrategyProfile) -> Result<StrategyProfile> {
        self.check_layout(x)?;
        let mut out = x.clone();
        for (i, set) in self.strategy_sets.iter().enumerate() {
            let p = set.project(x.block(i))?;
            out.block_mut(i).copy_from_slice(&p);
        }
        Ok(out)
    }

    pub fn center(&self) -> StrategyProfile {
        let blocks: Vec<Vec<f64>> = self.strategy_sets.iter().map(StrategySet::center).collect();
        StrategyProfile::from_blocks(&blocks)
    }

    /// Uniform sample from the strategy space (ignores constraints).
    pub fn sample_profile<R: Rng + ?Sized>(&self, rng: &mut R) -> StrategyProfile {
        let blocks: Vec<Vec<f64>> = self.strategy_sets.iter().map(|s| s.sample(rng)).collect();
        StrategyProfile::from_blocks(&blocks)
    }

    /// Sample from the strategy space shrunk towards its center.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, shrink: f64) -> StrategyProfile {
        let blocks: Vec<Vec<f64>> = self
            .strategy_sets
            .iter()
            .map(|s| s.sample_interior(rng, shrink))
            .collect();
        StrategyProfile::from_blocks(&blocks)
    }

    /// Rejection sample of a strictly feasible profile.
    pub fn sample_strictly_feasible<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        attempts: usize,
    ) -> Option<StrategyProfile> {
        (0..attempts)
            .map(|_| self.sample_profile(rng))
            .find(|x| self.feasibility_margins(x).is_strictly_feasible())
    }

    /// Largest violation of the potential identity
    /// `Phi(x) - Phi(x'_i, x_-i) = u_i(x) - u_i(x'_i, x_-i)`
    /// over `pairs` random feasible profiles and feasible unilateral deviations.
    ///
    /// Returns `None` when the game has no potential. Draws that fail to find a
    /// feasible profile or deviation are skipped.
    pub fn potential_deviation<R: Rng + ?Sized>(&self, rng: &mut R, pairs: usize) -> Option<f64> {
        let phi = self.potential.as_ref()?;
        let m = self.players();
        let mut worst: f64 = 0.0;
        for k in 0..pairs {
            let Some(x) = self.sample_strictly_feasible(rng, 1000) else {
                continue;
            };
            let i = k % m;
            let set = &self.strategy_sets[i];
            let deviation = (0..1000).map(|_| x.with_block(i, &set.sample(rng))).find(|y| {
                self.feasibility_margins(y).is_feasible()
            });
            let Some(y) = deviation else { continue };
            let lhs = phi.eval(&x) - phi.eval(&y);
            let rhs = self.utilities[i].eval(&x) - self.utilities[i].eval(&y);
            worst = worst.max((lhs - rhs).abs());
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::function::{ConstantFn, LinearFn};

    fn two_player_linear() -> GameSpec {
        GameSpec::builder("linear")
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(LinearFn::new(vec![1.0, 0.0], 0.0)))
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(LinearFn::new(vec![0.0, 1.0], 0.0)))
            .constraint(Constraint::at_most(Arc::new(LinearFn::new(vec![1.0, 1.0], 0.0)), 1.5))
            .regularity(1.5, 1.0)
            .build()
            .unwrap()
    }

    #[test]
    fn upper_bounds_are_canonicalized() {
        let g = two_player_linear();
        let c = &g.constraints()[0];
        assert_eq!(c.sense(), BoundSense::Upper);
        assert_eq!(c.threshold(), -1.5);
        assert_eq!(c.user_bound(), 1.5);
        let x = g.profile(vec![0.25, 0.5]).unwrap();
        assert_eq!(c.user_value(&x), 0.75);
        assert!((-c.function().eval(&x) - c.user_value(&x)).abs() < 1e-15);
        assert!((c.margin(&x) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn no_constraints_means_infinite_margin() {
        let g = GameSpec::builder("free")
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(ConstantFn(0.0)))
            .regularity(1.0, 1.0)
            .build()
            .unwrap();
        let m = g.feasibility_margins(&g.center());
        assert!(m.per_constraint.is_empty());
        assert_eq!(m.min, f64::INFINITY);
    }

    #[test]
    fn builder_validates() {
        let no_players = GameSpec::builder("x").regularity(1.0, 1.0).build();
        assert!(no_players.is_err());
        let bad_l = GameSpec::builder("x")
            .player(StrategySet::unit_box(1).unwrap(), Arc::new(ConstantFn(0.0)))
            .regularity(0.0, 1.0)
            .build();
        assert!(bad_l.is_err());
    }
}
