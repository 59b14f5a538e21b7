use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{DifferentiableFn, GameSpec, StrategyProfile, StrategySet};

/// Largest joint action space accepted by [`mixed_extension`].
pub const MAX_JOINT_ACTIONS: usize = 1_000_000;

/// Finite game with tables in lexicographic joint-action order (the last
/// player's action varies fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct FinitePotentialGame {
    pub action_counts: Vec<usize>,
    /// `utilities[i][a]` is player `i`'s payoff at joint action `a`.
    pub utilities: Vec<Vec<f64>>,
    pub potential: Vec<f64>,
}

impl FinitePotentialGame {
    pub fn new(action_counts: Vec<usize>, utilities: Vec<Vec<f64>>, potential: Vec<f64>) -> Result<Self> {
        let g = FinitePotentialGame {
            action_counts,
            utilities,
            potential,
        };
        g.check_shape()?;
        Ok(g)
    }

    pub fn players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn joint_actions(&self) -> usize {
        self.action_counts.iter().product()
    }

    fn check_shape(&self) -> Result<()> {
        if self.action_counts.is_empty() || self.action_counts.contains(&0) {
            return Err(Error::InvalidGame("every player needs at least one action".into()));
        }
        let total = self
            .action_counts
            .iter()
            .try_fold(1usize, |acc, n| acc.checked_mul(*n))
            .filter(|t| *t <= MAX_JOINT_ACTIONS)
            .ok_or_else(|| Error::InvalidGame(format!("more than {MAX_JOINT_ACTIONS} joint actions")))?;
        if self.utilities.len() != self.players() {
            return Err(Error::InvalidGame(format!(
                "{} utility tables for {} players",
                self.utilities.len(),
                self.players()
            )));
        }
        for table in self.utilities.iter().chain(std::iter::once(&self.potential)) {
            if table.len() != total {
                return Err(Error::DimensionMismatch {
                    expected: total,
                    found: table.len(),
                });
            }
        }
        Ok(())
    }

    /// Stride of player `i`'s action in the flat index.
    fn stride(&self, player: usize) -> usize {
        self.action_counts[player + 1..].iter().product()
    }

    pub fn action_of(&self, index: usize, player: usize) -> usize {
        (index / self.stride(player)) % self.action_counts[player]
    }

    pub fn index_of(&self, actions: &[usize]) -> usize {
        actions.iter().enumerate().map(|(i, a)| a * self.stride(i)).sum()
    }

    /// Largest `|(phi(a) - phi(a'_i, a_-i)) - (u_i(a) - u_i(a'_i, a_-i))|`
    /// over all joint actions, players and deviations.
    pub fn potential_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.joint_actions() {
            for i in 0..self.players() {
                let stride = self.stride(i);
                let base = a - self.action_of(a, i) * stride;
                for dev in 0..self.action_counts[i] {
                    let b = base + dev * stride;
                    let lhs = self.potential[a] - self.potential[b];
                    let rhs = self.utilities[i][a] - self.utilities[i][b];
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        worst
    }

    /// Random potential game with payoffs in `[0, 1]`: `u_i(a) = phi(a) + d_i(a_-i)`
    /// with `phi` and `d_i` drawn from multiples of `1/1024` in `[0, 1/2]`, so
    /// the potential identity holds exactly in floating point.
    pub fn random<R: Rng + ?Sized>(action_counts: &[usize], rng: &mut R) -> Result<Self> {
        let mut g = FinitePotentialGame {
            action_counts: action_counts.to_vec(),
            utilities: vec![Vec::new(); action_counts.len()],
            potential: Vec::new(),
        };
        if action_counts.is_empty() || action_counts.contains(&0) {
            return Err(Error::InvalidGame("every player needs at least one action".into()));
        }
        let total = g.joint_actions();
        let dyadic = |rng: &mut R| rng.random_range(0..=512u32) as f64 / 1024.0;
        g.potential = (0..total).map(|_| dyadic(rng)).collect();
        for i in 0..g.players() {
            let stride = g.stride(i);
            // d_i depends on a_-i only: index the table by a with a_i zeroed.
            let mut offset = vec![f64::NAN; total];
            let mut table = vec![0.0; total];
            for a in 0..total {
                let base = a - g.action_of(a, i) * stride;
                if offset[base].is_nan() {
                    offset[base] = dyadic(rng);
                }
                table[a] = g.potential[a] + offset[base];
            }
            g.utilities[i] = table;
        }
        g.check_shape()?;
        Ok(g)
    }
}

/// `f(x) = sum_a (prod_j x_j[a_j]) table[a]` over mixed strategies.
#[derive(Clone, Debug)]
pub struct MultilinearFn {
    action_counts: Vec<usize>,
    table: Arc<Vec<f64>>,
}

impl MultilinearFn {
    pub fn new(action_counts: Vec<usize>, table: Vec<f64>) -> Self {
        MultilinearFn {
            action_counts,
            table: Arc::new(table),
        }
    }

    /// Visits every joint action in table order with the product of all its
    /// probabilities and, per player, the product leaving that player out.
    fn accumulate(&self, x: &StrategyProfile, mut visit: impl FnMut(&[usize], f64, &[f64])) {
        let m = self.action_counts.len();
        let mut actions = vec![0usize; m];
        let mut leave_out = vec![0.0; m];
        let mut prefix = vec![1.0; m + 1];
        for a in 0..self.table.len() {
            let mut rest = a;
            for j in (0..m).rev() {
                actions[j] = rest % self.action_counts[j];
                rest /= self.action_counts[j];
            }
            for j in 0..m {
                prefix[j + 1] = prefix[j] * x.block(j)[actions[j]];
            }
            let mut suffix = 1.0;
            for j in (0..m).rev() {
                leave_out[j] = prefix[j] * suffix;
                suffix *= x.block(j)[actions[j]];
            }
            visit(&actions, prefix[m], &leave_out);
        }
    }
}

impl DifferentiableFn for MultilinearFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        let mut sum = 0.0;
        let mut idx = 0;
        self.accumulate(x, |_, w, _| {
            sum += w * self.table[idx];
            idx += 1;
        });
        sum
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        let mut g = vec![0.0; x.dim()];
        let offsets: Vec<usize> = (0..x.players()).map(|j| x.block_range(j).start).collect();
        let mut idx = 0;
        self.accumulate(x, |actions, _, leave_out| {
            let v = self.table[idx];
            for (j, a) in actions.iter().enumerate() {
                g[offsets[j] + a] += v * leave_out[j];
            }
            idx += 1;
        });
        g
    }
}

/// Mixed-strategy extension: players choose distributions over their actions
/// and receive expected payoffs; the expected potential is a potential of the
/// extension.
///
/// With payoffs bounded by `U = max |u|`, every partial derivative is at most
/// `U` in absolute value on the simplices, so `L = U sqrt(sum |A_i|)`; every
/// Hessian entry is also at most `U`, so `M = U sum |A_i|`.
pub fn mixed_extension(fin: &FinitePotentialGame) -> Result<GameSpec> {
    fin.check_shape()?;
    let deviation = fin.potential_deviation();
    if deviation > 1e-12 {
        return Err(Error::PotentialIdentityFailed {
            deviation,
            tolerance: 1e-12,
        });
    }
    let scale = fin
        .utilities
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-12);
    let total_actions: usize = fin.action_counts.iter().sum();
    let mut builder = GameSpec::builder("mixed-extension");
    for (i, &n) in fin.action_counts.iter().enumerate() {
        builder = builder.player(
            StrategySet::simplex(n)?,
            Arc::new(MultilinearFn::new(fin.action_counts.clone(), fin.utilities[i].clone())),
        );
    }
    builder
        .regularity(scale * (total_actions as f64).sqrt(), scale * total_actions as f64)
        .potential(Arc::new(MultilinearFn::new(fin.action_counts.clone(), fin.potential.clone())))
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coordination() -> FinitePotentialGame {
        let u = vec![1.0, 0.0, 0.0, 1.0];
        FinitePotentialGame::new(vec![2, 2], vec![u.clone(), u.clone()], u).unwrap()
    }

    #[test]
    fn uniform_play_in_coordination_game() {
        let g = mixed_extension(&coordination()).unwrap();
        let x = g.profile(vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((g.utility(0).eval(&x) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_profiles_recover_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fin = FinitePotentialGame::random(&[2, 3], &mut rng).unwrap();
        let g = mixed_extension(&fin).unwrap();
        for a1 in 0..2 {
            for a2 in 0..3 {
                let mut v = vec![0.0; 5];
                v[a1] = 1.0;
                v[2 + a2] = 1.0;
                let x = g.profile(v).unwrap();
                let idx = fin.index_of(&[a1, a2]);
                assert_eq!(g.utility(1).eval(&x), fin.utilities[1][idx]);
            }
        }
    }

    #[test]
    fn random_games_are_exact_potential_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fin = FinitePotentialGame::random(&[3, 2, 4], &mut rng).unwrap();
        assert_eq!(fin.potential_deviation(), 0.0);
        assert!(fin.utilities.iter().flatten().all(|u| (0.0..=1.0).contains(u)));
    }

    #[test]
    fn broken_identity_is_rejected() {
        let mut fin = coordination();
        fin.utilities[0][0] = 0.75;
        assert!(matches!(mixed_extension(&fin), Err(Error::PotentialIdentityFailed { .. })));
    }
}
