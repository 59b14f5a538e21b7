use crate::error::{Error, Result};
use crate::model::strategy::norm;
use crate::model::{GameSpec, StrategyProfile};

/// Outcome of one player's best-response solve.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerStatus {
    pub iterations: usize,
    /// Norm of the final gradient mapping of the barrier objective.
    pub stationarity: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerGap {
    /// Gap clamped at zero.
    pub gap: f64,
    /// `best response value - u_i(x)` before clamping.
    pub raw_gap: f64,
    pub best_response: Vec<f64>,
    pub status: InnerStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NashGapReport {
    pub players: Vec<PlayerGap>,
    pub max_gap: f64,
}

impl NashGapReport {
    pub fn gaps(&self) -> Vec<f64> {
        self.players.iter().map(|p| p.gap).collect()
    }

    pub fn all_converged(&self) -> bool {
        self.players.iter().all(|p| p.status.converged)
    }
}

const STAGES: usize = 3;
const STAGE_ITERS: usize = 20_000;
const PHASE_ONE_ITERS: usize = 200;
const MIN_STEP: f64 = 1e-18;

/// Player `i`'s best-response problem with `x_{-i}` frozen.
struct Slice<'a> {
    spec: &'a GameSpec,
    x: &'a StrategyProfile,
    player: usize,
}

impl Slice<'_> {
    fn profile(&self, y: &[f64]) -> StrategyProfile {
        self.x.with_block(self.player, y)
    }

    fn margins(&self, z: &StrategyProfile) -> Vec<f64> {
        self.spec.constraints().iter().map(|c| c.margin(z)).collect()
    }

    /// Barrier objective, `-inf` outside the strict interior.
    fn objective(&self, y: &[f64], eta: f64) -> f64 {
        let z = self.profile(y);
        let mut reg = 0.0;
        for m in self.margins(&z) {
            if !(m > 0.0) {
                return f64::NEG_INFINITY;
            }
            reg += m.ln();
        }
        self.spec.utility(self.player).eval(&z) + eta * reg
    }

    fn gradient(&self, y: &[f64], eta: f64) -> Vec<f64> {
        let z = self.profile(y);
        let mut g = self.spec.utility(self.player).partial_grad(&z, self.player);
        if eta > 0.0 {
            for c in self.spec.constraints() {
                let m = c.margin(&z);
                for (gk, ck) in g.iter_mut().zip(c.function().partial_grad(&z, self.player)) {
                    *gk += eta * ck / m;
                }
            }
        }
        g
    }

    fn feasible_utility(&self, y: &[f64]) -> Option<f64> {
        let z = self.profile(y);
        self.margins(&z)
            .iter()
            .all(|m| *m >= 0.0)
            .then(|| self.spec.utility(self.player).eval(&z))
    }

    fn project(&self, y: Vec<f64>) -> Vec<f64> {
        self.spec
            .strategy_set(self.player)
            .project(&y)
            .expect("block dimension is fixed")
    }

    /// Moves `y` into the strict interior of the slice by ascending the
    /// smallest margin. Returns `None` if that fails.
    fn phase_one(&self, y: &[f64]) -> Option<Vec<f64>> {
        let mut y = y.to_vec();
        let mut s = 1e-2 * self.spec.strategy_set(self.player).diameter().max(1e-12);
        for _ in 0..PHASE_ONE_ITERS {
            let z = self.profile(&y);
            let margins = self.margins(&z);
            let (j, m) = margins
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            if m > 0.0 {
                return Some(y);
            }
            let g = self.spec.constraints()[j].function().partial_grad(&z, self.player);
            if norm(&g) == 0.0 {
                return None;
            }
            let cand = self.project(y.iter().zip(&g).map(|(a, b)| a + s * b).collect());
            let z2 = self.profile(&cand);
            let m2 = self.margins(&z2).into_iter().fold(f64::INFINITY, f64::min);
            if m2 > m {
                y = cand;
                s *= 2.0;
            } else {
                s *= 0.5;
                if s < MIN_STEP {
                    return None;
                }
            }
        }
        None
    }
}

/// Projected gradient ascent with backtracking on one barrier stage.
/// Updates `best` with every feasible iterate's utility.
fn ascend(
    slice: &Slice<'_>,
    y: &mut Vec<f64>,
    eta: f64,
    stop: f64,
    step: &mut f64,
    best: &mut (f64, Vec<f64>),
) -> (usize, f64, bool) {
    let mut f = slice.objective(y, eta);
    let mut mapping = f64::INFINITY;
    for it in 0..STAGE_ITERS {
        let g = slice.gradient(y, eta);
        loop {
            let cand = slice.project(y.iter().zip(&g).map(|(a, b)| a + *step * b).collect());
            let d: Vec<f64> = cand.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
            let dn = norm(&d);
            if dn == 0.0 {
                return (it, 0.0, true);
            }
            let f_cand = slice.objective(&cand, eta);
            let linear: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            if f_cand.is_finite() && f_cand >= f + linear - dn * dn / (2.0 * *step) {
                mapping = dn / *step;
                *y = cand;
                f = f_cand;
                if let Some(u) = slice.feasible_utility(y) {
                    if u > best.0 {
                        *best = (u, y.clone());
                    }
                }
                *step *= 2.0;
                break;
            }
            *step *= 0.5;
            if *step < MIN_STEP {
                return (it, mapping, false);
            }
        }
        if mapping <= stop {
            return (it + 1, mapping, true);
        }
    }
    (STAGE_ITERS, mapping, false)
}

fn player_gap(spec: &GameSpec, x: &StrategyProfile, player: usize, tol: f64) -> PlayerGap {
    let slice = Slice { spec, x, player };
    let start = x.block(player).to_vec();
    let u0 = spec.utility(player).eval(x);
    let mut best = (u0, start.clone());
    let set = spec.strategy_set(player);
    // Stationarity target scaled so that `mapping * diameter` is below tol.
    let stop = 1e-2 * tol / set.diameter().max(1e-12);
    let mut status = InnerStatus {
        iterations: 0,
        stationarity: f64::NAN,
        converged: true,
    };

    let interior = if spec.constraint_count() == 0 {
        Some(start.clone())
    } else {
        let z = x.clone();
        if spec.constraints().iter().all(|c| c.margin(&z) > 0.0) {
            Some(start.clone())
        } else {
            slice.phase_one(&start)
        }
    };

    match interior {
        None => status.converged = false,
        Some(mut y) => {
            if let Some(u) = slice.feasible_utility(&y) {
                if u > best.0 {
                    best = (u, y.clone());
                }
            }
            let etas: Vec<f64> = if spec.constraint_count() == 0 {
                vec![0.0]
            } else {
                (0..STAGES).map(|k| tol * 0.5f64.powi(k as i32)).collect()
            };
            let mut step = 1.0 / spec.smoothness();
            for eta in etas {
                let (iters, mapping, ok) = ascend(&slice, &mut y, eta, stop, &mut step, &mut best);
                status.iterations += iters;
                status.stationarity = mapping;
                status.converged &= ok;
            }
        }
    }

    let raw_gap = best.0 - u0;
    PlayerGap {
        gap: raw_gap.max(0.0),
        raw_gap,
        best_response: best.1,
        status,
    }
}

/// `Nash-Gap_i(x) = max_{x'_i in C_i(x_{-i})} u_i(x'_i, x_{-i}) - u_i(x)` per player.
///
/// Each best response is found by log-barrier projected gradient ascent with
/// barrier weights `tol, tol/2, tol/4`, warm-started at `x_i`.
pub fn nash_gap(spec: &GameSpec, x: &StrategyProfile, tol: f64) -> Result<NashGapReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    spec.check_layout(x)?;
    if !spec.in_strategy_space(x, 1e-9) {
        return Err(Error::InfeasibleProfile("profile lies outside the strategy sets".into()));
    }
    if let Some((j, m)) = spec
        .feasibility_margins(x)
        .per_constraint
        .iter()
        .copied()
        .enumerate()
        .find(|(_, m)| !(*m >= 0.0))
    {
        return Err(Error::InfeasibleProfile(format!("constraint {j} has margin {m:e}")));
    }
    let players: Vec<PlayerGap> = (0..spec.players()).map(|i| player_gap(spec, x, i, tol)).collect();
    let max_gap = players.iter().map(|p| p.gap).fold(0.0, f64::max);
    Ok(NashGapReport { players, max_gap })
}

/// Verdict of [`is_epsilon_nash`].
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonNash {
    pub holds: bool,
    /// Maximum Nash gap, when `x` is feasible.
    pub max_gap: Option<f64>,
    /// Why `x` was rejected as infeasible.
    pub infeasible: Option<String>,
}

/// Whether `x` is feasible with maximum Nash gap at most `eps + tol`.
pub fn is_epsilon_nash(spec: &GameSpec, x: &StrategyProfile, eps: f64, tol: f64) -> Result<EpsilonNash> {
    match nash_gap(spec, x, tol) {
        Ok(report) => Ok(EpsilonNash {
            holds: report.max_gap <= eps + tol,
            max_gap: Some(report.max_gap),
            infeasible: None,
        }),
        Err(Error::InfeasibleProfile(reason)) => Ok(EpsilonNash {
            holds: false,
            max_gap: None,
            infeasible: Some(reason),
        }),
        Err(e) => Err(e),
    }
}
