use log::{debug, warn};

use super::{
    adaptive_stepsize, barrier_gradients, block_norms, hessian_norm_bound, regularized_potential,
    step_from_gradients, StepsizeRule, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::metrics::{nash_gap, NashGapReport};
use crate::model::{GameSpec, StrategyProfile};

/// Stepsizes below this end the run.
pub const STEPSIZE_FLOOR: f64 = 1e-14;

const MONOTONE_SLACK: f64 = 1e-10;
const SEGMENT_SLACK: f64 = 1e-12;
const SEGMENT_POINTS: usize = 10;

/// Solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierConfig {
    pub eta: f64,
    pub epsilon: f64,
    /// Number of update steps `T`; `0` only evaluates `x0`.
    pub max_iters: usize,
    pub rule: StepsizeRule,
    /// Record every `record_every`-th iterate (the last one is always kept).
    pub record_every: usize,
    /// Evaluate Nash gaps every `nash_gap_every` iterations; `0` evaluates
    /// only the best iterate at the end.
    pub nash_gap_every: usize,
    /// Accuracy of the inner Nash-gap solves.
    pub nash_gap_tol: f64,
    /// Stop as soon as an evaluated Nash gap is at most `epsilon`.
    pub stop_at_target: bool,
    /// Check feasibility along segments, monotonicity of `Phi^eta` and
    /// sufficient increase at every step.
    pub verify: bool,
}

impl BarrierConfig {
    /// `eta = epsilon`, appendix stepsizes.
    pub fn new(epsilon: f64, max_iters: usize) -> Self {
        BarrierConfig {
            eta: epsilon,
            epsilon,
            max_iters,
            rule: StepsizeRule::Appendix,
            record_every: 1,
            nash_gap_every: 0,
            nash_gap_tol: 1e-4,
            stop_at_target: false,
            verify: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be at least 1".into()));
        }
        if !(self.nash_gap_tol > 0.0) {
            return Err(Error::InvalidParameter("nash_gap_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    IterationCap,
    NashGapTargetMet,
    StepsizeUnderflow,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::IterationCap => "iteration-cap",
            Termination::NashGapTargetMet => "nash-gap-target-met",
            Termination::StepsizeUnderflow => "stepsize-underflow",
        })
    }
}

/// Findings of the per-step checks in verify mode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationLog {
    pub steps_checked: usize,
    /// Smallest margin over all iterates and segment points.
    pub min_margin: f64,
    pub monotonicity_violations: usize,
    /// Largest decrease `Phi^eta(x^t) - Phi^eta(x^{t+1})`.
    pub worst_decrease: f64,
    pub segment_violations: usize,
    /// Smallest `segment margin - beta^t / 2` (appendix rule) or segment margin.
    pub worst_segment_slack: f64,
    pub sufficient_increase_checked: usize,
    pub sufficient_increase_violations: usize,
}

impl VerificationLog {
    fn new() -> Self {
        VerificationLog {
            min_margin: f64::INFINITY,
            worst_segment_slack: f64::INFINITY,
            ..Default::default()
        }
    }

    pub fn is_clean(&self) -> bool {
        self.min_margin > 0.0
            && self.monotonicity_violations == 0
            && self.segment_violations == 0
            && self.sufficient_increase_violations == 0
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub trajectory: Vec<TrajectoryRecord>,
    pub best_iterate: StrategyProfile,
    pub best_iter: usize,
    /// Nash gap at the best iterate, or `||x^{t+1} - x^t|| / gamma` when no
    /// gap was evaluated during the run.
    pub best_criterion: f64,
    /// Nash-gap report at the best iterate.
    pub best_gap: Option<NashGapReport>,
    pub termination: Termination,
    /// Number of update steps performed.
    pub iterations: usize,
    pub verification: Option<VerificationLog>,
}

impl SolveResult {
    pub fn best_record(&self) -> &TrajectoryRecord {
        self.trajectory
            .iter()
            .find(|r| r.iter == self.best_iter)
            .expect("best iterate is always recorded")
    }
}

struct Candidate {
    criterion: f64,
    record: TrajectoryRecord,
    report: Option<NashGapReport>,
}

/// Runs the simultaneous log-barrier gradient ascent from `x0`.
pub fn solve(spec: &GameSpec, config: &BarrierConfig, x0: &StrategyProfile) -> Result<SolveResult> {
    config.validate()?;
    spec.check_layout(x0)?;
    if !spec.in_strategy_space(x0, 1e-12) {
        return Err(Error::InfeasibleProfile("x0 lies outside the strategy sets".into()));
    }
    let beta0 = spec.feasibility_margins(x0).min;
    if !(beta0 > 0.0) {
        return Err(Error::InfeasibleStart { beta: beta0 });
    }
    if beta0 < config.eta {
        warn!("initial margin {beta0:e} is below eta = {:e}", config.eta);
    }
    if !spec.is_potential() {
        warn!("game '{}' has no potential; convergence is not guaranteed", spec.name());
    }

    let eta = config.eta;
    let by_gap = config.nash_gap_every > 0;
    let mut trajectory = Vec::new();
    let mut best: Option<Candidate> = None;
    let mut log = config.verify.then(VerificationLog::new);
    let mut termination = Termination::IterationCap;
    let mut x = x0.clone();
    let mut phi_eta_x = if spec.is_potential() && config.verify {
        Some(regularized_potential(spec, &x, eta)?)
    } else {
        None
    };
    let mut t = 0;

    loop {
        let margins = spec.feasibility_margins(&x);
        let beta = margins.min;
        if !(beta > 0.0) {
            let (constraint, margin) = margins.first_violation().unwrap_or((0, beta));
            return Err(Error::NonStrictlyFeasible { constraint, margin });
        }
        let gamma = adaptive_stepsize(spec, eta, beta, config.rule)?;
        let grads = barrier_gradients(spec, &x, eta)?;
        let next = step_from_gradients(spec, &x, &grads, gamma)?;
        let step_norm = next.distance(&x);
        let last = t == config.max_iters;

        let gaps = if by_gap && (t % config.nash_gap_every == 0 || last) {
            Some(nash_gap(spec, &x, config.nash_gap_tol)?)
        } else {
            None
        };

        let make_record = |gaps: Option<&NashGapReport>| -> Result<TrajectoryRecord> {
            let (phi, phi_eta) = match spec.potential() {
                Some(p) => (Some(p.eval(&x)), Some(regularized_potential(spec, &x, eta)?)),
                None => (None, None),
            };
            Ok(TrajectoryRecord {
                iter: t,
                x: x.clone(),
                phi,
                phi_eta,
                beta,
                gamma,
                grad_norms: block_norms(&grads),
                step_norm,
                nash_gaps: gaps.map(|r| r.gaps()),
            })
        };

        let record = if t % config.record_every == 0 || last || gaps.is_some() {
            let r = make_record(gaps.as_ref())?;
            trajectory.push(r.clone());
            Some(r)
        } else {
            None
        };

        let criterion = if by_gap {
            gaps.as_ref().map(|g| g.max_gap)
        } else {
            Some(step_norm / gamma)
        };
        if let Some(c) = criterion {
            if best.as_ref().is_none_or(|b| c < b.criterion) {
                let record = match record {
                    Some(r) => r,
                    None => make_record(gaps.as_ref())?,
                };
                best = Some(Candidate {
                    criterion: c,
                    record,
                    report: gaps.clone(),
                });
            }
        }

        if let Some(g) = &gaps {
            debug!("t = {t}: max Nash gap {:e}", g.max_gap);
            if config.stop_at_target && g.max_gap <= config.epsilon {
                termination = Termination::NashGapTargetMet;
                break;
            }
        }
        if last {
            break;
        }
        if gamma < STEPSIZE_FLOOR {
            warn!("stepsize {gamma:e} fell below {STEPSIZE_FLOOR:e} at t = {t}");
            termination = Termination::StepsizeUnderflow;
            break;
        }

        if let Some(log) = log.as_mut() {
            phi_eta_x = verify_step(spec, config, log, &x, &next, beta, gamma, step_norm, phi_eta_x)?;
        }
        x = next;
        t += 1;
    }

    let mut best = best.expect("at least one iterate is evaluated");
    if best.report.is_none() {
        let report = nash_gap(spec, &best.record.x, config.nash_gap_tol)?;
        best.record.nash_gaps = Some(report.gaps());
        best.report = Some(report);
    }
    match trajectory.binary_search_by_key(&best.record.iter, |r| r.iter) {
        Ok(pos) => trajectory[pos] = best.record.clone(),
        Err(pos) => trajectory.insert(pos, best.record.clone()),
    }
    if let Some(log) = log.as_mut() {
        log.min_margin = log.min_margin.min(spec.feasibility_margins(&x).min);
    }

    Ok(SolveResult {
        best_iterate: best.record.x.clone(),
        best_iter: best.record.iter,
        best_criterion: best.criterion,
        best_gap: best.report,
        trajectory,
        termination,
        iterations: t,
        verification: log,
    })
}

/// Checks one step `x -> next`; returns `Phi^eta(next)` when available.
#[allow(clippy::too_many_arguments)]
fn verify_step(
    spec: &GameSpec,
    config: &BarrierConfig,
    log: &mut VerificationLog,
    x: &StrategyProfile,
    next: &StrategyProfile,
    beta: f64,
    gamma: f64,
    step_norm: f64,
    phi_eta_x: Option<f64>,
) -> Result<Option<f64>> {
    log.steps_checked += 1;
    log.min_margin = log.min_margin.min(beta);
    let appendix = config.rule == StepsizeRule::Appendix;
    let mut segment_ok = true;
    let mut half_beta_feasible = true;
    for k in 1..=SEGMENT_POINTS {
        let lam = k as f64 / SEGMENT_POINTS as f64;
        let point = x.lerp(next, lam);
        let margin = spec.feasibility_margins(&point).min;
        log.min_margin = log.min_margin.min(margin);
        let slack = if appendix { margin - beta / 2.0 } else { margin };
        log.worst_segment_slack = log.worst_segment_slack.min(slack);
        half_beta_feasible &= margin >= beta / 2.0 - SEGMENT_SLACK;
        let ok = if appendix { slack >= -SEGMENT_SLACK } else { margin > 0.0 };
        segment_ok &= ok;
    }
    if !segment_ok {
        log.segment_violations += 1;
        // Barrier terms are undefined past the boundary.
        let m = spec.feasibility_margins(next);
        if let Some((constraint, margin)) = m.first_violation() {
            return Err(Error::NonStrictlyFeasible { constraint, margin });
        }
    }
    let Some(before) = phi_eta_x else {
        return Ok(None);
    };
    let after = regularized_potential(spec, next, config.eta)?;
    let decrease = before - after;
    log.worst_decrease = log.worst_decrease.max(decrease);
    if decrease > MONOTONE_SLACK {
        log.monotonicity_violations += 1;
    }
    // The smoothness bound only covers segments that stay beta/2-feasible.
    if half_beta_feasible {
        let bound = hessian_norm_bound(spec, config.eta, beta / 2.0)?;
        if 1.0 / gamma >= bound {
            log.sufficient_increase_checked += 1;
            let required = step_norm * step_norm / (2.0 * gamma) * (1.0 - 1e-6);
            if after - before < required - MONOTONE_SLACK {
                log.sufficient_increase_violations += 1;
            }
        }
    }
    Ok(Some(after))
}
