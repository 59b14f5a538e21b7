//! `congame run`: solve a game and write trajectory, report and plots.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use congame_core::barrier::{solve, write_csv, BarrierConfig, SolveResult};
use congame_core::games::{
    identical_interest_game, mixed_extension, parse_finite_game, parse_topology, routing_game, RoutingTopology,
};
use congame_core::metrics::{kkt_certificate, kkt_to_text, nash_to_text};
use congame_core::model::check_gradient;
use congame_core::{Error, GameSpec, StrategyProfile};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{GameKind, RunConfig};
use crate::svg::{LinePlot, Series};
use crate::{CliError, EXIT_OK, EXIT_TARGET_MISSED};

const GRADIENT_CHECK_POINTS: usize = 20;
const GRADIENT_CHECK_STEP: f64 = 1e-6;

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output_dir: PathBuf,
    pub best_gap: f64,
    pub result: SolveResult,
}

fn config_err(e: Error) -> CliError {
    CliError::config(e.to_string())
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

pub fn build_game(cfg: &RunConfig) -> Result<GameSpec, CliError> {
    match cfg.game {
        GameKind::IdenticalInterest => identical_interest_game(cfg.a, cfg.b, cfg.alpha).map_err(config_err),
        GameKind::Routing => {
            let topology = match &cfg.topology {
                Some(p) => parse_topology(&read(p)?).map_err(config_err)?,
                None => RoutingTopology::default(),
            };
            routing_game(&topology).map_err(config_err)
        }
        GameKind::Mixed => {
            let path = cfg.finite_game.as_ref().ok_or_else(|| CliError::config("missing --finite-game"))?;
            let fin = parse_finite_game(&read(path)?).map_err(config_err)?;
            mixed_extension(&fin).map_err(config_err)
        }
    }
}

fn default_x0(cfg: &RunConfig, spec: &GameSpec) -> Vec<f64> {
    match cfg.game {
        GameKind::IdenticalInterest => vec![0.1, 0.1],
        GameKind::Routing => vec![0.5; spec.total_dim()],
        GameKind::Mixed => spec.center().into_values(),
    }
}

/// Resolves `x0` and checks that it is strictly feasible.
fn initial_profile(cfg: &mut RunConfig, spec: &GameSpec) -> Result<StrategyProfile, CliError> {
    if cfg.x0.is_empty() {
        cfg.x0 = default_x0(cfg, spec);
    }
    let x0 = spec.profile(cfg.x0.clone()).map_err(config_err)?;
    if !spec.in_strategy_space(&x0, 1e-12) {
        return Err(CliError::infeasible("x0 lies outside the strategy sets"));
    }
    let margins = spec.feasibility_margins(&x0);
    if let Some((j, m)) = margins.first_violation() {
        return Err(CliError::infeasible(format!(
            "x0 is not strictly feasible: constraint {} has margin {m:e}",
            j + 1
        )));
    }
    Ok(x0)
}

/// Worst relative central-difference error over utilities and constraints at
/// seeded random profiles.
fn gradient_check(spec: &GameSpec, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..GRADIENT_CHECK_POINTS {
        let x = spec.sample_interior(&mut rng, 0.98);
        for u in spec.utilities() {
            worst = worst.max(check_gradient(u.as_ref(), &x, GRADIENT_CHECK_STEP));
        }
        for c in spec.constraints() {
            worst = worst.max(check_gradient(c.function().as_ref(), &x, GRADIENT_CHECK_STEP));
        }
    }
    worst
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
}

fn report_text(cfg: &RunConfig, spec: &GameSpec, res: &SolveResult, exit_code: i32, grad_err: Option<f64>) -> Result<String, CliError> {
    let best = res.best_record();
    let mut out = String::new();
    writeln!(out, "game={}", spec.name()).unwrap();
    writeln!(out, "players={}", spec.players()).unwrap();
    writeln!(out, "lipschitz={:e}", spec.lipschitz()).unwrap();
    writeln!(out, "smoothness={:e}", spec.smoothness()).unwrap();
    writeln!(out, "termination={}", res.termination).unwrap();
    writeln!(out, "iterations={}", res.iterations).unwrap();
    writeln!(out, "best.iter={}", res.best_iter).unwrap();
    writeln!(out, "best.x={}", join(res.best_iterate.as_slice())).unwrap();
    writeln!(out, "best.beta={:e}", best.beta).unwrap();
    writeln!(out, "best.gamma={:e}", best.gamma).unwrap();
    if let Some(phi) = best.phi {
        writeln!(out, "best.phi={phi:e}").unwrap();
    }
    let values: Vec<f64> = spec.constraints().iter().map(|c| c.user_value(&res.best_iterate)).collect();
    writeln!(out, "best.constraint_values={}", join(&values)).unwrap();
    if let Some(gap) = &res.best_gap {
        out.push_str(&nash_to_text(gap));
    }
    let cert = kkt_certificate(spec, &res.best_iterate, cfg.eta).map_err(|e| CliError::internal(e.to_string()))?;
    out.push_str(&kkt_to_text(&cert));
    if let Some(v) = &res.verification {
        writeln!(out, "verify.clean={}", v.is_clean()).unwrap();
        writeln!(out, "verify.steps_checked={}", v.steps_checked).unwrap();
        writeln!(out, "verify.min_margin={:e}", v.min_margin).unwrap();
        writeln!(out, "verify.monotonicity_violations={}", v.monotonicity_violations).unwrap();
        writeln!(out, "verify.worst_decrease={:e}", v.worst_decrease).unwrap();
        writeln!(out, "verify.segment_violations={}", v.segment_violations).unwrap();
        writeln!(out, "verify.worst_segment_slack={:e}", v.worst_segment_slack).unwrap();
        writeln!(out, "verify.sufficient_increase_checked={}", v.sufficient_increase_checked).unwrap();
        writeln!(out, "verify.sufficient_increase_violations={}", v.sufficient_increase_violations).unwrap();
    }
    if let Some(e) = grad_err {
        writeln!(out, "verify.gradient_check_error={e:e}").unwrap();
    }
    writeln!(out, "target={:e}", cfg.epsilon + cfg.nash_tol).unwrap();
    writeln!(out, "exit_code={exit_code}").unwrap();
    Ok(out)
}

fn gap_plot(res: &SolveResult, players: usize) -> LinePlot {
    let series = (0..players)
        .map(|i| Series {
            name: format!("player {}", i + 1),
            points: res
                .trajectory
                .iter()
                .filter_map(|r| r.nash_gaps.as_ref().map(|g| (r.iter as f64, g[i].max(1e-16))))
                .collect(),
            dashed: false,
        })
        .collect();
    LinePlot {
        title: "Nash gap per player".into(),
        x_label: "iteration".into(),
        y_label: "gap".into(),
        log_y: true,
        series,
    }
}

fn constraint_plot(spec: &GameSpec, res: &SolveResult) -> LinePlot {
    let first = res.trajectory.first().map_or(0.0, |r| r.iter as f64);
    let last = res.trajectory.last().map_or(0.0, |r| r.iter as f64);
    let mut series = Vec::new();
    for (j, c) in spec.constraints().iter().enumerate() {
        series.push(Series {
            name: format!("c{}", j + 1),
            points: res.trajectory.iter().map(|r| (r.iter as f64, c.user_value(&r.x))).collect(),
            dashed: false,
        });
        series.push(Series {
            name: format!("bound {}", j + 1),
            points: vec![(first, c.user_bound()), (last, c.user_bound())],
            dashed: true,
        });
    }
    LinePlot {
        title: "Constraint values".into(),
        x_label: "iteration".into(),
        y_label: "value".into(),
        log_y: false,
        series,
    }
}

/// Runs the solver for a resolved configuration and writes all outputs.
pub fn run(mut cfg: RunConfig) -> Result<RunOutcome, CliError> {
    let spec = build_game(&cfg)?;
    let x0 = initial_profile(&mut cfg, &spec)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let dir = cfg.output_dir.clone();
    fs::write(dir.join("config.txt"), cfg.to_text())?;

    let solver_cfg = BarrierConfig {
        eta: cfg.eta,
        epsilon: cfg.epsilon,
        max_iters: cfg.iterations,
        rule: cfg.stepsize,
        record_every: cfg.record_every,
        nash_gap_every: cfg.nash_gap_every,
        nash_gap_tol: cfg.nash_tol,
        stop_at_target: cfg.stop_at_target,
        verify: cfg.verify,
    };
    info!("solving '{}' for T = {}", spec.name(), cfg.iterations);
    let res = solve(&spec, &solver_cfg, &x0).map_err(|e| match e {
        Error::InvalidParameter(m) => CliError::config(m),
        Error::InfeasibleStart { .. } | Error::NonStrictlyFeasible { .. } => CliError::infeasible(e.to_string()),
        other => CliError::internal(other.to_string()),
    })?;
    let grad_err = cfg.verify.then(|| gradient_check(&spec, cfg.seed));

    let best_gap = res.best_gap.as_ref().map_or(f64::INFINITY, |g| g.max_gap);
    let exit_code = if best_gap <= cfg.epsilon + cfg.nash_tol { EXIT_OK } else { EXIT_TARGET_MISSED };

    let csv = BufWriter::new(fs::File::create(dir.join("trajectory.csv"))?);
    write_csv(&res.trajectory, spec.total_dim(), spec.players(), csv)?;
    fs::write(dir.join("report.txt"), report_text(&cfg, &spec, &res, exit_code, grad_err)?)?;
    fs::write(dir.join("gaps.svg"), gap_plot(&res, spec.players()).to_svg())?;
    fs::write(dir.join("constraints.svg"), constraint_plot(&spec, &res).to_svg())?;
    info!("best gap {best_gap:e} at iteration {}", res.best_iter);

    Ok(RunOutcome { exit_code, output_dir: dir, best_gap, result: res })
}
