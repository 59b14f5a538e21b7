//! Run configuration: flags, `config.txt` files and per-game defaults.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use congame_core::barrier::StepsizeRule;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameKind {
    IdenticalInterest,
    Routing,
    Mixed,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::IdenticalInterest => "identical-interest",
            GameKind::Routing => "routing",
            GameKind::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "identical-interest" => Ok(GameKind::IdenticalInterest),
            "routing" => Ok(GameKind::Routing),
            "mixed" => Ok(GameKind::Mixed),
            _ => Err(CliError::config(format!(
                "unknown game '{s}' (expected identical-interest, routing or mixed)"
            ))),
        }
    }
}

/// Flags of `congame run`. Unset flags fall back to `--config`, then to the
/// game's defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// identical-interest, routing or mixed
    #[arg(long)]
    pub game: Option<String>,
    /// Identical-interest coefficient of (x1 - x2)^2
    #[arg(long)]
    pub a: Option<f64>,
    /// Identical-interest coefficient of x1^2 + x2^2
    #[arg(long)]
    pub b: Option<f64>,
    /// Identical-interest threshold on 1 - x1 x2
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Routing topology file (default: built-in five-link network)
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Finite potential game file for --game mixed
    #[arg(long)]
    pub finite_game: Option<PathBuf>,
    /// Barrier weight (defaults to epsilon)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Target Nash gap
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Number of update steps
    #[arg(long = "T", short = 'T')]
    pub iterations: Option<usize>,
    /// appendix, main-text or fixed:<gamma>
    #[arg(long)]
    pub stepsize: Option<String>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Evaluate Nash gaps every N steps (0: only at the best iterate)
    #[arg(long)]
    pub nash_gap_every: Option<usize>,
    /// Accuracy of the Nash-gap inner solves
    #[arg(long)]
    pub nash_tol: Option<f64>,
    /// Comma-separated initial profile
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Seed for verification sampling
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "CONGAME_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    /// Check feasibility, monotonicity and sufficient increase at every step
    #[arg(long)]
    pub verify: bool,
    /// Stop once an evaluated Nash gap reaches epsilon
    #[arg(long)]
    pub stop_at_target: bool,
    /// Resolved configuration of an earlier run
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub game: GameKind,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub topology: Option<PathBuf>,
    pub finite_game: Option<PathBuf>,
    pub eta: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub stepsize: StepsizeRule,
    pub record_every: usize,
    pub nash_gap_every: usize,
    pub nash_tol: f64,
    /// Empty means the game default, materialized once the game is built.
    pub x0: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub verify: bool,
    pub stop_at_target: bool,
}

struct GameDefaults {
    iterations: usize,
    record_every: usize,
    nash_gap_every: usize,
}

fn defaults(game: GameKind) -> GameDefaults {
    match game {
        GameKind::IdenticalInterest | GameKind::Mixed => GameDefaults {
            iterations: 20_000,
            record_every: 1,
            nash_gap_every: 200,
        },
        // Near the cap the routing stepsize is ~1e-7, so the horizon is longer.
        GameKind::Routing => GameDefaults {
            iterations: 3_000_000,
            record_every: 1_000,
            nash_gap_every: 20_000,
        },
    }
}

fn parse_map(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("config line {}: expected key=value", n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    map.get(key)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::config(format!("config key '{key}': cannot parse '{v}'")))
        })
        .transpose()
}

fn get_list(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<f64>>, CliError> {
    match map.get(key).filter(|v| !v.is_empty()) {
        None => Ok(None),
        Some(v) => v
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::config(format!("config key '{key}': cannot parse '{p}'")))
            })
            .collect::<Result<Vec<f64>, _>>()
            .map(Some),
    }
}

impl RunConfig {
    /// Resolves flags over an optional config file over game defaults.
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                parse_map(&text)?
            }
            None => BTreeMap::new(),
        };
        let game_name = args
            .game
            .clone()
            .or_else(|| file.get("game").cloned())
            .ok_or_else(|| CliError::config("--game is required"))?;
        let game = GameKind::parse(&game_name)?;
        let d = defaults(game);

        let epsilon = args.epsilon.or(get(&file, "epsilon")?).unwrap_or(1e-2);
        let stepsize = match args.stepsize.clone().or_else(|| file.get("stepsize").cloned()) {
            Some(s) => s.parse::<StepsizeRule>().map_err(|e| CliError::config(e.to_string()))?,
            None => StepsizeRule::Appendix,
        };
        let path_of = |flag: &Option<PathBuf>, key: &str| {
            flag.clone()
                .or_else(|| file.get(key).filter(|v| !v.is_empty()).map(PathBuf::from))
        };
        let cfg = RunConfig {
            game,
            a: args.a.or(get(&file, "a")?).unwrap_or(1.0),
            b: args.b.or(get(&file, "b")?).unwrap_or(1.0),
            alpha: args.alpha.or(get(&file, "alpha")?).unwrap_or(0.85),
            topology: path_of(&args.topology, "topology"),
            finite_game: path_of(&args.finite_game, "finite_game"),
            eta: args.eta.or(get(&file, "eta")?).unwrap_or(epsilon),
            epsilon,
            iterations: args.iterations.or(get(&file, "T")?).unwrap_or(d.iterations),
            stepsize,
            record_every: args.record_every.or(get(&file, "record_every")?).unwrap_or(d.record_every),
            nash_gap_every: args
                .nash_gap_every
                .or(get(&file, "nash_gap_every")?)
                .unwrap_or(d.nash_gap_every),
            nash_tol: args.nash_tol.or(get(&file, "nash_tol")?).unwrap_or(1e-4),
            x0: args.x0.clone().or(get_list(&file, "x0")?).unwrap_or_default(),
            seed: args.seed.or(get(&file, "seed")?).unwrap_or(0),
            output_dir: path_of(&args.output_dir, "output_dir").unwrap_or_else(|| PathBuf::from("congame-output")),
            verify: args.verify || get(&file, "verify")?.unwrap_or(false),
            stop_at_target: args.stop_at_target || get(&file, "stop_at_target")?.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("eta", self.eta)?;
        positive("epsilon", self.epsilon)?;
        positive("nash_tol", self.nash_tol)?;
        if self.record_every == 0 {
            return Err(CliError::config("record_every must be at least 1"));
        }
        if self.game == GameKind::Mixed && self.finite_game.is_none() {
            return Err(CliError::config("--game mixed needs --finite-game"));
        }
        Ok(())
    }

    /// `key=value` text with every setting explicit; `x0` must already be
    /// materialized.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let x0: Vec<String> = self.x0.iter().map(|v| format!("{v:e}")).collect();
        let mut out = String::new();
        writeln!(out, "game={}", self.game.name()).unwrap();
        writeln!(out, "a={:e}", self.a).unwrap();
        writeln!(out, "b={:e}", self.b).unwrap();
        writeln!(out, "alpha={:e}", self.alpha).unwrap();
        writeln!(out, "topology={}", path(&self.topology)).unwrap();
        writeln!(out, "finite_game={}", path(&self.finite_game)).unwrap();
        writeln!(out, "eta={:e}", self.eta).unwrap();
        writeln!(out, "epsilon={:e}", self.epsilon).unwrap();
        writeln!(out, "T={}", self.iterations).unwrap();
        writeln!(out, "stepsize={}", self.stepsize).unwrap();
        writeln!(out, "record_every={}", self.record_every).unwrap();
        writeln!(out, "nash_gap_every={}", self.nash_gap_every).unwrap();
        writeln!(out, "nash_tol={:e}", self.nash_tol).unwrap();
        writeln!(out, "x0={}", x0.join(",")).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        writeln!(out, "output_dir={}", self.output_dir.display()).unwrap();
        writeln!(out, "verify={}", self.verify).unwrap();
        writeln!(out, "stop_at_target={}", self.stop_at_target).unwrap();
        out
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        RunConfig::resolve(&RunArgs {
            config: Some(path.to_path_buf()),
            ..Default::default()
        })
    }
}
