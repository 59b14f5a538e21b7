//! Sampling diagnostics for user-supplied games.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::function::DifferentiableFn;
use super::game::GameSpec;
use super::strategy::{dot, norm, StrategyProfile, StrategySet};
use crate::error::{Error, Result};

/// Max over coordinates of `|central difference - analytic| / (1 + |analytic|)`.
pub fn check_gradient(f: &dyn DifferentiableFn, x: &StrategyProfile, h: f64) -> f64 {
    let analytic = f.grad(x);
    let mut probe = x.clone();
    let mut worst: f64 = 0.0;
    for (k, a) in analytic.iter().enumerate() {
        let orig = x.as_slice()[k];
        probe.as_mut_slice()[k] = orig + h;
        let up = f.eval(&probe);
        probe.as_mut_slice()[k] = orig - h;
        let down = f.eval(&probe);
        probe.as_mut_slice()[k] = orig;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - a).abs() / (1.0 + a.abs()));
    }
    worst
}

/// Sampled regularity constants, already inflated by the safety factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityEstimate {
    pub lipschitz: f64,
    pub smoothness: f64,
}

const SAFETY_FACTOR: f64 = 1.1;

/// Estimates `L` and `M` from gradient norms and gradient differences over
/// random pairs of the strategy space. Covers utilities and constraints.
pub fn estimate_regularity(spec: &GameSpec, pairs: usize, seed: u64) -> RegularityEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fns: Vec<&dyn DifferentiableFn> = spec
        .utilities()
        .iter()
        .map(|u| u.as_ref())
        .chain(spec.constraints().iter().map(|c| c.function().as_ref()))
        .collect();
    let mut lip: f64 = 0.0;
    let mut smooth: f64 = 0.0;
    for _ in 0..pairs {
        let x = spec.sample_profile(&mut rng);
        let y = spec.sample_profile(&mut rng);
        let dist = x.distance(&y);
        for f in &fns {
            let gx = f.grad(&x);
            let gy = f.grad(&y);
            lip = lip.max(norm(&gx)).max(norm(&gy));
            if dist > 1e-12 {
                let diff: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
                smooth = smooth.max(norm(&diff) / dist);
            }
        }
    }
    RegularityEstimate {
        lipschitz: SAFETY_FACTOR * lip,
        smoothness: SAFETY_FACTOR * smooth,
    }
}

/// Largest observed violation of playerwise concavity of utilities and
/// constraints along random own-strategy chords. Non-positive means no
/// violation was found.
pub fn check_playerwise_concavity(spec: &GameSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..samples {
        let i = k % spec.players();
        let set = spec.strategy_set(i);
        let x = spec.sample_profile(&mut rng);
        let other = set.sample(&mut rng);
        let y = x.with_block(i, &other);
        let lam: f64 = rng.random_range(0.0..1.0);
        let mid = y.lerp(&x, lam);
        let fns = spec
            .utilities()
            .iter()
            .map(|u| u.as_ref())
            .chain(spec.constraints().iter().map(|c| c.function().as_ref()));
        for f in fns {
            let chord = lam * f.eval(&x) + (1.0 - lam) * f.eval(&y);
            worst = worst.max(chord - f.eval(&mid));
        }
    }
    worst
}

/// Approximate-MFCQ sampling diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct MfcqDiagnostic {
    pub rho: f64,
    pub ell: f64,
    /// Sampled profiles and the near-active constraint for which no direction
    /// achieved an inner product above `ell`.
    pub violations: Vec<(StrategyProfile, usize)>,
}

impl MfcqDiagnostic {
    pub fn new(rho: f64, ell: f64) -> Result<Self> {
        if !(rho > 0.0 && ell > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rho and ell must be positive, got rho = {rho}, ell = {ell}"
            )));
        }
        Ok(MfcqDiagnostic {
            rho,
            ell,
            violations: Vec::new(),
        })
    }
}

const ATTEMPTS_PER_SAMPLE: usize = 10_000;

/// Random unit direction `delta` such that `x + delta` stays in the strategy space.
fn feasible_direction<R: Rng + ?Sized>(spec: &GameSpec, x: &StrategyProfile, rng: &mut R) -> Vec<f64> {
    let mut delta: Vec<f64> = (0..x.dim()).map(|_| rng.sample(StandardNormal)).collect();
    for (i, set) in spec.strategy_sets().iter().enumerate() {
        if let StrategySet::Simplex { .. } = set {
            let r = x.block_range(i);
            let mean = delta[r.clone()].iter().sum::<f64>() / r.len() as f64;
            delta[r].iter_mut().for_each(|d| *d -= mean);
        }
    }
    let n = norm(&delta);
    if n > 0.0 {
        delta.iter_mut().for_each(|d| *d /= n);
    }
    // Largest t in [0, 1] keeping x + t*delta inside every set.
    let mut t: f64 = 1.0;
    for (i, set) in spec.strategy_sets().iter().enumerate() {
        let r = x.block_range(i);
        let xs = x.block(i);
        let ds = &delta[r];
        match set {
            StrategySet::Box { lower, upper } => {
                for k in 0..xs.len() {
                    if ds[k] > 0.0 {
                        t = t.min((upper[k] - xs[k]) / ds[k]);
                    } else if ds[k] < 0.0 {
                        t = t.min((lower[k] - xs[k]) / ds[k]);
                    }
                }
            }
            StrategySet::Simplex { .. } => {
                for k in 0..xs.len() {
                    if ds[k] < 0.0 {
                        t = t.min(-xs[k] / ds[k]);
                    }
                }
            }
        }
    }
    let t = t.max(0.0);
    delta.iter_mut().for_each(|d| *d *= t);
    delta
}

/// Samples feasible profiles with some margin at most `rho` and searches
/// `directions` random directions for one that increases each such
/// near-active constraint at rate above `ell`.
pub fn sample_mfcq(
    spec: &GameSpec,
    diag: &MfcqDiagnostic,
    samples: usize,
    directions: usize,
    seed: u64,
) -> MfcqDiagnostic {
    let mut out = MfcqDiagnostic {
        rho: diag.rho,
        ell: diag.ell,
        violations: Vec::new(),
    };
    if spec.constraint_count() == 0 || samples == 0 || directions == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = 0;
    for _ in 0..samples * ATTEMPTS_PER_SAMPLE {
        if found == samples {
            break;
        }
        let x = spec.sample_profile(&mut rng);
        let margins = spec.feasibility_margins(&x);
        if !margins.is_feasible() {
            continue;
        }
        let active: Vec<usize> = (0..spec.constraint_count())
            .filter(|&j| margins.per_constraint[j] <= diag.rho)
            .collect();
        if active.is_empty() {
            continue;
        }
        found += 1;
        let grads: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| spec.constraints()[j].function().grad(&x))
            .collect();
        let mut satisfied = vec![false; active.len()];
        for _ in 0..directions {
            let delta = feasible_direction(spec, &x, &mut rng);
            for (s, g) in satisfied.iter_mut().zip(&grads) {
                if dot(&delta, g) > diag.ell {
                    *s = true;
                }
            }
            if satisfied.iter().all(|s| *s) {
                break;
            }
        }
        for (j, ok) in active.iter().zip(&satisfied) {
            if !ok {
                out.violations.push((x.clone(), *j));
            }
        }
    }
    out
}

/// Samples profiles whose every margin is at most `rho` away from a point near
/// `center`; used to probe a specific region for MFCQ failures.
pub fn sample_mfcq_near(
    spec: &GameSpec,
    diag: &MfcqDiagnostic,
    center: &StrategyProfile,
    radius: f64,
    samples: usize,
    directions: usize,
    seed: u64,
) -> MfcqDiagnostic {
    let mut out = MfcqDiagnostic {
        rho: diag.rho,
        ell: diag.ell,
        violations: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let values: Vec<f64> = center
            .as_slice()
            .iter()
            .map(|c| c + rng.random_range(-radius..=radius))
            .collect();
        let Ok(x) = spec.project(&center.with_values(values).expect("same layout")) else {
            continue;
        };
        let margins = spec.feasibility_margins(&x);
        if !margins.is_feasible() {
            continue;
        }
        for j in 0..spec.constraint_count() {
            if margins.per_constraint[j] > diag.rho {
                continue;
            }
            let g = spec.constraints()[j].function().grad(&x);
            let ok = (0..directions).any(|_| dot(&feasible_direction(spec, &x, &mut rng), &g) > diag.ell);
            if !ok {
                out.violations.push((x.clone(), j));
            }
        }
    }
    out
}
