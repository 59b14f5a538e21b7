use super::nash::{nash_gap, NashGapReport};
use crate::barrier::strict_margins;
use crate::error::{Error, Result};
use crate::model::{GameSpec, StrategyProfile};

/// Residuals of the approximate KKT conditions with playerwise Lagrangians
/// `L_i(x_i, lambda) = u_i(x) + sum_j lambda_j (c_j(x) - alpha_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KktCertificate {
    pub eta: f64,
    /// `lambda_j = (eta / 2) / (c_j(x) - alpha_j)`.
    pub lambda: Vec<f64>,
    /// `max_j [alpha_j - c_j(x)]_+`.
    pub primal_violation: f64,
    /// `max_j [-lambda_j]_+`.
    pub dual_violation: f64,
    /// `max_j |lambda_j (c_j(x) - alpha_j)|`.
    pub comp_slack: f64,
    /// `max_{x'_i in X_i} <x'_i - x_i, grad_{x_i} L_i>` per player.
    pub stationarity: Vec<f64>,
}

impl KktCertificate {
    pub fn max_stationarity(&self) -> f64 {
        self.stationarity.iter().copied().fold(0.0, f64::max)
    }

    /// `max(comp_slack, max_i stationarity_i)`.
    pub fn epsilon_hat(&self) -> f64 {
        self.comp_slack.max(self.max_stationarity())
    }
}

pub fn kkt_certificate(spec: &GameSpec, x: &StrategyProfile, eta: f64) -> Result<KktCertificate> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be non-negative, got {eta}")));
    }
    spec.check_layout(x)?;
    let margins = strict_margins(spec, x)?;
    let lambda: Vec<f64> = margins.per_constraint.iter().map(|m| 0.5 * eta / m).collect();
    let primal_violation = margins
        .per_constraint
        .iter()
        .map(|m| (-m).max(0.0))
        .fold(0.0, f64::max);
    let dual_violation = lambda.iter().map(|l| (-l).max(0.0)).fold(0.0, f64::max);
    let comp_slack = lambda
        .iter()
        .zip(&margins.per_constraint)
        .map(|(l, m)| (l * m).abs())
        .fold(0.0, f64::max);
    let mut stationarity = Vec::with_capacity(spec.players());
    for (i, set) in spec.strategy_sets().iter().enumerate() {
        let mut g = spec.utility(i).partial_grad(x, i);
        for (c, l) in spec.constraints().iter().zip(&lambda) {
            for (gk, ck) in g.iter_mut().zip(c.function().partial_grad(x, i)) {
                *gk += l * ck;
            }
        }
        stationarity.push(set.max_linear_gain(x.block(i), &g)?.max(0.0));
    }
    Ok(KktCertificate {
        eta,
        lambda,
        primal_violation,
        dual_violation,
        comp_slack,
        stationarity,
    })
}

/// Measured Nash gap against the `2 * epsilon_hat` bound implied by the
/// certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct KktNashCheck {
    pub certificate: KktCertificate,
    pub epsilon_hat: f64,
    pub nash: NashGapReport,
    /// `2 * epsilon_hat + tol`.
    pub bound: f64,
    pub holds: bool,
}

pub fn kkt_implies_nash_check(spec: &GameSpec, x: &StrategyProfile, eta: f64, tol: f64) -> Result<KktNashCheck> {
    let certificate = kkt_certificate(spec, x, eta)?;
    let epsilon_hat = certificate.epsilon_hat();
    let nash = nash_gap(spec, x, tol)?;
    let bound = 2.0 * epsilon_hat + tol;
    Ok(KktNashCheck {
        holds: nash.max_gap <= bound,
        certificate,
        epsilon_hat,
        nash,
        bound,
    })
}
