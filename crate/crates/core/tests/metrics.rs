use congame_core::barrier::{solve, BarrierConfig};
use congame_core::games::{example_game, identical_interest_game, mixed_extension, FinitePotentialGame};
use congame_core::metrics::{is_epsilon_nash, kkt_certificate, kkt_implies_nash_check, kkt_to_text, nash_gap, nash_to_text};
use congame_core::model::StrategyProfile;
use congame_core::GameSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn profile(v: &[f64]) -> StrategyProfile {
    StrategyProfile::from_blocks(&v.iter().map(|x| [*x]).collect::<Vec<_>>())
}

fn ii(alpha: f64) -> GameSpec {
    identical_interest_game(1.0, 1.0, alpha).unwrap()
}

fn u(x1: f64, x2: f64) -> f64 {
    (x1 + x2) - (x1 - x2).powi(2) - (x1 * x1 + x2 * x2)
}

/// Brute-force gap of player `i` over a 1e-4 grid of the feasible slice
/// `{ y in [0,1] : 1 - y * other >= alpha }`.
fn grid_gap(x: [f64; 2], i: usize, alpha: f64) -> f64 {
    let other = x[1 - i];
    let here = u(x[0], x[1]);
    let mut best = f64::NEG_INFINITY;
    for k in 0..=10_000 {
        let y = k as f64 * 1e-4;
        if 1.0 - y * other < alpha {
            continue;
        }
        let v = if i == 0 { u(y, other) } else { u(other, y) };
        best = best.max(v);
    }
    best - here
}

#[test]
fn gap_at_origin() {
    // u(y, 0) = y - a y^2 - b y^2 peaks at y = 1/4 with value 1/8
    let oracle = grid_gap([0.0, 0.0], 0, 0.85);
    assert!((oracle - 0.125).abs() < 1e-8);
    let report = nash_gap(&ii(0.85), &profile(&[0.0, 0.0]), 1e-6).unwrap();
    for p in &report.players {
        assert!((p.gap - oracle).abs() < 1e-5, "gap {}", p.gap);
        assert!((p.best_response[0] - 0.25).abs() < 1e-3);
    }
}

#[test]
fn gap_matches_grid_oracle() {
    let spec = ii(0.85);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 30 {
        let x = spec.sample_profile(&mut rng);
        if spec.feasibility_margins(&x).min < 0.0 {
            continue;
        }
        let report = nash_gap(&spec, &x, 1e-4).unwrap();
        let xs = [x.as_slice()[0], x.as_slice()[1]];
        for i in 0..2 {
            let oracle = grid_gap(xs, i, 0.85);
            assert!(
                (report.players[i].raw_gap - oracle).abs() <= 2e-4,
                "x = {xs:?}, player {i}: {} vs {oracle}",
                report.players[i].raw_gap
            );
        }
        checked += 1;
    }
}

#[test]
fn constant_own_utility_has_zero_gap() {
    let spec = example_game(2).unwrap();
    // (x1 - 1/2)(x2 - 1/2) = 0.08 lies between 1/111 and 1/11
    let report = nash_gap(&spec, &profile(&[0.9, 0.7]), 1e-4).unwrap();
    assert_eq!(report.max_gap, 0.0);
}

#[test]
fn slice_maximizer_has_zero_gap() {
    // d u / d x1 = 1 - 2 (x1 - x2) - 2 x1 vanishes at x1 = (1 + 2 x2) / 4
    let x = profile(&[0.35, 0.2]);
    let report = nash_gap(&ii(0.85), &x, 1e-4).unwrap();
    assert!(report.players[0].gap <= 1e-4);
    assert!(report.players[1].gap > 1e-2);
}

#[test]
fn gap_rejects_infeasible_profiles() {
    assert!(nash_gap(&ii(0.85), &profile(&[0.9, 0.9]), 1e-4).is_err());
}

#[test]
fn epsilon_nash_verdicts() {
    let spec = ii(0.85);
    let v = is_epsilon_nash(&spec, &profile(&[0.0, 0.0]), 10.0, 1e-4).unwrap();
    assert!(v.holds);
    let v = is_epsilon_nash(&spec, &profile(&[0.0, 0.0]), 0.1, 1e-4).unwrap();
    assert!(!v.holds && v.max_gap.is_some());
    let v = is_epsilon_nash(&spec, &profile(&[0.9, 0.9]), 10.0, 1e-4).unwrap();
    assert!(!v.holds && v.max_gap.is_none() && v.infeasible.is_some());
}

#[test]
fn kkt_complementary_slackness_is_half_eta() {
    let spec = ii(0.85);
    for (x, eta) in [([0.1, 0.1], 1e-2), ([0.3, 0.2], 0.1), ([0.0, 1.0], 0.5)] {
        let c = kkt_certificate(&spec, &profile(&x), eta).unwrap();
        assert!((c.comp_slack - eta / 2.0).abs() <= 1e-15 * eta.max(1.0));
        assert!(c.lambda.iter().all(|l| *l >= 0.0));
        assert_eq!(c.primal_violation, 0.0);
    }
}

#[test]
fn kkt_without_regularization() {
    let c = kkt_certificate(&ii(0.85), &profile(&[0.3, 0.2]), 0.0).unwrap();
    assert_eq!(c.lambda, vec![0.0]);
    assert_eq!(c.comp_slack, 0.0);
    // variational residual of the utility gradient over [0,1]
    let g1: f64 = 1.0 - 2.0 * (0.3 - 0.2) - 2.0 * 0.3;
    let expected = if g1 > 0.0 { g1 * (1.0 - 0.3) } else { -g1 * 0.3 };
    assert!((c.stationarity[0] - expected).abs() < 1e-14);
}

#[test]
fn kkt_stationarity_matches_grid_oracle() {
    let spec = ii(0.85);
    let x = [0.3, 0.2];
    let eta = 0.1;
    let c = kkt_certificate(&spec, &profile(&x), eta).unwrap();
    let margin = 1.0 - x[0] * x[1] - 0.85;
    let lambda = (eta / 2.0) / margin;
    assert!((c.lambda[0] - lambda).abs() < 1e-14);
    for i in 0..2 {
        let (own, other) = (x[i], x[1 - i]);
        // gradient of u + lambda * (1 - x1 x2) in the own coordinate
        let g = 1.0 - 2.0 * (own - other) - 2.0 * own - lambda * other;
        let mut best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let y = k as f64 * 1e-3;
            best = best.max((y - own) * g);
        }
        assert!((c.stationarity[i] - best).abs() < 1e-12, "player {i}");
    }
}

#[test]
fn kkt_stationarity_over_simplex_selects_best_vertex() {
    let fin = FinitePotentialGame::new(
        vec![3, 2],
        vec![vec![0.2, 0.4, 0.1, 0.3, 0.5, 0.0], vec![0.2, 0.4, 0.1, 0.3, 0.5, 0.0]],
        vec![0.2, 0.4, 0.1, 0.3, 0.5, 0.0],
    )
    .unwrap();
    let spec = mixed_extension(&fin).unwrap();
    let x = StrategyProfile::from_blocks(&[vec![0.2, 0.5, 0.3], vec![0.6, 0.4]]);
    let c = kkt_certificate(&spec, &x, 0.0).unwrap();
    let g = spec.utility(0).partial_grad(&x, 0);
    let base: f64 = g.iter().zip(x.block(0)).map(|(a, b)| a * b).sum();
    let vertex = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!((c.stationarity[0] - (vertex - base)).abs() < 1e-14);
}

#[test]
fn kkt_at_interior_stationary_point() {
    // (1/2, 1/2) is the unconstrained Nash point; alpha = 0.5 leaves margin 0.25
    let spec = ii(0.5);
    let x = profile(&[0.5, 0.5]);
    for eta in [1e-3, 1e-2] {
        let check = kkt_implies_nash_check(&spec, &x, eta, 1e-4).unwrap();
        assert!((check.epsilon_hat - eta / 2.0).abs() < 1e-12);
        assert!(check.nash.max_gap <= eta + 1e-4);
        assert!(check.holds);
    }
    let exact = kkt_implies_nash_check(&spec, &x, 0.0, 1e-6).unwrap();
    assert_eq!(exact.epsilon_hat, 0.0);
    assert!(exact.nash.max_gap <= 1e-6);
}

#[test]
fn kkt_bound_holds_at_solver_output() {
    let spec = ii(0.85);
    let mut cfg = BarrierConfig::new(1e-2, 20_000);
    cfg.nash_gap_every = 500;
    let res = solve(&spec, &cfg, &profile(&[0.1, 0.1])).unwrap();
    let check = kkt_implies_nash_check(&spec, &res.best_iterate, 1e-2, 1e-4).unwrap();
    assert!(check.holds, "{} > {}", check.nash.max_gap, check.bound);
}

#[test]
fn reports_serialize_as_key_value_lines() {
    let spec = ii(0.85);
    let x = profile(&[0.1, 0.1]);
    let text = nash_to_text(&nash_gap(&spec, &x, 1e-4).unwrap()) + &kkt_to_text(&kkt_certificate(&spec, &x, 0.01).unwrap());
    for line in text.lines() {
        let (k, v) = line.split_once('=').unwrap();
        assert!(!k.is_empty() && !v.is_empty(), "{line}");
    }
    assert!(text.contains("nash.player2.gap="));
    assert!(text.contains("kkt.comp_slack=5e-3"));
}
