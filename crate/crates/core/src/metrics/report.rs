//! Line-oriented `key=value` serialization of certificates.

use std::fmt::Write;

use super::{KktCertificate, NashGapReport};

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

pub fn nash_to_text(report: &NashGapReport) -> String {
    let mut out = String::new();
    writeln!(out, "nash.max_gap={:e}", report.max_gap).unwrap();
    for (i, p) in report.players.iter().enumerate() {
        let k = i + 1;
        writeln!(out, "nash.player{k}.gap={:e}", p.gap).unwrap();
        writeln!(out, "nash.player{k}.raw_gap={:e}", p.raw_gap).unwrap();
        writeln!(out, "nash.player{k}.best_response={}", join(&p.best_response)).unwrap();
        writeln!(out, "nash.player{k}.inner_iterations={}", p.status.iterations).unwrap();
        writeln!(out, "nash.player{k}.inner_stationarity={:e}", p.status.stationarity).unwrap();
        writeln!(out, "nash.player{k}.inner_converged={}", p.status.converged).unwrap();
    }
    out
}

pub fn kkt_to_text(cert: &KktCertificate) -> String {
    let mut out = String::new();
    writeln!(out, "kkt.eta={:e}", cert.eta).unwrap();
    writeln!(out, "kkt.lambda={}", join(&cert.lambda)).unwrap();
    writeln!(out, "kkt.primal_violation={:e}", cert.primal_violation).unwrap();
    writeln!(out, "kkt.dual_violation={:e}", cert.dual_violation).unwrap();
    writeln!(out, "kkt.comp_slack={:e}", cert.comp_slack).unwrap();
    writeln!(out, "kkt.stationarity={}", join(&cert.stationarity)).unwrap();
    writeln!(out, "kkt.epsilon_hat={:e}", cert.epsilon_hat()).unwrap();
    out
}
