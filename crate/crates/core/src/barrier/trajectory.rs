use std::io::{self, Write};

use crate::model::StrategyProfile;

/// Snapshot of one iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub iter: usize,
    pub x: StrategyProfile,
    /// `Phi(x)`, when the game has a potential.
    pub phi: Option<f64>,
    /// `Phi^eta(x)`, when the game has a potential.
    pub phi_eta: Option<f64>,
    pub beta: f64,
    pub gamma: f64,
    /// `|| grad_{x_i} B_i(x) ||` per player.
    pub grad_norms: Vec<f64>,
    /// `|| x^{t+1} - x^t ||`.
    pub step_norm: f64,
    /// Clamped Nash gaps per player, when evaluated at this iterate.
    pub nash_gaps: Option<Vec<f64>>,
}

impl TrajectoryRecord {
    /// `|| x^{t+1} - x^t || / gamma`.
    pub fn stationarity_surrogate(&self) -> f64 {
        self.step_norm / self.gamma
    }

    pub fn max_nash_gap(&self) -> Option<f64> {
        self.nash_gaps
            .as_ref()
            .map(|g| g.iter().copied().fold(0.0, f64::max))
    }
}

fn push_num(line: &mut String, v: f64) {
    line.push(',');
    line.push_str(&format!("{v:.16e}"));
}

fn push_opt(line: &mut String, v: Option<f64>) {
    match v {
        Some(v) => push_num(line, v),
        None => line.push(','),
    }
}

/// Writes the trajectory as CSV with columns
/// `t,x_1..x_D,phi,phi_eta,beta,gamma,step_norm,nash_gap_1..nash_gap_m`.
///
/// Numbers carry 17 significant digits; missing values are empty fields.
pub fn write_csv<W: Write>(records: &[TrajectoryRecord], dim: usize, players: usize, mut out: W) -> io::Result<()> {
    let mut header = String::from("t");
    for k in 1..=dim {
        header.push_str(&format!(",x_{k}"));
    }
    header.push_str(",phi,phi_eta,beta,gamma,step_norm");
    for i in 1..=players {
        header.push_str(&format!(",nash_gap_{i}"));
    }
    header.push('\n');
    out.write_all(header.as_bytes())?;
    for r in records {
        let mut line = r.iter.to_string();
        for v in r.x.as_slice() {
            push_num(&mut line, *v);
        }
        push_opt(&mut line, r.phi);
        push_opt(&mut line, r.phi_eta);
        push_num(&mut line, r.beta);
        push_num(&mut line, r.gamma);
        push_num(&mut line, r.step_norm);
        for i in 0..players {
            push_opt(&mut line, r.nash_gaps.as_ref().map(|g| g[i]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rec = TrajectoryRecord {
            iter: 3,
            x: StrategyProfile::from_blocks(&[vec![0.5], vec![0.25]]),
            phi: None,
            phi_eta: Some(-1.0),
            beta: 0.1,
            gamma: 1e-3,
            grad_norms: vec![1.0, 1.0],
            step_norm: 0.0,
            nash_gaps: None,
        };
        let mut buf = Vec::new();
        write_csv(&[rec], 2, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x_1,x_2,phi,phi_eta,beta,gamma,step_norm,nash_gap_1,nash_gap_2");
        assert_eq!(
            lines[1],
            "3,5.0000000000000000e-1,2.5000000000000000e-1,,-1.0000000000000000e0,\
             1.0000000000000001e-1,1.0000000000000000e-3,0.0000000000000000e0,,"
        );
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
