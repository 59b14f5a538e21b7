//! Custom region description.
//!
//! ```text
//! box 0 1 0 2                          # lower/upper pair per axis
//! constraint >= 0.5 : 1:2,0 -1:0,1     # sum of coef:exponents monomials
//! constraint <= 0.25 : 1:1,1
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Constraint, DifferentiableFn, StrategyProfile};

/// Sum of monomials `coef * prod_k x_k^{e_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialSum {
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl DifferentiableFn for MonomialSum {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        let x = x.as_slice();
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(p, v)| v.powi(*p as i32)).product::<f64>())
            .sum()
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        let v = x.as_slice();
        let mut g = vec![0.0; v.len()];
        for (c, e) in &self.terms {
            for k in 0..v.len() {
                let pk = e.get(k).copied().unwrap_or(0);
                if pk == 0 {
                    continue;
                }
                let rest: f64 = e
                    .iter()
                    .zip(v)
                    .enumerate()
                    .map(|(j, (p, xv))| if j == k { xv.powi(*p as i32 - 1) } else { xv.powi(*p as i32) })
                    .product();
                g[k] += c * pk as f64 * rest;
            }
        }
        g
    }
}

/// Parsed region file.
#[derive(Clone, Debug)]
pub struct RegionFile {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| err(line, format!("'{s}' is not a number")))
}

pub fn parse_region(text: &str) -> Result<RegionFile> {
    let mut bounds: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut constraints = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        match words.next() {
            Some("box") => {
                let v = words.map(|w| number(line, w)).collect::<Result<Vec<f64>>>()?;
                if v.is_empty() || v.len() % 2 != 0 {
                    return Err(err(line, "box needs a lower/upper pair per axis"));
                }
                bounds = Some((v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect()));
            }
            Some("constraint") => {
                let dims = bounds
                    .as_ref()
                    .map(|b| b.0.len())
                    .ok_or_else(|| err(line, "'box' must come before constraints"))?;
                let sense = words.next().ok_or_else(|| err(line, "missing '>=' or '<='"))?;
                let threshold = number(line, words.next().ok_or_else(|| err(line, "missing threshold"))?)?;
                if words.next() != Some(":") {
                    return Err(err(line, "expected ':' after the threshold"));
                }
                let mut terms = Vec::new();
                for w in words {
                    let (c, e) = w
                        .split_once(':')
                        .ok_or_else(|| err(line, format!("term '{w}' is not coef:exponents")))?;
                    let exps = e
                        .split(',')
                        .map(|p| p.parse::<u32>().map_err(|_| err(line, format!("bad exponent '{p}'"))))
                        .collect::<Result<Vec<u32>>>()?;
                    if exps.len() != dims {
                        return Err(err(line, format!("term '{w}' needs {dims} exponents")));
                    }
                    terms.push((number(line, c)?, exps));
                }
                let f = Arc::new(MonomialSum { terms });
                constraints.push(match sense {
                    ">=" => Constraint::at_least(f, threshold),
                    "<=" => Constraint::at_most(f, threshold),
                    other => return Err(err(line, format!("unknown comparison '{other}'"))),
                });
            }
            Some(other) => return Err(err(line, format!("unknown keyword '{other}'"))),
            None => {}
        }
    }
    let (lower, upper) = bounds.ok_or_else(|| err(0, "missing 'box'"))?;
    Ok(RegionFile {
        lower,
        upper,
        constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_saddle_region() {
        // (x1 - 1/2)(x2 - 1/2) = x1 x2 - x1/2 - x2/2 + 1/4 >= 0
        let r = parse_region("box 0 1 0 1\nconstraint >= 0 : 1:1,1 -0.5:1,0 -0.5:0,1 0.25:0,0\n").unwrap();
        assert_eq!(r.lower, vec![0.0, 0.0]);
        assert_eq!(r.upper, vec![1.0, 1.0]);
        let x = StrategyProfile::from_blocks(&[[0.9], [0.8]]);
        assert!((r.constraints[0].margin(&x) - 0.4 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_region("constraint >= 0 : 1:1,1").is_err());
        assert!(parse_region("box 0 1 0").is_err());
        assert!(parse_region("box 0 1 0 1\nconstraint == 0 : 1:1,1").is_err());
        assert!(parse_region("box 0 1 0 1\nconstraint >= 0 : 1:1").is_err());
    }
}
