//! Plain-text formats for routing topologies and finite games.
//!
//! Both formats are line oriented: a keyword followed by whitespace-separated
//! numbers. Blank lines and text after `#` are ignored.
//!
//! Routing topology:
//!
//! ```text
//! profit 42
//! bounds 0 10
//! cost 0 1 5        # one line per link, coefficients lowest degree first
//! path 0 1 0 1 0    # one incidence row per player
//! cap 2 2.7         # link number (from 1) and cap
//! lipschitz 155     # optional
//! smoothness 60     # optional
//! ```
//!
//! Finite game (tables in lexicographic joint-action order, last player fastest):
//!
//! ```text
//! actions 2 2
//! potential 1 0 0 1
//! utility 1 0 0 1
//! utility 1 0 0 1
//! ```

use std::fmt::Write;

use super::finite::FinitePotentialGame;
use super::routing::RoutingTopology;
use crate::error::{Error, Result};
use crate::model::Polynomial;

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    args: Vec<&'a str>,
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(n, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let keyword = words.next()?;
        Some(Line {
            number: n + 1,
            keyword,
            args: words.collect(),
        })
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl Line<'_> {
    fn numbers(&self) -> Result<Vec<f64>> {
        self.args
            .iter()
            .map(|a| {
                a.parse::<f64>()
                    .map_err(|_| parse_err(self.number, format!("'{a}' is not a number")))
            })
            .collect()
    }

    fn exactly(&self, n: usize) -> Result<Vec<f64>> {
        let v = self.numbers()?;
        if v.len() != n {
            return Err(parse_err(
                self.number,
                format!("'{}' takes {n} value(s), got {}", self.keyword, v.len()),
            ));
        }
        Ok(v)
    }
}

pub fn parse_topology(text: &str) -> Result<RoutingTopology> {
    let mut profit = None;
    let mut bounds = None;
    let mut costs = Vec::new();
    let mut incidence = Vec::new();
    let mut caps = Vec::new();
    let mut lipschitz = None;
    let mut smoothness = None;
    for line in lines(text) {
        match line.keyword {
            "profit" => profit = Some(line.exactly(1)?[0]),
            "bounds" => {
                let v = line.exactly(2)?;
                bounds = Some((v[0], v[1]));
            }
            "cost" => {
                let v = line.numbers()?;
                if v.is_empty() {
                    return Err(parse_err(line.number, "cost needs at least one coefficient"));
                }
                costs.push(Polynomial::new(v));
            }
            "path" => {
                let row = line
                    .args
                    .iter()
                    .map(|a| match *a {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(parse_err(line.number, format!("incidence entry '{a}' is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                incidence.push(row);
            }
            "cap" => {
                let v = line.exactly(2)?;
                if v[0] < 1.0 || v[0].fract() != 0.0 {
                    return Err(parse_err(line.number, "link numbers start at 1"));
                }
                caps.push((v[0] as usize - 1, v[1]));
            }
            "lipschitz" => lipschitz = Some(line.exactly(1)?[0]),
            "smoothness" => smoothness = Some(line.exactly(1)?[0]),
            other => return Err(parse_err(line.number, format!("unknown keyword '{other}'"))),
        }
    }
    let (lower, upper) = bounds.ok_or_else(|| parse_err(0, "missing 'bounds'"))?;
    let topology = RoutingTopology {
        incidence,
        link_costs: costs,
        profit: profit.ok_or_else(|| parse_err(0, "missing 'profit'"))?,
        caps,
        lower,
        upper,
        lipschitz,
        smoothness,
    };
    topology.validate()?;
    Ok(topology)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn topology_to_text(t: &RoutingTopology) -> String {
    let mut out = String::new();
    writeln!(out, "profit {}", t.profit).unwrap();
    writeln!(out, "bounds {} {}", t.lower, t.upper).unwrap();
    for p in &t.link_costs {
        writeln!(out, "cost {}", join(p.coeffs())).unwrap();
    }
    for row in &t.incidence {
        let cells: Vec<&str> = row.iter().map(|u| if *u { "1" } else { "0" }).collect();
        writeln!(out, "path {}", cells.join(" ")).unwrap();
    }
    for (k, cap) in &t.caps {
        writeln!(out, "cap {} {}", k + 1, cap).unwrap();
    }
    if let Some(l) = t.lipschitz {
        writeln!(out, "lipschitz {l}").unwrap();
    }
    if let Some(m) = t.smoothness {
        writeln!(out, "smoothness {m}").unwrap();
    }
    out
}

pub fn parse_finite_game(text: &str) -> Result<FinitePotentialGame> {
    let mut actions = None;
    let mut potential = None;
    let mut utilities = Vec::new();
    for line in lines(text) {
        match line.keyword {
            "actions" => {
                let counts = line
                    .args
                    .iter()
                    .map(|a| {
                        a.parse::<usize>()
                            .map_err(|_| parse_err(line.number, format!("'{a}' is not an action count")))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                actions = Some(counts);
            }
            "potential" => potential = Some(line.numbers()?),
            "utility" => utilities.push(line.numbers()?),
            other => return Err(parse_err(line.number, format!("unknown keyword '{other}'"))),
        }
    }
    FinitePotentialGame::new(
        actions.ok_or_else(|| parse_err(0, "missing 'actions'"))?,
        utilities,
        potential.ok_or_else(|| parse_err(0, "missing 'potential'"))?,
    )
}

pub fn finite_game_to_text(g: &FinitePotentialGame) -> String {
    let mut out = String::new();
    let counts: Vec<String> = g.action_counts.iter().map(|n| n.to_string()).collect();
    writeln!(out, "actions {}", counts.join(" ")).unwrap();
    writeln!(out, "potential {}", join(&g.potential)).unwrap();
    for u in &g.utilities {
        writeln!(out, "utility {}", join(u)).unwrap();
    }
    out
}
