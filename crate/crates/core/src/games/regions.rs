use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{ConstantFn, Constraint, DifferentiableFn, GameSpec, SharedFn, StrategyProfile, StrategySet};

/// `(x1 - 1/2)(x2 - 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleFn;

impl DifferentiableFn for SaddleFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        (x.as_slice()[0] - 0.5) * (x.as_slice()[1] - 0.5)
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        vec![x.as_slice()[1] - 0.5, x.as_slice()[0] - 0.5]
    }
}

/// `x1 (1 - x2)`, the shared utility of the first example game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossFn;

impl DifferentiableFn for CrossFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        x.as_slice()[0] * (1.0 - x.as_slice()[1])
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        vec![1.0 - x.as_slice()[1], -x.as_slice()[0]]
    }
}

/// `sin(4 pi x1) + x2`; not concave in `x1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveFn;

impl DifferentiableFn for WaveFn {
    fn eval(&self, x: &StrategyProfile) -> f64 {
        (4.0 * PI * x.as_slice()[0]).sin() + x.as_slice()[1]
    }

    fn grad(&self, x: &StrategyProfile) -> Vec<f64> {
        vec![4.0 * PI * (4.0 * PI * x.as_slice()[0]).cos(), 1.0]
    }
}

/// Constraints of the two-dimensional example regions on `[0,1]^2`.
///
/// Region 1: `(x1 - 1/2)(x2 - 1/2) >= 0`. Region 2:
/// `(x1 - 1/2)(x2 - 1/2) - 1/111 >= 0` and `1/11 - (x1 - 1/2)(x2 - 1/2) >= 0`.
pub fn example_region(which: u8) -> Result<Vec<Constraint>> {
    let saddle: SharedFn = Arc::new(SaddleFn);
    match which {
        1 => Ok(vec![Constraint::at_least(saddle, 0.0)]),
        2 => Ok(vec![
            Constraint::at_least(saddle.clone(), 1.0 / 111.0),
            Constraint::at_most(saddle, 1.0 / 11.0),
        ]),
        _ => Err(Error::InvalidParameter(format!("no example region {which}"))),
    }
}

/// Two-player game on `[0,1]^2` over an example region. Region 1 uses the
/// shared utility `x1 (1 - x2)`; region 2 has zero utilities.
pub fn example_game(which: u8) -> Result<GameSpec> {
    let constraints = example_region(which)?;
    let u: SharedFn = match which {
        1 => Arc::new(CrossFn),
        _ => Arc::new(ConstantFn(0.0)),
    };
    GameSpec::builder(format!("example-{which}"))
        .player(StrategySet::unit_box(1)?, u.clone())
        .player(StrategySet::unit_box(1)?, u)
        .constraints(constraints)
        .regularity(2f64.sqrt(), 1.0)
        .build()
}

/// Box of the slice-convexity counterexample: `[0,1] x [0,2]`.
pub const COUNTEREXAMPLE_BOX: ([f64; 2], [f64; 2]) = ([0.0, 0.0], [1.0, 2.0]);

/// `sin(4 pi x1) + x2 >= 1/2`. On [`COUNTEREXAMPLE_BOX`] the rows with
/// `x2 >= 3/2` join the humps of the lower rows into one component, whose
/// lower horizontal slices then fall apart into several intervals.
pub fn counterexample_region() -> Vec<Constraint> {
    vec![Constraint::at_least(Arc::new(WaveFn), 0.5)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x1: f64, x2: f64) -> StrategyProfile {
        StrategyProfile::from_blocks(&[[x1], [x2]])
    }

    #[test]
    fn region_two_excludes_corner_and_center_line() {
        let cs = example_region(2).unwrap();
        // (1/2)(1/2) = 0.25 > 1/11
        assert!(cs[1].margin(&at(1.0, 1.0)) < 0.0);
        for k in 0..=10 {
            assert!(cs[0].margin(&at(0.5, k as f64 / 10.0)) < 0.0);
        }
    }

    #[test]
    fn region_one_center_is_on_boundary() {
        let cs = example_region(1).unwrap();
        assert_eq!(cs[0].margin(&at(0.5, 0.5)), 0.0);
        assert!(example_region(3).is_err());
    }
}
