//! Strategy spaces and joint strategy profiles.

use std::ops::Range;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// A compact convex set of strategies available to one player.
#[derive(Clone, Debug, PartialEq)]
pub enum StrategySet {
    /// Axis-aligned box `lower <= y <= upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Probability simplex of the given dimension.
    Simplex { dim: usize },
}

impl StrategySet {
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        Self::boxed(vec![lower], vec![upper])
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidStrategySet("box must have dimension >= 1".into()));
        }
        for (k, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(Error::InvalidStrategySet(format!(
                    "coordinate {k}: need finite lower <= upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(StrategySet::Box { lower, upper })
    }

    /// Unit cube `[0, 1]^dim`.
    pub fn unit_box(dim: usize) -> Result<Self> {
        Self::boxed(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStrategySet("simplex must have dimension >= 1".into()));
        }
        Ok(StrategySet::Simplex { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            StrategySet::Box { lower, .. } => lower.len(),
            StrategySet::Simplex { dim } => *dim,
        }
    }

    /// Euclidean projection of `y` onto the set.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        Ok(match self {
            StrategySet::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
            StrategySet::Simplex { .. } => project_simplex(y),
        })
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.dim() {
            return false;
        }
        match self {
            StrategySet::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            StrategySet::Simplex { .. } => {
                y.iter().all(|v| *v >= -tol) && (y.iter().sum::<f64>() - 1.0).abs() <= tol
            }
        }
    }

    /// `max_{y' in set} <y' - y, g>` in closed form.
    ///
    /// Boxes pick the bound matching the sign of each gradient coordinate;
    /// simplices pick the best vertex.
    pub fn max_linear_gain(&self, y: &[f64], g: &[f64]) -> Result<f64> {
        self.check_dim(y)?;
        self.check_dim(g)?;
        Ok(match self {
            StrategySet::Box { lower, upper } => y
                .iter()
                .zip(g)
                .zip(lower.iter().zip(upper))
                .map(|((v, gk), (l, u))| {
                    if *gk > 0.0 {
                        gk * (u - v)
                    } else {
                        gk * (l - v)
                    }
                })
                .sum(),
            StrategySet::Simplex { .. } => {
                let best = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let current: f64 = y.iter().zip(g).map(|(a, b)| a * b).sum();
                best - current
            }
        })
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            StrategySet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (u - l) * (u - l))
                .sum::<f64>()
                .sqrt(),
            StrategySet::Simplex { dim } => {
                if *dim > 1 {
                    std::f64::consts::SQRT_2
                } else {
                    0.0
                }
            }
        }
    }

    /// Chebyshev-style center: box midpoint or simplex barycenter.
    pub fn center(&self) -> Vec<f64> {
        match self {
            StrategySet::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
            StrategySet::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
        }
    }

    /// Uniform sample from the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            StrategySet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect(),
            StrategySet::Simplex { dim } => {
                // Normalized exponentials are Dirichlet(1, ..., 1), i.e. uniform.
                let e: Vec<f64> = (0..*dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let total: f64 = e.iter().sum();
                e.into_iter().map(|v| v / total).collect()
            }
        }
    }

    /// Uniform sample from the set shrunk towards its center by `shrink` in `[0, 1)`,
    /// so that small finite-difference stencils stay inside.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R, shrink: f64) -> Vec<f64> {
        let c = self.center();
        self.sample(rng)
            .into_iter()
            .zip(c)
            .map(|(v, ck)| ck + (1.0 - shrink) * (v - ck))
            .collect()
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: y.len(),
            });
        }
        Ok(())
    }
}

/// Projection onto the probability simplex by sorting and shifting.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    y.iter().map(|v| (v - shift).max(0.0)).collect()
}

/// Joint strategy `x = (x_1, ..., x_m)`, stored flat with per-player offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyProfile {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

impl StrategyProfile {
    pub fn from_blocks<B: AsRef<[f64]>>(blocks: &[B]) -> Self {
        let mut values = Vec::new();
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        for b in blocks {
            values.extend_from_slice(b.as_ref());
            offsets.push(values.len());
        }
        StrategyProfile { values, offsets }
    }

    /// Builds a profile from a flat vector and per-player block dimensions.
    pub fn from_flat(dims: &[usize], values: Vec<f64>) -> Result<Self> {
        let total: usize = dims.iter().sum();
        if total != values.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: values.len(),
            });
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(StrategyProfile { values, offsets })
    }

    /// Same layout as `self` with new flat values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: values.len(),
            });
        }
        Ok(StrategyProfile {
            values,
            offsets: self.offsets.clone(),
        })
    }

    pub fn players(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn block_range(&self, player: usize) -> Range<usize> {
        self.offsets[player]..self.offsets[player + 1]
    }

    pub fn block(&self, player: usize) -> &[f64] {
        &self.values[self.block_range(player)]
    }

    pub fn block_mut(&mut self, player: usize) -> &mut [f64] {
        let r = self.block_range(player);
        &mut self.values[r]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(x'_i, x_{-i})`: copy of `self` with player `i`'s block replaced.
    pub fn with_block(&self, player: usize, block: &[f64]) -> Self {
        let mut out = self.clone();
        out.block_mut(player).copy_from_slice(block);
        out
    }

    pub fn distance(&self, other: &StrategyProfile) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &StrategyProfile, t: f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + t * (b - a))
            .collect();
        StrategyProfile {
            values,
            offsets: self.offsets.clone(),
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_projection_clamps() {
        let set = StrategySet::unit_box(2).unwrap();
        assert_eq!(set.project(&[1.5, -0.2]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn simplex_barycenter_is_fixed() {
        let set = StrategySet::simplex(3).unwrap();
        let y = [1.0 / 3.0; 3];
        let p = set.project(&y).unwrap();
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn simplex_projection_matches_grid_oracle() {
        let y = [1.0, 0.5, 0.0];
        let p = StrategySet::simplex(3).unwrap().project(&y).unwrap();
        // brute force over the simplex discretized at 1e-3
        let n = 1000;
        let mut best = (f64::INFINITY, [0.0; 3]);
        for i in 0..=n {
            for j in 0..=(n - i) {
                let z = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                let d: f64 = z.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, z);
                }
            }
        }
        let dev = p.iter().zip(&best.1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= 2e-3, "deviation {dev}, projection {p:?}, oracle {:?}", best.1);
        // closed form for this input: shift 0.25
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15 && p[2] == 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let set = StrategySet::unit_box(2).unwrap();
        assert!(matches!(
            set.project(&[0.5]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(StrategySet::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(StrategySet::simplex(0).is_err());
    }

    #[test]
    fn linear_gain_closed_forms() {
        let bx = StrategySet::unit_box(2).unwrap();
        let gain = bx.max_linear_gain(&[0.25, 0.5], &[2.0, -1.0]).unwrap();
        assert!((gain - (2.0 * 0.75 + 0.5)).abs() < 1e-15);
        let sx = StrategySet::simplex(3).unwrap();
        let gain = sx.max_linear_gain(&[0.5, 0.5, 0.0], &[1.0, 0.0, 3.0]).unwrap();
        assert!((gain - 2.5).abs() < 1e-15);
    }

    #[test]
    fn samples_lie_in_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sx = StrategySet::simplex(4).unwrap();
        for _ in 0..100 {
            assert!(sx.contains(&sx.sample(&mut rng), 1e-12));
        }
    }

    #[test]
    fn profile_blocks() {
        let x = StrategyProfile::from_blocks(&[vec![1.0, 2.0], vec![3.0]]);
        assert_eq!(x.players(), 2);
        assert_eq!(x.block(0), &[1.0, 2.0]);
        assert_eq!(x.block(1), &[3.0]);
        let y = x.with_block(1, &[5.0]);
        assert_eq!(y.as_slice(), &[1.0, 2.0, 5.0]);
        assert_eq!(x.block_dims(), vec![2, 1]);
    }
}
