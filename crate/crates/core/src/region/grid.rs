use crate::error::{Error, Result};
use crate::model::{Constraint, StrategyProfile};

/// Largest grid [`rasterize`] accepts.
pub const CELL_BUDGET: usize = 10_000_000;

/// Feasibility raster of a box, one axis per single-coordinate player.
///
/// Cells are stored with axis 0 varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub dims: Vec<usize>,
    pub mask: Vec<bool>,
    /// Component label of each feasible cell.
    pub labels: Vec<Option<usize>>,
    pub component_count: usize,
}

impl GridRegion {
    pub fn cells(&self) -> usize {
        self.mask.len()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.dims[..axis].iter().product()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().enumerate().map(|(a, c)| c * self.stride(a)).sum()
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|n| {
                let c = index % n;
                index /= n;
                c
            })
            .collect()
    }

    pub fn cell_center(&self, coords: &[usize]) -> Vec<f64> {
        coords
            .iter()
            .enumerate()
            .map(|(a, &c)| self.lower[a] + (c as f64 + 0.5) * (self.upper[a] - self.lower[a]) / self.dims[a] as f64)
            .collect()
    }

    /// Region from a precomputed mask; components are labeled here.
    pub fn from_mask(lower: Vec<f64>, upper: Vec<f64>, dims: Vec<usize>, mask: Vec<bool>) -> Result<Self> {
        let cells: usize = dims.iter().product();
        if mask.len() != cells || lower.len() != dims.len() || upper.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: cells,
                found: mask.len(),
            });
        }
        let mut region = GridRegion {
            lower,
            upper,
            dims,
            mask,
            labels: vec![None; cells],
            component_count: 0,
        };
        label_components(&mut region);
        Ok(region)
    }

    /// Number of cells in each component.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.component_count];
        for l in self.labels.iter().flatten() {
            sizes[*l] += 1;
        }
        sizes
    }
}

/// Rasterizes `constraints` over the box `[lower, upper]` with `resolution`
/// cells per axis. A cell is feasible when every constraint holds at its
/// center; components join cells that share a face.
pub fn rasterize(constraints: &[Constraint], lower: &[f64], upper: &[f64], resolution: &[usize]) -> Result<GridRegion> {
    let n = resolution.len();
    if n == 0 || lower.len() != n || upper.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lower.len().min(upper.len()),
        });
    }
    if let Some(r) = resolution.iter().find(|r| **r < 2) {
        return Err(Error::InvalidParameter(format!("resolution must be at least 2 per axis, got {r}")));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
        return Err(Error::InvalidParameter("grid box needs lower < upper on every axis".into()));
    }
    let cells = resolution
        .iter()
        .try_fold(1usize, |acc, r| acc.checked_mul(*r))
        .unwrap_or(usize::MAX);
    if cells > CELL_BUDGET {
        return Err(Error::CellBudgetExceeded {
            cells,
            budget: CELL_BUDGET,
        });
    }

    let mut region = GridRegion {
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        dims: resolution.to_vec(),
        mask: Vec::with_capacity(cells),
        labels: vec![None; cells],
        component_count: 0,
    };
    for idx in 0..cells {
        let center = region.cell_center(&region.coords(idx));
        let blocks: Vec<[f64; 1]> = center.iter().map(|c| [*c]).collect();
        let x = StrategyProfile::from_blocks(&blocks);
        region.mask.push(constraints.iter().all(|c| c.margin(&x) >= 0.0));
    }
    label_components(&mut region);
    Ok(region)
}

fn label_components(region: &mut GridRegion) {
    let strides: Vec<usize> = (0..region.dims.len()).map(|a| region.stride(a)).collect();
    let mut stack = Vec::new();
    let mut next = 0;
    for start in 0..region.cells() {
        if !region.mask[start] || region.labels[start].is_some() {
            continue;
        }
        region.labels[start] = Some(next);
        stack.push(start);
        while let Some(idx) = stack.pop() {
            for (a, &s) in strides.iter().enumerate() {
                let c = (idx / s) % region.dims[a];
                let mut visit = |nb: usize| {
                    if region.mask[nb] && region.labels[nb].is_none() {
                        region.labels[nb] = Some(next);
                        stack.push(nb);
                    }
                };
                if c > 0 {
                    visit(idx - s);
                }
                if c + 1 < region.dims[a] {
                    visit(idx + s);
                }
            }
        }
        next += 1;
    }
    region.component_count = next;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConstantFn;
    use std::sync::Arc;

    #[test]
    fn whole_box_is_one_component() {
        let c = Constraint::at_least(Arc::new(ConstantFn(1.0)), 0.0);
        let r = rasterize(&[c], &[0.0, 0.0], &[1.0, 1.0], &[10, 7]).unwrap();
        assert_eq!(r.component_count, 1);
        assert!(r.mask.iter().all(|m| *m));
        assert_eq!(r.component_sizes(), vec![70]);
    }

    #[test]
    fn empty_region_has_no_components() {
        let c = Constraint::at_least(Arc::new(ConstantFn(-1.0)), 0.0);
        let r = rasterize(&[c], &[0.0, 0.0], &[1.0, 1.0], &[5, 5]).unwrap();
        assert_eq!(r.component_count, 0);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            rasterize(&[], &[0.0, 0.0], &[1.0, 1.0], &[1, 5]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            rasterize(&[], &[0.0, 0.0], &[1.0, 1.0], &[4000, 4000]),
            Err(Error::CellBudgetExceeded { .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let r = rasterize(&[], &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[3, 4, 5]).unwrap();
        for idx in 0..r.cells() {
            assert_eq!(r.index(&r.coords(idx)), idx);
        }
        assert_eq!(r.cell_center(&[0, 0, 0]), vec![1.0 / 6.0, 0.125, 0.1]);
    }
}
