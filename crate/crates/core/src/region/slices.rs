use super::grid::GridRegion;

/// An axis-parallel line on which one component's cells are not contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceViolation {
    pub axis: usize,
    /// Cell coordinates of the line with the `axis` coordinate set to 0.
    pub line: Vec<usize>,
    pub component: usize,
    /// Number of separate runs of the component on the line.
    pub runs: usize,
}

/// Start indices of every line parallel to `axis`.
fn line_starts(region: &GridRegion, axis: usize) -> impl Iterator<Item = usize> + '_ {
    (0..region.cells()).filter(move |idx| (idx / region.stride(axis)).is_multiple_of(region.dims[axis]))
}

/// Checks that within every component, every line parallel to any axis
/// meets the component in one contiguous run of cells.
pub fn slice_convexity_check(region: &GridRegion) -> Vec<SliceViolation> {
    let mut violations = Vec::new();
    for axis in 0..region.dims.len() {
        let stride = region.stride(axis);
        for start in line_starts(region, axis) {
            // runs[c] = number of maximal runs of component c on this line
            let mut runs = vec![0usize; region.component_count];
            let mut prev = None;
            for k in 0..region.dims[axis] {
                let label = region.labels[start + k * stride];
                if let Some(c) = label {
                    if prev != Some(c) {
                        runs[c] += 1;
                    }
                }
                prev = label;
            }
            for (component, &r) in runs.iter().enumerate() {
                if r > 1 {
                    violations.push(SliceViolation {
                        axis,
                        line: region.coords(start),
                        component,
                        runs: r,
                    });
                }
            }
        }
    }
    violations
}

/// For one component, the lines parallel to an axis that meet it.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceSupport {
    pub component: usize,
    /// Grid dimensions with the axis removed.
    pub dims: Vec<usize>,
    /// Whether each line (indexed over the remaining axes, lowest axis
    /// fastest) contains a cell of the component.
    pub mask: Vec<bool>,
}

/// Grid analogue of the support of a component's feasible responses for the
/// player owning `axis`: the set of other players' strategies that leave the
/// player at least one response inside the component.
pub fn component_slice_support(region: &GridRegion, axis: usize) -> Vec<SliceSupport> {
    let dims: Vec<usize> = region
        .dims
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != axis)
        .map(|(_, n)| *n)
        .collect();
    let lines: usize = dims.iter().product();
    let mut out: Vec<SliceSupport> = (0..region.component_count)
        .map(|component| SliceSupport {
            component,
            dims: dims.clone(),
            mask: vec![false; lines],
        })
        .collect();
    let stride = region.stride(axis);
    for (line, start) in line_starts(region, axis).enumerate() {
        for k in 0..region.dims[axis] {
            if let Some(c) = region.labels[start + k * stride] {
                out[c].mask[line] = true;
            }
        }
    }
    out
}
