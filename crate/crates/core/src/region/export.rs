use std::io::{self, Write};

use super::grid::GridRegion;

/// Writes a two-dimensional region as an ASCII PGM (P2) image: axis 0 runs
/// left to right, axis 1 bottom to top. Infeasible cells are black and each
/// component gets its own grey level.
pub fn write_pgm<W: Write>(region: &GridRegion, mut out: W) -> io::Result<()> {
    if region.dims.len() != 2 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("PGM export needs a 2-D region, got {} axes", region.dims.len()),
        ));
    }
    let (w, h) = (region.dims[0], region.dims[1]);
    writeln!(out, "P2")?;
    writeln!(out, "{w} {h}")?;
    writeln!(out, "255")?;
    let count = region.component_count.max(1);
    for row in (0..h).rev() {
        let line: Vec<String> = (0..w)
            .map(|col| match region.labels[row * w + col] {
                None => 0,
                Some(c) => 255 - (c * 160) / count,
            })
            .map(|v| v.to_string())
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Writes one CSV row per component with its cell count, area fraction and
/// bounding box in box coordinates.
pub fn write_components_csv<W: Write>(region: &GridRegion, mut out: W) -> io::Result<()> {
    let n = region.dims.len();
    let mut header = String::from("component,cells,area_fraction");
    for a in 1..=n {
        header.push_str(&format!(",min_{a},max_{a}"));
    }
    writeln!(out, "{header}")?;
    let mut lo = vec![vec![usize::MAX; n]; region.component_count];
    let mut hi = vec![vec![0usize; n]; region.component_count];
    for idx in 0..region.cells() {
        if let Some(c) = region.labels[idx] {
            for (a, v) in region.coords(idx).into_iter().enumerate() {
                lo[c][a] = lo[c][a].min(v);
                hi[c][a] = hi[c][a].max(v);
            }
        }
    }
    for (c, size) in region.component_sizes().into_iter().enumerate() {
        let mut line = format!("{c},{size},{:.16e}", size as f64 / region.cells() as f64);
        for a in 0..n {
            let width = (region.upper[a] - region.lower[a]) / region.dims[a] as f64;
            let min = region.lower[a] + lo[c][a] as f64 * width;
            let max = region.lower[a] + (hi[c][a] + 1) as f64 * width;
            line.push_str(&format!(",{min:.16e},{max:.16e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_layout() {
        // bottom-left cell feasible only
        let g = GridRegion::from_mask(vec![0.0, 0.0], vec![1.0, 1.0], vec![2, 2], vec![true, false, false, false])
            .unwrap();
        let mut buf = Vec::new();
        write_pgm(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "P2\n2 2\n255\n0 0\n255 0\n");
    }

    #[test]
    fn components_csv() {
        let g = GridRegion::from_mask(vec![0.0, 0.0], vec![1.0, 1.0], vec![2, 2], vec![true, false, false, true])
            .unwrap();
        let mut buf = Vec::new();
        write_components_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,1,2.5"));
        assert!(lines[2].ends_with("5.0000000000000000e-1,1.0000000000000000e0"));
    }
}
