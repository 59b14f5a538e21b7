//! Minimal SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let tf = |y: f64| if self.log_y { y.log10() } else { y };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| x.is_finite() && tf(*y).is_finite())
            .map(|(x, y)| (x, tf(y)))
            .collect();
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, fmt(WIDTH / 2.0), escape(&self.title)).unwrap();
        if pts.is_empty() {
            writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">no data</text>"#, fmt(WIDTH / 2.0), fmt(HEIGHT / 2.0)).unwrap();
            out.push_str("</svg>\n");
            return out;
        }
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
        );
        if x1 == x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 == y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        let (y0, y1) = (y0 - pad, y1 + pad);
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, fmt(pw), fmt(ph)).unwrap();
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let ylabel = if self.log_y { tick_label(10f64.powf(yv)) } else { tick_label(yv) };
            writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, fmt(sx(xv)), fmt(TOP + ph + 18.0), tick_label(xv)).unwrap();
            writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, fmt(LEFT - 6.0), fmt(sy(yv) + 4.0), ylabel).unwrap();
            writeln!(out, r##"<line x1="{LEFT}" x2="{}" y1="{}" y2="{}" stroke="#ddd"/>"##, fmt(LEFT + pw), fmt(sy(yv)), fmt(sy(yv))).unwrap();
        }
        writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, fmt(LEFT + pw / 2.0), fmt(HEIGHT - 15.0), escape(&self.x_label)).unwrap();
        let y_label = if self.log_y { format!("{} (log scale)", self.y_label) } else { self.y_label.clone() };
        writeln!(
            out,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            fmt(TOP + ph / 2.0),
            fmt(TOP + ph / 2.0),
            escape(&y_label)
        )
        .unwrap();

        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let coords: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && tf(*y).is_finite())
                .map(|(x, y)| format!("{},{}", fmt(sx(*x)), fmt(sy(tf(*y)))))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            if !coords.is_empty() {
                writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, coords.join(" ")).unwrap();
            }
            let ly = TOP + 10.0 + 18.0 * k as f64;
            writeln!(out, r#"<line x1="{}" x2="{}" y1="{}" y2="{}" stroke="{color}" stroke-width="2"{dash}/>"#, fmt(LEFT + pw + 12.0), fmt(LEFT + pw + 32.0), fmt(ly), fmt(ly)).unwrap();
            writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, fmt(LEFT + pw + 38.0), fmt(ly + 4.0), escape(&s.name)).unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polyline_per_series() {
        let plot = LinePlot {
            title: "gaps".into(),
            x_label: "iteration".into(),
            y_label: "gap".into(),
            log_y: true,
            series: vec![
                Series { name: "player 1".into(), points: vec![(0.0, 1.0), (10.0, 0.01)], dashed: false },
                Series { name: "zero".into(), points: vec![(0.0, 0.0)], dashed: true },
            ],
        };
        let svg = plot.to_svg();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("player 1"));
    }

    #[test]
    fn empty_plot() {
        let plot = LinePlot { title: "t".into(), x_label: "x".into(), y_label: "y".into(), log_y: false, series: vec![] };
        assert!(plot.to_svg().contains("no data"));
    }
}
