//! Minimal self-contained SVG line charts: axes, ticks, polylines with point
//! markers, and a legend. Panels sit side by side in one document.

use std::fmt::Write;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 48.0;
const LEGEND_ROW: f64 = 16.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Default)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Fixed y extent, e.g. `(0, 1)` for accuracies.
    pub y_range: Option<(f64, f64)>,
    pub panels: Vec<Panel>,
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 10_000.0 {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, fixed: Option<(f64, f64)>) -> Self {
        if let Some((lo, hi)) = fixed {
            return Self { lo, hi, log };
        }
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else if lo > 0.0 && lo < hi * 0.5 {
            lo = 0.0;
        }
        if hi - lo < 1e-9 {
            hi = lo + 1.0;
        }
        Self { lo, hi, log }
    }

    fn project(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            return (self.lo as i32..=self.hi as i32).map(|e| 10f64.powi(e)).collect();
        }
        let step = (self.hi - self.lo) / 5.0;
        (0..=5).map(|i| self.lo + step * i as f64).collect()
    }
}

fn draw_panel(out: &mut String, chart: &Chart, panel: &Panel, ox: f64, legend_rows: usize) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, y0) = (ox + MARGIN_L, MARGIN_T);
    let points = || panel.series.iter().flat_map(|s| s.points.iter());
    let xa = Axis::fit(points().map(|p| p.0), chart.log_x, None);
    let ya = Axis::fit(points().map(|p| p.1), chart.log_y, chart.y_range);

    let _ = writeln!(
        out,
        r##"<text x="{}" y="20" text-anchor="middle" font-size="13" font-weight="bold">{}</text>"##,
        num(ox + PANEL_W / 2.0),
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        num(x0),
        num(y0),
        num(plot_w),
        num(plot_h)
    );
    for t in ya.ticks() {
        if let Some(f) = ya.project(t) {
            let y = y0 + plot_h * (1.0 - f);
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end" font-size="10">{}</text>"##,
                num(x0),
                num(x0 + plot_w),
                num(x0 - 4.0),
                num(y + 3.0),
                escape(&tick_label(t)),
                y = num(y)
            );
        }
    }
    for t in xa.ticks() {
        if let Some(f) = xa.project(t) {
            let x = x0 + plot_w * f;
            let _ = writeln!(
                out,
                r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#333"/><text x="{x}" y="{}" text-anchor="middle" font-size="10">{}</text>"##,
                num(y0 + plot_h),
                num(y0 + plot_h + 4.0),
                num(y0 + plot_h + 15.0),
                escape(&tick_label(t)),
                x = num(x)
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"##,
        num(x0 + plot_w / 2.0),
        num(PANEL_H - 10.0),
        escape(&chart.x_label)
    );
    let _ = writeln!(
        out,
        r##"<text transform="translate({},{}) rotate(-90)" text-anchor="middle" font-size="11">{}</text>"##,
        num(ox + 14.0),
        num(y0 + plot_h / 2.0),
        escape(&chart.y_label)
    );
    if panel.series.iter().all(|s| s.points.is_empty()) {
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" text-anchor="middle" font-size="12" fill="#888">no data</text>"##,
            num(x0 + plot_w / 2.0),
            num(y0 + plot_h / 2.0)
        );
    }
    for (i, series) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let projected: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter_map(|&(x, y)| Some((x0 + plot_w * xa.project(x)?, y0 + plot_h * (1.0 - ya.project(y)?))))
            .collect();
        if projected.len() > 1 {
            let path: Vec<String> = projected.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
            let _ = writeln!(
                out,
                r##"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"##,
                path.join(" ")
            );
        }
        for (x, y) in &projected {
            let _ = writeln!(out, r##"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"##, num(*x), num(*y));
        }
    }
    for (i, series) in panel.series.iter().enumerate().take(legend_rows) {
        let color = PALETTE[i % PALETTE.len()];
        let y = PANEL_H + 6.0 + LEGEND_ROW * i as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}" font-size="10">{}</text>"##,
            num(x0),
            num(y),
            num(x0 + 14.0),
            num(y + 9.0),
            escape(&series.name)
        );
    }
}

pub fn render(chart: &Chart) -> String {
    let empty = [Panel { title: chart.title.clone(), series: Vec::new() }];
    let panels: &[Panel] = if chart.panels.is_empty() { &empty } else { &chart.panels };
    let legend_rows = panels.iter().map(|p| p.series.len()).max().unwrap_or(0);
    let width = PANEL_W * panels.len() as f64;
    let height = PANEL_H + 10.0 + LEGEND_ROW * legend_rows as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
        w = num(width),
        h = num(height)
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&chart.title));
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (i, panel) in panels.iter().enumerate() {
        draw_panel(&mut out, chart, panel, PANEL_W * i as f64, legend_rows);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn log_axis_skips_non_positive_points() {
        let chart = Chart {
            title: "depth".into(),
            log_y: true,
            panels: vec![Panel {
                title: "p".into(),
                series: vec![Series { name: "s".into(), points: vec![(1.0, 0.0), (2.0, 10.0), (3.0, 1000.0)] }],
            }],
            ..Chart::default()
        };
        let svg = render(&chart);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(">1000<"));
    }

    #[test]
    fn empty_chart_still_renders() {
        let svg = render(&Chart { title: "t".into(), ..Chart::default() });
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("no data"));
    }
}
