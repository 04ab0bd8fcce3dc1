//! Minimal SVG line charts: rounds on x, log-scaled values on y.

use std::fmt::Write as _;

/// Smallest value drawn; zeros and negatives are clamped to it.
pub const LOG_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const PANEL_W: f64 = 260.0;
const PANEL_H: f64 = 200.0;
const MARGIN_L: f64 = 52.0;
const MARGIN_R: f64 = 10.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 28.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Lays `panels` out in a grid with `columns` columns, each panel on its own
/// decade-aligned log scale.
pub fn render_svg(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns).max(1);
    let (w, h) = (columns as f64 * PANEL_W, rows as f64 * PANEL_H + 20.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let ox = (i % columns) as f64 * PANEL_W;
        let oy = (i / columns) as f64 * PANEL_H;
        draw_panel(&mut s, panel, ox, oy);
    }
    // legend from the first panel
    if let Some(p) = panels.first() {
        for (j, series) in p.series.iter().enumerate() {
            let x = 10.0 + j as f64 * 90.0;
            let y = h - 8.0;
            let _ = writeln!(
                s,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                x + 18.0,
                series.color,
                x + 22.0,
                y + 3.0,
                escape(&series.label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn draw_panel(s: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);

    let logs = |v: f64| v.max(LOG_FLOOR).log10();
    let finite = panel
        .series
        .iter()
        .flat_map(|se| se.values.iter().copied())
        .filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(logs(v)), hi.max(logs(v)))
    });
    let (lo, hi) = if lo.is_finite() {
        (lo.floor(), hi.ceil().max(lo.floor() + 1.0))
    } else {
        (0.0, 1.0)
    };
    let n = panel
        .series
        .iter()
        .map(|se| se.values.len())
        .max()
        .unwrap_or(0)
        .max(2);

    let px = |i: usize| x0 + plot_w * i as f64 / (n - 1) as f64;
    let py = |v: f64| y0 + plot_h * (hi - logs(v)) / (hi - lo);

    let _ = writeln!(s, r#"<g>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y0}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black" stroke-width="0.5"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        x0 + plot_w / 2.0,
        oy + 15.0,
        escape(&panel.title)
    );
    // at most ~6 decade labels
    let step = ((hi - lo) / 6.0).ceil().max(1.0);
    let mut e = lo;
    while e <= hi {
        let y = y0 + plot_h * (hi - e) / (hi - lo);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd" stroke-width="0.5"/><text x="{}" y="{}" text-anchor="end">1e{}</text>"##,
            x0 + plot_w,
            x0 - 4.0,
            y + 3.0,
            e as i64
        );
        e += step;
    }
    let _ = writeln!(s, r#"<text x="{x0}" y="{}">0</text>"#, y0 + plot_h + 12.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        x0 + plot_w,
        y0 + plot_h + 12.0,
        n - 1
    );

    for se in &panel.series {
        let pts: Vec<String> = se
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, &v)| format!("{:.2},{:.2}", px(i), py(v)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
                se.color,
                pts.join(" ")
            );
        }
    }
    let _ = writeln!(s, "</g>");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_series() {
        let panel = Panel {
            title: "Group <1>".into(),
            series: vec![
                Series {
                    label: "SFL".into(),
                    color: "#d62728".into(),
                    values: vec![1.0, 0.1, 0.01],
                },
                Series {
                    label: "PFL".into(),
                    color: "#1f77b4".into(),
                    values: vec![1.0, 0.0, f64::NAN],
                },
            ],
        };
        let svg = render_svg(&[panel.clone(), panel], 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains("Group &lt;1&gt;"));
        assert!(svg.contains("1e-16"));
    }

    #[test]
    fn empty_input_is_valid() {
        let svg = render_svg(&[], 3);
        assert!(svg.contains("</svg>"));
    }
}
