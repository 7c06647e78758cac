use std::fmt::Write as _;
use std::path::Path;

use super::table::{ResultTable, Row};
use crate::quality::plot_floor;
use crate::samplers::Method;
use crate::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 560.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 460.0;

pub fn color(method: Method) -> &'static str {
    match method {
        Method::Lm => "#30c8c0",
        Method::Slm => "#1f3fd0",
        Method::Rm => "#e02020",
        Method::Srm => "#8030a0",
    }
}

fn label(method: Method) -> &'static str {
    match method {
        Method::Lm => "LM (linear map)",
        Method::Slm => "SLM (symmetrized linear map)",
        Method::Rm => "RM (random map)",
        Method::Srm => "SRM (symmetrized random map)",
    }
}

/// Mapping between decades of the data and pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotLayout {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl PlotLayout {
    /// Pixel position of the data point `(x, y)`.
    pub fn to_px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x.log10() - self.x_lo) / (self.x_hi - self.x_lo);
        let v = (y.log10() - self.y_lo) / (self.y_hi - self.y_lo);
        (LEFT + u * (RIGHT - LEFT), BOTTOM - v * (BOTTOM - TOP))
    }

    /// `(log10 x, log10 y)` at a pixel position.
    pub fn to_log(&self, px: f64, py: f64) -> (f64, f64) {
        let u = (px - LEFT) / (RIGHT - LEFT);
        let v = (BOTTOM - py) / (BOTTOM - TOP);
        (self.x_lo + u * (self.x_hi - self.x_lo), self.y_lo + v * (self.y_hi - self.y_lo))
    }
}

/// A reference line `log y = slope · log x + intercept` over `[x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceLine {
    pub method: Method,
    pub slope: f64,
    pub intercept: f64,
    pub x0: f64,
    pub x1: f64,
}

impl ReferenceLine {
    fn y(&self, x: f64) -> f64 {
        (self.slope * x.ln() + self.intercept).exp()
    }
}

/// Reference lines of the nominal slope, through the predictions where the
/// table has them and through the data otherwise.
pub fn reference_lines(table: &ResultTable) -> Vec<ReferenceLine> {
    let mut out = Vec::new();
    for method in table.methods() {
        let rows: Vec<&Row> = table.method_rows(method).collect();
        let Some(first) = rows.first() else { continue };
        let slope = first.axis.nominal_slope(method);
        let anchors: Vec<(f64, f64)> = {
            let pred: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.q_pred.filter(|p| *p > 0.0).map(|p| (r.axis_value, p)))
                .collect();
            if pred.is_empty() {
                rows.iter()
                    .filter_map(|r| r.q_hat.filter(|q| *q > 0.0).map(|q| (r.axis_value, q)))
                    .collect()
            } else {
                pred
            }
        };
        if anchors.is_empty() {
            continue;
        }
        let intercept = anchors.iter().map(|(x, y)| y.ln() - slope * x.ln()).sum::<f64>() / anchors.len() as f64;
        let x0 = rows.iter().map(|r| r.axis_value).fold(f64::INFINITY, f64::min);
        let x1 = rows.iter().map(|r| r.axis_value).fold(0.0, f64::max);
        if x1 > x0 {
            out.push(ReferenceLine {
                method,
                slope,
                intercept,
                x0,
                x1,
            });
        }
    }
    out
}

/// Decade-aligned ranges covering the data, floored `Q` values and lines.
pub fn layout(table: &ResultTable) -> Result<PlotLayout> {
    let ok: Vec<&Row> = table.rows.iter().filter(|r| r.is_ok()).collect();
    if ok.is_empty() {
        return Err(Error::InvalidArgument("no successful rows to plot".into()));
    }
    let mut xs: Vec<f64> = ok.iter().map(|r| r.axis_value.log10()).collect();
    let mut ys: Vec<f64> = ok.iter().map(|r| plot_floor(r.q_hat.unwrap_or(0.0)).log10()).collect();
    for l in reference_lines(table) {
        ys.push(l.y(l.x0).log10());
        ys.push(l.y(l.x1).log10());
    }
    xs.retain(|v| v.is_finite());
    ys.retain(|v| v.is_finite());
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    let (x_lo, x_hi) = span(&xs);
    let (y_lo, y_hi) = span(&ys);
    Ok(PlotLayout { x_lo, x_hi, y_lo, y_hi })
}

fn marker(svg: &mut String, method: Method, x: f64, y: f64) {
    let c = color(method);
    let m = method.as_str();
    let _ = match method {
        Method::Lm => writeln!(
            svg,
            r#"<rect class="marker {m}" x="{:.3}" y="{:.3}" width="8" height="8" fill="{c}"/>"#,
            x - 4.0,
            y - 4.0
        ),
        Method::Slm => writeln!(
            svg,
            r#"<polygon class="marker {m}" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="{c}"/>"#,
            x,
            y - 5.5,
            x + 5.5,
            y,
            x,
            y + 5.5,
            x - 5.5,
            y
        ),
        Method::Rm => writeln!(svg, r#"<circle class="marker {m}" cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{c}"/>"#),
        Method::Srm => writeln!(
            svg,
            r#"<circle class="marker {m}" cx="{x:.3}" cy="{y:.3}" r="6" fill="none" stroke="{c}" stroke-width="1.5"/>"#
        ),
    };
}

fn fmt_decade(e: f64) -> String {
    format!("1e{}", e as i64)
}

/// Renders the log-log plot of `Q` against the swept axis.
pub fn render_svg(table: &ResultTable) -> Result<String> {
    let lay = layout(table)?;
    let first = table.rows.iter().find(|r| r.is_ok()).expect("layout checked");
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}: Q against {}</text>"#,
        (LEFT + RIGHT) / 2.0,
        first.problem,
        first.axis
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let mut e = lay.x_lo;
    while e <= lay.x_hi + 1e-9 {
        let (px, _) = lay.to_px(10f64.powf(e), 1.0);
        let _ = writeln!(s, r#"<line x1="{px:.3}" y1="{BOTTOM}" x2="{px:.3}" y2="{}" stroke="black"/>"#, BOTTOM + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.3}" y="{}" text-anchor="middle">{}</text>"#, BOTTOM + 20.0, fmt_decade(e));
        e += 1.0;
    }
    let y_step = ((lay.y_hi - lay.y_lo) / 10.0).ceil().max(1.0);
    let mut e = lay.y_lo;
    while e <= lay.y_hi + 1e-9 {
        let (_, py) = lay.to_px(10f64.powf(lay.x_lo), 10f64.powf(e));
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.3}" x2="{LEFT}" y2="{py:.3}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.3}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, fmt_decade(e));
        e += y_step;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 45.0,
        first.axis
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">Q</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    for l in reference_lines(table) {
        let (x1, y1) = lay.to_px(l.x0, l.y(l.x0));
        let (x2, y2) = lay.to_px(l.x1, l.y(l.x1));
        let _ = writeln!(
            s,
            r#"<line class="reference {}" data-slope="{}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{}" stroke-width="1.2"/>"#,
            l.method,
            l.slope,
            color(l.method)
        );
    }
    for method in table.methods() {
        for r in table.method_rows(method) {
            let (px, py) = lay.to_px(r.axis_value, plot_floor(r.q_hat.unwrap_or(0.0)));
            marker(&mut s, method, px, py);
        }
    }
    for (k, method) in table.methods().into_iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * k as f64;
        marker(&mut s, method, RIGHT + 20.0, y);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}">{}</text>"#, RIGHT + 32.0, y + 4.0, label(method));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes the plot; fails without creating a file when nothing succeeded.
pub fn emit_plot(table: &ResultTable, path: &Path) -> Result<()> {
    let svg = render_svg(table)?;
    std::fs::write(path, svg)?;
    Ok(())
}
