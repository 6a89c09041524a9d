//! Deterministic SVG line plots of experiment datasets.
//!
//! A [`PlotStyle`] names the columns it needs; [`emit_plot`] checks them,
//! groups rows into series and draws one polyline with markers per series.
//! Output depends only on the dataset and the style, and all coordinates are
//! printed with fixed precision so repeated runs are byte-identical.

use crate::dataset::Dataset;
use crate::error::{ExperimentError, Result};
use std::fmt::Write as _;
use std::str::FromStr;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotStyle {
    /// CRB vs SNR of one parameter (default `f₁`), one curve per quantizer.
    Crb { param_index: usize },
    /// λ vs SNR.
    Lambda,
    /// Dual polynomial modulus over `[0, 1)`.
    DualPoly,
    /// Median of a recovery metric vs m (log-log).
    ErrorVsM { metric: String },
    /// Median of a recovery metric vs K.
    ErrorVsK { metric: String },
    /// Frequency MSE and CRB vs SNR.
    MseVsCrb,
    /// Median of a multi-snapshot metric vs T (log-log).
    Mmv { metric: String },
}

impl FromStr for PlotStyle {
    type Err = ExperimentError;

    /// `crb[:param]`, `lambda`, `dual_poly`, `error_vs_m[:metric]`,
    /// `error_vs_k[:metric]`, `mse_vs_crb`, `mmv[:metric]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b.to_string())),
            None => (s, None),
        };
        let metric = |default: &str| arg.clone().unwrap_or_else(|| default.to_string());
        Ok(match name {
            "crb" => PlotStyle::Crb {
                param_index: match &arg {
                    Some(a) => a.parse().map_err(|_| ExperimentError::Config(format!("bad parameter index `{a}`")))?,
                    None => 0,
                },
            },
            "lambda" => PlotStyle::Lambda,
            "dual_poly" => PlotStyle::DualPoly,
            "error_vs_m" => PlotStyle::ErrorVsM { metric: metric("normalized_error") },
            "error_vs_k" => PlotStyle::ErrorVsK { metric: metric("normalized_error") },
            "mse_vs_crb" => PlotStyle::MseVsCrb,
            "mmv" => PlotStyle::Mmv { metric: metric("hausdorff_sq") },
            _ => return Err(ExperimentError::Config(format!("unknown plot style `{s}`"))),
        })
    }
}

struct Spec {
    name: &'static str,
    title: String,
    x: &'static str,
    ys: &'static [&'static str],
    series: &'static [&'static str],
    filter: Vec<(&'static str, String)>,
    log_x: bool,
    log_y: bool,
    x_label: &'static str,
    y_label: String,
}

impl PlotStyle {
    fn spec(&self) -> Spec {
        match self {
            PlotStyle::Crb { param_index } => Spec {
                name: "crb",
                title: format!("CRB of parameter {param_index}"),
                x: "snr_db",
                ys: &["crb_value"],
                series: &["quantizer"],
                filter: vec![("param_index", param_index.to_string())],
                log_x: false,
                log_y: true,
                x_label: "SNR (dB)",
                y_label: "CRB".into(),
            },
            PlotStyle::Lambda => Spec {
                name: "lambda",
                title: "Surrogate scale λ".into(),
                x: "snr_db",
                ys: &["lambda"],
                series: &[],
                filter: vec![],
                log_x: false,
                log_y: false,
                x_label: "SNR (dB)",
                y_label: "λ".into(),
            },
            PlotStyle::DualPoly => Spec {
                name: "dual_poly",
                title: "Dual polynomial".into(),
                x: "f",
                ys: &["q"],
                series: &[],
                filter: vec![],
                log_x: false,
                log_y: false,
                x_label: "frequency",
                y_label: "|Q(f)|".into(),
            },
            PlotStyle::ErrorVsM { metric } | PlotStyle::ErrorVsK { metric } => {
                let by_m = matches!(self, PlotStyle::ErrorVsM { .. });
                Spec {
                    name: if by_m { "error_vs_m" } else { "error_vs_k" },
                    title: format!("median {metric}"),
                    x: "value",
                    ys: &["median"],
                    series: &["snr_db", "quantizer"],
                    filter: vec![("metric", metric.clone())],
                    log_x: by_m,
                    log_y: true,
                    x_label: if by_m { "m" } else { "K" },
                    y_label: metric.clone(),
                }
            }
            PlotStyle::MseVsCrb => Spec {
                name: "mse_vs_crb",
                title: "Frequency MSE and CRB".into(),
                x: "snr_db",
                ys: &["mse", "crb"],
                series: &["quantizer", "f_index"],
                filter: vec![],
                log_x: false,
                log_y: true,
                x_label: "SNR (dB)",
                y_label: "squared error".into(),
            },
            PlotStyle::Mmv { metric } => Spec {
                name: "mmv",
                title: format!("median {metric}"),
                x: "T",
                ys: &["median"],
                series: &["snr_db", "quantizer"],
                filter: vec![("metric", metric.clone())],
                log_x: true,
                log_y: true,
                x_label: "snapshots T",
                y_label: metric.clone(),
            },
        }
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn schema_error(spec: &Spec, reason: String) -> ExperimentError {
    ExperimentError::Schema { style: spec.name.to_string(), reason }
}

fn collect_series(data: &Dataset, spec: &Spec) -> Result<Vec<Series>> {
    let mut needed: Vec<&str> = vec![spec.x];
    needed.extend(spec.ys);
    needed.extend(spec.series);
    needed.extend(spec.filter.iter().map(|(c, _)| *c));
    for c in &needed {
        if data.column(c).is_none() {
            return Err(schema_error(spec, format!("missing column `{c}`")));
        }
    }
    if data.rows.is_empty() {
        return Err(schema_error(spec, "dataset has no rows".into()));
    }
    let conditions: Vec<(&str, &str)> = spec.filter.iter().map(|(c, v)| (*c, v.as_str())).collect();
    let data = data.filter(&conditions);
    let xj = data.column(spec.x).expect("checked");
    let key_cols: Vec<usize> = spec.series.iter().map(|c| data.column(c).expect("checked")).collect();
    let mut series: Vec<Series> = Vec::new();
    for y in spec.ys {
        let yj = data.column(y).expect("checked");
        for row in &data.rows {
            let (Ok(xv), Ok(yv)) = (row[xj].parse::<f64>(), row[yj].parse::<f64>()) else { continue };
            if (spec.log_x && xv <= 0.0) || (spec.log_y && yv <= 0.0) || !xv.is_finite() || !yv.is_finite() {
                continue;
            }
            let mut parts: Vec<String> = key_cols
                .iter()
                .zip(spec.series)
                .map(|(&j, name)| {
                    let v = &row[j];
                    match v.parse::<f64>() {
                        Ok(f) if !name.ends_with("index") => format!("{name}={}", trim_number(f)),
                        _ => format!("{name}={v}"),
                    }
                })
                .collect();
            if spec.ys.len() > 1 {
                parts.insert(0, y.to_string());
            }
            let label = if parts.is_empty() { y.to_string() } else { parts.join(" ") };
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((xv, yv)),
                None => series.push(Series { label, points: vec![(xv, yv)] }),
            }
        }
    }
    if series.is_empty() {
        return Err(schema_error(spec, "no plottable points".into()));
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(series)
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (in data units) and labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let decades = (self.hi - self.lo).round() as i64;
            let step = (decades / 6).max(1);
            let mut out = Vec::new();
            let mut e = self.lo as i64;
            while e <= self.hi as i64 {
                out.push((10f64.powi(e as i32), format!("1e{e}")));
                e += step;
            }
            return out;
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
        let mut out = Vec::new();
        let mut v = (self.lo / step).ceil() * step;
        while v <= self.hi + 1e-9 * step {
            let label = format!("{:.*}", decimals, if v.abs() < 1e-12 * step { 0.0 } else { v });
            out.push((v, label));
            v += step;
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `data` in `style` as an SVG document.
pub fn emit_plot(data: &Dataset, style: &PlotStyle) -> Result<String> {
    let spec = style.spec();
    let series = collect_series(data, &spec)?;
    let xa = Axis::new(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), spec.log_x);
    let ya = Axis::new(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), spec.log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + pw * xa.unit(x);
    let py = |y: f64| TOP + ph * (1.0 - ya.unit(y));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(svg, r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    for (v, label) in xa.ticks() {
        let x = px(v);
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##, TOP + ph);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 16.0, escape(&label));
    }
    for (v, label) in ya.ticks() {
        let y = py(v);
        let _ = writeln!(svg, r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, escape(&label));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );
    let dense = series.iter().map(|s| s.points.len()).max().unwrap_or(0) > 60;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if spec.ys.len() > 1 && s.label.starts_with(spec.ys[1]) { r#" stroke-dasharray="6 3""# } else { "" };
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, pts.join(" "));
        if !dense {
            for &(x, y) in &s.points {
                let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
            }
        }
        let ly = TOP + 12.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 10.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#, lx + 18.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 22.0, ly + 4.0, escape(&s.label));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
