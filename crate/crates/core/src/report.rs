//! Output formats: canonical JSON, CSV samples and SVG plots.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{Classification, MagicVerdict, PredictedCount};
use crate::parse::coeffs_to_pairs;
use crate::poly::Polynomial;
use crate::tracer::{TraceConfig, TraceResult};

/// Floats as `d.ddddddddddddddddde±x` (17 significant digits); integers
/// stay integers. Keys are sorted because `serde_json::Map` is ordered.
fn write_number(out: &mut String, n: &serde_json::Number) {
    if n.is_f64() {
        let x = n.as_f64().expect("f64 number");
        write!(out, "{x:.16e}").expect("string write");
    } else {
        write!(out, "{n}").expect("string write");
    }
}

fn write_value(out: &mut String, v: &Value, pretty: bool) {
    let newline = |out: &mut String, depth: usize| {
        out.push('\n');
        out.extend(std::iter::repeat_n("  ", depth));
    };
    write_nested(out, v, pretty.then_some(0), &newline);
}

fn write_nested(
    out: &mut String,
    v: &Value,
    depth: Option<usize>,
    newline: &dyn Fn(&mut String, usize),
) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encode")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(d) = depth {
                    newline(out, d + 1);
                }
                write_nested(out, item, depth.map(|d| d + 1), newline);
            }
            if let Some(d) = depth {
                newline(out, d);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(d) = depth {
                    newline(out, d + 1);
                }
                out.push_str(&serde_json::to_string(k).expect("string encode"));
                out.push(':');
                if depth.is_some() {
                    out.push(' ');
                }
                write_nested(out, item, depth.map(|d| d + 1), newline);
            }
            if let Some(d) = depth {
                newline(out, d);
            }
            out.push('}');
        }
    }
}

/// Canonical text of a JSON value: sorted keys, fixed float format,
/// two-space indentation, trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, true);
    out.push('\n');
    out
}

/// Single-line canonical form, for JSON-lines output.
pub fn canonical_json_line(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, false);
    out
}

/// Serializes through `serde_json::Value`; non-finite floats become `null`.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn polynomial_json(p: &Polynomial) -> Value {
    let mut v = json!({ "coeffs": coeffs_to_pairs(p) });
    if p.is_truncated_series() {
        v["truncated"] = Value::Bool(true);
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Agreement {
    Confirmed,
    ConjectureConsistent,
    Discrepant,
}

/// Compares a traced component count with the classification.
///
/// Exact predictions must match. In the exceptional range a MAGIC verdict
/// requires `2μ` and NOT_MAGIC requires `μ`; with an UNKNOWN verdict the
/// two counts the conjecture allows, `μ` and `2μ`, are reported as
/// consistent and anything else as a discrepancy.
pub fn agreement(c: &Classification, n_components: usize) -> Agreement {
    let mu = c.mu;
    match (c.predicted_count, c.magic) {
        (PredictedCount::Exact(n), _) if n == n_components => Agreement::Confirmed,
        (PredictedCount::Exact(_), _) => Agreement::Discrepant,
        (range, _) if !range.contains(n_components) => Agreement::Discrepant,
        (_, MagicVerdict::Magic) if n_components == 2 * mu => Agreement::Confirmed,
        (_, MagicVerdict::NotMagic) if n_components == mu => Agreement::Confirmed,
        (_, MagicVerdict::Unknown) if n_components == mu || n_components == 2 * mu => {
            Agreement::ConjectureConsistent
        }
        _ => Agreement::Discrepant,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Artifacts {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub input: Polynomial,
    pub classification: Classification,
    pub config: TraceConfig,
    pub trace: TraceResult,
    pub agreement: Agreement,
    pub artifacts: Artifacts,
}

impl RunReport {
    pub fn new(
        input: Polynomial,
        classification: Classification,
        config: TraceConfig,
        trace: TraceResult,
    ) -> Self {
        let agreement = agreement(&classification, trace.n_components);
        Self {
            input,
            classification,
            config,
            trace,
            agreement,
            artifacts: Artifacts::default(),
        }
    }

    /// Summary without the per-sample data.
    pub fn to_json(&self) -> Value {
        let t = &self.trace;
        json!({
            "input": polynomial_json(&self.input),
            "classification": to_value(&self.classification),
            "config": to_value(&self.config),
            "trace": {
                "n_components": t.n_components,
                "n_radii": t.radii.len(),
                "final_count_radius": t.final_count_radius,
                "at_infinity": t.at_infinity,
                "mu": t.mu,
                "curves": to_value(&t.curves),
                "symmetry": to_value(&t.symmetry),
                "events": to_value(&t.events),
            },
            "agreement": to_value(&self.agreement),
            "artifacts": to_value(&self.artifacts),
        })
    }
}

/// `r,theta,re,im,mod,curve_id`, rows by curve and decreasing radius.
pub fn samples_csv(t: &TraceResult) -> String {
    let mut rows = t.samples.clone();
    rows.sort_by(|a, b| a.curve_id.cmp(&b.curve_id).then(b.r.total_cmp(&a.r)));
    let mut out = String::from("r,theta,re,im,mod,curve_id\n");
    for s in rows {
        let (sin, cos) = s.theta.sin_cos();
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.r,
            s.theta,
            s.r * cos,
            s.r * sin,
            s.mod2.sqrt(),
            s.curve_id
        )
        .expect("string write");
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

const VIEW: f64 = 1000.0;

/// The traced set in the plane of the traced polynomial. Curves reaching
/// `r_min` are `<path>` elements; curves that end inside the schedule are
/// drawn as dashed `<polyline>`s.
pub fn samples_svg(t: &TraceResult) -> String {
    let r_max = t.radii.first().copied().unwrap_or(1.0);
    let half = 1.1 * r_max;
    let to_px = |x: f64| VIEW / 2.0 * (1.0 + x / half);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW} {VIEW}" width="{VIEW}" height="{VIEW}">"#
    )
    .expect("string write");
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let c = VIEW / 2.0;
    writeln!(out, r##"<g stroke="#888" stroke-width="1">"##).expect("string write");
    writeln!(out, r#"<line x1="0" y1="{c}" x2="{VIEW}" y2="{c}"/>"#).expect("string write");
    writeln!(out, r#"<line x1="{c}" y1="0" x2="{c}" y2="{VIEW}"/>"#).expect("string write");
    let ticks = [-r_max, -r_max / 2.0, r_max / 2.0, r_max];
    for v in ticks {
        let p = to_px(v);
        writeln!(
            out,
            r#"<line x1="{p:.3}" y1="{:.3}" x2="{p:.3}" y2="{:.3}"/>"#,
            c - 6.0,
            c + 6.0
        )
        .expect("string write");
        writeln!(
            out,
            r#"<line x1="{:.3}" y1="{p:.3}" x2="{:.3}" y2="{p:.3}"/>"#,
            c - 6.0,
            c + 6.0
        )
        .expect("string write");
    }
    out.push_str("</g>\n");
    writeln!(
        out,
        r##"<g font-family="monospace" font-size="14" fill="#444">"##
    )
    .expect("string write");
    for v in ticks {
        let p = to_px(v);
        writeln!(
            out,
            r#"<text x="{p:.3}" y="{:.3}" text-anchor="middle">{v:.3e}</text>"#,
            c + 22.0
        )
        .expect("string write");
        // y axis points up, so +v sits above the centre
        writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}">{v:.3e}</text>"#,
            c + 10.0,
            VIEW - p + 5.0
        )
        .expect("string write");
    }
    out.push_str("</g>\n");

    for curve in &t.curves {
        let pts: Vec<String> = t
            .curve_samples(curve.curve_id)
            .map(|s| {
                let (sin, cos) = s.theta.sin_cos();
                format!("{:.3},{:.3}", to_px(s.r * cos), VIEW - to_px(s.r * sin))
            })
            .collect();
        let color = PALETTE[curve.curve_id % PALETTE.len()];
        if curve.reaches_r_min {
            writeln!(
                out,
                r#"<path d="M{}" fill="none" stroke="{color}" stroke-width="3"/>"#,
                pts.join(" L")
            )
            .expect("string write");
        } else {
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="6 4"/>"#,
                pts.join(" ")
            )
            .expect("string write");
        }
    }
    out.push_str("</svg>\n");
    out
}
