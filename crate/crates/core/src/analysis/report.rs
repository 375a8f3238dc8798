//! CSV, JSON and SVG renderings of a [`SeriesResult`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SeriesResult;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Svg => "svg",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReportDocument {
    schema_version: u32,
    #[serde(flatten)]
    result: SeriesResult,
}

/// Writes `<series_id>.<ext>` into `dir` for every requested format and
/// returns the paths written.
pub fn emit_report(
    result: &SeriesResult,
    dir: impl AsRef<Path>,
    formats: &[ReportFormat],
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(formats.len());
    for &format in formats {
        let body = match format {
            ReportFormat::Csv => render_csv(result),
            ReportFormat::Json => render_json(result),
            ReportFormat::Svg => render_svg(result),
        };
        let path = dir.join(format!("{}.{}", result.series_id, format.extension()));
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// `series_id,image_index,delta_pct,qe,ms`; `ms` is empty when timings were
/// stripped.
pub fn render_csv(result: &SeriesResult) -> String {
    let mut out = String::from("series_id,image_index,delta_pct,qe,ms\n");
    for r in &result.records {
        let ms = r.ms.map(|m| format!("{m:.3}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            result.series_id, r.index, r.delta_pct, r.qe, ms
        )
        .expect("writing to a String");
    }
    out
}

pub fn render_json(result: &SeriesResult) -> String {
    let doc = ReportDocument {
        schema_version: REPORT_SCHEMA_VERSION,
        result: result.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

pub fn load_report_json(path: impl AsRef<Path>) -> Result<SeriesResult> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: ReportDocument = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if doc.schema_version != REPORT_SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported report schema version {}",
            doc.schema_version
        )));
    }
    Ok(doc.result)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Scatter of QE against delta with the fitted line. Each image is one
/// `<circle>`, the fit is the only `<line>`; axes are drawn as a `<path>`.
pub fn render_svg(result: &SeriesResult) -> String {
    let xs: Vec<f64> = result.records.iter().map(|r| r.delta_pct).collect();
    let ys: Vec<f64> = result.records.iter().map(|r| r.qe).collect();
    let fit = &result.fit;
    let (x_lo, x_hi) = padded_range(&xs);
    let line_ys = [
        fit.intercept + fit.slope * x_lo,
        fit.intercept + fit.slope * x_hi,
    ];
    let (y_lo, y_hi) = padded_range(&ys.iter().chain(&line_ys).copied().collect::<Vec<_>>());

    let px = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (SVG_W - 2.0 * MARGIN);
    let py = |y: f64| SVG_H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (SVG_H - 2.0 * MARGIN);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<path class="axes" d="M{m} {t} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{} ({}, {})</text>"#,
        SVG_W / 2.0,
        MARGIN / 2.0,
        result.series_id,
        result.mode.name(),
        result.strategy.label()
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">change (%)</text>"#,
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">QE</text>"#,
        MARGIN / 3.0,
        SVG_H / 2.0,
        MARGIN / 3.0,
        SVG_H / 2.0
    );
    for (label, v, x, y, anchor) in [
        ("x-min", x_lo, px(x_lo), SVG_H - MARGIN + 16.0, "middle"),
        ("x-max", x_hi, px(x_hi), SVG_H - MARGIN + 16.0, "middle"),
        ("y-min", y_lo, MARGIN - 6.0, py(y_lo), "end"),
        ("y-max", y_hi, MARGIN - 6.0, py(y_hi), "end"),
    ] {
        let _ = writeln!(
            w,
            r#"<text class="{label}" x="{x:.1}" y="{y:.1}" font-size="10" text-anchor="{anchor}">{v:.4}</text>"#
        );
    }
    let _ = writeln!(
        w,
        r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-width="1.5"/>"#,
        px(x_lo),
        py(line_ys[0]),
        px(x_hi),
        py(line_ys[1])
    );
    for (x, y) in xs.iter().zip(&ys) {
        let _ = writeln!(
            w,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#,
            px(*x),
            py(*y)
        );
    }
    let r2 = if fit.degenerate {
        "r² = 0 (degenerate)".to_string()
    } else {
        format!("r² = {:.4}", fit.r2)
    };
    let _ = writeln!(
        w,
        r#"<text class="r2" x="{:.1}" y="{:.1}" font-size="12">{r2}, y = {:.5} + {:.5}x</text>"#,
        MARGIN + 10.0,
        MARGIN + 16.0,
        fit.intercept,
        fit.slope
    );
    s.push_str("</svg>\n");
    s
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ImageRecord, RegressionFit, TrainingMode};
    use crate::som::SomConfig;

    fn result() -> SeriesResult {
        SeriesResult {
            series_id: "demo".into(),
            spec: None,
            mode: TrainingMode::ReferenceTrained,
            strategy: Default::default(),
            som: SomConfig::default(),
            records: (0..4)
                .map(|i| ImageRecord {
                    index: i + 1,
                    delta_pct: 10.0 * i as f64,
                    qe: 0.1 + 0.013 * i as f64 + 1e-3 * (i % 2) as f64,
                    ms: Some(1.25 * i as f64),
                })
                .collect(),
            fit: RegressionFit {
                slope: 0.0013,
                intercept: 0.1,
                r2: 0.98,
                n: 4,
                degenerate: false,
            },
            total_ms: Some(10.0),
        }
    }

    #[test]
    fn csv_rows() {
        let csv = render_csv(&result());
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("series_id,image_index,delta_pct,qe,ms\n"));
        assert!(csv.lines().nth(2).unwrap().starts_with("demo,2,10,"));
        let stripped = render_csv(&result().without_timings());
        assert!(stripped.lines().skip(1).all(|l| l.ends_with(',')));
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&result(), dir.path(), &[ReportFormat::Json]).unwrap();
        assert_eq!(load_report_json(&paths[0]).unwrap(), result());
        let text = fs::read_to_string(&paths[0]).unwrap();
        assert!(text.contains("\"schema_version\": 1"));
    }

    #[test]
    fn svg_structure() {
        let svg = render_svg(&result());
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains("r² = 0.9800"));
    }

    #[test]
    fn degenerate_svg_has_finite_coordinates() {
        let mut res = result();
        for r in &mut res.records {
            r.qe = 0.5;
        }
        res.fit = RegressionFit {
            slope: 0.0,
            intercept: 0.5,
            r2: 0.0,
            n: 4,
            degenerate: true,
        };
        let svg = render_svg(&res);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert!(svg.contains("degenerate"));
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "x").unwrap();
        assert!(matches!(
            emit_report(&result(), &file, &ReportFormat::ALL),
            Err(Error::Io { .. })
        ));
    }
}
