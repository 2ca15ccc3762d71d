//! CSV and JSON tables.
//!
//! CSV floats use 17 significant digits in scientific notation so repeated
//! runs are byte-identical. JSON wraps the rows as `{"params": ..., "rows": [...]}`.

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{CertifyReport, CertifyRow};
use crate::error::Result;
use crate::figure::{ApproxCurve, ContourSet, Field};
use crate::lambert::BranchValue;
use crate::model::{ModelParams, Resonance};
use crate::stirling::SeriesCoefficient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub trait TableRow: Serialize {
    const HEADER: &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn write_table<W: Write, R: TableRow>(
    out: W,
    format: Format,
    params: serde_json::Value,
    rows: &[R],
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(R::HEADER)?;
            for row in rows {
                w.write_record(row.record())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &json!({ "params": params, "rows": rows }))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn params_header(params: &ModelParams) -> serde_json::Value {
    json!({ "h": params.h, "alpha": params.alpha, "eps": params.eps })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceRow {
    pub k: i64,
    pub re_z_series: f64,
    pub im_z_series: f64,
    pub re_z_refined: f64,
    pub im_z_refined: f64,
    pub residual_refined: f64,
    pub in_annulus: bool,
}

impl From<&Resonance> for ResonanceRow {
    fn from(r: &Resonance) -> Self {
        Self {
            k: r.k,
            re_z_series: r.z_series.re,
            im_z_series: r.z_series.im,
            re_z_refined: r.z_refined.re,
            im_z_refined: r.z_refined.im,
            residual_refined: r.residual_refined,
            in_annulus: r.in_annulus,
        }
    }
}

impl TableRow for ResonanceRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "re_z_series",
        "im_z_series",
        "re_z_refined",
        "im_z_refined",
        "residual_refined",
        "in_annulus",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            fmt_f64(self.re_z_series),
            fmt_f64(self.im_z_series),
            fmt_f64(self.re_z_refined),
            fmt_f64(self.im_z_refined),
            fmt_f64(self.residual_refined),
            self.in_annulus.to_string(),
        ]
    }
}

/// Rows ordered by `k`, then by `Re z`.
pub fn resonance_rows(resonances: &[Resonance]) -> Vec<ResonanceRow> {
    let mut rows: Vec<ResonanceRow> = resonances.iter().map(ResonanceRow::from).collect();
    rows.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(a.re_z_refined.total_cmp(&b.re_z_refined))
    });
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourRow {
    pub curve_id: usize,
    pub field: &'static str,
    pub point_index: usize,
    pub re_z: f64,
    pub im_z: f64,
}

impl TableRow for ContourRow {
    const HEADER: &'static [&'static str] = &["curve_id", "field", "point_index", "re_z", "im_z"];

    fn record(&self) -> Vec<String> {
        vec![
            self.curve_id.to_string(),
            self.field.to_string(),
            self.point_index.to_string(),
            fmt_f64(self.re_z),
            fmt_f64(self.im_z),
        ]
    }
}

/// `Re F` polylines first, then `Im F`; curve ids count within each field.
pub fn contour_rows(set: &ContourSet) -> Vec<ContourRow> {
    let mut rows = Vec::new();
    for field in [Field::Re, Field::Im] {
        for (curve_id, curve) in set.curves(field).iter().enumerate() {
            for (point_index, p) in curve.iter().enumerate() {
                rows.push(ContourRow {
                    curve_id,
                    field: field.as_str(),
                    point_index,
                    re_z: p.re,
                    im_z: p.im,
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub curve_id: &'static str,
    pub re_z: f64,
    pub neg_im_z: f64,
}

impl TableRow for CurveRow {
    const HEADER: &'static [&'static str] = &["curve_id", "re_z", "neg_im_z"];

    fn record(&self) -> Vec<String> {
        vec![
            self.curve_id.to_string(),
            fmt_f64(self.re_z),
            fmt_f64(self.neg_im_z),
        ]
    }
}

pub fn curve_rows(curves: &[ApproxCurve]) -> Vec<CurveRow> {
    curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |&(re_z, neg_im_z)| CurveRow {
                curve_id: c.curve.as_str(),
                re_z,
                neg_im_z,
            })
        })
        .collect()
}

impl TableRow for CertifyRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "re_z",
        "im_z",
        "predicted_width",
        "deviation",
        "bound",
        "pass",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            fmt_f64(self.re_z),
            fmt_f64(self.im_z),
            fmt_f64(self.predicted_width),
            fmt_f64(self.deviation),
            self.bound.map(fmt_f64).unwrap_or_default(),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
        ]
    }
}

pub fn write_report<W: Write>(out: W, format: Format, report: &CertifyReport) -> Result<()> {
    let mut header = params_header(&report.params);
    header["regime"] = json!(report.regime.as_str());
    write_table(out, format, header, &report.rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRow {
    pub k: i64,
    pub re_w: f64,
    pub im_w: f64,
    pub abs_remainder: f64,
    pub tail_bound: f64,
    pub max_j: usize,
    pub max_m: usize,
}

impl From<&BranchValue> for BranchRow {
    fn from(v: &BranchValue) -> Self {
        Self {
            k: v.k,
            re_w: v.w.re,
            im_w: v.w.im,
            abs_remainder: v.remainder.norm(),
            tail_bound: v.tail_bound,
            max_j: v.terms_used.0,
            max_m: v.terms_used.1,
        }
    }
}

impl TableRow for BranchRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "re_w",
        "im_w",
        "abs_remainder",
        "tail_bound",
        "max_j",
        "max_m",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            fmt_f64(self.re_w),
            fmt_f64(self.im_w),
            fmt_f64(self.abs_remainder),
            fmt_f64(self.tail_bound),
            self.max_j.to_string(),
            self.max_m.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub j: usize,
    pub m: usize,
    pub numerator: String,
    pub denominator: String,
    pub double_value: f64,
}

impl From<&SeriesCoefficient> for CoefficientRow {
    fn from(c: &SeriesCoefficient) -> Self {
        Self {
            j: c.j,
            m: c.m,
            numerator: c.value.numer().to_string(),
            denominator: c.value.denom().to_string(),
            double_value: c.approx,
        }
    }
}

impl TableRow for CoefficientRow {
    const HEADER: &'static [&'static str] = &["j", "m", "numerator", "denominator", "double_value"];

    fn record(&self) -> Vec<String> {
        vec![
            self.j.to_string(),
            self.m.to_string(),
            self.numerator.clone(),
            self.denominator.clone(),
            fmt_f64(self.double_value),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stirling::series_coefficient;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        let back: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn coefficient_csv() {
        let rows: Vec<CoefficientRow> = [(0, 3), (1, 2)]
            .iter()
            .map(|&(j, m)| CoefficientRow::from(&series_coefficient(j, m).unwrap()))
            .collect();
        let mut buf = Vec::new();
        write_table(&mut buf, Format::Csv, json!({}), &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "j,m,numerator,denominator,double_value");
        assert!(lines[1].starts_with("0,3,1,3,3.33333333333333"));
        assert!(lines[2].starts_with("1,2,-3,2,-1.5"));
    }

    #[test]
    fn json_wraps_params_and_rows() {
        let rows = vec![CurveRow {
            curve_id: "log_width",
            re_z: 1.0,
            neg_im_z: 0.5,
        }];
        let mut buf = Vec::new();
        let params = ModelParams::new(0.1, 0.7, 0.3).unwrap();
        write_table(&mut buf, Format::Json, params_header(&params), &rows).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["params"]["alpha"], json!(0.7));
        assert_eq!(v["rows"][0]["curve_id"], json!("log_width"));
    }
}
