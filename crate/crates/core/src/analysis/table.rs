use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::CaseName;
use crate::polymesh::MeshFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub cells: usize,
    pub free_dofs: usize,
    pub l2_err: f64,
    /// `None` on the first level and when the rate is undefined.
    pub l2_rate: Option<f64>,
    pub energy_err: f64,
    pub energy_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub family: MeshFamily,
    pub k: usize,
    pub case: CaseName,
    pub rows: Vec<ConvergenceRow>,
    /// Set when the study stopped early.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "md" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            other => Err(format!("unknown format '{other}' (csv|md|json)")),
        }
    }
}

/// Scientific notation with a `0.dddd` mantissa and 4 significant digits,
/// e.g. `0.1101E-02`.
pub fn format_sci(x: f64) -> String {
    if x == 0.0 {
        return "0.0000E+00".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // `{:.3e}` rounds to 4 significant digits: d.ddde<exp>
    let s = format!("{:.3e}", x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let e = exp + 1;
    let sign = if x < 0.0 { "-" } else { "" };
    let esign = if e < 0 { '-' } else { '+' };
    format!("{sign}0.{digits}E{esign}{:02}", e.abs())
}

fn full(x: f64) -> String {
    format!("{x:e}")
}

fn rate_full(r: Option<f64>) -> String {
    r.map(full).unwrap_or_default()
}

fn rate_short(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.2}")).unwrap_or_else(|| "-".to_string())
}

#[derive(Serialize)]
struct JsonTable<'a> {
    family: &'a str,
    k: usize,
    case: &'a str,
    rows: &'a [ConvergenceRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a str>,
}

impl ConvergenceTable {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    /// CSV with full-precision values; undefined rates are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,l2_err,l2_rate,energy_err,energy_rate\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.level,
                full(r.l2_err),
                rate_full(r.l2_rate),
                full(r.energy_err),
                rate_full(r.energy_rate)
            );
        }
        out
    }

    /// CSV with 4-significant-digit errors and 2-decimal rates.
    pub fn to_csv_short(&self) -> String {
        let mut out = String::from("level,l2_err,l2_rate,energy_err,energy_rate\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.level,
                format_sci(r.l2_err),
                r.l2_rate.map(|v| format!("{v:.2}")).unwrap_or_default(),
                format_sci(r.energy_err),
                r.energy_rate.map(|v| format!("{v:.2}")).unwrap_or_default()
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("{} mesh, k = {}, case {}\n\n", self.family, self.k, self.case);
        out.push_str("| level | L2 error | rate | energy error | rate |\n");
        out.push_str("|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.level,
                format_sci(r.l2_err),
                rate_short(r.l2_rate),
                format_sci(r.energy_err),
                rate_short(r.energy_rate)
            );
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(out, "\nstopped early: {f}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let t = JsonTable {
            family: self.family.name(),
            k: self.k,
            case: self.case.label(),
            rows: &self.rows,
            failure: self.failure.as_deref(),
        };
        serde_json::to_string_pretty(&t).expect("table serializes")
    }

    /// Full-precision rendering for files.
    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Markdown => self.to_markdown(),
            TableFormat::Json => self.to_json(),
        }
    }

    /// Rendering for the terminal: 4 significant digits.
    pub fn render_short(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv_short(),
            TableFormat::Markdown => self.to_markdown(),
            TableFormat::Json => self.to_json(),
        }
    }
}
