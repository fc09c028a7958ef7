use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

/// How a residual is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    /// For cases that must fail a property, e.g. a perturbed potential.
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        }
    }

    pub fn holds(self, residual: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => residual <= tolerance,
            Relation::AtLeast => residual >= tolerance,
            Relation::Above => residual > tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub description: String,
    /// `None` when the computation itself failed; see `error`.
    pub residual: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRecord {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        outcome: Result<f64>,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let (residual, error) = match outcome {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            id: id.into(),
            description: description.into(),
            pass: residual.is_some_and(|r| relation.holds(r, tolerance)),
            residual,
            relation,
            tolerance,
            error,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub tool_version: String,
    pub pass: bool,
    pub cases: Vec<CaseRecord>,
    /// Kept apart from the deterministic fields above.
    pub timing: Timing,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64, cases: Vec<CaseRecord>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            pass: cases.iter().all(|c| c.pass),
            cases,
            timing: Timing::default(),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn residual_text(r: Option<f64>) -> String {
    r.map_or_else(|| "error".to_string(), |v| format!("{v:e}"))
}

fn csv_table(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "suite",
        "id",
        "description",
        "residual",
        "relation",
        "tolerance",
        "pass",
    ])?;
    for c in &report.cases {
        w.write_record([
            report.suite.as_str(),
            &c.id,
            &c.description,
            &residual_text(c.residual),
            c.relation.symbol(),
            &format!("{:e}", c.tolerance),
            if c.pass { "true" } else { "false" },
        ])?;
    }
    if !report.cases.is_empty() {
        let passed = report.cases.iter().filter(|c| c.pass).count();
        w.write_record([
            report.suite.as_str(),
            "summary",
            &format!("{passed}/{} cases pass", report.cases.len()),
            "",
            "",
            "",
            if report.pass { "true" } else { "false" },
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn text_table(report: &Report) -> String {
    let rows: Vec<[String; 4]> = report
        .cases
        .iter()
        .map(|c| {
            [
                if c.pass { "ok" } else { "FAIL" }.to_string(),
                c.id.clone(),
                format!(
                    "{} {} {:e}",
                    residual_text(c.residual),
                    c.relation.symbol(),
                    c.tolerance
                ),
                match &c.error {
                    Some(e) => format!("{} ({e})", c.description),
                    None => c.description.clone(),
                },
            ]
        })
        .collect();
    let w0 = rows.iter().map(|r| r[1].chars().count()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r[2].chars().count()).max().unwrap_or(0);
    let mut s = format!(
        "suite {} (seed {}, version {})\n",
        report.suite, report.seed, report.tool_version
    );
    for r in &rows {
        s += &format!("{:<4} {:<w0$}  {:<w1$}  {}\n", r[0], r[1], r[2], r[3]);
    }
    let passed = report.cases.iter().filter(|c| c.pass).count();
    s += &format!(
        "{}: {passed}/{} cases pass\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.cases.len()
    );
    s
}

/// Serializes `report`. JSON carries every field, `timing` included; CSV
/// (one case per row plus a summary row) and text carry only the
/// deterministic fields.
pub fn emit_table(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => csv_table(report),
        Format::Text => Ok(text_table(report)),
    }
}
