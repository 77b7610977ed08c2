//! Report rendering: deterministic TSV and JSON documents.
//!
//! Reports never contain timestamps or machine-dependent data; identical
//! configurations produce byte-for-byte identical output. Every numeric
//! carries its precision context: exact rationals are rendered as
//! `num/den` strings under a `precision: exact-rational` marker, and
//! p-adic values render through [`PadicScalar`]'s display form, which
//! embeds the modulus (`p^v * u (mod p^N)`).

use dworkmill::diffop::rational_string;
use dworkmill::mirror::PrimeVerdict;
use dworkmill::padic::IntegralityVerdict;
use dworkmill::QSeries;
use num_rational::BigRational;
use serde_json::Value;

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Tsv,
    Json,
}

/// Accumulates a TSV document: `# key: value` metadata lines, a header
/// row, and data rows.
pub struct TsvDoc {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TsvDoc {
    pub fn new() -> Self {
        TsvDoc {
            meta: Vec::new(),
            header: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn header(&mut self, cols: &[&str]) {
        self.header = cols.iter().map(|s| s.to_string()).collect();
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn finish(self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {}: {}\n", k, v));
        }
        if !self.header.is_empty() {
            out.push_str(&self.header.join("\t"));
            out.push('\n');
        }
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

pub fn json_doc(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON report serializes");
    s.push('\n');
    s
}

pub fn rat(r: &BigRational) -> String {
    rational_string(r)
}

/// JSON form of an exact rational series: explicit truncation order plus
/// coefficient strings.
pub fn series_json(s: &QSeries) -> Value {
    let coeffs: Vec<String> = s.coeffs().iter().map(rat).collect();
    serde_json::json!({ "truncation_order": s.order(), "coeffs": coeffs })
}

pub fn verdict_str(v: &IntegralityVerdict) -> &'static str {
    match v {
        IntegralityVerdict::Integral => "integral",
        IntegralityVerdict::NonIntegral => "non-integral",
        IntegralityVerdict::Inconclusive => "inconclusive",
    }
}

/// Summary verdict for a prime: label plus the 1-based first failing index
/// when there is one.
pub fn prime_verdict(v: &PrimeVerdict) -> (&'static str, Option<usize>) {
    match v {
        PrimeVerdict::Pass => ("pass", None),
        PrimeVerdict::Fail(r) => ("fail", Some(*r)),
        PrimeVerdict::OutsideHypotheses => ("outside-hypotheses", None),
    }
}
