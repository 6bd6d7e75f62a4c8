//! Machine-readable reports. Timing lives only in `wall_time_ms`.

use std::collections::BTreeMap;

use serde::Serialize;

use wnaforge_core::jets::{MatrixJet, ResidualReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual_zero: bool,
    pub first_nonzero_monomial: Option<String>,
    /// Total degree through which the residual is exact; absent for symbolic checks.
    pub order_checked: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn jet(name: impl Into<String>, residual: &MatrixJet, order: i64) -> Self {
        let r = ResidualReport::of(residual, order);
        Check {
            name: name.into(),
            residual_zero: r.residual_zero,
            first_nonzero_monomial: r.first_nonzero_monomial,
            order_checked: Some(r.order_checked),
            detail: None,
        }
    }

    pub fn symbolic(name: impl Into<String>, zero: bool, residual: String) -> Self {
        Check {
            name: name.into(),
            residual_zero: zero,
            first_nonzero_monomial: if zero { None } else { Some(residual) },
            order_checked: None,
            detail: None,
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub residual_zero: bool,
    pub first_nonzero_monomial: Option<String>,
    pub order_checked: Option<i64>,
    pub wall_time_ms: u128,
    pub checks: Vec<Check>,
    /// Checks that could not run, with the reason.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    /// Derived expressions and other named results.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<Check>) -> Self {
        let failing = checks.iter().find(|c| !c.residual_zero);
        Report {
            command: command.into(),
            residual_zero: failing.is_none(),
            first_nonzero_monomial: failing.map(|c| format!("{}: {}", c.name, c.first_nonzero_monomial.as_deref().unwrap_or("?"))),
            order_checked: checks.iter().filter_map(|c| c.order_checked).min(),
            wall_time_ms: 0,
            checks,
            skipped: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_plain(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let order = c.order_checked.map(|o| format!(" (through degree {})", o)).unwrap_or_default();
            let status = if c.residual_zero { "zero".to_string() } else { format!("NONZERO {}", c.first_nonzero_monomial.as_deref().unwrap_or("")) };
            out.push_str(&format!("{}: {}{}", c.name, status, order));
            if let Some(d) = &c.detail {
                out.push_str(&format!(" [{}]", d));
            }
            out.push('\n');
        }
        for s in &self.skipped {
            out.push_str(&format!("skipped: {}\n", s));
        }
        out.push_str(&format!("{}: {} ({} ms)\n", self.command, if self.residual_zero { "ok" } else { "FAILED" }, self.wall_time_ms));
        out
    }
}

/// Coefficient dump: `row,col,monomial,coefficient`.
pub fn jet_csv(m: &MatrixJet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "monomial", "coefficient"]).expect("in-memory writer");
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let e = m.get(i, j);
            for (mono, c) in e.terms() {
                let name = e.ring().render_mono(mono);
                let name = if name.is_empty() { "1".to_string() } else { name };
                w.write_record([i.to_string(), j.to_string(), name, c.to_string()]).expect("in-memory writer");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}
