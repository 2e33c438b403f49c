//! Rendering of a [`McReport`] as flat CSV tables plus one JSON document.
//!
//! Rendering is separate from writing so callers can place the files
//! atomically.

use std::fmt::Write;

use serde::Serialize;

use crate::grid::fmt_f64;
use crate::verify::{ConfidenceResult, McReport};

fn header(comments: &[String], columns: &str) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "# {c}");
    }
    let _ = writeln!(s, "{columns}");
    s
}

fn row(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// `confidence.csv` rows for a list of band results.
pub fn confidence_table(results: &[ConfidenceResult], comments: &[String]) -> String {
    let mut s = header(comments, "n,delta,u0,coverage");
    for c in results {
        s += &row(&[
            c.n.to_string(),
            fmt_f64(c.delta),
            fmt_f64(c.u0),
            fmt_f64(c.coverage),
        ]);
    }
    s
}

/// File name and content of every CSV table.
pub fn render_tables(report: &McReport, comments: &[String]) -> Vec<(&'static str, String)> {
    let mut bias = header(comments, "n,lambda,bias");
    let mut cov = header(comments, "n,lambda,mu,emp,theory,rel_err");
    let mut normality = header(comments, "n,lambda,ks,p");
    let mut tails = header(comments, "n,u,w0,w");
    let mut holder = header(comments, "n,h,q95_ratio");
    let mut confidence = Vec::new();
    for size in &report.sizes {
        let n = size.n.to_string();
        for b in &size.bias {
            bias += &row(&[n.clone(), fmt_f64(b.lambda), fmt_f64(b.bias)]);
        }
        for c in &size.cov {
            cov += &row(&[
                n.clone(),
                fmt_f64(c.lambda),
                fmt_f64(c.mu),
                fmt_f64(c.emp),
                fmt_f64(c.theory),
                fmt_f64(c.rel_err),
            ]);
        }
        for k in &size.normality {
            normality += &row(&[n.clone(), fmt_f64(k.lambda), fmt_f64(k.ks), fmt_f64(k.p)]);
        }
        for t in &size.tails {
            tails += &row(&[n.clone(), fmt_f64(t.u), fmt_f64(t.w0), fmt_f64(t.w)]);
        }
        for h in &size.holder {
            holder += &row(&[n.clone(), fmt_f64(h.h), fmt_f64(h.q95_ratio)]);
        }
        confidence.extend(size.confidence.clone());
    }
    vec![
        ("bias.csv", bias),
        ("cov.csv", cov),
        ("normality.csv", normality),
        ("tails.csv", tails),
        ("holder.csv", holder),
        ("confidence.csv", confidence_table(&confidence, comments)),
    ]
}

#[derive(Serialize)]
struct Document<'a, P: Serialize> {
    provenance: &'a P,
    report: &'a McReport,
}

/// `report.json`: the full report next to a caller-supplied provenance object.
pub fn render_json<P: Serialize>(report: &McReport, provenance: &P) -> String {
    let mut s =
        serde_json::to_string_pretty(&Document { provenance, report }).expect("report serializes");
    s.push('\n');
    s
}
