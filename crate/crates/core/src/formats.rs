//! File formats and report rendering.
//!
//! * Spec files are JSON documents with fields `inputs`, `output`, `rows`
//!   (each row `{"in": [...], "p": [...] | null}`) and an optional
//!   `partial` flag. The canonical layout puts one row per line.
//! * Observation files are comma-delimited with a header row; the last
//!   column is the output. Quoting is not supported.
//! * Cloud files are comma-delimited, one row per completion sample, floats
//!   fixed at 6 decimals.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::completion::{BoundSource, CompletionCloud, QuantityBounds, Range};
use crate::decomposition::FidReport;
use crate::error::{FidError, Result};
use crate::model::{AnySpec, DraftRow, SpecDraft, VariableDecl};
use crate::observation::{Ingestion, ObservationTable};
use crate::structure::{DegeneracyMerge, DependentMerge, StructureReport};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    partial: bool,
    inputs: Vec<VariableDecl>,
    output: VariableDecl,
    rows: Vec<RowFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    #[serde(rename = "in")]
    assignment: Vec<String>,
    p: Option<Vec<f64>>,
}

pub fn parse_spec_draft(text: &str) -> Result<SpecDraft> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| {
        let mut msg = e.to_string();
        if let Some(at) = msg.rfind(" at line ") {
            msg.truncate(at);
        }
        FidError::parse(Some(e.line()), format!("{msg} (column {})", e.column()))
    })?;
    Ok(SpecDraft {
        inputs: file.inputs,
        output: file.output,
        rows: file
            .rows
            .into_iter()
            .map(|r| DraftRow {
                assignment: r.assignment,
                probabilities: r.p,
            })
            .collect(),
        partial: file.partial,
    })
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<AnySpec> {
    parse_spec_draft(text)?.into_spec()
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Canonical spec file text.
pub fn write_spec(draft: &SpecDraft) -> String {
    let mut s = String::from("{\n");
    if draft.partial {
        s.push_str("  \"partial\": true,\n");
    }
    s.push_str("  \"inputs\": [\n");
    let inputs: Vec<String> = draft
        .inputs
        .iter()
        .map(|d| format!("    {}", json(d)))
        .collect();
    s.push_str(&inputs.join(",\n"));
    let _ = write!(
        s,
        "\n  ],\n  \"output\": {},\n  \"rows\": [\n",
        json(&draft.output)
    );
    let rows: Vec<String> = draft
        .rows
        .iter()
        .map(|r| {
            format!(
                "    {}",
                json(&RowFile {
                    assignment: r.assignment.clone(),
                    p: r.probabilities.clone(),
                })
            )
        })
        .collect();
    s.push_str(&rows.join(",\n"));
    s.push_str("\n  ]\n}\n");
    s
}

pub fn write_any_spec(spec: &AnySpec) -> String {
    match spec {
        AnySpec::Complete(c) => write_spec(&SpecDraft::from(c)),
        AnySpec::Partial(p) => write_spec(&SpecDraft::from(p)),
    }
}

fn split_fields(line: &str, lineno: usize) -> Result<Vec<String>> {
    if line.contains('"') {
        return Err(FidError::parse(
            Some(lineno),
            "quoted fields are not supported",
        ));
    }
    let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
    if fields.iter().any(String::is_empty) {
        return Err(FidError::parse(Some(lineno), "empty field"));
    }
    Ok(fields)
}

pub fn parse_observations(text: &str) -> Result<ObservationTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| FidError::parse(None, "empty observation file"))?;
    let columns = split_fields(header, hline)?;
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let fields = split_fields(line, lineno)?;
        if fields.len() != columns.len() {
            return Err(FidError::parse(
                Some(lineno),
                format!("expected {} fields, got {}", columns.len(), fields.len()),
            ));
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(FidError::parse(None, "no observations after the header"));
    }
    ObservationTable::new(columns, rows)
}

pub fn write_observations(table: &ObservationTable) -> String {
    let mut s = table.columns.join(",");
    s.push('\n');
    for r in &table.rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn cloud_header(variables: &[String]) -> String {
    let mut cols = vec![
        "sample_id".to_string(),
        "kind".into(),
        "alpha".into(),
        "total".into(),
        "synergy".into(),
        "entropy_Y".into(),
        "residual".into(),
    ];
    for v in variables {
        cols.push(format!("ind_{v}"));
        cols.push(format!("solo_{v}"));
        cols.push(format!("loss_{v}"));
    }
    cols.join(",")
}

pub fn write_cloud(cloud: &CompletionCloud) -> String {
    let names: Vec<String> = cloud
        .bounds
        .variables
        .iter()
        .map(|v| v.name.clone())
        .collect();
    let mut s = cloud_header(&names);
    s.push('\n');
    for sample in &cloud.samples {
        let r = &sample.report;
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            sample.sample_id,
            sample.kind,
            sample.alpha.map(|a| fixed(a, 6)).unwrap_or_default(),
            fixed(r.total_information, 6),
            fixed(r.synergy, 6),
            fixed(r.output_entropy, 6),
            fixed(r.residual_entropy, 6),
        );
        for v in &r.variables {
            let _ = write!(
                s,
                ",{},{},{}",
                fixed(v.independent, 6),
                fixed(v.solo_synergy, 6),
                fixed(v.loss, 6)
            );
        }
        s.push('\n');
    }
    s
}

pub fn render_report(report: &FidReport) -> String {
    let width = report
        .variables
        .iter()
        .map(|v| v.label.chars().count())
        .max()
        .unwrap_or(0)
        .max("Variable".len());
    let mut s = String::from("Functional Information Decomposition Report\n");
    let _ = writeln!(
        s,
        "{:<width$}  {:<12}  Solo-Synergy",
        "Variable", "Independent"
    );
    for v in &report.variables {
        let pad = width - v.label.chars().count();
        let _ = writeln!(
            s,
            "{}{}  {:<12}  {} bits",
            v.label,
            " ".repeat(pad),
            format!("{} bits", fixed(v.independent, 4)),
            fixed(v.solo_synergy, 4),
        );
    }
    let _ = writeln!(s, "Synergy: {} bits", fixed(report.synergy, 4));
    let _ = writeln!(
        s,
        "Total Information: {} bits",
        fixed(report.total_information, 4)
    );
    let _ = writeln!(
        s,
        "Output Entropy: {} bits",
        fixed(report.output_entropy, 4)
    );
    let _ = writeln!(
        s,
        "Residual Entropy: {} bits",
        fixed(report.residual_entropy, 4)
    );
    s
}

fn range(r: &Range) -> String {
    format!("{} - {} bits", fixed(r.min, 4), fixed(r.max, 4))
}

pub fn render_bounds(cloud: &CompletionCloud) -> String {
    let tag = match (cloud.grid_refined.is_some(), cloud.source) {
        (true, BoundSource::Enumerated) => "enumerated, grid-refined",
        (true, BoundSource::Sampled) => "sampled, grid-refined, not certified",
        (false, BoundSource::Enumerated) => "enumerated",
        (false, BoundSource::Sampled) => "sampled, not certified",
    };
    let b: &QuantityBounds = cloud.best_bounds();
    let mut lines: Vec<(String, String)> = vec![
        ("Total Information".into(), range(&b.total_information)),
        ("Synergy".into(), range(&b.synergy)),
    ];
    for v in &b.variables {
        lines.push((format!("I_ind({})", v.name), range(&v.independent)));
    }
    for v in &b.variables {
        lines.push((format!("I_solo_syn({})", v.name), range(&v.solo_synergy)));
    }
    for v in &b.variables {
        lines.push((format!("I_loss({})", v.name), range(&v.loss)));
    }
    lines.push(("Output Entropy".into(), range(&b.output_entropy)));
    lines.push(("Residual Entropy".into(), range(&b.residual_entropy)));
    let width = lines
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut s = format!(
        "FID bounds over {} completions ({tag})\n",
        cloud.samples.len()
    );
    for (k, v) in lines {
        let pad = width - k.chars().count();
        let _ = writeln!(s, "{k}{}  {v}", " ".repeat(pad));
    }
    s
}

pub fn render_structure(report: &StructureReport) -> String {
    let mut s = String::new();
    for v in &report.variables {
        let _ = writeln!(s, "{}: {}", v.name, v.global_class);
        for c in &v.values {
            let _ = writeln!(
                s,
                "  {} -> {{{}}}  {}",
                c.value,
                c.output_set.join(","),
                c.local_class
            );
        }
        let degenerate: Vec<String> = v
            .degeneracy_groups
            .iter()
            .filter(|g| g.len() > 1)
            .map(|g| format!("{{{}}}", g.join(",")))
            .collect();
        if degenerate.is_empty() {
            let _ = writeln!(s, "  degeneracy: none");
        } else {
            let _ = writeln!(s, "  degeneracy: {}", degenerate.join(" "));
        }
        if v.functional_differs {
            let _ = writeln!(
                s,
                "  note: merging degenerate states changes the class to {} (functional status differs from practical status)",
                v.functional_class
            );
        }
    }
    s
}

pub fn render_ingestion(ing: &Ingestion) -> String {
    let total = ing.observed_patterns + ing.unobserved_patterns;
    let mut s = format!(
        "{} observations, {} of {} input patterns observed, {} unknown\n",
        ing.observations, ing.observed_patterns, total, ing.unobserved_patterns
    );
    for g in &ing.gaps {
        let combos: Vec<String> = g
            .unobserved
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        let _ = writeln!(
            s,
            "inputs {} and {} never co-occur in {} combination(s): {}; if they are dependent, consider `merge --dependent {},{}`",
            g.left,
            g.right,
            g.unobserved.len(),
            combos.join(" "),
            g.left,
            g.right
        );
    }
    s
}

pub fn render_degeneracy_merge(m: &DegeneracyMerge) -> String {
    if m.is_identity() {
        return "no degeneracy found\n".to_string();
    }
    let mut s = String::new();
    for v in &m.mappings {
        for (from, to) in v.map.iter().filter(|(a, b)| a != b) {
            let _ = writeln!(s, "{}: {from} -> {to}", v.variable);
        }
    }
    s
}

pub fn render_dependent_merge(m: &DependentMerge) -> String {
    format!(
        "composite {} with {} states: {}\ninfeasible: {}\n",
        m.composite,
        m.states.len(),
        m.states.join(" "),
        if m.infeasible.is_empty() {
            "none".to_string()
        } else {
            m.infeasible.join(" ")
        }
    )
}
