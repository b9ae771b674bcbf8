//! Conversions from results to output tables and JSON values.

use partdist_core::combinatorics::CardinalityEstimate;
use partdist_core::extremes::{ConjectureReport, TwoByTwoRow};
use partdist_core::{ConfusionMatrix, CriteriaReport, Criterion, Rational};
use serde_json::{json, Value};

use crate::experiments::{ConditionalTable, Extreme, NrdCurve, NullStudy, PerturbationStudy, TableMode};
use crate::output::{fmt_float, fmt_ratio, Table};
use crate::summary::DistributionSummary;

fn exact(x: &Rational) -> String {
    x.to_string()
}

fn opt_exact(x: Option<&Rational>) -> String {
    x.map(exact).unwrap_or_default()
}

fn opt_float(x: Option<&Rational>) -> String {
    x.map(fmt_ratio).unwrap_or_default()
}

pub fn matrix_json(m: &ConfusionMatrix) -> Value {
    json!(m.to_rows())
}

pub fn criterion_json(c: &Criterion) -> Value {
    match c {
        Criterion::Exact { value, approx } => json!({"exact": exact(value), "value": approx}),
        Criterion::Undefined(u) => json!({"undefined": u.reason}),
    }
}

fn named_criteria(report: &CriteriaReport) -> [(&'static str, &Criterion); 9] {
    [
        ("MED", &report.med),
        ("NMED", &report.nmed),
        ("RD", &report.rd),
        ("NRD", &report.nrd),
        ("RI", &report.ri),
        ("ARI", &report.ari),
        ("ARD", &report.ard),
        ("HAMMING", &report.hamming),
        ("E_RD", &report.expected_rd),
    ]
}

pub fn criteria_tables(report: &CriteriaReport) -> Vec<Table> {
    let mut t = Table::new("criteria", &["criterion", "value", "exact", "note"]);
    for (name, c) in named_criteria(report) {
        match c {
            Criterion::Exact { value, approx } => t.push(vec![name.into(), fmt_float(*approx), exact(value), String::new()]),
            Criterion::Undefined(u) => t.push(vec![name.into(), String::new(), String::new(), u.reason.clone()]),
        }
    }
    let mut m = Table::new("matching", &["row", "col"]);
    for (i, j) in &report.matching {
        m.push(vec![(i + 1).to_string(), (j + 1).to_string()]);
    }
    vec![t, m]
}

pub fn criteria_json(report: &CriteriaReport) -> Value {
    let mut criteria = serde_json::Map::new();
    for (name, c) in named_criteria(report) {
        criteria.insert(name.to_string(), criterion_json(c));
    }
    json!({
        "r": report.r,
        "s": report.s,
        "n": report.n,
        "criteria": criteria,
        "matching": report.matching.iter().map(|(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
        "matching_note": "one optimal matching; others with the same MED may exist",
    })
}

pub fn undefined_warnings(report: &CriteriaReport) -> Vec<String> {
    named_criteria(report)
        .iter()
        .filter_map(|(name, c)| match c {
            Criterion::Undefined(u) => Some(format!("{name} undefined: {}", u.reason)),
            Criterion::Exact { .. } => None,
        })
        .collect()
}

pub fn matrix_table(name: &str, m: &ConfusionMatrix) -> Table {
    let columns: Vec<String> = (1..=m.cols()).map(|j| format!("c{j}")).collect();
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new(name, &refs);
    for row in m.to_rows() {
        t.push(row.iter().map(u64::to_string).collect());
    }
    t
}

pub fn conjecture_table(report: &ConjectureReport) -> Table {
    let mut t = Table::new("verification", &["quantity", "value", "exact", "witness"]);
    let mut push = |name: &str, v: Option<&Rational>, w: Option<&ConfusionMatrix>| {
        t.push(vec![name.into(), opt_float(v), opt_exact(v), w.map(|m| m.to_string()).unwrap_or_default()]);
    };
    push("count", Some(&Rational::from_integer(report.count as i128)), None);
    push("max_med_observed", Some(&report.max_med), Some(&report.med_maximizer));
    push("max_med_bound", report.max_med_bound.as_ref(), None);
    push("max_rd_observed", Some(&report.max_rd), Some(&report.rd_maximizer));
    push("max_rd_formula", report.max_rd_formula.as_ref(), None);
    push("max_ard_observed", report.max_ard.as_ref(), report.ard_maximizer.as_ref());
    let flag = |b: bool| if b { "true" } else { "false" }.to_string();
    t.push(vec!["rd_shape_attained".into(), flag(report.rd_shape_attained), String::new(), String::new()]);
    t.push(vec![
        "witness_attains_max_rd".into(),
        report.witness_attains_max_rd.map(flag).unwrap_or_default(),
        String::new(),
        String::new(),
    ]);
    t.push(vec!["ard_shape_attained".into(), flag(report.ard_shape_attained), String::new(), String::new()]);
    for c in &report.counterexamples {
        t.push(vec!["counterexample".into(), String::new(), String::new(), c.clone()]);
    }
    t
}

pub fn two_by_two_table(rows: &[TwoByTwoRow]) -> Table {
    let mut t = Table::new("profile", &["d1", "d2", "med", "rd", "ard", "ard_exact", "row_max"]);
    for row in rows {
        let top = row.ard_values.last();
        if row.ard_values.is_empty() {
            t.push(vec![
                row.d1.to_string(),
                row.d2.to_string(),
                fmt_ratio(&row.med),
                fmt_ratio(&row.rd),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        for v in &row.ard_values {
            t.push(vec![
                row.d1.to_string(),
                row.d2.to_string(),
                fmt_ratio(&row.med),
                fmt_ratio(&row.rd),
                fmt_ratio(v),
                exact(v),
                (Some(v) == top).to_string(),
            ]);
        }
    }
    t
}

pub fn nrd_curve_tables(curve: &NrdCurve) -> Vec<Table> {
    let mut t = Table::new("nrd_independent", &["r", "s", "n", "independent_rd", "max_rd", "nrd", "nrd_exact"]);
    for p in &curve.points {
        t.push(vec![
            p.r.to_string(),
            p.s.to_string(),
            p.n.to_string(),
            fmt_ratio(&p.independent_rd),
            fmt_ratio(&p.max_rd),
            fmt_ratio(&p.nrd),
            exact(&p.nrd),
        ]);
    }
    let mut skipped = Table::new("skipped", &["r", "s", "n", "reason"]);
    for p in &curve.skipped {
        skipped.push(vec![p.r.to_string(), p.s.to_string(), p.n.to_string(), p.reason.clone()]);
    }
    vec![t, skipped]
}

const SUMMARY_COLUMNS: [&str; 11] =
    ["count", "mean", "sd", "min", "p25", "p50", "p75", "max", "lower_whisker", "upper_whisker", "mean_exact"];

fn summary_cells(s: &DistributionSummary) -> Vec<String> {
    vec![
        s.count.to_string(),
        fmt_float(s.mean),
        fmt_float(s.sd),
        fmt_float(s.min),
        fmt_float(s.p25),
        fmt_float(s.p50),
        fmt_float(s.p75),
        fmt_float(s.max),
        fmt_float(s.lower_whisker),
        fmt_float(s.upper_whisker),
        s.mean_exact.clone().unwrap_or_default(),
    ]
}

fn with_prefix(prefix: &[&str], rest: &[&str]) -> Vec<String> {
    prefix.iter().chain(rest).map(|c| c.to_string()).collect()
}

fn table_with(name: &str, columns: Vec<String>) -> Table {
    Table { name: name.to_string(), columns, rows: Vec::new() }
}

/// Summary, histogram and check tables for a set of null studies.
pub fn null_tables(studies: &[NullStudy]) -> Vec<Table> {
    let mut summary = table_with("summary", with_prefix(&["r", "s", "n", "criterion"], &SUMMARY_COLUMNS));
    let mut histogram = Table::new("histogram", &["r", "s", "n", "criterion", "bin", "lower", "upper", "count"]);
    let mut checks = Table::new(
        "checks",
        &["r", "s", "n", "reps", "max_med_bound", "med_above_bound", "collapsed", "undefined"],
    );
    for study in studies {
        let dims = [study.r.to_string(), study.s.to_string(), study.n.to_string()];
        for acc in &study.criteria {
            let s = acc.summary();
            let mut row = dims.to_vec();
            row.push(s.name.clone());
            row.extend(summary_cells(&s));
            summary.push(row);
            for bin in &s.histogram {
                let mut row = dims.to_vec();
                row.extend([s.name.clone(), bin.label.clone(), fmt_float(bin.lower), fmt_float(bin.upper)]);
                row.push(bin.count.to_string());
                histogram.push(row);
            }
        }
        let undefined: Vec<String> = study.undefined.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut row = dims.to_vec();
        row.extend([
            study.reps.to_string(),
            exact(&study.max_med_bound),
            study.med_above_bound.to_string(),
            study.collapsed.to_string(),
            undefined.join(";"),
        ]);
        checks.push(row);
    }
    vec![summary, histogram, checks]
}

pub fn null_json(studies: &[NullStudy]) -> Value {
    Value::Array(
        studies
            .iter()
            .map(|s| {
                json!({
                    "r": s.r,
                    "s": s.s,
                    "n": s.n,
                    "reps": s.reps,
                    "seed": s.sampler.seed,
                    "stream": s.sampler.stream_id,
                    "max_med_bound": exact(&s.max_med_bound),
                    "med_above_bound": s.med_above_bound,
                    "collapsed": s.collapsed,
                    "undefined": s.undefined,
                    "summaries": s.criteria.iter().map(|a| a.summary()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn extreme_row(name: &str, e: Option<&Extreme>, n: u64) -> Vec<String> {
    match e {
        Some(e) => vec![
            name.into(),
            fmt_ratio(&e.value),
            exact(&e.value),
            exact(&Rational::new(e.med_key as i128, n as i128)),
            e.witness.to_string(),
        ],
        None => vec![name.into(), String::new(), String::new(), String::new(), String::new()],
    }
}

/// Conditional table rows. Keys below `min_count` keep their counts but
/// have their conditional statistics left blank.
pub fn conditional_tables(table: &ConditionalTable, min_count: u64) -> Vec<Table> {
    let mut columns = with_prefix(&["med", "med_exact", "count", "probability", "suppressed"], &[]);
    for prefix in ["rd", "ard"] {
        for c in ["mean", "sd", "min", "p25", "p50", "p75", "max", "lower_whisker", "upper_whisker"] {
            columns.push(format!("{prefix}_{c}"));
        }
    }
    columns.push("rd_mean_exact".into());
    let mut t = table_with("conditional", columns);
    for (&key, cell) in &table.cells {
        let suppressed = cell.count < min_count;
        let med = table.med_value(key);
        let mut row = vec![
            fmt_ratio(&med),
            exact(&med),
            cell.count.to_string(),
            fmt_ratio(&table.probability(key)),
            suppressed.to_string(),
        ];
        for acc in [&cell.rd, &cell.ard] {
            let s = acc.summary();
            let stats = [s.mean, s.sd, s.min, s.p25, s.p50, s.p75, s.max, s.lower_whisker, s.upper_whisker];
            row.extend(stats.iter().map(|&x| if suppressed { String::new() } else { fmt_float(x) }));
        }
        let rd_exact = cell.rd.exact_mean().filter(|_| !suppressed);
        row.push(opt_exact(rd_exact.as_ref()));
        t.push(row);
    }

    let mut extremes = Table::new("extremes", &["quantity", "value", "exact", "med", "witness"]);
    extremes.push(extreme_row("max_rd", table.max_rd.as_ref(), table.n));
    extremes.push(extreme_row("max_ard", table.max_ard.as_ref(), table.n));
    extremes.push(extreme_row("min_ard", table.min_ard.as_ref(), table.n));

    let mut overview = Table::new("overview", &["quantity", "value"]);
    overview.push(vec!["total".into(), table.total.to_string()]);
    overview.push(vec!["distinct_med".into(), table.cells.len().to_string()]);
    if let Some(k) = table.argmax_mean_ard(min_count) {
        overview.push(vec!["argmax_mean_ard_med".into(), exact(&table.med_value(k))]);
    }
    if let TableMode::Sampled { samples, .. } = table.mode {
        overview.push(vec!["samples".into(), samples.to_string()]);
        overview.push(vec!["attempts".into(), table.attempts.to_string()]);
        overview.push(vec!["min_count".into(), min_count.to_string()]);
    }
    vec![t, extremes, overview]
}

pub fn conditional_json(table: &ConditionalTable, min_count: u64) -> Value {
    let cells: Vec<Value> = table
        .cells
        .iter()
        .map(|(&k, c)| {
            let suppressed = c.count < min_count;
            json!({
                "med": exact(&table.med_value(k)),
                "count": c.count,
                "suppressed": suppressed,
                "ard_undefined": c.ard_undefined,
                "rd": if suppressed { Value::Null } else { json!(c.rd.summary()) },
                "ard": if suppressed { Value::Null } else { json!(c.ard.summary()) },
            })
        })
        .collect();
    let extreme = |e: Option<&Extreme>| {
        e.map(|e| {
            json!({
                "value": exact(&e.value),
                "med": exact(&table.med_value(e.med_key)),
                "witness": matrix_json(&e.witness),
            })
        })
    };
    json!({
        "r": table.r,
        "s": table.s,
        "n": table.n,
        "total": table.total,
        "attempts": table.attempts,
        "min_count": min_count,
        "argmax_mean_ard_med": table.argmax_mean_ard(min_count).map(|k| exact(&table.med_value(k))),
        "med_marginal": table.med.summary(),
        "cells": cells,
        "max_rd": extreme(table.max_rd.as_ref()),
        "max_ard": extreme(table.max_ard.as_ref()),
        "min_ard": extreme(table.min_ard.as_ref()),
    })
}

pub fn cardinality_table(e: &CardinalityEstimate) -> Table {
    let mut t = Table::new("cardinality", &["quantity", "value"]);
    t.push(vec!["compositions".into(), e.compositions.to_string()]);
    t.push(vec!["accepted".into(), e.accepted.to_string()]);
    t.push(vec!["attempts".into(), e.attempts.to_string()]);
    t.push(vec!["rejection_rate".into(), fmt_float(e.rejection_rate)]);
    t.push(vec!["estimate".into(), fmt_float(e.estimate)]);
    t.push(vec!["std_error".into(), fmt_float(e.std_error)]);
    t
}

pub fn cardinality_json(e: &CardinalityEstimate) -> Value {
    json!({
        "compositions": e.compositions.to_string(),
        "accepted": e.accepted,
        "attempts": e.attempts,
        "rejection_rate": e.rejection_rate,
        "estimate": e.estimate,
        "std_error": e.std_error,
    })
}

pub fn perturb_table(study: &PerturbationStudy) -> Table {
    let mut t = Table::new(
        "perturbation",
        &["moves", "degree_of_overlap", "med_mean", "med_sd", "med_min", "med_max", "below_overlap", "max_med"],
    );
    for step in &study.steps {
        t.push(vec![
            step.moves.to_string(),
            exact(&step.degree_of_overlap),
            fmt_float(step.med.mean()),
            fmt_float(step.med.sd()),
            opt_exact(step.med.min().as_ref()),
            opt_exact(step.med.max().as_ref()),
            step.below_overlap.to_string(),
            exact(&study.max_med),
        ]);
    }
    t
}
