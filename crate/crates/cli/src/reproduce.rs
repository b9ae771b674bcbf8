//! Preset runs that regenerate the datasets behind each table and figure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use partdist_core::combinatorics::{
    count_compositions, count_confusion_matrices, folded_binomial_max_prob, SamplerConfig,
};
use partdist_core::extremes::{
    alpha_n, argmax_rd_witness, independent_ard, max_med, max_rd, nmed, nrd, taylor_rd_small, two_by_two_max_ard,
};
use partdist_core::{
    ard, med, pair_counts, rand_distance, ratio_to_f64, solve_lsap, ConfusionMatrix, CostMatrix,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::experiments::{
    conditional_given_med_exhaustive, conditional_given_med_sampled, null_case_study, nrd_independent_curve,
    perturbation_sweep, two_by_two_figure, ConditionalTable, NullStudy,
};
use crate::output::{fmt_float, Artifact, Format, Provenance, Table};
use crate::render;

pub const BUILTIN_EXPECTATIONS: &str = include_str!("../data/expectations.json");

pub const DEFAULT_REPS: u64 = 10_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Figure1,
    Figure2,
    Null100,
    Null400,
    Figure5to7,
    Figure8,
    Tables,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::Figure1 => "figure1",
            Target::Figure2 => "figure2",
            Target::Null100 => "null100",
            Target::Null400 => "null400",
            Target::Figure5to7 => "figure5to7",
            Target::Figure8 => "figure8",
            Target::Tables => "tables",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub reps: Option<u64>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub min_count: u64,
    pub max_enum: u64,
    pub expectations: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            reps: None,
            samples: None,
            seed: 1,
            min_count: 10,
            max_enum: partdist_core::extremes::DEFAULT_ENUMERATION_LIMIT,
            expectations: None,
        }
    }
}

impl Options {
    fn reps(&self) -> u64 {
        self.reps.unwrap_or(DEFAULT_REPS)
    }

    fn samples(&self) -> u64 {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }
}

/// Null studies for `r = s` in 2..=5. Each cell has its own stream.
pub fn null_studies(n: u64, reps: u64, seed: u64) -> Result<Vec<NullStudy>, CliError> {
    (2..=5usize)
        .map(|r| {
            let stream = n * 16 + r as u64;
            Ok(null_case_study(r, r, n, reps, SamplerConfig::with_stream(seed, stream))?)
        })
        .collect()
}

pub fn figure2_curve() -> crate::experiments::NrdCurve {
    let pairs = [(2, 2), (2, 3), (3, 3), (2, 5), (3, 4), (4, 4), (5, 5)];
    let mut curve = crate::experiments::NrdCurve::default();
    for (r, s) in pairs {
        let step = (r * s) as u64;
        let n_values: Vec<u64> = (1..=200 / step).map(|k| k * step).collect();
        let part = nrd_independent_curve(&[(r, s)], &n_values);
        curve.points.extend(part.points);
        curve.skipped.extend(part.skipped);
    }
    curve
}

fn rd_cell_tables(table: &ConditionalTable, keys: &[u64]) -> Table {
    let mut t = Table::new("rd_given_med", &["med", "bin", "lower", "upper", "count"]);
    for &k in keys {
        if let Some(cell) = table.cells.get(&k) {
            for bin in cell.rd.summary().histogram {
                t.push(vec![
                    table.med_value(k).to_string(),
                    bin.label,
                    fmt_float(bin.lower),
                    fmt_float(bin.upper),
                    bin.count.to_string(),
                ]);
            }
        }
    }
    t
}

fn med_marginal_table(table: &ConditionalTable) -> Table {
    let mut t = Table::new("med_marginal", &["med", "med_exact", "count", "probability"]);
    for (&k, cell) in &table.cells {
        let m = table.med_value(k);
        t.push(vec![
            fmt_float(ratio_to_f64(&m)),
            m.to_string(),
            cell.count.to_string(),
            fmt_float(ratio_to_f64(&table.probability(k))),
        ]);
    }
    t
}

/// Builds the artifact for a target without writing it.
pub fn build(target: Target, options: &Options, provenance: Provenance) -> Result<Artifact, CliError> {
    let mut artifact = Artifact::new(provenance);
    match target {
        Target::Figure1 => {
            let rows = two_by_two_figure(20)?;
            artifact.tables.push(render::two_by_two_table(&rows));
        }
        Target::Figure2 => {
            artifact.tables = render::nrd_curve_tables(&figure2_curve());
        }
        Target::Null100 | Target::Null400 => {
            let n = if target == Target::Null100 { 100 } else { 400 };
            let studies = null_studies(n, options.reps(), options.seed)?;
            artifact.tables = render::null_tables(&studies);
            artifact.data = Some(render::null_json(&studies));
        }
        Target::Figure5to7 => {
            let table = conditional_given_med_exhaustive(3, 3, 20, options.max_enum)?;
            artifact.tables = render::conditional_tables(&table, 1);
            artifact.tables.push(rd_cell_tables(&table, &[2, 12]));
            artifact.tables.push(med_marginal_table(&table));
            artifact.data = Some(render::conditional_json(&table, 1));
        }
        Target::Figure8 => {
            let cfg = SamplerConfig::with_stream(options.seed, 80);
            let (table, estimate) = conditional_given_med_sampled(5, 5, 80, options.samples(), cfg)?;
            artifact.tables = render::conditional_tables(&table, options.min_count);
            artifact.tables.push(med_marginal_table(&table));
            artifact.tables.push(render::cardinality_table(&estimate));
            let mut data = render::conditional_json(&table, options.min_count);
            data["cardinality"] = render::cardinality_json(&estimate);
            artifact.data = Some(data);
        }
        Target::Tables => {
            let expectations = load_expectations(options.expectations.as_deref())?;
            let computed = compute_values(options)?;
            let diff = diff_expectations(&expectations, &computed);
            let failed = diff.iter().filter(|d| !d.pass).count();
            let mut t = Table::new("expectations", &["id", "check", "expected", "computed", "status"]);
            for d in &diff {
                t.push(vec![
                    d.id.clone(),
                    d.check.clone(),
                    d.expected.clone(),
                    d.computed.clone(),
                    if d.pass { "pass" } else { "FAIL" }.to_string(),
                ]);
            }
            artifact.tables.push(t);
            artifact.data = Some(json!({
                "failed": failed,
                "total": diff.len(),
                "results": diff,
            }));
            if failed > 0 {
                artifact.warnings.push(format!("{failed} of {} expectations differ", diff.len()));
            }
        }
    }
    Ok(artifact)
}

/// Writes a target's files into `dir` and returns warnings. A failed
/// expectations diff is reported as an error after the files are written.
pub fn run_reproduce(
    target: Target,
    options: &Options,
    provenance: Provenance,
    dir: &Path,
    format: Format,
) -> Result<Vec<String>, CliError> {
    let artifact = build(target, options, provenance)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let write = |name: String, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(path.display().to_string(), e))
    };
    match format {
        Format::Json => write(format!("{}.json", target.name()), artifact.to_json()?)?,
        Format::Text => write(format!("{}.txt", target.name()), artifact.to_text())?,
        Format::Csv => {
            for table in &artifact.tables {
                write(format!("{}_{}.csv", target.name(), table.name), artifact.table_csv(table)?)?;
            }
        }
    }
    if target == Target::Tables {
        if let Some(data) = &artifact.data {
            let failed = data["failed"].as_u64().unwrap_or(0) as usize;
            if failed > 0 {
                return Err(CliError::Expectations { failed, total: data["total"].as_u64().unwrap_or(0) as usize });
            }
        }
    }
    Ok(artifact.warnings)
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "check", rename_all = "lowercase")]
pub enum Expectation {
    /// Exact string match, used for rationals, integers and matrices.
    Exact { id: String, expected: String },
    /// Agreement after rounding to `decimals` places.
    Round { id: String, expected: f64, decimals: u32 },
    /// Relative error at most `tolerance`.
    Relative { id: String, expected: f64, tolerance: f64 },
    /// Closed interval.
    Within { id: String, low: f64, high: f64 },
    /// A property that must hold.
    Holds { id: String },
}

impl Expectation {
    pub fn id(&self) -> &str {
        match self {
            Expectation::Exact { id, .. }
            | Expectation::Round { id, .. }
            | Expectation::Relative { id, .. }
            | Expectation::Within { id, .. }
            | Expectation::Holds { id } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffLine {
    pub id: String,
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

pub fn load_expectations(path: Option<&Path>) -> Result<Vec<Expectation>, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p.display().to_string(), e))?,
        None => BUILTIN_EXPECTATIONS.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        file: path.map_or("expectations.json".into(), |p| p.display().to_string()),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Number(x) => x.as_f64(),
        Value::String(s) => match s.split_once('/') {
            Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
            None => s.parse().ok(),
        },
        _ => None,
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(x) => x.as_f64().map_or_else(|| x.to_string(), fmt_float),
        other => other.to_string(),
    }
}

pub fn diff_expectations(expectations: &[Expectation], computed: &BTreeMap<String, Value>) -> Vec<DiffLine> {
    expectations
        .iter()
        .map(|e| {
            let value = computed.get(e.id());
            let shown = value.map(show).unwrap_or_else(|| "missing".into());
            let (check, expected, pass) = match e {
                Expectation::Exact { expected, .. } => {
                    ("exact", expected.clone(), value.is_some_and(|v| show(v) == *expected))
                }
                Expectation::Round { expected, decimals, .. } => {
                    let half = 0.5 * 10f64.powi(-(*decimals as i32)) + 1e-12;
                    let pass = value.and_then(as_float).is_some_and(|x| (x - expected).abs() <= half);
                    ("round", format!("{expected} ({decimals} dp)"), pass)
                }
                Expectation::Relative { expected, tolerance, .. } => {
                    let pass = value.and_then(as_float).is_some_and(|x| (x / expected - 1.0).abs() <= *tolerance);
                    ("relative", format!("{} (rel {tolerance})", fmt_float(*expected)), pass)
                }
                Expectation::Within { low, high, .. } => {
                    let pass = value.and_then(as_float).is_some_and(|x| *low <= x && x <= *high);
                    ("within", format!("[{}, {}]", fmt_float(*low), fmt_float(*high)), pass)
                }
                Expectation::Holds { .. } => ("holds", "true".into(), value == Some(&Value::Bool(true))),
            };
            DiffLine { id: e.id().to_string(), check: check.into(), expected, computed: shown, pass }
        })
        .collect()
}

fn m(rows: &[&[u64]]) -> Result<ConfusionMatrix, CliError> {
    Ok(ConfusionMatrix::from_rows(rows)?)
}

fn data_matrix(name: &str, text: &str) -> Result<ConfusionMatrix, CliError> {
    crate::io::parse_matrix_csv(text, name)
}

pub const IRIS: &str = include_str!("../data/iris.csv");
pub const MODCLUST: &str = include_str!("../data/dlbcl_modclust.csv");
pub const ENTMERGE: &str = include_str!("../data/dlbcl_entmerge.csv");
pub const STEINLEY: &str = include_str!("../data/steinley.csv");

fn put(out: &mut BTreeMap<String, Value>, id: &str, value: impl ToString) {
    out.insert(id.to_string(), Value::String(value.to_string()));
}

fn big_ratio_to_f64(x: &partdist_core::BigRational) -> f64 {
    let parse = |s: String| s.parse::<f64>().unwrap_or(f64::NAN);
    parse(x.numer().to_string()) / parse(x.denom().to_string())
}

/// Every value checked by the `tables` target, by id.
pub fn compute_values(options: &Options) -> Result<BTreeMap<String, Value>, CliError> {
    let mut out = BTreeMap::new();

    let iris = data_matrix("iris.csv", IRIS)?;
    let modclust = data_matrix("dlbcl_modclust.csv", MODCLUST)?;
    let entmerge = data_matrix("dlbcl_entmerge.csv", ENTMERGE)?;
    let steinley = data_matrix("steinley.csv", STEINLEY)?;
    let n1 = m(&[&[16, 2], &[2, 0]])?;
    let n2 = m(&[&[11, 0], &[4, 5]])?;
    for (name, matrix) in [
        ("iris", &iris),
        ("modclust", &modclust),
        ("entmerge", &entmerge),
        ("steinley", &steinley),
        ("n1", &n1),
        ("n2", &n2),
    ] {
        put(&mut out, &format!("{name}.med"), med(matrix)?.value);
        put(&mut out, &format!("{name}.rd"), rand_distance(matrix)?);
        put(&mut out, &format!("{name}.ard"), ard(matrix)?);
    }
    put(&mut out, "iris.discordant_pairs", pair_counts(&iris)?.discordant());
    put(&mut out, "independent_2x2.med", med(&m(&[&[5, 5], &[5, 5]])?)?.value);
    put(&mut out, "nmed.2x2_med_0.4", nmed(&m(&[&[3, 2], &[2, 3]])?)?);

    let costs = CostMatrix::from_confusion(&steinley);
    let cost_of = |perm: &[usize]| perm.iter().enumerate().map(|(i, &j)| costs.get(i, j)).sum::<i64>();
    put(&mut out, "steinley.lsap_cost", solve_lsap(&costs).total_cost);
    put(&mut out, "steinley.identity_cost", cost_of(&[0, 1, 2, 3, 4]));
    put(&mut out, "steinley.permutation_45123_cost", cost_of(&[3, 4, 0, 1, 2]));

    for (r, s, n) in [(2, 2, 20), (3, 3, 20), (5, 5, 100), (2, 2, 21)] {
        put(&mut out, &format!("max_med.{r}_{s}_{n}"), max_med(r, s, n)?);
    }
    for (r, s, n) in [(2, 2, 20), (2, 2, 21)] {
        put(&mut out, &format!("max_rd.{r}_{s}_{n}"), max_rd(r, s, n)?);
    }
    let witness = argmax_rd_witness(5, 5, 100)?;
    let top_row: Vec<String> = witness.row(0).iter().map(u64::to_string).collect();
    put(&mut out, "witness.5_5_100.top_row", top_row.join(","));
    put(&mut out, "witness.2_2_20", argmax_rd_witness(2, 2, 20)?);
    put(&mut out, "nrd.independent_2_2_20", nrd(&m(&[&[5, 5], &[5, 5]])?)?);
    put(&mut out, "nrd.fours_5_5_100", nrd(&ConfusionMatrix::new(5, 5, vec![4; 25])?)?);
    put(&mut out, "independent_ard.2_3_24", independent_ard(2, 3, 24)?);
    put(&mut out, "independent_ard.3_3_27", independent_ard(3, 3, 27)?);

    let rows = two_by_two_figure(20)?;
    put(&mut out, "profile.n20.d1_16.med", rows[16].med);
    put(&mut out, "profile.n20.d1_16.rd", rows[16].rd);
    let contains = rows[16].ard_values.contains(&ard(&n1)?) && rows[16].ard_values.contains(&ard(&n2)?);
    out.insert("profile.n20.d1_16.contains_n1_n2".into(), Value::Bool(contains));
    let (best, at) = two_by_two_max_ard(20)?;
    put(&mut out, "two_by_two.n20.max_ard", best);
    put(&mut out, "two_by_two.n20.argmax", at);
    put(&mut out, "alpha_n.20_12", alpha_n(20, 12)?);
    put(&mut out, "alpha_n.20_16", alpha_n(20, 16)?);
    put(&mut out, "taylor.55_6_4_35.approx", taylor_rd_small(100, 6, 4)?);
    put(&mut out, "taylor.55_6_4_35.exact", rand_distance(&m(&[&[55, 6], &[4, 35]])?)?);

    put(&mut out, "compositions.80_25", count_compositions(80, 25));
    for (r, s, n) in [(2, 2, 20), (3, 3, 20), (5, 5, 80)] {
        put(&mut out, &format!("count.{r}_{s}_{n}"), count_confusion_matrices(r, s, n));
    }

    put(&mut out, "overlap.n2.med", med(&m(&[&[3, 2, 3], &[2, 2, 2], &[2, 2, 2]])?)?.value);
    put(&mut out, "overlap.n3.med", med(&m(&[&[1, 2, 5], &[3, 1, 2], &[2, 4, 0]])?)?.value);
    let sweep = perturbation_sweep(&[8, 6, 6], 18, 200, SamplerConfig::with_stream(options.seed, 3))?;
    put(&mut out, "overlap.13_moves.do", sweep.steps[13].degree_of_overlap);
    put(&mut out, "overlap.18_moves.do", sweep.steps[18].degree_of_overlap);
    let capped = sweep.steps.iter().all(|s| s.med.max().is_some_and(|m| m <= sweep.max_med));
    out.insert("overlap.med_never_exceeds_max".into(), Value::Bool(capped));

    let table = conditional_given_med_exhaustive(3, 3, 20, options.max_enum)?;
    put(&mut out, "enumeration.3_3_20.total", table.total);
    if let Some(e) = &table.max_ard {
        put(&mut out, "enumeration.3_3_20.max_ard", e.value);
        put(&mut out, "enumeration.3_3_20.max_ard_med", table.med_value(e.med_key));
    }
    if let Some(k) = table.argmax_mean_ard(1) {
        put(&mut out, "enumeration.3_3_20.argmax_mean_ard_med", table.med_value(k));
    }
    put(&mut out, "enumeration.3_3_20.p_med_13_20", table.probability(13));
    let outlier = m(&[&[16, 1, 1], &[1, 0, 0], &[1, 0, 0]])?;
    put(&mut out, "enumeration.3_3_20.outlier_ard", ard(&outlier)?);
    put(&mut out, "enumeration.3_3_20.outlier_med", med(&outlier)?.value);
    let support_ok = table.cells.keys().all(|&k| k <= 13);
    out.insert("enumeration.3_3_20.support_within_max".into(), Value::Bool(support_ok));
    put(&mut out, "enumeration.2_2_20.total", conditional_given_med_exhaustive(2, 2, 20, options.max_enum)?.total);

    let cfg = SamplerConfig::with_stream(options.seed, 80);
    let (sampled, estimate) = conditional_given_med_sampled(5, 5, 80, options.samples(), cfg)?;
    out.insert("sampling.5_5_80.rejection_rate_pct".into(), json!(100.0 * estimate.rejection_rate));
    out.insert("sampling.5_5_80.estimate".into(), json!(estimate.estimate));
    let frequent: Vec<u64> =
        sampled.cells.iter().filter(|(_, c)| c.count >= options.min_count).map(|(&k, _)| k).collect();
    let within = frequent.first().is_some_and(|&k| k >= 15) && frequent.last().is_some_and(|&k| k <= 60);
    out.insert("sampling.5_5_80.frequent_med_within_15_60".into(), Value::Bool(within));

    let p_half = big_ratio_to_f64(&folded_binomial_max_prob(100)?.probability);
    for n in [100u64, 400] {
        for study in null_studies(n, options.reps(), options.seed)? {
            let key = format!("null.{}_{}_{}", study.r, study.s, n);
            let ard_acc = study.criterion("ARD").expect("ARD is tracked");
            let med_acc = study.criterion("MED").expect("MED is tracked");
            out.insert(format!("{key}.ard_mean"), json!(ard_acc.mean()));
            out.insert(format!("{key}.med_within_bound"), Value::Bool(study.med_above_bound == 0));
            if n == 100 {
                out.insert(format!("{key}.sd_med_over_sd_ard"), json!(med_acc.sd() / ard_acc.sd()));
            }
            if study.r == 2 && n == 100 {
                let hits = med_acc.histogram().get(&50).copied().unwrap_or(0) as f64;
                let reps = study.reps as f64;
                let z = (hits / reps - p_half) / (p_half * (1.0 - p_half) / reps).sqrt();
                out.insert(format!("{key}.med_half_z"), json!(z));
            }
        }
    }
    Ok(out)
}
