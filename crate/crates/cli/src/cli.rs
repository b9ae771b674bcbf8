//! Command-line definitions and dispatch.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use partdist_core::combinatorics::{count_confusion_matrices, SamplerConfig};
use partdist_core::extremes::{
    argmax_rd_witness, independent_ard, independent_rd, max_med, max_rd, verify_maximizer_conjectures,
    DEFAULT_ENUMERATION_LIMIT,
};
use partdist_core::{criteria_report, crosstab};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::experiments::{
    conditional_given_med_exhaustive, conditional_given_med_sampled, null_case_study, perturbation_sweep,
};
use crate::io::{parse_label_pairs, parse_matrix_csv};
use crate::output::{fmt_ratio, write_output, Artifact, Format, Provenance, Table};
use crate::render;
use crate::reproduce::{run_reproduce, Target};

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "partdist", version, about = "Exact distances between partitions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv, env = "PARTDIST_FORMAT")]
    pub format: Format,
    /// Output file (a directory for `reproduce`); standard output when absent.
    #[arg(long, global = true, env = "PARTDIST_OUT")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true, env = "PARTDIST_WORKERS")]
    #[serde(skip)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Dims {
    #[arg(long, env = "PARTDIST_R")]
    pub r: usize,
    #[arg(long, env = "PARTDIST_S")]
    pub s: usize,
    #[arg(long, env = "PARTDIST_N")]
    pub n: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Seeding {
    #[arg(long, default_value_t = 1, env = "PARTDIST_SEED")]
    pub seed: u64,
    /// Random stream under the seed.
    #[arg(long, default_value_t = 0, env = "PARTDIST_STREAM")]
    pub stream: u64,
}

impl Seeding {
    pub fn config(&self) -> SamplerConfig {
        SamplerConfig::with_stream(self.seed, self.stream)
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
pub enum Command {
    /// All criteria for a confusion matrix or a pair of labelings.
    #[command(group(ArgGroup::new("input").required(true).args(["matrix", "labels"])))]
    Compare {
        /// Headerless CSV of nonnegative integer counts.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Two label columns, one object per line.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
    /// Largest MED and RD for given dimensions, with the RD witness.
    Extremes {
        #[command(flatten)]
        dims: Dims,
        /// Also check the closed forms against a full enumeration.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT, env = "PARTDIST_MAX_ENUM")]
        max_enum: u64,
    },
    /// RD and ARD given the MED over every matrix of N(r, s, n).
    Enumerate {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT, env = "PARTDIST_MAX_ENUM")]
        max_enum: u64,
    },
    /// RD and ARD given the MED over uniform draws from N(r, s, n).
    Sample {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 1_000_000, env = "PARTDIST_SAMPLES")]
        samples: u64,
        #[command(flatten)]
        seeding: Seeding,
        /// Keys with fewer draws get no conditional statistics.
        #[arg(long, default_value_t = 10, env = "PARTDIST_MIN_COUNT")]
        min_count: u64,
    },
    /// Criteria distributions for independent uniform labelings.
    NullSim {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 10_000, env = "PARTDIST_REPS")]
        reps: u64,
        #[command(flatten)]
        seeding: Seeding,
    },
    /// MED against the degree of overlap when moving objects off a diagonal.
    Perturb {
        /// Diagonal cluster sizes.
        #[arg(long, value_delimiter = ',', default_value = "8,6,6")]
        sizes: Vec<u64>,
        /// Objects moved, one at a time.
        #[arg(long, default_value_t = 18)]
        steps: u64,
        #[arg(long, default_value_t = 100, env = "PARTDIST_REPS")]
        reps: u64,
        #[command(flatten)]
        seeding: Seeding,
    },
    /// Regenerates a table or figure dataset.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Replicates for the null studies.
        #[arg(long, env = "PARTDIST_REPS")]
        reps: Option<u64>,
        /// Draws for the sampling study.
        #[arg(long, env = "PARTDIST_SAMPLES")]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1, env = "PARTDIST_SEED")]
        seed: u64,
        #[arg(long, default_value_t = 10, env = "PARTDIST_MIN_COUNT")]
        min_count: u64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT, env = "PARTDIST_MAX_ENUM")]
        max_enum: u64,
        /// Expected values for `tables`; the built-in file when absent.
        #[arg(long)]
        expectations: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compare { .. } => "compare",
            Command::Extremes { .. } => "extremes",
            Command::Enumerate { .. } => "enumerate",
            Command::Sample { .. } => "sample",
            Command::NullSim { .. } => "null-sim",
            Command::Perturb { .. } => "perturb",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn compare(
    provenance: Provenance,
    matrix: Option<&Path>,
    labels: Option<&Path>,
    delimiter: char,
) -> Result<Artifact, CliError> {
    let m = match (matrix, labels) {
        (Some(path), _) => parse_matrix_csv(&read(path)?, &path.display().to_string())?,
        (None, Some(path)) => {
            let delimiter = u8::try_from(delimiter)
                .map_err(|_| CliError::Usage(format!("delimiter must be a single-byte character: {delimiter:?}")))?;
            let (a, b) = parse_label_pairs(&read(path)?, delimiter, &path.display().to_string())?;
            crosstab(&a, &b)?
        }
        (None, None) => return Err(CliError::Usage("compare needs --matrix or --labels".into())),
    };
    let report = criteria_report(&m);
    let mut artifact = Artifact::new(provenance);
    artifact.warnings = render::undefined_warnings(&report);
    artifact.tables = render::criteria_tables(&report);
    artifact.tables.push(render::matrix_table("matrix", &m));
    let mut data = render::criteria_json(&report);
    data["matrix"] = render::matrix_json(&m);
    artifact.data = Some(data);
    Ok(artifact)
}

pub fn extremes(provenance: Provenance, dims: &Dims, verify: bool, max_enum: u64) -> Result<Artifact, CliError> {
    let Dims { r, s, n } = *dims;
    let mut artifact = Artifact::new(provenance);
    let mut t = Table::new("extremes", &["quantity", "value", "exact"]);
    let med = max_med(r, s, n)?;
    t.push(vec!["max_med".into(), fmt_ratio(&med), med.to_string()]);
    let mut data = json!({"r": r, "s": s, "n": n, "max_med": med.to_string()});
    match max_rd(r, s, n) {
        Ok(rd) => {
            t.push(vec!["max_rd".into(), fmt_ratio(&rd), rd.to_string()]);
            let w = argmax_rd_witness(r, s, n)?;
            data["max_rd"] = json!(rd.to_string());
            data["max_rd_witness"] = render::matrix_json(&w);
            artifact.tables.push(t.clone());
            artifact.tables.push(render::matrix_table("max_rd_witness", &w));
        }
        Err(e) => artifact.warnings.push(format!("max_rd closed form unavailable: {e}")),
    }
    if artifact.tables.is_empty() {
        artifact.tables.push(t);
    }
    if let (Ok(rd), Ok(ard)) = (independent_rd(r, s, n), independent_ard(r, s, n)) {
        let mut ind = Table::new("independent", &["quantity", "value", "exact"]);
        ind.push(vec!["independent_rd".into(), fmt_ratio(&rd), rd.to_string()]);
        ind.push(vec!["independent_ard".into(), fmt_ratio(&ard), ard.to_string()]);
        data["independent_rd"] = json!(rd.to_string());
        data["independent_ard"] = json!(ard.to_string());
        if let Ok(m) = max_rd(r, s, n) {
            let nrd = rd / m;
            ind.push(vec!["independent_nrd".into(), fmt_ratio(&nrd), nrd.to_string()]);
            data["independent_nrd"] = json!(nrd.to_string());
        }
        artifact.tables.push(ind);
    }
    if verify {
        let report = verify_maximizer_conjectures(r, s, n, max_enum)?;
        data["verification"] = json!({
            "count": report.count,
            "max_med": report.max_med.to_string(),
            "max_rd": report.max_rd.to_string(),
            "max_ard": report.max_ard.map(|v| v.to_string()),
            "ard_maximizer": report.ard_maximizer.as_ref().map(render::matrix_json),
            "counterexamples": report.counterexamples,
        });
        artifact.tables.push(render::conjecture_table(&report));
    }
    artifact.data = Some(data);
    Ok(artifact)
}

pub fn enumerate(provenance: Provenance, dims: &Dims, max_enum: u64) -> Result<Artifact, CliError> {
    let Dims { r, s, n } = *dims;
    let table = conditional_given_med_exhaustive(r, s, n, max_enum)?;
    let mut artifact = Artifact::new(provenance);
    artifact.tables = render::conditional_tables(&table, 1);
    let mut overview_extra = Table::new("count", &["quantity", "value"]);
    overview_extra.push(vec!["inclusion_exclusion".into(), count_confusion_matrices(r, s, n).to_string()]);
    artifact.tables.push(overview_extra);
    let mut data = render::conditional_json(&table, 1);
    data["inclusion_exclusion"] = json!(count_confusion_matrices(r, s, n).to_string());
    artifact.data = Some(data);
    Ok(artifact)
}

pub fn sample(
    provenance: Provenance,
    dims: &Dims,
    samples: u64,
    seeding: &Seeding,
    min_count: u64,
) -> Result<Artifact, CliError> {
    let Dims { r, s, n } = *dims;
    let (table, estimate) = conditional_given_med_sampled(r, s, n, samples, seeding.config())?;
    let mut artifact = Artifact::new(provenance);
    artifact.tables = render::conditional_tables(&table, min_count);
    artifact.tables.push(render::cardinality_table(&estimate));
    let mut data = render::conditional_json(&table, min_count);
    data["cardinality"] = render::cardinality_json(&estimate);
    artifact.data = Some(data);
    Ok(artifact)
}

pub fn null_sim(provenance: Provenance, dims: &Dims, reps: u64, seeding: &Seeding) -> Result<Artifact, CliError> {
    let Dims { r, s, n } = *dims;
    let study = null_case_study(r, s, n, reps, seeding.config())?;
    let studies = [study];
    let mut artifact = Artifact::new(provenance);
    artifact.tables = render::null_tables(&studies);
    artifact.data = Some(render::null_json(&studies));
    Ok(artifact)
}

pub fn perturb(
    provenance: Provenance,
    sizes: &[u64],
    steps: u64,
    reps: u64,
    seeding: &Seeding,
) -> Result<Artifact, CliError> {
    let study = perturbation_sweep(sizes, steps, reps, seeding.config())?;
    let mut artifact = Artifact::new(provenance);
    artifact.tables = vec![render::perturb_table(&study)];
    Ok(artifact)
}

fn seed_of(command: &Command) -> Option<u64> {
    match command {
        Command::Sample { seeding, .. } | Command::NullSim { seeding, .. } | Command::Perturb { seeding, .. } => {
            Some(seeding.seed)
        }
        Command::Reproduce { seed, .. } => Some(*seed),
        _ => None,
    }
}

/// Runs a parsed command line, writing its output.
pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let config = serde_json::to_value(cli)?;
    let provenance = Provenance::new(cli.command.name(), seed_of(&cli.command), config);
    let work = || -> Result<Vec<String>, CliError> {
        let artifact = match &cli.command {
            Command::Compare { matrix, labels, delimiter } => {
                compare(provenance, matrix.as_deref(), labels.as_deref(), *delimiter)?
            }
            Command::Extremes { dims, verify, max_enum } => extremes(provenance, dims, *verify, *max_enum)?,
            Command::Enumerate { dims, max_enum } => enumerate(provenance, dims, *max_enum)?,
            Command::Sample { dims, samples, seeding, min_count } => {
                sample(provenance, dims, *samples, seeding, *min_count)?
            }
            Command::NullSim { dims, reps, seeding } => null_sim(provenance, dims, *reps, seeding)?,
            Command::Perturb { sizes, steps, reps, seeding } => perturb(provenance, sizes, *steps, *reps, seeding)?,
            Command::Reproduce { target, reps, samples, seed, min_count, max_enum, expectations } => {
                let options = crate::reproduce::Options {
                    reps: *reps,
                    samples: *samples,
                    seed: *seed,
                    min_count: *min_count,
                    max_enum: *max_enum,
                    expectations: expectations.clone(),
                };
                let dir = cli.global.out.clone().unwrap_or_else(|| PathBuf::from("."));
                return run_reproduce(*target, &options, provenance, &dir, cli.global.format);
            }
        };
        write_output(cli.global.out.as_deref(), &artifact.render(cli.global.format)?)?;
        Ok(artifact.warnings)
    };
    match cli.global.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(work),
        None => work(),
    }
}
