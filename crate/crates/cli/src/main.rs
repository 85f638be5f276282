//! Command-line front end: witness tables, exact and sampled evaluation,
//! measurement-setting listings, and the separability oracle.
//!
//! Exit codes: 0 success, 2 invalid input, 3 size-cap exceeded, 4 internal
//! consistency failure (independent computation routes disagreeing).

mod ids;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ids::StateSpec;
use report::{
    DetectionSection, EvalReport, OracleReport, OutcomeCount, PartitionRow, RecordRow, Report,
    SampleReport, SettingRow, SettingsReport, Table1Report, Table1Row, TermRow, SCHEMA,
};
use witnesslab_core::witness::ratio_to_f64;
use witnesslab_core::{
    oracle, GraphSpec, StabilizerSet, SystemSpec, Witness, WitnessDecomposition, WitnessKind,
};

#[derive(Parser)]
#[command(
    name = "witnesslab",
    version,
    about = "Stabilizer witnesses for hyperentangled and graph states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Trace and noise-threshold table over a range of system sizes.
    ///
    /// Each DOF count n yields two rows of qubit count N: the (2n−1)-vertex
    /// path graph and the n-DOF hyperentangled system (N = 2n).
    Table1 {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Exact witness expectation on a chosen state, optionally with white
    /// noise and the per-DOF detection breakdown.
    Eval {
        /// Witness id: wtilde, w1, w2, w3, wj:<j>, wjalt:<j>, qudit.
        #[arg(long)]
        witness: String,
        /// DOF count of the hyperentangled target (shortcut for --state he:n=<n>).
        #[arg(long)]
        n: Option<usize>,
        /// Graph id (path<N>, star<N>, ring<N>, or an edge list 0-1,1-2).
        #[arg(long)]
        graph: Option<String>,
        /// State id: he:n=<n>, psi1, psi2, rhoprime, graph:<graph id>.
        #[arg(long)]
        state: Option<String>,
        /// White-noise weight mixed into the state.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Include the per-DOF detection breakdown.
        #[arg(long)]
        detect: bool,
    },
    /// List the local measurement settings a witness decomposes into.
    Settings {
        #[arg(long)]
        witness: String,
        /// DOF count of the hyperentangled system.
        #[arg(long)]
        n: usize,
    },
    /// Simulate finite-shot measurement of a witness and estimate its value.
    Sample {
        #[arg(long)]
        witness: String,
        /// DOF count of the hyperentangled system the witness lives in.
        #[arg(long)]
        n: usize,
        /// State to measure; defaults to the system's target state.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Shots per measurement setting.
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include per-setting outcome counts in the report.
        #[arg(long)]
        records: bool,
    },
    /// Product-overlap bound check: SVD over every particle-splitting cut,
    /// plus a stochastic search and the qudit particle-cut comparison.
    Oracle {
        /// DOF count.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        restarts: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

enum CliError {
    Core(witnesslab_core::Error),
    Usage(String),
    Io(std::io::Error),
    Json(serde_json::Error),
    Csv(csv::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "cannot serialize report: {e}"),
            CliError::Csv(e) => write!(f, "cannot serialize report: {e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_capacity() => 3,
            CliError::Core(witnesslab_core::Error::ConsistencyFailure(_)) => 4,
            CliError::Core(_) | CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Json(_) | CliError::Csv(_) => 4,
        }
    }
}

impl From<witnesslab_core::Error> for CliError {
    fn from(e: witnesslab_core::Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let report = match &cli.command {
        Command::Table1 { n_min, n_max } => cmd_table1(*n_min, *n_max)?,
        Command::Eval {
            witness,
            n,
            graph,
            state,
            noise,
            detect,
        } => cmd_eval(witness, *n, graph.as_deref(), state.as_deref(), *noise, *detect)?,
        Command::Settings { witness, n } => cmd_settings(witness, *n)?,
        Command::Sample {
            witness,
            n,
            state,
            noise,
            shots,
            seed,
            records,
        } => cmd_sample(witness, *n, state.as_deref(), *noise, *shots, *seed, *records)?,
        Command::Oracle { n, restarts, seed } => cmd_oracle(*n, *restarts, *seed)?,
    };
    emit(&report, cli.format, cli.out.as_deref())
}

fn emit(report: &Report, format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let body = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json().map_err(CliError::Json)?,
        Format::Csv => report.to_csv().map_err(CliError::Csv)?,
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn system_id(stabs: &StabilizerSet) -> String {
    match stabs.system() {
        SystemSpec::HyperEntangled { layout } => format!("he:n={}", layout.n_dofs()),
        SystemSpec::Graph { graph } => format!("graph:{graph}"),
    }
}

fn cmd_table1(n_min: usize, n_max: usize) -> Result<Report, CliError> {
    if n_min < 1 || n_max < n_min || n_max > 15 {
        return Err(CliError::Usage(format!(
            "DOF range must satisfy 1 <= n-min <= n-max <= 15, got {n_min}..{n_max}"
        )));
    }
    let kinds = [
        WitnessKind::W1,
        WitnessKind::W2,
        WitnessKind::W3,
        WitnessKind::Tilde,
    ];
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let mut systems = Vec::new();
        if 2 * n - 1 >= 2 {
            systems.push((
                format!("graph:path{}", 2 * n - 1),
                StabilizerSet::for_graph(GraphSpec::path(2 * n - 1)?)?,
            ));
        }
        systems.push((format!("he:n={n}"), StabilizerSet::for_he(n)?));
        for (system, stabs) in systems {
            let n_qubits = stabs.n_qubits();
            for kind in kinds {
                let w = Witness::new(kind, stabs.clone())?;
                let trace = w.trace();
                let pm = w.noise_threshold();
                let variant = w.noise_threshold_variant();
                rows.push(Table1Row {
                    n_qubits,
                    system: system.clone(),
                    witness: ids::witness_id(kind),
                    dimension: 1u64 << n_qubits,
                    trace: trace.to_string(),
                    trace_value: ratio_to_f64(trace),
                    noise_threshold: pm.to_string(),
                    noise_threshold_value: ratio_to_f64(pm),
                    variant_threshold: variant.map(|v| v.to_string()),
                    variant_threshold_value: variant.map(ratio_to_f64),
                    flagged: variant.map(|v| v != pm).unwrap_or(false),
                });
            }
        }
    }
    Ok(Report::Table1(Table1Report {
        schema: SCHEMA.to_string(),
        command: "table1".to_string(),
        rows,
    }))
}

fn resolve_state(
    n: Option<usize>,
    graph: Option<&str>,
    state: Option<&str>,
) -> Result<StateSpec, CliError> {
    let given = [n.is_some(), graph.is_some(), state.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one of --n, --graph, --state".to_string(),
        ));
    }
    Ok(if let Some(id) = state {
        StateSpec::parse(id)?
    } else if let Some(g) = graph {
        StateSpec::Graph(ids::parse_graph(g)?)
    } else {
        StateSpec::He {
            n_dofs: n.expect("one source is set"),
        }
    })
}

fn cmd_eval(
    witness: &str,
    n: Option<usize>,
    graph: Option<&str>,
    state: Option<&str>,
    noise: f64,
    detect: bool,
) -> Result<Report, CliError> {
    let kind = ids::parse_witness(witness)?;
    let spec = resolve_state(n, graph, state)?;
    let system = spec.system()?;
    let w = Witness::new(kind, system.clone())?;
    let st = spec.build(&system)?;
    let value = w.expectation_noisy(&st, noise)?;
    let detection = if detect {
        let det = witnesslab_core::detect(&system, kind, &st, noise)?;
        Some(DetectionSection {
            per_dof_values: det.per_dof_values,
            all_dofs_entangled: det.all_dofs_entangled,
            detected: det.detected,
        })
    } else {
        None
    };
    let pm = w.noise_threshold();
    Ok(Report::Eval(EvalReport {
        schema: SCHEMA.to_string(),
        command: "eval".to_string(),
        witness: ids::witness_id(kind),
        system: system_id(&system),
        state: spec.id(),
        noise,
        value,
        trace: w.trace().to_string(),
        trace_value: ratio_to_f64(w.trace()),
        noise_threshold: pm.to_string(),
        noise_threshold_value: ratio_to_f64(pm),
        detection,
    }))
}

fn cmd_settings(witness: &str, n: usize) -> Result<Report, CliError> {
    let kind = ids::parse_witness(witness)?;
    let stabs = StabilizerSet::for_he(n)?;
    let w = Witness::new(kind, stabs.clone())?;
    let decomposition = WitnessDecomposition::decompose(&w)?;
    let settings = decomposition
        .groups
        .iter()
        .enumerate()
        .map(|(index, group)| {
            let terms = group
                .terms
                .iter()
                .map(|t| {
                    Ok(TermRow {
                        subset: t.subset,
                        pauli: stabs.subset_product(t.subset)?.to_string(),
                        coefficient: t.coefficient.to_string(),
                        coefficient_value: ratio_to_f64(t.coefficient),
                    })
                })
                .collect::<Result<Vec<_>, witnesslab_core::Error>>()?;
            Ok(SettingRow {
                index,
                bases: group.setting.to_string(),
                term_count: group.terms.len(),
                terms,
            })
        })
        .collect::<Result<Vec<_>, witnesslab_core::Error>>()?;
    Ok(Report::Settings(SettingsReport {
        schema: SCHEMA.to_string(),
        command: "settings".to_string(),
        witness: ids::witness_id(kind),
        n_dofs: n,
        n_qubits: stabs.n_qubits(),
        constant: decomposition.constant.to_string(),
        constant_value: ratio_to_f64(decomposition.constant),
        n_settings: decomposition.n_settings(),
        xz_merged_setting_count: decomposition.xz_merged_setting_count,
        settings,
    }))
}

fn cmd_sample(
    witness: &str,
    n: usize,
    state: Option<&str>,
    noise: f64,
    shots: u64,
    seed: u64,
    records: bool,
) -> Result<Report, CliError> {
    let kind = ids::parse_witness(witness)?;
    let stabs = StabilizerSet::for_he(n)?;
    let w = Witness::new(kind, stabs.clone())?;
    let decomposition = WitnessDecomposition::decompose(&w)?;
    let spec = match state {
        Some(id) => StateSpec::parse(id)?,
        None => StateSpec::He { n_dofs: n },
    };
    let st = spec.build(&stabs)?;
    let outcomes = decomposition.sample(&st, noise, shots, seed)?;
    let estimate = decomposition.estimate(&outcomes)?;
    let exact = w.expectation_noisy(&st, noise)?;
    // Two independent exact routes must agree before the sampled number is
    // worth reporting.
    let replayed = decomposition.estimate_exact(&st, noise)?;
    if (replayed - exact).abs() > 1e-9 {
        return Err(witnesslab_core::Error::ConsistencyFailure(format!(
            "estimator on exact probabilities gives {replayed}, expectation gives {exact}"
        ))
        .into());
    }
    let record_rows = records.then(|| {
        outcomes
            .iter()
            .map(|o| RecordRow {
                setting: o.setting.to_string(),
                counts: o
                    .counts
                    .iter()
                    .map(|(&outcome, &count)| OutcomeCount { outcome, count })
                    .collect(),
            })
            .collect()
    });
    Ok(Report::Sample(SampleReport {
        schema: SCHEMA.to_string(),
        command: "sample".to_string(),
        witness: ids::witness_id(kind),
        state: spec.id(),
        noise,
        shots_per_setting: shots,
        seed,
        n_settings: estimate.n_settings,
        total_shots: estimate.total_shots,
        estimate: estimate.value,
        std_error: estimate.std_error,
        exact,
        deviation: estimate.value - exact,
        records: record_rows,
    }))
}

fn cmd_oracle(n: usize, restarts: u64, seed: u64) -> Result<Report, CliError> {
    let scan = oracle::scan_separability_bound(n)?;
    let layout = witnesslab_core::DofLayout::new(n)?;
    let state = witnesslab_core::build_he_state(&layout)?;
    let partitions = scan
        .reports
        .iter()
        .map(|r| {
            let found = oracle::search_product_overlap(
                &state,
                r.partition.left_mask,
                restarts,
                seed ^ r.partition.left_mask,
            )?;
            Ok(PartitionRow {
                j: r.partition.j,
                label: r.partition.label(&layout)?,
                split_pairs: r.split_pairs,
                svd_overlap: r.overlap_sq,
                predicted: r.predicted,
                search_overlap: found.best,
            })
        })
        .collect::<Result<Vec<_>, witnesslab_core::Error>>()?;
    Ok(Report::Oracle(OracleReport {
        schema: SCHEMA.to_string(),
        command: "oracle".to_string(),
        n_dofs: n,
        restarts,
        seed,
        bound: scan.bound,
        family_max: scan.family_max,
        qudit_cut_overlap: oracle::qudit_particle_overlap_sq(n)?,
        partitions,
    }))
}
