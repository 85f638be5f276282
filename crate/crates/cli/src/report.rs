//! Typed reports for every subcommand, with text, JSON, and CSV renderers.
//!
//! JSON documents always carry `"schema": "witnesslab/1"` at the top level
//! and round-trip byte-for-byte through their typed structs. CSV output is
//! one flat table per command with a mandatory header row.

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "witnesslab/1";

fn fmt_f64(v: f64) -> String {
    format!("{v:.12}")
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct Table1Row {
    pub n_qubits: usize,
    pub system: String,
    pub witness: String,
    pub dimension: u64,
    pub trace: String,
    pub trace_value: f64,
    pub noise_threshold: String,
    pub noise_threshold_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant_threshold: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant_threshold_value: Option<f64>,
    pub flagged: bool,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct Table1Report {
    pub schema: String,
    pub command: String,
    pub rows: Vec<Table1Row>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct DetectionSection {
    pub per_dof_values: Vec<f64>,
    pub all_dofs_entangled: bool,
    pub detected: bool,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct EvalReport {
    pub schema: String,
    pub command: String,
    pub witness: String,
    pub system: String,
    pub state: String,
    pub noise: f64,
    pub value: f64,
    pub trace: String,
    pub trace_value: f64,
    pub noise_threshold: String,
    pub noise_threshold_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionSection>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct TermRow {
    pub subset: u64,
    pub pauli: String,
    pub coefficient: String,
    pub coefficient_value: f64,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct SettingRow {
    pub index: usize,
    pub bases: String,
    pub term_count: usize,
    pub terms: Vec<TermRow>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct SettingsReport {
    pub schema: String,
    pub command: String,
    pub witness: String,
    pub n_dofs: usize,
    pub n_qubits: usize,
    pub constant: String,
    pub constant_value: f64,
    pub n_settings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xz_merged_setting_count: Option<u64>,
    pub settings: Vec<SettingRow>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct OutcomeCount {
    pub outcome: u64,
    pub count: u64,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct RecordRow {
    pub setting: String,
    pub counts: Vec<OutcomeCount>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct SampleReport {
    pub schema: String,
    pub command: String,
    pub witness: String,
    pub state: String,
    pub noise: f64,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub n_settings: usize,
    pub total_shots: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub exact: f64,
    pub deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<RecordRow>>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct PartitionRow {
    pub j: usize,
    pub label: String,
    pub split_pairs: usize,
    pub svd_overlap: f64,
    pub predicted: f64,
    pub search_overlap: f64,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct OracleReport {
    pub schema: String,
    pub command: String,
    pub n_dofs: usize,
    pub restarts: u64,
    pub seed: u64,
    pub bound: f64,
    pub family_max: f64,
    pub qudit_cut_overlap: f64,
    pub partitions: Vec<PartitionRow>,
}

/// One report per subcommand; the enum is what main renders and writes.
#[derive(Clone, PartialEq, Debug)]
pub enum Report {
    Table1(Table1Report),
    Eval(EvalReport),
    Settings(SettingsReport),
    Sample(SampleReport),
    Oracle(OracleReport),
}

impl Report {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut body = match self {
            Report::Table1(r) => serde_json::to_string_pretty(r),
            Report::Eval(r) => serde_json::to_string_pretty(r),
            Report::Settings(r) => serde_json::to_string_pretty(r),
            Report::Sample(r) => serde_json::to_string_pretty(r),
            Report::Oracle(r) => serde_json::to_string_pretty(r),
        }?;
        body.push('\n');
        Ok(body)
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Report::Table1(r) => {
                w.write_record([
                    "n_qubits",
                    "system",
                    "witness",
                    "dimension",
                    "trace",
                    "trace_value",
                    "noise_threshold",
                    "noise_threshold_value",
                    "variant_threshold",
                    "variant_threshold_value",
                    "flagged",
                ])?;
                for row in &r.rows {
                    w.write_record([
                        row.n_qubits.to_string(),
                        row.system.clone(),
                        row.witness.clone(),
                        row.dimension.to_string(),
                        row.trace.clone(),
                        fmt_f64(row.trace_value),
                        row.noise_threshold.clone(),
                        fmt_f64(row.noise_threshold_value),
                        row.variant_threshold.clone().unwrap_or_default(),
                        row.variant_threshold_value.map(fmt_f64).unwrap_or_default(),
                        row.flagged.to_string(),
                    ])?;
                }
            }
            Report::Eval(r) => {
                w.write_record([
                    "witness",
                    "system",
                    "state",
                    "noise",
                    "value",
                    "trace",
                    "trace_value",
                    "noise_threshold",
                    "noise_threshold_value",
                    "detected",
                ])?;
                w.write_record([
                    r.witness.clone(),
                    r.system.clone(),
                    r.state.clone(),
                    fmt_f64(r.noise),
                    fmt_f64(r.value),
                    r.trace.clone(),
                    fmt_f64(r.trace_value),
                    r.noise_threshold.clone(),
                    fmt_f64(r.noise_threshold_value),
                    r.detection
                        .as_ref()
                        .map(|d| d.detected.to_string())
                        .unwrap_or_default(),
                ])?;
            }
            Report::Settings(r) => {
                w.write_record(["witness", "n_dofs", "index", "bases", "term_count"])?;
                for s in &r.settings {
                    w.write_record([
                        r.witness.clone(),
                        r.n_dofs.to_string(),
                        s.index.to_string(),
                        s.bases.clone(),
                        s.term_count.to_string(),
                    ])?;
                }
            }
            Report::Sample(r) => {
                w.write_record([
                    "witness",
                    "state",
                    "noise",
                    "shots_per_setting",
                    "seed",
                    "n_settings",
                    "total_shots",
                    "estimate",
                    "std_error",
                    "exact",
                    "deviation",
                ])?;
                w.write_record([
                    r.witness.clone(),
                    r.state.clone(),
                    fmt_f64(r.noise),
                    r.shots_per_setting.to_string(),
                    r.seed.to_string(),
                    r.n_settings.to_string(),
                    r.total_shots.to_string(),
                    fmt_f64(r.estimate),
                    fmt_f64(r.std_error),
                    fmt_f64(r.exact),
                    fmt_f64(r.deviation),
                ])?;
            }
            Report::Oracle(r) => {
                w.write_record([
                    "n_dofs",
                    "j",
                    "label",
                    "split_pairs",
                    "svd_overlap",
                    "predicted",
                    "search_overlap",
                ])?;
                for p in &r.partitions {
                    w.write_record([
                        r.n_dofs.to_string(),
                        p.j.to_string(),
                        p.label.clone(),
                        p.split_pairs.to_string(),
                        fmt_f64(p.svd_overlap),
                        fmt_f64(p.predicted),
                        fmt_f64(p.search_overlap),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().expect("csv writer over Vec cannot fail");
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Table1(r) => {
                out.push_str(&format!(
                    "{:<4} {:<14} {:<8} {:>6} {:>14} {:>12} {:>16} {:>10}  note\n",
                    "N", "system", "witness", "D", "trace", "trace~", "p_M", "p_M~"
                ));
                for row in &r.rows {
                    let note = match (&row.variant_threshold, row.flagged) {
                        (Some(v), true) => format!("variant {v} differs"),
                        (Some(v), false) => format!("variant {v}"),
                        (None, _) => String::new(),
                    };
                    out.push_str(&format!(
                        "{:<4} {:<14} {:<8} {:>6} {:>14} {:>12.4} {:>16} {:>10.4}  {}\n",
                        row.n_qubits,
                        row.system,
                        row.witness,
                        row.dimension,
                        row.trace,
                        row.trace_value,
                        row.noise_threshold,
                        row.noise_threshold_value,
                        note,
                    ));
                }
            }
            Report::Eval(r) => {
                out.push_str(&format!(
                    "witness {} on {} (system {}), noise {}\n",
                    r.witness, r.state, r.system, r.noise
                ));
                out.push_str(&format!("value            {:+.12}\n", r.value));
                out.push_str(&format!(
                    "trace            {} ({:.6})\n",
                    r.trace, r.trace_value
                ));
                out.push_str(&format!(
                    "noise threshold  {} ({:.6})\n",
                    r.noise_threshold, r.noise_threshold_value
                ));
                if let Some(d) = &r.detection {
                    let dofs = d
                        .per_dof_values
                        .iter()
                        .map(|v| format!("{v:+.6}"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.push_str(&format!("per-DOF values   {dofs}\n"));
                    out.push_str(&format!(
                        "detection        all DOFs entangled: {}, hyperentanglement detected: {}\n",
                        d.all_dofs_entangled, d.detected
                    ));
                }
            }
            Report::Settings(r) => {
                out.push_str(&format!(
                    "witness {} on he:n={}: {} settings, constant {} ({:.6})\n",
                    r.witness, r.n_dofs, r.n_settings, r.constant, r.constant_value
                ));
                if let Some(merged) = r.xz_merged_setting_count {
                    out.push_str(&format!(
                        "X/Z-merged cover of the Y-free terms: {merged} settings\n"
                    ));
                }
                for s in &r.settings {
                    out.push_str(&format!(
                        "  [{:>3}] {}  {} term{}\n",
                        s.index,
                        s.bases,
                        s.term_count,
                        if s.term_count == 1 { "" } else { "s" }
                    ));
                }
            }
            Report::Sample(r) => {
                out.push_str(&format!(
                    "witness {} on {}, noise {}, {} shots x {} settings (seed {})\n",
                    r.witness, r.state, r.noise, r.shots_per_setting, r.n_settings, r.seed
                ));
                out.push_str(&format!(
                    "estimate  {:+.6} ± {:.6}\n",
                    r.estimate, r.std_error
                ));
                out.push_str(&format!("exact     {:+.6}\n", r.exact));
                out.push_str(&format!("deviation {:+.6}\n", r.deviation));
                if let Some(records) = &r.records {
                    for rec in records {
                        let head: Vec<String> = rec
                            .counts
                            .iter()
                            .map(|c| format!("{:b}:{}", c.outcome, c.count))
                            .collect();
                        out.push_str(&format!("  {} {}\n", rec.setting, head.join(" ")));
                    }
                }
            }
            Report::Oracle(r) => {
                out.push_str(&format!(
                    "separability oracle, n={} ({} cuts, {} restarts, seed {})\n",
                    r.n_dofs,
                    r.partitions.len(),
                    r.restarts,
                    r.seed
                ));
                out.push_str(&format!(
                    "family max {:.9} (bound {}), particle-cut overlap {:.9}\n",
                    r.family_max, r.bound, r.qudit_cut_overlap
                ));
                for p in &r.partitions {
                    out.push_str(&format!(
                        "  {:<40} split={} svd={:.9} predicted={:.9} search={:.9}\n",
                        p.label, p.split_pairs, p.svd_overlap, p.predicted, p.search_overlap
                    ));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_byte_identical() {
        let report = Report::Eval(EvalReport {
            schema: SCHEMA.to_string(),
            command: "eval".to_string(),
            witness: "wtilde".to_string(),
            system: "he:n=2".to_string(),
            state: "rhoprime".to_string(),
            noise: 0.0,
            value: 0.0,
            trace: "14".to_string(),
            trace_value: 14.0,
            noise_threshold: "8/15".to_string(),
            noise_threshold_value: 8.0 / 15.0,
            detection: None,
        });
        let first = report.to_json().unwrap();
        let parsed: EvalReport = serde_json::from_str(&first).unwrap();
        let second = Report::Eval(parsed).to_json().unwrap();
        assert_eq!(first, second);
        assert!(first.contains("\"schema\": \"witnesslab/1\""));
    }

    #[test]
    fn csv_has_header_and_quotes() {
        let report = Report::Table1(Table1Report {
            schema: SCHEMA.to_string(),
            command: "table1".to_string(),
            rows: vec![Table1Row {
                n_qubits: 4,
                system: "he:n=2".to_string(),
                witness: "w3".to_string(),
                dimension: 16,
                trace: "80/3".to_string(),
                trace_value: 80.0 / 3.0,
                noise_threshold: "3/8".to_string(),
                noise_threshold_value: 0.375,
                variant_threshold: None,
                variant_threshold_value: None,
                flagged: false,
            }],
        });
        let csv = report.to_csv().unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("n_qubits,system,witness"));
        assert!(lines.next().unwrap().contains("80/3"));
    }
}
