//! Textual identifiers for witnesses, systems, and states, shared by flag
//! parsing and report output.

use std::str::FromStr;

use witnesslab_core::state::{example_psi1, example_psi2, example_rho_prime};
use witnesslab_core::{Error, GraphSpec, QuantumState, Result, StabilizerSet, WitnessKind};

/// Witness ids: `wtilde`, `w1`, `w2`, `w3`, `wj:<j>`, `wjalt:<j>`, `qudit`.
pub fn parse_witness(input: &str) -> Result<WitnessKind> {
    let err = || Error::Parse {
        what: "witness id",
        input: input.to_string(),
    };
    let lower = input.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("wjalt:") {
        return Ok(WitnessKind::PerDofAlt {
            j: rest.parse().map_err(|_| err())?,
        });
    }
    if let Some(rest) = lower.strip_prefix("wj:") {
        return Ok(WitnessKind::PerDof {
            j: rest.parse().map_err(|_| err())?,
        });
    }
    match lower.as_str() {
        "wtilde" => Ok(WitnessKind::Tilde),
        "w1" => Ok(WitnessKind::W1),
        "w2" => Ok(WitnessKind::W2),
        "w3" => Ok(WitnessKind::W3),
        "qudit" => Ok(WitnessKind::QuditProjector),
        _ => Err(err()),
    }
}

pub fn witness_id(kind: WitnessKind) -> String {
    match kind {
        WitnessKind::Tilde => "wtilde".to_string(),
        WitnessKind::W1 => "w1".to_string(),
        WitnessKind::W2 => "w2".to_string(),
        WitnessKind::W3 => "w3".to_string(),
        WitnessKind::PerDof { j } => format!("wj:{j}"),
        WitnessKind::PerDofAlt { j } => format!("wjalt:{j}"),
        WitnessKind::QuditProjector => "qudit".to_string(),
    }
}

/// Graph ids: `path<N>`, `star<N>`, `ring<N>`, or an explicit edge list in
/// the `0-1,1-2` form.
pub fn parse_graph(input: &str) -> Result<GraphSpec> {
    let lower = input.to_ascii_lowercase();
    for (prefix, build) in [
        ("path", GraphSpec::path as fn(usize) -> Result<GraphSpec>),
        ("star", GraphSpec::star),
        ("ring", GraphSpec::ring),
    ] {
        if let Some(rest) = lower.strip_prefix(prefix) {
            if let Ok(n) = rest.parse::<usize>() {
                return build(n);
            }
        }
    }
    GraphSpec::from_str(input)
}

/// A named preparable state together with the stabilizer system it lives in.
#[derive(Clone, PartialEq, Debug)]
pub enum StateSpec {
    He { n_dofs: usize },
    Psi1,
    Psi2,
    RhoPrime,
    Graph(GraphSpec),
}

impl StateSpec {
    /// State ids: `he:n=<n>`, `psi1`, `psi2`, `rhoprime`, `graph:<graph id>`.
    pub fn parse(input: &str) -> Result<StateSpec> {
        let err = || Error::Parse {
            what: "state id",
            input: input.to_string(),
        };
        let lower = input.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("he:n=") {
            return Ok(StateSpec::He {
                n_dofs: rest.parse().map_err(|_| err())?,
            });
        }
        if let Some(rest) = input.strip_prefix("graph:") {
            return Ok(StateSpec::Graph(parse_graph(rest)?));
        }
        match lower.as_str() {
            "psi1" => Ok(StateSpec::Psi1),
            "psi2" => Ok(StateSpec::Psi2),
            "rhoprime" => Ok(StateSpec::RhoPrime),
            _ => Err(err()),
        }
    }

    pub fn id(&self) -> String {
        match self {
            StateSpec::He { n_dofs } => format!("he:n={n_dofs}"),
            StateSpec::Psi1 => "psi1".to_string(),
            StateSpec::Psi2 => "psi2".to_string(),
            StateSpec::RhoPrime => "rhoprime".to_string(),
            StateSpec::Graph(graph) => format!("graph:{graph}"),
        }
    }

    /// The stabilizer system this state is judged against. The 4-qubit
    /// example states live in the two-DOF system.
    pub fn system(&self) -> Result<StabilizerSet> {
        match self {
            StateSpec::He { n_dofs } => StabilizerSet::for_he(*n_dofs),
            StateSpec::Psi1 | StateSpec::Psi2 | StateSpec::RhoPrime => StabilizerSet::for_he(2),
            StateSpec::Graph(graph) => StabilizerSet::for_graph(graph.clone()),
        }
    }

    pub fn build(&self, system: &StabilizerSet) -> Result<QuantumState> {
        Ok(match self {
            StateSpec::He { .. } | StateSpec::Graph(_) => {
                QuantumState::Pure(system.base_state()?)
            }
            StateSpec::Psi1 => QuantumState::Pure(example_psi1()),
            StateSpec::Psi2 => QuantumState::Pure(example_psi2()),
            StateSpec::RhoPrime => QuantumState::Mixed(example_rho_prime()),
        })
    }
}
