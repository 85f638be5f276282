//! Local measurement settings, witness decomposition into settings, Born
//! sampling, and the counts-based estimator.
//!
//! A setting fixes one basis (X, Y, or Z) per qubit; measuring it yields a
//! bit-string outcome o where bit q = 0 means the +1 eigenvalue on qubit q.
//! Every stabilizer-subset product whose letters match the setting on its
//! support is then estimated by the outcome parity on that support, up to
//! the sign of its letter form (the paired-slot products are -Y⊗Y).
//!
//! Decomposition works on the two-particle DOF layout, where both qubits of
//! one DOF always share a basis. The two-setting witnesses use {all-X,
//! all-Z}; the compromise witness uses the 2ⁿ patterns {X,Z}ⁿ; the projector
//! witnesses need the full 3ⁿ patterns {X,Y,Z}ⁿ because their expansions
//! contain the paired-slot products. For those, the number of X/Z-only
//! patterns that cover the Y-free part of the expansion (2ⁿ) is reported
//! alongside as `xz_merged_setting_count`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;
// Float supplies the f64 math in no_std builds; std test builds shadow it.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::state::{DensityOperator, QuantumState, StateVector};
use crate::stabilizer::SystemSpec;
use crate::witness::{ratio_to_f64, Rational, Witness, WitnessKind};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    /// Rotation mapping this basis' +1 eigenvector to |0⟩ (applied to kets
    /// before a computational-basis readout). H for X, H·S† for Y.
    fn rotation(self) -> Option<[Complex64; 4]> {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            Basis::Z => None,
            Basis::X => Some([
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ]),
            Basis::Y => Some([
                Complex64::new(s, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
            ]),
        }
    }
}

/// One basis per qubit, measured simultaneously.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeasurementSetting {
    bases: Vec<Basis>,
}

impl MeasurementSetting {
    pub fn new(bases: Vec<Basis>) -> MeasurementSetting {
        MeasurementSetting { bases }
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn n_qubits(&self) -> usize {
        self.bases.len()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

/// One expansion term routed to a setting: coefficient × sign × parity of
/// the outcome bits on `support`.
#[derive(Clone, PartialEq, Debug)]
pub struct EstimatorTerm {
    pub coefficient: Rational,
    pub sign: i8,
    pub support: u64,
    pub subset: u64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct SettingGroup {
    pub setting: MeasurementSetting,
    pub terms: Vec<EstimatorTerm>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct WitnessDecomposition {
    pub constant: Rational,
    pub groups: Vec<SettingGroup>,
    /// For the projector witnesses: how many X/Z-only patterns cover the
    /// Y-free part of the expansion after merging (2ⁿ).
    pub xz_merged_setting_count: Option<u64>,
    n_qubits: usize,
}

/// Counts from measuring one setting.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SettingOutcome {
    pub setting: MeasurementSetting,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Estimate {
    pub value: f64,
    /// Propagated standard error: √(Σ per-setting variance of the mean).
    pub std_error: f64,
    pub total_shots: u64,
    pub n_settings: usize,
}

/// How each DOF of one expansion term meets a setting.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    I,
    X,
    Z,
    Y,
}

fn term_slots(subset: u64, n_dofs: usize) -> Vec<Slot> {
    (0..n_dofs)
        .map(|j| match (subset >> (2 * j) & 1, subset >> (2 * j + 1) & 1) {
            (0, 0) => Slot::I,
            (1, 0) => Slot::X,
            (0, 1) => Slot::Z,
            _ => Slot::Y,
        })
        .collect()
}

impl WitnessDecomposition {
    /// Split a witness into simultaneously measurable groups. Defined on the
    /// two-particle DOF layout only.
    pub fn decompose(witness: &Witness) -> Result<WitnessDecomposition> {
        let SystemSpec::HyperEntangled { layout } = witness.stabilizers().system() else {
            return Err(Error::KindSystemMismatch(String::from(
                "measurement decomposition is defined for the two-particle DOF layout",
            )));
        };
        let n_dofs = layout.n_dofs();
        let nq = layout.n_qubits();
        let expansion = witness.expansion()?;

        // Per-DOF digit alphabet for the setting family of this kind.
        let alphabet: &[Basis] = match witness.kind() {
            WitnessKind::W1 | WitnessKind::W2 | WitnessKind::PerDof { .. } => &[Basis::X, Basis::Z],
            WitnessKind::PerDofAlt { .. } => &[Basis::X, Basis::Z, Basis::Y],
            WitnessKind::W3 => &[Basis::X, Basis::Z],
            WitnessKind::Tilde | WitnessKind::QuditProjector => {
                &[Basis::X, Basis::Y, Basis::Z]
            }
        };
        let two_setting = matches!(
            witness.kind(),
            WitnessKind::W1 | WitnessKind::W2 | WitnessKind::PerDof { .. } | WitnessKind::PerDofAlt { .. }
        );

        let mut groups: Vec<SettingGroup> = if two_setting {
            // All-X, all-Z, and (for the Bell-projector variant) one pattern
            // with Y on the addressed DOF.
            let mut list = vec![
                SettingGroup {
                    setting: uniform_setting(nq, Basis::X),
                    terms: Vec::new(),
                },
                SettingGroup {
                    setting: uniform_setting(nq, Basis::Z),
                    terms: Vec::new(),
                },
            ];
            if let WitnessKind::PerDofAlt { j } = witness.kind() {
                let mut bases = vec![Basis::X; nq];
                bases[2 * j - 2] = Basis::Y;
                bases[2 * j - 1] = Basis::Y;
                list.push(SettingGroup {
                    setting: MeasurementSetting::new(bases),
                    terms: Vec::new(),
                });
            }
            list
        } else {
            // Every pattern over the alphabet, one basis per DOF, DOF 1 as
            // the least significant digit.
            let count = alphabet.len().pow(n_dofs as u32);
            (0..count)
                .map(|mut code| {
                    let mut bases = Vec::with_capacity(nq);
                    for _ in 0..n_dofs {
                        let b = alphabet[code % alphabet.len()];
                        code /= alphabet.len();
                        bases.push(b);
                        bases.push(b);
                    }
                    SettingGroup {
                        setting: MeasurementSetting::new(bases),
                        terms: Vec::new(),
                    }
                })
                .collect()
        };

        for term in &expansion.terms {
            let slots = term_slots(term.subset, n_dofs);
            let sign = term.pauli.letter_sign().ok_or_else(|| {
                Error::ConsistencyFailure(String::from(
                    "expansion term is not a real-signed Pauli product",
                ))
            })?;
            let group_index = if two_setting {
                match slots
                    .iter()
                    .find(|s| !matches!(s, Slot::I))
                    .expect("expansion terms are non-identity")
                {
                    Slot::X => 0,
                    Slot::Z => 1,
                    Slot::Y => 2,
                    Slot::I => unreachable!(),
                }
            } else {
                // Digit per DOF; identity slots fall back to the first letter.
                let mut idx = 0usize;
                for slot in slots.iter().rev() {
                    let digit = match slot {
                        Slot::I | Slot::X => 0,
                        Slot::Z => alphabet
                            .iter()
                            .position(|&b| b == Basis::Z)
                            .expect("alphabet holds Z"),
                        Slot::Y => alphabet
                            .iter()
                            .position(|&b| b == Basis::Y)
                            .expect("paired slot needs Y in the alphabet"),
                    };
                    idx = idx * alphabet.len() + digit;
                }
                idx
            };
            groups[group_index].terms.push(EstimatorTerm {
                coefficient: term.coefficient,
                sign,
                support: term.pauli.support(),
                subset: term.subset,
            });
        }

        let xz_merged_setting_count = match witness.kind() {
            WitnessKind::Tilde | WitnessKind::QuditProjector => Some(1u64 << n_dofs),
            _ => None,
        };
        Ok(WitnessDecomposition {
            constant: expansion.constant,
            groups,
            xz_merged_setting_count,
            n_qubits: nq,
        })
    }

    pub fn n_settings(&self) -> usize {
        self.groups.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Outcome distribution of one setting on (1−p)·state + p·1/D.
    pub fn outcome_probabilities(
        &self,
        state: &QuantumState,
        noise: f64,
        setting_index: usize,
    ) -> Result<Vec<f64>> {
        let group = self.groups.get(setting_index).ok_or_else(|| {
            Error::MissingSetting(alloc::format!("setting index {setting_index}"))
        })?;
        outcome_probabilities(state, &group.setting, noise)
    }

    /// Draw multinomial counts for every setting.
    pub fn sample(
        &self,
        state: &QuantumState,
        noise: f64,
        shots: u64,
        seed: u64,
    ) -> Result<Vec<SettingOutcome>> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: state.n_qubits(),
                right: self.n_qubits,
            });
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        self.groups
            .iter()
            .map(|group| {
                let probs = outcome_probabilities(state, &group.setting, noise)?;
                let counts = sample_multinomial(&probs, shots, &mut rng)?;
                Ok(SettingOutcome {
                    setting: group.setting.clone(),
                    shots,
                    counts,
                })
            })
            .collect()
    }

    /// Witness estimate from counts, with propagated standard error.
    pub fn estimate(&self, outcomes: &[SettingOutcome]) -> Result<Estimate> {
        if outcomes.len() != self.groups.len() {
            return Err(Error::MissingSetting(alloc::format!(
                "expected {} settings, got {}",
                self.groups.len(),
                outcomes.len()
            )));
        }
        let mut value = ratio_to_f64(self.constant);
        let mut variance = 0.0f64;
        let mut total_shots = 0u64;
        for (group, outcome) in self.groups.iter().zip(outcomes.iter()) {
            if outcome.setting != group.setting {
                return Err(Error::MissingSetting(alloc::format!(
                    "outcome for setting {} does not match expected {}",
                    outcome.setting,
                    group.setting
                )));
            }
            if outcome.shots == 0 {
                return Err(Error::ZeroShots);
            }
            total_shots += outcome.shots;
            let shots = outcome.shots as f64;
            let mut m1 = 0.0f64;
            let mut m2 = 0.0f64;
            for (&o, &count) in &outcome.counts {
                let g = group_value(group, o);
                let w = count as f64 / shots;
                m1 += w * g;
                m2 += w * g * g;
            }
            value += m1;
            variance += (m2 - m1 * m1).max(0.0) / shots;
        }
        Ok(Estimate {
            value,
            std_error: variance.sqrt(),
            total_shots,
            n_settings: self.groups.len(),
        })
    }

    /// The estimator evaluated on exact outcome probabilities instead of
    /// counts; reproduces the exact expectation value.
    pub fn estimate_exact(&self, state: &QuantumState, noise: f64) -> Result<f64> {
        let mut value = ratio_to_f64(self.constant);
        for (idx, group) in self.groups.iter().enumerate() {
            let probs = self.outcome_probabilities(state, noise, idx)?;
            for (o, &p) in probs.iter().enumerate() {
                if p != 0.0 {
                    value += p * group_value(group, o as u64);
                }
            }
        }
        Ok(value)
    }
}

fn uniform_setting(n_qubits: usize, basis: Basis) -> MeasurementSetting {
    MeasurementSetting::new(vec![basis; n_qubits])
}

/// Σ over the group's terms of coeff·sign·(−1)^{|o ∧ support|}.
fn group_value(group: &SettingGroup, outcome: u64) -> f64 {
    let mut acc = 0.0f64;
    for term in &group.terms {
        let parity = if (outcome & term.support).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        acc += ratio_to_f64(term.coefficient) * term.sign as f64 * parity;
    }
    acc
}

/// Born probabilities of a setting on (1−p)·state + p·1/D.
pub fn outcome_probabilities(
    state: &QuantumState,
    setting: &MeasurementSetting,
    noise: f64,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&noise) || !noise.is_finite() {
        return Err(Error::InvalidProbability(noise));
    }
    if state.n_qubits() != setting.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: state.n_qubits(),
            right: setting.n_qubits(),
        });
    }
    let mut probs = match state {
        QuantumState::Pure(psi) => {
            let mut rotated: Option<StateVector> = None;
            for (q, b) in setting.bases().iter().enumerate() {
                if let Some(m) = b.rotation() {
                    let src = rotated.as_ref().unwrap_or(psi);
                    rotated = Some(src.apply_single_qubit(q, &m)?);
                }
            }
            rotated.as_ref().unwrap_or(psi).probabilities()
        }
        QuantumState::Mixed(rho) => {
            let mut rotated: Option<DensityOperator> = None;
            for (q, b) in setting.bases().iter().enumerate() {
                if let Some(m) = b.rotation() {
                    let src = rotated.as_ref().unwrap_or(rho);
                    rotated = Some(src.conjugate_single_qubit(q, &m)?);
                }
            }
            let r = rotated.as_ref().unwrap_or(rho);
            let dim = r.dim();
            (0..dim).map(|i| r.matrix()[i * dim + i].re.max(0.0)).collect()
        }
    };
    if noise > 0.0 {
        let iso = noise / probs.len() as f64;
        for p in probs.iter_mut() {
            *p = (1.0 - noise) * *p + iso;
        }
    }
    Ok(probs)
}

/// Exact multinomial draw via conditional binomials; outcomes with zero
/// probability never appear.
pub fn sample_multinomial(
    probs: &[f64],
    shots: u64,
    rng: &mut ChaCha20Rng,
) -> Result<BTreeMap<u64, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut counts = BTreeMap::new();
    let mut remaining = shots;
    let mut rest_mass: f64 = probs.iter().sum();
    for (o, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let ratio = (p / rest_mass).clamp(0.0, 1.0);
        let draw = if ratio >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, ratio)
                .map_err(|_| Error::InvalidProbability(ratio))?
                .sample(rng)
        };
        if draw > 0 {
            counts.insert(o as u64, draw);
            remaining -= draw;
        }
        rest_mass -= p;
        if rest_mass <= 0.0 {
            break;
        }
    }
    if remaining > 0 {
        // Numerical leftovers go to the most likely outcome.
        let best = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(o, _)| o as u64)
            .unwrap_or(0);
        *counts.entry(best).or_insert(0) += remaining;
    }
    Ok(counts)
}
