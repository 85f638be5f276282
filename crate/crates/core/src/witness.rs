//! The witness operators, all diagonal in the stabilizer basis.
//!
//! With stabilizer generators S_1..S_N and |s⟩ the joint eigenbasis, every
//! witness here is a polynomial in the S_k and acts on |s⟩ by a closed-form
//! eigenvalue λ(s) that is an exact rational. Three independent routes to the
//! same operator are kept: the closed form λ(s), the expansion into products
//! of stabilizer subsets (which also drives measurement decomposition), and a
//! dense matrix; tests pin them against each other.
//!
//! The two projector-based witnesses (`Tilde`, `QuditProjector`) subtract a
//! scaled projector onto the base stabilizer state; the rest are short sums
//! of stabilizer products. Every witness except `QuditProjector` is
//! normalized so the base state gives expectation −1.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::stabilizer::{StabilizerSet, SystemSpec};
use crate::state::{QuantumState, MAX_DENSITY_QUBITS};

/// Exact scalar type used for eigenvalues, traces, and thresholds.
pub type Rational = Ratio<i128>;

/// Full syndrome scans (certificates, trace cross-checks) refuse to run past
/// this many generators.
pub const SYNDROME_SCAN_CAP: usize = 30;

/// Stabilizer-subset expansions refuse to emit more terms than this.
pub const EXPANSION_TERM_CAP: usize = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WitnessKind {
    /// 1 − 2|base⟩⟨base|: the projector witness; negative only inside the
    /// max-overlap-½ ball around the base state.
    Tilde,
    /// (N−1)·1 − Σ_k S_k: two local settings, weakest noise resistance.
    W1,
    /// 3·1 − 2(Π_{odd k}(S_k+1)/2 + Π_{even k}(S_k+1)/2): two settings.
    W2,
    /// 2·1 − 3Π_j (1+S_{2j−1}+S_{2j})/3, with a (1+S_N)/2 tail when the
    /// generator count is odd: the settings/noise compromise.
    W3,
    /// 1 − S_{2j−1} − S_{2j}: detects entanglement in DOF j alone.
    PerDof { j: usize },
    /// ½(1 − S_{2j−1} − S_{2j} − S_{2j−1}S_{2j}) = 1 − 2|φ+⟩⟨φ+| on DOF j;
    /// equivalent detector, but needs a Y-pair setting.
    PerDofAlt { j: usize },
    /// 1/2ⁿ − |base⟩⟨base|: the bipartite two-qudit witness the projector
    /// witness is compared against.
    QuditProjector,
}

impl WitnessKind {
    /// Kinds addressing degrees of freedom exist only on the two-particle
    /// hyperentangled system.
    pub fn requires_dof_structure(&self) -> bool {
        matches!(
            self,
            WitnessKind::PerDof { .. } | WitnessKind::PerDofAlt { .. } | WitnessKind::QuditProjector
        )
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Witness {
    kind: WitnessKind,
    stabilizers: StabilizerSet,
}

/// One term of the stabilizer-subset expansion: coefficient × Π_{k∈subset}S_k.
#[derive(Clone, PartialEq, Debug)]
pub struct ExpansionTerm {
    pub coefficient: Rational,
    /// Bit k−1 selects generator S_k.
    pub subset: u64,
    pub pauli: PauliString,
}

#[derive(Clone, PartialEq, Debug)]
pub struct WitnessExpansion {
    pub constant: Rational,
    pub terms: Vec<ExpansionTerm>,
    n_generators: usize,
}

impl WitnessExpansion {
    pub fn n_generators(&self) -> usize {
        self.n_generators
    }

    /// λ(s) recovered from the expansion: constant + Σ c_t (−1)^{|t∧s|}.
    pub fn eigenvalue_resummed(&self, syndrome: u64) -> Rational {
        let mut acc = self.constant;
        for term in &self.terms {
            let sign = if (term.subset & syndrome).count_ones() % 2 == 0 {
                1
            } else {
                -1
            };
            acc += term.coefficient * Rational::from_integer(sign);
        }
        acc
    }

    /// Dense row-major matrix Σ c_t P_t + constant·1.
    pub fn dense(&self, n_qubits: usize) -> Result<Vec<Complex64>> {
        if n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: n_qubits,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        let c0 = ratio_to_f64(self.constant);
        for i in 0..dim {
            mat[i * dim + i] = Complex64::new(c0, 0.0);
        }
        for term in &self.terms {
            let coeff = ratio_to_f64(term.coefficient);
            let x = term.pauli.x_mask() as usize;
            let phase = term.pauli.phase().as_complex() * coeff;
            for col in 0..dim {
                let sign = if (term.pauli.z_mask() & col as u64).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                mat[(col ^ x) * dim + col] += phase * sign;
            }
        }
        Ok(mat)
    }
}

/// Outcome of the α-positivity argument: W − α·W̃ must be positive
/// semidefinite for some α > 0. Diagonality makes this a syndrome scan:
/// α ≥ −λ(0) (from the base state) and α ≤ min_{s≠0} λ(s) (everywhere else).
#[derive(Clone, PartialEq, Debug)]
pub struct AlphaCertificate {
    pub lambda_zero: Rational,
    pub min_lambda_nonzero: Rational,
    /// Smallest admissible α, i.e. −λ(0).
    pub alpha_lower: Rational,
    /// Largest admissible α, i.e. min_{s≠0} λ(s).
    pub alpha_upper: Rational,
    /// The certificate's chosen α (the upper end) when valid.
    pub alpha: Rational,
    pub valid: bool,
}

/// Eigenvalue scan of [c₀·1 − (W₃ detection part)] − α·W̃.
#[derive(Clone, PartialEq, Debug)]
pub struct ShiftedScan {
    /// Eigenvalue on the base state (s = 0).
    pub lambda_projector: Rational,
    /// Minimum over syndromes with exactly one bit set.
    pub lambda_single_flip: Rational,
    /// Minimum over all nonzero syndromes.
    pub min_lambda_nonzero: Rational,
}

/// Values this close to zero (or above) do not count as negative during
/// detection, so exact zeros cannot flip sign on floating-point rounding.
pub const DETECTION_EPS: f64 = 1e-12;

/// Outcome of the two-stage detection scheme: every DOF must look entangled,
/// and the chosen witness must be negative (beyond [`DETECTION_EPS`]).
#[derive(Clone, PartialEq, Debug)]
pub struct DetectionReport {
    pub per_dof_values: Vec<f64>,
    pub all_dofs_entangled: bool,
    pub witness_value: f64,
    pub detected: bool,
}

impl Witness {
    pub fn new(kind: WitnessKind, stabilizers: StabilizerSet) -> Result<Witness> {
        match (&kind, stabilizers.system()) {
            (k, SystemSpec::Graph { .. }) if k.requires_dof_structure() => {
                return Err(Error::KindSystemMismatch(alloc::format!(
                    "{kind:?} needs the two-particle DOF layout, not a graph system"
                )));
            }
            _ => {}
        }
        if let WitnessKind::PerDof { j } | WitnessKind::PerDofAlt { j } = kind {
            let n_dofs = stabilizers.n_generators() / 2;
            if j == 0 || j > n_dofs {
                return Err(Error::DofIndexOutOfRange { j, n_dofs });
            }
        }
        Ok(Witness { kind, stabilizers })
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn stabilizers(&self) -> &StabilizerSet {
        &self.stabilizers
    }

    pub fn n_qubits(&self) -> usize {
        self.stabilizers.n_qubits()
    }

    pub fn n_generators(&self) -> usize {
        self.stabilizers.n_generators()
    }

    fn check_syndrome(&self, syndrome: u64) -> Result<()> {
        if syndrome >> self.n_generators() != 0 {
            return Err(Error::DofIndexOutOfRange {
                j: 64 - syndrome.leading_zeros() as usize,
                n_dofs: self.n_generators(),
            });
        }
        Ok(())
    }

    /// Exact eigenvalue on the stabilizer basis state |s⟩.
    pub fn eigenvalue(&self, syndrome: u64) -> Result<Rational> {
        self.check_syndrome(syndrome)?;
        let (num, den) = self.lambda_parts(syndrome);
        Ok(Rational::new(num, den))
    }

    /// λ(s) as numerator over a per-witness fixed denominator, for cheap
    /// exact accumulation across scans.
    fn lambda_parts(&self, s: u64) -> (i128, i128) {
        let n_gen = self.n_generators();
        let pm = |bit: u64| 1i128 - 2 * (bit as i128);
        match self.kind {
            WitnessKind::Tilde => (if s == 0 { -1 } else { 1 }, 1),
            WitnessKind::W1 => (2 * s.count_ones() as i128 - 1, 1),
            WitnessKind::W2 => {
                let (odd_mask, even_mask) = family_masks(n_gen);
                let clean =
                    (s & odd_mask == 0) as i128 + (s & even_mask == 0) as i128;
                (3 - 2 * clean, 1)
            }
            WitnessKind::W3 => {
                let n_slots = n_gen / 2;
                let pow3 = 3i128.pow(n_slots as u32);
                // Product over slots of (1 ± 1 ± 1), an integer in {-1,1,3}.
                let mut prod = 1i128;
                for slot in 0..n_slots {
                    prod *= 1 + pm(s >> (2 * slot) & 1) + pm(s >> (2 * slot + 1) & 1);
                }
                if n_gen % 2 == 0 {
                    (2 * pow3 - 3 * prod, pow3)
                } else {
                    let tail = 1 + pm(s >> (n_gen - 1) & 1); // 2 or 0
                    (4 * pow3 - 3 * prod * tail, 2 * pow3)
                }
            }
            WitnessKind::PerDof { j } => {
                (1 - pm(s >> (2 * j - 2) & 1) - pm(s >> (2 * j - 1) & 1), 1)
            }
            WitnessKind::PerDofAlt { j } => {
                let a = pm(s >> (2 * j - 2) & 1);
                let b = pm(s >> (2 * j - 1) & 1);
                (1 - a - b - a * b, 2)
            }
            WitnessKind::QuditProjector => {
                let q = 1i128 << (n_gen / 2);
                (if s == 0 { 1 - q } else { 1 }, q)
            }
        }
    }

    /// Trace from the closed form, exact.
    pub fn trace(&self) -> Rational {
        let n_gen = self.n_generators();
        let d = 1i128 << n_gen;
        match self.kind {
            WitnessKind::Tilde => Rational::from_integer(d - 2),
            WitnessKind::W1 => Rational::from_integer((n_gen as i128 - 1) * d),
            WitnessKind::W2 => {
                let (odd_mask, even_mask) = family_masks(n_gen);
                let m_o = odd_mask.count_ones();
                let m_e = even_mask.count_ones();
                Rational::from_integer(3 * d - 2 * (d >> m_o) - 2 * (d >> m_e))
            }
            WitnessKind::W3 => {
                let n_slots = n_gen / 2;
                let pow3 = 3i128.pow(n_slots as u32);
                if n_gen % 2 == 0 {
                    Rational::new(2 * d * pow3 - 3 * d, pow3)
                } else {
                    Rational::new(4 * d * pow3 - 3 * d, 2 * pow3)
                }
            }
            WitnessKind::PerDof { .. } => Rational::from_integer(d),
            WitnessKind::PerDofAlt { .. } => Rational::new(d, 2),
            WitnessKind::QuditProjector => Rational::from_integer((1i128 << (n_gen / 2)) - 1),
        }
    }

    /// Trace as Σ_s λ(s), the independent slow route. Capped.
    pub fn trace_by_eigenvalue_sum(&self) -> Result<Rational> {
        self.check_scan_cap()?;
        let mut num = 0i128;
        let mut den = 1i128;
        for s in 0..1u64 << self.n_generators() {
            let (n, d) = self.lambda_parts(s);
            den = d;
            num += n;
        }
        Ok(Rational::new(num, den))
    }

    /// Maximum white-noise weight p at which the witness still gives a
    /// negative value on (1−p)|base⟩⟨base| + p·1/D. For the −1-normalized
    /// witnesses this is D/(Tr+D); the qudit projector uses the same
    /// crossing condition with its own normalization.
    pub fn noise_threshold(&self) -> Rational {
        let d = Rational::from_integer(1i128 << self.n_generators());
        let lambda0 = Rational::new(self.lambda_parts(0).0, self.lambda_parts(0).1);
        // Tr[Wρ_p] = (1−p)λ(0) + p·Tr/D crosses zero at −λ0/(Tr/D − λ0).
        -lambda0 / (self.trace() / d - lambda0)
    }

    /// A second closed form for the odd-N two-family threshold, which floats
    /// √(2D) where the trace-derived form has √(D/2). The two disagree; both
    /// are surfaced so reports can flag the discrepancy. `None` for every
    /// other witness/parity.
    pub fn noise_threshold_variant(&self) -> Option<Rational> {
        let n_gen = self.n_generators();
        if self.kind != WitnessKind::W2 || n_gen % 2 == 0 {
            return None;
        }
        // ¼ · 1/(1 − 3/(4√(2D))) with √(2D) = 2^{(N+1)/2} an exact integer.
        let sqrt_2d = 1i128 << ((n_gen + 1) / 2);
        Some(Rational::new(sqrt_2d, 4 * sqrt_2d - 3))
    }

    /// ⟨W⟩ on a dense pure or mixed state.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: state.n_qubits(),
                right: self.n_qubits(),
            });
        }
        match self.kind {
            WitnessKind::Tilde => Ok(1.0 - 2.0 * self.base_fidelity(state)?),
            WitnessKind::QuditProjector => {
                let q = (1u64 << (self.n_generators() / 2)) as f64;
                Ok(1.0 / q - self.base_fidelity(state)?)
            }
            _ => {
                let expansion = self.expansion()?;
                let mut acc = ratio_to_f64(expansion.constant);
                for term in &expansion.terms {
                    let v = state.expectation_pauli(&term.pauli)?;
                    acc += ratio_to_f64(term.coefficient) * v.re;
                }
                Ok(acc)
            }
        }
    }

    /// ⟨W⟩ on (1−p)·state + p·1/D without materializing the mixture:
    /// (1−p)⟨W⟩ + p·Tr[W]/D.
    pub fn expectation_noisy(&self, state: &QuantumState, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidProbability(p));
        }
        let clean = self.expectation(state)?;
        let d = (1u64 << self.n_generators()) as f64;
        Ok((1.0 - p) * clean + p * ratio_to_f64(self.trace()) / d)
    }

    /// |⟨base|ψ⟩|² or ⟨base|ρ|base⟩.
    fn base_fidelity(&self, state: &QuantumState) -> Result<f64> {
        let base = self.stabilizers.base_state()?;
        match state {
            QuantumState::Pure(v) => Ok(base.inner(v)?.norm_sqr()),
            QuantumState::Mixed(r) => {
                let dim = r.dim();
                let m = r.matrix();
                let b = base.amplitudes();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..dim {
                    let mut row = Complex64::new(0.0, 0.0);
                    for j in 0..dim {
                        row += m[i * dim + j] * b[j];
                    }
                    acc += b[i].conj() * row;
                }
                Ok(acc.re)
            }
        }
    }

    /// Expansion into stabilizer-subset products with exact coefficients.
    pub fn expansion(&self) -> Result<WitnessExpansion> {
        let n_gen = self.n_generators();
        let d = || Rational::from_integer(1i128 << n_gen);
        let mut terms: Vec<(Rational, u64)> = Vec::new();
        let constant = match self.kind {
            WitnessKind::Tilde | WitnessKind::QuditProjector => {
                if n_gen >= 21 {
                    return Err(Error::CapacityExceeded {
                        requested: 1usize << n_gen,
                        cap: EXPANSION_TERM_CAP,
                    });
                }
                let coeff = match self.kind {
                    WitnessKind::Tilde => Rational::new(-2, 1i128 << n_gen),
                    _ => Rational::new(-1, 1i128 << n_gen),
                };
                for subset in 1..1u64 << n_gen {
                    terms.push((coeff, subset));
                }
                match self.kind {
                    WitnessKind::Tilde => Rational::from_integer(1) - Rational::new(2, 1) / d(),
                    _ => {
                        Rational::new(1, 1i128 << (n_gen / 2)) - Rational::from_integer(1) / d()
                    }
                }
            }
            WitnessKind::W1 => {
                for k in 0..n_gen {
                    terms.push((Rational::from_integer(-1), 1u64 << k));
                }
                Rational::from_integer(n_gen as i128 - 1)
            }
            WitnessKind::W2 => {
                let (odd_mask, even_mask) = family_masks(n_gen);
                let mut constant = Rational::from_integer(3);
                for family in [odd_mask, even_mask] {
                    let coeff = Rational::new(-2, 1i128 << family.count_ones());
                    constant += coeff;
                    let mut sub = family;
                    while sub != 0 {
                        terms.push((coeff, sub));
                        sub = (sub - 1) & family;
                    }
                }
                constant
            }
            WitnessKind::W3 => {
                let n_slots = n_gen / 2;
                let odd_tail = n_gen % 2 == 1;
                let pow3 = 3i128.pow(n_slots as u32);
                let coeff = if odd_tail {
                    Rational::new(-3, 2 * pow3)
                } else {
                    Rational::new(-3, pow3)
                };
                let tail_choices = if odd_tail { 2 } else { 1 };
                let mut choice = vec![0u8; n_slots];
                for tail in 0..tail_choices {
                    loop {
                        let mut subset = 0u64;
                        for (slot, &c) in choice.iter().enumerate() {
                            match c {
                                0 => {}
                                1 => subset |= 1 << (2 * slot),
                                _ => subset |= 1 << (2 * slot + 1),
                            }
                        }
                        if tail == 1 {
                            subset |= 1 << (n_gen - 1);
                        }
                        if subset != 0 {
                            terms.push((coeff, subset));
                        }
                        if !increment_base3(&mut choice) {
                            break;
                        }
                    }
                }
                Rational::from_integer(2) + coeff
            }
            WitnessKind::PerDof { j } => {
                terms.push((Rational::from_integer(-1), 1u64 << (2 * j - 2)));
                terms.push((Rational::from_integer(-1), 1u64 << (2 * j - 1)));
                Rational::from_integer(1)
            }
            WitnessKind::PerDofAlt { j } => {
                let half = Rational::new(-1, 2);
                terms.push((half, 1u64 << (2 * j - 2)));
                terms.push((half, 1u64 << (2 * j - 1)));
                terms.push((half, (1u64 << (2 * j - 2)) | (1u64 << (2 * j - 1))));
                Rational::new(1, 2)
            }
        };
        if terms.len() > EXPANSION_TERM_CAP {
            return Err(Error::CapacityExceeded {
                requested: terms.len(),
                cap: EXPANSION_TERM_CAP,
            });
        }
        let terms = terms
            .into_iter()
            .map(|(coefficient, subset)| {
                Ok(ExpansionTerm {
                    coefficient,
                    subset,
                    pauli: self.stabilizers.subset_product(subset)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WitnessExpansion {
            constant,
            terms,
            n_generators: n_gen,
        })
    }

    /// Dense row-major matrix. Projector kinds are built definitionally from
    /// the base state; the rest come from the expansion.
    pub fn dense_matrix(&self) -> Result<Vec<Complex64>> {
        let nq = self.n_qubits();
        if nq > MAX_DENSITY_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: nq,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        match self.kind {
            WitnessKind::Tilde | WitnessKind::QuditProjector => {
                let base = self.stabilizers.base_state()?;
                let dim = base.dim();
                let (diag, scale) = match self.kind {
                    WitnessKind::Tilde => (1.0, 2.0),
                    _ => (1.0 / (1u64 << (self.n_generators() / 2)) as f64, 1.0),
                };
                let b = base.amplitudes();
                let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        mat[i * dim + j] = -scale * b[i] * b[j].conj();
                    }
                    mat[i * dim + i] += Complex64::new(diag, 0.0);
                }
                Ok(mat)
            }
            _ => self.expansion()?.dense(nq),
        }
    }

    fn check_scan_cap(&self) -> Result<()> {
        if self.n_generators() > SYNDROME_SCAN_CAP {
            return Err(Error::CapacityExceeded {
                requested: self.n_generators(),
                cap: SYNDROME_SCAN_CAP,
            });
        }
        Ok(())
    }

    /// α-positivity certificate against the projector witness.
    pub fn certify(&self) -> Result<AlphaCertificate> {
        self.check_scan_cap()?;
        let lambda_zero = self.eigenvalue(0)?;
        let mut min_nonzero: Option<Rational> = None;
        for s in 1..1u64 << self.n_generators() {
            let (num, den) = self.lambda_parts(s);
            let v = Rational::new(num, den);
            min_nonzero = Some(match min_nonzero {
                Some(m) if m <= v => m,
                _ => v,
            });
        }
        let min_lambda_nonzero = min_nonzero.unwrap_or_else(|| Rational::from_integer(0));
        let alpha_lower = -lambda_zero;
        let alpha_upper = min_lambda_nonzero;
        let valid = alpha_lower <= alpha_upper && alpha_upper > Rational::from_integer(0);
        Ok(AlphaCertificate {
            lambda_zero,
            min_lambda_nonzero,
            alpha_lower,
            alpha_upper,
            alpha: alpha_upper,
            valid,
        })
    }

    /// Syndrome scan of [c₀·1 + (W − 2·1)] − α·W̃ for the `W3` kind, i.e. the
    /// witness with its constant replaced by c₀. Exposes the two candidate
    /// minima: the base state and the single-flip syndromes.
    pub fn shifted_scan(&self, c0: Rational, alpha: Rational) -> Result<ShiftedScan> {
        if self.kind != WitnessKind::W3 {
            return Err(Error::KindSystemMismatch(alloc::string::String::from(
                "shifted scan is defined for the settings/noise-compromise witness only",
            )));
        }
        self.check_scan_cap()?;
        let shift = c0 - Rational::from_integer(2);
        let o_eig = |s: u64, this: &Witness| -> Rational {
            let (num, den) = this.lambda_parts(s);
            let tilde = if s == 0 { -1 } else { 1 };
            shift + Rational::new(num, den) - alpha * Rational::from_integer(tilde)
        };
        let lambda_projector = o_eig(0, self);
        let mut single = None;
        let mut nonzero = None;
        for s in 1..1u64 << self.n_generators() {
            let v = o_eig(s, self);
            if s.count_ones() == 1 {
                single = Some(match single {
                    Some(m) if m <= v => m,
                    _ => v,
                });
            }
            nonzero = Some(match nonzero {
                Some(m) if m <= v => m,
                _ => v,
            });
        }
        Ok(ShiftedScan {
            lambda_projector,
            lambda_single_flip: single.expect("at least one generator"),
            min_lambda_nonzero: nonzero.expect("at least one generator"),
        })
    }
}

/// Two-stage detection: per-DOF witnesses first, then the chosen witness,
/// optionally on the white-noise-mixed state. Strict negativity throughout.
pub fn detect(
    stabilizers: &StabilizerSet,
    kind: WitnessKind,
    state: &QuantumState,
    noise: f64,
) -> Result<DetectionReport> {
    let SystemSpec::HyperEntangled { layout } = stabilizers.system() else {
        return Err(Error::KindSystemMismatch(alloc::string::String::from(
            "detection requires the two-particle DOF layout",
        )));
    };
    let n_dofs = layout.n_dofs();
    let mut per_dof_values = Vec::with_capacity(n_dofs);
    for j in 1..=n_dofs {
        let w = Witness::new(WitnessKind::PerDof { j }, stabilizers.clone())?;
        per_dof_values.push(w.expectation_noisy(state, noise)?);
    }
    let all_dofs_entangled = per_dof_values.iter().all(|&v| v < -DETECTION_EPS);
    let witness = Witness::new(kind, stabilizers.clone())?;
    let witness_value = witness.expectation_noisy(state, noise)?;
    Ok(DetectionReport {
        per_dof_values,
        all_dofs_entangled,
        witness_value,
        detected: all_dofs_entangled && witness_value < -DETECTION_EPS,
    })
}

/// Generator-index parity families as syndrome masks: S_k with odd k sit at
/// bit k−1, so the "odd" family mask has even bit positions set.
fn family_masks(n_gen: usize) -> (u64, u64) {
    let mut odd = 0u64;
    let mut even = 0u64;
    for k in 1..=n_gen {
        if k % 2 == 1 {
            odd |= 1 << (k - 1);
        } else {
            even |= 1 << (k - 1);
        }
    }
    (odd, even)
}

fn increment_base3(digits: &mut [u8]) -> bool {
    for d in digits.iter_mut() {
        if *d < 2 {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;
    use crate::linalg;
    use crate::state::{example_psi1, example_psi2, example_rho_prime};

    fn he_witness(n: usize, kind: WitnessKind) -> Witness {
        Witness::new(kind, StabilizerSet::for_he(n).unwrap()).unwrap()
    }

    fn graph_witness(g: GraphSpec, kind: WitnessKind) -> Witness {
        Witness::new(kind, StabilizerSet::for_graph(g).unwrap()).unwrap()
    }

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    const MAIN_KINDS: [WitnessKind; 4] = [
        WitnessKind::Tilde,
        WitnessKind::W1,
        WitnessKind::W2,
        WitnessKind::W3,
    ];

    #[test]
    fn base_state_normalization() {
        for n in 1..=6 {
            for kind in MAIN_KINDS {
                let w = he_witness(n, kind);
                assert_eq!(w.eigenvalue(0).unwrap(), r(-1, 1), "{kind:?} n={n}");
            }
            for j in 1..=n {
                let w = he_witness(n, WitnessKind::PerDof { j });
                assert_eq!(w.eigenvalue(0).unwrap(), r(-1, 1));
                let alt = he_witness(n, WitnessKind::PerDofAlt { j });
                assert_eq!(alt.eigenvalue(0).unwrap(), r(-1, 1));
            }
        }
    }

    #[test]
    fn eigenvalues_match_expansion_resum() {
        let cases: Vec<Witness> = MAIN_KINDS
            .iter()
            .map(|&k| he_witness(2, k))
            .chain(MAIN_KINDS.iter().map(|&k| graph_witness(GraphSpec::path(5).unwrap(), k)))
            .chain([
                he_witness(2, WitnessKind::PerDof { j: 2 }),
                he_witness(2, WitnessKind::PerDofAlt { j: 1 }),
                he_witness(2, WitnessKind::QuditProjector),
            ])
            .collect();
        for w in &cases {
            let expansion = w.expansion().unwrap();
            for s in 0..1u64 << w.n_generators() {
                assert_eq!(
                    w.eigenvalue(s).unwrap(),
                    expansion.eigenvalue_resummed(s),
                    "{:?} at syndrome {s:b}",
                    w.kind()
                );
            }
        }
    }

    #[test]
    fn dense_matches_diagonal_in_stabilizer_basis() {
        for w in [
            he_witness(2, WitnessKind::Tilde),
            he_witness(2, WitnessKind::W3),
            he_witness(2, WitnessKind::QuditProjector),
            he_witness(2, WitnessKind::PerDofAlt { j: 2 }),
            graph_witness(GraphSpec::star(3).unwrap(), WitnessKind::W2),
            graph_witness(GraphSpec::path(3).unwrap(), WitnessKind::W3),
        ] {
            let dense = w.dense_matrix().unwrap();
            for s in 0..1u64 << w.n_generators() {
                let basis = w.stabilizers().basis_state(s).unwrap();
                let got = basis.expectation_matrix(&dense).unwrap();
                let want = ratio_to_f64(w.eigenvalue(s).unwrap());
                assert!(
                    (got.re - want).abs() < 1e-10 && got.im.abs() < 1e-12,
                    "{:?} s={s:b}: {got} vs {want}",
                    w.kind()
                );
            }
        }
    }

    #[test]
    fn dense_spectrum_equals_eigenvalue_multiset() {
        let w = he_witness(2, WitnessKind::W3);
        let dense = w.dense_matrix().unwrap();
        let dim = 1usize << w.n_qubits();
        let spectrum = linalg::hermitian_eigenvalues(&dense, dim).unwrap();
        let mut expected: Vec<f64> = (0..1u64 << w.n_generators())
            .map(|s| ratio_to_f64(w.eigenvalue(s).unwrap()))
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in spectrum.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn traces_closed_form_vs_sum_vs_dense() {
        let systems: Vec<StabilizerSet> = vec![
            StabilizerSet::for_he(1).unwrap(),
            StabilizerSet::for_he(2).unwrap(),
            StabilizerSet::for_he(3).unwrap(),
            StabilizerSet::for_graph(GraphSpec::path(3).unwrap()).unwrap(),
            StabilizerSet::for_graph(GraphSpec::path(5).unwrap()).unwrap(),
        ];
        for stabs in &systems {
            for kind in MAIN_KINDS {
                let w = Witness::new(kind, stabs.clone()).unwrap();
                let closed = w.trace();
                assert_eq!(closed, w.trace_by_eigenvalue_sum().unwrap(), "{kind:?}");
                if w.n_qubits() <= 6 {
                    let dense = w.dense_matrix().unwrap();
                    let dim = 1usize << w.n_qubits();
                    let tr: Complex64 = (0..dim).map(|i| dense[i * dim + i]).sum();
                    assert!(
                        (tr.re - ratio_to_f64(closed)).abs() < 1e-9 * (1.0 + tr.re.abs()),
                        "{kind:?} dense trace"
                    );
                }
            }
        }
    }

    #[test]
    fn reference_traces_and_thresholds() {
        // n = 2 (N = 4, D = 16)
        assert_eq!(he_witness(2, WitnessKind::Tilde).trace(), r(14, 1));
        assert_eq!(he_witness(2, WitnessKind::Tilde).noise_threshold(), r(8, 15));
        assert_eq!(he_witness(2, WitnessKind::W1).trace(), r(48, 1));
        assert_eq!(he_witness(2, WitnessKind::W1).noise_threshold(), r(1, 4));
        assert_eq!(he_witness(2, WitnessKind::W2).trace(), r(32, 1));
        assert_eq!(he_witness(2, WitnessKind::W2).noise_threshold(), r(1, 3));
        assert_eq!(he_witness(2, WitnessKind::W3).trace(), r(80, 3));
        assert_eq!(he_witness(2, WitnessKind::W3).noise_threshold(), r(3, 8));
        assert_eq!(he_witness(2, WitnessKind::PerDof { j: 1 }).noise_threshold(), r(1, 2));
        // Qudit witness: Tr = 2ⁿ−1, threshold 2ⁿ/(2ⁿ+1).
        assert_eq!(he_witness(2, WitnessKind::QuditProjector).trace(), r(3, 1));
        assert_eq!(
            he_witness(2, WitnessKind::QuditProjector).noise_threshold(),
            r(4, 5)
        );
        // Odd N = 5 on a path graph: derived 4/13 vs the floated variant 8/29.
        let w2_odd = graph_witness(GraphSpec::path(5).unwrap(), WitnessKind::W2);
        assert_eq!(w2_odd.trace(), r(96 - 24, 1));
        assert_eq!(w2_odd.noise_threshold(), r(4, 13));
        assert_eq!(w2_odd.noise_threshold_variant(), Some(r(8, 29)));
        assert_eq!(
            graph_witness(GraphSpec::path(4).unwrap(), WitnessKind::W2).noise_threshold_variant(),
            None
        );
        // W1 threshold is 1/N for every N.
        for n in 1..=5 {
            assert_eq!(
                he_witness(n, WitnessKind::W1).noise_threshold(),
                r(1, 2 * n as i128)
            );
        }
    }

    #[test]
    fn example_state_values() {
        let stabs = StabilizerSet::for_he(2).unwrap();
        let psi1 = QuantumState::Pure(example_psi1());
        let psi2 = QuantumState::Pure(example_psi2());
        let rho = QuantumState::Mixed(example_rho_prime());
        let w1dof = Witness::new(WitnessKind::PerDof { j: 1 }, stabs.clone()).unwrap();
        let w2dof = Witness::new(WitnessKind::PerDof { j: 2 }, stabs.clone()).unwrap();
        let tilde = Witness::new(WitnessKind::Tilde, stabs.clone()).unwrap();

        assert!((w2dof.expectation(&psi1).unwrap() + 1.0).abs() < 1e-12);
        assert!((w1dof.expectation(&psi2).unwrap() + 1.0).abs() < 1e-12);
        assert!(w1dof.expectation(&psi1).unwrap().abs() < 1e-12);
        assert!(w2dof.expectation(&psi2).unwrap().abs() < 1e-12);
        assert!((w1dof.expectation(&rho).unwrap() + 0.5).abs() < 1e-12);
        assert!((w2dof.expectation(&rho).unwrap() + 0.5).abs() < 1e-12);
        assert!(tilde.expectation(&rho).unwrap().abs() < 1e-12);

        // The footnote variant agrees on all four example values.
        let alt1 = Witness::new(WitnessKind::PerDofAlt { j: 1 }, stabs.clone()).unwrap();
        assert!((alt1.expectation(&psi2).unwrap() + 1.0).abs() < 1e-12);
        assert!((alt1.expectation(&rho).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn certificates() {
        for n in [1usize, 2, 3] {
            for kind in [WitnessKind::W1, WitnessKind::W2, WitnessKind::W3] {
                let cert = he_witness(n, kind).certify().unwrap();
                assert!(cert.valid, "{kind:?} n={n}");
                assert_eq!(cert.alpha, r(1, 1));
                assert_eq!(cert.alpha_lower, r(1, 1));
                assert_eq!(cert.lambda_zero, r(-1, 1));
            }
        }
        for g in [GraphSpec::path(5).unwrap(), GraphSpec::ring(4).unwrap()] {
            for kind in [WitnessKind::W1, WitnessKind::W2, WitnessKind::W3] {
                let cert = graph_witness(g.clone(), kind).certify().unwrap();
                assert!(cert.valid);
                assert_eq!(cert.alpha, r(1, 1));
            }
        }
        // Per-DOF witnesses are deliberately not dominated: they go negative
        // on states that are entangled in their DOF only.
        let per = he_witness(2, WitnessKind::PerDof { j: 1 }).certify().unwrap();
        assert!(!per.valid);
        assert_eq!(per.min_lambda_nonzero, r(-1, 1));
        // The bipartite qudit witness is weaker for n ≥ 2, equivalent at n = 1.
        assert!(he_witness(1, WitnessKind::QuditProjector).certify().unwrap().valid);
        assert!(!he_witness(2, WitnessKind::QuditProjector).certify().unwrap().valid);
    }

    #[test]
    fn shifted_scan_pins_the_two_minima() {
        let w3 = he_witness(2, WitnessKind::W3);
        let scan = w3.shifted_scan(r(2, 1), r(1, 1)).unwrap();
        assert_eq!(scan.lambda_projector, r(0, 1));
        assert_eq!(scan.lambda_single_flip, r(0, 1));
        assert_eq!(scan.min_lambda_nonzero, r(0, 1));
        // General c0, α: projector eigenvalue c0+α−3, single flip c0−α−1.
        for (c0, alpha) in [(r(5, 2), r(1, 1)), (r(3, 1), r(3, 2)), (r(2, 1), r(1, 2))] {
            let scan = w3.shifted_scan(c0, alpha).unwrap();
            assert_eq!(scan.lambda_projector, c0 + alpha - r(3, 1));
            assert_eq!(scan.lambda_single_flip, c0 - alpha - r(1, 1));
        }
        assert!(he_witness(2, WitnessKind::W1).shifted_scan(r(2, 1), r(1, 1)).is_err());
    }

    #[test]
    fn noise_crossing_matches_threshold() {
        for n in [2usize, 3] {
            let stabs = StabilizerSet::for_he(n).unwrap();
            let base = QuantumState::Pure(stabs.base_state().unwrap());
            for kind in [
                WitnessKind::Tilde,
                WitnessKind::W1,
                WitnessKind::W2,
                WitnessKind::W3,
                WitnessKind::PerDof { j: 1 },
                WitnessKind::QuditProjector,
            ] {
                let w = Witness::new(kind, stabs.clone()).unwrap();
                let pm = ratio_to_f64(w.noise_threshold());
                let at_pm = w.expectation_noisy(&base, pm).unwrap();
                assert!(at_pm.abs() < 1e-12, "{kind:?} n={n}: {at_pm}");
                assert!(w.expectation_noisy(&base, pm - 0.05).unwrap() < 0.0);
                assert!(w.expectation_noisy(&base, (pm + 0.05).min(1.0)).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn noisy_expectation_closed_form() {
        let n = 2;
        let w = he_witness(n, WitnessKind::Tilde);
        let base = QuantumState::Pure(w.stabilizers().base_state().unwrap());
        for p in [0.0, 0.25, 0.4, 1.0] {
            let got = w.expectation_noisy(&base, p).unwrap();
            let d = 16.0;
            let want = -1.0 + p + p * ratio_to_f64(w.trace()) / d;
            assert!((got - want).abs() < 1e-13);
        }
        // Matches the materialized mixture.
        let noisy = base.with_white_noise(0.4).unwrap();
        assert!((w.expectation(&noisy).unwrap() - w.expectation_noisy(&base, 0.4).unwrap()).abs() < 1e-12);
        assert!((w.expectation_noisy(&base, 0.4).unwrap() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn detection_pipeline_cases() {
        let stabs = StabilizerSet::for_he(2).unwrap();
        let he = QuantumState::Pure(stabs.base_state().unwrap());

        let hit = detect(&stabs, WitnessKind::Tilde, &he, 0.0).unwrap();
        assert!(hit.detected && hit.all_dofs_entangled);
        assert!((hit.witness_value + 1.0).abs() < 1e-12);

        let rho = QuantumState::Mixed(example_rho_prime());
        let miss = detect(&stabs, WitnessKind::Tilde, &rho, 0.0).unwrap();
        assert!(miss.all_dofs_entangled && !miss.detected);
        assert!(miss.witness_value.abs() < 1e-12);

        for psi in [example_psi1(), example_psi2()] {
            let rep = detect(&stabs, WitnessKind::Tilde, &QuantumState::Pure(psi), 0.0).unwrap();
            assert!(!rep.all_dofs_entangled && !rep.detected);
        }

        let noisy = detect(&stabs, WitnessKind::Tilde, &he, 0.4).unwrap();
        assert!(noisy.detected);
        assert!((noisy.witness_value + 0.25).abs() < 1e-12);
    }

    #[test]
    fn kind_system_validation() {
        let graph_stabs = StabilizerSet::for_graph(GraphSpec::path(4).unwrap()).unwrap();
        assert!(matches!(
            Witness::new(WitnessKind::PerDof { j: 1 }, graph_stabs.clone()),
            Err(Error::KindSystemMismatch(_))
        ));
        assert!(matches!(
            Witness::new(WitnessKind::QuditProjector, graph_stabs.clone()),
            Err(Error::KindSystemMismatch(_))
        ));
        let he_stabs = StabilizerSet::for_he(2).unwrap();
        assert!(matches!(
            Witness::new(WitnessKind::PerDof { j: 3 }, he_stabs.clone()),
            Err(Error::DofIndexOutOfRange { .. })
        ));
        let g = QuantumState::Pure(crate::state::build_graph_state(&GraphSpec::path(4).unwrap()).unwrap());
        assert!(detect(&graph_stabs, WitnessKind::Tilde, &g, 0.0).is_err());
        // Graph-system witnesses do work for the generic kinds.
        let w = Witness::new(WitnessKind::Tilde, graph_stabs).unwrap();
        assert!((w.expectation(&g).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_caps() {
        let big = graph_witness(GraphSpec::path(21).unwrap(), WitnessKind::Tilde);
        assert!(matches!(big.expansion(), Err(Error::CapacityExceeded { .. })));
        // Closed forms still work there.
        assert_eq!(big.trace(), r((1i128 << 21) - 2, 1));
        assert!(big.eigenvalue(0).is_ok());
    }
}
