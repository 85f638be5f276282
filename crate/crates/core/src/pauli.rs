//! Exact algebra of signed N-qubit Pauli strings.
//!
//! A string is stored as two bitmasks (X part, Z part) plus a phase that is a
//! power of the imaginary unit. The normal form is `i^k · X^x · Z^z`, with the
//! X factor to the left of the Z factor on every qubit, so a qubit with both
//! bits set carries `XZ = -iY`. Qubit `k` corresponds to bit `k` of every mask
//! and of every basis-state index.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Mask-level qubit limit. Dense operations cap out far lower.
pub const MAX_QUBITS: usize = 62;

/// A power of the imaginary unit, tracked exactly.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Phase {
        Phase(k % 4)
    }

    /// Exponent k of i^k, in 0..4.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "+1"),
            1 => write!(f, "+i"),
            2 => write!(f, "-1"),
            _ => write!(f, "-i"),
        }
    }
}

/// Signed tensor product of single-qubit Pauli operators.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Phase,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> Result<PauliString> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let allowed = mask_of_width(n_qubits);
        if x_mask & !allowed != 0 || z_mask & !allowed != 0 {
            return Err(Error::QubitCountOutOfRange {
                requested: 64 - (x_mask | z_mask).leading_zeros() as usize,
                max: n_qubits,
            });
        }
        Ok(PauliString {
            n_qubits,
            x_mask,
            z_mask,
            phase,
        })
    }

    pub fn identity(n_qubits: usize) -> Result<PauliString> {
        PauliString::new(n_qubits, 0, 0, Phase::ONE)
    }

    pub fn x(n_qubits: usize, qubit: usize) -> Result<PauliString> {
        PauliString::new(n_qubits, 1 << qubit, 0, Phase::ONE)
    }

    pub fn z(n_qubits: usize, qubit: usize) -> Result<PauliString> {
        PauliString::new(n_qubits, 0, 1 << qubit, Phase::ONE)
    }

    /// Y = i·XZ under the fixed XZ = -iY convention.
    pub fn y(n_qubits: usize, qubit: usize) -> Result<PauliString> {
        PauliString::new(n_qubits, 1 << qubit, 1 << qubit, Phase::I)
    }

    /// X factors on every qubit in `mask`.
    pub fn x_on(n_qubits: usize, mask: u64) -> Result<PauliString> {
        PauliString::new(n_qubits, mask, 0, Phase::ONE)
    }

    /// Z factors on every qubit in `mask`.
    pub fn z_on(n_qubits: usize, mask: u64) -> Result<PauliString> {
        PauliString::new(n_qubits, 0, mask, Phase::ONE)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0 && self.phase == Phase::ONE
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Number of qubits carrying a Y factor (both mask bits set).
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// P is Hermitian iff the tracked phase exponent matches the Y-count parity.
    pub fn is_hermitian(&self) -> bool {
        u32::from(self.phase.exponent()) % 2 == self.y_count() % 2
    }

    /// Sign of the letter form ±(letters): +1 or -1 for Hermitian strings,
    /// `None` when the string carries an imaginary overall factor.
    pub fn letter_sign(&self) -> Option<i8> {
        match (4 + u32::from(self.phase.exponent()) - self.y_count() % 4) % 4 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    /// Operator product self·other with exact phase bookkeeping.
    ///
    /// Per qubit, moving the right factor's X past the left factor's Z picks up
    /// a sign, so the result phase gains i^(2·|z_self ∧ x_other|).
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same_size(other)?;
        let swaps = (self.z_mask & other.x_mask).count_ones();
        let phase = self
            .phase
            .times(other.phase)
            .times(Phase::from_exponent((2 * swaps % 4) as u8));
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase,
        })
    }

    /// True iff self·other = other·self, from symplectic overlap parity.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same_size(other)?;
        let overlap = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        Ok(overlap % 2 == 0)
    }

    pub fn hermitian_conjugate(&self) -> PauliString {
        // P† = (-i)^k Z^z X^x = (-i)^k (-1)^{#Y} X^x Z^z
        let k = self.phase.conj();
        let flips = Phase::from_exponent((2 * self.y_count() % 4) as u8);
        PauliString {
            phase: k.times(flips),
            ..*self
        }
    }

    /// Amplitude map of P on a dense state: |b⟩ ↦ i^k (-1)^{|z∧b|} |b⊕x⟩.
    pub fn apply_to_amplitudes(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: amps.len().trailing_zeros() as usize,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let phase = self.phase.as_complex();
        for (b, amp) in amps.iter().enumerate() {
            let sign = parity_sign(self.z_mask & b as u64);
            out[b ^ self.x_mask as usize] = phase * sign * amp;
        }
        Ok(out)
    }

    /// Dense matrix, row-major over 2^N basis states.
    pub fn dense_matrix(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        let phase = self.phase.as_complex();
        for col in 0..dim {
            let row = col ^ self.x_mask as usize;
            let sign = parity_sign(self.z_mask & col as u64);
            mat[row * dim + col] = phase * sign;
        }
        mat
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }
}

fn mask_of_width(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn parity_sign(mask: u64) -> f64 {
    if mask.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Display for PauliString {
    /// One character per qubit, qubit 0 first, with a sign prefix when the
    /// Hermitian-letter form carries a phase other than +1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter_phase = (4 + self.phase.exponent() as u32 - self.y_count() % 4) % 4;
        match letter_phase {
            0 => {}
            1 => write!(f, "+i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for q in 0..self.n_qubits {
            let x = self.x_mask >> q & 1 != 0;
            let z = self.z_mask >> q & 1 != 0;
            let c = match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<PauliString> {
        let parse_err = || Error::Parse {
            what: "Pauli string",
            input: String::from(s),
        };
        let (sign_exp, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1u32, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        if body.is_empty() || body.len() > MAX_QUBITS {
            return Err(parse_err());
        }
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        let mut y_count = 0u32;
        for (q, c) in body.chars().enumerate() {
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x_mask |= 1 << q,
                'Z' => z_mask |= 1 << q,
                'Y' => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    y_count += 1;
                }
                _ => return Err(parse_err()),
            }
        }
        let phase = Phase::from_exponent(((sign_exp + y_count) % 4) as u8);
        PauliString::new(body.len(), x_mask, z_mask, phase)
    }
}

/// Which particle a qubit position belongs to in the two-particle layout.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Particle {
    A,
    B,
}

/// Fixed qubit ordering for a two-particle system with `n` degrees of freedom:
/// qubit 2j-2 holds A_j and qubit 2j-1 holds B_j (j = 1..=n), so the two
/// qubits of one DOF are always adjacent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DofLayout {
    n_dofs: usize,
}

impl DofLayout {
    pub fn new(n_dofs: usize) -> Result<DofLayout> {
        if n_dofs == 0 || 2 * n_dofs > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange {
                requested: 2 * n_dofs,
                max: MAX_QUBITS,
            });
        }
        Ok(DofLayout { n_dofs })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_dofs
    }

    /// Qubit position of A_j, j 1-based.
    pub fn qubit_a(&self, j: usize) -> Result<usize> {
        self.check_dof(j)?;
        Ok(2 * (j - 1))
    }

    /// Qubit position of B_j, j 1-based.
    pub fn qubit_b(&self, j: usize) -> Result<usize> {
        self.check_dof(j)?;
        Ok(2 * j - 1)
    }

    /// Inverse map: qubit position to (DOF index, particle).
    pub fn dof_of_qubit(&self, qubit: usize) -> Result<(usize, Particle)> {
        if qubit >= self.n_qubits() {
            return Err(Error::QubitCountOutOfRange {
                requested: qubit + 1,
                max: self.n_qubits(),
            });
        }
        let j = qubit / 2 + 1;
        let particle = if qubit % 2 == 0 { Particle::A } else { Particle::B };
        Ok((j, particle))
    }

    /// Human-readable label, e.g. "A1" or "B3".
    pub fn label(&self, qubit: usize) -> Result<String> {
        let (j, particle) = self.dof_of_qubit(qubit)?;
        let tag = match particle {
            Particle::A => 'A',
            Particle::B => 'B',
        };
        Ok(alloc::format!("{tag}{j}"))
    }

    pub fn parse_label(&self, label: &str) -> Result<usize> {
        let err = || Error::Parse {
            what: "qubit label",
            input: String::from(label),
        };
        let mut chars = label.chars();
        let tag = chars.next().ok_or_else(err)?;
        let j: usize = chars.as_str().parse().map_err(|_| err())?;
        let qubit = match tag {
            'A' | 'a' => self.qubit_a(j),
            'B' | 'b' => self.qubit_b(j),
            _ => return Err(err()),
        };
        qubit.map_err(|_| err())
    }

    fn check_dof(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n_dofs {
            return Err(Error::DofIndexOutOfRange {
                j,
                n_dofs: self.n_dofs,
            });
        }
        Ok(())
    }
}
