//! Dense state vectors and density operators, plus the reference states:
//! the two-particle hyperentangled state, graph states, and the small
//! mixed-state examples used to separate per-DOF detection from genuine
//! hyperentanglement.
//!
//! Basis convention: qubit k is bit k of the basis-state index, so amplitude
//! slot b assigns qubit k the value (b >> k) & 1.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float supplies the f64 math in no_std builds; std test builds shadow it.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::linalg;
use crate::pauli::{DofLayout, PauliString};

/// Dense state vectors are capped here (dimension 2^16).
pub const MAX_VECTOR_QUBITS: usize = 16;
/// Dense density matrices are capped here (dimension 2^12 squared).
pub const MAX_DENSITY_QUBITS: usize = 12;

const NORM_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Deposit the low bits of `compact` into the set-bit positions of `mask`,
/// lowest position first (software PDEP).
pub(crate) fn deposit_bits(compact: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut i = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if compact >> i & 1 != 0 {
            out |= low;
        }
        m &= m - 1;
        i += 1;
    }
    out
}

#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// A normalized vector over 2^n amplitudes.
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        check_vector_cap(n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1usize << n_qubits,
            });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<StateVector> {
        check_vector_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: index,
                right: dim,
            });
        }
        let mut amps = vec![c(0.0); dim];
        amps[index] = c(1.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        let amps = p.apply_to_amplitudes(&self.amps)?;
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// ⟨ψ|P|ψ⟩, kept complex so non-Hermitian strings stay meaningful.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        self.inner(&self.apply_pauli(p)?)
    }

    /// ⟨ψ|M|ψ⟩ for a dense row-major operator.
    pub fn expectation_matrix(&self, op: &[Complex64]) -> Result<Complex64> {
        let dim = self.dim();
        if op.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: op.len(),
                right: dim * dim,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                row += op[i * dim + j] * self.amps[j];
            }
            acc += self.amps[i].conj() * row;
        }
        Ok(acc)
    }

    /// Apply a 2x2 unitary [m00 m01; m10 m11] (row-major) to one qubit.
    pub fn apply_single_qubit(&self, qubit: usize, m: &[Complex64; 4]) -> Result<StateVector> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitCountOutOfRange {
                requested: qubit + 1,
                max: self.n_qubits,
            });
        }
        let bit = 1usize << qubit;
        let mut amps = self.amps.clone();
        for b in 0..self.dim() {
            if b & bit == 0 {
                let a0 = amps[b];
                let a1 = amps[b | bit];
                amps[b] = m[0] * a0 + m[1] * a1;
                amps[b | bit] = m[2] * a0 + m[3] * a1;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    pub fn apply_h(&self, qubit: usize) -> Result<StateVector> {
        let s = c(core::f64::consts::FRAC_1_SQRT_2);
        self.apply_single_qubit(qubit, &[s, s, s, -s])
    }

    /// Controlled-Z; symmetric in its arguments.
    pub fn apply_cz(&self, a: usize, b: usize) -> Result<StateVector> {
        if a >= self.n_qubits || b >= self.n_qubits || a == b {
            return Err(Error::QubitCountOutOfRange {
                requested: a.max(b) + 1,
                max: self.n_qubits,
            });
        }
        let mask = (1usize << a) | (1usize << b);
        let mut amps = self.amps.clone();
        for (idx, amp) in amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// self ⊗ other; `other`'s qubits occupy the higher positions.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + other.n_qubits;
        check_vector_cap(n)?;
        let mut amps = vec![c(0.0); 1usize << n];
        for (hi, b) in other.amps.iter().enumerate() {
            for (lo, a) in self.amps.iter().enumerate() {
                amps[(hi << self.n_qubits) | lo] = a * b;
            }
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn density(&self) -> Result<DensityOperator> {
        DensityOperator::from_pure(self)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct DensityOperator {
    n_qubits: usize,
    mat: Vec<Complex64>,
}

impl DensityOperator {
    /// Validates shape, Hermiticity, and unit trace; positivity is the
    /// caller's concern (checked where it matters via eigenvalues).
    pub fn new(n_qubits: usize, mat: Vec<Complex64>) -> Result<DensityOperator> {
        check_density_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if mat.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: mat.len(),
                right: dim * dim,
            });
        }
        if !linalg::is_hermitian(&mat, dim, NORM_TOL) {
            return Err(Error::InvalidDensityMatrix(alloc::format!(
                "not Hermitian (defect {:.3e})",
                linalg::hermiticity_defect(&mat, dim)
            )));
        }
        let tr: Complex64 = (0..dim).map(|i| mat[i * dim + i]).sum();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensityMatrix(alloc::format!(
                "trace {} is not 1",
                tr.re
            )));
        }
        Ok(DensityOperator { n_qubits, mat })
    }

    pub fn from_pure(psi: &StateVector) -> Result<DensityOperator> {
        check_density_cap(psi.n_qubits())?;
        let dim = psi.dim();
        let mut mat = vec![c(0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = psi.amps[i] * psi.amps[j].conj();
            }
        }
        Ok(DensityOperator {
            n_qubits: psi.n_qubits,
            mat,
        })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<DensityOperator> {
        check_density_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut mat = vec![c(0.0); dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = c(1.0 / dim as f64);
        }
        Ok(DensityOperator { n_qubits, mat })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.mat[i * self.dim() + i]).sum()
    }

    /// Tr[P ρ] using the sparse one-entry-per-column form of P.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let dim = self.dim();
        let x = p.x_mask() as usize;
        let phase = p.phase().as_complex();
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..dim {
            let col = b ^ x;
            let sign = if (p.z_mask() & col as u64).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += phase * sign * self.mat[col * dim + b];
        }
        Ok(acc)
    }

    /// Tr[M ρ] for a dense row-major operator.
    pub fn expectation_matrix(&self, op: &[Complex64]) -> Result<Complex64> {
        let dim = self.dim();
        if op.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: op.len(),
                right: dim * dim,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += op[i * dim + j] * self.mat[j * dim + i];
            }
        }
        Ok(acc)
    }

    /// (1-p)·ρ + p·1/D: white noise with mixing weight p.
    pub fn with_white_noise(&self, p: f64) -> Result<DensityOperator> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidProbability(p));
        }
        let dim = self.dim();
        let mut mat: Vec<Complex64> = self.mat.iter().map(|v| v * (1.0 - p)).collect();
        let iso = p / dim as f64;
        for i in 0..dim {
            mat[i * dim + i] += c(iso);
        }
        Ok(DensityOperator {
            n_qubits: self.n_qubits,
            mat,
        })
    }

    /// Convex combination Σ wᵢ ρᵢ; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<DensityOperator> {
        let Some(((_, first), rest)) = parts.split_first() else {
            return Err(Error::InvalidWeights(alloc::string::String::from(
                "empty mixture",
            )));
        };
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < -NORM_TOL || !w.is_finite())
            || (total - 1.0).abs() > NORM_TOL
        {
            return Err(Error::InvalidWeights(alloc::format!(
                "weights must be nonnegative and sum to 1, got total {total}"
            )));
        }
        if rest.iter().any(|(_, r)| r.n_qubits != first.n_qubits) {
            return Err(Error::DimensionMismatch {
                left: first.n_qubits,
                right: rest
                    .iter()
                    .map(|(_, r)| r.n_qubits)
                    .find(|&n| n != first.n_qubits)
                    .unwrap_or(first.n_qubits),
            });
        }
        let mut mat = vec![c(0.0); first.mat.len()];
        for (w, rho) in parts {
            for (dst, src) in mat.iter_mut().zip(rho.mat.iter()) {
                *dst += src * *w;
            }
        }
        Ok(DensityOperator {
            n_qubits: first.n_qubits,
            mat,
        })
    }

    /// U ρ U† for a 2x2 unitary on one qubit (row-major [m00 m01; m10 m11]).
    pub fn conjugate_single_qubit(&self, qubit: usize, m: &[Complex64; 4]) -> Result<DensityOperator> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitCountOutOfRange {
                requested: qubit + 1,
                max: self.n_qubits,
            });
        }
        let dim = self.dim();
        let bit = 1usize << qubit;
        let mut mat = self.mat.clone();
        // Left-multiply by U on the qubit's row pairs…
        for row in 0..dim {
            if row & bit == 0 {
                for col in 0..dim {
                    let a0 = mat[row * dim + col];
                    let a1 = mat[(row | bit) * dim + col];
                    mat[row * dim + col] = m[0] * a0 + m[1] * a1;
                    mat[(row | bit) * dim + col] = m[2] * a0 + m[3] * a1;
                }
            }
        }
        // …then right-multiply by U† on the column pairs.
        for col in 0..dim {
            if col & bit == 0 {
                for row in 0..dim {
                    let a0 = mat[row * dim + col];
                    let a1 = mat[row * dim + (col | bit)];
                    mat[row * dim + col] = a0 * m[0].conj() + a1 * m[1].conj();
                    mat[row * dim + (col | bit)] = a0 * m[2].conj() + a1 * m[3].conj();
                }
            }
        }
        Ok(DensityOperator {
            n_qubits: self.n_qubits,
            mat,
        })
    }

    /// Trace out every qubit not in `keep_mask`; kept qubits are re-indexed
    /// in ascending order of their original positions.
    pub fn partial_trace(&self, keep_mask: u64) -> Result<DensityOperator> {
        let full = (1u64 << self.n_qubits) - 1;
        if keep_mask == 0 || keep_mask & !full != 0 {
            return Err(Error::QubitCountOutOfRange {
                requested: 64 - keep_mask.leading_zeros() as usize,
                max: self.n_qubits,
            });
        }
        let traced = full & !keep_mask;
        let nk = keep_mask.count_ones() as usize;
        let dk = 1usize << nk;
        let dt = 1usize << traced.count_ones();
        let dim = self.dim();
        let mut mat = vec![c(0.0); dk * dk];
        for r in 0..dk {
            let r_bits = deposit_bits(r as u64, keep_mask) as usize;
            for s in 0..dk {
                let s_bits = deposit_bits(s as u64, keep_mask) as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..dt {
                    let t_bits = deposit_bits(t as u64, traced) as usize;
                    acc += self.mat[(r_bits | t_bits) * dim + (s_bits | t_bits)];
                }
                mat[r * dk + s] = acc;
            }
        }
        Ok(DensityOperator {
            n_qubits: nk,
            mat,
        })
    }

    /// Two-qubit reduced state of one degree of freedom, ordered (A_j, B_j).
    pub fn reduce_to_dof(&self, layout: &DofLayout, j: usize) -> Result<DensityOperator> {
        if layout.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: layout.n_qubits(),
                right: self.n_qubits,
            });
        }
        let keep = (1u64 << layout.qubit_a(j)?) | (1u64 << layout.qubit_b(j)?);
        self.partial_trace(keep)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.mat, self.dim())
    }
}

/// A state that is either a ket or a density operator; operations dispatch.
#[derive(Clone, PartialEq, Debug)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl QuantumState {
    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.n_qubits(),
            QuantumState::Mixed(r) => r.n_qubits(),
        }
    }

    pub fn expectation_pauli(&self, p: &PauliString) -> Result<Complex64> {
        match self {
            QuantumState::Pure(v) => v.expectation_pauli(p),
            QuantumState::Mixed(r) => r.expectation_pauli(p),
        }
    }

    pub fn expectation_matrix(&self, op: &[Complex64]) -> Result<Complex64> {
        match self {
            QuantumState::Pure(v) => v.expectation_matrix(op),
            QuantumState::Mixed(r) => r.expectation_matrix(op),
        }
    }

    /// Materialize as a density operator (subject to the density cap).
    pub fn density(&self) -> Result<DensityOperator> {
        match self {
            QuantumState::Pure(v) => v.density(),
            QuantumState::Mixed(r) => Ok(r.clone()),
        }
    }

    /// Mix with white noise; the result is always `Mixed`.
    pub fn with_white_noise(&self, p: f64) -> Result<QuantumState> {
        Ok(QuantumState::Mixed(self.density()?.with_white_noise(p)?))
    }
}

fn check_vector_cap(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_VECTOR_QUBITS {
        return Err(Error::CapacityExceeded {
            requested: n_qubits,
            cap: MAX_VECTOR_QUBITS,
        });
    }
    Ok(())
}

fn check_density_cap(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
        return Err(Error::CapacityExceeded {
            requested: n_qubits,
            cap: MAX_DENSITY_QUBITS,
        });
    }
    Ok(())
}

/// The two-particle state entangled in all n degrees of freedom: a product of
/// Bell pairs (|00⟩+|11⟩)/√2 across (A_j, B_j), laid out per [`DofLayout`].
pub fn build_he_state(layout: &DofLayout) -> Result<StateVector> {
    let n = layout.n_dofs();
    check_vector_cap(2 * n)?;
    let dim = 1usize << (2 * n);
    let amp = c((0.5f64).powf(n as f64 / 2.0));
    let mut amps = vec![c(0.0); dim];
    for pattern in 0..1usize << n {
        let mut idx = 0usize;
        for j in 0..n {
            if pattern >> j & 1 != 0 {
                idx |= 0b11 << (2 * j);
            }
        }
        amps[idx] = amp;
    }
    Ok(StateVector {
        n_qubits: 2 * n,
        amps,
    })
}

/// |+⟩^⊗V followed by a CZ on every edge.
pub fn build_graph_state(graph: &GraphSpec) -> Result<StateVector> {
    let n = graph.n_vertices();
    check_vector_cap(n)?;
    let dim = 1usize << n;
    let amp = c((dim as f64).sqrt().recip());
    let mut state = StateVector {
        n_qubits: n,
        amps: vec![amp; dim],
    };
    for (a, b) in graph.edges() {
        state = state.apply_cz(a, b)?;
    }
    Ok(state)
}

/// |0⟩_{A1}|0⟩_{B1}|φ+⟩_{A2B2}: entangled in the second DOF only.
pub fn example_psi1() -> StateVector {
    let s = c(core::f64::consts::FRAC_1_SQRT_2);
    let mut amps = vec![c(0.0); 16];
    amps[0b0000] = s;
    amps[0b1100] = s;
    StateVector { n_qubits: 4, amps }
}

/// |φ+⟩_{A1B1}|0⟩_{A2}|0⟩_{B2}: entangled in the first DOF only.
pub fn example_psi2() -> StateVector {
    let s = c(core::f64::consts::FRAC_1_SQRT_2);
    let mut amps = vec![c(0.0); 16];
    amps[0b0000] = s;
    amps[0b0011] = s;
    StateVector { n_qubits: 4, amps }
}

/// Equal mixture of the two example kets: entangled in each DOF separately,
/// yet a mixture of states none of which is entangled in every DOF.
pub fn example_rho_prime() -> DensityOperator {
    let p1 = example_psi1().density().expect("within cap");
    let p2 = example_psi2().density().expect("within cap");
    DensityOperator::mixture(&[(0.5, p1), (0.5, p2)]).expect("weights are valid")
}
