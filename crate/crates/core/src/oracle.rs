//! Brute-force separability oracle for the product-overlap bound behind the
//! projector witness.
//!
//! For a pure state and a cut of its qubits into two groups, the largest
//! squared overlap with any product state across the cut is the squared top
//! singular value of the amplitude matrix reshaped along the cut. The bound
//! in question says: over every cut that separates the two particles in at
//! least one degree of freedom, that maximum is 1/2 for the canonical
//! hyperentangled state — each separated pair contributes a factor 1/2, and
//! the best cut separates exactly one pair.
//!
//! Two independent routes are provided: the exact SVD value, and a seeded
//! alternating-maximization search over product states (power iteration on
//! the reshaped matrix), which climbs monotonically and must land on the SVD
//! value from random starts.

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float supplies the f64 math in no_std builds; std test builds shadow it.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::largest_singular_value_sq;
use crate::pauli::DofLayout;
use crate::state::{build_he_state, deposit_bits, StateVector};

/// A two-sided cut of the qubits of a DOF layout. DOF `j` is always split:
/// its A qubit sits left, its B qubit right. Remaining qubits go anywhere.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bipartition {
    pub j: usize,
    pub left_mask: u64,
    pub right_mask: u64,
}

impl Bipartition {
    /// DOFs whose two qubits land on opposite sides (always ≥ 1).
    pub fn split_pair_count(&self, layout: &DofLayout) -> Result<usize> {
        let mut count = 0;
        for j in 1..=layout.n_dofs() {
            let a = self.left_mask >> layout.qubit_a(j)? & 1;
            let b = self.left_mask >> layout.qubit_b(j)? & 1;
            if a != b {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn label(&self, layout: &DofLayout) -> Result<String> {
        let side = |mask: u64| -> Result<String> {
            let mut parts = Vec::new();
            for q in 0..layout.n_qubits() {
                if mask >> q & 1 != 0 {
                    parts.push(layout.label(q)?);
                }
            }
            Ok(parts.join(","))
        };
        Ok(alloc::format!(
            "j={} left={} right={}",
            self.j,
            side(self.left_mask)?,
            side(self.right_mask)?
        ))
    }
}

/// All cuts with A_j left and B_j right, for every j and every placement of
/// the other qubits: n·2^(2n−2) entries.
pub fn enumerate_bipartitions(layout: &DofLayout) -> Result<Vec<Bipartition>> {
    let n = layout.n_dofs();
    let nq = layout.n_qubits();
    let full = (1u64 << nq) - 1;
    let mut out = Vec::new();
    for j in 1..=n {
        let a = layout.qubit_a(j)?;
        let b = layout.qubit_b(j)?;
        let rest_mask = full & !(1 << a) & !(1 << b);
        let rest_qubits: Vec<usize> = (0..nq).filter(|q| rest_mask >> q & 1 != 0).collect();
        for assign in 0..1u64 << rest_qubits.len() {
            let mut left = 1u64 << a;
            for (i, &q) in rest_qubits.iter().enumerate() {
                if assign >> i & 1 != 0 {
                    left |= 1 << q;
                }
            }
            out.push(Bipartition {
                j,
                left_mask: left,
                right_mask: full & !left,
            });
        }
    }
    Ok(out)
}

fn check_cut(state: &StateVector, left_mask: u64) -> Result<u64> {
    let nq = state.n_qubits();
    let full = (1u64 << nq) - 1;
    if left_mask & !full != 0 {
        return Err(Error::InvalidBipartition(alloc::format!(
            "mask {left_mask:#b} addresses qubits beyond {nq}"
        )));
    }
    if left_mask == 0 || left_mask == full {
        return Err(Error::InvalidBipartition(String::from(
            "both sides of a cut must be non-empty",
        )));
    }
    Ok(full)
}

fn reshape(state: &StateVector, row_mask: u64, col_mask: u64) -> Vec<Complex64> {
    let rows = 1usize << row_mask.count_ones();
    let cols = 1usize << col_mask.count_ones();
    let amps = state.amplitudes();
    let mut m = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let rbits = deposit_bits(r as u64, row_mask);
        for c in 0..cols {
            m.push(amps[(rbits | deposit_bits(c as u64, col_mask)) as usize]);
        }
    }
    m
}

/// Exact max of |⟨state|φ_left ⊗ φ_right⟩|² over product states across the
/// cut, via the squared top singular value of the reshaped amplitudes.
pub fn max_product_overlap_sq(state: &StateVector, left_mask: u64) -> Result<f64> {
    let full = check_cut(state, left_mask)?;
    let right_mask = full & !left_mask;
    // Gram work scales with the column side; point it at the smaller group.
    let (row_mask, col_mask) = if left_mask.count_ones() >= right_mask.count_ones() {
        (left_mask, right_mask)
    } else {
        (right_mask, left_mask)
    };
    let m = reshape(state, row_mask, col_mask);
    largest_singular_value_sq(
        &m,
        1 << row_mask.count_ones(),
        1 << col_mask.count_ones(),
    )
}

#[derive(Clone, PartialEq, Debug)]
pub struct PartitionReport {
    pub partition: Bipartition,
    pub split_pairs: usize,
    pub overlap_sq: f64,
    /// Closed form for the canonical state: (1/2)^split_pairs.
    pub predicted: f64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct BoundScan {
    pub n_dofs: usize,
    pub reports: Vec<PartitionReport>,
    pub family_max: f64,
    pub bound: f64,
}

/// Evaluate every enumerated cut of the n-DOF hyperentangled state.
pub fn scan_separability_bound(n_dofs: usize) -> Result<BoundScan> {
    let layout = DofLayout::new(n_dofs)?;
    let state = build_he_state(&layout)?;
    let mut reports = Vec::new();
    let mut family_max = 0.0f64;
    for partition in enumerate_bipartitions(&layout)? {
        let overlap_sq = max_product_overlap_sq(&state, partition.left_mask)?;
        let split_pairs = partition.split_pair_count(&layout)?;
        family_max = family_max.max(overlap_sq);
        reports.push(PartitionReport {
            partition,
            split_pairs,
            overlap_sq,
            predicted: (0.5f64).powi(split_pairs as i32),
        });
    }
    Ok(BoundScan {
        n_dofs,
        reports,
        family_max,
        bound: 0.5,
    })
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SearchOutcome {
    pub best: f64,
    pub restarts: u64,
    pub total_iterations: u64,
}

const SEARCH_TOL: f64 = 1e-13;
const SEARCH_ITER_CAP: u64 = 10_000;

/// Stochastic check of the same maximum: alternating maximization over the
/// two product factors from random starts. Each sweep is one power-iteration
/// step on the reshaped matrix, so the overlap climbs monotonically toward
/// the top squared singular value.
pub fn search_product_overlap(
    state: &StateVector,
    left_mask: u64,
    restarts: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    if restarts == 0 {
        return Err(Error::ZeroRestarts);
    }
    let full = check_cut(state, left_mask)?;
    let right_mask = full & !left_mask;
    let m = reshape(state, left_mask, right_mask);
    let rows = 1usize << left_mask.count_ones();
    let cols = 1usize << right_mask.count_ones();

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut total_iterations = 0u64;
    for _ in 0..restarts {
        let mut v = random_unit(cols, &mut rng);
        let mut prev = -1.0f64;
        for _ in 0..SEARCH_ITER_CAP {
            total_iterations += 1;
            // Optimal left factor for fixed right factor: u ∝ M v.
            let mut u = alloc::vec![Complex64::new(0.0, 0.0); rows];
            for r in 0..rows {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..cols {
                    acc += m[r * cols + c] * v[c];
                }
                u[r] = acc;
            }
            let value: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            if value <= prev + SEARCH_TOL {
                prev = value.max(prev);
                break;
            }
            prev = value;
            // Optimal right factor for fixed left factor: v ∝ M† u.
            let mut w = alloc::vec![Complex64::new(0.0, 0.0); cols];
            for c in 0..cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..rows {
                    acc += m[r * cols + c].conj() * u[r];
                }
                w[c] = acc;
            }
            let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            for z in w.iter_mut() {
                *z /= norm;
            }
            v = w;
        }
        best = best.max(prev);
    }
    Ok(SearchOutcome {
        best,
        restarts,
        total_iterations,
    })
}

fn random_unit(dim: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Comparison point for the qudit encoding: cutting the canonical state
/// between the two particles (all A qubits | all B qubits) leaves 2ⁿ equal
/// Schmidt coefficients, so the product overlap drops to 1/2ⁿ.
pub fn qudit_particle_overlap_sq(n_dofs: usize) -> Result<f64> {
    let layout = DofLayout::new(n_dofs)?;
    let state = build_he_state(&layout)?;
    let mut a_mask = 0u64;
    for j in 1..=n_dofs {
        a_mask |= 1 << layout.qubit_a(j)?;
    }
    max_product_overlap_sq(&state, a_mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_count_and_shape() {
        for n in 1..=3usize {
            let layout = DofLayout::new(n).unwrap();
            let cuts = enumerate_bipartitions(&layout).unwrap();
            assert_eq!(cuts.len(), n << (2 * n - 2));
            let full = (1u64 << (2 * n)) - 1;
            for cut in &cuts {
                assert_eq!(cut.left_mask | cut.right_mask, full);
                assert_eq!(cut.left_mask & cut.right_mask, 0);
                let a = layout.qubit_a(cut.j).unwrap();
                let b = layout.qubit_b(cut.j).unwrap();
                assert_eq!(cut.left_mask >> a & 1, 1);
                assert_eq!(cut.right_mask >> b & 1, 1);
                assert!(cut.split_pair_count(&layout).unwrap() >= 1);
            }
        }
    }

    #[test]
    fn per_partition_overlap_matches_closed_form() {
        for n in 1..=3usize {
            let scan = scan_separability_bound(n).unwrap();
            for report in &scan.reports {
                assert!(
                    (report.overlap_sq - report.predicted).abs() < 1e-12,
                    "n={n} {:?}: {} vs {}",
                    report.partition,
                    report.overlap_sq,
                    report.predicted
                );
            }
            assert!((scan.family_max - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn search_agrees_with_svd_and_never_exceeds_it() {
        let layout = DofLayout::new(2).unwrap();
        let state = build_he_state(&layout).unwrap();
        for cut in enumerate_bipartitions(&layout).unwrap() {
            let svd = max_product_overlap_sq(&state, cut.left_mask).unwrap();
            let found = search_product_overlap(&state, cut.left_mask, 10, 1234).unwrap();
            assert!(found.best <= svd + 1e-9, "{:?}", cut);
            assert!((found.best - svd).abs() < 1e-6, "{:?}: {} vs {svd}", cut, found.best);
        }
    }

    #[test]
    fn qudit_cut_is_stricter() {
        for n in 1..=3usize {
            let got = qudit_particle_overlap_sq(n).unwrap();
            let expected = (0.5f64).powi(n as i32);
            assert!((got - expected).abs() < 1e-9, "n={n}: {got}");
        }
    }

    #[test]
    fn cut_validation() {
        let state = build_he_state(&DofLayout::new(1).unwrap()).unwrap();
        assert!(matches!(
            max_product_overlap_sq(&state, 0),
            Err(Error::InvalidBipartition(_))
        ));
        assert!(matches!(
            max_product_overlap_sq(&state, 0b11),
            Err(Error::InvalidBipartition(_))
        ));
        assert!(matches!(
            max_product_overlap_sq(&state, 0b100),
            Err(Error::InvalidBipartition(_))
        ));
        assert!(matches!(
            search_product_overlap(&state, 0b1, 0, 0),
            Err(Error::ZeroRestarts)
        ));
    }

    #[test]
    fn labels_read_naturally() {
        let layout = DofLayout::new(2).unwrap();
        let cut = Bipartition {
            j: 1,
            left_mask: 0b0101,
            right_mask: 0b1010,
        };
        assert_eq!(cut.label(&layout).unwrap(), "j=1 left=A1,A2 right=B1,B2");
        assert_eq!(cut.split_pair_count(&layout).unwrap(), 2);
    }
}
