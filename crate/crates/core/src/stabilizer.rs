//! Stabilizer generators, destabilizers, and the joint eigenbasis they
//! induce, for the two systems the witnesses are built on.
//!
//! Hyperentangled system with n DOFs (N = 2n generators, 1-based index k):
//! odd k = 2j-1 gives X_{A_j}X_{B_j}, even k = 2j gives Z_{A_j}Z_{B_j}.
//! Graph system on V vertices: S_k = X_k · Π_{j∼k} Z_j.
//!
//! Each generator S_k is paired with a destabilizer D_k that anticommutes
//! with S_k and commutes with every other generator, so the state
//! D_1^{s_1}···D_N^{s_N}|base⟩ is the joint eigenvector with eigenvalue
//! (-1)^{s_k} under S_k. Bit k-1 of the `u64` syndrome s holds s_k.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::pauli::{DofLayout, PauliString};
use crate::state::{build_graph_state, build_he_state, StateVector};

#[derive(Clone, PartialEq, Debug)]
pub enum SystemSpec {
    HyperEntangled { layout: DofLayout },
    Graph { graph: GraphSpec },
}

impl SystemSpec {
    pub fn he(n_dofs: usize) -> Result<SystemSpec> {
        Ok(SystemSpec::HyperEntangled {
            layout: DofLayout::new(n_dofs)?,
        })
    }

    pub fn graph(graph: GraphSpec) -> SystemSpec {
        SystemSpec::Graph { graph }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            SystemSpec::HyperEntangled { layout } => layout.n_qubits(),
            SystemSpec::Graph { graph } => graph.n_vertices(),
        }
    }

    /// Number of stabilizer generators; equals the qubit count.
    pub fn n_generators(&self) -> usize {
        self.n_qubits()
    }

    pub fn layout(&self) -> Option<&DofLayout> {
        match self {
            SystemSpec::HyperEntangled { layout } => Some(layout),
            SystemSpec::Graph { .. } => None,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct StabilizerSet {
    system: SystemSpec,
    generators: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

impl StabilizerSet {
    pub fn new(system: SystemSpec) -> Result<StabilizerSet> {
        let (generators, destabilizers) = match &system {
            SystemSpec::HyperEntangled { layout } => he_pairs(layout)?,
            SystemSpec::Graph { graph } => graph_pairs(graph)?,
        };
        Ok(StabilizerSet {
            system,
            generators,
            destabilizers,
        })
    }

    pub fn for_he(n_dofs: usize) -> Result<StabilizerSet> {
        StabilizerSet::new(SystemSpec::he(n_dofs)?)
    }

    pub fn for_graph(graph: GraphSpec) -> Result<StabilizerSet> {
        StabilizerSet::new(SystemSpec::graph(graph))
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn n_qubits(&self) -> usize {
        self.system.n_qubits()
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    /// 1-based access matching the S_k numbering.
    pub fn generator(&self, k: usize) -> Result<&PauliString> {
        self.generators
            .get(k.wrapping_sub(1))
            .ok_or(Error::DofIndexOutOfRange {
                j: k,
                n_dofs: self.generators.len(),
            })
    }

    /// Π_{k∈subset} S_k with exact phase, k ascending; bit k-1 selects S_k.
    pub fn subset_product(&self, subset: u64) -> Result<PauliString> {
        if subset >> self.generators.len() != 0 {
            return Err(Error::DofIndexOutOfRange {
                j: 64 - subset.leading_zeros() as usize,
                n_dofs: self.generators.len(),
            });
        }
        let mut acc = PauliString::identity(self.n_qubits())?;
        for (i, g) in self.generators.iter().enumerate() {
            if subset >> i & 1 != 0 {
                acc = acc.multiply(g)?;
            }
        }
        Ok(acc)
    }

    /// The +1 joint eigenstate (syndrome 0), subject to the dense cap.
    pub fn base_state(&self) -> Result<StateVector> {
        match &self.system {
            SystemSpec::HyperEntangled { layout } => build_he_state(layout),
            SystemSpec::Graph { graph } => build_graph_state(graph),
        }
    }

    /// Joint eigenvector with S_k eigenvalue (-1)^{s_k}, built by applying
    /// destabilizers (highest k first) to the base state. Global phase is a
    /// fixed artifact of that order.
    pub fn basis_state(&self, syndrome: u64) -> Result<StateVector> {
        if syndrome >> self.generators.len() != 0 {
            return Err(Error::DofIndexOutOfRange {
                j: 64 - syndrome.leading_zeros() as usize,
                n_dofs: self.generators.len(),
            });
        }
        let mut state = self.base_state()?;
        for k in (0..self.destabilizers.len()).rev() {
            if syndrome >> k & 1 != 0 {
                state = state.apply_pauli(&self.destabilizers[k])?;
            }
        }
        Ok(state)
    }

    /// ⟨s|S_k|s⟩ for every generator, as exact ±1 integers.
    pub fn syndrome_of_state(&self, state: &StateVector) -> Result<Vec<i8>> {
        self.generators
            .iter()
            .map(|g| {
                let v: Complex64 = state.expectation_pauli(g)?;
                Ok(if v.re >= 0.0 { 0 } else { 1 })
            })
            .collect()
    }
}

fn he_pairs(layout: &DofLayout) -> Result<(Vec<PauliString>, Vec<PauliString>)> {
    let nq = layout.n_qubits();
    let mut gens = Vec::with_capacity(nq);
    let mut destabs = Vec::with_capacity(nq);
    for j in 1..=layout.n_dofs() {
        let a = layout.qubit_a(j)?;
        let b = layout.qubit_b(j)?;
        let pair = (1u64 << a) | (1u64 << b);
        // S_{2j-1} = XX with destabilizer Z_{A_j}; S_{2j} = ZZ with X_{A_j}.
        gens.push(PauliString::x_on(nq, pair)?);
        destabs.push(PauliString::z(nq, a)?);
        gens.push(PauliString::z_on(nq, pair)?);
        destabs.push(PauliString::x(nq, a)?);
    }
    Ok((gens, destabs))
}

fn graph_pairs(graph: &GraphSpec) -> Result<(Vec<PauliString>, Vec<PauliString>)> {
    let nq = graph.n_vertices();
    let mut gens = Vec::with_capacity(nq);
    let mut destabs = Vec::with_capacity(nq);
    for v in 0..nq {
        let x = PauliString::x(nq, v)?;
        let z_part = PauliString::z_on(nq, graph.neighbors(v)?)?;
        gens.push(x.multiply(&z_part)?);
        destabs.push(PauliString::z(nq, v)?);
    }
    Ok((gens, destabs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;

    fn check_pairing(set: &StabilizerSet) {
        let n = set.n_generators();
        for k in 0..n {
            for l in 0..n {
                let g = &set.generators()[l];
                let d = &set.destabilizers()[k];
                let expect = k != l;
                assert_eq!(
                    d.commutes(g).unwrap(),
                    expect,
                    "destabilizer {k} vs generator {l}"
                );
            }
            assert!(set.generators()[k].is_hermitian());
        }
        for k in 0..n {
            for l in k + 1..n {
                assert!(set.generators()[k].commutes(&set.generators()[l]).unwrap());
            }
        }
    }

    /// GF(2) rank of the N×2N symplectic matrix of the generators.
    fn symplectic_rank(set: &StabilizerSet) -> usize {
        let mut rows: Vec<u128> = set
            .generators()
            .iter()
            .map(|g| (g.x_mask() as u128) << 64 | g.z_mask() as u128)
            .collect();
        let mut rank = 0;
        for bit in (0..128).rev() {
            if let Some(pos) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) {
                rows.swap(rank, pos);
                for r in 0..rows.len() {
                    if r != rank && rows[r] >> bit & 1 == 1 {
                        rows[r] ^= rows[rank];
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn he_generator_shapes() {
        let set = StabilizerSet::for_he(2).unwrap();
        let shown: Vec<String> = set.generators().iter().map(|g| format!("{g}")).collect();
        assert_eq!(shown, ["XXII", "ZZII", "IIXX", "IIZZ"]);
        check_pairing(&set);
        assert_eq!(symplectic_rank(&set), 4);
    }

    #[test]
    fn graph_generator_shapes() {
        let set = StabilizerSet::for_graph(GraphSpec::path(3).unwrap()).unwrap();
        let shown: Vec<String> = set.generators().iter().map(|g| format!("{g}")).collect();
        assert_eq!(shown, ["XZI", "ZXZ", "IZX"]);
        check_pairing(&set);
        assert_eq!(symplectic_rank(&set), 3);

        let ring = StabilizerSet::for_graph(GraphSpec::ring(5).unwrap()).unwrap();
        check_pairing(&ring);
        assert_eq!(symplectic_rank(&ring), 5);
    }

    #[test]
    fn base_state_is_stabilized() {
        for set in [
            StabilizerSet::for_he(2).unwrap(),
            StabilizerSet::for_graph(GraphSpec::star(4).unwrap()).unwrap(),
            StabilizerSet::for_graph(GraphSpec::ring(4).unwrap()).unwrap(),
        ] {
            let base = set.base_state().unwrap();
            for g in set.generators() {
                let v = base.expectation_pauli(g).unwrap();
                assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_states_carry_the_right_signs() {
        let set = StabilizerSet::for_he(2).unwrap();
        for syndrome in 0..16u64 {
            let state = set.basis_state(syndrome).unwrap();
            for (k, g) in set.generators().iter().enumerate() {
                let v = state.expectation_pauli(g).unwrap();
                let expect = if syndrome >> k & 1 == 0 { 1.0 } else { -1.0 };
                assert!(
                    (v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12,
                    "syndrome {syndrome:04b}, generator {}",
                    k + 1
                );
            }
        }
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let set = StabilizerSet::for_graph(GraphSpec::path(3).unwrap()).unwrap();
        let states: Vec<_> = (0..8u64).map(|s| set.basis_state(s).unwrap()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let ov = a.inner(b).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ov.norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subset_products_commute_and_square_to_identity() {
        let set = StabilizerSet::for_he(2).unwrap();
        for subset in 0..16u64 {
            let p = set.subset_product(subset).unwrap();
            assert!(p.is_hermitian());
            let sq = p.multiply(&p).unwrap();
            assert!(sq.is_identity(), "subset {subset:04b} squared");
            // Non-empty subsets are non-identity: generator independence.
            if subset != 0 {
                assert!(p.support() != 0);
            }
        }
        assert!(set.subset_product(1 << 4).is_err());
    }

    #[test]
    fn syndrome_read_back() {
        let set = StabilizerSet::for_graph(GraphSpec::ring(4).unwrap()).unwrap();
        for syndrome in [0u64, 0b0101, 0b1111, 0b0010] {
            let state = set.basis_state(syndrome).unwrap();
            let bits = set.syndrome_of_state(&state).unwrap();
            for (k, &b) in bits.iter().enumerate() {
                assert_eq!(b as u64, syndrome >> k & 1);
            }
        }
    }
}
