//! Simple undirected graphs on up to 62 vertices, used to define graph states.
//!
//! Vertices are `0..n`; adjacency is kept as one bitmask per vertex so
//! stabilizer construction can read a neighborhood in O(1).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::MAX_QUBITS;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphSpec {
    n_vertices: usize,
    adjacency: Vec<u64>,
}

impl GraphSpec {
    /// Build from an edge list. Self-loops and out-of-range vertices are
    /// rejected; duplicate edges collapse.
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<GraphSpec> {
        if n_vertices == 0 || n_vertices > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange {
                requested: n_vertices,
                max: MAX_QUBITS,
            });
        }
        let mut adjacency = alloc::vec![0u64; n_vertices];
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(alloc::format!("self-loop at vertex {a}")));
            }
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvalidGraph(alloc::format!(
                    "edge {a}-{b} exceeds vertex count {n_vertices}"
                )));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        Ok(GraphSpec {
            n_vertices,
            adjacency,
        })
    }

    /// Path 0-1-2-...-(n-1).
    pub fn path(n: usize) -> Result<GraphSpec> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        GraphSpec::new(n, &edges)
    }

    /// Star with center 0 and leaves 1..n.
    pub fn star(n: usize) -> Result<GraphSpec> {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        GraphSpec::new(n, &edges)
    }

    /// Cycle 0-1-...-(n-1)-0; needs at least three vertices.
    pub fn ring(n: usize) -> Result<GraphSpec> {
        if n < 3 {
            return Err(Error::InvalidGraph(alloc::format!(
                "ring needs at least 3 vertices, got {n}"
            )));
        }
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((n - 1, 0));
        GraphSpec::new(n, &edges)
    }

    /// n disjoint edges (2j, 2j+1) on 2n vertices: the graph whose state is
    /// local-unitary equivalent to the two-particle hyperentangled state with
    /// n degrees of freedom.
    pub fn disjoint_pairs(n_pairs: usize) -> Result<GraphSpec> {
        if n_pairs == 0 {
            return Err(Error::InvalidGraph(String::from("need at least one pair")));
        }
        let edges: Vec<_> = (0..n_pairs).map(|j| (2 * j, 2 * j + 1)).collect();
        GraphSpec::new(2 * n_pairs, &edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Neighbor set of `v` as a bitmask.
    pub fn neighbors(&self, v: usize) -> Result<u64> {
        self.adjacency
            .get(v)
            .copied()
            .ok_or(Error::QubitCountOutOfRange {
                requested: v + 1,
                max: self.n_vertices,
            })
    }

    pub fn degree(&self, v: usize) -> Result<u32> {
        Ok(self.neighbors(v)?.count_ones())
    }

    /// Canonical sorted edge list with a < b.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n_vertices {
            let mut rest = self.adjacency[a] >> (a + 1) << (a + 1);
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                out.push((a, b));
                rest &= rest - 1;
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Breadth-first reachability from vertex 0.
    pub fn is_connected(&self) -> bool {
        let mut visited = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut rest = frontier;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                next |= self.adjacency[v];
                rest &= rest - 1;
            }
            frontier = next & !visited;
            visited |= next;
        }
        visited.count_ones() as usize == self.n_vertices
    }
}

impl fmt::Display for GraphSpec {
    /// Edge-list form "0-1,1-2"; an edgeless graph shows its vertex count.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return write!(f, "n{}", self.n_vertices);
        }
        for (i, (a, b)) in edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    /// Parse "0-1,1-2,2-3"; the vertex count is one past the highest vertex
    /// mentioned. "n5" denotes five isolated vertices.
    fn from_str(s: &str) -> Result<GraphSpec> {
        let err = || Error::Parse {
            what: "graph edge list",
            input: String::from(s),
        };
        if let Some(count) = s.strip_prefix('n') {
            let n: usize = count.parse().map_err(|_| err())?;
            return GraphSpec::new(n, &[]);
        }
        let mut edges = Vec::new();
        let mut max_vertex = 0usize;
        for part in s.split(',') {
            let (a, b) = part.trim().split_once('-').ok_or_else(err)?;
            let a: usize = a.trim().parse().map_err(|_| err())?;
            let b: usize = b.trim().parse().map_err(|_| err())?;
            max_vertex = max_vertex.max(a).max(b);
            edges.push((a, b));
        }
        if edges.is_empty() {
            return Err(err());
        }
        GraphSpec::new(max_vertex + 1, &edges)
    }
}
