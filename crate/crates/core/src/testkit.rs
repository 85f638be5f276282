//! Dense brute-force helpers shared by unit tests. Everything here is built
//! from 2x2 literals and naive loops, independent of the bitmask code paths
//! it is used to check.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub const PAULI_CHARS: &[char] = &['I', 'X', 'Y', 'Z'];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single_pauli(which: char) -> Vec<Complex64> {
    match which {
        'I' => vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        'X' => vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        'Y' => vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        'Z' => vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        _ => panic!("unknown Pauli letter {which}"),
    }
}

/// Kronecker product of square row-major matrices.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let na = isqrt(a.len());
    let nb = isqrt(b.len());
    let n = na * nb;
    let mut out = vec![c(0.0, 0.0); n * n];
    for ia in 0..na {
        for ja in 0..na {
            for ib in 0..nb {
                for jb in 0..nb {
                    out[(ia * nb + ib) * n + (ja * nb + jb)] = a[ia * na + ja] * b[ib * nb + jb];
                }
            }
        }
    }
    out
}

pub fn mat_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub fn mat_approx_eq(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn vec_approx_eq(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    mat_approx_eq(a, b, tol)
}

/// Outer product |v⟩⟨v| as a dense row-major matrix.
pub fn outer(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = v[i] * v[j].conj();
        }
    }
    out
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    assert_eq!(r * r, n, "matrix is not square");
    r
}
