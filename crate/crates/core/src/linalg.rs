//! Small dense Hermitian eigensolver and singular-value helpers.
//!
//! Cyclic Jacobi with complex rotations: each sweep zeroes every off-diagonal
//! pair (p,q) with a phase factor absorbing arg(A[p][q]) followed by a real
//! rotation. Off-diagonal mass is strictly decreasing, so a few sweeps reach
//! machine precision. Everything here runs on matrices of dimension at most
//! [`DENSE_EIG_CAP`]; callers needing spectra of larger operators must use an
//! exact diagonal form instead.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Float supplies the f64 math in no_std builds; std test builds shadow it.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest matrix dimension the Jacobi routines accept.
pub const DENSE_EIG_CAP: usize = 1024;

const MAX_SWEEPS: usize = 60;

/// Max |A[i][j] - conj(A[j][i])| over all pairs, scaled by the largest entry.
pub fn hermiticity_defect(a: &[Complex64], n: usize) -> f64 {
    let scale = a.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[i * n + j] - a[j * n + i].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst / scale
}

pub fn is_hermitian(a: &[Complex64], n: usize, tol: f64) -> bool {
    hermiticity_defect(a, n) <= tol
}

/// Eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(a: &[Complex64], n: usize) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a, n)?.0)
}

/// Eigenvalues (ascending) and a unitary whose columns are the matching
/// eigenvectors, row-major: A·V = V·diag(λ).
pub fn hermitian_eigen(a: &[Complex64], n: usize) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: n * n,
        });
    }
    if n > DENSE_EIG_CAP {
        return Err(Error::CapacityExceeded {
            requested: n,
            cap: DENSE_EIG_CAP,
        });
    }
    if !is_hermitian(a, n, 1e-9) {
        return Err(Error::ConsistencyFailure(alloc::format!(
            "eigensolver input is not Hermitian (defect {:.3e})",
            hermiticity_defect(a, n)
        )));
    }

    let mut m = a.to_vec();
    // Symmetrize exactly so rounding in the input cannot bias the iteration.
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = avg;
            m[j * n + i] = avg.conj();
        }
        m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
    }
    let mut v = identity(n);
    let scale = m.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
    let stop = 1e-14 * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_max(&m, n) <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m[p * n + q];
                if b.norm() <= stop {
                    continue;
                }
                rotate(&mut m, &mut v, n, p, q, b);
            }
        }
    }
    if off_diagonal_max(&m, n) > 1e-10 * scale {
        return Err(Error::ConsistencyFailure(alloc::string::String::from(
            "Jacobi eigensolver did not converge",
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.partial_cmp(&m[j * n + j].re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok((eigenvalues, vectors))
}

/// One Jacobi rotation zeroing the (p,q) entry. With b = |b|e^{iβ}, the
/// similarity uses V = diag(1, e^{-iβ})·R(θ) on the (p,q) plane, where
/// cot(2θ) = (A[q][q]-A[p][p])/(2|b|).
fn rotate(m: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize, b: Complex64) {
    let abs_b = b.norm();
    let phase = b / abs_b; // e^{iβ}
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let zeta = (aqq - app) / (2.0 * abs_b);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (zeta * zeta + 1.0).sqrt())
    } else {
        -1.0 / (-zeta + (zeta * zeta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_conj_phase = s * phase.conj();
    let s_phase = s * phase;

    // Column update A·V ...
    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = akp * c - akq * s_conj_phase;
        m[k * n + q] = akp * s + akq * (phase.conj() * c);
    }
    // ... then row update V†·A.
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = apk * c - aqk * s_phase;
        m[q * n + k] = apk * s + aqk * (phase * c);
    }
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
    m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
    m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * s_conj_phase;
        v[k * n + q] = vkp * s + vkq * (phase.conj() * c);
    }
}

fn off_diagonal_max(m: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(m[i * n + j].norm());
        }
    }
    worst
}

fn identity(n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    v
}

/// Square of the largest singular value of a rows×cols row-major matrix,
/// computed as the top eigenvalue of the Gram matrix M†M.
pub fn largest_singular_value_sq(m: &[Complex64], rows: usize, cols: usize) -> Result<f64> {
    if m.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            left: m.len(),
            right: rows * cols,
        });
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in i..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                acc += m[k * cols + i].conj() * m[k * cols + j];
            }
            gram[i * cols + j] = acc;
            gram[j * cols + i] = acc.conj();
        }
    }
    let eigenvalues = hermitian_eigenvalues(&gram, cols)?;
    Ok(eigenvalues.last().copied().unwrap_or(0.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_hermitian(rng: &mut ChaCha20Rng, n: usize) -> Vec<Complex64> {
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, 0.0);
            for j in i + 1..n {
                let v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                a[i * n + j] = v;
                a[j * n + i] = v.conj();
            }
        }
        a
    }

    #[test]
    fn two_by_two_analytic() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
        ];
        let eig = hermitian_eigenvalues(&a, 2).unwrap();
        assert!((eig[0] - 0.0).abs() < 1e-12);
        assert!((eig[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenpairs_reconstruct_random_matrices() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for &n in &[1usize, 2, 3, 5, 8, 16, 24] {
            let a = random_hermitian(&mut rng, n);
            let (eig, v) = hermitian_eigen(&a, n).unwrap();
            assert!(eig.windows(2).all(|w| w[0] <= w[1] + 1e-12));
            // V†V = I
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += v[k * n + i].conj() * v[k * n + j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((acc - expect).norm() < 1e-10, "V not unitary at n={n}");
                }
            }
            // A·V = V·diag(eig)
            for col in 0..n {
                for row in 0..n {
                    let mut av = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        av += a[row * n + k] * v[k * n + col];
                    }
                    let vd = v[row * n + col] * eig[col];
                    assert!((av - vd).norm() < 1e-9, "bad eigenpair at n={n}");
                }
            }
        }
    }

    #[test]
    fn trace_invariants() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let n = 12;
        let a = random_hermitian(&mut rng, n);
        let eig = hermitian_eigenvalues(&a, n).unwrap();
        let tr: f64 = (0..n).map(|i| a[i * n + i].re).sum();
        let tr2: f64 = (0..n * n).map(|i| a[i].norm_sqr()).sum();
        assert!((eig.iter().sum::<f64>() - tr).abs() < 1e-10);
        assert!((eig.iter().map(|e| e * e).sum::<f64>() - tr2).abs() < 1e-9);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        assert!(hermitian_eigenvalues(&a, 2).is_err());
    }

    #[test]
    fn singular_value_against_power_iteration() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for &(rows, cols) in &[(2usize, 2usize), (6, 4), (4, 8), (16, 16)] {
            let m: Vec<Complex64> = (0..rows * cols)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let got = largest_singular_value_sq(&m, rows, cols).unwrap();

            // Independent estimate: power iteration on M†M.
            let mut x: Vec<Complex64> = (0..cols)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let mut lambda = 0.0f64;
            for _ in 0..500 {
                let mut y = vec![Complex64::new(0.0, 0.0); rows];
                for r in 0..rows {
                    for c in 0..cols {
                        y[r] += m[r * cols + c] * x[c];
                    }
                }
                let mut z = vec![Complex64::new(0.0, 0.0); cols];
                for c in 0..cols {
                    for r in 0..rows {
                        z[c] += m[r * cols + c].conj() * y[r];
                    }
                }
                let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                lambda = norm;
                for v in z.iter_mut() {
                    *v /= norm;
                }
                x = z;
            }
            assert!(
                (got - lambda).abs() < 1e-6 * lambda.max(1.0),
                "σ² mismatch {got} vs {lambda}"
            );
        }
    }

    #[test]
    fn rank_one_reshape() {
        // |00⟩+|11⟩ (unnormalized) reshaped 2x2 has σ² = 1; the normalized
        // Bell state gives 1/2, matching its largest Schmidt coefficient².
        let m = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!((largest_singular_value_sq(&m, 2, 2).unwrap() - 1.0).abs() < 1e-12);
        let half: Vec<Complex64> = m
            .iter()
            .map(|v| v * core::f64::consts::FRAC_1_SQRT_2)
            .collect();
        assert!((largest_singular_value_sq(&half, 2, 2).unwrap() - 0.5).abs() < 1e-12);
    }
}
