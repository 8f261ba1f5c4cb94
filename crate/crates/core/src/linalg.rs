//! Small dense linear-algebra helpers shared by smoothing and clustering.
//!
//! Everything here targets the modest, structured problems of this crate:
//! SPD solves up to a few dozen unknowns, symmetric eigenproblems of
//! feature-space size, and leading-eigenpair extraction by (block) power
//! iteration for the larger grid-space operators. Matrices are row-major
//! `Vec<F>` slabs.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// In-place Cholesky factorization of a row-major SPD matrix; returns the
/// lower factor `L` with `A = L L^T`.
pub fn cholesky<F: Real>(a: &[F], dim: usize) -> Result<Vec<F>> {
    debug_assert_eq!(a.len(), dim * dim);
    let mut l = vec![F::zero(); dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = a[i * dim + j];
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= F::zero() {
                    return Err(Error::Numerical(format!(
                        "non-positive pivot {sum} at row {i} during Cholesky"
                    )));
                }
                l[i * dim + j] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L y = b` (forward substitution) for lower-triangular `L`.
pub fn forward_substitute<F: Real>(l: &[F], dim: usize, b: &[F]) -> Vec<F> {
    let mut y = vec![F::zero(); dim];
    for i in 0..dim {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * dim + k] * y[k];
        }
        y[i] = sum / l[i * dim + i];
    }
    y
}

/// Solves `L^T x = y` (back substitution) for lower-triangular `L`.
pub fn back_substitute_transposed<F: Real>(l: &[F], dim: usize, y: &[F]) -> Vec<F> {
    let mut x = vec![F::zero(); dim];
    for i in (0..dim).rev() {
        let mut sum = y[i];
        for k in i + 1..dim {
            sum -= l[k * dim + i] * x[k];
        }
        x[i] = sum / l[i * dim + i];
    }
    x
}

/// Solves `A x = b` given the Cholesky factor of `A`.
pub fn cholesky_solve<F: Real>(l: &[F], dim: usize, b: &[F]) -> Vec<F> {
    let y = forward_substitute(l, dim, b);
    back_substitute_transposed(l, dim, &y)
}

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi.
///
/// Returns `(eigenvalues, eigenvectors)` sorted by descending eigenvalue;
/// eigenvectors are the rows of the returned matrix.
pub fn jacobi_eigen<F: Real>(a: &[F], dim: usize) -> Result<(Vec<F>, Vec<F>)> {
    debug_assert_eq!(a.len(), dim * dim);
    let mut m = a.to_vec();
    // v starts as identity; accumulates rotations columnwise.
    let mut v = vec![F::zero(); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = F::one();
    }

    let eps = F::epsilon() * F::of(64.0);
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = F::zero();
        for i in 0..dim {
            for j in i + 1..dim {
                off += m[i * dim + j] * m[i * dim + j];
            }
        }
        let scale: F = (0..dim).map(|i| m[i * dim + i].abs()).sum::<F>() + F::one();
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = m[p * dim + q];
                if apq.abs() <= eps * scale * F::of(1e-3) {
                    continue;
                }
                let app = m[p * dim + p];
                let aqq = m[q * dim + q];
                let theta = (aqq - app) / (F::of(2.0) * apq);
                let t = {
                    let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                    sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;

                for k in 0..dim {
                    let mkp = m[k * dim + p];
                    let mkq = m[k * dim + q];
                    m[k * dim + p] = c * mkp - s * mkq;
                    m[k * dim + q] = s * mkp + c * mkq;
                }
                for k in 0..dim {
                    let mpk = m[p * dim + k];
                    let mqk = m[q * dim + k];
                    m[p * dim + k] = c * mpk - s * mqk;
                    m[q * dim + k] = s * mpk + c * mqk;
                }
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        m[j * dim + j]
            .partial_cmp(&m[i * dim + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<F> = order.iter().map(|&i| m[i * dim + i]).collect();
    let mut eigenvectors = vec![F::zero(); dim * dim];
    for (row, &col) in order.iter().enumerate() {
        for k in 0..dim {
            eigenvectors[row * dim + k] = v[k * dim + col];
        }
    }
    Ok((eigenvalues, eigenvectors))
}

/// Largest eigenvalue of a symmetric positive semidefinite operator given
/// through its matvec, by power iteration with a deterministic start.
pub fn power_iteration_largest<F: Real>(
    dim: usize,
    mut matvec: impl FnMut(&[F], &mut [F]),
    max_iter: usize,
    tol: F,
) -> Result<F> {
    let mut v = deterministic_unit_vector::<F>(dim, 0x9E3779B97F4A7C15);
    let mut w = vec![F::zero(); dim];
    let mut lambda = F::zero();
    for _ in 0..max_iter {
        matvec(&v, &mut w);
        let norm = norm2(&w);
        if norm <= F::epsilon() {
            return Ok(F::zero());
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / norm;
        }
        let prev = lambda;
        // Rayleigh quotient with a unit vector is just v^T (A v).
        matvec(&v, &mut w);
        lambda = dot(&v, &w);
        if (lambda - prev).abs() <= tol * (lambda.abs() + F::one()) {
            return Ok(lambda);
        }
    }
    Ok(lambda)
}

/// Leading `k` eigenpairs of a symmetric matrix with spectrum in `[-1, 1]`
/// (a normalized affinity), by shifted block power iteration with a final
/// Rayleigh–Ritz rotation. Eigenvectors come back as `k` rows of length `n`,
/// ordered by descending eigenvalue.
pub fn top_eigenpairs_symmetric<F: Real>(
    matrix: &[F],
    n: usize,
    k: usize,
    max_iter: usize,
    tol: F,
) -> Result<(Vec<F>, Vec<F>)> {
    debug_assert_eq!(matrix.len(), n * n);
    let k = k.min(n);
    // Guard vectors speed up convergence when the k-th gap is small.
    let b = (k + 2).min(n);

    let mut basis: Vec<Vec<F>> = (0..b)
        .map(|j| deterministic_unit_vector::<F>(n, 0xD1B54A32D192ED03 ^ (j as u64)))
        .collect();
    orthonormalize(&mut basis);

    let mut shifted = vec![F::zero(); n];
    let mut prev_ritz = vec![F::zero(); b];
    for iter in 0..max_iter {
        let mut next: Vec<Vec<F>> = Vec::with_capacity(b);
        for q in &basis {
            // (M + I) q keeps the top of the spectrum dominant and positive.
            matvec_dense(matrix, n, q, &mut shifted);
            let mut y = shifted.clone();
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi += *qi;
            }
            next.push(y);
        }
        basis = next;
        orthonormalize(&mut basis);

        if iter % 8 == 7 || iter + 1 == max_iter {
            let ritz = ritz_values(matrix, n, &basis, &mut shifted);
            let drift = ritz
                .iter()
                .zip(&prev_ritz)
                .map(|(a, b)| (*a - *b).abs())
                .fold(F::zero(), F::max);
            prev_ritz = ritz;
            if drift <= tol {
                break;
            }
        }
    }

    // Rayleigh-Ritz: diagonalize the projected operator and rotate.
    let mut t = vec![F::zero(); b * b];
    let mut mv: Vec<Vec<F>> = Vec::with_capacity(b);
    for q in &basis {
        matvec_dense(matrix, n, q, &mut shifted);
        mv.push(shifted.clone());
    }
    for i in 0..b {
        for j in 0..b {
            t[i * b + j] = dot(&basis[i], &mv[j]);
        }
    }
    // Symmetrize against rounding before Jacobi.
    for i in 0..b {
        for j in i + 1..b {
            let avg = (t[i * b + j] + t[j * b + i]) / F::of(2.0);
            t[i * b + j] = avg;
            t[j * b + i] = avg;
        }
    }
    let (vals, vecs) = jacobi_eigen(&t, b)?;

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = vec![F::zero(); k * n];
    for r in 0..k {
        eigenvalues.push(vals[r]);
        for c in 0..b {
            let w = vecs[r * b + c];
            for j in 0..n {
                eigenvectors[r * n + j] += w * basis[c][j];
            }
        }
    }
    Ok((eigenvalues, eigenvectors))
}

fn ritz_values<F: Real>(matrix: &[F], n: usize, basis: &[Vec<F>], scratch: &mut [F]) -> Vec<F> {
    basis
        .iter()
        .map(|q| {
            matvec_dense(matrix, n, q, scratch);
            dot(q, scratch)
        })
        .collect()
}

fn matvec_dense<F: Real>(matrix: &[F], n: usize, x: &[F], out: &mut [F]) {
    for i in 0..n {
        let row = &matrix[i * n..(i + 1) * n];
        let mut sum = F::zero();
        for (a, b) in row.iter().zip(x) {
            sum += *a * *b;
        }
        out[i] = sum;
    }
}

/// Modified Gram-Schmidt in place; drops no vectors (re-seeds a zero vector
/// deterministically, which only happens for pathological inputs).
fn orthonormalize<F: Real>(basis: &mut [Vec<F>]) {
    let n = basis.first().map_or(0, Vec::len);
    for i in 0..basis.len() {
        for j in 0..i {
            let proj = dot(&basis[i], &basis[j]);
            let (head, tail) = basis.split_at_mut(i);
            for (vi, vj) in tail[0].iter_mut().zip(&head[j]) {
                *vi -= proj * *vj;
            }
        }
        let norm = norm2(&basis[i]);
        if norm <= F::epsilon() {
            basis[i] = deterministic_unit_vector::<F>(n, 0xA076_1D64_78BD_642F ^ (i as u64));
            continue;
        }
        for v in basis[i].iter_mut() {
            *v /= norm;
        }
    }
}

/// Deterministic pseudo-random unit vector (splitmix64 driven); start vector
/// for the iterative eigen solvers so results are reproducible.
fn deterministic_unit_vector<F: Real>(n: usize, seed: u64) -> Vec<F> {
    let mut state = seed;
    let mut v: Vec<F> = (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            F::of((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        })
        .collect();
    let norm = norm2(&v);
    for x in v.iter_mut() {
        *x /= norm;
    }
    v
}

pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    let mut sum = F::zero();
    for (x, y) in a.iter().zip(b) {
        sum += *x * *y;
    }
    sum
}

pub fn norm2<F: Real>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // A = L0 L0^T with a known factor.
        let l0 = [2.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.5, -1.0, 1.5];
        let mut a = [0.0f64; 9];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    a[i * 3 + j] += l0[i * 3 + k] * l0[j * 3 + k];
                }
            }
        }
        let l = cholesky(&a, 3).unwrap();
        for (got, want) in l.iter().zip(l0.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0f64; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i * 3 + j] * x_true[j];
            }
        }
        let x = cholesky_solve(&l, 3, &b);
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [1.0, 2.0, 2.0, 1.0]; // eigenvalues 3, -1
        assert!(cholesky(&a, 2).is_err());
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // Symmetric matrix with eigenvalues 6, 3, 1.
        let a = [4.0f64, 1.0, 1.0, 1.0, 4.0, 1.0, 1.0, 1.0, 4.0];
        let (vals, vecs) = jacobi_eigen(&a, 3).unwrap();
        assert!((vals[0] - 6.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
        // Residual check A v = lambda v for each pair.
        for r in 0..3 {
            for i in 0..3 {
                let mut av = 0.0;
                for j in 0..3 {
                    av += a[i * 3 + j] * vecs[r * 3 + j];
                }
                assert!((av - vals[r] * vecs[r * 3 + i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn power_iteration_matches_jacobi() {
        let a = [5.0f64, 2.0, 0.0, 2.0, 4.0, 1.0, 0.0, 1.0, 3.0];
        let (vals, _) = jacobi_eigen(&a, 3).unwrap();
        let lambda = power_iteration_largest(
            3,
            |x, out| {
                for i in 0..3 {
                    out[i] = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
                }
            },
            500,
            1e-14,
        )
        .unwrap();
        assert!((lambda - vals[0]).abs() < 1e-10);
    }

    #[test]
    fn block_iteration_finds_top_pairs() {
        // Diagonal-ish symmetric matrix scaled into [-1, 1].
        let n = 8;
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            a[i * n + i] = (i as f64 + 1.0) / (n as f64) - 0.3;
            if i + 1 < n {
                a[i * n + i + 1] = 0.05;
                a[(i + 1) * n + i] = 0.05;
            }
        }
        let (vals, vecs) = top_eigenpairs_symmetric(&a, n, 3, 500, 1e-13).unwrap();
        let (jvals, _) = jacobi_eigen(&a, n).unwrap();
        for r in 0..3 {
            assert!((vals[r] - jvals[r]).abs() < 1e-9, "{} vs {}", vals[r], jvals[r]);
            // Residual ||A v - lambda v||.
            let v = &vecs[r * n..(r + 1) * n];
            let mut res = 0.0f64;
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
                res += (av - vals[r] * v[i]).powi(2);
            }
            assert!(res.sqrt() < 1e-8);
        }
    }
}
