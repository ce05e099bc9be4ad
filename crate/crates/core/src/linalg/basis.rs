//! Leading left singular subspace via one-sided (Hestenes) Jacobi.
//!
//! The Jacobi sweep always runs over the short side of the matrix, so the
//! cost is `O(long · short²)` per sweep. That keeps the tall mode unfoldings
//! of the distance tensor cheap.

use super::Matrix;
use crate::{Error, Result, Scalar};

const MAX_SWEEPS: usize = 80;

/// Orthonormal `rows × r` basis of the dominant rank-`r` left singular
/// subspace of `m`.
///
/// Each column is sign-normalized so that its largest-magnitude entry is
/// positive (first such entry on ties). When `m` has rank below `r` the basis
/// is completed with directions orthogonal to the range of `m`.
pub fn truncated_basis<T: Scalar>(m: &Matrix<T>, r: usize) -> Result<Matrix<T>> {
    let max = m.rows().min(m.cols());
    if r == 0 || r > max {
        return Err(Error::RankOutOfRange { what: "truncated basis", rank: r, max });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("truncated basis input"));
    }

    let mut columns = if m.rows() > m.cols() {
        // columns of m·V are u_i·σ_i
        let mut a = columns_of(m);
        let norms = jacobi_orthogonalize(&mut a, None);
        let order = descending(&norms);
        let floor = norms[order[0]] * T::epsilon() * T::of_usize(m.rows());
        order
            .into_iter()
            .take(r)
            .filter(|&c| norms[c] > floor)
            .map(|c| a[c].iter().map(|&v| v / norms[c]).collect::<Vec<T>>())
            .collect::<Vec<_>>()
    } else {
        // right singular vectors of mᵀ are the left singular vectors of m
        let mut a = columns_of(&m.transpose());
        let n = a.len();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let norms = jacobi_orthogonalize(&mut a, Some(&mut v));
        descending(&norms).into_iter().take(r).map(|c| v[c].clone()).collect()
    };

    complete_and_orthonormalize(&mut columns, m.rows(), r);
    for c in columns.iter_mut() {
        fix_sign(c);
    }
    let mut out = Matrix::zeros(m.rows(), r);
    for (j, c) in columns.iter().enumerate() {
        out.set_column(j, c);
    }
    Ok(out)
}

fn columns_of<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn rotate<T: Scalar>(a: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = a.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Rotates column pairs until they are mutually orthogonal to working
/// precision. Returns the final column norms.
fn jacobi_orthogonalize<T: Scalar>(a: &mut [Vec<T>], mut v: Option<&mut Vec<Vec<T>>>) -> Vec<T> {
    let n = a.len();
    let tol = T::epsilon() * T::of(4.0);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(a, p, q, c, s);
                if let Some(v) = v.as_deref_mut() {
                    rotate(v, p, q, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    a.iter().map(|c| dot(c, c).sqrt()).collect()
}

/// Indices sorted by decreasing value, stable on ties.
fn descending<T: Scalar>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite norms"));
    idx
}

/// Modified Gram–Schmidt over the given columns, then fills up to `r`
/// columns with canonical axes orthogonalized against the ones present.
fn complete_and_orthonormalize<T: Scalar>(cols: &mut Vec<Vec<T>>, dim: usize, r: usize) {
    let mut kept: Vec<Vec<T>> = Vec::with_capacity(r);
    let candidates = std::mem::take(cols)
        .into_iter()
        .chain((0..dim).map(|i| (0..dim).map(|j| if i == j { T::one() } else { T::zero() }).collect()));
    for mut c in candidates {
        if kept.len() == r {
            break;
        }
        let before = dot(&c, &c).sqrt();
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for k in &kept {
                let proj = dot(&c, k);
                for (x, &y) in c.iter_mut().zip(k) {
                    *x = *x - proj * y;
                }
            }
        }
        let norm = dot(&c, &c).sqrt();
        if norm > before * T::of(1e-8) && norm > T::zero() {
            for x in c.iter_mut() {
                *x = *x / norm;
            }
            kept.push(c);
        }
    }
    *cols = kept;
}

fn fix_sign<T: Scalar>(c: &mut [T]) {
    let mut best = 0;
    for (i, v) in c.iter().enumerate() {
        if v.abs() > c[best].abs() {
            best = i;
        }
    }
    if c[best] < T::zero() {
        for x in c.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn scaled_identity_gives_axis_vectors() {
        let m = Matrix::from_rows(&[[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let q = truncated_basis(&m, 2).unwrap();
        let expected = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(q.sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn identity_gives_some_orthonormal_basis() {
        let q = truncated_basis(&Matrix::<f64>::identity(3), 2).unwrap();
        assert!(q.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn rank_one_returns_sign_fixed_generator() {
        let u: [f64; 3] = [0.6, -0.8, 0.0];
        let v = [1.0, 2.0, -2.0, 0.5];
        let m = Matrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        let q = truncated_basis(&m, 1).unwrap();
        // largest magnitude entry (-0.8) flipped positive
        for (i, &ui) in u.iter().enumerate() {
            assert!((q[(i, 0)] + ui).abs() < 1e-14);
        }
    }

    #[test]
    fn full_rank_projection_reproduces_matrix() {
        let m = random(6, 4, 11);
        let q = truncated_basis(&m, 4).unwrap();
        let proj = q.matmul(&q.tr_matmul(&m).unwrap()).unwrap();
        assert!(m.sub(&proj).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn wide_matrix_uses_transposed_route() {
        let m = random(4, 9, 5);
        let q = truncated_basis(&m, 4).unwrap();
        assert!(q.orthonormality_defect() < 1e-12);
        let proj = q.matmul(&q.tr_matmul(&m).unwrap()).unwrap();
        assert!(m.sub(&proj).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn rank_deficient_tall_matrix_is_completed() {
        let m = Matrix::from_fn(5, 3, |i, _| i as f64 + 1.0);
        let q = truncated_basis(&m, 3).unwrap();
        assert!(q.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn zero_matrix_yields_canonical_axes() {
        let q = truncated_basis(&Matrix::<f64>::zeros(4, 2), 2).unwrap();
        assert!(q.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn rejects_bad_rank_and_non_finite() {
        let m = random(3, 3, 1);
        assert!(matches!(truncated_basis(&m, 0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(truncated_basis(&m, 4), Err(Error::RankOutOfRange { .. })));
        let mut bad = m.clone();
        bad[(1, 1)] = f64::NAN;
        assert!(matches!(truncated_basis(&bad, 1), Err(Error::NonFinite(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let m = random(7, 3, 2).cast::<f32>();
        let q = truncated_basis(&m, 2).unwrap();
        assert!(q.orthonormality_defect() < 1e-5);
    }
}
