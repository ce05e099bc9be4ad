use fpdc_core::{kronecker, truncated_basis, Matrix, Mode, Tensor3};
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0..10.0f64, r * c).prop_map(move |v| Matrix::from_vec(r, c, v).unwrap())
    })
}

fn tensor() -> impl Strategy<Value = Tensor3<f64>> {
    (1..6usize, 1..6usize, 1..5usize).prop_flat_map(|(n, j, k)| {
        prop::collection::vec(-5.0..5.0f64, n * j * k)
            .prop_map(move |v| Tensor3::from_vec((n, j, k), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unfold_fold_round_trip(t in tensor()) {
        for mode in Mode::ALL {
            let back = Tensor3::fold(&t.unfold(mode), mode, t.dims()).unwrap();
            prop_assert_eq!(back.as_slice(), t.as_slice());
        }
    }

    #[test]
    fn unfolding_preserves_norm(t in tensor()) {
        for mode in Mode::ALL {
            prop_assert!((t.unfold(mode).squared_norm() - t.squared_norm()).abs() <= 1e-9 * (1.0 + t.squared_norm()));
        }
    }

    #[test]
    fn kronecker_norm_is_product(a in matrix(4, 4), b in matrix(4, 4)) {
        let k = kronecker(&a, &b);
        prop_assert_eq!(k.shape(), (a.rows() * b.rows(), a.cols() * b.cols()));
        let expected = a.frobenius_norm() * b.frobenius_norm();
        prop_assert!((k.frobenius_norm() - expected).abs() <= 1e-10 * (1.0 + expected));
    }

    #[test]
    fn truncated_basis_is_orthonormal(m in matrix(8, 6), r in 1..6usize) {
        prop_assume!(r <= m.rows().min(m.cols()));
        let q = truncated_basis(&m, r).unwrap();
        prop_assert_eq!(q.shape(), (m.rows(), r));
        prop_assert!(q.orthonormality_defect() <= 1e-12);
    }

    #[test]
    fn full_rank_basis_reproduces_matrix(m in matrix(6, 6)) {
        let q = truncated_basis(&m, m.rows().min(m.cols())).unwrap();
        let back = q.matmul(&q.tr_matmul(&m).unwrap()).unwrap();
        prop_assert!(m.sub(&back).unwrap().frobenius_norm() <= 1e-10 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn mode_product_matches_unfolded_product(t in tensor(), seed in 0..1000u64) {
        let (_, j, _) = t.dims();
        let m = Matrix::from_fn(3, j, |r, c| ((seed as usize + 7 * r + 3 * c) % 11) as f64 - 5.0);
        let p = t.mode_product(Mode::Second, &m).unwrap();
        let expected = m.matmul(&t.unfold(Mode::Second)).unwrap();
        prop_assert_eq!(p.unfold(Mode::Second), expected);
    }
}

#[test]
fn leading_basis_spans_dominant_subspace() {
    // rank-2 matrix: the rank-2 basis captures all of its energy
    let a = Matrix::from_fn(7, 5, |i, j| (i as f64 + 1.0) * (j as f64 - 2.0) + ((i % 3) as f64) * (j as f64).powi(2));
    let q = truncated_basis(&a, 2).unwrap();
    let captured = q.tr_matmul(&a).unwrap().squared_norm();
    assert!((captured - a.squared_norm()).abs() <= 1e-9 * a.squared_norm());
}
