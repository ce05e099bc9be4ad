use fpdc_core::evaluation::{assign_labels, dbs, kmeans, misclassification_rate, within_variance, Assignment};
use fpdc_core::Matrix;
use proptest::prelude::*;

fn probabilities() -> impl Strategy<Value = Matrix<f64>> {
    (2..30usize, 2..5usize).prop_flat_map(|(n, k)| {
        prop::collection::vec(0.01..1.0f64, n * k).prop_map(move |v| {
            let mut m = Matrix::from_vec(n, k, v).unwrap();
            for i in 0..n {
                let s: f64 = m.row(i).iter().sum();
                m.row_mut(i).iter_mut().for_each(|p| *p /= s);
            }
            m
        })
    })
}

fn labels(k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, 4..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn argmax_ignores_monotone_row_transforms(p in probabilities()) {
        let transformed = p.map(|v| (3.0 * v).exp() + v.powi(3));
        prop_assert_eq!(assign_labels(&p), assign_labels(&transformed));
    }

    #[test]
    fn dbs_is_normalized(p in probabilities()) {
        let a = assign_labels(&p);
        let r = dbs(&p, &a, 1e-12).unwrap();
        prop_assert!(r.per_point.iter().all(|&d| (-1.0..=1.0).contains(&d)));
        let max = r.per_point.iter().fold(0.0f64, |m, &d| m.max(d.abs()));
        prop_assert!(max == 0.0 || (max - 1.0).abs() <= 1e-12);
        prop_assert_eq!(r.clusters.iter().map(Vec::len).sum::<usize>(), p.rows());
    }

    #[test]
    fn misclassification_ignores_label_names(truth in labels(4), shift in 1..4usize) {
        let n = truth.len();
        let predicted: Vec<usize> = truth.iter().enumerate().map(|(i, &t)| if i % 5 == 0 { (t + 1) % 4 } else { t }).collect();
        let renamed: Vec<usize> = predicted.iter().map(|&l| (l + shift) % 4).collect();
        let a = Assignment::new(predicted, 4).unwrap();
        let b = Assignment::new(renamed, 4).unwrap();
        let ra = misclassification_rate(&a, &truth, None).unwrap();
        prop_assert_eq!(ra, misclassification_rate(&b, &truth, None).unwrap());
        prop_assert!(ra <= n.div_ceil(5) as f64 / n as f64 + 1e-12);
    }

    #[test]
    fn splitting_a_cluster_never_raises_within_variance(
        xs in prop::collection::vec(-10.0..10.0f64, 6..40),
        raw in prop::collection::vec(0..3usize, 40),
    ) {
        let n = xs.len();
        let x = Matrix::from_vec(n, 1, xs).unwrap();
        let coarse: Vec<usize> = raw[..n].iter().map(|&l| l.min(1)).collect();
        let fine: Vec<usize> = raw[..n].to_vec();
        prop_assume!((0..3).all(|c| fine.contains(&c)));
        let wc = within_variance(&x, &Assignment::new(coarse, 2).unwrap()).unwrap();
        let wf = within_variance(&x, &Assignment::new(fine, 3).unwrap()).unwrap();
        prop_assert!(wf <= wc + 1e-9);
    }
}

#[test]
fn kmeans_within_trace_is_nonincreasing() {
    let x = Matrix::from_fn(90, 2, |i, j| ((i * 37 + j * 11) % 17) as f64 + if i % 3 == 0 { 20.0 } else { 0.0 });
    for seed in 0..10 {
        let r = kmeans(&x, 3, seed, 100).unwrap();
        assert!(r.converged);
        for w in r.within_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", r.within_trace);
        }
        assert!((r.within_variance() - within_variance(&x, &r.assignment).unwrap()).abs() <= 1e-9);
    }
}
