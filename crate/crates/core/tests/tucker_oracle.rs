use fpdc_core::tucker::{explained_variability, tucker3, Ranks, TuckerConfig, TuckerInit};
use fpdc_core::{kronecker, Matrix, Mode, Tensor3};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_tensor(n: usize, j: usize, k: usize, seed: u64) -> Tensor3<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor3::from_fn(n, j, k, |_, _, _| rng.random_range(-1.0..1.0))
}

/// Leading `r` left singular vectors, sorted by singular value.
fn leading_left(m: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    DMatrix::from_fn(m.nrows(), r, |i, c| u[(i, order[c])])
}

/// Plain-loop HOOI on a dense array indexed `g[i][j][k]`; returns the
/// explained fraction from the final core.
fn oracle_hooi(g: &[Vec<Vec<f64>>], (r, q, s): (usize, usize, usize), sweeps: usize) -> f64 {
    let (n, j, k) = (g.len(), g[0].len(), g[0][0].len());
    let total: f64 = g.iter().flatten().flatten().map(|x| x * x).sum();
    let m2 = DMatrix::from_fn(j, n * k, |jj, c| g[c / k][jj][c % k]);
    let m3 = DMatrix::from_fn(k, n * j, |kk, c| g[c / j][c % j][kk]);
    // the first sweep replaces U, so only B and V need the HOSVD start
    let mut b = leading_left(&m2, q);
    let mut v = leading_left(&m3, s);
    let mut fit = 0.0;
    for _ in 0..sweeps {
        let w1 = DMatrix::from_fn(n, q * s, |i, c| {
            let (qq, ss) = (c / s, c % s);
            (0..j).flat_map(|jj| (0..k).map(move |kk| (jj, kk))).map(|(jj, kk)| g[i][jj][kk] * b[(jj, qq)] * v[(kk, ss)]).sum()
        });
        let u = leading_left(&w1, r);
        let w2 = DMatrix::from_fn(j, r * s, |jj, c| {
            let (rr, ss) = (c / s, c % s);
            (0..n).flat_map(|i| (0..k).map(move |kk| (i, kk))).map(|(i, kk)| g[i][jj][kk] * u[(i, rr)] * v[(kk, ss)]).sum()
        });
        b = leading_left(&w2, q);
        let w3 = DMatrix::from_fn(k, r * q, |kk, c| {
            let (rr, qq) = (c / q, c % q);
            (0..n).flat_map(|i| (0..j).map(move |jj| (i, jj))).map(|(i, jj)| g[i][jj][kk] * u[(i, rr)] * b[(jj, qq)]).sum()
        });
        v = leading_left(&w3, s);
        let core = v.transpose() * w3;
        let next = core.norm_squared() / total;
        if (next - fit).abs() < 1e-15 {
            fit = next;
            break;
        }
        fit = next;
    }
    fit
}

#[test]
fn explained_fraction_matches_independent_hooi() {
    for seed in 0..3 {
        let t = random_tensor(10, 5, 3, seed);
        let dense: Vec<Vec<Vec<f64>>> =
            (0..10).map(|i| (0..5).map(|j| (0..3).map(|k| t.get(i, j, k)).collect()).collect()).collect();
        let expected = oracle_hooi(&dense, (3, 2, 2), 5000);
        let mut cfg = TuckerConfig::new(Ranks::new(3, 2, 2));
        cfg.fit_tolerance = 1e-15;
        cfg.max_sweeps = 5000;
        let f = tucker3(&t, &cfg).unwrap();
        assert!(
            (f.explained_fraction - expected).abs() <= 1e-6,
            "seed {seed}: {} vs oracle {expected}",
            f.explained_fraction
        );
        assert!((explained_variability(&f, &t).unwrap() - f.explained_fraction).abs() <= 1e-12);
    }
}

#[test]
fn kronecker_form_matches_mode_products() {
    let t = random_tensor(8, 4, 3, 11);
    let f = tucker3(&t, &TuckerConfig::new(Ranks::new(4, 3, 2))).unwrap();
    let via_kron = f.u.matmul(&f.core.unfold(Mode::First)).unwrap().matmul(&kronecker(&f.v, &f.b).transpose()).unwrap();
    let via_modes = f.reconstruct().unfold(Mode::First);
    assert!(via_kron.sub(&via_modes).unwrap().max_abs() <= 1e-10);
    assert!(f.reconstruct_unfolded().sub(&via_modes).unwrap().max_abs() <= 1e-10);
}

#[test]
fn full_rank_reconstructs_exactly() {
    let t = random_tensor(6, 4, 3, 5);
    let f = tucker3(&t, &TuckerConfig::new(Ranks::new(6, 4, 3))).unwrap();
    let rel = t.sub(&f.reconstruct()).unwrap().frobenius_norm() / t.frobenius_norm();
    assert!(rel <= 1e-8, "relative residual {rel}");
    for m in [&f.u, &f.b, &f.v] {
        assert!(m.orthonormality_defect() <= 1e-10);
    }
}

#[test]
fn fit_never_decreases_across_sweeps() {
    for seed in 0..10 {
        let t = random_tensor(12, 6, 4, 100 + seed);
        for init in [TuckerInit::Hosvd, TuckerInit::Random] {
            let mut cfg = TuckerConfig::new(Ranks::new(3, 2, 2));
            cfg.init = init;
            cfg.seed = seed;
            cfg.fit_tolerance = 0.0;
            cfg.max_sweeps = 50;
            let f = tucker3(&t, &cfg).unwrap();
            for w in f.fit_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "seed {seed}: {:?}", f.fit_trace);
            }
        }
    }
}

#[test]
fn larger_ranks_explain_at_least_as_much() {
    let t = random_tensor(10, 5, 3, 21);
    let mut last = 0.0;
    for (r, q, s) in [(1, 1, 1), (2, 2, 2), (3, 3, 2), (6, 4, 3), (10, 5, 3)] {
        let f = tucker3(&t, &TuckerConfig::new(Ranks::new(r, q, s))).unwrap();
        assert!(f.explained_fraction >= last - 1e-9, "({r},{q},{s}) {} < {last}", f.explained_fraction);
        last = f.explained_fraction;
    }
    assert!((last - 1.0).abs() <= 1e-10);
}

#[test]
fn rank_one_tensor_is_recovered() {
    let u = [0.5, -0.5, 0.5, 0.5];
    let b = [0.6, 0.8, 0.0];
    let v = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
    let t = Tensor3::from_fn(4, 3, 2, |i, j, k| 3.0 * u[i] * b[j] * v[k]);
    let f = tucker3(&t, &TuckerConfig::new(Ranks::new(1, 1, 1))).unwrap();
    assert!(f.explained_fraction >= 1.0 - 1e-8);
    let dot = |m: &Matrix<f64>, x: &[f64]| m.column(0).iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs();
    assert!((dot(&f.u, &u) - 1.0).abs() <= 1e-10);
    assert!((dot(&f.b, &b) - 1.0).abs() <= 1e-10);
    assert!((dot(&f.v, &v) - 1.0).abs() <= 1e-10);
}
