use centrolab_core::centro::{sample_centro, weaver_blocks, EntryDist};
use centrolab_core::eig::{eigenvalues_default, multiset_distance, trace_power, trace_powers};
use centrolab_core::matrix::Matrix;
use centrolab_core::seed::trial_seed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

// Orthonormalised columns of a Gaussian matrix (modified Gram-Schmidt).
fn random_orthogonal(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    for j in 0..n {
        for p in 0..j {
            let dot: f64 = (0..n).map(|i| cols[j][i] * cols[p][i]).sum();
            for i in 0..n {
                cols[j][i] -= dot * cols[p][i];
            }
        }
        let norm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|x| *x /= norm);
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

#[test]
fn random_orthogonal_is_orthogonal() {
    let q = random_orthogonal(9, 1);
    let err = q.transpose().matmul(&q).sub(&Matrix::identity(9)).max_abs();
    assert!(err < 1e-13, "{err}");
}

#[test]
fn block_split_preserves_spectrum() {
    for draw in 0..50u64 {
        let n = 2 + (draw as usize % 11);
        let m = sample_centro(n, EntryDist::Gaussian, trial_seed(5, draw)).unwrap();
        let full = eigenvalues_default(m.matrix()).unwrap();
        let split = eigenvalues_default(&weaver_blocks(&m).block_diag()).unwrap();
        let d = multiset_distance(&full.values, &split.values);
        assert!(d <= 1e-8, "n={n} draw={draw}: {d}");
    }
}

#[test]
fn orthogonal_similarity_preserves_spectrum() {
    for draw in 0..30u64 {
        let n = 3 + (draw as usize % 20);
        let m = sample_centro(n, EntryDist::Uniform, trial_seed(6, draw)).unwrap();
        let q = random_orthogonal(n, draw);
        let similar = q.transpose().matmul(m.matrix()).matmul(&q);
        let a = eigenvalues_default(m.matrix()).unwrap();
        let b = eigenvalues_default(&similar).unwrap();
        assert!(a.converged && b.converged);
        let d = multiset_distance(&a.values, &b.values);
        assert!(d <= 1e-8, "n={n}: {d}");
    }
}

#[test]
fn eigen_power_sums_match_trace_powers() {
    for (draw, n) in [1usize, 2, 3, 7, 16, 25, 33, 50].into_iter().enumerate() {
        let m = sample_centro(n, EntryDist::Gaussian, trial_seed(8, draw as u64)).unwrap();
        let spec = eigenvalues_default(m.matrix()).unwrap();
        let traces = trace_powers(m.matrix(), 5);
        let split = weaver_blocks(&m).trace_powers(5);
        for k in 1..=5usize {
            let from_eigs = spec.power_sum(k as u32);
            let t = traces[k - 1];
            let scale = t.abs().max(1.0);
            assert!(from_eigs.im.abs() <= 1e-7 * scale, "n={n} k={k}: imaginary {}", from_eigs.im);
            assert!((from_eigs.re - t).abs() <= 1e-7 * scale, "n={n} k={k}: {} vs {t}", from_eigs.re);
            assert!((split[k - 1] - t).abs() <= 1e-10 * scale, "n={n} k={k}: split {}", split[k - 1]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_is_closed_under_conjugation(n in 1usize..14, seed in any::<u64>()) {
        let m = sample_centro(n, EntryDist::Gaussian, seed).unwrap();
        let spec = eigenvalues_default(m.matrix()).unwrap();
        prop_assert!(spec.converged);
        prop_assert_eq!(spec.len(), n);
        let conj: Vec<_> = spec.values.iter().map(|z| z.conj()).collect();
        prop_assert!(multiset_distance(&spec.values, &conj) <= 1e-9);
        let sum = spec.sum();
        prop_assert!((sum.re - m.matrix().trace()).abs() <= 1e-9 * (1.0 + m.matrix().trace().abs()));
    }

    #[test]
    fn trace_power_is_additive_over_blocks(n in 1usize..20, k in 0usize..7, seed in any::<u64>()) {
        let m = sample_centro(n, EntryDist::Uniform, seed).unwrap();
        let b = weaver_blocks(&m);
        let direct = trace_power(m.matrix(), k);
        let split = trace_power(&b.plus, k) + if b.minus.order() > 0 { trace_power(&b.minus, k) } else { 0.0 };
        prop_assert!((direct - split).abs() <= 1e-10 * direct.abs().max(1.0));
    }
}
