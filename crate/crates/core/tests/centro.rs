use centrolab_core::centro::{
    assert_centrosymmetric, class_count, class_index, counter_identity, entry_class, sample_centro, weaver_blocks,
    weaver_q, EntryDist,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn classes_pair_reflected_cells(n in 1usize..40, i in 0usize..40, j in 0usize..40) {
        let (i, j) = (i % n, j % n);
        let a = entry_class(n, i, j).unwrap();
        let b = entry_class(n, n - 1 - i, n - 1 - j).unwrap();
        prop_assert_eq!(a.rep, b.rep);
        prop_assert_eq!(a.self_paired, (i, j) == (n - 1 - i, n - 1 - j));
        prop_assert_eq!(class_index(n, i * n + j), a.rep.0 * n + a.rep.1);
    }

    #[test]
    fn samples_are_exactly_centrosymmetric(n in 1usize..25, seed in any::<u64>(), uniform in any::<bool>()) {
        let dist = if uniform { EntryDist::Uniform } else { EntryDist::Gaussian };
        let m = sample_centro(n, dist, seed).unwrap();
        prop_assert!(assert_centrosymmetric(m.matrix(), 0.0));
        let j = counter_identity(n).unwrap();
        prop_assert_eq!(&j.matmul(m.matrix()).matmul(&j), m.matrix());
        prop_assert_eq!(&sample_centro(n, dist, seed).unwrap().into_matrix(), m.matrix());
    }

    #[test]
    fn explicit_similarity_is_block_diagonal(n in 1usize..16, seed in any::<u64>()) {
        let m = sample_centro(n, EntryDist::Gaussian, seed).unwrap();
        let q = weaver_q(n).unwrap();
        let b = weaver_blocks(&m);
        let conj = q.transpose().matmul(m.matrix()).matmul(&q);
        let diff = conj.sub(&b.block_diag()).max_abs();
        prop_assert!(diff <= 1e-12 * m.matrix().max_abs().max(1.0), "diff {}", diff);
    }
}

#[test]
fn class_counts() {
    for n in 1..30 {
        let distinct: std::collections::BTreeSet<usize> = (0..n * n).map(|p| class_index(n, p)).collect();
        assert_eq!(distinct.len(), class_count(n));
        assert_eq!(class_count(n), (n * n).div_ceil(2));
    }
}
