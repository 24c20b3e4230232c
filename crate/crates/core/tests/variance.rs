use centrolab_core::poly::Polynomial;
use centrolab_core::variance::{closed_form_variance, contour_variance, kernel_eval, resolvent_series_check, KernelVariant};
use centrolab_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_polynomials_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let degree = rng.random_range(1..=8);
        let coeffs: Vec<f64> = (0..degree).map(|_| rng.random_range(-2.0..2.0)).chain([1.5]).collect();
        let f = Polynomial::real(&coeffs).unwrap();
        let q = contour_variance(&f, KernelVariant::Diagonal, 1.5, 256).unwrap();
        assert!((q.value - closed_form_variance(&f)).norm() < 1e-8, "{f}");
        let doubled = contour_variance(&f, KernelVariant::Diagonal, 1.5, 512).unwrap();
        assert!((q.value - doubled.value).norm() < 1e-10);
    }
}

#[test]
fn series_converges_to_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let point = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(rng.random_range(1.3..3.0), rng.random_range(0.0..std::f64::consts::TAU))
    };
    for _ in 0..10 {
        let z = point(&mut rng);
        let eta = point(&mut rng);
        let series = resolvent_series_check(60, z, eta).unwrap();
        let full = kernel_eval(z, eta, KernelVariant::Paper).unwrap();
        let diag = kernel_eval(z, eta, KernelVariant::Diagonal).unwrap();
        assert!((series.full - full).norm() <= series.full_tail_bound + 1e-12, "{z} {eta}");
        assert!((series.diagonal - diag).norm() <= series.diagonal_tail_bound + 1e-12);
    }
}

proptest! {
    #[test]
    fn constant_term_does_not_change_variance(
        coeffs in prop::collection::vec(-5.0f64..5.0, 1..8),
        lead in 0.5f64..3.0,
        shift in -10.0f64..10.0,
    ) {
        let mut c = vec![0.0];
        c.extend(coeffs);
        c.push(lead);
        let f = Polynomial::real(&c).unwrap();
        c[0] = shift;
        let g = Polynomial::real(&c).unwrap();
        prop_assert_eq!(closed_form_variance(&f), closed_form_variance(&g));
    }
}
