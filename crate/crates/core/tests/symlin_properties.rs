use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symplectic_index::random::{random_lagrangian, random_symmetric, random_symplectic};
use symplectic_index::symlin::{
    graph_lagrangian, intersection_dimension, lagrangian_complement, AntiSymplecticMap, Mat, QuadraticForm, SympSpace,
};
use symplectic_index::HalfInt;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_symplectic_matrices_preserve_the_form(seed in any::<u64>(), n in 1usize..4) {
        let sp = SympSpace::standard(n);
        let f = random_symplectic(&sp, &mut rng(seed));
        prop_assert!(f.residual() < 1e-9);
        prop_assert!((f.entries().determinant() - 1.0).abs() < 1e-8);
        let id = f.compose(&f.inverse());
        prop_assert!((id.entries() - Mat::identity(2 * n, 2 * n)).amax() < 1e-9);
    }

    #[test]
    fn signature_is_a_congruence_invariant(seed in any::<u64>(), dim in 1usize..6) {
        let mut r = rng(seed);
        let q = QuadraticForm::new(random_symmetric(dim, 2.0, &mut r));
        let p = Mat::identity(dim, dim) + random_symmetric(dim, 0.3, &mut r);
        prop_assume!(p.determinant().abs() > 0.1);
        let s = q.signature(1e-6);
        prop_assume!(!s.is_degenerate());
        prop_assert_eq!(q.congruent(&p).signature(1e-6).value(), s.value());
    }

    #[test]
    fn complements_are_transverse_lagrangians(seed in any::<u64>(), n in 1usize..4) {
        let sp = SympSpace::standard(n);
        let l = random_lagrangian(&sp, &mut rng(seed));
        let k = lagrangian_complement(&l);
        prop_assert!(k.isotropy_residual() < 1e-9);
        prop_assert_eq!(intersection_dimension(&l, &k, 1e-6), 0);
    }

    #[test]
    fn symplectic_images_of_lagrangians_stay_lagrangian(seed in any::<u64>(), n in 1usize..4) {
        let sp = SympSpace::standard(n);
        let mut r = rng(seed);
        let l = random_lagrangian(&sp, &mut r);
        let f = random_symplectic(&sp, &mut r);
        prop_assert!(f.apply(&l).isotropy_residual() < 1e-8);
        prop_assert!(graph_lagrangian(&f).unwrap().isotropy_residual() < 1e-8);
    }

    #[test]
    fn complex_conjugation_is_an_anti_symplectic_involution(n in 1usize..5) {
        let sp = SympSpace::standard(n);
        let c = AntiSymplecticMap::complex_conjugation(&sp);
        let m = c.entries();
        let j = sp.form_matrix();
        prop_assert!((m * m - Mat::identity(2 * n, 2 * n)).amax() < 1e-15);
        prop_assert!((m.transpose() * j * m + j).amax() < 1e-15);
        prop_assert!(c.fixed_lagrangian().unwrap().same_span(&sp.reference_lagrangian(), 1e-9));
    }

    #[test]
    fn halfint_arithmetic_matches_rationals(a in -1000i64..1000, b in -1000i64..1000) {
        let x = HalfInt::from_twice(a);
        let y = HalfInt::from_twice(b);
        prop_assert_eq!((x + y).to_f64(), a as f64 / 2.0 + b as f64 / 2.0);
        prop_assert_eq!((x - y).to_f64(), a as f64 / 2.0 - b as f64 / 2.0);
        prop_assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<HalfInt>(&json).unwrap(), x);
    }
}
