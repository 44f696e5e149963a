use proptest::prelude::*;
use symplectic_index::doubling::{reflected_half, verify_diagonal, verify_index_theorem, HalfPathData};
use symplectic_index::maslov::CrossingOptions;
use symplectic_index::random::{random_diagonal_phi, random_half_path, trial_rng};
use symplectic_index::symlin::{block_diag, Mat, SympSpace, SymplecticMatrix};
use symplectic_index::Error;

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::Nondegeneracy(_) | Error::IrregularCrossing { .. } | Error::Unresolved { .. } | Error::DegenerateEndpoint
    )
}

/// A real symplectic `diag(A, A⁻ᵀ)`, which commutes with complex conjugation.
fn real_symplectic(n: usize, seed: u64) -> SymplecticMatrix {
    let mut rng = trial_rng(seed, "real-symplectic", 0);
    let a = Mat::identity(n, n) + symplectic_index::random::random_symmetric(n, 0.4, &mut rng);
    let inv_t = a.clone().try_inverse().expect("near identity").transpose();
    SymplecticMatrix::new(block_diag(&a, &inv_t), &SympSpace::standard(n), 1e-9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reflecting_twice_gives_back_the_path(seed in any::<u64>(), n in 1usize..3) {
        let half = random_half_path(n, &mut trial_rng(seed, "reflect-twice", 0));
        let h = HalfPathData::standard(half.clone()).unwrap();
        let back = reflected_half(&HalfPathData::standard(reflected_half(&h)).unwrap());
        for k in 0..=16 {
            let t = k as f64 / 16.0;
            let a = half.evaluate(t).unwrap();
            let b = back.evaluate(t).unwrap();
            prop_assert!((a.entries() - b.entries()).amax() < 1e-8);
        }
    }

    #[test]
    fn defect_vanishes_after_reparametrization_and_real_conjugation(seed in any::<u64>(), n in 1usize..3) {
        let opts = CrossingOptions::default();
        let half = random_half_path(n, &mut trial_rng(seed, "theorem-invariance", 0));
        let variants = [
            half.clone(),
            half.normalized_to(0.5).normalized_to(1.0),
            half.conjugated(&real_symplectic(n, seed)),
        ];
        for v in variants {
            match verify_index_theorem(&HalfPathData::standard(v).unwrap(), &opts) {
                Ok(r) => prop_assert!(r.pass(), "{r:?}"),
                Err(e) => prop_assume!(skippable(&e)),
            }
        }
    }

    #[test]
    fn diagonal_loop_index_splits_over_products(seed in any::<u64>()) {
        let opts = CrossingOptions::default();
        let mut rng = trial_rng(seed, "diagonal-product", 0);
        let p = random_diagonal_phi(1, &mut rng);
        let q = random_diagonal_phi(1, &mut rng);
        let pq = p.direct_sum(&q).unwrap();
        let r = (verify_diagonal(&p, &opts), verify_diagonal(&q, &opts), verify_diagonal(&pq, &opts));
        match r {
            (Ok(a), Ok(b), Ok(c)) => {
                prop_assert!(c.pass());
                prop_assert_eq!(c.defect.mu_loop, a.defect.mu_loop + b.defect.mu_loop);
                prop_assert_eq!(c.cz_factor, a.cz_factor + b.cz_factor);
            }
            (a, b, c) => {
                for e in [a.err(), b.err(), c.err()].into_iter().flatten() {
                    prop_assume!(skippable(&e));
                }
            }
        }
    }
}
