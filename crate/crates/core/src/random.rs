//! Seeded random data for the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::maslov::SymplecticPathSpec;
use crate::symlin::{LagrangianFrame, Mat, SympSpace, SymplecticMatrix};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, a hash of the master seed, the suite name and the trial index.
pub fn trial_seed(master: u64, suite: &str, trial: u64) -> u64 {
    let mut h = splitmix64(master);
    for b in suite.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ trial)
}

pub fn trial_rng(master: u64, suite: &str, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, suite, trial))
}

/// Symmetric matrix with entries uniform in `[-range, range]`.
pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, range: f64, rng: &mut R) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x = rng.random_range(-range..=range);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// `exp(Ω⁻¹S)` with `S` uniform in `[-1, 1]`.
pub fn random_symplectic<R: Rng + ?Sized>(space: &SympSpace, rng: &mut R) -> SymplecticMatrix {
    let s = random_symmetric(space.dim(), 1.0, rng);
    SymplecticMatrix::exp_of_generator(space, &s)
}

/// A random symplectic image of the reference Lagrangian.
pub fn random_lagrangian<R: Rng + ?Sized>(space: &SympSpace, rng: &mut R) -> LagrangianFrame {
    random_symplectic(space, rng).apply(&space.reference_lagrangian())
}

/// A path of 1 to 4 segments with generator entries in `[-range, range]` and durations in
/// `[0.2, 1]`, rescaled so the total duration is `total`.
pub fn random_path<R: Rng + ?Sized>(space: &SympSpace, range: f64, total: f64, rng: &mut R) -> SymplecticPathSpec {
    let count = rng.random_range(1..=4);
    let parts: Vec<(Mat, f64)> =
        (0..count).map(|_| (random_symmetric(space.dim(), range, rng), rng.random_range(0.2..=1.0))).collect();
    SymplecticPathSpec::new(space, parts, None).expect("generated segments are valid").normalized_to(total)
}

/// A half-path on `[0, 1]` over `(R^{2n}, ω₀)` starting at the identity.
pub fn random_half_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymplecticPathSpec {
    random_path(&SympSpace::standard(n), 1.5, 1.0, rng)
}

/// A path on `[0, 2]` over `(R^{2m}, ω₀)` for the diagonal construction.
pub fn random_diagonal_phi<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SymplecticPathSpec {
    random_path(&SympSpace::standard(m), 1.5, 2.0, rng)
}

/// A fixed generic symmetric matrix used to perturb degenerate data.
pub fn generic_perturbation(dim: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005E_ED0F_5EED);
    random_symmetric(dim, 1.0, &mut rng)
}
