//! Shared fixtures for the benchmarks.

use mann_core::{synth_dataset, Dataset, MannConfig, Matrix, Rng};

/// `a + aᵀ` for a seeded uniform `n x n` matrix.
pub fn symmetric(n: usize, seed: u64) -> Matrix {
    let mut rng = Rng::new(seed);
    let a = Matrix::from_fn(n, n, |_, _| rng.uniform(-1.0, 1.0));
    Matrix::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)])
}

/// The six-class 16x16 synthetic set used throughout the tests.
pub fn synthetic() -> Dataset {
    synth_dataset(6, 50, (16, 16), 7, 0.15).expect("valid synthetic parameters")
}

/// Ensemble settings for six classes with a reduced epoch count.
pub fn config(epochs: usize) -> MannConfig {
    let mut cfg = MannConfig::new(4, 6);
    cfg.master_seed = 7;
    cfg.train.epochs = epochs;
    cfg
}
