//! Built-in, seeded model generators for reproducible experiments.
//!
//! `gaussian_off_diagonal` is the workhorse: a pure state with phase
//! jitter against a Toeplitz-like observable engineered so the binned
//! frequency profile is a slowly decaying Gaussian envelope with a little
//! seeded amplitude noise. That puts it squarely inside the admissible
//! class, so the window analysis applies and can be cross-checked against
//! brute-force evolution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{DiscreteModel, ModelError};

/// Phase jitter amplitude (radians) on the pure state of
/// [`gaussian_off_diagonal`].
const PHASE_JITTER: f64 = 0.02;
/// Relative amplitude noise on the envelope bins.
const AMPLITUDE_NOISE: f64 = 0.003;
/// Envelope `exp(-nu^2 / ENVELOPE_WIDTH)` over the unit frequency interval.
const ENVELOPE_WIDTH: f64 = 10.0;

/// Unit-spaced spectrum, pure state `rho = |psi><psi|` with seeded phase
/// jitter, and an observable whose gap-`d` kernel bin lands on
/// `exp(-(d/N)^2 / 10) (1 + noise_d)`.
///
/// The phase jitter cancels between `rho` and `O` by construction, so the
/// profile stays smooth while the matrices themselves vary with the seed.
pub fn gaussian_off_diagonal(levels: usize, seed: u64) -> Result<DiscreteModel, ModelError> {
    if levels < 2 {
        return Err(ModelError::TooFewLevels(levels));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas: Vec<f64> = (0..levels)
        .map(|_| rng.gen_range(-PHASE_JITTER..PHASE_JITTER))
        .collect();
    let n = levels - 1;
    let noise: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let g = 1.0 / (levels as f64).sqrt();
    let psi: Vec<Complex64> = alphas
        .iter()
        .map(|&a| Complex64::from_polar(g, a))
        .collect();

    let mut rho = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    for i in 0..levels {
        rho[(i, i)] = Complex64::new(psi[i].norm_sqr(), 0.0);
        for j in i + 1..levels {
            let v = psi[i] * psi[j].conj();
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }

    // o(d) carries the count compensation L/(L-d) so the bin over the
    // gap-d diagonal comes out as the bare envelope.
    let envelope = |d: usize| -> f64 {
        if d == 0 {
            return 1.0;
        }
        let nu = d as f64 / n as f64;
        (-nu * nu / ENVELOPE_WIDTH).exp()
            * (1.0 + AMPLITUDE_NOISE * noise[d - 1])
            * levels as f64
            / (levels - d) as f64
    };
    let mut obs = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    for i in 0..levels {
        obs[(i, i)] = Complex64::new(envelope(0), 0.0);
        for j in i + 1..levels {
            let v = Complex64::from_polar(envelope(j - i), alphas[i] - alphas[j]);
            obs[(i, j)] = v;
            obs[(j, i)] = v.conj();
        }
    }

    let energies = (0..levels).map(|i| i as f64).collect();
    DiscreteModel::new(energies, rho, obs, 1.0)
}

/// Two-level system prepared in the symmetric superposition and observed
/// along the off-diagonal axis: expectation is `cos(gap * t / hbar)`,
/// forever.
pub fn two_level() -> DiscreteModel {
    let h = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let rho = DMatrix::from_row_slice(2, 2, &[h, h, h, h]);
    let obs = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    DiscreteModel::new(vec![0.0, 1.0], rho, obs, 1.0).expect("fixed two-level model is valid")
}

/// Seeded diagonal model: random probability weights, random diagonal
/// observable, zero off-diagonal content. Already at equilibrium.
pub fn diagonal(levels: usize, seed: u64) -> Result<DiscreteModel, ModelError> {
    if levels < 2 {
        return Err(ModelError::TooFewLevels(levels));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..levels).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    let mut obs = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    for i in 0..levels {
        rho[(i, i)] = Complex64::new(weights[i] / total, 0.0);
        obs[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    }
    let energies = (0..levels).map(|i| i as f64).collect();
    DiscreteModel::new(energies, rho, obs, 1.0)
}

/// Seeded unstructured model: Gram-normalized random density matrix and a
/// random Hermitian observable. Its frequency profile is rough, so it
/// exercises the inconclusive and not-in-class paths.
pub fn random_hermitian(levels: usize, seed: u64) -> Result<DiscreteModel, ModelError> {
    if levels < 2 {
        return Err(ModelError::TooFewLevels(levels));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = |_: usize| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let raw = DMatrix::from_fn(levels, levels, |i, j| uniform(i * levels + j));

    // rho = M M^dagger / trace, assembled upper-triangle-first so it is
    // Hermitian to the bit.
    let gram = &raw * raw.adjoint();
    let trace: f64 = (0..levels).map(|i| gram[(i, i)].re).sum();
    let mut rho = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    for i in 0..levels {
        rho[(i, i)] = Complex64::new(gram[(i, i)].re / trace, 0.0);
        for j in i + 1..levels {
            let v = gram[(i, j)] / trace;
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    let tr: f64 = (0..levels).map(|i| rho[(i, i)].re).sum();
    for i in 0..levels {
        rho[(i, i)] = Complex64::new(rho[(i, i)].re / tr, 0.0);
    }

    let mut obs = DMatrix::from_element(levels, levels, Complex64::new(0.0, 0.0));
    for i in 0..levels {
        obs[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..levels {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            obs[(i, j)] = v;
            obs[(j, i)] = v.conj();
        }
    }

    let energies = (0..levels).map(|i| i as f64).collect();
    DiscreteModel::new(energies, rho, obs, 1.0)
}
