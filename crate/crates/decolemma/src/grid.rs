//! Equidistant sample grids, sampled functions, and the affine map that
//! carries physical energies onto the dimensionless unit interval.
//!
//! Everything downstream operates on the point set `x_i = i/N`, `i = 0..=N`.
//! Physical spectra enter through [`UniformGrid::from_energies`], which
//! refuses anything that is not equidistant: resampling an irregular
//! spectrum would change the physics, so it is rejected rather than
//! interpolated.

use num_complex::Complex64;
use thiserror::Error;

/// Default relative tolerance for the equidistance check on external data.
pub const DEFAULT_EQUIDISTANCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("a grid needs at least one interval")]
    ZeroIntervals,
    #[error("need at least two energies, got {0}")]
    TooFewEnergies(usize),
    #[error("energy at index {0} is not finite")]
    NonFiniteEnergy(usize),
    #[error("energies must be strictly increasing (violated at index {0})")]
    NotStrictlyIncreasing(usize),
    #[error(
        "spectrum is not equidistant: max relative gap deviation {max_rel_deviation:.3e} \
         exceeds tolerance {tolerance:.3e}"
    )]
    NonEquidistantSpectrum {
        max_rel_deviation: f64,
        tolerance: f64,
    },
    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("grid has {points} points but {values} values were supplied")]
    LengthMismatch { points: usize, values: usize },
    #[error("sample value at index {0} is not finite")]
    NonFiniteValue(usize),
}

/// The equidistant point set `{x_i = i/N}`, `i = 0..=N`, on `[0, 1]`.
///
/// Immutable after construction; `x_0 = 0` and `x_N = 1` hold exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    n_intervals: usize,
    points: Vec<f64>,
}

impl UniformGrid {
    /// Builds the grid `{i/N}` with `N = n_intervals >= 1`.
    pub fn new(n_intervals: usize) -> Result<Self, GridError> {
        if n_intervals == 0 {
            return Err(GridError::ZeroIntervals);
        }
        let n = n_intervals as f64;
        let points = (0..=n_intervals).map(|i| i as f64 / n).collect();
        Ok(Self {
            n_intervals,
            points,
        })
    }

    /// Builds the grid and affine map for a strictly increasing, equidistant
    /// energy list, so that `map.to_dimensionless(energies[i]) = i/N`.
    ///
    /// Fails with [`GridError::NonEquidistantSpectrum`] when consecutive gaps
    /// deviate from their mean by more than `tolerance` (relative). That is a
    /// statement about the spectrum, not a bug: the partition machinery only
    /// applies to equidistant points.
    pub fn from_energies(
        energies: &[f64],
        hbar: f64,
        tolerance: f64,
    ) -> Result<(Self, AffineEnergyMap), GridError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(GridError::InvalidHbar(hbar));
        }
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(GridError::InvalidTolerance(tolerance));
        }
        if energies.len() < 2 {
            return Err(GridError::TooFewEnergies(energies.len()));
        }
        for (i, &e) in energies.iter().enumerate() {
            if !e.is_finite() {
                return Err(GridError::NonFiniteEnergy(i));
            }
        }
        for i in 1..energies.len() {
            if energies[i] <= energies[i - 1] {
                return Err(GridError::NotStrictlyIncreasing(i));
            }
        }
        let n = energies.len() - 1;
        let span = energies[n] - energies[0];
        let mean_gap = span / n as f64;
        let max_rel_deviation = energies
            .windows(2)
            .map(|w| ((w[1] - w[0] - mean_gap) / mean_gap).abs())
            .fold(0.0, f64::max);
        if max_rel_deviation > tolerance {
            return Err(GridError::NonEquidistantSpectrum {
                max_rel_deviation,
                tolerance,
            });
        }
        let grid = Self::new(n)?;
        let map = AffineEnergyMap {
            scale: hbar / span,
            offset: energies[0],
            hbar,
        };
        Ok((grid, map))
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    /// Nominal spacing `1/N`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n_intervals as f64
    }
}

/// Affine bridge between a physical energy axis and the dimensionless grid.
///
/// `scale` is `hbar / (E_max - E_min)` and carries units of time: it converts
/// dimensionless time to physical time, which is the inverse of the frequency
/// normalization that put the spectrum on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineEnergyMap {
    scale: f64,
    offset: f64,
    hbar: f64,
}

impl AffineEnergyMap {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Energy to grid coordinate in `[0, 1]`.
    pub fn to_dimensionless(&self, energy: f64) -> f64 {
        (energy - self.offset) * self.scale / self.hbar
    }

    /// Grid coordinate back to energy.
    pub fn from_dimensionless(&self, x: f64) -> f64 {
        self.offset + x * self.hbar / self.scale
    }

    /// Dimensionless time to physical time.
    pub fn time_to_physical(&self, t_dimensionless: f64) -> f64 {
        t_dimensionless * self.scale
    }

    /// Physical time to dimensionless time.
    pub fn time_to_dimensionless(&self, t_physical: f64) -> f64 {
        t_physical / self.scale
    }
}

/// Complex-valued samples `f(x_i)`, one per grid point.
///
/// The partition and sum machinery treats real and imaginary parts
/// separately, so complex input costs nothing extra and saves the model
/// layer (whose coefficients are complex) a duplicated pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.n_points() {
            return Err(GridError::LengthMismatch {
                points: grid.n_points(),
                values: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(GridError::NonFiniteValue(i));
            }
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> Result<Self, GridError> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// The constant function `f = c`.
    pub fn constant(grid: UniformGrid, c: Complex64) -> Self {
        let values = vec![c; grid.n_points()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn n_intervals(&self) -> usize {
        self.grid.n_intervals()
    }

    /// `(1/N) sum |f(x_j)|` — the triangle bound on any phase sum of `f`.
    pub fn l1_norm(&self) -> f64 {
        let mut acc = crate::compensated::CompensatedSum::new();
        for v in &self.values {
            acc.add(v.norm());
        }
        acc.value() / self.grid.n_intervals() as f64
    }
}
