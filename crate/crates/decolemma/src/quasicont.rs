//! Class-1 quasi-continuous decompositions.
//!
//! A grid of `N+1` points is split into `G` components of `P+1` consecutive
//! points each (`G * (P+1) = N+1`, exact tiling), and a sampled function
//! belongs to the admissible class when it is nearly constant on every
//! component. [`decompose`] searches all admissible component sizes and
//! returns a certificate for the largest `P`, because a larger `P` widens
//! the time window over which the phase sum is suppressed.

use num_complex::Complex64;
use thiserror::Error;

use crate::compensated::ComplexSum;
use crate::grid::SampledFunction;

/// Relative floor under which component constants are treated as zero scale,
/// as a fraction of `max_i |f(x_i)|`.
const FLATNESS_FLOOR_REL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QuasicontError {
    #[error(
        "no admissible class-1 decomposition: best candidate P={best_p} \
         has flatness {best_flatness:.6e}"
    )]
    NotInL1Class { best_p: usize, best_flatness: f64 },
    #[error("flatness tolerance must be positive and finite, got {0}")]
    InvalidFlatnessTol(f64),
    #[error("min_p must be at least 1")]
    InvalidMinP,
    #[error("component index {k} out of range 1..={g}")]
    ComponentOutOfRange { k: usize, g: usize },
    #[error("global index {j} lies outside component {k}")]
    IndexOutOfComponent { j: usize, k: usize },
}

/// Proof that a sampled function is nearly constant on each component of a
/// class-1 partition: `G` components of `P+1` points with constants `C_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCertificate {
    g_components: usize,
    points_per_component: usize,
    component_constants: Vec<Complex64>,
    flatness: f64,
    c_max: f64,
}

impl DecompositionCertificate {
    /// Number of components `G`.
    pub fn g(&self) -> usize {
        self.g_components
    }

    /// `P`: each component holds `P+1` consecutive points.
    pub fn p(&self) -> usize {
        self.points_per_component
    }

    /// Component constants `C_k`, `k = 1..=G` (arithmetic means).
    pub fn constants(&self) -> &[Complex64] {
        &self.component_constants
    }

    /// Achieved flatness: worst deviation of `f` from its component
    /// constant, measured separately on real and imaginary parts, relative
    /// to `max(C, floor)` with `C = max_k |C_k|`.
    pub fn flatness(&self) -> f64 {
        self.flatness
    }

    /// `C = max_k |C_k|`, the constant entering the verdict bound.
    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn n_points(&self) -> usize {
        self.g_components * (self.points_per_component + 1)
    }

    pub fn n_intervals(&self) -> usize {
        self.n_points() - 1
    }

    /// Global index range of component `k` (1-based).
    pub fn component_range(&self, k: usize) -> Result<std::ops::Range<usize>, QuasicontError> {
        if k == 0 || k > self.g_components {
            return Err(QuasicontError::ComponentOutOfRange {
                k,
                g: self.g_components,
            });
        }
        let width = self.points_per_component + 1;
        Ok((k - 1) * width..k * width)
    }

    /// Local index `r_k` in `[0, P]` of global index `j` within component
    /// `k`; inverse of [`Self::global_index`].
    pub fn relabel(&self, k: usize, j: usize) -> Result<usize, QuasicontError> {
        let range = self.component_range(k)?;
        if !range.contains(&j) {
            return Err(QuasicontError::IndexOutOfComponent { j, k });
        }
        Ok(j - range.start)
    }

    /// Global index of local point `r_k` in component `k`.
    pub fn global_index(&self, k: usize, r: usize) -> Result<usize, QuasicontError> {
        if r > self.points_per_component {
            return Err(QuasicontError::IndexOutOfComponent { j: r, k });
        }
        let range = self.component_range(k)?;
        Ok(range.start + r)
    }
}

/// Mean, worst deviation and constants for one candidate component width.
fn evaluate_partition(values: &[Complex64], width: usize) -> (Vec<Complex64>, f64, f64) {
    let g = values.len() / width;
    let mut constants = Vec::with_capacity(g);
    let mut c_max = 0.0f64;
    for k in 0..g {
        let block = &values[k * width..(k + 1) * width];
        let mut acc = ComplexSum::new();
        for v in block {
            acc.add(*v);
        }
        let mean = acc.value() / width as f64;
        c_max = c_max.max(mean.norm());
        constants.push(mean);
    }
    let mut deviation = 0.0f64;
    for k in 0..g {
        let c = constants[k];
        for v in &values[k * width..(k + 1) * width] {
            deviation = deviation.max((v.re - c.re).abs()).max((v.im - c.im).abs());
        }
    }
    (constants, c_max, deviation)
}

fn divisors_descending(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1usize;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Searches every component width `P+1` dividing the point count for the
/// largest `P >= min_p` whose achieved flatness stays within `flatness_tol`.
///
/// Component constants are the arithmetic means of `f` over each component,
/// which makes the certificate deterministic. Real and imaginary parts must
/// both satisfy the flatness bound. When no width qualifies the function is
/// not in the admissible class and the nearest miss is reported.
pub fn decompose(
    sf: &SampledFunction,
    flatness_tol: f64,
    min_p: usize,
) -> Result<DecompositionCertificate, QuasicontError> {
    if !(flatness_tol.is_finite() && flatness_tol > 0.0) {
        return Err(QuasicontError::InvalidFlatnessTol(flatness_tol));
    }
    if min_p == 0 {
        return Err(QuasicontError::InvalidMinP);
    }
    let values = sf.values();
    let n_points = values.len();
    let floor = FLATNESS_FLOOR_REL * values.iter().map(|v| v.norm()).fold(0.0, f64::max);

    // Nearest miss, for the NotInL1Class report.
    let mut best: Option<(usize, f64)> = None;

    for width in divisors_descending(n_points) {
        let p = width - 1;
        if p < min_p {
            continue;
        }
        let (constants, c_max, deviation) = evaluate_partition(values, width);
        let scale = c_max.max(floor);
        let flatness = if deviation == 0.0 {
            0.0
        } else if scale > 0.0 {
            deviation / scale
        } else {
            f64::INFINITY
        };
        if flatness <= flatness_tol {
            // Widths are visited in descending order, so the first
            // admissible candidate has the largest P.
            return Ok(DecompositionCertificate {
                g_components: n_points / width,
                points_per_component: p,
                component_constants: constants,
                flatness,
                c_max,
            });
        }
        match best {
            Some((_, f)) if f <= flatness => {}
            _ => best = Some((p, flatness)),
        }
    }

    let (best_p, best_flatness) = best.unwrap_or((0, f64::INFINITY));
    Err(QuasicontError::NotInL1Class {
        best_p,
        best_flatness,
    })
}
