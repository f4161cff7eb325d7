//! Time-axis sampling helpers shared by the sweep and verdict code.

/// `n` logarithmically spaced points covering `[lo, hi]`, endpoints included.
///
/// Requires `lo > 0` and `hi >= lo`. The last point is pinned to `hi`
/// exactly so window-edge comparisons are reproducible.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo, "log_spaced needs 0 < lo <= hi");
    assert!(n >= 1);
    if n == 1 || hi == lo {
        return vec![lo];
    }
    let log_lo = lo.ln();
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| (log_lo + step * i as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// `n` linearly spaced points covering `[lo, hi]`, endpoints included.
pub fn lin_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi >= lo, "lin_spaced needs lo <= hi");
    assert!(n >= 1);
    if n == 1 || hi == lo {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    out[n - 1] = hi;
    out
}
