//! Discrete sine transform (DST-I) on top of a complex FFT.

use rustfft::{num_complex::Complex, FftPlanner};

/// DST-I of `values`: out[k-1] = sum_{j=1}^{M} values[j-1] * sin(pi j k / (M+1))
/// for k = 1..=M, where M = values.len().
///
/// Computed through a length-2(M+1) complex FFT of the odd extension, so the
/// cost is O(M log M) for any M.
pub fn dst_i(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    if m == 0 {
        return Vec::new();
    }
    let n = m + 1;
    let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
    for (j, v) in values.iter().enumerate() {
        buf[j + 1].re = *v;
        buf[2 * n - 1 - j].re = -*v;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(2 * n);
    fft.process(&mut buf);
    // With F_k = sum_j x_j e^{-2pi i jk / 2n} and the odd extension,
    // Im(F_k) = -2 sum_{j=1}^{M} x_j sin(pi jk/n).
    (1..=m).map(|k| -0.5 * buf[k].im).collect()
}

/// Inverse of [`dst_i`] up to normalization: DST-I is its own inverse after
/// scaling by 2/(M+1).
pub fn dst_i_inverse(coeffs: &[f64]) -> Vec<f64> {
    let m = coeffs.len();
    let scale = 2.0 / (m as f64 + 1.0);
    dst_i(coeffs).into_iter().map(|v| v * scale).collect()
}
