//! Quadratic forms, weighted norms and sharpness sequences on 1D grids.
//!
//! `qform_1d` evaluates the integral of |f^(m)|^2 by sine-series
//! differentiation (the odd extension through the interval endpoints makes
//! the series exact for smooth data vanishing there), cross-checked by an
//! order-4 central finite-difference route; the two must agree to 1e-4
//! relative or the call fails loudly. `weighted_norm` integrates
//! |f|^2 d^{-2m} (or the a_m variant) on panels graded toward the region
//! boundary. `hardy_ratio_1d` combines the two into the ratio whose
//! supremum over admissible f is exactly 1.

use crate::dst::dst_i;
use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::pseudodistance::pseudodistance;
use crate::quadrature::integrate_graded;
use crate::sampling;
use crate::spherequad::{build_rule, HardyConstants};
use rand::Rng;

const PI: f64 = std::f64::consts::PI;

/// A sampled test function on a uniform grid over [start, start + step*(len-1)].
///
/// Endpoint samples must vanish so the odd periodic extension is
/// continuous; the support margin (cells between the support and each end)
/// is tracked for the integrators.
#[derive(Debug, Clone)]
pub struct GridFunction {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 9 {
            return Err(Error::InvalidArgument("grid needs at least 9 samples".into()));
        }
        if !step.is_finite() || !start.is_finite() || step <= 0.0 {
            return Err(Error::InvalidArgument("grid origin and spacing must be finite".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid samples must be finite".into()));
        }
        // Endpoint samples must vanish for the odd extension; values within
        // rounding of zero (sin(pi) and friends) are snapped.
        let mut values = values;
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let last = values.len() - 1;
        for j in [0, last] {
            if values[j].abs() <= 1e-12 * scale {
                values[j] = 0.0;
            }
        }
        if values[0] != 0.0 || values[last] != 0.0 {
            return Err(Error::SupportTooNarrow { need: 1, found: 0 });
        }
        Ok(GridFunction { start, step, values })
    }

    /// Samples `f` on `panels + 1` uniform points over [a, b].
    pub fn sample(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = (b - a) / panels as f64;
        let values = (0..=panels).map(|j| f(a + j as f64 * step)).collect();
        GridFunction::new(a, step, values)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn support_cells(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        Some((first, last))
    }

    /// Cells between the support and the nearer interval end.
    pub fn support_margin_cells(&self) -> usize {
        match self.support_cells() {
            Some((first, last)) => first.min(self.values.len() - 1 - last),
            None => self.values.len(),
        }
    }

    /// Order-8 local Lagrange interpolation.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = (x - self.start) / self.step;
        if t <= 0.0 || t >= (n - 1) as f64 {
            return 0.0;
        }
        let center = t.floor() as usize;
        let lo = center.saturating_sub(3).min(n - 8);
        let mut acc = 0.0;
        for j in lo..lo + 8 {
            let mut w = 1.0;
            for k in lo..lo + 8 {
                if k != j {
                    w *= (t - k as f64) / (j as f64 - k as f64);
                }
            }
            acc += w * self.values[j];
        }
        acc
    }
}

/// Sine-series coefficients of the grid data (odd extension convention).
fn sine_coefficients(f: &GridFunction) -> Vec<f64> {
    let n_panels = f.values.len() - 1;
    let interior = &f.values[1..n_panels];
    let mut coeffs = dst_i(interior);
    let scale = 2.0 / n_panels as f64;
    for c in &mut coeffs {
        *c *= scale;
    }
    coeffs
}

/// Integral of |f^(m)|^2 by spectral differentiation with an order-4
/// finite-difference cross-check.
pub fn qform_1d(f: &GridFunction, m: u32) -> Result<f64> {
    if !(1..=3).contains(&m) {
        return Err(Error::InvalidArgument("order m must be 1, 2 or 3".into()));
    }
    let length = f.end() - f.start;
    let coeffs = sine_coefficients(f);
    let mut spectral = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let k = (i + 1) as f64;
        let factor = (k * PI / length).powi(m as i32);
        spectral += (c * factor) * (c * factor);
    }
    spectral *= 0.5 * length;

    let fd = qform_finite_difference(f, m);
    let denom = spectral.abs().max(fd.abs());
    if denom > 0.0 && (spectral - fd).abs() > 1e-4 * denom {
        return Err(Error::DifferentiationDisagreement {
            spectral,
            finite_difference: fd,
        });
    }
    Ok(spectral)
}

/// Order-4 central differences with odd extension through the endpoints.
fn qform_finite_difference(f: &GridFunction, m: u32) -> f64 {
    let n = f.values.len() as i64;
    let h = f.step;
    let at = |j: i64| -> f64 {
        // Odd reflection: f(-x) = -f(x) around both interval ends.
        if j >= 0 && j < n {
            f.values[j as usize]
        } else if j < 0 {
            -f.values[(-j) as usize]
        } else {
            let r = 2 * (n - 1) - j;
            -f.values[r as usize]
        }
    };
    let stencil: (&[f64], f64) = match m {
        1 => (&[1.0, -8.0, 0.0, 8.0, -1.0], 12.0 * h),
        2 => (&[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0 * h * h),
        _ => (&[1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0], 8.0 * h * h * h),
    };
    let half = (stencil.0.len() / 2) as i64;
    let mut sum = 0.0;
    for j in 0..n {
        let mut d = 0.0;
        for (o, c) in stencil.0.iter().enumerate() {
            d += c * at(j + o as i64 - half);
        }
        d /= stencil.1;
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        sum += w * d * d;
    }
    sum * h
}

/// Weight selector for [`weighted_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// d(x)^{-2m}
    InverseD,
    /// a_m(x)^{-2m}
    InverseAm,
}

/// Integral of |f|^2 w over the region, with w = d^{-2m} or a_m^{-2m}.
///
/// Composite Gauss panels graded geometrically (ratio 1/2, 40 levels)
/// toward the ends of every region component meeting the support.
pub fn weighted_norm(f: &GridFunction, region: &Region, m: u32, weight: Weight) -> Result<f64> {
    if region.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: region.dim(),
        });
    }
    let (first, last) = match f.support_cells() {
        Some(range) => range,
        None => return Ok(0.0),
    };
    // Every point carrying mass must be strictly inside the region.
    for j in first..=last {
        let x = f.start + j as f64 * f.step;
        if f.values[j] != 0.0 && !region.contains(&Point::new1(x)) {
            return Err(Error::SupportTouchesBoundary);
        }
    }
    let support_lo = f.start + (first.saturating_sub(1)) as f64 * f.step;
    let support_hi = f.start + (last + 1).min(f.values.len() - 1) as f64 * f.step;

    let rule1 = build_rule(1, 1)?;
    let integrand = |x: f64| -> f64 {
        if !region.contains(&Point::new1(x)) {
            return 0.0;
        }
        let v = f.interpolate(x);
        if v == 0.0 {
            return 0.0;
        }
        let w = match weight {
            Weight::InverseD => region
                .distance(&Point::new1(x))
                .map(|d| d.powi(-2 * m as i32))
                .unwrap_or(0.0),
            Weight::InverseAm => pseudodistance(region, &Point::new1(x), m as f64, &rule1)
                .map(|a| if a.is_finite() { a.powi(-2 * m as i32) } else { 0.0 })
                .unwrap_or(0.0),
        };
        v * v * w
    };

    // Intersect the support with each region component and grade toward the
    // component ends, where the weight steepens.
    let mut total = 0.0;
    let components = component_intervals(region)?;
    for (a, b) in components {
        let lo = a.max(support_lo);
        let hi = b.min(support_hi);
        if lo < hi {
            total += integrate_graded(integrand, lo, hi, 40);
        }
    }
    Ok(total)
}

/// Connected components of a 1D region, in ascending order.
fn component_intervals(region: &Region) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = region.bounding_box().ok_or(Error::UnboundedWithoutWindow)?;
    // Probe the bounding interval with the region's own ray machinery: walk
    // from the left edge, hopping across components via line slices.
    let mut slices = Vec::new();
    let x = [lo[0] - 1.0, 0.0, 0.0];
    region.shape().line_slices(&x, &[1.0, 0.0, 0.0], &mut slices);
    crate::geometry::merge_slices(&mut slices);
    Ok(slices
        .iter()
        .map(|&(s0, s1)| (x[0] + s0, x[0] + s1))
        .filter(|&(a, b)| b > lo[0] - 1.5 && a < hi[0] + 1.0)
        .collect())
}

/// The Hardy-Rellich ratio rho = A(m,1) * weighted_norm(f, d^{-2m}) / Q_m(f).
/// rho <= 1 for every admissible f.
pub fn hardy_ratio_1d(f: &GridFunction, region: &Region, m: u32) -> Result<f64> {
    let q = qform_1d(f, m)?;
    if q == 0.0 {
        return Err(Error::ZeroForm);
    }
    let w = weighted_norm(f, region, m, Weight::InverseD)?;
    let constants = HardyConstants::integer(m, 1)?;
    Ok(constants.sharp_constant * w / q)
}

/// Parameters of the boundary-concentrating sequence g_n(x) = x^{m-1/2} phi_n(x).
#[derive(Debug, Clone, Copy)]
pub struct OptimalityParams {
    pub m: u32,
    /// Cutoff index; the plateau is [2/n, 1].
    pub n: u32,
    /// Smoothstep order of the joins; defaults to 2m+3 via [`OptimalityParams::new`].
    pub smoothstep_order: u32,
}

impl OptimalityParams {
    pub fn new(m: u32, n: u32) -> Self {
        OptimalityParams {
            m,
            n,
            smoothstep_order: 2 * m + 3,
        }
    }
}

/// Polynomial smoothstep of order p: C^p joins with plateaus at 0 and 1.
/// Bernstein (binomial-CDF) form, all terms positive, so no cancellation
/// even at high order.
fn smoothstep(p: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let degree = 2 * p + 1;
    let mut sum = 0.0;
    for j in (p + 1)..=degree {
        sum += binomial(degree, j) * t.powi(j as i32) * (1.0 - t).powi((degree - j) as i32);
    }
    sum
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Builds the n-th function of the sharpness sequence on (0, 4):
/// zero off [1/n, 2], one on [2/n, 1], smooth monotone joins whose j-th
/// derivatives scale like n^j on the inner join.
pub fn optimality_sequence(params: &OptimalityParams, grid_panels: usize) -> Result<GridFunction> {
    if params.n < 2 {
        return Err(Error::InvalidArgument("cutoff index n must be at least 2".into()));
    }
    let h = 4.0 / grid_panels as f64;
    let max_h = 1.0 / (8.0 * params.n as f64);
    if h > max_h {
        return Err(Error::GridTooCoarse {
            n: params.n,
            max_h,
            h,
        });
    }
    let n = params.n as f64;
    let p = params.smoothstep_order;
    let power = params.m as f64 - 0.5;
    let profile = move |x: f64| -> f64 {
        if x <= 1.0 / n || x >= 2.0 {
            0.0
        } else if x < 2.0 / n {
            smoothstep(p, n * x - 1.0)
        } else if x <= 1.0 {
            1.0
        } else {
            1.0 - smoothstep(p, x - 1.0)
        }
    };
    GridFunction::sample(0.0, 4.0, grid_panels, |x| {
        let phi = profile(x);
        if phi == 0.0 {
            0.0
        } else {
            x.powf(power) * phi
        }
    })
}

/// Seeded superposition of C-infinity bumps strictly inside (0, 1); the
/// fuzz corpus for the ratio bound.
pub fn random_test_function(seed: u64, grid_panels: usize) -> Result<GridFunction> {
    let mut rng = sampling::rng_for(seed);
    let bumps = rng.gen_range(2..=6);
    let mut profile: Vec<(f64, f64, f64)> = Vec::with_capacity(bumps);
    for _ in 0..bumps {
        let center: f64 = rng.gen_range(0.2..0.8);
        let max_hw = (center - 0.08).min(0.92 - center).min(0.22);
        let hw = rng.gen_range(0.055..max_hw.max(0.056));
        let amp = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        profile.push((center, hw, amp));
    }
    GridFunction::sample(0.0, 1.0, grid_panels, |x| {
        let mut v = 0.0;
        for &(c, hw, a) in &profile {
            let t = (x - c) / hw;
            if t.abs() < 1.0 {
                v += a * (1.0 - 1.0 / (1.0 - t * t)).exp();
            }
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{IntervalUnion, Region};
    use crate::quadrature::integrate_adaptive;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn unit_interval() -> Region {
        Region::new(1, Arc::new(IntervalUnion::new(vec![(0.0, 1.0)]).unwrap())).unwrap()
    }

    fn sine() -> GridFunction {
        GridFunction::sample(0.0, 1.0, 2048, |x| (PI * x).sin()).unwrap()
    }

    #[test]
    fn qform_of_sine_modes() {
        let f = sine();
        assert_relative_eq!(qform_1d(&f, 1).unwrap(), PI * PI / 2.0, max_relative = 1e-10);
        assert_relative_eq!(qform_1d(&f, 2).unwrap(), PI.powi(4) / 2.0, max_relative = 1e-10);

        let zero = GridFunction::sample(0.0, 1.0, 64, |_| 0.0).unwrap();
        assert_eq!(qform_1d(&zero, 1).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm_of_sine_matches_adaptive_oracle() {
        let f = sine();
        let region = unit_interval();
        let w = weighted_norm(&f, &region, 1, Weight::InverseD).unwrap();
        let (oracle, err) = integrate_adaptive(
            &|x: f64| {
                let d = x.min(1.0 - x);
                let s = (PI * x).sin();
                s * s / (d * d)
            },
            1e-9,
            1.0 - 1e-9,
            1e-11,
        );
        // The oracle clips a 2e-9 sliver where the integrand is ~pi^2 x^0.
        assert!((w - oracle).abs() <= 1e-6 + 10.0 * err, "{w} vs {oracle}");
        assert!((w - 7.64).abs() < 0.01);
    }

    #[test]
    fn weighted_norm_orderings() {
        let f = sine();
        let region = unit_interval();
        let wd = weighted_norm(&f, &region, 1, Weight::InverseD).unwrap();
        let wa = weighted_norm(&f, &region, 1, Weight::InverseAm).unwrap();
        // In 1D the pseudodistance equals d, so the two weights coincide.
        assert!(wa <= wd * (1.0 + 1e-9));
        assert_relative_eq!(wa, wd, max_relative = 1e-9);

        let zero = GridFunction::sample(0.0, 1.0, 64, |_| 0.0).unwrap();
        assert_eq!(
            weighted_norm(&zero, &region, 1, Weight::InverseD).unwrap(),
            0.0
        );
    }

    #[test]
    fn hardy_ratio_anchor_and_invariance() {
        let region = unit_interval();
        let rho = hardy_ratio_1d(&sine(), &region, 1).unwrap();
        assert!((rho - 0.387).abs() < 0.005, "rho = {rho}");

        // Translation / rescaling leaves the ratio unchanged.
        let shifted = GridFunction::sample(2.0, 5.0, 2048, |x| (PI * (x - 2.0) / 3.0).sin()).unwrap();
        let big = Region::new(1, Arc::new(IntervalUnion::new(vec![(2.0, 5.0)]).unwrap())).unwrap();
        let rho2 = hardy_ratio_1d(&shifted, &big, 1).unwrap();
        assert_relative_eq!(rho, rho2, max_relative = 1e-8);

        let zero = GridFunction::sample(0.0, 1.0, 64, |_| 0.0).unwrap();
        assert!(matches!(
            hardy_ratio_1d(&zero, &region, 1),
            Err(Error::ZeroForm)
        ));
    }

    #[test]
    fn fuzz_ratios_stay_below_one() {
        let region = unit_interval();
        for m in 1..=3u32 {
            for case in 0..25u64 {
                let f = random_test_function(1000 * m as u64 + case, 8192).unwrap();
                let rho = hardy_ratio_1d(&f, &region, m).unwrap();
                assert!(rho <= 1.0 + 1e-6, "m={m} case={case}: rho={rho}");
                assert!(rho > 0.0);
            }
        }
    }

    #[test]
    fn optimality_sequence_grows_logarithmically() {
        let params = OptimalityParams::new(1, 8);
        let g = optimality_sequence(&params, 4096).unwrap();
        let region = Region::new(1, Arc::new(IntervalUnion::new(vec![(0.0, 4.0)]).unwrap())).unwrap();
        let w = weighted_norm(&g, &region, 1, Weight::InverseD).unwrap();
        // At least ln(n)/2; the exact plateau contribution is ln(n/2).
        assert!(w >= (8f64).ln() / 2.0, "w = {w}");
        assert!(w >= (4f64).ln());

        let rho = hardy_ratio_1d(&g, &region, 1).unwrap();
        assert!(rho <= 1.0 + 1e-6);
    }

    #[test]
    fn optimality_sequence_needs_fine_grids() {
        let params = OptimalityParams::new(1, 64);
        assert!(matches!(
            optimality_sequence(&params, 256),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn smoothstep_is_monotone_plateaued() {
        for p in [3u32, 5, 9] {
            assert_eq!(smoothstep(p, 0.0), 0.0);
            assert_eq!(smoothstep(p, 1.0), 1.0);
            let mut prev = 0.0;
            for j in 0..=100 {
                let v = smoothstep(p, j as f64 / 100.0);
                assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
        assert_relative_eq!(smoothstep(1, 0.5), 0.5);
    }
}
