//! Quadrature on the unit sphere S^{N-1} under the *normalized* surface
//! measure, plus the product constants of the sharp Hardy-Rellich bound.

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::quadrature::gauss_legendre;

/// Nodes and weights of a rule on S^{N-1}; weights sum to one.
#[derive(Debug, Clone)]
pub struct SphericalRule {
    dim: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphericalRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    pub fn directions(&self) -> Result<Vec<Direction>> {
        self.nodes
            .iter()
            .map(|n| Direction::new(&n[..self.dim]))
            .collect()
    }
}

/// Default node budget: enough to integrate the degree-2m moment exactly
/// with headroom for the d_omega^{-2m} integrands.
pub fn default_resolution(m: u32) -> usize {
    (2 * m as usize + 2).max(16)
}

/// Builds the rule for S^{N-1}.
///
/// * N = 1: the two atoms {+1, -1}, weight 1/2 each (exact).
/// * N = 2: `resolution` equally spaced angles with equal weights; exact on
///   trigonometric polynomials of degree < resolution.
/// * N = 3: Gauss-Legendre in cos(theta) with `resolution` nodes times
///   2*resolution uniform azimuths; exact on polynomials of total degree
///   <= 2*resolution - 1.
pub fn build_rule(dim: usize, resolution: usize) -> Result<SphericalRule> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be at least 1".into()));
    }
    match dim {
        1 => Ok(SphericalRule {
            dim,
            nodes: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            weights: vec![0.5, 0.5],
        }),
        2 => {
            let mut nodes = Vec::with_capacity(resolution);
            let weights = vec![1.0 / resolution as f64; resolution];
            for j in 0..resolution {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / resolution as f64;
                nodes.push([theta.cos(), theta.sin(), 0.0]);
            }
            Ok(SphericalRule { dim, nodes, weights })
        }
        3 => {
            let (gl_nodes, gl_weights) = gauss_legendre(resolution);
            let azimuths = 2 * resolution;
            let mut nodes = Vec::with_capacity(resolution * azimuths);
            let mut weights = Vec::with_capacity(resolution * azimuths);
            for (u, wu) in gl_nodes.iter().zip(&gl_weights) {
                let r = (1.0 - u * u).max(0.0).sqrt();
                for j in 0..azimuths {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / azimuths as f64;
                    nodes.push([r * phi.cos(), r * phi.sin(), *u]);
                    // GL weights sum to 2; the normalized measure is du/2 * dphi/2pi.
                    weights.push(wu * 0.5 / azimuths as f64);
                }
            }
            Ok(SphericalRule { dim, nodes, weights })
        }
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Quadrature moment: sum_k w_k <xi, omega_k>^{2m}. Up to rule exactness
/// this equals moment_constant(m, N) * |xi|^{2m}.
pub fn moment(rule: &SphericalRule, xi: &[f64], m: u32) -> Result<f64> {
    if xi.len() != rule.dim {
        return Err(Error::DimensionMismatch {
            expected: rule.dim,
            got: xi.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("moment order m must be at least 1".into()));
    }
    let mut sum = 0.0;
    for (node, w) in rule.iter() {
        let mut ip = 0.0;
        for (k, x) in xi.iter().enumerate() {
            ip += x * node[k];
        }
        sum += w * ip.powi(2 * m as i32);
    }
    Ok(sum)
}

/// The product constants attached to order m in dimension N.
///
/// * `double_factorial` D = (2m-1)(2m-3)...1
/// * `dim_product`      P = (N+2m-2)(N+2m-4)...N      (m factors each)
/// * `sharp_constant`   A = P*D / 4^m
/// * `moment_constant`  D/P, the value of the normalized moment integral.
///
/// Non-integer m >= 1 is supported through the Gamma-function form
/// D(m) = 2^m G(m+1/2)/G(1/2), P(N,m) = 2^m G(N/2+m)/G(N/2), which agrees
/// with the integer products.
#[derive(Debug, Clone, Copy)]
pub struct HardyConstants {
    pub m: f64,
    pub dim: usize,
    pub double_factorial: f64,
    pub dim_product: f64,
    pub sharp_constant: f64,
    pub moment_constant: f64,
}

impl HardyConstants {
    pub fn integer(m: u32, dim: usize) -> Result<Self> {
        if m == 0 || dim == 0 {
            return Err(Error::InvalidArgument("need m >= 1 and N >= 1".into()));
        }
        let mut d = 1.0;
        let mut p = 1.0;
        for k in 0..m {
            d *= (2 * (m - k) - 1) as f64;
            p *= (dim as u32 + 2 * k) as f64;
        }
        Ok(Self::assemble(m as f64, dim, d, p))
    }

    pub fn real(m: f64, dim: usize) -> Result<Self> {
        if !m.is_finite() || m < 1.0 || dim == 0 {
            return Err(Error::InvalidArgument("need m >= 1 and N >= 1".into()));
        }
        if m.fract() == 0.0 && m <= u32::MAX as f64 {
            return Self::integer(m as u32, dim);
        }
        let two_m = 2f64.powf(m);
        let d = two_m * libm::tgamma(m + 0.5) / libm::tgamma(0.5);
        let half_n = dim as f64 / 2.0;
        let p = two_m * libm::tgamma(half_n + m) / libm::tgamma(half_n);
        Ok(Self::assemble(m, dim, d, p))
    }

    fn assemble(m: f64, dim: usize, d: f64, p: f64) -> Self {
        HardyConstants {
            m,
            dim,
            double_factorial: d,
            dim_product: p,
            sharp_constant: p * d / 4f64.powf(m),
            moment_constant: d / p,
        }
    }

    /// k_m for convex regions: a_m <= (P/D)^{1/2m} d.
    pub fn convex_comparison(&self) -> f64 {
        (self.dim_product / self.double_factorial).powf(1.0 / (2.0 * self.m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rules_are_normalized() {
        for (dim, res) in [(1, 4), (2, 8), (3, 16)] {
            let rule = build_rule(dim, res).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-14);
            for (node, _) in rule.iter() {
                let n = (node[0] * node[0] + node[1] * node[1] + node[2] * node[2]).sqrt();
                assert_relative_eq!(n, 1.0, epsilon = 1e-12);
            }
        }
        let s0 = build_rule(1, 99).unwrap();
        assert_eq!(s0.len(), 2);
        let circle = build_rule(2, 8).unwrap();
        assert_eq!(circle.len(), 8);
        assert!(circle.weights.iter().all(|w| (w - 0.125).abs() < 1e-15));
        let sphere = build_rule(3, 16).unwrap();
        assert_eq!(sphere.len(), 16 * 32);
        assert!(matches!(build_rule(4, 8), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn constants_match_products() {
        let c = HardyConstants::integer(1, 7).unwrap();
        assert_relative_eq!(c.sharp_constant, 7.0 / 4.0);

        let c = HardyConstants::integer(2, 1).unwrap();
        assert_eq!(c.double_factorial, 3.0);
        assert_eq!(c.dim_product, 3.0);
        assert_relative_eq!(c.sharp_constant, 9.0 / 16.0);

        let c = HardyConstants::integer(2, 3).unwrap();
        assert_eq!(c.double_factorial, 3.0);
        assert_eq!(c.dim_product, 15.0);
        assert_relative_eq!(c.sharp_constant, 45.0 / 16.0);

        // A(m, 1) = D^2/4^m and momentConstant(1,1) = 1.
        for m in 1..=4 {
            let c = HardyConstants::integer(m, 1).unwrap();
            assert_relative_eq!(
                c.sharp_constant,
                c.double_factorial * c.double_factorial / 4f64.powi(m as i32)
            );
        }
        assert_eq!(HardyConstants::integer(1, 1).unwrap().moment_constant, 1.0);
    }

    #[test]
    fn gamma_form_agrees_with_integer_products() {
        for m in 1..=4u32 {
            for dim in 1..=3usize {
                let a = HardyConstants::integer(m, dim).unwrap();
                // Force the gamma route by perturbing m infinitesimally.
                let two_m = 2f64.powf(m as f64);
                let d = two_m * libm::tgamma(m as f64 + 0.5) / libm::tgamma(0.5);
                let p = two_m * libm::tgamma(dim as f64 / 2.0 + m as f64)
                    / libm::tgamma(dim as f64 / 2.0);
                assert_relative_eq!(a.double_factorial, d, max_relative = 1e-13);
                assert_relative_eq!(a.dim_product, p, max_relative = 1e-13);
            }
        }
        // And the real-m constructor interpolates sensibly.
        let c = HardyConstants::real(1.5, 2).unwrap();
        assert!(c.double_factorial > 1.0 && c.double_factorial < 3.0);
    }

    #[test]
    fn moment_anchors() {
        // N = 1: <xi, +-1>^{2m} = xi^{2m}, and D/P = 1.
        let rule = build_rule(1, 1).unwrap();
        for m in 1..=3 {
            assert_relative_eq!(moment(&rule, &[1.0], m).unwrap(), 1.0);
        }

        // N = 2, m = 1: average of cos^2 is 1/2.
        let rule = build_rule(2, default_resolution(1)).unwrap();
        assert_relative_eq!(moment(&rule, &[1.0, 0.0], 1).unwrap(), 0.5, epsilon = 1e-14);

        // N = 3, m = 2: D(2)/P(3,2) = 3/15 = 0.2.
        let rule = build_rule(3, default_resolution(2)).unwrap();
        assert_relative_eq!(
            moment(&rule, &[0.0, 0.0, 1.0], 2).unwrap(),
            0.2,
            epsilon = 1e-13
        );

        assert!(matches!(
            moment(&rule, &[1.0, 0.0], 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn moment_is_homogeneous() {
        let rule = build_rule(3, 16).unwrap();
        let xi = [0.3, -1.2, 0.7];
        let scaled: Vec<f64> = xi.iter().map(|x| 2.5 * x).collect();
        let m = 2;
        let a = moment(&rule, &xi, m).unwrap();
        let b = moment(&rule, &scaled, m).unwrap();
        assert_relative_eq!(b, 2.5f64.powi(4) * a, max_relative = 1e-13);
    }
}
