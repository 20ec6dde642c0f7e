//! Gauss-Legendre rules and the composite integrators built from them.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached 16-point rule used by the composite integrators.
fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Fixed Gauss-Legendre quadrature of `f` over [a, b].
pub fn integrate_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, points: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(points);
    let mid = 0.5 * (a + b);
    let len = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights[..]) {
        sum += w * f(mid + len * x);
    }
    sum * len
}

/// Adaptive composite Gauss quadrature over [a, b].
///
/// Splits an interval whenever the 16-point value and the sum over its two
/// halves disagree by more than the locally apportioned tolerance. Returns
/// the value and an error estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let (nodes, weights) = gl16();
        let mid = 0.5 * (a + b);
        let len = 0.5 * (b - a);
        let mut sum = 0.0;
        for (x, w) in nodes.iter().zip(&weights[..]) {
            sum += w * f(mid + len * x);
        }
        sum * len
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> (f64, f64) {
        let mid = 0.5 * (a + b);
        let left = panel(f, a, mid);
        let right = panel(f, mid, b);
        let diff = (left + right - whole).abs();
        if diff <= tol || depth >= 48 {
            return (left + right, diff);
        }
        let (lv, le) = recurse(f, a, mid, left, 0.5 * tol, depth + 1);
        let (rv, re) = recurse(f, mid, b, right, 0.5 * tol, depth + 1);
        (lv + rv, le + re)
    }
    if a == b {
        return (0.0, 0.0);
    }
    let whole = panel(f, a, b);
    recurse(f, a, b, whole, tol, 0)
}

/// Composite quadrature over [a, b] on panels graded geometrically (ratio
/// 1/2, `levels` halvings) toward both endpoints. Built for integrands that
/// steepen near the support edge, such as |f|^2 d^{-2m}.
pub fn integrate_graded<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, levels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mid = 0.5 * (a + b);
    let mut cuts = Vec::with_capacity(2 * levels + 2);
    // Panel edges accumulate toward `a` and toward `b`.
    for j in (0..=levels).rev() {
        cuts.push(a + (mid - a) * 0.5f64.powi(j as i32));
    }
    for j in 1..=levels {
        cuts.push(b - (b - mid) * 0.5f64.powi(j as i32));
    }
    let mut sum = 0.0;
    // Innermost slivers first: with 40 levels they are ~2^-40 of the
    // half-width, below which the integrands we meet contribute nothing.
    sum += integrate_fixed(&mut f, a, cuts[0], 12);
    sum += integrate_fixed(&mut f, *cuts.last().unwrap(), b, 12);
    for pair in cuts.windows(2) {
        sum += integrate_fixed(&mut f, pair[0], pair[1], 12);
    }
    sum
}

/// Adaptive tensor-product Gauss integration over an axis-aligned box in
/// `dim` dimensions (dim = 1, 2, 3). Returns value and error estimate.
pub fn integrate_box<F: Fn(&[f64; 3]) -> f64>(
    f: &F,
    lo: [f64; 3],
    hi: [f64; 3],
    dim: usize,
    tol: f64,
) -> (f64, f64) {
    fn tensor<F: Fn(&[f64; 3]) -> f64>(
        f: &F,
        lo: &[f64; 3],
        hi: &[f64; 3],
        dim: usize,
        pts: usize,
    ) -> f64 {
        let (nodes, weights) = gauss_legendre(pts);
        let map = |k: usize, t: f64| 0.5 * (lo[k] + hi[k]) + 0.5 * (hi[k] - lo[k]) * t;
        let mut sum = 0.0;
        match dim {
            1 => {
                for (x, wx) in nodes.iter().zip(&weights[..]) {
                    sum += wx * f(&[map(0, *x), 0.0, 0.0]);
                }
            }
            2 => {
                for (x, wx) in nodes.iter().zip(&weights[..]) {
                    for (y, wy) in nodes.iter().zip(&weights[..]) {
                        sum += wx * wy * f(&[map(0, *x), map(1, *y), 0.0]);
                    }
                }
            }
            3 => {
                for (x, wx) in nodes.iter().zip(&weights[..]) {
                    for (y, wy) in nodes.iter().zip(&weights[..]) {
                        for (z, wz) in nodes.iter().zip(&weights[..]) {
                            sum += wx * wy * wz * f(&[map(0, *x), map(1, *y), map(2, *z)]);
                        }
                    }
                }
            }
            _ => unreachable!("dim checked by callers"),
        }
        let mut scale = 1.0;
        for k in 0..dim {
            scale *= 0.5 * (hi[k] - lo[k]);
        }
        sum * scale
    }

    fn recurse<F: Fn(&[f64; 3]) -> f64>(
        f: &F,
        lo: [f64; 3],
        hi: [f64; 3],
        dim: usize,
        tol: f64,
        depth: usize,
    ) -> (f64, f64) {
        let coarse = tensor(f, &lo, &hi, dim, 6);
        let fine = tensor(f, &lo, &hi, dim, 10);
        let diff = (fine - coarse).abs();
        if diff <= tol || depth >= 18 {
            return (fine, diff);
        }
        // Split along every axis and recurse on the 2^dim children.
        let mut value = 0.0;
        let mut err = 0.0;
        let children = 1usize << dim;
        for mask in 0..children {
            let mut clo = lo;
            let mut chi = hi;
            for (k, (l, h)) in clo.iter_mut().zip(chi.iter_mut()).enumerate().take(dim) {
                let mid = 0.5 * (lo[k] + hi[k]);
                if mask >> k & 1 == 0 {
                    *h = mid;
                } else {
                    *l = mid;
                }
            }
            let (v, e) = recurse(f, clo, chi, dim, tol / children as f64, depth + 1);
            value += v;
            err += e;
        }
        (value, err)
    }

    recurse(f, lo, hi, dim, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        for n in [2usize, 5, 16, 32] {
            let (nodes, weights) = gauss_legendre(n);
            assert_eq!(nodes.len(), n);
            let total: f64 = weights.iter().sum();
            assert_relative_eq!(total, 2.0, epsilon = 1e-13);
            // x^(2n-2) is the highest even power integrated exactly.
            let p = 2 * n as i32 - 2;
            let exact = 2.0 / (p as f64 + 1.0);
            let quad: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(p))
                .sum();
            assert_relative_eq!(quad, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn adaptive_handles_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let (v, e) = integrate_adaptive(&f, 0.0, 1.0, 1e-12);
        let exact = 0.5 * (0.3f64.powi(2) + 0.7f64.powi(2));
        assert!((v - exact).abs() <= 1e-10 + e);
    }

    #[test]
    fn graded_resolves_log_integrand() {
        // int_eps^1 dx/x = ln(1/eps)
        let eps = 1e-6;
        let v = integrate_graded(|x| 1.0 / x, eps, 1.0, 40);
        assert_relative_eq!(v, -(eps.ln()), epsilon = 1e-10);
    }

    #[test]
    fn box_integrator_matches_product() {
        let f = |x: &[f64; 3]| (x[0] * x[1]).sin().powi(2) + 1.0;
        let (v, e) = integrate_box(&f, [0.0, 0.0, 0.0], [1.0, 2.0, 0.0], 2, 1e-11);
        // Reference from a dense fixed rule.
        let mut reference = 0.0;
        let (nodes, weights) = gauss_legendre(60);
        for (x, wx) in nodes.iter().zip(&weights) {
            for (y, wy) in nodes.iter().zip(&weights) {
                let px = 0.5 + 0.5 * x;
                let py = 1.0 + y;
                reference += wx * wy * 0.5 * 1.0 * ((px * py).sin().powi(2) + 1.0);
            }
        }
        assert!((v - reference).abs() <= 1e-9 + e);
    }
}
