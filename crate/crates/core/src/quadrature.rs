//! Radial quadrature and finite differences on uniform grids starting at r = 0.
//!
//! All integrals are over R^N for radial integrands, i.e. with the surface
//! weight `omega_{N-1} r^{N-1}` (omega_0 = 2 so that N = 1 counts both
//! half-lines). Derivatives use fourth-order stencils, reflecting evenly
//! through the origin and switching to one-sided stencils at the outer end.

use std::f64::consts::PI;

/// Surface measure of the unit sphere in R^N (omega_{N-1}).
pub fn sphere_measure(dim: u32) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("dimension {dim} not supported"),
    }
}

/// Composite Simpson weights for `n + 1` equally spaced samples.
///
/// Odd interval counts finish with Simpson's 3/8 rule on the last three
/// intervals. Requires at least two intervals.
pub fn simpson_weights(n_points: usize, h: f64) -> Vec<f64> {
    assert!(n_points >= 3, "Simpson needs at least three samples");
    let n = n_points - 1;
    let mut w = vec![0.0; n_points];
    let simpson_end = if n % 2 == 0 { n } else { n - 3 };
    for i in (0..simpson_end).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if simpson_end != n {
        let k = simpson_end;
        w[k] += 3.0 * h / 8.0;
        w[k + 1] += 9.0 * h / 8.0;
        w[k + 2] += 9.0 * h / 8.0;
        w[k + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Radial quadrature rule: Simpson weights times `omega r^{N-1}`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    weights: Vec<f64>,
}

impl RadialRule {
    pub fn new(dim: u32, step: f64, n_points: usize) -> Self {
        let omega = sphere_measure(dim);
        let weights = simpson_weights(n_points, step)
            .into_iter()
            .enumerate()
            .map(|(i, w)| w * omega * (i as f64 * step).powi(dim as i32 - 1))
            .collect();
        RadialRule { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, integrand: &[f64]) -> f64 {
        debug_assert_eq!(integrand.len(), self.weights.len());
        self.weights.iter().zip(integrand).map(|(w, f)| w * f).sum()
    }

    pub fn integrate_with<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }
}

#[inline]
fn even_sample(values: &[f64], i: isize) -> f64 {
    values[i.unsigned_abs()]
}

/// First derivative, fourth order. `values[0]` sits at r = 0.
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "derivative stencil needs at least five samples");
    let mut d = vec![0.0; n];
    for i in 0..n - 2 {
        let k = i as isize;
        d[i] = (even_sample(values, k - 2) - 8.0 * even_sample(values, k - 1)
            + 8.0 * values[i + 1]
            - values[i + 2])
            / (12.0 * h);
    }
    let f = |j: usize| values[n - 1 - j];
    d[n - 2] = (3.0 * f(0) + 10.0 * f(1) - 18.0 * f(2) + 6.0 * f(3) - f(4)) / (12.0 * h);
    d[n - 1] = (25.0 * f(0) - 48.0 * f(1) + 36.0 * f(2) - 16.0 * f(3) + 3.0 * f(4)) / (12.0 * h);
    d
}

/// Second derivative, fourth order in the interior.
pub fn second_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 6, "second-derivative stencil needs at least six samples");
    let h2 = 12.0 * h * h;
    let mut d = vec![0.0; n];
    for i in 0..n - 2 {
        let k = i as isize;
        d[i] = (-even_sample(values, k - 2) + 16.0 * even_sample(values, k - 1) - 30.0 * values[i]
            + 16.0 * values[i + 1]
            - values[i + 2])
            / h2;
    }
    let f = |j: usize| values[n - 1 - j];
    d[n - 2] = (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5)) / h2;
    d[n - 1] =
        (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4) - 10.0 * f(5)) / h2;
    d
}

/// Radial Laplacian u'' + (N-1)/r u'; at the origin the limit N u''(0).
pub fn radial_laplacian(dim: u32, values: &[f64], h: f64) -> Vec<f64> {
    let d1 = derivative(values, h);
    let d2 = second_derivative(values, h);
    let nm1 = dim as f64 - 1.0;
    (0..values.len())
        .map(|i| {
            if i == 0 {
                dim as f64 * d2[0]
            } else {
                d2[i] + nm1 * d1[i] / (i as f64 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics_with_odd_and_even_counts() {
        for n_points in [7usize, 8, 11, 12] {
            let h = 0.3;
            let w = simpson_weights(n_points, h);
            let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
            let approx: f64 = (0..n_points).map(|i| w[i] * f(i as f64 * h)).sum();
            let l = (n_points - 1) as f64 * h;
            let exact = l - l * l + 0.125 * l.powi(4);
            assert!((approx - exact).abs() < 1e-12, "{n_points}: {approx} vs {exact}");
        }
    }

    #[test]
    fn radial_rule_recovers_ball_volume() {
        // Integral of 1 over the ball of radius 2 in R^3.
        let h = 0.01;
        let rule = RadialRule::new(3, h, 201);
        let vol = rule.integrate(&vec![1.0; 201]);
        assert!((vol - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
    }

    #[test]
    fn derivatives_of_gaussian_are_fourth_order() {
        let h = 0.01;
        let n = 1001;
        let u: Vec<f64> = (0..n).map(|i| (-(i as f64 * h).powi(2)).exp()).collect();
        let d1 = derivative(&u, h);
        let d2 = second_derivative(&u, h);
        for i in 0..n {
            let r = i as f64 * h;
            let e = (-r * r).exp();
            assert!((d1[i] - (-2.0 * r * e)).abs() < 1e-7, "d1 at {r}");
            assert!((d2[i] - (4.0 * r * r - 2.0) * e).abs() < 1e-5, "d2 at {r}");
        }
        let lap = radial_laplacian(3, &u, h);
        // Laplacian of exp(-r^2) in R^3 is (4r^2 - 6) exp(-r^2).
        for i in 0..n - 2 {
            let r = i as f64 * h;
            assert!((lap[i] - (4.0 * r * r - 6.0) * (-r * r).exp()).abs() < 1e-6);
        }
    }
}
