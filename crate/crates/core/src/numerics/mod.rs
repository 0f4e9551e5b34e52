//! Grid calculus shared by every module: finite-difference stencils, quadrature
//! weights and small fitting helpers.

mod quad;
mod stencil;

pub use quad::{
    cumulative_integral, power_law_tail, simpson_weights, trapezoid_weights, PowerLawTail,
};
pub use stencil::{fornberg, DiffOperator, Parity};

use statrs::function::gamma::gamma;

/// Area of the unit k-sphere, `2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// Value at `x` of the Lagrange polynomial through `(xs, ys)`.
pub fn lagrange_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, (&xk, &yk)) in xs.iter().zip(ys).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != k {
                l *= (x - xj) / (xk - xj);
            }
        }
        acc += l * yk;
    }
    acc
}

/// Ordinary least squares line `y ≈ c0 + c1 x`; returns `(c0, c1, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let m = x.len();
    if m < 2 || y.len() != m {
        return None;
    }
    let mf = m as f64;
    let mx = x.iter().sum::<f64>() / mf;
    let my = y.iter().sum::<f64>() / mf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let c1 = sxy / sxx;
    let c0 = my - c1 * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - c0 - c1 * a).powi(2))
        .sum();
    Some((c0, c1, (rss / mf).sqrt()))
}

/// Bisection for a sign change of `g` on `[a, b]`.
pub fn bisect<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut ga = g(a);
    if ga == 0.0 {
        return a;
    }
    if g(b) == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        let gc = g(c);
        if gc == 0.0 || (b - a) < tol {
            return c;
        }
        if (gc < 0.0) == (ga < 0.0) {
            a = c;
            ga = gc;
        } else {
            b = c;
        }
    }
    0.5 * (a + b)
}

/// Maximum of the absolute values, `0` for an empty slice.
pub fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
/// `lower[0]` and `upper[last]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / beta } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tridiagonal_solve_recovers_known_solution() {
        let x = [1.0, -2.0, 0.5, 3.0];
        let lo = [0.0, 1.0, -1.0, 0.5];
        let di = [4.0, 5.0, 3.0, 2.0];
        let up = [1.0, 0.5, 1.0, 0.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut v = di[i] * x[i];
                if i > 0 {
                    v += lo[i] * x[i - 1];
                }
                if i < 3 {
                    v += up[i] * x[i + 1];
                }
                v
            })
            .collect();
        let got = solve_tridiagonal(&lo, &di, &up, &rhs);
        for i in 0..4 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_areas_match_low_dimensional_values() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn lagrange_reproduces_cubic() {
        let xs = [0.0, 0.3, 1.1, 2.0];
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        assert!((lagrange_eval(&xs, &ys, 0.7) - p(0.7)).abs() < 1e-13);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (c0, c1, res) = fit_line(&x, &y).unwrap();
        assert!((c0 - 3.0).abs() < 1e-12 && (c1 + 0.5).abs() < 1e-12 && res < 1e-12);
    }
}
