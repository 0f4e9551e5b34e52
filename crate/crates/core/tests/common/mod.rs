//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use ricci_af::geometry::{make_profile, Family, GridSpec, RadialProfile};

pub fn uniform(s_max: f64, m: usize) -> GridSpec {
    GridSpec::Uniform { s_max, m }
}

pub fn flat(n: usize, s_max: f64, m: usize) -> RadialProfile {
    make_profile(&Family::Flat, n, &uniform(s_max, m)).unwrap()
}

pub fn bump(n: usize, a: f64, r0: f64, w: f64, s_max: f64, m: usize) -> RadialProfile {
    make_profile(&Family::GaussianBump { a, r0, w }, n, &uniform(s_max, m)).unwrap()
}

pub fn schwarzschild(n: usize, mass: f64, s_max: f64, m: usize) -> RadialProfile {
    make_profile(&Family::SchwarzschildSlice { m: mass }, n, &uniform(s_max, m)).unwrap()
}

/// Profile `f = g(s)`, `φ = 1` on a uniform grid; `g` need not be asymptotically flat.
pub fn window(n: usize, s_max: f64, m: usize, g: impl Fn(f64) -> f64) -> RadialProfile {
    let s: Vec<f64> = (0..=m).map(|i| s_max * i as f64 / m as f64).collect();
    let f = s.iter().map(|&x| g(x)).collect();
    RadialProfile::new(n, s, f, vec![1.0; m + 1], 1.0).unwrap()
}

/// Adaptive Simpson quadrature, the reference integrator of the tests.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Plain bisection for the test oracles.
pub fn root(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    assert!(ga * g(b) <= 0.0, "root not bracketed");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Unit sphere area `|S^k|` from the Gamma function.
pub fn sphere_area(k: usize) -> f64 {
    let h = 0.5 * (k as f64 + 1.0);
    2.0 * std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h)
}
