//! Quadrature on non-uniform grids.

use super::stencil::Parity;
use super::{fit_line, lagrange_eval};

const GAUSS2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Exact integral over `[x[a], x[b]]` of the interpolating polynomial through `pts`.
fn poly_interval_weights(pts: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Three-point Gauss rule: exact up to degree 5, enough for cubic interpolants.
    let nodes = [
        (-0.774_596_669_241_483_4, 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        (0.774_596_669_241_483_4, 5.0 / 9.0),
    ];
    let mut w = vec![0.0; pts.len()];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut unit = vec![0.0; pts.len()];
        unit[k] = 1.0;
        *wk = nodes
            .iter()
            .map(|&(g, gw)| gw * half * lagrange_eval(pts, &unit, mid + half * g))
            .sum();
    }
    w
}

/// Composite Simpson weights on a non-uniform grid. With an odd number of
/// intervals the last one is integrated by the cubic through the final four nodes.
pub fn simpson_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        let h = x[1] - x[0];
        return vec![0.5 * h, 0.5 * h];
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut i = 0;
    while i + 2 <= paired {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        w[i] += hs / 6.0 * (2.0 - h1 / h0);
        w[i + 1] += hs * hs * hs / (6.0 * h0 * h1);
        w[i + 2] += hs / 6.0 * (2.0 - h0 / h1);
        i += 2;
    }
    if intervals % 2 == 1 {
        let q = n.min(4);
        let pts = &x[n - q..];
        let lw = poly_interval_weights(pts, x[n - 2], x[n - 1]);
        for k in 0..q {
            w[n - q + k] += lw[k];
        }
    }
    w
}

pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Running integral `∫_0^{x_i} v` using the local cubic through four neighbouring
/// nodes on each interval; `parity` continues `v` across the origin.
pub fn cumulative_integral(x: &[f64], v: &[f64], parity: Parity) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (v[i] + v[i - 1]);
        }
        return out;
    }
    for i in 0..n - 1 {
        let lo = (i as isize - 1).min(n as isize - 4);
        let mut pts = [0.0; 4];
        let mut vals = [0.0; 4];
        for q in 0..4 {
            let j = lo + q as isize;
            if j < 0 {
                let k = (-j) as usize;
                pts[q] = -x[k];
                vals[q] = match parity {
                    Parity::Even => v[k],
                    Parity::Odd => -v[k],
                };
            } else {
                pts[q] = x[j as usize];
                vals[q] = v[j as usize];
            }
        }
        let a = x[i];
        let b = x[i + 1];
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let seg: f64 = GAUSS2
            .iter()
            .map(|&g| half * lagrange_eval(&pts, &vals, mid + half * g))
            .sum();
        out[i + 1] = out[i] + seg;
    }
    out
}

/// Power-law model `y ≈ c·x^{-k}` of a decaying integrand on the outer part of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawTail {
    pub c: f64,
    pub k: f64,
    /// `∫_{x_M}^∞ c x^{-k} dx`, zero when the decay is too slow to trust.
    pub integral: f64,
}

/// Fits the outer fraction `frac` of `(x, y)` with a power law. Returns `None` when
/// the data is not strictly positive there or too short.
pub fn power_law_tail(x: &[f64], y: &[f64], frac: f64) -> Option<PowerLawTail> {
    let n = x.len();
    let start = ((1.0 - frac) * (n as f64)).floor() as usize;
    let start = start.min(n.saturating_sub(3));
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for i in start..n {
        if !(y[i] > 0.0) || x[i] <= 0.0 {
            return None;
        }
        lx.push(x[i].ln());
        ly.push(y[i].ln());
    }
    let (c0, c1, _) = fit_line(&lx, &ly)?;
    let k = -c1;
    let c = c0.exp();
    let xm = x[n - 1];
    // In logs: fast (exponential) decay drives c past the float range.
    let integral = if k > 1.05 {
        (c0 + (1.0 - k) * xm.ln()).exp() / (k - 1.0)
    } else {
        0.0
    };
    Some(PowerLawTail { c, k, integral })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics_on_nonuniform_grid() {
        let x: Vec<f64> = (0..=10).map(|i| (i as f64 / 10.0).powf(1.3) * 2.0).collect();
        let w = simpson_weights(&x);
        let exact = 2.0_f64.powi(4) / 4.0;
        let q: f64 = x.iter().zip(&w).map(|(a, b)| a * a * b).sum();
        assert!((q - 8.0 / 3.0).abs() < 1e-12, "{q}");
        let x2: Vec<f64> = (0..=11).map(|i| i as f64 / 11.0 * 2.0).collect();
        let w2 = simpson_weights(&x2);
        let q3: f64 = x2.iter().zip(&w2).map(|(a, b)| a * a * a * b).sum();
        assert!((q3 - exact).abs() < 1e-12, "{q3}");
    }

    #[test]
    fn cumulative_integral_of_cosine() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.02).collect();
        let v: Vec<f64> = x.iter().map(|t| t.cos()).collect();
        let c = cumulative_integral(&x, &v, Parity::Even);
        for i in 0..x.len() {
            assert!((c[i] - x[i].sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn power_law_tail_recovers_exponent() {
        let x: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(-4.0)).collect();
        let t = power_law_tail(&x, &y, 0.1).unwrap();
        assert!((t.k - 4.0).abs() < 1e-10);
        assert!((t.integral - 1e-6).abs() < 1e-15);
    }
}
