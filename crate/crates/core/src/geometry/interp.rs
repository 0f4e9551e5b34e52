use crate::numerics::{DiffOperator, Parity};

/// Piecewise cubic Hermite interpolation with fourth-order node slopes, limited
/// by Hyman's filter wherever the data is locally monotone (no new extrema are
/// created there). Query points that coincide with a node return the node value
/// exactly.
pub fn monotone_cubic(x: &[f64], y: &[f64], parity: Parity, xq: &[f64]) -> Vec<f64> {
    let n = x.len();
    let op = DiffOperator::new(x, 4);
    let mut d = op.d1(y, parity);
    let sec: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    for i in 0..n {
        let left = if i > 0 {
            Some(sec[i - 1])
        } else {
            // Secant across the origin from the parity continuation.
            match parity {
                Parity::Odd => Some(sec[0]),
                Parity::Even => None,
            }
        };
        let right = if i + 1 < n { Some(sec[i]) } else { None };
        let (Some(l), Some(r)) = (left, right) else {
            continue;
        };
        if l * r > 0.0 {
            let bound = 3.0 * l.abs().min(r.abs());
            if d[i] * l <= 0.0 {
                d[i] = 0.0;
            } else if d[i].abs() > bound {
                d[i] = bound.copysign(l);
            }
        } else if l * r == 0.0 {
            d[i] = 0.0;
        }
    }
    xq.iter()
        .map(|&t| {
            let k = match x.binary_search_by(|v| v.total_cmp(&t)) {
                Ok(k) => return y[k],
                Err(k) => k,
            };
            let i = k.clamp(1, n - 1) - 1;
            let h = x[i + 1] - x[i];
            let u = (t - x[i]) / h;
            let u2 = u * u;
            let u3 = u2 * u;
            let h01 = -2.0 * u3 + 3.0 * u2;
            let h10 = u3 - 2.0 * u2 + u;
            let h11 = u3 - u2;
            y[i] + (y[i + 1] - y[i]) * h01 + h * (d[i] * h10 + d[i + 1] * h11)
        })
        .collect()
}
