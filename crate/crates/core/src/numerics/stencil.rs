//! Finite-difference operators on non-uniform radial grids.
//!
//! Stencils near the origin reach across `s = 0` into mirrored nodes `-s_k`, where
//! the sampled function is continued as even or odd. Near the outer end the window
//! is shifted inward (one-sided).

/// Fornberg's recursion: weights `w[k][j]` such that the k-th derivative at `x0`
/// is approximated by `Σ_j w[k][j] u(x[j])`, for `k = 0..=m`.
pub fn fornberg(x0: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let np = x.len();
    let mut c = vec![vec![0.0; np]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..np {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Symmetry of a sampled function under `s -> -s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    idx: usize,
    mirrored: bool,
    d1: f64,
    d2: f64,
}

/// Precomputed first and second derivative stencils of a given order.
#[derive(Clone, Debug)]
pub struct DiffOperator {
    order: usize,
    stencils: Vec<Vec<Entry>>,
}

impl DiffOperator {
    /// `order` must be even (2, 4 or 6); the grid needs more than `order` nodes.
    pub fn new(s: &[f64], order: usize) -> Self {
        assert!(order >= 2 && order % 2 == 0, "stencil order must be even");
        let m = s.len() - 1;
        assert!(m >= order, "grid too small for stencil order {order}");
        let half = (order / 2) as isize;
        let width = order as isize;
        let mut stencils = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let ii = i as isize;
            let mut lo = ii - half;
            if lo + width > m as isize {
                lo = m as isize - width;
            }
            let mut pts = Vec::with_capacity(order + 1);
            let mut nodes = Vec::with_capacity(order + 1);
            for j in lo..=lo + width {
                if j < 0 {
                    let k = (-j) as usize;
                    pts.push((k, true));
                    nodes.push(-s[k]);
                } else {
                    pts.push((j as usize, false));
                    nodes.push(s[j as usize]);
                }
            }
            let w = fornberg(s[i], &nodes, 2);
            let entries = pts
                .iter()
                .enumerate()
                .map(|(q, &(idx, mirrored))| Entry {
                    idx,
                    mirrored,
                    d1: w[1][q],
                    d2: w[2][q],
                })
                .collect();
            stencils.push(entries);
        }
        DiffOperator { order, stencils }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.stencils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stencils.is_empty()
    }

    #[inline]
    fn value(v: &[f64], e: &Entry, parity: Parity) -> f64 {
        let x = v[e.idx];
        if e.mirrored && parity == Parity::Odd {
            -x
        } else {
            x
        }
    }

    /// First and second derivatives at node `i`, written as weighted differences
    /// `Σ w_j (v_j - v_i)` so that constants differentiate to exactly zero.
    #[inline]
    pub fn at(&self, v: &[f64], parity: Parity, i: usize) -> (f64, f64) {
        let vi = v[i];
        let mut a = 0.0;
        let mut b = 0.0;
        for e in &self.stencils[i] {
            let dv = Self::value(v, e, parity) - vi;
            a += e.d1 * dv;
            b += e.d2 * dv;
        }
        (a, b)
    }

    pub fn d1(&self, v: &[f64], parity: Parity) -> Vec<f64> {
        (0..v.len()).map(|i| self.at(v, parity, i).0).collect()
    }

    pub fn d2(&self, v: &[f64], parity: Parity) -> Vec<f64> {
        (0..v.len()).map(|i| self.at(v, parity, i).1).collect()
    }

    /// Both derivatives at once.
    pub fn d12(&self, v: &[f64], parity: Parity) -> (Vec<f64>, Vec<f64>) {
        (0..v.len()).map(|i| self.at(v, parity, i)).unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graded(m: usize) -> Vec<f64> {
        (0..=m)
            .map(|i| {
                let x = i as f64 / m as f64;
                3.0 * (1.5 * x).sinh() / 1.5_f64.sinh()
            })
            .collect()
    }

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn odd_and_even_functions_differentiate_accurately() {
        for order in [2usize, 4, 6] {
            let mut errs = Vec::new();
            for m in [100usize, 200] {
                let s = graded(m);
                let op = DiffOperator::new(&s, order);
                let v: Vec<f64> = s.iter().map(|x| x.sin()).collect();
                let c: Vec<f64> = s.iter().map(|x| x.cos()).collect();
                let (d1, d2) = op.d12(&v, Parity::Odd);
                let (e1, e2) = op.d12(&c, Parity::Even);
                let mut err: f64 = 0.0;
                for i in 0..s.len() {
                    err = err
                        .max((d1[i] - s[i].cos()).abs())
                        .max((d2[i] + s[i].sin()).abs())
                        .max((e1[i] + s[i].sin()).abs())
                        .max((e2[i] + s[i].cos()).abs());
                }
                errs.push(err);
            }
            let rate = (errs[0] / errs[1]).log2();
            assert!(rate > order as f64 - 1.3, "order {order}: rate {rate}");
        }
    }

    #[test]
    fn constants_have_zero_derivative_exactly() {
        let s = graded(50);
        let op = DiffOperator::new(&s, 4);
        let v = vec![1.7; s.len()];
        let (a, b) = op.d12(&v, Parity::Even);
        assert!(a.iter().chain(&b).all(|&x| x == 0.0));
    }
}
