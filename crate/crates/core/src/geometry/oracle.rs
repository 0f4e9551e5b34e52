//! Independent curvature computation: Christoffel symbols and the full Riemann
//! tensor of `φ² ds² + f² dσ²` in coordinates `(s, θ_1, …, θ_{n-1})`.

use super::curvature::{fill_origin, origin_tolerance};
use super::{arclength_of, CurvatureField, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::{DiffOperator, Parity};

/// Metric components and their first and second coordinate derivatives at a point:
/// `g[a][b]`, `dg[c][a][b] = ∂_c g_ab`, `ddg[c][d][a][b] = ∂_c ∂_d g_ab`.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub dim: usize,
    pub g: Vec<Vec<f64>>,
    pub dg: Vec<Vec<Vec<f64>>>,
    pub ddg: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Curvature tensors at a point, indices in coordinate form.
#[derive(Clone, Debug)]
pub struct RiemannSummary {
    pub dim: usize,
    pub g: Vec<Vec<f64>>,
    pub ginv: Vec<Vec<f64>>,
    /// `R_{abcd}` with all indices down.
    pub riem: Vec<f64>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
}

impl RiemannSummary {
    #[inline]
    pub fn r(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.riem[((a * n + b) * n + c) * n + d]
    }

    /// Sectional curvature of the plane spanned by coordinate directions `i`, `j`.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        let gij = self.g[i][j];
        self.r(i, j, i, j) / (self.g[i][i] * self.g[j][j] - gij * gij)
    }

    /// Full contraction `R_{abcd} R^{abcd}`.
    pub fn norm2(&self) -> f64 {
        let n = self.dim;
        let mut up = vec![0.0; n * n * n * n];
        // Raise one index at a time.
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let mut t = self.riem.clone();
        for slot in 0..4 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut acc = 0.0;
                            for e in 0..n {
                                let (i, j) = match slot {
                                    0 => (idx(e, b, c, d), a),
                                    1 => (idx(a, e, c, d), b),
                                    2 => (idx(a, b, e, d), c),
                                    _ => (idx(a, b, c, e), d),
                                };
                                acc += self.ginv[j][e] * t[i];
                            }
                            up[idx(a, b, c, d)] = acc;
                        }
                    }
                }
            }
            std::mem::swap(&mut t, &mut up);
        }
        self.riem.iter().zip(&t).map(|(x, y)| x * y).sum()
    }

    /// `|Ric - (R/n) g|²`.
    pub fn traceless_ricci_norm2(&self) -> f64 {
        let n = self.dim;
        let mean = self.scalar / n as f64;
        let e: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| self.ricci[a][b] - mean * self.g[a][b]).collect())
            .collect();
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        acc += self.ginv[a][c] * self.ginv[b][d] * e[a][b] * e[c][d];
                    }
                }
            }
        }
        acc
    }
}

fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let fct = a[i][col];
                if fct != 0.0 {
                    for j in 0..n {
                        a[i][j] -= fct * a[col][j];
                        inv[i][j] -= fct * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

/// Riemann tensor from a metric jet, with
/// `R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} - Γ^a_{de} Γ^e_{cb}`
/// and `Ric_{bd} = R^a_{bad}`.
pub fn riemann_from_jet(jet: &MetricJet) -> RiemannSummary {
    let n = jet.dim;
    let gi = invert(&jet.g);
    // ∂_e g^{ad} = -g^{ap} ∂_e g_{pq} g^{qd}
    let mut dgi = vec![vec![vec![0.0; n]; n]; n];
    for e in 0..n {
        for a in 0..n {
            for d in 0..n {
                let mut acc = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        acc -= gi[a][p] * jet.dg[e][p][q] * gi[q][d];
                    }
                }
                dgi[e][a][d] = acc;
            }
        }
    }
    // Γ_{dbc} (first kind) and its derivatives.
    let gam1 = |d: usize, b: usize, c: usize| {
        0.5 * (jet.dg[b][d][c] + jet.dg[c][d][b] - jet.dg[d][b][c])
    };
    let dgam1 = |e: usize, d: usize, b: usize, c: usize| {
        0.5 * (jet.ddg[e][b][d][c] + jet.ddg[e][c][d][b] - jet.ddg[e][d][b][c])
    };
    let mut gam = vec![vec![vec![0.0; n]; n]; n];
    let mut dgam = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for d in 0..n {
                    acc += gi[a][d] * gam1(d, b, c);
                }
                gam[a][b][c] = acc;
                for e in 0..n {
                    let mut acc = 0.0;
                    for d in 0..n {
                        acc += dgi[e][a][d] * gam1(d, b, c) + gi[a][d] * dgam1(e, d, b, c);
                    }
                    dgam[e][a][b][c] = acc;
                }
            }
        }
    }
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let mut rup = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..n {
                        v += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    rup[idx(a, b, c, d)] = v;
                }
            }
        }
    }
    let mut riem = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = 0.0;
                    for e in 0..n {
                        acc += jet.g[a][e] * rup[idx(e, b, c, d)];
                    }
                    riem[idx(a, b, c, d)] = acc;
                }
            }
        }
    }
    let mut ricci = vec![vec![0.0; n]; n];
    for b in 0..n {
        for d in 0..n {
            ricci[b][d] = (0..n).map(|a| rup[idx(a, b, a, d)]).sum();
        }
    }
    let mut scalar = 0.0;
    for b in 0..n {
        for d in 0..n {
            scalar += gi[b][d] * ricci[b][d];
        }
    }
    RiemannSummary {
        dim: n,
        g: jet.g.clone(),
        ginv: gi,
        riem,
        ricci,
        scalar,
    }
}

/// Angle at which the sphere factors are evaluated; any value away from `0` and `π` works.
const THETA: f64 = 1.0;

/// Jet of the warped-product metric at one node, given `φ²` and `f²` with their
/// first two `s`-derivatives. Angular factors `Π_{j<k} sin²θ_j` are differentiated
/// analytically.
pub fn warped_jet(n: usize, p2: [f64; 3], f2: [f64; 3]) -> MetricJet {
    let sn = THETA.sin();
    let ct = THETA.cos() / sn;
    let sec2 = 2.0 * (2.0 * THETA).cos() / (sn * sn);
    let mut g = vec![vec![0.0; n]; n];
    let mut dg = vec![vec![vec![0.0; n]; n]; n];
    let mut ddg = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    g[0][0] = p2[0];
    dg[0][0][0] = p2[1];
    ddg[0][0][0][0] = p2[2];
    for k in 1..n {
        // a_k = Π_{j=1}^{k-1} sin²θ_j
        let ak = sn.powi(2 * (k as i32 - 1));
        g[k][k] = f2[0] * ak;
        dg[0][k][k] = f2[1] * ak;
        ddg[0][0][k][k] = f2[2] * ak;
        for j in 1..k {
            let dj = 2.0 * ct * ak;
            dg[j][k][k] = f2[0] * dj;
            ddg[0][j][k][k] = f2[1] * dj;
            ddg[j][0][k][k] = f2[1] * dj;
            for l in 1..k {
                ddg[j][l][k][k] = if j == l {
                    f2[0] * sec2 * ak
                } else {
                    f2[0] * 4.0 * ct * ct * ak
                };
            }
        }
    }
    MetricJet { dim: n, g, dg, ddg }
}

/// Curvature of the profile computed from the full Riemann tensor. Metric
/// components are differentiated by finite differences; nothing here uses the
/// closed-form sectional-curvature formulas.
pub fn riemann_oracle(p: &RadialProfile) -> CurvatureField {
    riemann_oracle_with_order(p, DEFAULT_STENCIL_ORDER)
}

pub fn riemann_oracle_with_order(p: &RadialProfile, order: usize) -> CurvatureField {
    let n = p.n();
    let s = p.s();
    let m = s.len();
    let op = DiffOperator::new(s, order);
    let phi2: Vec<f64> = p.phi().iter().map(|x| x * x).collect();
    // f² - s² is even and vanishes identically on flat data.
    let f2dev: Vec<f64> = p.f().iter().zip(s).map(|(f, s)| f * f - s * s).collect();
    let r = arclength_of(s, p.phi());
    let tol = origin_tolerance(p.f());
    let mut fields = vec![vec![0.0; m]; 7];
    for i in 0..m {
        if p.f()[i] <= tol {
            continue;
        }
        let (a1, a2) = op.at(&phi2, Parity::Even, i);
        let (b1, b2) = op.at(&f2dev, Parity::Even, i);
        let f2 = p.f()[i] * p.f()[i];
        let jet = warped_jet(n, [phi2[i], a1, a2], [f2, 2.0 * s[i] + b1, 2.0 + b2]);
        let rs = riemann_from_jet(&jet);
        let nu2 = rs.sectional(0, 1);
        let nu1 = if n >= 3 { rs.sectional(1, 2) } else { 0.0 };
        fields[0][i] = nu1;
        fields[1][i] = nu2;
        fields[2][i] = rs.scalar;
        fields[3][i] = rs.ricci[0][0] / rs.g[0][0];
        fields[4][i] = rs.ricci[1][1] / rs.g[1][1];
        fields[5][i] = rs.norm2();
        fields[6][i] = rs.traceless_ricci_norm2();
    }
    {
        let mut refs: Vec<&mut Vec<f64>> = fields.iter_mut().collect();
        fill_origin(p.f(), &r, &mut refs, true);
    }
    let mut it = fields.into_iter();
    let nu1 = it.next().unwrap();
    let nu2 = it.next().unwrap();
    let scalar = it.next().unwrap();
    let lam_rad = it.next().unwrap();
    let lam_sph = it.next().unwrap();
    let rm2 = it.next().unwrap();
    let e2 = it.next().unwrap();
    CurvatureField {
        n,
        r,
        nu1,
        nu2,
        scalar,
        lam_rad,
        lam_sph,
        rm2,
        e2,
    }
}
