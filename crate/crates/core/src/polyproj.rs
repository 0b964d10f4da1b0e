//! Minimal polynomial `P_B^s f`: the `L²(B)` projection of `f` onto
//! polynomials of degree `<= s`, in the centered and scaled basis
//! `((x - c)/r)^α`. Gram entries use the same midpoint rule as every other
//! integral, so orthogonality holds at the discrete level.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Ball, Grid, GridFunction};

pub const MAX_DEGREE: usize = 4;
pub const MAX_CONDITION: f64 = 1e12;

/// Multi-indices with `|α| <= s`, graded, then by decreasing first exponent.
pub fn multi_indices(n: usize, s: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for d in 0..=s {
        if n == 1 {
            out.push([d, 0]);
        } else {
            for k in 0..=d {
                out.push([d - k, k]);
            }
        }
    }
    out
}

/// `C(n + s, s)`.
pub fn basis_len(n: usize, s: usize) -> usize {
    (1..=n).fold(1, |acc, k| acc * (s + k) / k)
}

/// Monomials `u^α` for every `|α| <= s`, written into `out`.
#[inline]
pub fn monomials(n: usize, s: usize, u: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let mut p0 = [1.0; MAX_DEGREE + 1];
    let mut p1 = [1.0; MAX_DEGREE + 1];
    for k in 1..=s {
        p0[k] = p0[k - 1] * u[0];
        if n == 2 {
            p1[k] = p1[k - 1] * u[1];
        }
    }
    for d in 0..=s {
        if n == 1 {
            out.push(p0[d]);
        } else {
            for k in 0..=d {
                out.push(p0[d - k] * p1[k]);
            }
        }
    }
}

/// Polynomial in the basis `((x - center)/radius)^α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    pub center: Vec<f64>,
    pub radius: f64,
    pub s: usize,
    pub coeffs: Vec<f64>,
}

impl MultiPoly {
    pub fn zero(ball: &Ball, s: usize) -> Self {
        MultiPoly {
            center: ball.center.clone(),
            radius: ball.radius,
            s,
            coeffs: vec![0.0; basis_len(ball.dim(), s)],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    #[inline]
    fn scaled(&self, x: &[f64]) -> [f64; 2] {
        let mut u = [0.0; 2];
        for (i, slot) in u.iter_mut().enumerate().take(self.dim()) {
            *slot = (x[i] - self.center[i]) / self.radius;
        }
        u
    }

    /// Evaluate at `x` (Horner in 1D, nested Horner over the second axis in 2D).
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let u = self.scaled(x);
        if self.dim() == 1 {
            self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u[0] + c)
        } else {
            // group by the exponent of u1: Σ_k u1^k Σ_j c_{(j,k)} u0^j
            let s = self.s;
            let mut outer = 0.0;
            for k in (0..=s).rev() {
                let mut inner = 0.0;
                for j in (0..=s - k).rev() {
                    let d = j + k;
                    let idx = d * (d + 1) / 2 + k;
                    inner = inner * u[0] + self.coeffs[idx];
                }
                outer = outer * u[1] + inner;
            }
            outer
        }
    }
}

/// Evaluate `p` at `x`.
pub fn eval_poly(p: &MultiPoly, x: &[f64]) -> f64 {
    p.eval(x)
}

/// Weighted least-squares fit over the listed nodes:
/// minimizes `Σ ω_j (v_j - P(x_j))²` over degree-`s` polynomials.
pub fn weighted_fit(
    grid: &Grid,
    ball: &Ball,
    s: usize,
    indices: &[usize],
    values: &[f64],
    weights: Option<&[f64]>,
) -> Result<MultiPoly> {
    if s > MAX_DEGREE {
        return Err(Error::InvalidInput(format!("degree {s} exceeds the cap {MAX_DEGREE}")));
    }
    let n = grid.dim();
    let m = basis_len(n, s);
    if indices.len() < m {
        return Err(Error::Underdetermined { nodes: indices.len(), needed: m, degree: s });
    }
    let vol = grid.cell_volume();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    let mut mono = Vec::with_capacity(m);
    let mut basis_rows = Vec::with_capacity(indices.len() * m);
    for (k, &j) in indices.iter().enumerate() {
        let x = grid.node(j);
        let mut u = [0.0; 2];
        for i in 0..n {
            u[i] = (x[i] - ball.center[i]) / ball.radius;
        }
        monomials(n, s, &u, &mut mono);
        let w = weights.map_or(1.0, |w| w[k]) * vol;
        for a in 0..m {
            let wa = w * mono[a];
            rhs[a] += wa * values[k];
            for b in 0..=a {
                gram[(a, b)] += wa * mono[b];
            }
        }
        basis_rows.extend_from_slice(&mono);
    }
    for a in 0..m {
        for b in 0..a {
            gram[(b, a)] = gram[(a, b)];
        }
    }
    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let (emin, emax) = eig.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let cond = if emin > 0.0 { emax / emin } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { cond });
    }
    let chol = gram.clone().cholesky().ok_or(Error::IllConditioned { cond })?;
    let mut c = chol.solve(&rhs);
    // one step of iterative refinement
    let r = &rhs - &gram * &c;
    c += chol.solve(&r);
    Ok(MultiPoly { center: ball.center.clone(), radius: ball.radius, s, coeffs: c.iter().copied().collect() })
}

/// `P_B^s f`.
pub fn project(f: &GridFunction, ball: &Ball, s: usize) -> Result<MultiPoly> {
    let grid = f.grid();
    let indices = grid.ball_indices(ball);
    let values: Vec<f64> = indices.iter().map(|&j| f.samples()[j]).collect();
    weighted_fit(grid, ball, s, &indices, &values, None)
}

/// `f - P_B^s f` restricted to the nodes of `B`.
#[derive(Clone, Debug)]
pub struct Oscillation {
    pub poly: MultiPoly,
    pub indices: Vec<usize>,
    pub residual: Vec<f64>,
}

pub fn oscillation(f: &GridFunction, ball: &Ball, s: usize) -> Result<Oscillation> {
    let grid = f.grid();
    let n = grid.dim();
    let indices = grid.ball_indices(ball);
    let values: Vec<f64> = indices.iter().map(|&j| f.samples()[j]).collect();
    let poly = weighted_fit(grid, ball, s, &indices, &values, None)?;
    let residual = indices
        .iter()
        .zip(&values)
        .map(|(&j, v)| v - poly.eval(&grid.node(j)[..n]))
        .collect();
    Ok(Oscillation { poly, indices, residual })
}

/// `|∫_B (f - P) u^α|` for every `|α| <= s`.
pub fn orthogonality_residuals(f: &GridFunction, p: &MultiPoly, ball: &Ball) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.dim();
    let m = basis_len(n, p.s);
    let mut acc = vec![0.0; m];
    let mut mono = Vec::with_capacity(m);
    for j in grid.ball_indices(ball) {
        let x = grid.node(j);
        let r = f.samples()[j] - p.eval(&x[..n]);
        let u = p.scaled(&x[..n]);
        monomials(n, p.s, &u, &mut mono);
        for a in 0..m {
            acc[a] += r * mono[a];
        }
    }
    acc.iter().map(|v| (v * grid.cell_volume()).abs()).collect()
}

/// Empirical constant `sup_B |P_B^s f| · |B| / ∫_B |f|`.
pub fn projection_sup_ratio(f: &GridFunction, ball: &Ball, s: usize) -> Result<f64> {
    let grid = f.grid();
    let n = grid.dim();
    let p = project(f, ball, s)?;
    let idx = grid.ball_indices(ball);
    let l1: f64 = idx.iter().map(|&j| f.samples()[j].abs()).sum::<f64>() * grid.cell_volume();
    if l1 <= 0.0 {
        return Err(Error::ZeroDenominator("integral of |f| over the ball vanishes"));
    }
    let sup = idx.iter().fold(0.0_f64, |m, &j| m.max(p.eval(&grid.node(j)[..n]).abs()));
    Ok(sup * grid.ball_measure(ball) / l1)
}
