//! Luxembourg norm `inf{λ > 0 : ∫ φ(x, |f(x)|/λ) dx ≤ 1}` and the memoized
//! ball-indicator norm `‖χ_B‖_{L^φ}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Ball, Grid, GridFunction, Region};
use crate::growth::{phi_measure, GrowthFunction};

pub const DEFAULT_TOL: f64 = 1e-8;
/// Bisection cap after bracketing.
pub const MAX_BISECTIONS: usize = 60;
/// Bracket doublings/halvings before giving up.
const MAX_BRACKET_STEPS: usize = 1100;

/// Result of a modular inversion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LuxNorm {
    pub norm: f64,
    pub iterations: usize,
    pub theta_residual: f64,
}

/// Smallest `λ` with `theta(λ) <= 1` for a nonincreasing modular `theta`.
///
/// Brackets geometrically from `lambda0`, then bisects in `ln λ` until the
/// bracket collapses to a few ulps or [`MAX_BISECTIONS`] is hit. The returned
/// `λ` is the upper bracket end, so `theta(λ) <= 1` always holds.
pub fn invert_modular<F>(theta: F, lambda0: f64, tol: f64) -> Result<LuxNorm>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) || !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::InvalidInput(format!("need tol > 0 and lambda0 > 0 (tol={tol}, lambda0={lambda0})")));
    }
    let fits = |l: f64| {
        let v = theta(l);
        (v.is_finite() && v <= 1.0, v)
    };
    let (mut lo, mut hi, mut theta_hi);
    let (ok0, v0) = fits(lambda0);
    if ok0 {
        hi = lambda0;
        theta_hi = v0;
        lo = lambda0;
        let mut steps = 0;
        loop {
            lo *= 0.5;
            steps += 1;
            if lo == 0.0 || steps > MAX_BRACKET_STEPS {
                // the modular never exceeds 1: the infimum is 0
                return Ok(LuxNorm { norm: 0.0, iterations: 0, theta_residual: 0.0 });
            }
            let (ok, v) = fits(lo);
            if !ok {
                break;
            }
            hi = lo;
            theta_hi = v;
        }
    } else {
        lo = lambda0;
        hi = lambda0;
        let mut steps = 0;
        loop {
            hi *= 2.0;
            steps += 1;
            if !hi.is_finite() || steps > MAX_BRACKET_STEPS {
                return Err(Error::NormOverflow);
            }
            let (ok, v) = fits(hi);
            if ok {
                theta_hi = v;
                break;
            }
            lo = hi;
        }
    }
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS && hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = (lo * hi).sqrt();
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        iterations += 1;
        let (ok, v) = fits(mid);
        if ok {
            hi = mid;
            theta_hi = v;
        } else {
            lo = mid;
        }
        if theta_hi == 1.0 {
            break;
        }
    }
    let residual = (theta_hi - 1.0).abs();
    if residual > tol {
        return Err(Error::BisectionStalled { residual, tol });
    }
    Ok(LuxNorm { norm: hi, iterations, theta_residual: residual })
}

/// Luxembourg norm of `f` over the whole box.
pub fn luxembourg_norm(f: &GridFunction, gf: &GrowthFunction, tol: f64) -> Result<LuxNorm> {
    let grid = f.grid();
    let n = grid.dim();
    let support: Vec<(usize, f64)> = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| (j, v.abs()))
        .collect();
    if support.is_empty() {
        return Ok(LuxNorm { norm: 0.0, iterations: 0, theta_residual: 0.0 });
    }
    let nodes: Vec<_> = support.iter().map(|&(j, _)| grid.node(j)).collect();
    let vol = grid.cell_volume();
    let theta = |lambda: f64| {
        let mut acc = 0.0;
        for (k, &(_, a)) in support.iter().enumerate() {
            acc += gf.value(&nodes[k][..n], a / lambda);
        }
        acc * vol
    };
    invert_modular(theta, f.max_abs(), tol)
}

/// `‖χ_B‖_{L^φ}`: smallest `λ` with `φ(B, 1/λ) <= 1`, memoized per
/// (grid, ball, tol) inside the growth function.
pub fn chi_ball_norm(grid: &Grid, ball: &Ball, gf: &GrowthFunction, tol: f64) -> Result<f64> {
    if let Some(v) = gf.cache.get(grid, ball, tol) {
        return Ok(v);
    }
    let n = grid.dim();
    let nodes: Vec<_> = grid.ball_indices(ball).into_iter().map(|j| grid.node(j)).collect();
    if nodes.is_empty() {
        return Err(Error::InvalidInput(format!("ball {ball} holds no grid node")));
    }
    let vol = grid.cell_volume();
    let theta = |lambda: f64| {
        let t = 1.0 / lambda;
        let mut acc = 0.0;
        for x in &nodes {
            acc += gf.value(&x[..n], t);
        }
        acc * vol
    };
    let sol = invert_modular(theta, 1.0, tol)?;
    gf.cache.insert(grid, ball, tol, sol.norm);
    Ok(sol.norm)
}

/// Largest sampled ratio
/// `[φ(B, ‖χ_B‖⁻¹)/‖χ_B‖] / [φ(B̃, ‖χ_B‖⁻¹)/‖χ_B̃‖]` over nested pairs `B̃ ⊂ B`
/// of the family. Returns 1 when the family has no nested pair.
pub fn comparison_constant(grid: &Grid, gf: &GrowthFunction, balls: &[Ball], tol: f64) -> Result<f64> {
    let mut worst = 1.0_f64;
    for big in balls {
        let nb = chi_ball_norm(grid, big, gf, tol)?;
        let t = 1.0 / nb;
        let lhs = phi_measure(gf, grid, Region::Ball(big), t)? / nb;
        for small in balls {
            if std::ptr::eq(small, big) || !small.is_inside(big) {
                continue;
            }
            let ns = chi_ball_norm(grid, small, gf, tol)?;
            let rhs = phi_measure(gf, grid, Region::Ball(small), t)? / ns;
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            }
        }
    }
    Ok(worst)
}
