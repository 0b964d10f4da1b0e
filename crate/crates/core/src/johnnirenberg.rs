//! Empirical John-Nirenberg distribution
//! `λ(α, B) = φ({x ∈ B : |f - P_B^s f| / φ(x, τ) > α}, τ)` and decay fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::campanato::campanato_norm;
use crate::error::{Error, Result};
use crate::grid::{Ball, GridFunction};
use crate::growth::{logspace, GrowthFunction};
use crate::luxembourg::{chi_ball_norm, DEFAULT_TOL};
use crate::polyproj::oscillation;

/// Fit window on `λ`.
pub const FIT_WINDOW: (f64, f64) = (1e-4, 0.5);
pub const MIN_FIT_POINTS: usize = 8;
pub const DEFAULT_ALPHA_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JNCurve {
    pub alphas: Vec<f64>,
    /// `λ(α, B_0)` of the normalized function.
    pub lambda_vals: Vec<f64>,
    /// `sup_B λ(α, B) / φ(B, ‖χ_{B_0}‖⁻¹)` over the sub-balls.
    pub f_vals: Vec<f64>,
    pub base_ball: Ball,
    /// `‖f‖_{φ,1,s}` over the sub-balls and `B_0`.
    pub seminorm: f64,
    pub chi_b0: f64,
    /// Largest normalized oscillation quotient on `B_0`.
    pub max_quotient: f64,
}

/// Raw level-set measures on one ball with the weight frozen at `t = tau`:
/// `Σ_{q_j > α} φ(x_j, τ) h^n` where `q_j = |f - P_B^s f|(x_j) / φ(x_j, τ)`.
pub fn level_measure(f: &GridFunction, gf: &GrowthFunction, ball: &Ball, s: usize, tau: f64, alphas: &[f64]) -> Result<Vec<f64>> {
    let (quot, w) = quotients(f, gf, ball, s, tau)?;
    Ok(measures(&quot, &w, alphas, f.grid().cell_volume()))
}

fn quotients(f: &GridFunction, gf: &GrowthFunction, ball: &Ball, s: usize, tau: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = f.grid();
    let n = grid.dim();
    let osc = oscillation(f, ball, s)?;
    let mut quot = Vec::with_capacity(osc.indices.len());
    let mut w = Vec::with_capacity(osc.indices.len());
    for (&j, r) in osc.indices.iter().zip(&osc.residual) {
        let x = grid.node(j);
        let wj = gf.eval(&x[..n], tau)?;
        quot.push(r.abs() / wj);
        w.push(wj);
    }
    Ok((quot, w))
}

fn measures(quot: &[f64], w: &[f64], alphas: &[f64], vol: f64) -> Vec<f64> {
    alphas
        .iter()
        .map(|&a| quot.iter().zip(w).filter(|(q, _)| **q > a).map(|(_, w)| w).sum::<f64>() * vol)
        .collect()
}

/// Distribution curve of `f` on `b0`, normalized so that
/// `‖f‖_{φ,1,s} ‖χ_{B_0}‖ = 1`. `alpha_grid = None` picks 64 geometric points
/// on `[0.01 M, M]` with `M` the largest normalized quotient on `B_0`.
pub fn jn_distribution(
    f: &GridFunction,
    gf: &GrowthFunction,
    b0: &Ball,
    s: usize,
    alpha_grid: Option<&[f64]>,
    sub_balls: &[Ball],
) -> Result<JNCurve> {
    let grid = f.grid();
    let mut family: Vec<Ball> = sub_balls.to_vec();
    family.push(b0.clone());
    let seminorm = campanato_norm(f, gf, 1.0, s, &family)?.value;
    let chi_b0 = chi_ball_norm(grid, b0, gf, DEFAULT_TOL)?;
    let tau0 = 1.0 / chi_b0;
    let g = if seminorm > 0.0 { f.scaled(1.0 / (seminorm * chi_b0)) } else { f.clone() };
    let (q0, w0) = quotients(&g, gf, b0, s, tau0)?;
    let max_quotient = q0.iter().copied().fold(0.0, f64::max);
    let alphas = match alpha_grid {
        Some(a) => {
            if a.is_empty() || a[0] <= 0.0 || a.windows(2).any(|p| p[1] <= p[0]) {
                return Err(Error::InvalidInput("alpha grid must be positive and increasing".into()));
            }
            a.to_vec()
        }
        None if max_quotient > 0.0 => logspace(0.01 * max_quotient, max_quotient, DEFAULT_ALPHA_POINTS),
        None => logspace(0.01, 1.0, DEFAULT_ALPHA_POINTS),
    };
    let vol = grid.cell_volume();
    let lambda_vals = measures(&q0, &w0, &alphas, vol);
    let per_ball: Vec<Result<Vec<f64>>> = sub_balls
        .par_iter()
        .map(|b| {
            let (q, w) = quotients(&g, gf, b, s, tau0)?;
            let total: f64 = w.iter().sum::<f64>() * vol;
            let lam = measures(&q, &w, &alphas, vol);
            Ok(lam.into_iter().map(|l| if total > 0.0 { l / total } else { 0.0 }).collect())
        })
        .collect();
    let mut f_vals = vec![0.0_f64; alphas.len()];
    for r in per_ball {
        for (fv, v) in f_vals.iter_mut().zip(r?) {
            *fv = fv.max(v);
        }
    }
    Ok(JNCurve { alphas, lambda_vals, f_vals, base_ball: b0.clone(), seminorm, chi_b0, max_quotient })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `ln λ = ln C_1 - C_2 α`
    Exponential,
    /// `ln λ = ln C_3 - q' ln(1 + α)`
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JNFit {
    pub model: DecayModel,
    pub prefactor: f64,
    /// Slope of `ln λ` against `α` or `ln(1 + α)`.
    pub slope: f64,
    pub r_squared: f64,
    pub alpha_window: (f64, f64),
    pub points: usize,
}

/// Least-squares decay fit of `λ(α, B_0)` over points with `λ` in [`FIT_WINDOW`].
pub fn jn_fit(curve: &JNCurve, model: DecayModel) -> Result<JNFit> {
    let pts: Vec<(f64, f64)> = curve
        .alphas
        .iter()
        .zip(&curve.lambda_vals)
        .filter(|(_, &l)| l >= FIT_WINDOW.0 && l <= FIT_WINDOW.1)
        .map(|(&a, &l)| {
            let x = match model {
                DecayModel::Exponential => a,
                DecayModel::Power => a.ln_1p(),
            };
            (x, l.ln())
        })
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientDecayRange { points: pts.len() });
    }
    let (slope, intercept, r_squared) = linear_fit(&pts);
    let window: Vec<f64> = curve
        .alphas
        .iter()
        .zip(&curve.lambda_vals)
        .filter(|(_, &l)| l >= FIT_WINDOW.0 && l <= FIT_WINDOW.1)
        .map(|(&a, _)| a)
        .collect();
    Ok(JNFit {
        model,
        prefactor: intercept.exp(),
        slope,
        r_squared,
        alpha_window: (window[0], window[window.len() - 1]),
        points: pts.len(),
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R²)`.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (a, b, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ball_family, BallFamilyConfig, Grid, GridBox, Region};
    use crate::growth::{phi_measure, Weight};

    fn grid1(res: usize) -> Grid {
        Grid::new(GridBox::symmetric(1, 1.0).unwrap(), vec![res]).unwrap()
    }

    fn log_abs(g: &Grid) -> GridFunction {
        GridFunction::from_fn(g, |x| x[0].abs().ln()).unwrap()
    }

    fn subs(g: &Grid, b0: &Ball) -> Vec<Ball> {
        ball_family(g, &BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 32.0 })
            .unwrap()
            .into_iter()
            .filter(|b| b.is_inside(b0))
            .collect()
    }

    #[test]
    fn constant_has_empty_level_sets() {
        let g = grid1(512);
        let f = GridFunction::from_fn(&g, |_| 2.0).unwrap();
        let b0 = Ball::new(vec![0.0], 1.0).unwrap();
        let c = jn_distribution(&f, &GrowthFunction::power(1.0), &b0, 0, Some(&[0.1, 1.0]), &subs(&g, &b0)).unwrap();
        assert!(c.lambda_vals.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn small_alpha_limit_is_unit_measure() {
        let g = grid1(1024);
        let f = log_abs(&g);
        let b = Ball::new(vec![0.0], 1.0).unwrap();
        for gf in GrowthFunction::builtins() {
            let tau = 1.0 / chi_ball_norm(&g, &b, &gf, DEFAULT_TOL).unwrap();
            let l = level_measure(&f, &gf, &b, 0, tau, &[1e-300]).unwrap()[0];
            assert!((l - 1.0).abs() <= 1e-6, "{gf:?}: {l}");
        }
    }

    #[test]
    fn curve_properties() {
        let g = grid1(2048);
        let f = log_abs(&g);
        let b0 = Ball::new(vec![0.0], 1.0).unwrap();
        let gf = GrowthFunction::power(1.0);
        let c = jn_distribution(&f, &gf, &b0, 0, None, &subs(&g, &b0)).unwrap();
        assert!(c.lambda_vals.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.f_vals.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
        let unit = phi_measure(&gf, &g, Region::Ball(&b0), 1.0 / c.chi_b0).unwrap();
        assert!(c.lambda_vals.iter().all(|&l| l <= unit));
        assert!(c.alphas.iter().zip(&c.lambda_vals).filter(|(&a, _)| a <= 1.0).all(|(_, &l)| l > 0.0));
    }

    #[test]
    fn scaling_and_chebyshev() {
        let g = grid1(1024);
        let f = log_abs(&g);
        let b = Ball::new(vec![0.25], 0.5).unwrap();
        let gf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(0.5));
        let alphas = logspace(0.01, 10.0, 40);
        let base = level_measure(&f, &gf, &b, 1, 0.7, &alphas).unwrap();
        let shifted: Vec<f64> = alphas.iter().map(|a| a * 4.0).collect();
        let scaled = level_measure(&f.scaled(4.0), &gf, &b, 1, 0.7, &shifted).unwrap();
        assert_eq!(base, scaled);
        let osc = oscillation(&f, &b, 1).unwrap();
        let l1: f64 = osc.residual.iter().map(|r| r.abs()).sum::<f64>() * g.cell_volume();
        for (a, l) in alphas.iter().zip(&base) {
            // measure in φ(·, τ) units: α λ ≤ ∫ |r|
            assert!(a * l <= l1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exact_exponential_recovery() {
        let alphas = logspace(0.05, 3.0, 40);
        let lambda_vals = alphas.iter().map(|a| 2.0 * (-3.0 * a).exp()).collect();
        let curve = JNCurve {
            alphas,
            lambda_vals,
            f_vals: vec![],
            base_ball: Ball::new(vec![0.0], 1.0).unwrap(),
            seminorm: 1.0,
            chi_b0: 1.0,
            max_quotient: 3.0,
        };
        let fit = jn_fit(&curve, DecayModel::Exponential).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_abs_decays_exponentially() {
        let g = grid1(4096);
        let f = log_abs(&g);
        let b0 = Ball::new(vec![0.0], 1.0).unwrap();
        let c = jn_distribution(&f, &GrowthFunction::power(1.0), &b0, 0, None, &subs(&g, &b0)).unwrap();
        let fit = jn_fit(&c, DecayModel::Exponential).unwrap();
        assert!(fit.r_squared >= 0.95 && fit.slope < 0.0, "{fit:?}");
    }

    #[test]
    fn weighted_case_fits_power_model() {
        let g = grid1(4096);
        let f = log_abs(&g);
        let b0 = Ball::new(vec![0.0], 1.0).unwrap();
        let gf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(0.5));
        let c = jn_distribution(&f, &gf, &b0, 0, None, &subs(&g, &b0)).unwrap();
        let fit = jn_fit(&c, DecayModel::Power).unwrap();
        assert!(fit.slope <= -1.0, "{fit:?}");
    }

    #[test]
    fn narrow_window_is_rejected() {
        let curve = JNCurve {
            alphas: vec![1.0, 2.0],
            lambda_vals: vec![0.3, 0.1],
            f_vals: vec![],
            base_ball: Ball::new(vec![0.0], 1.0).unwrap(),
            seminorm: 1.0,
            chi_b0: 1.0,
            max_quotient: 2.0,
        };
        assert_eq!(jn_fit(&curve, DecayModel::Power), Err(Error::InsufficientDecayRange { points: 2 }));
    }
}
