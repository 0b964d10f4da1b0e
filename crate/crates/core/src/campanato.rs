//! Campanato seminorms over a ball family: the defining `q`-oscillation, the
//! infimum variant, the ε-kernel variant, `BMO^φ`, and the equivalence table.
//!
//! With `τ = ‖χ_B‖⁻¹` and `w = φ(·, τ)`, the per-ball quantity of the defining
//! seminorm is `τ (∫_B |f - P_B^s f|^q w^{1-q})^{1/q}`. At `q = 1` the weight
//! drops out and the BMO code path is used.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{dist2, Ball, Grid, GridFunction};
use crate::growth::{GrowthFunction, GrowthIndices, WEIGHT_FLOOR};
use crate::luxembourg::{chi_ball_norm, DEFAULT_TOL};
use crate::polyproj::{oscillation, weighted_fit, MultiPoly, Oscillation};

/// IRLS iteration cap.
pub const IRLS_MAX_ITER: usize = 50;
/// IRLS stops once the relative functional decrease falls below this.
pub const IRLS_TOL: f64 = 1e-10;

/// Sup over the family plus the per-ball values (same order as the balls).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seminorm {
    pub value: f64,
    pub argmax: Option<usize>,
    pub per_ball: Vec<f64>,
}

impl Seminorm {
    fn from_values(per_ball: Vec<f64>) -> Self {
        let mut value = 0.0;
        let mut argmax = None;
        for (k, &v) in per_ball.iter().enumerate() {
            if argmax.is_none() || v > value {
                value = v;
                argmax = Some(k);
            }
        }
        Seminorm { value, argmax, per_ball }
    }
}

fn collect_ordered(results: Vec<Result<f64>>) -> Result<Seminorm> {
    let per_ball = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Seminorm::from_values(per_ball))
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("Campanato exponent must be finite and >= 1, got {q}")))
    }
}

/// Weights `φ(x_j, τ)` on the listed nodes, rejecting values below the floor.
fn node_weights(grid: &Grid, gf: &GrowthFunction, indices: &[usize], tau: f64, ball: &Ball) -> Result<Vec<f64>> {
    let n = grid.dim();
    indices
        .iter()
        .map(|&j| {
            let x = grid.node(j);
            let w = gf.eval(&x[..n], tau)?;
            if w < WEIGHT_FLOOR {
                Err(Error::WeightFloor { value: w, context: format!("ball {ball}") })
            } else {
                Ok(w)
            }
        })
        .collect()
}

/// `τ Σ |r_j| h^n`.
fn q1_value(grid: &Grid, tau: f64, residual: &[f64]) -> f64 {
    let s: f64 = residual.iter().map(|r| r.abs()).sum();
    tau * s * grid.cell_volume()
}

/// `τ (Σ |r_j|^q w_j^{1-q} h^n)^{1/q}`; `q = 1` defers to [`q1_value`].
fn q_value(grid: &Grid, tau: f64, residual: &[f64], weights: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        return q1_value(grid, tau, residual);
    }
    let s: f64 = residual
        .iter()
        .zip(weights)
        .map(|(r, w)| r.abs().powf(q) * w.powf(1.0 - q))
        .sum();
    tau * (s * grid.cell_volume()).powf(1.0 / q)
}

/// Per-ball value of the defining seminorm, returned with the oscillation.
pub fn campanato_ball(f: &GridFunction, gf: &GrowthFunction, q: f64, s: usize, ball: &Ball) -> Result<(f64, Oscillation)> {
    check_q(q)?;
    let grid = f.grid();
    let tau = 1.0 / chi_ball_norm(grid, ball, gf, DEFAULT_TOL)?;
    let osc = oscillation(f, ball, s)?;
    let v = if q == 1.0 {
        q1_value(grid, tau, &osc.residual)
    } else {
        let w = node_weights(grid, gf, &osc.indices, tau, ball)?;
        q_value(grid, tau, &osc.residual, &w, q)
    };
    Ok((v, osc))
}

/// `sup_B ‖χ_B‖⁻¹ (∫_B [|f - P_B^s f| / φ(x, ‖χ_B‖⁻¹)]^q φ(x, ‖χ_B‖⁻¹) dx)^{1/q}`.
pub fn campanato_norm(f: &GridFunction, gf: &GrowthFunction, q: f64, s: usize, balls: &[Ball]) -> Result<Seminorm> {
    check_q(q)?;
    let res: Vec<Result<f64>> = balls
        .par_iter()
        .map(|b| campanato_ball(f, gf, q, s, b).map(|(v, _)| v))
        .collect();
    collect_ordered(res)
}

/// `sup_B ‖χ_B‖⁻¹ ∫_B |f - f_B|`.
pub fn bmo_phi_norm(f: &GridFunction, gf: &GrowthFunction, balls: &[Ball]) -> Result<Seminorm> {
    campanato_norm(f, gf, 1.0, 0, balls)
}

/// Outcome of the per-ball infimum search.
#[derive(Clone, Debug, PartialEq)]
pub struct InfBall {
    pub value: f64,
    pub poly: MultiPoly,
    pub iterations: usize,
}

/// Infimum over `P ∈ 𝒫_s` of `τ (∫_B |f - P|^q w^{1-q})^{1/q}` on one ball.
///
/// Iteratively reweighted least squares started from `P_B^s f`; the best
/// iterate is kept, so the answer never exceeds the defining per-ball value.
/// `q = 2` is a single weighted least-squares solve with weight `w⁻¹`.
pub fn campanato_inf_ball(
    f: &GridFunction,
    gf: &GrowthFunction,
    q: f64,
    s: usize,
    ball: &Ball,
    ball_id: usize,
) -> Result<InfBall> {
    check_q(q)?;
    let grid = f.grid();
    let n = grid.dim();
    let tau = 1.0 / chi_ball_norm(grid, ball, gf, DEFAULT_TOL)?;
    let osc = oscillation(f, ball, s)?;
    let w = node_weights(grid, gf, &osc.indices, tau, ball)?;
    let values: Vec<f64> = osc.indices.iter().map(|&j| f.samples()[j]).collect();
    let nodes: Vec<_> = osc.indices.iter().map(|&j| grid.node(j)).collect();
    let residual_of = |p: &MultiPoly| -> Vec<f64> {
        values.iter().zip(&nodes).map(|(v, x)| v - p.eval(&x[..n])).collect()
    };

    let mut best = InfBall { value: q_value(grid, tau, &osc.residual, &w, q), poly: osc.poly.clone(), iterations: 0 };
    // residual already at rounding level of f itself
    if best.value <= 1e-13 * q_value(grid, tau, &values, &w, q) {
        return Ok(best);
    }
    let base: Vec<f64> = w.iter().map(|wj| wj.powf(1.0 - q)).collect();
    let mut residual = osc.residual.clone();
    let mut current = best.value;
    let mut decrease = f64::INFINITY;
    let mut last_poly = osc.poly.clone();
    for it in 1..=IRLS_MAX_ITER {
        let rmax = residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let floor = 1e-9 * rmax.max(f64::MIN_POSITIVE);
        let omega: Vec<f64> = if q == 2.0 {
            base.clone()
        } else {
            base.iter().zip(&residual).map(|(b, r)| b * r.abs().max(floor).powf(q - 2.0)).collect()
        };
        let mut p = weighted_fit(grid, ball, s, &osc.indices, &values, Some(&omega))?;
        if q > 2.0 {
            // Newton step on the q-functional
            let prev = &last_poly;
            for (c, c0) in p.coeffs.iter_mut().zip(&prev.coeffs) {
                *c = c0 + (*c - c0) / (q - 1.0);
            }
        }
        last_poly = p.clone();
        residual = residual_of(&p);
        let next = q_value(grid, tau, &residual, &w, q);
        if next < best.value {
            best = InfBall { value: next, poly: p, iterations: it };
        }
        decrease = (current - next) / current;
        current = next;
        if q == 2.0 || decrease.abs() < IRLS_TOL {
            return Ok(best);
        }
    }
    if decrease.abs() > 1e-3 {
        return Err(Error::IrlsNonConvergence { ball: ball_id, decrease });
    }
    Ok(best)
}

/// Sup over the family of [`campanato_inf_ball`].
pub fn campanato_inf_norm(f: &GridFunction, gf: &GrowthFunction, q: f64, s: usize, balls: &[Ball]) -> Result<Seminorm> {
    check_q(q)?;
    let res: Vec<Result<f64>> = balls
        .par_iter()
        .enumerate()
        .map(|(k, b)| campanato_inf_ball(f, gf, q, s, b, k).map(|r| r.value))
        .collect();
    collect_ordered(res)
}

/// Per-ball ε-kernel value
/// `|B|/‖χ_B‖ ∫ δ^ε |f - P_B^s f| / (δ^{n+ε} + |x - x_0|^{n+ε}) dx` with `δ = r`,
/// the integral running over the whole box.
pub fn campanato_eps_ball(f: &GridFunction, gf: &GrowthFunction, s: usize, eps: f64, ball: &Ball) -> Result<f64> {
    let grid = f.grid();
    let n = grid.dim();
    let tau = 1.0 / chi_ball_norm(grid, ball, gf, DEFAULT_TOL)?;
    let osc = oscillation(f, ball, s)?;
    let measure = grid.ball_measure(ball);
    let delta = ball.radius;
    let ne = n as f64 + eps;
    let dne = delta.powf(ne);
    let de = delta.powf(eps);
    let mut acc = 0.0;
    for (j, v) in f.samples().iter().enumerate() {
        let x = grid.node(j);
        let r = (v - osc.poly.eval(&x[..n])).abs();
        let d = dist2(&x[..n], &ball.center).sqrt();
        acc += de * r / (dne + d.powf(ne));
    }
    Ok(measure * tau * acc * grid.cell_volume())
}

/// Sup over the family of [`campanato_eps_ball`]. Requires
/// `ε > n (q_est / i_est - 1)`.
pub fn campanato_eps_norm(
    f: &GridFunction,
    gf: &GrowthFunction,
    s: usize,
    eps: f64,
    balls: &[Ball],
    indices: &GrowthIndices,
) -> Result<Seminorm> {
    let threshold = indices.epsilon_threshold(f.grid().dim());
    if !(eps > threshold) {
        return Err(Error::EpsilonTooSmall { eps, threshold });
    }
    let res: Vec<Result<f64>> = balls.par_iter().map(|b| campanato_eps_ball(f, gf, s, eps, b)).collect();
    collect_ordered(res)
}

/// `a / b`, or `None` for `0/0`.
fn ratio(a: f64, b: f64, zero: f64) -> Option<f64> {
    if a <= zero && b <= zero {
        None
    } else {
        Some(a / b)
    }
}

/// One `q` row of the equivalence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub q: f64,
    /// Defining seminorm at `q = 1`.
    pub v1: f64,
    /// Defining seminorm at `q`.
    pub vq: f64,
    /// Infimum variant at `q`.
    pub vinf: f64,
    /// ε-kernel variant.
    pub veps: f64,
    /// `v1/vq`, `vq/v1`, `vinf/v1`, `veps/v1`; `None` means 0/0.
    pub r_1_q: Option<f64>,
    pub r_q_1: Option<f64>,
    pub r_inf_1: Option<f64>,
    pub r_eps_1: Option<f64>,
    /// Largest per-ball `vinf/vq`.
    pub worst_inf_over_q: f64,
    pub per_ball: Vec<BallRow>,
    pub flags: Vec<String>,
}

/// Per-ball values behind an [`EquivalenceRow`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub center: Vec<f64>,
    pub radius: f64,
    pub v1: f64,
    pub vq: f64,
    pub vinf: f64,
    pub veps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub s: usize,
    pub eps: f64,
    pub bracket: [f64; 2],
    pub q_limit: f64,
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceReport {
    /// Largest ratio `vq/v1`, `veps/v1` or its reciprocal over all rows.
    pub fn spread(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| [r.r_q_1, r.r_eps_1])
            .flatten()
            .map(|v| v.max(1.0 / v))
            .fold(1.0, f64::max)
    }
}

/// All four variants for every `q` in `q_list`, with ratios and bracket flags.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_report(
    f: &GridFunction,
    gf: &GrowthFunction,
    s: usize,
    q_list: &[f64],
    eps: f64,
    balls: &[Ball],
    indices: &GrowthIndices,
    bracket: [f64; 2],
) -> Result<EquivalenceReport> {
    let q_limit = indices.q_conjugate();
    for &q in q_list {
        check_q(q)?;
        if !(q < q_limit) {
            return Err(Error::QOutOfRange { q, limit: q_limit });
        }
    }
    let v1 = campanato_norm(f, gf, 1.0, s, balls)?;
    let veps = campanato_eps_norm(f, gf, s, eps, balls, indices)?;
    let scale = f.max_abs() * balls.iter().map(|b| f.grid().ball_measure(b)).fold(0.0, f64::max);
    let zero = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let vq = campanato_norm(f, gf, q, s, balls)?;
        let vinf = campanato_inf_norm(f, gf, q, s, balls)?;
        let mut worst = 0.0_f64;
        let per_ball: Vec<BallRow> = balls
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if vq.per_ball[k] > zero {
                    worst = worst.max(vinf.per_ball[k] / vq.per_ball[k]);
                }
                BallRow {
                    center: b.center.clone(),
                    radius: b.radius,
                    v1: v1.per_ball[k],
                    vq: vq.per_ball[k],
                    vinf: vinf.per_ball[k],
                    veps: veps.per_ball[k],
                }
            })
            .collect();
        let mut row = EquivalenceRow {
            q,
            v1: v1.value,
            vq: vq.value,
            vinf: vinf.value,
            veps: veps.value,
            r_1_q: ratio(v1.value, vq.value, zero),
            r_q_1: ratio(vq.value, v1.value, zero),
            r_inf_1: ratio(vinf.value, v1.value, zero),
            r_eps_1: ratio(veps.value, v1.value, zero),
            worst_inf_over_q: worst,
            per_ball,
            flags: Vec::new(),
        };
        for (name, r) in [("vq/v1", row.r_q_1), ("vinf/v1", row.r_inf_1), ("veps/v1", row.r_eps_1)] {
            match r {
                None => row.flags.push(format!("{name}: 0/0 skipped")),
                Some(v) if !(v >= bracket[0] && v <= bracket[1]) => {
                    row.flags.push(format!("{name} = {v:e} outside [{}, {}]", bracket[0], bracket[1]))
                }
                _ => {}
            }
        }
        if let Some(v) = row.r_1_q {
            if v > 1.0 + 1e-9 {
                row.flags.push(format!("v1/vq = {v} exceeds 1"));
            }
        }
        rows.push(row);
    }
    Ok(EquivalenceReport { s, eps, bracket, q_limit, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ball_family, BallFamilyConfig, GridBox};
    use crate::growth::Weight;
    use crate::polyproj::project;
    use nalgebra::{DMatrix, DVector};

    fn grid1(half: f64, res: usize) -> Grid {
        Grid::new(GridBox::symmetric(1, half).unwrap(), vec![res]).unwrap()
    }

    fn family(g: &Grid) -> Vec<Ball> {
        ball_family(g, &BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 16.0 }).unwrap()
    }

    fn log_abs(g: &Grid) -> GridFunction {
        GridFunction::from_fn(g, |x| x[0].abs().ln()).unwrap()
    }

    #[test]
    fn constants_vanish() {
        let g = grid1(1.0, 512);
        let f = GridFunction::from_fn(&g, |_| 3.0).unwrap();
        let fam = family(&g);
        let gf = GrowthFunction::power(0.75);
        for q in [1.0, 1.5, 2.0] {
            assert!(campanato_norm(&f, &gf, q, 0, &fam).unwrap().value < 1e-12);
            assert!(campanato_inf_norm(&f, &gf, q, 1, &fam).unwrap().value < 1e-12);
        }
        let idx = GrowthIndices::exact(0.75, 1.0, 1);
        assert!(campanato_eps_norm(&f, &gf, 0, 1.0, &fam, &idx).unwrap().value < 1e-12);
    }

    #[test]
    fn q1_matches_bmo_path() {
        let g = grid1(1.0, 512);
        let f = log_abs(&g);
        let fam = family(&g);
        for gf in GrowthFunction::builtins() {
            let a = campanato_norm(&f, &gf, 1.0, 0, &fam).unwrap();
            let b = bmo_phi_norm(&f, &gf, &fam).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn sign_function_centered_ball() {
        let g = grid1(1.0, 1024);
        let f = GridFunction::from_fn(&g, |x| x[0].signum()).unwrap();
        let b = Ball::new(vec![0.0], 0.5).unwrap();
        let v = bmo_phi_norm(&f, &GrowthFunction::power(1.0), &[b]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn polynomial_shift_invariance() {
        let g = grid1(1.0, 512);
        let f = log_abs(&g);
        let shifted = GridFunction::from_fn(&g, |x| x[0].abs().ln() + 2.0 - x[0] + 0.5 * x[0] * x[0]).unwrap();
        let fam = family(&g);
        let gf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(1.0 / 3.0));
        let a = campanato_norm(&f, &gf, 2.0, 2, &fam).unwrap().value;
        let b = campanato_norm(&shifted, &gf, 2.0, 2, &fam).unwrap().value;
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn holder_and_infimum_order() {
        let g = grid1(1.0, 512);
        let f = log_abs(&g);
        let fam = family(&g);
        for gf in GrowthFunction::builtins() {
            for s in [0, 1] {
                let v1 = campanato_norm(&f, &gf, 1.0, s, &fam).unwrap();
                for q in [1.5, 2.0, 3.0] {
                    let vq = campanato_norm(&f, &gf, q, s, &fam).unwrap();
                    let vi = campanato_inf_norm(&f, &gf, q, s, &fam).unwrap();
                    for k in 0..fam.len() {
                        assert!(v1.per_ball[k] <= vq.per_ball[k] * (1.0 + 1e-9), "{gf:?} q={q}");
                        assert!(vi.per_ball[k] <= vq.per_ball[k] * (1.0 + 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn q2_infimum_is_weighted_least_squares() {
        let g = grid1(1.0, 256);
        let f = log_abs(&g);
        let gf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(0.5));
        let b = Ball::new(vec![0.25], 0.5).unwrap();
        let got = campanato_inf_ball(&f, &gf, 2.0, 1, &b, 0).unwrap();
        // oracle: raw monomials, dense normal equations
        let tau = 1.0 / chi_ball_norm(&g, &b, &gf, DEFAULT_TOL).unwrap();
        let idx = g.ball_indices(&b);
        let mut a = DMatrix::<f64>::zeros(2, 2);
        let mut rhs = DVector::<f64>::zeros(2);
        for &j in &idx {
            let x = g.node(j)[0];
            let w = 1.0 / gf.value(&[x], tau);
            let m = [1.0, x];
            for r in 0..2 {
                rhs[r] += w * m[r] * f.samples()[j];
                for c in 0..2 {
                    a[(r, c)] += w * m[r] * m[c];
                }
            }
        }
        let c = a.lu().solve(&rhs).unwrap();
        let mut acc = 0.0;
        for &j in &idx {
            let x = g.node(j)[0];
            let r = f.samples()[j] - c[0] - c[1] * x;
            acc += r * r / gf.value(&[x], tau);
        }
        let want = tau * (acc * g.cell_volume()).sqrt();
        assert!((got.value / want - 1.0).abs() < 1e-10, "{} vs {want}", got.value);
    }

    #[test]
    fn polynomial_infimum_is_zero() {
        let g = grid1(1.0, 256);
        let f = GridFunction::from_fn(&g, |x| 1.0 + x[0] - x[0] * x[0]).unwrap();
        let fam = family(&g);
        let v = campanato_inf_norm(&f, &GrowthFunction::power(0.5), 1.5, 2, &fam).unwrap();
        assert!(v.value < 1e-10, "{}", v.value);
    }

    #[test]
    fn eps_variant_dominates_on_ball_part() {
        let g = grid1(1.0, 512);
        let f = log_abs(&g);
        let fam = family(&g);
        let gf = GrowthFunction::power(1.0);
        let idx = GrowthIndices::exact(1.0, 1.0, 1);
        let ve = campanato_eps_norm(&f, &gf, 0, 1.0, &fam, &idx).unwrap();
        let v1 = campanato_norm(&f, &gf, 1.0, 0, &fam).unwrap();
        for k in 0..fam.len() {
            // on B the kernel is at least 1/(2 δ^n) and |B| ≈ 2δ
            let c = g.ball_measure(&fam[k]) / (2.0 * fam[k].radius);
            assert!(ve.per_ball[k] >= c * v1.per_ball[k] * (1.0 - 1e-12));
        }
        let r = ve.value / v1.value;
        assert!((1.0 / 32.0..=32.0).contains(&r), "{r}");
    }

    #[test]
    fn eps_threshold_enforced() {
        let g = grid1(1.0, 128);
        let f = log_abs(&g);
        let fam = family(&g);
        let idx = GrowthIndices::exact(0.5, 1.0, 1);
        let err = campanato_eps_norm(&f, &GrowthFunction::power(0.5), 0, 1.0, &fam, &idx).unwrap_err();
        assert!(matches!(err, Error::EpsilonTooSmall { .. }));
    }

    #[test]
    fn log_abs_refinement_stable() {
        let gf = GrowthFunction::power(1.0);
        let vals: Vec<f64> = [512, 1024, 2048]
            .iter()
            .map(|&res| {
                let g = grid1(1.0, res);
                let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 16.0 * res as f64 / 512.0 };
                let fam = ball_family(&g, &cfg).unwrap();
                campanato_norm(&log_abs(&g), &gf, 1.0, 0, &fam).unwrap().value
            })
            .collect();
        assert!(vals[0] > 0.0);
        let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo <= 1.15, "{vals:?}");
    }

    #[test]
    fn equivalence_report_shapes() {
        let g = grid1(1.0, 512);
        let fam = family(&g);
        let gf = GrowthFunction::power(1.0);
        let idx = GrowthIndices::exact(1.0, 1.0, 1);
        let c = GridFunction::from_fn(&g, |_| 1.0).unwrap();
        let rep = equivalence_report(&c, &gf, 0, &[1.0, 2.0], 1.0, &fam, &idx, [1.0 / 64.0, 64.0]).unwrap();
        assert!(rep.rows.iter().all(|r| r.r_q_1.is_none() && r.flags.iter().any(|f| f.contains("0/0"))));
        let rep = equivalence_report(&log_abs(&g), &gf, 0, &[1.0, 2.0], 1.0, &fam, &idx, [1.0 / 64.0, 64.0]).unwrap();
        let r = rep.rows[1].r_q_1.unwrap();
        assert!((1.0..=50.0).contains(&r), "{r}");
        assert!(rep.rows[1].r_1_q.unwrap() <= 1.0 + 1e-9);
        let limited = GrowthIndices::exact(1.0, 2.0, 1);
        assert!(matches!(
            equivalence_report(&c, &gf, 0, &[2.0], 1.5, &fam, &limited, [0.0, 1.0]),
            Err(Error::QOutOfRange { .. })
        ));
    }

    #[test]
    fn infimum_start_is_projection() {
        let g = grid1(1.0, 256);
        let f = log_abs(&g);
        let b = Ball::new(vec![0.0], 0.5).unwrap();
        let r = campanato_inf_ball(&f, &GrowthFunction::power(1.0), 1.0, 0, &b, 3).unwrap();
        let p = project(&f, &b, 0).unwrap();
        assert!(r.iterations > 0 || r.poly == p);
    }
}
