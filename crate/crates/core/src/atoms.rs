//! `(φ, q, s)`-atoms: construction, validation, `L^q_φ(B)` norms, `Λ_q`, and
//! the pairing bound `|∫ a g| ≤ per-ball Campanato value of g at q'`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::campanato::campanato_ball;
use crate::error::{Error, Result};
use crate::grid::{Ball, Grid, GridFunction, Region};
use crate::growth::{conjugate, logspace, phi_measure, GrowthFunction};
use crate::luxembourg::{chi_ball_norm, invert_modular, DEFAULT_TOL};
use crate::polyproj::{basis_len, monomials, oscillation};

pub const T_GRID_POINTS: usize = 121;
/// Relative slack of the size condition.
pub const SIZE_SLACK: f64 = 1e-6;
/// Moment tolerance relative to `‖a‖_{L¹}`.
pub const MOMENT_TOL: f64 = 1e-8;

/// `t ∈ [1e-6, 1e6] · τ`, log-spaced; contains `τ` itself.
pub fn default_t_grid(tau: f64, points: usize) -> Vec<f64> {
    logspace(1e-6, 1e6, points).into_iter().map(|t| t * tau).collect()
}

/// `sup_t [φ(B,t)⁻¹ ∫_B |f|^q φ(x,t) dx]^{1/q}` over `t_grid`; `q = ∞` gives
/// the largest node value on `B`.
pub fn lq_phi_ball_norm(f: &GridFunction, ball: &Ball, q: f64, gf: &GrowthFunction, t_grid: &[f64]) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidInput(format!("L^q_phi needs q >= 1, got {q}")));
    }
    let grid = f.grid();
    let n = grid.dim();
    let idx = grid.ball_indices(ball);
    let vals: Vec<f64> = idx.iter().map(|&j| f.samples()[j].abs()).collect();
    if vals.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(vals.iter().copied().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = vals.iter().map(|v| v.powf(q)).collect();
    let nodes: Vec<_> = idx.iter().map(|&j| grid.node(j)).collect();
    let mut sup = 0.0_f64;
    for &t in t_grid {
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, p) in nodes.iter().zip(&powered) {
            let w = gf.eval(&x[..n], t)?;
            num += p * w;
            den += w;
        }
        if den > 0.0 {
            sup = sup.max(num / den);
        }
    }
    Ok(sup.powf(1.0 / q))
}

/// Outcome of [`validate_atom`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub support_ok: bool,
    pub moments_ok: bool,
    pub size_ok: bool,
    /// Largest `|a|` outside the ball.
    pub outside_max: f64,
    /// Largest `|∫ a u^α| / ‖a‖_{L¹}` in the scaled basis.
    pub moment_margin: f64,
    /// `‖a‖_{L^q_φ(B)} ‖χ_B‖`.
    pub size_ratio: f64,
}

impl AtomReport {
    pub fn passed(&self) -> bool {
        self.support_ok && self.moments_ok && self.size_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub values: GridFunction,
    pub ball: Ball,
    pub q: f64,
    pub s: usize,
    pub certified: Option<AtomReport>,
}

/// JSON sidecar written next to the atom's CSV samples. `q = None` is `∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomMeta {
    pub center: Vec<f64>,
    pub radius: f64,
    pub q: Option<f64>,
    pub s: usize,
    pub report: Option<AtomReport>,
}

impl Atom {
    pub fn meta(&self) -> AtomMeta {
        AtomMeta {
            center: self.ball.center.clone(),
            radius: self.ball.radius,
            q: if self.q.is_finite() { Some(self.q) } else { None },
            s: self.s,
            report: self.certified.clone(),
        }
    }

    pub fn from_parts(values: GridFunction, meta: &AtomMeta) -> Result<Self> {
        Ok(Atom {
            values,
            ball: Ball::new(meta.center.clone(), meta.radius)?,
            q: meta.q.unwrap_or(f64::INFINITY),
            s: meta.s,
            certified: meta.report.clone(),
        })
    }

    pub fn scaled(&self, c: f64) -> Atom {
        Atom { values: self.values.scaled(c), certified: None, ..self.clone() }
    }
}

/// Restrict `profile` to `ball`, remove its degree-`s` projection, and rescale
/// to `‖a‖_{L^q_φ(B)} = ‖χ_B‖⁻¹`.
pub fn make_atom(profile: &GridFunction, ball: &Ball, q: f64, s: usize, gf: &GrowthFunction) -> Result<Atom> {
    let grid = profile.grid();
    let restricted = profile.restricted(ball);
    let scale = restricted.max_abs();
    if scale == 0.0 {
        return Err(Error::DegenerateProfile);
    }
    let osc = oscillation(&restricted, ball, s)?;
    let rmax = osc.residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    if rmax <= 1e-10 * scale {
        return Err(Error::DegenerateProfile);
    }
    let mut samples = vec![0.0; grid.len()];
    for (&j, r) in osc.indices.iter().zip(&osc.residual) {
        samples[j] = *r;
    }
    let raw = GridFunction::new(grid.clone(), samples)?;
    let tau = 1.0 / chi_ball_norm(grid, ball, gf, DEFAULT_TOL)?;
    let norm = lq_phi_ball_norm(&raw, ball, q, gf, &default_t_grid(tau, T_GRID_POINTS))?;
    let mut atom = Atom { values: raw.scaled(tau / norm), ball: ball.clone(), q, s, certified: None };
    atom.certified = Some(validate_atom(&atom, gf)?);
    Ok(atom)
}

/// Support, moment and size checks.
pub fn validate_atom(a: &Atom, gf: &GrowthFunction) -> Result<AtomReport> {
    let grid = a.values.grid();
    let n = grid.dim();
    let mut outside_max = 0.0_f64;
    let mut l1 = 0.0;
    let m = basis_len(n, a.s);
    let mut moments = vec![0.0; m];
    let mut mono = Vec::with_capacity(m);
    for (j, &v) in a.values.samples().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let x = grid.node(j);
        if !a.ball.contains(&x[..n]) {
            outside_max = outside_max.max(v.abs());
        }
        l1 += v.abs();
        let mut u = [0.0; 2];
        for i in 0..n {
            u[i] = (x[i] - a.ball.center[i]) / a.ball.radius;
        }
        monomials(n, a.s, &u, &mut mono);
        for (acc, mk) in moments.iter_mut().zip(&mono) {
            *acc += v * mk;
        }
    }
    let moment_margin = if l1 > 0.0 { moments.iter().fold(0.0_f64, |w, v| w.max(v.abs())) / l1 } else { 0.0 };
    let tau = 1.0 / chi_ball_norm(grid, &a.ball, gf, DEFAULT_TOL)?;
    let size = lq_phi_ball_norm(&a.values, &a.ball, a.q, gf, &default_t_grid(tau, T_GRID_POINTS))?;
    let size_ratio = size / tau;
    Ok(AtomReport {
        support_ok: outside_max == 0.0,
        moments_ok: moment_margin <= MOMENT_TOL,
        size_ok: size_ratio <= 1.0 + SIZE_SLACK,
        outside_max,
        moment_margin,
        size_ratio,
    })
}

/// One term `λ_j b_j` of a decomposition, through its ball and size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiple {
    pub ball: Ball,
    /// `‖b_j‖_{L^q_φ(B_j)}`
    pub lq_norm: f64,
}

/// `Λ_q = inf{λ > 0 : Σ_j φ(B_j, ‖b_j‖/λ) ≤ 1}`.
pub fn lambda_q(grid: &Grid, gf: &GrowthFunction, multiples: &[Multiple], tol: f64) -> Result<f64> {
    let live: Vec<&Multiple> = multiples.iter().filter(|m| m.lq_norm > 0.0).collect();
    if live.is_empty() {
        return Ok(0.0);
    }
    let mut lambda0 = 0.0_f64;
    for m in &live {
        lambda0 = lambda0.max(m.lq_norm * chi_ball_norm(grid, &m.ball, gf, tol)?);
    }
    let theta = |lambda: f64| {
        let mut acc = 0.0;
        for m in &live {
            match phi_measure(gf, grid, Region::Ball(&m.ball), m.lq_norm / lambda) {
                Ok(v) => acc += v,
                Err(_) => return f64::INFINITY,
            }
        }
        acc
    };
    Ok(invert_modular(theta, lambda0, tol)?.norm)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub pairing: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `∫ a g` against the `q'`-Campanato value of `g` on the atom's ball.
///
/// The test allows a rounding floor of `1e-12 ‖a‖_{L¹} max_B |g|` on top of
/// the relative slack, which only matters when `g` is a polynomial.
pub fn duality_pairing(a: &Atom, g: &GridFunction, s: usize, gf: &GrowthFunction) -> Result<Pairing> {
    let grid = a.values.grid();
    if grid != g.grid() {
        return Err(Error::InvalidInput("atom and test function live on different grids".into()));
    }
    if !(a.q > 1.0) {
        return Err(Error::InvalidInput("atoms need q > 1".into()));
    }
    let qp = conjugate(a.q);
    let mut pairing = 0.0;
    let mut l1 = 0.0;
    for (av, gv) in a.values.samples().iter().zip(g.samples()) {
        pairing += av * gv;
        l1 += av.abs();
    }
    pairing *= grid.cell_volume();
    l1 *= grid.cell_volume();
    let gmax = grid.ball_indices(&a.ball).iter().fold(0.0_f64, |m, &j| m.max(g.samples()[j].abs()));
    let (bound, _) = campanato_ball(g, gf, qp, s, &a.ball)?;
    let pass = pairing.abs() <= (1.0 + SIZE_SLACK) * bound + 1e-12 * l1 * gmax;
    Ok(Pairing { pairing, bound, pass })
}

/// [`validate_atom`] over a batch.
pub fn validate_batch(atoms: &[Atom], gf: &GrowthFunction) -> Result<Vec<AtomReport>> {
    atoms.par_iter().map(|a| validate_atom(a, gf)).collect()
}
