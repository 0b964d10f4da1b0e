//! Multiscale square transform `φ_t * b`, tents, the area functional and the
//! φ-Carleson norm of `dμ = |φ_t * b|² dx dt / t`.
//!
//! The kernel is radial, `ψ(r) = (1 - r²)^m Σ_j c_j r^{2j}` on `r < 1`, with
//! the coefficients chosen so the continuous moments through order `s`
//! vanish. Each sampled stencil is corrected again so its discrete moments
//! vanish too.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Ball, Grid, GridFunction};
use crate::growth::{logspace, GrowthFunction};
use crate::luxembourg::{chi_ball_norm, DEFAULT_TOL};
use crate::polyproj::{multi_indices, MAX_DEGREE};

/// Exponent `m` of the bump `(1 - r²)^m`.
pub const BUMP_POWER: i32 = 4;
/// Default Calderón band, 10 octaves.
pub const DEFAULT_BAND: (f64, f64) = (1.0 / 32.0, 32.0);
pub const XI_POINTS: usize = 64;
pub const MAX_DEVIATION: f64 = 0.5;
pub const LEVELS_PER_OCTAVE: usize = 8;
const PROFILE_SAMPLES: usize = 257;
const SPECTRAL_NODES: usize = 4096;
const U_STEP: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    PolyBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub n: usize,
    pub s: usize,
    pub shape: KernelShape,
    /// `c_j` multiplying `r^{2j}`.
    pub coeffs: Vec<f64>,
    /// Calderón normalization factor.
    pub scale: f64,
    /// `scale · ψ` at `PROFILE_SAMPLES` points of `[0, 1]`.
    pub profile: Vec<f64>,
    pub calderon_band: (f64, f64),
    pub calderon_deviation: f64,
}

/// `B(a, m + 1) = m! / (a (a+1) ... (a+m))`.
fn beta_int(a: f64, m: i32) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..=m {
        if i > 0 {
            num *= i as f64;
        }
        den *= a + i as f64;
    }
    num / den
}

impl Kernel {
    fn raw(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let r2 = r * r;
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c);
        (1.0 - r2).powi(BUMP_POWER) * poly
    }

    /// Normalized radial profile at radius `r`.
    pub fn radial(&self, r: f64) -> f64 {
        self.scale * self.raw(r)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.radial(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `g` with `φ̂(ξ) = 2 ∫_0^1 g(x) cos(xξ) dx` (unnormalized): the profile
    /// itself in 1D, its projection onto a line in 2D.
    fn spectral_density(&self) -> Vec<f64> {
        let dx = 1.0 / SPECTRAL_NODES as f64;
        (0..=SPECTRAL_NODES)
            .map(|i| {
                let x = i as f64 * dx;
                if self.n == 1 {
                    self.raw(x)
                } else {
                    let top = (1.0 - x * x).max(0.0).sqrt();
                    let m = 256;
                    let dy = top / m as f64;
                    let acc: f64 = (0..=m)
                        .map(|k| {
                            let y = k as f64 * dy;
                            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                            w * self.raw((x * x + y * y).sqrt())
                        })
                        .sum();
                    2.0 * acc * dy / 3.0
                }
            })
            .collect()
    }
}

fn simpson_weight(i: usize, last: usize) -> f64 {
    if i == 0 || i == last {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// `φ̂(ξ)` of the unnormalized kernel from its spectral density.
fn fourier(density: &[f64], xi: f64) -> f64 {
    let last = density.len() - 1;
    let dx = 1.0 / last as f64;
    let acc: f64 = density
        .iter()
        .enumerate()
        .map(|(i, g)| simpson_weight(i, last) * g * (i as f64 * dx * xi).cos())
        .sum();
    2.0 * acc * dx / 3.0
}

/// Radial poly-bump with vanishing moments through order `s`, Calderón
/// normalized over [`DEFAULT_BAND`].
pub fn build_kernel(n: usize, s: usize, shape: KernelShape) -> Result<Kernel> {
    if !(1..=2).contains(&n) || s > MAX_DEGREE {
        return Err(Error::InvalidInput(format!("kernel needs n in {{1,2}} and s <= {MAX_DEGREE}")));
    }
    let kk = s / 2 + 1;
    let half_n = n as f64 / 2.0;
    let mut a = DMatrix::<f64>::zeros(kk, kk);
    let mut rhs = DVector::<f64>::zeros(kk);
    for k in 0..kk {
        rhs[k] = -0.5 * beta_int(k as f64 + half_n, BUMP_POWER);
        for j in 1..=kk {
            a[(k, j - 1)] = 0.5 * beta_int((j + k) as f64 + half_n, BUMP_POWER);
        }
    }
    let c = a.lu().solve(&rhs).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    let mut coeffs = vec![1.0];
    coeffs.extend(c.iter());
    let mut kernel = Kernel {
        n,
        s,
        shape,
        coeffs,
        scale: 1.0,
        profile: Vec::new(),
        calderon_band: DEFAULT_BAND,
        calderon_deviation: 0.0,
    };
    let xi = default_xi_grid(&kernel, DEFAULT_BAND);
    calderon_deviation(&mut kernel, DEFAULT_BAND, &xi)?;
    Ok(kernel)
}

/// 64 log-spaced frequencies spanning `e^{u*}·[1/4, 4] / sqrt(t_min t_max)`,
/// with `u*` the peak of `|φ̂(e^u)|²`.
pub fn default_xi_grid(kernel: &Kernel, band: (f64, f64)) -> Vec<f64> {
    let density = kernel.spectral_density();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=1200 {
        let u = -4.0 + 0.01 * i as f64;
        let g = fourier(&density, u.exp()).powi(2);
        if g > best.0 {
            best = (g, u);
        }
    }
    let centre = best.1.exp() / (band.0 * band.1).sqrt();
    logspace(centre / 4.0, centre * 4.0, XI_POINTS)
}

/// `I(ξ) = ∫_band |φ̂(ξt)|² dt/t` for the unnormalized kernel, by a cumulative
/// trapezoid table in `u = ln(ξt)`.
pub fn band_integrals(kernel: &Kernel, band: (f64, f64), xi_grid: &[f64]) -> Vec<f64> {
    let density = kernel.spectral_density();
    let lo = xi_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xi_grid.iter().copied().fold(0.0, f64::max);
    let u0 = (lo * band.0).ln();
    let u1 = (hi * band.1).ln();
    let steps = ((u1 - u0) / U_STEP).ceil().max(1.0) as usize;
    let du = (u1 - u0) / steps as f64;
    let g: Vec<f64> = (0..=steps)
        .into_par_iter()
        .map(|i| fourier(&density, (u0 + i as f64 * du).exp()).powi(2))
        .collect();
    let mut cum = vec![0.0; steps + 1];
    for i in 1..=steps {
        cum[i] = cum[i - 1] + 0.5 * du * (g[i] + g[i - 1]);
    }
    let at = |u: f64| {
        let x = ((u - u0) / du).clamp(0.0, steps as f64);
        let i = (x.floor() as usize).min(steps - 1);
        let f = x - i as f64;
        cum[i] + f * (cum[i + 1] - cum[i])
    };
    xi_grid.iter().map(|&xi| at((xi * band.1).ln()) - at((xi * band.0).ln())).collect()
}

/// Rescales `kernel` so the band integral has mean 1 over `xi_grid` and
/// returns `max_ξ |I(ξ) - 1|`.
pub fn calderon_deviation(kernel: &mut Kernel, band: (f64, f64), xi_grid: &[f64]) -> Result<f64> {
    if !(band.0 > 0.0 && band.1 > band.0) || xi_grid.is_empty() {
        return Err(Error::InvalidInput("Calderon band needs 0 < t_min < t_max and a nonempty xi grid".into()));
    }
    let vals = band_integrals(kernel, band, xi_grid);
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::BandTooNarrow { deviation: f64::INFINITY });
    }
    let deviation = vals.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max);
    if deviation > MAX_DEVIATION {
        return Err(Error::BandTooNarrow { deviation });
    }
    kernel.scale = 1.0 / mean.sqrt();
    kernel.calderon_band = band;
    kernel.calderon_deviation = deviation;
    kernel.profile = (0..PROFILE_SAMPLES)
        .map(|i| kernel.radial(i as f64 / (PROFILE_SAMPLES - 1) as f64))
        .collect();
    Ok(deviation)
}

/// Node offsets `y` (in cells) with `|y| < t`, in node order.
pub fn disk_offsets(grid: &Grid, t: f64) -> Vec<[isize; 2]> {
    let n = grid.dim();
    let h = grid.spacing();
    let reach: Vec<isize> = (0..n).map(|a| (t / h[a]).ceil() as isize).collect();
    let mut out = Vec::new();
    if n == 1 {
        for i in -reach[0]..=reach[0] {
            let y = i as f64 * h[0];
            if y * y < t * t {
                out.push([i, 0]);
            }
        }
    } else {
        for i in -reach[0]..=reach[0] {
            for k in -reach[1]..=reach[1] {
                let (y0, y1) = (i as f64 * h[0], k as f64 * h[1]);
                if y0 * y0 + y1 * y1 < t * t {
                    out.push([i, k]);
                }
            }
        }
    }
    out
}

/// Discrete dilated kernel at scale `t`, weights already multiplied by `h^n`.
#[derive(Clone, Debug)]
pub struct Stencil {
    pub offsets: Vec<[isize; 2]>,
    pub weights: Vec<f64>,
    pub reach: [usize; 2],
}

/// Samples `t^{-n} k(y/t) h^n` and removes the discrete moments of even
/// degree `<= s` with a bump-weighted correction; odd moments vanish by
/// point symmetry.
pub fn stencil(kernel: &Kernel, grid: &Grid, t: f64) -> Result<Stencil> {
    let n = grid.dim();
    let h = grid.spacing();
    let offsets = disk_offsets(grid, t);
    let vol = grid.cell_volume();
    let tn = t.powi(n as i32);
    let cols: Vec<[usize; 2]> = multi_indices(n, kernel.s).into_iter().filter(|a| (a[0] + a[1]) % 2 == 0).collect();
    if offsets.len() < cols.len() {
        return Err(Error::LevelTooCoarse { t });
    }
    let mut k = Vec::with_capacity(offsets.len());
    let mut omega = Vec::with_capacity(offsets.len());
    let mut rows = Vec::with_capacity(offsets.len());
    for o in &offsets {
        let u = [o[0] as f64 * h[0] / t, if n == 2 { o[1] as f64 * h[1] / t } else { 0.0 }];
        let rho2 = u[0] * u[0] + u[1] * u[1];
        k.push(kernel.radial(rho2.sqrt()) / tn * vol);
        omega.push((1.0 - rho2).powi(BUMP_POWER));
        rows.push(cols.iter().map(|a| u[0].powi(a[0] as i32) * u[1].powi(a[1] as i32)).collect::<Vec<f64>>());
    }
    let m = cols.len();
    let mut g = DMatrix::<f64>::zeros(m, m);
    let mut mom = DVector::<f64>::zeros(m);
    for (idx, row) in rows.iter().enumerate() {
        for a in 0..m {
            mom[a] += row[a] * k[idx];
            for b in 0..m {
                g[(a, b)] += omega[idx] * row[a] * row[b];
            }
        }
    }
    let chol = g.cholesky().ok_or(Error::LevelTooCoarse { t })?;
    let coef = chol.solve(&mom);
    let mut weights: Vec<f64> = k
        .iter()
        .zip(&omega)
        .zip(&rows)
        .map(|((kv, w), row)| kv - w * row.iter().zip(coef.iter()).map(|(r, c)| r * c).sum::<f64>())
        .collect();
    // exact point symmetry
    let len = weights.len();
    for i in 0..len / 2 {
        let v = 0.5 * (weights[i] + weights[len - 1 - i]);
        weights[i] = v;
        weights[len - 1 - i] = v;
    }
    let mut reach = [0usize; 2];
    for o in &offsets {
        reach[0] = reach[0].max(o[0].unsigned_abs());
        reach[1] = reach[1].max(o[1].unsigned_abs());
    }
    Ok(Stencil { offsets, weights, reach })
}

/// `t_k = 4h · 2^{k/8}` up to a quarter of the shortest box side.
pub fn default_t_levels(grid: &Grid) -> Vec<f64> {
    let t0 = 4.0 * grid.min_spacing();
    let top = grid.bbox().shortest_side() / 4.0;
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let t = t0 * 2f64.powf(k as f64 / LEVELS_PER_OCTAVE as f64);
        if t > top * (1.0 + 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}

/// Samples of `φ_t * b` on nodes × levels.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpaceField {
    pub grid: Grid,
    pub t_levels: Vec<f64>,
    pub dln_t: f64,
    /// Level-major, `values[k * len + j]`.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl HalfSpaceField {
    pub fn at(&self, level: usize, node: usize) -> f64 {
        self.values[level * self.grid.len() + node]
    }

    pub fn is_valid(&self, level: usize, node: usize) -> bool {
        self.valid[level * self.grid.len() + node]
    }

    pub fn scaled(&self, c: f64) -> Self {
        HalfSpaceField { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    /// Largest `|value|` over valid samples.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.valid).filter(|(_, ok)| **ok).fold(0.0, |m, (v, _)| m.max(v.abs()))
    }
}

fn check_levels(grid: &Grid, t_levels: &[f64]) -> Result<f64> {
    if t_levels.is_empty() || t_levels.windows(2).any(|w| w[1] <= w[0]) || t_levels[0] <= 0.0 {
        return Err(Error::InvalidInput("t levels must be positive and increasing".into()));
    }
    if t_levels[0] <= grid.min_spacing() || *t_levels.last().unwrap() >= grid.bbox().shortest_side() {
        return Err(Error::InvalidInput("t levels must lie strictly between the grid step and the box size".into()));
    }
    Ok(if t_levels.len() > 1 { (t_levels[1] / t_levels[0]).ln() } else { LN_2 / LEVELS_PER_OCTAVE as f64 })
}

fn transform(b: &GridFunction, kernel: &Kernel, t_levels: &[f64], periodic: bool) -> Result<HalfSpaceField> {
    let grid = b.grid();
    if grid.dim() != kernel.n {
        return Err(Error::InvalidInput("kernel and grid dimensions differ".into()));
    }
    let dln_t = check_levels(grid, t_levels)?;
    let n = grid.dim();
    let res = grid.res().to_vec();
    let r1 = if n == 2 { res[1] as isize } else { 1 };
    let samples = b.samples();
    let levels: Vec<Result<(Vec<f64>, Vec<bool>)>> = t_levels
        .par_iter()
        .map(|&t| {
            let st = stencil(kernel, grid, t)?;
            let mut vals = vec![0.0; grid.len()];
            let mut ok = vec![false; grid.len()];
            let lin: Vec<isize> = st.offsets.iter().map(|o| o[0] * r1 + o[1]).collect();
            for j in 0..grid.len() {
                let ij = grid.unravel(j);
                let inside = (0..n).all(|a| ij[a] >= st.reach[a] && ij[a] + st.reach[a] < res[a]);
                if inside {
                    let mut acc = 0.0;
                    for (w, d) in st.weights.iter().zip(&lin) {
                        acc += w * samples[(j as isize - d) as usize];
                    }
                    vals[j] = acc;
                    ok[j] = true;
                } else if periodic {
                    let mut acc = 0.0;
                    for (w, o) in st.weights.iter().zip(&st.offsets) {
                        let mut src = [0usize; 2];
                        for a in 0..n {
                            src[a] = (ij[a] as isize - o[a]).rem_euclid(res[a] as isize) as usize;
                        }
                        acc += w * samples[grid.ravel(src)];
                    }
                    vals[j] = acc;
                    ok[j] = true;
                }
            }
            if !ok.iter().any(|v| *v) {
                return Err(Error::LevelTooCoarse { t });
            }
            Ok((vals, ok))
        })
        .collect();
    let mut values = Vec::with_capacity(grid.len() * t_levels.len());
    let mut valid = Vec::with_capacity(grid.len() * t_levels.len());
    for l in levels {
        let (v, ok) = l?;
        values.extend(v);
        valid.extend(ok);
    }
    Ok(HalfSpaceField { grid: grid.clone(), t_levels: t_levels.to_vec(), dln_t, values, valid })
}

/// `φ_t * b` by direct summation; nodes whose dilated support leaves the box
/// are marked invalid.
pub fn square_transform(b: &GridFunction, kernel: &Kernel, t_levels: &[f64]) -> Result<HalfSpaceField> {
    transform(b, kernel, t_levels, false)
}

/// Same transform on the discrete torus: every node is valid.
pub fn square_transform_periodic(b: &GridFunction, kernel: &Kernel, t_levels: &[f64]) -> Result<HalfSpaceField> {
    transform(b, kernel, t_levels, true)
}

/// Per-level disk offsets as linear node shifts, plus the 1D half-width.
fn level_offsets(grid: &Grid, t_levels: &[f64]) -> Vec<(Vec<[isize; 2]>, isize)> {
    t_levels
        .iter()
        .map(|&t| {
            let offs = disk_offsets(grid, t);
            let m = offs.iter().map(|o| o[0]).max().unwrap_or(0);
            (offs, m)
        })
        .collect()
}

fn shifted(grid: &Grid, j: usize, o: &[isize; 2]) -> Option<usize> {
    let ij = grid.unravel(j);
    let mut out = [0usize; 2];
    for a in 0..grid.dim() {
        let v = ij[a] as isize + o[a];
        if v < 0 || v >= grid.res()[a] as isize {
            return None;
        }
        out[a] = v as usize;
    }
    Some(grid.ravel(out))
}

/// Tent sum `Σ_{|x_j - x_0| + t_k < r} |F|² t_k^n / φ(B(x_j, t_k), τ) h^n Δln t`
/// and the number of tent points used.
pub fn tent_sum(field: &HalfSpaceField, gf: &GrowthFunction, ball: &Ball, tau: f64) -> Result<(f64, usize)> {
    let grid = &field.grid;
    let n = grid.dim();
    let vol = grid.cell_volume();
    let w: Vec<f64> = (0..grid.len())
        .map(|j| {
            let x = grid.node(j);
            gf.eval(&x[..n], tau)
        })
        .collect::<Result<_>>()?;
    let prefix: Vec<f64> = if n == 1 {
        let mut p = vec![0.0; w.len() + 1];
        for (j, v) in w.iter().enumerate() {
            p[j + 1] = p[j] + v;
        }
        p
    } else {
        Vec::new()
    };
    let offsets = level_offsets(grid, &field.t_levels);
    let mut acc = 0.0;
    let mut count = 0;
    for (k, &t) in field.t_levels.iter().enumerate() {
        if t >= ball.radius {
            break;
        }
        let inner = Ball { center: ball.center.clone(), radius: ball.radius - t };
        let tn = t.powi(n as i32);
        for j in grid.ball_indices(&inner) {
            if !field.is_valid(k, j) {
                continue;
            }
            let measure = if n == 1 {
                let m = offsets[k].1;
                let lo = (j as isize - m).max(0) as usize;
                let hi = ((j as isize + m) as usize).min(grid.len() - 1);
                (prefix[hi + 1] - prefix[lo]) * vol
            } else {
                offsets[k].0.iter().filter_map(|o| shifted(grid, j, o)).map(|i| w[i]).sum::<f64>() * vol
            };
            if measure <= 0.0 {
                continue;
            }
            let f = field.at(k, j);
            acc += f * f * tn / measure;
            count += 1;
        }
    }
    Ok((acc * vol * field.dln_t, count))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonNorm {
    pub value: f64,
    /// `None` for balls whose tent held no valid point.
    pub per_ball: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// `sup_B ‖χ_B‖⁻¹ (Σ_{tent} |F|² t^n / φ(B(x,t), ‖χ_B‖⁻¹) h^n Δln t)^{1/2}`.
pub fn carleson_norm(field: &HalfSpaceField, gf: &GrowthFunction, balls: &[Ball]) -> Result<CarlesonNorm> {
    let per: Vec<Result<Option<f64>>> = balls
        .par_iter()
        .map(|b| {
            let tau = 1.0 / chi_ball_norm(&field.grid, b, gf, DEFAULT_TOL)?;
            let (sum, count) = tent_sum(field, gf, b, tau)?;
            Ok(if count == 0 { None } else { Some(tau * sum.sqrt()) })
        })
        .collect();
    let mut per_ball = Vec::with_capacity(balls.len());
    let mut warnings = Vec::new();
    let mut value = 0.0_f64;
    for (b, r) in balls.iter().zip(per) {
        let v = r?;
        match v {
            Some(x) => value = value.max(x),
            None => warnings.push(format!("tent over {b} is empty at the coarsest level; ball skipped")),
        }
        per_ball.push(v);
    }
    Ok(CarlesonNorm { value, per_ball, warnings })
}

/// `𝒜(x) = (Σ_{|x-y| < t_k} |F(y, t_k)|² h^n Δln t / t_k^n)^{1/2}` per node.
pub fn area_function(field: &HalfSpaceField) -> Result<GridFunction> {
    let grid = &field.grid;
    let n = grid.dim();
    let len = grid.len();
    let vol = grid.cell_volume();
    let offsets = level_offsets(grid, &field.t_levels);
    let per_level: Vec<Vec<f64>> = (0..field.t_levels.len())
        .into_par_iter()
        .map(|k| {
            let t = field.t_levels[k];
            let scale = vol * field.dln_t / t.powi(n as i32);
            let sq: Vec<f64> = (0..len)
                .map(|j| if field.is_valid(k, j) { field.at(k, j).powi(2) } else { 0.0 })
                .collect();
            let mut out = vec![0.0; len];
            if n == 1 {
                let mut p = vec![0.0; len + 1];
                for j in 0..len {
                    p[j + 1] = p[j] + sq[j];
                }
                let m = offsets[k].1;
                for (j, o) in out.iter_mut().enumerate() {
                    let lo = (j as isize - m).max(0) as usize;
                    let hi = ((j as isize + m) as usize).min(len - 1);
                    *o = (p[hi + 1] - p[lo]) * scale;
                }
            } else {
                for (j, o) in out.iter_mut().enumerate() {
                    let s: f64 = offsets[k].0.iter().filter_map(|d| shifted(grid, j, d)).map(|i| sq[i]).sum();
                    *o = s * scale;
                }
            }
            out
        })
        .collect();
    let mut total = vec![0.0; len];
    for level in &per_level {
        for (t, v) in total.iter_mut().zip(level) {
            *t += v;
        }
    }
    GridFunction::new(grid.clone(), total.into_iter().map(f64::sqrt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campanato::bmo_phi_norm;
    use crate::grid::{ball_family, BallFamilyConfig, GridBox};

    fn grid1(res: usize) -> Grid {
        Grid::new(GridBox::symmetric(1, 1.0).unwrap(), vec![res]).unwrap()
    }

    fn fine_moment(k: &Kernel, p: i32) -> (f64, f64) {
        let m = 200_000;
        let h = 2.0 / m as f64;
        let mut acc = 0.0;
        let mut abs = 0.0;
        for i in 0..m {
            let x = -1.0 + (i as f64 + 0.5) * h;
            let v = k.value(&[x]);
            acc += v * x.powi(p) * h;
            abs += v.abs() * h;
        }
        (acc, abs)
    }

    #[test]
    fn kernel_moments_vanish() {
        for s in 0..=4 {
            let k = build_kernel(1, s, KernelShape::PolyBump).unwrap();
            for p in 0..=s as i32 {
                let (m, a) = fine_moment(&k, p);
                let tol = if s == 0 { 1e-10 } else { 1e-8 };
                assert!(m.abs() <= tol * a, "s={s} p={p}: {m:e}");
            }
        }
    }

    #[test]
    fn kernel_is_even() {
        let k = build_kernel(2, 2, KernelShape::PolyBump).unwrap();
        for x in [[0.1, 0.3], [0.55, -0.2], [0.0, 0.9]] {
            assert_eq!(k.value(&x), k.value(&[-x[0], -x[1]]));
        }
    }

    #[test]
    fn calderon_band_normalized() {
        for n in [1, 2] {
            let k = build_kernel(n, 0, KernelShape::PolyBump).unwrap();
            assert!(k.calderon_deviation <= 0.1, "n={n}: {}", k.calderon_deviation);
            let xi = default_xi_grid(&k, DEFAULT_BAND);
            let vals = band_integrals(&k, DEFAULT_BAND, &xi);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64 * k.scale * k.scale;
            assert!((mean - 1.0).abs() <= 1e-12, "{mean}");
        }
    }

    #[test]
    fn band_integral_shift() {
        let k = build_kernel(1, 1, KernelShape::PolyBump).unwrap();
        let xi = [0.5, 1.0, 3.0];
        let doubled: Vec<f64> = xi.iter().map(|x| 2.0 * x).collect();
        let a = band_integrals(&k, DEFAULT_BAND, &doubled);
        let b = band_integrals(&k, (2.0 * DEFAULT_BAND.0, 2.0 * DEFAULT_BAND.1), &xi);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(1e-300), "{x} {y}");
        }
    }

    #[test]
    fn narrow_band_is_rejected() {
        let mut k = build_kernel(1, 0, KernelShape::PolyBump).unwrap();
        let xi = logspace(1e-3, 1e3, 16);
        assert!(matches!(calderon_deviation(&mut k, (1.0, 1.5), &xi), Err(Error::BandTooNarrow { .. })));
    }

    #[test]
    fn stencil_moments_exact() {
        let g = grid1(512);
        for s in 0..=4 {
            let k = build_kernel(1, s, KernelShape::PolyBump).unwrap();
            for t in [4.0 * g.spacing()[0], 0.1, 0.3] {
                let st = stencil(&k, &g, t).unwrap();
                let l1: f64 = st.weights.iter().map(|w| w.abs()).sum();
                for p in 0..=s as i32 {
                    let m: f64 = st.offsets.iter().zip(&st.weights).map(|(o, w)| w * (o[0] as f64 * g.spacing()[0] / t).powi(p)).sum();
                    assert!(m.abs() <= 1e-12 * l1, "s={s} t={t} p={p}: {m:e}");
                }
            }
        }
    }

    #[test]
    fn polynomials_are_annihilated() {
        let g = grid1(1024);
        let levels = default_t_levels(&g);
        for s in 0..=2 {
            let k = build_kernel(1, s, KernelShape::PolyBump).unwrap();
            let b = GridFunction::from_fn(&g, |x| match s {
                0 => 5.0,
                1 => 1.0 - 2.0 * x[0],
                _ => 0.5 + x[0] - 3.0 * x[0] * x[0],
            })
            .unwrap();
            let f = square_transform(&b, &k, &levels).unwrap();
            assert!(f.max_abs() <= 1e-8 * b.max_abs(), "s={s}: {:e}", f.max_abs());
            let fam = ball_family(&g, &BallFamilyConfig::default()).unwrap();
            let c = carleson_norm(&f, &GrowthFunction::power(1.0), &fam).unwrap();
            assert!(c.value <= 1e-8 * b.max_abs());
        }
    }

    #[test]
    fn log_abs_field_is_bounded_and_comparable_to_bmo() {
        let g = grid1(2048);
        let b = GridFunction::from_fn(&g, |x| x[0].abs().ln()).unwrap();
        let k = build_kernel(1, 0, KernelShape::PolyBump).unwrap();
        let f = square_transform(&b, &k, &default_t_levels(&g)).unwrap();
        assert!(f.values.iter().all(|v| v.is_finite()));
        // fixed interior node, all valid levels
        let j = g.len() / 2 + 200;
        let m = (0..f.t_levels.len()).filter(|&l| f.is_valid(l, j)).map(|l| f.at(l, j).abs()).fold(0.0, f64::max);
        assert!(m < 5.0, "{m}");
        let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 5, min_radius_cells: 64.0 };
        let fam = ball_family(&g, &cfg).unwrap();
        let gf = GrowthFunction::power(1.0);
        let c = carleson_norm(&f, &gf, &fam).unwrap().value;
        let bmo = bmo_phi_norm(&b, &gf, &fam).unwrap().value;
        let r = c / bmo;
        assert!((1.0 / 64.0..=64.0).contains(&r), "{r}");
    }

    #[test]
    fn tent_nesting_with_frozen_normalization() {
        let g = grid1(1024);
        let b = GridFunction::from_fn(&g, |x| (3.0 * x[0]).sin() + x[0].abs().ln()).unwrap();
        let k = build_kernel(1, 1, KernelShape::PolyBump).unwrap();
        let f = square_transform(&b, &k, &default_t_levels(&g)).unwrap();
        let gf = GrowthFunction::weighted_power(1.0, crate::growth::Weight::AbsPower(1.0 / 3.0));
        let big = Ball::new(vec![0.0], 0.8).unwrap();
        let small = Ball::new(vec![0.2], 0.3).unwrap();
        let tau = 1.0 / chi_ball_norm(&g, &big, &gf, DEFAULT_TOL).unwrap();
        let (s1, _) = tent_sum(&f, &gf, &small, tau).unwrap();
        let (s2, _) = tent_sum(&f, &gf, &big, tau).unwrap();
        assert!(s1 <= s2);
        let fam = ball_family(&g, &BallFamilyConfig::default()).unwrap();
        let c1 = carleson_norm(&f, &gf, &fam).unwrap().value;
        let c3 = carleson_norm(&f.scaled(-3.0), &gf, &fam).unwrap().value;
        assert!((c3 / c1 - 3.0).abs() <= 1e-12 * 3.0);
    }

    #[test]
    fn torus_translation_covariance() {
        let g = grid1(256);
        let b = GridFunction::from_fn(&g, |x| (x[0] * 5.0).cos() + x[0] * x[0]).unwrap();
        let shift = 17;
        let mut moved = vec![0.0; g.len()];
        for j in 0..g.len() {
            moved[(j + shift) % g.len()] = b.samples()[j];
        }
        let moved = GridFunction::new(g.clone(), moved).unwrap();
        let k = build_kernel(1, 0, KernelShape::PolyBump).unwrap();
        let levels = default_t_levels(&g);
        let f0 = square_transform_periodic(&b, &k, &levels).unwrap();
        let f1 = square_transform_periodic(&moved, &k, &levels).unwrap();
        for l in 0..levels.len() {
            for j in 0..g.len() {
                let d = (f1.at(l, (j + shift) % g.len()) - f0.at(l, j)).abs();
                assert!(d <= 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn area_function_cone_and_homogeneity() {
        let g = grid1(128);
        let levels = default_t_levels(&g);
        let mut f = HalfSpaceField {
            grid: g.clone(),
            t_levels: levels.clone(),
            dln_t: LN_2 / 8.0,
            values: vec![0.0; g.len() * levels.len()],
            valid: vec![true; g.len() * levels.len()],
        };
        let a0 = area_function(&f).unwrap();
        assert!(a0.samples().iter().all(|&v| v == 0.0));
        let (k, y) = (5, 60);
        f.values[k * g.len() + y] = 2.0;
        let a = area_function(&f).unwrap();
        let t = levels[k];
        for j in 0..g.len() {
            let inside = (g.node(j)[0] - g.node(y)[0]).abs() < t;
            assert_eq!(a.samples()[j] > 0.0, inside, "node {j}");
        }
        let a3 = area_function(&f.scaled(-3.0)).unwrap();
        for (u, v) in a.samples().iter().zip(a3.samples()) {
            assert!((v - 3.0 * u).abs() <= 1e-12 * v.max(1e-300));
        }
    }

    #[test]
    fn two_dimensional_transform_runs() {
        let g = Grid::new(GridBox::symmetric(2, 1.0).unwrap(), vec![64, 64]).unwrap();
        let b = GridFunction::from_fn(&g, |x| 1.0 + x[0] - 2.0 * x[1]).unwrap();
        let k = build_kernel(2, 1, KernelShape::PolyBump).unwrap();
        let f = square_transform(&b, &k, &default_t_levels(&g)).unwrap();
        assert!(f.max_abs() <= 1e-8 * b.max_abs(), "{:e}", f.max_abs());
    }
}
