//! Growth functions `φ(x, t)`, uniform type constants, uniform Muckenhoupt
//! constants and grid estimates of the critical indices `i(φ)`, `q(φ)`, `m(φ)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ball_family, Ball, BallFamilyConfig, Grid, GridFunction, Region};

/// Nodes whose weight drops below this abort Muckenhoupt sums.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Serializable description of a growth function, as found in config files:
/// `{"kind":"weighted_power","p":0.5,"weight":{"abs_power":0.5}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthSpec {
    Power { p: f64 },
    WeightedPower { p: f64, weight: WeightSpec },
    KyLog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    Constant(f64),
    AbsPower(f64),
    /// Path to a grid-function CSV holding weight samples.
    Table(String),
}

/// Spatial weight `w(x)` in `w(x) t^p`.
#[derive(Clone)]
pub enum Weight {
    Constant(f64),
    /// `|x|^a`
    AbsPower(f64),
    /// Piecewise constant on the cells of the table's grid.
    Table(Arc<GridFunction>),
}

impl Weight {
    #[inline]
    fn at(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::AbsPower(a) => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                r2.powf(0.5 * a)
            }
            Weight::Table(tab) => {
                let g = tab.grid();
                let mut ij = [0usize; 2];
                for (axis, slot) in ij.iter_mut().enumerate().take(g.dim()) {
                    let u = (x[axis] - g.bbox().lo[axis]) / g.spacing()[axis];
                    *slot = (u.floor().max(0.0) as usize).min(g.res()[axis] - 1);
                }
                tab.samples()[g.ravel(ij)]
            }
        }
    }
}

type Evaluator = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum GrowthKind {
    /// `t^p`
    Power { p: f64 },
    /// `w(x) t^p`
    WeightedPower { p: f64, weight: Weight },
    /// `t / (ln(e + |x|) + ln(e + t))`
    KyLog,
    Custom { name: String, eval: Evaluator },
}

type ChiKey = (Vec<u64>, (Vec<u64>, u64), u64);

/// Memo table for `‖χ_B‖_{L^φ}`, shared by clones of one growth function.
#[derive(Default)]
pub(crate) struct ChiCache {
    map: RwLock<HashMap<ChiKey, f64>>,
}

impl ChiCache {
    pub(crate) fn get(&self, grid: &Grid, ball: &Ball, tol: f64) -> Option<f64> {
        let key = (grid.key(), ball.key(), tol.to_bits());
        self.map.read().expect("chi cache poisoned").get(&key).copied()
    }

    pub(crate) fn insert(&self, grid: &Grid, ball: &Ball, tol: f64, value: f64) {
        let key = (grid.key(), ball.key(), tol.to_bits());
        self.map.write().expect("chi cache poisoned").entry(key).or_insert(value);
    }
}

/// Evaluator `φ(x, t)` plus metadata.
#[derive(Clone)]
pub struct GrowthFunction {
    kind: GrowthKind,
    scale: f64,
    pub claimed_lower_type: f64,
    pub claimed_upper_type: f64,
    pub(crate) cache: Arc<ChiCache>,
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrowthFunction({})", self.fingerprint())
    }
}

impl GrowthFunction {
    fn with_kind(kind: GrowthKind, lower: f64) -> Self {
        GrowthFunction {
            kind,
            scale: 1.0,
            claimed_lower_type: lower,
            claimed_upper_type: 1.0,
            cache: Arc::new(ChiCache::default()),
        }
    }

    pub fn power(p: f64) -> Self {
        Self::with_kind(GrowthKind::Power { p }, p)
    }

    pub fn weighted_power(p: f64, weight: Weight) -> Self {
        Self::with_kind(GrowthKind::WeightedPower { p, weight }, p)
    }

    pub fn ky_log() -> Self {
        Self::with_kind(GrowthKind::KyLog, 1.0)
    }

    pub fn custom<F>(name: &str, lower_type: f64, eval: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        Self::with_kind(GrowthKind::Custom { name: name.to_string(), eval: Arc::new(eval) }, lower_type)
    }

    /// `c · φ` with a fresh memo table.
    pub fn rescaled(&self, c: f64) -> Self {
        GrowthFunction {
            kind: self.kind.clone(),
            scale: self.scale * c,
            claimed_lower_type: self.claimed_lower_type,
            claimed_upper_type: self.claimed_upper_type,
            cache: Arc::new(ChiCache::default()),
        }
    }

    /// Built-in growth functions used by the verification battery.
    pub fn builtins() -> Vec<GrowthFunction> {
        vec![
            Self::power(1.0),
            Self::power(0.75),
            Self::power(0.5),
            Self::weighted_power(1.0, Weight::AbsPower(1.0 / 3.0)),
            Self::weighted_power(0.5, Weight::AbsPower(1.0 / 3.0)),
            Self::weighted_power(1.0, Weight::AbsPower(0.5)),
            Self::ky_log(),
        ]
    }

    pub fn from_spec(spec: &GrowthSpec) -> Result<Self> {
        match spec {
            GrowthSpec::Power { p } => {
                check_exponent(*p)?;
                Ok(Self::power(*p))
            }
            GrowthSpec::WeightedPower { p, weight } => {
                check_exponent(*p)?;
                let w = match weight {
                    WeightSpec::Constant(c) if *c > 0.0 => Weight::Constant(*c),
                    WeightSpec::Constant(c) => {
                        return Err(Error::InvalidInput(format!("constant weight must be positive, got {c}")))
                    }
                    WeightSpec::AbsPower(a) => Weight::AbsPower(*a),
                    WeightSpec::Table(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| Error::InvalidInput(format!("weight table {path}: {e}")))?;
                        Weight::Table(Arc::new(GridFunction::from_csv(&text)?))
                    }
                };
                Ok(Self::weighted_power(*p, w))
            }
            GrowthSpec::KyLog => Ok(Self::ky_log()),
        }
    }

    pub fn kind(&self) -> &GrowthKind {
        &self.kind
    }

    /// Stable textual identity, used in reports and cache keys.
    pub fn fingerprint(&self) -> String {
        let base = match &self.kind {
            GrowthKind::Power { p } => format!("power(p={p})"),
            GrowthKind::WeightedPower { p, weight } => {
                let w = match weight {
                    Weight::Constant(c) => format!("const({c})"),
                    Weight::AbsPower(a) => format!("|x|^{a}"),
                    Weight::Table(t) => format!("table({} samples)", t.samples().len()),
                };
                format!("weighted_power(p={p}, w={w})")
            }
            GrowthKind::KyLog => "ky_log".to_string(),
            GrowthKind::Custom { name, .. } => format!("custom({name})"),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// `φ(x, t)` without error checking; `t >= 0` assumed.
    #[inline]
    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        let v = match &self.kind {
            GrowthKind::Power { p } => t.powf(*p),
            GrowthKind::WeightedPower { p, weight } => {
                if t == 0.0 {
                    0.0
                } else {
                    weight.at(x) * t.powf(*p)
                }
            }
            GrowthKind::KyLog => {
                if t == 0.0 {
                    0.0
                } else {
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    t / ((std::f64::consts::E + r).ln() + (std::f64::consts::E + t).ln())
                }
            }
            GrowthKind::Custom { eval, .. } => eval(x, t),
        };
        self.scale * v
    }

    /// `φ(x, t)`, rejecting negative `t` and non-finite values.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("growth function needs t >= 0, got {t}")));
        }
        let v = self.value(x, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularNode { x: x.to_vec(), t })
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("power exponent must lie in (0, 1], got {p}")))
    }
}

/// `φ(E, t) = ∫_E φ(x, t) dx` by midpoint quadrature.
pub fn phi_measure(gf: &GrowthFunction, grid: &Grid, region: Region<'_>, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("t must be >= 0, got {t}")));
    }
    let mut bad: Option<Vec<f64>> = None;
    let v = grid.sum_over(region, |_, x| {
        let v = gf.value(x, t);
        if !v.is_finite() && bad.is_none() {
            bad = Some(x.to_vec());
        }
        v
    })?;
    match bad {
        Some(x) => Err(Error::SingularNode { x, t }),
        None => Ok(v),
    }
}

/// `q' = q / (q - 1)`, infinite at `q = 1`.
pub fn conjugate(q: f64) -> f64 {
    if q <= 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|k| {
            if k == count - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeSide {
    Lower,
    Upper,
}

/// Sample set for uniform type constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypeSampling {
    pub points: Vec<Vec<f64>>,
    pub t_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
}

impl TypeSampling {
    /// Up to 64 evenly strided nodes of `grid`, `t ∈ [1e-6, 1e6]` (25 points),
    /// and `s` log-spaced on `[s_min, 1]` (lower) or `[1, s_max]` (upper).
    pub fn on_grid(grid: &Grid, side: TypeSide, s_extreme: f64) -> Self {
        let stride = (grid.len() / 64).max(1);
        let n = grid.dim();
        let points = (0..grid.len())
            .step_by(stride)
            .map(|j| grid.node(j)[..n].to_vec())
            .collect();
        let s_grid = match side {
            TypeSide::Lower => logspace(s_extreme, 1.0, 201),
            TypeSide::Upper => logspace(1.0, s_extreme, 61),
        };
        TypeSampling { points, t_grid: logspace(1e-6, 1e6, 25), s_grid }
    }
}

/// Sampled `sup φ(x, s t) / (s^p φ(x, t))` over the sample set.
pub fn uniform_type_constant(
    gf: &GrowthFunction,
    p: f64,
    side: TypeSide,
    sampling: &TypeSampling,
) -> Result<f64> {
    let mut sup = 0.0_f64;
    for x in &sampling.points {
        for &t in &sampling.t_grid {
            let base = gf.eval(x, t)?;
            if base <= 0.0 {
                return Err(Error::ZeroDenominator("phi(x, t) vanished at t > 0"));
            }
            for &s in &sampling.s_grid {
                let in_range = match side {
                    TypeSide::Lower => s > 0.0 && s <= 1.0,
                    TypeSide::Upper => s >= 1.0,
                };
                if !in_range {
                    continue;
                }
                let ratio = gf.eval(x, s * t)? / (s.powf(p) * base);
                if !ratio.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "type ratio overflow at x={x:?}, t={t}, s={s}"
                    )));
                }
                sup = sup.max(ratio);
            }
        }
    }
    Ok(sup)
}

/// Per-ball Muckenhoupt quantity at one `t`:
/// `avg(φ) · avg(φ^{-1/(q-1)})^{q-1}` for `q > 1`, `avg(φ) / min φ` for `q = 1`.
fn muckenhoupt_ball(gf: &GrowthFunction, grid: &Grid, ball: &Ball, q: f64, t: f64) -> Result<f64> {
    let n = grid.dim();
    let mut count = 0usize;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut dual = 0.0;
    let expo = if q > 1.0 { -1.0 / (q - 1.0) } else { 0.0 };
    for run in grid.ball_runs(ball) {
        for j in run {
            let x = grid.node(j);
            let w = gf.eval(&x[..n], t)?;
            if w < WEIGHT_FLOOR {
                return Err(Error::WeightFloor { value: w, context: format!("ball {ball} at t={t}") });
            }
            count += 1;
            sum += w;
            min = min.min(w);
            if q > 1.0 {
                dual += w.powf(expo);
            }
        }
    }
    if count == 0 {
        return Ok(0.0);
    }
    let avg = sum / count as f64;
    let v = if q > 1.0 {
        avg * (dual / count as f64).powf(q - 1.0)
    } else {
        avg / min
    };
    if !v.is_finite() {
        return Err(Error::WeightFloor { value: 0.0, context: format!("dual weight overflow on ball {ball}") });
    }
    Ok(v)
}

/// Sampled uniform `𝔸_q` constant: sup over `t_grid` × `balls`.
pub fn muckenhoupt_constant(
    gf: &GrowthFunction,
    grid: &Grid,
    q: f64,
    balls: &[Ball],
    t_grid: &[f64],
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidInput(format!("Muckenhoupt exponent must be >= 1, got {q}")));
    }
    let per_ball: Vec<Result<f64>> = balls
        .par_iter()
        .map(|b| {
            let mut m = 0.0_f64;
            for &t in t_grid {
                m = m.max(muckenhoupt_ball(gf, grid, b, q, t)?);
            }
            Ok(m)
        })
        .collect();
    let mut sup = 0.0_f64;
    for v in per_ball {
        sup = sup.max(v?);
    }
    Ok(sup)
}

/// Search grids and thresholds for [`critical_indices`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexSearchConfig {
    /// Candidate lower-type exponents, ascending.
    pub p_grid: Vec<f64>,
    /// Candidate Muckenhoupt exponents, ascending, starting at 1.
    pub q_grid: Vec<f64>,
    /// A sampled constant above this counts as unbounded.
    pub threshold: f64,
    /// Smallest `s` probed for the lower type.
    pub s_min: f64,
    /// Number of resolution doublings in the Muckenhoupt refinement study.
    pub refinements: usize,
    /// Finest/coarsest growth factor still accepted as bounded.
    pub growth_tolerance: f64,
    pub balls: BallFamilyConfig,
    pub t_grid: Vec<f64>,
}

impl Default for IndexSearchConfig {
    fn default() -> Self {
        IndexSearchConfig {
            p_grid: (1..=20).map(|k| k as f64 / 20.0).collect(),
            q_grid: (0..=60).map(|k| 1.0 + k as f64 / 20.0).collect(),
            threshold: 1e6,
            s_min: 1e-200,
            refinements: 2,
            growth_tolerance: 1.25,
            balls: BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 16.0 },
            t_grid: logspace(1e-6, 1e6, 13),
        }
    }
}

impl IndexSearchConfig {
    /// Grid step of the exponent searches.
    pub fn q_step(&self) -> f64 {
        if self.q_grid.len() > 1 {
            self.q_grid[1] - self.q_grid[0]
        } else {
            0.0
        }
    }
}

/// One sampled sup-constant test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub test: String,
    pub exponent: f64,
    /// Constants per refinement level (one entry for lower-type tests).
    pub constants: Vec<f64>,
    pub bounded: bool,
}

/// Grid estimates of `i(φ)`, `q(φ)`, `m(φ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndices {
    pub i_est: f64,
    pub q_est: f64,
    pub m_est: usize,
    /// `Some(">= grid bound")`-style note when the search saturated.
    pub i_note: Option<String>,
    pub q_note: Option<String>,
    pub certificates: Vec<Certificate>,
}

impl GrowthIndices {
    /// Indices known in closed form (e.g. `power(p)` has `i = p`, `q = 1`).
    pub fn exact(i: f64, q: f64, n: usize) -> Self {
        GrowthIndices {
            i_est: i,
            q_est: q,
            m_est: moment_order(n, q, i),
            i_note: None,
            q_note: None,
            certificates: Vec::new(),
        }
    }

    /// Lower end of the admissible ε range, `n (q/i - 1)`.
    pub fn epsilon_threshold(&self, n: usize) -> f64 {
        n as f64 * (self.q_est / self.i_est - 1.0)
    }

    /// `q(φ)'`, the upper end of the admissible Campanato exponent range.
    pub fn q_conjugate(&self) -> f64 {
        conjugate(self.q_est)
    }
}

/// `⌊n (q/i - 1)⌋`, clamped at 0.
pub fn moment_order(n: usize, q: f64, i: f64) -> usize {
    let v = n as f64 * (q / i - 1.0);
    (v + 1e-9).floor().max(0.0) as usize
}

/// Estimate `i(φ)`, `q(φ)` and `m(φ)` on finite exponent grids.
///
/// `i_est` is the largest tested `p` whose sampled lower-type constant stays
/// below the threshold. `q_est` is the smallest tested `q` whose Muckenhoupt
/// constant stays below the threshold and grows by at most
/// `growth_tolerance` over the refinement study (ball radii held fixed in
/// physical units).
pub fn critical_indices(gf: &GrowthFunction, grid: &Grid, cfg: &IndexSearchConfig) -> Result<GrowthIndices> {
    let mut certificates = Vec::new();

    let sampling = TypeSampling::on_grid(grid, TypeSide::Lower, cfg.s_min);
    let mut i_est = None;
    let mut first_unbounded = None;
    for &p in &cfg.p_grid {
        let c = uniform_type_constant(gf, p, TypeSide::Lower, &sampling)?;
        let bounded = c <= cfg.threshold;
        certificates.push(Certificate { test: "lower_type".into(), exponent: p, constants: vec![c], bounded });
        if bounded {
            i_est = Some(p);
        } else {
            first_unbounded = Some(p);
            break;
        }
    }
    let (i_est, i_note) = match (i_est, first_unbounded) {
        (Some(p), Some(_)) => (p, None),
        (Some(p), None) => (p, Some(">= grid bound".to_string())),
        (None, _) => (cfg.p_grid[0], Some("<= grid bound".to_string())),
    };

    let mut grids = vec![grid.clone()];
    for k in 1..=cfg.refinements {
        grids.push(grid.refined(1 << k)?);
    }
    let families = grids
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let mut bc = cfg.balls.clone();
            bc.min_radius_cells *= (1u64 << k) as f64;
            ball_family(g, &bc)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut q_est = None;
    for &q in &cfg.q_grid {
        let mut constants = Vec::with_capacity(grids.len());
        let mut failed = false;
        for (g, fam) in grids.iter().zip(&families) {
            match muckenhoupt_constant(gf, g, q, fam, &cfg.t_grid) {
                Ok(c) => constants.push(c),
                Err(Error::WeightFloor { .. }) => {
                    failed = true;
                    constants.push(f64::INFINITY);
                }
                Err(e) => return Err(e),
            }
        }
        let coarse = constants[0];
        let fine = *constants.last().unwrap();
        let bounded = !failed
            && constants.iter().all(|&c| c <= cfg.threshold)
            && fine <= cfg.growth_tolerance * coarse;
        certificates.push(Certificate { test: "muckenhoupt".into(), exponent: q, constants, bounded });
        if bounded {
            q_est = Some(q);
            break;
        }
    }
    let (q_est, q_note) = match q_est {
        Some(q) => (q, None),
        None => (*cfg.q_grid.last().unwrap(), Some(">= grid bound".to_string())),
    };

    Ok(GrowthIndices {
        i_est,
        q_est,
        m_est: moment_order(grid.dim(), q_est, i_est),
        i_note,
        q_note,
        certificates,
    })
}
