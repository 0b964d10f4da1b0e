//! Discretization substrate: boxes, midpoint grids, balls, ball families and
//! midpoint quadrature.
//!
//! Nodes sit at cell midpoints `x_j = lo + (j + 1/2) h`, so an origin-symmetric
//! box with an even resolution never places a node on the origin. A node
//! belongs to a ball iff `|x_j - c|^2 < r^2` (strict, no partial cells).
//! Linear node order is lexicographic with axis 0 slowest; every sum in this
//! crate runs in that order.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates of a node. Unused trailing entries are zero when `n = 1`.
pub type Point = [f64; 2];

/// Axis-aligned computational window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GridBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = GridBox { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// Centered cube `[-half, half]^n`.
    pub fn symmetric(n: usize, half: f64) -> Result<Self> {
        Self::new(vec![-half; n], vec![half; n])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lo.len();
        if !(1..=2).contains(&n) || self.hi.len() != n {
            return Err(Error::InvalidInput(format!(
                "box dimension must be 1 or 2 (lo has {}, hi has {})",
                self.lo.len(),
                self.hi.len()
            )));
        }
        for i in 0..n {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] < self.hi[i]) {
                return Err(Error::InvalidInput(format!(
                    "box axis {i}: need finite lo < hi, got {}..{}",
                    self.lo[i], self.hi[i]
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn shortest_side(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.hi[i] - self.lo[i])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_ball(&self, ball: &Ball) -> bool {
        const SLACK: f64 = 1e-12;
        (0..self.dim()).all(|i| {
            ball.center[i] - ball.radius >= self.lo[i] - SLACK
                && ball.center[i] + ball.radius <= self.hi[i] + SLACK
        })
    }
}

/// Open Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("ball center must be finite".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Membership predicate shared by every ball-restricted sum.
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        dist2(&self.center, x) < self.radius * self.radius
    }

    /// `self ⊂ other` as sets.
    pub fn is_inside(&self, other: &Ball) -> bool {
        dist2(&self.center, &other.center).sqrt() + self.radius <= other.radius * (1.0 + 1e-12)
    }

    /// Hashable identity (bit patterns of center and radius).
    pub fn key(&self) -> (Vec<u64>, u64) {
        (self.center.iter().map(|c| c.to_bits()).collect(), self.radius.to_bits())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B(")?;
        for (i, c) in self.center.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "; {})", self.radius)
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Region of integration.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Ball(&'a Ball),
    Box(&'a GridBox),
}

impl<'a> From<&'a Ball> for Region<'a> {
    fn from(b: &'a Ball) -> Self {
        Region::Ball(b)
    }
}

impl<'a> From<&'a GridBox> for Region<'a> {
    fn from(b: &'a GridBox) -> Self {
        Region::Box(b)
    }
}

/// Uniform midpoint grid over a [`GridBox`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    bx: GridBox,
    res: Vec<usize>,
    h: Vec<f64>,
}

impl Grid {
    pub fn new(bx: GridBox, res: Vec<usize>) -> Result<Self> {
        bx.validate()?;
        if res.len() != bx.dim() {
            return Err(Error::InvalidInput(format!(
                "resolution has {} entries for a {}-dimensional box",
                res.len(),
                bx.dim()
            )));
        }
        if res.iter().any(|&r| r < 2) {
            return Err(Error::InvalidInput("every resolution entry must be >= 2".into()));
        }
        let h = (0..bx.dim())
            .map(|i| (bx.hi[i] - bx.lo[i]) / res[i] as f64)
            .collect();
        Ok(Grid { bx, res, h })
    }

    /// Same box, every resolution entry multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.bx.clone(), self.res.iter().map(|r| r * factor).collect())
    }

    pub fn dim(&self) -> usize {
        self.bx.dim()
    }

    pub fn bbox(&self) -> &GridBox {
        &self.bx
    }

    pub fn res(&self) -> &[usize] {
        &self.res
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    /// Smallest grid step over all axes.
    pub fn min_spacing(&self) -> f64 {
        self.h.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume of one cell, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.bx.lo[axis] + (i as f64 + 0.5) * self.h[axis]
    }

    /// Multi-index of a linear index.
    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [idx, 0]
        } else {
            [idx / self.res[1], idx % self.res[1]]
        }
    }

    #[inline]
    pub fn ravel(&self, ij: [usize; 2]) -> usize {
        if self.dim() == 1 {
            ij[0]
        } else {
            ij[0] * self.res[1] + ij[1]
        }
    }

    #[inline]
    pub fn node(&self, idx: usize) -> Point {
        let ij = self.unravel(idx);
        if self.dim() == 1 {
            [self.coord(0, ij[0]), 0.0]
        } else {
            [self.coord(0, ij[0]), self.coord(1, ij[1])]
        }
    }

    /// Fingerprint used by caches keyed on the grid.
    pub fn key(&self) -> Vec<u64> {
        let mut k: Vec<u64> = self.bx.lo.iter().chain(&self.bx.hi).map(|v| v.to_bits()).collect();
        k.extend(self.res.iter().map(|&r| r as u64));
        k
    }

    /// Index range along `axis` of nodes with `lo < x < hi` (strict) or
    /// `lo <= x <= hi` (closed).
    fn axis_range(&self, axis: usize, lo: f64, hi: f64, strict: bool) -> Range<usize> {
        let n = self.res[axis];
        let inside = |i: usize| {
            let x = self.coord(axis, i);
            if strict {
                x > lo && x < hi
            } else {
                x >= lo && x <= hi
            }
        };
        let h = self.h[axis];
        let guess_lo = ((lo - self.bx.lo[axis]) / h - 0.5).floor();
        let mut a = guess_lo.clamp(0.0, n as f64) as usize;
        while a > 0 && inside(a - 1) {
            a -= 1;
        }
        while a < n && !inside(a) {
            let x = self.coord(axis, a);
            if x >= hi {
                return a..a;
            }
            a += 1;
        }
        let guess_hi = ((hi - self.bx.lo[axis]) / h - 0.5).ceil();
        let mut b = (guess_hi.clamp(a as f64, n as f64) as usize).max(a);
        while b > a && !inside(b - 1) {
            b -= 1;
        }
        while b < n && inside(b) {
            b += 1;
        }
        a..b
    }

    /// Contiguous runs of linear indices of the nodes inside `ball`.
    #[allow(clippy::single_range_in_vec_init)]
    pub fn ball_runs(&self, ball: &Ball) -> Vec<Range<usize>> {
        let c = &ball.center;
        let r = ball.radius;
        if self.dim() == 1 {
            let rg = self.axis_range(0, c[0] - r, c[0] + r, true);
            // the strict interval test and the squared-distance predicate can
            // disagree in the last ulp; trim with the canonical predicate
            let (mut a, mut b) = (rg.start, rg.end);
            while a < b && !ball.contains(&[self.coord(0, a)]) {
                a += 1;
            }
            while b > a && !ball.contains(&[self.coord(0, b - 1)]) {
                b -= 1;
            }
            return if a < b { vec![a..b] } else { Vec::new() };
        }
        let rows = self.axis_range(0, c[0] - r, c[0] + r, true);
        let mut runs = Vec::with_capacity(rows.len());
        for i in rows {
            let x0 = self.coord(0, i);
            let d0 = x0 - c[0];
            let rem = r * r - d0 * d0;
            if rem <= 0.0 {
                continue;
            }
            let w = rem.sqrt();
            let cols = self.axis_range(1, c[1] - w, c[1] + w, false);
            let (mut a, mut b) = (cols.start, cols.end);
            while a > 0 && ball.contains(&[x0, self.coord(1, a - 1)]) {
                a -= 1;
            }
            while a < b && !ball.contains(&[x0, self.coord(1, a)]) {
                a += 1;
            }
            while b < self.res[1] && ball.contains(&[x0, self.coord(1, b)]) {
                b += 1;
            }
            while b > a && !ball.contains(&[x0, self.coord(1, b - 1)]) {
                b -= 1;
            }
            if a < b {
                let base = i * self.res[1];
                runs.push(base + a..base + b);
            }
        }
        runs
    }

    /// Contiguous runs of linear indices of nodes inside a (closed) box.
    pub fn box_runs(&self, bx: &GridBox) -> Vec<Range<usize>> {
        let r0 = self.axis_range(0, bx.lo[0], bx.hi[0], false);
        if self.dim() == 1 {
            return if r0.is_empty() { Vec::new() } else { vec![r0] };
        }
        let r1 = self.axis_range(1, bx.lo[1], bx.hi[1], false);
        if r1.is_empty() {
            return Vec::new();
        }
        r0.map(|i| i * self.res[1] + r1.start..i * self.res[1] + r1.end)
            .collect()
    }

    /// Whether `region` meets the grid box at all.
    pub fn intersects(&self, region: Region<'_>) -> bool {
        let n = self.dim();
        match region {
            Region::Ball(b) => {
                if b.dim() != n {
                    return false;
                }
                let mut d2 = 0.0;
                for i in 0..n {
                    let c = b.center[i];
                    let nearest = c.clamp(self.bx.lo[i], self.bx.hi[i]);
                    d2 += (c - nearest) * (c - nearest);
                }
                d2 < b.radius * b.radius
            }
            Region::Box(bx) => {
                bx.dim() == n && (0..n).all(|i| bx.lo[i] < self.bx.hi[i] && bx.hi[i] > self.bx.lo[i])
            }
        }
    }

    pub fn runs(&self, region: Region<'_>) -> Result<Vec<Range<usize>>> {
        if !self.intersects(region) {
            return Err(Error::EmptyRegion);
        }
        Ok(match region {
            Region::Ball(b) => self.ball_runs(b),
            Region::Box(bx) => self.box_runs(bx),
        })
    }

    /// Linear indices of the nodes inside `ball`, in node order.
    pub fn ball_indices(&self, ball: &Ball) -> Vec<usize> {
        self.ball_runs(ball).into_iter().flatten().collect()
    }

    /// Discrete measure of `ball`: node count times cell volume.
    pub fn ball_measure(&self, ball: &Ball) -> f64 {
        let count: usize = self.ball_runs(ball).iter().map(|r| r.len()).sum();
        count as f64 * self.cell_volume()
    }

    /// Midpoint sum `Σ value(j, x_j) h^n` over nodes of `region`, in node order.
    pub fn sum_over<F>(&self, region: Region<'_>, mut value: F) -> Result<f64>
    where
        F: FnMut(usize, &[f64]) -> f64,
    {
        let n = self.dim();
        let mut acc = 0.0;
        for run in self.runs(region)? {
            for idx in run {
                let x = self.node(idx);
                acc += value(idx, &x[..n]);
            }
        }
        Ok(acc * self.cell_volume())
    }

    /// Node-wise check that `ball` fits in the box (used by ball families).
    pub fn admits(&self, ball: &Ball) -> bool {
        self.bx.contains_ball(ball)
    }
}

/// Real function sampled at midpoint nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {j} is not finite")));
        }
        Ok(GridFunction { grid, samples })
    }

    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = grid.dim();
        let samples = (0..grid.len())
            .map(|j| {
                let x = grid.node(j);
                f(&x[..n])
            })
            .collect();
        Self::new(grid.clone(), samples)
    }

    pub fn zeros(grid: &Grid) -> Self {
        GridFunction { grid: grid.clone(), samples: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.grid.clone(), self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    /// `a * self + b * other` on a shared grid.
    pub fn axpby(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidInput("grid mismatch".into()));
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Copy with every node outside `ball` set to zero.
    pub fn restricted(&self, ball: &Ball) -> Self {
        let mut out = vec![0.0; self.samples.len()];
        for j in self.grid.ball_indices(ball) {
            out[j] = self.samples[j];
        }
        GridFunction { grid: self.grid.clone(), samples: out }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// CSV with a `# box=lo..hi res=...` header and one sample per line.
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let res = self.grid.res.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        let mut s = format!(
            "# box={}..{} res={}\n",
            join(&self.grid.bx.lo),
            join(&self.grid.bx.hi),
            res
        );
        for v in &self.samples {
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty grid function file".into()))?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::InvalidInput("missing '# box=... res=...' header".into()))?;
        let mut bx = None;
        let mut res = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("box=") {
                let (lo, hi) = v
                    .split_once("..")
                    .ok_or_else(|| Error::InvalidInput(format!("bad box spec '{v}'")))?;
                bx = Some(GridBox::new(parse_list(lo)?, parse_list(hi)?)?);
            } else if let Some(v) = tok.strip_prefix("res=") {
                res = Some(
                    v.split(',')
                        .map(|r| {
                            r.trim()
                                .parse::<usize>()
                                .map_err(|e| Error::InvalidInput(format!("bad res '{r}': {e}")))
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
            }
        }
        let bx = bx.ok_or_else(|| Error::InvalidInput("header lacks box=".into()))?;
        let res = res.ok_or_else(|| Error::InvalidInput("header lacks res=".into()))?;
        let grid = Grid::new(bx, res)?;
        let samples = lines
            .enumerate()
            .map(|(i, l)| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("line {}: {e}", i + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, samples)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad number '{t}': {e}")))
        })
        .collect()
}

/// Midpoint quadrature of `f` over `region`.
pub fn integrate(f: &GridFunction, region: Region<'_>) -> Result<f64> {
    let s = f.samples();
    f.grid().sum_over(region, |j, _| s[j])
}

/// Ball family parameters.
///
/// Radii are dyadic, `min_radius_cells * h * 2^k` for `k < radii_levels`,
/// capped at half the shortest box side. Centers form a lattice of spacing
/// `center_stride` anchored at the box midpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallFamilyConfig {
    pub center_stride: f64,
    pub radii_levels: usize,
    pub min_radius_cells: f64,
}

impl Default for BallFamilyConfig {
    fn default() -> Self {
        BallFamilyConfig { center_stride: 0.25, radii_levels: 5, min_radius_cells: 16.0 }
    }
}

/// Deterministic ball family: sorted by radius, then center (node order).
pub fn ball_family(grid: &Grid, cfg: &BallFamilyConfig) -> Result<Vec<Ball>> {
    if !(cfg.center_stride > 0.0) || !(cfg.min_radius_cells > 0.0) {
        return Err(Error::InvalidInput("center_stride and min_radius_cells must be positive".into()));
    }
    let bx = grid.bbox();
    let n = grid.dim();
    let r_min = cfg.min_radius_cells * grid.min_spacing();
    let r_cap = 0.5 * bx.shortest_side();
    let radii: Vec<f64> = (0..cfg.radii_levels)
        .map(|k| r_min * (1u64 << k) as f64)
        .filter(|&r| r <= r_cap * (1.0 + 1e-12))
        .collect();
    let axis_centers = |axis: usize| -> Vec<f64> {
        let mid = 0.5 * (bx.lo[axis] + bx.hi[axis]);
        let half = 0.5 * (bx.hi[axis] - bx.lo[axis]);
        let kmax = (half / cfg.center_stride + 1e-9).floor() as i64;
        (-kmax..=kmax).map(|k| mid + k as f64 * cfg.center_stride).collect()
    };
    let centers: Vec<Vec<f64>> = if n == 1 {
        axis_centers(0).into_iter().map(|c| vec![c]).collect()
    } else {
        let c0 = axis_centers(0);
        let c1 = axis_centers(1);
        c0.iter()
            .flat_map(|&a| c1.iter().map(move |&b| vec![a, b]))
            .collect()
    };
    let mut out = Vec::new();
    for &r in &radii {
        for c in &centers {
            let b = Ball { center: c.clone(), radius: r };
            if bx.contains_ball(&b) {
                out.push(b);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoAdmissibleBall);
    }
    Ok(out)
}
