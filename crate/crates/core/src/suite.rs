//! Verification battery: one function per acceptance criterion.
//!
//! Every criterion returns a [`CriterionResult`]; numeric failures inside a
//! criterion are recorded as notes and make it fail rather than abort the run.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atoms::{duality_pairing, make_atom};
use crate::campanato::{campanato_norm, equivalence_report, bmo_phi_norm};
use crate::carleson::{build_kernel, carleson_norm, default_t_levels, square_transform, KernelShape};
use crate::cli::corpus::{corpus, standard_corpus, CorpusSpec};
use crate::error::Result;
use crate::grid::{ball_family, integrate, Ball, BallFamilyConfig, Grid, GridBox, GridFunction, Region};
use crate::growth::{muckenhoupt_constant, phi_measure, GrowthFunction, GrowthIndices, Weight};
use crate::johnnirenberg::{jn_distribution, jn_fit, DecayModel};
use crate::luxembourg::{chi_ball_norm, DEFAULT_TOL};
use crate::polyproj::{multi_indices, orthogonality_residuals, project};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl CriterionResult {
    fn new(id: u8, name: &str) -> Self {
        CriterionResult { id, name: name.into(), pass: true, metrics: BTreeMap::new(), notes: Vec::new() }
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.into(), v);
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(what.into());
        }
    }

    fn line(&self) -> String {
        format!("[{}] criterion {:>2} {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name)
    }
}

fn guarded(id: u8, name: &str, body: impl FnOnce(&mut CriterionResult) -> Result<()>) -> CriterionResult {
    let mut r = CriterionResult::new(id, name);
    if let Err(e) = body(&mut r) {
        r.pass = false;
        r.notes.push(format!("error: {e}"));
    }
    r
}

fn grid1(half: f64, res: usize) -> Result<Grid> {
    Grid::new(GridBox::symmetric(1, half)?, vec![res])
}

fn grid2(half: f64, res: usize) -> Result<Grid> {
    Grid::new(GridBox::symmetric(2, half)?, vec![res, res])
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Closed-form `‖χ_B‖` for power and weighted power growth.
pub fn criterion_1(scale: Scale) -> CriterionResult {
    guarded(1, "closed-form Luxembourg norms", |r| {
        let g = grid1(2.0, scale.pick(4096, 1024))?;
        let fam = ball_family(&g, &BallFamilyConfig::default())?;
        let mut worst_power = 0.0_f64;
        let mut worst_weighted = 0.0_f64;
        for p in [1.0, 0.5, 0.75] {
            let gf = GrowthFunction::power(p);
            let w = Weight::AbsPower(1.0 / 3.0);
            let wgf = GrowthFunction::weighted_power(p, w.clone());
            let w1 = GrowthFunction::weighted_power(1.0, w);
            for b in &fam {
                let exact = (2.0 * b.radius).powf(1.0 / p);
                worst_power = worst_power.max(rel(chi_ball_norm(&g, b, &gf, DEFAULT_TOL)?, exact));
                let wb = phi_measure(&w1, &g, Region::Ball(b), 1.0)?;
                worst_weighted = worst_weighted.max(rel(chi_ball_norm(&g, b, &wgf, DEFAULT_TOL)?, wb.powf(1.0 / p)));
            }
        }
        r.metric("balls", fam.len() as f64);
        r.metric("power_max_rel_err", worst_power);
        r.metric("weighted_max_rel_err", worst_weighted);
        r.check(worst_power <= 5e-3, format!("power case off by {worst_power:e}"));
        r.check(worst_weighted <= 1e-6, format!("weighted case off by {worst_weighted:e}"));
        Ok(())
    })
}

/// `φ(B, 1/‖χ_B‖) = 1` for every built-in and family ball.
pub fn criterion_2(scale: Scale) -> CriterionResult {
    guarded(2, "unit-measure identity", |r| {
        let grids = [grid1(2.0, scale.pick(4096, 512))?, grid2(1.0, scale.pick(128, 48))?];
        let mut worst = 0.0_f64;
        let mut count = 0;
        for g in &grids {
            let fam = ball_family(g, &BallFamilyConfig::default())?;
            for gf in GrowthFunction::builtins() {
                for b in &fam {
                    let nb = chi_ball_norm(g, b, &gf, DEFAULT_TOL)?;
                    let m = phi_measure(&gf, g, Region::Ball(b), 1.0 / nb)?;
                    worst = worst.max((m - 1.0).abs());
                    count += 1;
                }
            }
        }
        r.metric("pairs", count as f64);
        r.metric("max_abs_dev", worst);
        r.check(worst <= 1e-6, format!("unit measure off by {worst:e}"));
        Ok(())
    })
}

/// Projection identities.
pub fn criterion_3(scale: Scale) -> CriterionResult {
    guarded(3, "minimal polynomial projection", |r| {
        let grids = [grid1(1.0, scale.pick(2048, 512))?, grid2(1.0, scale.pick(96, 48))?];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut mean_err = 0.0_f64;
        let mut orth = 0.0_f64;
        let mut dual = 0.0_f64;
        for g in &grids {
            let n = g.dim();
            let balls: Vec<Ball> = if n == 1 {
                vec![Ball::new(vec![0.1], 0.5)?, Ball::new(vec![-0.6], 0.25)?]
            } else {
                vec![Ball::new(vec![0.1, -0.2], 0.5)?, Ball::new(vec![-0.4, 0.3], 0.4)?]
            };
            let random = |rng: &mut ChaCha8Rng| -> Result<GridFunction> {
                GridFunction::new(g.clone(), (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            };
            for b in &balls {
                let f = random(&mut rng)?;
                let p0 = project(&f, b, 0)?;
                let avg = integrate(&f, Region::Ball(b))? / g.ball_measure(b);
                mean_err = mean_err.max((p0.coeffs[0] - avg).abs());
                let l1 = integrate(&f.map(f64::abs)?, Region::Ball(b))?;
                for s in 0..=4 {
                    let p = project(&f, b, s)?;
                    let res = orthogonality_residuals(&f, &p, b);
                    orth = orth.max(res.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / l1);
                }
            }
            let pairs = 25;
            for k in 0..pairs {
                let b = &balls[k % balls.len()];
                let s = k % 5;
                let f = random(&mut rng)?;
                let gfun = random(&mut rng)?;
                let pf = project(&f, b, s)?;
                let pg = project(&gfun, b, s)?;
                let mut lhs = 0.0;
                let mut mag = 0.0;
                for j in g.ball_indices(b) {
                    let x = g.node(j);
                    let a = pg.eval(&x[..n]) * f.samples()[j];
                    let c = pf.eval(&x[..n]) * gfun.samples()[j];
                    lhs += a - c;
                    mag += a.abs() + c.abs();
                }
                dual = dual.max(lhs.abs() / mag);
            }
        }
        r.metric("p0_mean_abs_err", mean_err);
        r.metric("orthogonality_rel", orth);
        r.metric("dual_identity_rel", dual);
        r.check(mean_err <= 1e-10, format!("P^0 differs from the mean by {mean_err:e}"));
        r.check(orth <= 1e-8, format!("orthogonality residual {orth:e}"));
        r.check(dual <= 1e-8, format!("dual identity residual {dual:e}"));
        Ok(())
    })
}

/// Classical Campanato value `sup_B |B|^{-β} (|B|^{-1} ∫_B |f - P|^q)^{1/q}`,
/// assembled independently: unscaled centered monomials and a QR solve.
pub fn classical_campanato(f: &GridFunction, beta: f64, q: f64, s: usize, balls: &[Ball]) -> Vec<f64> {
    let g = f.grid();
    let n = g.dim();
    let alphas = multi_indices(n, s);
    balls
        .iter()
        .map(|b| {
            let idx = g.ball_indices(b);
            let rows = idx.len();
            let mut a = DMatrix::<f64>::zeros(rows, alphas.len());
            let mut y = DVector::<f64>::zeros(rows);
            for (i, &j) in idx.iter().enumerate() {
                let x = g.node(j);
                for (k, al) in alphas.iter().enumerate() {
                    let mut v = (x[0] - b.center[0]).powi(al[0] as i32);
                    if n == 2 {
                        v *= (x[1] - b.center[1]).powi(al[1] as i32);
                    }
                    a[(i, k)] = v;
                }
                y[i] = f.samples()[j];
            }
            let qr = a.clone().qr();
            let rhs = qr.q().transpose() * &y;
            let c = qr.r().solve_upper_triangular(&rhs).expect("full-rank design");
            let resid = &y - &a * c;
            let meas = rows as f64 * g.cell_volume();
            let sum: f64 = resid.iter().map(|v| v.abs().powf(q)).sum::<f64>() * g.cell_volume();
            meas.powf(-beta) * (sum / meas).powf(1.0 / q)
        })
        .collect()
}

/// Power growth reduces to the classical Campanato seminorm.
pub fn criterion_4(scale: Scale) -> CriterionResult {
    guarded(4, "classical Campanato reduction", |r| {
        let setups = [
            (grid1(1.0, scale.pick(1024, 256))?, vec![0usize, 1, 2]),
            (grid2(1.0, scale.pick(48, 24))?, vec![0usize, 1]),
        ];
        let mut worst = 0.0_f64;
        let mut worst_floor = 0.0_f64;
        let mut cases = 0;
        for (g, degrees) in &setups {
            let cfg = BallFamilyConfig { center_stride: 0.5, radii_levels: 4, min_radius_cells: 4.0 };
            let fam = ball_family(g, &cfg)?;
            for spec in standard_corpus() {
                let f = corpus(&spec, g)?;
                for p in [1.0, 0.75, 0.5] {
                    let gf = GrowthFunction::power(p);
                    for &q in &[1.0, 1.5, 2.0] {
                        for &s in degrees {
                            let ours = campanato_norm(&f, &gf, q, s, &fam)?;
                            let theirs = classical_campanato(&f, 1.0 / p - 1.0, q, s, &fam);
                            for (k, (a, b)) in ours.per_ball.iter().zip(&theirs).enumerate() {
                                let b_max = g.ball_indices(&fam[k]).iter().fold(0.0_f64, |m, &j| m.max(f.samples()[j].abs()));
                                let floor = 1e-13 * b_max * g.ball_measure(&fam[k]).powf(1.0 - 1.0 / p);
                                worst_floor = worst_floor.max((a - b).abs() / floor);
                                let d = if (a - b).abs() <= floor { 0.0 } else { rel(*a, *b) };
                                worst = worst.max(d);
                            }
                            cases += 1;
                        }
                    }
                }
            }
        }
        r.metric("cases", cases as f64);
        r.metric("max_rel_diff", worst);
        r.metric("max_abs_diff_over_floor", worst_floor);
        r.check(worst <= 1e-9, format!("classical reduction off by {worst:e}"));
        Ok(())
    })
}

/// Spread of `vq/v1` and `veps/v1` over the sweep, plus order violations.
fn equivalence_sweep(g: &Grid, fam: &[Ball]) -> Result<(f64, f64, f64, f64)> {
    let mut holder = 0.0_f64;
    let mut inf_over_q = 0.0_f64;
    let mut spread_q = 1.0_f64;
    let mut spread_eps = 1.0_f64;
    for spec in standard_corpus() {
        let f = corpus(&spec, g)?;
        for p in [1.0, 0.75] {
            let gf = GrowthFunction::power(p);
            let idx = GrowthIndices::exact(p, 1.0, g.dim());
            for s in [0, 1] {
                let rep = equivalence_report(&f, &gf, s, &[1.0, 2.0], 1.0, fam, &idx, [1.0 / 64.0, 64.0])?;
                for row in &rep.rows {
                    if let Some(v) = row.r_1_q {
                        holder = holder.max(v);
                    }
                    inf_over_q = inf_over_q.max(row.worst_inf_over_q);
                    if let Some(v) = row.r_q_1 {
                        spread_q = spread_q.max(v.max(1.0 / v));
                    }
                    if let Some(v) = row.r_eps_1 {
                        spread_eps = spread_eps.max(v.max(1.0 / v));
                    }
                }
            }
        }
    }
    Ok((holder, inf_over_q, spread_q, spread_eps))
}

/// Four-way equivalence: order relations, bracket, refinement stability.
pub fn criterion_5(scale: Scale) -> CriterionResult {
    guarded(5, "Campanato four-way equivalence", |r| {
        let res = scale.pick(512, 128);
        let mut brackets = Vec::new();
        for (k, factor) in [1usize, 2].iter().enumerate() {
            let g = grid1(1.0, res * factor)?;
            let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 8.0 * *factor as f64 };
            let fam = ball_family(&g, &cfg)?;
            let (holder, inf_q, sq, se) = equivalence_sweep(&g, &fam)?;
            r.metric(&format!("level{k}_holder_max"), holder);
            r.metric(&format!("level{k}_inf_over_q_max"), inf_q);
            r.metric(&format!("level{k}_bracket_q"), sq);
            r.metric(&format!("level{k}_bracket_eps"), se);
            r.check(holder <= 1.0 + 1e-9, format!("v1/vq reached {holder}"));
            r.check(inf_q <= 1.0 + 1e-9, format!("vinf/vq reached {inf_q}"));
            r.check(sq <= 64.0 && se <= 64.0, format!("bracket {sq}, {se} exceeds 64"));
            brackets.push((sq, se));
        }
        let stab = |a: f64, b: f64| (a / b).max(b / a);
        let sq = stab(brackets[0].0, brackets[1].0);
        let se = stab(brackets[0].1, brackets[1].1);
        r.metric("refinement_change_q", sq);
        r.metric("refinement_change_eps", se);
        r.check(sq <= 2.0 && se <= 2.0, format!("brackets moved by {sq}, {se} under refinement"));
        Ok(())
    })
}

/// John-Nirenberg decay shapes.
pub fn criterion_6(scale: Scale) -> CriterionResult {
    guarded(6, "John-Nirenberg decay", |r| {
        let g = grid1(1.0, scale.pick(4096, 1024))?;
        let f = corpus(&CorpusSpec::LogAbs, &g)?;
        let b0 = Ball::new(vec![0.0], 1.0)?;
        let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: scale.pick(128.0, 32.0) };
        let subs: Vec<Ball> = ball_family(&g, &cfg)?.into_iter().filter(|b| b.is_inside(&b0)).collect();
        let c = jn_distribution(&f, &GrowthFunction::power(1.0), &b0, 0, None, &subs)?;
        let fit = jn_fit(&c, DecayModel::Exponential)?;
        r.metric("exp_r_squared", fit.r_squared);
        r.metric("exp_slope", fit.slope);
        r.metric("exp_points", fit.points as f64);
        r.check(fit.r_squared >= 0.95, format!("exponential R^2 = {}", fit.r_squared));
        r.check(fit.slope < 0.0, format!("exponential slope = {}", fit.slope));
        r.check(c.f_vals.iter().all(|&v| v <= 1.0 + 1e-12), "F(alpha) exceeded 1");
        let wgf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(0.5));
        let cw = jn_distribution(&f, &wgf, &b0, 0, None, &subs)?;
        let pw = jn_fit(&cw, DecayModel::Power)?;
        r.metric("power_exponent", -pw.slope);
        r.metric("power_r_squared", pw.r_squared);
        r.check(pw.slope <= -1.0, format!("power-model exponent magnitude {}", -pw.slope));
        Ok(())
    })
}

/// `|x|^{1/2}`: A₂ converges, A₁ diverges under refinement.
pub fn criterion_7(scale: Scale) -> CriterionResult {
    guarded(7, "Muckenhoupt certificates", |r| {
        let base = scale.pick(512, 128);
        let gf = GrowthFunction::weighted_power(1.0, Weight::AbsPower(0.5));
        let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 16.0 };
        let mut a1 = Vec::new();
        let mut a2 = Vec::new();
        for k in 0..4 {
            let g = grid1(1.0, base << k)?;
            let mut c = cfg.clone();
            c.min_radius_cells *= (1u64 << k) as f64;
            let fam = ball_family(&g, &c)?;
            a1.push(muckenhoupt_constant(&gf, &g, 1.0, &fam, &[1.0])?);
            a2.push(muckenhoupt_constant(&gf, &g, 2.0, &fam, &[1.0])?);
        }
        let (lo, hi) = a2.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        let growth = a1[3] / a1[0];
        for k in 0..4 {
            r.metric(&format!("a1_level{k}"), a1[k]);
            r.metric(&format!("a2_level{k}"), a2[k]);
        }
        r.metric("a2_spread", hi / lo);
        r.metric("a1_growth", growth);
        r.check(hi / lo <= 1.10, format!("A2 moved by {}", hi / lo));
        r.check(growth >= 2.0, format!("A1 grew only by {growth}"));
        Ok(())
    })
}

/// Randomized atoms against the corpus.
pub fn criterion_8(scale: Scale) -> CriterionResult {
    guarded(8, "atom duality pairing", |r| {
        let g = grid1(1.0, scale.pick(1024, 256))?;
        let fam = ball_family(&g, &BallFamilyConfig::default())?;
        let builtins = GrowthFunction::builtins();
        let tests: Vec<GridFunction> = standard_corpus().iter().map(|c| corpus(c, &g)).collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let count = scale.pick(100, 24);
        let mut pairs = 0;
        let mut passed = 0;
        let mut valid = 0;
        let mut worst = 0.0_f64;
        for k in 0..count {
            let s = k % 3;
            let gf = &builtins[k % builtins.len()];
            let ball = &fam[rng.gen_range(0..fam.len())];
            let profile = GridFunction::new(g.clone(), (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
            let atom = make_atom(&profile, ball, 2.0, s, gf)?;
            if atom.certified.as_ref().is_some_and(|c| c.passed()) {
                valid += 1;
            }
            for t in &tests {
                let p = duality_pairing(&atom, t, s, gf)?;
                pairs += 1;
                if p.pass {
                    passed += 1;
                }
                if p.bound > 0.0 {
                    worst = worst.max(p.pairing.abs() / p.bound);
                }
            }
        }
        r.metric("atoms", count as f64);
        r.metric("valid_atoms", valid as f64);
        r.metric("pairs", pairs as f64);
        r.metric("pass_rate", passed as f64 / pairs as f64);
        r.metric("max_pairing_over_bound", worst);
        r.check(valid == count, format!("{} atoms failed validation", count - valid));
        r.check(passed == pairs, format!("{} of {pairs} pairings violated the bound", pairs - passed));
        Ok(())
    })
}

/// Square transform, Carleson norm and Calderón normalization.
pub fn criterion_9(scale: Scale) -> CriterionResult {
    guarded(9, "Carleson measure equivalence", |r| {
        let k0 = build_kernel(1, 0, KernelShape::PolyBump)?;
        r.metric("calderon_deviation", k0.calderon_deviation);
        r.check(k0.calderon_deviation <= 0.1, format!("Calderon deviation {}", k0.calderon_deviation));

        let base = scale.pick(1024, 256);
        let g = grid1(1.0, base)?;
        let fam = ball_family(&g, &BallFamilyConfig::default())?;
        let gf = GrowthFunction::power(1.0);
        let mut worst_poly = 0.0_f64;
        for s in 0..=2 {
            let k = build_kernel(1, s, KernelShape::PolyBump)?;
            let coeffs: Vec<f64> = [0.5, -1.5, 2.0][..=s].to_vec();
            let b = corpus(&CorpusSpec::Polynomial { coeffs }, &g)?;
            let field = square_transform(&b, &k, &default_t_levels(&g))?;
            let c = carleson_norm(&field, &gf, &fam)?;
            worst_poly = worst_poly.max(c.value / b.max_abs());
        }
        r.metric("polynomial_norm_over_scale", worst_poly);
        r.check(worst_poly <= 1e-8, format!("polynomial Carleson norm {worst_poly:e}"));

        let mut ratios = Vec::new();
        for k in 0..3 {
            let g = grid1(1.0, base << k)?;
            let cfg = BallFamilyConfig { center_stride: 0.25, radii_levels: 4, min_radius_cells: 32.0 * (1u64 << k) as f64 };
            let fam = ball_family(&g, &cfg)?;
            let b = corpus(&CorpusSpec::LogAbs, &g)?;
            let field = square_transform(&b, &k0, &default_t_levels(&g))?;
            let c = carleson_norm(&field, &gf, &fam)?.value;
            let bmo = bmo_phi_norm(&b, &gf, &fam)?.value;
            r.metric(&format!("ratio_level{k}"), c / bmo);
            ratios.push(c / bmo);
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        r.metric("ratio_spread", hi / lo);
        r.check(lo >= 1.0 / 64.0 && hi <= 64.0, format!("Carleson/BMO ratio outside [1/64, 64]: {ratios:?}"));
        r.check(hi / lo <= 2.0, format!("ratio moved by {} across refinements", hi / lo));
        Ok(())
    })
}

/// Criteria 1 through 9.
pub fn run_core(scale: Scale) -> Vec<CriterionResult> {
    vec![
        criterion_1(scale),
        criterion_2(scale),
        criterion_3(scale),
        criterion_4(scale),
        criterion_5(scale),
        criterion_6(scale),
        criterion_7(scale),
        criterion_8(scale),
        criterion_9(scale),
    ]
}

/// Serialized quick battery under a fixed thread budget.
pub fn quick_suite_json(threads: usize) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::error::Error::InvalidInput(format!("thread pool: {e}")))?;
    let results = pool.install(|| run_core(Scale::Quick));
    serde_json::to_string_pretty(&results).map_err(|e| crate::error::Error::InvalidInput(e.to_string()))
}

/// Quick battery under 1 and 8 threads must serialize identically.
pub fn criterion_10() -> CriterionResult {
    guarded(10, "determinism across thread budgets", |r| {
        let one = quick_suite_json(1)?;
        let eight = quick_suite_json(8)?;
        r.metric("bytes", one.len() as f64);
        r.check(one == eight, "JSON differs between 1 and 8 threads");
        Ok(())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub scale: Scale,
    pub passed: usize,
    pub total: usize,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn lines(&self) -> Vec<String> {
        self.criteria.iter().map(CriterionResult::line).collect()
    }
}

/// Whole battery. `with_determinism` adds criterion 10.
pub fn run_suite(scale: Scale, with_determinism: bool) -> SuiteReport {
    let mut criteria = run_core(scale);
    if with_determinism {
        criteria.push(criterion_10());
    }
    let passed = criteria.iter().filter(|c| c.pass).count();
    SuiteReport { scale, passed, total: criteria.len(), criteria }
}

/// One status line per criterion.
pub fn status_line(c: &CriterionResult) -> String {
    c.line()
}
