//! Command bodies. Each returns a [`Report`] and writes its side files.

use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::ExperimentConfig;
use super::corpus::{corpus, parse_corpus_name};
use super::report::{csv_table, fingerprint, write_atomic, Report, FAMILY_CAVEAT};
use super::svg::{Axis, Plot, Series};
use super::{AtomsCommand, CampanatoArgs, Cli, CliError, Command, ModelArg};
use crate::atoms::{duality_pairing, make_atom, validate_atom, Atom, AtomMeta};
use crate::campanato::{campanato_eps_norm, campanato_inf_norm, campanato_norm, equivalence_report};
use crate::carleson::{build_kernel, carleson_norm, default_t_levels, square_transform, KernelShape};
use crate::grid::{ball_family, Ball, Grid, GridFunction};
use crate::growth::{critical_indices, muckenhoupt_constant, GrowthFunction, GrowthIndices, GrowthSpec, IndexSearchConfig};
use crate::johnnirenberg::{jn_distribution, jn_fit, DecayModel};
use crate::luxembourg::{comparison_constant, luxembourg_norm};
use crate::polyproj::{projection_sup_ratio, orthogonality_residuals, project};
use crate::suite::{run_suite, status_line, Scale};

struct Ctx<'a> {
    cli: &'a Cli,
    cfg: ExperimentConfig,
    grid: Grid,
    gf: GrowthFunction,
    command: &'static str,
    inputs: Vec<Vec<u8>>,
    warnings: Vec<String>,
}

impl Ctx<'_> {
    fn lib<T>(&self, r: crate::Result<T>) -> Result<T, CliError> {
        r.map_err(|e| CliError::from_lib(self.command, e))
    }

    fn usage(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Usage(format!("{}: {msg}", self.command))
    }

    fn io(&self, path: &Path, e: std::io::Error) -> CliError {
        CliError::Numeric(format!("{}: writing {}: {e}", self.command, path.display()))
    }

    fn write(&self, file: &str, contents: &str) -> Result<PathBuf, CliError> {
        let p = self.cli.out.join(file);
        write_atomic(&p, contents.as_bytes()).map_err(|e| self.io(&p, e))?;
        Ok(p)
    }

    fn read_function(&mut self, path: &Path) -> Result<GridFunction, CliError> {
        let bytes = std::fs::read(path).map_err(|e| self.usage(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8_lossy(&bytes).into_owned();
        self.inputs.push(bytes);
        let f = self.lib(GridFunction::from_csv(&text))?;
        if f.grid() != &self.grid {
            return Err(self.usage(format!("{} is sampled on a different grid than the config", path.display())));
        }
        Ok(f)
    }

    /// `--function`, then `--corpus`, then the config's `function`.
    fn input(&mut self) -> Result<Option<GridFunction>, CliError> {
        if let Some(p) = self.cli.function.clone() {
            return self.read_function(&p).map(Some);
        }
        let spec = match &self.cli.corpus {
            Some(name) => Some(self.lib(parse_corpus_name(name))?),
            None => self.cfg.function.clone(),
        };
        match spec {
            Some(s) => {
                self.inputs.push(serde_json::to_vec(&s).expect("corpus spec serializes"));
                self.lib(corpus(&s, &self.grid)).map(Some)
            }
            None => Ok(None),
        }
    }

    fn require_input(&mut self) -> Result<GridFunction, CliError> {
        self.input()?.ok_or_else(|| self.usage("no input function: pass --function, --corpus or set config.function"))
    }

    fn ball(&self, arg: &Option<Vec<f64>>) -> Result<Option<Ball>, CliError> {
        let Some(v) = arg.as_ref().or(self.cfg.params.ball.as_ref()) else {
            return Ok(None);
        };
        let n = self.grid.dim();
        if v.len() != n + 1 {
            return Err(self.usage(format!("--ball needs {} numbers (center, radius)", n + 1)));
        }
        let b = self.lib(Ball::new(v[..n].to_vec(), v[n]))?;
        if !self.grid.admits(&b) {
            return Err(self.usage(format!("{b} does not fit the grid box")));
        }
        Ok(Some(b))
    }

    fn require_ball(&self, arg: &Option<Vec<f64>>) -> Result<Ball, CliError> {
        self.ball(arg)?.ok_or_else(|| self.usage("no ball: pass --ball or set params.ball"))
    }

    fn family(&self) -> Result<Vec<Ball>, CliError> {
        self.lib(ball_family(&self.grid, &self.cfg.balls))
    }

    fn indices(&mut self) -> Result<GrowthIndices, CliError> {
        if let Some(ix) = &self.cfg.params.indices {
            return Ok(ix.clone());
        }
        if let GrowthSpec::Power { p } = self.cfg.growth {
            return Ok(GrowthIndices::exact(p, 1.0, self.grid.dim()));
        }
        self.warnings.push("growth indices estimated on the grid".into());
        self.lib(critical_indices(&self.gf, &self.grid, &IndexSearchConfig::default()))
    }

    fn finish(self, results: serde_json::Value) -> Report {
        let refs: Vec<&[u8]> = self.inputs.iter().map(|v| v.as_slice()).collect();
        Report {
            command: self.command.to_string(),
            config_fingerprint: fingerprint(&self.cfg, &refs),
            results,
            warnings: self.warnings,
            wall_time_ms: None,
        }
    }
}

pub(super) fn dispatch(cli: &Cli, cfg: ExperimentConfig) -> Result<Report, CliError> {
    let command = cli.command.name();
    let grid = cfg.grid().map_err(|e| CliError::from_lib(command, e))?;
    let gf = cfg.growth_function().map_err(|e| CliError::from_lib(command, e))?;
    let ctx = Ctx { cli, cfg, grid, gf, command, inputs: Vec::new(), warnings: Vec::new() };
    match &cli.command {
        Command::Lux { ball } => lux(ctx, ball),
        Command::Proj { ball, degree } => proj(ctx, ball, *degree),
        Command::Campanato(a) => campanato(ctx, a),
        Command::Equiv(a) => equiv(ctx, a),
        Command::Jn { ball, s, model } => jn(ctx, ball, *s, *model),
        Command::Aq { q, indices } => aq(ctx, q, *indices),
        Command::Atoms { action } => atoms(ctx, action),
        Command::Carleson { s, force } => carleson(ctx, *s, *force),
        Command::Suite { quick, no_determinism } => suite(ctx, *quick, *no_determinism),
    }
}

fn lux(mut ctx: Ctx, ball: &Option<Vec<f64>>) -> Result<Report, CliError> {
    let f = match ctx.input()? {
        Some(f) => f,
        None => {
            let b = ctx.require_ball(ball)?;
            ctx.inputs.push(format!("indicator {b}").into_bytes());
            ctx.lib(GridFunction::from_fn(&ctx.grid, |x| if b.contains(&x[..b.dim()]) { 1.0 } else { 0.0 }))?
        }
    };
    let n = ctx.lib(luxembourg_norm(&f, &ctx.gf, ctx.cfg.tol))?;
    let v = json!({ "norm": n.norm, "iterations": n.iterations, "theta_residual": n.theta_residual });
    Ok(ctx.finish(v))
}

fn proj(mut ctx: Ctx, ball: &Option<Vec<f64>>, degree: Option<usize>) -> Result<Report, CliError> {
    let f = ctx.require_input()?;
    let b = ctx.require_ball(ball)?;
    let s = degree.unwrap_or(ctx.cfg.params.s);
    let p = ctx.lib(project(&f, &b, s))?;
    let res = orthogonality_residuals(&f, &p, &b);
    let sup_ratio = ctx.lib(projection_sup_ratio(&f, &b, s))?;
    let v = json!({
        "center": p.center,
        "radius": p.radius,
        "s": p.s,
        "basis": "((x - center) / radius)^alpha, graded order",
        "coefficients": p.coeffs,
        "orthogonality_residuals": res,
        "sup_projection_ratio": sup_ratio,
    });
    Ok(ctx.finish(v))
}

fn campanato_inputs(ctx: &Ctx, a: &CampanatoArgs) -> (Vec<f64>, usize, f64) {
    let p = &ctx.cfg.params;
    (a.q.clone().unwrap_or_else(|| p.q.clone()), a.s.unwrap_or(p.s), a.eps.unwrap_or(p.eps))
}

fn campanato(mut ctx: Ctx, a: &CampanatoArgs) -> Result<Report, CliError> {
    let f = ctx.require_input()?;
    let (qs, s, eps) = campanato_inputs(&ctx, a);
    let fam = ctx.family()?;
    let ix = ctx.indices()?;
    let veps = ctx.lib(campanato_eps_norm(&f, &ctx.gf, s, eps, &fam, &ix))?;
    let n = ctx.grid.dim();
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &q in &qs {
        let vq = ctx.lib(campanato_norm(&f, &ctx.gf, q, s, &fam))?;
        let vinf = ctx.lib(campanato_inf_norm(&f, &ctx.gf, q, s, &fam))?;
        rows.push(json!({ "q": q, "defining": vq.value, "infimum": vinf.value, "argmax": vq.argmax }));
        for (k, b) in fam.iter().enumerate() {
            let mut r = vec![q];
            r.extend_from_slice(&b.center[..n]);
            r.extend([b.radius, vq.per_ball[k], vinf.per_ball[k], veps.per_ball[k]]);
            table.push(r);
        }
    }
    let mut header = vec!["q", "c0"];
    if n == 2 {
        header.push("c1");
    }
    header.extend(["radius", "defining", "infimum", "epsilon"]);
    let csv = ctx.write("campanato.csv", &csv_table(&header, &table))?;
    ctx.warnings.push(FAMILY_CAVEAT.into());
    let v = json!({
        "s": s,
        "eps": eps,
        "epsilon_variant": veps.value,
        "rows": rows,
        "balls": fam.len(),
        "per_ball_csv": csv,
    });
    Ok(ctx.finish(v))
}

fn equiv(mut ctx: Ctx, a: &CampanatoArgs) -> Result<Report, CliError> {
    let f = ctx.require_input()?;
    let (qs, s, eps) = campanato_inputs(&ctx, a);
    let fam = ctx.family()?;
    let ix = ctx.indices()?;
    let rep = ctx.lib(equivalence_report(&f, &ctx.gf, s, &qs, eps, &fam, &ix, ctx.cfg.params.bracket))?;
    let mut series = Vec::new();
    for row in &rep.rows {
        let ratio = |num: fn(&crate::campanato::BallRow) -> f64| -> Vec<(f64, f64)> {
            row.per_ball.iter().filter(|b| b.v1 > 0.0).map(|b| (b.radius, num(b) / b.v1)).collect()
        };
        series.push(Series { label: format!("vq/v1 q={}", row.q), points: ratio(|b| b.vq), line: false });
        series.push(Series { label: format!("veps/v1 q={}", row.q), points: ratio(|b| b.veps), line: false });
        for fl in &row.flags {
            ctx.warnings.push(format!("q={}: {fl}", row.q));
        }
    }
    let plot = Plot {
        title: format!("per-ball ratios, s={s}"),
        x_label: "radius".into(),
        y_label: "ratio to v1".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series,
    };
    let svg = ctx.write("equiv.svg", &plot.render())?;
    ctx.warnings.push(FAMILY_CAVEAT.into());
    let rows: Vec<serde_json::Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "q": r.q, "v1": r.v1, "vq": r.vq, "vinf": r.vinf, "veps": r.veps,
                "ratio_1_q": r.r_1_q, "ratio_q_1": r.r_q_1, "ratio_inf_1": r.r_inf_1, "ratio_eps_1": r.r_eps_1,
                "worst_inf_over_q": r.worst_inf_over_q, "flags": r.flags,
            })
        })
        .collect();
    let v = json!({
        "s": rep.s, "eps": rep.eps, "bracket": rep.bracket, "q_limit": rep.q_limit,
        "spread": rep.spread(), "rows": rows, "plot": svg,
    });
    Ok(ctx.finish(v))
}

fn jn(mut ctx: Ctx, ball: &Option<Vec<f64>>, s: Option<usize>, model: Option<ModelArg>) -> Result<Report, CliError> {
    let f = ctx.require_input()?;
    let b0 = match ctx.ball(ball)? {
        Some(b) => b,
        None => {
            let bx = ctx.grid.bbox();
            let c: Vec<f64> = bx.lo.iter().zip(&bx.hi).map(|(l, h)| 0.5 * (l + h)).collect();
            ctx.lib(Ball::new(c, 0.5 * bx.shortest_side()))?
        }
    };
    let s = s.unwrap_or(ctx.cfg.params.s);
    let model = match model {
        Some(ModelArg::Exp) => DecayModel::Exponential,
        Some(ModelArg::Power) => DecayModel::Power,
        None => ctx.cfg.params.model,
    };
    let subs: Vec<Ball> = ctx.family()?.into_iter().filter(|b| b.is_inside(&b0)).collect();
    let curve = ctx.lib(jn_distribution(&f, &ctx.gf, &b0, s, ctx.cfg.params.alphas.as_deref(), &subs))?;
    let rows: Vec<Vec<f64>> = (0..curve.alphas.len())
        .map(|k| vec![curve.alphas[k], curve.lambda_vals[k], curve.f_vals[k]])
        .collect();
    let csv = ctx.write("jn.csv", &csv_table(&["alpha", "lambda", "sup_ratio"], &rows))?;
    let fit = ctx.lib(jn_fit(&curve, model))?;
    let x_axis = if model == DecayModel::Power { Axis::Log } else { Axis::Linear };
    let plot = Plot {
        title: format!("level sets on {b0}"),
        x_label: "alpha".into(),
        y_label: "measure".into(),
        x_axis,
        y_axis: Axis::Log,
        series: vec![
            Series { label: "lambda(alpha, B0)".into(), points: rows.iter().map(|r| (r[0], r[1])).collect(), line: true },
            Series { label: "sup ratio".into(), points: rows.iter().map(|r| (r[0], r[2])).collect(), line: true },
        ],
    };
    let svg = ctx.write("jn.svg", &plot.render())?;
    ctx.warnings.push(FAMILY_CAVEAT.into());
    let v = json!({
        "base_ball": { "center": b0.center, "radius": b0.radius },
        "seminorm": curve.seminorm,
        "chi_b0": curve.chi_b0,
        "max_quotient": curve.max_quotient,
        "sub_balls": subs.len(),
        "fit": fit,
        "curve_csv": csv,
        "plot": svg,
    });
    Ok(ctx.finish(v))
}

fn aq(mut ctx: Ctx, q: &Option<Vec<f64>>, with_indices: bool) -> Result<Report, CliError> {
    let qs = q.clone().unwrap_or_else(|| ctx.cfg.params.q.clone());
    let fam = ctx.family()?;
    let mut consts = Vec::new();
    for &qv in &qs {
        let c = ctx.lib(muckenhoupt_constant(&ctx.gf, &ctx.grid, qv, &fam, &ctx.cfg.params.t_grid))?;
        consts.push(json!({ "q": qv, "constant": c }));
    }
    let indices = if with_indices {
        Some(ctx.lib(critical_indices(&ctx.gf, &ctx.grid, &IndexSearchConfig::default()))?)
    } else {
        None
    };
    let comparison = ctx.lib(comparison_constant(&ctx.grid, &ctx.gf, &fam, ctx.cfg.tol))?;
    ctx.warnings.push(FAMILY_CAVEAT.into());
    let v = json!({
        "t_grid": ctx.cfg.params.t_grid,
        "constants": consts,
        "comparison_constant": comparison,
        "indices": indices,
    });
    Ok(ctx.finish(v))
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn load_atom(ctx: &mut Ctx, path: &Path) -> Result<Atom, CliError> {
    let values = ctx.read_function(path)?;
    let side = sidecar(path);
    let text = std::fs::read_to_string(&side).map_err(|e| ctx.usage(format!("cannot read {}: {e}", side.display())))?;
    ctx.inputs.push(text.clone().into_bytes());
    let meta: AtomMeta = serde_json::from_str(&text).map_err(|e| ctx.usage(format!("{}: {e}", side.display())))?;
    ctx.lib(Atom::from_parts(values, &meta))
}

fn atoms(mut ctx: Ctx, action: &AtomsCommand) -> Result<Report, CliError> {
    match action {
        AtomsCommand::Make { ball, q, s, name } => {
            let profile = ctx.require_input()?;
            let b = ctx.require_ball(ball)?;
            let s = s.unwrap_or(ctx.cfg.params.s);
            let atom = ctx.lib(make_atom(&profile, &b, *q, s, &ctx.gf))?;
            let csv = ctx.write(&format!("{name}.csv"), &atom.values.to_csv())?;
            let meta = atom.meta();
            let side = serde_json::to_string_pretty(&meta).expect("meta serializes");
            let side_path = ctx.write(&format!("{name}.json"), &side)?;
            let v = json!({ "atom_csv": csv, "sidecar": side_path, "meta": meta });
            Ok(ctx.finish(v))
        }
        AtomsCommand::Validate { atom } => {
            let a = load_atom(&mut ctx, atom)?;
            let rep = ctx.lib(validate_atom(&a, &ctx.gf))?;
            let v = json!({ "passed": rep.passed(), "report": rep });
            Ok(ctx.finish(v))
        }
        AtomsCommand::Pair { atom, s } => {
            let a = load_atom(&mut ctx, atom)?;
            let g = ctx.require_input()?;
            let s = s.unwrap_or(a.s);
            let p = ctx.lib(duality_pairing(&a, &g, s, &ctx.gf))?;
            let v = serde_json::to_value(&p).expect("pairing serializes");
            Ok(ctx.finish(v))
        }
    }
}

fn carleson(mut ctx: Ctx, s: Option<usize>, force: bool) -> Result<Report, CliError> {
    let ix = ctx.indices()?;
    let limit = 1.0 + IndexSearchConfig::default().q_step();
    if ix.q_est > limit + 1e-12 {
        if !force {
            return Err(CliError::Numeric(format!(
                "carleson: growth function is outside the A1 range (q_est = {}); rerun with --force",
                ix.q_est
            )));
        }
        ctx.warnings.push(format!("forced: q_est = {} exceeds {limit}", ix.q_est));
    }
    let b = ctx.require_input()?;
    let s = s.unwrap_or(ctx.cfg.params.s);
    let kernel = ctx.lib(build_kernel(ctx.grid.dim(), s, KernelShape::PolyBump))?;
    let levels = ctx.cfg.params.t_levels.clone().unwrap_or_else(|| default_t_levels(&ctx.grid));
    let field = ctx.lib(square_transform(&b, &kernel, &levels))?;
    let fam = ctx.family()?;
    let c = ctx.lib(carleson_norm(&field, &ctx.gf, &fam))?;
    let per_ball: Vec<serde_json::Value> = fam
        .iter()
        .zip(&c.per_ball)
        .map(|(b, v)| json!({ "center": b.center, "radius": b.radius, "value": v }))
        .collect();
    let plot = Plot {
        title: format!("Carleson per ball, s={s}"),
        x_label: "radius".into(),
        y_label: "normalized tent value".into(),
        x_axis: Axis::Log,
        y_axis: Axis::Log,
        series: vec![Series {
            label: "per ball".into(),
            points: fam.iter().zip(&c.per_ball).filter_map(|(b, v)| v.map(|v| (b.radius, v))).collect(),
            line: false,
        }],
    };
    let svg = ctx.write("carleson.svg", &plot.render())?;
    ctx.warnings.extend(c.warnings.iter().cloned());
    ctx.warnings.push(FAMILY_CAVEAT.into());
    let v = json!({
        "norm": c.value,
        "per_ball": per_ball,
        "kernel_deviation": kernel.calderon_deviation,
        "levels": levels.len(),
        "plot": svg,
    });
    Ok(ctx.finish(v))
}

fn suite(ctx: Ctx, quick: bool, no_determinism: bool) -> Result<Report, CliError> {
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let rep = run_suite(scale, !no_determinism);
    for c in &rep.criteria {
        eprintln!("{}", status_line(c));
    }
    let v = serde_json::to_value(&rep).expect("suite report serializes");
    Ok(ctx.finish(v))
}
