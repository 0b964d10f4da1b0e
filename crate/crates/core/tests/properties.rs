use proptest::prelude::*;

use molab::atoms::{lambda_q, make_atom, validate_atom, Multiple};
use molab::campanato::{campanato_inf_norm, campanato_norm};
use molab::carleson::{build_kernel, carleson_norm, default_t_levels, square_transform, KernelShape};
use molab::grid::{ball_family, integrate, Ball, BallFamilyConfig, Grid, GridBox, GridFunction, Region};
use molab::growth::{muckenhoupt_constant, GrowthFunction};
use molab::johnnirenberg::level_measure;
use molab::luxembourg::{chi_ball_norm, luxembourg_norm, DEFAULT_TOL};
use molab::polyproj::{eval_poly, project};

fn grid(res: usize) -> Grid {
    Grid::new(GridBox::symmetric(1, 1.0).unwrap(), vec![res]).unwrap()
}

fn samples(g: &Grid, v: &[f64]) -> GridFunction {
    GridFunction::new(g.clone(), (0..g.len()).map(|j| v[j % v.len()]).collect()).unwrap()
}

fn builtin() -> impl Strategy<Value = GrowthFunction> {
    (0..GrowthFunction::builtins().len()).prop_map(|k| GrowthFunction::builtins()[k].clone())
}

fn ball() -> impl Strategy<Value = Ball> {
    (-0.5..0.5_f64, 0.1..0.45_f64).prop_map(|(c, r)| Ball::new(vec![c], r).unwrap())
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0_f64, 7..40)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-300
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integrate_linear_and_monotone(v in values(), w in values(), a in -3.0..3.0_f64, b in -3.0..3.0_f64, bl in ball()) {
        let g = grid(512);
        let (f, h) = (samples(&g, &v), samples(&g, &w));
        let r = Region::Ball(&bl);
        let lhs = integrate(&f.axpby(a, &h, b).unwrap(), r).unwrap();
        let rhs = a * integrate(&f, r).unwrap() + b * integrate(&h, r).unwrap();
        let scale = integrate(&f.map(f64::abs).unwrap(), r).unwrap() * a.abs()
            + integrate(&h.map(f64::abs).unwrap(), r).unwrap() * b.abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1e-300));
        let inner = Ball::new(bl.center.clone(), 0.5 * bl.radius).unwrap();
        let fa = f.map(f64::abs).unwrap();
        prop_assert!(integrate(&fa, Region::Ball(&inner)).unwrap() <= integrate(&fa, r).unwrap());
    }

    #[test]
    fn growth_monotone_in_t(gf in builtin(), x in -1.0..1.0_f64, t1 in 1e-6..1e6_f64, t2 in 1e-6..1e6_f64) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assume!(x.abs() > 1e-9);
        prop_assert!(gf.eval(&[x], lo).unwrap() <= gf.eval(&[x], hi).unwrap());
    }

    #[test]
    fn luxembourg_homogeneous_and_monotone(gf in builtin(), v in values(), c in 0.01..100.0_f64, shrink in 0.0..1.0_f64) {
        let g = grid(256);
        let f = samples(&g, &v);
        prop_assume!(f.max_abs() > 1e-3);
        let n1 = luxembourg_norm(&f, &gf, DEFAULT_TOL).unwrap().norm;
        let nc = luxembourg_norm(&f.scaled(c), &gf, DEFAULT_TOL).unwrap().norm;
        prop_assert!(close(nc, c * n1, 2.0 * DEFAULT_TOL), "{nc} vs {}", c * n1);
        let small = f.scaled(shrink);
        let ns = luxembourg_norm(&small, &gf, DEFAULT_TOL).unwrap().norm;
        prop_assert!(ns <= n1 * (1.0 + 2.0 * DEFAULT_TOL));
    }

    #[test]
    fn projection_idempotent_linear_and_degree_monotone(v in values(), w in values(), a in -2.0..2.0_f64, bl in ball()) {
        let g = grid(512);
        let (f, h) = (samples(&g, &v), samples(&g, &w));
        for s in 0..=3usize {
            let p = project(&f, &bl, s).unwrap();
            let pf = GridFunction::from_fn(&g, |x| eval_poly(&p, &x[..1])).unwrap();
            let pp = project(&pf, &bl, s).unwrap();
            for (x, y) in p.coeffs.iter().zip(&pp.coeffs) {
                prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
            let comb = project(&f.axpby(a, &h, 1.0).unwrap(), &bl, s).unwrap();
            let ph = project(&h, &bl, s).unwrap();
            for k in 0..comb.coeffs.len() {
                prop_assert!((comb.coeffs[k] - (a * p.coeffs[k] + ph.coeffs[k])).abs() <= 1e-10 * (1.0 + comb.coeffs[k].abs()));
            }
        }
        let resid = |s: usize| {
            let p = project(&f, &bl, s).unwrap();
            g.ball_indices(&bl).iter().map(|&j| (f.samples()[j] - eval_poly(&p, &g.node(j)[..1])).powi(2)).sum::<f64>()
        };
        for s in 0..3usize {
            prop_assert!(resid(s + 1) <= resid(s) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn campanato_seminorm_axioms(v in values(), coeffs in prop::collection::vec(-5.0..5.0_f64, 3), c in -10.0..10.0_f64, q in 1.0..3.0_f64) {
        let g = grid(256);
        let f = samples(&g, &v);
        let gf = GrowthFunction::power(0.75);
        let cfg = BallFamilyConfig { center_stride: 0.5, radii_levels: 3, min_radius_cells: 16.0 };
        let fam = ball_family(&g, &cfg).unwrap();
        for s in 0..=2usize {
            let poly = GridFunction::from_fn(&g, |x| coeffs[..=s].iter().enumerate().map(|(k, a)| a * x[0].powi(k as i32)).sum()).unwrap();
            let base = campanato_norm(&f, &gf, q, s, &fam).unwrap();
            let shifted = campanato_norm(&f.axpby(1.0, &poly, 1.0).unwrap(), &gf, q, s, &fam).unwrap();
            prop_assert!(close(base.value, shifted.value, 1e-9), "{} vs {}", base.value, shifted.value);
            let scaled = campanato_norm(&f.scaled(c), &gf, q, s, &fam).unwrap();
            prop_assert!(close(scaled.value, c.abs() * base.value, 2.0 * DEFAULT_TOL));
            let inf = campanato_inf_norm(&f, &gf, q, s, &fam).unwrap();
            for (a, b) in inf.per_ball.iter().zip(&base.per_ball) {
                prop_assert!(*a <= b * (1.0 + 1e-9));
            }
            let sub = campanato_norm(&f, &gf, q, s, &fam[..fam.len() / 2]).unwrap();
            prop_assert!(sub.value <= base.value);
        }
    }

    #[test]
    fn level_measures_monotone_and_covariant(v in values(), c in 0.1..10.0_f64, bl in ball()) {
        let g = grid(512);
        let f = samples(&g, &v);
        let gf = GrowthFunction::power(1.0);
        let alphas: Vec<f64> = (0..40).map(|k| 0.05 * k as f64).collect();
        let lam = level_measure(&f, &gf, &bl, 0, 1.0, &alphas).unwrap();
        prop_assert!(lam.windows(2).all(|w| w[1] <= w[0]));
        let cap = g.ball_measure(&bl);
        prop_assert!(lam.iter().all(|&l| l <= cap * (1.0 + 1e-12)));
        let scaled_alphas: Vec<f64> = alphas.iter().map(|a| a * c).collect();
        let lam_c = level_measure(&f.scaled(c), &gf, &bl, 0, 1.0, &scaled_alphas).unwrap();
        for (a, b) in lam.iter().zip(&lam_c) {
            prop_assert!((a - b).abs() <= 1e-12 * cap);
        }
    }

    #[test]
    fn atoms_validate_and_lambda_grows(v in values(), bl in ball(), s in 0..3usize, gf in builtin()) {
        let g = grid(512);
        let a = make_atom(&samples(&g, &v), &bl, 2.0, s, &gf).unwrap();
        let rep = validate_atom(&a, &gf).unwrap();
        prop_assert!(rep.passed(), "{rep:?}");
        let chi = chi_ball_norm(&g, &bl, &gf, DEFAULT_TOL).unwrap();
        let one = vec![Multiple { ball: bl.clone(), lq_norm: 1.0 / chi }];
        let mut two = one.clone();
        two.push(Multiple { ball: Ball::new(vec![-bl.center[0]], 0.5 * bl.radius).unwrap(), lq_norm: 0.5 / chi });
        let l1 = lambda_q(&g, &gf, &one, DEFAULT_TOL).unwrap();
        let l2 = lambda_q(&g, &gf, &two, DEFAULT_TOL).unwrap();
        prop_assert!(l2 >= l1 * (1.0 - 2.0 * DEFAULT_TOL));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn carleson_homogeneous(v in values(), c in -5.0..5.0_f64) {
        prop_assume!(c.abs() > 1e-3);
        let g = grid(256);
        let b = samples(&g, &v);
        let k = build_kernel(1, 0, KernelShape::PolyBump).unwrap();
        let gf = GrowthFunction::power(1.0);
        let fam = ball_family(&g, &BallFamilyConfig { center_stride: 0.5, radii_levels: 3, min_radius_cells: 16.0 }).unwrap();
        let levels = default_t_levels(&g);
        let base = carleson_norm(&square_transform(&b, &k, &levels).unwrap(), &gf, &fam).unwrap().value;
        let scaled = carleson_norm(&square_transform(&b.scaled(c), &k, &levels).unwrap(), &gf, &fam).unwrap().value;
        prop_assert!(close(scaled, c.abs() * base, 2.0 * DEFAULT_TOL));
    }

    #[test]
    fn muckenhoupt_nonincreasing_in_q(gf in builtin(), q1 in 1.0..4.0_f64, dq in 0.0..2.0_f64) {
        let g = grid(256);
        let fam = ball_family(&g, &BallFamilyConfig::default()).unwrap();
        let a = muckenhoupt_constant(&gf, &g, q1, &fam, &[1.0]).unwrap();
        let b = muckenhoupt_constant(&gf, &g, q1 + dq, &fam, &[1.0]).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
    }
}
