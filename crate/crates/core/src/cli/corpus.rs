//! Built-in test functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::polyproj::multi_indices;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorpusSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `sign(x_0)`
    Sign,
    /// `ln|x|`
    LogAbs,
    /// `|x|^a`
    AbsPower { a: f64 },
    /// Uniform on `[-1, 1]`, ChaCha8 seeded.
    RandomSeeded {
        #[serde(default)]
        seed: u64,
    },
    /// Coefficients in graded multi-index order (`1, x` or `1, x, y, x², xy, y²`, ...).
    Polynomial { coeffs: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl CorpusSpec {
    pub fn label(&self) -> String {
        match self {
            CorpusSpec::Constant { value } => format!("constant({value})"),
            CorpusSpec::Sign => "sign".into(),
            CorpusSpec::LogAbs => "log_abs".into(),
            CorpusSpec::AbsPower { a } => format!("abs_power({a})"),
            CorpusSpec::RandomSeeded { seed } => format!("random_seeded({seed})"),
            CorpusSpec::Polynomial { coeffs } => format!("polynomial({coeffs:?})"),
        }
    }

    /// Degree of a polynomial entry, if any (constants count as degree 0).
    pub fn polynomial_degree(&self, n: usize) -> Option<usize> {
        match self {
            CorpusSpec::Constant { .. } => Some(0),
            CorpusSpec::Polynomial { coeffs } => {
                let idx = multi_indices(n, 8);
                let top = coeffs.iter().rposition(|c| *c != 0.0)?;
                Some(idx[top][0] + idx[top][1])
            }
            _ => None,
        }
    }
}

/// Sample a corpus entry on `grid`.
pub fn corpus(spec: &CorpusSpec, grid: &Grid) -> Result<GridFunction> {
    let n = grid.dim();
    match spec {
        CorpusSpec::Constant { value } => GridFunction::from_fn(grid, |_| *value),
        CorpusSpec::Sign => GridFunction::from_fn(grid, |x| {
            if x[0] > 0.0 {
                1.0
            } else if x[0] < 0.0 {
                -1.0
            } else {
                0.0
            }
        }),
        CorpusSpec::LogAbs => GridFunction::from_fn(grid, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt().ln()),
        CorpusSpec::AbsPower { a } => {
            GridFunction::from_fn(grid, |x| x.iter().map(|v| v * v).sum::<f64>().powf(0.5 * a))
        }
        CorpusSpec::RandomSeeded { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let samples = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            GridFunction::new(grid.clone(), samples)
        }
        CorpusSpec::Polynomial { coeffs } => {
            let max_deg = 8;
            let idx = multi_indices(n, max_deg);
            if coeffs.len() > idx.len() {
                return Err(Error::InvalidInput(format!("at most {} polynomial coefficients", idx.len())));
            }
            GridFunction::from_fn(grid, |x| {
                coeffs
                    .iter()
                    .zip(&idx)
                    .map(|(c, a)| c * x[0].powi(a[0] as i32) * if n == 2 { x[1].powi(a[1] as i32) } else { 1.0 })
                    .sum()
            })
        }
    }
}

/// Parse `constant`, `sign`, `log_abs`, `abs_power(0.5)`, `random_seeded`,
/// `random_seeded(7)`, `polynomial(1,0,-2)`.
pub fn parse_corpus_name(name: &str) -> Result<CorpusSpec> {
    let name = name.trim();
    let (head, arg) = match name.split_once('(') {
        Some((h, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidInput(format!("unbalanced parentheses in '{name}'")))?;
            (h, Some(inner))
        }
        None => (name, None),
    };
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number '{t}': {e}"))))
            .collect()
    };
    match (head, arg) {
        ("constant", None) => Ok(CorpusSpec::Constant { value: 1.0 }),
        ("constant", Some(a)) => Ok(CorpusSpec::Constant { value: nums(a)?[0] }),
        ("sign", None) => Ok(CorpusSpec::Sign),
        ("log_abs", None) => Ok(CorpusSpec::LogAbs),
        ("abs_power", Some(a)) => Ok(CorpusSpec::AbsPower { a: nums(a)?[0] }),
        ("random_seeded", None) => Ok(CorpusSpec::RandomSeeded { seed: 0 }),
        ("random_seeded", Some(a)) => a
            .trim()
            .parse::<u64>()
            .map(|seed| CorpusSpec::RandomSeeded { seed })
            .map_err(|e| Error::InvalidInput(format!("bad seed '{a}': {e}"))),
        ("polynomial", Some(a)) => Ok(CorpusSpec::Polynomial { coeffs: nums(a)? }),
        ("polynomial", None) => Ok(CorpusSpec::Polynomial { coeffs: vec![1.0, -2.0, 0.5] }),
        _ => Err(Error::InvalidInput(format!("unknown corpus function '{name}'"))),
    }
}

/// The six reference functions used by the verification battery.
pub fn standard_corpus() -> Vec<CorpusSpec> {
    vec![
        CorpusSpec::Constant { value: 1.0 },
        CorpusSpec::Sign,
        CorpusSpec::LogAbs,
        CorpusSpec::AbsPower { a: 0.5 },
        CorpusSpec::RandomSeeded { seed: 7 },
        CorpusSpec::Polynomial { coeffs: vec![1.0, -2.0, 0.5] },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridBox;

    #[test]
    fn named_entries() {
        let g = Grid::new(GridBox::symmetric(1, 1.0).unwrap(), vec![64]).unwrap();
        let c = corpus(&parse_corpus_name("constant").unwrap(), &g).unwrap();
        assert!(c.samples().iter().all(|&v| v == 1.0));
        let l = corpus(&parse_corpus_name("log_abs").unwrap(), &g).unwrap();
        for (j, v) in l.samples().iter().enumerate() {
            assert_eq!(*v, g.node(j)[0].abs().ln());
        }
        let r1 = corpus(&parse_corpus_name("random_seeded(3)").unwrap(), &g).unwrap();
        let r2 = corpus(&parse_corpus_name("random_seeded(3)").unwrap(), &g).unwrap();
        assert_eq!(r1, r2);
        assert!(parse_corpus_name("bogus").is_err());
        let p = parse_corpus_name("polynomial(1,0,2)").unwrap();
        assert_eq!(p.polynomial_degree(1), Some(2));
    }

    #[test]
    fn spec_json_round_trip() {
        for s in standard_corpus() {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<CorpusSpec>(&text).unwrap(), s);
        }
    }
}
