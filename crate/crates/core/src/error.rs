use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty region: region does not intersect the computational box")]
    EmptyRegion,
    #[error("no admissible ball: ball family configuration produced no ball inside the box")]
    NoAdmissibleBall,
    #[error("singular node: growth function is not finite at x={x:?}, t={t}")]
    SingularNode { x: Vec<f64>, t: f64 },
    #[error("weight floor: weight {value:e} below 1e-300 on {context}")]
    WeightFloor { value: f64, context: String },
    #[error("norm overflow: modular never dropped to 1 within the bracket growth limit")]
    NormOverflow,
    #[error("bisection stalled with residual {residual:e} (tol {tol:e})")]
    BisectionStalled { residual: f64, tol: f64 },
    #[error("underdetermined: ball holds {nodes} nodes, degree {degree} needs {needed}")]
    Underdetermined {
        nodes: usize,
        needed: usize,
        degree: usize,
    },
    #[error("ill-conditioned Gram system (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
    #[error("IRLS did not converge on ball #{ball} (last relative decrease {decrease:e})")]
    IrlsNonConvergence { ball: usize, decrease: f64 },
    #[error("epsilon too small: {eps} must exceed n(q/i - 1) = {threshold}")]
    EpsilonTooSmall { eps: f64, threshold: f64 },
    #[error("q = {q} outside [1, q(phi)') with q(phi)' = {limit}")]
    QOutOfRange { q: f64, limit: f64 },
    #[error("insufficient decay range: {points} points in the fit window (need 8)")]
    InsufficientDecayRange { points: usize },
    #[error("degenerate profile: moment correction annihilates the profile")]
    DegenerateProfile,
    #[error("band too narrow: Calderon deviation {deviation} exceeds 0.5")]
    BandTooNarrow { deviation: f64 },
    #[error("level too coarse: every node invalid at t = {t}")]
    LevelTooCoarse { t: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
