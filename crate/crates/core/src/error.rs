use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lotteries: negative probability {prob} at outcome {outcome}")]
    NegativeProbability { outcome: f64, prob: f64 },
    #[error("lotteries: empty support")]
    EmptySupport,
    #[error("lotteries: probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: f64 },
    #[error("lotteries: non-finite outcome or probability")]
    NonFiniteLottery,
    #[error("lotteries: mixture weight {0} outside [0, 1]")]
    MixWeight(f64),
    #[error("lotteries: outcome {z} outside domain [{lower}, {upper}]")]
    OutOfDomain { z: f64, lower: f64, upper: f64 },
    #[error("lotteries: invalid outcome domain [{lower}, {upper}]")]
    InvalidDomain { lower: f64, upper: f64 },
    #[error("lotteries: stochastic dominance order {0} not in 1..=3")]
    DominanceOrder(u8),

    #[error("preferences: unknown smooth function `{0}`")]
    UnknownFunction(String),
    #[error("preferences: {0}")]
    InvalidModel(String),
    #[error("preferences: parameter theta required for this model")]
    MissingTheta,
    #[error("preferences: derivative order {0} not in 1..=3")]
    DerivativeOrder(u8),
    #[error("preferences: induced maximizer is not unique (actions {first} and {second} within {gap:e})")]
    AmbiguousMaximizer { first: f64, second: f64, gap: f64 },
    #[error("preferences: non-finite value {0}")]
    NonFinite(String),

    #[error("gateaux_oracle: invalid configuration: {0}")]
    OracleConfig(String),

    #[error("conditions: {0}")]
    InvalidGrid(String),
    #[error(
        "conditions: local utility derivative u1 = {value} <= 0 at z = {z} (monotonicity violated)"
    )]
    NonMonotone { z: f64, value: f64 },
    #[error("conditions: degenerate prudence measure, |d u1/dy| = {0:e}")]
    DegenerateMeasure(f64),
    #[error("conditions: proposition {prop} needs ingredient `{ingredient}` which the problem does not provide")]
    MissingIngredient { prop: String, ingredient: String },

    #[error("problems: {0}")]
    InvalidProblem(String),
    #[error("problems: empty grid")]
    EmptyGrid,

    #[error("mcs_engine: {0}")]
    Search(String),

    #[error("presets: unknown preset `{0}`")]
    UnknownPreset(String),
}
