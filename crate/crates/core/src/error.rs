use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point kind does not match system kind {system}")]
    KindMismatch { system: String },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("inadmissible word {word} for this subshift")]
    InadmissibleWord { word: String },

    #[error("observable incompatible with system: {0}")]
    IncompatibleObservable(String),

    #[error("weight is not bounded away from zero: certified lower bound {0}")]
    NonPositiveWeight(String),

    #[error("pseudo-orbit jump at index {index} is {jump}, exceeding eta = {eta}")]
    PseudoOrbitViolation {
        index: usize,
        jump: String,
        eta: String,
    },

    #[error("eta = {eta} exceeds the shadowing radius delta = {delta}")]
    EtaTooLarge { eta: String, delta: String },

    #[error("shadowing failed: {0}")]
    ShadowingFailed(String),

    #[error("stored tracking constant violated: error {error} > L*eta = {bound}")]
    TrackingConstantViolated { error: String, bound: String },

    #[error("ASP(1) precondition violated at step {step}: distance {distance} > delta")]
    AspPrecondition { step: usize, distance: String },

    #[error("enumeration depth {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("empty reference set")]
    EmptySet,

    #[error("no cycle in transition graph")]
    NoCycle,

    #[error("negative reduced cycle detected: beta {beta} is not minimal")]
    NegativeReducedCycle { beta: String },

    #[error("no cycle attains ratio {beta}: it lies below the minimum")]
    BetaNotAttained { beta: String },

    #[error("sub-action iteration did not converge: residual {residual} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("feasibility precheck failed: {0}")]
    Infeasible(String),

    #[error("construction stalled: {0}")]
    ConstructionStalled(String),

    #[error("orbit not good enough: L_O = {l_o} <= L_hat = {l_hat}")]
    OrbitNotGoodEnough { l_o: f64, l_hat: f64 },

    #[error("perturbation budget violated: {0}")]
    BudgetViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
