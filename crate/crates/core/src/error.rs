use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice matrix is singular (|det| = {det:e}, threshold {threshold:e})")]
    SingularMatrix { det: f64, threshold: f64 },
    #[error("cyclic coupling does not project onto Z/{order}: gcd(c, N) = {gcd}")]
    CyclicNotDense { gcd: i64, order: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("physical projection is not injective: lattice points {first:?} and {second:?} share a physical coordinate")]
    InjectivityViolated { first: Vec<i64>, second: Vec<i64> },
    #[error("internal point signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("unsupported weight function: {0}")]
    UnsupportedKind(String),
    #[error("region too large: about {estimated} lattice points exceed the cap of {cap}")]
    RegionTooLarge { estimated: f64, cap: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("eps = {eps:e} is below the completeness floor {floor:e}")]
    EpsTooSmall { eps: f64, floor: f64 },
    #[error("weight function of class {class} is not in KL(H); generalised PSF checks need K2, PK or KL")]
    WeightNotInKL { class: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
