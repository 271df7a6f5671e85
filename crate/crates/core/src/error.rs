use thiserror::Error;

/// Every failure the library reports. Variants fall in two classes: invalid
/// input ([`Error::is_config`]) and exhausted numerical budgets.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tail specification: {0}")]
    InvalidTailSpec(String),
    #[error("mean adjustment infeasible: {0}")]
    InfeasibleMeanAdjustment(String),
    #[error("law is not strongly aperiodic: {0}")]
    AperiodicityFailure(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("law is not spectrally positive: {0}")]
    NotSpectrallyPositive(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
    #[error("point outside the regime: {0}")]
    OutOfRegime(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("truncation too coarse: {0}")]
    TruncationTooCoarse(String),
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("C+ is infinite: {0}")]
    InfiniteCPlus(String),
    #[error("conditioning event has no mass: {0}")]
    ConditioningMassZero(String),
    #[error("conditioning event too rare: {0}")]
    ConditioningTooRare(String),
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidTailSpec(_)
                | Error::InfeasibleMeanAdjustment(_)
                | Error::AperiodicityFailure(_)
                | Error::NotSpectrallyPositive(_)
                | Error::OutOfRegime(_)
                | Error::Config(_)
                | Error::InfiniteCPlus(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
