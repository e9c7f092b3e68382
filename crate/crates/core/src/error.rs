use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Problem size exceeds a dense-storage guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Physically invalid model, e.g. a non-positive-definite capacitance matrix.
    #[error("model error: {0}")]
    Model(String),
    /// A numerical procedure did not reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Variational deflation kept returning the penalty level.
    #[error("deflation stalled: {0}")]
    DeflationStall(String),
    /// Gate calibration failed; carries the best point that was found.
    #[error("calibration failed: {reason} (best hold {best_hold_ns:.4} ns, |11> return {best_return:.6})")]
    Calibration {
        reason: String,
        best_hold_ns: f64,
        best_return: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
