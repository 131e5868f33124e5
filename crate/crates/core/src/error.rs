use thiserror::Error;

/// Failures reported by the forward model, the inverse solver and the
/// well-posedness tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of its iteration or subdivision budget.
    #[error("{method} did not converge within {budget} steps")]
    Convergence { method: &'static str, budget: usize },

    /// The target probability is not attained inside the search bracket.
    #[error("target q* = {q_star} lies outside [{q_lo}, {q_hi}] attained on the bracket")]
    InfeasibleTarget { q_star: f64, q_lo: f64, q_hi: f64 },

    /// The invariant was solved but the recovered parameter violates its
    /// physical range.
    #[error("recovered {name} = {value} is outside its admissible range")]
    InfeasibleParameter { name: &'static str, value: f64 },

    /// The solved invariant is zero, so the requested parameter would be
    /// zero or infinite.
    #[error("solved invariant x* = 0; {name} is not determined")]
    DegenerateInvariant { name: &'static str },

    /// The slope threshold exceeds the largest slope of Q_m.
    #[error("threshold epsilon = {epsilon} exceeds the peak slope {peak_slope} of Q_{m}")]
    ThresholdTooHigh { m: u64, epsilon: f64, peak_slope: f64 },

    /// The slope of Q_m failed the unimodality check the interval relies on.
    #[error("slope of Q_{m} is not unimodal on the certification grid")]
    NotUnimodal { m: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
