use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure in {context} after {iterations} iterations")]
    NumericalFailure { context: String, iterations: usize },

    /// The trial energy sits on a pole of the lower-block resolvent.
    #[error("energy {energy} lies within {distance:e} of resolvent pole {pole}")]
    PoleProximity {
        energy: f64,
        pole: f64,
        distance: f64,
    },

    #[error("perturbation theory breaks down: levels {sigma} and {sigma_prime} are separated by {gap:e}")]
    PerturbationBreakdown {
        sigma: f64,
        sigma_prime: f64,
        gap: f64,
    },

    #[error("no broken-symmetry phase for these parameters")]
    NoBrokenPhase,

    #[error("degenerate extremum at theta = {theta} (curvature {curvature:e})")]
    DegenerateExtremum { theta: f64, curvature: f64 },
}
