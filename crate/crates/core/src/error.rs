use thiserror::Error;

/// Errors produced by the geometry engine.
#[derive(Debug, Error)]
pub enum GeoError {
    /// Radial coordinate outside the working domain, or |D(r)| below the
    /// nondegeneracy margin.
    #[error("domain error at r = {r}: {reason}")]
    Domain { r: f64, reason: String },

    /// Invalid profile construction (bad class parameters, excluded cases).
    #[error("invalid profile: {0}")]
    Profile(String),

    /// Expression parse failure.
    #[error("expression parse error: {0}")]
    Parse(String),

    /// Tangent plane degenerate: induced metric has no inverse at the
    /// sampled point.
    #[error("degenerate tangent plane at u = ({0}, {1}, {2})")]
    Degenerate(f64, f64, f64),

    /// The orthogonal complement of the tangent space is null (lightlike);
    /// no unit normal exists.
    #[error("null normal direction at u = ({0}, {1}, {2})")]
    NullNormal(f64, f64, f64),

    /// Family parameters violate a constructibility condition (radicand,
    /// log domain, |rho| >= min D, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Catalog entry not applicable to the given profile/grid.
    #[error("entry {id} not applicable: {reason}")]
    Applicability { id: String, reason: String },

    /// Config / CLI input problems.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
