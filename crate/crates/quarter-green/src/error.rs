use serde_json::json;
use thiserror::Error;

pub type AppResult<T> = Result<T, AppError>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] quarter_green_core::Error),

    #[error("invalid walk spec: {0}")]
    Spec(String),

    #[error("{0}")]
    Usage(String),

    #[error("kernel is invalid: {0}")]
    Validation(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cache entry {0} is corrupt")]
    Cache(String),
}

impl AppError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        use quarter_green_core::Error as E;
        match self {
            AppError::Core(e) => match e {
                E::DegenerateParameters(_) => "degenerate_parameters",
                E::InfeasibleParameters { .. } => "infeasible_parameters",
                E::InvalidKernel(_) => "invalid_kernel",
                E::DegenerateCurve(_) => "degenerate_curve",
                E::BranchInconsistency { .. } => "branch_inconsistency",
                E::PoleProximity { .. } => "pole_proximity",
                E::CoincidentPoles { .. } => "coincident_poles",
                E::NonConvergence { .. } => "non_convergence",
                E::NonReal { .. } => "non_real",
                E::NotInterior { .. } => "not_interior",
                E::GateFailure { .. } => "gate_failure",
                E::DivisionInstability { .. } => "division_instability",
            },
            AppError::Spec(_) => "spec",
            AppError::Usage(_) => "usage",
            AppError::Validation(_) => "validation",
            AppError::Io { .. } => "io",
            AppError::Cache(_) => "cache",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
