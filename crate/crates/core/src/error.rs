use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cubic family parameters are degenerate: {0}")]
    DegenerateParameters(&'static str),

    #[error("infeasible cubic family point (alpha={alpha}, beta={beta}, p11={p11}, p10={p10}): {reason}")]
    InfeasibleParameters {
        alpha: f64,
        beta: f64,
        p11: f64,
        p10: f64,
        reason: &'static str,
    },

    #[error("kernel is not a zero-drift probability kernel: {0}")]
    InvalidKernel(&'static str),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(&'static str),

    #[error("no branch assignment passes the on-curve gate (best residual {best_residual:e})")]
    BranchInconsistency { best_residual: f64 },

    #[error("integrand too close to a pole of dQ/dy at z = {re} + {im}i")]
    PoleProximity { re: f64, im: f64 },

    #[error("poles of x and y coincide inside the admissible sector at z = {re} + {im}i and carry a nonzero residue")]
    CoincidentPoles { re: f64, im: f64 },

    #[error("adaptive quadrature did not converge: error {error:e} after {evaluations} evaluations")]
    NonConvergence { error: f64, evaluations: usize },

    #[error("contour value has a non-negligible imaginary part: {imag:e} for real part {real:e}")]
    NonReal { real: f64, imag: f64 },

    #[error("lattice point ({i}, {j}) is not an interior point")]
    NotInterior { i: i64, j: i64 },

    #[error("asymptotic constant gate failed: assembled {assembled}, empirical {empirical}")]
    GateFailure { assembled: f64, empirical: f64 },

    #[error("martin kernel denominator {value:e} is not above its error {abs_error:e}")]
    DivisionInstability { value: f64, abs_error: f64 },
}
