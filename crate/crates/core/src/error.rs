use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bisection bracket not established for eigenvalue index {index} in [{lo}, {hi}]")]
    Bracket { index: usize, lo: f64, hi: f64 },

    #[error(
        "inverse iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    InverseIteration { iterations: usize, residual: f64 },

    #[error("shift {mu} is not isolated: {count} eigenvalues within {window:e}")]
    Degenerate { mu: f64, count: usize, window: f64 },

    #[error("Jacobi rotations did not converge in {sweeps} sweeps (off-diagonal norm {off:e})")]
    JacobiConvergence { sweeps: usize, off: f64 },

    #[error("implicit QL did not converge for eigenvalue {index} in {iterations} iterations")]
    QlConvergence { index: usize, iterations: usize },

    #[error("not PSD: eigenvalue {eigenvalue:e} below tolerance -{tolerance:e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("no sign change on [{a}, {b}] (f(a) = {fa:e}, f(b) = {fb:e})")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("{quantity} = {value} outside covered range [{lo}, {hi}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("inversion singular at s = {s:e} (band derivative {derivative:e})")]
    InversionSingular { s: f64, derivative: f64 },

    #[error("band {j} not monotone between k = {k0} and k = {k1} beyond discretization error")]
    Monotonicity { j: usize, k0: f64, k1: f64 },

    #[error(
        "k = {k} outside trustworthy window [{lo}, {hi}] (gap below 1e3 x discretization error)"
    )]
    Untrustworthy { k: f64, lo: f64, hi: f64 },

    #[error("node budget {budget} too small, at least {required} nodes needed")]
    NodeBudget { budget: usize, required: usize },

    #[error("mode grids incompatible: {0}")]
    GridMismatch(String),

    #[error("at lambda = {lambda:e}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("at k = {k}: {source}")]
    AtMomentum {
        k: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at_lambda(self, lambda: f64) -> Self {
        Error::AtLambda {
            lambda,
            source: Box::new(self),
        }
    }

    pub fn at_k(self, k: f64) -> Self {
        Error::AtMomentum {
            k,
            source: Box::new(self),
        }
    }
}
