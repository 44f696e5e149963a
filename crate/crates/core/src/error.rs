use thiserror::Error;

/// Which nondegeneracy hypothesis of an index comparison failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Nondegeneracy {
    /// `F(1)·L` meets the reference Lagrangian `L`.
    HalfEndpoint,
    /// The reflected half-path endpoint meets `L`.
    ReflectedEndpoint,
    /// `1 - F(2)` is singular.
    Monodromy,
    /// The defect form has a kernel.
    DefectForm,
}

impl std::fmt::Display for Nondegeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Nondegeneracy::HalfEndpoint => "half-path endpoint is not transverse to the reference",
            Nondegeneracy::ReflectedEndpoint => {
                "reflected half-path endpoint is not transverse to the reference"
            }
            Nondegeneracy::Monodromy => "monodromy has eigenvalue 1",
            Nondegeneracy::DefectForm => "defect form is degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },
    #[error("matrix is not anti-symplectic (residual {residual:.3e})")]
    NotAntiSymplectic { residual: f64 },
    #[error("matrix is not an involution (residual {residual:.3e})")]
    NotInvolution { residual: f64 },
    #[error("frame is not Lagrangian: {0}")]
    NotLagrangian(&'static str),
    #[error("generator of segment {segment} is not symmetric (residual {residual:.3e})")]
    NotSymmetric { segment: usize, residual: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("quadratic form is degenerate ({zero_count} eigenvalue(s) within tolerance of 0)")]
    Degenerate { zero_count: usize },
    #[error("time {t} outside [0, {total}]")]
    OutOfRange { t: f64, total: f64 },
    #[error("irregular crossing at t = {time}")]
    IrregularCrossing { time: f64 },
    #[error("unresolved crossings near t = {time}")]
    Unresolved { time: f64 },
    #[error("no intersection at t = {time}")]
    EmptyIntersection { time: f64 },
    #[error("transversality violated: {0}")]
    Transversality(&'static str),
    #[error("nondegeneracy violated: {0}")]
    Nondegeneracy(Nondegeneracy),
    #[error("periodic endpoint is degenerate (det(1 - F(T)) = 0)")]
    DegenerateEndpoint,
    #[error("no auxiliary Lagrangian transverse to all inputs after {attempts} attempts")]
    AuxiliaryNotFound { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
