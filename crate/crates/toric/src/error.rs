use thiserror::Error;

/// Error type shared across the crate. Variants mirror the failure modes of the
/// geometric operations; `Parse`/`Io` belong to the CLI surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generators span a cone containing a line (not strongly convex)")]
    NotStronglyConvex,
    #[error("polyhedron is unbounded in coordinate {0}")]
    Unbounded(usize),
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("vector is not in the support of the fan")]
    NotInSupport,
    #[error("vector is already a ray of the fan")]
    AlreadyARay,
    #[error("cone is not a cone of the fan")]
    ConeNotInFan,
    #[error("matrix does not describe a finer lattice: {0}")]
    NotAFinerLattice(String),
    #[error("fine fan is not a refinement of the coarse fan: {0}")]
    NotARefinement(String),
    #[error("divisor is not Q-Cartier: no support functional on cone {{{0}}}")]
    NotQCartier(String),
    #[error("fan is not complete (and does not have convex full-dimensional support)")]
    NotComplete,
    #[error("wall lies on the support boundary; it carries no curve of X over the base")]
    BoundaryWall,
    #[error("fan is not a fake weighted projective space: {0}")]
    NotFakeWPS(String),
    #[error("divisor is not nef")]
    NotNef,
    #[error("divisor is not Cartier")]
    NotCartier,
    #[error("divisor is not ample")]
    NotAmple,
    #[error("merged cones do not form a valid fan: {0}")]
    MergeNotAFan(String),
    #[error("extremal ray has the wrong contraction profile: {0}")]
    WrongProfile(String),
    #[error("cone is not smooth")]
    NotSmoothCone,
    #[error("bad construction parameters: {0}")]
    BadParameters(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
