use thiserror::Error;

/// Every failure the library can report.
///
/// Variants that carry a location name the simplex, vertex or group slot where the
/// check failed, so that a caller can point at the offending part of the mesh.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector input contains NaN or infinity.
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),
    /// The two largest eigenvalue moduli are too close to pick a dominant one.
    #[error("degenerate dominant eigenvalue: |mu2|/|mu1| = {ratio:.3e}")]
    DegenerateDominantEigenvalue { ratio: f64 },
    /// The dense eigensolver did not converge.
    #[error("eigensolver failed to converge")]
    EigenFailure,
    #[error("unsupported sphere dimension {0}")]
    UnsupportedDimension(usize),
    /// A claimed symmetry does not permute the vertices or simplices.
    #[error("group action is not simplicial: {0}")]
    NotSimplicial(String),
    #[error("group cochain degree p = {0} is not supported")]
    UnsupportedDegree(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A simplex crosses a cut hyperplane used to select a domain.
    #[error("domain predicate cuts through simplex {0}")]
    PredicateNotSimplicial(String),
    #[error("vanishing overlap {modulus:.3e} on edge {edge:?}")]
    VanishingOverlap { edge: Vec<usize>, modulus: f64 },
    #[error("chain is not a cycle")]
    NotACycle,
    /// A lifted flux exceeds the guard; the mesh is too coarse.
    #[error("flux {flux:.4} on simplex {simplex:?} exceeds the guard {guard:.4}")]
    FluxGuardExceeded {
        simplex: Vec<usize>,
        flux: f64,
        guard: f64,
    },
    #[error("equivariance violated for element {element} at vertex {vertex}: {detail}")]
    EquivarianceViolated {
        element: usize,
        vertex: usize,
        detail: String,
    },
    #[error("vertex {vertex} is not fixed by element {element}")]
    NotFixedPoint { element: usize, vertex: usize },
    #[error("domain decomposition does not hold: {0}")]
    BadDecomposition(String),
    #[error("{what} = {value:.9} is not quantized (residual {residual:.3e})")]
    NotQuantized {
        what: String,
        value: f64,
        residual: f64,
    },
    #[error("degenerate ground state (gap {gap:.3e})")]
    DegenerateGroundState { gap: f64 },
    #[error("tensor is not normalizable")]
    NotNormalizable,
    #[error("tensor is not injective: {0}")]
    NotInjective(String),
    #[error("tensor is not canonical (residual {0:.3e})")]
    NotCanonical(f64),
    /// The mixed transfer matrix of an edge has no unique dominant eigenvalue.
    #[error("tensors on edge {edge:?} are not close: {detail}")]
    NotClose { edge: Vec<usize>, detail: String },
    #[error("vanishing Wilson loop {modulus:.3e} on triangle {triangle:?}")]
    VanishingWilsonLoop { triangle: Vec<usize>, modulus: f64 },
    #[error("gauge matrix does not commute with the Schmidt values (residual {0:.3e})")]
    GaugeNotBlockDiagonal(f64),
    #[error("element {element} does not stabilize vertex {vertex}")]
    NotStabilized { element: usize, vertex: usize },
    #[error("soliton state has vanishing norm")]
    VanishingNorm,
    #[error("V product for ({g}, {h}) at vertex {vertex} is not proportional to identity (residual {residual:.3e})")]
    NotProportionalToIdentity {
        g: usize,
        h: usize,
        vertex: usize,
        residual: f64,
    },
    #[error("Schmidt values differ between vertex {vertex} and its image under element {element}")]
    SchmidtMismatch { element: usize, vertex: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("action is not free: element {element} fixes vertex {vertex}")]
    NotFree { element: usize, vertex: usize },
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("pair Hamiltonian sector does not match the sign of n0")]
    WrongSector,
    #[error("schema error: {0}")]
    Schema(String),
    #[error("canonicalization failed at vertex {vertex}: {source}")]
    CanonicalizationFailed {
        vertex: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    /// A fixed-point or congruence identity failed numerically.
    #[error("relation {name} violated: lhs {lhs:.9}, rhs {rhs:.9}, residual {residual:.3e}")]
    RelationViolated {
        name: String,
        lhs: f64,
        rhs: f64,
        residual: f64,
    },
    #[error("cocycle condition {name} violated (residual {residual:.3e} at {slot})")]
    CocycleViolated {
        name: String,
        residual: f64,
        slot: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by a bad request rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Schema(_)
                | Error::UnknownName(_)
                | Error::UnsupportedDimension(_)
                | Error::MeshMismatch(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}
