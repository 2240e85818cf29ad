//! Error types shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh invariant violated: {0}")]
    Mesh(String),

    #[error("matrix at vertex {vertex} is not Hermitian (relative deviation {deviation:.3e})")]
    NonHermitian { vertex: usize, deviation: f64 },

    #[error("band-matching ambiguity on edge ({u}, {v}): competing assignments within {gap:.3e}")]
    MatchingAmbiguity { u: usize, v: usize, gap: f64 },

    #[error("band matching inconsistent around a mesh cycle through edge ({u}, {v})")]
    LoopInconsistency { u: usize, v: usize },

    #[error("spectral window holds {found} bands, need at least {need}")]
    WindowTooNarrow { found: usize, need: usize },

    #[error("band {band} is not complete inside the spectral window")]
    BandOutsideWindow { band: usize },

    #[error("families live on different meshes")]
    MeshMismatch,

    #[error("map is not simplicial: edge ({u}, {v}) maps to non-adjacent pair ({fu}, {fv})")]
    NotSimplicial { u: usize, v: usize, fu: usize, fv: usize },

    #[error("cover invalid: {0}")]
    CoverInvalid(String),

    #[error("no valid level for cover set {set}")]
    NoValidLevel { set: usize },

    #[error("band value {value} within {margin:.3e} of level {level} at vertex {vertex}")]
    GapViolation {
        vertex: usize,
        value: f64,
        level: f64,
        margin: f64,
    },

    #[error("level {level} of set {set} within one median band-gap of the window edge")]
    LevelNearWindowEdge { set: usize, level: f64 },

    #[error("essential codimension disagrees across overlap components of ({i}, {j}): {a} vs {b}")]
    WitnessDisagreement { i: usize, j: usize, a: i64, b: i64 },

    #[error("cocycle identity failed on nerve simplex {simplex:?}")]
    CocycleIdentity { simplex: Vec<usize> },

    #[error("loop is not a closed edge path")]
    NotALoop,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("nerve has no simplex {simplex:?}; assignment or cover is not good")]
    MissingNerveSimplex { simplex: Vec<usize> },

    #[error("difference space rank drop over overlap ({i}, {j}) at vertex {vertex}: expected {expected}, found {found}")]
    RankDrop {
        i: usize,
        j: usize,
        vertex: usize,
        expected: usize,
        found: usize,
    },

    #[error("frame continuity certificate violated on edge ({u}, {v}): smallest singular value {value:.3}")]
    ContinuityCertificate { u: usize, v: usize, value: f64 },

    #[error("off-tree holonomy modulus deviates by {deviation:.3e} on edge ({u}, {v})")]
    HolonomyModulus { u: usize, v: usize, deviation: f64 },

    #[error("frames missing for band {band} at vertex {vertex}")]
    FramesMissing { band: usize, vertex: usize },

    #[error("triple pairing modulus {modulus:.3} below 0.9 on simplex {simplex:?}")]
    PairingDegenerate { simplex: Vec<usize>, modulus: f64 },

    #[error("phase unwrap ambiguity between witnesses {u} and {v}: jump {jump:.3} rad")]
    UnwrapAmbiguity { u: usize, v: usize, jump: f64 },

    #[error("gerbe coboundary residual {residual:.3e} on nerve simplex {simplex:?}")]
    GerbeCoboundary { simplex: Vec<usize>, residual: f64 },

    #[error("integer lift residual {residual:.3} too large on nerve simplex {simplex:?}")]
    NonIntegerResidual { simplex: Vec<usize>, residual: f64 },

    #[error("selected subbundle carries total Chern number {chern}; splitting is obstructed")]
    ChernObstruction { chern: i64 },

    #[error("gauge fixing failed: {0}")]
    GaugeFixingFailed(String),

    #[error("illegal crossing created by {op} on band {band} at vertex {vertex}")]
    IllegalCrossing {
        op: &'static str,
        band: usize,
        vertex: usize,
    },

    #[error("epsilon {eps} exceeds half the gap {gap} to the next band above")]
    EpsilonTooLarge { eps: f64, gap: f64 },

    #[error("band {band} degenerate on the sphere at vertex {vertex}")]
    DegenerateOnSphere { band: usize, vertex: usize },

    #[error("Berry flux residual {residual:.3} from an integer; mesh too coarse")]
    FluxResidual { residual: f64 },

    #[error("clutching degree {clutching} disagrees with Dixmier-Douady pairing {dd}")]
    InvariantMismatch { clutching: i64, dd: i64 },

    #[error("condition (A) does not hold: {0}")]
    ConditionA(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
