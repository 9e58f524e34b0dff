//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`GbsError`]. Variants are
//! deliberately fine-grained so that callers (the CLI, the C ABI) can report
//! *which* object broke *which* precondition without string-matching.

use thiserror::Error;

/// Errors produced by graph construction, parsing, moves, words, balls,
/// bound computations and the chain-family verifier.
#[derive(Debug, Error)]
pub enum GbsError {
    /// A text format (graph, word, complex, move log) failed to parse.
    /// `line` is 1-based.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An identifier does not match the accepted charset
    /// (`[A-Za-z0-9_]` first, then `[A-Za-z0-9_.-]`).
    #[error("invalid identifier {name:?}")]
    BadIdentifier { name: String },

    /// A vertex with this name already exists.
    #[error("duplicate vertex {name:?}")]
    DuplicateVertex { name: String },

    /// An edge with this name already exists.
    #[error("duplicate edge {name:?}")]
    DuplicateEdge { name: String },

    /// A vertex name was referenced but never declared.
    #[error("unknown vertex {name:?}")]
    UnknownVertex { name: String },

    /// An edge name was referenced but never declared.
    #[error("unknown edge {name:?}")]
    UnknownEdge { name: String },

    /// An operation with precondition "graph is valid" was handed a graph
    /// whose `validate()` is non-empty.
    #[error("invalid graph: {violations}")]
    InvalidGraph { violations: String },

    /// A word failed well-formedness (base vertex, edge adjacency, syllable
    /// alternation).
    #[error("malformed word: {message}")]
    MalformedWord { message: String },

    /// The collapse precondition failed for the named oriented edge.
    #[error("edge {edge} is not collapsible: {reason}")]
    NotCollapsible { edge: String, reason: String },

    /// The expansion divisor is zero or fails to divide a selected end label.
    #[error("bad expansion divisor: {reason}")]
    ExpandDivisor { reason: String },

    /// An oriented edge handed to `expand` is not an end at the named vertex.
    #[error("edge {edge} is not an edge end at vertex {vertex}")]
    NotAnEnd { edge: String, vertex: String },

    /// The vertex is not the midpoint of a subdivided edge.
    #[error("vertex {vertex} is not a subdivision point: {reason}")]
    NotSubdivisionPoint { vertex: String, reason: String },

    /// The operation needs a finite label but hit the infinite-index sentinel.
    #[error("edge {edge} carries the infinite-index sentinel label")]
    InfiniteLabel { edge: String },

    /// Ball expansion would exceed the configured vertex cap.
    #[error("tree ball would exceed the cap of {cap} vertices")]
    BallCap { cap: u64 },

    /// A tree-ball address failed to parse or names no vertex of the ball.
    #[error("bad ball address {address:?}: {reason}")]
    BadAddress { address: String, reason: String },

    /// Two ball vertices handed to the fold classifier are not adjacent.
    #[error("ball vertices {origin} and {target} are not adjacent")]
    NotAdjacent { origin: String, target: String },

    /// An operation requiring a reduced graph was handed a non-reduced one.
    #[error("graph is not reduced: {message}")]
    NotReduced { message: String },

    /// A cell with this name already exists in the chain complex.
    #[error("duplicate cell {name:?}")]
    DuplicateCell { name: String },

    /// A cell name was referenced but never declared.
    #[error("unknown cell {name:?}")]
    UnknownCell { name: String },

    /// The chain complex violates a structural invariant
    /// (boundary-of-boundary, connectivity, or emptiness).
    #[error("invalid complex: {message}")]
    InvalidComplex { message: String },

    /// A family check failed; names the chain length and the check.
    #[error("family check failed at k = {k}: {check}")]
    FamilyCheck { k: usize, check: String },

    /// A chain specification entry is zero (labels must be nonzero integers).
    #[error("chain spec entry {index} is zero")]
    ZeroChainEntry { index: String },

    /// The chain specification label vectors have inconsistent lengths.
    #[error("chain spec is malformed: {message}")]
    BadChainSpec { message: String },

    /// `verify_family` was asked for an empty family (kmax = 0).
    #[error("family verification needs kmax >= 1")]
    EmptyFamily,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, GbsError>;
