use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("ordering is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("graph is not chordal (maximum cardinality search stalls at vertex {0})")]
    NotChordal(usize),
    #[error("ordering is not a perfect elimination ordering (earlier neighbours of {0} are not a clique)")]
    NotPerfectOrdering(usize),
    #[error("tree is empty or disconnected")]
    NotATree,
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("{what} exceeds the cap of {cap} (at least {seen} seen)")]
    CapExceeded { what: &'static str, cap: usize, seen: usize },
    #[error("list of vertex {0} is empty")]
    EmptyList(usize),
    #[error("expected {expected} lists or colours, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("colour {color} is not in the list of vertex {vertex}")]
    ColorNotInList { vertex: usize, color: u32 },
    #[error("monochromatic edge ({0}, {1})")]
    MonochromaticEdge(usize, usize),
    #[error("Kempe moves require uniform lists 0..k")]
    NonUniformLists,
    #[error("the two colourings do not differ by a single Kempe exchange")]
    NotKempeExchange,
    #[error("no admissible intermediate colour for vertex {vertex} with k = {k} (only k - Delta - 1 = {spare} choices are guaranteed)")]
    NoAdmissibleColor { vertex: usize, k: usize, spare: i64 },
    #[error("chain is not ergodic (eigenvalue 1 has multiplicity {0})")]
    NonErgodic(usize),
    #[error("colour class {0} is empty")]
    EmptyClass(u32),
    #[error("path weights for transition {from} -> {to} sum below 1")]
    WeightDeficit { from: usize, to: usize },
    #[error("path step {from} -> {to} is not a transition of the base chain")]
    InvalidPathStep { from: usize, to: usize },
    #[error("distributions differ in length or do not sum to 1")]
    InvalidDistribution,
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
