use thiserror::Error;

use crate::complex::Cell;

/// One problem found while validating a raw complex description.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("triangle {tri} is degenerate (sides {sides:?})")]
    DegenerateTriangle { tri: String, sides: [f64; 3] },
    #[error("1-skeleton has {components} connected components")]
    DisconnectedComplex { components: usize },
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("edge {edge} has non-positive or non-finite length {len}")]
    BadLength { edge: String, len: f64 },
    #[error("edge {0} is a loop")]
    LoopEdge(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("edges of triangle {0} do not form a 3-cycle")]
    NotACycle(String),
    #[error("complex has no vertices")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid complex: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("point is not in cell {0:?}")]
    PointNotInCell(Cell),
    #[error("coordinates out of range: {0}")]
    CoordsOutOfRange(String),
    #[error("link points lie in different components")]
    Disconnected,
    #[error("geodesic straightening did not converge after {iterations} passes (length {length})")]
    NotConverged { iterations: usize, length: f64 },
    #[error("invalid Sperner coloring: {0}")]
    InvalidColoring(String),
    #[error("empty seed region for subdivision search")]
    EmptySeed,
    #[error("{} distinct candidate clusters survive", .0.len())]
    MultipleCandidates(Vec<crate::complex::PointRef>),
    #[error("boundary curve total curvature {0} is not below 4π")]
    CurvatureTooLarge(f64),
    #[error("filling map is not injective: {0}")]
    InjectivityFailure(String),
    #[error("not a good gluing: {0}")]
    NotGoodGluing(String),
    #[error("point fails membership in full triangle {0}")]
    NotMember(usize),
    #[error("gluing mismatch: {0}")]
    GluingMismatch(String),
    #[error("annulus fold reached an unsupported configuration: {0}")]
    AnnulusFoldStuck(String),
    #[error("{0}")]
    Input(String),
}

impl Error {
    /// Errors that signal a violated theorem rather than bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(
            self,
            Error::MultipleCandidates(_) | Error::InjectivityFailure(_) | Error::AnnulusFoldStuck(_)
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
