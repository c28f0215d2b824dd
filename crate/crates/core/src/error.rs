use thiserror::Error;

/// Every failure the library reports. Witness payloads carry display names so
/// they can be printed or serialized without access to the originating values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("composition is not associative on ({f}, {g}, {h})")]
    NonAssociative { f: String, g: String, h: String },
    #[error("identity law fails at object {0}")]
    BadIdentity(String),
    #[error("morphism {0} has an endpoint that is not a declared object")]
    DanglingEndpoint(String),
    #[error("composite {g} after {f} is missing from the table")]
    MissingComposite { g: String, f: String },
    #[error("composite {g} after {f} is not typed correctly")]
    IllTypedComposite { g: String, f: String },
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown morphism {0}")]
    UnknownMorphism(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("values live over different base categories")]
    BaseMismatch,
    #[error("action is not functorial: {0}")]
    NotFunctorial(String),
    #[error("transformation is not natural at morphism {0}")]
    NotNatural(String),
    #[error("subset is not closed under the action of {0}")]
    NotClosed(String),
    #[error("subobject is not complemented: {morphism} sends {element} into it")]
    NotComplemented { morphism: String, element: String },
    #[error("presheaf is not a tagged sum of representables")]
    NotSumOfReps,
    #[error("profunctor endpoints do not match")]
    EndpointMismatch,
    #[error("candidate space of {candidates} functions exceeds the bound {bound}")]
    SizeGuardExceeded { candidates: String, bound: u128 },
    #[error("node {node} is not tense: {witness}")]
    NotTense { node: String, witness: String },
    #[error("element {0} is not new")]
    NotNew(String),
    #[error("transformation fails the pullback condition: {0}")]
    NotPPI(String),
    #[error("operation needs a {expected} symmetric sequence")]
    ModeError { expected: String },
    #[error("action of {0} leaves the new elements")]
    ActionEscapesNewElements(String),
    #[error("truncation level {needed} exceeds the available arity {available}")]
    ArityBudget { needed: usize, available: usize },
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error("schema error at {pointer}: {message}")]
    SchemaError { pointer: String, message: String },
    #[error("map is not well defined on class {0}")]
    NotWellDefined(String),
    #[error("law fails: {0}")]
    LawViolation(String),
}

impl Error {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
