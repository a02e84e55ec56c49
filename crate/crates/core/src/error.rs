use crate::label::Symbol;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("incompatible label schemas")]
    IncompatibleSchemas,

    #[error("label schema mismatch")]
    SchemaMismatch,

    #[error("unitary targets the `{0}` field, absent from the label schema")]
    MissingField(&'static str),

    #[error("non-unitary collision on label {0}")]
    NonUnitaryCollision(String),

    #[error("mapping is not a bijection")]
    NotABijection,

    #[error("amplitude is not finite")]
    NonFiniteAmplitude,

    #[error("state has no branches")]
    EmptyState,

    #[error("unknown outcome symbol `{0}`")]
    UnknownSymbol(Symbol),

    #[error("weights must sum to 1")]
    WeightsNotNormalized,

    #[error("weights must be non-negative")]
    NegativeWeight,

    #[error("outcome symbols must be distinct")]
    DuplicateOutcome,

    #[error("system needs at least one outcome")]
    EmptyAlphabet,

    #[error("history must contain at least one outcome")]
    EmptyHistory,

    #[error("enumeration cap exceeded: {required} states > cap {cap}")]
    EnumerationCap { required: u128, cap: u64 },

    #[error("epsilon must be positive")]
    InvalidEpsilon,

    #[error("degenerate outcome: weight is zero")]
    DegenerateOutcome,

    #[error("payoffs and outcomes differ in length")]
    LengthMismatch,

    #[error("tally is inconsistent with the declared mind count")]
    InconsistentTally,

    #[error("impossible history: it carries zero weight")]
    ImpossibleHistory,

    #[error("qubit symbol outside the configured alphabet")]
    WrongAlphabet,

    #[error("fine-graining mismatch: weights are not integer multiples of 1/{levels}")]
    FineGrainingMismatch { levels: u32 },

    #[error("requires rational approximation: weights are not exact rationals")]
    RequiresRationalApproximation,

    #[error("fine-graining denominator {denominator} exceeds cap {cap}")]
    FineGrainCap { denominator: u128, cap: u64 },

    #[error("not envariant: swap pair ({0}, {1}) changes the state")]
    NotEnvariant(Symbol, Symbol),

    #[error("partition mismatch between fine probabilities and grain map")]
    PartitionMismatch,

    #[error("state is not Schmidt-correlated on `{0}`")]
    NotSchmidtCorrelated(Symbol),

    #[error("environment tags must be distinct")]
    SharedEnvironmentTag,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("cannot parse weight `{0}`")]
    WeightParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
