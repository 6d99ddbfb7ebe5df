use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("negative power not allowed: {0}")]
    NegativePower(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("zero polynomial has no valuation")]
    ZeroPolynomial,
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("trigonometric terms present; a Taylor expansion is required")]
    TrigNeedsExpansion,
    #[error("unsupported trigonometric argument: {0}")]
    UnsupportedTrig(String),
    #[error("not an equilibrium: {0}")]
    NotEquilibrium(String),
    #[error("singular formula: {0}")]
    Singular(String),
    #[error("invalid chart: {0}")]
    Chart(String),
    #[error("weights inconsistent with the field: {0}")]
    WeightsInconsistent(String),
    #[error("all components vanish identically")]
    AllZero,
    #[error("subset not invariant: {0}")]
    NotInvariant(String),
    #[error("polar division exponent: {0}")]
    PolarExponent(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("conjugacy failure: {0}")]
    Conjugacy(String),
    #[error("template mismatch: {0}")]
    Template(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Eval(_) => "eval",
            Error::UndeclaredSymbol(_) => "undeclared-symbol",
            Error::NegativePower(_) => "negative-power",
            Error::UnboundSymbol(_) => "unbound-symbol",
            Error::ZeroPolynomial => "zero-polynomial",
            Error::NotDivisible(_) => "not-divisible",
            Error::TrigNeedsExpansion => "trig-needs-expansion",
            Error::UnsupportedTrig(_) => "unsupported-trig",
            Error::NotEquilibrium(_) => "not-equilibrium",
            Error::Singular(_) => "singular",
            Error::Chart(_) => "chart",
            Error::WeightsInconsistent(_) => "weights-inconsistent",
            Error::AllZero => "all-zero",
            Error::NotInvariant(_) => "not-invariant",
            Error::PolarExponent(_) => "polar-exponent",
            Error::GridTooCoarse(_) => "grid-too-coarse",
            Error::NonFinite(_) => "non-finite",
            Error::Dimension(_) => "dimension",
            Error::Conjugacy(_) => "conjugacy",
            Error::Template(_) => "template",
            Error::Input(_) => "input",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }

    /// Failures of a check, as opposed to malformed input.
    pub fn is_verification(&self) -> bool {
        matches!(
            self,
            Error::Conjugacy(_) | Error::Template(_) | Error::NotInvariant(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
