use thiserror::Error;

/// Error surface shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation that must produce integers produced something else.
    /// Signals a convention or calibration bug; must never fire on valid input.
    #[error("non-integral output in {0}")]
    NonIntegralOutput(&'static str),

    /// A reduction step was asked for a pair with `A1 != 0`.
    #[error("pair is not on the quadric A1 = 0")]
    NotOnQuadric,

    /// An invariant that must be nonzero was zero.
    #[error("invariant is zero where a nonzero value is required")]
    ZeroInvariant,

    /// Exhaustive residue enumeration was requested beyond the configured budget.
    #[error("exhaustive enumeration at p={p}, level={level} exceeds budget")]
    LevelTooLarge { p: u64, level: u32 },

    /// The pencil `w1 F1 - w2 F2` is identically degenerate (zero quartic).
    #[error("degenerate pencil: the associated quartic vanishes identically")]
    DegeneratePencil,

    /// p-adic point search ran out of precision. Under the documented
    /// precision bound this indicates a bug, not a hard instance.
    #[error("p-adic search exhausted precision at p={0}")]
    PrecisionExhausted(u64),

    /// A value requiring prior calibration was requested before calibration.
    #[error("constant not calibrated: {0}")]
    NotCalibrated(&'static str),

    /// Finite-difference samples of the measure constant disagree.
    #[error("jacobian constant samples disagree: {0}")]
    InconsistentSamples(String),

    /// Two representatives of one root-number class produced different signs.
    #[error("root number class {0} is inconsistent across representatives")]
    ClassInconsistent(String),

    /// A level-set decomposition failed to place an integer in any cell.
    #[error("level-set decomposition left n={0} uncovered")]
    CoverageGap(i64),

    /// A per-curve computation exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A statistical run touched an `n` outside its guard set.
    #[error("guard violated for n={0}: {1}")]
    GuardViolated(i64, String),

    /// Tate's algorithm and the closed-form table disagree.
    #[error("internal disagreement at p={p}: {detail}")]
    InternalDisagreement { p: u64, detail: String },

    /// Trace of Frobenius requested at a prime of bad reduction.
    #[error("bad reduction at p={0}")]
    BadReduction(u64),

    /// The analytic sign test could not separate the two hypotheses.
    #[error("analytic root number inconclusive: residuals +1: {plus:.3e}, -1: {minus:.3e}")]
    Inconclusive { plus: f64, minus: f64 },

    /// Malformed input to a public operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
