use alloc::string::String;
use core::fmt;

use crate::rational::{fmt_q, Q};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Model parameters failed validation.
    InvalidParams(String),
    /// Two operands live over different residue fields or prime.
    ParameterMismatch,
    /// A `p`-th root needs a denominator beyond the allowed root level.
    LevelOverflow { level: u32 },
    /// The computation needs more `t`-adic (or `p`-adic) digits than are
    /// available. `needed` is a sufficient precision when one is known.
    PrecisionExhausted { needed: Option<Q> },
    /// Artin–Schreier solving requires positive valuation.
    NonPositiveValuation,
    /// gcd of elements that are all zero at precision.
    AllZero,
    /// Division whose quotient would leave the valuation ring.
    NotDivisible,
    /// `d_out ∘ d_in ≠ 0`.
    NotAComplex,
    /// A module map violates `v(x_ij) ≥ γ_target,i − γ_source,j`.
    IllDefinedMap { row: usize, col: usize },
    /// Matrix or module shapes do not fit together.
    ShapeMismatch(String),
    /// Universal Witt polynomial tables would exceed the size budget.
    WittTableTooLarge { p: u32, len: usize },
    /// A table would exceed the configured cell budget.
    BudgetExceeded { cells: u64, budget: u64 },
    /// `p`-shift of a period element leaves no meaningful digits.
    PshiftOverflow,
    /// Textual input could not be parsed.
    Parse(String),
    /// Requested computation is outside the supported range.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(s) => write!(f, "invalid parameters: {s}"),
            Error::ParameterMismatch => f.write_str("operands use different model parameters"),
            Error::LevelOverflow { level } => {
                write!(f, "root level overflow: exponent denominator exceeds p^{level}")
            }
            Error::PrecisionExhausted { needed: Some(n) } => {
                write!(f, "precision exhausted (need at least {})", fmt_q(*n))
            }
            Error::PrecisionExhausted { needed: None } => f.write_str("precision exhausted"),
            Error::NonPositiveValuation => f.write_str("argument must have positive valuation"),
            Error::AllZero => f.write_str("all elements are zero at precision"),
            Error::NotDivisible => f.write_str("quotient is not integral"),
            Error::NotAComplex => f.write_str("maps do not compose to zero"),
            Error::IllDefinedMap { row, col } => {
                write!(f, "map entry ({row}, {col}) violates the valuation condition")
            }
            Error::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            Error::WittTableTooLarge { p, len } => {
                write!(f, "Witt polynomial tables for p = {p}, length {len} exceed the size budget")
            }
            Error::BudgetExceeded { cells, budget } => {
                write!(f, "table needs {cells} cells, budget is {budget}")
            }
            Error::PshiftOverflow => f.write_str("p-shift exceeds the Witt length"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
        }
    }
}
