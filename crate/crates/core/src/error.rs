use thiserror::Error;

use crate::padic_omega::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    // real balls
    #[error("divisor ball contains zero")]
    DivisorStraddlesZero,
    #[error("logarithm argument is not certifiably positive")]
    NonPositiveArgument,

    // rationals
    #[error("division by zero")]
    DivideByZero,

    // power series
    #[error("series exponential needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("rational power needs constant term 1")]
    ConstantTermNotOne,
    #[error("inner series of a composition must have zero constant term")]
    CompositionInnerConstantNonzero,
    #[error("series reversion needs f(0) = 0 and a nonzero linear coefficient")]
    ZeroLinearCoefficient,
    #[error("series is not invertible (zero constant term)")]
    NotInvertible,
    #[error("reverted series failed the composition check")]
    ReversionCheckFailed,

    // p-adic
    #[error("p-adic operands have different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("p-adic element is not a unit")]
    NonUnit,
    #[error("coefficient {index} is not {p}-integral")]
    CoefficientNotPIntegral { index: usize, p: u64 },
    #[error("series argument must have positive valuation")]
    ArgumentNotInMaximalIdeal,
    #[error("Hensel condition fails: v(F) = {f_val}, v(F') = {df_val}")]
    HenselConditionFailed { f_val: u32, df_val: u32 },
    #[error("derivative valuation changed during lifting ({expected} -> {found})")]
    DerivativeNotUnitEnough { expected: u32, found: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("W_p coefficient {index} is not {p}-integral")]
    IntegralityViolation { index: usize, p: u64 },
    #[error("iteration stagnated after {} steps", .0.steps.len())]
    StagnationDetected(Box<IterationTrace>),

    // solvers and diagnostics
    #[error("iteration stopped converging after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("|x| < 1/e cannot be certified")]
    OutsideRadius,
    #[error("argument is not certifiably above the branch point -1/e")]
    BelowBranchPoint,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("precision gate failed at index {n}")]
    PrecisionGateFailed { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
