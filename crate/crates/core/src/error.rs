use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

/// A named identity or bound that a record failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub id: &'static str,
    pub detail: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.id, self.detail)
    }
}

struct MismatchList<'a>(&'a [Mismatch]);

impl fmt::Display for MismatchList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("divisor classes live on different surface models")]
    ModelMismatch,
    #[error("expected {expected} coefficients, got {got}")]
    Rank { expected: usize, got: usize },
    #[error("D^2 + K.D = {0} is odd")]
    Parity(BigInt),
    #[error("generality assumption required: degree {degree} is special on a genus {genus} curve")]
    GeneralityRequired { degree: i64, genus: u32 },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("split enumeration needs {required} candidates, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("inconsistent record: {}", MismatchList(.0))]
    Inconsistent(Vec<Mismatch>),
    #[error("internal identity failed: {0}")]
    Identity(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("operation not supported on this surface model")]
    UnsupportedModel,
}

pub type Result<T> = core::result::Result<T, Error>;
