//! Synthesis of n-qubit fully controlled gates `C^n(U)` into CNOT and
//! one-qubit gates.
//!
//! Two constructions are provided: [`exp_synth`], with `2^n − 2` CNOTs,
//! and [`poly_synth`], with a count quadratic in `n`. Every synthesized
//! circuit is checked against [`oracle`] before it is returned.

pub mod circuit;
pub mod cli;
pub mod error;
pub mod exp_synth;
pub mod graycode;
pub mod oracle;
pub mod poly_synth;
pub mod qmath;
pub mod reporting;

pub use error::{Error, Result};

use circuit::Circuit;
use oracle::Verification;

/// A synthesized circuit with the check it passed.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub circuit: Circuit,
    pub verification: Verification,
    /// Deviations from the nominal construction taken during synthesis.
    pub notes: Vec<String>,
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/gates.md")]
    struct Gates;
    #[doc = include_str!("../../../book/src/graycode.md")]
    struct Graycode;
    #[doc = include_str!("../../../book/src/exponential.md")]
    struct Exponential;
    #[doc = include_str!("../../../book/src/polynomial.md")]
    struct Polynomial;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
    #[doc = include_str!("../../../book/src/reporting.md")]
    struct Reporting;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
