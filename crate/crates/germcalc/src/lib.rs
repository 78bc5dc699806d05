//! Asymptotic calculus for exp-log germs at +infinity.
//!
//! The crate works with closed terms over `{constants, x, +, *, 1/., ^q,
//! exp, log}`, viewed as germs of real functions at +infinity.  It decides
//! asymptotic order, computes growth levels, exponential height and angular
//! level symbolically, performs the domain arithmetic of real domains on the
//! Riemann surface of the logarithm, and numerically verifies continuation
//! properties (angle-positivity, expansiveness, D-Lipschitz bounds,
//! half-boundedness) by sampled evaluation in the Log chart.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled as
//! doc-tests of this crate (see the `book` module when built with
//! `cfg(doctest)`).

pub mod constant;
pub mod error;
pub mod interval;
pub mod term;

pub mod asymptotics;
pub mod domain;
pub mod lchart;
pub mod oracle;

pub mod gen;

pub mod accept;

pub use constant::{ExactConstant, Rational};
pub use error::{Error, Result};
pub use term::{parse, substitute, Term, TermId, TermKind};
pub use term::simplify::simplify;

#[cfg(doctest)]
mod book {
    //! Doc-tests that keep the mdbook guide honest: each chapter of
    //! `book/src` is compiled here, so `cargo test --doc` runs every
    //! fenced Rust snippet in the book.
    #![doc = include_str!("../../../book/src/introduction.md")]

    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/domains.md")]
    mod domains {}
    #[doc = include_str!("../../../book/src/continuation.md")]
    mod continuation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
