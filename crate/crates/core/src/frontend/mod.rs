//! S-expression concrete syntax for both languages.
//!
//! ```text
//! M ::= n | x | () | unit
//!     | (pred M) | (plus M M) | (ifz M M M)
//!     | (pair M M) | (fst M) | (snd M)
//!     | (let ((x M)) M) | (app M M) | (M M)
//!     | (fix (f : T) (x : T) M)                 ; source only
//!     | (abs (x : T) M) | (clos M M)            ; target only
//!     | (open M (f e) M) | (letfun ((f M) ...) M)
//! T ::= nat | unit | (* T T) | (-> T T) | (=> T T) | (rigid k)
//! ```
//!
//! Every binder read from text gets a fresh stamp; free identifiers become
//! stamp-0 names, so separately parsed open terms agree on their free
//! variables.

mod parse;
mod print;
mod sexp;

pub use parse::{parse_src, parse_src_type, parse_tgt, parse_tgt_type};
pub use print::{print_hoisted, print_src, print_tgt};
pub use sexp::{Pos, Sexp};

use thiserror::Error;

pub const KEYWORDS: &[&str] = &[
    "pred", "plus", "ifz", "unit", "pair", "fst", "snd", "let", "fix", "abs", "app", "clos",
    "open", "cps", "letfun",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}
