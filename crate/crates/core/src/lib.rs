//! Document model, XPath-BE evaluator and path inference.
//!
//! The crate is `no_std` with `alloc`. File formats, HTTP and the CLI live in
//! the `inferxpath` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod annotations;
pub mod corpus;
pub mod dom;
pub mod eval;
pub mod geometry;
pub mod infer;
pub mod markup;
pub mod semantic;
pub mod xpath;

pub use corpus::{Corpus, Page, PageSource};
pub use dom::{Document, NodeId, PageUrl};
pub use eval::{EvalError, EvalOptions, Evaluator, NodeSet, Value};
pub use xpath::{parse, pretty_print, Expr};
