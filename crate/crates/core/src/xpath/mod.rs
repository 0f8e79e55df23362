//! XPath-BE: core XPath plus table, visual, image-tag and link extensions.

mod ast;
mod parser;
mod printer;

pub use ast::{expr_size, Axis, CmpOp, Expr, FnName, Literal, NodeTest, Step};
pub use parser::{parse, ParseError};
pub use printer::pretty_print;
