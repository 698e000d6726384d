//! Front end for APL, an Arabic-script programming language that lowers to
//! Python 3 source.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function over in-memory text: normalization, tokenizing, parsing,
//! checking, Python emission, and the text-side helpers used by the LLM
//! translation path. Process execution, HTTP and file IO live in the `apl`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ast;
pub mod check;
pub mod codegen;
pub mod diagnostic;
pub mod keywords;
pub mod lexer;
pub mod normalize;
pub mod parser;
pub mod pipeline;
pub mod pretty;
pub mod prompt;
pub mod romanize;
pub mod source;

pub use ast::{BinOp, Block, Expr, ExprKind, Program, Stmt, StmtKind, UnaryOp};
pub use check::{check, CheckError, SemanticWarning};
pub use codegen::{emit, EmitError, RenameMap, TargetSource};
pub use diagnostic::Diagnostic;
pub use keywords::{Keyword, KeywordEntry, KeywordTable};
pub use lexer::{tokenize, LexError, Op, Token, TokenClass, TokenKind};
pub use normalize::{fold_digits, normalize, normalize_bytes, DigitError, InvalidEncoding};
pub use parser::{parse, parse_with, ParseError};
pub use pipeline::{compile, Compiled, Stage, StageError};
pub use source::{SourceFile, Span};
