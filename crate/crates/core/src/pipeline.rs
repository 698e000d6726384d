//! The deterministic front-to-back path: normalize, tokenize, parse, check,
//! emit.

use alloc::vec::Vec;

use crate::check::{check, SemanticWarning};
use crate::codegen::{emit, TargetSource};
use crate::diagnostic::Diagnostic;
use crate::keywords::KeywordTable;
use crate::lexer::tokenize;
use crate::parser::parse_with;
use crate::source::SourceFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Lex,
    Parse,
    Check,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageError {
    pub stage: Stage,
    pub diagnostic: Diagnostic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub target: TargetSource,
    pub warnings: Vec<SemanticWarning>,
}

pub fn compile(source: &SourceFile, table: &KeywordTable) -> Result<Compiled, StageError> {
    let fail = |stage, diagnostic| StageError { stage, diagnostic };
    let src = source.normalized();
    let tokens = tokenize(&src, table).map_err(|e| fail(Stage::Lex, e.diagnostic()))?;
    let program = parse_with(&tokens, table).map_err(|e| fail(Stage::Parse, e.diagnostic()))?;
    let warnings = check(&program, table).map_err(|e| fail(Stage::Check, e.diagnostic()))?;
    let target = emit(&program, table, &source.origin).map_err(|e| fail(Stage::Check, e.diagnostic()))?;
    Ok(Compiled { target, warnings })
}
