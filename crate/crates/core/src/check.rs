//! A light semantic pass over a parsed program. It does not type-check.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::ast::{Block, Expr, ExprKind, Program, Stmt, StmtKind};
use crate::diagnostic::Diagnostic;
use crate::keywords::KeywordTable;
use crate::source::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticWarning {
    /// A name is read but never bound anywhere in the program.
    UndefinedName { name: String, span: Span },
    /// A call through a name that is neither a builtin nor bound anywhere.
    UnknownCallee { name: String, span: Span },
}

impl SemanticWarning {
    pub fn diagnostic(&self) -> Diagnostic {
        match self {
            SemanticWarning::UndefinedName { name, span } => Diagnostic::new(
                "undefined-name",
                format!("'{name}' is used but never assigned"),
                format!("الاسم '{name}' مستخدم ولكن لم تُسند له قيمة"),
                Some(*span),
            ),
            SemanticWarning::UnknownCallee { name, span } => Diagnostic::new(
                "unknown-callee",
                format!("call to unknown function '{name}'"),
                format!("استدعاء دالة غير معروفة '{name}'"),
                Some(*span),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{span}: return outside of a function")]
    ReturnOutsideFunction { span: Span },
}

impl CheckError {
    pub fn diagnostic(&self) -> Diagnostic {
        match self {
            CheckError::ReturnOutsideFunction { span } => Diagnostic::new(
                "return-outside-function",
                "'return' may only appear inside a function",
                "لا يمكن استخدام 'ارجع' إلا داخل دالة",
                Some(*span),
            ),
        }
    }
}

pub fn check(program: &Program, table: &KeywordTable) -> Result<Vec<SemanticWarning>, CheckError> {
    let mut bound = BTreeSet::new();
    collect_bindings(&program.body, &mut bound);
    let mut checker = Checker { table, bound, warnings: Vec::new() };
    checker.stmts(&program.body, false)?;
    Ok(checker.warnings)
}

fn collect_bindings(stmts: &[Stmt], out: &mut BTreeSet<String>) {
    for s in stmts {
        match &s.kind {
            StmtKind::Assign { target, .. } => {
                out.insert(target.clone());
            }
            StmtKind::ForEach { var, .. } => {
                out.insert(var.clone());
            }
            StmtKind::FuncDef { name, params, .. } => {
                out.insert(name.clone());
                out.extend(params.iter().cloned());
            }
            _ => {}
        }
        for b in s.blocks() {
            collect_bindings(&b.stmts, out);
        }
    }
}

struct Checker<'a> {
    table: &'a KeywordTable,
    bound: BTreeSet<String>,
    warnings: Vec<SemanticWarning>,
}

impl Checker<'_> {
    fn is_known(&self, name: &str) -> bool {
        self.bound.contains(name) || self.table.lookup(name).is_some_and(|e| e.keyword.is_builtin())
    }

    fn stmts(&mut self, stmts: &[Stmt], in_function: bool) -> Result<(), CheckError> {
        for s in stmts {
            self.stmt(s, in_function)?;
        }
        Ok(())
    }

    fn block(&mut self, b: &Block, in_function: bool) -> Result<(), CheckError> {
        self.stmts(&b.stmts, in_function)
    }

    fn stmt(&mut self, s: &Stmt, in_function: bool) -> Result<(), CheckError> {
        match &s.kind {
            StmtKind::Assign { value, .. } => self.expr(value),
            StmtKind::IndexAssign { base, index, value } => {
                if !self.is_known(base) {
                    self.warnings.push(SemanticWarning::UndefinedName { name: base.clone(), span: s.span });
                }
                self.expr(index);
                self.expr(value);
            }
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::If { cond, then_block, elifs, else_block } => {
                self.expr(cond);
                self.block(then_block, in_function)?;
                for (c, b) in elifs {
                    self.expr(c);
                    self.block(b, in_function)?;
                }
                if let Some(b) = else_block {
                    self.block(b, in_function)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.block(body, in_function)?;
            }
            StmtKind::ForEach { iterable, body, .. } => {
                self.expr(iterable);
                self.block(body, in_function)?;
            }
            StmtKind::FuncDef { body, .. } => self.block(body, true)?,
            StmtKind::Return(value) => {
                if !in_function {
                    return Err(CheckError::ReturnOutsideFunction { span: s.span });
                }
                if let Some(e) = value {
                    self.expr(e);
                }
            }
        }
        Ok(())
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Call { callee, args } => {
                match &callee.kind {
                    ExprKind::Name(name) if !self.is_known(name) => {
                        self.warnings.push(SemanticWarning::UnknownCallee { name: name.clone(), span: callee.span });
                    }
                    ExprKind::Name(_) => {}
                    _ => self.expr(callee),
                }
                args.iter().for_each(|a| self.expr(a));
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                self.expr(lhs);
                self.expr(rhs);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand),
            ExprKind::Index { base, index } => {
                self.expr(base);
                self.expr(index);
            }
            ExprKind::List(items) => items.iter().for_each(|i| self.expr(i)),
            ExprKind::Name(name) if !self.is_known(name) => {
                self.warnings.push(SemanticWarning::UndefinedName { name: name.clone(), span: e.span });
            }
            _ => {}
        }
    }
}
