//! Lowering from the syntax tree to Python 3 source.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use thiserror::Error;

use crate::ast::{needs_parens, prec, BinOp, Block, Expr, ExprKind, Program, Stmt, StmtKind, UnaryOp};
use crate::diagnostic::Diagnostic;
use crate::keywords::{Keyword, KeywordTable};
use crate::romanize::transliterate;
use crate::source::Span;

const INDENT: &str = "    ";

/// Injected when the program calls the file-reading builtin. Only `.txt`
/// files under the working directory can be read.
pub const READ_FILE_PRELUDE: &str = r#"def read_file(path):
    import os
    path = str(path)
    if not path.endswith(".txt"):
        raise ValueError("read_file: only .txt files can be read / يمكن قراءة ملفات .txt فقط: " + path)
    base = os.path.realpath(os.getcwd())
    full = os.path.realpath(os.path.join(base, path))
    if os.path.commonpath([base, full]) != base:
        raise ValueError("read_file: path is outside the working directory / المسار خارج مجلد العمل: " + path)
    with open(full, encoding="utf-8", newline="") as handle:
        return handle.read()
"#;

/// Arabic identifier to ASCII name, in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenameMap {
    entries: Vec<(String, String)>,
    index: BTreeMap<String, usize>,
}

impl RenameMap {
    /// Assigns names to every user identifier in `program`, walking it in
    /// source order.
    pub fn build(program: &Program, table: &KeywordTable) -> RenameMap {
        let mut map = RenameMap::default();
        let mut taken = BTreeSet::new();
        let mut visit = |name: &str| {
            if map.index.contains_key(name) || table.lookup(name).is_some() {
                return;
            }
            let target = transliterate(name, &taken);
            taken.insert(target.clone());
            map.index.insert(name.into(), map.entries.len());
            map.entries.push((name.into(), target));
        };
        for s in &program.body {
            walk_stmt_names(s, &mut visit);
        }
        map
    }

    pub fn get(&self, arabic: &str) -> Option<&str> {
        self.index.get(arabic).map(|&i| self.entries[i].1.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn walk_stmt_names(s: &Stmt, f: &mut impl FnMut(&str)) {
    match &s.kind {
        StmtKind::Assign { target, value } => {
            f(target);
            walk_expr_names(value, f);
        }
        StmtKind::IndexAssign { base, index, value } => {
            f(base);
            walk_expr_names(index, f);
            walk_expr_names(value, f);
        }
        StmtKind::Expr(e) => walk_expr_names(e, f),
        StmtKind::If { cond, then_block, elifs, else_block } => {
            walk_expr_names(cond, f);
            walk_block_names(then_block, f);
            for (c, b) in elifs {
                walk_expr_names(c, f);
                walk_block_names(b, f);
            }
            if let Some(b) = else_block {
                walk_block_names(b, f);
            }
        }
        StmtKind::While { cond, body } => {
            walk_expr_names(cond, f);
            walk_block_names(body, f);
        }
        StmtKind::ForEach { var, iterable, body } => {
            f(var);
            walk_expr_names(iterable, f);
            walk_block_names(body, f);
        }
        StmtKind::FuncDef { name, params, body } => {
            f(name);
            params.iter().for_each(|p| f(p));
            walk_block_names(body, f);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                walk_expr_names(e, f);
            }
        }
    }
}

fn walk_block_names(b: &Block, f: &mut impl FnMut(&str)) {
    b.stmts.iter().for_each(|s| walk_stmt_names(s, f));
}

fn walk_expr_names(e: &Expr, f: &mut impl FnMut(&str)) {
    match &e.kind {
        ExprKind::Call { callee, args } => {
            walk_expr_names(callee, f);
            args.iter().for_each(|a| walk_expr_names(a, f));
        }
        ExprKind::Binary { lhs, rhs, .. } => {
            walk_expr_names(lhs, f);
            walk_expr_names(rhs, f);
        }
        ExprKind::Unary { operand, .. } => walk_expr_names(operand, f),
        ExprKind::Index { base, index } => {
            walk_expr_names(base, f);
            walk_expr_names(index, f);
        }
        ExprKind::List(items) => items.iter().for_each(|i| walk_expr_names(i, f)),
        ExprKind::Name(n) => f(n),
        _ => {}
    }
}

/// Generated Python plus what is needed to relate it back to the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSource {
    pub text: String,
    pub rename_map: RenameMap,
    pub prelude_used: bool,
    pub source_origin: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("{span}: {what} cannot be lowered here")]
    UnsupportedNode { what: &'static str, span: Span },
}

impl EmitError {
    pub fn diagnostic(&self) -> Diagnostic {
        match self {
            EmitError::UnsupportedNode { what, span } => Diagnostic::new(
                "unsupported-node",
                format!("{what} cannot be translated at this position"),
                format!("لا يمكن ترجمة {what} في هذا الموضع"),
                Some(*span),
            ),
        }
    }
}

/// Lowers a checked program. `origin` names the input in the header comment.
pub fn emit(program: &Program, table: &KeywordTable, origin: &str) -> Result<TargetSource, EmitError> {
    let rename_map = RenameMap::build(program, table);
    let mut e = Emitter { table, names: &rename_map, out: String::new(), uses_read_file: core::cell::Cell::new(false) };
    for s in &program.body {
        e.stmt(s, 0, false)?;
    }
    let body = e.out;
    let prelude_used = e.uses_read_file.get();

    let mut text = String::new();
    let origin_line: String = origin.chars().map(|c| if c.is_control() { ' ' } else { c }).collect();
    let _ = writeln!(text, "# Generated by apl from {origin_line}");
    for (arabic, target) in rename_map.entries() {
        let _ = writeln!(text, "# {target} := {arabic}");
    }
    if prelude_used {
        text.push('\n');
        text.push_str(READ_FILE_PRELUDE);
        text.push('\n');
    }
    text.push_str(&body);

    Ok(TargetSource { text, rename_map, prelude_used, source_origin: origin.into() })
}

struct Emitter<'a> {
    table: &'a KeywordTable,
    names: &'a RenameMap,
    out: String,
    uses_read_file: core::cell::Cell<bool>,
}

impl Emitter<'_> {
    fn kw(&self, k: Keyword) -> &str {
        self.table.target(k).unwrap_or("")
    }

    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn block(&mut self, b: &Block, depth: usize, in_function: bool) -> Result<(), EmitError> {
        for s in &b.stmts {
            self.stmt(s, depth, in_function)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt, depth: usize, in_function: bool) -> Result<(), EmitError> {
        match &s.kind {
            StmtKind::Assign { target, value } => {
                let l = format!("{} = {}", self.name(target), self.expr(value));
                self.line(depth, &l);
            }
            StmtKind::IndexAssign { base, index, value } => {
                let l = format!("{}[{}] = {}", self.name(base), self.expr(index), self.expr(value));
                self.line(depth, &l);
            }
            StmtKind::Expr(e) => {
                let l = self.expr(e);
                self.line(depth, &l);
            }
            StmtKind::If { cond, then_block, elifs, else_block } => {
                let l = format!("{} {}:", self.kw(Keyword::If), self.expr(cond));
                self.line(depth, &l);
                self.block(then_block, depth + 1, in_function)?;
                for (c, b) in elifs {
                    let l = format!("{} {}:", self.kw(Keyword::Elif), self.expr(c));
                    self.line(depth, &l);
                    self.block(b, depth + 1, in_function)?;
                }
                if let Some(b) = else_block {
                    let l = format!("{}:", self.kw(Keyword::Else));
                    self.line(depth, &l);
                    self.block(b, depth + 1, in_function)?;
                }
            }
            StmtKind::While { cond, body } => {
                let l = format!("{} {}:", self.kw(Keyword::While), self.expr(cond));
                self.line(depth, &l);
                self.block(body, depth + 1, in_function)?;
            }
            StmtKind::ForEach { var, iterable, body } => {
                let l = format!(
                    "{} {} {} {}:",
                    self.kw(Keyword::For),
                    self.name(var),
                    self.kw(Keyword::In),
                    self.expr(iterable)
                );
                self.line(depth, &l);
                self.block(body, depth + 1, in_function)?;
            }
            StmtKind::FuncDef { name, params, body } => {
                let params: Vec<&str> = params.iter().map(|p| self.name(p)).collect();
                let l = format!("{} {}({}):", self.kw(Keyword::Def), self.name(name), params.join(", "));
                self.line(depth, &l);
                self.block(body, depth + 1, true)?;
            }
            StmtKind::Return(value) => {
                if !in_function {
                    return Err(EmitError::UnsupportedNode { what: "return", span: s.span });
                }
                let l = match value {
                    Some(v) => format!("{} {}", self.kw(Keyword::Return), self.expr(v)),
                    None => String::from(self.kw(Keyword::Return)),
                };
                self.line(depth, &l);
            }
        }
        Ok(())
    }

    fn name<'s>(&'s self, n: &'s str) -> &'s str {
        self.names.get(n).unwrap_or(n)
    }

    fn wrapped(&self, e: &Expr, parens: bool) -> String {
        let inner = self.expr(e);
        if parens {
            format!("({inner})")
        } else {
            inner
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match &e.kind {
            ExprKind::Int(digits) => {
                let trimmed = digits.trim_start_matches('0');
                String::from(if trimmed.is_empty() { "0" } else { trimmed })
            }
            ExprKind::Float(v) => v.clone(),
            ExprKind::Str(raw) => format!("\"{raw}\""),
            ExprKind::Bool(true) => self.kw(Keyword::True).into(),
            ExprKind::Bool(false) => self.kw(Keyword::False).into(),
            ExprKind::None => self.kw(Keyword::None).into(),
            ExprKind::Name(n) => match self.table.lookup(n) {
                Some(entry) => {
                    if entry.keyword == Keyword::ReadFile {
                        self.uses_read_file.set(true);
                    }
                    entry.target.clone()
                }
                None => self.name(n).into(),
            },
            ExprKind::List(items) => {
                let items: Vec<String> = items.iter().map(|i| self.expr(i)).collect();
                format!("[{}]", items.join(", "))
            }
            ExprKind::Call { callee, args } => {
                let callee = self.wrapped(callee, callee.precedence() < prec::POSTFIX);
                let args: Vec<String> = args.iter().map(|a| self.expr(a)).collect();
                format!("{callee}({})", args.join(", "))
            }
            ExprKind::Index { base, index } => {
                let base = self.wrapped(base, base.precedence() < prec::POSTFIX);
                format!("{base}[{}]", self.expr(index))
            }
            ExprKind::Unary { op: UnaryOp::Neg, operand } => {
                let inner = self.wrapped(operand, operand.precedence() < prec::UNARY);
                format!("-{inner}")
            }
            ExprKind::Unary { op: UnaryOp::Not, operand } => {
                let inner = self.wrapped(operand, operand.precedence() < prec::NOT);
                format!("{} {inner}", self.kw(Keyword::Not))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.wrapped(lhs, needs_parens(*op, lhs, false));
                let r = self.wrapped(rhs, needs_parens(*op, rhs, true));
                let sym = match op {
                    BinOp::And => self.kw(Keyword::And),
                    BinOp::Or => self.kw(Keyword::Or),
                    other => other.symbol().unwrap_or(""),
                };
                format!("{l} {sym} {r}")
            }
        }
    }
}
