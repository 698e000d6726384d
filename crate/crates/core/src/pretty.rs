//! Canonical APL text for a syntax tree. Parsing the output gives back a
//! structurally equal tree.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{needs_parens, prec, BinOp, Block, Expr, ExprKind, Program, Stmt, StmtKind, UnaryOp};
use crate::keywords::{Keyword, KeywordTable};

pub fn print_program(program: &Program, table: &KeywordTable) -> String {
    let p = Printer { table };
    let mut out = String::new();
    for s in &program.body {
        p.stmt(s, 0, &mut out);
    }
    out
}

pub fn print_expr(e: &Expr, table: &KeywordTable) -> String {
    Printer { table }.expr(e)
}

struct Printer<'a> {
    table: &'a KeywordTable,
}

impl Printer<'_> {
    fn kw(&self, k: Keyword) -> &str {
        self.table.arabic(k).unwrap_or("?")
    }

    fn indent(depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("    ");
        }
    }

    fn header(&self, depth: usize, text: &str, block: &Block, out: &mut String) {
        Self::indent(depth, out);
        out.push_str(text);
        out.push_str(" {\n");
        for s in &block.stmts {
            self.stmt(s, depth + 1, out);
        }
        Self::indent(depth, out);
        out.push_str("}\n");
    }

    fn stmt(&self, s: &Stmt, depth: usize, out: &mut String) {
        let simple = match &s.kind {
            StmtKind::Assign { target, value } => format!("{target} = {}", self.expr(value)),
            StmtKind::IndexAssign { base, index, value } => format!("{base}[{}] = {}", self.expr(index), self.expr(value)),
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::Return(None) => self.kw(Keyword::Return).into(),
            StmtKind::Return(Some(e)) => format!("{} {}", self.kw(Keyword::Return), self.expr(e)),
            StmtKind::If { cond, then_block, elifs, else_block } => {
                self.header(depth, &format!("{} {}", self.kw(Keyword::If), self.expr(cond)), then_block, out);
                for (c, b) in elifs {
                    self.header(depth, &format!("{} {}", self.kw(Keyword::Elif), self.expr(c)), b, out);
                }
                if let Some(b) = else_block {
                    self.header(depth, self.kw(Keyword::Else), b, out);
                }
                return;
            }
            StmtKind::While { cond, body } => {
                return self.header(depth, &format!("{} {}", self.kw(Keyword::While), self.expr(cond)), body, out);
            }
            StmtKind::ForEach { var, iterable, body } => {
                let h = format!("{} {var} {} {}", self.kw(Keyword::For), self.kw(Keyword::In), self.expr(iterable));
                return self.header(depth, &h, body, out);
            }
            StmtKind::FuncDef { name, params, body } => {
                let h = format!("{} {name}({})", self.kw(Keyword::Def), params.join("، "));
                return self.header(depth, &h, body, out);
            }
        };
        Self::indent(depth, out);
        out.push_str(&simple);
        out.push('\n');
    }

    fn wrapped(&self, e: &Expr, parens: bool) -> String {
        if parens {
            format!("({})", self.expr(e))
        } else {
            self.expr(e)
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match &e.kind {
            ExprKind::Int(v) | ExprKind::Float(v) => v.clone(),
            ExprKind::Str(raw) => format!("\"{raw}\""),
            ExprKind::Bool(true) => self.kw(Keyword::True).into(),
            ExprKind::Bool(false) => self.kw(Keyword::False).into(),
            ExprKind::None => self.kw(Keyword::None).into(),
            ExprKind::Name(n) => n.clone(),
            ExprKind::List(items) => {
                let items: Vec<String> = items.iter().map(|i| self.expr(i)).collect();
                format!("[{}]", items.join("، "))
            }
            ExprKind::Call { callee, args } => {
                let args: Vec<String> = args.iter().map(|a| self.expr(a)).collect();
                format!("{}({})", self.wrapped(callee, callee.precedence() < prec::POSTFIX), args.join("، "))
            }
            ExprKind::Index { base, index } => {
                format!("{}[{}]", self.wrapped(base, base.precedence() < prec::POSTFIX), self.expr(index))
            }
            ExprKind::Unary { op: UnaryOp::Neg, operand } => {
                format!("-{}", self.wrapped(operand, operand.precedence() < prec::UNARY))
            }
            ExprKind::Unary { op: UnaryOp::Not, operand } => {
                format!("{} {}", self.kw(Keyword::Not), self.wrapped(operand, operand.precedence() < prec::NOT))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let sym = match op {
                    BinOp::And => self.kw(Keyword::And),
                    BinOp::Or => self.kw(Keyword::Or),
                    other => other.symbol().unwrap_or("?"),
                };
                format!(
                    "{} {sym} {}",
                    self.wrapped(lhs, needs_parens(*op, lhs, false)),
                    self.wrapped(rhs, needs_parens(*op, rhs, true))
                )
            }
        }
    }
}
