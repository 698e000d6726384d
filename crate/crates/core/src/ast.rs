//! Syntax tree for APL programs.
//!
//! Names are kept exactly as they appear in normalized source, including the
//! Arabic forms of builtin functions (`اطبع`, `طول`, ...). Lowering to target
//! names is the code generator's job.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::source::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub body: Vec<Stmt>,
    pub span: Span,
}

/// A brace-delimited statement list. Never empty when produced by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Assign { target: String, value: Expr },
    IndexAssign { base: String, index: Expr, value: Expr },
    Expr(Expr),
    If { cond: Expr, then_block: Block, elifs: Vec<(Expr, Block)>, else_block: Option<Block> },
    While { cond: Expr, body: Block },
    ForEach { var: String, iterable: Expr, body: Block },
    FuncDef { name: String, params: Vec<String>, body: Block },
    Return(Option<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Call { callee: Box<Expr>, args: Vec<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Unary { op: UnaryOp, operand: Box<Expr> },
    Index { base: Box<Expr>, index: Box<Expr> },
    List(Vec<Expr>),
    /// ASCII digits.
    Int(String),
    /// ASCII digits with one `.`.
    Float(String),
    /// Literal inner text as written, escapes included.
    Str(String),
    Bool(bool),
    None,
    Name(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    NotEq,
    Lt,
    Gt,
    LtEq,
    GtEq,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

/// Binding strength, shared by the parser and both printers. Higher binds
/// tighter.
pub mod prec {
    pub const OR: u8 = 1;
    pub const AND: u8 = 2;
    pub const NOT: u8 = 3;
    pub const COMPARISON: u8 = 4;
    pub const ADDITIVE: u8 = 5;
    pub const MULTIPLICATIVE: u8 = 6;
    pub const UNARY: u8 = 7;
    pub const POSTFIX: u8 = 8;
    pub const ATOM: u8 = 9;
}

impl BinOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => prec::OR,
            BinOp::And => prec::AND,
            BinOp::Eq | BinOp::NotEq | BinOp::Lt | BinOp::Gt | BinOp::LtEq | BinOp::GtEq => prec::COMPARISON,
            BinOp::Add | BinOp::Sub => prec::ADDITIVE,
            BinOp::Mul | BinOp::Div | BinOp::Mod => prec::MULTIPLICATIVE,
        }
    }

    /// Symbol for operators that are spelled the same in both languages.
    pub fn symbol(self) -> Option<&'static str> {
        Some(match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::NotEq => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::LtEq => "<=",
            BinOp::GtEq => ">=",
            BinOp::And | BinOp::Or => return None,
        })
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Unary { op: UnaryOp::Not, .. } => prec::NOT,
            ExprKind::Unary { op: UnaryOp::Neg, .. } => prec::UNARY,
            ExprKind::Call { .. } | ExprKind::Index { .. } => prec::POSTFIX,
            _ => prec::ATOM,
        }
    }

    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Call { callee, args } => {
                callee.erase_spans();
                args.iter_mut().for_each(Expr::erase_spans);
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.erase_spans();
                rhs.erase_spans();
            }
            ExprKind::Unary { operand, .. } => operand.erase_spans(),
            ExprKind::Index { base, index } => {
                base.erase_spans();
                index.erase_spans();
            }
            ExprKind::List(items) => items.iter_mut().for_each(Expr::erase_spans),
            _ => {}
        }
    }
}

/// Whether a child of a binary operator must be parenthesized to keep the
/// tree shape when printed. Binary operators associate to the left;
/// comparisons never chain.
pub fn needs_parens(parent: BinOp, child: &Expr, right_side: bool) -> bool {
    let p = parent.precedence();
    let c = child.precedence();
    c < p || (c == p && right_side) || (p == prec::COMPARISON && c == prec::COMPARISON)
}

impl Block {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        self.stmts.iter_mut().for_each(Stmt::erase_spans);
    }
}

impl Stmt {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StmtKind::Assign { value, .. } => value.erase_spans(),
            StmtKind::IndexAssign { index, value, .. } => {
                index.erase_spans();
                value.erase_spans();
            }
            StmtKind::Expr(e) => e.erase_spans(),
            StmtKind::If { cond, then_block, elifs, else_block } => {
                cond.erase_spans();
                then_block.erase_spans();
                for (c, b) in elifs {
                    c.erase_spans();
                    b.erase_spans();
                }
                if let Some(b) = else_block {
                    b.erase_spans();
                }
            }
            StmtKind::While { cond, body } => {
                cond.erase_spans();
                body.erase_spans();
            }
            StmtKind::ForEach { iterable, body, .. } => {
                iterable.erase_spans();
                body.erase_spans();
            }
            StmtKind::FuncDef { body, .. } => body.erase_spans(),
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    e.erase_spans();
                }
            }
        }
    }

    /// Child blocks in source order.
    pub fn blocks(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::If { then_block, elifs, else_block, .. } => {
                let mut v = alloc::vec![then_block];
                v.extend(elifs.iter().map(|(_, b)| b));
                v.extend(else_block.iter());
                v
            }
            StmtKind::While { body, .. } | StmtKind::ForEach { body, .. } | StmtKind::FuncDef { body, .. } => alloc::vec![body],
            _ => Vec::new(),
        }
    }
}

impl Program {
    /// A copy with every span reset, for comparing tree shape only.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.span = Span::default();
        p.body.iter_mut().for_each(Stmt::erase_spans);
        p
    }

    /// True when both programs have the same shape and contents, ignoring
    /// source positions.
    pub fn structurally_eq(&self, other: &Program) -> bool {
        self.without_spans() == other.without_spans()
    }
}
