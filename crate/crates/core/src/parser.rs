//! Recursive-descent parser.
//!
//! ```text
//! program := (stmt NEWLINE)* EOF
//! stmt    := assign | if | while | foreach | funcdef | return | exprstmt
//! assign  := (NAME | NAME '[' expr ']') '=' expr
//! if      := IF expr block (NEWLINE ELIF expr block)* (NEWLINE ELSE block)?
//! while   := WHILE expr block
//! foreach := FOR NAME IN expr block
//! funcdef := FUNC NAME '(' params? ')' block
//! return  := RETURN expr?
//! block   := '{' NEWLINE (stmt NEWLINE)+ '}'
//! ```
//!
//! `elif` and `else` headers start on the line after the closing brace of
//! the previous branch. Parsing stops at the first error.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{BinOp, Block, Expr, ExprKind, Program, Stmt, StmtKind, UnaryOp};
use crate::diagnostic::Diagnostic;
use crate::keywords::{Keyword, KeywordTable};
use crate::lexer::{Op, Token, TokenClass, TokenKind};
use crate::source::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message_en: String,
    pub message_ar: String,
    pub span: Span,
    pub expected: Vec<TokenClass>,
    pub found: TokenClass,
}

impl ParseError {
    pub fn diagnostic(&self) -> Diagnostic {
        Diagnostic::new("parse", self.message_en.clone(), self.message_ar.clone(), Some(self.span))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message_en)
    }
}

impl core::error::Error for ParseError {}

/// Parses with the standard keyword table (used only to phrase errors).
pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    parse_with(tokens, &KeywordTable::standard())
}

pub fn parse_with(tokens: &[Token], table: &KeywordTable) -> Result<Program, ParseError> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    let mut p = Parser { tokens, pos: 0, table };
    let mut body = Vec::new();
    while !p.at(&TokenKind::Eof) {
        body.push(p.statement()?);
        p.expect_newline()?;
    }
    let span = match (body.first(), body.last()) {
        (Some(a), Some(b)) => a.span.to(b.span),
        _ => tokens[0].span,
    };
    Ok(Program { body, span })
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    table: &'a KeywordTable,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &'a Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek().kind == TokenKind::Keyword(kw)
    }

    fn advance(&mut self) -> &'a Token {
        let t = self.peek();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error(&self, expected: Vec<TokenClass>) -> ParseError {
        let tok = self.peek();
        let found = tok.kind.class();
        let (found_en, found_ar) = found.describe(self.table);
        let (exp_en, exp_ar): (Vec<_>, Vec<_>) = expected.iter().map(|c| c.describe(self.table)).unzip();
        ParseError {
            message_en: format!("expected {}, found {found_en}", exp_en.join(" or ")),
            message_ar: format!("كان المتوقع {}، لكن وُجد {found_ar}", exp_ar.join(" أو ")),
            span: tok.span,
            expected,
            found,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'a Token> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            Err(self.error(vec![kind.class()]))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        if self.at(&TokenKind::Newline) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(vec![TokenClass::Newline]))
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match &self.peek().kind {
            TokenKind::Identifier(name) => {
                let span = self.advance().span;
                Ok((name.clone(), span))
            }
            _ => Err(self.error(vec![TokenClass::Identifier])),
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.peek().span;
        match self.peek().kind {
            TokenKind::Keyword(Keyword::If) => self.if_stmt(),
            TokenKind::Keyword(Keyword::While) => {
                self.advance();
                let cond = self.expr()?;
                let body = self.block()?;
                Ok(Stmt { span: start.to(body.span), kind: StmtKind::While { cond, body } })
            }
            TokenKind::Keyword(Keyword::For) => {
                self.advance();
                let (var, _) = self.expect_ident()?;
                self.expect(TokenKind::Keyword(Keyword::In))?;
                let iterable = self.expr()?;
                let body = self.block()?;
                Ok(Stmt { span: start.to(body.span), kind: StmtKind::ForEach { var, iterable, body } })
            }
            TokenKind::Keyword(Keyword::Def) => {
                self.advance();
                let (name, _) = self.expect_ident()?;
                self.expect(TokenKind::LParen)?;
                let mut params = Vec::new();
                if !self.at(&TokenKind::RParen) {
                    loop {
                        params.push(self.expect_ident()?.0);
                        if self.at(&TokenKind::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(TokenKind::RParen)?;
                let body = self.block()?;
                Ok(Stmt { span: start.to(body.span), kind: StmtKind::FuncDef { name, params, body } })
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.advance();
                if self.at(&TokenKind::Newline) {
                    return Ok(Stmt { span: start, kind: StmtKind::Return(None) });
                }
                let value = self.expr()?;
                Ok(Stmt { span: start.to(value.span), kind: StmtKind::Return(Some(value)) })
            }
            _ => self.simple_stmt(),
        }
    }

    fn simple_stmt(&mut self) -> PResult<Stmt> {
        if !self.starts_expr() {
            return Err(self.error(vec![TokenClass::Statement]));
        }
        let lhs = self.expr()?;
        if !self.at(&TokenKind::Operator(Op::Assign)) {
            return Ok(Stmt { span: lhs.span, kind: StmtKind::Expr(lhs) });
        }
        let eq_pos = self.pos;
        self.advance();
        let value = self.expr()?;
        let span = lhs.span.to(value.span);
        let kind = match lhs.kind {
            ExprKind::Name(target) => StmtKind::Assign { target, value },
            ExprKind::Index { base, index } if matches!(base.kind, ExprKind::Name(_)) => {
                let ExprKind::Name(base) = base.kind else { unreachable!() };
                StmtKind::IndexAssign { base, index: *index, value }
            }
            _ => {
                let tok = &self.tokens[eq_pos];
                return Err(ParseError {
                    message_en: "invalid assignment target: assign to a name or to name[index]".into(),
                    message_ar: "هدف إسناد غير صالح: أسند إلى اسم أو إلى اسم[فهرس]".into(),
                    span: tok.span,
                    expected: vec![TokenClass::Newline],
                    found: tok.kind.class(),
                });
            }
        };
        Ok(Stmt { span, kind })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.advance().span;
        let cond = self.expr()?;
        let then_block = self.block()?;
        let mut end = then_block.span;
        let mut elifs = Vec::new();
        let mut else_block = None;
        loop {
            let next = &self.peek_at(1).kind;
            if !self.at(&TokenKind::Newline) {
                break;
            }
            if *next == TokenKind::Keyword(Keyword::Elif) {
                self.advance();
                self.advance();
                let c = self.expr()?;
                let b = self.block()?;
                end = b.span;
                elifs.push((c, b));
            } else if *next == TokenKind::Keyword(Keyword::Else) {
                self.advance();
                self.advance();
                let b = self.block()?;
                end = b.span;
                else_block = Some(b);
                break;
            } else {
                break;
            }
        }
        Ok(Stmt { span: start.to(end), kind: StmtKind::If { cond, then_block, elifs, else_block } })
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect(TokenKind::LBrace)?.span;
        self.expect_newline()?;
        if self.at(&TokenKind::RBrace) {
            let tok = self.peek();
            return Err(ParseError {
                message_en: "empty block: a block needs at least one statement".into(),
                message_ar: "كتلة فارغة: يجب أن تحتوي الكتلة على تعليمة واحدة على الأقل".into(),
                span: tok.span,
                expected: vec![TokenClass::Statement],
                found: TokenClass::RBrace,
            });
        }
        let mut stmts = Vec::new();
        loop {
            if self.at(&TokenKind::Eof) {
                return Err(self.error(vec![TokenClass::RBrace]));
            }
            stmts.push(self.statement()?);
            self.expect_newline()?;
            if self.at(&TokenKind::RBrace) {
                let close = self.advance().span;
                return Ok(Block { stmts, span: open.to(close) });
            }
        }
    }

    fn starts_expr(&self) -> bool {
        match &self.peek().kind {
            TokenKind::Identifier(_)
            | TokenKind::IntLit(_)
            | TokenKind::FloatLit(_)
            | TokenKind::StringLit(_)
            | TokenKind::LParen
            | TokenKind::LBracket
            | TokenKind::Operator(Op::Minus) => true,
            TokenKind::Keyword(k) => {
                k.is_builtin() || matches!(k, Keyword::True | Keyword::False | Keyword::None | Keyword::Not)
            }
            _ => false,
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn binary_level(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        op_of: fn(&TokenKind) -> Option<BinOp>,
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        while let Some(op) = op_of(&self.peek().kind) {
            self.advance();
            let rhs = next(self)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.binary_level(Self::and_expr, |k| (*k == TokenKind::Keyword(Keyword::Or)).then_some(BinOp::Or))
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.binary_level(Self::not_expr, |k| (*k == TokenKind::Keyword(Keyword::And)).then_some(BinOp::And))
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.at_keyword(Keyword::Not) {
            let start = self.advance().span;
            let operand = self.not_expr()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(operand) }, span));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        self.binary_level(Self::additive, |k| match k {
            TokenKind::Operator(Op::Eq) => Some(BinOp::Eq),
            TokenKind::Operator(Op::NotEq) => Some(BinOp::NotEq),
            TokenKind::Operator(Op::Lt) => Some(BinOp::Lt),
            TokenKind::Operator(Op::Gt) => Some(BinOp::Gt),
            TokenKind::Operator(Op::LtEq) => Some(BinOp::LtEq),
            TokenKind::Operator(Op::GtEq) => Some(BinOp::GtEq),
            _ => None,
        })
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.binary_level(Self::multiplicative, |k| match k {
            TokenKind::Operator(Op::Plus) => Some(BinOp::Add),
            TokenKind::Operator(Op::Minus) => Some(BinOp::Sub),
            _ => None,
        })
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        self.binary_level(Self::unary, |k| match k {
            TokenKind::Operator(Op::Star) => Some(BinOp::Mul),
            TokenKind::Operator(Op::Slash) => Some(BinOp::Div),
            TokenKind::Operator(Op::Percent) => Some(BinOp::Mod),
            _ => None,
        })
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Operator(Op::Minus)) {
            let start = self.advance().span;
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(operand) }, span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.at(&TokenKind::LParen) {
                self.advance();
                let args = self.comma_list(TokenKind::RParen)?;
                let span = e.span.to(self.prev_span());
                e = Expr::new(ExprKind::Call { callee: Box::new(e), args }, span);
            } else if self.at(&TokenKind::LBracket) {
                self.advance();
                let index = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                let span = e.span.to(self.prev_span());
                e = Expr::new(ExprKind::Index { base: Box::new(e), index: Box::new(index) }, span);
            } else {
                return Ok(e);
            }
        }
    }

    /// Comma-separated expressions up to and including `close`.
    fn comma_list(&mut self, close: TokenKind) -> PResult<Vec<Expr>> {
        let mut items = Vec::new();
        if self.at(&close) {
            self.advance();
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.at(&TokenKind::Comma) {
                self.advance();
            } else if self.at(&close) {
                self.advance();
                return Ok(items);
            } else {
                return Err(self.error(vec![TokenClass::Comma, close.class()]));
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek();
        let kind = match &tok.kind {
            TokenKind::IntLit(v) => ExprKind::Int(v.clone()),
            TokenKind::FloatLit(v) => ExprKind::Float(v.clone()),
            TokenKind::StringLit(v) => ExprKind::Str(v.clone()),
            TokenKind::Identifier(name) => ExprKind::Name(name.clone()),
            TokenKind::Keyword(Keyword::True) => ExprKind::Bool(true),
            TokenKind::Keyword(Keyword::False) => ExprKind::Bool(false),
            TokenKind::Keyword(Keyword::None) => ExprKind::None,
            TokenKind::Keyword(k) if k.is_builtin() => ExprKind::Name(tok.lexeme.clone()),
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            TokenKind::LBracket => {
                let start = self.advance().span;
                let items = self.comma_list(TokenKind::RBracket)?;
                return Ok(Expr::new(ExprKind::List(items), start.to(self.prev_span())));
            }
            _ => return Err(self.error(vec![TokenClass::Expression])),
        };
        self.advance();
        Ok(Expr::new(kind, tok.span))
    }
}
