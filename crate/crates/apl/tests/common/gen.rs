//! Seeded generators for fuzzed programs and syntax trees.

use apl_core::{BinOp, Block, Expr, ExprKind, Program, Span, Stmt, StmtKind, UnaryOp};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn rng(seed: u64) -> Gen {
    rand::SeedableRng::seed_from_u64(seed)
}

const NAMES: &[&str] = &["س", "ص", "ع", "عدد", "الاسم", "قائمة", "مجموع_كلي", "n", "item"];
const BUILTINS: &[&str] = &["اطبع", "طول", "المدى", "الى_نص", "الى_عدد"];
const BINOPS: &[BinOp] = &[
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Div,
    BinOp::Mod,
    BinOp::Eq,
    BinOp::NotEq,
    BinOp::Lt,
    BinOp::Gt,
    BinOp::LtEq,
    BinOp::GtEq,
    BinOp::And,
    BinOp::Or,
];

/// Pieces that stress the compiler when they sit inside a literal: keyword
/// spellings, hamza variants, tatweel, digits, separators, comment and
/// statement punctuation, and the two legal escapes.
const STRING_PIECES: &[&str] = &[
    "اطبع", "إذا", "طالما", "أ", "إ", "آ", "ـ", "٣", "۴", "٫", "،", "؛", ";", "#", "{", "}", "(", ")", "=", " ", "\\\"",
    "\\\\", "مرحبا", "ب", "ة", "ى", "ء", "\u{064E}",
];

pub fn arabic_literal(rng: &mut Gen) -> String {
    let len = rng.random_range(0..10);
    let mut s = String::new();
    for _ in 0..len {
        if rng.random_bool(0.5) {
            s.push(char::from_u32(rng.random_range(0x0621..=0x064A)).unwrap());
        } else {
            s.push_str(STRING_PIECES.choose(rng).unwrap());
        }
    }
    s
}

/// A program that assigns and prints random Arabic string literals. Returns
/// the source and the literal bodies as written.
pub fn string_program(rng: &mut Gen) -> (String, Vec<String>) {
    let count = rng.random_range(1..6);
    let mut src = String::new();
    let mut lits = Vec::new();
    for i in 0..count {
        let lit = arabic_literal(rng);
        match rng.random_range(0..3) {
            0 => src.push_str(&format!("نص{i} = \"{lit}\"\nاطبع(نص{i})\n")),
            1 => src.push_str(&format!("اطبع(\"{lit}\")\n")),
            _ => src.push_str(&format!("اذا صحيح {{\n    اطبع(\"{lit}\"، {i})\n}}\n")),
        }
        lits.push(lit);
    }
    (src, lits)
}

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, Span::default())
}

fn s(kind: StmtKind) -> Stmt {
    Stmt { kind, span: Span::default() }
}

fn name(rng: &mut Gen) -> String {
    NAMES.choose(rng).unwrap().to_string()
}

fn leaf(rng: &mut Gen) -> Expr {
    e(match rng.random_range(0..6) {
        0 => ExprKind::Int(rng.random_range(0..100_000u32).to_string()),
        1 => ExprKind::Float(format!("{}.{}", rng.random_range(0..1000u32), rng.random_range(0..100u32))),
        2 => ExprKind::Str(arabic_literal(rng)),
        3 => ExprKind::Bool(rng.random_bool(0.5)),
        4 => ExprKind::None,
        _ => ExprKind::Name(name(rng)),
    })
}

pub fn expr(rng: &mut Gen, depth: u32) -> Expr {
    if depth <= 1 || rng.random_bool(0.3) {
        return leaf(rng);
    }
    let d = depth - 1;
    e(match rng.random_range(0..5) {
        0 => ExprKind::Binary {
            op: *BINOPS.choose(rng).unwrap(),
            lhs: Box::new(expr(rng, d)),
            rhs: Box::new(expr(rng, d)),
        },
        1 => ExprKind::Unary {
            op: if rng.random_bool(0.5) { UnaryOp::Not } else { UnaryOp::Neg },
            operand: Box::new(expr(rng, d)),
        },
        2 => {
            let callee = if rng.random_bool(0.5) { BUILTINS.choose(rng).unwrap().to_string() } else { name(rng) };
            let args = (0..rng.random_range(0..3)).map(|_| expr(rng, d)).collect();
            ExprKind::Call { callee: Box::new(e(ExprKind::Name(callee))), args }
        }
        3 => ExprKind::Index { base: Box::new(expr(rng, d)), index: Box::new(expr(rng, d)) },
        _ => ExprKind::List((0..rng.random_range(0..3)).map(|_| expr(rng, d)).collect()),
    })
}

fn block(rng: &mut Gen, depth: u32) -> Block {
    Block { stmts: (0..rng.random_range(1..3)).map(|_| stmt(rng, depth)).collect(), span: Span::default() }
}

/// A statement whose tree, counting statements and expressions alike, is at
/// most `depth` levels deep.
pub fn stmt(rng: &mut Gen, depth: u32) -> Stmt {
    let d = depth.saturating_sub(1).max(1);
    let compound = depth > 1 && rng.random_bool(0.4);
    if !compound {
        return s(match rng.random_range(0..4) {
            0 => StmtKind::Assign { target: name(rng), value: expr(rng, d) },
            1 => StmtKind::IndexAssign { base: name(rng), index: expr(rng, d), value: expr(rng, d) },
            2 => StmtKind::Expr(expr(rng, d)),
            _ => StmtKind::Return(rng.random_bool(0.5).then(|| expr(rng, d))),
        });
    }
    s(match rng.random_range(0..4) {
        0 => StmtKind::If {
            cond: expr(rng, d),
            then_block: block(rng, d),
            elifs: (0..rng.random_range(0..2)).map(|_| (expr(rng, d), block(rng, d))).collect(),
            else_block: rng.random_bool(0.5).then(|| block(rng, d)),
        },
        1 => StmtKind::While { cond: expr(rng, d), body: block(rng, d) },
        2 => StmtKind::ForEach { var: name(rng), iterable: expr(rng, d), body: block(rng, d) },
        _ => StmtKind::FuncDef {
            name: name(rng),
            params: (0..rng.random_range(0..3)).map(|_| name(rng)).collect(),
            body: block(rng, d),
        },
    })
}

/// Random program of depth at most 4 below the root.
pub fn program(rng: &mut Gen) -> Program {
    Program { body: (0..rng.random_range(1..4)).map(|_| stmt(rng, 4)).collect(), span: Span::default() }
}

pub fn fenced_reply(rng: &mut Gen) -> String {
    let body = ["x = 1\nprint(x)", "print(\"مرحبا\")", "def f(a):\n    return a + 1\nprint(f(2))", "", "```inner```"]
        .choose(rng)
        .unwrap()
        .to_string();
    let tag = ["", "python", "py", "Python3"].choose(rng).unwrap();
    let pad = |rng: &mut Gen| [""," ", "\n", "\n\n", "  \t\n"].choose(rng).unwrap().to_string();
    match rng.random_range(0..5) {
        0 => format!("{}{}{}", pad(rng), body, pad(rng)),
        1 => format!("{}```{tag}\n{body}\n```{}", pad(rng), pad(rng)),
        2 => format!("Here is the code:\n```{tag}\n{body}\n```\n{}", pad(rng)),
        3 => format!("```{tag}\n```{tag}\n{body}\n```\n```"),
        _ => format!("Sure!\n\n```{tag}\n{body}\n```\nLet me know if you need more."),
    }
}
