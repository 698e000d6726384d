use apl_core::pretty::print_program;
use apl_core::source::Span;
use apl_core::{parse_with, tokenize, BinOp, Block, Expr, ExprKind, KeywordTable, Program, SourceFile, Stmt, StmtKind, UnaryOp};
use proptest::prelude::*;

const NAMES: &[&str] = &["س", "ص", "عدد", "الاسم", "قائمة", "مجموع_كلي", "x", "total"];
const BUILTINS: &[&str] = &["اطبع", "طول", "المدى", "الى_نص"];
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

fn e(kind: ExprKind) -> Expr {
    Expr::new(kind, Span::default())
}

fn s(kind: StmtKind) -> Stmt {
    Stmt { kind, span: Span::default() }
}

fn name() -> impl Strategy<Value = String> {
    proptest::sample::select(NAMES).prop_map(String::from)
}

fn callee() -> impl Strategy<Value = String> {
    prop_oneof![name(), proptest::sample::select(BUILTINS).prop_map(String::from)]
}

fn string_body() -> impl Strategy<Value = String> {
    proptest::collection::vec(
        prop_oneof![
            proptest::sample::select(&["مرحبا", " ", "،", "ـ", "أ", "؛", ";", "#", "{", "}", "\\\"", "\\\\", "١٢"][..])
                .prop_map(String::from),
            "[a-z0-9 ]{1,3}",
        ],
        0..5,
    )
    .prop_map(|parts| parts.concat())
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..10_000).prop_map(|n| e(ExprKind::Int(n.to_string()))),
        (0u32..100, 0u32..100).prop_map(|(a, b)| e(ExprKind::Float(format!("{a}.{b}")))),
        string_body().prop_map(|t| e(ExprKind::Str(t))),
        any::<bool>().prop_map(|b| e(ExprKind::Bool(b))),
        Just(e(ExprKind::None)),
        name().prop_map(|n| e(ExprKind::Name(n))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (proptest::sample::select(BINOPS), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| e(ExprKind::Binary { op, lhs: Box::new(l), rhs: Box::new(r) })),
            (prop_oneof![Just(UnaryOp::Not), Just(UnaryOp::Neg)], inner.clone())
                .prop_map(|(op, x)| e(ExprKind::Unary { op, operand: Box::new(x) })),
            (callee(), proptest::collection::vec(inner.clone(), 0..3)).prop_map(|(n, args)| e(ExprKind::Call {
                callee: Box::new(e(ExprKind::Name(n))),
                args
            })),
            (inner.clone(), inner.clone())
                .prop_map(|(b, i)| e(ExprKind::Index { base: Box::new(b), index: Box::new(i) })),
            proptest::collection::vec(inner, 0..3).prop_map(|items| e(ExprKind::List(items))),
        ]
    })
}

fn block(inner: BoxedStrategy<Stmt>) -> impl Strategy<Value = Block> {
    proptest::collection::vec(inner, 1..3).prop_map(|stmts| Block { stmts, span: Span::default() })
}

fn simple_stmt() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        (name(), expr()).prop_map(|(target, value)| s(StmtKind::Assign { target, value })),
        (name(), expr(), expr()).prop_map(|(base, index, value)| s(StmtKind::IndexAssign { base, index, value })),
        expr().prop_map(|x| s(StmtKind::Expr(x))),
        proptest::option::of(expr()).prop_map(|x| s(StmtKind::Return(x))),
    ]
}

fn stmt() -> impl Strategy<Value = Stmt> {
    simple_stmt().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (expr(), block(inner.clone()), proptest::collection::vec((expr(), block(inner.clone())), 0..2),
                proptest::option::of(block(inner.clone())))
                .prop_map(|(cond, then_block, elifs, else_block)| s(StmtKind::If { cond, then_block, elifs, else_block })),
            (expr(), block(inner.clone())).prop_map(|(cond, body)| s(StmtKind::While { cond, body })),
            (name(), expr(), block(inner.clone()))
                .prop_map(|(var, iterable, body)| s(StmtKind::ForEach { var, iterable, body })),
            (name(), proptest::collection::vec(name(), 0..3), block(inner))
                .prop_map(|(name, params, body)| s(StmtKind::FuncDef { name, params, body })),
        ]
    })
}

fn reparse(text: &str, table: &KeywordTable) -> Program {
    let src = SourceFile::new(text, "rt.apl").normalized();
    let tokens = tokenize(&src, table).unwrap_or_else(|err| panic!("lex failed: {err:?}\n{text}"));
    parse_with(&tokens, table).unwrap_or_else(|err| panic!("parse failed: {err:?}\n{text}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_programs_parse_back(body in proptest::collection::vec(stmt(), 0..4)) {
        let table = KeywordTable::standard();
        let ast = Program { body, span: Span::default() };
        let text = print_program(&ast, &table);
        let back = reparse(&text, &table);
        prop_assert!(back.structurally_eq(&ast), "round trip changed the tree:\n{text}");
    }

    #[test]
    fn printing_is_stable(body in proptest::collection::vec(stmt(), 1..4)) {
        let table = KeywordTable::standard();
        let text = print_program(&Program { body, span: Span::default() }, &table);
        prop_assert_eq!(print_program(&reparse(&text, &table), &table), text);
    }
}

#[test]
fn corpus_sources_reach_a_fixed_point() {
    let table = KeywordTable::standard();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../apl/tests/corpus");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "apl") {
            let text = std::fs::read_to_string(&path).unwrap();
            let once = print_program(&reparse(&text, &table), &table);
            let twice = print_program(&reparse(&once, &table), &table);
            assert_eq!(once, twice, "{}", path.display());
            assert!(reparse(&once, &table).structurally_eq(&reparse(&text, &table)));
            seen += 1;
        }
    }
    assert_eq!(seen, 7);
}
