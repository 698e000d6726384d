use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use thiserror::Error;

use crate::diagnostic::Diagnostic;
use crate::keywords::{Keyword, KeywordTable};
use crate::normalize::{digit_value, fold_digits, is_decimal_separator};
use crate::source::{SourceFile, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eq,
    NotEq,
    Lt,
    Gt,
    LtEq,
    GtEq,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Assign => "=",
            Op::Plus => "+",
            Op::Minus => "-",
            Op::Star => "*",
            Op::Slash => "/",
            Op::Percent => "%",
            Op::Eq => "==",
            Op::NotEq => "!=",
            Op::Lt => "<",
            Op::Gt => ">",
            Op::LtEq => "<=",
            Op::GtEq => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Identifier(String),
    /// ASCII digits after folding.
    IntLit(String),
    /// ASCII digits with a `.` separator after folding.
    FloatLit(String),
    /// Inner content, exactly as written between the quotes.
    StringLit(String),
    Operator(Op),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Newline,
    Eof,
}

/// Payload-free token category, used in "expected ..." diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Keyword(Keyword),
    Identifier,
    Number,
    String,
    Operator(Op),
    Expression,
    Statement,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Newline,
    Eof,
}

impl TokenKind {
    pub fn class(&self) -> TokenClass {
        match self {
            TokenKind::Keyword(k) => TokenClass::Keyword(*k),
            TokenKind::Identifier(_) => TokenClass::Identifier,
            TokenKind::IntLit(_) | TokenKind::FloatLit(_) => TokenClass::Number,
            TokenKind::StringLit(_) => TokenClass::String,
            TokenKind::Operator(op) => TokenClass::Operator(*op),
            TokenKind::LBrace => TokenClass::LBrace,
            TokenKind::RBrace => TokenClass::RBrace,
            TokenKind::LParen => TokenClass::LParen,
            TokenKind::RParen => TokenClass::RParen,
            TokenKind::LBracket => TokenClass::LBracket,
            TokenKind::RBracket => TokenClass::RBracket,
            TokenKind::Comma => TokenClass::Comma,
            TokenKind::Newline => TokenClass::Newline,
            TokenKind::Eof => TokenClass::Eof,
        }
    }
}

impl TokenClass {
    /// English and Arabic descriptions. Keywords are described by their
    /// Arabic surface form when a table is supplied.
    pub fn describe(self, table: &KeywordTable) -> (String, String) {
        let (en, ar): (&str, &str) = match self {
            TokenClass::Keyword(k) => {
                let form = table.arabic(k).unwrap_or("?");
                return (format!("keyword '{form}'"), format!("الكلمة المحجوزة '{form}'"));
            }
            TokenClass::Operator(op) => {
                let s = op.symbol();
                return (format!("'{s}'"), format!("'{s}'"));
            }
            TokenClass::Identifier => ("a name", "اسم"),
            TokenClass::Number => ("a number", "رقم"),
            TokenClass::String => ("a string", "نص"),
            TokenClass::Expression => ("an expression", "تعبير"),
            TokenClass::Statement => ("a statement", "تعليمة"),
            TokenClass::LBrace => ("'{'", "'{'"),
            TokenClass::RBrace => ("'}'", "'}'"),
            TokenClass::LParen => ("'('", "'('"),
            TokenClass::RParen => ("')'", "')'"),
            TokenClass::LBracket => ("'['", "'['"),
            TokenClass::RBracket => ("']'", "']'"),
            TokenClass::Comma => ("','", "'،'"),
            TokenClass::Newline => ("end of line", "نهاية السطر"),
            TokenClass::Eof => ("end of file", "نهاية الملف"),
        };
        (en.to_string(), ar.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The source text this token was read from.
    pub lexeme: String,
    pub span: Span,
    /// True for tokens with no source text of their own: `Eof`, and the
    /// `Newline` added when the last line has no line break.
    pub synthetic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{span}: unterminated string literal")]
    UnterminatedString { span: Span },
    #[error("{span}: unexpected character {ch:?}")]
    UnexpectedChar { ch: char, span: Span },
    #[error("{span}: semicolons are not allowed")]
    SemicolonForbidden { span: Span },
    #[error("{span}: invalid escape sequence")]
    InvalidEscape { span: Span },
    #[error("{span}: malformed number")]
    MalformedNumber { span: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::UnterminatedString { span }
            | LexError::UnexpectedChar { span, .. }
            | LexError::SemicolonForbidden { span }
            | LexError::InvalidEscape { span }
            | LexError::MalformedNumber { span } => *span,
        }
    }

    pub fn diagnostic(&self) -> Diagnostic {
        let span = Some(self.span());
        match self {
            LexError::UnterminatedString { .. } => Diagnostic::new(
                "unterminated-string",
                "unterminated string literal; close it with '\"' on the same line",
                "نص غير مغلق؛ أغلقه بعلامة '\"' على السطر نفسه",
                span,
            ),
            LexError::UnexpectedChar { ch, .. } => Diagnostic::new(
                "unexpected-char",
                format!("unexpected character '{ch}'"),
                format!("حرف غير متوقع '{ch}'"),
                span,
            ),
            LexError::SemicolonForbidden { .. } => Diagnostic::new(
                "semicolon",
                "semicolons are not allowed; write each statement on its own line",
                "الفاصلة المنقوطة غير مسموح بها، اكتب كل تعليمة في سطر مستقل",
                span,
            ),
            LexError::InvalidEscape { .. } => Diagnostic::new(
                "invalid-escape",
                "invalid escape sequence; only \\\" and \\\\ are allowed in strings",
                "تسلسل هروب غير صالح، المسموح داخل النصوص فقط \\\" و \\\\",
                span,
            ),
            LexError::MalformedNumber { .. } => Diagnostic::new(
                "malformed-number",
                "malformed number: more than one decimal separator",
                "رقم غير صالح: أكثر من فاصلة عشرية واحدة",
                span,
            ),
        }
    }
}

fn is_arabic_letter(c: char) -> bool {
    ('\u{0621}'..='\u{064A}').contains(&c) && c != crate::normalize::TATWEEL
}

pub(crate) fn is_ident_start(c: char) -> bool {
    is_arabic_letter(c) || c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || digit_value(c).is_some()
}

/// Invisible marks editors insert around Arabic text. Skipped like spaces.
fn is_ignorable(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\u{200E}' | '\u{200F}' | '\u{061C}' | '\u{FEFF}')
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::CharIndices<'a>>,
    text: &'a str,
    offset: u32,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { chars: text.char_indices().peekable(), text, offset: 0, line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn byte_pos(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.text.len())
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        self.offset += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span::new(self.offset, self.line, self.col, 0)
    }
}

/// Splits normalized source into tokens terminated by `Eof`.
pub fn tokenize(src: &SourceFile, keywords: &KeywordTable) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(&src.text);
    let mut tokens: Vec<Token> = Vec::new();

    loop {
        let start = cur.here();
        let start_byte = cur.byte_pos();
        let Some(c) = cur.peek() else { break };

        let single = |k: TokenKind| Some(k);
        let kind = match c {
            c if is_ignorable(c) => {
                cur.bump();
                continue;
            }
            '\n' => {
                cur.bump();
                if tokens.last().is_none_or(|t| t.kind == TokenKind::Newline) {
                    continue;
                }
                TokenKind::Newline
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            ';' | '\u{061B}' => {
                return Err(LexError::SemicolonForbidden { span: Span { len: 1, ..start } });
            }
            '"' => {
                cur.bump();
                lex_string(&mut cur, start)?
            }
            c if digit_value(c).is_some() => {
                while cur.peek().is_some_and(|c| digit_value(c).is_some() || is_decimal_separator(c)) {
                    cur.bump();
                }
                let lexeme = &src.text[start_byte..cur.byte_pos()];
                let span = Span { len: cur.offset - start.offset, ..start };
                let folded = fold_digits(lexeme).map_err(|_| LexError::MalformedNumber { span })?;
                if folded.contains('.') {
                    TokenKind::FloatLit(folded)
                } else {
                    TokenKind::IntLit(folded)
                }
            }
            c if is_ident_start(c) => {
                while cur.peek().is_some_and(is_ident_continue) {
                    cur.bump();
                }
                let word = &src.text[start_byte..cur.byte_pos()];
                match keywords.lookup(word) {
                    Some(entry) => TokenKind::Keyword(entry.keyword),
                    None => TokenKind::Identifier(word.to_string()),
                }
            }
            _ => {
                cur.bump();
                let next = cur.peek();
                let op = |o| TokenKind::Operator(o);
                let two = |cur: &mut Cursor<'_>, o| {
                    cur.bump();
                    single(op(o))
                };
                let kind = match c {
                    '{' => single(TokenKind::LBrace),
                    '}' => single(TokenKind::RBrace),
                    '(' => single(TokenKind::LParen),
                    ')' => single(TokenKind::RParen),
                    '[' => single(TokenKind::LBracket),
                    ']' => single(TokenKind::RBracket),
                    ',' | '\u{060C}' => single(TokenKind::Comma),
                    '+' => single(op(Op::Plus)),
                    '-' => single(op(Op::Minus)),
                    '*' => single(op(Op::Star)),
                    '/' => single(op(Op::Slash)),
                    '%' | '\u{066A}' => single(op(Op::Percent)),
                    '=' if next == Some('=') => two(&mut cur, Op::Eq),
                    '=' => single(op(Op::Assign)),
                    '!' if next == Some('=') => two(&mut cur, Op::NotEq),
                    '<' if next == Some('=') => two(&mut cur, Op::LtEq),
                    '<' => single(op(Op::Lt)),
                    '>' if next == Some('=') => two(&mut cur, Op::GtEq),
                    '>' => single(op(Op::Gt)),
                    _ => None,
                };
                kind.ok_or(LexError::UnexpectedChar { ch: c, span: Span { len: 1, ..start } })?
            }
        };

        tokens.push(Token {
            kind,
            lexeme: src.text[start_byte..cur.byte_pos()].to_string(),
            span: Span { len: cur.offset - start.offset, ..start },
            synthetic: false,
        });
    }

    let end = cur.here();
    if tokens.last().is_some_and(|t| t.kind != TokenKind::Newline) {
        tokens.push(Token { kind: TokenKind::Newline, lexeme: "\n".into(), span: Span { len: 1, ..end }, synthetic: true });
    }
    tokens.push(Token { kind: TokenKind::Eof, lexeme: String::new(), span: end, synthetic: true });
    Ok(tokens)
}

/// Lexes the rest of a string literal after its opening quote.
fn lex_string(cur: &mut Cursor<'_>, start: Span) -> Result<TokenKind, LexError> {
    let mut inner = String::new();
    loop {
        match cur.peek() {
            None | Some('\n') => {
                return Err(LexError::UnterminatedString { span: Span { len: cur.offset - start.offset, ..start } });
            }
            Some('"') => {
                cur.bump();
                return Ok(TokenKind::StringLit(inner));
            }
            Some('\\') => {
                let at = cur.here();
                match cur.peek2() {
                    Some(e @ ('"' | '\\')) => {
                        cur.bump();
                        cur.bump();
                        inner.push('\\');
                        inner.push(e);
                    }
                    _ => return Err(LexError::InvalidEscape { span: Span { len: 1, ..at } }),
                }
            }
            Some(c) => {
                cur.bump();
                inner.push(c);
            }
        }
    }
}

/// Decodes the two supported escapes in a string literal's inner text.
pub fn unescape(inner: &str) -> String {
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(e) = chars.next() {
                out.push(e);
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} @{}", self.kind, self.lexeme, self.span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::normalize;
    use alloc::vec;
    use proptest::prelude::*;

    fn lex(text: &str) -> Result<Vec<Token>, LexError> {
        tokenize(&SourceFile::new(normalize(text), "t.apl"), &KeywordTable::standard())
    }

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn assignment_of_arabic_digit() {
        assert_eq!(
            kinds("س = ٥"),
            vec![
                TokenKind::Identifier("س".into()),
                TokenKind::Operator(Op::Assign),
                TokenKind::IntLit("5".into()),
                TokenKind::Newline,
                TokenKind::Eof,
            ]
        );
        let toks = lex("س = ٥").unwrap();
        assert_eq!(toks[2].lexeme, "٥");
        assert_eq!(toks[2].span, Span::new(4, 1, 5, 1));
        assert!(toks[3].synthetic);
    }

    #[test]
    fn empty_source_is_just_eof() {
        assert_eq!(kinds(""), vec![TokenKind::Eof]);
        assert_eq!(kinds("\n\n  \n# تعليق\n"), vec![TokenKind::Eof]);
    }

    #[test]
    fn semicolon_is_rejected_with_position() {
        let err = lex("س = ١\nص = ٢; ع = ٣").unwrap_err();
        assert_eq!(err, LexError::SemicolonForbidden { span: Span::new(11, 2, 6, 1) });
        assert!(matches!(lex("س = ١؛").unwrap_err(), LexError::SemicolonForbidden { .. }));
        assert_eq!(kinds("اطبع(\";\")")[2], TokenKind::StringLit(";".into()));
    }

    #[test]
    fn blank_lines_collapse() {
        let ks = kinds("س = ١\n\n\n\nص = ٢\n");
        let newlines = ks.iter().filter(|k| **k == TokenKind::Newline).count();
        assert_eq!(newlines, 2);
    }

    #[test]
    fn keywords_match_whole_words_only() {
        assert_eq!(kinds("وزن")[0], TokenKind::Identifier("وزن".into()));
        assert_eq!(kinds("و")[0], TokenKind::Keyword(Keyword::And));
        assert_eq!(kinds("والا_اذا")[0], TokenKind::Keyword(Keyword::Elif));
        assert_eq!(kinds("اطبعها")[0], TokenKind::Identifier("اطبعها".into()));
        assert_eq!(kinds("إذا")[0], TokenKind::Keyword(Keyword::If));
    }

    #[test]
    fn arabic_punctuation() {
        assert_eq!(kinds("ا، ب")[1], TokenKind::Comma);
        assert_eq!(kinds("ا ٪ ب")[1], TokenKind::Operator(Op::Percent));
        assert_eq!(kinds("١٢٫٥")[0], TokenKind::FloatLit("12.5".into()));
        assert!(matches!(lex("١٫٢٫٣"), Err(LexError::MalformedNumber { .. })));
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(kinds(r#""قال \"مرحبا\" \\""#)[0], TokenKind::StringLit(r#"قال \"مرحبا\" \\"#.into()));
        assert!(matches!(lex(r#""a\nb""#), Err(LexError::InvalidEscape { .. })));
        assert!(matches!(lex("\"مرحبا\nس"), Err(LexError::UnterminatedString { .. })));
        assert!(matches!(lex("«مرحبا»"), Err(LexError::UnexpectedChar { ch: '«', .. })));
        assert_eq!(unescape(r#"قال \"x\" \\"#), r#"قال "x" \"#);
    }

    #[test]
    fn operators() {
        let ks = kinds("ا == ب != ج <= د >= ه < و_ > ز");
        let ops: Vec<_> = ks.iter().filter_map(|k| if let TokenKind::Operator(o) = k { Some(*o) } else { None }).collect();
        assert_eq!(ops, vec![Op::Eq, Op::NotEq, Op::LtEq, Op::GtEq, Op::Lt, Op::Gt]);
        assert!(matches!(lex("ا ! ب"), Err(LexError::UnexpectedChar { ch: '!', .. })));
    }

    #[test]
    fn bidi_marks_are_skipped() {
        assert_eq!(kinds("\u{200F}س = ١\u{200E}").len(), 5);
    }

    #[test]
    fn errors_have_both_languages() {
        for err in [lex(";").unwrap_err(), lex("\"").unwrap_err(), lex("@").unwrap_err()] {
            let d = err.diagnostic();
            assert!(!d.message_en.is_empty() && !d.message_ar.is_empty());
        }
    }

    fn program_text() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "س", "مرحبا", "x1", "_", " ", "  ", "\n", "\n\n", "=", "==", "+", "(", ")", "{", "}", "[", "]", "،", ",", "٣", "42",
            "١٫٥", "\"نص أ\"", "\"\\\"\"", "اطبع", "اذا", "# تعليق", "<=", "%",
        ]);
        prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn spans_slice_back_to_lexemes(text in program_text()) {
            let src = SourceFile::new(normalize(&text), "p.apl");
            if let Ok(tokens) = tokenize(&src, &KeywordTable::standard()) {
                for t in tokens.iter().filter(|t| !t.synthetic) {
                    prop_assert!(t.span.len >= 1);
                    prop_assert_eq!(t.span.slice(&src.text), Some(t.lexeme.as_str()));
                }
                for pair in tokens.windows(2) {
                    prop_assert!(!(pair[0].kind == TokenKind::Newline && pair[1].kind == TokenKind::Newline));
                }
                prop_assert_eq!(&tokens.last().unwrap().kind, &TokenKind::Eof);
            }
        }

        #[test]
        fn string_contents_are_opaque(inner in "[\u{0621}-\u{064A}\u{0640} a-z!?ـأإآ]{0,20}") {
            let raw = alloc::format!("س = \"{inner}\"");
            let tokens = tokenize(&SourceFile::new(normalize(&raw), "s.apl"), &KeywordTable::standard()).unwrap();
            prop_assert_eq!(&tokens[2].kind, &TokenKind::StringLit(inner.clone()));
        }
    }
}
