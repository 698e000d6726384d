//! The keyword table: Arabic surface forms, the canonical keyword each one
//! denotes, and the Python text it lowers to.
//!
//! All Arabic forms are stored post-normalization (bare alef, no tatweel), so
//! `أدخل` and `ادخل` resolve to the same entry once the source has gone
//! through [`crate::normalize`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use thiserror::Error;

use crate::normalize::normalize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Keyword {
    Print,
    If,
    Elif,
    Else,
    While,
    For,
    In,
    Def,
    Return,
    True,
    False,
    None,
    And,
    Or,
    Not,
    Len,
    Range,
    Str,
    Int,
    ReadFile,
    Input,
}

impl Keyword {
    /// Keywords that behave like ordinary callable names in expressions.
    pub fn is_builtin(self) -> bool {
        matches!(
            self,
            Keyword::Print | Keyword::Len | Keyword::Range | Keyword::Str | Keyword::Int | Keyword::ReadFile | Keyword::Input
        )
    }

    pub fn role(self) -> &'static str {
        match self {
            Keyword::If | Keyword::Elif | Keyword::Else => "condition",
            Keyword::While | Keyword::For | Keyword::In => "loop",
            Keyword::Def | Keyword::Return => "function",
            Keyword::True | Keyword::False | Keyword::None => "constant",
            Keyword::And | Keyword::Or | Keyword::Not => "logic",
            Keyword::ReadFile => "file",
            _ => "builtin",
        }
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordEntry {
    pub arabic: String,
    pub keyword: Keyword,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KeywordTableError {
    #[error("arabic form '{0}' appears more than once after normalization")]
    DuplicateForm(String),
    #[error("keyword {0} maps to more than one target form")]
    ConflictingTarget(Keyword),
    #[error("'{0}' is not a single word")]
    NotAWord(String),
}

const STANDARD: &[(&str, Keyword, &str)] = &[
    ("اطبع", Keyword::Print, "print"),
    ("اذا", Keyword::If, "if"),
    ("والا_اذا", Keyword::Elif, "elif"),
    ("والا", Keyword::Else, "else"),
    ("طالما", Keyword::While, "while"),
    ("لكل", Keyword::For, "for"),
    ("في", Keyword::In, "in"),
    ("دالة", Keyword::Def, "def"),
    ("ارجع", Keyword::Return, "return"),
    ("صحيح", Keyword::True, "True"),
    ("خطا", Keyword::False, "False"),
    ("عدم", Keyword::None, "None"),
    ("و", Keyword::And, "and"),
    ("او", Keyword::Or, "or"),
    ("ليس", Keyword::Not, "not"),
    ("طول", Keyword::Len, "len"),
    ("المدى", Keyword::Range, "range"),
    ("الى_نص", Keyword::Str, "str"),
    ("الى_عدد", Keyword::Int, "int"),
    ("اقرا_ملف", Keyword::ReadFile, "read_file"),
    ("ادخل", Keyword::Input, "input"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeywordTable {
    entries: Vec<KeywordEntry>,
}

impl KeywordTable {
    /// Builds a table, normalizing each Arabic form and rejecting collisions.
    pub fn new(entries: impl IntoIterator<Item = KeywordEntry>) -> Result<Self, KeywordTableError> {
        let mut out: Vec<KeywordEntry> = Vec::new();
        for mut entry in entries {
            entry.arabic = normalize(&entry.arabic);
            if entry.arabic.is_empty() || !entry.arabic.chars().all(crate::lexer::is_ident_continue) {
                return Err(KeywordTableError::NotAWord(entry.arabic));
            }
            if out.iter().any(|e| e.arabic == entry.arabic) {
                return Err(KeywordTableError::DuplicateForm(entry.arabic));
            }
            if out.iter().any(|e| e.keyword == entry.keyword && e.target != entry.target) {
                return Err(KeywordTableError::ConflictingTarget(entry.keyword));
            }
            out.push(entry);
        }
        Ok(KeywordTable { entries: out })
    }

    pub fn standard() -> Self {
        let entries = STANDARD.iter().map(|&(arabic, keyword, target)| KeywordEntry {
            arabic: arabic.into(),
            keyword,
            target: target.into(),
        });
        KeywordTable::new(entries).expect("standard keyword table is well formed")
    }

    pub fn entries(&self) -> &[KeywordEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Looks up a normalized word.
    pub fn lookup(&self, word: &str) -> Option<&KeywordEntry> {
        self.entries.iter().find(|e| e.arabic == word)
    }

    /// Canonical (first-listed) Arabic form for a keyword.
    pub fn arabic(&self, keyword: Keyword) -> Option<&str> {
        self.entries.iter().find(|e| e.keyword == keyword).map(|e| e.arabic.as_str())
    }

    pub fn target(&self, keyword: Keyword) -> Option<&str> {
        self.entries.iter().find(|e| e.keyword == keyword).map(|e| e.target.as_str())
    }
}

impl Default for KeywordTable {
    fn default() -> Self {
        KeywordTable::standard()
    }
}
