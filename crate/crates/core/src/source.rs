use alloc::string::String;
use core::fmt;

use crate::normalize::InvalidEncoding;

/// A location in source text. All quantities count Unicode scalar values,
/// not bytes. `line` and `col` are 1-based; `offset` is 0-based from the
/// start of the text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub offset: u32,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub const fn new(offset: u32, line: u32, col: u32, len: u32) -> Self {
        Span { offset, line, col, len }
    }

    pub fn end(&self) -> u32 {
        self.offset + self.len
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (first, _) = if self.offset <= other.offset { (self, other) } else { (other, self) };
        let end = self.end().max(other.end());
        Span { len: end - first.offset, ..first }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.offset <= other.offset && other.end() <= self.end()
    }

    /// The text covered by this span, or `None` when it falls outside `text`.
    pub fn slice<'a>(&self, text: &'a str) -> Option<&'a str> {
        let mut indices = text.char_indices().map(|(i, _)| i).chain(core::iter::once(text.len()));
        let start = indices.nth(self.offset as usize)?;
        let end = if self.len == 0 {
            start
        } else {
            indices.nth(self.len as usize - 1)?
        };
        text.get(start..end)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One `.apl` input: its text plus a display name used in diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub text: String,
    pub origin: String,
}

impl SourceFile {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceFile { text: text.into(), origin: origin.into() }
    }

    /// Validates UTF-8 and strips a leading byte-order mark.
    pub fn from_bytes(bytes: &[u8], origin: impl Into<String>) -> Result<Self, InvalidEncoding> {
        let text = core::str::from_utf8(bytes).map_err(|e| InvalidEncoding { valid_up_to: e.valid_up_to() })?;
        let text = text.strip_prefix('\u{FEFF}').unwrap_or(text);
        Ok(SourceFile::new(text, origin))
    }

    /// A copy of this file with its text passed through [`crate::normalize`].
    pub fn normalized(&self) -> SourceFile {
        SourceFile { text: crate::normalize::normalize(&self.text), origin: self.origin.clone() }
    }
}
