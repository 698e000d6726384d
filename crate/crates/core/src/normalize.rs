//! Source normalization and numeric-literal folding.
//!
//! Normalization runs before tokenizing. Outside string literals it removes
//! tatweel and folds hamza-carrying alef forms to bare alef, so that typing
//! variations of the same keyword or identifier compare equal. Inside string
//! literals nothing changes.

use alloc::string::String;
use thiserror::Error;

pub const TATWEEL: char = '\u{0640}';
pub const BARE_ALEF: char = '\u{0627}';
pub const ARABIC_DECIMAL_SEPARATOR: char = '\u{066B}';

/// The input was not valid UTF-8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("input is not valid UTF-8 (valid up to byte {valid_up_to})")]
pub struct InvalidEncoding {
    pub valid_up_to: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum DigitError {
    #[error("more than one decimal separator")]
    MixedSeparator,
    #[error("'{0}' is not a digit")]
    NotADigit(char),
    #[error("empty numeric literal")]
    Empty,
}

pub(crate) fn is_alef_variant(c: char) -> bool {
    matches!(c, '\u{0622}' | '\u{0623}' | '\u{0625}')
}

/// Value of an ASCII, Arabic-Indic or Extended Arabic-Indic digit.
pub fn digit_value(c: char) -> Option<u32> {
    match c {
        '0'..='9' => Some(c as u32 - '0' as u32),
        '\u{0660}'..='\u{0669}' => Some(c as u32 - 0x0660),
        '\u{06F0}'..='\u{06F9}' => Some(c as u32 - 0x06F0),
        _ => None,
    }
}

pub fn is_decimal_separator(c: char) -> bool {
    c == '.' || c == ARABIC_DECIMAL_SEPARATOR
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Code,
    Str,
    Comment,
}

/// Normalizes raw source text. See the module docs; line endings are also
/// folded to LF and a leading byte-order mark is dropped.
pub fn normalize(raw: &str) -> String {
    let raw = raw.strip_prefix('\u{FEFF}').unwrap_or(raw);
    let mut out = String::with_capacity(raw.len());
    let mut region = Region::Code;
    let mut chars = raw.chars().peekable();

    while let Some(c) = chars.next() {
        if c == '\r' || c == '\n' {
            if c == '\r' && chars.peek() == Some(&'\n') {
                chars.next();
            }
            out.push('\n');
            region = Region::Code;
            continue;
        }
        match region {
            Region::Str => {
                out.push(c);
                if c == '\\' {
                    if let Some(&next) = chars.peek() {
                        if next != '\n' && next != '\r' {
                            out.push(next);
                            chars.next();
                        }
                    }
                } else if c == '"' {
                    region = Region::Code;
                }
            }
            Region::Code | Region::Comment => {
                if c == TATWEEL {
                    continue;
                }
                if is_alef_variant(c) {
                    out.push(BARE_ALEF);
                    continue;
                }
                if region == Region::Code {
                    match c {
                        '"' => region = Region::Str,
                        '#' => region = Region::Comment,
                        _ => {}
                    }
                }
                out.push(c);
            }
        }
    }
    out
}

/// [`normalize`] over raw bytes, rejecting invalid UTF-8.
pub fn normalize_bytes(raw: &[u8]) -> Result<String, InvalidEncoding> {
    let text = core::str::from_utf8(raw).map_err(|e| InvalidEncoding { valid_up_to: e.valid_up_to() })?;
    Ok(normalize(text))
}

/// Folds a numeric lexeme written in any supported digit block to ASCII
/// digits, with `.` as the decimal separator.
pub fn fold_digits(lexeme: &str) -> Result<String, DigitError> {
    if lexeme.is_empty() {
        return Err(DigitError::Empty);
    }
    let mut out = String::with_capacity(lexeme.len());
    let mut seen_separator = false;
    for c in lexeme.chars() {
        if let Some(v) = digit_value(c) {
            out.push(char::from_digit(v, 10).expect("digit value below 10"));
        } else if is_decimal_separator(c) {
            if seen_separator {
                return Err(DigitError::MixedSeparator);
            }
            seen_separator = true;
            out.push('.');
        } else {
            return Err(DigitError::NotADigit(c));
        }
    }
    Ok(out)
}
