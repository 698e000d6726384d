use alloc::string::String;
use core::fmt;

use crate::source::Span;

/// A user-facing message in English and Arabic, optionally tied to a span.
/// Every compile-time error and warning converts into one of these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message_en: String,
    pub message_ar: String,
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: &'static str, message_en: impl Into<String>, message_ar: impl Into<String>, span: Option<Span>) -> Self {
        Diagnostic { code, message_en: message_en.into(), message_ar: message_ar.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{} / {}", self.message_en, self.message_ar)
    }
}
