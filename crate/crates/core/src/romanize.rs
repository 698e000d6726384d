//! Romanization of Arabic identifiers into ASCII target-language names.
//!
//! Letters follow Buckwalter's correspondences where Buckwalter uses a
//! lowercase letter, and a common digraph (`th`, `kh`, `sh`, ...) where it
//! would use punctuation or case, so every output is a plain
//! `[a-z0-9_]` identifier.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;

use crate::normalize::digit_value;

/// Letter table for U+0621..=U+064A, indexed from U+0621.
pub const LETTERS: [&str; 42] = [
    "a",  // ء hamza
    "aa", // آ
    "a",  // أ
    "u",  // ؤ
    "i",  // إ
    "e",  // ئ
    "a",  // ا
    "b",  // ب
    "h",  // ة
    "t",  // ت
    "th", // ث
    "j",  // ج
    "h",  // ح
    "kh", // خ
    "d",  // د
    "dh", // ذ
    "r",  // ر
    "z",  // ز
    "s",  // س
    "sh", // ش
    "s",  // ص
    "d",  // ض
    "t",  // ط
    "z",  // ظ
    "a",  // ع
    "gh", // غ
    "k",  // ػ
    "k",  // ؼ
    "y",  // ؽ
    "y",  // ؾ
    "y",  // ؿ
    "",   // ـ tatweel
    "f",  // ف
    "q",  // ق
    "k",  // ك
    "l",  // ل
    "m",  // م
    "n",  // ن
    "h",  // ه
    "w",  // و
    "a",  // ى
    "y",  // ي
];

/// Python keywords, soft keywords, and names the generated code relies on.
pub const RESERVED: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "case", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "input", "int", "is", "lambda",
    "len", "match", "nonlocal", "not", "or", "pass", "print", "raise", "range", "read_file", "return", "str", "try",
    "type", "while", "with", "yield",
];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Romanization without collision handling.
pub fn romanize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if let Some(d) = digit_value(c) {
            out.push(char::from_digit(d, 10).expect("digit below 10"));
        } else if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c.to_ascii_lowercase());
        } else if ('\u{0621}'..='\u{064A}').contains(&c) {
            out.push_str(LETTERS[c as usize - 0x0621]);
        }
    }
    out
}

/// Picks a free ASCII name for `name`, appending `_2`, `_3`, ... when the
/// plain romanization is empty, reserved, or already in `taken`.
pub fn transliterate(name: &str, taken: &BTreeSet<String>) -> String {
    let mut base = romanize(name);
    if base.starts_with(|c: char| c.is_ascii_digit()) {
        base.insert(0, '_');
    }
    let free = |candidate: &str| !candidate.is_empty() && !is_reserved(candidate) && !taken.contains(candidate);
    if free(&base) {
        return base;
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|candidate| free(candidate))
        .expect("an unbounded suffix search always finds a free name")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn taken(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(transliterate("x", &taken(&[])), "x");
        // U+0633 is at index 0x12 of the letter table
        assert_eq!(LETTERS[0x0633 - 0x0621], "s");
        assert_eq!(transliterate("س", &taken(&[])), "s");
        assert_eq!(transliterate("س", &taken(&["s"])), "s_2");
        assert_eq!(transliterate("س", &taken(&["s", "s_2"])), "s_3");
    }

    #[test]
    fn reserved_and_case() {
        assert_eq!(transliterate("Print", &taken(&[])), "print_2");
        assert_eq!(transliterate("class", &taken(&[])), "class_2");
        assert_eq!(transliterate("X", &taken(&["x"])), "x_2");
    }

    #[test]
    fn readable_names() {
        assert_eq!(romanize("جمع"), "jma");
        assert_eq!(romanize("الاسم"), "alasm");
        assert_eq!(romanize("قائمة"), "qaemh");
        assert_eq!(romanize("عدد_٢"), "add_2");
    }

    #[test]
    fn table_covers_letter_block() {
        for (i, roman) in LETTERS.iter().enumerate() {
            let c = char::from_u32(0x0621 + i as u32).unwrap();
            assert!(roman.bytes().all(|b| b.is_ascii_lowercase()), "{c}");
            assert_eq!(roman.is_empty(), c == '\u{0640}');
        }
    }

    proptest! {
        #[test]
        fn always_a_valid_fresh_identifier(name in "[\u{0621}-\u{063A}\u{0641}-\u{064A}a-zA-Z_][\u{0621}-\u{064A}a-z0-9_]{0,8}",
                                           existing in prop::collection::btree_set("[a-z]{1,3}(_[0-9])?", 0..10)) {
            let out = transliterate(&name, &existing);
            prop_assert!(!existing.contains(&out));
            prop_assert!(!is_reserved(&out));
            prop_assert!(out.starts_with(|c: char| c.is_ascii_lowercase() || c == '_'));
            prop_assert!(out.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_'));
        }
    }
}
