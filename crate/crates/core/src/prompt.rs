//! Text handling for the LLM translation path: the fixed system prompt, reply
//! cleanup, and the heuristic that spots a reply reporting a syntax error
//! instead of returning code.

use alloc::string::String;

/// The system prompt sent with every translation request, verbatim.
pub const SYSTEM_PROMPT: &str = "This GPT specializes in translating Arabic algorithmic instructions into Python code. It accurately replaces Arabic keywords with their Python equivalents, ensures variables are named in English for runnable code, and checks for syntax correctness. If a syntax error is detected, it provides a specific error message to help users correct the issue. The output code is provided as plain text, not in Python markdown, to ensure compatibility with various text editors and environments.";

pub const SOURCE_SLOT: &str = "{source}";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PromptTemplate {
    pub system_text: &'static str,
    /// User message; [`SOURCE_SLOT`] is replaced by the program text.
    pub user_wrapper: &'static str,
}

impl PromptTemplate {
    pub const STANDARD: PromptTemplate = PromptTemplate { system_text: SYSTEM_PROMPT, user_wrapper: SOURCE_SLOT };

    pub fn user_message(&self, source: &str) -> String {
        self.user_wrapper.replacen(SOURCE_SLOT, source, 1)
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        PromptTemplate::STANDARD
    }
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

fn sanitize_once(reply: &str) -> String {
    let trimmed = reply.trim();
    // a single-line reply wrapped as ```code```
    if !trimmed.contains('\n') && trimmed.len() >= 6 && trimmed.starts_with("```") && trimmed.ends_with("```") {
        return String::from(trimmed[3..trimmed.len() - 3].trim());
    }
    let mut lines = trimmed.lines();
    if !trimmed.lines().any(is_fence) {
        return String::from(trimmed);
    }
    // drop any prose before the opening fence, and the fence itself
    lines.by_ref().find(|l| is_fence(l));
    let mut out = String::new();
    for line in lines.take_while(|l| !is_fence(l)) {
        out.push_str(line);
        out.push('\n');
    }
    String::from(out.trim())
}

/// Extracts plain code from a model reply: trims it, and when the code is
/// inside a triple-backtick fence, keeps only the fenced body. Idempotent.
pub fn sanitize(raw_reply: &str) -> String {
    let mut current = sanitize_once(raw_reply);
    loop {
        let next = sanitize_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

const PYTHON_LINE_STARTS: &[&str] = &[
    "def", "if", "elif", "else", "for", "while", "return", "import", "from", "class", "try", "except", "with", "pass",
    "print", "raise", "assert", "global", "lambda", "break", "continue",
];

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// `name = ...`, `name[i] = ...`, `name += ...` and similar.
fn looks_like_assignment(line: &str) -> bool {
    let line = line.trim_start();
    let head_len = line.find(|c: char| !(is_ident_char(c) || c == '.')).unwrap_or(line.len());
    if head_len == 0 || line.starts_with(|c: char| c.is_ascii_digit()) {
        return false;
    }
    let mut rest = line[head_len..].trim_start();
    if rest.starts_with('[') {
        match rest.find(']') {
            Some(end) => rest = rest[end + 1..].trim_start(),
            None => return false,
        }
    }
    let rest = rest.trim_start_matches(['+', '-', '*', '/', '%']);
    rest.starts_with('=') && !rest.starts_with("==")
}

/// An identifier immediately followed by `(`.
fn looks_like_call(line: &str) -> bool {
    let bytes: alloc::vec::Vec<char> = line.chars().collect();
    bytes.windows(2).any(|w| is_ident_char(w[0]) && w[1] == '(')
}

fn starts_with_keyword(line: &str) -> bool {
    let line = line.trim_start();
    PYTHON_LINE_STARTS.iter().any(|kw| {
        line.strip_prefix(kw).is_some_and(|rest| rest.is_empty() || !rest.starts_with(is_ident_char))
    })
}

/// True when a sanitized reply looks like an error report rather than code:
/// no line has the shape of code, and it mentions "syntax error" (any case)
/// or "خطأ". Heuristic.
pub fn looks_like_error_report(reply: &str) -> bool {
    let has_code = reply
        .lines()
        .filter(|l| !l.trim().is_empty())
        .any(|l| looks_like_assignment(l) || looks_like_call(l) || starts_with_keyword(l));
    if has_code {
        return false;
    }
    reply.to_lowercase().contains("syntax error") || reply.contains("خطأ")
}
