//! The compiler API: one handle, configured with a backend and a run policy,
//! that turns APL source into Python and optionally runs it.

use apl_core::{Diagnostic, KeywordTable, SourceFile, Span, Stage, TargetSource};
use serde::{Deserialize, Serialize};

use crate::llm::{self, LlmConfig, LlmError};
use crate::runner::{self, Attachment, RunError, RunPolicy, RunResult};

#[derive(Clone, Debug)]
pub enum Backend {
    Deterministic,
    Llm(LlmConfig),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Deterministic => "deterministic",
            Backend::Llm(_) => "llm",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorStage {
    Lex,
    Parse,
    Check,
    Llm,
}

impl From<Stage> for ErrorStage {
    fn from(s: Stage) -> Self {
        match s {
            Stage::Lex => ErrorStage::Lex,
            Stage::Parse => ErrorStage::Parse,
            Stage::Check => ErrorStage::Check,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: u32,
    pub col: u32,
    pub len: u32,
    pub offset: u32,
}

impl From<Span> for SourceSpan {
    fn from(s: Span) -> Self {
        SourceSpan { line: s.line, col: s.col, len: s.len, offset: s.offset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileError {
    pub stage: ErrorStage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    pub message_ar: String,
    pub message_en: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    pub message_ar: String,
    pub message_en: String,
}

impl From<Diagnostic> for Warning {
    fn from(d: Diagnostic) -> Self {
        Warning { span: d.span.map(Into::into), message_ar: d.message_ar, message_en: d.message_en }
    }
}

/// Outcome of a compile. Exactly one of `target_text` and `error` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileResponse {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rename_map: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<CompileError>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

impl CompileResponse {
    fn success(target: &TargetSource, warnings: Vec<Warning>) -> Self {
        CompileResponse {
            ok: true,
            target_text: Some(target.text.clone()),
            rename_map: Some(target.rename_map.entries().to_vec()),
            error: None,
            warnings,
        }
    }

    pub fn failure(stage: ErrorStage, diagnostic: Diagnostic) -> Self {
        CompileResponse {
            ok: false,
            target_text: None,
            rename_map: None,
            error: Some(CompileError {
                stage,
                span: diagnostic.span.map(Into::into),
                message_ar: diagnostic.message_ar,
                message_en: diagnostic.message_en,
            }),
            warnings: Vec::new(),
        }
    }
}

fn llm_diagnostic(err: &LlmError, cfg: &LlmConfig) -> Diagnostic {
    let en = cfg.api_key.scrub(&err.to_string());
    let ar = match err {
        LlmError::InvalidConfig(_) => "إعدادات نموذج اللغة غير صالحة",
        LlmError::Transport(_) => "فشل الاتصال بخدمة نموذج اللغة",
        LlmError::Auth { .. } => "رفضت خدمة نموذج اللغة مفتاح الوصول",
        LlmError::ReportedSyntaxError(_) => "أبلغ نموذج اللغة عن خطأ نحوي في البرنامج",
        LlmError::EmptyReply => "أعاد نموذج اللغة ردًا فارغًا",
    };
    let ar = match err {
        LlmError::ReportedSyntaxError(msg) => format!("{ar}: {}", cfg.api_key.scrub(msg)),
        _ => ar.to_string(),
    };
    Diagnostic::new("llm", en, ar, None)
}

/// Entry point for compiling and running APL programs. Immutable once built
/// and safe to share between threads.
#[derive(Clone, Debug)]
pub struct CompilerHandle {
    backend: Backend,
    run_policy: RunPolicy,
    table: KeywordTable,
}

impl CompilerHandle {
    pub fn deterministic(run_policy: RunPolicy) -> Self {
        CompilerHandle { backend: Backend::Deterministic, run_policy, table: KeywordTable::standard() }
    }

    /// LLM-backed handle from an API key. Endpoint and model come from the
    /// environment when set, otherwise the defaults in [`crate::llm`].
    pub fn with_api_key(api_key: impl Into<String>, run_policy: RunPolicy) -> Result<Self, LlmError> {
        CompilerHandle::llm(LlmConfig::new(api_key).with_env_overrides(), run_policy)
    }

    pub fn llm(cfg: LlmConfig, run_policy: RunPolicy) -> Result<Self, LlmError> {
        cfg.validate()?;
        Ok(CompilerHandle { backend: Backend::Llm(cfg), run_policy, table: KeywordTable::standard() })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn run_policy(&self) -> &RunPolicy {
        &self.run_policy
    }

    pub fn keywords(&self) -> &KeywordTable {
        &self.table
    }

    /// Compiles and also returns the generated source on success.
    pub fn compile_target(&self, source: &SourceFile) -> (CompileResponse, Option<TargetSource>) {
        match &self.backend {
            Backend::Deterministic => match apl_core::compile(source, &self.table) {
                Ok(compiled) => {
                    let warnings = compiled.warnings.iter().map(|w| w.diagnostic().into()).collect();
                    (CompileResponse::success(&compiled.target, warnings), Some(compiled.target))
                }
                Err(e) => (CompileResponse::failure(e.stage.into(), e.diagnostic), None),
            },
            Backend::Llm(cfg) => match llm::translate(source, cfg) {
                Ok(target) => (CompileResponse::success(&target, Vec::new()), Some(target)),
                Err(e) => (CompileResponse::failure(ErrorStage::Llm, llm_diagnostic(&e, cfg)), None),
            },
        }
    }

    pub fn compile(&self, source: &SourceFile) -> CompileResponse {
        self.compile_target(source).0
    }

    /// Compiles, then runs only if compilation succeeded.
    pub fn compile_and_run(
        &self,
        source: &SourceFile,
        attachments: &[Attachment],
    ) -> Result<(CompileResponse, Option<RunResult>), RunError> {
        self.compile_and_run_with(source, attachments, &self.run_policy)
    }

    pub fn compile_and_run_with(
        &self,
        source: &SourceFile,
        attachments: &[Attachment],
        policy: &RunPolicy,
    ) -> Result<(CompileResponse, Option<RunResult>), RunError> {
        let (response, target) = self.compile_target(source);
        match target {
            Some(target) => {
                let result = runner::run(&target, policy, attachments)?;
                Ok((response, Some(result)))
            }
            None => Ok((response, None)),
        }
    }
}
