//! Std side of the compiler: the sandboxed runner, the LLM backend, the
//! compiler facade, the HTTP service and the command line.

pub mod cli;
pub mod facade;
pub mod llm;
pub mod runner;
pub mod service;

pub use facade::{Backend, CompileError, CompileResponse, CompilerHandle, ErrorStage};
pub use llm::{LlmConfig, LlmError};
pub use runner::{Attachment, RunError, RunPolicy, RunResult};
