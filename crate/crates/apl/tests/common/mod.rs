#![allow(dead_code)]

pub mod gen;

use std::net::TcpListener as StdListener;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use apl::{CompilerHandle, LlmConfig, RunPolicy};
use apl_core::{KeywordTable, SourceFile};
use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};

pub const SECRET: &str = "sk-test-7f3a9c1e55d2b8aa";

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub struct CorpusProgram {
    pub name: String,
    pub path: PathBuf,
    pub source: String,
    pub expected: String,
}

pub fn corpus() -> Vec<CorpusProgram> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "apl"))
        .map(|path| CorpusProgram {
            name: path.file_stem().unwrap().to_string_lossy().into_owned(),
            source: std::fs::read_to_string(&path).unwrap(),
            expected: std::fs::read_to_string(path.with_extension("out")).unwrap(),
            path,
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

pub fn attachment_text() -> Vec<u8> {
    std::fs::read(corpus_dir().join("a.txt")).unwrap()
}

pub fn policy() -> RunPolicy {
    RunPolicy::new().expect("python3 on PATH").with_timeout(Duration::from_secs(10))
}

pub fn deterministic() -> CompilerHandle {
    CompilerHandle::deterministic(policy())
}

pub fn deterministic_python(source: &str) -> String {
    apl_core::compile(&SourceFile::new(source, "replay.apl"), &KeywordTable::standard())
        .map(|c| c.target.text)
        .unwrap_or_else(|e| format!("Syntax error: {}", e.diagnostic.message_en))
}

/// What the mock endpoint answers with.
#[derive(Clone, Debug)]
pub enum Reply {
    /// The deterministic backend's output for the user message, fenced and
    /// preceded by a line of prose the way chat models tend to answer.
    Replay,
    /// Like `Replay`, with every `+` turned into `-`.
    ReplayCorrupted,
    Fixed(String),
    Status(u16),
    /// `Status(500)` for the first `n` requests, then the inner reply.
    FailFirst(u32, Box<Reply>),
}

#[derive(Clone, Debug)]
pub struct Recorded {
    pub authorization: Option<String>,
    pub body: Value,
}

struct MockState {
    reply: Mutex<Reply>,
    hits: AtomicU32,
    requests: Mutex<Vec<Recorded>>,
}

pub struct MockLlm {
    pub url: String,
    state: Arc<MockState>,
}

fn answer(reply: &Reply, source: &str, hit: u32) -> Response {
    let text = match reply {
        Reply::Replay => format!("Here is the code:\n```python\n{}```", deterministic_python(source)),
        Reply::ReplayCorrupted => format!("```python\n{}```", deterministic_python(source).replace('+', "-")),
        Reply::Fixed(text) => text.clone(),
        Reply::Status(code) => {
            return (StatusCode::from_u16(*code).unwrap(), "upstream says no").into_response();
        }
        Reply::FailFirst(n, inner) => {
            if hit < *n {
                return (StatusCode::INTERNAL_SERVER_ERROR, "try again").into_response();
            }
            return answer(inner, source, hit);
        }
    };
    Json(json!({ "choices": [{ "index": 0, "message": { "role": "assistant", "content": text } }] })).into_response()
}

async fn chat(State(state): State<Arc<MockState>>, headers: HeaderMap, Json(body): Json<Value>) -> Response {
    let hit = state.hits.fetch_add(1, Ordering::SeqCst);
    let authorization = headers.get("authorization").and_then(|v| v.to_str().ok()).map(String::from);
    let source = body["messages"][1]["content"].as_str().unwrap_or_default().to_string();
    state.requests.lock().unwrap().push(Recorded { authorization, body });
    let reply = state.reply.lock().unwrap().clone();
    answer(&reply, &source, hit)
}

impl MockLlm {
    pub fn start(reply: Reply) -> MockLlm {
        let listener = StdListener::bind("127.0.0.1:0").unwrap();
        listener.set_nonblocking(true).unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let state = Arc::new(MockState { reply: Mutex::new(reply), hits: AtomicU32::new(0), requests: Mutex::new(Vec::new()) });
        let app = Router::new().route("/v1/chat/completions", post(chat)).with_state(state.clone());
        std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).unwrap();
                axum::serve(listener, app).await.unwrap();
            });
        });
        MockLlm { url, state }
    }

    pub fn set_reply(&self, reply: Reply) {
        *self.state.reply.lock().unwrap() = reply;
        self.state.hits.store(0, Ordering::SeqCst);
    }

    pub fn hits(&self) -> u32 {
        self.state.requests.lock().unwrap().len() as u32
    }

    pub fn requests(&self) -> Vec<Recorded> {
        self.state.requests.lock().unwrap().clone()
    }

    pub fn config(&self) -> LlmConfig {
        let mut cfg = LlmConfig::new(SECRET);
        cfg.endpoint_url = self.url.clone();
        cfg.timeout = Duration::from_secs(10);
        cfg.backoff = Duration::from_millis(10);
        cfg
    }

    pub fn handle(&self) -> CompilerHandle {
        CompilerHandle::llm(self.config(), policy()).unwrap()
    }
}

/// Global logger that keeps every record so tests can scan them.
struct CaptureLogger(Mutex<Vec<String>>);

impl log::Log for CaptureLogger {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }

    fn log(&self, record: &log::Record) {
        self.0.lock().unwrap().push(format!("{} {}: {}", record.level(), record.target(), record.args()));
    }

    fn flush(&self) {}
}

static LOGGER: OnceLock<&'static CaptureLogger> = OnceLock::new();

pub fn capture_logs() {
    LOGGER.get_or_init(|| {
        let logger: &'static CaptureLogger = Box::leak(Box::new(CaptureLogger(Mutex::new(Vec::new()))));
        log::set_logger(logger).expect("no other logger installed");
        log::set_max_level(log::LevelFilter::Trace);
        logger
    });
}

pub fn captured_logs() -> Vec<String> {
    LOGGER.get().map(|l| l.0.lock().unwrap().clone()).unwrap_or_default()
}
