mod common;

use apl::facade::{Backend, ErrorStage};
use apl::{Attachment, CompilerHandle};
use apl_core::SourceFile;
use common::{MockLlm, Reply};

#[test]
fn backends_are_interchangeable_on_the_corpus() {
    let mock = MockLlm::start(Reply::Replay);
    let llm = mock.handle();
    let det = common::deterministic();
    let attachments = [Attachment::new("a.txt", common::attachment_text())];
    for p in common::corpus() {
        let src = SourceFile::new(p.source.as_str(), p.name.as_str());
        let (a, ra) = det.compile_and_run(&src, &attachments).unwrap();
        let (b, rb) = llm.compile_and_run(&src, &attachments).unwrap();
        assert!(a.ok && b.ok, "{}", p.name);
        let (ra, rb) = (ra.unwrap(), rb.unwrap());
        assert_eq!((&ra.stdout, &ra.stderr, ra.exit_code), (&rb.stdout, &rb.stderr, rb.exit_code), "{}", p.name);
        assert!(b.rename_map.as_ref().is_none_or(|m| m.is_empty()));
    }
}

#[test]
fn run_only_happens_after_a_successful_compile() {
    let det = common::deterministic();
    let (resp, run) = det.compile_and_run(&SourceFile::new("اطبع(١);\n", "x.apl"), &[]).unwrap();
    assert!(!resp.ok && run.is_none());
    assert_eq!(resp.error.unwrap().stage, ErrorStage::Lex);

    let (resp, run) = det.compile_and_run(&SourceFile::new("اطبع(٢+٣)\n", "x.apl"), &[]).unwrap();
    assert!(resp.ok);
    assert_eq!(run.unwrap().stdout, "5\n");
}

#[test]
fn parse_and_check_failures_carry_their_stage() {
    let det = common::deterministic();
    let resp = det.compile(&SourceFile::new("اذا صحيح {\n", "x.apl"));
    assert_eq!(resp.error.unwrap().stage, ErrorStage::Parse);
    let resp = det.compile(&SourceFile::new("ارجع ١\n", "x.apl"));
    assert_eq!(resp.error.unwrap().stage, ErrorStage::Check);
}

#[test]
fn warnings_do_not_block_compilation() {
    let resp = common::deterministic().compile(&SourceFile::new("اطبع(مجهول)\n", "x.apl"));
    assert!(resp.ok);
    assert_eq!(resp.warnings.len(), 1);
    assert!(resp.warnings[0].message_en.contains("مجهول"));
}

#[test]
fn rename_map_is_exposed_for_the_deterministic_backend() {
    let resp = common::deterministic().compile(&SourceFile::new("س = ١\nاطبع(س)\n", "x.apl"));
    assert_eq!(resp.rename_map.unwrap(), vec![("س".to_string(), "s".to_string())]);
}

#[test]
fn api_key_constructor() {
    let handle = CompilerHandle::with_api_key(common::SECRET, common::policy()).unwrap();
    assert!(matches!(handle.backend(), Backend::Llm(_)));
    assert!(!format!("{handle:?}").contains(common::SECRET));
    assert!(CompilerHandle::with_api_key("", common::policy()).is_err());
}
