//! Fixture goldens: the potential fault profile of every bundled project,
//! the call sites of one source file and the element/attribute listing of
//! one manifest. Formats are described in docs/golden-files.md.

mod common;

use common::{all_operators, assert_golden, fixture, FIXTURES};
use mutagen_core::exec::Execution;
use mutagen_core::parsing::{index_source, index_xml};
use mutagen_core::pfp::derive_pfp;
use mutagen_core::span::Span;
use mutagen_core::{ingest_project, SourceFile};
use serde_json::json;

fn position(file: &SourceFile, span: Span) -> serde_json::Value {
    let (line, start_col) = file.line_col(span.start);
    let (end_line, end_col) = file.line_col(span.end);
    json!({ "line": line, "start_col": start_col, "end_line": end_line, "end_col": end_col })
}

fn record(position: serde_json::Value, fields: serde_json::Value) -> String {
    let mut object = fields.as_object().unwrap().clone();
    object.extend(position.as_object().unwrap().clone());
    serde_json::to_string(&object).unwrap()
}

fn call_site_listing(file: &SourceFile) -> String {
    let index = index_source(file).unwrap();
    let mut out = String::new();
    for call in &index.call_sites {
        let fields = json!({
            "kind": "call",
            "method": call.method_name,
            "receiver": call.receiver_text,
            "constructor": call.constructor,
            "text": file.slice(call.full_span),
            "args": call.argument_spans.iter().map(|s| file.slice(*s)).collect::<Vec<_>>(),
        });
        out += &record(position(file, call.full_span), fields);
        out.push('\n');
    }
    out
}

fn xml_listing(file: &SourceFile) -> String {
    let index = index_xml(file).unwrap();
    let mut out = String::new();
    for element in &index.elements {
        let parent = element.parent_index.map(|p| index.elements[p].tag_name.clone());
        let fields = json!({ "kind": "element", "tag": element.tag_name, "parent": parent });
        out += &record(position(file, element.full_span), fields);
        out.push('\n');
        for attr in &element.attributes {
            let fields = json!({
                "kind": "attribute",
                "element": element.tag_name,
                "name": attr.name,
                "value": attr.value_text,
            });
            out += &record(position(file, attr.value_span), fields);
            out.push('\n');
        }
    }
    out
}

#[test]
fn pfp_matches_golden_for_every_fixture() {
    for name in FIXTURES {
        let project = ingest_project(fixture(name)).unwrap();
        let pfp = derive_pfp(&project, &all_operators(), Execution::Sequential).unwrap();
        assert!(pfp.diagnostics.is_empty(), "{name}: {:?}", pfp.diagnostics);
        assert_golden(&format!("{name}.pfp.jsonl"), &pfp.to_jsonl());
    }
}

#[test]
fn note_activity_call_sites_match_golden() {
    let project = ingest_project(fixture("mini-notes")).unwrap();
    let file = project
        .file("app/src/main/java/com/example/notes/NoteActivity.java")
        .unwrap();
    assert_golden("mini-notes.NoteActivity.calls.jsonl", &call_site_listing(file));
}

#[test]
fn manifest_listing_matches_golden() {
    let project = ingest_project(fixture("mini-notes")).unwrap();
    let manifest = project.manifest().unwrap();
    assert_golden("mini-notes.manifest.jsonl", &xml_listing(manifest));
}

/// Every golden record's text must be what the file holds at that position:
/// guards the golden files themselves against hand-editing slips.
#[test]
fn golden_positions_slice_back_to_their_text() {
    let project = ingest_project(fixture("mini-notes")).unwrap();
    let file = project
        .file("app/src/main/java/com/example/notes/NoteActivity.java")
        .unwrap();
    let golden = std::fs::read_to_string(common::golden("mini-notes.NoteActivity.calls.jsonl")).unwrap();
    for line in golden.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let at = |l: &str, c: &str| {
            file.offset_of(v[l].as_u64().unwrap() as usize, v[c].as_u64().unwrap() as usize)
                .unwrap()
        };
        let span = Span::new(at("line", "start_col"), at("end_line", "end_col"));
        assert_eq!(file.slice(span), v["text"].as_str().unwrap());
    }
}
