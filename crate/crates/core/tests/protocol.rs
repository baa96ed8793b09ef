mod common;

use std::io::Write;
use std::process::{Command, Stdio};

use futures::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

use common::corpus_dir;
use schematic::frontend::protocol::{handle_message, MAX_MESSAGE_BYTES};
use schematic::frontend::session::Session;

const SCRIPT: [&str; 9] = [
    "Kind i type.\n",
    "Theorem t : forall (x : i),\n  x = x.\n",
    "undo.\n",
    "intros.\n",
    "undo.\n",
    "intros. search.\n",
    "search.\n",
    "Qed.\n",
    "Theorem u : exists (x : i), true.\n",
];

fn call(s: &mut Session, req: Value) -> Value {
    serde_json::from_str(&handle_message(s, &req.to_string())).unwrap()
}

#[test]
fn malformed_requests_get_a_null_id() {
    let mut s = Session::default();
    let r: Value = serde_json::from_str(&handle_message(&mut s, "{not json")).unwrap();
    assert_eq!(r["id"], Value::Null);
    assert_eq!(r["status"], "error");
    assert_eq!(r["diagnostic"]["code"], "malformed");
    let big = format!("{{\"cmd\":\"state\",\"text\":\"{}\"}}", "x".repeat(MAX_MESSAGE_BYTES));
    let r: Value = serde_json::from_str(&handle_message(&mut s, &big)).unwrap();
    assert_eq!(r["diagnostic"]["code"], "too-large");
    let r = call(&mut s, json!({"v": 2, "id": 4, "cmd": "state"}));
    assert_eq!((r["id"].clone(), r["diagnostic"]["code"].clone()), (json!(4), json!("version")));
    let r = call(&mut s, json!({"id": "x", "cmd": "frobnicate"}));
    assert_eq!(r["diagnostic"]["code"], "unknown-command");
}

#[test]
fn undo_at_the_start_is_an_error() {
    let mut s = Session::default();
    let r = call(&mut s, json!({"v": 1, "id": 1, "cmd": "undo"}));
    assert_eq!(r["status"], "error");
    assert!(r["diagnostic"]["message"].as_str().unwrap().contains("no theorem"));
    call(&mut s, json!({"v": 1, "id": 2, "cmd": "load", "text": "Kind i type. Theorem t : forall (x : i), x = x."}));
    let r = call(&mut s, json!({"v": 1, "id": 3, "cmd": "undo"}));
    assert_eq!(r["id"], 3);
    assert_eq!(r["diagnostic"]["message"], "0:0: in t: nothing to undo");
}

#[test]
fn state_reports_structured_subgoals() {
    let mut s = Session::default();
    call(&mut s, json!({"id": 1, "cmd": "load", "text": "Kind i type. Theorem t : forall (x : i), x = x /\\ true."}));
    let r = call(&mut s, json!({"id": 2, "cmd": "tactic", "text": "intros. split."}));
    assert_eq!(r["theorem"], "t");
    assert_eq!(r["complete"], false);
    let goals = r["subgoals"].as_array().unwrap();
    assert_eq!(goals.len(), 2);
    assert_eq!(goals[0]["vars"][0], json!({"name": "X", "ty": "i"}));
    assert_eq!(goals[0]["goal"], "X = X");
    let r = call(&mut s, json!({"id": 3, "cmd": "tactic", "text": "search. search. Qed."}));
    assert_eq!((r["theorem"].clone(), r["output"].clone()), (Value::Null, json!("t proved.\n")));
    let r = call(&mut s, json!({"id": 4, "cmd": "theorems"}));
    assert_eq!(r["theorems"][0]["name"], "t");
    let r = call(&mut s, json!({"id": 5, "cmd": "check", "pool": "i"}));
    assert_eq!(r["status"], "ok");
    assert_eq!(r["reports"][0]["ok"], true);
}

fn repl_transcript() -> String {
    let mut child = Command::new(env!("CARGO_BIN_EXE_schematic"))
        .arg("repl")
        .current_dir(corpus_dir())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(SCRIPT.concat().as_bytes()).unwrap();
    String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap()
}

fn transcript_line(r: &Value) -> String {
    match r["status"].as_str() {
        Some("ok") => r["output"].as_str().unwrap().to_string(),
        _ => format!("Error: {}\n", r["diagnostic"]["message"].as_str().unwrap()),
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn websocket_session_matches_the_repl() {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", 0)).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(schematic::frontend::server::serve(listener, corpus_dir()));
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws")).await.unwrap();

    let mut transcript = String::new();
    for (id, text) in SCRIPT.iter().enumerate() {
        let req = json!({"v": 1, "id": id, "cmd": "tactic", "text": text});
        ws.send(Message::Text(req.to_string())).await.unwrap();
        let Some(Ok(Message::Text(reply))) = ws.next().await else { panic!("no reply") };
        let r: Value = serde_json::from_str(&reply).unwrap();
        assert_eq!(r["id"], id);
        transcript.push_str(&transcript_line(&r));
    }
    ws.send(Message::Text("][".into())).await.unwrap();
    let Some(Ok(Message::Text(reply))) = ws.next().await else { panic!("no reply") };
    assert_eq!(serde_json::from_str::<Value>(&reply).unwrap()["id"], Value::Null);

    assert_eq!(transcript, repl_transcript());
}
