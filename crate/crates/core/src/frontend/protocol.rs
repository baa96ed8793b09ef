//! The JSON session protocol, version 1. One request per message, one
//! response per request; see `docs/protocol.md`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::session::{Session, SessionError};
use crate::checker::default_pool;
use crate::engine::Sequent;
use crate::syntax::Printer;

pub const VERSION: u64 = 1;

/// Requests larger than this are rejected without being parsed.
pub const MAX_MESSAGE_BYTES: usize = 1 << 20;

#[derive(Clone, Debug, Deserialize)]
pub struct Request {
    #[serde(default)]
    pub v: Option<u64>,
    #[serde(default)]
    pub id: Value,
    pub cmd: String,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub pool: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Hypothesis {
    pub label: String,
    pub formula: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Variable {
    pub name: String,
    pub ty: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Subgoal {
    pub tyvars: Vec<String>,
    pub vars: Vec<Variable>,
    pub hyps: Vec<Hypothesis>,
    pub goal: String,
}

impl Subgoal {
    pub fn of(seq: &Sequent, printer: &Printer) -> Self {
        Subgoal {
            tyvars: seq.psi.iter().map(|v| v.to_string()).collect(),
            vars: seq.sigma.iter().map(|(n, t)| Variable { name: n.to_string(), ty: t.to_string() }).collect(),
            hyps: seq.hyps.iter().map(|h| Hypothesis { label: h.label.to_string(), formula: printer.formula(&h.formula) }).collect(),
            goal: printer.formula(&seq.goal),
        }
    }
}

fn error(id: Value, code: &str, message: String) -> Value {
    json!({ "v": VERSION, "id": id, "status": "error", "diagnostic": { "code": code, "message": message } })
}

fn state(session: &Session, id: Value, output: String) -> Value {
    let (theorem, complete, subgoals) = match &session.pending {
        Some(p) => {
            let goals: Vec<Subgoal> = p.state.open_goals().map(|s| Subgoal::of(s, &session.printer)).collect();
            (Value::String(p.name.to_string()), p.state.is_complete(), goals)
        }
        None => (Value::Null, true, Vec::new()),
    };
    json!({
        "v": VERSION,
        "id": id,
        "status": "ok",
        "theorem": theorem,
        "complete": complete,
        "subgoals": subgoals,
        "output": output,
    })
}

fn session_error(id: Value, e: &SessionError) -> Value {
    error(id, &e.code(), e.to_string())
}

/// Handles one raw message and returns the raw response.
pub fn handle_message(session: &mut Session, raw: &str) -> String {
    if raw.len() > MAX_MESSAGE_BYTES {
        return error(Value::Null, "too-large", format!("message exceeds {MAX_MESSAGE_BYTES} bytes")).to_string();
    }
    let req: Request = match serde_json::from_str(raw) {
        Ok(r) => r,
        Err(e) => return error(Value::Null, "malformed", e.to_string()).to_string(),
    };
    handle(session, req).to_string()
}

pub fn handle(session: &mut Session, req: Request) -> Value {
    let id = req.id.clone();
    if let Some(v) = req.v {
        if v != VERSION {
            return error(id, "version", format!("unsupported protocol version {v}"));
        }
    }
    let text = req.text.unwrap_or_default();
    match req.cmd.as_str() {
        "load" | "tactic" => match session.exec(&text) {
            Ok(out) => state(session, id, out),
            Err(e) => session_error(id, &e),
        },
        "undo" => match session.undo() {
            Ok(()) => {
                let out = session.render();
                state(session, id, out)
            }
            Err(e) => session_error(id, &e),
        },
        "state" => {
            let out = session.render();
            state(session, id, out)
        }
        "theorems" => {
            let list: Vec<Value> = session
                .theorems
                .values()
                .map(|t| {
                    json!({
                        "name": t.name.to_string(),
                        "params": t.params.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                        "formula": session.printer.formula(&t.formula),
                        "admitted": t.admitted(),
                    })
                })
                .collect();
            json!({ "v": VERSION, "id": id, "status": "ok", "theorems": list })
        }
        "check" => {
            let pool = match req.pool.as_deref() {
                Some(p) => match session.parse_pool(p) {
                    Ok(p) => p,
                    Err(e) => return session_error(id, &e),
                },
                None => default_pool(),
            };
            let reports: Vec<Value> = session
                .replay_all(&pool)
                .iter()
                .map(|r| {
                    json!({
                        "theorem": r.theorem.to_string(),
                        "ok": r.ok(),
                        "assignments": r.assignments.iter().map(|a| json!({
                            "types": a.assignment.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>(),
                            "ok": a.result.is_ok(),
                            "error": a.result.as_ref().err().map(|e| e.to_string()),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let ok = reports.iter().all(|r| r["ok"] == Value::Bool(true));
            json!({ "v": VERSION, "id": id, "status": if ok { "ok" } else { "error" }, "reports": reports })
        }
        other => error(id, "unknown-command", format!("unknown command {other:?}")),
    }
}
