use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use schematic::frontend::session::{Session, SessionError};
use schematic::speclog::{parse_query, parse_spec, solve, SolveResult};
use schematic::syntax::{Printer, Signature};

#[derive(Parser)]
#[command(name = "schematic", version, about = "Interactive prover with schematic type polymorphism")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every theorem of a development file.
    Check {
        file: PathBuf,
        /// Replay each proof at every assignment of these ground types, e.g. "i, list i, i -> i".
        #[arg(long)]
        replay_types: Option<String>,
        /// Print a JSON report.
        #[arg(long)]
        json: bool,
        /// Print type instances of constants and predicates.
        #[arg(long)]
        show_instances: bool,
    },
    /// Interactive loop reading commands from standard input.
    Repl {
        /// A development to load first.
        file: Option<PathBuf>,
        #[arg(long)]
        show_instances: bool,
    },
    /// Serve the JSON session protocol over websockets at /ws.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Run a query against a specification (`NAME.sig` and `NAME.mod`).
    RunSpec {
        /// Path of the `.sig` or `.mod` file, or the common stem.
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Unify two terms; capitalized identifiers are variables.
    Unify {
        left: String,
        right: String,
        /// Declarations to load first.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Check { file, replay_types, json, show_instances } => check(&file, replay_types.as_deref(), json, show_instances),
        Cmd::Repl { file, show_instances } => repl(file.as_deref(), show_instances),
        Cmd::Serve { port } => serve(port),
        Cmd::RunSpec { file, query, depth } => run_spec(&file, &query, depth),
        Cmd::Unify { left, right, file } => unify(&left, &right, file.as_deref()),
    };
    ExitCode::from(code as u8)
}

fn check(file: &std::path::Path, replay: Option<&str>, as_json: bool, show_instances: bool) -> i32 {
    let mut session = Session::default();
    session.printer = Printer { show_instances };
    let loaded = session.load_file(file);
    let mut code = 0;
    let mut error = None;
    if let Err(e) = &loaded {
        code = e.exit_code();
        error = Some(e.clone());
    }
    let mut reports = Vec::new();
    if loaded.is_ok() {
        if let Some(text) = replay {
            match session.parse_pool(text) {
                Ok(pool) => reports = session.replay_all(&pool),
                Err(e) => {
                    code = e.exit_code();
                    error = Some(e);
                }
            }
        }
        if reports.iter().any(|r| !r.ok()) || session.theorems.values().any(|t| t.admitted()) {
            code = 1;
        }
    }
    if as_json {
        let theorems: Vec<_> = session
            .theorems
            .values()
            .map(|t| json!({ "name": t.name.to_string(), "params": t.params.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "admitted": t.admitted() }))
            .collect();
        let replays: Vec<_> = reports
            .iter()
            .map(|r| {
                json!({
                    "theorem": r.theorem.to_string(),
                    "ok": r.ok(),
                    "assignments": r.assignments.iter().map(|a| json!({
                        "types": a.assignment.iter().map(|(k, v)| (k.to_string(), json!(v.to_string()))).collect::<serde_json::Map<_, _>>(),
                        "ok": a.result.is_ok(),
                        "error": a.result.as_ref().err().map(|e| e.to_string()),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let report = json!({
            "file": file.display().to_string(),
            "ok": code == 0,
            "exit_code": code,
            "theorems": theorems,
            "replays": replays,
            "error": error.as_ref().map(|e| json!({ "code": e.code(), "message": e.to_string() })),
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        for t in session.theorems.values() {
            println!("{}: {}", t.name, if t.admitted() { "admitted" } else { "proved" });
        }
        for r in &reports {
            print!("{r}");
        }
        if let Some(e) = &error {
            eprintln!("error: {e}");
            if let SessionError::Tactic { .. } | SessionError::Incomplete(_) = e {
                eprint!("{}", session.render());
            }
        }
    }
    code
}

fn repl(file: Option<&std::path::Path>, show_instances: bool) -> i32 {
    let mut session = Session::default();
    session.printer = Printer { show_instances };
    if let Some(f) = file {
        if let Err(e) = session.load_file(f) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = std::io::stdout();
    let mut buffer = String::new();
    let prompt = |out: &mut std::io::Stdout, session: &Session, cont: bool| {
        if interactive {
            let name = session.pending.as_ref().map(|p| p.name.to_string()).unwrap_or_default();
            let _ = write!(out, "{}{} ", name, if cont { " .." } else { " >" });
            let _ = out.flush();
        }
    };
    prompt(&mut out, &session, false);
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        buffer.push_str(&line);
        buffer.push('\n');
        if !ends_command(&buffer) {
            prompt(&mut out, &session, true);
            continue;
        }
        let text = std::mem::take(&mut buffer);
        match session.exec(&text) {
            Ok(s) => {
                let _ = write!(out, "{s}");
            }
            Err(e) => {
                let _ = writeln!(out, "Error: {e}");
            }
        }
        prompt(&mut out, &session, false);
    }
    0
}

/// Whether the buffered input ends with a complete `.`-terminated command.
fn ends_command(text: &str) -> bool {
    let code: String = text.lines().map(|l| l.split('%').next().unwrap_or("")).collect::<Vec<_>>().join("\n");
    code.trim_end().ends_with('.')
}

fn serve(port: u16) -> i32 {
    let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
    rt.block_on(async {
        let listener = match tokio::net::TcpListener::bind(("127.0.0.1", port)).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind port {port}: {e}");
                return 2;
            }
        };
        eprintln!("listening on ws://127.0.0.1:{port}/ws");
        let base = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
        match schematic::frontend::server::serve(listener, base).await {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        }
    })
}

fn run_spec(file: &std::path::Path, query: &str, depth: usize) -> i32 {
    let stem = file.with_extension("");
    let read = |ext: &str| std::fs::read_to_string(stem.with_extension(ext));
    let (sig_text, mod_text) = match (read("sig"), read("mod")) {
        (Ok(s), Ok(m)) => (s, m),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: cannot read {}.sig/.mod: {e}", stem.display());
            return 2;
        }
    };
    let mut sig = Signature::with_builtins();
    let prog = match parse_spec(&mut sig, &sig_text, &mod_text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let q = match parse_query(&sig, query) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match solve(&sig, &prog, &q, depth) {
        Ok(SolveResult::Success(bindings)) => {
            println!("yes");
            let printer = Printer::default();
            for (x, t) in bindings {
                println!("{x} = {}", printer.term(&t));
            }
            0
        }
        Ok(SolveResult::Exhausted) => {
            println!("no (depth {depth})");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn unify(left: &str, right: &str, file: Option<&std::path::Path>) -> i32 {
    let mut session = Session::default();
    if let Some(f) = file {
        if let Err(e) = session.load_file(f) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    match session.unify_text(left, right) {
        Ok(bindings) => {
            for (x, t) in bindings {
                println!("{x} := {t}");
            }
            0
        }
        Err(e) => {
            println!("{e}");
            1
        }
    }
}
