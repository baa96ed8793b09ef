//! Runs queries against a Horn specification and prints the `prog`
//! clauses its translation contributes.

use schematic::speclog::{parse_query, parse_spec, solve, translate_to_prog, SolveResult};
use schematic::syntax::{Printer, Signature};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let read = |f: &str| std::fs::read_to_string(format!("{dir}/{f}")).unwrap();
    let mut sig = Signature::with_builtins();
    let prog = parse_spec(&mut sig, &read("append.sig"), &read("append.mod")).unwrap();
    let printer = Printer::default();
    for c in translate_to_prog(&prog) {
        println!("prog clause: {}", printer.formula(&schematic::syntax::Formula::Atom(c.head.clone())));
    }
    for q in ["append (a :: nil) (b :: c :: nil) L", "append L1 L2 (a :: b :: nil)", "append (a :: nil) L (b :: nil)"] {
        let query = parse_query(&sig, q).unwrap();
        match solve(&sig, &prog, &query, 10).unwrap() {
            SolveResult::Success(bindings) => {
                let shown: Vec<String> = bindings.iter().map(|(x, t)| format!("{x} = {}", printer.term(t))).collect();
                println!("?- {q}.  yes: {}", shown.join(", "));
            }
            SolveResult::Exhausted => println!("?- {q}.  no"),
        }
    }
}
