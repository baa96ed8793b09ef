//! An interactive proof of append determinacy, one command at a time, with
//! the proof state printed after each step.

use schematic::frontend::session::Session;

const DECLS: &str = "Kind i type.
Kind list type -> type.
Type nil list A.
Type cons A -> list A -> list A.
Inductive [A] gappend : list A -> list A -> list A -> prop by
  gappend nil L L ;
  gappend (cons X L1) L2 (cons X L3) := gappend L1 L2 L3.
";

fn main() {
    let mut s = Session::default();
    s.load_text(DECLS).unwrap();
    let commands = [
        "Theorem append_det [A] : forall (L1 L2 L3 L4 : list A), gappend L1 L2 L3 -> gappend L1 L2 L4 -> L3 = L4.",
        "induction on 1.",
        "intros.",
        "case H1.",
        "case H2.",
        "search.",
        "case H2.",
        "apply IH to H3 H4.",
        "case H5.",
        "search.",
        "Qed.",
    ];
    for c in commands {
        println!("> {c}");
        match s.exec(c) {
            Ok(out) => print!("{out}"),
            Err(e) => println!("Error: {e}"),
        }
    }
}
