//! Case analysis on a schematic definition succeeds only when the outcome
//! does not depend on how type variables are instantiated.

use schematic::frontend::session::Session;

const DECLS: &str = "Kind i type.
Type kp A -> i.
Define [A] keq : A -> A -> prop by
  keq X X.
";

fn attempt(statement: &str) {
    let mut s = Session::default();
    s.load_text(DECLS).unwrap();
    s.exec(statement).unwrap();
    println!("{statement}");
    match s.exec("intros. case H1.") {
        Ok(state) => print!("{state}"),
        Err(e) => println!("  {e}"),
    }
    println!();
}

fn main() {
    attempt("Theorem same [A] : forall (x y : A), keq (kp x) (kp y) -> x = y.");
    attempt("Theorem mixed [A, B] : forall (x : A) (y : B), keq (kp x) (kp y) -> false.");
}
