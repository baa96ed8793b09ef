//! Bounded proof search, including a goal that needs more depth than given.

use schematic::frontend::session::Session;

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let mut s = Session::new(dir);
    s.load_file(std::path::Path::new(&format!("{dir}/lists.thm"))).unwrap();
    s.load_text("Type a i. Type b i. Type c i.").unwrap();
    for (name, goal, depth) in [
        ("two", "app (a :: nil) (b :: nil) (a :: b :: nil)", 5),
        ("found", "exists L, app (a :: b :: nil) (c :: nil) L", 5),
        ("shallow", "member c (a :: b :: c :: nil)", 2),
        ("deeper", "member c (a :: b :: c :: nil)", 4),
    ] {
        let result = s.exec(&format!("Theorem {name} : {goal}. search {depth}. Qed."));
        match result {
            Ok(out) => print!("{goal} (depth {depth}): {out}"),
            Err(e) => {
                s.abort();
                println!("{goal} (depth {depth}): {e}");
            }
        }
    }
}
