//! Higher-order pattern unification: solve `F X Y = f Y X` for `F`, and see
//! a non-pattern problem rejected.

use schematic::frontend::session::Session;

fn main() {
    let mut s = Session::default();
    s.load_text("Kind i type. Type a i. Type f i -> i -> i. Type g i -> i.").unwrap();
    for (l, r) in
        [("f X (g Y)", "f (g a) Z"), ("x\\ F x", "x\\ f x a"), ("x\\ y\\ F y x", "x\\ y\\ f x y"), ("X", "g X"), ("x\\ F (g x)", "x\\ g x")]
    {
        match s.unify_text(l, r) {
            Ok(bindings) => {
                let shown: Vec<String> = bindings.iter().map(|(x, t)| format!("{x} := {t}")).collect();
                println!("{l}  =?=  {r}\n  {}", shown.join(", "));
            }
            Err(e) => println!("{l}  =?=  {r}\n  {e}"),
        }
    }
}
