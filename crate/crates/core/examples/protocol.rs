//! Drives a session through the JSON protocol, as an editor would.

use schematic::frontend::protocol::handle_message;
use schematic::frontend::session::Session;

fn main() {
    let mut s = Session::default();
    let requests = [
        r#"{"v":1,"id":1,"cmd":"load","text":"Kind i type. Theorem refl : forall (x : i), x = x."}"#,
        r#"{"v":1,"id":2,"cmd":"tactic","text":"intros."}"#,
        r#"{"v":1,"id":3,"cmd":"undo"}"#,
        r#"{"v":1,"id":4,"cmd":"tactic","text":"intros. search. Qed."}"#,
        r#"{"v":1,"id":5,"cmd":"check","pool":"i"}"#,
        r#"not json"#,
    ];
    for req in requests {
        println!(">> {req}\n<< {}", handle_message(&mut s, req));
    }
}
