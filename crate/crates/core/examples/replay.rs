//! Replays schematic proofs at ground type instances with the independent
//! kernel, then shows a tampered proof being rejected.

use schematic::checker::soundness_harness;
use schematic::engine::{ProofTree, Step};
use schematic::frontend::session::Session;

fn drop_last_case(t: &mut ProofTree) -> bool {
    if matches!(t.step, Step::DefL { .. }) && t.children.len() > 1 {
        t.children.pop();
        return true;
    }
    t.children.iter_mut().any(drop_last_case)
}

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples");
    let mut s = Session::new(dir);
    s.load_file(std::path::Path::new(&format!("{dir}/gappend.thm"))).unwrap();
    let pool = s.parse_pool("i, list i, i -> i").unwrap();
    for report in s.replay_all(&pool) {
        print!("{report}");
    }
    let mut proof = s.theorems["append_det"].proof.clone();
    drop_last_case(&mut proof);
    let report = soundness_harness(&s.sig, &s.lemmas, &s.proved_lemmas(), "append_det", &proof, &pool);
    print!("tampered {report}");
}
