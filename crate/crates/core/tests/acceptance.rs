//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use schematic::defs::DiagCode;
use schematic::engine::{RuleError, Step};
use schematic::frontend::session::{Session, SessionError};
use schematic::speclog::{parse_query, solve, SolveResult};
use schematic::syntax::{Fresh, Printer, Ty};
use schematic::tactics::TacticError;
use schematic::unify::{pattern_unify, PatternError, UnifyProblem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn load(file: &str) -> Result<Session, Box<SessionError>> {
    let mut s = Session::new(corpus_dir());
    s.load_file(&corpus_dir().join(file)).map_err(Box::new)?;
    Ok(s)
}

fn replay_ok(s: &Session, pool: &str) -> Result<usize, String> {
    let pool = s.parse_pool(pool).map_err(|e| e.to_string())?;
    let mut n = 0;
    for r in s.replay_all(&pool) {
        if !r.ok() {
            return Err(r.to_string());
        }
        n += r.assignments.len();
    }
    Ok(n)
}

fn all_proved(s: &Session) -> Result<(), String> {
    match s.theorems.values().find(|t| t.admitted()) {
        Some(t) => Err(format!("{} is admitted", t.name)),
        None => Ok(()),
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    if spent < limit {
        Ok(())
    } else {
        Err(format!("took {spent:?}, limit {limit:?}"))
    }
}

fn gappend_corpus() -> Outcome {
    let start = Instant::now();
    let s = load("gappend.thm").map_err(|e| e.to_string())?;
    if !s.theorems.contains_key("append_det") {
        return Err("append_det missing".into());
    }
    all_proved(&s)?;
    let n = replay_ok(&s, "i, list i, i -> i")?;
    within(start, Duration::from_secs(2))?;
    Ok(format!("{n} replay(s) ok in {:?}", start.elapsed()))
}

fn spec_corpus() -> Outcome {
    let start = Instant::now();
    let s = load("spec_append.thm").map_err(|e| e.to_string())?;
    let t = s.theorems.get("append_det").ok_or("append_det missing")?;
    let stmt = Printer::default().formula(&t.formula);
    let expected = "forall L1 L2 L3 L4, {append L1 L2 L3} -> {append L1 L2 L4} -> L3 = L4";
    if t.params.len() != 1 || !stmt.replace(['(', ')'], "").contains("{append L1 L2 L3} -> {append L1 L2 L4} -> L3 = L4") {
        return Err(format!("statement is [{}] {stmt}, expected [A] {expected}", t.params.len()));
    }
    all_proved(&s)?;
    let n = replay_ok(&s, "i, list i")?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("{n} replay(s) ok in {:?}", start.elapsed()))
}

fn keq_not_amenable() -> Outcome {
    match load("keq.thm").map_err(|e| *e) {
        Err(SessionError::Tactic { theorem, error: TacticError::Rule(RuleError::NotAmenable { equation: Some(eq), .. }), .. })
            if theorem == "keq_kp" =>
        {
            let mut sides = [eq.left.clone(), eq.right.clone()];
            sides.sort();
            if sides == [Ty::var("A"), Ty::var("B")] {
                Ok(format!("not amenable under {eq}"))
            } else {
                Err(format!("wrong equation {eq}"))
            }
        }
        Err(e) => Err(format!("unexpected error: {e}")),
        Ok(_) => Err("case analysis succeeded".into()),
    }
}

fn disjunction_unprovable() -> Outcome {
    match load("disjunction.thm").map_err(|e| *e) {
        Err(SessionError::Tactic { theorem, error: TacticError::NoProofFound(5), .. }) if theorem == "type_dependent" => {
            Ok("search 5 finds no proof (expected failure)".into())
        }
        Err(e) => Err(format!("unexpected error: {e}")),
        Ok(_) => Err("the disjunction was proved".into()),
    }
}

fn corpus_replays() -> Outcome {
    let mut theorems = Vec::new();
    let mut replays = 0;
    for file in ["gappend.thm", "lists.thm", "spec_append.thm"] {
        let s = load(file).map_err(|e| format!("{file}: {e}"))?;
        all_proved(&s)?;
        replays += replay_ok(&s, "i, list i, i -> i").map_err(|e| format!("{file}: {e}"))?;
        theorems.extend(s.theorems.keys().map(|k| k.to_string()));
    }
    for needed in ["rev_det", "member_rev", "member_app_l"] {
        if !theorems.iter().any(|t| t == needed) {
            return Err(format!("{needed} missing from the corpus"));
        }
    }
    if theorems.len() < 10 {
        return Err(format!("only {} theorems", theorems.len()));
    }
    Ok(format!("{} theorems, {replays} replay(s) ok", theorems.len()))
}

fn unification_oracle() -> Outcome {
    let mut s = Session::default();
    s.load_text(FO_DECLS).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut unifiable, mut clashes) = (0, 0);
    for k in 0..1000 {
        let (l, r) = random_problem(&mut rng);
        let problem = UnifyProblem { equations: vec![(l.to_term(), r.to_term())], ..Default::default() };
        let got = pattern_unify(&s.sig, &problem, &mut Fresh::new());
        let expected = mgu(&l, &r);
        let mut vars = Vec::new();
        l.vars(&mut vars);
        r.vars(&mut vars);
        match (got, expected) {
            (Ok((theta, _)), Some(sigma)) => {
                let ours: Vec<Fo> = vars
                    .iter()
                    .map(|v| {
                        let mut t = Fo::Var(v.clone()).to_term();
                        for _ in 0..8 {
                            t = t.subst(&theta).normalize();
                        }
                        Fo::of_term(&t).expect("first-order result")
                    })
                    .collect();
                let theirs: Vec<Fo> = vars.iter().map(|v| Fo::Var(v.clone()).apply(&sigma)).collect();
                if !equal_up_to_renaming(&ours, &theirs) {
                    return Err(format!("problem {k}: {l} =?= {r}: unifiers differ"));
                }
                unifiable += 1;
            }
            (Err(PatternError::NoUnifier(_)), None) => clashes += 1,
            (got, expected) => {
                return Err(format!("problem {k}: {l} =?= {r}: got {got:?}, oracle {expected:?}"));
            }
        }
    }
    Ok(format!("1000 problems agree ({unifiable} unifiable, {clashes} not)"))
}

const SOLVE_DEPTH: usize = 12;
const SEARCH_DEPTH: usize = 12;

/// One query: its speclog text and, when it has an output variable, its name.
struct Query {
    text: String,
    output: Option<&'static str>,
}

fn append_query(rng: &mut StdRng) -> Query {
    let (mut l1, l2) = (random_list(rng, 3), random_list(rng, 3));
    if l1.is_empty() && l2.is_empty() {
        // Lists of unknown element type would make the query non-ground.
        l1.push("a");
    }
    let (t1, t2) = (list_text(&l1), list_text(&l2));
    match rng.gen_range(0..3) {
        0 => Query { text: format!("append {t1} {t2} L"), output: Some("L") },
        1 => {
            let mut l3 = l1.clone();
            l3.extend(&l2);
            Query { text: format!("append {t1} {t2} {}", list_text(&l3)), output: None }
        }
        _ => Query { text: format!("append {t1} {t2} {}", list_text(&random_list(rng, 4))), output: None },
    }
}

fn member_query(rng: &mut StdRng) -> Query {
    let l = random_list(rng, 4);
    if !l.is_empty() && rng.gen_bool(0.3) {
        return Query { text: format!("member X {}", list_text(&l)), output: Some("X") };
    }
    Query { text: format!("member {} {}", ["a", "b", "c"][rng.gen_range(0..3)], list_text(&l)), output: None }
}

fn two_level(spec: &str, gen: fn(&mut StdRng) -> Query, seed: u64) -> Result<(usize, usize), String> {
    let mut s = Session::new(corpus_dir());
    s.exec(&format!("Specification \"{spec}\".")).map_err(|e| e.to_string())?;
    let prog = s.specs.iter().find(|p| p.name == spec).ok_or("specification not recorded")?.clone();
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut yes, mut no) = (0, 0);
    for k in 0..50 {
        let q = gen(&mut rng);
        let parsed = parse_query(&s.sig, &q.text).map_err(|e| format!("{}: {e}", q.text))?;
        let answer = solve(&s.sig, &prog, &parsed, SOLVE_DEPTH).map_err(|e| format!("{}: {e}", q.text))?;
        let name = format!("{spec}_q{k}");
        let stmt = match q.output {
            Some(x) => format!("exists {x}, {{{}}}", q.text),
            None => format!("{{{}}}", q.text),
        };
        let proved = s.exec(&format!("Theorem {name} : {stmt}.\nsearch {SEARCH_DEPTH}.\nQed."));
        if proved.is_err() {
            s.abort();
        }
        match (answer, proved) {
            (SolveResult::Success(bindings), Ok(_)) => {
                if let Some(x) = q.output {
                    let Some(entry) = s.theorems.get(name.as_str()) else {
                        return Err(format!("{}: {name} not recorded; have {:?}", q.text, s.theorems.keys().collect::<Vec<_>>()));
                    };
                    let proof = &entry.proof;
                    let Step::ExistsR { witness } = &proof.step else {
                        return Err(format!("{}: proof does not start with a witness", q.text));
                    };
                    let printer = Printer::default();
                    let ours = printer.term(&witness.normalize());
                    let theirs = bindings.iter().find(|(n, _)| &**n == x).map(|(_, t)| printer.term(t)).unwrap_or_default();
                    if ours != theirs {
                        return Err(format!("{}: search answers {ours}, solve answers {theirs}", q.text));
                    }
                }
                yes += 1;
            }
            (SolveResult::Exhausted, Err(SessionError::Tactic { error: TacticError::NoProofFound(_), .. })) => no += 1,
            (answer, proved) => {
                return Err(format!("{}: solve {answer:?}, search {:?}", q.text, proved.map(|_| "proved")));
            }
        }
    }
    Ok((yes, no))
}

fn two_level_agreement() -> Outcome {
    let (ay, an) = two_level("append", append_query, 11)?;
    let (my, mn) = two_level("member", member_query, 12)?;
    Ok(format!("append {ay} yes/{an} no, member {my} yes/{mn} no"))
}

fn wf_rejections() -> Outcome {
    let cases = [
        ("clause_params_overlap", DiagCode::ClauseParamsOverlap),
        ("ill_formed_type", DiagCode::IllFormedType),
        ("wrong_instance", DiagCode::WrongInstance),
        ("body_tyvar_not_in_head", DiagCode::BodyTyvarNotInHead),
        ("inductive_clause_params", DiagCode::InductiveClauseParams),
        ("negative_occurrence", DiagCode::NegativeOccurrence),
    ];
    for (file, code) in cases {
        let mut s = Session::new(wf_dir());
        match s.load_file(&wf_dir().join(format!("{file}.thm"))) {
            Err(SessionError::Wellformed { diags, .. }) if diags.iter().map(|d| d.code).collect::<Vec<_>>() == [code] => {}
            Err(e) => return Err(format!("{file}: {e}")),
            Ok(()) => return Err(format!("{file}: accepted")),
        }
    }
    Ok(format!("{} files rejected with the matching code", cases.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("generic append corpus checks and replays at i, list i, i -> i", gappend_corpus),
        ("specification append corpus proves and replays at i, list i", spec_corpus),
        ("case on keq (kp x) (kp y) is not amenable under A = B", keq_not_amenable),
        ("type-dependent disjunction is not found by search 5", disjunction_unprovable),
        ("every corpus theorem replays at every pool assignment", corpus_replays),
        ("pattern unification agrees with a first-order MGU oracle", unification_oracle),
        ("solve and search agree on random append/member queries", two_level_agreement),
        ("ill-formed definitions are rejected with matching codes", wf_rejections),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
