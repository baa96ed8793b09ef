//! Invariants checked on random inputs.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use schematic::engine::Sequent;
use schematic::frontend::session::Session;
use schematic::frontend::{elab_statement, parse_formula};
use schematic::syntax::{Formula, Printer, Term, TermSubst, Ty, TySubst};
use schematic::tactics::search;
use schematic::unify::{pattern_unify, UnifyProblem};

fn i() -> Ty {
    Ty::sort("i")
}

fn fo_session() -> Session {
    let mut s = Session::default();
    s.load_text(FO_DECLS).unwrap();
    s.load_text(
        "Define p : i -> prop by p a.
         Define q : i -> i -> prop by q X X.
         Define r : (i -> i) -> prop by r F.",
    )
    .unwrap();
    s
}

/// A term of type `i` under `depth` binders of type `i`.
fn gen_term(rng: &mut StdRng, depth: usize, size: usize) -> Term {
    let leaf = size == 0 || rng.gen_bool(0.4);
    if leaf {
        if depth > 0 && rng.gen_bool(0.5) {
            return Term::Bound(rng.gen_range(0..depth));
        }
        return Term::constant(["a", "b", "c"][rng.gen_range(0..3)], vec![]);
    }
    match rng.gen_range(0..3) {
        0 => Term::app(Term::constant("g", vec![]), vec![gen_term(rng, depth, size - 1)]),
        1 => Term::app(Term::constant("f", vec![]), vec![gen_term(rng, depth, size - 1), gen_term(rng, depth, size - 1)]),
        _ => {
            // A beta-redex: (x\ body) arg.
            let body = gen_term(rng, depth + 1, size - 1);
            Term::App(Box::new(Term::lam("x", i(), body)), vec![gen_term(rng, depth, size - 1)])
        }
    }
}

fn gen_formula(rng: &mut StdRng, depth: usize, size: usize) -> Formula {
    if size == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 => Formula::atom("p", vec![], vec![gen_term(rng, depth, 2)]),
            3 => Formula::atom("q", vec![], vec![gen_term(rng, depth, 2), gen_term(rng, depth, 2)]),
            4 => Formula::eq(i(), gen_term(rng, depth, 2), gen_term(rng, depth, 2)),
            _ => Formula::atom("r", vec![], vec![Term::lam("y", i(), gen_term(rng, depth + 1, 2))]),
        };
    }
    let sub = |rng: &mut StdRng, d| gen_formula(rng, d, size - 1);
    match rng.gen_range(0..5) {
        0 => Formula::and(sub(rng, depth), sub(rng, depth)),
        1 => Formula::or(sub(rng, depth), sub(rng, depth)),
        2 => Formula::imp(sub(rng, depth), sub(rng, depth)),
        k => {
            // Mention the bound variable so that its type is determined.
            let body = Formula::and(Formula::atom("p", vec![], vec![Term::Bound(0)]), sub(rng, depth + 1));
            if k == 3 {
                Formula::forall("x", i(), body)
            } else {
                Formula::exists("x", i(), body)
            }
        }
    }
}

fn lists_session() -> Session {
    let mut s = Session::new(corpus_dir());
    s.load_file(&corpus_dir().join("lists.thm")).unwrap();
    s.load_text("Type a i. Type b i. Type c i.").unwrap();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>()) {
        let s = fo_session();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = gen_formula(&mut rng, 0, 4).normalize();
        let text = Printer::default().formula(&f);
        let parsed = parse_formula(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        let back = elab_statement(&s.sig, &[], &parsed).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(back.aeq(&f), "{} reads back as {}", text, Printer::default().formula(&back));
    }

    #[test]
    fn unifiers_equate_both_sides(seed in any::<u64>()) {
        let s = fo_session();
        let mut rng = StdRng::seed_from_u64(seed);
        let (l, r) = random_problem(&mut rng);
        let problem = UnifyProblem { equations: vec![(l.to_term(), r.to_term())], ..Default::default() };
        if let Ok((theta, _)) = pattern_unify(&s.sig, &problem, &mut schematic::syntax::Fresh::new()) {
            let close = |t: Term| (0..8).fold(t, |t, _| t.subst(&theta).normalize());
            prop_assert_eq!(close(l.to_term()), close(r.to_term()));
        } else {
            prop_assert!(mgu(&l, &r).is_none());
        }
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = gen_term(&mut rng, 0, 5);
        let n = t.normalize();
        prop_assert!(n.is_normal());
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn type_and_term_substitutions_commute(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = Ty::var("A");
        let la = Ty::app("list", vec![a.clone()]);
        let nil = |t: &Ty| Term::constant("nil", vec![t.clone()]);
        let cons = |t: &Ty, x: Term, l: Term| Term::app(Term::constant("cons", vec![t.clone()]), vec![x, l]);
        let (m, x) = (Term::meta("M", la.clone()), Term::meta("X", a.clone()));
        let mut t = nil(&a);
        for _ in 0..rng.gen_range(0..4) {
            t = match rng.gen_range(0..3) {
                0 => cons(&a, x.clone(), t),
                1 => cons(&a, x.clone(), m.clone()),
                _ => t,
            };
        }
        let theta = TermSubst::from_pairs([
            ("M".into(), cons(&a, Term::meta("Y", a.clone()), nil(&a))),
            ("X".into(), Term::meta("Z", a.clone())),
        ]);
        let ground = [Ty::sort("i"), Ty::app("list", vec![Ty::sort("i")])][rng.gen_range(0..2)].clone();
        let phi = TySubst::single("A".into(), ground);
        let left = t.subst(&theta).ty_subst(&phi);
        let right = t.ty_subst(&phi).subst(&theta.ty_subst(&phi));
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn search_is_monotone_in_depth(seed in any::<u64>()) {
        let s = lists_session();
        let mut rng = StdRng::seed_from_u64(seed);
        let (l1, l2) = (random_list(&mut rng, 2), random_list(&mut rng, 2));
        let text = if rng.gen_bool(0.5) {
            let l3 = if rng.gen_bool(0.5) { [l1.clone(), l2.clone()].concat() } else { random_list(&mut rng, 3) };
            format!("app[i] {} {} {}", list_text(&l1), list_text(&l2), list_text(&l3))
        } else {
            format!("member[i] {} {}", ["a", "b", "c"][rng.gen_range(0..3)], list_text(&l1))
        };
        let goal = elab_statement(&s.sig, &[], &parse_formula(&text).unwrap()).unwrap();
        let seq = Sequent::new(vec![], goal);
        let mut proved_before = false;
        for d in 0..6 {
            let proved = search(s.env(), &seq, d).is_ok();
            prop_assert!(proved || !proved_before, "{} proved at depth {} but not {}", text, d - 1, d);
            proved_before = proved;
        }
    }

    #[test]
    fn undo_restores_the_state(seed in any::<u64>(), steps in 0usize..4) {
        const TACTICS: [&str; 6] = ["intros.", "induction on 1.", "case H1.", "search.", "split.", "left."];
        let mut s = lists_session();
        s.exec("Theorem probe [A] : forall (L1 L2 L3 L4 : list A), app L1 L2 L3 -> app L1 L2 L4 -> L3 = L4.").unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..steps {
            let _ = s.exec(TACTICS[rng.gen_range(0..TACTICS.len())]);
        }
        let before = s.summary();
        let tactic = TACTICS[rng.gen_range(0..TACTICS.len())];
        if s.exec(tactic).is_ok() {
            s.undo().unwrap();
        }
        prop_assert_eq!(s.summary(), before);
    }
}
