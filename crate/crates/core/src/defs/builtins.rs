//! Equality, natural numbers and the encoding of specification-level
//! provability, available in every signature.

use super::{add_block, DefBlock, Diagnostic, SchematicClause};
use crate::syntax::{Atom, ConstKind, Formula, Name, Signature, Term, Ty, TySchema};

pub fn nat() -> Ty {
    Ty::sort("nat")
}

pub fn o() -> Ty {
    Ty::sort("o")
}

pub fn zero() -> Term {
    Term::constant("z", vec![])
}

pub fn succ(n: Term) -> Term {
    Term::app(Term::constant("s", vec![]), vec![n])
}

pub fn tt() -> Term {
    Term::constant("tt", vec![])
}

pub fn conj(a: Term, b: Term) -> Term {
    Term::app(Term::constant("&&", vec![]), vec![a, b])
}

pub fn atm(a: Term) -> Term {
    Term::app(Term::constant("atm", vec![]), vec![a])
}

fn clause(binder: &[(&str, Ty)], head: Atom, body: Formula) -> SchematicClause {
    SchematicClause { params: Vec::new(), binder: binder.iter().map(|(x, t)| (Name::from(*x), t.clone())).collect(), head, body }
}

pub(crate) fn install(sig: &mut Signature) -> Result<(), Vec<Diagnostic>> {
    let wrap = |e: crate::syntax::SigError| vec![Diagnostic { code: super::DiagCode::Duplicate, message: e.to_string() }];
    sig.declare_kind("nat", 0).map_err(wrap)?;
    let mono = |t: Ty| TySchema::mono(t);
    sig.declare_const("z", mono(nat()), ConstKind::NonLogical).map_err(wrap)?;
    sig.declare_const("s", mono(Ty::arrow(nat(), nat())), ConstKind::NonLogical).map_err(wrap)?;
    sig.declare_const("tt", mono(o()), ConstKind::NonLogical).map_err(wrap)?;
    sig.declare_const("&&", mono(Ty::arrows([o(), o()], o())), ConstKind::NonLogical).map_err(wrap)?;
    sig.declare_const("atm", mono(Ty::arrow(o(), o())), ConstKind::NonLogical).map_err(wrap)?;

    let a = Ty::var("A");
    let x = Term::eigen("x", a.clone());
    add_block(
        sig,
        DefBlock {
            params: vec![Name::from("A")],
            preds: vec![(Name::from("eq"), Ty::arrows([a.clone(), a.clone()], Ty::prop()))],
            clauses: vec![clause(&[("x", a.clone())], Atom::new("eq", vec![a], vec![x.clone(), x]), Formula::Top)],
            inductive: false,
        },
    )?;

    let n = Term::eigen("n", nat());
    add_block(
        sig,
        DefBlock {
            params: vec![],
            preds: vec![(Name::from("nat"), Ty::arrow(nat(), Ty::prop()))],
            clauses: vec![
                clause(&[], Atom::new("nat", vec![], vec![zero()]), Formula::Top),
                clause(&[("n", nat())], Atom::new("nat", vec![], vec![succ(n.clone())]), Formula::atom("nat", vec![], vec![n.clone()])),
            ],
            inductive: true,
        },
    )?;

    add_block(
        sig,
        DefBlock {
            params: vec![],
            preds: vec![(Name::from("prog"), Ty::arrows([o(), o()], Ty::prop()))],
            clauses: vec![],
            inductive: false,
        },
    )?;

    let g = |s: &str| Term::eigen(s, o());
    let prove = |n: Term, g: Term| Formula::atom("prove", vec![], vec![n, g]);
    add_block(
        sig,
        DefBlock {
            params: vec![],
            preds: vec![(Name::from("prove"), Ty::arrows([nat(), o()], Ty::prop()))],
            clauses: vec![
                clause(&[("n", nat())], Atom::new("prove", vec![], vec![n.clone(), tt()]), Formula::Top),
                clause(
                    &[("n", nat()), ("g1", o()), ("g2", o())],
                    Atom::new("prove", vec![], vec![succ(n.clone()), conj(g("g1"), g("g2"))]),
                    Formula::and(prove(n.clone(), g("g1")), prove(n.clone(), g("g2"))),
                ),
                clause(
                    &[("n", nat()), ("a", o())],
                    Atom::new("prove", vec![], vec![succ(n.clone()), atm(g("a"))]),
                    Formula::exists(
                        "g",
                        o(),
                        Formula::and(Formula::atom("prog", vec![], vec![g("a"), Term::Bound(0)]), prove(n.clone(), Term::Bound(0))),
                    ),
                ),
            ],
            inductive: true,
        },
    )?;
    Ok(())
}

/// `{g}`: there is a height at which `g` is provable from the program. Loose
/// indices in `goal` refer to enclosing quantifiers.
pub fn brace(goal: Term) -> Formula {
    Formula::exists(
        "n",
        nat(),
        Formula::and(
            Formula::atom("nat", vec![], vec![Term::Bound(0)]),
            Formula::atom("prove", vec![], vec![Term::Bound(0), goal.shift(1, 0)]),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_install_cleanly() {
        let sig = Signature::with_builtins();
        for p in ["eq", "nat", "prog", "prove"] {
            assert!(sig.is_predicate(p), "{p}");
        }
        assert!(sig.block_of("prove").unwrap().inductive);
        assert!(!sig.block_of("prog").unwrap().inductive);
        assert!(sig.block_index("prog") < sig.block_index("prove"));
    }
}
