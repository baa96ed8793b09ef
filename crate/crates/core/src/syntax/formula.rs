use super::term::{Binder, Term, TermSubst};
use super::ty::{Ty, TySubst};
use super::Name;

/// Induction bookkeeping carried on the head of an atom. The number is the
/// generation of the induction that introduced the mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotation {
    Plain,
    /// Strictly smaller than the inductive argument; usable with the hypothesis.
    Star(u32),
    /// The inductive argument itself.
    At(u32),
}

impl Annotation {
    pub fn generation(self) -> Option<u32> {
        match self {
            Annotation::Plain => None,
            Annotation::Star(g) | Annotation::At(g) => Some(g),
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Annotation::Plain => "",
            Annotation::Star(_) => "*",
            Annotation::At(_) => "@",
        }
    }
}

/// A predicate applied at a type instance to its arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Name,
    pub tys: Vec<Ty>,
    pub args: Vec<Term>,
    pub ann: Annotation,
}

impl Atom {
    pub fn new(pred: &str, tys: Vec<Ty>, args: Vec<Term>) -> Self {
        Atom { pred: Name::from(pred), tys, args, ann: Annotation::Plain }
    }
}

/// Formulas are the normal forms of terms of type `prop`. Quantifier bodies
/// refer to their variable as index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Binder, Box<Formula>),
    Exists(Binder, Box<Formula>),
    Atom(Atom),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(name: &str, ty: Ty, body: Formula) -> Formula {
        Formula::Forall(Binder::new(name, ty), Box::new(body))
    }

    pub fn exists(name: &str, ty: Ty, body: Formula) -> Formula {
        Formula::Exists(Binder::new(name, ty), Box::new(body))
    }

    pub fn atom(pred: &str, tys: Vec<Ty>, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(pred, tys, args))
    }

    pub fn eq(ty: Ty, a: Term, b: Term) -> Formula {
        Formula::atom("eq", vec![ty], vec![a, b])
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn annotation(&self) -> Annotation {
        match self {
            Formula::Atom(a) => a.ann,
            _ => Annotation::Plain,
        }
    }

    /// Rebuilds every term, passing the number of quantifiers crossed.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term, usize) -> Term) -> Formula {
        self.map_terms_at(0, f)
    }

    fn map_terms_at(&self, depth: usize, f: &mut impl FnMut(&Term, usize) -> Term) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.map_terms_at(depth, f), b.map_terms_at(depth, f)),
            Formula::Or(a, b) => Formula::or(a.map_terms_at(depth, f), b.map_terms_at(depth, f)),
            Formula::Imp(a, b) => Formula::imp(a.map_terms_at(depth, f), b.map_terms_at(depth, f)),
            Formula::Forall(x, body) => Formula::Forall(x.clone(), Box::new(body.map_terms_at(depth + 1, f))),
            Formula::Exists(x, body) => Formula::Exists(x.clone(), Box::new(body.map_terms_at(depth + 1, f))),
            Formula::Atom(a) => Formula::Atom(Atom {
                pred: a.pred.clone(),
                tys: a.tys.clone(),
                args: a.args.iter().map(|t| f(t, depth)).collect(),
                ann: a.ann,
            }),
        }
    }

    pub fn for_each_term(&self, f: &mut impl FnMut(&Term, usize)) {
        self.for_each_term_at(0, f)
    }

    fn for_each_term_at(&self, depth: usize, f: &mut impl FnMut(&Term, usize)) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.for_each_term_at(depth, f);
                b.for_each_term_at(depth, f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.for_each_term_at(depth + 1, f),
            Formula::Atom(a) => a.args.iter().for_each(|t| f(t, depth)),
        }
    }

    pub fn map_types(&self, f: &mut impl FnMut(&Ty) -> Ty) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.map_types(f), b.map_types(f)),
            Formula::Or(a, b) => Formula::or(a.map_types(f), b.map_types(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_types(f), b.map_types(f)),
            Formula::Forall(x, body) => Formula::Forall(Binder { hint: x.hint.clone(), ty: f(&x.ty) }, Box::new(body.map_types(f))),
            Formula::Exists(x, body) => Formula::Exists(Binder { hint: x.hint.clone(), ty: f(&x.ty) }, Box::new(body.map_types(f))),
            Formula::Atom(a) => Formula::Atom(Atom {
                pred: a.pred.clone(),
                tys: a.tys.iter().map(&mut *f).collect(),
                args: a.args.iter().map(|t| t.map_types(f)).collect(),
                ann: a.ann,
            }),
        }
    }

    pub fn for_each_type(&self, f: &mut impl FnMut(&Ty)) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.for_each_type(f);
                b.for_each_type(f);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                f(&x.ty);
                body.for_each_type(f);
            }
            Formula::Atom(a) => {
                a.tys.iter().for_each(&mut *f);
                a.args.iter().for_each(|t| t.for_each_type(f));
            }
        }
    }

    pub fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.for_each_atom(f),
            Formula::Atom(a) => f(a),
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_atoms(f), b.map_atoms(f)),
            Formula::Forall(x, body) => Formula::Forall(x.clone(), Box::new(body.map_atoms(f))),
            Formula::Exists(x, body) => Formula::Exists(x.clone(), Box::new(body.map_atoms(f))),
            Formula::Atom(a) => Formula::Atom(f(a)),
        }
    }

    /// Instantiates the variable of an outer quantifier whose body is `self`.
    pub fn instantiate(&self, s: &Term) -> Formula {
        self.map_terms(&mut |t, depth| t.subst_bound(depth, s).normalize())
    }

    pub fn subst(&self, s: &TermSubst) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        self.map_terms(&mut |t, _| t.subst(s))
    }

    pub fn ty_subst(&self, s: &TySubst) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        self.map_types(&mut |t| t.subst(s))
    }

    pub fn normalize(&self) -> Formula {
        self.map_terms(&mut |t, _| t.normalize())
    }

    pub fn strip_annotations(&self) -> Formula {
        self.map_atoms(&mut |a| Atom { ann: Annotation::Plain, ..a.clone() })
    }

    /// Alpha-beta-eta equivalence, ignoring induction annotations.
    pub fn aeq(&self, other: &Formula) -> bool {
        self.strip_annotations() == other.strip_annotations()
    }

    pub fn collect_tyvars(&self, out: &mut Vec<Name>) {
        self.for_each_type(&mut |t| t.collect_vars(out));
    }

    pub fn tyvars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_tyvars(&mut out);
        out
    }

    pub fn collect_free(&self, out: &mut Vec<Term>) {
        self.for_each_term(&mut |t, _| t.collect_free(out));
    }

    pub fn mentions_name(&self, name: &str) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t, _| found |= t.mentions_name(name));
        found
    }

    pub fn has_meta(&self) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t, _| found |= t.has_meta());
        found
    }

    pub fn rename_vars(&self, f: &impl Fn(&Name) -> Option<Name>) -> Formula {
        self.map_terms(&mut |t, _| t.rename_vars(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiate_under_binders() {
        let i = Ty::sort("i");
        // forall y, p x y  with x as the outer variable (index 1 inside the body)
        let body = Formula::forall("y", i.clone(), Formula::atom("p", vec![], vec![Term::Bound(1), Term::Bound(0)]));
        let c = Term::constant("c", vec![]);
        let inst = body.instantiate(&c);
        assert_eq!(inst, Formula::forall("y", i, Formula::atom("p", vec![], vec![c, Term::Bound(0)])));
    }

    #[test]
    fn aeq_ignores_annotations() {
        let a = Formula::atom("p", vec![], vec![]);
        let mut b = a.clone();
        if let Formula::Atom(at) = &mut b {
            at.ann = Annotation::Star(1);
        }
        assert_ne!(a, b);
        assert!(a.aeq(&b));
    }
}
