//! Concrete syntax for terms and formulas, matching what the parser reads.

use super::formula::{Atom, Formula};
use super::term::Term;
use super::ty::Ty;

#[derive(Clone, Copy, Debug, Default)]
pub struct Printer {
    /// Print explicit type arguments on every constant and predicate.
    pub show_instances: bool,
}

pub fn term_to_string(t: &Term) -> String {
    Printer::default().term(t)
}

pub fn formula_to_string(f: &Formula) -> String {
    Printer::default().formula(f)
}

struct Scope {
    names: Vec<String>,
    taken: Vec<String>,
}

impl Scope {
    fn new(taken: Vec<String>) -> Self {
        Scope { names: Vec::new(), taken }
    }

    fn push(&mut self, hint: &str) -> String {
        let base = if hint.is_empty() { "x" } else { hint };
        let mut name = base.to_string();
        let mut k = 1;
        while self.names.contains(&name) || self.taken.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.names.push(name.clone());
        name
    }

    fn pop(&mut self) {
        self.names.pop();
    }

    fn lookup(&self, k: usize) -> String {
        self.names.len().checked_sub(k + 1).map(|i| self.names[i].clone()).unwrap_or_else(|| format!("#{k}"))
    }
}

fn free_names_term(t: &Term) -> Vec<String> {
    let mut v = Vec::new();
    t.collect_free(&mut v);
    v.iter()
        .filter_map(|t| match t {
            Term::Eigen(n, _) | Term::Meta(n, _) => Some(n.to_string()),
            _ => None,
        })
        .collect()
}

fn free_names_formula(f: &Formula) -> Vec<String> {
    let mut v = Vec::new();
    f.collect_free(&mut v);
    v.iter()
        .filter_map(|t| match t {
            Term::Eigen(n, _) | Term::Meta(n, _) => Some(n.to_string()),
            _ => None,
        })
        .collect()
}

impl Printer {
    pub fn ty(&self, t: &Ty) -> String {
        t.to_string()
    }

    pub fn term(&self, t: &Term) -> String {
        let mut scope = Scope::new(free_names_term(t));
        let mut out = String::new();
        self.term_prec(t, 0, &mut scope, &mut out);
        out
    }

    /// Prints a term that lives under the quantifiers named in `bound`,
    /// outermost first.
    pub fn term_in(&self, t: &Term, bound: &[String]) -> String {
        let mut scope = Scope::new(free_names_term(t));
        scope.names = bound.to_vec();
        let mut out = String::new();
        self.term_prec(t, 0, &mut scope, &mut out);
        out
    }

    pub fn formula(&self, f: &Formula) -> String {
        let mut scope = Scope::new(free_names_formula(f));
        let mut out = String::new();
        self.formula_prec(f, 0, &mut scope, &mut out);
        out
    }

    fn constant(&self, c: &str, tys: &[Ty], out: &mut String) {
        out.push_str(c);
        if self.show_instances && !tys.is_empty() {
            let parts: Vec<String> = tys.iter().map(|t| t.to_string()).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
    }

    // Precedences: 0 anything, 1 no lambda or cons, 2 atomic only.
    fn term_prec(&self, t: &Term, prec: u8, scope: &mut Scope, out: &mut String) {
        match t {
            Term::Lam(b, body) => {
                if prec > 0 {
                    out.push('(');
                }
                let name = scope.push(&b.hint.0);
                out.push_str(&name);
                if self.show_instances {
                    out.push(':');
                    out.push_str(&b.ty.to_string());
                }
                out.push_str("\\ ");
                self.term_prec(body, 0, scope, out);
                scope.pop();
                if prec > 0 {
                    out.push(')');
                }
            }
            Term::App(h, args) => {
                if let (Term::Const(c, _), [x, xs]) = (&**h, args.as_slice()) {
                    if &**c == "cons" {
                        if prec > 0 {
                            out.push('(');
                        }
                        self.term_prec(x, 1, scope, out);
                        out.push_str(" :: ");
                        self.term_prec(xs, 0, scope, out);
                        if prec > 0 {
                            out.push(')');
                        }
                        return;
                    }
                    if &**c == "&&" {
                        if prec > 0 {
                            out.push('(');
                        }
                        self.term_prec(x, 1, scope, out);
                        out.push_str(" && ");
                        self.term_prec(xs, 0, scope, out);
                        if prec > 0 {
                            out.push(')');
                        }
                        return;
                    }
                }
                if prec > 1 {
                    out.push('(');
                }
                self.term_prec(h, 2, scope, out);
                for a in args {
                    out.push(' ');
                    self.term_prec(a, 2, scope, out);
                }
                if prec > 1 {
                    out.push(')');
                }
            }
            Term::Const(c, tys) => self.constant(c, tys, out),
            Term::Eigen(n, _) | Term::Meta(n, _) => out.push_str(n),
            Term::Bound(k) => out.push_str(&scope.lookup(*k)),
        }
    }

    fn atom(&self, a: &Atom, prec: u8, scope: &mut Scope, out: &mut String) {
        if &*a.pred == "eq" && a.args.len() == 2 {
            if prec > 3 {
                out.push('(');
            }
            self.term_prec(&a.args[0], 0, scope, out);
            out.push_str(" = ");
            self.term_prec(&a.args[1], 0, scope, out);
            if prec > 3 {
                out.push(')');
            }
            return;
        }
        self.constant(&a.pred, &a.tys, out);
        out.push_str(a.ann.suffix());
        for t in &a.args {
            out.push(' ');
            self.term_prec(t, 2, scope, out);
        }
    }

    // Precedences: 0 quantifiers, 1 implication, 2 disjunction, 3 conjunction, 4 atomic.
    fn formula_prec(&self, f: &Formula, prec: u8, scope: &mut Scope, out: &mut String) {
        if let Some(goal) = spec_goal(f) {
            out.push('{');
            scope.push("n");
            self.term_prec(&unwrap_atm(goal), 0, scope, out);
            scope.pop();
            out.push('}');
            return;
        }
        match f {
            Formula::Top => out.push_str("true"),
            Formula::Bot => out.push_str("false"),
            Formula::Atom(a) => self.atom(a, prec, scope, out),
            Formula::And(a, b) => {
                if prec > 3 {
                    out.push('(');
                }
                self.formula_prec(a, 3, scope, out);
                out.push_str(" /\\ ");
                self.formula_prec(b, 4, scope, out);
                if prec > 3 {
                    out.push(')');
                }
            }
            Formula::Or(a, b) => {
                if prec > 2 {
                    out.push('(');
                }
                self.formula_prec(a, 2, scope, out);
                out.push_str(" \\/ ");
                self.formula_prec(b, 3, scope, out);
                if prec > 2 {
                    out.push(')');
                }
            }
            Formula::Imp(a, b) => {
                if prec > 1 {
                    out.push('(');
                }
                self.formula_prec(a, 2, scope, out);
                out.push_str(" -> ");
                self.formula_prec(b, 1, scope, out);
                if prec > 1 {
                    out.push(')');
                }
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                let is_all = matches!(f, Formula::Forall(..));
                if prec > 0 {
                    out.push('(');
                }
                out.push_str(if is_all { "forall" } else { "exists" });
                let mut cur = f;
                let mut pushed = 0;
                loop {
                    match (cur, is_all) {
                        (Formula::Forall(x, body), true) | (Formula::Exists(x, body), false) if spec_goal(cur).is_none() => {
                            let name = scope.push(&x.hint.0);
                            out.push(' ');
                            if self.show_instances {
                                out.push_str(&format!("({name}:{})", x.ty));
                            } else {
                                out.push_str(&name);
                            }
                            pushed += 1;
                            cur = body;
                        }
                        _ => break,
                    }
                }
                out.push_str(", ");
                self.formula_prec(cur, 0, scope, out);
                for _ in 0..pushed {
                    scope.pop();
                }
                if prec > 0 {
                    out.push(')');
                }
            }
        }
    }
}

/// Recognizes `exists n:nat, nat n /\ prove n G` and returns `G` when it is
/// closed with respect to `n`, so it can be shown as `{G}`.
fn spec_goal(f: &Formula) -> Option<&Term> {
    let Formula::Exists(x, body) = f else { return None };
    if x.ty != Ty::sort("nat") {
        return None;
    }
    let Formula::And(l, r) = &**body else { return None };
    let (Formula::Atom(n), Formula::Atom(p)) = (&**l, &**r) else { return None };
    if &*n.pred != "nat" || &*p.pred != "prove" || n.args != [Term::Bound(0)] || p.args.len() != 2 {
        return None;
    }
    if p.args[0] != Term::Bound(0) || p.args[1].mentions_bound(0) || n.ann != p.ann {
        return None;
    }
    Some(&p.args[1])
}

fn unwrap_atm(t: &Term) -> Term {
    match t.head_spine() {
        (Term::Const(c, _), [x]) if &**c == "atm" => x.clone(),
        (Term::Const(c, tys), [a, b]) if &**c == "&&" => Term::app(Term::Const(c.clone(), tys.clone()), vec![unwrap_atm(a), unwrap_atm(b)]),
        _ => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cons_is_right_associative() {
        let i = Ty::sort("i");
        let l = Ty::app("list", vec![i.clone()]);
        let cons = |x: Term, xs: Term| Term::app(Term::constant("cons", vec![i.clone()]), vec![x, xs]);
        let t = cons(Term::eigen("X", i.clone()), cons(Term::eigen("Y", i.clone()), Term::eigen("L", l)));
        assert_eq!(term_to_string(&t), "X :: Y :: L");
    }

    #[test]
    fn quantifier_blocks_merge() {
        let i = Ty::sort("i");
        let f = Formula::forall(
            "x",
            i.clone(),
            Formula::forall("y", i.clone(), Formula::imp(Formula::eq(i.clone(), Term::Bound(1), Term::Bound(0)), Formula::Top)),
        );
        assert_eq!(formula_to_string(&f), "forall x y, x = y -> true");
    }
}
