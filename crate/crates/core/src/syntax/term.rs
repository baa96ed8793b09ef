use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::ty::{Ty, TySubst};
use super::Name;

/// A display name for a binder. Two hints always compare equal, so derived
/// equality on terms is equality up to renaming of bound variables.
#[derive(Clone, Debug)]
pub struct Hint(pub Name);

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl Hint {
    pub fn new(name: &str) -> Self {
        Hint(Name::from(name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub hint: Hint,
    pub ty: Ty,
}

impl Binder {
    pub fn new(name: &str, ty: Ty) -> Self {
        Binder { hint: Hint::new(name), ty }
    }
}

/// Simply typed lambda terms with de Bruijn indices.
///
/// Terms produced by [`Term::normalize`] are beta-normal and eta-short, so the
/// derived equality coincides with beta-eta equivalence on normal terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Lam(Binder, Box<Term>),
    /// Head applied to a non-empty spine. The head is never itself an `App`.
    App(Box<Term>, Vec<Term>),
    Const(Name, Vec<Ty>),
    Eigen(Name, Ty),
    Meta(Name, Ty),
    Bound(usize),
}

impl Term {
    pub fn constant(name: &str, tys: Vec<Ty>) -> Term {
        Term::Const(Name::from(name), tys)
    }

    pub fn eigen(name: &str, ty: Ty) -> Term {
        Term::Eigen(Name::from(name), ty)
    }

    pub fn meta(name: &str, ty: Ty) -> Term {
        Term::Meta(Name::from(name), ty)
    }

    pub fn lam(name: &str, ty: Ty, body: Term) -> Term {
        Term::Lam(Binder::new(name, ty), Box::new(body))
    }

    /// Application that keeps spines flat. Does not reduce.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App(h, mut a) => {
                a.extend(args);
                Term::App(h, a)
            }
            h => Term::App(Box::new(h), args),
        }
    }

    pub fn head_spine(&self) -> (&Term, &[Term]) {
        match self {
            Term::App(h, args) => (h, args),
            t => (t, &[]),
        }
    }

    pub fn shift(&self, d: isize, cutoff: usize) -> Term {
        if d == 0 {
            return self.clone();
        }
        match self {
            Term::Bound(k) if *k >= cutoff => Term::Bound((*k as isize + d) as usize),
            Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(body.shift(d, cutoff + 1))),
            Term::App(h, args) => Term::App(Box::new(h.shift(d, cutoff)), args.iter().map(|a| a.shift(d, cutoff)).collect()),
            t => t.clone(),
        }
    }

    /// Replaces index `j` by `s` (valid outside all binders of `self`) and
    /// closes the gap. Does not reduce.
    pub fn subst_bound(&self, j: usize, s: &Term) -> Term {
        match self {
            Term::Bound(k) => {
                if *k == j {
                    s.shift(j as isize, 0)
                } else if *k > j {
                    Term::Bound(k - 1)
                } else {
                    Term::Bound(*k)
                }
            }
            Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(body.subst_bound(j + 1, s))),
            Term::App(h, args) => Term::App(Box::new(h.subst_bound(j, s)), args.iter().map(|a| a.subst_bound(j, s)).collect()),
            t => t.clone(),
        }
    }

    /// Instantiates the outermost loose index with `s` and normalizes.
    pub fn instantiate(&self, s: &Term) -> Term {
        self.subst_bound(0, s).normalize()
    }

    pub fn mentions_bound(&self, j: usize) -> bool {
        match self {
            Term::Bound(k) => *k == j,
            Term::Lam(_, body) => body.mentions_bound(j + 1),
            Term::App(h, args) => h.mentions_bound(j) || args.iter().any(|a| a.mentions_bound(j)),
            _ => false,
        }
    }

    /// True if some index escapes `depth` enclosing binders.
    pub fn has_loose(&self, depth: usize) -> bool {
        match self {
            Term::Bound(k) => *k >= depth,
            Term::Lam(_, body) => body.has_loose(depth + 1),
            Term::App(h, args) => h.has_loose(depth) || args.iter().any(|a| a.has_loose(depth)),
            _ => false,
        }
    }

    /// Beta-normal, eta-short form.
    pub fn normalize(&self) -> Term {
        match self {
            Term::Lam(b, body) => eta_contract(b.clone(), body.normalize()),
            Term::App(h, args) => {
                let h = h.normalize();
                let args = args.iter().map(Term::normalize).collect();
                apply_normal(h, args)
            }
            t => t.clone(),
        }
    }

    pub fn is_normal(&self) -> bool {
        self.normalize() == *self
    }

    /// Applies a normal head to normal arguments, reducing as needed.
    pub fn apply_normal(head: Term, args: Vec<Term>) -> Term {
        apply_normal(head, args)
    }

    /// Replaces metas and eigenvariables by name, then normalizes.
    pub fn subst(&self, s: &TermSubst) -> Term {
        if s.is_empty() || !self.mentions_any(s) {
            return self.clone();
        }
        self.replace(s).normalize()
    }

    fn mentions_any(&self, s: &TermSubst) -> bool {
        match self {
            Term::Eigen(n, _) | Term::Meta(n, _) => s.get(n).is_some(),
            Term::Lam(_, body) => body.mentions_any(s),
            Term::App(h, args) => h.mentions_any(s) || args.iter().any(|a| a.mentions_any(s)),
            _ => false,
        }
    }

    fn replace(&self, s: &TermSubst) -> Term {
        match self {
            Term::Eigen(n, _) | Term::Meta(n, _) => match s.get(n) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(body.replace(s))),
            Term::App(h, args) => Term::app(h.replace(s), args.iter().map(|a| a.replace(s)).collect()),
            t => t.clone(),
        }
    }

    pub fn ty_subst(&self, s: &TySubst) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        self.map_types(&mut |t| t.subst(s))
    }

    pub fn map_types(&self, f: &mut impl FnMut(&Ty) -> Ty) -> Term {
        match self {
            Term::Lam(b, body) => Term::Lam(Binder { hint: b.hint.clone(), ty: f(&b.ty) }, Box::new(body.map_types(f))),
            Term::App(h, args) => Term::App(Box::new(h.map_types(f)), args.iter().map(|a| a.map_types(f)).collect()),
            Term::Const(c, tys) => Term::Const(c.clone(), tys.iter().map(&mut *f).collect()),
            Term::Eigen(n, t) => Term::Eigen(n.clone(), f(t)),
            Term::Meta(n, t) => Term::Meta(n.clone(), f(t)),
            Term::Bound(k) => Term::Bound(*k),
        }
    }

    pub fn for_each_type(&self, f: &mut impl FnMut(&Ty)) {
        match self {
            Term::Lam(b, body) => {
                f(&b.ty);
                body.for_each_type(f);
            }
            Term::App(h, args) => {
                h.for_each_type(f);
                args.iter().for_each(|a| a.for_each_type(f));
            }
            Term::Const(_, tys) => tys.iter().for_each(&mut *f),
            Term::Eigen(_, t) | Term::Meta(_, t) => f(t),
            Term::Bound(_) => {}
        }
    }

    pub fn collect_tyvars(&self, out: &mut Vec<Name>) {
        self.for_each_type(&mut |t| t.collect_vars(out));
    }

    /// Free metas and eigenvariables in first-occurrence order.
    pub fn collect_free(&self, out: &mut Vec<Term>) {
        match self {
            Term::Eigen(n, _) | Term::Meta(n, _) => {
                let dup = out.iter().any(|t| matches!(t, Term::Eigen(m, _) | Term::Meta(m, _) if m == n));
                if !dup {
                    out.push(self.clone());
                }
            }
            Term::Lam(_, body) => body.collect_free(out),
            Term::App(h, args) => {
                h.collect_free(out);
                args.iter().for_each(|a| a.collect_free(out));
            }
            _ => {}
        }
    }

    pub fn mentions_name(&self, name: &str) -> bool {
        match self {
            Term::Eigen(n, _) | Term::Meta(n, _) => &**n == name,
            Term::Lam(_, body) => body.mentions_name(name),
            Term::App(h, args) => h.mentions_name(name) || args.iter().any(|a| a.mentions_name(name)),
            _ => false,
        }
    }

    pub fn has_meta(&self) -> bool {
        match self {
            Term::Meta(..) => true,
            Term::Lam(_, body) => body.has_meta(),
            Term::App(h, args) => h.has_meta() || args.iter().any(Term::has_meta),
            _ => false,
        }
    }

    /// Renames every eigenvariable and meta through `f`.
    pub fn rename_vars(&self, f: &impl Fn(&Name) -> Option<Name>) -> Term {
        match self {
            Term::Eigen(n, t) => Term::Eigen(f(n).unwrap_or_else(|| n.clone()), t.clone()),
            Term::Meta(n, t) => Term::Meta(f(n).unwrap_or_else(|| n.clone()), t.clone()),
            Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(body.rename_vars(f))),
            Term::App(h, args) => Term::App(Box::new(h.rename_vars(f)), args.iter().map(|a| a.rename_vars(f)).collect()),
            t => t.clone(),
        }
    }
}

fn apply_normal(head: Term, args: Vec<Term>) -> Term {
    if args.is_empty() {
        return head;
    }
    match head {
        Term::Lam(_, body) => {
            let mut rest = args.into_iter();
            let first = rest.next().expect("non-empty spine");
            let reduced = body.subst_bound(0, &first).normalize();
            apply_normal(reduced, rest.collect())
        }
        Term::App(h, mut prefix) => {
            prefix.extend(args);
            Term::App(h, prefix)
        }
        h => Term::App(Box::new(h), args),
    }
}

fn eta_contract(b: Binder, body: Term) -> Term {
    if let Term::App(h, args) = &body {
        if let Some((Term::Bound(0), init)) = args.split_last() {
            if !h.mentions_bound(0) && !init.iter().any(|a| a.mentions_bound(0)) {
                let reduced = Term::app((**h).clone(), init.to_vec());
                return reduced.shift(-1, 0);
            }
        }
    }
    Term::Lam(b, Box::new(body))
}

/// A finite map from meta and eigenvariable names to closed terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermSubst(BTreeMap<Name, Term>);

impl TermSubst {
    pub fn new() -> Self {
        TermSubst(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Term)>) -> Self {
        TermSubst(pairs.into_iter().collect())
    }

    pub fn get(&self, n: &str) -> Option<&Term> {
        self.0.get(n)
    }

    pub fn insert(&mut self, n: Name, t: Term) {
        self.0.insert(n, t);
    }

    pub fn remove(&mut self, n: &str) -> Option<Term> {
        self.0.remove(n)
    }

    pub fn contains(&self, n: &str) -> bool {
        self.0.contains_key(n)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.0.iter()
    }

    /// `compose(s1, s2)` behaves as applying `s2` first, then `s1`.
    pub fn compose(s1: &TermSubst, s2: &TermSubst) -> TermSubst {
        let mut out: BTreeMap<Name, Term> = s2.0.iter().map(|(k, v)| (k.clone(), v.subst(s1))).collect();
        for (k, v) in &s1.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        TermSubst(out)
    }

    pub fn ty_subst(&self, phi: &TySubst) -> TermSubst {
        TermSubst(self.0.iter().map(|(k, v)| (k.clone(), v.ty_subst(phi))).collect())
    }

    pub fn restrict(&self, keep: impl Fn(&Name) -> bool) -> TermSubst {
        TermSubst(self.0.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }

    pub fn map_values(&self, f: impl Fn(&Term) -> Term) -> TermSubst {
        TermSubst(self.0.iter().map(|(k, v)| (k.clone(), f(v))).collect())
    }
}

impl fmt::Display for TermSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k} := {}", super::print::term_to_string(v))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> Ty {
        Ty::sort("i")
    }

    #[test]
    fn beta_identity() {
        let id = Term::lam("x", i(), Term::Bound(0));
        let t = Term::app(id, vec![Term::constant("c", vec![])]);
        assert_eq!(t.normalize(), Term::constant("c", vec![]));
    }

    #[test]
    fn eta_short() {
        let f = Term::eigen("f", Ty::arrow(i(), i()));
        let t = Term::lam("x", i(), Term::app(f.clone(), vec![Term::Bound(0)]));
        assert_eq!(t.normalize(), f);
        let nested = Term::lam(
            "x",
            i(),
            Term::lam("y", i(), Term::app(Term::eigen("g", Ty::arrows([i(), i()], i())), vec![Term::Bound(1), Term::Bound(0)])),
        );
        assert_eq!(nested.normalize(), Term::eigen("g", Ty::arrows([i(), i()], i())));
    }

    #[test]
    fn eta_blocked_by_occurrence() {
        let g = Term::eigen("g", Ty::arrows([i(), i()], i()));
        let t = Term::lam("x", i(), Term::app(g, vec![Term::Bound(0), Term::Bound(0)]));
        assert_eq!(t.normalize(), t);
    }

    #[test]
    fn substitution_reduces_heads() {
        let f = Term::meta("F", Ty::arrow(i(), i()));
        let t = Term::app(f, vec![Term::constant("a", vec![])]);
        let s = TermSubst::from_pairs([(Name::from("F"), Term::lam("z", i(), Term::constant("b", vec![])))]);
        assert_eq!(t.subst(&s), Term::constant("b", vec![]));
    }
}
