use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Name;

/// Simple types with type variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    /// A nullary type constructor such as `i`, `prop` or `o`.
    Sort(Name),
    Var(Name),
    /// A constructor of positive arity applied to its arguments.
    App(Name, Vec<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn sort(name: &str) -> Ty {
        Ty::Sort(Name::from(name))
    }

    pub fn var(name: &str) -> Ty {
        Ty::Var(Name::from(name))
    }

    pub fn app(ctor: &str, args: Vec<Ty>) -> Ty {
        Ty::App(Name::from(ctor), args)
    }

    pub fn prop() -> Ty {
        Ty::sort("prop")
    }

    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> ... -> an -> target`.
    pub fn arrows(args: impl IntoIterator<Item = Ty>, target: Ty) -> Ty {
        let args: Vec<Ty> = args.into_iter().collect();
        args.into_iter().rev().fold(target, |acc, a| Ty::arrow(a, acc))
    }

    /// Splits off every argument type.
    pub fn split_arrows(&self) -> (Vec<&Ty>, &Ty) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Ty::Arrow(a, b) = cur {
            args.push(&**a);
            cur = b;
        }
        (args, cur)
    }

    /// Splits off at most `n` argument types.
    pub fn split_n(&self, n: usize) -> Option<(Vec<&Ty>, &Ty)> {
        let mut args = Vec::new();
        let mut cur = self;
        for _ in 0..n {
            match cur {
                Ty::Arrow(a, b) => {
                    args.push(&**a);
                    cur = b;
                }
                _ => return None,
            }
        }
        Some((args, cur))
    }

    pub fn is_prop(&self) -> bool {
        matches!(self, Ty::Sort(n) if &**n == "prop")
    }

    pub fn mentions_prop(&self) -> bool {
        match self {
            Ty::Sort(n) => &**n == "prop",
            Ty::Var(_) => false,
            Ty::App(_, args) => args.iter().any(Ty::mentions_prop),
            Ty::Arrow(a, b) => a.mentions_prop() || b.mentions_prop(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Ty::Sort(_) => true,
            Ty::Var(_) => false,
            Ty::App(_, args) => args.iter().all(Ty::is_ground),
            Ty::Arrow(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            Ty::Sort(_) => false,
            Ty::Var(n) => &**n == v,
            Ty::App(_, args) => args.iter().any(|a| a.occurs(v)),
            Ty::Arrow(a, b) => a.occurs(v) || b.occurs(v),
        }
    }

    /// Type variables in first-occurrence order, without duplicates.
    pub fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Ty::Sort(_) => {}
            Ty::Var(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            Ty::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Ty::Arrow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    /// Every type expression occurring inside this one, including itself.
    pub fn collect_subtypes(&self, out: &mut BTreeSet<Ty>) {
        out.insert(self.clone());
        match self {
            Ty::App(_, args) => args.iter().for_each(|a| a.collect_subtypes(out)),
            Ty::Arrow(a, b) => {
                a.collect_subtypes(out);
                b.collect_subtypes(out);
            }
            _ => {}
        }
    }

    pub fn subst(&self, s: &TySubst) -> Ty {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Ty::Sort(_) => self.clone(),
            Ty::Var(n) => s.get(n).cloned().unwrap_or_else(|| self.clone()),
            Ty::App(c, args) => Ty::App(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Ty::Arrow(a, b) => Ty::arrow(a.subst(s), b.subst(s)),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Ty::Sort(n) | Ty::Var(n) => write!(f, "{n}"),
            Ty::App(c, args) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                write!(f, "{c}")?;
                for a in args {
                    write!(f, " ")?;
                    a.fmt_prec(f, 2)?;
                }
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Ty::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A type closed over its parameters, `[A1, ..., An] body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TySchema {
    pub params: Vec<Name>,
    pub body: Ty,
}

impl TySchema {
    pub fn mono(body: Ty) -> Self {
        TySchema { params: Vec::new(), body }
    }

    pub fn new(params: Vec<Name>, body: Ty) -> Self {
        TySchema { params, body }
    }

    pub fn instantiate(&self, args: &[Ty]) -> Option<Ty> {
        if args.len() != self.params.len() {
            return None;
        }
        let s = TySubst::from_pairs(self.params.iter().cloned().zip(args.iter().cloned()));
        Some(self.body.subst(&s))
    }
}

impl fmt::Display for TySchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            write!(f, "[{}] ", join(&self.params, ", "))?;
        }
        write!(f, "{}", self.body)
    }
}

pub(crate) fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(sep)
}

/// A finite map from type variables to types, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TySubst(BTreeMap<Name, Ty>);

impl TySubst {
    pub fn new() -> Self {
        TySubst(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Ty)>) -> Self {
        TySubst(pairs.into_iter().collect())
    }

    pub fn single(v: Name, t: Ty) -> Self {
        Self::from_pairs([(v, t)])
    }

    pub fn get(&self, v: &str) -> Option<&Ty> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Name, t: Ty) {
        self.0.insert(v, t);
    }

    pub fn remove(&mut self, v: &str) -> Option<Ty> {
        self.0.remove(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Ty)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    /// `compose(s1, s2)` behaves as applying `s2` first, then `s1`.
    pub fn compose(s1: &TySubst, s2: &TySubst) -> TySubst {
        let mut out: BTreeMap<Name, Ty> = s2.0.iter().map(|(k, v)| (k.clone(), v.subst(s1))).collect();
        for (k, v) in &s1.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        TySubst(out)
    }

    pub fn restrict(&self, keep: &[Name]) -> TySubst {
        TySubst(self.0.iter().filter(|(k, _)| keep.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

impl fmt::Display for TySubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k} := {v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(t: Ty) -> Ty {
        Ty::app("list", vec![t])
    }

    #[test]
    fn simultaneous_substitution() {
        let s = TySubst::from_pairs([(Name::from("A"), list(Ty::var("B"))), (Name::from("B"), Ty::sort("i"))]);
        assert_eq!(Ty::var("A").subst(&s), list(Ty::var("B")));
        assert_eq!(Ty::arrow(Ty::var("A"), Ty::var("B")).subst(&s), Ty::arrow(list(Ty::var("B")), Ty::sort("i")));
    }

    #[test]
    fn compose_applies_right_first() {
        let s2 = TySubst::single(Name::from("A"), list(Ty::var("B")));
        let s1 = TySubst::single(Name::from("B"), Ty::sort("i"));
        let c = TySubst::compose(&s1, &s2);
        let t = Ty::arrow(Ty::var("A"), Ty::var("B"));
        assert_eq!(t.subst(&c), t.subst(&s2).subst(&s1));
    }

    #[test]
    fn display_parenthesizes() {
        let t = Ty::arrow(Ty::arrow(Ty::sort("i"), Ty::sort("i")), list(list(Ty::var("A"))));
        assert_eq!(t.to_string(), "(i -> i) -> list (list A)");
    }
}
