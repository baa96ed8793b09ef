use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Name, Ty, TySubst};

/// An equation between types that could only be solved by instantiating a
/// frozen type variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TyEq {
    pub left: Ty,
    pub right: Ty,
}

impl fmt::Display for TyEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyUnifyResult {
    Unifier(TySubst),
    /// No instantiation of the frozen variables makes the types equal.
    Clash(String),
    /// Equal for some instantiations of the frozen variables but not all.
    Ambiguous(TyEq),
}

/// Unifies two types. Variables in `solvable` may be instantiated; every
/// other variable, including those listed in `frozen`, is held fixed.
pub fn ty_unify(t1: &Ty, t2: &Ty, solvable: &[Name], frozen: &[Name]) -> TyUnifyResult {
    let _ = frozen;
    let mut st = TyState::with_solvable(solvable.iter().cloned());
    match st.unify(t1, t2) {
        Err(msg) => TyUnifyResult::Clash(msg),
        Ok(()) => match st.ambiguities.first() {
            Some(eq) => TyUnifyResult::Ambiguous(eq.clone()),
            None => TyUnifyResult::Unifier(st.subst()),
        },
    }
}

/// Incremental type unification. Ambiguous equations are recorded and then
/// treated as satisfied, so that a later hard clash still surfaces: a clash
/// found under that assumption rules out every instantiation.
#[derive(Clone, Debug, Default)]
pub struct TyState {
    solvable: BTreeSet<Name>,
    bindings: BTreeMap<Name, Ty>,
    pub ambiguities: Vec<TyEq>,
}

impl TyState {
    pub fn with_solvable(vars: impl IntoIterator<Item = Name>) -> Self {
        TyState { solvable: vars.into_iter().collect(), ..Default::default() }
    }

    pub fn add_solvable(&mut self, v: Name) {
        self.solvable.insert(v);
    }

    pub fn is_solvable(&self, v: &str) -> bool {
        self.solvable.contains(v)
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut cur = t.clone();
        while let Ty::Var(v) = &cur {
            match self.bindings.get(v) {
                Some(b) => cur = b.clone(),
                None => break,
            }
        }
        cur
    }

    /// Applies every binding made so far.
    pub fn resolve(&self, t: &Ty) -> Ty {
        match self.shallow(t) {
            Ty::App(c, args) => Ty::App(c, args.iter().map(|a| self.resolve(a)).collect()),
            Ty::Arrow(a, b) => Ty::arrow(self.resolve(&a), self.resolve(&b)),
            other => other,
        }
    }

    pub fn subst(&self) -> TySubst {
        TySubst::from_pairs(self.bindings.keys().map(|k| (k.clone(), self.resolve(&Ty::Var(k.clone())))))
    }

    pub fn bind(&mut self, v: Name, t: Ty) {
        self.bindings.insert(v, t);
    }

    /// `Err` reports a clash that no instantiation can repair.
    pub fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), String> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), _) if self.solvable.contains(x) => self.bind_var(x.clone(), &b),
            (_, Ty::Var(y)) if self.solvable.contains(y) => self.bind_var(y.clone(), &a),
            (Ty::Var(x), _) => self.frozen_against(x, &a, &b),
            (_, Ty::Var(y)) => self.frozen_against(y, &b, &a),
            (Ty::Sort(x), Ty::Sort(y)) if x == y => Ok(()),
            (Ty::App(c, xs), Ty::App(d, ys)) if c == d && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(format!("type {} does not match {}", self.resolve(&a), self.resolve(&b))),
        }
    }

    fn bind_var(&mut self, v: Name, t: &Ty) -> Result<(), String> {
        let t = self.resolve(t);
        if t.occurs(&v) {
            return Err(format!("type variable {v} occurs in {t}"));
        }
        self.bindings.insert(v, t);
        Ok(())
    }

    fn frozen_against(&mut self, v: &Name, var: &Ty, other: &Ty) -> Result<(), String> {
        let other = self.resolve(other);
        if !matches!(other, Ty::Var(_)) && other.occurs(v) {
            return Err(format!("type variable {v} occurs in {other}"));
        }
        let eq = TyEq { left: var.clone(), right: other };
        if !self.ambiguities.contains(&eq) {
            self.ambiguities.push(eq);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::from(s)
    }

    #[test]
    fn sort_against_frozen_structure_clashes() {
        let r = ty_unify(&Ty::sort("i"), &Ty::app("list", vec![Ty::var("A")]), &[], &[n("A")]);
        assert!(matches!(r, TyUnifyResult::Clash(_)));
    }

    #[test]
    fn distinct_frozen_variables_are_ambiguous() {
        let r = ty_unify(&Ty::var("A"), &Ty::var("B"), &[], &[n("A"), n("B")]);
        assert_eq!(r, TyUnifyResult::Ambiguous(TyEq { left: Ty::var("A"), right: Ty::var("B") }));
    }

    #[test]
    fn solvable_variables_bind() {
        let r = ty_unify(&Ty::var("C"), &Ty::app("list", vec![Ty::var("A")]), &[n("C")], &[n("A")]);
        assert_eq!(r, TyUnifyResult::Unifier(TySubst::single(n("C"), Ty::app("list", vec![Ty::var("A")]))));
    }

    #[test]
    fn clash_beats_ambiguity() {
        let l = Ty::arrow(Ty::var("A"), Ty::sort("i"));
        let r = Ty::arrow(Ty::var("B"), Ty::sort("j"));
        assert!(matches!(ty_unify(&l, &r, &[], &[n("A"), n("B")]), TyUnifyResult::Clash(_)));
    }

    #[test]
    fn frozen_occurs_is_a_clash() {
        let r = ty_unify(&Ty::var("A"), &Ty::app("list", vec![Ty::var("A")]), &[], &[n("A")]);
        assert!(matches!(r, TyUnifyResult::Clash(_)));
    }
}
