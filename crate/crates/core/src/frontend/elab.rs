//! Turns surface syntax into typed core terms, formulas and definitions.
//!
//! Types are inferred with solvable type metas. Metas that no inference step
//! determines are bound to declared type parameters that the item does not
//! otherwise use, in order; if none are left the item is rejected.

use thiserror::Error;

use super::ast::{SClause, SFormula, STerm, STy};
use crate::defs::builtins::{atm, brace};
use crate::defs::{DefBlock, SchematicClause};
use crate::syntax::{check_formula, Atom, Binder, ConstKind, Formula, Fresh, Name, Signature, Term, Ty, TySchema, TySubst};
use crate::unify::TyState;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ElabError {
    #[error("unknown identifier {0}")]
    UnknownIdent(String),
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("ill-formed type: {0}")]
    IllFormedType(String),
    #[error("{0} is not a predicate")]
    NotPredicate(String),
    #[error("type error in {context}: {reason}")]
    TypeMismatch { context: String, reason: String },
    #[error("cannot infer the type of {0}; add a type annotation")]
    CannotInfer(String),
    #[error("{0}")]
    Invalid(String),
}

/// Where free identifiers may come from.
#[derive(Clone, Debug)]
pub enum FreeVars {
    /// Nothing beyond constants.
    Closed,
    /// Eigenvariables of the current sequent.
    Eigens(Vec<(Name, Ty)>),
    /// Capitalized unknown identifiers become clause variables.
    Clause,
}

pub struct Elaborator<'a> {
    pub sig: &'a Signature,
    /// Type variables that may appear and stay fixed.
    pub rigid: Vec<Name>,
    /// Accept any capitalized type name as a type variable.
    pub open_tyvars: bool,
    pub free: FreeVars,
    /// Clause variables collected so far, in first-occurrence order.
    pub clause_vars: Vec<(Name, Ty)>,
    tys: TyState,
    fresh: Fresh,
}

fn is_capital(s: &str) -> bool {
    s.starts_with(|c: char| c.is_uppercase())
}

impl<'a> Elaborator<'a> {
    pub fn new(sig: &'a Signature, rigid: Vec<Name>, free: FreeVars) -> Self {
        Elaborator { sig, rigid, open_tyvars: false, free, clause_vars: Vec::new(), tys: TyState::default(), fresh: Fresh::new() }
    }

    fn meta_ty(&mut self) -> Ty {
        let t = self.fresh.tyvar("t");
        if let Ty::Var(n) = &t {
            self.tys.add_solvable(n.clone());
        }
        t
    }

    fn unify(&mut self, a: &Ty, b: &Ty, context: impl Fn() -> String) -> Result<(), ElabError> {
        let mismatch = |reason: String| ElabError::TypeMismatch { context: context(), reason };
        let before = self.tys.ambiguities.len();
        self.tys.unify(a, b).map_err(mismatch)?;
        if let Some(eq) = self.tys.ambiguities.get(before) {
            let eq = eq.clone();
            self.tys.ambiguities.truncate(before);
            return Err(mismatch(format!("{eq} does not hold")));
        }
        Ok(())
    }

    /// Requires `got` and `expected` to be the same type.
    pub fn expect(&mut self, got: &Ty, expected: &Ty, context: &str) -> Result<(), ElabError> {
        self.unify(got, expected, || context.to_string())
    }

    /// Applies the type solution, turning each leftover meta into a fresh
    /// type variable named `A`, `B`, ... that is not rigid.
    pub fn generalize(&mut self, parts: &[&Formula]) -> TySubst {
        let phi = self.tys.subst();
        let mut seen = Vec::new();
        for p in parts {
            p.ty_subst(&phi).collect_tyvars(&mut seen);
        }
        let mut taken: Vec<Name> = self.rigid.clone();
        taken.extend(seen.iter().filter(|v| !self.tys.is_solvable(v)).cloned());
        for m in dedup(seen.into_iter().filter(|v| self.tys.is_solvable(v)).collect()) {
            let name = (0..)
                .map(|i: usize| {
                    let letter = char::from(b'A' + (i % 26) as u8);
                    if i < 26 {
                        letter.to_string()
                    } else {
                        format!("{letter}{}", i / 26)
                    }
                })
                .find(|n| !taken.iter().any(|t| &**t == n))
                .map(Name::from)
                .unwrap();
            taken.push(name.clone());
            self.tys.bind(m, Ty::Var(name));
        }
        self.tys.subst()
    }

    pub fn ty(&self, t: &STy) -> Result<Ty, ElabError> {
        match t {
            STy::Arrow(a, b) => Ok(Ty::arrow(self.ty(a)?, self.ty(b)?)),
            STy::Con(n, args) => {
                if let Some(k) = self.sig.kind_arity(n) {
                    if k != args.len() {
                        return Err(ElabError::IllFormedType(format!("{n} expects {k} type argument(s), got {}", args.len())));
                    }
                    if k == 0 {
                        return Ok(Ty::sort(n));
                    }
                    let args = args.iter().map(|a| self.ty(a)).collect::<Result<_, _>>()?;
                    return Ok(Ty::app(n, args));
                }
                if args.is_empty() && is_capital(n) && (self.open_tyvars || self.rigid.iter().any(|r| &**r == n)) {
                    return Ok(Ty::var(n));
                }
                Err(ElabError::UnknownType(n.clone()))
            }
        }
    }

    fn constant(&mut self, name: &str, tys: &Option<Vec<STy>>) -> Result<(Term, Ty), ElabError> {
        let decl = self.sig.constant(name).ok_or_else(|| ElabError::UnknownIdent(name.to_string()))?;
        let schema = decl.schema.clone();
        let args: Vec<Ty> = match tys {
            Some(ts) => {
                if ts.len() != schema.params.len() {
                    return Err(ElabError::Invalid(format!("{name} takes {} type argument(s), got {}", schema.params.len(), ts.len())));
                }
                ts.iter().map(|t| self.ty(t)).collect::<Result<_, _>>()?
            }
            None => schema.params.iter().map(|_| self.meta_ty()).collect(),
        };
        let ty = schema.instantiate(&args).expect("arity checked");
        Ok((Term::Const(Name::from(name), args), ty))
    }

    fn ident(&mut self, name: &str, tys: &Option<Vec<STy>>, scope: &[(String, Ty)]) -> Result<(Term, Ty), ElabError> {
        if tys.is_none() {
            if let Some(pos) = scope.iter().rposition(|(x, _)| x == name) {
                return Ok((Term::Bound(scope.len() - 1 - pos), scope[pos].1.clone()));
            }
            match &self.free {
                FreeVars::Eigens(sigma) => {
                    if let Some((n, t)) = sigma.iter().find(|(n, _)| &**n == name) {
                        return Ok((Term::Eigen(n.clone(), t.clone()), t.clone()));
                    }
                }
                FreeVars::Clause => {
                    if let Some((n, t)) = self.clause_vars.iter().find(|(n, _)| &**n == name) {
                        return Ok((Term::Eigen(n.clone(), t.clone()), t.clone()));
                    }
                    if is_capital(name) && self.sig.constant(name).is_none() {
                        let t = self.meta_ty();
                        let n = Name::from(name);
                        self.clause_vars.push((n.clone(), t.clone()));
                        return Ok((Term::Eigen(n, t.clone()), t));
                    }
                }
                FreeVars::Closed => {}
            }
        }
        self.constant(name, tys)
    }

    pub fn term(&mut self, t: &STerm, scope: &mut Vec<(String, Ty)>) -> Result<(Term, Ty), ElabError> {
        match t {
            STerm::Ident { name, tys } => self.ident(name, tys, scope),
            STerm::App(h, args) => {
                let (mut head, mut hty) = self.term(h, scope)?;
                for a in args {
                    let (a2, aty) = self.term(a, scope)?;
                    let r = self.meta_ty();
                    self.unify(&hty, &Ty::arrow(aty, r.clone()), || t.to_string())?;
                    head = Term::app(head, vec![a2]);
                    hty = r;
                }
                Ok((head, hty))
            }
            STerm::Lam(x, ty, body) => {
                let xt = match ty {
                    Some(s) => self.ty(s)?,
                    None => self.meta_ty(),
                };
                scope.push((x.clone(), xt.clone()));
                let r = self.term(body, scope);
                scope.pop();
                let (b, bt) = r?;
                Ok((Term::Lam(Binder::new(x, xt.clone()), Box::new(b)), Ty::arrow(xt, bt)))
            }
            STerm::Cons(a, b) => self.binop("cons", a, b, scope, t),
            STerm::Conj(a, b) => self.binop("&&", a, b, scope, t),
        }
    }

    fn binop(&mut self, op: &str, a: &STerm, b: &STerm, scope: &mut Vec<(String, Ty)>, whole: &STerm) -> Result<(Term, Ty), ElabError> {
        let (c, cty) = self.constant(op, &None)?;
        let (a2, aty) = self.term(a, scope)?;
        let (b2, bty) = self.term(b, scope)?;
        let r = self.meta_ty();
        self.unify(&cty, &Ty::arrows([aty, bty], r.clone()), || whole.to_string())?;
        Ok((Term::app(c, vec![a2, b2]), r))
    }

    fn atom(&mut self, t: &STerm, scope: &mut Vec<(String, Ty)>, instance: Option<&[Ty]>) -> Result<Atom, ElabError> {
        let (h, args) = match t {
            STerm::App(h, args) => (&**h, args.as_slice()),
            other => (other, &[][..]),
        };
        let (name, tys) = match h {
            STerm::Ident { name, tys } => (name, tys),
            _ => return Err(ElabError::NotPredicate(h.to_string())),
        };
        let bound = scope.iter().any(|(x, _)| x == name);
        if bound || !self.sig.is_predicate(name) {
            return Err(ElabError::NotPredicate(name.clone()));
        }
        let (c, mut pty) = match (instance, tys) {
            (Some(inst), None) => {
                let ty = self.sig.const_type(name, inst).expect("block instance");
                (Term::Const(Name::from(name.as_str()), inst.to_vec()), ty)
            }
            _ => self.constant(name, tys)?,
        };
        let mut out = Vec::new();
        for a in args {
            let (a2, aty) = self.term(a, scope)?;
            let r = self.meta_ty();
            self.unify(&pty, &Ty::arrow(aty, r.clone()), || t.to_string())?;
            out.push(a2);
            pty = r;
        }
        self.unify(&pty, &Ty::prop(), || format!("{t} (missing arguments)"))?;
        let tys = match c {
            Term::Const(_, tys) => tys,
            _ => unreachable!(),
        };
        Ok(Atom::new(name, tys, out))
    }

    fn binders(&mut self, xs: &[(String, Option<STy>)]) -> Result<Vec<(String, Ty)>, ElabError> {
        xs.iter()
            .map(|(x, t)| {
                Ok((
                    x.clone(),
                    match t {
                        Some(t) => self.ty(t)?,
                        None => self.meta_ty(),
                    },
                ))
            })
            .collect()
    }

    pub fn formula(&mut self, f: &SFormula, scope: &mut Vec<(String, Ty)>) -> Result<Formula, ElabError> {
        Ok(match f {
            SFormula::True => Formula::Top,
            SFormula::False => Formula::Bot,
            SFormula::And(a, b) => Formula::and(self.formula(a, scope)?, self.formula(b, scope)?),
            SFormula::Or(a, b) => Formula::or(self.formula(a, scope)?, self.formula(b, scope)?),
            SFormula::Imp(a, b) => Formula::imp(self.formula(a, scope)?, self.formula(b, scope)?),
            SFormula::Forall(xs, body) | SFormula::Exists(xs, body) => {
                let bs = self.binders(xs)?;
                let n = scope.len();
                scope.extend(bs.iter().cloned());
                let r = self.formula(body, scope);
                scope.truncate(n);
                let mut acc = r?;
                for (x, t) in bs.into_iter().rev() {
                    acc = if matches!(f, SFormula::Forall(..)) {
                        Formula::Forall(Binder::new(&x, t), Box::new(acc))
                    } else {
                        Formula::Exists(Binder::new(&x, t), Box::new(acc))
                    };
                }
                acc
            }
            SFormula::Eq(a, b) => {
                let (a2, at) = self.term(a, scope)?;
                let (b2, bt) = self.term(b, scope)?;
                self.unify(&at, &bt, || f.to_string())?;
                Formula::eq(at, a2, b2)
            }
            SFormula::Atom(t) => Formula::Atom(self.atom(t, scope, None)?),
            SFormula::Brace(t) => {
                let (g, gt) = self.term(t, scope)?;
                self.unify(&gt, &Ty::sort("o"), || format!("{{{t}}}"))?;
                brace(wrap_goal(&g))
            }
        })
    }

    /// Binds leftover metas to unused declared parameters, then applies the
    /// type solution. `parts` are all the formulas of the item.
    fn settle(&mut self, parts: &[&Formula], extra: &[Ty], what: &str) -> Result<TySubst, ElabError> {
        let mut phi = self.tys.subst();
        let mut seen = Vec::new();
        for p in parts {
            p.ty_subst(&phi).collect_tyvars(&mut seen);
        }
        for t in extra {
            t.subst(&phi).collect_vars(&mut seen);
        }
        let leftover: Vec<Name> = dedup(seen.iter().filter(|v| self.tys.is_solvable(v)).cloned().collect());
        if !leftover.is_empty() {
            let mut unused = self.rigid.iter().filter(|r| !seen.contains(r)).cloned();
            for m in leftover {
                let r = unused.next().ok_or_else(|| ElabError::CannotInfer(what.to_string()))?;
                self.tys.bind(m, Ty::Var(r));
            }
            phi = self.tys.subst();
        }
        Ok(phi)
    }

    /// Elaborates a closed formula over the rigid type variables.
    pub fn closed_formula(&mut self, f: &SFormula) -> Result<Formula, ElabError> {
        let g = self.formula(f, &mut Vec::new())?;
        let phi = self.settle(&[&g], &[], &f.to_string())?;
        let g = g.ty_subst(&phi).normalize();
        check_formula(self.sig, &[], &g).map_err(|e| ElabError::Invalid(e.to_string()))?;
        Ok(g)
    }

    /// Elaborates a term against an expected type.
    pub fn closed_term(&mut self, t: &STerm, expected: &Ty) -> Result<Term, ElabError> {
        let (u, ut) = self.term(t, &mut Vec::new())?;
        self.unify(&ut, expected, || t.to_string())?;
        let probe = Formula::eq(ut.clone(), u.clone(), u.clone());
        let phi = self.settle(&[&probe], &[], &t.to_string())?;
        Ok(u.ty_subst(&phi).normalize())
    }
}

fn dedup(v: Vec<Name>) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Wraps every atomic subgoal of a specification goal in `atm`.
pub fn wrap_goal(g: &Term) -> Term {
    let (h, args) = g.head_spine();
    match h {
        Term::Const(c, _) if &**c == "&&" && args.len() == 2 => Term::app(h.clone(), vec![wrap_goal(&args[0]), wrap_goal(&args[1])]),
        Term::Const(c, _) if &**c == "tt" && args.is_empty() => g.clone(),
        _ => atm(g.clone()),
    }
}

/// Elaborates a `Define`/`Inductive` block.
pub fn elab_define(
    sig: &Signature,
    inductive: bool,
    params: &[String],
    preds: &[(String, STy)],
    clauses: &[SClause],
) -> Result<DefBlock, ElabError> {
    let params: Vec<Name> = params.iter().map(|p| Name::from(p.as_str())).collect();
    let mut trial = sig.clone();
    let mut pred_tys = Vec::new();
    {
        let mut e = Elaborator::new(sig, params.clone(), FreeVars::Closed);
        e.open_tyvars = true;
        for (p, t) in preds {
            let ty = e.ty(t)?;
            pred_tys.push((Name::from(p.as_str()), ty));
        }
    }
    for (p, ty) in &pred_tys {
        trial
            .declare_const(p, TySchema::new(params.clone(), ty.clone()), ConstKind::Predicate)
            .map_err(|err| ElabError::Invalid(format!("{p}: {err}")))?;
    }
    let block_inst: Vec<Ty> = params.iter().map(|p| Ty::Var(p.clone())).collect();
    let mut out = Vec::new();
    for c in clauses {
        let mut cparams = params.clone();
        cparams.extend(c.params.iter().map(|p| Name::from(p.as_str())));
        let mut e = Elaborator::new(&trial, cparams, FreeVars::Clause);
        e.open_tyvars = true;
        let head_pred = match &c.head {
            STerm::App(h, _) => &**h,
            h => h,
        };
        let default_inst = match head_pred {
            STerm::Ident { name, tys: None } if pred_tys.iter().any(|(p, _)| &**p == name) => Some(block_inst.as_slice()),
            _ => None,
        };
        let head = e.atom(&c.head, &mut Vec::new(), default_inst)?;
        let body = match &c.body {
            Some(b) => e.formula(b, &mut Vec::new())?,
            None => Formula::Top,
        };
        let head_f = Formula::Atom(head);
        let var_tys: Vec<Ty> = e.clause_vars.iter().map(|(_, t)| t.clone()).collect();
        let phi = e.settle(&[&head_f, &body], &var_tys, &c.to_string())?;
        let head = match head_f.ty_subst(&phi).normalize() {
            Formula::Atom(a) => a,
            _ => unreachable!(),
        };
        out.push(SchematicClause {
            params: c.params.iter().map(|p| Name::from(p.as_str())).collect(),
            binder: e.clause_vars.iter().map(|(x, t)| (x.clone(), t.subst(&phi))).collect(),
            head,
            body: body.ty_subst(&phi).normalize(),
        });
    }
    Ok(DefBlock { params, preds: pred_tys, clauses: out, inductive })
}

/// Elaborates a theorem statement with the given type parameters.
pub fn elab_statement(sig: &Signature, params: &[String], f: &SFormula) -> Result<Formula, ElabError> {
    let params: Vec<Name> = params.iter().map(|p| Name::from(p.as_str())).collect();
    Elaborator::new(sig, params, FreeVars::Closed).closed_formula(f)
}
