use thiserror::Error;

use super::formula::Formula;
use super::print::term_to_string;
use super::sig::{SigError, Signature};
use super::term::Term;
use super::ty::Ty;
use super::Name;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("ill-typed: {0}")]
    IllTyped(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(Name),
    #[error("`{0}` is not a predicate")]
    NotAPredicate(Name),
    #[error("dangling bound variable #{0}")]
    LooseBound(usize),
    #[error(transparent)]
    IllFormed(#[from] SigError),
}

/// Infers the type of `t`; `ctx` lists the types of enclosing binders,
/// innermost last.
pub fn infer_type(sig: &Signature, ctx: &[Ty], t: &Term) -> Result<Ty, TypeError> {
    match t {
        Term::Bound(k) => ctx.len().checked_sub(k + 1).map(|i| ctx[i].clone()).ok_or(TypeError::LooseBound(*k)),
        Term::Const(c, tys) => {
            let decl = sig.constant(c).ok_or_else(|| TypeError::UnknownConstant(c.clone()))?;
            decl.schema.instantiate(tys).ok_or_else(|| {
                TypeError::IllTyped(format!("`{c}` expects {} type argument(s), got {}", decl.schema.params.len(), tys.len()))
            })
        }
        Term::Eigen(_, ty) | Term::Meta(_, ty) => Ok(ty.clone()),
        Term::Lam(b, body) => {
            let mut inner = ctx.to_vec();
            inner.push(b.ty.clone());
            Ok(Ty::arrow(b.ty.clone(), infer_type(sig, &inner, body)?))
        }
        Term::App(h, args) => {
            let mut ty = infer_type(sig, ctx, h)?;
            for a in args {
                let at = infer_type(sig, ctx, a)?;
                match ty {
                    Ty::Arrow(dom, cod) if *dom == at => ty = *cod,
                    Ty::Arrow(dom, _) => {
                        return Err(TypeError::IllTyped(format!("argument `{}` has type {at}, expected {dom}", term_to_string(a))))
                    }
                    other => {
                        return Err(TypeError::IllTyped(format!(
                            "`{}` of type {other} is applied to too many arguments",
                            term_to_string(h)
                        )))
                    }
                }
            }
            Ok(ty)
        }
    }
}

pub fn check_term(sig: &Signature, ctx: &[Ty], t: &Term, expected: &Ty) -> Result<(), TypeError> {
    let got = infer_type(sig, ctx, t)?;
    if &got == expected {
        Ok(())
    } else {
        Err(TypeError::IllTyped(format!("`{}` has type {got}, expected {expected}", term_to_string(t))))
    }
}

/// Checks that `f` is a well-typed formula under `ctx`.
pub fn check_formula(sig: &Signature, ctx: &[Ty], f: &Formula) -> Result<(), TypeError> {
    match f {
        Formula::Top | Formula::Bot => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            check_formula(sig, ctx, a)?;
            check_formula(sig, ctx, b)
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            if x.ty.mentions_prop() {
                return Err(TypeError::IllTyped(format!("cannot quantify over type {}", x.ty)));
            }
            let mut inner = ctx.to_vec();
            inner.push(x.ty.clone());
            check_formula(sig, &inner, body)
        }
        Formula::Atom(a) => {
            if !sig.is_predicate(&a.pred) {
                return match sig.constant(&a.pred) {
                    Some(_) => Err(TypeError::NotAPredicate(a.pred.clone())),
                    None => Err(TypeError::UnknownConstant(a.pred.clone())),
                };
            }
            let ty = infer_type(sig, ctx, &Term::Const(a.pred.clone(), a.tys.clone()))?;
            let (params, target) = ty.split_arrows();
            if params.len() != a.args.len() || !target.is_prop() {
                return Err(TypeError::IllTyped(format!("`{}` expects {} argument(s), got {}", a.pred, params.len(), a.args.len())));
            }
            for (p, t) in params.into_iter().zip(&a.args) {
                check_term(sig, ctx, t, p)?;
            }
            Ok(())
        }
    }
}

/// Checks that every type occurring in `f` is well-formed over `psi`.
pub fn wf_formula(sig: &Signature, f: &Formula, psi: &[Name]) -> Result<(), SigError> {
    let mut res = Ok(());
    f.for_each_type(&mut |t| {
        if res.is_ok() {
            res = sig.wf_type(t, psi);
        }
    });
    res
}

pub fn wf_term(sig: &Signature, t: &Term, psi: &[Name]) -> Result<(), SigError> {
    let mut res = Ok(());
    t.for_each_type(&mut |ty| {
        if res.is_ok() {
            res = sig.wf_type(ty, psi);
        }
    });
    res
}
