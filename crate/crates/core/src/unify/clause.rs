use super::pattern::{UnifState, Unifier, UnifyError};
use super::ty::TyEq;
use crate::defs::SchematicClause;
use crate::syntax::{Atom, Formula, Fresh, Name, Signature, Term, TermSubst, Ty, TySubst};

/// A clause with its type parameters replaced by fresh solvable type
/// variables and its variables replaced by fresh metas.
#[derive(Clone, Debug)]
pub struct RenamedClause {
    pub params: Vec<(Name, Ty)>,
    pub vars: Vec<(Name, Term)>,
    pub head: Atom,
    pub body: Formula,
}

pub fn rename_clause(clause: &SchematicClause, fresh: &mut Fresh) -> RenamedClause {
    let params: Vec<(Name, Ty)> = clause.params.iter().map(|p| (p.clone(), fresh.tyvar(p))).collect();
    let tyren = TySubst::from_pairs(params.iter().cloned());
    let vars: Vec<(Name, Term)> = clause.binder.iter().map(|(x, ty)| (x.clone(), fresh.meta(x, ty.subst(&tyren)))).collect();
    let ren = TermSubst::from_pairs(vars.iter().cloned());
    let head = match Formula::Atom(clause.head.clone()).ty_subst(&tyren).subst(&ren) {
        Formula::Atom(a) => a,
        _ => unreachable!(),
    };
    let body = clause.body.ty_subst(&tyren).subst(&ren);
    RenamedClause { params, vars, head, body }
}

/// The most general way a clause head meets an atom.
#[derive(Clone, Debug, PartialEq)]
pub struct ClauseMatch {
    /// Clause type parameters to types over the frozen variables.
    pub phi: TySubst,
    /// Clause variables to terms.
    pub clause_theta: TermSubst,
    /// Raised eigenvariables to terms.
    pub sigma_theta: TermSubst,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatchOutcome {
    /// Fails at every instantiation of the frozen type variables.
    NeverUnifiable(String),
    Generic(ClauseMatch),
    /// Whether the clause applies depends on the instantiation.
    NotGeneric {
        reason: String,
        equation: Option<TyEq>,
    },
}

/// Matches an atom from a hypothesis against a clause whose type parameters
/// are exactly the type variables of its head. The type variables in `psi`
/// are frozen, the clause's parameters and variables are solvable and the
/// eigenvariables in `sigma` are raised. `Err` carries a non-pattern
/// equation.
pub fn match_clause_generic(
    sig: &Signature,
    atom: &Atom,
    clause: &SchematicClause,
    psi: &[Name],
    sigma: &[(Name, Ty)],
    fresh: &mut Fresh,
) -> Result<MatchOutcome, String> {
    if atom.pred != clause.head.pred {
        return Ok(MatchOutcome::NeverUnifiable(format!("{} is not {}", atom.pred, clause.head.pred)));
    }
    let rc = rename_clause(clause, fresh);
    let mut st = UnifState::new();
    for (i, (e, _)) in sigma.iter().enumerate() {
        st.raise(e.clone(), i as u64);
    }
    for (_, v) in &rc.params {
        if let Ty::Var(n) = v {
            st.tys.add_solvable(n.clone());
        }
    }
    let res = {
        let mut u = Unifier::new(sig, fresh, &mut st);
        unify_atoms(&mut u, atom, &rc.head).and_then(|_| u.finish())
    };
    match res {
        Err(UnifyError::NoUnifier(m)) => return Ok(MatchOutcome::NeverUnifiable(m)),
        Err(UnifyError::NonPattern(m)) => return Err(m),
        Ok(()) => {}
    }
    if let Some(eq) = st.tys.ambiguities.first() {
        return Ok(MatchOutcome::NotGeneric { reason: format!("the clause applies only when {eq}"), equation: Some(eq.clone()) });
    }
    let phi_all = st.tys.subst();
    let mut phi = TySubst::new();
    for (p, v) in &rc.params {
        let t = v.subst(&phi_all);
        if let Some(bad) = t.vars().into_iter().find(|x| !psi.contains(x)) {
            let _ = bad;
            return Ok(MatchOutcome::NotGeneric {
                reason: format!("the type parameter {p} is not determined by the analyzed atom"),
                equation: None,
            });
        }
        phi.insert(p.clone(), t);
    }
    let theta = st.theta();
    let clause_theta = TermSubst::from_pairs(rc.vars.iter().map(|(x, m)| (x.clone(), m.subst(&theta).ty_subst(&phi_all))));
    let sigma_theta = theta.restrict(|k| sigma.iter().any(|(e, _)| e == k));
    let mut stray = None;
    for (_, t) in clause_theta.iter().chain(sigma_theta.iter()) {
        let mut vs = Vec::new();
        t.collect_tyvars(&mut vs);
        if let Some(v) = vs.into_iter().find(|v| !psi.contains(v)) {
            stray = Some(v);
        }
    }
    if let Some(v) = stray {
        return Ok(MatchOutcome::NotGeneric {
            reason: format!("the type variable {v} is not determined by the analyzed atom"),
            equation: None,
        });
    }
    Ok(MatchOutcome::Generic(ClauseMatch { phi, clause_theta, sigma_theta }))
}

/// Unifies predicate instances and arguments of two atoms.
pub(crate) fn unify_atoms(u: &mut Unifier<'_>, a: &Atom, b: &Atom) -> Result<(), UnifyError> {
    if a.pred != b.pred || a.tys.len() != b.tys.len() || a.args.len() != b.args.len() {
        return Err(UnifyError::NoUnifier(format!("{} does not match {}", a.pred, b.pred)));
    }
    for (x, y) in a.tys.iter().zip(&b.tys) {
        u.ty_eq(x, y)?;
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        u.unify(&mut Vec::new(), x, y)?;
    }
    Ok(())
}

/// Unifies two formulas of the same shape, ignoring induction annotations.
pub fn unify_formulas(u: &mut Unifier<'_>, ctx: &mut Vec<Ty>, a: &Formula, b: &Formula) -> Result<(), UnifyError> {
    match (a, b) {
        (Formula::Top, Formula::Top) | (Formula::Bot, Formula::Bot) => Ok(()),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => {
            unify_formulas(u, ctx, a1, b1)?;
            unify_formulas(u, ctx, a2, b2)
        }
        (Formula::Forall(x, a1), Formula::Forall(y, b1)) | (Formula::Exists(x, a1), Formula::Exists(y, b1)) => {
            u.ty_eq(&x.ty, &y.ty)?;
            ctx.push(x.ty.clone());
            let r = unify_formulas(u, ctx, a1, b1);
            ctx.pop();
            r
        }
        (Formula::Atom(x), Formula::Atom(y)) => {
            if x.pred != y.pred || x.tys.len() != y.tys.len() || x.args.len() != y.args.len() {
                return Err(UnifyError::NoUnifier(format!("{} does not match {}", x.pred, y.pred)));
            }
            for (s, t) in x.tys.iter().zip(&y.tys) {
                u.ty_eq(s, t)?;
            }
            for (s, t) in x.args.iter().zip(&y.args) {
                u.unify(ctx, s, t)?;
            }
            Ok(())
        }
        _ => Err(UnifyError::NoUnifier("formulas have different shapes".into())),
    }
}
