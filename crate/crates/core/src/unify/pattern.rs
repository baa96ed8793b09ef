//! Higher-order pattern unification over eta-short normal terms, with type
//! unification threaded through every constant instance and variable binding.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ty::{TyEq, TyState};
use crate::syntax::{fresh_rank, Binder, Fresh, Hint, Name, Signature, Term, TermSubst, Ty, TySubst};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnifyError {
    #[error("no unifier: {0}")]
    NoUnifier(String),
    #[error("not a pattern: {0}")]
    NonPattern(String),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("no unifier: {0}")]
    NoUnifier(String),
    #[error("not a pattern: {0}")]
    NonPattern(String),
    #[error("unifiable only under the type equation {0}")]
    AmbiguousTypes(TyEq),
}

impl From<UnifyError> for PatternError {
    fn from(e: UnifyError) -> Self {
        match e {
            UnifyError::NoUnifier(m) => PatternError::NoUnifier(m),
            UnifyError::NonPattern(m) => PatternError::NonPattern(m),
        }
    }
}

/// A unification problem. Every meta is solvable; eigenvariables are rigid
/// unless listed in `raised`, whose order decides which side gets bound when
/// two raised variables meet (later entries are bound first).
#[derive(Clone, Debug, Default)]
pub struct UnifyProblem {
    pub equations: Vec<(Term, Term)>,
    pub raised: Vec<Name>,
    pub ty_solvable: Vec<Name>,
}

/// Solves a standalone problem. Ambiguous type equations are reported as
/// errors; use [`UnifState`] directly to inspect them instead.
pub fn pattern_unify(sig: &Signature, problem: &UnifyProblem, fresh: &mut Fresh) -> Result<(TermSubst, TySubst), PatternError> {
    let mut st = UnifState::new();
    for (i, r) in problem.raised.iter().enumerate() {
        st.raise(r.clone(), i as u64);
    }
    for v in &problem.ty_solvable {
        st.tys.add_solvable(v.clone());
    }
    {
        let mut u = Unifier::new(sig, fresh, &mut st);
        for (a, b) in &problem.equations {
            u.unify(&mut Vec::new(), a, b)?;
        }
        u.finish()?;
    }
    if let Some(eq) = st.tys.ambiguities.first() {
        return Err(PatternError::AmbiguousTypes(eq.clone()));
    }
    Ok((st.theta(), st.tys.subst()))
}

/// Persistent part of a unification run; cheap to clone at choice points.
#[derive(Clone, Debug, Default)]
pub struct UnifState {
    pub tys: TyState,
    theta: TermSubst,
    raised: BTreeMap<Name, u64>,
    scopes: BTreeMap<Name, BTreeSet<Name>>,
    postponed: Vec<(Vec<Ty>, Term, Term)>,
}

impl UnifState {
    pub fn new() -> Self {
        UnifState::default()
    }

    /// Makes an eigenvariable solvable.
    pub fn raise(&mut self, name: Name, rank: u64) {
        self.raised.insert(name, rank);
    }

    /// Restricts the eigenvariables a meta's solution may mention.
    pub fn set_scope(&mut self, meta: Name, eigens: impl IntoIterator<Item = Name>) {
        self.scopes.insert(meta, eigens.into_iter().collect());
    }

    /// Solved bindings with every type binding applied.
    pub fn theta(&self) -> TermSubst {
        let phi = self.tys.subst();
        self.theta.map_values(|t| t.ty_subst(&phi).normalize())
    }

    pub fn raw_theta(&self) -> &TermSubst {
        &self.theta
    }

    pub fn resolve(&self, t: &Term) -> Term {
        t.subst(&self.theta)
    }

    pub fn is_bound(&self, n: &str) -> bool {
        self.theta.contains(n)
    }

    pub fn scope_of(&self, n: &str) -> Option<&BTreeSet<Name>> {
        self.scopes.get(n)
    }
}

pub struct Unifier<'a> {
    sig: &'a Signature,
    fresh: &'a mut Fresh,
    st: &'a mut UnifState,
}

#[derive(Clone, Debug)]
struct Flex {
    name: Name,
    ty: Ty,
    is_meta: bool,
}

impl<'a> Unifier<'a> {
    pub fn new(sig: &'a Signature, fresh: &'a mut Fresh, st: &'a mut UnifState) -> Self {
        Unifier { sig, fresh, st }
    }

    pub fn state(&self) -> &UnifState {
        self.st
    }

    pub fn ty_eq(&mut self, a: &Ty, b: &Ty) -> Result<(), UnifyError> {
        self.st.tys.unify(a, b).map_err(UnifyError::NoUnifier)
    }

    fn flex_of(&self, head: &Term) -> Option<Flex> {
        match head {
            Term::Meta(n, ty) if !self.st.theta.contains(n) => Some(Flex { name: n.clone(), ty: ty.clone(), is_meta: true }),
            Term::Eigen(n, ty) if self.st.raised.contains_key(n) && !self.st.theta.contains(n) => {
                Some(Flex { name: n.clone(), ty: ty.clone(), is_meta: false })
            }
            _ => None,
        }
    }

    fn rank(&self, f: &Flex) -> u64 {
        if f.is_meta {
            (1u64 << 40) + fresh_rank(&f.name).unwrap_or(0)
        } else {
            self.st.raised.get(&f.name).copied().unwrap_or(0)
        }
    }

    fn is_rigid_eigen(&self, n: &str) -> bool {
        !self.st.raised.contains_key(n)
    }

    /// Unifies `a` and `b`, which may have loose indices typed by `ctx`
    /// (innermost last).
    pub fn unify(&mut self, ctx: &mut Vec<Ty>, a: &Term, b: &Term) -> Result<(), UnifyError> {
        let a = self.st.resolve(a);
        let b = self.st.resolve(b);
        match (&a, &b) {
            (Term::Lam(x, ba), Term::Lam(y, bb)) => {
                self.ty_eq(&x.ty, &y.ty)?;
                ctx.push(x.ty.clone());
                let r = self.unify(ctx, ba, bb);
                ctx.pop();
                r
            }
            (Term::Lam(x, ba), _) => {
                ctx.push(x.ty.clone());
                let eb = Term::apply_normal(b.shift(1, 0), vec![Term::Bound(0)]);
                let r = self.unify(ctx, ba, &eb);
                ctx.pop();
                r
            }
            (_, Term::Lam(..)) => self.unify(ctx, &b, &a),
            _ => self.unify_spines(ctx, &a, &b),
        }
    }

    fn unify_spines(&mut self, ctx: &mut Vec<Ty>, a: &Term, b: &Term) -> Result<(), UnifyError> {
        let (ha, aa) = a.head_spine();
        let (hb, ab) = b.head_spine();
        match (self.flex_of(ha), self.flex_of(hb)) {
            (None, None) => {
                self.rigid_heads(ha, hb)?;
                if aa.len() != ab.len() {
                    return Err(UnifyError::NoUnifier(format!(
                        "{} and {} are applied to different numbers of arguments",
                        crate::syntax::term_to_string(ha),
                        crate::syntax::term_to_string(hb)
                    )));
                }
                for (x, y) in aa.iter().zip(ab) {
                    self.unify(ctx, x, y)?;
                }
                Ok(())
            }
            (Some(f), None) => self.flex_rigid(ctx, &f, aa, b),
            (None, Some(g)) => self.flex_rigid(ctx, &g, ab, a),
            (Some(f), Some(g)) => {
                if f.name == g.name {
                    self.flex_same(ctx, &f, aa, ab, a, b)
                } else if self.rank(&f) >= self.rank(&g) {
                    self.flex_rigid(ctx, &f, aa, b)
                } else {
                    self.flex_rigid(ctx, &g, ab, a)
                }
            }
        }
    }

    fn rigid_heads(&mut self, ha: &Term, hb: &Term) -> Result<(), UnifyError> {
        let clash =
            || UnifyError::NoUnifier(format!("{} does not match {}", crate::syntax::term_to_string(ha), crate::syntax::term_to_string(hb)));
        match (ha, hb) {
            (Term::Const(c, ts), Term::Const(d, us)) => {
                if c != d || ts.len() != us.len() {
                    return Err(clash());
                }
                for (t, u) in ts.iter().zip(us) {
                    self.ty_eq(t, u)?;
                }
                Ok(())
            }
            (Term::Eigen(x, tx), Term::Eigen(y, ty)) | (Term::Meta(x, tx), Term::Meta(y, ty)) if x == y => self.ty_eq(tx, ty),
            (Term::Bound(i), Term::Bound(j)) if i == j => Ok(()),
            _ => Err(clash()),
        }
    }

    /// Distinct bound variables or rigid eigenvariables.
    fn pattern_args(&self, args: &[Term]) -> bool {
        let mut seen: Vec<&Term> = Vec::new();
        for a in args {
            let ok = match a {
                Term::Bound(_) => true,
                Term::Eigen(n, _) => self.is_rigid_eigen(n),
                _ => false,
            };
            if !ok || seen.contains(&a) {
                return false;
            }
            seen.push(a);
        }
        true
    }

    fn postpone(&mut self, ctx: &[Ty], a: Term, b: Term) {
        self.st.postponed.push((ctx.to_vec(), a, b));
    }

    /// Splits `ty` into `n` argument types and a result, refining type
    /// variables into arrows when needed.
    fn arrow_parts(&mut self, ty: &Ty, n: usize) -> Result<(Vec<Ty>, Ty), UnifyError> {
        let mut args = Vec::with_capacity(n);
        let mut cur = self.st.tys.resolve(ty);
        for _ in 0..n {
            match cur {
                Ty::Arrow(a, b) => {
                    args.push(*a);
                    cur = *b;
                }
                other => {
                    let a = self.fresh.tyvar("T");
                    let b = self.fresh.tyvar("T");
                    if let (Ty::Var(x), Ty::Var(y)) = (&a, &b) {
                        self.st.tys.add_solvable(x.clone());
                        self.st.tys.add_solvable(y.clone());
                    }
                    self.ty_eq(&other, &Ty::arrow(a.clone(), b.clone()))?;
                    args.push(a);
                    cur = b;
                }
            }
        }
        Ok((args, cur))
    }

    fn arg_type(&self, ctx: &[Ty], a: &Term) -> Ty {
        match a {
            Term::Bound(k) => ctx[ctx.len() - 1 - k].clone(),
            Term::Eigen(_, t) | Term::Meta(_, t) => t.clone(),
            _ => unreachable!("pattern arguments are variables"),
        }
    }

    /// Infers the type of `t`, unifying argument types as it goes.
    pub fn infer(&mut self, ctx: &mut Vec<Ty>, t: &Term) -> Result<Ty, UnifyError> {
        match t {
            Term::Bound(k) => Ok(ctx[ctx.len() - 1 - k].clone()),
            Term::Const(c, tys) => self.sig.const_type(c, tys).ok_or_else(|| UnifyError::NoUnifier(format!("unknown constant `{c}`"))),
            Term::Eigen(_, ty) | Term::Meta(_, ty) => Ok(ty.clone()),
            Term::Lam(b, body) => {
                ctx.push(b.ty.clone());
                let r = self.infer(ctx, body);
                ctx.pop();
                Ok(Ty::arrow(b.ty.clone(), r?))
            }
            Term::App(h, args) => {
                let ht = self.infer(ctx, h)?;
                let (doms, cod) = self.arrow_parts(&ht, args.len())?;
                for (d, a) in doms.iter().zip(args) {
                    let at = self.infer(ctx, a)?;
                    self.ty_eq(d, &at)?;
                }
                Ok(cod)
            }
        }
    }

    fn flex_rigid(&mut self, ctx: &mut Vec<Ty>, f: &Flex, args: &[Term], t: &Term) -> Result<(), UnifyError> {
        if !self.pattern_args(args) {
            self.postpone(ctx, Term::app(head_of(f), args.to_vec()), t.clone());
            return Ok(());
        }
        if t.mentions_name(&f.name) {
            return Err(UnifyError::NoUnifier(format!("{} occurs in {}", display_name(&f.name), crate::syntax::term_to_string(t))));
        }
        let scope = self.st.scopes.get(&f.name).cloned();
        match self.prune(ctx.len(), args, scope.as_ref(), t, 0)? {
            true => {}
            false => {
                self.postpone(ctx, Term::app(head_of(f), args.to_vec()), t.clone());
                return Ok(());
            }
        }
        let t = self.st.resolve(t);
        let body = self.abstract_over(args, scope.as_ref(), &t, 0)?;
        let (arg_tys, result) = self.arrow_parts(&f.ty, args.len())?;
        for (at, a) in arg_tys.iter().zip(args) {
            let actual = self.arg_type(ctx, a);
            self.ty_eq(at, &actual)?;
        }
        let tt = self.infer(ctx, &t)?;
        self.ty_eq(&result, &tt)?;
        let solution = arg_tys.into_iter().rev().fold(body, |acc, ty| Term::Lam(Binder { hint: Hint::new("x"), ty }, Box::new(acc)));
        self.bind(f.name.clone(), solution.normalize());
        Ok(())
    }

    fn flex_same(&mut self, ctx: &[Ty], f: &Flex, aa: &[Term], ab: &[Term], a: &Term, b: &Term) -> Result<(), UnifyError> {
        if !self.pattern_args(aa) || !self.pattern_args(ab) {
            self.postpone(ctx, a.clone(), b.clone());
            return Ok(());
        }
        if aa.len() != ab.len() {
            return Err(UnifyError::NoUnifier("arity mismatch".into()));
        }
        let keep: Vec<usize> = (0..aa.len()).filter(|&i| aa[i] == ab[i]).collect();
        if keep.len() == aa.len() {
            return Ok(());
        }
        let (arg_tys, result) = self.arrow_parts(&f.ty, aa.len())?;
        let h_ty = Ty::arrows(keep.iter().map(|&i| arg_tys[i].clone()), result);
        let h = self.fresh.meta("H", h_ty);
        if let Some(s) = self.st.scopes.get(&f.name).cloned() {
            self.st.scopes.insert(meta_name(&h), s);
        }
        let n = aa.len();
        let body = Term::app(h, keep.iter().map(|&i| Term::Bound(n - 1 - i)).collect());
        let solution = arg_tys.into_iter().rev().fold(body, |acc, ty| Term::Lam(Binder { hint: Hint::new("x"), ty }, Box::new(acc)));
        self.bind(f.name.clone(), solution.normalize());
        Ok(())
    }

    /// Removes from flexible subterms of `t` the arguments that the solution
    /// for a variable applied to `allowed` could not mention. Returns false
    /// when a flexible subterm is outside the pattern fragment.
    fn prune(
        &mut self,
        outer: usize,
        allowed: &[Term],
        scope: Option<&BTreeSet<Name>>,
        t: &Term,
        depth: usize,
    ) -> Result<bool, UnifyError> {
        let t = self.st.resolve(t);
        match &t {
            Term::Lam(_, body) => self.prune(outer, allowed, scope, body, depth + 1),
            Term::Bound(k) => {
                if *k < depth || allowed.contains(&Term::Bound(k - depth)) {
                    Ok(true)
                } else {
                    Err(UnifyError::NoUnifier("a bound variable escapes its scope".into()))
                }
            }
            Term::Eigen(n, _) if self.is_rigid_eigen(n) => {
                if allowed.contains(&t) || scope.is_none_or(|s| s.contains(n)) {
                    Ok(true)
                } else {
                    Err(UnifyError::NoUnifier(format!("eigenvariable {n} is not in scope")))
                }
            }
            _ => {
                let (h, args) = t.head_spine();
                if let Some(g) = self.flex_of(h) {
                    if !self.pattern_args(args) {
                        return Ok(false);
                    }
                    let visible = |a: &Term| match a {
                        Term::Bound(k) => *k < depth || allowed.contains(&Term::Bound(k - depth)),
                        Term::Eigen(n, _) => allowed.contains(a) || scope.is_none_or(|s| s.contains(n)),
                        _ => false,
                    };
                    let keep: Vec<usize> = (0..args.len()).filter(|&i| visible(&args[i])).collect();
                    let g_scope = self.st.scopes.get(&g.name).cloned();
                    let narrowed = match (scope, &g_scope) {
                        (None, _) => g_scope.clone(),
                        (Some(s), None) => Some(s.clone()),
                        (Some(s), Some(gs)) => Some(s.intersection(gs).cloned().collect()),
                    };
                    let widen = narrowed != g_scope;
                    if keep.len() < args.len() || widen {
                        let (arg_tys, result) = self.arrow_parts(&g.ty, args.len())?;
                        let h_ty = Ty::arrows(keep.iter().map(|&i| arg_tys[i].clone()), result);
                        let hm = self.fresh.meta("H", h_ty);
                        if let Some(s) = narrowed {
                            self.st.scopes.insert(meta_name(&hm), s);
                        }
                        let n = args.len();
                        let body = Term::app(hm, keep.iter().map(|&i| Term::Bound(n - 1 - i)).collect());
                        let solution =
                            arg_tys.into_iter().rev().fold(body, |acc, ty| Term::Lam(Binder { hint: Hint::new("x"), ty }, Box::new(acc)));
                        self.bind(g.name.clone(), solution.normalize());
                    }
                    let _ = outer;
                    return Ok(true);
                }
                if !args.is_empty() {
                    if let Term::Bound(_) | Term::Eigen(..) = h {
                        if !self.prune(outer, allowed, scope, h, depth)? {
                            return Ok(false);
                        }
                    }
                    for a in args {
                        if !self.prune(outer, allowed, scope, a, depth)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Rewrites `t` so that occurrences of `args` become the indices of a
    /// fresh lambda prefix, one binder per argument.
    fn abstract_over(&self, args: &[Term], scope: Option<&BTreeSet<Name>>, t: &Term, depth: usize) -> Result<Term, UnifyError> {
        let n = args.len();
        let pos = |a: &Term| args.iter().position(|x| x == a);
        Ok(match t {
            Term::Bound(k) if *k < depth => Term::Bound(*k),
            Term::Bound(k) => match pos(&Term::Bound(k - depth)) {
                Some(p) => Term::Bound(n - 1 - p + depth),
                None => return Err(UnifyError::NoUnifier("a bound variable escapes its scope".into())),
            },
            Term::Eigen(e, _) => match pos(t) {
                Some(p) => Term::Bound(n - 1 - p + depth),
                None => {
                    if self.is_rigid_eigen(e) && scope.is_some_and(|s| !s.contains(e)) {
                        return Err(UnifyError::NoUnifier(format!("eigenvariable {e} is not in scope")));
                    }
                    t.clone()
                }
            },
            Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(self.abstract_over(args, scope, body, depth + 1)?)),
            Term::App(h, xs) => Term::App(
                Box::new(self.abstract_over(args, scope, h, depth)?),
                xs.iter().map(|x| self.abstract_over(args, scope, x, depth)).collect::<Result<_, _>>()?,
            ),
            other => other.clone(),
        })
    }

    fn bind(&mut self, name: Name, t: Term) {
        let single = TermSubst::from_pairs([(name.clone(), t.clone())]);
        self.st.theta = TermSubst::compose(&single, &self.st.theta);
        self.st.theta.insert(name, t);
    }

    /// Retries postponed equations until none makes progress.
    pub fn finish(&mut self) -> Result<(), UnifyError> {
        loop {
            let pending = std::mem::take(&mut self.st.postponed);
            if pending.is_empty() {
                return Ok(());
            }
            let before = pending.len();
            for (mut ctx, a, b) in pending {
                self.unify(&mut ctx, &a, &b)?;
            }
            let after = self.st.postponed.len();
            if after >= before {
                let (_, a, b) = &self.st.postponed[0];
                let msg = format!(
                    "{} = {}",
                    crate::syntax::term_to_string(&self.st.resolve(a)),
                    crate::syntax::term_to_string(&self.st.resolve(b))
                );
                self.st.postponed.clear();
                return Err(UnifyError::NonPattern(msg));
            }
        }
    }
}

fn head_of(f: &Flex) -> Term {
    if f.is_meta {
        Term::Meta(f.name.clone(), f.ty.clone())
    } else {
        Term::Eigen(f.name.clone(), f.ty.clone())
    }
}

fn meta_name(t: &Term) -> Name {
    match t {
        Term::Meta(n, _) => n.clone(),
        _ => unreachable!("fresh metas are metas"),
    }
}

fn display_name(n: &str) -> String {
    n.trim_start_matches('?').split('#').next().unwrap_or(n).to_string()
}
