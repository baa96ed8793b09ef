//! Bounded depth-first proof search.
//!
//! Search works on copies of the current sequent whose formulas may contain
//! metas. Invertible rules are applied eagerly; atomic goals try the
//! hypotheses and then every clause of their definition, which costs one
//! unit of depth. Existential witnesses start as metas solved by later
//! unifications. A meta that nothing constrains is filled with the first
//! inhabitant of its type: an eigenvariable in scope, else a constant. The
//! recorded steps are finally replayed through the rule engine.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::defs::reduce_clause;
use crate::engine::{apply_step, Env, ProofTree, RuleError, Sequent, Step};
use crate::syntax::{ConstKind, Formula, Fresh, Name, Term, TermSubst, Ty, TySubst};
use crate::unify::{rename_clause, unify_formulas, UnifState, Unifier, UnifyError};

pub const DEFAULT_DEPTH: usize = 5;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("no proof found within depth {0}")]
    NoProofFound(usize),
    #[error("search needs a non-pattern unification: {0}")]
    NonPattern(String),
    #[error("search produced an invalid step: {0}")]
    Internal(RuleError),
}

#[derive(Clone, Debug)]
struct Obligation {
    seq: Sequent,
    slot: usize,
    depth: usize,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    step: Option<Step>,
    children: Vec<usize>,
}

struct Search<'a> {
    env: Env<'a>,
    fresh: Fresh,
    slots: Vec<Slot>,
    eigens: BTreeMap<Name, Ty>,
    nonpattern: Option<String>,
}

pub fn search(env: Env<'_>, seq: &Sequent, depth: usize) -> Result<ProofTree, SearchError> {
    let mut s =
        Search { env, fresh: Fresh::new(), slots: vec![Slot::default()], eigens: seq.sigma.iter().cloned().collect(), nonpattern: None };
    let root = Obligation { seq: seq.clone(), slot: 0, depth };
    match s.solve(vec![root], UnifState::new()) {
        Some(st) => s.build(0, seq, &st).map_err(SearchError::Internal),
        None => Err(match s.nonpattern {
            Some(m) => SearchError::NonPattern(m),
            None => SearchError::NoProofFound(depth),
        }),
    }
}

fn resolve_formula(st: &UnifState, f: &Formula) -> Formula {
    f.subst(st.raw_theta())
}

fn is_flex_atom(st: &UnifState, f: &Formula) -> bool {
    match resolve_formula(st, f) {
        Formula::Atom(a) => !a.args.is_empty() && a.args.iter().all(|t| matches!(t.head_spine().0, Term::Meta(..))),
        _ => false,
    }
}

impl<'a> Search<'a> {
    fn slot(&mut self) -> usize {
        self.slots.push(Slot::default());
        self.slots.len() - 1
    }

    fn record(&mut self, slot: usize, step: Step, children: Vec<usize>) {
        self.slots[slot] = Slot { step: Some(step), children };
    }

    /// Runs a unification on a copy of the state. Non-pattern problems are
    /// remembered for the final report.
    fn unify_with(&mut self, st: &UnifState, f: impl FnOnce(&mut Unifier<'_>) -> Result<(), UnifyError>) -> Option<UnifState> {
        let mut st2 = st.clone();
        let before = st2.tys.ambiguities.len();
        let r = {
            let mut u = Unifier::new(self.env.sig, &mut self.fresh, &mut st2);
            f(&mut u)
        };
        match r {
            Ok(()) if st2.tys.ambiguities.len() == before => Some(st2),
            Ok(()) => None,
            Err(UnifyError::NonPattern(m)) => {
                self.nonpattern.get_or_insert(m);
                None
            }
            Err(UnifyError::NoUnifier(_)) => None,
        }
    }

    fn solve(&mut self, mut goals: Vec<Obligation>, st: UnifState) -> Option<UnifState> {
        if goals.is_empty() {
            return self.close(st);
        }
        let pick = goals.iter().rposition(|g| !is_flex_atom(&st, &g.seq.goal)).unwrap_or(goals.len() - 1);
        let g = goals.remove(pick);
        let goal = resolve_formula(&st, &g.seq.goal);
        let mark = self.slots.len();
        match goal {
            Formula::Top => {
                self.record(g.slot, Step::TopR, vec![]);
                self.solve(goals, st)
            }
            Formula::And(a, b) => {
                let (sa, sb) = (self.slot(), self.slot());
                self.record(g.slot, Step::AndR, vec![sa, sb]);
                goals.push(Obligation { seq: Sequent { goal: *b, ..g.seq.clone() }, slot: sb, depth: g.depth });
                goals.push(Obligation { seq: Sequent { goal: *a, ..g.seq }, slot: sa, depth: g.depth });
                self.solve(goals, st)
            }
            Formula::Imp(a, b) => {
                let c = self.slot();
                self.record(g.slot, Step::ImpR, vec![c]);
                let mut seq = Sequent { goal: *b, ..g.seq };
                seq.push_hyp(*a);
                goals.push(Obligation { seq, slot: c, depth: g.depth });
                self.solve(goals, st)
            }
            Formula::Forall(x, body) => {
                let c = self.slot();
                self.record(g.slot, Step::AllR, vec![c]);
                let mut seq = g.seq;
                let e = seq.fresh_eigen(&x.hint.0, x.ty.clone());
                if let Term::Eigen(n, t) = &e {
                    self.eigens.insert(n.clone(), t.clone());
                }
                seq.goal = body.instantiate(&e);
                goals.push(Obligation { seq, slot: c, depth: g.depth });
                self.solve(goals, st)
            }
            Formula::Exists(x, body) => {
                let c = self.slot();
                let m = self.fresh.meta(&x.hint.0, x.ty.clone());
                let mut st = st;
                if let Term::Meta(n, _) = &m {
                    st.set_scope(n.clone(), g.seq.sigma.iter().map(|(e, _)| e.clone()));
                }
                self.record(g.slot, Step::ExistsR { witness: m.clone() }, vec![c]);
                goals.push(Obligation { seq: Sequent { goal: body.instantiate(&m), ..g.seq }, slot: c, depth: g.depth });
                self.solve(goals, st)
            }
            Formula::Or(a, b) => {
                for (step, side) in [(Step::OrR1, *a), (Step::OrR2, *b)] {
                    let c = self.slot();
                    self.record(g.slot, step, vec![c]);
                    let mut next = goals.clone();
                    next.push(Obligation { seq: Sequent { goal: side, ..g.seq.clone() }, slot: c, depth: g.depth });
                    if let Some(r) = self.solve(next, st.clone()) {
                        return Some(r);
                    }
                    self.undo(mark, g.slot);
                }
                None
            }
            Formula::Bot | Formula::Atom(_) => self.atomic(goals, g, goal, st, mark),
        }
    }

    fn undo(&mut self, mark: usize, slot: usize) {
        self.slots.truncate(mark);
        self.slots[slot] = Slot::default();
    }

    fn atomic(&mut self, goals: Vec<Obligation>, g: Obligation, goal: Formula, st: UnifState, mark: usize) -> Option<UnifState> {
        for h in g.seq.hyps.clone() {
            let hf = resolve_formula(&st, &h.formula);
            let attempt = match (&hf, &goal) {
                (Formula::Bot, _) => Some((Step::BotL { hyp: h.label.clone() }, st.clone())),
                (Formula::Atom(x), Formula::Atom(y)) if x.pred == y.pred => self
                    .unify_with(&st, |u| unify_formulas(u, &mut Vec::new(), &hf, &goal))
                    .map(|s| (Step::Axiom { hyp: h.label.clone() }, s)),
                _ => None,
            };
            if let Some((step, st2)) = attempt {
                self.record(g.slot, step, vec![]);
                if let Some(r) = self.solve(goals.clone(), st2) {
                    return Some(r);
                }
                self.undo(mark, g.slot);
            }
        }
        let Formula::Atom(atom) = &goal else { return None };
        if g.depth == 0 {
            return None;
        }
        let block = self.env.sig.block_of(&atom.pred)?;
        let clauses: Vec<(usize, crate::defs::SchematicClause)> =
            block.clauses_for(&atom.pred).map(|(i, c)| (i, reduce_clause(c))).collect();
        for (ci, c) in clauses {
            let rc = rename_clause(&c, &mut self.fresh);
            let mut st1 = st.clone();
            for (_, v) in &rc.params {
                if let Ty::Var(n) = v {
                    st1.tys.add_solvable(n.clone());
                }
            }
            for (_, m) in &rc.vars {
                if let Term::Meta(n, _) = m {
                    st1.set_scope(n.clone(), g.seq.sigma.iter().map(|(e, _)| e.clone()));
                }
            }
            let head = Formula::Atom(rc.head.clone());
            let Some(st2) = self.unify_with(&st1, |u| unify_formulas(u, &mut Vec::new(), &head, &goal)) else { continue };
            let phi = TySubst::from_pairs(rc.params.iter().cloned());
            let theta = TermSubst::from_pairs(rc.vars.iter().cloned());
            let c_slot = self.slot();
            self.record(g.slot, Step::DefR { clause: ci, phi, theta }, vec![c_slot]);
            let mut next = goals.clone();
            next.push(Obligation { seq: Sequent { goal: rc.body.clone(), ..g.seq.clone() }, slot: c_slot, depth: g.depth - 1 });
            if let Some(r) = self.solve(next, st2) {
                return Some(r);
            }
            self.undo(mark, g.slot);
        }
        None
    }

    /// Checks the postponed equations and fills unconstrained metas.
    fn close(&mut self, st: UnifState) -> Option<UnifState> {
        let mut st = self.unify_with(&st, |u| u.finish())?;
        loop {
            let theta = st.theta();
            let phi = st.tys.subst();
            let mut metas = Vec::new();
            for s in &self.slots {
                if let Some(step) = &s.step {
                    for t in step_terms(step) {
                        t.subst(&theta).ty_subst(&phi).collect_free(&mut metas);
                    }
                }
            }
            let Some((n, ty)) = metas.into_iter().find_map(|t| match t {
                Term::Meta(n, ty) => Some((n, ty)),
                _ => None,
            }) else {
                return Some(st);
            };
            let scope: Vec<Name> = st.scope_of(&n).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            let w = self.inhabitant(&ty, &scope, &st, 2)?;
            let meta = Term::Meta(n, ty);
            st = self.unify_with(&st, |u| u.unify(&mut Vec::new(), &meta, &w))?;
        }
    }

    /// A closed term of type `ty` built from the eigenvariables in `scope`
    /// and the constants of the signature.
    fn inhabitant(&self, ty: &Ty, scope: &[Name], st: &UnifState, fuel: usize) -> Option<Term> {
        if ty.vars().iter().any(|v| st.tys.is_solvable(v)) {
            return None;
        }
        for e in scope {
            if self.eigens.get(e) == Some(ty) {
                return Some(Term::Eigen(e.clone(), ty.clone()));
            }
        }
        let mut with_args = Vec::new();
        for (name, decl) in self.env.sig.constants() {
            if decl.kind == ConstKind::Predicate {
                continue;
            }
            let (args, target) = decl.schema.body.split_arrows();
            let Some(phi) = match_type(target, ty, &decl.schema.params) else { continue };
            if decl.schema.params.iter().any(|p| phi.get(p).is_none()) {
                continue;
            }
            let tys: Vec<Ty> = decl.schema.params.iter().map(|p| phi.get(p).unwrap().clone()).collect();
            let c = Term::Const(name.clone(), tys);
            if args.is_empty() {
                return Some(c);
            }
            with_args.push((c, args.iter().map(|a| a.subst(&phi)).collect::<Vec<_>>()));
        }
        if fuel == 0 {
            return None;
        }
        'outer: for (c, arg_tys) in with_args {
            let mut args = Vec::new();
            for a in &arg_tys {
                match self.inhabitant(a, scope, st, fuel - 1) {
                    Some(t) => args.push(t),
                    None => continue 'outer,
                }
            }
            return Some(Term::app(c, args));
        }
        None
    }

    /// Replays the recorded steps through the rule engine.
    fn build(&self, slot: usize, seq: &Sequent, st: &UnifState) -> Result<ProofTree, RuleError> {
        let step = resolve_step(self.slots[slot].step.as_ref().expect("closed slot"), st);
        let applied = apply_step(self.env, seq, &step)?;
        let children =
            applied.premises.iter().zip(&self.slots[slot].children).map(|(p, &c)| self.build(c, p, st)).collect::<Result<Vec<_>, _>>()?;
        Ok(ProofTree { sequent: seq.clone(), step, cases: applied.cases, children })
    }
}

/// One-way matching of a constant's result type against a target type.
fn match_type(pattern: &Ty, target: &Ty, params: &[Name]) -> Option<TySubst> {
    fn go(p: &Ty, t: &Ty, params: &[Name], acc: &mut TySubst) -> bool {
        match (p, t) {
            (Ty::Var(v), _) if params.contains(v) => match acc.get(v) {
                Some(b) => b == t,
                None => {
                    acc.insert(v.clone(), t.clone());
                    true
                }
            },
            (Ty::Var(a), Ty::Var(b)) => a == b,
            (Ty::Sort(a), Ty::Sort(b)) => a == b,
            (Ty::App(c, xs), Ty::App(d, ys)) => c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, params, acc)),
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => go(a1, a2, params, acc) && go(b1, b2, params, acc),
            _ => false,
        }
    }
    let mut acc = TySubst::new();
    go(pattern, target, params, &mut acc).then_some(acc)
}

fn step_terms(step: &Step) -> Vec<&Term> {
    match step {
        Step::ExistsR { witness } | Step::AllL { witness, .. } => vec![witness],
        Step::DefR { theta, .. } => theta.iter().map(|(_, t)| t).collect(),
        Step::Apply { witnesses, .. } => witnesses.iter().collect(),
        _ => vec![],
    }
}

fn resolve_step(step: &Step, st: &UnifState) -> Step {
    let theta = st.theta();
    let phi = st.tys.subst();
    let fix = |t: &Term| t.subst(&theta).ty_subst(&phi).normalize();
    match step {
        Step::ExistsR { witness } => Step::ExistsR { witness: fix(witness) },
        Step::DefR { clause, phi: cphi, theta: ctheta } => Step::DefR {
            clause: *clause,
            phi: TySubst::from_pairs(cphi.iter().map(|(k, v)| (k.clone(), v.subst(&phi)))),
            theta: ctheta.map_values(fix),
        },
        other => other.clone(),
    }
}

/// Unfolds the goal with one clause, determining every clause variable from
/// the goal.
pub(crate) fn match_head(env: Env<'_>, seq: &Sequent, ci: usize) -> Result<Step, String> {
    let atom = seq.goal.as_atom().ok_or("the goal is not atomic")?;
    let block = env.sig.block_of(&atom.pred).ok_or("not defined")?;
    let c = reduce_clause(&block.clauses[ci]);
    let mut fresh = Fresh::new();
    let rc = rename_clause(&c, &mut fresh);
    let mut st = UnifState::new();
    for (_, v) in &rc.params {
        if let Ty::Var(n) = v {
            st.tys.add_solvable(n.clone());
        }
    }
    {
        let mut u = Unifier::new(env.sig, &mut fresh, &mut st);
        unify_formulas(&mut u, &mut Vec::new(), &Formula::Atom(rc.head.clone()), &seq.goal)
            .and_then(|_| u.finish())
            .map_err(|e| format!("clause {} does not match: {e}", ci + 1))?;
    }
    if let Some(eq) = st.tys.ambiguities.first() {
        return Err(format!("clause {} matches only when {eq}", ci + 1));
    }
    let step = resolve_step(
        &Step::DefR {
            clause: ci,
            phi: TySubst::from_pairs(rc.params.iter().cloned()),
            theta: TermSubst::from_pairs(rc.vars.iter().cloned()),
        },
        &st,
    );
    if let Step::DefR { phi, theta, .. } = &step {
        if phi.iter().any(|(_, t)| t.vars().iter().any(|v| !seq.psi.contains(v))) {
            return Err(format!("clause {} leaves a type parameter undetermined", ci + 1));
        }
        if let Some((x, _)) = theta.iter().find(|(_, t)| t.has_meta()) {
            return Err(format!("clause {} leaves the variable {x} undetermined", ci + 1));
        }
    }
    Ok(step)
}
