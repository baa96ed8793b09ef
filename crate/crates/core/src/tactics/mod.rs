//! The tactic language: proof states with undo, and the translation of each
//! command into sequent rules.

mod search;

use thiserror::Error;

use crate::engine::{apply_step, CaseInfo, Env, ProofTree, RuleError, Sequent, Source, Step};
use crate::frontend::{ElabError, Elaborator, FreeVars, SFormula, STerm, STy, Tactic};
use crate::syntax::{Formula, Fresh, Name, Printer, Term, Ty, TySubst};
use crate::unify::{unify_formulas, UnifState, Unifier, UnifyError};

pub use search::{search, SearchError, DEFAULT_DEPTH};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TacticError {
    #[error("no open subgoals")]
    NoOpenGoals,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error("no proof found within depth {0}")]
    NoProofFound(usize),
    #[error("search needs a non-pattern unification: {0}")]
    NonPattern(String),
    #[error("cannot determine the type arguments of {0}; give them explicitly")]
    UnresolvedTypeArgs(Name),
    #[error("cannot determine the instance for {0}; supply it with `with`")]
    UnresolvedInstance(Name),
    #[error("apply failed: {0}")]
    ApplyFailed(String),
    #[error("unfold failed: {0}")]
    UnfoldFailed(String),
}

impl From<SearchError> for TacticError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::NoProofFound(d) => TacticError::NoProofFound(d),
            SearchError::NonPattern(m) => TacticError::NonPattern(m),
            SearchError::Internal(r) => TacticError::Rule(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Node {
    sequent: Sequent,
    step: Option<Step>,
    cases: Vec<CaseInfo>,
    children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
struct Snapshot {
    nodes: Vec<Node>,
    open: Vec<usize>,
}

/// A proof under construction. Open subgoals are solved first to last.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofState {
    nodes: Vec<Node>,
    open: Vec<usize>,
    history: Vec<Snapshot>,
}

impl ProofState {
    pub fn new(root: Sequent) -> Self {
        ProofState {
            nodes: vec![Node { sequent: root, step: None, cases: Vec::new(), children: Vec::new() }],
            open: vec![0],
            history: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.open.is_empty()
    }

    pub fn open_goals(&self) -> impl Iterator<Item = &Sequent> {
        self.open.iter().map(|&i| &self.nodes[i].sequent)
    }

    pub fn current(&self) -> Option<&Sequent> {
        self.open.first().map(|&i| &self.nodes[i].sequent)
    }

    pub fn can_undo(&self) -> bool {
        !self.history.is_empty()
    }

    /// Applies one rule to the current subgoal.
    pub fn apply(&mut self, env: Env<'_>, step: Step) -> Result<Vec<usize>, TacticError> {
        let &cur = self.open.first().ok_or(TacticError::NoOpenGoals)?;
        let applied = apply_step(env, &self.nodes[cur].sequent, &step)?;
        let mut kids = Vec::new();
        for s in applied.premises {
            kids.push(self.nodes.len());
            self.nodes.push(Node { sequent: s, step: None, cases: Vec::new(), children: Vec::new() });
        }
        let node = &mut self.nodes[cur];
        node.step = Some(step);
        node.cases = applied.cases;
        node.children = kids.clone();
        self.open.splice(0..1, kids.iter().copied());
        Ok(kids)
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { nodes: self.nodes.clone(), open: self.open.clone() }
    }

    fn restore(&mut self, s: Snapshot) {
        self.nodes = s.nodes;
        self.open = s.open;
    }

    pub fn undo(&mut self) -> Result<(), TacticError> {
        let s = self.history.pop().ok_or(TacticError::NothingToUndo)?;
        self.restore(s);
        Ok(())
    }

    /// Runs a command. On error the state is unchanged.
    pub fn run(&mut self, env: Env<'_>, tactic: &Tactic) -> Result<(), TacticError> {
        if let Tactic::Undo = tactic {
            return self.undo();
        }
        if self.open.is_empty() {
            return Err(TacticError::NoOpenGoals);
        }
        let saved = self.snapshot();
        match self.run_inner(env, tactic) {
            Ok(()) => {
                self.history.push(saved);
                Ok(())
            }
            Err(e) => {
                self.restore(saved);
                Err(e)
            }
        }
    }

    fn run_inner(&mut self, env: Env<'_>, tactic: &Tactic) -> Result<(), TacticError> {
        let seq = self.current().ok_or(TacticError::NoOpenGoals)?.clone();
        match tactic {
            Tactic::Intros => {
                let mut any = false;
                loop {
                    let step = match &self.current().expect("intros keeps one goal").goal {
                        Formula::Forall(..) => Step::AllR,
                        Formula::Imp(..) => Step::ImpR,
                        _ => break,
                    };
                    self.apply(env, step)?;
                    any = true;
                }
                if !any {
                    return Err(RuleError::na("intros", "the goal is neither universal nor an implication").into());
                }
            }
            Tactic::Case(h) => self.case(env, &seq, h)?,
            Tactic::Induction(n) => {
                self.apply(env, Step::Induction { index: *n })?;
            }
            Tactic::Apply { source, tys, targets, withs } => {
                let step = build_apply(env, &seq, source, tys.as_deref(), targets, withs)?;
                self.apply(env, step)?;
            }
            Tactic::Search(d) => {
                let depth = d.unwrap_or(DEFAULT_DEPTH);
                let tree = search(env, &seq, depth)?;
                self.graft(tree);
            }
            Tactic::Unfold(n) => {
                let step = build_unfold(env, &seq, *n)?;
                self.apply(env, step)?;
            }
            Tactic::Split => {
                self.apply(env, Step::AndR)?;
            }
            Tactic::Left => {
                self.apply(env, Step::OrR1)?;
            }
            Tactic::Right => {
                self.apply(env, Step::OrR2)?;
            }
            Tactic::Exists(t) => {
                let ty = match &seq.goal {
                    Formula::Exists(x, _) => x.ty.clone(),
                    _ => return Err(RuleError::na("exists", "the goal is not existential").into()),
                };
                let w = elab_term(env, &seq, t, &ty)?;
                self.apply(env, Step::ExistsR { witness: w })?;
            }
            Tactic::Assert(f) => {
                let formula = elab_formula(env, &seq, f)?;
                self.apply(env, Step::Assert { formula })?;
            }
            Tactic::Skip => {
                self.apply(env, Step::Skip)?;
            }
            Tactic::Undo => unreachable!(),
        }
        Ok(())
    }

    fn case(&mut self, env: Env<'_>, seq: &Sequent, h: &str) -> Result<(), TacticError> {
        let hyp = seq.hyp(h).ok_or_else(|| RuleError::UnknownHyp(Name::from(h)))?;
        let step = match &hyp.formula {
            Formula::And(..) => Step::AndL { hyp: hyp.label.clone() },
            Formula::Or(..) => Step::OrL { hyp: hyp.label.clone() },
            Formula::Exists(..) => Step::ExistsL { hyp: hyp.label.clone() },
            Formula::Bot => Step::BotL { hyp: hyp.label.clone() },
            Formula::Atom(_) => Step::DefL { hyp: hyp.label.clone() },
            _ => return Err(RuleError::na("case", format!("{h} is neither atomic nor a conjunction, disjunction or existential")).into()),
        };
        let kids = self.apply(env, step)?;
        for k in kids {
            self.decompose(env, k, seq)?;
        }
        Ok(())
    }

    /// Splits conjunctions and existentials among the hypotheses a case
    /// analysis just added.
    fn decompose(&mut self, env: Env<'_>, mut node: usize, parent: &Sequent) -> Result<(), TacticError> {
        loop {
            let s = &self.nodes[node].sequent;
            let target =
                s.hyps.iter().find(|h| parent.hyp(&h.label).is_none() && matches!(h.formula, Formula::And(..) | Formula::Exists(..)));
            let Some(h) = target else { return Ok(()) };
            let step = match h.formula {
                Formula::And(..) => Step::AndL { hyp: h.label.clone() },
                _ => Step::ExistsL { hyp: h.label.clone() },
            };
            let pos = self.open.iter().position(|&o| o == node).expect("case premise is open");
            let applied = apply_step(env, s, &step)?;
            let seq = applied.premises.into_iter().next().expect("one premise");
            let k = self.nodes.len();
            self.nodes.push(Node { sequent: seq, step: None, cases: Vec::new(), children: Vec::new() });
            let n = &mut self.nodes[node];
            n.step = Some(step);
            n.children = vec![k];
            self.open[pos] = k;
            node = k;
        }
    }

    /// Attaches a finished derivation of the current subgoal.
    fn graft(&mut self, tree: ProofTree) {
        let cur = self.open.remove(0);
        self.attach(cur, tree);
    }

    fn attach(&mut self, at: usize, tree: ProofTree) {
        debug_assert_eq!(self.nodes[at].sequent, tree.sequent);
        let mut kids = Vec::new();
        for c in tree.children {
            let k = self.nodes.len();
            self.nodes.push(Node { sequent: c.sequent.clone(), step: None, cases: Vec::new(), children: Vec::new() });
            kids.push((k, c));
        }
        let n = &mut self.nodes[at];
        n.step = Some(tree.step);
        n.cases = tree.cases;
        n.children = kids.iter().map(|(k, _)| *k).collect();
        for (k, c) in kids {
            self.attach(k, c);
        }
    }

    /// The derivation built so far, if every subgoal is closed.
    pub fn proof_tree(&self) -> Option<ProofTree> {
        if !self.is_complete() {
            return None;
        }
        Some(self.tree_at(0))
    }

    fn tree_at(&self, i: usize) -> ProofTree {
        let n = &self.nodes[i];
        ProofTree {
            sequent: n.sequent.clone(),
            step: n.step.clone().expect("closed node has a step"),
            cases: n.cases.clone(),
            children: n.children.iter().map(|&c| self.tree_at(c)).collect(),
        }
    }

    /// The current subgoal in full and the goals of the others.
    pub fn render(&self, printer: &Printer) -> String {
        let mut out = String::new();
        let mut goals = self.open_goals();
        match goals.next() {
            None => out.push_str("Proof completed.\n"),
            Some(first) => {
                out.push_str(&first.render(printer));
                for (i, g) in goals.enumerate() {
                    out.push_str(&format!("\nSubgoal {} is:\n {}\n", i + 2, printer.formula(&g.goal)));
                }
            }
        }
        out
    }
}

fn elaborator<'a>(env: Env<'a>, seq: &Sequent) -> Elaborator<'a> {
    Elaborator::new(env.sig, seq.psi.clone(), FreeVars::Eigens(seq.sigma.clone()))
}

pub fn elab_term(env: Env<'_>, seq: &Sequent, t: &STerm, ty: &Ty) -> Result<Term, TacticError> {
    Ok(elaborator(env, seq).closed_term(t, ty)?)
}

pub fn elab_formula(env: Env<'_>, seq: &Sequent, f: &SFormula) -> Result<Formula, TacticError> {
    Ok(elaborator(env, seq).closed_formula(f)?)
}

fn unify_err(e: UnifyError) -> String {
    e.to_string()
}

fn build_apply(
    env: Env<'_>,
    seq: &Sequent,
    source: &str,
    tys: Option<&[STy]>,
    targets: &[String],
    withs: &[(String, STerm)],
) -> Result<Step, TacticError> {
    let mut fresh = Fresh::new();
    let mut st = UnifState::new();
    let (mut f, src_tys): (Formula, Option<Vec<Ty>>) = if let Some(h) = seq.hyp(source) {
        if tys.is_some() {
            return Err(TacticError::ApplyFailed(format!("{source} is a hypothesis and takes no type arguments")));
        }
        (h.formula.clone(), None)
    } else {
        let lem = env.lemmas.get(source).ok_or_else(|| RuleError::UnknownLemma(Name::from(source)))?;
        let tys: Vec<Ty> = match tys {
            Some(ts) => {
                let e = elaborator(env, seq);
                ts.iter().map(|t| e.ty(t)).collect::<Result<_, _>>()?
            }
            None => lem
                .params
                .iter()
                .map(|p| {
                    let v = fresh.tyvar(p);
                    if let Ty::Var(n) = &v {
                        st.tys.add_solvable(n.clone());
                    }
                    v
                })
                .collect(),
        };
        let phi = TySubst::from_pairs(lem.params.iter().cloned().zip(tys.iter().cloned()));
        (lem.formula.ty_subst(&phi), Some(tys))
    };
    let scope: Vec<Name> = seq.sigma.iter().map(|(n, _)| n.clone()).collect();
    let mut witnesses: Vec<(Name, Term)> = Vec::new();
    let mut used_withs = 0;
    let mut instantiate =
        |f: Formula, fresh: &mut Fresh, st: &mut UnifState, witnesses: &mut Vec<(Name, Term)>| -> Result<Formula, TacticError> {
            match f {
                Formula::Forall(x, body) => {
                    let w = match withs.iter().find(|(n, _)| *n == *x.hint.0) {
                        Some((_, t)) => {
                            used_withs += 1;
                            let ty = st.tys.resolve(&x.ty);
                            elab_term(env, seq, t, &ty)?
                        }
                        None => {
                            let m = fresh.meta(&x.hint.0, x.ty.clone());
                            if let Term::Meta(n, _) = &m {
                                st.set_scope(n.clone(), scope.iter().cloned());
                            }
                            m
                        }
                    };
                    witnesses.push((x.hint.0.clone(), w.clone()));
                    Ok(body.instantiate(&w))
                }
                other => Ok(other),
            }
        };
    for t in targets {
        let target = seq.hyp(t).ok_or_else(|| RuleError::UnknownHyp(Name::from(t.as_str())))?.formula.clone();
        loop {
            match f {
                Formula::Forall(..) => f = instantiate(f, &mut fresh, &mut st, &mut witnesses)?,
                Formula::Imp(p, r) => {
                    let mut u = Unifier::new(env.sig, &mut fresh, &mut st);
                    unify_formulas(&mut u, &mut Vec::new(), &p, &target)
                        .map_err(|e| TacticError::ApplyFailed(format!("{t} does not match the antecedent: {}", unify_err(e))))?;
                    f = *r;
                    break;
                }
                _ => return Err(TacticError::ApplyFailed(format!("{source} has fewer antecedents than targets"))),
            }
        }
    }
    while let Formula::Forall(x, _) = &f {
        if !withs.iter().any(|(n, _)| *n == *x.hint.0) {
            break;
        }
        f = instantiate(f, &mut fresh, &mut st, &mut witnesses)?;
    }
    if used_withs != withs.len() {
        return Err(TacticError::ApplyFailed("a `with` names no quantified variable met while applying".into()));
    }
    {
        let mut u = Unifier::new(env.sig, &mut fresh, &mut st);
        u.finish().map_err(|e| TacticError::ApplyFailed(unify_err(e)))?;
    }
    if let Some(eq) = st.tys.ambiguities.first() {
        return Err(TacticError::ApplyFailed(format!("the match holds only when {eq}")));
    }
    let phi = st.tys.subst();
    let theta = st.theta();
    let mut ws = Vec::new();
    for (x, w) in witnesses {
        let w = w.subst(&theta).ty_subst(&phi).normalize();
        if w.has_meta() {
            return Err(TacticError::UnresolvedInstance(x));
        }
        ws.push(w);
    }
    let source = match src_tys {
        None => Source::Hyp(Name::from(source)),
        Some(tys) => {
            let tys: Vec<Ty> = tys.iter().map(|t| t.subst(&phi)).collect();
            if tys.iter().any(|t| t.vars().iter().any(|v| st.tys.is_solvable(v))) {
                return Err(TacticError::UnresolvedTypeArgs(Name::from(source)));
            }
            Source::Lemma { name: Name::from(source), tys }
        }
    };
    Ok(Step::Apply { source, targets: targets.iter().map(|t| Name::from(t.as_str())).collect(), witnesses: ws })
}

fn build_unfold(env: Env<'_>, seq: &Sequent, which: Option<usize>) -> Result<Step, TacticError> {
    let atom = seq.goal.as_atom().ok_or_else(|| TacticError::UnfoldFailed("the goal is not atomic".into()))?;
    let block = env.sig.block_of(&atom.pred).ok_or_else(|| TacticError::UnfoldFailed(format!("{} is not defined", atom.pred)))?;
    let candidates: Vec<usize> = block.clauses_for(&atom.pred).map(|(i, _)| i).collect();
    let candidates = match which {
        Some(n) => vec![*candidates
            .get(n.wrapping_sub(1))
            .ok_or_else(|| TacticError::UnfoldFailed(format!("{} has {} clause(s)", atom.pred, candidates.len())))?],
        None => candidates,
    };
    let mut last = String::from("no clause matches the goal");
    for ci in candidates {
        match search::match_head(env, seq, ci) {
            Ok(step) => return Ok(step),
            Err(m) => last = m,
        }
    }
    Err(TacticError::UnfoldFailed(last))
}
