//! Ground replay of schematic proofs.
//!
//! A schematic proof is instantiated at ground types and re-checked by a
//! kernel that knows only ground clause instances. Case analysis and
//! unfolding are re-derived from those instances; the remaining rules are
//! re-run on the ground sequents.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::defs::{instantiate_block, GroundClause};
use crate::engine::{apply_step, CaseInfo, Env, LemmaStatement, ProofTree, RuleError, Sequent, Source, Step};
use crate::syntax::typing::infer_type;
use crate::syntax::{Annotation, Atom, Formula, Fresh, Name, Signature, Term, TermSubst, Ty, TySubst};
use crate::unify::{rename_clause, UnifState, Unifier, UnifyError};

/// Applies a ground type assignment to every sequent and payload of a proof.
pub fn instantiate_proof(pi: &ProofTree, phi: &TySubst) -> ProofTree {
    ProofTree {
        sequent: instantiate_sequent(&pi.sequent, phi),
        step: instantiate_step(&pi.step, phi),
        cases: pi
            .cases
            .iter()
            .map(|c| CaseInfo { clause: c.clause, phi: map_tysubst(&c.phi, phi), theta: c.theta.ty_subst(phi) })
            .collect(),
        children: pi.children.iter().map(|c| instantiate_proof(c, phi)).collect(),
    }
}

fn map_tysubst(s: &TySubst, phi: &TySubst) -> TySubst {
    TySubst::from_pairs(s.iter().map(|(k, v)| (k.clone(), v.subst(phi))))
}

fn instantiate_sequent(s: &Sequent, phi: &TySubst) -> Sequent {
    let mut out = s.clone();
    out.psi.retain(|v| phi.get(v).is_none());
    for (_, t) in &mut out.sigma {
        *t = t.subst(phi);
    }
    for h in &mut out.hyps {
        h.formula = h.formula.ty_subst(phi);
    }
    out.goal = out.goal.ty_subst(phi);
    out
}

fn instantiate_step(step: &Step, phi: &TySubst) -> Step {
    match step {
        Step::AllL { hyp, witness } => Step::AllL { hyp: hyp.clone(), witness: witness.ty_subst(phi) },
        Step::ExistsR { witness } => Step::ExistsR { witness: witness.ty_subst(phi) },
        Step::DefR { clause, phi: p, theta } => Step::DefR { clause: *clause, phi: map_tysubst(p, phi), theta: theta.ty_subst(phi) },
        Step::Apply { source, targets, witnesses } => Step::Apply {
            source: match source {
                Source::Lemma { name, tys } => Source::Lemma { name: name.clone(), tys: tys.iter().map(|t| t.subst(phi)).collect() },
                s => s.clone(),
            },
            targets: targets.clone(),
            witnesses: witnesses.iter().map(|w| w.ty_subst(phi)).collect(),
        },
        Step::Assert { formula } => Step::Assert { formula: formula.ty_subst(phi) },
        s => s.clone(),
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ReplayReason {
    #[error("the sequent is not ground: {0}")]
    NotGround(String),
    #[error("the proof is admitted")]
    Admitted,
    #[error("case analysis yields {expected} case(s), the proof has {found}")]
    CaseCount { expected: usize, found: usize },
    #[error("no recorded case matches the ground case for clause {clause}")]
    CaseMismatch { clause: usize },
    #[error("premise {index} differs from the recorded subproof")]
    PremiseMismatch { index: usize },
    #[error("ground unification left the pattern fragment: {0}")]
    NonPattern(String),
    #[error("no ground instance of clause {clause} matches the goal")]
    NoClauseInstance { clause: usize },
    #[error("lemma {0} has no proof to replay")]
    MissingLemma(Name),
    #[error("lemma {name} at [{tys}]: {inner}")]
    Lemma { name: Name, tys: String, inner: Box<ReplayError> },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// The first node at which ground replay diverged. `path` lists child
/// indices from the root.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("at node {} ({step}): {reason}", display_path(.path))]
pub struct ReplayError {
    pub path: Vec<usize>,
    pub step: String,
    pub reason: ReplayReason,
}

fn display_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// A proved statement together with its proof, for replaying `apply` steps.
#[derive(Clone, Debug)]
pub struct ProvedLemma {
    pub statement: LemmaStatement,
    pub proof: Option<ProofTree>,
}

/// Replays ground proofs against ground instances of the definitions.
pub struct GroundKernel<'a> {
    sig: &'a Signature,
    lemmas: &'a IndexMap<Name, LemmaStatement>,
    proofs: &'a IndexMap<Name, ProvedLemma>,
    pool: Vec<Ty>,
    clauses: HashMap<(usize, Vec<Ty>), Vec<GroundClause>>,
    lemma_results: HashMap<(Name, Vec<Ty>), Result<(), ReplayError>>,
}

impl<'a> GroundKernel<'a> {
    pub fn new(
        sig: &'a Signature,
        lemmas: &'a IndexMap<Name, LemmaStatement>,
        proofs: &'a IndexMap<Name, ProvedLemma>,
        pool: &[Ty],
    ) -> Self {
        GroundKernel { sig, lemmas, proofs, pool: pool.to_vec(), clauses: HashMap::new(), lemma_results: HashMap::new() }
    }

    fn env(&self) -> Env<'a> {
        Env { sig: self.sig, lemmas: self.lemmas }
    }

    /// Checks a ground proof. Clause parameters range over the pool and
    /// every type occurring in the proof.
    pub fn replay(&mut self, pi: &ProofTree) -> Result<(), ReplayError> {
        let mut types: BTreeSet<Ty> = self.pool.iter().cloned().collect();
        pi.for_each(&mut |n| {
            let mut add = |t: &Ty| t.collect_subtypes(&mut types);
            n.sequent.sigma.iter().for_each(|(_, t)| add(t));
            n.sequent.hyps.iter().for_each(|h| h.formula.for_each_type(&mut add));
            n.sequent.goal.for_each_type(&mut add);
        });
        types.retain(|t| t.is_ground());
        let saved = std::mem::replace(&mut self.pool, types.into_iter().collect());
        self.clauses.clear();
        let r = self.node(pi, &mut Vec::new());
        self.pool = saved;
        self.clauses.clear();
        r
    }

    fn node(&mut self, pi: &ProofTree, path: &mut Vec<usize>) -> Result<(), ReplayError> {
        let fail = |path: &[usize], reason: ReplayReason| ReplayError { path: path.to_vec(), step: pi.step.to_string(), reason };
        let seq = &pi.sequent;
        if !seq.psi.is_empty() {
            return Err(fail(path, ReplayReason::NotGround(format!("type variables {:?}", seq.psi))));
        }
        seq.lint(self.sig).map_err(|e| fail(path, ReplayReason::NotGround(e)))?;
        let premises = match &pi.step {
            Step::Skip => return Err(fail(path, ReplayReason::Admitted)),
            Step::DefL { hyp } => {
                let cases = self.def_l(seq, hyp).map_err(|r| fail(path, r))?;
                match_cases(seq, &cases, pi).map_err(|r| fail(path, r))?;
                None
            }
            Step::DefR { clause, theta, .. } => Some(vec![self.def_r(seq, *clause, theta).map_err(|r| fail(path, r))?]),
            step => {
                if let Step::Apply { source: Source::Lemma { name, tys }, .. } = step {
                    self.lemma(name, tys).map_err(|r| fail(path, r))?;
                }
                Some(apply_step(self.env(), seq, step).map_err(|e| fail(path, e.into()))?.premises)
            }
        };
        if let Some(ps) = premises {
            if ps.len() != pi.children.len() {
                return Err(fail(path, ReplayReason::CaseCount { expected: ps.len(), found: pi.children.len() }));
            }
            for (i, (p, c)) in ps.iter().zip(&pi.children).enumerate() {
                if *p != c.sequent {
                    return Err(fail(path, ReplayReason::PremiseMismatch { index: i }));
                }
            }
        }
        for (i, c) in pi.children.iter().enumerate() {
            path.push(i);
            self.node(c, path)?;
            path.pop();
        }
        Ok(())
    }

    fn lemma(&mut self, name: &Name, tys: &[Ty]) -> Result<(), ReplayReason> {
        let key = (name.clone(), tys.to_vec());
        if let Some(r) = self.lemma_results.get(&key) {
            return r.clone().map_err(|e| lemma_reason(name, tys, e));
        }
        let lemma = self.proofs.get(name).ok_or_else(|| ReplayReason::MissingLemma(name.clone()))?;
        let proof = lemma.proof.as_ref().ok_or_else(|| ReplayReason::MissingLemma(name.clone()))?;
        let phi = TySubst::from_pairs(lemma.statement.params.iter().cloned().zip(tys.iter().cloned()));
        let ground = instantiate_proof(proof, &phi);
        let mut sub = GroundKernel::new(self.sig, self.lemmas, self.proofs, &self.pool);
        sub.lemma_results = std::mem::take(&mut self.lemma_results);
        let r = sub.replay(&ground);
        self.lemma_results = sub.lemma_results;
        self.lemma_results.insert(key, r.clone());
        r.map_err(|e| lemma_reason(name, tys, e))
    }

    fn ground_clauses(&mut self, pred: &str, tys: &[Ty]) -> Result<Vec<GroundClause>, ReplayReason> {
        let idx = self.sig.block_index(pred).ok_or_else(|| RuleError::na("def", format!("{pred} is not defined")))?;
        let key = (idx, tys.to_vec());
        if let Some(cs) = self.clauses.get(&key) {
            return Ok(cs.clone());
        }
        let block = &self.sig.blocks()[idx];
        let cs = instantiate_block(block, tys, &self.pool).map_err(|e| RuleError::Invalid(e.to_string()))?;
        self.clauses.insert(key, cs.clone());
        Ok(cs)
    }

    fn def_r(&mut self, seq: &Sequent, clause: usize, theta: &TermSubst) -> Result<Sequent, ReplayReason> {
        let atom = seq.goal.as_atom().ok_or_else(|| RuleError::na("def-r", "the goal is not atomic"))?;
        for gc in self.ground_clauses(&atom.pred, &atom.tys)? {
            if gc.source != clause || gc.clause.head.pred != atom.pred {
                continue;
            }
            let mut inst = TermSubst::new();
            let mut typed = true;
            for (x, ty) in &gc.clause.binder {
                match theta.get(x) {
                    Some(w) if infer_type(self.sig, &[], w).as_ref() == Ok(ty) => inst.insert(x.clone(), w.clone()),
                    _ => typed = false,
                }
            }
            if !typed || inst.len() != theta.len() {
                continue;
            }
            let (head, body) = gc.clause.instantiate(&inst);
            if Formula::Atom(head).aeq(&seq.goal) {
                let mut free = Vec::new();
                body.collect_free(&mut free);
                for v in free {
                    if let Term::Eigen(n, _) = &v {
                        if !seq.has_eigen(n) {
                            return Err(RuleError::Invalid(format!("{n} is not in scope")).into());
                        }
                    }
                }
                return Ok(Sequent { goal: body, ..seq.clone() });
            }
        }
        Err(ReplayReason::NoClauseInstance { clause })
    }

    /// The ground cases of a hypothesis: one per ground clause instance whose
    /// head unifies with it, tagged with the source clause index.
    fn def_l(&mut self, seq: &Sequent, hyp: &str) -> Result<Vec<(usize, Sequent)>, ReplayReason> {
        let formula = seq.hyp(hyp).map(|h| h.formula.clone()).ok_or_else(|| RuleError::UnknownHyp(Name::from(hyp)))?;
        let atom = formula.as_atom().ok_or_else(|| RuleError::na("def-l", format!("{hyp} is not atomic")))?.clone();
        let block = self.sig.block_of(&atom.pred).cloned().expect("checked by ground_clauses");
        let clauses = self.ground_clauses(&atom.pred, &atom.tys)?;
        let body_ann = atom.ann.generation().map(Annotation::Star).unwrap_or(Annotation::Plain);
        let mut fresh = Fresh::new();
        let mut out = Vec::new();
        for gc in clauses.iter().filter(|gc| gc.clause.head.pred == atom.pred) {
            let rc = rename_clause(&gc.clause, &mut fresh);
            let mut st = UnifState::new();
            for (i, (e, _)) in seq.sigma.iter().enumerate() {
                st.raise(e.clone(), i as u64);
            }
            let res = {
                let mut u = Unifier::new(self.sig, &mut fresh, &mut st);
                unify_ground_atoms(&mut u, &atom, &rc.head).and_then(|_| u.finish())
            };
            match res {
                Err(UnifyError::NoUnifier(_)) => continue,
                Err(UnifyError::NonPattern(m)) => return Err(ReplayReason::NonPattern(m)),
                Ok(()) => {}
            }
            if let Some(eq) = st.tys.ambiguities.first() {
                return Err(ReplayReason::NotGround(eq.to_string()));
            }
            let theta = st.theta();
            let mut s = seq.clone();
            s.remove_hyp(hyp);
            s.sigma.retain(|(e, _)| !theta.contains(e));
            let sigma_theta = theta.restrict(|k| seq.has_eigen(k));
            for h in &mut s.hyps {
                h.formula = h.formula.subst(&sigma_theta);
            }
            s.goal = s.goal.subst(&sigma_theta);
            let body = rc.body.subst(&theta).map_atoms(&mut |a| {
                if block.defines(&a.pred) {
                    Atom { ann: body_ann, ..a.clone() }
                } else {
                    a.clone()
                }
            });
            let mut leftover = Vec::new();
            body.collect_free(&mut leftover);
            s.goal.collect_free(&mut leftover);
            s.hyps.iter().for_each(|h| h.formula.collect_free(&mut leftover));
            let mut ren = TermSubst::new();
            for v in leftover {
                if let Term::Meta(n, ty) = v {
                    if !ren.contains(&n) {
                        let e = s.fresh_eigen(&n, ty);
                        ren.insert(n, e);
                    }
                }
            }
            s.subst(&ren);
            let body = body.subst(&ren);
            if body != Formula::Top {
                s.push_hyp(body);
            }
            out.push((gc.source, s));
        }
        Ok(out)
    }
}

fn lemma_reason(name: &Name, tys: &[Ty], e: ReplayError) -> ReplayReason {
    ReplayReason::Lemma { name: name.clone(), tys: crate::syntax::ty::join(tys, ", "), inner: Box::new(e) }
}

fn unify_ground_atoms(u: &mut Unifier<'_>, a: &Atom, b: &Atom) -> Result<(), UnifyError> {
    if a.pred != b.pred || a.tys != b.tys || a.args.len() != b.args.len() {
        return Err(UnifyError::NoUnifier("different predicate instances".into()));
    }
    for (x, y) in a.args.iter().zip(&b.args) {
        u.unify(&mut Vec::new(), x, y)?;
    }
    Ok(())
}

/// Checks that the ground cases and the recorded subproofs correspond one to
/// one, up to the names of newly introduced eigenvariables.
fn match_cases(parent: &Sequent, cases: &[(usize, Sequent)], pi: &ProofTree) -> Result<(), ReplayReason> {
    if cases.len() != pi.children.len() {
        return Err(ReplayReason::CaseCount { expected: cases.len(), found: pi.children.len() });
    }
    let mut used = vec![false; pi.children.len()];
    for (clause, ground) in cases {
        let hit = pi.children.iter().enumerate().position(|(i, c)| {
            !used[i] && pi.cases.get(i).is_none_or(|ci| ci.clause == *clause) && same_up_to_new_eigens(parent, ground, &c.sequent)
        });
        match hit {
            Some(i) => used[i] = true,
            None => return Err(ReplayReason::CaseMismatch { clause: *clause }),
        }
    }
    Ok(())
}

fn same_up_to_new_eigens(parent: &Sequent, a: &Sequent, b: &Sequent) -> bool {
    if a.psi != b.psi || a.sigma.len() != b.sigma.len() || a.hyps.len() != b.hyps.len() {
        return false;
    }
    let old: BTreeSet<&Name> = parent.sigma.iter().map(|(n, _)| n).collect();
    let mut ren = Renaming { old, map: BTreeMap::new() };
    for (x, y) in a.hyps.iter().zip(&b.hyps) {
        if x.label != y.label || !ren.formula(&x.formula, &y.formula) {
            return false;
        }
    }
    if !ren.formula(&a.goal, &b.goal) {
        return false;
    }
    let mapped: BTreeSet<(Name, &Ty)> = a.sigma.iter().map(|(n, t)| (ren.map.get(n).cloned().unwrap_or_else(|| n.clone()), t)).collect();
    let target: BTreeSet<(Name, &Ty)> = b.sigma.iter().map(|(n, t)| (n.clone(), t)).collect();
    mapped == target
}

struct Renaming<'s> {
    old: BTreeSet<&'s Name>,
    map: BTreeMap<Name, Name>,
}

impl Renaming<'_> {
    fn formula(&mut self, a: &Formula, b: &Formula) -> bool {
        match (a, b) {
            (Formula::Top, Formula::Top) | (Formula::Bot, Formula::Bot) => true,
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => self.formula(a1, b1) && self.formula(a2, b2),
            (Formula::Forall(x, a1), Formula::Forall(y, b1)) | (Formula::Exists(x, a1), Formula::Exists(y, b1)) => {
                x.ty == y.ty && self.formula(a1, b1)
            }
            (Formula::Atom(x), Formula::Atom(y)) => {
                x.pred == y.pred
                    && x.tys == y.tys
                    && x.ann == y.ann
                    && x.args.len() == y.args.len()
                    && x.args.iter().zip(&y.args).all(|(s, t)| self.term(s, t))
            }
            _ => false,
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Eigen(n, t), Term::Eigen(m, s)) => {
                if t != s {
                    return false;
                }
                if self.old.contains(n) || self.old.contains(m) {
                    return n == m;
                }
                match self.map.get(n) {
                    Some(prev) => prev == m,
                    None => {
                        if self.map.values().any(|v| v == m) {
                            return false;
                        }
                        self.map.insert(n.clone(), m.clone());
                        true
                    }
                }
            }
            (Term::Lam(x, a1), Term::Lam(y, b1)) => x.ty == y.ty && self.term(a1, b1),
            (Term::App(h1, a1), Term::App(h2, a2)) => {
                a1.len() == a2.len() && self.term(h1, h2) && a1.iter().zip(a2).all(|(s, t)| self.term(s, t))
            }
            _ => a == b,
        }
    }
}

/// The verdict for one type assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentReport {
    pub assignment: TySubst,
    pub result: Result<(), ReplayError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessReport {
    pub theorem: Name,
    pub assignments: Vec<AssignmentReport>,
}

impl HarnessReport {
    pub fn ok(&self) -> bool {
        self.assignments.iter().all(|a| a.result.is_ok())
    }

    pub fn passed(&self) -> usize {
        self.assignments.iter().filter(|a| a.result.is_ok()).count()
    }
}

impl fmt::Display for HarnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}/{} replay(s) ok", self.theorem, self.passed(), self.assignments.len())?;
        for a in &self.assignments {
            let tys: Vec<String> = a.assignment.iter().map(|(k, v)| format!("{k} := {v}")).collect();
            match &a.result {
                Ok(()) => writeln!(f, "  [{}] ok", tys.join(", "))?,
                Err(e) => writeln!(f, "  [{}] FAILED {e}", tys.join(", "))?,
            }
        }
        Ok(())
    }
}

/// Most assignments tried per theorem.
pub const MAX_ASSIGNMENTS: usize = 27;

pub fn default_pool() -> Vec<Ty> {
    let i = Ty::sort("i");
    vec![i.clone(), Ty::app("list", vec![i.clone()]), Ty::arrow(i.clone(), i)]
}

/// Every assignment of pool types to `params`, in lexicographic order,
/// truncated to [`MAX_ASSIGNMENTS`].
pub fn assignments(params: &[Name], pool: &[Ty]) -> Vec<TySubst> {
    let mut out = vec![TySubst::new()];
    for p in params {
        let mut next = Vec::new();
        for s in &out {
            for t in pool {
                let mut s2 = s.clone();
                s2.insert(p.clone(), t.clone());
                next.push(s2);
                if next.len() == MAX_ASSIGNMENTS {
                    break;
                }
            }
            if next.len() == MAX_ASSIGNMENTS {
                break;
            }
        }
        out = next;
    }
    out
}

/// Instantiates and replays a complete schematic proof at every pool
/// assignment of its type parameters.
pub fn soundness_harness(
    sig: &Signature,
    lemmas: &IndexMap<Name, LemmaStatement>,
    proofs: &IndexMap<Name, ProvedLemma>,
    theorem: &str,
    pi: &ProofTree,
    pool: &[Ty],
) -> HarnessReport {
    let params = pi.sequent.psi.clone();
    let mut kernel = GroundKernel::new(sig, lemmas, proofs, pool);
    let assignments = assignments(&params, pool)
        .into_iter()
        .map(|phi| {
            let ground = instantiate_proof(pi, &phi);
            AssignmentReport { result: kernel.replay(&ground), assignment: phi }
        })
        .collect();
    HarnessReport { theorem: Name::from(theorem), assignments }
}
