use super::{CaseInfo, Env, RuleError, Sequent, Source, Step};
use crate::defs::{reduce_clause, DefBlock};
use crate::syntax::typing::{infer_type, wf_formula, wf_term};
use crate::syntax::{check_formula, Annotation, Atom, Formula, Fresh, Name, Term, TermSubst, Ty, TySubst};
use crate::unify::{match_clause_generic, MatchOutcome};

/// Premises of a rule application. `cases` is filled by case analysis, one
/// entry per premise.
#[derive(Clone, Debug, PartialEq)]
pub struct Applied {
    pub premises: Vec<Sequent>,
    pub cases: Vec<CaseInfo>,
}

impl Applied {
    fn of(premises: Vec<Sequent>) -> Self {
        Applied { premises, cases: Vec::new() }
    }
}

pub fn apply_step(env: Env<'_>, seq: &Sequent, step: &Step) -> Result<Applied, RuleError> {
    let name = step.name();
    let premises = match step {
        Step::TopR => match seq.goal {
            Formula::Top => vec![],
            _ => return Err(RuleError::na(name, "the goal is not true")),
        },
        Step::BotL { hyp } => match &hyp_formula(seq, hyp)? {
            Formula::Bot => vec![],
            _ => return Err(RuleError::na(name, format!("{hyp} is not false"))),
        },
        Step::Axiom { hyp } => {
            if hyp_formula(seq, hyp)?.aeq(&seq.goal) {
                vec![]
            } else {
                return Err(RuleError::na(name, format!("{hyp} is not the goal")));
            }
        }
        Step::AndR => match &seq.goal {
            Formula::And(a, b) => vec![with_goal(seq, a), with_goal(seq, b)],
            _ => return Err(RuleError::na(name, "the goal is not a conjunction")),
        },
        Step::AndL { hyp } => match hyp_formula(seq, hyp)? {
            Formula::And(a, b) => {
                let mut s = seq.clone();
                s.remove_hyp(hyp);
                s.push_hyp(*a);
                s.push_hyp(*b);
                vec![s]
            }
            _ => return Err(RuleError::na(name, format!("{hyp} is not a conjunction"))),
        },
        Step::OrR1 | Step::OrR2 => match &seq.goal {
            Formula::Or(a, b) => vec![with_goal(seq, if matches!(step, Step::OrR1) { a } else { b })],
            _ => return Err(RuleError::na(name, "the goal is not a disjunction")),
        },
        Step::OrL { hyp } => match hyp_formula(seq, hyp)? {
            Formula::Or(a, b) => {
                let mut out = Vec::new();
                for side in [*a, *b] {
                    let mut s = seq.clone();
                    s.remove_hyp(hyp);
                    s.push_hyp(side);
                    out.push(s);
                }
                out
            }
            _ => return Err(RuleError::na(name, format!("{hyp} is not a disjunction"))),
        },
        Step::ImpR => match &seq.goal {
            Formula::Imp(a, b) => {
                let mut s = with_goal(seq, b);
                s.push_hyp((**a).clone());
                vec![s]
            }
            _ => return Err(RuleError::na(name, "the goal is not an implication")),
        },
        Step::ImpL { hyp } => match hyp_formula(seq, hyp)? {
            Formula::Imp(a, b) => {
                let first = with_goal(seq, &a);
                let mut second = seq.clone();
                second.remove_hyp(hyp);
                second.push_hyp(*b);
                vec![first, second]
            }
            _ => return Err(RuleError::na(name, format!("{hyp} is not an implication"))),
        },
        Step::AllR => match &seq.goal {
            Formula::Forall(x, body) => {
                let mut s = seq.clone();
                let e = s.fresh_eigen(&x.hint.0, x.ty.clone());
                s.goal = body.instantiate(&e);
                vec![s]
            }
            _ => return Err(RuleError::na(name, "the goal is not universal")),
        },
        Step::AllL { hyp, witness } => match hyp_formula(seq, hyp)? {
            Formula::Forall(x, body) => {
                check_witness(env, seq, witness, &x.ty)?;
                let mut s = seq.clone();
                s.push_hyp(body.instantiate(witness));
                vec![s]
            }
            _ => return Err(RuleError::na(name, format!("{hyp} is not universal"))),
        },
        Step::ExistsR { witness } => match &seq.goal {
            Formula::Exists(x, body) => {
                check_witness(env, seq, witness, &x.ty)?;
                vec![with_goal(seq, &body.instantiate(witness))]
            }
            _ => return Err(RuleError::na(name, "the goal is not existential")),
        },
        Step::ExistsL { hyp } => match hyp_formula(seq, hyp)? {
            Formula::Exists(x, body) => {
                let mut s = seq.clone();
                s.remove_hyp(hyp);
                let e = s.fresh_eigen(&x.hint.0, x.ty.clone());
                s.push_hyp(body.instantiate(&e));
                vec![s]
            }
            _ => return Err(RuleError::na(name, format!("{hyp} is not existential"))),
        },
        Step::DefR { clause, phi, theta } => vec![def_r(env, seq, *clause, phi, theta)?],
        Step::DefL { hyp } => return def_l(env, seq, hyp),
        Step::Induction { index } => vec![induction(env, seq, *index)?],
        Step::Apply { source, targets, witnesses } => vec![apply(env, seq, source, targets, witnesses)?],
        Step::Assert { formula } => {
            check_closed_formula(env, seq, formula)?;
            let first = with_goal(seq, formula);
            let mut second = seq.clone();
            second.push_hyp(formula.clone());
            vec![first, second]
        }
        Step::Skip => vec![],
    };
    Ok(Applied::of(premises))
}

fn hyp_formula(seq: &Sequent, label: &str) -> Result<Formula, RuleError> {
    seq.hyp(label).map(|h| h.formula.clone()).ok_or_else(|| RuleError::UnknownHyp(Name::from(label)))
}

fn with_goal(seq: &Sequent, goal: &Formula) -> Sequent {
    Sequent { goal: goal.clone(), ..seq.clone() }
}

fn check_free(seq: &Sequent, free: Vec<Term>) -> Result<(), String> {
    for v in free {
        match v {
            Term::Meta(n, _) => return Err(format!("contains the unresolved variable {n}")),
            Term::Eigen(n, t) => match seq.eigen_type(&n) {
                Some(s) if *s == t => {}
                Some(s) => return Err(format!("{n} has type {s}, not {t}")),
                None => return Err(format!("{n} is not in scope")),
            },
            _ => {}
        }
    }
    Ok(())
}

fn check_witness(env: Env<'_>, seq: &Sequent, w: &Term, expected: &Ty) -> Result<(), RuleError> {
    let bad = |reason: String| RuleError::BadWitness { witness: crate::syntax::term_to_string(w), reason };
    wf_term(env.sig, w, &seq.psi).map_err(|e| bad(e.to_string()))?;
    let mut free = Vec::new();
    w.collect_free(&mut free);
    check_free(seq, free).map_err(bad)?;
    let ty = infer_type(env.sig, &[], w).map_err(|e| bad(e.to_string()))?;
    if &ty != expected {
        return Err(bad(format!("has type {ty}, expected {expected}")));
    }
    Ok(())
}

fn check_closed_formula(env: Env<'_>, seq: &Sequent, f: &Formula) -> Result<(), RuleError> {
    let text = || crate::syntax::formula_to_string(f);
    wf_formula(env.sig, f, &seq.psi).map_err(|e| RuleError::Invalid(format!("{}: {e}", text())))?;
    check_formula(env.sig, &[], f).map_err(|e| RuleError::Invalid(format!("{}: {e}", text())))?;
    let mut free = Vec::new();
    f.collect_free(&mut free);
    check_free(seq, free).map_err(|e| RuleError::Invalid(format!("{}: {e}", text())))
}

fn goal_atom<'s>(seq: &'s Sequent, rule: &'static str) -> Result<&'s Atom, RuleError> {
    seq.goal.as_atom().ok_or_else(|| RuleError::na(rule, "the goal is not atomic"))
}

fn def_r(env: Env<'_>, seq: &Sequent, clause: usize, phi: &TySubst, theta: &TermSubst) -> Result<Sequent, RuleError> {
    let atom = goal_atom(seq, "def-r")?;
    let block = env.sig.block_of(&atom.pred).ok_or_else(|| RuleError::na("def-r", format!("{} is not defined", atom.pred)))?;
    let c = block
        .clauses
        .get(clause)
        .filter(|c| c.head.pred == atom.pred)
        .ok_or_else(|| RuleError::na("def-r", format!("{} has no clause #{clause}", atom.pred)))?;
    let rc = reduce_clause(c);
    for p in &rc.params {
        let t = phi.get(p).ok_or_else(|| RuleError::Invalid(format!("no type given for {p}")))?;
        env.sig.wf_type(t, &seq.psi).map_err(|e| RuleError::Invalid(e.to_string()))?;
    }
    if phi.len() != rc.params.len() {
        return Err(RuleError::Invalid("type instance mentions a variable that is not a clause parameter".into()));
    }
    let inst = rc.ty_subst(phi);
    for (x, ty) in &inst.binder {
        let w = theta.get(x).ok_or_else(|| RuleError::Invalid(format!("no term given for clause variable {x}")))?;
        check_witness(env, seq, w, ty)?;
    }
    if theta.len() != inst.binder.len() {
        return Err(RuleError::Invalid("instance mentions a variable that is not bound by the clause".into()));
    }
    let (head, body) = inst.instantiate(theta);
    if !Formula::Atom(head).aeq(&seq.goal) {
        return Err(RuleError::na("def-r", "the clause head is not the goal"));
    }
    if body.tyvars().iter().any(|v| !seq.psi.contains(v)) {
        return Err(RuleError::Invalid("the unfolded body has unbound type variables".into()));
    }
    Ok(with_goal(seq, &body))
}

fn mark_block(body: &Formula, block: &DefBlock, ann: Annotation) -> Formula {
    body.map_atoms(&mut |a| if block.defines(&a.pred) { Atom { ann, ..a.clone() } } else { a.clone() })
}

fn def_l(env: Env<'_>, seq: &Sequent, hyp: &str) -> Result<Applied, RuleError> {
    let formula = hyp_formula(seq, hyp)?;
    let atom = formula.as_atom().ok_or_else(|| RuleError::na("def-l", format!("{hyp} is not atomic")))?;
    let block = env.sig.block_of(&atom.pred).ok_or_else(|| RuleError::na("def-l", format!("{} is not defined", atom.pred)))?;
    let body_ann = atom.ann.generation().map(Annotation::Star).unwrap_or(Annotation::Plain);
    let mut fresh = Fresh::new();
    let mut out = Applied::of(Vec::new());
    for (ci, c) in block.clauses_for(&atom.pred) {
        let rc = reduce_clause(c);
        let m = match match_clause_generic(env.sig, atom, &rc, &seq.psi, &seq.sigma, &mut fresh) {
            Err(msg) => return Err(RuleError::NonPattern(msg)),
            Ok(MatchOutcome::NeverUnifiable(_)) => continue,
            Ok(MatchOutcome::NotGeneric { reason, equation }) => return Err(RuleError::NotAmenable { clause: ci, reason, equation }),
            Ok(MatchOutcome::Generic(m)) => m,
        };
        let mut s = seq.clone();
        s.remove_hyp(hyp);
        s.sigma.retain(|(e, _)| !m.sigma_theta.contains(e));
        let body = mark_block(&rc.ty_subst(&m.phi).body.subst(&m.clause_theta), block, body_ann);
        for h in &mut s.hyps {
            h.formula = h.formula.subst(&m.sigma_theta);
        }
        s.goal = s.goal.subst(&m.sigma_theta);

        // Unconstrained variables left by unification become new eigenvariables.
        let mut candidates = Vec::new();
        for (e, _) in &seq.sigma {
            if let Some(t) = m.sigma_theta.get(e) {
                t.collect_free(&mut candidates);
            }
        }
        for (x, _) in &rc.binder {
            if let Some(t) = m.clause_theta.get(x) {
                t.collect_free(&mut candidates);
            }
        }
        let mut ren = TermSubst::new();
        for v in candidates {
            if let Term::Meta(n, ty) = v {
                if ren.contains(&n) {
                    continue;
                }
                let used = body.mentions_name(&n) || s.goal.mentions_name(&n) || s.hyps.iter().any(|h| h.formula.mentions_name(&n));
                if used {
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
        let theta = TermSubst::from_pairs(m.clause_theta.iter().chain(m.sigma_theta.iter()).map(|(k, v)| (k.clone(), v.subst(&ren))));
        out.premises.push(s);
        out.cases.push(CaseInfo { clause: ci, phi: m.phi, theta });
    }
    Ok(out)
}

/// Marks the atom that is the `n`-th antecedent (counting from 1) of a
/// formula of shape `forall .., F1 -> .. -> C`.
pub fn mark_nth_antecedent(f: &Formula, n: usize, ann: Annotation) -> Result<(Formula, Atom), String> {
    match f {
        Formula::Forall(x, body) => {
            let (b, a) = mark_nth_antecedent(body, n, ann)?;
            Ok((Formula::Forall(x.clone(), Box::new(b)), a))
        }
        Formula::Imp(a, b) if n == 1 => match &**a {
            Formula::Atom(at) => {
                let marked = Atom { ann, ..at.clone() };
                Ok((Formula::Imp(Box::new(Formula::Atom(marked.clone())), b.clone()), marked))
            }
            _ => Err("the chosen antecedent is not atomic".into()),
        },
        Formula::Imp(a, b) => {
            let (b2, at) = mark_nth_antecedent(b, n - 1, ann)?;
            Ok((Formula::Imp(a.clone(), Box::new(b2)), at))
        }
        _ => Err("the goal has fewer antecedents than the requested index".into()),
    }
}

fn induction(env: Env<'_>, seq: &Sequent, index: usize) -> Result<Sequent, RuleError> {
    if index == 0 {
        return Err(RuleError::na("induction", "antecedents are counted from 1"));
    }
    let gen = seq.next_gen;
    let (ih, atom) = mark_nth_antecedent(&seq.goal, index, Annotation::Star(gen)).map_err(|r| RuleError::na("induction", r))?;
    let block = env.sig.block_of(&atom.pred).ok_or_else(|| RuleError::na("induction", format!("{} is not defined", atom.pred)))?;
    if !block.inductive || block.preds.len() != 1 {
        return Err(RuleError::na("induction", format!("{} is not defined by a single inductive definition", atom.pred)));
    }
    let (goal, _) = mark_nth_antecedent(&seq.goal, index, Annotation::At(gen)).map_err(|r| RuleError::na("induction", r))?;
    let mut s = seq.clone();
    s.next_gen += 1;
    s.goal = goal;
    let label = ih_label(&s);
    s.hyps.push(super::Hyp { label, formula: ih });
    Ok(s)
}

fn ih_label(seq: &Sequent) -> Name {
    let taken = |n: &str| seq.hyps.iter().any(|h| &*h.label == n);
    if !taken("IH") {
        return Name::from("IH");
    }
    (1..).map(|i| format!("IH{i}")).find(|n| !taken(n)).map(Name::from).unwrap()
}

fn apply(env: Env<'_>, seq: &Sequent, source: &Source, targets: &[Name], witnesses: &[Term]) -> Result<Sequent, RuleError> {
    let mut f = match source {
        Source::Hyp(h) => hyp_formula(seq, h)?,
        Source::Lemma { name, tys } => {
            let lem = env.lemmas.get(name).ok_or_else(|| RuleError::UnknownLemma(name.clone()))?;
            if lem.params.len() != tys.len() {
                return Err(RuleError::Invalid(format!("{name} takes {} type argument(s), got {}", lem.params.len(), tys.len())));
            }
            for t in tys {
                env.sig.wf_type(t, &seq.psi).map_err(|e| RuleError::Invalid(e.to_string()))?;
            }
            lem.formula.ty_subst(&TySubst::from_pairs(lem.params.iter().cloned().zip(tys.iter().cloned())))
        }
    };
    let mut ws = witnesses.iter();
    for target in targets {
        loop {
            match f {
                Formula::Forall(x, body) => {
                    let w = ws.next().ok_or_else(|| RuleError::Invalid("not enough witnesses".into()))?;
                    check_witness(env, seq, w, &x.ty)?;
                    f = body.instantiate(w);
                }
                Formula::Imp(p, r) => {
                    let t = seq.hyp(target).ok_or_else(|| RuleError::UnknownHyp(target.clone()))?;
                    if !t.formula.aeq(&p) {
                        return Err(RuleError::PremiseMismatch { target: target.clone(), expected: crate::syntax::formula_to_string(&p) });
                    }
                    if let Annotation::Star(g) = p.annotation() {
                        if t.annotation() != Annotation::Star(g) {
                            return Err(RuleError::StarDiscipline { target: target.clone() });
                        }
                    }
                    f = *r;
                    break;
                }
                _ => return Err(RuleError::Invalid("more targets than antecedents".into())),
            }
        }
    }
    for w in ws {
        match f {
            Formula::Forall(x, body) => {
                check_witness(env, seq, w, &x.ty)?;
                f = body.instantiate(w);
            }
            _ => return Err(RuleError::Invalid("more witnesses than quantifiers".into())),
        }
    }
    let mut s = seq.clone();
    s.push_hyp(f);
    Ok(s)
}
