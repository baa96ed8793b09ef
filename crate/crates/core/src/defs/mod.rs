//! Definitional blocks: representation, well-formedness, clause reduction
//! and ground instantiation.

pub mod builtins;

use std::fmt;

use thiserror::Error;

use crate::syntax::{check_formula, Atom, Formula, Name, Signature, Term, TermSubst, Ty, TySchema, TySubst};

/// `[params] forall binder, head := body`. Clause variables appear in the
/// head and body as eigenvariables named after the binder.
#[derive(Clone, Debug, PartialEq)]
pub struct SchematicClause {
    pub params: Vec<Name>,
    pub binder: Vec<(Name, Ty)>,
    pub head: Atom,
    pub body: Formula,
}

impl SchematicClause {
    pub fn head_tyvars(&self) -> Vec<Name> {
        Formula::Atom(self.head.clone()).tyvars()
    }

    pub fn ty_subst(&self, s: &TySubst) -> SchematicClause {
        let head = match Formula::Atom(self.head.clone()).ty_subst(s) {
            Formula::Atom(a) => a,
            _ => unreachable!(),
        };
        SchematicClause {
            params: self.params.iter().filter(|p| s.get(p).is_none()).cloned().collect(),
            binder: self.binder.iter().map(|(x, t)| (x.clone(), t.subst(s))).collect(),
            head,
            body: self.body.ty_subst(s),
        }
    }

    /// Head and body with the clause variables replaced.
    pub fn instantiate(&self, theta: &TermSubst) -> (Atom, Formula) {
        let head = match Formula::Atom(self.head.clone()).subst(theta) {
            Formula::Atom(a) => a,
            _ => unreachable!(),
        };
        (head, self.body.subst(theta))
    }
}

impl fmt::Display for SchematicClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            write!(f, "[{}] ", crate::syntax::ty::join(&self.params, ", "))?;
        }
        write!(f, "{}", crate::syntax::formula_to_string(&Formula::Atom(self.head.clone())))?;
        if self.body != Formula::Top {
            write!(f, " := {}", crate::syntax::formula_to_string(&self.body))?;
        }
        Ok(())
    }
}

/// Mutually defined predicates sharing the block parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DefBlock {
    pub params: Vec<Name>,
    /// Each predicate's type, with the block parameters free.
    pub preds: Vec<(Name, Ty)>,
    pub clauses: Vec<SchematicClause>,
    pub inductive: bool,
}

impl DefBlock {
    pub fn defines(&self, pred: &str) -> bool {
        self.preds.iter().any(|(p, _)| &**p == pred)
    }

    pub fn clauses_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = (usize, &'a SchematicClause)> + 'a {
        self.clauses.iter().enumerate().filter(move |(_, c)| &*c.head.pred == pred)
    }

    pub fn has_clause_params(&self) -> bool {
        self.clauses.iter().any(|c| !c.params.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagCode {
    /// A clause parameter shadows a block parameter.
    ClauseParamsOverlap,
    /// A type is not well-formed over the block and clause parameters.
    IllFormedType,
    /// A predicate of the block is used at an instance other than the block parameters.
    WrongInstance,
    /// The body mentions a type variable that the head does not.
    BodyTyvarNotInHead,
    /// A predicate of the block occurs to the left of an odd number of implications.
    NegativeOccurrence,
    /// The body uses a predicate from a later or unknown block.
    UndefinedPredicate,
    /// An inductive block has a clause with its own type parameters.
    InductiveClauseParams,
    IllTyped,
    /// The head predicate is not one of the block's predicates.
    ForeignHead,
    /// A term variable of the body does not occur in the head, or is not bound.
    UnboundVariable,
    Duplicate,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::ClauseParamsOverlap => "clause-params-overlap",
            DiagCode::IllFormedType => "ill-formed-type",
            DiagCode::WrongInstance => "wrong-instance",
            DiagCode::BodyTyvarNotInHead => "body-tyvar-not-in-head",
            DiagCode::NegativeOccurrence => "negative-occurrence",
            DiagCode::UndefinedPredicate => "undefined-predicate",
            DiagCode::InductiveClauseParams => "inductive-clause-params",
            DiagCode::IllTyped => "ill-typed",
            DiagCode::ForeignHead => "foreign-head",
            DiagCode::UnboundVariable => "unbound-variable",
            DiagCode::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("[{code}] {message}")]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
}

impl Diagnostic {
    fn new(code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into() }
    }
}

/// Checks a block against a signature in which its predicates are already
/// declared. Every problem found is reported.
pub fn check_block(sig: &Signature, block: &DefBlock) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let block_args: Vec<Ty> = block.params.iter().map(|p| Ty::Var(p.clone())).collect();
    for (ci, c) in block.clauses.iter().enumerate() {
        let at = |m: String| format!("clause {}: {m}", ci + 1);
        if let Some(p) = c.params.iter().find(|p| block.params.contains(p)) {
            out.push(Diagnostic::new(DiagCode::ClauseParamsOverlap, at(format!("type parameter {p} is already a block parameter"))));
        }
        if block.inductive && !c.params.is_empty() {
            out.push(Diagnostic::new(
                DiagCode::InductiveClauseParams,
                at(format!("an inductive block cannot have clause type parameters [{}]", crate::syntax::ty::join(&c.params, ", "))),
            ));
        }
        if !block.defines(&c.head.pred) {
            out.push(Diagnostic::new(DiagCode::ForeignHead, at(format!("{} is not defined by this block", c.head.pred))));
            continue;
        }
        let scope: Vec<Name> = block.params.iter().chain(&c.params).cloned().collect();
        let head_f = Formula::Atom(c.head.clone());
        let mut wf = Ok(());
        let mut check_ty = |t: &Ty| {
            if wf.is_ok() {
                wf = sig.wf_type(t, &scope);
            }
        };
        head_f.for_each_type(&mut check_ty);
        c.body.for_each_type(&mut check_ty);
        c.binder.iter().for_each(|(_, t)| check_ty(t));
        if let Err(e) = wf {
            out.push(Diagnostic::new(DiagCode::IllFormedType, at(e.to_string())));
        }
        let mut check_instance = |a: &Atom| {
            if block.defines(&a.pred) && a.tys != block_args {
                let shown: Vec<String> = a.tys.iter().map(|t| t.to_string()).collect();
                out.push(Diagnostic::new(
                    DiagCode::WrongInstance,
                    at(format!("{} is used at [{}] instead of the block parameters", a.pred, shown.join(", "))),
                ));
            }
        };
        check_instance(&c.head);
        c.body.for_each_atom(&mut check_instance);
        let head_vars = c.head_tyvars();
        if let Some(v) = c.body.tyvars().into_iter().find(|v| !head_vars.contains(v)) {
            out.push(Diagnostic::new(
                DiagCode::BodyTyvarNotInHead,
                at(format!("type variable {v} occurs in the body but not in the head")),
            ));
        }
        if let Err(e) = check_formula(sig, &[], &head_f).and_then(|_| check_formula(sig, &[], &c.body)) {
            out.push(Diagnostic::new(DiagCode::IllTyped, at(e.to_string())));
        }
        let mut head_free = Vec::new();
        head_f.collect_free(&mut head_free);
        let mut body_free = Vec::new();
        c.body.collect_free(&mut body_free);
        for v in head_free.iter().chain(&body_free) {
            if let Term::Eigen(n, _) | Term::Meta(n, _) = v {
                if !c.binder.iter().any(|(x, _)| x == n) {
                    out.push(Diagnostic::new(DiagCode::UnboundVariable, at(format!("variable {n} is not bound by the clause"))));
                }
            }
        }
        for v in &body_free {
            if !head_free.contains(v) {
                if let Term::Eigen(n, _) | Term::Meta(n, _) = v {
                    out.push(Diagnostic::new(
                        DiagCode::UnboundVariable,
                        at(format!("variable {n} occurs in the body but not in the head")),
                    ));
                }
            }
        }
        polarity(sig, block, &c.body, true, &mut |d| out.push(Diagnostic::new(d.code, at(d.message))));
    }
    out
}

fn polarity(sig: &Signature, block: &DefBlock, f: &Formula, positive: bool, report: &mut impl FnMut(Diagnostic)) {
    match f {
        Formula::Top | Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            polarity(sig, block, a, positive, report);
            polarity(sig, block, b, positive, report);
        }
        Formula::Imp(a, b) => {
            polarity(sig, block, a, !positive, report);
            polarity(sig, block, b, positive, report);
        }
        Formula::Forall(_, body) | Formula::Exists(_, body) => polarity(sig, block, body, positive, report),
        Formula::Atom(a) => {
            if block.defines(&a.pred) {
                if !positive {
                    report(Diagnostic::new(DiagCode::NegativeOccurrence, format!("{} occurs negatively in its own definition", a.pred)));
                }
            } else if sig.block_of(&a.pred).is_none() {
                report(Diagnostic::new(DiagCode::UndefinedPredicate, format!("{} is not defined by this or an earlier block", a.pred)));
            }
        }
    }
}

/// Declares the block's predicates, checks it and registers it.
pub fn add_block(sig: &mut Signature, block: DefBlock) -> Result<(), Vec<Diagnostic>> {
    let mut trial = sig.clone();
    for (p, ty) in &block.preds {
        if trial.constant(p).is_some() {
            return Err(vec![Diagnostic::new(DiagCode::Duplicate, format!("{p} is already declared"))]);
        }
        let (args, target) = ty.split_arrows();
        if args.is_empty() || !target.is_prop() {
            return Err(vec![Diagnostic::new(DiagCode::IllTyped, format!("{p} must have a predicate type, got {ty}"))]);
        }
        trial
            .declare_const(p, TySchema::new(block.params.clone(), ty.clone()), crate::syntax::ConstKind::Predicate)
            .map_err(|e| vec![Diagnostic::new(DiagCode::IllFormedType, format!("{p}: {e}"))])?;
    }
    let diags = check_block(&trial, &block);
    if !diags.is_empty() {
        return Err(diags);
    }
    trial.push_block(block);
    *sig = trial;
    Ok(())
}

/// Appends clauses to the block defining `pred`, checking the result.
pub fn extend_block(sig: &mut Signature, pred: &str, clauses: Vec<SchematicClause>) -> Result<(), Vec<Diagnostic>> {
    let idx =
        sig.block_index(pred).ok_or_else(|| vec![Diagnostic::new(DiagCode::UndefinedPredicate, format!("{pred} has no definition"))])?;
    let mut block = sig.blocks()[idx].clone();
    block.clauses.extend(clauses);
    let diags = check_block(sig, &block);
    if !diags.is_empty() {
        return Err(diags);
    }
    *sig.block_mut(idx) = block;
    Ok(())
}

/// The clause with its type parameters set to the type variables of its
/// head, in first-occurrence order.
pub fn reduce_clause(c: &SchematicClause) -> SchematicClause {
    SchematicClause { params: c.head_tyvars(), ..c.clone() }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InstantiateError {
    #[error("a clause has type parameters but the type pool is empty")]
    EmptyPool,
    #[error("expected {expected} block type argument(s), got {got}")]
    Arity { expected: usize, got: usize },
}

/// A ground clause together with the schematic clause it came from and the
/// types chosen for that clause's own parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundClause {
    pub source: usize,
    pub clause_tys: Vec<Ty>,
    pub clause: SchematicClause,
}

/// Instantiates the block parameters with `taus` and each clause's own
/// parameters with every tuple drawn from `pool`, in lexicographic order.
pub fn instantiate_block(block: &DefBlock, taus: &[Ty], pool: &[Ty]) -> Result<Vec<GroundClause>, InstantiateError> {
    if taus.len() != block.params.len() {
        return Err(InstantiateError::Arity { expected: block.params.len(), got: taus.len() });
    }
    let outer = TySubst::from_pairs(block.params.iter().cloned().zip(taus.iter().cloned()));
    let mut out = Vec::new();
    for (idx, c) in block.clauses.iter().enumerate() {
        let k = c.params.len();
        if k > 0 && pool.is_empty() {
            return Err(InstantiateError::EmptyPool);
        }
        let mut tuple = vec![0usize; k];
        loop {
            let tys: Vec<Ty> = tuple.iter().map(|&i| pool[i].clone()).collect();
            let mut s = outer.clone();
            for (p, t) in c.params.iter().zip(&tys) {
                s.insert(p.clone(), t.clone());
            }
            out.push(GroundClause { source: idx, clause_tys: tys, clause: c.ty_subst(&s) });
            let mut done = true;
            let mut i = k;
            while i > 0 {
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < pool.len() {
                    done = false;
                    break;
                }
                tuple[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_clause_instances() {
        let c = SchematicClause {
            params: vec![Name::from("B"), Name::from("C")],
            binder: vec![],
            head: Atom::new("p", vec![], vec![]),
            body: Formula::Top,
        };
        let b = DefBlock { params: vec![], preds: vec![], clauses: vec![c], inductive: false };
        let pool = [Ty::sort("i"), Ty::sort("j")];
        let g = instantiate_block(&b, &[], &pool).unwrap();
        let tys: Vec<Vec<Ty>> = g.iter().map(|g| g.clause_tys.clone()).collect();
        assert_eq!(
            tys,
            vec![
                vec![Ty::sort("i"), Ty::sort("i")],
                vec![Ty::sort("i"), Ty::sort("j")],
                vec![Ty::sort("j"), Ty::sort("i")],
                vec![Ty::sort("j"), Ty::sort("j")],
            ]
        );
        assert_eq!(instantiate_block(&b, &[], &[]), Err(InstantiateError::EmptyPool));
    }
}
