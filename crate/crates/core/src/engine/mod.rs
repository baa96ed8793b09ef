//! Sequents, the inference rules of the logic and proof trees.
//!
//! Every rule is a pure function of the step payload and the conclusion
//! sequent, so replaying a recorded step reproduces its premises exactly.

mod proof;
mod rules;
mod sequent;

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::syntax::{term_to_string, Formula, Name, Signature, Term, TermSubst, Ty, TySubst};
use crate::unify::TyEq;

pub use proof::ProofTree;
pub use rules::{apply_step, mark_nth_antecedent, Applied};
pub use sequent::{Hyp, Sequent};

/// A proved (or admitted) statement available to `apply`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaStatement {
    pub params: Vec<Name>,
    pub formula: Formula,
}

/// What rules may consult besides the sequent itself.
#[derive(Clone, Copy)]
pub struct Env<'a> {
    pub sig: &'a Signature,
    pub lemmas: &'a IndexMap<Name, LemmaStatement>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Hyp(Name),
    Lemma { name: Name, tys: Vec<Ty> },
}

/// How one clause of a definition covers one case of a `case` step.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseInfo {
    pub clause: usize,
    pub phi: TySubst,
    /// Clause variables and instantiated eigenvariables.
    pub theta: TermSubst,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    TopR,
    BotL {
        hyp: Name,
    },
    Axiom {
        hyp: Name,
    },
    AndR,
    AndL {
        hyp: Name,
    },
    OrR1,
    OrR2,
    OrL {
        hyp: Name,
    },
    ImpR,
    ImpL {
        hyp: Name,
    },
    AllR,
    AllL {
        hyp: Name,
        witness: Term,
    },
    ExistsR {
        witness: Term,
    },
    ExistsL {
        hyp: Name,
    },
    /// Unfold the goal atom with a clause of its block, given the clause's
    /// type parameters and variables.
    DefR {
        clause: usize,
        phi: TySubst,
        theta: TermSubst,
    },
    /// Case analysis on an atomic hypothesis.
    DefL {
        hyp: Name,
    },
    Induction {
        index: usize,
    },
    /// Instantiate the source with `witnesses` (one per universal met in
    /// order) and discharge its antecedents with the `targets`.
    Apply {
        source: Source,
        targets: Vec<Name>,
        witnesses: Vec<Term>,
    },
    Assert {
        formula: Formula,
    },
    /// Closes the goal without proof. Proofs containing it never check.
    Skip,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::TopR => "top-r",
            Step::BotL { .. } => "bot-l",
            Step::Axiom { .. } => "axiom",
            Step::AndR => "and-r",
            Step::AndL { .. } => "and-l",
            Step::OrR1 => "or-r1",
            Step::OrR2 => "or-r2",
            Step::OrL { .. } => "or-l",
            Step::ImpR => "imp-r",
            Step::ImpL { .. } => "imp-l",
            Step::AllR => "all-r",
            Step::AllL { .. } => "all-l",
            Step::ExistsR { .. } => "exists-r",
            Step::ExistsL { .. } => "exists-l",
            Step::DefR { .. } => "def-r",
            Step::DefL { .. } => "def-l",
            Step::Induction { .. } => "induction",
            Step::Apply { .. } => "apply",
            Step::Assert { .. } => "assert",
            Step::Skip => "skip",
        }
    }
}

fn subst_to_string(theta: &TermSubst) -> String {
    let parts: Vec<String> = theta.iter().map(|(k, v)| format!("{k} := {}", term_to_string(v))).collect();
    parts.join(", ")
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self {
            Step::BotL { hyp } | Step::Axiom { hyp } | Step::AndL { hyp } | Step::OrL { hyp } | Step::ImpL { hyp } => {
                write!(f, " {hyp}")
            }
            Step::ExistsL { hyp } | Step::DefL { hyp } => write!(f, " {hyp}"),
            Step::AllL { hyp, witness } => write!(f, " {hyp} {}", term_to_string(witness)),
            Step::ExistsR { witness } => write!(f, " {}", term_to_string(witness)),
            Step::DefR { clause, phi, theta } => {
                let tys: Vec<String> = phi.iter().map(|(k, v)| format!("{k} := {v}")).collect();
                write!(f, " #{clause} [{}] {{{}}}", tys.join(", "), subst_to_string(theta))
            }
            Step::Induction { index } => write!(f, " {index}"),
            Step::Apply { source, targets, witnesses } => {
                match source {
                    Source::Hyp(h) => write!(f, " {h}")?,
                    Source::Lemma { name, tys } => {
                        write!(f, " {name}")?;
                        if !tys.is_empty() {
                            write!(f, "[{}]", crate::syntax::ty::join(tys, ", "))?;
                        }
                    }
                }
                if !targets.is_empty() {
                    write!(f, " to {}", crate::syntax::ty::join(targets, " "))?;
                }
                if !witnesses.is_empty() {
                    let ws: Vec<String> = witnesses.iter().map(term_to_string).collect();
                    write!(f, " with {}", ws.join(", "))?;
                }
                Ok(())
            }
            Step::Assert { formula } => write!(f, " {}", crate::syntax::formula_to_string(formula)),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("{rule} does not apply: {reason}")]
    NotApplicable { rule: &'static str, reason: String },
    #[error("unknown hypothesis {0}")]
    UnknownHyp(Name),
    #[error("unknown lemma {0}")]
    UnknownLemma(Name),
    #[error("ill-typed witness {witness}: {reason}")]
    BadWitness { witness: String, reason: String },
    #[error("case analysis is not type-generic for clause #{clause}: {reason}")]
    NotAmenable { clause: usize, reason: String, equation: Option<TyEq> },
    #[error("case analysis needs a non-pattern unification: {0}")]
    NonPattern(String),
    #[error("hypothesis {target} does not match the antecedent {expected}")]
    PremiseMismatch { target: Name, expected: String },
    #[error("hypothesis {target} lacks the annotation required by the induction hypothesis")]
    StarDiscipline { target: Name },
    #[error("{0}")]
    Invalid(String),
}

impl RuleError {
    pub(crate) fn na(rule: &'static str, reason: impl Into<String>) -> Self {
        RuleError::NotApplicable { rule, reason: reason.into() }
    }
}
