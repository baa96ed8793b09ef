//! Type unification, higher-order pattern unification and the test that
//! decides whether a clause can take part in type-generic case analysis.

mod clause;
mod pattern;
mod ty;

pub use clause::{match_clause_generic, rename_clause, unify_formulas, ClauseMatch, MatchOutcome, RenamedClause};
pub use pattern::{pattern_unify, PatternError, UnifState, Unifier, UnifyError, UnifyProblem};
pub use ty::{ty_unify, TyEq, TyState, TyUnifyResult};
