//! Types, terms, formulas, substitutions and the signature.

pub mod formula;
pub mod print;
pub mod sig;
pub mod term;
pub mod ty;
pub mod typing;

pub use formula::{Annotation, Atom, Formula};
pub use print::{formula_to_string, term_to_string, Printer};
pub use sig::{ConstDecl, ConstKind, SigError, Signature};
pub use term::{Binder, Hint, Term, TermSubst};
pub use ty::{Ty, TySchema, TySubst};
pub use typing::{check_formula, check_term, infer_type, TypeError};

pub type Name = std::sync::Arc<str>;

/// Source of fresh meta and type-variable names. Names start with `?`, which
/// the surface syntax cannot produce, so they never collide with user names.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    next: u64,
}

impl Fresh {
    pub fn new() -> Self {
        Fresh::default()
    }

    pub fn starting_at(next: u64) -> Self {
        Fresh { next }
    }

    pub fn name(&mut self, base: &str) -> Name {
        self.next += 1;
        Name::from(format!("?{base}#{}", self.next))
    }

    pub fn meta(&mut self, base: &str, ty: Ty) -> Term {
        Term::Meta(self.name(base), ty)
    }

    pub fn tyvar(&mut self, base: &str) -> Ty {
        Ty::Var(self.name(base))
    }

    pub fn counter(&self) -> u64 {
        self.next
    }
}

/// Sequence number of a name produced by [`Fresh`], used to order metas by
/// creation.
pub fn fresh_rank(name: &str) -> Option<u64> {
    if !name.starts_with('?') {
        return None;
    }
    name.rsplit_once('#').and_then(|(_, n)| n.parse().ok())
}

/// Picks `base` or `base` followed by primes so that it is not in `taken`.
pub fn unique_name(base: &str, taken: &dyn Fn(&str) -> bool) -> Name {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    Name::from(name)
}

/// Capitalizes the first letter of a binder name for use as an eigenvariable.
pub fn eigen_base(hint: &str) -> String {
    let trimmed = hint.trim_start_matches('?');
    let trimmed = trimmed.split('#').next().unwrap_or("");
    let mut cs = trimmed.chars();
    match cs.next() {
        Some(c) if c.is_alphabetic() => c.to_uppercase().collect::<String>() + cs.as_str(),
        _ => "X".to_string(),
    }
}
