use indexmap::IndexMap;
use thiserror::Error;

use super::ty::{Ty, TySchema};
use super::Name;
use crate::defs::DefBlock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstKind {
    NonLogical,
    /// Target type is `prop`; defined by exactly one block.
    Predicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub schema: TySchema,
    pub kind: ConstKind,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SigError {
    #[error("unknown type constructor `{0}`")]
    UnknownType(Name),
    #[error("type constructor `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: Name, expected: usize, got: usize },
    #[error("type variable `{0}` is not in scope")]
    UnboundTyVar(Name),
    #[error("`{0}` is already declared")]
    Duplicate(Name),
    #[error("`{0}` is reserved")]
    Reserved(Name),
    #[error("`prop` may not occur in the argument types of `{0}`")]
    PropInArgument(Name),
    #[error("unknown constant `{0}`")]
    UnknownConstant(Name),
}

/// Declared type constructors, constants and definitional blocks.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    kinds: IndexMap<Name, usize>,
    consts: IndexMap<Name, ConstDecl>,
    blocks: Vec<DefBlock>,
    pred_block: IndexMap<Name, usize>,
}

pub const RESERVED_SORTS: [&str; 2] = ["prop", "o"];

impl Signature {
    /// A signature holding only the reserved sorts `prop` and `o`.
    pub fn empty() -> Self {
        let mut s = Signature::default();
        for r in RESERVED_SORTS {
            s.kinds.insert(Name::from(r), 0);
        }
        s
    }

    /// The reserved sorts plus the built-in definitions of equality, natural
    /// numbers and the encoding of specification-level provability.
    pub fn with_builtins() -> Self {
        let mut s = Signature::empty();
        crate::defs::builtins::install(&mut s).expect("built-in definitions are well-formed");
        s
    }

    pub fn declare_kind(&mut self, name: &str, arity: usize) -> Result<(), SigError> {
        if RESERVED_SORTS.contains(&name) {
            return Err(SigError::Reserved(Name::from(name)));
        }
        if self.kinds.contains_key(name) {
            return Err(SigError::Duplicate(Name::from(name)));
        }
        self.kinds.insert(Name::from(name), arity);
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str, schema: TySchema, kind: ConstKind) -> Result<(), SigError> {
        if self.consts.contains_key(name) {
            return Err(SigError::Duplicate(Name::from(name)));
        }
        self.wf_type(&schema.body, &schema.params)?;
        let (args, target) = schema.body.split_arrows();
        if args.iter().any(|a| a.mentions_prop()) {
            return Err(SigError::PropInArgument(Name::from(name)));
        }
        let kind = if target.is_prop() && !args.is_empty() { ConstKind::Predicate } else { kind };
        self.consts.insert(Name::from(name), ConstDecl { schema, kind });
        Ok(())
    }

    pub fn kind_arity(&self, name: &str) -> Option<usize> {
        self.kinds.get(name).copied()
    }

    pub fn kinds(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.kinds.iter().map(|(k, v)| (k, *v))
    }

    pub fn constant(&self, name: &str) -> Option<&ConstDecl> {
        self.consts.get(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Name, &ConstDecl)> {
        self.consts.iter()
    }

    pub fn is_predicate(&self, name: &str) -> bool {
        matches!(self.consts.get(name), Some(d) if d.kind == ConstKind::Predicate)
    }

    /// Instantiated type of a constant.
    pub fn const_type(&self, name: &str, tys: &[Ty]) -> Option<Ty> {
        self.consts.get(name)?.schema.instantiate(tys)
    }

    /// Checks constructor arities and that every variable is in `psi`.
    pub fn wf_type(&self, ty: &Ty, psi: &[Name]) -> Result<(), SigError> {
        match ty {
            Ty::Sort(n) => match self.kinds.get(n) {
                Some(0) => Ok(()),
                Some(k) => Err(SigError::Arity { name: n.clone(), expected: *k, got: 0 }),
                None => Err(SigError::UnknownType(n.clone())),
            },
            Ty::Var(v) => {
                if psi.contains(v) {
                    Ok(())
                } else {
                    Err(SigError::UnboundTyVar(v.clone()))
                }
            }
            Ty::App(c, args) => {
                match self.kinds.get(c) {
                    Some(k) if *k == args.len() => {}
                    Some(k) => return Err(SigError::Arity { name: c.clone(), expected: *k, got: args.len() }),
                    None => return Err(SigError::UnknownType(c.clone())),
                }
                args.iter().try_for_each(|a| self.wf_type(a, psi))
            }
            Ty::Arrow(a, b) => {
                self.wf_type(a, psi)?;
                self.wf_type(b, psi)
            }
        }
    }

    pub fn blocks(&self) -> &[DefBlock] {
        &self.blocks
    }

    pub fn block_index(&self, pred: &str) -> Option<usize> {
        self.pred_block.get(pred).copied()
    }

    pub fn block_of(&self, pred: &str) -> Option<&DefBlock> {
        self.block_index(pred).map(|i| &self.blocks[i])
    }

    /// Registers a block whose predicates are already declared. Callers are
    /// expected to have run the well-formedness checks.
    pub(crate) fn push_block(&mut self, block: DefBlock) -> usize {
        let idx = self.blocks.len();
        for (p, _) in &block.preds {
            self.pred_block.insert(p.clone(), idx);
        }
        self.blocks.push(block);
        idx
    }

    pub(crate) fn block_mut(&mut self, idx: usize) -> &mut DefBlock {
        &mut self.blocks[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_prop_arguments() {
        let mut s = Signature::empty();
        let bad = TySchema::mono(Ty::arrow(Ty::prop(), Ty::sort("o")));
        assert_eq!(s.declare_const("bad", bad, ConstKind::NonLogical), Err(SigError::PropInArgument(Name::from("bad"))));
    }

    #[test]
    fn reserved_sorts() {
        let mut s = Signature::empty();
        assert!(matches!(s.declare_kind("prop", 0), Err(SigError::Reserved(_))));
        assert!(s.wf_type(&Ty::sort("o"), &[]).is_ok());
    }

    #[test]
    fn predicates_are_classified_by_target() {
        let mut s = Signature::empty();
        s.declare_kind("i", 0).unwrap();
        s.declare_const("p", TySchema::mono(Ty::arrow(Ty::sort("i"), Ty::prop())), ConstKind::NonLogical).unwrap();
        assert!(s.is_predicate("p"));
    }
}
