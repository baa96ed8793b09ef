//! A prover session: the signature and theorems built so far plus the proof
//! in progress. The REPL, the batch checker and the protocol all drive this.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use thiserror::Error;

use super::ast::{Command, Item, Spanned, Tactic};
use super::elab::{elab_define, elab_statement, ElabError, Elaborator, FreeVars};
use super::lexer::Pos;
use super::parser::{parse_commands, parse_dev, parse_ty};
use super::ParseError;
use crate::checker::{soundness_harness, HarnessReport, ProvedLemma};
use crate::defs::{add_block, DiagCode, Diagnostic};
use crate::engine::{Env, LemmaStatement, ProofTree, Sequent};
use crate::speclog::{install, parse_spec, sty_vars, SpecError, SpecProgram};
use crate::syntax::{ConstKind, Formula, Name, Printer, SigError, Signature, Ty, TySchema};
use crate::tactics::{ProofState, TacticError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SessionError {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
    #[error("{pos}: {error}")]
    Elab { pos: Pos, error: ElabError },
    #[error("{pos}: {error}")]
    Sig { pos: Pos, error: SigError },
    #[error("{pos}: ill-formed definition: {}", .diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Wellformed { pos: Pos, diags: Vec<Diagnostic> },
    #[error("{pos}: specification {name}: {error}")]
    Spec { pos: Pos, name: String, error: SpecError },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{pos}: theorem {0} is already defined", .name)]
    DuplicateTheorem { pos: Pos, name: String },
    #[error("{pos}: in {theorem}: {error}")]
    Tactic { pos: Pos, theorem: String, error: TacticError },
    #[error("the proof of {0} is not complete")]
    Incomplete(String),
    #[error("no theorem is being proved")]
    NoTheorem,
    #[error("invalid type pool: {0}")]
    Pool(String),
}

impl SessionError {
    /// 1 for proof failures, 2 for syntax and well-formedness errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            SessionError::Tactic { .. } | SessionError::Incomplete(_) | SessionError::NoTheorem => 1,
            _ => 2,
        }
    }

    /// A short machine-readable classification.
    pub fn code(&self) -> String {
        match self {
            SessionError::Parse(_) => "parse".into(),
            SessionError::Elab { .. } => "elab".into(),
            SessionError::Sig { .. } => "signature".into(),
            SessionError::Wellformed { diags, .. } => diags.first().map(|d| d.code.as_str().to_string()).unwrap_or_default(),
            SessionError::Spec { .. } => "spec".into(),
            SessionError::Io { .. } => "io".into(),
            SessionError::DuplicateTheorem { .. } => "duplicate-theorem".into(),
            SessionError::Tactic { error, .. } => match error {
                TacticError::NoProofFound(_) => "no-proof-found".into(),
                TacticError::Rule(crate::engine::RuleError::NotAmenable { .. }) => "not-amenable".into(),
                _ => "tactic".into(),
            },
            SessionError::Incomplete(_) => "incomplete".into(),
            SessionError::NoTheorem => "no-theorem".into(),
            SessionError::Pool(_) => "pool".into(),
        }
    }
}

/// A finished theorem.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremEntry {
    pub name: Name,
    pub params: Vec<Name>,
    pub formula: Formula,
    pub proof: ProofTree,
}

impl TheoremEntry {
    pub fn admitted(&self) -> bool {
        self.proof.is_admitted()
    }
}

#[derive(Clone, Debug)]
pub struct Pending {
    pub name: Name,
    pub params: Vec<Name>,
    pub formula: Formula,
    pub state: ProofState,
}

#[derive(Clone, Debug)]
pub struct Session {
    pub sig: Signature,
    pub lemmas: IndexMap<Name, LemmaStatement>,
    pub theorems: IndexMap<Name, TheoremEntry>,
    pub specs: Vec<SpecProgram>,
    pub pending: Option<Pending>,
    pub printer: Printer,
    base_dir: PathBuf,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(".")
    }
}

impl Session {
    /// A session whose `Specification` imports resolve against `base_dir`.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Session {
            sig: Signature::with_builtins(),
            lemmas: IndexMap::new(),
            theorems: IndexMap::new(),
            specs: Vec::new(),
            pending: None,
            printer: Printer::default(),
            base_dir: base_dir.into(),
        }
    }

    pub fn env(&self) -> Env<'_> {
        Env { sig: &self.sig, lemmas: &self.lemmas }
    }

    /// Reads and checks a development file. Imports resolve next to it.
    pub fn load_file(&mut self, path: &Path) -> Result<(), SessionError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| SessionError::Io { path: path.display().to_string(), message: e.to_string() })?;
        if let Some(dir) = path.parent() {
            self.base_dir = dir.to_path_buf();
        }
        self.load_text(&text)
    }

    /// Checks a whole development: every theorem's script must finish its
    /// proof.
    pub fn load_text(&mut self, text: &str) -> Result<(), SessionError> {
        let file = parse_dev(text)?;
        for item in &file.items {
            self.close_pending()?;
            self.item(item)?;
            if let Some(p) = &self.pending {
                if !p.state.is_complete() {
                    return Err(SessionError::Incomplete(p.name.to_string()));
                }
            }
        }
        self.close_pending()
    }

    /// Runs interactive input and returns what to show afterwards.
    pub fn exec(&mut self, text: &str) -> Result<String, SessionError> {
        let mut out = String::new();
        for cmd in parse_commands(text)? {
            out = self.command(&cmd)?;
        }
        Ok(out)
    }

    fn command(&mut self, cmd: &Spanned<Command>) -> Result<String, SessionError> {
        match &cmd.node {
            Command::Qed => {
                let name = self.pending.as_ref().map(|p| p.name.clone()).ok_or(SessionError::NoTheorem)?;
                self.close_pending()?;
                Ok(format!("{name} proved.\n"))
            }
            Command::Tactic(t) => {
                self.tactic_at(cmd.pos, t)?;
                Ok(self.render())
            }
            Command::Item(item) => {
                self.close_pending()?;
                self.item(&Spanned { pos: cmd.pos, node: item.clone() })?;
                Ok(if self.pending.is_some() { self.render() } else { String::new() })
            }
        }
    }

    /// Commits a finished proof in progress; an unfinished one is an error.
    fn close_pending(&mut self) -> Result<(), SessionError> {
        let Some(p) = self.pending.take() else { return Ok(()) };
        let Some(proof) = p.state.proof_tree() else {
            let name = p.name.to_string();
            self.pending = Some(p);
            return Err(SessionError::Incomplete(name));
        };
        self.lemmas.insert(p.name.clone(), LemmaStatement { params: p.params.clone(), formula: p.formula.clone() });
        self.theorems.insert(p.name.clone(), TheoremEntry { name: p.name, params: p.params, formula: p.formula, proof });
        Ok(())
    }

    /// Drops the proof in progress.
    pub fn abort(&mut self) -> Option<Name> {
        self.pending.take().map(|p| p.name)
    }

    fn item(&mut self, item: &Spanned<Item>) -> Result<(), SessionError> {
        let pos = item.pos;
        let elab = |error| SessionError::Elab { pos, error };
        let sigerr = |error| SessionError::Sig { pos, error };
        match &item.node {
            Item::Kind { names, arity } => {
                let mut trial = self.sig.clone();
                for n in names {
                    trial.declare_kind(n, *arity).map_err(sigerr)?;
                }
                self.sig = trial;
            }
            Item::Type { names, ty } => {
                let mut params = Vec::new();
                sty_vars(ty, &mut params);
                let t = Elaborator::new(&self.sig, params.clone(), FreeVars::Closed).ty(ty).map_err(elab)?;
                let mut trial = self.sig.clone();
                for n in names {
                    trial.declare_const(n, TySchema::new(params.clone(), t.clone()), ConstKind::NonLogical).map_err(sigerr)?;
                }
                self.sig = trial;
            }
            Item::Define { inductive, params, preds, clauses } => {
                let block = elab_define(&self.sig, *inductive, params, preds, clauses).map_err(|error| match error {
                    ElabError::UnknownType(_) | ElabError::IllFormedType(_) => SessionError::Wellformed {
                        pos,
                        diags: vec![Diagnostic { code: DiagCode::IllFormedType, message: error.to_string() }],
                    },
                    error => SessionError::Elab { pos, error },
                })?;
                add_block(&mut self.sig, block).map_err(|diags| SessionError::Wellformed { pos, diags })?;
            }
            Item::Theorem { name, params, formula, script } => {
                if self.theorems.contains_key(name.as_str()) || self.lemmas.contains_key(name.as_str()) {
                    return Err(SessionError::DuplicateTheorem { pos, name: name.clone() });
                }
                let f = elab_statement(&self.sig, params, formula).map_err(elab)?;
                let params: Vec<Name> = params.iter().map(|p| Name::from(p.as_str())).collect();
                let root = Sequent::new(params.clone(), f.clone());
                self.pending = Some(Pending { name: Name::from(name.as_str()), params, formula: f, state: ProofState::new(root) });
                for t in script {
                    self.tactic_at(t.pos, &t.node)?;
                }
            }
            Item::Specification(name) => self.specification(pos, name)?,
        }
        Ok(())
    }

    fn specification(&mut self, pos: Pos, name: &str) -> Result<(), SessionError> {
        let read = |ext: &str| {
            let path = self.base_dir.join(format!("{name}.{ext}"));
            std::fs::read_to_string(&path).map_err(|e| SessionError::Io { path: path.display().to_string(), message: e.to_string() })
        };
        let (sig_text, mod_text) = (read("sig")?, read("mod")?);
        let err = |error| SessionError::Spec { pos, name: name.to_string(), error };
        let mut trial = self.sig.clone();
        let prog = parse_spec(&mut trial, &sig_text, &mod_text).map_err(err)?;
        install(&mut trial, &prog).map_err(err)?;
        self.sig = trial;
        self.specs.push(prog);
        Ok(())
    }

    /// Runs one tactic on the proof in progress.
    pub fn tactic(&mut self, t: &Tactic) -> Result<(), SessionError> {
        self.tactic_at(Pos::default(), t)
    }

    fn tactic_at(&mut self, pos: Pos, t: &Tactic) -> Result<(), SessionError> {
        let env = Env { sig: &self.sig, lemmas: &self.lemmas };
        let p = self.pending.as_mut().ok_or(SessionError::NoTheorem)?;
        p.state.run(env, t).map_err(|error| SessionError::Tactic { pos, theorem: p.name.to_string(), error })
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        self.tactic(&Tactic::Undo)
    }

    /// The proof state as the REPL prints it.
    pub fn render(&self) -> String {
        match &self.pending {
            Some(p) => p.state.render(&self.printer),
            None => String::new(),
        }
    }

    /// Theorems with their proofs, for the replay harness.
    pub fn proved_lemmas(&self) -> IndexMap<Name, ProvedLemma> {
        self.lemmas
            .iter()
            .map(|(n, s)| (n.clone(), ProvedLemma { statement: s.clone(), proof: self.theorems.get(n).map(|t| t.proof.clone()) }))
            .collect()
    }

    /// Replays every theorem at every assignment of pool types.
    pub fn replay_all(&self, pool: &[Ty]) -> Vec<HarnessReport> {
        let proofs = self.proved_lemmas();
        self.theorems.values().map(|t| soundness_harness(&self.sig, &self.lemmas, &proofs, &t.name, &t.proof, pool)).collect()
    }

    /// Parses a comma-separated list of ground types.
    pub fn parse_pool(&self, text: &str) -> Result<Vec<Ty>, SessionError> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let sty = parse_ty(part).map_err(|e| SessionError::Pool(format!("{part}: {e}")))?;
            let ty = Elaborator::new(&self.sig, Vec::new(), FreeVars::Closed)
                .ty(&sty)
                .map_err(|e| SessionError::Pool(format!("{part}: {e}")))?;
            out.push(ty);
        }
        if out.is_empty() {
            return Err(SessionError::Pool("no types given".into()));
        }
        Ok(out)
    }

    /// A stable textual form of everything proved, used to compare runs.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for t in self.theorems.values() {
            let _ = writeln!(out, "Theorem {} [{}]", t.name, crate::syntax::ty::join(&t.params, ", "));
            out.push_str(&t.proof.canonical());
        }
        if let Some(p) = &self.pending {
            let _ = writeln!(out, "Pending {}", p.name);
            out.push_str(&p.state.render(&Printer { show_instances: true }));
        }
        out
    }
}

impl Session {
    /// Unifies two terms whose capitalized identifiers are solvable
    /// variables, returning the bindings in order of first occurrence.
    pub fn unify_text(&self, left: &str, right: &str) -> Result<Vec<(Name, String)>, String> {
        use crate::syntax::{Fresh, Term, TermSubst};
        use crate::unify::{pattern_unify, UnifyProblem};
        let (l, r) = (super::parse_term(left).map_err(|e| e.to_string())?, super::parse_term(right).map_err(|e| e.to_string())?);
        let mut e = Elaborator::new(&self.sig, Vec::new(), FreeVars::Clause);
        let (lt, lty) = e.term(&l, &mut Vec::new()).map_err(|e| e.to_string())?;
        let (rt, rty) = e.term(&r, &mut Vec::new()).map_err(|e| e.to_string())?;
        e.expect(&rty, &lty, right).map_err(|e| e.to_string())?;
        let probe_l = Formula::eq(lty.clone(), lt.clone(), lt.clone());
        let probe_r = Formula::eq(lty, rt.clone(), rt.clone());
        let phi = e.generalize(&[&probe_l, &probe_r]);
        let vars: Vec<(Name, Term)> = e.clause_vars.iter().map(|(x, t)| (x.clone(), Term::Meta(x.clone(), t.subst(&phi)))).collect();
        let ren = TermSubst::from_pairs(vars.iter().cloned());
        let problem = UnifyProblem {
            equations: vec![(lt.ty_subst(&phi).subst(&ren), rt.ty_subst(&phi).subst(&ren))],
            raised: Vec::new(),
            ty_solvable: phi.iter().flat_map(|(_, t)| t.vars()).collect(),
        };
        let (theta, _) = pattern_unify(&self.sig, &problem, &mut Fresh::new()).map_err(|e| e.to_string())?;
        Ok(vars.iter().map(|(x, m)| (x.clone(), self.printer.term(&m.subst(&theta).normalize()))).collect())
    }
}
