//! The Horn specification logic: `.sig`/`.mod` files, a standalone
//! depth-bounded interpreter, and the translation of definite clauses into
//! clauses of the `prog` predicate.

use thiserror::Error;

use crate::defs::{extend_block, Diagnostic, SchematicClause};
use crate::frontend::elab::wrap_goal;
use crate::frontend::lexer::Tok;
use crate::frontend::parser::Parser;
use crate::frontend::{ElabError, Elaborator, FreeVars, ParseError, STerm, STy};
use crate::syntax::{Atom, ConstKind, Formula, Fresh, Name, SigError, Signature, Term, TermSubst, Ty, TySchema, TySubst};
use crate::unify::{UnifState, Unifier, UnifyError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("syntax error: {0}")]
    Parse(#[from] ParseError),
    #[error("undeclared constant {0}")]
    UndeclaredConstant(String),
    #[error(transparent)]
    Elab(ElabError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error("in `{clause}`: the type variable {var} occurs in the body but not in the head")]
    TyvarEscape { clause: String, var: Name },
    #[error("`{0}` is not an atomic specification formula")]
    NotAtomic(String),
    #[error("queries must have ground types: {0}")]
    NotGround(String),
    #[error("not a pattern: {0}")]
    NonPattern(String),
    #[error("the translated clauses are rejected: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Rejected(Vec<Diagnostic>),
}

impl From<ElabError> for SpecError {
    fn from(e: ElabError) -> Self {
        match e {
            ElabError::UnknownIdent(c) => SpecError::UndeclaredConstant(c),
            other => SpecError::Elab(other),
        }
    }
}

/// `[params] forall binder, goal => head`, with clause variables as
/// eigenvariables named after the binder.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiniteClause {
    pub params: Vec<Name>,
    pub binder: Vec<(Name, Ty)>,
    pub head: Term,
    pub goal: Term,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpecProgram {
    pub name: String,
    pub kinds: Vec<(Name, usize)>,
    pub types: Vec<(Name, TySchema)>,
    pub clauses: Vec<DefiniteClause>,
}

fn header(p: &mut Parser, word: &str) -> Result<String, ParseError> {
    if p.at_word(word) {
        p.bump();
        let name = p.ident()?;
        p.expect(&Tok::Dot)?;
        Ok(name)
    } else {
        Ok(String::new())
    }
}

pub(crate) fn sty_vars(t: &STy, out: &mut Vec<Name>) {
    match t {
        STy::Con(n, args) if args.is_empty() && n.starts_with(|c: char| c.is_uppercase()) => {
            if !out.iter().any(|v| &**v == n) {
                out.push(Name::from(n.as_str()));
            }
        }
        STy::Con(_, args) => args.iter().for_each(|a| sty_vars(a, out)),
        STy::Arrow(a, b) => {
            sty_vars(a, out);
            sty_vars(b, out);
        }
    }
}

/// Reads the declarations of a `.sig` file into `sig` and the program.
fn load_sig(sig: &mut Signature, prog: &mut SpecProgram, text: &str) -> Result<(), SpecError> {
    let mut p = Parser::new(text)?;
    prog.name = header(&mut p, "sig")?;
    while !p.at(&Tok::Eof) {
        if p.at_word("kind") {
            p.bump();
            let names = p.ident_list(&Tok::Comma)?;
            p.expect_word("type")?;
            let mut arity = 0;
            while p.eat(&Tok::Arrow) {
                p.expect_word("type")?;
                arity += 1;
            }
            p.expect(&Tok::Dot)?;
            for n in names {
                sig.declare_kind(&n, arity)?;
                prog.kinds.push((Name::from(n.as_str()), arity));
            }
        } else if p.at_word("type") {
            p.bump();
            let names = p.ident_list(&Tok::Comma)?;
            let sty = p.ty()?;
            p.expect(&Tok::Dot)?;
            let mut params = Vec::new();
            sty_vars(&sty, &mut params);
            let ty = Elaborator::new(sig, params.clone(), FreeVars::Closed).ty(&sty)?;
            for n in names {
                let schema = TySchema::new(params.clone(), ty.clone());
                sig.declare_const(&n, schema.clone(), ConstKind::NonLogical)?;
                prog.types.push((Name::from(n.as_str()), schema));
            }
        } else {
            return Err(p.err("`kind` or `type`").into());
        }
    }
    Ok(())
}

fn is_spec_atom(t: &Term) -> bool {
    match t.head_spine().0 {
        Term::Const(c, _) => !matches!(&**c, "&&" | "tt" | "atm"),
        _ => false,
    }
}

fn elab_clause(sig: &Signature, head: &STerm, goals: &[STerm]) -> Result<DefiniteClause, SpecError> {
    let text = if goals.is_empty() {
        format!("{head}")
    } else {
        format!("{head} :- {}", goals.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))
    };
    let o = Ty::sort("o");
    let mut e = Elaborator::new(sig, Vec::new(), FreeVars::Clause);
    let (h, hty) = e.term(head, &mut Vec::new())?;
    e.expect(&hty, &o, &text)?;
    if !is_spec_atom(&h) {
        return Err(SpecError::NotAtomic(head.to_string()));
    }
    let mut goal: Option<Term> = None;
    for g in goals {
        let (t, ty) = e.term(g, &mut Vec::new())?;
        e.expect(&ty, &o, &text)?;
        goal = Some(match goal {
            None => t,
            Some(prev) => Term::app(Term::constant("&&", vec![]), vec![prev, t]),
        });
    }
    let goal = goal.unwrap_or_else(|| Term::constant("tt", vec![]));
    let probe_h = Formula::eq(o.clone(), h.clone(), h.clone());
    let probe_g = Formula::eq(o.clone(), goal.clone(), goal.clone());
    let phi = e.generalize(&[&probe_h, &probe_g]);
    let head = h.ty_subst(&phi).normalize();
    let goal = goal.ty_subst(&phi).normalize();
    let mut params = Vec::new();
    head.collect_tyvars(&mut params);
    let mut params_dedup: Vec<Name> = Vec::new();
    for p in params {
        if !params_dedup.contains(&p) {
            params_dedup.push(p);
        }
    }
    let binder: Vec<(Name, Ty)> = e.clause_vars.iter().map(|(x, t)| (x.clone(), t.subst(&phi))).collect();
    let mut body_vars = Vec::new();
    goal.collect_tyvars(&mut body_vars);
    for (_, t) in &binder {
        t.collect_vars(&mut body_vars);
    }
    if let Some(v) = body_vars.into_iter().find(|v| !params_dedup.contains(v)) {
        return Err(SpecError::TyvarEscape { clause: text, var: v });
    }
    Ok(DefiniteClause { params: params_dedup, binder, head, goal })
}

fn load_mod(sig: &Signature, prog: &mut SpecProgram, text: &str) -> Result<(), SpecError> {
    let mut p = Parser::new(text)?;
    header(&mut p, "module")?;
    while !p.at(&Tok::Eof) {
        let head = p.term()?;
        let mut goals = Vec::new();
        if p.eat(&Tok::ColonDash) {
            loop {
                goals.push(p.term()?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        p.expect(&Tok::Dot)?;
        prog.clauses.push(elab_clause(sig, &head, &goals)?);
    }
    Ok(())
}

/// Parses a specification, declaring its kinds and constants in `sig`.
/// On error `sig` is unchanged.
pub fn parse_spec(sig: &mut Signature, sig_text: &str, mod_text: &str) -> Result<SpecProgram, SpecError> {
    let mut trial = sig.clone();
    let mut prog = SpecProgram::default();
    load_sig(&mut trial, &mut prog, sig_text)?;
    load_mod(&trial, &mut prog, mod_text)?;
    *sig = trial;
    Ok(prog)
}

/// The `prog` clauses encoding a program: each clause becomes
/// `prog head goal'` with a true body, atoms of the goal wrapped in `atm`.
pub fn translate_to_prog(prog: &SpecProgram) -> Vec<SchematicClause> {
    prog.clauses
        .iter()
        .map(|c| SchematicClause {
            params: c.params.clone(),
            binder: c.binder.clone(),
            head: Atom::new("prog", vec![], vec![c.head.clone(), wrap_goal(&c.goal)]),
            body: Formula::Top,
        })
        .collect()
}

/// Adds the translation of `prog` to the `prog` definition in `sig`.
pub fn install(sig: &mut Signature, prog: &SpecProgram) -> Result<(), SpecError> {
    extend_block(sig, "prog", translate_to_prog(prog)).map_err(SpecError::Rejected)
}

/// A query whose capitalized identifiers are logic variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub goal: Term,
    pub vars: Vec<(Name, Term)>,
}

pub fn parse_query(sig: &Signature, text: &str) -> Result<Query, SpecError> {
    let mut p = Parser::new(text)?;
    let mut goals = vec![p.term()?];
    while p.eat(&Tok::Comma) {
        goals.push(p.term()?);
    }
    p.eat(&Tok::Dot);
    p.expect(&Tok::Eof)?;
    let o = Ty::sort("o");
    let mut e = Elaborator::new(sig, Vec::new(), FreeVars::Clause);
    let mut goal: Option<Term> = None;
    for g in &goals {
        let (t, ty) = e.term(g, &mut Vec::new())?;
        e.expect(&ty, &o, &g.to_string())?;
        goal = Some(match goal {
            None => t,
            Some(prev) => Term::app(Term::constant("&&", vec![]), vec![prev, t]),
        });
    }
    let goal = goal.expect("at least one goal");
    let probe = Formula::eq(o, goal.clone(), goal.clone());
    let phi = e.generalize(&[&probe]);
    let goal = goal.ty_subst(&phi);
    let mut tvs = Vec::new();
    goal.collect_tyvars(&mut tvs);
    if !tvs.is_empty() || e.clause_vars.iter().any(|(_, t)| !t.subst(&phi).is_ground()) {
        return Err(SpecError::NotGround(text.trim().to_string()));
    }
    let vars: Vec<(Name, Term)> = e.clause_vars.iter().map(|(x, t)| (x.clone(), Term::Meta(x.clone(), t.subst(&phi)))).collect();
    let ren = TermSubst::from_pairs(vars.iter().cloned());
    Ok(Query { goal: goal.subst(&ren), vars })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveResult {
    /// Bindings for the query variables, in order of first occurrence.
    Success(Vec<(Name, Term)>),
    Exhausted,
}

/// Depth-bounded backchaining. A conjunction or a backchaining step uses one
/// unit of depth, exactly as the encoding's height does.
pub fn solve(sig: &Signature, prog: &SpecProgram, query: &Query, depth: usize) -> Result<SolveResult, SpecError> {
    let mut s = Solver { sig, prog, fresh: Fresh::new(), nonpattern: None };
    match s.run(vec![(query.goal.clone(), depth)], UnifState::new()) {
        Some(st) => {
            let theta = st.theta();
            let phi = st.tys.subst();
            Ok(SolveResult::Success(query.vars.iter().map(|(x, m)| (x.clone(), m.subst(&theta).ty_subst(&phi).normalize())).collect()))
        }
        None => match s.nonpattern {
            Some(m) => Err(SpecError::NonPattern(m)),
            None => Ok(SolveResult::Exhausted),
        },
    }
}

struct Solver<'a> {
    sig: &'a Signature,
    prog: &'a SpecProgram,
    fresh: Fresh,
    nonpattern: Option<String>,
}

impl Solver<'_> {
    fn run(&mut self, mut goals: Vec<(Term, usize)>, st: UnifState) -> Option<UnifState> {
        let Some((g, d)) = goals.pop() else {
            let mut st = st;
            let r = Unifier::new(self.sig, &mut self.fresh, &mut st).finish();
            return match r {
                Ok(()) => Some(st),
                Err(UnifyError::NonPattern(m)) => {
                    self.nonpattern.get_or_insert(m);
                    None
                }
                Err(_) => None,
            };
        };
        let g = st.resolve(&g);
        let (h, args) = g.head_spine();
        match h {
            Term::Const(c, _) if &**c == "tt" => return self.run(goals, st),
            Term::Const(c, _) if &**c == "&&" && args.len() == 2 => {
                if d == 0 {
                    return None;
                }
                goals.push((args[1].clone(), d - 1));
                goals.push((args[0].clone(), d - 1));
                return self.run(goals, st);
            }
            _ => {}
        }
        if d == 0 {
            return None;
        }
        for c in &self.prog.clauses {
            let tyren = TySubst::from_pairs(c.params.iter().map(|p| (p.clone(), self.fresh.tyvar(p))));
            let vars = TermSubst::from_pairs(c.binder.iter().map(|(x, t)| (x.clone(), self.fresh.meta(x, t.subst(&tyren)))));
            let head = c.head.ty_subst(&tyren).subst(&vars);
            let body = c.goal.ty_subst(&tyren).subst(&vars);
            let mut st2 = st.clone();
            for (_, v) in tyren.iter() {
                if let Ty::Var(n) = v {
                    st2.tys.add_solvable(n.clone());
                }
            }
            let r = Unifier::new(self.sig, &mut self.fresh, &mut st2).unify(&mut Vec::new(), &head, &g);
            match r {
                Ok(()) if st2.tys.ambiguities.is_empty() => {}
                Err(UnifyError::NonPattern(m)) => {
                    self.nonpattern.get_or_insert(m);
                    continue;
                }
                _ => continue,
            }
            let mut next = goals.clone();
            next.push((body, d - 1));
            if let Some(r) = self.run(next, st2) {
                return Some(r);
            }
        }
        None
    }
}
