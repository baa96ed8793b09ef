//! Surface syntax trees and their canonical printer. Printing then parsing
//! gives back the same tree.

use std::fmt;

use super::lexer::Pos;

/// A node with its source position. Equality ignores the position.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub pos: Pos,
    pub node: T,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum STy {
    /// A sort, an applied type constructor, or (capitalized, no arguments)
    /// a type variable.
    Con(String, Vec<STy>),
    Arrow(Box<STy>, Box<STy>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum STerm {
    Ident { name: String, tys: Option<Vec<STy>> },
    App(Box<STerm>, Vec<STerm>),
    Lam(String, Option<STy>, Box<STerm>),
    Cons(Box<STerm>, Box<STerm>),
    Conj(Box<STerm>, Box<STerm>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SFormula {
    True,
    False,
    And(Box<SFormula>, Box<SFormula>),
    Or(Box<SFormula>, Box<SFormula>),
    Imp(Box<SFormula>, Box<SFormula>),
    Forall(Vec<(String, Option<STy>)>, Box<SFormula>),
    Exists(Vec<(String, Option<STy>)>, Box<SFormula>),
    Eq(STerm, STerm),
    Atom(STerm),
    Brace(STerm),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SClause {
    pub params: Vec<String>,
    pub head: STerm,
    pub body: Option<SFormula>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tactic {
    Intros,
    Case(String),
    Induction(usize),
    Apply { source: String, tys: Option<Vec<STy>>, targets: Vec<String>, withs: Vec<(String, STerm)> },
    Search(Option<usize>),
    Unfold(Option<usize>),
    Split,
    Left,
    Right,
    Exists(STerm),
    Assert(SFormula),
    Undo,
    Skip,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Kind { names: Vec<String>, arity: usize },
    Type { names: Vec<String>, ty: STy },
    Define { inductive: bool, params: Vec<String>, preds: Vec<(String, STy)>, clauses: Vec<SClause> },
    Theorem { name: String, params: Vec<String>, formula: SFormula, script: Vec<Spanned<Tactic>> },
    Specification(String),
}

/// One unit of interactive input.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Item(Item),
    Tactic(Tactic),
    Qed,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DevFile {
    pub items: Vec<Spanned<Item>>,
}

fn comma<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl STy {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, arg: bool, left: bool) -> fmt::Result {
        match self {
            STy::Con(n, args) if args.is_empty() => write!(f, "{n}"),
            STy::Con(n, args) => {
                if arg {
                    write!(f, "(")?;
                }
                write!(f, "{n}")?;
                for a in args {
                    write!(f, " ")?;
                    a.fmt_prec(f, true, false)?;
                }
                if arg {
                    write!(f, ")")?;
                }
                Ok(())
            }
            STy::Arrow(a, b) => {
                let paren = arg || left;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, false, true)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, false, false)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for STy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false, false)
    }
}

// Term precedence levels: 0 = conjunction, 1 = cons, 2 = application, 3 = atom.
impl STerm {
    fn level(&self) -> u8 {
        match self {
            STerm::Ident { .. } => 3,
            STerm::App(..) => 2,
            STerm::Cons(..) => 1,
            STerm::Conj(..) => 0,
            STerm::Lam(..) => 0,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        // A lambda extends to the right, so it needs parentheses whenever
        // something could follow it.
        let paren = self.level() < min || (matches!(self, STerm::Lam(..)) && min > 0);
        if paren {
            write!(f, "(")?;
        }
        match self {
            STerm::Ident { name, tys } => {
                write!(f, "{name}")?;
                if let Some(tys) = tys {
                    write!(f, "[{}]", comma(tys))?;
                }
            }
            STerm::App(h, args) => {
                h.fmt_at(f, 2)?;
                for a in args {
                    write!(f, " ")?;
                    a.fmt_at(f, 3)?;
                }
            }
            STerm::Lam(x, ty, body) => {
                write!(f, "{x}")?;
                if let Some(t) = ty {
                    write!(f, ":")?;
                    t.fmt_prec(f, true, false)?;
                }
                write!(f, "\\ ")?;
                body.fmt_at(f, 0)?;
            }
            STerm::Cons(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " :: ")?;
                b.fmt_at(f, 1)?;
            }
            STerm::Conj(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " && ")?;
                b.fmt_at(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for STerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn fmt_binders(f: &mut fmt::Formatter<'_>, xs: &[(String, Option<STy>)]) -> fmt::Result {
    for (i, (x, t)) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        match t {
            Some(t) => write!(f, "({x} : {t})")?,
            None => write!(f, "{x}")?,
        }
    }
    Ok(())
}

// Formula levels: 0 = quantifier, 1 = implication, 2 = disjunction,
// 3 = conjunction, 4 = atomic.
impl SFormula {
    fn level(&self) -> u8 {
        match self {
            SFormula::Forall(..) | SFormula::Exists(..) => 0,
            SFormula::Imp(..) => 1,
            SFormula::Or(..) => 2,
            SFormula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.level() < min;
        if paren {
            write!(f, "(")?;
        }
        match self {
            SFormula::True => write!(f, "true")?,
            SFormula::False => write!(f, "false")?,
            SFormula::And(a, b) => {
                a.fmt_at(f, 3)?;
                write!(f, " /\\ ")?;
                b.fmt_at(f, 4)?;
            }
            SFormula::Or(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " \\/ ")?;
                b.fmt_at(f, 3)?;
            }
            SFormula::Imp(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_at(f, 0)?;
            }
            SFormula::Forall(xs, body) | SFormula::Exists(xs, body) => {
                write!(f, "{} ", if matches!(self, SFormula::Forall(..)) { "forall" } else { "exists" })?;
                fmt_binders(f, xs)?;
                write!(f, ", ")?;
                body.fmt_at(f, 0)?;
            }
            SFormula::Eq(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " = ")?;
                b.fmt_at(f, 1)?;
            }
            SFormula::Atom(t) => t.fmt_at(f, 1)?,
            SFormula::Brace(t) => write!(f, "{{{t}}}")?,
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Display for SClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            write!(f, "[{}] ", self.params.join(", "))?;
        }
        self.head.fmt_at(f, 1)?;
        if let Some(b) = &self.body {
            write!(f, " := {b}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tactic::Intros => write!(f, "intros."),
            Tactic::Case(h) => write!(f, "case {h}."),
            Tactic::Induction(n) => write!(f, "induction on {n}."),
            Tactic::Apply { source, tys, targets, withs } => {
                write!(f, "apply {source}")?;
                if let Some(tys) = tys {
                    write!(f, "[{}]", comma(tys))?;
                }
                if !targets.is_empty() {
                    write!(f, " to {}", targets.join(" "))?;
                }
                if !withs.is_empty() {
                    let ws: Vec<String> = withs.iter().map(|(x, t)| format!("{x} = {t}")).collect();
                    write!(f, " with {}", ws.join(", "))?;
                }
                write!(f, ".")
            }
            Tactic::Search(None) => write!(f, "search."),
            Tactic::Search(Some(n)) => write!(f, "search {n}."),
            Tactic::Unfold(None) => write!(f, "unfold."),
            Tactic::Unfold(Some(n)) => write!(f, "unfold {n}."),
            Tactic::Split => write!(f, "split."),
            Tactic::Left => write!(f, "left."),
            Tactic::Right => write!(f, "right."),
            Tactic::Exists(t) => write!(f, "exists {t}."),
            Tactic::Assert(g) => write!(f, "assert {g}."),
            Tactic::Undo => write!(f, "undo."),
            Tactic::Skip => write!(f, "skip."),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Kind { names, arity } => {
                write!(f, "Kind {} type", names.join(", "))?;
                for _ in 0..*arity {
                    write!(f, " -> type")?;
                }
                write!(f, ".")
            }
            Item::Type { names, ty } => write!(f, "Type {} {ty}.", names.join(", ")),
            Item::Define { inductive, params, preds, clauses } => {
                write!(f, "{}", if *inductive { "Inductive" } else { "Define" })?;
                if !params.is_empty() {
                    write!(f, " [{}]", params.join(", "))?;
                }
                let ps: Vec<String> = preds.iter().map(|(p, t)| format!("{p} : {t}")).collect();
                write!(f, " {}", ps.join(", "))?;
                if !clauses.is_empty() {
                    write!(f, " by")?;
                    for (i, c) in clauses.iter().enumerate() {
                        write!(f, "{}\n  {c}", if i == 0 { "" } else { ";" })?;
                    }
                }
                write!(f, ".")
            }
            Item::Theorem { name, params, formula, script } => {
                write!(f, "Theorem {name}")?;
                if !params.is_empty() {
                    write!(f, " [{}]", params.join(", "))?;
                }
                write!(f, " :\n  {formula}.")?;
                for t in script {
                    write!(f, "\n{}", t.node)?;
                }
                Ok(())
            }
            Item::Specification(name) => write!(f, "Specification \"{name}\"."),
        }
    }
}

impl fmt::Display for DevFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "{}", item.node)?;
        }
        Ok(())
    }
}
