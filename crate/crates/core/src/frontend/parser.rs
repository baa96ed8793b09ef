use super::ast::{Command, DevFile, Item, SClause, SFormula, STerm, STy, Spanned, Tactic};
use super::lexer::{lex, Pos, Tok, Token};
use super::ParseError;

const KEYWORDS: &[&str] = &["forall", "exists", "true", "false"];

pub fn parse_dev(text: &str) -> Result<DevFile, ParseError> {
    let mut p = Parser::new(text)?;
    let mut file = DevFile::default();
    while !p.at(&Tok::Eof) {
        let pos = p.pos();
        let item = p.item()?;
        file.items.push(Spanned { pos, node: item });
    }
    Ok(file)
}

/// Parses interactive input: declarations, tactics and `Qed.` in any order.
pub fn parse_commands(text: &str) -> Result<Vec<Spanned<Command>>, ParseError> {
    let mut p = Parser::new(text)?;
    p.leave_qed = true;
    let mut out = Vec::new();
    while !p.at(&Tok::Eof) {
        let pos = p.pos();
        let node = match p.peek() {
            Tok::Ident(s) if s == "Qed" => {
                p.bump();
                p.expect(&Tok::Dot)?;
                Command::Qed
            }
            Tok::Ident(s) if s.starts_with(|c: char| c.is_uppercase()) => Command::Item(p.item()?),
            _ => Command::Tactic(p.tactic()?),
        };
        out.push(Spanned { pos, node });
    }
    Ok(out)
}

/// Parses a sequence of `.`-terminated tactic commands.
pub fn parse_tactics(text: &str) -> Result<Vec<Spanned<Tactic>>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while !p.at(&Tok::Eof) {
        let pos = p.pos();
        out.push(Spanned { pos, node: p.tactic()? });
    }
    Ok(out)
}

pub fn parse_formula(text: &str) -> Result<SFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect(&Tok::Eof)?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<STerm, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

pub fn parse_ty(text: &str) -> Result<STy, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
    /// Leave a `Qed.` after a theorem's script for the caller.
    leave_qed: bool,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, i: 0, leave_qed: false })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    pub(crate) fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    pub(crate) fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn err(&self, expected: &str) -> ParseError {
        ParseError::expected(self.pos(), expected, &self.peek().to_string())
    }

    pub(crate) fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(&t.to_string()))
        }
    }

    pub(crate) fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.at_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("`{w}`")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.err("an identifier")),
        }
    }

    fn num(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.err("a number")),
        }
    }

    pub(crate) fn ident_list(&mut self, sep: &Tok) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(sep) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn params(&mut self) -> Result<Vec<String>, ParseError> {
        if !self.eat(&Tok::LBrack) {
            return Ok(Vec::new());
        }
        let ps = self.ident_list(&Tok::Comma)?;
        self.expect(&Tok::RBrack)?;
        Ok(ps)
    }

    // ---- types ----

    pub(crate) fn ty(&mut self) -> Result<STy, ParseError> {
        let a = self.ty_app()?;
        if self.eat(&Tok::Arrow) {
            Ok(STy::Arrow(Box::new(a), Box::new(self.ty()?)))
        } else {
            Ok(a)
        }
    }

    fn ty_app(&mut self) -> Result<STy, ParseError> {
        if self.at(&Tok::LParen) {
            return self.ty_atom();
        }
        let name = self.ident()?;
        let mut args = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if s != "by") || self.at(&Tok::LParen) {
            args.push(self.ty_atom()?);
        }
        Ok(STy::Con(name, args))
    }

    fn ty_atom(&mut self) -> Result<STy, ParseError> {
        if self.eat(&Tok::LParen) {
            let t = self.ty()?;
            self.expect(&Tok::RParen)?;
            Ok(t)
        } else {
            Ok(STy::Con(self.ident()?, Vec::new()))
        }
    }

    fn ty_list(&mut self) -> Result<Vec<STy>, ParseError> {
        let mut out = vec![self.ty()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ty()?);
        }
        Ok(out)
    }

    // ---- terms ----

    fn at_lambda(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Backslash | Tok::Colon)
    }

    pub(crate) fn term(&mut self) -> Result<STerm, ParseError> {
        if self.at_lambda() {
            let x = self.ident()?;
            let ty = if self.eat(&Tok::Colon) { Some(self.ty_atom_or_arrow()?) } else { None };
            self.expect(&Tok::Backslash)?;
            let body = self.term()?;
            return Ok(STerm::Lam(x, ty, Box::new(body)));
        }
        let a = self.term_cons()?;
        if self.eat(&Tok::AmpAmp) {
            Ok(STerm::Conj(Box::new(a), Box::new(self.term()?)))
        } else {
            Ok(a)
        }
    }

    // The annotation on a lambda binder is a single type, possibly an arrow
    // in parentheses.
    fn ty_atom_or_arrow(&mut self) -> Result<STy, ParseError> {
        self.ty()
    }

    fn term_cons(&mut self) -> Result<STerm, ParseError> {
        let a = self.term_app()?;
        if self.eat(&Tok::ColonColon) {
            let b = if self.at_lambda() { self.term()? } else { self.term_cons()? };
            Ok(STerm::Cons(Box::new(a), Box::new(b)))
        } else {
            Ok(a)
        }
    }

    fn starts_term_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::LParen => true,
            _ => false,
        }
    }

    fn term_app(&mut self) -> Result<STerm, ParseError> {
        let head = self.term_atom()?;
        let mut args = Vec::new();
        while self.starts_term_atom() {
            if self.at_lambda() {
                break;
            }
            args.push(self.term_atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            Ok(STerm::App(Box::new(head), args))
        }
    }

    fn term_atom(&mut self) -> Result<STerm, ParseError> {
        if self.eat(&Tok::LParen) {
            let t = self.term()?;
            self.expect(&Tok::RParen)?;
            return Ok(t);
        }
        let name = self.ident().map_err(|_| self.err("a term"))?;
        let tys = if self.at(&Tok::LBrack) {
            self.bump();
            let tys = self.ty_list()?;
            self.expect(&Tok::RBrack)?;
            Some(tys)
        } else {
            None
        };
        Ok(STerm::Ident { name, tys })
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self) -> Result<SFormula, ParseError> {
        if self.at_word("forall") || self.at_word("exists") {
            let forall = self.at_word("forall");
            self.bump();
            let binders = self.binders()?;
            self.expect(&Tok::Comma)?;
            let body = self.formula()?;
            return Ok(if forall { SFormula::Forall(binders, Box::new(body)) } else { SFormula::Exists(binders, Box::new(body)) });
        }
        let a = self.disj()?;
        if self.eat(&Tok::Arrow) {
            Ok(SFormula::Imp(Box::new(a), Box::new(self.formula()?)))
        } else {
            Ok(a)
        }
    }

    fn binders(&mut self) -> Result<Vec<(String, Option<STy>)>, ParseError> {
        let mut out = Vec::new();
        let mut pending: Vec<String> = Vec::new();
        loop {
            if self.eat(&Tok::LParen) {
                let names = self.names_until_colon()?;
                self.expect(&Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(&Tok::RParen)?;
                out.extend(pending.drain(..).map(|x| (x, None)));
                out.extend(names.into_iter().map(|x| (x, Some(ty.clone()))));
            } else if matches!(self.peek(), Tok::Ident(_)) {
                pending.push(self.ident()?);
            } else if self.at(&Tok::Colon) && !pending.is_empty() {
                self.bump();
                let ty = self.ty()?;
                out.extend(pending.drain(..).map(|x| (x, Some(ty.clone()))));
            } else {
                break;
            }
        }
        out.extend(pending.into_iter().map(|x| (x, None)));
        if out.is_empty() {
            return Err(self.err("a bound variable"));
        }
        Ok(out)
    }

    fn names_until_colon(&mut self) -> Result<Vec<String>, ParseError> {
        let mut names = vec![self.ident()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn disj(&mut self) -> Result<SFormula, ParseError> {
        let mut a = self.conj()?;
        while self.eat(&Tok::Or) {
            let b = self.conj()?;
            a = SFormula::Or(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn conj(&mut self) -> Result<SFormula, ParseError> {
        let mut a = self.fatom()?;
        while self.eat(&Tok::And) {
            let b = self.fatom()?;
            a = SFormula::And(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn ends_formula(&self) -> bool {
        matches!(
            self.peek(),
            Tok::And | Tok::Or | Tok::Arrow | Tok::RParen | Tok::Comma | Tok::Dot | Tok::RBrace | Tok::Semi | Tok::ColonEq | Tok::Eof
        )
    }

    fn fatom(&mut self) -> Result<SFormula, ParseError> {
        if self.at_word("true") {
            self.bump();
            return Ok(SFormula::True);
        }
        if self.at_word("false") {
            self.bump();
            return Ok(SFormula::False);
        }
        if self.at_word("forall") || self.at_word("exists") {
            return self.formula();
        }
        if self.eat(&Tok::LBrace) {
            let t = self.term()?;
            self.expect(&Tok::RBrace)?;
            return Ok(SFormula::Brace(t));
        }
        if self.at(&Tok::LParen) {
            let save = self.i;
            if let Ok(f) = self.term_formula() {
                if self.ends_formula() {
                    return Ok(f);
                }
            }
            self.i = save;
            self.bump();
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        self.term_formula()
    }

    fn term_formula(&mut self) -> Result<SFormula, ParseError> {
        let t = self.term()?;
        if self.eat(&Tok::Eq) {
            Ok(SFormula::Eq(t, self.term()?))
        } else {
            Ok(SFormula::Atom(t))
        }
    }

    // ---- items ----

    fn item(&mut self) -> Result<Item, ParseError> {
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.err("a declaration")),
        };
        match word.as_str() {
            "Kind" => {
                self.bump();
                let names = self.ident_list(&Tok::Comma)?;
                self.expect_word("type")?;
                let mut arity = 0;
                while self.eat(&Tok::Arrow) {
                    self.expect_word("type")?;
                    arity += 1;
                }
                self.expect(&Tok::Dot)?;
                Ok(Item::Kind { names, arity })
            }
            "Type" => {
                self.bump();
                let names = self.ident_list(&Tok::Comma)?;
                let ty = self.ty()?;
                self.expect(&Tok::Dot)?;
                Ok(Item::Type { names, ty })
            }
            "Define" | "Inductive" => {
                self.bump();
                let params = self.params()?;
                let mut preds = Vec::new();
                loop {
                    let p = self.ident()?;
                    self.expect(&Tok::Colon)?;
                    preds.push((p, self.ty()?));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                let mut clauses = Vec::new();
                if self.at_word("by") {
                    self.bump();
                    loop {
                        clauses.push(self.clause()?);
                        if !self.eat(&Tok::Semi) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::Dot)?;
                Ok(Item::Define { inductive: word == "Inductive", params, preds, clauses })
            }
            "Theorem" => {
                self.bump();
                let name = self.ident()?;
                let params = self.params()?;
                self.expect(&Tok::Colon)?;
                let formula = self.formula()?;
                self.expect(&Tok::Dot)?;
                let mut script = Vec::new();
                while let Tok::Ident(s) = self.peek() {
                    if s == "Qed" {
                        if self.leave_qed {
                            break;
                        }
                        self.bump();
                        self.expect(&Tok::Dot)?;
                        break;
                    }
                    if s.starts_with(|c: char| c.is_uppercase()) {
                        break;
                    }
                    let pos = self.pos();
                    script.push(Spanned { pos, node: self.tactic()? });
                }
                Ok(Item::Theorem { name, params, formula, script })
            }
            "Specification" => {
                self.bump();
                let name = match self.bump() {
                    Tok::Str(s) => s,
                    _ => return Err(self.err("a quoted specification name")),
                };
                self.expect(&Tok::Dot)?;
                Ok(Item::Specification(name))
            }
            _ => Err(self.err("`Kind`, `Type`, `Define`, `Inductive`, `Theorem` or `Specification`")),
        }
    }

    fn clause(&mut self) -> Result<SClause, ParseError> {
        let params = self.params()?;
        let head = self.term()?;
        let body = if self.eat(&Tok::ColonEq) { Some(self.formula()?) } else { None };
        Ok(SClause { params, head, body })
    }

    pub(crate) fn tactic(&mut self) -> Result<Tactic, ParseError> {
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.err("a tactic")),
        };
        self.bump();
        let t = match word.as_str() {
            "intros" => Tactic::Intros,
            "case" => Tactic::Case(self.ident()?),
            "induction" => {
                self.expect_word("on")?;
                Tactic::Induction(self.num()?)
            }
            "apply" => {
                let source = self.ident()?;
                let tys = if self.eat(&Tok::LBrack) {
                    let tys = self.ty_list()?;
                    self.expect(&Tok::RBrack)?;
                    Some(tys)
                } else {
                    None
                };
                let mut targets = Vec::new();
                if self.at_word("to") {
                    self.bump();
                    while matches!(self.peek(), Tok::Ident(s) if s != "with") {
                        targets.push(self.ident()?);
                    }
                }
                let mut withs = Vec::new();
                if self.at_word("with") {
                    self.bump();
                    loop {
                        let x = self.ident()?;
                        self.expect(&Tok::Eq)?;
                        withs.push((x, self.term()?));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                Tactic::Apply { source, tys, targets, withs }
            }
            "search" => Tactic::Search(if matches!(self.peek(), Tok::Num(_)) { Some(self.num()?) } else { None }),
            "unfold" => Tactic::Unfold(if matches!(self.peek(), Tok::Num(_)) { Some(self.num()?) } else { None }),
            "split" => Tactic::Split,
            "left" => Tactic::Left,
            "right" => Tactic::Right,
            "exists" => Tactic::Exists(self.term()?),
            "assert" => Tactic::Assert(self.formula()?),
            "undo" => Tactic::Undo,
            "skip" => Tactic::Skip,
            _ => {
                self.i -= 1;
                return Err(self.err("a tactic"));
            }
        };
        self.expect(&Tok::Dot)?;
        Ok(t)
    }
}
