//! Lexer and recursive-descent parser for the concrete grammar.
//!
//! ```text
//! stype   := 'mu' ID '.' stype | unit ('&' unit)* | unit ('\/' unit)*
//! unit    := ID ('?'|'!') ID '(' sort ')' ('.' cont)? | 'end' | ID | '(' stype ')'
//! cont    := 'mu' ID '.' stype | unit
//! gtype   := 'mu' ID '.' gtype | 'end' | ID | '(' gtype ')'
//!          | ID '->' ID ':' (gbranch | '{' gbranch (',' gbranch)* '}')
//! gbranch := ID '(' sort ')' ('.' gtype)?
//! proc    := 'mu' ID '.' proc | 'if' expr 'then' proc 'else' proc | punit ('+' punit)*
//! punit   := ID '?' ID '(' ID ')' ('.' pcont)? | ID '!' ID '(' expr ')' ('.' pcont)?
//!          | '0' | ID | '(' proc ')'
//! pcont   := 'mu' ... | 'if' ... | punit
//! session := '@' ID proc ('||' '@' ID proc)*
//! expr    := oexpr ('>' oexpr)?
//! oexpr   := uexpr ('(+)' uexpr)*
//! uexpr   := ('succ' | 'neg' | 'not') uexpr | NAT | '-'NAT | 'true' | 'false' | ID | '(' expr ')'
//! ```
//!
//! A missing continuation means `end` (types) or `0` (processes). The
//! Unicode forms `∧ ∨ → ⊕ ¬ μ` are accepted for `& \/ -> (+) not mu`, and
//! `#` starts a line comment.

use std::fmt;

use thiserror::Error;

use crate::syntax::names::is_identifier;
use crate::syntax::{
    Branch, Expr, GlobalType, Label, Participant, Polarity, Process, ProcVar, Session, SessionType, Sort,
    SyntaxError, TypeVar, Var,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateLabel,
    UnguardedRecursion,
    UnboundVariable,
    SelfCommunication,
    DuplicateParticipant,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// The syntactic categories accepted by [`parse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Expr,
    Process,
    Session,
    SessionType,
    GlobalType,
}

/// A parsed value of any category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Syntax {
    Expr(Expr),
    Process(Process),
    Session(Session),
    SessionType(SessionType),
    GlobalType(GlobalType),
}

impl fmt::Display for Syntax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Syntax::Expr(e) => e.fmt(f),
            Syntax::Process(p) => p.fmt(f),
            Syntax::Session(m) => m.fmt(f),
            Syntax::SessionType(t) => t.fmt(f),
            Syntax::GlobalType(g) => g.fmt(f),
        }
    }
}

pub fn parse(category: Category, text: &str) -> Result<Syntax, ParseError> {
    Ok(match category {
        Category::Expr => Syntax::Expr(parse_expr(text)?),
        Category::Process => Syntax::Process(parse_process(text)?),
        Category::Session => Syntax::Session(parse_session(text)?),
        Category::SessionType => Syntax::SessionType(parse_session_type(text)?),
        Category::GlobalType => Syntax::GlobalType(parse_global_type(text)?),
    })
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text)?.complete(|p| p.expr())
}

/// Parses a closed process.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    Parser::new(text)?.complete(|p| p.process())
}

pub fn parse_session(text: &str) -> Result<Session, ParseError> {
    Parser::new(text)?.complete(|p| p.session())
}

/// Parses a closed, guarded session type.
pub fn parse_session_type(text: &str) -> Result<SessionType, ParseError> {
    Parser::new(text)?.complete(|p| p.stype())
}

/// Parses a closed, guarded global type.
pub fn parse_global_type(text: &str) -> Result<GlobalType, ParseError> {
    Parser::new(text)?.complete(|p| p.gtype())
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    NegInt(i64),
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Amp,
    Vee,
    Arrow,
    Question,
    Bang,
    Plus,
    OPlus,
    Gt,
    At,
    Par,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Nat(n) => return write!(f, "`{n}`"),
            Tok::NegInt(i) => return write!(f, "`{i}`"),
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Amp => "&",
            Tok::Vee => "\\/",
            Tok::Arrow => "->",
            Tok::Question => "?",
            Tok::Bang => "!",
            Tok::Plus => "+",
            Tok::OPlus => "(+)",
            Tok::Gt => ">",
            Tok::At => "@",
            Tok::Par => "||",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn error(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError { kind, line: pos.line, column: pos.column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let advance = |i: &mut usize, column: &mut usize, n: usize| {
        *i += n;
        *column += n;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, &mut column, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            column += i - start;
            let text: String = chars[start..i].iter().collect();
            let tok = if c == '-' {
                text.parse().map(Tok::NegInt)
            } else {
                text.parse().map(Tok::Nat)
            }
            .map_err(|_| error(ParseErrorKind::Syntax, pos, format!("number literal `{text}` out of range")))?;
            out.push((tok, pos));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('(', Some('+')) if chars.get(i + 2) == Some(&')') => (Tok::OPlus, 3),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('\\', Some('/')) => (Tok::Vee, 2),
            ('|', Some('|')) => (Tok::Par, 2),
            ('.', _) => (Tok::Dot, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('&' | '∧', _) => (Tok::Amp, 1),
            ('∨', _) => (Tok::Vee, 1),
            ('→', _) => (Tok::Arrow, 1),
            ('?', _) => (Tok::Question, 1),
            ('!', _) => (Tok::Bang, 1),
            ('+', _) => (Tok::Plus, 1),
            ('⊕', _) => (Tok::OPlus, 1),
            ('>', _) => (Tok::Gt, 1),
            ('@', _) => (Tok::At, 1),
            ('¬', _) => (Tok::Ident("not".into()), 1),
            ('μ', _) => (Tok::Ident("mu".into()), 1),
            _ => return Err(error(ParseErrorKind::Syntax, pos, format!("unexpected character `{c}`"))),
        };
        advance(&mut i, &mut column, len);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    at: usize,
    /// Recursion variables in scope, innermost last.
    scope: Vec<String>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Self { tokens: lex(text)?, at: 0, scope: Vec::new() })
    }

    fn complete<T>(mut self, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        let value = f(&mut self)?;
        if self.peek() != &Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(value)
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.at].0.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        error(ParseErrorKind::Syntax, self.pos(), format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if is_identifier(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        let sort = match self.peek() {
            Tok::Ident(s) if s == "nat" => Sort::Nat,
            Tok::Ident(s) if s == "int" => Sort::Int,
            Tok::Ident(s) if s == "bool" => Sort::Bool,
            _ => return Err(self.unexpected("a sort (`nat`, `int` or `bool`)")),
        };
        self.bump();
        Ok(sort)
    }

    fn bound_var(&self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if self.scope.iter().any(|v| v == name) {
            Ok(())
        } else {
            Err(error(ParseErrorKind::UnboundVariable, pos, format!("unbound recursion variable `{name}`")))
        }
    }

    /// Parses `mu ID .` and the body, checking that the body does not
    /// start with the bound variable.
    fn binder<T>(
        &mut self,
        body: impl FnOnce(&mut Self) -> Result<T, ParseError>,
        head_vars: impl FnOnce(&T) -> Vec<String>,
    ) -> Result<(String, T), ParseError> {
        let pos = self.pos();
        self.expect_keyword("mu")?;
        let var = self.ident("a recursion variable")?;
        self.expect(Tok::Dot)?;
        self.scope.push(var.clone());
        let result = body(self);
        self.scope.pop();
        let result = result?;
        if head_vars(&result).contains(&var) {
            return Err(error(
                ParseErrorKind::UnguardedRecursion,
                pos,
                format!("recursion variable `{var}` is not guarded"),
            ));
        }
        Ok((var, result))
    }

    fn syntax_error(err: SyntaxError, pos: Pos) -> ParseError {
        let kind = match err {
            SyntaxError::DuplicateLabel(_) => ParseErrorKind::DuplicateLabel,
            SyntaxError::UnguardedRecursion(_) => ParseErrorKind::UnguardedRecursion,
            SyntaxError::UnboundVariable(_) => ParseErrorKind::UnboundVariable,
            SyntaxError::SelfCommunication(_) => ParseErrorKind::SelfCommunication,
            SyntaxError::DuplicateParticipant(_) => ParseErrorKind::DuplicateParticipant,
            SyntaxError::EmptyBranches | SyntaxError::EmptySession => ParseErrorKind::Syntax,
        };
        error(kind, pos, err.to_string())
    }

    // Expressions.

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.oexpr()?;
        if self.eat(&Tok::Gt) {
            let rhs = self.oexpr()?;
            return Ok(Expr::gt(lhs, rhs));
        }
        Ok(lhs)
    }

    fn oexpr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.uexpr()?;
        while self.eat(&Tok::OPlus) {
            let rhs = self.uexpr()?;
            lhs = Expr::choice(lhs, rhs);
        }
        Ok(lhs)
    }

    fn uexpr(&mut self) -> Result<Expr, ParseError> {
        let e = match self.peek().clone() {
            Tok::Ident(s) if s == "succ" => {
                self.bump();
                return Ok(Expr::succ(self.uexpr()?));
            }
            Tok::Ident(s) if s == "neg" => {
                self.bump();
                return Ok(Expr::neg(self.uexpr()?));
            }
            Tok::Ident(s) if s == "not" => {
                self.bump();
                return Ok(Expr::not(self.uexpr()?));
            }
            Tok::Ident(s) if s == "true" => Expr::Bool(true),
            Tok::Ident(s) if s == "false" => Expr::Bool(false),
            Tok::Ident(s) if is_identifier(&s) => Expr::Var(Var::new(s)),
            Tok::Nat(n) => Expr::Nat(n),
            Tok::NegInt(i) => Expr::Int(i),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            _ => return Err(self.unexpected("an expression")),
        };
        self.bump();
        Ok(e)
    }

    // Processes.

    fn process(&mut self) -> Result<Process, ParseError> {
        if self.is_keyword("mu") {
            let (var, body) = self.binder(Self::process, |p| proc_head_vars(p))?;
            return Ok(Process::rec(ProcVar::new(var), body));
        }
        if self.eat_keyword("if") {
            let cond = self.expr()?;
            self.expect_keyword("then")?;
            let then_branch = self.process()?;
            self.expect_keyword("else")?;
            let else_branch = self.process()?;
            return Ok(Process::cond(cond, then_branch, else_branch));
        }
        let mut summands = vec![self.punit()?];
        while self.eat(&Tok::Plus) {
            summands.push(self.punit()?);
        }
        Ok(Process::sum(summands))
    }

    fn pcont(&mut self) -> Result<Process, ParseError> {
        if !self.eat(&Tok::Dot) {
            return Ok(Process::Inact);
        }
        if self.is_keyword("mu") || self.is_keyword("if") {
            return self.process();
        }
        self.punit()
    }

    fn punit(&mut self) -> Result<Process, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                Ok(Process::Inact)
            }
            Tok::LParen => {
                self.bump();
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(name) if is_identifier(&name) => {
                self.bump();
                match self.peek() {
                    Tok::Question => {
                        self.bump();
                        let label = self.ident("a label")?;
                        self.expect(Tok::LParen)?;
                        let var = self.ident("a variable")?;
                        self.expect(Tok::RParen)?;
                        let body = self.pcont()?;
                        Ok(Process::input(Participant::new(name), Label::new(label), Var::new(var), body))
                    }
                    Tok::Bang => {
                        self.bump();
                        let label = self.ident("a label")?;
                        self.expect(Tok::LParen)?;
                        let payload = self.expr()?;
                        self.expect(Tok::RParen)?;
                        let body = self.pcont()?;
                        Ok(Process::output(Participant::new(name), Label::new(label), payload, body))
                    }
                    _ => {
                        self.bound_var(&name, pos)?;
                        Ok(Process::var(ProcVar::new(name)))
                    }
                }
            }
            _ => Err(self.unexpected("a process")),
        }
    }

    fn session(&mut self) -> Result<Session, ParseError> {
        let mut entries: Vec<(Participant, Process)> = Vec::new();
        loop {
            self.expect(Tok::At)?;
            let pos = self.pos();
            let name = Participant::new(self.ident("a participant")?);
            let proc = self.process()?;
            if proc.participants().contains(&name) {
                return Err(Self::syntax_error(SyntaxError::SelfCommunication(name), pos));
            }
            if entries.iter().any(|(p, _)| p == &name) {
                return Err(Self::syntax_error(SyntaxError::DuplicateParticipant(name), pos));
            }
            entries.push((name, proc));
            if !self.eat(&Tok::Par) {
                break;
            }
        }
        let start = self.tokens[0].1;
        Session::new(entries).map_err(|e| Self::syntax_error(e, start))
    }

    // Session types.

    fn stype(&mut self) -> Result<SessionType, ParseError> {
        if self.is_keyword("mu") {
            let (var, body) = self.binder(Self::stype, |t| t.head_vars().iter().map(|v| v.to_string()).collect())?;
            return Ok(SessionType::rec(TypeVar::new(var), body));
        }
        let start = self.pos();
        let first = self.sunit()?;
        let connective = match self.peek() {
            Tok::Amp => Polarity::In,
            Tok::Vee => Polarity::Out,
            _ => return Ok(first),
        };
        let mut operands = vec![(start, first)];
        let sep = self.peek().clone();
        while self.eat(&sep) {
            let pos = self.pos();
            operands.push((pos, self.sunit()?));
        }
        if matches!(self.peek(), Tok::Amp | Tok::Vee) {
            return Err(error(ParseErrorKind::Syntax, self.pos(), "mixing `&` and `\\/` needs parentheses"));
        }
        let mut peer: Option<Participant> = None;
        let mut branches = Vec::new();
        for (pos, operand) in operands {
            match operand {
                SessionType::Comm { polarity, peer: q, branches: bs }
                    if polarity == connective && peer.as_ref().is_none_or(|p| *p == q) =>
                {
                    peer = Some(q);
                    branches.extend(bs);
                }
                _ => {
                    let what = match connective {
                        Polarity::In => "operands of `&` must be inputs from one sender",
                        Polarity::Out => "operands of `\\/` must be outputs to one receiver",
                    };
                    return Err(error(ParseErrorKind::Syntax, pos, what));
                }
            }
        }
        SessionType::comm(connective, peer.expect("at least one operand"), branches)
            .map_err(|e| Self::syntax_error(e, start))
    }

    fn scont(&mut self) -> Result<SessionType, ParseError> {
        if !self.eat(&Tok::Dot) {
            return Ok(SessionType::End);
        }
        if self.is_keyword("mu") {
            return self.stype();
        }
        self.sunit()
    }

    fn sunit(&mut self) -> Result<SessionType, ParseError> {
        let pos = self.pos();
        if self.eat_keyword("end") {
            return Ok(SessionType::End);
        }
        if self.eat(&Tok::LParen) {
            let t = self.stype()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let name = self.ident("a session type")?;
        let polarity = match self.peek() {
            Tok::Question => Polarity::In,
            Tok::Bang => Polarity::Out,
            _ => {
                self.bound_var(&name, pos)?;
                return Ok(SessionType::var(TypeVar::new(name)));
            }
        };
        self.bump();
        let label = self.ident("a label")?;
        self.expect(Tok::LParen)?;
        let sort = self.sort()?;
        self.expect(Tok::RParen)?;
        let cont = self.scont()?;
        Ok(SessionType::Comm {
            polarity,
            peer: Participant::new(name),
            branches: vec![Branch::new(Label::new(label), sort, cont)],
        })
    }

    // Global types.

    fn gtype(&mut self) -> Result<GlobalType, ParseError> {
        let pos = self.pos();
        if self.is_keyword("mu") {
            let (var, body) = self.binder(Self::gtype, |g| g.head_vars().iter().map(|v| v.to_string()).collect())?;
            return Ok(GlobalType::rec(TypeVar::new(var), body));
        }
        if self.eat_keyword("end") {
            return Ok(GlobalType::End);
        }
        if self.eat(&Tok::LParen) {
            let g = self.gtype()?;
            self.expect(Tok::RParen)?;
            return Ok(g);
        }
        let from = self.ident("a global type")?;
        if self.peek() != &Tok::Arrow {
            self.bound_var(&from, pos)?;
            return Ok(GlobalType::var(TypeVar::new(from)));
        }
        self.bump();
        let to_pos = self.pos();
        let to = self.ident("a participant")?;
        if from == to {
            return Err(Self::syntax_error(SyntaxError::SelfCommunication(Participant::new(from)), to_pos));
        }
        self.expect(Tok::Colon)?;
        let list_pos = self.pos();
        let mut branches = Vec::new();
        if self.eat(&Tok::LBrace) {
            loop {
                branches.push(self.gbranch()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
        } else {
            branches.push(self.gbranch()?);
        }
        GlobalType::comm(Participant::new(from), Participant::new(to), branches)
            .map_err(|e| Self::syntax_error(e, list_pos))
    }

    fn gbranch(&mut self) -> Result<Branch<GlobalType>, ParseError> {
        let label = self.ident("a label")?;
        self.expect(Tok::LParen)?;
        let sort = self.sort()?;
        self.expect(Tok::RParen)?;
        let cont = if self.eat(&Tok::Dot) { self.gtype()? } else { GlobalType::End };
        Ok(Branch::new(Label::new(label), sort, cont))
    }
}

/// Process variables in head position, as in [`Process::check_guarded`].
fn proc_head_vars(p: &Process) -> Vec<String> {
    match p {
        Process::Var(x) => vec![x.to_string()],
        Process::Rec(y, body) => proc_head_vars(body).into_iter().filter(|x| x != y.as_str()).collect(),
        Process::Choice(items) => items.iter().flat_map(proc_head_vars).collect(),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_payload_is_not_a_sort() {
        let err = parse_session_type("p!l(5).end").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn intersection_of_two_inputs() {
        let t = parse_session_type("p?l2(bool).end & p?l1(nat).end").unwrap();
        let expected = SessionType::intersection(
            "p",
            vec![Branch::new("l1", Sort::Nat, SessionType::End), Branch::new("l2", Sort::Bool, SessionType::End)],
        )
        .unwrap();
        assert_eq!(t, expected);
    }

    #[test]
    fn unguarded_and_unbound() {
        assert_eq!(parse_session_type("mu t. t").unwrap_err().kind, ParseErrorKind::UnguardedRecursion);
        assert_eq!(parse_session_type("mu t. mu s. t").unwrap_err().kind, ParseErrorKind::UnguardedRecursion);
        assert_eq!(parse_session_type("p?l(nat).t").unwrap_err().kind, ParseErrorKind::UnboundVariable);
        assert_eq!(parse_global_type("mu t. t").unwrap_err().kind, ParseErrorKind::UnguardedRecursion);
        assert_eq!(parse_process("mu X. X + p?l(x).0").unwrap_err().kind, ParseErrorKind::UnguardedRecursion);
        assert!(parse_process("mu X. if true then X else 0").is_ok());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = parse_session_type("p?l(nat).end & p?l(int).end").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateLabel);
        let err = parse_global_type("p -> q : { a(nat), a(int) }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateLabel);
    }

    #[test]
    fn mixed_operands_rejected() {
        assert!(parse_session_type("p?a(nat).end & q?b(nat).end").is_err());
        assert!(parse_session_type("p?a(nat).end & p!b(nat).end").is_err());
        assert!(parse_session_type("p?a(nat).end & end").is_err());
    }

    #[test]
    fn sessions_and_self_communication() {
        let m = parse_session("@p q!l(5).0 || @q p?l(x).0").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(parse_session("@p p!l(5).0").unwrap_err().kind, ParseErrorKind::SelfCommunication);
        assert_eq!(parse_session("@p 0 || @p 0").unwrap_err().kind, ParseErrorKind::DuplicateParticipant);
        assert_eq!(parse_global_type("p -> p : l(nat)").unwrap_err().kind, ParseErrorKind::SelfCommunication);
    }

    #[test]
    fn unicode_aliases_and_comments() {
        let a = parse_session_type("# a comment\nμt. p?l(nat).t ∧ p?m(int).end").unwrap();
        let b = parse_session_type("mu t. p?l(nat).t & p?m(int).end").unwrap();
        assert_eq!(a, b);
        let e = parse_expr("¬ true ⊕ false").unwrap();
        assert_eq!(e, Expr::choice(Expr::not(Expr::Bool(true)), Expr::Bool(false)));
        let g = parse_global_type("p → q : l(nat)").unwrap();
        assert_eq!(g, GlobalType::message("p", "q", "l", Sort::Nat, GlobalType::End));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("succ x (+) neg -5 > 0").unwrap();
        let expected = Expr::gt(Expr::choice(Expr::succ(Expr::var("x")), Expr::neg(Expr::Int(-5))), Expr::Nat(0));
        assert_eq!(e, expected);
        let p = parse_process("p?a(x).0 + p?b(y).q!c(y).0").unwrap();
        assert_eq!(p.summands().len(), 2);
        let p = parse_process("p?a(x).mu X. q!b(x).X + q?c(y).X").unwrap();
        assert!(matches!(p, Process::Input { .. }));
    }

    #[test]
    fn error_positions_span_lines() {
        let err = parse_process("p?a(x).\n  q!b(x).\n  ?").unwrap_err();
        assert_eq!((err.line, err.column), (3, 3));
    }
}
