//! Readers for the `.adt` theory format and the `.aps` preferred-structure
//! format.
//!
//! ```text
//! % bird theory
//! A1: bird(X) => fly(X).
//! A6: => penguin(tweety).
//! G1: divorced(X), notDivorced(X) => .
//! ```
//!
//! ```text
//! [true]
//! fly(jonathan).
//! [false]
//! fly(tweety).
//! ```
//!
//! Printing is the `Display` impl of [`Theory`] and [`PreferredStructure`].

use std::collections::BTreeSet;

use crate::error::{ParseError, ParseErrorKind, TheoryError};
use crate::theory::{name, Atom, Clause, Name, PreferredStructure, Term, Theory, EQUALITY};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Arrow,
    Eq,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, column, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let src = raw.split('%').next().unwrap_or("");
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let simple = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                ':' => Some(Tok::Colon),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, column });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == '=' {
                if chars.get(i + 1) == Some(&'>') {
                    out.push(Token { tok: Tok::Arrow, line, column });
                    i += 2;
                } else {
                    out.push(Token { tok: Tok::Eq, line, column });
                    i += 1;
                }
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line, column });
            } else {
                return Err(syntax(line, column, format!("unexpected character {c:?}")));
            }
        }
    }
    let line = text.lines().count().max(1);
    out.push(Token { tok: Tok::Eof, line, column: 1 });
    Ok(out)
}

fn is_symbol(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(t.line, t.column, format!("expected {what}, found {}", describe(&t.tok))))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(s) if is_symbol(&s) => Ok(if s.starts_with(|c: char| c.is_ascii_uppercase()) {
                Term::Var(name(&s))
            } else {
                Term::Const(name(&s))
            }),
            Tok::Ident(s) => Err(syntax(t.line, t.column, format!("invalid term name {s:?}"))),
            other => Err(syntax(t.line, t.column, format!("expected a term, found {}", describe(&other)))),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            let t = self.bump();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                other => {
                    return Err(syntax(t.line, t.column, format!("expected ',' or ')', found {}", describe(&other))))
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.peek().clone();
        match (&start.tok, self.peek_at(1)) {
            (Tok::Eq, Tok::LParen) => {
                self.bump();
                let args = self.args()?;
                Ok(Atom::new(name(EQUALITY), args))
            }
            (Tok::Ident(_), Tok::Eq) => {
                let lhs = self.term()?;
                self.bump();
                let rhs = self.term()?;
                Ok(Atom::new(name(EQUALITY), vec![lhs, rhs]))
            }
            (Tok::Ident(s), next) => {
                if !is_symbol(s) || !s.starts_with(|c: char| c.is_ascii_lowercase()) {
                    return Err(syntax(start.line, start.column, format!("invalid predicate name {s:?}")));
                }
                let pred = name(s);
                let has_args = *next == Tok::LParen;
                self.bump();
                let args = if has_args { self.args()? } else { Vec::new() };
                Ok(Atom::new(pred, args))
            }
            (other, _) => Err(syntax(start.line, start.column, format!("expected an atom, found {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("{s:?}"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::Colon => "':'".into(),
        Tok::Arrow => "'=>'".into(),
        Tok::Eq => "'='".into(),
        Tok::Eof => "end of input".into(),
    }
}

struct RawClause {
    id: Option<Name>,
    body: Vec<Atom>,
    head: Option<Atom>,
    line: usize,
    column: usize,
}

fn located(line: usize, column: usize) -> impl Fn(TheoryError) -> ParseError {
    move |e| ParseError { line, column, kind: ParseErrorKind::Invalid(e) }
}

/// Parses a theory file. Unnamed clauses get ids `A<k>` by position,
/// skipping ids already claimed elsewhere in the file.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut raw = Vec::new();
    while p.peek().tok != Tok::Eof {
        let start = p.peek().clone();
        let id = match (&start.tok, p.peek_at(1)) {
            (Tok::Ident(s), Tok::Colon) => {
                let id = name(s);
                p.bump();
                p.bump();
                Some(id)
            }
            _ => None,
        };
        let mut body = Vec::new();
        if p.peek().tok != Tok::Arrow {
            loop {
                body.push(p.atom()?);
                if p.peek().tok == Tok::Comma {
                    p.bump();
                } else {
                    break;
                }
            }
        }
        p.expect(Tok::Arrow, "'=>'")?;
        let head = if p.peek().tok == Tok::Dot { None } else { Some(p.atom()?) };
        p.expect(Tok::Dot, "'.'")?;
        raw.push(RawClause { id, body, head, line: start.line, column: start.column });
    }

    let claimed: BTreeSet<Name> = raw.iter().filter_map(|r| r.id.clone()).collect();
    let mut assigned = BTreeSet::new();
    let mut clauses = Vec::with_capacity(raw.len());
    for (k, r) in raw.into_iter().enumerate() {
        let id = match r.id {
            Some(id) => id,
            None => {
                let id = (k + 1..)
                    .map(|n| name(&format!("A{n}")))
                    .find(|c| !claimed.contains(c) && !assigned.contains(c))
                    .expect("unbounded search");
                assigned.insert(id.clone());
                id
            }
        };
        let clause = Clause::new(id, r.body, r.head).map_err(located(r.line, r.column))?;
        clauses.push((clause, r.line, r.column));
    }
    let positions: Vec<(Name, usize, usize)> = clauses.iter().map(|(c, l, col)| (c.id.clone(), *l, *col)).collect();
    Theory::new(clauses.into_iter().map(|(c, _, _)| c).collect()).map_err(|e| {
        let clause = match &e {
            TheoryError::ArityConflict { clause, .. } | TheoryError::DuplicateClauseId { clause } => {
                Some(clause.as_str())
            }
            _ => None,
        };
        let (line, column) =
            positions.iter().rev().find(|(id, _, _)| Some(&**id) == clause).map(|(_, l, c)| (*l, *c)).unwrap_or((1, 1));
        located(line, column)(e)
    })
}

/// Parses a preferred-structure file with `[true]` and `[false]` sections.
pub fn parse_ps(text: &str) -> Result<PreferredStructure, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut ps = PreferredStructure::default();
    let mut section: Option<bool> = None;
    while p.peek().tok != Tok::Eof {
        let start = p.peek().clone();
        if start.tok == Tok::LBracket {
            p.bump();
            let t = p.bump();
            section = match &t.tok {
                Tok::Ident(s) if s == "true" => Some(true),
                Tok::Ident(s) if s == "false" => Some(false),
                other => return Err(syntax(t.line, t.column, format!("unknown section {}", describe(other)))),
            };
            p.expect(Tok::RBracket, "']'")?;
            continue;
        }
        let Some(observed) = section else {
            return Err(syntax(start.line, start.column, "atom outside a [true] or [false] section"));
        };
        let atom = p.atom()?;
        p.expect(Tok::Dot, "'.'")?;
        ps.insert(atom, observed).map_err(located(start.line, start.column))?;
    }
    Ok(ps)
}

/// Renders a theory in the file format; identical to `theory.to_string()`.
pub fn pretty_print(theory: &Theory) -> String {
    theory.to_string()
}
