//! λ-terms with letrec: syntax tree, parser and printer.
//!
//! Concrete syntax: `\x y. body` (or `λx. body`) for abstraction, juxtaposition
//! for left-associative application, `letrec f = t; g = u in body` for
//! recursive bindings, and parentheses. Abstraction and letrec bodies extend
//! as far to the right as possible.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(Box<Term>, Box<Term>),
    Abs(String, Box<Term>),
    Letrec(Vec<(String, Term)>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn abs(x: &str, body: Term) -> Term {
        Term::Abs(x.to_string(), Box::new(body))
    }

    pub fn letrec(bindings: Vec<(&str, Term)>, body: Term) -> Term {
        Term::Letrec(
            bindings
                .into_iter()
                .map(|(n, t)| (n.to_string(), t))
                .collect(),
            Box::new(body),
        )
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Abs(_, b) => 1 + b.size(),
            Term::Letrec(bs, b) => 1 + b.size() + bs.iter().map(|(_, t)| t.size()).sum::<usize>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unbound variable `{name}` at byte {position}")]
    UnboundVariable { name: String, position: usize },
    #[error("duplicate letrec binding `{name}`")]
    DuplicateBinding { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Lambda,
    Dot,
    LParen,
    RParen,
    Equals,
    Semi,
    Letrec,
    In,
    Ident(String),
    End,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>, TermError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            '\\' | 'λ' => Some(Token::Lambda),
            '.' => Some(Token::Dot),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '=' => Some(Token::Equals),
            ';' => Some(Token::Semi),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            // comment to end of line
            while chars.next_if(|&(_, c)| c != '\n').is_some() {}
        } else if is_ident_start(c) {
            let mut word = String::new();
            while let Some((_, c)) = chars.next_if(|&(_, c)| is_ident_char(c)) {
                word.push(c);
            }
            let tok = match word.as_str() {
                "letrec" => Token::Letrec,
                "in" => Token::In,
                _ => Token::Ident(word),
            };
            out.push((tok, pos));
        } else {
            return Err(TermError::SyntaxError {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Token::End, src.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    at: usize,
    // byte offsets of variable occurrences, in parse order
    var_positions: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].0.clone();
        if t != Token::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::SyntaxError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Token, what: &str) -> Result<(), TermError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, TermError> {
        match self.peek().clone() {
            Token::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => self.error("expected identifier"),
        }
    }

    fn term(&mut self) -> Result<Term, TermError> {
        match self.peek() {
            Token::Lambda => self.lambda(),
            Token::Letrec => self.letrec(),
            _ => self.application(),
        }
    }

    fn lambda(&mut self) -> Result<Term, TermError> {
        self.bump();
        let mut binders = vec![self.ident()?];
        while let Token::Ident(_) = self.peek() {
            binders.push(self.ident()?);
        }
        self.expect(Token::Dot, "`.` after binders")?;
        let body = self.term()?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |b, x| Term::Abs(x, Box::new(b))))
    }

    fn letrec(&mut self) -> Result<Term, TermError> {
        self.bump();
        let mut bindings = Vec::new();
        loop {
            let name = self.ident()?;
            self.expect(Token::Equals, "`=` in letrec binding")?;
            bindings.push((name, self.term()?));
            match self.peek() {
                Token::Semi => {
                    self.bump();
                }
                Token::In => break,
                _ => return self.error("expected `;` or `in`"),
            }
        }
        self.bump();
        let body = self.term()?;
        Ok(Term::Letrec(bindings, Box::new(body)))
    }

    fn application(&mut self) -> Result<Term, TermError> {
        let mut head = self.atom()?;
        loop {
            let arg = match self.peek() {
                Token::Ident(_) | Token::LParen => self.atom()?,
                Token::Lambda | Token::Letrec => self.term()?,
                _ => return Ok(head),
            };
            head = Term::App(Box::new(head), Box::new(arg));
        }
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        match self.peek().clone() {
            Token::Ident(x) => {
                self.var_positions.push(self.pos());
                self.bump();
                Ok(Term::Var(x))
            }
            Token::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.error("expected a term"),
        }
    }
}

/// Parses a closed term.
pub fn parse_term(src: &str) -> Result<Term, TermError> {
    let mut p = Parser {
        tokens: lex(src)?,
        at: 0,
        var_positions: Vec::new(),
    };
    let t = p.term()?;
    if *p.peek() != Token::End {
        return p.error("unexpected input after term");
    }
    let mut scope = Vec::new();
    let mut occurrence = 0;
    check_closed(&t, &mut scope, &p.var_positions, &mut occurrence)?;
    Ok(t)
}

/// Walks the term in parse order, matching variable occurrences to their
/// recorded positions.
fn check_closed<'a>(
    t: &'a Term,
    scope: &mut Vec<&'a str>,
    positions: &[usize],
    occurrence: &mut usize,
) -> Result<(), TermError> {
    match t {
        Term::Var(x) => {
            let position = positions.get(*occurrence).copied().unwrap_or(0);
            *occurrence += 1;
            if !scope.contains(&x.as_str()) {
                return Err(TermError::UnboundVariable {
                    name: x.clone(),
                    position,
                });
            }
        }
        Term::App(f, a) => {
            check_closed(f, scope, positions, occurrence)?;
            check_closed(a, scope, positions, occurrence)?;
        }
        Term::Abs(x, b) => {
            scope.push(x);
            check_closed(b, scope, positions, occurrence)?;
            scope.pop();
        }
        Term::Letrec(bs, b) => {
            let mut seen = HashSet::new();
            for (name, _) in bs {
                if !seen.insert(name) {
                    return Err(TermError::DuplicateBinding { name: name.clone() });
                }
                scope.push(name);
            }
            for (_, rhs) in bs {
                check_closed(rhs, scope, positions, occurrence)?;
            }
            check_closed(b, scope, positions, occurrence)?;
            scope.truncate(scope.len() - bs.len());
        }
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(fun, arg) => {
                match **fun {
                    Term::Var(_) | Term::App(..) => write!(f, "{fun}")?,
                    _ => write!(f, "({fun})")?,
                }
                match **arg {
                    Term::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
            Term::Abs(x, body) => write!(f, "\\{x}. {body}"),
            Term::Letrec(bs, body) => {
                write!(f, "letrec ")?;
                for (i, (name, rhs)) in bs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{name} = {rhs}")?;
                }
                write!(f, " in {body}")
            }
        }
    }
}
