//! Process-algebra shorthand for event structures.
//!
//! `a || b` puts events side by side, `a ; b` orders every event on the left
//! below every event on the right, and `a + b` puts every left event in
//! conflict with every right event. Precedence is `;` over `||` over `+`,
//! all left-associative; parentheses may appear anywhere and `∥` is accepted
//! for `||`.

use std::fmt;

use thiserror::Error;

use crate::bits;
use crate::label::Label;
use crate::structure::{BuildError, EventId, EventStructure};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Atom(Label),
    Par(Box<Term>, Box<Term>),
    Seq(Box<Term>, Box<Term>),
    Sum(Box<Term>, Box<Term>),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Label::new(name))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Term, r: Term) -> Term {
        Term::Seq(Box::new(l), Box::new(r))
    }

    pub fn sum(l: Term, r: Term) -> Term {
        Term::Sum(Box::new(l), Box::new(r))
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Term::Atom(_) => 1,
            Term::Par(l, r) | Term::Seq(l, r) | Term::Sum(l, r) => l.atom_count() + r.atom_count(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Atom(_) => 3,
            Term::Seq(..) => 2,
            Term::Par(..) => 1,
            Term::Sum(..) => 0,
        }
    }
}

/// Renders with the minimal parentheses needed to parse back to the same tree.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r, op) = match self {
            Term::Atom(label) => return write!(f, "{label}"),
            Term::Par(l, r) => (l, r, " || "),
            Term::Seq(l, r) => (l, r, ";"),
            Term::Sum(l, r) => (l, r, " + "),
        };
        let p = self.precedence();
        // Left-associative: the right operand needs parentheses at equal precedence.
        if l.precedence() < p {
            write!(f, "({l})")?;
        } else {
            write!(f, "{l}")?;
        }
        f.write_str(op)?;
        if r.precedence() <= p {
            write!(f, "({r})")
        } else {
            write!(f, "{r}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct SyntaxError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("term does not denote a prime event structure: {0}")]
    NotPrime(BuildError),
    #[error(transparent)]
    Build(BuildError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Par,
    Seq,
    Sum,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '|' if chars.get(i + 1) == Some(&'|') => {
                i += 2;
                Token::Par
            }
            '∥' => {
                i += 1;
                Token::Par
            }
            ';' => {
                i += 1;
                Token::Seq
            }
            '+' => {
                i += 1;
                Token::Sum
            }
            '(' => {
                i += 1;
                Token::Open
            }
            ')' => {
                i += 1;
                Token::Close
            }
            c if c.is_ascii_alphanumeric() => {
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                Token::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(SyntaxError { position: i, message: format!("unexpected character {other:?}") });
            }
        };
        tokens.push((start, token));
    }
    tokens.push((chars.len(), Token::Close));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn at_end(&self) -> bool {
        self.pos == self.tokens.len() - 1
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { position: self.tokens[self.pos].0, message: message.into() })
    }

    fn binary(
        &mut self,
        op: Token,
        operand: fn(&mut Parser) -> Result<Term, SyntaxError>,
        join: fn(Term, Term) -> Term,
    ) -> Result<Term, SyntaxError> {
        let mut term = operand(self)?;
        while !self.at_end() && *self.peek() == op {
            self.pos += 1;
            let rhs = operand(self)?;
            term = join(term, rhs);
        }
        Ok(term)
    }

    fn sum(&mut self) -> Result<Term, SyntaxError> {
        self.binary(Token::Sum, Parser::par, Term::sum)
    }

    fn par(&mut self) -> Result<Term, SyntaxError> {
        self.binary(Token::Par, Parser::seq, Term::par)
    }

    fn seq(&mut self) -> Result<Term, SyntaxError> {
        self.binary(Token::Seq, Parser::atom, Term::seq)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        if self.at_end() {
            return self.error("unexpected end of input");
        }
        match self.peek().clone() {
            Token::Ident(name) => {
                self.pos += 1;
                Ok(Term::Atom(Label::new(&name)))
            }
            Token::Open => {
                self.pos += 1;
                self.depth += 1;
                let inner = self.sum()?;
                if self.at_end() || *self.peek() != Token::Close {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                self.depth -= 1;
                Ok(inner)
            }
            Token::Close => self.error("unexpected ')'"),
            _ => self.error("expected a label or '('"),
        }
    }
}

pub fn parse(text: &str) -> Result<Term, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, depth: 0 };
    let term = parser.sum()?;
    if !parser.at_end() {
        return parser.error("unexpected trailing input");
    }
    debug_assert_eq!(parser.depth, 0);
    Ok(term)
}

struct Pieces {
    labels: Vec<Label>,
    causes: Vec<(EventId, EventId)>,
    conflicts: Vec<(EventId, EventId)>,
}

impl Pieces {
    /// Emits the events of `t` in left-to-right order; returns their id range.
    fn emit(&mut self, t: &Term) -> std::ops::Range<EventId> {
        let start = self.labels.len();
        match t {
            Term::Atom(label) => self.labels.push(label.clone()),
            Term::Par(l, r) => {
                self.emit(l);
                self.emit(r);
            }
            Term::Seq(l, r) => {
                let left = self.emit(l);
                let right = self.emit(r);
                for a in left {
                    self.causes.extend(right.clone().map(|b| (a, b)));
                }
            }
            Term::Sum(l, r) => {
                let left = self.emit(l);
                let right = self.emit(r);
                for a in left {
                    self.conflicts.extend(right.clone().map(|b| (a, b)));
                }
            }
        }
        start..self.labels.len()
    }
}

pub fn compile(t: &Term) -> Result<EventStructure, CompileError> {
    let mut pieces = Pieces { labels: Vec::new(), causes: Vec::new(), conflicts: Vec::new() };
    pieces.emit(t);
    let n = pieces.labels.len();
    EventStructure::build(n, pieces.labels, &pieces.causes, &pieces.conflicts).map_err(|e| match e {
        BuildError::SelfConflict { .. } | BuildError::CausalityConflictOverlap(..) => CompileError::NotPrime(e),
        other => CompileError::Build(other),
    })
}

/// Parses and compiles in one step.
pub fn structure_of(text: &str) -> Result<EventStructure, CompileError> {
    compile(&parse(text)?)
}

/// Recovers a term denoting `s` when `s` lies in the algebra's fragment.
pub fn decompose(s: &EventStructure) -> Option<Term> {
    if s.is_empty() {
        return None;
    }
    decompose_set(s, s.all_events())
}

fn decompose_set(s: &EventStructure, set: u64) -> Option<Term> {
    let members: Vec<EventId> = bits::iter(set).collect();
    if members.len() == 1 {
        return Some(Term::Atom(s.label(members[0]).clone()));
    }
    let fold = |parts: Vec<u64>, join: fn(Term, Term) -> Term| -> Option<Term> {
        let mut terms = parts.into_iter().map(|p| decompose_set(s, p));
        let first = terms.next()??;
        terms.try_fold(first, |acc, t| Some(join(acc, t?)))
    };

    // Sum: components of the "not in conflict" graph.
    let sum_parts = components(&members, |a, b| !s.in_conflict(a, b));
    if sum_parts.len() > 1 {
        return fold(sum_parts, Term::sum);
    }
    // Par: components of the "related" graph (ordered or conflicting).
    let par_parts = components(&members, |a, b| !s.concurrent(a, b));
    if par_parts.len() > 1 {
        return fold(par_parts, Term::par);
    }
    // Seq: components of the "unordered" graph must be totally ordered blockwise.
    let mut seq_parts = components(&members, |a, b| !s.precedes(a, b) && !s.precedes(b, a));
    if seq_parts.len() > 1 {
        let below_all = |p: u64, q: u64| bits::iter(q).all(|b| s.below(b) & p == p);
        let outside_causes = |p: u64| bits::iter(p).fold(0u64, |acc, e| acc | s.below(e)) & !p;
        seq_parts.sort_by_key(|&p| outside_causes(p).count_ones());
        let chained = seq_parts.windows(2).all(|w| below_all(w[0], w[1]));
        return if chained { fold(seq_parts, Term::seq) } else { None };
    }
    None
}

/// Connected components of the graph on `members` with edges where `edge(a, b)`.
fn components(members: &[EventId], edge: impl Fn(EventId, EventId) -> bool) -> Vec<u64> {
    let mut seen = 0u64;
    let mut parts = Vec::new();
    for &start in members {
        if bits::contains(seen, start) {
            continue;
        }
        let mut part = bits::bit(start);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &b in members {
                if !bits::contains(part, b) && edge(a, b) {
                    part |= bits::bit(b);
                    stack.push(b);
                }
            }
        }
        seen |= part;
        parts.push(part);
    }
    parts
}
