//! Recursive-descent parser for terms, inequalities and quasi-inequalities.
//!
//! Lexical conventions: lowercase identifiers are proposition letters, uppercase
//! identifiers are fixed point variables, `j<k>`/`m<k>` are nominals and co-nominals,
//! and an identifier followed by `(` is a connective application.

use thiserror::Error;

use super::signature::Signature;
use super::term::{BinderKind, Inequality, QuasiInequality, Term, TermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("at {pos}: unexpected character `{ch}`")]
    Lex { pos: usize, ch: char },
    #[error("at {pos}: expected {expected}, found {found}")]
    Syntax { pos: usize, expected: String, found: String },
    #[error("at {pos}: unknown connective `{name}`")]
    UnknownConnective { pos: usize, name: String },
    #[error("at {pos}: {source}")]
    Term {
        pos: usize,
        #[source]
        source: TermError,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Binder(BinderKind),
    LParen,
    RParen,
    Comma,
    Dot,
    Meet,
    Join,
    Leq,
    Amp,
    Implies,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Binder(k) => format!("`{}`", k.keyword()),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::Join => "`\\/`".into(),
            Tok::Leq => "`<=`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            '.' => out.push((start, Tok::Dot)),
            '&' => out.push((start, Tok::Amp)),
            '/' if bytes.get(i + 1) == Some(&b'\\') => {
                out.push((start, Tok::Meet));
                i += 1;
            }
            '\\' if bytes.get(i + 1) == Some(&b'/') => {
                out.push((start, Tok::Join));
                i += 1;
            }
            '<' if bytes.get(i + 1) == Some(&b'=') => {
                out.push((start, Tok::Leq));
                i += 1;
            }
            '=' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Implies));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                if i + 1 < bytes.len() && bytes[i] == b'#' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let word = &text[start..i];
                let star = bytes.get(i) == Some(&b'*');
                let tok = match (word, star) {
                    ("mu", true) => {
                        i += 1;
                        Tok::Binder(BinderKind::MuStar)
                    }
                    ("nu", true) => {
                        i += 1;
                        Tok::Binder(BinderKind::NuStar)
                    }
                    ("mu", false) => Tok::Binder(BinderKind::Mu),
                    ("nu", false) => Tok::Binder(BinderKind::Nu),
                    ("mu2", _) => Tok::Binder(BinderKind::Mu2),
                    ("nu2", _) => Tok::Binder(BinderKind::Nu2),
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
                continue;
            }
            other => {
                let ch = text[start..].chars().next().unwrap_or(other);
                return Err(ParseError::Lex { pos: start, ch });
            }
        }
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

fn indexed(word: &str, prefix: char) -> Option<u32> {
    let rest = word.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Parser<'s> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'s Signature,
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax { pos: self.offset(), expected: expected.into(), found: self.peek().describe() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if let Tok::Binder(kind) = *self.peek() {
            let at = self.offset();
            self.bump();
            let var = match self.bump() {
                Tok::Ident(x) if x.starts_with(|c: char| c.is_ascii_uppercase()) => x,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("fixed point variable"));
                }
            };
            self.expect(Tok::Dot, "`.`")?;
            let body = self.term()?;
            return Term::binder(kind, var, body).map_err(|source| ParseError::Term { pos: at, source });
        }
        self.or()
    }

    fn or(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Join {
            self.bump();
            let rhs = self.and()?;
            acc = Term::join(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Meet {
            self.bump();
            let rhs = self.atom()?;
            acc = Term::meet(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(word) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let conn = self
                        .sig
                        .get(&word)
                        .cloned()
                        .ok_or(ParseError::UnknownConnective { pos: at, name: word.clone() })?;
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.term()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.term()?);
                        }
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    return Term::app(conn, args).map_err(|source| ParseError::Term { pos: at, source });
                }
                Ok(match word.as_str() {
                    "bot" => Term::Bot,
                    "top" => Term::Top,
                    _ => {
                        if let Some(k) = indexed(&word, 'j') {
                            Term::Nom(k)
                        } else if let Some(k) = indexed(&word, 'm') {
                            Term::CoNom(k)
                        } else if let Some(c) = self.sig.get(&word).filter(|c| c.arity() == 0) {
                            Term::App(c.clone(), Vec::new())
                        } else if word.starts_with(|c: char| c.is_ascii_uppercase()) {
                            Term::FpVar(word)
                        } else if word.contains('#') {
                            return Err(ParseError::UnknownConnective { pos: at, name: word });
                        } else {
                            Term::Prop(word)
                        }
                    }
                })
            }
            _ => Err(self.error("term")),
        }
    }

    fn inequality(&mut self) -> Result<Inequality, ParseError> {
        let lhs = self.term()?;
        self.expect(Tok::Leq, "`<=`")?;
        let rhs = self.term()?;
        Ok(Inequality::new(lhs, rhs))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }
}

fn parser<'s>(text: &str, sig: &'s Signature) -> Result<Parser<'s>, ParseError> {
    Ok(Parser { toks: lex(text)?, pos: 0, sig })
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = parser(text, sig)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_inequality(text: &str, sig: &Signature) -> Result<Inequality, ParseError> {
    let mut p = parser(text, sig)?;
    let i = p.inequality()?;
    p.finish()?;
    Ok(i)
}

/// `i1 & i2 & ... => i0`, or `=> i0` with no antecedents.
pub fn parse_quasi(text: &str, sig: &Signature) -> Result<QuasiInequality, ParseError> {
    let mut p = parser(text, sig)?;
    let mut antecedents = Vec::new();
    if *p.peek() != Tok::Implies {
        antecedents.push(p.inequality()?);
        while *p.peek() == Tok::Amp {
            p.bump();
            antecedents.push(p.inequality()?);
        }
    }
    p.expect(Tok::Implies, "`=>`")?;
    let consequent = p.inequality()?;
    p.finish()?;
    Ok(QuasiInequality::new(antecedents, consequent))
}

/// Any of the three syntactic categories.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Term(Term),
    Inequality(Inequality),
    Quasi(QuasiInequality),
}

pub fn parse(text: &str, sig: &Signature) -> Result<Parsed, ParseError> {
    let toks = lex(text)?;
    if toks.iter().any(|(_, t)| *t == Tok::Implies) {
        return parse_quasi(text, sig).map(Parsed::Quasi);
    }
    if toks.iter().any(|(_, t)| *t == Tok::Leq) {
        return parse_inequality(text, sig).map(Parsed::Inequality);
    }
    parse_term(text, sig).map(Parsed::Term)
}
