//! Formula grammar:
//!
//! ```text
//! formula := [ "exists" var+ ":" ] atom ( "&" atom )*
//! atom    := term "=" term
//! term    := [ coef "*" ] var
//! ```
//!
//! `coef` is a monoid element name and a bare variable has coefficient 1.
//! Names are runs of characters other than whitespace and `* = & :`.
//! Free variables are ordered by first occurrence unless listed explicitly.

use thiserror::Error;

use super::{Atom, Formula, Term};
use crate::monoid::Monoid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("position {pos}: unknown coefficient `{name}`")]
    UnknownCoefficient { name: String, pos: usize },
    #[error("position {pos}: variable `{name}` is neither free nor bound")]
    UnboundVariable { name: String, pos: usize },
    #[error("position {pos}: {message}")]
    SyntaxError { pos: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Name(&'a str),
    Star,
    Eq,
    And,
    Colon,
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let single = match c {
            '*' => Some(Tok::Star),
            '=' => Some(Tok::Eq),
            '&' => Some(Tok::And),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            chars.next();
        } else if c.is_whitespace() {
            chars.next();
        } else {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || "*=&:".contains(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push((i, Tok::Name(&text[i..end])));
        }
    }
    out
}

struct Parser<'a, 'm> {
    toks: Vec<(usize, Tok<'a>)>,
    k: usize,
    end: usize,
    monoid: &'m Monoid,
    free: Vec<String>,
    bound: Vec<String>,
    fixed_free: bool,
}

impl<'a> Parser<'a, '_> {
    fn pos(&self) -> usize {
        self.toks.get(self.k).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.k).map(|t| &t.1)
    }

    fn err(&self, message: &str) -> ParseError {
        ParseError::SyntaxError { pos: self.pos(), message: message.into() }
    }

    fn expect(&mut self, t: Tok<'a>, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.k += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {what}")))
        }
    }

    fn name(&mut self) -> Result<(usize, &'a str), ParseError> {
        match self.toks.get(self.k) {
            Some(&(p, Tok::Name(n))) => {
                self.k += 1;
                Ok((p, n))
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn variable(&mut self, pos: usize, name: &str) -> Result<usize, ParseError> {
        if let Some(i) = self.bound.iter().position(|b| b == name) {
            return Ok(self.free.len() + i);
        }
        if let Some(i) = self.free.iter().position(|f| f == name) {
            return Ok(i);
        }
        if self.fixed_free {
            return Err(ParseError::UnboundVariable { name: name.into(), pos });
        }
        self.free.push(name.into());
        Ok(self.free.len() - 1)
    }

    fn term(&mut self) -> Result<(usize, Term), ParseError> {
        let (pos, first) = self.name()?;
        if self.peek() == Some(&Tok::Star) {
            self.k += 1;
            let coef = self
                .monoid
                .element(first)
                .ok_or_else(|| ParseError::UnknownCoefficient { name: first.into(), pos })?;
            let (vpos, v) = self.name()?;
            Ok((vpos, Term { coef, var: self.var_placeholder(vpos, v)? }))
        } else {
            Ok((pos, Term { coef: self.monoid.identity(), var: self.var_placeholder(pos, first)? }))
        }
    }

    /// Variables are resolved after the whole text is read, since bound
    /// indices depend on the final number of free variables. Until then a
    /// bound variable `i` is stored as `usize::MAX - i`.
    fn var_placeholder(&mut self, pos: usize, name: &str) -> Result<usize, ParseError> {
        if let Some(i) = self.bound.iter().position(|b| b == name) {
            return Ok(usize::MAX - i);
        }
        self.variable(pos, name)
    }
}

/// Parses with free variables ordered by first occurrence.
pub fn parse_formula(text: &str, m: &Monoid) -> Result<Formula, ParseError> {
    parse(text, m, None)
}

/// Parses with a fixed free-variable list; unlisted, unbound names are errors.
pub fn parse_formula_with_free(text: &str, m: &Monoid, free: &[&str]) -> Result<Formula, ParseError> {
    parse(text, m, Some(free))
}

fn parse(text: &str, m: &Monoid, free: Option<&[&str]>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: tokenize(text),
        k: 0,
        end: text.len(),
        monoid: m,
        free: free.map(|f| f.iter().map(|s| s.to_string()).collect()).unwrap_or_default(),
        bound: Vec::new(),
        fixed_free: free.is_some(),
    };
    if p.peek() == Some(&Tok::Name("exists")) {
        p.k += 1;
        while let Some(Tok::Name(_)) = p.peek() {
            let (pos, n) = p.name()?;
            if p.bound.iter().any(|b| b == n) || p.free.iter().any(|f| f == n) {
                return Err(ParseError::SyntaxError { pos, message: format!("variable `{n}` declared twice") });
            }
            p.bound.push(n.into());
        }
        if p.bound.is_empty() {
            return Err(p.err("`exists` needs at least one variable"));
        }
        p.expect(Tok::Colon, "`:` after the quantified variables")?;
    }
    let mut atoms = Vec::new();
    loop {
        let (_, lhs) = p.term()?;
        p.expect(Tok::Eq, "`=`")?;
        let (_, rhs) = p.term()?;
        atoms.push(Atom { lhs, rhs });
        match p.peek() {
            None => break,
            Some(Tok::And) => p.k += 1,
            Some(_) => return Err(p.err("expected `&` or end of formula")),
        }
    }
    let nfree = p.free.len();
    let fix = |t: Term| Term { coef: t.coef, var: if t.var > usize::MAX / 2 { nfree + (usize::MAX - t.var) } else { t.var } };
    let atoms = atoms.into_iter().map(|a| Atom { lhs: fix(a.lhs), rhs: fix(a.rhs) }).collect();
    Formula::new(p.free, p.bound, atoms).map_err(|e| ParseError::SyntaxError { pos: 0, message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::fixtures::diamond;

    #[test]
    fn probe_formula() {
        let d = diamond();
        let phi = parse_formula("exists u : e*u = x & f*u = y", &d).unwrap();
        assert_eq!(phi.free_names(), &["x", "y"]);
        assert_eq!(phi.bound_names(), &["u"]);
        let (e, f) = (d.element("e").unwrap(), d.element("f").unwrap());
        assert_eq!(phi.atoms(), &[Atom::new(e, 2, 0, 0), Atom::new(f, 2, 0, 1)]);
    }

    #[test]
    fn bare_equality() {
        let d = diamond();
        let phi = parse_formula("x = y", &d).unwrap();
        assert_eq!(phi.atoms(), &[Atom::new(0, 0, 0, 1)]);
        let phi = parse_formula("x=x", &d).unwrap();
        assert_eq!(phi.free_count(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let d = diamond();
        assert_eq!(
            parse_formula("exists u : q*u = x", &d).unwrap_err(),
            ParseError::UnknownCoefficient { name: "q".into(), pos: 11 }
        );
        assert_eq!(
            parse_formula_with_free("x = z", &d, &["x"]).unwrap_err(),
            ParseError::UnboundVariable { name: "z".into(), pos: 4 }
        );
        assert!(matches!(parse_formula("x = ", &d), Err(ParseError::SyntaxError { pos: 4, .. })));
        assert!(matches!(parse_formula("x y", &d), Err(ParseError::SyntaxError { pos: 2, .. })));
        assert!(matches!(parse_formula("exists : x = x", &d), Err(ParseError::SyntaxError { .. })));
        assert!(matches!(parse_formula("", &d), Err(ParseError::SyntaxError { pos: 0, .. })));
        assert!(parse_formula("exists u u : u = x", &d).is_err());
    }

    #[test]
    fn explicit_free_order() {
        let d = diamond();
        let phi = parse_formula_with_free("e*y = x", &d, &["x", "y"]).unwrap();
        assert_eq!(phi.atoms(), &[Atom::new(1, 1, 0, 0)]);
        // a listed variable need not occur
        let phi = parse_formula_with_free("x = x", &d, &["x", "p"]).unwrap();
        assert_eq!(phi.free_count(), 2);
    }
}
