//! Text format for monoid tables.
//!
//! ```text
//! # comments start with '#'
//! elements: 1 e f 0
//! identity: 1
//! table:
//! 1 e f 0
//! e e 0 0
//! f 0 f 0
//! 0 0 0 0
//! ```
//!
//! Row `i`, column `j` holds the name of `elements[i] · elements[j]`.
//! Names are whitespace-free tokens. [`write_monoid`] emits exactly this
//! layout, so `parse_monoid(write_monoid(m)) == m`.

use super::{validate_monoid, Monoid, MonoidError, RawTable};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] MonoidError),
}

fn syntax(line: usize, message: impl Into<String>) -> MonoidFileError {
    MonoidFileError::Syntax { line, message: message.into() }
}

/// Lines with comments and blank lines removed, paired with 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_monoid(text: &str) -> Result<Monoid, MonoidFileError> {
    let mut lines = content_lines(text).peekable();
    parse_monoid_lines(&mut lines)
}

pub(crate) fn parse_monoid_lines<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Monoid, MonoidFileError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (ln, line) = lines.next().ok_or_else(|| syntax(0, "missing `elements:` line"))?;
    let names: Vec<String> = line
        .strip_prefix("elements:")
        .ok_or_else(|| syntax(ln, "expected `elements:`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    if names.is_empty() {
        return Err(syntax(ln, "no elements declared"));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(syntax(ln, format!("duplicate element name `{n}`")));
        }
    }
    let lookup = |ln: usize, tok: &str| {
        names.iter().position(|n| n == tok).ok_or_else(|| syntax(ln, format!("unknown element `{tok}`")))
    };

    let (ln, line) = lines.next().ok_or_else(|| syntax(ln, "missing `identity:` line"))?;
    let id_tok = line
        .strip_prefix("identity:")
        .ok_or_else(|| syntax(ln, "expected `identity:`"))?
        .trim();
    if id_tok.is_empty() || id_tok.contains(char::is_whitespace) {
        return Err(syntax(ln, "identity must be a single element name"));
    }
    let identity = lookup(ln, id_tok)?;

    let (ln, line) = lines.next().ok_or_else(|| syntax(ln, "missing `table:` line"))?;
    if line != "table:" {
        return Err(syntax(ln, "expected `table:`"));
    }
    let n = names.len();
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (ln, line) = lines.next().ok_or_else(|| syntax(ln, format!("missing table row {}", r + 1)))?;
        let row: Vec<usize> = line.split_whitespace().map(|t| lookup(ln, t)).collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(syntax(ln, format!("row has {} entries, expected {n}", row.len())));
        }
        rows.push(row);
    }
    Ok(validate_monoid(RawTable { names, identity, rows })?)
}

pub fn write_monoid(m: &Monoid) -> String {
    let mut s = String::new();
    s.push_str("elements: ");
    s.push_str(&m.names().join(" "));
    s.push('\n');
    s.push_str(&format!("identity: {}\n", m.name(m.identity())));
    s.push_str("table:\n");
    for a in m.elements() {
        let row: Vec<&str> = m.elements().map(|b| m.name(m.mul(a, b))).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::enumerate_monoids;
    use crate::monoid::fixtures::diamond;
    use proptest::prelude::*;

    #[test]
    fn reads_diamond() {
        let text = "# diamond\nelements: 1 e f 0\nidentity: 1\ntable:\n1 e f 0\ne e 0 0\nf 0 f 0\n0 0 0 0\n";
        assert_eq!(parse_monoid(text).unwrap(), diamond());
        assert_eq!(write_monoid(&diamond()), text.trim_start_matches("# diamond\n"));
    }

    #[test]
    fn strict_reader_rejects_bad_files() {
        let dup = "elements: 1 a a\nidentity: 1\ntable:\n1 a a\na a a\na a a\n";
        assert!(matches!(parse_monoid(dup), Err(MonoidFileError::Syntax { line: 1, .. })));
        let no_id = "elements: 1 a\ntable:\n1 a\na a\n";
        assert!(matches!(parse_monoid(no_id), Err(MonoidFileError::Syntax { line: 2, .. })));
        let ragged = "elements: 1 a\nidentity: 1\ntable:\n1 a\na\n";
        assert!(matches!(parse_monoid(ragged), Err(MonoidFileError::Syntax { line: 5, .. })));
        let unknown_id = "elements: 1 a\nidentity: z\ntable:\n1 a\na a\n";
        assert!(parse_monoid(unknown_id).is_err());
        let not_monoid = "elements: 1 a\nidentity: 1\ntable:\n1 a\n1 1\n";
        assert!(matches!(parse_monoid(not_monoid), Err(MonoidFileError::Invalid(_))));
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(idx in 0usize..35) {
            let m = &enumerate_monoids(4).unwrap()[idx];
            prop_assert_eq!(&parse_monoid(&write_monoid(m)).unwrap(), m);
        }
    }
}
