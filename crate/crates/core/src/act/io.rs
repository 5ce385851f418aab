//! Text format for acts.
//!
//! ```text
//! monoid-file: diamond.monoid      # resolved relative to the act file
//! carrier: a b c
//! action:
//! 1: a b c
//! e: a a c
//! ...
//! ```
//!
//! Instead of `monoid-file:` the monoid may be given inline between
//! `begin monoid` and `end monoid`, in the monoid file format. The action
//! section has one row per monoid element, `name: images`, each image being a
//! carrier name; rows may come in any order but each element exactly once.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::{validate_act, Act, ActError};
use crate::monoid::io::{content_lines, parse_monoid_lines};
use crate::monoid::{parse_monoid, write_monoid, Monoid, MonoidFileError};

#[derive(Debug, Error)]
pub enum ActFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("monoid: {0}")]
    Monoid(#[from] MonoidFileError),
    #[error("cannot read monoid file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Invalid(#[from] ActError),
}

fn syntax(line: usize, message: impl Into<String>) -> ActFileError {
    ActFileError::Syntax { line, message: message.into() }
}

/// Where an act file takes its monoid from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoidSource {
    /// Path as written in the file.
    File(PathBuf),
    Inline,
}

/// Parses an act file; a `monoid-file:` reference is resolved against `base_dir`.
pub fn parse_act(text: &str, base_dir: &Path) -> Result<(Act, MonoidSource), ActFileError> {
    let mut lines = content_lines(text).peekable();
    let (ln, first) = lines.next().ok_or_else(|| syntax(0, "empty act file"))?;
    let (monoid, source) = if let Some(path) = first.strip_prefix("monoid-file:") {
        let path = PathBuf::from(path.trim());
        let full = base_dir.join(&path);
        let text = std::fs::read_to_string(&full).map_err(|source| ActFileError::Io { path: full, source })?;
        (parse_monoid(&text)?, MonoidSource::File(path))
    } else if first == "begin monoid" {
        let mut block = Vec::new();
        loop {
            match lines.next() {
                Some((_, "end monoid")) => break,
                Some(l) => block.push(l),
                None => return Err(syntax(ln, "unterminated `begin monoid` block")),
            }
        }
        (parse_monoid_lines(&mut block.into_iter().peekable())?, MonoidSource::Inline)
    } else {
        return Err(syntax(ln, "expected `monoid-file:` or `begin monoid`"));
    };
    let monoid = Arc::new(monoid);

    let (ln, line) = lines.next().ok_or_else(|| syntax(ln, "missing `carrier:` line"))?;
    let names: Vec<String> = line
        .strip_prefix("carrier:")
        .ok_or_else(|| syntax(ln, "expected `carrier:`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    if names.is_empty() {
        return Err(syntax(ln, "empty carrier"));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(syntax(ln, format!("duplicate point name `{n}`")));
        }
    }

    let (ln, line) = lines.next().ok_or_else(|| syntax(ln, "missing `action:` line"))?;
    if line != "action:" {
        return Err(syntax(ln, "expected `action:`"));
    }
    let mut rows: Vec<Option<Vec<usize>>> = vec![None; monoid.order()];
    for (ln, line) in lines {
        let (elem, imgs) = line.split_once(':').ok_or_else(|| syntax(ln, "expected `element: images`"))?;
        let s = monoid
            .element(elem.trim())
            .ok_or_else(|| syntax(ln, format!("unknown element `{}`", elem.trim())))?;
        if rows[s].is_some() {
            return Err(syntax(ln, format!("second row for `{}`", elem.trim())));
        }
        let row = imgs
            .split_whitespace()
            .map(|t| names.iter().position(|n| n == t).ok_or_else(|| syntax(ln, format!("unknown point `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != names.len() {
            return Err(syntax(ln, format!("row has {} entries, expected {}", row.len(), names.len())));
        }
        rows[s] = Some(row);
    }
    if let Some(s) = rows.iter().position(Option::is_none) {
        return Err(syntax(0, format!("no action row for `{}`", monoid.name(s))));
    }
    let act = validate_act(monoid, names, rows.into_iter().flatten().collect())?;
    Ok((act, source))
}

pub fn write_act(act: &Act, source: &MonoidSource) -> String {
    let mut s = String::new();
    match source {
        MonoidSource::File(path) => s.push_str(&format!("monoid-file: {}\n", path.display())),
        MonoidSource::Inline => {
            s.push_str("begin monoid\n");
            s.push_str(&write_monoid(act.monoid()));
            s.push_str("end monoid\n");
        }
    }
    s.push_str(&format!("carrier: {}\n", act.names().join(" ")));
    s.push_str("action:\n");
    let m: &Monoid = act.monoid();
    for e in m.elements() {
        let imgs: Vec<&str> = act.points().map(|a| act.name(act.act(e, a))).collect();
        s.push_str(&format!("{}: {}\n", m.name(e), imgs.join(" ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::act::enumerate_acts;
    use crate::act::fixtures::diamond_arc;
    use proptest::prelude::*;

    const INLINE: &str = "begin monoid
elements: 1 e f 0
identity: 1
table:
1 e f 0
e e 0 0
f 0 f 0
0 0 0 0
end monoid
carrier: x z
action:
1: x z
e: z z
f: z z
0: z z
";

    #[test]
    fn inline_round_trip() {
        let (act, src) = parse_act(INLINE, Path::new(".")).unwrap();
        assert_eq!(src, MonoidSource::Inline);
        assert_eq!(act.size(), 2);
        assert_eq!(write_act(&act, &src), INLINE);
    }

    #[test]
    fn monoid_file_reference() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("d.monoid"), write_monoid(&diamond_arc())).unwrap();
        let text = "monoid-file: d.monoid\ncarrier: p\naction:\n0: p\nf: p\ne: p\n1: p\n";
        let (act, src) = parse_act(text, dir.path()).unwrap();
        assert_eq!(src, MonoidSource::File("d.monoid".into()));
        assert_eq!(act.monoid().as_ref(), diamond_arc().as_ref());
        let again = write_act(&act, &src);
        assert_eq!(parse_act(&again, dir.path()).unwrap().0, act);
        assert!(matches!(parse_act(text, Path::new("/nonexistent")), Err(ActFileError::Io { .. })));
    }

    #[test]
    fn rejects_bad_files() {
        let missing_row = INLINE.replace("0: z z\n", "");
        assert!(matches!(parse_act(&missing_row, Path::new(".")), Err(ActFileError::Syntax { .. })));
        let dup_row = INLINE.replace("0: z z\n", "e: z z\n");
        assert!(matches!(parse_act(&dup_row, Path::new(".")), Err(ActFileError::Syntax { line: 15, .. })));
        let bad_point = INLINE.replace("e: z z", "e: z q");
        assert!(parse_act(&bad_point, Path::new(".")).is_err());
        let not_act = INLINE.replace("1: x z", "1: z z");
        assert!(matches!(parse_act(&not_act, Path::new(".")), Err(ActFileError::Invalid(_))));
        let no_end = INLINE.replace("end monoid\n", "");
        assert!(parse_act(&no_end, Path::new(".")).is_err());
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(size in 1usize..=3, pick in 0usize..1000) {
            let acts = enumerate_acts(&diamond_arc(), size);
            let act = &acts[pick % acts.len()];
            let text = write_act(act, &MonoidSource::Inline);
            prop_assert_eq!(&parse_act(&text, Path::new(".")).unwrap().0, act);
        }
    }
}
