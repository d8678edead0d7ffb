//! Text formats: tower files and graded-matrix blocks.
//!
//! Tower file grammar, one directive per line, `#` starts a comment:
//!
//! ```text
//! poset
//! node <id>
//! edge <pred> <succ>
//! tower
//! gen <grade> <v1> [v2 ...]
//! event <from> <to> <v> <w>
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::gf2::GradedMatrix;
use crate::poset::{Poset, PosetError};
use crate::tower::{PosetTower, TowerBuilder, TowerError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

impl ParseError {
    /// Line number of a syntax error.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } => Some(*line),
            _ => None,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(PartialEq)]
enum Section {
    Start,
    Poset,
    Tower,
}

/// Parses a tower file without running [`PosetTower::validate`].
pub fn parse_tower_unchecked(text: &str) -> Result<PosetTower, ParseError> {
    let mut section = Section::Start;
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut gens: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut events: Vec<(usize, [String; 4])> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, args)) = words.split_first() else {
            continue;
        };
        match (head, &section) {
            ("poset", Section::Start) if args.is_empty() => section = Section::Poset,
            ("tower", Section::Poset) if args.is_empty() => section = Section::Tower,
            (_, Section::Start) => return Err(syntax(line, "expected `poset` header")),
            ("node", Section::Poset) => match args {
                [id] => nodes.push(id.to_string()),
                _ => return Err(syntax(line, "usage: node <id>")),
            },
            ("edge", Section::Poset) => match args {
                [a, b] => edges.push((a.to_string(), b.to_string())),
                _ => return Err(syntax(line, "usage: edge <pred> <succ>")),
            },
            ("gen", Section::Tower) => match args {
                [grade, vs @ ..] if !vs.is_empty() => gens.push((
                    line,
                    grade.to_string(),
                    vs.iter().map(|v| v.to_string()).collect(),
                )),
                _ => return Err(syntax(line, "usage: gen <grade> <v1> [v2 ...]")),
            },
            ("event", Section::Tower) => match args {
                [a, b, v, w] => events.push((line, [a, b, v, w].map(|s| s.to_string()))),
                _ => return Err(syntax(line, "usage: event <from> <to> <v> <w>")),
            },
            (other, _) => {
                return Err(syntax(line, format!("unexpected directive `{other}`")));
            }
        }
    }
    if section == Section::Start {
        return Err(syntax(1, "expected `poset` header"));
    }

    let poset = Poset::new(&nodes, &edges)?;
    for (line, grade, _) in &gens {
        if poset.grade(grade).is_err() {
            return Err(syntax(*line, format!("unknown node `{grade}`")));
        }
    }
    for (line, [a, b, ..]) in &events {
        for g in [a, b] {
            if poset.grade(g).is_err() {
                return Err(syntax(*line, format!("unknown node `{g}`")));
            }
        }
    }
    let mut builder = TowerBuilder::new(poset);
    for (_, grade, vs) in &gens {
        builder.generator(grade, vs);
    }
    for (_, [a, b, v, w]) in &events {
        builder.event(a, b, v, w);
    }
    Ok(builder.build()?)
}

/// Parses and validates a tower file.
pub fn parse_tower(text: &str) -> Result<PosetTower, ParseError> {
    Ok(parse_tower_unchecked(text)?.validated()?)
}

/// Writes a tower in the format read by [`parse_tower`].
pub fn write_tower(tower: &PosetTower) -> String {
    let p = tower.poset();
    let mut out = String::from("poset\n");
    for name in p.names() {
        let _ = writeln!(out, "node {name}");
    }
    for &(x, y) in p.edges() {
        let _ = writeln!(out, "edge {} {}", p.name(x), p.name(y));
    }
    out.push_str("tower\n");
    for g in tower.generators() {
        let vs: Vec<&str> = g.simplex.iter().map(|&v| tower.vertex_name(v)).collect();
        let _ = writeln!(out, "gen {} {}", p.name(g.grade), vs.join(" "));
    }
    for e in tower.events() {
        let _ = writeln!(
            out,
            "event {} {} {} {}",
            p.name(e.from),
            p.name(e.to),
            tower.vertex_name(e.source),
            tower.vertex_name(e.target)
        );
    }
    out
}

/// Serializes a graded matrix block:
///
/// ```text
/// matrix <name> degree <L> rows <R> cols <C>
/// row <i> <label>@<grade>
/// col <j> <label>@<grade> : <row indices>
/// ```
pub fn write_matrix(name: &str, degree: usize, m: &GradedMatrix, poset: &Poset) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "matrix {name} degree {degree} rows {} cols {}",
        m.row_count(),
        m.col_count()
    );
    for (i, l) in m.row_labels().iter().enumerate() {
        let _ = writeln!(out, "row {i} {}@{}", l.name, poset.name(l.grade));
    }
    for (j, l) in m.col_labels().iter().enumerate() {
        let _ = write!(out, "col {j} {}@{} :", l.name, poset.name(l.grade));
        for r in m.entries().column(j) {
            let _ = write!(out, " {r}");
        }
        out.push('\n');
    }
    out
}

/// Lists each column by the labels of its nonzero rows:
/// `<col label>@<grade>: <row label>@<grade> ...`.
pub fn write_columns(m: &GradedMatrix, poset: &Poset) -> String {
    let mut out = String::new();
    for (j, l) in m.col_labels().iter().enumerate() {
        let _ = write!(out, "{}@{}:", l.name, poset.name(l.grade));
        for &r in m.entries().column(j) {
            let row = &m.row_labels()[r];
            let _ = write!(out, " {}@{}", row.name, poset.name(row.grade));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn round_trip_is_stable() {
        for text in [examples::COLLAPSE_TOWER, examples::TWO_TRIANGLES] {
            let t = parse_tower(text).unwrap();
            let once = write_tower(&t);
            let again = write_tower(&parse_tower(&once).unwrap());
            assert_eq!(once, again);
            assert_eq!(
                parse_tower(&once).unwrap().canonical_content(),
                t.canonical_content()
            );
        }
    }

    #[test]
    fn two_triangles_file_has_eight_generators() {
        let t = parse_tower(examples::TWO_TRIANGLES).unwrap();
        assert_eq!(t.generators().len(), 8);
        assert!(t.events().is_empty());
    }

    #[test]
    fn missing_header() {
        let err = parse_tower("node x0\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = parse_tower("").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = parse_tower("# comment\n\nnode x0\n").unwrap_err();
        assert_eq!(err.line(), Some(3));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let text = "poset\nnode x0\ntower\ngen x0\n";
        assert_eq!(parse_tower(text).unwrap_err().line(), Some(4));
        let text = "poset\nnode x0\nfoo\n";
        assert_eq!(parse_tower(text).unwrap_err().line(), Some(3));
        let text = "poset\nnode x0\ntower\ngen x9 v\n";
        assert_eq!(parse_tower(text).unwrap_err().line(), Some(4));
        let text = "poset\nnode x0\ntower\nnode x1\n";
        assert_eq!(parse_tower(text).unwrap_err().line(), Some(4));
    }

    #[test]
    fn fixed_point_event_rejected() {
        let text = examples::COLLAPSE_TOWER.replace("event x4 x5 v w", "event x4 x5 v v");
        assert!(matches!(
            parse_tower(&text),
            Err(ParseError::Tower(TowerError::FixedPointEvent { .. }))
        ));
    }

    #[test]
    fn comments_ignored() {
        let text = "poset # header\nnode a # first\n# whole line\ntower\ngen a v # vertex\n";
        let t = parse_tower(text).unwrap();
        assert_eq!(t.generators().len(), 1);
    }
}
