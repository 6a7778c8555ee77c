//! Line-oriented text formats for spaces (`gms v1`) and self-maps
//! (`gms-map v1`).
//!
//! Blank lines and lines starting with `#` are ignored. Errors carry the
//! 1-based line and column of the offending token.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::space::{AxiomProfile, Coefficient, DistanceTable, Kind, ThetaTable, DEFAULT_REL_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A parsed space file: the table plus the profile it claims.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFile {
    pub space: DistanceTable,
    pub profile: AxiomProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFile {
    pub images: Vec<usize>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.number, column, message: message.into() }
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.column + t.text.chars().count())
    }

    fn keyword(&self, kw: &str) -> Result<(), ParseError> {
        match self.tokens.first() {
            Some(t) if t.text == kw => Ok(()),
            Some(t) => Err(self.err(t.column, format!("expected `{kw}`, found `{}`", t.text))),
            None => Err(self.err(1, format!("expected `{kw}`"))),
        }
    }

    /// The single argument after the keyword.
    fn single(&self, kw: &str) -> Result<&Token<'a>, ParseError> {
        self.keyword(kw)?;
        match self.tokens.len() {
            2 => Ok(&self.tokens[1]),
            1 => Err(self.err(self.end_column(), format!("`{kw}` needs a value"))),
            _ => Err(self.err(self.tokens[2].column, "unexpected extra token")),
        }
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (col, (byte, ch)) in raw.char_indices().enumerate() {
            if ch.is_whitespace() {
                if let Some((s, c)) = start.take() {
                    tokens.push(Token { text: &raw[s..byte], column: c + 1 });
                }
            } else if start.is_none() {
                start = Some((byte, col));
            }
        }
        if let Some((s, c)) = start {
            tokens.push(Token { text: &raw[s..], column: c + 1 });
        }
        lines.push(Line { number: i + 1, tokens });
    }
    lines
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let last_line = text.lines().count().max(1);
        Self { lines: tokenize(text), pos: 0, last_line }
    }

    fn next(&mut self, what: &str) -> Result<&Line<'a>, ParseError> {
        match self.lines.get(self.pos) {
            Some(line) => {
                self.pos += 1;
                Ok(line)
            }
            None => Err(ParseError { line: self.last_line, column: 1, message: format!("unexpected end of file, expected {what}") }),
        }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }
}

fn parse_real(line: &Line<'_>, tok: &Token<'_>) -> Result<f64, ParseError> {
    let x: f64 = tok.text.parse().map_err(|_| line.err(tok.column, format!("`{}` is not a number", tok.text)))?;
    if !x.is_finite() {
        return Err(line.err(tok.column, format!("`{}` is not finite", tok.text)));
    }
    Ok(x)
}

fn parse_count(line: &Line<'_>, tok: &Token<'_>) -> Result<usize, ParseError> {
    tok.text.parse().map_err(|_| line.err(tok.column, format!("`{}` is not a nonnegative integer", tok.text)))
}

fn header(cur: &mut Cursor<'_>, magic: &str) -> Result<usize, ParseError> {
    let line = cur.next("header")?;
    let found: Vec<&str> = line.tokens.iter().map(|t| t.text).collect();
    if found.join(" ") != magic {
        return Err(line.err(1, format!("expected header `{magic}`")));
    }
    let line = cur.next("`points <n>`")?;
    let tok = line.single("points")?;
    let n = parse_count(line, tok)?;
    if n == 0 {
        return Err(line.err(tok.column, "a space needs at least one point"));
    }
    Ok(n)
}

type Rows = (Vec<Vec<f64>>, Vec<(usize, Vec<usize>)>);

/// Reads `n` rows of `n` reals; `prefix` is the leading keyword, if any.
fn read_rows(
    cur: &mut Cursor<'_>,
    n: usize,
    prefix: Option<&str>,
) -> Result<Rows, ParseError> {
    let mut rows = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    let what = prefix.map_or("a row of reals".to_string(), |p| format!("`{p} <{n} reals>`"));
    for _ in 0..n {
        let line = cur.next(&what)?;
        let skip = match prefix {
            Some(p) => {
                line.keyword(p)?;
                1
            }
            None => 0,
        };
        let values = &line.tokens[skip..];
        if values.len() != n {
            let col = values.get(n).map_or(line.end_column(), |t| t.column);
            return Err(line.err(col, format!("expected {n} values, found {}", values.len())));
        }
        let mut row = Vec::with_capacity(n);
        for tok in values {
            row.push(parse_real(line, tok)?);
        }
        rows.push(row);
        positions.push((line.number, values.iter().map(|t| t.column).collect()));
    }
    Ok((rows, positions))
}

pub fn parse_space(text: &str) -> Result<SpaceFile, ParseError> {
    let mut cur = Cursor::new(text);
    let n = header(&mut cur, "gms v1")?;

    let line = cur.next("`kind <kind>`")?;
    let tok = line.single("kind")?;
    let kind: Kind = tok.text.parse().map_err(|_| line.err(tok.column, format!("unknown kind `{}`", tok.text)))?;
    let kind_pos = (line.number, tok.column);

    let line = cur.next("`v <order>`")?;
    let tok = line.single("v")?;
    let v = parse_count(line, tok)?;
    if v == 0 {
        return Err(line.err(tok.column, "order v must be positive"));
    }

    let line = cur.next("`s <real>` or `theta inline`")?;
    let coefficient_pos = (line.number, line.tokens[0].column);
    let s = match line.tokens.first().map(|t| t.text) {
        Some("s") => Some(parse_real(line, line.single("s")?)?),
        Some("theta") => {
            let tok = line.single("theta")?;
            if tok.text != "inline" {
                return Err(line.err(tok.column, "expected `theta inline`"));
            }
            None
        }
        _ => return Err(line.err(1, "expected `s <real>` or `theta inline`")),
    };

    let (rows, positions) = read_rows(&mut cur, n, Some("d"))?;
    let space = DistanceTable::new(rows).map_err(|e| ParseError { line: positions[0].0, column: 1, message: e.to_string() })?;
    if let Some((i, j)) = space.first_asymmetry(DEFAULT_REL_TOL) {
        let (line, cols) = &positions[j];
        return Err(ParseError {
            line: *line,
            column: cols[i],
            message: format!("asymmetric table: d[{j}][{i}] = {} but d[{i}][{j}] = {}", space.get(j, i), space.get(i, j)),
        });
    }

    let theta = if s.is_none() {
        let (rows, positions) = read_rows(&mut cur, n, None)?;
        Some(ThetaTable::new(rows).map_err(|e| ParseError { line: positions[0].0, column: 1, message: e.to_string() })?)
    } else {
        None
    };

    let mut distinct = None;
    if cur.peek().is_some() {
        let line = cur.next("`distinct true|false`")?;
        let tok = line.single("distinct")?;
        distinct = Some(match tok.text {
            "true" => true,
            "false" => false,
            _ => return Err(line.err(tok.column, "expected `true` or `false`")),
        });
        if let Some(extra) = cur.peek() {
            return Err(extra.err(1, "unexpected content after `distinct`"));
        }
    }

    let profile = match (s, theta) {
        (Some(s), _) => AxiomProfile::new(kind, v, s),
        (None, Some(t)) => AxiomProfile::with_theta(kind, v, t),
        (None, None) => unreachable!(),
    };
    let profile = profile.map_err(|e| {
        let (line, column) = if kind.uses_theta() != s.is_none() { coefficient_pos } else { kind_pos };
        ParseError { line, column, message: e.to_string() }
    })?;
    let profile = match distinct {
        Some(d) => profile.with_distinct_chain(d),
        None => profile,
    };
    Ok(SpaceFile { space, profile })
}

pub fn parse_map(text: &str) -> Result<MapFile, ParseError> {
    let mut cur = Cursor::new(text);
    let n = header(&mut cur, "gms-map v1")?;
    let line = cur.next("`m <images>`")?;
    line.keyword("m")?;
    let values = &line.tokens[1..];
    if values.len() != n {
        let col = values.get(n).map_or(line.end_column(), |t| t.column);
        return Err(line.err(col, format!("expected {n} images, found {}", values.len())));
    }
    let mut images = Vec::with_capacity(n);
    for tok in values {
        let i = parse_count(line, tok)?;
        if i >= n {
            return Err(line.err(tok.column, format!("image {i} out of range for {n} points")));
        }
        images.push(i);
    }
    if let Some(extra) = cur.peek() {
        return Err(extra.err(1, "unexpected content after `m` line"));
    }
    Ok(MapFile { images })
}

fn write_row(out: &mut String, prefix: Option<&str>, row: &[f64]) -> fmt::Result {
    if let Some(p) = prefix {
        out.push_str(p);
        out.push(' ');
    }
    for (k, x) in row.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{x}")?;
    }
    out.push('\n');
    Ok(())
}

/// Writes a space file; `distinct` is emitted only when it differs from the
/// kind's default.
pub fn write_space(space: &DistanceTable, profile: &AxiomProfile) -> String {
    let mut out = String::new();
    let n = space.n();
    let _ = writeln!(out, "gms v1\npoints {n}\nkind {}\nv {}", profile.kind(), profile.v());
    match profile.coefficient() {
        Coefficient::Constant(s) => {
            let _ = writeln!(out, "s {s}");
        }
        Coefficient::Theta(_) => out.push_str("theta inline\n"),
    }
    for i in 0..n {
        let _ = write_row(&mut out, Some("d"), space.row(i));
    }
    if let Coefficient::Theta(t) = profile.coefficient() {
        for row in t.rows() {
            let _ = write_row(&mut out, None, &row);
        }
    }
    if profile.distinct_chain() != profile.kind().default_distinct_chain() {
        let _ = writeln!(out, "distinct {}", profile.distinct_chain());
    }
    out
}

pub fn write_map(images: &[usize]) -> String {
    let list: Vec<String> = images.iter().map(|i| i.to_string()).collect();
    format!("gms-map v1\npoints {}\nm {}\n", images.len(), list.join(" "))
}
