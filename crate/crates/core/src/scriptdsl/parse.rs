use thiserror::Error;

use super::{BlowUpSite, Expectation, Header, Move, MoveScript, Statement, StatementKind};
use crate::handlecalc::Torsion;
use crate::numbers::{parse_rational, LensSpace, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownMove,
    Arity,
}

/// A diagnostic with a 1-based line, column and token index.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, col {col}: {} at token {token}: {message}", kind_name(*.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
    pub token: usize,
    pub message: String,
}

fn kind_name(kind: ParseErrorKind) -> &'static str {
    match kind {
        ParseErrorKind::Syntax => "syntax error",
        ParseErrorKind::UnknownMove => "unknown move",
        ParseErrorKind::Arity => "arity error",
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub text: String,
    pub col: usize,
}

/// Splits on whitespace outside `[...]` and `(...)`.
pub(crate) fn tokenize(line: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut depth = 0i32;
    for (i, c) in line.chars().enumerate() {
        if c.is_whitespace() && depth <= 0 {
            if !current.is_empty() {
                tokens.push(Token { text: std::mem::take(&mut current), col: start + 1 });
            }
            continue;
        }
        if current.is_empty() {
            start = i;
        }
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if !c.is_whitespace() {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(Token { text: current, col: start + 1 });
    }
    tokens
}

struct Line<'a> {
    number: usize,
    tokens: &'a [Token],
    pos: usize,
    end_col: usize,
}

impl<'a> Line<'a> {
    fn err(&self, kind: ParseErrorKind, token: usize, message: impl Into<String>) -> ParseError {
        let col = match token.checked_sub(1).and_then(|i| self.tokens.get(i)) {
            Some(t) => t.col,
            None => self.end_col,
        };
        ParseError { kind, line: self.number, col, token, message: message.into() }
    }

    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).map(|t| t.text.as_str())
    }

    /// Next token, or an arity error pointing at the last token present.
    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.text.as_str())
            }
            None => Err(self.err(
                ParseErrorKind::Arity,
                self.tokens.len(),
                format!("`{}` is missing {what}", self.tokens[0].text),
            )),
        }
    }

    fn current(&self) -> usize {
        self.pos
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax, self.pos, message)
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let got = self.next(&format!("`{word}`"))?;
        if got != word {
            return Err(self.syntax(format!("expected `{word}`, found `{got}`")));
        }
        Ok(())
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.peek() == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn label(&mut self, what: &str) -> Result<String, ParseError> {
        let t = self.next(what)?;
        check_label(t).map_err(|m| self.syntax(m))?;
        Ok(t.to_string())
    }

    fn optional_label(&mut self, what: &str) -> Result<Option<String>, ParseError> {
        let t = self.next(what)?;
        if t == "_" {
            return Ok(None);
        }
        check_label(t).map_err(|m| self.syntax(m))?;
        Ok(Some(t.to_string()))
    }

    fn integer(&mut self, what: &str) -> Result<i64, ParseError> {
        let t = self.next(what)?;
        t.parse().map_err(|_| self.syntax(format!("expected an integer for {what}, found `{t}`")))
    }

    fn assignment(&mut self, key: &str) -> Result<i64, ParseError> {
        let t = self.next(&format!("`{key}=`"))?;
        let value = t
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| self.syntax(format!("expected `{key}=...`, found `{t}`")))?;
        value.parse().map_err(|_| self.syntax(format!("expected an integer in `{t}`")))
    }

    fn label_list(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        let t = self.next(what)?;
        let items = bracket_items(t).ok_or_else(|| self.syntax(format!("expected `[a,b,...]`, found `{t}`")))?;
        for item in &items {
            check_label(item).map_err(|m| self.syntax(m))?;
        }
        Ok(items)
    }

    /// `label:int(:int)*` items until the end of the line or a keyword.
    fn colon_items(&mut self, parts: usize, stop: &[&str]) -> Result<Vec<(String, Vec<i64>)>, ParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if stop.contains(&t) {
                break;
            }
            self.pos += 1;
            let fields: Vec<&str> = t.split(':').collect();
            let bad = || self.syntax(format!("expected {} colon-separated fields in `{t}`", parts + 1));
            if fields.len() != parts + 1 {
                return Err(bad());
            }
            check_label(fields[0]).map_err(|m| self.syntax(m))?;
            let values: Vec<i64> =
                fields[1..].iter().map(|f| f.parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
            out.push((fields[0].to_string(), values));
        }
        if out.is_empty() {
            return Err(self.err(ParseErrorKind::Arity, self.pos, "expected at least one item"));
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(self.err(ParseErrorKind::Syntax, self.pos + 1, format!("unexpected `{}`", t.text))),
        }
    }
}

fn check_label(text: &str) -> Result<(), String> {
    let mut chars = text.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && text != "_";
    if ok {
        Ok(())
    } else {
        Err(format!("`{text}` is not a valid label"))
    }
}

fn bracket_items(text: &str) -> Option<Vec<String>> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    Some(split_top_level(inner).into_iter().map(|s| s.trim().to_string()).collect())
}

/// Splits on commas that are not nested inside brackets or parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn strip_comment(line: &str) -> &str {
    let trimmed = line.trim_start();
    if trimmed.starts_with("note ") || trimmed == "note" {
        return line;
    }
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_script(text: &str) -> Result<MoveScript, ParseError> {
    let mut header = None;
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = strip_comment(raw);
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let end_col = content.trim_end().chars().count() + 1;
        let mut line = Line { number, tokens: &tokens, pos: 0, end_col };
        match header {
            None => {
                line.keyword("manifold").map_err(|e| {
                    if e.kind == ParseErrorKind::Syntax {
                        line.syntax("a script must start with `manifold ...`")
                    } else {
                        e
                    }
                })?;
                let h = parse_header(&mut line)?;
                line.finish()?;
                header = Some((h, number));
            }
            Some(_) => {
                let kind = parse_statement(&mut line, content)?;
                line.finish()?;
                statements.push(Statement { line: number, kind });
            }
        }
    }
    let (header, header_line) = header.ok_or(ParseError {
        kind: ParseErrorKind::Syntax,
        line: 1,
        col: 1,
        token: 0,
        message: "empty script; expected `manifold ...`".into(),
    })?;
    Ok(MoveScript { header, header_line, statements })
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = text.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn parse_header(line: &mut Line) -> Result<Header, ParseError> {
    let t = line.next("a manifold constructor")?;
    let ints = |args: Vec<&str>| -> Option<Vec<i64>> { args.iter().map(|a| a.parse().ok()).collect() };
    let header = match t {
        "empty" => Some(Header::Empty),
        "given" => Some(Header::Given),
        _ => {
            if let Some(args) = call_args(t, "V") {
                ints(args).filter(|v| v.len() == 1).map(Header::Linear)
            } else if let Some(args) = call_args(t, "chain") {
                ints(args).filter(|v| !v.is_empty()).map(Header::Linear)
            } else if let Some(args) = call_args(t, "B") {
                ints(args).filter(|v| v.len() == 1).map(|v| Header::Ball(v[0]))
            } else if let Some(args) = call_args(t, "E") {
                ints(args).filter(|v| v.len() == 1).map(|v| Header::Elliptic(v[0]))
            } else {
                None
            }
        }
    };
    header.ok_or_else(|| {
        line.err(
            ParseErrorKind::Syntax,
            line.current(),
            format!("unknown manifold `{t}`; expected V(a), chain(a,...), B(n), E(m), empty or given"),
        )
    })
}

fn parse_statement(line: &mut Line, content: &str) -> Result<StatementKind, ParseError> {
    let word = line.next("a statement")?;
    match word {
        "expect" => parse_expect(line).map(StatementKind::Expect),
        "note" => {
            let text = content.trim_start().strip_prefix("note").unwrap_or("").trim().to_string();
            line.pos = line.tokens.len();
            Ok(StatementKind::Note(text))
        }
        "manifold" => Err(line.err(ParseErrorKind::Syntax, 1, "only one `manifold` header is allowed")),
        _ => parse_move(line, word).map(StatementKind::Move),
    }
}

fn parse_move(line: &mut Line, word: &str) -> Result<Move, ParseError> {
    Ok(match word {
        "blowup" => {
            let site = if line.eat("vertex") {
                let label = line.label("a vertex label")?;
                let mult = if line.eat("mult") { line.integer("the multiplicity")? } else { 1 };
                BlowUpSite::Vertex { label, mult }
            } else if line.eat("edge") {
                BlowUpSite::Edge { a: line.label("the first edge end")?, b: line.label("the second edge end")? }
            } else {
                BlowUpSite::Isolated
            };
            let label = if line.eat("as") { line.optional_label("the new label")? } else { None };
            Move::BlowUp { site, label }
        }
        "blowdown" => Move::BlowDown { label: line.label("a handle label")? },
        "slide" => {
            let handle = line.label("the sliding handle")?;
            line.keyword("over")?;
            let over = line.label("the handle to slide over")?;
            let sign = match line.peek() {
                Some("+") => 1,
                Some("-") => -1,
                _ => 1,
            };
            if matches!(line.peek(), Some("+") | Some("-")) {
                line.pos += 1;
            }
            Move::Slide { handle, over, sign }
        }
        "uncancelpair" => {
            let (one, two) = if line.eat("as") {
                (line.optional_label("the 1-handle label")?, line.optional_label("the 2-handle label")?)
            } else {
                (None, None)
            };
            let links = if line.eat("link") {
                line.colon_items(1, &[])?.into_iter().map(|(l, v)| (l, v[0])).collect()
            } else {
                Vec::new()
            };
            Move::UncancelPair { one, two, links }
        }
        "cancelpair" => {
            Move::CancelPair { one: line.label("the 1-handle label")?, two: line.label("the 2-handle label")? }
        }
        "rbd" => {
            line.keyword("chain")?;
            let chain = line.label_list("the chain")?;
            let n = line.assignment("n")?;
            let name = if line.eat("as") { line.optional_label("the piece name")? } else { None };
            Move::Rbd { chain, n, name }
        }
        "rbu" => {
            let piece = line.label("the piece name")?;
            let n = line.assignment("n")?;
            let chain = if line.eat("chain") { Some(line.label_list("the chain labels")?) } else { None };
            let couplings = if line.eat("couple") {
                let mut out = Vec::new();
                for (l, v) in line.colon_items(2, &[])? {
                    if v[0] < 1 {
                        return Err(line.syntax(format!("chain position {} must be at least 1", v[0])));
                    }
                    out.push((l, v[0] as usize, v[1]));
                }
                out
            } else {
                Vec::new()
            };
            Move::Rbu { piece, n, chain, couplings }
        }
        "unseal" => {
            let piece = line.label("the piece name")?;
            let (one, two) = if line.eat("as") {
                (line.optional_label("the 1-handle label")?, line.optional_label("the 2-handle label")?)
            } else {
                (None, None)
            };
            let couplings = if line.eat("couple") {
                line.colon_items(2, &[])?.into_iter().map(|(l, v)| (l, v[0], v[1])).collect()
            } else {
                Vec::new()
            };
            Move::Unseal { piece, one, two, couplings }
        }
        "seal" => {
            let one = line.label("the 1-handle label")?;
            let two = line.label("the 2-handle label")?;
            let name = if line.eat("as") { line.optional_label("the piece name")? } else { None };
            Move::Seal { one, two, name }
        }
        other => return Err(line.err(
            ParseErrorKind::UnknownMove,
            1,
            format!(
                "`{other}` is not a move (blowup, blowdown, slide, cancelpair, uncancelpair, rbd, rbu, unseal, seal)"
            ),
        )),
    })
}

fn parse_expect(line: &mut Line) -> Result<Vec<Expectation>, ParseError> {
    let mut out = Vec::new();
    while line.peek().is_some() {
        let t = line.next("an assertion")?;
        let (key, value) =
            t.split_once('=').ok_or_else(|| line.syntax(format!("expected `key=value`, found `{t}`")))?;
        let bad = |what: &str| line.syntax(format!("cannot read {what} from `{value}`"));
        let int = || value.parse::<i64>().map_err(|_| bad("an integer"));
        let e = match key {
            "b1" => Expectation::B1(int()?),
            "b2" => Expectation::B2(int()?),
            "euler" | "chi" => Expectation::Euler(int()?),
            "sigma" => Expectation::Sigma(int()?),
            "handles" => Expectation::Handles(int()?),
            "onehandles" => Expectation::OneHandles(int()?),
            "det" => Expectation::Det(parse_rational(value).ok_or_else(|| bad("a rational"))?),
            "torsion" => Expectation::Torsion(parse_torsion(value).ok_or_else(|| bad("a torsion list"))?),
            "boundary" => Expectation::Boundary(if value == "none" {
                None
            } else {
                Some(value.parse::<LensSpace>().map_err(|_| bad("a lens space"))?)
            }),
            "form" => Expectation::Form(parse_matrix(value).ok_or_else(|| bad("a matrix"))?),
            "pieces" => {
                let mut items = bracket_items(value).ok_or_else(|| bad("a piece list"))?;
                items.sort();
                Expectation::Pieces(items)
            }
            _ => match key.strip_prefix("cn(").and_then(|r| r.strip_suffix(')')).and_then(|n| n.parse().ok()) {
                Some(n) => Expectation::Cn { n, count: int()? },
                None => return Err(line.syntax(format!("unknown invariant `{key}`"))),
            },
        };
        out.push(e);
    }
    if out.is_empty() {
        return Err(line.err(ParseErrorKind::Arity, 1, "`expect` needs at least one key=value"));
    }
    Ok(out)
}

fn parse_torsion(text: &str) -> Option<Torsion> {
    if text == "?" || text == "indeterminate" {
        return Some(Torsion::Indeterminate);
    }
    let mut items: Vec<u64> = bracket_items(text)?.iter().map(|s| s.parse().ok()).collect::<Option<_>>()?;
    items.sort_unstable();
    Some(Torsion::Known(items))
}

fn parse_matrix(text: &str) -> Option<Vec<Vec<Rational>>> {
    let rows = bracket_items(text)?;
    let matrix: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| bracket_items(r)?.iter().map(|x| parse_rational(x)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    if matrix.iter().any(|r| r.len() != matrix.len()) {
        return None;
    }
    Some(matrix)
}
