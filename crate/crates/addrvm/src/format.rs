//! Session files.
//!
//! ```text
//! addrvm v1
//! // comments run to the end of the line
//! machine NAME { regs = [_, @a, #3]; prog = "Load 0; Call 0"; tape = [@a]; }
//! term NAME = "\x y.x @a";
//! context NAME { regs = [@xi]; prog = "Call 0"; tape = [@h]; }
//! hole NAME { tape = [@a]; }
//! ```
//!
//! The first line must be the header `addrvm v1`. Names are made of ASCII
//! letters, digits, `_` and `'`. A reference is `@name`, naming an earlier
//! definition or a prelude machine, or `#n`, a raw table id; `_` is an empty
//! register. Inside contexts `@xi` is the bare hole. Fields of a block may
//! appear in any order and default to empty; the canonical form written by
//! [`print`] lists all three in the order `regs`, `prog`, `tape`, one
//! definition per line.

use std::fmt::{self, Write as _};

use addrvm_core::{parse_program, Program};
use thiserror::Error;

pub const HEADER: &str = "addrvm v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ref {
    Name(String),
    Raw(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Name(n) => write!(f, "@{n}"),
            Ref::Raw(id) => write!(f, "#{id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Fields {
    pub regs: Vec<Option<Ref>>,
    pub prog: Program,
    pub tape: Vec<Ref>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Machine { name: String, fields: Fields },
    Context { name: String, fields: Fields },
    Hole { name: String, tape: Vec<Ref> },
    Term { name: String, source: String },
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Machine { name, .. }
            | Item::Context { name, .. }
            | Item::Hole { name, .. }
            | Item::Term { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Document {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && s != "_" && s.chars().all(is_name_char)
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Lexer<'s> {
    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { line, col, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_trivia();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> &'s str {
        self.skip_trivia();
        let rest = self.rest();
        let len = rest.find(|c| !is_name_char(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let w = self.word();
        if is_valid_name(w) {
            Ok(w.to_string())
        } else {
            Err(self.error_at(start, "expected a name"))
        }
    }

    fn string(&mut self) -> Result<(String, usize), ParseError> {
        self.expect('"')?;
        let start = self.pos;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok((out, start));
                }
                '\\' => match chars.clone().next() {
                    Some((_, e @ ('"' | '\\'))) => {
                        chars.next();
                        out.push(e);
                    }
                    _ => out.push('\\'),
                },
                c => out.push(c),
            }
        }
        Err(self.error_at(start - 1, "unterminated string"))
    }

    fn reference(&mut self) -> Result<Ref, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let w = self.word();
                if is_valid_name(w) {
                    Ok(Ref::Name(w.to_string()))
                } else {
                    Err(self.error_at(start, "expected a name after '@'"))
                }
            }
            Some('#') => {
                self.pos += 1;
                let rest = self.rest();
                let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                let id = rest[..len].parse().map_err(|_| self.error_at(start, "expected an id after '#'"))?;
                self.pos += len;
                Ok(Ref::Raw(id))
            }
            _ => Err(self.error("expected '@name' or '#id'")),
        }
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.error("expected ',' or ']'")),
            }
        }
    }

    fn register(&mut self) -> Result<Option<Ref>, ParseError> {
        if self.peek() == Some('_') {
            let start = self.pos;
            if self.word() == "_" {
                return Ok(None);
            }
            return Err(self.error_at(start, "expected '_', '@name' or '#id'"));
        }
        self.reference().map(Some)
    }

    /// `{ field = value; ... }`, restricted to the fields in `allowed`.
    fn block(&mut self, allowed: &[&str]) -> Result<Fields, ParseError> {
        self.expect('{')?;
        let mut fields = Fields::default();
        let mut seen: Vec<String> = Vec::new();
        while self.peek() != Some('}') {
            let start = self.pos;
            let key = self.word().to_string();
            if !allowed.contains(&key.as_str()) {
                return Err(self.error_at(start, format!("unknown field '{key}'")));
            }
            if seen.contains(&key) {
                return Err(self.error_at(start, format!("field '{key}' given twice")));
            }
            self.expect('=')?;
            match key.as_str() {
                "regs" => fields.regs = self.list(Self::register)?,
                "tape" => fields.tape = self.list(Self::reference)?,
                _ => {
                    let (text, at) = self.string()?;
                    fields.prog =
                        parse_program(&text).map_err(|e| self.error_at(at + e.offset.min(text.len()), e.message))?;
                }
            }
            self.expect(';')?;
            seen.push(key);
        }
        self.pos += 1;
        Ok(fields)
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let start = self.pos;
        match self.word() {
            "machine" => {
                let name = self.name()?;
                let fields = self.block(&["regs", "prog", "tape"])?;
                Ok(Item::Machine { name, fields })
            }
            "context" => {
                let name = self.name()?;
                let fields = self.block(&["regs", "prog", "tape"])?;
                Ok(Item::Context { name, fields })
            }
            "hole" => {
                let name = self.name()?;
                let fields = self.block(&["tape"])?;
                Ok(Item::Hole { name, tape: fields.tape })
            }
            "term" => {
                let name = self.name()?;
                self.expect('=')?;
                let (source, _) = self.string()?;
                self.expect(';')?;
                Ok(Item::Term { name, source })
            }
            _ => Err(self.error_at(start, "expected 'machine', 'term', 'context' or 'hole'")),
        }
    }
}

/// Parses a whole session file, header included.
pub fn parse(src: &str) -> Result<Document, ParseError> {
    let mut lx = Lexer { src, pos: 0 };
    lx.skip_trivia();
    if !lx.rest().starts_with(HEADER)
        || !lx.rest()[HEADER.len()..].starts_with(['\n', '\r']) && lx.rest().len() > HEADER.len()
    {
        return Err(lx.error(format!("missing '{HEADER}' header")));
    }
    lx.pos += HEADER.len();
    parse_items(&mut lx)
}

/// Parses definitions without a header, for text appended to a session.
pub fn parse_body(src: &str) -> Result<Document, ParseError> {
    let mut lx = Lexer { src, pos: 0 };
    if lx.rest().trim_start().starts_with(HEADER) {
        return parse(src);
    }
    parse_items(&mut lx)
}

fn parse_items(lx: &mut Lexer<'_>) -> Result<Document, ParseError> {
    let mut items = Vec::new();
    while lx.peek().is_some() {
        items.push(lx.item()?);
    }
    Ok(Document { items })
}

fn quote(s: &str) -> String {
    let mut out = String::from('"');
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' => out.push_str("\\\""),
            // a lone backslash stays as it is unless it would read as an escape
            '\\' if matches!(chars.peek(), None | Some('"' | '\\')) => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn print_fields(fields: &Fields) -> String {
    let regs = join(&fields.regs, |r| r.as_ref().map_or("_".to_string(), Ref::to_string));
    let tape = join(&fields.tape, Ref::to_string);
    format!("{{ regs = [{regs}]; prog = {}; tape = [{tape}]; }}", quote(&fields.prog.to_string()))
}

/// The canonical text of a document.
pub fn print(doc: &Document) -> String {
    let mut out = format!("{HEADER}\n");
    for item in &doc.items {
        let _ = match item {
            Item::Machine { name, fields } => writeln!(out, "machine {name} {}", print_fields(fields)),
            Item::Context { name, fields } => writeln!(out, "context {name} {}", print_fields(fields)),
            Item::Hole { name, tape } => writeln!(out, "hole {name} {{ tape = [{}]; }}", join(tape, Ref::to_string)),
            Item::Term { name, source } => writeln!(out, "term {name} = {};", quote(source)),
        };
    }
    out
}
