//! Indentation-based source language for decision-tree programs.
//!
//! ```text
//! input "Operation?"
//! if "Check status":
//!    print "All good" exit
//! else if "Configuration":
//!    inputs "Insert speed in Mbps"
//!    ifc > 600:
//!       print "fast" exit
//!    else:
//!       print "slow" exit
//! ```
//!
//! A block is a run of lines sharing one indentation. It holds zero or more
//! `print` statements followed by exactly one terminal: `exit`, a
//! `print "..." exit`, an `input` question with its `if` / `else if` arms, or
//! an `inputs` numeric question with its `ifc >` / `else ifc >` / `else:` arms.
//! String literals support the escapes `\"`, `\\`, `\n`, `\r`, `\t` and
//! `\u{hex}`; they cannot span lines.

use std::fmt::{self, Write as _};
use std::iter::Peekable;
use std::str::CharIndices;

use thiserror::Error;

use crate::ir::{check_literal, Branch, IrError, Program, ProgramNode, Threshold, MAX_DEPTH};

/// Indentation emitted by [`format`].
pub const INDENT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty program")]
    Empty,
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unterminated string literal (literals cannot span lines)")]
    UnterminatedString,
    #[error("invalid escape sequence `{0}`")]
    BadEscape(String),
    #[error("string literal contains a NUL or ETX control character")]
    ControlCharacter,
    #[error("invalid integer literal `{0}`")]
    BadInteger(String),
    #[error("malformed statement")]
    Malformed,
    #[error("`else` without a preceding `if`")]
    ElseWithoutIf,
    #[error("`{0}` without a preceding question")]
    ArmWithoutQuestion(&'static str),
    #[error("`input` must be followed by an `if` arm")]
    MissingIf,
    #[error("`inputs` must be followed by an `ifc >` arm")]
    MissingIfc,
    #[error("answer {0:?} appears twice in the same question")]
    DuplicateMatch(String),
    #[error("threshold {next} does not decrease after {prev}")]
    ThresholdOrder { prev: i64, next: i64 },
    #[error("inconsistent indentation")]
    Indentation,
    #[error("expected an indented block")]
    ExpectedBlock,
    #[error("block ends without `exit`")]
    MissingExit,
    #[error("unreachable statement")]
    Unreachable,
    #[error("program nesting is too deep")]
    TooDeep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Str(String),
    Int(i64),
    Gt,
    Colon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stmt {
    Input(String),
    Inputs(String),
    Print { text: String, exit: bool },
    Exit,
    If(String),
    ElseIf(String),
    Ifc(i64),
    ElseIfc(i64),
    Else,
}

impl Stmt {
    fn is_else(&self) -> bool {
        matches!(self, Stmt::ElseIf(_) | Stmt::ElseIfc(_) | Stmt::Else)
    }
}

#[derive(Debug)]
struct Line {
    number: usize,
    indent: usize,
    stmt: Stmt,
}

const KEYWORDS: &[&str] = &["input", "inputs", "print", "exit", "if", "else", "ifc"];

fn lex_line(text: &str, number: usize) -> Result<Vec<Token>, ParseError> {
    let err = |kind| ParseError { line: number, kind };
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        match c {
            ' ' | '\t' | '\r' => {
                chars.next();
            }
            '>' => {
                chars.next();
                tokens.push(Token::Gt);
            }
            ':' => {
                chars.next();
                tokens.push(Token::Colon);
            }
            '"' => {
                chars.next();
                tokens.push(Token::Str(lex_string(&mut chars).map_err(err)?));
            }
            c if c.is_ascii_alphabetic() => {
                let end = take_while(&mut chars, |c| c.is_ascii_alphanumeric() || c == '_');
                let word = &text[start..end.unwrap_or(text.len())];
                if !KEYWORDS.contains(&word) {
                    return Err(err(ParseErrorKind::UnknownKeyword(word.to_owned())));
                }
                tokens.push(Token::Word(word.to_owned()));
            }
            c if c == '-' || c.is_ascii_digit() => {
                chars.next();
                let end = take_while(&mut chars, |c| c.is_ascii_alphanumeric());
                let lit = &text[start..end.unwrap_or(text.len())];
                let value = lit
                    .parse::<i64>()
                    .map_err(|_| err(ParseErrorKind::BadInteger(lit.to_owned())))?;
                tokens.push(Token::Int(value));
            }
            other => return Err(err(ParseErrorKind::UnexpectedChar(other))),
        }
    }
    Ok(tokens)
}

/// Advances past the run of matching characters; returns the byte offset of
/// the first non-matching one.
fn take_while(chars: &mut Peekable<CharIndices>, pred: impl Fn(char) -> bool) -> Option<usize> {
    while let Some(&(i, c)) = chars.peek() {
        if !pred(c) {
            return Some(i);
        }
        chars.next();
    }
    None
}

fn lex_string(chars: &mut Peekable<CharIndices>) -> Result<String, ParseErrorKind> {
    let mut out = String::new();
    loop {
        let (_, c) = chars.next().ok_or(ParseErrorKind::UnterminatedString)?;
        match c {
            '"' => break,
            '\\' => {
                let (_, e) = chars.next().ok_or(ParseErrorKind::UnterminatedString)?;
                match e {
                    '"' => out.push('"'),
                    '\\' => out.push('\\'),
                    'n' => out.push('\n'),
                    'r' => out.push('\r'),
                    't' => out.push('\t'),
                    'u' => out.push(lex_unicode_escape(chars)?),
                    other => return Err(ParseErrorKind::BadEscape(format!("\\{other}"))),
                }
            }
            c => out.push(c),
        }
    }
    if check_literal(&out).is_err() {
        return Err(ParseErrorKind::ControlCharacter);
    }
    Ok(out)
}

fn lex_unicode_escape(chars: &mut Peekable<CharIndices>) -> Result<char, ParseErrorKind> {
    let mut seq = String::from("\\u");
    if chars.next_if(|&(_, c)| c == '{').is_none() {
        return Err(ParseErrorKind::BadEscape(seq));
    }
    seq.push('{');
    let mut hex = String::new();
    loop {
        match chars.next() {
            Some((_, '}')) => break,
            Some((_, c)) if c.is_ascii_hexdigit() && hex.len() < 6 => hex.push(c),
            Some((_, c)) => {
                seq.push_str(&hex);
                seq.push(c);
                return Err(ParseErrorKind::BadEscape(seq));
            }
            None => return Err(ParseErrorKind::UnterminatedString),
        }
    }
    u32::from_str_radix(&hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| ParseErrorKind::BadEscape(format!("{seq}{hex}}}")))
}

fn parse_stmt(tokens: Vec<Token>, number: usize) -> Result<Stmt, ParseError> {
    use Token::*;
    let kw = |t: &Token, k: &str| matches!(t, Word(w) if w == k);
    let stmt = match tokens.as_slice() {
        [w, Str(s)] if kw(w, "input") => Stmt::Input(s.clone()),
        [w, Str(s)] if kw(w, "inputs") => Stmt::Inputs(s.clone()),
        [w, Str(s)] if kw(w, "print") => Stmt::Print {
            text: s.clone(),
            exit: false,
        },
        [w, Str(s), e] if kw(w, "print") && kw(e, "exit") => Stmt::Print {
            text: s.clone(),
            exit: true,
        },
        [w] if kw(w, "exit") => Stmt::Exit,
        [w, Str(s), Colon] if kw(w, "if") => Stmt::If(s.clone()),
        [e, w, Str(s), Colon] if kw(e, "else") && kw(w, "if") => Stmt::ElseIf(s.clone()),
        [w, Gt, Int(n), Colon] if kw(w, "ifc") => Stmt::Ifc(*n),
        [e, w, Gt, Int(n), Colon] if kw(e, "else") && kw(w, "ifc") => Stmt::ElseIfc(*n),
        [e, Colon] if kw(e, "else") => Stmt::Else,
        _ => {
            return Err(ParseError {
                line: number,
                kind: ParseErrorKind::Malformed,
            })
        }
    };
    Ok(stmt)
}

fn scan_lines(source: &str) -> Result<Vec<Line>, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in source.lines().enumerate() {
        let number = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let body = raw.trim_start_matches(' ');
        let indent = raw.len() - body.len();
        if body.starts_with('\t') {
            return Err(ParseError {
                line: number,
                kind: ParseErrorKind::Indentation,
            });
        }
        let tokens = lex_line(body, number)?;
        let stmt = parse_stmt(tokens, number)?;
        lines.push(Line { number, indent, stmt });
    }
    Ok(lines)
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    fn error_at(&self, line: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, kind }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.number)
    }

    /// Parses the statements of one block, starting at the current line whose
    /// indentation must equal `indent`.
    fn block(&mut self, indent: usize) -> Result<ProgramNode, ParseError> {
        if self.depth > MAX_DEPTH {
            let line = self.peek().map_or(0, |l| l.number);
            return Err(self.error_at(line, ParseErrorKind::TooDeep));
        }
        self.depth += 1;
        let node = self.block_inner(indent);
        self.depth -= 1;
        node
    }

    fn block_inner(&mut self, indent: usize) -> Result<ProgramNode, ParseError> {
        let mut prints = Vec::new();
        let terminal = loop {
            let line = &self.lines[self.pos];
            let number = line.number;
            let stmt = line.stmt.clone();
            self.pos += 1;
            match stmt {
                Stmt::Exit => break ProgramNode::Exit,
                Stmt::Print { text, exit: true } => break ProgramNode::print(text, ProgramNode::Exit),
                Stmt::Print { text, exit: false } => {
                    match self.peek() {
                        Some(next) if next.indent == indent => {}
                        Some(next) if next.indent > indent => {
                            return Err(self.error_at(next.number, ParseErrorKind::Indentation))
                        }
                        _ => return Err(self.error_at(number, ParseErrorKind::MissingExit)),
                    }
                    prints.push(text);
                }
                Stmt::Input(prompt) => break self.ask(prompt, number, indent)?,
                Stmt::Inputs(prompt) => break self.ask_numeric(prompt, number, indent)?,
                Stmt::If(_) => return Err(self.error_at(number, ParseErrorKind::ArmWithoutQuestion("if"))),
                Stmt::Ifc(_) => return Err(self.error_at(number, ParseErrorKind::ArmWithoutQuestion("ifc"))),
                Stmt::ElseIf(_) | Stmt::ElseIfc(_) | Stmt::Else => {
                    return Err(self.error_at(number, ParseErrorKind::ElseWithoutIf))
                }
            }
        };
        self.expect_block_end(indent)?;
        Ok(prints
            .into_iter()
            .rev()
            .fold(terminal, |next, text| ProgramNode::print(text, next)))
    }

    fn expect_block_end(&self, indent: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(next) if next.indent == indent => {
                let kind = if next.stmt.is_else() {
                    ParseErrorKind::ElseWithoutIf
                } else {
                    ParseErrorKind::Unreachable
                };
                Err(self.error_at(next.number, kind))
            }
            Some(next) if next.indent > indent => Err(self.error_at(next.number, ParseErrorKind::Indentation)),
            _ => Ok(()),
        }
    }

    /// Parses the indented body belonging to the arm header on line `header`.
    fn arm_body(&mut self, header: usize, indent: usize) -> Result<ProgramNode, ParseError> {
        let body_indent = match self.peek() {
            Some(next) if next.indent > indent => next.indent,
            _ => return Err(self.error_at(header, ParseErrorKind::ExpectedBlock)),
        };
        let node = self.block(body_indent)?;
        match self.peek() {
            Some(next) if next.indent > indent => Err(self.error_at(next.number, ParseErrorKind::Indentation)),
            _ => Ok(node),
        }
    }

    fn next_arm(&self, indent: usize) -> Option<(usize, Stmt)> {
        self.peek()
            .filter(|l| l.indent == indent)
            .map(|l| (l.number, l.stmt.clone()))
    }

    fn ask(&mut self, prompt: String, number: usize, indent: usize) -> Result<ProgramNode, ParseError> {
        let mut branches: Vec<Branch> = Vec::new();
        while let Some((line, stmt)) = self.next_arm(indent) {
            let matcher = match stmt {
                Stmt::If(m) if branches.is_empty() => m,
                Stmt::ElseIf(m) if !branches.is_empty() => m,
                Stmt::ElseIf(_) => return Err(self.error_at(line, ParseErrorKind::ElseWithoutIf)),
                _ => break,
            };
            if branches.iter().any(|b| b.matcher == matcher) {
                return Err(self.error_at(line, ParseErrorKind::DuplicateMatch(matcher)));
            }
            self.pos += 1;
            let child = self.arm_body(line, indent)?;
            branches.push(Branch { matcher, child });
        }
        if branches.is_empty() {
            let line = self.peek().map_or(number, |l| l.number);
            return Err(self.error_at(line, ParseErrorKind::MissingIf));
        }
        Ok(ProgramNode::Ask { prompt, branches })
    }

    fn ask_numeric(&mut self, prompt: String, number: usize, indent: usize) -> Result<ProgramNode, ParseError> {
        let mut thresholds: Vec<Threshold> = Vec::new();
        let mut otherwise = None;
        while let Some((line, stmt)) = self.next_arm(indent) {
            let limit = match stmt {
                Stmt::Ifc(n) if thresholds.is_empty() => n,
                Stmt::ElseIfc(n) if !thresholds.is_empty() => n,
                Stmt::Else if !thresholds.is_empty() => {
                    self.pos += 1;
                    otherwise = Some(Box::new(self.arm_body(line, indent)?));
                    break;
                }
                Stmt::ElseIfc(_) | Stmt::Else => return Err(self.error_at(line, ParseErrorKind::ElseWithoutIf)),
                _ => break,
            };
            if let Some(prev) = thresholds.last() {
                if limit >= prev.limit {
                    return Err(self.error_at(
                        line,
                        ParseErrorKind::ThresholdOrder {
                            prev: prev.limit,
                            next: limit,
                        },
                    ));
                }
            }
            self.pos += 1;
            let child = self.arm_body(line, indent)?;
            thresholds.push(Threshold { limit, child });
        }
        if thresholds.is_empty() {
            let line = self.peek().map_or(number, |l| l.number);
            return Err(self.error_at(line, ParseErrorKind::MissingIfc));
        }
        Ok(ProgramNode::AskNumeric {
            prompt,
            thresholds,
            otherwise,
        })
    }
}

/// Parses program source text.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let lines = scan_lines(source)?;
    let Some(first) = lines.first() else {
        return Err(ParseError {
            line: 1,
            kind: ParseErrorKind::Empty,
        });
    };
    let indent = first.indent;
    let mut parser = Parser {
        lines,
        pos: 0,
        depth: 0,
    };
    let root = parser.block(indent)?;
    if let Some(rest) = parser.peek() {
        return Err(parser.error_at(rest.number, ParseErrorKind::Indentation));
    }
    // The grammar enforces the remaining invariants, except depth for long print chains.
    Program::new(root).map_err(|e| ParseError {
        line: parser.last_line(),
        kind: match e {
            IrError::TooDeep => ParseErrorKind::TooDeep,
            _ => ParseErrorKind::Malformed,
        },
    })
}

/// Renders canonical source text: three-space indentation, no blank lines,
/// and `print "..." exit` on a single line whenever a print ends its block.
pub fn format(program: &Program) -> String {
    format_node(program.root())
}

pub fn format_node(root: &ProgramNode) -> String {
    let mut out = String::new();
    write_node(&mut out, root, 0).expect("writing to a String cannot fail");
    out
}

fn write_node(out: &mut String, mut node: &ProgramNode, indent: usize) -> fmt::Result {
    let pad = " ".repeat(indent);
    loop {
        match node {
            ProgramNode::Exit => return writeln!(out, "{pad}exit"),
            ProgramNode::Print { text, next } => {
                if **next == ProgramNode::Exit {
                    return writeln!(out, "{pad}print {} exit", Quoted(text));
                }
                writeln!(out, "{pad}print {}", Quoted(text))?;
                node = next;
            }
            ProgramNode::Ask { prompt, branches } => {
                writeln!(out, "{pad}input {}", Quoted(prompt))?;
                for (i, b) in branches.iter().enumerate() {
                    let kw = if i == 0 { "if" } else { "else if" };
                    writeln!(out, "{pad}{kw} {}:", Quoted(&b.matcher))?;
                    write_node(out, &b.child, indent + INDENT)?;
                }
                return Ok(());
            }
            ProgramNode::AskNumeric {
                prompt,
                thresholds,
                otherwise,
            } => {
                writeln!(out, "{pad}inputs {}", Quoted(prompt))?;
                for (i, t) in thresholds.iter().enumerate() {
                    let kw = if i == 0 { "ifc" } else { "else ifc" };
                    writeln!(out, "{pad}{kw} > {}:", t.limit)?;
                    write_node(out, &t.child, indent + INDENT)?;
                }
                if let Some(o) = otherwise {
                    writeln!(out, "{pad}else:")?;
                    write_node(out, o, indent + INDENT)?;
                }
                return Ok(());
            }
        }
    }
}

struct Quoted<'a>(&'a str);

impl fmt::Display for Quoted<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('"')?;
        for c in self.0.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c if c.is_control() => write!(f, "\\u{{{:x}}}", c as u32)?,
                c => f.write_char(c)?,
            }
        }
        f.write_char('"')
    }
}
