//! Decision-tree intermediate representation shared by the front end, the
//! binary codec and the virtual machine.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// End-of-string control character.
pub const ETX: char = '\u{3}';
/// Sub-string separator control character.
pub const NUL: char = '\u{0}';

/// Deepest node nesting accepted from untrusted input (source or payload).
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProgramNode {
    Exit,
    Print {
        text: String,
        next: Box<ProgramNode>,
    },
    Ask {
        prompt: String,
        branches: Vec<Branch>,
    },
    AskNumeric {
        prompt: String,
        thresholds: Vec<Threshold>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        otherwise: Option<Box<ProgramNode>>,
    },
}

/// One `if "<match>":` arm of a string question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    #[serde(rename = "match")]
    pub matcher: String,
    pub child: ProgramNode,
}

/// One `ifc > <limit>:` arm of a numeric question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub limit: i64,
    pub child: ProgramNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("question {prompt:?} has no branches")]
    NoBranches { prompt: String },
    #[error("question {prompt:?} lists the answer {matcher:?} twice")]
    DuplicateMatch { prompt: String, matcher: String },
    #[error("thresholds of {prompt:?} are not strictly decreasing ({prev} then {next})")]
    ThresholdOrder { prompt: String, prev: i64, next: i64 },
    #[error("string {0:?} contains a NUL or ETX control character")]
    ControlCharacter(String),
    #[error("program nesting exceeds {MAX_DEPTH} levels")]
    TooDeep,
}

impl ProgramNode {
    pub fn print(text: impl Into<String>, next: ProgramNode) -> Self {
        ProgramNode::Print {
            text: text.into(),
            next: Box::new(next),
        }
    }

    pub fn ask<S, I>(prompt: impl Into<String>, branches: I) -> Self
    where
        S: Into<String>,
        I: IntoIterator<Item = (S, ProgramNode)>,
    {
        ProgramNode::Ask {
            prompt: prompt.into(),
            branches: branches
                .into_iter()
                .map(|(m, child)| Branch {
                    matcher: m.into(),
                    child,
                })
                .collect(),
        }
    }

    pub fn ask_numeric<I>(prompt: impl Into<String>, thresholds: I, otherwise: Option<ProgramNode>) -> Self
    where
        I: IntoIterator<Item = (i64, ProgramNode)>,
    {
        ProgramNode::AskNumeric {
            prompt: prompt.into(),
            thresholds: thresholds
                .into_iter()
                .map(|(limit, child)| Threshold { limit, child })
                .collect(),
            otherwise: otherwise.map(Box::new),
        }
    }

    /// Checks every structural invariant of the subtree.
    pub fn validate(&self) -> Result<(), IrError> {
        self.validate_at(0)
    }

    fn validate_at(&self, mut depth: usize) -> Result<(), IrError> {
        let mut node = self;
        loop {
            if depth > MAX_DEPTH {
                return Err(IrError::TooDeep);
            }
            match node {
                ProgramNode::Exit => return Ok(()),
                ProgramNode::Print { text, next } => {
                    check_literal(text)?;
                    node = next;
                    depth += 1;
                }
                ProgramNode::Ask { prompt, branches } => {
                    check_literal(prompt)?;
                    if branches.is_empty() {
                        return Err(IrError::NoBranches { prompt: prompt.clone() });
                    }
                    for (i, b) in branches.iter().enumerate() {
                        check_literal(&b.matcher)?;
                        if branches[..i].iter().any(|o| o.matcher == b.matcher) {
                            return Err(IrError::DuplicateMatch {
                                prompt: prompt.clone(),
                                matcher: b.matcher.clone(),
                            });
                        }
                        b.child.validate_at(depth + 1)?;
                    }
                    return Ok(());
                }
                ProgramNode::AskNumeric {
                    prompt,
                    thresholds,
                    otherwise,
                } => {
                    check_literal(prompt)?;
                    if thresholds.is_empty() {
                        return Err(IrError::NoBranches { prompt: prompt.clone() });
                    }
                    for pair in thresholds.windows(2) {
                        if pair[1].limit >= pair[0].limit {
                            return Err(IrError::ThresholdOrder {
                                prompt: prompt.clone(),
                                prev: pair[0].limit,
                                next: pair[1].limit,
                            });
                        }
                    }
                    for t in thresholds {
                        t.child.validate_at(depth + 1)?;
                    }
                    match otherwise {
                        Some(o) => {
                            node = o;
                            depth += 1;
                        }
                        None => return Ok(()),
                    }
                }
            }
        }
    }
}

/// Rejects strings that would collide with the NUL/ETX framing characters.
pub fn check_literal(s: &str) -> Result<(), IrError> {
    if s.contains([NUL, ETX]) {
        Err(IrError::ControlCharacter(s.to_owned()))
    } else {
        Ok(())
    }
}

/// Every string literal occurrence in pre-order: a node's prompt first, then
/// each branch's match string followed by that branch's subtree.
pub fn collect_strings(root: &ProgramNode) -> Vec<String> {
    let mut out = Vec::new();
    visit_strings(root, &mut |s| out.push(s.to_owned()));
    out
}

/// Calls `f` on each string literal in the same order as [`collect_strings`].
pub fn visit_strings<'a>(root: &'a ProgramNode, f: &mut impl FnMut(&'a str)) {
    let mut node = root;
    loop {
        match node {
            ProgramNode::Exit => return,
            ProgramNode::Print { text, next } => {
                f(text);
                node = next;
            }
            ProgramNode::Ask { prompt, branches } => {
                f(prompt);
                for b in branches {
                    f(&b.matcher);
                    visit_strings(&b.child, f);
                }
                return;
            }
            ProgramNode::AskNumeric {
                prompt,
                thresholds,
                otherwise,
            } => {
                f(prompt);
                for t in thresholds {
                    visit_strings(&t.child, f);
                }
                if let Some(o) = otherwise {
                    visit_strings(o, f);
                }
                return;
            }
        }
    }
}

/// A validated decision tree together with its string inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    root: ProgramNode,
    strings: Vec<String>,
}

impl Program {
    pub fn new(root: ProgramNode) -> Result<Self, IrError> {
        root.validate()?;
        let strings = collect_strings(&root);
        Ok(Program { root, strings })
    }

    pub fn root(&self) -> &ProgramNode {
        &self.root
    }

    /// String literals in pre-order; repeated literals appear once per occurrence.
    pub fn strings(&self) -> &[String] {
        &self.strings
    }

    pub fn into_root(self) -> ProgramNode {
        self.root
    }
}
