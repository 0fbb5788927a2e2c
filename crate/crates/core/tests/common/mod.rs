//! Generators shared by the property and acceptance suites.
#![allow(dead_code)]

use proptest::collection::vec;
use proptest::prelude::*;
use sqry::ir::{Branch, Program, ProgramNode, Threshold};
use sqry::packaging::{byte_capacity, ErrorCorrection};

/// Text drawn from a small vocabulary so that words repeat across strings,
/// mixed with separators, punctuation and multi-byte characters.
pub fn text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        4 => prop::sample::select(vec![
            "Wi-Fi", "activity", "detected", "link", "Amber", "Green", "2.5", "Gbps", "802.11ax", "my_net",
            "on", "of", "a", "x",
        ])
        .prop_map(str::to_owned),
        2 => prop::sample::select(vec![" ", " / ", ": ", ", ", "?", "(", ") ", "  "]).prop_map(str::to_owned),
        1 => "[a-zA-Z0-9_.-]{1,8}",
        1 => "[ -~]{1,4}",
        1 => prop::sample::select(vec!["é", "ü", "€", "😀", "日本", "\u{6}", "\t", "\n"]).prop_map(str::to_owned),
    ];
    vec(piece, 0..8).prop_map(|parts| parts.concat())
}

/// Text that never starts with U+0006/U+0007 (unencodable under compressed framing).
pub fn encodable_text() -> impl Strategy<Value = String> {
    text().prop_filter("leading U+0006/U+0007", |s| !s.starts_with(['\u{6}', '\u{7}']))
}

pub fn node() -> impl Strategy<Value = ProgramNode> {
    let leaf = prop_oneof![
        2 => Just(ProgramNode::Exit),
        1 => encodable_text().prop_map(|t| ProgramNode::print(t, ProgramNode::Exit)),
    ];
    leaf.prop_recursive(5, 48, 4, |inner| {
        prop_oneof![
            2 => (encodable_text(), inner.clone()).prop_map(|(t, n)| ProgramNode::print(t, n)),
            2 => (encodable_text(), vec((encodable_text(), inner.clone()), 1..4)).prop_map(|(prompt, arms)| {
                let mut branches: Vec<Branch> = Vec::new();
                for (matcher, child) in arms {
                    if !branches.iter().any(|b| b.matcher == matcher) {
                        branches.push(Branch { matcher, child });
                    }
                }
                ProgramNode::Ask { prompt, branches }
            }),
            2 => (
                encodable_text(),
                vec((any::<i64>(), inner.clone()), 1..4),
                proptest::option::of(inner),
            )
                .prop_map(|(prompt, arms, otherwise)| {
                    let mut thresholds: Vec<Threshold> = Vec::new();
                    let mut arms = arms;
                    arms.sort_by_key(|a| std::cmp::Reverse(a.0));
                    for (limit, child) in arms {
                        if thresholds.last().is_none_or(|t| t.limit > limit) {
                            thresholds.push(Threshold { limit, child });
                        }
                    }
                    ProgramNode::AskNumeric {
                        prompt,
                        thresholds,
                        otherwise: otherwise.map(Box::new),
                    }
                }),
        ]
    })
}

pub fn program() -> impl Strategy<Value = Program> {
    node().prop_map(|n| Program::new(n).expect("generator respects invariants"))
}

/// One answer given to a running session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Choice(String),
    Number(i64),
}

impl Answer {
    /// The line a user would type at the `sqry run` prompt.
    pub fn as_line(&self) -> String {
        match self {
            Answer::Choice(c) => c.clone(),
            Answer::Number(v) => v.to_string(),
        }
    }
}

/// Answer paths and their printed output, from tests/fixtures/wifi_ap_paths.json.
pub fn golden_paths() -> Vec<(Vec<Answer>, Vec<String>)> {
    let doc: serde_json::Value = serde_json::from_str(include_str!("../fixtures/wifi_ap_paths.json")).unwrap();
    doc["paths"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let answers = p["answers"]
                .as_array()
                .unwrap()
                .iter()
                .map(|a| match a {
                    serde_json::Value::String(s) => Answer::Choice(s.clone()),
                    n => Answer::Number(n.as_i64().unwrap()),
                })
                .collect();
            let output = p["output"]
                .as_array()
                .unwrap()
                .iter()
                .map(|s| s.as_str().unwrap().to_owned())
                .collect();
            (answers, output)
        })
        .collect()
}

pub fn run_path(program: &Program, answers: &[Answer]) -> (sqry::vm::State, Vec<String>) {
    let mut s = sqry::vm::Session::start(program);
    for a in answers {
        s = match a {
            Answer::Choice(c) => s.answer_choice(c),
            Answer::Number(v) => s.answer_number(*v),
        };
    }
    (s.state().clone(), s.output_log().to_vec())
}

/// Every leaf of the tree with the answers that reach it and the prints on
/// the way. Numeric arms are entered with `limit + 1`, the fallback with
/// `i64::MIN`.
pub fn leaf_paths(root: &ProgramNode) -> Vec<(Vec<Answer>, Vec<String>)> {
    let mut out = Vec::new();
    let mut stack = vec![(root, Vec::new(), Vec::new())];
    while let Some((node, path, mut log)) = stack.pop() {
        match node {
            ProgramNode::Exit => out.push((path, log)),
            ProgramNode::Print { text, next } => {
                log.push(text.clone());
                stack.push((next, path, log));
            }
            ProgramNode::Ask { branches, .. } => {
                for b in branches.iter().rev() {
                    let mut p = path.clone();
                    p.push(Answer::Choice(b.matcher.clone()));
                    stack.push((&b.child, p, log.clone()));
                }
            }
            ProgramNode::AskNumeric {
                thresholds, otherwise, ..
            } => {
                if let Some(o) = otherwise {
                    let mut p = path.clone();
                    p.push(Answer::Number(i64::MIN));
                    stack.push((o, p, log.clone()));
                }
                for t in thresholds.iter().rev() {
                    let mut p = path.clone();
                    p.push(Answer::Number(t.limit.saturating_add(1)));
                    stack.push((&t.child, p, log.clone()));
                }
            }
        }
    }
    out
}

pub const LEVELS: [ErrorCorrection; 4] = [
    ErrorCorrection::Low,
    ErrorCorrection::Medium,
    ErrorCorrection::Quartile,
    ErrorCorrection::High,
];

/// Byte strings spread evenly over symbol versions and error-correction
/// levels: each case is just long enough to need the chosen version.
pub fn qr_payload() -> impl Strategy<Value = (ErrorCorrection, Vec<u8>)> {
    (1i16..=40, prop::sample::select(LEVELS.to_vec())).prop_flat_map(|(version, ec)| {
        let lo = if version == 1 {
            1
        } else {
            byte_capacity(version - 1, ec) + 1
        };
        let hi = byte_capacity(version, ec);
        vec(any::<u8>(), lo..=hi).prop_map(move |b| (ec, b))
    })
}
