//! Interactive execution of decision trees.
//!
//! A [`Session`] is an immutable snapshot: answering produces a new session,
//! so callers can keep earlier snapshots for back navigation.

use std::fmt;

use crate::ir::{Program, ProgramNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    AwaitingChoice { prompt: String, options: Vec<String> },
    AwaitingNumber { prompt: String },
    Finished,
    Failed(Failure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    UnmatchedAnswer(String),
    NoMatchingBranch(i64),
    /// An answer of the wrong kind, or any answer after the session ended.
    UnexpectedAnswer,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::UnmatchedAnswer(a) => write!(f, "unmatched answer {a:?}"),
            Failure::NoMatchingBranch(v) => write!(f, "no matching branch for {v}"),
            Failure::UnexpectedAnswer => f.write_str("unexpected answer"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session<'p> {
    current: &'p ProgramNode,
    output_log: Vec<String>,
    state: State,
}

impl<'p> Session<'p> {
    pub fn start(program: &'p Program) -> Self {
        Self::at(program.root(), Vec::new())
    }

    /// Drains prints from `node` and settles on the next interactive state.
    fn at(mut node: &'p ProgramNode, mut log: Vec<String>) -> Self {
        while let ProgramNode::Print { text, next } = node {
            log.push(text.clone());
            node = next;
        }
        let state = match node {
            ProgramNode::Exit => State::Finished,
            ProgramNode::Ask { prompt, branches } => State::AwaitingChoice {
                prompt: prompt.clone(),
                options: branches.iter().map(|b| b.matcher.clone()).collect(),
            },
            ProgramNode::AskNumeric { prompt, .. } => State::AwaitingNumber { prompt: prompt.clone() },
            ProgramNode::Print { .. } => unreachable!("prints are drained"),
        };
        Session {
            current: node,
            output_log: log,
            state,
        }
    }

    fn failed(&self, failure: Failure) -> Self {
        Session {
            current: self.current,
            output_log: self.output_log.clone(),
            state: State::Failed(failure),
        }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn output_log(&self) -> &[String] {
        &self.output_log
    }

    pub fn current(&self) -> &'p ProgramNode {
        self.current
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.state, State::Finished | State::Failed(_))
    }

    /// Selects the branch whose match string equals `choice` after trimming.
    pub fn answer_choice(&self, choice: &str) -> Self {
        let (ProgramNode::Ask { branches, .. }, State::AwaitingChoice { .. }) = (self.current, &self.state) else {
            return self.failed(Failure::UnexpectedAnswer);
        };
        let choice = choice.trim();
        match branches.iter().find(|b| b.matcher == choice) {
            Some(b) => Self::at(&b.child, self.output_log.clone()),
            None => self.failed(Failure::UnmatchedAnswer(choice.to_owned())),
        }
    }

    /// Takes the first threshold strictly below `value`, else the fallback arm.
    pub fn answer_number(&self, value: i64) -> Self {
        let (
            ProgramNode::AskNumeric {
                thresholds, otherwise, ..
            },
            State::AwaitingNumber { .. },
        ) = (self.current, &self.state)
        else {
            return self.failed(Failure::UnexpectedAnswer);
        };
        let next = thresholds
            .iter()
            .find(|t| value > t.limit)
            .map(|t| &t.child)
            .or(otherwise.as_deref());
        match next {
            Some(node) => Self::at(node, self.output_log.clone()),
            None => self.failed(Failure::NoMatchingBranch(value)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::wifi_access_point;

    #[test]
    fn trivial_programs() {
        let p = Program::new(ProgramNode::Exit).unwrap();
        let s = Session::start(&p);
        assert_eq!(s.state(), &State::Finished);
        assert!(s.output_log().is_empty());

        let p = Program::new(ProgramNode::print("x", ProgramNode::Exit)).unwrap();
        let s = Session::start(&p);
        assert_eq!(s.state(), &State::Finished);
        assert_eq!(s.output_log(), ["x"]);
    }

    #[test]
    fn first_question() {
        let p = wifi_access_point();
        let s = Session::start(&p);
        assert_eq!(
            s.state(),
            &State::AwaitingChoice {
                prompt: "Operation?".into(),
                options: vec![
                    "Check status".into(),
                    "Configuration".into(),
                    "Generic information".into()
                ],
            }
        );
    }

    fn walk<'p>(p: &'p Program, answers: &[&str]) -> Session<'p> {
        answers.iter().fold(Session::start(p), |s, a| s.answer_choice(a))
    }

    #[test]
    fn choice_paths() {
        let p = wifi_access_point();
        let s = walk(&p, &["Check status", "Power", "Green"]);
        assert_eq!(s.state(), &State::Finished);
        assert_eq!(s.output_log(), ["Operating standalone mode"]);

        let s = walk(&p, &["Configuration", "  AP configuration User / Password "]);
        assert_eq!(s.state(), &State::Finished);
        assert_eq!(s.output_log(), ["User: admin", "Password: 1234"]);

        let s = walk(&p, &["Check status", "Power", "Purple"]);
        assert_eq!(s.state(), &State::Failed(Failure::UnmatchedAnswer("Purple".into())));
        // Case-sensitive.
        let s = walk(&p, &["check status"]);
        assert!(matches!(s.state(), State::Failed(_)));
    }

    #[test]
    fn numeric_routing_is_strict() {
        let p = wifi_access_point();
        let speed = walk(&p, &["Generic information", "Standard"]);
        assert_eq!(
            speed.state(),
            &State::AwaitingNumber {
                prompt: "Insert speed in Mbps".into()
            }
        );
        for (v, out) in [
            (9601, "802.11be (Wi-Fi 7)"),
            (9600, "802.11ax (Wi-Fi 6)"),
            (54, "802.11g"),
        ] {
            let s = speed.answer_number(v);
            assert_eq!(s.output_log(), [out], "{v}");
            assert_eq!(s.state(), &State::Finished);
        }
    }

    #[test]
    fn missing_fallback_fails() {
        let p = Program::new(ProgramNode::ask_numeric("N", [(0, ProgramNode::Exit)], None)).unwrap();
        let s = Session::start(&p);
        assert_eq!(s.answer_number(1).state(), &State::Finished);
        assert_eq!(s.answer_number(0).state(), &State::Failed(Failure::NoMatchingBranch(0)));
    }

    #[test]
    fn wrong_kind_of_answer() {
        let p = wifi_access_point();
        let s = Session::start(&p);
        assert_eq!(s.answer_number(3).state(), &State::Failed(Failure::UnexpectedAnswer));
        let done = walk(&p, &["Configuration", "IP"]);
        assert_eq!(done.output_log(), ["192.168.4.2"]);
        assert_eq!(
            done.answer_choice("IP").state(),
            &State::Failed(Failure::UnexpectedAnswer)
        );
    }
}
