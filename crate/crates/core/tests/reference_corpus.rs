//! The Wi-Fi access point troubleshooting program, end to end.

mod common;

use common::Answer;
use sqry::codec::{decode_program, plain_len};
use sqry::corpus::wifi_access_point;
use sqry::ir::{Program, ProgramNode};
use sqry::packaging::{self, QrBudget, MAX_QR_BYTES};
use sqry::report::compile_both;
use sqry::textcomp::DictionaryConfig;
use sqry::vm::State;

fn run(program: &Program, answers: &[Answer]) -> (State, Vec<String>) {
    common::run_path(program, answers)
}

fn choice(c: &str) -> Answer {
    Answer::Choice(c.to_owned())
}

#[test]
fn string_inventory() {
    let p = wifi_access_point();
    assert_eq!(p.strings().len(), 56);
    assert_eq!(p.strings().iter().map(|s| s.chars().count()).sum::<usize>(), 860);
    assert_eq!(p.strings().iter().map(|s| plain_len(s)).sum::<usize>(), 6524);
}

#[test]
fn parsed_structure() {
    let p = wifi_access_point();
    let ProgramNode::Ask { prompt, branches } = p.root() else {
        panic!("root is not a question");
    };
    assert_eq!(prompt, "Operation?");
    let arms: Vec<_> = branches.iter().map(|b| b.matcher.as_str()).collect();
    assert_eq!(arms, ["Check status", "Configuration", "Generic information"]);

    let ProgramNode::Ask { branches: about, .. } = &branches[2].child else {
        panic!()
    };
    let ProgramNode::AskNumeric {
        prompt,
        thresholds,
        otherwise,
    } = &about[0].child
    else {
        panic!("Standard leads to a numeric question")
    };
    assert_eq!(prompt, "Insert speed in Mbps");
    let limits: Vec<_> = thresholds.iter().map(|t| t.limit).collect();
    assert_eq!(limits, [9600, 3500, 600, 54]);
    assert_eq!(
        otherwise.as_deref(),
        Some(&ProgramNode::print("802.11g", ProgramNode::Exit))
    );
}

#[test]
fn dictionary_and_payload_sizes() {
    let p = wifi_access_point();
    let c = compile_both(&p, &DictionaryConfig::default()).unwrap();
    let r = c.report;
    assert_eq!(r.string_bits, 6524);
    assert!((19..=21).contains(&c.dictionary.len()), "{} words", c.dictionary.len());
    assert!(
        (905..=995).contains(&r.dictionary_bits),
        "{} dictionary bits",
        r.dictionary_bits
    );
    assert!(r.compressed_string_bits < r.string_bits);
    assert!(r.compressed_string_bits as f64 <= 5907.0 * 1.02);
    assert!(r.compressed_total_bits < r.total_bits);
    assert_eq!(r.non_string_bits(), r.compressed_total_bits - r.compressed_string_bits);
    assert_eq!(c.dictionary.key_bits(), 5);
}

#[test]
fn both_encodings_round_trip() {
    let p = wifi_access_point();
    let c = compile_both(&p, &DictionaryConfig::default()).unwrap();
    assert_eq!(decode_program(&c.plain.bits).unwrap(), p);
    assert_eq!(decode_program(&c.compressed.bits).unwrap(), p);
}

#[test]
fn every_leaf_path() {
    let p = wifi_access_point();
    let table = common::golden_paths();
    assert_eq!(table.len(), 22);
    for (answers, expected) in &table {
        let (state, log) = run(&p, answers);
        assert_eq!(state, State::Finished, "{answers:?}");
        assert_eq!(&log, expected, "{answers:?}");
    }
    let printed: usize = table.iter().map(|(_, e)| e.len()).sum();
    assert_eq!(printed, 24);
}

#[test]
fn tree_walk_agrees_with_table() {
    let p = wifi_access_point();
    let walked = common::leaf_paths(p.root());
    for (answers, log) in &walked {
        let (state, got) = run(&p, answers);
        assert_eq!(state, State::Finished);
        assert_eq!(&got, log);
    }
    let expected: Vec<Vec<String>> = common::golden_paths().into_iter().map(|(_, e)| e).collect();
    let got: Vec<Vec<String>> = walked.into_iter().map(|(_, l)| l).collect();
    assert_eq!(got, expected);
}

#[test]
fn wrong_answers_fail() {
    let p = wifi_access_point();
    let (state, _) = run(&p, &[choice("Check status"), choice("Power"), choice("Purple")]);
    assert!(matches!(state, State::Failed(_)));
    let (state, _) = run(&p, &[choice("Generic information"), Answer::Number(5)]);
    assert!(matches!(state, State::Failed(_)));
}

#[test]
fn numeric_boundaries() {
    let p = wifi_access_point();
    let cases = [
        (9601, "802.11be (Wi-Fi 7)"),
        (9600, "802.11ax (Wi-Fi 6)"),
        (3501, "802.11ax (Wi-Fi 6)"),
        (3500, "802.11ac (Wi-Fi 5)"),
        (601, "802.11ac (Wi-Fi 5)"),
        (600, "802.11n (Wi-Fi 4)"),
        (55, "802.11n (Wi-Fi 4)"),
        (54, "802.11g"),
        (-5, "802.11g"),
        (i64::MAX, "802.11be (Wi-Fi 7)"),
    ];
    for (v, out) in cases {
        let (state, log) = run(
            &p,
            &[choice("Generic information"), choice("Standard"), Answer::Number(v)],
        );
        assert_eq!(state, State::Finished);
        assert_eq!(log, [out], "speed {v}");
    }
}

#[test]
fn fits_one_symbol() {
    let p = wifi_access_point();
    let c = compile_both(&p, &DictionaryConfig::default()).unwrap();
    for payload in [&c.plain, &c.compressed] {
        let bytes = packaging::pack(payload).unwrap();
        assert!(bytes.len() < MAX_QR_BYTES);
        assert_eq!(sqry::codec::decode_bytes(&bytes).unwrap(), p);
    }
    let over = sqry::codec::BitStream::from_bytes(vec![0; MAX_QR_BYTES + 1]);
    assert!(matches!(
        packaging::pack_bits(&over, QrBudget::default()),
        Err(packaging::PackagingError::CapacityExceeded { .. })
    ));
    let exact = sqry::codec::BitStream::from_bytes(vec![0; MAX_QR_BYTES]);
    assert!(packaging::pack_bits(&exact, QrBudget::default()).is_ok());
}
