//! Word-statistics string compression: tokenization, dictionary selection and
//! segmentation of strings into constant and dictionary sub-strings.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

/// Word characters; everything else is a separator.
pub const WORD_PATTERN: &str = r"[a-zA-Z0-9_.\-]+";

static WORD_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(WORD_PATTERN).unwrap());

/// Minimum occurrences for a word to enter the dictionary.
pub const MIN_COUNT: u32 = 2;
/// Minimum word length in characters.
pub const MIN_WORD_LEN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub is_word: bool,
}

/// Splits `text` into alternating maximal runs of word and separator characters.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut last = 0;
    for m in WORD_RE.find_iter(text) {
        if m.start() > last {
            out.push(Token {
                text: &text[last..m.start()],
                is_word: false,
            });
        }
        out.push(Token {
            text: m.as_str(),
            is_word: true,
        });
        last = m.end();
    }
    if last < text.len() {
        out.push(Token {
            text: &text[last..],
            is_word: false,
        });
    }
    out
}

/// String coding selected by the two leading bits of every string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coding {
    Ascii7,
    Utf8,
}

impl Coding {
    /// ASCII-7 when every character fits in seven bits, UTF-8 otherwise.
    pub fn for_text(text: &str) -> Coding {
        if text.is_ascii() {
            Coding::Ascii7
        } else {
            Coding::Utf8
        }
    }

    /// Bits per character (ASCII-7) or per encoded byte (UTF-8).
    pub fn unit_bits(self) -> usize {
        match self {
            Coding::Ascii7 => 7,
            Coding::Utf8 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub word: String,
    /// Occurrences in the corpus the dictionary was built from; zero for a
    /// dictionary read back from a payload.
    pub count: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: Vec<DictEntry>,
    index: HashMap<String, usize>,
}

impl Dictionary {
    pub fn from_entries(entries: Vec<DictEntry>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .rev()
            .map(|(i, e)| (e.word.clone(), i))
            .collect();
        Dictionary { entries, index }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_entries(
            words
                .into_iter()
                .map(|w| DictEntry {
                    word: w.into(),
                    count: 0,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Key width: `max(1, ceil(log2(n_words)))`.
    pub fn key_bits(&self) -> u32 {
        key_bits_for(self.entries.len())
    }

    pub fn word(&self, key: usize) -> Option<&str> {
        self.entries.get(key).map(|e| e.word.as_str())
    }

    pub fn key_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Total characters over all words.
    pub fn char_count(&self) -> usize {
        self.entries.iter().map(|e| e.word.chars().count()).sum()
    }
}

pub fn key_bits_for(n_words: usize) -> u32 {
    if n_words <= 2 {
        1
    } else {
        (n_words - 1).ilog2() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictionaryConfig {
    pub min_count: u32,
    pub min_len: usize,
    /// Drop words whose dictionary entry costs more bits than their
    /// occurrences are estimated to save.
    pub gain_filter: bool,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig {
            min_count: MIN_COUNT,
            min_len: MIN_WORD_LEN,
            gain_filter: false,
        }
    }
}

/// Selects repeated words from `corpus` with the default rule.
pub fn build_dictionary<S: AsRef<str>>(corpus: &[S]) -> Dictionary {
    build_dictionary_with(corpus, &DictionaryConfig::default())
}

pub fn build_dictionary_with<S: AsRef<str>>(corpus: &[S], config: &DictionaryConfig) -> Dictionary {
    // (count, first appearance)
    let mut stats: HashMap<&str, (u32, usize)> = HashMap::new();
    for text in corpus {
        for tok in tokenize(text.as_ref()).into_iter().filter(|t| t.is_word) {
            let next = stats.len();
            stats.entry(tok.text).or_insert((0, next)).0 += 1;
        }
    }
    let mut picked: Vec<(&str, u32, usize)> = stats
        .into_iter()
        .filter(|&(w, (count, _))| count >= config.min_count && w.chars().count() >= config.min_len)
        .map(|(w, (count, first))| (w, count, first))
        .collect();
    picked.sort_by_key(|&(_, count, first)| (std::cmp::Reverse(count), first));

    if config.gain_filter {
        loop {
            let key_bits = key_bits_for(picked.len()) as usize;
            let before = picked.len();
            picked.retain(|&(w, count, _)| {
                let len = w.len();
                let cost = 9 + 7 * len;
                // A reference replaces 7·len character bits with a type bit,
                // the key, a NUL separator and the type bit of the following
                // constant.
                let saving_each = (7 * len) as i64 - (key_bits + 9) as i64;
                (cost as i64) < count as i64 * saving_each
            });
            if picked.len() == before {
                break;
            }
        }
    }

    Dictionary::from_entries(
        picked
            .into_iter()
            .map(|(w, count, _)| DictEntry {
                word: w.to_owned(),
                count,
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    /// Raw characters; never empty.
    Constant(String),
    /// Index into the dictionary.
    DictRef(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedString {
    pub coding: Coding,
    pub segments: Vec<Segment>,
}

impl SegmentedString {
    /// Concatenates the segments, expanding references through `dict`.
    pub fn reassemble(&self, dict: &Dictionary) -> Option<String> {
        let mut out = String::new();
        for seg in &self.segments {
            match seg {
                Segment::Constant(s) => out.push_str(s),
                Segment::DictRef(k) => out.push_str(dict.word(*k)?),
            }
        }
        Some(out)
    }
}

/// Replaces whole word tokens found in `dict` by references and merges all
/// other content into maximal constant runs.
pub fn segment(text: &str, dict: &Dictionary) -> SegmentedString {
    let mut segments = Vec::new();
    let mut pending = String::new();
    for tok in tokenize(text) {
        match tok.is_word.then(|| dict.key_of(tok.text)).flatten() {
            Some(key) => {
                if !pending.is_empty() {
                    segments.push(Segment::Constant(std::mem::take(&mut pending)));
                }
                segments.push(Segment::DictRef(key));
            }
            None => pending.push_str(tok.text),
        }
    }
    if !pending.is_empty() {
        segments.push(Segment::Constant(pending));
    }
    SegmentedString {
        coding: Coding::for_text(text),
        segments,
    }
}
