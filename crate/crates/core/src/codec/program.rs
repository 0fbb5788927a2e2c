//! Whole-program serialization.
//!
//! ```text
//! payload  := version:4 header-command* END_HEADER:3 node
//! command  := DICT_LOCAL:3 000 count:exp word*        (at most once)
//! node     := 00                                      exit
//!           | 01 string node                          print
//!           | 10 string count:exp (string node)*      ask
//!           | 11 string count:exp (limit:exp node)* has-otherwise:1 node?
//! ```
//!
//! Strings use compressed framing when the header carries a dictionary and
//! plain framing otherwise.

use super::bits::{BitReader, BitStream};
use super::expcode::{exp_decode, exp_encode};
use super::strings::{
    decode_dictionary_body, decode_string_compressed, decode_string_plain, encode_dictionary, encode_string_compressed,
    encode_string_plain, DICT_LOCAL,
};
use super::CodecError;
use crate::ir::{Branch, Program, ProgramNode, Threshold, MAX_DEPTH};
use crate::textcomp::{segment, Coding, Dictionary};

pub const VERSION: u64 = 0b0001;
pub const VERSION_BITS: u32 = 4;
pub const END_HEADER: u64 = 0b000;
pub const COMMAND_BITS: u32 = 3;

const TAG_EXIT: u64 = 0b00;
const TAG_PRINT: u64 = 0b01;
const TAG_ASK: u64 = 0b10;
const TAG_ASK_NUMERIC: u64 = 0b11;

/// Serialized program with its bit accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPayload {
    pub bits: BitStream,
    pub header_bits: usize,
    pub body_bits: usize,
    /// Bits of the DICT_LOCAL command, zero when absent.
    pub dictionary_bits: usize,
    /// Bits spent on string literals in the body, framing included.
    pub string_bits: usize,
}

impl EncodedPayload {
    pub fn total_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn byte_len(&self) -> usize {
        self.bits.len().div_ceil(8)
    }
}

struct Encoder<'d> {
    out: BitStream,
    dict: Option<&'d Dictionary>,
    string_bits: usize,
}

impl Encoder<'_> {
    fn string(&mut self, text: &str) -> Result<(), CodecError> {
        let before = self.out.len();
        match self.dict {
            Some(d) => encode_string_compressed(&segment(text, d), d, &mut self.out)?,
            None => encode_string_plain(text, Coding::for_text(text), &mut self.out)?,
        }
        self.string_bits += self.out.len() - before;
        Ok(())
    }

    fn node(&mut self, mut node: &ProgramNode) -> Result<(), CodecError> {
        loop {
            match node {
                ProgramNode::Exit => {
                    self.out.push_bits(TAG_EXIT, 2);
                    return Ok(());
                }
                ProgramNode::Print { text, next } => {
                    self.out.push_bits(TAG_PRINT, 2);
                    self.string(text)?;
                    node = next;
                }
                ProgramNode::Ask { prompt, branches } => {
                    self.out.push_bits(TAG_ASK, 2);
                    self.string(prompt)?;
                    exp_encode(branches.len() as i64, &mut self.out);
                    for b in branches {
                        self.string(&b.matcher)?;
                        self.node(&b.child)?;
                    }
                    return Ok(());
                }
                ProgramNode::AskNumeric {
                    prompt,
                    thresholds,
                    otherwise,
                } => {
                    self.out.push_bits(TAG_ASK_NUMERIC, 2);
                    self.string(prompt)?;
                    exp_encode(thresholds.len() as i64, &mut self.out);
                    for t in thresholds {
                        exp_encode(t.limit, &mut self.out);
                        self.node(&t.child)?;
                    }
                    self.out.push_bit(otherwise.is_some());
                    match otherwise {
                        Some(o) => node = o,
                        None => return Ok(()),
                    }
                }
            }
        }
    }
}

/// Serializes `program`; with a non-empty dictionary the dictionary goes into
/// the header and every string is compressed against it.
pub fn encode_program(program: &Program, dict: Option<&Dictionary>) -> Result<EncodedPayload, CodecError> {
    let dict = dict.filter(|d| !d.is_empty());
    let mut out = BitStream::new();
    out.push_bits(VERSION, VERSION_BITS);
    let mut dictionary_bits = 0;
    if let Some(d) = dict {
        let before = out.len();
        encode_dictionary(d, &mut out)?;
        dictionary_bits = out.len() - before;
    }
    out.push_bits(END_HEADER, COMMAND_BITS);
    let header_bits = out.len();

    let mut enc = Encoder {
        out,
        dict,
        string_bits: 0,
    };
    enc.node(program.root())?;
    let body_bits = enc.out.len() - header_bits;
    Ok(EncodedPayload {
        bits: enc.out,
        header_bits,
        body_bits,
        dictionary_bits,
        string_bits: enc.string_bits,
    })
}

struct Decoder<'a> {
    r: BitReader<'a>,
    dict: Option<Dictionary>,
}

impl Decoder<'_> {
    fn string(&mut self) -> Result<String, CodecError> {
        match &self.dict {
            Some(d) => decode_string_compressed(&mut self.r, d),
            None => decode_string_plain(&mut self.r),
        }
    }

    fn count(&mut self) -> Result<usize, CodecError> {
        let at = self.r.position();
        let count = exp_decode(&mut self.r)?;
        // Every entry needs at least two bits, so larger counts are garbage.
        if count < 1 || count as u64 > self.r.remaining() as u64 {
            return Err(CodecError::BadCount { at, count });
        }
        Ok(count as usize)
    }

    /// Reads a run of prints and the tag of the node that ends it.
    fn prints_then_tag(&mut self, depth: usize) -> Result<(Vec<String>, u64), CodecError> {
        let mut prints = Vec::new();
        loop {
            match self.r.read_bits(2)? {
                TAG_PRINT => {
                    if depth + prints.len() >= MAX_DEPTH {
                        return Err(CodecError::TooDeep);
                    }
                    prints.push(self.string()?);
                }
                tag => return Ok((prints, tag)),
            }
        }
    }

    /// Decodes one tree without recursion; open questions wait on `stack`
    /// while their children are read.
    fn tree(&mut self) -> Result<ProgramNode, CodecError> {
        let mut stack: Vec<Open> = Vec::new();
        let mut depth = 0;
        loop {
            let (prints, tag) = self.prints_then_tag(depth)?;
            let mut done = match tag {
                TAG_EXIT => wrap(prints, ProgramNode::Exit),
                TAG_ASK | TAG_ASK_NUMERIC => {
                    if depth + prints.len() >= MAX_DEPTH {
                        return Err(CodecError::TooDeep);
                    }
                    let prompt = self.string()?;
                    let remaining = self.count()?;
                    let kind = if tag == TAG_ASK {
                        OpenKind::Ask {
                            branches: Vec::new(),
                            matcher: self.string()?,
                        }
                    } else {
                        OpenKind::Numeric {
                            thresholds: Vec::new(),
                            limit: Some(exp_decode(&mut self.r)?),
                        }
                    };
                    depth += prints.len() + 1;
                    stack.push(Open {
                        prints,
                        prompt,
                        remaining,
                        kind,
                    });
                    continue;
                }
                _ => unreachable!("two-bit tag"),
            };
            // Hand finished subtrees to their parents until one needs another child.
            loop {
                let Some(open) = stack.last_mut() else {
                    return Ok(done);
                };
                open.remaining = open.remaining.saturating_sub(1);
                let more = match &mut open.kind {
                    OpenKind::Ask { branches, matcher } => {
                        branches.push(Branch {
                            matcher: std::mem::take(matcher),
                            child: done,
                        });
                        if open.remaining > 0 {
                            *matcher = self.string()?;
                            true
                        } else {
                            false
                        }
                    }
                    OpenKind::Numeric { thresholds, limit } => match limit.take() {
                        Some(l) => {
                            thresholds.push(Threshold { limit: l, child: done });
                            if open.remaining > 0 {
                                *limit = Some(exp_decode(&mut self.r)?);
                                true
                            } else {
                                self.r.read_bit()?
                            }
                        }
                        None => {
                            // The fallback arm just finished.
                            let node = ProgramNode::AskNumeric {
                                prompt: std::mem::take(&mut open.prompt),
                                thresholds: std::mem::take(thresholds),
                                otherwise: Some(Box::new(done)),
                            };
                            let open = stack.pop().expect("non-empty");
                            depth -= open.prints.len() + 1;
                            done = wrap(open.prints, node);
                            continue;
                        }
                    },
                };
                if more {
                    break;
                }
                let open = stack.pop().expect("non-empty");
                depth -= open.prints.len() + 1;
                let node = match open.kind {
                    OpenKind::Ask { branches, .. } => ProgramNode::Ask {
                        prompt: open.prompt,
                        branches,
                    },
                    OpenKind::Numeric { thresholds, .. } => ProgramNode::AskNumeric {
                        prompt: open.prompt,
                        thresholds,
                        otherwise: None,
                    },
                };
                done = wrap(open.prints, node);
            }
        }
    }
}

/// A question whose children are still being decoded.
struct Open {
    prints: Vec<String>,
    prompt: String,
    remaining: usize,
    kind: OpenKind,
}

enum OpenKind {
    /// `matcher` belongs to the child currently being decoded.
    Ask { branches: Vec<Branch>, matcher: String },
    /// `limit` belongs to the child being decoded; `None` while decoding the fallback arm.
    Numeric {
        thresholds: Vec<Threshold>,
        limit: Option<i64>,
    },
}

fn wrap(prints: Vec<String>, terminal: ProgramNode) -> ProgramNode {
    prints
        .into_iter()
        .rev()
        .fold(terminal, |next, text| ProgramNode::print(text, next))
}

/// Decoded header contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub dictionary: Option<Dictionary>,
    pub bits: usize,
}

pub fn decode_header(r: &mut BitReader<'_>) -> Result<Header, CodecError> {
    let version = r.read_bits(VERSION_BITS)?;
    if version != VERSION {
        return Err(CodecError::UnknownVersion(version as u8));
    }
    let mut dictionary = None;
    loop {
        let at = r.position();
        match r.read_bits(COMMAND_BITS)? {
            END_HEADER => break,
            DICT_LOCAL if dictionary.is_none() => dictionary = Some(decode_dictionary_body(r)?),
            _ => return Err(CodecError::BadHeaderCommand { at }),
        }
    }
    Ok(Header {
        dictionary,
        bits: r.position(),
    })
}

/// Decodes a program from packed bits. Trailing padding is ignored.
pub fn decode_program(bits: &BitStream) -> Result<Program, CodecError> {
    decode_from(bits.reader())
}

pub fn decode_bytes(bytes: &[u8]) -> Result<Program, CodecError> {
    decode_from(BitReader::from_bytes(bytes))
}

fn decode_from(mut r: BitReader<'_>) -> Result<Program, CodecError> {
    let header = decode_header(&mut r)?;
    let mut dec = Decoder {
        r,
        dict: header.dictionary,
    };
    let root = dec.tree()?;
    Program::new(root).map_err(CodecError::Invalid)
}


#[cfg(test)]
mod depth_tests {
    use super::*;

    #[test]
    fn deeply_nested_questions_round_trip() {
        let mut node = ProgramNode::Exit;
        for _ in 0..MAX_DEPTH {
            node = ProgramNode::ask("", [("", node)]);
        }
        let p = Program::new(node).unwrap();
        let e = encode_program(&p, None).unwrap();
        let back = decode_program(&e.bits).unwrap();
        assert!(back == p);
        let f = crate::frontend::format(&p);
        assert!(crate::frontend::parse(&f).unwrap() == p);

        let deeper = ProgramNode::ask("", [("", p.into_root())]);
        assert_eq!(Program::new(deeper).unwrap_err(), crate::ir::IrError::TooDeep);
    }
}
