//! Portable JSON form of a decision tree, consumed by the browser wizard.
//!
//! ```json
//! {
//!   "format": "sqry-tree",
//!   "version": 1,
//!   "root": {
//!     "kind": "ask",
//!     "prompt": "Operation?",
//!     "branches": [
//!       { "match": "Configuration", "child": { "kind": "print", "text": "IP", "next": { "kind": "exit" } } }
//!     ]
//!   }
//! }
//! ```
//!
//! Node kinds are `exit`, `print` (`text`, `next`), `ask` (`prompt`,
//! `branches` of `match`/`child`) and `ask_numeric` (`prompt`, `thresholds`
//! of `limit`/`child`, optional `otherwise`). `version` follows the binary
//! payload version.
//!
//! Import accepts trees as deep as the binary format allows
//! ([`MAX_DEPTH`](crate::ir::MAX_DEPTH)); documents nested deeper than such a
//! tree could need are rejected before parsing.

use serde::{Deserialize, Serialize};
use serde_json::Deserializer;
use thiserror::Error;

use crate::codec::VERSION;
use crate::ir::{IrError, Program, ProgramNode, MAX_DEPTH};

pub const FORMAT_NAME: &str = "sqry-tree";

/// JSON nesting of the deepest valid document: each `ask` level takes three
/// (node, `branches` array, branch object), plus the envelope and the leaf.
const MAX_JSON_DEPTH: usize = 3 * MAX_DEPTH + 2;

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a {FORMAT_NAME} document (format {0:?})")]
    Format(String),
    #[error("unsupported document version {0}")]
    Version(u64),
    #[error("document nested deeper than {MAX_JSON_DEPTH} levels")]
    TooDeep,
    #[error("invalid program: {0}")]
    Invalid(#[from] IrError),
}

#[derive(Debug, Serialize, Deserialize)]
struct Document<N> {
    format: String,
    version: u64,
    root: N,
}

pub fn export_document(program: &Program) -> String {
    let doc = Document {
        format: FORMAT_NAME.to_owned(),
        version: VERSION,
        root: program.root(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("tree serializes");
    out.push('\n');
    out
}

/// Deepest `{`/`[` nesting outside string literals.
fn json_depth(text: &str) -> usize {
    let (mut depth, mut max) = (0usize, 0);
    let (mut in_string, mut escaped) = (false, false);
    for b in text.bytes() {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' | b'[' => {
                depth += 1;
                max = max.max(depth);
            }
            b'}' | b']' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    max
}

pub fn import_document(text: &str) -> Result<Program, InterchangeError> {
    if json_depth(text) > MAX_JSON_DEPTH {
        return Err(InterchangeError::TooDeep);
    }
    let mut de = Deserializer::from_str(text);
    // Bounded by the depth check above.
    de.disable_recursion_limit();
    let doc = Document::<ProgramNode>::deserialize(&mut de)?;
    de.end()?;
    if doc.format != FORMAT_NAME {
        return Err(InterchangeError::Format(doc.format));
    }
    if doc.version != VERSION {
        return Err(InterchangeError::Version(doc.version));
    }
    Ok(Program::new(doc.root)?)
}
