//! Toolchain for executable QR codes in the QRtree decision-tree dialect with
//! dictionary-based string compression.
//!
//! Generation chain: [`frontend::parse`] → [`ir::Program`] →
//! [`codec::encode_program`] → [`packaging::pack`] / [`packaging::emit_qr`].
//! Execution chain: [`packaging::read_qr`] → [`codec::decode_bytes`] →
//! [`vm::Session`].

pub mod cli;
pub mod codec;
pub mod corpus;
pub mod frontend;
pub mod interchange;
pub mod ir;
pub mod packaging;
pub mod report;
pub mod textcomp;
pub mod vm;
