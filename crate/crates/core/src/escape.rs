//! Printable rendering of raw bytes.
//!
//! Printable ASCII is shown as-is, a backslash is doubled, and every other
//! byte is written as `\xNN`. [`unescape`] is the exact inverse.

use std::fmt::Write;

pub fn escape_byte(b: u8) -> String {
    let mut out = String::new();
    push_escaped(&mut out, b);
    out
}

pub fn escape_bytes(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for &b in bytes {
        push_escaped(&mut out, b);
    }
    out
}

fn push_escaped(out: &mut String, b: u8) {
    match b {
        b'\\' => out.push_str("\\\\"),
        0x20..=0x7e => out.push(b as char),
        _ => {
            let _ = write!(out, "\\x{b:02X}");
        }
    }
}

/// Decode `\xNN` and `\\` escapes; other characters are taken as their
/// UTF-8 bytes. Returns `None` on a dangling or malformed escape.
pub fn unescape(s: &str) -> Option<Vec<u8>> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'\\' {
            out.push(bytes[i]);
            i += 1;
            continue;
        }
        match bytes.get(i + 1) {
            Some(b'\\') => {
                out.push(b'\\');
                i += 2;
            }
            Some(b'x') | Some(b'X') => {
                let hex = s.get(i + 2..i + 4)?;
                out.push(u8::from_str_radix(hex, 16).ok()?);
                i += 4;
            }
            Some(b',') => {
                out.push(b',');
                i += 2;
            }
            _ => return None,
        }
    }
    Some(out)
}
