//! JSON report envelope shared by the CLI, the harness and the FFI layer.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// SHA-256 over git blob framing (`blob <len>\0` followed by the bytes).
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRef {
    pub role: String,
    pub sha256: String,
}

impl InputRef {
    pub fn new(role: &str, bytes: &[u8]) -> Self {
        InputRef { role: role.to_string(), sha256: content_hash(bytes) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: u32,
    pub command: String,
    pub inputs: Vec<InputRef>,
    pub outcome: String,
    /// The statement the outcome rests on.
    pub basis: String,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, inputs: Vec<InputRef>, outcome: &str, basis: &str, result: T) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outcome: outcome.to_string(),
            basis: basis.to_string(),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_git_framing() {
        // `git hash-object --object-format=sha256` on an empty file
        assert_eq!(content_hash(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
        assert_ne!(content_hash(b"a"), content_hash(b"b"));
    }
}
