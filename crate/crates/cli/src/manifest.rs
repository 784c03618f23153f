//! Run manifests: enough to rerun a command and check its output byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use superhopf::linalg::FieldSpec;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub field: Option<FieldSpec>,
    pub version: String,
    pub seed: Option<u64>,
    /// Hex SHA-256 of the canonical JSON rendering of the result.
    pub digest: String,
}

/// Result of one command before rendering.
#[derive(Clone, Debug)]
pub struct Output {
    pub command: String,
    pub parameters: Value,
    pub field: Option<FieldSpec>,
    pub seed: Option<u64>,
    pub result: Value,
    pub table: String,
    pub exit_code: i32,
}

pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize") + "\n"
}

pub fn digest(v: &Value) -> String {
    let hash = Sha256::digest(canonical_json(v).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

impl Output {
    pub fn manifest(&self) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            parameters: self.parameters.clone(),
            field: self.field.clone(),
            version: TOOL_VERSION.to_string(),
            seed: self.seed,
            digest: digest(&self.result),
        }
    }

    pub fn document(&self) -> Value {
        serde_json::json!({
            "manifest": self.manifest(),
            "result": self.result,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        let v = serde_json::json!({"b": 1, "a": [1, 2]});
        assert_eq!(digest(&v), digest(&v.clone()));
        assert_ne!(digest(&v), digest(&serde_json::json!({"a": [1, 2], "b": 1})));
        assert_eq!(digest(&v).len(), 64);
    }
}
