//! JSON envelope shared by every artifact the tool writes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub schema_version: u32,
    pub kind: String,
    pub body: T,
}

/// Pretty JSON with a trailing newline; field order follows the Rust types,
/// so equal values always serialize to equal bytes.
pub fn to_json<T: Serialize>(kind: &str, body: &T) -> String {
    let env = Artifact { schema_version: SCHEMA_VERSION, kind: kind.to_string(), body };
    let mut s = serde_json::to_string_pretty(&env).expect("artifact serializes");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T, Error> {
    let env: Artifact<T> = serde_json::from_str(text)?;
    if env.kind != kind {
        return Err(Error::Artifact(format!("expected a {kind} artifact, found {}", env.kind)));
    }
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::Artifact(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            env.schema_version
        )));
    }
    Ok(env.body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_kind_check() {
        let text = to_json("demo", &vec![1, 2, 3]);
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(from_json::<Vec<i32>>("demo", &text).unwrap(), vec![1, 2, 3]);
        assert!(from_json::<Vec<i32>>("other", &text).is_err());
    }
}
