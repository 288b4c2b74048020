//! Framework manifest: which qualified type names belong to the framework
//! under study, and which extra names count as external primitives.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Names every MiniLang unit may reference without an import.
pub const BUILTIN_TYPES: &[&str] = &[
    "void",
    "int",
    "long",
    "short",
    "byte",
    "char",
    "float",
    "double",
    "boolean",
    "String",
    "Object",
    "System",
    "Math",
    "Integer",
    "Exception",
    "RuntimeException",
    "Thread",
    "StringBuilder",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkManifest {
    pub name: String,
    /// Namespace prefixes such as `jaas.`; a type is framework-owned when its
    /// qualified name starts with one of them.
    pub prefixes: Vec<String>,
    #[serde(default)]
    pub externals: Vec<String>,
    /// Directory holding the framework's own MiniLang source, relative to the
    /// manifest file.
    #[serde(default)]
    pub source: Option<PathBuf>,
}

impl FrameworkManifest {
    pub fn new(name: impl Into<String>, prefixes: &[&str]) -> Self {
        FrameworkManifest {
            name: name.into(),
            prefixes: prefixes.iter().map(|p| p.to_string()).collect(),
            externals: Vec::new(),
            source: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    /// Loads a manifest and resolves `source` against the manifest's directory.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut manifest = Self::from_toml(&text)?;
        if let Some(src) = manifest.source.take() {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            manifest.source = Some(base.join(src));
        }
        Ok(manifest)
    }

    pub fn is_framework_type(&self, qualified: &str) -> bool {
        self.prefixes.iter().any(|p| qualified.starts_with(p.as_str()))
    }

    pub fn is_external(&self, name: &str) -> bool {
        BUILTIN_TYPES.contains(&name) || self.externals.iter().any(|e| e == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_toml_manifest() {
        let m = FrameworkManifest::from_toml(
            "name = \"jaas\"\nprefixes = [\"jaas.\"]\nexternals = [\"Logger\"]\n",
        )
        .unwrap();
        assert_eq!(m.name, "jaas");
        assert!(m.is_framework_type("jaas.LoginContext"));
        assert!(!m.is_framework_type("app.LoginContext"));
        assert!(m.is_external("Logger"));
        assert!(m.is_external("String"));
        assert!(m.source.is_none());
    }

    #[test]
    fn rejects_malformed_manifest() {
        assert!(FrameworkManifest::from_toml("name = ").is_err());
    }
}
