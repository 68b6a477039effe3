//! Text formats: `.pmdp` models in, `.pomdp` exchange documents in and out.

mod pmdp_format;
mod pomdp_format;

pub use pmdp_format::{parse_pmdp, write_pmdp, ParsedModel};
pub use pomdp_format::{parse_pomdp, serialize_pomdp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSource {
    pub text: String,
    /// File path, or `<builtin>`.
    pub origin: String,
}

impl ModelSource {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        ModelSource {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn from_file(path: &std::path::Path) -> std::io::Result<Self> {
        Ok(Self::new(std::fs::read_to_string(path)?, path.display().to_string()))
    }
}
