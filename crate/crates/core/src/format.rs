//! Versioned file header shared by every JSON file the toolkit reads or writes.

use thiserror::Error;

/// Value of the `"format"` key in every file.
pub const FORMAT_TAG: &str = "revigis/1";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unsupported file format `{found}` (expected `{FORMAT_TAG}`)")]
pub struct FormatError {
    pub found: String,
}

/// Accepts files without a header (hand-written inputs) and files tagged with
/// the current version; rejects any other tag.
pub fn check_format(tag: Option<&str>) -> Result<(), FormatError> {
    match tag {
        None => Ok(()),
        Some(t) if t == FORMAT_TAG => Ok(()),
        Some(t) => Err(FormatError { found: t.to_string() }),
    }
}


/// Canonical serialisation: two-space pretty JSON with a trailing newline.
/// Every file and report the toolkit writes goes through here, so identical
/// values always produce identical bytes.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialise");
    s.push('\n');
    s
}
