//! The three published coefficient sets, shipped as scheme files.

use crate::schemefile::SchemeFile;

use super::{SchemeDefinition, SchemeId};

pub const BUNDLED_IDS: [&str; 3] = ["P1", "P2", "P3"];

const P1_JSON: &str = include_str!("../../schemes/p1.json");
const P2_JSON: &str = include_str!("../../schemes/p2.json");
const P3_JSON: &str = include_str!("../../schemes/p3.json");

/// Raw JSON of a bundled scheme file.
pub fn bundled_json(id: SchemeId) -> &'static str {
    match id {
        SchemeId::P1 => P1_JSON,
        SchemeId::P2 => P2_JSON,
        SchemeId::P3 => P3_JSON,
    }
}

/// Published coefficients of `id`, as tabulated (not re-derived from the closure).
pub fn bundled(id: SchemeId) -> SchemeDefinition {
    SchemeFile::from_json(bundled_json(id))
        .and_then(|f| f.to_definition())
        .expect("bundled scheme files are well-formed")
}
