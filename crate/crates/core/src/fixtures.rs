//! Bundled link fixtures.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diagram::{parse_pd, Diagram, DiagramError};

/// The Z-colorable links up to ten crossings, by table name.
pub const LINK_TABLE: [&str; 16] = [
    "L8n6", "L8n8", "L9n18", "L9n19", "L9n27", "L10n32", "L10n36", "L10n56", "L10n57", "L10n59", "L10n91", "L10n93",
    "L10n94", "L10n104", "L10n107", "L10n111",
];

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture directory {0} does not exist (set ZCOLOR_FIXTURES)")]
    MissingDir(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: DiagramError },
}

/// `ZCOLOR_FIXTURES` if set, else the fixture directory of this checkout.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os("ZCOLOR_FIXTURES") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures")),
    }
}

pub fn load_file(path: &Path) -> Result<Diagram, FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: path.to_owned(), source })?;
    parse_pd(&text).map_err(|source| FixtureError::Parse { path: path.to_owned(), source })
}

pub fn load(name: &str) -> Result<Diagram, FixtureError> {
    load_from(&fixture_dir(), name)
}

pub fn load_from(dir: &Path, name: &str) -> Result<Diagram, FixtureError> {
    if !dir.is_dir() {
        return Err(FixtureError::MissingDir(dir.to_owned()));
    }
    load_file(&dir.join(format!("{name}.pd")))
}

/// Every link of [`LINK_TABLE`], in table order.
pub fn link_table() -> Result<Vec<(&'static str, Diagram)>, FixtureError> {
    let dir = fixture_dir();
    LINK_TABLE.iter().map(|&n| load_from(&dir, n).map(|d| (n, d))).collect()
}
