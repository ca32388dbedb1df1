//! Bundled configuration: modulus sets, addition chains and active-volume
//! weights for the standard field sizes.

use crate::gf2_field::{FieldError, ModulusSet};

/// Environment variable naming a directory that overrides bundled files.
pub const DATA_DIR_ENV: &str = "GF2SHOR_DATA";

const MODULI: [(usize, &str); 4] = [
    (163, include_str!("../data/moduli/n163.txt")),
    (233, include_str!("../data/moduli/n233.txt")),
    (283, include_str!("../data/moduli/n283.txt")),
    (571, include_str!("../data/moduli/n571.txt")),
];

const CHAINS: [(usize, &str); 4] = [
    (163, include_str!("../data/chains/n163.txt")),
    (233, include_str!("../data/chains/n233.txt")),
    (283, include_str!("../data/chains/n283.txt")),
    (571, include_str!("../data/chains/n571.txt")),
];

/// Calibrated active-volume weights, `key = value` per line.
pub const AV_WEIGHTS: &str = include_str!("../data/av_weights.txt");

fn override_file(rel: &str) -> Option<String> {
    let dir = std::env::var_os(DATA_DIR_ENV)?;
    std::fs::read_to_string(std::path::Path::new(&dir).join(rel)).ok()
}

/// Text of the bundled modulus set for `n`, honoring the data-directory
/// override.
pub fn modulus_set_text(n: usize) -> Option<String> {
    override_file(&format!("moduli/n{n}.txt"))
        .or_else(|| MODULI.iter().find(|(k, _)| *k == n).map(|(_, t)| t.to_string()))
}

/// Text of the bundled addition chain for `n`.
pub fn chain_text(n: usize) -> Option<String> {
    override_file(&format!("chains/n{n}.txt"))
        .or_else(|| CHAINS.iter().find(|(k, _)| *k == n).map(|(_, t)| t.to_string()))
}

/// Text of the active-volume weights.
pub fn av_weights_text() -> String {
    override_file("av_weights.txt").unwrap_or_else(|| AV_WEIGHTS.to_string())
}

/// Parsed modulus set for a standard field size.
pub fn standard_modulus_set(n: usize) -> Result<ModulusSet, FieldError> {
    let text = modulus_set_text(n).ok_or(FieldError::UnsupportedDegree(n))?;
    ModulusSet::parse(&text, n)
}
