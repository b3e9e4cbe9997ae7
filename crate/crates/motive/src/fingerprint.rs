//! Content hashes identifying models, lexicons and report configurations.

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Short id of a checkpoint: the first 16 hex digits of the hash of the
/// whole file, so retrained weights get a new id.
pub fn model_id(checkpoint_text: &str) -> String {
    sha256_hex(checkpoint_text.as_bytes())[..16].to_string()
}

/// Hash of the model header, the lexicon file and the preparation settings
/// that went into a report.
pub fn report_fingerprint(model_id: &str, lexicon_bytes: &[u8], prep_settings: &str) -> String {
    let mut h = Sha256::new();
    for part in [model_id.as_bytes(), sha256_hex(lexicon_bytes).as_bytes(), prep_settings.as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    format!("{:x}", h.finalize())[..16].to_string()
}
