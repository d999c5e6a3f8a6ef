//! Manual annotation overrides for CSW strategy labels.
//!
//! Override files are line-delimited JSON records:
//!
//! ```text
//! {"conversation_id":"c1","utterance_index":4,"strategies":["alternational"]}
//! ```
//!
//! Short forms `"I"`, `"A"`, `"O"` are accepted. A manual label replaces the
//! heuristic one and flips the provenance to `manual`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

use super::{CswError, CswStrategy, CswTable, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRecord {
    pub conversation_id: String,
    pub utterance_index: usize,
    pub strategies: BTreeSet<CswStrategy>,
}

/// Parses an override file (one JSON record per line, blank lines ignored).
pub fn parse_overrides(path: &Path) -> std::io::Result<Vec<OverrideRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("{}:{}: bad override record: {e}", path.display(), i + 1),
                )
            })
        })
        .collect()
}

/// Replaces heuristic strategy labels with manual ones.
///
/// Every record must reference an existing code-switched utterance; dangling
/// references are collected and reported together.
pub fn apply_overrides(
    table: &mut CswTable,
    overrides: &[OverrideRecord],
    corpus: &Corpus,
) -> Result<(), CswError> {
    let mut dangling = Vec::new();
    for rec in overrides {
        let exists = corpus
            .conversation(&rec.conversation_id)
            .is_some_and(|c| rec.utterance_index < c.utterances.len());
        let slot = table
            .per_conversation
            .get_mut(&rec.conversation_id)
            .and_then(|v| v.get_mut(rec.utterance_index));
        match (exists, slot) {
            (true, Some(Some(feats))) if feats.presence => {
                feats.strategies = rec.strategies.clone();
                feats.provenance = Provenance::Manual;
            }
            _ => dangling.push(format!(
                "{}#{}",
                rec.conversation_id, rec.utterance_index
            )),
        }
    }
    if dangling.is_empty() {
        Ok(())
    } else {
        Err(CswError::DanglingOverrides(dangling))
    }
}
