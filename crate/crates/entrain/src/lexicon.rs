//! Word lists: affirmative cue words and filled pauses.
//!
//! Lexicon files are plain text, one word per line, `#` starts a comment.
//! The built-in defaults cover both languages of a Spanish-English corpus
//! plus common spelling variants (`uhuh` and `aha` for `uh-huh`, `yah` for
//! `yeah`, `mmm` for `mm`, `errr` for `er`, ...).

use std::collections::BTreeSet;
use std::io;
use std::path::Path;

/// A case-folded word set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    words: BTreeSet<String>,
}

impl Lexicon {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_words(
            text.lines().map(|l| l.split('#').next().unwrap_or("")).filter(|l| !l.trim().is_empty()),
        ))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn union(&self, other: &Lexicon) -> Lexicon {
        Lexicon { words: self.words.union(&other.words).cloned().collect() }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Affirmative cue words (both languages) plus spelling variants.
pub fn default_cues() -> Lexicon {
    Lexicon::from_words([
        "alright", "gotcha", "huh", "mm-hm", "okay", "right", "uh-huh", "yeah", "yep", "yes",
        "yup", "aja", "claro", "dale", "ooh", "sí", "vale", "venga",
        // spelling variants
        "uhuh", "aha", "yah", "si", "mhm", "mmhm", "ok",
    ])
}

/// Filled pauses (both languages) plus spelling variants.
pub fn default_fillers() -> Lexicon {
    Lexicon::from_words([
        "ah", "ahem", "ay", "eh", "ehm", "er", "hmm", "hmf", "mm", "pues", "uff", "uh", "um",
        // spelling variants
        "mmm", "errr", "err", "hm",
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_folded_lookup() {
        let lex = default_cues();
        assert!(lex.contains("Okay"));
        assert!(lex.contains("uh-huh"));
        assert!(lex.contains("uhuh"));
        assert!(lex.contains("sí"));
        assert!(!lex.contains("pagar"));
    }

    #[test]
    fn loads_file_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.txt");
        std::fs::write(&path, "# cue words\nokay\nYeah  # variant\n\npues\n").unwrap();
        let lex = Lexicon::load(&path).unwrap();
        assert_eq!(lex.len(), 3);
        assert!(lex.contains("yeah"));
        assert!(lex.contains("pues"));
    }
}
