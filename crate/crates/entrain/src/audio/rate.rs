//! Speaking rate from orthographic syllable estimation.
//!
//! Syllables per word = number of vowel-letter groups (vowels: a e i o u
//! á é í ó ú ü, plus word-final y for LANG2/English words), minimum 1.
//! Rate = total syllables / utterance duration.

use crate::corpus::{Lang, Utterance};

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'á' | 'é' | 'í' | 'ó' | 'ú' | 'ü')
}

/// Orthographic syllable estimate for one word.
pub fn syllable_count(word: &str, lang: Lang) -> usize {
    let lower = word.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let last = chars.len().saturating_sub(1);
    let mut groups = 0usize;
    let mut in_group = false;
    for (i, c) in chars.iter().enumerate() {
        let vowel = is_vowel(*c) || (lang == Lang::Lang2 && *c == 'y' && i == last);
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }
    groups.max(1)
}

/// Syllables per second over the utterance span.
pub fn speaking_rate(utt: &Utterance) -> f64 {
    let syllables: usize = utt.tokens.iter().map(|t| syllable_count(&t.surface, t.lang)).sum();
    syllables as f64 / utt.duration()
}
