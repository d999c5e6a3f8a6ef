//! Interpolated Kneser-Ney smoothed trigram language model.
//!
//! Formulation (fixed so results are reproducible and exactly normalized):
//!
//! - Each sentence is padded with two start symbols; events are the trigrams
//!   ending at each real token. No end-of-sentence event is modeled.
//! - The trigram level uses raw counts; the bigram and unigram levels use
//!   Kneser-Ney continuation counts (distinct-context counts).
//! - Each order's absolute discount is D = n1/(n1 + 2·n2) from that order's
//!   count-of-count statistics (0 when n1 + 2·n2 = 0).
//! - The unknown word gets a unigram pseudo continuation count equal to the
//!   number of continuation singletons (at least 1), and the unigram level
//!   interpolates with the uniform distribution over vocabulary + UNK.
//!
//! For any history, probabilities over vocabulary + UNK sum to exactly 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

/// Start-of-sentence symbol (context only, never predicted).
pub const BOS: &str = "<s>";
/// Unknown-word symbol.
pub const UNK: &str = "<unk>";

type WordId = u32;
const BOS_ID: WordId = 0;
const UNK_ID: WordId = 1;
const FIRST_WORD_ID: WordId = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LmError {
    #[error("no training sentences")]
    EmptyInput,
    #[error("no scoreable tokens (all out-of-vocabulary with OOV excluded)")]
    NoScoreableTokens,
}

/// Interpolated Kneser-Ney trigram model.
#[derive(Debug, Clone)]
pub struct TrigramLm {
    ids: BTreeMap<String, WordId>,
    words: Vec<String>,
    trigrams: BTreeMap<(WordId, WordId, WordId), u64>,
    /// Σ_w c(u,v,w) per history.
    ctx2_total: BTreeMap<(WordId, WordId), u64>,
    /// Distinct followers per trigram history.
    ctx2_types: BTreeMap<(WordId, WordId), u64>,
    /// Continuation counts |{u : c(u,v,w) > 0}| per bigram.
    cont2: BTreeMap<(WordId, WordId), u64>,
    /// Σ_w cont2(v,w) per bigram context.
    cont2_total: BTreeMap<WordId, u64>,
    /// Distinct followers per bigram context (continuation world).
    cont2_types: BTreeMap<WordId, u64>,
    /// Continuation counts |{v : cont2(v,w) > 0}| per word.
    cont1: BTreeMap<WordId, u64>,
    /// UNK's pseudo continuation count (continuation singletons, min 1).
    unk_pseudo: u64,
    /// Σ cont1 + unk_pseudo.
    cont1_total: u64,
    discount: [f64; 3],
}

fn discount_from_counts<K: Ord>(counts: &BTreeMap<K, u64>) -> f64 {
    let n1 = counts.values().filter(|c| **c == 1).count() as f64;
    let n2 = counts.values().filter(|c| **c == 2).count() as f64;
    if n1 + 2.0 * n2 == 0.0 {
        0.0
    } else {
        n1 / (n1 + 2.0 * n2)
    }
}

/// Trains an interpolated KN trigram model. Sentences are word lists;
/// empty sentences are skipped.
pub fn train_trigram_kn<S: AsRef<str>>(sentences: &[Vec<S>]) -> Result<TrigramLm, LmError> {
    let mut ids: BTreeMap<String, WordId> = BTreeMap::new();
    let mut words: Vec<String> = vec![BOS.to_string(), UNK.to_string()];
    ids.insert(BOS.to_string(), BOS_ID);
    ids.insert(UNK.to_string(), UNK_ID);

    let mut trigrams: BTreeMap<(WordId, WordId, WordId), u64> = BTreeMap::new();
    let mut any = false;
    for sentence in sentences {
        if sentence.is_empty() {
            continue;
        }
        any = true;
        let mut seq: Vec<WordId> = vec![BOS_ID, BOS_ID];
        for w in sentence {
            let id = *ids.entry(w.as_ref().to_string()).or_insert_with(|| {
                words.push(w.as_ref().to_string());
                (words.len() - 1) as WordId
            });
            seq.push(id);
        }
        for i in 2..seq.len() {
            *trigrams.entry((seq[i - 2], seq[i - 1], seq[i])).or_default() += 1;
        }
    }
    if !any {
        return Err(LmError::EmptyInput);
    }

    let mut ctx2_total = BTreeMap::new();
    let mut ctx2_types = BTreeMap::new();
    let mut cont2 = BTreeMap::new();
    for (&(u, v, w), &c) in &trigrams {
        *ctx2_total.entry((u, v)).or_default() += c;
        *ctx2_types.entry((u, v)).or_default() += 1;
        let _ = u;
        *cont2.entry((v, w)).or_insert(0) += 1;
    }
    let mut cont2_total = BTreeMap::new();
    let mut cont2_types = BTreeMap::new();
    let mut cont1 = BTreeMap::new();
    for (&(v, w), &c) in &cont2 {
        *cont2_total.entry(v).or_default() += c;
        *cont2_types.entry(v).or_default() += 1;
        *cont1.entry(w).or_insert(0) += 1;
    }
    let unk_pseudo = cont1.values().filter(|c| **c == 1).count().max(1) as u64;
    let cont1_total = cont1.values().sum::<u64>() + unk_pseudo;
    let discount =
        [discount_from_counts(&cont1), discount_from_counts(&cont2), discount_from_counts(&trigrams)];

    Ok(TrigramLm {
        ids,
        words,
        trigrams,
        ctx2_total,
        ctx2_types,
        cont2,
        cont2_total,
        cont2_types,
        cont1,
        unk_pseudo,
        cont1_total,
        discount,
    })
}

impl TrigramLm {
    /// Number of word types seen in training (excludes BOS and UNK).
    pub fn vocab_size(&self) -> usize {
        self.words.len() - 2
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ids.get(word).is_some_and(|id| *id >= FIRST_WORD_ID)
    }

    /// Training vocabulary, in insertion order.
    pub fn vocab(&self) -> impl Iterator<Item = &str> {
        self.words.iter().skip(FIRST_WORD_ID as usize).map(String::as_str)
    }

    fn id_of(&self, word: &str) -> WordId {
        self.ids.get(word).copied().unwrap_or(UNK_ID)
    }

    fn p1(&self, w: WordId) -> f64 {
        let d1 = self.discount[0];
        let count = if w == UNK_ID {
            self.unk_pseudo
        } else {
            self.cont1.get(&w).copied().unwrap_or(0)
        } as f64;
        let z = self.cont1_total as f64;
        // All vocabulary types plus UNK have positive continuation mass.
        let t1 = (self.cont1.len() + 1) as f64;
        let uniform = 1.0 / (self.vocab_size() + 1) as f64;
        (count - d1).max(0.0) / z + d1 * t1 / z * uniform
    }

    fn p2(&self, v: WordId, w: WordId) -> f64 {
        let Some(&total) = self.cont2_total.get(&v) else {
            return self.p1(w);
        };
        let d2 = self.discount[1];
        let count = self.cont2.get(&(v, w)).copied().unwrap_or(0) as f64;
        let types = self.cont2_types[&v] as f64;
        let total = total as f64;
        (count - d2).max(0.0) / total + d2 * types / total * self.p1(w)
    }

    fn p3(&self, u: WordId, v: WordId, w: WordId) -> f64 {
        let Some(&total) = self.ctx2_total.get(&(u, v)) else {
            return self.p2(v, w);
        };
        let d3 = self.discount[2];
        let count = self.trigrams.get(&(u, v, w)).copied().unwrap_or(0) as f64;
        let types = self.ctx2_types[&(u, v)] as f64;
        let total = total as f64;
        (count - d3).max(0.0) / total + d3 * types / total * self.p2(v, w)
    }

    /// Probability of `word` after up to two history words (most recent
    /// last). Missing history backs off to the lower order; unknown words
    /// (in history or target) map to UNK.
    pub fn prob(&self, history: &[&str], word: &str) -> f64 {
        let w = self.id_of(word);
        match history {
            [.., u, v] => self.p3(self.id_of(u), self.id_of(v), w),
            [v] => self.p2(self.id_of(v), w),
            [] => self.p1(w),
        }
    }

    pub fn log_prob(&self, history: &[&str], word: &str) -> f64 {
        self.prob(history, word).ln()
    }

    /// Perplexity of `text` under this model.
    ///
    /// With `include_oov`, out-of-vocabulary words map to UNK and count
    /// toward the token total N; without it, OOV positions are skipped and
    /// excluded from N (the history still advances over them).
    pub fn perplexity<S: AsRef<str>>(
        &self,
        text: &[Vec<S>],
        include_oov: bool,
    ) -> Result<f64, LmError> {
        let mut log_probs = Vec::new();
        for sentence in text {
            if sentence.is_empty() {
                continue;
            }
            let mut seq: Vec<(WordId, bool)> = vec![(BOS_ID, false), (BOS_ID, false)];
            for w in sentence {
                let known = self.contains(w.as_ref());
                seq.push((self.id_of(w.as_ref()), known));
            }
            for i in 2..seq.len() {
                let (w, known) = seq[i];
                if !known && !include_oov {
                    continue;
                }
                log_probs.push(self.p3(seq[i - 2].0, seq[i - 1].0, w).ln());
            }
        }
        if log_probs.is_empty() {
            return Err(LmError::NoScoreableTokens);
        }
        Ok(perplexity_from_log_probs(&log_probs))
    }

    /// Dumps the model in the textual ARPA n-gram interchange format
    /// (orders with log10 probabilities and backoff weights).
    ///
    /// The interpolated model converts exactly: each listed n-gram carries
    /// its full interpolated probability, and backoff weights are the
    /// interpolation masses, so `p(w|u,v) = bow(u,v)·p(w|v)` reproduces
    /// unseen-extension probabilities bit-for-bit.
    pub fn to_arpa(&self) -> String {
        let name = |id: WordId| self.words[id as usize].as_str();
        let log10 = |p: f64| p.log10();

        // 1-grams: vocabulary + UNK + BOS (context-only, dummy probability).
        let mut unigrams: Vec<String> = Vec::new();
        let mut bow1 = |v: WordId| -> Option<f64> {
            self.cont2_total.get(&v).map(|&total| {
                self.discount[1] * self.cont2_types[&v] as f64 / total as f64
            })
        };
        let mut one = |id: WordId, logp: f64| {
            let line = match bow1(id) {
                Some(b) => format!("{:.7}\t{}\t{:.7}", logp, name(id), log10(b)),
                None => format!("{:.7}\t{}", logp, name(id)),
            };
            unigrams.push(line);
        };
        one(BOS_ID, -99.0);
        one(UNK_ID, log10(self.p1(UNK_ID)));
        for id in FIRST_WORD_ID..self.words.len() as WordId {
            one(id, log10(self.p1(id)));
        }

        // 2-grams: continuation types plus trigram contexts (so every
        // 3-gram's prefix is listed).
        let mut bigram_keys: Vec<(WordId, WordId)> = self.cont2.keys().copied().collect();
        for key in self.ctx2_total.keys() {
            if !self.cont2.contains_key(key) {
                bigram_keys.push(*key);
            }
        }
        bigram_keys.sort();
        bigram_keys.dedup();
        let mut bigrams: Vec<String> = Vec::new();
        for (v, w) in bigram_keys {
            let logp = if self.cont2.contains_key(&(v, w)) || self.cont2_total.contains_key(&v) {
                log10(self.p2(v, w))
            } else {
                -99.0
            };
            let line = match self.ctx2_total.get(&(v, w)) {
                Some(&total) => {
                    let bow = self.discount[2] * self.ctx2_types[&(v, w)] as f64 / total as f64;
                    format!("{:.7}\t{} {}\t{:.7}", logp, name(v), name(w), log10(bow))
                }
                None => format!("{:.7}\t{} {}", logp, name(v), name(w)),
            };
            bigrams.push(line);
        }

        let mut trigrams: Vec<String> = Vec::new();
        for &(u, v, w) in self.trigrams.keys() {
            trigrams.push(format!(
                "{:.7}\t{} {} {}",
                log10(self.p3(u, v, w)),
                name(u),
                name(v),
                name(w)
            ));
        }

        let mut out = String::new();
        let _ = writeln!(out, "\\data\\");
        let _ = writeln!(out, "ngram 1={}", unigrams.len());
        let _ = writeln!(out, "ngram 2={}", bigrams.len());
        let _ = writeln!(out, "ngram 3={}", trigrams.len());
        for (order, lines) in [(1, &unigrams), (2, &bigrams), (3, &trigrams)] {
            let _ = writeln!(out, "\n\\{order}-grams:");
            for line in lines {
                let _ = writeln!(out, "{line}");
            }
        }
        let _ = writeln!(out, "\n\\end\\");
        out
    }
}

/// ppl = exp(−(1/N)·Σ log p). The building block behind
/// [`TrigramLm::perplexity`], usable with any per-token log probabilities.
pub fn perplexity_from_log_probs(log_probs: &[f64]) -> f64 {
    let n = log_probs.len() as f64;
    (-log_probs.iter().sum::<f64>() / n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sents(text: &[&str]) -> Vec<Vec<String>> {
        text.iter().map(|s| s.split_whitespace().map(str::to_string).collect()).collect()
    }

    #[test]
    fn degenerate_corpus_concentrates_mass() {
        // "a a a a": hand-computed interpolated KN gives p(a|a a) = 71/72.
        let lm = train_trigram_kn(&sents(&["a a a a"])).unwrap();
        let p = lm.prob(&["a", "a"], "a");
        assert_abs_diff_eq!(p, 71.0 / 72.0, epsilon = 1e-12);
        assert!(p >= 0.9);
        assert_abs_diff_eq!(lm.prob(&["a", "a"], UNK), 1.0 / 72.0, epsilon = 1e-12);
    }

    #[test]
    fn hand_computed_toy_corpus_probabilities() {
        // Corpus "a b a c" + "a b b" (7 tokens). Frozen from the independent
        // oracle: D3 = 3/7, D2 = 1, D1 = 1/5; unigram continuation counts
        // a:2 b:2 c:1, UNK pseudo-count 1, Z = 6.
        let lm = train_trigram_kn(&sents(&["a b a c", "a b b"])).unwrap();
        let eps = 1e-6;
        assert_abs_diff_eq!(lm.prob(&[], "a"), 1.0 / 3.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&[], "b"), 1.0 / 3.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&[], "c"), 1.0 / 6.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&[], UNK), 1.0 / 6.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&[BOS, BOS], "a"), 6.0 / 7.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&[BOS, "a"], "b"), 6.0 / 7.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&["a", "b"], "a"), 3.0 / 7.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&["a", "b"], "b"), 3.0 / 7.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&["a", "b"], "c"), 1.0 / 14.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&["a", "b"], UNK), 1.0 / 14.0, epsilon = eps);
        assert_abs_diff_eq!(lm.prob(&["b", "a"], "c"), 9.0 / 14.0, epsilon = eps);
    }

    #[test]
    fn unseen_history_backs_off_to_bigram() {
        let lm = train_trigram_kn(&sents(&["a b a c", "a b b"])).unwrap();
        // "zzz" is OOV: the trigram context vanishes and the probability
        // equals the bigram estimate for the last context word.
        for w in ["a", "b", "c", UNK] {
            assert_abs_diff_eq!(lm.prob(&["zzz", "a"], w), lm.prob(&["a"], w), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(lm.prob(&["zzz", "a"], "b"), 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn normalization_over_random_histories() {
        let lm = train_trigram_kn(&sents(&["a b a c", "a b b", "c a b"])).unwrap();
        let mut pool: Vec<String> = lm.vocab().map(str::to_string).collect();
        pool.push(BOS.into());
        pool.push("zzz".into());
        pool.push("qqq".into());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = pool[rng.gen_range(0..pool.len())].clone();
            let v = pool[rng.gen_range(0..pool.len())].clone();
            let mut sum = 0.0;
            for w in lm.vocab() {
                sum += lm.prob(&[&u, &v], w);
            }
            sum += lm.prob(&[&u, &v], UNK);
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn training_text_beats_reversed_text() {
        let train = sents(&["el gato come pescado", "el perro come carne", "el gato duerme"]);
        let lm = train_trigram_kn(&train).unwrap();
        let reversed: Vec<Vec<String>> = train
            .iter()
            .map(|s| s.iter().rev().cloned().collect())
            .collect();
        let ppl_train = lm.perplexity(&train, true).unwrap();
        let ppl_rev = lm.perplexity(&reversed, true).unwrap();
        assert!(ppl_train < ppl_rev, "{ppl_train} !< {ppl_rev}");
    }

    #[test]
    fn uniform_log_probs_give_vocab_size() {
        let v = 17usize;
        let lps = vec![(1.0 / v as f64).ln(); 120];
        assert_abs_diff_eq!(perplexity_from_log_probs(&lps), v as f64, epsilon = 1e-9);
    }

    #[test]
    fn all_oov_without_unk_is_error() {
        let lm = train_trigram_kn(&sents(&["a b c"])).unwrap();
        let eval = sents(&["x y z"]);
        assert_eq!(lm.perplexity(&eval, false), Err(LmError::NoScoreableTokens));
        assert!(lm.perplexity(&eval, true).is_ok());
    }

    #[test]
    fn empty_training_is_error() {
        let empty: Vec<Vec<String>> = Vec::new();
        assert_eq!(train_trigram_kn(&empty).unwrap_err(), LmError::EmptyInput);
    }

    #[test]
    fn training_ppl_below_shuffled_in_expectation() {
        let train = sents(&[
            "yo creo que si",
            "yo creo que no",
            "tu sabes que yo creo",
            "el cree que tu sabes",
        ]);
        let lm = train_trigram_kn(&train).unwrap();
        let base = lm.perplexity(&train, true).unwrap();
        let mut shuffled_mean = 0.0;
        let n_seeds = 20;
        for seed in 0..n_seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shuffled: Vec<Vec<String>> = train
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.shuffle(&mut rng);
                    s
                })
                .collect();
            shuffled_mean += lm.perplexity(&shuffled, true).unwrap();
        }
        shuffled_mean /= n_seeds as f64;
        assert!(base <= shuffled_mean, "{base} !<= {shuffled_mean}");
    }

    #[test]
    fn arpa_dump_reconstructs_probabilities() {
        let lm = train_trigram_kn(&sents(&["a b a c", "a b b", "c a b"])).unwrap();
        let arpa = lm.to_arpa();
        assert!(arpa.starts_with("\\data\\"));
        assert!(arpa.contains("\\1-grams:"));
        assert!(arpa.contains("\\3-grams:"));

        // Parse the dump back into (ngram -> (p, bow)) tables.
        let mut probs: BTreeMap<Vec<String>, (f64, Option<f64>)> = BTreeMap::new();
        for line in arpa.lines() {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields[0].starts_with('\\') || fields[0].starts_with("ngram") {
                continue;
            }
            let Ok(p) = fields[0].parse::<f64>() else { continue };
            let words: Vec<String> = fields[1].split(' ').map(str::to_string).collect();
            let bow = fields.get(2).and_then(|b| b.parse::<f64>().ok());
            probs.insert(words, (p, bow));
        }

        // Unigram probabilities sum to 1 (BOS carries a dummy value).
        let unigram_sum: f64 = probs
            .iter()
            .filter(|(k, _)| k.len() == 1 && k[0] != BOS)
            .map(|(_, (p, _))| 10f64.powf(*p))
            .sum();
        assert_abs_diff_eq!(unigram_sum, 1.0, epsilon = 1e-5);

        // Standard ARPA lookup: listed probability, else backoff weight of
        // the truncated context times the lower-order probability.
        let lookup = |words: &[&str]| -> Option<(f64, Option<f64>)> {
            probs.get(&words.iter().map(|w| w.to_string()).collect::<Vec<_>>()).copied()
        };
        let bow_of = |ctx: &[&str]| lookup(ctx).and_then(|(_, b)| b).map_or(1.0, |b| 10f64.powf(b));
        let p_uni = |w: &str| 10f64.powf(lookup(&[w]).expect("unigram listed").0);
        let p_bi = |v: &str, w: &str| match lookup(&[v, w]) {
            Some((p, _)) => 10f64.powf(p),
            None => bow_of(&[v]) * p_uni(w),
        };
        let p_tri = |u: &str, v: &str, w: &str| match lookup(&[u, v, w]) {
            Some((p, _)) => 10f64.powf(p),
            None => bow_of(&[u, v]) * p_bi(v, w),
        };

        // Seen trigram: listed probability equals the model's.
        assert_abs_diff_eq!(p_tri("a", "b", "a"), lm.prob(&["a", "b"], "a"), epsilon = 1e-5);
        // Unseen trigram with a seen context: backoff chain reproduces the
        // interpolated probability (here down to the unigram level).
        assert_abs_diff_eq!(p_tri("a", "b", "c"), lm.prob(&["a", "b"], "c"), epsilon = 1e-5);
        // OOV target goes through <unk>.
        assert_abs_diff_eq!(p_tri("a", "b", UNK), lm.prob(&["a", "b"], "zzz"), epsilon = 1e-5);
    }
}
