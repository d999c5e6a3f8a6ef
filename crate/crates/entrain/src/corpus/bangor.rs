//! Converter from Bangor-style CHAT transcripts to the interchange format.
//!
//! Handles the subset of CHAT used by the bilingual conversation releases:
//! `@Participants`/`@ID` headers for speakers and gender, `@Media` for the
//! recording name, `*SPK:` utterance tiers with `%snd:` time alignment, and
//! word-level language marking via `@s:` suffixes plus `[- lang]` utterance
//! precodes. Anything else (retracing marks, events, comments) is stripped.
//!
//! Untagged words take the utterance's base language: the precode if present,
//! otherwise the first entry of `@Languages`. Tags naming both languages
//! (e.g. `@s:eng&spa`) map to the undetermined tag.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{AudioRef, Conversation, Corpus, CorpusError, Gender, Lang, Speaker, Token, Utterance};

/// Maps CHAT language codes onto the corpus' two language slots.
#[derive(Debug, Clone)]
pub struct BangorOptions {
    /// CHAT code treated as LANG1 (default `spa`).
    pub l1_code: String,
    /// CHAT code treated as LANG2 (default `eng`).
    pub l2_code: String,
}

impl Default for BangorOptions {
    fn default() -> Self {
        Self { l1_code: "spa".into(), l2_code: "eng".into() }
    }
}

impl BangorOptions {
    fn lang_for_code(&self, code: &str) -> Lang {
        if code == self.l1_code {
            Lang::Lang1
        } else if code == self.l2_code {
            Lang::Lang2
        } else {
            Lang::Undetermined
        }
    }
}

/// Converts every `*.cha` file under `dir` into a [`Corpus`].
pub fn ingest_bangor(dir: &Path, opts: &BangorOptions) -> Result<Corpus, CorpusError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CorpusError::Io { path: dir.display().to_string(), source: e })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "cha"))
        .collect();
    paths.sort();

    let mut corpus = Corpus::default();
    for path in paths {
        let name = path.display().to_string();
        let text = fs::read_to_string(&path)
            .map_err(|e| CorpusError::Io { path: name.clone(), source: e })?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(name.clone());
        corpus.conversations.push(parse_cha(&text, &stem, &name, opts)?);
    }
    corpus.metadata.insert("source_format".into(), "bangor-chat".into());
    Ok(corpus)
}

/// Parses one CHAT transcript. Public for tests and ad-hoc conversion.
pub fn parse_cha(
    text: &str,
    conversation_id: &str,
    file: &str,
    opts: &BangorOptions,
) -> Result<Conversation, CorpusError> {
    let mut speakers: Vec<Speaker> = Vec::new();
    let mut genders: BTreeMap<String, Gender> = BTreeMap::new();
    let mut default_code = String::new();
    let mut media: Option<String> = None;

    // Unfold continuation lines (they start with a tab).
    let mut logical: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.starts_with('\t') || raw.starts_with(' ') {
            if let Some(last) = logical.last_mut() {
                last.1.push(' ');
                last.1.push_str(raw.trim());
                continue;
            }
        }
        logical.push((i + 1, raw.to_string()));
    }

    let mut utterances: Vec<Utterance> = Vec::new();
    let mut pending: Option<(usize, String, String)> = None; // (line, speaker, text)
    let mut fallback_clock = 0.0f64;

    for (line_no, line) in &logical {
        if let Some(rest) = line.strip_prefix("@Languages:") {
            default_code = rest.trim().split([',', ' ']).next().unwrap_or("").trim().to_string();
        } else if let Some(rest) = line.strip_prefix("@Participants:") {
            for part in rest.split(',') {
                let code = part.trim().split_whitespace().next().unwrap_or("");
                if !code.is_empty() && speakers.iter().all(|s| s.id != code) {
                    speakers.push(Speaker { id: code.to_string(), gender: Gender::Unspecified });
                }
            }
        } else if let Some(rest) = line.strip_prefix("@ID:") {
            let fields: Vec<&str> = rest.trim().split('|').collect();
            if fields.len() > 4 {
                let gender = match fields[4].trim() {
                    "female" => Gender::Female,
                    "male" => Gender::Male,
                    _ => Gender::Unspecified,
                };
                genders.insert(fields[2].trim().to_string(), gender);
            }
        } else if let Some(rest) = line.strip_prefix("@Media:") {
            let name = rest.trim().split([',', ' ']).next().unwrap_or("").trim_matches('"');
            if !name.is_empty() {
                media = Some(format!("{name}.wav"));
            }
        } else if line.starts_with('*') {
            if let Some((l, spk, txt)) = pending.take() {
                if let Some(u) = finish_utterance(&l, &spk, &txt, None, &default_code, opts, &mut fallback_clock, file)? {
                    utterances.push(u);
                }
            }
            let (code, rest) = line[1..]
                .split_once(':')
                .ok_or_else(|| CorpusError::Schema {
                    file: file.to_string(),
                    line: *line_no,
                    message: "speaker tier without ':'".into(),
                })?;
            pending = Some((*line_no, code.trim().to_string(), rest.trim().to_string()));
        } else if let Some(rest) = line.strip_prefix("%snd:") {
            if let Some((l, spk, txt)) = pending.take() {
                if let Some(u) = finish_utterance(&l, &spk, &txt, Some(rest.trim()), &default_code, opts, &mut fallback_clock, file)? {
                    utterances.push(u);
                }
            }
        }
    }
    if let Some((l, spk, txt)) = pending.take() {
        if let Some(u) = finish_utterance(&l, &spk, &txt, None, &default_code, opts, &mut fallback_clock, file)? {
            utterances.push(u);
        }
    }

    for s in &mut speakers {
        if let Some(g) = genders.get(&s.id) {
            s.gender = *g;
        }
    }
    // Keep only speakers that actually talk; silent codes (investigators) drop.
    speakers.retain(|s| utterances.iter().any(|u| u.speaker_id == s.id));

    let audio = media.map(|path| AudioRef {
        path,
        channel_map: speakers.iter().map(|s| (s.id.clone(), 0usize)).collect(),
    });

    let mut conv = Conversation { id: conversation_id.to_string(), speakers, utterances, audio };
    conv.sort_utterances();
    Ok(conv)
}

#[allow(clippy::too_many_arguments)]
fn finish_utterance(
    line_no: &usize,
    speaker: &str,
    text: &str,
    snd: Option<&str>,
    default_code: &str,
    opts: &BangorOptions,
    fallback_clock: &mut f64,
    file: &str,
) -> Result<Option<Utterance>, CorpusError> {
    let mut base = opts.lang_for_code(default_code);
    let mut body = text.to_string();

    // Utterance precode [- spa] switches the base language.
    while let Some(start) = body.find("[-") {
        let end = body[start..].find(']').map(|e| start + e);
        match end {
            Some(end) => {
                let code = body[start + 2..end].trim().to_string();
                base = opts.lang_for_code(&code);
                body.replace_range(start..=end, " ");
            }
            None => break,
        }
    }
    // Remaining bracketed material ([//] retraces, [?] best guesses, comments).
    while let Some(start) = body.find('[') {
        match body[start..].find(']') {
            Some(end) => body.replace_range(start..start + end + 1, " "),
            None => break,
        }
    }

    let mut tokens = Vec::new();
    for raw in body.split_whitespace() {
        let word = raw.trim_matches(|c: char| "<>„‡+/.!?,:;\"“”".contains(c));
        if word.is_empty() || word.starts_with('&') || word.starts_with('0') {
            continue;
        }
        let lower = word.to_lowercase();
        if lower == "xxx" || lower == "yyy" || lower == "www" || lower.starts_with('(') {
            continue;
        }
        let (surface, lang) = match word.split_once("@s") {
            Some((w, tag)) => {
                let code = tag.trim_start_matches(':');
                let lang = if code.is_empty() || code.contains('&') || code.contains('+') {
                    Lang::Undetermined
                } else {
                    opts.lang_for_code(code)
                };
                (w, lang)
            }
            None => (word, base),
        };
        // Other @-suffixes (@g gloss-only, @u etc.) keep the base language.
        let surface = surface.split('@').next().unwrap_or(surface);
        if surface.is_empty() {
            continue;
        }
        tokens.push(Token::new(surface, lang));
    }
    if tokens.is_empty() {
        return Ok(None);
    }

    let (start, end) = match snd {
        Some(snd) => parse_snd(snd).ok_or_else(|| CorpusError::Schema {
            file: file.to_string(),
            line: *line_no,
            message: format!("unparseable %snd tier: {snd:?}"),
        })?,
        None => {
            let start = *fallback_clock;
            (start, start + (tokens.len() as f64 * 0.3).max(0.5))
        }
    };
    *fallback_clock = end.max(*fallback_clock);
    // Zero-length alignments occur in the wild; nudge rather than reject.
    let end = if end > start { end } else { start + 1e-3 };
    Ok(Some(Utterance { speaker_id: speaker.to_string(), start, end, tokens }))
}

/// `"media"_12345_67890` with millisecond offsets.
fn parse_snd(snd: &str) -> Option<(f64, f64)> {
    let mut parts = snd.rsplitn(3, '_');
    let end_ms: f64 = parts.next()?.trim().parse().ok()?;
    let start_ms: f64 = parts.next()?.trim().parse().ok()?;
    Some((start_ms / 1000.0, end_ms / 1000.0))
}
