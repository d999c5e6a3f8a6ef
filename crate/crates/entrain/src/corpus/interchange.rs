//! Line-delimited interchange format for conversations.
//!
//! One conversation per file. The first line is a header record naming the
//! conversation, its two (or more) speakers, and an optional audio reference;
//! every following line is one utterance record:
//!
//! ```text
//! {"conversation_id":"c1","speakers":[{"id":"A","gender":"f"},{"id":"B","gender":"m"}],"audio":null}
//! {"speaker":"A","start_s":0.0,"end_s":1.2,"tokens":[{"w":"hola","lang":"l1"}]}
//! ```
//!
//! Language tags are `"l1"`, `"l2"`, `"und"`. Malformed files are reported
//! with file and line; they are never silently dropped.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AudioRef, Conversation, Corpus, CorpusError, Speaker, Token, Utterance};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    conversation_id: String,
    speakers: Vec<Speaker>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    audio: Option<AudioRef>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UttRecord {
    speaker: String,
    start_s: f64,
    end_s: f64,
    tokens: Vec<Token>,
}

fn schema_err(file: &str, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Schema { file: file.to_string(), line, message: message.into() }
}

/// Parses one conversation from interchange text. `file` labels diagnostics.
pub fn parse_conversation_str(text: &str, file: &str) -> Result<Conversation, CorpusError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (line_no, header_line) = lines
        .next()
        .ok_or_else(|| schema_err(file, 1, "empty file, expected header record"))?;
    let header: Header = serde_json::from_str(header_line)
        .map_err(|e| schema_err(file, line_no, format!("bad header record: {e}")))?;
    if header.speakers.is_empty() {
        return Err(schema_err(file, line_no, "header lists no speakers"));
    }
    {
        let mut ids: Vec<&str> = header.speakers.iter().map(|s| s.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != header.speakers.len() {
            return Err(schema_err(file, line_no, "duplicate speaker id in header"));
        }
    }

    let mut utterances = Vec::new();
    for (line_no, line) in lines {
        let rec: UttRecord = serde_json::from_str(line)
            .map_err(|e| schema_err(file, line_no, format!("bad utterance record: {e}")))?;
        if header.speakers.iter().all(|s| s.id != rec.speaker) {
            return Err(schema_err(
                file,
                line_no,
                format!("utterance speaker {:?} not in header speaker list", rec.speaker),
            ));
        }
        if !(rec.end_s > rec.start_s) {
            return Err(schema_err(
                file,
                line_no,
                format!("utterance end ({}) must be > start ({})", rec.end_s, rec.start_s),
            ));
        }
        if rec.start_s < 0.0 {
            return Err(schema_err(file, line_no, "utterance start must be >= 0"));
        }
        if rec.tokens.is_empty() {
            return Err(schema_err(file, line_no, "utterance has no tokens"));
        }
        if let Some(t) = rec.tokens.iter().find(|t| t.surface.is_empty()) {
            return Err(schema_err(file, line_no, format!("empty token surface: {t:?}")));
        }
        utterances.push(Utterance {
            speaker_id: rec.speaker,
            start: rec.start_s,
            end: rec.end_s,
            tokens: rec.tokens,
        });
    }

    let mut conv = Conversation {
        id: header.conversation_id,
        speakers: header.speakers,
        utterances,
        audio: header.audio,
    };
    conv.sort_utterances();
    Ok(conv)
}

/// Parses every `*.jsonl` file under `dir` into a [`Corpus`].
///
/// The first malformed file aborts the parse with a diagnostic naming the
/// file and line; well-formedness problems are never skipped silently.
pub fn parse_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CorpusError::Io { path: dir.display().to_string(), source: e })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    paths.sort();

    let mut corpus = Corpus::default();
    for path in paths {
        let name = path.display().to_string();
        let text = fs::read_to_string(&path)
            .map_err(|e| CorpusError::Io { path: name.clone(), source: e })?;
        let conv = parse_conversation_str(&text, &name)?;
        if corpus.conversations.iter().any(|c| c.id == conv.id) {
            return Err(CorpusError::DuplicateConversation(conv.id));
        }
        corpus.conversations.push(conv);
    }
    corpus.metadata.insert("source_dir".into(), dir.display().to_string());
    Ok(corpus)
}

/// Serializes one conversation back to interchange text.
pub fn write_conversation(conv: &Conversation) -> String {
    let header = Header {
        conversation_id: conv.id.clone(),
        speakers: conv.speakers.clone(),
        audio: conv.audio.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for u in &conv.utterances {
        let rec = UttRecord {
            speaker: u.speaker_id.clone(),
            start_s: u.start,
            end_s: u.end,
            tokens: u.tokens.clone(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("utterance serializes"));
        out.push('\n');
    }
    out
}

/// Writes a corpus as one `<conversation id>.jsonl` file per conversation.
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for conv in &corpus.conversations {
        let mut f = fs::File::create(dir.join(format!("{}.jsonl", conv.id)))?;
        f.write_all(write_conversation(conv).as_bytes())?;
    }
    Ok(())
}
