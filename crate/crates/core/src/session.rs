//! Exploration sessions: one text, several transforms in display order,
//! their highlighted rows, and a `.bwtx` file format to share them.
//!
//! A `.bwtx` file is a raw DEFLATE stream wrapping one UTF-8 JSON document:
//!
//! ```text
//! {"version":1,"text":<base64>,"end_marker":<int>,
//!  "window":{"rows":<int>,"cols":<int>},
//!  "transforms":[{"id":<int>,"name":<str>,"order":[<int>...],
//!                 "highlights":[<int>...],"cached_L":<base64, optional>}]}
//! ```
//!
//! `order` lists byte values least first, without the end marker. Fields are
//! always written in this order and highlights ascending, so saving is
//! deterministic. Base64 uses the standard alphabet with padding.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::sync::Arc;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use flate2::read::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordering::{AlphabetOrdering, OrderingError};
use crate::text::{TextBuffer, TextError};
use crate::transform::TransformError;
use crate::view::{locate_row, DEFAULT_WINDOW_COLS, DEFAULT_WINDOW_ROWS};
use crate::Transform;

pub const FORMAT_VERSION: u64 = 1;
pub const FILE_EXTENSION: &str = "bwtx";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("corrupt session file: {0}")]
    CorruptFile(String),
    #[error("unsupported session file version {0}")]
    VersionUnsupported(u64),
    #[error("failed to write session: {0}")]
    WriteFailure(#[from] std::io::Error),
    #[error("no transform with id {0}")]
    UnknownTransform(u64),
    #[error("row {row} is outside the {size}-row matrix")]
    RowOutOfRange { row: usize, size: usize },
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSize {
    pub rows: usize,
    pub cols: usize,
}

impl Default for WindowSize {
    fn default() -> Self {
        Self {
            rows: DEFAULT_WINDOW_ROWS,
            cols: DEFAULT_WINDOW_COLS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CachePolicy {
    #[default]
    None,
    CacheL,
}

#[derive(Debug, Clone)]
pub struct SessionEntry {
    pub id: u64,
    pub transform: Arc<Transform>,
    pub highlights: BTreeSet<usize>,
}

impl SessionEntry {
    pub fn name(&self) -> &str {
        self.transform.ordering().name()
    }

    pub fn ordering(&self) -> &AlphabetOrdering {
        self.transform.ordering()
    }
}

/// One text explored under several orderings, left to right.
#[derive(Debug, Clone)]
pub struct Session {
    text: Arc<TextBuffer>,
    entries: Vec<SessionEntry>,
    pub window: WindowSize,
    pub cache_policy: CachePolicy,
    next_id: u64,
}

impl Session {
    pub fn new(text: Arc<TextBuffer>) -> Self {
        Self {
            text,
            entries: Vec::new(),
            window: WindowSize::default(),
            cache_policy: CachePolicy::None,
            next_id: 0,
        }
    }

    pub fn text(&self) -> &Arc<TextBuffer> {
        &self.text
    }

    pub fn entries(&self) -> &[SessionEntry] {
        &self.entries
    }

    pub fn entry(&self, id: u64) -> Result<&SessionEntry, SessionError> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or(SessionError::UnknownTransform(id))
    }

    fn entry_mut(&mut self, id: u64) -> Result<&mut SessionEntry, SessionError> {
        self.entries
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or(SessionError::UnknownTransform(id))
    }

    /// Build and append a transform; returns its id.
    pub fn add_ordering(&mut self, ordering: AlphabetOrdering) -> Result<u64, SessionError> {
        let transform = Transform::build(self.text.clone(), ordering)?;
        Ok(self.push(Arc::new(transform)))
    }

    /// Append an already built transform of this session's text.
    pub fn add_transform(&mut self, transform: Arc<Transform>) -> Result<u64, SessionError> {
        if !Arc::ptr_eq(transform.text(), &self.text) && transform.text() != &self.text {
            return Err(SessionError::Transform(TransformError::InvalidLastColumn(
                "transform belongs to a different text".into(),
            )));
        }
        Ok(self.push(transform))
    }

    fn push(&mut self, transform: Arc<Transform>) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.entries.push(SessionEntry {
            id,
            transform,
            highlights: BTreeSet::new(),
        });
        id
    }

    pub fn remove(&mut self, id: u64) -> Result<SessionEntry, SessionError> {
        let at = self
            .entries
            .iter()
            .position(|e| e.id == id)
            .ok_or(SessionError::UnknownTransform(id))?;
        Ok(self.entries.remove(at))
    }

    /// Move a transform to display position `index` (clamped).
    pub fn reposition(&mut self, id: u64, index: usize) -> Result<(), SessionError> {
        let entry = self.remove(id)?;
        let index = index.min(self.entries.len());
        self.entries.insert(index, entry);
        Ok(())
    }

    /// Turn a highlight on or off; returns the transform's highlights.
    pub fn set_highlight(
        &mut self,
        id: u64,
        row: usize,
        on: bool,
    ) -> Result<&BTreeSet<usize>, SessionError> {
        let size = self.text.augmented_len();
        if row >= size {
            return Err(SessionError::RowOutOfRange { row, size });
        }
        let entry = self.entry_mut(id)?;
        if on {
            entry.highlights.insert(row);
        } else {
            entry.highlights.remove(&row);
        }
        Ok(&entry.highlights)
    }

    /// Highlight, in every transform, the row holding the same rotation as
    /// `row` of transform `id`. Returns `(id, row)` per transform in display
    /// order.
    pub fn propagate(&mut self, id: u64, row: usize) -> Result<Vec<(u64, usize)>, SessionError> {
        let size = self.text.augmented_len();
        if row >= size {
            return Err(SessionError::RowOutOfRange { row, size });
        }
        let src = self.entry(id)?.transform.clone();
        let mut out = Vec::with_capacity(self.entries.len());
        for entry in &mut self.entries {
            let target = locate_row(&src, row, &entry.transform).expect("same text");
            entry.highlights.insert(target);
            out.push((entry.id, target));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    version: u64,
    text: String,
    end_marker: u8,
    window: WindowSize,
    transforms: Vec<TransformDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformDoc {
    id: u64,
    name: String,
    order: Vec<u8>,
    highlights: Vec<usize>,
    #[serde(rename = "cached_L", default, skip_serializing_if = "Option::is_none")]
    cached_last_column: Option<String>,
}

/// Problems that did not prevent loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    /// A cached last column was rejected; the transform was rebuilt.
    CacheInvalid { id: u64, reason: String },
}

#[derive(Debug)]
pub struct LoadedSession {
    pub session: Session,
    pub warnings: Vec<LoadWarning>,
}

/// Serialize `session`. With `cache`, each transform's last column is
/// embedded so loading needs no sorting.
pub fn save_session(session: &Session, cache: bool) -> Result<Vec<u8>, SessionError> {
    let mut out = Vec::new();
    write_session(session, cache, &mut out)?;
    Ok(out)
}

pub fn write_session<W: Write>(session: &Session, cache: bool, out: W) -> Result<(), SessionError> {
    let doc = FileDoc {
        version: FORMAT_VERSION,
        text: BASE64.encode(session.text.data()),
        end_marker: session.text.end_marker(),
        window: session.window,
        transforms: session
            .entries
            .iter()
            .map(|e| TransformDoc {
                id: e.id,
                name: e.name().to_string(),
                order: e.ordering().order().to_vec(),
                highlights: e.highlights.iter().copied().collect(),
                cached_last_column: cache.then(|| BASE64.encode(e.transform.last_column())),
            })
            .collect(),
    };
    let mut encoder = DeflateEncoder::new(out, Compression::default());
    serde_json::to_writer(&mut encoder, &doc).map_err(std::io::Error::from)?;
    encoder.finish()?;
    Ok(())
}

/// Uncompressed JSON document of a saved session.
pub fn decode_container(bytes: &[u8]) -> Result<Vec<u8>, SessionError> {
    let mut json = Vec::new();
    DeflateDecoder::new(bytes)
        .read_to_end(&mut json)
        .map_err(|e| SessionError::CorruptFile(format!("decompression failed: {e}")))?;
    Ok(json)
}

/// Restore a session. Cached last columns are verified against the text and
/// used without sorting; anything missing or rejected is rebuilt.
pub fn load_session(bytes: &[u8]) -> Result<LoadedSession, SessionError> {
    let json = decode_container(bytes)?;
    let value: serde_json::Value = serde_json::from_slice(&json)
        .map_err(|e| SessionError::CorruptFile(format!("invalid JSON: {e}")))?;
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| SessionError::CorruptFile("missing version".into()))?;
    if version != FORMAT_VERSION {
        return Err(SessionError::VersionUnsupported(version));
    }
    let doc: FileDoc = serde_json::from_value(value)
        .map_err(|e| SessionError::CorruptFile(format!("schema mismatch: {e}")))?;

    let data = BASE64
        .decode(&doc.text)
        .map_err(|e| SessionError::CorruptFile(format!("text is not base64: {e}")))?;
    let text = Arc::new(
        TextBuffer::with_end_marker(data, doc.end_marker)
            .map_err(|e| SessionError::CorruptFile(e.to_string()))?,
    );
    if doc.window.rows == 0 || doc.window.cols == 0 {
        return Err(SessionError::CorruptFile(
            "window dimensions must be positive".into(),
        ));
    }

    let mut session = Session::new(text.clone());
    session.window = doc.window;
    let mut warnings = Vec::new();
    let mut ids = BTreeSet::new();
    let m = text.augmented_len();
    for t in doc.transforms {
        if !ids.insert(t.id) {
            return Err(SessionError::CorruptFile(format!(
                "duplicate transform id {}",
                t.id
            )));
        }
        if let Some(&row) = t.highlights.iter().find(|&&r| r >= m) {
            return Err(SessionError::CorruptFile(format!(
                "highlight {row} of transform {} is outside the matrix",
                t.id
            )));
        }
        let ordering = AlphabetOrdering::for_text(t.name, &text, t.order).map_err(|e| {
            SessionError::CorruptFile(format!("ordering of transform {}: {e}", t.id))
        })?;

        let mut built = None;
        if let Some(encoded) = t.cached_last_column {
            session.cache_policy = CachePolicy::CacheL;
            let cached = BASE64
                .decode(encoded)
                .map_err(|e| e.to_string())
                .and_then(|l| {
                    Transform::from_last_column(text.clone(), ordering.clone(), l)
                        .map_err(|e| e.to_string())
                });
            match cached {
                Ok(transform) => built = Some(transform),
                Err(reason) => warnings.push(LoadWarning::CacheInvalid { id: t.id, reason }),
            }
        }
        let transform = match built {
            Some(t) => t,
            None => Transform::build(text.clone(), ordering)?,
        };
        session.entries.push(SessionEntry {
            id: t.id,
            transform: Arc::new(transform),
            highlights: t.highlights.into_iter().collect(),
        });
    }
    session.next_id = ids.last().map_or(0, |&id| id + 1);
    Ok(LoadedSession { session, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{parse_ordering, preset_ordering, Preset};
    use crate::sais::constructions_on_current_thread;

    fn sample_session() -> Session {
        let text = Arc::new(TextBuffer::new("aacaacaacbdccccc").unwrap());
        let mut s = Session::new(text.clone());
        s.add_ordering(preset_ordering(Preset::Ascii, &text).unwrap())
            .unwrap();
        s.add_ordering(parse_ordering("a,c,b,d", &text).unwrap())
            .unwrap();
        s.add_ordering(parse_ordering("c,a,b,d", &text).unwrap())
            .unwrap();
        s.set_highlight(0, 3, true).unwrap();
        s.set_highlight(0, 9, true).unwrap();
        s.set_highlight(1, 4, true).unwrap();
        s.window = WindowSize { rows: 20, cols: 10 };
        s
    }

    type Summary = (u64, String, Vec<u8>, Vec<usize>, usize);

    fn summary(s: &Session) -> Vec<Summary> {
        s.entries()
            .iter()
            .map(|e| {
                (
                    e.id,
                    e.name().to_string(),
                    e.ordering().order().to_vec(),
                    e.highlights.iter().copied().collect(),
                    e.transform.stats().run_count,
                )
            })
            .collect()
    }

    #[test]
    fn round_trip_uncached() {
        let s = sample_session();
        let bytes = save_session(&s, false).unwrap();
        let loaded = load_session(&bytes).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(summary(&loaded.session), summary(&s));
        assert_eq!(loaded.session.window, s.window);
        assert_eq!(save_session(&loaded.session, false).unwrap(), bytes);
    }

    #[test]
    fn cached_load_skips_sorting() {
        let s = sample_session();
        let bytes = save_session(&s, true).unwrap();
        let before = constructions_on_current_thread();
        let loaded = load_session(&bytes).unwrap();
        assert_eq!(constructions_on_current_thread(), before);
        assert_eq!(summary(&loaded.session), summary(&s));
        assert_eq!(loaded.session.cache_policy, CachePolicy::CacheL);
        assert_eq!(save_session(&loaded.session, true).unwrap(), bytes);
    }

    #[test]
    fn empty_session() {
        let s = Session::new(Arc::new(TextBuffer::new("x").unwrap()));
        let loaded = load_session(&save_session(&s, false).unwrap()).unwrap();
        assert!(loaded.session.entries().is_empty());
    }

    fn doc(bytes: &[u8]) -> serde_json::Value {
        serde_json::from_slice(&decode_container(bytes).unwrap()).unwrap()
    }

    fn encode(v: &serde_json::Value) -> Vec<u8> {
        let mut enc = DeflateEncoder::new(Vec::new(), Compression::default());
        serde_json::to_writer(&mut enc, v).unwrap();
        enc.finish().unwrap()
    }

    #[test]
    fn schema_fields() {
        let v = doc(&save_session(&sample_session(), true).unwrap());
        assert_eq!(v["version"], 1);
        assert_eq!(v["text"], BASE64.encode("aacaacaacbdccccc"));
        assert_eq!(v["end_marker"], b'$');
        assert_eq!(v["window"]["rows"], 20);
        assert_eq!(
            v["transforms"][2]["order"],
            serde_json::json!([99, 97, 98, 100])
        );
        assert_eq!(v["transforms"][0]["highlights"], serde_json::json!([3, 9]));
        assert_eq!(
            v["transforms"][0]["cached_L"],
            BASE64.encode("c$ccaaaccaaacccdb")
        );
        let v = doc(&save_session(&sample_session(), false).unwrap());
        assert!(v["transforms"][0].get("cached_L").is_none());
    }

    #[test]
    fn tampered_cache_rebuilds() {
        let mut v = doc(&save_session(&sample_session(), true).unwrap());
        v["transforms"][1]["cached_L"] = BASE64.encode("c$cc").into();
        let loaded = load_session(&encode(&v)).unwrap();
        assert!(matches!(
            loaded.warnings.as_slice(),
            [LoadWarning::CacheInvalid { id: 1, .. }]
        ));
        assert_eq!(summary(&loaded.session), summary(&sample_session()));
    }

    #[test]
    fn rejects_bad_files() {
        let good = doc(&save_session(&sample_session(), false).unwrap());
        let mut v = good.clone();
        v["version"] = 2.into();
        assert!(matches!(
            load_session(&encode(&v)),
            Err(SessionError::VersionUnsupported(2))
        ));

        assert!(matches!(
            load_session(b"not deflate at all"),
            Err(SessionError::CorruptFile(_))
        ));

        let mut v = good.clone();
        v["transforms"][1]["id"] = 0.into();
        assert!(matches!(
            load_session(&encode(&v)),
            Err(SessionError::CorruptFile(_))
        ));

        let mut v = good.clone();
        v["transforms"][0]["highlights"] = serde_json::json!([17]);
        assert!(matches!(
            load_session(&encode(&v)),
            Err(SessionError::CorruptFile(_))
        ));

        let mut v = good.clone();
        v["transforms"][0]["order"] = serde_json::json!([97, 98]);
        assert!(matches!(
            load_session(&encode(&v)),
            Err(SessionError::CorruptFile(_))
        ));

        let mut v = good;
        v["end_marker"] = 97.into();
        assert!(matches!(
            load_session(&encode(&v)),
            Err(SessionError::CorruptFile(_))
        ));
    }

    #[test]
    fn propagate_and_reposition() {
        let text = Arc::new(TextBuffer::new("banana").unwrap());
        let mut s = Session::new(text.clone());
        let a = s
            .add_ordering(preset_ordering(Preset::Ascii, &text).unwrap())
            .unwrap();
        let r = s
            .add_ordering(preset_ordering(Preset::ReverseAscii, &text).unwrap())
            .unwrap();
        assert_eq!(s.propagate(a, 4).unwrap(), vec![(a, 4), (r, 3)]);
        assert!(s.entry(r).unwrap().highlights.contains(&3));
        s.reposition(r, 0).unwrap();
        assert_eq!(s.entries()[0].id, r);
        assert!(matches!(
            s.propagate(9, 0),
            Err(SessionError::UnknownTransform(9))
        ));
        assert!(matches!(
            s.set_highlight(a, 7, true),
            Err(SessionError::RowOutOfRange { .. })
        ));
        s.set_highlight(r, 3, false).unwrap();
        assert!(s.entry(r).unwrap().highlights.is_empty());
    }
}
