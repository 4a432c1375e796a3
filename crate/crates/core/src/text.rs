//! Input text with its appended end marker.

use thiserror::Error;

/// The conventional end marker, tried before any other byte.
pub const DEFAULT_END_MARKER: u8 = b'$';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("input text is empty")]
    EmptyText,
    #[error("every byte value 0-255 occurs in the text; no end marker is available")]
    NoEndMarkerAvailable,
    #[error("end marker {marker:#04x} occurs in the text")]
    EndMarkerInText { marker: u8 },
}

/// Pick an end marker: `$` when the text does not contain it, otherwise the
/// first byte in 0x00..=0xFF that does not occur in the text.
pub fn select_end_marker(data: &[u8]) -> Result<u8, TextError> {
    if data.is_empty() {
        return Err(TextError::EmptyText);
    }
    let present = presence(data);
    if !present[DEFAULT_END_MARKER as usize] {
        return Ok(DEFAULT_END_MARKER);
    }
    (0..=255u8)
        .find(|&b| !present[b as usize])
        .ok_or(TextError::NoEndMarkerAvailable)
}

fn presence(data: &[u8]) -> [bool; 256] {
    let mut present = [false; 256];
    for &b in data {
        present[b as usize] = true;
    }
    present
}

/// Raw input bytes plus the end marker conceptually appended after them.
///
/// The augmented text `T'` has length `m = n + 1`; its last byte is the end
/// marker, which never occurs in `data`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextBuffer {
    data: Vec<u8>,
    end_marker: u8,
    counts: [usize; 256],
}

impl TextBuffer {
    /// Load `data` and select an end marker automatically.
    pub fn new(data: impl Into<Vec<u8>>) -> Result<Self, TextError> {
        let data = data.into();
        let end_marker = select_end_marker(&data)?;
        Ok(Self::assemble(data, end_marker))
    }

    /// Load `data` with a caller-chosen end marker.
    pub fn with_end_marker(data: impl Into<Vec<u8>>, end_marker: u8) -> Result<Self, TextError> {
        let data = data.into();
        if data.is_empty() {
            return Err(TextError::EmptyText);
        }
        if data.contains(&end_marker) {
            return Err(TextError::EndMarkerInText { marker: end_marker });
        }
        Ok(Self::assemble(data, end_marker))
    }

    fn assemble(data: Vec<u8>, end_marker: u8) -> Self {
        let mut counts = [0usize; 256];
        for &b in &data {
            counts[b as usize] += 1;
        }
        Self {
            data,
            end_marker,
            counts,
        }
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn end_marker(&self) -> u8 {
        self.end_marker
    }

    /// Original size `n` in bytes.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false; empty texts are rejected at construction.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Augmented length `m = n + 1`.
    pub fn augmented_len(&self) -> usize {
        self.data.len() + 1
    }

    /// Byte `i` of the augmented text; `i == n` is the end marker.
    #[inline]
    pub fn augmented_byte(&self, i: usize) -> u8 {
        if i == self.data.len() {
            self.end_marker
        } else {
            self.data[i]
        }
    }

    /// Occurrence count of `byte` in `data`.
    pub fn count(&self, byte: u8) -> usize {
        self.counts[byte as usize]
    }

    pub fn contains(&self, byte: u8) -> bool {
        self.counts[byte as usize] > 0
    }

    /// Distinct bytes of `data` in ascending byte order.
    pub fn alphabet(&self) -> Vec<u8> {
        (0..=255u8).filter(|&b| self.contains(b)).collect()
    }

    /// Number of distinct bytes `σ`.
    pub fn alphabet_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}
