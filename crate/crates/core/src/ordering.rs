//! Alphabet orderings: total orders over the bytes of a text.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::escape::{escape_byte, escape_bytes, unescape};
use crate::text::TextBuffer;

const UNRANKED: u16 = u16::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("character {} is listed more than once", escape_byte(*.0))]
    DuplicateCharacter(u8),
    #[error("ordering is missing characters that occur in the text: {}", escape_bytes(.0))]
    MissingCharacters(Vec<u8>),
    #[error("character {} does not occur in the text", escape_byte(*.0))]
    UnknownCharacter(u8),
    #[error("malformed ordering: {0}")]
    MalformedSpec(String),
    #[error("the end marker {} cannot appear in an ordering", escape_byte(*.0))]
    EndMarkerInOrdering(u8),
    #[error("preset {0} is unavailable: no ordering table is configured")]
    PresetUnavailable(Preset),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

/// A total order over the distinct bytes of a text, with the end marker
/// always ranked least.
///
/// `rank(end_marker) == 0` and `rank(order[i]) == i + 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlphabetOrdering {
    name: String,
    end_marker: u8,
    order: Vec<u8>,
    rank: [u16; 256],
}

impl AlphabetOrdering {
    /// Build an ordering from bytes listed least to greatest. The list must
    /// be duplicate-free and must not contain the end marker; coverage of a
    /// particular text is checked by [`AlphabetOrdering::check_covers`].
    pub fn new(
        name: impl Into<String>,
        end_marker: u8,
        order: Vec<u8>,
    ) -> Result<Self, OrderingError> {
        let mut rank = [UNRANKED; 256];
        rank[end_marker as usize] = 0;
        for (i, &b) in order.iter().enumerate() {
            if b == end_marker {
                return Err(OrderingError::EndMarkerInOrdering(b));
            }
            if rank[b as usize] != UNRANKED {
                return Err(OrderingError::DuplicateCharacter(b));
            }
            rank[b as usize] = i as u16 + 1;
        }
        Ok(Self {
            name: name.into(),
            end_marker,
            order,
            rank,
        })
    }

    /// Build an ordering for `text`, verifying that it lists exactly the
    /// distinct bytes of the text.
    pub fn for_text(
        name: impl Into<String>,
        text: &TextBuffer,
        order: Vec<u8>,
    ) -> Result<Self, OrderingError> {
        let ordering = Self::new(name, text.end_marker(), order)?;
        ordering.check_covers(text)?;
        Ok(ordering)
    }

    pub fn check_covers(&self, text: &TextBuffer) -> Result<(), OrderingError> {
        if self.end_marker != text.end_marker() {
            return Err(OrderingError::EndMarkerInOrdering(text.end_marker()));
        }
        if let Some(&b) = self.order.iter().find(|&&b| !text.contains(b)) {
            return Err(OrderingError::UnknownCharacter(b));
        }
        let missing: Vec<u8> = text
            .alphabet()
            .into_iter()
            .filter(|&b| self.rank[b as usize] == UNRANKED)
            .collect();
        if !missing.is_empty() {
            return Err(OrderingError::MissingCharacters(missing));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn end_marker(&self) -> u8 {
        self.end_marker
    }

    /// Bytes from least to greatest, end marker excluded.
    pub fn order(&self) -> &[u8] {
        &self.order
    }

    /// Alphabet size `σ`, end marker excluded.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Rank of `byte`, or `None` for bytes outside the ordering.
    #[inline]
    pub fn rank(&self, byte: u8) -> Option<u16> {
        match self.rank[byte as usize] {
            UNRANKED => None,
            r => Some(r),
        }
    }

    /// Rank of a byte known to be ranked. Panics otherwise.
    #[inline]
    pub(crate) fn rank_of(&self, byte: u8) -> u16 {
        let r = self.rank[byte as usize];
        assert!(r != UNRANKED, "byte {byte:#04x} is not in the ordering");
        r
    }

    pub fn contains(&self, byte: u8) -> bool {
        self.rank[byte as usize] != UNRANKED
    }

    /// Compact rendering such as `c<a<b<d`.
    pub fn display_order(&self) -> String {
        self.order
            .iter()
            .map(|&b| escape_byte(b))
            .collect::<Vec<_>>()
            .join("<")
    }

    /// Comma list accepted by [`parse_ordering`].
    pub fn to_spec(&self) -> String {
        self.order
            .iter()
            .map(|&b| match b {
                b',' => "\\,".to_string(),
                _ => escape_byte(b),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for AlphabetOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphabetOrdering")
            .field("name", &self.name)
            .field("end_marker", &escape_byte(self.end_marker))
            .field("order", &self.display_order())
            .finish()
    }
}

/// Built-in orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    Ascii,
    ReverseAscii,
    LeastFrequent,
    MostFrequent,
    ChapinTate,
    OrderOfAppearance,
    VowelsFirst,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Ascii,
        Preset::ReverseAscii,
        Preset::LeastFrequent,
        Preset::MostFrequent,
        Preset::ChapinTate,
        Preset::OrderOfAppearance,
        Preset::VowelsFirst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ascii => "ascii",
            Preset::ReverseAscii => "reverse_ascii",
            Preset::LeastFrequent => "least_frequent",
            Preset::MostFrequent => "most_frequent",
            Preset::ChapinTate => "chapin_tate",
            Preset::OrderOfAppearance => "order_of_appearance",
            Preset::VowelsFirst => "vowels_first",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = OrderingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == normalized)
            .ok_or_else(|| OrderingError::UnknownPreset(s.to_string()))
    }
}

/// Tables backing presets that are not derived from the text itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PresetTables {
    /// Chapin-Tate ordering, least to greatest. Bytes of the text that the
    /// table omits are appended in ascending byte order.
    pub chapin_tate: Option<Vec<u8>>,
}

impl PresetTables {
    /// Parse a table file: either a comma list (same syntax as
    /// [`parse_ordering`]) or, when no comma is present, the raw bytes of the
    /// file in order with line breaks ignored.
    pub fn parse_chapin_tate(contents: &[u8]) -> Result<Vec<u8>, OrderingError> {
        let table: Vec<u8> = if contents.contains(&b',') {
            let s = std::str::from_utf8(contents)
                .map_err(|_| OrderingError::MalformedSpec("table is not UTF-8".into()))?;
            split_spec(s.trim_end_matches(['\n', '\r']))?
        } else {
            contents
                .iter()
                .copied()
                .filter(|&b| b != b'\n' && b != b'\r')
                .collect()
        };
        let mut seen = [false; 256];
        for &b in &table {
            if std::mem::replace(&mut seen[b as usize], true) {
                return Err(OrderingError::DuplicateCharacter(b));
            }
        }
        Ok(table)
    }
}

/// Preset ordering with no extra tables configured.
pub fn preset_ordering(
    preset: Preset,
    text: &TextBuffer,
) -> Result<AlphabetOrdering, OrderingError> {
    preset_ordering_with(preset, text, &PresetTables::default())
}

pub fn preset_ordering_with(
    preset: Preset,
    text: &TextBuffer,
    tables: &PresetTables,
) -> Result<AlphabetOrdering, OrderingError> {
    let ascending = text.alphabet();
    let order = match preset {
        Preset::Ascii => ascending,
        Preset::ReverseAscii => ascending.into_iter().rev().collect(),
        Preset::LeastFrequent => {
            let mut v = ascending;
            v.sort_by_key(|&b| text.count(b));
            v
        }
        Preset::MostFrequent => {
            let mut v = ascending;
            v.sort_by_key(|&b| std::cmp::Reverse(text.count(b)));
            v
        }
        Preset::OrderOfAppearance => {
            let mut seen = [false; 256];
            let mut v = Vec::with_capacity(ascending.len());
            for &b in text.data() {
                if !std::mem::replace(&mut seen[b as usize], true) {
                    v.push(b);
                    if v.len() == ascending.len() {
                        break;
                    }
                }
            }
            v
        }
        Preset::VowelsFirst => table_then_ascending(b"aeiouAEIOU", text),
        Preset::ChapinTate => match &tables.chapin_tate {
            Some(table) => table_then_ascending(table, text),
            None => return Err(OrderingError::PresetUnavailable(Preset::ChapinTate)),
        },
    };
    AlphabetOrdering::for_text(preset.name(), text, order)
}

fn table_then_ascending(table: &[u8], text: &TextBuffer) -> Vec<u8> {
    let mut listed = [false; 256];
    let mut order = Vec::new();
    for &b in table {
        if text.contains(b) && !std::mem::replace(&mut listed[b as usize], true) {
            order.push(b);
        }
    }
    order.extend(text.alphabet().into_iter().filter(|&b| !listed[b as usize]));
    order
}

fn split_spec(spec: &str) -> Result<Vec<u8>, OrderingError> {
    if spec.is_empty() {
        return Err(OrderingError::MalformedSpec("empty ordering".into()));
    }
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = spec.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                current.push(c);
                match chars.next() {
                    Some(next) => current.push(next),
                    None => return Err(OrderingError::MalformedSpec("dangling escape".into())),
                }
            }
            ',' => tokens.push(std::mem::take(&mut current)),
            _ => current.push(c),
        }
    }
    tokens.push(current);

    tokens
        .iter()
        .map(|tok| {
            let bytes = unescape(tok)
                .ok_or_else(|| OrderingError::MalformedSpec(format!("bad escape in {tok:?}")))?;
            match bytes.as_slice() {
                [b] => Ok(*b),
                [] => Err(OrderingError::MalformedSpec("empty entry".into())),
                _ => Err(OrderingError::MalformedSpec(format!(
                    "entry {tok:?} is not a single byte"
                ))),
            }
        })
        .collect()
}

/// Parse a comma-separated character list (least first) into an ordering
/// for `text`. Entries are single bytes; `\xNN`, `\\` and `\,` escapes
/// are accepted for bytes that cannot be typed directly.
pub fn parse_ordering(spec: &str, text: &TextBuffer) -> Result<AlphabetOrdering, OrderingError> {
    let order = split_spec(spec)?;
    let mut seen = [false; 256];
    for &b in &order {
        if std::mem::replace(&mut seen[b as usize], true) {
            return Err(OrderingError::DuplicateCharacter(b));
        }
    }
    AlphabetOrdering::for_text(spec, text, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(s: &str) -> TextBuffer {
        TextBuffer::new(s).unwrap()
    }

    #[test]
    fn order_of_appearance_banana() {
        let o = preset_ordering(Preset::OrderOfAppearance, &text("banana")).unwrap();
        assert_eq!(o.order(), b"ban");
    }

    #[test]
    fn least_frequent_breaks_ties_by_byte() {
        let o = preset_ordering(Preset::LeastFrequent, &text("aacaacaacbdccccc")).unwrap();
        assert_eq!(o.order(), b"bdac");
        let o = preset_ordering(Preset::MostFrequent, &text("aacaacaacbdccccc")).unwrap();
        assert_eq!(o.order(), b"cabd");
    }

    #[test]
    fn vowels_first() {
        let o = preset_ordering(Preset::VowelsFirst, &text("zebra")).unwrap();
        assert_eq!(o.order(), b"aebrz");
        let o = preset_ordering(Preset::VowelsFirst, &text("bAzeUa")).unwrap();
        assert_eq!(o.order(), b"aeAUbz");
    }

    #[test]
    fn ascii_and_reverse() {
        let t = text("banana banana");
        assert_eq!(preset_ordering(Preset::Ascii, &t).unwrap().order(), b" abn");
        assert_eq!(
            preset_ordering(Preset::ReverseAscii, &t).unwrap().order(),
            b"nba "
        );
    }

    #[test]
    fn chapin_tate_needs_table() {
        let t = text("banana");
        assert_eq!(
            preset_ordering(Preset::ChapinTate, &t).unwrap_err(),
            OrderingError::PresetUnavailable(Preset::ChapinTate)
        );
        let tables = PresetTables {
            chapin_tate: Some(b"nxa".to_vec()),
        };
        let o = preset_ordering_with(Preset::ChapinTate, &t, &tables).unwrap();
        assert_eq!(o.order(), b"nab");
    }

    #[test]
    fn table_file_formats() {
        assert_eq!(
            PresetTables::parse_chapin_tate(b"e,t,\\x20\n").unwrap(),
            b"et "
        );
        assert_eq!(
            PresetTables::parse_chapin_tate(b"eta\noi\n").unwrap(),
            b"etaoi"
        );
        assert!(PresetTables::parse_chapin_tate(b"ee").is_err());
    }

    #[test]
    fn rank_table() {
        let o = preset_ordering(Preset::Ascii, &text("banana")).unwrap();
        assert_eq!(o.rank(b'$'), Some(0));
        assert_eq!(o.rank(b'a'), Some(1));
        assert_eq!(o.rank(b'n'), Some(3));
        assert_eq!(o.rank(b'z'), None);
    }

    #[test]
    fn parse_custom() {
        let t = text("aacaacaacbdccccc");
        let o = parse_ordering("c,a,b,d", &t).unwrap();
        assert_eq!(o.order(), b"cabd");
        assert_eq!(o.display_order(), "c<a<b<d");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_ordering("a,b", &text("abc")).unwrap_err(),
            OrderingError::MissingCharacters(vec![b'c'])
        );
        assert_eq!(
            parse_ordering("a,a,b", &text("ab")).unwrap_err(),
            OrderingError::DuplicateCharacter(b'a')
        );
        assert_eq!(
            parse_ordering("a,b,z", &text("ab")).unwrap_err(),
            OrderingError::UnknownCharacter(b'z')
        );
        assert!(matches!(
            parse_ordering("a,,b", &text("ab")).unwrap_err(),
            OrderingError::MalformedSpec(_)
        ));
        assert!(matches!(
            parse_ordering("ab", &text("ab")).unwrap_err(),
            OrderingError::MalformedSpec(_)
        ));
        assert!(matches!(
            parse_ordering("", &text("ab")).unwrap_err(),
            OrderingError::MalformedSpec(_)
        ));
    }

    #[test]
    fn parse_escapes_and_space() {
        let t = text("a b,\x01");
        let o = parse_ordering("\\,, ,\\x01,b,a", &t).unwrap();
        assert_eq!(o.order(), b", \x01ba");
        assert_eq!(parse_ordering(&o.to_spec(), &t).unwrap().order(), o.order());
    }

    #[test]
    fn preset_names_parse() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert_eq!(
            "Reverse-ASCII".parse::<Preset>().unwrap(),
            Preset::ReverseAscii
        );
        assert!("nope".parse::<Preset>().is_err());
    }
}
