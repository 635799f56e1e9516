//! Named diagrams transcribed from figures, in the text format
//! `name: word=...; events=...`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::diagram::{events_to_string, DiagramError, ParseError, RawDiagram};

const EMBEDDED: &str = include_str!("../data/golden.txt");

/// Environment variable naming a replacement golden file.
pub const GOLDEN_ENV: &str = "CYLKLRW_GOLDEN";

#[derive(Clone, Debug)]
pub struct GoldenSet {
    entries: BTreeMap<String, RawDiagram>,
}

impl GoldenSet {
    pub fn parse(src: &str) -> Result<GoldenSet, DiagramError> {
        let mut entries = BTreeMap::new();
        let mut offset = 0;
        for line in src.lines() {
            let here = offset;
            offset += line.len() + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| DiagramError::Parse(ParseError { pos: here, msg: msg.to_string() });
            let (name, rest) = line.split_once(':').ok_or_else(|| err("expected `name:`"))?;
            let rest = rest.trim().strip_prefix("word=").ok_or_else(|| err("expected `word=`"))?;
            let (word, events) = rest.split_once("; events=").unwrap_or((rest.trim_end_matches(';'), ""));
            let d = RawDiagram::parse(word, events).map_err(|mut e| {
                e.pos += here;
                DiagramError::Parse(e)
            })?;
            if entries.insert(name.trim().to_string(), d).is_some() {
                return Err(err("duplicate name"));
            }
        }
        Ok(GoldenSet { entries })
    }

    /// The embedded set, or the file named by `CYLKLRW_GOLDEN`.
    pub fn load() -> Result<GoldenSet, DiagramError> {
        match std::env::var(GOLDEN_ENV) {
            Ok(path) => {
                let src = std::fs::read_to_string(&path).map_err(|e| DiagramError::Invalid(format!("{path}: {e}")))?;
                GoldenSet::parse(&src)
            }
            Err(_) => GoldenSet::parse(EMBEDDED),
        }
    }

    pub fn embedded() -> &'static GoldenSet {
        static SET: OnceLock<GoldenSet> = OnceLock::new();
        SET.get_or_init(|| GoldenSet::parse(EMBEDDED).expect("embedded golden data parses"))
    }

    pub fn get(&self, name: &str) -> Option<&RawDiagram> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &RawDiagram)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, d)| format!("{k}: {}\n", format_entry(d))).collect()
    }
}

pub fn format_entry(d: &RawDiagram) -> String {
    format!("word={}; events={}", d.bottom, events_to_string(&d.events))
}

/// Name of a transition generator in the golden set.
pub fn generator_name(word: &str, s: u8, patch: u8, k: i32) -> String {
    format!("Z_{word}_s{s}_{patch}_k{k}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_round_trip() {
        let g = GoldenSet::embedded();
        assert_eq!(g.len(), 24);
        let again = GoldenSet::parse(&g.to_text()).unwrap();
        for (name, d) in g.iter() {
            assert_eq!(again.get(name), Some(d));
        }
    }

    #[test]
    fn every_entry_validates() {
        for (name, d) in GoldenSet::embedded().iter() {
            assert!(d.validate().is_empty(), "{name}");
            assert_eq!(d.top().unwrap().to_string(), "R2 1 2(2) 3 R2", "{name}");
        }
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = GoldenSet::parse("# c\nA: word=1 1; events=q1\n").unwrap_err();
        match e {
            DiagramError::Parse(p) => assert!(p.pos >= 4),
            other => panic!("{other:?}"),
        }
    }
}
