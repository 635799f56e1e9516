//! Words, event sequences and raw diagrams on the cylinder, with the text
//! format used for golden data and the command line.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::Perm;

/// Strand color.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Color {
    Black,
    Red,
}

/// One entry of a word read from the seam in the positive direction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Endpoint {
    pub color: Color,
    pub label: u8,
    pub thickness: u8,
}

impl Endpoint {
    pub fn black(label: u8) -> Self {
        Endpoint { color: Color::Black, label, thickness: 1 }
    }

    pub fn thick(label: u8, thickness: u8) -> Self {
        Endpoint { color: Color::Black, label, thickness }
    }

    pub fn red(label: u8) -> Self {
        Endpoint { color: Color::Red, label, thickness: 1 }
    }

    pub fn is_red(&self) -> bool {
        self.color == Color::Red
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.color, self.thickness) {
            (Color::Red, _) => write!(f, "R{}", self.label),
            (Color::Black, 1) => write!(f, "{}", self.label),
            (Color::Black, t) => write!(f, "{}({})", self.label, t),
        }
    }
}

/// Cyclic word of strand endpoints, read from the seam.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Word(pub Vec<Endpoint>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of thin strands after splitting every thick entry.
    pub fn thin_len(&self) -> usize {
        self.0.iter().map(|e| e.thickness as usize).sum()
    }

    /// The word with every thick entry split into thin entries.
    pub fn thin(&self) -> Word {
        let mut out = Vec::new();
        for e in &self.0 {
            for _ in 0..e.thickness {
                out.push(Endpoint { thickness: 1, ..*e });
            }
        }
        Word(out)
    }

    pub fn has_thick(&self) -> bool {
        self.0.iter().any(|e| e.thickness > 1)
    }

    /// 1-based thin position of the first thin strand of entry `p` (1-based).
    pub fn thin_start(&self, p: usize) -> usize {
        1 + self.0[..p - 1].iter().map(|e| e.thickness as usize).sum::<usize>()
    }

    /// Positions (1-based) of red entries.
    pub fn red_positions(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, e)| e.is_red()).map(|(i, _)| i + 1).collect()
    }

    /// Total black thickness per label (index 0 holds label 1).
    pub fn black_counts(&self, labels: usize) -> Vec<u32> {
        let mut v = vec![0; labels];
        for e in &self.0 {
            if !e.is_red() && (e.label as usize) >= 1 && (e.label as usize) <= labels {
                v[e.label as usize - 1] += e.thickness as u32;
            }
        }
        v
    }

    /// Red count per label (index 0 holds label 1).
    pub fn red_counts(&self, labels: usize) -> Vec<u32> {
        let mut v = vec![0; labels];
        for e in &self.0 {
            if e.is_red() && (e.label as usize) >= 1 && (e.label as usize) <= labels {
                v[e.label as usize - 1] += 1;
            }
        }
        v
    }

    /// The same multiset of thin strands up to grouping.
    pub fn same_thin(&self, other: &Word) -> bool {
        self.thin() == other.thin()
    }

    pub fn parse(s: &str) -> Result<Word, ParseError> {
        parse_word(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Quiver data for the chain with vertices `1..n-1` and arrows `i -> i+1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QuiverData {
    pub n: usize,
    pub v: Vec<u32>,
    pub w: Vec<u32>,
}

impl QuiverData {
    pub fn new(n: usize, v: Vec<u32>, w: Vec<u32>) -> Result<Self, DiagramError> {
        if n < 2 || v.len() != n - 1 || w.len() != n - 1 {
            return Err(DiagramError::BadQuiver(format!(
                "n={n} requires vectors of length {}",
                n.saturating_sub(1)
            )));
        }
        Ok(QuiverData { n, v, w })
    }

    pub fn labels(&self) -> usize {
        self.n - 1
    }

    /// Whether the arrow `i -> j` exists.
    pub fn arrow(i: u8, j: u8) -> bool {
        j == i + 1
    }

    /// Checks that a word carries exactly the strands prescribed by `v` and `w`.
    pub fn check_word(&self, word: &Word) -> Result<(), DiagramError> {
        for e in &word.0 {
            if e.label == 0 || e.label as usize > self.labels() {
                return Err(DiagramError::BadWord(format!("label {} out of range in {word}", e.label)));
            }
            if e.thickness == 0 || (e.is_red() && e.thickness != 1) || e.thickness > 2 {
                return Err(DiagramError::BadWord(format!("bad thickness in {word}")));
            }
        }
        if word.black_counts(self.labels()) != self.v || word.red_counts(self.labels()) != self.w {
            return Err(DiagramError::BadWord(format!(
                "{word} does not match v={:?}, w={:?}",
                self.v, self.w
            )));
        }
        Ok(())
    }
}

/// Elementary event of a diagram, read bottom to top.  Positions are 1-based
/// indices into the current word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Event {
    /// Exchange positions `p` and `p+1`; `p` equal to the word length
    /// exchanges the last and first entries across the seam.
    Cross(usize),
    Dot(usize),
    /// Split a thickness-two entry into two thin entries.
    Split(usize),
    /// Join the thin entries at `p` and `p+1`.
    Merge(usize),
    /// The last entry crosses the seam in the positive direction.
    WrapRight,
    /// The first entry crosses the seam in the negative direction.
    WrapLeft,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Cross(p) => write!(f, "x{p}"),
            Event::Dot(p) => write!(f, "d{p}"),
            Event::Split(p) => write!(f, "s{p}"),
            Event::Merge(p) => write!(f, "m{p}"),
            Event::WrapRight => write!(f, "r"),
            Event::WrapLeft => write!(f, "l"),
        }
    }
}

/// Formats an event list in the text format.
pub fn events_to_string(events: &[Event]) -> String {
    events.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// A diagram given by its bottom word and event sequence.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct RawDiagram {
    pub bottom: Word,
    pub events: Vec<Event>,
}

/// Problems found by [`RawDiagram::validate`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Violation {
    PositionOutOfRange { step: usize },
    DotOnRed { step: usize },
    RedMerge { step: usize },
    MergeMismatch { step: usize },
    SplitThin { step: usize },
    RedBigon,
    RedCrossingCount { crossings: usize, twist: i32 },
    RightRedWinds { winding: i32 },
    UnbalancedThick,
}

/// Strand bookkeeping produced by simulating the events.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    pub top: Word,
    /// Signed seam crossings of each black entry of the bottom word, summed per label.
    pub winding: Vec<i32>,
    /// Signed seam crossings of the left red strand.
    pub twist: i32,
    pub right_red_winding: i32,
    pub red_crossing_signs: Vec<i32>,
    pub violations: Vec<Violation>,
}

/// Output of [`RawDiagram::strand_map`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrandMap {
    pub perm: Perm,
    pub crossings: usize,
}

#[derive(Clone, Debug)]
struct Slot {
    entry: Endpoint,
    /// Thin strand identifiers carried by this entry.
    ids: Vec<usize>,
}

impl RawDiagram {
    pub fn new(bottom: Word, events: Vec<Event>) -> Self {
        RawDiagram { bottom, events }
    }

    pub fn identity(bottom: Word) -> Self {
        RawDiagram { bottom, events: Vec::new() }
    }

    /// Stacks `upper` on top of `self`.
    pub fn then(&self, upper: &RawDiagram) -> Result<RawDiagram, DiagramError> {
        let top = self.top()?;
        if top != upper.bottom {
            return Err(DiagramError::WordMismatch { lower_top: top.to_string(), upper_bottom: upper.bottom.to_string() });
        }
        let mut events = self.events.clone();
        events.extend(upper.events.iter().copied());
        Ok(RawDiagram { bottom: self.bottom.clone(), events })
    }

    pub fn top(&self) -> Result<Word, DiagramError> {
        let t = self.trace(usize::MAX);
        if let Some(v) = t.violations.iter().find(|v| {
            matches!(
                v,
                Violation::PositionOutOfRange { .. }
                    | Violation::RedMerge { .. }
                    | Violation::MergeMismatch { .. }
                    | Violation::SplitThin { .. }
            )
        }) {
            return Err(DiagramError::Invalid(format!("{v:?}")));
        }
        Ok(t.top)
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.trace(usize::MAX).violations
    }

    /// Simulates the events; `labels` bounds the winding vector length
    /// (`usize::MAX` uses the largest label present).
    pub fn trace(&self, labels: usize) -> Trace {
        let max_label = self.bottom.0.iter().map(|e| e.label as usize).max().unwrap_or(0);
        let labels = if labels == usize::MAX { max_label } else { labels };
        let mut next_id = 0;
        let mut slots: Vec<Slot> = self
            .bottom
            .0
            .iter()
            .map(|e| {
                let ids = (next_id..next_id + e.thickness as usize).collect();
                next_id += e.thickness as usize;
                Slot { entry: *e, ids }
            })
            .collect();
        let reds = self.bottom.red_positions();
        let left_red = reds.first().map(|&p| slots[p - 1].ids[0]);
        let right_red = reds.get(1).map(|&p| slots[p - 1].ids[0]);
        let mut winding = vec![0i32; labels];
        let mut twist = 0;
        let mut right_red_winding = 0;
        let mut red_signs = Vec::new();
        let mut violations = Vec::new();

        let wrap = |slot: &Slot, dir: i32, winding: &mut Vec<i32>, twist: &mut i32, rr: &mut i32| {
            if slot.entry.is_red() {
                if Some(slot.ids[0]) == left_red {
                    *twist += dir;
                } else if Some(slot.ids[0]) == right_red {
                    *rr += dir;
                }
            } else if (slot.entry.label as usize) >= 1 && (slot.entry.label as usize) <= winding.len() {
                winding[slot.entry.label as usize - 1] += dir * slot.entry.thickness as i32;
            }
        };

        for (step, ev) in self.events.iter().enumerate() {
            let len = slots.len();
            match *ev {
                Event::Cross(p) => {
                    if p == 0 || p > len || len < 2 {
                        violations.push(Violation::PositionOutOfRange { step });
                        continue;
                    }
                    let q = if p == len { 1 } else { p + 1 };
                    let (a, b) = (&slots[p - 1], &slots[q - 1]);
                    if a.entry.is_red() && b.entry.is_red() {
                        let sign = if Some(a.ids[0]) == left_red { 1 } else { -1 };
                        red_signs.push(sign);
                    }
                    if p == len {
                        let last = slots.pop().unwrap();
                        wrap(&last, 1, &mut winding, &mut twist, &mut right_red_winding);
                        let first = slots.remove(0);
                        wrap(&first, -1, &mut winding, &mut twist, &mut right_red_winding);
                        slots.insert(0, last);
                        slots.push(first);
                    } else {
                        slots.swap(p - 1, p);
                    }
                }
                Event::Dot(p) => {
                    if p == 0 || p > len {
                        violations.push(Violation::PositionOutOfRange { step });
                    } else if slots[p - 1].entry.is_red() {
                        violations.push(Violation::DotOnRed { step });
                    }
                }
                Event::Split(p) => {
                    if p == 0 || p > len {
                        violations.push(Violation::PositionOutOfRange { step });
                        continue;
                    }
                    let s = &slots[p - 1];
                    if s.entry.thickness != 2 {
                        violations.push(Violation::SplitThin { step });
                        continue;
                    }
                    let s = slots.remove(p - 1);
                    let e = Endpoint { thickness: 1, ..s.entry };
                    slots.insert(p - 1, Slot { entry: e, ids: vec![s.ids[1]] });
                    slots.insert(p - 1, Slot { entry: e, ids: vec![s.ids[0]] });
                }
                Event::Merge(p) => {
                    if p == 0 || p >= len {
                        violations.push(Violation::PositionOutOfRange { step });
                        continue;
                    }
                    let (a, b) = (&slots[p - 1], &slots[p]);
                    if a.entry.is_red() || b.entry.is_red() {
                        violations.push(Violation::RedMerge { step });
                        continue;
                    }
                    if a.entry.label != b.entry.label || a.entry.thickness != 1 || b.entry.thickness != 1 {
                        violations.push(Violation::MergeMismatch { step });
                        continue;
                    }
                    let b = slots.remove(p);
                    let a = &mut slots[p - 1];
                    a.entry.thickness = 2;
                    a.ids.extend(b.ids);
                }
                Event::WrapRight => {
                    if len == 0 {
                        violations.push(Violation::PositionOutOfRange { step });
                        continue;
                    }
                    let last = slots.pop().unwrap();
                    wrap(&last, 1, &mut winding, &mut twist, &mut right_red_winding);
                    slots.insert(0, last);
                }
                Event::WrapLeft => {
                    if len == 0 {
                        violations.push(Violation::PositionOutOfRange { step });
                        continue;
                    }
                    let first = slots.remove(0);
                    wrap(&first, -1, &mut winding, &mut twist, &mut right_red_winding);
                    slots.push(first);
                }
            }
        }
        if red_signs.iter().any(|&s| s > 0) && red_signs.iter().any(|&s| s < 0) {
            violations.push(Violation::RedBigon);
        } else if left_red.is_some() && right_red.is_some() && red_signs.len() != twist.unsigned_abs() as usize {
            violations.push(Violation::RedCrossingCount { crossings: red_signs.len(), twist });
        }
        if right_red_winding != 0 {
            violations.push(Violation::RightRedWinds { winding: right_red_winding });
        }
        Trace {
            top: Word(slots.iter().map(|s| s.entry).collect()),
            winding,
            twist,
            right_red_winding,
            red_crossing_signs: red_signs,
            violations,
        }
    }

    pub fn parse(word: &str, events: &str) -> Result<RawDiagram, ParseError> {
        Ok(RawDiagram { bottom: parse_word(word)?, events: parse_events(events)? })
    }

    /// Where each thin strand ends: the thin affine permutation of the
    /// diagram, with the thin strands inside a thick top entry in the order
    /// they were merged, and the number of thin crossings drawn.
    pub fn strand_map(&self) -> Result<StrandMap, DiagramError> {
        let mut next_id = 0;
        let mut slots: Vec<Vec<usize>> = Vec::new();
        for e in &self.bottom.0 {
            slots.push((next_id..next_id + e.thickness as usize).collect());
            next_id += e.thickness as usize;
        }
        let mut winding = vec![0i32; next_id];
        let mut crossings = 0;
        let bad = |ev: &Event| DiagramError::Invalid(format!("event {ev} does not apply"));
        for ev in &self.events {
            let len = slots.len();
            match *ev {
                Event::Cross(p) => {
                    if p == 0 || p > len || len < 2 {
                        return Err(bad(ev));
                    }
                    let q = if p == len { 1 } else { p + 1 };
                    crossings += slots[p - 1].len() * slots[q - 1].len();
                    if p == len {
                        for &i in &slots[len - 1] {
                            winding[i] += 1;
                        }
                        for &i in &slots[0] {
                            winding[i] -= 1;
                        }
                        slots.swap(0, len - 1);
                    } else {
                        slots.swap(p - 1, p);
                    }
                }
                Event::Dot(p) => {
                    if p == 0 || p > len {
                        return Err(bad(ev));
                    }
                }
                Event::Split(p) => {
                    if p == 0 || p > len || slots[p - 1].len() != 2 {
                        return Err(bad(ev));
                    }
                    let ids = slots.remove(p - 1);
                    slots.insert(p - 1, vec![ids[1]]);
                    slots.insert(p - 1, vec![ids[0]]);
                }
                Event::Merge(p) => {
                    if p == 0 || p >= len {
                        return Err(bad(ev));
                    }
                    let b = slots.remove(p);
                    slots[p - 1].extend(b);
                }
                Event::WrapRight | Event::WrapLeft => {
                    if len == 0 {
                        return Err(bad(ev));
                    }
                    if *ev == Event::WrapRight {
                        let last = slots.pop().unwrap();
                        for &i in &last {
                            winding[i] += 1;
                        }
                        slots.insert(0, last);
                    } else {
                        let first = slots.remove(0);
                        for &i in &first {
                            winding[i] -= 1;
                        }
                        slots.push(first);
                    }
                }
            }
        }
        let n = next_id as i32;
        let mut f = vec![0i32; next_id];
        for (pos, id) in slots.iter().flatten().enumerate() {
            f[*id] = pos as i32 + 1 + winding[*id] * n;
        }
        Ok(StrandMap { perm: Perm(f), crossings })
    }
}

impl fmt::Display for RawDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word={}; events={}", self.bottom, events_to_string(&self.events))
    }
}

/// Text-format error with a character offset into the input.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn perr(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError { pos, msg: msg.into() }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("bad quiver data: {0}")]
    BadQuiver(String),
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("word mismatch: lower diagram ends in [{lower_top}], upper starts at [{upper_bottom}]")]
    WordMismatch { lower_top: String, upper_bottom: String },
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

fn tokens(s: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() || c == ',' || c == ';' {
            if !cur.is_empty() {
                out.push((start, std::mem::take(&mut cur)));
            }
        } else {
            if cur.is_empty() {
                start = i;
            }
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push((start, cur));
    }
    out
}

/// Parses words such as `R2 1 2(2) 3 R2`.  A run of digits without
/// parentheses such as `2132` is read as one label per digit.
pub fn parse_word(s: &str) -> Result<Word, ParseError> {
    let s = s.trim();
    let s = s.strip_prefix("word:").unwrap_or(s);
    let mut out = Vec::new();
    for (pos, tok) in tokens(s) {
        let bytes: Vec<char> = tok.chars().collect();
        if bytes[0] == 'R' || bytes[0] == 'r' {
            let label: u8 = tok[1..].parse().map_err(|_| perr(pos, format!("bad red label {tok:?}")))?;
            out.push(Endpoint::red(label));
        } else if let Some(open) = tok.find('(') {
            if !tok.ends_with(')') {
                return Err(perr(pos + tok.len(), "missing ')'"));
            }
            let label: u8 = tok[..open].parse().map_err(|_| perr(pos, format!("bad label in {tok:?}")))?;
            let t: u8 = tok[open + 1..tok.len() - 1]
                .parse()
                .map_err(|_| perr(pos + open + 1, format!("bad thickness in {tok:?}")))?;
            if t == 0 {
                return Err(perr(pos + open + 1, "thickness must be positive"));
            }
            out.push(Endpoint::thick(label, t));
        } else if bytes.iter().all(|c| c.is_ascii_digit()) {
            for (k, c) in bytes.iter().enumerate() {
                let label = c.to_digit(10).unwrap() as u8;
                if label == 0 {
                    return Err(perr(pos + k, "label 0 is not a vertex"));
                }
                out.push(Endpoint::black(label));
            }
        } else {
            return Err(perr(pos, format!("unrecognized token {tok:?}")));
        }
    }
    if out.is_empty() {
        return Err(perr(0, "empty word"));
    }
    Ok(Word(out))
}

/// Parses event lists such as `x3; d2; r; s3; m3; l`.
pub fn parse_events(s: &str) -> Result<Vec<Event>, ParseError> {
    let s = s.trim();
    let s = s.strip_prefix("events:").unwrap_or(s);
    let mut out = Vec::new();
    for (pos, tok) in tokens(s) {
        let (head, rest) = tok.split_at(1);
        let num = || -> Result<usize, ParseError> {
            let p: usize = rest.parse().map_err(|_| perr(pos + 1, format!("bad position in {tok:?}")))?;
            if p == 0 {
                return Err(perr(pos + 1, "positions are 1-based"));
            }
            Ok(p)
        };
        let ev = match head {
            "x" => Event::Cross(num()?),
            "d" => Event::Dot(num()?),
            "s" => Event::Split(num()?),
            "m" => Event::Merge(num()?),
            "r" if rest.is_empty() => Event::WrapRight,
            "l" if rest.is_empty() => Event::WrapLeft,
            _ => return Err(perr(pos, format!("unrecognized event {tok:?}"))),
        };
        out.push(ev);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_round_trip() {
        let w = parse_word("R2 1 2(2) 3 R2").unwrap();
        assert_eq!(w.to_string(), "R2 1 2(2) 3 R2");
        assert_eq!(parse_word(&w.to_string()).unwrap(), w);
        assert_eq!(w.thin_len(), 6);
        let compact = parse_word("R2 2132 R2").unwrap();
        assert_eq!(compact.to_string(), "R2 2 1 3 2 R2");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let e = parse_word("R2 1 2(2 3").unwrap_err();
        assert_eq!(e.pos, 8);
        let e = parse_events("x3; q2").unwrap_err();
        assert_eq!(e.pos, 4);
    }

    #[test]
    fn idempotent_validates() {
        let d = RawDiagram::identity(parse_word("R2 1 2(2) 3 R2").unwrap());
        assert!(d.validate().is_empty());
    }

    #[test]
    fn dot_on_red_is_flagged() {
        let d = RawDiagram::parse("R2 1 2(2) 3 R2", "d1").unwrap();
        assert_eq!(d.validate(), vec![Violation::DotOnRed { step: 0 }]);
    }

    #[test]
    fn red_bigon_is_flagged() {
        // The two red strands cross and cross back.
        let d = RawDiagram::parse("R2 R2", "x1; x1").unwrap();
        assert!(d.validate().contains(&Violation::RedBigon));
    }

    #[test]
    fn seam_crossing_tracks_winding() {
        let d = RawDiagram::parse("1 2", "x2").unwrap();
        let t = d.trace(2);
        assert_eq!(t.top.to_string(), "2 1");
        assert_eq!(t.winding, vec![-1, 1]);
    }

    #[test]
    fn split_and_merge_regroup() {
        let d = RawDiagram::parse("2(2)", "s1; x1; m1").unwrap();
        assert!(d.validate().is_empty());
        assert_eq!(d.top().unwrap().to_string(), "2(2)");
    }
}
