//! Idempotent words for Gr(2,4), the generators of the modules `eR e(i)`
//! on the patches of D13 and D24, their transition matrices, and the
//! line bundles of the k = 1 case.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coulomb::{Coulomb, CoulombError};
use crate::diagram::{DiagramError, Endpoint, Event, RawDiagram, Word};
use crate::golden::GoldenSet;
use crate::gradings::crossing_degree;
use crate::normal::{Element, Engine, EngineError, NormalDiagram};
use crate::operator::Perm;
use crate::poly::Mono;
use crate::plucker::{identify, nullspace, var_index, Q, Cocycle2, Entry, Equivalence, PluckerError, PluckerPoly, Reference};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BundleError {
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("unsupported word: {0}")]
    UnsupportedWord(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Coulomb(#[from] CoulombError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Plucker(#[from] PluckerError),
}

/// The six classes of words for n = 4, k = 2 up to reordering.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum WordClass {
    /// `R2 1 2(2) 3 R2`
    ThickBetween,
    /// `R2 R2 1 2(2) 3`
    ThickOutside,
    /// `R2 2 1 3 2 R2`
    W2132,
    /// `R2 R2 2 3 1 2`
    W2312,
    /// `R2 2 3 R2 2 1`
    W23221,
    /// `R2 2 1 R2 2 3`
    W21223,
}

impl WordClass {
    pub const ALL: [WordClass; 6] = [
        WordClass::ThickBetween,
        WordClass::ThickOutside,
        WordClass::W2132,
        WordClass::W2312,
        WordClass::W23221,
        WordClass::W21223,
    ];

    pub fn canonical(&self) -> &'static str {
        match self {
            WordClass::ThickBetween => "R2 1 2(2) 3 R2",
            WordClass::ThickOutside => "R2 R2 1 2(2) 3",
            WordClass::W2132 => "R2 2 1 3 2 R2",
            WordClass::W2312 => "R2 R2 2 3 1 2",
            WordClass::W23221 => "R2 2 3 R2 2 1",
            WordClass::W21223 => "R2 2 1 R2 2 3",
        }
    }

    pub fn word(&self) -> Word {
        Word::parse(self.canonical()).expect("canonical word parses")
    }

    /// Short key used in golden names and on the command line.
    pub fn key(&self) -> &'static str {
        match self {
            WordClass::ThickBetween => "12(2)3",
            WordClass::ThickOutside => "2212(2)3",
            WordClass::W2132 => "2132",
            WordClass::W2312 => "2312",
            WordClass::W23221 => "23221",
            WordClass::W21223 => "21223",
        }
    }

    pub fn from_key(s: &str) -> Option<WordClass> {
        WordClass::ALL.into_iter().find(|c| c.key() == s || c.canonical() == s)
    }

    pub fn rank(&self) -> usize {
        match self {
            WordClass::ThickBetween | WordClass::ThickOutside => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for WordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

/// How a word decomposes into the six classes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Classification {
    Single(WordClass),
    /// Two black 2's next to each other: two copies of the thick class.
    Double(WordClass),
    /// A subword `2 i 2`: the classes of `i 2(2)` and `2(2) i`.
    Split(WordClass, WordClass),
}

impl Classification {
    pub fn summands(&self) -> Vec<WordClass> {
        match *self {
            Classification::Single(c) => vec![c],
            Classification::Double(c) => vec![c, c],
            Classification::Split(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tok {
    One,
    Three,
    Two,
    Thick,
    RedL,
    RedR,
}

fn tokens(w: &Word) -> Result<Vec<Tok>, BundleError> {
    let bad = || BundleError::BadWord(format!("{w}: need one 1, one 3, two black 2's or one 2(2), two red 2's"));
    let mut reds = 0;
    let mut out = Vec::new();
    for e in &w.0 {
        let t = match (e.is_red(), e.label, e.thickness) {
            (true, 2, 1) => {
                reds += 1;
                if reds == 1 {
                    Tok::RedL
                } else {
                    Tok::RedR
                }
            }
            (false, 1, 1) => Tok::One,
            (false, 3, 1) => Tok::Three,
            (false, 2, 1) => Tok::Two,
            (false, 2, 2) => Tok::Thick,
            _ => return Err(bad()),
        };
        out.push(t);
    }
    let count = |t: Tok| out.iter().filter(|&&x| x == t).count();
    let blacks = count(Tok::Two) + 2 * count(Tok::Thick);
    if count(Tok::One) != 1 || count(Tok::Three) != 1 || reds != 2 || blacks != 2 {
        return Err(bad());
    }
    Ok(out)
}

/// Class of a word up to reordering letters that are not black 2's, the two
/// red strands keeping their identities.
pub fn classify_word(w: &Word) -> Result<Classification, BundleError> {
    classify_tokens(&tokens(w)?)
}

fn classify_tokens(t: &[Tok]) -> Result<Classification, BundleError> {
    let len = t.len();
    if let Some(p) = t.iter().position(|&x| x == Tok::Thick) {
        // Which red comes first going round from the thick strand.
        let first = (1..len).map(|d| t[(p + d) % len]).find(|x| matches!(x, Tok::RedL | Tok::RedR)).unwrap();
        return Ok(Classification::Single(if first == Tok::RedR {
            WordClass::ThickBetween
        } else {
            WordClass::ThickOutside
        }));
    }
    let twos: Vec<usize> = (0..len).filter(|&i| t[i] == Tok::Two).collect();
    let (i, j) = (twos[0], twos[1]);
    let arc1: Vec<Tok> = t[i + 1..j].to_vec();
    let arc2: Vec<Tok> = t[j + 1..].iter().chain(t[..i].iter()).copied().collect();
    // Cyclic word starting at a black 2 with `span` letters replaced.
    let single = |start: usize, span: usize, with: &[Tok]| -> Result<WordClass, BundleError> {
        let mut v: Vec<Tok> = with.to_vec();
        v.extend((span..len).map(|d| t[(start + d) % len]));
        match classify_tokens(&v)? {
            Classification::Single(c) => Ok(c),
            other => Err(BundleError::BadWord(format!("unexpected {other:?}"))),
        }
    };
    for (arc, start) in [(&arc1, i), (&arc2, j)] {
        match arc.len() {
            0 => return Ok(Classification::Double(single(start, 2, &[Tok::Thick])?)),
            1 => {
                let x = arc[0];
                return Ok(Classification::Split(single(start, 3, &[x, Tok::Thick])?, single(start, 3, &[Tok::Thick, x])?));
            }
            _ => {}
        }
    }
    let has = |a: &[Tok], x: Tok| a.contains(&x);
    let class = if has(&arc1, Tok::One) && has(&arc1, Tok::Three) || has(&arc2, Tok::One) && has(&arc2, Tok::Three) {
        let reds = if has(&arc1, Tok::One) { &arc2 } else { &arc1 };
        if reds[0] == Tok::RedR {
            WordClass::W2132
        } else {
            WordClass::W2312
        }
    } else {
        let with3 = if has(&arc1, Tok::Three) { &arc1 } else { &arc2 };
        if has(with3, Tok::RedR) {
            WordClass::W23221
        } else {
            WordClass::W21223
        }
    };
    Ok(Classification::Single(class))
}

/// Rank of the bundle of a word: the product of `v_i!` over the product of
/// the factorials of the thicknesses.
pub fn rank(w: &Word) -> u64 {
    let fact = |m: u64| (1..=m).product::<u64>();
    let mut counts: BTreeMap<u8, u64> = BTreeMap::new();
    let mut denom = 1;
    for e in w.0.iter().filter(|e| !e.is_red()) {
        *counts.entry(e.label).or_insert(0) += e.thickness as u64;
        denom *= fact(e.thickness as u64);
    }
    counts.values().map(|&v| fact(v)).product::<u64>() / denom
}

/// Patch of the Grassmannian where `D13` or `D24` is invertible.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Patch {
    P13,
    P24,
}

impl Patch {
    pub fn number(&self) -> u8 {
        match self {
            Patch::P13 => 13,
            Patch::P24 => 24,
        }
    }

    pub fn from_number(n: u8) -> Option<Patch> {
        match n {
            13 => Some(Patch::P13),
            24 => Some(Patch::P24),
            _ => None,
        }
    }
}

/// A generator diagram `Z^{s,k}` on one patch.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GeneratorDiagram {
    pub word: Word,
    pub patch: Patch,
    pub s: u8,
    pub k: i32,
    pub diagram: RawDiagram,
    /// Thin strand permutation, inside a thick top entry in the order of
    /// fewest crossings.
    pub perm: Perm,
}

/// Lift of a strand to the universal cover: bottom and top abscissae.
#[derive(Clone, Copy, Debug)]
struct Lift {
    bottom: f64,
    top: f64,
}

/// Winding of the strand from `b` to top position `q` that stays between
/// two consecutive lifts of `obstacle`.
fn avoiding(b: f64, q: f64, obstacle: Lift) -> i32 {
    let delta = if b > obstacle.bottom { 0 } else { 1 };
    let m = (obstacle.top - q).floor() as i32 + 1;
    m - delta
}

const TOP: &str = "R2 1 2(2) 3 R2";

/// Top entry of each label: 1 and 5 for the reds, then 2, 3, 4.
fn top_pos(entry: usize) -> f64 {
    entry as f64 / 6.0
}

/// Builds `Z^{s,k}` on a patch from the tie rules.  The left red strand wraps
/// `k` times; for two thin black 2's, index `s = 1` ties the left one to the
/// left red strand and `s = 2` ties it to the right one.  The 1 and 3 strands
/// avoid the black strand tied to the left red (patch 13) or to the right red
/// (patch 24).  With a thick 2 the generator is the same on both patches.
pub fn build_generator(word: &Word, patch: Patch, s: u8, k: i32) -> Result<GeneratorDiagram, BundleError> {
    let t = tokens(word)?;
    let len = t.len();
    let bx = |i: usize| (i + 1) as f64 / (len + 1) as f64;
    let find = |x: Tok| t.iter().position(|&y| y == x).unwrap();
    let red_l = Lift { bottom: bx(find(Tok::RedL)), top: top_pos(1) + k as f64 };
    let red_r = Lift { bottom: bx(find(Tok::RedR)), top: top_pos(5) };
    // Winding per bottom entry.
    let mut wind = vec![0i32; len];
    wind[find(Tok::RedL)] = k;
    let obstacle;
    if let Some(p) = t.iter().position(|&x| x == Tok::Thick) {
        if s != 1 {
            return Err(BundleError::UnsupportedWord(format!("{word}: one generator only, s must be 1")));
        }
        let w = avoiding(bx(p), top_pos(3), red_l);
        if w != avoiding(bx(p), top_pos(3), red_r) {
            return Err(BundleError::UnsupportedWord(format!("{word}: thick strand cannot avoid both reds")));
        }
        wind[p] = w;
        obstacle = Lift { bottom: bx(p), top: top_pos(3) + w as f64 };
    } else {
        match classify_word(word)? {
            Classification::Single(_) => {}
            other => return Err(BundleError::UnsupportedWord(format!("{word}: decomposes as {other:?}"))),
        }
        let twos: Vec<usize> = (0..len).filter(|&i| t[i] == Tok::Two).collect();
        let (to_left, to_right) = match s {
            1 => (twos[0], twos[1]),
            2 => (twos[1], twos[0]),
            _ => return Err(BundleError::UnsupportedWord(format!("index s={s}"))),
        };
        wind[to_left] = avoiding(bx(to_left), top_pos(3), red_l);
        wind[to_right] = avoiding(bx(to_right), top_pos(3), red_r);
        let tied = if patch == Patch::P13 { to_left } else { to_right };
        obstacle = Lift { bottom: bx(tied), top: top_pos(3) + wind[tied] as f64 };
    }
    let (p1, p3) = (find(Tok::One), find(Tok::Three));
    wind[p1] = avoiding(bx(p1), top_pos(2), obstacle);
    wind[p3] = avoiding(bx(p3), top_pos(4), obstacle);

    // Thin top slots of `R2 1 2 2 3 R2`.
    let slots = |x: Tok| -> Vec<i32> {
        match x {
            Tok::RedL => vec![1],
            Tok::One => vec![2],
            Tok::Two | Tok::Thick => vec![3, 4],
            Tok::Three => vec![5],
            Tok::RedR => vec![6],
        }
    };
    let n_thin = 6;
    let thick_bottom = t.contains(&Tok::Thick);
    let build = |swap: bool| -> Perm {
        let mut f = Vec::new();
        let mut seen_two = false;
        for (i, &x) in t.iter().enumerate() {
            let sl = slots(x);
            let w = wind[i] * n_thin;
            match x {
                Tok::Thick => {
                    f.push(3 + w);
                    f.push(4 + w);
                }
                Tok::Two => {
                    let first = !seen_two;
                    seen_two = true;
                    f.push(if first ^ swap { 3 } else { 4 } + w);
                }
                _ => f.push(sl[0] + w),
            }
        }
        Perm(f)
    };
    let perm = canonical_perm(&build(false));
    let diagram = if thick_bottom {
        // Move the thick strand as one entry.
        let entry_perm = Perm(
            t.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let top = match x {
                        Tok::RedL => 1,
                        Tok::One => 2,
                        Tok::Thick => 3,
                        Tok::Three => 4,
                        _ => 5,
                    };
                    top + 5 * wind[i]
                })
                .collect(),
        );
        let nd = NormalDiagram { bottom: word.clone(), perm: entry_perm, dots: vec![0; len] };
        nd.raw()
    } else {
        let nd = NormalDiagram { bottom: word.clone(), perm: perm.clone(), dots: vec![0; len] };
        let mut events = nd.events();
        events.push(Event::Merge(3));
        RawDiagram::new(word.clone(), events)
    };
    debug_assert_eq!(diagram.top().map(|w| w.to_string()).ok().as_deref(), Some(TOP));
    Ok(GeneratorDiagram { word: word.clone(), patch, s, k, diagram, perm })
}

/// Chooses the order of the two thin strands entering the thick top entry
/// with fewer crossings.
fn canonical_perm(p: &Perm) -> Perm {
    let n = p.n() as i32;
    let swapped = Perm(
        p.0.iter()
            .map(|&v| {
                let pos = (v - 1).rem_euclid(n) + 1;
                let base = v - pos;
                match pos {
                    3 => base + 4,
                    4 => base + 3,
                    _ => v,
                }
            })
            .collect(),
    );
    let (a, b) = (p.length(), swapped.length());
    if a < b || (a == b && *p <= swapped) {
        p.clone()
    } else {
        swapped
    }
}

/// Comparison of a built generator with a transcribed figure.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GoldenMatch {
    pub name: String,
    pub matching: bool,
    pub winding: bool,
    pub twist: bool,
    pub events: bool,
    /// The figure has as many crossings as its reduced form.
    pub figure_tight: bool,
    /// Both reduce to the same element, when an engine was supplied.
    pub element_equal: Option<bool>,
    pub built: String,
    pub figure: String,
}

impl GoldenMatch {
    pub fn pass(&self) -> bool {
        self.matching && self.winding && self.twist && self.events && self.element_equal != Some(false)
    }
}

/// Canonical event sequence of a diagram with top `R2 1 2(2) 3 R2` and thin
/// bottom: reduced crossings, rotation, then the merge.
fn canonical_events(perm: &Perm, bottom: &Word) -> Vec<Event> {
    let thin = bottom.thin();
    let nd = NormalDiagram { bottom: thin.clone(), perm: perm.clone(), dots: vec![0; thin.len()] };
    nd.events()
}

pub fn compare_with_golden(name: &str, built: &GeneratorDiagram, figure: &RawDiagram) -> Result<GoldenMatch, BundleError> {
    let map = figure.strand_map()?;
    let fig_perm = canonical_perm(&map.perm);
    let ours = built.diagram.strand_map()?;
    let tf = figure.trace(3);
    let tb = built.diagram.trace(3);
    Ok(GoldenMatch {
        name: name.to_string(),
        matching: figure.bottom == built.word && fig_perm == built.perm && canonical_perm(&ours.perm) == built.perm,
        winding: tf.winding == tb.winding,
        twist: tf.twist == tb.twist && tb.twist == built.k,
        events: canonical_events(&fig_perm, &figure.bottom) == canonical_events(&built.perm, &built.word),
        figure_tight: map.crossings == map.perm.length().min(fig_perm.length()),
        element_equal: None,
        built: built.diagram.to_string(),
        figure: figure.to_string(),
    })
}

/// Parses `Z_<key>_s<s>_<patch>_k<k>`.
pub fn parse_generator_name(name: &str) -> Option<(String, u8, Patch, i32)> {
    let rest = name.strip_prefix("Z_")?;
    let mut parts = rest.rsplitn(4, '_');
    let k = parts.next()?.strip_prefix('k')?.parse().ok()?;
    let patch = Patch::from_number(parts.next()?.parse().ok()?)?;
    let s = parts.next()?.strip_prefix('s')?.parse().ok()?;
    let key = parts.next()?.to_string();
    Some((key, s, patch, k))
}

/// Rebuilds every generator figure in the golden set and compares; with an
/// engine the normal forms are compared too.
pub fn validate_golden(golden: &GoldenSet, engine: Option<&Engine>) -> Result<Vec<GoldenMatch>, BundleError> {
    let mut out = Vec::new();
    for (name, figure) in golden.iter() {
        let Some((_, s, patch, k)) = parse_generator_name(name) else { continue };
        let built = build_generator(&figure.bottom, patch, s, k)?;
        let mut m = compare_with_golden(name, &built, figure)?;
        if let Some(e) = engine {
            m.element_equal = Some(e.reduce(figure)? == e.reduce(&built.diagram)?);
        }
        out.push(m);
    }
    Ok(out)
}

/// One term `c * D... * [bullet] * Z^{s,k}_24` of a transition identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: i64,
    pub ds: &'static [(u8, u8)],
    pub bullet: bool,
    pub s: u8,
    pub k: i32,
}

/// `lhs_ds * Z^{s,k}_13 = sum of terms`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Identity {
    pub name: &'static str,
    pub lhs_ds: &'static [(u8, u8)],
    pub s: u8,
    pub k: i32,
    pub rhs: Vec<Term>,
}

const fn term(coeff: i64, ds: &'static [(u8, u8)], bullet: bool, s: u8, k: i32) -> Term {
    Term { coeff, ds, bullet, s, k }
}

/// Weights of the bullet combination appearing in the identities.
pub const BULLET: [i64; 3] = [1, -1, 1];

/// The identities relating the two patches for a word class.
pub fn identities(c: WordClass) -> Vec<Identity> {
    const D13: (u8, u8) = (1, 3);
    const D24: (u8, u8) = (2, 4);
    match c {
        WordClass::ThickBetween => {
            vec![Identity { name: "Z13 = Z24", lhs_ds: &[], s: 1, k: 0, rhs: vec![term(1, &[], false, 1, 0)] }]
        }
        WordClass::ThickOutside => {
            vec![Identity { name: "Z13 = Z24", lhs_ds: &[], s: 1, k: 1, rhs: vec![term(1, &[], false, 1, 1)] }]
        }
        WordClass::W2132 => vec![
            Identity {
                name: "D24^2 Z1_13 = D13^2 Z1_24 + b D24 D13 Z2_24",
                lhs_ds: &[D24, D24],
                s: 1,
                k: 1,
                rhs: vec![term(1, &[D13, D13], false, 1, 1), term(1, &[D24, D13], true, 2, 1)],
            },
            Identity { name: "Z2_13 = Z2_24", lhs_ds: &[], s: 2, k: 1, rhs: vec![term(1, &[], false, 2, 1)] },
        ],
        WordClass::W2312 => vec![
            Identity {
                name: "D24 Z1_13 = D13 Z1_24 + b Z2_24",
                lhs_ds: &[D24],
                s: 1,
                k: 1,
                rhs: vec![term(1, &[D13], false, 1, 1), term(1, &[], true, 2, 2)],
            },
            Identity { name: "Z2_13 = Z2_24", lhs_ds: &[], s: 2, k: 2, rhs: vec![term(1, &[], false, 2, 2)] },
        ],
        WordClass::W23221 => vec![
            Identity {
                name: "D24 Z1_13 = D23 Z1_24 - D12 Z2_24",
                lhs_ds: &[D24],
                s: 1,
                k: 1,
                rhs: vec![term(1, &[(2, 3)], false, 1, 1), term(-1, &[(1, 2)], false, 2, 1)],
            },
            Identity {
                name: "D24 Z2_13 = D34 Z1_24 + D14 Z2_24",
                lhs_ds: &[D24],
                s: 2,
                k: 1,
                rhs: vec![term(1, &[(3, 4)], false, 1, 1), term(1, &[(1, 4)], false, 2, 1)],
            },
        ],
        WordClass::W21223 => vec![
            Identity {
                name: "D24 Z1_13 = D14 Z1_24 + D12 Z2_24",
                lhs_ds: &[D24],
                s: 1,
                k: 1,
                rhs: vec![term(1, &[(1, 4)], false, 1, 1), term(1, &[(1, 2)], false, 2, 1)],
            },
            Identity {
                name: "D24 Z2_13 = -D34 Z1_24 + D23 Z2_24",
                lhs_ds: &[D24],
                s: 2,
                k: 1,
                rhs: vec![term(-1, &[(3, 4)], false, 1, 1), term(1, &[(2, 3)], false, 2, 1)],
            },
        ],
    }
}

/// Bundle names given in the text for each class: the statement next to
/// the computation and the summary table.
pub fn stated_bundles(c: WordClass) -> (Reference, Reference) {
    match c {
        WordClass::ThickBetween => (Reference::O, Reference::O),
        WordClass::ThickOutside => (Reference::L(-1), Reference::L(-1)),
        WordClass::W2132 => (Reference::HL, Reference::HL),
        WordClass::W2312 => (Reference::H, Reference::H),
        WordClass::W23221 => (Reference::Tperp, Reference::Tperp),
        WordClass::W21223 => (Reference::Tperp, Reference::T),
    }
}

/// The separated words are named once more when comparing with the other
/// tilting bundle, with the opposite assignment to the lemmas.
pub fn stated_in_comparison(c: WordClass) -> Option<Reference> {
    match c {
        WordClass::W23221 => Some(Reference::T),
        WordClass::W21223 => Some(Reference::Tperp),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    /// Normal forms of both sides, filled in on failure.
    pub lhs: Option<serde_json::Value>,
    pub rhs: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionReport {
    pub class: WordClass,
    pub word: String,
    pub rank: u64,
    pub identities: Vec<IdentityCheck>,
    /// Frames on the D13 patch in terms of frames on the D24 patch.
    pub frame_change: String,
    /// `gamma^{24}_{13}`, the transpose of the frame change.
    pub gamma: Cocycle2,
    pub gamma_inverse: Option<Cocycle2>,
    pub cocycle_ok: bool,
    pub det: String,
    pub det_is_unit: bool,
    pub matches: Vec<(Reference, Equivalence)>,
    pub bundle: Option<Reference>,
    /// References matching the frame change read without transposing.
    pub untransposed_matches: Vec<Reference>,
    pub stated_lemma: Reference,
    pub stated_table: Reference,
    pub notes: Vec<String>,
}

impl TransitionReport {
    pub fn pass(&self) -> bool {
        self.identities.iter().all(|c| c.pass) && self.cocycle_ok && self.det_is_unit && self.bundle.is_some()
    }
}

/// Generators for a class, built once per (s, patch, k).
pub struct Generators<'a> {
    coulomb: &'a Coulomb,
    class: WordClass,
    cache: BTreeMap<(u8, Patch, i32), Element>,
}

impl<'a> Generators<'a> {
    pub fn new(coulomb: &'a Coulomb, class: WordClass) -> Self {
        Generators { coulomb, class, cache: BTreeMap::new() }
    }

    pub fn get(&mut self, s: u8, patch: Patch, k: i32) -> Result<Element, BundleError> {
        if let Some(e) = self.cache.get(&(s, patch, k)) {
            return Ok(e.clone());
        }
        let g = build_generator(&self.class.word(), patch, s, k)?;
        let e = self.coulomb.engine.reduce(&g.diagram)?;
        self.cache.insert((s, patch, k), e.clone());
        Ok(e)
    }
}

fn d_product(c: &Coulomb, ds: &[(u8, u8)], z: &Element) -> Result<Element, BundleError> {
    let mut acc = z.clone();
    for &(i, j) in ds.iter().rev() {
        let d = c.plucker_d(i as usize, j as usize)?.element;
        acc = c.engine.multiply(&d, &acc)?;
    }
    Ok(acc)
}

fn e_product(ds: &[(u8, u8)]) -> PluckerPoly {
    ds.iter()
        .fold(PluckerPoly::one(), |acc, &(i, j)| acc.mul(&PluckerPoly::var(var_index(i as usize, j as usize).unwrap())))
}

/// Name of the weight-2 slot standing for the bullet combination.
pub const BULLET_SLOT: &str = "b";

/// Checks the identities of a class as equalities of normal forms, assembles
/// the transition matrix and names the bundle.
pub fn verify_transitions(c: &Coulomb, class: WordClass) -> Result<TransitionReport, BundleError> {
    let mut gens = Generators::new(c, class);
    let bullet = c.bullet_combination(&BULLET)?;
    let mut checks = Vec::new();
    let rank = class.rank();
    let mut m = vec![vec![Entry::zero(); rank]; rank];
    for id in identities(class) {
        let lhs = d_product(c, id.lhs_ds, &gens.get(id.s, Patch::P13, id.k)?)?;
        let mut rhs: Option<Element> = None;
        let lhs_e = e_product(id.lhs_ds).mul(&PluckerPoly::unit(id.k, 0));
        let inv = lhs_e.inverse()?;
        for t in &id.rhs {
            let mut x = d_product(c, t.ds, &gens.get(t.s, Patch::P24, t.k)?)?;
            if t.bullet {
                x = c.engine.multiply(&bullet, &x)?;
            }
            let x = x.scale(t.coeff);
            rhs = Some(match rhs {
                None => x,
                Some(r) => r.add(&x),
            });
            let coeff = e_product(t.ds).mul(&PluckerPoly::unit(0, t.k)).mul(&inv).scale(t.coeff);
            let entry = if t.bullet { Entry::slot(BULLET_SLOT, coeff) } else { Entry::poly(coeff) };
            let (r, col) = (id.s as usize - 1, t.s as usize - 1);
            m[r][col] = m[r][col].add(&entry);
        }
        let rhs = rhs.expect("identity has terms");
        let pass = lhs == rhs;
        checks.push(IdentityCheck {
            name: id.name.to_string(),
            pass,
            lhs: (!pass).then(|| lhs.to_json()),
            rhs: (!pass).then(|| rhs.to_json()),
        });
    }
    let frame_change = Cocycle2::new(m)?;
    let gamma = frame_change.transpose();
    let det = gamma.det()?;
    let det_is_unit = !det.has_slot() && det.base.inverse().is_ok();
    let gamma_inverse = gamma.inverse().ok();
    let cocycle_ok = match &gamma_inverse {
        Some(inv) => gamma.mul(inv)?.is_identity() && inv.mul(&gamma)?.is_identity(),
        None => false,
    };
    let matches = identify(&gamma)?;
    let bundle = match matches.as_slice() {
        [(r, Equivalence::Equivalent { .. })] => Some(*r),
        _ => None,
    };
    let untransposed_matches =
        identify(&frame_change)?.into_iter().filter(|(_, e)| e.is_equivalent()).map(|(r, _)| r).collect();
    let (stated_lemma, stated_table) = stated_bundles(class);
    let mut notes = Vec::new();
    if let Some(b) = bundle {
        let comparison = stated_in_comparison(class);
        let stated = [("lemma", Some(stated_lemma)), ("summary table", Some(stated_table)), ("comparison", comparison)];
        for (what, r) in stated.into_iter().filter_map(|(w, r)| r.map(|r| (w, r))) {
            if r != b {
                notes.push(format!("computed {b}, contradicting the {what} ({r})"));
            }
        }
    }
    Ok(TransitionReport {
        class,
        word: class.canonical().to_string(),
        rank: rank as u64,
        identities: checks,
        frame_change: frame_change.to_string(),
        gamma,
        gamma_inverse,
        cocycle_ok,
        det: det.to_string(),
        det_is_unit,
        matches,
        bundle,
        untransposed_matches,
        stated_lemma,
        stated_table,
        notes,
    })
}

/// Runs [`verify_transitions`] over the given classes, in parallel when the
/// feature is on.
pub fn verify_all(c: &Coulomb, classes: &[WordClass]) -> Vec<Result<TransitionReport, BundleError>> {
    crate::par::map(classes, true, |&cl| verify_transitions(c, cl))
}

/// Linear independence over Q of `{1, b1, b2, b3} . {Z1, Z2}` on a patch,
/// and of the same eight elements multiplied by the patch's Plücker diagram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreenessReport {
    pub class: WordClass,
    pub patch: Patch,
    pub k: i32,
    pub independent_at_k: bool,
    pub independent_at_k_plus_1: bool,
    /// A relation found, as coefficients on the eight products.
    pub relation: Option<Vec<String>>,
}

fn relation(elems: &[Element]) -> Option<Vec<Q>> {
    let mut coords: BTreeMap<(NormalDiagram, Mono), Vec<Q>> = BTreeMap::new();
    for (col, e) in elems.iter().enumerate() {
        for (d, p) in e.terms() {
            for (m, c) in p.terms() {
                coords.entry((d.clone(), *m)).or_insert_with(|| vec![Q::from_integer(0); elems.len()])[col] =
                    Q::from_integer(*c as i128);
            }
        }
    }
    let rows: Vec<Vec<Q>> = coords.into_values().collect();
    nullspace(&rows, elems.len()).into_iter().next()
}

pub fn freeness(c: &Coulomb, class: WordClass, patch: Patch, k: i32) -> Result<FreenessReport, BundleError> {
    if class.rank() != 2 {
        return Err(BundleError::UnsupportedWord(format!("{class} has rank 1")));
    }
    let mut gens = Generators::new(c, class);
    let zs = [gens.get(1, patch, k)?, gens.get(2, patch, k)?];
    let d = match patch {
        Patch::P13 => c.plucker_d(1, 3)?,
        Patch::P24 => c.plucker_d(2, 4)?,
    }
    .element;
    let mut coeffs = vec![c.idempotent()?];
    for i in 1..=3 {
        coeffs.push(c.bullet(i)?.element);
    }
    let mut at_k = Vec::new();
    for z in &zs {
        for b in &coeffs {
            at_k.push(c.engine.multiply(b, z)?);
        }
    }
    let at_k1 = at_k.iter().map(|e| c.engine.multiply(&d, e)).collect::<Result<Vec<_>, _>>()?;
    let (r0, r1) = (relation(&at_k), relation(&at_k1));
    Ok(FreenessReport {
        class,
        patch,
        k,
        independent_at_k: r0.is_none(),
        independent_at_k_plus_1: r1.is_none(),
        relation: r0.or(r1).map(|v| v.iter().map(|q| q.to_string()).collect()),
    })
}

/// The k = 1 statistic: the number of leftward jumps going from the red 1
/// through the black strands 1, ..., n-1 to the red n-1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K1Report {
    pub word: String,
    pub a_prime: u32,
    /// The line bundle is `O(exponent)`.
    pub exponent: i32,
    pub witness: RawDiagram,
    pub twist: i32,
    pub degree_one_crossings: usize,
    pub valid: bool,
}

fn k1_order(w: &Word, n: usize) -> Result<Vec<usize>, BundleError> {
    let bad = || BundleError::BadWord(format!("{w}: need one red 1, one red {}, one black of each label", n - 1));
    if n < 2 || w.len() != n + 1 {
        return Err(bad());
    }
    let reds: Vec<usize> = (0..w.len()).filter(|&i| w.0[i].is_red()).collect();
    if reds.len() != 2 || w.0.iter().any(|e| e.thickness != 1) {
        return Err(bad());
    }
    let (first, last) = if n == 2 {
        (reds[0], reds[1])
    } else {
        let one = reds.iter().copied().find(|&i| w.0[i].label == 1).ok_or_else(bad)?;
        let other = reds.iter().copied().find(|&i| w.0[i].label as usize == n - 1).ok_or_else(bad)?;
        (one, other)
    };
    let mut order = vec![first];
    for s in 1..n {
        let p = (0..w.len()).find(|&i| !w.0[i].is_red() && w.0[i].label as usize == s).ok_or_else(bad)?;
        order.push(p);
    }
    order.push(last);
    Ok(order)
}

/// `a'(i)` for a word with one red 1, one red n-1 and each black label once.
pub fn k1_a_prime(w: &Word, n: usize) -> Result<u32, BundleError> {
    let order = k1_order(w, n)?;
    Ok(order.windows(2).filter(|p| p[1] < p[0]).count() as u32)
}

/// The idempotent `R1 1 2 ... n-1 R(n-1)` the witness diagrams end at.
pub fn k1_target(n: usize) -> Word {
    let mut e = vec![Endpoint::red(1)];
    e.extend((1..n).map(|s| Endpoint::black(s as u8)));
    e.push(Endpoint::red((n - 1) as u8));
    Word(e)
}

/// Classifies a k = 1 word and builds the diagram to the target idempotent
/// in which each strand avoids the previous one.
pub fn k1_classify(w: &Word, n: usize) -> Result<K1Report, BundleError> {
    let order = k1_order(w, n)?;
    let a_prime = k1_a_prime(w, n)?;
    let len = n + 1;
    let bx = |i: usize| (i + 1) as f64 / (len + 1) as f64;
    let tx = |j: usize| (j + 1) as f64 / (len + 1) as f64;
    // Strand number j of the path ends at top entry j.
    let mut wind = vec![0i32; len];
    let mut prev = Lift { bottom: bx(order[0]), top: tx(0) };
    for (j, &p) in order.iter().enumerate().skip(1) {
        let w = avoiding(bx(p), tx(j), prev);
        wind[p] = w;
        prev = Lift { bottom: bx(p), top: tx(j) + w as f64 };
    }
    // Normalize so that the right red strand does not wind.
    let shift = -wind[order[len - 1]];
    let mut f = vec![0i32; len];
    for (j, &p) in order.iter().enumerate() {
        f[p] = (j + 1) as i32 + (wind[p] + shift) * len as i32;
    }
    let perm = Perm(f);
    let nd = NormalDiagram { bottom: w.clone(), perm: perm.clone(), dots: vec![0; len] };
    let witness = nd.raw();
    let trace = witness.trace(n - 1);
    let degree_one_crossings = crossings_of_degree(&perm, w, 1);
    let valid = trace.violations.is_empty()
        && witness.top().ok().as_ref() == Some(&k1_target(n))
        && degree_one_crossings == 0
        && trace.twist == a_prime as i32;
    Ok(K1Report {
        word: w.to_string(),
        a_prime,
        exponent: -(a_prime as i32),
        witness,
        twist: trace.twist,
        degree_one_crossings,
        valid,
    })
}

/// Crossings of the reduced diagram of `perm` whose degree is `deg`.
fn crossings_of_degree(perm: &Perm, bottom: &Word, deg: i64) -> usize {
    let n = perm.n() as i32;
    let mut total = 0;
    for i in 1..=n {
        let fi = perm.0[i as usize - 1];
        for j in 1..=n {
            let fj = perm.0[j as usize - 1];
            let kmin = if j > i { 0 } else { 1 };
            let kmax = (fi - fj - 1).div_euclid(n);
            if kmax >= kmin && crossing_degree(&bottom.0[i as usize - 1], &bottom.0[j as usize - 1]) == deg {
                total += (kmax - kmin + 1) as usize;
            }
        }
    }
    total
}

/// Words up to rotation, read from the red 1, counted by `a'`.
pub fn k1_census(n: usize) -> Result<Vec<u64>, BundleError> {
    if n < 2 {
        return Err(BundleError::BadWord(format!("n={n}")));
    }
    let mut letters: Vec<Endpoint> = (1..n).map(|s| Endpoint::black(s as u8)).collect();
    letters.push(Endpoint::red((n - 1) as u8));
    let mut counts = vec![0u64; n];
    let mut idx: Vec<usize> = (0..letters.len()).collect();
    loop {
        let mut e = vec![Endpoint::red(1)];
        e.extend(idx.iter().map(|&i| letters[i]));
        let a = k1_a_prime(&Word(e), n)? as usize;
        counts[a] += 1;
        if !next_permutation(&mut idx) {
            break;
        }
    }
    Ok(counts)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn canonical_words_classify_to_themselves() {
        for c in WordClass::ALL {
            assert_eq!(classify_word(&c.word()).unwrap(), Classification::Single(c), "{c}");
        }
        assert_eq!(classify_word(&w("1 3 2(2) R2 R2")).unwrap(), Classification::Single(WordClass::ThickOutside));
    }

    #[test]
    fn reorderings_keep_the_class() {
        assert_eq!(classify_word(&w("R2 2 3 1 2 R2")).unwrap(), Classification::Single(WordClass::W2132));
        assert_eq!(classify_word(&w("2 R2 R2 2 1 3")).unwrap(), Classification::Single(WordClass::W2312));
        assert_eq!(classify_word(&w("R2 2 R2 3 2 1")).unwrap(), Classification::Single(WordClass::W23221));
    }

    #[test]
    fn adjacent_and_separated_twos_split() {
        assert_eq!(classify_word(&w("R2 3 2 2 R2 1")).unwrap(), Classification::Double(WordClass::ThickBetween));
        match classify_word(&w("R2 2 1 2 3 R2")).unwrap() {
            Classification::Split(a, b) => assert_eq!(a.rank() + b.rank(), 2),
            other => panic!("{other:?}"),
        }
        assert!(classify_word(&w("R2 1 2 3 R2")).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&w("R2 1 2(2) 3 R2")), 1);
        assert_eq!(rank(&w("R2 2 1 3 2 R2")), 2);
        let e72 = crate::coulomb::coulomb_idempotent(7, 2).unwrap().word.unwrap();
        assert_eq!(rank(&e72), 1);
    }

    #[test]
    fn generator_names_parse() {
        assert_eq!(parse_generator_name("Z_12(2)3_s1_13_k0"), Some(("12(2)3".into(), 1, Patch::P13, 0)));
        assert_eq!(parse_generator_name("Z_2312_s2_24_k2"), Some(("2312".into(), 2, Patch::P24, 2)));
        assert_eq!(parse_generator_name("D13"), None);
    }

    fn plain() -> Coulomb {
        Coulomb::new(4, 2, crate::operator::Mode::Plain).unwrap()
    }

    #[test]
    fn golden_generators_are_rebuilt() {
        let c = plain();
        let all = validate_golden(GoldenSet::embedded(), Some(&c.engine)).unwrap();
        assert_eq!(all.len(), 18);
        for m in &all {
            assert!(m.pass(), "{m:?}");
            assert_eq!(m.element_equal, Some(true), "{}", m.name);
        }
        let loose: Vec<_> = all.iter().filter(|m| !m.figure_tight).map(|m| m.name.as_str()).collect();
        assert_eq!(loose, ["Z_2312_s1_13_k1", "Z_23221_s1_13_k1"]);
    }

    #[test]
    fn transitions_name_the_summary_bundles() {
        let c = plain();
        let expect = [
            (WordClass::ThickBetween, Reference::O),
            (WordClass::ThickOutside, Reference::L(-1)),
            (WordClass::W2132, Reference::HL),
            (WordClass::W2312, Reference::H),
            (WordClass::W23221, Reference::Tperp),
            (WordClass::W21223, Reference::T),
        ];
        let classes: Vec<_> = expect.iter().map(|e| e.0).collect();
        for (r, (cl, b)) in verify_all(&c, &classes).into_iter().zip(expect) {
            let json = serde_json::to_value(r.as_ref().unwrap()).unwrap();
            assert_eq!(json["gamma"], r.as_ref().unwrap().gamma.to_string());
            let r = r.unwrap();
            assert!(r.pass(), "{r:?}");
            assert_eq!(r.bundle, Some(b), "{cl}");
        }
    }

    #[test]
    fn separated_words_flag_the_prose() {
        let c = plain();
        let r = verify_transitions(&c, WordClass::W21223).unwrap();
        assert_eq!(r.notes.len(), 2, "{:?}", r.notes);
        assert!(r.notes[0].contains("lemma"));
        let r = verify_transitions(&c, WordClass::W23221).unwrap();
        assert_eq!(r.notes.len(), 1);
        assert_eq!(r.untransposed_matches, vec![Reference::T]);
    }

    #[test]
    fn d_shift_raises_twist() {
        let c = plain();
        for cl in [WordClass::W2132, WordClass::W2312, WordClass::W23221, WordClass::W21223] {
            for s in [1, 2] {
                for (patch, (i, j)) in [(Patch::P13, (1, 3)), (Patch::P24, (2, 4))] {
                    let d = c.plucker_d(i, j).unwrap().element;
                    let z2 = c.engine.reduce(&build_generator(&cl.word(), patch, s, 2).unwrap().diagram).unwrap();
                    let z3 = c.engine.reduce(&build_generator(&cl.word(), patch, s, 3).unwrap().diagram).unwrap();
                    assert_eq!(c.engine.multiply(&d, &z2).unwrap(), z3, "{cl} s{s} {patch:?}");
                }
            }
        }
    }

    #[test]
    fn rank_two_generators_are_free() {
        let c = plain();
        for cl in [WordClass::W2132, WordClass::W2312, WordClass::W23221, WordClass::W21223] {
            for patch in [Patch::P13, Patch::P24] {
                let r = freeness(&c, cl, patch, 2).unwrap();
                assert!(r.independent_at_k && r.independent_at_k_plus_1, "{r:?}");
            }
        }
    }

    #[test]
    fn k1_examples() {
        assert_eq!(k1_a_prime(&w("R1 1 2 3 R3"), 4).unwrap(), 0);
        assert_eq!(k1_a_prime(&w("R1 R3 3 2 1"), 4).unwrap(), 3);
        assert_eq!(k1_census(2).unwrap(), vec![1, 1]);
        for n in 2..=5 {
            let c = k1_census(n).unwrap();
            assert!(c.iter().all(|&m| m > 0), "{n}: {c:?}");
        }
    }

    #[test]
    fn k1_witnesses_have_twist_a_prime() {
        for s in ["R1 1 2 R2", "R1 2 1 R2", "1 R1 R2 2", "R1 R2 2 1"] {
            let r = k1_classify(&w(s), 3).unwrap();
            assert!(r.valid, "{s}: {r:?}");
        }
    }
}
