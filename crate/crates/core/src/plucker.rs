//! The homogeneous coordinate ring of Gr(2,4) localized at e13 and e24,
//! reference transition matrices, and equivalence of 2x2 cocycles under
//! constant changes of basis.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Q = Ratio<i128>;

pub const E12: usize = 0;
pub const E13: usize = 1;
pub const E14: usize = 2;
pub const E23: usize = 3;
pub const E24: usize = 4;
pub const E34: usize = 5;

const NAMES: [&str; 6] = ["e12", "e13", "e14", "e23", "e24", "e34"];

/// Index of `e_ij` for `1 <= i < j <= 4`.
pub fn var_index(i: usize, j: usize) -> Option<usize> {
    match (i, j) {
        (1, 2) => Some(E12),
        (1, 3) => Some(E13),
        (1, 4) => Some(E14),
        (2, 3) => Some(E23),
        (2, 4) => Some(E24),
        (3, 4) => Some(E34),
        _ => None,
    }
}

/// Exponent vector; only the e13 and e24 entries may be negative.
pub type Exp = [i32; 6];

/// Integer Laurent polynomial in the Plücker coordinates, kept in the normal
/// form where no monomial contains both e14 and e23.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PluckerPoly {
    terms: BTreeMap<Exp, i64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PluckerError {
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("size mismatch")]
    Size,
    #[error("product of two weight-2 slots")]
    SlotProduct,
    #[error("parse error: {0}")]
    Parse(String),
}

impl PluckerPoly {
    pub fn zero() -> Self {
        PluckerPoly::default()
    }

    pub fn constant(c: i64) -> Self {
        PluckerPoly::monomial([0; 6], c)
    }

    pub fn one() -> Self {
        PluckerPoly::constant(1)
    }

    pub fn var(v: usize) -> Self {
        let mut e = [0; 6];
        e[v] = 1;
        PluckerPoly::monomial(e, 1)
    }

    /// `e13^a e24^b`.
    pub fn unit(a: i32, b: i32) -> Self {
        let mut e = [0; 6];
        e[E13] = a;
        e[E24] = b;
        PluckerPoly::monomial(e, 1)
    }

    pub fn monomial(e: Exp, c: i64) -> Self {
        let mut p = PluckerPoly::zero();
        p.add_reduced(e, c);
        p
    }

    /// Builds from arbitrary terms, reducing each.
    pub fn from_terms<I: IntoIterator<Item = (Exp, i64)>>(it: I) -> Self {
        let mut p = PluckerPoly::zero();
        for (e, c) in it {
            p.add_reduced(e, c);
        }
        p
    }

    fn add_raw(&mut self, e: Exp, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    /// Adds `c x^e`, rewriting e14 e23 -> e13 e24 - e12 e34.
    fn add_reduced(&mut self, e: Exp, c: i64) {
        let m = e[E14].min(e[E23]);
        if m <= 0 {
            self.add_raw(e, c);
            return;
        }
        let mut base = e;
        base[E14] -= m;
        base[E23] -= m;
        // (e13 e24 - e12 e34)^m by the binomial theorem.
        let mut binom: i64 = 1;
        for t in 0..=m {
            let mut x = base;
            x[E13] += m - t;
            x[E24] += m - t;
            x[E12] += t;
            x[E34] += t;
            let sign = if t % 2 == 0 { 1 } else { -1 };
            self.add_raw(x, sign * binom * c);
            binom = binom * (m - t) as i64 / (t + 1) as i64;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    pub fn add(&self, o: &PluckerPoly) -> PluckerPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_raw(*e, *c);
        }
        r
    }

    pub fn neg(&self) -> PluckerPoly {
        self.scale(-1)
    }

    pub fn sub(&self, o: &PluckerPoly) -> PluckerPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: i64) -> PluckerPoly {
        let mut r = PluckerPoly::zero();
        for (e, c) in &self.terms {
            r.add_raw(*e, c * k);
        }
        r
    }

    pub fn mul(&self, o: &PluckerPoly) -> PluckerPoly {
        let mut r = PluckerPoly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut e = *a;
                for i in 0..6 {
                    e[i] += b[i];
                }
                r.add_reduced(e, c * d);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> PluckerPoly {
        (0..k).fold(PluckerPoly::one(), |acc, _| acc.mul(self))
    }

    /// Inverse when `self` is `±e13^a e24^b`.
    pub fn inverse(&self) -> Result<PluckerPoly, PluckerError> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            let only_units = (0..6).all(|i| i == E13 || i == E24 || e[i] == 0);
            if only_units && c.abs() == 1 {
                return Ok(PluckerPoly::monomial([0, -e[E13], 0, 0, -e[E24], 0], *c));
            }
        }
        Err(PluckerError::NotInvertible(self.to_string()))
    }

    /// Total degree, when homogeneous.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<i32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    /// Parses expressions such as `e12*e34 - e13*e24 + e14*e23` or `e24^2/e13^2`.
    pub fn parse(s: &str) -> Result<PluckerPoly, PluckerError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = PluckerPoly::zero();
        let mut rest = s.as_str();
        if rest.is_empty() {
            return Err(PluckerError::Parse("empty".into()));
        }
        while !rest.is_empty() {
            let sign = if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                -1
            } else {
                rest = rest.strip_prefix('+').unwrap_or(rest);
                1
            };
            if rest.is_empty() {
                return Err(PluckerError::Parse("dangling sign".into()));
            }
            let end = rest[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let mut coeff: i64 = sign;
            let mut e = [0i32; 6];
            let mut denom = false;
            let mut tok = String::new();
            let flush = |tok: &str, denom: bool, coeff: &mut i64, e: &mut Exp| -> Result<(), PluckerError> {
                if tok.is_empty() {
                    return Err(PluckerError::Parse(format!("bad term `{term}`")));
                }
                let (base, pow) = match tok.split_once('^') {
                    Some((b, p)) => (b, p.parse::<i32>().map_err(|_| PluckerError::Parse(format!("bad power in `{tok}`")))?),
                    None => (tok, 1),
                };
                if let Ok(c) = base.parse::<i64>() {
                    if denom || pow != 1 {
                        return Err(PluckerError::Parse(format!("bad constant in `{term}`")));
                    }
                    *coeff *= c;
                    return Ok(());
                }
                let v = NAMES
                    .iter()
                    .position(|n| *n == base.to_ascii_lowercase().replace('d', "e"))
                    .ok_or_else(|| PluckerError::Parse(format!("unknown variable `{base}`")))?;
                e[v] += if denom { -pow } else { pow };
                Ok(())
            };
            for ch in term.chars() {
                if ch == '*' || ch == '/' {
                    flush(&tok, denom, &mut coeff, &mut e)?;
                    tok.clear();
                    denom = ch == '/';
                } else {
                    tok.push(ch);
                }
            }
            flush(&tok, denom, &mut coeff, &mut e)?;
            if (0..6).any(|i| e[i] < 0 && i != E13 && i != E24) {
                return Err(PluckerError::Parse(format!("denominator other than e13, e24 in `{term}`")));
            }
            out = out.add(&PluckerPoly::monomial(e, coeff));
        }
        Ok(out)
    }
}

/// Normal form of a polynomial modulo the Plücker relation.
pub fn reduce_poly(p: &PluckerPoly) -> PluckerPoly {
    PluckerPoly::from_terms(p.terms().map(|(e, c)| (*e, *c)))
}

impl fmt::Display for PluckerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|(e, _)| std::cmp::Reverse(**e));
        for (k, (e, c)) in items.into_iter().enumerate() {
            let mut num = Vec::new();
            let mut den = Vec::new();
            for i in 0..6 {
                let x = e[i];
                let name = match x.abs() {
                    0 => continue,
                    1 => NAMES[i].to_string(),
                    a => format!("{}^{a}", NAMES[i]),
                };
                if x > 0 {
                    num.push(name)
                } else {
                    den.push(name)
                }
            }
            let sign = if *c < 0 { "-" } else if k > 0 { "+" } else { "" };
            let sep = if k > 0 { " " } else { "" };
            let a = c.abs();
            let mut body = if num.is_empty() {
                a.to_string()
            } else if a == 1 {
                num.join("*")
            } else {
                format!("{a}*{}", num.join("*"))
            };
            if !den.is_empty() {
                body = format!("{body}/{}", den.join("/"));
            }
            if k > 0 {
                write!(f, "{sep}{sign} {body}")?;
            } else {
                write!(f, "{sign}{body}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PluckerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Matrix entry: a Laurent polynomial plus multiples of named weight-2
/// functions that are left undetermined.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Entry {
    pub base: PluckerPoly,
    pub slots: BTreeMap<String, PluckerPoly>,
}

impl Entry {
    pub fn zero() -> Self {
        Entry::default()
    }

    pub fn poly(p: PluckerPoly) -> Self {
        Entry { base: p, slots: BTreeMap::new() }
    }

    /// `coeff * name`, with `name` a nonzero function of weight 2.
    pub fn slot(name: &str, coeff: PluckerPoly) -> Self {
        let mut slots = BTreeMap::new();
        if !coeff.is_zero() {
            slots.insert(name.to_string(), coeff);
        }
        Entry { base: PluckerPoly::zero(), slots }
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.slots.is_empty()
    }

    pub fn has_slot(&self) -> bool {
        !self.slots.is_empty()
    }

    pub fn add(&self, o: &Entry) -> Entry {
        let mut r = Entry { base: self.base.add(&o.base), slots: self.slots.clone() };
        for (k, v) in &o.slots {
            let s = r.slots.get(k).map(|x| x.add(v)).unwrap_or_else(|| v.clone());
            if s.is_zero() {
                r.slots.remove(k);
            } else {
                r.slots.insert(k.clone(), s);
            }
        }
        r
    }

    pub fn neg(&self) -> Entry {
        Entry { base: self.base.neg(), slots: self.slots.iter().map(|(k, v)| (k.clone(), v.neg())).collect() }
    }

    pub fn sub(&self, o: &Entry) -> Entry {
        self.add(&o.neg())
    }

    pub fn mul_poly(&self, p: &PluckerPoly) -> Entry {
        let mut r = Entry::poly(self.base.mul(p));
        for (k, v) in &self.slots {
            let s = v.mul(p);
            if !s.is_zero() {
                r.slots.insert(k.clone(), s);
            }
        }
        r
    }

    pub fn mul(&self, o: &Entry) -> Result<Entry, PluckerError> {
        if self.has_slot() && o.has_slot() {
            return Err(PluckerError::SlotProduct);
        }
        let mut r = self.mul_poly(&o.base);
        for (k, v) in &o.slots {
            r = r.add(&Entry::slot(k, v.mul(&self.base)));
        }
        Ok(r)
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.base.is_zero() || self.slots.is_empty() {
            parts.push(self.base.to_string());
        }
        for (k, v) in &self.slots {
            if *v == PluckerPoly::one() {
                parts.push(k.clone());
            } else {
                parts.push(format!("({v})*{k}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Square transition matrix of size 1 or 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cocycle2 {
    pub rows: Vec<Vec<Entry>>,
}

impl Cocycle2 {
    pub fn new(rows: Vec<Vec<Entry>>) -> Result<Cocycle2, PluckerError> {
        let n = rows.len();
        if !(1..=2).contains(&n) || rows.iter().any(|r| r.len() != n) {
            return Err(PluckerError::Size);
        }
        Ok(Cocycle2 { rows })
    }

    /// From Laurent polynomials only.
    pub fn from_polys(rows: Vec<Vec<PluckerPoly>>) -> Result<Cocycle2, PluckerError> {
        Cocycle2::new(rows.into_iter().map(|r| r.into_iter().map(Entry::poly).collect()).collect())
    }

    /// Parses rows separated by `;` and entries by `,`, optionally in brackets, e.g. `e14/e13, e34/e13; e12/e13, -e23/e13`.
    pub fn parse(s: &str) -> Result<Cocycle2, PluckerError> {
        let t = s.trim();
        let s = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(t);
        let rows = s
            .split(';')
            .map(|r| r.split(',').map(PluckerPoly::parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Cocycle2::from_polys(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn identity(n: usize) -> Cocycle2 {
        Cocycle2 {
            rows: (0..n)
                .map(|i| (0..n).map(|j| Entry::poly(if i == j { PluckerPoly::one() } else { PluckerPoly::zero() })).collect())
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Entry {
        &self.rows[i][j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Cocycle2::identity(self.size())
    }

    pub fn has_slot(&self) -> bool {
        self.rows.iter().flatten().any(|e| e.has_slot())
    }

    pub fn mul(&self, o: &Cocycle2) -> Result<Cocycle2, PluckerError> {
        let n = self.size();
        if o.size() != n {
            return Err(PluckerError::Size);
        }
        let mut rows = vec![vec![Entry::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    rows[i][j] = rows[i][j].add(&self.rows[i][k].mul(&o.rows[k][j])?);
                }
            }
        }
        Ok(Cocycle2 { rows })
    }

    pub fn transpose(&self) -> Cocycle2 {
        let n = self.size();
        Cocycle2 { rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect() }
    }

    /// Reverses the order of the basis on both sides.
    pub fn reversed(&self) -> Cocycle2 {
        let n = self.size();
        Cocycle2 { rows: (0..n).map(|i| (0..n).map(|j| self.rows[n - 1 - i][n - 1 - j].clone()).collect()).collect() }
    }

    pub fn det(&self) -> Result<Entry, PluckerError> {
        match self.size() {
            1 => Ok(self.rows[0][0].clone()),
            _ => Ok(self.rows[0][0].mul(&self.rows[1][1])?.sub(&self.rows[0][1].mul(&self.rows[1][0])?)),
        }
    }

    /// Inverse, defined when the determinant is `±e13^a e24^b`.
    pub fn inverse(&self) -> Result<Cocycle2, PluckerError> {
        let det = self.det()?;
        if det.has_slot() {
            return Err(PluckerError::NotInvertible(det.to_string()));
        }
        let inv = det.base.inverse()?;
        let r = &self.rows;
        let rows = match self.size() {
            1 => vec![vec![Entry::poly(inv)]],
            _ => vec![
                vec![r[1][1].mul_poly(&inv), r[0][1].neg().mul_poly(&inv)],
                vec![r[1][0].neg().mul_poly(&inv), r[0][0].mul_poly(&inv)],
            ],
        };
        Ok(Cocycle2 { rows })
    }

    /// Substitutes the named slot by a Laurent polynomial.
    pub fn fill_slot(&self, name: &str, value: &PluckerPoly) -> Cocycle2 {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| {
                        let mut e = e.clone();
                        if let Some(c) = e.slots.remove(name) {
                            e.base = e.base.add(&c.mul(value));
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        Cocycle2 { rows }
    }
}

impl fmt::Display for Cocycle2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.rows.iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// The reference bundles.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Reference {
    O,
    L(i32),
    T,
    Tperp,
    H,
    HL,
}

impl Reference {
    /// The six bundles a word class can be.
    pub const CATALOG: [Reference; 6] =
        [Reference::O, Reference::L(-1), Reference::H, Reference::HL, Reference::T, Reference::Tperp];

    pub fn rank(&self) -> usize {
        match self {
            Reference::O | Reference::L(_) => 1,
            _ => 2,
        }
    }

    pub fn parse(s: &str) -> Option<Reference> {
        match s {
            "O" => Some(Reference::O),
            "T" => Some(Reference::T),
            "Tperp" | "T^perp" => Some(Reference::Tperp),
            "H" => Some(Reference::H),
            "HL" | "H*L" | "HxL" => Some(Reference::HL),
            _ => s.strip_prefix("L^").or_else(|| s.strip_prefix("L")).and_then(|m| {
                let m = if m.is_empty() { "1" } else { m };
                m.parse().ok().map(Reference::L)
            }),
        }
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::O => write!(f, "O"),
            Reference::L(1) => write!(f, "L"),
            Reference::L(m) => write!(f, "L^{m}"),
            Reference::T => write!(f, "T"),
            Reference::Tperp => write!(f, "Tperp"),
            Reference::H => write!(f, "H"),
            Reference::HL => write!(f, "H*L"),
        }
    }
}

/// Name of the free weight-2 function in the H and H*L references.
pub const REFERENCE_SLOT: &str = "f";

/// The transition matrix of a reference bundle from the patch of D24 to the
/// patch of D13.  The H-type matrices carry the free slot `f`.
pub fn reference_cocycle(r: Reference) -> Cocycle2 {
    let p = |s: &str| PluckerPoly::parse(s).expect("reference entry");
    let m = |rows: Vec<Vec<&str>>| Cocycle2::from_polys(rows.into_iter().map(|r| r.into_iter().map(p).collect()).collect()).unwrap();
    match r {
        Reference::O => Cocycle2::identity(1),
        Reference::L(k) => Cocycle2::from_polys(vec![vec![PluckerPoly::unit(k, -k)]]).unwrap(),
        Reference::T => m(vec![vec!["e14/e13", "e34/e13"], vec!["e12/e13", "-e23/e13"]]),
        Reference::Tperp => m(vec![vec!["e14/e13", "e12/e13"], vec!["e34/e13", "-e23/e13"]]),
        Reference::H => Cocycle2 {
            rows: vec![
                vec![Entry::poly(p("e24^2/e13^2")), Entry::slot(REFERENCE_SLOT, PluckerPoly::one())],
                vec![Entry::zero(), Entry::poly(PluckerPoly::one())],
            ],
        },
        Reference::HL => Cocycle2 {
            rows: vec![
                vec![Entry::poly(p("e24/e13")), Entry::slot(REFERENCE_SLOT, PluckerPoly::one())],
                vec![Entry::zero(), Entry::poly(p("e13/e24"))],
            ],
        },
    }
}

/// The opposite transition matrices as printed next to `reference_cocycle`
/// for the line bundles and T, Tperp.
pub fn printed_inverse(r: Reference) -> Option<Cocycle2> {
    let p = |s: &str| PluckerPoly::parse(s).expect("reference entry");
    let m = |rows: Vec<Vec<&str>>| Cocycle2::from_polys(rows.into_iter().map(|r| r.into_iter().map(p).collect()).collect()).unwrap();
    match r {
        Reference::O => Some(Cocycle2::identity(1)),
        Reference::L(k) => Some(Cocycle2::from_polys(vec![vec![PluckerPoly::unit(-k, k)]]).unwrap()),
        Reference::T => Some(m(vec![vec!["e23/e24", "e12/e24"], vec!["e34/e24", "-e14/e24"]])),
        Reference::Tperp => Some(m(vec![vec!["e23/e24", "e34/e24"], vec!["e12/e24", "-e14/e24"]])),
        Reference::H | Reference::HL => None,
    }
}

/// Constant matrix over Q, row major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix(pub Vec<Vec<Q>>);

impl QMatrix {
    pub fn det(&self) -> Q {
        let m = &self.0;
        match m.len() {
            1 => m[0][0],
            _ => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect()
    }
}

// Polynomials, entries and matrices serialize as their text forms; those
// without free slots parse back.
impl Serialize for PluckerPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Entry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Cocycle2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Outcome of [`cocycles_equivalent`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum Equivalence {
    /// `a B = A b` with `A`, `B` constant and invertible.
    Equivalent { a: QMatrix, b: QMatrix },
    NotEquivalent { reason: String },
    Inconclusive { reason: String },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

fn slot_positions(c: &Cocycle2) -> Vec<(usize, usize)> {
    let n = c.size();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| c.rows[i][j].has_slot()).collect()
}

fn strip_slots(c: &Cocycle2) -> Vec<Vec<PluckerPoly>> {
    c.rows.iter().map(|r| r.iter().map(|e| e.base.clone()).collect()).collect()
}

/// Nullspace of an integer matrix with `cols` columns, over Q.
pub(crate) fn nullspace(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for k in 0..cols {
                    let v = m[r][k] * f;
                    m[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][f];
            }
            v
        })
        .collect()
}

/// Decides whether constant invertible `A`, `B` exist with `a = A b B^-1`,
/// each weight-2 slot standing for an arbitrary nonzero function of weight 2.
pub fn cocycles_equivalent(a: &Cocycle2, b: &Cocycle2) -> Result<Equivalence, PluckerError> {
    let n = a.size();
    if b.size() != n {
        return Err(PluckerError::Size);
    }
    let sa = slot_positions(a);
    let sb = slot_positions(b);
    if sa.len() > 1 || sb.len() > 1 {
        return Ok(Equivalence::Inconclusive { reason: "more than one slot entry".into() });
    }
    if sa.len() != sb.len() {
        return Ok(Equivalence::NotEquivalent { reason: "only one side has a weight-2 entry".into() });
    }
    for e in a.rows.iter().chain(b.rows.iter()).flatten() {
        if e.slots.len() > 1 {
            return Ok(Equivalence::Inconclusive { reason: "entry with two slots".into() });
        }
    }
    // Unknowns: A entries, then B entries, row major.
    let nv = 2 * n * n;
    let ia = |p: usize, q: usize| p * n + q;
    let ib = |q: usize, j: usize| n * n + q * n + j;
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    if let (Some(&(pa, qa)), Some(&(qb, jb))) = (sa.first(), sb.first()) {
        for j in (0..n).filter(|&j| j != jb) {
            let mut row = vec![Q::zero(); nv];
            row[ib(qa, j)] = Q::one();
            eqs.push(row);
        }
        for p in (0..n).filter(|&p| p != pa) {
            let mut row = vec![Q::zero(); nv];
            row[ia(p, qb)] = Q::one();
            eqs.push(row);
        }
    }
    let a0 = strip_slots(a);
    let b0 = strip_slots(b);
    for p in 0..n {
        for j in 0..n {
            // sum_q a0[p][q] B[q][j] - sum_q A[p][q] b0[q][j]
            let mut by_mono: BTreeMap<Exp, Vec<Q>> = BTreeMap::new();
            for q in 0..n {
                for (e, c) in a0[p][q].terms() {
                    by_mono.entry(*e).or_insert_with(|| vec![Q::zero(); nv])[ib(q, j)] += Q::from(*c as i128);
                }
                for (e, c) in b0[q][j].terms() {
                    by_mono.entry(*e).or_insert_with(|| vec![Q::zero(); nv])[ia(p, q)] -= Q::from(*c as i128);
                }
            }
            eqs.extend(by_mono.into_values());
        }
    }
    let basis = nullspace(&eqs, nv);
    if basis.is_empty() {
        return Ok(Equivalence::NotEquivalent { reason: "the linear system has only the zero solution".into() });
    }
    // det A * det B has degree 4 in the coefficients, so it is nonzero on
    // the grid {-2..2}^d as soon as it is a nonzero polynomial.
    let d = basis.len();
    let mut coeffs = vec![-2i128; d];
    loop {
        let mut v = vec![Q::zero(); nv];
        for (c, bv) in coeffs.iter().zip(&basis) {
            for k in 0..nv {
                v[k] += bv[k] * Q::from(*c);
            }
        }
        let am = QMatrix((0..n).map(|p| (0..n).map(|q| v[ia(p, q)]).collect()).collect());
        let bm = QMatrix((0..n).map(|q| (0..n).map(|j| v[ib(q, j)]).collect()).collect());
        if !am.det().is_zero() && !bm.det().is_zero() {
            return Ok(Equivalence::Equivalent { a: normalize(am), b: normalize(bm) });
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(Equivalence::NotEquivalent {
                    reason: format!("every solution in the {d}-dimensional solution space is singular"),
                });
            }
            coeffs[i] += 1;
            if coeffs[i] <= 2 {
                break;
            }
            coeffs[i] = -2;
            i += 1;
        }
    }
}

/// Scales so that the first nonzero entry is positive.
fn normalize(m: QMatrix) -> QMatrix {
    let first = m.0.iter().flatten().find(|q| !q.is_zero()).copied().unwrap_or_else(Q::one);
    if first.is_negative() {
        QMatrix(m.0.into_iter().map(|r| r.into_iter().map(|q| -q).collect()).collect())
    } else {
        m
    }
}

/// The reference bundles equivalent to `c`, in catalog order, with witnesses.
pub fn identify(c: &Cocycle2) -> Result<Vec<(Reference, Equivalence)>, PluckerError> {
    let mut out = Vec::new();
    for r in Reference::CATALOG {
        let reference = reference_cocycle(r);
        if reference.size() != c.size() {
            continue;
        }
        let eq = cocycles_equivalent(c, &reference)?;
        if !matches!(eq, Equivalence::NotEquivalent { .. }) {
            out.push((r, eq));
        }
    }
    Ok(out)
}

/// D12 D34 - D13 D24 + D14 D23 in the coordinate ring.
pub fn plucker_relation() -> PluckerPoly {
    PluckerPoly::parse("e12*e34 - e13*e24 + e14*e23").expect("relation parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms_parse_back() {
        for r in Reference::CATALOG.into_iter().chain([Reference::L(2)]) {
            let c = reference_cocycle(r);
            if !c.has_slot() {
                assert_eq!(Cocycle2::parse(&c.to_string()).unwrap(), c, "{r}");
            }
            let json = serde_json::to_value(&c).unwrap();
            assert_eq!(json, serde_json::Value::String(c.to_string()));
        }
        let p = PluckerPoly::parse("e13^2/e24 - 3*e12*e34").unwrap();
        assert_eq!(PluckerPoly::parse(&p.to_string()).unwrap(), p);
    }

    fn p(s: &str) -> PluckerPoly {
        PluckerPoly::parse(s).unwrap()
    }

    #[test]
    fn relation_rewrites() {
        assert_eq!(p("e14*e23"), p("e13*e24 - e12*e34"));
        assert!(plucker_relation().is_zero());
        assert_eq!(p("e12*e13").len(), 1);
        assert_eq!(p("e14^2*e23^2"), p("e13*e24 - e12*e34").pow(2));
    }

    #[test]
    fn display_round_trips() {
        for s in ["e12*e13", "e24^2/e13^2", "-e23/e13 + 3*e12", "1"] {
            let x = p(s);
            assert_eq!(p(&x.to_string()), x, "{s} -> {x}");
        }
    }

    #[test]
    fn printed_pairs_are_inverse_transposes() {
        for r in [Reference::O, Reference::L(-1), Reference::L(2), Reference::T, Reference::Tperp] {
            let g = reference_cocycle(r);
            let h = printed_inverse(r).unwrap();
            assert!(g.mul(&h.transpose()).unwrap().is_identity(), "{r}");
            assert_eq!(g.inverse().unwrap(), h.transpose(), "{r}");
        }
        let t = reference_cocycle(Reference::T);
        assert!(!t.mul(&printed_inverse(Reference::T).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn tangent_determinants() {
        let want = Entry::poly(p("-e24/e13"));
        assert_eq!(reference_cocycle(Reference::T).det().unwrap(), want);
        assert_eq!(reference_cocycle(Reference::Tperp).det().unwrap(), want);
        assert_eq!(reference_cocycle(Reference::H).det().unwrap(), Entry::poly(p("e24^2/e13^2")));
        assert_eq!(reference_cocycle(Reference::HL).det().unwrap(), Entry::poly(PluckerPoly::one()));
    }

    #[test]
    fn equivalence_basics() {
        let t = reference_cocycle(Reference::T);
        match cocycles_equivalent(&t, &t).unwrap() {
            Equivalence::Equivalent { a, b } => {
                assert!(!a.det().is_zero() && !b.det().is_zero());
            }
            other => panic!("{other:?}"),
        }
        let tp = reference_cocycle(Reference::Tperp);
        assert!(!cocycles_equivalent(&t, &tp).unwrap().is_equivalent());
        let s = Cocycle2::parse("1, 0; 0, -1").unwrap();
        let conj = s.mul(&t).unwrap().mul(&s).unwrap();
        assert!(cocycles_equivalent(&conj, &t).unwrap().is_equivalent());
    }

    #[test]
    fn line_bundles_are_told_apart() {
        let l = |k| reference_cocycle(Reference::L(k));
        assert!(cocycles_equivalent(&l(-1), &l(-1)).unwrap().is_equivalent());
        assert!(!cocycles_equivalent(&l(-1), &l(0)).unwrap().is_equivalent());
        assert!(!cocycles_equivalent(&l(1), &l(-1)).unwrap().is_equivalent());
    }

    #[test]
    fn slots_match_any_weight_two_entry() {
        let h = reference_cocycle(Reference::H);
        let other = Cocycle2 {
            rows: vec![
                vec![Entry::poly(p("e24^2/e13^2")), Entry::slot("b", p("e24/e13"))],
                vec![Entry::zero(), Entry::poly(PluckerPoly::one())],
            ],
        };
        assert!(cocycles_equivalent(&other, &h).unwrap().is_equivalent());
        let hl = reference_cocycle(Reference::HL);
        assert!(!cocycles_equivalent(&other, &hl).unwrap().is_equivalent());
        let split = Cocycle2::parse("e24^2/e13^2, 0; 0, 1").unwrap();
        assert!(!cocycles_equivalent(&split, &h).unwrap().is_equivalent());
    }
}
