//! Faithful representation of diagrams as difference operators.
//!
//! A diagram on `N` thin strands acts on polynomials in the dot variables
//! `y_1..y_N` as a sum `sum_g c_g [g]`, where `g` is an extended affine
//! permutation recording where each bottom strand ends on the universal cover
//! of the cylinder and `c_g` is a rational function in the top variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{Color, DiagramError, Endpoint, Event, RawDiagram, Word};
use crate::poly::{y, Mono, Poly, BL, BR, HBAR, MAX_POSITIONS};
use crate::ratfun::Rat;

/// Plain algebra, or the one-parameter deformation in which a dot on a strand
/// changes by `h` when the strand passes the seam.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Mode {
    Plain,
    Deformed,
}

impl Mode {
    pub fn deformed(self) -> bool {
        self == Mode::Deformed
    }
}

/// Sign and placement choices for the local crossing operators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize, PartialOrd, Ord)]
pub struct Convention {
    /// Sign of the same-label crossing relative to the divided difference.
    pub nilhecke: i8,
    /// Sign of the bigon polynomial for adjacent labels.
    pub bigon: i8,
    /// Put the adjacent-label factor on the crossing whose left strand has the larger label.
    pub adjacent_on_descending: bool,
    /// Put the red-black factor on the crossing where the black strand moves right.
    pub red_on_black_right: bool,
}

impl Convention {
    /// The choice under which the adjacent bigon, the black triple moves, the
    /// red-black bigons and every transition identity hold as drawn.  The
    /// nilHecke and red triple relations then hold up to an overall sign.
    pub const STANDARD: Convention =
        Convention { nilhecke: -1, bigon: 1, adjacent_on_descending: true, red_on_black_right: true };

    /// Same-label crossing equal to the divided difference.  The nilHecke and
    /// red triple relations hold as drawn; the adjacent bigon flips sign.
    pub const DIVIDED_DIFFERENCE: Convention =
        Convention { nilhecke: 1, bigon: -1, adjacent_on_descending: true, red_on_black_right: true };

    /// All sixteen combinations, for experiments.
    pub fn all() -> Vec<Convention> {
        let mut out = Vec::new();
        for nilhecke in [1, -1] {
            for bigon in [1, -1] {
                for adjacent_on_descending in [true, false] {
                    for red_on_black_right in [true, false] {
                        out.push(Convention { nilhecke, bigon, adjacent_on_descending, red_on_black_right });
                    }
                }
            }
        }
        out
    }
}

impl Default for Convention {
    fn default() -> Self {
        Convention::STANDARD
    }
}

/// Extended affine permutation stored as the images `f(1..N)` on the universal cover.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Perm(pub Vec<i32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as i32).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: i32) -> i32 {
        let n = self.0.len() as i32;
        self.0[(x - 1).rem_euclid(n) as usize] + (x - 1).div_euclid(n) * n
    }

    /// Top position and seam winding of the strand starting at bottom position `b`.
    pub fn top(&self, b: usize) -> (usize, i32) {
        let n = self.0.len() as i32;
        let v = self.0[b - 1];
        ((v - 1).rem_euclid(n) as usize + 1, (v - 1).div_euclid(n))
    }

    /// `self` stacked on top of `lower`.
    pub fn compose(&self, lower: &Perm) -> Perm {
        Perm(lower.0.iter().map(|&v| self.apply(v)).collect())
    }

    pub fn inverse(&self) -> Perm {
        let n = self.0.len();
        let mut out = vec![0; n];
        for b in 1..=n {
            let (q, w) = self.top(b);
            out[q - 1] = b as i32 - w * n as i32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v == i as i32 + 1)
    }

    /// Simple reflection exchanging positions `p` and `p+1`; `p = N` is the
    /// exchange across the seam.
    pub fn simple(n: usize, p: usize) -> Perm {
        let mut f: Vec<i32> = (1..=n as i32).collect();
        if p < n {
            f.swap(p - 1, p);
        } else {
            f[n - 1] = n as i32 + 1;
            f[0] = 0;
        }
        Perm(f)
    }

    /// Every strand moves one step in the positive direction.
    pub fn rotation(n: usize, m: i32) -> Perm {
        Perm((1..=n as i32).map(|b| b + m).collect())
    }

    /// Number of crossings of a reduced diagram.
    pub fn length(&self) -> usize {
        let n = self.0.len() as i32;
        let mut total = 0i64;
        for i in 1..=n {
            let fi = self.0[i as usize - 1];
            for j0 in 1..=n {
                let fj = self.0[j0 as usize - 1];
                let kmin = if j0 > i { 0 } else { 1 };
                let kmax = (fi - fj - 1).div_euclid(n);
                if kmax >= kmin {
                    total += (kmax - kmin + 1) as i64;
                }
            }
        }
        total as usize
    }

    /// Canonical reduced word: the simple reflections read from the bottom,
    /// followed by the final rotation.
    pub fn reduced_word(&self) -> (Vec<usize>, i32) {
        let n = self.0.len();
        let mut f = self.clone();
        let mut word = Vec::new();
        loop {
            let descent = (1..=n).find(|&i| f.apply(i as i32) > f.apply(i as i32 + 1));
            match descent {
                Some(i) => {
                    word.push(i);
                    f = f.compose(&Perm::simple(n, i));
                }
                None => break,
            }
        }
        let m = f.0[0] - 1;
        debug_assert_eq!(f, Perm::rotation(n, m));
        (word, m)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Linear combination of group elements with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Operator {
    pub n: usize,
    /// Bottom position of the strand whose winding shifts `bL`.
    pub left_red: Option<usize>,
    pub deformed: bool,
    terms: BTreeMap<Perm, Rat>,
}

impl Operator {
    pub fn zero(n: usize, left_red: Option<usize>, deformed: bool) -> Self {
        Operator { n, left_red, deformed, terms: BTreeMap::new() }
    }

    pub fn scalar(n: usize, left_red: Option<usize>, deformed: bool, c: Rat) -> Self {
        let mut op = Operator::zero(n, left_red, deformed);
        op.add_term(Perm::identity(n), c);
        op
    }

    pub fn terms(&self) -> &BTreeMap<Perm, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: &Perm) -> Rat {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, g: Perm, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&g);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Operator {
        let mut out = Operator::zero(self.n, self.left_red, self.deformed);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.scale(k));
        }
        out
    }

    /// Multiplies every coefficient by a polynomial in the parameters.
    pub fn scale_poly(&self, p: &Poly) -> Operator {
        let mut out = Operator::zero(self.n, self.left_red, self.deformed);
        for (g, c) in &self.terms {
            out.add_term(g.clone(), c.mul_poly(p));
        }
        out
    }

    /// Transport data for moving coefficients of a lower factor through `g`.
    pub fn transport_map(g: &Perm, deformed: bool) -> Vec<(usize, usize, i64)> {
        (1..=g.n())
            .map(|b| {
                let (q, w) = g.top(b);
                (b, q, if deformed { w as i64 } else { 0 })
            })
            .collect()
    }

    /// `self` stacked on top of `lower`.
    pub fn compose(&self, lower: &Operator) -> Operator {
        self.compose_with(lower, true)
    }

    pub(crate) fn compose_with(&self, lower: &Operator, shift_bl: bool) -> Operator {
        assert_eq!(self.n, lower.n, "operators on different strand counts");
        let mut out = Operator::zero(self.n, lower.left_red, self.deformed);
        for (g1, c1) in &self.terms {
            let map = Operator::transport_map(g1, self.deformed);
            for (g2, c2) in &lower.terms {
                let shift = match (shift_bl && self.deformed, lower.left_red) {
                    (true, Some(p)) => g2.top(p).1 as i64,
                    _ => 0,
                };
                let upper = if shift != 0 { c1.transport(&[], shift) } else { c1.clone() };
                let c = upper.mul(&c2.transport(&map, 0));
                out.add_term(g1.compose(g2), c);
            }
        }
        out
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(g, c)| format!("({c}){g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Leading coefficient kept as a product of linear factors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lead {
    pub sign: i64,
    pub factors: Vec<(Poly, i32)>,
}

impl Lead {
    pub fn one() -> Self {
        Lead { sign: 1, factors: Vec::new() }
    }

    fn transport(&self, map: &[(usize, usize, i64)]) -> Lead {
        let factors = self
            .factors
            .iter()
            .map(|(p, e)| (transport_poly(p, map), *e))
            .collect();
        Lead { sign: self.sign, factors }
    }

    /// Divides `c` by this coefficient.  Returns `None` when a division that
    /// must be exact is not.
    pub fn divide(&self, c: &Rat) -> Option<Rat> {
        let mut q = c.scale(self.sign);
        for (p, e) in &self.factors {
            if *e < 0 {
                for _ in 0..(-e) {
                    q = q.mul_poly(p);
                }
            } else {
                for _ in 0..*e {
                    q = q.div_linear(p)?;
                }
            }
        }
        Some(q)
    }
}

fn transport_poly(p: &Poly, map: &[(usize, usize, i64)]) -> Poly {
    let mut image: [Option<Poly>; crate::poly::NVARS] = Default::default();
    for &(a, q, s) in map {
        let mut img = Poly::var(y(q));
        if s != 0 {
            img.add_term(Mono::var(HBAR), s);
        }
        image[y(a)] = Some(img);
    }
    p.substitute(&image)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Right,
    Other,
}

#[derive(Clone, Copy, Debug)]
struct Strand {
    color: Color,
    label: u8,
    side: Side,
    winding: i32,
}

/// Builds the operator of a diagram one elementary piece at a time.
#[derive(Clone, Debug)]
pub struct Builder {
    mode: Mode,
    conv: Convention,
    strands: Vec<Strand>,
    entries: Vec<Endpoint>,
    op: Operator,
    lead: Option<Lead>,
}

impl Builder {
    /// Starts from the identity on `bottom`; thick entries enter through the
    /// idempotent `d y` on their two thin strands.
    pub fn new(bottom: &Word, mode: Mode, conv: Convention) -> Result<Builder, DiagramError> {
        let thin = bottom.thin();
        let n = thin.len();
        if n > MAX_POSITIONS {
            return Err(DiagramError::BadWord(format!("at most {MAX_POSITIONS} thin strands are supported")));
        }
        let mut reds = 0;
        let strands: Vec<Strand> = thin
            .0
            .iter()
            .map(|e| {
                let side = if e.is_red() {
                    reds += 1;
                    match reds {
                        1 => Side::Left,
                        2 => Side::Right,
                        _ => Side::Other,
                    }
                } else {
                    Side::Other
                };
                Strand { color: e.color, label: e.label, side, winding: 0 }
            })
            .collect();
        let left_red = thin.0.iter().position(|e| e.is_red()).map(|i| i + 1);
        let mut b = Builder {
            mode,
            conv,
            strands,
            entries: bottom.0.clone(),
            op: Operator::scalar(n, left_red, mode.deformed(), Rat::one()),
            lead: None,
        };
        for (i, e) in bottom.0.iter().enumerate() {
            if e.thickness == 2 {
                let p = bottom.thin_start(i + 1);
                b.thin_dot(p, false);
                b.demazure(p);
            } else if e.thickness > 2 {
                return Err(DiagramError::BadWord("thickness above two is not supported".into()));
            }
        }
        Ok(b)
    }

    /// Starts a bare thin builder that also tracks the leading coefficient.
    pub fn with_lead(bottom_thin: &Word, mode: Mode, conv: Convention) -> Builder {
        let mut b = Builder::new(bottom_thin, mode, conv).expect("thin word");
        b.lead = Some(Lead::one());
        b
    }

    pub fn n(&self) -> usize {
        self.strands.len()
    }

    pub fn finish(self) -> Operator {
        self.op
    }

    pub fn finish_with_lead(self) -> (Operator, Lead) {
        (self.op, self.lead.unwrap_or_else(Lead::one))
    }

    pub fn entries(&self) -> &[Endpoint] {
        &self.entries
    }

    fn push(&mut self, g: Perm, coeffs: Vec<(Perm, Rat)>, lead: Lead) {
        let n = self.n();
        let mut elem = Operator::zero(n, None, self.mode.deformed());
        for (h, c) in coeffs {
            elem.add_term(h, c);
        }
        self.op = elem.compose_with(&self.op, false);
        if let Some(l) = &self.lead {
            let map = Operator::transport_map(&g, self.mode.deformed());
            let mut moved = l.transport(&map);
            moved.sign *= lead.sign;
            moved.factors.extend(lead.factors);
            self.lead = Some(moved);
        }
    }

    fn yv(p: usize) -> Poly {
        Poly::var(y(p))
    }

    fn red_value(&self, s: &Strand) -> Poly {
        if !self.mode.deformed() {
            return Poly::zero();
        }
        let base = match s.side {
            Side::Left => Poly::var(BL),
            Side::Right => Poly::var(BR),
            Side::Other => return Poly::zero(),
        };
        let mut v = base.mul(&Poly::var(HBAR));
        v.add_term(Mono::var(HBAR), s.winding as i64);
        v.neg()
    }

    /// Dot on thin position `p`.
    pub fn thin_dot(&mut self, p: usize, track: bool) {
        let n = self.n();
        let lead = if track { Lead { sign: 1, factors: vec![(Builder::yv(p), 1)] } } else { Lead::one() };
        self.push(Perm::identity(n), vec![(Perm::identity(n), Rat::from_poly(Builder::yv(p)))], lead);
    }

    /// The divided difference at thin positions `p, p+1`.
    fn demazure(&mut self, p: usize) {
        let n = self.n();
        let c = Rat::inverse_form(p, p + 1, 0);
        let s = Perm::simple(n, p);
        self.push(s.clone(), vec![(Perm::identity(n), c.clone()), (s, c.neg())], Lead::one());
    }

    /// Exchange of thin positions `p` and `p+1` with `p < N`.
    pub fn thin_cross(&mut self, p: usize) {
        let n = self.n();
        assert!(p >= 1 && p < n, "thin crossing out of range");
        let a = self.strands[p - 1];
        let b = self.strands[p];
        let s = Perm::simple(n, p);
        let conv = self.conv;
        match (a.color, b.color) {
            (Color::Black, Color::Black) if a.label == b.label => {
                let nu = conv.nilhecke as i64;
                let c = Rat::inverse_form(p, p + 1, 0).scale(nu);
                let lead = Lead {
                    sign: -nu,
                    factors: vec![(Builder::yv(p).sub(&Builder::yv(p + 1)), -1)],
                };
                self.push(s.clone(), vec![(Perm::identity(n), c.clone()), (s, c.neg())], lead);
            }
            (Color::Black, Color::Black) if a.label.abs_diff(b.label) == 1 => {
                // After the crossing strand a sits at p+1 and strand b at p.
                let beta = conv.bigon as i64;
                let factor = if conv.adjacent_on_descending {
                    (a.label > b.label).then(|| Builder::yv(p + 1).sub(&Builder::yv(p)))
                } else {
                    (a.label < b.label).then(|| Builder::yv(p).sub(&Builder::yv(p + 1)))
                };
                let sign = if factor.is_some() { beta } else { 1 };
                self.push_factor(s, factor, sign);
            }
            (Color::Black, Color::Red) => {
                let factor = (conv.red_on_black_right && a.label == b.label)
                    .then(|| Builder::yv(p + 1).sub(&self.red_value(&b)));
                self.push_factor(s, factor, 1);
            }
            (Color::Red, Color::Black) => {
                let factor = (!conv.red_on_black_right && a.label == b.label)
                    .then(|| Builder::yv(p).sub(&self.red_value(&a)));
                self.push_factor(s, factor, 1);
            }
            _ => self.push_factor(s, None, 1),
        }
        self.strands.swap(p - 1, p);
    }

    fn push_factor(&mut self, s: Perm, factor: Option<Poly>, sign: i64) {
        match factor {
            Some(f) => {
                let lead = Lead { sign, factors: vec![(f.clone(), 1)] };
                self.push(s.clone(), vec![(s, Rat::from_poly(f.scale(sign)))], lead);
            }
            None => {
                let lead = Lead { sign, factors: Vec::new() };
                self.push(s.clone(), vec![(s, Rat::from_poly(Poly::constant(sign)))], lead);
            }
        }
    }

    /// The last thin strand passes the seam in the positive direction.
    pub fn thin_wrap_right(&mut self) {
        let n = self.n();
        let g = Perm::rotation(n, 1);
        self.push(g.clone(), vec![(g, Rat::one())], Lead::one());
        let mut last = self.strands.pop().unwrap();
        last.winding += 1;
        self.strands.insert(0, last);
    }

    pub fn thin_wrap_left(&mut self) {
        let n = self.n();
        let g = Perm::rotation(n, -1);
        self.push(g.clone(), vec![(g, Rat::one())], Lead::one());
        let mut first = self.strands.remove(0);
        first.winding -= 1;
        self.strands.push(first);
    }

    /// Thin simple reflection, including the one across the seam.
    pub fn thin_simple(&mut self, p: usize) {
        let n = self.n();
        if p < n {
            self.thin_cross(p);
        } else {
            self.thin_wrap_right();
            self.thin_cross(1);
            self.thin_wrap_left();
        }
    }

    fn start(&self, p: usize) -> usize {
        1 + self.entries[..p - 1].iter().map(|e| e.thickness as usize).sum::<usize>()
    }

    fn block_cross(&mut self, p: usize) {
        let a = self.start(p);
        let t1 = self.entries[p - 1].thickness as usize;
        let t2 = self.entries[p].thickness as usize;
        for i in 0..t2 {
            for j in (0..t1).rev() {
                self.thin_cross(a + i + j);
            }
        }
        self.entries.swap(p - 1, p);
    }

    fn wrap_entry_right(&mut self) {
        let last = self.entries.pop().unwrap();
        for _ in 0..last.thickness {
            self.thin_wrap_right();
        }
        self.entries.insert(0, last);
    }

    fn wrap_entry_left(&mut self) {
        let first = self.entries.remove(0);
        for _ in 0..first.thickness {
            self.thin_wrap_left();
        }
        self.entries.push(first);
    }

    /// Applies one event on top of what has been built so far.
    pub fn event(&mut self, ev: Event) -> Result<(), DiagramError> {
        let len = self.entries.len();
        let bad = |msg: &str| Err(DiagramError::Invalid(format!("{msg} at event {ev}")));
        match ev {
            Event::Cross(p) => {
                if p == 0 || p > len || len < 2 {
                    return bad("position out of range");
                }
                if p < len {
                    self.block_cross(p);
                } else {
                    self.wrap_entry_right();
                    self.block_cross(1);
                    self.wrap_entry_left();
                }
            }
            Event::Dot(p) => {
                if p == 0 || p > len {
                    return bad("position out of range");
                }
                let e = self.entries[p - 1];
                if e.is_red() {
                    return bad("dot on a red strand");
                }
                let a = self.start(p);
                let mut sum = Poly::zero();
                for k in 0..e.thickness as usize {
                    sum = sum.add(&Builder::yv(a + k));
                }
                let n = self.n();
                self.push(Perm::identity(n), vec![(Perm::identity(n), Rat::from_poly(sum))], Lead::one());
            }
            Event::Split(p) => {
                if p == 0 || p > len || self.entries[p - 1].thickness != 2 {
                    return bad("split of a thin strand");
                }
                let e = Endpoint { thickness: 1, ..self.entries[p - 1] };
                self.entries[p - 1] = e;
                self.entries.insert(p, e);
            }
            Event::Merge(p) => {
                if p == 0 || p >= len {
                    return bad("position out of range");
                }
                let (a, b) = (self.entries[p - 1], self.entries[p]);
                if a.is_red() || b.is_red() || a.label != b.label || a.thickness != 1 || b.thickness != 1 {
                    return bad("merge of incompatible strands");
                }
                let t = self.start(p);
                self.thin_cross(t);
                self.entries.remove(p);
                self.entries[p - 1].thickness = 2;
            }
            Event::WrapRight => {
                if len == 0 {
                    return bad("empty word");
                }
                self.wrap_entry_right();
            }
            Event::WrapLeft => {
                if len == 0 {
                    return bad("empty word");
                }
                self.wrap_entry_left();
            }
        }
        Ok(())
    }
}

/// Operator of a raw diagram.
pub fn operator_of(d: &RawDiagram, mode: Mode, conv: Convention) -> Result<Operator, DiagramError> {
    let mut b = Builder::new(&d.bottom, mode, conv)?;
    for ev in &d.events {
        b.event(*ev)?;
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_word;

    fn op(word: &str, events: &str, mode: Mode) -> Operator {
        let d = RawDiagram::parse(word, events).unwrap();
        operator_of(&d, mode, Convention::STANDARD).unwrap()
    }

    #[test]
    fn perm_reduced_word_rebuilds_perm() {
        let g = Perm(vec![3, 0, 5, 6]);
        let (word, m) = g.reduced_word();
        assert_eq!(word.len(), g.length());
        let n = g.n();
        let mut f = Perm::identity(n);
        for &i in &word {
            f = Perm::simple(n, i).compose(&f);
        }
        f = Perm::rotation(n, m).compose(&f);
        assert_eq!(f, g);
    }

    #[test]
    fn perm_inverse() {
        let g = Perm(vec![3, 0, 5, 6]);
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn same_label_crossing_squares_to_zero() {
        assert!(op("1 1", "x1; x1", Mode::Plain).is_zero());
    }

    #[test]
    fn full_turn_of_one_strand() {
        let o = op("1", "r", Mode::Deformed);
        assert_eq!(o.terms().len(), 1);
        let (g, _) = o.terms().iter().next().unwrap();
        assert_eq!(g.0, vec![2]);
    }

    #[test]
    fn thick_idempotent_is_idempotent() {
        let w = parse_word("2(2)").unwrap();
        let e = operator_of(&RawDiagram::identity(w), Mode::Plain, Convention::STANDARD).unwrap();
        assert_eq!(e.compose(&e), e);
        let digon = op("2(2)", "s1; m1", Mode::Plain);
        assert!(digon.is_zero());
    }
}
