//! Normal forms.  An element is expanded into the basis of diagrams
//! `D_g y^a`: a fixed reduced diagram for each extended affine permutation `g`
//! with monomial dots at the bottom.  Coefficients are extracted from the
//! operator representation, longest permutation first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::diagram::{events_to_string, DiagramError, Event, RawDiagram, Violation, Word};
use crate::operator::{operator_of, Builder, Convention, Lead, Mode, Operator, Perm};
use crate::poly::{position_of, y, Mono, Poly, BL, BR, HBAR, NVARS};
use crate::ratfun::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("diagram fails validation: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("coefficient of {perm} is not in the algebra: {detail}")]
    NotInAlgebra { perm: String, detail: String },
    #[error("reduction exceeded its budget of {0} steps")]
    NonTerminating(usize),
    #[error("commutator is not divisible by h: {0}")]
    NotDivisible(String),
    #[error("elements live in different modes")]
    ModeMismatch,
}

/// Canonical basis diagram on a thin bottom word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct NormalDiagram {
    pub bottom: Word,
    pub perm: Perm,
    /// Dot exponents at the bottom of each thin strand.
    pub dots: Vec<u32>,
}

impl NormalDiagram {
    pub fn top(&self) -> Word {
        let mut entries = self.bottom.0.clone();
        for b in 1..=self.perm.n() {
            let (q, _) = self.perm.top(b);
            entries[q - 1] = self.bottom.0[b - 1];
        }
        Word(entries)
    }

    /// Canonical event sequence: bottom dots, reduced crossings, final rotation.
    pub fn events(&self) -> Vec<Event> {
        let mut out = Vec::new();
        for (i, &a) in self.dots.iter().enumerate() {
            for _ in 0..a {
                out.push(Event::Dot(i + 1));
            }
        }
        let (word, m) = self.perm.reduced_word();
        out.extend(word.into_iter().map(Event::Cross));
        let wrap = if m > 0 { Event::WrapRight } else { Event::WrapLeft };
        out.extend(std::iter::repeat_n(wrap, m.unsigned_abs() as usize));
        out
    }

    pub fn raw(&self) -> RawDiagram {
        RawDiagram { bottom: self.bottom.clone(), events: self.events() }
    }

    pub fn crossings(&self) -> usize {
        self.perm.length()
    }

    fn dot_mono(&self) -> Mono {
        let mut m = Mono::one();
        for (i, &a) in self.dots.iter().enumerate() {
            m.0[y(i + 1)] = a as u8;
        }
        m
    }
}

impl fmt::Display for NormalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "word={}; events={}", self.bottom, events_to_string(&self.events()))
    }
}

/// Linear combination of normal diagrams with coefficients in `Z[h, bL, bR]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    pub mode: Mode,
    /// Source and target words, possibly with thick entries.
    pub bottom: Word,
    pub top: Word,
    terms: BTreeMap<NormalDiagram, Poly>,
}

impl Element {
    pub fn zero(mode: Mode, bottom: Word, top: Word) -> Element {
        Element { mode, bottom, top, terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<NormalDiagram, Poly> {
        &self.terms
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

    fn add_term(&mut self, d: NormalDiagram, c: Poly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(d.clone()).or_insert_with(Poly::zero);
        *entry = entry.add(&c);
        if entry.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(-1))
    }

    pub fn neg(&self) -> Element {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Element {
        self.scale_poly(&Poly::constant(k))
    }

    /// Multiplies by a polynomial in `h, bL, bR`.
    pub fn scale_poly(&self, p: &Poly) -> Element {
        let mut out = Element::zero(self.mode, self.bottom.clone(), self.top.clone());
        for (d, c) in &self.terms {
            out.add_term(d.clone(), c.mul(p));
        }
        out
    }

    /// Sets `h = bL = bR = 0` and returns the plain element.
    pub fn specialize(&self) -> Element {
        let mut out = Element::zero(Mode::Plain, self.bottom.clone(), self.top.clone());
        for (d, c) in &self.terms {
            out.add_term(d.clone(), c.kill_vars(&[HBAR, BL, BR]));
        }
        out
    }

    /// Drops every term whose coefficient is divisible by `h`.
    pub fn mod_h(&self) -> Element {
        let mut out = Element::zero(self.mode, self.bottom.clone(), self.top.clone());
        for (d, c) in &self.terms {
            out.add_term(d.clone(), c.eval_var(HBAR, 0));
        }
        out
    }

    /// Exact division of every coefficient by `h`.
    pub fn div_h(&self) -> Result<Element, EngineError> {
        let mut out = Element::zero(self.mode, self.bottom.clone(), self.top.clone());
        for (d, c) in &self.terms {
            match c.div_var(HBAR) {
                Some(q) => out.add_term(d.clone(), q),
                None => return Err(EngineError::NotDivisible(format!("coefficient {c} of {d}"))),
            }
        }
        Ok(out)
    }

    pub fn max_crossings(&self) -> usize {
        self.terms.keys().map(|d| d.crossings()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(d, c)| {
                json!({
                    "coefficient": c.to_string(),
                    "bottom": d.bottom.to_string(),
                    "top": d.top().to_string(),
                    "matching": d.perm.0,
                    "dots": d.dots,
                    "events": events_to_string(&d.events()),
                })
            })
            .collect();
        json!({
            "mode": match self.mode { Mode::Plain => "plain", Mode::Deformed => "deformed" },
            "bottom": self.bottom.to_string(),
            "top": self.top.to_string(),
            "terms": terms,
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(d, c)| format!("({c}) * [{d}]")).collect();
        write!(f, "{}", parts.join("\n  + "))
    }
}

type CacheKey = (Word, Perm);

/// Reduction engine for one mode and sign convention.
pub struct Engine {
    pub mode: Mode,
    pub conv: Convention,
    pub budget: usize,
    cache: RwLock<HashMap<CacheKey, Arc<(Operator, Lead)>>>,
    trace: Option<Mutex<Box<dyn Write + Send>>>,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine").field("mode", &self.mode).field("conv", &self.conv).finish()
    }
}

impl Engine {
    pub fn new(mode: Mode) -> Engine {
        Engine::with_convention(mode, Convention::STANDARD)
    }

    pub fn with_convention(mode: Mode, conv: Convention) -> Engine {
        Engine { mode, conv, budget: 1_000_000, cache: RwLock::new(HashMap::new()), trace: None }
    }

    /// Streams one JSON line per extraction step to `sink`.
    pub fn with_trace(mut self, sink: Box<dyn Write + Send>) -> Engine {
        self.trace = Some(Mutex::new(sink));
        self
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    fn emit(&self, v: serde_json::Value) {
        if let Some(t) = &self.trace {
            if let Ok(mut w) = t.lock() {
                let _ = writeln!(w, "{v}");
            }
        }
    }

    /// Operator and leading coefficient of the dotless basis diagram `D_g`.
    pub fn basis_operator(&self, bottom_thin: &Word, g: &Perm) -> Arc<(Operator, Lead)> {
        let key = (bottom_thin.clone(), g.clone());
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&key).cloned()) {
            return v;
        }
        let mut b = Builder::with_lead(bottom_thin, self.mode, self.conv);
        let (word, m) = g.reduced_word();
        for i in word {
            b.thin_simple(i);
        }
        for _ in 0..m.unsigned_abs() {
            if m > 0 {
                b.thin_wrap_right();
            } else {
                b.thin_wrap_left();
            }
        }
        let v = Arc::new(b.finish_with_lead());
        if let Ok(mut c) = self.cache.write() {
            c.insert(key, v.clone());
        }
        v
    }

    fn dots_operator(&self, n: usize, left_red: Option<usize>, dots: &Poly) -> Operator {
        Operator::scalar(n, left_red, self.mode.deformed(), Rat::from_poly(dots.clone()))
    }

    /// Operator of a basis diagram.
    pub fn normal_operator(&self, d: &NormalDiagram) -> Operator {
        let base = self.basis_operator(&d.bottom, &d.perm);
        let op = &base.0;
        if d.dots.iter().all(|&a| a == 0) {
            return op.clone();
        }
        let dots = Poly::monomial(d.dot_mono(), 1);
        op.compose(&self.dots_operator(op.n, op.left_red, &dots))
    }

    /// Operator of an element (of its thin image when words are thick).
    pub fn element_operator(&self, e: &Element) -> Operator {
        let thin = e.bottom.thin();
        let left_red = thin.0.iter().position(|x| x.is_red()).map(|i| i + 1);
        let mut out = Operator::zero(thin.len(), left_red, self.mode.deformed());
        for (d, c) in &e.terms {
            out = out.add(&self.normal_operator(d).scale_poly(c));
        }
        out
    }

    /// Expands an operator on `bottom_thin` in the basis.
    pub fn decompose(&self, op: &Operator, bottom_thin: &Word) -> Result<BTreeMap<NormalDiagram, Poly>, EngineError> {
        let mut rest = op.clone();
        let mut out: BTreeMap<NormalDiagram, Poly> = BTreeMap::new();
        let n = bottom_thin.len();
        let mut steps = 0;
        while !rest.is_zero() {
            steps += 1;
            if steps > self.budget {
                return Err(EngineError::NonTerminating(self.budget));
            }
            let (g, c) = rest
                .terms()
                .iter()
                .max_by(|a, b| a.0.length().cmp(&b.0.length()).then_with(|| b.0.cmp(a.0)))
                .map(|(g, c)| (g.clone(), c.clone()))
                .unwrap();
            let base = self.basis_operator(bottom_thin, &g);
            let (bop, lead) = (&base.0, &base.1);
            let q = lead.divide(&c).ok_or_else(|| EngineError::NotInAlgebra {
                perm: g.to_string(),
                detail: format!("leading coefficient does not divide {c}"),
            })?;
            let q = q.as_poly().cloned().ok_or_else(|| EngineError::NotInAlgebra {
                perm: g.to_string(),
                detail: format!("quotient {q} is not a polynomial"),
            })?;
            let p = self.pull_back(&q, &g);
            for (mono, coeff) in p.split_dots() {
                let mut dots = vec![0u32; n];
                for (v, &e) in mono.0.iter().enumerate() {
                    if e > 0 {
                        let pos = position_of(v).expect("dot variable");
                        if bottom_thin.0[pos - 1].is_red() {
                            return Err(EngineError::NotInAlgebra {
                                perm: g.to_string(),
                                detail: "dot on a red strand".into(),
                            });
                        }
                        dots[pos - 1] = e as u32;
                    }
                }
                let d = NormalDiagram { bottom: bottom_thin.clone(), perm: g.clone(), dots };
                let entry = out.entry(d.clone()).or_insert_with(Poly::zero);
                *entry = entry.add(&coeff);
                if entry.is_zero() {
                    out.remove(&d);
                }
            }
            let sub = bop.compose(&self.dots_operator(bop.n, bop.left_red, &p));
            rest = rest.sub(&sub);
            self.emit(json!({
                "step": steps,
                "perm": g.0,
                "length": g.length(),
                "extracted": p.to_string(),
                "remaining_terms": rest.terms().len(),
            }));
        }
        Ok(out)
    }

    /// Rewrites a top-variable polynomial in the bottom variables of `g`.
    fn pull_back(&self, q: &Poly, g: &Perm) -> Poly {
        let mut image: [Option<Poly>; NVARS] = Default::default();
        for b in 1..=g.n() {
            let (t, w) = g.top(b);
            let mut img = Poly::var(y(b));
            if self.mode.deformed() && w != 0 {
                img.add_term(Mono::var(HBAR), -(w as i64));
            }
            image[y(t)] = Some(img);
        }
        q.substitute(&image)
    }

    fn element_from_operator(&self, op: &Operator, bottom: Word, top: Word) -> Result<Element, EngineError> {
        let terms = self.decompose(op, &bottom.thin())?;
        Ok(Element { mode: self.mode, bottom, top, terms })
    }

    /// Normal form of a raw diagram.
    pub fn reduce(&self, d: &RawDiagram) -> Result<Element, EngineError> {
        let violations = d.validate();
        if !violations.is_empty() {
            return Err(EngineError::Invalid(violations));
        }
        let top = d.top()?;
        let op = operator_of(d, self.mode, self.conv)?;
        self.element_from_operator(&op, d.bottom.clone(), top)
    }

    /// Normal form of a linear combination of raw diagrams with common ends.
    pub fn reduce_sum(&self, terms: &[(Poly, RawDiagram)]) -> Result<Element, EngineError> {
        let (_, first) = terms.first().expect("nonempty sum");
        let top = first.top()?;
        let mut total: Option<Operator> = None;
        for (c, d) in terms {
            let violations = d.validate();
            if !violations.is_empty() {
                return Err(EngineError::Invalid(violations));
            }
            if d.bottom != first.bottom || d.top()? != top {
                return Err(DiagramError::WordMismatch {
                    lower_top: d.top()?.to_string(),
                    upper_bottom: top.to_string(),
                }
                .into());
            }
            let op = operator_of(d, self.mode, self.conv)?.scale_poly(c);
            total = Some(match total {
                Some(t) => t.add(&op),
                None => op,
            });
        }
        self.element_from_operator(&total.unwrap(), first.bottom.clone(), top)
    }

    pub fn idempotent(&self, w: &Word) -> Result<Element, EngineError> {
        self.reduce(&RawDiagram::identity(w.clone()))
    }

    /// Product `a * b`: `b` below, `a` on top.  Zero when the words differ.
    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element, EngineError> {
        if a.mode != self.mode || b.mode != self.mode {
            return Err(EngineError::ModeMismatch);
        }
        if a.bottom != b.top || a.is_zero() || b.is_zero() {
            return Ok(Element::zero(self.mode, b.bottom.clone(), a.top.clone()));
        }
        let op = self.element_operator(a).compose(&self.element_operator(b));
        self.element_from_operator(&op, b.bottom.clone(), a.top.clone())
    }

    pub fn multiply_all(&self, factors: &[&Element]) -> Result<Element, EngineError> {
        let mut acc = factors[factors.len() - 1].clone();
        for f in factors[..factors.len() - 1].iter().rev() {
            acc = self.multiply(f, &acc)?;
        }
        Ok(acc)
    }

    /// `(ab - ba) / h`, checked for exact divisibility.
    pub fn commutator_over_h(&self, a: &Element, b: &Element) -> Result<Element, EngineError> {
        let ab = self.multiply(a, b)?;
        let ba = self.multiply(b, a)?;
        ab.sub(&ba).div_h()
    }

    /// The Poisson bracket: `commutator_over_h` modulo `h`.
    pub fn poisson(&self, a: &Element, b: &Element) -> Result<Element, EngineError> {
        Ok(self.commutator_over_h(a, b)?.mod_h())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_word;

    fn raw(w: &str, e: &str) -> RawDiagram {
        RawDiagram::parse(w, e).unwrap()
    }

    #[test]
    fn same_label_bigon_is_zero() {
        let eng = Engine::new(Mode::Plain);
        assert!(eng.reduce(&raw("1 1", "x1; x1")).unwrap().is_zero());
    }

    #[test]
    fn idempotent_squares_to_itself() {
        for mode in [Mode::Plain, Mode::Deformed] {
            let eng = Engine::new(mode);
            let e = eng.idempotent(&parse_word("R2 1 2(2) 3 R2").unwrap()).unwrap();
            assert_eq!(eng.multiply(&e, &e).unwrap(), e);
        }
    }

    #[test]
    fn normal_form_is_idempotent() {
        let eng = Engine::new(Mode::Deformed);
        let e = eng.reduce(&raw("1 2 1 R1", "x2; x1; d2; x3; r; x2; d2; x1")).unwrap();
        let again = eng.reduce_sum(
            &e.terms().iter().map(|(d, c)| (c.clone(), d.raw())).collect::<Vec<_>>(),
        );
        assert_eq!(again.unwrap(), e);
    }

    #[test]
    fn red_black_bigon_is_a_dot() {
        let eng = Engine::new(Mode::Plain);
        let bigon = eng.reduce(&raw("1 R1", "x1; x1")).unwrap();
        let dot = eng.reduce(&raw("1 R1", "d1")).unwrap();
        assert_eq!(bigon, dot);
    }
}
