//! Sparse multivariate polynomials over the integers.
//!
//! Variables are addressed by a fixed index: `HBAR`, `BL`, `BR` for the
//! deformation parameters and `y(p)` for the dot variable sitting at cyclic
//! position `p` (1-based) of a word.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Total number of variable slots.
pub const NVARS: usize = 24;
/// Index of the deformation parameter.
pub const HBAR: usize = 0;
/// Index of the left red strand parameter.
pub const BL: usize = 1;
/// Index of the right red strand parameter.
pub const BR: usize = 2;
const Y0: usize = 3;
/// Largest supported word length.
pub const MAX_POSITIONS: usize = NVARS - Y0;

/// Variable index of the dot variable at 1-based position `p`.
pub fn y(p: usize) -> usize {
    assert!((1..=MAX_POSITIONS).contains(&p), "position {p} out of range");
    Y0 + p - 1
}

/// Position of a dot variable, if `v` is one.
pub fn position_of(v: usize) -> Option<usize> {
    (v >= Y0).then(|| v - Y0 + 1)
}

/// Exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [u8; NVARS]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; NVARS])
    }

    pub fn var(v: usize) -> Self {
        let mut m = Mono::one();
        m.0[v] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// True when only dot variables occur.
    pub fn only_dots(&self) -> bool {
        self.0[..Y0].iter().all(|&e| e == 0)
    }

    /// True when no dot variable occurs.
    pub fn no_dots(&self) -> bool {
        self.0[Y0..].iter().all(|&e| e == 0)
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", mono_string(self))
    }
}

fn var_name(v: usize) -> String {
    match v {
        HBAR => "h".to_string(),
        BL => "bL".to_string(),
        BR => "bR".to_string(),
        _ => format!("y{}", v - Y0 + 1),
    }
}

fn mono_string(m: &Mono) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(var_name(v)),
            _ => parts.push(format!("{}^{}", var_name(v), e)),
        }
    }
    parts.join("*")
}

/// Integer polynomial, stored without zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, i64>,
}

fn add_coeff(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("coefficient overflow")
}

fn mul_coeff(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("coefficient overflow")
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::one(), c);
        p
    }

    pub fn var(v: usize) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::var(v), 1);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, i64)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn monomial(m: Mono, c: i64) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Mono, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry = add_coeff(*entry, c);
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &i64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(*c)
            }
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Mono) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -*c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -*c)).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Poly {
        if k == 0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, mul_coeff(*c, k))).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), mul_coeff(*c1, *c2));
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: i64) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            out.add_term(m1.mul(m), mul_coeff(*c1, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Largest exponent of variable `v`.
    pub fn degree_in(&self, v: usize) -> u8 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    /// Total degree (largest monomial degree).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Substitutes every variable at once; `image[v]` is the replacement.
    pub fn substitute(&self, image: &[Option<Poly>; NVARS]) -> Poly {
        let mut cache: BTreeMap<(usize, u8), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut keep = Mono::one();
            let mut acc = Poly::constant(*c);
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &image[v] {
                    None => keep.0[v] = e,
                    Some(img) => {
                        let p = cache
                            .entry((v, e))
                            .or_insert_with(|| img.pow(e as u32))
                            .clone();
                        acc = acc.mul(&p);
                    }
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2.mul(&keep), c2);
            }
        }
        out
    }

    /// Replaces `v` by `v + shift`.
    pub fn shift_var(&self, v: usize, shift: i64) -> Poly {
        if shift == 0 || self.degree_in(v) == 0 {
            return self.clone();
        }
        let mut image: [Option<Poly>; NVARS] = Default::default();
        image[v] = Some(Poly::var(v).add(&Poly::constant(shift)));
        self.substitute(&image)
    }

    /// Sets `v` to the integer `value`.
    pub fn eval_var(&self, v: usize, value: i64) -> Poly {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let mut image: [Option<Poly>; NVARS] = Default::default();
        image[v] = Some(Poly::constant(value));
        self.substitute(&image)
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_int(&self, k: i64) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if c % k != 0 {
                return None;
            }
            out.add_term(*m, c / k);
        }
        Some(out)
    }

    /// Exact division by the variable `v`.
    pub fn div_var(&self, v: usize) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.0[v] == 0 {
                return None;
            }
            let mut m2 = *m;
            m2.0[v] -= 1;
            out.add_term(m2, *c);
        }
        Some(out)
    }

    /// Splits into coefficients of powers of `v`.
    fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            let mut m2 = *m;
            m2.0[v] = 0;
            out[e].add_term(m2, *c);
        }
        out
    }

    /// Exact division by a polynomial of degree one in which some variable
    /// appears with coefficient ±1.  Returns `None` when the division leaves
    /// a remainder.
    pub fn div_linear(&self, l: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (v, sign) = pivot(l).expect("divisor is not monic in any variable");
        // l = sign * (v - r)
        let mut r = l.scale(sign);
        r.add_term(Mono::var(v), -1);
        let r = r.neg();
        let coeffs = self.coefficients_in(v);
        let d = coeffs.len() - 1;
        if d == 0 {
            return None;
        }
        let mut q = vec![Poly::zero(); d];
        q[d - 1] = coeffs[d].clone();
        for k in (1..d).rev() {
            q[k - 1] = coeffs[k].add(&r.mul(&q[k]));
        }
        let rem = coeffs[0].add(&r.mul(&q[0]));
        if !rem.is_zero() {
            return None;
        }
        let mut out = Poly::zero();
        for (k, qk) in q.into_iter().enumerate() {
            let mut vm = Mono::one();
            vm.0[v] = k as u8;
            for (m, c) in qk.terms {
                out.add_term(m.mul(&vm), c);
            }
        }
        Some(out.scale(sign))
    }

    /// Drops every term containing a variable in `vars`.
    pub fn kill_vars(&self, vars: &[usize]) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&v| m.0[v] == 0))
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    /// Splits into (dot monomial, parameter coefficient) pairs.
    pub fn split_dots(&self) -> BTreeMap<Mono, Poly> {
        let mut out: BTreeMap<Mono, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut dots = *m;
            let mut params = *m;
            for v in 0..NVARS {
                if v < Y0 {
                    dots.0[v] = 0;
                } else {
                    params.0[v] = 0;
                }
            }
            out.entry(dots).or_default().add_term(params, *c);
        }
        out
    }

    /// Parses the output of `Display`.
    pub fn parse(s: &str) -> Result<Poly, PolyParseError> {
        parse_poly(s)
    }
}

fn pivot(l: &Poly) -> Option<(usize, i64)> {
    let mut best = None;
    for (m, c) in &l.terms {
        if m.degree() == 1 && c.abs() == 1 {
            let v = m.0.iter().position(|&e| e == 1).unwrap();
            // Prefer dot variables, then the highest index.
            let key = (v >= Y0, v);
            if best.is_none_or(|(k, _, _)| key > k) {
                best = Some((key, v, *c));
            }
        }
    }
    best.map(|(_, v, c)| (v, c))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Higher degree first, then reverse lexicographic for readability.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        let mut first = true;
        for (m, c) in terms {
            let (sign, abs) = if *c < 0 { ("-", -*c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{}", mono_string(m))?;
            } else {
                write!(f, "{abs}*{}", mono_string(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    Unexpected { ch: char, pos: usize },
    #[error("unknown variable {name:?} at offset {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("empty polynomial")]
    Empty,
}

fn parse_var(name: &str) -> Option<usize> {
    match name {
        "h" => Some(HBAR),
        "bL" => Some(BL),
        "bR" => Some(BR),
        _ => {
            let p: usize = name.strip_prefix('y')?.parse().ok()?;
            (1..=MAX_POSITIONS).contains(&p).then(|| y(p))
        }
    }
}

fn parse_poly(s: &str) -> Result<Poly, PolyParseError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Poly::zero();
    let mut any = false;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if i >= chars.len() {
            break;
        }
        let mut sign = 1i64;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1;
            }
            i += 1;
            skip_ws(&mut i);
        } else if any {
            return Err(PolyParseError::Unexpected { ch: chars[i], pos: i });
        }
        let mut coeff = 1i64;
        let mut mono = Mono::one();
        let mut factor_seen = false;
        loop {
            skip_ws(&mut i);
            if i >= chars.len() {
                break;
            }
            let c = chars[i];
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = chars[start..i].iter().collect::<String>().parse().map_err(|_| {
                    PolyParseError::Unexpected { ch: chars[start], pos: start }
                })?;
                coeff = mul_coeff(coeff, n);
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let v = parse_var(&name)
                    .ok_or(PolyParseError::UnknownVariable { name: name.clone(), pos: start })?;
                let mut e = 1u8;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let s2 = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    e = chars[s2..i].iter().collect::<String>().parse().map_err(|_| {
                        PolyParseError::Unexpected { ch: chars.get(s2).copied().unwrap_or(' '), pos: s2 }
                    })?;
                }
                mono.0[v] += e;
            } else {
                return Err(PolyParseError::Unexpected { ch: c, pos: i });
            }
            factor_seen = true;
            skip_ws(&mut i);
            if i < chars.len() && chars[i] == '*' {
                i += 1;
                continue;
            }
            break;
        }
        if !factor_seen {
            return Err(PolyParseError::Empty);
        }
        out.add_term(mono, sign * coeff);
        any = true;
    }
    if !any {
        return Err(PolyParseError::Empty);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yv(p: usize) -> Poly {
        Poly::var(y(p))
    }

    #[test]
    fn arithmetic_basics() {
        let a = yv(1).add(&yv(2));
        let b = yv(1).sub(&yv(2));
        let prod = a.mul(&b);
        assert_eq!(prod, yv(1).pow(2).sub(&yv(2).pow(2)));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn linear_division_exact_and_inexact() {
        let l = yv(1).sub(&yv(2)).add(&Poly::var(HBAR).scale(3));
        let q = yv(3).mul(&yv(1)).add(&Poly::var(BL));
        let p = l.mul(&q);
        assert_eq!(p.div_linear(&l), Some(q.clone()));
        assert_eq!(p.add(&Poly::one()).div_linear(&l), None);
        assert_eq!(p.div_linear(&l.neg()), Some(q.neg()));
    }

    #[test]
    fn shift_and_eval() {
        let p = yv(1).pow(2);
        let s = p.shift_var(y(1), 2);
        assert_eq!(s, yv(1).pow(2).add(&yv(1).scale(4)).add(&Poly::constant(4)));
        assert_eq!(s.eval_var(y(1), 0), Poly::constant(4));
    }

    #[test]
    fn display_parse_round_trip() {
        let p = yv(1)
            .pow(2)
            .scale(-3)
            .add(&Poly::var(HBAR).mul(&Poly::var(BL)))
            .add(&Poly::constant(7));
        let s = p.to_string();
        assert_eq!(Poly::parse(&s).unwrap(), p);
        assert_eq!(Poly::parse("0").unwrap(), Poly::zero());
    }

    #[test]
    fn parse_reports_position() {
        assert_eq!(
            Poly::parse("y1 + zz"),
            Err(PolyParseError::UnknownVariable { name: "zz".into(), pos: 5 })
        );
    }
}
