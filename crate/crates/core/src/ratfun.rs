//! Rational functions whose denominators are products of the linear forms
//! `y_a - y_b + m*h`, the only denominators produced by divided differences
//! and seam shifts.

use std::collections::BTreeMap;
use std::fmt;

use crate::poly::{y, Mono, Poly, HBAR, NVARS};

/// The linear form `y_a - y_b + m*h` with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LinForm {
    pub a: u8,
    pub b: u8,
    pub m: i32,
}

impl LinForm {
    /// Normalizes `y_a - y_b + m*h`, returning the form and the sign relating them.
    pub fn new(a: usize, b: usize, m: i32) -> (LinForm, i64) {
        assert_ne!(a, b, "degenerate linear form");
        if a < b {
            (LinForm { a: a as u8, b: b as u8, m }, 1)
        } else {
            (LinForm { a: b as u8, b: a as u8, m: -m }, -1)
        }
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::var(y(self.a as usize)).sub(&Poly::var(y(self.b as usize)));
        if self.m != 0 {
            p.add_term(Mono::var(HBAR), self.m as i64);
        }
        p
    }
}

/// Reduced fraction `num / prod(den)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rat {
    num: Poly,
    den: BTreeMap<LinForm, u32>,
}

impl Rat {
    pub fn zero() -> Self {
        Rat::default()
    }

    pub fn one() -> Self {
        Rat::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Rat { num: p, den: BTreeMap::new() }
    }

    /// `1 / (y_a - y_b + m*h)`.
    pub fn inverse_form(a: usize, b: usize, m: i32) -> Self {
        let (l, s) = LinForm::new(a, b, m);
        let mut den = BTreeMap::new();
        den.insert(l, 1);
        Rat { num: Poly::constant(s), den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<LinForm, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_empty().then_some(&self.num)
    }

    fn normalize(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let forms: Vec<LinForm> = self.den.keys().copied().collect();
        for l in forms {
            let lp = l.to_poly();
            loop {
                let e = self.den[&l];
                if e == 0 {
                    break;
                }
                match self.num.div_linear(&lp) {
                    Some(q) => {
                        self.num = q;
                        self.den.insert(l, e - 1);
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
        self
    }

    fn den_poly(den: &BTreeMap<LinForm, u32>) -> Poly {
        let mut p = Poly::one();
        for (l, e) in den {
            p = p.mul(&l.to_poly().pow(*e));
        }
        p
    }

    pub fn add(&self, other: &Rat) -> Rat {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut den = self.den.clone();
        for (l, e) in &other.den {
            let cur = den.entry(*l).or_insert(0);
            *cur = (*cur).max(*e);
        }
        let lift = |r: &Rat| {
            let mut missing = BTreeMap::new();
            for (l, e) in &den {
                let have = r.den.get(l).copied().unwrap_or(0);
                if *e > have {
                    missing.insert(*l, e - have);
                }
            }
            r.num.mul(&Rat::den_poly(&missing))
        };
        let num = lift(self).add(&lift(other));
        Rat { num, den }.normalize()
    }

    pub fn neg(&self) -> Rat {
        Rat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Rat {
        Rat { num: self.num.scale(k), den: self.den.clone() }.normalize()
    }

    pub fn mul(&self, other: &Rat) -> Rat {
        if self.is_zero() || other.is_zero() {
            return Rat::zero();
        }
        let mut den = self.den.clone();
        for (l, e) in &other.den {
            *den.entry(*l).or_insert(0) += e;
        }
        Rat { num: self.num.mul(&other.num), den }.normalize()
    }

    pub fn mul_poly(&self, p: &Poly) -> Rat {
        Rat { num: self.num.mul(p), den: self.den.clone() }.normalize()
    }

    /// Exact division by a linear polynomial.  Falls back to recording the
    /// divisor in the denominator when it is one of the admissible forms.
    pub fn div_linear(&self, l: &Poly) -> Option<Rat> {
        if let Some(q) = self.num.div_linear(l) {
            return Some(Rat { num: q, den: self.den.clone() });
        }
        let (form, sign) = as_linform(l)?;
        let mut den = self.den.clone();
        *den.entry(form).or_insert(0) += 1;
        Some(Rat { num: self.num.scale(sign), den }.normalize())
    }

    /// Applies `y_p -> y_{q} + shift*h` to every dot variable (positions not
    /// listed are left alone) and `bL -> bL + bl_shift`.
    pub fn transport(&self, map: &[(usize, usize, i64)], bl_shift: i64) -> Rat {
        let mut image: [Option<Poly>; NVARS] = Default::default();
        let mut identity = bl_shift == 0;
        for &(p, q, s) in map {
            if p != q || s != 0 {
                identity = false;
            }
            let mut img = Poly::var(y(q));
            if s != 0 {
                img.add_term(Mono::var(HBAR), s);
            }
            image[y(p)] = Some(img);
        }
        if identity {
            return self.clone();
        }
        if bl_shift != 0 {
            let mut img = Poly::var(crate::poly::BL);
            img.add_term(Mono::one(), bl_shift);
            image[crate::poly::BL] = Some(img);
        }
        let mut num = self.num.substitute(&image);
        let mut den = BTreeMap::new();
        let lookup = |p: usize| map.iter().find(|t| t.0 == p).map(|t| (t.1, t.2)).unwrap_or((p, 0));
        for (l, e) in &self.den {
            let (qa, sa) = lookup(l.a as usize);
            let (qb, sb) = lookup(l.b as usize);
            let (form, sign) = LinForm::new(qa, qb, l.m + (sa - sb) as i32);
            if sign < 0 && e % 2 == 1 {
                num = num.neg();
            }
            *den.entry(form).or_insert(0) += e;
        }
        Rat { num, den }.normalize()
    }
}

/// Recognizes `±(y_a - y_b + m*h)`.
fn as_linform(l: &Poly) -> Option<(LinForm, i64)> {
    let mut plus = None;
    let mut minus = None;
    let mut m = 0i64;
    for (mono, c) in l.terms() {
        if mono.degree() != 1 {
            return None;
        }
        let v = mono.0.iter().position(|&e| e == 1).unwrap();
        if v == HBAR {
            m = *c;
        } else {
            let p = crate::poly::position_of(v)?;
            match *c {
                1 if plus.is_none() => plus = Some(p),
                -1 if minus.is_none() => minus = Some(p),
                _ => return None,
            }
        }
    }
    let (a, b) = (plus?, minus?);
    let (form, sign) = LinForm::new(a, b, m as i32);
    Some((form, sign))
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        let mut first = true;
        for (l, e) in &self.den {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "({})", l.to_poly())?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yv(p: usize) -> Poly {
        Poly::var(y(p))
    }

    #[test]
    fn divided_difference_of_square_is_sum() {
        // (y1^2 - y2^2) / (y1 - y2) = y1 + y2
        let r = Rat::inverse_form(1, 2, 0).mul_poly(&yv(1).pow(2).sub(&yv(2).pow(2)));
        assert_eq!(r.as_poly(), Some(&yv(1).add(&yv(2))));
    }

    #[test]
    fn sums_cancel_to_canonical_form() {
        let a = Rat::inverse_form(1, 2, 0);
        let b = Rat::inverse_form(2, 1, 0);
        assert!(a.add(&b).is_zero());
        let c = a.mul_poly(&yv(1)).sub(&a.mul_poly(&yv(2)));
        assert_eq!(c, Rat::one());
    }

    #[test]
    fn transport_moves_forms_and_shifts() {
        let r = Rat::inverse_form(1, 2, 0);
        let t = r.transport(&[(1, 2, 1), (2, 1, 0)], 0);
        // 1/(y2 + h - y1) = -1/(y1 - y2 - h)
        assert_eq!(t, Rat::inverse_form(2, 1, 1));
    }
}
