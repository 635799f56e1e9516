//! The Coulomb idempotent `e`, the commutative ring `eRe`, the Plücker
//! diagrams and the Chevalley generators.

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{DiagramError, Endpoint, Event, QuiverData, RawDiagram, Word};
use crate::golden::GoldenSet;
use crate::gradings::{element_gradings, GradingTriple};
use crate::normal::{Element, Engine, EngineError};
use crate::operator::Mode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoulombError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("no golden diagram named {0}")]
    MissingGolden(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoulombSetup {
    pub n: usize,
    pub k: usize,
    pub quiver: QuiverData,
    /// `None` when some label needs a strand thicker than 2.
    pub word: Option<Word>,
}

/// `v_m` counts the boxes `(i, j)` of the `k x (n-k)` rectangle with `i + j - 1 = m`.
pub fn coulomb_idempotent(n: usize, k: usize) -> Result<CoulombSetup, CoulombError> {
    if k == 0 || 2 * k > n {
        return Err(CoulombError::BadParameters(format!("need 0 < k <= n/2, got n={n}, k={k}")));
    }
    let v: Vec<u32> = (1..n).map(|m| diagonal_len(k, n, m) as u32).collect();
    let mut w = vec![0u32; n - 1];
    w[k - 1] += 1;
    w[n - k - 1] += 1;
    let quiver = QuiverData::new(n, v.clone(), w)?;
    let word = if v.iter().all(|&t| t <= 2) {
        let mut entries = vec![Endpoint::red((n - k) as u8)];
        entries.extend(v.iter().enumerate().map(|(i, &t)| Endpoint::thick(i as u8 + 1, t as u8)));
        entries.push(Endpoint::red(k as u8));
        let word = Word(entries);
        quiver.check_word(&word)?;
        Some(word)
    } else {
        None
    };
    Ok(CoulombSetup { n, k, quiver, word })
}

/// Number of boxes on diagonal `m` of the `k x (n-k)` rectangle.
pub fn diagonal_len(k: usize, n: usize, m: usize) -> usize {
    (1..=k).filter(|&i| m + 1 > i && m + 1 - i >= 1 && m + 1 - i <= n - k).count()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Sign {
    E,
    F,
}

/// An element of `eRe` or of a twisted piece `eT^m e`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    pub element: Element,
    pub twist: i32,
}

/// Context for computations in `eRe` with a fixed engine.
pub struct Coulomb {
    pub engine: Engine,
    pub setup: CoulombSetup,
    word: Word,
}

impl Coulomb {
    pub fn new(n: usize, k: usize, mode: Mode) -> Result<Coulomb, CoulombError> {
        Coulomb::with_engine(n, k, Engine::new(mode))
    }

    pub fn with_engine(n: usize, k: usize, engine: Engine) -> Result<Coulomb, CoulombError> {
        let setup = coulomb_idempotent(n, k)?;
        let word = setup
            .word
            .clone()
            .ok_or_else(|| CoulombError::BadParameters("strands thicker than 2 are not supported".into()))?;
        Ok(Coulomb { engine, setup, word })
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn mode(&self) -> Mode {
        self.engine.mode
    }

    pub fn labels(&self) -> usize {
        self.setup.n - 1
    }

    pub fn idempotent(&self) -> Result<Element, CoulombError> {
        Ok(self.engine.idempotent(&self.word)?)
    }

    fn position_of_label(&self, i: usize) -> Result<usize, CoulombError> {
        self.word
            .0
            .iter()
            .position(|e| !e.is_red() && e.label as usize == i)
            .map(|p| p + 1)
            .ok_or(CoulombError::BadIndex(i))
    }

    /// The first elementary symmetric function in the dots of the label-`i` strand.
    pub fn bullet(&self, i: usize) -> Result<GradedElement, CoulombError> {
        if i == 0 || i > self.labels() {
            return Err(CoulombError::BadIndex(i));
        }
        let p = self.position_of_label(i)?;
        let d = RawDiagram::new(self.word.clone(), vec![Event::Dot(p)]);
        Ok(GradedElement { element: self.engine.reduce(&d)?, twist: 0 })
    }

    /// `sum c_i bullet_i` for integer weights `c`.
    pub fn bullet_combination(&self, c: &[i64]) -> Result<Element, CoulombError> {
        let mut acc = Element::zero(self.mode(), self.word.clone(), self.word.clone());
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = acc.add(&self.bullet(i + 1)?.element.scale(ci));
            }
        }
        Ok(acc)
    }

    /// The Plücker diagram `D_ij`, from the golden figures.
    pub fn plucker_d(&self, i: usize, j: usize) -> Result<GradedElement, CoulombError> {
        if (self.setup.n, self.setup.k) != (4, 2) {
            return Err(CoulombError::BadParameters("Plücker diagrams exist for n=4, k=2".into()));
        }
        if !(1 <= i && i < j && j <= 4) {
            return Err(CoulombError::BadIndex(10 * i + j));
        }
        let name = format!("D{i}{j}");
        let raw = GoldenSet::embedded().get(&name).ok_or(CoulombError::MissingGolden(name))?;
        let twist = raw.trace(self.labels()).twist;
        Ok(GradedElement { element: self.engine.reduce(raw)?, twist })
    }

    /// The unscaled single-wrap diagram: one label-`i` strand goes once round
    /// the cylinder, rightwards for `E` and leftwards for `F`.
    pub fn chevalley_diagram(&self, i: usize, sign: Sign) -> Result<RawDiagram, CoulombError> {
        if i == 0 || i > self.labels() {
            return Err(CoulombError::BadIndex(i));
        }
        let p = self.position_of_label(i)?;
        let len = self.word.len();
        let thick = self.word.0[p - 1].thickness == 2;
        let mut ev = Vec::new();
        match sign {
            Sign::E => {
                // A thick strand sheds its right half, which returns as the left half.
                let mut q = p;
                let mut n = len;
                if thick {
                    ev.push(Event::Split(p));
                    q = p + 1;
                    n += 1;
                }
                for c in q..n {
                    ev.push(Event::Cross(c));
                }
                ev.push(Event::WrapRight);
                for c in 1..p {
                    ev.push(Event::Cross(c));
                }
                if thick {
                    ev.push(Event::Merge(p));
                }
            }
            Sign::F => {
                let mut n = len;
                if thick {
                    ev.push(Event::Split(p));
                    n += 1;
                }
                for c in (1..p).rev() {
                    ev.push(Event::Cross(c));
                }
                ev.push(Event::WrapLeft);
                let stop = if thick { p + 1 } else { p };
                for c in (stop..n).rev() {
                    ev.push(Event::Cross(c));
                }
                if thick {
                    ev.push(Event::Merge(p));
                }
            }
        }
        Ok(RawDiagram::new(self.word.clone(), ev))
    }

    /// `a_i = -1` times the `E` diagram, `b_i = 1` times the `F` diagram.
    pub fn chevalley(&self, i: usize, sign: Sign) -> Result<Element, CoulombError> {
        let d = self.chevalley_diagram(i, sign)?;
        let scale = match sign {
            Sign::E => -1,
            Sign::F => 1,
        };
        Ok(self.engine.reduce(&d)?.scale(scale))
    }

    pub fn gradings(&self, e: &Element) -> Vec<GradingTriple> {
        element_gradings(e, self.labels()).into_iter().collect()
    }

    /// Checks the `sl_2` relations for `E_i, F_i` and the vanishing of the
    /// mixed brackets `[E_i, F_j]`, `j != i`.
    pub fn verify_sl2(&self, i: usize) -> Result<Sl2Report, CoulombError> {
        if !self.mode().deformed() {
            return Err(CoulombError::BadParameters("the sl2 check needs the deformed algebra".into()));
        }
        let e = self.chevalley(i, Sign::E)?;
        let f = self.chevalley(i, Sign::F)?;
        let eng = &self.engine;
        let h = eng.commutator_over_h(&e, &f)?;
        let he = eng.commutator_over_h(&h, &e)?;
        let hf = eng.commutator_over_h(&h, &f)?;
        let mut checks = vec![
            Sl2Check::new("[H,E]/h = 2E", &he, &e.scale(2)),
            Sl2Check::new("[H,F]/h = -2F", &hf, &f.scale(-2)),
            Sl2Check::new("H = -[F,E]/h", &h, &eng.commutator_over_h(&f, &e)?.neg()),
        ];
        for j in 1..=self.labels() {
            if j != i {
                let fj = self.chevalley(j, Sign::F)?;
                let c = eng.commutator_over_h(&e, &fj)?;
                let zero = Element::zero(self.mode(), c.bottom.clone(), c.top.clone());
                checks.push(Sl2Check::new(&format!("[E{i},F{j}]/h = 0"), &c, &zero));
            }
        }
        Ok(Sl2Report { i, h_terms: h.len(), h_is_zero: h.is_zero(), checks })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sl2Check {
    pub name: String,
    pub pass: bool,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
}

impl Sl2Check {
    fn new(name: &str, lhs: &Element, rhs: &Element) -> Sl2Check {
        let pass = lhs.sub(rhs).is_zero();
        let (l, r) = if pass { (serde_json::Value::Null, serde_json::Value::Null) } else { (lhs.to_json(), rhs.to_json()) };
        Sl2Check { name: name.to_string(), pass, lhs: l, rhs: r }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sl2Report {
    pub i: usize,
    pub h_terms: usize,
    pub h_is_zero: bool,
    pub checks: Vec<Sl2Check>,
}

impl Sl2Report {
    pub fn pass(&self) -> bool {
        !self.h_is_zero && self.checks.iter().all(|c| c.pass)
    }
}

/// Coefficient-wise `h = bL = bR = 0`, as an element of the plain algebra.
pub fn to_plain(e: &Element) -> Element {
    e.specialize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_word;

    #[test]
    fn idempotent_words() {
        let s = coulomb_idempotent(4, 2).unwrap();
        assert_eq!(s.word.unwrap(), parse_word("R2 1 2(2) 3 R2").unwrap());
        assert_eq!(s.quiver.v, vec![1, 2, 1]);
        assert_eq!(s.quiver.w, vec![0, 2, 0]);
        let s = coulomb_idempotent(7, 2).unwrap();
        assert_eq!(s.quiver.v, vec![1, 2, 2, 2, 2, 1]);
        assert_eq!(s.quiver.w, vec![0, 1, 0, 0, 1, 0]);
        let s = coulomb_idempotent(2, 1).unwrap();
        assert_eq!(s.word.unwrap(), parse_word("R1 1 R1").unwrap());
        assert!(coulomb_idempotent(6, 3).unwrap().word.is_none());
        assert!(coulomb_idempotent(4, 3).is_err());
    }

    #[test]
    fn bullets_have_degree_two_and_commute() {
        let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
        let b1 = c.bullet(1).unwrap().element;
        let b3 = c.bullet(3).unwrap().element;
        for g in c.gradings(&c.bullet(2).unwrap().element) {
            assert_eq!(g, GradingTriple { scaling: 2, winding: vec![0, 0, 0], twist: 0 });
        }
        let eng = &c.engine;
        assert_eq!(eng.multiply(&b1, &b3).unwrap(), eng.multiply(&b3, &b1).unwrap());
    }

    #[test]
    fn chevalley_gradings() {
        let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
        for i in 1..=3 {
            for (s, w) in [(Sign::E, 1), (Sign::F, -1)] {
                let d = c.chevalley_diagram(i, s).unwrap();
                assert!(d.validate().is_empty());
                assert_eq!(d.top().unwrap(), *c.word());
                let mut wind = vec![0; 3];
                wind[i - 1] = w;
                for g in c.gradings(&c.chevalley(i, s).unwrap()) {
                    assert_eq!(g, GradingTriple { scaling: 2, winding: wind.clone(), twist: 0 });
                }
            }
        }
    }

    #[test]
    fn plucker_diagram_gradings() {
        let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
        let expect = [
            ((1, 2), [1, 2, 1]),
            ((1, 3), [1, 1, 1]),
            ((1, 4), [1, 1, 0]),
            ((2, 3), [0, 1, 1]),
            ((2, 4), [0, 1, 0]),
            ((3, 4), [0, 0, 0]),
        ];
        for ((i, j), w) in expect {
            let d = c.plucker_d(i, j).unwrap();
            assert_eq!(d.twist, 1);
            for g in c.gradings(&d.element) {
                assert_eq!(g, GradingTriple { scaling: 0, winding: w.to_vec(), twist: 1 });
            }
        }
    }

    #[test]
    fn far_chevalley_brackets_vanish() {
        let c = Coulomb::new(4, 2, Mode::Deformed).unwrap();
        let e1 = c.chevalley(1, Sign::E).unwrap();
        let e3 = c.chevalley(3, Sign::E).unwrap();
        assert!(c.engine.poisson(&e1, &e3).unwrap().is_zero());
    }
}
