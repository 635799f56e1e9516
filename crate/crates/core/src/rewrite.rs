//! Local relations applied directly to event sequences.  Each rule rewrites
//! a raw diagram into a combination of raw diagrams at one site; the
//! normal form of the combination is unchanged.  Used to cross-check the
//! engine against the relations themselves.

use serde::Serialize;

use crate::diagram::{Endpoint, Event, RawDiagram, Word};
use crate::normal::{Element, Engine, EngineError};
use crate::operator::{Convention, Mode};
use crate::poly::Poly;

/// A linear combination of raw diagrams with common ends.
pub type Combination = Vec<(Poly, RawDiagram)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    /// Exchange two events on disjoint positions.
    Commute,
    /// Move a dot from above a crossing to below it.
    DotSlide,
    /// Remove two consecutive crossings of the same pair.
    Bigon,
    /// Replace `x_p x_q x_p` by `x_q x_p x_q`.
    Triple,
    /// Move a dot from above a seam wrap to below it.
    SeamSlide,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Commute, Rule::DotSlide, Rule::Bigon, Rule::Triple, Rule::SeamSlide];
}

/// A rule together with the index of the first event it touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub rule: Rule,
    pub at: usize,
}

/// The rule table for one mode and sign convention.
#[derive(Clone, Copy, Debug)]
pub struct Rewriter {
    pub mode: Mode,
    pub conv: Convention,
}

fn partner(p: usize, len: usize) -> usize {
    p % len + 1
}

fn support(ev: &Event, len: usize) -> Option<Vec<usize>> {
    match *ev {
        Event::Cross(p) => Some(vec![p, partner(p, len)]),
        Event::Dot(p) => Some(vec![p]),
        _ => None,
    }
}

fn thin(w: &Word, ps: &[usize]) -> bool {
    ps.iter().all(|&p| w.0[p - 1].thickness == 1)
}

impl Rewriter {
    pub fn new(mode: Mode, conv: Convention) -> Self {
        Rewriter { mode, conv }
    }

    fn with_events(d: &RawDiagram, at: usize, removed: usize, inserted: &[Event]) -> RawDiagram {
        let mut events = d.events[..at].to_vec();
        events.extend_from_slice(inserted);
        events.extend_from_slice(&d.events[at + removed..]);
        RawDiagram::new(d.bottom.clone(), events)
    }

    /// Words below each event, or `None` when the events do not type-check.
    fn words(d: &RawDiagram) -> Option<Vec<Word>> {
        let mut out = Vec::with_capacity(d.events.len());
        for i in 0..d.events.len() {
            out.push(RawDiagram::new(d.bottom.clone(), d.events[..i].to_vec()).top().ok()?);
        }
        Some(out)
    }

    /// All sites where some rule applies.
    pub fn sites(&self, d: &RawDiagram) -> Vec<Site> {
        let Some(words) = Rewriter::words(d) else { return Vec::new() };
        let mut out = Vec::new();
        for rule in Rule::ALL {
            for at in 0..d.events.len() {
                if self.rewrite_at(d, &words, Site { rule, at }).is_some() {
                    out.push(Site { rule, at });
                }
            }
        }
        out
    }

    /// Applies one rule, returning `None` when it does not apply at the site.
    pub fn apply(&self, d: &RawDiagram, site: Site) -> Option<Combination> {
        let words = Rewriter::words(d)?;
        self.rewrite_at(d, &words, site)
    }

    fn rewrite_at(&self, d: &RawDiagram, words: &[Word], site: Site) -> Option<Combination> {
        let at = site.at;
        let ev = |i: usize| d.events.get(i).copied();
        let w = &words[at];
        let len = w.len();
        let deformed = self.mode.deformed();
        let one = Poly::one;
        match site.rule {
            Rule::Commute => {
                let (a, b) = (ev(at)?, ev(at + 1)?);
                let (sa, sb) = (support(&a, len)?, support(&b, len)?);
                if sa.iter().any(|p| sb.contains(p)) || !thin(w, &sa) || !thin(w, &sb) || len < 2 {
                    return None;
                }
                Some(vec![(one(), Rewriter::with_events(d, at, 2, &[b, a]))])
            }
            Rule::DotSlide => {
                let (Event::Cross(p), Event::Dot(q)) = (ev(at)?, ev(at + 1)?) else { return None };
                let r = partner(p, len);
                if len < 2 || !thin(w, &[p, r]) || (q != p && q != r) {
                    return None;
                }
                let seam = p == len;
                if seam && deformed {
                    return None;
                }
                let (a, b) = (w.0[p - 1], w.0[r - 1]);
                // The dot sits on the strand that started at `from`.
                let from = if q == r { p } else { r };
                let moved = Rewriter::with_events(d, at, 2, &[Event::Dot(from), Event::Cross(p)]);
                let mut out = vec![(one(), moved)];
                if !a.is_red() && !b.is_red() && a.label == b.label {
                    let nu = self.conv.nilhecke as i64;
                    let c = if q == r { -nu } else { nu };
                    out.push((Poly::constant(c), Rewriter::with_events(d, at, 2, &[])));
                }
                Some(out)
            }
            Rule::Bigon => {
                let (Event::Cross(p), Event::Cross(p2)) = (ev(at)?, ev(at + 1)?) else { return None };
                let r = partner(p, len);
                if p != p2 || len < 2 || !thin(w, &[p, r]) {
                    return None;
                }
                let (a, b) = (w.0[p - 1], w.0[r - 1]);
                let bare = Rewriter::with_events(d, at, 2, &[]);
                let dotted = |pos: usize| Rewriter::with_events(d, at, 2, &[Event::Dot(pos)]);
                match (a.is_red(), b.is_red()) {
                    (true, true) => None,
                    (false, false) if a.label == b.label => Some(Vec::new()),
                    (false, false) if a.label.abs_diff(b.label) == 1 => {
                        if p == len && deformed {
                            return None;
                        }
                        let s = self.adjacent_sign(a, b);
                        Some(vec![(Poly::constant(s), dotted(p)), (Poly::constant(-s), dotted(r))])
                    }
                    (false, false) => Some(vec![(one(), bare)]),
                    _ => {
                        let (black, pos, red) = if a.is_red() { (b, r, a) } else { (a, p, b) };
                        if black.label != red.label {
                            Some(vec![(one(), bare)])
                        } else if deformed {
                            None
                        } else {
                            Some(vec![(one(), dotted(pos))])
                        }
                    }
                }
            }
            Rule::Triple => {
                let (Event::Cross(p), Event::Cross(q), Event::Cross(p3)) = (ev(at)?, ev(at + 1)?, ev(at + 2)?) else {
                    return None;
                };
                if p3 != p || len < 3 {
                    return None;
                }
                // Positions x, x+1, x+2 read cyclically; `up` when p = x.
                let up = q == partner(p, len);
                let down = p == partner(q, len);
                if !up && !down {
                    return None;
                }
                let x = if up { p } else { q };
                let (y, z) = (partner(x, len), partner(partner(x, len), len));
                if !thin(w, &[x, y, z]) {
                    return None;
                }
                if deformed && (x == len || y == len) {
                    return None;
                }
                let (sa, sb, sc) = (w.0[x - 1], w.0[y - 1], w.0[z - 1]);
                let mut out = vec![(one(), Rewriter::with_events(d, at, 3, &[Event::Cross(q), Event::Cross(p), Event::Cross(q)]))];
                if let Some(c) = self.triple_correction(sa, sb, sc) {
                    let c = if up { c } else { -c };
                    out.push((Poly::constant(c), Rewriter::with_events(d, at, 3, &[])));
                }
                Some(out)
            }
            Rule::SeamSlide => {
                let (wrap, Event::Dot(q)) = (ev(at)?, ev(at + 1)?) else { return None };
                let (arrived, from, dir) = match wrap {
                    Event::WrapRight => (1, len, 1),
                    Event::WrapLeft => (len, 1, -1),
                    _ => return None,
                };
                if q != arrived || !thin(w, &[from]) {
                    return None;
                }
                let mut out = vec![(one(), Rewriter::with_events(d, at, 2, &[Event::Dot(from), wrap]))];
                if deformed {
                    let h = Poly::var(crate::poly::HBAR).scale(-dir);
                    out.push((h, Rewriter::with_events(d, at, 2, &[wrap])));
                }
                Some(out)
            }
        }
    }

    /// Sign of the dot on the left strand in an adjacent-label bigon.
    fn adjacent_sign(&self, a: Endpoint, b: Endpoint) -> i64 {
        let beta = self.conv.bigon as i64;
        // Either placement gives the same polynomial in the strands' own dots.
        if a.label > b.label {
            beta
        } else {
            -beta
        }
    }

    /// `x_p x_{p+1} x_p - x_{p+1} x_p x_{p+1}` on strands `a, b, c`, when nonzero.
    fn triple_correction(&self, a: Endpoint, b: Endpoint, c: Endpoint) -> Option<i64> {
        if a.is_red() || c.is_red() || a.label != c.label {
            return None;
        }
        if b.is_red() {
            (b.label == a.label).then_some(self.conv.nilhecke as i64)
        } else if b.label.abs_diff(a.label) == 1 {
            let beta = self.conv.bigon as i64;
            let s = if a.label > b.label { 1 } else { -1 };
            Some(self.conv.nilhecke as i64 * beta * s)
        } else {
            None
        }
    }

    /// Applies up to `steps` rules, each at a site chosen by `choose`, to every
    /// term of the combination in turn.
    pub fn walk(&self, start: &RawDiagram, steps: usize, mut choose: impl FnMut(usize) -> usize) -> Combination {
        let mut terms: Combination = vec![(Poly::one(), start.clone())];
        for _ in 0..steps {
            if terms.is_empty() {
                break;
            }
            let i = choose(terms.len());
            let (c, d) = terms.swap_remove(i);
            let sites = self.sites(&d);
            if sites.is_empty() {
                terms.push((c, d));
                continue;
            }
            let site = sites[choose(sites.len())];
            let Some(out) = self.apply(&d, site) else {
                terms.push((c, d));
                continue;
            };
            terms.extend(out.into_iter().map(|(k, e)| (c.mul(&k), e)));
        }
        terms
    }

    /// Normal form of a combination, zero when it is empty.
    pub fn evaluate(&self, engine: &Engine, start: &RawDiagram, terms: &Combination) -> Result<Element, EngineError> {
        if terms.is_empty() {
            let top = start.top()?;
            return Ok(Element::zero(self.mode, start.bottom.clone(), top));
        }
        engine.reduce_sum(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradings::{coefficient_degree, grading};

    fn d(word: &str, events: &str) -> RawDiagram {
        RawDiagram::parse(word, events).unwrap()
    }

    fn single(rw: &Rewriter, x: &RawDiagram, rule: Rule) -> Combination {
        rw.apply(x, Site { rule, at: 0 }).expect("rule applies")
    }

    /// Every rule instance on words of length two and three, checked against
    /// the engine and for homogeneity.
    #[test]
    fn rules_agree_with_normal_forms() {
        let alpha = ["1", "2", "3", "R2", "R1"];
        for mode in [Mode::Plain, Mode::Deformed] {
            for conv in [Convention::STANDARD, Convention::DIVIDED_DIFFERENCE] {
                let eng = Engine::with_convention(mode, conv);
                let rw = Rewriter::new(mode, conv);
                let mut checked = 0;
                for len in 2..=3usize {
                    for code in 0..alpha.len().pow(len as u32) {
                        let letters: Vec<&str> =
                            (0..len).map(|i| alpha[code / alpha.len().pow(i as u32) % alpha.len()]).collect();
                        let word = Word::parse(&letters.join(" ")).unwrap();
                        let mut cases = vec![
                            (vec![Event::WrapRight, Event::Dot(1)], Rule::SeamSlide),
                            (vec![Event::WrapLeft, Event::Dot(len)], Rule::SeamSlide),
                        ];
                        for p in 1..=len {
                            let r = partner(p, len);
                            cases.push((vec![Event::Cross(p), Event::Dot(p)], Rule::DotSlide));
                            cases.push((vec![Event::Cross(p), Event::Dot(r)], Rule::DotSlide));
                            cases.push((vec![Event::Cross(p), Event::Cross(p)], Rule::Bigon));
                            if len == 3 {
                                cases.push((vec![Event::Cross(p), Event::Cross(r), Event::Cross(p)], Rule::Triple));
                                cases.push((vec![Event::Cross(r), Event::Cross(p), Event::Cross(r)], Rule::Triple));
                            }
                        }
                        for (events, rule) in cases {
                            let x = RawDiagram::new(word.clone(), events);
                            if !x.validate().is_empty() {
                                continue;
                            }
                            let Some(out) = rw.apply(&x, Site { rule, at: 0 }) else { continue };
                            let g = grading(&x, 3).unwrap();
                            for (c, y) in &out {
                                let mut h = grading(y, 3).unwrap();
                                h.scaling += coefficient_degree(c).unwrap();
                                assert_eq!(h, g, "{rule:?} {x} -> {y}");
                            }
                            let lhs = eng.reduce(&x).unwrap();
                            let rhs = rw.evaluate(&eng, &x, &out).unwrap();
                            assert_eq!(lhs, rhs, "{mode:?} {conv:?} {rule:?} {x}");
                            checked += 1;
                        }
                    }
                }
                assert!(checked > 800, "{checked}");
            }
        }
    }

    #[test]
    fn same_label_bigon_vanishes() {
        let rw = Rewriter::new(Mode::Plain, Convention::STANDARD);
        assert!(single(&rw, &d("2 2", "x1; x1"), Rule::Bigon).is_empty());
    }

    #[test]
    fn red_black_bigon_leaves_a_dot() {
        let rw = Rewriter::new(Mode::Plain, Convention::STANDARD);
        let out = single(&rw, &d("R2 2", "x1; x1"), Rule::Bigon);
        assert_eq!(out, vec![(Poly::one(), d("R2 2", "d2"))]);
        let out = single(&rw, &d("R2 1", "x1; x1"), Rule::Bigon);
        assert_eq!(out, vec![(Poly::one(), d("R2 1", ""))]);
    }

    #[test]
    fn adjacent_triple_has_positive_correction() {
        let rw = Rewriter::new(Mode::Plain, Convention::STANDARD);
        let out = single(&rw, &d("2 3 2", "x1; x2; x1"), Rule::Triple);
        assert_eq!(out, vec![(Poly::one(), d("2 3 2", "x2; x1; x2")), (Poly::one(), d("2 3 2", ""))]);
    }

    #[test]
    fn seam_slide_picks_up_hbar_only_when_deformed() {
        let x = d("1 2", "r; d1");
        let plain = single(&Rewriter::new(Mode::Plain, Convention::STANDARD), &x, Rule::SeamSlide);
        assert_eq!(plain.len(), 1);
        let deformed = single(&Rewriter::new(Mode::Deformed, Convention::STANDARD), &x, Rule::SeamSlide);
        assert_eq!(deformed.len(), 2);
        assert_eq!(deformed[1].0, Poly::var(crate::poly::HBAR).neg());
    }

    #[test]
    fn walks_preserve_the_normal_form() {
        let eng = Engine::new(Mode::Plain);
        let rw = Rewriter::new(Mode::Plain, eng.conv);
        let x = d("R2 1 2 2 3 R2", "x2; x3; x2; d3; x3; x4; x3; x4; d4");
        let want = eng.reduce(&x).unwrap();
        let mut state = 7usize;
        for _ in 0..5 {
            let out = rw.walk(&x, 20, |n| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) % n
            });
            assert_eq!(rw.evaluate(&eng, &x, &out).unwrap(), want);
        }
    }
}
