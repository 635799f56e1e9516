//! Seeded random diagrams for the property suites and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Endpoint, Event, RawDiagram, Word};

pub struct Sampler {
    rng: ChaCha8Rng,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    entry: Endpoint,
    left_red: bool,
}

fn slots(w: &Word) -> Vec<Slot> {
    let first_red = w.red_positions().first().copied();
    w.0.iter().enumerate().map(|(i, &entry)| Slot { entry, left_red: Some(i + 1) == first_red }).collect()
}

fn step(s: &mut Vec<Slot>, ev: Event) {
    let len = s.len();
    match ev {
        Event::Cross(p) if p == len => s.swap(0, len - 1),
        Event::Cross(p) => s.swap(p - 1, p),
        Event::Dot(_) => {}
        Event::Split(p) => {
            let e = Endpoint { thickness: 1, ..s[p - 1].entry };
            s[p - 1].entry = e;
            s.insert(p, Slot { entry: e, left_red: false });
        }
        Event::Merge(p) => {
            s.remove(p);
            s[p - 1].entry.thickness = 2;
        }
        Event::WrapRight => {
            let last = s.pop().unwrap();
            s.insert(0, last);
        }
        Event::WrapLeft => {
            let first = s.remove(0);
            s.push(first);
        }
    }
}

fn word_of(s: &[Slot]) -> Word {
    Word(s.iter().map(|x| x.entry).collect())
}

/// Events turning `from` into `to` without seam crossings, red-red
/// crossings or dots: split everything, sort, merge.
pub fn route(from: &Word, to: &Word) -> Option<Vec<Event>> {
    let mut s = slots(from);
    let mut events = Vec::new();
    let mut p = 1;
    while p <= s.len() {
        if s[p - 1].entry.thickness == 2 {
            events.push(Event::Split(p));
            step(&mut s, Event::Split(p));
        }
        p += 1;
    }
    let target = to.thin();
    if target.len() != s.len() {
        return None;
    }
    // Stable matching of equal endpoints keeps the reds in order.
    let mut used = vec![false; target.len()];
    let mut dest = Vec::with_capacity(s.len());
    for x in &s {
        let j = (0..target.len()).find(|&j| !used[j] && target.0[j] == x.entry)?;
        used[j] = true;
        dest.push(j);
    }
    for i in 0..dest.len() {
        for p in 1..dest.len() - i {
            if dest[p - 1] > dest[p] {
                dest.swap(p - 1, p);
                events.push(Event::Cross(p));
                step(&mut s, Event::Cross(p));
            }
        }
    }
    for (j, e) in to.0.iter().enumerate() {
        if e.thickness == 2 {
            events.push(Event::Merge(j + 1));
            step(&mut s, Event::Merge(j + 1));
        }
    }
    (word_of(&s) == *to).then_some(events)
}

/// Events taking the left red once around the cylinder in the positive
/// direction and back to where it started.
fn twist_events(s: &[Slot]) -> Option<Vec<Event>> {
    let len = s.len();
    let r = s.iter().position(|x| x.left_red)? + 1;
    let mut out: Vec<Event> = (r..len).map(Event::Cross).collect();
    out.push(Event::WrapRight);
    out.extend((1..r).map(Event::Cross));
    Some(out)
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// A cyclic arrangement of the Gr(2,4) letters: two red 2's and black
    /// 1, 2, 2, 3, the 2's optionally fused into a thick strand.
    pub fn word(&mut self, thick: bool) -> Word {
        let mut letters = vec![Endpoint::red(2), Endpoint::red(2), Endpoint::black(1), Endpoint::black(3)];
        if thick {
            letters.push(Endpoint::thick(2, 2));
        } else {
            letters.extend([Endpoint::black(2), Endpoint::black(2)]);
        }
        for i in (1..letters.len()).rev() {
            let j = self.below(i + 1);
            letters.swap(i, j);
        }
        Word(letters)
    }

    fn options(s: &[Slot]) -> Vec<Event> {
        let len = s.len();
        let mut out = Vec::new();
        for p in 1..=len {
            let q = if p == len { 1 } else { p + 1 };
            let (a, b) = (s[p - 1].entry, s[q - 1].entry);
            let reds = a.is_red() as u8 + b.is_red() as u8;
            if len >= 2 && (reds == 0 || (p < len && reds == 1)) {
                out.push(Event::Cross(p));
            }
            if !a.is_red() {
                out.push(Event::Dot(p));
                if a.thickness == 2 {
                    out.push(Event::Split(p));
                }
            }
            if p < len && !a.is_red() && !b.is_red() && a.label == b.label && a.thickness == 1 && b.thickness == 1 {
                out.push(Event::Merge(p));
            }
        }
        if !s[len - 1].entry.is_red() {
            out.push(Event::WrapRight);
        }
        if !s[0].entry.is_red() {
            out.push(Event::WrapLeft);
        }
        out
    }

    /// `steps` random events on `bottom`, with `twist` turns of the left red
    /// inserted at random points.
    pub fn events(&mut self, bottom: &Word, steps: usize, twist: u32) -> Vec<Event> {
        let mut s = slots(bottom);
        let mut at: Vec<usize> = (0..twist).map(|_| self.below(steps + 1)).collect();
        at.sort_unstable();
        let mut out = Vec::new();
        for i in 0..=steps {
            while at.first() == Some(&i) {
                at.remove(0);
                for ev in twist_events(&s).expect("two reds") {
                    step(&mut s, ev);
                    out.push(ev);
                }
            }
            if i == steps {
                break;
            }
            // Crossings are favoured over the other moves.
            let opts = Sampler::options(&s);
            let crossings: Vec<Event> = opts.iter().copied().filter(|e| matches!(e, Event::Cross(_))).collect();
            let ev = if !crossings.is_empty() && self.coin(0.6) {
                crossings[self.below(crossings.len())]
            } else {
                opts[self.below(opts.len())]
            };
            step(&mut s, ev);
            out.push(ev);
        }
        out
    }

    pub fn diagram(&mut self, bottom: &Word, steps: usize, twist: u32) -> RawDiagram {
        let events = self.events(bottom, steps, twist);
        RawDiagram::new(bottom.clone(), events)
    }

    /// A random diagram from `word` to itself.
    pub fn endomorphism(&mut self, word: &Word, steps: usize, twist: u32) -> RawDiagram {
        let d = self.diagram(word, steps, twist);
        let top = d.top().expect("sampled events type-check");
        let back = route(&top, word).expect("same letters");
        RawDiagram::new(word.clone(), d.events.into_iter().chain(back).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_diagrams_validate() {
        let mut s = Sampler::new(3);
        for i in 0..300 {
            let w = s.word(i % 3 == 0);
            let d = s.diagram(&w, 8, (i % 3) as u32);
            assert!(d.validate().is_empty(), "{d}: {:?}", d.validate());
            assert_eq!(d.trace(3).twist, i % 3);
        }
    }

    #[test]
    fn routes_reach_the_target() {
        let mut s = Sampler::new(5);
        let e = Word::parse("R2 1 2(2) 3 R2").unwrap();
        for _ in 0..100 {
            let d = s.endomorphism(&e, 6, 0);
            assert_eq!(d.top().unwrap(), e);
            assert!(d.validate().is_empty());
        }
    }

    #[test]
    fn seeds_repeat() {
        let w = Sampler::new(9).word(false);
        let a = Sampler::new(11).diagram(&w, 10, 1);
        let b = Sampler::new(11).diagram(&w, 10, 1);
        assert_eq!(a, b);
    }
}
