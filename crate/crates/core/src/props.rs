//! Property checks over sampled diagrams.  Each check takes a seed and
//! returns a description of the counterexample on failure.

use crate::diagram::{RawDiagram, Word};
use crate::gradings::{element_gradings, grading};
use crate::normal::{Element, Engine};
use crate::operator::Mode;
use crate::rewrite::Rewriter;
use crate::sample::Sampler;

pub type Outcome = Result<(), String>;

const LABELS: usize = 3;

fn reduce(engine: &Engine, d: &RawDiagram) -> Result<Element, String> {
    engine.reduce(d).map_err(|e| format!("{d}: {e}"))
}

/// Two random sequences of local rewrites, and the engine, agree.
pub fn confluence(engine: &Engine, seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let w = s.word(false);
    let twist = s.below(2) as u32;
    let d = s.diagram(&w, 7, twist);
    let rw = Rewriter::new(engine.mode, engine.conv);
    let want = reduce(engine, &d)?;
    for _ in 0..2 {
        let steps = 5 + s.below(20);
        let terms = rw.walk(&d, steps, |n| s.below(n));
        let got = rw.evaluate(engine, &d, &terms).map_err(|e| format!("{d}: {e}"))?;
        if got != want {
            return Err(format!("{d}: rewrites give {got}, engine gives {want}"));
        }
    }
    Ok(())
}

/// `a(bc) = (ab)c` for three composable random diagrams.
pub fn associativity(engine: &Engine, seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let thick = s.coin(0.3);
    let w = s.word(thick);
    let mut parts = Vec::new();
    let mut bottom = w;
    for _ in 0..3 {
        let t = s.below(2) as u32;
        let d = s.diagram(&bottom, 4, t);
        bottom = d.top().map_err(|e| e.to_string())?;
        parts.push(d);
    }
    let [c, b, a] = [&parts[0], &parts[1], &parts[2]].map(|d| reduce(engine, d));
    let (a, b, c) = (a?, b?, c?);
    let err = |e: crate::normal::EngineError| e.to_string();
    let left = engine.multiply(&engine.multiply(&a, &b).map_err(err)?, &c).map_err(err)?;
    let right = engine.multiply(&a, &engine.multiply(&b, &c).map_err(err)?).map_err(err)?;
    let whole = parts[0].then(&parts[1]).and_then(|x| x.then(&parts[2])).map_err(|e| e.to_string())?;
    let stacked = reduce(engine, &whole)?;
    if left != right || left != stacked {
        return Err(format!("{}; {}; {}: (ab)c = {left}, a(bc) = {right}", parts[0], parts[1], parts[2]));
    }
    Ok(())
}

/// Every term of a normal form carries the gradings of the input.
pub fn grading_preservation(engine: &Engine, seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let thick = s.coin(0.3);
    let w = s.word(thick);
    let twist = s.below(3) as u32;
    let d = s.diagram(&w, 8, twist);
    let g = grading(&d, LABELS).map_err(|e| e.to_string())?;
    let e = reduce(engine, &d)?;
    let found = element_gradings(&e, LABELS);
    if found.iter().any(|h| *h != g) {
        return Err(format!("{d}: input {g:?}, terms {found:?}"));
    }
    Ok(())
}

/// Setting `h = bL = bR = 0` after a deformed reduction gives the plain one.
pub fn specialization(plain: &Engine, deformed: &Engine, seed: u64) -> Outcome {
    let mut s = Sampler::new(seed);
    let thick = s.coin(0.3);
    let w = s.word(thick);
    let twist = s.below(2) as u32;
    let d = s.diagram(&w, 7, twist);
    let p = reduce(plain, &d)?;
    let q = reduce(deformed, &d)?.specialize();
    if p != q {
        return Err(format!("{d}: plain {p}, specialized {q}"));
    }
    Ok(())
}

/// Two random untwisted endomorphisms of the Coulomb idempotent commute.
pub fn commutativity(engine: &Engine, seed: u64) -> Outcome {
    if engine.mode != Mode::Plain {
        return Err("commutativity holds in the plain algebra only".into());
    }
    let mut s = Sampler::new(seed);
    let e = Word::parse("R2 1 2(2) 3 R2").expect("Coulomb word");
    let x = s.endomorphism(&e, 6, 0);
    let y = s.endomorphism(&e, 6, 0);
    let (a, b) = (reduce(engine, &x)?, reduce(engine, &y)?);
    let err = |e: crate::normal::EngineError| e.to_string();
    let ab = engine.multiply(&a, &b).map_err(err)?;
    let ba = engine.multiply(&b, &a).map_err(err)?;
    if ab != ba {
        return Err(format!("{x} and {y} do not commute"));
    }
    Ok(())
}

/// The sampled checks, by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Confluence,
    DeformedConfluence,
    Associativity,
    Gradings,
    Specialization,
    Commutativity,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Confluence,
        Property::DeformedConfluence,
        Property::Associativity,
        Property::Gradings,
        Property::Specialization,
        Property::Commutativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Confluence => "confluence",
            Property::DeformedConfluence => "deformed confluence",
            Property::Associativity => "associativity",
            Property::Gradings => "grading preservation",
            Property::Specialization => "specialization",
            Property::Commutativity => "commutativity",
        }
    }

    pub fn check(self, plain: &Engine, deformed: &Engine, seed: u64) -> Outcome {
        match self {
            Property::Confluence => confluence(plain, seed),
            Property::DeformedConfluence => confluence(deformed, seed),
            Property::Associativity => associativity(plain, seed),
            Property::Gradings => grading_preservation(plain, seed).and_then(|_| grading_preservation(deformed, seed)),
            Property::Specialization => specialization(plain, deformed, seed),
            Property::Commutativity => commutativity(plain, seed),
        }
    }
}

/// Runs `prop` on `seeds`, returning the failing seeds with their messages
/// in seed order.
pub fn run(prop: Property, plain: &Engine, deformed: &Engine, seeds: &[u64], parallel: bool) -> Vec<(u64, String)> {
    crate::par::map(seeds, parallel, |&seed| prop.check(plain, deformed, seed).err().map(|m| (seed, m)))
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_few_seeds_of_each() {
        let plain = Engine::new(Mode::Plain);
        let deformed = Engine::new(Mode::Deformed);
        for seed in 0..5 {
            confluence(&plain, seed).unwrap();
            confluence(&deformed, seed).unwrap();
            associativity(&plain, seed).unwrap();
            grading_preservation(&plain, seed).unwrap();
            grading_preservation(&deformed, seed).unwrap();
            specialization(&plain, &deformed, seed).unwrap();
            commutativity(&plain, seed).unwrap();
        }
    }

    #[test]
    fn batches_agree() {
        let plain = Engine::new(Mode::Plain);
        let deformed = Engine::new(Mode::Deformed);
        let seeds: Vec<u64> = (100..120).collect();
        for p in Property::ALL {
            assert!(run(p, &plain, &deformed, &seeds, true).is_empty(), "{}", p.name());
        }
    }
}
