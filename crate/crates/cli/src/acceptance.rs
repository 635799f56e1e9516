//! The nine acceptance criteria, each with a pinned time limit.

use std::collections::BTreeSet;
use std::time::Instant;

use serde_json::json;

use cylklrw::bundles::{self, k1_census, k1_classify, validate_golden, TransitionReport, WordClass};
use cylklrw::coulomb::Coulomb;
use cylklrw::diagram::Word;
use cylklrw::golden::GoldenSet;
use cylklrw::normal::Engine;
use cylklrw::operator::Mode;
use cylklrw::par;
use cylklrw::plucker::Reference;
use cylklrw::props::{self, Property};
use cylklrw::tableau::{enumerate, weyl_dim, MonopoleTableau, DEFAULT_SEARCH_CAP};

use crate::report::{Check, Report, Status};

/// Case counts for the property suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Full,
    /// A tenth of the cases, for smoke runs.
    Quick,
}

impl Scale {
    pub fn cases(self, p: Property) -> u64 {
        let full = match p {
            Property::Confluence => 500,
            Property::Commutativity => 100,
            _ => 200,
        };
        match self {
            Scale::Full => full,
            Scale::Quick => full / 10,
        }
    }
}

pub const TITLES: [&str; 9] = [
    "Plücker identity",
    "transition identities",
    "bundle identification",
    "rank formula",
    "tableau lemmas",
    "k=1 classification",
    "deformed sl2 relations",
    "property suites",
    "golden figures",
];

/// Seconds allowed per criterion; `None` when no limit is set.
pub const LIMITS: [Option<f64>; 9] = [Some(5.0), Some(60.0), None, None, Some(30.0), None, Some(120.0), None, None];

type Outcome = (bool, String, serde_json::Value);

fn timed(n: usize, f: impl FnOnce() -> Result<Outcome, String>) -> Check {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    let name = format!("criterion {n}: {}", TITLES[n - 1]);
    let mut check = match out {
        Ok((ok, detail, witness)) => Check::new(name, Status::of(ok), detail).with_witness(witness),
        Err(e) => Check::new(name, Status::Fail, format!("error: {e}")),
    };
    if let Some(limit) = LIMITS[n - 1] {
        if secs >= limit {
            check.status = Status::Fail;
            check.detail = format!("{}; over the {limit} s limit", check.detail);
        } else {
            check.detail = format!("{} (limit {limit} s)", check.detail);
        }
    }
    check.seconds = secs;
    check
}

fn s<E: ToString>(e: E) -> String {
    e.to_string()
}

fn plucker() -> Result<Outcome, String> {
    let c = Coulomb::new(4, 2, Mode::Plain).map_err(s)?;
    let d = |i, j| c.plucker_d(i, j).map(|g| g.element).map_err(s);
    let m = |a, b| c.engine.multiply(&a, &b).map_err(s);
    let rel = m(d(1, 2)?, d(3, 4)?)?.sub(&m(d(1, 3)?, d(2, 4)?)?).add(&m(d(1, 4)?, d(2, 3)?)?);
    let ok = rel.is_zero();
    let detail = if ok { "D12 D34 - D13 D24 + D14 D23 = 0".to_string() } else { format!("{} terms remain", rel.len()) };
    Ok((ok, detail, if ok { json!(null) } else { rel.to_json() }))
}

fn transitions(reports: &[Result<TransitionReport, bundles::BundleError>]) -> Result<Outcome, String> {
    let mut total = 0;
    let mut failed = Vec::new();
    let mut names = Vec::new();
    for r in reports {
        let r = r.as_ref().map_err(s)?;
        for c in &r.identities {
            total += 1;
            names.push(json!({"class": r.class.key(), "identity": c.name, "pass": c.pass}));
            if !c.pass {
                failed.push(json!({"class": r.class.key(), "identity": c.name, "lhs": c.lhs, "rhs": c.rhs}));
            }
        }
    }
    let ok = failed.is_empty() && total > 0;
    let detail = format!("{} of {total} identities hold exactly", total - failed.len());
    Ok((ok, detail, json!({"identities": names, "failures": failed})))
}

fn identification(reports: &[Result<TransitionReport, bundles::BundleError>]) -> Result<Outcome, String> {
    let mut found = BTreeSet::new();
    let mut lines = Vec::new();
    let mut flags_ok = true;
    let mut witness = Vec::new();
    for r in reports {
        let r = r.as_ref().map_err(s)?;
        let Some(b) = r.bundle else {
            lines.push(format!("{}: no match", r.class.key()));
            flags_ok = false;
            continue;
        };
        found.insert(b);
        let stated = [Some(r.stated_lemma), Some(r.stated_table), bundles::stated_in_comparison(r.class)];
        let disagreements = stated.iter().flatten().filter(|&&x| x != b).count();
        flags_ok &= r.notes.len() == disagreements && r.cocycle_ok && r.det_is_unit;
        lines.push(format!("{} -> {b}", r.class.key()));
        witness.push(json!({
            "class": r.class.key(),
            "bundle": b.to_string(),
            "gamma": r.gamma.to_string(),
            "matches": r.matches.iter().map(|(x, eq)| json!({"reference": x.to_string(), "equivalence": eq})).collect::<Vec<_>>(),
            "notes": r.notes,
        }));
    }
    let catalog: BTreeSet<Reference> = Reference::CATALOG.into_iter().collect();
    let ok = found == catalog && flags_ok;
    let flagged: usize = reports.iter().flatten().map(|r| r.notes.len()).sum();
    let detail = format!("{}; {flagged} prose statements contradicted and flagged", lines.join(", "));
    Ok((ok, detail, json!(witness)))
}

fn ranks(reports: &[Result<TransitionReport, bundles::BundleError>]) -> Result<Outcome, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for cl in WordClass::ALL {
        let want = match cl {
            WordClass::ThickBetween | WordClass::ThickOutside => 1,
            _ => 2,
        };
        let r = bundles::rank(&cl.word());
        let size = reports.iter().flatten().find(|t| t.class == cl).map(|t| t.gamma.size() as u64);
        ok &= r == want && size == Some(want);
        parts.push(format!("{}={r}", cl.key()));
    }
    Ok((ok, parts.join(", "), json!(null)))
}

fn tableaux(parallel: bool) -> Result<Outcome, String> {
    let shapes = [(1, 3), (2, 4), (2, 5)];
    let untwisted = par::map(&shapes, parallel, |&(k, n)| enumerate(k, n, 0, 3, DEFAULT_SEARCH_CAP));
    let mut ok = true;
    let mut parts = Vec::new();
    for ((k, n), e) in shapes.iter().zip(untwisted) {
        let e = e.map_err(s)?;
        let only_zero = e.min_degree == 0 && e.tableaux == vec![MonopoleTableau::zero(*k, *n)];
        ok &= only_zero;
        parts.push(format!("({k},{n}) twist 0: {} minimal", e.tableaux.len()));
    }
    let one = enumerate(2, 4, 1, 3, DEFAULT_SEARCH_CAP).map_err(s)?;
    let two = enumerate(2, 4, 2, 3, DEFAULT_SEARCH_CAP).map_err(s)?;
    let weyl = weyl_dim(2, 2, 4);
    ok &= one.tableaux.len() == 6 && two.tableaux.len() == 20 && weyl == 20;
    parts.push(format!("(2,4) twist 1: {}, twist 2: {} (Weyl dimension {weyl})", one.tableaux.len(), two.tableaux.len()));
    Ok((ok, parts.join("; "), json!(null)))
}

fn k1() -> Result<Outcome, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=4usize {
        let up: Vec<String> = (1..n).map(|i| i.to_string()).collect();
        let down: Vec<String> = (1..n).rev().map(|i| i.to_string()).collect();
        let w0 = Word::parse(&format!("R1 {} R{}", up.join(" "), n - 1)).map_err(s)?;
        let w1 = Word::parse(&format!("R1 R{} {}", n - 1, down.join(" "))).map_err(s)?;
        let (a, b) = (k1_classify(&w0, n).map_err(s)?, k1_classify(&w1, n).map_err(s)?);
        let census = k1_census(n).map_err(s)?;
        ok &= a.a_prime == 0 && a.valid && b.a_prime as usize == n - 1 && b.valid;
        ok &= census.len() == n && census.iter().all(|&m| m > 0);
        if n == 2 {
            ok &= census == [1, 1];
        }
        parts.push(format!("n={n}: a' = {} and {}, census {census:?}", a.a_prime, b.a_prime));
    }
    Ok((ok, parts.join("; "), json!(null)))
}

fn sl2(parallel: bool) -> Result<Outcome, String> {
    let c = Coulomb::new(4, 2, Mode::Deformed).map_err(s)?;
    let reports = par::map(&[1usize, 2, 3], parallel, |&i| c.verify_sl2(i));
    let mut ok = true;
    let mut passed = 0;
    let mut witness = Vec::new();
    for r in reports {
        let r = r.map_err(s)?;
        ok &= r.pass();
        passed += r.checks.iter().filter(|c| c.pass).count();
        if !r.pass() {
            witness.push(serde_json::to_value(&r).map_err(s)?);
        }
    }
    Ok((ok, format!("i = 1, 2, 3: {passed} bracket relations hold, H_i nonzero"), json!(witness)))
}

fn properties(scale: Scale, parallel: bool) -> Result<Outcome, String> {
    let plain = Engine::new(Mode::Plain);
    let deformed = Engine::new(Mode::Deformed);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for p in Property::ALL {
        let seeds: Vec<u64> = (0..scale.cases(p)).collect();
        let bad = props::run(p, &plain, &deformed, &seeds, parallel);
        ok &= bad.is_empty();
        parts.push(format!("{} {}/{}", p.name(), seeds.len() - bad.len(), seeds.len()));
        failures.extend(bad.into_iter().map(|(seed, m)| json!({"property": p.name(), "seed": seed, "message": m})));
    }
    Ok((ok, parts.join(", "), if failures.is_empty() { json!(null) } else { json!(failures) }))
}

fn golden() -> Result<Outcome, String> {
    let set = GoldenSet::load().map_err(s)?;
    let engine = Engine::new(Mode::Plain);
    let matches = validate_golden(&set, Some(&engine)).map_err(s)?;
    let passed = matches.iter().filter(|m| m.pass()).count();
    let loose: Vec<&str> = matches.iter().filter(|m| !m.figure_tight).map(|m| m.name.as_str()).collect();
    let ok = passed == matches.len() && !matches.is_empty();
    let detail = format!(
        "{passed} of {} generator figures rebuilt (the criterion names fourteen); figures with removable crossings: {}",
        matches.len(),
        if loose.is_empty() { "none".to_string() } else { loose.join(", ") }
    );
    let failures: Vec<_> = matches.iter().filter(|m| !m.pass()).collect();
    Ok((ok, detail, if failures.is_empty() { json!(null) } else { json!(failures) }))
}

/// Runs every criterion in order.
pub fn run_all(scale: Scale, parallel: bool) -> Report {
    let start = Instant::now();
    let mut report = Report::new("selftest")
        .input("scale", if scale == Scale::Full { "full" } else { "quick" })
        .input("parallel", parallel && par::AVAILABLE);
    report.push(timed(1, plucker));
    let c = Coulomb::new(4, 2, Mode::Plain).expect("Gr(2,4) setup");
    let mut reports = Vec::new();
    report.push(timed(2, || {
        reports = par::map(&WordClass::ALL, parallel, |&cl| bundles::verify_transitions(&c, cl));
        transitions(&reports)
    }));
    report.push(timed(3, || identification(&reports)));
    report.push(timed(4, || ranks(&reports)));
    report.push(timed(5, || tableaux(parallel)));
    report.push(timed(6, k1));
    report.push(timed(7, || sl2(parallel)));
    report.push(timed(8, || properties(scale, parallel)));
    report.push(timed(9, golden));
    report.settle();
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// One line per criterion.
pub fn summary_lines(r: &Report) -> Vec<String> {
    r.checks.iter().map(|c| format!("{} [{}] {:.2} s: {}", c.name, c.status.label(), c.seconds, c.detail)).collect()
}
