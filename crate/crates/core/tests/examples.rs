use cylklrw::bundles::{k1_census, k1_classify};
use cylklrw::coulomb::{coulomb_idempotent, Coulomb, Sign};
use cylklrw::diagram::{RawDiagram, Violation, Word};
use cylklrw::golden::GoldenSet;
use cylklrw::gradings::{element_gradings, scaling_degree, twist_degree, winding_vector};
use cylklrw::normal::Engine;
use cylklrw::operator::Mode;
use cylklrw::plucker::{cocycles_equivalent, reduce_poly, reference_cocycle, Cocycle2, PluckerPoly, Reference};
use cylklrw::tableau::enumerate_min_tableaux;

fn raw(w: &str, e: &str) -> RawDiagram {
    RawDiagram::parse(w, e).unwrap()
}

fn golden(name: &str) -> RawDiagram {
    GoldenSet::embedded().get(name).unwrap().clone()
}

#[test]
fn join_then_split_is_a_crossing() {
    let eng = Engine::new(Mode::Plain);
    let joined = raw("2 2", "m1; s1");
    assert_eq!(eng.reduce(&joined).unwrap(), eng.reduce(&raw("2 2", "x1")).unwrap());
}

#[test]
fn stacking_idempotents() {
    let e = RawDiagram::identity(Word::parse("R2 1 2(2) 3 R2").unwrap());
    let ee = e.then(&e).unwrap();
    let eng = Engine::new(Mode::Plain);
    assert_eq!(eng.reduce(&ee).unwrap(), eng.reduce(&e).unwrap());
    let small = Word::parse("R1 1 R1").unwrap();
    let i = eng.idempotent(&small).unwrap();
    assert_eq!(eng.multiply(&i, &i).unwrap(), i);
}

#[test]
fn stacked_plucker_diagrams_add_gradings() {
    let d = golden("D13").then(&golden("D24")).unwrap();
    assert_eq!(twist_degree(&d), 2);
    assert_eq!(winding_vector(&d, 3), vec![1, 2, 1]);
    assert!(d.validate().is_empty());
}

#[test]
fn validation_findings() {
    assert!(raw("R2 1 2(2) 3 R2", "").validate().is_empty());
    assert!(raw("R2 R2", "x1; x1").validate().contains(&Violation::RedBigon));
    assert!(matches!(raw("R2 1", "d1").validate()[..], [Violation::DotOnRed { .. }]));
}

#[test]
fn scaling_degrees() {
    assert_eq!(scaling_degree(&raw("1", "d1")).unwrap(), 2);
    assert_eq!(scaling_degree(&raw("2 2", "x1")).unwrap(), -2);
    assert_eq!(scaling_degree(&raw("R2 1 R2", "x2")).unwrap(), 0);
    // a single crossing of the two reds, one turn of the left one
    assert_eq!(scaling_degree(&raw("R2 R2", "x1; r")).unwrap(), -2);
}

#[test]
fn plucker_windings_and_degrees() {
    let table = [
        ("D12", [1, 2, 1]),
        ("D13", [1, 1, 1]),
        ("D14", [1, 1, 0]),
        ("D23", [0, 1, 1]),
        ("D24", [0, 1, 0]),
        ("D34", [0, 0, 0]),
    ];
    for (name, w) in table {
        let d = golden(name);
        assert_eq!(winding_vector(&d, 3), w, "{name}");
        assert_eq!(scaling_degree(&d).unwrap(), 0, "{name}");
        assert_eq!(twist_degree(&d), 1, "{name}");
    }
    assert_eq!(twist_degree(&raw("R2 1 2(2) 3 R2", "")), 0);
}

#[test]
fn tableau_windings_match_plucker_windings() {
    let mut from_tableaux: Vec<Vec<i32>> = enumerate_min_tableaux(2, 4, 1, 2).unwrap().iter().map(|t| t.winding()).collect();
    let mut from_diagrams: Vec<Vec<i32>> =
        ["D12", "D13", "D14", "D23", "D24", "D34"].iter().map(|n| winding_vector(&golden(n), 3)).collect();
    from_tableaux.sort();
    from_diagrams.sort();
    assert_eq!(from_tableaux, from_diagrams);
}

#[test]
fn engine_examples() {
    let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
    let eng = &c.engine;
    let e = c.idempotent().unwrap();
    let d = |i, j| c.plucker_d(i, j).unwrap().element;
    assert_eq!(eng.multiply(&e, &d(1, 3)).unwrap(), d(1, 3));
    let rel = eng
        .multiply(&d(1, 2), &d(3, 4))
        .unwrap()
        .sub(&eng.multiply(&d(1, 3), &d(2, 4)).unwrap())
        .add(&eng.multiply(&d(1, 4), &d(2, 3)).unwrap());
    assert!(rel.is_zero());
    let x = eng.reduce(&raw("1 1", "x1")).unwrap();
    assert!(eng.multiply(&x, &x).unwrap().is_zero());
    for (a, b) in [(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)] {
        let (p, q) = (d(a, b), d(2, 3));
        assert_eq!(eng.multiply(&p, &q).unwrap(), eng.multiply(&q, &p).unwrap());
        let g = element_gradings(&eng.multiply(&p, &q).unwrap(), 3);
        assert!(g.iter().all(|t| t.twist == 2));
    }
}

#[test]
fn deformed_seam_slide() {
    let eng = Engine::new(Mode::Deformed);
    let above = eng.reduce(&raw("1 2", "r; d1")).unwrap();
    let below = eng.reduce(&raw("1 2", "d2; r")).unwrap();
    let diff = above.sub(&below);
    let bare = eng.reduce(&raw("1 2", "r")).unwrap();
    let h = cylklrw::poly::Poly::var(cylklrw::poly::HBAR);
    // dot below the seam = dot above + h, for a strand moving right
    assert!(diff.add(&bare.scale_poly(&h)).is_zero());
    assert!(!diff.is_zero());
}

#[test]
fn brackets() {
    let c = Coulomb::new(4, 2, Mode::Deformed).unwrap();
    let eng = &c.engine;
    let ch = |i, s| c.chevalley(i, s).unwrap();
    let b = |i| c.bullet(i).unwrap().element;
    assert!(eng.commutator_over_h(&b(1), &b(1)).unwrap().is_zero());
    assert!(eng.poisson(&b(1), &b(2)).unwrap().is_zero());
    let h2 = eng.commutator_over_h(&ch(2, Sign::E), &ch(2, Sign::F)).unwrap();
    assert!(!h2.is_zero());
    let p = eng.poisson(&ch(2, Sign::E), &ch(2, Sign::F)).unwrap();
    let q = eng.poisson(&ch(2, Sign::F), &ch(2, Sign::E)).unwrap();
    assert_eq!(p, q.neg());
    for g in element_gradings(&p, 3) {
        assert_eq!((g.scaling, g.winding, g.twist), (2, vec![0, 0, 0], 0));
    }
    assert!(eng.commutator_over_h(&ch(1, Sign::E), &ch(3, Sign::F)).unwrap().is_zero());
    assert!(eng.poisson(&ch(1, Sign::E), &ch(3, Sign::E)).unwrap().is_zero());
}

#[test]
fn chevalley_gradings_and_sl2() {
    let c = Coulomb::new(4, 2, Mode::Deformed).unwrap();
    let e2 = c.chevalley(2, Sign::E).unwrap();
    let g: Vec<_> = element_gradings(&e2, 3).into_iter().collect();
    assert_eq!(g.len(), 1);
    assert_eq!((g[0].scaling, g[0].winding.clone()), (2, vec![0, 1, 0]));
    let r = c.verify_sl2(2).unwrap();
    assert!(r.pass(), "{r:?}");
}

#[test]
fn coulomb_setups() {
    let s = coulomb_idempotent(7, 2).unwrap();
    assert_eq!(s.quiver.v, vec![1, 2, 2, 2, 2, 1]);
    assert_eq!(s.quiver.w, vec![0, 1, 0, 0, 1, 0]);
    let s = coulomb_idempotent(2, 1).unwrap();
    assert_eq!(s.word.unwrap(), Word::parse("R1 1 R1").unwrap());
    assert_eq!(s.quiver.v, vec![1]);
}

#[test]
fn plucker_reduction() {
    let p = |s: &str| PluckerPoly::parse(s).unwrap();
    assert_eq!(reduce_poly(&p("e14*e23")), p("e13*e24 - e12*e34"));
    assert!(reduce_poly(&p("e12*e34 - e13*e24 + e14*e23")).is_zero());
    assert_eq!(reduce_poly(&p("e12*e13")).to_string(), "e12*e13");
}

#[test]
fn reference_matching() {
    let t = reference_cocycle(Reference::T);
    let tp = reference_cocycle(Reference::Tperp);
    assert!(cocycles_equivalent(&t, &t).unwrap().is_equivalent());
    assert!(!cocycles_equivalent(&t, &tp).unwrap().is_equivalent());
    let s = Cocycle2::parse("1, 0; 0, -1").unwrap();
    let conj = s.mul(&t).unwrap().mul(&s).unwrap();
    assert!(cocycles_equivalent(&conj, &t).unwrap().is_equivalent());
    assert_eq!(reference_cocycle(Reference::L(2)), Cocycle2::parse("e13^2/e24^2").unwrap());
}

#[test]
fn k1_words() {
    for n in 2..=5 {
        let up: Vec<String> = (1..n).map(|i| i.to_string()).collect();
        let w = Word::parse(&format!("R1 {} R{}", up.join(" "), n - 1)).unwrap();
        assert_eq!(k1_classify(&w, n).unwrap().exponent, 0);
        let down: Vec<String> = (1..n).rev().map(|i| i.to_string()).collect();
        let w = Word::parse(&format!("R1 R{} {}", n - 1, down.join(" "))).unwrap();
        let r = k1_classify(&w, n).unwrap();
        assert_eq!(r.exponent, -(n as i32 - 1));
        assert!(r.valid);
    }
    assert_eq!(k1_census(2).unwrap(), vec![1, 1]);
    assert!(k1_census(3).unwrap().iter().all(|&m| m > 0));
}
