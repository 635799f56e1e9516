//! Scaling, winding and twist gradings.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagram::{Color, DiagramError, Endpoint, Event, RawDiagram, Word};
use crate::normal::{Element, NormalDiagram};
use crate::poly::{Poly, HBAR};

/// The three gradings of a homogeneous diagram.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GradingTriple {
    pub scaling: i64,
    pub winding: Vec<i32>,
    pub twist: i32,
}

/// Degree of one crossing of thin strands.
pub fn crossing_degree(a: &Endpoint, b: &Endpoint) -> i64 {
    match (a.color, b.color) {
        (Color::Black, Color::Black) => {
            if a.label == b.label {
                -2
            } else if a.label.abs_diff(b.label) == 1 {
                1
            } else {
                0
            }
        }
        (Color::Red, Color::Red) => -(a.label as i64),
        _ => (a.label == b.label) as i64,
    }
}

/// Degree of a crossing of two entries, thick ones counting every thin pair.
fn block_degree(a: &Endpoint, b: &Endpoint) -> i64 {
    let thin = |e: &Endpoint| Endpoint { thickness: 1, ..*e };
    (a.thickness as i64) * (b.thickness as i64) * crossing_degree(&thin(a), &thin(b))
}

/// Scaling degree: dots 2, crossings by labels, each split or merge -1.
pub fn scaling_degree(d: &RawDiagram) -> Result<i64, DiagramError> {
    let mut entries = d.bottom.0.clone();
    let mut deg = 0;
    let bad = |ev: &Event| DiagramError::Invalid(format!("event {ev} does not apply"));
    for ev in &d.events {
        let len = entries.len();
        match *ev {
            Event::Cross(p) => {
                if p == 0 || p > len || len < 2 {
                    return Err(bad(ev));
                }
                let q = if p == len { 1 } else { p + 1 };
                deg += block_degree(&entries[p - 1], &entries[q - 1]);
                if p == len {
                    let last = entries.pop().unwrap();
                    let first = entries.remove(0);
                    entries.insert(0, last);
                    entries.push(first);
                } else {
                    entries.swap(p - 1, p);
                }
            }
            Event::Dot(_) => deg += 2,
            Event::Split(p) => {
                if p == 0 || p > len || entries[p - 1].thickness != 2 {
                    return Err(bad(ev));
                }
                deg -= 1;
                entries[p - 1].thickness = 1;
                entries.insert(p, entries[p - 1]);
            }
            Event::Merge(p) => {
                if p == 0 || p >= len {
                    return Err(bad(ev));
                }
                deg -= 1;
                entries.remove(p);
                entries[p - 1].thickness = 2;
            }
            Event::WrapRight => {
                let last = entries.pop().ok_or_else(|| bad(ev))?;
                entries.insert(0, last);
            }
            Event::WrapLeft => {
                if entries.is_empty() {
                    return Err(bad(ev));
                }
                let first = entries.remove(0);
                entries.push(first);
            }
        }
    }
    Ok(deg)
}

/// Per-label signed seam crossings of black strands.
pub fn winding_vector(d: &RawDiagram, labels: usize) -> Vec<i32> {
    d.trace(labels).winding
}

/// Signed seam crossings of the left red strand.
pub fn twist_degree(d: &RawDiagram) -> i32 {
    d.trace(usize::MAX).twist
}

pub fn grading(d: &RawDiagram, labels: usize) -> Result<GradingTriple, DiagramError> {
    let t = d.trace(labels);
    Ok(GradingTriple { scaling: scaling_degree(d)?, winding: t.winding, twist: t.twist })
}

fn thick_count(w: &Word) -> i64 {
    w.0.iter().filter(|e| e.thickness > 1).count() as i64
}

/// Gradings of a basis diagram sitting inside an element with the given
/// (possibly thick) ends.  A thick end contributes the degree of its split or
/// merge relative to the thin picture.
pub fn normal_grading(nd: &NormalDiagram, bottom: &Word, top: &Word, labels: usize) -> GradingTriple {
    let thin = &nd.bottom;
    let mut scaling = 2 * nd.dots.iter().map(|&a| a as i64).sum::<i64>();
    let n = thin.len();
    // Same count as `Perm::length`, weighted by the labels of each pair.
    let nn = n as i32;
    for i in 1..=nn {
        let fi = nd.perm.0[i as usize - 1];
        for j in 1..=nn {
            let fj = nd.perm.0[j as usize - 1];
            let kmin = if j > i { 0 } else { 1 };
            let kmax = (fi - fj - 1).div_euclid(nn);
            if kmax >= kmin {
                let c = (kmax - kmin + 1) as i64;
                scaling += c * crossing_degree(&thin.0[i as usize - 1], &thin.0[j as usize - 1]);
            }
        }
    }
    scaling += thick_count(top) - thick_count(bottom);
    let mut winding = vec![0; labels];
    let mut twist = 0;
    let mut seen_red = false;
    for b in 1..=n {
        let e = thin.0[b - 1];
        let (_, w) = nd.perm.top(b);
        if e.is_red() {
            if !seen_red {
                twist = w;
                seen_red = true;
            }
        } else if (e.label as usize) >= 1 && (e.label as usize) <= labels {
            winding[e.label as usize - 1] += w;
        }
    }
    GradingTriple { scaling, winding, twist }
}

/// Degree of a coefficient in `Z[h, bL, bR]`: `h` has degree 2, the `b`'s 0.
/// `None` when the coefficient is not homogeneous.
pub fn coefficient_degree(p: &Poly) -> Option<i64> {
    let mut deg = None;
    for (m, _) in p.terms() {
        let d = 2 * m.0[HBAR] as i64;
        match deg {
            None => deg = Some(d),
            Some(e) if e != d => return None,
            _ => {}
        }
    }
    deg
}

/// The gradings occurring in an element, coefficient degrees included.
pub fn element_gradings(e: &Element, labels: usize) -> BTreeSet<GradingTriple> {
    e.terms()
        .iter()
        .map(|(d, c)| {
            let mut g = normal_grading(d, &e.bottom, &e.top, labels);
            g.scaling += coefficient_degree(c).unwrap_or(i64::MIN / 2);
            g
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::Engine;
    use crate::operator::Mode;

    fn raw(w: &str, e: &str) -> RawDiagram {
        RawDiagram::parse(w, e).unwrap()
    }

    #[test]
    fn elementary_degrees() {
        assert_eq!(scaling_degree(&raw("1 1", "d1")).unwrap(), 2);
        assert_eq!(scaling_degree(&raw("1 1", "x1")).unwrap(), -2);
        assert_eq!(scaling_degree(&raw("1 2", "x1")).unwrap(), 1);
        assert_eq!(scaling_degree(&raw("1 3", "x1")).unwrap(), 0);
        assert_eq!(scaling_degree(&raw("2 R2", "x1")).unwrap(), 1);
        assert_eq!(scaling_degree(&raw("R2 R2", "x1")).unwrap(), -2);
        assert_eq!(scaling_degree(&raw("2(2)", "s1; m1")).unwrap(), -2);
    }

    #[test]
    fn seam_crossing_counts_like_any_crossing() {
        assert_eq!(scaling_degree(&raw("1 2 1", "x3")).unwrap(), -2);
        let d = raw("1 2 1", "x3");
        assert_eq!(winding_vector(&d, 2), vec![0, 0]);
    }

    #[test]
    fn normal_form_keeps_gradings() {
        let eng = Engine::new(Mode::Plain);
        for (w, e) in [("1 2 1 R1", "x2; x1; d2; x3; r; x2; d2; x1"), ("R2 1 2(2) 3 R2", "s3; x4; x5; x1; r; x3; x4; x1; x5; r; m3")] {
            let d = raw(w, e);
            let g = grading(&d, 3).unwrap();
            let el = eng.reduce(&d).unwrap();
            for h in element_gradings(&el, 3) {
                assert_eq!(h, g);
            }
        }
    }
}
