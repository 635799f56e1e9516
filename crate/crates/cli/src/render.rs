//! SVG and TikZ pictures of diagrams on the unrolled cylinder.  Strands are
//! drawn on the universal cover and clipped to one period, so a strand
//! leaving through one dashed seam edge comes back through the other.

use std::fmt::Write as _;

use cylklrw::diagram::{Endpoint, Event, RawDiagram};
use cylklrw::normal::Element;

pub const MAX_TERMS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Tikz,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RenderError {
    TooLarge(usize),
    Diagram(String),
}

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenderError::TooLarge(n) => write!(f, "{n} terms; at most {MAX_TERMS} can be drawn"),
            RenderError::Diagram(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Seg {
    from: (f64, f64),
    to: (f64, f64),
    red: bool,
    thick: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct Label {
    x: f64,
    text: String,
    red: bool,
}

/// One diagram in slot units: the period is `width`, rows are one unit high.
#[derive(Clone, Debug, PartialEq)]
struct Picture {
    width: f64,
    height: f64,
    segs: Vec<Seg>,
    dots: Vec<(f64, f64)>,
    bottom: Vec<Label>,
    top: Vec<Label>,
}

fn xs(len: usize, width: f64) -> impl Fn(usize) -> f64 {
    move |p| (p as f64 - 0.5) * width / len as f64
}

fn labels(word: &[Endpoint], width: f64) -> Vec<Label> {
    let x = xs(word.len(), width);
    word.iter().enumerate().map(|(i, e)| Label { x: x(i + 1), text: e.to_string(), red: e.is_red() }).collect()
}

fn picture(d: &RawDiagram) -> Result<Picture, RenderError> {
    let mut word = d.bottom.0.clone();
    let mut widest = word.len();
    {
        let mut w = word.clone();
        for ev in &d.events {
            apply(&mut w, *ev).map_err(RenderError::Diagram)?;
            widest = widest.max(w.len());
        }
    }
    let width = widest as f64;
    let mut pic = Picture {
        width,
        height: d.events.len().max(1) as f64,
        segs: Vec::new(),
        dots: Vec::new(),
        bottom: labels(&word, width),
        top: Vec::new(),
    };
    if d.events.is_empty() {
        let x = xs(word.len(), width);
        for (i, e) in word.iter().enumerate() {
            pic.segs.push(Seg { from: (x(i + 1), 0.0), to: (x(i + 1), 1.0), red: e.is_red(), thick: e.thickness > 1 });
        }
    }
    for (row, ev) in d.events.iter().enumerate() {
        let y = row as f64;
        let before = word.clone();
        apply(&mut word, *ev).map_err(RenderError::Diagram)?;
        let (x0, x1) = (xs(before.len(), width), xs(word.len(), width));
        for (i, j, shift) in moves(before.len(), *ev) {
            let e = before[i - 1];
            let thick = e.thickness > 1 && word[j - 1].thickness == e.thickness;
            let seg = Seg { from: (x0(i), y), to: (x1(j) + shift * width, y + 1.0), red: e.is_red(), thick };
            if shift != 0.0 {
                let back = -shift * width;
                pic.segs.push(Seg { from: (seg.from.0 + back, seg.from.1), to: (seg.to.0 + back, seg.to.1), ..seg.clone() });
            }
            pic.segs.push(seg);
        }
        if let Event::Dot(p) = ev {
            pic.dots.push((x0(*p), y + 0.5));
        }
    }
    pic.top = labels(&word, width);
    Ok(pic)
}

fn apply(w: &mut Vec<Endpoint>, ev: Event) -> Result<(), String> {
    let len = w.len();
    let bad = || format!("event {ev} does not apply to a word of length {len}");
    match ev {
        Event::Cross(p) if p == len && len > 1 => w.swap(0, len - 1),
        Event::Cross(p) if (1..len).contains(&p) => w.swap(p - 1, p),
        Event::Dot(p) if (1..=len).contains(&p) => {}
        Event::Split(p) if (1..=len).contains(&p) && w[p - 1].thickness == 2 => {
            w[p - 1].thickness = 1;
            w.insert(p, w[p - 1]);
        }
        Event::Merge(p) if (1..len).contains(&p) => {
            w.remove(p);
            w[p - 1].thickness = 2;
        }
        Event::WrapRight if len > 0 => w.rotate_right(1),
        Event::WrapLeft if len > 0 => w.rotate_left(1),
        _ => return Err(bad()),
    }
    Ok(())
}

/// For each old position: its new position and the number of periods it
/// moves by.
fn moves(len: usize, ev: Event) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 1..=len {
        match ev {
            Event::Cross(p) if p == len => out.push(match i {
                _ if i == len => (i, 1, 1.0),
                1 => (1, len, -1.0),
                _ => (i, i, 0.0),
            }),
            Event::Cross(p) if i == p => out.push((i, p + 1, 0.0)),
            Event::Cross(p) if i == p + 1 => out.push((i, p, 0.0)),
            Event::Split(p) if i == p => out.extend([(i, p, 0.0), (i, p + 1, 0.0)]),
            Event::Split(p) if i > p => out.push((i, i + 1, 0.0)),
            Event::Merge(p) if i > p => out.push((i, i - 1, 0.0)),
            Event::WrapRight if i == len => out.push((i, 1, 1.0)),
            Event::WrapRight => out.push((i, i + 1, 0.0)),
            Event::WrapLeft if i == 1 => out.push((i, len, -1.0)),
            Event::WrapLeft => out.push((i, i - 1, 0.0)),
            _ => out.push((i, i, 0.0)),
        }
    }
    out
}

struct Panel {
    caption: Option<String>,
    picture: Option<Picture>,
}

pub fn render_diagram(d: &RawDiagram, format: Format) -> Result<String, RenderError> {
    Ok(emit(&[Panel { caption: None, picture: Some(picture(d)?) }], format))
}

/// One panel per term, with its coefficient; the zero element is drawn as an
/// empty placeholder.
pub fn render_element(e: &Element, format: Format) -> Result<String, RenderError> {
    if e.len() > MAX_TERMS {
        return Err(RenderError::TooLarge(e.len()));
    }
    if e.is_zero() {
        return Ok(emit(&[Panel { caption: Some("0".into()), picture: None }], format));
    }
    let mut panels = Vec::new();
    for (d, c) in e.terms() {
        panels.push(Panel { caption: Some(format!("({c})")), picture: Some(picture(&d.raw())?) });
    }
    Ok(emit(&panels, format))
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

const GAP: f64 = 1.5;

fn panel_width(p: &Panel) -> f64 {
    p.picture.as_ref().map_or(2.0, |q| q.width)
}

fn emit(panels: &[Panel], format: Format) -> String {
    match format {
        Format::Svg => svg(panels),
        Format::Tikz => tikz(panels),
    }
}

fn svg(panels: &[Panel]) -> String {
    const SX: f64 = 40.0;
    const SY: f64 = 30.0;
    const M: f64 = 30.0;
    let h = panels.iter().filter_map(|p| p.picture.as_ref()).map(|q| q.height).fold(1.0, f64::max);
    let total: f64 = panels.iter().map(|p| panel_width(p) + GAP).sum::<f64>() - GAP;
    let (w_px, h_px) = (total * SX + 2.0 * M, h * SY + 2.0 * M);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(w_px),
        num(h_px),
        num(w_px),
        num(h_px)
    );
    let mut left = 0.0;
    for (k, p) in panels.iter().enumerate() {
        let pw = panel_width(p);
        let ox = M + left * SX;
        let ph = p.picture.as_ref().map_or(h, |q| q.height);
        let oy = M + (h - ph) * SY / 2.0;
        let px = |x: f64| num(ox + x * SX);
        let py = |y: f64| num(oy + (ph - y) * SY);
        if let Some(c) = &p.caption {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
                px(pw / 2.0),
                num(oy - 16.0),
                escape(c)
            );
        }
        match &p.picture {
            None => {
                let _ = writeln!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
                    px(0.0),
                    py(ph),
                    num(pw * SX),
                    num(ph * SY)
                );
            }
            Some(q) => {
                let _ = writeln!(
                    out,
                    "<clipPath id=\"period{k}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
                    px(0.0),
                    py(q.height),
                    num(q.width * SX),
                    num(q.height * SY)
                );
                let _ = writeln!(out, "<g clip-path=\"url(#period{k})\">");
                for s in &q.segs {
                    let _ = writeln!(
                        out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
                        px(s.from.0),
                        py(s.from.1),
                        px(s.to.0),
                        py(s.to.1),
                        if s.red { "red" } else { "black" },
                        if s.thick { 4 } else { 2 }
                    );
                }
                for &(x, y) in &q.dots {
                    let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"black\"/>", px(x), py(y));
                }
                let _ = writeln!(out, "</g>");
                for x in [0.0, q.width] {
                    let _ = writeln!(
                        out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
                        px(x),
                        py(0.0),
                        px(x),
                        py(q.height)
                    );
                }
                for (labels, y, dy) in [(&q.bottom, 0.0, 14.0), (&q.top, q.height, -6.0)] {
                    for l in labels {
                        let _ = writeln!(
                            out,
                            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{}\">{}</text>",
                            px(l.x),
                            num(oy + (ph - y) * SY + dy),
                            if l.red { "red" } else { "black" },
                            escape(&l.text)
                        );
                    }
                }
            }
        }
        if k + 1 < panels.len() {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">+</text>",
                px(pw + GAP / 2.0),
                num(M + h * SY / 2.0)
            );
        }
        left += pw + GAP;
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tikz_text(s: &str) -> String {
    s.replace('^', "\\^{}").replace('_', "\\_")
}

fn tikz(panels: &[Panel]) -> String {
    let mut out = String::new();
    out.push_str("\\documentclass[tikz]{standalone}\n\\begin{document}\n");
    out.push_str("\\begin{tikzpicture}[x=0.8cm, y=0.6cm]\n");
    let h = panels.iter().filter_map(|p| p.picture.as_ref()).map(|q| q.height).fold(1.0, f64::max);
    let mut left = 0.0;
    for (k, p) in panels.iter().enumerate() {
        let pw = panel_width(p);
        let ph = p.picture.as_ref().map_or(h, |q| q.height);
        let oy = (h - ph) / 2.0;
        let pt = |x: f64, y: f64| format!("({},{})", num(left + x), num(oy + y));
        if let Some(c) = &p.caption {
            let _ = writeln!(out, "  \\node at {} {{{}}};", pt(pw / 2.0, ph + 1.0), tikz_text(c));
        }
        match &p.picture {
            None => {
                let _ = writeln!(out, "  \\draw[gray, dashed] {} rectangle {};", pt(0.0, 0.0), pt(pw, ph));
            }
            Some(q) => {
                out.push_str("  \\begin{scope}\n");
                let _ = writeln!(out, "    \\clip {} rectangle {};", pt(0.0, 0.0), pt(q.width, q.height));
                for s in &q.segs {
                    let style = match (s.red, s.thick) {
                        (true, _) => "red, thick",
                        (false, true) => "black, line width=2pt",
                        (false, false) => "black, thick",
                    };
                    let _ = writeln!(out, "    \\draw[{style}] {} -- {};", pt(s.from.0, s.from.1), pt(s.to.0, s.to.1));
                }
                for &(x, y) in &q.dots {
                    let _ = writeln!(out, "    \\fill {} circle (2.5pt);", pt(x, y));
                }
                out.push_str("  \\end{scope}\n");
                for x in [0.0, q.width] {
                    let _ = writeln!(out, "  \\draw[gray, dashed] {} -- {};", pt(x, 0.0), pt(x, q.height));
                }
                for (labels, y, anchor) in [(&q.bottom, 0.0, "north"), (&q.top, q.height, "south")] {
                    for l in labels {
                        let color = if l.red { "red" } else { "black" };
                        let _ = writeln!(
                            out,
                            "  \\node[{color}, anchor={anchor}, font=\\scriptsize] at {} {{{}}};",
                            pt(l.x, y),
                            tikz_text(&l.text)
                        );
                    }
                }
            }
        }
        if k + 1 < panels.len() {
            let _ = writeln!(out, "  \\node at ({},{}) {{$+$}};", num(left + pw + GAP / 2.0), num(h / 2.0));
        }
        left += pw + GAP;
    }
    out.push_str("\\end{tikzpicture}\n\\end{document}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_vertical() {
        let d = RawDiagram::parse("R2 1 2(2) 3 R2", "").unwrap();
        let p = picture(&d).unwrap();
        assert_eq!(p.segs.len(), 5);
        assert!(p.segs.iter().all(|s| s.from.0 == s.to.0));
        assert_eq!(p.segs.iter().filter(|s| s.red).count(), 2);
        assert_eq!(p.segs.iter().filter(|s| s.thick).count(), 1);
    }

    #[test]
    fn seam_crossings_are_drawn_twice() {
        let d = RawDiagram::parse("1 2", "r").unwrap();
        let p = picture(&d).unwrap();
        assert_eq!(p.segs.len(), 3);
        let outside = |s: &&Seg| s.from.0 < 0.0 || s.to.0 > p.width;
        let wrapped: Vec<_> = p.segs.iter().filter(outside).collect();
        assert_eq!(wrapped.len(), 2);
        assert_eq!(wrapped[0].to.0 - wrapped[1].to.0, -p.width);
    }

    #[test]
    fn split_and_merge() {
        let d = RawDiagram::parse("2(2)", "s1; x1; m1").unwrap();
        let p = picture(&d).unwrap();
        assert_eq!(p.segs.len(), 6);
        assert_eq!(p.bottom[0].text, "2(2)");
        assert_eq!(p.top[0].text, "2(2)");
        assert!(p.segs.iter().all(|s| !s.thick));
    }

    #[test]
    fn numbers_are_short() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-0.0001), "0");
        assert_eq!(num(2.0 / 3.0), "0.667");
    }
}
