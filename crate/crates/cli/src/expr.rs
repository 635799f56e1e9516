//! Expressions over the Coulomb algebra: sums and products of named
//! elements, integers and raw diagrams.  In a product the left factor is
//! stacked on top.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := '-'? factor ('*'? factor)*
//! factor := INT | 'h' | 'bL' | 'bR' | NAME | '[' WORD ';' EVENTS ']' | '(' expr ')'
//! ```
//!
//! Names: `e`, `D12`..`D34`, `b1`.., `E1`.., `F1`.., and any golden entry.

use cylklrw::coulomb::{Coulomb, Sign};
use cylklrw::diagram::{parse_events, parse_word, RawDiagram};
use cylklrw::golden::GoldenSet;
use cylklrw::normal::Element;
use cylklrw::poly::{Poly, BL, BR, HBAR};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(usize),
    Name(String),
    Raw(RawDiagram),
    Neg(Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Product(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at offset {}: {}", self.pos, self.msg)
    }
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { pos, msg: msg.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Raw(RawDiagram),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '(' | ')' => {
                out.push((
                    pos,
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '(' => Tok::Open,
                        _ => Tok::Close,
                    },
                ));
                i += 1;
            }
            '[' => {
                let end = chars[i..].iter().position(|&(_, c)| c == ']').map(|k| i + k);
                let Some(end) = end else { return err(pos, "unclosed '['") };
                let body: String = chars[i + 1..end].iter().map(|&(_, c)| c).collect();
                let d = parse_raw(&body).map_err(|e| ExprError { pos: pos + 1 + e.pos, msg: e.msg })?;
                out.push((pos, Tok::Raw(d)));
                i = end + 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                let n = s.parse().map_err(|_| ExprError { pos, msg: format!("integer {s} too large") })?;
                out.push((pos, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((pos, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
            }
            _ => return err(pos, format!("unexpected {c:?}")),
        }
    }
    Ok(out)
}

/// `WORD; EVENTS` or `word=WORD; events=EVENTS`.
pub fn parse_raw(body: &str) -> Result<RawDiagram, ExprError> {
    let (word, events, ev_at) = match body.split_once(';') {
        Some((w, e)) => (w, e, w.len() + 1),
        None => (body, "", body.len()),
    };
    // Offsets reported by the word and event parsers are relative to the trimmed text.
    let field = |s: &str, at: usize, prefix: &str| {
        let lead = s.len() - s.trim_start().len();
        let t = s.trim_start();
        match t.strip_prefix(prefix) {
            Some(rest) => (rest.to_string(), at + lead + prefix.len() + (rest.len() - rest.trim_start().len())),
            None => (t.to_string(), at + lead),
        }
    };
    let (w, w_at) = field(word, 0, "word=");
    let (e, e_at) = field(events, ev_at, "events=");
    let bottom = parse_word(&w).map_err(|x| ExprError { pos: w_at + x.pos, msg: x.msg })?;
    let evs = parse_events(&e).map_err(|x| ExprError { pos: e_at + x.pos, msg: x.msg })?;
    Ok(RawDiagram::new(bottom, evs))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = Expr::Sum(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = Expr::Diff(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            return Ok(Expr::Neg(Box::new(self.term()?)));
        }
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    factors.push(self.factor()?);
                }
                Some(Tok::Int(_) | Tok::Ident(_) | Tok::Raw(_) | Tok::Open) => factors.push(self.factor()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Product(factors) })
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let pos = self.pos();
        let Some((_, tok)) = self.toks.get(self.at).cloned() else { return err(pos, "expected a factor") };
        self.at += 1;
        match tok {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Raw(d) => Ok(Expr::Raw(d)),
            Tok::Ident(s) => Ok(match s.as_str() {
                "h" => Expr::Var(HBAR),
                "bL" => Expr::Var(BL),
                "bR" => Expr::Var(BR),
                _ => Expr::Name(s),
            }),
            Tok::Open => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return err(self.pos(), "expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            _ => err(pos, "expected a factor"),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return err(p.pos(), "unexpected trailing input");
    }
    Ok(e)
}

/// A scalar in `Z[h, bL, bR]` or an element.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Poly),
    Element(Element),
}

/// Evaluation failure: bad input, or an error from the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Input(String),
    Compute(String),
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Input(s) | EvalError::Compute(s) => write!(f, "{s}"),
        }
    }
}

pub struct Context<'a> {
    pub coulomb: &'a Coulomb,
    pub golden: &'a GoldenSet,
}

fn indexed(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    (!rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())).then(|| rest.parse().ok())?
}

impl Context<'_> {
    /// The raw diagram a name stands for, when it has one.
    pub fn raw_of(&self, name: &str) -> Result<Option<RawDiagram>, EvalError> {
        if let Some(d) = self.golden.get(name) {
            return Ok(Some(d.clone()));
        }
        let input = |e: cylklrw::coulomb::CoulombError| EvalError::Input(e.to_string());
        if name == "e" {
            return Ok(Some(RawDiagram::identity(self.coulomb.word().clone())));
        }
        for (prefix, sign) in [('E', Sign::E), ('F', Sign::F)] {
            if let Some(i) = indexed(name, prefix) {
                return self.coulomb.chevalley_diagram(i, sign).map(Some).map_err(input);
            }
        }
        Ok(None)
    }

    fn name(&self, name: &str) -> Result<Element, EvalError> {
        let c = self.coulomb;
        let input = |e: cylklrw::coulomb::CoulombError| EvalError::Input(format!("{name}: {e}"));
        if let Some(i) = indexed(name, 'b') {
            return c.bullet(i).map(|g| g.element).map_err(input);
        }
        if let Some(ij) = indexed(name, 'D').filter(|v| (12..=34).contains(v)) {
            return c.plucker_d(ij / 10, ij % 10).map(|g| g.element).map_err(input);
        }
        for (prefix, sign) in [('E', Sign::E), ('F', Sign::F)] {
            if let Some(i) = indexed(name, prefix) {
                return c.chevalley(i, sign).map_err(input);
            }
        }
        match self.raw_of(name)? {
            Some(d) => self.reduce(&d),
            None => Err(EvalError::Input(format!("unknown name {name:?}"))),
        }
    }

    pub fn reduce(&self, d: &RawDiagram) -> Result<Element, EvalError> {
        use cylklrw::normal::EngineError;
        self.coulomb.engine.reduce(d).map_err(|e| match e {
            EngineError::Invalid(_) | EngineError::Diagram(_) => EvalError::Input(format!("{d}: {e}")),
            other => EvalError::Compute(other.to_string()),
        })
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        let deformed = self.coulomb.mode().deformed();
        Ok(match e {
            Expr::Int(n) => Value::Scalar(Poly::constant(*n)),
            Expr::Var(v) => {
                if !deformed {
                    return Err(EvalError::Input("h, bL and bR need --mode deformed".into()));
                }
                Value::Scalar(Poly::var(*v))
            }
            Expr::Name(n) => Value::Element(self.name(n)?),
            Expr::Raw(d) => Value::Element(self.reduce(d)?),
            Expr::Neg(x) => match self.eval(x)? {
                Value::Scalar(p) => Value::Scalar(p.neg()),
                Value::Element(a) => Value::Element(a.neg()),
            },
            Expr::Sum(a, b) => add(self.eval(a)?, self.eval(b)?)?,
            Expr::Diff(a, b) => {
                let b = match self.eval(b)? {
                    Value::Scalar(p) => Value::Scalar(p.neg()),
                    Value::Element(x) => Value::Element(x.neg()),
                };
                add(self.eval(a)?, b)?
            }
            Expr::Product(fs) => {
                let mut scalar = Poly::one();
                let mut elems = Vec::new();
                for f in fs {
                    match self.eval(f)? {
                        Value::Scalar(p) => scalar = scalar.mul(&p),
                        Value::Element(x) => elems.push(x),
                    }
                }
                if elems.is_empty() {
                    return Ok(Value::Scalar(scalar));
                }
                for pair in elems.windows(2) {
                    if pair[0].bottom != pair[1].top {
                        return Err(EvalError::Input(format!(
                            "cannot stack: bottom {} under top {}",
                            pair[1].top, pair[0].bottom
                        )));
                    }
                }
                let refs: Vec<&Element> = elems.iter().collect();
                let prod = self.coulomb.engine.multiply_all(&refs).map_err(|e| EvalError::Compute(e.to_string()))?;
                Value::Element(prod.scale_poly(&scalar))
            }
        })
    }

    /// Evaluates to an element; a bare scalar is read as a multiple of `e`.
    pub fn element(&self, e: &Expr) -> Result<Element, EvalError> {
        match self.eval(e)? {
            Value::Element(x) => Ok(x),
            Value::Scalar(p) => Ok(self.name("e")?.scale_poly(&p)),
        }
    }
}

fn add(a: Value, b: Value) -> Result<Value, EvalError> {
    match (a, b) {
        (Value::Scalar(p), Value::Scalar(q)) => Ok(Value::Scalar(p.add(&q))),
        (Value::Element(x), Value::Element(y)) => {
            if x.bottom != y.bottom || x.top != y.top {
                return Err(EvalError::Input(format!(
                    "cannot add elements {} -> {} and {} -> {}",
                    x.bottom, x.top, y.bottom, y.top
                )));
            }
            Ok(Value::Element(x.add(&y)))
        }
        _ => Err(EvalError::Input("cannot add a scalar to an element; multiply by e".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cylklrw::operator::Mode;

    #[test]
    fn precedence_and_juxtaposition() {
        let e = parse("D12*D34 - D13 D24 + 2 D14*D23").unwrap();
        let Expr::Sum(left, right) = e else { panic!() };
        assert!(matches!(*left, Expr::Diff(..)));
        assert_eq!(*right, Expr::Product(vec![Expr::Int(2), Expr::Name("D14".into()), Expr::Name("D23".into())]));
    }

    #[test]
    fn raw_diagrams_in_brackets() {
        let e = parse("[1 1; x1; x1]").unwrap();
        assert_eq!(e, Expr::Raw(RawDiagram::parse("1 1", "x1; x1").unwrap()));
        let e = parse("[word=R2 1 R2; events=x2]").unwrap();
        assert_eq!(e, Expr::Raw(RawDiagram::parse("R2 1 R2", "x2").unwrap()));
    }

    #[test]
    fn errors_point_at_the_input() {
        assert_eq!(parse("D12 + ").unwrap_err().pos, 6);
        assert_eq!(parse("D12 ) ").unwrap_err().pos, 4);
        assert_eq!(parse("[1 1; x1").unwrap_err().pos, 0);
        assert_eq!(parse("D12 $").unwrap_err().pos, 4);
        assert_eq!(parse("[1 1; x1; q2]").unwrap_err().pos, 10);
        assert_eq!(parse("[1 1(2; x1]").unwrap_err().pos, 6);
    }

    #[test]
    fn plucker_relation_evaluates_to_zero() {
        let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
        let ctx = Context { coulomb: &c, golden: GoldenSet::embedded() };
        let z = ctx.element(&parse("D12*D34 - D13*D24 + D14*D23").unwrap()).unwrap();
        assert!(z.is_zero());
        let x = ctx.element(&parse("3").unwrap()).unwrap();
        assert_eq!(x, ctx.element(&parse("e + e + e").unwrap()).unwrap());
        assert!(matches!(ctx.element(&parse("h*e").unwrap()), Err(EvalError::Input(_))));
        assert!(matches!(ctx.element(&parse("e + 1").unwrap()), Err(EvalError::Input(_))));
    }

    #[test]
    fn left_factor_is_on_top() {
        let c = Coulomb::new(4, 2, Mode::Plain).unwrap();
        let ctx = Context { coulomb: &c, golden: GoldenSet::embedded() };
        let a = ctx.element(&parse("D13 * b2").unwrap()).unwrap();
        let d = c.plucker_d(1, 3).unwrap().element;
        let b = c.bullet(2).unwrap().element;
        assert_eq!(a, c.engine.multiply(&d, &b).unwrap());
    }
}
