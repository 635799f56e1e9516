//! The `cylklrw` command line: reductions, gradings, tableaux, verification
//! suites and pictures, each producing a [`report::Report`].

pub mod acceptance;
pub mod expr;
pub mod render;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cylklrw::bundles::{self, classify_word, freeness, k1_census, k1_classify, validate_golden, Patch, WordClass};
use cylklrw::coulomb::Coulomb;
use cylklrw::diagram::Word;
use cylklrw::golden::GoldenSet;
use cylklrw::gradings::{element_gradings, grading, GradingTriple};
use cylklrw::normal::{Element, Engine};
use cylklrw::operator::Mode;
use cylklrw::plucker::{plucker_relation, reduce_poly};
use cylklrw::tableau::{enumerate, tableau_degree, MonopoleTableau, DEFAULT_SEARCH_CAP};

use expr::{Context, EvalError, Expr};
use report::{Check, Report, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Deformed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Svg,
    Tikz,
}

#[derive(Debug, Parser)]
#[command(name = "cylklrw", version, about = "Cylindrical KLRW algebras: normal forms, gradings and bundle checks")]
pub struct Cli {
    /// Plain algebra or its one-parameter deformation.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub mode: ModeArg,
    /// Emit the JSON report (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Emit a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Log reduction steps to stderr.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Grassmannian Gr(k, n).
    #[arg(long, global = true, default_value_t = 4)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub k: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of an expression.
    Reduce {
        #[arg(long)]
        expr: String,
    },
    /// Product of expressions, the first on top.
    Multiply {
        #[arg(required = true, num_args = 2..)]
        factors: Vec<String>,
    },
    /// Scaling degree, winding vector and twist of an expression.
    Degree {
        #[arg(long)]
        expr: String,
    },
    /// Minimal-degree monopole tableaux, or the degree of one tableau.
    Tableau {
        #[arg(long, default_value_t = 0)]
        twist: i32,
        #[arg(long, default_value_t = 3)]
        window: i32,
        /// Rows of a single tableau, e.g. "0 1; 1 1".
        #[arg(long)]
        rows: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u128,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Word class of an idempotent, or the line bundle of a k = 1 word.
    Classify {
        #[arg(long)]
        word: String,
    },
    /// Picture of an expression.
    Render {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "svg")]
        format: FormatArg,
        /// Draw the normal form even when the expression names a single diagram.
        #[arg(long)]
        normal: bool,
    },
    /// The full acceptance suite.
    Selftest {
        /// A tenth of the property cases.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// D12 D34 - D13 D24 + D14 D23 = 0.
    Plucker,
    /// Transition identities and bundle identification.
    Transitions {
        /// Class key, e.g. 21223, or any word in the class.
        #[arg(long)]
        word: Option<String>,
    },
    /// The sl2 relations in the deformed algebra.
    Sl2 {
        #[arg(long)]
        i: Option<usize>,
    },
    /// Line bundles of the k = 1 words for the global --n.
    K1,
    /// Rebuild the generator figures of the golden set.
    Golden,
    /// Independence of the rank-two generators on each patch.
    Freeness {
        #[arg(long)]
        word: Option<String>,
        #[arg(long = "twist", default_value_t = 2)]
        twist: i32,
    },
}

/// A failure before any check ran.
#[derive(Debug)]
enum Abort {
    Usage(String),
    Compute(String),
}

impl From<EvalError> for Abort {
    fn from(e: EvalError) -> Abort {
        match e {
            EvalError::Input(s) => Abort::Usage(s),
            EvalError::Compute(s) => Abort::Compute(s),
        }
    }
}

fn usage<E: ToString>(e: E) -> Abort {
    Abort::Usage(e.to_string())
}

fn compute<E: ToString>(e: E) -> Abort {
    Abort::Compute(e.to_string())
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Plain => Mode::Plain,
        ModeArg::Deformed => Mode::Deformed,
    }
}

fn engine(cli: &Cli, mode: Mode) -> Engine {
    let e = Engine::new(mode);
    if cli.trace {
        e.with_trace(Box::new(std::io::stderr()))
    } else {
        e
    }
}

fn coulomb(cli: &Cli, mode: Mode) -> Result<Coulomb, Abort> {
    Coulomb::with_engine(cli.n, cli.k, engine(cli, mode)).map_err(usage)
}

fn parse_expr(src: &str) -> Result<Expr, Abort> {
    expr::parse(src).map_err(|e| Abort::Usage(format!("expression {src:?}: {e}")))
}

fn triple_json(g: &GradingTriple) -> Value {
    json!({"scaling": g.scaling, "winding": g.winding, "twist": g.twist})
}

fn element_result(e: &Element, labels: usize) -> Value {
    let grades: Vec<Value> = element_gradings(e, labels).iter().map(triple_json).collect();
    json!({"text": e.to_string(), "normal_form": e.to_json(), "gradings": grades})
}

/// Output of a subcommand: a report, or a document printed as is.
enum Output {
    Report(Report),
    Document(String),
}

fn run_command(cli: &Cli) -> Result<Output, Abort> {
    let mode = mode_of(cli.mode);
    let labels = cli.n.saturating_sub(1);
    let golden = GoldenSet::load().map_err(usage)?;
    let base = |cmd: &str| Report::new(cmd).input("mode", format!("{:?}", mode).to_lowercase());
    Ok(Output::Report(match &cli.command {
        Command::Reduce { expr } => {
            let c = coulomb(cli, mode)?;
            let ctx = Context { coulomb: &c, golden: &golden };
            let e = ctx.element(&parse_expr(expr)?)?;
            let mut r = base("reduce").input("expr", expr.as_str());
            r.result = element_result(&e, labels);
            r
        }
        Command::Multiply { factors } => {
            let c = coulomb(cli, mode)?;
            let ctx = Context { coulomb: &c, golden: &golden };
            let parsed = factors.iter().map(|f| parse_expr(f)).collect::<Result<Vec<_>, _>>()?;
            let e = ctx.element(&Expr::Product(parsed))?;
            let mut r = base("multiply").input("factors", factors.clone());
            r.result = element_result(&e, labels);
            r
        }
        Command::Degree { expr } => {
            let c = coulomb(cli, mode)?;
            let ctx = Context { coulomb: &c, golden: &golden };
            let parsed = parse_expr(expr)?;
            let single = match &parsed {
                Expr::Raw(d) => Some(d.clone()),
                Expr::Name(n) => ctx.raw_of(n)?,
                _ => None,
            };
            let mut r = base("degree").input("expr", expr.as_str());
            match single {
                Some(d) => {
                    let g = grading(&d, labels).map_err(usage)?;
                    r.result = triple_json(&g);
                }
                None => {
                    let e = ctx.element(&parsed)?;
                    let gs: Vec<GradingTriple> = element_gradings(&e, labels).into_iter().collect();
                    match gs.as_slice() {
                        [g] => r.result = triple_json(g),
                        [] => r.push(Check::new("homogeneous", Status::Inconclusive, "the zero element has every degree")),
                        _ => {
                            r.push(Check::new("homogeneous", Status::Fail, format!("{} distinct gradings", gs.len())));
                            r.result = json!(gs.iter().map(triple_json).collect::<Vec<_>>());
                        }
                    }
                }
            }
            r
        }
        Command::Tableau { twist, window, rows, cap } => {
            let mut r = base("tableau").input("k", cli.k).input("n", cli.n).input("twist", *twist);
            match rows {
                Some(text) => {
                    let rows: Vec<Vec<i32>> = text
                        .split(';')
                        .map(|row| row.split_whitespace().map(|x| x.parse::<i32>().map_err(usage)).collect())
                        .collect::<Result<_, _>>()?;
                    let t = MonopoleTableau { k: cli.k, n: cli.n, rows };
                    t.validate().map_err(usage)?;
                    let d = tableau_degree(&t, *twist).map_err(usage)?;
                    r = r.input("rows", text.as_str());
                    r.result = json!({"degree": d, "winding": t.winding(), "diagonals": t.diagonals()});
                }
                None => {
                    let e = enumerate(cli.k, cli.n, *twist, *window, *cap).map_err(usage)?;
                    r = r.input("window", *window);
                    r.result = serde_json::to_value(&e).map_err(compute)?;
                }
            }
            r
        }
        Command::Verify { suite } => verify(cli, suite, &golden)?,
        Command::Classify { word } => {
            let w = Word::parse(word).map_err(usage)?;
            let mut r = base("classify").input("word", word.as_str());
            match classify_word(&w) {
                Ok(cl) => {
                    let names: Vec<String> = cl.summands().iter().map(|c| c.to_string()).collect();
                    r.result = json!({"classification": cl, "summands": names, "rank": bundles::rank(&w)});
                }
                Err(first) => {
                    let n = w.len().saturating_sub(1);
                    let rep = k1_classify(&w, n).map_err(|e| Abort::Usage(format!("{first}; as a k = 1 word: {e}")))?;
                    r.push(Check::new("witness", Status::of(rep.valid), format!("twist {}", rep.twist)));
                    r.result = json!({
                        "n": n,
                        "a_prime": rep.a_prime,
                        "line_bundle": format!("O({})", rep.exponent),
                        "witness": rep.witness.to_string(),
                    });
                }
            }
            r
        }
        Command::Render { expr, format, normal } => {
            let c = coulomb(cli, mode)?;
            let ctx = Context { coulomb: &c, golden: &golden };
            let parsed = parse_expr(expr)?;
            let fmt = match format {
                FormatArg::Svg => render::Format::Svg,
                FormatArg::Tikz => render::Format::Tikz,
            };
            let single = match (&parsed, normal) {
                (Expr::Raw(d), false) => Some(d.clone()),
                (Expr::Name(n), false) => ctx.raw_of(n)?,
                _ => None,
            };
            let doc = match single {
                Some(d) => render::render_diagram(&d, fmt),
                None => render::render_element(&ctx.element(&parsed)?, fmt),
            }
            .map_err(usage)?;
            return Ok(Output::Document(doc));
        }
        Command::Selftest { quick, sequential } => {
            let scale = if *quick { acceptance::Scale::Quick } else { acceptance::Scale::Full };
            acceptance::run_all(scale, !sequential)
        }
    }))
}

fn class_of(text: &str) -> Result<WordClass, Abort> {
    if let Some(c) = WordClass::from_key(text) {
        return Ok(c);
    }
    let w = Word::parse(text).map_err(usage)?;
    match classify_word(&w).map_err(usage)? {
        bundles::Classification::Single(c) => Ok(c),
        other => Err(Abort::Usage(format!("{text} splits as {other:?}; pass one class"))),
    }
}

fn verify(cli: &Cli, suite: &Suite, golden: &GoldenSet) -> Result<Report, Abort> {
    Ok(match suite {
        Suite::Plucker => {
            let c = Coulomb::with_engine(4, 2, engine(cli, mode_of(cli.mode))).map_err(usage)?;
            let ctx = Context { coulomb: &c, golden };
            let rel = ctx.element(&parse_expr("D12*D34 - D13*D24 + D14*D23")?)?;
            let mut r = Report::new("verify plucker").input("mode", format!("{:?}", c.mode()).to_lowercase());
            let mut check = Check::new("D12 D34 - D13 D24 + D14 D23 = 0", Status::of(rel.is_zero()), "exact");
            if !rel.is_zero() {
                check = check.with_witness(json!({"lhs": rel.to_json(), "rhs": "0"}));
            }
            r.push(check);
            let p = reduce_poly(&plucker_relation());
            r.push(Check::new("e12 e34 - e13 e24 + e14 e23 = 0 in the coordinate ring", Status::of(p.is_zero()), p.to_string()));
            r
        }
        Suite::Transitions { word } => {
            let classes = match word {
                Some(w) => vec![class_of(w)?],
                None => WordClass::ALL.to_vec(),
            };
            let c = Coulomb::with_engine(4, 2, engine(cli, Mode::Plain)).map_err(usage)?;
            let mut r = Report::new("verify transitions")
                .input("classes", classes.iter().map(|c| c.key()).collect::<Vec<_>>())
                .input("mode", "plain");
            let mut results = Vec::new();
            for rep in bundles::verify_all(&c, &classes) {
                let rep = rep.map_err(compute)?;
                for id in &rep.identities {
                    let mut check = Check::new(format!("{}: {}", rep.class.key(), id.name), Status::of(id.pass), "");
                    if !id.pass {
                        check = check.with_witness(json!({"lhs": id.lhs, "rhs": id.rhs}));
                    }
                    r.push(check);
                }
                r.push(Check::new(
                    format!("{}: cocycle", rep.class.key()),
                    Status::of(rep.cocycle_ok && rep.det_is_unit),
                    format!("gamma = {}, det = {}", rep.gamma, rep.det),
                ));
                // Disagreements with the prose are reported, not failed.
                let named = match rep.bundle {
                    Some(b) => {
                        let detail = std::iter::once(b.to_string()).chain(rep.notes.iter().cloned()).collect::<Vec<_>>();
                        Check::new(format!("{}: bundle", rep.class.key()), Status::Pass, detail.join("; "))
                    }
                    None => Check::new(format!("{}: bundle", rep.class.key()), Status::Fail, "no reference matches"),
                };
                r.push(named);
                results.push(serde_json::to_value(&rep).map_err(compute)?);
            }
            r.result = json!(results);
            r
        }
        Suite::Sl2 { i } => {
            let c = Coulomb::with_engine(cli.n, cli.k, engine(cli, Mode::Deformed)).map_err(usage)?;
            let which: Vec<usize> = match i {
                Some(i) => vec![*i],
                None => (1..=c.labels()).collect(),
            };
            let mut r = Report::new("verify sl2").input("n", cli.n).input("k", cli.k).input("mode", "deformed");
            for i in which {
                let rep = c.verify_sl2(i).map_err(usage)?;
                r.push(Check::new(format!("H{i} nonzero"), Status::of(!rep.h_is_zero), format!("{} terms", rep.h_terms)));
                for ch in rep.checks {
                    let mut check = Check::new(ch.name, Status::of(ch.pass), "");
                    if !ch.pass {
                        check = check.with_witness(json!({"lhs": ch.lhs, "rhs": ch.rhs}));
                    }
                    r.push(check);
                }
            }
            r
        }
        Suite::K1 => {
            let n = cli.n;
            if n < 2 {
                return Err(Abort::Usage("k = 1 words need n >= 2".into()));
            }
            let up: Vec<String> = (1..n).map(|i| i.to_string()).collect();
            let down: Vec<String> = (1..n).rev().map(|i| i.to_string()).collect();
            let mut r = Report::new("verify k1").input("n", n);
            for (text, want) in [
                (format!("R1 {} R{}", up.join(" "), n - 1), 0),
                (format!("R1 R{} {}", n - 1, down.join(" ")), n as u32 - 1),
            ] {
                let w = Word::parse(&text).map_err(usage)?;
                let rep = k1_classify(&w, n).map_err(usage)?;
                r.push(
                    Check::new(
                        format!("a'({text}) = {want}"),
                        Status::of(rep.a_prime == want && rep.valid),
                        format!("a' = {}, witness twist {}", rep.a_prime, rep.twist),
                    )
                    .with_witness(json!(rep.witness.to_string())),
                );
            }
            let census = k1_census(n).map_err(usage)?;
            r.push(Check::new("every exponent realized", Status::of(census.iter().all(|&m| m > 0)), format!("{census:?}")));
            r.result = json!({"census": census});
            r
        }
        Suite::Golden => {
            let e = engine(cli, Mode::Plain);
            let matches = validate_golden(golden, Some(&e)).map_err(compute)?;
            let mut r = Report::new("verify golden").input("figures", matches.len());
            for m in &matches {
                let detail = if m.figure_tight { String::new() } else { "figure has removable crossings".into() };
                let mut check = Check::new(m.name.as_str(), Status::of(m.pass()), detail);
                if !m.pass() {
                    check = check.with_witness(serde_json::to_value(m).map_err(compute)?);
                }
                r.push(check);
            }
            r
        }
        Suite::Freeness { word, twist } => {
            let classes = match word {
                Some(w) => vec![class_of(w)?],
                None => WordClass::ALL.iter().copied().filter(|c| c.rank() == 2).collect(),
            };
            let c = Coulomb::with_engine(4, 2, engine(cli, Mode::Plain)).map_err(usage)?;
            let mut r = Report::new("verify freeness").input("twist", *twist);
            for cl in classes {
                for patch in [Patch::P13, Patch::P24] {
                    let f = freeness(&c, cl, patch, *twist).map_err(usage)?;
                    let ok = f.independent_at_k && f.independent_at_k_plus_1;
                    let mut check = Check::new(format!("{}: patch {}", cl.key(), patch.number()), Status::of(ok), "");
                    if let Some(rel) = f.relation {
                        check = check.with_witness(json!(rel));
                    }
                    r.push(check);
                }
            }
            r
        }
    })
}

/// Runs the command line `args` (program name first), writing the output to
/// `out` and diagnostics to `err`.  Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let start = Instant::now();
    let (text, code) = match run_command(&cli) {
        Ok(Output::Document(doc)) => (doc, 0),
        Ok(Output::Report(mut r)) => {
            r.settle();
            if r.seconds == 0.0 {
                r.seconds = start.elapsed().as_secs_f64();
            }
            let text = if cli.text {
                r.to_text()
            } else {
                serde_json::to_string_pretty(&r.to_json()).expect("json") + "\n"
            };
            (text, r.exit_code())
        }
        Err(Abort::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
        Err(Abort::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 1;
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return 2;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    code
}

/// [`run_with`] on stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
