//! Command-line front end. Each subcommand emits one report, as JSON or as
//! text, and exits with a status that carries the verdict:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | positive (holds, primitive normal, clean sweep) |
//! | 1 | negative (fails, violation found, discrepancies) |
//! | 2 | inapplicable, rejected input, or usage/I-O error |
//! | 4 | the two oracles of `act-check --oracle both` disagree |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::act::{parse_act, regular_part, regular_part_by_subacts, write_act, Act, ActFileError, MonoidSource, Point};
use crate::deciders::{
    build_counterexample, check_r_decomposition, decide_class, idempotent_comparability, is_regularly_linearly_ordered,
    necessity_violation, theorem1_check, ClassDecision, ClassWitness, CriterionWitness, Verdict,
};
use crate::formula::{
    is_copy_normal, parse_formula, parse_formula_with_free, solution_set, CopyNormality, EliminationError, Eliminator,
    Formula, FormulaBounds, ParseError,
};
use crate::monoid::{parse_monoid, Elem, LinearOrder, Monoid, MonoidFileError};
use crate::report::{InputRef, Report};
use crate::testkit::space::search_copy_violation;
use crate::testkit::{run_sweeps, ConfigError, ExperimentConfig};

pub const THREADS_ENV: &str = "REGACTS_THREADS";

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "regacts", version, about = "Primitive normality of regular acts over finite monoids")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, env = THREADS_ENV, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural facts about a monoid.
    Analyze { monoid: PathBuf },
    /// Class-level verdict for a commutative monoid.
    Decide { monoid: PathBuf },
    /// Primitive normality of a single act.
    ActCheck(ActCheckArgs),
    /// Evaluate, check or rewrite a primitive formula.
    #[command(subcommand)]
    Formula(FormulaCommand),
    /// Build the glued act refuting primitive normality from `a ∈ R` and
    /// `b, c ∈ Sa` with incomparable ideals.
    Counterexample(CounterexampleArgs),
    /// Run the cross-validation sweeps described by a TOML config.
    Sweep { config: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Criterion,
    Bruteforce,
    Both,
}

#[derive(Debug, Args)]
pub struct ActCheckArgs {
    pub act: PathBuf,
    /// Monoid file the act must be over.
    #[arg(long)]
    pub monoid: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Oracle::Criterion)]
    pub oracle: Oracle,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

/// Formula space searched by the brute-force oracle.
#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub max_free: usize,
    #[arg(long, default_value_t = 1)]
    pub max_bound: usize,
    #[arg(long, default_value_t = 3)]
    pub max_atoms: usize,
}

#[derive(Debug, Args)]
pub struct FormulaInput {
    /// Formula text, or `@PATH` to read it from a file.
    pub formula: String,
    /// Comma-separated free variables, in order; default is first occurrence.
    #[arg(long, value_delimiter = ',')]
    pub free: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum FormulaCommand {
    /// Solution set, with the trailing free variables fixed to `--params`.
    Eval {
        act: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Whether the copies over the last `--params` free variables are equal
    /// or disjoint.
    NormalCheck {
        act: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        params: usize,
    },
    /// Rewrite a conjunction so that `--x0` occurs in exactly one atom.
    Eliminate {
        monoid: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        x0: String,
        /// Idempotent with `R = eR`; found automatically when omitted.
        #[arg(long)]
        e: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    pub monoid: PathBuf,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub c: String,
    /// Also write the glued act as an act file (with its monoid inline).
    #[arg(long)]
    pub act_out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Monoid { path: PathBuf, source: MonoidFileError },
    #[error("{path}: {source}")]
    Act { path: PathBuf, source: ActFileError },
    #[error("formula: {0}")]
    Formula(#[from] ParseError),
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{0}")]
    Usage(String),
}

/// A finished report: serialized both ways, plus the exit status.
#[derive(Debug, Clone)]
pub struct Output {
    pub code: i32,
    pub json: String,
    pub text: String,
}

impl Output {
    fn new<T: Serialize>(code: i32, report: &Report<T>, text: String) -> Self {
        let mut text = format!("{}: {}\n{}", report.command, report.outcome, text);
        if !text.ends_with('\n') {
            text.push('\n');
        }
        Output { code, json: report.to_json(), text }
    }
}

/// Parses `args` (program name first), runs, writes the report and returns
/// the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_POSITIVE };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: thread count must be positive");
            return EXIT_INVALID;
        }
        // Only fails if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let body = match cli.format {
        Format::Json => &out.json,
        Format::Text => &out.text,
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    out.code
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Analyze { monoid } => analyze(monoid),
        Command::Decide { monoid } => decide(monoid),
        Command::ActCheck(a) => act_check(a),
        Command::Formula(FormulaCommand::Eval { act, input, params }) => formula_eval(act, input, params),
        Command::Formula(FormulaCommand::NormalCheck { act, input, params }) => formula_normal_check(act, input, *params),
        Command::Formula(FormulaCommand::Eliminate { monoid, input, x0, e }) => {
            formula_eliminate(monoid, input, x0, e.as_deref())
        }
        Command::Counterexample(a) => counterexample(a),
        Command::Sweep { config } => sweep(config, cli.threads),
    }
}

// ---- input loading ----

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn utf8(path: &Path, bytes: &[u8]) -> Result<String, CliError> {
    String::from_utf8(bytes.to_vec()).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))
}

fn load_monoid(path: &Path, inputs: &mut Vec<InputRef>, role: &str) -> Result<Arc<Monoid>, CliError> {
    let bytes = read(path)?;
    inputs.push(InputRef::new(role, &bytes));
    let m = parse_monoid(&utf8(path, &bytes)?).map_err(|source| CliError::Monoid { path: path.to_path_buf(), source })?;
    Ok(Arc::new(m))
}

fn load_act(path: &Path, inputs: &mut Vec<InputRef>) -> Result<Act, CliError> {
    let bytes = read(path)?;
    inputs.push(InputRef::new("act", &bytes));
    let base = path.parent().unwrap_or(Path::new("."));
    let (act, source) =
        parse_act(&utf8(path, &bytes)?, base).map_err(|source| CliError::Act { path: path.to_path_buf(), source })?;
    if let MonoidSource::File(p) = source {
        inputs.push(InputRef::new("act-monoid", &read(&base.join(p))?));
    }
    Ok(act)
}

fn load_formula(input: &FormulaInput, m: &Monoid, inputs: &mut Vec<InputRef>) -> Result<Formula, CliError> {
    let text = match input.formula.strip_prefix('@') {
        Some(path) => {
            let path = Path::new(path);
            let bytes = read(path)?;
            inputs.push(InputRef::new("formula", &bytes));
            utf8(path, &bytes)?
        }
        None => {
            inputs.push(InputRef::new("formula-inline", input.formula.as_bytes()));
            input.formula.clone()
        }
    };
    let text = text.trim();
    Ok(if input.free.is_empty() {
        parse_formula(text, m)?
    } else {
        let free: Vec<&str> = input.free.iter().map(String::as_str).collect();
        parse_formula_with_free(text, m, &free)?
    })
}

fn element(m: &Monoid, name: &str) -> Result<Elem, CliError> {
    m.element(name).ok_or_else(|| CliError::Usage(format!("unknown element `{name}`")))
}

fn point(act: &Act, name: &str) -> Result<Point, CliError> {
    act.point(name).ok_or_else(|| CliError::Usage(format!("unknown point `{name}`")))
}

fn names(m: &Monoid, es: impl IntoIterator<Item = Elem>) -> Vec<String> {
    es.into_iter().map(|e| m.name(e).to_string()).collect()
}

fn tuple(act: &Act, t: &[Point]) -> Vec<String> {
    t.iter().map(|&p| act.name(p).to_string()).collect()
}

fn show(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn show_set(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

// ---- analyze ----

#[derive(Debug, Serialize)]
struct Analysis {
    elements: Vec<String>,
    identity: String,
    commutative: bool,
    commutativity_violation: Option<[String; 2]>,
    idempotents: Vec<String>,
    regular_part: Vec<String>,
    /// The regular part computed from cyclic subacts agrees with the
    /// element-wise computation.
    regular_part_cross_check: bool,
    /// `e·a = a` and `a·e = a` against ideal inclusion, over all `a` and
    /// idempotent `e`.
    ideal_shortcuts_agree: bool,
    r_incomparable: Option<[String; 2]>,
    regular_linear_order_violation: Option<[String; 3]>,
    idempotent_incomparable: Option<[String; 2]>,
    decomposition: Option<DecompositionFacts>,
}

#[derive(Debug, Serialize)]
struct DecompositionFacts {
    holds: bool,
    uncovered: Vec<String>,
    generator: Option<String>,
}

fn analyze(path: &Path) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let m = load_monoid(path, &mut inputs, "monoid")?;
    let r = regular_part(&m);
    let idem = m.idempotents();
    let ideal_shortcuts_agree = m.elements().all(|a| {
        idem.iter().all(|e| {
            m.right_ideal_within(a, e) == Ok(m.right_ideal_subset(a, e))
                && m.left_ideal_within(a, e) == Ok(m.left_ideal_subset(a, e))
        })
    });
    let pair = |a: Elem, b: Elem| [m.name(a).to_string(), m.name(b).to_string()];
    let r_incomparable = match m.is_linearly_ordered(&r) {
        Ok(LinearOrder::Incomparable { a, b }) => Some(pair(a, b)),
        _ => None,
    };
    let regular_linear_order_violation = match is_regularly_linearly_ordered(&m) {
        Ok(Verdict::Fails([a, b, c])) => Some([m.name(a).into(), m.name(b).into(), m.name(c).into()]),
        _ => None,
    };
    let idempotent_incomparable = match idempotent_comparability(&m) {
        Ok(Verdict::Fails([e, f])) => Some(pair(e, f)),
        _ => None,
    };
    let decomposition = check_r_decomposition(&m).ok().map(|d| DecompositionFacts {
        holds: d.holds,
        uncovered: names(&m, d.uncovered),
        generator: d.single.map(|e| m.name(e).to_string()),
    });
    let facts = Analysis {
        elements: m.names().to_vec(),
        identity: m.name(m.identity()).to_string(),
        commutative: m.is_commutative(),
        commutativity_violation: m.commutativity_violation().map(|(a, b)| pair(a, b)),
        idempotents: names(&m, idem.iter()),
        regular_part: names(&m, r.iter()),
        regular_part_cross_check: regular_part_by_subacts(&m) == r,
        ideal_shortcuts_agree,
        r_incomparable,
        regular_linear_order_violation,
        idempotent_incomparable,
        decomposition,
    };
    let mut t = String::new();
    let opt = |o: &Option<[String; 2]>| o.as_ref().map_or("none".to_string(), |p| show(p));
    let _ = writeln!(t, "elements: {}", facts.elements.join(" "));
    let _ = writeln!(t, "identity: {}", facts.identity);
    let _ = writeln!(t, "commutative: {} (violation: {})", facts.commutative, opt(&facts.commutativity_violation));
    let _ = writeln!(t, "idempotents: {}", show_set(&facts.idempotents));
    let _ = writeln!(t, "regular part: {}", show_set(&facts.regular_part));
    let _ = writeln!(t, "regular part cross-check: {}", facts.regular_part_cross_check);
    let _ = writeln!(t, "ideal shortcuts agree: {}", facts.ideal_shortcuts_agree);
    let _ = writeln!(t, "incomparable in R: {}", opt(&facts.r_incomparable));
    let _ = writeln!(
        t,
        "regular linear order violation: {}",
        facts.regular_linear_order_violation.as_ref().map_or("none".to_string(), |v| show(v))
    );
    let _ = writeln!(t, "incomparable idempotents: {}", opt(&facts.idempotent_incomparable));
    match &facts.decomposition {
        Some(d) => {
            let _ = writeln!(
                t,
                "R = union of eR: {} (uncovered {}, single generator {})",
                d.holds,
                show_set(&d.uncovered),
                d.generator.as_deref().unwrap_or("none")
            );
        }
        None => {
            let _ = writeln!(t, "R is empty");
        }
    }
    let report = Report::new("analyze", inputs, "analyzed", "Structural facts computed from the table.", facts);
    Ok(Output::new(EXIT_POSITIVE, &report, t))
}

// ---- decide ----

#[derive(Debug, Serialize)]
struct Decision {
    elements: Vec<String>,
    decision: ClassDecision,
}

const CLASS_BASIS: &str = "Over a commutative monoid whose regular part R is the union of the sets eR, e idempotent in R, \
     the class of regular acts is primitive normal, equivalently antiadditive, exactly when R is linearly ordered \
     by inclusion of principal ideals.";

fn decision_outcome(d: &ClassDecision) -> &'static str {
    match d {
        ClassDecision::PrimitiveNormal { .. } => "primitive_normal",
        ClassDecision::NotPrimitiveNormal { .. } => "not_primitive_normal",
        ClassDecision::Inapplicable(_) => "inapplicable",
    }
}

fn decide(path: &Path) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let m = load_monoid(path, &mut inputs, "monoid")?;
    let decision = decide_class(&m);
    let mut t = String::new();
    match &decision {
        ClassDecision::PrimitiveNormal { e } => {
            let _ = writeln!(t, "R is linearly ordered");
            if let Some(e) = e {
                let _ = writeln!(t, "R = {}R", m.name(*e));
            }
        }
        ClassDecision::NotPrimitiveNormal { incomparable: [a, b], witness } => {
            let _ = writeln!(t, "incomparable in R: {}, {}", m.name(*a), m.name(*b));
            match witness {
                ClassWitness::Amalgam { a, b, c, counterexample } => {
                    let _ = writeln!(
                        t,
                        "witness: glued act of size {} from a = {}, b = {}, c = {}",
                        counterexample.act.size(),
                        m.name(*a),
                        m.name(*b),
                        m.name(*c)
                    );
                    let _ = writeln!(t, "formula: {}", counterexample.formula_summary.text);
                }
                ClassWitness::IdempotentProbe(p) => {
                    let _ = writeln!(t, "witness: copies of `{}` on SR overlap", p.formula.text);
                }
                ClassWitness::Unexplained { error, .. } => {
                    let _ = writeln!(t, "no witness: {error}");
                }
            }
        }
        ClassDecision::Inapplicable(why) => {
            let _ = writeln!(t, "reason: {}", serde_json::to_string(why).expect("serializes"));
        }
    }
    let code = decision.exit_code();
    let outcome = decision_outcome(&decision);
    let report = Report::new("decide", inputs, outcome, CLASS_BASIS, Decision { elements: m.names().to_vec(), decision });
    Ok(Output::new(code, &report, t))
}

// ---- act-check ----

#[derive(Debug, Serialize)]
struct NamedWitness {
    triple: [String; 3],
    i_star: Vec<String>,
    j_star: Vec<String>,
    k_star: Vec<[String; 2]>,
}

impl NamedWitness {
    fn new(act: &Act, w: &CriterionWitness) -> Self {
        let m = act.monoid();
        NamedWitness {
            triple: w.triple.map(|p| act.name(p).to_string()),
            i_star: names(m, w.i_star.iter().copied()),
            j_star: names(m, w.j_star.iter().copied()),
            k_star: w.k_star.iter().map(|&(a, b)| [m.name(a).to_string(), m.name(b).to_string()]).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct NamedViolation {
    formula: String,
    params: [Vec<String>; 2],
    shared: Vec<String>,
    separating: Vec<String>,
}

#[derive(Debug, Serialize)]
struct CriterionReport {
    holds: bool,
    witness: Option<NamedWitness>,
    /// The formula read off the witness, re-evaluated on the act.
    necessity: Option<NamedViolation>,
    necessity_verified: Option<bool>,
}

#[derive(Debug, Serialize)]
struct BruteforceReport {
    bounds: FormulaBounds,
    violation: Option<NamedViolation>,
    object_width: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ActCheck {
    oracle: Oracle,
    criterion: Option<CriterionReport>,
    bruteforce: Option<BruteforceReport>,
    agreement: Option<bool>,
}

fn named_violation(act: &Act, phi: &Formula, v: &CopyNormality) -> Option<NamedViolation> {
    match v {
        CopyNormality::Normal => None,
        CopyNormality::Violation { params, shared, separating } => Some(NamedViolation {
            formula: phi.display(act.monoid()).to_string(),
            params: [tuple(act, &params[0]), tuple(act, &params[1])],
            shared: tuple(act, shared),
            separating: tuple(act, separating),
        }),
    }
}

fn act_check(args: &ActCheckArgs) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let act = load_act(&args.act, &mut inputs)?;
    if let Some(p) = &args.monoid {
        let m = load_monoid(p, &mut inputs, "monoid")?;
        if m.rows() != act.monoid().rows() || m.names() != act.monoid().names() {
            return Err(CliError::Usage(format!("the act is not over the monoid in {}", p.display())));
        }
    }
    let mut t = String::new();
    let criterion = matches!(args.oracle, Oracle::Criterion | Oracle::Both).then(|| match theorem1_check(&act) {
        Verdict::Fails(w) => {
            let nv = necessity_violation(&w);
            let verified = nv.verify(&act);
            let shown = NamedViolation {
                formula: nv.formula.display(act.monoid()).to_string(),
                params: [vec![act.name(nv.params[0]).into()], vec![act.name(nv.params[1]).into()]],
                shared: vec![act.name(nv.shared).into()],
                separating: vec![act.name(nv.separating).into()],
            };
            CriterionReport {
                holds: false,
                witness: Some(NamedWitness::new(&act, &w)),
                necessity: Some(shown),
                necessity_verified: Some(verified),
            }
        }
        _ => CriterionReport { holds: true, witness: None, necessity: None, necessity_verified: None },
    });
    let bruteforce = if matches!(args.oracle, Oracle::Bruteforce | Oracle::Both) {
        let bounds = FormulaBounds { max_free: args.bounds.max_free, max_bound: args.bounds.max_bound, max_atoms: args.bounds.max_atoms };
        bounds.check().map_err(|e| CliError::Usage(e.to_string()))?;
        let found = search_copy_violation(&act, bounds);
        Some(BruteforceReport {
            bounds,
            object_width: found.as_ref().map(|f| bounds.max_free - f.params),
            violation: found.and_then(|f| named_violation(&act, &f.formula, &f.violation)),
        })
    } else {
        None
    };
    if let Some(c) = &criterion {
        let _ = writeln!(t, "criterion: {}", if c.holds { "holds" } else { "fails" });
        if let Some(w) = &c.witness {
            let _ = writeln!(t, "triple: {}", show(&w.triple));
        }
        if let (Some(n), Some(v)) = (&c.necessity, c.necessity_verified) {
            let _ = writeln!(t, "necessity formula: {}", n.formula);
            let _ = writeln!(
                t,
                "copies at y = {} and y = {} share {} and differ at {}: {}",
                n.params[0][0], n.params[1][0], n.shared[0], n.separating[0], if v { "verified" } else { "NOT reproduced" }
            );
        }
    }
    if let Some(b) = &bruteforce {
        match &b.violation {
            Some(v) => {
                let _ = writeln!(t, "bruteforce: violation by {}", v.formula);
                let _ = writeln!(
                    t,
                    "copies at {} and {} share {} and differ at {}",
                    show(&v.params[0]),
                    show(&v.params[1]),
                    show(&v.shared),
                    show(&v.separating)
                );
            }
            None => {
                let _ = writeln!(
                    t,
                    "bruteforce: no violation with <= {} free, {} bound, {} atoms",
                    b.bounds.max_free, b.bounds.max_bound, b.bounds.max_atoms
                );
            }
        }
    }
    // A bounded search that finds nothing does not contradict a failing
    // criterion; the necessity formula answers for it.
    let agreement = match (&criterion, &bruteforce) {
        (Some(c), Some(b)) => Some(if c.holds { b.violation.is_none() } else { c.necessity_verified == Some(true) }),
        _ => None,
    };
    let (code, outcome) = match (&criterion, &bruteforce, agreement) {
        (_, _, Some(false)) => (EXIT_DISAGREEMENT, "disagreement"),
        (Some(c), _, _) if c.holds => (EXIT_POSITIVE, "primitive_normal"),
        (Some(_), _, _) => (EXIT_NEGATIVE, "not_primitive_normal"),
        (None, Some(b), _) if b.violation.is_some() => (EXIT_NEGATIVE, "violation_found"),
        _ => (EXIT_POSITIVE, "no_violation_within_bounds"),
    };
    if let Some(a) = agreement {
        let _ = writeln!(t, "oracles agree: {a}");
    }
    let basis = "An act is primitive normal iff for all a1, a2, a3 with K* the common kernel of s -> s*ai, \
                 whenever sa1 = sa2 for s in I* and ta2 = ta3 for t in J*, some b satisfies the same \
                 equations with a1 kept, a3 kept and K* preserved; the brute-force oracle evaluates every \
                 primitive formula within the bounds.";
    let report = Report::new(
        "act-check",
        inputs,
        outcome,
        basis,
        ActCheck { oracle: args.oracle, criterion, bruteforce, agreement },
    );
    Ok(Output::new(code, &report, t))
}

// ---- formula ----

#[derive(Debug, Serialize)]
struct Evaluation {
    formula: String,
    objects: Vec<String>,
    params: Vec<String>,
    solutions: Vec<Vec<String>>,
}

fn formula_eval(path: &Path, input: &FormulaInput, params: &[String]) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let act = load_act(path, &mut inputs)?;
    let phi = load_formula(input, act.monoid(), &mut inputs)?;
    if params.len() > phi.free_count() {
        return Err(CliError::Usage(format!("{} parameters for {} free variables", params.len(), phi.free_count())));
    }
    let ps = params.iter().map(|p| point(&act, p)).collect::<Result<Vec<_>, _>>()?;
    let set = solution_set(&phi, &act, &ps);
    let objects = phi.free_names()[..phi.free_count() - ps.len()].to_vec();
    let result = Evaluation {
        formula: phi.display(act.monoid()).to_string(),
        objects: objects.clone(),
        params: params.to_vec(),
        solutions: set.iter().map(|t| tuple(&act, &t)).collect(),
    };
    let mut t = String::new();
    let _ = writeln!(t, "formula: {}", result.formula);
    let _ = writeln!(t, "solutions over {} ({}):", show(&objects), result.solutions.len());
    for s in &result.solutions {
        let _ = writeln!(t, "  {}", show(s));
    }
    let report = Report::new("formula eval", inputs, "evaluated", "Direct evaluation over the act.", result);
    Ok(Output::new(EXIT_POSITIVE, &report, t))
}

#[derive(Debug, Serialize)]
struct NormalCheck {
    formula: String,
    params: usize,
    normal: bool,
    violation: Option<NamedViolation>,
}

fn formula_normal_check(path: &Path, input: &FormulaInput, params: usize) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let act = load_act(path, &mut inputs)?;
    let phi = load_formula(input, act.monoid(), &mut inputs)?;
    if params > phi.free_count() {
        return Err(CliError::Usage(format!("{params} parameters for {} free variables", phi.free_count())));
    }
    let v = is_copy_normal(&phi, &act, params);
    let violation = named_violation(&act, &phi, &v);
    let mut t = String::new();
    let _ = writeln!(t, "formula: {}", phi.display(act.monoid()));
    if let Some(v) = &violation {
        let _ = writeln!(
            t,
            "copies at {} and {} share {} and differ at {}",
            show(&v.params[0]),
            show(&v.params[1]),
            show(&v.shared),
            show(&v.separating)
        );
    }
    let (code, outcome) = if v.is_normal() { (EXIT_POSITIVE, "normal") } else { (EXIT_NEGATIVE, "violation") };
    let result = NormalCheck { formula: phi.display(act.monoid()).to_string(), params, normal: v.is_normal(), violation };
    let report = Report::new(
        "formula normal-check",
        inputs,
        outcome,
        "Copies over distinct parameter tuples must be equal or disjoint.",
        result,
    );
    Ok(Output::new(code, &report, t))
}

#[derive(Debug, Serialize)]
struct EliminationReport {
    input: String,
    x0: String,
    e: String,
    output: Option<String>,
    trace: Vec<(usize, usize)>,
    error: Option<String>,
}

fn formula_eliminate(path: &Path, input: &FormulaInput, x0: &str, e: Option<&str>) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let m = load_monoid(path, &mut inputs, "monoid")?;
    let phi = load_formula(input, &m, &mut inputs)?;
    let x = phi
        .free_names()
        .iter()
        .position(|n| n == x0)
        .ok_or_else(|| CliError::Usage(format!("`{x0}` is not a free variable")))?;
    let e = match e {
        Some(name) => Some(element(&m, name)?),
        None => check_r_decomposition(&m).ok().and_then(|d| d.single),
    };
    let text = phi.display(&m).to_string();
    let mut report =
        EliminationReport { input: text, x0: x0.to_string(), e: String::new(), output: None, trace: Vec::new(), error: None };
    let result = match e {
        Some(e) => {
            report.e = m.name(e).to_string();
            Eliminator::new(&m, e).and_then(|el| el.eliminate(&phi, x))
        }
        None => Err(EliminationError::PreconditionFails(crate::formula::Precondition::NotGeneratedByE)),
    };
    let (code, outcome) = match result {
        Ok(r) => {
            report.output = Some(r.formula(&phi, x).display(&m).to_string());
            report.trace = r.trace;
            (EXIT_POSITIVE, "eliminated")
        }
        Err(err) => {
            let code = if matches!(err, EliminationError::Stuck { .. }) { EXIT_NEGATIVE } else { EXIT_INVALID };
            report.error = Some(err.to_string());
            (code, if code == EXIT_NEGATIVE { "stuck" } else { "rejected" })
        }
    };
    let mut t = String::new();
    let _ = writeln!(t, "input: {}", report.input);
    if let Some(o) = &report.output {
        let _ = writeln!(t, "output: {o}");
        let steps: Vec<String> = report.trace.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        let _ = writeln!(t, "measure: {}", steps.join(" -> "));
    }
    if let Some(err) = &report.error {
        let _ = writeln!(t, "error: {err}");
    }
    let basis = "In regular acts over a commutative monoid with R = eR linearly ordered, a conjunction is \
                 equivalent to one in which x0 occurs in a single atom t*xi = s*x0.";
    let report = Report::new("formula eliminate", inputs, outcome, basis, report);
    Ok(Output::new(code, &report, t))
}

// ---- counterexample ----

#[derive(Debug, Serialize)]
struct CounterexampleReport {
    elements: Vec<String>,
    counterexample: Option<crate::deciders::Counterexample>,
    error: Option<crate::deciders::CounterexampleError>,
    act_file: Option<String>,
}

fn counterexample(args: &CounterexampleArgs) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let m = load_monoid(&args.monoid, &mut inputs, "monoid")?;
    let (a, b, c) = (element(&m, &args.a)?, element(&m, &args.b)?, element(&m, &args.c)?);
    let mut t = String::new();
    let built = build_counterexample(&m, a, b, c);
    let act_file = built.as_ref().ok().map(|ce| write_act(&ce.act, &MonoidSource::Inline));
    if let (Some(path), Some(text)) = (&args.act_out, &act_file) {
        std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let (code, outcome) = match &built {
        Ok(ce) => {
            let _ = writeln!(t, "glued act: {} points, regular", ce.act.size());
            let _ = writeln!(t, "formula: {}", ce.formula_summary.text);
            let n = |p: Point| ce.act.name(p).to_string();
            let _ = writeln!(
                t,
                "copies at {} and {} share {}; only the second contains {}",
                n(ce.params[0]),
                n(ce.params[1]),
                n(ce.shared),
                n(ce.separating)
            );
            let _ = writeln!(t, "criterion fails at {}", show(&ce.criterion.triple.map(n)));
            (EXIT_POSITIVE, "built")
        }
        Err(e) => {
            let _ = writeln!(t, "{e}");
            (EXIT_INVALID, "rejected")
        }
    };
    let (counterexample, error) = match built {
        Ok(ce) => (Some(ce), None),
        Err(e) => (None, Some(e)),
    };
    let basis = "Three copies of Se glued at c and then at b form a regular act on which \
                 exists u (s_b*u = x & s_c*u = y) has overlapping unequal copies.";
    let result = CounterexampleReport { elements: m.names().to_vec(), counterexample, error, act_file };
    let report = Report::new("counterexample", inputs, outcome, basis, result);
    Ok(Output::new(code, &report, t))
}

// ---- sweep ----

fn sweep(path: &Path, threads: Option<usize>) -> Result<Output, CliError> {
    let mut inputs = Vec::new();
    let bytes = read(path)?;
    inputs.push(InputRef::new("config", &bytes));
    let mut cfg = ExperimentConfig::from_toml(&utf8(path, &bytes)?)
        .map_err(|source| CliError::Config { path: path.to_path_buf(), source })?;
    if threads.is_some() {
        cfg.threads = threads;
    }
    let h = run_sweeps(&cfg).map_err(|source| CliError::Config { path: path.to_path_buf(), source })?;
    let mut t = String::new();
    for s in &h.sweeps {
        eprintln!("{:?}: {:.2?}", s.sweep, s.runtime);
        let counts: Vec<String> = s.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            t,
            "{}: {} cases, {} discrepancies [{}]",
            serde_json::to_string(&s.sweep).expect("serializes").trim_matches('"'),
            s.cases,
            s.discrepancies.len(),
            counts.join(" ")
        );
    }
    let (code, outcome) = if h.is_clean() { (EXIT_POSITIVE, "clean") } else { (EXIT_NEGATIVE, "discrepancies") };
    let report = Report::new("sweep", inputs, outcome, "Each sweep compares two independent computations.", h);
    Ok(Output::new(code, &report, t))
}
