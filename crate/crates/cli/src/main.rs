use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use persuasion::conditions::{
    check_claim, check_necessary, check_proposition, check_sufficient, ClaimReport, NecessaryReport, PolarMode,
    PropositionOptions, PropositionReport, Regularity, SufficientOptions, SufficientReport, TripleVariant,
};
use persuasion::equilibrium::{
    compare_orders, solve_s1_first, solve_s2_first, verify_equilibrium, ComparisonReport, DeviationReport,
    EquilibriumReport, Order, PermutationMode, S2FirstOptions, SearchInfo, VerifyOptions,
};
use persuasion::game::{conditional_s1_utilities, expected_utilities, outcomes, UtilityTriple};
use persuasion::grid::GridConfig;
use persuasion::model::{validate_scenario, Scenario, ScenarioFile, ValidationReport};
use persuasion::montecarlo::{simulate, SimEstimate};
use persuasion::numerics::Rational;
use persuasion::strategy::{Commitment1, Commitment1File, Commitment2, Commitment2File};
use persuasion::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "persuasion", version, about = "Exact solver for two-sender sequential persuasion games")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (default: all cores). PERSUASION_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file against the model assumptions.
    Validate { scenario: PathBuf },
    /// Exact expected utilities of a commitment pair.
    Evaluate {
        scenario: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Solve for an equilibrium under one commitment order.
    Solve {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_order)]
        order: Order,
        #[command(flatten)]
        search: SearchArgs,
        /// Write `<order>.g1.json` and `<order>.g2.json` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve both orders (or take given pairs) and compare the outcomes.
    CompareOrders {
        scenario: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Use this S1-first pair instead of solving.
        #[arg(long, num_args = 2, value_names = ["G1", "G2"])]
        s1_first: Option<Vec<PathBuf>>,
        /// Use this S2-first pair instead of solving.
        #[arg(long, num_args = 2, value_names = ["G1", "G2"])]
        s2_first: Option<Vec<PathBuf>>,
        /// Utility differences up to this count as equal.
        #[arg(long, default_value = "0", value_parser = parse_rational)]
        tol: Rational,
    },
    /// Check that a commitment pair is an equilibrium of the given order.
    Verify {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_order)]
        order: Order,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 60)]
        step: u32,
        /// Coarse step of S2's deviation library.
        #[arg(long, default_value_t = 1)]
        library_step: u32,
    },
    /// Run one of the order-matters checkers.
    Check {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// Equilibrium order for the claim checker.
        #[arg(long, value_parser = parse_order, default_value = "s1_first")]
        order: Order,
        /// Equilibrium S1 commitment for the claim checker (solved when absent).
        #[arg(long, requires = "g2")]
        g1: Option<PathBuf>,
        #[arg(long, requires = "g1")]
        g2: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Polar::Weak)]
        polar: Polar,
        /// Largest denominator of the mixing ratios.
        #[arg(long, default_value_t = 24)]
        max_denominator: u32,
        #[arg(long, value_enum, default_value_t = RegularityArg::Grid)]
        regularity: RegularityArg,
        /// Step of the S1 grid used for the regularity condition.
        #[arg(long, default_value_t = 2)]
        regularity_step: u32,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Monte-Carlo estimate of a pair's expected utilities.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// S1 kernel entries are multiples of 1/step.
    #[arg(long, default_value_t = 60)]
    step: u32,
    /// Coarse step of S2's rule library when S2 commits first.
    #[arg(long, default_value_t = 4)]
    library_step: u32,
    #[arg(long, value_enum, default_value_t = Mode::Inner)]
    mode: Mode,
}

impl SearchArgs {
    fn grid(&self) -> GridConfig {
        GridConfig::with_step(self.step)
    }

    fn s2(&self) -> S2FirstOptions {
        let mode = match self.mode {
            Mode::Inner => PermutationMode::Inner,
            Mode::GridFilter => PermutationMode::GridFilter,
            Mode::ConstantOnly => PermutationMode::ConstantOnly,
        };
        S2FirstOptions { grid: self.grid(), library_step: self.library_step, mode }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Inner,
    GridFilter,
    ConstantOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Proposition,
    Claim,
    Sufficient,
    Necessary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Polar {
    Weak,
    Strict,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegularityArg {
    Grid,
    Skip,
}

fn parse_order(s: &str) -> Result<Order, String> {
    s.parse()
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::InvalidScenario(_)) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("PERSUASION_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| usage(format!("PERSUASION_THREADS: not a thread count: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    let json = cli.format == Format::Json;
    match cli.command {
        Command::Validate { scenario } => {
            let file = ScenarioFile::load(&scenario)?;
            let report = validate_scenario(&file);
            emit(json, &report, || render_validation(&report))?;
            Ok(if report.valid { 0 } else { 1 })
        }
        Command::Evaluate { scenario, pair } => {
            let s = load(&scenario)?;
            let (g1, g2) = load_pair(&s, &pair.g1, &pair.g2)?;
            let report = evaluation(&s, &g1, &g2);
            emit(json, &report, || render_evaluation(&report))?;
            Ok(0)
        }
        Command::Solve { scenario, order, search, out } => {
            let s = load(&scenario)?;
            let report = solve(&s, order, &search)?;
            if let Some(dir) = out {
                write_pair(&dir, &report)?;
            }
            emit(json, &report, || render_equilibrium(&report))?;
            Ok(0)
        }
        Command::CompareOrders { scenario, search, s1_first, s2_first, tol } => {
            let s = load(&scenario)?;
            let r1 = given_or_solved(&s, Order::S1First, s1_first.as_deref(), &search)?;
            let r2 = given_or_solved(&s, Order::S2First, s2_first.as_deref(), &search)?;
            let report = compare_orders(&s, r1, r2, &tol);
            emit(json, &report, || render_comparison(&report))?;
            Ok(0)
        }
        Command::Verify { scenario, order, pair, step, library_step } => {
            let s = load(&scenario)?;
            let (g1, g2) = load_pair(&s, &pair.g1, &pair.g2)?;
            let opts = VerifyOptions { grid: GridConfig::with_step(step), library_step };
            let report = verify_equilibrium(&s, order, &g1, &g2, &opts)?;
            let utilities = expected_utilities(&s, &g1, &g2);
            let out = VerifyOutput { order, utilities, report };
            emit(json, &out, || render_verify(&out))?;
            Ok(0)
        }
        Command::Check { scenario, which, order, g1, g2, polar, max_denominator, regularity, regularity_step, search } => {
            let s = load(&scenario)?;
            match which {
                Which::Proposition => {
                    let polar = match polar {
                        Polar::Weak => PolarMode::Weak,
                        Polar::Strict => PolarMode::StrictReversal,
                    };
                    let r = check_proposition(&s, &PropositionOptions { polar, solver: search.s2() });
                    emit(json, &r, || render_proposition(&r))?;
                }
                Which::Claim => {
                    let given: Option<Vec<PathBuf>> = g1.zip(g2).map(|(a, b)| vec![a, b]);
                    let eq = given_or_solved(&s, order, given.as_deref(), &search)?;
                    let r = check_claim(&s, &eq);
                    emit(json, &r, || render_claim(&r))?;
                }
                Which::Sufficient => {
                    let regularity = match regularity {
                        RegularityArg::Grid => Regularity::Grid(GridConfig::with_step(regularity_step)),
                        RegularityArg::Skip => Regularity::Skip,
                    };
                    let r = check_sufficient(&s, &SufficientOptions { max_denominator, regularity });
                    emit(json, &r, || render_sufficient(&r))?;
                }
                Which::Necessary => {
                    let r = check_necessary(&s);
                    emit(json, &r, || render_necessary(&r))?;
                }
            }
            Ok(0)
        }
        Command::Simulate { scenario, pair, samples, seed } => {
            if samples == 0 {
                return Err(usage("--samples must be positive"));
            }
            let s = load(&scenario)?;
            let (g1, g2) = load_pair(&s, &pair.g1, &pair.g2)?;
            let estimate = simulate(&s, &g1, &g2, samples, seed);
            let out = SimOutput { exact: expected_utilities(&s, &g1, &g2), estimate };
            emit(json, &out, || render_simulation(&out))?;
            Ok(0)
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
    if json {
        let out = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
        println!("{out}");
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    Ok(Scenario::load(path)?)
}

fn load_pair(s: &Scenario, g1: &Path, g2: &Path) -> Result<(Commitment1, Commitment2), Failure> {
    let g1 = Commitment1::load(g1, s)?;
    let g2 = Commitment2::load(g2, s, &g1)?;
    Ok((g1, g2))
}

fn solve(s: &Scenario, order: Order, search: &SearchArgs) -> Result<EquilibriumReport, Failure> {
    Ok(match order {
        Order::S1First => solve_s1_first(s, &search.grid())?,
        Order::S2First => solve_s2_first(s, &search.s2())?,
    })
}

fn given_or_solved(s: &Scenario, order: Order, given: Option<&[PathBuf]>, search: &SearchArgs) -> Result<EquilibriumReport, Failure> {
    match given {
        Some([a, b]) => {
            let (g1, g2) = load_pair(s, a, b)?;
            Ok(EquilibriumReport::new(s, order, g1, g2, SearchInfo::given()))
        }
        Some(_) => Err(usage("a commitment pair needs exactly two files")),
        None => solve(s, order, search),
    }
}

fn write_pair(dir: &Path, r: &EquilibriumReport) -> Result<(), Failure> {
    let io = |p: &Path, e: std::io::Error| usage(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let write = |name: String, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text + "\n").map_err(|e| io(&p, e))
    };
    write(format!("{}.g1.json", r.order), serde_json::to_string_pretty(&r.g1_file).expect("commitments serialize"))?;
    write(format!("{}.g2.json", r.order), serde_json::to_string_pretty(&r.g2_file).expect("commitments serialize"))?;
    Ok(())
}

#[derive(Serialize)]
struct OutcomeRow {
    s1_signal: String,
    s2_signal: String,
    action: String,
    probability: Rational,
    utilities: UtilityTriple,
}

#[derive(Serialize)]
struct Evaluation {
    utilities: UtilityTriple,
    outcomes: Vec<OutcomeRow>,
    /// S1's expected utility given each of her signals.
    s1_conditional: Vec<(String, Option<Rational>)>,
}

fn evaluation(s: &Scenario, g1: &Commitment1, g2: &Commitment2) -> Evaluation {
    let outcomes = outcomes(s, g1, g2)
        .into_iter()
        .map(|o| OutcomeRow {
            s1_signal: g1.signals[o.w1].clone(),
            s2_signal: g2.signals[o.w2].clone(),
            action: s.state_name(o.action).to_string(),
            probability: o.probability.limit().clone(),
            utilities: o.utilities,
        })
        .collect();
    let s1_conditional = g1.signals.iter().cloned().zip(conditional_s1_utilities(s, g1, g2)).collect();
    Evaluation { utilities: expected_utilities(s, g1, g2), outcomes, s1_conditional }
}

#[derive(Serialize)]
struct VerifyOutput {
    order: Order,
    utilities: UtilityTriple,
    report: DeviationReport,
}

#[derive(Serialize)]
struct SimOutput {
    exact: UtilityTriple,
    estimate: SimEstimate,
}

fn num(x: &Rational) -> String {
    if x.denom() == 1.into() {
        x.to_string()
    } else {
        format!("{x} ({})", x.to_decimal_string())
    }
}

fn triple(u: &UtilityTriple) -> String {
    format!("S1 {}, S2 {}, receiver {}", num(&u.s1), num(&u.s2), num(&u.receiver))
}

fn render_validation(r: &ValidationReport) -> String {
    if r.valid {
        return "valid\n".into();
    }
    let mut out = String::from("invalid\n");
    for v in &r.violations {
        let _ = writeln!(out, "  {}: {}", v.assumption, v.detail);
    }
    out
}

fn render_evaluation(e: &Evaluation) -> String {
    let mut out = format!("utilities: {}\n", triple(&e.utilities));
    let _ = writeln!(out, "{:<12} {:<12} {:<10} {:<14}", "s1 signal", "s2 signal", "action", "probability");
    for o in &e.outcomes {
        let _ = writeln!(out, "{:<12} {:<12} {:<10} {}", o.s1_signal, o.s2_signal, o.action, num(&o.probability));
    }
    for (w, u) in &e.s1_conditional {
        let _ = writeln!(out, "S1 given {w}: {}", u.as_ref().map_or("unrealized".into(), num));
    }
    out
}

fn render_g1(f: &Commitment1File) -> String {
    let mut out = String::new();
    for (set, row) in &f.kernel {
        let cells: Vec<String> = row.iter().filter(|(_, p)| !p.is_zero()).map(|(w, p)| format!("{w} {p}")).collect();
        let _ = writeln!(out, "    {set} -> {}", cells.join(", "));
    }
    out
}

fn render_g2(f: &Commitment2File) -> String {
    let mut out = String::new();
    for (set, per) in &f.kernel {
        for (w1, row) in per {
            let cells: Vec<String> = row.iter().filter(|(_, p)| !p.is_zero()).map(|(w, p)| format!("{w} {p}")).collect();
            let _ = writeln!(out, "    {set}, after {w1} -> {}", cells.join(", "));
        }
    }
    out
}

fn render_equilibrium(r: &EquilibriumReport) -> String {
    let mut out = format!("order: {}\nutilities: {}\n", r.order, triple(&r.utilities));
    let _ = writeln!(out, "search: {}, {} points", r.search.source, r.search.points_evaluated);
    let _ = write!(out, "  g1:\n{}  g2:\n{}", render_g1(&r.g1_file), render_g2(&r.g2_file));
    out
}

fn render_comparison(c: &ComparisonReport) -> String {
    let mut out = format!("{:<10} {:<22} {:<22} {:<22}\n", "order", "S1", "S2", "receiver");
    for r in [&c.s1_first, &c.s2_first] {
        let u = &r.utilities;
        let _ = writeln!(out, "{:<10} {:<22} {:<22} {:<22}", r.order.to_string(), num(&u.s1), num(&u.s2), num(&u.receiver));
    }
    let verdict = if c.verdict.matters { "order matters" } else { "order does not matter" };
    let _ = writeln!(out, "verdict: {verdict}");
    let _ = writeln!(out, "  preferred order: S1 {:?}, S2 {:?}, receiver {:?}", c.verdict.s1, c.verdict.s2, c.verdict.receiver);
    let t = &c.transfer;
    if t.empty {
        let _ = writeln!(out, "transfer range: empty (lower {}, upper {})", num(&t.lower), num(&t.upper));
    } else {
        let _ = writeln!(out, "transfer range: ({}, {})", num(&t.lower), num(&t.upper));
    }
    for r in &c.references {
        let mark = if r.matches { "ok" } else { "MISMATCH" };
        let _ = writeln!(
            out,
            "reference {} [{} {:?}]: stated {}, computed {} {mark}",
            r.label,
            r.order,
            r.agent,
            num(&r.reference),
            num(&r.computed)
        );
    }
    if c.discrepancies > 0 {
        let _ = writeln!(out, "{} reference value(s) disagree with the computed outcome", c.discrepancies);
    }
    out
}

fn render_verify(v: &VerifyOutput) -> String {
    let r = &v.report;
    let mut out = format!("order: {}\nutilities: {}\n", v.order, triple(&v.utilities));
    let _ = writeln!(out, "equilibrium: {}", if r.passed { "yes" } else { "no" });
    let l = &r.late;
    let _ = writeln!(out, "late {:?}: {} ({:?}, {} points)", l.agent, pass(l.passed), l.method, l.points_checked);
    for c in &l.per_signal {
        let _ = writeln!(out, "    {}: attained {}, optimum {}", c.signal, num(&c.attained), num(&c.optimum));
    }
    if let Some(p) = l.permutation_constraint_holds {
        let _ = writeln!(out, "    relabeling constraint: {}", pass(p));
    }
    if let Some(d) = &l.best_deviation {
        let _ = writeln!(out, "    best deviation gains {}: {}", num(&d.gain), triple(&d.utilities));
    }
    let e = &r.early;
    let _ = writeln!(out, "early {:?}: {} ({:?}, {} points)", e.agent, pass(e.passed), e.method, e.points_checked);
    if let Some(d) = &e.best_deviation {
        let _ = writeln!(out, "    best deviation gains {}: {}", num(&d.gain), triple(&d.utilities));
    }
    out
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_proposition(r: &PropositionReport) -> String {
    let mut out = format!("satisfied: {}\n", r.satisfied);
    let _ = writeln!(out, "collaborative states: {}", r.collaborative_states.join(", "));
    let _ = writeln!(out, "effective collaborative states: {}", r.effective_collaborative_states.join(", "));
    for c in &r.info_sets {
        let _ = writeln!(
            out,
            "info set {}: polar opposite {}, S2 value {}, S1 value {}",
            c.info_set,
            c.polar_opposite,
            num(&c.s2_value),
            num(&c.s1_value_max)
        );
        for k in &c.collaboration {
            let _ = writeln!(
                out,
                "    {}: S1 {} {} {} ({}), S2 {} {} {} ({})",
                k.state,
                num(&k.s1_side.lhs),
                k.s1_side.relation,
                num(&k.s1_side.rhs),
                k.s1_side.holds,
                num(&k.s2_side.lhs),
                k.s2_side.relation,
                num(&k.s2_side.rhs),
                k.s2_side.holds
            );
        }
        if let Some(rev) = &c.revealing {
            let _ = writeln!(out, "    revealing signal in every optimal commitment: {:?}", rev.holds);
        }
    }
    if let (Some(i), Some(t)) = (&r.witness_info_set, &r.witness_collab_state) {
        let _ = writeln!(out, "witness: info set {i}, collaborative state {t}");
    }
    out
}

fn render_claim(r: &ClaimReport) -> String {
    let mut out = format!("outcome: {:?}\n", r.outcome);
    if let (Some(i), Some(w)) = (&r.info_set, &r.revealing_signal) {
        let _ = writeln!(out, "revealing signal {w} for info set {i}");
    }
    for (w, u) in &r.conditional_utilities {
        let _ = writeln!(out, "  S1 given {w}: {}", u.as_ref().map_or("unrealized".into(), num));
    }
    out
}

fn render_sufficient(r: &SufficientReport) -> String {
    let mut out = format!(
        "witness found: {}\nratio denominators up to {}, {} regularity pairs\n",
        r.witness().is_some(),
        r.max_denominator,
        r.regularity_pairs
    );
    for p in &r.pairs {
        let reg = match (p.regularity, &p.regularity_violation) {
            (None, _) => "skipped".to_string(),
            (Some(true), _) => "holds".to_string(),
            (Some(false), Some(v)) => format!("fails ({} unplayed)", v.info_set),
            (Some(false), None) => "fails".to_string(),
        };
        let _ = writeln!(
            out,
            "({}, {}): ranking {} {} {} ({}), {} ratios, {} segments, threat {}, regularity {reg}",
            p.x,
            p.y,
            num(&p.s1_ranking.lhs),
            p.s1_ranking.relation,
            num(&p.s1_ranking.rhs),
            p.s1_ranking.holds,
            p.ratios_checked,
            p.segments,
            p.threat_found
        );
    }
    for w in &r.witnesses {
        let _ = writeln!(out, "witness ({}, {}): alpha {}, beta {}", w.x, w.y, w.alpha, w.beta);
        let _ = writeln!(out, "    S1 threat: {} < {}", num(&w.s1_threat.lhs), num(&w.s1_threat.rhs));
        let _ = writeln!(out, "    S2 separation: {} < {}", num(&w.s2_separation.lhs), num(&w.s2_separation.rhs));
    }
    out
}

fn render_necessary(r: &NecessaryReport) -> String {
    let mut out = format!("order may matter: {}\nbelief-dependent tie-break: {}\n", r.order_may_matter, r.tie_break_flag);
    for w in &r.witnesses {
        let (a, b) = match w.variant {
            TripleVariant::Original => (&w.u1, &w.u2),
            TripleVariant::Swapped => (&w.u2, &w.u1),
        };
        let (fa, fb) = match w.variant {
            TripleVariant::Original => ("U_S1", "U_S2"),
            TripleVariant::Swapped => ("U_S2", "U_S1"),
        };
        let _ = writeln!(
            out,
            "witness ({}, {}, {}) [{:?}]: {fa} {} > {}, {} > {}; {fb} {} > {} > {}",
            w.triple[0],
            w.triple[1],
            w.triple[2],
            w.variant,
            num(&a[0]),
            num(&a[1]),
            num(&a[0]),
            num(&a[2]),
            num(&b[2]),
            num(&b[0]),
            num(&b[1])
        );
        let _ = writeln!(out, "    S1 sets {} / {}, S2 sets {} / {}", w.s1_sets[0], w.s1_sets[1], w.s2_sets[0], w.s2_sets[1]);
    }
    out
}

fn render_simulation(o: &SimOutput) -> String {
    let e = &o.estimate;
    let mut out = format!("samples {}, seed {}\n", e.samples, e.seed);
    let rows = [
        ("S1", e.mean.s1, e.std_error.s1, &o.exact.s1),
        ("S2", e.mean.s2, e.std_error.s2, &o.exact.s2),
        ("receiver", e.mean.receiver, e.std_error.receiver, &o.exact.receiver),
    ];
    for (name, m, se, x) in rows {
        let _ = writeln!(out, "{name:<9} mean {m:.6} ± {se:.6} (exact {})", num(x));
    }
    out
}
