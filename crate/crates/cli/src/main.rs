use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use premagnus::freelie::{self, lie_records, lie_to_text, LieElement};
use premagnus::lincomb::TermRecord;
use premagnus::magnus::{self, MAX_ORDER};
use premagnus::numeric::{self, IntegratorConfig, Problem};
use premagnus::prelie::{prelie_associator_check, PreLieElement};
use premagnus::trees::{canonicalize, enumerate_e1, enumerate_planar, Tree};
use premagnus::{gl, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const DEFAULT_MAX_ORDER: usize = 7;
const ENV_MAX_ORDER: &str = "MAGNUS_MAX_ORDER";

#[derive(Parser, Debug)]
#[command(name = "premagnus", version, about = "Exact Magnus expansion tables")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rooted tree enumeration
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Magnus expansion components
    #[command(subcommand)]
    Magnus(MagnusCmd),
    /// Cross-check the independent constructions
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Integrate a named test problem and print a per-step CSV
    Integrate(IntegrateArgs),
}

#[derive(Subcommand, Debug)]
enum TreesCmd {
    /// Planar trees with N vertices
    Enum {
        #[arg(long)]
        order: usize,
        /// Only trees whose fertilities are 0, 1 or even
        #[arg(long)]
        e1: bool,
    },
}

#[derive(Args, Debug, Serialize)]
struct OrderArg {
    #[arg(long)]
    order: usize,
}

#[derive(Subcommand, Debug)]
enum MagnusCmd {
    /// γ(τ) over the planar e1-trees of the order
    Planar(OrderArg),
    /// Σ γ(τ) Ψ̄(τ) in non-planar trees
    Nonplanar(OrderArg),
    /// Bernoulli recursion in the free pre-Lie algebra
    Recursion(OrderArg),
    /// Grossman-Larson logarithm route
    GlLog(OrderArg),
    /// Term counts for the order
    Counts(OrderArg),
    /// Component in the free Lie algebra over the graded alphabet
    Lie {
        #[arg(long)]
        order: usize,
        /// Substitute λ_i, e.g. `--lambda 1=2 --lambda 3=-1/2`
        #[arg(long, value_parser = parse_lambda)]
        lambda: Vec<(u32, Rational)>,
    },
    /// Classical component Ω_k for a Taylor expansion about the step midpoint
    Blanes {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cap: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Every cross-route and internal consistency check up to an order
    All {
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
}

#[derive(Args, Debug, Serialize)]
struct IntegrateArgs {
    #[arg(long)]
    order: usize,
    #[arg(long)]
    steps: usize,
    /// constant, rotation, non-commuting or airy
    #[arg(long)]
    problem: String,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
}

fn parse_lambda(s: &str) -> Result<(u32, Rational), String> {
    let (i, v) = s.split_once('=').ok_or("expected INDEX=VALUE")?;
    let i: u32 = i.trim().parse().map_err(|e| format!("bad index {i:?}: {e}"))?;
    if i == 0 {
        return Err("generator indices start at 1".into());
    }
    let v: Rational = v.trim().parse().map_err(|e| format!("bad value {v:?}: {e}"))?;
    Ok((i, v))
}

enum Failure {
    Usage(String),
    Verify(String),
}

impl From<premagnus::Error> for Failure {
    fn from(e: premagnus::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn max_order() -> Result<usize, Failure> {
    match std::env::var(ENV_MAX_ORDER) {
        Err(_) => Ok(DEFAULT_MAX_ORDER),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if (1..=MAX_ORDER).contains(&n) => Ok(n),
            _ => Err(Failure::Usage(format!("{ENV_MAX_ORDER} must be an integer in 1..={MAX_ORDER}, got {v:?}"))),
        },
    }
}

fn check_order(order: usize, cap: usize) -> Result<(), Failure> {
    if order == 0 || order > cap {
        return Err(Failure::Usage(format!(
            "order {order} outside 1..={cap} (raise {ENV_MAX_ORDER} up to {MAX_ORDER})"
        )));
    }
    Ok(())
}

struct Output {
    config: Value,
    payload: Value,
    text: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn envelope(command: &str, out: &Output) -> Value {
    let canonical = serde_json::to_string(&json!({"command": command, "config": out.config})).expect("json");
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": hex(&Sha256::digest(canonical.as_bytes())),
        "payload": out.payload,
    })
}

fn records_text(records: &[TermRecord]) -> String {
    records.iter().map(|r| format!("{}\t{}", r.coeff, r.elem)).collect::<Vec<_>>().join("\n")
}

fn prelie_output(config: Value, x: &PreLieElement) -> Output {
    let records = x.to_records();
    Output { config, payload: serde_json::to_value(&records).expect("json"), text: records_text(&records) }
}

fn lie_output(config: Value, x: &LieElement, letter: &str) -> Output {
    Output {
        config,
        payload: json!({"terms": lie_records(x), "text": lie_to_text(x, letter)}),
        text: lie_to_text(x, letter),
    }
}

fn run_trees(cmd: &TreesCmd, cap: usize) -> Result<Output, Failure> {
    let TreesCmd::Enum { order, e1 } = cmd;
    check_order(*order, cap)?;
    let trees = if *e1 { enumerate_e1(*order)? } else { enumerate_planar(*order)? };
    let names: Vec<String> = trees.iter().map(ToString::to_string).collect();
    Ok(Output {
        config: json!({"order": order, "e1": e1}),
        payload: json!({"order": order, "e1": e1, "count": names.len(), "trees": names}),
        text: names.join("\n"),
    })
}

fn run_magnus(cmd: &MagnusCmd, cap: usize) -> Result<Output, Failure> {
    match cmd {
        MagnusCmd::Planar(OrderArg { order }) => {
            check_order(*order, cap)?;
            let table = magnus::magnus_theorem4(*order)?;
            let records: Vec<TermRecord> =
                table.planar_terms.iter().map(|(t, c)| TermRecord { elem: t.to_string(), coeff: c.clone() }).collect();
            Ok(Output {
                config: json!({"order": order}),
                payload: serde_json::to_value(&records).expect("json"),
                text: records_text(&records),
            })
        }
        MagnusCmd::Nonplanar(OrderArg { order }) => {
            check_order(*order, cap)?;
            Ok(prelie_output(json!({"order": order}), &magnus::magnus_theorem4(*order)?.nonplanar))
        }
        MagnusCmd::Recursion(OrderArg { order }) => {
            check_order(*order, cap)?;
            Ok(prelie_output(json!({"order": order}), &magnus::magnus_recursion(*order)?))
        }
        MagnusCmd::GlLog(OrderArg { order }) => {
            check_order(*order, cap)?;
            Ok(prelie_output(json!({"order": order}), &gl::log_star_component(*order)?))
        }
        MagnusCmd::Counts(OrderArg { order }) => {
            check_order(*order, cap)?;
            let counts = magnus::term_counts(*order)?;
            let text = format!(
                "e1 trees: {}\nnon-planar support: {}\nreduced: {}",
                counts.e1_count,
                counts.nonplanar_support,
                counts.reduced_count.map_or("unknown".to_string(), |c| c.to_string())
            );
            Ok(Output { config: json!({"order": order}), payload: serde_json::to_value(&counts).expect("json"), text })
        }
        MagnusCmd::Lie { order, lambda } => {
            check_order(*order, cap)?;
            let values: BTreeMap<u32, Rational> = lambda.iter().cloned().collect();
            let x = freelie::magnus_lie(*order, (!values.is_empty()).then_some(&values))?;
            let shown: BTreeMap<String, String> = values.iter().map(|(i, v)| (i.to_string(), v.to_string())).collect();
            Ok(lie_output(json!({"order": order, "lambda": shown}), &x, "a"))
        }
        MagnusCmd::Blanes { k, cap: degree_cap } => {
            if *k == 0 || *degree_cap == 0 || *degree_cap > 2 * MAX_ORDER {
                return Err(Failure::Usage(format!("need k ≥ 1 and 1 ≤ cap ≤ {}", 2 * MAX_ORDER)));
            }
            let x = freelie::classical_magnus_midpoint(*k, *degree_cap)?;
            Ok(lie_output(json!({"k": k, "cap": degree_cap}), &x, "q"))
        }
    }
}

#[derive(Serialize)]
struct CheckResult {
    check: &'static str,
    order: usize,
    ok: bool,
}

fn run_verify(max: usize, cap: usize) -> Result<Output, Failure> {
    check_order(max, cap)?;
    let mut results = Vec::new();
    let mut record = |check: &'static str, order: usize, ok: bool| results.push(CheckResult { check, order, ok });
    for n in 1..=max {
        let theorem = magnus::magnus_theorem4(n)?.nonplanar;
        let recursion = magnus::magnus_recursion(n)?;
        record("tree formula = recursion", n, theorem == recursion);
        record("recursion = GL logarithm", n, recursion == gl::log_star_component(n)?);
        let gammas_ok = enumerate_planar(n)?.iter().all(|t| magnus::gamma(t).is_zero() != t.is_e1());
        record("γ ≠ 0 exactly on e1-trees", n, gammas_ok);
    }
    let left = freelie::classical_magnus_all(max, max, freelie::ExpansionPoint::Left)?;
    let total = left.iter().fold(LieElement::zero(), |acc, x| &acc + x);
    for n in 1..=max {
        let lie = freelie::magnus_lie(n, None)?;
        let classical = total.filter(|w| w.degree() == n).scale(&Rational::from_integer(n as i64));
        record("Lie projection = classical recursion", n, lie == classical);
    }
    let mid = freelie::classical_magnus_all(max, max, freelie::ExpansionPoint::Midpoint)?;
    for (k, omega) in mid.iter().enumerate() {
        record("midpoint components have odd h-order", k + 1, omega.keys().all(|w| w.degree() % 2 == 1));
    }
    let small: Vec<Tree> = {
        let mut v: Vec<Tree> = (1..=3).flat_map(|n| enumerate_planar(n).unwrap()).map(|p| canonicalize(&p)).collect();
        v.sort();
        v.dedup();
        v
    };
    for a in &small {
        for b in &small {
            for c in &small {
                let d = a.degree() + b.degree() + c.degree();
                if d > max.max(3) {
                    continue;
                }
                let el = |t: &Tree| PreLieElement::single(t.clone());
                record("grafting is pre-Lie", d, prelie_associator_check(&el(a), &el(b), &el(c)).is_zero());
            }
        }
    }
    record("matrix pre-Lie identity", 2, numeric::lemma1_numeric_check(20, 2, 1) <= 1e-9);
    let failed = results.iter().find(|r| !r.ok).map(|r| format!("{} failed at order {}", r.check, r.order));
    let passed = results.iter().filter(|r| r.ok).count();
    let text = format!("{passed}/{} checks passed", results.len());
    let payload = json!({"max_order": max, "passed": passed, "total": results.len(), "checks": results});
    match failed {
        Some(msg) => Err(Failure::Verify(msg)),
        None => Ok(Output { config: json!({"max_order": max}), payload, text }),
    }
}

fn run_integrate(args: &IntegrateArgs) -> Result<Output, Failure> {
    let problem = Problem::from_name(&args.problem).ok_or_else(|| {
        let names: Vec<&str> = Problem::ALL.iter().map(|p| p.name()).collect();
        Failure::Usage(format!("unknown problem {:?}; expected one of {}", args.problem, names.join(", ")))
    })?;
    if ![2, 4, 6].contains(&args.order) {
        return Err(Failure::Usage("--order must be 2, 4 or 6".into()));
    }
    if args.steps == 0 || !(args.t_end > 0.0 && args.t_end.is_finite()) {
        return Err(Failure::Usage("need --steps ≥ 1 and a positive --t-end".into()));
    }
    let a = |t: f64| problem.matrix(t);
    let config = IntegratorConfig { order: args.order, steps: args.steps, t0: 0.0, t1: args.t_end };
    let traj = numeric::integrate(&a, &config)?;
    let mut csv = String::from("t,norm,det\n");
    for (t, y) in traj.times.iter().zip(&traj.states) {
        csv.push_str(&format!("{t:.12e},{:.12e},{:.12e}\n", y.norm(), y.determinant()));
    }
    print!("{csv}");
    let reference = problem.reference(args.t_end);
    let error = (traj.last() - &reference).abs().max();
    let finer = numeric::global_error(problem, args.order, 2 * args.steps, args.t_end)?;
    let slope = if error > 0.0 && finer > 0.0 { Some((error / finer).log2()) } else { None };
    let payload = json!({
        "order": args.order,
        "steps": args.steps,
        "problem": problem.name(),
        "error_vs_reference": error,
        "slope": slope,
    });
    let text = format!(
        "order {} steps {} error {error:.3e} slope {}",
        args.order,
        args.steps,
        slope.map_or("n/a".into(), |s| format!("{s:.3}"))
    );
    Ok(Output { config: serde_json::to_value(args).expect("json"), payload, text })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Trees(TreesCmd::Enum { .. }) => "trees enum",
        Command::Magnus(m) => match m {
            MagnusCmd::Planar(_) => "magnus planar",
            MagnusCmd::Nonplanar(_) => "magnus nonplanar",
            MagnusCmd::Recursion(_) => "magnus recursion",
            MagnusCmd::GlLog(_) => "magnus gl-log",
            MagnusCmd::Counts(_) => "magnus counts",
            MagnusCmd::Lie { .. } => "magnus lie",
            MagnusCmd::Blanes { .. } => "magnus blanes",
        },
        Command::Verify(VerifyCmd::All { .. }) => "verify all",
        Command::Integrate(_) => "integrate",
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let cap = max_order()?;
    match &cli.command {
        Command::Trees(cmd) => run_trees(cmd, cap),
        Command::Magnus(cmd) => run_magnus(cmd, cap),
        Command::Verify(VerifyCmd::All { max_order }) => run_verify(*max_order, cap),
        Command::Integrate(args) => run_integrate(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", envelope(name, &out)),
                Format::Text => println!("{}", out.text),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
