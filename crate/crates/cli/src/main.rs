//! `rknl`: normalize, trace and check λ-terms with the RKNL machine.
//!
//! Exit status: 0 success, 1 usage or parse error, 2 fuel exhausted,
//! 3 failed verification or benchmark mismatch.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rknl::decode::check_trace;
use rknl::families::{self, Family, VALID_N};
use rknl::ghost::lockstep_check;
use rknl::kl::{bisim_check, KlMachine, KlOptions, KlStep};
use rknl::potential::{self, Violation};
use rknl::{oracle, parse, run, MachineOptions, Term};

#[derive(Parser)]
#[command(name = "rknl", version, about = "Strong call-by-need normalization of λ-terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form and a step summary.
    Normalize {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = EngineArg::Rknl)]
        engine: EngineArg,
        #[command(flatten)]
        run: RunArgs,
        /// Also write a JSON-lines trace to this file.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Emit one JSON line per transition.
    Trace {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = EngineArg::Rknl)]
        engine: EngineArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Emit the potential of every configuration as CSV.
    Potential {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Measure the term families against their closed-form step counts.
    Bench {
        #[arg(long)]
        family: Option<Family>,
        /// A single n; all of 1..=9 when absent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the machine against its checkers.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Term text, e.g. '(\x.x) y'.
    #[arg(long)]
    term: Option<String>,
    /// File holding the term text.
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// One of the benchmark families; needs --n.
    #[arg(long, requires = "n")]
    family: Option<Family>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, requires = "family")]
    n: Option<u32>,
    /// Maximum number of transitions.
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Write the main output here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Rknl,
    #[value(name = "rknl-no8")]
    RknlNo8,
    Kl,
    No,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Decode,
    Ghost,
    #[value(name = "kl-bisim")]
    KlBisim,
    Potential,
    Bilinear,
    All,
}

enum Failure {
    Usage(String),
    Fuel(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Fuel(_) => 2,
            Failure::Verify(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Fuel(m) | Failure::Verify(m) => m,
        }
    }
}

type CliResult = Result<(), Failure>;

fn load(source: &Source, n: Option<u32>) -> Result<Term, Failure> {
    let text = match (&source.term, &source.file, source.family) {
        (Some(t), _, _) => t.clone(),
        (_, Some(path), _) => fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        (_, _, Some(family)) => return Ok(family.make(n.expect("clap requires --n with --family"))),
        _ => unreachable!("clap requires one term source"),
    };
    parse(text.trim()).map_err(|e| Failure::Usage(e.to_string()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_closed(t: &Term) -> CliResult {
    let free = t.free_vars();
    if free.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = free.iter().map(|x| x.to_string()).collect();
    Err(Failure::Usage(format!("the kl engine needs a closed term; free: {}", names.join(", "))))
}

fn json_line<T: Serialize>(out: &mut String, record: &T) {
    out.push_str(&serde_json::to_string(record).expect("records serialize"));
    out.push('\n');
}

#[derive(Serialize)]
struct NoRecord {
    step: u64,
    term: String,
}

/// What an engine run produced; `answer` is `None` when fuel ran out.
struct Finished {
    answer: Option<Term>,
    steps: u64,
    beta: u64,
    trace: String,
}

fn execute(t: &Term, engine: EngineArg, fuel: u64, trace: bool) -> Result<Finished, Failure> {
    let mut lines = String::new();
    match engine {
        EngineArg::Rknl | EngineArg::RknlNo8 => {
            let opts = MachineOptions { no8: engine == EngineArg::RknlNo8 };
            let r = run(t, opts, fuel, trace).map_err(|e| Failure::Verify(e.to_string()))?;
            if let Some(tr) = &r.trace {
                lines = tr.to_jsonl(&r.store);
            }
            Ok(Finished { answer: r.normal_form().cloned(), steps: r.steps, beta: r.beta_steps, trace: lines })
        }
        EngineArg::Kl => {
            require_closed(t)?;
            let mut m = KlMachine::new(t, KlOptions::default());
            let mut beta = 0;
            let answer = loop {
                if m.steps() == fuel {
                    break None;
                }
                match m.step().map_err(|e| Failure::Usage(e.to_string()))? {
                    KlStep::Answer(v) => break Some(v),
                    KlStep::Moved { rule, .. } => {
                        beta += u64::from(rule == 6);
                        if trace {
                            json_line(&mut lines, &m.record(rule));
                        }
                    }
                }
            };
            Ok(Finished { answer, steps: m.steps(), beta, trace: lines })
        }
        EngineArg::No => {
            let mut cur = t.clone();
            let mut steps = 0;
            let answer = loop {
                let Some(next) = oracle::no_step(&cur) else { break Some(cur) };
                if steps == fuel {
                    break None;
                }
                steps += 1;
                cur = next;
                if trace {
                    json_line(&mut lines, &NoRecord { step: steps, term: cur.to_string() });
                }
            };
            Ok(Finished { answer, steps, beta: steps, trace: lines })
        }
    }
}

fn fuel_out(steps: u64) -> Failure {
    Failure::Fuel(format!("fuel exhausted after {steps} steps"))
}

fn normalize(t: &Term, engine: EngineArg, run: &RunArgs, trace: &Option<PathBuf>) -> CliResult {
    let f = execute(t, engine, run.fuel, trace.is_some())?;
    if trace.is_some() {
        emit(trace, &f.trace)?;
    }
    let Some(answer) = f.answer else { return Err(fuel_out(f.steps)) };
    emit(&run.out, &format!("{answer}\nsteps={} beta={}\n", f.steps, f.beta))
}

fn trace(t: &Term, engine: EngineArg, run: &RunArgs) -> CliResult {
    let f = execute(t, engine, run.fuel, true)?;
    emit(&run.out, &f.trace)?;
    match f.answer {
        Some(_) => Ok(()),
        None => Err(fuel_out(f.steps)),
    }
}

fn potential_csv(t: &Term, run_args: &RunArgs) -> CliResult {
    let r = run(t, MachineOptions::default(), run_args.fuel, true).map_err(|e| Failure::Verify(e.to_string()))?;
    let report = potential::check_run(t, r.trace.as_ref().expect("traced"), &r.store);
    emit(&run_args.out, &report.to_csv())?;
    if let Some(v) = report.violations.first() {
        return Err(Failure::Verify(format!("potential: {v:?}")));
    }
    match r.normal_form() {
        Some(_) => Ok(()),
        None => Err(fuel_out(r.steps)),
    }
}

fn bench(family: Option<Family>, n: Option<u32>, engine: Option<EngineArg>, out: &Option<PathBuf>) -> CliResult {
    let families = family.map_or(Family::ALL.to_vec(), |f| vec![f]);
    let ns = match n {
        Some(n) if VALID_N.contains(&n) => n..=n,
        Some(n) => return Err(Failure::Usage(format!("--n {n} is outside 1..=9"))),
        None => VALID_N,
    };
    let engines = match engine {
        None => families::Engine::MEASURED.to_vec(),
        Some(EngineArg::No) => vec![families::Engine::No],
        Some(EngineArg::Rknl) => vec![families::Engine::Rknl],
        Some(EngineArg::RknlNo8) => vec![families::Engine::RknlNo8],
        Some(EngineArg::Kl) => return Err(Failure::Usage("the families are not measured on kl".into())),
    };
    let mut rows = Vec::new();
    for &f in &families {
        for n in ns.clone() {
            for &e in &engines {
                rows.push(families::measure(f, e, n).map_err(|e| Failure::Verify(e.to_string()))?);
            }
        }
    }
    emit(out, &families::table_csv(&rows))?;
    let bad = rows.iter().filter(|r| !r.matches()).count();
    if bad > 0 {
        return Err(Failure::Verify(format!("{bad} of {} cells differ from the closed forms", rows.len())));
    }
    Ok(())
}

/// Oracle budget when searching for the target of a bypass step.
const BYPASS_BUDGET: u64 = 100_000;

fn verify(check: Check, t: &Term, run_args: &RunArgs) -> CliResult {
    let fuel = run_args.fuel;
    let want = |c: Check| check == c || check == Check::All;
    if check == Check::KlBisim {
        require_closed(t)?;
    }
    let r = run(t, MachineOptions::default(), fuel, true).map_err(|e| Failure::Verify(e.to_string()))?;
    let tr = r.trace.as_ref().expect("traced");
    let prefix = match r.normal_form() {
        Some(_) => String::new(),
        None => format!(", fuel exhausted after {} steps", r.steps),
    };
    let mut lines = Vec::new();
    let mut failed = false;
    let mut note = |ok: bool, line: String| {
        failed |= !ok;
        lines.push(line);
    };
    if want(Check::Decode) {
        let d = check_trace(t, tr, &r.store, r.normal_form(), BYPASS_BUDGET.min(fuel));
        match d.first_failure() {
            _ if d.passed() => {
                let witnessed = d.witnessed_no_steps().map_or("some steps inconclusive".to_string(), |w| {
                    format!("{w} normal-order steps witnessed")
                });
                note(true, format!("decode: pass ({} steps, {} by rule 6, {witnessed}{prefix})", r.steps, d.rule6_steps()));
            }
            Some((i, v)) => note(false, format!("decode: FAIL at step {i}: {v}")),
            None if !d.load_ok => note(false, "decode: FAIL: load does not decode to the input".into()),
            None if d.unload_ok == Some(false) => note(false, "decode: FAIL: output is not the final decoding".into()),
            None => note(false, format!("decode: FAIL: stack not a normal-order context at steps {:?}", d.bad_contexts)),
        }
    }
    if want(Check::Ghost) {
        match lockstep_check(t, fuel) {
            Ok(g) if g.passed() => {
                note(true, format!("ghost: pass ({} steps, {} silent ghost steps{prefix})", g.steps, g.silent_steps))
            }
            Ok(g) => match g.divergence {
                Some(d) => note(false, format!("ghost: FAIL at step {}: {} [{} | {}]", d.step, d.reason, d.rknl, d.ghost)),
                None => note(false, format!("ghost: FAIL: stack shape broken at steps {:?}", g.bad_stacks)),
            },
            Err(e) => note(false, format!("ghost: FAIL: {e}")),
        }
    }
    if want(Check::KlBisim) {
        if t.free_vars().is_empty() {
            let b = bisim_check(t, fuel);
            match &b.failure {
                None if b.completed => note(true, format!("kl-bisim: pass ({} steps)", b.steps)),
                None => note(true, format!("kl-bisim: pass ({} steps, fuel exhausted)", b.steps)),
                Some(f) => note(false, format!("kl-bisim: FAIL: {f}")),
            }
        } else {
            note(true, "kl-bisim: skipped (open term)".into());
        }
    }
    if want(Check::Potential) || want(Check::Bilinear) {
        let p = potential::check_run(t, tr, &r.store);
        let (bilinear, per_step): (Vec<&Violation>, Vec<&Violation>) =
            p.violations.iter().partition(|v| matches!(v, Violation::Bilinearity { .. }));
        if want(Check::Potential) {
            match per_step.first() {
                None => {
                    let shape = match p.increases() {
                        inc if inc.is_empty() => "non-increasing".to_string(),
                        inc if inc.len() <= 12 => format!("increases at steps {inc:?}"),
                        inc => format!("{} increases", inc.len()),
                    };
                    note(true, format!("potential: pass ({} configurations, phi_t0={}, {shape}{prefix})", p.records.len(), p.phi_t0));
                }
                Some(v) => note(false, format!("potential: FAIL: {v:?}")),
            }
        }
        if want(Check::Bilinear) {
            let bound = (r.beta_steps + 1).saturating_mul(p.phi_t0);
            match bilinear.first() {
                None => note(true, format!("bilinear: pass ({} <= ({} + 1) * {} = {bound})", r.steps, r.beta_steps, p.phi_t0)),
                Some(v) => note(false, format!("bilinear: FAIL: {v:?}")),
            }
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    emit(&run_args.out, &text)?;
    if failed {
        Err(Failure::Verify("verification failed".into()))
    } else if r.normal_form().is_none() {
        Err(fuel_out(r.steps))
    } else {
        Ok(())
    }
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Normalize { source, engine, run, trace } => normalize(&load(&source, run.n)?, engine, &run, &trace),
        Command::Trace { source, engine, run } => trace(&load(&source, run.n)?, engine, &run),
        Command::Potential { source, run } => potential_csv(&load(&source, run.n)?, &run),
        Command::Bench { family, n, engine, out } => bench(family, n, engine, &out),
        Command::Verify { check, source, run } => verify(check, &load(&source, run.n)?, &run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rknl: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
