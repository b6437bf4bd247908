//! Subcommands. Machine-readable lines go to stdout, everything meant for a
//! person to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use fofkit::analysis::{overview_dot, parse_derivation, to_dot, unused_lemmas, DerivationGraph, DotMode};
use fofkit::dijkstra::{generate_run, generate_spec_text, invariant_from_script};
use fofkit::engine::{expand_script, export_tasks, plan_with, run, Plan, PlanOptions, RunOptions};
use fofkit::model::{check_axioms, evaluate_closed, PartialModel};
use fofkit::prover::{Backend, BackendConfig, Builtin, External, Status};
use fofkit::syntax::{parse_formula, parse_script_file, ProofScript};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

type CliResult = Result<ExitCode, String>;

#[derive(Parser, Debug)]
#[command(name = "fofkit", version, about = "First-order proof workbench")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prove every task of a script.
    Check(CheckArgs),
    /// Print the tasks a script produces, with their premises.
    Plan(PlanArgs),
    /// Write one TPTP problem per task plus a manifest.
    Export(ExportArgs),
    /// Render prover derivations as DOT.
    Viz(VizArgs),
    /// Report pooled statements no derivation uses.
    Unused(UnusedArgs),
    /// Print a script with its definitions expanded.
    Expand(ExpandArgs),
    /// Generate the mutual-exclusion example specification.
    GenSpec(GenSpecArgs),
    /// Simulate the mutual-exclusion protocol into a model file.
    GenRun(GenRunArgs),
    /// Evaluate a script's axioms, or one formula, on a model.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct ScriptArgs {
    script: PathBuf,
    /// Directory for relative includes (default: the script's own).
    #[arg(long)]
    include_dir: Option<PathBuf>,
    /// Treat every lemma before this one as already verified.
    #[arg(long)]
    from: Option<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    script: ScriptArgs,
    /// `builtin`, `eprover`, `vampire`, or a name from --backend-config.
    #[arg(long)]
    backend: Option<String>,
    /// Backend definitions, one `name<TAB>template<TAB>success<TAB>failure` per line.
    #[arg(long)]
    backend_config: Option<PathBuf>,
    /// Seconds per task.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[arg(long, short = 'j', default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    stop_on_failure: bool,
    /// Save each prover's derivation as `<task>.tstp` here.
    #[arg(long)]
    derivations: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    script: ScriptArgs,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    script: ScriptArgs,
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct VizArgs {
    /// Derivation files; a directory stands for every file in it.
    #[arg(required = true)]
    derivations: Vec<PathBuf>,
    #[arg(long, default_value = "detail")]
    mode: DotMode,
    /// Limit overview nodes to the statements this script pools.
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UnusedArgs {
    #[arg(long)]
    script: PathBuf,
    /// Derivation files named `<task>.<ext>`; a directory stands for every file in it.
    derivations: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    script: PathBuf,
    /// Definitions to expand everywhere, comma separated.
    #[arg(long = "def", value_delimiter = ',')]
    defs: Vec<String>,
}

#[derive(Args, Debug)]
struct GenSpecArgs {
    /// Number of agents.
    #[arg(short = 'n', long)]
    agents: usize,
    /// File whose first hypothesis `![T]: ...` is the inductive invariant.
    #[arg(long)]
    invariant: Option<PathBuf>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenRunArgs {
    #[arg(short = 'n', long)]
    agents: usize,
    /// Number of steps; the model has moments t0..tk.
    #[arg(short = 'k', long)]
    moments: usize,
    /// Comma-separated 1-based agent indices, one per step (default: round robin).
    #[arg(long)]
    schedule: Option<String>,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, required_unless_present = "formula")]
    spec: Option<PathBuf>,
    /// A closed formula to evaluate instead of the axioms.
    #[arg(long, conflicts_with = "spec")]
    formula: Option<String>,
}

pub fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Check(a) => check(a),
        Command::Plan(a) => plan_cmd(a),
        Command::Export(a) => export(a),
        Command::Viz(a) => viz(a),
        Command::Unused(a) => unused(a),
        Command::Expand(a) => expand(a),
        Command::GenSpec(a) => gen_spec(a),
        Command::GenRun(a) => gen_run(a),
        Command::Eval(a) => eval(a),
    }
}

fn code(ok: bool) -> ExitCode {
    ExitCode::from(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn read_script(path: &Path, include_dir: Option<&Path>) -> Result<ProofScript, String> {
    parse_script_file(path, include_dir).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_plan(a: &ScriptArgs) -> Result<Plan, String> {
    let script = read_script(&a.script, a.include_dir.as_deref())?;
    let opts = PlanOptions { from: a.from.clone() };
    plan_with(&script, &opts).map_err(|e| format!("{}: {e}", a.script.display()))
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), String> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn backend(a: &CheckArgs) -> Result<Box<dyn Backend>, String> {
    let configs = match &a.backend_config {
        Some(p) => BackendConfig::load(p).map_err(|e| e.to_string())?,
        None => Vec::new(),
    };
    let chosen = match (a.backend.as_deref(), configs.first()) {
        (Some("builtin"), _) | (None, None) => return Ok(Box::new(Builtin::default())),
        (None, Some(first)) => first.clone(),
        (Some(name), _) => match configs.iter().find(|c| c.name == name) {
            Some(c) => c.clone(),
            None if name == "eprover" => BackendConfig::eprover(),
            None if name == "vampire" => BackendConfig::vampire(),
            None => return Err(format!("no backend named `{name}`")),
        },
    };
    Ok(Box::new(External { config: chosen }))
}

fn check(a: CheckArgs) -> CliResult {
    let plan = load_plan(&a.script)?;
    let backend = backend(&a)?;
    if !(a.timeout > 0.0 && a.timeout.is_finite()) {
        return Err("--timeout must be a positive number of seconds".into());
    }
    if let Some(dir) = &a.derivations {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    let opts = RunOptions {
        timeout: Duration::from_secs_f64(a.timeout),
        parallel: a.parallel,
        stop_on_failure: a.stop_on_failure,
    };
    let stdout = std::io::stdout();
    let mut save_error = None;
    let report = run(&plan, backend.as_ref(), &opts, |r| {
        let mut out = stdout.lock();
        let _ = writeln!(out, "{}", r.line());
        let _ = out.flush();
        if let (Some(dir), Some(text)) = (&a.derivations, &r.verdict.derivation_text) {
            let path = dir.join(format!("{}.tstp", fofkit::engine::sanitize_file_stem(&r.id)));
            if let Err(e) = fs::write(&path, text) {
                save_error.get_or_insert(format!("cannot write {}: {e}", path.display()));
            }
        }
        if let Some(note) = &r.verdict.note {
            eprintln!("{}: {note}", r.id);
        }
    });
    eprint!("{}", report.table());
    let proved = report.count(Status::Proved);
    println!(
        "summary\tproved={proved}\tfailed={}\tnot_attempted={}\tskipped={}",
        report.results.len() - proved - report.count(Status::NotAttempted),
        report.count(Status::NotAttempted),
        report.skipped.len()
    );
    if let Some(e) = save_error {
        return Err(e);
    }
    Ok(code(report.success()))
}

fn plan_cmd(a: PlanArgs) -> CliResult {
    let plan = load_plan(&a.script)?;
    for t in &plan.tasks {
        println!("{}\t{}\t{}", t.id, t.premise_names().join(","), t.depends_on.join(","));
    }
    if !plan.skipped.is_empty() {
        eprintln!("assumed without proof: {}", plan.skipped.join(", "));
    }
    Ok(code(true))
}

fn export(a: ExportArgs) -> CliResult {
    let plan = load_plan(&a.script)?;
    let manifest = export_tasks(&plan, &a.out_dir).map_err(|e| e.to_string())?;
    eprintln!("wrote {} task files to {}", manifest.entries.len(), a.out_dir.display());
    Ok(code(true))
}

/// `(task id, path)` for each file argument, expanding directories.
fn derivation_files(args: &[PathBuf]) -> Result<Vec<(String, PathBuf)>, String> {
    let mut out = Vec::new();
    for p in args {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            entries.sort();
            out.extend(entries.into_iter().map(|e| (stem(&e), e)));
        } else {
            out.push((stem(p), p.clone()));
        }
    }
    Ok(out)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn load_derivations(args: &[PathBuf]) -> Result<BTreeMap<String, DerivationGraph>, String> {
    let mut out = BTreeMap::new();
    for (id, path) in derivation_files(args)? {
        let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let g = parse_derivation(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if g.skipped_lines > 0 {
            eprintln!("{}: skipped {} non-statement lines", path.display(), g.skipped_lines);
        }
        out.insert(id, g);
    }
    Ok(out)
}

fn viz(a: VizArgs) -> CliResult {
    let graphs = load_derivations(&a.derivations)?;
    let dot = match a.mode {
        DotMode::Detail => {
            let mut it = graphs.values();
            match (it.next(), it.next()) {
                (Some(g), None) => to_dot(g, DotMode::Detail),
                _ => return Err("detail mode takes exactly one derivation".into()),
            }
        }
        DotMode::Overview => {
            let roles = match &a.script {
                Some(s) => Some(plan_with(&read_script(s, None)?, &PlanOptions::default()).map_err(|e| e.to_string())?.pool_roles),
                None => None,
            };
            overview_dot(&graphs, roles.as_ref())
        }
    };
    print!("{dot}");
    Ok(code(true))
}

fn unused(a: UnusedArgs) -> CliResult {
    let script = read_script(&a.script, None)?;
    let plan = plan_with(&script, &PlanOptions::default()).map_err(|e| e.to_string())?;
    let graphs = load_derivations(&a.derivations)?;
    let report = unused_lemmas(&plan, &graphs);
    if report.no_evidence {
        eprintln!("warning: no derivations given; nothing counts as used");
    }
    for l in &report.lemmas {
        println!("lemma\t{l}");
    }
    for b in &report.base_axioms {
        println!("base\t{b}");
    }
    Ok(code(true))
}

fn expand(a: ExpandArgs) -> CliResult {
    let script = read_script(&a.script, None)?;
    let out = expand_script(&script, &a.defs).map_err(|e| format!("{}: {e}", a.script.display()))?;
    print!("{out}");
    Ok(code(true))
}

fn gen_spec(a: GenSpecArgs) -> CliResult {
    let invariant = match &a.invariant {
        Some(p) => Some(invariant_from_script(&read_script(p, None)?).map_err(|e| e.to_string())?),
        None => None,
    };
    let text = generate_spec_text(a.agents, invariant.as_ref()).map_err(|e| e.to_string())?;
    write_out(a.output.as_deref(), &text)?;
    Ok(code(true))
}

fn parse_schedule(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<usize>().map_err(|_| format!("schedule entry `{w}` is not a number")))
        .collect()
}

fn gen_run(a: GenRunArgs) -> CliResult {
    let schedule = match &a.schedule {
        Some(s) => parse_schedule(s)?,
        None => (0..a.moments).map(|i| i % a.agents.max(1) + 1).collect(),
    };
    let model = generate_run(a.agents, a.moments, &schedule).map_err(|e| e.to_string())?;
    write_out(a.output.as_deref(), &model.to_string())?;
    Ok(code(true))
}

fn eval(a: EvalArgs) -> CliResult {
    let text = fs::read_to_string(&a.model).map_err(|e| format!("cannot read {}: {e}", a.model.display()))?;
    let model: PartialModel = text.parse().map_err(|e| format!("{}: {e}", a.model.display()))?;
    if let Some(f) = &a.formula {
        let f = parse_formula(f).map_err(|e| format!("--formula: {e}"))?;
        let v = evaluate_closed(&f, &model);
        println!("{v}");
        return Ok(code(v != fofkit::model::TruthValue::False));
    }
    let spec = a.spec.expect("clap requires --spec without --formula");
    let script = read_script(&spec, None)?;
    let report = check_axioms(&script, &model);
    for (label, names) in [("true", &report.true_), ("false", &report.false_), ("unknown", &report.unknown)] {
        for n in names {
            println!("{label}\t{n}");
        }
    }
    for (label, names) in [("true", &report.true_), ("false", &report.false_), ("unknown", &report.unknown)] {
        println!("{label}: {}", names.len());
    }
    Ok(code(report.false_.is_empty()))
}
