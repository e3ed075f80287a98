use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use aspv::analysis::{build_dependency_graph, check_interface, format_cycle, is_tight, InterfaceDecl};
use aspv::fol::{Dialect, EmitOptions, GroundAtom, NamedFormula, Style, Value};
use aspv::oracle::{self, DisplayModel, Domain, ModelSet, OracleLimits};
use aspv::registry::{self, BoundedCheck, PostconditionCheck, RenamingMap};
use aspv::syntax::{parse_program, print_program, Predicate, Program};
use aspv::translation::{complete, CompletionOptions};
use aspv::verification::{
    assemble_adherence, assemble_equivalence, parse_spec, run_tasks, AdherenceOptions, ProverConfig, SpecFile,
    Status, Verdict, VerificationTask,
};

/// Verification toolchain for tight answer set programs: completion,
/// TPTP emission, prover-backed adherence and equivalence checks, a
/// reference stable-model oracle and a module registry.
///
/// Exit status: 0 success or verified, 1 not verified, 2 usage or input
/// error.
#[derive(Parser)]
#[command(name = "aspv", version)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to this file instead of standard output.
    #[arg(short = 'o', long = "output", global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and print it in normal form.
    Parse { file: PathBuf },
    /// Report tightness and the predicate dependency graph.
    Analyze {
        file: PathBuf,
        /// Print the dependency graph in Graphviz format.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        interface: InterfaceArgs,
    },
    /// Print the completion of a tight program.
    Complete {
        file: PathBuf,
        #[command(flatten)]
        interface: InterfaceArgs,
        /// Complete a non-tight program anyway (the result is unsound).
        #[arg(long)]
        force: bool,
        /// Use ASCII connectives instead of Unicode.
        #[arg(long)]
        ascii: bool,
        /// Skip simplification.
        #[arg(long)]
        raw: bool,
    },
    /// Write TPTP problems: the completion, or one problem per task when a
    /// spec file is given.
    Emit {
        file: PathBuf,
        #[command(flatten)]
        interface: InterfaceArgs,
        #[arg(long, value_enum, default_value_t = DialectArg::Tff)]
        dialect: DialectArg,
        /// Integer range `lo..hi`, required by the fof dialect.
        #[arg(long, value_name = "LO..HI", value_parser = parse_range)]
        int_range: Option<(i64, i64)>,
        /// Write one `<task>.p` file per task into this directory.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Add tasks proving the completion from the specification.
        #[arg(long)]
        complete_both_directions: bool,
    },
    /// Prove that a program adheres to its specification.
    Verify {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[command(flatten)]
        prover: ProverArgs,
        /// Add tasks proving the completion from the specification.
        #[arg(long)]
        complete_both_directions: bool,
        /// Also search for finite countermodels with integers in `lo..hi`.
        #[arg(long, value_name = "LO..HI", value_parser = parse_range)]
        int_range: Option<(i64, i64)>,
        /// Extra symbolic constants for the countermodel search.
        #[arg(long, value_delimiter = ',', value_name = "A,B,...")]
        universe: Vec<String>,
        #[arg(long, default_value_t = OracleLimits::default().max_base)]
        max_base: usize,
    },
    /// Prove that two programs have the same answer sets on the public
    /// predicates.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        interface: InterfaceArgs,
        #[command(flatten)]
        prover: ProverArgs,
        /// Also compare projected stable models on every input instance.
        #[arg(long)]
        oracle: bool,
        /// Integer range for the oracle comparison.
        #[arg(long, value_name = "LO..HI", value_parser = parse_range)]
        int_range: Option<(i64, i64)>,
        /// Extra symbolic constants for the oracle comparison.
        #[arg(long, value_delimiter = ',', value_name = "A,B,...")]
        universe: Vec<String>,
        #[arg(long, default_value_t = OracleLimits::default().max_base)]
        max_base: usize,
    },
    /// Enumerate stable models by grounding and reduct checking.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
        /// Print the ground program instead of its stable models.
        #[arg(long)]
        ground: bool,
    },
    /// Compare stable models with the models of the completion.
    Crosscheck {
        file: PathBuf,
        #[command(flatten)]
        domain: DomainArgs,
        /// Input predicates; defaults to the predicates of the facts file
        /// that no rule defines.
        #[arg(long, value_delimiter = ',', value_name = "P/N,...", value_parser = parse_predicate)]
        inputs: Vec<Predicate>,
    },
    /// Check or apply a module from a registry directory.
    Module {
        #[command(subcommand)]
        command: ModuleCommand,
    },
}

#[derive(Subcommand)]
enum ModuleCommand {
    /// Check the module's postcondition and compare it with its reference
    /// on bounded instances.
    Check {
        dir: PathBuf,
        /// Largest universe size.
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[command(flatten)]
        prover: ProverArgs,
        #[arg(long, default_value_t = OracleLimits::default().max_base)]
        max_base: usize,
    },
    /// Print the module renamed into the user's vocabulary.
    Apply {
        dir: PathBuf,
        /// Renaming `user/n=module/n,...`; omitted predicates keep their
        /// names.
        #[arg(long, value_name = "MAP")]
        map: Option<String>,
        /// User program to append the module to.
        #[arg(long, value_name = "FILE")]
        into: Option<PathBuf>,
        /// Distinguishes private predicates of repeated instantiations.
        #[arg(long)]
        instance: Option<String>,
    },
}

#[derive(Args)]
struct InterfaceArgs {
    /// Spec file whose input and output directives give the interface.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["inputs", "outputs"])]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_name = "P/N,...", value_parser = parse_predicate)]
    inputs: Vec<Predicate>,
    #[arg(long, value_delimiter = ',', value_name = "P/N,...", value_parser = parse_predicate)]
    outputs: Vec<Predicate>,
}

#[derive(Args)]
struct ProverArgs {
    /// Prover executable.
    #[arg(long, env = "ASP_VERIFY_PROVER", value_name = "PATH")]
    prover: Option<PathBuf>,
    /// Seconds per task.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    /// Largest number of concurrent prover processes.
    #[arg(long)]
    cores: Option<usize>,
    /// Prover argument, repeatable; replaces the built-in flags.
    #[arg(long = "prover-arg", value_name = "ARG", allow_hyphen_values = true)]
    prover_args: Vec<String>,
}

#[derive(Args)]
struct DomainArgs {
    /// Facts file (ground facts only).
    #[arg(long, value_name = "FILE")]
    facts: Option<PathBuf>,
    /// Integer range; defaults to the span of the integers in the program
    /// and facts.
    #[arg(long, value_name = "LO..HI", value_parser = parse_range)]
    int_range: Option<(i64, i64)>,
    /// Extra symbolic constants.
    #[arg(long, value_delimiter = ',', value_name = "A,B,...")]
    universe: Vec<String>,
    /// Largest number of guessed atoms.
    #[arg(long, default_value_t = OracleLimits::default().max_base)]
    max_base: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Tff,
    Fof,
}

fn parse_predicate(s: &str) -> Result<Predicate, String> {
    Predicate::parse(s.trim()).ok_or_else(|| format!("`{s}` is not of the form name/arity"))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// Outcome of a successful run: `Verified` exits 0, `NotVerified` exits 1.
enum Outcome {
    Verified,
    NotVerified,
}

struct Output {
    json: bool,
    path: Option<PathBuf>,
}

impl Output {
    /// Writes `text` or `report` depending on `--json`.
    fn emit(&self, text: &str, report: Json) -> Result<()> {
        let body = if self.json {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        } else {
            text.to_string()
        };
        match &self.path {
            Some(p) => fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output {
        json: cli.json,
        path: cli.output,
    };
    match run(cli.command, &out) {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::NotVerified) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_spec(path: &Path) -> Result<SpecFile> {
    parse_spec(&read(path)?).with_context(|| format!("{}", path.display()))
}

impl InterfaceArgs {
    fn spec(&self) -> Result<SpecFile> {
        match &self.spec {
            Some(path) => load_spec(path),
            None => Ok(SpecFile {
                interface: InterfaceDecl::new(self.inputs.iter().cloned(), self.outputs.iter().cloned())?,
                ..SpecFile::default()
            }),
        }
    }
}

impl ProverArgs {
    fn config(&self) -> Result<ProverConfig> {
        let path = self
            .prover
            .clone()
            .ok_or_else(|| anyhow!("no prover configured (use --prover or ASP_VERIFY_PROVER)"))?;
        if !self.timeout.is_finite() || self.timeout < 0.0 {
            bail!("invalid timeout {}", self.timeout);
        }
        let mut config = ProverConfig::new(path, Duration::from_secs_f64(self.timeout));
        if !self.prover_args.is_empty() {
            config.args = self.prover_args.clone();
        }
        if let Some(c) = self.cores {
            config.cores = c.max(1);
        }
        Ok(config)
    }
}

fn names(preds: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    preds.into_iter().map(|p| p.to_string()).collect()
}

fn model_json(model: &BTreeSet<GroundAtom>) -> Json {
    json!(names(model))
}

fn models_json(models: &ModelSet) -> Json {
    Json::Array(models.iter().map(model_json).collect())
}

fn models_text(models: &ModelSet) -> String {
    models.iter().map(|m| format!("{}\n", DisplayModel(m))).collect()
}

/// Domain of the program and facts: their constants plus `--universe`,
/// and integers from `--int-range` or the span of the integer literals.
fn domain_of(programs: &[&Program], facts: &BTreeSet<GroundAtom>, universe: &[String], range: Option<(i64, i64)>) -> Domain {
    let mut symbols: BTreeSet<String> = universe.iter().cloned().collect();
    let mut ints = BTreeSet::new();
    for p in programs {
        symbols.extend(p.symbols());
        ints.extend(p.integers());
    }
    for a in facts {
        for v in &a.args {
            match v {
                Value::Int(i) => {
                    ints.insert(*i);
                }
                Value::Sym(s) => {
                    symbols.insert(s.clone());
                }
            }
        }
    }
    let bounds = range.or_else(|| Some((*ints.first()?, *ints.last()?)));
    Domain::new(symbols, bounds)
}

fn load_facts(path: Option<&Path>) -> Result<BTreeSet<GroundAtom>> {
    match path {
        None => Ok(BTreeSet::new()),
        Some(p) => Ok(oracle::facts_of(&load_program(p)?).with_context(|| format!("{}", p.display()))?),
    }
}

fn run(command: Command, out: &Output) -> Result<Outcome> {
    match command {
        Command::Parse { file } => {
            let program = load_program(&file)?;
            let text = print_program(&program);
            out.emit(
                &text,
                json!({
                    "rules": program.rules.len(),
                    "signature": names(program.signature()),
                    "program": text,
                }),
            )?;
            Ok(Outcome::Verified)
        }
        Command::Analyze { file, dot, interface } => analyze(&file, dot, &interface, out),
        Command::Complete {
            file,
            interface,
            force,
            ascii,
            raw,
        } => {
            let program = load_program(&file)?;
            let spec = interface.spec()?;
            let theory = complete(&program, &spec.interface, CompletionOptions { force, simplify: !raw })?;
            if let Some(w) = &theory.warning {
                eprintln!("warning: {w}");
            }
            let style = if ascii { Style::Ascii } else { Style::Unicode };
            let named = theory.named_formulas();
            let text: String = named
                .iter()
                .map(|f| format!("{}: {}\n", f.name, f.formula.display(style)))
                .collect();
            let formulas: Vec<Json> = named
                .iter()
                .map(|f| json!({"name": f.name, "formula": f.formula.display(Style::Ascii).to_string()}))
                .collect();
            out.emit(&text, json!({"unsound": theory.unsound, "warning": theory.warning, "formulas": formulas}))?;
            Ok(Outcome::Verified)
        }
        Command::Emit {
            file,
            interface,
            dialect,
            int_range,
            out_dir,
            complete_both_directions,
        } => emit(&file, &interface, dialect, int_range, out_dir.as_deref(), complete_both_directions, out),
        Command::Verify {
            file,
            spec,
            prover,
            complete_both_directions,
            int_range,
            universe,
            max_base,
        } => {
            let program = load_program(&file)?;
            let spec = load_spec(&spec)?;
            let aux = spec.auxiliary_predicates();
            if !aux.is_empty() {
                eprintln!("note: predicates outside the interface: {}", names(&aux).join(", "));
            }
            let tasks = assemble_adherence(
                &program,
                &spec,
                AdherenceOptions {
                    both_directions: complete_both_directions,
                },
            )?;
            let config = prover.config()?;
            let verdicts = run_tasks(&tasks, &config)?;
            let domain = (int_range.is_some() || !universe.is_empty())
                .then(|| domain_of(&[&program], &BTreeSet::new(), &universe, int_range));
            report_verdicts(&tasks, &verdicts, domain.as_ref(), max_base, None, out)
        }
        Command::Equiv {
            first,
            second,
            interface,
            prover,
            oracle: use_oracle,
            int_range,
            universe,
            max_base,
        } => {
            let p1 = load_program(&first)?;
            let p2 = load_program(&second)?;
            let spec = interface.spec()?;
            let tasks = assemble_equivalence(&p1, &p2, &spec.interface, &spec.assumes)?;
            let config = prover.config()?;
            let verdicts = run_tasks(&tasks, &config)?;
            let projection = if use_oracle {
                let domain = domain_of(&[&p1, &p2], &BTreeSet::new(), &universe, int_range);
                Some(oracle::compare_projections(
                    &p1,
                    &p2,
                    &spec.interface,
                    &spec.assumes,
                    &domain,
                    OracleLimits { max_base },
                )?)
            } else {
                None
            };
            report_verdicts(&tasks, &verdicts, None, max_base, projection, out)
        }
        Command::Oracle { file, domain, ground } => {
            let program = load_program(&file)?;
            let facts = load_facts(domain.facts.as_deref())?;
            let d = domain_of(&[&program], &facts, &domain.universe, domain.int_range);
            let mut all = program.clone();
            all.extend(&oracle::fact_program(&facts));
            let grounded = oracle::ground(&all, &d)?;
            if ground {
                let text: String = grounded.rules.iter().map(|r| format!("{r}\n")).collect();
                let rules: Vec<String> = grounded.rules.iter().map(ToString::to_string).collect();
                out.emit(&text, json!({"rules": rules}))?;
                return Ok(Outcome::Verified);
            }
            let models = oracle::stable_models(&grounded, OracleLimits { max_base: domain.max_base })?;
            let text = format!("{}{} stable model(s)\n", models_text(&models), models.len());
            out.emit(&text, json!({"domain": d, "stable_models": models_json(&models)}))?;
            Ok(Outcome::Verified)
        }
        Command::Crosscheck { file, domain, inputs } => {
            let program = load_program(&file)?;
            let facts = load_facts(domain.facts.as_deref())?;
            let inputs: BTreeSet<Predicate> = if inputs.is_empty() {
                let heads = program.head_predicates();
                facts
                    .iter()
                    .map(|a| Predicate::new(a.predicate.clone(), a.args.len()))
                    .filter(|p| !heads.contains(p))
                    .collect()
            } else {
                inputs.into_iter().collect()
            };
            let decl = InterfaceDecl::new(inputs, [])?;
            let d = domain_of(&[&program], &facts, &domain.universe, domain.int_range);
            let report = oracle::crosscheck(&program, &decl, &d, &facts, OracleLimits { max_base: domain.max_base })?;
            let mut text = format!(
                "stable models: {}\ncompletion models: {}\n",
                report.stable_models.len(),
                report.completion_models.len()
            );
            text.push_str(&models_text(&report.stable_models));
            if report.equal {
                text.push_str("equal: yes\n");
            } else {
                text.push_str("equal: no\n");
                for m in &report.only_stable {
                    text.push_str(&format!("only stable: {}\n", DisplayModel(m)));
                }
                for m in &report.only_completion {
                    text.push_str(&format!("only completion: {}\n", DisplayModel(m)));
                }
            }
            out.emit(
                &text,
                json!({
                    "domain": d,
                    "inputs": names(decl.inputs()),
                    "equal": report.equal,
                    "stable_models": models_json(&report.stable_models),
                    "completion_models": models_json(&report.completion_models),
                    "only_stable": models_json(&report.only_stable),
                    "only_completion": models_json(&report.only_completion),
                }),
            )?;
            Ok(if report.equal { Outcome::Verified } else { Outcome::NotVerified })
        }
        Command::Module { command } => module(command, out),
    }
}

fn analyze(file: &Path, dot: bool, interface: &InterfaceArgs, out: &Output) -> Result<Outcome> {
    let program = load_program(file)?;
    let graph = build_dependency_graph(&program);
    if dot && !out.json {
        out.emit(&graph.to_dot(), Json::Null)?;
        return Ok(Outcome::Verified);
    }
    let tightness = is_tight(&program);
    let mut text = format!("tight: {}\n", if tightness.tight { "yes" } else { "no" });
    if let Some(cycle) = &tightness.witness {
        text.push_str(&format!("positive cycle: {}\n", format_cycle(cycle)));
    }
    text.push_str(&format!("predicates: {}\n", names(&graph.nodes).join(", ")));
    for e in &graph.edges {
        let sign = match e.polarity {
            aspv::analysis::Polarity::Positive => "+",
            aspv::analysis::Polarity::Negative => "-",
        };
        text.push_str(&format!("  {} -> {} ({sign})\n", e.from, e.to));
    }
    let spec = interface.spec()?;
    let mut report = json!({
        "tight": tightness.tight,
        "cycle": tightness.witness.as_ref().map(names),
        "predicates": names(&graph.nodes),
        "edges": graph.edges.iter().map(|e| json!({
            "from": e.from.to_string(),
            "to": e.to.to_string(),
            "positive": matches!(e.polarity, aspv::analysis::Polarity::Positive),
        })).collect::<Vec<_>>(),
    });
    if dot {
        report["dot"] = json!(graph.to_dot());
    }
    let declared = !spec.interface.inputs().is_empty() || !spec.interface.outputs().is_empty();
    if declared {
        let r = check_interface(&program, &spec.interface);
        if !r.inputs_in_heads.is_empty() {
            text.push_str(&format!("inputs defined by rules: {}\n", names(&r.inputs_in_heads).join(", ")));
        }
        if !r.missing.is_empty() {
            text.push_str(&format!("declared but unused: {}\n", names(&r.missing).join(", ")));
        }
        text.push_str(&format!("private: {}\n", names(&r.private).join(", ")));
        report["interface"] = json!({
            "inputs_in_heads": names(&r.inputs_in_heads),
            "missing": names(&r.missing),
            "private": names(&r.private),
        });
    }
    out.emit(&text, report)?;
    Ok(Outcome::Verified)
}

fn emit(
    file: &Path,
    interface: &InterfaceArgs,
    dialect: DialectArg,
    int_range: Option<(i64, i64)>,
    out_dir: Option<&Path>,
    both_directions: bool,
    out: &Output,
) -> Result<Outcome> {
    let program = load_program(file)?;
    let spec = interface.spec()?;
    let options = EmitOptions {
        dialect: match dialect {
            DialectArg::Tff => Dialect::Tff,
            DialectArg::Fof => Dialect::Fof,
        },
        int_range,
    };
    let problems: Vec<(String, String)> = if interface.spec.is_some() {
        let tasks = assemble_adherence(&program, &spec, AdherenceOptions { both_directions })?;
        tasks
            .iter()
            .map(|t| Ok((t.name.clone(), t.to_tptp(&options)?)))
            .collect::<Result<_>>()?
    } else {
        let theory = complete(&program, &spec.interface, CompletionOptions::default())?;
        let axioms: Vec<NamedFormula> = theory.named_formulas();
        vec![("completion".to_string(), aspv::fol::emit_tptp(&axioms, &options)?)]
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let mut written = Vec::new();
        for (name, text) in &problems {
            let path = dir.join(format!("{name}.p"));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            written.push(path.display().to_string());
        }
        let text: String = written.iter().map(|p| format!("{p}\n")).collect();
        out.emit(&text, json!({"files": written}))?;
    } else {
        let text = if problems.len() == 1 {
            problems[0].1.clone()
        } else {
            problems
                .iter()
                .map(|(name, p)| format!("% task {name}\n{p}"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let report: Vec<Json> = problems.iter().map(|(n, p)| json!({"task": n, "tptp": p})).collect();
        out.emit(&text, json!({"problems": report}))?;
    }
    Ok(Outcome::Verified)
}

fn report_verdicts(
    tasks: &[VerificationTask],
    verdicts: &[Verdict],
    domain: Option<&Domain>,
    max_base: usize,
    projection: Option<oracle::ProjectionReport>,
    out: &Output,
) -> Result<Outcome> {
    let width = tasks.iter().map(|t| t.name.len()).max().unwrap_or(0);
    let mut text = String::new();
    let mut entries = Vec::new();
    for (task, v) in tasks.iter().zip(verdicts) {
        text.push_str(&format!("{:width$}  {:18}  {:.2}s\n", task.name, v.status.to_string(), v.seconds));
        let mut entry = json!({"task": task.name, "status": v.status, "seconds": v.seconds});
        if let Some(d) = domain {
            match task.search_countermodel(d, OracleLimits { max_base }) {
                Ok(Some(m)) => {
                    if v.status == Status::Theorem {
                        bail!(
                            "task {}: the prover reports Theorem but {} is a finite countermodel",
                            task.name,
                            DisplayModel(&m)
                        );
                    }
                    text.push_str(&format!("  countermodel: {}\n", DisplayModel(&m)));
                    entry["countermodel"] = model_json(&m);
                }
                Ok(None) => {}
                Err(e) => eprintln!("note: task {}: countermodel search skipped: {e}", task.name),
            }
        }
        if v.status == Status::ProverError {
            eprintln!("note: task {}: prover output:\n{}", task.name, v.output.trim_end());
        }
        entries.push(entry);
    }
    let proven = verdicts.iter().filter(|v| v.status.is_proven()).count();
    let mut verified = proven == verdicts.len();
    let mut report = json!({"tasks": entries});
    if let Some(p) = &projection {
        match &p.mismatch {
            None => text.push_str(&format!("oracle: projections agree on {} instance(s)\n", p.instances)),
            Some(m) => {
                if verified && !tasks.is_empty() {
                    bail!(
                        "the prover proves equivalence but the oracle finds different answer sets for input {}",
                        DisplayModel(&m.input_facts)
                    );
                }
                verified = false;
                text.push_str(&format!("oracle: projections differ on input {}\n", DisplayModel(&m.input_facts)));
                text.push_str(&format!("  first:  {}\n", m.first.iter().map(|s| DisplayModel(s).to_string()).collect::<Vec<_>>().join(" ")));
                text.push_str(&format!("  second: {}\n", m.second.iter().map(|s| DisplayModel(s).to_string()).collect::<Vec<_>>().join(" ")));
            }
        }
        report["oracle"] = json!({
            "instances": p.instances,
            "mismatch": p.mismatch.as_ref().map(|m| json!({
                "input": model_json(&m.input_facts),
                "first": models_json(&m.first),
                "second": models_json(&m.second),
            })),
        });
    }
    let summary = if tasks.is_empty() {
        "verified (vacuous: no tasks)".to_string()
    } else if verified {
        format!("verified ({proven}/{} tasks proven)", verdicts.len())
    } else {
        format!("not verified ({proven}/{} tasks proven)", verdicts.len())
    };
    text.push_str(&summary);
    text.push('\n');
    report["verified"] = json!(verified);
    report["summary"] = json!(summary);
    out.emit(&text, report)?;
    Ok(if verified { Outcome::Verified } else { Outcome::NotVerified })
}

fn bounded_text(b: &BoundedCheck) -> String {
    let mut parts = Vec::new();
    if let (Some(first), Some(last)) = (b.exhaustive_sizes.first(), b.exhaustive_sizes.last()) {
        parts.push(format!("exhaustive for {first}..{last} node(s)"));
    }
    for (n, k) in &b.sampled_sizes {
        parts.push(format!("{k} sampled for {n} nodes"));
    }
    let mut text = format!(
        "bounded check up to {} node(s): {} instance(s) ({}), {} skipped by the precondition\n",
        b.bound,
        b.instances,
        parts.join(", "),
        b.skipped
    );
    if let Some(w) = &b.witness {
        text.push_str(&format!("witness: {w}\n"));
    }
    text
}

fn module(command: ModuleCommand, out: &Output) -> Result<Outcome> {
    match command {
        ModuleCommand::Check {
            dir,
            bound,
            prover,
            max_base,
        } => {
            let module = registry::load_module(&dir)?;
            let config = match prover.prover {
                Some(_) => Some(prover.config()?),
                None => None,
            };
            let report = registry::check_module(&module, bound, config.as_ref(), OracleLimits { max_base })?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let mut text = format!("module {}\n", report.module);
            match &report.postcondition {
                None => {}
                Some(PostconditionCheck::Skipped(why)) => {
                    text.push_str(&format!("postcondition: not checked ({why})\n"))
                }
                Some(PostconditionCheck::Proven(_)) => text.push_str("postcondition: proven\n"),
                Some(PostconditionCheck::NotProven(v)) => text.push_str(&format!(
                    "postcondition: not proven ({})\n",
                    v.iter().map(|v| v.status.to_string()).collect::<Vec<_>>().join(", ")
                )),
            }
            if let Some(b) = &report.bounded {
                text.push_str(&bounded_text(b));
            }
            let passed = report.passed();
            text.push_str(if passed { "passed\n" } else { "failed\n" });
            let mut json_report = serde_json::to_value(&report)?;
            if let Some(w) = report.bounded.as_ref().and_then(|b| b.witness.as_ref()) {
                json_report["bounded"]["witness"] = json!({
                    "universe_size": w.universe_size,
                    "instance": model_json(&w.instance),
                    "module": models_json(&w.module),
                    "reference": models_json(&w.reference),
                });
            }
            json_report["passed"] = json!(passed);
            out.emit(&text, json_report)?;
            Ok(if passed { Outcome::Verified } else { Outcome::NotVerified })
        }
        ModuleCommand::Apply {
            dir,
            map,
            into,
            instance,
        } => {
            let module = registry::load_module(&dir)?;
            let mut renaming = RenamingMap::default();
            let given = match &map {
                Some(m) => RenamingMap::parse(m)?,
                None => RenamingMap::default(),
            };
            let mapped: BTreeSet<&Predicate> = given.pairs().map(|(_, m)| m).collect();
            for (u, m) in given.pairs() {
                renaming.insert(u.clone(), m.clone())?;
            }
            for p in module.manifest.inputs.iter().chain(&module.manifest.outputs) {
                if !mapped.contains(p) {
                    renaming.insert(p.clone(), p.clone())?;
                }
            }
            let user = match &into {
                Some(p) => load_program(p)?,
                None => Program::default(),
            };
            let fragment = registry::instantiate(&module, &renaming, &user, instance.as_deref())?;
            let mut combined = user;
            combined.extend(&fragment);
            let text = print_program(&combined);
            out.emit(&text, json!({"program": text}))?;
            Ok(Outcome::Verified)
        }
    }
}
