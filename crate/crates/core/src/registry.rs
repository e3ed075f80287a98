//! Local module registry: one directory per module holding
//! `module.manifest` and `module.lp`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{check_interface, is_tight, InterfaceDecl, OverlappingInterface};
use crate::fol::{evaluate, parse_formula, EvalError, Formula, GroundAtom, Interpretation, Value};
use crate::oracle::{fact_program, ground, project, stable_models, Domain, ModelSet, OracleError, OracleLimits};
use crate::syntax::{is_symbol_name, parse_program, ParseError, Predicate, Program};
use crate::verification::{
    assemble_adherence, run_tasks, AdherenceOptions, AssemblyError, ProverConfig, RunError, SpecFile, Verdict,
};

pub const MANIFEST_FILE: &str = "module.manifest";
pub const PROGRAM_FILE: &str = "module.lp";

/// Instances enumerated exhaustively up to this count per universe size;
/// larger spaces are sampled.
pub const INSTANCE_CAP: usize = 1000;
const SAMPLE_SEED: u64 = 0x5eed_a5b0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reference {
    /// Another program with the same interface, relative to the module
    /// directory.
    Program(PathBuf),
    /// `builtin:transitive_closure`: the relational closure of the single
    /// binary input.
    TransitiveClosure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleManifest {
    pub name: String,
    pub inputs: Vec<Predicate>,
    pub outputs: Vec<Predicate>,
    pub precondition: Formula,
    pub postcondition: Option<Formula>,
    pub reference: Option<Reference>,
    pub doc: String,
}

impl ModuleManifest {
    pub fn interface(&self) -> InterfaceDecl {
        InterfaceDecl::new(self.inputs.iter().cloned(), self.outputs.iter().cloned())
            .expect("checked when the manifest was parsed")
    }

    fn interface_predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.inputs.iter().chain(&self.outputs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Module {
    pub dir: PathBuf,
    pub manifest: ModuleManifest,
    pub program: Program,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Manifest { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Program { path: PathBuf, source: ParseError },
    #[error("manifest declares {0}, which the module program never mentions")]
    MissingPredicate(Predicate),
    #[error("module program defines input predicate {0} in a rule head")]
    InputInHead(Predicate),
    #[error(transparent)]
    Interface(#[from] OverlappingInterface),
    #[error("invalid renaming: {0}")]
    Renaming(String),
    #[error("module predicate {from} would be renamed to {to}, which the user program already uses")]
    Collision { from: Predicate, to: Predicate },
    #[error("builtin:transitive_closure needs exactly one binary input and one binary output")]
    ReferenceInterface,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Run(#[from] RunError),
}

fn read(path: &Path) -> Result<String, RegistryError> {
    std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn predicate_list(text: &str) -> Result<Vec<Predicate>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Predicate::parse(s).ok_or_else(|| format!("`{s}` is not of the form name/arity")))
        .collect()
}

fn closed_formula(text: &str) -> Result<Formula, String> {
    let f = parse_formula(text).map_err(|e| e.to_string())?;
    let free = f.free_variables();
    if free.is_empty() {
        Ok(f)
    } else {
        Err(format!("free variable(s) {}", free.join(", ")))
    }
}

/// Parses `key = value` lines; `#` starts a comment line. `path` is only
/// used in diagnostics.
pub fn parse_manifest(source: &str, path: &Path) -> Result<ModuleManifest, RegistryError> {
    let mut seen: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let err = |line: usize, message: String| RegistryError::Manifest {
        path: path.to_path_buf(),
        line,
        message,
    };
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(i + 1, "expected `key = value`".into()))?;
        let key = key.trim();
        if !matches!(
            key,
            "name" | "inputs" | "outputs" | "precondition" | "postcondition" | "reference" | "doc"
        ) {
            return Err(err(i + 1, format!("unknown key `{key}`")));
        }
        if seen.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
            return Err(err(i + 1, format!("duplicate key `{key}`")));
        }
    }
    let get = |key: &str| seen.get(key).map(|(l, v)| (*l, v.as_str()));
    let (line, name) = get("name").ok_or_else(|| err(0, "missing key `name`".into()))?;
    if !is_symbol_name(name) {
        return Err(err(line, format!("`{name}` is not a valid module name")));
    }
    let list = |key: &str| match get(key) {
        Some((line, v)) => predicate_list(v).map_err(|m| err(line, m)),
        None => Ok(Vec::new()),
    };
    let inputs = list("inputs")?;
    let outputs = list("outputs")?;
    InterfaceDecl::new(inputs.iter().cloned(), outputs.iter().cloned())?;
    let formula = |key: &str| -> Result<Option<Formula>, RegistryError> {
        match get(key) {
            Some((line, v)) => closed_formula(v).map(Some).map_err(|m| err(line, m)),
            None => Ok(None),
        }
    };
    let precondition = formula("precondition")?.unwrap_or(Formula::Top);
    let postcondition = formula("postcondition")?;
    let reference = match get("reference") {
        None => None,
        Some((_, "builtin:transitive_closure")) => Some(Reference::TransitiveClosure),
        Some((line, v)) if v.starts_with("builtin:") => {
            return Err(err(line, format!("unknown built-in reference `{v}`")));
        }
        Some((_, v)) => Some(Reference::Program(PathBuf::from(v))),
    };
    Ok(ModuleManifest {
        name: name.to_string(),
        inputs,
        outputs,
        precondition,
        postcondition,
        reference,
        doc: get("doc").map(|(_, v)| v.to_string()).unwrap_or_default(),
    })
}

/// Loads and validates the module in directory `dir`.
pub fn load_module(dir: impl AsRef<Path>) -> Result<Module, RegistryError> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest = parse_manifest(&read(&manifest_path)?, &manifest_path)?;
    let program_path = dir.join(PROGRAM_FILE);
    let program = parse_program(&read(&program_path)?).map_err(|source| RegistryError::Program {
        path: program_path,
        source,
    })?;
    let report = check_interface(&program, &manifest.interface());
    if let Some(p) = report.inputs_in_heads.into_iter().next() {
        return Err(RegistryError::InputInHead(p));
    }
    if let Some(p) = report.missing.into_iter().next() {
        return Err(RegistryError::MissingPredicate(p));
    }
    if manifest.reference == Some(Reference::TransitiveClosure)
        && !(manifest.inputs.len() == 1
            && manifest.outputs.len() == 1
            && manifest.inputs[0].arity == 2
            && manifest.outputs[0].arity == 2)
    {
        return Err(RegistryError::ReferenceInterface);
    }
    Ok(Module {
        dir: dir.to_path_buf(),
        manifest,
        program,
    })
}

/// Pairs `user predicate -> module predicate`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RenamingMap {
    pairs: BTreeMap<Predicate, Predicate>,
}

impl RenamingMap {
    /// Reads `road/2=edge/2,reachable/2=transitive/2`.
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut map = RenamingMap::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || RegistryError::Renaming(format!("`{item}` is not of the form user/n=module/n"));
            let (user, module) = item.split_once('=').ok_or_else(bad)?;
            let user = Predicate::parse(user.trim()).ok_or_else(bad)?;
            let module = Predicate::parse(module.trim()).ok_or_else(bad)?;
            map.insert(user, module)?;
        }
        Ok(map)
    }

    pub fn identity(module: &ModuleManifest) -> Self {
        Self {
            pairs: module.interface_predicates().map(|p| (p.clone(), p.clone())).collect(),
        }
    }

    pub fn insert(&mut self, user: Predicate, module: Predicate) -> Result<(), RegistryError> {
        if user.arity != module.arity {
            return Err(RegistryError::Renaming(format!("{user} and {module} differ in arity")));
        }
        if let Some(old) = self.pairs.get(&user) {
            return Err(RegistryError::Renaming(format!("{user} is mapped to both {old} and {module}")));
        }
        if let Some((other, _)) = self.pairs.iter().find(|(_, m)| **m == module) {
            return Err(RegistryError::Renaming(format!("{other} and {user} are both mapped to {module}")));
        }
        self.pairs.insert(user, module);
        Ok(())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Predicate, &Predicate)> {
        self.pairs.iter()
    }

    /// Module predicate to user name; the map must cover exactly the
    /// module's interface.
    fn inverse(&self, manifest: &ModuleManifest) -> Result<BTreeMap<Predicate, String>, RegistryError> {
        let interface: BTreeSet<&Predicate> = manifest.interface_predicates().collect();
        let mut inverse = BTreeMap::new();
        for (user, module) in &self.pairs {
            if !interface.contains(module) {
                return Err(RegistryError::Renaming(format!(
                    "{module} is not an input or output of module {}",
                    manifest.name
                )));
            }
            inverse.insert(module.clone(), user.name.clone());
        }
        if let Some(p) = interface.iter().find(|p| !inverse.contains_key(**p)) {
            return Err(RegistryError::Renaming(format!("no user predicate is mapped to {p}")));
        }
        Ok(inverse)
    }
}

/// Prefix of the module's private predicates: `<module>__`, or
/// `<module>_<instance>__` when the module is used more than once.
pub fn private_prefix(module: &ModuleManifest, instance: Option<&str>) -> String {
    match instance {
        Some(i) => format!("{}_{i}__", module.name),
        None => format!("{}__", module.name),
    }
}

/// The module program in the user's vocabulary. Private predicates get the
/// private prefix and must not clash with anything in `user`.
pub fn instantiate(
    module: &Module,
    map: &RenamingMap,
    user: &Program,
    instance: Option<&str>,
) -> Result<Program, RegistryError> {
    let inverse = map.inverse(&module.manifest)?;
    let prefix = private_prefix(&module.manifest, instance);
    let interface = module.manifest.interface();
    let user_signature = user.signature();
    let targets: BTreeSet<Predicate> = map.pairs().map(|(u, _)| u.clone()).collect();
    for p in module.program.signature() {
        if !interface.is_public(&p) {
            let to = Predicate::new(format!("{prefix}{}", p.name), p.arity);
            if user_signature.contains(&to) || targets.contains(&to) {
                return Err(RegistryError::Collision { from: p, to });
            }
        }
    }
    Ok(module.program.rename_predicates(|p: &Predicate| match inverse.get(p) {
        Some(name) => Some(name.clone()),
        None if interface.is_public(p) => None,
        None => Some(format!("{prefix}{}", p.name)),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Input facts of the failing instance.
    pub instance: BTreeSet<GroundAtom>,
    pub universe_size: usize,
    /// Output projections of the module's stable models.
    pub module: ModelSet,
    pub reference: ModelSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PostconditionCheck {
    Proven(Vec<Verdict>),
    NotProven(Vec<Verdict>),
    /// Reason the prover path was not taken.
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundedCheck {
    pub bound: usize,
    /// Universe sizes whose instances were all enumerated.
    pub exhaustive_sizes: Vec<usize>,
    /// Universe sizes that were sampled, with the sample size.
    pub sampled_sizes: Vec<(usize, usize)>,
    pub instances: usize,
    /// Instances that violate the precondition.
    pub skipped: usize,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuleReport {
    pub module: String,
    pub postcondition: Option<PostconditionCheck>,
    pub bounded: Option<BoundedCheck>,
    pub warnings: Vec<String>,
}

impl ModuleReport {
    pub fn passed(&self) -> bool {
        !matches!(self.postcondition, Some(PostconditionCheck::NotProven(_)))
            && self.bounded.as_ref().is_none_or(|b| b.witness.is_none())
    }
}

/// Universe `a, b, c, ...` of size `n`.
pub fn node_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("n{i}")
            }
        })
        .collect()
}

fn all_atoms(predicates: &[Predicate], universe: &[String]) -> Vec<GroundAtom> {
    let mut out = Vec::new();
    for p in predicates {
        let mut args: Vec<Vec<Value>> = vec![vec![]];
        for _ in 0..p.arity {
            args = args
                .into_iter()
                .flat_map(|prefix| {
                    universe.iter().map(move |u| {
                        let mut a = prefix.clone();
                        a.push(Value::Sym(u.clone()));
                        a
                    })
                })
                .collect();
        }
        out.extend(args.into_iter().map(|a| GroundAtom::new(p.name.clone(), a)));
    }
    out
}

/// Input instances over a universe of `n` nodes: every subset of the base
/// when there are at most [`INSTANCE_CAP`], else that many distinct
/// subsets drawn with a fixed seed.
fn instances(inputs: &[Predicate], n: usize) -> (Vec<BTreeSet<GroundAtom>>, bool) {
    let base = all_atoms(inputs, &node_names(n));
    let pick = |bits: &[bool]| -> BTreeSet<GroundAtom> {
        base.iter()
            .zip(bits)
            .filter(|(_, b)| **b)
            .map(|(a, _)| a.clone())
            .collect()
    };
    if base.len() < usize::BITS as usize && (1usize << base.len()) <= INSTANCE_CAP {
        let all = (0..1usize << base.len())
            .map(|mask| {
                let bits: Vec<bool> = (0..base.len()).map(|i| mask >> i & 1 == 1).collect();
                pick(&bits)
            })
            .collect();
        return (all, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ n as u64);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < INSTANCE_CAP {
        let bits: Vec<bool> = (0..base.len()).map(|_| rng.gen()).collect();
        if seen.insert(bits.clone()) {
            out.push(pick(&bits));
        }
    }
    (out, false)
}

fn transitive_closure(edges: &BTreeSet<(Value, Value)>) -> BTreeSet<(Value, Value)> {
    let mut closure = edges.clone();
    loop {
        let step: Vec<(Value, Value)> = closure
            .iter()
            .flat_map(|(x, y)| {
                closure
                    .iter()
                    .filter(move |(y2, _)| y2 == y)
                    .map(move |(_, z)| (x.clone(), z.clone()))
            })
            .filter(|p| !closure.contains(p))
            .collect();
        if step.is_empty() {
            return closure;
        }
        closure.extend(step);
    }
}

enum Oracle<'a> {
    Program(&'a Program),
    Closure { input: &'a Predicate, output: &'a Predicate },
}

fn projected_models(
    program: &Program,
    facts: &BTreeSet<GroundAtom>,
    domain: &Domain,
    outputs: &BTreeSet<Predicate>,
    limits: OracleLimits,
) -> Result<ModelSet, OracleError> {
    let mut with_facts = program.clone();
    with_facts.extend(&fact_program(facts));
    Ok(project(&stable_models(&ground(&with_facts, domain)?, limits)?, outputs))
}

impl Oracle<'_> {
    fn models(
        &self,
        facts: &BTreeSet<GroundAtom>,
        domain: &Domain,
        outputs: &BTreeSet<Predicate>,
        limits: OracleLimits,
    ) -> Result<ModelSet, OracleError> {
        match self {
            Oracle::Program(p) => projected_models(p, facts, domain, outputs, limits),
            Oracle::Closure { input, output } => {
                let edges = facts
                    .iter()
                    .filter(|a| a.predicate == input.name && a.args.len() == 2)
                    .map(|a| (a.args[0].clone(), a.args[1].clone()))
                    .collect();
                let model = transitive_closure(&edges)
                    .into_iter()
                    .map(|(x, y)| GroundAtom::new(output.name.clone(), vec![x, y]))
                    .collect();
                Ok(ModelSet::from([model]))
            }
        }
    }
}

enum Outcome {
    Skipped,
    Equal,
    Differs(Witness),
}

fn check_instance(
    module: &Module,
    reference: &Oracle<'_>,
    facts: BTreeSet<GroundAtom>,
    n: usize,
    limits: OracleLimits,
) -> Result<Outcome, RegistryError> {
    let universe: BTreeSet<String> = node_names(n).into_iter().collect();
    let interp = Interpretation::new(universe.clone(), None, facts.clone()).expect("instance lies in the universe");
    if !evaluate(&module.manifest.precondition, &interp)? {
        return Ok(Outcome::Skipped);
    }
    let mut domain_symbols = universe;
    domain_symbols.extend(module.program.symbols());
    let domain = Domain::new(domain_symbols, None);
    let outputs: BTreeSet<Predicate> = module.manifest.outputs.iter().cloned().collect();
    let got = projected_models(&module.program, &facts, &domain, &outputs, limits)?;
    let want = reference.models(&facts, &domain, &outputs, limits)?;
    Ok(if got == want {
        Outcome::Equal
    } else {
        Outcome::Differs(Witness {
            instance: facts,
            universe_size: n,
            module: got,
            reference: want,
        })
    })
}

/// Compares the module with its reference on every input instance over
/// universes of 1 to `bound` nodes.
fn bounded_check(
    module: &Module,
    reference: &Oracle<'_>,
    bound: usize,
    limits: OracleLimits,
) -> Result<BoundedCheck, RegistryError> {
    let mut report = BoundedCheck {
        bound,
        exhaustive_sizes: Vec::new(),
        sampled_sizes: Vec::new(),
        instances: 0,
        skipped: 0,
        witness: None,
    };
    let workers = thread::available_parallelism().map_or(1, |n| n.get());
    for n in 1..=bound {
        let (batch, exhaustive) = instances(&module.manifest.inputs, n);
        if exhaustive {
            report.exhaustive_sizes.push(n);
        } else {
            report.sampled_sizes.push((n, batch.len()));
        }
        let chunk = batch.len().div_ceil(workers).max(1);
        let outcomes: Vec<Result<Outcome, RegistryError>> = thread::scope(|s| {
            let handles: Vec<_> = batch
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        part.iter()
                            .map(|facts| check_instance(module, reference, facts.clone(), n, limits))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("instance check panicked"))
                .collect()
        });
        for outcome in outcomes {
            report.instances += 1;
            match outcome? {
                Outcome::Skipped => report.skipped += 1,
                Outcome::Equal => {}
                Outcome::Differs(w) => {
                    report.witness = Some(w);
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Checks the module's postcondition with the prover (tight modules only)
/// and compares it with its reference on bounded instances.
pub fn check_module(
    module: &Module,
    bound: usize,
    prover: Option<&ProverConfig>,
    limits: OracleLimits,
) -> Result<ModuleReport, RegistryError> {
    let m = &module.manifest;
    let mut report = ModuleReport {
        module: m.name.clone(),
        postcondition: None,
        bounded: None,
        warnings: Vec::new(),
    };
    if m.postcondition.is_none() && m.reference.is_none() {
        report
            .warnings
            .push(format!("module {} has neither a postcondition nor a reference; nothing to check", m.name));
        return Ok(report);
    }
    if let Some(post) = &m.postcondition {
        report.postcondition = Some(if !is_tight(&module.program).tight {
            PostconditionCheck::Skipped("the module program is not tight".into())
        } else if let Some(config) = prover {
            let spec = SpecFile {
                interface: m.interface(),
                assumes: if m.precondition == Formula::Top {
                    vec![]
                } else {
                    vec![m.precondition.clone()]
                },
                specs: vec![post.clone()],
            };
            let tasks = assemble_adherence(&module.program, &spec, AdherenceOptions::default())?;
            let verdicts = run_tasks(&tasks, config)?;
            if verdicts.iter().all(|v| v.status.is_proven()) {
                PostconditionCheck::Proven(verdicts)
            } else {
                PostconditionCheck::NotProven(verdicts)
            }
        } else {
            PostconditionCheck::Skipped("no prover configured".into())
        });
    }
    let reference_program;
    let reference = match &m.reference {
        None => None,
        Some(Reference::TransitiveClosure) => Some(Oracle::Closure {
            input: &m.inputs[0],
            output: &m.outputs[0],
        }),
        Some(Reference::Program(path)) => {
            let path = module.dir.join(path);
            reference_program = parse_program(&read(&path)?).map_err(|source| RegistryError::Program { path, source })?;
            Some(Oracle::Program(&reference_program))
        }
    };
    if let Some(reference) = reference {
        report.bounded = Some(bounded_check(module, &reference, bound, limits)?);
    }
    Ok(report)
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::oracle::DisplayModel;
        write!(f, "instance {} over {} node(s): module gives", DisplayModel(&self.instance), self.universe_size)?;
        for m in &self.module {
            write!(f, " {}", DisplayModel(m))?;
        }
        f.write_str(", reference gives")?;
        for m in &self.reference {
            write!(f, " {}", DisplayModel(m))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TC_MANIFEST: &str = "# transitive closure\nname = tc\ninputs = edge/2\noutputs = transitive/2\nreference = builtin:transitive_closure\ndoc = reachability over edge/2\n";
    const TC_PROGRAM: &str = "transitive(X,Y) :- edge(X,Y).\ntransitive(X,Z) :- transitive(X,Y), edge(Y,Z).\n";

    fn module_dir(manifest: &str, program: &str) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(MANIFEST_FILE), manifest).unwrap();
        std::fs::write(dir.path().join(PROGRAM_FILE), program).unwrap();
        dir
    }

    #[test]
    fn manifest_parsing() {
        let m = parse_manifest(TC_MANIFEST, Path::new("m")).unwrap();
        assert_eq!(m.name, "tc");
        assert_eq!(m.inputs, [Predicate::new("edge", 2)]);
        assert_eq!(m.precondition, Formula::Top);
        assert_eq!(m.reference, Some(Reference::TransitiveClosure));
        for bad in ["name = tc\nname = x", "name = Tc", "nme = tc", "name = tc\ninputs = edge", "name = tc\nprecondition = p(X)"] {
            assert!(parse_manifest(bad, Path::new("m")).is_err(), "{bad}");
        }
    }

    #[test]
    fn load_checks_interface() {
        let dir = module_dir(TC_MANIFEST, TC_PROGRAM);
        let m = load_module(dir.path()).unwrap();
        assert_eq!(m.program.rules.len(), 2);
        let dir = module_dir(&TC_MANIFEST.replace("transitive/2", "tc/2"), TC_PROGRAM);
        assert!(matches!(load_module(dir.path()), Err(RegistryError::MissingPredicate(_))));
        let dir = module_dir(TC_MANIFEST, "edge(X,Y) :- transitive(X,Y).\ntransitive(a,b).");
        assert!(matches!(load_module(dir.path()), Err(RegistryError::InputInHead(_))));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_module(dir.path()), Err(RegistryError::Io { .. })));
    }

    #[test]
    fn renaming_and_instantiation() {
        let dir = module_dir(
            "name = reach\ninputs = edge/2\noutputs = transitive/2\n",
            "step(X,Y) :- edge(X,Y).\ntransitive(X,Y) :- step(X,Y).\n",
        );
        let m = load_module(dir.path()).unwrap();
        let map = RenamingMap::parse("road/2=edge/2, reachable/2=transitive/2").unwrap();
        let user = parse_program("road(a,b).").unwrap();
        let p = instantiate(&m, &map, &user, None).unwrap();
        assert_eq!(
            crate::syntax::print_program(&p),
            "reach__step(X, Y) :- road(X, Y).\nreachable(X, Y) :- reach__step(X, Y).\n"
        );
        let ident = instantiate(&m, &RenamingMap::identity(&m.manifest), &Program::default(), None).unwrap();
        assert_eq!(ident.signature().len(), 3);

        let clash = parse_program("reach__step(a,a).").unwrap();
        assert!(matches!(instantiate(&m, &map, &clash, None), Err(RegistryError::Collision { .. })));

        let second = RenamingMap::parse("link/2=edge/2, connected/2=transitive/2").unwrap();
        let mut combined = p.clone();
        assert!(instantiate(&m, &second, &combined, None).is_err());
        let q = instantiate(&m, &second, &combined, Some("b")).unwrap();
        let privates = |prog: &Program| -> BTreeSet<Predicate> {
            prog.signature().into_iter().filter(|p| p.name.contains("__")).collect()
        };
        assert!(privates(&p).is_disjoint(&privates(&q)));
        combined.extend(&q);
        assert_eq!(privates(&combined).len(), 2);

        for bad in ["road/3=edge/2", "a/2=edge/2,a/2=transitive/2", "a/2=edge/2,b/2=edge/2"] {
            assert!(RenamingMap::parse(bad).is_err(), "{bad}");
        }
        let partial = RenamingMap::parse("road/2=edge/2").unwrap();
        assert!(instantiate(&m, &partial, &user, None).is_err());
        let outside = RenamingMap::parse("road/2=edge/2,r/2=transitive/2,x/1=y/1").unwrap();
        assert!(instantiate(&m, &outside, &user, None).is_err());
    }

    #[test]
    fn instance_enumeration() {
        let e = [Predicate::new("edge", 2)];
        let (small, exhaustive) = instances(&e, 3);
        assert!(exhaustive);
        assert_eq!(small.len(), 512);
        let (big, exhaustive) = instances(&e, 4);
        assert!(!exhaustive);
        assert_eq!(big.len(), INSTANCE_CAP);
        assert_eq!(big, instances(&e, 4).0);
    }

    #[test]
    fn closure_reference() {
        let v = |s: &str| Value::Sym(s.into());
        let edges = BTreeSet::from([(v("a"), v("b")), (v("b"), v("c"))]);
        let c = transitive_closure(&edges);
        assert_eq!(c.len(), 3);
        assert!(c.contains(&(v("a"), v("c"))));
    }

    #[test]
    fn transitive_closure_module_checks() {
        let dir = module_dir(TC_MANIFEST, TC_PROGRAM);
        let m = load_module(dir.path()).unwrap();
        let report = check_module(&m, 3, None, OracleLimits::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        let b = report.bounded.unwrap();
        assert_eq!(b.exhaustive_sizes, [1, 2, 3]);
        assert_eq!(b.instances, 2 + 16 + 512);

        let dir = module_dir(TC_MANIFEST, "transitive(X,Y) :- edge(X,Y).\n");
        let m = load_module(dir.path()).unwrap();
        let report = check_module(&m, 3, None, OracleLimits::default()).unwrap();
        assert!(!report.passed());
        let w = report.bounded.unwrap().witness.unwrap();
        assert!(w.universe_size <= 3);
        assert_eq!(w.universe_size, 2);
    }

    #[test]
    fn reference_program_and_nothing_to_check() {
        let dir = module_dir("name = tc\ninputs = edge/2\noutputs = transitive/2\nreference = ref.lp\n", TC_PROGRAM);
        std::fs::write(dir.path().join("ref.lp"), TC_PROGRAM).unwrap();
        let m = load_module(dir.path()).unwrap();
        let report = check_module(&m, 2, None, OracleLimits::default()).unwrap();
        assert!(report.passed());

        let dir = module_dir("name = tc\ninputs = edge/2\noutputs = transitive/2\n", TC_PROGRAM);
        let report = check_module(&load_module(dir.path()).unwrap(), 2, None, OracleLimits::default()).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn precondition_filters_instances() {
        let dir = module_dir(
            "name = tc\ninputs = edge/2\noutputs = transitive/2\nprecondition = forall X (not edge(X, X))\nreference = builtin:transitive_closure\n",
            TC_PROGRAM,
        );
        let report = check_module(&load_module(dir.path()).unwrap(), 2, None, OracleLimits::default()).unwrap();
        let b = report.bounded.unwrap();
        assert_eq!(b.skipped, 1 + 12);
    }
}
