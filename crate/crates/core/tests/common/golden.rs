//! The golden adherence corpus under `corpus/golden`: each `NN_name.lp`
//! comes with `NN_name.spec`, whose leading comments state the expected
//! verdict and, optionally, the integer range the oracle should search.

use std::fs;
use std::path::{Path, PathBuf};

use aspv::fol::{Dialect, EmitOptions};
use aspv::oracle::{Domain, OracleLimits};
use aspv::syntax::{parse_program, Program};
use aspv::verification::{assemble_adherence, parse_spec, AdherenceOptions, SpecFile, VerificationTask};

use super::tptp_syntax;

pub struct GoldenCase {
    pub name: String,
    pub program: Program,
    pub spec: SpecFile,
    pub expect_theorem: bool,
    pub oracle_ints: (i64, i64),
}

impl GoldenCase {
    pub fn tasks(&self) -> Vec<VerificationTask> {
        assemble_adherence(&self.program, &self.spec, AdherenceOptions::default())
            .unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn directive<'a>(source: &'a str, key: &str) -> Option<&'a str> {
    source
        .lines()
        .filter_map(|l| l.trim().strip_prefix('%'))
        .filter_map(|l| l.trim().strip_prefix(key))
        .map(|v| v.trim_start_matches(':').trim())
        .next()
}

pub fn load() -> Vec<GoldenCase> {
    let dir = corpus_dir().join("golden");
    let mut specs: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "spec"))
        .collect();
    specs.sort();
    specs
        .into_iter()
        .map(|spec_path| {
            let name = spec_path.file_stem().unwrap().to_string_lossy().into_owned();
            let spec_src = fs::read_to_string(&spec_path).unwrap();
            let program_src = fs::read_to_string(spec_path.with_extension("lp")).unwrap();
            let expect = directive(&spec_src, "expect").unwrap_or_else(|| panic!("{name}: no expect line"));
            let oracle_ints = match directive(&spec_src, "oracle-ints") {
                Some(r) => {
                    let (lo, hi) = r.split_once("..").unwrap();
                    (lo.parse().unwrap(), hi.parse().unwrap())
                }
                None => (0, 2),
            };
            GoldenCase {
                program: parse_program(&program_src).unwrap_or_else(|e| panic!("{name}: {e}")),
                spec: parse_spec(&spec_src).unwrap_or_else(|e| panic!("{name}: {e}")),
                expect_theorem: match expect {
                    "theorem" => true,
                    "not-theorem" => false,
                    other => panic!("{name}: unknown expectation {other}"),
                },
                oracle_ints,
                name,
            }
        })
        .collect()
}

/// Emits every task in both dialects and runs the grammar checker.
pub fn check_tptp(name: &str, tasks: &[VerificationTask]) -> Result<(), String> {
    for task in tasks {
        for dialect in [Dialect::Tff, Dialect::Fof] {
            let options = EmitOptions {
                dialect,
                int_range: Some((-2, 12)),
            };
            let text = task.to_tptp(&options).map_err(|e| format!("{name}/{}: {e}", task.name))?;
            tptp_syntax::check(&text).map_err(|e| format!("{name}/{} ({dialect:?}): {e}\n{text}", task.name))?;
        }
    }
    Ok(())
}

/// Valid cases have no finite countermodel on the test domain; invalid
/// ones have one for at least one task.
pub fn check_oracle(case: &GoldenCase) -> Result<(), String> {
    let domain = Domain::new(["a", "b"], Some(case.oracle_ints));
    let mut refuted = Vec::new();
    for task in case.tasks() {
        let found = task
            .search_countermodel(&domain, OracleLimits { max_base: 20 })
            .map_err(|e| format!("{}/{}: {e}", case.name, task.name))?;
        if found.is_some() {
            refuted.push(task.name.clone());
        }
    }
    match (case.expect_theorem, refuted.is_empty()) {
        (true, false) => Err(format!("{}: countermodel for valid task(s) {refuted:?}", case.name)),
        (false, true) => Err(format!("{}: no countermodel for an invalid case", case.name)),
        _ => Ok(()),
    }
}

/// A program from the corpus, relative to `corpus/`.
pub fn corpus_program(relative: &str) -> Program {
    let path = corpus_dir().join(relative);
    let src = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_program(&src).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn corpus_spec(relative: &str) -> SpecFile {
    let path = corpus_dir().join(relative);
    parse_spec(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
