use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use std::{env, fmt, thread};

use serde::Serialize;
use thiserror::Error;

use super::VerificationTask;
use crate::fol::{EmitError, EmitOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Theorem,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    ProverError,
}

impl Status {
    pub fn is_proven(self) -> bool {
        self == Status::Theorem
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "Theorem",
            Status::CounterSatisfiable => "CounterSatisfiable",
            Status::Timeout => "Timeout",
            Status::GaveUp => "GaveUp",
            Status::ProverError => "ProverError",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub task: String,
    pub status: Status,
    pub seconds: f64,
    #[serde(skip)]
    pub output: String,
}

#[derive(Clone, Debug)]
pub struct ProverConfig {
    pub executable: PathBuf,
    /// Arguments placed before the problem file.
    pub args: Vec<String>,
    pub timeout: Duration,
    /// Largest number of prover processes running at once.
    pub cores: usize,
    pub emit: EmitOptions,
}

impl ProverConfig {
    /// Configuration with the usual flags for vampire, eprover and cvc5,
    /// chosen by the executable's file name; other provers get no flags.
    pub fn new(executable: impl Into<PathBuf>, timeout: Duration) -> Self {
        let executable = executable.into();
        let secs = timeout.as_secs().max(1).to_string();
        let stem = executable
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        let args: Vec<String> = if stem.starts_with("vampire") {
            vec!["--mode".into(), "casc".into(), "-t".into(), secs]
        } else if stem.starts_with("eprover") {
            vec!["--auto".into(), "--tstp-format".into(), "-s".into(), format!("--cpu-limit={secs}")]
        } else if stem.starts_with("cvc5") {
            vec!["--lang=tptp".into(), format!("--tlimit={}", timeout.as_millis().max(1))]
        } else {
            Vec::new()
        };
        Self {
            executable,
            args,
            timeout,
            cores: thread::available_parallelism().map_or(1, |n| n.get()),
            emit: EmitOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("prover `{0}` not found")]
    ProverMissing(PathBuf),
    #[error("task {task}: {source}")]
    Emit { task: String, source: EmitError },
    #[error("i/o error running the prover: {0}")]
    Io(#[from] std::io::Error),
}

/// Maps the first `SZS status <word>` line of the prover output.
pub fn parse_szs_status(output: &str) -> Status {
    for line in output.lines() {
        let Some(at) = line.find("SZS status") else { continue };
        let word = line[at + "SZS status".len()..].split_whitespace().next().unwrap_or("");
        return match word {
            "Theorem" | "ContradictoryAxioms" => Status::Theorem,
            "CounterSatisfiable" | "Satisfiable" => Status::CounterSatisfiable,
            "Timeout" => Status::Timeout,
            "GaveUp" | "Unknown" | "ResourceOut" | "Incomplete" | "MemoryOut" => Status::GaveUp,
            _ => Status::ProverError,
        };
    }
    Status::ProverError
}

fn resolve(executable: &Path) -> Option<PathBuf> {
    if executable.components().count() > 1 {
        return executable.is_file().then(|| executable.to_path_buf());
    }
    env::split_paths(&env::var_os("PATH")?)
        .map(|dir| dir.join(executable))
        .find(|p| p.is_file())
}

/// Runs every task in its own prover process, at most `config.cores` at a
/// time. Verdicts are returned in task order.
pub fn run_tasks(tasks: &[VerificationTask], config: &ProverConfig) -> Result<Vec<Verdict>, RunError> {
    let executable = resolve(&config.executable).ok_or_else(|| RunError::ProverMissing(config.executable.clone()))?;
    let problems = tasks
        .iter()
        .map(|t| {
            t.to_tptp(&config.emit).map_err(|source| RunError::Emit {
                task: t.name.clone(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Verdict, std::io::Error>>>> =
        Mutex::new((0..tasks.len()).map(|_| None).collect());
    let workers = config.cores.max(1).min(tasks.len());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= tasks.len() {
                    break;
                }
                let verdict = run_one(&tasks[i].name, &problems[i], &executable, config);
                results.lock().expect("no panics while locked")[i] = Some(verdict);
            });
        }
    });
    results
        .into_inner()
        .expect("no panics while locked")
        .into_iter()
        .map(|r| r.expect("every task ran").map_err(RunError::from))
        .collect()
}

fn run_one(name: &str, problem: &str, executable: &Path, config: &ProverConfig) -> Result<Verdict, std::io::Error> {
    let mut file = tempfile::Builder::new()
        .prefix(&format!("{name}_"))
        .suffix(".p")
        .tempfile()?;
    file.write_all(problem.as_bytes())?;
    file.flush()?;

    let start = Instant::now();
    let mut child = Command::new(executable)
        .args(&config.args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    let stdout = drain(child.stdout.take());
    let stderr = drain(child.stderr.take());
    let mut timed_out = false;
    loop {
        if start.elapsed() >= config.timeout {
            let _ = child.kill();
            let _ = child.wait();
            timed_out = true;
            break;
        }
        if child.try_wait()?.is_some() {
            break;
        }
        thread::sleep(Duration::from_millis(5));
    }
    let seconds = start.elapsed().as_secs_f64();
    // after a kill, grandchildren may still hold the pipes open
    let (status, output) = if timed_out {
        (Status::Timeout, String::new())
    } else {
        let mut output = stdout.join().unwrap_or_default();
        output.push_str(&stderr.join().unwrap_or_default());
        (parse_szs_status(&output), output)
    };
    Ok(Verdict {
        task: name.to_string(),
        status,
        seconds,
        output,
    })
}

fn drain(pipe: Option<impl Read + Send + 'static>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut p) = pipe {
            let _ = p.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}
