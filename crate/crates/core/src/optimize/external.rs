//! Running an external MILP solver on an LP file.
//!
//! The command is a whitespace-separated template. The tokens `{lp}` and
//! `{sol}` are replaced by the model and solution paths; when neither appears
//! both paths are appended in that order. The solver must write a solution
//! file readable by [`read_solution`](crate::ilp::read_solution) and exit
//! with status 0. A comment line containing "infeasible" marks an infeasible
//! model.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::OptimizeError;

pub const SOLVER_ENV: &str = "TRANSITMAP_SOLVER";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    pub command: String,
    pub timeout: Option<Duration>,
}

impl ExternalSolver {
    pub fn new(command: impl Into<String>) -> ExternalSolver {
        ExternalSolver {
            command: command.into(),
            timeout: None,
        }
    }

    pub fn from_env() -> Option<ExternalSolver> {
        std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()).map(ExternalSolver::new)
    }

    pub fn with_timeout(mut self, t: Option<Duration>) -> ExternalSolver {
        self.timeout = t;
        self
    }

    /// A fresh directory under the system temporary directory.
    pub(crate) fn scratch_dir(&self) -> Result<PathBuf, OptimizeError> {
        static COUNTER: AtomicU64 = AtomicU64::new(0);
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        let dir = std::env::temp_dir().join(format!("transitmap-{}-{n}", std::process::id()));
        std::fs::create_dir_all(&dir)
            .map_err(|e| OptimizeError::SolverFailure(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }

    /// Program and arguments for the given paths.
    pub fn argv(&self, lp: &Path, sol: &Path) -> Vec<String> {
        let lp = lp.display().to_string();
        let sol = sol.display().to_string();
        let mut templated = false;
        let mut argv: Vec<String> = self
            .command
            .split_whitespace()
            .map(|t| {
                if t.contains("{lp}") || t.contains("{sol}") {
                    templated = true;
                }
                t.replace("{lp}", &lp).replace("{sol}", &sol)
            })
            .collect();
        if !templated {
            argv.push(lp);
            argv.push(sol);
        }
        argv
    }

    /// Runs the solver and returns the solution file's text.
    pub fn run(&self, lp: &Path, sol: &Path) -> Result<String, OptimizeError> {
        let argv = self.argv(lp, sol);
        let Some((prog, args)) = argv.split_first() else {
            return Err(OptimizeError::SolverFailure("empty solver command".into()));
        };
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| OptimizeError::SolverFailure(format!("cannot start {prog}: {e}")))?;
        let start = Instant::now();
        let status = loop {
            match child.try_wait() {
                Ok(Some(st)) => break st,
                Ok(None) => {}
                Err(e) => return Err(OptimizeError::SolverFailure(e.to_string())),
            }
            if self.timeout.is_some_and(|t| start.elapsed() > t) {
                let _ = child.kill();
                let _ = child.wait();
                return Err(OptimizeError::SolverFailure(format!(
                    "{prog} exceeded the time limit of {:.1} s",
                    self.timeout.unwrap_or_default().as_secs_f64()
                )));
            }
            std::thread::sleep(Duration::from_millis(10));
        };
        if !status.success() {
            let mut err = String::new();
            if let Some(mut s) = child.stderr.take() {
                use std::io::Read;
                let _ = s.read_to_string(&mut err);
            }
            return Err(OptimizeError::SolverFailure(format!("{prog} exited with {status}: {}", err.trim())));
        }
        let text = std::fs::read_to_string(sol)
            .map_err(|e| OptimizeError::SolverFailure(format!("cannot read solution {}: {e}", sol.display())))?;
        let infeasible = text
            .lines()
            .any(|l| l.trim_start().starts_with('#') && l.to_ascii_lowercase().contains("infeasible"));
        if infeasible {
            return Err(OptimizeError::Infeasible);
        }
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn placeholders_are_substituted() {
        let s = ExternalSolver::new("solver --model={lp} -o {sol} -q");
        let argv = s.argv(Path::new("/t/m.lp"), Path::new("/t/m.sol"));
        assert_eq!(argv, ["solver", "--model=/t/m.lp", "-o", "/t/m.sol", "-q"]);
    }

    #[test]
    fn paths_appended_without_placeholders() {
        let s = ExternalSolver::new("python3 highs_solve.py");
        let argv = s.argv(Path::new("a.lp"), Path::new("a.sol"));
        assert_eq!(argv, ["python3", "highs_solve.py", "a.lp", "a.sol"]);
    }

    #[test]
    fn missing_program_is_a_solver_failure() {
        let s = ExternalSolver::new("/nonexistent/solver-binary");
        let r = s.run(Path::new("x.lp"), Path::new("x.sol"));
        assert!(matches!(r, Err(OptimizeError::SolverFailure(_))));
    }
}
