//! Command implementations behind the `ncrelax` binary.
//!
//! Each command writes machine-readable output to `out`, diagnostics to
//! `err`, and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | unreadable input, parse error, bad arguments |
//! | 2 | relaxation could not be generated |
//! | 3 | solver suspects infeasibility or unboundedness |
//! | 4 | solver failed or did not converge |

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::bench::{run_bench, BenchMode, BenchRow};
use crate::problem::{parse_problem, ProblemDef};
use crate::relaxation::Relaxation;
use crate::sdpa::{read_sdpa, to_sdp, write_sdpa};
use crate::solver::{solve, SolverOptions, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_GENERATION: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Overrides the rewrite pass cap.
pub const MAX_PASSES_ENV: &str = "NCRELAX_MAX_PASSES";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub max_passes: Option<usize>,
    pub solver: SolverOptions,
}

impl Settings {
    pub fn from_env() -> Result<Self, String> {
        let max_passes = match std::env::var(MAX_PASSES_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&p| p > 0)
                    .ok_or_else(|| {
                        format!("{MAX_PASSES_ENV} must be a positive integer, got {v:?}")
                    })?,
            ),
            Err(_) => None,
        };
        Ok(Self {
            max_passes,
            ..Self::default()
        })
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<ProblemDef, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    parse_problem(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_INPUT
    })
}

fn relax(def: &ProblemDef, settings: &Settings, err: &mut dyn Write) -> Result<Relaxation, i32> {
    let rel = def.relax_with(settings.max_passes).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_GENERATION
    })?;
    for w in &rel.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(rel)
}

fn sizes(rel: &Relaxation) -> String {
    rel.block_sizes()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn cmd_generate(
    input: &Path,
    output: &Path,
    settings: &Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let def = match load(input, err) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let rel = match relax(&def, settings, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let written = File::create(output).and_then(|f| write_sdpa(&to_sdp(&rel), BufWriter::new(f)));
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write {}: {e}", output.display());
        return EXIT_INPUT;
    }
    let _ = writeln!(out, "variables {}", rel.nvars);
    let _ = writeln!(out, "blocks {}", sizes(&rel));
    EXIT_OK
}

pub fn cmd_info(
    input: &Path,
    settings: &Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let def = match load(input, err) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let rel = match relax(&def, settings, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let basis: Vec<String> = rel
        .basis
        .iter()
        .map(|w| w.display(&def.variables).to_string())
        .collect();
    let _ = writeln!(out, "order {}", rel.order);
    let _ = writeln!(out, "variables {}", rel.nvars);
    let _ = writeln!(out, "blocks {}", sizes(&rel));
    let _ = writeln!(out, "localizing_blocks {}", rel.localizing_blocks());
    let _ = writeln!(
        out,
        "objective_shift {}",
        crate::format_real(rel.objective_shift())
    );
    let _ = writeln!(out, "basis {}", basis.join(" "));
    EXIT_OK
}

/// Solves a problem file, or a sparse SDPA file when the name ends in
/// `.dat-s`. Prints `(primal, dual)`.
pub fn cmd_solve(
    input: &Path,
    settings: &Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let is_sdpa = input.to_string_lossy().ends_with(".dat-s");
    let (problem, shift) = if is_sdpa {
        let parsed = File::open(input)
            .map_err(crate::sdpa::SdpaError::from)
            .and_then(|f| read_sdpa(BufReader::new(f)));
        match parsed {
            Ok(p) => (p, 0.0),
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", input.display());
                return EXIT_INPUT;
            }
        }
    } else {
        let def = match load(input, err) {
            Ok(d) => d,
            Err(code) => return code,
        };
        match relax(&def, settings, err) {
            Ok(rel) => (to_sdp(&rel), rel.objective_shift()),
            Err(code) => return code,
        }
    };
    let sol = match solve(&problem, &settings.solver) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_SOLVER;
        }
    };
    let _ = writeln!(
        out,
        "({:?}, {:?})",
        sol.primal_obj + shift,
        sol.dual_obj + shift
    );
    let _ = writeln!(
        err,
        "status {} after {} iterations",
        sol.status, sol.iterations
    );
    match sol.status {
        Status::Optimal => EXIT_OK,
        Status::InfeasibleSuspected => EXIT_INFEASIBLE,
        Status::MaxIter => EXIT_SOLVER,
    }
}

pub fn cmd_bench(
    n: usize,
    mode: BenchMode,
    order: usize,
    all_subs: bool,
    settings: &Settings,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if n < 2 {
        let _ = writeln!(err, "error: the benchmark needs at least 2 variables");
        return EXIT_INPUT;
    }
    if order < 1 {
        let _ = writeln!(err, "error: order must be at least 1");
        return EXIT_INPUT;
    }
    match run_bench(n, mode, order, all_subs, settings.max_passes) {
        Ok((row, _)) => {
            let _ = writeln!(out, "{}", BenchRow::CSV_HEADER);
            let _ = writeln!(out, "{}", row.csv());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_GENERATION
        }
    }
}
