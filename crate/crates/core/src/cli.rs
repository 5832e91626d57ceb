//! Command-line front end.
//!
//! Every subcommand reads a model file and an optional parameter file.
//! Output is line oriented: `key=value` records, the flat model text and the
//! table dump format of [`crate::table::Table::dump`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::ast::{Model, TableNames};
use crate::heuristics::HeuristicConfig;
use crate::instantiate::{filter_domains, instantiate, InstantiateError};
use crate::parser::{parse_model, parse_params, ParamBinding, ParseError};
use crate::solver::{solve, Mode, SearchStats, SolveOptions, SolveResult};
use crate::tabulate::{tabulate_pass, TabLimits, TabulationReport};

#[derive(Parser, Debug)]
#[command(name = "autotab", version, about = "Tabulate constraint model subexpressions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the instantiated flat model.
    Compile(CompileArgs),
    /// Search for solutions and print them with search statistics.
    Solve(SolveArgs),
    /// Solve every instance with and without tabulation.
    Compare(CompareArgs),
    /// Print one record per tabulation candidate.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct Input {
    /// Model file.
    pub model: PathBuf,
    /// Parameter file.
    pub param: Option<PathBuf>,
    /// Keep the instantiated domains without unary filtering.
    #[arg(long)]
    pub no_filter: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct TabArgs {
    /// Node limit for each table generation search.
    #[arg(long, default_value_t = 100_000)]
    pub node_limit: u64,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    #[command(flatten)]
    pub input: Input,
    /// Replace candidates by table constraints.
    #[arg(long)]
    pub tabulate: bool,
    /// Append the tuples of every table after the model.
    #[arg(long)]
    pub dump_tables: bool,
    /// Node limit for each table generation search; implies --tabulate.
    #[arg(long)]
    pub node_limit: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub tabulate: bool,
    #[command(flatten)]
    pub tab: TabArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Enumerate every solution (ignored for optimisation models).
    #[arg(long)]
    pub all_solutions: bool,
    #[arg(long)]
    pub node_budget: Option<u64>,
    /// Also write the statistics record to this file.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Seed for randomized propagator scheduling.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Model file.
    pub model: PathBuf,
    /// One parameter file per instance.
    pub params: Vec<PathBuf>,
    #[arg(long)]
    pub no_filter: bool,
    #[command(flatten)]
    pub tab: TabArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub tab: TabArgs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Instantiate(#[from] InstantiateError),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Parses and instantiates a model against an optional parameter file,
/// then filters domains unless `filter` is false.
pub fn load(model: &Path, param: Option<&Path>, filter: bool) -> Result<Model, CliError> {
    let text = read(model)?;
    let src = parse_model(&text)
        .map_err(|source| CliError::Parse { path: model.display().to_string(), source })?;
    let params = match param {
        Some(p) => parse_params(&read(p)?)
            .map_err(|source| CliError::Parse { path: p.display().to_string(), source })?,
        None => ParamBinding::new(),
    };
    let m = instantiate(&src, &params)?;
    Ok(if filter { filter_domains(m) } else { m })
}

fn tabulate(m: Model, node_limit: u64) -> (Model, Vec<TabulationReport>) {
    tabulate_pass(m, &HeuristicConfig::default(), &TabLimits { node_limit })
}

fn options(m: &Model, s: &SearchArgs) -> SolveOptions {
    let mode = if m.objective.is_some() {
        Mode::Optimize
    } else if s.all_solutions {
        Mode::AllSolutions
    } else {
        Mode::FirstSolution
    };
    SolveOptions { mode: Some(mode), node_budget: s.node_budget, schedule_seed: s.seed }
}

fn report_line(r: &TabulationReport) -> String {
    format!("report kind={:?} {r}", r.kind)
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1000.0)
}

fn write_stats(path: &Option<PathBuf>, stats: &SearchStats) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, format!("{stats}\n"))
            .map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
    }
    Ok(())
}

fn compile(a: &CompileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut m = load(&a.input.model, a.input.param.as_deref(), !a.input.no_filter)?;
    let mut reports = Vec::new();
    if a.tabulate || a.node_limit.is_some() {
        let (t, r) = tabulate(m, a.node_limit.unwrap_or(TabLimits::default().node_limit));
        m = t;
        reports = r;
    }
    let mut names = TableNames::default();
    let _ = write!(out, "{}", m.write_flat(&mut names));
    for r in &reports {
        let _ = writeln!(out, "{}", report_line(r));
    }
    if a.dump_tables {
        let _ = write!(out, "{}", names.dump());
    }
    Ok(())
}

fn print_solve(res: &SolveResult, out: &mut dyn Write) {
    for s in &res.solutions {
        let line: Vec<String> = s.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "{}", res.stats);
}

fn solve_cmd(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut m = load(&a.input.model, a.input.param.as_deref(), !a.input.no_filter)?;
    if a.tabulate {
        m = tabulate(m, a.tab.node_limit).0;
    }
    let res = solve(&m, &options(&m, &a.search));
    print_solve(&res, out);
    write_stats(&a.search.stats, &res.stats)
}

struct Run {
    stats: SearchStats,
    compile: Duration,
    solve: Duration,
}

fn timed_run(a: &CompareArgs, param: Option<&Path>, tab: bool) -> Result<Run, CliError> {
    let t0 = Instant::now();
    let mut m = load(&a.model, param, !a.no_filter)?;
    if tab {
        m = tabulate(m, a.tab.node_limit).0;
    }
    let compile = t0.elapsed();
    let t1 = Instant::now();
    let res = solve(&m, &options(&m, &a.search));
    Ok(Run { stats: res.stats, compile, solve: t1.elapsed() })
}

fn geometric_mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 1.0;
    }
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

fn compare(a: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let instances: Vec<Option<&Path>> = if a.params.is_empty() {
        vec![None]
    } else {
        a.params.iter().map(|p| Some(p.as_path())).collect()
    };
    let mut node_q = Vec::new();
    let mut time_q = Vec::new();
    let mut last = None;
    for p in instances {
        let before = timed_run(a, p, false)?;
        let after = timed_run(a, p, true)?;
        let nq = before.stats.nodes.max(1) as f64 / after.stats.nodes.max(1) as f64;
        let tb = (before.compile + before.solve).as_secs_f64().max(1e-9);
        let ta = (after.compile + after.solve).as_secs_f64().max(1e-9);
        node_q.push(nq);
        time_q.push(tb / ta);
        let name = p.map_or("-".to_string(), |p| p.display().to_string());
        let _ = writeln!(
            out,
            "instance={name} status_before={} status_after={} nodes_before={} nodes_after={} \
             node_quotient={nq:.4} compile_ms_before={} solve_ms_before={} compile_ms_after={} \
             solve_ms_after={} time_quotient={:.4}",
            before.stats.status.name(),
            after.stats.status.name(),
            before.stats.nodes,
            after.stats.nodes,
            ms(before.compile),
            ms(before.solve),
            ms(after.compile),
            ms(after.solve),
            tb / ta,
        );
        last = Some(after.stats);
    }
    let _ = writeln!(
        out,
        "instances={} s={:.4} s_time={:.4}",
        node_q.len(),
        geometric_mean(&node_q),
        geometric_mean(&time_q)
    );
    if let Some(stats) = last {
        write_stats(&a.search.stats, &stats)?;
    }
    Ok(())
}

fn report(a: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let m = load(&a.input.model, a.input.param.as_deref(), !a.input.no_filter)?;
    let (_, reports) = tabulate(m, a.tab.node_limit);
    for r in &reports {
        let _ = writeln!(out, "{}", report_line(r));
    }
    let _ = writeln!(out, "candidates={}", reports.len());
    Ok(())
}

/// Runs one command line and returns the process exit status:
/// 0 on success (including proven unsatisfiability), 1 on usage errors and
/// 2 on unreadable or invalid input.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let res = match &cli.command {
        Command::Compile(a) => compile(a, out),
        Command::Solve(a) => solve_cmd(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Report(a) => report(a, out),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_error_exits_one() {
        assert_eq!(run_str(&["autotab", "frobnicate"]).0, 1);
        assert_eq!(run_str(&["autotab", "solve", "--node-budget", "x", "m"]).0, 1);
    }

    #[test]
    fn missing_file_exits_two() {
        let (code, _, err) = run_str(&["autotab", "compile", "/nonexistent/model.eprime"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn knight_table_dump() {
        let (code, out, _) = run_str(&[
            "autotab",
            "compile",
            "--tabulate",
            "--dump-tables",
            "--no-filter",
            &fixture("knights_seq.eprime"),
            &fixture("knights_n4.param"),
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        let i = lines.iter().position(|l| l.starts_with("table t0 arity 2")).unwrap();
        assert_eq!(&lines[i + 1..i + 3], &["0 6", "0 9"]);
    }

    #[test]
    fn geometric_mean_of_quotients() {
        assert!((geometric_mean(&[2.0, 8.0]) - 4.0).abs() < 1e-12);
        assert_eq!(geometric_mean(&[]), 1.0);
    }
}
