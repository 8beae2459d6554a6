//! Command-line front end. Exit codes: 0 success, 1 learning or check
//! failure, 2 usage or argument error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, random_regular_seeded, serialize_edge_list, Graph};
use crate::harness::{self, ExperimentConfig, SweepAxis};
use crate::rng::{stream, Purpose};
use crate::stabsim::{sample_noisy_from, BasisAssignment, NoiseMode, NoiseModel, Tableau};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gslearn", version, about = "Learn graph states from single-qubit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random d-regular graph as an edge list.
    GenGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure copies of a graph state in a fixed product basis.
    Sample {
        /// Edge-list file.
        #[arg(long)]
        graph: PathBuf,
        /// One character per qubit: 1 for X, 0 for Z.
        #[arg(long)]
        basis: String,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::PauliInject)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Learn one random (or given) graph and report the candidate sets.
    Learn {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Estimate the success rate over a range of one parameter; writes CSV.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        axis: String,
        /// Comma-separated values for the axis.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the runtime_ms column.
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate the sample-complexity bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the tableau simulator against the statevector oracle.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::PauliInject)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list file to learn instead of random graphs.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    PauliInject,
    Bitflip,
}

impl From<ModeArg> for NoiseMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PauliInject => NoiseMode::PauliInject,
            ModeArg::Bitflip => NoiseMode::BitFlip,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn read_graph(path: &PathBuf) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

impl ExperimentArgs {
    fn config(&self, trials: u64) -> Result<ExperimentConfig> {
        let graph = self.graph.as_ref().map(read_graph).transpose()?;
        let (n, d) = match (&graph, self.n, self.d) {
            (Some(g), n, d) => {
                if n.is_some_and(|n| n != g.n()) || d.is_some_and(|d| d != g.d()) {
                    return Err(Error::arg("--n/--d disagree with the graph file"));
                }
                (g.n(), g.d())
            }
            (None, Some(n), Some(d)) => (n, d),
            (None, _, _) => return Err(Error::arg("--n and --d are required without --graph")),
        };
        Ok(ExperimentConfig {
            m: self.m,
            r: self.r,
            w: self.w,
            p: self.p,
            eps: self.eps,
            trials,
            master_seed: self.seed,
            noise_mode: self.mode.into(),
            graph: graph.map(Arc::new),
            ..ExperimentConfig::new(n, d)
        })
    }
}

fn cmd_learn(exp: &ExperimentArgs) -> Result<i32> {
    let cfg = exp.config(1)?;
    let learn = cfg.learn_config()?;
    let outcome = harness::run_trial_detailed(&cfg, 0)?;
    let mut text = format!(
        "n = {} d = {} m = {} r = {} w = {} p = {} mode = {}\n",
        learn.n, learn.d, learn.m, learn.r, learn.w, cfg.p, cfg.noise_mode
    );
    for v in 0..learn.n {
        let sets: Vec<String> = outcome
            .sets
            .members(v)
            .map(|a| a.iter().map(|u| (u + 1).to_string()).collect::<Vec<_>>().join(" "))
            .map(|s| format!("{{{s}}}"))
            .collect();
        text.push_str(&format!("{}: {}\n", v + 1, sets.join(" ")));
    }
    let r = &outcome.result;
    text.push_str(&format!(
        "success = {}\nresidual_candidates = {}\ntrue_neighbor_lost = {}\ncopies_used = {}\n",
        r.success, r.residual_candidates, r.true_neighbor_lost, r.copies_used
    ));
    emit(None, &text)?;
    Ok(if r.success { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_sample(graph: &PathBuf, basis: &str, p: f64, mode: ModeArg, shots: u64, seed: u64) -> Result<i32> {
    let g = read_graph(graph)?;
    let bits = crate::bits::BitRow::from_bitstring(basis)
        .ok_or_else(|| Error::arg(format!("basis `{basis}` must contain only 0 and 1")))?;
    let basis = BasisAssignment::new(bits);
    if basis.len() != g.n() {
        return Err(Error::arg(format!("basis has {} qubits, graph has {}", basis.len(), g.n())));
    }
    let noise = NoiseModel::new(p, mode.into())?;
    let state = Tableau::graph_state(&g);
    let mut rng = stream(seed, Purpose::Sample, &[]);
    let mut text = String::new();
    for _ in 0..shots {
        text.push_str(&sample_noisy_from(&state, &basis, &noise, &mut rng)?.to_string());
        text.push('\n');
    }
    emit(None, &text)?;
    Ok(EXIT_OK)
}

fn cmd_bounds(n: usize, d: usize, eps: f64, p: f64, w: Option<usize>, format: Format) -> Result<i32> {
    let reports = bounds::report(n, d, eps, p, w);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&reports).map_err(|e| Error::Resource(e.to_string()))? + "\n",
        Format::Text => {
            let lines: Vec<String> = reports
                .iter()
                .map(|r| {
                    let head = match (&r.value, &r.error) {
                        (Some(v), _) => format!("{} = {v}", r.name),
                        (None, Some(e)) => format!("{} = n/a ({e})", r.name),
                        (None, None) => format!("{} = n/a", r.name),
                    };
                    format!("{head:<40} {}", r.formula)
                })
                .collect();
            lines.join("\n") + "\n"
        }
    };
    emit(None, &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(max_n: usize, seed: u64) -> Result<i32> {
    verify::check_max_n(max_n)?;
    let graphs = verify::small_graphs(max_n, &[1, 2, 3]);
    let oracle = verify::check_oracle_equivalence(&graphs)?;
    let parity = verify::check_parity(&graphs, 200, seed)?;
    let status = |ok: bool| if ok { "ok" } else { "FAILED" };
    let text = format!(
        "oracle equivalence: {} graphs, {} bases, max |diff| = {:e}, {} mismatches: {}\n\
         parity: {} checks, {} violations: {}\n",
        oracle.graphs,
        oracle.bases,
        oracle.max_abs_diff,
        oracle.mismatches,
        status(oracle.passed()),
        parity.checks,
        parity.violations,
        status(parity.passed()),
    );
    emit(None, &text)?;
    Ok(if oracle.passed() && parity.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::GenGraph { n, d, seed, out } => {
            let g = random_regular_seeded(n, d, seed)?;
            emit(out.as_ref(), &serialize_edge_list(&g))?;
            Ok(EXIT_OK)
        }
        Command::Sample { graph, basis, p, mode, shots, seed } => cmd_sample(&graph, &basis, p, mode, shots, seed),
        Command::Learn { exp } => cmd_learn(&exp),
        Command::Sweep { exp, axis, values, trials, out, timing } => {
            let axis: SweepAxis = axis.parse()?;
            let cfg = exp.config(trials)?;
            let rows = harness::sweep(&cfg, axis, &values, timing)?;
            let mut buf = Vec::new();
            harness::write_csv(&mut buf, &rows)?;
            emit(out.as_ref(), &String::from_utf8_lossy(&buf))?;
            Ok(EXIT_OK)
        }
        Command::Bounds { n, d, eps, p, w, format } => cmd_bounds(n, d, eps, p, w, format),
        Command::Verify { max_n, seed } => cmd_verify(max_n, seed),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Infeasible { .. } | Error::Parse { .. } => EXIT_USAGE,
        Error::Generation { .. } | Error::Resource(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_cli(["gslearn", "bounds", "--bogus"]), EXIT_USAGE);
        assert_eq!(run_cli(["gslearn"]), EXIT_USAGE);
        assert_eq!(run_cli(["gslearn", "learn", "--n", "5", "--d", "3"]), EXIT_USAGE);
        assert_eq!(run_cli(["gslearn", "sweep", "--n", "12", "--d", "2", "--axis", "q", "--values", "1"]), EXIT_USAGE);
        assert_eq!(run_cli(["gslearn", "--help"]), EXIT_OK);
    }

    #[test]
    fn verify_small() {
        assert_eq!(run_cli(["gslearn", "verify", "--max-n", "4"]), EXIT_OK);
    }
}
