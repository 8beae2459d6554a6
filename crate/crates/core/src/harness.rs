//! Monte Carlo experiments: independent learning trials, success-rate
//! estimates with Wilson intervals, and parameter sweeps written as CSV.
//!
//! Trial `i` draws its graph from stream `(master_seed, Graph, [i])` and its
//! measurement randomness from `(master_seed, Learn, [i])`, so results do not
//! depend on thread scheduling. Set `GSL_THREADS` to cap the worker pool.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bounds;
use crate::error::{Error, Result};
use crate::graph::{random_regular, Graph};
use crate::learner::{self, default_weight, CandidateSets, GraphStateOracle, LearnConfig};
use crate::rng::{stream, Purpose};
use crate::stabsim::{NoiseMode, NoiseModel};
use crate::stats::{wilson_interval, Z_95};

pub const CSV_HEADER: &str =
    "seed,n,d,p,mode,m,r,w,trials,successes,rate,ci_lo,ci_hi,theory_m,theory_r,converse_N,runtime_ms";

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    /// Basis draws; defaults to the noiseless or noisy bound.
    pub m: Option<usize>,
    /// Copies per draw; defaults to 1 without noise, otherwise the noisy bound.
    pub r: Option<usize>,
    /// Basis weight; defaults to `⌈(n−d)/d⌉`.
    pub w: Option<usize>,
    pub p: f64,
    pub eps: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub noise_mode: NoiseMode,
    /// Learn this graph in every trial instead of a fresh random one.
    pub graph: Option<Arc<Graph>>,
}

impl ExperimentConfig {
    pub fn new(n: usize, d: usize) -> Self {
        ExperimentConfig {
            n,
            d,
            m: None,
            r: None,
            w: None,
            p: 0.0,
            eps: 0.1,
            trials: 100,
            master_seed: 0,
            noise_mode: NoiseMode::PauliInject,
            graph: None,
        }
    }

    /// Fills in defaults and checks every learner precondition.
    pub fn learn_config(&self) -> Result<LearnConfig> {
        if self.trials == 0 {
            return Err(Error::arg("trials must be at least 1"));
        }
        let noise = NoiseModel::new(self.p, self.noise_mode)?;
        if let Some(g) = &self.graph {
            if g.n() != self.n || g.d() != self.d {
                return Err(Error::arg("pinned graph does not match n and d"));
            }
        }
        if self.d >= self.n {
            return Err(Error::arg(format!("d = {} must be smaller than n = {}", self.d, self.n)));
        }
        if (self.n * self.d) % 2 == 1 {
            return Err(Error::Infeasible { n: self.n, d: self.d });
        }
        if self.n < 2 * self.d * self.d {
            log::warn!("n = {} < 2d^2 = {}: outside the regime covered by the bounds", self.n, 2 * self.d * self.d);
        }
        let noisy = self.p > 0.0;
        let m = match self.m {
            Some(m) => m,
            None if noisy => bounds::m_noisy(self.n, self.d, self.eps)
                .map_err(|e| Error::arg(format!("cannot default m ({e}); pass m explicitly")))?
                as usize,
            None => bounds::m_noiseless(self.n, self.d, self.eps)
                .map_err(|e| Error::arg(format!("cannot default m ({e}); pass m explicitly")))?
                as usize,
        };
        let r = match self.r {
            Some(r) => r,
            None if noisy => bounds::r_noisy(self.n, self.d, self.eps, self.p)
                .map_err(|e| Error::arg(format!("cannot default r ({e}); pass r explicitly")))?
                as usize,
            None => 1,
        };
        let cfg = LearnConfig {
            n: self.n,
            d: self.d,
            m,
            r,
            w: self.w.unwrap_or_else(|| default_weight(self.n, self.d)),
            noise,
            master_seed: self.master_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug)]
pub struct TrialResult {
    pub trial_index: u64,
    pub success: bool,
    /// `Σ_v |S_v|` after learning.
    pub residual_candidates: usize,
    pub true_neighbor_lost: bool,
    pub copies_used: u64,
    pub wall_time: Duration,
}

/// Equality ignores `wall_time`.
impl PartialEq for TrialResult {
    fn eq(&self, other: &Self) -> bool {
        self.trial_index == other.trial_index
            && self.success == other.success
            && self.residual_candidates == other.residual_candidates
            && self.true_neighbor_lost == other.true_neighbor_lost
            && self.copies_used == other.copies_used
    }
}

/// A finished trial together with the graph and the learner's final state.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub graph: Arc<Graph>,
    pub sets: CandidateSets,
    pub result: TrialResult,
}

fn trial_with(cfg: &ExperimentConfig, learn: &LearnConfig, trial_index: u64) -> Result<TrialOutcome> {
    let start = Instant::now();
    let graph = match &cfg.graph {
        Some(g) => Arc::clone(g),
        None => {
            let mut grng = stream(cfg.master_seed, Purpose::Graph, &[trial_index]);
            Arc::new(random_regular(cfg.n, cfg.d, &mut grng)?)
        }
    };
    let mut oracle = GraphStateOracle::new(&graph, learn.noise);
    let mut rng = stream(cfg.master_seed, Purpose::Learn, &[trial_index]);
    let sets = learner::learn_graph_state(&mut oracle, learn, &mut rng)?;
    let result = TrialResult {
        trial_index,
        success: learner::is_success(&sets, &graph)?,
        residual_candidates: sets.total(),
        true_neighbor_lost: learner::true_neighbor_lost(&sets, &graph),
        copies_used: oracle.queries(),
        wall_time: start.elapsed(),
    };
    Ok(TrialOutcome { graph, sets, result })
}

/// Runs one learning trial on a fresh random graph (or the pinned one).
pub fn run_trial(cfg: &ExperimentConfig, trial_index: u64) -> Result<TrialResult> {
    run_trial_detailed(cfg, trial_index).map(|o| o.result)
}

pub fn run_trial_detailed(cfg: &ExperimentConfig, trial_index: u64) -> Result<TrialOutcome> {
    trial_with(cfg, &cfg.learn_config()?, trial_index)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuccessEstimate {
    pub successes: u64,
    /// Trials that ran to completion.
    pub trials: u64,
    /// Trials whose graph could not be generated; excluded from the rate.
    pub infrastructure_errors: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub copies_used: u64,
    pub true_neighbor_losses: u64,
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GSL_THREADS") {
        let threads: usize =
            v.parse().map_err(|_| Error::arg(format!("GSL_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(threads.max(1));
    }
    builder.build().map_err(|e| Error::Resource(e.to_string()))
}

/// Runs every trial, in parallel, and returns per-trial results sorted by index.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<Result<TrialResult>>> {
    let learn = cfg.learn_config()?;
    let pool = worker_pool()?;
    Ok(pool.install(|| {
        (0..cfg.trials).into_par_iter().map(|i| trial_with(cfg, &learn, i).map(|o| o.result)).collect::<Vec<_>>()
    }))
}

pub fn estimate_success(cfg: &ExperimentConfig) -> Result<SuccessEstimate> {
    let results = run_trials(cfg)?;
    let mut est = SuccessEstimate {
        successes: 0,
        trials: 0,
        infrastructure_errors: 0,
        rate: 0.0,
        ci_lo: 0.0,
        ci_hi: 0.0,
        copies_used: 0,
        true_neighbor_losses: 0,
    };
    for res in results {
        match res {
            Ok(t) => {
                est.trials += 1;
                est.successes += t.success as u64;
                est.copies_used += t.copies_used;
                est.true_neighbor_losses += t.true_neighbor_lost as u64;
            }
            Err(Error::Generation { attempts }) => {
                log::warn!("graph generation failed after {attempts} attempts");
                est.infrastructure_errors += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if est.trials == 0 {
        return Err(Error::Resource("every trial failed to generate a graph".into()));
    }
    est.rate = est.successes as f64 / est.trials as f64;
    (est.ci_lo, est.ci_hi) = wilson_interval(est.successes, est.trials, Z_95)?;
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    M,
    R,
    P,
    N,
    D,
    W,
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "m" => SweepAxis::M,
            "r" => SweepAxis::R,
            "p" => SweepAxis::P,
            "n" => SweepAxis::N,
            "d" => SweepAxis::D,
            "w" => SweepAxis::W,
            other => return Err(Error::arg(format!("unknown sweep axis `{other}` (expected m, r, p, n, d or w)"))),
        })
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::M => "m",
            SweepAxis::R => "r",
            SweepAxis::P => "p",
            SweepAxis::N => "n",
            SweepAxis::D => "d",
            SweepAxis::W => "w",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub mode: NoiseMode,
    pub m: usize,
    pub r: usize,
    pub w: usize,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub theory_m: Option<u64>,
    pub theory_r: Option<u64>,
    pub converse_n: Option<f64>,
    pub runtime_ms: u128,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n,
            self.d,
            self.p,
            self.mode,
            self.m,
            self.r,
            self.w,
            self.trials,
            self.successes,
            self.rate,
            self.ci_lo,
            self.ci_hi,
            opt(&self.theory_m),
            opt(&self.theory_r),
            opt(&self.converse_n),
            self.runtime_ms
        )
    }
}

fn integral(axis: SweepAxis, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::arg(format!("sweep over {axis} needs non-negative integers, got {v}")));
    }
    Ok(v as usize)
}

/// Runs `estimate_success` once per value of `axis`. With `timing` off the
/// `runtime_ms` column is 0, which keeps the output a pure function of the
/// configuration.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64], timing: bool) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = base.clone();
        match axis {
            SweepAxis::M => cfg.m = Some(integral(axis, v)?),
            SweepAxis::R => cfg.r = Some(integral(axis, v)?),
            SweepAxis::W => cfg.w = Some(integral(axis, v)?),
            SweepAxis::N => cfg.n = integral(axis, v)?,
            SweepAxis::D => cfg.d = integral(axis, v)?,
            SweepAxis::P => cfg.p = v,
        }
        let learn = cfg.learn_config()?;
        let start = Instant::now();
        let est = estimate_success(&cfg)?;
        let elapsed = start.elapsed().as_millis();
        log::info!("{axis} = {v}: {}/{} successes", est.successes, est.trials);
        rows.push(SweepRow {
            seed: cfg.master_seed,
            n: cfg.n,
            d: cfg.d,
            p: cfg.p,
            mode: cfg.noise_mode,
            m: learn.m,
            r: learn.r,
            w: learn.w,
            trials: est.trials,
            successes: est.successes,
            rate: est.rate,
            ci_lo: est.ci_lo,
            ci_hi: est.ci_hi,
            theory_m: bounds::m_noiseless(cfg.n, cfg.d, cfg.eps).ok(),
            theory_r: bounds::r_noisy(cfg.n, cfg.d, cfg.eps, cfg.p).ok(),
            converse_n: bounds::converse_n(cfg.n, cfg.d, cfg.p, cfg.eps).ok(),
            runtime_ms: if timing { elapsed } else { 0 },
        });
    }
    Ok(rows)
}

/// Writes the header and rows, LF line endings.
pub fn write_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig { trials: 20, master_seed: 3, ..ExperimentConfig::new(12, 2) }
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small();
        assert_eq!(run_trial(&cfg, 17).unwrap(), run_trial(&cfg, 17).unwrap());
    }

    #[test]
    fn noiseless_trials_never_lose_true_neighbors() {
        let cfg = ExperimentConfig { m: Some(30), ..small() };
        for i in 0..10 {
            assert!(!run_trial(&cfg, i).unwrap().true_neighbor_lost);
        }
    }

    #[test]
    fn zero_rounds_leave_full_candidate_sets() {
        let cfg = ExperimentConfig { m: Some(0), ..small() };
        let t = run_trial(&cfg, 0).unwrap();
        assert!(!t.success);
        assert_eq!(t.residual_candidates, 12 * 55);
        assert_eq!(t.copies_used, 0);
    }

    #[test]
    fn copies_are_accounted_exactly() {
        let cfg = ExperimentConfig { m: Some(25), r: Some(3), ..small() };
        let est = estimate_success(&cfg).unwrap();
        assert_eq!(est.copies_used, 20 * 25 * 3);
    }

    #[test]
    fn invalid_configs() {
        assert!(ExperimentConfig { trials: 0, ..small() }.learn_config().is_err());
        assert!(matches!(ExperimentConfig::new(5, 3).learn_config(), Err(Error::Infeasible { .. })));
        // n < 2d^2 without an explicit m cannot be defaulted.
        assert!(ExperimentConfig::new(10, 3).learn_config().is_err());
        assert!(ExperimentConfig { m: Some(10), ..ExperimentConfig::new(10, 3) }.learn_config().is_ok());
        assert!(ExperimentConfig { p: 0.9, ..small() }.learn_config().is_err());
        assert!("q".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn defaults_follow_the_bounds() {
        let learn = ExperimentConfig::new(30, 3).learn_config().unwrap();
        assert_eq!((learn.m, learn.r, learn.w), (510, 1, 9));
        let noisy = ExperimentConfig { p: 0.05, eps: 0.2, ..ExperimentConfig::new(30, 3) }.learn_config().unwrap();
        assert_eq!((noisy.m, noisy.r), (465, 20));
    }

    #[test]
    fn csv_header_and_rows() {
        let cfg = ExperimentConfig { trials: 5, ..small() };
        let rows = sweep(&cfg, SweepAxis::M, &[4.0, 40.0], false).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 17);
        assert_eq!(first[5], "4");
        assert_eq!(first[4], "pauli-inject");
        assert!(sweep(&cfg, SweepAxis::M, &[1.5], false).is_err());
    }
}
