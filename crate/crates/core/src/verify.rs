//! Cross-checks between the tableau simulator and the dense oracle, and
//! parity checks on sampled outcomes. Backs the `verify` subcommand.

use crate::bits::BitRow;
use crate::densesim::{exact_outcome_distribution, NORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::graph::{all_regular, Graph};
use crate::rng::{stream, Purpose};
use crate::stabsim::{exact_distribution_via_tableau, measure_product, BasisAssignment, Tableau};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub graphs: usize,
    pub bases: usize,
    pub max_abs_diff: f64,
    pub mismatches: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn all_bases(n: usize) -> impl Iterator<Item = BasisAssignment> {
    (0..1u64 << n).map(move |idx| BasisAssignment::new(BitRow::from_index(n, idx)))
}

/// Every labeled d-regular graph on `n ≤ max_n` vertices for the given degrees.
pub fn small_graphs(max_n: usize, degrees: &[usize]) -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for &d in degrees {
            if d < n && (n * d) % 2 == 0 {
                out.extend(all_regular(n, d));
            }
        }
    }
    out
}

/// Compares the tableau and statevector outcome distributions for every
/// graph and basis assignment.
pub fn check_oracle_equivalence(graphs: &[Graph]) -> Result<OracleReport> {
    let mut rep = OracleReport::default();
    for g in graphs {
        rep.graphs += 1;
        for basis in all_bases(g.n()) {
            rep.bases += 1;
            let tab = exact_distribution_via_tableau(g, &basis)?;
            let dense = exact_outcome_distribution(g, &basis)?;
            for (a, b) in tab.iter().zip(&dense) {
                let diff = (a - b).abs();
                rep.max_abs_diff = rep.max_abs_diff.max(diff);
                if diff > NORM_TOLERANCE {
                    rep.mismatches += 1;
                }
            }
            if (tab.iter().sum::<f64>() - 1.0).abs() > NORM_TOLERANCE {
                rep.mismatches += 1;
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityReport {
    /// Number of (sample, vertex) pairs whose parity was determined.
    pub checks: u64,
    pub violations: u64,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// For `v` measured in X with all neighbors in Z, the noiseless outcome
/// satisfies `m_v ⊕ ⊕_{j∈N(v)} m_j = 0`. Checks that on `samples` random
/// bases of weight `w` per graph.
pub fn check_parity(graphs: &[Graph], samples: usize, seed: u64) -> Result<ParityReport> {
    let mut rep = ParityReport::default();
    for (gi, g) in graphs.iter().enumerate() {
        let n = g.n();
        let w = crate::learner::default_weight(n, g.d().max(1)).min(n);
        let state = Tableau::graph_state(g);
        let mut rng = stream(seed, Purpose::Verify, &[gi as u64]);
        for _ in 0..samples {
            let basis = BasisAssignment::random_weight(n, w, &mut rng)?;
            let m = measure_product(state.clone(), &basis, &mut rng)?;
            for v in 0..n {
                let nb = g.nbrs(v);
                if !basis.is_x(v) || nb.iter().any(|&j| basis.is_x(j as usize)) {
                    continue;
                }
                rep.checks += 1;
                let parity = nb.iter().fold(m.get(v), |acc, &j| acc ^ m.get(j as usize));
                rep.violations += parity as u64;
            }
        }
    }
    Ok(rep)
}

pub fn check_max_n(max_n: usize) -> Result<()> {
    if !(2..=10).contains(&max_n) {
        return Err(Error::arg(format!("max-n must lie in 2..=10, got {max_n}")));
    }
    Ok(())
}
