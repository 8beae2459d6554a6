//! Learning a d-regular graph state from product X/Z measurements.
//!
//! Each round draws a random basis string of weight `w` and measures `r`
//! fresh copies in it. For every X-measured vertex `v` and every candidate
//! neighbor set `α` that was entirely Z-measured, the parity
//! `m_v + Σ_{a∈α} m_a` is always even when `α = N(v)` (it is the outcome of
//! the stabilizer `X_v Π Z_a`) and a fair coin otherwise. A majority of odd
//! parities over the `r` copies eliminates `α` from the candidates for `v`.

use rand::{Rng, RngCore};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::stabsim::{sample_noisy_from, BasisAssignment, NoiseModel, Tableau};

/// Majority vote of `ones` set bits out of `len`, with a fair coin on ties.
/// The coin is drawn only when a tie actually occurs.
pub fn maj_count<R: Rng + ?Sized>(ones: usize, len: usize, rng: &mut R) -> bool {
    match (2 * ones).cmp(&len) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rng.random::<bool>(),
    }
}

pub fn maj<R: Rng + ?Sized>(s: &[bool], rng: &mut R) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::arg("majority of an empty vector is undefined"));
    }
    let ones = s.iter().filter(|&&b| b).count();
    Ok(maj_count(ones, s.len(), rng))
}

/// Default basis weight `⌈(n − d) / d⌉`, clamped into `1..=n`.
pub fn default_weight(n: usize, d: usize) -> usize {
    if d == 0 {
        return n.max(1);
    }
    (n - d).div_ceil(d).clamp(1, n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnConfig {
    pub n: usize,
    pub d: usize,
    /// Number of basis draws. Zero is allowed and learns nothing.
    pub m: usize,
    /// Copies measured per basis draw.
    pub r: usize,
    /// Hamming weight of each basis string (number of X-measured qubits).
    pub w: usize,
    pub noise: NoiseModel,
    pub master_seed: u64,
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::arg("n must be positive"));
        }
        if self.d >= self.n {
            return Err(Error::arg(format!("d = {} must be smaller than n = {}", self.d, self.n)));
        }
        if (self.n * self.d) % 2 == 1 {
            return Err(Error::Infeasible { n: self.n, d: self.d });
        }
        if self.w == 0 || self.w > self.n {
            return Err(Error::arg(format!("w = {} must lie in 1..={}", self.w, self.n)));
        }
        if self.r == 0 {
            return Err(Error::arg("r must be at least 1"));
        }
        Ok(())
    }

    /// Total number of state copies consumed, `N = m·r`.
    pub fn copies(&self) -> u64 {
        self.m as u64 * self.r as u64
    }
}

/// Source of fresh copies of an unknown state, each measured once.
pub trait CopySource {
    fn n(&self) -> usize;
    fn measure_copy(&mut self, basis: &BasisAssignment, rng: &mut dyn RngCore) -> Result<BitRow>;
}

/// Hands out copies of `|g>`, each passed through the noise model.
#[derive(Clone, Debug)]
pub struct GraphStateOracle {
    state: Tableau,
    noise: NoiseModel,
    queries: u64,
}

impl GraphStateOracle {
    pub fn new(g: &Graph, noise: NoiseModel) -> Self {
        GraphStateOracle { state: Tableau::graph_state(g), noise, queries: 0 }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl CopySource for GraphStateOracle {
    fn n(&self) -> usize {
        self.state.n()
    }

    fn measure_copy(&mut self, basis: &BasisAssignment, rng: &mut dyn RngCore) -> Result<BitRow> {
        self.queries += 1;
        sample_noisy_from(&self.state, basis, &self.noise, rng)
    }
}

/// Basis draws and measurement outcomes from [`meas_qbits`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeRecord {
    n: usize,
    r: usize,
    bases: Vec<BasisAssignment>,
    /// `outcomes[t][k]` is the outcome of copy `t` in round `k`.
    outcomes: Vec<Vec<BitRow>>,
}

impl OutcomeRecord {
    pub fn new(n: usize, bases: Vec<BasisAssignment>, outcomes: Vec<Vec<BitRow>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::arg("need at least one repetition"));
        }
        if bases.iter().any(|b| b.len() != n) {
            return Err(Error::arg("basis length does not match n"));
        }
        if let Some(w) = bases.first().map(|b| b.weight()) {
            if bases.iter().any(|b| b.weight() != w) {
                return Err(Error::arg("basis strings must share one Hamming weight"));
            }
        }
        for rep in &outcomes {
            if rep.len() != bases.len() || rep.iter().any(|o| o.len() != n) {
                return Err(Error::arg("outcome matrix shape does not match the bases"));
            }
        }
        Ok(OutcomeRecord { n, r: outcomes.len(), bases, outcomes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.bases.len()
    }

    pub fn repeats(&self) -> usize {
        self.r
    }

    pub fn basis(&self, k: usize) -> &BasisAssignment {
        &self.bases[k]
    }

    pub fn outcome(&self, t: usize, k: usize) -> &BitRow {
        &self.outcomes[t][k]
    }
}

/// Runs the measurement phase: `m` random weight-`w` bases, `r` fresh copies each.
pub fn meas_qbits<S: CopySource + ?Sized, R: RngCore>(
    oracle: &mut S,
    cfg: &LearnConfig,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    cfg.validate()?;
    if oracle.n() != cfg.n {
        return Err(Error::arg(format!("oracle has {} qubits, config says {}", oracle.n(), cfg.n)));
    }
    let mut bases = Vec::with_capacity(cfg.m);
    let mut outcomes = vec![Vec::with_capacity(cfg.m); cfg.r];
    for _ in 0..cfg.m {
        let basis = BasisAssignment::random_weight(cfg.n, cfg.w, rng)?;
        for rep in outcomes.iter_mut() {
            rep.push(oracle.measure_copy(&basis, rng)?);
        }
        bases.push(basis);
    }
    OutcomeRecord::new(cfg.n, bases, outcomes)
}

/// Per-vertex surviving candidate neighbor sets. Each list is kept in
/// lexicographic order; members are stored flat, `d` indices per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSets {
    n: usize,
    d: usize,
    flat: Vec<Vec<u32>>,
    len: Vec<usize>,
}

impl CandidateSets {
    /// Every d-subset of `V \ {v}` for every `v`.
    pub fn full(n: usize, d: usize) -> Self {
        let mut flat = Vec::with_capacity(n);
        let mut len = Vec::with_capacity(n);
        for v in 0..n {
            let others: Vec<u32> = (0..n as u32).filter(|&u| u as usize != v).collect();
            let mut list = Vec::new();
            let mut count = 0;
            if d <= others.len() {
                // Odometer over positions into `others`.
                let mut pos: Vec<usize> = (0..d).collect();
                loop {
                    list.extend(pos.iter().map(|&p| others[p]));
                    count += 1;
                    let Some(i) = (0..d).rev().find(|&i| pos[i] < others.len() - d + i) else { break };
                    pos[i] += 1;
                    for j in i + 1..d {
                        pos[j] = pos[j - 1] + 1;
                    }
                }
            }
            flat.push(list);
            len.push(count);
        }
        CandidateSets { n, d, flat, len }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self, v: usize) -> usize {
        self.len[v]
    }

    pub fn is_empty(&self, v: usize) -> bool {
        self.len[v] == 0
    }

    pub fn total(&self) -> usize {
        self.len.iter().sum()
    }

    /// Members of the candidate set for `v`, each a sorted slice of `d` vertices.
    pub fn members(&self, v: usize) -> impl Iterator<Item = &[u32]> + '_ {
        let d = self.d;
        (0..self.len[v]).map(move |i| &self.flat[v][i * d..(i + 1) * d])
    }

    pub fn contains(&self, v: usize, alpha: &[u32]) -> bool {
        self.members(v).any(|m| m == alpha)
    }

    /// Diagnostic: `u` appears in some candidate for `v` iff `v` appears in
    /// some candidate for `u`. Never used to decide success.
    pub fn is_symmetric(&self) -> bool {
        let mut mention = vec![BitRow::zeros(self.n); self.n];
        for (v, row) in mention.iter_mut().enumerate() {
            for m in self.members(v) {
                for &u in m {
                    row.set(u as usize, true);
                }
            }
        }
        (0..self.n).all(|v| (0..self.n).all(|u| mention[v].get(u) == mention[u].get(v)))
    }

    /// Applies round `k` of `rec`. Candidates are visited for `v` in
    /// ascending order and, within `v`, in lexicographic order; Maj
    /// tie-break coins are drawn in that order.
    pub fn eliminate_round<R: Rng + ?Sized>(
        &mut self,
        rec: &OutcomeRecord,
        k: usize,
        rng: &mut R,
        observer: &mut dyn FnMut(&TestEvent<'_>),
    ) {
        let d = self.d;
        let r = rec.repeats();
        let basis = rec.basis(k).bits();
        let reps: Vec<&BitRow> = (0..r).map(|t| rec.outcome(t, k)).collect();
        for v in basis.ones() {
            let list = &mut self.flat[v];
            let mut keep = 0;
            for i in 0..self.len[v] {
                let start = i * d;
                let alpha = &list[start..start + d];
                let tested = alpha.iter().all(|&a| !basis.get(a as usize));
                let mut deleted = false;
                if tested {
                    let ones =
                        reps.iter().filter(|m| alpha.iter().fold(m.get(v), |acc, &a| acc ^ m.get(a as usize))).count();
                    deleted = maj_count(ones, r, rng);
                    observer(&TestEvent { round: k, vertex: v, candidate: alpha, ones, repeats: r, deleted });
                }
                if !deleted {
                    list.copy_within(start..start + d, keep * d);
                    keep += 1;
                }
            }
            self.len[v] = keep;
            list.truncate(keep * d);
        }
    }
}

/// One Maj evaluation: candidate `candidate` for `vertex` was testable in
/// `round`, `ones` of the `repeats` parities were odd.
#[derive(Debug, Clone, Copy)]
pub struct TestEvent<'a> {
    pub round: usize,
    pub vertex: usize,
    pub candidate: &'a [u32],
    pub ones: usize,
    pub repeats: usize,
    pub deleted: bool,
}

pub fn find_nbs<R: Rng + ?Sized>(rec: &OutcomeRecord, d: usize, rng: &mut R) -> Result<CandidateSets> {
    find_nbs_observed(rec, d, rng, &mut |_| {})
}

/// [`find_nbs`] that reports every parity test to `observer`.
pub fn find_nbs_observed<R: Rng + ?Sized>(
    rec: &OutcomeRecord,
    d: usize,
    rng: &mut R,
    observer: &mut dyn FnMut(&TestEvent<'_>),
) -> Result<CandidateSets> {
    if d >= rec.n() {
        return Err(Error::arg(format!("d = {d} must be smaller than n = {}", rec.n())));
    }
    let mut sets = CandidateSets::full(rec.n(), d);
    for k in 0..rec.rounds() {
        sets.eliminate_round(rec, k, rng, observer);
    }
    Ok(sets)
}

pub fn learn_graph_state<S: CopySource + ?Sized, R: RngCore>(
    oracle: &mut S,
    cfg: &LearnConfig,
    rng: &mut R,
) -> Result<CandidateSets> {
    let rec = meas_qbits(oracle, cfg, rng)?;
    find_nbs(&rec, cfg.d, rng)
}

/// True iff every candidate set is exactly `{N_g(v)}`.
pub fn is_success(s: &CandidateSets, g: &Graph) -> Result<bool> {
    if s.n() != g.n() || s.d() != g.d() {
        return Err(Error::arg("candidate sets and graph have different n or d"));
    }
    Ok((0..g.n()).all(|v| s.len(v) == 1 && s.contains(v, g.nbrs(v))))
}

/// Whether some true neighbor set has been eliminated.
pub fn true_neighbor_lost(s: &CandidateSets, g: &Graph) -> bool {
    (0..g.n()).any(|v| !s.contains(v, g.nbrs(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;
    use crate::graph::random_regular_seeded;
    use crate::rng::{stream, Purpose};
    use crate::stabsim::NoiseMode;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitRow {
        BitRow::from_bitstring(s).unwrap()
    }

    fn cfg(n: usize, d: usize, m: usize, r: usize, w: usize) -> LearnConfig {
        LearnConfig { n, d, m, r, w, noise: NoiseModel::noiseless(), master_seed: 0 }
    }

    #[test]
    fn maj_examples() {
        let mut rng = stream(0, Purpose::Verify, &[]);
        assert!(maj(&[true, true, false], &mut rng).unwrap());
        assert!(!maj(&[false, false, true], &mut rng).unwrap());
        assert!(maj(&[], &mut rng).is_err());
        let trials = 20_000;
        let ones = (0..trials).filter(|_| maj(&[false, true], &mut rng).unwrap()).count();
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((ones as f64 / trials as f64 - 0.5).abs() < 4.0 * sigma);
    }

    #[test]
    fn full_candidate_family() {
        let s = CandidateSets::full(5, 2);
        assert_eq!(s.len(0), 6);
        assert_eq!(
            s.members(2).map(|m| m.to_vec()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![0, 3], vec![0, 4], vec![1, 3], vec![1, 4], vec![3, 4]]
        );
        let s = CandidateSets::full(4, 0);
        assert_eq!(s.len(1), 1);
        assert_eq!(s.members(1).next().unwrap(), &[] as &[u32]);
    }

    #[test]
    fn meas_qbits_shapes_and_query_count() {
        let g = Graph::cycle(4).unwrap();
        let mut oracle = GraphStateOracle::new(&g, NoiseModel::noiseless());
        let mut rng = stream(1, Purpose::Learn, &[]);
        let rec = meas_qbits(&mut oracle, &cfg(4, 2, 3, 2, 2), &mut rng).unwrap();
        assert_eq!(rec.rounds(), 3);
        assert_eq!(rec.repeats(), 2);
        assert!((0..3).all(|k| rec.basis(k).weight() == 2 && rec.basis(k).len() == 4));
        assert!((0..2).all(|t| (0..3).all(|k| rec.outcome(t, k).len() == 4)));
        assert_eq!(oracle.queries(), 6);
    }

    #[test]
    fn c4_parity_in_measured_rounds() {
        let g = Graph::cycle(4).unwrap();
        let mut oracle = GraphStateOracle::new(&g, NoiseModel::noiseless());
        let mut rng = stream(2, Purpose::Learn, &[]);
        let rec = meas_qbits(&mut oracle, &cfg(4, 2, 400, 3, 1), &mut rng).unwrap();
        let mut seen = 0;
        for k in 0..rec.rounds() {
            if rec.basis(k).bits() == &bits("1000") {
                seen += 1;
                for t in 0..3 {
                    let m = rec.outcome(t, k);
                    assert!(!(m.get(0) ^ m.get(1) ^ m.get(3)));
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn single_round_deletion_by_hand() {
        // C4, x = 1000, outcome 1100: for v = 1 the candidates {2,3}, {2,4},
        // {3,4} (1-indexed) have parities 0, 0, 1.
        let rec = OutcomeRecord::new(4, vec![BasisAssignment::new(bits("1000"))], vec![vec![bits("1100")]]).unwrap();
        let mut rng = stream(0, Purpose::Verify, &[]);
        let s = find_nbs(&rec, 2, &mut rng).unwrap();
        let got: Vec<Vec<u32>> = s.members(0).map(|m| m.to_vec()).collect();
        assert_eq!(got, vec![vec![1, 2], vec![1, 3]]);
        for v in 1..4 {
            assert_eq!(s.len(v), 3);
        }
    }

    #[test]
    fn zero_rounds_leave_everything() {
        let rec = OutcomeRecord::new(6, vec![], vec![vec![]]).unwrap();
        let s = find_nbs(&rec, 2, &mut stream(0, Purpose::Verify, &[])).unwrap();
        assert!((0..6).all(|v| s.len(v) == 10));
        assert!(!is_success(&s, &random_regular_seeded(6, 2, 0).unwrap()).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let rec = OutcomeRecord::new(4, vec![], vec![vec![]]).unwrap();
        assert!(find_nbs(&rec, 4, &mut stream(0, Purpose::Verify, &[])).is_err());
        assert!(OutcomeRecord::new(4, vec![BasisAssignment::new(bits("10"))], vec![vec![bits("10")]]).is_err());
        let s = CandidateSets::full(4, 2);
        assert!(is_success(&s, &Graph::complete(4).unwrap()).is_err());
    }

    #[test]
    fn success_criterion() {
        let g = Graph::cycle(4).unwrap();
        let mut s = CandidateSets::full(4, 2);
        assert!(!is_success(&s, &g).unwrap());
        for v in 0..4 {
            s.flat[v] = g.nbrs(v).to_vec();
            s.len[v] = 1;
        }
        assert!(is_success(&s, &g).unwrap());
        assert!(s.is_symmetric());
        s.len[2] = 0;
        s.flat[2].clear();
        assert!(!is_success(&s, &g).unwrap());
        assert!(true_neighbor_lost(&s, &g));
    }

    #[test]
    fn noiseless_learning_n12_d2() {
        let (n, d) = (12, 2);
        let m = bounds::m_noiseless(n, d, 0.1).unwrap() as usize;
        let w = default_weight(n, d);
        let trials = 400;
        let mut ok = 0;
        for trial in 0..trials {
            let g = random_regular_seeded(n, d, 1000 + trial).unwrap();
            let mut oracle = GraphStateOracle::new(&g, NoiseModel::noiseless());
            let mut rng = stream(5, Purpose::Learn, &[trial]);
            let s = learn_graph_state(&mut oracle, &cfg(n, d, m, 1, w), &mut rng).unwrap();
            assert!(!true_neighbor_lost(&s, &g));
            ok += is_success(&s, &g).unwrap() as usize;
        }
        assert!(ok as f64 / trials as f64 >= 0.9, "{ok}/{trials}");
    }

    #[test]
    fn learning_is_deterministic() {
        let g = random_regular_seeded(10, 3, 3).unwrap();
        let c = LearnConfig { noise: NoiseModel::new(0.1, NoiseMode::PauliInject).unwrap(), ..cfg(10, 3, 40, 4, 3) };
        let run = || {
            let mut oracle = GraphStateOracle::new(&g, c.noise);
            learn_graph_state(&mut oracle, &c, &mut stream(77, Purpose::Learn, &[0])).unwrap()
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn candidates_shrink_monotonically_and_keep_truth(seed in any::<u64>(), r in 1usize..4) {
            let g = random_regular_seeded(10, 3, seed).unwrap();
            let mut oracle = GraphStateOracle::new(&g, NoiseModel::noiseless());
            let mut rng = stream(seed, Purpose::Learn, &[]);
            let rec = meas_qbits(&mut oracle, &cfg(10, 3, 30, r, 3), &mut rng).unwrap();
            let mut s = CandidateSets::full(10, 3);
            for k in 0..rec.rounds() {
                let before = s.clone();
                s.eliminate_round(&rec, k, &mut rng, &mut |_| {});
                for v in 0..10 {
                    prop_assert!(s.members(v).all(|m| before.contains(v, m)));
                }
                prop_assert!(!true_neighbor_lost(&s, &g));
            }
        }
    }
}
