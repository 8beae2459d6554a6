//! Brute-force statevector oracle for small graph states.
//!
//! Basis index `b` has bit `j` equal to the value of qubit `j`, matching
//! [`BitRow::from_index`](crate::bits::BitRow::from_index).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::stabsim::BasisAssignment;

pub const MAX_QUBITS: usize = 14;
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// In-place Hadamard on qubit `q`.
    pub fn hadamard(&mut self, q: usize) {
        let stride = 1usize << q;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let (a, b) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = (a + b) * s;
                self.amps[i + stride] = (a - b) * s;
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Resource(format!("dense simulation is capped at {MAX_QUBITS} qubits, got {n}")));
    }
    Ok(())
}

/// `|g> = prod_{uv in E} CZ_uv |+>^n`, so the amplitude of `b` is
/// `2^{-n/2} (-1)^{sum_{uv in E} b_u b_v}`.
pub fn graph_statevector(g: &Graph) -> Result<StateVector> {
    let n = g.n();
    check_size(n)?;
    let dim = 1usize << n;
    let scale = (dim as f64).sqrt().recip();
    let mut amps = vec![Complex64::new(scale, 0.0); dim];
    for (u, v) in g.edges() {
        let mask = (1usize << u) | (1usize << v);
        for (b, amp) in amps.iter_mut().enumerate() {
            if b & mask == mask {
                *amp = -*amp;
            }
        }
    }
    Ok(StateVector { n, amps })
}

fn check_basis(g: &Graph, basis: &BasisAssignment) -> Result<()> {
    if basis.len() != g.n() {
        return Err(Error::arg(format!("basis has {} entries but the graph has {} vertices", basis.len(), g.n())));
    }
    Ok(())
}

/// Born-rule distribution after rotating every X-basis qubit by a Hadamard.
pub fn exact_outcome_distribution(g: &Graph, basis: &BasisAssignment) -> Result<Vec<f64>> {
    check_basis(g, basis)?;
    let mut psi = graph_statevector(g)?;
    for q in 0..g.n() {
        if basis.is_x(q) {
            psi.hadamard(q);
        }
    }
    Ok(psi.probabilities())
}

/// Depolarizing noise flips each measured bit independently with
/// probability `2p/3`; this convolves the exact distribution with that
/// per-bit flip.
pub fn noisy_outcome_distribution(g: &Graph, basis: &BasisAssignment, p: f64) -> Result<Vec<f64>> {
    if !(0.0..=0.75).contains(&p) {
        return Err(Error::arg(format!("depolarizing probability {p} outside [0, 3/4]")));
    }
    let mut dist = exact_outcome_distribution(g, basis)?;
    let q = 2.0 * p / 3.0;
    for j in 0..g.n() {
        let bit = 1usize << j;
        for b in 0..dist.len() {
            if b & bit == 0 {
                let (a, c) = (dist[b], dist[b | bit]);
                dist[b] = (1.0 - q) * a + q * c;
                dist[b | bit] = q * a + (1.0 - q) * c;
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitRow;
    use crate::graph::random_regular_seeded;

    fn basis(s: &str) -> BasisAssignment {
        BasisAssignment::new(BitRow::from_bitstring(s).unwrap())
    }

    #[test]
    fn k2_amplitudes() {
        let psi = graph_statevector(&Graph::complete(2).unwrap()).unwrap();
        let re: Vec<f64> = psi.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![0.5, 0.5, 0.5, -0.5]);
        assert!(psi.amplitudes().iter().all(|a| a.im == 0.0));
    }

    #[test]
    fn empty_graph_is_plus_state() {
        let psi = graph_statevector(&Graph::empty(2).unwrap()).unwrap();
        assert!(psi.amplitudes().iter().all(|a| a.re == 0.5));
    }

    #[test]
    fn amplitudes_have_equal_modulus() {
        let g = random_regular_seeded(10, 3, 11).unwrap();
        let psi = graph_statevector(&g).unwrap();
        let target = 2f64.powi(-5);
        assert!(psi.amplitudes().iter().all(|a| (a.norm() - target).abs() < 1e-15));
        assert!((psi.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn c4_alternating_basis() {
        let dist = exact_outcome_distribution(&Graph::cycle(4).unwrap(), &basis("1010")).unwrap();
        for (idx, &p) in dist.iter().enumerate() {
            let m = BitRow::from_index(4, idx as u64);
            let ok = !(m.get(0) ^ m.get(1) ^ m.get(3)) && !(m.get(2) ^ m.get(1) ^ m.get(3));
            let want = if ok { 0.25 } else { 0.0 };
            assert!((p - want).abs() < NORM_TOLERANCE, "{m}: {p}");
        }
    }

    #[test]
    fn all_z_is_uniform() {
        let g = random_regular_seeded(8, 3, 2).unwrap();
        let dist = exact_outcome_distribution(&g, &BasisAssignment::all_z(8)).unwrap();
        assert!(dist.iter().all(|&p| (p - 1.0 / 256.0).abs() < 1e-15));
    }

    #[test]
    fn k2_both_x_is_uniform() {
        // H⊗H · ½(1, 1, 1, -1) = ½(1, 1, 1, -1): X1X2 is not in the
        // stabilizer group {II, XZ, ZX, YY}, so the outcome is uniform.
        let dist = exact_outcome_distribution(&Graph::complete(2).unwrap(), &basis("11")).unwrap();
        for p in dist {
            assert!((p - 0.25).abs() < NORM_TOLERANCE);
        }
    }

    #[test]
    fn noisy_convolution() {
        let k2 = Graph::complete(2).unwrap();
        let b = basis("10");
        assert_eq!(noisy_outcome_distribution(&k2, &b, 0.0).unwrap(), exact_outcome_distribution(&k2, &b).unwrap());
        let dist = noisy_outcome_distribution(&k2, &b, 0.3).unwrap();
        assert!((dist[0] - 0.34).abs() < 1e-12);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < NORM_TOLERANCE);
        let uniform = noisy_outcome_distribution(&Graph::cycle(5).unwrap(), &basis("10100"), 0.75).unwrap();
        assert!(uniform.iter().all(|&p| (p - 1.0 / 32.0).abs() < 1e-12));
        assert!(noisy_outcome_distribution(&k2, &b, 0.8).is_err());
    }

    #[test]
    fn size_cap() {
        let g = Graph::empty(15).unwrap();
        assert!(matches!(graph_statevector(&g), Err(Error::Resource(_))));
    }
}
