//! Stabilizer-tableau sampling of product Pauli measurements on graph
//! states, with single-qubit depolarizing noise.
//!
//! The tableau keeps `2n` Pauli rows: rows `0..n` are destabilizers and rows
//! `n..2n` stabilizers. Each row is stored as bit-packed X and Z parts plus a
//! sign bit. Measurement follows the destabilizer algorithm of Aaronson and
//! Gottesman, so every single-qubit measurement costs `O(n^2 / 64)` word ops.
//!
//! Outcome conventions: measuring Z gives 0 for `|0>` and 1 for `|1>`;
//! measuring X gives 0 for `|+>` and 1 for `|->`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::{words_for, BitRow};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Which basis each qubit is measured in: bit 1 selects X (Hadamard basis),
/// bit 0 selects Z (computational basis).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisAssignment {
    bits: BitRow,
    weight: usize,
}

impl BasisAssignment {
    pub fn new(bits: BitRow) -> Self {
        let weight = bits.count_ones();
        BasisAssignment { bits, weight }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::new(BitRow::from_bools(bits))
    }

    pub fn all_z(n: usize) -> Self {
        Self::new(BitRow::zeros(n))
    }

    /// A uniformly random length-`n` string of Hamming weight `w`: the first
    /// `w` positions of a Fisher-Yates shuffle of `0..n` get a 1.
    pub fn random_weight<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<Self> {
        use rand::seq::SliceRandom;
        if w > n {
            return Err(Error::arg(format!("weight {w} exceeds length {n}")));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let mut bits = BitRow::zeros(n);
        for &j in &idx[..w] {
            bits.set(j, true);
        }
        Ok(BasisAssignment { bits, weight: w })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.weight
    }

    #[inline]
    pub fn is_x(&self, q: usize) -> bool {
        self.bits.get(q)
    }

    pub fn bits(&self) -> &BitRow {
        &self.bits
    }
}

impl fmt::Display for BasisAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NoiseMode {
    /// Draw a Pauli error per qubit and track it in the tableau signs.
    #[default]
    PauliInject,
    /// Sample noiselessly, then flip each outcome bit with probability 2p/3.
    BitFlip,
}

impl NoiseMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseMode::PauliInject => "pauli-inject",
            NoiseMode::BitFlip => "bitflip",
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli-inject" | "pauli" => Ok(NoiseMode::PauliInject),
            "bitflip" | "bit-flip" => Ok(NoiseMode::BitFlip),
            other => Err(Error::arg(format!("unknown noise mode `{other}`"))),
        }
    }
}

/// Independent depolarizing channel on every qubit: identity with
/// probability `1 - p`, each of X, Y, Z with probability `p / 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    p: f64,
    mode: NoiseMode,
}

impl NoiseModel {
    pub fn new(p: f64, mode: NoiseMode) -> Result<Self> {
        if !(0.0..=0.75).contains(&p) {
            return Err(Error::arg(format!("depolarizing probability {p} outside [0, 3/4]")));
        }
        Ok(NoiseModel { p, mode })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p: 0.0, mode: NoiseMode::PauliInject }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    /// Probability that a single X- or Z-basis outcome is flipped.
    pub fn flip_probability(&self) -> f64 {
        2.0 * self.p / 3.0
    }

    pub fn is_noiseless(&self) -> bool {
        self.p == 0.0
    }
}

/// Result of one single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: bool,
    /// True when the outcome was a fair coin rather than determined by the state.
    pub random: bool,
}

/// Stabilizer tableau with destabilizers.
#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// The all-zero state: destabilizers `X_q`, stabilizers `+Z_q`.
    pub fn zero_state(n: usize) -> Self {
        let words = words_for(n);
        let mut t =
            Tableau { n, words, x: vec![0; 2 * n * words], z: vec![0; 2 * n * words], signs: vec![false; 2 * n] };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    /// Graph state of `g`: stabilizer `n + v` is `+X_v prod_{j in N(v)} Z_j`,
    /// destabilizer `v` is `Z_v`.
    pub fn graph_state(g: &Graph) -> Self {
        let n = g.n();
        let words = words_for(n);
        let mut t =
            Tableau { n, words, x: vec![0; 2 * n * words], z: vec![0; 2 * n * words], signs: vec![false; 2 * n] };
        for v in 0..n {
            t.set_z(v, v, true);
            t.set_x(n + v, v, true);
            for &j in g.nbrs(v) {
                t.set_z(n + v, j as usize, true);
            }
        }
        t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, row: usize, q: usize) -> (usize, u64) {
        (row * self.words + q / 64, 1u64 << (q % 64))
    }

    #[inline]
    fn x_bit(&self, row: usize, q: usize) -> bool {
        let (i, m) = self.idx(row, q);
        self.x[i] & m != 0
    }

    #[inline]
    fn z_bit(&self, row: usize, q: usize) -> bool {
        let (i, m) = self.idx(row, q);
        self.z[i] & m != 0
    }

    #[inline]
    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let (i, m) = self.idx(row, q);
        if v {
            self.x[i] |= m
        } else {
            self.x[i] &= !m
        }
    }

    #[inline]
    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let (i, m) = self.idx(row, q);
        if v {
            self.z[i] |= m
        } else {
            self.z[i] &= !m
        }
    }

    /// Row `row` as `(x bits, z bits, negative sign)`.
    pub fn row(&self, row: usize) -> (BitRow, BitRow, bool) {
        let mut xs = BitRow::zeros(self.n);
        let mut zs = BitRow::zeros(self.n);
        for q in 0..self.n {
            xs.set(q, self.x_bit(row, q));
            zs.set(q, self.z_bit(row, q));
        }
        (xs, zs, self.signs[row])
    }

    /// Stabilizer generator `v` (0-indexed) as a signed Pauli string.
    pub fn stabilizer(&self, v: usize) -> String {
        self.pauli_string(self.n + v)
    }

    pub fn destabilizer(&self, v: usize) -> String {
        self.pauli_string(v)
    }

    fn pauli_string(&self, row: usize) -> String {
        let mut s = String::with_capacity(self.n + 1);
        s.push(if self.signs[row] { '-' } else { '+' });
        for q in 0..self.n {
            s.push(match (self.x_bit(row, q), self.z_bit(row, q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            });
        }
        s
    }

    /// Conjugates the state by a Hadamard on qubit `q`.
    pub fn hadamard(&mut self, q: usize) {
        let (off, m) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + off;
            let (xb, zb) = (self.x[i] & m, self.z[i] & m);
            if xb != 0 && zb != 0 {
                self.signs[row] ^= true;
            }
            self.x[i] = (self.x[i] & !m) | zb;
            self.z[i] = (self.z[i] & !m) | xb;
        }
    }

    /// Applies a Pauli to qubit `q`. Only signs change: every row that
    /// anticommutes with the Pauli picks up a factor -1.
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let (off, m) = (q / 64, 1u64 << (q % 64));
        for row in 0..2 * self.n {
            let i = row * self.words + off;
            let (xb, zb) = (self.x[i] & m != 0, self.z[i] & m != 0);
            let anti = match p {
                Pauli::X => zb,
                Pauli::Z => xb,
                Pauli::Y => xb ^ zb,
            };
            self.signs[row] ^= anti;
        }
    }

    /// Exponent `k` (mod 4) of the phase `i^k` in `P1 * P2`, summed over the
    /// word slices of two Pauli rows.
    #[inline]
    fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
        let mut plus = 0u32;
        let mut minus = 0u32;
        for w in 0..x1.len() {
            let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
            let y1 = a & b;
            let xo1 = a & !b;
            let zo1 = b & !a;
            let y2 = c & d;
            let xo2 = c & !d;
            let zo2 = d & !c;
            plus += ((y1 & zo2) | (xo1 & y2) | (zo1 & xo2)).count_ones();
            minus += ((y1 & xo2) | (xo1 & zo2) | (zo1 & y2)).count_ones();
        }
        (plus + 4 * x1.len() as u32 * 64 - minus) % 4
    }

    /// Row `h` becomes `row i * row h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let (hs, is) = (h * w, i * w);
        let phase =
            Self::product_phase(&self.x[is..is + w], &self.z[is..is + w], &self.x[hs..hs + w], &self.z[hs..hs + w]);
        let total = 2 * self.signs[h] as u32 + 2 * self.signs[i] as u32 + phase;
        self.signs[h] = (total % 4) >> 1 == 1;
        for k in 0..w {
            self.x[hs + k] ^= self.x[is + k];
            self.z[hs + k] ^= self.z[is + k];
        }
    }

    /// Measures `Z_q`. When the outcome is random, `choose` supplies it.
    pub fn measure_z_with(&mut self, q: usize, choose: impl FnOnce() -> bool) -> Measurement {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&row| self.x_bit(row, q)) {
            for row in 0..2 * n {
                if row != p && self.x_bit(row, q) {
                    self.rowsum(row, p);
                }
            }
            // Destabilizer p-n takes the old stabilizer; stabilizer p becomes ±Z_q.
            let w = self.words;
            let (ds, ps) = ((p - n) * w, p * w);
            self.x.copy_within(ps..ps + w, ds);
            self.z.copy_within(ps..ps + w, ds);
            self.signs[p - n] = self.signs[p];
            self.x[ps..ps + w].fill(0);
            self.z[ps..ps + w].fill(0);
            self.set_z(p, q, true);
            let outcome = choose();
            self.signs[p] = outcome;
            Measurement { outcome, random: true }
        } else {
            let w = self.words;
            let mut sx = vec![0u64; w];
            let mut sz = vec![0u64; w];
            let mut sign = false;
            for i in 0..n {
                if self.x_bit(i, q) {
                    let rs = (n + i) * w;
                    let phase = Self::product_phase(&self.x[rs..rs + w], &self.z[rs..rs + w], &sx, &sz);
                    let total = 2 * sign as u32 + 2 * self.signs[n + i] as u32 + phase;
                    sign = (total % 4) >> 1 == 1;
                    for k in 0..w {
                        sx[k] ^= self.x[rs + k];
                        sz[k] ^= self.z[rs + k];
                    }
                }
            }
            Measurement { outcome: sign, random: false }
        }
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Measurement {
        self.measure_z_with(q, || rng.random::<bool>())
    }

    /// Measures qubit `q` in X (`x_basis`) or Z.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, q: usize, x_basis: bool, rng: &mut R) -> Measurement {
        if x_basis {
            self.hadamard(q);
        }
        self.measure_z(q, rng)
    }

    /// Whether two rows commute as Pauli operators.
    pub fn rows_commute(&self, a: usize, b: usize) -> bool {
        let w = self.words;
        let mut parity = 0u32;
        for k in 0..w {
            parity ^=
                ((self.x[a * w + k] & self.z[b * w + k]) ^ (self.z[a * w + k] & self.x[b * w + k])).count_ones() & 1;
        }
        parity == 0
    }

    /// GF(2) rank of the `2n x 2n` matrix of rows `[x | z]`.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut rows: Vec<BitRow> = (0..2 * n)
            .map(|r| {
                let mut b = BitRow::zeros(2 * n);
                for q in 0..n {
                    b.set(q, self.x_bit(r, q));
                    b.set(n + q, self.z_bit(r, q));
                }
                b
            })
            .collect();
        let mut rank = 0;
        for col in 0..2 * n {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r].get(col)) else { continue };
            rows.swap(rank, piv);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Checks the symplectic structure: stabilizers commute pairwise,
    /// destabilizer `i` anticommutes exactly with stabilizer `i`, and the
    /// `2n` rows are independent.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        for a in n..2 * n {
            for b in a + 1..2 * n {
                if !self.rows_commute(a, b) {
                    return Err(format!("stabilizers {} and {} anticommute", a - n, b - n));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.rows_commute(i, n + j) != (i != j) {
                    return Err(format!("destabilizer {i} vs stabilizer {j} has wrong commutation"));
                }
            }
        }
        if self.rank() != 2 * n {
            return Err("rows are linearly dependent".into());
        }
        Ok(())
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tableau(n={})", self.n)?;
        for r in 0..2 * self.n {
            writeln!(f, "  {} {}", if r < self.n { "D" } else { "S" }, self.pauli_string(r))?;
        }
        Ok(())
    }
}

fn check_len(t: &Tableau, basis: &BasisAssignment) -> Result<()> {
    if t.n() != basis.len() {
        return Err(Error::arg(format!("basis has {} entries but the state has {} qubits", basis.len(), t.n())));
    }
    Ok(())
}

/// Measures every qubit in ascending order and returns the outcome bits.
pub fn measure_product<R: Rng + ?Sized>(mut t: Tableau, basis: &BasisAssignment, rng: &mut R) -> Result<BitRow> {
    check_len(&t, basis)?;
    let mut out = BitRow::zeros(t.n());
    for q in 0..t.n() {
        if t.measure_qubit(q, basis.is_x(q), rng).outcome {
            out.set(q, true);
        }
    }
    Ok(out)
}

/// Probability that [`measure_product`] on `t` returns `m`, computed by
/// replaying the measurements with forced outcomes in the given qubit order.
pub fn exact_prob_in_order(t: &Tableau, basis: &BasisAssignment, m: &BitRow, order: &[usize]) -> Result<f64> {
    check_len(t, basis)?;
    if m.len() != t.n() {
        return Err(Error::arg("outcome length does not match qubit count"));
    }
    let mut seen = vec![false; t.n()];
    for &q in order {
        if q >= t.n() || std::mem::replace(&mut seen[q], true) {
            return Err(Error::arg("order must be a permutation of the qubits"));
        }
    }
    if order.len() != t.n() {
        return Err(Error::arg("order must be a permutation of the qubits"));
    }
    let mut t = t.clone();
    let mut random_steps = 0i32;
    for &q in order {
        if basis.is_x(q) {
            t.hadamard(q);
        }
        let want = m.get(q);
        let meas = t.measure_z_with(q, || want);
        if meas.random {
            random_steps += 1;
        } else if meas.outcome != want {
            return Ok(0.0);
        }
    }
    Ok(2f64.powi(-random_steps))
}

pub fn exact_prob_via_tableau(g: &Graph, basis: &BasisAssignment, m: &BitRow) -> Result<f64> {
    let order: Vec<usize> = (0..g.n()).collect();
    exact_prob_in_order(&Tableau::graph_state(g), basis, m, &order)
}

/// Full outcome distribution, indexed by outcome with bit `j` = qubit `j`.
pub fn exact_distribution_via_tableau(g: &Graph, basis: &BasisAssignment) -> Result<Vec<f64>> {
    let n = g.n();
    if n > 20 {
        return Err(Error::Resource(format!("2^{n} outcomes is too many to enumerate")));
    }
    let t = Tableau::graph_state(g);
    let order: Vec<usize> = (0..n).collect();
    (0..1u64 << n).map(|idx| exact_prob_in_order(&t, basis, &BitRow::from_index(n, idx), &order)).collect()
}

/// Draws one outcome from a (possibly noisy) copy of the state `t`.
pub fn sample_noisy_from<R: Rng + ?Sized>(
    t: &Tableau,
    basis: &BasisAssignment,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<BitRow> {
    check_len(t, basis)?;
    if noise.is_noiseless() {
        return measure_product(t.clone(), basis, rng);
    }
    match noise.mode() {
        NoiseMode::BitFlip => {
            let mut out = measure_product(t.clone(), basis, rng)?;
            let q = noise.flip_probability();
            for j in 0..out.len() {
                if rng.random::<f64>() < q {
                    out.flip(j);
                }
            }
            Ok(out)
        }
        NoiseMode::PauliInject => {
            let mut noisy = t.clone();
            for j in 0..noisy.n() {
                if rng.random::<f64>() < noise.p() {
                    let pauli = match rng.random_range(0..3u8) {
                        0 => Pauli::X,
                        1 => Pauli::Y,
                        _ => Pauli::Z,
                    };
                    noisy.apply_pauli(j, pauli);
                }
            }
            measure_product(noisy, basis, rng)
        }
    }
}

pub fn sample_noisy_outcome<R: Rng + ?Sized>(
    g: &Graph,
    basis: &BasisAssignment,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<BitRow> {
    sample_noisy_from(&Tableau::graph_state(g), basis, noise, rng)
}
