//! Closed-form sample-complexity quantities for learning d-regular graph
//! states, plus exact and asymptotic counts of labeled regular graphs.
//!
//! Logarithms are natural unless a function says otherwise. The converse
//! bound uses `log_4` and the binary entropy in bits.

use std::f64::consts::E;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::for_each_regular;

/// Largest `n` accepted by [`count_regular_exact`].
pub const MAX_EXACT_COUNT_N: usize = 10;

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn check_unit_open(name: &str, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::arg(format!("{name} = {eps} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_p(p: f64, allow_three_quarters: bool) -> Result<()> {
    let ok = if allow_three_quarters { (0.0..=0.75).contains(&p) } else { (0.0..0.75).contains(&p) };
    if !ok {
        let hi = if allow_three_quarters { "]" } else { ")" };
        return Err(Error::arg(format!("p = {p} must lie in [0, 3/4{hi}")));
    }
    Ok(())
}

fn check_regime(n: usize, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::arg(format!("bound requires d >= 2, got d = {d}")));
    }
    if n < 2 * d * d {
        return Err(Error::arg(format!("bound requires n >= 2d^2 = {}, got n = {n}", 2 * d * d)));
    }
    Ok(())
}

/// Probability that a fixed d-set avoids a uniformly random w-set `W`
/// while a uniformly random vertex lands in `W`:
/// `w · C(n−d, w) / (n · C(n, w))`.
pub fn p_samp(n: usize, d: usize, w: usize) -> Result<f64> {
    if d >= n {
        return Err(Error::arg(format!("d = {d} must be smaller than n = {n}")));
    }
    if w == 0 || w > n {
        return Err(Error::arg(format!("w = {w} must lie in 1..={n}")));
    }
    if w > n - d {
        return Ok(0.0);
    }
    let (n64, d64, w64) = (n as u64, d as u64, w as u64);
    if n < 64 {
        let num = binomial_exact(n64 - d64, w64).expect("fits below n = 64") as f64;
        let den = binomial_exact(n64, w64).expect("fits below n = 64") as f64;
        return Ok(w as f64 * num / (n as f64 * den));
    }
    Ok((w as f64).ln() + ln_binomial(n64 - d64, w64) - (n as f64).ln() - ln_binomial(n64, w64)).map(f64::exp)
}

/// Probability that one particular vertex `v` is X-measured while a fixed
/// d-set not containing `v` is entirely Z-measured. Conditioning on `v`
/// outside the d-set raises [`p_samp`] by the factor `n / (n − d)`.
pub fn p_test_fixed_pair(n: usize, d: usize, w: usize) -> Result<f64> {
    Ok(p_samp(n, d, w)? * n as f64 / (n - d) as f64)
}

/// `(1/(2ed), 1/(ed))`, valid for `d >= 2` and `n >= 2d²` at `w = ⌈(n−d)/d⌉`.
pub fn p_samp_bounds(n: usize, d: usize) -> Result<(f64, f64)> {
    check_regime(n, d)?;
    let ed = E * d as f64;
    Ok((1.0 / (2.0 * ed), 1.0 / ed))
}

fn m_formula(n: usize, d: usize, eps: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    4.0 * E * df * (nf / eps).ln() + 4.0 * E * df * df * (nf * E / df).ln()
}

/// Unrounded `4ed·ln(n/ε) + 4ed²·ln(ne/d)`.
pub fn m_noiseless_real(n: usize, d: usize, eps: f64) -> Result<f64> {
    check_unit_open("eps", eps)?;
    check_regime(n, d)?;
    Ok(m_formula(n, d, eps))
}

/// Number of basis draws that suffices for noiseless learning with failure
/// probability at most `eps` (with one copy per draw).
pub fn m_noiseless(n: usize, d: usize, eps: f64) -> Result<u64> {
    Ok(m_noiseless_real(n, d, eps)?.ceil() as u64)
}

/// Basis draws for the noisy setting, `⌈4ed·ln(n/(2ε)) + 4ed²·ln(ne/d)⌉`
/// (the noiseless expression evaluated at `2ε`).
pub fn m_noisy(n: usize, d: usize, eps: f64) -> Result<u64> {
    check_unit_open("eps", eps)?;
    check_regime(n, d)?;
    Ok(m_formula(n, d, 2.0 * eps).ceil() as u64)
}

/// Bias of the true-neighbor parity bit: `(1 − 4p/3)^{d+1} / 2`.
pub fn gamma(p: f64, d: usize) -> Result<f64> {
    check_p(p, true)?;
    Ok((1.0 - 4.0 * p / 3.0).powi(d as i32 + 1) / 2.0)
}

fn check_eta_args(r: usize, g: f64) -> Result<()> {
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    if !(0.0..=0.5).contains(&g) {
        return Err(Error::arg(format!("gamma = {g} must lie in [0, 1/2]")));
    }
    Ok(())
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn binomial_pmf(r: usize, t: usize, a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return if t == 0 { b.powi(r as i32) } else { 0.0 };
    }
    let ln = ln_binomial(r as u64, t as u64) + t as f64 * a.ln() + (r - t) as f64 * b.ln();
    ln.exp()
}

/// `η = Σ_{t > r/2} C(r,t) (1/2 − γ)^t (1/2 + γ)^{r−t}`: probability that
/// a strict majority of `r` parities of the true neighbor set is odd.
pub fn eta_exact(r: usize, g: f64) -> Result<f64> {
    check_eta_args(r, g)?;
    let (a, b) = (0.5 - g, 0.5 + g);
    Ok(compensated_sum((r / 2 + 1..=r).map(|t| binomial_pmf(r, t, a, b))))
}

/// [`eta_exact`] plus half the tie mass at `t = r/2` for even `r`, which is
/// the true elimination probability under a fair-coin tie break.
pub fn eta_exact_tie_aware(r: usize, g: f64) -> Result<f64> {
    let strict = eta_exact(r, g)?;
    if r % 2 == 1 {
        return Ok(strict);
    }
    Ok(strict + 0.5 * binomial_pmf(r, r / 2, 0.5 - g, 0.5 + g))
}

/// Chernoff bound `exp(−γ² r / (1 − 4γ²))`; returns 0 at `γ = 1/2`.
pub fn eta_chernoff(r: usize, g: f64) -> Result<f64> {
    check_eta_args(r, g)?;
    if g == 0.5 {
        return Ok(0.0);
    }
    Ok((-g * g * r as f64 / (1.0 - 4.0 * g * g)).exp())
}

/// Upper limit on `m` for which false rejection of the true neighbor set
/// stays below `eps/2`: `(ε/2)(ed − 1) exp(γ² r / (1 − 4γ²))`.
pub fn m_upper_noisy(d: usize, eps: f64, g: f64, r: usize) -> f64 {
    if g >= 0.5 {
        return f64::INFINITY;
    }
    eps / 2.0 * (E * d as f64 - 1.0) * (g * g * r as f64 / (1.0 - 4.0 * g * g)).exp()
}

/// Repetitions per basis draw in the noisy setting:
/// `⌈(1−4γ²)/γ² · ln((8ed ln(n/(2ε)) + 8ed² ln(ne/d)) / (ε(ed−1)))⌉`,
/// at least 1, then increased until [`m_upper_noisy`] reaches [`m_noisy`].
pub fn r_noisy(n: usize, d: usize, eps: f64, p: f64) -> Result<u64> {
    check_unit_open("eps", eps)?;
    check_p(p, false)?;
    check_regime(n, d)?;
    let g = gamma(p, d)?;
    if g >= 0.5 {
        return Ok(1);
    }
    let ed = E * d as f64;
    let arg = 2.0 * m_formula(n, d, 2.0 * eps) / (eps * (ed - 1.0));
    let coef = (1.0 - 4.0 * g * g) / (g * g);
    let mut r = ((coef * arg.ln()).ceil() as u64).max(1);
    let m = m_noisy(n, d, eps)? as f64;
    while m_upper_noisy(d, eps, g, r as usize) < m {
        r += 1;
    }
    Ok(r)
}

/// Total copies `N = r·m` for the noisy setting.
pub fn n_noisy(n: usize, d: usize, eps: f64, p: f64) -> Result<u64> {
    Ok(r_noisy(n, d, eps, p)? * m_noisy(n, d, eps)?)
}

/// Binary entropy in bits, `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Information-theoretic lower bound on copies for any measurement:
/// `d·log_4(nd) / ((1 − H(2p/3))/(1 − ε) + 1/n)`.
pub fn converse_n(n: usize, d: usize, p: f64, eps: f64) -> Result<f64> {
    check_p(p, false)?;
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::arg(format!("eps = {eps} must lie in [0, 1)")));
    }
    if n == 0 || d == 0 {
        return Err(Error::arg("converse bound needs n >= 1 and d >= 1"));
    }
    if n < 2 * d * d {
        log::warn!("converse bound is asymptotic in d = o(sqrt n); n = {n} < 2d^2");
    }
    let capacity = 1.0 - binary_entropy(2.0 * p / 3.0);
    let (nf, df) = (n as f64, d as f64);
    Ok(df * (nf * df).log(4.0) / (capacity / (1.0 - eps) + 1.0 / nf))
}

/// Exact number of labeled simple d-regular graphs on `n` vertices.
pub fn count_regular_exact(n: usize, d: usize) -> Result<u64> {
    if n > MAX_EXACT_COUNT_N {
        return Err(Error::Resource(format!("exact enumeration is limited to n <= {MAX_EXACT_COUNT_N}, got {n}")));
    }
    if n == 0 || d >= n || (n * d) % 2 == 1 {
        return Ok(0);
    }
    let mut count = 0u64;
    for_each_regular(n, d, |_| count += 1);
    Ok(count)
}

/// Natural log of the McKay estimate
/// `(nd)! / ((nd/2)! 2^{nd/2} (d!)^n) · exp(−(d²−1)/4 − d³/(12n))`.
pub fn ln_count_regular_asymptotic(n: usize, d: usize) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(Error::arg("asymptotic count needs n >= 1 and d >= 1"));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::Infeasible { n, d });
    }
    let (nf, df) = (n as f64, d as f64);
    let nd = nf * df;
    Ok(ln_gamma(nd + 1.0)
        - ln_gamma(nd / 2.0 + 1.0)
        - nd / 2.0 * std::f64::consts::LN_2
        - nf * ln_gamma(df + 1.0)
        - (df * df - 1.0) / 4.0
        - df.powi(3) / (12.0 * nf))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BoundValue {
    Real(f64),
    Integer(u64),
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundValue::Real(x) => write!(f, "{x}"),
            BoundValue::Integer(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: Option<BoundValue>,
    /// Why the value is missing, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub inputs: Vec<(&'static str, f64)>,
    pub formula: &'static str,
}

fn entry(
    name: &'static str,
    formula: &'static str,
    inputs: Vec<(&'static str, f64)>,
    value: Result<BoundValue>,
) -> BoundReport {
    match value {
        Ok(v) => BoundReport { name, value: Some(v), error: None, inputs, formula },
        Err(e) => BoundReport { name, value: None, error: Some(e.to_string()), inputs, formula },
    }
}

/// Every quantity the bounds module can evaluate at `(n, d, eps, p, w)`.
/// `w` defaults to `⌈(n−d)/d⌉`.
pub fn report(n: usize, d: usize, eps: f64, p: f64, w: Option<usize>) -> Vec<BoundReport> {
    use BoundValue::{Integer, Real};
    let w = w.unwrap_or_else(|| crate::learner::default_weight(n, d));
    let (nf, df, wf) = (n as f64, d as f64, w as f64);
    let g = gamma(p, d);
    let r = r_noisy(n, d, eps, p);
    let mut out = vec![
        entry("p_samp", "w*C(n-d,w)/(n*C(n,w))", vec![("n", nf), ("d", df), ("w", wf)], p_samp(n, d, w).map(Real)),
        entry("p_samp_lower", "1/(2*e*d)", vec![("n", nf), ("d", df)], p_samp_bounds(n, d).map(|b| Real(b.0))),
        entry("p_samp_upper", "1/(e*d)", vec![("n", nf), ("d", df)], p_samp_bounds(n, d).map(|b| Real(b.1))),
        entry(
            "theory_m",
            "ceil(4*e*d*ln(n/eps) + 4*e*d^2*ln(n*e/d))",
            vec![("n", nf), ("d", df), ("eps", eps)],
            m_noiseless(n, d, eps).map(Integer),
        ),
        entry("gamma", "(1-4p/3)^(d+1)/2", vec![("p", p), ("d", df)], g.as_ref().map(|&g| Real(g)).map_err(clone_err)),
        entry("flip_probability", "2p/3", vec![("p", p)], check_p(p, true).map(|_| Real(2.0 * p / 3.0))),
        entry(
            "m_noisy",
            "ceil(4*e*d*ln(n/(2*eps)) + 4*e*d^2*ln(n*e/d))",
            vec![("n", nf), ("d", df), ("eps", eps)],
            m_noisy(n, d, eps).map(Integer),
        ),
        entry(
            "theory_r",
            "ceil((1-4g^2)/g^2 * ln((8ed ln(n/(2eps)) + 8ed^2 ln(ne/d))/(eps(ed-1))))",
            vec![("n", nf), ("d", df), ("eps", eps), ("p", p)],
            r.as_ref().map(|&r| Integer(r)).map_err(clone_err),
        ),
        entry(
            "n_noisy",
            "theory_r * m_noisy",
            vec![("n", nf), ("d", df), ("eps", eps), ("p", p)],
            n_noisy(n, d, eps, p).map(Integer),
        ),
    ];
    if let (Ok(g), Ok(r)) = (&g, &r) {
        let r = *r as usize;
        let inputs = vec![("r", r as f64), ("gamma", *g)];
        out.push(entry(
            "eta_exact",
            "sum_{t>r/2} C(r,t)(1/2-g)^t(1/2+g)^(r-t)",
            inputs.clone(),
            eta_exact(r, *g).map(Real),
        ));
        out.push(entry("eta_chernoff", "exp(-g^2 r/(1-4g^2))", inputs, eta_chernoff(r, *g).map(Real)));
    }
    out.push(entry(
        "converse_N",
        "d*log4(n*d)/((1-H(2p/3))/(1-eps) + 1/n)",
        vec![("n", nf), ("d", df), ("p", p), ("eps", eps)],
        converse_n(n, d, p, eps).map(Real),
    ));
    out.push(entry(
        "ln_count_regular_asymptotic",
        "ln((nd)!/((nd/2)! 2^(nd/2) (d!)^n)) - (d^2-1)/4 - d^3/(12n)",
        vec![("n", nf), ("d", df)],
        ln_count_regular_asymptotic(n, d).map(Real),
    ));
    if n <= MAX_EXACT_COUNT_N {
        out.push(entry(
            "count_regular_exact",
            "exhaustive enumeration",
            vec![("n", nf), ("d", df)],
            count_regular_exact(n, d).map(Integer),
        ));
    }
    out
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidArgument(e.to_string())
}
