//! C ABI over `gslearn`.
//!
//! Every function returns a [`GslStatus`]; outputs go through pointer
//! arguments. On failure, [`gsl_last_error`] returns a message for the
//! calling thread. Handles are opaque and must be released with the
//! matching `_free` function. Basis and outcome strings are arrays of
//! `n` bytes holding 0 or 1 (1 = X basis / outcome 1).

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;

use gslearn::bits::BitRow;
use gslearn::bounds;
use gslearn::graph::{parse_edge_list, random_regular, serialize_edge_list, Graph};
use gslearn::learner::{learn_graph_state, CandidateSets, GraphStateOracle, LearnConfig};
use gslearn::rng::{stream, Purpose, StreamRng};
use gslearn::stabsim::{exact_prob_via_tableau, sample_noisy_outcome, BasisAssignment, NoiseMode, NoiseModel};
use gslearn::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GslStatus {
    Ok = 0,
    InvalidArgument = 1,
    Infeasible = 2,
    Generation = 3,
    Parse = 4,
    Resource = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GslNoiseMode {
    PauliInject = 0,
    Bitflip = 1,
}

impl From<GslNoiseMode> for NoiseMode {
    fn from(m: GslNoiseMode) -> Self {
        match m {
            GslNoiseMode::PauliInject => NoiseMode::PauliInject,
            GslNoiseMode::Bitflip => NoiseMode::BitFlip,
        }
    }
}

pub struct GslGraph(Graph);
pub struct GslRng(StreamRng);
pub struct GslCandidates(CandidateSets);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GslStatus {
    match e {
        Error::InvalidArgument(_) => GslStatus::InvalidArgument,
        Error::Infeasible { .. } => GslStatus::Infeasible,
        Error::Generation { .. } => GslStatus::Generation,
        Error::Parse { .. } => GslStatus::Parse,
        Error::Resource(_) => GslStatus::Resource,
        Error::Io(_) => GslStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> GslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GslStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("`{name}` is null"));
            GslStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GslStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn as_mut<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(name))
}

unsafe fn bit_slice<'a>(p: *const u8, n: usize, name: &'static str) -> Result<&'a [u8], Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    let s = std::slice::from_raw_parts(p, n);
    if s.iter().any(|&b| b > 1) {
        return Err(Error::InvalidArgument(format!("`{name}` entries must be 0 or 1")).into());
    }
    Ok(s)
}

fn bits_from(s: &[u8]) -> BitRow {
    BitRow::from_bools(&s.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

unsafe fn put<T>(out: *mut T, value: T, name: &'static str) -> FfiResult {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    out.write(value);
    Ok(())
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gsl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a random stream keyed by `(master_seed, purpose, index)`;
/// `purpose` is 0 graph, 1 learn, 2 sample, 3 verify.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn gsl_rng_new(master_seed: u64, purpose: u32, index: u64, out: *mut *mut GslRng) -> GslStatus {
    guard(|| {
        let purpose = match purpose {
            0 => Purpose::Graph,
            1 => Purpose::Learn,
            2 => Purpose::Sample,
            3 => Purpose::Verify,
            other => return Err(Error::InvalidArgument(format!("unknown purpose tag {other}")).into()),
        };
        let rng = Box::new(GslRng(stream(master_seed, purpose, &[index])));
        put(out, Box::into_raw(rng), "out")
    })
}

/// # Safety
/// `rng` must be NULL or a handle from [`gsl_rng_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsl_rng_free(rng: *mut GslRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Draws a random d-regular graph on n vertices.
///
/// # Safety
/// `rng` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_random_regular(
    n: usize,
    d: usize,
    rng: *mut GslRng,
    out: *mut *mut GslGraph,
) -> GslStatus {
    guard(|| {
        let rng = as_mut(rng, "rng")?;
        let g = random_regular(n, d, &mut rng.0)?;
        put(out, Box::into_raw(Box::new(GslGraph(g))), "out")
    })
}

/// Builds a graph from `edge_count` pairs stored flat in `edges`
/// (`u0, v0, u1, v1, ...`, 0-indexed).
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_from_edges(
    n: usize,
    d: usize,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut GslGraph,
) -> GslStatus {
    guard(|| {
        let flat = if edge_count == 0 {
            &[][..]
        } else if edges.is_null() {
            return Err(Fail::Null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)).collect();
        let g = Graph::from_edges(n, d, &pairs)?;
        put(out, Box::into_raw(Box::new(GslGraph(g))), "out")
    })
}

/// Parses the text edge-list format (header `n d`, then 1-indexed edges).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_parse(text: *const c_char, out: *mut *mut GslGraph) -> GslStatus {
    guard(|| {
        if text.is_null() {
            return Err(Fail::Null("text"));
        }
        let s =
            CStr::from_ptr(text).to_str().map_err(|_| Error::InvalidArgument("edge list is not valid UTF-8".into()))?;
        let g = parse_edge_list(s)?;
        put(out, Box::into_raw(Box::new(GslGraph(g))), "out")
    })
}

/// Serializes to the edge-list format. Free the result with [`gsl_string_free`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_to_edge_list(g: *const GslGraph, out: *mut *mut c_char) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        let c = CString::new(serialize_edge_list(&g.0)).map_err(|e| Error::Resource(e.to_string()))?;
        put(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gsl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_free(g: *mut GslGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `n` and `d` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_shape(g: *const GslGraph, n: *mut usize, d: *mut usize) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        put(n, g.0.n(), "n")?;
        put(d, g.0.d(), "d")
    })
}

/// Writes the sorted neighbors of `v` into `buf`, which must hold `d` entries.
///
/// # Safety
/// `g` must be a live handle; `buf` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn gsl_graph_neighbors(g: *const GslGraph, v: usize, buf: *mut u32, cap: usize) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        let nb = g.0.neighbors(v)?;
        if cap < nb.len() {
            return Err(Error::InvalidArgument(format!("buffer holds {cap} entries, need {}", nb.len())).into());
        }
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        ptr::copy_nonoverlapping(nb.as_ptr(), buf, nb.len());
        Ok(())
    })
}

/// Measures one copy of the graph state in `basis`, under depolarizing
/// noise of strength `p`, and writes the `n` outcome bits to `outcome`.
///
/// # Safety
/// `basis` and `outcome` must each point to `n` bytes, `n` = vertex count.
#[no_mangle]
pub unsafe extern "C" fn gsl_sample(
    g: *const GslGraph,
    basis: *const u8,
    p: f64,
    mode: GslNoiseMode,
    rng: *mut GslRng,
    outcome: *mut u8,
) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        let rng = as_mut(rng, "rng")?;
        let n = g.0.n();
        let basis = BasisAssignment::new(bits_from(bit_slice(basis, n, "basis")?));
        let noise = NoiseModel::new(p, mode.into())?;
        let m = sample_noisy_outcome(&g.0, &basis, &noise, &mut rng.0)?;
        if outcome.is_null() {
            return Err(Fail::Null("outcome"));
        }
        for (j, bit) in m.to_bools().into_iter().enumerate() {
            outcome.add(j).write(bit as u8);
        }
        Ok(())
    })
}

/// Exact noiseless probability of `outcome` when measuring in `basis`.
///
/// # Safety
/// `basis` and `outcome` must each point to `n` bytes; `prob` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_exact_prob(
    g: *const GslGraph,
    basis: *const u8,
    outcome: *const u8,
    prob: *mut f64,
) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        let n = g.0.n();
        let basis = BasisAssignment::new(bits_from(bit_slice(basis, n, "basis")?));
        let m = bits_from(bit_slice(outcome, n, "outcome")?);
        put(prob, exact_prob_via_tableau(&g.0, &basis, &m)?, "prob")
    })
}

/// Runs the learner on copies of `g`'s state. `w = 0` picks the default
/// weight `⌈(n−d)/d⌉`.
///
/// # Safety
/// `g` and `rng` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_learn(
    g: *const GslGraph,
    m: usize,
    r: usize,
    w: usize,
    p: f64,
    mode: GslNoiseMode,
    rng: *mut GslRng,
    out: *mut *mut GslCandidates,
) -> GslStatus {
    guard(|| {
        let g = as_ref(g, "graph")?;
        let rng = as_mut(rng, "rng")?;
        let (n, d) = (g.0.n(), g.0.d());
        let cfg = LearnConfig {
            n,
            d,
            m,
            r,
            w: if w == 0 { gslearn::learner::default_weight(n, d) } else { w },
            noise: NoiseModel::new(p, mode.into())?,
            master_seed: 0,
        };
        cfg.validate()?;
        let mut oracle = GraphStateOracle::new(&g.0, cfg.noise);
        let sets = learn_graph_state(&mut oracle, &cfg, &mut rng.0)?;
        put(out, Box::into_raw(Box::new(GslCandidates(sets))), "out")
    })
}

/// Number of surviving candidates for vertex `v`.
///
/// # Safety
/// `c` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_candidates_count(c: *const GslCandidates, v: usize, count: *mut usize) -> GslStatus {
    guard(|| {
        let c = as_ref(c, "candidates")?;
        if v >= c.0.n() {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range")).into());
        }
        put(count, c.0.len(v), "count")
    })
}

/// Whether every candidate set is exactly the true neighborhood in `g`.
///
/// # Safety
/// `c` and `g` must be live handles; `success` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_candidates_is_success(
    c: *const GslCandidates,
    g: *const GslGraph,
    success: *mut bool,
) -> GslStatus {
    guard(|| {
        let c = as_ref(c, "candidates")?;
        let g = as_ref(g, "graph")?;
        put(success, gslearn::learner::is_success(&c.0, &g.0)?, "success")
    })
}

/// # Safety
/// `c` must be NULL or a live candidates handle.
#[no_mangle]
pub unsafe extern "C" fn gsl_candidates_free(c: *mut GslCandidates) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_m_noiseless(n: usize, d: usize, eps: f64, out: *mut u64) -> GslStatus {
    guard(|| put(out, bounds::m_noiseless(n, d, eps)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_m_noisy(n: usize, d: usize, eps: f64, out: *mut u64) -> GslStatus {
    guard(|| put(out, bounds::m_noisy(n, d, eps)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_r_noisy(n: usize, d: usize, eps: f64, p: f64, out: *mut u64) -> GslStatus {
    guard(|| put(out, bounds::r_noisy(n, d, eps, p)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_p_samp(n: usize, d: usize, w: usize, out: *mut f64) -> GslStatus {
    guard(|| put(out, bounds::p_samp(n, d, w)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_gamma(p: f64, d: usize, out: *mut f64) -> GslStatus {
    guard(|| put(out, bounds::gamma(p, d)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gsl_bound_converse_n(n: usize, d: usize, p: f64, eps: f64, out: *mut f64) -> GslStatus {
    guard(|| put(out, bounds::converse_n(n, d, p, eps)?, "out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_out_pointer_is_reported() {
        let st = unsafe { gsl_bound_gamma(0.1, 2, ptr::null_mut()) };
        assert_eq!(st, GslStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(gsl_last_error()) }.to_str().unwrap();
        assert!(msg.contains("out"));
    }

    #[test]
    fn error_codes_follow_the_library() {
        let mut g = ptr::null_mut();
        let mut rng = ptr::null_mut();
        unsafe {
            assert_eq!(gsl_rng_new(1, 0, 0, &mut rng), GslStatus::Ok);
            assert_eq!(gsl_graph_random_regular(5, 3, rng, &mut g), GslStatus::Infeasible);
            assert!(g.is_null());
            assert_eq!(gsl_rng_new(1, 9, 0, &mut rng), GslStatus::InvalidArgument);
            gsl_rng_free(rng);
        }
    }
}
