//! C ABI over the treemix library.
//!
//! Conventions: every function returns a `TmxStatus`; results come back
//! through out-pointers. Datasets and chains are opaque handles created and
//! released by the matching `_free` functions. String buffers are written
//! NUL-terminated and truncated to the caller's capacity. On any failure the
//! thread-local message retrieved by `tmx_last_error` describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use treemix::inference::{
    mh_fixed_tree, tm_mcmc, ChainTrace, ProposalConfig, RecursiveLikelihood, RjConfig,
};
use treemix::likelihood::recursive::{log_density_recursive, log_likelihood_recursive};
use treemix::model::extremal_coefficient;
use treemix::posterior::summarize;
use treemix::{DependenceParams, Error, MaximaDataset, TwoLayerTree};

/// Status codes returned by every treemix FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmxStatus {
    /// Success.
    TmxOk = 0,
    /// A parameter or data value was outside its mathematical domain.
    TmxErrDomain = 1,
    /// Arguments were structurally inconsistent (sizes, ranges, handles).
    TmxErrContract = 2,
    /// A string argument failed to parse.
    TmxErrParse = 3,
    /// An I/O operation failed.
    TmxErrIo = 4,
    /// A required pointer argument was NULL.
    TmxErrNull = 5,
    /// The library panicked; the handle states are unchanged.
    TmxErrPanic = 6,
}

/// Opaque block-maxima dataset handle.
pub struct TmxDataset(MaximaDataset);

/// Opaque sampler-chain handle.
pub struct TmxChain(ChainTrace);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> TmxStatus {
    match e {
        Error::Domain(_) => TmxStatus::TmxErrDomain,
        Error::Contract(_) => TmxStatus::TmxErrContract,
        Error::Parse(_) => TmxStatus::TmxErrParse,
        Error::Io(_) => TmxStatus::TmxErrIo,
    }
}

fn run(f: impl FnOnce() -> Result<(), (TmxStatus, String)>) -> TmxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TmxStatus::TmxOk
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TmxStatus::TmxErrPanic
        }
    }
}

fn lib_err(e: Error) -> (TmxStatus, String) {
    (status_of(&e), e.to_string())
}

fn null_err(name: &str) -> (TmxStatus, String) {
    (TmxStatus::TmxErrNull, format!("{name} is NULL"))
}

/// # Safety
/// `ptr` must be NULL or a valid NUL-terminated UTF-8 string.
unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, (TmxStatus, String)> {
    if ptr.is_null() {
        return Err(null_err(name));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| (TmxStatus::TmxErrParse, format!("{name} is not UTF-8")))
}

/// # Safety
/// `ptr` must be NULL or point to `len` readable f64 values.
unsafe fn read_f64s<'a>(
    ptr: *const f64,
    len: usize,
    name: &str,
) -> Result<&'a [f64], (TmxStatus, String)> {
    if ptr.is_null() {
        return Err(null_err(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn parse_model(
    tree: *const c_char,
    alpha0: f64,
    alphas: *const f64,
    n_clusters: usize,
) -> Result<(TwoLayerTree, DependenceParams), (TmxStatus, String)> {
    let tree: TwoLayerTree = read_str(tree, "tree")?.parse().map_err(lib_err)?;
    let alphas = read_f64s(alphas, n_clusters, "alphas")?;
    let params = DependenceParams::new(alpha0, alphas.to_vec()).map_err(lib_err)?;
    params.check_tree(&tree).map_err(lib_err)?;
    Ok((tree, params))
}

/// Copies the message of the most recent failure on this thread into `buf`
/// (NUL-terminated, truncated to `len` bytes). Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be NULL (to query the length only) or point to `len` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn tmx_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a dataset from a row-major `rows` x `cols` array of strictly
/// positive unit-Frechet block maxima.
///
/// # Safety
/// `values` must point to `rows * cols` readable f64 values; `out` must be a
/// valid pointer. The returned handle must be released with
/// `tmx_dataset_free`.
#[no_mangle]
pub unsafe extern "C" fn tmx_dataset_new(
    values: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut TmxDataset,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let values = read_f64s(values, rows.saturating_mul(cols), "values")?;
        let ds = MaximaDataset::new(values.to_vec(), rows, cols).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TmxDataset(ds)));
        Ok(())
    })
}

/// Reads a dataset from a block-maxima CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. The returned handle must be released with `tmx_dataset_free`.
#[no_mangle]
pub unsafe extern "C" fn tmx_dataset_read_csv(
    path: *const c_char,
    out: *mut *mut TmxDataset,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let path = read_str(path, "path")?;
        let ds = treemix::io::read_csv_path(std::path::Path::new(path)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TmxDataset(ds)));
        Ok(())
    })
}

/// Releases a dataset handle; NULL is ignored.
///
/// # Safety
/// `ds` must be NULL or a handle produced by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tmx_dataset_free(ds: *mut TmxDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of rows, or 0 for a NULL handle.
///
/// # Safety
/// `ds` must be NULL or a valid dataset handle.
#[no_mangle]
pub unsafe extern "C" fn tmx_dataset_rows(ds: *const TmxDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.rows())
}

/// Number of columns, or 0 for a NULL handle.
///
/// # Safety
/// `ds` must be NULL or a valid dataset handle.
#[no_mangle]
pub unsafe extern "C" fn tmx_dataset_cols(ds: *const TmxDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.cols())
}

/// Draws `count` nested-logistic block maxima under (`tree`, alpha0, alphas).
///
/// # Safety
/// `tree` must be a valid NUL-terminated string; `alphas` must hold one value
/// per tree cluster (`n_clusters` of them); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmx_simulate_nested_logistic(
    tree: *const c_char,
    alpha0: f64,
    alphas: *const f64,
    n_clusters: usize,
    count: usize,
    seed: u64,
    out: *mut *mut TmxDataset,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let (tree, params) = parse_model(tree, alpha0, alphas, n_clusters)?;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let ds = treemix::simulate::sample_nested_logistic(&tree, &params, count, &mut rng)
            .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TmxDataset(ds)));
        Ok(())
    })
}

/// Log density of one observation `m` (length `d`) under the model.
///
/// # Safety
/// `tree` must be a valid NUL-terminated string; `alphas` must hold
/// `n_clusters` values; `m` must hold `d` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tmx_log_density(
    tree: *const c_char,
    alpha0: f64,
    alphas: *const f64,
    n_clusters: usize,
    m: *const f64,
    d: usize,
    out: *mut f64,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let (tree, params) = parse_model(tree, alpha0, alphas, n_clusters)?;
        let m = read_f64s(m, d, "m")?;
        if d != tree.dim() {
            return Err((
                TmxStatus::TmxErrContract,
                format!("{} observation values for a {}-variable tree", d, tree.dim()),
            ));
        }
        *out = log_density_recursive(m, &tree, &params).map_err(lib_err)?;
        Ok(())
    })
}

/// Log likelihood of a dataset under the model.
///
/// # Safety
/// `ds` must be a valid dataset handle; `tree` a valid NUL-terminated string;
/// `alphas` must hold `n_clusters` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tmx_log_likelihood(
    ds: *const TmxDataset,
    tree: *const c_char,
    alpha0: f64,
    alphas: *const f64,
    n_clusters: usize,
    out: *mut f64,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let ds = ds.as_ref().ok_or_else(|| null_err("ds"))?;
        let (tree, params) = parse_model(tree, alpha0, alphas, n_clusters)?;
        *out = log_likelihood_recursive(&ds.0, &tree, &params).map_err(lib_err)?;
        Ok(())
    })
}

/// Extremal coefficient of all variables under the model.
///
/// # Safety
/// `tree` must be a valid NUL-terminated string; `alphas` must hold
/// `n_clusters` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tmx_extremal_coefficient(
    tree: *const c_char,
    alpha0: f64,
    alphas: *const f64,
    n_clusters: usize,
    out: *mut f64,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let (tree, params) = parse_model(tree, alpha0, alphas, n_clusters)?;
        *out = extremal_coefficient(&tree, &params).map_err(lib_err)?;
        Ok(())
    })
}

/// Fixed-tree Metropolis-Hastings fit; `burnin` only annotates the chain.
///
/// # Safety
/// `ds` must be a valid dataset handle; `tree` a valid NUL-terminated string;
/// `out` must be valid. The returned handle must be released with
/// `tmx_chain_free`.
#[no_mangle]
pub unsafe extern "C" fn tmx_fit_fixed_tree(
    ds: *const TmxDataset,
    tree: *const c_char,
    iters: u64,
    burnin: u64,
    seed: u64,
    out: *mut *mut TmxChain,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let ds = ds.as_ref().ok_or_else(|| null_err("ds"))?;
        let tree: TwoLayerTree = read_str(tree, "tree")?.parse().map_err(lib_err)?;
        let init =
            DependenceParams::constant(0.5, tree.cluster_count()).map_err(lib_err)?;
        let lik = RecursiveLikelihood(&ds.0);
        let config = ProposalConfig::with_burnin(burnin);
        let trace =
            mh_fixed_tree(&lik, &tree, &init, &config, iters, seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TmxChain(trace)));
        Ok(())
    })
}

/// Tree-mixture reversible-jump fit; `burnin` bounds the adaptation phase
/// and annotates the chain.
///
/// # Safety
/// `ds` must be a valid dataset handle; `out` must be valid. The returned
/// handle must be released with `tmx_chain_free`.
#[no_mangle]
pub unsafe extern "C" fn tmx_fit_tree_mixture(
    ds: *const TmxDataset,
    iters: u64,
    burnin: u64,
    seed: u64,
    out: *mut *mut TmxChain,
) -> TmxStatus {
    run(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let ds = ds.as_ref().ok_or_else(|| null_err("ds"))?;
        let lik = RecursiveLikelihood(&ds.0);
        let rj = RjConfig::with_iters(iters);
        let config = ProposalConfig::with_burnin(burnin);
        let trace = tm_mcmc(&lik, &rj, &config, seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(TmxChain(trace)));
        Ok(())
    })
}

/// Releases a chain handle; NULL is ignored.
///
/// # Safety
/// `chain` must be NULL or a handle produced by this library and not freed.
#[no_mangle]
pub unsafe extern "C" fn tmx_chain_free(chain: *mut TmxChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of recorded iterations, or 0 for a NULL handle.
///
/// # Safety
/// `chain` must be NULL or a valid chain handle.
#[no_mangle]
pub unsafe extern "C" fn tmx_chain_len(chain: *const TmxChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.records.len())
}

/// Writes the chain's post-burn-in modal tree in text form into `buf`
/// (NUL-terminated, truncated to `len` bytes).
///
/// # Safety
/// `chain` must be a valid chain handle; `buf` must point to `len` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn tmx_chain_modal_tree(
    chain: *const TmxChain,
    buf: *mut c_char,
    len: usize,
) -> TmxStatus {
    run(|| {
        let chain = chain.as_ref().ok_or_else(|| null_err("chain"))?;
        if buf.is_null() || len == 0 {
            return Err(null_err("buf"));
        }
        let summary = summarize(&chain.0, chain.0.header.burnin).map_err(lib_err)?;
        let tree = summary
            .modal_tree()
            .ok_or((TmxStatus::TmxErrContract, "empty chain".to_string()))?
            .to_string();
        let n = tree.len().min(len - 1);
        std::ptr::copy_nonoverlapping(tree.as_ptr(), buf.cast(), n);
        *buf.add(n) = 0;
        Ok(())
    })
}

/// Writes a chain to an NDJSON file.
///
/// # Safety
/// `chain` must be a valid chain handle; `path` a valid NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn tmx_chain_write_ndjson(
    chain: *const TmxChain,
    path: *const c_char,
) -> TmxStatus {
    run(|| {
        let chain = chain.as_ref().ok_or_else(|| null_err("chain"))?;
        let path = read_str(path, "path")?;
        let f = std::fs::File::create(path)
            .map_err(|e| (TmxStatus::TmxErrIo, format!("{path}: {e}")))?;
        chain
            .0
            .write_ndjson(std::io::BufWriter::new(f))
            .map_err(lib_err)?;
        Ok(())
    })
}
