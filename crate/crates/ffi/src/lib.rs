//! C ABI over the `wgraphlets` engine.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`WgStatus`]; on failure [`wg_last_error`] describes the problem for the
//! calling thread. Panics never unwind into C: they become
//! `WG_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wgraphlets::atlas::GraphletAtlas;
use wgraphlets::measures::{self, Features, MeasureKind, Statistic};
use wgraphlets::pdb::{parse_pdb, ResidueRange};
use wgraphlets::psn::{build_psn, PsnOptions, WeightedPsn};
use wgraphlets::{Error, Matrix};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    ChainNotFound = 5,
    Degenerate = 6,
    BufferTooSmall = 7,
    Io = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgMeasure {
    Graphlet35 = 0,
    Ordered34 = 1,
    Egdvm = 2,
    EgdvmCc = 3,
    Wegdvm = 4,
    WegdvmCc = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgStatistic {
    CramerVonMises = 0,
    Sum = 1,
}

impl From<WgMeasure> for MeasureKind {
    fn from(m: WgMeasure) -> Self {
        match m {
            WgMeasure::Graphlet35 => MeasureKind::Graphlet35,
            WgMeasure::Ordered34 => MeasureKind::Ordered34,
            WgMeasure::Egdvm => MeasureKind::Egdvm,
            WgMeasure::EgdvmCc => MeasureKind::EgdvmCc,
            WgMeasure::Wegdvm => MeasureKind::Wegdvm,
            WgMeasure::WegdvmCc => MeasureKind::WegdvmCc,
        }
    }
}

impl From<WgStatistic> for Statistic {
    fn from(s: WgStatistic) -> Self {
        match s {
            WgStatistic::CramerVonMises => Statistic::CramerVonMises,
            WgStatistic::Sum => Statistic::Sum,
        }
    }
}

/// Weighted protein structure network.
pub struct WgPsn(WeightedPsn);

/// Row-major real matrix.
pub struct WgMatrix(Matrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(WgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } | Error::Format { .. } | Error::Json(_) | Error::Csv(_) => WgStatus::Parse,
            Error::ChainNotFound(_) => WgStatus::ChainNotFound,
            Error::Degenerate(_) => WgStatus::Degenerate,
            Error::Io(_) => WgStatus::Io,
            Error::Contract(_) => WgStatus::Internal,
            _ => WgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: WgStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

/// Runs `f`, records any failure and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WgStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(WgStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(WgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(WgStatus::NullArgument, format!("{what} is NULL")))
}

/// Message for the last failure on this thread, or NULL if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a PSN from PDB-format text.
///
/// `range` is an optional author-numbered interval such as `"10-120"` and
/// may be NULL. `cutoff` is in angstroms. On success `*out` receives a
/// handle to release with `wg_psn_free`.
///
/// # Safety
/// `pdb_text` and a non-NULL `range` must be NUL-terminated strings; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn wg_psn_from_pdb(
    pdb_text: *const c_char,
    chain: c_char,
    range: *const c_char,
    cutoff: f64,
    out: *mut *mut WgPsn,
) -> WgStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(WgStatus::NullArgument, "out is NULL"));
        }
        *out = ptr::null_mut();
        let text = c_str(pdb_text, "pdb_text")?;
        let range = if range.is_null() { None } else { Some(c_str(range, "range")?.parse::<ResidueRange>()?) };
        let chain_id = u8::try_from(chain)
            .ok()
            .filter(u8::is_ascii_graphic)
            .ok_or_else(|| fail(WgStatus::InvalidArgument, "chain must be a printable ASCII character"))?
            as char;
        let residues = parse_pdb(text, "ffi", chain_id, range)?;
        let psn = build_psn(&residues, PsnOptions::with_cutoff(cutoff))?;
        *out = Box::into_raw(Box::new(WgPsn(psn)));
        Ok(())
    })
}

/// # Safety
/// `psn` must be NULL or a handle from `wg_psn_from_pdb` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wg_psn_free(psn: *mut WgPsn) {
    if !psn.is_null() {
        drop(Box::from_raw(psn));
    }
}

/// Residue count, or 0 for NULL.
///
/// # Safety
/// `psn` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_psn_node_count(psn: *const WgPsn) -> usize {
    psn.as_ref().map_or(0, |p| p.0.node_count())
}

/// Contact count, or 0 for NULL.
///
/// # Safety
/// `psn` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wg_psn_edge_count(psn: *const WgPsn) -> usize {
    psn.as_ref().map_or(0, |p| p.0.edge_count())
}

/// Copies the edge list. `endpoints` receives `2 * edge_count` zero-based
/// node indices and `weights` receives `edge_count` values; either may be
/// NULL to skip it. `capacity` counts edges.
///
/// # Safety
/// Non-NULL buffers must hold at least `capacity` edges.
#[no_mangle]
pub unsafe extern "C" fn wg_psn_edges(
    psn: *const WgPsn,
    endpoints: *mut u32,
    weights: *mut f64,
    capacity: usize,
) -> WgStatus {
    guard(|| {
        let g = handle(psn, "psn")?.0.graph();
        let m = g.edge_count();
        if capacity < m {
            return Err(fail(WgStatus::BufferTooSmall, format!("{m} edges, capacity {capacity}")));
        }
        if !endpoints.is_null() {
            let buf = std::slice::from_raw_parts_mut(endpoints, 2 * m);
            for (k, &(a, b)) in g.edges().iter().enumerate() {
                buf[2 * k] = a;
                buf[2 * k + 1] = b;
            }
        }
        if !weights.is_null() {
            std::slice::from_raw_parts_mut(weights, m).copy_from_slice(g.weights());
        }
        Ok(())
    })
}

/// Length of a vector measure, or 0 for the matrix measures.
#[no_mangle]
pub extern "C" fn wg_measure_len(measure: WgMeasure) -> usize {
    MeasureKind::from(measure).vector_len().unwrap_or(0)
}

/// Computes a vector measure into `out`. `*written` receives its length.
///
/// # Safety
/// `out` must hold `capacity` doubles; `written` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wg_measure_vector(
    psn: *const WgPsn,
    measure: WgMeasure,
    statistic: WgStatistic,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> WgStatus {
    guard(|| {
        let psn = handle(psn, "psn")?;
        let kind = MeasureKind::from(measure);
        let len =
            kind.vector_len().ok_or_else(|| fail(WgStatus::InvalidArgument, format!("{kind} is a matrix measure")))?;
        if out.is_null() {
            return Err(fail(WgStatus::NullArgument, "out is NULL"));
        }
        if capacity < len {
            return Err(fail(WgStatus::BufferTooSmall, format!("{kind} needs {len} values, capacity {capacity}")));
        }
        let Features::Vector(v) = measures::compute(psn.0.graph(), GraphletAtlas::global(), kind, statistic.into())?
        else {
            unreachable!("vector kind")
        };
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&v.values);
        if !written.is_null() {
            *written = len;
        }
        Ok(())
    })
}

/// Computes a matrix measure (one row per edge, 68 columns).
///
/// # Safety
/// `out` must be writable; release the result with `wg_matrix_free`.
#[no_mangle]
pub unsafe extern "C" fn wg_measure_matrix(
    psn: *const WgPsn,
    measure: WgMeasure,
    statistic: WgStatistic,
    out: *mut *mut WgMatrix,
) -> WgStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(WgStatus::NullArgument, "out is NULL"));
        }
        *out = ptr::null_mut();
        let psn = handle(psn, "psn")?;
        let kind = MeasureKind::from(measure);
        if !kind.is_matrix() {
            return Err(fail(WgStatus::InvalidArgument, format!("{kind} is a vector measure")));
        }
        let Features::Matrix(m) = measures::compute(psn.0.graph(), GraphletAtlas::global(), kind, statistic.into())?
        else {
            unreachable!("matrix kind")
        };
        *out = Box::into_raw(Box::new(WgMatrix(m.values)));
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wg_matrix_rows(m: *const WgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wg_matrix_cols(m: *const WgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Row-major data, `rows * cols` values, owned by the handle.
///
/// # Safety
/// `m` must be NULL or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn wg_matrix_data(m: *const WgMatrix) -> *const f64 {
    m.as_ref().map_or(ptr::null(), |m| m.0.as_slice().as_ptr())
}

/// # Safety
/// `m` must be NULL or a matrix handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wg_matrix_free(m: *mut WgMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
