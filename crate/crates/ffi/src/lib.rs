//! C ABI for `gbs-core`.
//!
//! Conventions, mirrored in the generated `include/gbs.h`:
//!
//! - Graphs and words live behind opaque handles created by the `_parse`
//!   functions and released by the matching `_free` functions. A `_free`
//!   accepts null and does nothing.
//! - Every fallible function returns a [`GbsStatus`] and writes its result
//!   through `out` pointers, which it touches only on `Ok`.
//! - On `Domain` failures a thread-local message describes the problem;
//!   fetch it with [`gbs_last_error_message`] and release it with
//!   [`gbs_string_free`], like every other string returned by this library.
//! - Strings are UTF-8, NUL-terminated, and never null when the status is
//!   `Ok`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use gbs_core::bound::ChainComplex2;
use gbs_core::chains::verify_family;
use gbs_core::moves::reduce_graph;
use gbs_core::{GbsGraph, GogWord};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbsStatus {
    /// The call succeeded and the out-parameters are filled in.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input was well-formed but wrong (parse error, invalid graph,
    /// impossible request). `gbs_last_error_message` has the details.
    Domain = 3,
}

/// An opaque parsed graph.
pub struct GbsGraphHandle {
    inner: GbsGraph,
}

/// An opaque parsed word (a based loop in some graph).
pub struct GbsWordHandle {
    inner: GogWord,
}

/// The accessibility bound report for a 2-complex.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GbsBoundReport {
    /// Complexity: twice the mod-2 first cohomology dimension, plus the
    /// 0-cell and 2-cell counts.
    pub delta: u64,
    /// The caller-supplied first Betti number.
    pub beta1: u64,
    /// delta + beta1.
    pub vertex_bound: u64,
    /// vertex_bound - 1 + beta1.
    pub edge_bound: u64,
    /// vertex_bound + edge_bound.
    pub total_bound: u64,
    /// 4*delta + 9*beta1 - 5; may be negative.
    pub bf_vertex_bound: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) -> GbsStatus {
    let text = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message had interior NUL").expect("clean"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
    GbsStatus::Domain
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Reads a required UTF-8 string argument.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, GbsStatus> {
    if ptr.is_null() {
        return Err(GbsStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| GbsStatus::InvalidUtf8)
}

fn leak_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("interior NULs were replaced")
        .into_raw()
}

/// The message of the most recent `Domain` failure on this thread, or an
/// empty string. The caller owns the returned string; release it with
/// `gbs_string_free`.
#[no_mangle]
pub extern "C" fn gbs_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        let text = slot
            .borrow()
            .as_ref()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        leak_string(text)
    })
}

/// Releases a string returned by this library. Accepts null.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn gbs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a graph from its text format (`vertex` and `edge`
/// lines). On `Ok`, `*out` owns the new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_parse(
    text: *const c_char,
    out: *mut *mut GbsGraphHandle,
) -> GbsStatus {
    if out.is_null() {
        return GbsStatus::NullArgument;
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let graph = match GbsGraph::parse(text).and_then(|g| {
        g.ensure_valid()?;
        Ok(g)
    }) {
        Ok(g) => g,
        Err(e) => return set_error(e.to_string()),
    };
    clear_error();
    *out = Box::into_raw(Box::new(GbsGraphHandle { inner: graph }));
    GbsStatus::Ok
}

/// Releases a graph handle. Accepts null.
///
/// # Safety
/// `g` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_free(g: *mut GbsGraphHandle) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Renders the graph back to its text format.
///
/// # Safety
/// `g` must be a valid handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_to_text(
    g: *const GbsGraphHandle,
    out: *mut *mut c_char,
) -> GbsStatus {
    if g.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    *out = leak_string((*g).inner.to_text());
    GbsStatus::Ok
}

/// Number of vertices; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_vertex_count(g: *const GbsGraphHandle) -> u64 {
    if g.is_null() {
        0
    } else {
        (*g).inner.vertex_count() as u64
    }
}

/// Number of edges; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_edge_count(g: *const GbsGraphHandle) -> u64 {
    if g.is_null() {
        0
    } else {
        (*g).inner.edge_count() as u64
    }
}

/// Whether no non-loop edge end is labeled 1 or -1 (so no collapse applies).
///
/// # Safety
/// `g` must be a valid handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_is_reduced(
    g: *const GbsGraphHandle,
    out: *mut bool,
) -> GbsStatus {
    if g.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    match (*g).inner.is_reduced() {
        Ok(answer) => {
            clear_error();
            *out = answer;
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Collapses unit-label edges until the graph is reduced, leaving the input
/// untouched. On `Ok`, `*out` owns the reduced copy.
///
/// # Safety
/// `g` must be a valid handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_graph_reduce(
    g: *const GbsGraphHandle,
    out: *mut *mut GbsGraphHandle,
) -> GbsStatus {
    if g.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    match reduce_graph(&(*g).inner) {
        Ok((reduced, _log)) => {
            clear_error();
            *out = Box::into_raw(Box::new(GbsGraphHandle { inner: reduced }));
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Parses one `word <base>: <exponent> [<edge> <exponent>]...` line.
///
/// # Safety
/// `line` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_parse(
    line: *const c_char,
    out: *mut *mut GbsWordHandle,
) -> GbsStatus {
    if out.is_null() {
        return GbsStatus::NullArgument;
    }
    let line = match read_str(line) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match GogWord::parse(line) {
        Ok(word) => {
            clear_error();
            *out = Box::into_raw(Box::new(GbsWordHandle { inner: word }));
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Releases a word handle. Accepts null.
///
/// # Safety
/// `w` must be null or an unfreed handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_free(w: *mut GbsWordHandle) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Renders the word back to its one-line text format.
///
/// # Safety
/// `w` must be a valid handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_to_text(
    w: *const GbsWordHandle,
    out: *mut *mut c_char,
) -> GbsStatus {
    if w.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    *out = leak_string((*w).inner.to_string());
    GbsStatus::Ok
}

/// Britton-reduces the word over the graph. On `Ok`, `*out` owns the
/// reduced copy.
///
/// # Safety
/// `g` and `w` must be valid handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_reduce(
    g: *const GbsGraphHandle,
    w: *const GbsWordHandle,
    out: *mut *mut GbsWordHandle,
) -> GbsStatus {
    if g.is_null() || w.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    match (*w).inner.reduce(&(*g).inner) {
        Ok(reduced) => {
            clear_error();
            *out = Box::into_raw(Box::new(GbsWordHandle { inner: reduced }));
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Whether the element fixes a point of the tree.
///
/// # Safety
/// `g` and `w` must be valid handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_is_elliptic(
    g: *const GbsGraphHandle,
    w: *const GbsWordHandle,
    out: *mut bool,
) -> GbsStatus {
    if g.is_null() || w.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    match (*w).inner.is_elliptic(&(*g).inner) {
        Ok(answer) => {
            clear_error();
            *out = answer;
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Translation length on the tree: 0 exactly for elliptic elements.
///
/// # Safety
/// `g` and `w` must be valid handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_word_translation_length(
    g: *const GbsGraphHandle,
    w: *const GbsWordHandle,
    out: *mut u64,
) -> GbsStatus {
    if g.is_null() || w.is_null() || out.is_null() {
        return GbsStatus::NullArgument;
    }
    match (*w).inner.translation_length(&(*g).inner) {
        Ok(length) => {
            clear_error();
            *out = length as u64;
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

/// Parses a 2-complex from its text format (`cell0` / `cell1` / `cell2`
/// lines) and fills in the bound report for the given first Betti number.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gbs_bound_report(
    text: *const c_char,
    beta1: u64,
    out: *mut GbsBoundReport,
) -> GbsStatus {
    if out.is_null() {
        return GbsStatus::NullArgument;
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let report = match ChainComplex2::parse(text).and_then(|c| c.accessibility_bounds(beta1)) {
        Ok(r) => r,
        Err(e) => return set_error(e.to_string()),
    };
    clear_error();
    *out = GbsBoundReport {
        delta: report.delta,
        beta1: report.beta1,
        vertex_bound: report.vertex_bound,
        edge_bound: report.edge_bound,
        total_bound: report.total_bound,
        bf_vertex_bound: report.bf_vertex_bound,
    };
    GbsStatus::Ok
}

/// Verifies the distinguished valence-5 chain family for lengths 1 through
/// `kmax`: returns `Ok` when every member passes, `Domain` (with a message)
/// otherwise.
#[no_mangle]
pub extern "C" fn gbs_verify_family(kmax: u64) -> GbsStatus {
    match verify_family(kmax as usize) {
        Ok(_) => {
            clear_error();
            GbsStatus::Ok
        }
        Err(e) => set_error(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstring(text: &str) -> CString {
        CString::new(text).expect("no interior NUL")
    }

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let text = unsafe { CStr::from_ptr(ptr) }.to_str().expect("utf-8").to_string();
        unsafe { gbs_string_free(ptr) };
        text
    }

    fn last_error() -> String {
        take_string(gbs_last_error_message())
    }

    fn parse_graph(text: &str) -> *mut GbsGraphHandle {
        let c = cstring(text);
        let mut handle: *mut GbsGraphHandle = ptr::null_mut();
        let status = unsafe { gbs_graph_parse(c.as_ptr(), &mut handle) };
        assert_eq!(status, GbsStatus::Ok, "{}", last_error());
        handle
    }

    #[test]
    fn graph_round_trip_and_counts() {
        let text = "vertex v\nedge e v v 2 3\n";
        let g = parse_graph(text);
        unsafe {
            assert_eq!(gbs_graph_vertex_count(g), 1);
            assert_eq!(gbs_graph_edge_count(g), 1);
            let mut rendered: *mut c_char = ptr::null_mut();
            assert_eq!(gbs_graph_to_text(g, &mut rendered), GbsStatus::Ok);
            assert_eq!(take_string(rendered), text);
            let mut reduced = false;
            assert_eq!(gbs_graph_is_reduced(g, &mut reduced), GbsStatus::Ok);
            assert!(reduced, "a (2,3) loop admits no collapse");
            gbs_graph_free(g);
        }
    }

    #[test]
    fn reduce_collapses_unit_edges() {
        let g = parse_graph("vertex u\nvertex v\nedge e u v 1 2\nedge h v v 2 3\n");
        unsafe {
            let mut out: *mut GbsGraphHandle = ptr::null_mut();
            assert_eq!(gbs_graph_reduce(g, &mut out), GbsStatus::Ok);
            assert_eq!(gbs_graph_vertex_count(out), 1);
            assert_eq!(gbs_graph_edge_count(out), 1);
            // The input is untouched.
            assert_eq!(gbs_graph_vertex_count(g), 2);
            gbs_graph_free(out);
            gbs_graph_free(g);
        }
    }

    #[test]
    fn word_length_and_ellipticity() {
        let g = parse_graph("vertex v\nedge e v v 2 3\n");
        let line = cstring("word v: 0 e 0 e 0");
        unsafe {
            let mut w: *mut GbsWordHandle = ptr::null_mut();
            assert_eq!(gbs_word_parse(line.as_ptr(), &mut w), GbsStatus::Ok);
            let mut elliptic = true;
            assert_eq!(gbs_word_is_elliptic(g, w, &mut elliptic), GbsStatus::Ok);
            assert!(!elliptic);
            let mut length = 0u64;
            assert_eq!(gbs_word_translation_length(g, w, &mut length), GbsStatus::Ok);
            assert_eq!(length, 2);

            // The stable-letter relation: e x^3 ~e reduces to x^2.
            let relation = cstring("word v: 0 e 3 ~e 0");
            let mut r: *mut GbsWordHandle = ptr::null_mut();
            assert_eq!(gbs_word_parse(relation.as_ptr(), &mut r), GbsStatus::Ok);
            let mut reduced: *mut GbsWordHandle = ptr::null_mut();
            assert_eq!(gbs_word_reduce(g, r, &mut reduced), GbsStatus::Ok);
            let mut rendered: *mut c_char = ptr::null_mut();
            assert_eq!(gbs_word_to_text(reduced, &mut rendered), GbsStatus::Ok);
            assert_eq!(take_string(rendered), "word v: 2");
            gbs_word_free(reduced);
            gbs_word_free(r);
            gbs_word_free(w);
            gbs_graph_free(g);
        }
    }

    #[test]
    fn bound_report_matches_the_wedge_example() {
        let text = cstring(
            "cell0 o\ncell0 a\ncell0 b\ncell0 c\ncell0 d\n\
             cell1 oa o a\ncell1 ab a b\ncell1 bo b o\n\
             cell1 oc o c\ncell1 cd c d\ncell1 do d o\n",
        );
        let mut report = GbsBoundReport {
            delta: 0,
            beta1: 0,
            vertex_bound: 0,
            edge_bound: 0,
            total_bound: 0,
            bf_vertex_bound: 0,
        };
        let status = unsafe { gbs_bound_report(text.as_ptr(), 2, &mut report) };
        assert_eq!(status, GbsStatus::Ok, "{}", last_error());
        assert_eq!(report.delta, 9);
        assert_eq!(report.vertex_bound, 11);
        assert_eq!(report.edge_bound, 12);
        assert_eq!(report.total_bound, 23);
        assert_eq!(report.bf_vertex_bound, 49);
    }

    #[test]
    fn family_verification_reports_status() {
        assert_eq!(gbs_verify_family(3), GbsStatus::Ok);
        assert_eq!(gbs_verify_family(0), GbsStatus::Domain);
        assert!(last_error().contains("family"), "{}", last_error());
    }

    #[test]
    fn null_and_bad_arguments_are_rejected() {
        unsafe {
            let mut handle: *mut GbsGraphHandle = ptr::null_mut();
            assert_eq!(
                gbs_graph_parse(ptr::null(), &mut handle),
                GbsStatus::NullArgument
            );
            let bad = cstring("vertex v\nedge e v w 2 3\n");
            assert_eq!(
                gbs_graph_parse(bad.as_ptr(), &mut handle),
                GbsStatus::Domain
            );
            assert!(last_error().contains("unknown vertex"), "{}", last_error());
            let invalid = [0xC3u8, 0x28, 0x00];
            assert_eq!(
                gbs_graph_parse(invalid.as_ptr().cast(), &mut handle),
                GbsStatus::InvalidUtf8
            );
            // Frees tolerate null.
            gbs_graph_free(ptr::null_mut());
            gbs_word_free(ptr::null_mut());
            gbs_string_free(ptr::null_mut());
        }
    }
}
