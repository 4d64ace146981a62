//! C-callable surface. Every function returns a status code; results come
//! back through out-parameters. Strings crossing the boundary are UTF-8,
//! NUL-terminated, allocated here, and released with `enchi_string_free`.
//! Handles are opaque and released with their `_free` functions.

use enchi::abelian::FinAbGroup;
use enchi::decomp::{classify, DetectionInput, Verdict};
use enchi::diagram::{euler_char, khi_certificate, OneOneDiagram};
use enchi::formats;
use enchi::fox::{sutured_torsion, turaev_torsion, GroupPresentation, Torsion};
use enchi::ring::{GroupRingElem, PmClass};
use enchi::window::{identity_suite, window_constants, TauAssignment, WindowParams};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

pub const ENCHI_OK: i32 = 0;
pub const ENCHI_ERR_PARSE: i32 = 1;
pub const ENCHI_ERR_INVALID: i32 = 2;
pub const ENCHI_ERR_COMPUTE: i32 = 3;
pub const ENCHI_ERR_ARGUMENT: i32 = 4;
pub const ENCHI_ERR_PANIC: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn out_string(s: String, out: *mut *mut c_char) -> i32 {
    let Ok(cs) = CString::new(s) else {
        set_error("result contained an interior NUL byte");
        return ENCHI_ERR_COMPUTE;
    };
    unsafe {
        *out = cs.into_raw();
    }
    ENCHI_OK
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(ENCHI_ERR_ARGUMENT);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        ENCHI_ERR_ARGUMENT
    })
}

fn guarded(f: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            ENCHI_ERR_PANIC
        }
    }
}

/// Opaque handle around a finite group presentation with meridian.
pub struct EnchiPresentation(GroupPresentation);

/// Opaque handle around a doubly-pointed genus-1 diagram.
pub struct EnchiDiagram(OneOneDiagram);

/// Opaque handle around a group-ring element with its group and names.
pub struct EnchiElement {
    group: FinAbGroup,
    names: Vec<String>,
    elem: GroupRingElem,
}

/// Opaque handle around per-coset detection data.
pub struct EnchiDetection(DetectionInput);

/// Toolkit semantic version as a static string; do not free.
#[no_mangle]
pub extern "C" fn enchi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// The last error message on this thread, as a fresh string.
#[no_mangle]
pub extern "C" fn enchi_last_error(out: *mut *mut c_char) -> i32 {
    if out.is_null() {
        return ENCHI_ERR_ARGUMENT;
    }
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    out_string(msg, out)
}

/// Releases a string allocated by this library.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn enchi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a presentation in the `.gp` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn enchi_presentation_parse(
    text: *const c_char,
    out: *mut *mut EnchiPresentation,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return ENCHI_ERR_ARGUMENT;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match formats::parse_presentation(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(EnchiPresentation(p)));
                ENCHI_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_PARSE
            }
        }
    })
}

/// # Safety
/// `p` must come from `enchi_presentation_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn enchi_presentation_free(p: *mut EnchiPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The sutured torsion of the presentation, printed as an element literal.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_sutured_torsion(
    p: *const EnchiPresentation,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if p.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        match sutured_torsion(&(*p).0) {
            Ok(tau) => out_string(
                formats::format_elem_default(&tau.display_rep()),
                out,
            ),
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_COMPUTE
            }
        }
    })
}

/// The Turaev torsion when it lands in the group ring; "indeterminate"
/// otherwise.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_turaev_torsion(
    p: *const EnchiPresentation,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if p.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        match turaev_torsion(&(*p).0) {
            Ok(Torsion::Integral(t)) => {
                out_string(formats::format_elem_default(&t.display_rep()), out)
            }
            Ok(Torsion::Indeterminate) => out_string("indeterminate".to_string(), out),
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_COMPUTE
            }
        }
    })
}

/// Parses a diagram in the `.od` text format and validates it.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_diagram_parse(
    text: *const c_char,
    out: *mut *mut EnchiDiagram,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return ENCHI_ERR_ARGUMENT;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let d = match formats::parse_diagram(text) {
            Ok(d) => d,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_PARSE;
            }
        };
        if let Err(e) = d.validate() {
            set_error(e.to_string());
            return ENCHI_ERR_INVALID;
        }
        *out = Box::into_raw(Box::new(EnchiDiagram(d)));
        ENCHI_OK
    })
}

/// # Safety
/// `d` must come from `enchi_diagram_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn enchi_diagram_free(d: *mut EnchiDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Knot Floer report of a diagram: total dimension, chi, and certificate,
/// as `key=value` lines.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_hfk_report(
    d: *const EnchiDiagram,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if d.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        let analysis = match (*d).0.validate() {
            Ok(a) => a,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_INVALID;
            }
        };
        let complex = match analysis.complex() {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_COMPUTE;
            }
        };
        let chi = match euler_char(&complex) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_COMPUTE;
            }
        };
        let cert = match khi_certificate(&complex) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_COMPUTE;
            }
        };
        let mut s = String::new();
        s.push_str(&format!("dim={}\n", chi.total_dim));
        s.push_str(&format!(
            "chi={}\n",
            formats::format_elem_default(&chi.chi.display_rep())
        ));
        s.push_str(&format!("upper={}\n", cert.upper));
        s.push_str(&format!("lower={}\n", cert.lower));
        s.push_str(&format!("certified={}\n", cert.certified));
        out_string(s, out)
    })
}

/// Compares the bigon and Fox-calculus pipelines on one diagram; sets
/// `agree` to 1 on exact agreement.
///
/// # Safety
/// `d` must be a live handle; `agree` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_crosscheck(
    d: *const EnchiDiagram,
    agree: *mut i32,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if d.is_null() || agree.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        let analysis = match (*d).0.validate() {
            Ok(a) => a,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_INVALID;
            }
        };
        match enchi::diagram::crosscheck(&analysis) {
            Ok((chi, tau, ok)) => {
                *agree = i32::from(ok);
                out_string(
                    format!(
                        "chi={}\ntau={}\n",
                        formats::format_elem_default(&chi.display_rep()),
                        formats::format_elem_default(&tau.display_rep())
                    ),
                    out,
                )
            }
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_COMPUTE
            }
        }
    })
}

/// Parses a group-ring element: a group literal, whitespace-separated
/// generator names, and an element literal.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_element_parse(
    group: *const c_char,
    gens: *const c_char,
    elem: *const c_char,
    out: *mut *mut EnchiElement,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return ENCHI_ERR_ARGUMENT;
        }
        let (group, gens, elem) = match (read_str(group), read_str(gens), read_str(elem)) {
            (Ok(g), Ok(n), Ok(e)) => (g, n, e),
            (Err(c), _, _) | (_, Err(c), _) | (_, _, Err(c)) => return c,
        };
        let group = match formats::parse_group(group) {
            Ok(g) => g,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_PARSE;
            }
        };
        let names: Vec<String> = if gens.trim().is_empty() {
            formats::default_names(&group)
        } else {
            gens.split_whitespace().map(str::to_string).collect()
        };
        match formats::parse_elem(&group, &names, elem) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(EnchiElement {
                    group,
                    names,
                    elem: e,
                }));
                ENCHI_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_PARSE
            }
        }
    })
}

/// # Safety
/// `e` must come from `enchi_element_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn enchi_element_free(e: *mut EnchiElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical printing of an element.
///
/// # Safety
/// `e` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_element_format(
    e: *const EnchiElement,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if e.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        let h = &*e;
        out_string(formats::format_elem(&h.elem, &h.names), out)
    })
}

/// The coefficient norm of an element, as a decimal or fraction string.
///
/// # Safety
/// `e` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_element_norm(
    e: *const EnchiElement,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if e.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        let n = (*e).elem.norm();
        let s = if *n.denom() == 1 {
            n.numer().to_string()
        } else {
            format!("{}/{}", n.numer(), n.denom())
        };
        out_string(s, out)
    })
}

/// Equality of the two elements as classes up to sign and translation;
/// sets `equal` to 1 on equality.
///
/// # Safety
/// `a` and `b` must be live handles; `equal` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_pm_equal(
    a: *const EnchiElement,
    b: *const EnchiElement,
    equal: *mut i32,
) -> i32 {
    guarded(|| {
        if a.is_null() || b.is_null() || equal.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        if (*a).group != (*b).group {
            set_error("elements belong to different groups");
            return ENCHI_ERR_INVALID;
        }
        let pa = PmClass::new((*a).elem.clone());
        let pb = PmClass::new((*b).elem.clone());
        *equal = i32::from(pa == pb);
        ENCHI_OK
    })
}

/// Parses detection input in the `.det` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_detection_parse(
    text: *const c_char,
    out: *mut *mut EnchiDetection,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return ENCHI_ERR_ARGUMENT;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match formats::parse_det(text) {
            Ok(inp) => {
                *out = Box::into_raw(Box::new(EnchiDetection(inp)));
                ENCHI_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_PARSE
            }
        }
    })
}

/// # Safety
/// `d` must come from `enchi_detection_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn enchi_detection_free(d: *mut EnchiDetection) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Runs the classifier. `verdict` receives 0 for unknot, 1 for
/// genus-one-fibred, 2 for a reported fibred genus, 3 for inconsistent,
/// 4 for unknown; `out` receives a one-line description.
///
/// # Safety
/// `d` must be a live handle; `verdict` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn enchi_classify(
    d: *const EnchiDetection,
    verdict: *mut i32,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if d.is_null() || verdict.is_null() || out.is_null() {
            set_error("null argument");
            return ENCHI_ERR_ARGUMENT;
        }
        match classify(&(*d).0) {
            Ok(v) => {
                let (code, label) = match &v {
                    Verdict::Unknot => (0, "unknot".to_string()),
                    Verdict::GenusOneFibred => (1, "genus-one-fibred".to_string()),
                    Verdict::FibredGenusN(n) => (2, format!("fibred-genus-{n}")),
                    Verdict::Inconsistent(r) => (3, format!("inconsistent ({r})")),
                    Verdict::Unknown => (4, "unknown".to_string()),
                };
                *verdict = code;
                out_string(label, out)
            }
            Err(e) => {
                set_error(e.to_string());
                ENCHI_ERR_INVALID
            }
        }
    })
}

/// Window-constant report for the given parameters, as `key=value` lines.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn enchi_window_report(
    q: u64,
    chi_bar_plus: i64,
    n: u64,
    tau_plus: i64,
    tau_minus: i64,
    tau_nat: i64,
    out: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out.is_null() {
            return ENCHI_ERR_ARGUMENT;
        }
        let params = WindowParams {
            q,
            chi_bar_plus,
            tau: TauAssignment {
                plus: tau_plus,
                minus: tau_minus,
                nat: vec![],
                nat_default: tau_nat,
            },
            n,
        };
        let report = match window_constants(&params) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return ENCHI_ERR_INVALID;
            }
        };
        let mut s = format!(
            "P={}\nrho={}\nQ={}\nvalid={}\n",
            report.p_n, report.rho_n, report.q_n, report.valid
        );
        if let Ok(ids) = identity_suite(&params) {
            for (name, ok) in ids {
                s.push_str(&format!("identity_{name}={ok}\n"));
            }
        }
        out_string(s, out)
    })
}
