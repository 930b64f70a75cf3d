//! C ABI for the nefmut library: opaque model handles, status codes, and
//! JSON-string payloads. Strings returned through out-parameters are owned
//! by this library and must be released with `nefmut_string_free`.
//!
//! Every entry point catches panics and converts them to a status code;
//! the most recent error message is retrievable with `nefmut_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nefmut::certificate::{self, Certificate};
use nefmut::engine::DEFAULT_SAMPLE_SEED;
use nefmut::error::Error;
use nefmut::mirror;
use nefmut::modelfile::{generate_builtin, ModelFile};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NefmutStatus {
    /// Success.
    Ok = 0,
    /// Malformed or invalid input (parse errors, validation failures,
    /// unknown names, wrong model for a certificate).
    InvalidInput = 1,
    /// An exact identity failed verification.
    VerificationFailed = 2,
    /// Internal consistency error.
    Internal = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A panic was caught at the boundary.
    Panic = 5,
}

/// Opaque handle to a parsed and validated model file.
#[repr(C)]
pub struct NefmutModel {
    _private: [u8; 0],
}

struct ModelInner {
    file: ModelFile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> NefmutStatus {
    match err.exit_code() {
        2 => NefmutStatus::VerificationFailed,
        3 => NefmutStatus::Internal,
        _ => NefmutStatus::InvalidInput,
    }
}

fn fail(err: Error) -> NefmutStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// # Safety
/// `ptr` must be null or a valid nul-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, NefmutStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(NefmutStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        NefmutStatus::InvalidInput
    })
}

fn write_string(out: *mut *mut c_char, text: String) -> NefmutStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_error("payload contains an interior nul byte");
            return NefmutStatus::Internal;
        }
    };
    unsafe {
        *out = c.into_raw();
    }
    NefmutStatus::Ok
}

fn guarded<F: FnOnce() -> NefmutStatus>(f: F) -> NefmutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(&msg);
            NefmutStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const NefmutModel) -> Result<&'a ModelInner, NefmutStatus> {
    if model.is_null() {
        set_error("null model handle");
        return Err(NefmutStatus::NullPointer);
    }
    Ok(&*(model as *const ModelInner))
}

/// Copy the most recent error message into `buf` (truncated to `cap`
/// bytes including the terminator). Returns the full message length.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null.
#[no_mangle]
pub unsafe extern "C" fn nefmut_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // always terminate
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Parse and validate a model-file JSON document into a handle.
///
/// # Safety
/// `json` must be a valid nul-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn nefmut_model_parse(
    json: *const c_char,
    out: *mut *mut NefmutModel,
) -> NefmutStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return NefmutStatus::NullPointer;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match ModelFile::parse(text) {
            Ok(f) => f,
            Err(e) => return fail(e),
        };
        let issues = file.validate();
        if !issues.is_empty() {
            return fail(Error::InvalidInput(issues.join("; ")));
        }
        let inner = Box::new(ModelInner { file });
        *out = Box::into_raw(inner) as *mut NefmutModel;
        NefmutStatus::Ok
    })
}

/// Release a model handle.
///
/// # Safety
/// `model` must have come from `nefmut_model_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nefmut_model_free(model: *mut NefmutModel) {
    if !model.is_null() {
        drop(Box::from_raw(model as *mut ModelInner));
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned through an out-parameter of this library
/// and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nefmut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Emit a built-in model as JSON, e.g. spec = "pn 3" or "product p1 p1".
///
/// # Safety
/// `spec` must be a valid nul-terminated string; `out_json` receives an
/// owned string on success.
#[no_mangle]
pub unsafe extern "C" fn nefmut_model_generate(
    spec: *const c_char,
    out_json: *mut *mut c_char,
) -> NefmutStatus {
    guarded(|| {
        if out_json.is_null() {
            set_error("null out pointer");
            return NefmutStatus::NullPointer;
        }
        let text = match read_str(spec) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut parts = text.split_whitespace();
        let Some(name) = parts.next() else {
            return fail(Error::InvalidInput("empty generator spec".into()));
        };
        let params: Vec<String> = parts.map(str::to_string).collect();
        match generate_builtin(name, &params) {
            Ok(file) => write_string(out_json, file.to_json_pretty()),
            Err(e) => fail(e),
        }
    })
}

/// Build and verify the map between two named partitions and return the
/// certificate JSON.
///
/// # Safety
/// All pointer arguments must be valid; `out_cert` receives an owned
/// string on success.
#[no_mangle]
pub unsafe extern "C" fn nefmut_equivalence(
    model: *const NefmutModel,
    first: *const c_char,
    second: *const c_char,
    seed: u64,
    out_cert: *mut *mut c_char,
) -> NefmutStatus {
    guarded(|| {
        let inner = match model_ref(model) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out_cert.is_null() {
            set_error("null out pointer");
            return NefmutStatus::NullPointer;
        }
        let (first, second) = match (read_str(first), read_str(second)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let seed = if seed == 0 { DEFAULT_SAMPLE_SEED } else { seed };
        match certificate::emit_equivalence(&inner.file, first, second, seed) {
            Ok((cert, _)) => {
                write_string(out_cert, Certificate::Equivalence(cert).to_json_pretty())
            }
            Err(e) => fail(e),
        }
    })
}

/// Extract a Laurent mirror; returns a JSON payload with the mirror in
/// canonical text form, the adapted basis, and the chain.
///
/// # Safety
/// All pointer arguments must be valid; `out_json` receives an owned
/// string on success.
#[no_mangle]
pub unsafe extern "C" fn nefmut_mirror(
    model: *const NefmutModel,
    partition: *const c_char,
    amenable: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> NefmutStatus {
    guarded(|| {
        let inner = match model_ref(model) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out_json.is_null() {
            set_error("null out pointer");
            return NefmutStatus::NullPointer;
        }
        let (pname, aname) = match (read_str(partition), read_str(amenable)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let seed = if seed == 0 { DEFAULT_SAMPLE_SEED } else { seed };
        let run = || -> Result<String, Error> {
            let m = inner.file.model()?;
            let p = inner.file.partition(pname)?;
            let a = inner.file.amenable_collection(aname)?;
            let result = mirror::extract_mirror(&m, &p, &a, seed)?;
            let payload = serde_json::json!({
                "partition": pname,
                "amenable": aname,
                "mirror": result.mirror.canonical_text(),
                "variables": result.mirror.n_vars(),
                "basis": result.basis.to_rows_i64(),
                "chain": certificate::steps_to_records(&result.chain.map),
            });
            Ok(serde_json::to_string_pretty(&payload).expect("payload json"))
        };
        match run() {
            Ok(text) => write_string(out_json, text),
            Err(e) => fail(e),
        }
    })
}

/// Build and verify a mirror-equivalence certificate between two
/// partitions with amenable data.
///
/// # Safety
/// All pointer arguments must be valid; `out_cert` receives an owned
/// string on success.
#[no_mangle]
pub unsafe extern "C" fn nefmut_mirror_equivalence(
    model: *const NefmutModel,
    first_partition: *const c_char,
    first_amenable: *const c_char,
    second_partition: *const c_char,
    second_amenable: *const c_char,
    seed: u64,
    out_cert: *mut *mut c_char,
) -> NefmutStatus {
    guarded(|| {
        let inner = match model_ref(model) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out_cert.is_null() {
            set_error("null out pointer");
            return NefmutStatus::NullPointer;
        }
        let names: Result<Vec<&str>, NefmutStatus> = [
            first_partition,
            first_amenable,
            second_partition,
            second_amenable,
        ]
        .into_iter()
        .map(|p| read_str(p))
        .collect();
        let names = match names {
            Ok(n) => n,
            Err(s) => return s,
        };
        let seed = if seed == 0 { DEFAULT_SAMPLE_SEED } else { seed };
        match certificate::emit_mirror(&inner.file, names[0], names[1], names[2], names[3], seed) {
            Ok((cert, _)) => write_string(out_cert, Certificate::Mirror(cert).to_json_pretty()),
            Err(e) => fail(e),
        }
    })
}

/// Independently replay a certificate (either kind) against a model.
/// Returns Ok only when every recomputed identity holds; a report is
/// written to `out_report` when non-null.
///
/// # Safety
/// All pointer arguments must be valid (`out_report` may be null).
#[no_mangle]
pub unsafe extern "C" fn nefmut_certify(
    model: *const NefmutModel,
    cert_json: *const c_char,
    out_report: *mut *mut c_char,
) -> NefmutStatus {
    guarded(|| {
        let inner = match model_ref(model) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let text = match read_str(cert_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let report = match Certificate::parse(text).and_then(|cert| match cert {
            Certificate::Equivalence(c) => certificate::verify_equivalence(&inner.file, &c),
            Certificate::Mirror(c) => certificate::verify_mirror(&inner.file, &c),
        }) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let lines: Vec<serde_json::Value> = report
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "passed": c.passed,
                })
            })
            .collect();
        let payload = serde_json::json!({
            "passed": report.all_passed(),
            "checks": lines,
            "failures": report.failures,
        });
        if !out_report.is_null() {
            let status = write_string(
                out_report,
                serde_json::to_string_pretty(&payload).expect("report json"),
            );
            if status != NefmutStatus::Ok {
                return status;
            }
        }
        if report.all_passed() {
            NefmutStatus::Ok
        } else {
            set_error(&format!(
                "verification failed: {}",
                report.failed_names().join(", ")
            ));
            NefmutStatus::VerificationFailed
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        nefmut_string_free(ptr);
        s
    }

    #[test]
    fn full_round_trip_through_the_c_abi() {
        unsafe {
            // generate
            let mut json: *mut c_char = ptr::null_mut();
            let spec = cstring("pn 3");
            assert_eq!(
                nefmut_model_generate(spec.as_ptr(), &mut json),
                NefmutStatus::Ok
            );
            let model_json = take_string(json);

            // parse
            let mut model: *mut NefmutModel = ptr::null_mut();
            let text = cstring(&model_json);
            assert_eq!(
                nefmut_model_parse(text.as_ptr(), &mut model),
                NefmutStatus::Ok
            );

            // equivalence certificate
            let mut cert: *mut c_char = ptr::null_mut();
            let a = cstring("a");
            let b = cstring("b");
            assert_eq!(
                nefmut_equivalence(model, a.as_ptr(), b.as_ptr(), 0, &mut cert),
                NefmutStatus::Ok
            );
            let cert_json = take_string(cert);

            // certify
            let cert_c = cstring(&cert_json);
            let mut report: *mut c_char = ptr::null_mut();
            assert_eq!(
                nefmut_certify(model, cert_c.as_ptr(), &mut report),
                NefmutStatus::Ok
            );
            let report_json = take_string(report);
            assert!(report_json.contains("\"passed\": true"));

            // tampered certificate fails with status 2
            let tampered = cert_json.replacen("1*", "5*", 1);
            assert_ne!(tampered, cert_json);
            let tampered_c = cstring(&tampered);
            assert_eq!(
                nefmut_certify(model, tampered_c.as_ptr(), ptr::null_mut()),
                NefmutStatus::VerificationFailed
            );

            nefmut_model_free(model);
        }
    }

    #[test]
    fn mirror_through_the_c_abi() {
        unsafe {
            let mut json: *mut c_char = ptr::null_mut();
            let spec = cstring("pn 4");
            assert_eq!(
                nefmut_model_generate(spec.as_ptr(), &mut json),
                NefmutStatus::Ok
            );
            let model_json = take_string(json);
            let mut model: *mut NefmutModel = ptr::null_mut();
            let text = cstring(&model_json);
            assert_eq!(
                nefmut_model_parse(text.as_ptr(), &mut model),
                NefmutStatus::Ok
            );

            let mut out: *mut c_char = ptr::null_mut();
            let p = cstring("cubic");
            let a = cstring("cubic-u");
            assert_eq!(
                nefmut_mirror(model, p.as_ptr(), a.as_ptr(), 0, &mut out),
                NefmutStatus::Ok
            );
            let payload = take_string(out);
            assert!(payload.contains("\"mirror\""));

            let mut cert: *mut c_char = ptr::null_mut();
            let p2 = cstring("cubic-alt");
            let a2 = cstring("cubic-alt-u");
            assert_eq!(
                nefmut_mirror_equivalence(
                    model,
                    p.as_ptr(),
                    a.as_ptr(),
                    p2.as_ptr(),
                    a2.as_ptr(),
                    0,
                    &mut cert
                ),
                NefmutStatus::Ok
            );
            let cert_json = take_string(cert);
            let cert_c = cstring(&cert_json);
            assert_eq!(
                nefmut_certify(model, cert_c.as_ptr(), ptr::null_mut()),
                NefmutStatus::Ok
            );
            nefmut_model_free(model);
        }
    }

    #[test]
    fn error_paths_set_status_and_message() {
        unsafe {
            let mut model: *mut NefmutModel = ptr::null_mut();
            assert_eq!(
                nefmut_model_parse(ptr::null(), &mut model),
                NefmutStatus::NullPointer
            );

            let bad = cstring("{not json");
            assert_eq!(
                nefmut_model_parse(bad.as_ptr(), &mut model),
                NefmutStatus::InvalidInput
            );
            let mut buf = vec![0i8; 256];
            let len = nefmut_last_error(buf.as_mut_ptr() as *mut c_char, buf.len());
            assert!(len > 0);

            let mut out: *mut c_char = ptr::null_mut();
            let spec = cstring("pn 0");
            assert_eq!(
                nefmut_model_generate(spec.as_ptr(), &mut out),
                NefmutStatus::InvalidInput
            );
        }
    }
}
