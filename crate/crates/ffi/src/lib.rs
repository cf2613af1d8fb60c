//! C ABI for the holoconvex library.
//!
//! Handles are opaque: construct them with `hx_domain_new` /
//! `hx_mapping_from_json`, pass them around by pointer, release them with the
//! matching `_free`. Complex vectors cross the boundary as interleaved
//! `re, im` doubles of length `2 * n`. Report-producing entry points return a
//! JSON document (same schema as the command-line tool) that must be released
//! with `hx_string_free`.
//!
//! Every function returns an `HxStatus`; `HX_STATUS_OK` is zero.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use holoconvex::config::{DomainConfig, MappingConfig};
use holoconvex::falsifier::SearchConfig;
use holoconvex::numerics::ComplexVector;
use holoconvex::report::Report;
use holoconvex::{criterion, falsifier, geometry, hypotheses, Error};

use holoconvex::geometry::DomainSpec;
use holoconvex::mappings::MappingSpec;

/// Result codes of every C entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    DimensionMismatch = 4,
    SingularMatrix = 5,
    NonFiniteInput = 6,
    ZeroPoint = 7,
    DegenerateConstraint = 8,
    SingularJacobian = 9,
    StepTooLarge = 10,
    ShapeMismatch = 11,
    ParamOutOfRange = 12,
    AllSamplesSingular = 13,
    UnsupportedExponent = 14,
    InternalError = 15,
}

fn status_of(err: &Error) -> HxStatus {
    match err {
        Error::DimensionMismatch { .. } => HxStatus::DimensionMismatch,
        Error::SingularMatrix { .. } => HxStatus::SingularMatrix,
        Error::NonFiniteInput => HxStatus::NonFiniteInput,
        Error::ZeroPoint => HxStatus::ZeroPoint,
        Error::DegenerateConstraint { .. } => HxStatus::DegenerateConstraint,
        Error::SingularJacobian => HxStatus::SingularJacobian,
        Error::StepTooLarge { .. } => HxStatus::StepTooLarge,
        Error::ShapeMismatch(_) => HxStatus::ShapeMismatch,
        Error::ParamOutOfRange(_) => HxStatus::ParamOutOfRange,
        Error::AllSamplesSingular => HxStatus::AllSamplesSingular,
        Error::UnsupportedExponent { .. } => HxStatus::UnsupportedExponent,
        Error::InvalidDomain(_) | Error::InvalidMapping(_) | Error::InvalidConfig(_) => {
            HxStatus::InvalidConfig
        }
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hx_status_message(status: HxStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        HxStatus::Ok => b"ok\0",
        HxStatus::NullPointer => b"null pointer argument\0",
        HxStatus::InvalidArgument => b"invalid argument\0",
        HxStatus::InvalidConfig => b"invalid configuration\0",
        HxStatus::DimensionMismatch => b"dimension mismatch\0",
        HxStatus::SingularMatrix => b"matrix singular to working precision\0",
        HxStatus::NonFiniteInput => b"non-finite input\0",
        HxStatus::ZeroPoint => b"operation undefined at z = 0\0",
        HxStatus::DegenerateConstraint => b"tangency constraint degenerate\0",
        HxStatus::SingularJacobian => b"Jacobian singular at the evaluation point\0",
        HxStatus::StepTooLarge => b"finite-difference step exceeds the boundary margin\0",
        HxStatus::ShapeMismatch => b"mapping shape does not match the checker\0",
        HxStatus::ParamOutOfRange => b"parameter out of range\0",
        HxStatus::AllSamplesSingular => b"every sampled point had a singular Jacobian\0",
        HxStatus::UnsupportedExponent => b"exponent violates the p_j >= 2 hypothesis\0",
        HxStatus::InternalError => b"internal error\0",
    };
    text.as_ptr() as *const c_char
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn hx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque domain handle.
pub struct HxDomain {
    inner: DomainSpec,
}

/// Opaque mapping handle.
pub struct HxMapping {
    spec: MappingSpec,
    config: MappingConfig,
}

unsafe fn slice_from<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn vector_from(ptr: *const f64, n: usize) -> Option<ComplexVector> {
    let raw = slice_from(ptr, 2 * n)?;
    Some(
        (0..n)
            .map(|i| holoconvex::numerics::Complex64::new(raw[2 * i], raw[2 * i + 1]))
            .collect(),
    )
}

fn emit_json(report: Report, out_json: *mut *mut c_char) -> HxStatus {
    let text = report.to_json();
    match CString::new(text) {
        Ok(cstr) => {
            unsafe { *out_json = cstr.into_raw() };
            HxStatus::Ok
        }
        Err(_) => HxStatus::InternalError,
    }
}

/// Creates a domain from `n` exponents (each > 1).
///
/// # Safety
/// `p` must point to `n` readable doubles; `out` must be a valid location for
/// one pointer. The handle must be released with `hx_domain_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_domain_new(
    p: *const f64,
    n: usize,
    out: *mut *mut HxDomain,
) -> HxStatus {
    if out.is_null() {
        return HxStatus::NullPointer;
    }
    let Some(exponents) = slice_from(p, n) else {
        return HxStatus::NullPointer;
    };
    match DomainSpec::new(exponents.to_vec()) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HxDomain { inner }));
            HxStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `domain` must come from `hx_domain_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hx_domain_free(domain: *mut HxDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Parses a mapping from the same JSON object the CLI configuration uses
/// (`{"family": "...", ...}`) and instantiates it at dimension `n`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// location for one pointer. The handle must be released with
/// `hx_mapping_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_mapping_from_json(
    json: *const c_char,
    n: usize,
    out: *mut *mut HxMapping,
) -> HxStatus {
    if json.is_null() || out.is_null() {
        return HxStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return HxStatus::InvalidArgument;
    };
    let config = match MappingConfig::from_json(text) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    match config.to_spec(n) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(HxMapping { spec, config }));
            HxStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `mapping` must come from `hx_mapping_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hx_mapping_free(mapping: *mut HxMapping) {
    if !mapping.is_null() {
        drop(Box::from_raw(mapping));
    }
}

/// Minkowski functional at the interleaved point `z` (length `2 * n`).
///
/// # Safety
/// Pointer arguments must be valid for the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn hx_minkowski(
    domain: *const HxDomain,
    z: *const f64,
    n: usize,
    out_rho: *mut f64,
    out_residual: *mut f64,
) -> HxStatus {
    if domain.is_null() || out_rho.is_null() || out_residual.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let Some(point) = vector_from(z, n) else {
        return HxStatus::NullPointer;
    };
    match geometry::minkowski(dom, &point) {
        Ok(r) => {
            *out_rho = r.rho;
            *out_residual = r.residual;
            HxStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Conjugate-coordinate gradient of the Minkowski functional; `out` receives
/// `2 * n` interleaved doubles.
///
/// # Safety
/// Pointer arguments must be valid for the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn hx_rho_gradient(
    domain: *const HxDomain,
    z: *const f64,
    n: usize,
    out: *mut f64,
) -> HxStatus {
    if domain.is_null() || out.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let Some(point) = vector_from(z, n) else {
        return HxStatus::NullPointer;
    };
    match geometry::rho_bar_gradient(dom, &point) {
        Ok(grad) => {
            let dst = std::slice::from_raw_parts_mut(out, 2 * n);
            for (i, g) in grad.iter().enumerate() {
                dst[2 * i] = g.re;
                dst[2 * i + 1] = g.im;
            }
            HxStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Evaluates `J_f(z, b)`; also reports the tangency functional at `b`.
///
/// # Safety
/// Pointer arguments must be valid for the documented lengths.
#[no_mangle]
pub unsafe extern "C" fn hx_evaluate_j(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    z: *const f64,
    b: *const f64,
    n: usize,
    out_j: *mut f64,
    out_residual: *mut f64,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() || out_j.is_null() || out_residual.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &(*mapping).spec;
    let (Some(zv), Some(bv)) = (vector_from(z, n), vector_from(b, n)) else {
        return HxStatus::NullPointer;
    };
    match criterion::evaluate_j(dom, map, &zv, &bv) {
        Ok(eval) => {
            *out_j = eval.j_value;
            *out_residual = eval.constraint_residual;
            HxStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

fn domain_echo(dom: &DomainSpec) -> DomainConfig {
    DomainConfig {
        p: dom.exponents().to_vec(),
    }
}

unsafe fn guarded_report<F>(out_json: *mut *mut c_char, f: F) -> HxStatus
where
    F: FnOnce() -> Result<Report, Error>,
{
    if out_json.is_null() {
        return HxStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(report)) => emit_json(report, out_json),
        Ok(Err(e)) => status_of(&e),
        Err(_) => HxStatus::InternalError,
    }
}

/// Monte-Carlo scan; on success `*out_json` receives the report document.
///
/// # Safety
/// Handles must be live; `out_json` must be a valid location for one pointer.
/// Free the returned string with `hx_string_free`.
#[no_mangle]
pub unsafe extern "C" fn hx_scan_json(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    samples: usize,
    seed: u64,
    rho_floor: f64,
    tol: f64,
    threads: usize,
    out_json: *mut *mut c_char,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &*mapping;
    guarded_report(out_json, || {
        let scan = criterion::scan(dom, &map.spec, samples, seed, rho_floor, tol, threads)?;
        Ok(Report::for_scan(
            domain_echo(dom),
            map.config.clone(),
            &scan,
        ))
    })
}

/// Checks condition system 1-4. `coupling` selects the coupled coordinate for
/// system 3 (1-based; pass 0 for the default, the last coordinate).
///
/// # Safety
/// As for `hx_scan_json`.
#[no_mangle]
pub unsafe extern "C" fn hx_check_json(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    theorem: u32,
    coupling: usize,
    samples: usize,
    seed: u64,
    threads: usize,
    out_json: *mut *mut c_char,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &*mapping;
    guarded_report(out_json, || {
        let check = match theorem {
            1 => hypotheses::check_theorem1(dom, &map.spec, samples, seed, threads)?,
            2 => hypotheses::check_theorem2(dom, &map.spec, samples, seed, threads)?,
            3 => {
                let k = if coupling == 0 { dom.n() } else { coupling };
                hypotheses::check_theorem3(dom, &map.spec, k, samples, seed, threads)?
            }
            4 => {
                let p = dom.exponents();
                if p.len() != 2 || p[0] != p[1] {
                    return Err(Error::InvalidConfig(
                        "system 4 needs a two-dimensional equal-exponent ball".into(),
                    ));
                }
                dom.require_criterion_exponents()?;
                hypotheses::check_theorem4(&map.spec)?
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown condition system {theorem}"
                )))
            }
        };
        Ok(Report::for_check(
            "check",
            domain_echo(dom),
            map.config.clone(),
            &check,
        ))
    })
}

/// Validates the coefficient bounds of example family 1-4.
///
/// # Safety
/// As for `hx_scan_json`.
#[no_mangle]
pub unsafe extern "C" fn hx_validate_example_json(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    which: u32,
    out_json: *mut *mut c_char,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &*mapping;
    guarded_report(out_json, || {
        let check = match which {
            1 => hypotheses::validate_example1(dom, &map.spec)?,
            2 => hypotheses::validate_example2(dom, &map.spec)?,
            3 => hypotheses::validate_example3(dom, &map.spec)?,
            4 => hypotheses::validate_example4(dom, &map.spec)?,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown example family {which}"
                )))
            }
        };
        Ok(Report::for_check(
            "validate-example",
            domain_echo(dom),
            map.config.clone(),
            &check,
        ))
    })
}

/// Multi-start search for criterion violations.
///
/// # Safety
/// As for `hx_scan_json`.
#[no_mangle]
pub unsafe extern "C" fn hx_falsify_json(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    restarts: usize,
    iterations: usize,
    seed: u64,
    rho_floor: f64,
    rho_ceiling: f64,
    tol: f64,
    threads: usize,
    out_json: *mut *mut c_char,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &*mapping;
    guarded_report(out_json, || {
        let cfg = SearchConfig {
            restarts,
            iterations,
            seed,
            rho_floor,
            rho_ceiling,
            simplex_tol: 1e-10,
            threads,
        };
        let result = falsifier::minimize_j(dom, &map.spec, &cfg)?;
        Ok(Report::for_falsify(
            domain_echo(dom),
            map.config.clone(),
            seed,
            tol,
            &result,
        ))
    })
}

/// Scan plus warm-started search with a shared budget (>= 1000).
///
/// # Safety
/// As for `hx_scan_json`.
#[no_mangle]
pub unsafe extern "C" fn hx_certify_json(
    domain: *const HxDomain,
    mapping: *const HxMapping,
    budget: usize,
    seed: u64,
    rho_floor: f64,
    tol: f64,
    threads: usize,
    out_json: *mut *mut c_char,
) -> HxStatus {
    if domain.is_null() || mapping.is_null() {
        return HxStatus::NullPointer;
    }
    let dom = &(*domain).inner;
    let map = &*mapping;
    guarded_report(out_json, || {
        let campaign =
            falsifier::certify_campaign(dom, &map.spec, budget, seed, rho_floor, tol, threads)?;
        Ok(Report::for_certify(
            domain_echo(dom),
            map.config.clone(),
            seed,
            &campaign,
        ))
    })
}

/// Releases a string returned by a `_json` entry point.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn hx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
