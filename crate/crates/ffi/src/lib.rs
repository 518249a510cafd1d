//! C ABI over `fneighbors`.
//!
//! Objects are opaque handles created by constructors that write through an
//! out-pointer and released by the matching `fn_*_free`.
//! Every fallible call returns an `FnStatus`; on failure
//! `fn_last_error()` describes the most recent error on the calling thread.
//! Panics never cross the boundary: they come back as `FN_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fneighbors::cover::{certify_cover, CoverClass};
use fneighbors::domains::{
    cube_boundary_cover, regular_triangulation_cover, sample_sphere, simplex_boundary_cover, CoverAssignment,
    DomainKind, SampledDomain, SamplingScheme,
};
use fneighbors::geom::{thm2_bound, PointCloud};
use fneighbors::maps::{evaluate, ImageSet, MapSpec};
use fneighbors::neighbors::{compute_df, neighbor_graph, pair_is_neighbor_fast, NeighborCertificate, Verdict};
use fneighbors::{Error, Tolerances};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Degenerate = 4,
    CoverDegenerate = 5,
    Undersampled = 6,
    NoWitness = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnVerdict {
    Yes = 0,
    No = 1,
    Uncertain = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnCoverClass {
    NonNullHomotopic = 0,
    NullHomotopic = 1,
    Inconclusive = 2,
}

/// A sampled domain.
pub struct FnDomain(SampledDomain);

/// Images of a domain's samples under a map.
pub struct FnImages(ImageSet);

/// Certified neighbor sets of an image set.
pub struct FnGraph(Vec<NeighborCertificate>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FnStatus {
    match e {
        Error::Invalid(_) | Error::FamilyMismatch { .. } | Error::Arity { .. } | Error::Json(_) => {
            FnStatus::InvalidArgument
        }
        Error::OutOfRange(_) | Error::ScaleGuard(_) => FnStatus::OutOfRange,
        Error::Degenerate(_) | Error::NotInHemisphere => FnStatus::Degenerate,
        Error::CoverDegenerate(_) | Error::InteriorHit(_) => FnStatus::CoverDegenerate,
        Error::Undersampled(_) => FnStatus::Undersampled,
        Error::NoWitnessFound { .. } => FnStatus::NoWitness,
        Error::Io(_) => FnStatus::Internal,
    }
}

struct Fail(FnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FnStatus::NullArgument, format!("`{what}` is null"))
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FnStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            FnStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// √((n+2)/n).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_thm2_bound(n: usize, out: *mut f64) -> FnStatus {
    guard(|| put(out, thm2_bound(n)?, "out"))
}

/// Quasi-uniform sample of Sⁿ with `samples` points.
///
/// # Safety
/// `out` must be valid for writes; the handle is released with `fn_domain_free`.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_sphere(n: usize, samples: usize, seed: u64, out: *mut *mut FnDomain) -> FnStatus {
    guard(|| {
        let d = sample_sphere(n, samples, seed, SamplingScheme::QuasiUniform)?;
        put(out, Box::into_raw(Box::new(FnDomain(d))), "out")
    })
}

/// Lattice sample of ∂[0,1]ᵐ with at least `samples` points.
///
/// # Safety
/// As for `fn_domain_sphere`.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_cube(m: usize, samples: usize, out: *mut *mut FnDomain) -> FnStatus {
    guard(|| {
        let (d, _, _) = cube_boundary_cover(m, samples)?;
        put(out, Box::into_raw(Box::new(FnDomain(d))), "out")
    })
}

/// # Safety
/// `domain` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_len(domain: *const FnDomain) -> usize {
    domain.as_ref().map_or(0, |d| d.0.len())
}

/// Ambient dimension of the samples.
///
/// # Safety
/// `domain` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_dim(domain: *const FnDomain) -> usize {
    domain.as_ref().map_or(0, |d| d.0.kind().ambient_dim())
}

/// Copy sample `index` into `coords` (capacity `cap` ≥ dimension).
///
/// # Safety
/// `domain` must be a live handle, `coords` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_sample(
    domain: *const FnDomain,
    index: usize,
    coords: *mut f64,
    cap: usize,
) -> FnStatus {
    guard(|| {
        let d = &deref(domain, "domain")?.0;
        if index >= d.len() {
            return Err(Fail(FnStatus::OutOfRange, format!("sample {index} of {}", d.len())));
        }
        let p = d.sample(index);
        if coords.is_null() {
            return Err(null("coords"));
        }
        if cap < p.len() {
            return Err(Fail(
                FnStatus::OutOfRange,
                format!("capacity {cap} below dimension {}", p.len()),
            ));
        }
        std::slice::from_raw_parts_mut(coords, p.len()).copy_from_slice(p);
        Ok(())
    })
}

/// # Safety
/// `domain` must come from a constructor and not be used afterwards; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn fn_domain_free(domain: *mut FnDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Evaluate a map given as JSON (`{"family": …, "m_out": …, "params": […]}`).
///
/// # Safety
/// `domain` must be a live handle, `map_json` a NUL-terminated string and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_images_evaluate(
    domain: *const FnDomain,
    map_json: *const c_char,
    out: *mut *mut FnImages,
) -> FnStatus {
    guard(|| {
        let d = &deref(domain, "domain")?.0;
        if map_json.is_null() {
            return Err(null("map_json"));
        }
        let text = CStr::from_ptr(map_json)
            .to_str()
            .map_err(|e| Fail(FnStatus::InvalidArgument, format!("map JSON is not UTF-8: {e}")))?;
        let spec: MapSpec = serde_json::from_str(text).map_err(Error::from)?;
        let spec = MapSpec::new(spec.family, spec.m_out, spec.params)?;
        let img = evaluate(&spec, d)?;
        put(out, Box::into_raw(Box::new(FnImages(img))), "out")
    })
}

/// Image set from `count` row-major points of dimension `dim`.
///
/// # Safety
/// `data` must be valid for `count · dim` reads and `out` for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_images_from_flat(
    data: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut FnImages,
) -> FnStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = count
            .checked_mul(dim)
            .ok_or_else(|| Fail(FnStatus::OutOfRange, "count · dim overflows".into()))?;
        let flat = std::slice::from_raw_parts(data, len).to_vec();
        let cloud = PointCloud::from_flat(dim, flat)?;
        put(out, Box::into_raw(Box::new(FnImages(ImageSet::new(cloud)))), "out")
    })
}

/// # Safety
/// `images` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fn_images_len(images: *const FnImages) -> usize {
    images.as_ref().map_or(0, |i| i.0.len())
}

/// # Safety
/// `images` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fn_images_dim(images: *const FnImages) -> usize {
    images.as_ref().map_or(0, |i| i.0.dim())
}

/// # Safety
/// As for `fn_domain_free`.
#[no_mangle]
pub unsafe extern "C" fn fn_images_free(images: *mut FnImages) {
    if !images.is_null() {
        drop(Box::from_raw(images));
    }
}

/// Whether samples `a` and `b` are neighbors, with default tolerances.
///
/// # Safety
/// `images` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_pair_is_neighbor(
    images: *const FnImages,
    a: usize,
    b: usize,
    out: *mut FnVerdict,
) -> FnStatus {
    guard(|| {
        let img = &deref(images, "images")?.0;
        if a >= img.len() || b >= img.len() || a == b {
            return Err(Fail(
                FnStatus::OutOfRange,
                format!("pair ({a}, {b}) of {} images", img.len()),
            ));
        }
        let v = match pair_is_neighbor_fast(a, b, img, None, &Tolerances::default()).0 {
            Verdict::Yes => FnVerdict::Yes,
            Verdict::No => FnVerdict::No,
            Verdict::Uncertain => FnVerdict::Uncertain,
        };
        put(out, v, "out")
    })
}

/// Certified neighbor sets of `images` (which must be aligned with `domain`).
///
/// # Safety
/// Both handles must be live and `out` valid for writes; release the graph
/// with `fn_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn fn_graph_build(
    images: *const FnImages,
    domain: *const FnDomain,
    out: *mut *mut FnGraph,
) -> FnStatus {
    guard(|| {
        let img = &deref(images, "images")?.0;
        let d = &deref(domain, "domain")?.0;
        let certs = neighbor_graph(img, d, &Tolerances::default())?;
        put(out, Box::into_raw(Box::new(FnGraph(certs))), "out")
    })
}

/// Number of certificates.
///
/// # Safety
/// `graph` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fn_graph_len(graph: *const FnGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.len())
}

/// Largest intrinsic distance between certified neighbors.
///
/// # Safety
/// `graph` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_graph_df(graph: *const FnGraph, out: *mut f64) -> FnStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        put(out, compute_df(g), "out")
    })
}

/// Sample indices of certificate `k`: writes up to `cap` of them to
/// `indices` and the full count to `count`.
///
/// # Safety
/// `graph` must be live, `indices` valid for `cap` writes (may be NULL when
/// `cap` is 0), `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_graph_certificate(
    graph: *const FnGraph,
    k: usize,
    indices: *mut usize,
    cap: usize,
    count: *mut usize,
) -> FnStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        let c = g
            .get(k)
            .ok_or_else(|| Fail(FnStatus::OutOfRange, format!("certificate {k} of {}", g.len())))?;
        let n = c.indices.len().min(cap);
        if n > 0 {
            if indices.is_null() {
                return Err(null("indices"));
            }
            std::slice::from_raw_parts_mut(indices, n).copy_from_slice(&c.indices[..n]);
        }
        put(count, c.indices.len(), "count")
    })
}

/// # Safety
/// As for `fn_domain_free`.
#[no_mangle]
pub unsafe extern "C" fn fn_graph_free(graph: *mut FnGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Classify the domain's standard cover (regular triangulation on spheres,
/// facets on simplex and cube boundaries) by the degree of its
/// partition-of-unity map. `degree` is meaningful unless the class is
/// inconclusive.
///
/// # Safety
/// `domain` must be live; the out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fn_cover_degree(
    domain: *const FnDomain,
    class: *mut FnCoverClass,
    degree: *mut i64,
    confidence: *mut f64,
) -> FnStatus {
    guard(|| {
        let d = &deref(domain, "domain")?.0;
        let cover: CoverAssignment = match d.kind() {
            DomainKind::Sphere(_) => regular_triangulation_cover(d)?,
            DomainKind::SimplexBoundary(n) => simplex_boundary_cover(n, d.len())?.1,
            DomainKind::CubeBoundary(m) => cube_boundary_cover(m, d.len())?.1,
        };
        let cert = certify_cover(d, &cover, None)?;
        let est = cert.runs.first().and_then(|r| r.estimate.clone());
        put(
            class,
            match cert.class {
                CoverClass::NonNullHomotopic => FnCoverClass::NonNullHomotopic,
                CoverClass::NullHomotopic => FnCoverClass::NullHomotopic,
                CoverClass::Inconclusive => FnCoverClass::Inconclusive,
            },
            "class",
        )?;
        put(degree, est.as_ref().map_or(0, |e| e.degree), "degree")?;
        put(confidence, est.map_or(0.0, |e| e.confidence), "confidence")
    })
}
