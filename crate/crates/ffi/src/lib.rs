//! C ABI over `bsfill-core`.
//!
//! Every fallible function returns a [`BsfStatus`]; on failure the message is
//! kept per thread and can be fetched with [`bsf_last_error_message`].
//! Objects are opaque handles released with their `_free` function. Matrices
//! are passed row-major as separate real and imaginary arrays.
//!
//! Pointer arguments must be null or valid for the documented length; handles
//! must come from this library and be freed once. Null is always checked.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use bsfill_core::filling::{fit_curves, run_experiment, ExperimentMode, ExperimentPlan, FitFingerprint, UnitarySource};
use bsfill_core::io::{self, SampleFormat};
use bsfill_core::math::{haar_random_unitary, permanent, OutcomeSpace, UnitaryMatrix};
use bsfill_core::samplers::{InputState, SampleSet, Sampler, SamplerKind};
use bsfill_core::validator::{auto_separation, Dimensionality};
use bsfill_core::wfn::{build_graph, degree_stats};
use bsfill_core::Error;
use ndarray::Array2;
use num_complex::Complex64;

/// Opaque interferometer matrix.
pub struct BsfUnitary(UnitaryMatrix);

/// Opaque set of distinct samples.
pub struct BsfSampleSet(SampleSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    NotUnitary = 4,
    Starvation = 5,
    Parse = 6,
    Io = 7,
    Mismatch = 8,
    Numeric = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsfSampler {
    Boson = 0,
    Distinguishable = 1,
    MeanField = 2,
    Uniform = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsfSampleFormat {
    Occupation = 0,
    ModeList = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BsfDegreeStats {
    pub n_samples: usize,
    pub mu: f64,
    pub sigma: f64,
}

/// Filling experiment with the default checkpoint grid.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BsfPlan {
    pub modes: usize,
    pub photons: u32,
    pub sampler: BsfSampler,
    /// Nonzero: fresh Haar unitary per iteration; the unitary argument is ignored.
    pub varied_unitary: u8,
    pub iterations: usize,
    pub n_max: usize,
    pub radius: u32,
    pub seed: u64,
    pub collision_free: u8,
}

/// `(alpha_mu, alpha_sigma, beta_sigma)` with their errors.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BsfFingerprint {
    pub modes: usize,
    pub photons: u32,
    pub radius: u32,
    pub values: [f64; 3],
    pub errors: [f64; 3],
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn status_of(e: &Error) -> BsfStatus {
    match e {
        Error::Capacity { .. } | Error::Overflow(_) => BsfStatus::Capacity,
        Error::NotUnitary { .. } | Error::NotSquare { .. } => BsfStatus::NotUnitary,
        Error::Starvation { .. } => BsfStatus::Starvation,
        Error::Parse { .. } | Error::Config { .. } => BsfStatus::Parse,
        Error::Io { .. } => BsfStatus::Io,
        Error::MetadataMismatch(_) | Error::TotalMismatch { .. } | Error::LengthMismatch { .. } => BsfStatus::Mismatch,
        Error::Underdetermined { .. } | Error::EmptyGraph | Error::NoSeparation { .. } => BsfStatus::Numeric,
        Error::InvalidOccupation(_) | Error::InvalidPlan(_) | Error::InvalidArgument(_) => BsfStatus::InvalidArgument,
    }
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (BsfStatus, String)>) -> BsfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BsfStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BsfStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (BsfStatus, String)>;
}

impl<T> IntoFfi<T> for Result<T, Error> {
    fn ffi(self) -> Result<T, (BsfStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (BsfStatus, String) {
    (BsfStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> (BsfStatus, String) {
    (BsfStatus::InvalidArgument, message.into())
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, (BsfStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not UTF-8"))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_ptr<T>(out: *mut T, value: T) -> Result<(), (BsfStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn complex_matrix(k: usize, re: *const f64, im: *const f64) -> Result<Array2<Complex64>, (BsfStatus, String)> {
    if k == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    if re.is_null() || im.is_null() {
        return Err(null("matrix data"));
    }
    let len = k.checked_mul(k).ok_or_else(|| invalid("matrix dimension overflows"))?;
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    Ok(Array2::from_shape_fn((k, k), |(r, c)| Complex64::new(re[r * k + c], im[r * k + c])))
}

fn sampler_kind(s: BsfSampler) -> SamplerKind {
    match s {
        BsfSampler::Boson => SamplerKind::Boson,
        BsfSampler::Distinguishable => SamplerKind::Distinguishable,
        BsfSampler::MeanField => SamplerKind::MeanField,
        BsfSampler::Uniform => SamplerKind::Uniform,
    }
}

fn to_ffi_fingerprint(f: &FitFingerprint) -> BsfFingerprint {
    BsfFingerprint { modes: f.modes, photons: f.photons, radius: f.radius, values: f.values, errors: f.errors }
}

fn from_ffi_fingerprint(f: &BsfFingerprint, label: &str) -> FitFingerprint {
    FitFingerprint {
        label: label.into(),
        mode: ExperimentMode::FixedU,
        modes: f.modes,
        photons: f.photons,
        radius: f.radius,
        values: f.values,
        errors: f.errors,
    }
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to `len`) into `buf` and returns the full message length without the NUL.
/// Pass a null `buf` to query the length.
#[no_mangle]
pub unsafe extern "C" fn bsf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Haar-random `m x m` unitary, deterministic in `seed`.
#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_haar(m: usize, seed: u64, out: *mut *mut BsfUnitary) -> BsfStatus {
    guard(|| {
        let u = haar_random_unitary(m, seed).ffi()?;
        out_ptr(out, Box::into_raw(Box::new(BsfUnitary(u))))
    })
}

/// Unitary from `m * m` row-major entries; fails if not unitary.
#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_from_entries(
    m: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut BsfUnitary,
) -> BsfStatus {
    guard(|| {
        if m == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let u = UnitaryMatrix::new(complex_matrix(m, re, im)?).ffi()?;
        out_ptr(out, Box::into_raw(Box::new(BsfUnitary(u))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_read(path: *const c_char, out: *mut *mut BsfUnitary) -> BsfStatus {
    guard(|| {
        let u = io::read_unitary(&path_arg(path)?).ffi()?;
        out_ptr(out, Box::into_raw(Box::new(BsfUnitary(u))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_write(u: *const BsfUnitary, path: *const c_char) -> BsfStatus {
    guard(|| {
        let u = u.as_ref().ok_or_else(|| null("unitary"))?;
        io::write_unitary(&path_arg(path)?, &u.0).ffi()
    })
}

/// Dimension of `u`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_dim(u: *const BsfUnitary) -> usize {
    u.as_ref().map_or(0, |u| u.0.dim())
}

#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_entry(
    u: *const BsfUnitary,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> BsfStatus {
    guard(|| {
        let u = u.as_ref().ok_or_else(|| null("unitary"))?;
        if row >= u.0.dim() || col >= u.0.dim() {
            return Err(invalid(format!("index ({row}, {col}) outside {0}x{0}", u.0.dim())));
        }
        let z = u.0.get(row, col);
        out_ptr(re, z.re)?;
        out_ptr(im, z.im)
    })
}

#[no_mangle]
pub unsafe extern "C" fn bsf_unitary_free(u: *mut BsfUnitary) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Permanent of a `k x k` row-major complex matrix.
#[no_mangle]
pub unsafe extern "C" fn bsf_permanent(
    k: usize,
    re: *const f64,
    im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BsfStatus {
    guard(|| {
        let p = permanent(&complex_matrix(k, re, im)?).ffi()?;
        out_ptr(out_re, p.re)?;
        out_ptr(out_im, p.im)
    })
}

/// Number of `n`-photon occupation lists over `m` modes.
#[no_mangle]
pub unsafe extern "C" fn bsf_outcome_count(m: usize, n: u32, out: *mut u64) -> BsfStatus {
    guard(|| {
        let size = OutcomeSpace::new(m, n).ffi()?.size();
        let size = u64::try_from(size).map_err(|_| (BsfStatus::Capacity, format!("{size} does not fit in 64 bits")))?;
        out_ptr(out, size)
    })
}

/// `count` distinct samples from the first `n` modes occupied. `u` may be
/// null for the uniform sampler.
#[no_mangle]
pub unsafe extern "C" fn bsf_sample(
    sampler: BsfSampler,
    u: *const BsfUnitary,
    m: usize,
    n: u32,
    count: usize,
    seed: u64,
    collision_free: u8,
    out: *mut *mut BsfSampleSet,
) -> BsfStatus {
    guard(|| {
        let kind = sampler_kind(sampler);
        let lambda = u.as_ref().map(|u| &u.0);
        if kind.needs_unitary() && lambda.is_none() {
            return Err(null("unitary"));
        }
        let set = Sampler::prepare(kind, lambda, &InputState::new(m, n).ffi()?)
            .ffi()?
            .collect(count, seed, collision_free != 0)
            .ffi()?;
        out_ptr(out, Box::into_raw(Box::new(BsfSampleSet(set))))
    })
}

/// Reads a sample file; `duplicates` (nullable) receives the dropped count.
#[no_mangle]
pub unsafe extern "C" fn bsf_samples_read(
    path: *const c_char,
    format: BsfSampleFormat,
    m: usize,
    n: u32,
    out: *mut *mut BsfSampleSet,
    duplicates: *mut usize,
) -> BsfStatus {
    guard(|| {
        let format = match format {
            BsfSampleFormat::Occupation => SampleFormat::Occupation,
            BsfSampleFormat::ModeList => SampleFormat::ModeList,
        };
        let (set, report) = io::ingest_samples(&path_arg(path)?, format, m, n).ffi()?;
        if !duplicates.is_null() {
            duplicates.write(report.duplicates);
        }
        out_ptr(out, Box::into_raw(Box::new(BsfSampleSet(set))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bsf_samples_write(set: *const BsfSampleSet, path: *const c_char, format: BsfSampleFormat) -> BsfStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("sample set"))?;
        let format = match format {
            BsfSampleFormat::Occupation => SampleFormat::Occupation,
            BsfSampleFormat::ModeList => SampleFormat::ModeList,
        };
        io::write_samples(&path_arg(path)?, &set.0, format, &[]).ffi()
    })
}

/// Number of samples, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn bsf_samples_len(set: *const BsfSampleSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Mode count of every sample, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn bsf_samples_modes(set: *const BsfSampleSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.meta().modes)
}

/// Copies sample `index` into `counts`, which must hold `len >= modes` entries.
#[no_mangle]
pub unsafe extern "C" fn bsf_samples_get(
    set: *const BsfSampleSet,
    index: usize,
    counts: *mut u32,
    len: usize,
) -> BsfStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("sample set"))?;
        let s = set.0.samples().get(index).ok_or_else(|| invalid(format!("index {index} out of range")))?;
        if counts.is_null() {
            return Err(null("counts"));
        }
        if len < s.counts().len() {
            return Err(invalid(format!("buffer holds {len} entries, need {}", s.counts().len())));
        }
        ptr::copy_nonoverlapping(s.counts().as_ptr(), counts, s.counts().len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn bsf_samples_free(set: *mut BsfSampleSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Degree mean and population standard deviation of the radius-`radius` network.
#[no_mangle]
pub unsafe extern "C" fn bsf_degree_stats(set: *const BsfSampleSet, radius: u32, out: *mut BsfDegreeStats) -> BsfStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("sample set"))?;
        let stats = degree_stats(&build_graph(&set.0, radius).ffi()?).ffi()?;
        out_ptr(out, BsfDegreeStats { n_samples: stats.n_samples, mu: stats.mu, sigma: stats.sigma })
    })
}

/// Runs the filling experiment and fits its fingerprint. `u` is required for
/// fixed-unitary plans with a unitary-dependent sampler.
#[no_mangle]
pub unsafe extern "C" fn bsf_run_fit(plan: *const BsfPlan, u: *const BsfUnitary, out: *mut BsfFingerprint) -> BsfStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        let mut core_plan = ExperimentPlan::new(p.modes, p.photons, sampler_kind(p.sampler), p.n_max, p.radius, p.seed);
        core_plan.iterations = p.iterations;
        core_plan.collision_free = p.collision_free != 0;
        core_plan.mode = if p.varied_unitary != 0 { ExperimentMode::VariedU } else { ExperimentMode::FixedU };
        let source = match (core_plan.mode, u.as_ref()) {
            (ExperimentMode::FixedU, Some(u)) => UnitarySource::Fixed(u.0.clone()),
            (ExperimentMode::FixedU, None) if core_plan.sampler.needs_unitary() => return Err(null("unitary")),
            _ => UnitarySource::Haar,
        };
        let fp = fit_curves(&run_experiment(&core_plan, &source).ffi()?).ffi()?;
        out_ptr(out, to_ffi_fingerprint(&fp))
    })
}

/// Separation of two fingerprints; `two_param` (nullable) is set to 1 when
/// `alpha_sigma` was dropped.
#[no_mangle]
pub unsafe extern "C" fn bsf_separation(
    a: *const BsfFingerprint,
    b: *const BsfFingerprint,
    out: *mut f64,
    two_param: *mut u8,
) -> BsfStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("fingerprint a"))?;
        let b = b.as_ref().ok_or_else(|| null("fingerprint b"))?;
        let (sep, dims) = auto_separation(&from_ffi_fingerprint(a, "a"), &from_ffi_fingerprint(b, "b")).ffi()?;
        if !two_param.is_null() {
            two_param.write(u8::from(dims == Dimensionality::TwoParam));
        }
        out_ptr(out, sep)
    })
}
