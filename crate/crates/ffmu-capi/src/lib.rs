//! C ABI over the ffmu library.
//!
//! Conventions: handles are opaque pointers created and freed here; every
//! fallible call returns an [`FfmuStatus`]; report-shaped results come back
//! as heap-allocated JSON strings released with [`ffmu_string_free`]; the
//! detail text of the most recent failure on the current thread is available
//! through [`ffmu_last_error_message`].

// raw-pointer arguments are the contract of a C ABI; every dereference here
// is null-checked first
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use ffmu::report::{
    DensityStatsReport, DualityReportOut, EquivalenceReportOut, EquivalenceRow, FactorReport,
    FactorRow, IdentityRow, LandauIdentityReport, MertensReportOut, MertensRow, QSumReport,
    QSumRow, Render, SeriesReport, SmoothReport, SmoothRow,
};
use ffmu::{
    equivalence_identity, factor, finite_landau_identity, is_irreducible, mertens,
    prime_count_exact, psi1, psi2, q_sum, series_ledger, verify_duality, CountMethod,
    DivisorProfile, EnumCeiling, Error, FWeight, FieldSpec, MonicPoly, PrimeSubset, PrimeTable,
    SeriesRestriction, SeriesWeight,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FfmuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    TableTooSmall = 5,
    IoError = 6,
    /// The requested identity check ran and found the two sides unequal.
    IdentityFailed = 7,
}

/// A field of order q, shared by every object built over it.
pub struct FfmuField {
    inner: Arc<FieldSpec>,
}

/// An immutable table of all primes up to a maximum degree.
pub struct FfmuTable {
    inner: PrimeTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(e: &Error) -> FfmuStatus {
    let msg = CString::new(e.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    match e {
        Error::Parse(_)
        | Error::NotMonic
        | Error::DigitOutOfRange { .. }
        | Error::EmptyPoly
        | Error::InvalidSubset(_)
        | Error::InvalidProfile(_) => FfmuStatus::ParseError,
        Error::TableTooSmall { .. } => FfmuStatus::TableTooSmall,
        Error::Io(_) => FfmuStatus::IoError,
        Error::VersionMismatch(_) | Error::CountMismatch { .. } => FfmuStatus::IoError,
        _ => FfmuStatus::InvalidArgument,
    }
}

fn set_error_text(msg: &str, status: FfmuStatus) -> FfmuStatus {
    let msg = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    status
}

/// Detail text of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ffmu_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, FfmuStatus> {
    if ptr.is_null() {
        return Err(set_error_text(
            "null string argument",
            FfmuStatus::NullPointer,
        ));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| set_error_text("string is not valid UTF-8", FfmuStatus::InvalidUtf8))
}

fn give_string(s: String, out: *mut *mut c_char) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            FfmuStatus::Ok
        }
        Err(_) => set_error_text("output contained a NUL byte", FfmuStatus::InvalidArgument),
    }
}

/// Release a string returned by any ffmu call.
#[no_mangle]
pub extern "C" fn ffmu_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe {
            let _ = CString::from_raw(s);
        }
    }
}

// ---------------------------------------------------------------------------
// field lifecycle

/// Create GF(q) for a prime power q, using built-in moduli for q in {4,8,9}.
#[no_mangle]
pub extern "C" fn ffmu_field_new(q: u64, out: *mut *mut FfmuField) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    match FieldSpec::with_order(q) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FfmuField { inner })) };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Create GF(q) with an explicit extension modulus over GF(p), given in the
/// polynomial text format (e.g. "1,0,1" or "T^2+1").
#[no_mangle]
pub extern "C" fn ffmu_field_new_with_modulus(
    q: u64,
    modulus: *const c_char,
    out: *mut *mut FfmuField,
) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let modulus = match unsafe { read_str(modulus) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    match FieldSpec::with_order_and_modulus(q, modulus) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FfmuField { inner })) };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn ffmu_field_free(field: *mut FfmuField) {
    if !field.is_null() {
        unsafe {
            let _ = Box::from_raw(field);
        }
    }
}

/// The order q of the field.
#[no_mangle]
pub extern "C" fn ffmu_field_order(field: *const FfmuField) -> u64 {
    if field.is_null() {
        return 0;
    }
    unsafe { &*field }.inner.q()
}

unsafe fn field_ref<'a>(field: *const FfmuField) -> Result<&'a Arc<FieldSpec>, FfmuStatus> {
    if field.is_null() {
        return Err(set_error_text("null field handle", FfmuStatus::NullPointer));
    }
    Ok(&unsafe { &*field }.inner)
}

unsafe fn table_ref<'a>(table: *const FfmuTable) -> Result<&'a PrimeTable, FfmuStatus> {
    if table.is_null() {
        return Err(set_error_text("null table handle", FfmuStatus::NullPointer));
    }
    Ok(&unsafe { &*table }.inner)
}

// ---------------------------------------------------------------------------
// prime table lifecycle

/// Enumerate and validate all primes up to max_degree.
#[no_mangle]
pub extern "C" fn ffmu_table_build(
    field: *const FfmuField,
    max_degree: u32,
    workers: u32,
    out: *mut *mut FfmuTable,
) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    match PrimeTable::build_with_workers(field, max_degree, workers.max(1) as usize) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FfmuTable { inner })) };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Load a table cache, re-validating per-degree counts.
#[no_mangle]
pub extern "C" fn ffmu_table_load(
    field: *const FfmuField,
    path: *const c_char,
    out: *mut *mut FfmuTable,
) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let path = match unsafe { read_str(path) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    match PrimeTable::load(path, field) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FfmuTable { inner })) };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Write the table in the line-oriented cache format.
#[no_mangle]
pub extern "C" fn ffmu_table_save(table: *const FfmuTable, path: *const c_char) -> FfmuStatus {
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let path = match unsafe { read_str(path) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    match table.save(path) {
        Ok(()) => FfmuStatus::Ok,
        Err(e) => set_error(&e),
    }
}

#[no_mangle]
pub extern "C" fn ffmu_table_free(table: *mut FfmuTable) {
    if !table.is_null() {
        unsafe {
            let _ = Box::from_raw(table);
        }
    }
}

#[no_mangle]
pub extern "C" fn ffmu_table_max_degree(table: *const FfmuTable) -> u32 {
    unsafe { table_ref(table) }
        .map(|t| t.max_degree())
        .unwrap_or(0)
}

/// Number of primes of one degree held by the table.
#[no_mangle]
pub extern "C" fn ffmu_table_prime_count(table: *const FfmuTable, degree: u32) -> u64 {
    unsafe { table_ref(table) }
        .map(|t| t.count(degree))
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// arithmetic

/// Exact count of monic irreducibles of degree n, as a decimal string.
#[no_mangle]
pub extern "C" fn ffmu_prime_count(
    field: *const FfmuField,
    n: u32,
    out: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    if n == 0 {
        return set_error_text("degree must be positive", FfmuStatus::InvalidArgument);
    }
    give_string(prime_count_exact(field, n).to_string(), out)
}

/// Deterministic irreducibility test; writes 1 or 0 into `out`.
#[no_mangle]
pub extern "C" fn ffmu_is_irreducible(
    field: *const FfmuField,
    poly: *const c_char,
    out: *mut i32,
) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let text = match unsafe { read_str(poly) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let parsed = match MonicPoly::parse(text, field) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    match is_irreducible(&parsed) {
        Ok(v) => {
            unsafe { *out = i32::from(v) };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Mobius function of a monic polynomial.
#[no_mangle]
pub extern "C" fn ffmu_mobius(
    field: *const FfmuField,
    table: *const FfmuTable,
    poly: *const c_char,
    out: *mut i64,
) -> FfmuStatus {
    if out.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let text = match unsafe { read_str(poly) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let parsed = match MonicPoly::parse(text, field) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    match factor(&parsed, table) {
        Ok(fac) => {
            unsafe { *out = fac.mobius() };
            FfmuStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Full factorization as a JSON report string.
#[no_mangle]
pub extern "C" fn ffmu_factor_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    poly: *const c_char,
    out_json: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let text = match unsafe { read_str(poly) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let parsed = match MonicPoly::parse(text, field) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    let fac = match factor(&parsed, table) {
        Ok(f) => f,
        Err(e) => return set_error(&e),
    };
    let dd = fac.degree_data();
    let report = FactorReport {
        q: field.q(),
        input: parsed.coeff_string(),
        mu: fac.mobius(),
        omega: dd.omega(),
        degree_set: dd.degree_set().to_vec(),
        count_with_multiplicity: fac.count_with_multiplicity(),
        rows: fac
            .factors()
            .iter()
            .map(|(rec, mult)| FactorRow {
                prime: rec.poly.coeff_string(),
                degree: rec.degree,
                ordinal: rec.ordinal,
                multiplicity: *mult,
            })
            .collect(),
    };
    give_string(report.to_json_string(), out_json)
}

// ---------------------------------------------------------------------------
// identity checks and summatory reports

/// Check the order-k duality identities on a profile literal
/// (`d:<deg>[,S][*<mult>] ...`) with a weight spec (`x`, `x^K`, `ind`,
/// `table:v1,...`). Writes 1 into `pass` iff every order agrees; a clean run
/// that finds a mismatch returns `IdentityFailed`.
#[no_mangle]
pub extern "C" fn ffmu_duality_check_json(
    profile: *const c_char,
    weight: *const c_char,
    k_max: u32,
    out_json: *mut *mut c_char,
    pass: *mut i32,
) -> FfmuStatus {
    if pass.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let profile_text = match unsafe { read_str(profile) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let weight_text = match unsafe { read_str(weight) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let prof = match DivisorProfile::parse(profile_text) {
        Ok(p) => p,
        Err(e) => return set_error(&e),
    };
    let domain = prof.primes().iter().map(|p| p.degree).max().unwrap_or(0);
    let f = match parse_weight(weight_text, u64::from(domain)) {
        Ok(f) => f,
        Err(e) => return set_error(&e),
    };
    let k_max = if k_max == 0 { prof.omega() + 2 } else { k_max }.max(1);
    let report = match verify_duality(&prof, &f, k_max) {
        Ok(r) => r,
        Err(e) => return set_error(&e),
    };
    unsafe { *pass = i32::from(report.pass) };
    let out = DualityReportOut::new(profile_text.to_string(), weight_text.to_string(), &report);
    let st = give_string(out.to_json_string(), out_json);
    if st != FfmuStatus::Ok {
        return st;
    }
    if report.pass {
        FfmuStatus::Ok
    } else {
        set_error_text("duality mismatch", FfmuStatus::IdentityFailed)
    }
}

fn parse_weight(spec: &str, domain_max: u64) -> Result<FWeight, Error> {
    use ffmu::num_bigint::BigInt;
    use ffmu::num_rational::BigRational;
    use ffmu::num_traits::{One, Zero};
    if spec == "x" {
        return Ok(FWeight::from_fn(domain_max, |x| {
            BigRational::from_integer(BigInt::from(x))
        }));
    }
    if spec == "ind" {
        return Ok(FWeight::from_fn(domain_max, |_| BigRational::one()));
    }
    if let Some(k) = spec.strip_prefix("x^") {
        let k: u32 = k
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad exponent in weight {spec:?}")))?;
        return Ok(FWeight::from_fn(domain_max, |x| {
            BigRational::from_integer(BigInt::from(x).pow(k))
        }));
    }
    if let Some(rest) = spec.strip_prefix("table:") {
        let mut values = vec![BigRational::zero()];
        for tok in rest.split(',') {
            let v: i64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad table value {tok:?}")))?;
            values.push(BigRational::from_integer(BigInt::from(v)));
        }
        return Ok(FWeight::new(values));
    }
    Err(Error::InvalidArgument(format!(
        "unknown weight {spec:?}; use x, x^K, ind, table:v1,..."
    )))
}

/// Exact partial sums of a weighted Mobius series as a JSON report.
/// `weight` is "mu" or "mu_omega"; `restriction` is "none", "d_s",
/// "delta1_eq:<n>", or "delta1_ge:<n>"; `subset` uses the subset grammar.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn ffmu_series_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    weight: *const c_char,
    restriction: *const c_char,
    subset: *const c_char,
    x: u32,
    include_unit: i32,
    workers: u32,
    out_json: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let weight = match unsafe { read_str(weight) } {
        Ok("mu") => SeriesWeight::Mu,
        Ok("mu_omega") | Ok("mu-omega") => SeriesWeight::MuOmega,
        Ok(other) => {
            return set_error_text(
                &format!("unknown weight {other:?}"),
                FfmuStatus::InvalidArgument,
            )
        }
        Err(st) => return st,
    };
    let restriction = match unsafe { read_str(restriction) } {
        Ok(s) => match parse_restriction(s) {
            Ok(r) => r,
            Err(msg) => return set_error_text(&msg, FfmuStatus::InvalidArgument),
        },
        Err(st) => return st,
    };
    let subset_text = match unsafe { read_str(subset) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let subset = match PrimeSubset::parse(subset_text, field) {
        Ok(s) => s,
        Err(e) => return set_error(&e),
    };
    match series_ledger(
        table,
        weight,
        &restriction,
        Some(&subset),
        x,
        include_unit != 0,
        workers.max(1) as usize,
        &EnumCeiling::unlimited(),
    ) {
        Ok(ledger) => give_string(SeriesReport::new(&ledger).to_json_string(), out_json),
        Err(e) => set_error(&e),
    }
}

fn parse_restriction(s: &str) -> Result<SeriesRestriction, String> {
    if s == "none" {
        return Ok(SeriesRestriction::Unrestricted);
    }
    if s == "d_s" || s == "d-s" {
        return Ok(SeriesRestriction::InDS);
    }
    let num = |t: &str| {
        t.parse::<u32>()
            .map_err(|_| format!("bad degree in restriction {s:?}"))
    };
    if let Some(n) = s
        .strip_prefix("delta1_eq:")
        .or(s.strip_prefix("delta1-eq:"))
    {
        return Ok(SeriesRestriction::Delta1Eq(num(n)?));
    }
    if let Some(n) = s
        .strip_prefix("delta1_ge:")
        .or(s.strip_prefix("delta1-ge:"))
    {
        return Ok(SeriesRestriction::Delta1Ge(num(n)?));
    }
    Err(format!("unknown restriction {s:?}"))
}

/// The exact equivalence identity at degree n. Writes 1 into `equal` iff the
/// two routes agree; inequality returns `IdentityFailed`.
#[no_mangle]
pub extern "C" fn ffmu_equivalence_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    subset: *const c_char,
    n: u32,
    workers: u32,
    out_json: *mut *mut c_char,
    equal: *mut i32,
) -> FfmuStatus {
    if equal.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let subset_text = match unsafe { read_str(subset) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let subset = match PrimeSubset::parse(subset_text, field) {
        Ok(s) => s,
        Err(e) => return set_error(&e),
    };
    let r = match equivalence_identity(
        table,
        &subset,
        n,
        workers.max(1) as usize,
        &EnumCeiling::unlimited(),
    ) {
        Ok(r) => r,
        Err(e) => return set_error(&e),
    };
    unsafe { *equal = i32::from(r.equal) };
    let report = EquivalenceReportOut {
        q: field.q(),
        rows: vec![EquivalenceRow::new(&r)],
    };
    let st = give_string(report.to_json_string(), out_json);
    if st != FfmuStatus::Ok {
        return st;
    }
    if r.equal {
        FfmuStatus::Ok
    } else {
        set_error_text("equivalence mismatch", FfmuStatus::IdentityFailed)
    }
}

/// The finite weighted-series identity at cutoff x. Writes 1 into `equal`
/// iff both sides agree; inequality returns `IdentityFailed`.
#[no_mangle]
pub extern "C" fn ffmu_landau_identity_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    x: u32,
    workers: u32,
    out_json: *mut *mut c_char,
    equal: *mut i32,
) -> FfmuStatus {
    if equal.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let r = match finite_landau_identity(
        table,
        x,
        workers.max(1) as usize,
        &EnumCeiling::unlimited(),
    ) {
        Ok(r) => r,
        Err(e) => return set_error(&e),
    };
    unsafe { *equal = i32::from(r.equal) };
    let report = LandauIdentityReport {
        q: field.q(),
        rows: vec![IdentityRow::new(&r)],
    };
    let st = give_string(report.to_json_string(), out_json);
    if st != FfmuStatus::Ok {
        return st;
    }
    if r.equal {
        FfmuStatus::Ok
    } else {
        set_error_text(
            "finite series identity mismatch",
            FfmuStatus::IdentityFailed,
        )
    }
}

/// Exact Mertens product with the n*e^gamma reference, as JSON.
#[no_mangle]
pub extern "C" fn ffmu_mertens_json(
    field: *const FfmuField,
    n: u32,
    out_json: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    match mertens(field, n) {
        Ok(r) => {
            let report = MertensReportOut {
                q: field.q(),
                rows: vec![MertensRow::new(&r)],
            };
            give_string(report.to_json_string(), out_json)
        }
        Err(e) => set_error(&e),
    }
}

/// Exact sum of member-prime counts at the k-th largest degree, as JSON.
#[no_mangle]
pub extern "C" fn ffmu_qsum_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    subset: *const c_char,
    k: u32,
    n: u32,
    workers: u32,
    out_json: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let subset_text = match unsafe { read_str(subset) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let subset = match PrimeSubset::parse(subset_text, field) {
        Ok(s) => s,
        Err(e) => return set_error(&e),
    };
    match q_sum(
        table,
        &subset,
        k,
        n,
        workers.max(1) as usize,
        &EnumCeiling::unlimited(),
    ) {
        Ok(sum) => {
            let report = QSumReport {
                q: field.q(),
                rows: vec![QSumRow::new(field.q(), n, k, subset.canonical(), &sum)],
            };
            give_string(report.to_json_string(), out_json)
        }
        Err(e) => set_error(&e),
    }
}

/// Smooth count of the given order (1 or 2) by both routes when a table is
/// supplied, by the recurrence alone otherwise. Writes 1 into `equal` when
/// both routes ran and agreed (and always when only one ran); disagreement
/// returns `IdentityFailed`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub extern "C" fn ffmu_smooth_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    order: u32,
    n: u32,
    m: u32,
    workers: u32,
    out_json: *mut *mut c_char,
    equal: *mut i32,
) -> FfmuStatus {
    if equal.is_null() {
        return set_error_text("null output pointer", FfmuStatus::NullPointer);
    }
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    if order != 1 && order != 2 {
        return set_error_text("order must be 1 or 2", FfmuStatus::InvalidArgument);
    }
    let workers = workers.max(1) as usize;
    let run = |method: CountMethod, table: Option<&PrimeTable>| {
        if order == 1 {
            psi1(
                field,
                table,
                n,
                m,
                method,
                workers,
                &EnumCeiling::unlimited(),
            )
        } else {
            psi2(
                field,
                table,
                n,
                m,
                method,
                workers,
                &EnumCeiling::unlimited(),
            )
        }
    };
    let recurrence = match run(CountMethod::Recurrence, None) {
        Ok(v) => v,
        Err(e) => return set_error(&e),
    };
    let mut rows = vec![SmoothRow::new(order, &recurrence)];
    let mut agreed = true;
    if !table.is_null() {
        let t = match unsafe { table_ref(table) } {
            Ok(t) => t,
            Err(st) => return st,
        };
        let enumerated = match run(CountMethod::Enumeration, Some(t)) {
            Ok(v) => v,
            Err(e) => return set_error(&e),
        };
        agreed = enumerated.value == recurrence.value;
        rows.insert(0, SmoothRow::new(order, &enumerated));
    }
    unsafe { *equal = i32::from(agreed) };
    let report = SmoothReport { q: field.q(), rows };
    let st = give_string(report.to_json_string(), out_json);
    if st != FfmuStatus::Ok {
        return st;
    }
    if agreed {
        FfmuStatus::Ok
    } else {
        set_error_text("smooth-count routes disagree", FfmuStatus::IdentityFailed)
    }
}

/// Exact density-error statistics for a subset with a declared density.
#[no_mangle]
pub extern "C" fn ffmu_density_stats_json(
    field: *const FfmuField,
    table: *const FfmuTable,
    subset: *const c_char,
    out_json: *mut *mut c_char,
) -> FfmuStatus {
    let field = match unsafe { field_ref(field) } {
        Ok(f) => f,
        Err(st) => return st,
    };
    let table = match unsafe { table_ref(table) } {
        Ok(t) => t,
        Err(st) => return st,
    };
    let subset_text = match unsafe { read_str(subset) } {
        Ok(s) => s,
        Err(st) => return st,
    };
    let subset = match PrimeSubset::parse(subset_text, field) {
        Ok(s) => s,
        Err(e) => return set_error(&e),
    };
    match subset.density_error_stats(table) {
        Ok(stats) => give_string(
            DensityStatsReport::new(field.q(), &stats).to_json_string(),
            out_json,
        ),
        Err(e) => set_error(&e),
    }
}
