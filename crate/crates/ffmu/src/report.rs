//! Serializable reports and their CSV/JSON renderings.
//!
//! Every JSON object carries a `schema` field naming the report type and a
//! `paper_ref` field spelling out the identity or quantity the numbers
//! belong to. CSV output is column-stable and byte-deterministic; exact
//! integers are rendered in decimal and exact rationals as `num/den`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::duality::DualityReport;
use crate::subset::DensityStats;
use crate::summatory::{
    EquivalenceReport, IdentityReport, MertensReport, Psi2BoundReport, SeriesLedger, SmoothCount,
};

/// Lossy float view of an exact rational, safe for very large numerators and
/// denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let nf = r.numer().to_f64();
    let df = r.denom().to_f64();
    if let (Some(n), Some(d)) = (nf, df) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let bits = r.numer().bits().max(r.denom().bits());
    let shift = bits.saturating_sub(512) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational as `num/den`, reduced, denominator positive.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'a str,
    paper_ref: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn to_json<T: Serialize>(schema: &str, paper_ref: &str, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema,
        paper_ref,
        body,
    })
    .expect("reports are serializable");
    s.push('\n');
    s
}

fn csv_from_records<S: Serialize>(rows: &[S]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("csv-serializable row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

/// A rendered report: one of the two output formats.
pub trait Render {
    fn schema(&self) -> &'static str;
    fn paper_ref(&self) -> &'static str;
    fn to_csv(&self) -> String;
    fn to_json_string(&self) -> String;
}

macro_rules! impl_render {
    ($ty:ty, $schema:literal, $paper_ref:literal, $rows:ident) => {
        impl Render for $ty {
            fn schema(&self) -> &'static str {
                $schema
            }
            fn paper_ref(&self) -> &'static str {
                $paper_ref
            }
            fn to_csv(&self) -> String {
                csv_from_records(&self.$rows)
            }
            fn to_json_string(&self) -> String {
                to_json($schema, $paper_ref, self)
            }
        }
    };
}

// ---------------------------------------------------------------------------
// primes

#[derive(Serialize)]
pub struct PrimeRow {
    pub degree: u32,
    pub ordinal: u64,
    pub coeffs: String,
}

#[derive(Serialize)]
pub struct PrimesReport {
    pub q: u64,
    pub degree: u32,
    pub count: u64,
    pub rows: Vec<PrimeRow>,
}

impl_render!(
    PrimesReport,
    "primes",
    "monic irreducibles of one degree; count pi(n) = (1/n) sum_{d|n} mu(d) q^(n/d)",
    rows
);

// ---------------------------------------------------------------------------
// factor / mu

#[derive(Serialize)]
pub struct FactorRow {
    pub prime: String,
    pub degree: u32,
    pub ordinal: u64,
    pub multiplicity: u32,
}

#[derive(Serialize)]
pub struct FactorReport {
    pub q: u64,
    pub input: String,
    pub mu: i64,
    pub omega: u32,
    pub degree_set: Vec<u32>,
    pub count_with_multiplicity: u64,
    pub rows: Vec<FactorRow>,
}

impl_render!(
    FactorReport,
    "factor",
    "prime factorization; mu(A), N(A) = {deg P : P | A}, Omega(A) = #N(A)",
    rows
);

#[derive(Serialize)]
pub struct MuRow {
    pub input: String,
    pub mu: i64,
}

#[derive(Serialize)]
pub struct MuReport {
    pub q: u64,
    pub rows: Vec<MuRow>,
}

impl_render!(
    MuReport,
    "mu",
    "mu(A) = 1 at A = 1, (-1)^k on k distinct primes, else 0",
    rows
);

// ---------------------------------------------------------------------------
// duality

#[derive(Serialize)]
pub struct DualityRowOut {
    pub k: u32,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

#[derive(Serialize)]
pub struct DualityReportOut {
    pub profile: String,
    pub weight: String,
    pub pass: bool,
    pub rows: Vec<DualityRowOut>,
}

impl DualityReportOut {
    pub fn new(profile: String, weight: String, report: &DualityReport) -> Self {
        DualityReportOut {
            profile,
            weight,
            pass: report.pass,
            rows: report
                .rows
                .iter()
                .map(|r| DualityRowOut {
                    k: r.k,
                    lhs: rational_string(&r.lhs),
                    rhs: rational_string(&r.rhs),
                    equal: r.equal,
                })
                .collect(),
        }
    }
}

impl_render!(
    DualityReportOut,
    "duality",
    "sum'_{B in D(S), B|A} mu(B) C(Omega(B)-1, k-1) f(delta_1(B)) = (-1)^k Q_S^(k)(A) f(Delta_k(A))",
    rows
);

// ---------------------------------------------------------------------------
// series

#[derive(Serialize)]
pub struct SeriesRow {
    pub x: u32,
    pub numerator: String,
    pub denominator: String,
    pub float_value: f64,
}

#[derive(Serialize)]
pub struct SeriesReport {
    pub q: u64,
    pub weight: String,
    pub restriction: String,
    pub subset: String,
    pub include_unit: bool,
    pub rows: Vec<SeriesRow>,
}

impl SeriesReport {
    pub fn new(ledger: &SeriesLedger) -> Self {
        SeriesReport {
            q: ledger.q,
            weight: ledger.weight.name().to_string(),
            restriction: ledger.restriction.name(),
            subset: ledger.subset.clone().unwrap_or_else(|| "all".into()),
            include_unit: ledger.include_unit,
            rows: ledger
                .rows
                .iter()
                .map(|row| SeriesRow {
                    x: row.x,
                    numerator: row.partial.numer().to_string(),
                    denominator: row.partial.denom().to_string(),
                    float_value: rational_to_f64(&row.partial),
                })
                .collect(),
        }
    }
}

impl_render!(
    SeriesReport,
    "series",
    "partial sums sum'_{1<=deg A<=x} w(A)/q^(deg A) under the named restriction",
    rows
);

// ---------------------------------------------------------------------------
// qsum

#[derive(Serialize)]
pub struct QSumRow {
    pub n: u32,
    pub k: u32,
    pub subset: String,
    pub sum: String,
    pub q_to_n: String,
    pub ratio: f64,
}

#[derive(Serialize)]
pub struct QSumReport {
    pub q: u64,
    pub rows: Vec<QSumRow>,
}

impl QSumRow {
    pub fn new(q: u64, n: u32, k: u32, subset: &str, sum: &num_bigint::BigUint) -> Self {
        let q_to_n = BigInt::from(q).pow(n);
        let ratio = rational_to_f64(&BigRational::new(BigInt::from(sum.clone()), q_to_n.clone()));
        QSumRow {
            n,
            k,
            subset: subset.to_string(),
            sum: sum.to_string(),
            q_to_n: q_to_n.to_string(),
            ratio,
        }
    }
}

impl_render!(
    QSumReport,
    "qsum",
    "sum'_{deg A=n} Q_S^(k)(A); tends to delta(S) q^n for k = 1, 2",
    rows
);

// ---------------------------------------------------------------------------
// smooth counts

#[derive(Serialize)]
pub struct SmoothRow {
    pub n: u32,
    pub m: u32,
    pub order: u32,
    pub method: String,
    pub value: String,
}

#[derive(Serialize)]
pub struct SmoothReport {
    pub q: u64,
    pub rows: Vec<SmoothRow>,
}

impl SmoothRow {
    pub fn new(order: u32, count: &SmoothCount) -> Self {
        SmoothRow {
            n: count.n,
            m: count.m,
            order,
            method: count.method.name().to_string(),
            value: count.value.to_string(),
        }
    }
}

impl_render!(
    SmoothReport,
    "smooth",
    "Psi_1(n,m) = #{deg A = n, Delta_1(A) <= m}; Psi_2(n,m) = #{deg A = n, Delta_2(A) <= m}",
    rows
);

#[derive(Serialize)]
pub struct SmoothBoundRow {
    pub n: u32,
    pub m: u32,
    pub epsilon: f64,
    pub psi2: String,
    pub bound_shape: f64,
    pub ratio: f64,
    pub advisory_only: bool,
}

#[derive(Serialize)]
pub struct SmoothBoundReport {
    pub q: u64,
    pub rows: Vec<SmoothBoundRow>,
}

impl SmoothBoundRow {
    pub fn new(r: &Psi2BoundReport) -> Self {
        SmoothBoundRow {
            n: r.n,
            m: r.m,
            epsilon: r.epsilon,
            psi2: r.psi2.to_string(),
            bound_shape: r.bound_shape,
            ratio: r.ratio,
            advisory_only: r.advisory_only,
        }
    }
}

impl_render!(
    SmoothBoundReport,
    "smooth_bound",
    "advisory: Psi_2(n,m) against the shape q^n/n^eps + q^n m/n (implicit constant unproved)",
    rows
);

#[derive(Serialize)]
pub struct MultiTopRow {
    pub n: u32,
    pub count: String,
}

#[derive(Serialize)]
pub struct MultiTopReport {
    pub q: u64,
    pub rows: Vec<MultiTopRow>,
}

impl_render!(
    MultiTopReport,
    "multi_top",
    "#{deg A = n with >= 2 distinct prime divisors at degree Delta_1(A)}",
    rows
);

// ---------------------------------------------------------------------------
// wcount

#[derive(Serialize)]
pub struct WCountRow {
    pub x: u32,
    pub enumeration: String,
    pub formula: String,
    pub equal: String,
}

#[derive(Serialize)]
pub struct WCountReport {
    pub q: u64,
    pub rows: Vec<WCountRow>,
}

impl_render!(
    WCountReport,
    "wcount",
    "#W(x) = #{deg A = x, Omega(A) = 1} = sum_{d|x} C(pi(d)+x/d-1, x/d)",
    rows
);

// ---------------------------------------------------------------------------
// identity checks

#[derive(Serialize)]
pub struct IdentityRow {
    pub x: u32,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

#[derive(Serialize)]
pub struct LandauIdentityReport {
    pub q: u64,
    pub rows: Vec<IdentityRow>,
}

impl IdentityRow {
    pub fn new(r: &IdentityReport) -> Self {
        IdentityRow {
            x: r.x,
            lhs: rational_string(&r.lhs),
            rhs: rational_string(&r.rhs),
            equal: r.equal,
        }
    }
}

impl_render!(
    LandauIdentityReport,
    "landau2_identity",
    "sum'_{1<=deg A<=x} mu(A)Omega(A)/q^(deg A) = -#W(x)/q^x",
    rows
);

#[derive(Serialize)]
pub struct EquivalenceRow {
    pub n: u32,
    pub subset: String,
    pub lhs: String,
    pub rhs: String,
    pub q1_sum: String,
    pub q2_sum: String,
    pub equal: bool,
}

#[derive(Serialize)]
pub struct EquivalenceReportOut {
    pub q: u64,
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceRow {
    pub fn new(r: &EquivalenceReport) -> Self {
        EquivalenceRow {
            n: r.n,
            subset: r.subset.clone(),
            lhs: rational_string(&r.lhs),
            rhs: rational_string(&r.rhs),
            q1_sum: r.q1_sum.to_string(),
            q2_sum: r.q2_sum.to_string(),
            equal: r.equal,
        }
    }
}

impl_render!(
    EquivalenceReportOut,
    "equivalence",
    "sum'_{1<=deg B<=n, B in D(S)} mu(B)Omega(B)/q^(deg B) = (sum Q_S^(2) - sum Q_S^(1))/q^n at degree n",
    rows
);

// ---------------------------------------------------------------------------
// mertens

#[derive(Serialize)]
pub struct MertensRow {
    pub n: u32,
    pub product: String,
    pub reference: f64,
    pub ratio: String,
}

#[derive(Serialize)]
pub struct MertensReportOut {
    pub q: u64,
    pub rows: Vec<MertensRow>,
}

impl MertensRow {
    pub fn new(r: &MertensReport) -> Self {
        MertensRow {
            n: r.n,
            product: rational_string(&r.product),
            reference: r.reference,
            // twelve decimals keeps the convergence record at full width
            ratio: r.ratio.map(|v| format!("{v:.12}")).unwrap_or_default(),
        }
    }
}

impl_render!(
    MertensReportOut,
    "mertens",
    "prod_{deg P<=n} (1 - q^(-deg P))^(-1) = n e^gamma (1 + o(1))",
    rows
);

// ---------------------------------------------------------------------------
// density stats

#[derive(Serialize)]
pub struct DensityRow {
    pub d: u32,
    pub e_s: String,
    pub v_s: String,
    pub delta: String,
    pub truncated_at: u32,
}

#[derive(Serialize)]
pub struct DensityStatsReport {
    pub q: u64,
    pub subset: String,
    pub rows: Vec<DensityRow>,
}

impl DensityStatsReport {
    pub fn new(q: u64, stats: &DensityStats) -> Self {
        DensityStatsReport {
            q,
            subset: stats.subset.clone(),
            rows: stats
                .rows
                .iter()
                .map(|(d, e, v)| DensityRow {
                    d: *d,
                    e_s: rational_string(e),
                    v_s: rational_string(v),
                    delta: rational_string(&stats.delta),
                    truncated_at: stats.truncated_at,
                })
                .collect(),
        }
    }
}

impl_render!(
    DensityStatsReport,
    "density_stats",
    "e_S(d) = sup_{e<=d}(pi_S(e) - delta(S) pi(e)); v_S(d) = sup_{e>=d} e_S(e)/q^e (sup truncated at table edge)",
    rows
);

// ---------------------------------------------------------------------------
// table maintenance

#[derive(Serialize)]
pub struct TableRow {
    pub d: u32,
    pub count: u64,
}

#[derive(Serialize)]
pub struct TableReport {
    pub q: u64,
    pub max_degree: u32,
    pub path: String,
    pub rows: Vec<TableRow>,
}

impl_render!(
    TableReport,
    "table",
    "per-degree prime counts, validated against pi(n) = (1/n) sum_{d|n} mu(d) q^(n/d)",
    rows
);
