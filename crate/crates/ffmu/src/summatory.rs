//! Summatory quantities over monic polynomials: exact-rational weighted
//! Mobius series by degree cutoff, counts of single-degree-profile monics two
//! independent ways, smooth counts by enumeration and by recurrence, the
//! exact equivalence identity tying the restricted series to second-order
//! prime counts, Mertens products, and tail layers of the Euler product.
//!
//! All series arithmetic is exact; floating point appears only in
//! convergence reports.

use std::ops::Range;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{factor, Factorization};
use crate::duality::binomial;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::MonicPoly;
use crate::primes::{prime_count_exact, PrimeTable};
use crate::subset::{PrimeSubset, SubsetMask};

/// Euler-Mascheroni constant, used only in floating-point reports.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Cap on exhaustive layer enumeration. Scans above the ceiling are refused
/// so a typo cannot silently trigger a q^degree-sized walk.
#[derive(Clone, Copy, Debug)]
pub struct EnumCeiling(pub u32);

impl EnumCeiling {
    /// Defaults keep a full layer under a few hundred thousand
    /// factorizations: degree 18 for q=2, 12 for q=3, 8 for q=5.
    pub fn default_for(q: u64) -> Self {
        let d = match q {
            2 => 18,
            3 => 12,
            5 => 8,
            _ => {
                let mut d = 1u32;
                while q.checked_pow(d + 1).is_some_and(|v| v <= 400_000) {
                    d += 1;
                }
                d
            }
        };
        EnumCeiling(d)
    }

    pub fn unlimited() -> Self {
        EnumCeiling(u32::MAX)
    }

    pub fn check(&self, degree: u32) -> Result<()> {
        if degree > self.0 {
            Err(Error::CeilingExceeded {
                degree,
                ceiling: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// Fold over every monic of the given degree with its factorization.
/// Chunks are scanned independently and merged in index order, so the result
/// does not depend on the worker count (all aggregation here is exact).
fn fold_layer<T, I, S, M>(
    table: &PrimeTable,
    degree: u32,
    workers: usize,
    init: I,
    step: S,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, &MonicPoly, &Factorization) -> Result<()> + Sync,
    M: Fn(T, T) -> T,
{
    let field = table.field();
    table.require(degree)?;
    let total = field.q().checked_pow(degree).ok_or_else(|| {
        Error::InvalidArgument(format!("q^{degree} overflows the enumeration index"))
    })?;
    let scan = |range: Range<u64>| -> Result<T> {
        let mut acc = init();
        for idx in range {
            let a = MonicPoly::from_index(field, degree, idx);
            let fac = factor(&a, table)?;
            step(&mut acc, &a, &fac)?;
        }
        Ok(acc)
    };
    if workers <= 1 || total < 4096 {
        return scan(0..total);
    }
    let chunks = (workers as u64 * 8).min(total);
    let span = total.div_ceil(chunks);
    let ranges: Vec<Range<u64>> = (0..chunks)
        .map(|i| (i * span)..((i + 1) * span).min(total))
        .collect();
    let parts: Vec<Result<T>> = ranges.into_par_iter().map(scan).collect();
    let mut out: Option<T> = None;
    for part in parts {
        let part = part?;
        out = Some(match out {
            None => part,
            Some(acc) => merge(acc, part),
        });
    }
    Ok(out.expect("at least one chunk"))
}

/// Weight applied to each monic in a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesWeight {
    /// mu(A)
    Mu,
    /// mu(A) * (number of distinct prime degrees of A)
    MuOmega,
}

impl SeriesWeight {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesWeight::Mu => "mu",
            SeriesWeight::MuOmega => "mu_omega",
        }
    }

    fn of(&self, fac: &Factorization) -> i64 {
        match self {
            SeriesWeight::Mu => fac.mobius(),
            SeriesWeight::MuOmega => fac.mobius() * i64::from(fac.degree_data().omega()),
        }
    }
}

/// Restriction on which monics enter a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesRestriction {
    Unrestricted,
    /// Unique minimal-degree prime divisor, lying in the subset.
    InDS,
    /// Smallest distinct prime degree equals n.
    Delta1Eq(u32),
    /// Smallest distinct prime degree is at least n.
    Delta1Ge(u32),
}

impl SeriesRestriction {
    pub fn name(&self) -> String {
        match self {
            SeriesRestriction::Unrestricted => "none".into(),
            SeriesRestriction::InDS => "d_s".into(),
            SeriesRestriction::Delta1Eq(n) => format!("delta1_eq:{n}"),
            SeriesRestriction::Delta1Ge(n) => format!("delta1_ge:{n}"),
        }
    }

    fn admits(&self, fac: &Factorization, mask: Option<&SubsetMask>) -> bool {
        match self {
            SeriesRestriction::Unrestricted => true,
            SeriesRestriction::InDS => {
                let dd = fac.degree_data();
                dd.has_unique_min_prime_in(|p| {
                    mask.map(|m| m.contains(p.degree, p.ordinal))
                        .unwrap_or(true)
                })
            }
            SeriesRestriction::Delta1Eq(n) => fac.degree_data().kth_smallest(1) == *n,
            SeriesRestriction::Delta1Ge(n) => {
                let d1 = fac.degree_data().kth_smallest(1);
                d1 >= *n && d1 > 0
            }
        }
    }
}

/// One degree cutoff of a series: the exact layer sum (an integer) and the
/// running partial sum (denominator divides q^x).
#[derive(Clone, Debug)]
pub struct LedgerRow {
    pub x: u32,
    pub layer: BigInt,
    pub partial: BigRational,
}

/// Exact partial sums of a weighted Mobius series, indexed by degree cutoff.
#[derive(Clone, Debug)]
pub struct SeriesLedger {
    pub q: u64,
    pub weight: SeriesWeight,
    pub restriction: SeriesRestriction,
    pub subset: Option<String>,
    /// Whether the degree-0 term (the unit polynomial) is included.
    pub include_unit: bool,
    pub rows: Vec<LedgerRow>,
}

impl SeriesLedger {
    /// Partial sum at cutoff x.
    pub fn partial(&self, x: u32) -> Option<&BigRational> {
        self.rows
            .iter()
            .find(|row| row.x == x)
            .map(|row| &row.partial)
    }

    /// The exact degree-x layer sum.
    pub fn layer(&self, x: u32) -> Option<&BigInt> {
        self.rows
            .iter()
            .find(|row| row.x == x)
            .map(|row| &row.layer)
    }
}

/// Exact partial sums of sum' weight(A) / q^deg(A) over monic A meeting the
/// restriction, for every cutoff up to x_max. The default range is
/// 1 <= deg A <= x; `include_unit` adds the degree-0 term where the
/// restriction admits it.
#[allow(clippy::too_many_arguments)]
pub fn series_ledger(
    table: &PrimeTable,
    weight: SeriesWeight,
    restriction: &SeriesRestriction,
    subset: Option<&PrimeSubset>,
    x_max: u32,
    include_unit: bool,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<SeriesLedger> {
    let field = table.field();
    let mask = match (restriction, subset) {
        (SeriesRestriction::InDS, Some(s)) => {
            if s.field() != field {
                return Err(Error::FieldMismatch);
            }
            Some(s.mask(table))
        }
        (SeriesRestriction::InDS, None) => {
            return Err(Error::InvalidArgument(
                "the d_s restriction needs a subset".into(),
            ))
        }
        _ => None,
    };
    if let SeriesRestriction::Delta1Eq(0) | SeriesRestriction::Delta1Ge(0) = restriction {
        return Err(Error::InvalidArgument(
            "degree restrictions need n >= 1".into(),
        ));
    }
    ceiling.check(x_max)?;
    table.require(x_max)?;

    let mut rows = Vec::new();
    let mut partial = BigRational::zero();
    if include_unit {
        // the unit polynomial has mu = 1 and no prime degrees
        let layer = match (weight, restriction) {
            (SeriesWeight::Mu, SeriesRestriction::Unrestricted) => BigInt::one(),
            _ => BigInt::zero(),
        };
        partial += BigRational::from_integer(layer.clone());
        rows.push(LedgerRow {
            x: 0,
            layer,
            partial: partial.clone(),
        });
    }
    for x in 1..=x_max {
        let layer = fold_layer(
            table,
            x,
            workers,
            || 0i64,
            |acc, _, fac| {
                if restriction.admits(fac, mask.as_ref()) {
                    *acc += weight.of(fac);
                }
                Ok(())
            },
            |a, b| a + b,
        )?;
        let layer = BigInt::from(layer);
        partial += BigRational::new(layer.clone(), BigInt::from(field.q()).pow(x));
        rows.push(LedgerRow {
            x,
            layer,
            partial: partial.clone(),
        });
    }
    Ok(SeriesLedger {
        q: field.q(),
        weight,
        restriction: restriction.clone(),
        subset: subset.map(|s| s.canonical().to_string()),
        include_unit,
        rows,
    })
}

/// Count of monics of degree x whose prime factors all share one degree,
/// by exhaustive factorization.
pub fn w_count_enum(
    table: &PrimeTable,
    x: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<BigUint> {
    if x == 0 {
        return Err(Error::InvalidArgument("w count needs x >= 1".into()));
    }
    ceiling.check(x)?;
    let count = fold_layer(
        table,
        x,
        workers,
        || 0u64,
        |acc, _, fac| {
            if fac.degree_data().omega() == 1 {
                *acc += 1;
            }
            Ok(())
        },
        |a, b| a + b,
    )?;
    Ok(BigUint::from(count))
}

fn multiset_count(primes: u64, size: u64) -> BigUint {
    // multisets of the given size from `primes` symbols
    binomial(primes + size - 1, size)
        .to_biguint()
        .expect("binomial is non-negative")
}

/// Same count via the divisor/stars-and-bars formula
/// sum over d | x of C(pi(d) + x/d - 1, x/d); needs only exact prime counts.
pub fn w_count_formula(field: &FieldSpec, x: u32) -> Result<BigUint> {
    if x == 0 {
        return Err(Error::InvalidArgument("w count needs x >= 1".into()));
    }
    let mut total = BigUint::zero();
    for d in 1..=x {
        if !x.is_multiple_of(d) {
            continue;
        }
        let pi = prime_count_exact(field, d)
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("prime count exceeds u64".into()))?;
        total += multiset_count(pi, u64::from(x / d));
    }
    Ok(total)
}

/// Equality report for a two-route computation.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub x: u32,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
}

/// The finite form behind the vanishing of sum' mu(A) Omega(A) / q^deg A:
/// the brute-force partial sum up to x must equal -W(x)/q^x with W(x) from
/// the stars-and-bars formula.
pub fn finite_landau_identity(
    table: &PrimeTable,
    x: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<IdentityReport> {
    let ledger = series_ledger(
        table,
        SeriesWeight::MuOmega,
        &SeriesRestriction::Unrestricted,
        None,
        x,
        false,
        workers,
        ceiling,
    )?;
    let lhs = ledger.partial(x).expect("cutoff present").clone();
    let w = w_count_formula(table.field(), x)?;
    let rhs = -BigRational::new(BigInt::from(w), BigInt::from(table.field().q()).pow(x));
    let equal = lhs == rhs;
    Ok(IdentityReport { x, lhs, rhs, equal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Enumeration,
    Recurrence,
}

impl CountMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CountMethod::Enumeration => "enumeration",
            CountMethod::Recurrence => "recurrence",
        }
    }
}

/// An exact smooth count: order 1 bounds the largest prime degree, order 2
/// bounds the second-largest distinct prime degree.
#[derive(Clone, Debug)]
pub struct SmoothCount {
    pub n: u32,
    pub m: u32,
    pub value: BigUint,
    pub method: CountMethod,
}

/// Histograms over all monics of degree n: counts by largest distinct prime
/// degree and by second-largest distinct prime degree. Index d of the first
/// vector counts monics with Delta_1 = d; same for Delta_2. The unit-profile
/// entry sits at index 0.
pub fn smooth_histograms(
    table: &PrimeTable,
    n: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<(Vec<u64>, Vec<u64>)> {
    ceiling.check(n)?;
    let len = n as usize + 1;
    fold_layer(
        table,
        n,
        workers,
        || (vec![0u64; len], vec![0u64; len]),
        |acc, _, fac| {
            let dd = fac.degree_data();
            acc.0[dd.kth_largest(1) as usize] += 1;
            acc.1[dd.kth_largest(2) as usize] += 1;
            Ok(())
        },
        |mut a, b| {
            for (x, y) in a.0.iter_mut().zip(b.0) {
                *x += y;
            }
            for (x, y) in a.1.iter_mut().zip(b.1) {
                *x += y;
            }
            a
        },
    )
}

fn prime_count_u64(field: &FieldSpec, d: u32) -> Result<u64> {
    prime_count_exact(field, d)
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("prime count exceeds u64".into()))
}

/// Counts of m-smooth monics by degree: entry j is the number of monics of
/// degree j all of whose prime factors have degree <= m, for j in 0..=n.
/// Coefficient extraction from prod over d <= m of (1 - z^d)^(-pi(d)).
pub fn psi1_recurrence_row(field: &FieldSpec, n: u32, m: u32) -> Result<Vec<BigUint>> {
    let mut row = vec![BigUint::zero(); n as usize + 1];
    row[0] = BigUint::one();
    for d in 1..=m.min(n) {
        let pi = prime_count_u64(field, d)?;
        let mut next = vec![BigUint::zero(); n as usize + 1];
        for j in 0..=n as usize {
            if row[j].is_zero() {
                continue;
            }
            let mut t = 0u64;
            while j + (t * u64::from(d)) as usize <= n as usize {
                next[j + (t * u64::from(d)) as usize] += &row[j] * multiset_count(pi, t);
                t += 1;
            }
        }
        row = next;
    }
    Ok(row)
}

/// First-order smooth count by the chosen method.
pub fn psi1(
    field: &Arc<FieldSpec>,
    table: Option<&PrimeTable>,
    n: u32,
    m: u32,
    method: CountMethod,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<SmoothCount> {
    let value = match method {
        CountMethod::Recurrence => psi1_recurrence_row(field, n, m)?[n as usize].clone(),
        CountMethod::Enumeration => {
            let table = table
                .ok_or_else(|| Error::InvalidArgument("enumeration needs a prime table".into()))?;
            if n == 0 {
                BigUint::one()
            } else {
                let (h1, _) = smooth_histograms(table, n, workers, ceiling)?;
                BigUint::from(h1[0..=m.min(n) as usize].iter().sum::<u64>())
            }
        }
    };
    Ok(SmoothCount {
        n,
        m,
        value,
        method,
    })
}

/// Second-order smooth count by the chosen method. The recurrence splits off
/// the top part: A = B * Q with Q the multiset of primes at the single
/// distinct degree D > m and B an m-smooth monic.
pub fn psi2(
    field: &Arc<FieldSpec>,
    table: Option<&PrimeTable>,
    n: u32,
    m: u32,
    method: CountMethod,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<SmoothCount> {
    let value = match method {
        CountMethod::Recurrence => {
            let row = psi1_recurrence_row(field, n, m)?;
            let mut total = row[n as usize].clone();
            for top_degree in m + 1..=n {
                let pi = prime_count_u64(field, top_degree)?;
                let mut t = 1u64;
                while t * u64::from(top_degree) <= u64::from(n) {
                    let rest = n as usize - (t * u64::from(top_degree)) as usize;
                    total += multiset_count(pi, t) * &row[rest];
                    t += 1;
                }
            }
            total
        }
        CountMethod::Enumeration => {
            let table = table
                .ok_or_else(|| Error::InvalidArgument("enumeration needs a prime table".into()))?;
            if n == 0 {
                BigUint::one()
            } else {
                let (_, h2) = smooth_histograms(table, n, workers, ceiling)?;
                BigUint::from(h2[0..=m.min(n) as usize].iter().sum::<u64>())
            }
        }
    };
    Ok(SmoothCount {
        n,
        m,
        value,
        method,
    })
}

/// Advisory report comparing the exact second-order smooth count with the
/// shape q^n / n^eps + q^n m / n. No pass/fail: the comparison carries an
/// unspecified implicit constant.
#[derive(Clone, Debug)]
pub struct Psi2BoundReport {
    pub n: u32,
    pub m: u32,
    pub epsilon: f64,
    pub psi2: BigUint,
    pub bound_shape: f64,
    pub ratio: f64,
    /// Always true: this report never asserts.
    pub advisory_only: bool,
}

pub fn psi2_bound_diagnostic(
    field: &Arc<FieldSpec>,
    n: u32,
    m: u32,
    epsilon: f64,
) -> Result<Psi2BoundReport> {
    if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1)".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let psi2 = psi2(
        field,
        None,
        n,
        m,
        CountMethod::Recurrence,
        1,
        &EnumCeiling::unlimited(),
    )?
    .value;
    let qn = (field.q() as f64).powi(n as i32);
    let bound_shape = qn / (n as f64).powf(epsilon) + qn * (m as f64) / (n as f64);
    let ratio = psi2.to_f64().unwrap_or(f64::INFINITY) / bound_shape;
    Ok(Psi2BoundReport {
        n,
        m,
        epsilon,
        psi2,
        bound_shape,
        ratio,
        advisory_only: true,
    })
}

/// Count of degree-n monics with at least two distinct prime divisors at the
/// largest distinct degree, by enumeration.
pub fn multi_top_count(
    table: &PrimeTable,
    n: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "multi-top count needs n >= 1".into(),
        ));
    }
    ceiling.check(n)?;
    let count = fold_layer(
        table,
        n,
        workers,
        || 0u64,
        |acc, _, fac| {
            let dd = fac.degree_data();
            let top = dd.kth_largest(1);
            if top > 0 && dd.primes_of_degree(top).len() >= 2 {
                *acc += 1;
            }
            Ok(())
        },
        |a, b| a + b,
    )?;
    Ok(BigUint::from(count))
}

/// Exact sum over monic A of degree n of the number of member primes
/// dividing A at A's k-th largest distinct prime degree.
pub fn q_sum(
    table: &PrimeTable,
    subset: &PrimeSubset,
    k: u32,
    n: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<BigUint> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "q_sum needs k >= 1 and n >= 1".into(),
        ));
    }
    if subset.field() != table.field() {
        return Err(Error::FieldMismatch);
    }
    ceiling.check(n)?;
    let mask = subset.mask(table);
    let sum = fold_layer(
        table,
        n,
        workers,
        || 0u64,
        |acc, _, fac| {
            *acc += fac
                .degree_data()
                .subset_count_at_kth_largest(|p| mask.contains(p.degree, p.ordinal), k);
            Ok(())
        },
        |a, b| a + b,
    )?;
    Ok(BigUint::from(sum))
}

/// Two routes to the same number: the restricted mu-omega partial sum at
/// cutoff n against (Q2-sum - Q1-sum)/q^n at degree n.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub n: u32,
    pub subset: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub q1_sum: BigUint,
    pub q2_sum: BigUint,
    pub equal: bool,
}

pub fn equivalence_identity(
    table: &PrimeTable,
    subset: &PrimeSubset,
    n: u32,
    workers: usize,
    ceiling: &EnumCeiling,
) -> Result<EquivalenceReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("equivalence needs n >= 1".into()));
    }
    let ledger = series_ledger(
        table,
        SeriesWeight::MuOmega,
        &SeriesRestriction::InDS,
        Some(subset),
        n,
        false,
        workers,
        ceiling,
    )?;
    let lhs = ledger.partial(n).expect("cutoff present").clone();
    let q1 = q_sum(table, subset, 1, n, workers, ceiling)?;
    let q2 = q_sum(table, subset, 2, n, workers, ceiling)?;
    let rhs = BigRational::new(
        BigInt::from(q2.clone()) - BigInt::from(q1.clone()),
        BigInt::from(table.field().q()).pow(n),
    );
    let equal = lhs == rhs;
    Ok(EquivalenceReport {
        n,
        subset: subset.canonical().to_string(),
        lhs,
        rhs,
        q1_sum: q1,
        q2_sum: q2,
        equal,
    })
}

/// Exact Mertens product over primes of degree <= n, with a floating
/// comparison to n * e^gamma.
#[derive(Clone, Debug)]
pub struct MertensReport {
    pub n: u32,
    /// prod over d <= n of (1 - q^-d)^(-pi(d)), exact.
    pub product: BigRational,
    /// n * e^gamma.
    pub reference: f64,
    /// Floating value of the product divided by the reference; None at n = 0.
    pub ratio: Option<f64>,
}

pub fn mertens(field: &FieldSpec, n: u32) -> Result<MertensReport> {
    let q = field.q();
    let mut product = BigRational::one();
    let mut log_product = 0f64;
    for d in 1..=n {
        let pi = prime_count_u64(field, d)?;
        let qd = BigInt::from(q).pow(d);
        let factor = BigRational::new(qd.clone(), qd - BigInt::one());
        let pi_i32 = i32::try_from(pi)
            .map_err(|_| Error::InvalidArgument("prime count exceeds i32 exponent".into()))?;
        product *= factor.pow(pi_i32);
        log_product += -(pi as f64) * (-(q as f64).powi(-(d as i32))).ln_1p();
    }
    let reference = f64::from(n) * EULER_GAMMA.exp();
    let ratio = if n == 0 {
        None
    } else {
        Some(log_product.exp() / reference)
    };
    Ok(MertensReport {
        n,
        product,
        reference,
        ratio,
    })
}

/// Coefficient of z^j in prod over primes P with min_degree <= deg P <= j of
/// (1 - z^deg P): the product-side layer of the Euler-product tail. Needs
/// only exact prime counts.
pub fn mu_tail_product_layer(field: &FieldSpec, min_degree: u32, j: u32) -> Result<BigInt> {
    let mut coeffs = vec![BigInt::zero(); j as usize + 1];
    coeffs[0] = BigInt::one();
    for d in min_degree.max(1)..=j {
        let pi = prime_count_u64(field, d)?;
        let mut next = vec![BigInt::zero(); j as usize + 1];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = 0u64;
            while i + (t * u64::from(d)) as usize <= j as usize {
                let term = c * binomial(pi, t);
                let slot = &mut next[i + (t * u64::from(d)) as usize];
                if t.is_multiple_of(2) {
                    *slot += term;
                } else {
                    *slot -= term;
                }
                t += 1;
            }
        }
        coeffs = next;
    }
    Ok(coeffs[j as usize].clone())
}
