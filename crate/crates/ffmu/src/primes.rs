//! Primes of GF(q)[T]: deterministic irreducibility testing, exhaustive
//! enumeration by degree, the exact divisor-sum count, and a line-oriented
//! on-disk cache.
//!
//! Cache format (bit-exact):
//!
//! ```text
//! FFMU1 q=<q> maxdeg=<D>
//! D <d> <count>
//! <coefficient string>        one line per prime, lexicographic order
//! ...
//! END
//! ```

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{MonicPoly, Poly};

/// A known-irreducible monic polynomial together with its position among the
/// primes of its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeRecord {
    pub poly: MonicPoly,
    pub degree: u32,
    /// Index in lexicographic order among primes of this degree.
    pub ordinal: u64,
}

/// Deterministic irreducibility test: f of degree n is prime iff
/// T^(q^n) = T mod f and gcd(T^(q^(n/r)) - T, f) = 1 for every prime r | n.
pub fn is_irreducible(f: &MonicPoly) -> Result<bool> {
    let n = f.degree();
    if n == 0 {
        return Err(Error::ConstantInput);
    }
    let field = f.field();
    let q = field.q();
    let t = Poly::gen(field);
    let prime_divs = prime_divisors(n);
    // h walks through T^(q^i) mod f for i = 1..n
    let mut h = t.rem(f.as_poly())?;
    for i in 1..=n {
        h = h.powmod_u64(q, f.as_poly())?;
        if prime_divs.iter().any(|&r| i == n / r) {
            let g = h.sub(&t)?.gcd(f.as_poly())?;
            if !g.is_one() {
                return Ok(false);
            }
        }
    }
    Ok(h == t.rem(f.as_poly())?)
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Mobius function on the integers, for the divisor-sum count formula.
fn mobius_int(n: u32) -> i64 {
    let mut n = n;
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exact number of monic irreducibles of degree n over GF(q):
/// (1/n) * sum over d | n of mu(d) q^(n/d).
pub fn prime_count_exact(field: &FieldSpec, n: u32) -> BigUint {
    assert!(n >= 1, "degree must be positive");
    let q = BigInt::from(field.q());
    let mut sum = BigInt::zero();
    for d in 1..=n {
        if n.is_multiple_of(d) {
            sum += BigInt::from(mobius_int(d)) * q.pow(n / d);
        }
    }
    let (quot, rem) = num_integer::Integer::div_rem(&sum, &BigInt::from(n));
    debug_assert!(rem.is_zero());
    quot.to_biguint().expect("count is non-negative")
}

fn checked_layer_size(q: u64, d: u32) -> Result<u64> {
    q.checked_pow(d)
        .ok_or_else(|| Error::InvalidArgument(format!("q^{d} overflows the enumeration index")))
}

/// All monic irreducibles of degree d, in lexicographic order.
pub fn enumerate_primes(field: &Arc<FieldSpec>, d: u32) -> Result<Vec<MonicPoly>> {
    enumerate_primes_with_workers(field, d, 1)
}

fn enumerate_primes_with_workers(
    field: &Arc<FieldSpec>,
    d: u32,
    workers: usize,
) -> Result<Vec<MonicPoly>> {
    assert!(d >= 1);
    let total = checked_layer_size(field.q(), d)?;
    let scan = |range: std::ops::Range<u64>| -> Result<Vec<MonicPoly>> {
        let mut out = Vec::new();
        for idx in range {
            let cand = MonicPoly::from_index(field, d, idx);
            if is_irreducible(&cand)? {
                out.push(cand);
            }
        }
        Ok(out)
    };
    if workers <= 1 || total < 1024 {
        return scan(0..total);
    }
    // partition the candidate space by index prefix; chunk order preserves
    // the lexicographic result
    let chunks = (workers as u64 * 8).min(total);
    let step = total.div_ceil(chunks);
    let ranges: Vec<_> = (0..chunks)
        .map(|i| (i * step)..((i + 1) * step).min(total))
        .collect();
    let parts: Vec<Result<Vec<MonicPoly>>> = ranges.into_par_iter().map(scan).collect();
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Immutable store of all primes up to a maximum degree, with per-degree
/// counts validated against the exact formula.
#[derive(Debug)]
pub struct PrimeTable {
    field: Arc<FieldSpec>,
    max_degree: u32,
    /// by_degree[d - 1] holds the sorted primes of degree d.
    by_degree: Vec<Vec<MonicPoly>>,
}

impl PrimeTable {
    /// Enumerate and validate all primes of degree <= max_degree.
    pub fn build(field: &Arc<FieldSpec>, max_degree: u32) -> Result<Self> {
        Self::build_with_workers(field, max_degree, 1)
    }

    pub fn build_with_workers(
        field: &Arc<FieldSpec>,
        max_degree: u32,
        workers: usize,
    ) -> Result<Self> {
        let mut by_degree = Vec::with_capacity(max_degree as usize);
        for d in 1..=max_degree {
            let primes = enumerate_primes_with_workers(field, d, workers)?;
            let expected = prime_count_exact(field, d);
            let actual = BigUint::from(primes.len());
            if actual != expected {
                return Err(Error::CountMismatch {
                    degree: d,
                    expected: expected.to_u64().unwrap_or(u64::MAX),
                    actual: primes.len() as u64,
                });
            }
            by_degree.push(primes);
        }
        Ok(PrimeTable {
            field: Arc::clone(field),
            max_degree,
            by_degree,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Require coverage up to `degree`.
    pub fn require(&self, degree: u32) -> Result<()> {
        if degree > self.max_degree {
            return Err(Error::TableTooSmall {
                need: degree,
                have: self.max_degree,
            });
        }
        Ok(())
    }

    /// Sorted primes of the given degree (empty slice above max_degree).
    pub fn primes_of_degree(&self, d: u32) -> &[MonicPoly] {
        if d == 0 || d > self.max_degree {
            &[]
        } else {
            &self.by_degree[d as usize - 1]
        }
    }

    pub fn count(&self, d: u32) -> u64 {
        self.primes_of_degree(d).len() as u64
    }

    /// Position of a prime among those of its degree, if present.
    pub fn ordinal_of(&self, p: &MonicPoly) -> Option<u64> {
        let list = self.primes_of_degree(p.degree());
        list.binary_search(p).ok().map(|i| i as u64)
    }

    pub fn record(&self, degree: u32, ordinal: u64) -> Option<PrimeRecord> {
        self.primes_of_degree(degree)
            .get(ordinal as usize)
            .map(|p| PrimeRecord {
                poly: p.clone(),
                degree,
                ordinal,
            })
    }

    /// Extend coverage to a larger degree, reusing existing layers.
    pub fn extend_to(&mut self, max_degree: u32, workers: usize) -> Result<()> {
        for d in self.max_degree + 1..=max_degree {
            let primes = enumerate_primes_with_workers(&self.field, d, workers)?;
            let expected = prime_count_exact(&self.field, d);
            if BigUint::from(primes.len()) != expected {
                return Err(Error::CountMismatch {
                    degree: d,
                    expected: expected.to_u64().unwrap_or(u64::MAX),
                    actual: primes.len() as u64,
                });
            }
            self.by_degree.push(primes);
        }
        if max_degree > self.max_degree {
            self.max_degree = max_degree;
        }
        Ok(())
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "FFMU1 q={} maxdeg={}", self.field.q(), self.max_degree)?;
        for d in 1..=self.max_degree {
            let list = self.primes_of_degree(d);
            writeln!(w, "D {} {}", d, list.len())?;
            for p in list {
                writeln!(w, "{}", p.coeff_string())?;
            }
        }
        writeln!(w, "END")?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P, field: &Arc<FieldSpec>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(BufReader::new(file), field)
    }

    pub fn read_from<R: Read>(r: R, field: &Arc<FieldSpec>) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::VersionMismatch("empty file".into()))??;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("FFMU1") {
            return Err(Error::VersionMismatch(format!(
                "unrecognized header {header:?}"
            )));
        }
        let q: u64 = parse_kv(parts.next(), "q")?;
        let max_degree: u32 = parse_kv(parts.next(), "maxdeg")?;
        if q != field.q() {
            return Err(Error::VersionMismatch(format!(
                "table is for q = {q}, requested field has q = {}",
                field.q()
            )));
        }

        let mut by_degree = Vec::with_capacity(max_degree as usize);
        for d in 1..=max_degree {
            let dline = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing degree header for d = {d}")))??;
            let mut parts = dline.split_whitespace();
            if parts.next() != Some("D") {
                return Err(Error::Parse(format!(
                    "expected degree header, got {dline:?}"
                )));
            }
            let dd: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad degree header {dline:?}")))?;
            let count: u64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad degree header {dline:?}")))?;
            if dd != d {
                return Err(Error::Parse(format!(
                    "degree header out of order: expected {d}, got {dd}"
                )));
            }
            let expected = prime_count_exact(field, d);
            if BigUint::from(count) != expected {
                return Err(Error::CountMismatch {
                    degree: d,
                    expected: expected.to_u64().unwrap_or(u64::MAX),
                    actual: count,
                });
            }
            let mut list = Vec::with_capacity(count as usize);
            for _ in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Parse(format!("truncated prime list at d = {d}")))??;
                let p = MonicPoly::parse(line.trim(), field)?;
                if p.degree() != d {
                    return Err(Error::Parse(format!(
                        "prime {line:?} has degree {} in the degree-{d} block",
                        p.degree()
                    )));
                }
                if let Some(prev) = list.last() {
                    if *prev >= p {
                        return Err(Error::Parse(format!(
                            "prime list not strictly sorted at d = {d}"
                        )));
                    }
                }
                list.push(p);
            }
            by_degree.push(list);
        }
        let end = lines
            .next()
            .ok_or_else(|| Error::Parse("missing END line".into()))??;
        if end.trim() != "END" {
            return Err(Error::Parse(format!("expected END, got {end:?}")));
        }
        Ok(PrimeTable {
            field: Arc::clone(field),
            max_degree,
            by_degree,
        })
    }
}

fn parse_kv<T: std::str::FromStr>(part: Option<&str>, key: &str) -> Result<T> {
    part.and_then(|s| s.strip_prefix(key))
        .and_then(|s| s.strip_prefix('='))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::VersionMismatch(format!("missing {key}= in header")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Arc<FieldSpec> {
        FieldSpec::with_order(q).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        let f2 = gf(2);
        assert!(is_irreducible(&MonicPoly::parse("111", &f2).unwrap()).unwrap());
        assert!(!is_irreducible(&MonicPoly::parse("101", &f2).unwrap()).unwrap());
        for q in [2u64, 3, 4, 5] {
            let f = gf(q);
            for c in 0..q {
                let p = MonicPoly::parse(&format!("1,{c}"), &f).unwrap();
                assert!(is_irreducible(&p).unwrap(), "q={q} linear {p}");
            }
        }
        assert!(matches!(
            is_irreducible(&MonicPoly::one(&f2)),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn irreducibility_matches_trial_division_small_degrees() {
        // cross-check the deterministic test by trial division for d <= 4
        for q in [2u64, 3] {
            let f = gf(q);
            let mut known: Vec<MonicPoly> = Vec::new();
            for d in 1..=4u32 {
                for idx in 0..q.pow(d) {
                    let cand = MonicPoly::from_index(&f, d, idx);
                    let by_trial = !known
                        .iter()
                        .filter(|p| p.degree() <= d / 2)
                        .any(|p| cand.divisible_by(p).unwrap());
                    assert_eq!(
                        is_irreducible(&cand).unwrap(),
                        by_trial,
                        "q={q} cand={cand}"
                    );
                    if by_trial {
                        known.push(cand);
                    }
                }
            }
        }
    }

    #[test]
    fn count_examples() {
        let f2 = gf(2);
        let f3 = gf(3);
        let f7 = gf(7);
        assert_eq!(prime_count_exact(&f7, 1), BigUint::from(7u32));
        assert_eq!(prime_count_exact(&f2, 4), BigUint::from(3u32));
        assert_eq!(prime_count_exact(&f3, 2), BigUint::from(3u32));
    }

    #[test]
    fn enumeration_examples() {
        let f2 = gf(2);
        let d1 = enumerate_primes(&f2, 1).unwrap();
        assert_eq!(
            d1.iter().map(|p| p.coeff_string()).collect::<Vec<_>>(),
            ["10", "11"]
        );
        let d2 = enumerate_primes(&f2, 2).unwrap();
        assert_eq!(
            d2.iter().map(|p| p.coeff_string()).collect::<Vec<_>>(),
            ["111"]
        );
        let d3 = enumerate_primes(&f2, 3).unwrap();
        assert_eq!(
            d3.iter().map(|p| p.coeff_string()).collect::<Vec<_>>(),
            ["1011", "1101"]
        );
    }

    #[test]
    fn enumeration_count_matches_formula_to_degree_ten() {
        for q in [2u64, 3] {
            let f = gf(q);
            for d in 1..=10 {
                let primes = enumerate_primes(&f, d).unwrap();
                assert_eq!(
                    BigUint::from(primes.len()),
                    prime_count_exact(&f, d),
                    "q={q} d={d}"
                );
            }
        }
    }

    #[test]
    fn prime_number_theorem_diagnostic() {
        // |pi(n) * n / q^n - 1| <= q^(-n/2 + 1), checked in exact arithmetic:
        // |pi(n) * n - q^n| * q^(n/2) <= q^(n + 1)   (n even)
        for q in [2u64, 3] {
            let f = gf(q);
            for n in 1..=12u32 {
                let pi = BigInt::from(prime_count_exact(&f, n).to_u64().unwrap());
                let qn = BigInt::from(q).pow(n);
                let diff = (pi * n - &qn).magnitude().clone();
                // square both sides to avoid the half-integer exponent
                let lhs = diff.pow(2) * BigUint::from(q).pow(n);
                let rhs = BigUint::from(q).pow(2 * n + 2);
                assert!(lhs <= rhs, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn products_of_primes_are_composite() {
        let f2 = gf(2);
        let primes = enumerate_primes(&f2, 2)
            .unwrap()
            .into_iter()
            .chain(enumerate_primes(&f2, 3).unwrap())
            .collect::<Vec<_>>();
        for a in &primes {
            for b in &primes {
                let prod = a.mul(b).unwrap();
                assert!(!is_irreducible(&prod).unwrap(), "{a} * {b}");
            }
        }
    }

    #[test]
    fn table_roundtrip() {
        let f2 = gf(2);
        let table = PrimeTable::build(&f2, 5).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        let loaded = PrimeTable::read_from(&buf[..], &f2).unwrap();
        assert_eq!(loaded.max_degree(), 5);
        for d in 1..=5 {
            assert_eq!(loaded.primes_of_degree(d), table.primes_of_degree(d));
        }
        // byte-exact: writing the loaded table reproduces the file
        let mut buf2 = Vec::new();
        loaded.write_to(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn table_file_shape() {
        let f2 = gf(2);
        let table = PrimeTable::build(&f2, 2).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "FFMU1 q=2 maxdeg=2\nD 1 2\n10\n11\nD 2 1\n111\nEND\n");
    }

    #[test]
    fn empty_table_is_valid() {
        let f2 = gf(2);
        let table = PrimeTable::build(&f2, 0).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "FFMU1 q=2 maxdeg=0\nEND\n"
        );
        let loaded = PrimeTable::read_from(&buf[..], &f2).unwrap();
        assert_eq!(loaded.max_degree(), 0);
    }

    #[test]
    fn tampered_count_is_rejected() {
        let f2 = gf(2);
        let table = PrimeTable::build(&f2, 3).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("D 2 1", "D 2 2");
        let err = PrimeTable::read_from(text.as_bytes(), &f2).unwrap_err();
        assert!(matches!(err, Error::CountMismatch { degree: 2, .. }));
    }

    #[test]
    fn wrong_q_is_rejected() {
        let f2 = gf(2);
        let f3 = gf(3);
        let table = PrimeTable::build(&f2, 2).unwrap();
        let mut buf = Vec::new();
        table.write_to(&mut buf).unwrap();
        assert!(matches!(
            PrimeTable::read_from(&buf[..], &f3),
            Err(Error::VersionMismatch(_))
        ));
    }

    #[test]
    fn parallel_build_matches_serial() {
        let f2 = gf(2);
        let serial = PrimeTable::build(&f2, 8).unwrap();
        let parallel = PrimeTable::build_with_workers(&f2, 8, 4).unwrap();
        for d in 1..=8 {
            assert_eq!(serial.primes_of_degree(d), parallel.primes_of_degree(d));
        }
    }

    #[test]
    fn ordinals() {
        let f2 = gf(2);
        let table = PrimeTable::build(&f2, 3).unwrap();
        let p = MonicPoly::parse("1101", &f2).unwrap();
        assert_eq!(table.ordinal_of(&p), Some(1));
        let rec = table.record(3, 1).unwrap();
        assert_eq!(rec.poly, p);
        assert_eq!(rec.degree, 3);
        let composite = MonicPoly::parse("1001", &f2).unwrap();
        assert_eq!(table.ordinal_of(&composite), None);
    }
}
