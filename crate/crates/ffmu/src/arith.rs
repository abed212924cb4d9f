//! Factorization of monic polynomials and the arithmetic functions built on
//! prime degrees: the Mobius function, the set of distinct prime degrees with
//! its k-th largest/smallest accessors, minimal-degree prime divisors, and
//! subset-restricted prime counts at a given degree rank.
//!
//! The factor pipeline is fully deterministic: squarefree decomposition via
//! the derivative (with p-th root extraction when it vanishes), then
//! distinct-degree splitting, then equal-degree splitting by trial division
//! against the prime table.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::poly::{MonicPoly, Poly};
use crate::primes::{PrimeRecord, PrimeTable};

/// Complete prime factorization of a monic polynomial. Factors are sorted by
/// (degree, lexicographic) and pairwise distinct; their product with
/// multiplicities reconstructs the input exactly.
#[derive(Clone, Debug)]
pub struct Factorization {
    input: MonicPoly,
    factors: Vec<(PrimeRecord, u32)>,
}

/// The distinct prime degrees of a factorization, with the primes grouped by
/// degree. Ranks beyond the number of distinct degrees read as 0.
#[derive(Clone, Debug)]
pub struct DegreeData {
    /// Sorted ascending, no repeats.
    degrees: Vec<u32>,
    /// Parallel to `degrees`: the distinct primes of that degree.
    by_degree: Vec<Vec<PrimeRecord>>,
}

/// Factor a monic polynomial against a prime table covering its degree.
pub fn factor(a: &MonicPoly, table: &PrimeTable) -> Result<Factorization> {
    if a.field() != table.field() {
        return Err(Error::FieldMismatch);
    }
    table.require(a.degree())?;
    if a.degree() == 0 {
        return Ok(Factorization {
            input: a.clone(),
            factors: Vec::new(),
        });
    }

    let mut primes: Vec<(MonicPoly, u32)> = Vec::new();
    for (part, mult) in squarefree_parts(a.clone())? {
        for (prime, d) in distinct_degree_split(part)? {
            for p in equal_degree_split(prime, d, table)? {
                primes.push((p, mult));
            }
        }
    }
    primes.sort_by(|(p, _), (q, _)| p.cmp(q));

    let factors = primes
        .into_iter()
        .map(|(p, mult)| {
            let degree = p.degree();
            let ordinal = table
                .ordinal_of(&p)
                .expect("factor output must appear in the table");
            (
                PrimeRecord {
                    poly: p,
                    degree,
                    ordinal,
                },
                mult,
            )
        })
        .collect();
    Ok(Factorization {
        input: a.clone(),
        factors,
    })
}

/// Squarefree decomposition over GF(q), q = p^e: returns pairwise-coprime
/// squarefree parts with their multiplicities, product of part^mult = input.
fn squarefree_parts(f: MonicPoly) -> Result<Vec<(MonicPoly, u32)>> {
    let p = f.field().p() as u32;
    if f.degree() == 0 {
        return Ok(Vec::new());
    }
    let deriv = f.formal_derivative();
    if deriv.is_zero() {
        // every exponent divisible by p: take the p-th root and recurse
        let root = pth_root(&f)?;
        let inner = squarefree_parts(root)?;
        return Ok(inner.into_iter().map(|(g, m)| (g, m * p)).collect());
    }

    let mut out = Vec::new();
    // the derivative may be non-monic; gcd normalizes to monic
    let mut c = MonicPoly::new(f.as_poly().gcd(&deriv)?)?;
    let mut w = f.exact_div(&c)?;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c)?;
        let z = w.exact_div(&y)?;
        if !z.is_one() {
            out.push((z, i));
        }
        w = y;
        c = c.exact_div(&w)?;
        i += 1;
    }
    if !c.is_one() {
        let root = pth_root(&c)?;
        for (g, m) in squarefree_parts(root)? {
            out.push((g, m * p));
        }
    }
    Ok(out)
}

/// p-th root of a polynomial whose derivative vanishes: g with g^p = f.
/// Coefficients map through a -> a^(q/p), the inverse of the Frobenius.
fn pth_root(f: &MonicPoly) -> Result<MonicPoly> {
    let field = f.field();
    let p = field.p();
    let e = field.ext_degree();
    let root_exp = field.p().pow(e - 1);
    let coeffs = f.as_poly().coeffs();
    debug_assert_eq!(f.degree() as u64 % p, 0);
    let mut out = Vec::with_capacity(coeffs.len() / p as usize + 1);
    for (i, &ci) in coeffs.iter().enumerate() {
        if (i as u64).is_multiple_of(p) {
            out.push(field.pow(ci, root_exp));
        } else {
            debug_assert_eq!(ci, 0, "derivative was zero");
        }
    }
    MonicPoly::new(Poly::from_coeffs(field, out))
}

/// Distinct-degree splitting of a squarefree monic: returns (product of all
/// prime factors of degree d, d) pairs.
fn distinct_degree_split(f: MonicPoly) -> Result<Vec<(MonicPoly, u32)>> {
    let field = f.field();
    let q = field.q();
    let t = Poly::gen(field);
    let mut out = Vec::new();
    let mut w = f;
    let mut h = t.rem(w.as_poly())?;
    let mut d = 0u32;
    while w.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod_u64(q, w.as_poly())?;
        let g = h.sub(&t)?.gcd(w.as_poly())?;
        if !g.is_one() {
            let g = MonicPoly::new(g)?;
            w = w.exact_div(&g)?;
            out.push((g, d));
            if w.is_one() {
                return Ok(out);
            }
            h = h.rem(w.as_poly())?;
        }
    }
    if w.degree() > 0 {
        let d = w.degree();
        out.push((w, d));
    }
    Ok(out)
}

/// Equal-degree splitting by deterministic trial division against the prime
/// table: g is a squarefree product of primes all of degree d.
fn equal_degree_split(g: MonicPoly, d: u32, table: &PrimeTable) -> Result<Vec<MonicPoly>> {
    if g.degree() == d {
        return Ok(vec![g]);
    }
    let want = (g.degree() / d) as usize;
    let mut out = Vec::with_capacity(want);
    let mut rem = g;
    for p in table.primes_of_degree(d) {
        if rem.degree() == d {
            break;
        }
        if rem.divisible_by(p)? {
            out.push(p.clone());
            rem = rem.exact_div(p)?;
        }
    }
    debug_assert_eq!(rem.degree(), d);
    out.push(rem);
    debug_assert_eq!(out.len(), want);
    Ok(out)
}

impl Factorization {
    pub fn input(&self) -> &MonicPoly {
        &self.input
    }

    /// Sorted (prime, multiplicity) pairs.
    pub fn factors(&self) -> &[(PrimeRecord, u32)] {
        &self.factors
    }

    /// Product of prime^multiplicity; equals the input by construction.
    pub fn reconstruct(&self) -> Result<MonicPoly> {
        let mut acc = MonicPoly::one(self.input.field());
        for (rec, mult) in &self.factors {
            for _ in 0..*mult {
                acc = acc.mul(&rec.poly)?;
            }
        }
        Ok(acc)
    }

    /// Mobius function: 1 on the constant 1, (-1)^k on a product of k
    /// distinct primes, 0 otherwise.
    pub fn mobius(&self) -> i64 {
        if self.factors.iter().any(|(_, m)| *m >= 2) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, m)| *m == 1)
    }

    /// Number of prime factors counted with multiplicity. This is the
    /// classical count; no identity in this crate uses it.
    pub fn count_with_multiplicity(&self) -> u64 {
        self.factors.iter().map(|(_, m)| *m as u64).sum()
    }

    /// Number of distinct prime factors (not degrees).
    pub fn distinct_prime_count(&self) -> usize {
        self.factors.len()
    }

    pub fn degree_data(&self) -> DegreeData {
        let mut degrees: Vec<u32> = Vec::new();
        let mut by_degree: Vec<Vec<PrimeRecord>> = Vec::new();
        for (rec, _) in &self.factors {
            match degrees.binary_search(&rec.degree) {
                Ok(i) => by_degree[i].push(rec.clone()),
                Err(i) => {
                    degrees.insert(i, rec.degree);
                    by_degree.insert(i, vec![rec.clone()]);
                }
            }
        }
        DegreeData { degrees, by_degree }
    }

    /// All monic divisors, enumerated over the exponent box in lexicographic
    /// exponent-vector order. The first divisor yielded is 1.
    pub fn divisors(&self) -> Divisors<'_> {
        Divisors {
            factorization: self,
            exponents: vec![0; self.factors.len()],
            done: false,
        }
    }
}

/// Iterator over all monic divisors of a factored polynomial.
pub struct Divisors<'a> {
    factorization: &'a Factorization,
    exponents: Vec<u32>,
    done: bool,
}

impl Iterator for Divisors<'_> {
    type Item = MonicPoly;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut acc = MonicPoly::one(self.factorization.input.field());
        for (i, &e) in self.exponents.iter().enumerate() {
            for _ in 0..e {
                acc = acc
                    .mul(&self.factorization.factors[i].0.poly)
                    .expect("same field");
            }
        }
        // odometer step: lexicographic in the exponent vector
        let mut i = self.exponents.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.exponents[i] < self.factorization.factors[i].1 {
                self.exponents[i] += 1;
                break;
            }
            self.exponents[i] = 0;
        }
        Some(acc)
    }
}

impl DegreeData {
    /// The sorted set of distinct prime degrees.
    pub fn degree_set(&self) -> &[u32] {
        &self.degrees
    }

    /// Number of distinct prime degrees.
    pub fn omega(&self) -> u32 {
        self.degrees.len() as u32
    }

    /// k-th largest distinct degree (1-indexed); 0 when k exceeds omega.
    pub fn kth_largest(&self, k: u32) -> u32 {
        if k == 0 || k as usize > self.degrees.len() {
            0
        } else {
            self.degrees[self.degrees.len() - k as usize]
        }
    }

    /// k-th smallest distinct degree (1-indexed); 0 when k exceeds omega.
    pub fn kth_smallest(&self, k: u32) -> u32 {
        if k == 0 || k as usize > self.degrees.len() {
            0
        } else {
            self.degrees[k as usize - 1]
        }
    }

    /// The distinct primes of a given degree.
    pub fn primes_of_degree(&self, d: u32) -> &[PrimeRecord] {
        match self.degrees.binary_search(&d) {
            Ok(i) => &self.by_degree[i],
            Err(_) => &[],
        }
    }

    /// All prime divisors of minimal degree.
    pub fn min_degree_primes(&self) -> &[PrimeRecord] {
        if self.degrees.is_empty() {
            &[]
        } else {
            &self.by_degree[0]
        }
    }

    /// True iff there is a unique minimal-degree prime divisor and it
    /// satisfies the membership predicate.
    pub fn has_unique_min_prime_in(&self, in_subset: impl Fn(&PrimeRecord) -> bool) -> bool {
        let min = self.min_degree_primes();
        min.len() == 1 && in_subset(&min[0])
    }

    /// Number of member primes dividing the input with degree equal to the
    /// k-th largest distinct degree; 0 when k exceeds omega.
    pub fn subset_count_at_kth_largest(
        &self,
        in_subset: impl Fn(&PrimeRecord) -> bool,
        k: u32,
    ) -> u64 {
        let d = self.kth_largest(k);
        if d == 0 {
            return 0;
        }
        self.primes_of_degree(d)
            .iter()
            .filter(|p| in_subset(p))
            .count() as u64
    }
}

/// Convenience: the Mobius function of a monic polynomial.
pub fn mobius(a: &MonicPoly, table: &PrimeTable) -> Result<i64> {
    Ok(factor(a, table)?.mobius())
}

/// Number of monic divisors, from the factorization shape.
pub fn divisor_count(f: &Factorization) -> BigUint {
    let mut n = BigUint::from(1u32);
    for (_, m) in f.factors() {
        n *= BigUint::from(*m as u64 + 1);
    }
    n
}
