//! Field elements of GF(q).
//!
//! Prime fields GF(p) operate directly on residues mod p. Extension fields
//! GF(p^e) are realized as GF(p)[x]/(m(x)) for a monic irreducible m of
//! degree e; their elements are indexed by the base-p digit encoding of the
//! residue polynomial, and arithmetic runs off multiplication/inverse tables
//! built once at construction.
//!
//! Built-in moduli ship for q in {4, 8, 9}; any other prime-power order
//! needs a caller-supplied modulus, which is validated for irreducibility.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, always an index in `0..q`.
///
/// For prime fields the index is the residue itself; for extension fields it
/// encodes the residue polynomial c0 + c1*x + ... in base p as sum(ci * p^i).
pub type El = u32;

/// Largest extension-field order for which arithmetic tables are built.
const MAX_EXT_ORDER: u64 = 1024;

/// Largest prime characteristic accepted (keeps products in u64).
const MAX_PRIME: u64 = 1 << 30;

/// Description of GF(q) with q = p^e, carrying everything needed to compute.
pub struct FieldSpec {
    p: u64,
    e: u32,
    q: u64,
    /// Modulus coefficients over GF(p), little-endian, length e+1, monic.
    /// Empty for prime fields.
    modulus: Vec<u64>,
    /// Flattened q-by-q multiplication table; empty for prime fields.
    mul_table: Vec<El>,
    /// Multiplicative inverses indexed by element; entry 0 is unused.
    inv_table: Vec<El>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Built-in extension modulus for an order with no user-supplied one,
/// little-endian over GF(p).
fn builtin_modulus(q: u64) -> Option<Vec<u64>> {
    match q {
        4 => Some(vec![1, 1, 1]),    // x^2 + x + 1 over GF(2)
        8 => Some(vec![1, 1, 0, 1]), // x^3 + x + 1 over GF(2)
        9 => Some(vec![1, 0, 1]),    // x^2 + 1 over GF(3)
        _ => None,
    }
}

/// Factor q as p^e with p prime, if possible.
fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            return if rest == 1 { Some((p, e)) } else { None };
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Some((q, 1))
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > MAX_PRIME {
            return Err(Error::InvalidField(format!(
                "characteristic {p} exceeds the supported bound {MAX_PRIME}"
            )));
        }
        Ok(Arc::new(FieldSpec {
            p,
            e: 1,
            q: p,
            modulus: Vec::new(),
            mul_table: Vec::new(),
            inv_table: Vec::new(),
        }))
    }

    /// GF(q) for a prime power q, using the built-in modulus when q is not
    /// prime. Fails for prime powers without a built-in modulus.
    pub fn with_order(q: u64) -> Result<Arc<Self>> {
        let (p, e) = prime_power_split(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        if e == 1 {
            return Self::prime(p);
        }
        let modulus = builtin_modulus(q).ok_or_else(|| {
            Error::InvalidField(format!(
                "no built-in modulus for q = {q}; supply one explicitly"
            ))
        })?;
        Self::extension(p, e, &modulus)
    }

    /// GF(q) with an explicit modulus given as big-endian digits over GF(p),
    /// e.g. "101" for x^2 + 1 over GF(3).
    pub fn with_order_and_modulus(q: u64, modulus_text: &str) -> Result<Arc<Self>> {
        let (p, e) = prime_power_split(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        if e == 1 {
            return Err(Error::InvalidField(format!(
                "q = {q} is prime; a modulus only applies to extension fields"
            )));
        }
        let base = Self::prime(p)?;
        let poly = crate::poly::Poly::parse(modulus_text, &base)?;
        let coeffs: Vec<u64> = poly.coeffs().iter().map(|&c| c as u64).collect();
        Self::extension(p, e, &coeffs)
    }

    /// GF(p^e) with an explicit modulus, little-endian coefficients over GF(p).
    pub fn extension(p: u64, e: u32, modulus: &[u64]) -> Result<Arc<Self>> {
        if e < 1 {
            return Err(Error::InvalidField(
                "extension exponent must be >= 1".into(),
            ));
        }
        if e == 1 {
            return Self::prime(p);
        }
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_EXT_ORDER)
            .ok_or_else(|| {
                Error::InvalidField(format!(
                    "extension order p^e exceeds the supported bound {MAX_EXT_ORDER}"
                ))
            })?;
        if modulus.len() != e as usize + 1 {
            return Err(Error::InvalidField(format!(
                "modulus must have degree {e}, got degree {}",
                modulus.len().saturating_sub(1)
            )));
        }
        if modulus[e as usize] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus digit out of range".into()));
        }

        // Irreducibility over the prime field, checked with the same
        // deterministic test used for the prime store.
        let base = Self::prime(p)?;
        let mod_poly =
            crate::poly::Poly::from_coeffs(&base, modulus.iter().map(|&c| c as El).collect());
        let mod_monic = crate::poly::MonicPoly::new(mod_poly)?;
        if !crate::primes::is_irreducible(&mod_monic)? {
            return Err(Error::InvalidField(
                "modulus is not irreducible over GF(p)".into(),
            ));
        }

        let mut spec = FieldSpec {
            p,
            e,
            q,
            modulus: modulus.to_vec(),
            mul_table: Vec::new(),
            inv_table: Vec::new(),
        };
        spec.build_tables();
        Ok(Arc::new(spec))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0 as El; q * q];
        for a in 0..q {
            for b in a..q {
                let v = self.ext_mul_slow(a as El, b as El);
                mul[a * q + b] = v;
                mul[b * q + a] = v;
            }
        }
        let mut inv = vec![0 as El; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as El;
                    break;
                }
            }
        }
        self.mul_table = mul;
        self.inv_table = inv;
    }

    /// Polynomial multiplication mod the modulus, digit arithmetic over GF(p).
    /// Used only while building the tables.
    fn ext_mul_slow(&self, a: El, b: El) -> El {
        let p = self.p;
        let e = self.e as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * e];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // reduce by the monic modulus
        for k in (e..2 * e).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (j, &m) in self.modulus.iter().enumerate().take(e) {
                let idx = k - e + j;
                prod[idx] = (prod[idx] + c * (p - m) % p) % p;
            }
        }
        let mut out = 0u64;
        for i in (0..e).rev() {
            out = out * p + prod[i];
        }
        out as El
    }

    fn digits(&self, a: El) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut a = a as u64;
        for _ in 0..self.e {
            v.push(a % self.p);
            a /= self.p;
        }
        v
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ext_degree(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus digits over GF(p), little-endian; empty for prime fields.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> El {
        0
    }

    pub fn one(&self) -> El {
        1
    }

    pub fn add(&self, a: El, b: El) -> El {
        if self.e == 1 {
            (((a as u64) + (b as u64)) % self.p) as El
        } else {
            // digit-wise addition mod p
            let p = self.p;
            let mut x = a as u64;
            let mut y = b as u64;
            let mut out = 0u64;
            let mut scale = 1u64;
            for _ in 0..self.e {
                out += (x % p + y % p) % p * scale;
                x /= p;
                y /= p;
                scale *= p;
            }
            out as El
        }
    }

    pub fn neg(&self, a: El) -> El {
        if self.e == 1 {
            if a == 0 {
                0
            } else {
                (self.p - a as u64) as El
            }
        } else {
            let p = self.p;
            let mut x = a as u64;
            let mut out = 0u64;
            let mut scale = 1u64;
            for _ in 0..self.e {
                let d = x % p;
                out += if d == 0 { 0 } else { p - d } * scale;
                x /= p;
                scale *= p;
            }
            out as El
        }
    }

    pub fn sub(&self, a: El, b: El) -> El {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: El, b: El) -> El {
        if self.e == 1 {
            (((a as u64) * (b as u64)) % self.p) as El
        } else {
            self.mul_table[a as usize * self.q as usize + b as usize]
        }
    }

    /// Multiplicative inverse of a nonzero element.
    ///
    /// Panics on zero; callers guard on the zero case.
    pub fn inv(&self, a: El) -> El {
        assert!(a != 0, "inverse of zero");
        if self.e == 1 {
            self.pow(a, self.p - 2)
        } else {
            self.inv_table[a as usize]
        }
    }

    pub fn pow(&self, a: El, mut k: u64) -> El {
        let mut base = a;
        let mut acc = 1 as El;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// The image of an integer under the canonical map Z -> GF(q)
    /// (lands in the prime subfield).
    pub fn from_int(&self, n: u64) -> El {
        (n % self.p) as El
    }

    /// Iterator over all q elements, in index order.
    pub fn elements(&self) -> impl Iterator<Item = El> {
        0..self.q as El
    }
}
