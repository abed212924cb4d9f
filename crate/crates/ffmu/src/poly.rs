//! Polynomials over GF(q): the general `Poly` workhorse and the `MonicPoly`
//! newtype that carries the monic invariant everywhere it matters.
//!
//! Coefficients are stored little-endian (index = exponent) and kept
//! normalized: no trailing zero high coefficients, the zero polynomial is the
//! empty vector. All text interfaces are big-endian digit strings: "111" is
//! T^2+T+1 over GF(2), "1,2,0" is T^2+2T over GF(3). Digits are element
//! indices, comma-separated when q > 10. A symbolic form ("T^2+T+1") is also
//! accepted on input.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{El, FieldSpec};

/// A polynomial over GF(q), possibly zero, possibly non-monic.
#[derive(Clone)]
pub struct Poly {
    field: Arc<FieldSpec>,
    /// Little-endian coefficients, normalized (no trailing zeros).
    coeffs: Vec<El>,
}

/// Quotient and remainder of an exact division: dividend = divisor * quotient + remainder.
#[derive(Clone, Debug)]
pub struct PolyPair {
    /// Monic or zero whenever the dividend and divisor are monic.
    pub quotient: Poly,
    /// Degree strictly below the divisor's; possibly zero, possibly non-monic.
    pub remainder: Poly,
}

impl Poly {
    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Poly {
            field: Arc::clone(field),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &Arc<FieldSpec>, c: El) -> Self {
        let mut p = Poly::zero(field);
        if c != 0 {
            p.coeffs.push(c);
        }
        p
    }

    /// The generator T.
    pub fn gen(field: &Arc<FieldSpec>) -> Self {
        Poly {
            field: Arc::clone(field),
            coeffs: vec![0, 1],
        }
    }

    /// Build from little-endian coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(field: &Arc<FieldSpec>, mut coeffs: Vec<El>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly {
            field: Arc::clone(field),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[El] {
        &self.coeffs
    }

    /// Coefficient of T^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> El {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<El> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(1)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    fn check_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(f.add(self.coeff(i), other.coeff(i)));
        }
        Ok(Poly::from_coeffs(f, out))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(f.sub(self.coeff(i), other.coeff(i)));
        }
        Ok(Poly::from_coeffs(f, out))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(f));
        }
        let mut out = vec![0 as El; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(Poly::from_coeffs(f, out))
    }

    /// Scale by a field element.
    pub fn scale(&self, c: El) -> Poly {
        let f = &self.field;
        if c == 0 {
            return Poly::zero(f);
        }
        let out = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        Poly::from_coeffs(f, out)
    }

    /// Long division: self = divisor * quotient + remainder with
    /// deg(remainder) < deg(divisor).
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(divisor)?;
        if divisor.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let f = &self.field;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((Poly::zero(f), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading().unwrap());
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dd;
        let mut quot = vec![0 as El; qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd];
            if c == 0 {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[k] = factor;
            for (j, &m) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(factor, m));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(f, quot), Poly::from_coeffs(f, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(divisor)?.1)
    }

    /// True iff `divisor` divides self exactly.
    pub fn divisible_by(&self, divisor: &Poly) -> Result<bool> {
        Ok(self.rem(divisor)?.is_zero())
    }

    /// Monic greatest common divisor; gcd(0, 0) is an error.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        let lead = a.leading().expect("nonzero by construction");
        Ok(a.scale(self.field.inv(lead)))
    }

    /// self^exponent mod modulus by square-and-multiply.
    pub fn powmod(&self, exponent: &BigUint, modulus: &Poly) -> Result<Poly> {
        self.check_field(modulus)?;
        if modulus.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let f = &self.field;
        if modulus.degree() == Some(0) {
            return Ok(Poly::zero(f));
        }
        let mut acc = Poly::constant(f, 1);
        if exponent.is_zero() {
            return Ok(acc);
        }
        let base = self.rem(modulus)?;
        let bits = exponent.bits();
        for i in (0..bits).rev() {
            acc = acc.mul(&acc)?.rem(modulus)?;
            if exponent.bit(i) {
                acc = acc.mul(&base)?.rem(modulus)?;
            }
        }
        Ok(acc)
    }

    pub fn powmod_u64(&self, exponent: u64, modulus: &Poly) -> Result<Poly> {
        self.powmod(&BigUint::from(exponent), modulus)
    }

    /// Plain power, no reduction. Intended for small exponents in oracles.
    pub fn pow(&self, k: u32) -> Result<Poly> {
        let mut acc = Poly::constant(&self.field, 1);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Coefficient-wise formal derivative in characteristic p; may be zero.
    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return Poly::zero(f);
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(f.mul(c, f.from_int(i as u64)));
        }
        Poly::from_coeffs(f, out)
    }

    /// Parse a general (not necessarily monic) polynomial. Accepts the digit
    /// form of the crate's text interfaces and the symbolic form with
    /// variable T. "0" parses as the zero polynomial.
    pub fn parse(text: &str, field: &Arc<FieldSpec>) -> Result<Poly> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyPoly);
        }
        if text.contains('T') || text.contains('t') {
            return parse_symbolic(text, field);
        }
        let q = field.q();
        let digits: Vec<u64> = if text.contains(',') {
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad digit {s:?}")))
                })
                .collect::<Result<_>>()?
        } else if q > 10 && text.len() > 1 {
            return Err(Error::Parse(
                "digits must be comma-separated when q > 10".into(),
            ));
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(u64::from)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        for &d in &digits {
            if d >= q {
                return Err(Error::DigitOutOfRange { digit: d, q });
            }
        }
        // digits are big-endian
        let coeffs: Vec<El> = digits.iter().rev().map(|&d| d as El).collect();
        Ok(Poly::from_coeffs(field, coeffs))
    }

    /// Big-endian digit string; "0" for the zero polynomial. Digits are
    /// comma-separated when q > 10.
    pub fn coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sep = if self.field.q() > 10 { "," } else { "" };
        self.coeffs
            .iter()
            .rev()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

fn parse_symbolic(text: &str, field: &Arc<FieldSpec>) -> Result<Poly> {
    let q = field.q();
    let mut acc = Poly::zero(field);
    for term in text.split('+') {
        let term = term.trim().replace(' ', "");
        if term.is_empty() {
            return Err(Error::Parse("empty term".into()));
        }
        let lower = term.to_lowercase();
        let (coeff_part, exp) = if let Some(pos) = lower.find('t') {
            let coeff_str = term[..pos].trim_end_matches('*');
            let rest = &lower[pos + 1..];
            let exp = if rest.is_empty() {
                1u32
            } else if let Some(e) = rest.strip_prefix('^') {
                e.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?
            } else {
                return Err(Error::Parse(format!("bad term {term:?}")));
            };
            (coeff_str.to_string(), exp)
        } else {
            (term.clone(), 0u32)
        };
        let c: u64 = if coeff_part.is_empty() {
            1
        } else {
            coeff_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {coeff_part:?}")))?
        };
        if c >= q {
            return Err(Error::DigitOutOfRange { digit: c, q });
        }
        let mut mono = vec![0 as El; exp as usize + 1];
        mono[exp as usize] = c as El;
        acc = acc.add(&Poly::from_coeffs(field, mono))?;
    }
    Ok(acc)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.coeff_string())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.coeff_string())
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.coeffs.hash(state);
    }
}

/// A monic polynomial over GF(q): nonzero, leading coefficient 1. The
/// constant polynomial 1 is the unique degree-0 value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn new(p: Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::EmptyPoly);
        }
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        Ok(MonicPoly(p))
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        MonicPoly(Poly::constant(field, 1))
    }

    /// The generator T.
    pub fn gen(field: &Arc<FieldSpec>) -> Self {
        MonicPoly(Poly::gen(field))
    }

    /// Parse per the coefficient-string interface: big-endian digits with
    /// leading digit 1, or the symbolic form.
    pub fn parse(text: &str, field: &Arc<FieldSpec>) -> Result<Self> {
        let p = Poly::parse(text, field)?;
        // a digit string with a leading zero would have been silently trimmed;
        // reject anything that does not round-trip as monic of full length
        if p.is_zero() {
            return Err(Error::NotMonic);
        }
        if !p.is_monic() {
            return Err(Error::NotMonic);
        }
        let trimmed = text.trim();
        if !trimmed.contains('T') && !trimmed.contains('t') {
            let ndigits = if trimmed.contains(',') {
                trimmed.split(',').count()
            } else {
                trimmed.len()
            };
            if ndigits != p.coeffs.len() {
                return Err(Error::NotMonic);
            }
        }
        Ok(MonicPoly(p))
    }

    /// The idx-th monic polynomial of the given degree, counting in
    /// lexicographic coefficient-string order: idx's base-q digits are the
    /// non-leading coefficients, most significant first.
    pub fn from_index(field: &Arc<FieldSpec>, degree: u32, idx: u64) -> Self {
        let q = field.q();
        let d = degree as usize;
        let mut coeffs = vec![0 as El; d + 1];
        coeffs[d] = 1;
        let mut n = idx;
        for c in coeffs.iter_mut().take(d) {
            *c = (n % q) as El;
            n /= q;
        }
        debug_assert_eq!(n, 0, "index out of range for degree {degree}");
        MonicPoly(Poly {
            field: Arc::clone(field),
            coeffs,
        })
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        self.0.field()
    }

    /// Degree; 0 only for the constant polynomial 1.
    pub fn degree(&self) -> u32 {
        (self.0.coeffs.len() - 1) as u32
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Exact product; degrees add.
    pub fn mul(&self, other: &MonicPoly) -> Result<MonicPoly> {
        Ok(MonicPoly(self.0.mul(&other.0)?))
    }

    /// Long division by another monic polynomial.
    pub fn divrem(&self, divisor: &MonicPoly) -> Result<PolyPair> {
        let (quotient, remainder) = self.0.divrem(&divisor.0)?;
        Ok(PolyPair {
            quotient,
            remainder,
        })
    }

    /// Exact division; error if the divisor does not divide self.
    pub fn exact_div(&self, divisor: &MonicPoly) -> Result<MonicPoly> {
        let pair = self.divrem(divisor)?;
        if !pair.remainder.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "{divisor} does not divide {self}"
            )));
        }
        MonicPoly::new(pair.quotient)
    }

    pub fn divisible_by(&self, divisor: &MonicPoly) -> Result<bool> {
        self.0.divisible_by(&divisor.0)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &MonicPoly) -> Result<MonicPoly> {
        MonicPoly::new(self.0.gcd(&other.0)?)
    }

    pub fn powmod(&self, exponent: &BigUint, modulus: &MonicPoly) -> Result<Poly> {
        self.0.powmod(exponent, &modulus.0)
    }

    pub fn formal_derivative(&self) -> Poly {
        self.0.derivative()
    }

    pub fn coeff_string(&self) -> String {
        self.0.coeff_string()
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonicPoly({})", self.coeff_string())
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonicPoly {
    /// Order by degree, then by big-endian coefficient tuple. Matches the
    /// lexicographic coefficient-string order for q <= 10.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .coeffs
            .len()
            .cmp(&other.0.coeffs.len())
            .then_with(|| self.0.coeffs.iter().rev().cmp(other.0.coeffs.iter().rev()))
    }
}
