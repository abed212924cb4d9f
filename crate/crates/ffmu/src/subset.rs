//! Subsets of the primes of GF(q)[T] with declared natural densities.
//!
//! The spec grammar:
//!
//! ```text
//! all
//! none
//! list:<poly>[,<poly>...]         density 0
//! ap:<modulus>:<residue>          primes congruent to the residue; density 1/Phi(M)
//! bernoulli:<rho>:<seed>          seeded hash membership; density rho
//! degmod:<r>:<m>                  primes with degree = r mod m; no density
//! ```
//!
//! Polynomials accept both the digit form ("111") and the symbolic form
//! ("T^2+T+1"). Bernoulli membership is derived from a seed-keyed SHA-256 of
//! the prime's coefficient string, so it is deterministic across runs and
//! platforms. The degmod family has no degree-wise natural density (the
//! ratio oscillates) and is rejected by any operation that needs one.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{MonicPoly, Poly};
use crate::primes::{is_irreducible, prime_count_exact, PrimeTable};

#[derive(Clone, Debug)]
enum SubsetKind {
    All,
    None,
    List(Vec<MonicPoly>),
    Ap {
        modulus: MonicPoly,
        /// Residue reduced mod the modulus; nonzero.
        residue: Poly,
    },
    Bernoulli {
        rho: BigRational,
        seed: u64,
    },
    DegMod {
        r: u32,
        m: u32,
    },
}

/// A subset of the primes, with a deterministic membership predicate and a
/// declared natural density (None when the density is undefined).
#[derive(Clone, Debug)]
pub struct PrimeSubset {
    field: Arc<FieldSpec>,
    kind: SubsetKind,
    canonical: String,
}

impl PrimeSubset {
    pub fn all(field: &Arc<FieldSpec>) -> Self {
        PrimeSubset {
            field: Arc::clone(field),
            kind: SubsetKind::All,
            canonical: "all".into(),
        }
    }

    pub fn parse(text: &str, field: &Arc<FieldSpec>) -> Result<Self> {
        let text = text.trim();
        let (kind, canonical) = match text {
            "all" => (SubsetKind::All, "all".to_string()),
            "none" => (SubsetKind::None, "none".to_string()),
            _ => {
                let (head, rest) = text
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidSubset(format!("unrecognized spec {text:?}")))?;
                match head {
                    "list" => parse_list(rest, field)?,
                    "ap" => parse_ap(rest, field)?,
                    "bernoulli" => parse_bernoulli(rest)?,
                    "degmod" => parse_degmod(rest)?,
                    _ => {
                        return Err(Error::InvalidSubset(format!(
                            "unrecognized spec kind {head:?}"
                        )))
                    }
                }
            }
        };
        Ok(PrimeSubset {
            field: Arc::clone(field),
            kind,
            canonical,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Normalized spec text; stable across equivalent inputs.
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    /// Declared natural density, None when undefined.
    pub fn density(&self) -> Option<BigRational> {
        match &self.kind {
            SubsetKind::All => Some(BigRational::one()),
            SubsetKind::None | SubsetKind::List(_) => Some(BigRational::zero()),
            SubsetKind::Ap { modulus, .. } => {
                // Phi(M) = q^deg M - 1 for irreducible M
                let q = BigInt::from(self.field.q());
                let units = q.pow(modulus.degree()) - BigInt::one();
                Some(BigRational::new(BigInt::one(), units))
            }
            SubsetKind::Bernoulli { rho, .. } => Some(rho.clone()),
            SubsetKind::DegMod { .. } => None,
        }
    }

    /// Membership predicate; the argument is assumed prime.
    pub fn contains(&self, p: &MonicPoly) -> bool {
        match &self.kind {
            SubsetKind::All => true,
            SubsetKind::None => false,
            SubsetKind::List(list) => list.iter().any(|q| q == p),
            SubsetKind::Ap { modulus, residue } => match p.as_poly().rem(modulus.as_poly()) {
                Ok(r) => r == *residue,
                Err(_) => false,
            },
            SubsetKind::Bernoulli { rho, seed } => bernoulli_member(*seed, p, rho),
            SubsetKind::DegMod { r, m } => p.degree() % m == *r,
        }
    }

    /// Per-degree membership bitmap aligned with the table's ordinals.
    /// Factor-heavy scans consult this instead of re-hashing per query.
    pub fn mask(&self, table: &PrimeTable) -> SubsetMask {
        let per_degree = (1..=table.max_degree())
            .map(|d| {
                table
                    .primes_of_degree(d)
                    .iter()
                    .map(|p| self.contains(p))
                    .collect()
            })
            .collect();
        SubsetMask { per_degree }
    }

    /// Exact count of member primes of degree n, by filtering the table.
    pub fn count_at_degree(&self, n: u32, table: &PrimeTable) -> Result<u64> {
        table.require(n)?;
        Ok(table
            .primes_of_degree(n)
            .iter()
            .filter(|p| self.contains(p))
            .count() as u64)
    }

    /// Exact density-error statistics per degree: for each d up to the
    /// table's coverage, the running supremum e(d) of
    /// pi_S(e) - delta * pi(e) over e <= d, and the tail supremum
    /// v(d) of e(e)/q^e over d <= e <= max (truncated at the table edge,
    /// which is recorded in the output).
    pub fn density_error_stats(&self, table: &PrimeTable) -> Result<DensityStats> {
        let delta = self.density().ok_or(Error::DensityUndefined)?;
        let maxdeg = table.max_degree();
        let q = BigInt::from(self.field.q());

        let mut e_vals = Vec::with_capacity(maxdeg as usize);
        let mut running: Option<BigRational> = None;
        for d in 1..=maxdeg {
            let pi_s = BigInt::from(self.count_at_degree(d, table)?);
            let pi = BigInt::from(prime_count_exact(&self.field, d));
            let diff = BigRational::from_integer(pi_s) - &delta * BigRational::from_integer(pi);
            running = Some(match running {
                Some(prev) if prev >= diff => prev,
                _ => diff,
            });
            e_vals.push(running.clone().unwrap());
        }

        // tail suprema of e(d)/q^d, swept from the top degree down
        let mut v_vals = vec![BigRational::zero(); maxdeg as usize];
        let mut tail: Option<BigRational> = None;
        for d in (1..=maxdeg).rev() {
            let scaled = &e_vals[d as usize - 1] / BigRational::from_integer(q.pow(d));
            tail = Some(match tail {
                Some(prev) if prev >= scaled => prev,
                _ => scaled,
            });
            v_vals[d as usize - 1] = tail.clone().unwrap();
        }

        Ok(DensityStats {
            subset: self.canonical.clone(),
            delta,
            truncated_at: maxdeg,
            rows: (1..=maxdeg)
                .map(|d| {
                    (
                        d,
                        e_vals[d as usize - 1].clone(),
                        v_vals[d as usize - 1].clone(),
                    )
                })
                .collect(),
        })
    }
}

/// Membership bitmap per degree, ordinal-indexed.
#[derive(Clone, Debug)]
pub struct SubsetMask {
    per_degree: Vec<Vec<bool>>,
}

impl SubsetMask {
    pub fn contains(&self, degree: u32, ordinal: u64) -> bool {
        self.per_degree
            .get(degree as usize - 1)
            .and_then(|v| v.get(ordinal as usize))
            .copied()
            .unwrap_or(false)
    }
}

/// Exact density-error report: rows of (degree, e(d), v(d)).
#[derive(Clone, Debug)]
pub struct DensityStats {
    pub subset: String,
    pub delta: BigRational,
    /// The tail supremum in v is truncated at this degree.
    pub truncated_at: u32,
    pub rows: Vec<(u32, BigRational, BigRational)>,
}

fn bernoulli_member(seed: u64, p: &MonicPoly, rho: &BigRational) -> bool {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_be_bytes());
    hasher.update(b":");
    hasher.update(p.coeff_string().as_bytes());
    let digest = hasher.finalize();
    let h = u64::from_be_bytes(digest[..8].try_into().expect("sha256 is long enough"));
    // member iff h / 2^64 < rho, compared exactly
    let lhs = BigInt::from(h) * rho.denom();
    let rhs = rho.numer() * (BigInt::from(1u8) << 64);
    lhs < rhs
}

fn split_polys(text: &str, field: &Arc<FieldSpec>) -> Result<Vec<String>> {
    // entries are comma-separated; for q > 10 the digits themselves use
    // commas, so entries switch to semicolons
    let sep = if field.q() > 10 { ';' } else { ',' };
    Ok(text.split(sep).map(|s| s.trim().to_string()).collect())
}

fn parse_list(rest: &str, field: &Arc<FieldSpec>) -> Result<(SubsetKind, String)> {
    if rest.trim().is_empty() {
        return Err(Error::InvalidSubset("empty list".into()));
    }
    let mut polys = Vec::new();
    for tok in split_polys(rest, field)? {
        let p = MonicPoly::parse(&tok, field)
            .map_err(|e| Error::InvalidSubset(format!("bad list entry {tok:?}: {e}")))?;
        polys.push(p);
    }
    polys.sort();
    polys.dedup();
    let sep = if field.q() > 10 { ";" } else { "," };
    let canonical = format!(
        "list:{}",
        polys
            .iter()
            .map(|p| p.coeff_string())
            .collect::<Vec<_>>()
            .join(sep)
    );
    Ok((SubsetKind::List(polys), canonical))
}

fn parse_ap(rest: &str, field: &Arc<FieldSpec>) -> Result<(SubsetKind, String)> {
    let (mod_str, res_str) = rest
        .split_once(':')
        .ok_or_else(|| Error::InvalidSubset("ap needs <modulus>:<residue>".into()))?;
    let modulus = MonicPoly::parse(mod_str.trim(), field)
        .map_err(|e| Error::InvalidSubset(format!("bad modulus: {e}")))?;
    if modulus.degree() == 0 {
        return Err(Error::InvalidSubset(
            "ap modulus must be non-constant".into(),
        ));
    }
    if !is_irreducible(&modulus)? {
        return Err(Error::InvalidSubset(
            "ap modulus must be irreducible".into(),
        ));
    }
    let residue_raw = Poly::parse(res_str.trim(), field)
        .map_err(|e| Error::InvalidSubset(format!("bad residue: {e}")))?;
    let residue = residue_raw.rem(modulus.as_poly())?;
    if residue.is_zero() {
        return Err(Error::InvalidSubset(
            "residue is not coprime to the modulus".into(),
        ));
    }
    let canonical = format!("ap:{}:{}", modulus.coeff_string(), residue.coeff_string());
    Ok((SubsetKind::Ap { modulus, residue }, canonical))
}

fn parse_bernoulli(rest: &str) -> Result<(SubsetKind, String)> {
    let (rho_str, seed_str) = rest
        .split_once(':')
        .ok_or_else(|| Error::InvalidSubset("bernoulli needs <rho>:<seed>".into()))?;
    let rho = parse_rational(rho_str.trim())?;
    if rho < BigRational::zero() || rho > BigRational::one() {
        return Err(Error::InvalidSubset("rho must lie in [0, 1]".into()));
    }
    let seed: u64 = seed_str
        .trim()
        .parse()
        .map_err(|_| Error::InvalidSubset(format!("bad seed {seed_str:?}")))?;
    let canonical = format!("bernoulli:{}/{}:{}", rho.numer(), rho.denom(), seed);
    Ok((SubsetKind::Bernoulli { rho, seed }, canonical))
}

fn parse_degmod(rest: &str) -> Result<(SubsetKind, String)> {
    let (r_str, m_str) = rest
        .split_once(':')
        .ok_or_else(|| Error::InvalidSubset("degmod needs <r>:<m>".into()))?;
    let r: u32 = r_str
        .trim()
        .parse()
        .map_err(|_| Error::InvalidSubset(format!("bad residue {r_str:?}")))?;
    let m: u32 = m_str
        .trim()
        .parse()
        .map_err(|_| Error::InvalidSubset(format!("bad modulus {m_str:?}")))?;
    if m == 0 || r >= m {
        return Err(Error::InvalidSubset("degmod needs 0 <= r < m".into()));
    }
    Ok((SubsetKind::DegMod { r, m }, format!("degmod:{r}:{m}")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidSubset(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d.trim())?;
            if den.is_zero() {
                return Err(Error::InvalidSubset("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n.trim())?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::PrimeTable;
    use num_traits::ToPrimitive;

    fn gf2() -> Arc<FieldSpec> {
        FieldSpec::prime(2).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grammar_examples() {
        let f2 = gf2();
        let all = PrimeSubset::parse("all", &f2).unwrap();
        assert_eq!(all.density(), Some(rat(1, 1)));

        let ap = PrimeSubset::parse("ap:111:1", &f2).unwrap();
        assert_eq!(ap.density(), Some(rat(1, 3)));

        let list = PrimeSubset::parse("list:T,T+1", &f2).unwrap();
        assert_eq!(list.density(), Some(rat(0, 1)));
        assert_eq!(list.canonical(), "list:10,11");

        let none = PrimeSubset::parse("none", &f2).unwrap();
        assert_eq!(none.density(), Some(rat(0, 1)));

        let bern = PrimeSubset::parse("bernoulli:1/2:42", &f2).unwrap();
        assert_eq!(bern.density(), Some(rat(1, 2)));
        assert_eq!(bern.canonical(), "bernoulli:1/2:42");

        let degmod = PrimeSubset::parse("degmod:1:2", &f2).unwrap();
        assert_eq!(degmod.density(), None);
    }

    #[test]
    fn grammar_errors() {
        let f2 = gf2();
        assert!(PrimeSubset::parse("everything", &f2).is_err());
        // T^2+1 = (T+1)^2 is not irreducible
        assert!(PrimeSubset::parse("ap:101:1", &f2).is_err());
        // residue 0 is not coprime to the modulus
        assert!(PrimeSubset::parse("ap:111:0", &f2).is_err());
        // residue that reduces to 0
        assert!(PrimeSubset::parse("ap:111:111", &f2).is_err());
        assert!(PrimeSubset::parse("bernoulli:3/2:1", &f2).is_err());
        assert!(PrimeSubset::parse("degmod:2:2", &f2).is_err());
    }

    #[test]
    fn list_entries_use_semicolons_past_base_ten() {
        let f13 = FieldSpec::prime(13).unwrap();
        let s = PrimeSubset::parse("list:1,0;1,12", &f13).unwrap();
        assert_eq!(s.canonical(), "list:1,0;1,12");
        let t = MonicPoly::parse("1,0", &f13).unwrap();
        let other = MonicPoly::parse("1,1", &f13).unwrap();
        assert!(s.contains(&t));
        assert!(!s.contains(&other));
    }

    #[test]
    fn membership_basics() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 6).unwrap();
        let t = MonicPoly::parse("10", &f2).unwrap();
        let t1 = MonicPoly::parse("11", &f2).unwrap();

        let list = PrimeSubset::parse("list:T", &f2).unwrap();
        assert!(list.contains(&t));
        assert!(!list.contains(&t1));
        assert_eq!(list.count_at_degree(1, &table).unwrap(), 1);

        let all = PrimeSubset::parse("all", &f2).unwrap();
        for d in 1..=6 {
            assert_eq!(
                all.count_at_degree(d, &table).unwrap(),
                prime_count_exact(&f2, d).to_u64().unwrap()
            );
        }
    }

    #[test]
    fn ap_membership_by_exhaustive_residue_computation() {
        // primes congruent to 1 mod T^2+T+1 among the three quartic primes,
        // pinned by the independent residue filter below
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 8).unwrap();
        let ap = PrimeSubset::parse("ap:111:1", &f2).unwrap();
        let modulus = MonicPoly::parse("111", &f2).unwrap();
        let one = Poly::constant(&f2, 1);
        for d in 1..=8 {
            let by_hand = table
                .primes_of_degree(d)
                .iter()
                .filter(|p| p.as_poly().rem(modulus.as_poly()).unwrap() == one)
                .count() as u64;
            assert_eq!(ap.count_at_degree(d, &table).unwrap(), by_hand, "d = {d}");
        }
        // pinned value for the quartic layer
        assert_eq!(ap.count_at_degree(4, &table).unwrap(), 1);
    }

    #[test]
    fn bernoulli_is_deterministic() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 8).unwrap();
        let a = PrimeSubset::parse("bernoulli:1/2:42", &f2).unwrap();
        let b = PrimeSubset::parse("bernoulli:1/2:42", &f2).unwrap();
        let c = PrimeSubset::parse("bernoulli:1/2:43", &f2).unwrap();
        let mut differs = false;
        for d in 1..=8 {
            for p in table.primes_of_degree(d) {
                assert_eq!(a.contains(p), b.contains(p));
                differs |= a.contains(p) != c.contains(p);
            }
        }
        assert!(differs, "different seeds should disagree somewhere");
    }

    #[test]
    fn subset_counts_bounded_by_prime_counts() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 10).unwrap();
        for spec in ["ap:111:1", "bernoulli:1/3:7", "list:T,T+1", "degmod:0:2"] {
            let s = PrimeSubset::parse(spec, &f2).unwrap();
            for d in 1..=10 {
                let c = s.count_at_degree(d, &table).unwrap();
                assert!(c <= table.count(d), "{spec} d={d}");
            }
        }
    }

    #[test]
    fn density_stats_all_is_zero() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 8).unwrap();
        let stats = PrimeSubset::parse("all", &f2)
            .unwrap()
            .density_error_stats(&table)
            .unwrap();
        for (_, e, v) in &stats.rows {
            assert!(e.is_zero());
            assert!(v.is_zero());
        }
    }

    #[test]
    fn density_stats_singleton_list() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 8).unwrap();
        let stats = PrimeSubset::parse("list:T", &f2)
            .unwrap()
            .density_error_stats(&table)
            .unwrap();
        // delta = 0, so e(d) = sup of pi_S values = 1 for every d >= 1
        for (_, e, _) in &stats.rows {
            assert_eq!(*e, rat(1, 1));
        }
        assert_eq!(stats.truncated_at, 8);
    }

    #[test]
    fn density_stats_v_is_nonincreasing() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 10).unwrap();
        for spec in ["all", "ap:111:1", "bernoulli:1/2:42", "list:T"] {
            let stats = PrimeSubset::parse(spec, &f2)
                .unwrap()
                .density_error_stats(&table)
                .unwrap();
            for w in stats.rows.windows(2) {
                assert!(w[0].2 >= w[1].2, "{spec}");
            }
        }
    }

    #[test]
    fn density_stats_rejects_undefined_density() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 4).unwrap();
        let err = PrimeSubset::parse("degmod:1:2", &f2)
            .unwrap()
            .density_error_stats(&table)
            .unwrap_err();
        assert!(matches!(err, Error::DensityUndefined));
    }

    #[test]
    fn mask_matches_predicate() {
        let f2 = gf2();
        let table = PrimeTable::build(&f2, 8).unwrap();
        let s = PrimeSubset::parse("bernoulli:1/2:42", &f2).unwrap();
        let mask = s.mask(&table);
        for d in 1..=8u32 {
            for (i, p) in table.primes_of_degree(d).iter().enumerate() {
                assert_eq!(mask.contains(d, i as u64), s.contains(p));
            }
        }
    }
}
