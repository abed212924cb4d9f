//! Exact arithmetic over GF(q)[T] for desk-scale number-theoretic
//! verification: monic polynomial arithmetic, prime enumeration and caching,
//! factorization and the arithmetic functions built on prime degrees,
//! divisor-profile duality identities, prime subsets with declared densities,
//! and exact-rational summatory series.
//!
//! Everything that claims equality is computed in exact arithmetic; floating
//! point appears only in convergence reports.
//!
//! ```
//! use ffmu::{factor, verify_duality, DivisorProfile, FWeight, FieldSpec, MonicPoly, PrimeTable};
//! use ffmu::num_rational::BigRational;
//! use ffmu::num_bigint::BigInt;
//!
//! let field = FieldSpec::prime(2)?;
//! let table = PrimeTable::build(&field, 6)?;
//!
//! // T^3 + 1 = (T + 1)(T^2 + T + 1): two primes at distinct degrees
//! let a = MonicPoly::parse("1001", &field)?;
//! let fac = factor(&a, &table)?;
//! assert_eq!(fac.mobius(), 1);
//! assert_eq!(fac.degree_data().degree_set(), &[1, 2]);
//!
//! // the order-k duality holds on its profile, exactly
//! let profile = DivisorProfile::from_factorization(&fac, |_| true);
//! let f = FWeight::from_fn(4, |x| BigRational::from_integer(BigInt::from(x)));
//! assert!(verify_duality(&profile, &f, 4)?.pass);
//! # Ok::<(), ffmu::Error>(())
//! ```

// exact-arithmetic types appear throughout the public API
pub use num_bigint;
pub use num_rational;
pub use num_traits;

pub mod arith;
pub mod duality;
pub mod error;
pub mod field;
pub mod poly;
pub mod primes;
pub mod report;
pub mod subset;
pub mod summatory;

pub use arith::{divisor_count, factor, mobius, DegreeData, Factorization};
pub use duality::{
    binomial, divisor_mobius_sum, duality_closed_form, duality_divisor_sum,
    falling_factorial_closed_form, falling_factorial_sum, forward_difference,
    restricted_weighted_sum, verify_duality, DivisorProfile, DualityReport, DualityRow, FWeight,
    ProfilePrime, Weight,
};
pub use error::{Error, Result};
pub use field::FieldSpec;
pub use poly::{MonicPoly, Poly, PolyPair};
pub use primes::{enumerate_primes, is_irreducible, prime_count_exact, PrimeRecord, PrimeTable};
pub use subset::{DensityStats, PrimeSubset, SubsetMask};
pub use summatory::{
    equivalence_identity, finite_landau_identity, mertens, mu_tail_product_layer, multi_top_count,
    psi1, psi1_recurrence_row, psi2, psi2_bound_diagnostic, q_sum, series_ledger,
    smooth_histograms, w_count_enum, w_count_formula, CountMethod, EnumCeiling, EquivalenceReport,
    IdentityReport, LedgerRow, MertensReport, Psi2BoundReport, SeriesLedger, SeriesRestriction,
    SeriesWeight, SmoothCount, EULER_GAMMA,
};
