//! Command-line front end: one subcommand per exposed quantity, CSV or JSON
//! on stdout, progress on stderr only. Exit codes: 0 success, 1 identity
//! check failed, 2 usage or configuration error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use ffmu::report::{
    DensityStatsReport, DualityReportOut, EquivalenceReportOut, EquivalenceRow, FactorReport,
    FactorRow, IdentityRow, LandauIdentityReport, MertensReportOut, MertensRow, MuReport, MuRow,
    MultiTopReport, MultiTopRow, PrimeRow, PrimesReport, QSumReport, QSumRow, Render, SeriesReport,
    SmoothBoundReport, SmoothBoundRow, SmoothReport, SmoothRow, TableReport, TableRow,
    WCountReport, WCountRow,
};
use ffmu::{
    equivalence_identity, factor, finite_landau_identity, mertens, multi_top_count, psi1, psi2,
    psi2_bound_diagnostic, q_sum, series_ledger, verify_duality, w_count_enum, w_count_formula,
    CountMethod, DivisorProfile, EnumCeiling, Error, FWeight, FieldSpec, MonicPoly, PrimeSubset,
    PrimeTable, SeriesRestriction, SeriesWeight,
};

const TABLE_DIR_ENV: &str = "FFMU_TABLE_DIR";

#[derive(Parser)]
#[command(
    name = "ffmu",
    about = "Exact arithmetic over GF(q)[T]: primes, factorization, weighted Mobius series, duality checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Field size q (a prime power).
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,

    /// Modulus for extension fields without a built-in one, as a polynomial
    /// over GF(p), e.g. "1,0,1" or "T^2+1".
    #[arg(long, global = true)]
    ext_modulus: Option<String>,

    /// Prime table cache path. Must exist except for `table build`.
    #[arg(long, global = true)]
    table: Option<PathBuf>,

    /// Prime subset spec: all | none | list:.. | ap:M:R | bernoulli:RHO:SEED | degmod:R:M.
    #[arg(long, global = true, default_value = "all")]
    subset: String,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for exhaustive scans.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Seed for seeded diagnostics (bernoulli subsets carry their own seed).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the enumeration ceiling (the largest degree an exhaustive
    /// scan or table build will accept).
    #[arg(long, global = true)]
    ceiling: Option<u32>,

    /// Lift the enumeration ceiling entirely.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothMethod {
    Enum,
    Rec,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum WCountMethod {
    Enum,
    Formula,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// List all monic irreducibles of one degree.
    Primes {
        #[arg(long)]
        d: u32,
    },
    /// Factor a monic polynomial.
    Factor {
        #[arg(long)]
        poly: String,
    },
    /// Mobius function of a monic polynomial.
    Mu {
        #[arg(long)]
        poly: String,
    },
    /// Check the order-k duality identities on a divisor profile.
    Duality {
        /// Profile literal `d:<deg>[,S][*<mult>] ...`; alternatively use --poly.
        #[arg(long, conflicts_with = "poly")]
        profile: Option<String>,
        /// Build the profile from this monic polynomial and --subset.
        #[arg(long)]
        poly: Option<String>,
        /// Weight: x | x^K | ind | table:v1,v2,... | poly:c0,c1,... (c0 must be 0).
        #[arg(long, default_value = "x")]
        f: String,
        /// Highest order to check; defaults to omega + 2.
        #[arg(long)]
        kmax: Option<u32>,
    },
    /// Exact partial sums of a weighted Mobius series.
    Series {
        #[arg(long, value_parser = parse_weight_name)]
        weight: SeriesWeight,
        /// none | d-s | delta1-eq:<n> | delta1-ge:<n>
        #[arg(long, default_value = "none", value_parser = parse_restriction)]
        restriction: SeriesRestriction,
        #[arg(long)]
        x: u32,
        /// Also include the degree-0 term where the restriction admits it.
        #[arg(long)]
        include_unit: bool,
    },
    /// Exact sum of subset-member prime counts at the k-th largest degree.
    Qsum {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
    },
    /// Smooth counts (order 1 or 2), an advisory bound diagnostic, or the
    /// multiple-top-prime count.
    Smooth {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, value_enum, default_value_t = SmoothMethod::Both)]
        method: SmoothMethod,
        /// Emit the advisory bound report with this epsilon instead.
        #[arg(long)]
        bound_eps: Option<f64>,
        /// Emit the count of monics with multiple top-degree primes instead.
        #[arg(long)]
        multi_top: bool,
    },
    /// Count monics of one degree whose prime factors share a single degree.
    Wcount {
        #[arg(long)]
        x: u32,
        #[arg(long, value_enum, default_value_t = WCountMethod::Both)]
        method: WCountMethod,
    },
    /// Check the finite weighted-series identity against -#W(x)/q^x.
    #[command(name = "landau2-identity")]
    Landau2Identity {
        #[arg(long)]
        x: u32,
    },
    /// Check the restricted series against second-order prime counts.
    Equivalence {
        #[arg(long)]
        n: u32,
    },
    /// Exact Mertens product with its n*e^gamma reference.
    Mertens {
        #[arg(long)]
        n: u32,
    },
    /// Exact density-error statistics for a subset.
    #[command(name = "density-stats")]
    DensityStats {
        #[arg(long, default_value_t = 10)]
        maxdeg: u32,
    },
    /// Build or verify a prime table cache.
    Table {
        #[command(subcommand)]
        cmd: TableCmd,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    /// Enumerate, validate, and save a table.
    Build {
        #[arg(long)]
        maxdeg: u32,
    },
    /// Load a table, re-validating counts against the exact formula.
    Verify,
}

enum Outcome {
    Pass,
    IdentityFailure,
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::IdentityFailure) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn build_field(cli: &Cli) -> Result<Arc<FieldSpec>, Error> {
    match &cli.ext_modulus {
        Some(m) => FieldSpec::with_order_and_modulus(cli.q, m),
        None => FieldSpec::with_order(cli.q),
    }
}

fn ceiling(cli: &Cli) -> EnumCeiling {
    if cli.force {
        EnumCeiling::unlimited()
    } else {
        match cli.ceiling {
            Some(c) => EnumCeiling(c),
            None => EnumCeiling::default_for(cli.q),
        }
    }
}

fn default_table_path(cli: &Cli) -> Option<PathBuf> {
    std::env::var_os(TABLE_DIR_ENV)
        .map(|dir| PathBuf::from(dir).join(format!("ffmu-q{}.tbl", cli.q)))
}

/// Load or build a prime table covering `need`. An explicitly named table
/// must exist; one found under FFMU_TABLE_DIR is used when present and
/// silently recomputed when not. Extending past the cache happens in memory.
fn acquire_table(cli: &Cli, field: &Arc<FieldSpec>, need: u32) -> Result<PrimeTable, Error> {
    let ceiling = ceiling(cli);
    let mut table = match (&cli.table, default_table_path(cli)) {
        (Some(path), _) => {
            if !path.exists() {
                return Err(Error::InvalidArgument(format!(
                    "table {} does not exist; run `ffmu table build` first",
                    path.display()
                )));
            }
            PrimeTable::load(path, field)?
        }
        (None, Some(path)) if path.exists() => PrimeTable::load(path, field)?,
        _ => {
            ceiling.check(need)?;
            eprintln!(
                "building prime table for q={} up to degree {need}",
                field.q()
            );
            return PrimeTable::build_with_workers(field, need, cli.workers);
        }
    };
    if table.max_degree() < need {
        ceiling.check(need)?;
        eprintln!(
            "extending prime table from degree {} to {need}",
            table.max_degree()
        );
        table.extend_to(need, cli.workers)?;
    }
    Ok(table)
}

fn parse_weight_name(s: &str) -> Result<SeriesWeight, String> {
    match s {
        "mu" => Ok(SeriesWeight::Mu),
        "mu-omega" | "mu_omega" => Ok(SeriesWeight::MuOmega),
        _ => Err(format!("unknown weight {s:?}; use mu or mu-omega")),
    }
}

fn parse_restriction(s: &str) -> Result<SeriesRestriction, String> {
    if s == "none" {
        return Ok(SeriesRestriction::Unrestricted);
    }
    if s == "d-s" || s == "d_s" {
        return Ok(SeriesRestriction::InDS);
    }
    let parse_n = |t: &str| {
        t.parse::<u32>()
            .map_err(|_| format!("bad degree in restriction {s:?}"))
    };
    if let Some(n) = s
        .strip_prefix("delta1-eq:")
        .or(s.strip_prefix("delta1_eq:"))
    {
        return Ok(SeriesRestriction::Delta1Eq(parse_n(n)?));
    }
    if let Some(n) = s
        .strip_prefix("delta1-ge:")
        .or(s.strip_prefix("delta1_ge:"))
    {
        return Ok(SeriesRestriction::Delta1Ge(parse_n(n)?));
    }
    Err(format!(
        "unknown restriction {s:?}; use none, d-s, delta1-eq:<n>, delta1-ge:<n>"
    ))
}

/// Parse the --f weight grammar into a table over 0..=domain_max.
fn parse_fweight(spec: &str, domain_max: u64) -> Result<FWeight, Error> {
    let bad = |msg: String| Error::InvalidArgument(msg);
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
            .map_err(|_| bad(format!("bad exponent in weight {spec:?}")))?;
        return Ok(FWeight::from_fn(domain_max, |x| {
            BigRational::from_integer(BigInt::from(x).pow(k))
        }));
    }
    if let Some(rest) = spec.strip_prefix("table:") {
        let mut values = vec![BigRational::zero()];
        for tok in rest.split(',') {
            values.push(parse_rational_arg(tok.trim())?);
        }
        return Ok(FWeight::new(values));
    }
    if let Some(rest) = spec.strip_prefix("poly:") {
        let coeffs: Vec<BigRational> = rest
            .split(',')
            .map(|t| parse_rational_arg(t.trim()))
            .collect::<Result<_, _>>()?;
        if coeffs.first().map(|c| !c.is_zero()).unwrap_or(false) {
            return Err(bad("duality weights need f(0) = 0; set c0 to 0".into()));
        }
        return Ok(FWeight::from_fn(domain_max, |x| {
            let x = BigRational::from_integer(BigInt::from(x));
            let mut acc = BigRational::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &x + c;
            }
            acc
        }));
    }
    Err(bad(format!(
        "unknown weight {spec:?}; use x, x^K, ind, table:v1,..., poly:c0,c1,..."
    )))
}

fn parse_rational_arg(s: &str) -> Result<BigRational, Error> {
    let parse_int = |t: &str| {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidArgument(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d.trim())?;
            if den.is_zero() {
                return Err(Error::InvalidArgument("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n.trim())?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

fn emit(cli: &Cli, report: &dyn Render) -> Result<(), Error> {
    let text = match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json_string(),
    };
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let field = build_field(cli)?;
    let lim = ceiling(cli);
    match &cli.command {
        Command::Primes { d } => {
            let table = acquire_table(cli, &field, *d)?;
            let rows: Vec<PrimeRow> = table
                .primes_of_degree(*d)
                .iter()
                .enumerate()
                .map(|(i, p)| PrimeRow {
                    degree: *d,
                    ordinal: i as u64,
                    coeffs: p.coeff_string(),
                })
                .collect();
            let report = PrimesReport {
                q: field.q(),
                degree: *d,
                count: rows.len() as u64,
                rows,
            };
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
        Command::Factor { poly } => {
            let a = MonicPoly::parse(poly, &field)?;
            let table = acquire_table(cli, &field, a.degree())?;
            let fac = factor(&a, &table)?;
            let dd = fac.degree_data();
            let report = FactorReport {
                q: field.q(),
                input: a.coeff_string(),
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
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
        Command::Mu { poly } => {
            let a = MonicPoly::parse(poly, &field)?;
            let table = acquire_table(cli, &field, a.degree())?;
            let fac = factor(&a, &table)?;
            let report = MuReport {
                q: field.q(),
                rows: vec![MuRow {
                    input: a.coeff_string(),
                    mu: fac.mobius(),
                }],
            };
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
        Command::Duality {
            profile,
            poly,
            f,
            kmax,
        } => {
            let (prof, label) = match (profile, poly) {
                (Some(text), None) => (DivisorProfile::parse(text)?, text.clone()),
                (None, Some(poly)) => {
                    let a = MonicPoly::parse(poly, &field)?;
                    let table = acquire_table(cli, &field, a.degree())?;
                    let subset = PrimeSubset::parse(&cli.subset, &field)?;
                    let fac = factor(&a, &table)?;
                    let prof =
                        DivisorProfile::from_factorization(&fac, |p| subset.contains(&p.poly));
                    (prof, format!("{}:{}", a.coeff_string(), subset.canonical()))
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "duality needs exactly one of --profile or --poly".into(),
                    ))
                }
            };
            let k_max = kmax.unwrap_or(prof.omega() + 2).max(1);
            let domain = prof.primes().iter().map(|p| p.degree).max().unwrap_or(0);
            let weight = parse_fweight(f, u64::from(domain))?;
            let report = verify_duality(&prof, &weight, k_max)?;
            let out = DualityReportOut::new(label, f.clone(), &report);
            emit(cli, &out)?;
            Ok(if report.pass {
                Outcome::Pass
            } else {
                Outcome::IdentityFailure
            })
        }
        Command::Series {
            weight,
            restriction,
            x,
            include_unit,
        } => {
            let table = acquire_table(cli, &field, *x)?;
            let subset = PrimeSubset::parse(&cli.subset, &field)?;
            let ledger = series_ledger(
                &table,
                *weight,
                restriction,
                Some(&subset),
                *x,
                *include_unit,
                cli.workers,
                &lim,
            )?;
            emit(cli, &SeriesReport::new(&ledger))?;
            Ok(Outcome::Pass)
        }
        Command::Qsum { k, n } => {
            let table = acquire_table(cli, &field, *n)?;
            let subset = PrimeSubset::parse(&cli.subset, &field)?;
            let sum = q_sum(&table, &subset, *k, *n, cli.workers, &lim)?;
            let report = QSumReport {
                q: field.q(),
                rows: vec![QSumRow::new(field.q(), *n, *k, subset.canonical(), &sum)],
            };
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
        Command::Smooth {
            n,
            m,
            order,
            method,
            bound_eps,
            multi_top,
        } => {
            if *multi_top {
                let table = acquire_table(cli, &field, *n)?;
                let count = multi_top_count(&table, *n, cli.workers, &lim)?;
                let report = MultiTopReport {
                    q: field.q(),
                    rows: vec![MultiTopRow {
                        n: *n,
                        count: count.to_string(),
                    }],
                };
                emit(cli, &report)?;
                return Ok(Outcome::Pass);
            }
            if let Some(eps) = bound_eps {
                let r = psi2_bound_diagnostic(&field, *n, *m, *eps)?;
                let report = SmoothBoundReport {
                    q: field.q(),
                    rows: vec![SmoothBoundRow::new(&r)],
                };
                emit(cli, &report)?;
                return Ok(Outcome::Pass);
            }
            if *order != 1 && *order != 2 {
                return Err(Error::InvalidArgument("order must be 1 or 2".into()));
            }
            let run = |method: CountMethod, table: Option<&PrimeTable>| {
                if *order == 1 {
                    psi1(&field, table, *n, *m, method, cli.workers, &lim)
                } else {
                    psi2(&field, table, *n, *m, method, cli.workers, &lim)
                }
            };
            let mut rows = Vec::new();
            let mut mismatch = false;
            match method {
                SmoothMethod::Rec => {
                    rows.push(SmoothRow::new(*order, &run(CountMethod::Recurrence, None)?));
                }
                SmoothMethod::Enum => {
                    let table = acquire_table(cli, &field, *n)?;
                    rows.push(SmoothRow::new(
                        *order,
                        &run(CountMethod::Enumeration, Some(&table))?,
                    ));
                }
                SmoothMethod::Both => {
                    let table = acquire_table(cli, &field, *n)?;
                    let e = run(CountMethod::Enumeration, Some(&table))?;
                    let r = run(CountMethod::Recurrence, None)?;
                    mismatch = e.value != r.value;
                    rows.push(SmoothRow::new(*order, &e));
                    rows.push(SmoothRow::new(*order, &r));
                }
            }
            let report = SmoothReport { q: field.q(), rows };
            emit(cli, &report)?;
            Ok(if mismatch {
                Outcome::IdentityFailure
            } else {
                Outcome::Pass
            })
        }
        Command::Wcount { x, method } => {
            let formula = w_count_formula(&field, *x)?;
            let (enum_str, equal) = match method {
                WCountMethod::Formula => (String::new(), String::new()),
                _ => {
                    let table = acquire_table(cli, &field, *x)?;
                    let e = w_count_enum(&table, *x, cli.workers, &lim)?;
                    let eq = e == formula;
                    (e.to_string(), eq.to_string())
                }
            };
            let formula_str = match method {
                WCountMethod::Enum => String::new(),
                _ => formula.to_string(),
            };
            let mismatch = equal == "false";
            let report = WCountReport {
                q: field.q(),
                rows: vec![WCountRow {
                    x: *x,
                    enumeration: enum_str,
                    formula: formula_str,
                    equal,
                }],
            };
            emit(cli, &report)?;
            Ok(if mismatch {
                Outcome::IdentityFailure
            } else {
                Outcome::Pass
            })
        }
        Command::Landau2Identity { x } => {
            let table = acquire_table(cli, &field, *x)?;
            let r = finite_landau_identity(&table, *x, cli.workers, &lim)?;
            let report = LandauIdentityReport {
                q: field.q(),
                rows: vec![IdentityRow::new(&r)],
            };
            emit(cli, &report)?;
            Ok(if r.equal {
                Outcome::Pass
            } else {
                Outcome::IdentityFailure
            })
        }
        Command::Equivalence { n } => {
            let table = acquire_table(cli, &field, *n)?;
            let subset = PrimeSubset::parse(&cli.subset, &field)?;
            let r = equivalence_identity(&table, &subset, *n, cli.workers, &lim)?;
            let report = EquivalenceReportOut {
                q: field.q(),
                rows: vec![EquivalenceRow::new(&r)],
            };
            emit(cli, &report)?;
            Ok(if r.equal {
                Outcome::Pass
            } else {
                Outcome::IdentityFailure
            })
        }
        Command::Mertens { n } => {
            let r = mertens(&field, *n)?;
            let report = MertensReportOut {
                q: field.q(),
                rows: vec![MertensRow::new(&r)],
            };
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
        Command::DensityStats { maxdeg } => {
            let table = acquire_table(cli, &field, *maxdeg)?;
            let subset = PrimeSubset::parse(&cli.subset, &field)?;
            let stats = subset.density_error_stats(&table)?;
            emit(cli, &DensityStatsReport::new(field.q(), &stats))?;
            Ok(Outcome::Pass)
        }
        Command::Table { cmd } => {
            let path = cli
                .table
                .clone()
                .or_else(|| default_table_path(cli))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no table path: pass --table or set {TABLE_DIR_ENV}"
                    ))
                })?;
            let table = match cmd {
                TableCmd::Build { maxdeg } => {
                    lim.check(*maxdeg)?;
                    eprintln!(
                        "building prime table for q={} up to degree {maxdeg}",
                        field.q()
                    );
                    let table = PrimeTable::build_with_workers(&field, *maxdeg, cli.workers)?;
                    if let Some(dir) = path.parent() {
                        if !dir.as_os_str().is_empty() {
                            std::fs::create_dir_all(dir)?;
                        }
                    }
                    table.save(&path)?;
                    table
                }
                TableCmd::Verify => {
                    if !path.exists() {
                        return Err(Error::InvalidArgument(format!(
                            "table {} does not exist",
                            path.display()
                        )));
                    }
                    PrimeTable::load(&path, &field)?
                }
            };
            let report = TableReport {
                q: field.q(),
                max_degree: table.max_degree(),
                path: path.display().to_string(),
                rows: (1..=table.max_degree())
                    .map(|d| TableRow {
                        d,
                        count: table.count(d),
                    })
                    .collect(),
            };
            emit(cli, &report)?;
            Ok(Outcome::Pass)
        }
    }
}
