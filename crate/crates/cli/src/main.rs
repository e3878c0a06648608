//! `ramex` — evaluate, factor, verify, and classify Ramanujan expansions with
//! multiplicative coefficients from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or schema error,
//! 3 capacity or precision error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ramex::arith::{self, build_sieve, SieveTables};
use ramex::classify::classify;
use ramex::coeff::{CoefficientSpec, PrimeRule, TailRule};
use ramex::euler::p_factor;
use ramex::expansion::{
    coprime_split_eval, direct_partial_sum, factored_discrepancy_majorant, factored_eval,
    infinite_euler_product_eval, local_factored_eval, EvalOptions, ModeRequest,
    DEFAULT_EXACT_LIMIT,
};
use ramex::numeric::KahanSum;
use ramex::ramanujan::{c_definition_oracle, c_holder};
use ramex::rational::{rat, rat_int, Rational};
use ramex::report::{
    write_checkpoint_csv, write_json_lines, ClassificationRecord, EvalRecord,
};
use ramex::{Error, PrimeSet};

/// Default ceiling for sieve allocation; override with RAMEX_SIEVE_MAX.
const DEFAULT_SIEVE_CAP: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "ramex", version, about = "Ramanujan expansions: evaluation, factorization, classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Ramanujan sum c_q(a).
    Sum(SumArgs),
    /// Evaluate an expansion for a coefficient spec and emit a report.
    Eval(EvalArgs),
    /// Classify a coefficient spec against the null-function cloud.
    Classify(ClassifyArgs),
    /// Run an identity battery and report pass/fail counts.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SumArgs {
    /// Modulus q >= 1.
    #[arg(long)]
    q: u64,
    /// Argument a >= 1.
    #[arg(long)]
    a: u64,
    /// Also evaluate the defining exponential sum and report match status.
    #[arg(long)]
    oracle: bool,
    /// Oracle tolerance on imaginary and rounding residuals.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Factored,
    Local,
    Euler,
    CoprimeSplit,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
    Auto,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
}

#[derive(Args)]
struct EvalArgs {
    /// Path to the coefficient-spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Single evaluation point a.
    #[arg(long, conflicts_with = "a_list")]
    a: Option<u64>,
    /// Comma-separated evaluation points; output is sorted by a.
    #[arg(long, value_delimiter = ',')]
    a_list: Vec<u64>,
    /// Series truncation.
    #[arg(long = "Q", default_value_t = 10_000)]
    q: u64,
    /// Prime bound for euler / coprime-split methods.
    #[arg(long, default_value_t = 10_000)]
    p_max: u64,
    /// Finite prime set (factored) or S side (coprime-split), comma separated.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Exact-arithmetic threshold for auto mode and float refusal.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    exact_limit: u64,
    /// Checkpoints for the direct method, comma separated.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    #[arg(long, value_enum, default_value_t = OutputArg::Json)]
    output: OutputArg,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Fixed-point scan bound on primes.
    #[arg(long, default_value_t = 1000)]
    p_max: u64,
    /// Fixed-point scan bound on prime-power exponents.
    #[arg(long, default_value_t = 8)]
    k_max: u32,
    /// Truncation for the evidence series.
    #[arg(long = "Q", default_value_t = 10_000)]
    q: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Holder,
    MainLemma,
    MainTheorem,
    EulerProduct,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Grid bound for the holder suite (q, a <= max).
    #[arg(long, default_value_t = 256)]
    max: u64,
    /// Prime bound for the factor suites.
    #[arg(long, default_value_t = 13)]
    pmax: u64,
    /// Argument bound for the factor suites.
    #[arg(long, default_value_t = 2000)]
    amax: u64,
    /// Restrict the main-theorem suite to the exact smooth battery.
    #[arg(long)]
    smooth: bool,
    /// Seed for randomized batteries.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

enum CliError {
    Core(Error),
    Io(std::io::Error),
    Verification { failures: u64 },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Verification { .. } => 1,
        CliError::Io(_) => 2,
        CliError::Core(err) => match err {
            Error::SieveLimit { .. }
            | Error::Capacity { .. }
            | Error::OraclePrecision { .. }
            | Error::OracleRange { .. }
            | Error::FloatRefused { .. } => 3,
            _ => 2,
        },
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            match &e {
                CliError::Core(err) => eprintln!("error: {err}"),
                CliError::Io(err) => eprintln!("error: {err}"),
                CliError::Verification { failures } => {
                    eprintln!("verification failed: {failures} case(s)")
                }
            }
            std::process::exit(exit_code(&e));
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sum(args) => cmd_sum(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn sieve_cap() -> u64 {
    std::env::var("RAMEX_SIEVE_MAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SIEVE_CAP)
}

/// Build tables large enough for `needed`, clamped to the configured cap.
/// Dense evaluations beyond the cap surface as capacity errors downstream.
fn sieve_for(needed: u64) -> Result<SieveTables, CliError> {
    let limit = needed.clamp(16, sieve_cap());
    Ok(build_sieve(limit)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                writeln!(stdout)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sum
// ---------------------------------------------------------------------------

fn cmd_sum(args: SumArgs) -> Result<(), CliError> {
    if args.q < 1 || args.a < 1 {
        return Err(Error::InvalidArgument("q and a must be >= 1".into()).into());
    }
    let value = c_holder(args.q, args.a);
    if args.oracle {
        let oracle = c_definition_oracle(args.q, args.a, args.tol)?;
        let status = if oracle == value { "MATCH" } else { "MISMATCH" };
        println!("{value}, oracle {oracle}, {status}");
        if oracle != value {
            return Err(CliError::Verification { failures: 1 });
        }
    } else {
        println!("{value}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    if args.q < 1 {
        return Err(Error::InvalidArgument("Q must be >= 1".into()).into());
    }
    let text = fs::read_to_string(&args.spec)?;
    let spec = CoefficientSpec::from_json_str(&text)?;

    let mut a_values: Vec<u64> = if args.a_list.is_empty() {
        vec![args.a.ok_or_else(|| {
            Error::InvalidArgument("provide --a or --a-list".into())
        })?]
    } else {
        args.a_list.clone()
    };
    a_values.sort_unstable();
    a_values.dedup();
    if a_values.iter().any(|&a| a < 1) {
        return Err(Error::InvalidArgument("a must be >= 1".into()).into());
    }

    let opts = EvalOptions {
        mode: match args.mode {
            ModeArg::Exact => ModeRequest::Exact,
            ModeArg::Float => ModeRequest::Float,
            ModeArg::Auto => ModeRequest::Auto,
        },
        exact_limit: args.exact_limit,
    };

    let needed = match args.method {
        MethodArg::Euler => args.p_max,
        MethodArg::CoprimeSplit => args.q.max(args.p_max),
        _ => args.q,
    };
    let tables = sieve_for(needed)?;

    let mut records = Vec::with_capacity(a_values.len());
    for &a in &a_values {
        let record = match args.method {
            MethodArg::Direct => {
                let series =
                    direct_partial_sum(&spec, a, args.q, &args.checkpoints, &opts, &tables)?;
                EvalRecord::direct(&spec, &series)
            }
            MethodArg::Factored => {
                if args.primes.is_empty() {
                    return Err(Error::InvalidArgument(
                        "--method factored requires a non-empty --primes list".into(),
                    )
                    .into());
                }
                let f = PrimeSet::new(args.primes.iter().copied())?;
                let r = factored_eval(&spec, &f, a, args.q, &opts, &tables)?;
                EvalRecord::factored(&spec, &r)
            }
            MethodArg::Local => {
                let r = local_factored_eval(&spec, a, args.q, &opts, &tables)?;
                EvalRecord::local(&spec, &r)
            }
            MethodArg::Euler => {
                let r = infinite_euler_product_eval(&spec, a, args.p_max, &tables)?;
                EvalRecord::euler(&spec, &r)
            }
            MethodArg::CoprimeSplit => {
                let s = PrimeSet::new(args.primes.iter().copied())?;
                let r = coprime_split_eval(
                    &spec,
                    &|p| s.contains(p),
                    a,
                    args.q,
                    args.p_max,
                    &opts,
                    &tables,
                )?;
                EvalRecord::coprime_split(&spec, s.primes().to_vec(), &r)
            }
        };
        records.push(record);
    }

    let text = match args.output {
        OutputArg::Json => {
            if records.len() == 1 {
                ramex::report::to_json_pretty(&records[0])?
            } else {
                let mut buf = Vec::new();
                write_json_lines(&mut buf, &records)?;
                String::from_utf8(buf).expect("json is utf-8")
            }
        }
        OutputArg::Csv => {
            let mut buf = Vec::new();
            write_checkpoint_csv(&mut buf, &records)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    emit(&args.out, &text)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(args: ClassifyArgs) -> Result<(), CliError> {
    if args.q < 1 || args.p_max < 2 || args.k_max < 1 {
        return Err(Error::InvalidArgument("bounds must be positive (p_max >= 2)".into()).into());
    }
    let text = fs::read_to_string(&args.spec)?;
    let spec = CoefficientSpec::from_json_str(&text)?;
    let tables = sieve_for(args.q)?;
    let classification = classify(&spec, args.p_max, args.k_max, args.q, &tables)?;
    let record = ClassificationRecord::new(&spec, &classification);
    emit(&args.out, &ramex::report::to_json_pretty(&record)?)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct SuiteOutcome {
    name: &'static str,
    cases: u64,
    failures: u64,
}

impl SuiteOutcome {
    fn report(&self) {
        if self.failures == 0 {
            println!("suite {}: PASS, {} cases", self.name, self.cases);
        } else {
            println!(
                "suite {}: FAIL, {} of {} cases failed",
                self.name, self.failures, self.cases
            );
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    match args.suite {
        SuiteArg::Holder => outcomes.push(suite_holder(args.max)?),
        SuiteArg::MainLemma => outcomes.push(suite_main_lemma(args.pmax, args.amax, args.seed)?),
        SuiteArg::MainTheorem => outcomes.push(suite_main_theorem(args.smooth, args.seed)?),
        SuiteArg::EulerProduct => outcomes.push(suite_euler_product()?),
        SuiteArg::All => {
            outcomes.push(suite_holder(args.max)?);
            outcomes.push(suite_main_lemma(args.pmax, args.amax, args.seed)?);
            outcomes.push(suite_main_theorem(args.smooth, args.seed)?);
            outcomes.push(suite_euler_product()?);
        }
    }
    let failures: u64 = outcomes.iter().map(|o| o.failures).sum();
    for o in &outcomes {
        o.report();
    }
    println!("total: {} suite(s) in {:?}", outcomes.len(), start.elapsed());
    if failures > 0 {
        Err(CliError::Verification { failures })
    } else {
        Ok(())
    }
}

fn battery() -> Vec<CoefficientSpec> {
    vec![
        CoefficientSpec::power(1),
        CoefficientSpec::power(2),
        CoefficientSpec::power(3),
        CoefficientSpec::totient_reciprocal(),
        CoefficientSpec::power(3)
            .with_override(2, PrimeRule::AllOnes)
            .expect("2 is prime"),
    ]
}

fn suite_holder(max: u64) -> Result<SuiteOutcome, CliError> {
    let mut cases = 0u64;
    let mut failures = 0u64;
    for q in 1..=max {
        for a in 1..=max {
            cases += 1;
            match c_definition_oracle(q, a, 1e-6) {
                Ok(oracle) if oracle == c_holder(q, a) => {}
                Ok(oracle) => {
                    failures += 1;
                    eprintln!("holder mismatch at q={q} a={a}: {} vs oracle {oracle}",
                        c_holder(q, a));
                }
                Err(e) => {
                    failures += 1;
                    eprintln!("oracle failure at q={q} a={a}: {e}");
                }
            }
        }
    }
    Ok(SuiteOutcome { name: "holder", cases, failures })
}

fn suite_main_lemma(pmax: u64, amax: u64, seed: u64) -> Result<SuiteOutcome, CliError> {
    use ramex::euler::p_factor_phi_form;
    use ramex::ramanujan::c_prime_power;

    let mut cases = 0u64;
    let mut failures = 0u64;
    let primes: Vec<u64> = (2..=pmax).filter(|&p| arith::is_prime(p)).collect();
    for spec in battery() {
        for &p in &primes {
            for a in 1..=amax {
                cases += 1;
                let direct = p_factor(&spec, p, a).value;
                let phi_form = p_factor_phi_form(&spec, p, a).value;
                let v = arith::p_adic_valuation(p, a).expect("prime");
                let mut series = Rational::from_integer(0.into());
                for k in 0..=(v + 1) {
                    series += spec.at_prime_power(p, k)
                        * Rational::from_integer(c_prime_power(p, k, a).expect("prime").into());
                }
                if direct != phi_form || direct != series {
                    failures += 1;
                    eprintln!("p-factor mismatch at p={p} a={a}");
                }
            }
        }
    }

    // zero-factor equivalence at bounded scale, seeded ladders
    let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..100 {
        cases += 1;
        let p = [2u64, 3, 5][(next() % 3) as usize];
        let ones_prefix = (next() % 10) as usize;
        let mut values = vec![rat_int(1); ones_prefix.min(9)];
        values.push(rat((next() % 5) as i64 - 2, (next() % 4) as i64 + 1));
        let spec = CoefficientSpec::power(2)
            .with_override(p, PrimeRule::Explicit { values, tail: TailRule::Family })
            .expect("prime");
        let zero = Rational::from_integer(0.into());
        let probes = (0..=6u32).all(|v| p_factor(&spec, p, p.pow(v)).value == zero);
        let ones = (1..=7u32)
            .all(|k| spec.at_prime_power(p, k) == Rational::from_integer(1.into()));
        if probes != ones {
            failures += 1;
            eprintln!("zero-factor equivalence failed at p={p}");
        }
    }
    Ok(SuiteOutcome { name: "main-lemma", cases, failures })
}

fn suite_main_theorem(smooth_only: bool, seed: u64) -> Result<SuiteOutcome, CliError> {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let tables = sieve_for(30_000)?;

    // exact battery over smooth-supported specs
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..20 {
        let mut spec = CoefficientSpec::custom();
        let mut f_primes = Vec::new();
        for &p in &[2u64, 3, 5, 7] {
            if next() % 2 == 0 {
                continue;
            }
            let len = (next() % 3 + 1) as usize;
            let mut values = Vec::new();
            for _ in 0..len {
                values.push(rat((next() % 5) as i64 - 2, (next() % 4) as i64 + 1));
            }
            spec = spec
                .with_override(p, PrimeRule::Explicit { values, tail: TailRule::Zero })
                .expect("prime");
            f_primes.push(p);
        }
        if f_primes.is_empty() {
            spec = spec
                .with_override(
                    2,
                    PrimeRule::Explicit { values: vec![rat(1, 2)], tail: TailRule::Zero },
                )
                .expect("prime");
            f_primes.push(2);
        }
        let spec = spec.with_smooth_bound(7);
        let f = PrimeSet::new(f_primes.iter().copied()).expect("primes");
        let q_max: u64 = f_primes.iter().map(|&p| p.pow(3)).product();
        for a in 1..=200u64 {
            cases += 1;
            let r = factored_eval(&spec, &f, a, q_max, &EvalOptions::exact(), &tables)?;
            if r.discrepancy != 0.0 {
                failures += 1;
                eprintln!("smooth factorization not exact at a={a}");
            }
        }
    }

    if !smooth_only {
        // numeric route: power s=2 against the phi-majorant mismatch bound
        let spec = CoefficientSpec::power(2);
        let f = PrimeSet::new([2, 3]).expect("primes");
        for a in [1u64, 6, 12, 30] {
            cases += 1;
            let r = factored_eval(&spec, &f, a, 20_000, &EvalOptions::float(), &tables)?;
            let bound = factored_discrepancy_majorant(&spec, &f, a, 20_000, &tables)?;
            if r.discrepancy > bound {
                failures += 1;
                eprintln!("numeric factorization outside majorant at a={a}");
            }
        }
    }
    Ok(SuiteOutcome { name: "main-theorem", cases, failures })
}

fn suite_euler_product() -> Result<SuiteOutcome, CliError> {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let tables = sieve_for(100_000)?;

    // s = 2 against 6/pi^2 (pi from a Machin-style series)
    let pi = {
        fn atan_inv(x: f64) -> f64 {
            let x = 1.0 / x;
            let (mut term, mut sum, mut k) = (x, 0.0, 0u32);
            while term.abs() > 1e-18 {
                sum += term / (2 * k + 1) as f64;
                term *= -x * x;
                k += 1;
            }
            sum
        }
        16.0 * atan_inv(5.0) - 4.0 * atan_inv(239.0)
    };
    let inv_zeta2 = 6.0 / (pi * pi);
    let s2 = CoefficientSpec::power(2);
    cases += 1;
    let direct = direct_partial_sum(&s2, 1, 100_000, &[], &EvalOptions::float(), &tables)?;
    if (direct.final_value().to_f64() - inv_zeta2).abs() > 1e-3 {
        failures += 1;
        eprintln!("direct s=2 sum off 6/pi^2");
    }
    cases += 1;
    let product = infinite_euler_product_eval(&s2, 1, 100_000, &tables)?;
    if (product.value.to_f64() - inv_zeta2).abs() > 1e-3 {
        failures += 1;
        eprintln!("euler product s=2 off 6/pi^2");
    }

    // s = 3 against zeta(3) summed directly
    let mut zeta3 = KahanSum::new();
    for n in 1..=1_000_000u64 {
        let x = n as f64;
        zeta3.add(1.0 / (x * x * x));
    }
    let inv_zeta3 = 1.0 / zeta3.value();
    let s3 = CoefficientSpec::power(3);
    for value in [
        direct_partial_sum(&s3, 1, 100_000, &[], &EvalOptions::float(), &tables)?
            .final_value()
            .to_f64(),
        infinite_euler_product_eval(&s3, 1, 100_000, &tables)?.value.to_f64(),
    ] {
        cases += 1;
        if (value - inv_zeta3).abs() > 1e-6 {
            failures += 1;
            eprintln!("s=3 evaluation off 1/zeta(3): {value}");
        }
    }

    // hybrid spec: exactly zero at every prime bound
    let hybrid = CoefficientSpec::power(3)
        .with_override(2, PrimeRule::AllOnes)
        .expect("prime");
    for p_max in [2u64, 5, 100, 10_000] {
        cases += 1;
        let r = infinite_euler_product_eval(&hybrid, 6, p_max, &tables)?;
        if !r.value.is_exact_zero() {
            failures += 1;
            eprintln!("hybrid product not exactly zero at p_max={p_max}");
        }
    }

    // local vs explicit factored agreement
    for a in [2u64, 6, 12] {
        cases += 1;
        let local = local_factored_eval(&s2, a, 10_000, &EvalOptions::float(), &tables)?;
        let f = arith::prime_divisors(a);
        let explicit = factored_eval(&s2, &f, a, 10_000, &EvalOptions::float(), &tables)?;
        if (local.product.to_f64() - explicit.product.to_f64()).abs() > 1e-12 {
            failures += 1;
            eprintln!("local/explicit factored disagree at a={a}");
        }
    }
    Ok(SuiteOutcome { name: "euler-product", cases, failures })
}
