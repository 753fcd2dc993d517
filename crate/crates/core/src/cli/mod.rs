//! The `twogen` command line.
//!
//! Exit codes: 0 success, 1 verification found a mismatch, 2 usage or input
//! error, 3 a factorization or synthesis could not be completed.

pub mod json;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::arith::ArithError;
use crate::factor_cache::FactorCache;
use crate::gcdreduce::{self, ReduceError};
use crate::modsys::{self, ModulusStatus};
use crate::semigroup::{self, GenusTree, SemigroupError};
use crate::specialfact::{self, CountError};
use crate::synth::{self, RenderStyle, SynthError};
use crate::xfunc::{self, XError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

const DEFAULT_CACHE: &str = "factors.txt";

#[derive(Debug, Parser)]
#[command(
    name = "twogen",
    version,
    about = "Two-generator numerical semigroups of prime-power genus"
)]
pub struct Cli {
    /// Factorization cache file (read if present, written back when grown).
    #[arg(long, global = true, value_name = "PATH")]
    pub factor_cache: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest prime used by verification sweeps.
    #[arg(long, global = true, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub prime_bound: u64,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// n(g,2) for a genus, or n(p^k,2) for a prime power.
    Count(CountArgs),
    /// Synthesize the formula for n(p^k,2).
    Derive {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Style::Flat)]
        style: Style,
    },
    /// Euclidean reduction of gcd(p^alpha+1, 2p^beta+1).
    Reduce {
        #[arg(long)]
        alpha: u32,
        #[arg(long)]
        beta: u32,
        /// Check the reduction at every odd prime up to --prime-bound.
        #[arg(long)]
        verify: bool,
    },
    /// The moduli m_k(i) and their radical M(k).
    Modulus {
        #[arg(long)]
        k: u32,
    },
    /// Check the synthesized formula against the direct count.
    Verify {
        #[arg(long)]
        k: u32,
    },
    /// Check that n(p^k,2) is constant on classes mod M(k).
    VerifyDependence {
        #[arg(long)]
        k: u32,
    },
    /// Smallest modulus determining n(p^k,2).
    MinimalModulus {
        #[arg(long)]
        k: u32,
    },
    /// Genus-tree census up to a genus.
    Enumerate {
        #[arg(long)]
        genus: u32,
        /// Only print the per-genus totals.
        #[arg(long)]
        count_only: bool,
    },
    /// Rewrite X_{a,q}(p^s) as prime-modulus indicators in p.
    Xreduce {
        #[arg(long, allow_hyphen_values = true)]
        a: BigInt,
        #[arg(long)]
        q: BigUint,
        #[arg(long, default_value_t = 1)]
        s: u64,
    },
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, required_unless_present = "prime", conflicts_with_all = ["prime", "power"])]
    pub genus: Option<BigUint>,
    #[arg(long, requires = "power")]
    pub prime: Option<u64>,
    #[arg(long, requires = "prime")]
    pub power: Option<u32>,
    /// List the surviving factorizations or exponents.
    #[arg(long)]
    pub witnesses: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Flat,
    Factored,
    CaseTable,
}

impl From<Style> for RenderStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::Flat => RenderStyle::Flat,
            Style::Factored => RenderStyle::Factored,
            Style::CaseTable => RenderStyle::CaseTable,
        }
    }
}

/// A failed command: exit code plus a diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn incomplete(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INCOMPLETE,
            message: message.into(),
        }
    }
}

impl From<ArithError> for Failure {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::FactorizationTimeout { .. } => Failure::incomplete(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Arith(a) => a.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::ZeroExponent => Failure::usage(e.to_string()),
            other => Failure::incomplete(other.to_string()),
        }
    }
}

impl From<XError> for Failure {
    fn from(e: XError) -> Self {
        match e {
            XError::Arith(a) => a.into(),
            XError::PrimeTooLarge(_) => Failure::incomplete(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<SemigroupError> for Failure {
    fn from(e: SemigroupError) -> Self {
        match e {
            SemigroupError::BudgetExceeded { .. } => Failure::incomplete(e.to_string()),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<ReduceError> for Failure {
    fn from(e: ReduceError) -> Self {
        Failure::usage(e.to_string())
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    cache: &'a FactorCache,
    out: String,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn emit_json(&mut self, v: &impl Serialize) {
        let text = serde_json::to_string_pretty(v).expect("serializable");
        self.line(text);
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let explicit = cli.factor_cache.is_some();
    let path = cli
        .factor_cache
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE));
    let existed = path.exists();
    let cache = match FactorCache::load(&path) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    cache.seed_two_power_tables();

    let mut ctx = Ctx {
        cli,
        cache: &cache,
        out: String::new(),
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(&mut ctx)),
            Err(e) => Err(Failure::usage(format!("thread pool: {e}"))),
        },
        None => dispatch(&mut ctx),
    };
    let _ = out.write_all(ctx.out.as_bytes());

    if cache.is_dirty() && (explicit || existed) {
        if let Err(e) = cache.save(&path) {
            let _ = writeln!(err, "warning: {e}");
        }
    }
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn positive_k(k: u32) -> Result<u32, Failure> {
    if k == 0 {
        Err(Failure::usage("k must be positive"))
    } else {
        Ok(k)
    }
}

fn dispatch(ctx: &mut Ctx) -> Result<i32, Failure> {
    match &ctx.cli.command {
        Command::Count(args) => count(ctx, args),
        Command::Derive { k, style } => derive(ctx, positive_k(*k)?, (*style).into()),
        Command::Reduce {
            alpha,
            beta,
            verify,
        } => reduce(ctx, *alpha, *beta, *verify),
        Command::Modulus { k } => modulus(ctx, positive_k(*k)?),
        Command::Verify { k } => verify(ctx, positive_k(*k)?),
        Command::VerifyDependence { k } => verify_dependence(ctx, positive_k(*k)?),
        Command::MinimalModulus { k } => minimal_modulus(ctx, positive_k(*k)?),
        Command::Enumerate { genus, count_only } => enumerate(ctx, *genus, *count_only),
        Command::Xreduce { a, q, s } => xreduce(ctx, a, q, *s),
    }
}

fn count(ctx: &mut Ctx, args: &CountArgs) -> Result<i32, Failure> {
    if let Some(g) = &args.genus {
        let c = specialfact::count_special(g, ctx.cache)?;
        if ctx.cli.json {
            let mut v = json!({ "genus": g.to_string(), "count": c.count });
            if args.witnesses {
                v["witnesses"] = serde_json::to_value(&c.witnesses).expect("serializable");
            }
            ctx.emit_json(&v);
        } else {
            ctx.line(format!("n({g},2) = {}", c.count));
            if args.witnesses {
                for w in &c.witnesses {
                    let (a, b) = (&w.u + 1u32, &w.v + 1u32);
                    ctx.line(format!("  {{{}, {}}} -> <{a},{b}>", w.u, w.v));
                }
            }
        }
        return Ok(EXIT_OK);
    }
    let (p, k) = match (args.prime, args.power) {
        (Some(p), Some(k)) => (p, positive_k(k)?),
        _ => return Err(Failure::usage("give --genus, or both --prime and --power")),
    };
    let c = specialfact::count_prime_power(p, k)?;
    if ctx.cli.json {
        let mut v = json!({ "p": p, "k": k, "count": c.count });
        if args.witnesses {
            v["surviving"] = json!(c.surviving);
        }
        ctx.emit_json(&v);
    } else {
        ctx.line(format!("n({p}^{k},2) = {}", c.count));
        if args.witnesses {
            let list: Vec<String> = c.surviving.iter().map(u32::to_string).collect();
            ctx.line(format!("  surviving i: {}", list.join(", ")));
        }
    }
    Ok(EXIT_OK)
}

fn derive(ctx: &mut Ctx, k: u32, style: RenderStyle) -> Result<i32, Failure> {
    let f = synth::synthesize(k, ctx.cache)?;
    let text = synth::render(&f, style);
    if ctx.cli.json {
        let mut v = serde_json::to_value(&f).expect("serializable");
        v["style"] = serde_json::to_value(style).expect("serializable");
        v["text"] = json!(text);
        ctx.emit_json(&v);
    } else {
        ctx.line(text);
    }
    Ok(EXIT_OK)
}

fn reduce(ctx: &mut Ctx, alpha: u32, beta: u32, verify: bool) -> Result<i32, Failure> {
    let trace = gcdreduce::euclidean_trace(alpha, beta)?;
    let form = gcdreduce::reduce_trace(&trace);
    let congruence = gcdreduce::normalize_target(&form);
    let report = verify.then(|| gcdreduce::verify_reduction(alpha, beta, ctx.cli.prime_bound));
    let report = match report {
        Some(r) => Some(r?),
        None => None,
    };
    let code = match &report {
        Some(r) if !r.holds() => EXIT_MISMATCH,
        _ => EXIT_OK,
    };
    if ctx.cli.json {
        let mut v = json!({
            "alpha": alpha,
            "beta": beta,
            "trace": trace,
            "form": form,
            "congruence": congruence,
        });
        if let Some(r) = &report {
            v["verification"] = serde_json::to_value(r).expect("serializable");
        }
        ctx.emit_json(&v);
        return Ok(code);
    }
    let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
    ctx.line(format!("remainders: {}", join(&trace.remainders)));
    ctx.line(format!("quotients:  {}", join(&trace.quotients)));
    let sign = if form.sign > 0 { "-" } else { "+" };
    let power = if form.delta == 1 {
        "p".to_string()
    } else {
        format!("p^{}", form.delta)
    };
    ctx.line(format!(
        "gcd(p^{alpha}+1, 2p^{beta}+1) = gcd({power} {sign} 2^{}, {})",
        form.two_exp, form.modulus
    ));
    ctx.line(format!("                  = {congruence}"));
    if let Some(r) = &report {
        match &r.counterexample {
            None => ctx.line(format!(
                "verified at {} odd primes p <= {}",
                r.primes_checked, ctx.cli.prime_bound
            )),
            Some(c) => ctx.line(format!(
                "MISMATCH at p = {}: direct {} vs reduced {}",
                c.p, c.direct, c.reduced
            )),
        }
    }
    Ok(code)
}

fn dotted(primes: &[BigUint]) -> String {
    if primes.is_empty() {
        return "1".into();
    }
    primes
        .iter()
        .map(BigUint::to_string)
        .collect::<Vec<_>>()
        .join("·")
}

fn modulus(ctx: &mut Ctx, k: u32) -> Result<i32, Failure> {
    let r = modsys::modulus_of(k, ctx.cache);
    if ctx.cli.json {
        ctx.emit_json(&r);
    } else {
        let width = r
            .per_i
            .iter()
            .map(|t| t.m.to_string().len())
            .max()
            .unwrap_or(1)
            .max(6);
        ctx.line(format!("{:>3}  {:>width$}  factorization", "i", "m_k(i)"));
        for t in &r.per_i {
            let f = t
                .factors
                .as_ref()
                .map_or_else(|| "?".to_string(), ToString::to_string);
            ctx.line(format!("{:>3}  {:>width$}  {f}", t.i, t.m.to_string()));
        }
        ctx.line(format!("M({k}) = {} = {}", r.modulus, dotted(&r.primes)));
    }
    match &r.status {
        ModulusStatus::Complete => Ok(EXIT_OK),
        ModulusStatus::Incomplete { unfactored, .. } => {
            let list: Vec<String> = unfactored.iter().map(ToString::to_string).collect();
            Err(Failure::incomplete(format!(
                "M({k}) is incomplete: could not factor {}",
                list.join(", ")
            )))
        }
    }
}

fn verify(ctx: &mut Ctx, k: u32) -> Result<i32, Failure> {
    let f = synth::synthesize(k, ctx.cache)?;
    let r = synth::verify_formula(&f, ctx.cli.prime_bound);
    if ctx.cli.json {
        ctx.emit_json(&r);
    } else {
        ctx.line(format!(
            "n(p^{k},2) = {}",
            synth::render(&f, RenderStyle::Flat)
        ));
        ctx.line(format!(
            "checked {} odd primes p <= {}: {} mismatches",
            r.primes_checked,
            r.prime_bound,
            r.mismatches.len()
        ));
        for m in &r.mismatches {
            let list: Vec<String> = m.surviving.iter().map(u32::to_string).collect();
            ctx.line(format!(
                "  p = {}: formula {} vs direct {} (surviving i: {})",
                m.p,
                m.formula,
                m.direct,
                list.join(", ")
            ));
        }
    }
    Ok(if r.passed() { EXIT_OK } else { EXIT_MISMATCH })
}

fn verify_dependence(ctx: &mut Ctx, k: u32) -> Result<i32, Failure> {
    let r = modsys::dependence_check(k, ctx.cli.prime_bound, ctx.cache)?;
    if ctx.cli.json {
        ctx.emit_json(&r);
    } else {
        let values: Vec<String> = r.values.iter().map(u64::to_string).collect();
        ctx.line(format!("M({k}) = {}", r.modulus));
        ctx.line(format!(
            "checked {} odd primes p <= {} in {} classes; values {{{}}}",
            r.primes_checked,
            ctx.cli.prime_bound,
            r.classes,
            values.join(", ")
        ));
        ctx.line(format!("violations: {}", r.violations.len()));
        for v in &r.violations {
            ctx.line(format!(
                "  class {}: n({}^{k},2) = {} but n({}^{k},2) = {}",
                v.residue, v.first_prime, v.first_count, v.prime, v.count
            ));
        }
    }
    Ok(if r.violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn minimal_modulus(ctx: &mut Ctx, k: u32) -> Result<i32, Failure> {
    let f = synth::synthesize(k, ctx.cache)?;
    let m = synth::minimal_modulus(&f);
    let m_factors = crate::arith::factorize(&m, ctx.cache)?;
    if ctx.cli.json {
        let mut v = serde_json::to_value(&f).expect("serializable");
        v["minimal_modulus"] = json!(m.to_string());
        ctx.emit_json(&v);
    } else {
        let primes: Vec<BigUint> = m_factors.primes().cloned().collect();
        ctx.line(format!(
            "minimal modulus for k = {k}: {m} = {} (natural modulus {})",
            dotted(&primes),
            f.natural_modulus()
        ));
    }
    Ok(EXIT_OK)
}

fn enumerate(ctx: &mut Ctx, genus: u32, count_only: bool) -> Result<i32, Failure> {
    let tree = GenusTree::default();
    if count_only {
        let census = tree.census(genus)?;
        if ctx.cli.json {
            ctx.emit_json(&census);
        } else {
            ctx.line("genus  total  two_generator");
            for l in &census {
                ctx.line(format!(
                    "{:>5}  {:>5}  {:>13}",
                    l.genus, l.total, l.two_generator
                ));
            }
        }
        return Ok(EXIT_OK);
    }
    let levels = tree.enumerate(genus)?;
    let level = &levels[genus as usize];
    if ctx.cli.json {
        ctx.emit_json(&json!({
            "genus": genus,
            "total": level.len(),
            "two_generator": semigroup::count_two_generator(level),
            "semigroups": level,
        }));
    } else {
        ctx.line(format!(
            "genus {genus}: {} semigroups, {} with two generators",
            level.len(),
            semigroup::count_two_generator(level)
        ));
        for node in level {
            let gens: Vec<String> = node.generators.iter().map(u32::to_string).collect();
            ctx.line(format!("  <{}>", gens.join(",")));
        }
    }
    Ok(EXIT_OK)
}

fn xreduce(ctx: &mut Ctx, a: &BigInt, q: &BigUint, s: u64) -> Result<i32, Failure> {
    if s == 0 {
        return Err(Failure::usage("s must be positive"));
    }
    if *q < BigUint::from(2u32) {
        return Err(Failure::usage("q must be at least 2"));
    }
    let product = xfunc::reduce_composite_power(a, q, s, ctx.cache)?;
    if ctx.cli.json {
        ctx.emit_json(&json!({
            "a": a.to_string(),
            "q": q.to_string(),
            "s": s,
            "product": product,
        }));
    } else {
        let arg = if s.is_one() {
            "p".to_string()
        } else {
            format!("p^{s}")
        };
        ctx.line(format!("X_{{{a},{q}}}({arg}) = {}", product.render("p")));
    }
    Ok(EXIT_OK)
}
