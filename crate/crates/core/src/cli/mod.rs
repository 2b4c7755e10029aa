//! Command-line front end: spec files, commands and reports.

use std::io::Write;
use std::path::PathBuf;
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dfield::{parse_expr, DiffField, Differential, Elem, Field};
use crate::ecurve::{frobenius, poly_candidates, search_points, CurvePoint};
use crate::error::{Error, Result};
use crate::hassewitt::{hasse_invariant, hasse_polynomial_closed_form, kernel_point};
use crate::jets::canonical_lift;
use crate::manin::{harness_samples, kernel_harness, DescentContext};
use crate::pfgm::{closure_residual, imk_check, picard_fuchs, Family};

mod spec;

pub use spec::{parse_spec, CurveSpec};

#[derive(Parser, Debug)]
#[command(
    name = "manin",
    version,
    about = "Manin map and Picard-Fuchs checks for elliptic curves over F_p(t)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Curve or family spec file.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Comma-separated primes, overriding `p` from the spec.
    #[arg(long, global = true, value_delimiter = ',')]
    pub prime_sweep: Vec<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Degree bound for rational root searches.
    #[arg(long, global = true, default_value_t = 8)]
    pub deg_bound: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Hasse-Witt invariant and ordinarity.
    HasseWitt,
    /// Picard-Fuchs operator of the family over Q(t).
    PicardFuchs,
    /// Direct and dual Picard-Fuchs congruences for the Hasse-Witt invariant.
    ImkCheck,
    /// Descent data and the Manin map at the base point.
    ManinEval,
    /// Kernel test of the Manin map on sampled points.
    KernelTest,
    /// Built-in consistency checks.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

/// Ordered `key=value` output with an overall verdict.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub passed: bool,
}

impl Report {
    fn new() -> Report {
        Report {
            entries: Vec::new(),
            passed: true,
        }
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    fn fail(&mut self, prefix: &str, err: &Error) {
        self.push(format!("{prefix}reason"), err.kind());
        self.push(format!("{prefix}detail"), err);
        self.passed = false;
    }

    fn check(&mut self, key: impl Into<String>, ok: bool) {
        self.push(key, ok);
        self.passed &= ok;
    }

    fn absorb(&mut self, other: Report, prefix: &str) {
        for (k, v) in other.entries {
            self.entries.push((format!("{prefix}{k}"), v));
        }
        self.passed &= other.passed;
    }

    pub fn render(&self, format: Format) -> String {
        let status = if self.passed { "pass" } else { "fail" };
        let mut out = String::new();
        match format {
            Format::Machine => {
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k}={v}\n"));
                }
                out.push_str(&format!("status={status}\n"));
            }
            Format::Text => {
                let w = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0).max(6);
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k:<w$}  {v}\n"));
                }
                out.push_str(&format!("{:<w$}  {status}\n", "status"));
            }
        }
        out
    }
}

/// Whether an error comes from malformed input rather than a failed check.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. } | Error::Validation(_) | Error::InvalidCharacteristic(_)
    )
}

fn load_spec(cli: &Cli) -> Result<CurveSpec> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| Error::Validation("this command needs --spec".into()))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

fn primes(cli: &Cli, spec: &CurveSpec) -> Result<Vec<u64>> {
    let mut ps = if cli.prime_sweep.is_empty() {
        spec.p.into_iter().collect::<Vec<_>>()
    } else {
        cli.prime_sweep.clone()
    };
    if ps.is_empty() {
        return Err(Error::Validation(
            "no prime given: set p in the spec or pass --prime-sweep".into(),
        ));
    }
    for &p in &ps {
        crate::dfield::check_odd_prime(p)?;
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// Runs `f` for every prime on its own thread and merges the reports in
/// prime order. A single prime gives unprefixed keys.
fn sweep(ps: &[u64], f: impl Fn(u64) -> Report + Sync) -> Report {
    let f = &f;
    let reports: Vec<Report> = thread::scope(|s| {
        let handles: Vec<_> = ps.iter().map(|&p| s.spawn(move || f(p))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Report::new();
    for (p, r) in ps.iter().zip(reports) {
        let prefix = if ps.len() == 1 { String::new() } else { format!("p{p}.") };
        out.absorb(r, &prefix);
    }
    out
}

fn collect(body: impl FnOnce(&mut Report) -> Result<()>) -> Report {
    let mut r = Report::new();
    if let Err(e) = body(&mut r) {
        r.fail("", &e);
    }
    r
}

fn hasse_witt(spec: &CurveSpec, ps: &[u64]) -> Report {
    sweep(ps, |p| {
        collect(|r| {
            r.push("p", p);
            let hw = hasse_invariant(&spec.curve_mod(p)?);
            r.push("lambda_bar", &hw.lambda_bar);
            r.push("ordinary", hw.ordinary);
            if !hw.ordinary {
                return Err(Error::NotOrdinary);
            }
            Ok(())
        })
    })
}

fn picard_fuchs_report(spec: &CurveSpec) -> Result<Report> {
    let family = spec.as_family()?;
    let op = picard_fuchs(&family.curve)?;
    let mut r = Report::new();
    r.push("alpha", &op.alpha);
    r.push("beta", &op.beta);
    r.check("closure", closure_residual(&family.curve, &op)?.is_zero());
    Ok(r)
}

fn imk_report(family: &Family, ps: &[u64]) -> Report {
    sweep(ps, |p| {
        collect(|r| {
            r.push("p", p);
            let rep = imk_check(family, p)?;
            r.push("lambda_bar", &rep.lambda_bar);
            r.push("alpha", &rep.alpha);
            r.push("beta", &rep.beta);
            r.push("w", &rep.w);
            r.check("direct_ok", rep.direct_ok);
            r.check("dual_ok", rep.dual_ok);
            Ok(())
        })
    })
}

fn context(spec: &CurveSpec, p: u64, cli: &Cli) -> Result<DescentContext> {
    let e = spec.curve_mod(p)?;
    DescentContext::new(&DiffField::base(p)?, &e, cli.seed, cli.deg_bound)
}

fn point_str(pt: &CurvePoint<Elem>) -> String {
    match pt {
        CurvePoint::Infinity => "O".into(),
        CurvePoint::Affine(x, y) => format!("({x}, {y})"),
    }
}

fn manin_eval(spec: &CurveSpec, ps: &[u64], cli: &Cli) -> Report {
    sweep(ps, |p| {
        collect(|r| {
            r.push("p", p);
            let ctx = context(spec, p, cli)?;
            r.push("field", ctx.field.depth());
            r.push("s", point_str(&ctx.s));
            r.push("c", &ctx.c);
            if let Some(pt) = spec.base_point_mod(p)? {
                r.push("base_point", point_str(&pt));
                match ctx.manin_mu(&pt, None) {
                    Ok(mu) => r.push("mu", &mu),
                    Err(Error::NoWitness) => r.push("mu", "unavailable (NoWitness)"),
                    Err(e) => return Err(e),
                }
                let pp = ctx.e.smul(p as i64, &pt)?;
                let mu_pp = ctx.manin_mu(&pp, Some(&ctx.frobenius_witness(&pt)))?;
                r.check("mu_of_p_multiple_zero", mu_pp.is_zero());
            }
            Ok(())
        })
    })
}

fn kernel_test(spec: &CurveSpec, ps: &[u64], cli: &Cli) -> Report {
    sweep(ps, |p| {
        collect(|r| {
            r.push("p", p);
            let ctx = context(spec, p, cli)?;
            let (ctx, samples) = harness_samples(&ctx)?;
            let rep = kernel_harness(&ctx, &samples)?;
            r.push("c", &ctx.c);
            r.push("type_a", rep.type_a);
            r.push("type_a_zero", rep.type_a_zero);
            r.push("type_b", rep.type_b);
            r.push("type_b_nonzero", rep.type_b_nonzero);
            r.push("pairs", rep.pairs);
            r.push("pairs_additive", rep.pairs_additive);
            r.push(
                "witness_independent",
                format!("{}/{}", rep.witness_independent, rep.witness_checks),
            );
            r.push("negation_ok", format!("{}/{}", rep.negation_ok, rep.negation_checks));
            r.push("shifts", rep.shifts);
            r.push("shift_independent", rep.shift_independent);
            for (i, f) in rep.failures.iter().enumerate() {
                r.push(format!("failure{i}"), f);
            }
            r.passed &= rep.passed();
            Ok(())
        })
    })
}

fn selftest() -> Report {
    let mut r = Report::new();
    let mut run = |name: &str, f: &dyn Fn() -> Result<bool>| match f() {
        Ok(ok) => r.check(name, ok),
        Err(e) => r.fail(&format!("{name}."), &e),
    };
    run("hasse_closed_form", &|| {
        let family = Family::legendre();
        for p in [3, 5, 7, 11, 13] {
            let hw = hasse_invariant(&family.reduce(p)?);
            let closed = hasse_polynomial_closed_form(p)?;
            if hw.lambda_bar.denom().degree() != Some(0) || hw.lambda_bar.numer() != &closed {
                return Ok(false);
            }
        }
        Ok(true)
    });
    run("imk_legendre", &|| {
        let family = Family::legendre();
        for p in [3, 5, 7] {
            let rep = imk_check(&family, p)?;
            if !(rep.direct_ok && rep.dual_ok) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    run("verschiebung", &|| {
        let field = DiffField::base(3)?;
        let e = Family::legendre().reduce_tower(3)?;
        let kd = kernel_point(&field, &e, 8)?;
        let f = frobenius(&e);
        for pt in search_points(&field, &e, poly_candidates(3, 1), 5)? {
            if kd.v.apply(&f.apply(&pt)?)? != e.smul(3, &pt)? {
                return Ok(false);
            }
        }
        Ok(kd.v.apply(&kd.s)?.is_infinity())
    });
    run("jets", &|| {
        let field = DiffField::base(5)?;
        let spec = parse_spec("p=5\na2=0\na4=1\na6=t^2")?;
        let e = spec.curve_mod(5)?;
        for pt in search_points(&field, &e, poly_candidates(5, 1), 4)? {
            let jp = canonical_lift(&e, &pt, 2)?;
            let x = &jp.values[0];
            if !x.is_zero() && jp.values[2].div(x)? != x.log_derivative()? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    run("parser", &|| {
        for s in ["-(1+t)", "t^2/(1-t)", "3*t^3 - 2/(t+1)^2"] {
            let e = parse_expr(s)?;
            if parse_expr(&e.to_string())? != e {
                return Ok(false);
            }
        }
        Ok(true)
    });
    r
}

fn execute(cli: &Cli) -> Result<Report> {
    if cli.command == Command::Selftest {
        return Ok(selftest());
    }
    let spec = load_spec(cli)?;
    Ok(match cli.command {
        Command::HasseWitt => hasse_witt(&spec, &primes(cli, &spec)?),
        Command::PicardFuchs => match picard_fuchs_report(&spec) {
            Ok(r) => r,
            Err(e) if is_input_error(&e) => return Err(e),
            Err(e) => {
                let mut r = Report::new();
                r.fail("", &e);
                r
            }
        },
        Command::ImkCheck => imk_report(&spec.as_family()?, &primes(cli, &spec)?),
        Command::ManinEval => manin_eval(&spec, &primes(cli, &spec)?, cli),
        Command::KernelTest => kernel_test(&spec, &primes(cli, &spec)?, cli),
        Command::Selftest => unreachable!(),
    })
}

/// Runs the CLI on `args` and returns the exit code: 0 when every check
/// passes, 1 when a check fails, 2 on input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(rep) => {
            let _ = write!(out, "{}", rep.render(cli.format));
            for (k, v) in rep.entries.iter().filter(|(k, _)| k.ends_with("detail")) {
                let _ = writeln!(err, "{k}: {v}");
            }
            if rep.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let mut rep = Report::new();
            rep.push("reason", e.kind());
            rep.passed = false;
            let _ = write!(out, "{}", rep.render(cli.format));
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
