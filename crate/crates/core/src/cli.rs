//! Command line front-end: every subcommand reads flags (optionally seeded
//! from a `key=value` config file), runs one pipeline and writes CSV.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conjugate::conjugate_table;
use crate::csvio::{fmt_f64, Table};
use crate::eof::theorem_a_check;
use crate::error::{Error, Result};
use crate::gls_core::{fundamental_direct, ForwardPipeline, GeneratingFunction};
use crate::inverse_problem::{choose_c, psi_from_fundamental, FundamentalFunction};
use crate::norms::{
    gls_norm, load_weighted_csv, luxemburg_norm, orlicz_norm_amemiya, DiscreteMeasureSpace,
    SampledFunction,
};
use crate::optimize::{linear_grid, log_grid};
use crate::orlicz::OrliczFunction;
use crate::scalar_fn::{Catalog, Interpolation, ScalarFunction};

#[derive(Debug, Parser)]
#[command(
    name = "gls",
    version,
    about = "Grand Lebesgue Spaces, their fundamental functions and Orlicz counterparts"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// `key=value` file with flag defaults; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the fundamental function of G(psi) with theta over a delta grid.
    Fundamental(FundamentalArgs),
    /// Recover psi from a tabulated fundamental function.
    Invert(InvertArgs),
    /// Tabulate the Legendre transform of a function.
    Conjugate(ConjugateArgs),
    /// GLS, Luxemburg and Amemiya norms of a function read from CSV.
    Norm(NormArgs),
    /// Forward pipeline followed by the inverse one, with the recovery error.
    Roundtrip(RoundtripArgs),
    /// Patched exponential Orlicz function and the infinite-measure check.
    Eof(EofArgs),
    /// Randomized invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long = "delta-lo", default_value_t = 1e-8)]
    pub lo: f64,
    #[arg(long = "delta-hi", default_value_t = 1.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
}

#[derive(Debug, Args)]
pub struct FundamentalArgs {
    /// `power:m=<v>`, `grand:beta=<v>,b=<v>`, `scaled:C=<v>,inner=<spec>` or `csv:<path>`.
    #[arg(long)]
    pub psi: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// CSV `x,value` with x = delta.
    #[arg(long)]
    pub phi: PathBuf,
    /// A positive number or `auto`.
    #[arg(long = "C", default_value = "auto")]
    pub c: String,
    #[arg(long = "p-lo", default_value_t = 1.5)]
    pub p_lo: f64,
    #[arg(long = "p-hi", default_value_t = 20.0)]
    pub p_hi: f64,
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    /// `power:m=`, `quadratic:a=,b=,c=`, `affine:slope=,intercept=`,
    /// `exponential:scale=,rate=`, `grand:beta=,b=` or `csv:<path>`.
    #[arg(long = "fn")]
    pub function: String,
    /// Domain override.
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long = "q-lo", default_value_t = 0.0)]
    pub q_lo: f64,
    #[arg(long = "q-hi", default_value_t = 10.0)]
    pub q_hi: f64,
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// CSV `weight,value`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub psi: String,
    /// Young function: `forward` (built from psi) or `power:k=<v>`.
    #[arg(long, default_value = "forward")]
    pub young: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub psi: String,
    /// `forward` (exp(nu*(0))), `auto` or a positive number.
    #[arg(long = "C", default_value = "forward")]
    pub c: String,
    #[arg(long = "delta-lo", default_value_t = 1e-10)]
    pub delta_lo: f64,
    #[arg(long = "delta-n", default_value_t = 2000)]
    pub delta_n: usize,
    #[arg(long = "p-lo", default_value_t = 1.5)]
    pub p_lo: f64,
    #[arg(long = "p-hi", default_value_t = 20.0)]
    pub p_hi: f64,
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EofArgs {
    #[arg(long)]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pub atoms: usize,
    #[arg(long = "total-mass", default_value_t = 1e3)]
    pub total_mass: f64,
    /// Comma separated indicator masses.
    #[arg(long, default_value = "0.5,1,10")]
    pub masses: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the fundamental-function comparison.
    #[arg(long = "fundamental-out")]
    pub fundamental_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub cases: usize,
}

/// Parses `args` (program name first), applies the config file and runs.
pub fn run_from<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match with_config_defaults(args) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> ExitCode {
    if e.is_io() {
        eprintln!("error: {e}");
        ExitCode::from(2)
    } else {
        eprintln!("error: {}: {e}", e.hypothesis());
        ExitCode::from(1)
    }
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Inserts `--key value` pairs from the config file right after the
/// subcommand, so that flags given later on the command line override them.
fn with_config_defaults(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = PathBuf::from(path);
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Csv {
            path: path.clone(),
            message: format!("line {}: expected key=value", i + 1),
        })?;
        extra.push(format!("--{}", k.trim()));
        extra.push(v.trim().to_string());
    }
    let sub = args
        .iter()
        .position(|a| Command::has_subcommand(a))
        .ok_or_else(|| Error::InvalidInput("no subcommand given".into()))?;
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

impl Command {
    fn has_subcommand(name: &str) -> bool {
        matches!(
            name,
            "fundamental" | "invert" | "conjugate" | "norm" | "roundtrip" | "eof" | "selftest"
        )
    }
}

fn emit(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => table.write(p),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(table.to_csv_string().as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(lo < hi) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs lo < hi and n >= 2, got [{lo}, {hi}] with n = {n}"
        )));
    }
    match spacing {
        Spacing::Log if lo > 0.0 => Ok(log_grid(lo, hi, n)),
        Spacing::Log => Err(Error::InvalidInput(format!(
            "log spacing needs lo > 0, got {lo}"
        ))),
        Spacing::Linear => Ok(linear_grid(lo, hi, n)),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fundamental(a) => fundamental(a),
        Command::Invert(a) => invert(a),
        Command::Conjugate(a) => conjugate(a),
        Command::Norm(a) => norm(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Eof(a) => eof(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn fundamental(a: &FundamentalArgs) -> Result<()> {
    let psi = GeneratingFunction::parse(&a.psi)?;
    let deltas = grid(a.grid.lo, a.grid.hi, a.grid.n, a.grid.spacing)?;
    let fw = ForwardPipeline::new(&psi)?;
    let r = fw.compare(&deltas);
    let invalid = r.rows.iter().filter(|row| !row.is_valid()).count();
    eprintln!(
        "ratio_min={} ratio_max={} log_ratio_at_smallest_delta={} invalid_rows={invalid}",
        fmt_f64(r.ratio_min),
        fmt_f64(r.ratio_max),
        fmt_f64(r.log_ratio_at_smallest_key)
    );
    emit(&r.to_table(), a.out.as_deref())
}

fn parse_c(text: &str, phi: &FundamentalFunction) -> Result<f64> {
    if text == "auto" {
        return choose_c(phi);
    }
    text.parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("C must be a number or `auto`, got `{text}`")))
}

fn invert(a: &InvertArgs) -> Result<()> {
    let phi = FundamentalFunction::load_csv(&a.phi)?;
    let c = parse_c(&a.c, &phi)?;
    let p = grid(a.p_lo, a.p_hi, a.n, Spacing::Linear)?;
    let r = psi_from_fundamental(&phi, c, &p)?;
    emit(&r.to_table()?, a.out.as_deref())
}

fn num(params: &str, key: &str) -> Result<f64> {
    params
        .split(',')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| Error::InvalidInput(format!("function spec needs {key}=<number>")))
}

/// Scalar function from a spec string.
pub fn parse_function(spec: &str) -> Result<ScalarFunction> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!("function spec `{spec}`: expected <kind>:<params>"))
    })?;
    let c = match kind.trim() {
        "power" => Catalog::Power { m: num(rest, "m")? },
        "quadratic" => Catalog::Quadratic {
            a: num(rest, "a")?,
            b: num(rest, "b")?,
            c: num(rest, "c")?,
        },
        "affine" => Catalog::Affine {
            slope: num(rest, "slope")?,
            intercept: num(rest, "intercept")?,
        },
        "exponential" => Catalog::Exponential {
            scale: num(rest, "scale")?,
            rate: num(rest, "rate")?,
        },
        "grand" => Catalog::Grand {
            beta: num(rest, "beta")?,
            b: num(rest, "b")?,
        },
        "csv" => return ScalarFunction::load_csv(Path::new(rest.trim())),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown function kind `{other}`"
            )))
        }
    };
    Ok(ScalarFunction::catalog(c))
}

fn conjugate(a: &ConjugateArgs) -> Result<()> {
    let mut g = parse_function(&a.function)?;
    if a.lo.is_some() || a.hi.is_some() {
        let (lo, hi) = g.domain();
        g = g.on(a.lo.unwrap_or(lo), a.hi.unwrap_or(hi))?;
    }
    let q = grid(a.q_lo, a.q_hi, a.n, Spacing::Linear)?;
    let r = conjugate_table(&g, &q)?;
    eprintln!("convexity_violation={}", fmt_f64(r.convexity_violation()));
    emit(&r.to_table(), a.out.as_deref())
}

fn young(spec: &str, psi: &GeneratingFunction) -> Result<OrliczFunction> {
    if spec == "forward" {
        return Ok(ForwardPipeline::new(psi)?.orlicz().clone());
    }
    match spec.split_once(':') {
        Some(("power", rest)) => OrliczFunction::power(num(rest, "k")?),
        _ => Err(Error::InvalidInput(format!(
            "Young function must be `forward` or `power:k=<v>`, got `{spec}`"
        ))),
    }
}

fn norm(a: &NormArgs) -> Result<()> {
    let (mu, f) = load_weighted_csv(&a.data)?;
    let psi = GeneratingFunction::parse(&a.psi)?;
    let n = young(&a.young, &psi)?;
    let mut t = Table::new(["gls", "luxemburg", "amemiya", "total_mass"]);
    t.rows.push(vec![
        gls_norm(&f, &mu, &psi)?,
        luxemburg_norm(&f, &mu, &n)?,
        orlicz_norm_amemiya(&f, &mu, &n)?,
        mu.total_mass(),
    ]);
    emit(&t, a.out.as_deref())
}

fn roundtrip(a: &RoundtripArgs) -> Result<()> {
    let psi = GeneratingFunction::parse(&a.psi)?;
    let fw = ForwardPipeline::new(&psi)?;
    let phi = FundamentalFunction::new(fw.theta_tabulation(a.delta_lo, 1.0, a.delta_n)?)?;
    let c = match a.c.as_str() {
        "forward" => fw.nu_star_zero().exp(),
        other => parse_c(other, &phi)?,
    };
    let p = grid(a.p_lo, a.p_hi, a.n, Spacing::Linear)?;
    let r = psi_from_fundamental(&phi, c, &p)?;
    let mut t = Table::new(["p", "psi", "recovered", "rel_error"])
        .with_meta("C", fmt_f64(c))
        .with_meta("defect", fmt_f64(r.defect));
    let mut worst = 0.0f64;
    for &x in &p {
        let truth = psi.psi().evaluate(x)?;
        let got = r.psi.psi().evaluate(x)?;
        let e = (got - truth).abs() / truth;
        worst = worst.max(e);
        t.rows.push(vec![x, truth, got, e]);
    }
    eprintln!("max_rel_error={}", fmt_f64(worst));
    emit(&t, a.out.as_deref())
}

fn eof(a: &EofArgs) -> Result<()> {
    let psi = GeneratingFunction::parse(&a.psi)?;
    let mu = DiscreteMeasureSpace::truncated_infinite(a.atoms, a.total_mass)?;
    let suite = a
        .masses
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("mass `{s}` is not a number")))
                .and_then(|d| mu.indicator(d))
        })
        .collect::<Result<Vec<SampledFunction>>>()?;
    let r = theorem_a_check(&psi, a.alpha, &suite, &mu)?;
    let k = r.patch.knot_report()?;
    eprintln!(
        "ratio_min={} ratio_max={} knot_value_gap={} knot_slope_gap={}",
        fmt_f64(r.norms.ratio_min),
        fmt_f64(r.norms.ratio_max),
        fmt_f64(k.max_value_gap()),
        fmt_f64(k.max_slope_gap())
    );
    if let Some(p) = &a.fundamental_out {
        r.fundamental_table().write(p)?;
    }
    emit(&r.norms_table(), a.out.as_deref())
}

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn selftest(a: &SelftestArgs) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut checks = Vec::new();

    // scaling law and monotonicity in delta on random power psi
    let mut scale_err = 0.0f64;
    let mut mono_ok = true;
    for _ in 0..a.cases {
        let m = rng.gen_range(0.5..6.0);
        let c = rng.gen_range(0.1..10.0);
        let psi = GeneratingFunction::power(m)?;
        let cpsi = GeneratingFunction::scaled(c, &psi)?;
        let mut ds: Vec<f64> = (0..4)
            .map(|_| 10f64.powf(rng.gen_range(-8.0..0.0)))
            .collect();
        ds.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for d in ds {
            let v = fundamental_direct(&psi, d)?;
            scale_err = scale_err.max((fundamental_direct(&cpsi, d)? * c - v).abs());
            mono_ok &= v >= prev;
            prev = v;
        }
    }
    checks.push(Check {
        name: "scaling law",
        ok: scale_err <= 1e-9,
        detail: format!("max error {scale_err:e}"),
    });
    checks.push(Check {
        name: "fundamental function increasing",
        ok: mono_ok,
        detail: String::new(),
    });

    // Luxemburg <= Amemiya <= 2 Luxemburg for power Young functions
    let mu = DiscreteMeasureSpace::probability(64)?;
    let mut sandwich = true;
    for _ in 0..a.cases {
        let k = rng.gen_range(1.0..4.0);
        let n = OrliczFunction::power(k)?;
        let f = SampledFunction::new((0..64).map(|_| rng.gen_range(-3.0..3.0)).collect())?;
        let l = luxemburg_norm(&f, &mu, &n)?;
        let am = orlicz_norm_amemiya(&f, &mu, &n)?;
        sandwich &= l <= am * (1.0 + 1e-9) && am <= 2.0 * l * (1.0 + 1e-9);
    }
    checks.push(Check {
        name: "Luxemburg/Amemiya sandwich",
        ok: sandwich,
        detail: String::new(),
    });

    // forward point values for psi = sqrt(p)
    let fw = ForwardPipeline::new(&GeneratingFunction::power(2.0)?)?;
    let e1 = (-1f64).exp();
    let n4 = fw.orlicz().evaluate(4.0)?;
    checks.push(Check {
        name: "forward N(4)",
        ok: (n4 / (4f64.exp() - e1) - 1.0).abs() < 1e-6,
        detail: format!("{n4}"),
    });

    let tab = ScalarFunction::tabulated(
        vec![1.0, 2.0, 3.0],
        vec![1.0, 4.0, 9.0],
        Interpolation::Linear,
    )?;
    checks.push(Check {
        name: "tabulated inversion",
        ok: (tab.invert_monotone(6.5, 1e-12)? - 2.5).abs() < 1e-12,
        detail: String::new(),
    });

    let mut failed = 0;
    for c in &checks {
        println!(
            "{} {}{}",
            if c.ok { "PASS" } else { "FAIL" },
            c.name,
            if c.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", c.detail)
            }
        );
        failed += usize::from(!c.ok);
    }
    if failed > 0 {
        return Err(Error::InvalidInput(format!(
            "{failed} self-test check(s) failed"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn config_defaults_are_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("job.cfg");
        fs::write(&cfg, "# defaults\npsi = power:m=4\nn=5\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        let args =
            with_config_defaults(s(&["gls", "--config", cfg, "fundamental", "--n", "7"])).unwrap();
        let cli = Cli::try_parse_from(args).unwrap();
        match cli.command {
            Command::Fundamental(a) => {
                assert_eq!(a.psi, "power:m=4");
                assert_eq!(a.grid.n, 7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn function_specs() {
        let q = parse_function("quadratic:a=1,b=0,c=2").unwrap();
        assert_eq!(q.evaluate(3.0).unwrap(), 11.0);
        assert!(parse_function("cubic:a=1").is_err());
        assert!(grid(1.0, 1.0, 5, Spacing::Linear).is_err());
        assert!(grid(0.0, 1.0, 5, Spacing::Log).is_err());
    }
}
