mod fmt;
mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use secondkind_core::io::{read_tensor, write_tensor, LoadedTensor, Replay, ReportFile};
use secondkind_core::kahler::curvature_report;
use secondkind_core::lab::{CHAIN_TOL, SAMPLES};
use secondkind_core::spectral::spectral_report;
use secondkind_core::{CurvatureFunctionalReport, FactorSpec, KahlerOperator, ModelSpec};

use suites::Params;

#[derive(Parser)]
#[command(name = "secondkind", version, about = "Curvature operators of the second kind on Kähler tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model curvature tensor and write it to a file.
    Model {
        #[command(subcommand)]
        spec: ModelCmd,
    },
    /// Spectrum of the second-kind operator, scalar curvature and threshold.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        format: FormatFlags,
    },
    /// α-sign status with both witnesses. Exit 1 when indefinite.
    #[command(allow_negative_numbers = true)]
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
    },
    /// Run verification suites and write a report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        m: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = CHAIN_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled extremes of curvature functionals on a Kähler tensor.
    Curvatures {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        format: FormatFlags,
    },
}

#[derive(Args)]
struct Output {
    /// Where to write the tensor file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Constant holomorphic sectional curvature c on complex dimension m.
    #[command(allow_negative_numbers = true)]
    Cp {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 4.0)]
        c: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Riemannian or Kähler product, e.g. `--factors cp:2:4,cp:1:4`.
    #[command(allow_negative_numbers = true)]
    Product {
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<FactorSpec>,
        #[command(flatten)]
        out: Output,
    },
    /// Constant sectional curvature k.
    #[command(allow_negative_numbers = true)]
    Sphere {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        out: Output,
    },
    Flat {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Random element of the Kähler curvature space.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct FormatFlags {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Props,
    Models,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Props => "props",
            Suite::Models => "models",
            Suite::All => "all",
        }
    }
}

/// Failures that are not usage or input errors.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Model { spec } => model(spec),
        Command::Spectrum { input, format } => spectrum_cmd(&input, &format),
        Command::Check { input, alpha } => check(&input, alpha),
        Command::Verify {
            suite,
            m,
            trials,
            samples,
            seed,
            tol,
            out,
        } => verify(suite, &m, Params { trials, samples, seed, tol }, out.as_deref()),
        Command::Curvatures {
            input,
            samples,
            seed,
            format,
        } => curvatures(&input, samples, seed, &format),
    }
}

fn model(cmd: ModelCmd) -> Result<Outcome> {
    let (spec, out) = match cmd {
        ModelCmd::Cp { m, c, out } => (ModelSpec::ConstHsc { m, c }, out),
        ModelCmd::Product { factors, out } => (ModelSpec::Product { factors }, out),
        ModelCmd::Sphere { n, k, out } => (ModelSpec::Sphere { n, k }, out),
        ModelCmd::Flat { n, out } => (ModelSpec::Flat { n }, out),
        ModelCmd::Random { m, seed, out } => (ModelSpec::RandomKahler { m, seed }, out),
    };
    let model = spec.build()?;
    let r = &model.operator;
    write_tensor(&out.out, r)?;
    let n = r.dim();
    let kahler = match model.m {
        Some(m) => format!("true (m = {m})"),
        None => "false".into(),
    };
    println!("wrote {}", out.out.display());
    println!("n = {n}, N = {}, S = {}, kahler = {kahler}", traceless_dim(n), fmt::num(r.scalar_curvature()));
    Ok(Outcome::Ok)
}

fn traceless_dim(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

fn load(path: &Path) -> Result<(LoadedTensor, String)> {
    read_tensor(path).with_context(|| format!("cannot load tensor from {}", path.display()))
}

fn spectrum_cmd(input: &Path, format: &FormatFlags) -> Result<Outcome> {
    let (t, digest) = load(input)?;
    let rep = spectral_report(&t.operator, t.m, &[])?;
    let mut out = std::io::stdout().lock();
    if format.json {
        let mut file = ReportFile::new(Replay {
            command: "spectrum".into(),
            ..Replay::default()
        });
        file.input_digest = Some(digest);
        file.n = Some(rep.n);
        file.m = rep.m;
        file.spectrum = Some(rep.eigenvalues.clone());
        file.scalar = Some(rep.scalar);
        file.threshold_nonneg = Some(rep.threshold_nonneg);
        write!(out, "{}", file.to_json())?;
    } else if format.csv {
        writeln!(out, "index,eigenvalue")?;
        for (i, v) in rep.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, fmt::num(*v))?;
        }
    } else {
        let kahler = rep.m.map_or("not kahler".to_string(), |m| format!("kahler m = {m}"));
        writeln!(out, "n = {}, N = {}, {kahler}", rep.n, rep.eigenvalues.len())?;
        writeln!(out, "eigenvalues: {}", fmt::list(&rep.eigenvalues, " "))?;
        writeln!(out, "S = {}", fmt::num(rep.scalar))?;
        writeln!(
            out,
            "trace = {} (expected {}, residual {:.1e})",
            fmt::num(rep.trace),
            fmt::num(rep.expected_trace),
            (rep.trace - rep.expected_trace).abs()
        )?;
        let th = rep.threshold_nonneg.value().map_or("never".to_string(), fmt::num);
        writeln!(out, "threshold = {th}")?;
    }
    Ok(Outcome::Ok)
}

fn check(input: &Path, alpha: f64) -> Result<Outcome> {
    let (t, _) = load(input)?;
    let big_n = traceless_dim(t.operator.dim()) as f64;
    if !(alpha >= 1.0 && alpha <= big_n) {
        bail!("alpha must lie in [1, {big_n}], got {alpha}");
    }
    let rep = spectral_report(&t.operator, t.m, &[alpha])?;
    let v = rep.verdicts[0];
    println!(
        "{} (f={}, f_neg={})",
        v.status,
        fmt::num(v.f_nonneg),
        fmt::num(v.f_nonpos)
    );
    if v.status.is_nonnegative() || v.status.is_nonpositive() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed)
    }
}

fn verify(suite: Suite, ms: &[usize], p: Params, out: Option<&Path>) -> Result<Outcome> {
    if ms.is_empty() {
        bail!("--m needs at least one value");
    }
    if p.trials == 0 || p.samples == 0 {
        bail!("--trials and --samples must be positive");
    }
    if !(p.tol > 0.0 && p.tol.is_finite()) {
        bail!("--tol must be positive");
    }
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let mut file = ReportFile::new(Replay {
        command: format!(
            "verify --suite {} --m {} --trials {} --samples {} --seed {} --tol {:e}",
            suite.name(),
            ms.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            p.trials,
            p.samples,
            p.seed,
            p.tol
        ),
        seeds: vec![p.seed],
        trials: Some(p.trials),
        samples: Some(p.samples),
        tolerance: Some(p.tol),
    });
    if wants(Suite::Models) {
        file.push_suite(suites::models(ms, p)?);
    }
    for &m in ms {
        if wants(Suite::Identities) {
            file.push_suite(suites::identities(m, p)?);
        }
        if wants(Suite::Props) {
            file.push_suite(suites::props(m, p)?);
        }
    }
    for s in &file.suites {
        let fails: Vec<_> = s.failures().collect();
        let status = if fails.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{status} {}: {} records, {} failed, max residual {:.1e}",
            s.suite,
            s.records.len(),
            fails.len(),
            s.max_residual()
        );
        for r in fails {
            println!(
                "  {}: lhs {} rhs {} residual {:.3e} tol {:.1e}",
                r.name, r.lhs, r.rhs, r.residual, r.tolerance
            );
        }
    }
    if let Some(path) = out {
        std::fs::write(path, file.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
        println!("report written to {}", path.display());
    }
    Ok(if file.passed { Outcome::Ok } else { Outcome::Failed })
}

#[derive(Serialize)]
struct CurvaturesJson<'a> {
    format: &'static str,
    input_digest: &'a str,
    n: usize,
    m: usize,
    scalar: f64,
    functionals: &'a CurvatureFunctionalReport,
}

fn curvatures(input: &Path, samples: usize, seed: u64, format: &FormatFlags) -> Result<Outcome> {
    let (t, digest) = load(input)?;
    if t.m.is_none() {
        let res = t.kahler_residual.map_or("odd dimension".to_string(), |r| format!("residual {r:e}"));
        bail!("input is not Kähler for the adapted complex structure ({res})");
    }
    if samples == 0 {
        bail!("--samples must be positive");
    }
    let k = KahlerOperator::new(t.operator)?;
    let rep = curvature_report(&k, samples, seed)?;
    let mut out = std::io::stdout().lock();
    if format.json {
        let j = CurvaturesJson {
            format: "secondkind-curvatures",
            input_digest: &digest,
            n: k.n(),
            m: k.m(),
            scalar: k.scalar(),
            functionals: &rep,
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&j)?)?;
        return Ok(Outcome::Ok);
    }
    let rows: Vec<(String, Option<(f64, f64)>)> = [
        Some(&rep.hsc),
        rep.orth_bisec.as_ref(),
        Some(&rep.ric_perp),
        Some(&rep.mixed_2_minus_1),
    ]
    .into_iter()
    .zip(["hsc", "orth_bisec", "ric_perp", "mixed_2_minus_1"])
    .map(|(e, name)| (name.to_string(), e.map(|e| (e.min, e.max))))
    .collect();
    if format.csv {
        writeln!(out, "functional,min,max")?;
        for (name, v) in &rows {
            match v {
                Some((lo, hi)) => writeln!(out, "{name},{},{}", fmt::num(*lo), fmt::num(*hi))?,
                None => writeln!(out, "{name},,")?,
            }
        }
        writeln!(out, "scalar,{},{}", fmt::num(k.scalar()), fmt::num(k.scalar()))?;
    } else {
        writeln!(out, "{:<16} {:>18} {:>18}", "functional", "min", "max")?;
        for (name, v) in &rows {
            let (lo, hi) = v.map_or(("n/a".into(), "n/a".into()), |(a, b)| (fmt::num(a), fmt::num(b)));
            writeln!(out, "{name:<16} {lo:>18} {hi:>18}")?;
        }
        writeln!(out, "S = {}", fmt::num(k.scalar()))?;
        writeln!(out, "samples = {samples}, seed = {seed}")?;
    }
    Ok(Outcome::Ok)
}
