use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use paraflat::cones::{hahn_jordan, self_duality_probe, ConeClass, SignedMeasure};
use paraflat::frobenius::{parse_metric, FrobeniusData, PolynomialPotential};
use paraflat::geometry::{geodesic, AlphaConnection, AlphaConnectionExpectation};
use paraflat::report::{emit_table, run_suite, Format, SuiteConfig, FD_STEPS, TOLERANCES};
use paraflat::statmanifold::FiniteExpFamily;

#[derive(Parser, Debug)]
#[command(name = "paraflat", version, about = "Reproducible verification suites")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized case.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance override, `name=value`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    tol: Vec<String>,
    /// Finite-difference step override, `name=value`. Repeatable.
    #[arg(long = "fd-step", value_name = "NAME=VALUE", global = true)]
    fd_step: Vec<String>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<OutFormat>,
    /// `key = value` config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Paracomplex algebra laws, eigensplit, Cauchy–Riemann residuals.
    Algebra,
    /// Jordan identity, Peirce projections, reflections and rules.
    Jordan,
    /// Hahn–Jordan, measure-pair embedding, self-duality probes.
    Cones,
    /// Fisher metric, dual basis, Legendre duality.
    Statman,
    /// Dual connections, curvature, leaves, Peirce mirror.
    Geometry,
    /// WDVV, associativity, structure-connection pencil.
    Frobenius,
    /// Every suite.
    All,
    /// Run a suite by name.
    Suite { name: String },
    /// List tolerance and step names with their defaults.
    Tolerances,
    /// Integrate an α-geodesic of an exponential family and print it as CSV.
    Trajectory(TrajectoryArgs),
    /// Split a signed measure (CSV of weights) into positive and negative parts.
    HahnJordan {
        /// CSV file, one weight per record.
        measure: PathBuf,
    },
    /// WDVV, associativity and pencil residuals of a potential at a point.
    Wdvv(WdvvArgs),
    /// Self-duality probe of one cone class, e.g. `real-pd:3`.
    Probe {
        class: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    /// `bernoulli`, `categorical:k` or a JSON family file.
    #[arg(long, default_value = "bernoulli")]
    family: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Chart of the start point and velocity.
    #[arg(long, value_enum, default_value = "natural")]
    chart: Chart,
    /// Comma-separated start point.
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    /// Comma-separated initial velocity.
    #[arg(long, allow_hyphen_values = true)]
    velocity: String,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Chart {
    Natural,
    Expectation,
}

#[derive(Args, Debug)]
struct WdvvArgs {
    /// Built-in fixture: wdvv3, wdvv3-perturbed, cubic1.
    #[arg(long, conflicts_with = "potential")]
    fixture: Option<String>,
    /// Polynomial potential file.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Metric rows separated by `;`. Defaults to the identity.
    #[arg(long)]
    metric: Option<String>,
    /// Comma-separated point.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Pencil parameters, comma-separated.
    #[arg(long, default_value = "1,-1,0.5,-0.5", allow_hyphen_values = true)]
    lambda: String,
}

fn parse_vector(s: &str) -> Result<DVector<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse().with_context(|| format!("bad number {x:?}")))
        .collect::<Result<_>>()?;
    Ok(DVector::from_vec(v))
}

fn split_pair(s: &str) -> Result<(&str, f64)> {
    let (k, v) = s
        .split_once('=')
        .with_context(|| format!("expected name=value, got {s:?}"))?;
    Ok((k.trim(), v.trim().parse().with_context(|| format!("bad value in {s:?}"))?))
}

fn config(g: &Global) -> Result<SuiteConfig> {
    let mut cfg = match &g.config {
        Some(p) => SuiteConfig::read(p).with_context(|| format!("reading {}", p.display()))?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    for t in &g.tol {
        let (k, v) = split_pair(t)?;
        cfg.set_tol(k, v)?;
    }
    for t in &g.fd_step {
        let (k, v) = split_pair(t)?;
        cfg.set_fd(k, v)?;
    }
    if let Some(p) = &g.out {
        cfg.output = Some(p.clone());
    }
    if let Some(f) = g.format {
        cfg.format = f.into();
    }
    Ok(cfg)
}

fn emit(cfg: &SuiteConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn suite(name: &str, cfg: &SuiteConfig) -> Result<bool> {
    let report = run_suite(name, cfg)?;
    if cfg.output.is_none() {
        print!("{}", emit_table(&report, cfg.format)?);
    }
    eprintln!(
        "{}: {} ({:.2} s)",
        report.suite,
        if report.pass { "pass" } else { "FAIL" },
        report.timing.wall_time_s
    );
    Ok(report.pass)
}

fn trajectory(a: &TrajectoryArgs) -> Result<String> {
    let family = FiniteExpFamily::resolve(&a.family)?;
    let x0 = parse_vector(&a.start)?;
    let v0 = parse_vector(&a.velocity)?;
    let traj = match a.chart {
        Chart::Natural => geodesic(
            &AlphaConnection {
                family,
                alpha: a.alpha,
            },
            &x0,
            &v0,
            a.t_end,
            a.dt,
        )?,
        Chart::Expectation => geodesic(
            &AlphaConnectionExpectation {
                family,
                alpha: a.alpha,
            },
            &x0,
            &v0,
            a.t_end,
            a.dt,
        )?,
    };
    if traj.hit_boundary {
        eprintln!("trajectory truncated at the domain boundary");
    }
    Ok(traj.to_csv()?)
}

fn wdvv(a: &WdvvArgs, cfg: &SuiteConfig) -> Result<(String, bool)> {
    let data = match (&a.fixture, &a.potential) {
        (Some(name), _) => FrobeniusData::fixture(name)?,
        (None, Some(path)) => {
            let p = PolynomialPotential::read(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let n = p.terms().first().map_or(0, |(e, _)| e.len());
            let g = match &a.metric {
                Some(m) => parse_metric(m)?,
                None => nalgebra::DMatrix::identity(n, n),
            };
            FrobeniusData::new(g, std::sync::Arc::new(p), None)?
        }
        (None, None) => bail!("give --fixture or --potential"),
    };
    let t = parse_vector(&a.point)?;
    let h = cfg.fd("pencil");
    let tol_wdvv = cfg.tol("frobenius.wdvv");
    let tol_pencil = cfg.tol("frobenius.pencil");
    let w = data.wdvv_residual(&t)?;
    let assoc = data.associativity_residual(&t)?;
    let mut rows = vec![
        ("wdvv".to_string(), w, tol_wdvv),
        ("associativity".to_string(), assoc, tol_wdvv),
    ];
    for l in parse_vector(&a.lambda)?.iter() {
        rows.push((format!("pencil[{l}]"), data.pencil_flatness(*l, &t, h)?, tol_pencil));
    }
    let pass = rows.iter().all(|(_, r, tol)| r <= tol);
    let text = match cfg.format {
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, r, _)| (k.clone(), serde_json::json!(r)))
                .chain([("frobenius".to_string(), serde_json::json!(pass))])
                .collect();
            serde_json::to_string_pretty(&obj)? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("check,residual,tolerance,pass\n");
            for (k, r, tol) in &rows {
                s += &format!("{k},{r:e},{tol:e},{}\n", r <= tol);
            }
            s
        }
        Format::Text => rows
            .iter()
            .map(|(k, r, tol)| format!("{k:<16} {r:e} (tol {tol:e})\n"))
            .collect(),
    };
    Ok((text, pass))
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = config(&cli.global)?;
    match &cli.command {
        Command::Algebra => suite("algebra", &cfg),
        Command::Jordan => suite("jordan", &cfg),
        Command::Cones => suite("cones", &cfg),
        Command::Statman => suite("statman", &cfg),
        Command::Geometry => suite("geometry", &cfg),
        Command::Frobenius => suite("frobenius", &cfg),
        Command::All => suite("all", &cfg),
        Command::Suite { name } => suite(name, &cfg),
        Command::Tolerances => {
            let mut s = String::new();
            for (k, v) in TOLERANCES {
                s += &format!("tol.{k} = {v:e}\n");
            }
            for (k, v) in FD_STEPS {
                s += &format!("fd.{k} = {v:e}\n");
            }
            emit(&cfg, &s)?;
            Ok(true)
        }
        Command::Trajectory(a) => {
            emit(&cfg, &trajectory(a)?)?;
            Ok(true)
        }
        Command::HahnJordan { measure } => {
            let mu = SignedMeasure::read_csv(measure)
                .with_context(|| format!("reading {}", measure.display()))?;
            let (p, m) = hahn_jordan(&mu);
            let text = match cfg.format {
                Format::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "positive": p.weights,
                        "negative": m.weights,
                        "total_variation": mu.total_variation(),
                    }))? + "\n"
                }
                _ => {
                    let mut s = String::from("atom,weight,positive,negative\n");
                    for i in 0..mu.len() {
                        s += &format!(
                            "{i},{:e},{:e},{:e}\n",
                            mu.weights[i], p.weights[i], m.weights[i]
                        );
                    }
                    s
                }
            };
            emit(&cfg, &text)?;
            Ok(true)
        }
        Command::Wdvv(a) => {
            let (text, pass) = wdvv(a, &cfg)?;
            emit(&cfg, &text)?;
            Ok(pass)
        }
        Command::Probe { class, trials } => {
            let c: ConeClass = class.parse()?;
            let r = self_duality_probe(c, *trials, cfg.seed)?;
            emit(&cfg, &(serde_json::to_string(&r)? + "\n"))?;
            Ok(r.violations == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
