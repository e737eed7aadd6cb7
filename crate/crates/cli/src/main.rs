use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fibint::haar::{fit_and_compare, HaarGroup, MomentJob};
use fibint::poly::molien_dims;
use fibint::pushforward::{char_classes, orbit_volume};
use fibint::rational::{format_rational, parse_vector};
use fibint::rootsys::classify_orbit;
use fibint::subalgebra::{
    generate_subalgebra, independence_report, product_direct, product_subalgebra, semicontinuity_check,
    SubalgebraOptions,
};
use fibint::{Error, Exec, Result, RootSystem};
use serde_json::{json, Value};

mod config;

use config::{load_config, resolve, Job, Settings};

pub const SCHEMA: &str = "1";
const THREADS_ENV: &str = "FIBINT_THREADS";

/// Exact characteristic classes of coadjoint-orbit bundles and their
/// fibre-integral subalgebras.
#[derive(Debug, Parser)]
#[command(name = "fibint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Root-system label (A3, D4, A1xA1) or, for `oracle`, a matrix group (SU3, SO5).
    #[arg(long, global = true)]
    group: Option<String>,
    /// Dominant covector, comma separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Second covector for `semicontinuity`; its face must contain the face of xi in its closure.
    #[arg(long, global = true, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Evaluation point in the Cartan subalgebra for `oracle`.
    #[arg(long = "X", global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// Product factor `LABEL:xi`, e.g. `A1:1,-1`; repeat for each factor.
    #[arg(long = "factor", global = true, allow_hyphen_values = true)]
    factors: Vec<String>,
    /// Highest degree (in H^{2d}) checked by subalgebra commands.
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    /// Largest class index k.
    #[arg(long = "k-max", global = true)]
    k_max: Option<u32>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation points for the Jacobian rank.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Generator seeding: powers or products.
    #[arg(long, global = true)]
    seeding: Option<String>,
    /// Worker thread cap (0 = all cores). Defaults to $FIBINT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// JSON file with the same keys as the flags; a value given both ways must agree.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Classes P_1..P_kmax for one orbit.
    Compute,
    /// Fibre-integral subalgebra dimensions against the invariant ring.
    Fullness,
    /// Jacobian-rank certificate of algebraic independence.
    Independence,
    /// Degreewise containment A(xi) ⊆ A(eta).
    Semicontinuity,
    /// Direct-sum computation compared with the convolution of factor dimensions.
    Product,
    /// Monte Carlo Haar moments checked against the exact classes.
    Oracle,
    /// Dimensions of invariant polynomials per degree.
    Molien,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Fullness => "fullness",
            Command::Independence => "independence",
            Command::Semicontinuity => "semicontinuity",
            Command::Product => "product",
            Command::Oracle => "oracle",
            Command::Molien => "molien",
        }
    }
}

fn vector(job: &Job, field: &str) -> Result<Vec<fibint::rational::Q>> {
    parse_vector(job.require_vector(field)?).map_err(|e| Error::Config(format!("{field}: {e}")))
}

fn root_system(job: &Job) -> Result<RootSystem> {
    job.require_group()?.parse()
}

fn options(job: &Job, exec: Exec) -> SubalgebraOptions {
    SubalgebraOptions {
        seed: job.seed,
        seeding: job.seeding,
        exec,
        ..Default::default()
    }
}

fn fmt_dims<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Runs one job and returns the result section plus a one-line summary.
fn execute(command: Command, job: &Job, exec: Exec) -> Result<(Value, String)> {
    match command {
        Command::Compute => {
            let rs = root_system(job)?;
            let orbit = classify_orbit(&rs, &vector(job, "xi")?)?;
            let set = char_classes(&rs, &orbit, job.k_max, exec)?;
            let volume = orbit_volume(&rs, &orbit)?;
            let classes: Vec<Value> = set
                .classes
                .iter()
                .map(|(k, p)| json!({ "k": k, "degree": 2 * k, "text": p.to_string(), "poly": p.to_json() }))
                .collect();
            let vanishing: Vec<u32> = set
                .classes
                .iter()
                .filter(|(_, p)| p.is_zero())
                .map(|(&k, _)| k)
                .collect();
            let summary = format!(
                "{}: n_fiber={} vanishing k={:?} volume={}",
                rs,
                set.n_fiber,
                vanishing,
                format_rational(&volume)
            );
            Ok((
                json!({
                    "group": set.group,
                    "orbit": set.orbit,
                    "n_fiber": set.n_fiber,
                    "orbit_volume": format_rational(&volume),
                    "vanishing": vanishing,
                    "classes": classes,
                }),
                summary,
            ))
        }
        Command::Fullness => {
            let rs = root_system(job)?;
            let orbit = classify_orbit(&rs, &vector(job, "xi")?)?;
            let r = generate_subalgebra(&rs, &orbit, job.cutoff, &options(job, exec))?.report;
            let summary = format!(
                "{rs}: algebra_dims={} invariant_dims={} {}",
                fmt_dims(&r.algebra_dims),
                fmt_dims(&r.invariant_dims),
                if r.full_up_to_cutoff {
                    "full".to_string()
                } else {
                    format!("missing degrees {:?}", r.missing_degrees)
                }
            );
            Ok((serde_json::to_value(&r).expect("report serializes"), summary))
        }
        Command::Independence => {
            let rs = root_system(job)?;
            let orbit = classify_orbit(&rs, &vector(job, "xi")?)?;
            let r = independence_report(&rs, &orbit, job.k_max, job.seed, job.points, exec)?;
            let summary = format!("{rs}: {}", r.verdict);
            Ok((serde_json::to_value(&r).expect("report serializes"), summary))
        }
        Command::Semicontinuity => {
            let rs = root_system(job)?;
            let inner = classify_orbit(&rs, &vector(job, "xi")?)?;
            let outer = classify_orbit(&rs, &vector(job, "eta")?)?;
            let r = semicontinuity_check(&rs, &inner, &outer, job.cutoff, &options(job, exec))?;
            let summary = match r.first_failing_degree {
                None => format!("{rs}: contained in every degree <= {}", job.cutoff),
                Some(d) => format!("{rs}: containment fails in degree {d}"),
            };
            Ok((serde_json::to_value(&r).expect("report serializes"), summary))
        }
        Command::Product => {
            if job.factors.len() < 2 {
                return Err(Error::Config("product needs at least two --factor LABEL:xi".into()));
            }
            let factors: Vec<(RootSystem, Vec<fibint::rational::Q>)> = job
                .factors
                .iter()
                .map(|f| {
                    let (label, xi) = f
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("factor '{f}': expected LABEL:xi")))?;
                    Ok((label.parse()?, parse_vector(xi)?))
                })
                .collect::<Result<_>>()?;
            let opts = options(job, exec);
            let per_factor = factors
                .iter()
                .map(|(rs, xi)| {
                    let orbit = classify_orbit(rs, xi)?;
                    Ok(generate_subalgebra(rs, &orbit, job.cutoff, &opts)?.report)
                })
                .collect::<Result<Vec<_>>>()?;
            let convolution = product_subalgebra(&per_factor)?;
            let direct = product_direct(&factors, job.cutoff, &opts)?.report;
            let matches =
                direct.algebra_dims == convolution.algebra_dims && direct.invariant_dims == convolution.invariant_dims;
            if !matches {
                eprintln!("warning: direct-sum dimensions differ from the convolution of factor dimensions");
            }
            let summary = format!(
                "{}: direct={} convolution={} {}",
                direct.group,
                fmt_dims(&direct.algebra_dims),
                fmt_dims(&convolution.algebra_dims),
                if matches { "match" } else { "MISMATCH" }
            );
            Ok((
                json!({ "factors": per_factor, "convolution": convolution, "direct": direct, "match": matches }),
                summary,
            ))
        }
        Command::Oracle => {
            let group: HaarGroup = job.require_group()?.parse()?;
            let rs = group.root_system()?;
            let xi = vector(job, "xi")?;
            let x = vector(job, "X")?;
            let orbit = classify_orbit(&rs, &xi)?;
            let set = char_classes(&rs, &orbit, job.k_max, exec)?;
            let ks: Vec<u32> = (1..=job.k_max).collect();
            let estimates = MomentJob::new(group, xi, x.clone(), ks, job.samples, job.seed).run(exec)?;
            let report = fit_and_compare(&set, &estimates, &x)?;
            let summary = format!(
                "{group}: c={:.6} (1/c={:.6}) fitted at k={} -> {}",
                report.fitted_constant, report.inverse_constant, report.fit_k, report.verdict
            );
            Ok((json!({ "estimates": estimates, "consistency": report }), summary))
        }
        Command::Molien => {
            let rs = root_system(job)?;
            let dims = molien_dims(&rs, job.cutoff as usize)?;
            let summary = format!("{rs}: |W|={} invariant_dims={}", rs.weyl_order(), fmt_dims(&dims));
            Ok((
                json!({ "group": rs.to_string(), "weyl_order": rs.weyl_order(), "invariant_dims": dims }),
                summary,
            ))
        }
    }
}

fn settings_from_flags(cli: &Cli) -> Settings {
    Settings {
        group: cli.group.clone(),
        xi: cli.xi.clone(),
        eta: cli.eta.clone(),
        x: cli.x.clone(),
        factors: (!cli.factors.is_empty()).then(|| cli.factors.clone()),
        cutoff: cli.cutoff,
        k_max: cli.k_max,
        samples: cli.samples,
        seed: cli.seed,
        points: cli.points,
        seeding: cli.seeding.clone(),
        threads: cli.threads,
        output: cli.output.clone(),
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV}: expected a non-negative integer, got '{s}'"))),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<()> {
    let name = cli.command.name();
    let file = match &cli.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
            load_config(&text, name)?
        }
        None => Settings::default(),
    };
    let mut job = resolve(name, settings_from_flags(&cli), file)?;
    if cli.threads.is_none() && job.threads == 0 {
        job.threads = threads_from_env()?.unwrap_or(0);
    }
    if job.threads > 0 {
        fibint::exec::init_threads(job.threads);
    }
    let exec = if job.threads == 1 {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    let (result, summary) = execute(cli.command, &job, exec)?;
    let report = json!({
        "schema": SCHEMA,
        "command": name,
        "config": job.to_json(),
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &job.output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Config(format!("output {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Resource(format!("stdout: {e}")))?;
        }
    }
    eprintln!("{name}: {summary}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
