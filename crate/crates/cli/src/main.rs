//! Command-line entry point: one subcommand per module, JSON reports with
//! an embedded reproducibility manifest, optional CSV emitters.
//!
//! Exit codes: 0 success, 1 certified failure (a checked inequality or
//! verification did not hold), 2 usage or input errors.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use semitorus::angle::AngleSpec;
use semitorus::arith::{parse_rational, rat_pow, rat_string, reduce_mod1, Arc, Rational};
use semitorus::equidist::{self, OrbitSource};
use semitorus::measure::{self, MeasureModel};
use semitorus::nazarov;
use semitorus::rigidity::{self, ClassifyParams};
use semitorus::semigroup::{self, GeneratorSet};
use semitorus::{entropy, Error};

#[derive(Parser)]
#[command(name = "semitorus", version, about = "Multiplicative-semigroup experiments on the circle")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// RNG seed for all sampling operations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits for certified evaluation
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,
    /// Also write the JSON report to this file
    #[arg(long, global = true, value_name = "FILE")]
    json: Option<String>,
    /// Write a CSV table to this file (commands with tabular output)
    #[arg(long, global = true, value_name = "FILE")]
    csv: Option<String>,
    /// Worker cap for internal parallelism (certified results unaffected)
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Record wall time in the manifest (breaks byte-identical reports)
    #[arg(long, global = true, default_value_t = false)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Semigroup enumeration, density profiles, lacunarity
    #[command(subcommand)]
    Semigroup(SemigroupCmd),
    /// Exact measure queries
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Information-function entropy estimation and the ball-mass scan
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Collision detection, rational reconstruction, classification
    #[command(subcommand)]
    Rigidity(RigidityCmd),
    /// Weyl sums and star discrepancy
    #[command(subcommand)]
    Equidist(EquidistCmd),
    /// The iterative non-equidistribution construction
    #[command(subcommand)]
    Nazarov(NazarovCmd),
}

#[derive(Subcommand)]
enum SemigroupCmd {
    /// Count semigroup elements up to a bound
    Count {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        limit: u64,
    },
    /// Density checkpoints and the empirical log-log slope
    Density {
        #[arg(long)]
        gens: String,
        /// Comma-separated ascending checkpoints
        #[arg(long)]
        checkpoints: String,
    },
    /// Decide containment in the powers of a single integer
    Lacunary {
        #[arg(long)]
        gens: String,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Exact mass of a half-open arc (start, start+length]
    Mass {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        length: String,
    },
    /// Invariance check of a measure under T_q over the canonical arcs
    Invariance {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// SMB entropy-rate estimate at a single scale
    Estimate {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1000)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Ball-mass scan over a delta grid
    Lemma1 {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// Comma-separated grid deltas, e.g. 1/32,1/64
        #[arg(long, conflicts_with = "grid_pow")]
        grid: Option<String>,
        /// base,lo,hi meaning deltas base^-lo ... base^-hi
        #[arg(long, value_name = "B,LO,HI")]
        grid_pow: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: u64,
    },
}

#[derive(Subcommand)]
enum RigidityCmd {
    /// Reconstruct a rational from collisions at M, M^2, ...
    Reconstruct {
        /// Angle: a rational like 5/7 or a full angle spec
        #[arg(long)]
        x: String,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        m1: u64,
        #[arg(long, default_value_t = 2)]
        doublings: u32,
    },
    /// Classify an invariant measure
    Classify {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = 1000)]
        m1: u64,
        #[arg(long, default_value_t = 20)]
        samples: u64,
    },
    /// Measure-level pigeonhole over the dilated balls
    Pigeonhole {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        gens: String,
        #[arg(long)]
        m: u64,
        /// Ball radius; defaults to M^-5
        #[arg(long)]
        delta: Option<String>,
    },
}

#[derive(Subcommand)]
enum EquidistCmd {
    /// Certified Weyl sum over an orbit, with geometric CSV checkpoints
    Weyl {
        #[arg(long, conflicts_with = "set")]
        gens: Option<String>,
        /// Explicit comma-separated element set instead of a semigroup
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = 1)]
        h: i64,
    },
    /// Star discrepancy of an orbit (all integers up to the limit unless
    /// --gens restricts to a semigroup)
    Discrepancy {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        gens: Option<String>,
    },
}

#[derive(Subcommand)]
enum NazarovCmd {
    /// Run the construction and emit a self-contained certificate
    Run {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 3)]
        stages: u32,
        #[arg(long, default_value_t = 100_000)]
        n0_search_limit: u64,
    },
    /// Re-check every inequality of a recorded run
    Verify {
        /// Path to a JSON report produced by `nazarov run`
        file: String,
    },
}

#[derive(Serialize)]
struct Manifest {
    #[serde(rename = "commandLine")]
    command_line: Vec<String>,
    seed: u64,
    precision: u32,
    threads: usize,
    version: &'static str,
    #[serde(rename = "wallTimeMs", skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u128>,
}

fn parse_angle(s: &str) -> Result<AngleSpec, Error> {
    if s == "golden" {
        return Ok(AngleSpec::golden());
    }
    if s.contains(':') {
        AngleSpec::parse(s)
    } else {
        Ok(AngleSpec::Rational(parse_rational(s)?))
    }
}

fn parse_u64_list(s: &str, what: &'static str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<u64>().map_err(|e| Error::Parse {
                rule: what,
                msg: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

fn cert_pair(value: &Rational, err: &Rational) -> Value {
    json!({ "value": rat_string(value), "errorRadius": rat_string(err) })
}

/// (report body, exit code, optional CSV rows)
type Outcome = (Value, u8, Option<Vec<String>>);

fn dispatch(cmd: &Command, g: &GlobalOpts) -> Result<Outcome, Error> {
    match cmd {
        Command::Semigroup(c) => semigroup_cmd(c),
        Command::Measure(c) => measure_cmd(c),
        Command::Entropy(c) => entropy_cmd(c, g),
        Command::Rigidity(c) => rigidity_cmd(c, g),
        Command::Equidist(c) => equidist_cmd(c),
        Command::Nazarov(c) => nazarov_cmd(c, g),
    }
}

fn semigroup_cmd(cmd: &SemigroupCmd) -> Result<Outcome, Error> {
    match cmd {
        SemigroupCmd::Count { gens, limit } => {
            let gens = GeneratorSet::parse(gens)?;
            let count = semigroup::count_up_to(&gens, *limit);
            Ok((json!({ "count": count }), 0, None))
        }
        SemigroupCmd::Density { gens, checkpoints } => {
            let gens = GeneratorSet::parse(gens)?;
            let cps = parse_u64_list(checkpoints, "checkpoint list")?;
            let report = semigroup::density_profile(&gens, &cps)?;
            let mut csv = vec!["n,count,density,logDensity".to_string()];
            for c in &report.checkpoints {
                csv.push(format!("{},{},{},{}", c.n, c.count, c.density, c.log_density));
            }
            Ok((serde_json::to_value(&report)?, 0, Some(csv)))
        }
        SemigroupCmd::Lacunary { gens } => {
            let gens = GeneratorSet::parse(gens)?;
            Ok((serde_json::to_value(semigroup::is_lacunary(&gens))?, 0, None))
        }
    }
}

fn measure_cmd(cmd: &MeasureCmd) -> Result<Outcome, Error> {
    match cmd {
        MeasureCmd::Mass {
            measure,
            start,
            length,
        } => {
            let mu = MeasureModel::parse(measure)?;
            let arc = Arc::new(reduce_mod1(&parse_rational(start)?), parse_rational(length)?)?;
            let mass = measure::arc_mass(&mu, &arc)?;
            Ok((
                json!({
                    "measure": mu.to_string(),
                    "start": start,
                    "length": length,
                    "mass": rat_string(&mass),
                }),
                0,
                None,
            ))
        }
        MeasureCmd::Invariance { measure, q } => {
            let mu = MeasureModel::parse(measure)?;
            let report = measure::check_invariance(&mu, *q, &measure::canonical_arcs(*q))?;
            let exact = report.exact();
            let worst = report.worst().map(|e| {
                json!({
                    "arcStart": e.arc.start().to_string(),
                    "arcLength": rat_string(e.arc.length()),
                    "mass": rat_string(&e.mass),
                    "preimageMass": rat_string(&e.preimage_mass),
                })
            });
            Ok((
                json!({ "q": q, "invariant": exact, "worst": worst }),
                if exact { 0 } else { 1 },
                None,
            ))
        }
    }
}

fn entropy_cmd(cmd: &EntropyCmd, g: &GlobalOpts) -> Result<Outcome, Error> {
    match cmd {
        EntropyCmd::Estimate {
            measure,
            p,
            n,
            samples,
        } => {
            let mu = MeasureModel::parse(measure)?;
            let est = entropy::smb_estimate(&mu, *p, *n, *samples, g.seed)?;
            Ok((serde_json::to_value(&est)?, 0, None))
        }
        EntropyCmd::Lemma1 {
            measure,
            beta,
            eps,
            grid,
            grid_pow,
            samples,
        } => {
            let mu = MeasureModel::parse(measure)?;
            let beta = parse_rational(beta)?;
            let eps = parse_rational(eps)?;
            let grid = match (grid, grid_pow) {
                (Some(list), None) => list
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>, _>>()?,
                (None, Some(spec)) => {
                    let parts = parse_u64_list(spec, "grid-pow")?;
                    if parts.len() != 3 || parts[1] > parts[2] {
                        return Err(Error::Parse {
                            rule: "grid-pow",
                            msg: format!("{spec:?}: expected base,lo,hi"),
                        });
                    }
                    let inv = parse_rational(&format!("1/{}", parts[0]))?;
                    (parts[1]..=parts[2])
                        .map(|k| rat_pow(&inv, k as u32))
                        .collect()
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "provide exactly one of --grid, --grid-pow".into(),
                    ))
                }
            };
            let report = entropy::lemma1_scan(&mu, &beta, &eps, &grid, *samples, g.seed)?;
            let pass = report.threshold_met;
            Ok((serde_json::to_value(&report)?, if pass { 0 } else { 1 }, None))
        }
    }
}

fn rigidity_cmd(cmd: &RigidityCmd, g: &GlobalOpts) -> Result<Outcome, Error> {
    match cmd {
        RigidityCmd::Reconstruct {
            x,
            gens,
            m1,
            doublings,
        } => {
            let spec = parse_angle(x)?;
            let gens = GeneratorSet::parse(gens)?;
            let trace = rigidity::reconstruct_rational(&spec, &gens, *m1, *doublings)?;
            Ok((serde_json::to_value(&trace)?, 0, None))
        }
        RigidityCmd::Classify {
            measure,
            gens,
            m1,
            samples,
        } => {
            let mu = MeasureModel::parse(measure)?;
            let gens = GeneratorSet::parse(gens)?;
            let params = ClassifyParams {
                seed: g.seed,
                m1: *m1,
                samples: *samples,
                ..ClassifyParams::default()
            };
            let report = rigidity::classify_measure(&mu, &gens, &params)?;
            Ok((serde_json::to_value(&report)?, 0, None))
        }
        RigidityCmd::Pigeonhole {
            measure,
            x,
            gens,
            m,
            delta,
        } => {
            let mu = MeasureModel::parse(measure)?;
            let x = reduce_mod1(&parse_rational(x)?);
            let gens = GeneratorSet::parse(gens)?;
            let delta = delta.as_deref().map(parse_rational).transpose()?;
            let report = rigidity::measure_pigeonhole(&mu, &x, &gens, *m, delta.as_ref())?;
            Ok((serde_json::to_value(&report)?, 0, None))
        }
    }
}

fn orbit_source<'a>(
    gens: &'a Option<GeneratorSet>,
    explicit: &'a Option<Vec<u64>>,
    all: &'a Option<Vec<u64>>,
) -> OrbitSource<'a> {
    if let Some(g) = gens {
        OrbitSource::Gens(g)
    } else if let Some(e) = explicit {
        OrbitSource::Explicit(e)
    } else {
        OrbitSource::Explicit(all.as_ref().unwrap())
    }
}

fn equidist_cmd(cmd: &EquidistCmd) -> Result<Outcome, Error> {
    match cmd {
        EquidistCmd::Weyl {
            gens,
            set,
            alpha,
            limit,
            h,
        } => {
            let alpha = parse_angle(alpha)?;
            let gens = gens.as_deref().map(GeneratorSet::parse).transpose()?;
            let set = set
                .as_deref()
                .map(|s| parse_u64_list(s, "element set"))
                .transpose()?;
            if gens.is_none() && set.is_none() {
                return Err(Error::InvalidArgument("provide --gens or --set".into()));
            }
            let source = orbit_source(&gens, &set, &None);
            let points = equidist::orbit_points(&source, &alpha, *limit)?;
            if points.is_empty() {
                return Err(Error::InvalidArgument("orbit is empty below the limit".into()));
            }
            let z = equidist::weyl_sum(&points, *h)?;
            // geometric checkpoints for plotting
            let mut csv = vec!["n,size,reS".to_string()];
            let mut cp = 2u64;
            let mut cps = Vec::new();
            while cp < *limit {
                cps.push(cp);
                cp = cp.saturating_mul(4);
            }
            cps.push(*limit);
            for &n in &cps {
                let pts = equidist::orbit_points(&source, &alpha, n)?;
                if pts.is_empty() {
                    csv.push(format!("{n},0,"));
                    continue;
                }
                let zz = equidist::weyl_sum(&pts, *h)?;
                csv.push(format!("{n},{},{}", pts.len(), zz.re.to_f64()));
            }
            Ok((
                json!({
                    "n": points.len(),
                    "h": h,
                    "re": cert_pair(&z.re.value, &z.re.err),
                    "im": cert_pair(&z.im.value, &z.im.err),
                }),
                0,
                Some(csv),
            ))
        }
        EquidistCmd::Discrepancy { alpha, limit, gens } => {
            let alpha = parse_angle(alpha)?;
            let gens = gens.as_deref().map(GeneratorSet::parse).transpose()?;
            let all: Option<Vec<u64>> = if gens.is_none() {
                Some((1..=*limit).collect())
            } else {
                None
            };
            let source = orbit_source(&gens, &None, &all);
            let points = equidist::orbit_points(&source, &alpha, *limit)?;
            if points.is_empty() {
                return Err(Error::InvalidArgument("orbit is empty below the limit".into()));
            }
            let report = equidist::star_discrepancy(&points)?;
            Ok((serde_json::to_value(&report)?, 0, None))
        }
    }
}

fn nazarov_cmd(cmd: &NazarovCmd, g: &GlobalOpts) -> Result<Outcome, Error> {
    match cmd {
        NazarovCmd::Run {
            alpha,
            stages,
            n0_search_limit,
        } => {
            let mut config = nazarov::NazarovConfig::new(parse_angle(alpha)?);
            config.stages = *stages;
            config.precision = g.precision;
            config.n0_search_limit = *n0_search_limit;
            match nazarov::run(&config) {
                Ok(state) => Ok((serde_json::to_value(&state)?, 0, None)),
                Err(e @ Error::ConstructionViolation { .. }) => Ok((
                    json!({ "error": e.to_string() }),
                    1,
                    None,
                )),
                Err(e) => Err(e),
            }
        }
        NazarovCmd::Verify { file } => {
            let text = fs::read_to_string(file)?;
            let state: nazarov::ConstructionState = parse_state(&text)?;
            let report = nazarov::verify(&state)?;
            let code = if report.pass { 0 } else { 1 };
            Ok((serde_json::to_value(&report)?, code, None))
        }
    }
}

/// Accept either a bare ConstructionState or a full CLI report with the
/// state under "result".
fn parse_state(text: &str) -> Result<nazarov::ConstructionState, Error> {
    let v: Value = serde_json::from_str(text)?;
    let body = v.get("result").cloned().unwrap_or(v);
    Ok(serde_json::from_value(body)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match dispatch(&cli.command, &cli.global) {
        Ok((result, code, csv)) => {
            let manifest = Manifest {
                command_line: std::env::args().collect(),
                seed: cli.global.seed,
                precision: cli.global.precision,
                threads: cli.global.threads,
                version: env!("CARGO_PKG_VERSION"),
                wall_time_ms: cli.global.timings.then(|| started.elapsed().as_millis()),
            };
            let report = json!({
                "manifest": manifest,
                "result": result,
            });
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = &cli.global.json {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("cannot write {path}: {e}");
                    return ExitCode::from(2);
                }
            }
            if let Some(path) = &cli.global.csv {
                match csv {
                    Some(rows) => {
                        if let Err(e) = fs::write(path, rows.join("\n") + "\n") {
                            eprintln!("cannot write {path}: {e}");
                            return ExitCode::from(2);
                        }
                    }
                    None => {
                        eprintln!("this command has no CSV output");
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
