use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use uavplan::benchmarks::AreaOfInterest;
use uavplan::estimation::EstimationParams;
use uavplan::harness::{
    fly, generate_scenario, parse_grid, parse_seeds, run_sweep, Algorithm, Flight, ScenarioSource, ScenarioTemplate,
    SweepOptions, SweepSpec,
};
use uavplan::io::{FlightRecord, ScenarioDoc};
use uavplan::model::{visit_report, Scenario};
use uavplan::Point2D;

const SEED_OVERRIDE_VAR: &str = "PLANNER_SEED_OVERRIDE";

/// Plan UAV data-collection flights over ground sensor nodes.
#[derive(Parser, Debug)]
#[command(name = "uavplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random scenario. PLANNER_SEED_OVERRIDE replaces --seed.
    Gen(GenArgs),
    /// Plan a flight for a scenario and print `K=.. length=.. mse=..`.
    Plan(PlanArgs),
    /// Re-check a saved flight against its scenario and print its summary.
    Eval(EvalArgs),
    /// Run a parameter sweep and write the results CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct LayoutArgs {
    /// Number of sensor nodes.
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Area of interest as WIDTHxHEIGHT, centered on the origin.
    #[arg(long, default_value = "4000x4000", value_parser = parse_area)]
    area: (f64, f64),
    /// Communication radius of every node, m.
    #[arg(long, default_value_t = 200.0)]
    r: f64,
    /// Maximum UAV speed, m/s.
    #[arg(long, default_value_t = 50.0)]
    vmax: f64,
    /// Start point x,y. Defaults to the lower-left corner of the area.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    start: Option<Point2D>,
    /// End point x,y. Defaults to the upper-right corner of the area.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    end: Option<Point2D>,
    /// Flight altitude, m.
    #[arg(long = "H", default_value_t = 100.0)]
    altitude: f64,
    /// Variance of the sensor reading noise.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Half-range W of the quantized readings.
    #[arg(long = "W", default_value_t = 1.0)]
    half_range: f64,
    /// Quantizer bits S.
    #[arg(long = "S", default_value_t = 10)]
    bits: u32,
}

impl LayoutArgs {
    fn template(&self, horizon: f64) -> anyhow::Result<ScenarioTemplate> {
        let (w, h) = self.area;
        let area = AreaOfInterest::centered(w, h)?;
        Ok(ScenarioTemplate {
            n: self.n,
            area,
            radius: self.r,
            start: self.start.unwrap_or(area.min),
            end: self.end.unwrap_or(area.max),
            v_max: self.vmax,
            horizon,
            altitude: self.altitude,
            estimation: EstimationParams::new(self.sigma2, self.half_range, self.bits)?,
        })
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    layout: LayoutArgs,
    /// Flight-time budget T, s.
    #[arg(long = "T", default_value_t = 400.0)]
    horizon: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "greedy")]
    algo: Algorithm,
    /// Plan and trajectory JSON; only the summary is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Flight JSON written by `plan --out`.
    #[arg(long)]
    flight: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Fixed scenario file. Without it a scenario is generated per seed
    /// from the layout flags.
    #[arg(long, conflicts_with = "seeds")]
    scenario: Option<PathBuf>,
    /// Seeds for generated scenarios: a:b, a:b:step or a comma list.
    #[arg(long)]
    seeds: Option<String>,
    #[command(flatten)]
    layout: LayoutArgs,
    /// Comma-separated algorithms.
    #[arg(long, default_value = "greedy,strip,zigzag")]
    algos: String,
    /// Flight-time budgets: a:b:step or a comma list.
    #[arg(long = "T-grid", default_value = "120,200,300,400,500,600")]
    t_grid: String,
    /// Node radii: a:b:step or a comma list.
    #[arg(long = "r-grid", default_value = "200")]
    r_grid: String,
    /// Results CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Fill the wall_time column (makes the output nondeterministic).
    #[arg(long)]
    timing: bool,
}

fn parse_area(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: f64 = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: f64 = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(format!("area sides must be positive, got {s:?}"));
    }
    Ok((w, h))
}

fn parse_point(s: &str) -> Result<Point2D, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Point2D::new(x, y))
}

fn seed_override() -> anyhow::Result<Option<u64>> {
    match std::env::var(SEED_OVERRIDE_VAR) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_OVERRIDE_VAR}={v:?} is not an unsigned integer")),
        _ => Ok(None),
    }
}

fn read_scenario(path: &Path) -> anyhow::Result<ScenarioDoc> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    ScenarioDoc::read_from(io::BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `path`, or stdout when `None`.
fn write_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn summary(k: usize, length: f64, scenario: &Scenario) -> String {
    let mse = uavplan::mse(&scenario.estimation, k).map_or_else(|_| "undefined".to_string(), |v| format!("{v:.6}"));
    format!("K={k} length={length:.6} mse={mse}")
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let seed = seed_override()?.unwrap_or(args.seed);
    let template = args.layout.template(args.horizon)?;
    let scenario = generate_scenario(seed, &template)?;
    let doc = ScenarioDoc::new(scenario, Some(template.area));
    write_output(args.out.as_deref(), |w| Ok(doc.write_to(w)?))
}

fn flight_record(flight: &Flight) -> FlightRecord {
    match &flight.plan {
        Some(plan) => FlightRecord::from_plan(plan, &flight.trajectory),
        None => {
            // Sweeps have no per-node waypoints: record the interior vertices.
            let pts: Vec<Point2D> = flight.trajectory.points().collect();
            let inner = pts[1..pts.len() - 1].to_vec();
            FlightRecord::new(
                flight.report.visited_ids(),
                inner,
                &flight.trajectory,
                flight.path_length,
            )
        }
    }
}

fn cmd_plan(args: PlanArgs) -> anyhow::Result<()> {
    let doc = read_scenario(&args.scenario)?;
    let flight = fly(args.algo, &doc.scenario, &doc.area_or_enclosing())
        .with_context(|| format!("{} planner failed", args.algo))?;
    if let Some(out) = &args.out {
        let json = flight_record(&flight).to_json()?;
        write_output(Some(out), |w| Ok(writeln!(w, "{json}")?))?;
    }
    println!("{}", summary(flight.k(), flight.path_length, &doc.scenario));
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let doc = read_scenario(&args.scenario)?;
    let text = std::fs::read_to_string(&args.flight).with_context(|| format!("reading {}", args.flight.display()))?;
    let record = FlightRecord::from_json(&text)?;
    let trajectory = record.trajectory();
    trajectory.validate(&doc.scenario)?;
    let report = visit_report(&doc.scenario, &trajectory)?;
    println!("{}", summary(report.count, trajectory.length(), &doc.scenario));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let algorithms = args
        .algos
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Algorithm>, _>>()?;
    let t_values = parse_grid(&args.t_grid)?;
    let r_values = parse_grid(&args.r_grid)?;
    let (source, seeds) = match &args.scenario {
        Some(path) => {
            let doc = read_scenario(path)?;
            let area = doc.area_or_enclosing();
            let label = doc.scenario.seed.unwrap_or(0);
            (
                ScenarioSource::Fixed {
                    scenario: doc.scenario,
                    area,
                    label,
                },
                Vec::new(),
            )
        }
        None => {
            let seeds = match seed_override()? {
                Some(s) => vec![s],
                None => parse_seeds(args.seeds.as_deref().unwrap_or("1:5"))?,
            };
            (ScenarioSource::Generated(args.layout.template(t_values[0])?), seeds)
        }
    };
    if args.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let spec = SweepSpec {
        algorithms,
        t_values,
        r_values,
        seeds,
        source,
    };
    let result = run_sweep(
        &spec,
        SweepOptions {
            jobs: args.jobs,
            record_wall_time: args.timing,
        },
    )?;
    let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
    write_output(args.out.as_deref(), |w| Ok(result.write_csv(w)?))?;
    for row in result.rows.iter().filter(|r| r.outcome.is_err()) {
        if let Err(e) = &row.outcome {
            eprintln!(
                "warning: {} seed={} T={} r={}: {e}",
                row.algorithm, row.seed, row.horizon, row.radius
            );
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", result.rows.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
