//! Scenario generation and experiment sweeps.
//!
//! Node placement uses SplitMix64 seeded directly with the scenario seed.
//! Each node draws two 64-bit outputs, x first, and maps each to `[0, 1)` as
//! `(bits >> 11) * 2^-53` before scaling into the area. Nothing else in the
//! pipeline is random, so a sweep is a pure function of its spec.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::benchmarks::{tune_height, AreaOfInterest, SweepKind};
use crate::error::{Error, Result};
use crate::estimation::{mse, EstimationParams};
use crate::geometry::{Point2D, TOL_GEO};
use crate::model::{plan_to_trajectory, visit_report, Plan, Scenario, SensorNode, Trajectory, VisitReport};
use crate::planner::{exact_plan, greedy_plan, EXACT_MAX_N};

/// Uniform draw in `[0, 1)` from the top 53 bits of one output.
pub fn unit_f64(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Everything about a generated scenario except the node positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioTemplate {
    pub n: usize,
    pub area: AreaOfInterest,
    pub radius: f64,
    pub start: Point2D,
    pub end: Point2D,
    pub v_max: f64,
    pub horizon: f64,
    pub altitude: f64,
    pub estimation: EstimationParams,
}

impl Default for ScenarioTemplate {
    /// 40 nodes in a 4 km square, flying corner to corner at 50 m/s.
    fn default() -> Self {
        Self {
            n: 40,
            area: AreaOfInterest::centered(4000.0, 4000.0).expect("positive extent"),
            radius: 200.0,
            start: Point2D::new(-2000.0, -2000.0),
            end: Point2D::new(2000.0, 2000.0),
            v_max: 50.0,
            horizon: 400.0,
            altitude: 100.0,
            estimation: EstimationParams::default(),
        }
    }
}

pub fn generate_scenario(seed: u64, template: &ScenarioTemplate) -> Result<Scenario> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let area = template.area;
    let nodes = (1..=template.n)
        .map(|id| {
            let x = area.min.x + unit_f64(&mut rng) * area.width();
            let y = area.min.y + unit_f64(&mut rng) * area.height();
            SensorNode::new(id, Point2D::new(x, y), template.radius)
        })
        .collect();
    let scenario = Scenario {
        nodes,
        start: template.start,
        end: template.end,
        v_max: template.v_max,
        horizon: template.horizon,
        altitude: template.altitude,
        estimation: template.estimation,
        seed: Some(seed),
    };
    scenario.validate()?;
    Ok(scenario)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Greedy,
    Strip,
    Zigzag,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Greedy, Algorithm::Strip, Algorithm::Zigzag, Algorithm::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Strip => "strip",
            Algorithm::Zigzag => "zigzag",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::InvalidSweep(format!("unknown algorithm {s:?}")))
    }
}

/// Output of one planner on one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Flight {
    /// Waypoint plan; `None` for the sweep baselines.
    pub plan: Option<Plan>,
    pub trajectory: Trajectory,
    pub report: VisitReport,
    pub path_length: f64,
    /// Tuned sweep height for the baselines.
    pub height: Option<f64>,
}

impl Flight {
    pub fn k(&self) -> usize {
        self.report.count
    }

    pub fn mse(&self, params: &EstimationParams) -> Option<f64> {
        mse(params, self.k()).ok()
    }
}

/// Runs `algorithm` and evaluates the resulting trajectory. The trajectory
/// is validated before anything is counted.
pub fn fly(algorithm: Algorithm, scenario: &Scenario, area: &AreaOfInterest) -> Result<Flight> {
    scenario.validate()?;
    let (plan, trajectory, height) = match algorithm {
        Algorithm::Greedy | Algorithm::Exact => {
            let plan = match algorithm {
                Algorithm::Greedy => greedy_plan(scenario),
                _ => exact_plan(scenario, EXACT_MAX_N)?,
            };
            let trajectory = plan_to_trajectory(scenario, &plan)?;
            (Some(plan), trajectory, None)
        }
        Algorithm::Strip | Algorithm::Zigzag => {
            let kind = if algorithm == Algorithm::Strip {
                SweepKind::Strip
            } else {
                SweepKind::Zigzag
            };
            let (h, t) = tune_height(scenario, area, kind)?;
            (None, t, Some(h))
        }
    };
    let report = visit_report(scenario, &trajectory)?;
    let path_length = trajectory.length();
    if path_length > scenario.budget() + TOL_GEO {
        return Err(Error::InvalidTrajectory(format!(
            "path length {path_length:.6} exceeds budget {:.6}",
            scenario.budget()
        )));
    }
    Ok(Flight {
        plan,
        trajectory,
        report,
        path_length,
        height,
    })
}

/// Where the scenarios of a sweep come from.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioSource {
    /// Fresh placement per seed.
    Generated(ScenarioTemplate),
    /// One fixed placement; `label` fills the seed column.
    Fixed {
        scenario: Scenario,
        area: AreaOfInterest,
        label: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub algorithms: Vec<Algorithm>,
    pub t_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub source: ScenarioSource,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidSweep("no algorithms".into()));
        }
        if self.t_values.is_empty() || self.r_values.is_empty() {
            return Err(Error::InvalidSweep("empty T or r grid".into()));
        }
        if self.seeds.is_empty() && matches!(self.source, ScenarioSource::Generated(_)) {
            return Err(Error::InvalidSweep("no seeds".into()));
        }
        let n = match &self.source {
            ScenarioSource::Generated(t) => t.n,
            ScenarioSource::Fixed { scenario, .. } => scenario.len(),
        };
        if self.algorithms.contains(&Algorithm::Exact) && n > EXACT_MAX_N {
            return Err(Error::InvalidSweep(format!(
                "exact search needs N <= {EXACT_MAX_N}, scenario has {n}"
            )));
        }
        Ok(())
    }

    /// Cells in output order: algorithm, then seed, then T, then r.
    fn cells(&self) -> Vec<(Algorithm, u64, f64, f64)> {
        let seeds = match &self.source {
            ScenarioSource::Generated(_) => self.seeds.clone(),
            ScenarioSource::Fixed { label, .. } => vec![*label],
        };
        let mut cells = Vec::new();
        for &a in &self.algorithms {
            for &seed in &seeds {
                for &t in &self.t_values {
                    for &r in &self.r_values {
                        cells.push((a, seed, t, r));
                    }
                }
            }
        }
        cells
    }

    fn scenario_for(&self, seed: u64, horizon: f64, radius: f64) -> Result<(Scenario, AreaOfInterest)> {
        let (base, area) = match &self.source {
            ScenarioSource::Generated(template) => {
                let t = ScenarioTemplate {
                    horizon,
                    radius,
                    ..template.clone()
                };
                (generate_scenario(seed, &t)?, template.area)
            }
            ScenarioSource::Fixed { scenario, area, .. } => (scenario.clone(), *area),
        };
        let mut s = base;
        s.horizon = horizon;
        for n in &mut s.nodes {
            n.radius = radius;
        }
        s.validate()?;
        Ok((s, area))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowMetrics {
    pub k: usize,
    pub path_length: f64,
    /// `None` when nothing was collected.
    pub mse: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub horizon: f64,
    pub radius: f64,
    pub outcome: std::result::Result<RowMetrics, String>,
    pub wall_time: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Fill the `wall_time` column. Off by default so reruns are
    /// byte-identical.
    pub record_wall_time: bool,
}

fn run_cell(spec: &SweepSpec, cell: (Algorithm, u64, f64, f64), timed: bool) -> SweepRow {
    let (algorithm, seed, horizon, radius) = cell;
    let clock = Instant::now();
    let outcome = spec
        .scenario_for(seed, horizon, radius)
        .and_then(|(s, area)| {
            let flight = fly(algorithm, &s, &area)?;
            Ok(RowMetrics {
                k: flight.k(),
                path_length: flight.path_length,
                mse: flight.mse(&s.estimation),
            })
        })
        .map_err(|e| e.to_string());
    SweepRow {
        algorithm,
        seed,
        horizon,
        radius,
        outcome,
        wall_time: if timed { clock.elapsed().as_secs_f64() } else { 0.0 },
    }
}

/// One row per (algorithm, seed, T, r). Rows may run in parallel but come
/// back in spec order; failed rows keep their error message.
pub fn run_sweep(spec: &SweepSpec, options: SweepOptions) -> Result<SweepResult> {
    spec.validate()?;
    let cells = spec.cells();
    let compute = || -> Vec<SweepRow> {
        cells
            .par_iter()
            .map(|&c| run_cell(spec, c, options.record_wall_time))
            .collect()
    };
    let rows = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?
            .install(compute),
        None => compute(),
    };
    Ok(SweepResult { rows })
}

pub const CSV_HEADER: [&str; 8] = ["algorithm", "seed", "T", "r", "K", "path_length", "mse", "wall_time"];

impl SweepResult {
    /// CSV with six decimals on every float. Failed rows leave `K` and
    /// `path_length` empty and put `error` in the `mse` column.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            let f6 = |v: f64| format!("{v:.6}");
            let (k, len, mse) = match &row.outcome {
                Ok(m) => (
                    m.k.to_string(),
                    f6(m.path_length),
                    m.mse.map_or_else(|| "undefined".to_string(), f6),
                ),
                Err(_) => (String::new(), String::new(), "error".to_string()),
            };
            w.write_record([
                row.algorithm.name().to_string(),
                row.seed.to_string(),
                f6(row.horizon),
                f6(row.radius),
                k,
                len,
                mse,
                f6(row.wall_time),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// K of the matching row, if it succeeded.
    pub fn k(&self, algorithm: Algorithm, seed: u64, horizon: f64, radius: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.seed == seed && r.horizon == horizon && r.radius == radius)
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|m| m.k)
    }
}

/// Parses `a:b:step` (inclusive), a comma list, or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidSweep(format!("cannot parse grid {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(bad());
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor();
        if count < 0.0 {
            Vec::new()
        } else {
            (0..=count as usize).map(|i| a + i as f64 * step).collect()
        }
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(Error::InvalidSweep(format!("grid {text:?} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

/// Seed list: `a:b` (inclusive), `a:b:step`, a comma list, or one value.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidSweep(format!("cannot parse seeds {text:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let seeds: Vec<u64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, step] => (num(a)?, num(b)?, num(step)?),
            _ => return Err(bad()),
        };
        if step == 0 {
            return Err(bad());
        }
        (a..=b).step_by(step as usize).collect()
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(Error::InvalidSweep(format!("seed list {text:?} is empty")));
    }
    Ok(seeds)
}
