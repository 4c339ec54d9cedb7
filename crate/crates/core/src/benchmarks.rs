//! Baseline coverage sweeps: strip (boustrophedon) and zig-zag.
//!
//! Both work in a frame whose u-axis runs from the start to the end point.
//! Sweep lines sit at `u = r, 3r, 5r, ...` (spacing `2 r`, `r` the smallest
//! coverage radius, the last line clamped to the end point) and reach
//! `height / 2` to either side of the u-axis, clipped to the area of
//! interest. The strip path runs along each line and steps to the next one
//! along the clipped edge. The zig-zag path is a sawtooth: a diagonal ramp
//! from the bottom of one line to the top of the next, then straight down
//! that line, so its legs are parallel. Height zero gives the direct flight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, polyline_length, Frame, Point2D, TOL_GEO};
use crate::model::{Scenario, Trajectory};

/// Bisection stops once the height bracket is narrower than this (meters).
pub const HEIGHT_TOL: f64 = 1.0;

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[Point2D; 2]", into = "[Point2D; 2]")]
pub struct AreaOfInterest {
    pub min: Point2D,
    pub max: Point2D,
}

impl AreaOfInterest {
    pub fn new(min: Point2D, max: Point2D) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max.x > min.x && max.y > min.y) {
            return Err(Error::InvalidScenario(format!(
                "area must have positive width and height, got {min:?}..{max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    /// Rectangle of the given size centered on the origin.
    pub fn centered(width: f64, height: f64) -> Result<Self> {
        Self::new(
            Point2D::new(-width / 2.0, -height / 2.0),
            Point2D::new(width / 2.0, height / 2.0),
        )
    }

    /// Bounding box of all nodes and both endpoints, padded to a minimum
    /// extent of one meter.
    pub fn enclosing(scenario: &Scenario) -> Self {
        let pts = scenario
            .nodes
            .iter()
            .map(|n| n.position)
            .chain([scenario.start, scenario.end]);
        let (mut min, mut max) = (
            Point2D::new(f64::INFINITY, f64::INFINITY),
            Point2D::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in pts {
            min = Point2D::new(min.x.min(p.x), min.y.min(p.y));
            max = Point2D::new(max.x.max(p.x), max.y.max(p.y));
        }
        let pad = |lo: f64, hi: f64| if hi - lo < 1.0 { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        let (x0, x1) = pad(min.x, max.x);
        let (y0, y1) = pad(min.y, max.y);
        Self {
            min: Point2D::new(x0, y0),
            max: Point2D::new(x1, y1),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        distance(self.min, self.max)
    }

    pub fn contains(&self, p: Point2D) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    /// Parameter range `t` for which `origin + t * dir` lies in the rectangle.
    fn clip_line(&self, origin: Point2D, dir: Point2D) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (o, d, min, max) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
        ] {
            if d.abs() < 1e-15 {
                if o < min || o > max {
                    return None;
                }
            } else {
                let (a, b) = ((min - o) / d, (max - o) / d);
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

impl TryFrom<[Point2D; 2]> for AreaOfInterest {
    type Error = Error;
    fn try_from([min, max]: [Point2D; 2]) -> Result<Self> {
        Self::new(min, max)
    }
}

impl From<AreaOfInterest> for [Point2D; 2] {
    fn from(a: AreaOfInterest) -> Self {
        [a.min, a.max]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepKind {
    Strip,
    Zigzag,
}

/// A sweep line: position along the u-axis and its clipped transverse extent.
#[derive(Clone, Copy, Debug)]
struct SweepLine {
    u: f64,
    lo: f64,
    hi: f64,
}

fn sweep_lines(scenario: &Scenario, area: &AreaOfInterest, frame: &Frame, height: f64) -> Vec<SweepLine> {
    let Some(r) = scenario.min_radius().filter(|&r| r > 0.0) else {
        return Vec::new();
    };
    let spacing = 2.0 * r;
    let direct = scenario.direct_distance();
    let count = ((direct / spacing).ceil() as usize).max(1);
    let half = 0.5 * height;
    (0..count)
        .map(|i| {
            let u = (r + spacing * i as f64).min(direct);
            let (mut lo, mut hi) = match area.clip_line(frame.to_world(Point2D::new(u, 0.0)), frame.v) {
                Some((a, b)) if a.max(-half) <= b.min(half) => (a.max(-half), b.min(half)),
                _ => (0.0, 0.0),
            };
            // Keep the start-end axis on every line so that height 0 is the
            // direct flight and taller sweeps contain shorter ones.
            lo = lo.min(0.0);
            hi = hi.max(0.0);
            SweepLine { u, lo, hi }
        })
        .collect()
}

/// Polyline vertices of a sweep of the given total transverse `height`.
pub fn sweep_path(scenario: &Scenario, area: &AreaOfInterest, height: f64, kind: SweepKind) -> Vec<Point2D> {
    let frame = Frame::along(scenario.start, scenario.end);
    let mut local = vec![Point2D::ORIGIN];
    if height > 0.0 {
        for (i, line) in sweep_lines(scenario, area, &frame, height).iter().enumerate() {
            let bottom = Point2D::new(line.u, line.lo);
            let top = Point2D::new(line.u, line.hi);
            match (kind, i % 2 == 0) {
                (SweepKind::Strip, true) => local.extend([bottom, top]),
                (SweepKind::Strip, false) => local.extend([top, bottom]),
                (SweepKind::Zigzag, _) => local.extend([top, bottom]),
            }
        }
    }
    let mut world: Vec<Point2D> = local.into_iter().map(|p| frame.to_world(p)).collect();
    world[0] = scenario.start;
    world.push(scenario.end);
    world
}

pub fn sweep_length(scenario: &Scenario, area: &AreaOfInterest, height: f64, kind: SweepKind) -> f64 {
    polyline_length(sweep_path(scenario, area, height, kind))
}

/// Constant-speed trajectory along a sweep; fails if the path exceeds the
/// flight budget.
pub fn sweep_trajectory(
    scenario: &Scenario,
    area: &AreaOfInterest,
    height: f64,
    kind: SweepKind,
) -> Result<Trajectory> {
    if !(height >= 0.0) {
        return Err(Error::InvalidScenario(format!(
            "sweep height must be >= 0, got {height}"
        )));
    }
    let path = sweep_path(scenario, area, height, kind);
    let length = polyline_length(path.iter().copied());
    let budget = scenario.budget();
    if length > budget + TOL_GEO {
        return Err(Error::InfeasiblePlan {
            length,
            budget,
            excess: length - budget,
        });
    }
    Trajectory::constant_speed(&path, scenario.horizon)
}

pub fn strip_trajectory(scenario: &Scenario, area: &AreaOfInterest, height: f64) -> Result<Trajectory> {
    sweep_trajectory(scenario, area, height, SweepKind::Strip)
}

pub fn zigzag_trajectory(scenario: &Scenario, area: &AreaOfInterest, height: f64) -> Result<Trajectory> {
    sweep_trajectory(scenario, area, height, SweepKind::Zigzag)
}

/// Largest sweep height (to within [`HEIGHT_TOL`]) whose path fits the
/// flight budget, searched over `[0, area diagonal]`.
pub fn tune_height(scenario: &Scenario, area: &AreaOfInterest, kind: SweepKind) -> Result<(f64, Trajectory)> {
    let budget = scenario.budget();
    let fits = |h: f64| sweep_length(scenario, area, h, kind) <= budget;
    let mut lo = 0.0;
    let mut hi = area.diagonal();
    if fits(hi) {
        lo = hi;
    } else {
        while hi - lo > HEIGHT_TOL {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok((lo, sweep_trajectory(scenario, area, lo, kind)?))
}
