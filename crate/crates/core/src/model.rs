//! Scenario, plan and trajectory types, plus the visit semantics that tie
//! them together.
//!
//! A node counts as visited when the UAV's ground projection enters its closed
//! coverage disk at least once. For a straight-line trajectory this reduces to
//! a point-to-segment distance test; touching the boundary counts.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::estimation::EstimationParams;
use crate::geometry::{
    closest_point_on_segment, distance, first_disk_entry, point_segment_distance, polyline_length,
    project_onto_segment, Point2D, TOL_GEO, TOL_SPEED,
};

/// Consecutive trajectory vertices closer than this are merged.
const MERGE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorNode {
    /// 1-based index, contiguous within a scenario.
    pub id: usize,
    pub position: Point2D,
    /// Coverage radius in meters.
    pub radius: f64,
}

impl SensorNode {
    pub fn new(id: usize, position: Point2D, radius: f64) -> Self {
        Self { id, position, radius }
    }

    pub fn covers(&self, p: Point2D) -> bool {
        distance(self.position, p) <= self.radius + TOL_GEO
    }
}

/// One planning problem: where the nodes are, where the UAV starts and ends,
/// and how far it can fly.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub nodes: Vec<SensorNode>,
    pub start: Point2D,
    pub end: Point2D,
    /// Speed cap in m/s.
    pub v_max: f64,
    /// Flight duration in seconds.
    pub horizon: f64,
    /// Flight altitude in meters. Carried as metadata; planar math ignores it.
    pub altitude: f64,
    pub estimation: EstimationParams,
    /// Generator seed, when the scenario came from the seeded generator.
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn new(nodes: Vec<SensorNode>, start: Point2D, end: Point2D, v_max: f64, horizon: f64) -> Result<Self> {
        let scenario = Self {
            nodes,
            start,
            end,
            v_max,
            horizon,
            altitude: 100.0,
            estimation: EstimationParams::default(),
            seed: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(Error::InvalidScenario("endpoints must be finite".into()));
        }
        if !(self.v_max.is_finite() && self.v_max > 0.0) {
            return Err(Error::InvalidScenario(format!("v_max must be > 0, got {}", self.v_max)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if !self.altitude.is_finite() {
            return Err(Error::InvalidScenario("altitude must be finite".into()));
        }
        self.estimation.validate()?;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i + 1 {
                return Err(Error::InvalidScenario(format!(
                    "node ids must be contiguous from 1; position {} holds id {}",
                    i + 1,
                    node.id
                )));
            }
            if !node.position.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "node {} has a non-finite position",
                    node.id
                )));
            }
            if !(node.radius.is_finite() && node.radius >= 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "node {} has invalid radius {}",
                    node.id, node.radius
                )));
            }
        }
        let direct = self.direct_distance();
        if direct > self.budget() + TOL_GEO {
            return Err(Error::InvalidScenario(format!(
                "endpoints are {direct:.6} m apart but the budget is only {:.6} m",
                self.budget()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Maximum flight distance `v_max * horizon`.
    pub fn budget(&self) -> f64 {
        self.v_max * self.horizon
    }

    pub fn direct_distance(&self) -> f64 {
        distance(self.start, self.end)
    }

    /// Shortest horizon that still allows the direct flight.
    pub fn t_min(&self) -> f64 {
        self.direct_distance() / self.v_max
    }

    pub fn min_radius(&self) -> Option<f64> {
        self.nodes.iter().map(|n| n.radius).reduce(f64::min)
    }

    pub fn node(&self, id: usize) -> Result<&SensorNode> {
        id.checked_sub(1)
            .and_then(|i| self.nodes.get(i))
            .ok_or(Error::UnknownSite(id))
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        let mut s = self.clone();
        s.horizon = horizon;
        s.validate()?;
        Ok(s)
    }

    pub fn with_uniform_radius(&self, radius: f64) -> Result<Self> {
        let mut s = self.clone();
        for n in &mut s.nodes {
            n.radius = radius;
        }
        s.validate()?;
        Ok(s)
    }

    pub(crate) fn check_ids(&self, ids: &[usize]) -> Result<()> {
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in ids {
            self.node(id)?;
            if !seen.insert(id) {
                return Err(Error::DuplicateSite(id));
            }
        }
        Ok(())
    }
}

/// A visiting order with one collection waypoint per visited node.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub order: Vec<usize>,
    pub waypoints: Vec<Point2D>,
    /// Length of start -> waypoints -> end, in meters.
    pub total_length: f64,
    /// False when the waypoint solver hit its iteration cap.
    pub converged: bool,
}

impl Plan {
    /// The direct flight from start to end.
    pub fn direct(scenario: &Scenario) -> Self {
        Self {
            order: Vec::new(),
            waypoints: Vec::new(),
            total_length: scenario.direct_distance(),
            converged: true,
        }
    }

    pub fn from_waypoints(scenario: &Scenario, order: Vec<usize>, waypoints: Vec<Point2D>) -> Self {
        let total_length = path_through(scenario, &waypoints);
        Self {
            order,
            waypoints,
            total_length,
            converged: true,
        }
    }

    /// Number of nodes the plan collects from.
    pub fn k(&self) -> usize {
        self.order.len()
    }

    /// Polyline vertices `start, waypoints.., end`.
    pub fn polyline(&self, scenario: &Scenario) -> Vec<Point2D> {
        let mut pts = Vec::with_capacity(self.waypoints.len() + 2);
        pts.push(scenario.start);
        pts.extend_from_slice(&self.waypoints);
        pts.push(scenario.end);
        pts
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.order.len() != self.waypoints.len() {
            return Err(Error::InvalidPlan(format!(
                "{} ids but {} waypoints",
                self.order.len(),
                self.waypoints.len()
            )));
        }
        scenario.check_ids(&self.order)?;
        for (&id, &wp) in self.order.iter().zip(&self.waypoints) {
            let node = scenario.node(id)?;
            if !wp.is_finite() || !node.covers(wp) {
                return Err(Error::InvalidPlan(format!(
                    "waypoint for node {id} is {:.6} m from its center, radius {:.6} m",
                    distance(wp, node.position),
                    node.radius
                )));
            }
        }
        let measured = path_through(scenario, &self.waypoints);
        if (measured - self.total_length).abs() > TOL_GEO {
            return Err(Error::InvalidPlan(format!(
                "recorded length {:.9} differs from measured {:.9}",
                self.total_length, measured
            )));
        }
        Ok(())
    }
}

fn path_through(scenario: &Scenario, waypoints: &[Point2D]) -> f64 {
    polyline_length(
        std::iter::once(scenario.start)
            .chain(waypoints.iter().copied())
            .chain(std::iter::once(scenario.end)),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimedPoint {
    pub time: f64,
    pub position: Point2D,
}

/// Piecewise-linear, constant-speed-per-segment flight path.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub vertices: Vec<TimedPoint>,
}

impl Trajectory {
    /// Flies through `points` at one constant speed so that the last point is
    /// reached exactly at `horizon`. Near-duplicate consecutive points are
    /// merged; an all-coincident input yields a two-vertex hover.
    pub fn constant_speed(points: &[Point2D], horizon: f64) -> Result<Self> {
        let (&first, rest) = points
            .split_first()
            .ok_or_else(|| Error::InvalidTrajectory("no points".into()))?;
        let last = *rest.last().unwrap_or(&first);

        let mut kept = vec![first];
        for &p in rest.iter().take(rest.len().saturating_sub(1)) {
            if distance(*kept.last().unwrap(), p) > MERGE_EPS {
                kept.push(p);
            }
        }
        if kept.len() > 1 && distance(*kept.last().unwrap(), last) <= MERGE_EPS {
            kept.pop();
        }
        kept.push(last);

        let total = polyline_length(kept.iter().copied());
        let mut vertices = Vec::with_capacity(kept.len());
        let mut travelled = 0.0;
        for (i, &p) in kept.iter().enumerate() {
            if i > 0 {
                travelled += distance(kept[i - 1], p);
            }
            let time = if i + 1 == kept.len() {
                horizon
            } else if total > 0.0 {
                travelled / total * horizon
            } else {
                0.0
            };
            vertices.push(TimedPoint { time, position: p });
        }
        Ok(Self { vertices })
    }

    pub fn points(&self) -> impl Iterator<Item = Point2D> + '_ {
        self.vertices.iter().map(|v| v.position)
    }

    pub fn length(&self) -> f64 {
        polyline_length(self.points())
    }

    pub fn segments(&self) -> impl Iterator<Item = (TimedPoint, TimedPoint)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Highest segment speed.
    pub fn max_speed(&self) -> f64 {
        self.segments()
            .map(|(a, b)| distance(a.position, b.position) / (b.time - a.time))
            .fold(0.0, f64::max)
    }

    /// Position at time `t`, clamped to the flight window.
    pub fn position_at(&self, t: f64) -> Point2D {
        let first = self.vertices[0];
        if t <= first.time {
            return first.position;
        }
        for (a, b) in self.segments() {
            if t <= b.time {
                let s = (t - a.time) / (b.time - a.time);
                return a.position.lerp(b.position, s);
            }
        }
        self.vertices.last().unwrap().position
    }

    /// Checks endpoints, timing and the speed cap against `scenario`.
    ///
    /// The speed cap is enforced as `len <= (v_max + TOL_SPEED) dt + TOL_GEO`
    /// per segment so that very short segments are not rejected for the
    /// rounding error in their duration.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let n = self.vertices.len();
        if n < 2 {
            return Err(Error::InvalidTrajectory(format!("{n} vertices, need at least 2")));
        }
        let first = self.vertices[0];
        let last = self.vertices[n - 1];
        if first.time != 0.0 {
            return Err(Error::InvalidTrajectory(format!(
                "first vertex at t = {}, expected 0",
                first.time
            )));
        }
        if (last.time - scenario.horizon).abs() > 1e-9 * scenario.horizon.max(1.0) {
            return Err(Error::InvalidTrajectory(format!(
                "last vertex at t = {}, expected {}",
                last.time, scenario.horizon
            )));
        }
        if distance(first.position, scenario.start) > TOL_GEO {
            return Err(Error::InvalidTrajectory("does not start at q0".into()));
        }
        if distance(last.position, scenario.end) > TOL_GEO {
            return Err(Error::InvalidTrajectory("does not end at qF".into()));
        }
        for (i, (a, b)) in self.segments().enumerate() {
            if !a.position.is_finite() || !b.position.is_finite() {
                return Err(Error::InvalidTrajectory(format!("segment {i} is not finite")));
            }
            let dt = b.time - a.time;
            if !(dt > 0.0) {
                return Err(Error::InvalidTrajectory(format!(
                    "times must strictly increase (segment {i})"
                )));
            }
            let len = distance(a.position, b.position);
            if len > (scenario.v_max + TOL_SPEED) * dt + TOL_GEO {
                return Err(Error::InvalidTrajectory(format!(
                    "segment {i} needs {:.9} m/s, cap is {} m/s",
                    len / dt,
                    scenario.v_max
                )));
            }
        }
        Ok(())
    }
}

/// Which nodes a trajectory collects from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitReport {
    /// Indexed by `id - 1`.
    pub visited: Vec<bool>,
    pub count: usize,
}

impl VisitReport {
    pub fn is_visited(&self, id: usize) -> bool {
        id.checked_sub(1)
            .and_then(|i| self.visited.get(i))
            .copied()
            .unwrap_or(false)
    }

    pub fn visited_ids(&self) -> Vec<usize> {
        self.visited
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| v.then_some(i + 1))
            .collect()
    }
}

/// Minimum distance from `p` to the polyline through `points`.
pub fn polyline_distance(p: Point2D, points: &[Point2D]) -> f64 {
    match points {
        [] => f64::INFINITY,
        [only] => distance(p, *only),
        _ => points
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Evaluates the visit indicator of every node for a validated trajectory.
pub fn visit_report(scenario: &Scenario, trajectory: &Trajectory) -> Result<VisitReport> {
    trajectory.validate(scenario)?;
    let pts: Vec<Point2D> = trajectory.points().collect();
    let visited: Vec<bool> = scenario
        .nodes
        .iter()
        .map(|n| polyline_distance(n.position, &pts) <= n.radius + TOL_GEO)
        .collect();
    let count = visited.iter().filter(|&&v| v).count();
    Ok(VisitReport { visited, count })
}

/// Time-parameterizes a plan at the constant speed `total_length / horizon`.
pub fn plan_to_trajectory(scenario: &Scenario, plan: &Plan) -> Result<Trajectory> {
    plan.validate(scenario)?;
    let budget = scenario.budget();
    if plan.total_length > budget + TOL_GEO {
        return Err(Error::InfeasiblePlan {
            length: plan.total_length,
            budget,
            excess: plan.total_length - budget,
        });
    }
    Trajectory::constant_speed(&plan.polyline(scenario), scenario.horizon)
}

/// Replaces a trajectory by straight legs between the points where it first
/// enters each visited disk, taken in order of first entry.
///
/// The result collects from every node the input collects from and is never
/// longer than the input.
pub fn polyline_reduce(scenario: &Scenario, trajectory: &Trajectory) -> Result<Plan> {
    trajectory.validate(scenario)?;
    let pts: Vec<Point2D> = trajectory.points().collect();

    // (segment index, parameter on segment, id, entry point)
    let mut entries: Vec<(usize, f64, usize, Point2D)> = Vec::new();
    for node in &scenario.nodes {
        let entry = pts.windows(2).enumerate().find_map(|(i, w)| {
            let (a, b) = (w[0], w[1]);
            if point_segment_distance(node.position, a, b) > node.radius + TOL_GEO {
                return None;
            }
            // A near-tangent pass within tolerance enters at the closest point.
            let s = first_disk_entry(a, b, node.position, node.radius)
                .unwrap_or_else(|| project_onto_segment(node.position, a, b));
            Some((i, s, a.lerp(b, s)))
        });
        if let Some((i, s, p)) = entry {
            entries.push((i, s, node.id, p));
        }
    }
    entries.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)));

    let order = entries.iter().map(|e| e.2).collect();
    let waypoints = entries.iter().map(|e| e.3).collect();
    Ok(Plan::from_waypoints(scenario, order, waypoints))
}

/// Largest distance from any trajectory vertex to the straight `start`-`end`
/// segment.
pub fn deviation_from_direct(scenario: &Scenario, trajectory: &Trajectory) -> f64 {
    trajectory
        .points()
        .map(|p| distance(p, closest_point_on_segment(p, scenario.start, scenario.end)))
        .fold(0.0, f64::max)
}
