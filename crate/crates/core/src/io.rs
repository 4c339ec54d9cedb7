//! JSON file formats for scenarios and planned flights.
//!
//! Scenario:
//! `{"nodes":[{"id","x","y","r"}], "start":[x,y], "end":[x,y], "v_max", "T", "H",
//!   "estimation":{"sigma2","W","S"}}` with optional `"seed"` and
//! `"area":[[min_x,min_y],[max_x,max_y]]`.
//!
//! Plan: `{"order":[ids], "waypoints":[[x,y]], "vertices":[[t,x,y]], "total_length"}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::benchmarks::AreaOfInterest;
use crate::error::Result;
use crate::estimation::EstimationParams;
use crate::geometry::Point2D;
use crate::model::{Plan, Scenario, SensorNode, TimedPoint, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    x: f64,
    y: f64,
    r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ScenarioRecord {
    nodes: Vec<NodeRecord>,
    start: Point2D,
    end: Point2D,
    v_max: f64,
    #[serde(rename = "T")]
    horizon: f64,
    #[serde(rename = "H", default)]
    altitude: f64,
    #[serde(default)]
    estimation: EstimationParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    area: Option<AreaOfInterest>,
}

/// A scenario as stored on disk, with the optional area of interest used by
/// the sweep baselines.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDoc {
    pub scenario: Scenario,
    pub area: Option<AreaOfInterest>,
}

impl ScenarioDoc {
    pub fn new(scenario: Scenario, area: Option<AreaOfInterest>) -> Self {
        Self { scenario, area }
    }

    /// The stored area, or the bounding box of the scenario.
    pub fn area_or_enclosing(&self) -> AreaOfInterest {
        self.area.unwrap_or_else(|| AreaOfInterest::enclosing(&self.scenario))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: ScenarioRecord = serde_json::from_str(text)?;
        let scenario = Scenario {
            nodes: rec
                .nodes
                .into_iter()
                .map(|n| SensorNode::new(n.id, Point2D::new(n.x, n.y), n.r))
                .collect(),
            start: rec.start,
            end: rec.end,
            v_max: rec.v_max,
            horizon: rec.horizon,
            altitude: rec.altitude,
            estimation: rec.estimation,
            seed: rec.seed,
        };
        scenario.validate()?;
        Ok(Self {
            scenario,
            area: rec.area,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let s = &self.scenario;
        let rec = ScenarioRecord {
            nodes: s
                .nodes
                .iter()
                .map(|n| NodeRecord {
                    id: n.id,
                    x: n.position.x,
                    y: n.position.y,
                    r: n.radius,
                })
                .collect(),
            start: s.start,
            end: s.end,
            v_max: s.v_max,
            horizon: s.horizon,
            altitude: s.altitude,
            estimation: s.estimation,
            seed: s.seed,
            area: self.area,
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }

    pub fn read_from(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        writer.write_all(self.to_json()?.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}

/// A plan together with its time-parameterized trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub order: Vec<usize>,
    pub waypoints: Vec<Point2D>,
    pub vertices: Vec<[f64; 3]>,
    pub total_length: f64,
}

impl FlightRecord {
    pub fn new(order: Vec<usize>, waypoints: Vec<Point2D>, trajectory: &Trajectory, total_length: f64) -> Self {
        Self {
            order,
            waypoints,
            vertices: trajectory
                .vertices
                .iter()
                .map(|v| [v.time, v.position.x, v.position.y])
                .collect(),
            total_length,
        }
    }

    pub fn from_plan(plan: &Plan, trajectory: &Trajectory) -> Self {
        Self::new(
            plan.order.clone(),
            plan.waypoints.clone(),
            trajectory,
            plan.total_length,
        )
    }

    pub fn trajectory(&self) -> Trajectory {
        Trajectory {
            vertices: self
                .vertices
                .iter()
                .map(|&[time, x, y]| TimedPoint {
                    time,
                    position: Point2D::new(x, y),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
