//! Trajectory planning for a UAV that collects readings from ground sensor
//! nodes within a flight-time budget.
//!
//! The main entry point is [`planner::greedy_plan`]: it grows a visiting set
//! one node at a time, orders it with a nearest-neighbour tour improved by 2-opt and Or-opt
//! ([`tsp`]) and places one waypoint per node with a disk-chain solver
//! ([`waypoint`]). [`benchmarks`] has the strip and zig-zag sweep baselines,
//! and [`harness`] runs seeded parameter sweeps to CSV.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod model;
pub mod planner;
pub mod tsp;
pub mod waypoint;

pub use error::{Error, Result};
pub use estimation::{mse, EstimationParams};
pub use geometry::{Point2D, TOL_GEO, TOL_SPEED};
pub use model::{
    plan_to_trajectory, polyline_reduce, visit_report, Plan, Scenario, SensorNode, Trajectory, VisitReport,
};
pub use planner::{exact_plan, greedy_plan, plan_route};
