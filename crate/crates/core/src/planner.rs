//! Subset selection: which nodes to collect from within the flight budget.
//!
//! [`greedy_plan`] grows the collected set one node per round, always adding
//! the node whose route comes out shortest. [`exact_plan`] enumerates every
//! subset and visiting order and serves as the reference on small instances.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance, polyline_length, TOL_GEO};
use crate::model::{Plan, Scenario};
use crate::tsp::{order_sites, TourInstance};
use crate::waypoint::{solve_disk_chain, Disk, DiskChainInstance, DEFAULT_MAX_ITERS, DEFAULT_TOL};

/// Default node limit for [`exact_plan`].
pub const EXACT_MAX_N: usize = 8;

/// Accuracy settings for the waypoint solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// Route through the disks of `subset` in the given order.
pub fn route_in_order(scenario: &Scenario, order: &[usize], settings: SolverSettings) -> Result<Plan> {
    scenario.check_ids(order)?;
    let disks = order
        .iter()
        .map(|&id| scenario.node(id).map(|n| Disk::new(n.position, n.radius)))
        .collect::<Result<Vec<_>>>()?;
    let chain = DiskChainInstance::new(scenario.start, scenario.end, disks);
    let sol = solve_disk_chain(&chain, settings.tol, settings.max_iters);
    Ok(Plan {
        order: order.to_vec(),
        waypoints: sol.waypoints,
        total_length: sol.length,
        converged: sol.converged,
    })
}

/// Orders `subset` by the fixed-endpoint TSP over node centers, then places
/// one waypoint per disk.
pub fn plan_route_with(subset: &[usize], scenario: &Scenario, settings: SolverSettings) -> Result<Plan> {
    scenario.check_ids(subset)?;
    let sites = subset
        .iter()
        .map(|&id| scenario.node(id).map(|n| (id, n.position)))
        .collect::<Result<Vec<_>>>()?;
    let order = order_sites(&TourInstance::new(scenario.start, scenario.end, sites));
    route_in_order(scenario, &order, settings)
}

pub fn plan_route(subset: &[usize], scenario: &Scenario) -> Result<Plan> {
    plan_route_with(subset, scenario, SolverSettings::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Every node was added.
    AllVisited,
    /// No remaining node fits within the budget.
    NoFeasibleInsertion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyOutcome {
    pub plan: Plan,
    pub termination: Termination,
    /// Rounds in which a node was accepted.
    pub accepted_rounds: usize,
    /// Number of candidate routes evaluated.
    pub route_calls: usize,
}

/// Upper bound on the tour length used to seed each round: the path
/// start -> w_1 -> ... -> w_N -> end in id order.
pub fn id_order_length(scenario: &Scenario) -> f64 {
    polyline_length(
        std::iter::once(scenario.start)
            .chain(scenario.nodes.iter().map(|n| n.position))
            .chain(std::iter::once(scenario.end)),
    )
}

pub fn greedy_plan(scenario: &Scenario) -> Plan {
    greedy_plan_detailed(scenario, SolverSettings::default()).plan
}

/// Greedy growth of the collected set.
///
/// Each round starts with `d_min = d_max` and evaluates every node not yet
/// collected; a candidate is accepted when its route fits the budget and is
/// strictly shorter than the best so far, so equal lengths keep the lower id.
/// The loop ends when all nodes are collected or a round accepts nothing.
pub fn greedy_plan_detailed(scenario: &Scenario, settings: SolverSettings) -> GreedyOutcome {
    let n = scenario.len();
    let budget = scenario.budget();
    let d_max = id_order_length(scenario);

    let mut chosen: Vec<usize> = Vec::new();
    let mut in_set = vec![false; n];
    let mut best_plan = Plan::direct(scenario);
    let mut route_calls = 0;
    let mut accepted_rounds = 0;
    let mut d_min = 0.0;

    while chosen.len() < n && d_min < d_max {
        d_min = d_max;
        let candidates: Vec<usize> = (1..=n).filter(|&id| !in_set[id - 1]).collect();
        route_calls += candidates.len();

        let routes: Vec<(usize, Plan)> = candidates
            .par_iter()
            .map(|&id| {
                let mut subset = chosen.clone();
                subset.push(id);
                let plan = plan_route_with(&subset, scenario, settings).expect("subset ids come from the scenario");
                (id, plan)
            })
            .collect();

        let mut accepted: Option<(usize, Plan)> = None;
        for (id, plan) in routes {
            if plan.total_length <= budget && plan.total_length < d_min {
                d_min = plan.total_length;
                accepted = Some((id, plan));
            }
        }
        if let Some((id, plan)) = accepted {
            chosen.push(id);
            in_set[id - 1] = true;
            best_plan = plan;
            accepted_rounds += 1;
        }
    }

    let best_plan = straighten(scenario, best_plan);
    let termination = if chosen.len() == n {
        Termination::AllVisited
    } else {
        Termination::NoFeasibleInsertion
    };
    GreedyOutcome {
        plan: best_plan,
        termination,
        accepted_rounds,
        route_calls,
    }
}

/// Puts the waypoints exactly on the start-end segment when the route is
/// that segment up to `TOL_GEO`.
///
/// Near-collinear waypoints are only pinned to the segment to about the
/// square root of the solver tolerance, since length is flat there. With no
/// slack in the budget the segment is the only feasible path, so it is
/// returned as such. Each waypoint moves to the nearest point of its disk's
/// chord; the plan is left alone if the chords are missing or out of order.
fn straighten(scenario: &Scenario, plan: Plan) -> Plan {
    let (a, b) = (scenario.start, scenario.end);
    let len = distance(a, b);
    if plan.order.is_empty() || len == 0.0 || plan.total_length > len + TOL_GEO {
        return plan;
    }
    let u = (b - a) * (1.0 / len);
    let mut prev = 0.0;
    let mut waypoints = Vec::with_capacity(plan.waypoints.len());
    for (&id, &q) in plan.order.iter().zip(&plan.waypoints) {
        let node = &scenario.nodes[id - 1];
        let s0 = (node.position - a).dot(u);
        let h2 = node.radius * node.radius - (node.position - a).norm_sq() + s0 * s0;
        if h2 < 0.0 {
            return plan;
        }
        let h = h2.sqrt();
        let (lo, hi) = ((s0 - h).max(prev), (s0 + h).min(len));
        if lo > hi {
            return plan;
        }
        let t = (q - a).dot(u).clamp(lo, hi);
        prev = t;
        waypoints.push(a + u * t);
    }
    let total_length = polyline_length(
        std::iter::once(a)
            .chain(waypoints.iter().copied())
            .chain(std::iter::once(b)),
    );
    Plan {
        waypoints,
        total_length,
        ..plan
    }
}

/// Cheap lower bound on any route visiting the disks in `order`: each leg is
/// at least the center distance minus both radii.
fn order_lower_bound(scenario: &Scenario, order: &[usize]) -> f64 {
    let mut prev = (scenario.start, 0.0);
    let mut total = 0.0;
    for &id in order {
        let node = &scenario.nodes[id - 1];
        total += (distance(prev.0, node.position) - prev.1 - node.radius).max(0.0);
        prev = (node.position, node.radius);
    }
    total + (distance(prev.0, scenario.end) - prev.1).max(0.0)
}

fn best_order_for_subset(scenario: &Scenario, subset: &[usize], settings: SolverSettings) -> Option<Plan> {
    let budget = scenario.budget();
    let mut best: Option<Plan> = None;
    for order in subset.iter().copied().permutations(subset.len()) {
        let lb = order_lower_bound(scenario, &order);
        let bound = best.as_ref().map_or(budget, |b| b.total_length.min(budget));
        if lb > bound {
            continue;
        }
        let plan = route_in_order(scenario, &order, settings).expect("ids come from the scenario");
        if plan.total_length <= budget && best.as_ref().is_none_or(|b| plan.total_length < b.total_length) {
            best = Some(plan);
        }
    }
    best
}

/// Exhaustive search over subsets (largest first) and visiting orders.
///
/// Returns the shortest plan among those of maximum size. Exponential in the
/// node count; rejected above `max_n` nodes.
pub fn exact_plan_with(scenario: &Scenario, max_n: usize, settings: SolverSettings) -> Result<Plan> {
    let n = scenario.len();
    if n > max_n {
        return Err(Error::TooManyNodes { n, max: max_n });
    }
    for size in (1..=n).rev() {
        let subsets: Vec<Vec<usize>> = (1..=n).combinations(size).collect();
        let found: Vec<Option<Plan>> = subsets
            .par_iter()
            .map(|s| best_order_for_subset(scenario, s, settings))
            .collect();
        let mut best: Option<Plan> = None;
        for plan in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| plan.total_length < b.total_length) {
                best = Some(plan);
            }
        }
        if let Some(plan) = best {
            return Ok(straighten(scenario, plan));
        }
    }
    Ok(Plan::direct(scenario))
}

pub fn exact_plan(scenario: &Scenario, max_n: usize) -> Result<Plan> {
    exact_plan_with(scenario, max_n, SolverSettings::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2D;
    use crate::model::SensorNode;

    fn scenario(nodes: &[(f64, f64, f64)], end: Point2D, v: f64, t: f64) -> Scenario {
        let nodes = nodes
            .iter()
            .enumerate()
            .map(|(i, &(x, y, r))| SensorNode::new(i + 1, Point2D::new(x, y), r))
            .collect();
        Scenario::new(nodes, Point2D::ORIGIN, end, v, t).unwrap()
    }

    #[test]
    fn empty_subset_is_direct_flight() {
        let s = scenario(&[(5.0, 5.0, 1.0)], Point2D::new(10.0, 0.0), 1.0, 20.0);
        let plan = plan_route(&[], &s).unwrap();
        assert_eq!(plan.total_length, 10.0);
        assert!(plan.order.is_empty());
    }

    #[test]
    fn disk_on_the_way_costs_nothing() {
        let s = scenario(&[(5.0, 0.5, 1.0)], Point2D::new(10.0, 0.0), 1.0, 20.0);
        let plan = plan_route(&[1], &s).unwrap();
        assert!((plan.total_length - 10.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_points_in_line_order() {
        let s = scenario(
            &[(7.0, 0.0, 0.0), (2.0, 0.0, 0.0), (4.0, 0.0, 0.0)],
            Point2D::new(10.0, 0.0),
            1.0,
            10.0,
        );
        let plan = plan_route(&[1, 2, 3], &s).unwrap();
        assert_eq!(plan.order, vec![2, 3, 1]);
        assert!((plan.total_length - 10.0).abs() < 1e-12);
    }

    #[test]
    fn route_rejects_bad_ids() {
        let s = scenario(&[(1.0, 1.0, 1.0)], Point2D::new(10.0, 0.0), 1.0, 20.0);
        assert!(matches!(plan_route(&[2], &s), Err(Error::UnknownSite(2))));
        assert!(matches!(plan_route(&[1, 1], &s), Err(Error::DuplicateSite(1))));
    }

    #[test]
    fn no_slack_no_detours() {
        let s = scenario(&[(5.0, 3.0, 1.0), (2.0, -4.0, 0.5)], Point2D::new(10.0, 0.0), 1.0, 10.0);
        let out = greedy_plan_detailed(&s, SolverSettings::default());
        assert_eq!(out.plan.k(), 0);
        assert_eq!(out.termination, Termination::NoFeasibleInsertion);
        assert_eq!(out.route_calls, 2);
    }

    #[test]
    fn zero_slack_plans_lie_on_the_segment() {
        let s = scenario(
            &[(3.0, 0.7, 1.0), (7.0, -0.9, 1.0), (5.0, 3.0, 1.0)],
            Point2D::new(10.0, 0.0),
            1.0,
            10.0,
        );
        for plan in [greedy_plan(&s), exact_plan(&s, EXACT_MAX_N).unwrap()] {
            assert_eq!(plan.order, vec![1, 2]);
            assert!(plan.waypoints.iter().all(|w| w.y == 0.0));
            assert_eq!(plan.total_length, 10.0);
            plan.validate(&s).unwrap();
        }
    }

    #[test]
    fn straighten_keeps_detours() {
        let s = scenario(&[(5.0, 3.0, 1.0)], Point2D::new(10.0, 0.0), 1.0, 20.0);
        let plan = plan_route(&[1], &s).unwrap();
        assert_eq!(straighten(&s, plan.clone()), plan);
    }

    #[test]
    fn greedy_picks_everything_with_a_large_budget() {
        let s = scenario(
            &[(5.0, 3.0, 1.0), (2.0, -4.0, 0.5), (8.0, 8.0, 0.2)],
            Point2D::new(10.0, 0.0),
            1.0,
            100.0,
        );
        let out = greedy_plan_detailed(&s, SolverSettings::default());
        assert_eq!(out.termination, Termination::AllVisited);
        assert_eq!(out.plan.k(), 3);
        assert!(out.route_calls <= 6);
        out.plan.validate(&s).unwrap();
    }

    #[test]
    fn greedy_prefers_the_cheaper_node() {
        // Node 2 sits on the direct path, node 1 needs a detour.
        let s = scenario(&[(5.0, 4.0, 0.5), (5.0, 0.0, 0.5)], Point2D::new(10.0, 0.0), 1.0, 10.5);
        let plan = greedy_plan(&s);
        assert_eq!(plan.order, vec![2]);
    }

    #[test]
    fn exact_small_cases() {
        let s = scenario(&[], Point2D::new(10.0, 0.0), 1.0, 10.0);
        assert_eq!(exact_plan(&s, EXACT_MAX_N).unwrap().k(), 0);
        let s = scenario(&[(5.0, 2.0, 1.0)], Point2D::new(10.0, 0.0), 1.0, 11.0);
        assert_eq!(exact_plan(&s, EXACT_MAX_N).unwrap().k(), 1);
    }

    #[test]
    fn exact_rejects_large_instances() {
        let nodes: Vec<_> = (0..9).map(|i| (i as f64, 1.0, 0.5)).collect();
        let s = scenario(&nodes, Point2D::new(10.0, 0.0), 1.0, 20.0);
        assert!(matches!(exact_plan(&s, 8), Err(Error::TooManyNodes { n: 9, max: 8 })));
    }

    #[test]
    fn lower_bound_never_exceeds_route() {
        let s = scenario(
            &[(3.0, 4.0, 1.0), (6.0, -2.0, 0.7), (1.0, 1.0, 2.0)],
            Point2D::new(10.0, 0.0),
            1.0,
            100.0,
        );
        for order in (1..=3).permutations(3) {
            let plan = route_in_order(&s, &order, SolverSettings::default()).unwrap();
            assert!(order_lower_bound(&s, &order) <= plan.total_length + 1e-9);
        }
    }
}
