mod common;

use common::*;
use uavplan::geometry::{distance, point_segment_distance, polyline_length};
use uavplan::model::{plan_to_trajectory, visit_report, Trajectory};
use uavplan::planner::{exact_plan, greedy_plan, EXACT_MAX_N};
use uavplan::tsp::{order_sites, path_length, TourInstance};
use uavplan::waypoint::{solve_disk_chain, Disk, DiskChainInstance, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use uavplan::{mse, EstimationParams, Point2D, TOL_GEO};

fn random_chain(rng: &mut TestRng, k: usize) -> (Point2D, Point2D, Vec<(Point2D, f64)>) {
    let start = rng.point(50.0);
    let end = rng.point(50.0);
    let disks = (0..k).map(|_| (rng.point(50.0), rng.range(0.0, 15.0))).collect();
    (start, end, disks)
}

fn solve(start: Point2D, end: Point2D, disks: &[(Point2D, f64)]) -> f64 {
    let inst = DiskChainInstance::new(start, end, disks.iter().map(|&(c, r)| Disk::new(c, r)).collect());
    let sol = solve_disk_chain(&inst, DEFAULT_TOL, DEFAULT_MAX_ITERS);
    assert!(sol.converged);
    for (q, &(c, r)) in sol.waypoints.iter().zip(disks) {
        assert!(distance(*q, c) <= r + TOL_GEO);
    }
    sol.length
}

#[test]
fn disk_chain_matches_grid_oracle() {
    let mut rng = TestRng::new(11);
    for case in 0..60 {
        let k = 1 + case % 3;
        let (start, end, disks) = random_chain(&mut rng, k);
        let got = solve(start, end, &disks);
        let (want, _) = disk_chain_oracle(start, end, &disks);
        assert!(got <= want + 1e-3, "case {case}: solver {got} oracle {want}");
        assert!(got >= want - 1e-3, "case {case}: solver {got} below oracle {want}");
    }
}

#[test]
fn disk_chain_oracle_agrees_on_known_case() {
    let (len, pts) = disk_chain_oracle(
        Point2D::new(-1.0, 0.0),
        Point2D::new(1.0, 0.0),
        &[(Point2D::new(0.0, 2.0), 1.0)],
    );
    assert!((len - 2.0 * 2f64.sqrt()).abs() < 1e-6);
    assert!(distance(pts[0], Point2D::new(0.0, 1.0)) < 1e-3);
}

#[test]
fn enlarging_radii_never_lengthens_route() {
    let mut rng = TestRng::new(12);
    for _ in 0..40 {
        let k = 1 + rng.below(3);
        let (start, end, disks) = random_chain(&mut rng, k);
        let grown: Vec<_> = disks.iter().map(|&(c, r)| (c, r * 1.5 + 1.0)).collect();
        let small = solve(start, end, &disks);
        let big = solve(start, end, &grown);
        assert!(big <= small + 1e-6, "{big} > {small}");
        let (oracle_big, _) = disk_chain_oracle(start, end, &grown);
        assert!((big - oracle_big).abs() < 1e-3);
    }
}

#[test]
fn straight_segment_is_optimal_iff_it_meets_every_disk() {
    let mut rng = TestRng::new(13);
    for _ in 0..200 {
        let k = 1 + rng.below(4);
        let (start, end, disks) = random_chain(&mut rng, k);
        let got = solve(start, end, &disks);
        let direct = distance(start, end);
        assert!(got >= direct - 1e-9);
        // Meeting every disk in order: the disks' entry parameters along the
        // segment must admit a non-decreasing choice.
        let dir = end - start;
        let len2 = dir.norm_sq();
        let mut t_prev: f64 = 0.0;
        let mut meets = true;
        for &(c, r) in &disks {
            if point_segment_distance(c, start, end) > r {
                meets = false;
                break;
            }
            // Interval of segment parameters inside the disk.
            let s = ((c - start).dot(dir) / len2).clamp(0.0, 1.0);
            let foot = start + dir * s;
            let half = (r * r - distance(foot, c).powi(2)).max(0.0).sqrt() / len2.sqrt();
            let (lo, hi) = ((s - half).max(0.0), (s + half).min(1.0));
            if hi < t_prev {
                meets = false;
                break;
            }
            t_prev = t_prev.max(lo);
        }
        if meets {
            assert!((got - direct).abs() < 1e-6, "{got} vs {direct}");
        } else {
            assert!(got > direct + 1e-9, "{got} vs {direct}");
        }
    }
}

#[test]
fn tsp_guardrail_against_brute_force() {
    let mut rng = TestRng::new(21);
    let trials = 1000;
    let mut optimal = 0;
    for _ in 0..trials {
        let n = 1 + rng.below(8);
        let start = rng.point(100.0);
        let end = rng.point(100.0);
        let sites: Vec<(usize, Point2D)> = (1..=n).map(|id| (id, rng.point(100.0))).collect();
        let inst = TourInstance::new(start, end, sites.clone());
        let order = order_sites(&inst);
        let got = path_length(&inst, &order).unwrap();
        let pts: Vec<Point2D> = sites.iter().map(|s| s.1).collect();
        let best = brute_force_path(start, end, &pts);
        assert!(got <= 1.25 * best + 1e-9, "{got} vs optimum {best}");
        if got <= best + 1e-6 {
            optimal += 1;
        }
    }
    assert!(optimal * 10 >= trials * 9, "optimal on {optimal}/{trials}");
}

#[test]
fn mse_matches_monte_carlo_quantizer() {
    for (sigma2, w, bits) in [(0.0, 1.0, 2), (1.0, 3.0, 1), (1.0, 1.0, 4), (0.0, 3.0, 4)] {
        let params = EstimationParams::new(sigma2, w, bits).unwrap();
        for k in [1, 3] {
            let want = mc_mse(sigma2, w, bits, k, 250_000, 5);
            let got = mse(&params, k).unwrap();
            assert!(
                ((got - want) / want).abs() < 5e-4,
                "{sigma2} {w} {bits} {k}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn geometric_visits_agree_with_time_sampling() {
    let mut rng = TestRng::new(31);
    for _ in 0..100 {
        let s = random_scenario(&mut rng, 12, 100.0, 1.0, 20.0, 3.0);
        let inner = 1 + rng.below(4);
        let pts = random_polyline(&mut rng, &s, inner, 100.0);
        if polyline_length(pts.iter().copied()) > s.budget() {
            continue;
        }
        let t = Trajectory::constant_speed(&pts, s.horizon).unwrap();
        let report = visit_report(&s, &t).unwrap();
        let dt = 0.01;
        let step = t.max_speed() * dt;
        let sampled = sampled_min_distance(&s, &t, dt);
        for (i, node) in s.nodes.iter().enumerate() {
            if sampled[i] <= node.radius {
                assert!(
                    report.visited[i],
                    "sampling sees node {} but the geometric test does not",
                    node.id
                );
            }
            if report.visited[i] {
                assert!(sampled[i] <= node.radius + TOL_GEO + step / 2.0 + 1e-9);
            }
        }
    }
}

#[test]
fn greedy_never_beats_exhaustive_search() {
    let mut rng = TestRng::new(41);
    for _ in 0..25 {
        let n = 1 + rng.below(6);
        let slack = rng.range(1.0, 1.8);
        let s = random_scenario(&mut rng, n, 100.0, 5.0, 25.0, slack);
        let g = greedy_plan(&s);
        let e = exact_plan(&s, EXACT_MAX_N).unwrap();
        assert!(g.k() <= e.k());
        for p in [&g, &e] {
            p.validate(&s).unwrap();
            let t = plan_to_trajectory(&s, p).unwrap();
            t.validate(&s).unwrap();
            let report = visit_report(&s, &t).unwrap();
            assert!(p.order.iter().all(|&id| report.is_visited(id)));
        }
    }
}
