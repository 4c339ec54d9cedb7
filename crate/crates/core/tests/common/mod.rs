//! Independent reference implementations used by the integration tests.
//! None of these call into the solver internals they check.

#![allow(dead_code)]

use itertools::Itertools;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use uavplan::geometry::{distance, polyline_length};
use uavplan::model::{Scenario, SensorNode, Trajectory};
use uavplan::Point2D;

pub struct TestRng(SplitMix64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn point(&mut self, half: f64) -> Point2D {
        Point2D::new(self.range(-half, half), self.range(-half, half))
    }
}

// ---------------------------------------------------------------------------
// Disk chain: layered shortest path over per-disk grids, refined by zooming
// each grid window around the current best point.

fn grid_in_disk(center: Point2D, radius: f64, focus: Point2D, half: f64, side: usize) -> Vec<Point2D> {
    if radius == 0.0 {
        return vec![center];
    }
    let mut pts = Vec::with_capacity(side * side);
    for i in 0..side {
        for j in 0..side {
            let p = Point2D::new(
                focus.x - half + 2.0 * half * i as f64 / (side - 1) as f64,
                focus.y - half + 2.0 * half * j as f64 / (side - 1) as f64,
            );
            let d = p - center;
            let n = d.norm();
            pts.push(if n <= radius { p } else { center + d * (radius / n) });
        }
    }
    pts.push(focus);
    pts
}

/// Shortest start -> disk_1 -> ... -> disk_k -> end length, found by dynamic
/// programming on grids that shrink by half around the incumbent until the
/// grid spacing is below 1e-4 m.
pub fn disk_chain_oracle(start: Point2D, end: Point2D, disks: &[(Point2D, f64)]) -> (f64, Vec<Point2D>) {
    const SIDE: usize = 21;
    if disks.is_empty() {
        return (distance(start, end), Vec::new());
    }
    let mut focus: Vec<Point2D> = disks.iter().map(|d| d.0).collect();
    let mut half: Vec<f64> = disks.iter().map(|d| d.1).collect();
    let mut best = (f64::INFINITY, focus.clone());
    loop {
        let layers: Vec<Vec<Point2D>> = disks
            .iter()
            .zip(&focus)
            .zip(&half)
            .map(|((&(c, r), &f), &h)| grid_in_disk(c, r, f, h, SIDE))
            .collect();
        // cost[i] = best length from start to layer point i; back pointers.
        let mut cost: Vec<f64> = layers[0].iter().map(|&p| distance(start, p)).collect();
        let mut back: Vec<Vec<usize>> = Vec::new();
        for w in 1..layers.len() {
            let mut next = vec![f64::INFINITY; layers[w].len()];
            let mut arg = vec![0; layers[w].len()];
            for (j, &q) in layers[w].iter().enumerate() {
                for (i, &p) in layers[w - 1].iter().enumerate() {
                    let c = cost[i] + distance(p, q);
                    if c < next[j] {
                        next[j] = c;
                        arg[j] = i;
                    }
                }
            }
            cost = next;
            back.push(arg);
        }
        let (mut idx, total) = cost
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, c + distance(layers[layers.len() - 1][i], end)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let mut pts = vec![Point2D::ORIGIN; layers.len()];
        for w in (0..layers.len()).rev() {
            pts[w] = layers[w][idx];
            if w > 0 {
                idx = back[w - 1][idx];
            }
        }
        if total < best.0 {
            best = (total, pts.clone());
        }
        focus = pts;
        let spacing = half.iter().cloned().fold(0.0, f64::max) * 2.0 / (SIDE - 1) as f64;
        if spacing < 1e-4 {
            return best;
        }
        for h in &mut half {
            *h *= 0.5;
        }
    }
}

// ---------------------------------------------------------------------------
// Open-path TSP by brute force.

pub fn open_path_length(start: Point2D, end: Point2D, pts: &[Point2D]) -> f64 {
    polyline_length(
        std::iter::once(start)
            .chain(pts.iter().copied())
            .chain(std::iter::once(end)),
    )
}

/// Optimal start -> (all sites) -> end length over every permutation.
pub fn brute_force_path(start: Point2D, end: Point2D, sites: &[Point2D]) -> f64 {
    if sites.is_empty() {
        return distance(start, end);
    }
    (0..sites.len())
        .permutations(sites.len())
        .map(|perm| {
            let pts: Vec<Point2D> = perm.iter().map(|&i| sites[i]).collect();
            open_path_length(start, end, &pts)
        })
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Quantized-reading variance by Monte Carlo with jittered stratification.

/// Mean squared error of a uniform mid-tread quantizer with `2^bits` levels
/// spread evenly over `[-w, w]`, for inputs uniform on `[-w, w]`.
pub fn mc_quantization_variance(w: f64, bits: u32, samples: usize, rng: &mut TestRng) -> f64 {
    let levels = (1u64 << bits) as f64;
    let step = 2.0 * w / (levels - 1.0);
    let mut acc = 0.0;
    for i in 0..samples {
        let u = -w + 2.0 * w * (i as f64 + rng.unit()) / samples as f64;
        let idx = ((u + w) / step).round().clamp(0.0, levels - 1.0);
        let q = -w + idx * step;
        acc += (q - u) * (q - u);
    }
    acc / samples as f64
}

/// Second moment of a zero-mean Gaussian with variance `sigma2`, by
/// Box-Muller over a jittered grid of strata.
pub fn mc_noise_variance(sigma2: f64, samples: usize, rng: &mut TestRng) -> f64 {
    if sigma2 == 0.0 {
        return 0.0;
    }
    let side = (samples as f64).sqrt().ceil() as usize;
    let mut acc = 0.0;
    for i in 0..side {
        for j in 0..side {
            let u1 = (i as f64 + rng.unit()) / side as f64;
            let u2 = (j as f64 + rng.unit()) / side as f64;
            let z = (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
            acc += sigma2 * z * z;
        }
    }
    acc / (side * side) as f64
}

/// MSE of averaging `k` independent readings, each with Gaussian noise and
/// quantization error.
pub fn mc_mse(sigma2: f64, w: f64, bits: u32, k: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = TestRng::new(seed);
    (mc_noise_variance(sigma2, samples, &mut rng) + mc_quantization_variance(w, bits, samples, &mut rng)) / k as f64
}

// ---------------------------------------------------------------------------
// Visits by sampling the trajectory in time.

/// Closest sampled approach of the trajectory to each node, sampling every
/// `dt` seconds plus every vertex time.
pub fn sampled_min_distance(scenario: &Scenario, traj: &Trajectory, dt: f64) -> Vec<f64> {
    let t_end = traj.vertices.last().unwrap().time;
    let steps = (t_end / dt).ceil() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|i| (i as f64 * dt).min(t_end)).collect();
    times.extend(traj.vertices.iter().map(|v| v.time));
    let samples: Vec<Point2D> = times.iter().map(|&t| traj.position_at(t)).collect();
    scenario
        .nodes
        .iter()
        .map(|n| {
            samples
                .iter()
                .map(|&p| distance(p, n.position))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Random instances.

pub fn random_scenario(rng: &mut TestRng, n: usize, half: f64, r_lo: f64, r_hi: f64, slack: f64) -> Scenario {
    let start = Point2D::new(-half, -half);
    let end = Point2D::new(half, half);
    let nodes = (1..=n)
        .map(|id| SensorNode::new(id, rng.point(half), rng.range(r_lo, r_hi)))
        .collect();
    let v_max = 10.0;
    let horizon = distance(start, end) * slack / v_max;
    Scenario::new(nodes, start, end, v_max, horizon).unwrap()
}

/// Random polyline from the scenario start to its end through `inner`
/// random points, scaled in time to fit the budget if possible.
pub fn random_polyline(rng: &mut TestRng, scenario: &Scenario, inner: usize, half: f64) -> Vec<Point2D> {
    let mut pts = vec![scenario.start];
    pts.extend((0..inner).map(|_| rng.point(half)));
    pts.push(scenario.end);
    pts
}
