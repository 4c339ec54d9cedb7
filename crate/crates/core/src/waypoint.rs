//! Shortest path from a start point to an end point that touches an ordered
//! chain of disks.
//!
//! The problem is convex. It is solved by block coordinate descent: each
//! waypoint in turn is moved to the exact minimizer of the distance to its
//! two neighbours over its own disk. Coordinate descent can stall where
//! waypoints bunch up inside overlapping disks (the objective is not
//! differentiable there), so the converged iterate is polished by a
//! smoothed interior-point method and then swept again.

use crate::geometry::{closest_point_on_segment, distance, point_segment_distance, Point2D};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Angular tolerance of the boundary search, in radians.
const ANGLE_TOL: f64 = 1e-10;
/// Samples used to bracket the boundary minimizer before golden-section.
const ARC_SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Point2D,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2D, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Closest point of the disk to `p`.
    pub fn project(&self, p: Point2D) -> Point2D {
        let d = p - self.center;
        let n = d.norm();
        if n <= self.radius {
            p
        } else {
            self.center + d * (self.radius / n)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskChainInstance {
    pub start: Point2D,
    pub end: Point2D,
    pub disks: Vec<Disk>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskChainSolution {
    pub waypoints: Vec<Point2D>,
    pub length: f64,
    /// Completed forward-backward sweeps.
    pub iterations: usize,
    pub converged: bool,
}

impl DiskChainInstance {
    pub fn new(start: Point2D, end: Point2D, disks: Vec<Disk>) -> Self {
        Self { start, end, disks }
    }

    /// Path length through `waypoints`, including the start and end legs.
    pub fn objective(&self, waypoints: &[Point2D]) -> f64 {
        let mut prev = self.start;
        let mut total = 0.0;
        for &p in waypoints {
            total += distance(prev, p);
            prev = p;
        }
        total + distance(prev, self.end)
    }

    fn neighbors(&self, q: &[Point2D], k: usize) -> (Point2D, Point2D) {
        let a = if k == 0 { self.start } else { q[k - 1] };
        let b = if k + 1 == q.len() { self.end } else { q[k + 1] };
        (a, b)
    }
}

fn pair_cost(q: Point2D, a: Point2D, b: Point2D) -> f64 {
    distance(q, a) + distance(q, b)
}

/// Minimizer of `|q - a| + |q - b|` over the closed disk.
///
/// When `[a, b]` meets the disk every point of the intersection is optimal;
/// the one nearest the center is returned.
pub fn single_disk_step(a: Point2D, b: Point2D, center: Point2D, radius: f64) -> Point2D {
    let disk = Disk::new(center, radius);
    if radius <= 0.0 {
        return center;
    }
    if a == b {
        return disk.project(a);
    }
    if point_segment_distance(center, a, b) <= radius {
        return closest_point_on_segment(center, a, b);
    }
    boundary_minimizer(a, b, center, radius)
}

/// The optimum lies on the arc between the directions of `a` and `b` as
/// seen from the center: outside it both distance terms grow.
fn boundary_minimizer(a: Point2D, b: Point2D, center: Point2D, radius: f64) -> Point2D {
    let angle_of = |p: Point2D| (p.y - center.y).atan2(p.x - center.x);
    let theta_a = angle_of(a);
    let mut sweep = angle_of(b) - theta_a;
    if sweep > std::f64::consts::PI {
        sweep -= std::f64::consts::TAU;
    } else if sweep < -std::f64::consts::PI {
        sweep += std::f64::consts::TAU;
    }
    let f = |t: f64| pair_cost(Point2D::from_polar(center, radius, theta_a + t * sweep), a, b);

    if sweep == 0.0 {
        return Point2D::from_polar(center, radius, theta_a);
    }

    // Bracket on a coarse grid, then golden-section inside the bracket.
    let mut best = 0;
    let mut best_val = f(0.0);
    for i in 1..=ARC_SAMPLES {
        let v = f(i as f64 / ARC_SAMPLES as f64);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    let step = 1.0 / ARC_SAMPLES as f64;
    let mut lo = (best as f64 - 1.0).max(0.0) * step;
    let mut hi = (best as f64 + 1.0).min(ARC_SAMPLES as f64) * step;

    let tol = ANGLE_TOL / sweep.abs();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    let t = if f(t) <= best_val { t } else { best as f64 * step };
    Point2D::from_polar(center, radius, theta_a + t * sweep)
}

/// Moves waypoint `k` to its exact conditional optimum, keeping the old
/// position if rounding would make it worse.
fn update(instance: &DiskChainInstance, q: &mut [Point2D], k: usize) {
    let (a, b) = instance.neighbors(q, k);
    let disk = instance.disks[k];
    let candidate = single_disk_step(a, b, disk.center, disk.radius);
    if pair_cost(candidate, a, b) <= pair_cost(q[k], a, b) {
        q[k] = candidate;
    }
}

fn double_sweep(instance: &DiskChainInstance, q: &mut [Point2D]) -> f64 {
    for k in 0..q.len() {
        update(instance, q, k);
    }
    for k in (0..q.len()).rev() {
        update(instance, q, k);
    }
    instance.objective(q)
}

/// Sweeps until a double sweep gains less than `tol` or `budget` sweeps are
/// used. Returns (objective, sweeps used, converged).
fn descend(instance: &DiskChainInstance, q: &mut [Point2D], tol: f64, budget: usize) -> (f64, usize, bool) {
    let mut obj = instance.objective(q);
    let mut used = 0;
    while used < budget {
        used += 1;
        let next = double_sweep(instance, q);
        let gain = obj - next;
        obj = next;
        if gain < tol {
            return (obj, used, true);
        }
    }
    (obj, used, false)
}

/// Interior-point polish for iterates where coordinate descent stalls.
///
/// Minimizes `sum sqrt(|q_{i+1} - q_i|^2 + eps^2) - mu * sum log(r_i^2 - |q_i - c_i|^2)`
/// by damped Newton steps, shrinking `eps` and `mu` together. The Hessian is
/// block tridiagonal with 2x2 blocks, so each step is linear in the chain
/// length. Disks of (near) zero radius pin their waypoint to the center and
/// split the chain into independent pieces.
mod barrier {
    use super::{Disk, Point2D};

    #[derive(Clone, Copy, Debug)]
    struct M2 {
        a: f64,
        b: f64,
        d: f64,
    }

    impl M2 {
        const ZERO: M2 = M2 { a: 0.0, b: 0.0, d: 0.0 };

        fn add(self, o: M2) -> M2 {
            M2 {
                a: self.a + o.a,
                b: self.b + o.b,
                d: self.d + o.d,
            }
        }

        fn scale(self, k: f64) -> M2 {
            M2 {
                a: self.a * k,
                b: self.b * k,
                d: self.d * k,
            }
        }

        fn det(self) -> f64 {
            self.a * self.d - self.b * self.b
        }
    }

    /// General (not necessarily symmetric) 2x2 matrix for the elimination.
    #[derive(Clone, Copy, Debug)]
    struct G2 {
        m: [[f64; 2]; 2],
    }

    impl G2 {
        fn from_sym(s: M2) -> G2 {
            G2 {
                m: [[s.a, s.b], [s.b, s.d]],
            }
        }

        fn inv(self) -> Option<G2> {
            let [[a, b], [c, d]] = self.m;
            let det = a * d - b * c;
            if !(det.abs() > 0.0) || !det.is_finite() {
                return None;
            }
            Some(G2 {
                m: [[d / det, -b / det], [-c / det, a / det]],
            })
        }

        fn mul(self, o: G2) -> G2 {
            let mut m = [[0.0; 2]; 2];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
                }
            }
            G2 { m }
        }

        fn sub(self, o: G2) -> G2 {
            let mut m = self.m;
            for (i, row) in m.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell -= o.m[i][j];
                }
            }
            G2 { m }
        }

        fn apply(self, v: Point2D) -> Point2D {
            Point2D::new(
                self.m[0][0] * v.x + self.m[0][1] * v.y,
                self.m[1][0] * v.x + self.m[1][1] * v.y,
            )
        }
    }

    struct Chain<'a> {
        a: Point2D,
        b: Point2D,
        disks: &'a [Disk],
    }

    fn smooth_len(d: Point2D, eps: f64) -> f64 {
        (d.norm_sq() + eps * eps).sqrt()
    }

    fn smooth_grad(d: Point2D, eps: f64) -> (Point2D, M2) {
        let s = smooth_len(d, eps);
        let g = d * (1.0 / s);
        let h = M2 {
            a: (1.0 - d.x * d.x / (s * s)) / s,
            b: (-d.x * d.y / (s * s)) / s,
            d: (1.0 - d.y * d.y / (s * s)) / s,
        };
        (g, h)
    }

    impl Chain<'_> {
        fn point(&self, q: &[Point2D], i: isize) -> Point2D {
            if i < 0 {
                self.a
            } else if i as usize >= q.len() {
                self.b
            } else {
                q[i as usize]
            }
        }

        /// Barrier objective, or infinity outside the open disks.
        fn value(&self, q: &[Point2D], eps: f64, mu: f64) -> f64 {
            let mut total = 0.0;
            for i in 0..=q.len() as isize {
                total += smooth_len(self.point(q, i) - self.point(q, i - 1), eps);
            }
            for (p, disk) in q.iter().zip(self.disks) {
                let g = disk.radius * disk.radius - (*p - disk.center).norm_sq();
                if !(g > 0.0) {
                    return f64::INFINITY;
                }
                total -= mu * g.ln();
            }
            total
        }

        /// Newton step by block tridiagonal elimination.
        fn newton_step(&self, q: &[Point2D], eps: f64, mu: f64) -> Option<(Vec<Point2D>, f64)> {
            let k = q.len();
            let mut diag = vec![M2::ZERO; k];
            let mut off = vec![M2::ZERO; k.saturating_sub(1)];
            let mut grad = vec![Point2D::ORIGIN; k];
            for i in 0..=k {
                let d = self.point(q, i as isize) - self.point(q, i as isize - 1);
                let (g, h) = smooth_grad(d, eps);
                // Edge i joins waypoint i-1 (if any) to waypoint i (if any).
                if i < k {
                    grad[i] = grad[i] + g;
                    diag[i] = diag[i].add(h);
                }
                if i >= 1 {
                    grad[i - 1] = grad[i - 1] - g;
                    diag[i - 1] = diag[i - 1].add(h);
                }
                if i >= 1 && i < k {
                    off[i - 1] = h.scale(-1.0);
                }
            }
            for (i, disk) in self.disks.iter().enumerate() {
                let v = q[i] - disk.center;
                let g = disk.radius * disk.radius - v.norm_sq();
                grad[i] = grad[i] + v * (2.0 * mu / g);
                let h = M2 {
                    a: 2.0 / g + 4.0 * v.x * v.x / (g * g),
                    b: 4.0 * v.x * v.y / (g * g),
                    d: 2.0 / g + 4.0 * v.y * v.y / (g * g),
                };
                diag[i] = diag[i].add(h.scale(mu));
            }
            if diag.iter().any(|m| !(m.det() > 0.0)) {
                return None;
            }

            // Forward elimination, then back substitution.
            let mut c_prime: Vec<G2> = Vec::with_capacity(k);
            let mut d_prime: Vec<Point2D> = Vec::with_capacity(k);
            for i in 0..k {
                let mut piv = G2::from_sym(diag[i]);
                let mut rhs = grad[i] * -1.0;
                if i > 0 {
                    let l = G2::from_sym(off[i - 1]);
                    piv = piv.sub(l.mul(c_prime[i - 1]));
                    rhs = rhs - l.apply(d_prime[i - 1]);
                }
                let inv = piv.inv()?;
                c_prime.push(if i + 1 < k {
                    inv.mul(G2::from_sym(off[i]))
                } else {
                    G2 { m: [[0.0; 2]; 2] }
                });
                d_prime.push(inv.apply(rhs));
            }
            let mut step = vec![Point2D::ORIGIN; k];
            for i in (0..k).rev() {
                step[i] = if i + 1 < k {
                    d_prime[i] - c_prime[i].apply(step[i + 1])
                } else {
                    d_prime[i]
                };
            }
            let decrement: f64 = step.iter().zip(&grad).map(|(s, g)| -s.dot(*g)).sum();
            step.iter().all(|s| s.is_finite()).then_some((step, decrement))
        }

        fn minimize(&self, q: &mut [Point2D], eps: f64, mu: f64) {
            let mut f = self.value(q, eps, mu);
            for _ in 0..100 {
                let Some((step, decrement)) = self.newton_step(q, eps, mu) else {
                    return;
                };
                if !(decrement > 1e-14 * (1.0 + f.abs())) {
                    return;
                }
                let mut t = 1.0;
                loop {
                    let trial: Vec<Point2D> = q.iter().zip(&step).map(|(p, s)| *p + *s * t).collect();
                    let ft = self.value(&trial, eps, mu);
                    if ft <= f - 0.25 * t * decrement {
                        q.copy_from_slice(&trial);
                        f = ft;
                        break;
                    }
                    t *= 0.5;
                    if t < 1e-12 {
                        return;
                    }
                }
            }
        }
    }

    /// Polished waypoints, starting from a feasible `q`.
    pub fn polish(start: Point2D, end: Point2D, disks: &[Disk], q: &[Point2D]) -> Vec<Point2D> {
        let mut out = q.to_vec();
        let scale = disks
            .iter()
            .map(|d| d.radius)
            .chain(std::iter::once((end - start).norm()))
            .fold(1e-3, f64::max);
        let pinned = |d: &Disk| d.radius <= 1e-9 * scale;
        let mut lo = 0;
        while lo < disks.len() {
            if pinned(&disks[lo]) {
                out[lo] = disks[lo].center;
                lo += 1;
                continue;
            }
            let mut hi = lo;
            while hi < disks.len() && !pinned(&disks[hi]) {
                hi += 1;
            }
            let a = if lo == 0 { start } else { disks[lo - 1].center };
            let b = if hi == disks.len() { end } else { disks[hi].center };
            let chain = Chain {
                a,
                b,
                disks: &disks[lo..hi],
            };
            let seg = &mut out[lo..hi];
            for (p, d) in seg.iter_mut().zip(chain.disks) {
                *p = d.center + (*p - d.center) * 0.5;
            }
            let mut eps = 1e-2 * scale;
            let mut mu = 1e-2 * scale;
            while eps > 1e-11 * scale {
                chain.minimize(seg, eps, mu);
                eps *= 0.1;
                mu *= 0.1;
            }
            lo = hi;
        }
        // Barrier iterates are strictly inside; keep them there.
        for (p, d) in out.iter_mut().zip(disks) {
            *p = d.project(*p);
        }
        out
    }
}

/// Optimal waypoints for a fixed visiting order.
pub fn solve_disk_chain(instance: &DiskChainInstance, tol: f64, max_iters: usize) -> DiskChainSolution {
    let k = instance.disks.len();
    let mut q: Vec<Point2D> = instance.disks.iter().map(|d| d.center).collect();
    if k == 0 {
        return DiskChainSolution {
            length: instance.objective(&q),
            waypoints: q,
            iterations: 0,
            converged: true,
        };
    }

    let max_iters = max_iters.max(1);
    let (mut obj, mut iterations, mut converged) = descend(instance, &mut q, tol, max_iters);
    if converged && iterations < max_iters {
        let mut trial = barrier::polish(instance.start, instance.end, &instance.disks, &q);
        let (trial_obj, used, ok) = descend(instance, &mut trial, tol, max_iters - iterations);
        iterations += used;
        if trial_obj < obj {
            q = trial;
            obj = trial_obj;
            converged = ok;
        }
    }

    DiskChainSolution {
        waypoints: q,
        length: obj,
        iterations,
        converged,
    }
}
