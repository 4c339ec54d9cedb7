//! Open-path TSP with both endpoints fixed.
//!
//! Sites are ordered by a nearest-neighbour construction from the start,
//! then improved with first-improvement 2-opt. The start and end stay
//! pinned: only the interior of the path is ever reversed.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{distance, Point2D, TOL_GEO};

#[derive(Clone, Debug, PartialEq)]
pub struct TourInstance {
    pub start: Point2D,
    pub end: Point2D,
    pub sites: Vec<(usize, Point2D)>,
}

impl TourInstance {
    pub fn new(start: Point2D, end: Point2D, sites: Vec<(usize, Point2D)>) -> Self {
        Self { start, end, sites }
    }

    fn position_of(&self, id: usize) -> Option<Point2D> {
        self.sites.iter().find(|(i, _)| *i == id).map(|(_, p)| *p)
    }
}

/// Length of start -> sites in `order` -> end.
pub fn path_length(instance: &TourInstance, order: &[usize]) -> Result<f64> {
    let mut seen = HashSet::with_capacity(order.len());
    let mut prev = instance.start;
    let mut total = 0.0;
    for &id in order {
        if !seen.insert(id) {
            return Err(Error::DuplicateSite(id));
        }
        let p = instance.position_of(id).ok_or(Error::UnknownSite(id))?;
        total += distance(prev, p);
        prev = p;
    }
    Ok(total + distance(prev, instance.end))
}

/// Visiting order over all sites; deterministic for a given input.
pub fn order_sites(instance: &TourInstance) -> Vec<usize> {
    let initial = nearest_neighbor(instance);
    let mut path: Vec<Point2D> = Vec::with_capacity(initial.len() + 2);
    path.push(instance.start);
    path.extend(initial.iter().map(|&i| instance.sites[i].1));
    path.push(instance.end);

    let mut idx = initial;
    improve(&mut path, &mut idx);
    idx.into_iter().map(|i| instance.sites[i].0).collect()
}

/// Indices into `instance.sites`, greedily nearest first. Ties go to the
/// lower id.
fn nearest_neighbor(instance: &TourInstance) -> Vec<usize> {
    let n = instance.sites.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut here = instance.start;
    for _ in 0..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, &(id, p)) in instance.sites.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = distance(here, p);
            let better = match best {
                None => true,
                Some((bd, bid, _)) => d < bd || (d == bd && id < bid),
            };
            if better {
                best = Some((d, id, i));
            }
        }
        let (_, _, i) = best.expect("an unused site remains");
        used[i] = true;
        order.push(i);
        here = instance.sites[i].1;
    }
    order
}

/// `path` holds start, the sites, then end; `idx` mirrors the interior.
/// Alternates 2-opt and Or-opt until neither finds an improvement.
fn improve(path: &mut [Point2D], idx: &mut [usize]) {
    loop {
        two_opt(path, idx);
        if !or_opt(path, idx) {
            break;
        }
    }
}

/// Edges `(i, i+1)` and `(j, j+1)` are exchanged by reversing `path[i+1..=j]`.
fn two_opt(path: &mut [Point2D], idx: &mut [usize]) {
    let last = path.len() - 1;
    'restart: loop {
        for i in 0..last {
            for j in (i + 2)..last {
                let gain = distance(path[i], path[i + 1]) + distance(path[j], path[j + 1])
                    - distance(path[i], path[j])
                    - distance(path[i + 1], path[j + 1]);
                if gain > TOL_GEO {
                    path[i + 1..=j].reverse();
                    idx[i..j].reverse();
                    continue 'restart;
                }
            }
        }
        break;
    }
}

/// Applies the first improving move of a run of up to three consecutive
/// sites to another edge, in either orientation. Returns whether a move was
/// made.
fn or_opt(path: &mut [Point2D], idx: &mut [usize]) -> bool {
    let last = path.len() - 1;
    let interior = last.saturating_sub(1);
    for len in 1..=OR_OPT_MAX.min(interior) {
        for s in 1..=interior + 1 - len {
            let e = s + len - 1;
            let removed =
                distance(path[s - 1], path[s]) + distance(path[e], path[e + 1]) - distance(path[s - 1], path[e + 1]);
            for p in 0..last {
                if p + 1 >= s && p <= e {
                    continue;
                }
                let base = distance(path[p], path[p + 1]);
                let forward = distance(path[p], path[s]) + distance(path[e], path[p + 1]) - base;
                let backward = distance(path[p], path[e]) + distance(path[s], path[p + 1]) - base;
                let (cost, reversed) = if backward < forward {
                    (backward, true)
                } else {
                    (forward, false)
                };
                if removed - cost > TOL_GEO {
                    move_run(path, 0, s, e, p, reversed);
                    move_run(idx, 1, s, e, p, reversed);
                    return true;
                }
            }
        }
    }
    false
}

const OR_OPT_MAX: usize = 3;

/// Moves path positions `s..=e` so that they follow path position `p`
/// (`p` outside `s-1..=e`). `v[k]` holds path position `k + off`.
fn move_run<T: Copy>(v: &mut [T], off: usize, s: usize, e: usize, p: usize, reversed: bool) {
    let mut w = v.to_vec();
    let mut run: Vec<T> = w.drain(s - off..=e - off).collect();
    if reversed {
        run.reverse();
    }
    let at = if p < s { p + 1 } else { p + 1 - run.len() } - off;
    w.splice(at..at, run);
    v.copy_from_slice(&w);
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn collinear() -> TourInstance {
        TourInstance::new(
            Point2D::ORIGIN,
            Point2D::new(10.0, 0.0),
            vec![
                (1, Point2D::new(2.0, 0.0)),
                (2, Point2D::new(7.0, 0.0)),
                (3, Point2D::new(4.0, 0.0)),
            ],
        )
    }

    #[test]
    fn empty_and_single() {
        let mut inst = TourInstance::new(Point2D::ORIGIN, Point2D::new(1.0, 0.0), vec![]);
        assert!(order_sites(&inst).is_empty());
        assert_eq!(path_length(&inst, &[]).unwrap(), 1.0);
        inst.sites.push((9, Point2D::new(0.0, 5.0)));
        assert_eq!(order_sites(&inst), vec![9]);
    }

    #[test]
    fn collinear_sites_follow_the_line() {
        let inst = collinear();
        assert_eq!(order_sites(&inst), vec![1, 3, 2]);
        assert_eq!(path_length(&inst, &[1, 3, 2]).unwrap(), 10.0);
        assert_eq!(path_length(&inst, &[2, 3, 1]).unwrap(), 20.0);
    }

    #[test]
    fn path_length_rejects_bad_orders() {
        let inst = collinear();
        assert!(matches!(path_length(&inst, &[1, 1, 2]), Err(Error::DuplicateSite(1))));
        assert!(matches!(path_length(&inst, &[4]), Err(Error::UnknownSite(4))));
    }

    #[test]
    fn square_walk() {
        let inst = TourInstance::new(
            Point2D::ORIGIN,
            Point2D::new(0.0, 1.0),
            vec![
                (1, Point2D::new(1.0, 0.0)),
                (2, Point2D::new(2.0, 0.0)),
                (3, Point2D::new(2.0, 1.0)),
                (4, Point2D::new(1.0, 1.0)),
            ],
        );
        let order = order_sites(&inst);
        assert_eq!(order, vec![1, 2, 3, 4]);
        assert!((path_length(&inst, &order).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn two_opt_removes_crossing() {
        let mut path = vec![
            Point2D::ORIGIN,
            Point2D::new(1.0, 1.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(2.0, 1.0),
            Point2D::new(2.0, 0.0),
            Point2D::new(3.0, 0.0),
        ];
        let mut idx = vec![0, 1, 2, 3];
        two_opt(&mut path, &mut idx);
        assert_eq!(path[0], Point2D::ORIGIN);
        assert_eq!(path[5], Point2D::new(3.0, 0.0));
        let len: f64 = path.windows(2).map(|w| distance(w[0], w[1])).sum();
        assert!((len - 5.0).abs() < 1e-9, "{len}");
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn ties_prefer_lower_id() {
        let inst = TourInstance::new(
            Point2D::ORIGIN,
            Point2D::ORIGIN,
            vec![(5, Point2D::new(0.0, 1.0)), (2, Point2D::new(1.0, 0.0))],
        );
        assert_eq!(nearest_neighbor(&inst), vec![1, 0]);
    }

    #[test]
    fn move_run_both_directions() {
        let mut v = vec![0, 1, 2, 3, 4, 5, 6];
        move_run(&mut v, 0, 1, 2, 4, false);
        assert_eq!(v, vec![0, 3, 4, 1, 2, 5, 6]);
        let mut v = vec![0, 1, 2, 3, 4, 5, 6];
        move_run(&mut v, 0, 4, 5, 1, true);
        assert_eq!(v, vec![0, 1, 5, 4, 2, 3, 6]);
        // Offset storage: w[k] is position k + 1.
        let mut w = vec![1, 2, 3, 4, 5];
        move_run(&mut w, 1, 5, 5, 0, false);
        assert_eq!(w, vec![5, 1, 2, 3, 4]);
    }

    #[test]
    fn stray_site_is_visited_last() {
        let inst = TourInstance::new(
            Point2D::ORIGIN,
            Point2D::new(10.0, 0.0),
            vec![
                (1, Point2D::new(1.0, 0.0)),
                (2, Point2D::new(5.0, 0.0)),
                (9, Point2D::new(5.5, 3.0)),
                (3, Point2D::new(6.0, 0.0)),
            ],
        );
        let order = order_sites(&inst);
        let best = [1, 2, 3, 9]
            .into_iter()
            .permutations(4)
            .map(|o| path_length(&inst, &o).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(order, vec![1, 2, 3, 9]);
        assert!((path_length(&inst, &order).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn improvement_never_worsens_nearest_neighbor() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 100.0
        };
        for n in 0..12 {
            let sites: Vec<(usize, Point2D)> = (1..=n).map(|id| (id, Point2D::new(next(), next()))).collect();
            let inst = TourInstance::new(Point2D::new(next(), next()), Point2D::new(next(), next()), sites);
            let nn: Vec<usize> = nearest_neighbor(&inst).iter().map(|&i| inst.sites[i].0).collect();
            let order = order_sites(&inst);
            let mut sorted = order.clone();
            sorted.sort();
            assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
            assert!(path_length(&inst, &order).unwrap() <= path_length(&inst, &nn).unwrap() + 1e-12);
            assert_eq!(order, order_sites(&inst));
        }
    }
}
