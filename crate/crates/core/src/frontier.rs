//! Pareto frontiers of two-user rate regions.
//!
//! A frontier stores the Pareto-dominant corner points of a region. The
//! region itself is the downward-closed convex hull of those points
//! (time sharing), which is what the containment and distance helpers use.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Tolerance used when discarding dominated points.
pub const PARETO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionFrontier {
    /// `(R1, R2)` in bits per channel use, ascending in `R1`.
    pub points: Vec<(f64, f64)>,
    /// Generation parameters (grid sizes, eta, spec digest, ...).
    pub meta: BTreeMap<String, String>,
}

impl RegionFrontier {
    /// Pareto-filter an arbitrary point cloud.
    ///
    /// Negative rates are clamped to zero first. The output does not depend
    /// on the input order.
    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            points: pareto_filter(points.into_iter().collect(), PARETO_TOL),
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point maximizing `R1 + R2` (first one on ties).
    pub fn max_sum_point(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .fold(None, |best: Option<(f64, f64)>, p| match best {
                Some(b) if b.0 + b.1 >= p.0 + p.1 => Some(b),
                _ => Some(p),
            })
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.max_sum_point().map_or(0.0, |p| p.0 + p.1)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|&(a, b)| (a * factor, b * factor)).collect(),
            meta: self.meta.clone(),
        }
    }

    /// Swap the user roles.
    pub fn mirrored(&self) -> Self {
        Self::from_points(self.points.iter().map(|&(a, b)| (b, a)))
    }

    /// Vertices of the upper concave envelope, including the axis
    /// projections `(0, max R2)` and `(max R1, 0)`.
    pub fn hull(&self) -> Vec<(f64, f64)> {
        if self.points.is_empty() {
            return vec![(0.0, 0.0)];
        }
        let max_r2 = self.points.iter().fold(0.0_f64, |m, p| m.max(p.1));
        let max_r1 = self.points.iter().fold(0.0_f64, |m, p| m.max(p.0));
        let mut pts = Vec::with_capacity(self.points.len() + 2);
        pts.push((0.0, max_r2));
        pts.extend(self.points.iter().copied());
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        // monotone chain, upper part
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            if let Some(last) = hull.last() {
                if p.0 == last.0 {
                    continue;
                }
            }
            while hull.len() >= 2 {
                let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        if let Some(&last) = hull.last() {
            if last.1 > 0.0 || last.0 < max_r1 {
                hull.push((max_r1, 0.0));
            }
        }
        hull
    }

    /// Largest `R2` in the time-sharing region at the given `R1`, or `None`
    /// when `r1` exceeds the largest achievable `R1`.
    pub fn max_r2_at(&self, r1: f64) -> Option<f64> {
        let hull = self.hull();
        envelope_at(&hull, r1)
    }

    /// Signed slack of `point` against the region: nonnegative when the
    /// point is inside. Measured as the vertical gap to the envelope, or the
    /// negative horizontal overshoot past the largest `R1`.
    pub fn slack(&self, point: (f64, f64)) -> f64 {
        let hull = self.hull();
        let max_r1 = hull.last().map_or(0.0, |p| p.0);
        if point.0 > max_r1 {
            return max_r1 - point.0;
        }
        let r1 = point.0.max(0.0);
        envelope_at(&hull, r1).unwrap_or(0.0) - point.1
    }

    pub fn contains(&self, point: (f64, f64), tol: f64) -> bool {
        self.slack(point) >= -tol
    }

    /// Worst slack of all of `other`'s points inside `self`.
    pub fn min_slack_over(&self, other: &RegionFrontier) -> f64 {
        other.points.iter().map(|&p| self.slack(p)).fold(f64::INFINITY, f64::min)
    }

    /// Symmetric Hausdorff distance between the two hull polylines.
    pub fn hausdorff(&self, other: &RegionFrontier) -> f64 {
        let (a, b) = (self.hull(), other.hull());
        directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a))
    }
}

fn envelope_at(hull: &[(f64, f64)], r1: f64) -> Option<f64> {
    let last = hull.last()?;
    if r1 > last.0 {
        return None;
    }
    if r1 <= hull[0].0 {
        return Some(hull[0].1);
    }
    for w in hull.windows(2) {
        let (p, q) = (w[0], w[1]);
        if r1 <= q.0 {
            let t = (r1 - p.0) / (q.0 - p.0);
            return Some(p.1 + t * (q.1 - p.1));
        }
    }
    Some(last.1)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

fn directed_hausdorff(from: &[(f64, f64)], to: &[(f64, f64)]) -> f64 {
    from.iter()
        .map(|&p| {
            if to.len() == 1 {
                return point_segment_distance(p, to[0], to[0]);
            }
            to.windows(2)
                .map(|w| point_segment_distance(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Keep points not dominated by any other point (within `tol`), sorted by
/// ascending `R1`. Exact duplicates collapse to one.
pub fn pareto_filter(mut points: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    for p in &mut points {
        p.0 = p.0.max(0.0);
        p.1 = p.1.max(0.0);
    }
    // descending R1, then descending R2
    points.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for p in points {
        if p.1 > best_r2 + tol {
            kept.push(p);
            best_r2 = p.1;
        }
    }
    kept.reverse();
    kept
}
