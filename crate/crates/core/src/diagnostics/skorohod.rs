//! J1 distance between recorded paths read as right-continuous step functions.
//!
//! For a threshold `D`, a time change with `‖λ - id‖ ≤ D` and
//! `‖x∘λ - y‖ ≤ D` exists iff a monotone path joins `(0,0)` to `(T,T)` in the
//! free space `{(t, s): |s - t| ≤ D, |x(s) - y(t)| ≤ D}`. That set is a grid of
//! convex cells, so reachability propagates cell by cell. The distance is the
//! smallest feasible threshold among the critical values `|x_j - y_k|` and
//! `|a_j - b_k|`, found by bisection.

use crate::error::{Error, Result};
use crate::spectral::{PathRecord, SpectralField};

fn dist(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

struct Steps<'a> {
    /// Interval `j` is `[edges[j], edges[j+1]]`.
    edges: Vec<f64>,
    values: &'a [SpectralField],
}

impl<'a> Steps<'a> {
    fn new(p: &'a PathRecord, horizon: f64) -> Self {
        let mut edges = p.times.clone();
        edges.push(horizon);
        Self { edges, values: &p.states }
    }
    fn len(&self) -> usize {
        self.values.len()
    }
}

type Interval = Option<(f64, f64)>;

fn nonempty(lo: f64, hi: f64) -> Interval {
    (lo <= hi).then_some((lo, hi))
}

/// Free-space reachability for threshold `d`.
fn feasible(x: &Steps<'_>, y: &Steps<'_>, cost: &[Vec<f64>], d: f64) -> bool {
    let (ny, nx) = (y.len(), x.len());
    // left[j]: reachable s on t = b_k; corner[j]: (b_k, a_j) reachable.
    let mut left: Vec<Interval> = vec![None; nx];
    let mut corner = vec![false; nx + 1];
    corner[0] = true;
    for (k, row) in cost.iter().enumerate() {
        let (t0, t1) = (y.edges[k], y.edges[k + 1]);
        let mut next_left: Vec<Interval> = vec![None; nx];
        let mut next_corner = vec![false; nx + 1];
        let mut next_bottom: Interval = None;
        for j in 0..nx {
            let (s0, s1) = (x.edges[j], x.edges[j + 1]);
            let entry_b = next_bottom.take();
            let entry_l = left[j];
            let entry_c = corner[j];
            if row[j] > d || (entry_b.is_none() && entry_l.is_none() && !entry_c) {
                next_bottom = None;
                continue;
            }
            let min_s = if entry_b.is_some() || entry_c { Some(s0) } else { entry_l.map(|(lo, _)| lo) };
            let min_t = if entry_l.is_some() || entry_c { Some(t0) } else { entry_b.map(|(lo, _)| lo) };
            let right = min_s.and_then(|m| nonempty(m.max(s0).max(t1 - d), s1.min(t1 + d)));
            let top = min_t.and_then(|m| nonempty(m.max(t0).max(s1 - d), t1.min(s1 + d)));
            if let Some((lo, hi)) = right {
                next_left[j] = Some((lo, hi));
                if hi >= s1 && (t1 - s1).abs() <= d {
                    next_corner[j + 1] = true;
                }
            }
            next_bottom = top;
            if k + 1 == ny && j + 1 == nx {
                return right.is_some_and(|(_, hi)| hi >= s1);
            }
        }
        left = next_left;
        corner = next_corner;
    }
    false
}

/// Sup over `[0, T]` of `|x(t) - y(t)|` for the step interpolations.
pub fn uniform_distance(x: &PathRecord, y: &PathRecord) -> f64 {
    let mut times: Vec<f64> = x.times.iter().chain(&y.times).copied().collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.iter().map(|&t| dist(x.state_at(t), y.state_at(t))).fold(0.0, f64::max)
}

/// Skorohod J1 distance between two paths on a common horizon, using the
/// coefficient `ℓ²` norm. `budget` caps the bisection steps; with fewer steps
/// than needed the result is the smallest threshold verified feasible, still an
/// upper bound. Never exceeds [`uniform_distance`].
pub fn skorohod_distance(x: &PathRecord, y: &PathRecord, budget: usize) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::GridMismatch("empty path".into()));
    }
    if x.times[0] != y.times[0] || (x.horizon() - y.horizon()).abs() > 1e-12 * x.horizon().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "horizons differ: [{}, {}] and [{}, {}]",
            x.times[0],
            x.horizon(),
            y.times[0],
            y.horizon()
        )));
    }
    let horizon = x.horizon().max(y.horizon());
    let uniform = uniform_distance(x, y);
    if uniform == 0.0 {
        return Ok(0.0);
    }
    let ord = |a: &PathRecord, b: &PathRecord| -> f64 {
        let (xs, ys) = (Steps::new(a, horizon), Steps::new(b, horizon));
        let cost: Vec<Vec<f64>> = ys.values.iter().map(|yv| xs.values.iter().map(|xv| dist(xv, yv)).collect()).collect();
        let mut cand: Vec<f64> = cost.iter().flatten().copied().filter(|c| *c < uniform).collect();
        for a in &xs.edges {
            for b in &ys.edges {
                let c = (a - b).abs();
                if c < uniform {
                    cand.push(c);
                }
            }
        }
        cand.push(uniform);
        cand.sort_by(f64::total_cmp);
        cand.dedup();
        let (mut lo, mut hi) = (0usize, cand.len() - 1);
        let mut steps = 0;
        while lo < hi && steps < budget {
            let mid = (lo + hi) / 2;
            if feasible(&xs, &ys, &cost, cand[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
            steps += 1;
        }
        cand[hi]
    };
    Ok(ord(x, y).min(ord(y, x)).min(uniform))
}
