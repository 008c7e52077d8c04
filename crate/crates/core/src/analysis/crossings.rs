//! Locating the corruption rates where two payoff curves meet.

use serde::{Deserialize, Serialize};

use super::optimize::golden_max;

/// Differences at or below this are treated as "equal" on the scan grid.
const ZERO_BAND: f64 = 1e-12;
/// A local minimum of `|f − g|` below this without a sign change is a tangency.
pub const TANGENT_THRESHOLD: f64 = 1e-9;
/// Bisection stops once the bracket is shorter than this.
const BISECTION_WIDTH: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub r_star: f64,
    pub value_a: f64,
    pub value_b: f64,
    /// The curves touch without changing order.
    pub tangent: bool,
}

/// Sign changes of `f − g` on `[0, 1]`, found on a uniform scan and refined by
/// bisection, plus tangential touches. Identical curves give an empty list.
pub fn find_crossings<F, G>(f: F, g: G, scan_points: usize) -> Vec<CrossingResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    find_crossings_on(f, g, 0.0, 1.0, scan_points)
}

pub fn find_crossings_on<F, G>(
    f: F,
    g: G,
    lo: f64,
    hi: f64,
    scan_points: usize,
) -> Vec<CrossingResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let n = scan_points.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
        .collect();
    let diff = |x: f64| f(x) - g(x);
    let ds: Vec<f64> = xs.iter().map(|&x| diff(x)).collect();
    let sign = |d: f64| {
        if d.abs() <= ZERO_BAND {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        }
    };
    let signs: Vec<i32> = ds.iter().map(|&d| sign(d)).collect();
    let record = |r: f64, tangent: bool| CrossingResult {
        r_star: r,
        value_a: f(r),
        value_b: g(r),
        tangent,
    };

    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        if signs[k] != 0 {
            if k + 1 < n && signs[k + 1] != 0 && signs[k + 1] != signs[k] {
                out.push(record(bisect(&diff, xs[k], xs[k + 1]), false));
            }
            k += 1;
            continue;
        }
        // run of grid points where the curves agree within the band
        let start = k;
        while k < n && signs[k] == 0 {
            k += 1;
        }
        let end = k - 1;
        let left = if start > 0 { signs[start - 1] } else { 0 };
        let right = if k < n { signs[k] } else { 0 };
        if left == 0 && right == 0 {
            continue;
        }
        let mid = 0.5 * (xs[start] + xs[end]);
        if start == end {
            // a single grid point: refine inside the neighbouring bracket
            let r = if left != 0 && right != 0 && left != right {
                bisect(&diff, xs[start - 1], xs[end + 1])
            } else {
                xs[start]
            };
            out.push(record(r, left != 0 && left == right));
        } else if left != 0 && right != 0 {
            out.push(record(mid, left == right));
        } else if start > 0 || k < n {
            // the curves agree up to a domain end; report where they separate
            let r = if left == 0 { xs[end] } else { xs[start] };
            out.push(record(r, false));
        }
    }

    // touches that never enter the zero band on the grid
    for k in 1..n - 1 {
        let (a, b, c) = (ds[k - 1].abs(), ds[k].abs(), ds[k + 1].abs());
        if !(b <= a && b <= c) || signs[k] == 0 {
            continue;
        }
        if signs[k - 1] != signs[k] || signs[k + 1] != signs[k] {
            continue;
        }
        let (r, neg_gap) = golden_max(|x| -diff(x).abs(), xs[k - 1], xs[k + 1], 1e-12);
        if -neg_gap < TANGENT_THRESHOLD && !out.iter().any(|c| (c.r_star - r).abs() < step) {
            out.push(record(r, true));
        }
    }
    out.sort_by(|a, b| a.r_star.total_cmp(&b.r_star));
    out
}

fn bisect<D: Fn(f64) -> f64>(diff: &D, mut a: f64, mut b: f64) -> f64 {
    let mut da = diff(a);
    if da == 0.0 {
        return a;
    }
    while (b - a) > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        let dm = diff(m);
        if dm == 0.0 {
            return m;
        }
        if (dm > 0.0) == (da > 0.0) {
            a = m;
            da = dm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
