//! Grids and derivative-free one-dimensional maximization.
//!
//! Every supremum in the crate is computed the same way: a coarse pass over a
//! grid picks the best node, then golden-section search refines inside the
//! two neighbouring cells. For unimodal objectives the bracket provably
//! contains the maximizer; otherwise the grid density governs accuracy.

use crate::error::Result;

/// 1/phi, the golden-section contraction factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a grid-plus-refinement maximization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// The best coarse node was the first grid node.
    pub at_first: bool,
    /// The best coarse node was the last grid node.
    pub at_last: bool,
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `n` geometrically spaced points on `[lo, hi]`, both ends included.
/// Requires `0 < lo < hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

/// `n` equally spaced points on `[lo, hi]`, both ends included.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(hi > lo && n >= 2);
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    g[n - 1] = hi;
    g
}

/// Grid on `[lo, hi]` that resolves many decades of distance from `lo`:
/// `lo` itself followed by `lo + d` for `d` geometric from `(hi - lo) * 1e-9`
/// to `hi - lo`. Log-spaced in `p` when `lo` is small relative to `hi`, and
/// well defined for `lo <= 0`.
pub fn offset_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(hi > lo && n >= 3);
    let span = hi - lo;
    let mut g = Vec::with_capacity(n);
    g.push(lo);
    for d in log_grid(span * 1e-9, span, n - 1) {
        g.push(lo + d);
    }
    g[n - 1] = hi;
    g.dedup();
    g
}

/// Scan grid for a domain `[lo, hi]` whose upper end may be `+inf`
/// (truncated at `p_max`): log-spaced for the infinite case when `lo > 0`,
/// offset-spaced when `lo <= 0`, linear on finite domains.
pub fn scan_grid(lo: f64, hi: f64, p_max: f64, n: usize) -> Vec<f64> {
    if hi.is_finite() {
        linear_grid(lo, hi, n)
    } else {
        let top = p_max.max(lo + 1.0);
        if lo > 0.0 {
            log_grid(lo, top, n)
        } else {
            offset_grid(lo, top, n)
        }
    }
}

/// Grid on `[lo, b)` for a finite right end `b` that is excluded: an offset
/// grid on `[lo, b - (b - lo) 2^-k_max]` merged with the geometric approach
/// `b - (b - lo) 2^-k`, `k = 1..=k_max`.
pub fn approach_grid(lo: f64, b: f64, n: usize, k_max: i32) -> Vec<f64> {
    let span = b - lo;
    let last = b - span * 2f64.powi(-k_max);
    let mut g = offset_grid(lo, last, n);
    g.extend((1..=k_max).map(|k| b - span * 2f64.powi(-k)));
    g.retain(|&x| x < b);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn golden_max<F>(f: &F, mut a: f64, mut b: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if !(b > a) {
        return Ok((a, clean(f(a)?)));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = clean(f(c)?);
    let mut fd = clean(f(d)?);
    for _ in 0..max_iter {
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if b - a <= 4.0 * f64::EPSILON * scale {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = clean(f(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = clean(f(d)?);
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Coarse pass over `grid` followed by golden-section refinement between the
/// neighbours of the best node. The returned value is never below the best
/// grid value.
pub fn maximize_on_grid<F>(f: &F, grid: &[f64], max_iter: usize) -> Result<Maximum>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    debug_assert!(!grid.is_empty());
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = clean(f(x)?);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let mut out = Maximum {
        arg: grid[best],
        value: best_v,
        at_first: best == 0,
        at_last: best + 1 == grid.len(),
    };
    if grid.len() < 2 || best_v == f64::NEG_INFINITY {
        return Ok(out);
    }
    let l = grid[best.saturating_sub(1)];
    let r = grid[(best + 1).min(grid.len() - 1)];
    let (x, v) = golden_max(f, l, r, max_iter)?;
    if v > out.value {
        out.arg = x;
        out.value = v;
    }
    Ok(out)
}
