//! Young-Fenchel (Legendre) transform `g*(q) = sup_p (p |q| - g(p))`,
//! biconjugation and convexity diagnostics.
//!
//! The supremum is taken over the domain of `g`: a coarse pass over a grid
//! (log-spaced on unbounded domains, truncated at `P_max`) followed by
//! golden-section refinement around the best node. When `g` is convex the
//! objective is concave and the refinement converges to the true maximizer.

use std::path::Path;

use rayon::prelude::*;

use crate::csvio::Table;
use crate::error::{Error, Result};
use crate::optimize::{approach_grid, linear_grid, maximize_on_grid, offset_grid, scan_grid};
use crate::scalar_fn::{Convexity, Interpolation, ScalarFunction};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreOptions {
    /// Nodes of the coarse pass.
    pub grid_points: usize,
    /// Golden-section iteration cap.
    pub max_iter: usize,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        LegendreOptions {
            grid_points: 512,
            max_iter: 200,
        }
    }
}

/// Value of the transform together with the maximizing `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreValue {
    pub value: f64,
    /// Maximizing `p` (`+inf` when the supremum diverges).
    pub argmax: f64,
}

/// `sup_p (p |q| - g(p))` over the domain of `g`.
pub fn legendre(g: &ScalarFunction, q: f64) -> Result<f64> {
    legendre_with(g, q, LegendreOptions::default()).map(|v| v.value)
}

/// Growth certificate: does `p q - c p^e` (leading term of `g`) diverge?
fn diverges(exponent: f64, coeff: f64, q: f64) -> bool {
    if coeff < 0.0 && exponent > 0.0 {
        return true;
    }
    q > 0.0 && (exponent < 1.0 || (exponent == 1.0 && coeff < q))
}

pub fn legendre_with(g: &ScalarFunction, q: f64, opts: LegendreOptions) -> Result<LegendreValue> {
    if q.is_nan() {
        return Err(Error::InvalidInput("legendre at NaN".into()));
    }
    let q = q.abs();
    if let Some(inner) = g.inverse_source() {
        return legendre_of_inverse(inner, q, opts);
    }
    if let Some((e, c)) = g.growth() {
        if diverges(e, c, q) {
            return Ok(LegendreValue {
                value: f64::INFINITY,
                argmax: f64::INFINITY,
            });
        }
    }
    let (lo, hi) = g.domain();
    let objective = |p: f64| -> Result<f64> { Ok(p * q - g.evaluate(p)?) };

    if let Some(t) = g.tabulation() {
        if t.rule() == Interpolation::Linear {
            // linear minus piecewise linear: the supremum sits on a knot
            let (mut best_p, mut best) = (t.xs()[0], f64::NEG_INFINITY);
            for (&p, &y) in t.xs().iter().zip(t.ys()) {
                let v = p * q - y;
                if v > best {
                    best = v;
                    best_p = p;
                }
            }
            return Ok(LegendreValue {
                value: best,
                argmax: best_p,
            });
        }
        let mut grid = t.xs().to_vec();
        grid.extend(offset_grid(lo, hi, opts.grid_points));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let m = maximize_on_grid(&objective, &grid, opts.max_iter)?;
        return Ok(LegendreValue {
            value: m.value,
            argmax: m.arg,
        });
    }

    let grid = if hi.is_finite() {
        offset_grid(lo, hi, opts.grid_points)
    } else {
        scan_grid(lo, hi, g.p_max(), opts.grid_points)
    };
    let m = maximize_on_grid(&objective, &grid, opts.max_iter)?;
    if !hi.is_finite() && m.at_last {
        return Err(Error::TruncationUncertain {
            lower_bound: m.value,
        });
    }
    Ok(LegendreValue {
        value: m.value,
        argmax: m.arg,
    })
}

/// Transform of `nu = h^(-1)` for increasing `h`, parametrized by the
/// preimage: with `z = h(p)`, `sup_z (z q - nu(z)) = sup_p (h(p) q - p)`.
fn legendre_of_inverse(h: &ScalarFunction, q: f64, opts: LegendreOptions) -> Result<LegendreValue> {
    let (lo, hi) = h.domain();
    let objective = |p: f64| -> Result<f64> { Ok(h.evaluate(p)? * q - p) };
    let grid = if hi.is_finite() {
        approach_grid(lo, hi, opts.grid_points, 40)
    } else {
        scan_grid(lo, hi, h.p_max(), opts.grid_points)
    };
    let m = maximize_on_grid(&objective, &grid, opts.max_iter)?;
    if !hi.is_finite() && m.at_last {
        return Err(Error::TruncationUncertain {
            lower_bound: m.value,
        });
    }
    Ok(LegendreValue {
        value: m.value,
        argmax: h.evaluate(m.arg)?,
    })
}

/// `g*` as a function on `[0, inf)` (the transform is even in `q`).
pub fn conjugate_function(g: &ScalarFunction) -> Result<ScalarFunction> {
    let base = g.clone();
    let f = ScalarFunction::derived("legendre transform", 0.0, f64::INFINITY, move |q| {
        legendre(&base, q)
    })?
    .with_convexity(Convexity::Convex)
    .with_p_max(g.p_max());
    Ok(f)
}

/// Tabulated transform over a grid of `q` values.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateResult {
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax_trace: Vec<f64>,
}

impl ConjugateResult {
    /// Largest violation of convexity of the piecewise-linear interpolant
    /// through the finite values, relative to the value scale.
    pub fn convexity_violation(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .q_grid
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_finite())
            .map(|(q, v)| (*q, *v))
            .collect();
        let scale = pts.iter().fold(1.0f64, |m, (_, v)| m.max(v.abs()));
        let mut worst = 0.0f64;
        for w in pts.windows(3) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let (x2, y2) = w[2];
            // value at the middle knot above the chord
            let chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0);
            worst = worst.max(y1 - chord);
        }
        worst / scale
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["q", "value", "argmax"]);
        t.rows = (0..self.q_grid.len())
            .map(|i| vec![self.q_grid[i], self.values[i], self.argmax_trace[i]])
            .collect();
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_table().write(path)
    }
}

/// Evaluates the transform on every `q` of the grid (in parallel).
/// Divergent points carry `+inf`.
pub fn conjugate_table(g: &ScalarFunction, q_grid: &[f64]) -> Result<ConjugateResult> {
    let vals = q_grid
        .par_iter()
        .map(|&q| legendre_with(g, q, LegendreOptions::default()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugateResult {
        q_grid: q_grid.to_vec(),
        values: vals.iter().map(|v| v.value).collect(),
        argmax_trace: vals.iter().map(|v| v.argmax).collect(),
    })
}

/// `g**` tabulated on `p_grid`: the closed convex envelope of `g`, equal to
/// `g` itself when `g` is convex and closed.
pub fn biconjugate(g: &ScalarFunction, p_grid: &[f64]) -> Result<ScalarFunction> {
    let gstar = conjugate_function(g)?;
    let values = p_grid
        .par_iter()
        .map(|&p| legendre(&gstar, p))
        .collect::<Result<Vec<f64>>>()?;
    ScalarFunction::tabulated(p_grid.to_vec(), values, Interpolation::Linear)
}

/// Midpoint-convexity defect on an equally spaced grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defect {
    /// `max g(x_i) - (g(x_{i-k}) + g(x_{i+k})) / 2` over all symmetric triples.
    pub value: f64,
    /// Largest finite `|g|` on the grid.
    pub scale: f64,
}

impl Defect {
    pub fn relative(&self) -> f64 {
        self.value / self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Defect over the `n`-point equally spaced grid on `[lo, P_max or hi]`.
pub fn convexity_defect(g: &ScalarFunction, n: usize) -> Result<f64> {
    let (lo, _) = g.domain();
    convexity_defect_on(g, lo, g.scan_hi(), n).map(|d| d.value)
}

pub fn convexity_defect_on(g: &ScalarFunction, lo: f64, hi: f64, n: usize) -> Result<Defect> {
    if n < 3 {
        return Err(Error::InvalidInput("convexity defect needs n >= 3".into()));
    }
    let values = linear_grid(lo, hi, n)
        .into_iter()
        .map(|x| g.evaluate(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(defect_of_values(&values))
}

/// Defect of equally spaced samples; triples with non-finite members are
/// skipped.
pub fn defect_of_values(values: &[f64]) -> Defect {
    let n = values.len();
    let scale = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = f64::NEG_INFINITY;
    for i in 1..n.saturating_sub(1) {
        let mid = values[i];
        if !mid.is_finite() {
            continue;
        }
        for k in 1..=i.min(n - 1 - i) {
            let (a, b) = (values[i - k], values[i + k]);
            if a.is_finite() && b.is_finite() {
                worst = worst.max(mid - 0.5 * (a + b));
            }
        }
    }
    Defect {
        value: if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        },
        scale,
    }
}
