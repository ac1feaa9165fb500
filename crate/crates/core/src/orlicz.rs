//! Young (Orlicz) functions: even, vanishing only at the origin, convex and
//! increasing on the right semi-axis.

use crate::conjugate::convexity_defect_on;
use crate::error::{Error, Result};
use crate::optimize::offset_grid;
use crate::scalar_fn::{Convexity, Monotonicity, ScalarFunction, DEFAULT_TOL};

/// Points of the validation scans.
const VALIDATION_POINTS: usize = 257;
/// Points of each nested window of the convexity scan.
const WINDOW_POINTS: usize = 65;
/// Convexity tolerance relative to the largest value on the scan.
pub const CONVEXITY_TOL: f64 = 1e-8;
/// Absolute slack for rounding in the convexity scans.
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

/// A Young function stored through its right branch on `[0, inf)`;
/// `N(-u) = N(u)`.
#[derive(Clone, Debug)]
pub struct OrliczFunction {
    right: ScalarFunction,
}

impl OrliczFunction {
    /// Wraps and validates a right branch defined on `[0, inf)`.
    pub fn new(right: ScalarFunction) -> Result<Self> {
        let n = Self::new_unchecked(right)?;
        n.validate()?;
        Ok(n)
    }

    /// Wraps without the validation scans (the caller has verified them).
    pub fn new_unchecked(right: ScalarFunction) -> Result<Self> {
        let (lo, hi) = right.domain();
        if lo != 0.0 || hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "a Young function's right branch must live on [0, inf), got [{lo}, {hi}]"
            )));
        }
        Ok(OrliczFunction {
            right: right
                .with_monotonicity(Monotonicity::Increasing)
                .with_convexity(Convexity::Convex),
        })
    }

    /// Young function given by a closure on `u >= 0`.
    pub fn from_fn<F>(label: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self::new(ScalarFunction::derived(label, 0.0, f64::INFINITY, f)?)
    }

    /// `|u|^k`, `k >= 1`.
    pub fn power(k: f64) -> Result<Self> {
        Self::from_fn("power", move |u| Ok(u.powf(k)))
    }

    pub fn right_branch(&self) -> &ScalarFunction {
        &self.right
    }

    pub fn evaluate(&self, u: f64) -> Result<f64> {
        let u = u.abs();
        if u == 0.0 {
            return Ok(0.0);
        }
        self.right.evaluate(u)
    }

    /// `N^(-1)(z)` on the right branch.
    pub fn inverse(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::InvalidInput(format!(
                "a Young function takes only nonnegative values, cannot invert at {z}"
            )));
        }
        if z == 0.0 {
            return Ok(0.0);
        }
        self.right.invert_monotone(z, DEFAULT_TOL)
    }

    /// Central finite-difference derivative (one-sided at 0).
    pub fn derivative(&self, u: f64) -> Result<f64> {
        let u = u.abs();
        let h = 1e-6 * u.max(1e-3);
        if u <= h {
            return Ok((self.evaluate(h)? - self.evaluate(0.0)?) / h);
        }
        Ok((self.evaluate(u + h)? - self.evaluate(u - h)?) / (2.0 * h))
    }

    /// `u N'(u) / N(u)`.
    pub fn elasticity(&self, u: f64) -> Result<f64> {
        Ok(u * self.derivative(u)? / self.evaluate(u)?)
    }

    /// Upper end of the convexity scan: the first `u` (doubling from 1)
    /// where `N(u)` exceeds `1e12`, capped at `P_max`.
    fn scan_top(&self) -> Result<f64> {
        let mut u = 1.0;
        let cap = self.right.p_max();
        while u < cap && self.evaluate(u)? < 1e12 {
            u *= 2.0;
        }
        Ok(u.min(cap))
    }

    /// `N(0) = 0`, positivity, strict increase and convexity on scans.
    pub fn validate(&self) -> Result<()> {
        let n0 = self.right.evaluate(0.0)?;
        if n0.abs() > 1e-12 {
            return Err(Error::NonYoung {
                reason: format!("N(0) = {n0} is not 0"),
            });
        }
        let top = self.scan_top()?;
        let grid = offset_grid(0.0, self.right.p_max(), VALIDATION_POINTS);
        let mut prev = 0.0;
        for &u in &grid[1..] {
            let v = self.evaluate(u)?;
            if v.is_nan() || v <= prev && !(v.is_infinite() && prev.is_infinite()) {
                return Err(Error::NonYoung {
                    reason: format!("not strictly increasing near u = {u}"),
                });
            }
            prev = v;
        }
        // nested windows catch concavity near 0 that the full scale hides
        for k in (0..=30).step_by(3) {
            let hi = top * 2f64.powi(-k);
            let n = if k == 0 {
                VALIDATION_POINTS
            } else {
                WINDOW_POINTS
            };
            let d = convexity_defect_on(&self.right, 0.0, hi, n)?;
            // N is often a difference of unit-size terms, so values near 0
            // carry absolute rounding of a few ulps of 1
            let tol =
                CONVEXITY_TOL * if k == 0 { d.scale.max(1.0) } else { d.scale } + ROUNDING_FLOOR;
            if d.value > tol {
                return Err(Error::NonYoung {
                    reason: format!(
                        "convexity defect {:e} on [0, {hi:e}] exceeds {tol:e}",
                        d.value
                    ),
                });
            }
        }
        Ok(())
    }
}
