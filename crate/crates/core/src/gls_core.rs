//! Forward pipeline: from a generating function `psi` to the fundamental
//! function of its Grand Lebesgue Space, and to the Young function whose
//! Orlicz space has an equivalent fundamental function.
//!
//! ```text
//! phi(delta)  = sup_{a <= p < b} delta^(1/p) / psi(p)
//! nu          = inverse of p -> p / psi(p)
//! N(u)        = exp(nu*(u)) - exp(nu*(0))
//! theta(delta) = 1 / N^(-1)(1 / delta)
//! ```

use std::path::Path;

use rayon::prelude::*;

use crate::conjugate::legendre;
use crate::error::{Error, Result};
use crate::optimize::{approach_grid, log_grid, maximize_on_grid};
use crate::orlicz::OrliczFunction;
use crate::report::{ComparisonReport, ComparisonRow};
use crate::scalar_fn::{Interpolation, Monotonicity, ScalarFunction, MONOTONE_SCAN_POINTS};

/// Nodes of the coarse pass over `p`.
const P_GRID_POINTS: usize = 512;
/// Halvings of the distance to a finite right end `b`.
const APPROACH_STEPS: i32 = 50;
const GOLDEN_ITER: usize = 200;

/// A generating function `psi`, positive on its support `[a, b)`.
#[derive(Clone, Debug)]
pub struct GeneratingFunction {
    psi: ScalarFunction,
    a: f64,
    b: f64,
}

impl GeneratingFunction {
    /// Uses the domain of `psi` as support (the right end excluded).
    pub fn new(psi: ScalarFunction) -> Result<Self> {
        let (a, b) = psi.domain();
        Self::with_support(psi, a, b)
    }

    pub fn with_support(psi: ScalarFunction, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = psi.domain();
        if !(a > 0.0 && a < b && a >= lo && b <= hi) {
            return Err(Error::InvalidInput(format!(
                "support [{a}, {b}) must be a nonempty part of (0, inf) inside the domain [{lo}, {hi}] of psi"
            )));
        }
        let g = GeneratingFunction { psi, a, b };
        g.validate()?;
        Ok(g)
    }

    /// `p^(1/m)` on `[1, inf)`.
    pub fn power(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidInput(format!("power needs m > 0, got {m}")));
        }
        Self::new(ScalarFunction::power(m).on(1.0, f64::INFINITY)?)
    }

    /// `(b - p)^(-beta)` on `[1, b)`.
    pub fn grand(beta: f64, b: f64) -> Result<Self> {
        if !(beta > 0.0 && b > 1.0 && b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grand needs beta > 0 and finite b > 1, got beta = {beta}, b = {b}"
            )));
        }
        Self::new(ScalarFunction::grand(beta, b))
    }

    /// `C psi` on the same support.
    pub fn scaled(c: f64, inner: &GeneratingFunction) -> Result<Self> {
        let psi = ScalarFunction::scaled(c, inner.psi.clone())?;
        Self::with_support(psi, inner.a, inner.b)
    }

    /// Tabulated `psi` read from CSV `x,value`; support is the knot range.
    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::new(ScalarFunction::load_csv(path)?)
    }

    /// Parses `power:m=<v>`, `grand:beta=<v>,b=<v>`,
    /// `scaled:C=<v>,inner=<spec>` or `csv:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("psi spec `{spec}`: {msg}"));
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected <kind>:<params>"))?;
        match kind.trim() {
            "power" => Self::power(param(rest, "m").map_err(|e| bad(&e))?),
            "grand" => Self::grand(
                param(rest, "beta").map_err(|e| bad(&e))?,
                param(rest, "b").map_err(|e| bad(&e))?,
            ),
            "scaled" => {
                let (head, inner) = rest
                    .split_once("inner=")
                    .ok_or_else(|| bad("missing inner=<spec>"))?;
                let c = param(head, "C").map_err(|e| bad(&e))?;
                Self::scaled(c, &Self::parse(inner.trim())?)
            }
            "csv" => Self::load_csv(Path::new(rest.trim())),
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }

    pub fn psi(&self) -> &ScalarFunction {
        &self.psi
    }

    /// `(a, b)`; `b` may be `+inf`.
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn p_max(&self) -> f64 {
        self.psi.p_max()
    }

    pub fn evaluate(&self, p: f64) -> Result<f64> {
        if !(p >= self.a && p < self.b) {
            return Err(Error::Domain {
                x: p,
                lo: self.a,
                hi: self.b,
            });
        }
        self.psi.evaluate(p)
    }

    /// Grid over the support used by every supremum in `p`: log-spaced up to
    /// `P_max` when `b = inf`, accumulating at `b` otherwise.
    pub fn p_grid(&self, n: usize) -> Vec<f64> {
        if self.b.is_finite() {
            approach_grid(self.a, self.b, n, APPROACH_STEPS)
        } else {
            log_grid(self.a, self.p_max().max(2.0 * self.a), n)
        }
    }

    fn validate(&self) -> Result<()> {
        let grid = self.p_grid(MONOTONE_SCAN_POINTS);
        let mut prev = f64::NEG_INFINITY;
        for &p in &grid {
            let v = self.psi.evaluate(p)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "psi must be finite and positive on its support, psi({p}) = {v}"
                )));
            }
            if !self.b.is_finite() && v <= prev {
                return Err(Error::InvalidInput(format!(
                    "psi with unbounded support must be strictly increasing, fails near p = {p}"
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

fn param(text: &str, key: &str) -> std::result::Result<f64, String> {
    let v = text
        .split(',')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
        .ok_or_else(|| format!("missing {key}=<value>"))?;
    v.parse::<f64>()
        .map_err(|_| format!("{key}={v} is not a number"))
}

/// `phi(delta)` with the maximizing `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalValue {
    pub value: f64,
    pub argmax: f64,
}

/// `sup_{a <= p < b} delta^(1/p) / psi(p)`.
pub fn fundamental_direct(psi: &GeneratingFunction, delta: f64) -> Result<f64> {
    fundamental_direct_with_argmax(psi, delta).map(|v| v.value)
}

pub fn fundamental_direct_with_argmax(
    psi: &GeneratingFunction,
    delta: f64,
) -> Result<FundamentalValue> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            x: delta,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let ld = delta.ln();
    let h = |p: f64| -> Result<f64> { Ok(ld / p - psi.psi.evaluate(p)?.ln()) };
    let m = maximize_on_grid(&h, &psi.p_grid(P_GRID_POINTS), GOLDEN_ITER)?;
    if !psi.b.is_finite() {
        // for p >= P_max: delta^(1/p) <= max(1, delta^(1/P_max)), psi(p) >= psi(P_max)
        let top = psi.p_max();
        let tail = (ld / top).max(0.0) - psi.psi.evaluate(top)?.ln();
        if tail > m.value {
            return Err(if delta > 1.0 {
                Error::TruncationUncertain {
                    lower_bound: m.value.exp(),
                }
            } else {
                Error::TailUncertain {
                    tail_bound: tail.exp(),
                    attained: m.value.exp(),
                }
            });
        }
    }
    Ok(FundamentalValue {
        value: m.value.exp(),
        argmax: m.arg,
    })
}

/// `nu`, the inverse of `p -> p / psi(p)`, defined on the range of that map
/// and `+inf` elsewhere.
pub fn nu_from_psi(psi: &GeneratingFunction) -> Result<ScalarFunction> {
    let (a, b) = psi.support();
    let inner = psi.psi.clone();
    // a finite b is kept only if psi is finite there
    let top = if b.is_finite() {
        match inner.evaluate(b) {
            Ok(v) if v.is_finite() && v > 0.0 => b,
            _ => b - (b - a) * 2f64.powi(-APPROACH_STEPS),
        }
    } else {
        b
    };
    let map = ScalarFunction::derived("p / psi(p)", a, top, move |p| Ok(p / inner.evaluate(p)?))?
        .with_p_max(psi.p_max());
    let rep = map.check_monotone_dir(MONOTONE_SCAN_POINTS, Monotonicity::Increasing)?;
    if !rep.ok {
        return Err(Error::NotIncreasing {
            worst_margin: rep.worst_margin,
            worst_at: rep.worst_at,
            first_at: rep.first_violation_at.unwrap_or(rep.worst_at),
        });
    }
    ScalarFunction::inverse_of(map.with_monotonicity(Monotonicity::Increasing))
}

/// `psi`, `nu` and `N` built once; every `theta` evaluation reuses them.
#[derive(Clone, Debug)]
pub struct ForwardPipeline {
    psi: GeneratingFunction,
    nu: ScalarFunction,
    nu_star_zero: f64,
    orlicz: OrliczFunction,
}

impl ForwardPipeline {
    pub fn new(psi: &GeneratingFunction) -> Result<Self> {
        let nu = nu_from_psi(psi)?;
        let nu_star_zero = legendre(&nu, 0.0)?;
        let offset = nu_star_zero.exp();
        let conj = nu.clone();
        let right =
            ScalarFunction::derived("exp(nu*(u)) - exp(nu*(0))", 0.0, f64::INFINITY, move |u| {
                if u == 0.0 {
                    return Ok(0.0);
                }
                match legendre(&conj, u) {
                    Ok(v) => Ok(v.exp() - offset),
                    // the supremum already exceeds the largest finite exponential
                    Err(Error::TruncationUncertain { lower_bound }) if lower_bound > 709.0 => {
                        Ok(f64::INFINITY)
                    }
                    Err(e) => Err(e),
                }
            })?
            .with_p_max(psi.p_max());
        let orlicz = OrliczFunction::new(right)?;
        Ok(ForwardPipeline {
            psi: psi.clone(),
            nu,
            nu_star_zero,
            orlicz,
        })
    }

    pub fn psi(&self) -> &GeneratingFunction {
        &self.psi
    }

    pub fn nu(&self) -> &ScalarFunction {
        &self.nu
    }

    /// `nu*(0)`; `exp` of it is the constant subtracted in `N`.
    pub fn nu_star_zero(&self) -> f64 {
        self.nu_star_zero
    }

    pub fn orlicz(&self) -> &OrliczFunction {
        &self.orlicz
    }

    /// `1 / N^(-1)(1 / delta)`.
    pub fn theta(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain {
                x: delta,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(1.0 / self.orlicz.inverse(1.0 / delta)?)
    }

    /// `theta` tabulated on `n` log-spaced points of `[lo, hi]`, interpolated
    /// log-log. This is the form in which the inverse problem consumes it.
    pub fn theta_tabulation(&self, lo: f64, hi: f64, n: usize) -> Result<ScalarFunction> {
        let grid = log_grid(lo, hi, n);
        let ys = grid
            .par_iter()
            .map(|&d| self.theta(d))
            .collect::<Result<Vec<f64>>>()?;
        ScalarFunction::tabulated(grid, ys, Interpolation::LogLog)
    }

    /// `phi` and `theta` side by side; rows that fail carry the error.
    pub fn compare(&self, delta_grid: &[f64]) -> ComparisonReport {
        let rows = delta_grid
            .par_iter()
            .map(|&d| {
                match fundamental_direct(&self.psi, d).and_then(|phi| Ok((phi, self.theta(d)?))) {
                    Ok((phi, th)) => ComparisonRow::valid(d, phi, th),
                    Err(e) => ComparisonRow::invalid(d, e),
                }
            })
            .collect();
        ComparisonReport::new(["delta", "phi_direct", "theta"], rows)
    }
}

pub fn orlicz_from_psi(psi: &GeneratingFunction) -> Result<OrliczFunction> {
    Ok(ForwardPipeline::new(psi)?.orlicz)
}

pub fn theta(psi: &GeneratingFunction, delta: f64) -> Result<f64> {
    ForwardPipeline::new(psi)?.theta(delta)
}

pub fn compare_fundamental(
    psi: &GeneratingFunction,
    delta_grid: &[f64],
) -> Result<ComparisonReport> {
    Ok(ForwardPipeline::new(psi)?.compare(delta_grid))
}

/// Default delta grid: 200 log-spaced points over `[1e-8, 1]`.
pub fn default_delta_grid() -> Vec<f64> {
    log_grid(1e-8, 1.0, 200)
}
