//! Exponential Orlicz functions for spaces of infinite measure.
//!
//! * `N(W, u) = exp(W(ln u))` for `u >= e^2`, continued below `e^2` by a
//!   power `c u^kappa` matching value and slope;
//! * the patch `N^(alpha)`: `C1 u^alpha` on `[0, C2]`, the tangent
//!   `C3 + C4 u` on `(C2, C5]`, `N` above `C5`;
//! * the Trudinger functions `exp(|u|^m) - sum_{l <= j} |u|^(m l) / l!`;
//! * the correspondence `psi(W; p) = exp(W*(p) / p)` and
//!   `N([psi], u) = exp([p ln psi(p)]*(ln u))`.

use std::path::Path;

use rayon::prelude::*;

use crate::conjugate::{convexity_defect_on, legendre};
use crate::csvio::{fmt_f64, Table};
use crate::error::{Error, Result};
use crate::gls_core::{fundamental_direct, GeneratingFunction};
use crate::norms::{gls_norm, luxemburg_norm, DiscreteMeasureSpace, SampledFunction, SpaceKind};
use crate::optimize::{log_grid, maximize_on_grid};
use crate::orlicz::{OrliczFunction, CONVEXITY_TOL};
use crate::report::{ComparisonReport, ComparisonRow};
use crate::scalar_fn::{Monotonicity, ScalarFunction};

/// `e^2`, where the exponential form takes over.
pub const E2: f64 = 7.389_056_098_930_65;
/// Points of the elasticity scan on `(0, e^2]`.
const ELASTICITY_POINTS: usize = 801;
/// Slack when comparing an elasticity with `alpha`.
const ELASTICITY_TOL: f64 = 1e-8;
/// Largest exponent whose `exp` is finite.
const EXP_LIMIT: f64 = 709.0;

/// Second-order one-sided difference quotient, step `1e-5 x`.
pub fn one_sided_slope(f: impl Fn(f64) -> Result<f64>, x: f64, right: bool) -> Result<f64> {
    slope_with_step(f, x, right, 1e-5)
}

fn slope_with_step(
    f: impl Fn(f64) -> Result<f64>,
    x: f64,
    right: bool,
    rel_step: f64,
) -> Result<f64> {
    let h = rel_step * x.abs().max(1e-300);
    let s = if right { h } else { -h };
    Ok((-3.0 * f(x)? + 4.0 * f(x + s)? - f(x + 2.0 * s)?) / (2.0 * s))
}

fn central_slope(f: impl Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let h = 1e-5 * x.abs();
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Convex strictly increasing `W` on `[2, inf)`.
#[derive(Clone, Debug)]
pub struct WFunction {
    w: ScalarFunction,
    superlinear: bool,
}

impl WFunction {
    pub fn new(w: ScalarFunction) -> Result<Self> {
        let (lo, hi) = w.domain();
        if lo > 2.0 || hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "W must be defined on [2, inf), got [{lo}, {hi}]"
            )));
        }
        let p_max = w.p_max();
        let w = w.on(2.0, f64::INFINITY)?;
        let rep = w.check_monotone_dir(1024, Monotonicity::Increasing)?;
        if !rep.ok {
            return Err(Error::NotMonotone {
                worst_margin: rep.worst_margin,
                worst_at: rep.worst_at,
                first_at: rep.first_violation_at.unwrap_or(rep.worst_at),
            });
        }
        // beyond W = EXP_LIMIT the exponential form is infinite anyway
        let mut top = 4.0;
        while top < p_max && w.evaluate(top)? < EXP_LIMIT {
            top *= 2.0;
        }
        let top = top.min(p_max);
        let d = convexity_defect_on(&w, 2.0, top, 257)?;
        if d.value > CONVEXITY_TOL * d.scale.max(1.0) {
            return Err(Error::NonConvex {
                defect: d.value,
                tolerance: CONVEXITY_TOL * d.scale.max(1.0),
            });
        }
        let f = |z: f64| w.evaluate(z);
        let superlinear =
            one_sided_slope(f, top, false)? > one_sided_slope(f, top / 2.0, false)? * (1.0 + 1e-6);
        Ok(WFunction {
            w: w.with_monotonicity(Monotonicity::Increasing),
            superlinear,
        })
    }

    pub fn from_fn<F>(label: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self::new(ScalarFunction::derived(label, 2.0, f64::INFINITY, f)?)
    }

    pub fn function(&self) -> &ScalarFunction {
        &self.w
    }

    pub fn evaluate(&self, z: f64) -> Result<f64> {
        self.w.evaluate(z)
    }

    /// Whether `W'` still grows at the end of the scan. Linear `W` are
    /// accepted but flagged here.
    pub fn derivative_unbounded(&self) -> bool {
        self.superlinear
    }
}

/// Power continuation `c u^kappa` below `e^2`: `kappa = W'(2)` (the
/// log-log slope of `N` at `e^2`) and `c = exp(W(2) - 2 kappa)`.
pub fn canonical_extension(w: &WFunction) -> Result<(f64, f64)> {
    let kappa = one_sided_slope(|z| w.evaluate(z), 2.0, true)?;
    Ok((kappa, (w.evaluate(2.0)? - 2.0 * kappa).exp()))
}

/// `N(W, u)`.
pub fn eof_from_w(w: &WFunction) -> Result<OrliczFunction> {
    let (kappa, c) = canonical_extension(w)?;
    if kappa < 1.0 {
        return Err(Error::ExtensionNotConvex { kappa });
    }
    let w = w.clone();
    OrliczFunction::from_fn("exp(W(ln u))", move |u| {
        if u >= E2 {
            Ok(w.evaluate(u.ln())?.exp())
        } else {
            Ok(c * u.powf(kappa))
        }
    })
}

/// The patched function `N^(alpha)` with its five constants.
#[derive(Clone, Debug)]
pub struct AlphaPatch {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub base: OrliczFunction,
    patched: OrliczFunction,
}

/// Gaps at the two knots, relative to the value or slope there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnotReport {
    pub value_gap_c2: f64,
    pub slope_gap_c2: f64,
    pub value_gap_c5: f64,
    pub slope_gap_c5: f64,
}

impl KnotReport {
    pub fn max_value_gap(&self) -> f64 {
        self.value_gap_c2.max(self.value_gap_c5)
    }

    pub fn max_slope_gap(&self) -> f64 {
        self.slope_gap_c2.max(self.slope_gap_c5)
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn patched_value(
    (alpha, c1, c2, c3, c4, c5): (f64, f64, f64, f64, f64, f64),
    base: &OrliczFunction,
    u: f64,
) -> Result<f64> {
    let u = u.abs();
    if u <= c2 {
        Ok(c1 * u.powf(alpha))
    } else if u <= c5 {
        Ok(c3 + c4 * u)
    } else {
        base.evaluate(u)
    }
}

impl AlphaPatch {
    pub fn constants(&self) -> [f64; 5] {
        [self.c1, self.c2, self.c3, self.c4, self.c5]
    }

    fn params(&self) -> (f64, f64, f64, f64, f64, f64) {
        (self.alpha, self.c1, self.c2, self.c3, self.c4, self.c5)
    }

    /// The patched Young function.
    pub fn orlicz(&self) -> &OrliczFunction {
        &self.patched
    }

    pub fn evaluate(&self, u: f64) -> Result<f64> {
        patched_value(self.params(), &self.base, u)
    }

    /// Value and one-sided slope continuity at `C2` and `C5`. A knot with
    /// an empty piece on one side is compared against the next piece.
    pub fn knot_report(&self) -> Result<KnotReport> {
        let power = |u: f64| Ok(self.c1 * u.powf(self.alpha));
        let line = |u: f64| Ok(self.c3 + self.c4 * u);
        let base = |u: f64| self.base.evaluate(u);
        let (c2, c5) = (self.c2, self.c5);
        let (value_gap_c2, slope_gap_c2) = if c2 > 0.0 {
            let right: &dyn Fn(f64) -> Result<f64> = if c2 < c5 { &line } else { &base };
            (
                rel_gap(power(c2)?, right(c2)?),
                rel_gap(
                    one_sided_slope(power, c2, false)?,
                    one_sided_slope(right, c2, true)?,
                ),
            )
        } else {
            (0.0, 0.0)
        };
        let left: &dyn Fn(f64) -> Result<f64> = if c2 < c5 { &line } else { &power };
        Ok(KnotReport {
            value_gap_c2,
            slope_gap_c2,
            value_gap_c5: rel_gap(left(c5)?, base(c5)?),
            slope_gap_c5: rel_gap(
                one_sided_slope(left, c5, false)?,
                one_sided_slope(base, c5, true)?,
            ),
        })
    }

    /// `N^(alpha)(u) / u^alpha`, which tends to `C1` as `u -> 0`.
    pub fn small_u_ratio(&self, u: f64) -> Result<f64> {
        Ok(self.evaluate(u)? / u.powf(self.alpha))
    }

    pub fn meta(&self, table: Table) -> Table {
        table
            .with_meta("alpha", fmt_f64(self.alpha))
            .with_meta("C1", fmt_f64(self.c1))
            .with_meta("C2", fmt_f64(self.c2))
            .with_meta("C3", fmt_f64(self.c3))
            .with_meta("C4", fmt_f64(self.c4))
            .with_meta("C5", fmt_f64(self.c5))
    }
}

/// Builds `N^(alpha)`. `C5` is the largest scan point of `(0, e^2]` where
/// the elasticity `u N'(u) / N(u)` is at most `alpha`; the line is the
/// tangent of `N` at `C5` and the power piece is tangent to the line at
/// `C2`. For `alpha = 1` the power piece is the chord `N(C5) u / C5`.
pub fn alpha_patch(n: &OrliczFunction, alpha: f64) -> Result<AlphaPatch> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be >= 1, got {alpha}"
        )));
    }
    let f = |u: f64| n.evaluate(u);
    let scan = log_grid(E2 * 1e-8, E2, ELASTICITY_POINTS);
    let elasticity = scan
        .par_iter()
        .map(|&u| Ok(u * central_slope(f, u)? / n.evaluate(u)?))
        .collect::<Result<Vec<f64>>>()?;
    let pick = scan
        .iter()
        .zip(&elasticity)
        .rev()
        .find(|(_, e)| **e <= alpha + ELASTICITY_TOL)
        .map(|(u, _)| *u);
    let c5 = pick.ok_or_else(|| Error::NoValidC5 {
        alpha,
        min_elasticity: elasticity.iter().copied().fold(f64::INFINITY, f64::min),
    })?;
    let n5 = n.evaluate(c5)?;
    // right derivative: N may switch formulas exactly at C5
    let c4 = slope_with_step(f, c5, true, 1e-6)?;
    let c3 = n5 - c4 * c5;
    let (c1, c2) = if alpha == 1.0 {
        (c4 + c3 / c5, c5)
    } else if c3 < 0.0 {
        let c2 = (alpha * -c3 / (c4 * (alpha - 1.0))).min(c5);
        (c4 / (alpha * c2.powf(alpha - 1.0)), c2)
    } else {
        // N is linear up to C5: the tangent passes through the origin
        (0.0, 0.0)
    };
    let params = (alpha, c1, c2, c3, c4, c5);
    let base = n.clone();
    let right = ScalarFunction::derived("alpha patch", 0.0, f64::INFINITY, move |u| {
        patched_value(params, &base, u)
    })?
    .with_p_max(n.right_branch().p_max());
    Ok(AlphaPatch {
        alpha,
        c1,
        c2,
        c3,
        c4,
        c5,
        base: n.clone(),
        patched: OrliczFunction::new(right)?,
    })
}

/// `exp(|u|^m) - sum_{l=0}^{j} |u|^(m l) / l!`.
pub fn trudinger(m: f64, j: u32) -> Result<OrliczFunction> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "Trudinger exponent must be positive, got {m}"
        )));
    }
    OrliczFunction::from_fn("trudinger", move |u| Ok(exp_tail(u.abs().powf(m), j)))
}

/// `sum_{l > j} x^l / l!`, by the series when the head would cancel.
fn exp_tail(x: f64, j: u32) -> f64 {
    if x > 2.0 * (j as f64 + 1.0) + 10.0 {
        let mut head = 0.0;
        let mut term = 1.0;
        for l in 0..=j {
            if l > 0 {
                term *= x / l as f64;
            }
            head += term;
        }
        return x.exp() - head;
    }
    let mut term = 1.0;
    for l in 1..=j + 1 {
        term *= x / l as f64;
    }
    let mut sum = 0.0;
    let mut l = j + 1;
    while term > 1e-17 * sum || sum == 0.0 {
        sum += term;
        l += 1;
        term *= x / l as f64;
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// `psi(W; p) = exp(W*(p) / p)` on `[alpha, inf)`, with `W*` the transform
/// over `z >= 2`. `P_max` is lowered to where `ln psi` would overflow.
pub fn psi_from_w(w: &WFunction, alpha: f64) -> Result<GeneratingFunction> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let wf = w.w.clone();
    let log_psi = move |p: f64| legendre(&wf, p).map(|v| v / p);
    let mut top = alpha.max(1.0) * 2.0;
    while top < w.w.p_max() && log_psi(top)? < EXP_LIMIT {
        top *= 2.0;
    }
    let top = if log_psi(top)? < EXP_LIMIT {
        top.min(w.w.p_max())
    } else {
        top / 2.0
    };
    let psi = ScalarFunction::derived("exp(W*(p)/p)", alpha, f64::INFINITY, move |p| {
        Ok(log_psi(p)?.exp())
    })?
    .with_p_max(top);
    GeneratingFunction::new(psi)
}

/// `sup_{a <= p < b} (p y - g(p))` for signed `y`.
fn signed_conjugate(psi: &GeneratingFunction, y: f64) -> Result<f64> {
    let g = |p: f64| -> Result<f64> { Ok(p * psi.psi().evaluate(p)?.ln()) };
    let obj = |p: f64| -> Result<f64> { Ok(p * y - g(p)?) };
    let m = maximize_on_grid(&obj, &psi.p_grid(512), 200)?;
    if !psi.support().1.is_finite() && m.at_last {
        return Err(Error::TruncationUncertain {
            lower_bound: m.value,
        });
    }
    Ok(m.value)
}

/// `N([psi], u) = exp([p ln psi(p)]*(ln u))` for every `u > 0`.
///
/// The supremum runs over the support `[a, b)` of `psi`, so for small `u`
/// the left end wins and `N(u) = u^a / psi(a)^a`: the formula continues
/// itself below `e^2` as a convex function, and no separate extension is
/// needed.
pub fn orlicz_from_psi_eof(psi: &GeneratingFunction) -> Result<OrliczFunction> {
    let (a, b) = psi.support();
    let top = if b.is_finite() {
        b - (b - a) * 1e-9
    } else {
        psi.p_max()
    };
    let inner = psi.clone();
    let g = ScalarFunction::derived("p ln psi(p)", a, top, move |p| {
        Ok(p * inner.psi().evaluate(p)?.ln())
    })?;
    let d = convexity_defect_on(&g, a, top, 257)?;
    let tol = CONVEXITY_TOL * d.scale.max(1.0);
    if d.value > tol {
        return Err(Error::NonConvex {
            defect: d.value,
            tolerance: tol,
        });
    }
    let psi = psi.clone();
    let right = ScalarFunction::derived("exp([p ln psi]*(ln u))", 0.0, f64::INFINITY, move |u| {
        if u == 0.0 {
            return Ok(0.0);
        }
        match signed_conjugate(&psi, u.ln()) {
            Ok(v) => Ok(v.exp()),
            Err(Error::TruncationUncertain { lower_bound }) if lower_bound > EXP_LIMIT => {
                Ok(f64::INFINITY)
            }
            Err(e) => Err(e),
        }
    })?;
    OrliczFunction::new(right)
}

/// Norm ratios and fundamental functions for a truncated infinite space.
#[derive(Clone, Debug)]
pub struct TheoremAReport {
    /// `id, gls, orlicz, ratio` with `orlicz` the Luxemburg norm under
    /// `N^(alpha)`.
    pub norms: ComparisonReport,
    /// `delta, phi_direct, theta` over `delta` in `(0, M)`.
    pub fundamental: ComparisonReport,
    pub patch: AlphaPatch,
    pub total_mass: f64,
}

impl TheoremAReport {
    pub fn norms_table(&self) -> Table {
        self.patch
            .meta(self.norms.to_table())
            .with_meta("M", fmt_f64(self.total_mass))
    }

    pub fn fundamental_table(&self) -> Table {
        self.patch
            .meta(self.fundamental.to_table())
            .with_meta("M", fmt_f64(self.total_mass))
    }

    pub fn write_csv(&self, norms: &Path, fundamental: &Path) -> Result<()> {
        self.norms_table().write(norms)?;
        self.fundamental_table().write(fundamental)
    }
}

/// Points of the delta grid of the fundamental comparison.
const DELTA_POINTS: usize = 60;

/// GLS norm with support `[alpha, b)` against the Luxemburg norm of
/// `alpha_patch(N([psi]), alpha)` for every suite member, plus the two
/// fundamental functions on `(0, M)`.
pub fn theorem_a_check(
    psi: &GeneratingFunction,
    alpha: f64,
    suite: &[SampledFunction],
    mu: &DiscreteMeasureSpace,
) -> Result<TheoremAReport> {
    if mu.kind() != SpaceKind::TruncatedInfinite {
        return Err(Error::InvalidInput(
            "the infinite-measure check needs a truncated infinite space".into(),
        ));
    }
    let (_, b) = psi.support();
    let psi_a = GeneratingFunction::with_support(psi.psi().clone(), alpha, b)?;
    let patch = alpha_patch(&orlicz_from_psi_eof(&psi_a)?, alpha)?;
    let n = patch.orlicz();

    let rows = suite
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let id = i as f64;
            match gls_norm(f, mu, &psi_a).and_then(|g| Ok((g, luxemburg_norm(f, mu, n)?))) {
                Ok((g, l)) => ComparisonRow::valid(id, g, l),
                Err(e) => ComparisonRow::invalid(id, e),
            }
        })
        .collect();
    let norms = ComparisonReport::new(["id", "gls", "orlicz"], rows);

    let m = mu.total_mass();
    let deltas = log_grid(1e-8, m * (1.0 - 1e-9), DELTA_POINTS);
    let rows = deltas
        .par_iter()
        .map(|&d| {
            let th = n.inverse(1.0 / d).map(|u| 1.0 / u);
            match fundamental_direct(&psi_a, d).and_then(|phi| Ok((phi, th?))) {
                Ok((phi, th)) => ComparisonRow::valid(d, phi, th),
                Err(e) => ComparisonRow::invalid(d, e),
            }
        })
        .collect();
    let fundamental = ComparisonReport::new(["delta", "phi_direct", "theta"], rows);
    Ok(TheoremAReport {
        norms,
        fundamental,
        patch,
        total_mass: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn linear_w_gives_power() {
        let w = WFunction::from_fn("3z", |z| Ok(3.0 * z)).unwrap();
        assert!(!w.derivative_unbounded());
        let n = eof_from_w(&w).unwrap();
        for u in [0.5, E2, 10.0, 30.0] {
            assert!(rel(n.evaluate(u).unwrap(), u.powi(3)) < 1e-8, "u={u}");
            assert_eq!(n.evaluate(-u).unwrap(), n.evaluate(u).unwrap());
        }
    }

    #[test]
    fn exponential_w_gives_exp() {
        let w = WFunction::from_fn("e^z", |z: f64| Ok(z.exp())).unwrap();
        assert!(w.derivative_unbounded());
        let n = eof_from_w(&w).unwrap();
        for u in [E2, 9.0, 20.0] {
            assert!(rel(n.evaluate(u).unwrap(), u.exp()) < 1e-12);
        }
    }

    #[test]
    fn flat_extension_is_rejected() {
        let w = WFunction::from_fn("z/2", |z| Ok(z / 2.0)).unwrap();
        match eof_from_w(&w) {
            Err(Error::ExtensionNotConvex { kappa }) => assert!((kappa - 0.5).abs() < 1e-8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trudinger_examples() {
        let t = trudinger(1.0, 0).unwrap();
        assert!(rel(t.evaluate(1.0).unwrap(), std::f64::consts::E - 1.0) < 1e-14);
        assert_eq!(t.evaluate(0.0).unwrap(), 0.0);
        let t = trudinger(2.0, 1).unwrap();
        assert!(rel(t.evaluate(1.0).unwrap(), std::f64::consts::E - 2.0) < 1e-14);
        // the series keeps full precision where the head cancels
        assert!(rel(exp_tail(1e-3, 2), 1e-9 / 6.0 * (1.0 + 1e-3 / 4.0)) < 1e-6);
        assert!(matches!(trudinger(0.5, 0), Err(Error::NonYoung { .. })));
    }

    #[test]
    fn pure_power_patch_is_degenerate() {
        let n = OrliczFunction::power(3.0).unwrap();
        let p = alpha_patch(&n, 3.0).unwrap();
        assert!(rel(p.c5, E2) < 1e-12);
        assert!(rel(p.c2, p.c5) < 1e-6);
        assert!(rel(p.c1, 1.0) < 1e-6);
        for u in [1e-3, 0.5, 4.0, 20.0] {
            assert!(rel(p.evaluate(u).unwrap(), u.powi(3)) < 1e-6);
        }
    }

    #[test]
    fn patch_above_extension_exponent() {
        // canonical extension with kappa = 2 below e^2, alpha = 3
        let w = WFunction::from_fn("z^2/2", |z| Ok(z * z / 2.0)).unwrap();
        let n = eof_from_w(&w).unwrap();
        let p = alpha_patch(&n, 3.0).unwrap();
        assert!(p.c2 < p.c5 && p.c2 > 0.0);
        let k = p.knot_report().unwrap();
        assert!(k.max_value_gap() <= 1e-8, "{k:?}");
        assert!(k.max_slope_gap() <= 1e-6, "{k:?}");
        for u in [1e-3, 1e-4] {
            assert!(rel(p.small_u_ratio(u).unwrap(), p.c1) < 1e-12);
        }
        assert!(matches!(alpha_patch(&n, 1.5), Err(Error::NoValidC5 { .. })));
    }

    #[test]
    fn psi_from_w_examples() {
        let w = WFunction::from_fn("z^2/2", |z| Ok(z * z / 2.0)).unwrap();
        let psi = psi_from_w(&w, 1.0).unwrap();
        for p in [2.0, 3.0, 10.0] {
            assert!(rel(psi.evaluate(p).unwrap(), (p / 2.0).exp()) < 1e-10);
        }
        let w = WFunction::from_fn("z^2", |z| Ok(z * z)).unwrap();
        let psi = psi_from_w(&w, 1.0).unwrap();
        for p in [4.0, 8.0] {
            assert!(rel(psi.evaluate(p).unwrap(), (p / 4.0).exp()) < 1e-10);
        }
    }

    #[test]
    fn conjugation_roundtrip() {
        let w = WFunction::from_fn("z^2/2", |z| Ok(z * z / 2.0)).unwrap();
        let direct = eof_from_w(&w).unwrap();
        let back = orlicz_from_psi_eof(&psi_from_w(&w, 1.0).unwrap()).unwrap();
        for u in log_grid(E2, E2 * E2, 9) {
            let (a, b) = (back.evaluate(u).unwrap(), direct.evaluate(u).unwrap());
            assert!(rel(a, b) < 1e-6, "u={u}: {a} vs {b}");
        }
    }

    #[test]
    fn natural_continuation_for_powers() {
        let e = std::f64::consts::E;
        let n1 = orlicz_from_psi_eof(&GeneratingFunction::power(1.0).unwrap()).unwrap();
        for u in [0.01, 1.0, 2.0] {
            assert!(rel(n1.evaluate(u).unwrap(), u) < 1e-12);
        }
        for u in [4.0, 10.0] {
            assert!(rel(n1.evaluate(u).unwrap(), (u / e).exp()) < 1e-10);
        }
        let n2 = orlicz_from_psi_eof(&GeneratingFunction::power(2.0).unwrap()).unwrap();
        assert!(rel(n2.evaluate(1.5).unwrap(), 1.5) < 1e-12);
        assert!(rel(n2.evaluate(4.0).unwrap(), (16.0 / (2.0 * e)).exp()) < 1e-10);

        // p ln psi = p + sqrt(p) - 10 is concave
        let f = ScalarFunction::derived("concave", 1.0, 100.0, |p: f64| {
            Ok((1.0 + 1.0 / p.sqrt() - 10.0 / p).exp())
        })
        .unwrap();
        let bad = GeneratingFunction::new(f).unwrap();
        assert!(matches!(
            orlicz_from_psi_eof(&bad),
            Err(Error::NonConvex { .. })
        ));
    }

    #[test]
    fn alpha_one_patch_of_natural_power() {
        let n2 = orlicz_from_psi_eof(&GeneratingFunction::power(2.0).unwrap()).unwrap();
        let p = alpha_patch(&n2, 1.0).unwrap();
        assert!(p.c5 <= std::f64::consts::E.sqrt() * (1.0 + 1e-6));
        assert!(rel(p.c1, 1.0) < 1e-8);
        let p3 = alpha_patch(&n2, 3.0).unwrap();
        assert!(rel(p3.c5, (3.0 * std::f64::consts::E).sqrt()) < 0.03);
        let k = p3.knot_report().unwrap();
        assert!(
            k.max_value_gap() <= 1e-8 && k.max_slope_gap() <= 1e-6,
            "{k:?}"
        );
    }

    #[test]
    fn theorem_a_indicators() {
        let mu = DiscreteMeasureSpace::truncated_infinite(2000, 100.0).unwrap();
        let suite: Vec<SampledFunction> = [0.5, 1.0, 10.0]
            .iter()
            .map(|&d| mu.indicator(d).unwrap())
            .collect();
        let r =
            theorem_a_check(&GeneratingFunction::power(2.0).unwrap(), 1.0, &suite, &mu).unwrap();
        assert!(r.norms.all_valid());
        assert!(r.norms.ratio_min > 0.0 && r.norms.ratio_max.is_finite());
        let t = r.norms_table();
        for k in ["C1", "C2", "C3", "C4", "C5", "M"] {
            assert!(t.meta.contains_key(k));
        }
    }
}
