//! Inverse problem: recover the generating function from a fundamental
//! function `phi`.
//!
//! ```text
//! N(z)   = 1 / phi^(-1)(1 / z)
//! V*(z)  = ln(C + N(z))
//! V      = (V*)*
//! psi(p) = p / V^(-1)(p)
//! ```
//!
//! `N` is only known on the range of `1 / phi`, so `V` is trusted only for
//! slopes attained inside that range. Targets `p` outside the covered part
//! are reported as `OutOfRange` instead of being extrapolated.

use std::path::Path;

use rayon::prelude::*;

use crate::conjugate::{defect_of_values, legendre, Defect};
use crate::csvio::{fmt_f64, Table};
use crate::error::{Error, Result};
use crate::gls_core::GeneratingFunction;
use crate::optimize::{linear_grid, log_grid};
use crate::scalar_fn::{Interpolation, Monotonicity, ScalarFunction, DEFAULT_TOL};

/// Points of the convexity scan of `ln(C + N)`.
const DEFECT_POINTS: usize = 257;
/// Convexity gate relative to the scale of `ln(C + N)`.
pub const CONVEXITY_GATE: f64 = 1e-4;
/// Halvings of `delta_max` probed by the vanishing-at-zero check.
const ZERO_PROBES: i32 = 40;
/// Smallest log-log slope of `phi` accepted over the lowest probed decade.
const MIN_ZERO_SLOPE: f64 = 1e-3;

/// A fundamental function on `(0, delta_max]`: strictly increasing, with
/// `phi(0+) = 0`.
#[derive(Clone, Debug)]
pub struct FundamentalFunction {
    phi: ScalarFunction,
}

impl FundamentalFunction {
    pub fn new(phi: ScalarFunction) -> Result<Self> {
        if let Some(t) = phi.tabulation() {
            if t.xs().len() < 3 {
                return Err(Error::InvalidInput(
                    "a tabulated fundamental function needs at least 3 knots".into(),
                ));
            }
        }
        let (lo, _) = phi.domain();
        if lo < 0.0 {
            return Err(Error::InvalidInput(format!(
                "a fundamental function lives on (0, delta_max], domain starts at {lo}"
            )));
        }
        let rep = phi.check_monotone_dir(1024, Monotonicity::Increasing)?;
        if !rep.ok {
            return Err(Error::NotMonotone {
                worst_margin: rep.worst_margin,
                worst_at: rep.worst_at,
                first_at: rep.first_violation_at.unwrap_or(rep.worst_at),
            });
        }
        let f = FundamentalFunction {
            phi: phi.with_monotonicity(Monotonicity::Increasing),
        };
        f.check_vanishing()?;
        Ok(f)
    }

    /// Reads CSV `x,value` (x = delta), interpolated log-log.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let t = ScalarFunction::load_csv(path)?;
        let tab = t.tabulation().expect("load_csv yields a tabulation");
        let pos = tab.xs()[0] > 0.0 && tab.ys().iter().all(|&y| y > 0.0);
        let rule = if pos {
            Interpolation::LogLog
        } else {
            Interpolation::Linear
        };
        Self::new(ScalarFunction::tabulated(
            tab.xs().to_vec(),
            tab.ys().to_vec(),
            rule,
        )?)
    }

    pub fn phi(&self) -> &ScalarFunction {
        &self.phi
    }

    pub fn delta_max(&self) -> f64 {
        self.phi.scan_hi()
    }

    /// Smallest `delta` where `phi` is evaluated.
    pub fn delta_min(&self) -> f64 {
        let lo = self.phi.domain().0;
        if lo > 0.0 {
            lo
        } else {
            self.delta_max() * 2f64.powi(-ZERO_PROBES)
        }
    }

    pub fn evaluate(&self, delta: f64) -> Result<f64> {
        self.phi.evaluate(delta)
    }

    /// `phi` must decrease strictly along `delta_max 2^-k` and keep a
    /// visible log-log slope over the lowest probed decade. A positive limit
    /// at 0 flattens that slope to nothing.
    fn check_vanishing(&self) -> Result<()> {
        let (top, floor) = (self.delta_max(), self.delta_min());
        let mut prev = self.phi.evaluate(top)?;
        if !(prev > 0.0) {
            return Err(Error::NotVanishingAtZero {
                reason: format!("phi(delta_max) = {prev} is not positive"),
            });
        }
        for k in 1..=ZERO_PROBES {
            let d = top * 2f64.powi(-k);
            if d < floor {
                break;
            }
            let v = self.phi.evaluate(d)?;
            if !(v < prev && v >= 0.0) {
                return Err(Error::NotVanishingAtZero {
                    reason: format!("phi does not decrease towards 0 near delta = {d}"),
                });
            }
            prev = v;
        }
        let hi = (floor * 10.0).min(top);
        let (a, b) = (self.phi.evaluate(floor)?, self.phi.evaluate(hi)?);
        if a <= 0.0 {
            return Ok(());
        }
        let slope = (b / a).ln() / (hi / floor).ln();
        if !(slope >= MIN_ZERO_SLOPE) {
            return Err(Error::NotVanishingAtZero {
                reason: format!(
                    "log-log slope {slope:e} of phi on [{floor:e}, {hi:e}] is below {MIN_ZERO_SLOPE:e}: phi levels off at {a}"
                ),
            });
        }
        Ok(())
    }

    /// The range `[1 / phi(delta_max), 1 / phi(delta_min)]` where `N` is known.
    pub fn z_range(&self) -> Result<(f64, f64)> {
        let lo = 1.0 / self.phi.evaluate(self.delta_max())?;
        let hi = 1.0 / self.phi.evaluate(self.delta_min())?;
        Ok((lo, hi.min(f64::MAX)))
    }
}

/// `N(z) = 1 / phi^(-1)(1 / z)`.
pub fn orlicz_from_fundamental(phi: &FundamentalFunction, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    if !(z > 0.0) {
        return Err(Error::InvalidInput(format!(
            "N is evaluated at z > 0, got {z}"
        )));
    }
    Ok(1.0 / phi.phi.invert_monotone(1.0 / z, DEFAULT_TOL)?)
}

fn n_samples(phi: &FundamentalFunction, zs: &[f64]) -> Result<Vec<f64>> {
    zs.par_iter()
        .map(|&z| orlicz_from_fundamental(phi, z))
        .collect()
}

fn defect_at(ns: &[f64], c: f64) -> Defect {
    let vs: Vec<f64> = ns.iter().map(|n| (c + n).ln()).collect();
    defect_of_values(&vs)
}

/// Relative convexity defect of `ln(C + N)` on the known `z` range.
pub fn log_defect(phi: &FundamentalFunction, c: f64) -> Result<f64> {
    let (lo, hi) = phi.z_range()?;
    let ns = n_samples(phi, &linear_grid(lo, hi, DEFECT_POINTS))?;
    Ok(defect_at(&ns, c).relative())
}

/// Recovered generating function with the constant used and the measured
/// convexity defect of `ln(C + N)`.
#[derive(Clone, Debug)]
pub struct RecoveredPsi {
    pub psi: GeneratingFunction,
    pub c: f64,
    pub defect: f64,
}

impl RecoveredPsi {
    pub fn to_table(&self) -> Result<Table> {
        Ok(self
            .psi
            .psi()
            .to_table()?
            .with_meta("C", fmt_f64(self.c))
            .with_meta("defect", fmt_f64(self.defect)))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_table()?.write(path)
    }
}

/// `psi(p) = p / V^(-1)(p)` tabulated on `p_grid`.
pub fn psi_from_fundamental(
    phi: &FundamentalFunction,
    c: f64,
    p_grid: &[f64],
) -> Result<RecoveredPsi> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    if p_grid.len() < 2 || p_grid.windows(2).any(|w| w[0] >= w[1]) || p_grid[0] <= 0.0 {
        return Err(Error::InvalidInput(
            "p grid must be strictly increasing, positive, with at least 2 points".into(),
        ));
    }
    let (z_lo, z_hi) = phi.z_range()?;
    let ns = n_samples(phi, &linear_grid(z_lo, z_hi, DEFECT_POINTS))?;
    let d = defect_at(&ns, c);
    let defect = d.relative().max(0.0);
    if defect > CONVEXITY_GATE {
        return Err(Error::NonConvex {
            defect,
            tolerance: CONVEXITY_GATE,
        });
    }

    let src = phi.clone();
    let v_star = ScalarFunction::derived("ln(C + N(z))", z_lo, z_hi, move |z| {
        Ok((c + orlicz_from_fundamental(&src, z)?).ln())
    })?;
    // slopes of V* at the ends bound the x where V is correctly resolved
    let h = 1e-6 * (z_hi - z_lo);
    let x_lo = (v_star.evaluate(z_lo + h)? - v_star.evaluate(z_lo)?) / h;
    let x_hi = (v_star.evaluate(z_hi)? - v_star.evaluate(z_hi - h)?) / h;
    if !(x_lo.is_finite() && x_hi > x_lo) {
        return Err(Error::InvalidInput(format!(
            "ln(C + N) has no increasing slope range on [{z_lo}, {z_hi}]"
        )));
    }
    let v = ScalarFunction::derived("(V*)*", x_lo, x_hi, move |x| legendre(&v_star, x))?
        .with_monotonicity(Monotonicity::Increasing);

    let values = p_grid
        .par_iter()
        .map(|&p| Ok(p / v.invert_monotone(p, DEFAULT_TOL)?))
        .collect::<Result<Vec<f64>>>()?;
    let tab = ScalarFunction::tabulated(p_grid.to_vec(), values, Interpolation::Linear)?;
    Ok(RecoveredPsi {
        psi: GeneratingFunction::new(tab)?,
        c,
        defect,
    })
}

/// Candidate constants: 161 log-spaced values over `[1e-4, 1e4]` (1 included).
fn c_grid() -> Vec<f64> {
    let mut g = log_grid(1e-4, 1e4, 161);
    g[80] = 1.0;
    g
}

/// `C` minimizing the convexity defect of `ln(C + N)`; near-ties go to the
/// candidate closest to 1.
pub fn choose_c(phi: &FundamentalFunction) -> Result<f64> {
    let (lo, hi) = phi.z_range()?;
    let ns = n_samples(phi, &linear_grid(lo, hi, DEFECT_POINTS))?;
    let mut best = (f64::NAN, f64::INFINITY);
    for c in c_grid() {
        let d = defect_at(&ns, c).relative().max(0.0);
        let tied = (d - best.1).abs() <= 1e-12;
        if d < best.1 - 1e-12 || tied && c.ln().abs() < best.0.ln().abs() {
            best = (c, d);
        }
    }
    if best.1 > CONVEXITY_GATE {
        return Err(Error::AllNonConvex {
            best_c: best.0,
            best_defect: best.1,
        });
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gls_core::ForwardPipeline;

    fn theta_sqrt() -> (ForwardPipeline, FundamentalFunction) {
        let fw = ForwardPipeline::new(&GeneratingFunction::power(2.0).unwrap()).unwrap();
        let tab = fw.theta_tabulation(1e-10, 1.0, 2000).unwrap();
        (fw, FundamentalFunction::new(tab).unwrap())
    }

    fn identity_phi() -> FundamentalFunction {
        let g = log_grid(1e-10, 1.0, 200);
        FundamentalFunction::new(
            ScalarFunction::tabulated(g.clone(), g, Interpolation::LogLog).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn orlicz_from_fundamental_examples() {
        let (_, phi) = theta_sqrt();
        let n4 = orlicz_from_fundamental(&phi, 4.0).unwrap();
        assert!((n4 / 54.2303 - 1.0).abs() < 1e-3);
        let id = identity_phi();
        assert!((orlicz_from_fundamental(&id, 2.0).unwrap() - 2.0).abs() < 1e-9);
        assert!(matches!(
            orlicz_from_fundamental(&id, 0.5),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn positive_limit_at_zero_is_rejected() {
        let g = log_grid(1e-10, 1.0, 200);
        let ys: Vec<f64> = g.iter().map(|d| 0.3 + d).collect();
        let phi = ScalarFunction::tabulated(g, ys, Interpolation::LogLog).unwrap();
        assert!(matches!(
            FundamentalFunction::new(phi),
            Err(Error::NotVanishingAtZero { .. })
        ));
    }

    #[test]
    fn recovers_square_root() {
        let (fw, phi) = theta_sqrt();
        let c = fw.nu_star_zero().exp();
        let p = linear_grid(1.5, 20.0, 38);
        let r = psi_from_fundamental(&phi, c, &p).unwrap();
        for &x in &p {
            let got = r.psi.evaluate(x.min(19.999_999)).unwrap();
            assert!((got / x.sqrt() - 1.0).abs() < 0.01, "p={x}: {got}");
        }
        let t = r.to_table().unwrap();
        assert!(t.meta.contains_key("C") && t.meta.contains_key("defect"));

        let r1 = psi_from_fundamental(&phi, 1.0, &p).unwrap();
        let at20 = r1.psi.psi().evaluate(20.0).unwrap();
        assert!((at20 / 20f64.sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn uncovered_targets_are_out_of_range() {
        let (fw, _) = theta_sqrt();
        let short = FundamentalFunction::new(fw.theta_tabulation(1e-4, 1.0, 200).unwrap()).unwrap();
        let err = psi_from_fundamental(&short, (-1f64).exp(), &[2.0, 20.0]).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }), "{err:?}");
    }

    #[test]
    fn choose_c_examples() {
        let (_, phi) = theta_sqrt();
        let c = choose_c(&phi).unwrap();
        assert!(
            log_defect(&phi, c).unwrap().max(0.0)
                <= log_defect(&phi, (-1f64).exp()).unwrap().max(0.0)
        );
        assert!(matches!(
            choose_c(&identity_phi()),
            Err(Error::AllNonConvex { .. })
        ));
        assert!(matches!(
            psi_from_fundamental(&identity_phi(), 1.0, &[1.5, 2.0]),
            Err(Error::NonConvex { .. })
        ));
        let two = ScalarFunction::tabulated(vec![0.5, 1.0], vec![0.5, 1.0], Interpolation::Linear)
            .unwrap();
        assert!(FundamentalFunction::new(two).is_err());
    }
}
