//! `L_p`, Grand Lebesgue and Orlicz norms of sampled functions on discrete
//! measure spaces.
//!
//! All norms here are rearrangement invariant, so a function is first
//! reduced to its distribution: the distinct nonzero values of `|f|` with
//! the total mass carried by each. An indicator costs one term.

use std::path::Path;

use rayon::prelude::*;

use crate::csvio::Table;
use crate::error::{Error, Result};
use crate::gls_core::{ForwardPipeline, GeneratingFunction};
use crate::optimize::{linear_grid, maximize_on_grid};
use crate::orlicz::OrliczFunction;
use crate::report::{ComparisonReport, ComparisonRow};

/// Nodes of the coarse pass over `p` in the GLS norm.
const P_GRID_POINTS: usize = 256;
/// Atoms of a truncated infinite space start at this mass times `1/n`.
const SMALLEST_ATOM: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Total mass 1.
    Probability,
    /// Finite total mass `M` standing in for an infinite measure.
    TruncatedInfinite,
}

/// Atoms with positive masses.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasureSpace {
    weights: Vec<f64>,
    kind: SpaceKind,
    total_mass: f64,
}

impl DiscreteMeasureSpace {
    pub fn from_weights(weights: Vec<f64>, kind: SpaceKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput(
                "a measure space needs at least one atom".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "atom masses must be positive, got {w}"
            )));
        }
        let total_mass: f64 = weights.iter().sum();
        if kind == SpaceKind::Probability && (total_mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "probability space masses sum to {total_mass}, not 1"
            )));
        }
        Ok(DiscreteMeasureSpace {
            weights,
            kind,
            total_mass,
        })
    }

    /// `n` atoms of mass `1/n`.
    pub fn probability(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one atom".into()));
        }
        let mut w = vec![1.0 / n as f64; n];
        // absorb the rounding of 1/n into the last atom
        let s: f64 = w[..n - 1].iter().sum();
        w[n - 1] = 1.0 - s;
        Self::from_weights(w, SpaceKind::Probability)
    }

    /// `n` atoms `w0 r^i` with `w0 = 1/n` and `r` chosen so the masses add up
    /// to `total_mass`.
    pub fn truncated_infinite(n: usize, total_mass: f64) -> Result<Self> {
        if n < 2 || !(total_mass > 0.0 && total_mass.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "truncated space needs n >= 2 and a finite positive mass, got n = {n}, M = {total_mass}"
            )));
        }
        let w0 = SMALLEST_ATOM / n as f64;
        let sum = |r: f64| -> f64 {
            if (r - 1.0).abs() < 1e-12 {
                w0 * n as f64
            } else {
                w0 * (r.powi(n as i32) - 1.0) / (r - 1.0)
            }
        };
        let (mut lo, mut hi) = (1e-6, 1.0);
        while sum(hi) < total_mass {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sum(mid) < total_mass {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        let weights: Vec<f64> = (0..n).map(|i| w0 * r.powi(i as i32)).collect();
        Self::from_weights(weights, SpaceKind::TruncatedInfinite)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Indicator of a set of mass close to `delta`: a prefix of the atoms on
    /// probability spaces, a greedy pick from the heaviest atom down on
    /// truncated spaces. The realized mass is [`Self::support_mass`].
    pub fn indicator(&self, delta: f64) -> Result<SampledFunction> {
        if !(delta > 0.0 && delta <= self.total_mass * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!(
                "indicator mass {delta} must lie in (0, {}]",
                self.total_mass
            )));
        }
        let mut values = vec![0.0; self.len()];
        match self.kind {
            SpaceKind::Probability => {
                let k = ((delta / self.weights[0]).round() as usize).clamp(1, self.len());
                values[..k].iter_mut().for_each(|v| *v = 1.0);
            }
            SpaceKind::TruncatedInfinite => {
                let slack = delta * 1e-12;
                let mut acc = 0.0;
                for i in (0..self.len()).rev() {
                    if acc + self.weights[i] <= delta + slack {
                        acc += self.weights[i];
                        values[i] = 1.0;
                    }
                }
                if acc == 0.0 {
                    values[0] = 1.0;
                }
            }
        }
        Ok(SampledFunction { values })
    }

    /// `mu({f != 0})`.
    pub fn support_mass(&self, f: &SampledFunction) -> f64 {
        self.weights
            .iter()
            .zip(&f.values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(w, _)| w)
            .sum()
    }
}

/// Values of a function at the atoms of a space.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sampled values must be finite, got {v}"
            )));
        }
        Ok(SampledFunction { values })
    }

    pub fn constant(c: f64, mu: &DiscreteMeasureSpace) -> Result<Self> {
        Self::new(vec![c; mu.len()])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self, c: f64) -> Self {
        SampledFunction {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::InvalidInput(
                "sampled functions differ in length".into(),
            ));
        }
        Ok(SampledFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Reads CSV `weight,value`. The space is a probability space when the
/// weights add up to 1 (within `1e-12`).
pub fn load_weighted_csv(path: &Path) -> Result<(DiscreteMeasureSpace, SampledFunction)> {
    let t = Table::read(path)?;
    let w = t.column("weight", path)?;
    let v = t.column("value", path)?;
    let total: f64 = w.iter().sum();
    let kind = if (total - 1.0).abs() <= 1e-12 {
        SpaceKind::Probability
    } else {
        SpaceKind::TruncatedInfinite
    };
    let v: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    Ok((
        DiscreteMeasureSpace::from_weights(w, kind)?,
        SampledFunction::new(v)?,
    ))
}

/// Distinct nonzero `|f|` values in increasing order, each with its mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pairs: Vec<(f64, f64)>,
}

impl Distribution {
    pub fn of(f: &SampledFunction, mu: &DiscreteMeasureSpace) -> Result<Self> {
        if f.values.len() != mu.len() {
            return Err(Error::InvalidInput(format!(
                "function has {} values, space has {} atoms",
                f.values.len(),
                mu.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = f
            .values
            .iter()
            .zip(&mu.weights)
            .filter(|(v, _)| **v != 0.0)
            .map(|(v, w)| (v.abs(), *w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => merged.push((v, w)),
            }
        }
        Ok(Distribution { pairs: merged })
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sup(&self) -> f64 {
        self.pairs.last().map_or(0.0, |p| p.0)
    }

    /// `ln |f|_p`, factoring out `sup |f|` before powering.
    pub fn ln_lp(&self, p: f64) -> f64 {
        let m = self.sup();
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        let s: f64 = self.pairs.iter().map(|(v, w)| w * (v / m).powf(p)).sum();
        m.ln() + s.ln() / p
    }

    /// `sum w N(c |f|)`.
    pub fn modular(&self, n: &OrliczFunction, c: f64) -> Result<f64> {
        let mut s = 0.0;
        for (v, w) in &self.pairs {
            s += w * n.evaluate(c * v)?;
            if s.is_infinite() {
                break;
            }
        }
        Ok(s)
    }
}

/// `(sum w |f|^p)^(1/p)`; `p = inf` gives the essential supremum.
pub fn lp_norm(f: &SampledFunction, mu: &DiscreteMeasureSpace, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "L_p norm needs p >= 1, got {p}"
        )));
    }
    let d = Distribution::of(f, mu)?;
    if p.is_infinite() {
        return Ok(d.sup());
    }
    Ok(d.ln_lp(p).exp())
}

/// `sup_{a <= p < b} |f|_p / psi(p)`.
pub fn gls_norm(
    f: &SampledFunction,
    mu: &DiscreteMeasureSpace,
    psi: &GeneratingFunction,
) -> Result<f64> {
    let (a, b) = psi.support();
    if mu.kind == SpaceKind::TruncatedInfinite && a < 1.0 {
        return Err(Error::InvalidInput(format!(
            "on a truncated infinite space the support must start at alpha >= 1, got {a}"
        )));
    }
    let d = Distribution::of(f, mu)?;
    if d.is_zero() {
        return Ok(0.0);
    }
    let obj = |p: f64| -> Result<f64> { Ok(d.ln_lp(p) - psi.psi().evaluate(p)?.ln()) };
    let m = maximize_on_grid(&obj, &psi.p_grid(P_GRID_POINTS), 200)?;
    if !b.is_finite() {
        let top = psi.p_max();
        let lead = match mu.kind {
            SpaceKind::Probability => d.sup().ln(),
            SpaceKind::TruncatedInfinite => {
                d.sup().ln().max(d.ln_lp(a)) + mu.total_mass.max(1.0).ln() / top
            }
        };
        let tail = lead - psi.psi().evaluate(top)?.ln();
        if tail > m.value {
            return Err(Error::TailUncertain {
                tail_bound: tail.exp(),
                attained: m.value.exp(),
            });
        }
    }
    Ok(m.value.exp())
}

/// `inf_{v > 0} (1 + sum w N(v |f|)) / v`, minimized over `ln v`.
pub fn orlicz_norm_amemiya(
    f: &SampledFunction,
    mu: &DiscreteMeasureSpace,
    n: &OrliczFunction,
) -> Result<f64> {
    let d = Distribution::of(f, mu)?;
    if d.is_zero() {
        return Ok(0.0);
    }
    let neg_f = |t: f64| -> Result<f64> {
        let v = t.exp();
        Ok(-(1.0 + d.modular(n, v)?) / v)
    };
    let (lo, hi) = (1e-12f64.ln(), 1e12f64.ln());
    // centre the bracket on 1/sup|f| and widen it geometrically
    let centre = (-d.sup().ln()).clamp(lo, hi);
    let mut half = 1.0;
    loop {
        let (l, r) = ((centre - half).max(lo), (centre + half).min(hi));
        let m = maximize_on_grid(&neg_f, &linear_grid(l, r, 33), 200)?;
        let pinned_left = m.at_first && l > lo;
        let pinned_right = m.at_last && r < hi;
        if !(pinned_left || pinned_right) {
            if (m.at_first && l <= lo) || (m.at_last && r >= hi) {
                return Err(Error::BracketFailure { best: -m.value });
            }
            return Ok(-m.value);
        }
        half *= 4.0;
    }
}

/// `inf {k > 0 : sum w N(|f| / k) <= 1}` by bisection on `ln k`.
pub fn luxemburg_norm(
    f: &SampledFunction,
    mu: &DiscreteMeasureSpace,
    n: &OrliczFunction,
) -> Result<f64> {
    let d = Distribution::of(f, mu)?;
    if d.is_zero() {
        return Ok(0.0);
    }
    let modular = |k: f64| d.modular(n, 1.0 / k);
    let mut hi = d.sup();
    while modular(hi)? > 1.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidInput("Luxemburg bracket overflow".into()));
        }
    }
    let mut lo = hi;
    while modular(lo)? <= 1.0 {
        hi = lo;
        lo *= 0.5;
        if lo == 0.0 {
            return Ok(hi);
        }
    }
    // invariant: modular(lo) > 1 >= modular(hi)
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// GLS norm against the Luxemburg norm of the forward Young function, one
/// row per suite member.
pub fn equivalence_report(
    suite: &[SampledFunction],
    mu: &DiscreteMeasureSpace,
    psi: &GeneratingFunction,
) -> Result<ComparisonReport> {
    if suite.is_empty() {
        return Ok(ComparisonReport::new(["id", "gls", "orlicz"], Vec::new()));
    }
    let fw = ForwardPipeline::new(psi)?;
    Ok(equivalence_report_with(suite, mu, psi, fw.orlicz()))
}

/// As [`equivalence_report`] with an explicit Young function.
pub fn equivalence_report_with(
    suite: &[SampledFunction],
    mu: &DiscreteMeasureSpace,
    psi: &GeneratingFunction,
    n: &OrliczFunction,
) -> ComparisonReport {
    let rows = suite
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let id = i as f64;
            match gls_norm(f, mu, psi).and_then(|g| Ok((g, luxemburg_norm(f, mu, n)?))) {
                Ok((g, l)) => ComparisonRow::valid(id, g, l),
                Err(e) => ComparisonRow::invalid(id, e),
            }
        })
        .collect();
    ComparisonReport::new(["id", "gls", "orlicz"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gls_core::fundamental_direct;

    fn quad() -> OrliczFunction {
        OrliczFunction::power(2.0).unwrap()
    }

    #[test]
    fn lp_examples() {
        let mu = DiscreteMeasureSpace::probability(10_000).unwrap();
        let ind = mu.indicator(0.25).unwrap();
        assert!((lp_norm(&ind, &mu, 2.0).unwrap() - 0.5).abs() < 1e-12);
        let c = SampledFunction::constant(-3.0, &mu).unwrap();
        for p in [1.0, 2.5, 40.0] {
            assert!((lp_norm(&c, &mu, p).unwrap() - 3.0).abs() < 1e-12);
        }
        let mu = DiscreteMeasureSpace::from_weights(vec![0.5, 0.25, 0.25], SpaceKind::Probability)
            .unwrap();
        let f = SampledFunction::new(vec![1.0, -2.0, 4.0]).unwrap();
        assert!((lp_norm(&f, &mu, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(lp_norm(&f, &mu, 0.5).is_err());
    }

    #[test]
    fn gls_examples() {
        let mu = DiscreteMeasureSpace::probability(10_000).unwrap();
        let one = SampledFunction::constant(1.0, &mu).unwrap();
        let sqrt = GeneratingFunction::power(2.0).unwrap();
        assert!((gls_norm(&one, &mu, &sqrt).unwrap() - 1.0).abs() < 1e-12);
        let grand = GeneratingFunction::grand(1.0, 2.0).unwrap();
        assert!((gls_norm(&one, &mu, &grand).unwrap() - 1.0).abs() < 1e-12);
        for d in [0.9, 0.5, 0.1, 0.01] {
            let ind = mu.indicator(d).unwrap();
            let g = gls_norm(&ind, &mu, &sqrt).unwrap();
            let phi = fundamental_direct(&sqrt, d).unwrap();
            assert!((g / phi - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn amemiya_and_luxemburg_with_quadratic() {
        let mu = DiscreteMeasureSpace::from_weights(vec![0.5, 0.25, 0.25], SpaceKind::Probability)
            .unwrap();
        let f = SampledFunction::new(vec![1.0, -2.0, 4.0]).unwrap();
        let l2 = lp_norm(&f, &mu, 2.0).unwrap();
        assert!((orlicz_norm_amemiya(&f, &mu, &quad()).unwrap() - 2.0 * l2).abs() < 1e-12);
        assert!((luxemburg_norm(&f, &mu, &quad()).unwrap() - l2).abs() < 1e-12);
        let z = SampledFunction::new(vec![0.0; 3]).unwrap();
        assert_eq!(orlicz_norm_amemiya(&z, &mu, &quad()).unwrap(), 0.0);
        assert_eq!(luxemburg_norm(&z, &mu, &quad()).unwrap(), 0.0);
    }

    #[test]
    fn luxemburg_of_constant() {
        let mu = DiscreteMeasureSpace::probability(100).unwrap();
        let n = OrliczFunction::from_fn("u^3+u^2", |u: f64| Ok(u.powi(3) + u * u)).unwrap();
        let c = SampledFunction::constant(5.0, &mu).unwrap();
        let k = luxemburg_norm(&c, &mu, &n).unwrap();
        assert!((k - 5.0 / n.inverse(1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn truncated_space_masses() {
        let mu = DiscreteMeasureSpace::truncated_infinite(10_000, 1e3).unwrap();
        assert!((mu.total_mass() / 1e3 - 1.0).abs() < 1e-9);
        assert!(mu.weights().windows(2).all(|w| w[1] > w[0]));
        for d in [0.5, 1.0, 10.0] {
            let m = mu.support_mass(&mu.indicator(d).unwrap());
            assert!((m / d - 1.0).abs() < 1e-3, "{d}: {m}");
        }
        let sqrt = GeneratingFunction::power(2.0).unwrap();
        let ind = mu.indicator(10.0).unwrap();
        let d = mu.support_mass(&ind);
        let g = gls_norm(&ind, &mu, &sqrt).unwrap();
        assert!((g / fundamental_direct(&sqrt, d).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn csv_space_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "weight,value\n0.5,1\n0.5,-3\n").unwrap();
        let (mu, f) = load_weighted_csv(&path).unwrap();
        assert_eq!(mu.kind(), SpaceKind::Probability);
        assert!((lp_norm(&f, &mu, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(load_weighted_csv(&dir.path().join("missing.csv"))
            .unwrap_err()
            .is_io());
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let mu = DiscreteMeasureSpace::probability(10).unwrap();
        let r = equivalence_report(&[], &mu, &GeneratingFunction::power(2.0).unwrap()).unwrap();
        assert!(r.rows.is_empty());
    }
}
