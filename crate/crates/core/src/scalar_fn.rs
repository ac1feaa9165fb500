//! One-dimensional real functions on intervals.
//!
//! [`ScalarFunction`] is the carrier for every function that appears in the
//! crate: generating functions, the inverse map `nu`, conjugates, Young
//! functions and the exponents `W`. A function is either a closed-form
//! catalog member, a monotone tabulation, a scaled copy of another function,
//! the inverse of another function, or an arbitrary derived closure.
//!
//! Values outside the domain are either `+inf` (extended-value semantics) or
//! an error, depending on [`OutsideValue`].

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::csvio::Table;
use crate::error::{Error, Result};
use crate::optimize::scan_grid;

/// Truncation point used for scans and grids on infinite domains.
pub const DEFAULT_P_MAX: f64 = 1e4;
/// Default relative tolerance of [`ScalarFunction::invert_monotone`].
pub const DEFAULT_TOL: f64 = 1e-10;
/// Number of points of the monotonicity scan behind inversion.
pub const MONOTONE_SCAN_POINTS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Concave,
    Unknown,
}

/// What [`ScalarFunction::evaluate`] returns outside the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutsideValue {
    PosInfinity,
    Undefined,
}

/// Interpolation rule between tabulation knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// Linear in `(ln x, ln y)`; needs positive abscissae and values.
    LogLog,
}

/// Closed-form catalog members.
#[derive(Clone, Debug, PartialEq)]
pub enum Catalog {
    /// `x^(1/m)`.
    Power { m: f64 },
    /// `(b - x)^(-beta)`.
    Grand { beta: f64, b: f64 },
    /// `slope * x + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `a x^2 + b x + c`.
    Quadratic { a: f64, b: f64, c: f64 },
    /// `scale * exp(rate * x)`.
    Exponential { scale: f64, rate: f64 },
}

impl Catalog {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Catalog::Power { m } => x.powf(1.0 / m),
            Catalog::Grand { beta, b } => {
                if x >= b {
                    f64::INFINITY
                } else {
                    (b - x).powf(-beta)
                }
            }
            Catalog::Affine { slope, intercept } => slope * x + intercept,
            Catalog::Quadratic { a, b, c } => (a * x + b) * x + c,
            Catalog::Exponential { scale, rate } => scale * (rate * x).exp(),
        }
    }

    /// Leading term `coeff * x^exponent` as `x -> inf`.
    fn growth(&self) -> Option<(f64, f64)> {
        match *self {
            Catalog::Power { m } => Some((1.0 / m, 1.0)),
            Catalog::Grand { .. } => None,
            Catalog::Affine { slope, intercept } => Some(if slope != 0.0 {
                (1.0, slope)
            } else {
                (0.0, intercept)
            }),
            Catalog::Quadratic { a, b, c } => Some(if a != 0.0 {
                (2.0, a)
            } else if b != 0.0 {
                (1.0, b)
            } else {
                (0.0, c)
            }),
            Catalog::Exponential { scale, rate } => Some(if rate > 0.0 {
                (f64::INFINITY, scale)
            } else {
                (0.0, if rate == 0.0 { scale } else { 0.0 })
            }),
        }
    }

    fn default_domain(&self) -> (f64, f64) {
        match *self {
            Catalog::Grand { b, .. } => (1.0, b),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn default_shape(&self) -> (Monotonicity, Convexity) {
        use Convexity as C;
        use Monotonicity as M;
        match *self {
            Catalog::Power { m } if m > 0.0 => {
                (M::Increasing, if m <= 1.0 { C::Convex } else { C::Concave })
            }
            Catalog::Power { .. } => (M::Decreasing, C::Convex),
            Catalog::Grand { beta, .. } if beta > 0.0 => (M::Increasing, C::Convex),
            Catalog::Grand { .. } => (M::Unknown, C::Unknown),
            Catalog::Affine { slope, .. } => (
                if slope > 0.0 {
                    M::Increasing
                } else if slope < 0.0 {
                    M::Decreasing
                } else {
                    M::Unknown
                },
                C::Convex,
            ),
            Catalog::Quadratic { a, .. } => {
                (M::Unknown, if a >= 0.0 { C::Convex } else { C::Concave })
            }
            Catalog::Exponential { scale, rate } => {
                let m = if scale * rate > 0.0 {
                    M::Increasing
                } else if scale * rate < 0.0 {
                    M::Decreasing
                } else {
                    M::Unknown
                };
                (m, if scale >= 0.0 { C::Convex } else { C::Concave })
            }
        }
    }
}

/// Strictly increasing abscissae with values and an interpolation rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulation {
    xs: Vec<f64>,
    ys: Vec<f64>,
    rule: Interpolation,
}

impl Tabulation {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, rule: Interpolation) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidInput(format!(
                "tabulation has {} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput(
                "a tabulation needs at least two knots".into(),
            ));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "tabulation entries must be finite".into(),
            ));
        }
        if let Some(w) = xs.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "tabulation abscissae must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        if rule == Interpolation::LogLog && xs.iter().chain(&ys).any(|&v| v <= 0.0) {
            return Err(Error::InvalidInput(
                "log-log interpolation needs positive abscissae and values".into(),
            ));
        }
        Ok(Tabulation { xs, ys, rule })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn rule(&self) -> Interpolation {
        self.rule
    }

    /// Index `i` with `xs[i] <= x <= xs[i + 1]`; `x` must be inside.
    fn segment(&self, x: f64) -> usize {
        let i = self.xs.partition_point(|&v| v <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    fn lerp(rule: Interpolation, x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        match rule {
            Interpolation::Linear => {
                if x == x0 {
                    y0
                } else if x == x1 {
                    y1
                } else {
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
            Interpolation::LogLog => {
                if x == x0 {
                    y0
                } else if x == x1 {
                    y1
                } else {
                    let t = (x / x0).ln() / (x1 / x0).ln();
                    (y0.ln() + t * (y1 / y0).ln()).exp()
                }
            }
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        Self::lerp(
            self.rule,
            x,
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.ys[i + 1],
        )
    }

    /// Exact inversion of the interpolation rule; the values must be
    /// strictly monotone.
    fn invert(&self, z: f64) -> Result<f64> {
        let n = self.ys.len();
        let increasing = self.ys[n - 1] > self.ys[0];
        let (lo, hi) = if increasing {
            (self.ys[0], self.ys[n - 1])
        } else {
            (self.ys[n - 1], self.ys[0])
        };
        if !(z >= lo && z <= hi) {
            return Err(Error::OutOfRange { z, lo, hi });
        }
        let i = if increasing {
            self.ys.partition_point(|&v| v <= z)
        } else {
            self.ys.partition_point(|&v| v >= z)
        }
        .clamp(1, n - 1)
            - 1;
        // swap the roles of x and y
        Ok(Self::lerp(
            self.rule,
            z,
            self.ys[i],
            self.ys[i + 1],
            self.xs[i],
            self.xs[i + 1],
        ))
    }
}

type DerivedFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

#[derive(Clone)]
enum Body {
    Catalog(Catalog),
    Tabulated(Tabulation),
    Scaled {
        factor: f64,
        inner: Arc<ScalarFunction>,
    },
    Inverse(Arc<ScalarFunction>),
    Derived {
        label: String,
        eval: Arc<DerivedFn>,
    },
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Catalog(c) => write!(f, "{c:?}"),
            Body::Tabulated(t) => write!(f, "Tabulated({} knots, {:?})", t.xs.len(), t.rule),
            Body::Scaled { factor, inner } => write!(f, "Scaled({factor} * {:?})", inner.body),
            Body::Inverse(inner) => write!(f, "Inverse({:?})", inner.body),
            Body::Derived { label, .. } => write!(f, "Derived({label})"),
        }
    }
}

/// Outcome of a monotonicity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneReport {
    pub ok: bool,
    /// Direction that was tested.
    pub direction: Monotonicity,
    /// Smallest signed step `f(x_{i+1}) - f(x_i)` in the tested direction.
    pub worst_margin: f64,
    pub worst_at: f64,
    /// Left end of the first non-strict step, if any.
    pub first_violation_at: Option<f64>,
}

impl MonotoneReport {
    fn into_error(self) -> Error {
        Error::NotMonotone {
            worst_margin: self.worst_margin,
            worst_at: self.worst_at,
            first_at: self.first_violation_at.unwrap_or(self.worst_at),
        }
    }
}

/// A real function on `[domain_lo, domain_hi]` (upper end possibly `+inf`)
/// with declared shape metadata.
#[derive(Clone, Debug)]
pub struct ScalarFunction {
    lo: f64,
    hi: f64,
    body: Body,
    monotonicity: Monotonicity,
    convexity: Convexity,
    outside: OutsideValue,
    p_max: f64,
    scan: OnceLock<MonotoneReport>,
}

impl ScalarFunction {
    fn from_parts(
        lo: f64,
        hi: f64,
        body: Body,
        monotonicity: Monotonicity,
        convexity: Convexity,
    ) -> Result<Self> {
        if !(lo.is_finite() && lo < hi) || hi.is_nan() {
            return Err(Error::InvalidInput(format!(
                "domain [{lo}, {hi}] must satisfy finite lo < hi"
            )));
        }
        Ok(ScalarFunction {
            lo,
            hi,
            body,
            monotonicity,
            convexity,
            outside: OutsideValue::Undefined,
            p_max: DEFAULT_P_MAX,
            scan: OnceLock::new(),
        })
    }

    pub fn catalog(c: Catalog) -> Self {
        let (lo, hi) = c.default_domain();
        let (m, cv) = c.default_shape();
        Self::from_parts(lo, hi, Body::Catalog(c), m, cv).expect("catalog default domain is valid")
    }

    /// `x^(1/m)` on `[0, inf)`.
    pub fn power(m: f64) -> Self {
        Self::catalog(Catalog::Power { m })
    }

    /// `(b - x)^(-beta)` on `[1, b]`.
    pub fn grand(beta: f64, b: f64) -> Self {
        Self::catalog(Catalog::Grand { beta, b })
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::catalog(Catalog::Affine { slope, intercept })
    }

    pub fn quadratic(a: f64, b: f64, c: f64) -> Self {
        Self::catalog(Catalog::Quadratic { a, b, c })
    }

    pub fn exponential(scale: f64, rate: f64) -> Self {
        Self::catalog(Catalog::Exponential { scale, rate })
    }

    /// Tabulation on `[xs[0], xs[n-1]]`. Shape tags are set only when the
    /// knots confirm them.
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>, rule: Interpolation) -> Result<Self> {
        let t = Tabulation::new(xs, ys, rule)?;
        let (lo, hi) = (t.xs[0], t.xs[t.xs.len() - 1]);
        let m = knot_monotonicity(&t.ys);
        let c = knot_convexity(&t.xs, &t.ys);
        Self::from_parts(lo, hi, Body::Tabulated(t), m, c)
    }

    /// Arbitrary function given by a closure.
    pub fn derived<F>(label: impl Into<String>, lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self::from_parts(
            lo,
            hi,
            Body::Derived {
                label: label.into(),
                eval: Arc::new(f),
            },
            Monotonicity::Unknown,
            Convexity::Unknown,
        )
    }

    /// `factor * inner`.
    pub fn scaled(factor: f64, inner: ScalarFunction) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        let (lo, hi) = inner.domain();
        let (m, c) = (inner.monotonicity, inner.convexity);
        let mut f = Self::from_parts(
            lo,
            hi,
            Body::Scaled {
                factor,
                inner: Arc::new(inner.clone()),
            },
            m,
            c,
        )?;
        f.p_max = inner.p_max;
        Ok(f)
    }

    /// The inverse function of a strictly increasing `inner`, defined on the
    /// range `[inner(lo), inner(hi)]` (upper end `+inf` when `inner`'s domain
    /// is unbounded) and `+inf` elsewhere.
    pub fn inverse_of(inner: ScalarFunction) -> Result<Self> {
        let rep = inner.verified_monotone()?;
        if rep.direction != Monotonicity::Increasing {
            return Err(Error::InvalidInput(
                "inverse_of expects an increasing function".into(),
            ));
        }
        let (lo, hi) = inner.domain();
        let r_lo = inner.evaluate(lo)?;
        let r_hi = if hi.is_finite() {
            inner.evaluate(hi)?
        } else {
            f64::INFINITY
        };
        let conv = match inner.convexity {
            Convexity::Convex => Convexity::Concave,
            Convexity::Concave => Convexity::Convex,
            Convexity::Unknown => Convexity::Unknown,
        };
        let p_max = inner.p_max;
        let mut f = Self::from_parts(
            r_lo,
            r_hi,
            Body::Inverse(Arc::new(inner)),
            Monotonicity::Increasing,
            conv,
        )?;
        f.outside = OutsideValue::PosInfinity;
        f.p_max = p_max;
        Ok(f)
    }

    /// Restricts (or widens) the domain.
    pub fn on(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && lo < hi) || hi.is_nan() {
            return Err(Error::InvalidInput(format!(
                "domain [{lo}, {hi}] must satisfy finite lo < hi"
            )));
        }
        self.lo = lo;
        self.hi = hi;
        self.scan = OnceLock::new();
        Ok(self)
    }

    pub fn with_monotonicity(mut self, m: Monotonicity) -> Self {
        self.monotonicity = m;
        self.scan = OnceLock::new();
        self
    }

    pub fn with_convexity(mut self, c: Convexity) -> Self {
        self.convexity = c;
        self
    }

    pub fn with_outside(mut self, o: OutsideValue) -> Self {
        self.outside = o;
        self
    }

    pub fn with_p_max(mut self, p_max: f64) -> Self {
        self.p_max = p_max;
        self.scan = OnceLock::new();
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    pub fn outside_value(&self) -> OutsideValue {
        self.outside
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Upper end used by scans: `domain_hi`, or `P_max` on infinite domains.
    pub fn scan_hi(&self) -> f64 {
        if self.hi.is_finite() {
            self.hi
        } else {
            self.p_max.max(self.lo + 1.0)
        }
    }

    pub fn catalog_form(&self) -> Option<&Catalog> {
        match &self.body {
            Body::Catalog(c) => Some(c),
            _ => None,
        }
    }

    pub fn tabulation(&self) -> Option<&Tabulation> {
        match &self.body {
            Body::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    /// The function this one inverts, if it was built by [`Self::inverse_of`].
    pub fn inverse_source(&self) -> Option<&ScalarFunction> {
        match &self.body {
            Body::Inverse(inner) => Some(inner),
            _ => None,
        }
    }

    /// Leading growth `(exponent, coefficient)` at `+inf`, known for catalog
    /// forms and their scalings only.
    pub fn growth(&self) -> Option<(f64, f64)> {
        if self.hi.is_finite() {
            return None;
        }
        match &self.body {
            Body::Catalog(c) => c.growth(),
            Body::Scaled { factor, inner } => inner.growth().map(|(e, c)| (e, c * factor)),
            _ => None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi && x.is_finite()
    }

    /// `f(x)`, or the outside value when `x` is not in the domain.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return match self.outside {
                OutsideValue::PosInfinity if !x.is_nan() => Ok(f64::INFINITY),
                _ => Err(Error::Domain {
                    x,
                    lo: self.lo,
                    hi: self.hi,
                }),
            };
        }
        match &self.body {
            Body::Catalog(c) => Ok(c.eval(x)),
            Body::Tabulated(t) => Ok(t.eval(x)),
            Body::Scaled { factor, inner } => Ok(factor * inner.evaluate(x)?),
            Body::Inverse(inner) => match inner.invert_monotone(x, DEFAULT_TOL) {
                Err(Error::OutOfRange { .. }) => Ok(f64::INFINITY),
                r => r,
            },
            Body::Derived { eval, .. } => eval(x),
        }
    }

    /// Monotonicity scan on `n` points (log-spaced up to `P_max` on infinite
    /// domains) in the declared direction, `Increasing` when undeclared.
    pub fn check_monotone(&self, n: usize) -> Result<MonotoneReport> {
        let dir = match self.monotonicity {
            Monotonicity::Unknown => Monotonicity::Increasing,
            d => d,
        };
        self.check_monotone_dir(n, dir)
    }

    pub fn check_monotone_dir(&self, n: usize, dir: Monotonicity) -> Result<MonotoneReport> {
        if n < 2 {
            return Err(Error::InvalidInput(
                "a monotonicity scan needs n >= 2".into(),
            ));
        }
        let grid: Vec<f64> = match &self.body {
            Body::Tabulated(t) => t.xs.clone(),
            _ => scan_grid(self.lo, self.hi, self.p_max, n),
        };
        let values = grid
            .iter()
            .map(|&x| self.evaluate(x))
            .collect::<Result<Vec<f64>>>()?;
        Ok(monotone_report(&grid, &values, dir))
    }

    /// The cached 1024-point scan behind inversion; tries increasing, then
    /// decreasing when the direction is undeclared.
    fn verified_monotone(&self) -> Result<MonotoneReport> {
        if let Some(r) = self.scan.get() {
            return if r.ok {
                Ok(r.clone())
            } else {
                Err(r.clone().into_error())
            };
        }
        let mut rep = self.check_monotone(MONOTONE_SCAN_POINTS)?;
        if !rep.ok && self.monotonicity == Monotonicity::Unknown {
            let dec = self.check_monotone_dir(MONOTONE_SCAN_POINTS, Monotonicity::Decreasing)?;
            if dec.ok {
                rep = dec;
            }
        }
        let rep = self.scan.get_or_init(|| rep).clone();
        if rep.ok {
            Ok(rep)
        } else {
            Err(rep.into_error())
        }
    }

    /// Returns `x` with `|f(x) - z| <= tol * max(1, |z|)`. Tabulations are
    /// inverted exactly through their interpolation rule; everything else by
    /// bracketing bisection (the bracket is expanded past `P_max` on infinite
    /// domains).
    pub fn invert_monotone(&self, z: f64, tol: f64) -> Result<f64> {
        if z.is_nan() {
            return Err(Error::InvalidInput("cannot invert at NaN".into()));
        }
        let rep = self.verified_monotone()?;
        if let Body::Tabulated(t) = &self.body {
            return t.invert(z);
        }
        let sign = if rep.direction == Monotonicity::Decreasing {
            -1.0
        } else {
            1.0
        };
        let g = |x: f64| -> Result<f64> { Ok(sign * self.evaluate(x)?) };
        let target = sign * z;
        let mut a = self.lo;
        let ga = g(a)?;
        let mut b = self.scan_hi();
        let mut gb = g(b)?;
        if !self.hi.is_finite() {
            while gb < target && b < 1e300 && gb.is_finite() {
                b = if b > 0.0 { b * 2.0 } else { 1.0 };
                gb = g(b)?;
            }
        }
        let (r_lo, r_hi) = if sign > 0.0 { (ga, gb) } else { (-gb, -ga) };
        if !(target >= ga && target <= gb) {
            return Err(Error::OutOfRange {
                z,
                lo: r_lo,
                hi: r_hi,
            });
        }
        let eps = tol * z.abs().max(1.0);
        if (ga - target).abs() <= eps {
            return Ok(a);
        }
        if (gb - target).abs() <= eps {
            return Ok(b);
        }
        for _ in 0..2000 {
            let m = if a > 0.0 && b > 4.0 * a {
                (a * b).sqrt()
            } else {
                0.5 * (a + b)
            };
            if m <= a || m >= b {
                break;
            }
            let gm = g(m)?;
            if (gm - target).abs() <= eps {
                return Ok(m);
            }
            if gm < target {
                a = m;
            } else {
                b = m;
            }
        }
        // bracket collapsed to adjacent floats: the closer end wins
        let (da, db) = ((g(a)? - target).abs(), (g(b)? - target).abs());
        Ok(if da <= db { a } else { b })
    }

    /// Tabulation of `f` on `grid` (strictly increasing, inside the domain).
    pub fn tabulate(&self, grid: &[f64]) -> Result<ScalarFunction> {
        self.tabulate_with(grid, Interpolation::Linear)
    }

    pub fn tabulate_with(&self, grid: &[f64], rule: Interpolation) -> Result<ScalarFunction> {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "tabulation grid must be strictly increasing".into(),
            ));
        }
        if let Some(&x) = grid.iter().find(|&&x| !self.contains(x)) {
            return Err(Error::Domain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let ys = grid
            .iter()
            .map(|&x| self.evaluate(x))
            .collect::<Result<Vec<f64>>>()?;
        let mut t = ScalarFunction::tabulated(grid.to_vec(), ys, rule)?;
        // keep only tags that the knots confirm and that agree with the source
        if t.monotonicity != self.monotonicity {
            t.monotonicity = Monotonicity::Unknown;
        }
        if t.convexity != self.convexity {
            t.convexity = Convexity::Unknown;
        }
        t.p_max = self.p_max;
        Ok(t)
    }

    /// Saves a tabulation as CSV `x,value` with a metadata comment line.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.to_table()?.write(path)
    }

    pub fn to_table(&self) -> Result<Table> {
        let t = self
            .tabulation()
            .ok_or_else(|| Error::InvalidInput("only tabulations can be saved as CSV".into()))?;
        let mut table = Table::new(["x", "value"])
            .with_meta("monotonicity", monotonicity_name(self.monotonicity))
            .with_meta("convexity", convexity_name(self.convexity))
            .with_meta(
                "interpolation",
                match t.rule {
                    Interpolation::Linear => "linear",
                    Interpolation::LogLog => "loglog",
                },
            );
        table.rows = t.xs.iter().zip(&t.ys).map(|(x, y)| vec![*x, *y]).collect();
        Ok(table)
    }

    /// Loads a tabulation written by [`Self::save_csv`]. Declared tags are
    /// kept only if the knots confirm them.
    pub fn load_csv(path: &Path) -> Result<ScalarFunction> {
        Self::from_table(&Table::read(path)?, path)
    }

    pub fn from_table(table: &Table, path: &Path) -> Result<ScalarFunction> {
        let xs = table.column("x", path)?;
        let ys = table.column("value", path)?;
        let rule = match table.meta.get("interpolation").map(String::as_str) {
            Some("loglog") | Some("log-log") => Interpolation::LogLog,
            _ => Interpolation::Linear,
        };
        let mut f = ScalarFunction::tabulated(xs, ys, rule)?;
        if let Some(m) = table.meta.get("monotonicity") {
            let declared = parse_monotonicity(m);
            if declared != Monotonicity::Unknown && declared != f.monotonicity {
                return Err(Error::InvalidInput(format!(
                    "declared monotonicity `{m}` is not confirmed by the knots"
                )));
            }
        }
        if let Some(c) = table.meta.get("convexity") {
            if parse_convexity(c) == Convexity::Unknown {
                f.convexity = Convexity::Unknown;
            }
        }
        Ok(f)
    }
}

fn monotone_report(grid: &[f64], values: &[f64], dir: Monotonicity) -> MonotoneReport {
    let sign = if dir == Monotonicity::Decreasing {
        -1.0
    } else {
        1.0
    };
    let mut worst_margin = f64::INFINITY;
    let mut worst_at = grid[0];
    let mut first = None;
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        // overflow plateau: both ends saturated at the same infinity
        if a.is_infinite() && a == b {
            continue;
        }
        let step = sign * (b - a);
        let step = if step.is_nan() {
            f64::NEG_INFINITY
        } else {
            step
        };
        if step < worst_margin {
            worst_margin = step;
            worst_at = grid[i];
        }
        if step <= 0.0 && first.is_none() {
            first = Some(grid[i]);
        }
    }
    MonotoneReport {
        ok: first.is_none(),
        direction: dir,
        worst_margin,
        worst_at,
        first_violation_at: first,
    }
}

fn knot_monotonicity(ys: &[f64]) -> Monotonicity {
    if ys.windows(2).all(|w| w[1] > w[0]) {
        Monotonicity::Increasing
    } else if ys.windows(2).all(|w| w[1] < w[0]) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Unknown
    }
}

/// Convexity of the piecewise-linear interpolant: slopes nondecreasing.
fn knot_convexity(xs: &[f64], ys: &[f64]) -> Convexity {
    if xs.len() < 3 {
        return Convexity::Unknown;
    }
    let slopes: Vec<f64> = (0..xs.len() - 1)
        .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
        .collect();
    let tol = 1e-12 * slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    if slopes.windows(2).all(|w| w[1] >= w[0] - tol) {
        Convexity::Convex
    } else if slopes.windows(2).all(|w| w[1] <= w[0] + tol) {
        Convexity::Concave
    } else {
        Convexity::Unknown
    }
}

pub fn monotonicity_name(m: Monotonicity) -> &'static str {
    match m {
        Monotonicity::Increasing => "increasing",
        Monotonicity::Decreasing => "decreasing",
        Monotonicity::Unknown => "unknown",
    }
}

pub fn convexity_name(c: Convexity) -> &'static str {
    match c {
        Convexity::Convex => "convex",
        Convexity::Concave => "concave",
        Convexity::Unknown => "unknown",
    }
}

fn parse_monotonicity(s: &str) -> Monotonicity {
    match s {
        "increasing" => Monotonicity::Increasing,
        "decreasing" => Monotonicity::Decreasing,
        _ => Monotonicity::Unknown,
    }
}

fn parse_convexity(s: &str) -> Convexity {
    match s {
        "convex" => Convexity::Convex,
        "concave" => Convexity::Concave,
        _ => Convexity::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_catalog_members() {
        assert_eq!(ScalarFunction::power(2.0).evaluate(4.0).unwrap(), 2.0);
        assert_eq!(ScalarFunction::grand(1.0, 2.0).evaluate(1.5).unwrap(), 2.0);
        assert_eq!(
            ScalarFunction::quadratic(1.0, 0.0, 0.0)
                .evaluate(3.0)
                .unwrap(),
            9.0
        );
        assert_eq!(ScalarFunction::affine(2.0, 1.0).evaluate(3.0).unwrap(), 7.0);
    }

    #[test]
    fn outside_value_semantics() {
        let f = ScalarFunction::power(2.0).on(1.0, 10.0).unwrap();
        assert!(matches!(f.evaluate(11.0), Err(Error::Domain { .. })));
        let g = f.with_outside(OutsideValue::PosInfinity);
        assert_eq!(g.evaluate(11.0).unwrap(), f64::INFINITY);
        assert_eq!(g.evaluate(0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn invert_power() {
        let f = ScalarFunction::power(2.0).on(1.0, f64::INFINITY).unwrap();
        let x = f.invert_monotone(2.0, DEFAULT_TOL).unwrap();
        assert!((x - 4.0).abs() < 1e-9);
        // needs bracket expansion beyond P_max
        let x = f.invert_monotone(500.0, DEFAULT_TOL).unwrap();
        assert!((x - 250_000.0).abs() / 250_000.0 < 1e-9);
    }

    #[test]
    fn invert_out_of_range_reports_range() {
        let f = ScalarFunction::power(2.0).on(1.0, 10.0).unwrap();
        match f.invert_monotone(0.5, DEFAULT_TOL) {
            Err(Error::OutOfRange { lo, hi, .. }) => {
                assert_eq!(lo, 1.0);
                assert!((hi - 10f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("expected OutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn invert_tabulation_by_interpolation_rule() {
        let t = ScalarFunction::tabulated(
            vec![1.0, 2.0, 3.0],
            vec![1.0, 4.0, 9.0],
            Interpolation::Linear,
        )
        .unwrap();
        assert!((t.invert_monotone(5.0, DEFAULT_TOL).unwrap() - 2.2).abs() < 1e-15);
        let ll = ScalarFunction::tabulated(
            vec![1.0, 2.0, 4.0],
            vec![1.0, 4.0, 16.0],
            Interpolation::LogLog,
        )
        .unwrap();
        // exact for a power law
        assert!((ll.evaluate(3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((ll.invert_monotone(9.0, DEFAULT_TOL).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invert_decreasing() {
        let f = ScalarFunction::power(-1.0).on(0.5, 10.0).unwrap();
        assert_eq!(f.monotonicity(), Monotonicity::Decreasing);
        let x = f.invert_monotone(0.25, DEFAULT_TOL).unwrap();
        assert!((x - 4.0).abs() < 1e-9);
    }

    #[test]
    fn check_monotone_examples() {
        assert!(ScalarFunction::power(2.0).check_monotone(100).unwrap().ok);
        let q = ScalarFunction::quadratic(-1.0, 2.0, 0.0)
            .on(1.0, 2.0)
            .unwrap();
        let r = q.check_monotone(100).unwrap();
        assert!(!r.ok);
        assert_eq!(r.first_violation_at, Some(1.0));
        let c = ScalarFunction::tabulated(vec![1.0, 2.0], vec![1.0, 1.0], Interpolation::Linear)
            .unwrap();
        assert!(!c.check_monotone(2).unwrap().ok);
        assert!(matches!(
            c.invert_monotone(1.0, DEFAULT_TOL),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn tabulate_examples() {
        let t = ScalarFunction::power(1.0)
            .tabulate(&[1.0, 2.0, 3.0])
            .unwrap();
        assert_eq!(t.tabulation().unwrap().ys(), &[1.0, 2.0, 3.0]);
        assert_eq!(t.monotonicity(), Monotonicity::Increasing);
        let g = ScalarFunction::grand(1.0, 2.0)
            .tabulate(&[1.0, 1.5])
            .unwrap();
        assert_eq!(g.tabulation().unwrap().ys(), &[1.0, 2.0]);
        assert!(ScalarFunction::power(1.0).tabulate(&[2.0, 1.0]).is_err());
        assert!(matches!(
            ScalarFunction::grand(1.0, 2.0).tabulate(&[1.0, 3.0]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn tabulate_drops_unconfirmed_tags() {
        // sqrt is concave, but two knots cannot confirm any convexity
        let t = ScalarFunction::power(2.0).tabulate(&[1.0, 4.0]).unwrap();
        assert_eq!(t.convexity(), Convexity::Unknown);
        assert_eq!(t.monotonicity(), Monotonicity::Increasing);
    }

    #[test]
    fn single_knot_tabulation_is_rejected() {
        assert!(ScalarFunction::tabulated(vec![1.0], vec![1.0], Interpolation::Linear).is_err());
    }

    #[test]
    fn inverse_function_is_infinite_outside_range() {
        let sq = ScalarFunction::power(2.0).on(1.0, f64::INFINITY).unwrap();
        let nu = ScalarFunction::inverse_of(sq).unwrap();
        assert!((nu.evaluate(3.0).unwrap() - 9.0).abs() < 1e-8);
        assert_eq!(nu.evaluate(0.5).unwrap(), f64::INFINITY);
        assert_eq!(nu.domain().0, 1.0);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let xs = vec![0.1, 0.2, 0.7, 1.3];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.sqrt() / 3.0).collect();
        let t = ScalarFunction::tabulated(xs.clone(), ys.clone(), Interpolation::LogLog).unwrap();
        t.save_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# "));
        assert!(text.contains("x,value"));
        let back = ScalarFunction::load_csv(&path).unwrap();
        let tb = back.tabulation().unwrap();
        assert_eq!(tb.xs(), &xs[..]);
        assert_eq!(tb.ys(), &ys[..]);
        assert_eq!(tb.rule(), Interpolation::LogLog);
        assert_eq!(back.monotonicity(), Monotonicity::Increasing);
    }
}
