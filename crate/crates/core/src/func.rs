//! One-variable functions with derivatives.
//!
//! [`YFunction`] is the currency for every coefficient that depends on the
//! transverse coordinate: `c1(y)`, `c2(y)`, the gauge functions `k(y)` and
//! `h(y)`, the invariants `zeta1`, `zeta2` and the generating-curve
//! components. It is cheap to clone and safe to share between threads.

use std::fmt;
use std::sync::Arc;

use crate::expr::Expr;
use crate::quad::Antiderivative;

/// Relative step for first-derivative central differences.
pub const FD_STEP: f64 = 1e-5;
/// Relative step for second-derivative central differences. Larger than
/// [`FD_STEP`] because the second difference divides by `h^2`.
pub const FD_STEP2: f64 = 1e-4;

fn fd_scale(t: f64) -> f64 {
    t.abs().max(1.0)
}

/// A real function of one variable with first and second derivatives.
///
/// The default derivatives are central differences; implementors with
/// closed forms should override them.
pub trait ScalarFn: Send + Sync {
    fn eval(&self, t: f64) -> f64;

    fn d1(&self, t: f64) -> f64 {
        let h = FD_STEP * fd_scale(t);
        (self.eval(t + h) - self.eval(t - h)) / (2.0 * h)
    }

    fn d2(&self, t: f64) -> f64 {
        let h = FD_STEP2 * fd_scale(t);
        (self.eval(t + h) - 2.0 * self.eval(t) + self.eval(t - h)) / (h * h)
    }
}

struct Constant(f64);

impl ScalarFn for Constant {
    fn eval(&self, _: f64) -> f64 {
        self.0
    }
    fn d1(&self, _: f64) -> f64 {
        0.0
    }
    fn d2(&self, _: f64) -> f64 {
        0.0
    }
}

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Closures {
    f: Fn1,
    df: Option<Fn1>,
    ddf: Option<Fn1>,
}

impl ScalarFn for Closures {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn d1(&self, t: f64) -> f64 {
        match &self.df {
            Some(df) => df(t),
            None => {
                let h = FD_STEP * fd_scale(t);
                ((self.f)(t + h) - (self.f)(t - h)) / (2.0 * h)
            }
        }
    }

    fn d2(&self, t: f64) -> f64 {
        match (&self.ddf, &self.df) {
            (Some(ddf), _) => ddf(t),
            (None, Some(df)) => {
                let h = FD_STEP * fd_scale(t);
                (df(t + h) - df(t - h)) / (2.0 * h)
            }
            (None, None) => {
                let h = FD_STEP2 * fd_scale(t);
                ((self.f)(t + h) - 2.0 * (self.f)(t) + (self.f)(t - h)) / (h * h)
            }
        }
    }
}

struct ExprFn {
    var: String,
    f: Expr,
    df: Expr,
    ddf: Expr,
}

impl ExprFn {
    fn at(&self, e: &Expr, t: f64) -> f64 {
        e.eval_var(&self.var, t).unwrap_or(f64::NAN)
    }
}

impl ScalarFn for ExprFn {
    fn eval(&self, t: f64) -> f64 {
        self.at(&self.f, t)
    }
    fn d1(&self, t: f64) -> f64 {
        self.at(&self.df, t)
    }
    fn d2(&self, t: f64) -> f64 {
        self.at(&self.ddf, t)
    }
}

struct Integral {
    integrand: Fn1,
    integrand_d1: Option<Fn1>,
    table: Antiderivative,
    offset: f64,
}

impl ScalarFn for Integral {
    fn eval(&self, t: f64) -> f64 {
        self.offset + self.table.eval(t, &*self.integrand)
    }
    fn d1(&self, t: f64) -> f64 {
        (self.integrand)(t)
    }
    fn d2(&self, t: f64) -> f64 {
        if let Some(d) = &self.integrand_d1 {
            return d(t);
        }
        let h = FD_STEP * fd_scale(t);
        ((self.integrand)(t + h) - (self.integrand)(t - h)) / (2.0 * h)
    }
}

/// Shared handle to a [`ScalarFn`].
#[derive(Clone)]
pub struct YFunction(Arc<dyn ScalarFn>);

impl fmt::Debug for YFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("YFunction(..)")
    }
}

impl YFunction {
    pub fn new(f: impl ScalarFn + 'static) -> Self {
        YFunction(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Constant(c))
    }

    /// Function without closed-form derivatives (central differences are used).
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Closures {
            f: Arc::new(f),
            df: None,
            ddf: None,
        })
    }

    pub fn from_fns(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(Closures {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            ddf: None,
        })
    }

    pub fn from_fns2(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(Closures {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
            ddf: Some(Arc::new(ddf)),
        })
    }

    /// Wraps an expression in the single free variable `var`; derivatives
    /// are symbolic.
    pub fn from_expr(e: &Expr, var: &str) -> Self {
        let df = e.derivative(var);
        let ddf = df.derivative(var);
        Self::new(ExprFn {
            var: var.to_string(),
            f: e.clone(),
            df,
            ddf,
        })
    }

    /// `t ↦ value_at_base + ∫_{base}^{t} integrand`, tabulated over `[lo, hi]`.
    ///
    /// Fails with the offending abscissa if the integrand is not finite
    /// somewhere on the table.
    pub fn antiderivative(
        integrand: impl Fn(f64) -> f64 + Send + Sync + 'static,
        base: f64,
        value_at_base: f64,
        lo: f64,
        hi: f64,
        panels_per_unit: f64,
    ) -> Result<Self, f64> {
        let integrand: Fn1 = Arc::new(integrand);
        let table = Antiderivative::build(&*integrand, base, lo, hi, panels_per_unit)?;
        Ok(Self::new(Integral {
            integrand,
            integrand_d1: None,
            table,
            offset: value_at_base,
        }))
    }

    /// Like [`YFunction::antiderivative`] with an integrand that carries its
    /// own derivative, so the second derivative stays exact.
    pub fn integral_of(
        integrand: YFunction,
        base: f64,
        value_at_base: f64,
        lo: f64,
        hi: f64,
        panels_per_unit: f64,
    ) -> Result<Self, f64> {
        let (f, df) = (integrand.clone(), integrand);
        let integrand: Fn1 = Arc::new(move |t| f.eval(t));
        let table = Antiderivative::build(&*integrand, base, lo, hi, panels_per_unit)?;
        Ok(Self::new(Integral {
            integrand,
            integrand_d1: Some(Arc::new(move |t| df.d1(t))),
            table,
            offset: value_at_base,
        }))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.0.d1(t)
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.0.d2(t)
    }
}

impl ScalarFn for YFunction {
    fn eval(&self, t: f64) -> f64 {
        self.0.eval(t)
    }
    fn d1(&self, t: f64) -> f64 {
        self.0.d1(t)
    }
    fn d2(&self, t: f64) -> f64 {
        self.0.d2(t)
    }
}

impl From<f64> for YFunction {
    fn from(c: f64) -> Self {
        YFunction::constant(c)
    }
}

/// Solves `f(t) = target` for an increasing or decreasing `f` on `[lo, hi]`
/// using Newton steps safeguarded by bisection.
pub fn invert_monotone(f: &YFunction, target: f64, lo: f64, hi: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let g = |t: f64| f.eval(t) - target;
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if glo.signum() == ghi.signum() {
        return None;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gt = g(t);
        if gt == 0.0 {
            return Some(t);
        }
        if gt.signum() == glo.signum() {
            lo = t;
            glo = gt;
        } else {
            hi = t;
        }
        let slope = f.d1(t);
        let newton = t - gt / slope;
        t = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) || gt.abs() <= 1e-15 {
            return Some(t);
        }
    }
    Some(t)
}
