//! Composite Simpson quadrature and cumulative anti-derivatives.
//!
//! [`cumulative_simpson`] follows the usual "add one sample at a time"
//! scheme for pre-sampled data: even nodes carry the plain composite sum,
//! odd nodes add a quadratic half-panel correction.

/// Default subdivision density for x- and theta-anti-derivatives.
pub const PANELS_PER_UNIT: f64 = 512.0;

/// Composite Simpson rule over equally spaced samples `y` with spacing `dx`.
///
/// An even number of samples (odd number of intervals) gets a quadratic
/// correction for the last interval.
pub fn simpson(y: &[f64], dx: f64) -> f64 {
    debug_assert!(y.len() >= 3);
    let n = y.len() - 1;
    let mut sum = 0.0;
    for i in 0..n / 2 {
        sum += y[2 * i] + 4.0 * y[2 * i + 1] + y[2 * i + 2];
    }
    if !n.is_multiple_of(2) {
        sum += 1.25 * y[n] + 2.0 * y[n - 1] - 0.25 * y[n - 2];
    }
    dx / 3.0 * sum
}

/// Integrates `f` over `[a, b]` with `panels` Simpson panels (rounded up to even).
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Running integral of `y`, one value per sample, starting from 0.
///
/// `dx` may be negative, which integrates towards decreasing abscissae.
pub fn cumulative_simpson(y: &[f64], dx: f64) -> Vec<f64> {
    let n = y.len();
    let mut res = vec![0.0; n];
    match n {
        0 | 1 => return res,
        2 => {
            res[1] = 0.5 * dx * (y[0] + y[1]);
            return res;
        }
        _ => {}
    }
    for i in 1..n.div_ceil(2) {
        res[2 * i - 1] =
            res[2 * i - 2] + dx / 3.0 * (1.25 * y[2 * i - 2] + 2.0 * y[2 * i - 1] - 0.25 * y[2 * i]);
        res[2 * i] =
            res[2 * i - 1] + dx / 3.0 * (1.25 * y[2 * i] + 2.0 * y[2 * i - 1] - 0.25 * y[2 * i - 2]);
    }
    if n.is_multiple_of(2) {
        res[n - 1] = res[n - 2] + dx / 3.0 * (1.25 * y[n - 1] + 2.0 * y[n - 2] - 0.25 * y[n - 3]);
    }
    res
}

/// Tabulated anti-derivative `F(x) = ∫_{base}^{x} f` on a uniform node grid.
///
/// Consecutive nodes are joined by one Simpson panel (with its own midpoint
/// sample) and `eval` completes the value between nodes with the same rule,
/// so `F` is continuous and can be finite-differenced.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    base: f64,
    h: f64,
    /// Node index (relative to `base`) of `values[0]`.
    first: i64,
    samples: Vec<f64>,
    values: Vec<f64>,
}

fn panel(f0: f64, fm: f64, f1: f64, width: f64) -> f64 {
    width / 6.0 * (f0 + 4.0 * fm + f1)
}

impl Antiderivative {
    /// Tabulates the anti-derivative of `f` over nodes covering `[lo, hi]`
    /// (and `base`). Returns the offending abscissa if `f` is not finite.
    pub fn build(
        f: impl Fn(f64) -> f64,
        base: f64,
        lo: f64,
        hi: f64,
        panels_per_unit: f64,
    ) -> Result<Self, f64> {
        let h = 1.0 / panels_per_unit;
        let lo = lo.min(base);
        let hi = hi.max(base);
        let j_lo = ((lo - base) / h).floor() as i64 - 1;
        let j_hi = ((hi - base) / h).ceil() as i64 + 1;

        let sample = |x: f64| {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(x)
            }
        };
        let node = |j: i64| base + j as f64 * h;

        let n = (j_hi - j_lo + 1) as usize;
        let zero = (-j_lo) as usize;
        let mut samples = vec![0.0; n];
        let mut values = vec![0.0; n];
        for (k, s) in samples.iter_mut().enumerate() {
            *s = sample(node(j_lo + k as i64))?;
        }
        for k in zero + 1..n {
            let x0 = node(j_lo + k as i64 - 1);
            let mid = sample(x0 + 0.5 * h)?;
            values[k] = values[k - 1] + panel(samples[k - 1], mid, samples[k], h);
        }
        for k in (0..zero).rev() {
            let x0 = node(j_lo + k as i64);
            let mid = sample(x0 + 0.5 * h)?;
            values[k] = values[k + 1] - panel(samples[k], mid, samples[k + 1], h);
        }

        Ok(Antiderivative {
            base,
            h,
            first: j_lo,
            samples,
            values,
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Node spacing.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// `F(x)`. `f` must be the integrand the table was built from.
    pub fn eval(&self, x: f64, f: impl Fn(f64) -> f64) -> f64 {
        let last = self.first + self.values.len() as i64 - 1;
        let j = (((x - self.base) / self.h).floor() as i64).clamp(self.first, last);
        let k = (j - self.first) as usize;
        let xj = self.base + j as f64 * self.h;
        let delta = x - xj;
        if delta == 0.0 {
            return self.values[k];
        }
        if delta.abs() <= self.h {
            return self.values[k] + panel(self.samples[k], f(xj + 0.5 * delta), f(x), delta);
        }
        // Outside the table: plain composite rule from the nearest node.
        let panels = (delta.abs() / self.h).ceil() as usize;
        self.values[k] + simpson_fn(&f, xj, x, panels)
    }
}
