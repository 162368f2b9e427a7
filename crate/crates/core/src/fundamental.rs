//! Metric representations and the integrability conditions.
//!
//! In compatible coordinates `(x, y)` (so that `e₁ = ∂x`) the surface
//! carries the orthonormal frame `ê₁ = ∂x`, `ê₂ = a ∂x + b ∂y`. Given the
//! α-function and the p-mean curvature `H`, the pair `(a, b)` is fixed by
//! two x-anti-derivatives up to the gauge functions `k(y)` and `h(y)`:
//!
//! ```text
//! b = e^{k} e^{-∫2α} / √(1+α²)
//! a = e^{-∫2α} / √(1+α²) · (h − ∫ Hα e^{∫2α})
//! ```
//!
//! The residuals `r1`, `r2`, `r3` returned by [`integrability_residual`]
//! vanish exactly when `(α, H, a, b)` come from a real surface.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{YFunction, FD_STEP, FD_STEP2};
use crate::quad::{Antiderivative, PANELS_PER_UNIT};

/// Step of the five-point second-difference stencil, relative to the rectangle scale.
const D2_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    /// Largest finite side length, at least 1. Used to scale difference steps.
    pub fn scale(&self) -> f64 {
        let w = self.x_max - self.x_min;
        let h = self.y_max - self.y_min;
        [w, h].into_iter().filter(|s| s.is_finite()).fold(1.0, f64::max)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// Tensor-product sample grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Grid {
    /// `nx × ny` equispaced points including the corners.
    pub fn uniform(rect: Rect, nx: usize, ny: usize) -> Self {
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                return vec![0.5 * (lo + hi)];
            }
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        Grid {
            xs: lin(rect.x_min, rect.x_max, nx),
            ys: lin(rect.y_min, rect.y_max, ny),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ys.iter().flat_map(move |&y| self.xs.iter().map(move |&x| (x, y)))
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A scalar field on a rectangle, differentiated by central differences
/// (one-sided within one step of the edges).
#[derive(Clone)]
pub struct Field2D {
    f: Fn2,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl std::fmt::Debug for Field2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field2D")
            .field("rect", &self.rect)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish_non_exhaustive()
    }
}

impl Field2D {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, rect: Rect, nx: usize, ny: usize) -> Self {
        Field2D { f: Arc::new(f), rect, nx, ny }
    }

    pub fn constant(c: f64, rect: Rect) -> Self {
        Field2D::new(move |_, _| c, rect, 2, 2)
    }

    pub fn grid(&self) -> Grid {
        Grid::uniform(self.rect, self.nx, self.ny)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    // Central stencils are used whenever the field is finite on them; the
    // one-sided fallbacks serve fields that stop at the rectangle.
    fn d1(&self, g: impl Fn(f64) -> f64, t: f64, lo: f64, hi: f64) -> f64 {
        let h = FD_STEP * self.rect.scale();
        let central = (g(t + h) - g(t - h)) / (2.0 * h);
        if central.is_finite() {
            central
        } else if t + 2.0 * h <= hi {
            (-3.0 * g(t) + 4.0 * g(t + h) - g(t + 2.0 * h)) / (2.0 * h)
        } else if t - 2.0 * h >= lo {
            (3.0 * g(t) - 4.0 * g(t - h) + g(t - 2.0 * h)) / (2.0 * h)
        } else {
            central
        }
    }

    fn d2(&self, g: impl Fn(f64) -> f64, t: f64, lo: f64, hi: f64) -> f64 {
        let h = D2_STEP * self.rect.scale();
        let central =
            (-g(t + 2.0 * h) + 16.0 * g(t + h) - 30.0 * g(t) + 16.0 * g(t - h) - g(t - 2.0 * h)) / (12.0 * h * h);
        if central.is_finite() {
            return central;
        }
        let h = FD_STEP2 * self.rect.scale();
        if t + 3.0 * h <= hi {
            (2.0 * g(t) - 5.0 * g(t + h) + 4.0 * g(t + 2.0 * h) - g(t + 3.0 * h)) / (h * h)
        } else if t - 3.0 * h >= lo {
            (2.0 * g(t) - 5.0 * g(t - h) + 4.0 * g(t - 2.0 * h) - g(t - 3.0 * h)) / (h * h)
        } else {
            central
        }
    }

    pub fn dx(&self, x: f64, y: f64) -> f64 {
        self.d1(|t| self.eval(t, y), x, self.rect.x_min, self.rect.x_max)
    }

    pub fn dy(&self, x: f64, y: f64) -> f64 {
        self.d1(|t| self.eval(x, t), y, self.rect.y_min, self.rect.y_max)
    }

    pub fn dxx(&self, x: f64, y: f64) -> f64 {
        self.d2(|t| self.eval(t, y), x, self.rect.x_min, self.rect.x_max)
    }
}

type AbFn = Arc<dyn Fn(f64, f64) -> Result<(f64, f64)> + Send + Sync>;

/// The pair `(a, b)` with `ê₂ = a ∂x + b ∂y`.
#[derive(Clone)]
pub struct MetricRep {
    ab: AbFn,
    /// Set when the y-orientation was reversed to make `b` positive.
    pub flipped: bool,
    /// Length scale for difference steps.
    pub scale: f64,
}

impl std::fmt::Debug for MetricRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricRep")
            .field("flipped", &self.flipped)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

/// Values and x-derivatives of a [`MetricRep`] at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricJet {
    pub a: f64,
    pub b: f64,
    pub a_x: f64,
    pub b_x: f64,
}

impl MetricRep {
    pub fn new(ab: impl Fn(f64, f64) -> Result<(f64, f64)> + Send + Sync + 'static) -> Self {
        MetricRep {
            ab: Arc::new(ab),
            flipped: false,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn ab(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        (self.ab)(x, y)
    }

    pub fn jet(&self, x: f64, y: f64) -> Result<MetricJet> {
        let h = FD_STEP * self.scale;
        let (a, b) = self.ab(x, y)?;
        let (ap, bp) = self.ab(x + h, y)?;
        let (am, bm) = self.ab(x - h, y)?;
        Ok(MetricJet {
            a,
            b,
            a_x: (ap - am) / (2.0 * h),
            b_x: (bp - bm) / (2.0 * h),
        })
    }

    /// The same surface seen with `y ↦ −y`: `(a, b)(x, y) ↦ (a, −b)(x, −y)`.
    pub fn flip_y(&self) -> MetricRep {
        let inner = self.ab.clone();
        MetricRep {
            ab: Arc::new(move |x, y| inner(x, -y).map(|(a, b)| (a, -b))),
            flipped: !self.flipped,
            scale: self.scale,
        }
    }
}

struct LineTables {
    i_table: Antiderivative,
    j_table: Antiderivative,
}

struct MetricBuilder {
    alpha: Field2D,
    h_field: Field2D,
    k: YFunction,
    h: YFunction,
    x_base: f64,
    lo: f64,
    hi: f64,
    panels_per_unit: f64,
    cache: Mutex<HashMap<u64, Arc<LineTables>>>,
}

impl MetricBuilder {
    fn line(&self, y: f64) -> Result<Arc<LineTables>> {
        let key = y.to_bits();
        if let Some(t) = self.cache.lock().expect("metric cache poisoned").get(&key) {
            return Ok(t.clone());
        }
        let fail = |x: f64| Error::QuadratureFailure { x, y };
        let two_alpha = |x: f64| 2.0 * self.alpha.eval(x, y);
        let i_table = Antiderivative::build(two_alpha, self.x_base, self.lo, self.hi, self.panels_per_unit)
            .map_err(fail)?;
        let j_integrand = |x: f64| {
            let a = self.alpha.eval(x, y);
            self.h_field.eval(x, y) * a * i_table.eval(x, two_alpha).exp()
        };
        let j_table = Antiderivative::build(j_integrand, self.x_base, self.lo, self.hi, self.panels_per_unit)
            .map_err(fail)?;
        let tables = Arc::new(LineTables { i_table, j_table });
        self.cache
            .lock()
            .expect("metric cache poisoned")
            .insert(key, tables.clone());
        Ok(tables)
    }

    fn ab(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let t = self.line(y)?;
        let two_alpha = |s: f64| 2.0 * self.alpha.eval(s, y);
        let i = t.i_table.eval(x, two_alpha);
        let j = t.j_table.eval(x, |s: f64| {
            self.h_field.eval(s, y) * self.alpha.eval(s, y) * t.i_table.eval(s, two_alpha).exp()
        });
        let alpha = self.alpha.eval(x, y);
        let common = (-i).exp() / (1.0 + alpha * alpha).sqrt();
        let b = self.k.eval(y).exp() * common;
        let a = common * (self.h.eval(y) - j);
        if a.is_finite() && b.is_finite() {
            Ok((a, b))
        } else {
            Err(Error::QuadratureFailure { x, y })
        }
    }
}

/// `(a, b)` from `(α, H)` and the gauge functions, with both anti-derivatives
/// taken from `x_base` at the default panel density.
pub fn metric_from_alpha_h(
    alpha: &Field2D,
    h_field: &Field2D,
    k: &YFunction,
    h: &YFunction,
    x_base: f64,
) -> Result<MetricRep> {
    metric_from_alpha_h_with(alpha, h_field, k, h, x_base, PANELS_PER_UNIT)
}

pub fn metric_from_alpha_h_with(
    alpha: &Field2D,
    h_field: &Field2D,
    k: &YFunction,
    h: &YFunction,
    x_base: f64,
    panels_per_unit: f64,
) -> Result<MetricRep> {
    let rect = alpha.rect;
    let pad = 0.05 * rect.scale();
    let builder = Arc::new(MetricBuilder {
        alpha: alpha.clone(),
        h_field: h_field.clone(),
        k: k.clone(),
        h: h.clone(),
        x_base,
        lo: rect.x_min - pad,
        hi: rect.x_max + pad,
        panels_per_unit,
        cache: Mutex::new(HashMap::new()),
    });
    // Tabulate the sample lines up front so quadrature failures surface here.
    alpha
        .grid()
        .ys
        .par_iter()
        .try_for_each(|&y| builder.line(y).map(|_| ()))?;
    let scale = rect.scale();
    Ok(MetricRep::new(move |x, y| builder.ab(x, y)).with_scale(scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

impl ResidualStats {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return ResidualStats::default();
        }
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
        ResidualStats { max, mean }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub r1: ResidualStats,
    pub r2: ResidualStats,
    pub r3: ResidualStats,
    pub points: usize,
    pub fd_step: f64,
}

impl IntegrabilityReport {
    pub fn max(&self) -> f64 {
        self.r1.max.max(self.r2.max).max(self.r3.max)
    }
}

/// The three residuals at one point.
pub fn integrability_at(alpha: &Field2D, h_field: &Field2D, rep: &MetricRep, x: f64, y: f64) -> Result<[f64; 3]> {
    let al = alpha.eval(x, y);
    let al_x = alpha.dx(x, y);
    let al_xx = alpha.dxx(x, y);
    let hh = h_field.eval(x, y);
    let h_x = h_field.dx(x, y);
    let h_y = h_field.dy(x, y);
    let m = rep.jet(x, y)?;
    let root = (1.0 + al * al).sqrt();
    let r1 = -m.a_x + m.a * m.b_x / m.b - hh * al / root;
    let r2 = -m.b_x / m.b - 2.0 * al - al * al_x / (1.0 + al * al);
    let r3 = m.a * h_x + m.b * h_y
        - (al_xx + 6.0 * al * al_x + 4.0 * al * al * al + al * hh * hh) / root;
    Ok([r1, r2, r3])
}

/// Residual statistics of the integrability system over `grid`.
pub fn integrability_residual(alpha: &Field2D, h_field: &Field2D, rep: &MetricRep, grid: &Grid) -> Result<IntegrabilityReport> {
    let pts: Vec<(f64, f64)> = grid.points().collect();
    let rows: Vec<[f64; 3]> = pts
        .par_iter()
        .map(|&(x, y)| integrability_at(alpha, h_field, rep, x, y))
        .collect::<Result<_>>()?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    Ok(IntegrabilityReport {
        r1: ResidualStats::from_values(&col(0)),
        r2: ResidualStats::from_values(&col(1)),
        r3: ResidualStats::from_values(&col(2)),
        points: rows.len(),
        fd_step: FD_STEP * rep.scale,
    })
}

/// `α_xx + 6αα_x + 4α³ + c²α` over `grid`, by differences along x.
pub fn codazzi_residual_2d(alpha: &Field2D, c: f64, grid: &Grid) -> ResidualStats {
    let values: Vec<f64> = grid
        .points()
        .map(|(x, y)| {
            let a = alpha.eval(x, y);
            alpha.dxx(x, y) + 6.0 * a * alpha.dx(x, y) + 4.0 * a * a * a + c * c * a
        })
        .collect();
    ResidualStats::from_values(&values)
}
