//! Parametrized surfaces in H₁ and the graph surfaces `z = u(x, y)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fundamental::Rect;
use crate::heisenberg::{HPoint, Vec3};

/// Step of the fallback partial derivatives, relative to the domain scale.
pub const CHART_FD_STEP: f64 = 1e-6;

/// A map `(u, v) ↦ X(u, v)`.
pub trait ChartMap: Send + Sync {
    fn point(&self, u: f64, v: f64) -> HPoint;

    /// `(X_u, X_v)` in ℝ³ coordinates. The default uses central differences
    /// with step `CHART_FD_STEP · max(1, |u|, |v|)`.
    fn partials(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let h = CHART_FD_STEP * u.abs().max(v.abs()).max(1.0);
        let du = (self.point(u + h, v).to_vec() - self.point(u - h, v).to_vec()) / (2.0 * h);
        let dv = (self.point(u, v + h).to_vec() - self.point(u, v - h).to_vec()) / (2.0 * h);
        (du, dv)
    }
}

type PartialsFn = fn(f64, f64) -> (Vec3, Vec3);

struct FnChart<P, D> {
    point: P,
    partials: Option<D>,
}

impl<P, D> ChartMap for FnChart<P, D>
where
    P: Fn(f64, f64) -> HPoint + Send + Sync,
    D: Fn(f64, f64) -> (Vec3, Vec3) + Send + Sync,
{
    fn point(&self, u: f64, v: f64) -> HPoint {
        (self.point)(u, v)
    }

    fn partials(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        match &self.partials {
            Some(d) => d(u, v),
            None => {
                let h = CHART_FD_STEP * u.abs().max(v.abs()).max(1.0);
                let du = ((self.point)(u + h, v).to_vec() - (self.point)(u - h, v).to_vec()) / (2.0 * h);
                let dv = ((self.point)(u, v + h).to_vec() - (self.point)(u, v - h).to_vec()) / (2.0 * h);
                (du, dv)
            }
        }
    }
}

/// How the characteristic direction `e₁` is oriented on a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E1Orientation {
    /// `e₁ ∝ Θ(X_v) X_u − Θ(X_u) X_v`; on graphs this is
    /// `((u_y + x) ė₁ − (u_x − y) ė₂)/D`.
    Canonical,
    /// The same line, oriented so that `e₁` has a positive `X_u` component.
    AlongU,
}

/// Values and partials of a graph function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GraphJet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

impl GraphJet {
    /// `(u_x − y, u_y + x)`, which vanishes exactly at singular points.
    pub fn singular_map(&self, x: f64, y: f64) -> (f64, f64) {
        (self.ux - y, self.uy + x)
    }
}

type JetFn = Arc<dyn Fn(f64, f64) -> GraphJet + Send + Sync>;

/// A graph `z = u(x, y)` over a rectangular window.
#[derive(Clone)]
pub struct GraphSurface {
    jet: JetFn,
    pub window: Rect,
}

impl fmt::Debug for GraphSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphSurface").field("window", &self.window).finish_non_exhaustive()
    }
}

impl GraphSurface {
    pub fn new(jet: impl Fn(f64, f64) -> GraphJet + Send + Sync + 'static, window: Rect) -> Self {
        GraphSurface {
            jet: Arc::new(jet),
            window,
        }
    }

    /// Graph of an expression in `x` and `y` with symbolic partials.
    pub fn from_expr(e: &Expr, window: Rect) -> Result<Self> {
        if let Some(v) = e.free_vars().into_iter().find(|v| v != "x" && v != "y") {
            return Err(Error::InvalidInput(format!("graph expressions may only use x and y, found {v}")));
        }
        let ux = e.derivative("x");
        let uy = e.derivative("y");
        let uxx = ux.derivative("x");
        let uxy = ux.derivative("y");
        let uyy = uy.derivative("y");
        let f = e.clone();
        let ev = move |e: &Expr, x: f64, y: f64| {
            e.eval(&|name: &str| match name {
                "x" => Some(x),
                "y" => Some(y),
                _ => None,
            })
            .unwrap_or(f64::NAN)
        };
        Ok(GraphSurface::new(
            move |x, y| GraphJet {
                u: ev(&f, x, y),
                ux: ev(&ux, x, y),
                uy: ev(&uy, x, y),
                uxx: ev(&uxx, x, y),
                uxy: ev(&uxy, x, y),
                uyy: ev(&uyy, x, y),
            },
            window,
        ))
    }

    pub fn jet(&self, x: f64, y: f64) -> GraphJet {
        (self.jet)(x, y)
    }

    /// The graph as a chart with `(u, v) = (x, y)`.
    pub fn to_chart(&self, name: &str, orientation: E1Orientation) -> SurfaceChart {
        let (g1, g2) = (self.clone(), self.clone());
        SurfaceChart::with_partials(
            name,
            self.window,
            orientation,
            move |x, y| HPoint::new(x, y, g1.jet(x, y).u),
            move |x, y| {
                let j = g2.jet(x, y);
                (Vec3::new(1.0, 0.0, j.ux), Vec3::new(0.0, 1.0, j.uy))
            },
        )
        .with_graph(self.clone())
    }
}

/// A parametrized surface together with its parameter domain.
#[derive(Clone)]
pub struct SurfaceChart {
    pub map: Arc<dyn ChartMap>,
    pub domain: Rect,
    pub graph: Option<GraphSurface>,
    pub orientation: E1Orientation,
    pub name: String,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("orientation", &self.orientation)
            .field("graph", &self.graph.is_some())
            .finish_non_exhaustive()
    }
}

impl SurfaceChart {
    pub fn new(map: impl ChartMap + 'static, name: &str, domain: Rect, orientation: E1Orientation) -> Self {
        SurfaceChart {
            map: Arc::new(map),
            domain,
            graph: None,
            orientation,
            name: name.to_string(),
        }
    }

    /// Chart from a point closure; partials by central differences.
    pub fn from_fn(
        name: &str,
        domain: Rect,
        orientation: E1Orientation,
        point: impl Fn(f64, f64) -> HPoint + Send + Sync + 'static,
    ) -> Self {
        let map: FnChart<_, PartialsFn> = FnChart { point, partials: None };
        Self::new(map, name, domain, orientation)
    }

    pub fn with_partials(
        name: &str,
        domain: Rect,
        orientation: E1Orientation,
        point: impl Fn(f64, f64) -> HPoint + Send + Sync + 'static,
        partials: impl Fn(f64, f64) -> (Vec3, Vec3) + Send + Sync + 'static,
    ) -> Self {
        let map = FnChart {
            point,
            partials: Some(partials),
        };
        Self::new(map, name, domain, orientation)
    }

    pub fn with_graph(mut self, g: GraphSurface) -> Self {
        self.graph = Some(g);
        self
    }

    pub fn point(&self, u: f64, v: f64) -> HPoint {
        self.map.point(u, v)
    }

    pub fn partials(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        self.map.partials(u, v)
    }

    /// Row-major vertex grid over the domain, `nu` samples along `u`
    /// varying fastest.
    pub fn mesh(&self, nu: usize, nv: usize) -> Vec<HPoint> {
        let grid = crate::fundamental::Grid::uniform(self.domain, nu, nv);
        grid.points().map(|(u, v)| self.point(u, v)).collect()
    }
}
