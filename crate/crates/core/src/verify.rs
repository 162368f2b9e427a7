//! Numerical checks computed from first principles: the p-minimal graph
//! equation, α, H and the metric pair `(a, b)` on arbitrary charts, singular
//! sets of graphs and the behaviour of the characteristic field across
//! singular curves.
//!
//! Tangent vectors are handled in coordinates with respect to the
//! left-invariant frame `(ė₁, ė₂, T)`. In these coordinates the adapted
//! metric is Euclidean and the frame is parallel, so `e₁`, `e₂ = Je₁` and
//! their derivatives reduce to plain linear algebra on coefficient triples.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{GraphSurface, SurfaceChart};
use crate::construct::RulingMap;
use crate::error::{Error, Result};
use crate::fundamental::{Grid, MetricRep, Rect};
use crate::func::YFunction;
use crate::heisenberg::{contact_value, FrameVector, HPoint, Vec3};
use crate::lienard::{fit_solution, AlphaSolution};
use crate::models::{classify, normalize, AlphaModel, CoordChange, ModelKind, NormalForm, SurfaceType};

/// `D ≤ SINGULAR_EPS` marks a singular point.
pub const SINGULAR_EPS: f64 = 1e-10;
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// Ratio `σ_min/σ_max` below which the Jacobian of the singular map has rank one.
pub const RANK_TOL: f64 = 1e-8;
/// Parameter step for the directional derivative that gives `H`.
pub const H_STEP: f64 = 1e-4;
/// Agreement required between the two one-sided limits for a sign flip.
pub const FLIP_TOL: f64 = 1e-4;

/// `(u_y + x)² u_xx − 2(u_y + x)(u_x − y) u_xy + (u_x − y)² u_yy`.
pub fn pmge_residual(g: &GraphSurface, x: f64, y: f64) -> f64 {
    let j = g.jet(x, y);
    let (p, q) = j.singular_map(x, y);
    q * q * j.uxx - 2.0 * q * p * j.uxy + p * p * j.uyy
}

/// Largest `|pmge_residual|` on an `nx × ny` grid over the graph's window.
pub fn pmge_max(g: &GraphSurface, nx: usize, ny: usize) -> f64 {
    let pts: Vec<_> = Grid::uniform(g.window, nx, ny).points().collect();
    pts.par_iter().map(|&(x, y)| pmge_residual(g, x, y).abs()).reduce(|| 0.0, f64::max)
}

/// Frame data of a chart at a regular point.
#[derive(Debug, Clone, Copy)]
struct Local {
    base: HPoint,
    fu: Vec3,
    fv: Vec3,
    /// Unit `e₁` (horizontal, so only two coefficients).
    e1: Vector2<f64>,
    /// Parameter velocity `(u̇, v̇)` that moves the point along `e₁` at unit speed.
    dir: Vector2<f64>,
}

impl Local {
    fn e2(&self) -> Vec3 {
        Vec3::new(-self.e1.y, self.e1.x, 0.0)
    }

    fn normal(&self) -> Vec3 {
        self.fu.cross(&self.fv)
    }

    fn alpha(&self) -> Result<f64> {
        let n = self.normal();
        let den = self.e2().dot(&n);
        if den.abs() <= SINGULAR_EPS * n.norm() {
            return Err(Error::singular(
                format!("({}, {}, {})", self.base.x, self.base.y, self.base.z),
                "e₂ is tangent to the surface",
            ));
        }
        Ok(-n.z / den)
    }
}

fn frame_coords(p: HPoint, v: Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, contact_value(p, v))
}

fn local(chart: &SurfaceChart, u: f64, v: f64) -> Result<Local> {
    let base = chart.point(u, v);
    let (xu, xv) = chart.partials(u, v);
    let (fu, fv) = (frame_coords(base, xu), frame_coords(base, xv));
    let (tu, tv) = (fu.z, fv.z);
    let mut comb = Vector2::new(tv * fu.x - tu * fv.x, tv * fu.y - tu * fv.y);
    let mut dir = Vector2::new(tv, -tu);
    let norm = comb.norm();
    if norm <= SINGULAR_EPS * fu.norm().max(1.0) * fv.norm().max(1.0) {
        return Err(Error::singular(format!("(u, v) = ({u}, {v})"), "the tangent plane is horizontal"));
    }
    if chart.orientation == crate::chart::E1Orientation::AlongU && tv < 0.0 {
        comb = -comb;
        dir = -dir;
    }
    Ok(Local {
        base,
        fu,
        fv,
        e1: comb / norm,
        dir: dir / norm,
    })
}

/// The unit characteristic direction `e₁` of a chart.
pub fn numeric_e1_on_chart(chart: &SurfaceChart, u: f64, v: f64) -> Result<FrameVector> {
    let l = local(chart, u, v)?;
    Ok(FrameVector::new(l.base, l.e1.x, l.e1.y, 0.0))
}

/// `α` from the tangency of `αe₂ + T`.
pub fn numeric_alpha_on_chart(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    local(chart, u, v)?.alpha()
}

/// The parameter velocity of the unit-speed characteristic through `(u, v)`.
pub fn characteristic_velocity(chart: &SurfaceChart, u: f64, v: f64) -> Result<(f64, f64)> {
    let l = local(chart, u, v)?;
    Ok((l.dir.x, l.dir.y))
}

/// The p-mean curvature, read off as the turning rate of `e₁` along itself.
pub fn numeric_h_on_chart(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    let l = local(chart, u, v)?;
    let h = H_STEP;
    let plus = local(chart, u + h * l.dir.x, v + h * l.dir.y)?;
    let minus = local(chart, u - h * l.dir.x, v - h * l.dir.y)?;
    // signed angle from e₁(−) to e₁(+)
    let turn = (minus.e1.x * plus.e1.y - minus.e1.y * plus.e1.x).atan2(minus.e1.dot(&plus.e1));
    Ok(turn / (2.0 * h))
}

/// `(a, b)` with `ê₂ = (αe₂ + T)/√(1 + α²) = a X_u + b X_v`.
pub fn numeric_metric_on_chart(chart: &SurfaceChart, u: f64, v: f64) -> Result<(f64, f64)> {
    let l = local(chart, u, v)?;
    let alpha = l.alpha()?;
    let e2hat = (alpha * l.e2() + Vec3::new(0.0, 0.0, 1.0)) / (1.0 + alpha * alpha).sqrt();
    let n = l.normal();
    let n2 = n.norm_squared();
    Ok((e2hat.cross(&l.fv).dot(&n) / n2, l.fu.cross(&e2hat).dot(&n) / n2))
}

/// `e₁ = ((u_y + x) ė₁ − (u_x − y) ė₂)/D` on a graph.
pub fn characteristic_direction(g: &GraphSurface, x: f64, y: f64) -> Result<FrameVector> {
    let j = g.jet(x, y);
    let (p, q) = j.singular_map(x, y);
    let d = p.hypot(q);
    if d <= SINGULAR_EPS {
        return Err(Error::singular(format!("({x}, {y})"), "D vanishes"));
    }
    Ok(FrameVector::new(HPoint::new(x, y, j.u), q / d, -p / d, 0.0))
}

/// RK4 polyline of the characteristic curve through `(u, v)` in parameter
/// space, with `steps` steps of arc length `ds` (negative `ds` walks
/// backwards). Stops early at a singular point or when leaving the domain.
pub fn trace_characteristic(chart: &SurfaceChart, u: f64, v: f64, ds: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    let f = |u: f64, v: f64| characteristic_velocity(chart, u, v);
    let mut out = vec![(u, v)];
    let (mut u, mut v) = (u, v);
    for _ in 0..steps {
        let stage = || -> Result<(f64, f64)> {
            let k1 = f(u, v)?;
            let k2 = f(u + 0.5 * ds * k1.0, v + 0.5 * ds * k1.1)?;
            let k3 = f(u + 0.5 * ds * k2.0, v + 0.5 * ds * k2.1)?;
            let k4 = f(u + ds * k3.0, v + ds * k3.1)?;
            Ok((
                u + ds / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                v + ds / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            ))
        };
        match stage() {
            Ok((nu, nv)) if chart.domain.contains(nu, nv) => {
                u = nu;
                v = nv;
                out.push((u, v));
            }
            Ok(_) => break,
            Err(e) if out.len() == 1 => return Err(e),
            Err(_) => break,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolatedPoint {
    pub x: f64,
    pub y: f64,
    /// `|(u_x − y, u_y + x)|` at the refined point.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularCurve {
    pub points: Vec<[f64; 2]>,
    pub max_residual: f64,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonFailure {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularTolerances {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub rank_tol: f64,
    pub scan_cells: usize,
}

/// Singular set of a graph: isolated points and traced curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularReport {
    pub points: Vec<IsolatedPoint>,
    pub curves: Vec<SingularCurve>,
    pub failures: Vec<NewtonFailure>,
    pub tolerances: SingularTolerances,
}

impl SingularReport {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.curves.is_empty()
    }
}

fn sing_f(g: &GraphSurface, z: Vector2<f64>) -> Vector2<f64> {
    let (p, q) = g.jet(z.x, z.y).singular_map(z.x, z.y);
    Vector2::new(p, q)
}

fn sing_j(g: &GraphSurface, z: Vector2<f64>) -> Matrix2<f64> {
    let j = g.jet(z.x, z.y);
    Matrix2::new(j.uxx, j.uxy - 1.0, j.uxy + 1.0, j.uyy)
}

/// Gauss-Newton with the pseudo-inverse, so rank-one Jacobians step to the
/// nearest point of the zero curve.
fn refine(g: &GraphSurface, z0: Vector2<f64>) -> std::result::Result<Vector2<f64>, NewtonFailure> {
    let mut z = z0;
    let limit = 10.0 * g.window.scale();
    for _ in 0..NEWTON_MAX_ITER {
        let f = sing_f(g, z);
        let scale = 1.0 + z.norm();
        if f.norm() <= NEWTON_TOL * scale {
            return Ok(z);
        }
        let step = sing_j(g, z).svd(true, true).solve(&f, 1e-14).map_err(|_| NewtonFailure {
            x: z.x,
            y: z.y,
            residual: f.norm(),
        })?;
        z -= step;
        if !z.iter().all(|c| c.is_finite()) || (z - z0).norm() > limit {
            break;
        }
    }
    let f = sing_f(g, z);
    if f.norm() <= NEWTON_TOL * (1.0 + z.norm()) {
        Ok(z)
    } else {
        Err(NewtonFailure {
            x: z.x,
            y: z.y,
            residual: f.norm(),
        })
    }
}

/// `(σ_min/σ_max, unit kernel direction)` of the singular-map Jacobian.
fn rank_data(g: &GraphSurface, z: Vector2<f64>) -> (f64, Vector2<f64>) {
    let svd = sing_j(g, z).svd(false, true);
    let s = svd.singular_values;
    let vt = svd.v_t.expect("requested");
    let (imin, smax) = if s[0] < s[1] { (0, s[1]) } else { (1, s[0]) };
    let k = Vector2::new(vt[(imin, 0)], vt[(imin, 1)]);
    (if smax == 0.0 { 0.0 } else { s[imin] / smax }, k)
}

fn trace_curve(g: &GraphSurface, start: Vector2<f64>, h: f64) -> SingularCurve {
    let w = g.window;
    let inside = |z: Vector2<f64>| w.contains(z.x, z.y);
    let max_steps = (8.0 * (w.x_max - w.x_min + w.y_max - w.y_min) / h).ceil() as usize;
    let branch = |sign: f64| -> (Vec<Vector2<f64>>, bool) {
        let mut pts = Vec::new();
        let mut closed = false;
        let mut z = start;
        let mut t = rank_data(g, z).1 * sign;
        for i in 0..max_steps {
            let Ok(next) = refine(g, z + h * t) else { break };
            if !inside(next) || (next - z).norm() < 0.25 * h {
                break;
            }
            if i > 2 && (next - start).norm() < 0.5 * h {
                closed = true;
                break;
            }
            let nt = rank_data(g, next).1;
            t = if nt.dot(&t) < 0.0 { -nt } else { nt };
            z = next;
            pts.push(z);
        }
        (pts, closed)
    };
    let (forward, closed) = branch(1.0);
    let backward = if closed { Vec::new() } else { branch(-1.0).0 };
    let pts: Vec<Vector2<f64>> = backward.into_iter().rev().chain(std::iter::once(start)).chain(forward).collect();
    let max_residual = pts.iter().map(|&z| sing_f(g, z).norm()).fold(0.0, f64::max);
    SingularCurve {
        points: pts.iter().map(|z| [z.x, z.y]).collect(),
        max_residual,
        closed,
    }
}

fn segment_distance(p: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 == 0.0 { 0.0 } else { ((p - a).dot(&ab) / len2).clamp(0.0, 1.0) };
    (p - a - t * ab).norm()
}

fn near_curve(c: &SingularCurve, p: Vector2<f64>, tol: f64) -> bool {
    let pts: Vec<Vector2<f64>> = c.points.iter().map(|q| Vector2::new(q[0], q[1])).collect();
    match pts.len() {
        0 => false,
        1 => (pts[0] - p).norm() <= tol,
        _ => pts.windows(2).any(|s| segment_distance(p, s[0], s[1]) <= tol),
    }
}

/// Number of scan cells per side used by [`singular_set`].
pub const SCAN_CELLS: usize = 64;

/// Zeros of `(u_x − y, u_y + x)` in the graph's window.
///
/// Candidate cells are those where each component changes sign or nearly
/// vanishes; seeds are refined by Gauss-Newton and classified by the rank of
/// the Jacobian. Rank-one zeros are traced along the kernel direction.
pub fn singular_set(g: &GraphSurface) -> SingularReport {
    singular_set_with(g, SCAN_CELLS)
}

pub fn singular_set_with(g: &GraphSurface, cells: usize) -> SingularReport {
    let w = g.window;
    let n = cells.max(2);
    let grid = Grid::uniform(w, n + 1, n + 1);
    let vals: Vec<Vector2<f64>> = grid.points().map(|(x, y)| sing_f(g, Vector2::new(x, y))).collect();
    let (hx, hy) = ((w.x_max - w.x_min) / n as f64, (w.y_max - w.y_min) / n as f64);
    let near = 1e-9 * w.scale();
    let mut seeds = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [vals[j * (n + 1) + i], vals[j * (n + 1) + i + 1], vals[(j + 1) * (n + 1) + i], vals[(j + 1) * (n + 1) + i + 1]];
            let candidate = (0..2).all(|c| {
                let (lo, hi) = corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[c]), hi.max(v[c])));
                (lo <= 0.0 && hi >= 0.0) || lo.abs().min(hi.abs()) <= near
            });
            if candidate {
                seeds.push(Vector2::new(grid.xs[i] + 0.5 * hx, grid.ys[j] + 0.5 * hy));
            }
        }
    }
    let refined: Vec<std::result::Result<Vector2<f64>, NewtonFailure>> = seeds.par_iter().map(|&s| refine(g, s)).collect();

    let h = 0.25 * hx.min(hy);
    let mut report = SingularReport {
        points: Vec::new(),
        curves: Vec::new(),
        failures: Vec::new(),
        tolerances: SingularTolerances {
            newton_tol: NEWTON_TOL,
            newton_max_iter: NEWTON_MAX_ITER,
            rank_tol: RANK_TOL,
            scan_cells: n,
        },
    };
    for r in refined {
        let z = match r {
            Ok(z) if w.contains(z.x, z.y) => z,
            Ok(_) => continue,
            Err(f) => {
                report.failures.push(f);
                continue;
            }
        };
        let (ratio, _) = rank_data(g, z);
        if ratio <= RANK_TOL {
            if report.curves.iter().any(|c| near_curve(c, z, 0.5 * h)) {
                continue;
            }
            report.curves.push(trace_curve(g, z, h));
        } else {
            if report.points.iter().any(|p| (Vector2::new(p.x, p.y) - z).norm() <= 1e-6 * w.scale()) {
                continue;
            }
            report.points.push(IsolatedPoint {
                x: z.x,
                y: z.y,
                residual: sing_f(g, z).norm(),
            });
        }
    }
    report
}

/// One-sided limits of the angles between `e₁` and the coordinate vectors
/// `X_x`, `X_y` at a point of a singular curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoThrough {
    pub cos_zeta_plus: f64,
    pub cos_zeta_minus: f64,
    pub cos_eta_plus: f64,
    pub cos_eta_minus: f64,
    pub expected_zeta_plus: f64,
    pub expected_eta_plus: f64,
    pub flip_detected: bool,
    pub flip_tol: f64,
}

fn cosines(g: &GraphSurface, x: f64, y: f64) -> (f64, f64) {
    let (p, q) = g.jet(x, y).singular_map(x, y);
    let d = p.hypot(q);
    (q / (d * (1.0 + p * p).sqrt()), -p / (d * (1.0 + q * q).sqrt()))
}

/// Approaches the singular point `p` from both sides along `dir` and
/// extrapolates the cosines of the angles between `e₁` and `X_x`, `X_y`.
///
/// The plus side is where `u_x − y > 0`, or `u_y + x > 0` when `u_xx(p) = 0`.
pub fn go_through_check(g: &GraphSurface, p: (f64, f64), dir: (f64, f64)) -> Result<GoThrough> {
    let z = Vector2::new(p.0, p.1);
    let f = sing_f(g, z);
    if f.norm() > 1e-8 * (1.0 + z.norm()) {
        return Err(Error::PreconditionFailed(format!("({}, {}) is not singular: |F| = {:e}", p.0, p.1, f.norm())));
    }
    let (ratio, kernel) = rank_data(g, z);
    if ratio > RANK_TOL {
        return Err(Error::PreconditionFailed(format!("({}, {}) is an isolated singular point", p.0, p.1)));
    }
    let d = Vector2::new(dir.0, dir.1);
    if d.norm() == 0.0 || (d.x * kernel.y - d.y * kernel.x).abs() <= 1e-6 * d.norm() {
        return Err(Error::PreconditionFailed("direction is tangent to the singular curve".into()));
    }
    let d = d / d.norm();
    let j = g.jet(p.0, p.1);
    let col = j.uxx.hypot(j.uxy + 1.0);
    if col <= SINGULAR_EPS {
        return Err(Error::PreconditionFailed("u_xx and u_xy + 1 both vanish".into()));
    }
    let sgn = if j.uxx != 0.0 { j.uxx.signum() } else { (j.uxy + 1.0).signum() };

    let side = |s: f64| -> (f64, f64) {
        let at = |dist: f64| {
            let q = z + s * dist * d;
            cosines(g, q.x, q.y)
        };
        let (d0, d1) = (0.1 * 2f64.powi(-19), 0.1 * 2f64.powi(-20));
        let (f0, f1) = (at(d0), at(d1));
        (2.0 * f1.0 - f0.0, 2.0 * f1.1 - f0.1)
    };
    let probe = z + 0.1 * 2f64.powi(-10) * d;
    let fp = sing_f(g, probe);
    let forward_is_plus = if j.uxx != 0.0 { fp.x > 0.0 } else { fp.y > 0.0 };
    let (a, b) = (side(1.0), side(-1.0));
    let (plus, minus) = if forward_is_plus { (a, b) } else { (b, a) };
    let flips = |p: f64, m: f64| (p + m).abs() <= FLIP_TOL && p.abs() > FLIP_TOL;
    Ok(GoThrough {
        cos_zeta_plus: plus.0,
        cos_zeta_minus: minus.0,
        cos_eta_plus: plus.1,
        cos_eta_minus: minus.1,
        expected_zeta_plus: sgn * (j.uxy + 1.0) / col,
        expected_eta_plus: -sgn * j.uxx / col,
        flip_detected: flips(plus.0, minus.0) || flips(plus.1, minus.1),
        flip_tol: FLIP_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendrianReport {
    pub max_contact: f64,
    pub max_second_difference: f64,
}

/// Checks that the `r`-lines of a ruling map are straight and Legendrian.
pub fn legendrian_line_check(chart: &dyn RulingMap, samples: &[(f64, f64)]) -> LegendrianReport {
    let h = 0.5;
    samples.iter().fold(
        LegendrianReport {
            max_contact: 0.0,
            max_second_difference: 0.0,
        },
        |acc, &(r, t)| {
            let c = contact_value(chart.point(r, t), chart.d_r(r, t)).abs();
            let second =
                chart.point(r + h, t).to_vec() - 2.0 * chart.point(r, t).to_vec() + chart.point(r - h, t).to_vec();
            LegendrianReport {
                max_contact: acc.max_contact.max(c),
                max_second_difference: acc.max_second_difference.max(second.norm()),
            }
        },
    )
}

/// `(α, ∂α/∂u)` from the chart, the derivative by a five-point stencil.
fn alpha_jet(chart: &SurfaceChart, u: f64, v: f64) -> Result<(f64, f64)> {
    let h = 1e-3 * chart.domain.scale();
    let a = |du: f64| numeric_alpha_on_chart(chart, u + du, v);
    let d = (a(-2.0 * h)? - 8.0 * a(-h)? + 8.0 * a(h)? - a(2.0 * h)?) / (12.0 * h);
    Ok((a(0.0)?, d))
}

/// The α-model of a chart whose `u`-lines are characteristic, fitted on
/// the line `u = u_ref`.
pub fn chart_model(chart: &SurfaceChart, u_ref: f64, v_domain: (f64, f64)) -> Result<AlphaModel> {
    let mut family = None;
    for i in 0..9 {
        let v = v_domain.0 + (v_domain.1 - v_domain.0) * (i as f64 + 0.5) / 9.0;
        let name = fit(chart, u_ref, v)?.family_name();
        match family {
            None => family = Some(name),
            Some(f) if f != name => {
                return Err(Error::MixedType(format!("α changes family along u = {u_ref} ({f} and {name})")));
            }
            _ => {}
        }
    }
    let coeff = |which: usize| {
        let chart = chart.clone();
        YFunction::from_fn(move |v| match fit(&chart, u_ref, v) {
            Ok(AlphaSolution::SpecialI { c1 }) | Ok(AlphaSolution::SpecialII { c1 }) if which == 1 => c1,
            Ok(AlphaSolution::General { c1, c2 }) => {
                if which == 1 {
                    c1
                } else {
                    c2
                }
            }
            _ => f64::NAN,
        })
    };
    fn fit(chart: &SurfaceChart, u: f64, v: f64) -> Result<AlphaSolution> {
        let (a, da) = alpha_jet(chart, u, v)?;
        Ok(fit_solution(a, da, u))
    }
    let kind = match family.unwrap_or("Zero") {
        "Zero" => ModelKind::Vertical,
        "SpecialI" => ModelKind::SpecialI { c1: coeff(1) },
        "SpecialII" => ModelKind::SpecialII { c1: coeff(1) },
        _ => ModelKind::General {
            c1: coeff(1),
            c2: coeff(2),
        },
    };
    Ok(AlphaModel::new(kind, v_domain))
}

/// Surface type of the chart on `u_window × v_domain`, from numeric α.
pub fn classify_chart_region(chart: &SurfaceChart, u_window: (f64, f64), v_domain: (f64, f64)) -> Result<SurfaceType> {
    let u_ref = 0.5 * (u_window.0 + u_window.1);
    classify(&chart_model(chart, u_ref, v_domain)?, u_window)
}

/// Result of [`chart_normal_form`].
#[derive(Debug, Clone)]
pub struct ChartNormalForm {
    pub model: AlphaModel,
    pub rep: MetricRep,
    /// Set when `v` was reversed so that `b > 0`.
    pub flipped: bool,
    pub normal_form: NormalForm,
    pub change: CoordChange,
}

/// Numeric α-model and metric of a compatible chart, reduced to normal
/// coordinates.
pub fn chart_normal_form(chart: &SurfaceChart, u_window: (f64, f64), v_domain: (f64, f64)) -> Result<ChartNormalForm> {
    let u_ref = 0.5 * (u_window.0 + u_window.1);
    let v_ref = 0.5 * (v_domain.0 + v_domain.1);
    let mut model = chart_model(chart, u_ref, v_domain)?;
    let c = chart.clone();
    let mut rep = MetricRep::new(move |u, v| numeric_metric_on_chart(&c, u, v)).with_scale(chart.domain.scale());
    let (_, b) = rep.ab(u_ref, v_ref)?;
    let flipped = b < 0.0;
    if flipped {
        rep = rep.flip_y();
        let neg = |f: &YFunction| {
            let f = f.clone();
            YFunction::from_fn(move |y| f.eval(-y))
        };
        let kind = match &model.kind {
            ModelKind::Vertical => ModelKind::Vertical,
            ModelKind::SpecialI { c1 } => ModelKind::SpecialI { c1: neg(c1) },
            ModelKind::SpecialII { c1 } => ModelKind::SpecialII { c1: neg(c1) },
            ModelKind::General { c1, c2 } => ModelKind::General {
                c1: neg(c1),
                c2: neg(c2),
            },
        };
        model = AlphaModel::new(kind, (-v_domain.1, -v_domain.0));
    }
    let (normal_form, change) = normalize(&model, &rep, u_window)?;
    Ok(ChartNormalForm {
        model,
        rep,
        flipped,
        normal_form,
        change,
    })
}

/// Grid of `(u, v, α)` for a chart; singular samples carry `NaN`.
pub fn alpha_samples(chart: &SurfaceChart, window: Rect, nu: usize, nv: usize) -> Vec<(f64, f64, f64)> {
    let pts: Vec<_> = Grid::uniform(window, nu, nv).points().collect();
    pts.par_iter()
        .map(|&(u, v)| (u, v, numeric_alpha_on_chart(chart, u, v).unwrap_or(f64::NAN)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::E1Orientation;
    use crate::construct::{
        bernstein_plane, bernstein_saddle, conicoid_chart, conicoid_invariants, curve_invariants, helicoid_chart,
        helicoid_invariants, ruled_surface, GeneratingCurve, RuledChart,
    };
    use crate::expr::Expr;
    use crate::lienard::lienard_residual;
    use approx::assert_abs_diff_eq;

    fn w() -> Rect {
        Rect::new(-1.0, 1.0, -1.0, 1.0)
    }

    fn graph(src: &str) -> GraphSurface {
        GraphSurface::from_expr(&src.parse::<Expr>().unwrap(), w()).unwrap()
    }

    fn lin() -> YFunction {
        YFunction::from_fns2(|t| t, |_| 1.0, |_| 0.0)
    }

    #[test]
    fn pmge_examples() {
        assert_eq!(pmge_residual(&graph("x*y"), 0.3, -0.7), 0.0);
        assert_eq!(pmge_residual(&graph("2*x - y + 4"), 0.3, -0.7), 0.0);
        assert_eq!(pmge_residual(&graph("x^2"), 1.0, 0.0), 2.0);
        assert_eq!(pmge_max(&graph("x*y + y^2"), 9, 9), 0.0);
    }

    #[test]
    fn alpha_on_examples() {
        let plane = graph("0").to_chart("plane", E1Orientation::Canonical);
        for (x, y) in [(0.5, 0.0), (0.3, -0.4), (-0.2, 0.1)] {
            let r: f64 = f64::hypot(x, y);
            assert_abs_diff_eq!(numeric_alpha_on_chart(&plane, x, y).unwrap(), 1.0 / r, epsilon = 1e-12);
        }
        assert!(matches!(numeric_alpha_on_chart(&plane, 0.0, 0.0), Err(Error::SingularPoint { .. })));

        let saddle = graph("x*y").to_chart("saddle", E1Orientation::AlongU);
        assert_abs_diff_eq!(numeric_alpha_on_chart(&saddle, 0.4, 0.2).unwrap(), 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(numeric_alpha_on_chart(&saddle, -0.4, 0.2).unwrap(), -1.25, epsilon = 1e-12);

        let heli = helicoid_chart(&lin(), Rect::new(-2.0, 2.0, -3.0, 3.0));
        assert_abs_diff_eq!(numeric_alpha_on_chart(&heli, 1.0, 0.0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn metric_on_closed_form_charts() {
        let con = conicoid_chart(Rect::new(-2.0, 2.0, 0.0, 6.0));
        for (t, s) in [(0.0, 0.3), (1.0, 2.0), (-1.7, 5.1)] {
            let (alpha, a, b) = conicoid_invariants(t);
            assert_abs_diff_eq!(numeric_alpha_on_chart(&con, t, s).unwrap(), alpha, epsilon = 1e-12);
            let (na, nb) = numeric_metric_on_chart(&con, t, s).unwrap();
            assert_abs_diff_eq!(na, a, epsilon = 1e-12);
            assert_abs_diff_eq!(nb, b, epsilon = 1e-12);
        }
        let th = YFunction::from_fns2(|t| -t + 0.1 * t * t, |t| -1.0 + 0.2 * t, |_| 0.2);
        let heli = helicoid_chart(&th, Rect::new(-3.0, 3.0, -1.0, 1.0));
        for (s, t) in [(0.3, 0.2), (1.6, -0.5), (-2.0, 0.9)] {
            let (alpha, a, b) = helicoid_invariants(&th, s, t);
            assert_abs_diff_eq!(numeric_alpha_on_chart(&heli, s, t).unwrap(), alpha, epsilon = 1e-12);
            let (na, nb) = numeric_metric_on_chart(&heli, s, t).unwrap();
            assert_abs_diff_eq!(na, a, epsilon = 1e-12);
            assert_abs_diff_eq!(nb, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn ruled_invariants_agree_with_tangency() {
        let c = GeneratingCurve::new(
            YFunction::from_fns2(|t| 0.3 * t.sin(), |t| 0.3 * t.cos(), |t| -0.3 * t.sin()),
            YFunction::from_fns2(|t| 0.2 * t * t, |t| 0.4 * t, |_| 0.4),
            YFunction::from_fns2(|t| 2.0 * t, |_| 2.0, |_| 0.0),
            (0.0, 3.0),
        );
        let chart = ruled_surface(&c, 2.0).to_chart("ruled");
        for (r, t) in [(0.3, 0.2), (-1.1, 2.5), (1.7, 1.0)] {
            let (alpha, a, b) = curve_invariants(&c, r, t).unwrap();
            assert_abs_diff_eq!(numeric_alpha_on_chart(&chart, r, t).unwrap(), alpha, epsilon = 1e-10);
            let (na, nb) = numeric_metric_on_chart(&chart, r, t).unwrap();
            assert_abs_diff_eq!(na, a, epsilon = 1e-10);
            assert_abs_diff_eq!(nb, b, epsilon = 1e-10);
            assert!(numeric_h_on_chart(&chart, r, t).unwrap().abs() <= 1e-6);
        }
    }

    #[test]
    fn h_examples() {
        let plane = graph("0").to_chart("plane", E1Orientation::Canonical);
        assert!(numeric_h_on_chart(&plane, 0.6, -0.2).unwrap().abs() <= 1e-8);
        let bowl = graph("x^2").to_chart("bowl", E1Orientation::Canonical);
        assert!(numeric_h_on_chart(&bowl, 1.0, 0.0).unwrap().abs() > 1e-3);
        let sad = bernstein_saddle(0.6, 0.8, &YFunction::from_fns2(|y| y.sin(), |y| y.cos(), |y| -y.sin()), w()).unwrap();
        assert!(numeric_h_on_chart(&sad, 0.5, 0.2).unwrap().abs() <= 1e-6);
        for name in crate::construct::EXAMPLE_NAMES {
            let chart = crate::construct::example_chart(name).unwrap();
            let (u, v) = (0.55 * chart.domain.x_max + 0.02, 0.4 * chart.domain.y_max + 0.03);
            assert!(numeric_h_on_chart(&chart, u, v).unwrap().abs() <= 1e-6, "{name}");
        }
    }

    #[test]
    fn graph_characteristic_direction() {
        let e = characteristic_direction(&graph("0"), 1.0, 0.0).unwrap();
        assert_eq!((e.c1, e.c2), (1.0, 0.0));
        let e = characteristic_direction(&graph("x*y"), 1.0, 1.0).unwrap();
        assert_eq!((e.c1, e.c2), (1.0, 0.0));
        assert!(characteristic_direction(&graph("x*y"), 0.0, 0.4).is_err());
        let e = characteristic_direction(&graph("x^2 - y*sin(x)"), 0.3, 0.9).unwrap();
        assert!((e.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn traced_characteristics_are_codazzi() {
        let th = YFunction::from_fns2(|t| t + 0.3 * t.sin(), |t| 1.0 + 0.3 * t.cos(), |t| -0.3 * t.sin());
        let chart = helicoid_chart(&th, Rect::new(-2.0, 2.0, -1.0, 1.0));
        let path = trace_characteristic(&chart, -1.0, 0.3, 0.01, 150).unwrap();
        assert_eq!(path.len(), 151);
        // u-lines are characteristic and arc length equals Δs
        assert!(path.iter().all(|p| (p.1 - 0.3).abs() <= 1e-12));
        assert_abs_diff_eq!(path[150].0, 0.5, epsilon = 1e-10);
        let alpha = YFunction::from_fn({
            let c = chart.clone();
            move |s| numeric_alpha_on_chart(&c, s, 0.3).unwrap()
        });
        for &(s, _) in path.iter().step_by(25).skip(1) {
            assert!(lienard_residual(&alpha, s, 0.0).abs() <= 1e-4);
        }
    }

    #[test]
    fn singular_set_examples() {
        let r = singular_set(&graph("0"));
        assert!(r.curves.is_empty() && r.points.len() == 1);
        assert!(r.points[0].x.abs() <= 1e-12 && r.points[0].y.abs() <= 1e-12);

        let (chart, (px, py)) = bernstein_plane(0.4, -0.3, 2.0, w());
        let r = singular_set(chart.graph.as_ref().unwrap());
        assert_eq!(r.points.len(), 1);
        assert!((r.points[0].x - px).abs() <= 1e-9 && (r.points[0].y - py).abs() <= 1e-9);

        let r = singular_set(&graph("x*y"));
        assert!(r.points.is_empty());
        assert_eq!(r.curves.len(), 1);
        let c = &r.curves[0];
        assert!(c.points.iter().all(|p| p[0].abs() <= 1e-10));
        let ys: Vec<f64> = c.points.iter().map(|p| p[1]).collect();
        assert!(ys.iter().cloned().fold(f64::INFINITY, f64::min) < -0.99);
        assert!(ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 0.99);

        let r = singular_set(&graph("x*y + y^2"));
        assert_eq!(r.curves.len(), 1);
        assert!(r.curves[0].points.iter().all(|p| (p[0] + p[1]).abs() <= 1e-10));

        let r = singular_set(&graph("x^2"));
        assert!(r.curves.is_empty() && r.points.len() == 1);
    }

    #[test]
    fn curved_singular_curve() {
        // u = xy + y³ has F = (0, 2x + 3y²)
        let r = singular_set(&graph("x*y + y^3"));
        assert!(r.points.is_empty() && r.failures.is_empty());
        assert_eq!(r.curves.len(), 1);
        let c = &r.curves[0];
        assert!(!c.closed);
        assert!(c.points.iter().all(|p| (p[0] + 1.5 * p[1] * p[1]).abs() <= 1e-10));
        // brute force: every grid node where |F| is small lies near the polyline
        let g = graph("x*y + y^3");
        for (x, y) in Grid::uniform(w(), 101, 101).points() {
            if sing_f(&g, Vector2::new(x, y)).norm() <= 1e-3 {
                assert!(near_curve(c, Vector2::new(x, y), 1e-3));
            }
        }
    }

    #[test]
    fn go_through_examples() {
        let g = graph("x*y");
        let res = go_through_check(&g, (0.0, 0.3), (1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(res.cos_zeta_plus, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(res.cos_zeta_minus, -1.0, epsilon = 1e-3);
        assert!(res.flip_detected);
        assert_eq!(res.expected_zeta_plus, 1.0);

        assert!(matches!(go_through_check(&graph("0"), (0.0, 0.0), (1.0, 0.0)), Err(Error::PreconditionFailed(_))));
        assert!(matches!(go_through_check(&g, (0.1, 0.3), (1.0, 0.0)), Err(Error::PreconditionFailed(_))));
        assert!(matches!(go_through_check(&g, (0.0, 0.3), (0.0, 1.0)), Err(Error::PreconditionFailed(_))));

        let sad = bernstein_saddle(1.0, 0.0, &YFunction::from_fns2(|y| y * y, |y| 2.0 * y, |_| 2.0), w()).unwrap();
        let res = go_through_check(sad.graph.as_ref().unwrap(), (0.2, -0.2), (1.0, 0.3)).unwrap();
        assert!(res.flip_detected);
        assert!((res.cos_zeta_plus - res.expected_zeta_plus).abs() <= 1e-3);
        assert!((res.cos_eta_plus - res.expected_eta_plus).abs() <= 1e-3);
    }

    #[test]
    fn go_through_tilted_curve() {
        // u = −x²/2 + xy: F = (−x, 2x), a singular curve x = 0 with u_xx ≠ 0
        let g = graph("-x^2/2 + x*y");
        let res = go_through_check(&g, (0.0, 0.2), (1.0, 1.0)).unwrap();
        assert!((res.cos_zeta_plus - res.expected_zeta_plus).abs() <= 1e-3);
        assert!((res.cos_eta_plus - res.expected_eta_plus).abs() <= 1e-3);
        assert!((res.cos_zeta_minus + res.expected_zeta_plus).abs() <= 1e-3);
        assert!(res.flip_detected);
    }

    struct Bent(RuledChart);

    impl RulingMap for Bent {
        fn point(&self, r: f64, t: f64) -> HPoint {
            let p = self.0.point(r, t);
            HPoint::new(p.x, p.y, p.z + 0.01 * r * r)
        }
        fn d_r(&self, r: f64, t: f64) -> Vec3 {
            self.0.d_r(r, t) + Vec3::new(0.0, 0.0, 0.02 * r)
        }
    }

    #[test]
    fn legendrian_examples() {
        let flat = ruled_surface(&GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 6.0)), 1.0);
        let samples = [(0.5, 0.1), (1.0, 2.0), (-0.7, 4.0)];
        let rep = legendrian_line_check(&flat, &samples);
        assert!(rep.max_contact <= 1e-15);
        assert!(rep.max_second_difference <= 1e-15);
        let screw = ruled_surface(&GeneratingCurve::new(0.3, lin(), lin(), (0.0, 6.0)), 1.0);
        let rep = legendrian_line_check(&screw, &samples);
        assert!(rep.max_contact <= 1e-12 && rep.max_second_difference <= 1e-12);
        let rep = legendrian_line_check(&Bent(screw), &samples);
        assert!(rep.max_contact > 1e-3);
    }

    #[test]
    fn helicoid_types_from_numeric_alpha() {
        let th = YFunction::from_fns2(|t| -t, |_| -1.0, |_| 0.0);
        let chart = helicoid_chart(&th, Rect::new(-3.0, 3.0, 0.0, 1.0));
        assert_eq!(classify_chart_region(&chart, (-0.9, 0.9), (0.0, 1.0)).unwrap(), SurfaceType::TypeIII);
        assert_eq!(classify_chart_region(&chart, (1.2, 2.5), (0.0, 1.0)).unwrap(), SurfaceType::TypeII);
        assert_eq!(classify_chart_region(&chart, (-2.5, -1.2), (0.0, 1.0)).unwrap(), SurfaceType::TypeII);
        let up = helicoid_chart(&lin(), Rect::new(-3.0, 3.0, 0.0, 1.0));
        assert_eq!(classify_chart_region(&up, (-2.0, 2.0), (0.0, 1.0)).unwrap(), SurfaceType::TypeI);
    }

    #[test]
    fn conicoid_normal_form() {
        let chart = conicoid_chart(Rect::new(-1.0, 1.0, 0.0, 6.0));
        let res = chart_normal_form(&chart, (-0.5, 0.5), (0.5, 3.0)).unwrap();
        assert!(!res.flipped);
        let nf = &res.normal_form;
        assert_eq!(nf.surface_type, SurfaceType::TypeI);
        for i in 0..7 {
            let st = nf.y_domain.0 + (nf.y_domain.1 - nf.y_domain.0) * (i as f64 + 0.5) / 7.0;
            assert!((nf.zeta2.as_ref().unwrap().eval(st) - 1.0).abs() <= 1e-7);
            assert!((nf.zeta1.eval(st) - (st - 0.5)).abs() <= 1e-7, "{st}");
        }
    }

    #[test]
    fn helicoid_normal_form_flips_outside() {
        let th = YFunction::from_fns2(|t| -t, |_| -1.0, |_| 0.0);
        let chart = helicoid_chart(&th, Rect::new(-3.0, 3.0, 0.0, 1.0));
        let inside = chart_normal_form(&chart, (-0.5, 0.5), (0.0, 1.0)).unwrap();
        let outside = chart_normal_form(&chart, (1.5, 2.5), (0.0, 1.0)).unwrap();
        assert!(!inside.flipped && outside.flipped);
        assert_eq!(inside.normal_form.surface_type, SurfaceType::TypeIII);
        assert_eq!(outside.normal_form.surface_type, SurfaceType::TypeII);
        let z2 = outside.normal_form.zeta2.as_ref().unwrap();
        assert!((z2.eval(outside.normal_form.y_domain.0 + 0.3) + 1.0).abs() <= 1e-7);
    }
}
