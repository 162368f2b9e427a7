//! Explicit p-minimal surfaces.
//!
//! Ruled surfaces are generated by a curve `C(θ)` together with the
//! Legendrian straight lines through it in the direction
//! `cos θ ė₁ + sin θ ė₂`. In the coordinates `(r, θ)` their α-function is of
//! general form with `c1 = D(θ)` and `c2 = ζ₂(θ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartMap, E1Orientation, GraphJet, GraphSurface, SurfaceChart};
use crate::error::{Error, Result};
use crate::fundamental::Rect;
use crate::func::YFunction;
use crate::heisenberg::{contact_value, HPoint, RigidMotion, Vec3};
use crate::quad::PANELS_PER_UNIT;

/// Threshold below which the denominators of the ruled invariants count as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `θ ↦ (x(θ), y(θ), z(θ))` on a parameter interval.
#[derive(Debug, Clone)]
pub struct GeneratingCurve {
    pub x: YFunction,
    pub y: YFunction,
    pub z: YFunction,
    pub interval: (f64, f64),
}

impl GeneratingCurve {
    pub fn new(
        x: impl Into<YFunction>,
        y: impl Into<YFunction>,
        z: impl Into<YFunction>,
        interval: (f64, f64),
    ) -> Self {
        GeneratingCurve {
            x: x.into(),
            y: y.into(),
            z: z.into(),
            interval,
        }
    }

    pub fn point(&self, t: f64) -> HPoint {
        HPoint::new(self.x.eval(t), self.y.eval(t), self.z.eval(t))
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        Vec3::new(self.x.d1(t), self.y.d1(t), self.z.d1(t))
    }

    /// `Θ(C′)`.
    pub fn contact(&self, t: f64) -> f64 {
        contact_value(self.point(t), self.velocity(t))
    }

    /// `D = y′ cos θ − x′ sin θ`.
    pub fn d(&self, t: f64) -> f64 {
        self.y.d1(t) * t.cos() - self.x.d1(t) * t.sin()
    }

    /// `Q = x′ cos θ + y′ sin θ`.
    pub fn q(&self, t: f64) -> f64 {
        self.x.d1(t) * t.cos() + self.y.d1(t) * t.sin()
    }

    fn d_prime(&self, t: f64) -> f64 {
        let (c, s) = (t.cos(), t.sin());
        self.y.d2(t) * c - self.y.d1(t) * s - self.x.d2(t) * s - self.x.d1(t) * c
    }

    fn q_prime(&self, t: f64) -> f64 {
        let (c, s) = (t.cos(), t.sin());
        self.x.d2(t) * c - self.x.d1(t) * s + self.y.d2(t) * s + self.y.d1(t) * c
    }

    /// Largest gap between the supplied first derivatives and central
    /// differences of the values at `n` interior points.
    pub fn derivative_mismatch(&self, n: usize) -> f64 {
        let (lo, hi) = self.interval;
        let h = 1e-5 * lo.abs().max(hi.abs()).max(1.0);
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .flat_map(|t| {
                [&self.x, &self.y, &self.z]
                    .map(|f| ((f.eval(t + h) - f.eval(t - h)) / (2.0 * h) - f.d1(t)).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// A surface swept by lines through a base point, parametrized by the
/// distance `r` along the line and a second coordinate.
pub trait RulingMap: Send + Sync {
    fn point(&self, r: f64, t: f64) -> HPoint;
    /// Exact `∂/∂r` of [`RulingMap::point`].
    fn d_r(&self, r: f64, t: f64) -> Vec3;
}

/// `Y(r, θ) = C(θ) ∘ (r cos θ, r sin θ, 0)`.
#[derive(Debug, Clone)]
pub struct RuledChart {
    pub curve: GeneratingCurve,
    /// `(r, θ)` domain.
    pub domain: Rect,
}

impl RulingMap for RuledChart {
    fn point(&self, r: f64, t: f64) -> HPoint {
        let p = self.curve.point(t);
        let (c, s) = (t.cos(), t.sin());
        HPoint::new(p.x + r * c, p.y + r * s, p.z + r * (p.y * c - p.x * s))
    }

    fn d_r(&self, _r: f64, t: f64) -> Vec3 {
        let p = self.curve.point(t);
        let (c, s) = (t.cos(), t.sin());
        Vec3::new(c, s, p.y * c - p.x * s)
    }
}

impl ChartMap for RuledChart {
    fn point(&self, u: f64, v: f64) -> HPoint {
        RulingMap::point(self, u, v)
    }

    fn partials(&self, r: f64, t: f64) -> (Vec3, Vec3) {
        let p = self.curve.point(t);
        let dp = self.curve.velocity(t);
        let (c, s) = (t.cos(), t.sin());
        let y_t = Vec3::new(
            dp.x - r * s,
            dp.y + r * c,
            dp.z + r * (dp.y * c - dp.x * s) - r * (p.y * s + p.x * c),
        );
        (self.d_r(r, t), y_t)
    }
}

impl RuledChart {
    pub fn to_chart(&self, name: &str) -> SurfaceChart {
        SurfaceChart::new(self.clone(), name, self.domain, E1Orientation::AlongU)
    }
}

/// The ruled surface of `c` over `|r| ≤ r_max` and the curve's interval.
pub fn ruled_surface(c: &GeneratingCurve, r_max: f64) -> RuledChart {
    RuledChart {
        curve: c.clone(),
        domain: Rect::new(-r_max, r_max, c.interval.0, c.interval.1),
    }
}

/// `(α, a, b)` of the ruled surface at `(r, θ)` in the coordinates `(r, θ)`.
pub fn curve_invariants(c: &GeneratingCurve, r: f64, t: f64) -> Result<(f64, f64, f64)> {
    let d = c.d(t);
    let zeta2 = c.contact(t) - d * d;
    let rd = r + d;
    if rd.abs() <= DEGENERACY_TOL && zeta2.abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateChart { r, theta: t });
    }
    let den = rd * rd + zeta2;
    if den.abs() <= DEGENERACY_TOL {
        return Err(Error::singular(format!("(r, θ) = ({r}, {t})"), "the α denominator vanishes"));
    }
    let alpha = rd / den;
    let b = 1.0 / (den * (1.0 + alpha * alpha).sqrt());
    Ok((alpha, -c.q(t) * b, b))
}

fn panels_per_unit(interval: (f64, f64)) -> f64 {
    PANELS_PER_UNIT / (interval.1 - interval.0).abs().max(1e-12)
}

/// `(ζ₁, ζ₂)` of the ruled surface, with `ζ₁` integrated from the left end
/// of the curve's interval.
pub fn zeta_from_curve(c: &GeneratingCurve) -> Result<(YFunction, YFunction)> {
    let (lo, hi) = c.interval;
    let (c1, c2) = (Arc::new(c.clone()), Arc::new(c.clone()));
    let q = YFunction::from_fns(move |t| c1.q(t), move |t| c2.q_prime(t));
    let gamma = YFunction::integral_of(q, lo, 0.0, lo, hi, panels_per_unit(c.interval))
        .map_err(|t| Error::QuadratureFailure { x: 0.0, y: t })?;
    let (ca, cb) = (Arc::new(c.clone()), Arc::new(c.clone()));
    let (ga, gb) = (gamma.clone(), gamma);
    let zeta1 = YFunction::from_fns(move |t| ca.d(t) - ga.eval(t), move |t| cb.d_prime(t) - gb.d1(t));
    let (ca, cb) = (Arc::new(c.clone()), Arc::new(c.clone()));
    let zeta2 = YFunction::from_fns(
        move |t| {
            let d = ca.d(t);
            ca.contact(t) - d * d
        },
        move |t| {
            let p = cb.point(t);
            let contact_prime = cb.z.d2(t) + p.x * cb.y.d2(t) - p.y * cb.x.d2(t);
            contact_prime - 2.0 * cb.d(t) * cb.d_prime(t)
        },
    );
    Ok((zeta1, zeta2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Immersion {
    ImmersedEverywhere,
    DegenerateAt { r: f64 },
}

/// Where the ruled surface fails to be immersed, per `θ`.
pub fn immersion_locus(c: &GeneratingCurve, thetas: &[f64]) -> Vec<(f64, Immersion)> {
    thetas
        .iter()
        .map(|&t| {
            let d = c.d(t);
            let status = if (c.contact(t) - d * d).abs() <= DEGENERACY_TOL {
                Immersion::DegenerateAt { r: -d }
            } else {
                Immersion::ImmersedEverywhere
            };
            (t, status)
        })
        .collect()
}

/// The generating curve with invariants `(ζ₁, ζ₂)` in the gauge where the
/// curve velocity is perpendicular to the rulings, starting at the origin.
pub fn curve_from_zeta(zeta1: &YFunction, zeta2: &YFunction, interval: (f64, f64)) -> Result<GeneratingCurve> {
    let (lo, hi) = interval;
    let ppu = panels_per_unit(interval);
    let fail = |t: f64| Error::QuadratureFailure { x: 0.0, y: t };
    let (z1, z1b) = (zeta1.clone(), zeta1.clone());
    let xp = YFunction::from_fns(
        move |t| -z1.eval(t) * t.sin(),
        move |t| -z1b.d1(t) * t.sin() - z1b.eval(t) * t.cos(),
    );
    let (z1, z1b) = (zeta1.clone(), zeta1.clone());
    let yp = YFunction::from_fns(
        move |t| z1.eval(t) * t.cos(),
        move |t| z1b.d1(t) * t.cos() - z1b.eval(t) * t.sin(),
    );
    let x = YFunction::integral_of(xp.clone(), lo, 0.0, lo, hi, ppu).map_err(fail)?;
    let y = YFunction::integral_of(yp.clone(), lo, 0.0, lo, hi, ppu).map_err(fail)?;
    let (x1, y1, z1, z2, xp1, yp1) = (x.clone(), y.clone(), zeta1.clone(), zeta2.clone(), xp.clone(), yp.clone());
    let (x2, y2, z1b, z2b) = (x.clone(), y.clone(), zeta1.clone(), zeta2.clone());
    let zp = YFunction::from_fns(
        move |t| {
            let p = z1.eval(t);
            z2.eval(t) + p * p + y1.eval(t) * xp1.eval(t) - x1.eval(t) * yp1.eval(t)
        },
        move |t| {
            z2b.d1(t) + 2.0 * z1b.eval(t) * z1b.d1(t) + y2.eval(t) * xp.d1(t) - x2.eval(t) * yp.d1(t)
        },
    );
    let z = YFunction::integral_of(zp, lo, 0.0, lo, hi, ppu).map_err(fail)?;
    Ok(GeneratingCurve { x, y, z, interval })
}

/// Graph of `u = Ax + By + C` and its only singular point `(−B, A)`.
pub fn bernstein_plane(a: f64, b: f64, c: f64, window: Rect) -> (SurfaceChart, (f64, f64)) {
    let g = GraphSurface::new(
        move |x, y| GraphJet {
            u: a * x + b * y + c,
            ux: a,
            uy: b,
            ..GraphJet::default()
        },
        window,
    );
    (g.to_chart("plane", E1Orientation::Canonical), (-b, a))
}

/// The left translation taking the graph of `Ax + By + C` onto `u = 0`.
pub fn bernstein_plane_motion(a: f64, b: f64, c: f64) -> RigidMotion {
    RigidMotion::translation(HPoint::new(b, -a, -c))
}

/// Graph of `u = −ABx² + (A² − B²)xy + ABy² + g(−Bx + Ay)` with `A² + B² = 1`.
pub fn bernstein_saddle(a: f64, b: f64, g: &YFunction, window: Rect) -> Result<SurfaceChart> {
    let norm2 = a * a + b * b;
    if (norm2 - 1.0).abs() > 1e-12 {
        return Err(Error::BadRotation { a, b, norm2 });
    }
    let g = g.clone();
    let surface = GraphSurface::new(
        move |x, y| {
            let w = -b * x + a * y;
            let (g0, g1, g2) = (g.eval(w), g.d1(w), g.d2(w));
            let m = a * a - b * b;
            GraphJet {
                u: -a * b * x * x + m * x * y + a * b * y * y + g0,
                ux: -2.0 * a * b * x + m * y - b * g1,
                uy: m * x + 2.0 * a * b * y + a * g1,
                uxx: -2.0 * a * b + b * b * g2,
                uxy: m - a * b * g2,
                uyy: 2.0 * a * b + a * a * g2,
            }
        },
        window,
    );
    Ok(surface.to_chart("saddle", E1Orientation::AlongU))
}

/// The rotation taking the saddle graph with parameters `(A, B)` onto
/// `u = XY + g(Y)`.
pub fn bernstein_saddle_motion(a: f64, b: f64) -> RigidMotion {
    RigidMotion::rotation((-b).atan2(a))
}

/// `X(s, t) = (s cos θ(t), s sin θ(t), t)` with `(u, v) = (s, t)`.
pub fn helicoid_chart(theta: &YFunction, domain: Rect) -> SurfaceChart {
    let (t1, t2) = (theta.clone(), theta.clone());
    SurfaceChart::with_partials(
        "helicoid",
        domain,
        E1Orientation::AlongU,
        move |s, t| {
            let th = t1.eval(t);
            HPoint::new(s * th.cos(), s * th.sin(), t)
        },
        move |s, t| {
            let (th, dth) = (t2.eval(t), t2.d1(t));
            let (c, sn) = (th.cos(), th.sin());
            (Vec3::new(c, sn, 0.0), Vec3::new(-s * sn * dth, s * c * dth, 1.0))
        },
    )
}

/// Closed-form `(α, a, b)` of the helicoid in the coordinates `(s, t)`.
pub fn helicoid_invariants(theta: &YFunction, s: f64, t: f64) -> (f64, f64, f64) {
    let dth = theta.d1(t);
    let den = s * s * dth + 1.0;
    let alpha = s * dth / den;
    (alpha, 0.0, 1.0 / (den * (1.0 + alpha * alpha).sqrt()))
}

/// `X(s, t) = (cos s + t sin s, sin s − t cos s, t)` with `(u, v) = (t, s)`.
pub fn conicoid_chart(domain: Rect) -> SurfaceChart {
    SurfaceChart::with_partials(
        "conicoid",
        domain,
        E1Orientation::AlongU,
        |t, s| HPoint::new(s.cos() + t * s.sin(), s.sin() - t * s.cos(), t),
        |t, s| {
            let (c, sn) = (s.cos(), s.sin());
            (Vec3::new(sn, -c, 1.0), Vec3::new(-sn + t * c, c + t * sn, 0.0))
        },
    )
}

/// Closed-form `(α, a, b)` of the conicoid in the coordinates `(t, s)`.
pub fn conicoid_invariants(t: f64) -> (f64, f64, f64) {
    let ab = 1.0 / (t.powi(4) + 3.0 * t * t + 1.0).sqrt();
    (t / (1.0 + t * t), ab, ab)
}

/// Names accepted by [`example_chart`].
pub const EXAMPLE_NAMES: [&str; 4] = ["plane", "saddle", "helicoid", "conicoid"];

/// The standard example surfaces on modest domains.
pub fn example_chart(name: &str) -> Result<SurfaceChart> {
    use std::f64::consts::PI;
    match name {
        "plane" => {
            let c = GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 2.0 * PI));
            let mut chart = ruled_surface(&c, 1.0).to_chart("plane");
            chart.domain = Rect::new(0.0, 1.0, 0.0, 2.0 * PI);
            Ok(chart)
        }
        "saddle" => bernstein_saddle(1.0, 0.0, &YFunction::constant(0.0), Rect::new(-1.0, 1.0, -1.0, 1.0)),
        "helicoid" => Ok(helicoid_chart(
            &YFunction::from_fns2(|t| t, |_| 1.0, |_| 0.0),
            Rect::new(-1.0, 1.0, 0.0, 2.0 * PI),
        )),
        "conicoid" => Ok(conicoid_chart(Rect::new(-1.0, 1.0, 0.0, 2.0 * PI))),
        _ => Err(Error::InvalidInput(format!(
            "unknown example {name}; expected one of {}",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{apply_motion, frame_at};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lin() -> YFunction {
        YFunction::from_fns2(|t| t, |_| 1.0, |_| 0.0)
    }

    fn wiggly() -> GeneratingCurve {
        GeneratingCurve::new(
            YFunction::from_fns2(|t| 0.3 * t.sin(), |t| 0.3 * t.cos(), |t| -0.3 * t.sin()),
            YFunction::from_fns2(|t| 0.2 * (2.0 * t).cos(), |t| -0.4 * (2.0 * t).sin(), |t| -0.8 * (2.0 * t).cos()),
            YFunction::from_fns2(|t| t + 0.1 * t * t, |t| 1.0 + 0.2 * t, |_| 0.2),
            (0.0, 3.0),
        )
    }

    #[test]
    fn ruled_surface_examples() {
        let plane = ruled_surface(&GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 1.0)), 1.0);
        assert_eq!(RulingMap::point(&plane, 2.0, 0.0), HPoint::new(2.0, 0.0, 0.0));
        let p = RulingMap::point(&plane, 0.5, 1.0);
        assert_abs_diff_eq!(p.x, 0.5 * 1f64.cos(), epsilon = 1e-15);
        assert_eq!(p.z, 0.0);
        let screw = ruled_surface(&GeneratingCurve::new(0.0, 0.0, lin(), (0.0, 1.0)), 1.0);
        assert_eq!(RulingMap::point(&screw, 1.0, 0.7).z, 0.7);
    }

    #[test]
    fn ruling_direction_is_horizontal_unit() {
        let chart = ruled_surface(&wiggly(), 2.0);
        for (r, t) in [(0.3, 0.2), (-1.1, 2.5), (1.7, 1.0)] {
            let p = RulingMap::point(&chart, r, t);
            let d = chart.d_r(r, t);
            assert!(contact_value(p, d).abs() <= 1e-12);
            let [e1, e2, _] = frame_at(p);
            assert!((d - (t.cos() * e1 + t.sin() * e2)).norm() <= 1e-12);
        }
    }

    #[test]
    fn ruled_partials_match_differences() {
        let chart = ruled_surface(&wiggly(), 2.0);
        let fd = SurfaceChart::from_fn("fd", chart.domain, E1Orientation::AlongU, {
            let c = chart.clone();
            move |r, t| RulingMap::point(&c, r, t)
        });
        for (r, t) in [(0.3, 0.2), (-1.1, 2.5)] {
            let (a, b) = ChartMap::partials(&chart, r, t);
            let (c, d) = fd.partials(r, t);
            assert!((a - c).norm() <= 1e-8 && (b - d).norm() <= 1e-8);
        }
    }

    #[test]
    fn curve_invariant_examples() {
        let screw = GeneratingCurve::new(0.0, 0.0, lin(), (0.0, 1.0));
        let (alpha, a, b) = curve_invariants(&screw, 1.0, 0.4).unwrap();
        assert_abs_diff_eq!(alpha, 0.5, epsilon = 1e-15);
        assert_eq!(a, 0.0);
        assert_abs_diff_eq!(b, 1.0 / 5f64.sqrt(), epsilon = 1e-15);

        let flat = GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 1.0));
        assert_abs_diff_eq!(curve_invariants(&flat, 2.0, 0.3).unwrap().0, 0.5, epsilon = 1e-15);
        assert!(matches!(curve_invariants(&flat, 0.0, 0.3), Err(Error::DegenerateChart { .. })));

        let neg = GeneratingCurve::new(0.0, 0.0, YFunction::from_fns2(|t| -t, |_| -1.0, |_| 0.0), (0.0, 1.0));
        assert!(matches!(curve_invariants(&neg, 1.0, 0.3), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn zeta_examples() {
        let screw = GeneratingCurve::new(0.0, 0.0, lin(), (0.0, 1.0));
        let (z1, z2) = zeta_from_curve(&screw).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(z1.eval(t), 0.0);
            assert_eq!(z2.eval(t), 1.0);
        }
        let flat = GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 1.0));
        let (z1, z2) = zeta_from_curve(&flat).unwrap();
        assert_eq!((z1.eval(0.3), z2.eval(0.3)), (0.0, 0.0));

        // the circle (−sin θ, cos θ) gives D = 0, Q = −1 and Θ(C′) = 1 + z′
        let circle = |z: YFunction| {
            GeneratingCurve::new(
                YFunction::from_fns2(|t| -t.sin(), |t| -t.cos(), |t| t.sin()),
                YFunction::from_fns2(|t| t.cos(), |t| -t.sin(), |t| -t.cos()),
                z,
                (0.0, 6.0),
            )
        };
        let (z1, z2) = zeta_from_curve(&circle(0.0.into())).unwrap();
        assert_abs_diff_eq!(z1.eval(2.0), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z2.eval(2.0), 1.0, epsilon = 1e-14);
        let (_, z2) = zeta_from_curve(&circle(lin())).unwrap();
        assert_abs_diff_eq!(z2.eval(2.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn zeta_derivatives_match_differences() {
        let (z1, z2) = zeta_from_curve(&wiggly()).unwrap();
        for t in [0.4, 1.3, 2.2] {
            let h = 1e-5;
            assert_abs_diff_eq!(z1.d1(t), (z1.eval(t + h) - z1.eval(t - h)) / (2.0 * h), epsilon = 1e-7);
            assert_abs_diff_eq!(z2.d1(t), (z2.eval(t + h) - z2.eval(t - h)) / (2.0 * h), epsilon = 1e-7);
        }
    }

    #[test]
    fn immersion_examples() {
        let screw = GeneratingCurve::new(0.0, 0.0, lin(), (0.0, 1.0));
        assert!(immersion_locus(&screw, &[0.0, 0.5]).iter().all(|(_, s)| *s == Immersion::ImmersedEverywhere));
        let flat = GeneratingCurve::new(0.0, 0.0, 0.0, (0.0, 1.0));
        assert_eq!(immersion_locus(&flat, &[0.2])[0].1, Immersion::DegenerateAt { r: 0.0 });
        let neg = GeneratingCurve::new(0.0, 0.0, YFunction::from_fns2(|t| -t, |_| -1.0, |_| 0.0), (0.0, 1.0));
        assert_eq!(immersion_locus(&neg, &[0.2])[0].1, Immersion::ImmersedEverywhere);
    }

    #[test]
    fn curve_from_zeta_examples() {
        let c = curve_from_zeta(&0.0.into(), &1.0.into(), (0.0, 2.0)).unwrap();
        for t in [0.0, 0.7, 2.0] {
            let p = c.point(t);
            assert_eq!((p.x, p.y), (0.0, 0.0));
            assert_abs_diff_eq!(p.z, t, epsilon = 1e-14);
        }
        let c = curve_from_zeta(&0.0.into(), &0.0.into(), (0.0, 2.0)).unwrap();
        assert_eq!(c.point(1.3), HPoint::ORIGIN);
        assert!(c.derivative_mismatch(10) <= 1e-8);
    }

    #[test]
    fn bernstein_plane_congruence() {
        let w = Rect::new(-2.0, 2.0, -2.0, 2.0);
        let (chart, sing) = bernstein_plane(1.0, 2.0, 3.0, w);
        assert_eq!(sing, (-2.0, 1.0));
        let m = bernstein_plane_motion(1.0, 2.0, 3.0);
        for (x, y) in [(0.3, -1.2), (1.9, 0.4)] {
            assert!(apply_motion(&m, chart.point(x, y)).z.abs() <= 1e-12);
        }
    }

    #[test]
    fn bernstein_saddle_examples() {
        let w = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let chart = bernstein_saddle(1.0, 0.0, &0.0.into(), w).unwrap();
        assert_eq!(chart.point(0.5, 0.4).z, 0.2);
        assert!(matches!(
            bernstein_saddle(1.0, 0.1, &0.0.into(), w),
            Err(Error::BadRotation { .. })
        ));
        let g = YFunction::from_fns2(|y| y.sin(), |y| y.cos(), |y| -y.sin());
        let (a, b) = (0.6, -0.8);
        let chart = bernstein_saddle(a, b, &g, w).unwrap();
        let m = bernstein_saddle_motion(a, b);
        for (x, y) in [(0.3, -0.2), (-0.9, 0.7)] {
            let p = apply_motion(&m, chart.point(x, y));
            assert!((p.z - p.x * p.y - g.eval(p.y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn helicoid_and_conicoid_closed_forms() {
        let (alpha, a, _) = helicoid_invariants(&lin(), 1.0, 0.3);
        assert_eq!((alpha, a), (0.5, 0.0));
        let flat = YFunction::constant(0.4);
        assert_eq!(helicoid_invariants(&flat, 0.7, 0.0).0, 0.0);
        assert_eq!(conicoid_invariants(0.0), (0.0, 1.0, 1.0));
        let (alpha, a, b) = conicoid_invariants(1.0);
        assert_eq!(alpha, 0.5);
        assert_abs_diff_eq!(a, 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(a, b);
        for name in EXAMPLE_NAMES {
            assert_eq!(example_chart(name).unwrap().name, name);
        }
        assert!(example_chart("torus").is_err());
    }

    proptest! {
        #[test]
        fn rulings_are_legendrian_lines(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 0.5f64..3.0, r in -2.0f64..2.0, t in 0.0f64..6.0) {
            let c = GeneratingCurve::new(
                YFunction::from_fns2(move |t| a * (k * t).sin(), move |t| a * k * (k * t).cos(), move |t| -a * k * k * (k * t).sin()),
                YFunction::from_fns2(move |t| b * t * t, move |t| 2.0 * b * t, move |_| 2.0 * b),
                YFunction::from_fns2(move |t| (a + b) * t, move |_| a + b, |_| 0.0),
                (0.0, 6.0),
            );
            let chart = ruled_surface(&c, 2.0);
            prop_assert!(contact_value(RulingMap::point(&chart, r, t), chart.d_r(r, t)).abs() <= 1e-12);
            let h = 0.25;
            let second = RulingMap::point(&chart, r + h, t).to_vec() - 2.0 * RulingMap::point(&chart, r, t).to_vec()
                + RulingMap::point(&chart, r - h, t).to_vec();
            prop_assert!(second.norm() <= 1e-12);
        }
    }
}
